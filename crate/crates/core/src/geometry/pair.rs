use super::integrate::IntegrationPlan;
use super::profile::{HeightProfile, Point};
use crate::error::{invalid, Result};

/// Two surfaces measured from a common reference plane, `psi2` above `psi1`.
#[derive(Debug, Clone)]
pub struct TwoSurfaceConfig {
    pub psi1: HeightProfile,
    pub psi2: HeightProfile,
    plan: IntegrationPlan,
}

/// Local data of both surfaces at one point of the reference plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSample {
    pub psi1: f64,
    pub grad1: Point,
    pub psi2: f64,
    pub grad2: Point,
}

impl PairSample {
    pub fn gap(&self) -> f64 {
        self.psi2 - self.psi1
    }
}

impl TwoSurfaceConfig {
    pub fn new(psi1: HeightProfile, psi2: HeightProfile) -> Result<Self> {
        let plan = IntegrationPlan::for_pair(&psi1, &psi2)?;
        if psi1.length() != psi2.length() {
            return invalid("surfaces must have the same length");
        }
        Ok(Self { psi1, psi2, plan })
    }

    /// Swap the two surfaces; the result generally has a negative gap.
    pub fn swapped(&self) -> Self {
        Self {
            psi1: self.psi2.clone(),
            psi2: self.psi1.clone(),
            plan: self.plan.clone(),
        }
    }

    pub fn plan(&self) -> &IntegrationPlan {
        &self.plan
    }

    pub fn sample(&self, p: Point) -> PairSample {
        let (psi1, grad1) = self.psi1.eval_grad(p);
        let (psi2, grad2) = self.psi2.eval_grad(p);
        PairSample {
            psi1,
            grad1,
            psi2,
            grad2,
        }
    }

    pub fn gap(&self, p: Point) -> f64 {
        self.sample(p).gap()
    }
}
