//! Surfaces as height functions over a reference plane.

mod grid;
mod integrate;
mod profile;
mod pair;

pub use grid::{load_grid_file, load_grid_profile, GridData};
pub use integrate::IntegrationPlan;
pub use pair::TwoSurfaceConfig;
pub use profile::{
    make_cylinder_profile, make_paraboloid_profile, make_sphere_profile, Domain, HeightProfile, Point,
};

/// Default truncation of circular profiles, as a fraction of the radius.
pub const DEFAULT_MAX_FRACTION: f64 = 0.95;
