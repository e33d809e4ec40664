//! Experiment drivers built on the closed forms and the simulator: parameter
//! sweeps, simulation-versus-analysis reports and high-power slope fits.

mod diversity;
mod sweep;
mod validate;

pub use diversity::{diversity_fit, mc_fit_points, DiversityFit};
pub use sweep::{run_sweep, Axis, SweepMethod, SweepRow, SweepSpec, SweepTable};
pub use validate::{judge, validate_report, ValidationReport, ValidationRow};
