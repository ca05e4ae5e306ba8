mod curve;
mod darboux;
mod report;
mod simulate;
mod verify;

pub use curve::curve;
pub use darboux::darboux;
pub use report::report;
pub use simulate::{simulate, SimulateConfig};
pub use verify::{verify, Perturbation, VerifyConfig};
