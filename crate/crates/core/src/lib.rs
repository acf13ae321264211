pub mod ballprob;
pub mod error;
pub mod mcoracle;
pub mod monotone;
pub mod quad;
pub mod specfun;
pub mod tdist;

pub use ballprob::Radius;
pub use error::{Error, Result};
pub use mcoracle::{McEstimate, SampleBatch};
pub use monotone::{Classification, MonotonicityReport, NuGrid};
pub use quad::{QuadEstimate, QuadSpec};
pub use tdist::{Dim, Dof};
