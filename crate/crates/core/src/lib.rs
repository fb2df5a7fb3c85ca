//! Exact computations in the twisted Yangian `Y_3^+` of type AI.

pub mod cache;
pub mod error;
pub mod exact;
pub mod pbw;
pub mod report;
pub mod series;
pub mod twisted;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{Rational, ScalarPoly};
pub use pbw::{Algebra, AlgebraSpec, Element, Gen, GeneratorId, Monomial};
pub use report::{ReportDocument, RunConfig};
pub use series::{ElementSeries, SeriesMatrix};
pub use twisted::Tables;
pub use verify::{run_suite, Assessment, Status, Suite, VerificationResult, VerifyParams};
