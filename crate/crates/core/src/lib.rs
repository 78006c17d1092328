//! Upper and lower bounds for the span of `P^m × P^n`, with replayable
//! obstruction certificates computed in `BP<3>`-homology.

pub mod bounds;
pub mod cli;
pub mod dyadic;
pub mod error;
pub mod laurent;
pub mod obstruction;
pub mod qmodule;
pub mod table1;

pub use bounds::{report, BoundReport, CaseId, CaseParams};
pub use dyadic::{adams_v, nu, nu_binom, sw_upper, Valuation};
pub use error::{Error, Result};
pub use obstruction::{best_bound_scan, build_sum, certify, verify, Certificate, CertifyOutcome};
pub use qmodule::{reduce, BasisTriple, LeadingClass, VanishingRule};
