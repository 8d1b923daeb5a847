//! Gowers norms of multiplicative functions along arithmetic progressions,
//! with the supporting number-theoretic machinery: sieved tables, polynomial
//! phases and their equidistribution, correlation sums and discrepancy scans,
//! the Ramaré identity pipeline, type-II sums and lcm statistics.

pub mod arithfn;
pub mod bilinear;
pub mod error;
pub mod gowers;
pub mod harness;
pub mod numeric;
pub mod phases;
pub mod progressions;
pub mod ramare;

pub use arithfn::{ArithTable, FunctionKind, SpfTable};
pub use error::{Error, Result};
pub use gowers::{ComplexSeq, GowersResult, Strategy};
pub use num_complex::Complex64;
pub use phases::{DioApprox, EquidistReport, PolyPhase};
pub use progressions::{BvReport, FSpec, ProgressionSpec};
pub use ramare::{GSpec, MultSpec, RamareWindow, SigmaPartition};
pub use bilinear::{LcmStats, TypeIIConfig};
