//! Symbols of non-stationary exponential B-spline and exponential
//! pseudo-spline subdivision schemes, with verifiers for the algebraic
//! conditions they satisfy and a small engine for running them on data.

pub mod bspline;
pub mod correction;
pub mod dd;
pub mod engine;
pub mod error;
pub mod frequency;
pub mod io;
pub mod laurent;
pub mod pseudo;
pub mod scalar;

pub use bspline::{normalized_symbol, unnormalized_symbol, ExpBSplineSymbol, Normalization};
pub use correction::{hermite_correction, stationary_correction, CorrectionPoly};
pub use engine::{refine, run, BoundaryPolicy, LevelMask, RefinedData};
pub use error::{Error, Result};
pub use frequency::{Frequency, GammaSet, Theta};
pub use laurent::{LaurentPoly, RealMask, SymmetryClass};
pub use pseudo::{symbol, SchemeFamily};
pub use scalar::{Cx, Dd, Real};
