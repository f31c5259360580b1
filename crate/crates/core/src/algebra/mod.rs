//! Polynomials, rational functions in `x`, `y`, and Laurent series.

pub mod function;
pub mod poly;
pub mod roots;
pub mod series;

pub use function::{Poly2, RationalFunction};
pub use poly::Poly;
pub use series::Laurent;
