//! Numerical Riemann-surface engine for genus 0 and 1.

pub mod curve;
pub mod differential;
pub mod genus0;
pub mod lattice;
pub mod pairing;
pub mod path;
pub mod quad;

pub use curve::{CurvePoint, WeierstrassCurveC, C64};
pub use lattice::{period_lattice, Cycle, PeriodLattice};
pub use path::{IntegrationPath, PathSegment};
pub use differential::{integrate, third_kind_differential, Differential, Divisor, NormalizedDifferential, NumericOptions, ThirdKindDifferential};
pub use genus0::{genus0_regularized_integral, regularized_integral_p1};
pub use pairing::{archimedean_disjoint_pairing, regularized_integral, regularized_integral_with, RegularizationOptions, RegularizedValue, Route};
