//! Hash-code search, solver encodings, bound formulas and a small MSO laboratory.

pub mod bounds;
pub mod encoders;
pub mod hashcore;
pub mod ledger;
pub mod msolab;
pub mod searcher;
pub mod sexpr;

/// Scalar type used for bound evaluation throughout the workspace.
pub type Real = f64;
/// Bound constants over [`Real`].
pub type RealBoundProfile = bounds::BoundProfile<Real>;
/// Bound values over [`Real`].
pub type RealBoundValues = bounds::BoundValues<Real>;
