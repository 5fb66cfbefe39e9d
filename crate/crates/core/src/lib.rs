//! Curves of a normed plane with a piecewise smooth unit ball: measures,
//! the Wigner caustic / constant-width decomposition and the isoperimetric
//! ledger built on it.

pub mod ball;
pub mod cli;
pub mod corpus;
pub mod curve;
pub mod decomp;
pub mod expr;
pub mod geom;
pub mod inequalities;
pub mod measures;
pub mod quad;
pub mod svg;

pub use ball::{builtin_ball, BallError, BuiltinParams, UnitBall};
pub use curve::{curve_from_explicit, curve_from_radius, AdmissibleCurve, CurveError, RadiusFunction};
pub use decomp::{decompose, Decomposition};
pub use expr::Expr;
pub use geom::Vec2;
pub use inequalities::{iso_ledger, lhuilier_check, IsoLedger, Polygon};
pub use quad::{QuadError, QuadratureConfig};
