//! Exact symbolic calculus: polynomials, vector fields, 1- and 2-forms and
//! truncated Taylor series.

pub mod field;
pub mod forms;
pub mod poly;
pub mod series;

pub use field::{lie_bracket, PolyVectorField};
pub use forms::{exterior_derivative, interior_product, PolyOneForm, PolyTwoForm};
pub use poly::{vars_from, MultiPoly, Vars};
pub use series::{poly_on_series, pullback_oneform_by_jet, TaylorSeries};
