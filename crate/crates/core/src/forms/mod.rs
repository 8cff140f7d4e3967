//! Differential forms and multivector fields on flat flow space.

pub mod algebra;
mod field;
mod metric;
mod ops;

pub use field::{
    Domain, EvalFn, Exclusion, ExclusionShape, Field, FormField, JacFn, MultiVectorField,
    DEFAULT_STEP,
};
pub use metric::{lower, raise, Metric, VolumeElement};
pub use ops::{
    divergence, exterior_derivative, interior_product, lie_derivative, pair, scale_by,
    scale_multivector, sharp, sharp_inverse, wedge, wedge_multivector,
};
