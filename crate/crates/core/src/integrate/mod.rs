//! Integration of forms over chains, Stokes checks, advection and integral invariants.

mod advect;
mod chain;
mod checks;
mod cube;
mod invariant;
mod quadrature;
pub mod shapes;

pub use advect::{
    advect_chain, rk4_step, swept_chain, trajectory, AdvectedChainFamily, Flow, Marker,
    DEFAULT_STEPS,
};
pub use chain::random_polynomial_form;
pub use chain::{integrate, GeometricChain};
pub use checks::{
    derham_classify, derham_cochain, stokes, stokes_residual, DeRhamClass, Probe, ProbeKind,
    ProbeValue, StokesReport,
};
pub use cube::{CubeGeometry, MapFn, SingularCube, TangentFn, TANGENT_STEP};
pub use invariant::{
    invariant_report, sample_derivative, BetaWitness, InvariantClass, InvariantOptions,
    InvariantReport, NamedCheck, ProbeDrift, ABSOLUTE_TOLERANCE, LIE_SAMPLES, RATE_TOLERANCE,
    RELATIVE_TOLERANCE,
};
pub use quadrature::{gauss_legendre, tensor_nodes, DEFAULT_ORDER};
