//! Power weights `w_gamma(x) = (1 + |x|)^(-gamma)`, weighted norms, the
//! Muckenhoupt functional and the discrete maximal function.

mod maximal;
mod muckenhoupt;
mod norms;

pub use maximal::{
    ball_kernel, maximal_function, operator_bound_estimate, BoundedOperator, OperatorBound,
};
pub use muckenhoupt::{
    ball_average_radial, muckenhoupt_functional, muckenhoupt_scan, BallCase, CaseSummary,
    MuckenhouptReport, MuckenhouptSample, MuckenhouptSummary, ScanLattice, BOUND_SLACK,
    JENSEN_SLACK,
};
pub use norms::{
    b2_norm, b2_profile, embedding_constants, mixed_norm, time_norm, weight_eval, weighted_norm,
    EmbeddingConstants, Magnitude, TimeExponent, WeightSpec,
};
