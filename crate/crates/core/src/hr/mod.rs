//! Restricted HR gradient operators.

pub mod gradient;
pub mod jacobian;
pub mod jet;
pub mod rules;

pub use gradient::{
    differential, hr_from_real, left_from_real, real_from_hr, real_from_left, real_from_right,
    right_from_real, HRGradient, RealGradient, Side,
};
pub use jacobian::{ExactMatrix, JacobianJ, QuatMatrix, SignedUnit};
pub use jet::{jet_gradient, QJet, QuatScalar};
pub use rules::{
    chain_matrix_from_components, chain_rule_first, chain_rule_second, chain_rule_third,
    component_chain_matrix, involution_chain_matrix, product_rule_first, product_rule_first_right,
    real_valued_increment, real_valued_reduce, steepest_descent,
};
