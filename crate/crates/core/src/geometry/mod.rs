//! Tensor data model: operator fields, connections, the Λ operator on
//! bilinear forms, and how these transform under a change of variables.

mod tensors;
mod transform;

pub use tensors::{
    build_lambda, lambda_sym_matrix, Connection, LambdaTensor, OperatorField, SymOperator, SymPairIndex, Symmetry,
};
pub use transform::{
    diffusion_connection, pull_back_connection, pull_back_operator, theta_from_transform, transform_connection,
    transform_operator, transform_system, Chart, PointTransform,
};
