//! Weighted backward shifts on Bargmann and theta Fock–Bargmann coefficient
//! spaces, their tensor products, and finite-horizon dynamics diagnostics.
//!
//! All coefficients are carried in the log domain ([`LogComplex`]).

pub mod basis;
pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod operator;
pub mod shift;
pub mod tensor;
pub mod weights;

pub use basis::{bargmann_basis_eval, coeff_inner, coeff_norm, synth, theta_basis_eval, Basis, CoeffVector};
pub use criteria::{
    bcs_premise_check, counterexample_scan, salas_scan, tensor_salas_scan, BcsReport, CounterexampleReport,
    CriterionReport, ProbeResult, Verdict,
};
pub use dynamics::{
    density_probe, eigenvector_build, hypercyclic_vector_build, orbit, periodic_from_target,
    periodic_point_from_eigen, relative_residual_log, EigenSpec, HypercyclicBuild, OrbitTrace,
};
pub use error::{Result, ShiftError};
pub use numerics::{log_add_exp, LogComplex, Wide};
pub use operator::LinearShift;
pub use shift::{adjoint_pairing_check, Direction, OperatorSpec, ShiftOperator, Triplet};
pub use tensor::{tensor_apply, tensor_inner, tensor_of, tensor_power_apply, tensor_right_inverse_apply, TensorOperator, TensorVector};
pub use weights::{BlockRole, ThetaParams, WeightFamily, WeightSequence, WeightSpec};
