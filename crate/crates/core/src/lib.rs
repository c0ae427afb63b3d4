//! Phase-space toolkit for qudit, rotor and oscillator Hamiltonians.
//!
//! The crate is organized bottom-up: [`tensor`] holds the linear algebra,
//! [`weyl`] the clock-and-shift algebra, [`spaces`] the single-site operator
//! families and quasi-probability functions, [`expr`]/[`dsl`] a symbolic
//! Hamiltonian language, [`limits`] the maps between phase spaces, [`models`]
//! the worked lattice models and [`analysis`] numerical checks built on top.

pub mod analysis;
pub mod dsl;
pub mod expr;
pub mod lattice;
pub mod limits;
pub mod models;
pub mod spaces;
pub mod tensor;
pub mod weyl;

pub use num_complex::Complex64 as C64;

use thiserror::Error;

/// Umbrella error for callers that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] tensor::LinalgError),
    #[error(transparent)]
    Weyl(#[from] weyl::WeylError),
    #[error(transparent)]
    Space(#[from] spaces::SpaceError),
    #[error(transparent)]
    Expr(#[from] expr::ExprError),
    #[error(transparent)]
    Parse(#[from] dsl::ParseDiagnostics),
    #[error(transparent)]
    Limit(#[from] limits::LimitError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}

impl Error {
    /// Whether the failure is a dimension cap being exceeded.
    pub fn is_capacity(&self) -> bool {
        use tensor::LinalgError::Capacity;
        fn linalg(e: &tensor::LinalgError) -> bool {
            matches!(e, Capacity { .. })
        }
        fn weyl(e: &weyl::WeylError) -> bool {
            matches!(e, weyl::WeylError::Linalg(l) if linalg(l))
        }
        fn space(e: &spaces::SpaceError) -> bool {
            matches!(e, spaces::SpaceError::Linalg(l) if linalg(l))
        }
        fn expr(e: &expr::ExprError) -> bool {
            match e {
                expr::ExprError::Linalg(l) => linalg(l),
                expr::ExprError::Weyl(w) => weyl(w),
                expr::ExprError::Space(s) => space(s),
                _ => false,
            }
        }
        fn limit(e: &limits::LimitError) -> bool {
            match e {
                limits::LimitError::Linalg(l) => linalg(l),
                limits::LimitError::Expr(x) => expr(x),
                limits::LimitError::Space(s) => space(s),
                _ => false,
            }
        }
        fn model(e: &models::ModelError) -> bool {
            match e {
                models::ModelError::Linalg(l) => linalg(l),
                models::ModelError::Weyl(w) => weyl(w),
                models::ModelError::Space(s) => space(s),
                models::ModelError::Expr(x) => expr(x),
                models::ModelError::Limit(l) => limit(l),
                _ => false,
            }
        }
        match self {
            Error::Linalg(l) => linalg(l),
            Error::Weyl(w) => weyl(w),
            Error::Space(s) => space(s),
            Error::Expr(x) => expr(x),
            Error::Parse(_) => false,
            Error::Limit(l) => limit(l),
            Error::Model(m) => model(m),
            Error::Analysis(a) => match a {
                analysis::AnalysisError::Linalg(l) => linalg(l),
                analysis::AnalysisError::Space(s) => space(s),
                analysis::AnalysisError::Model(m) => model(m),
                analysis::AnalysisError::Expr(x) => expr(x),
                _ => false,
            },
        }
    }
}
