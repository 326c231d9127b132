//! Bounds on the quantum value of nonlocal games through the NPA and one-sided
//! NPA hierarchies, with sum-of-squares certificates and their conversion to
//! nice certificates.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

mod error;
mod scalar;

pub mod algebra;
pub mod games;
pub mod relaxation;
pub mod sdp;
pub mod certificate;
pub mod nicify;

pub use error::{Error, Result};
pub use scalar::{root_of_unity, Real, C};

pub use algebra::{AlgebraSignature, GeneratorKind, Letter, Monomial, Party};

pub use games::{builtin, GameSpec, NonlocalGame};
pub use certificate::NicenessReport;

pub type Polynomial = algebra::Polynomial<f64>;
pub type GamePolynomial = games::GamePolynomial<f64>;
pub type SdpProblem = relaxation::SdpProblem<f64>;
pub type SdpSolution = sdp::SdpSolution<f64>;
pub type SosCertificate = certificate::SosCertificate<f64>;
pub type VerifyReport = certificate::VerifyReport<f64>;
pub type StructuredGram = nicify::StructuredGram<f64>;
