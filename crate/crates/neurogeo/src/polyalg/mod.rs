//! Exact polynomial algebra: scalars, monomials, sparse multivariate
//! polynomials, activations, and prime fields.

pub mod activation;
pub mod fp;
pub mod monomial;
pub mod poly;
pub mod ratio_serde;
pub mod scalar;

pub use activation::Activation;
pub use fp::{is_prime, random_prime, PrimeField};
pub use monomial::{monomials_of_degree, monomials_with_degrees, Monomial};
pub use poly::{MultiPoly, PolyMap};
pub use scalar::{rational_from_str, rational_to_string, Scalar};
