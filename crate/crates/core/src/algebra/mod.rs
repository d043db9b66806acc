//! The graded polynomial algebra in boson, fermion, and observable
//! generators, with the super-Laplacian and Gaussian expectation.

pub mod generator;
pub mod laplacian;
pub mod monomial;
pub mod poly;
pub mod series;
pub mod wick;

pub use generator::{Generator, Species};
pub use laplacian::{
    exp_laplacian, expectation_theta, f_c, f_c_cross, f_pi, f_pi_cross, super_laplacian,
    truncated_expectation_pi, truncated_expectation_theta, ContractionKernel, CrossContraction,
    LatticeContraction,
};
pub use monomial::{Component, Monomial};
pub use poly::{phi, phi_bar, psi, psi_bar, Algebra, SuperPolynomial};
pub use series::CouplingSeries;
pub use wick::oracle_expectation;
