//! The super-Laplacian, its exponential, Gaussian expectation of
//! polynomials, and the bilinear cross functions built from it.
//!
//! The sign bookkeeping uses left fermion derivatives: composing
//! `∂_ψ ∂_ψ̄` on the canonically sorted fermion list gives the
//! contraction sign `(-1)^{pos(ψ) + pos(ψ̄)}`, so a single fermion
//! pair contracts to `-C` while a boson pair contracts to `+C`. That
//! relative sign is what cancels the fermion and boson loops, keeps
//! `e^{L}(ντ) = ντ`, and makes the expectation of the interaction
//! reproduce the tau-coefficient shift `2gC(0)`.

use super::generator::{Generator, Species};
use super::monomial::{Component, Monomial};
use super::poly::{Algebra, SuperPolynomial};
use crate::covariance::CovarianceSource;
use crate::error::Result;
use crate::lattice::TorusLattice;
use crate::scalar::Scalar;

/// Contraction values between an unbarred generator and a barred one.
pub trait ContractionKernel<S: Scalar> {
    fn pair(&self, unbarred: &Generator, barred: &Generator) -> S;
}

/// Plain pairing through a translation-invariant covariance on the
/// torus: `pair((∇^α φ)_x, (∇^β φ̄)_y) = ∇^α_x ∇^β_y C(x-y)`.
pub struct LatticeContraction<'a, S: Scalar> {
    pub lat: &'a TorusLattice,
    pub cov: &'a dyn CovarianceSource<S>,
}

impl<'a, S: Scalar> ContractionKernel<S> for LatticeContraction<'a, S> {
    fn pair(&self, unbarred: &Generator, barred: &Generator) -> S {
        self.cov.contraction(
            self.lat,
            unbarred.point,
            &unbarred.deriv,
            unbarred.lap,
            barred.point,
            &barred.deriv,
            barred.lap,
        )
    }
}

/// Cross pairing in a doubled point namespace: only mixed pairs (one
/// point below `n`, the other at or above) contract, through the base
/// covariance after reducing points mod `n`. Realises the bilinear
/// bridge operator between two tensor factors.
pub struct CrossContraction<'a, S: Scalar> {
    pub lat: &'a TorusLattice,
    pub cov: &'a dyn CovarianceSource<S>,
    pub n: usize,
}

impl<'a, S: Scalar> ContractionKernel<S> for CrossContraction<'a, S> {
    fn pair(&self, unbarred: &Generator, barred: &Generator) -> S {
        let a_primed = unbarred.point >= self.n;
        let b_primed = barred.point >= self.n;
        if a_primed == b_primed {
            return S::zero();
        }
        self.cov.contraction(
            self.lat,
            unbarred.point % self.n,
            &unbarred.deriv,
            unbarred.lap,
            barred.point % self.n,
            &barred.deriv,
            barred.lap,
        )
    }
}

/// One application of the super-Laplacian.
pub fn super_laplacian<S: Scalar>(
    kernel: &dyn ContractionKernel<S>,
    a: &SuperPolynomial<S>,
) -> SuperPolynomial<S> {
    let mut out = SuperPolynomial::zero();
    for (m, c) in &a.terms {
        // boson contractions
        for (i, gi) in m.bosons.iter().enumerate() {
            if gi.species != Species::Phi {
                continue;
            }
            for (k, gk) in m.bosons.iter().enumerate() {
                if gk.species != Species::PhiBar {
                    continue;
                }
                let v = kernel.pair(gi, gk);
                if v.is_zero() {
                    continue;
                }
                let mut bosons = m.bosons.clone();
                // remove the larger index first
                let (hi, lo) = if i > k { (i, k) } else { (k, i) };
                bosons.remove(hi);
                bosons.remove(lo);
                let m2 = Monomial {
                    bosons,
                    fermions: m.fermions.clone(),
                    sigma: m.sigma,
                    sigma_bar: m.sigma_bar,
                };
                out.accumulate(m2, c.clone() * v);
            }
        }
        // fermion contractions with left-derivative signs
        for (i, gi) in m.fermions.iter().enumerate() {
            if gi.species != Species::Psi {
                continue;
            }
            for (k, gk) in m.fermions.iter().enumerate() {
                if gk.species != Species::PsiBar {
                    continue;
                }
                let v = kernel.pair(gi, gk);
                if v.is_zero() {
                    continue;
                }
                let mut fermions = m.fermions.clone();
                let (hi, lo) = if i > k { (i, k) } else { (k, i) };
                fermions.remove(hi);
                fermions.remove(lo);
                let sign_neg = (i + k) % 2 == 1;
                let m2 = Monomial {
                    bosons: m.bosons.clone(),
                    fermions,
                    sigma: m.sigma,
                    sigma_bar: m.sigma_bar,
                };
                let cv = c.clone() * v;
                out.accumulate(m2, if sign_neg { -cv } else { cv });
            }
        }
    }
    out
}

/// `e^{±L_C} A` as the exact finite sum (the Laplacian lowers degree).
pub fn exp_laplacian<S: Scalar>(
    kernel: &dyn ContractionKernel<S>,
    a: &SuperPolynomial<S>,
    positive: bool,
) -> SuperPolynomial<S> {
    let mut sum = a.clone();
    let mut term = a.clone();
    let mut k: i64 = 0;
    loop {
        k += 1;
        term = super_laplacian(kernel, &term).div_int(if positive { k } else { -k });
        if term.is_zero() {
            return sum;
        }
        sum = sum.add(&term);
    }
}

/// Gaussian expectation of a polynomial after the field-doubling map:
/// fluctuations integrate out through the Laplacian exponential.
pub fn expectation_theta<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
) -> SuperPolynomial<S> {
    let kernel = LatticeContraction { lat, cov };
    exp_laplacian(&kernel, a, true)
}

/// The bilinear function `F_C(A,B) = e^{L}((e^{-L}A)(e^{-L}B)) - AB`.
pub fn f_c<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let kernel = LatticeContraction { lat, cov };
    let ea = exp_laplacian(&kernel, a, false);
    let eb = exp_laplacian(&kernel, b, false);
    let prod = ea.mul(&eb, alg)?;
    let lifted = exp_laplacian(&kernel, &prod, true);
    Ok(lifted.sub(&a.mul(b, alg)?))
}

/// `F_C` through the finite cross expansion
/// `Σ_{n>=1} (1/n!) A (L̂)^n B`, realised in a doubled point
/// namespace. Identical to `f_c` as an element; every term carries at
/// least one cross contraction factor, so vanishing beyond the
/// covariance range is bit-exact.
pub fn f_c_cross<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let n = lat.n_sites();
    let b_primed = b.map_points(|p| p + n);
    let prod = a.mul(&b_primed, alg)?;
    let kernel = CrossContraction { lat, cov, n };
    let lifted = exp_laplacian(&kernel, &prod, true);
    Ok(lifted.sub(&prod).map_points(|p| p % n))
}

/// `F_{π,C}(A,B) = F_C(A, π_∅ B) + F_C(π_* A, B)`.
pub fn f_pi<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let first = f_c(lat, cov, a, &b.project(Component::Bulk), alg)?;
    let second = f_c(lat, cov, &a.project_star(), b, alg)?;
    Ok(first.add(&second))
}

/// `F_{π,C}` through the cross expansion (bit-exact finite range).
pub fn f_pi_cross<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let first = f_c_cross(lat, cov, a, &b.project(Component::Bulk), alg)?;
    let second = f_c_cross(lat, cov, &a.project_star(), b, alg)?;
    Ok(first.add(&second))
}

/// Truncated expectation of doubled-map images:
/// `E(θA; θB) = E(θ(AB)) - E(θA) E(θB)`.
pub fn truncated_expectation_theta<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let joint = expectation_theta(lat, cov, &a.mul(b, alg)?);
    let split = expectation_theta(lat, cov, a).mul(&expectation_theta(lat, cov, b), alg)?;
    Ok(joint.sub(&split))
}

/// `E_π(θA; θB) = E(θA; π_∅ θB) + E(π_* θA; θB)`.
pub fn truncated_expectation_pi<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
    b: &SuperPolynomial<S>,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let first = truncated_expectation_theta(lat, cov, a, &b.project(Component::Bulk), alg)?;
    let second = truncated_expectation_theta(lat, cov, &a.project_star(), b, alg)?;
    Ok(first.add(&second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{phi, phi_bar, psi, psi_bar};
    use crate::covariance::MapCovariance;
    use crate::lattice::MultiIndex;
    use num_complex::Complex64;

    fn test_cov(d: usize) -> MapCovariance<Complex64> {
        let mut cov = MapCovariance::new(d, 3);
        cov.insert(&vec![0; d], Complex64::new(2.0, 0.0));
        let mut e = vec![0i64; d];
        e[0] = 1;
        cov.insert(&e, Complex64::new(0.5, 0.0));
        cov
    }

    #[test]
    fn boson_contraction_is_plus_c() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let alg = Algebra::default();
        let a = phi::<Complex64>(1, 0).mul(&phi_bar(1, 1), &alg).unwrap();
        let l = super_laplacian(&kernel, &a);
        assert_eq!(l, SuperPolynomial::constant(Complex64::new(0.5, 0.0)));
    }

    #[test]
    fn fermion_contraction_is_minus_c() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let alg = Algebra::default();
        let a = psi::<Complex64>(1, 0).mul(&psi_bar(1, 1), &alg).unwrap();
        let l = super_laplacian(&kernel, &a);
        assert_eq!(l, SuperPolynomial::constant(Complex64::new(-0.5, 0.0)));
    }

    #[test]
    fn tau_is_annihilated() {
        // L(φφ̄ + ψψ̄) = C - C = 0: the supersymmetric cancellation
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let alg = Algebra::default();
        let x = 1;
        let tau = phi::<Complex64>(1, x)
            .mul(&phi_bar(1, x), &alg)
            .unwrap()
            .add(&psi(1, x).mul(&psi_bar(1, x), &alg).unwrap());
        assert!(super_laplacian(&kernel, &tau).is_zero());
        assert_eq!(expectation_theta(&lat, &cov, &tau), tau);
    }

    #[test]
    fn decorated_contraction_uses_derived_kernel() {
        // L((∇^e φ)_x φ̄_y) = (∇^e_x C)(x,y)
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let alg = Algebra::default();
        let e = MultiIndex::unit(1, 0, true);
        let dphi = SuperPolynomial::<Complex64>::generator(Generator::new(
            Species::Phi,
            0,
            e.clone(),
        ));
        let a = dphi.mul(&phi_bar(1, 1), &alg).unwrap();
        let l = super_laplacian(&kernel, &a);
        // z = x - y = -1; D^e K(-1) = K(0) - K(-1) = 2 - 0.5
        let expect = cov.derived_offset(&[-1], &e, &MultiIndex::zero(1), 0, 0);
        assert_eq!(l, SuperPolynomial::constant(expect));
        assert_eq!(expect, Complex64::new(1.5, 0.0));
    }

    #[test]
    fn exp_laplacian_inverse_pair() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let alg = Algebra::default();
        // degree-6 mixed element
        let a = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 1), &alg)
            .unwrap()
            .mul(&phi(1, 2), &alg)
            .unwrap()
            .mul(&phi_bar(1, 2), &alg)
            .unwrap()
            .mul(&psi(1, 3), &alg)
            .unwrap()
            .mul(&psi_bar(1, 0), &alg)
            .unwrap()
            .add(&phi(1, 1).mul(&phi_bar(1, 3), &alg).unwrap());
        let up = exp_laplacian(&kernel, &a, true);
        let back = exp_laplacian(&kernel, &up, false);
        assert!(back.residual(&a) < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let alg = Algebra::default();
        // E θ(φ_x φ̄_x) = φφ̄ + C(0)
        let a = phi::<Complex64>(1, 0).mul(&phi_bar(1, 0), &alg).unwrap();
        let ea = expectation_theta(&lat, &cov, &a);
        assert_eq!(
            ea,
            a.add(&SuperPolynomial::constant(Complex64::new(2.0, 0.0)))
        );
        // constants are fixed
        let c = SuperPolynomial::constant(Complex64::new(3.0, 1.0));
        assert_eq!(expectation_theta(&lat, &cov, &c), c);
    }

    #[test]
    fn f_c_examples() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let alg = Algebra::default();
        // degree-1 arguments: F_C(φ_x, φ̄_y) = C(x,y)
        let a = phi::<Complex64>(1, 0);
        let b = phi_bar::<Complex64>(1, 1);
        let f = f_c(&lat, &cov, &a, &b, &alg).unwrap();
        assert!(f.residual(&SuperPolynomial::constant(Complex64::new(0.5, 0.0))) < 1e-14);
        // the unit annihilates
        let one = SuperPolynomial::one();
        assert!(f_c(&lat, &cov, &a, &one, &alg).unwrap().is_zero());
        // bilinearity
        let a2 = psi::<Complex64>(1, 1).mul(&psi_bar(1, 0), &alg).unwrap();
        let lhs = f_c(&lat, &cov, &a.add(&a2), &b, &alg).unwrap();
        let rhs = f_c(&lat, &cov, &a, &b, &alg)
            .unwrap()
            .add(&f_c(&lat, &cov, &a2, &b, &alg).unwrap());
        assert!(lhs.residual(&rhs) < 1e-14);
    }

    #[test]
    fn cross_route_matches_definition() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let alg = Algebra::default();
        let a = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 0), &alg)
            .unwrap()
            .mul(&phi(1, 0), &alg)
            .unwrap()
            .mul(&phi_bar(1, 0), &alg)
            .unwrap()
            .add(&psi(1, 0).mul(&psi_bar(1, 0), &alg).unwrap());
        let b = phi::<Complex64>(1, 1)
            .mul(&phi_bar(1, 1), &alg)
            .unwrap()
            .add(&psi(1, 1).mul(&psi_bar(1, 1), &alg).unwrap())
            .scale(&Complex64::new(0.3, -0.2));
        let direct = f_c(&lat, &cov, &a, &b, &alg).unwrap();
        let cross = f_c_cross(&lat, &cov, &a, &b, &alg).unwrap();
        assert!(direct.residual(&cross) < 1e-13);
        let dpi = f_pi(&lat, &cov, &a, &b, &alg).unwrap();
        let cpi = f_pi_cross(&lat, &cov, &a, &b, &alg).unwrap();
        assert!(dpi.residual(&cpi) < 1e-13);
    }

    #[test]
    fn truncated_expectation_examples() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let alg = Algebra::default();
        let a = phi::<Complex64>(1, 0);
        let b = phi_bar::<Complex64>(1, 1);
        // E(φ; φ̄) = C
        let t = truncated_expectation_theta(&lat, &cov, &a, &b, &alg).unwrap();
        assert!(t.residual(&SuperPolynomial::constant(Complex64::new(0.5, 0.0))) < 1e-14);
        // E(A; 1) = 0
        let one = SuperPolynomial::one();
        assert!(truncated_expectation_theta(&lat, &cov, &a, &one, &alg)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn expectation_preserves_gauge_invariance() {
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let cov = test_cov(1);
        let alg = Algebra::default();
        let f = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 1), &alg)
            .unwrap()
            .mul(&psi(1, 2), &alg)
            .unwrap()
            .mul(&psi_bar(1, 3), &alg)
            .unwrap();
        assert!(f.is_gauge_invariant());
        assert!(expectation_theta(&lat, &cov, &f).is_gauge_invariant());
    }
}
