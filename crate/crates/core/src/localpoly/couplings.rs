//! The space of local interactions: coupling tuples and their
//! realisation as field polynomials.

use crate::algebra::{Algebra, Generator, Species, SuperPolynomial};
use crate::error::Result;
use crate::lattice::{MultiIndex, TorusLattice};
use crate::scalar::Scalar;

/// The coupling tuple `(g, ν, z, y, λ^a, λ^b, q^a, q^b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings<S: Scalar> {
    pub g: S,
    pub nu: S,
    pub z: S,
    pub y: S,
    pub lambda_a: S,
    pub lambda_b: S,
    pub q_a: S,
    pub q_b: S,
}

impl<S: Scalar> Default for Couplings<S> {
    fn default() -> Self {
        Couplings {
            g: S::zero(),
            nu: S::zero(),
            z: S::zero(),
            y: S::zero(),
            lambda_a: S::zero(),
            lambda_b: S::zero(),
            q_a: S::zero(),
            q_b: S::zero(),
        }
    }
}

impl<S: Scalar> Couplings<S> {
    pub fn bulk(g: S, nu: S, z: S, y: S) -> Self {
        Couplings {
            g,
            nu,
            z,
            y,
            ..Default::default()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Couplings {
            g: self.g.clone() + other.g.clone(),
            nu: self.nu.clone() + other.nu.clone(),
            z: self.z.clone() + other.z.clone(),
            y: self.y.clone() + other.y.clone(),
            lambda_a: self.lambda_a.clone() + other.lambda_a.clone(),
            lambda_b: self.lambda_b.clone() + other.lambda_b.clone(),
            q_a: self.q_a.clone() + other.q_a.clone(),
            q_b: self.q_b.clone() + other.q_b.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Couplings {
            g: self.g.clone() - other.g.clone(),
            nu: self.nu.clone() - other.nu.clone(),
            z: self.z.clone() - other.z.clone(),
            y: self.y.clone() - other.y.clone(),
            lambda_a: self.lambda_a.clone() - other.lambda_a.clone(),
            lambda_b: self.lambda_b.clone() - other.lambda_b.clone(),
            q_a: self.q_a.clone() - other.q_a.clone(),
            q_b: self.q_b.clone() - other.q_b.clone(),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        [
            self.g.abs_f64(),
            self.nu.abs_f64(),
            self.z.abs_f64(),
            self.y.abs_f64(),
            self.lambda_a.abs_f64(),
            self.lambda_b.abs_f64(),
            self.q_a.abs_f64(),
            self.q_b.abs_f64(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Locations of the two observable points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservablePoints {
    pub a: usize,
    pub b: usize,
}

/// `τ_x = φφ̄ + ψψ̄` at a site.
pub fn tau<S: Scalar>(lat: &TorusLattice, x: usize, alg: &Algebra) -> SuperPolynomial<S> {
    let d = lat.dim();
    let bos = SuperPolynomial::generator(Generator::plain(Species::Phi, x, d))
        .mul(
            &SuperPolynomial::generator(Generator::plain(Species::PhiBar, x, d)),
            alg,
        )
        .expect("degree 2");
    let fer = SuperPolynomial::generator(Generator::plain(Species::Psi, x, d))
        .mul(
            &SuperPolynomial::generator(Generator::plain(Species::PsiBar, x, d)),
            alg,
        )
        .expect("degree 2");
    bos.add(&fer)
}

fn decorated<S: Scalar>(species: Species, x: usize, deriv: MultiIndex) -> SuperPolynomial<S> {
    SuperPolynomial::generator(Generator::new(species, x, deriv))
}

/// `(-Δ φ^{(s)})_x` as a single atomically decorated generator (the
/// Laplacian is one seminorm factor of derivative order two).
pub fn minus_laplacian_generator<S: Scalar>(
    lat: &TorusLattice,
    species: Species,
    x: usize,
) -> SuperPolynomial<S> {
    let d = lat.dim();
    SuperPolynomial::generator(Generator::with_lap(species, x, MultiIndex::zero(d), 1))
        .scale(&(-S::one()))
}

/// `τ_{Δ,x}`: Laplacian-decorated quadratic form.
pub fn tau_delta<S: Scalar>(lat: &TorusLattice, x: usize, alg: &Algebra) -> SuperPolynomial<S> {
    let d = lat.dim();
    let half = S::from_ratio(1, 2);
    let mut out = SuperPolynomial::zero();
    for (un, bar) in [(Species::Phi, Species::PhiBar), (Species::Psi, Species::PsiBar)] {
        let lap_un = minus_laplacian_generator::<S>(lat, un, x);
        let lap_bar = minus_laplacian_generator::<S>(lat, bar, x);
        let plain_un = decorated::<S>(un, x, MultiIndex::zero(d));
        let plain_bar = decorated::<S>(bar, x, MultiIndex::zero(d));
        out = out.add(&lap_un.mul(&plain_bar, alg).expect("degree 2"));
        out = out.add(&plain_un.mul(&lap_bar, alg).expect("degree 2"));
    }
    out.scale(&half)
}

/// `τ_{∇∇,x} = 1/2 Σ_{e∈U} (∇^e φ)(∇^e φ̄) + (∇^e ψ)(∇^e ψ̄)`.
pub fn tau_grad_grad<S: Scalar>(lat: &TorusLattice, x: usize, alg: &Algebra) -> SuperPolynomial<S> {
    let d = lat.dim();
    let mut out = SuperPolynomial::zero();
    for axis in 0..d {
        for fwd in [true, false] {
            let e = MultiIndex::unit(d, axis, fwd);
            for (un, bar) in [(Species::Phi, Species::PhiBar), (Species::Psi, Species::PsiBar)]
            {
                let p = decorated::<S>(un, x, e.clone())
                    .mul(&decorated(bar, x, e.clone()), alg)
                    .expect("degree 2");
                out = out.add(&p);
            }
        }
    }
    out.scale(&S::from_ratio(1, 2))
}

/// The local interaction at one site, including the observable terms
/// when the site is `a` or `b`.
pub fn v_at_site<S: Scalar>(
    lat: &TorusLattice,
    c: &Couplings<S>,
    x: usize,
    obs: ObservablePoints,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let d = lat.dim();
    let t = tau::<S>(lat, x, alg);
    let mut v = t.mul(&t, alg)?.scale(&c.g);
    v = v.add(&t.scale(&c.nu));
    v = v.add(&tau_delta::<S>(lat, x, alg).scale(&c.z));
    v = v.add(&tau_grad_grad::<S>(lat, x, alg).scale(&c.y));
    if x == obs.a {
        let term = SuperPolynomial::<S>::sigma()
            .mul(&decorated(Species::PhiBar, x, MultiIndex::zero(d)), alg)?
            .scale(&(-c.lambda_a.clone()));
        v = v.add(&term);
        let qterm = SuperPolynomial::<S>::sigma()
            .mul(&SuperPolynomial::sigma_bar(), alg)?
            .scale(&(-c.q_a.clone()).div_int(2));
        v = v.add(&qterm);
    }
    if x == obs.b {
        let term = SuperPolynomial::<S>::sigma_bar()
            .mul(&decorated(Species::Phi, x, MultiIndex::zero(d)), alg)?
            .scale(&(-c.lambda_b.clone()));
        v = v.add(&term);
        let qterm = SuperPolynomial::<S>::sigma()
            .mul(&SuperPolynomial::sigma_bar(), alg)?
            .scale(&(-c.q_b.clone()).div_int(2));
        v = v.add(&qterm);
    }
    Ok(v)
}

/// `V(X) = Σ_{x∈X} V_x`.
pub fn build_v<S: Scalar>(
    lat: &TorusLattice,
    c: &Couplings<S>,
    sites: &[usize],
    obs: ObservablePoints,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let mut v = SuperPolynomial::zero();
    for &x in sites {
        v = v.add(&v_at_site(lat, c, x, obs, alg)?);
    }
    Ok(v)
}

/// `V(Λ)`.
pub fn build_v_torus<S: Scalar>(
    lat: &TorusLattice,
    c: &Couplings<S>,
    obs: ObservablePoints,
    alg: &Algebra,
) -> Result<SuperPolynomial<S>> {
    let sites: Vec<usize> = lat.sites().collect();
    build_v(lat, c, &sites, obs, alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_couplings_give_zero() {
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints { a: 0, b: 3 };
        let v = build_v::<Complex64>(&lat, &Couplings::default(), &[0, 1, 2], obs, &alg).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn g_only_expands_by_nilpotency() {
        // g τ_x² = g(φφ̄φφ̄ + 2 φφ̄ψψ̄)
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints { a: 0, b: 1 };
        let mut c = Couplings::<Complex64>::default();
        c.g = Complex64::new(1.0, 0.0);
        let v = build_v(&lat, &c, &[2], obs, &alg).unwrap();
        assert_eq!(v.terms.len(), 2);
        let quartic = v
            .terms
            .iter()
            .find(|(m, _)| m.degrees() == (4, 0))
            .unwrap();
        assert_eq!(quartic.1, &Complex64::new(1.0, 0.0));
        let mixed = v
            .terms
            .iter()
            .find(|(m, _)| m.degrees() == (2, 2))
            .unwrap();
        assert_eq!(mixed.1, &Complex64::new(2.0, 0.0));
    }

    #[test]
    fn v_is_gauge_invariant() {
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints { a: 1, b: 6 };
        let c = Couplings {
            g: Complex64::new(0.1, 0.01),
            nu: Complex64::new(-0.2, 0.0),
            z: Complex64::new(0.05, 0.0),
            y: Complex64::new(0.07, 0.0),
            lambda_a: Complex64::new(1.0, 0.0),
            lambda_b: Complex64::new(0.9, 0.0),
            q_a: Complex64::new(0.3, 0.0),
            q_b: Complex64::new(0.2, 0.0),
        };
        let v = build_v_torus(&lat, &c, obs, &alg).unwrap();
        assert!(v.is_gauge_invariant());
    }

    #[test]
    fn tau_delta_matches_expectation_shift() {
        // The observable-free expectation of V shifts only the τ
        // coefficient: e^{L} V = V + 2 g C(0) τ.
        use crate::algebra::expectation_theta;
        use crate::covariance::MapCovariance;
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints { a: 0, b: 5 };
        let mut cov = MapCovariance::<Complex64>::new(2, 2);
        cov.insert(&[0, 0], Complex64::new(0.8, 0.0));
        cov.insert(&[1, 0], Complex64::new(0.25, 0.0));
        let c = Couplings::bulk(
            Complex64::new(0.3, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(-0.2, 0.0),
            Complex64::new(0.15, 0.0),
        );
        let v = build_v_torus(&lat, &c, obs, &alg).unwrap();
        let ev = expectation_theta(&lat, &cov, &v);
        // expected: V + 2 g C(0) Σ_x τ_x
        let mut shift = SuperPolynomial::zero();
        for x in lat.sites() {
            shift = shift.add(&tau::<Complex64>(&lat, x, &alg));
        }
        let expected = v.add(&shift.scale(&(Complex64::new(2.0 * 0.3 * 0.8, 0.0))));
        assert!(
            ev.residual(&expected) < 1e-12,
            "residual {}",
            ev.residual(&expected)
        );
    }
}
