use super::generator::{Generator, Species};
use super::monomial::{Component, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Sparse polynomial in the field generators with coefficients in `S`.
///
/// Stored in canonical form: every monomial key is canonical (sorted
/// generators, signs absorbed) and zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperPolynomial<S: Scalar> {
    pub terms: BTreeMap<Monomial, S>,
}

/// Multiplication context: the degree cap of the ambient algebra and
/// what to do when a product exceeds it.
#[derive(Debug, Clone, Copy)]
pub struct Algebra {
    pub degree_cap: usize,
    pub drop_over_cap: bool,
}

impl Default for Algebra {
    fn default() -> Self {
        Algebra {
            degree_cap: 10,
            drop_over_cap: false,
        }
    }
}

impl Algebra {
    pub fn with_cap(degree_cap: usize) -> Self {
        Algebra {
            degree_cap,
            drop_over_cap: false,
        }
    }
}

impl<S: Scalar> Default for SuperPolynomial<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> SuperPolynomial<S> {
    pub fn zero() -> Self {
        SuperPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        SuperPolynomial { terms }
    }

    pub fn monomial(m: Monomial, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SuperPolynomial { terms }
    }

    /// A single plain generator.
    pub fn generator(g: Generator) -> Self {
        let is_fermion = g.species.is_fermion();
        let (bosons, fermions) = if is_fermion {
            (vec![], vec![g])
        } else {
            (vec![g], vec![])
        };
        Self::monomial(
            Monomial {
                bosons,
                fermions,
                sigma: 0,
                sigma_bar: 0,
            },
            S::one(),
        )
    }

    pub fn sigma() -> Self {
        Self::monomial(
            Monomial {
                sigma: 1,
                ..Default::default()
            },
            S::one(),
        )
    }

    pub fn sigma_bar() -> Self {
        Self::monomial(
            Monomial {
                sigma_bar: 1,
                ..Default::default()
            },
            S::one(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn accumulate(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SuperPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, t: &S) -> Self {
        if t.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), c.clone() * t.clone());
        }
        out
    }

    pub fn div_int(&self, n: i64) -> Self {
        SuperPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.div_int(n)))
                .collect(),
        }
    }

    /// Graded product with Koszul signs; errors if a nonzero product
    /// monomial exceeds the algebra's degree cap (or drops it when the
    /// context says to).
    pub fn mul(&self, other: &Self, alg: &Algebra) -> Result<Self> {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb) {
                    if m.degree() > alg.degree_cap {
                        if alg.drop_over_cap {
                            continue;
                        }
                        return Err(Error::DegreeCap(m.degree(), alg.degree_cap));
                    }
                    let mut c = ca.clone() * cb.clone();
                    if sign < 0 {
                        c = -c;
                    }
                    out.accumulate(m, c);
                }
            }
        }
        Ok(out)
    }

    /// Projection onto an observable component.
    pub fn project(&self, comp: Component) -> Self {
        SuperPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.component() == comp)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `π_* = 1 - π_∅` (all observable sectors).
    pub fn project_star(&self) -> Self {
        SuperPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.component() != Component::Bulk)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_gauge_invariant(&self) -> bool {
        self.terms.keys().all(|m| m.is_gauge_invariant())
    }

    /// Largest coefficient modulus (residual reporting).
    pub fn sup_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Apply a point map to all generators (used for torus relabelling
    /// and namespace bookkeeping); vanishing images are dropped.
    pub fn map_points<F: Fn(usize) -> usize>(&self, f: F) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((m2, sign)) = m.map_points(&f) {
                let c2 = if sign < 0 { -c.clone() } else { c.clone() };
                out.accumulate(m2, c2);
            }
        }
        out
    }

    /// Keep only terms whose field support satisfies the predicate.
    pub fn filter_support<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        SuperPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical text form: sorted monomials, one per line.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            s.push_str(&format!("{:?} * {}\n", c, m));
        }
        s
    }

    /// Coefficient lookup.
    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Max coefficient modulus of the difference (identity residuals).
    pub fn residual(&self, other: &Self) -> f64 {
        self.sub(other).sup_coefficient()
    }
}

/// Convenience constructors for the common field monomials.
pub fn phi<S: Scalar>(d: usize, x: usize) -> SuperPolynomial<S> {
    SuperPolynomial::generator(Generator::plain(Species::Phi, x, d))
}

pub fn phi_bar<S: Scalar>(d: usize, x: usize) -> SuperPolynomial<S> {
    SuperPolynomial::generator(Generator::plain(Species::PhiBar, x, d))
}

pub fn psi<S: Scalar>(d: usize, x: usize) -> SuperPolynomial<S> {
    SuperPolynomial::generator(Generator::plain(Species::Psi, x, d))
}

pub fn psi_bar<S: Scalar>(d: usize, x: usize) -> SuperPolynomial<S> {
    SuperPolynomial::generator(Generator::plain(Species::PsiBar, x, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type P = SuperPolynomial<Complex64>;

    #[test]
    fn fermion_nilpotency() {
        let alg = Algebra::default();
        let a = psi::<Complex64>(1, 3);
        assert!(a.mul(&a, &alg).unwrap().is_zero());
    }

    #[test]
    fn anticommutation() {
        let alg = Algebra::default();
        let a = psi::<Complex64>(1, 0);
        let b = psi_bar::<Complex64>(1, 1);
        let ab = a.mul(&b, &alg).unwrap();
        let ba = b.mul(&a, &alg).unwrap();
        assert_eq!(ab, ba.neg());
    }

    #[test]
    fn sigma_squares_to_zero() {
        let alg = Algebra::default();
        let s = P::sigma();
        assert!(s.mul(&s, &alg).unwrap().is_zero());
        let sb = P::sigma_bar();
        assert!(sb.mul(&sb, &alg).unwrap().is_zero());
        assert!(!s.mul(&sb, &alg).unwrap().is_zero());
    }

    #[test]
    fn bosons_commute() {
        let alg = Algebra::default();
        let a = phi::<Complex64>(2, 0);
        let b = phi_bar::<Complex64>(2, 5);
        assert_eq!(a.mul(&b, &alg).unwrap(), b.mul(&a, &alg).unwrap());
    }

    #[test]
    fn degree_cap_enforced() {
        let alg = Algebra::with_cap(1);
        let a = phi::<Complex64>(1, 0);
        let b = phi_bar::<Complex64>(1, 0);
        assert!(a.mul(&b, &alg).is_err());
        let dropping = Algebra {
            degree_cap: 1,
            drop_over_cap: true,
        };
        assert!(a.mul(&b, &dropping).unwrap().is_zero());
    }

    #[test]
    fn projections_sum_to_identity() {
        let alg = Algebra::default();
        let f = P::sigma()
            .mul(&phi_bar(1, 2), &alg)
            .unwrap()
            .add(&phi(1, 0).mul(&phi_bar(1, 1), &alg).unwrap())
            .add(&P::sigma().mul(&P::sigma_bar(), &alg).unwrap());
        let sum = f
            .project(Component::Bulk)
            .add(&f.project(Component::ObsA))
            .add(&f.project(Component::ObsB))
            .add(&f.project(Component::ObsAB));
        assert_eq!(sum, f);
        // π_a keeps σ-terms, π_∅ drops them
        let sphi = P::sigma().mul(&phi_bar(1, 2), &alg).unwrap();
        assert_eq!(sphi.project(Component::ObsA), sphi);
        assert!(sphi.project(Component::Bulk).is_zero());
        assert_eq!(f.project_star(), f.sub(&f.project(Component::Bulk)));
    }

    #[test]
    fn gauge_check_examples() {
        let alg = Algebra::default();
        // τ_x is gauge invariant
        let tau = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 0), &alg)
            .unwrap()
            .add(&psi(1, 0).mul(&psi_bar(1, 0), &alg).unwrap());
        assert!(tau.is_gauge_invariant());
        assert!(!phi::<Complex64>(1, 0).is_gauge_invariant());
        let sphib = P::sigma().mul(&phi_bar(1, 2), &alg).unwrap();
        assert!(sphib.is_gauge_invariant());
    }

    #[test]
    fn product_associativity_with_signs() {
        let alg = Algebra::default();
        let a = psi::<Complex64>(1, 0).add(&phi(1, 1));
        let b = psi_bar::<Complex64>(1, 2).add(&phi_bar(1, 0));
        let c = psi::<Complex64>(1, 3).scale(&Complex64::new(0.0, 2.0));
        let left = a.mul(&b, &alg).unwrap().mul(&c, &alg).unwrap();
        let right = a.mul(&b.mul(&c, &alg).unwrap(), &alg).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn rational_mode_is_exact() {
        use num_rational::BigRational;
        let alg = Algebra::default();
        let a: SuperPolynomial<BigRational> =
            phi::<BigRational>(1, 0).scale(&crate::scalar::Scalar::from_ratio(1, 3));
        let b = phi_bar::<BigRational>(1, 1).scale(&crate::scalar::Scalar::from_ratio(3, 1));
        let p = a.mul(&b, &alg).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(
            p.terms.values().next().unwrap(),
            &crate::scalar::Scalar::from_int(1)
        );
    }
}
