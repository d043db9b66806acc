//! Independent Gaussian expectation by explicit Wick enumeration.
//!
//! Each field generator is split into its kept external part and a
//! fluctuation to be integrated; boson fluctuations pair in a
//! permanent-style sum, fermion fluctuations in a signed pairing sum
//! with extraction signs counted through the interleaved external
//! factors. This never touches the Laplacian machinery, so agreement
//! with the exponential route is a genuine cross-check.

use super::generator::{Generator, Species};
use super::monomial::Monomial;
use super::poly::SuperPolynomial;
use crate::covariance::CovarianceSource;
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::scalar::Scalar;

const MAX_DEGREE: usize = 8;
const MAX_SITES: usize = 8;

pub fn oracle_expectation<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    for m in a.terms.keys() {
        let (nb, nf) = m.degrees();
        if nb > MAX_DEGREE || nf > MAX_DEGREE {
            return Err(Error::Norm(format!(
                "oracle cap exceeded: boson degree {nb}, fermion degree {nf}"
            )));
        }
        if m.support().len() > MAX_SITES {
            return Err(Error::Norm(format!(
                "oracle cap exceeded: {} sites",
                m.support().len()
            )));
        }
    }
    let mut out = SuperPolynomial::zero();
    for (m, c) in &a.terms {
        wick_monomial(lat, cov, m, c, &mut out);
    }
    Ok(out)
}

fn pair_value<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    a: &Generator,
    b: &Generator,
) -> S {
    // value for an (unbarred, barred) fluctuation pair; boson +C,
    // fermion -C in this order
    debug_assert!(!a.species.is_barred() && b.species.is_barred());
    let v = cov.contraction(lat, a.point, &a.deriv, a.lap, b.point, &b.deriv, b.lap);
    if a.species.is_fermion() {
        -v
    } else {
        v
    }
}

fn wick_monomial<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    m: &Monomial,
    coeff: &S,
    out: &mut SuperPolynomial<S>,
) {
    let nb = m.bosons.len();
    let nf = m.fermions.len();
    for bmask in 0..(1u32 << nb) {
        // boson fluctuation pairing: permanent over (φ, φ̄) choices
        let mut ext_bosons = Vec::new();
        let mut fl_un: Vec<&Generator> = Vec::new();
        let mut fl_bar: Vec<&Generator> = Vec::new();
        for (i, g) in m.bosons.iter().enumerate() {
            if bmask & (1 << i) != 0 {
                if g.species.is_barred() {
                    fl_bar.push(g);
                } else {
                    fl_un.push(g);
                }
            } else {
                ext_bosons.push(g.clone());
            }
        }
        if fl_un.len() != fl_bar.len() {
            continue;
        }
        let boson_value = permanent_sum(lat, cov, &fl_un, &fl_bar);
        if boson_value.is_zero() {
            continue;
        }
        for fmask in 0..(1u32 << nf) {
            let mut seq: Vec<(&Generator, bool)> = Vec::with_capacity(nf);
            for (i, g) in m.fermions.iter().enumerate() {
                seq.push((g, fmask & (1 << i) != 0));
            }
            let fval = fermion_wick(lat, cov, &seq);
            if fval.is_zero() {
                continue;
            }
            let ext_fermions: Vec<Generator> = seq
                .iter()
                .filter(|&&(_, fl)| !fl)
                .map(|&(g, _)| g.clone())
                .collect();
            if let Some((mono, sign)) = Monomial::from_parts(
                ext_bosons.clone(),
                ext_fermions,
                m.sigma,
                m.sigma_bar,
            ) {
                let mut v = coeff.clone() * boson_value.clone() * fval;
                if sign < 0 {
                    v = -v;
                }
                out.accumulate(mono, v);
            }
        }
    }
}

/// Sum over bijections of unbarred-to-barred boson pairings.
fn permanent_sum<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    un: &[&Generator],
    bar: &[&Generator],
) -> S {
    let n = un.len();
    if n == 0 {
        return S::one();
    }
    let mut total = S::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut prod = S::one();
        for (i, &p) in perm.iter().enumerate() {
            prod = prod * pair_value(lat, cov, un[i], bar[p]);
            if prod.is_zero() {
                break;
            }
        }
        total = total + prod;
        // next permutation
        let mut i = n.wrapping_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    total
}

/// Signed pairing sum over fermion fluctuations, keeping externals in
/// place: pick the first fluctuation, pair it with every conjugate
/// fluctuation to its right with sign `(-1)^(entries strictly between)`
/// and recurse on the reduced interleaved sequence.
fn fermion_wick<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    seq: &[(&Generator, bool)],
) -> S {
    let Some(i) = seq.iter().position(|&(_, fl)| fl) else {
        return S::one();
    };
    let gi = seq[i].0;
    let mut total = S::zero();
    for j in i + 1..seq.len() {
        let (gj, fl) = seq[j];
        if !fl || gj.species != gi.species.conjugate() {
            continue;
        }
        let value = if gi.species.is_barred() {
            // E[η̄ η] = -E[η η̄]
            -pair_value(lat, cov, gj, gi)
        } else {
            pair_value(lat, cov, gi, gj)
        };
        if value.is_zero() {
            continue;
        }
        let between = j - i - 1;
        let signed = if between % 2 == 1 { -value } else { value };
        let reduced: Vec<(&Generator, bool)> = seq
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, &e)| e)
            .collect();
        total = total + signed * fermion_wick(lat, cov, &reduced);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laplacian::expectation_theta;
    use crate::algebra::poly::{phi, phi_bar, psi, psi_bar, Algebra, SuperPolynomial};
    use crate::covariance::MapCovariance;
    use num_complex::Complex64;

    fn cov1() -> MapCovariance<Complex64> {
        let mut cov = MapCovariance::new(1, 4);
        cov.insert(&[0], Complex64::new(1.7, 0.0));
        cov.insert(&[1], Complex64::new(0.6, 0.0));
        cov.insert(&[2], Complex64::new(0.2, 0.0));
        cov
    }

    #[test]
    fn isserlis_bosons() {
        let lat = TorusLattice::new(1, 2, 3).unwrap();
        let cov = cov1();
        let alg = Algebra::default();
        let (x, y, u, v) = (0usize, 1, 3, 5);
        let a = phi::<Complex64>(1, x)
            .mul(&phi_bar(1, y), &alg)
            .unwrap()
            .mul(&phi(1, u), &alg)
            .unwrap()
            .mul(&phi_bar(1, v), &alg)
            .unwrap();
        let e = oracle_expectation(&lat, &cov, &a).unwrap();
        let c = |p: usize, q: usize| {
            let z: Vec<i64> = lat.offset(q, p).into_iter().collect();
            cov.value_offset(&z)
        };
        let expect = c(x, y) * c(u, v) + c(x, v) * c(u, y);
        assert!((e.coefficient(&Monomial::one()) - expect).norm() < 1e-13);
    }

    #[test]
    fn isserlis_fermions_signed() {
        let lat = TorusLattice::new(1, 2, 3).unwrap();
        let cov = cov1();
        let alg = Algebra::default();
        let (x, y, u, v) = (0usize, 1, 3, 5);
        let a = psi::<Complex64>(1, x)
            .mul(&psi_bar(1, y), &alg)
            .unwrap()
            .mul(&psi(1, u), &alg)
            .unwrap()
            .mul(&psi_bar(1, v), &alg)
            .unwrap();
        let e = oracle_expectation(&lat, &cov, &a).unwrap();
        let c = |p: usize, q: usize| {
            let z: Vec<i64> = lat.offset(q, p).into_iter().collect();
            cov.value_offset(&z)
        };
        let expect = c(x, y) * c(u, v) - c(x, v) * c(u, y);
        assert!((e.coefficient(&Monomial::one()) - expect).norm() < 1e-13);
    }

    #[test]
    fn matches_exponential_route_on_randoms() {
        use rand::{Rng, SeedableRng};
        let lat = TorusLattice::new(1, 2, 3).unwrap();
        let cov = cov1();
        let alg = Algebra::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let mut a = SuperPolynomial::<Complex64>::zero();
            for _ in 0..3 {
                let mut m = SuperPolynomial::constant(Complex64::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ));
                let deg = rng.gen_range(0..=6);
                for _ in 0..deg {
                    let x = rng.gen_range(0..6);
                    let f: SuperPolynomial<Complex64> = match rng.gen_range(0..4) {
                        0 => phi(1, x),
                        1 => phi_bar(1, x),
                        2 => psi(1, x),
                        _ => psi_bar(1, x),
                    };
                    m = match m.mul(&f, &alg) {
                        Ok(p) => p,
                        Err(_) => break,
                    };
                }
                a = a.add(&m);
            }
            let via_exp = expectation_theta(&lat, &cov, &a);
            let via_wick = oracle_expectation(&lat, &cov, &a).unwrap();
            assert!(
                via_exp.residual(&via_wick) < 1e-10,
                "oracle mismatch: {}",
                via_exp.residual(&via_wick)
            );
        }
    }

    #[test]
    fn caps_enforced() {
        let lat = TorusLattice::new(1, 2, 4).unwrap();
        let cov = cov1();
        let alg = Algebra::with_cap(12);
        let mut a = SuperPolynomial::<Complex64>::one();
        for x in 0..5 {
            a = a
                .mul(&phi(1, x), &alg)
                .unwrap()
                .mul(&phi_bar(1, x), &alg)
                .unwrap();
        }
        assert!(oracle_expectation(&lat, &cov, &a).is_err());
    }
}
