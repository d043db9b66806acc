//! Coupling extraction: writing an anchor-local polynomial in the
//! interaction basis and reporting the non-representable residual.

use super::couplings::{Couplings, ObservablePoints};
use super::loc::{loc_data, LocRules};
use crate::algebra::{Algebra, Monomial, SuperPolynomial};
use crate::error::Result;
use crate::lattice::TorusLattice;
use crate::scalar::Scalar;
use std::collections::BTreeSet;

/// Solve `Σ c_i columns_i ≈ target` coefficientwise by Gaussian
/// elimination on a square pivot subsystem, returning the coefficients
/// and the full residual polynomial.
pub fn solve_in_span<S: Scalar>(
    columns: &[SuperPolynomial<S>],
    target: &SuperPolynomial<S>,
) -> (Vec<S>, SuperPolynomial<S>) {
    let k = columns.len();
    if k == 0 {
        return (vec![], target.clone());
    }
    // row index: union of monomials
    let mut rows: BTreeSet<Monomial> = BTreeSet::new();
    for c in columns {
        rows.extend(c.terms.keys().cloned());
    }
    rows.extend(target.terms.keys().cloned());
    let rows: Vec<Monomial> = rows.into_iter().collect();
    let mut a: Vec<Vec<S>> = rows
        .iter()
        .map(|m| columns.iter().map(|c| c.coefficient(m)).collect())
        .collect();
    let mut b: Vec<S> = rows.iter().map(|m| target.coefficient(m)).collect();
    // forward elimination with partial pivoting over all rows
    let mut pivot_rows: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; rows.len()];
    for col in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in a.iter().enumerate() {
            if used[r] {
                continue;
            }
            let v = row[col].abs_f64();
            if best.map(|(_, bv)| v > bv).unwrap_or(v > 0.0) {
                best = Some((r, v));
            }
        }
        let Some((prow, _)) = best else {
            pivot_rows.push(usize::MAX);
            continue;
        };
        used[prow] = true;
        pivot_rows.push(prow);
        let inv = a[prow][col].clone();
        for r in 0..rows.len() {
            if r == prow || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div(&inv);
            for c2 in 0..k {
                let delta = factor.clone() * a[prow][c2].clone();
                a[r][c2] = a[r][c2].clone() - delta;
            }
            let delta = factor * b[prow].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    // back-substitute on the pivot rows (they are diagonalised)
    let mut coeffs = vec![S::zero(); k];
    for col in 0..k {
        let prow = pivot_rows[col];
        if prow == usize::MAX {
            continue;
        }
        coeffs[col] = b[prow].div(&a[prow][col]);
    }
    // residual from the original system
    let mut combo = SuperPolynomial::zero();
    for (c, col) in coeffs.iter().zip(columns) {
        combo = combo.add(&col.scale(c));
    }
    (coeffs, target.sub(&combo))
}

/// Extract the coupling tuple housed at `anchor` from an anchor-local
/// polynomial (the `Loc` image of a flow step). Bulk coordinates are
/// always extracted; the observable coordinates live at `a` and `b`.
/// Returns the couplings and the residual left after projecting onto
/// the basis, compared through canonical low-order Taylor data.
pub fn extract_couplings<S: Scalar>(
    lat: &TorusLattice,
    p: &SuperPolynomial<S>,
    anchor: usize,
    obs: ObservablePoints,
    rules: &LocRules,
    alg: &Algebra,
) -> Result<(Couplings<S>, SuperPolynomial<S>)> {
    use super::couplings::{tau, tau_delta, tau_grad_grad};
    let t = tau::<S>(lat, anchor, alg);
    let mut labels: Vec<&'static str> = vec!["g", "nu", "z", "y"];
    let mut basis: Vec<SuperPolynomial<S>> = vec![
        t.mul(&t, alg)?,
        t.clone(),
        tau_delta::<S>(lat, anchor, alg),
        tau_grad_grad::<S>(lat, anchor, alg),
    ];
    if anchor == obs.a {
        let mut c = Couplings::<S>::default();
        c.lambda_a = S::one();
        basis.push(super::couplings::v_at_site(
            lat,
            &c,
            anchor,
            obs,
            alg,
        )?);
        labels.push("lambda_a");
        let mut cq = Couplings::<S>::default();
        cq.q_a = S::one();
        basis.push(super::couplings::v_at_site(lat, &cq, anchor, obs, alg)?);
        labels.push("q_a");
    }
    if anchor == obs.b {
        let mut c = Couplings::<S>::default();
        c.lambda_b = S::one();
        basis.push(super::couplings::v_at_site(lat, &c, anchor, obs, alg)?);
        labels.push("lambda_b");
        let mut cq = Couplings::<S>::default();
        cq.q_b = S::one();
        basis.push(super::couplings::v_at_site(lat, &cq, anchor, obs, alg)?);
        labels.push("q_b");
    }
    let data_cols: Vec<SuperPolynomial<S>> = basis
        .iter()
        .map(|bp| loc_data(lat, anchor, rules, bp))
        .collect::<Result<_>>()?;
    let data_target = loc_data(lat, anchor, rules, p)?;
    let (coeffs, residual) = solve_in_span(&data_cols, &data_target);
    let mut out = Couplings::default();
    for (label, c) in labels.iter().zip(coeffs) {
        match *label {
            "g" => out.g = c,
            "nu" => out.nu = c,
            "z" => out.z = c,
            "y" => out.y = c,
            "lambda_a" => out.lambda_a = c,
            "q_a" => out.q_a = c,
            "lambda_b" => out.lambda_b = c,
            "q_b" => out.q_b = c,
            _ => unreachable!(),
        }
    }
    Ok((out, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localpoly::couplings::v_at_site;
    use num_complex::Complex64;

    #[test]
    fn roundtrip_bulk_and_observables() {
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints {
            a: lat.site(&[1, 1]),
            b: lat.site(&[5, 3]),
        };
        let rules = LocRules::standard(2, 1, 10);
        let c = Couplings {
            g: Complex64::new(0.25, 0.05),
            nu: Complex64::new(-0.4, 0.0),
            z: Complex64::new(0.3, -0.1),
            y: Complex64::new(0.2, 0.0),
            lambda_a: Complex64::new(0.8, 0.1),
            lambda_b: Complex64::new(0.7, 0.0),
            q_a: Complex64::new(0.15, 0.0),
            q_b: Complex64::new(-0.12, 0.0),
        };
        // bulk anchor away from observables
        let x = lat.site(&[3, 6]);
        let vx = v_at_site(&lat, &c, x, obs, &alg).unwrap();
        let (got, res) = extract_couplings(&lat, &vx, x, obs, &rules, &alg).unwrap();
        assert!(res.sup_coefficient() < 1e-12);
        assert!((got.g - c.g).norm() < 1e-12);
        assert!((got.nu - c.nu).norm() < 1e-12);
        assert!((got.z - c.z).norm() < 1e-12);
        assert!((got.y - c.y).norm() < 1e-12);
        assert!(got.lambda_a.norm() < 1e-12);
        // at the observable anchor
        let va = v_at_site(&lat, &c, obs.a, obs, &alg).unwrap();
        let (got_a, res_a) = extract_couplings(&lat, &va, obs.a, obs, &rules, &alg).unwrap();
        assert!(res_a.sup_coefficient() < 1e-12);
        assert!((got_a.lambda_a - c.lambda_a).norm() < 1e-12);
        assert!((got_a.q_a - c.q_a).norm() < 1e-12);
        let vb = v_at_site(&lat, &c, obs.b, obs, &alg).unwrap();
        let (got_b, res_b) = extract_couplings(&lat, &vb, obs.b, obs, &rules, &alg).unwrap();
        assert!(res_b.sup_coefficient() < 1e-12);
        assert!((got_b.lambda_b - c.lambda_b).norm() < 1e-12);
        assert!((got_b.q_b - c.q_b).norm() < 1e-12);
    }

    #[test]
    fn extract_of_zero_is_zero() {
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let alg = Algebra::default();
        let obs = ObservablePoints { a: 0, b: 5 };
        let rules = LocRules::standard(2, 1, 10);
        let (c, res) =
            extract_couplings(&lat, &SuperPolynomial::<Complex64>::zero(), 3, obs, &rules, &alg)
                .unwrap();
        assert_eq!(c.sup_abs(), 0.0);
        assert!(res.is_zero());
    }
}
