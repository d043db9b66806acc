//! Weighted test-function norms of lattice fields: the global sup
//! norm, the norm localised to a region by minimising over exterior
//! extensions, and the variant with linear polynomials factored out.

use super::linprog;
use crate::covariance::multi_indices_up_to;
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, TorusLattice};
use num_complex::Complex64;
use std::collections::BTreeSet;

/// How a norm value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    ExactLp,
    InteriorLower,
    ZeroExtensionUpper,
}

#[derive(Debug, Clone)]
pub struct NormReport {
    pub value: f64,
    pub mode: NormMode,
    /// The optimising extension (exact mode) on the sites off the
    /// region, if one was computed.
    pub witness: Option<Vec<f64>>,
}

/// Derivative stencil taps of `∇^α` as offsets with signs.
pub fn deriv_taps(d: usize, alpha: &MultiIndex) -> Vec<(Vec<i64>, f64)> {
    let mut taps: Vec<(Vec<i64>, f64)> = vec![(vec![0; d], 1.0)];
    for (axis, fwd, count) in alpha.directions() {
        for _ in 0..count {
            let step = if fwd { 1 } else { -1 };
            let mut next = Vec::with_capacity(taps.len() * 2);
            for (off, w) in &taps {
                let mut o2 = off.clone();
                o2[axis] += step;
                next.push((o2, *w));
                next.push((off.clone(), -*w));
            }
            taps = next;
        }
    }
    taps
}

/// `(∇^α Δ^k f)(x)` for a complex lattice field.
pub fn field_deriv(
    lat: &TorusLattice,
    f: &[Complex64],
    x: usize,
    alpha: &MultiIndex,
    lap: u8,
) -> Complex64 {
    let d = lat.dim();
    let mut taps = deriv_taps(d, alpha);
    for _ in 0..lap {
        let mut next = Vec::with_capacity(taps.len() * (2 * d + 1));
        for (off, w) in &taps {
            next.push((off.clone(), -2.0 * d as f64 * *w));
            for axis in 0..d {
                for step in [1i64, -1] {
                    let mut o2 = off.clone();
                    o2[axis] += step;
                    next.push((o2, *w));
                }
            }
        }
        taps = next;
    }
    let base = lat.coords(x);
    taps.iter()
        .map(|(off, w)| {
            let coords: Vec<i64> = (0..d).map(|i| base[i] as i64 + off[i]).collect();
            f[lat.site_wrapped(&coords)] * *w
        })
        .sum()
}

/// The weighted global sup norm of a field:
/// `𝔥^{-1} sup_x sup_{|α| <= p} L^{j|α|} |∇^α φ_x|`.
pub fn phi_norm_global(
    lat: &TorusLattice,
    f: &[Complex64],
    j: usize,
    hh: f64,
    p_phi: usize,
) -> f64 {
    let el = lat.base() as f64;
    let mut best = 0.0f64;
    for alpha in multi_indices_up_to(lat.dim(), p_phi) {
        let w = el.powf(j as f64 * alpha.order() as f64) / hh;
        for x in lat.sites() {
            best = best.max(field_deriv(lat, f, x, &alpha, 0).norm() * w);
        }
    }
    best
}

fn alpha_weight(base: usize, j: usize, hh: f64, order: usize) -> f64 {
    hh * (base as f64).powf(-(j as f64) * order as f64)
}

/// Interior lower bound for the localised norm: stencils entirely
/// inside the region do not depend on the extension.
pub fn phi_norm_localized_interior(
    lat: &TorusLattice,
    f: &[Complex64],
    region: &BTreeSet<usize>,
    j: usize,
    hh: f64,
    p_phi: usize,
) -> f64 {
    let d = lat.dim();
    let mut best = 0.0f64;
    for alpha in multi_indices_up_to(d, p_phi) {
        let taps = deriv_taps(d, &alpha);
        let w = alpha_weight(lat.base(), j, hh, alpha.order());
        for &x in region {
            let base = lat.coords(x);
            let inside = taps.iter().all(|(off, _)| {
                let coords: Vec<i64> = (0..d).map(|i| base[i] as i64 + off[i]).collect();
                region.contains(&lat.site_wrapped(&coords))
            });
            if inside {
                best = best.max(field_deriv(lat, f, x, &alpha, 0).norm() / w);
            }
        }
    }
    best
}

/// Upper bound via the zero extension off the region.
pub fn phi_norm_localized_zero_ext(
    lat: &TorusLattice,
    f: &[Complex64],
    region: &BTreeSet<usize>,
    j: usize,
    hh: f64,
    p_phi: usize,
) -> f64 {
    let g: Vec<Complex64> = lat
        .sites()
        .map(|x| {
            if region.contains(&x) {
                f[x]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    phi_norm_global(lat, &g, j, hh, p_phi)
}

const LP_SITE_CAP: usize = 150;

/// Exact localised norm by linear programming: minimise the global
/// weighted sup over all real extensions agreeing with the field on
/// the region. Real fields only.
pub fn phi_norm_localized_exact(
    lat: &TorusLattice,
    f: &[Complex64],
    region: &BTreeSet<usize>,
    j: usize,
    hh: f64,
    p_phi: usize,
) -> Result<NormReport> {
    if f.iter().any(|v| v.im != 0.0) {
        return Err(Error::Norm("exact mode needs a real field".into()));
    }
    if lat.n_sites() > LP_SITE_CAP {
        return Err(Error::Norm(format!(
            "exact localised norm capped at {LP_SITE_CAP} sites, got {}",
            lat.n_sites()
        )));
    }
    // variables: field values off the region
    let free: Vec<usize> = lat.sites().filter(|x| !region.contains(x)).collect();
    let index_of = |x: usize| free.iter().position(|&y| y == x);
    let d = lat.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut consts: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for alpha in multi_indices_up_to(d, p_phi) {
        let taps = deriv_taps(d, &alpha);
        let w = alpha_weight(lat.base(), j, hh, alpha.order());
        for x in lat.sites() {
            let base = lat.coords(x);
            let mut row = vec![0.0; free.len()];
            let mut c = 0.0;
            for (off, tw) in &taps {
                let coords: Vec<i64> = (0..d).map(|i| base[i] as i64 + off[i]).collect();
                let y = lat.site_wrapped(&coords);
                match index_of(y) {
                    Some(k) => row[k] += tw,
                    None => c += tw * f[y].re,
                }
            }
            rows.push(row);
            consts.push(c);
            weights.push(w);
        }
    }
    let (value, witness) = linprog::minimize_weighted_sup(&rows, &consts, &weights)?;
    Ok(NormReport {
        value,
        mode: NormMode::ExactLp,
        witness: Some(witness),
    })
}

/// Exact norm with linear polynomials factored out on the region:
/// extensions are free off the region, and an affine function (in
/// patch coordinates about the region's first site) is subtracted on
/// it. Real fields only.
pub fn phi_norm_tilde_exact(
    lat: &TorusLattice,
    f: &[Complex64],
    region: &BTreeSet<usize>,
    j: usize,
    hh: f64,
    p_phi: usize,
) -> Result<NormReport> {
    if f.iter().any(|v| v.im != 0.0) {
        return Err(Error::Norm("exact mode needs a real field".into()));
    }
    if lat.n_sites() > LP_SITE_CAP {
        return Err(Error::Norm(format!(
            "exact tilde norm capped at {LP_SITE_CAP} sites, got {}",
            lat.n_sites()
        )));
    }
    let anchor = *region
        .iter()
        .next()
        .ok_or_else(|| Error::Norm("empty region".into()))?;
    let d = lat.dim();
    let free: Vec<usize> = lat.sites().filter(|x| !region.contains(x)).collect();
    let index_of = |x: usize| free.iter().position(|&y| y == x);
    let nvar = free.len() + d + 1; // extension values + affine coefficients
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut consts: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for alpha in multi_indices_up_to(d, p_phi) {
        let taps = deriv_taps(d, &alpha);
        let w = alpha_weight(lat.base(), j, hh, alpha.order());
        for x in lat.sites() {
            let base = lat.coords(x);
            let mut row = vec![0.0; nvar];
            let mut c = 0.0;
            for (off, tw) in &taps {
                let coords: Vec<i64> = (0..d).map(|i| base[i] as i64 + off[i]).collect();
                let y = lat.site_wrapped(&coords);
                match index_of(y) {
                    Some(k) => row[k] += tw,
                    None => {
                        // h = φ - (a0 + a·z) on the region
                        c += tw * f[y].re;
                        let z = lat.offset(anchor, y);
                        row[free.len()] -= tw;
                        for i in 0..d {
                            row[free.len() + 1 + i] -= tw * z[i] as f64;
                        }
                    }
                }
            }
            rows.push(row);
            consts.push(c);
            weights.push(w);
        }
    }
    let (value, witness) = linprog::minimize_weighted_sup(&rows, &consts, &weights)?;
    Ok(NormReport {
        value,
        mode: NormMode::ExactLp,
        witness: Some(witness),
    })
}

/// Interior-mode tilde norm: subtract the best affine function
/// measured on stencils that stay inside the region (a small linear
/// program over the affine coefficients only; any region size).
pub fn phi_norm_tilde_interior(
    lat: &TorusLattice,
    f: &[Complex64],
    region: &BTreeSet<usize>,
    j: usize,
    hh: f64,
    p_phi: usize,
) -> Result<f64> {
    if f.iter().any(|v| v.im != 0.0) {
        return Err(Error::Norm("interior tilde mode needs a real field".into()));
    }
    let anchor = *region
        .iter()
        .next()
        .ok_or_else(|| Error::Norm("empty region".into()))?;
    let d = lat.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut consts: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for alpha in multi_indices_up_to(d, p_phi) {
        let taps = deriv_taps(d, &alpha);
        let w = alpha_weight(lat.base(), j, hh, alpha.order());
        for &x in region {
            let base = lat.coords(x);
            let mut inside = true;
            let mut row = vec![0.0; d + 1];
            let mut c = 0.0;
            for (off, tw) in &taps {
                let coords: Vec<i64> = (0..d).map(|i| base[i] as i64 + off[i]).collect();
                let y = lat.site_wrapped(&coords);
                if !region.contains(&y) {
                    inside = false;
                    break;
                }
                c += tw * f[y].re;
                let z = lat.offset(anchor, y);
                row[0] -= tw;
                for i in 0..d {
                    row[1 + i] -= tw * z[i] as f64;
                }
            }
            if inside {
                rows.push(row);
                consts.push(c);
                weights.push(w);
            }
        }
    }
    if rows.is_empty() {
        return Ok(0.0);
    }
    Ok(linprog::minimize_weighted_sup(&rows, &consts, &weights)?.0)
}
