//! Exact torus kernels from spectral functions of the Laplacian.

use super::stencil::{CanonOffset, KernelStencil};
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Enumerate canonical offsets of the torus fundamental domain:
/// `side/2 >= z_1 >= z_2 >= ... >= z_d >= 0`.
pub fn torus_canonical_offsets(d: usize, side: usize) -> Vec<CanonOffset> {
    let half = (side / 2) as i32;
    let mut out = Vec::new();
    let mut cur: CanonOffset = CanonOffset::from_elem(0, d);
    fn rec(d: usize, axis: usize, maxv: i32, cur: &mut CanonOffset, out: &mut Vec<CanonOffset>) {
        if axis == d {
            out.push(cur.clone());
            return;
        }
        for v in (0..=maxv).rev() {
            cur[axis] = v;
            rec(d, axis + 1, v, cur, out);
        }
    }
    rec(d, 0, half, &mut cur, &mut out);
    out
}

/// Build the translation-invariant kernel of `F(-Δ)` on the torus by
/// summing over the Fourier modes. Intended for desk-scale tori.
pub fn spectral_kernel<F>(lat: &TorusLattice, f: F) -> KernelStencil
where
    F: Fn(f64) -> f64 + Sync,
{
    let d = lat.dim();
    let side = lat.side();
    let n = lat.n_sites();
    // per-axis eigenvalue pieces and cosine table
    let lam1: Vec<f64> = (0..side)
        .map(|k| 2.0 - 2.0 * (2.0 * PI * k as f64 / side as f64).cos())
        .collect();
    let cos_tab: Vec<Vec<f64>> = (0..side)
        .map(|k| {
            (0..=side / 2)
                .map(|z| (2.0 * PI * k as f64 * z as f64 / side as f64).cos())
                .collect()
        })
        .collect();
    let offsets = torus_canonical_offsets(d, side);
    let values: Vec<f64> = offsets
        .par_iter()
        .map(|z| {
            let mut acc = 0.0;
            // iterate modes in row-major order
            let mut k = vec![0usize; d];
            loop {
                let lam: f64 = k.iter().map(|&ki| lam1[ki]).sum();
                let w = f(lam);
                if w != 0.0 {
                    let mut c = w;
                    for (axis, &ki) in k.iter().enumerate() {
                        c *= cos_tab[ki][z[axis] as usize];
                    }
                    acc += c;
                }
                let mut axis = 0;
                loop {
                    if axis == d {
                        return acc / n as f64;
                    }
                    k[axis] += 1;
                    if k[axis] < side {
                        break;
                    }
                    k[axis] = 0;
                    axis += 1;
                }
            }
        })
        .collect();
    let mut map = HashMap::new();
    for (z, v) in offsets.into_iter().zip(values) {
        if v != 0.0 {
            map.insert(z, v);
        }
    }
    // spectral kernels have full torus range
    let radius = (d * (side / 2 + 1)) as i64 + 1;
    KernelStencil::from_canonical(d, radius, map)
}

/// The exact massive Green function `(-Δ_Λ + m²)^{-1}` as a kernel.
pub fn exact_green(lat: &TorusLattice, mass2: f64) -> Result<KernelStencil> {
    if mass2 <= 0.0 {
        return Err(Error::NonPositiveMass(mass2));
    }
    Ok(spectral_kernel(lat, |lam| 1.0 / (lam + mass2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_matches_dense_inversion() {
        // d=1, side 4, m²=1: C_{0,0} matches dense inversion of (-Δ+1)
        let lat = TorusLattice::new(1, 2, 2).unwrap();
        let g = exact_green(&lat, 1.0).unwrap();
        let n = lat.n_sites();
        // dense (-Δ + 1) matrix
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for p in 0..n {
            a[(p, p)] = 1.0 + 2.0;
            let up = lat.shift(p, 0, 1);
            let dn = lat.shift(p, 0, -1);
            a[(p, up)] += -1.0;
            a[(p, dn)] += -1.0;
        }
        let inv = a.try_inverse().unwrap();
        for p in 0..n {
            let z: Vec<i64> = lat.offset(0, p).into_iter().collect();
            assert!(
                (g.value(&z) - inv[(p, 0)]).abs() < 1e-12,
                "site {p}: {} vs {}",
                g.value(&z),
                inv[(p, 0)]
            );
        }
    }

    #[test]
    fn green_matches_dense_inversion_2d() {
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let m2 = 0.3;
        let g = exact_green(&lat, m2).unwrap();
        let n = lat.n_sites();
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for p in 0..n {
            a[(p, p)] = m2 + 4.0;
            for axis in 0..2 {
                a[(p, lat.shift(p, axis, 1))] += -1.0;
                a[(p, lat.shift(p, axis, -1))] += -1.0;
            }
        }
        let inv = a.try_inverse().unwrap();
        for p in 0..n {
            let z: Vec<i64> = lat.offset(0, p).into_iter().collect();
            assert!((g.value(&z) - inv[(p, 0)]).abs() < 1e-11);
        }
    }

    #[test]
    fn large_mass_diagonal_dominance() {
        let lat = TorusLattice::new(2, 2, 2).unwrap();
        let m2 = 1e6;
        let g = exact_green(&lat, m2).unwrap();
        let c00 = g.value_at_zero();
        assert!((c00 - 1.0 / m2).abs() < 10.0 / (m2 * m2));
    }

    #[test]
    fn symmetry_under_negation() {
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let g = exact_green(&lat, 0.1).unwrap();
        assert_eq!(g.value(&[2, -1]), g.value(&[-2, 1]));
        assert_eq!(g.value(&[2, -1]), g.value(&[1, 2]));
    }
}
