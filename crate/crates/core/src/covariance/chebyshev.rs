//! Chebyshev machinery for spectral windows of the lattice Laplacian.
//!
//! Window functions are fitted in the Chebyshev basis on the spectral
//! interval `[0, 4d]` of `-Δ`, and the resulting polynomial kernels are
//! realised by Clenshaw recursion applied to the delta function on a
//! point-group-reduced l1 ball. The degree bound makes the finite range
//! of every kernel exact by construction.

use super::stencil::{canonicalise, CanonOffset, KernelStencil};
use rayon::prelude::*;
use std::collections::HashMap;

const OUT_OF_BALL: u32 = u32::MAX;

/// Smooth cutoff: 1 for `u <= 1`, 0 for `u >= rho`, C-infinity between.
pub fn smooth_cutoff(u: f64, rho: f64) -> f64 {
    if u <= 1.0 {
        return 1.0;
    }
    if u >= rho {
        return 0.0;
    }
    let t = (u - 1.0) / (rho - 1.0); // in (0,1)
    let sig = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let a = sig(1.0 - t);
    let b = sig(t);
    a / (a + b)
}

/// Chebyshev coefficients of `f` on `[a, b]` with degree `deg`
/// (coefficients for `p(x) = Σ_{k<=deg} c_k T_k`). The projection uses
/// many more quadrature nodes than the degree, so marginally resolved
/// features truncate instead of aliasing.
pub fn cheb_fit<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, deg: usize) -> Vec<f64> {
    let m = (4 * (deg + 1)).max(256);
    let fx: Vec<f64> = (0..m)
        .map(|i| {
            let x = (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos();
            let lam = 0.5 * (b - a) * (x + 1.0) + a;
            f(lam)
        })
        .collect();
    (0..=deg)
        .map(|k| {
            let scale = if k == 0 { 1.0 } else { 2.0 } / m as f64;
            scale
                * (0..m)
                    .map(|i| {
                        fx[i]
                            * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / m as f64)
                                .cos()
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// Evaluate a Chebyshev series at `lam` on `[a, b]` (Clenshaw).
pub fn cheb_eval(c: &[f64], a: f64, b: f64, lam: f64) -> f64 {
    let x = (2.0 * lam - (a + b)) / (b - a);
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (1..c.len()).rev() {
        let t = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = t;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Product of two Chebyshev series: `T_m T_n = (T_{m+n} + T_{|m-n|})/2`.
pub fn cheb_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (m, &am) in a.iter().enumerate() {
        for (k, &bk) in b.iter().enumerate() {
            let v = 0.5 * am * bk;
            out[m + k] += v;
            out[m.abs_diff(k)] += v;
        }
    }
    out
}

pub fn cheb_square(c: &[f64]) -> Vec<f64> {
    cheb_mul(c, c)
}

/// Point-group-reduced l1 ball of Z^d: canonical sites with sorted
/// decreasing absolute coordinates and `|z|_1 <= radius`, plus the
/// neighbour table for the 2d-point Laplacian stencil.
pub struct CanonBall {
    pub d: usize,
    pub radius: i64,
    pub sites: Vec<CanonOffset>,
    rank: HashMap<CanonOffset, u32>,
    /// `2d` neighbour ranks per site (OUT_OF_BALL if outside).
    neighbours: Vec<u32>,
}

impl CanonBall {
    pub fn new(d: usize, radius: i64) -> Self {
        let mut sites = Vec::new();
        let mut cur = CanonOffset::from_elem(0, d);
        fn rec(
            d: usize,
            axis: usize,
            maxv: i32,
            left: i64,
            cur: &mut CanonOffset,
            out: &mut Vec<CanonOffset>,
        ) {
            if axis == d {
                out.push(cur.clone());
                return;
            }
            let cap = maxv.min(left as i32);
            for v in (0..=cap).rev() {
                cur[axis] = v;
                rec(d, axis + 1, v, left - v as i64, cur, out);
            }
        }
        rec(d, 0, radius as i32, radius, &mut cur, &mut sites);
        let rank: HashMap<CanonOffset, u32> = sites
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let neighbours: Vec<u32> = sites
            .par_iter()
            .flat_map_iter(|z| {
                let mut out = Vec::with_capacity(2 * d);
                for axis in 0..d {
                    for step in [1i32, -1] {
                        let mut w: CanonOffset = z.clone();
                        w[axis] += step;
                        w[axis] = w[axis].abs();
                        w.sort_unstable_by(|a, b| b.cmp(a));
                        let l1: i64 = w.iter().map(|&v| v as i64).sum();
                        out.push(if l1 > radius {
                            OUT_OF_BALL
                        } else {
                            rank[&w]
                        });
                    }
                }
                out
            })
            .collect();
        CanonBall {
            d,
            radius,
            sites,
            rank,
            neighbours,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn rank_of(&self, z: &[i64]) -> Option<u32> {
        self.rank.get(&canonicalise(z)).copied()
    }

    /// `out = (-Δ f)`, i.e. `2d f(z) - Σ_{±e} f(z ± e)`.
    pub fn apply_minus_laplacian(&self, f: &[f64], out: &mut [f64]) {
        let two_d = 2.0 * self.d as f64;
        let nd = 2 * self.d;
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let mut acc = two_d * f[i];
            let base = i * nd;
            for k in 0..nd {
                let nb = self.neighbours[base + k];
                if nb != OUT_OF_BALL {
                    acc -= f[nb as usize];
                }
            }
            *o = acc;
        });
    }

    /// Kernel of `p(-Δ) δ_0` for a Chebyshev series `p` on `[0, 4d]`.
    pub fn cheb_kernel(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let origin = self
            .rank_of(&vec![0i64; self.d])
            .expect("origin in ball") as usize;
        let half_spec = 2.0 * self.d as f64;
        // X = (-Δ - 2d)/(2d); Clenshaw backwards over coefficients
        let mut b1 = vec![0.0; n];
        let mut b2 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        let mut lap = vec![0.0; n];
        for k in (1..coeffs.len()).rev() {
            // tmp = c_k δ0 + 2 X b1 - b2
            self.apply_minus_laplacian(&b1, &mut lap);
            tmp.par_iter_mut().enumerate().for_each(|(i, t)| {
                let xb = (lap[i] - half_spec * b1[i]) / half_spec;
                *t = 2.0 * xb - b2[i];
            });
            tmp[origin] += coeffs[k];
            std::mem::swap(&mut b2, &mut b1);
            std::mem::swap(&mut b1, &mut tmp);
        }
        // result = c_0 δ0 + X b1 - b2
        self.apply_minus_laplacian(&b1, &mut lap);
        let mut out = vec![0.0; n];
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let xb = (lap[i] - half_spec * b1[i]) / half_spec;
            *o = xb - b2[i];
        });
        out[origin] += coeffs.first().copied().unwrap_or(0.0);
        out
    }

    pub fn to_stencil(&self, values: &[f64], l1_radius: i64) -> KernelStencil {
        let mut map = HashMap::new();
        for (i, z) in self.sites.iter().enumerate() {
            if values[i] != 0.0 {
                map.insert(z.clone(), values[i]);
            }
        }
        KernelStencil::from_canonical(self.d, l1_radius, map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(smooth_cutoff(0.5, 4.0), 1.0);
        assert_eq!(smooth_cutoff(1.0, 4.0), 1.0);
        assert_eq!(smooth_cutoff(4.0, 4.0), 0.0);
        let v = smooth_cutoff(2.0, 4.0);
        assert!(v > 0.0 && v < 1.0);
        assert!(smooth_cutoff(2.0, 4.0) > smooth_cutoff(3.0, 4.0));
    }

    #[test]
    fn fit_and_eval_polynomial_exactly() {
        let f = |x: f64| 3.0 + 2.0 * x - 0.5 * x * x + 0.125 * x * x * x;
        let c = cheb_fit(f, 0.0, 8.0, 3);
        for i in 0..50 {
            let x = 8.0 * i as f64 / 49.0;
            assert!((cheb_eval(&c, 0.0, 8.0, x) - f(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn square_of_series() {
        let f = |x: f64| 1.0 + x;
        let c = cheb_fit(f, -1.0, 1.0, 1);
        let c2 = cheb_square(&c);
        for i in 0..20 {
            let x = -1.0 + 2.0 * i as f64 / 19.0;
            assert!((cheb_eval(&c2, -1.0, 1.0, x) - f(x) * f(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_enumeration_and_origin() {
        let ball = CanonBall::new(3, 5);
        assert_eq!(ball.sites[0].as_slice(), &[5, 0, 0]);
        let zero = vec![0i64; 3];
        assert!(ball.rank_of(&zero).is_some());
        // count for d=3, r=2: sorted tuples summing to <= 2
        let b2 = CanonBall::new(3, 2);
        assert_eq!(b2.len(), 4); // [0,0,0],[1,0,0],[1,1,0],[2,0,0]
    }

    #[test]
    fn kernel_matches_dense_polynomial_of_laplacian() {
        // p(-Δ) δ0 on a ball compared against dense matrix powers on a
        // large torus (no wrap inside the ball).
        use crate::lattice::TorusLattice;
        let d = 2;
        let deg = 3;
        let ball = CanonBall::new(d, deg as i64);
        let coeffs = cheb_fit(|x| 0.3 + x * (0.1 + x * (0.02 - 0.004 * x)), 0.0, 8.0, deg);
        let vals = ball.cheb_kernel(&coeffs);
        let stencil = ball.to_stencil(&vals, deg as i64 + 1);

        let lat = TorusLattice::new(2, 2, 4).unwrap(); // side 16
        let n = lat.n_sites();
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for p in 0..n {
            a[(p, p)] += 4.0;
            for axis in 0..2 {
                a[(p, lat.shift(p, axis, 1))] -= 1.0;
                a[(p, lat.shift(p, axis, -1))] -= 1.0;
            }
        }
        // dense p(A) δ0 via Horner in the monomial basis converted from cheb:
        // easier: evaluate via repeated Clenshaw on vectors
        let mut b1 = nalgebra::DVector::<f64>::zeros(n);
        let mut b2 = nalgebra::DVector::<f64>::zeros(n);
        let mut delta = nalgebra::DVector::<f64>::zeros(n);
        delta[0] = 1.0;
        let x_of = |v: &nalgebra::DVector<f64>| (&a * v - 4.0 * v) / 4.0;
        for k in (1..coeffs.len()).rev() {
            let t = coeffs[k] * &delta + 2.0 * x_of(&b1) - &b2;
            b2 = b1;
            b1 = t;
        }
        let dense = coeffs[0] * &delta + x_of(&b1) - &b2;
        for p in 0..n {
            let z: Vec<i64> = lat.offset(0, p).into_iter().collect();
            assert!(
                (stencil.value(&z) - dense[p]).abs() < 1e-10,
                "mismatch at {:?}: {} vs {}",
                z,
                stencil.value(&z),
                dense[p]
            );
        }
    }
}
