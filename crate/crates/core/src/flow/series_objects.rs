//! Interactions and perturbative remainders as exact truncated series
//! in the coupling strength.
//!
//! The doubled algebra (original fields plus a fluctuation copy) is
//! realised by shifting the fluctuation points into a second namespace;
//! integrating out the fluctuations is the Laplacian exponential over
//! that namespace followed by dropping everything still containing a
//! fluctuation generator.

use super::wp::{expectation_shift, p_of_couplings, w_of_couplings, w_point_direct, FlowEnv};
use crate::algebra::{
    exp_laplacian, truncated_expectation_pi, truncated_expectation_theta, ContractionKernel,
    CouplingSeries, Generator, SuperPolynomial,
};
use crate::covariance::CovarianceSource;
use crate::error::Result;
use crate::lattice::TorusLattice;
use crate::localpoly::Couplings;
use crate::scalar::Scalar;

/// Replace each field generator by the sum of itself and its copy in
/// the fluctuation namespace (points shifted by the site count).
pub fn theta_double<S: Scalar>(
    lat: &TorusLattice,
    f: &SuperPolynomial<S>,
) -> SuperPolynomial<S> {
    let n = lat.n_sites();
    let mut out = SuperPolynomial::zero();
    for (m, c) in &f.terms {
        let gens: Vec<&Generator> = m.bosons.iter().chain(m.fermions.iter()).collect();
        let n_bosons = m.bosons.len();
        let k = gens.len();
        for mask in 0..(1u32 << k) {
            let mut bosons = Vec::with_capacity(n_bosons);
            let mut fermions = Vec::with_capacity(k - n_bosons);
            for (i, g) in gens.iter().enumerate() {
                let pt = if mask & (1 << i) != 0 {
                    g.point + n
                } else {
                    g.point
                };
                let gen = Generator::with_lap(g.species, pt, g.deriv.clone(), g.lap);
                if i < n_bosons {
                    bosons.push(gen);
                } else {
                    fermions.push(gen);
                }
            }
            if let Some((mono, sign)) =
                crate::algebra::Monomial::from_parts(bosons, fermions, m.sigma, m.sigma_bar)
            {
                let cc = if sign < 0 { -c.clone() } else { c.clone() };
                out.accumulate(mono, cc);
            }
        }
    }
    out
}

/// Contraction kernel pairing only fluctuation-namespace generators.
pub struct FluctuationContraction<'a, S: Scalar> {
    pub lat: &'a TorusLattice,
    pub cov: &'a dyn CovarianceSource<S>,
}

impl<'a, S: Scalar> ContractionKernel<S> for FluctuationContraction<'a, S> {
    fn pair(&self, unbarred: &Generator, barred: &Generator) -> S {
        let n = self.lat.n_sites();
        if unbarred.point < n || barred.point < n {
            return S::zero();
        }
        self.cov.contraction(
            self.lat,
            unbarred.point - n,
            &unbarred.deriv,
            unbarred.lap,
            barred.point - n,
            &barred.deriv,
            barred.lap,
        )
    }
}

/// Integrate out the fluctuation namespace: apply the fluctuation
/// Laplacian exponential, then drop terms still carrying fluctuation
/// generators (their Gaussian expectation vanishes).
pub fn integrate_fluctuations<S: Scalar>(
    lat: &TorusLattice,
    cov: &dyn CovarianceSource<S>,
    f: &SuperPolynomial<S>,
) -> SuperPolynomial<S> {
    let kernel = FluctuationContraction { lat, cov };
    let lifted = exp_laplacian(&kernel, f, true);
    let n = lat.n_sites();
    lifted.filter_support(|m| {
        m.bosons
            .iter()
            .chain(m.fermions.iter())
            .all(|g| g.point < n)
    })
}

/// Per-order polynomial data of an interaction step in series mode,
/// bound to one coupling tuple, with the expensive per-site localised
/// bilinears cached.
pub struct SeriesEnv<'a, S: Scalar> {
    pub env: &'a FlowEnv<'a, S>,
    /// Flow step from scale `j` to `j + 1`.
    pub j: usize,
    pub order: usize,
    pub c: Couplings<S>,
    p_cache: std::cell::RefCell<std::collections::HashMap<usize, SuperPolynomial<S>>>,
    ipt_cache: std::cell::RefCell<std::collections::HashMap<Vec<usize>, CouplingSeries<S>>>,
}

impl<'a, S: Scalar> SeriesEnv<'a, S> {
    pub fn new(env: &'a FlowEnv<'a, S>, j: usize, order: usize, c: Couplings<S>) -> Self {
        SeriesEnv {
            env,
            j,
            order,
            c,
            p_cache: Default::default(),
            ipt_cache: Default::default(),
        }
    }

    /// `P_j(V, x)`, cached per site.
    pub fn p_at(&self, x: usize) -> Result<SuperPolynomial<S>> {
        if let Some(p) = self.p_cache.borrow().get(&x) {
            return Ok(p.clone());
        }
        let p = p_of_couplings(self.env, self.j, &self.c, x)?;
        self.p_cache.borrow_mut().insert(x, p.clone());
        Ok(p)
    }

    /// `e^{-V(X)}` as a series (exact truncated exponential).
    pub fn interaction_exp(&self, sites: &[usize]) -> Result<CouplingSeries<S>> {
        let c = &self.c;
        let mut v = SuperPolynomial::zero();
        for &x in sites {
            v = v.add(&self.env.v_site(c, x)?);
        }
        CouplingSeries::linear(self.order, v)?
            .neg()
            .exp(&self.env.alg)
    }

    /// `W_j(V, X)` as a series entry at second order.
    pub fn w_series(&self, j: usize, sites: &[usize]) -> Result<CouplingSeries<S>> {
        let c = &self.c;
        let mut s = CouplingSeries::zero(self.order);
        if self.order >= 2 {
            let mut w = SuperPolynomial::zero();
            for &x in sites {
                w = w.add(&w_of_couplings(self.env, j, c, x)?);
            }
            s.coeffs[2] = w;
        }
        Ok(s)
    }

    /// `I_j(V, X) = e^{-V(X)} Π_{B block} (1 + W_j(V, B))`; on the
    /// blocks of scale `j` the product reduces to `1 + W_j(V, X)` plus
    /// cross terms handled by the caller when `X` spans several
    /// blocks. Here `X` is taken to be a single scale-`j` block.
    pub fn interaction_block(&self, block_sites: &[usize]) -> Result<CouplingSeries<S>> {
        let ical = self.interaction_exp(block_sites)?;
        let one_w = CouplingSeries::one(self.order).add(&self.w_series(self.j, block_sites)?);
        ical.mul(&one_w, &self.env.alg)
    }

    /// `Ĩ_{j+1}(V_pt, b)` for a scale-`j` block `b`:
    /// `e^{-V_pt(b)} (1 + W_{j+1}(V_pt, b))`, where `V_pt` is itself a
    /// series (first order from the expectation shift, second order
    /// from the localised bilinear).
    pub fn interaction_pt_block(
        &self,
        block_sites: &[usize],
    ) -> Result<CouplingSeries<S>> {
        if let Some(hit) = self.ipt_cache.borrow().get(block_sites) {
            return Ok(hit.clone());
        }
        let c = &self.c;
        let alg = &self.env.alg;
        let vpt = self.vpt_series_on(block_sites)?;
        let ical = vpt.neg().exp(alg)?;
        // W_{j+1}(V_pt, ·): bilinear in its two slots; orders 2..4
        let mut w = CouplingSeries::zero(self.order);
        if self.order >= 2 {
            // first-order part of V_pt is e^{L}V; second-order is -P
            let c_next = self.env.fam.c(self.j + 1)?;
            let zero: Vec<i64> = vec![0; self.env.lat.dim()];
            let shifted = expectation_shift(c, c_next.value_offset(&zero));
            let v1_all = self.env.v_torus(&shifted)?;
            let mut v2_all = SuperPolynomial::zero();
            if self.order >= 3 {
                for x in self.env.lat.sites() {
                    v2_all = v2_all.sub(&self.p_at(x)?);
                }
            }
            for &x in block_sites {
                let v1_x = self.env.v_site(&shifted, x)?;
                let p_x = self.p_at(x)?;
                let v2_x = p_x.neg();
                w.coeffs[2] = w.coeffs[2]
                    .add(&w_point_direct(self.env, self.j + 1, &v1_x, x, &v1_all)?);
                if self.order >= 3 {
                    w.coeffs[3] = w.coeffs[3]
                        .add(&w_point_direct(self.env, self.j + 1, &v1_x, x, &v2_all)?)
                        .add(&w_point_direct(self.env, self.j + 1, &v2_x, x, &v1_all)?);
                }
                if self.order >= 4 {
                    w.coeffs[4] = w.coeffs[4]
                        .add(&w_point_direct(self.env, self.j + 1, &v2_x, x, &v2_all)?);
                }
            }
        }
        let out = ical.mul(&CouplingSeries::one(self.order).add(&w), alg)?;
        self.ipt_cache
            .borrow_mut()
            .insert(block_sites.to_vec(), out.clone());
        Ok(out)
    }

    /// `V_pt(X)` as a series: `λ e^{L_{j+1}}V(X) - λ² P_j(V, X)`.
    pub fn vpt_series_on(&self, sites: &[usize]) -> Result<CouplingSeries<S>> {
        let c = &self.c;
        let c_next = self.env.fam.c(self.j + 1)?;
        let zero: Vec<i64> = vec![0; self.env.lat.dim()];
        let shifted = expectation_shift(c, c_next.value_offset(&zero));
        let mut s = CouplingSeries::zero(self.order);
        let mut v1 = SuperPolynomial::zero();
        let mut v2 = SuperPolynomial::zero();
        for &x in sites {
            v1 = v1.add(&self.env.v_site(&shifted, x)?);
            if self.order >= 2 {
                v2 = v2.sub(&self.p_at(x)?);
            }
        }
        if self.order >= 1 {
            s.coeffs[1] = v1;
        }
        if self.order >= 2 {
            s.coeffs[2] = v2;
        }
        Ok(s)
    }

    /// `δ I(b) = θ I_j(V, b) - Ĩ_{j+1}(V_pt, b)` in the doubled
    /// algebra (the second term carries no fluctuation fields).
    pub fn delta_i_block(&self, block_sites: &[usize]) -> Result<CouplingSeries<S>> {
        let i_j = self.interaction_block(block_sites)?;
        let theta_i = i_j.map(|p| Ok(theta_double(self.env.lat, p)))?;
        let i_pt = self.interaction_pt_block(block_sites)?;
        Ok(theta_i.sub(&i_pt))
    }

    /// Expectation over the fluctuation namespace, coefficientwise,
    /// with covariance `C_{j+1}`.
    pub fn expect(&self, s: &CouplingSeries<S>) -> Result<CouplingSeries<S>> {
        let cov = self.env.fam.c(self.j + 1)?;
        s.map(|p| Ok(integrate_fluctuations(self.env.lat, cov, p)))
    }

    /// `δV = θV - V_pt` (on a set of sites), a series with first and
    /// second order parts.
    pub fn delta_v(&self, sites: &[usize]) -> Result<CouplingSeries<S>> {
        let mut v = SuperPolynomial::zero();
        for &x in sites {
            v = v.add(&self.env.v_site(&self.c, x)?);
        }
        let theta_v = theta_double(self.env.lat, &v);
        let vpt = self.vpt_series_on(sites)?;
        CouplingSeries::linear(self.order, theta_v).map(|s| s.sub(&vpt))
    }
}

/// The two remainders of the coupling step: both must vanish at first
/// and second order in the coupling.
pub struct StepRemainders<S: Scalar> {
    pub r1: CouplingSeries<S>,
    pub r2: CouplingSeries<S>,
}

/// `R₁(b; B) = Ĩ_pt^{B\b} E δI^b + Ĩ_pt^B (1/2) E_π(θV(b); θV(Λ\b))`.
pub fn r1_series<S: Scalar>(
    senv: &SeriesEnv<S>,
    block_b: &[usize],
    block_big: &[usize],
) -> Result<CouplingSeries<S>> {
    let env = senv.env;
    let alg = &env.alg;
    let rest: Vec<usize> = block_big
        .iter()
        .copied()
        .filter(|x| !block_b.contains(x))
        .collect();
    let ipt_rest = senv.interaction_pt_block_product(&rest)?;
    let d_i = senv.delta_i_block(block_b)?;
    let e_di = senv.expect(&d_i)?;
    let first = ipt_rest.mul(&e_di, alg)?;
    let ipt_all = senv.interaction_pt_block_product(block_big)?;
    let vb = series_v(senv, block_b)?;
    let rest_of_torus: Vec<usize> = env
        .lat
        .sites()
        .filter(|x| !block_b.contains(x))
        .collect();
    let v_rest = series_v(senv, &rest_of_torus)?;
    let cov = env.fam.c(senv.j + 1)?;
    let epi = truncated_expectation_pi(env.lat, cov, &vb, &v_rest, alg)?;
    let mut epi_series = CouplingSeries::zero(senv.order);
    if senv.order >= 2 {
        epi_series.coeffs[2] = epi.div_int(2);
    }
    let second = ipt_all.mul(&epi_series, alg)?;
    Ok(first.add(&second))
}

/// `R₂(b, b'; U) = 1/2 [ Ĩ_pt^{U\(b∪b')} E δI^{b∪b'}
///                      - Ĩ_pt^U E(θV(b); θV(b')) ]`.
pub fn r2_series<S: Scalar>(
    senv: &SeriesEnv<S>,
    block_b: &[usize],
    block_b2: &[usize],
    blocks_u: &[Vec<usize>],
) -> Result<CouplingSeries<S>> {
    let env = senv.env;
    let alg = &env.alg;
    let in_pair = |x: &usize| block_b.contains(x) || block_b2.contains(x);
    let mut ipt_rest = CouplingSeries::one(senv.order);
    let mut ipt_all = CouplingSeries::one(senv.order);
    for blk in blocks_u {
        let term = senv.interaction_pt_block(blk)?;
        ipt_all = ipt_all.mul(&term, alg)?;
        if !blk.iter().any(in_pair) {
            ipt_rest = ipt_rest.mul(&term, alg)?;
        }
    }
    let d_b = senv.delta_i_block(block_b)?;
    let d_b2 = senv.delta_i_block(block_b2)?;
    let e_pair = senv.expect(&d_b.mul(&d_b2, alg)?)?;
    let first = ipt_rest.mul(&e_pair, alg)?;
    let vb = series_v(senv, block_b)?;
    let vb2 = series_v(senv, block_b2)?;
    let cov = env.fam.c(senv.j + 1)?;
    let trunc = truncated_expectation_theta(env.lat, cov, &vb, &vb2, alg)?;
    let mut trunc_series = CouplingSeries::zero(senv.order);
    if senv.order >= 2 {
        trunc_series.coeffs[2] = trunc;
    }
    let second = ipt_all.mul(&trunc_series, alg)?;
    Ok(first.sub(&second).div_int_series(2))
}

fn series_v<S: Scalar>(
    senv: &SeriesEnv<S>,
    sites: &[usize],
) -> Result<SuperPolynomial<S>> {
    let mut v = SuperPolynomial::zero();
    for &x in sites {
        v = v.add(&senv.env.v_site(&senv.c, x)?);
    }
    Ok(v)
}

impl<'a, S: Scalar> SeriesEnv<'a, S> {
    /// Product of `Ĩ_pt` over a union of scale-`j` blocks given as a
    /// flat site list (block structure recovered from the lattice).
    pub fn interaction_pt_block_product(
        &self,
        sites: &[usize],
    ) -> Result<CouplingSeries<S>> {
        use std::collections::BTreeMap;
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in sites {
            blocks
                .entry(self.env.lat.block_of(x, self.j))
                .or_default()
                .push(x);
        }
        let mut out = CouplingSeries::one(self.order);
        for sites in blocks.values() {
            let term = self.interaction_pt_block(sites)?;
            out = out.mul(&term, &self.env.alg)?;
        }
        Ok(out)
    }
}

impl<S: Scalar> CouplingSeries<S> {
    pub fn div_int_series(&self, n: i64) -> Self {
        CouplingSeries {
            coeffs: self.coeffs.iter().map(|c| c.div_int(n)).collect(),
        }
    }
}

/// `h_lead(U, B)` of the step: `∓ 1/2 E_π(θ V(B); θ V(S))` with `S`
/// the complement of `B` (for `U = B`) or `U \ B` (for two-block `U`).
pub fn h_lead<S: Scalar>(
    env: &FlowEnv<S>,
    j_next_cov: &dyn CovarianceSource<S>,
    c: &Couplings<S>,
    block_b: &[usize],
    u_minus_b: Option<&[usize]>,
) -> Result<SuperPolynomial<S>> {
    let alg = &env.alg;
    let mut vb = SuperPolynomial::zero();
    for &x in block_b {
        vb = vb.add(&env.v_site(c, x)?);
    }
    match u_minus_b {
        None => {
            // U = B: -1/2 E_π(θV(B); θV(Λ\B))
            let rest: Vec<usize> = env
                .lat
                .sites()
                .filter(|x| !block_b.contains(x))
                .collect();
            let mut v_rest = SuperPolynomial::zero();
            for &x in &rest {
                v_rest = v_rest.add(&env.v_site(c, x)?);
            }
            Ok(
                truncated_expectation_pi(env.lat, j_next_cov, &vb, &v_rest, alg)?
                    .div_int(-2),
            )
        }
        Some(other) => {
            let mut v_other = SuperPolynomial::zero();
            for &x in other {
                v_other = v_other.add(&env.v_site(c, x)?);
            }
            Ok(
                truncated_expectation_pi(env.lat, j_next_cov, &vb, &v_other, alg)?
                    .div_int(2),
            )
        }
    }
}
