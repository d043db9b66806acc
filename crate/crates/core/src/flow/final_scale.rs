//! The final scale, where the torus consists of a single block and no
//! coordinate patch exists for the localisation operator.
//!
//! The renormalised couplings at the last scale are computed as they
//! would be on a larger torus; the last localised bilinear is then
//! defined to keep the coupling step identity valid, and the last `W`
//! is defined through the recursion it satisfies below the final
//! scale, with the torus remainder as covariance.

use super::wp::{expectation_shift, p_point_bilinear, w_point_direct, FlowEnv};
use super::CovarianceFamily;
use crate::algebra::{expectation_theta, SuperPolynomial};
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::localpoly::Couplings;
use crate::scalar::Scalar;

pub struct FinalScaleData<S: Scalar> {
    /// Couplings at the final scale, as on a larger torus.
    pub vpt_final: Couplings<S>,
    /// Extraction residual from the larger-torus step.
    pub vpt_residual: f64,
}

/// `V_pt` at the final scale `N`, computed on the larger torus
/// (`env_plus` must be a torus with one more scale carrying the same
/// kernel family extended by `C_N`).
pub fn final_scale<S: Scalar>(
    env_plus: &FlowEnv<S>,
    n: usize,
    c: &Couplings<S>,
) -> Result<FinalScaleData<S>> {
    if env_plus.fam.n_scales() < n + 1 {
        return Err(Error::ScaleRange(n, env_plus.fam.n_scales()));
    }
    let step = super::wp::compute_vpt(env_plus, n - 1, c)?;
    Ok(FinalScaleData {
        vpt_final: step.vpt,
        vpt_residual: step.p_residual_sup,
    })
}

/// `P_{N-1}(V, x)` on the original torus, defined so the coupling step
/// stays valid at the last scale:
/// `P_{N-1}(V, x) = E_{C_N} θ V_x - V_pt,N,x`.
///
/// `c_n` is the scale-`N` kernel (from the larger-torus construction,
/// identified on this torus), and `vpt_final` the final couplings.
pub fn p_last<S: Scalar>(
    env: &FlowEnv<S>,
    c_n: &dyn crate::covariance::CovarianceSource<S>,
    c: &Couplings<S>,
    vpt_final: &Couplings<S>,
    x: usize,
) -> Result<SuperPolynomial<S>> {
    let vx = env.v_site(c, x)?;
    let e_v = expectation_theta(env.lat, c_n, &vx);
    let vpt_x = env.v_site(vpt_final, x)?;
    Ok(e_v.sub(&vpt_x))
}

/// `W_N(V, x)` through the recursion with the torus remainder:
/// `e^{L_{N,N}} W_{N-1}(e^{-L}V, x) - P_{N-1}(e^{-L}V, x)
///  + 1/2 F_{π, C_{N,N}}(V_x, V(Λ))`.
///
/// The larger-torus environment supplies `P_{N-1}` applied to the
/// shifted couplings.
pub fn w_last<S: Scalar>(
    env: &FlowEnv<S>,
    env_plus: &FlowEnv<S>,
    n: usize,
    c: &Couplings<S>,
    x: usize,
) -> Result<SuperPolynomial<S>> {
    use crate::algebra::{exp_laplacian, f_pi_cross, LatticeContraction};
    let rem = env
        .fam
        .remainder()
        .ok_or_else(|| Error::Config("final-scale W needs the torus remainder".into()))?;
    let zero: Vec<i64> = vec![0; env.lat.dim()];
    // e^{-L_{N,N}} V stays an interaction tuple: only ν shifts
    let down = expectation_shift(c, -rem.value_offset(&zero));
    // W_{N-1}(down, x) on the original torus
    let w_prev = super::wp::w_of_couplings(env, n - 1, &down, x)?;
    let kernel = LatticeContraction {
        lat: env.lat,
        cov: rem,
    };
    let lifted = exp_laplacian(&kernel, &w_prev, true);
    // P_{N-1}(down, x): defined through the larger torus step
    let step = super::wp::compute_vpt(env_plus, n - 1, &down)?;
    let c_n_plus = env_plus.fam.c(n)?;
    let e_v = expectation_theta(env.lat, c_n_plus, &env.v_site(&down, x)?);
    let vpt_x = env.v_site(&step.vpt, x)?;
    let p_prev = e_v.sub(&vpt_x);
    let f = f_pi_cross(env.lat, rem, &env.v_site(c, x)?, &env.v_torus(c)?, &env.alg)?
        .div_int(2);
    Ok(lifted.sub(&p_prev).add(&f))
}

/// Bilinear final-scale `W_N(A_x, B)`, extending the recursion to two
/// arguments (used by the identity that the pointwise sum reproduces
/// the single-argument form).
pub fn w_last_bilinear<S: Scalar>(
    env: &FlowEnv<S>,
    env_plus: &FlowEnv<S>,
    n: usize,
    a: &SuperPolynomial<S>,
    anchor: usize,
    anchor_plus: usize,
    b: &SuperPolynomial<S>,
    a_plus: &SuperPolynomial<S>,
    b_plus: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    use crate::algebra::{exp_laplacian, f_pi_cross, LatticeContraction};
    let rem = env
        .fam
        .remainder()
        .ok_or_else(|| Error::Config("final-scale W needs the torus remainder".into()))?;
    let kernel = LatticeContraction {
        lat: env.lat,
        cov: rem,
    };
    let a_down = exp_laplacian(&kernel, a, false);
    let b_down = exp_laplacian(&kernel, b, false);
    let w_prev = w_point_direct(env, n - 1, &a_down, anchor, &b_down)?;
    let lifted = exp_laplacian(&kernel, &w_prev, true);
    // P_{N-1}(A', B') through the larger-torus bilinear expansion,
    // mapped back by matching points (the polynomials given as
    // `a_plus`/`b_plus` are the same elements represented there)
    let kernel_plus = LatticeContraction {
        lat: env_plus.lat,
        cov: rem,
    };
    let a_down_plus = exp_laplacian(&kernel_plus, a_plus, false);
    let b_down_plus = exp_laplacian(&kernel_plus, b_plus, false);
    let p_prev_plus =
        p_point_bilinear(env_plus, n - 1, &a_down_plus, anchor_plus, &b_down_plus)?;
    // the localised bilinear is anchored at a single point; relabel to
    // the original anchor
    let p_prev = relabel_anchor(env_plus.lat, env.lat, &p_prev_plus, anchor_plus, anchor)?;
    let f = f_pi_cross(env.lat, rem, a, b, &env.alg)?.div_int(2);
    Ok(lifted.sub(&p_prev).add(&f))
}

/// Carry an anchor-local polynomial from one torus to another by
/// translating its points relative to the anchor.
pub fn relabel_anchor<S: Scalar>(
    from: &TorusLattice,
    to: &TorusLattice,
    p: &SuperPolynomial<S>,
    from_anchor: usize,
    to_anchor: usize,
) -> Result<SuperPolynomial<S>> {
    let base = to.coords(to_anchor);
    let translate = |pt: usize| -> usize {
        let z = from.offset(from_anchor, pt);
        let coords: Vec<i64> = (0..to.dim()).map(|i| base[i] as i64 + z[i]).collect();
        to.site_wrapped(&coords)
    };
    let mut out = SuperPolynomial::zero();
    for (m, c) in &p.terms {
        if let Some((mono, sign)) = m.map_points(translate) {
            let cc = if sign < 0 { -c.clone() } else { c.clone() };
            out.accumulate(mono, cc);
        }
    }
    Ok(out)
}
