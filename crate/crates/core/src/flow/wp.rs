//! The bilinear field polynomials `W_j` and `P_j` and the renormalised
//! coupling step.
//!
//! Both a direct accumulated-covariance route and a scale recursion
//! are implemented for `W`; the localised bilinear `P` likewise has
//! its defining form and an alternative expansion. Their agreement is
//! a machine-checkable identity of the construction, exercised by the
//! verification suite.

use super::CovarianceFamily;
use crate::algebra::{
    exp_laplacian, f_pi_cross, Algebra, LatticeContraction, SuperPolynomial,
};
use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::localpoly::{
    build_v_torus, extract_couplings, loc, one_minus_loc, v_at_site, Couplings, LocRules,
    ObservablePoints,
};
use crate::scalar::Scalar;

/// Everything a flow step needs to know about its arena.
pub struct FlowEnv<'a, S: Scalar> {
    pub lat: &'a TorusLattice,
    pub fam: &'a dyn CovarianceFamily<S>,
    pub obs: ObservablePoints,
    pub j_ab: usize,
    pub alg: Algebra,
}

impl<'a, S: Scalar> FlowEnv<'a, S> {
    pub fn rules(&self, scale: usize) -> LocRules {
        LocRules::flow_table(scale, self.j_ab)
    }

    pub fn v_site(&self, c: &Couplings<S>, x: usize) -> Result<SuperPolynomial<S>> {
        v_at_site(self.lat, c, x, self.obs, &self.alg)
    }

    pub fn v_torus(&self, c: &Couplings<S>) -> Result<SuperPolynomial<S>> {
        build_v_torus(self.lat, c, self.obs, &self.alg)
    }
}

/// `W_j` applied to two explicit polynomials, direct form:
/// `W_j(A_x, B) = 1/2 (1 - Loc_x) F_{π, w_j}(A, B)`.
pub fn w_point_direct<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    a: &SuperPolynomial<S>,
    anchor: usize,
    b: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    if j >= env.fam.n_scales() {
        return Err(Error::ScaleRange(j, env.fam.n_scales()));
    }
    let w = env.fam.w(j)?;
    let f = f_pi_cross(env.lat, w, a, b, &env.alg)?;
    Ok(one_minus_loc(env.lat, anchor, &env.rules(j), &f)?.div_int(2))
}

/// `W_j` by the scale recursion: `W_0 = 0` and
/// `W_j(A_x, B) = (1-Loc_x)(e^{L_j} W_{j-1}(e^{-L_j}A, e^{-L_j}B)
///                + 1/2 F_{π,C_j}(A, B))`.
pub fn w_point_recursive<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    a: &SuperPolynomial<S>,
    anchor: usize,
    b: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    if j == 0 {
        return Ok(SuperPolynomial::zero());
    }
    let c_j = env.fam.c(j)?;
    let kernel = LatticeContraction {
        lat: env.lat,
        cov: c_j,
    };
    let a_down = exp_laplacian(&kernel, a, false);
    let b_down = exp_laplacian(&kernel, b, false);
    let inner = w_point_recursive(env, j - 1, &a_down, anchor, &b_down)?;
    let lifted = exp_laplacian(&kernel, &inner, true);
    let f = f_pi_cross(env.lat, c_j, a, b, &env.alg)?.div_int(2);
    one_minus_loc(env.lat, anchor, &env.rules(j), &lifted.add(&f))
}

/// `W_j(V, x)` for a coupling tuple: the direct form against `V(Λ)`.
pub fn w_of_couplings<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    c: &Couplings<S>,
    x: usize,
) -> Result<SuperPolynomial<S>> {
    let vx = env.v_site(c, x)?;
    let v_all = env.v_torus(c)?;
    w_point_direct(env, j, &vx, x, &v_all)
}

/// `W_j(V, X) = Σ_{x∈X} W_j(V, x)`.
pub fn w_on_sites<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    c: &Couplings<S>,
    sites: &[usize],
) -> Result<SuperPolynomial<S>> {
    let v_all = env.v_torus(c)?;
    let mut out = SuperPolynomial::zero();
    for &x in sites {
        let vx = env.v_site(c, x)?;
        out = out.add(&w_point_direct(env, j, &vx, x, &v_all)?);
    }
    Ok(out)
}

/// `P_j(V, x)` in its defining form:
/// `Loc_x ( e^{L_{j+1}} W_j(V, x) + 1/2 F_{π, C_{j+1}}(e^{L} V_x, e^{L} V(Λ)) )`.
pub fn p_of_couplings<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    c: &Couplings<S>,
    x: usize,
) -> Result<SuperPolynomial<S>> {
    let c_next = env.fam.c(j + 1)?;
    let kernel = LatticeContraction {
        lat: env.lat,
        cov: c_next,
    };
    let w_x = w_of_couplings(env, j, c, x)?;
    let e_w = exp_laplacian(&kernel, &w_x, true);
    let ev_x = exp_laplacian(&kernel, &env.v_site(c, x)?, true);
    let ev_all = exp_laplacian(&kernel, &env.v_torus(c)?, true);
    let f = f_pi_cross(env.lat, c_next, &ev_x, &ev_all, &env.alg)?.div_int(2);
    loc(env.lat, x, &env.rules(j), &e_w.add(&f))
}

/// The bilinear `P_j` expansion used by the recursion identities:
/// `P_j(A_x, B) = 1/2 Loc_x F_{π,w_{j+1}}(e^{L_{j+1}}A, e^{L_{j+1}}B)
///              - 1/2 e^{L_{j+1}} Loc_x F_{π,w_j}(A, B)`.
pub fn p_point_bilinear<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    a: &SuperPolynomial<S>,
    anchor: usize,
    b: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    let c_next = env.fam.c(j + 1)?;
    let kernel = LatticeContraction {
        lat: env.lat,
        cov: c_next,
    };
    let ea = exp_laplacian(&kernel, a, true);
    let eb = exp_laplacian(&kernel, b, true);
    let w_next = env.fam.w(j + 1)?;
    let first = loc(
        env.lat,
        anchor,
        &env.rules(j),
        &f_pi_cross(env.lat, w_next, &ea, &eb, &env.alg)?,
    )?
    .div_int(2);
    let w_j = env.fam.w(j)?;
    let inner = loc(
        env.lat,
        anchor,
        &env.rules(j),
        &f_pi_cross(env.lat, w_j, a, b, &env.alg)?,
    )?
    .div_int(2);
    let second = exp_laplacian(&kernel, &inner, true);
    Ok(first.sub(&second))
}

/// The expectation shift of the interaction tuple:
/// `e^{L_C} V = V + 2 g C(0) τ` as couplings (only ν moves).
pub fn expectation_shift<S: Scalar>(c: &Couplings<S>, c_at_zero: S) -> Couplings<S> {
    let mut out = c.clone();
    out.nu = out.nu.clone() + S::from_int(2) * c.g.clone() * c_at_zero;
    out
}

/// Result of a coupling step: the tuple plus extraction residuals.
pub struct VptStep<S: Scalar> {
    pub vpt: Couplings<S>,
    pub p_residual_sup: f64,
}

/// `V_pt` at scale `j+1`: extract the couplings of
/// `e^{L_{j+1}} V - P_j(V)`, reading the bulk tuple at a bulk anchor
/// and the observable coordinates at the observable points.
pub fn compute_vpt<S: Scalar>(
    env: &FlowEnv<S>,
    j: usize,
    c: &Couplings<S>,
) -> Result<VptStep<S>> {
    let c_next = env.fam.c(j + 1)?;
    let zero: Vec<i64> = vec![0; env.lat.dim()];
    let shifted = expectation_shift(c, c_next.value_offset(&zero));
    // anchors: a bulk point far from the observables plus both
    // observable points
    let bulk_anchor = (0..env.lat.n_sites())
        .find(|&x| x != env.obs.a && x != env.obs.b)
        .expect("lattice has at least three sites");
    let rules = env.rules(j);
    let mut vpt = Couplings::<S>::default();
    let mut residual_sup: f64 = 0.0;
    for anchor in [bulk_anchor, env.obs.a, env.obs.b] {
        let p_x = p_of_couplings(env, j, c, anchor)?;
        let target = env.v_site(&shifted, anchor)?.sub(&p_x);
        let (got, res) = extract_couplings(env.lat, &target, anchor, env.obs, &rules, &env.alg)?;
        residual_sup = residual_sup.max(res.sup_coefficient());
        if anchor == bulk_anchor {
            vpt.g = got.g;
            vpt.nu = got.nu;
            vpt.z = got.z;
            vpt.y = got.y;
        }
        if anchor == env.obs.a {
            vpt.lambda_a = got.lambda_a;
            vpt.q_a = got.q_a;
        }
        if anchor == env.obs.b {
            vpt.lambda_b = got.lambda_b;
            vpt.q_b = got.q_b;
        }
    }
    Ok(VptStep {
        vpt,
        p_residual_sup: residual_sup,
    })
}
