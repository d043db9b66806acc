//! Taylor-localisation onto local polynomials of bounded scaling
//! dimension.
//!
//! A monomial of base dimension `D0 = Σ([φ] + |α_i|)` is expanded
//! about the anchor in the point dependence of each generator, keeping
//! joint Taylor orders up to the budget `d_+ - D0` of its observable
//! sector; anything of higher dimension is dropped. Expansions of
//! order one and two use centred difference operators, so invariant
//! inputs localise onto the invariant interaction basis; higher
//! budgets (not reached by the interaction flow) fall back to forward
//! Newton stencils. Both schemes are exact on lattice polynomials of
//! degree up to the budget, which pins down the operator: it is a
//! projection, it commutes with the Laplacian exponential on its
//! image, and its complement annihilates all low-order Taylor data.

use crate::algebra::{Generator, Monomial, SuperPolynomial};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, TorusLattice};
use crate::scalar::Scalar;

/// Dimension bookkeeping for the localisation operator.
#[derive(Debug, Clone, Copy)]
pub struct LocRules {
    /// Field dimension `(d-2)/2`.
    pub field_dim: f64,
    /// Cap on the bulk sector (`d` in the application).
    pub d_plus_bulk: f64,
    /// Acting scale, compared with the coalescence scale for the
    /// single-observable sectors.
    pub scale: usize,
    /// Coalescence scale.
    pub j_ab: usize,
}

impl LocRules {
    pub fn standard(d: usize, scale: usize, j_ab: usize) -> Self {
        // the field dimension is clamped at zero below two dimensions,
        // otherwise contractions would raise dimensions and the
        // localisation projection would not commute with the Laplacian
        // exponential on its image
        LocRules {
            field_dim: ((d as f64 - 2.0) / 2.0).max(0.0),
            d_plus_bulk: d as f64,
            scale,
            j_ab,
        }
    }

    /// The four-dimensional theory's bookkeeping, used by the
    /// interaction flow on any desk arena: with the arena's own table
    /// at d < 4 the localisation keeps sextics and decorated quartics,
    /// and the flow would leave the span of the interaction basis.
    pub fn flow_table(scale: usize, j_ab: usize) -> Self {
        LocRules {
            field_dim: 1.0,
            d_plus_bulk: 4.0,
            scale,
            j_ab,
        }
    }

    pub fn d_plus(&self, m: &Monomial) -> f64 {
        use crate::algebra::Component::*;
        match m.component() {
            Bulk => self.d_plus_bulk,
            ObsAB => 0.0,
            ObsA | ObsB => {
                if self.scale < self.j_ab {
                    self.field_dim
                } else {
                    0.0
                }
            }
        }
    }

    pub fn dimension(&self, m: &Monomial) -> f64 {
        let derivs: usize = m
            .bosons
            .iter()
            .chain(m.fermions.iter())
            .map(|g| g.deriv_order())
            .sum();
        self.field_dim * m.degree() as f64 + derivs as f64
    }

    pub fn budget(&self, m: &Monomial) -> Option<usize> {
        let room = self.d_plus(m) - self.dimension(m);
        if room < -1e-9 {
            None
        } else {
            Some((room + 1e-9).floor() as usize)
        }
    }
}

/// Minimal-image offsets of a monomial's points from the anchor. The
/// minimal image pins a canonical coordinate chart (ties at half the
/// period resolve to the positive side), so the expansion is a fixed
/// linear operator on any torus with more than two sites per axis;
/// the genuine breakdown at the final scale, where no patch exists,
/// is enforced by the scale guards of the flow. Degenerate two-site
/// axes are rejected here.
fn patch_offsets(
    lat: &TorusLattice,
    anchor: usize,
    m: &Monomial,
) -> Result<Vec<Vec<i64>>> {
    if lat.side() < 3 && m.degree() > 0 {
        return Err(Error::Loc(format!(
            "no coordinate patch on a torus of side {}",
            lat.side()
        )));
    }
    Ok(m
        .bosons
        .iter()
        .chain(m.fermions.iter())
        .map(|g| lat.offset(anchor, g.point).into_iter().collect())
        .collect())
}

/// Per-generator expansion terms at a given order: decoration
/// increments with scalar weights depending on the offset.
fn expansion_terms<S: Scalar>(
    d: usize,
    z: &[i64],
    order: usize,
    newton: bool,
) -> Vec<(MultiIndex, S)> {
    if order == 0 {
        return vec![(MultiIndex::zero(d), S::one())];
    }
    if !newton {
        // centred scheme, exact on polynomials of degree <= 2
        match order {
            1 => {
                let mut out = Vec::new();
                for axis in 0..d {
                    if z[axis] == 0 {
                        continue;
                    }
                    let w = S::from_int(z[axis]).div_int(2);
                    out.push((MultiIndex::unit(d, axis, true), w.clone()));
                    out.push((MultiIndex::unit(d, axis, false), -w));
                }
                out
            }
            2 => {
                let mut out = Vec::new();
                for axis in 0..d {
                    if z[axis] != 0 {
                        // z²/2 times the centred second difference;
                        // note ∇^{-e}∇^{+e} f = 2f - f(+e) - f(-e) is
                        // the negative of it
                        let w = -S::from_int(z[axis] * z[axis]).div_int(2);
                        let mut m = MultiIndex::zero(d);
                        m.0[axis] += 1;
                        m.0[d + axis] += 1;
                        out.push((m, w));
                    }
                    for axis2 in axis + 1..d {
                        if z[axis] == 0 || z[axis2] == 0 {
                            continue;
                        }
                        let w = S::from_int(z[axis] * z[axis2]).div_int(4);
                        for (f1, s1) in [(true, 1), (false, -1)] {
                            for (f2, s2) in [(true, 1), (false, -1)] {
                                let mut m = MultiIndex::unit(d, axis, f1);
                                m = m.bump(axis2, f2);
                                let sgn = s1 * s2;
                                out.push((
                                    m,
                                    if sgn > 0 { w.clone() } else { -w.clone() },
                                ));
                            }
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    } else {
        // forward Newton stencils for high budgets
        let mut out = Vec::new();
        let mut gamma = MultiIndex::zero(d);
        newton_rec(d, z, order, 0, &mut gamma, S::one(), &mut out);
        out
    }
}

fn binom_i64(n: i64, k: usize) -> i64 {
    let mut num: i64 = 1;
    let mut den: i64 = 1;
    for i in 0..k {
        num *= n - i as i64;
        den *= i as i64 + 1;
    }
    num / den
}

fn newton_rec<S: Scalar>(
    d: usize,
    z: &[i64],
    remaining: usize,
    axis: usize,
    gamma: &mut MultiIndex,
    weight: S,
    out: &mut Vec<(MultiIndex, S)>,
) {
    if axis == d {
        if remaining == 0 {
            out.push((gamma.clone(), weight));
        }
        return;
    }
    for k in 0..=remaining {
        let b = binom_i64(z[axis], k);
        if b == 0 {
            continue;
        }
        let w = weight.clone() * S::from_int(b);
        gamma.0[axis] += k as u8;
        newton_rec(d, z, remaining - k, axis + 1, gamma, w, out);
        gamma.0[axis] -= k as u8;
    }
}

/// Taylor-localise one monomial about the anchor with a given joint
/// order budget; the output accumulates into `out`.
fn localise_monomial<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    m: &Monomial,
    coeff: &S,
    budget: usize,
    out: &mut SuperPolynomial<S>,
) -> Result<()> {
    localise_monomial_scheme(lat, anchor, m, coeff, budget, budget > 2, out)
}

/// As `localise_monomial`, with the expansion scheme pinned: centred
/// differences (exact to order two) or forward Newton stencils (exact
/// at any order, not reflection-covariant).
fn localise_monomial_scheme<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    m: &Monomial,
    coeff: &S,
    budget: usize,
    newton: bool,
    out: &mut SuperPolynomial<S>,
) -> Result<()> {
    let d = lat.dim();
    let offsets = patch_offsets(lat, anchor, m)?;
    let gens: Vec<&Generator> = m.bosons.iter().chain(m.fermions.iter()).collect();
    let n_bosons = m.bosons.len();
    // per-generator expansion tables, indexed by order
    let tables: Vec<Vec<Vec<(MultiIndex, S)>>> = offsets
        .iter()
        .map(|z| {
            (0..=budget)
                .map(|ord| expansion_terms::<S>(d, z, ord, newton))
                .collect()
        })
        .collect();
    // distribute total order <= budget over the generators
    fn rec<S: Scalar>(
        idx: usize,
        remaining: usize,
        gens: &[&Generator],
        tables: &[Vec<Vec<(MultiIndex, S)>>],
        anchor: usize,
        n_bosons: usize,
        chosen: &mut Vec<(MultiIndex, S)>,
        m: &Monomial,
        coeff: &S,
        out: &mut SuperPolynomial<S>,
    ) {
        if idx == gens.len() {
            let mut weight = coeff.clone();
            let mut bosons = Vec::with_capacity(n_bosons);
            let mut fermions = Vec::with_capacity(gens.len() - n_bosons);
            for (i, g) in gens.iter().enumerate() {
                let (gamma, w) = &chosen[i];
                weight = weight * w.clone();
                let gen = Generator::with_lap(g.species, anchor, g.deriv.add(gamma), g.lap);
                if i < n_bosons {
                    bosons.push(gen);
                } else {
                    fermions.push(gen);
                }
            }
            if let Some((mono, sign)) =
                Monomial::from_parts(bosons, fermions, m.sigma, m.sigma_bar)
            {
                if sign < 0 {
                    weight = -weight;
                }
                out.accumulate(mono, weight);
            }
            return;
        }
        for ord in 0..=remaining {
            for (gamma, w) in &tables[idx][ord] {
                chosen.push((gamma.clone(), w.clone()));
                rec(
                    idx + 1,
                    remaining - ord,
                    gens,
                    tables,
                    anchor,
                    n_bosons,
                    chosen,
                    m,
                    coeff,
                    out,
                );
                chosen.pop();
            }
        }
    }
    let mut chosen = Vec::new();
    rec(
        0,
        budget,
        &gens,
        &tables,
        anchor,
        n_bosons,
        &mut chosen,
        m,
        coeff,
        out,
    );
    Ok(())
}

/// The localisation operator at an anchor point.
pub fn loc<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    rules: &LocRules,
    f: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    let mut out = SuperPolynomial::zero();
    for (m, c) in &f.terms {
        let Some(budget) = rules.budget(m) else {
            continue;
        };
        localise_monomial(lat, anchor, m, c, budget, &mut out)?;
    }
    Ok(out)
}

/// `(1 - Loc)` applied to `f`.
pub fn one_minus_loc<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    rules: &LocRules,
    f: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    Ok(f.sub(&loc(lat, anchor, rules, f)?))
}

/// Expand every decorated generator into point evaluations; the result
/// represents the same functional with undecorated generators only.
pub fn jet_expand<S: Scalar>(
    lat: &TorusLattice,
    f: &SuperPolynomial<S>,
) -> SuperPolynomial<S> {
    let d = lat.dim();
    let mut out = SuperPolynomial::zero();
    for (m, c) in &f.terms {
        // per generator: list of (point, weight)
        let gens: Vec<&Generator> = m.bosons.iter().chain(m.fermions.iter()).collect();
        let n_bosons = m.bosons.len();
        let stencils: Vec<Vec<(usize, i64)>> = gens
            .iter()
            .map(|g| {
                let mut taps: Vec<(Vec<i64>, i64)> = vec![(vec![0; d], 1)];
                for (axis, fwd, count) in g.deriv.directions() {
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
                for _ in 0..g.lap {
                    let mut next = Vec::with_capacity(taps.len() * (2 * d + 1));
                    for (off, w) in &taps {
                        next.push((off.clone(), -2 * d as i64 * *w));
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
                taps.into_iter()
                    .map(|(off, w)| {
                        let base = lat.coords(g.point);
                        let coords: Vec<i64> = (0..d)
                            .map(|i| base[i] as i64 + off[i])
                            .collect();
                        (lat.site_wrapped(&coords), w)
                    })
                    .collect()
            })
            .collect();
        fn rec<S: Scalar>(
            idx: usize,
            gens: &[&Generator],
            stencils: &[Vec<(usize, i64)>],
            n_bosons: usize,
            picked: &mut Vec<usize>,
            m: &Monomial,
            coeff: &S,
            out: &mut SuperPolynomial<S>,
        ) {
            if idx == gens.len() {
                let mut weight = coeff.clone();
                let d = gens
                    .first()
                    .map(|g| g.deriv.dim())
                    .unwrap_or(1);
                let mut bosons = Vec::new();
                let mut fermions = Vec::new();
                for (i, g) in gens.iter().enumerate() {
                    let (pt, w) = stencils[i][picked[i]];
                    weight = weight * S::from_int(w);
                    let gen = Generator::plain(g.species, pt, d);
                    if i < n_bosons {
                        bosons.push(gen);
                    } else {
                        fermions.push(gen);
                    }
                }
                if let Some((mono, sign)) =
                    Monomial::from_parts(bosons, fermions, m.sigma, m.sigma_bar)
                {
                    if sign < 0 {
                        weight = -weight;
                    }
                    out.accumulate(mono, weight);
                }
                return;
            }
            for k in 0..stencils[idx].len() {
                picked.push(k);
                rec(idx + 1, gens, stencils, n_bosons, picked, m, coeff, out);
                picked.pop();
            }
        }
        let mut picked = Vec::new();
        rec(0, &gens, &stencils, n_bosons, &mut picked, m, c, &mut out);
    }
    out
}

/// Canonical low-order Taylor data of `f` about the anchor: expand all
/// decorations into points, then localise each sector with the budget
/// determined by its undecorated field count. Two elements with equal
/// `loc_data` pair identically against all polynomial test data up to
/// the sector budgets.
pub fn loc_data<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    rules: &LocRules,
    f: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    // the forward Newton stencils form an independent basis of the
    // low-order data functionals (centred decorations do not: the two
    // first differences and the centred second difference are
    // dependent on quadratics), so the canonical data form is computed
    // in the Newton scheme
    let expanded = jet_expand(lat, f);
    loc_scheme(lat, anchor, rules, &expanded, true)
}

/// A representation of `(1 - Loc) f` that makes the Taylor
/// cancellation explicit: every term carries derivative order at least
/// `budget + 1` (at intermediate points), or is an anchor-local piece
/// of dimension above the sector cap. Termwise norm bounds of this
/// form see the contraction gained by `1 - Loc`, which the naive
/// difference representation hides.
pub fn loc_remainder_form<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    rules: &LocRules,
    f: &SuperPolynomial<S>,
) -> Result<SuperPolynomial<S>> {
    let d = lat.dim();
    let mut out = SuperPolynomial::zero();
    for (m, c) in &f.terms {
        let Some(budget) = rules.budget(m) else {
            // dimension already above the cap: the monomial is its own
            // remainder
            out.accumulate(m.clone(), c.clone());
            continue;
        };
        patch_offsets(lat, anchor, m)?;
        // recursive one-step reductions toward the anchor
        let n_bosons = m.bosons.len();
        let gens: Vec<Generator> = m
            .bosons
            .iter()
            .chain(m.fermions.iter())
            .cloned()
            .collect();
        reduce_rec(
            lat,
            anchor,
            gens,
            n_bosons,
            m.sigma,
            m.sigma_bar,
            0,
            budget,
            c.clone(),
            &mut out,
        );
    }
    // the Newton-vs-centred discrepancy is anchor-local with zero
    // low-order data; it belongs to the remainder as well
    let newton = loc_scheme(lat, anchor, rules, f, true)?;
    let centred = loc_scheme(lat, anchor, rules, f, false)?;
    Ok(out.add(&newton.sub(&centred)))
}

#[allow(clippy::too_many_arguments)]
fn reduce_rec<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    gens: Vec<Generator>,
    n_bosons: usize,
    sigma: u8,
    sigma_bar: u8,
    added: usize,
    budget: usize,
    weight: S,
    out: &mut SuperPolynomial<S>,
) {
    if weight.is_zero() {
        return;
    }
    // find a generator away from the anchor
    let mut target: Option<(usize, usize, i64)> = None;
    for (i, g) in gens.iter().enumerate() {
        if g.point == anchor {
            continue;
        }
        let z = lat.offset(anchor, g.point);
        if let Some(axis) = (0..z.len()).find(|&ax| z[ax] != 0) {
            target = Some((i, axis, z[axis]));
            break;
        }
    }
    let Some((i, axis, off)) = target else {
        // fully at the anchor: Taylor content, not remainder
        debug_assert!(added <= budget);
        return;
    };
    let step: i64 = if off > 0 { -1 } else { 1 };
    let moved = lat.shift(gens[i].point, axis, step);
    // f(y) = f(y') + (∇^{dir} f)(y') with y' one step closer and dir
    // pointing from y' back to y
    let dir_fwd = step < 0;
    // child A: moved, undecorated
    let mut gens_a = gens.clone();
    gens_a[i] = Generator::with_lap(gens[i].species, moved, gens[i].deriv.clone(), gens[i].lap);
    reduce_rec(
        lat,
        anchor,
        gens_a,
        n_bosons,
        sigma,
        sigma_bar,
        added,
        budget,
        weight.clone(),
        out,
    );
    // child B: moved with one more derivative
    let mut gens_b = gens;
    gens_b[i] = Generator::with_lap(
        gens_b[i].species,
        moved,
        gens_b[i].deriv.bump(axis, dir_fwd),
        gens_b[i].lap,
    );
    if added + 1 > budget {
        // order cap reached: this is a remainder term
        let bosons = gens_b[..n_bosons].to_vec();
        let fermions = gens_b[n_bosons..].to_vec();
        if let Some((mono, sign)) = Monomial::from_parts(bosons, fermions, sigma, sigma_bar) {
            let w = if sign < 0 {
                -weight.clone()
            } else {
                weight.clone()
            };
            out.accumulate(mono, w);
        }
    } else {
        reduce_rec(
            lat,
            anchor,
            gens_b,
            n_bosons,
            sigma,
            sigma_bar,
            added + 1,
            budget,
            weight,
            out,
        );
    }
}

fn loc_scheme<S: Scalar>(
    lat: &TorusLattice,
    anchor: usize,
    rules: &LocRules,
    f: &SuperPolynomial<S>,
    force_newton: bool,
) -> Result<SuperPolynomial<S>> {
    let mut out = SuperPolynomial::zero();
    for (m, c) in &f.terms {
        let Some(budget) = rules.budget(m) else {
            continue;
        };
        localise_monomial_scheme(lat, anchor, m, c, budget, force_newton || budget > 2, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{phi, phi_bar, Algebra};
    use crate::localpoly::couplings::{
        build_v, tau, tau_delta, tau_grad_grad, Couplings, ObservablePoints,
    };
    use num_complex::Complex64;

    #[test]
    fn loc_fixes_local_relevant_monomials() {
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let x = lat.site(&[3, 2]);
        let f = phi::<Complex64>(2, x).mul(&phi_bar(2, x), &alg).unwrap();
        let lf = loc(&lat, x, &rules, &f).unwrap();
        assert_eq!(lf, f);
    }

    #[test]
    fn loc_fixes_interaction_basis() {
        // τ, τ², τ_Δ, τ_∇∇ at the anchor are all fixed points
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let x = lat.site(&[5, 1]);
        let t = tau::<Complex64>(&lat, x, &alg);
        let t2 = t.mul(&t, &alg).unwrap();
        for f in [
            t.clone(),
            t2,
            tau_delta::<Complex64>(&lat, x, &alg),
            tau_grad_grad::<Complex64>(&lat, x, &alg),
        ] {
            let lf = loc(&lat, x, &rules, &f).unwrap();
            assert!(lf.residual(&f) < 1e-13, "basis element moved");
        }
    }

    #[test]
    fn loc_drops_high_dimension() {
        // at d=2 the bulk cap is 2, so three derivative orders vanish
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let x = 0;
        let mut m = MultiIndex::zero(2);
        m.0[0] = 2;
        m.0[1] = 1;
        let f = SuperPolynomial::<Complex64>::generator(Generator::new(
            crate::algebra::Species::Phi,
            x,
            m,
        ))
        .mul(&phi_bar(2, x), &alg)
        .unwrap();
        assert!(loc(&lat, x, &rules, &f).unwrap().is_zero());
    }

    #[test]
    fn loc_is_idempotent() {
        use rand::{Rng, SeedableRng};
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let anchor = lat.site(&[2, 2]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut f = SuperPolynomial::<Complex64>::zero();
            for _ in 0..4 {
                let mut t = SuperPolynomial::constant(Complex64::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ));
                for _ in 0..rng.gen_range(0..=2) {
                    let dx = rng.gen_range(-1..=1i64);
                    let dy = rng.gen_range(-1..=1i64);
                    let base = lat.coords(anchor);
                    let pt = lat.site_wrapped(&[base[0] as i64 + dx, base[1] as i64 + dy]);
                    let g: SuperPolynomial<Complex64> = if rng.gen_bool(0.5) {
                        phi(2, pt)
                    } else {
                        phi_bar(2, pt)
                    };
                    t = t.mul(&g, &alg).unwrap();
                }
                f = f.add(&t);
            }
            let l1 = loc(&lat, anchor, &rules, &f).unwrap();
            let l2 = loc(&lat, anchor, &rules, &l1).unwrap();
            assert!(l1.residual(&l2) < 1e-12);
        }
    }

    #[test]
    fn one_minus_loc_kills_taylor_data() {
        // loc_data of (1 - Loc)F vanishes identically
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let anchor = lat.site(&[1, 1]);
        let y = lat.site(&[3, 2]);
        let f = phi::<Complex64>(2, y)
            .mul(&phi_bar(2, anchor), &alg)
            .unwrap()
            .add(
                &phi(2, y)
                    .mul(&phi_bar(2, y), &alg)
                    .unwrap()
                    .scale(&Complex64::new(0.4, -0.1)),
            );
        let r = one_minus_loc(&lat, anchor, &rules, &f).unwrap();
        let data = loc_data(&lat, anchor, &rules, &r).unwrap();
        assert!(
            data.sup_coefficient() < 1e-12,
            "left-over data {}",
            data.sup_coefficient()
        );
    }

    #[test]
    fn loc_commutes_with_laplacian_exponential_on_image() {
        // Loc e^{L} Loc = e^{L} Loc
        use crate::algebra::{exp_laplacian, LatticeContraction};
        use crate::covariance::MapCovariance;
        let lat = TorusLattice::new(2, 2, 3).unwrap();
        let alg = Algebra::default();
        let rules = LocRules::standard(2, 1, 10);
        let anchor = lat.site(&[4, 4]);
        let mut cov = MapCovariance::<Complex64>::new(2, 3);
        cov.insert(&[0, 0], Complex64::new(1.1, 0.0));
        cov.insert(&[1, 0], Complex64::new(0.4, 0.0));
        cov.insert(&[1, 1], Complex64::new(0.2, 0.0));
        let kernel = LatticeContraction { lat: &lat, cov: &cov };
        let obs = ObservablePoints { a: 0, b: 9 };
        let c = Couplings {
            g: Complex64::new(0.2, 0.0),
            nu: Complex64::new(0.05, 0.0),
            z: Complex64::new(-0.1, 0.0),
            y: Complex64::new(0.08, 0.0),
            lambda_a: Complex64::new(0.7, 0.0),
            lambda_b: Complex64::new(0.6, 0.0),
            q_a: Complex64::zero(),
            q_b: Complex64::zero(),
        };
        // F with support near the anchor
        let near: Vec<usize> = vec![
            anchor,
            lat.shift(anchor, 0, 1),
            lat.shift(anchor, 1, -1),
        ];
        let f = build_v(&lat, &c, &near, obs, &alg).unwrap();
        let lf = loc(&lat, anchor, &rules, &f).unwrap();
        let elf = exp_laplacian(&kernel, &lf, true);
        let lelf = loc(&lat, anchor, &rules, &elf).unwrap();
        assert!(lelf.residual(&elf) < 1e-12);
    }

    #[test]
    fn degenerate_torus_has_no_patch() {
        let lat = TorusLattice::new(1, 2, 1).unwrap(); // side 2
        let rules = LocRules::standard(1, 1, 10);
        let f = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 1), &Algebra::default())
            .unwrap();
        assert!(loc(&lat, 0, &rules, &f).is_err());
        // side 4 with the canonical chart is fine
        let lat4 = TorusLattice::new(1, 2, 2).unwrap();
        let f4 = phi::<Complex64>(1, 0)
            .mul(&phi_bar(1, 2), &Algebra::default())
            .unwrap();
        assert!(loc(&lat4, 0, &rules, &f4).is_ok());
    }
}
