//! The discrete torus, finite differences, and block/polymer geometry.
//!
//! Sites are stored as row-major indices into `[0, side)^d`; all
//! coordinate arithmetic is done modulo the side length. Polymers are
//! unions of scale-`j` blocks; connectivity is *-connectivity (blocks
//! touching at corners count as connected), which is what makes the
//! small-set count `2^d` include corner configurations.

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::collections::BTreeSet;

/// Maximum supported dimension for the inline multi-index storage.
pub const MAX_D: usize = 6;

/// Default cap on the number of lattice sites.
pub const DEFAULT_SITE_CAP: u128 = 1 << 28;

/// A canonical site index into `[0, side)^d`, row-major.
pub type Point = usize;

/// The discrete torus `Z^d / L^N Z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusLattice {
    d: usize,
    base: usize,
    n_scales: usize,
    side: usize,
    n_sites: usize,
}

impl TorusLattice {
    pub fn new(d: usize, base: usize, n_scales: usize) -> Result<Self> {
        Self::with_cap(d, base, n_scales, DEFAULT_SITE_CAP)
    }

    pub fn with_cap(d: usize, base: usize, n_scales: usize, cap: u128) -> Result<Self> {
        if d < 1 || d > MAX_D {
            return Err(Error::Lattice(format!("dimension {d} outside 1..={MAX_D}")));
        }
        if base < 2 {
            return Err(Error::Lattice(format!("block base {base} must be >= 2")));
        }
        if n_scales < 1 {
            return Err(Error::Lattice("need at least one scale".into()));
        }
        let side = (base as u128).checked_pow(n_scales as u32).ok_or_else(|| {
            Error::Lattice(format!("side {base}^{n_scales} overflows"))
        })?;
        let n_sites = side.checked_pow(d as u32).ok_or_else(|| {
            Error::Lattice(format!("site count ({base}^{n_scales})^{d} overflows"))
        })?;
        if n_sites > cap {
            return Err(Error::SiteCap(n_sites, cap));
        }
        Ok(TorusLattice {
            d,
            base,
            n_scales,
            side: side as usize,
            n_sites: n_sites as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sites(&self) -> impl Iterator<Item = Point> {
        0..self.n_sites
    }

    pub fn coords(&self, p: Point) -> SmallVec<[usize; MAX_D]> {
        debug_assert!(p < self.n_sites);
        let mut c = SmallVec::new();
        let mut rem = p;
        for _ in 0..self.d {
            c.push(rem % self.side);
            rem /= self.side;
        }
        c
    }

    pub fn site(&self, coords: &[usize]) -> Point {
        debug_assert_eq!(coords.len(), self.d);
        let mut p = 0;
        for (axis, &c) in coords.iter().enumerate().rev() {
            debug_assert!(c < self.side, "coordinate not canonical");
            p = p * self.side + c;
            debug_assert!(axis < self.d);
        }
        p
    }

    pub fn site_wrapped(&self, coords: &[i64]) -> Point {
        let side = self.side as i64;
        let canon: SmallVec<[usize; MAX_D]> = coords
            .iter()
            .map(|&c| (c.rem_euclid(side)) as usize)
            .collect();
        self.site(&canon)
    }

    /// Shift a site by `steps` in the given axis.
    pub fn shift(&self, p: Point, axis: usize, steps: i64) -> Point {
        shift_site(self, p, axis, steps)
    }

    /// Minimal-image offset `q - p`, componentwise in `(-side/2, side/2]`.
    pub fn offset(&self, p: Point, q: Point) -> SmallVec<[i64; MAX_D]> {
        let cp = self.coords(p);
        let cq = self.coords(q);
        let side = self.side as i64;
        let half = side / 2;
        cp.iter()
            .zip(cq.iter())
            .map(|(&a, &b)| {
                let mut d = (b as i64 - a as i64).rem_euclid(side);
                if d > half {
                    d -= side;
                }
                d
            })
            .collect()
    }

    /// Minimal-image Euclidean distance between two sites.
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        self.offset(p, q)
            .iter()
            .map(|&d| (d * d) as f64)
            .sum::<f64>()
            .sqrt()
    }

    /// Minimal-image l1 distance between two sites.
    pub fn distance_l1(&self, p: Point, q: Point) -> i64 {
        self.offset(p, q).iter().map(|&d| d.abs()).sum()
    }

    /// The number of scale-`j` blocks per axis.
    pub fn blocks_per_axis(&self, j: usize) -> usize {
        self.side / self.base.pow(j as u32)
    }

    pub fn block_side(&self, j: usize) -> usize {
        self.base.pow(j as u32)
    }

    /// The scale-`j` block containing a site, as a block index.
    pub fn block_of(&self, p: Point, j: usize) -> usize {
        let bs = self.block_side(j);
        let per = self.blocks_per_axis(j);
        let c = self.coords(p);
        let mut idx = 0;
        for axis in (0..self.d).rev() {
            idx = idx * per + c[axis] / bs;
        }
        idx
    }

    pub fn block_coords(&self, block: usize, j: usize) -> SmallVec<[usize; MAX_D]> {
        let per = self.blocks_per_axis(j);
        let mut c = SmallVec::new();
        let mut rem = block;
        for _ in 0..self.d {
            c.push(rem % per);
            rem /= per;
        }
        c
    }

    pub fn block_index(&self, coords: &[usize], j: usize) -> usize {
        let per = self.blocks_per_axis(j);
        let mut idx = 0;
        for &c in coords.iter().rev() {
            idx = idx * per + c % per;
        }
        idx
    }

    pub fn n_blocks(&self, j: usize) -> usize {
        self.blocks_per_axis(j).pow(self.d as u32)
    }

    /// All sites of a scale-`j` block.
    pub fn block_sites(&self, block: usize, j: usize) -> Vec<Point> {
        let bs = self.block_side(j);
        let bc = self.block_coords(block, j);
        let mut sites = Vec::with_capacity(bs.pow(self.d as u32));
        let mut cursor: SmallVec<[usize; MAX_D]> = SmallVec::from_elem(0, self.d);
        loop {
            let coords: SmallVec<[usize; MAX_D]> = (0..self.d)
                .map(|i| bc[i] * bs + cursor[i])
                .collect();
            sites.push(self.site(&coords));
            let mut axis = 0;
            loop {
                if axis == self.d {
                    return sites;
                }
                cursor[axis] += 1;
                if cursor[axis] < bs {
                    break;
                }
                cursor[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Whether two distinct scale-`j` blocks touch, corners included.
    pub fn blocks_star_adjacent(&self, a: usize, b: usize, j: usize) -> bool {
        if a == b {
            return false;
        }
        let per = self.blocks_per_axis(j) as i64;
        let ca = self.block_coords(a, j);
        let cb = self.block_coords(b, j);
        ca.iter().zip(cb.iter()).all(|(&x, &y)| {
            let mut d = (x as i64 - y as i64).abs();
            d = d.min(per - d);
            d <= 1
        })
    }
}

/// A union of scale-`j` blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polymer {
    pub scale: usize,
    pub blocks: BTreeSet<usize>,
}

impl Polymer {
    pub fn empty(scale: usize) -> Self {
        Polymer {
            scale,
            blocks: BTreeSet::new(),
        }
    }

    pub fn single(scale: usize, block: usize) -> Self {
        let mut blocks = BTreeSet::new();
        blocks.insert(block);
        Polymer { scale, blocks }
    }

    pub fn from_blocks(scale: usize, it: impl IntoIterator<Item = usize>) -> Self {
        Polymer {
            scale,
            blocks: it.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn union(&self, other: &Polymer) -> Polymer {
        debug_assert_eq!(self.scale, other.scale);
        Polymer {
            scale: self.scale,
            blocks: self.blocks.union(&other.blocks).copied().collect(),
        }
    }

    pub fn contains_block(&self, b: usize) -> bool {
        self.blocks.contains(&b)
    }

    pub fn sites(&self, lat: &TorusLattice) -> Vec<Point> {
        let mut s = Vec::new();
        for &b in &self.blocks {
            s.extend(lat.block_sites(b, self.scale));
        }
        s
    }

    pub fn contains_site(&self, lat: &TorusLattice, p: Point) -> bool {
        self.blocks.contains(&lat.block_of(p, self.scale))
    }

    /// Connected in the *-sense (corner contacts count).
    pub fn is_connected(&self, lat: &TorusLattice) -> bool {
        if self.blocks.len() <= 1 {
            return true;
        }
        let blocks: Vec<usize> = self.blocks.iter().copied().collect();
        let mut seen = vec![false; blocks.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for k in 0..blocks.len() {
                if !seen[k] && lat.blocks_star_adjacent(blocks[i], blocks[k], self.scale) {
                    seen[k] = true;
                    count += 1;
                    stack.push(k);
                }
            }
        }
        count == blocks.len()
    }

    /// Whether this is a small set: connected with at most `2^d` blocks.
    pub fn is_small_set(&self, lat: &TorusLattice) -> bool {
        !self.is_empty() && self.len() <= 1 << lat.dim() && self.is_connected(lat)
    }
}

/// The paving of the torus by disjoint scale-`j` blocks.
pub fn block_partition(lat: &TorusLattice, j: usize) -> Result<Vec<Polymer>> {
    if j > lat.n_scales() {
        return Err(Error::ScaleRange(j, lat.n_scales()));
    }
    Ok((0..lat.n_blocks(j))
        .map(|b| Polymer::single(j, b))
        .collect())
}

/// *-graph distance from each block to the polymer `x`, capped at `cap`.
fn star_distances(lat: &TorusLattice, x: &Polymer, cap: usize) -> Vec<usize> {
    let n = lat.n_blocks(x.scale);
    let mut dist = vec![usize::MAX; n];
    let mut frontier: Vec<usize> = x.blocks.iter().copied().collect();
    for &b in &frontier {
        dist[b] = 0;
    }
    let mut level = 0;
    while !frontier.is_empty() && level < cap {
        level += 1;
        let mut next = Vec::new();
        for b in 0..n {
            if dist[b] != usize::MAX {
                continue;
            }
            if frontier.iter().any(|&f| lat.blocks_star_adjacent(f, b, x.scale)) {
                dist[b] = level;
                next.push(b);
            }
        }
        frontier = next;
    }
    dist
}

/// The small set neighbourhood: the union of all small sets meeting `x`.
///
/// A block lies in the neighbourhood exactly when its *-graph distance
/// to `x` is at most `2^d - 1`, since a connected polymer of `k` blocks
/// joining it to `x` is a path of length at most `k - 1`.
pub fn small_set_neighbourhood(lat: &TorusLattice, x: &Polymer) -> Polymer {
    if x.is_empty() {
        return Polymer::empty(x.scale);
    }
    let reach = (1 << lat.dim()) - 1;
    let dist = star_distances(lat, x, reach);
    Polymer::from_blocks(
        x.scale,
        (0..lat.n_blocks(x.scale)).filter(|&b| dist[b] <= reach),
    )
}

/// The smallest scale-`(j+1)` polymer containing `x`.
pub fn closure(lat: &TorusLattice, x: &Polymer) -> Result<Polymer> {
    let j = x.scale;
    if j + 1 > lat.n_scales() {
        return Err(Error::ScaleRange(j + 1, lat.n_scales()));
    }
    let mut blocks = BTreeSet::new();
    for &b in &x.blocks {
        // any site of the block determines the coarser block
        let site = lat.block_sites(b, j)[0];
        blocks.insert(lat.block_of(site, j + 1));
    }
    Ok(Polymer {
        scale: j + 1,
        blocks,
    })
}

/// Enumerate all small sets at scale `j` (connected, at most `2^d` blocks).
/// Intended for desk-scale lattices only.
pub fn enumerate_small_sets(lat: &TorusLattice, j: usize) -> Vec<Polymer> {
    let n = lat.n_blocks(j);
    let max = 1 << lat.dim();
    let mut out: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    // grow connected sets from each seed block
    let mut frontier: Vec<BTreeSet<usize>> = (0..n)
        .map(|b| {
            let mut s = BTreeSet::new();
            s.insert(b);
            s
        })
        .collect();
    for s in &frontier {
        out.insert(s.clone());
    }
    for _ in 1..max {
        let mut next = Vec::new();
        for s in &frontier {
            for cand in 0..n {
                if s.contains(&cand) {
                    continue;
                }
                if s.iter().any(|&b| lat.blocks_star_adjacent(b, cand, j)) {
                    let mut t = s.clone();
                    t.insert(cand);
                    if out.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        frontier = next;
    }
    out.into_iter()
        .map(|blocks| Polymer { scale: j, blocks })
        .collect()
}

/// A multi-index over the `2d` signed unit directions.
///
/// Entry `k < d` counts applications of the forward difference along
/// `+e_k`; entry `d + k` counts the backward direction `-e_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub SmallVec<[u8; 2 * MAX_D]>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, 2 * d))
    }

    pub fn unit(d: usize, axis: usize, forward: bool) -> Self {
        let mut m = Self::zero(d);
        let k = if forward { axis } else { d + axis };
        m.0[k] = 1;
        m
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.0.len(), other.0.len());
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn bump(&self, axis: usize, forward: bool) -> MultiIndex {
        let mut m = self.clone();
        let d = m.dim();
        let k = if forward { axis } else { d + axis };
        m.0[k] += 1;
        m
    }

    /// Signed directions with their counts: `(axis, forward, count)`.
    pub fn directions(&self) -> impl Iterator<Item = (usize, bool, u8)> + '_ {
        let d = self.dim();
        self.0.iter().enumerate().filter_map(move |(k, &c)| {
            if c == 0 {
                None
            } else if k < d {
                Some((k, true, c))
            } else {
                Some((k - d, false, c))
            }
        })
    }
}

/// Apply the forward difference along a signed direction to a field:
/// `(∇^e f)_x = f_{x+e} - f_x`.
pub fn forward_difference(lat: &TorusLattice, f: &[f64], axis: usize, fwd: bool) -> Vec<f64> {
    let step = if fwd { 1 } else { -1 };
    lat.sites()
        .map(|p| f[shift_site(lat, p, axis, step)] - f[p])
        .collect()
}

/// Apply `∇^α` for a full multi-index.
pub fn finite_difference(lat: &TorusLattice, f: &[f64], alpha: &MultiIndex) -> Vec<f64> {
    let mut g = f.to_vec();
    for (axis, fwd, count) in alpha.directions() {
        for _ in 0..count {
            g = forward_difference(lat, &g, axis, fwd);
        }
    }
    g
}

/// The lattice Laplacian `Δ = -1/2 Σ_{e∈U} ∇^{-e} ∇^{e}`.
pub fn laplacian(lat: &TorusLattice, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for p in lat.sites() {
        let mut acc = 0.0;
        for axis in 0..lat.dim() {
            acc += f[shift_site(lat, p, axis, 1)] + f[shift_site(lat, p, axis, -1)]
                - 2.0 * f[p];
        }
        out[p] = acc;
    }
    out
}

/// Shift a site along an axis by a signed number of steps.
pub fn shift_site(lat: &TorusLattice, p: Point, axis: usize, steps: i64) -> Point {
    let side = lat.side();
    let stride = side.pow(axis as u32);
    let c = (p / stride) % side;
    let c2 = (c as i64 + steps).rem_euclid(side as i64) as usize;
    p - c * stride + c2 * stride
}

/// The coalescence scale `⌊log_L(2|a-b|)⌋` (minimal-image Euclidean).
pub fn coalescence_scale(lat: &TorusLattice, a: Point, b: Point) -> Result<usize> {
    if a == b {
        return Err(Error::CoalescenceUndefined);
    }
    let r = 2.0 * lat.distance(a, b);
    Ok(r.log(lat.base() as f64).floor().max(0.0) as usize)
}
