use super::generator::{Generator, Species};
use std::collections::BTreeSet;

/// A canonical monomial: boson multiset and fermion sequence both kept
/// sorted, with the Koszul sign of the sorting absorbed into the
/// coefficient by the caller; repeated fermion generators vanish by
/// nilpotency, and the observable degrees are capped at one (σ² = 0).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub bosons: Vec<Generator>,
    pub fermions: Vec<Generator>,
    pub sigma: u8,
    pub sigma_bar: u8,
}

/// Observable sector labels for the direct sum decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Bulk,
    ObsA,
    ObsB,
    ObsAB,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.bosons.is_empty() && self.fermions.is_empty() && self.sigma == 0 && self.sigma_bar == 0
    }

    /// Total field degree (bosons plus fermions; observables excluded).
    pub fn degree(&self) -> usize {
        self.bosons.len() + self.fermions.len()
    }

    pub fn component(&self) -> Component {
        match (self.sigma, self.sigma_bar) {
            (0, 0) => Component::Bulk,
            (1, 0) => Component::ObsA,
            (0, 1) => Component::ObsB,
            _ => Component::ObsAB,
        }
    }

    /// Gauge invariance: equal counts of barred and unbarred charges,
    /// with σ counting as unbarred and σ̄ as barred.
    pub fn is_gauge_invariant(&self) -> bool {
        let mut charge: i64 = self.sigma as i64 - self.sigma_bar as i64;
        for g in self.bosons.iter().chain(self.fermions.iter()) {
            charge += if g.species.is_barred() { -1 } else { 1 };
        }
        charge == 0
    }

    /// The set of lattice points the monomial's fields touch.
    pub fn support(&self) -> BTreeSet<usize> {
        self.bosons
            .iter()
            .chain(self.fermions.iter())
            .map(|g| g.point)
            .collect()
    }

    /// Build a canonical monomial from parts, the fermions given in
    /// multiplication order. Returns the sorting sign, or `None` when
    /// a fermion generator repeats or an observable degree exceeds one.
    pub fn from_parts(
        mut bosons: Vec<Generator>,
        mut fermions: Vec<Generator>,
        sigma: u8,
        sigma_bar: u8,
    ) -> Option<(Monomial, i32)> {
        if sigma > 1 || sigma_bar > 1 {
            return None;
        }
        bosons.sort_unstable();
        // insertion sort with swap counting for the Koszul sign
        let mut sign = 1i32;
        for i in 1..fermions.len() {
            let mut k = i;
            while k > 0 && fermions[k] < fermions[k - 1] {
                fermions.swap(k, k - 1);
                sign = -sign;
                k -= 1;
            }
        }
        for w in fermions.windows(2) {
            if w[0] == w[1] {
                return None;
            }
        }
        Some((
            Monomial {
                bosons,
                fermions,
                sigma,
                sigma_bar,
            },
            sign,
        ))
    }

    /// Graded product; `None` when the result vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i32)> {
        let sigma = self.sigma + other.sigma;
        let sigma_bar = self.sigma_bar + other.sigma_bar;
        if sigma > 1 || sigma_bar > 1 {
            return None;
        }
        let mut bosons = Vec::with_capacity(self.bosons.len() + other.bosons.len());
        bosons.extend_from_slice(&self.bosons);
        bosons.extend_from_slice(&other.bosons);
        let mut fermions = Vec::with_capacity(self.fermions.len() + other.fermions.len());
        fermions.extend_from_slice(&self.fermions);
        fermions.extend_from_slice(&other.fermions);
        Monomial::from_parts(bosons, fermions, sigma, sigma_bar)
    }

    /// Apply a point map to every generator, re-canonicalising.
    pub fn map_points<F: Fn(usize) -> usize>(&self, f: F) -> Option<(Monomial, i32)> {
        let bosons = self
            .bosons
            .iter()
            .map(|g| Generator::with_lap(g.species, f(g.point), g.deriv.clone(), g.lap))
            .collect();
        let fermions = self
            .fermions
            .iter()
            .map(|g| Generator::with_lap(g.species, f(g.point), g.deriv.clone(), g.lap))
            .collect();
        Monomial::from_parts(bosons, fermions, self.sigma, self.sigma_bar)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.sigma == 1 {
            parts.push("sigma".into());
        }
        if self.sigma_bar == 1 {
            parts.push("sigmab".into());
        }
        for g in &self.bosons {
            parts.push(g.to_string());
        }
        for g in &self.fermions {
            parts.push(g.to_string());
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl Monomial {
    /// Degree counted per species kind, `(boson, fermion)`.
    pub fn degrees(&self) -> (usize, usize) {
        (self.bosons.len(), self.fermions.len())
    }

    pub fn species_count(&self, s: Species) -> usize {
        self.bosons
            .iter()
            .chain(self.fermions.iter())
            .filter(|g| g.species == s)
            .count()
    }
}
