use crate::lattice::MultiIndex;
use serde::{Deserialize, Serialize};

/// Field species. `Phi`/`PhiBar` commute, `Psi`/`PsiBar` anticommute.
/// The external observables σ, σ̄ carry no point and live as degree
/// flags on the monomial, not as generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    Phi,
    PhiBar,
    Psi,
    PsiBar,
}

impl Species {
    pub fn is_fermion(self) -> bool {
        matches!(self, Species::Psi | Species::PsiBar)
    }

    pub fn is_barred(self) -> bool {
        matches!(self, Species::PhiBar | Species::PsiBar)
    }

    pub fn conjugate(self) -> Species {
        match self {
            Species::Phi => Species::PhiBar,
            Species::PhiBar => Species::Phi,
            Species::Psi => Species::PsiBar,
            Species::PsiBar => Species::Psi,
        }
    }
}

/// A derivative-decorated field generator `(∇^α φ^{(s)})_x`.
///
/// Decorations stay symbolic: they are never expanded into point
/// differences, so seminorm weights attach per decoration and the
/// field support of a monomial is exactly its set of points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub species: Species,
    pub point: usize,
    pub deriv: MultiIndex,
    /// Applications of the lattice Laplacian, kept atomic so the
    /// seminorm weight of `Δφ` is a single decorated factor.
    pub lap: u8,
}

impl Generator {
    pub fn new(species: Species, point: usize, deriv: MultiIndex) -> Self {
        Generator {
            species,
            point,
            deriv,
            lap: 0,
        }
    }

    pub fn with_lap(species: Species, point: usize, deriv: MultiIndex, lap: u8) -> Self {
        Generator {
            species,
            point,
            deriv,
            lap,
        }
    }

    pub fn plain(species: Species, point: usize, d: usize) -> Self {
        Generator {
            species,
            point,
            deriv: MultiIndex::zero(d),
            lap: 0,
        }
    }

    /// Total derivative order of the decoration (`Δ` counts two).
    pub fn deriv_order(&self) -> usize {
        self.deriv.order() + 2 * self.lap as usize
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.species {
            Species::Phi => "phi",
            Species::PhiBar => "phib",
            Species::Psi => "psi",
            Species::PsiBar => "psib",
        };
        if self.deriv.is_zero() && self.lap == 0 {
            write!(f, "{name}[{}]", self.point)
        } else {
            let d = self.deriv.dim();
            let mut tags = String::new();
            for (axis, fwd, count) in self.deriv.directions() {
                for _ in 0..count {
                    tags.push_str(&format!("{}{}", if fwd { '+' } else { '-' }, axis));
                }
            }
            let _ = d;
            for _ in 0..self.lap {
                tags.push('L');
            }
            write!(f, "D{{{tags}}}{name}[{}]", self.point)
        }
    }
}
