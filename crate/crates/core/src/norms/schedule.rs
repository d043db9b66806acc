//! Per-scale norm weights and the global constants of the analysis.

use serde::{Deserialize, Serialize};

/// Which field weight a norm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HChoice {
    /// `ℓ_j`: the fluctuation-sized weight.
    Ell,
    /// `h_j`: the large-field weight built from the coupling size.
    H,
}

/// The scale-indexed weights and the constants they are built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleSchedule {
    pub d: usize,
    pub base: usize,
    /// `ℓ_0`, the overall fluctuation weight constant.
    pub ell0: f64,
    /// `k_0`, the overall large-field weight constant.
    pub k0: f64,
    /// Test-function smoothness order.
    pub p_phi: usize,
    /// Algebra degree cap.
    pub p_n: usize,
    /// Decay ratio for the `χ` sequence.
    pub omega: f64,
    /// Domain radius constant.
    pub c_d: f64,
    /// Coalescence scale of the observable pair.
    pub j_ab: usize,
    /// The coupling-size sequence `g̃_j` (indexed by scale).
    pub g_tilde: Vec<f64>,
    /// `ℓ̂_0²` entering the integration weight `ℓ̂_j`.
    pub ell_hat0_sq: f64,
}

impl ScaleSchedule {
    pub fn new(d: usize, base: usize, j_ab: usize, g_tilde: Vec<f64>) -> Self {
        ScaleSchedule {
            d,
            base,
            ell0: 1.0,
            k0: 0.4,
            p_phi: 4,
            p_n: 10,
            omega: 2.0,
            c_d: 4.0,
            j_ab,
            g_tilde,
            ell_hat0_sq: 1.0,
        }
    }

    pub fn field_dim(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }

    pub fn g_tilde_at(&self, j: usize) -> f64 {
        self.g_tilde
            .get(j)
            .or(self.g_tilde.last())
            .copied()
            .unwrap_or(1e-3)
    }

    /// `ℓ_j = ℓ_0 L^{-j[φ]}`.
    pub fn ell(&self, j: usize) -> f64 {
        self.ell0 * (self.base as f64).powf(-(j as f64) * self.field_dim())
    }

    /// `h_j = k_0 g̃_j^{-1/4} L^{-jd/4}`.
    pub fn h(&self, j: usize) -> f64 {
        self.k0
            * self.g_tilde_at(j).powf(-0.25)
            * (self.base as f64).powf(-(j as f64) * self.d as f64 / 4.0)
    }

    pub fn field_weight(&self, j: usize, choice: HChoice) -> f64 {
        match choice {
            HChoice::Ell => self.ell(j),
            HChoice::H => self.h(j),
        }
    }

    /// The observable weight: `g̃_j` (or `g̃_j^{1/4}` for the
    /// large-field choice) times `L^{(j ∧ j_ab)[φ]} 2^{(j - j_ab)_+}`.
    pub fn h_sigma(&self, j: usize, choice: HChoice) -> f64 {
        let g = self.g_tilde_at(j);
        let prefactor = match choice {
            HChoice::Ell => g,
            HChoice::H => g.powf(0.25),
        };
        let jmin = j.min(self.j_ab) as f64;
        let excess = j.saturating_sub(self.j_ab) as f64;
        prefactor * (self.base as f64).powf(jmin * self.field_dim()) * 2.0f64.powf(excess)
    }

    /// The integration weight `ℓ̂_j² = ℓ̂_0² ℓ_j² ‖C_{(j+1)*}‖`, with the
    /// kernel norm supplied by the caller.
    pub fn ell_hat(&self, j: usize, c_norm_next: f64) -> f64 {
        (self.ell_hat0_sq * self.ell(j) * self.ell(j) * c_norm_next).sqrt()
    }

    /// `ε̄_j`: `χ_j^{1/2} g̃_j` for the fluctuation weight and
    /// `χ_j^{1/2} g̃_j^{1/4}` for the large-field weight.
    pub fn eps_bar(&self, j: usize, chi_j: f64, choice: HChoice) -> f64 {
        match choice {
            HChoice::Ell => chi_j.sqrt() * self.g_tilde_at(j),
            HChoice::H => chi_j.sqrt() * self.g_tilde_at(j).powf(0.25),
        }
    }

    /// The weight-ratio assumptions behind the scale-change
    /// monotonicity (checked, not assumed).
    pub fn ratio_assumptions_hold(&self, j: usize) -> bool {
        let lfd = (self.base as f64).powf(self.field_dim());
        for choice in [HChoice::Ell, HChoice::H] {
            let h_j = self.field_weight(j, choice);
            let h_next = self.field_weight(j + 1, choice);
            if h_j < self.ell(j) - 1e-12 {
                return false;
            }
            if h_next / h_j * lfd > 2.0 + 1e-12 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_scale_correctly() {
        let s = ScaleSchedule::new(4, 2, 5, vec![1e-3]);
        assert!((s.ell(0) - 1.0).abs() < 1e-15);
        // [φ] = 1 at d = 4
        assert!((s.ell(3) - 0.125).abs() < 1e-15);
        // h_j / ℓ_j = (k0/ℓ0) g̃^{-1/4} at d = 4 (both decay like L^{-j})
        let r0 = s.h(0) / s.ell(0);
        let r5 = s.h(5) / s.ell(5);
        assert!((r0 - r5).abs() < 1e-12);
        assert!(s.h(2) >= s.ell(2));
        assert!(s.ratio_assumptions_hold(3));
    }

    #[test]
    fn sigma_weight_switches_at_coalescence() {
        let s = ScaleSchedule::new(4, 2, 3, vec![1e-2]);
        // below the coalescence scale the weight grows like L^{[φ]j}
        let r_below = s.h_sigma(2, HChoice::Ell) / s.h_sigma(1, HChoice::Ell);
        assert!((r_below - 2.0).abs() < 1e-12);
        // above, it grows like 2 per scale
        let r_above = s.h_sigma(6, HChoice::Ell) / s.h_sigma(5, HChoice::Ell);
        assert!((r_above - 2.0).abs() < 1e-12);
        // and the switch freezes the L power
        assert!((s.h_sigma(3, HChoice::Ell) - 1e-2 * 8.0).abs() < 1e-12);
    }
}
