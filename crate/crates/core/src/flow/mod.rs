//! Scale-indexed flow objects: the nonlocal second-order correction
//! `W_j`, the localised bilinear `P_j`, the renormalised interaction
//! couplings, the final-scale constructions, interactions and their
//! perturbative remainders, and the recursion for the running
//! coupling.

pub mod final_scale;
pub mod gbar;
pub mod series_objects;
pub mod wp;

pub use final_scale::{final_scale, FinalScaleData};
pub use gbar::gbar_flow;
pub use series_objects::*;
pub use wp::*;

use crate::covariance::{CovarianceSource, Decomposition, KernelStencil, MapCovariance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Access to the covariance slices `C_j` and their accumulations
/// `w_j = Σ_{i<=j} C_i` for a flow.
pub trait CovarianceFamily<S: Scalar> {
    /// Number of scales `N` of the torus this family belongs to.
    fn n_scales(&self) -> usize;
    /// `C_j` for `1 <= j <= n_kernels` (which may exceed `N - 1` when
    /// kernels beyond the final scale were built).
    fn c(&self, j: usize) -> Result<&dyn CovarianceSource<S>>;
    /// `w_j` for `0 <= j <= n_kernels`.
    fn w(&self, j: usize) -> Result<&dyn CovarianceSource<S>>;
    /// The torus remainder `C_{N,N}`, when present.
    fn remainder(&self) -> Option<&dyn CovarianceSource<S>>;
}

/// Family backed by a built decomposition (float mode).
pub struct StencilFamily {
    n_scales: usize,
    kernels: Vec<KernelStencil>,
    w: Vec<KernelStencil>,
    remainder: Option<KernelStencil>,
}

impl StencilFamily {
    pub fn new(dec: &Decomposition) -> Result<Self> {
        let mut kernels = Vec::new();
        for (i, k) in dec.kernels.iter().enumerate() {
            let k = k
                .as_ref()
                .ok_or(Error::ScaleRange(i + 1, dec.n_scales))?;
            kernels.push(k.clone());
        }
        let mut w = vec![KernelStencil::zero(dec.d)];
        for k in &kernels {
            let prev = w.last().unwrap();
            w.push(prev.axpy(1.0, k));
        }
        Ok(StencilFamily {
            n_scales: dec.n_scales,
            kernels,
            w,
            remainder: dec.remainder.clone(),
        })
    }
}

impl<S: Scalar> CovarianceFamily<S> for StencilFamily {
    fn n_scales(&self) -> usize {
        self.n_scales
    }
    fn c(&self, j: usize) -> Result<&dyn CovarianceSource<S>> {
        self.kernels
            .get(j.wrapping_sub(1))
            .map(|k| k as &dyn CovarianceSource<S>)
            .ok_or(Error::ScaleRange(j, self.n_scales))
    }
    fn w(&self, j: usize) -> Result<&dyn CovarianceSource<S>> {
        self.w
            .get(j)
            .map(|k| k as &dyn CovarianceSource<S>)
            .ok_or(Error::ScaleRange(j, self.n_scales))
    }
    fn remainder(&self) -> Option<&dyn CovarianceSource<S>> {
        self.remainder
            .as_ref()
            .map(|k| k as &dyn CovarianceSource<S>)
    }
}

/// Family over explicit kernels in any coefficient ring (exact mode).
pub struct MapFamily<S: Scalar> {
    pub n_scales: usize,
    pub kernels: Vec<MapCovariance<S>>,
    pub w_sums: Vec<MapCovariance<S>>,
    pub remainder_kernel: Option<MapCovariance<S>>,
}

impl<S: Scalar> MapFamily<S> {
    pub fn new(
        n_scales: usize,
        kernels: Vec<MapCovariance<S>>,
        remainder_kernel: Option<MapCovariance<S>>,
        d: usize,
    ) -> Self {
        let mut w_sums = vec![MapCovariance::zero(d)];
        for k in &kernels {
            let prev = w_sums.last().unwrap();
            w_sums.push(prev.plus(k));
        }
        MapFamily {
            n_scales,
            kernels,
            w_sums,
            remainder_kernel,
        }
    }
}

impl<S: Scalar> CovarianceFamily<S> for MapFamily<S> {
    fn n_scales(&self) -> usize {
        self.n_scales
    }
    fn c(&self, j: usize) -> Result<&dyn CovarianceSource<S>> {
        self.kernels
            .get(j.wrapping_sub(1))
            .map(|k| k as &dyn CovarianceSource<S>)
            .ok_or(Error::ScaleRange(j, self.n_scales))
    }
    fn w(&self, j: usize) -> Result<&dyn CovarianceSource<S>> {
        self.w_sums
            .get(j)
            .map(|k| k as &dyn CovarianceSource<S>)
            .ok_or(Error::ScaleRange(j, self.n_scales))
    }
    fn remainder(&self) -> Option<&dyn CovarianceSource<S>> {
        self.remainder_kernel
            .as_ref()
            .map(|k| k as &dyn CovarianceSource<S>)
    }
}
