//! Criterion specifications and their evaluation in space and in time.

use crate::error::{Error, Result};
use crate::geometry::{criterion_from_flow, CriterionField, CriterionKind, FlowFields};
use crate::norms::{mixed_norm, spatial_norm, BallMask, Region, TimeWindow};
use crate::scalar::{Exponent, Real};
use crate::spectral::SpectralGrid;

/// One criterion functional measured in `L^γ` in space and `L^α` in time over a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionSpec<T> {
    pub kind: CriterionKind<T>,
    pub gamma: Exponent<T>,
    pub alpha: Exponent<T>,
    pub region: Region<T>,
}

impl<T: Real> CriterionSpec<T> {
    pub fn new(kind: CriterionKind<T>, gamma: Exponent<T>, alpha: Exponent<T>) -> Self {
        Self { kind, gamma, alpha, region: Region::Full }
    }

    pub fn on(mut self, region: Region<T>) -> Self {
        self.region = region;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        self.region.validate()?;
        for (name, e) in [("γ", self.gamma), ("α", self.alpha)] {
            if let Exponent::Finite(x) = e {
                if !(x >= T::one()) {
                    return Err(Error::InvalidParameter(format!("{name} must lie in [1, ∞], got {x}")));
                }
            }
        }
        Ok(())
    }

    /// Column label, e.g. `kappa_beta1.5_g6` or `eta_g3_cyl_r0.5_t0.5`.
    pub fn label(&self) -> String {
        let base = format!("{}_g{}", self.kind.label(), self.gamma);
        match self.region {
            Region::Full => base,
            Region::Cylinder { center, top, radius } => format!(
                "{base}_cyl_x{}_{}_{}_r{radius}_t{top}",
                center[0], center[1], center[2]
            ),
        }
    }
}

/// Computes per-sample spatial norms for a fixed list of criteria, reusing masks and fields.
pub struct CriterionEvaluator<'g, T: Real> {
    grid: &'g SpectralGrid<T>,
    specs: Vec<CriterionSpec<T>>,
    masks: Vec<Option<BallMask<T>>>,
    floor: T,
}

impl<'g, T: Real> CriterionEvaluator<'g, T> {
    pub fn new(grid: &'g SpectralGrid<T>, specs: &[CriterionSpec<T>], floor: T) -> Result<Self> {
        let mut masks = Vec::with_capacity(specs.len());
        for s in specs {
            s.validate()?;
            masks.push(s.region.mask(grid)?);
        }
        Ok(Self { grid, specs: specs.to_vec(), masks, floor })
    }

    pub fn specs(&self) -> &[CriterionSpec<T>] {
        &self.specs
    }

    pub fn mask(&self, i: usize) -> Option<&BallMask<T>> {
        self.masks[i].as_ref()
    }

    /// Spatial `L^γ` norm of every criterion at the state held by `flow`.
    pub fn spatial_norms(&self, flow: &mut FlowFields<'_, T>) -> Result<Vec<T>> {
        let mut fields: Vec<CriterionField<T>> = Vec::new();
        let mut out = Vec::with_capacity(self.specs.len());
        for (spec, mask) in self.specs.iter().zip(&self.masks) {
            let pos = match fields.iter().position(|f| f.kind == spec.kind) {
                Some(p) => p,
                None => {
                    fields.push(criterion_from_flow(flow, spec.kind, self.floor)?);
                    fields.len() - 1
                }
            };
            out.push(spatial_norm(self.grid, &fields[pos].values, spec.gamma, mask.as_ref())?);
        }
        Ok(out)
    }
}

/// Space-time norm of one criterion over its region.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedNormResult<T> {
    pub label: String,
    pub value: T,
    pub window: TimeWindow<T>,
    /// Number of samples falling inside the window.
    pub samples: usize,
    /// Lattice points in the spatial ball, for cylinder regions.
    pub mask_points: Option<usize>,
}

/// Composes a series of spatial norms `(tᵢ, ‖f(tᵢ)‖_γ)` into the mixed norm of `spec`.
///
/// A single sample is accepted only for `α = ∞`.
pub fn evaluate_mixed<T: Real>(
    spec: &CriterionSpec<T>,
    series: &[(T, T)],
    mask_points: Option<usize>,
) -> Result<MixedNormResult<T>> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::TooSparse("criterion series is empty".into())),
    };
    let window = spec.region.window(first, last)?;
    let value = if window.start == window.end {
        if !spec.alpha.is_infinite() {
            return Err(Error::TooSparse(format!(
                "L^{} time norm needs a window of positive length, got the single time {}",
                spec.alpha,
                window.start.as_f64()
            )));
        }
        series
            .iter()
            .filter(|s| s.0 == window.start)
            .map(|s| s.1)
            .fold(T::zero(), T::max)
    } else {
        mixed_norm(series, spec.alpha, (window.start, window.end))?
    };
    let samples = series.iter().filter(|s| s.0 >= window.start && s.0 <= window.end).count();
    Ok(MixedNormResult { label: spec.label(), value, window, samples, mask_points })
}
