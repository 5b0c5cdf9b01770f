use crate::criterion::{evaluate_mixed, MixedNormResult};
use crate::error::{Error, Result};
use crate::geometry::CriterionKind;
use crate::norms::cylinder_mask;
use crate::norms::Region;
use crate::scalar::{Exponent, Real};
use crate::solver::Trajectory;
use crate::spectral::SpectralGrid;

#[derive(Clone, Debug, PartialEq)]
pub struct SmallnessReport<T> {
    pub norm: MixedNormResult<T>,
    pub epsilon: T,
    /// `norm ≤ ε`.
    pub small: bool,
}

/// Spatial exponent of the smallness form of `kind`: 3 for κ_β and κ, `3/b` for the weighted κ.
pub fn smallness_gamma<T: Real>(kind: &CriterionKind<T>) -> Result<T> {
    match *kind {
        CriterionKind::KappaBeta { .. } | CriterionKind::Kappa => Ok(T::lit(3.0)),
        CriterionKind::WeightedKappa { b } => Ok(T::lit(3.0) / b),
        CriterionKind::Eta => Err(Error::InvalidParameter("η has no smallness form".into())),
    }
}

/// Mixed norm of the recorded criterion `index` over its region, compared with `epsilon`.
///
/// The criterion must be in smallness form: `α = ∞` and `γ` as given by [`smallness_gamma`].
pub fn smallness_monitor<T: Real>(
    grid: &SpectralGrid<T>,
    trajectory: &Trajectory<T>,
    index: usize,
    epsilon: T,
) -> Result<SmallnessReport<T>> {
    let spec = trajectory
        .criteria
        .get(index)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion with index {index}")))?;
    let want = smallness_gamma(&spec.kind)?;
    let gamma_ok = matches!(spec.gamma, Exponent::Finite(g) if (g - want).abs() <= T::lit(1e-12) * want);
    if !gamma_ok || !spec.alpha.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "{} is not in smallness form (γ = {}, α = inf)",
            spec.label(),
            want
        )));
    }
    let mask_points = match spec.region {
        Region::Full => None,
        Region::Cylinder { center, radius, .. } => Some(cylinder_mask(grid, center, radius)?.count()),
    };
    let norm = evaluate_mixed(spec, &trajectory.criterion_series(index), mask_points)?;
    let small = norm.value <= epsilon;
    Ok(SmallnessReport { norm, epsilon, small })
}
