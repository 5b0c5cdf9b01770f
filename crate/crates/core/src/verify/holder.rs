//! The Hölder and Young steps that bound the production term by the κ_β criterion.

use crate::error::{Error, Result};
use crate::geometry::{criterion_from_flow, CriterionKind, FlowFields};
use crate::norms::spatial_norm;
use crate::scalar::{Exponent, Real};
use crate::solver::{beta_terms, Trajectory};
use crate::spectral::{norm3, ScalarField, SpectralGrid};
use crate::verify::exponents::{combined_powers, pq_exponents, young_exponents};

/// Relative round-off allowance for inequalities that can hold with equality.
pub const ROUNDOFF_SLACK: f64 = 1e-12;

/// Hölder and Young quantities at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderSample<T> {
    pub time: T,
    pub p: T,
    pub q: T,
    /// `∫ κ_β |ω| |Λ^βv|` by lattice quadrature.
    pub triple_integral: T,
    /// `‖κ_β‖_γ ‖ω‖_p ‖Λ^βv‖_q`.
    pub holder_bound: T,
    /// `∫ (v × ω)·Λ^βv`.
    pub production: T,
    /// `∫ |v||ω||Λ^βv|` over points where a direction was floored to zero.
    pub floor_allowance: T,
    /// `‖κ_β‖_γ ‖Λ^{β/2}v‖^{(γ−3)/γ} ‖∇Λ^{β/2}v‖^{(γ+3)/γ}`.
    pub young_lhs: T,
    /// `½‖∇Λ^{β/2}v‖² + ‖κ_β‖_γ^Q ‖Λ^{β/2}v‖² / (Q λ^Q)` with `λ = (P/2)^{1/P}`.
    pub young_rhs: T,
}

impl<T: Real> HolderSample<T> {
    /// `bound − integral`; nonnegative by Hölder's inequality for lattice sums.
    pub fn holder_margin(&self) -> T {
        self.holder_bound - self.triple_integral
    }

    /// `integral + allowance − production`; nonnegative because the integrand is dominated pointwise.
    pub fn production_margin(&self) -> T {
        self.triple_integral + self.floor_allowance - self.production
    }

    pub fn young_margin(&self) -> T {
        self.young_rhs - self.young_lhs
    }

    fn slack(x: T) -> T {
        T::lit(ROUNDOFF_SLACK) * x.abs()
    }

    /// All three inequalities hold up to [`ROUNDOFF_SLACK`] relative round-off.
    pub fn holds(&self) -> bool {
        self.holder_margin() >= -Self::slack(self.holder_bound)
            && self.production_margin() >= -Self::slack(self.triple_integral + self.floor_allowance)
            && self.young_margin() >= -Self::slack(self.young_rhs)
    }
}

/// Three-factor Hölder check on the lattice: `Σ|fgh|Δx³ ≤ ‖f‖_a ‖g‖_b ‖h‖_c` with `1/a + 1/b + 1/c = 1`.
/// Returns `(left, right)`.
pub fn lattice_holder<T: Real>(
    grid: &SpectralGrid<T>,
    f: [&ScalarField<T>; 3],
    exponents: [Exponent<T>; 3],
) -> Result<(T, T)> {
    let total: T = exponents
        .iter()
        .map(|e| e.finite().map_or(T::zero(), |x| T::one() / x))
        .fold(T::zero(), |a, b| a + b);
    if (total - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::InvalidParameter(format!("Hölder exponents must have reciprocals summing to 1, got {total}")));
    }
    let mut lhs = T::zero();
    for i in 0..f[0].values().len() {
        lhs = lhs + (f[0].values()[i] * f[1].values()[i] * f[2].values()[i]).abs();
    }
    lhs = lhs * grid.cell_volume();
    let mut rhs = T::one();
    for (g, e) in f.iter().zip(exponents) {
        rhs = rhs * spatial_norm(grid, g, e, None)?;
    }
    Ok((lhs, rhs))
}

/// Young's split of the combined interpolation bound.
/// Returns `(k a^{(γ−3)/γ} d^{(γ+3)/γ}, ½d² + k^Q a² / (Q λ^Q))`.
pub fn young_split<T: Real>(gamma: Exponent<T>, criterion_norm: T, energy_norm: T, dissipation_norm: T) -> Result<(T, T)> {
    let (pa, pd) = combined_powers(&gamma);
    let (big_p, big_q) = young_exponents(&gamma)?;
    let lambda = (big_p / T::lit(2.0)).powf(T::one() / big_p);
    let lhs = criterion_norm * energy_norm.powf(pa) * dissipation_norm.powf(pd);
    let rhs = dissipation_norm * dissipation_norm / T::lit(2.0)
        + criterion_norm.powf(big_q) * energy_norm * energy_norm / (big_q * lambda.powf(big_q));
    Ok((lhs, rhs))
}

/// Evaluates the Hölder/Young chain for one flow state.
pub fn holder_at<T: Real>(
    flow: &mut FlowFields<'_, T>,
    time: T,
    beta: T,
    gamma: Exponent<T>,
    floor: T,
) -> Result<HolderSample<T>> {
    let (p, q) = pq_exponents(&gamma, &beta)?;
    let grid = flow.grid();
    let kappa = criterion_from_flow(flow, CriterionKind::KappaBeta { beta }, floor)?;
    let terms = beta_terms(flow, beta)?;
    let lv = flow.lambda_velocity(beta).expect("prepared by beta_terms");
    let (v, w) = (flow.velocity(), flow.vorticity());
    let w_mag = w.magnitude();
    let lv_mag = lv.magnitude();
    let (w_cut, l_cut) = (floor * w.max_magnitude(), floor * lv.max_magnitude());

    let (lhs, holder_bound) = lattice_holder(
        grid,
        [&kappa.values, &w_mag, &lv_mag],
        [gamma, Exponent::Finite(p), Exponent::Finite(q)],
    )?;
    let mut allowance = T::zero();
    for idx in 0..v.len() {
        let (wm, lm) = (w_mag.values()[idx], lv_mag.values()[idx]);
        if wm <= w_cut || lm <= l_cut {
            allowance = allowance + norm3(v.get(idx)) * wm * lm;
        }
    }
    allowance = allowance * grid.cell_volume();

    let k_norm = spatial_norm(grid, &kappa.values, gamma, None)?;
    let a = (T::lit(2.0) * terms.energy).sqrt();
    let d = terms.dissipation.sqrt();
    let (young_lhs, young_rhs) = young_split(gamma, k_norm, a, d)?;
    Ok(HolderSample {
        time,
        p,
        q,
        triple_integral: lhs,
        holder_bound,
        production: terms.production,
        floor_allowance: allowance,
        young_lhs,
        young_rhs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport<T> {
    pub beta: T,
    pub gamma: Exponent<T>,
    pub samples: Vec<HolderSample<T>>,
    /// Smallest Hölder margin relative to its bound.
    pub min_relative_margin: T,
    pub holds: bool,
}

/// Runs [`holder_at`] on every stored snapshot of a trajectory.
pub fn holder_triple_check<T: Real>(
    grid: &SpectralGrid<T>,
    trajectory: &Trajectory<T>,
    beta: T,
    gamma: Exponent<T>,
    floor: T,
) -> Result<HolderReport<T>> {
    let mut samples = Vec::new();
    for (t, v) in trajectory.snapshots() {
        let mut flow = FlowFields::new(grid, v)?;
        samples.push(holder_at(&mut flow, t, beta, gamma, floor)?);
    }
    if samples.is_empty() {
        return Err(Error::TooSparse("Hölder check needs at least one stored snapshot".into()));
    }
    Ok(summarize(beta, gamma, samples))
}

pub fn summarize<T: Real>(beta: T, gamma: Exponent<T>, samples: Vec<HolderSample<T>>) -> HolderReport<T> {
    let min_relative_margin = samples
        .iter()
        .map(|s| if s.holder_bound > T::zero() { s.holder_margin() / s.holder_bound } else { T::zero() })
        .fold(T::infinity(), T::min);
    let holds = samples.iter().all(HolderSample::holds);
    HolderReport { beta, gamma, samples, min_relative_margin, holds }
}
