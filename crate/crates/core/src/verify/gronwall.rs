use crate::error::{Error, Result};
use crate::geometry::CriterionKind;
use crate::norms::{cumulative_trapezoid, Region};
use crate::scalar::{Exponent, Real};
use crate::solver::Trajectory;
use crate::verify::exponents::time_exponent;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallSample<T> {
    pub time: T,
    /// `‖Λ^{β/2}v(t)‖²`.
    pub energy: T,
    /// `∫₀ᵗ ‖κ_β‖_γ^{2γ/(γ−3)}`.
    pub accumulated: T,
    /// `‖v₀‖²_{H^{β/2}} exp(C · accumulated)` for the supplied constant.
    pub envelope: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallReport<T> {
    pub beta: T,
    pub gamma: Exponent<T>,
    pub time_exponent: T,
    /// `‖v₀‖²_{L²} + ‖Λ^{β/2}v₀‖²`.
    pub initial_norm: T,
    pub constant: T,
    pub samples: Vec<GronwallSample<T>>,
    /// Smallest `C` for which the envelope holds at every sample; `None` when no
    /// finite constant works (growth while the accumulated criterion is still zero).
    pub minimal_constant: Option<T>,
    /// True when the energy never exceeds the initial norm, so any `C ≥ 0` works.
    pub trivially_bounded: bool,
    pub holds: bool,
}

/// Envelope check from raw series: `energy[i] = ‖Λ^{β/2}v(tᵢ)‖²`, `criterion[i] = ‖κ_β(tᵢ)‖_γ`.
pub fn gronwall_from_series<T: Real>(
    times: &[T],
    energy: &[T],
    criterion: &[T],
    initial_norm: T,
    beta: T,
    gamma: Exponent<T>,
    constant: T,
) -> Result<GronwallReport<T>> {
    if times.len() != energy.len() || times.len() != criterion.len() {
        return Err(Error::InvalidParameter("series lengths differ".into()));
    }
    if times.is_empty() {
        return Err(Error::TooSparse("Gronwall envelope needs at least one sample".into()));
    }
    if !(initial_norm > T::zero()) {
        return Err(Error::Degenerate("initial H^{β/2} norm is zero".into()));
    }
    let q = time_exponent(&gamma)?;
    let integrand: Vec<(T, T)> = times.iter().zip(criterion).map(|(&t, &k)| (t, k.powf(q))).collect();
    let accumulated = cumulative_trapezoid(&integrand);
    let rel = T::lit(1e-12);
    let mut minimal = Some(T::zero());
    let mut trivially_bounded = true;
    for (&x, &m) in energy.iter().zip(&accumulated) {
        if x <= initial_norm * (T::one() + rel) {
            continue;
        }
        trivially_bounded = false;
        if m > T::zero() {
            let c = (x / initial_norm).ln() / m;
            minimal = minimal.map(|b| b.max(c));
        } else {
            minimal = None;
        }
    }
    let samples: Vec<GronwallSample<T>> = times
        .iter()
        .zip(energy)
        .zip(&accumulated)
        .map(|((&time, &e), &m)| GronwallSample {
            time,
            energy: e,
            accumulated: m,
            envelope: initial_norm * (constant * m).exp(),
        })
        .collect();
    let holds = samples.iter().all(|s| s.energy <= s.envelope * (T::one() + rel));
    Ok(GronwallReport {
        beta,
        gamma,
        time_exponent: q,
        initial_norm,
        constant,
        samples,
        minimal_constant: minimal,
        trivially_bounded,
        holds,
    })
}

/// Gronwall envelope along a trajectory that recorded `E_β` and the full-slab `‖κ_β‖_γ`.
pub fn gronwall_envelope<T: Real>(
    trajectory: &Trajectory<T>,
    gamma: Exponent<T>,
    beta: T,
    constant: T,
) -> Result<GronwallReport<T>> {
    let bi = trajectory
        .beta_index(beta)
        .ok_or_else(|| Error::InvalidParameter(format!("trajectory lacks energy terms for β = {beta}")))?;
    let ci = trajectory
        .criteria
        .iter()
        .position(|c| c.kind == CriterionKind::KappaBeta { beta } && c.gamma == gamma && c.region == Region::Full)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("trajectory lacks a full-slab κ_β criterion with β = {beta}, γ = {gamma}"))
        })?;
    let first = trajectory
        .samples
        .first()
        .ok_or_else(|| Error::TooSparse("empty trajectory".into()))?;
    let two = T::lit(2.0);
    let initial_norm = two * first.diagnostics.kinetic_energy + two * first.diagnostics.beta_terms[bi].energy;
    let times = trajectory.times();
    let energy: Vec<T> = trajectory.samples.iter().map(|s| two * s.diagnostics.beta_terms[bi].energy).collect();
    let criterion: Vec<T> = trajectory.samples.iter().map(|s| s.diagnostics.criterion_norms[ci]).collect();
    gronwall_from_series(&times, &energy, &criterion, initial_norm, beta, gamma, constant)
}
