//! Time integration of the rotational-form equations and trajectory bookkeeping.

pub mod initial;
mod integrator;
mod pressure;
pub mod snapshot;

pub use integrator::{nonlinear_rotational, step, Integrator, Step};
pub use pressure::pressure_from_velocity;


use crate::criterion::{CriterionEvaluator, CriterionSpec};
use crate::error::{Error, Result};
use crate::geometry::{FlowFields, DEFAULT_DIRECTION_FLOOR};
use crate::scalar::Real;
use crate::spectral::{cross, dot, SpectralGrid, VectorSpectrum};

/// Initial velocity selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition<T> {
    TaylorGreen { amplitude: T },
    Abc { a: T, b: T, c: T },
    Random { slope: T, seed: u64, amplitude: T },
    Zero,
}

impl<T: Real> InitialCondition<T> {
    pub fn build(&self, grid: &SpectralGrid<T>) -> Result<VectorSpectrum<T>> {
        match *self {
            InitialCondition::TaylorGreen { amplitude } => initial::taylor_green(grid, amplitude),
            InitialCondition::Abc { a, b, c } => initial::abc(grid, a, b, c),
            InitialCondition::Random { slope, seed, amplitude } => initial::random_divfree(grid, slope, seed, amplitude),
            InitialCondition::Zero => Ok(initial::zero(grid)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub n: usize,
    pub dt: T,
    pub t_end: T,
    pub viscosity: T,
    pub cfl_limit: T,
    /// Keep the full velocity every `snapshot_stride` steps.
    pub snapshot_stride: usize,
    /// Record scalar diagnostics every `diagnostic_stride` steps.
    pub diagnostic_stride: usize,
    /// Abort when the maximum speed exceeds this value.
    pub max_velocity: T,
    /// Abort when the energy fraction in the outer third of the dealiased band exceeds this value.
    pub tail_fraction_limit: T,
    pub initial: InitialCondition<T>,
    /// Exponents β at which `E_β`, `D_β`, `T_β` are recorded.
    pub diagnostic_betas: Vec<T>,
    pub criteria: Vec<CriterionSpec<T>>,
    pub direction_floor: T,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(n: usize, dt: T, t_end: T, initial: InitialCondition<T>) -> Self {
        Self {
            n,
            dt,
            t_end,
            viscosity: T::one(),
            cfl_limit: T::lit(0.5),
            snapshot_stride: 1,
            diagnostic_stride: 1,
            max_velocity: T::lit(1e3),
            tail_fraction_limit: T::lit(1e-6),
            initial,
            diagnostic_betas: Vec::new(),
            criteria: Vec::new(),
            direction_floor: T::lit(DEFAULT_DIRECTION_FLOOR),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_end > T::zero() && self.t_end.is_finite()) {
            return bad(format!("end time must be > 0, got {}", self.t_end));
        }
        if self.snapshot_stride == 0 || self.diagnostic_stride == 0 {
            return bad("strides must be ≥ 1".into());
        }
        if !(self.viscosity >= T::zero()) {
            return bad(format!("viscosity must be ≥ 0, got {}", self.viscosity));
        }
        if !(self.cfl_limit > T::zero()) {
            return bad(format!("cfl_limit must be > 0, got {}", self.cfl_limit));
        }
        if !(self.max_velocity > T::zero()) || !(self.tail_fraction_limit > T::zero()) {
            return bad("guards must be > 0".into());
        }
        if let Some(b) = self.diagnostic_betas.iter().find(|b| !(**b >= T::zero() && **b <= T::lit(4.0))) {
            return bad(format!("diagnostic β must lie in [0, 4], got {b}"));
        }
        for c in &self.criteria {
            c.validate()?;
        }
        if !(self.direction_floor >= T::zero()) {
            return bad(format!("direction floor must be ≥ 0, got {}", self.direction_floor));
        }
        if self.n < 8 || self.n % 2 != 0 {
            return Err(Error::InvalidResolution(self.n));
        }
        Ok(())
    }

    /// Number of steps, `t_end / dt` rounded to the nearest integer (at least one).
    pub fn step_count(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(1).max(1)
    }
}

/// Energy-identity terms at one instant for one exponent β.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaTerms<T> {
    pub beta: T,
    /// `½‖Λ^{β/2}v‖²`.
    pub energy: T,
    /// `‖∇Λ^{β/2}v‖² = ‖Λ^{1+β/2}v‖²`.
    pub dissipation: T,
    /// `∫(v × ω)·Λ^βv` by lattice quadrature.
    pub production: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics<T> {
    /// `½‖v‖²`.
    pub kinetic_energy: T,
    /// `‖ω‖²`.
    pub enstrophy: T,
    pub max_speed: T,
    pub tail_fraction: T,
    pub divergence_ratio: T,
    pub beta_terms: Vec<BetaTerms<T>>,
    /// Spatial norm of each configured criterion, in configuration order.
    pub criterion_norms: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct Sample<T> {
    pub step: usize,
    pub time: T,
    pub diagnostics: Diagnostics<T>,
    pub velocity: Option<VectorSpectrum<T>>,
}

/// Time-ordered samples of one run.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub n: usize,
    pub viscosity: T,
    pub betas: Vec<T>,
    pub criteria: Vec<CriterionSpec<T>>,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.time).collect()
    }

    /// `(t, f(sample))` for every sample.
    pub fn series(&self, f: impl Fn(&Diagnostics<T>) -> T) -> Vec<(T, T)> {
        self.samples.iter().map(|s| (s.time, f(&s.diagnostics))).collect()
    }

    pub fn beta_index(&self, beta: T) -> Option<usize> {
        self.betas.iter().position(|&b| b == beta)
    }

    /// Energy-identity terms for `beta` at every sample.
    pub fn beta_series(&self, beta: T) -> Result<Vec<(T, BetaTerms<T>)>> {
        let i = self
            .beta_index(beta)
            .ok_or_else(|| Error::InvalidParameter(format!("β = {beta} was not recorded")))?;
        Ok(self.samples.iter().map(|s| (s.time, s.diagnostics.beta_terms[i])).collect())
    }

    pub fn criterion_series(&self, index: usize) -> Vec<(T, T)> {
        self.series(|d| d.criterion_norms[index])
    }

    /// Samples that carry a velocity field.
    pub fn snapshots(&self) -> impl Iterator<Item = (T, &VectorSpectrum<T>)> {
        self.samples.iter().filter_map(|s| s.velocity.as_ref().map(|v| (s.time, v)))
    }

    /// Rebuilds a trajectory, with every diagnostic recomputed, from stored velocity snapshots.
    pub fn from_snapshots(
        grid: &SpectralGrid<T>,
        snapshots: Vec<(T, VectorSpectrum<T>)>,
        viscosity: T,
        betas: &[T],
        criteria: &[CriterionSpec<T>],
        floor: T,
    ) -> Result<Self> {
        let evaluator = CriterionEvaluator::new(grid, criteria, floor)?;
        let mut samples = Vec::with_capacity(snapshots.len());
        let mut last: Option<T> = None;
        for (i, (t, v)) in snapshots.into_iter().enumerate() {
            if last.is_some_and(|l| !(t > l)) {
                return Err(Error::Format(format!("snapshot times must increase strictly, got {t} after {}", last.unwrap())));
            }
            last = Some(t);
            if v.n() != grid.n() {
                return Err(Error::SizeMismatch { expected: grid.n(), found: v.n() });
            }
            let diagnostics = compute_diagnostics(grid, &v, betas, &evaluator)?;
            samples.push(Sample { step: i, time: t, diagnostics, velocity: Some(v) });
        }
        Ok(Self { n: grid.n(), viscosity, betas: betas.to_vec(), criteria: criteria.to_vec(), samples })
    }
}

/// `(E_β, D_β, T_β)` from prepared flow fields.
pub fn beta_terms<T: Real>(flow: &mut FlowFields<'_, T>, beta: T) -> Result<BetaTerms<T>> {
    let grid = flow.grid();
    let v = flow.velocity_hat();
    let power = |m: usize, p: T| {
        let k2 = grid.k_squared(m);
        if k2 == T::zero() {
            T::zero()
        } else {
            k2.powf(p / T::lit(2.0))
        }
    };
    let energy = grid.spectral_quadratic(v, |m| power(m, beta))? / T::lit(2.0);
    let dissipation = grid.spectral_quadratic(v, |m| power(m, T::lit(2.0) + beta))?;
    flow.prepare_lambda(beta)?;
    let lv = flow.lambda_velocity(beta).expect("prepared above");
    let (vel, vort) = (flow.velocity(), flow.vorticity());
    let mut sum = T::zero();
    for idx in 0..vel.len() {
        sum = sum + dot(cross(vel.get(idx), vort.get(idx)), lv.get(idx));
    }
    Ok(BetaTerms { beta, energy, dissipation, production: sum * grid.cell_volume() })
}

/// Fraction of the energy carried by dealiased-band modes with `max|kᵢ| > 2/3 · cutoff`.
pub fn tail_fraction<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>) -> Result<T> {
    let edge = (2 * grid.dealias_cutoff()) as i64 / 3;
    let total = grid.l2_norm_squared(v)?;
    if total == T::zero() {
        return Ok(T::zero());
    }
    let tail = grid.spectral_quadratic(v, |m| {
        let k = grid.mode(m);
        let top = k.iter().map(|c| c.abs()).max().unwrap_or(0);
        if grid.in_dealias_band(m) && top > edge {
            T::one()
        } else {
            T::zero()
        }
    })?;
    Ok(tail / total)
}

/// Scalar diagnostics of one velocity state.
pub fn compute_diagnostics<T: Real>(
    grid: &SpectralGrid<T>,
    v: &VectorSpectrum<T>,
    betas: &[T],
    evaluator: &CriterionEvaluator<'_, T>,
) -> Result<Diagnostics<T>> {
    let mut flow = FlowFields::new(grid, v)?;
    let kinetic_energy = grid.l2_norm_squared(v)? / T::lit(2.0);
    let enstrophy = grid.spectral_quadratic(v, |m| grid.k_squared(m))?;
    let max_speed = flow.velocity().max_magnitude();
    let mut beta_terms_out = Vec::with_capacity(betas.len());
    for &b in betas {
        beta_terms_out.push(beta_terms(&mut flow, b)?);
    }
    let criterion_norms = evaluator.spatial_norms(&mut flow)?;
    Ok(Diagnostics {
        kinetic_energy,
        enstrophy,
        max_speed,
        tail_fraction: tail_fraction(grid, v)?,
        divergence_ratio: grid.divergence_ratio(v)?,
        beta_terms: beta_terms_out,
        criterion_norms,
    })
}

fn guard<T: Real>(config: &SolverConfig<T>, t: T, d: &Diagnostics<T>) -> Result<()> {
    let fail = |reason: String| Err(Error::Instability { t: t.as_f64(), reason });
    if !d.kinetic_energy.is_finite() || !d.max_speed.is_finite() {
        return fail("non-finite velocity".into());
    }
    if d.max_speed > config.max_velocity {
        return fail(format!("max speed {} exceeds guard {}", d.max_speed, config.max_velocity));
    }
    if d.tail_fraction > config.tail_fraction_limit {
        return fail(format!(
            "tail energy fraction {:e} exceeds {:e}; the run is under-resolved",
            d.tail_fraction.as_f64(),
            config.tail_fraction_limit.as_f64()
        ));
    }
    if d.divergence_ratio > T::lit(1e-10) {
        return fail(format!("divergence ratio {:e} exceeds 1e-10", d.divergence_ratio.as_f64()));
    }
    Ok(())
}

/// Integrates from the configured initial condition, calling `observer` on every recorded sample.
///
/// Samples are recorded at step 0, at every multiple of either stride, and at the final step.
/// Velocities are attached only on snapshot steps (and step 0 and the final step).
pub fn simulate_with<T: Real>(
    config: &SolverConfig<T>,
    mut observer: impl FnMut(&Sample<T>) -> Result<()>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    let grid = SpectralGrid::new(config.n)?;
    let evaluator = CriterionEvaluator::new(&grid, &config.criteria, config.direction_floor)?;
    let integrator = Integrator::new(&grid, config.dt, config.viscosity)?.with_cfl_limit(config.cfl_limit);
    let steps = config.step_count();
    let mut v = config.initial.build(&grid)?;
    let mut samples = Vec::new();
    for s in 0..=steps {
        if s > 0 {
            v = integrator.step(&v)?.velocity;
        }
        let last = s == steps;
        let snap = s % config.snapshot_stride == 0 || last;
        if !(snap || s % config.diagnostic_stride == 0) {
            continue;
        }
        let time = T::from_usize_lossy(s) * config.dt;
        let diagnostics = compute_diagnostics(&grid, &v, &config.diagnostic_betas, &evaluator)?;
        guard(config, time, &diagnostics)?;
        let sample = Sample { step: s, time, diagnostics, velocity: snap.then(|| v.clone()) };
        observer(&sample)?;
        samples.push(sample);
        log::debug!("step {s}/{steps} t = {}", time.as_f64());
    }
    Ok(Trajectory {
        n: config.n,
        viscosity: config.viscosity,
        betas: config.diagnostic_betas.clone(),
        criteria: config.criteria.clone(),
        samples,
    })
}

pub fn simulate<T: Real>(config: &SolverConfig<T>) -> Result<Trajectory<T>> {
    simulate_with(config, |_| Ok(()))
}
