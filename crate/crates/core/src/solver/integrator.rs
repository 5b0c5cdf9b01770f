//! Rotational-form nonlinearity and integrating-factor RK4 time stepping.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{cross, ScalarField, SpectralGrid, VectorField, VectorSpectrum};

/// Pointwise `a × b` of two physical vector fields.
pub(crate) fn cross_field<T: Real>(a: &VectorField<T>, b: &VectorField<T>) -> Result<VectorField<T>> {
    let n = a.n();
    let mut out = [Vec::with_capacity(a.len()), Vec::with_capacity(a.len()), Vec::with_capacity(a.len())];
    for idx in 0..a.len() {
        let c = cross(a.get(idx), b.get(idx));
        for d in 0..3 {
            out[d].push(c[d]);
        }
    }
    let [x, y, z] = out;
    VectorField::from_components([
        ScalarField::from_vec(n, x)?,
        ScalarField::from_vec(n, y)?,
        ScalarField::from_vec(n, z)?,
    ])
}

/// `P(v × ω)` with 2/3-rule dealiasing of the inputs and of the product.
pub fn nonlinear_rotational<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>) -> Result<VectorSpectrum<T>> {
    nonlinear_with_speed(grid, v).map(|(n, _)| n)
}

/// As [`nonlinear_rotational`], also returning the per-component max speed of the dealiased input.
pub(crate) fn nonlinear_with_speed<T: Real>(
    grid: &SpectralGrid<T>,
    v: &VectorSpectrum<T>,
) -> Result<(VectorSpectrum<T>, [T; 3])> {
    let vd = grid.dealias(v)?;
    let w = grid.curl(&vd)?;
    let vp = grid.backward_vector(&vd)?;
    let wp = grid.backward_vector(&w)?;
    let speed = [vp.comps[0].max_abs(), vp.comps[1].max_abs(), vp.comps[2].max_abs()];
    let prod = grid.forward_vector(&cross_field(&vp, &wp)?)?;
    Ok((grid.leray_project(&grid.dealias(&prod)?)?, speed))
}

/// Result of a single time step.
#[derive(Clone, Debug)]
pub struct Step<T> {
    pub velocity: VectorSpectrum<T>,
    /// Per-component maximum speed of the input field.
    pub max_speed: [T; 3],
}

/// Lawson (integrating-factor) RK4 for `v̂_t = −ν|k|² v̂ + P(v × ω)^`.
///
/// The viscous term is integrated exactly through the factors `e^{−ν|k|² dt}`
/// and `e^{−ν|k|² dt/2}`.
pub struct Integrator<'g, T: Real> {
    grid: &'g SpectralGrid<T>,
    dt: T,
    cfl_limit: T,
    nonlinear: bool,
    full: Vec<T>,
    half: Vec<T>,
}

impl<'g, T: Real> Integrator<'g, T> {
    pub fn new(grid: &'g SpectralGrid<T>, dt: T, viscosity: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        if !(viscosity >= T::zero()) {
            return Err(Error::InvalidParameter(format!("viscosity must be ≥ 0, got {viscosity}")));
        }
        let rate = |m: usize| -viscosity * grid.k_squared(m);
        let full = (0..grid.mode_count()).map(|m| (rate(m) * dt).exp()).collect();
        let half = (0..grid.mode_count()).map(|m| (rate(m) * dt / T::lit(2.0)).exp()).collect();
        Ok(Self { grid, dt, cfl_limit: T::lit(0.5), nonlinear: true, full, half })
    }

    pub fn with_cfl_limit(mut self, limit: T) -> Self {
        self.cfl_limit = limit;
        self
    }

    /// Switches the nonlinear term off, leaving the exact heat-equation propagator.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    fn propagate(&self, f: &VectorSpectrum<T>, factor: &[T]) -> VectorSpectrum<T> {
        let mut out = f.clone();
        for c in out.comps.iter_mut() {
            for (z, &e) in c.coeffs_mut().iter_mut().zip(factor) {
                *z = *z * e;
            }
        }
        out
    }

    fn rhs(&self, v: &VectorSpectrum<T>) -> Result<(VectorSpectrum<T>, [T; 3])> {
        if self.nonlinear {
            nonlinear_with_speed(self.grid, v)
        } else {
            Ok((VectorSpectrum::zeros(self.grid.n()), [T::zero(); 3]))
        }
    }

    /// Courant number `dt · Σ_i max|v_i| / Δx`.
    pub fn cfl_number(&self, speed: [T; 3]) -> T {
        self.dt * (speed[0] + speed[1] + speed[2]) / self.grid.spacing()
    }

    pub fn step(&self, v: &VectorSpectrum<T>) -> Result<Step<T>> {
        let dt = self.dt;
        let half_dt = dt / T::lit(2.0);
        let (k1, speed) = self.rhs(v)?;
        if self.nonlinear {
            let cfl = self.cfl_number(speed);
            if cfl > self.cfl_limit {
                return Err(Error::Cfl { dt: dt.as_f64(), cfl: cfl.as_f64(), limit: self.cfl_limit.as_f64() });
            }
        }
        let ev_half = self.propagate(v, &self.half);
        let a = self.propagate(&v.add_scaled(&k1, half_dt), &self.half);
        let (k2, _) = self.rhs(&a)?;
        let b = ev_half.add_scaled(&k2, half_dt);
        let (k3, _) = self.rhs(&b)?;
        let c = self.propagate(v, &self.full).add_scaled(&self.propagate(&k3, &self.half), dt);
        let (k4, _) = self.rhs(&c)?;

        let sixth = dt / T::lit(6.0);
        let mid = self.propagate(&k2.add_scaled(&k3, T::one()), &self.half);
        let combo = self.propagate(&k1, &self.full).add_scaled(&mid, T::lit(2.0)).add_scaled(&k4, T::one());
        let velocity = self.propagate(v, &self.full).add_scaled(&combo, sixth);
        Ok(Step { velocity, max_speed: speed })
    }
}

/// One integrating-factor RK4 step of size `dt` at unit CFL limit 0.5.
pub fn step<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>, dt: T, viscosity: T) -> Result<VectorSpectrum<T>> {
    Integrator::new(grid, dt, viscosity)?.step(v).map(|s| s.velocity)
}
