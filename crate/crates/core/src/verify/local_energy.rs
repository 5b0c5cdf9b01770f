//! Local energy balance tested against smooth, compactly supported weights.
//!
//! For smooth solutions with viscosity `ν` the balance
//!
//! ```text
//! ∫|v|²φ(t) + 2ν∫₀ᵗ∫|∇v|²φ = ∫|v₀|²φ(0) + ∫₀ᵗ∫ |v|²(∂ₜφ + νΔφ) + (|v|² + 2p) v·∇φ
//! ```
//!
//! holds with equality. The residual reported here is left minus right, so a
//! nonpositive residual (up to tolerance) is the inequality direction.

use std::collections::HashMap;

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::norms::cumulative_simpson;
use crate::scalar::Real;
use crate::solver::{pressure_from_velocity, Trajectory};
use crate::spectral::{dot, ScalarField, SpectralGrid, Spectrum, VectorField, VectorSpectrum};

/// Radial `exp(−1/(1 − |y|²/R²))` bump around `center`, with `y` the periodic displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceBump<T> {
    pub center: [T; 3],
    pub radius: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeProfile<T> {
    Constant,
    /// `exp(−1/(1 − σ²))` with `σ` mapping `[start, end]` onto `[−1, 1]`.
    Bump { start: T, end: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunction<T> {
    pub space: SpaceBump<T>,
    pub time: TimeProfile<T>,
    pub amplitude: T,
}

/// Value, gradient and Laplacian of the spatial factor at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpJet<T> {
    pub value: T,
    pub gradient: [T; 3],
    pub laplacian: T,
}

fn periodic_offset<T: Real>(x: T, c: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let d = x - c;
    d - two_pi * (d / two_pi + T::lit(0.5)).floor()
}

impl<T: Real> SpaceBump<T> {
    pub fn jet(&self, x: [T; 3]) -> BumpJet<T> {
        let zero = BumpJet { value: T::zero(), gradient: [T::zero(); 3], laplacian: T::zero() };
        let y = [0, 1, 2].map(|i| periodic_offset(x[i], self.center[i]));
        let r2 = self.radius * self.radius;
        let rho2 = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / r2;
        let s = T::one() - rho2;
        if !(s > T::zero()) {
            return zero;
        }
        let chi = (-T::one() / s).exp();
        // χ as a function of ρ²: dχ/d(ρ²) = −χ/s², d²χ/d(ρ²)² = χ/s⁴ − 2χ/s³
        let g = -chi / (s * s);
        let g2 = chi / (s * s * s * s) - T::lit(2.0) * chi / (s * s * s);
        let two = T::lit(2.0);
        BumpJet {
            value: chi,
            gradient: y.map(|yi| g * two * yi / r2),
            laplacian: T::lit(4.0) * rho2 * g2 / r2 + T::lit(6.0) * g / r2,
        }
    }
}

/// Trapezoid nodes for the radial transform. The radial integrand extends to an even
/// function on `[−R, R]` that vanishes to all orders at `±R`, so the trapezoid rule
/// converges faster than any power and this count reaches round-off.
const RADIAL_NODES: usize = 4096;

impl<T: Real> SpaceBump<T> {
    /// Radial profile of the Fourier coefficient, `(2π)⁻³ ∫ χ(y) e^{−ik·y} dy` at `|k| = wavenumber`.
    pub fn radial_transform(&self, wavenumber: T) -> T {
        let h = self.radius / T::from_usize_lossy(RADIAL_NODES);
        let mut sum = T::zero();
        for i in 1..RADIAL_NODES {
            let r = h * T::from_usize_lossy(i);
            let rho = r / self.radius;
            let chi = (-T::one() / (T::one() - rho * rho)).exp();
            let x = wavenumber * r;
            let sinc = if x == T::zero() { T::one() } else { x.sin() / x };
            sum = sum + chi * r * r * sinc;
        }
        sum * h / (T::lit(2.0) * T::PI() * T::PI())
    }

    /// Fourier coefficients of the bump (times `amplitude`) on every mode of `grid`.
    pub fn spectrum(&self, grid: &SpectralGrid<T>, amplitude: T) -> Spectrum<T> {
        let mut out = Spectrum::zeros(grid.n());
        let mut radial: HashMap<i64, T> = HashMap::new();
        for (m, z) in out.coeffs_mut().iter_mut().enumerate() {
            let k = grid.mode(m);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let f = *radial.entry(k2).or_insert_with(|| self.radial_transform(T::from_i64(k2).unwrap().sqrt()));
            let phase = -(0..3).fold(T::zero(), |acc, d| acc + T::from_i64(k[d]).unwrap() * self.center[d]);
            *z = Complex::new(phase.cos(), phase.sin()) * (amplitude * f);
        }
        out
    }
}

impl<T: Real> TimeProfile<T> {
    /// `(θ(t), θ'(t))`.
    pub fn eval(&self, t: T) -> (T, T) {
        match *self {
            TimeProfile::Constant => (T::one(), T::zero()),
            TimeProfile::Bump { start, end } => {
                let two = T::lit(2.0);
                let sigma = (two * t - start - end) / (end - start);
                let s = T::one() - sigma * sigma;
                if !(s > T::zero()) {
                    return (T::zero(), T::zero());
                }
                let theta = (-T::one() / s).exp();
                (theta, theta * (-two * sigma / (s * s)) * two / (end - start))
            }
        }
    }
}

impl<T: Real> TestFunction<T> {
    pub fn validate(&self, first: T, last: T) -> Result<()> {
        let r = self.space.radius;
        if !(r > T::zero() && r < T::PI()) {
            return Err(Error::Support(format!("spatial radius must lie in (0, π), got {r}")));
        }
        if !(self.amplitude >= T::zero()) || !self.amplitude.is_finite() {
            return Err(Error::Support(format!("amplitude must be finite and nonnegative, got {}", self.amplitude)));
        }
        if let TimeProfile::Bump { start, end } = self.time {
            if !(start < end) || start < first || end > last {
                return Err(Error::Support(format!(
                    "time support [{start}, {end}] must be a nonempty interval inside [{first}, {last}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalEnergyReport<T> {
    /// `(t, left − right)` at every stored snapshot.
    pub residuals: Vec<(T, T)>,
    /// Accumulated `2ν∫₀ᵗ∫|∇v|²φ`.
    pub dissipation: Vec<T>,
    pub max_abs: T,
    /// `max|residual| / max dissipation`, zero when both vanish.
    pub relative: T,
}

/// Default lattice refinement for the spatial quadrature.
///
/// The integrals are lattice sums on a zero-padded grid this many times finer,
/// with the test function replaced by its Fourier series truncated to that grid.
/// For dealiased fields every integrand is then a trigonometric polynomial the
/// finer lattice integrates exactly.
pub const DEFAULT_OVERSAMPLE: usize = 2;

struct Integrands<T> {
    energy: T,
    dissipation: T,
    flux: T,
}

/// Band-limited `φ`, `∇φ` and `Δφ` of the spatial factor on one lattice.
struct WeightFields<T> {
    value: ScalarField<T>,
    gradient: VectorField<T>,
    laplacian: ScalarField<T>,
}

impl<T: Real> WeightFields<T> {
    fn new(grid: &SpectralGrid<T>, bump: &SpaceBump<T>, amplitude: T) -> Result<Self> {
        let hat = bump.spectrum(grid, amplitude);
        Ok(Self {
            value: grid.backward(&hat)?,
            gradient: grid.backward_vector(&grid.gradient(&hat)?)?,
            laplacian: grid.backward(&grid.laplacian(&hat)?)?,
        })
    }
}

fn integrands<T: Real>(
    grid: &SpectralGrid<T>,
    v_hat: &VectorSpectrum<T>,
    viscosity: T,
    weight: &WeightFields<T>,
    (theta, dtheta): (T, T),
) -> Result<Integrands<T>> {
    if theta == T::zero() && dtheta == T::zero() {
        return Ok(Integrands { energy: T::zero(), dissipation: T::zero(), flux: T::zero() });
    }
    let v = grid.backward_vector(v_hat)?;
    let p = pressure_from_velocity(grid, v_hat)?;
    let grads = v_hat
        .comps
        .iter()
        .map(|c| grid.backward_vector(&grid.gradient(c)?))
        .collect::<Result<Vec<_>>>()?;
    let two = T::lit(2.0);
    let (mut energy, mut dissipation, mut flux) = (T::zero(), T::zero(), T::zero());
    for idx in 0..v.len() {
        let phi = weight.value.values()[idx];
        let vi = v.get(idx);
        let v2 = dot(vi, vi);
        let g2 = grads.iter().map(|g| dot(g.get(idx), g.get(idx))).fold(T::zero(), |s, x| s + x);
        energy = energy + v2 * phi;
        dissipation = dissipation + g2 * phi;
        flux = flux
            + v2 * (phi * dtheta + viscosity * weight.laplacian.values()[idx] * theta)
            + (v2 + two * p.values()[idx]) * dot(vi, weight.gradient.get(idx)) * theta;
    }
    let dv = grid.cell_volume();
    Ok(Integrands { energy: energy * dv * theta, dissipation: dissipation * dv * theta, flux: flux * dv })
}

/// Local energy residual along the stored snapshots of `trajectory`, with the
/// spatial integrals evaluated on a lattice [`DEFAULT_OVERSAMPLE`] times finer.
///
/// Time integrals use the running Simpson rule, so snapshots should be uniformly spaced.
pub fn local_energy_residual<T: Real>(
    grid: &SpectralGrid<T>,
    trajectory: &Trajectory<T>,
    phi: &TestFunction<T>,
) -> Result<LocalEnergyReport<T>> {
    local_energy_residual_oversampled(grid, trajectory, phi, DEFAULT_OVERSAMPLE)
}

pub fn local_energy_residual_oversampled<T: Real>(
    grid: &SpectralGrid<T>,
    trajectory: &Trajectory<T>,
    phi: &TestFunction<T>,
    oversample: usize,
) -> Result<LocalEnergyReport<T>> {
    if oversample == 0 {
        return Err(Error::InvalidParameter("oversampling factor must be at least 1".into()));
    }
    let snaps: Vec<(T, &VectorSpectrum<T>)> = trajectory.snapshots().collect();
    if snaps.len() < 4 {
        return Err(Error::TooSparse(format!("local energy residual needs at least 4 snapshots, got {}", snaps.len())));
    }
    phi.validate(snaps[0].0, snaps[snaps.len() - 1].0)?;
    let fine = SpectralGrid::new(grid.n() * oversample)?;
    let weight = WeightFields::new(&fine, &phi.space, phi.amplitude)?;
    let nu = trajectory.viscosity;
    let terms = snaps
        .iter()
        .map(|&(t, v)| integrands(&fine, &grid.pad_vector_to(v, &fine)?, nu, &weight, phi.time.eval(t)))
        .collect::<Result<Vec<_>>>()?;
    let diss_rate: Vec<(T, T)> =
        snaps.iter().zip(&terms).map(|((t, _), s)| (*t, T::lit(2.0) * nu * s.dissipation)).collect();
    let flux: Vec<(T, T)> = snaps.iter().zip(&terms).map(|((t, _), s)| (*t, s.flux)).collect();
    let dissipation = cumulative_simpson(&diss_rate);
    let production = cumulative_simpson(&flux);
    let initial = terms[0].energy;
    let residuals: Vec<(T, T)> = snaps
        .iter()
        .zip(&terms)
        .enumerate()
        .map(|(i, ((t, _), s))| (*t, s.energy + dissipation[i] - initial - production[i]))
        .collect();
    let max_abs = residuals.iter().fold(T::zero(), |m, r| m.max(r.1.abs()));
    let scale = dissipation.iter().fold(T::zero(), |m, &d| m.max(d.abs()));
    let relative = if max_abs == T::zero() { T::zero() } else { max_abs / scale };
    Ok(LocalEnergyReport { residuals, dissipation, max_abs, relative })
}
