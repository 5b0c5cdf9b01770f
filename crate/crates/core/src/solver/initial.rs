//! Analytic and random divergence-free initial data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{ScalarField, SpectralGrid, VectorField, VectorSpectrum};

/// `A·(sin x cos y cos z, −cos x sin y cos z, 0)`.
pub fn taylor_green<T: Real>(grid: &SpectralGrid<T>, amplitude: T) -> Result<VectorSpectrum<T>> {
    let v = VectorField::from_fn(grid.n(), |x: T, y: T, z: T| {
        [
            amplitude * x.sin() * y.cos() * z.cos(),
            -amplitude * x.cos() * y.sin() * z.cos(),
            T::zero(),
        ]
    });
    grid.forward_vector(&v)
}

/// Arnold–Beltrami–Childress flow `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`,
/// which satisfies `∇×v = v`.
pub fn abc<T: Real>(grid: &SpectralGrid<T>, a: T, b: T, c: T) -> Result<VectorSpectrum<T>> {
    let v = VectorField::from_fn(grid.n(), |x: T, y: T, z: T| {
        [a * z.sin() + c * y.cos(), b * x.sin() + a * z.cos(), c * y.sin() + b * x.cos()]
    });
    grid.forward_vector(&v)
}

/// Random solenoidal, zero-mean field with shell energy `E(k) ∝ k^slope` on the
/// integer shells `2 ≤ round(|k|) ≤ floor(n/3)` and root-mean-square speed `amplitude`.
/// The same seed always yields the same field.
pub fn random_divfree<T: Real>(grid: &SpectralGrid<T>, slope: T, seed: u64, amplitude: T) -> Result<VectorSpectrum<T>> {
    if !(amplitude >= T::zero()) {
        return Err(Error::InvalidParameter(format!("amplitude must be ≥ 0, got {amplitude}")));
    }
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = || {
        let data = (0..n * n * n)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                T::lit(x)
            })
            .collect();
        ScalarField::from_vec(n, data)
    };
    let white = VectorField::from_components([noise()?, noise()?, noise()?])?;
    let kcut = grid.dealias_cutoff();
    let shell_of = |m: usize| grid.k_squared(m).sqrt().round().to_usize().unwrap_or(usize::MAX);
    let keep = |m: usize| {
        let s = shell_of(m);
        grid.in_dealias_band(m) && (2..=kcut).contains(&s)
    };

    let mut v = grid.forward_vector(&white)?;
    for c in v.comps.iter_mut() {
        for (m, z) in c.coeffs_mut().iter_mut().enumerate() {
            if !keep(m) {
                *z = Complex::new(T::zero(), T::zero());
            }
        }
    }
    let mut v = grid.leray_project(&v)?;

    let mut shell_energy = vec![T::zero(); kcut + 1];
    for c in &v.comps {
        for (m, z) in c.coeffs().iter().enumerate() {
            if keep(m) {
                shell_energy[shell_of(m)] = shell_energy[shell_of(m)] + grid.weight(m) * z.norm_sqr();
            }
        }
    }
    let gain: Vec<T> = shell_energy
        .iter()
        .enumerate()
        .map(|(s, &e)| {
            if s < 2 || e == T::zero() {
                T::zero()
            } else {
                (T::from_usize_lossy(s).powf(slope) / e).sqrt()
            }
        })
        .collect();
    for c in v.comps.iter_mut() {
        for (m, z) in c.coeffs_mut().iter_mut().enumerate() {
            if keep(m) {
                *z = *z * gain[shell_of(m)];
            }
        }
    }
    // mean square speed = ‖v‖²/(2π)³ = Σ|v̂|²
    let ms = grid.l2_norm_squared(&v)? / grid.volume();
    if ms > T::zero() {
        v = v.scale(amplitude / ms.sqrt());
    }
    Ok(v)
}

pub fn zero<T: Real>(grid: &SpectralGrid<T>) -> VectorSpectrum<T> {
    VectorSpectrum::zeros(grid.n())
}
