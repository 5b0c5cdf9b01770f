use rustfft::num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::solver::integrator::cross_field;
use crate::spectral::{ScalarField, SpectralGrid, VectorSpectrum};

/// Zero-mean pressure of a solenoidal velocity.
///
/// The Bernoulli head `h = p + |v|²/2` solves `Δh = ∇·(v × ω)`, so
/// `∇h` is exactly the gradient part of `v × ω`. The Poisson solve uses the
/// same wavevector as the gradient and the projection, so that identity also
/// holds on the aliased Nyquist modes.
pub fn pressure_from_velocity<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>) -> Result<ScalarField<T>> {
    let vp = grid.backward_vector(v)?;
    let wp = grid.backward_vector(&grid.curl(v)?)?;
    let f = grid.forward_vector(&cross_field(&vp, &wp)?)?;
    let mut head = grid.divergence(&f)?;
    for (m, z) in head.coeffs_mut().iter_mut().enumerate() {
        let k = grid.derivative_wavevector(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        *z = if k2 == T::zero() { Complex::new(T::zero(), T::zero()) } else { -*z / k2 };
    }
    let head = grid.backward(&head)?;
    let ke: Vec<T> = (0..vp.len())
        .map(|i| {
            let a = vp.get(i);
            (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) / T::lit(2.0)
        })
        .collect();
    let mean = ke.iter().copied().sum::<T>() / T::from_usize_lossy(ke.len());
    let p = head.values().iter().zip(&ke).map(|(&h, &k)| h - k + mean).collect();
    ScalarField::from_vec(grid.n(), p)
}
