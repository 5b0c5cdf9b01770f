use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real samples on the `n³` lattice, x-fastest ordering (`i + n·(j + n·k)`).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::InvalidParameter(format!(
                "scalar field of n = {n} needs {} samples, got {}",
                n * n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    /// Samples `f(x, y, z)` at the lattice points `2π·(i, j, k)/n`.
    pub fn from_fn(n: usize, f: impl Fn(T, T, T) -> T) -> Self {
        let h = T::TAU() / T::from_usize_lossy(n);
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            let z = h * T::from_usize_lossy(k);
            for j in 0..n {
                let y = h * T::from_usize_lossy(j);
                for i in 0..n {
                    data.push(f(h * T::from_usize_lossy(i), y, z));
                }
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.data[i + self.n * (j + self.n * k)]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

/// Three real components on the `n³` lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T> {
    pub comps: [ScalarField<T>; 3],
}

impl<T: Real> VectorField<T> {
    pub fn zeros(n: usize) -> Self {
        Self { comps: [ScalarField::zeros(n), ScalarField::zeros(n), ScalarField::zeros(n)] }
    }

    pub fn from_components(comps: [ScalarField<T>; 3]) -> Result<Self> {
        let n = comps[0].n();
        for c in &comps[1..] {
            if c.n() != n {
                return Err(Error::SizeMismatch { expected: n, found: c.n() });
            }
        }
        Ok(Self { comps })
    }

    pub fn from_fn(n: usize, f: impl Fn(T, T, T) -> [T; 3]) -> Self {
        Self {
            comps: [
                ScalarField::from_fn(n, |x, y, z| f(x, y, z)[0]),
                ScalarField::from_fn(n, |x, y, z| f(x, y, z)[1]),
                ScalarField::from_fn(n, |x, y, z| f(x, y, z)[2]),
            ],
        }
    }

    pub fn n(&self) -> usize {
        self.comps[0].n()
    }

    /// Vector value at flat lattice index `idx`.
    pub fn get(&self, idx: usize) -> [T; 3] {
        [self.comps[0].values()[idx], self.comps[1].values()[idx], self.comps[2].values()[idx]]
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> [T; 3] {
        let n = self.n();
        self.get(i + n * (j + n * k))
    }

    pub fn len(&self) -> usize {
        self.comps[0].values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField<T> {
        let data = (0..self.len()).map(|i| norm3(self.get(i))).collect();
        ScalarField { n: self.n(), data }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { comps: [self.comps[0].map(|x| x * s), self.comps[1].map(|x| x * s), self.comps[2].map(|x| x * s)] }
    }

    pub fn max_magnitude(&self) -> T {
        (0..self.len()).fold(T::zero(), |m, i| m.max(norm3(self.get(i))))
    }
}

/// Half-spectrum Fourier coefficients of a real field; index `ix + (n/2+1)·(iy + n·iz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(T::zero(), T::zero()); (n / 2 + 1) * n * n] }
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), (n / 2 + 1) * n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }
}

/// Spectra of the three components of a vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSpectrum<T> {
    pub comps: [Spectrum<T>; 3],
}

impl<T: Real> VectorSpectrum<T> {
    pub fn zeros(n: usize) -> Self {
        Self { comps: [Spectrum::zeros(n), Spectrum::zeros(n), Spectrum::zeros(n)] }
    }

    pub fn n(&self) -> usize {
        self.comps[0].n()
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for z in c.coeffs_mut() {
                *z = *z * s;
            }
        }
        out
    }

    /// `self + s·other`, mode by mode.
    pub fn add_scaled(&self, other: &Self, s: T) -> Self {
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            for (z, w) in c.coeffs_mut().iter_mut().zip(o.coeffs()) {
                *z = *z + *w * s;
            }
        }
        out
    }
}

/// Uniform mode-wise access for scalar and vector spectra.
pub trait Modal<T: Real>: Clone {
    fn n(&self) -> usize;
    fn map_modes(&mut self, f: impl Fn(usize, Complex<T>) -> Complex<T>);
}

impl<T: Real> Modal<T> for Spectrum<T> {
    fn n(&self) -> usize {
        self.n
    }

    fn map_modes(&mut self, f: impl Fn(usize, Complex<T>) -> Complex<T>) {
        for (m, z) in self.data.iter_mut().enumerate() {
            *z = f(m, *z);
        }
    }
}

impl<T: Real> Modal<T> for VectorSpectrum<T> {
    fn n(&self) -> usize {
        self.comps[0].n
    }

    fn map_modes(&mut self, f: impl Fn(usize, Complex<T>) -> Complex<T>) {
        for c in self.comps.iter_mut() {
            c.map_modes(&f);
        }
    }
}

pub(crate) fn norm3<T: Real>(a: [T; 3]) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
