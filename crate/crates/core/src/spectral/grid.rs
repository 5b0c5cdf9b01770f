use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::field::{Modal, ScalarField, Spectrum, VectorField, VectorSpectrum};

/// Periodic lattice on `[0, 2π)³` with cached FFT plans and wavenumber tables.
///
/// Spectra use real-to-complex half storage along x. The forward transform
/// carries the `1/n³` factor, so `f̂(k) = n⁻³ Σ_x f(x) e^{-ik·x}` and the
/// constant function 1 maps to `f̂(0) = 1`.
pub struct SpectralGrid<T: Real> {
    n: usize,
    nh: usize,
    kmax: usize,
    r2c: Arc<dyn RealToComplex<T>>,
    c2r: Arc<dyn ComplexToReal<T>>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    modes: Vec<[i64; 3]>,
    kd: Vec<[T; 3]>,
    k2: Vec<T>,
    mask: Vec<bool>,
    weight: Vec<T>,
}

impl<T: Real> fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).field("kmax", &self.kmax).finish()
    }
}

fn signed_wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[inline]
fn times_i<T: Real>(z: Complex<T>, k: T) -> Complex<T> {
    // (i k) z
    Complex::new(-z.im * k, z.re * k)
}

impl<T: Real> SpectralGrid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidResolution(n));
        }
        let nh = n / 2 + 1;
        let kmax = n / 3;
        let mut rplanner = RealFftPlanner::<T>::new();
        let mut cplanner = FftPlanner::<T>::new();
        let r2c = rplanner.plan_fft_forward(n);
        let c2r = rplanner.plan_fft_inverse(n);
        let fwd = cplanner.plan_fft_forward(n);
        let inv = cplanner.plan_fft_inverse(n);

        let total = nh * n * n;
        let mut modes = Vec::with_capacity(total);
        let mut kd = Vec::with_capacity(total);
        let mut k2 = Vec::with_capacity(total);
        let mut mask = Vec::with_capacity(total);
        let mut weight = Vec::with_capacity(total);
        let nyq = (n / 2) as i64;
        let deriv = |k: i64| if k == nyq { T::zero() } else { T::from_i64(k).unwrap() };
        for iz in 0..n {
            let kz = signed_wavenumber(iz, n);
            for iy in 0..n {
                let ky = signed_wavenumber(iy, n);
                for ix in 0..nh {
                    let kx = ix as i64;
                    modes.push([kx, ky, kz]);
                    kd.push([deriv(kx), deriv(ky), deriv(kz)]);
                    k2.push(T::from_i64(kx * kx + ky * ky + kz * kz).unwrap());
                    let km = kmax as i64;
                    mask.push(kx.abs() <= km && ky.abs() <= km && kz.abs() <= km);
                    let w = if ix == 0 || ix == n / 2 { 1.0 } else { 2.0 };
                    weight.push(T::lit(w));
                }
            }
        }
        Ok(Self { n, nh, kmax, r2c, c2r, fwd, inv, modes, kd, k2, mask, weight })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored modes along x in the half spectrum (`n/2 + 1`).
    pub fn half_len(&self) -> usize {
        self.nh
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Largest retained wavenumber per axis under the 2/3 rule, `floor(n/3)`.
    pub fn dealias_cutoff(&self) -> usize {
        self.kmax
    }

    pub fn spacing(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.n)
    }

    pub fn cell_volume(&self) -> T {
        self.spacing().powi(3)
    }

    /// `(2π)³`, the torus volume.
    pub fn volume(&self) -> T {
        T::TAU().powi(3)
    }

    pub fn coord(&self, i: usize) -> T {
        self.spacing() * T::from_usize_lossy(i)
    }

    pub fn point_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Signed integer wavenumber of half-spectrum mode `m`.
    pub fn mode(&self, m: usize) -> [i64; 3] {
        self.modes[m]
    }

    pub fn mode_index(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        if k[0] < 0 || k[0] > n / 2 {
            return None;
        }
        let wrap = |v: i64| -> Option<usize> {
            if v <= -(n / 2) || v > n / 2 {
                None
            } else {
                Some(v.rem_euclid(n) as usize)
            }
        };
        let iy = wrap(k[1])?;
        let iz = wrap(k[2])?;
        Some(k[0] as usize + self.nh * (iy + self.n * iz))
    }

    /// Wavevector used by first-order derivatives (Nyquist components zeroed).
    pub fn derivative_wavevector(&self, m: usize) -> [T; 3] {
        self.kd[m]
    }

    /// `|k|²` of mode `m`.
    pub fn k_squared(&self, m: usize) -> T {
        self.k2[m]
    }

    pub fn in_dealias_band(&self, m: usize) -> bool {
        self.mask[m]
    }

    /// Multiplicity of mode `m` in the full spectrum (1 on the x = 0 and Nyquist planes, else 2).
    pub fn weight(&self, m: usize) -> T {
        self.weight[m]
    }

    fn check<M: Modal<T>>(&self, f: &M) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: f.n() });
        }
        Ok(())
    }

    // ---------------------------------------------------------------- transforms

    pub fn forward(&self, f: &ScalarField<T>) -> Result<Spectrum<T>> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: f.n() });
        }
        let (n, nh) = (self.n, self.nh);
        let mut spec = vec![Complex::new(T::zero(), T::zero()); nh * n * n];
        spec.par_chunks_mut(nh).zip(f.values().par_chunks(n)).for_each_init(
            || (vec![T::zero(); n], self.r2c.make_scratch_vec()),
            |(buf, scratch), (out, line)| {
                buf.copy_from_slice(line);
                self.r2c.process_with_scratch(buf, out, scratch).expect("r2c length matches plan");
            },
        );
        self.transform_yz(&mut spec, &self.fwd);
        let norm = T::one() / T::from_usize_lossy(n * n * n);
        spec.par_iter_mut().for_each(|z| *z = *z * norm);
        Ok(Spectrum::from_raw(n, spec))
    }

    pub fn backward(&self, s: &Spectrum<T>) -> Result<ScalarField<T>> {
        self.check(s)?;
        let (n, nh) = (self.n, self.nh);
        let mut spec = s.coeffs().to_vec();
        self.transform_yz(&mut spec, &self.inv);
        let mut out = vec![T::zero(); n * n * n];
        out.par_chunks_mut(n).zip(spec.par_chunks_mut(nh)).for_each_init(
            || self.c2r.make_scratch_vec(),
            |scratch, (line, input)| {
                // Real output ignores the imaginary parts of the DC and Nyquist bins.
                input[0].im = T::zero();
                input[nh - 1].im = T::zero();
                self.c2r.process_with_scratch(input, line, scratch).expect("c2r length matches plan");
            },
        );
        ScalarField::from_vec(n, out)
    }

    fn transform_yz(&self, spec: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let (n, nh) = (self.n, self.nh);
        let zero = Complex::new(T::zero(), T::zero());
        let plane = nh * n;
        // y: per z-plane, transpose to columns of length n
        spec.par_chunks_mut(plane).for_each_init(
            || (vec![zero; plane], vec![zero; fft.get_inplace_scratch_len()]),
            |(buf, scratch), p| {
                for iy in 0..n {
                    for ix in 0..nh {
                        buf[ix * n + iy] = p[ix + nh * iy];
                    }
                }
                fft.process_with_scratch(buf, scratch);
                for iy in 0..n {
                    for ix in 0..nh {
                        p[ix + nh * iy] = buf[ix * n + iy];
                    }
                }
            },
        );
        // z: gather into [iy][ix][iz], transform, scatter back
        let mut t = vec![zero; plane * n];
        {
            let src: &[Complex<T>] = spec;
            t.par_chunks_mut(plane).enumerate().for_each_init(
                || vec![zero; fft.get_inplace_scratch_len()],
                |scratch, (iy, block)| {
                    for iz in 0..n {
                        for ix in 0..nh {
                            block[ix * n + iz] = src[ix + nh * (iy + n * iz)];
                        }
                    }
                    fft.process_with_scratch(block, scratch);
                },
            );
        }
        spec.par_chunks_mut(plane).enumerate().for_each(|(iz, p)| {
            for iy in 0..n {
                let row = &t[iy * plane..(iy + 1) * plane];
                for ix in 0..nh {
                    p[ix + nh * iy] = row[ix * n + iz];
                }
            }
        });
    }

    pub fn forward_vector(&self, v: &VectorField<T>) -> Result<VectorSpectrum<T>> {
        Ok(VectorSpectrum {
            comps: [self.forward(&v.comps[0])?, self.forward(&v.comps[1])?, self.forward(&v.comps[2])?],
        })
    }

    pub fn backward_vector(&self, v: &VectorSpectrum<T>) -> Result<VectorField<T>> {
        VectorField::from_components([
            self.backward(&v.comps[0])?,
            self.backward(&v.comps[1])?,
            self.backward(&v.comps[2])?,
        ])
    }

    // ---------------------------------------------------------------- operators

    /// Fractional derivative `Λ^β`, multiplier `|k|^β`; the zero mode is always sent to 0.
    pub fn lambda<M: Modal<T>>(&self, f: &M, beta: T) -> Result<M> {
        self.check(f)?;
        if !(beta >= T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("Λ^β requires finite β ≥ 0, got {beta}")));
        }
        let half = beta / T::lit(2.0);
        let mut out = f.clone();
        out.map_modes(|m, z| if m == 0 { z * T::zero() } else { z * self.k2[m].powf(half) });
        Ok(out)
    }

    pub fn laplacian<M: Modal<T>>(&self, f: &M) -> Result<M> {
        self.check(f)?;
        let mut out = f.clone();
        out.map_modes(|m, z| z * (-self.k2[m]));
        Ok(out)
    }

    pub fn dealias<M: Modal<T>>(&self, f: &M) -> Result<M> {
        self.check(f)?;
        let mut out = f.clone();
        out.map_modes(|m, z| if self.mask[m] { z } else { Complex::new(T::zero(), T::zero()) });
        Ok(out)
    }

    pub fn gradient(&self, f: &Spectrum<T>) -> Result<VectorSpectrum<T>> {
        self.check(f)?;
        let mut out = VectorSpectrum::zeros(self.n);
        for (d, comp) in out.comps.iter_mut().enumerate() {
            for (m, (o, z)) in comp.coeffs_mut().iter_mut().zip(f.coeffs()).enumerate() {
                *o = times_i(*z, self.kd[m][d]);
            }
        }
        Ok(out)
    }

    pub fn divergence(&self, v: &VectorSpectrum<T>) -> Result<Spectrum<T>> {
        self.check(v)?;
        let mut out = Spectrum::zeros(self.n);
        let [a, b, c] = [v.comps[0].coeffs(), v.comps[1].coeffs(), v.comps[2].coeffs()];
        for (m, o) in out.coeffs_mut().iter_mut().enumerate() {
            let k = self.kd[m];
            *o = times_i(a[m] * k[0] + b[m] * k[1] + c[m] * k[2], T::one());
        }
        Ok(out)
    }

    pub fn curl(&self, v: &VectorSpectrum<T>) -> Result<VectorSpectrum<T>> {
        self.check(v)?;
        let mut out = VectorSpectrum::zeros(self.n);
        let [a, b, c] = [v.comps[0].coeffs(), v.comps[1].coeffs(), v.comps[2].coeffs()];
        let [ox, oy, oz] = &mut out.comps;
        for m in 0..self.modes.len() {
            let k = self.kd[m];
            ox.coeffs_mut()[m] = times_i(c[m] * k[1] - b[m] * k[2], T::one());
            oy.coeffs_mut()[m] = times_i(a[m] * k[2] - c[m] * k[0], T::one());
            oz.coeffs_mut()[m] = times_i(b[m] * k[0] - a[m] * k[1], T::one());
        }
        Ok(out)
    }

    /// Leray projection `v̂ − k (k·v̂)/|k|²`; modes with vanishing derivative wavevector are untouched.
    pub fn leray_project(&self, v: &VectorSpectrum<T>) -> Result<VectorSpectrum<T>> {
        self.check(v)?;
        let mut out = v.clone();
        let [ox, oy, oz] = &mut out.comps;
        let (ox, oy, oz) = (ox.coeffs_mut(), oy.coeffs_mut(), oz.coeffs_mut());
        for m in 0..self.modes.len() {
            let k = self.kd[m];
            let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if kk == T::zero() {
                continue;
            }
            let proj = (ox[m] * k[0] + oy[m] * k[1] + oz[m] * k[2]) / kk;
            ox[m] = ox[m] - proj * k[0];
            oy[m] = oy[m] - proj * k[1];
            oz[m] = oz[m] - proj * k[2];
        }
        Ok(out)
    }

    /// Zero-pads a spectrum of this grid onto the finer grid `fine`.
    ///
    /// Nyquist coefficients are split evenly between `±n/2` along each axis, so the
    /// padded field interpolates the original trigonometric polynomial exactly on
    /// the coarse lattice.
    pub fn pad_to(&self, f: &Spectrum<T>, fine: &SpectralGrid<T>) -> Result<Spectrum<T>> {
        self.check(f)?;
        if fine.n < self.n {
            return Err(Error::InvalidParameter(format!("cannot pad n = {} onto n = {}", self.n, fine.n)));
        }
        if fine.n == self.n {
            return Ok(f.clone());
        }
        let half_n = (self.n / 2) as i64;
        let half = T::lit(0.5);
        let mut out = Spectrum::zeros(fine.n);
        let dst = out.coeffs_mut();
        for (m, &z) in f.coeffs().iter().enumerate() {
            if z.re == T::zero() && z.im == T::zero() {
                continue;
            }
            let k = self.modes[m];
            let mut z = z;
            if k[0] == half_n {
                z = z * half;
            }
            let split = |c: i64| if c == half_n { vec![half_n, -half_n] } else { vec![c] };
            let (ys, zs) = (split(k[1]), split(k[2]));
            let share = T::one() / T::from_usize_lossy(ys.len() * zs.len());
            for &ky in &ys {
                for &kz in &zs {
                    let idx = fine.mode_index([k[0], ky, kz]).expect("coarse mode fits on the finer grid");
                    dst[idx] = dst[idx] + z * share;
                }
            }
        }
        Ok(out)
    }

    pub fn pad_vector_to(&self, v: &VectorSpectrum<T>, fine: &SpectralGrid<T>) -> Result<VectorSpectrum<T>> {
        Ok(VectorSpectrum {
            comps: [self.pad_to(&v.comps[0], fine)?, self.pad_to(&v.comps[1], fine)?, self.pad_to(&v.comps[2], fine)?],
        })
    }

    /// `max_k |k·v̂(k)| / max_k |v̂(k)|` (0 for the zero field).
    pub fn divergence_ratio(&self, v: &VectorSpectrum<T>) -> Result<T> {
        self.check(v)?;
        let vmax = v.max_abs();
        if vmax == T::zero() {
            return Ok(T::zero());
        }
        let [a, b, c] = [v.comps[0].coeffs(), v.comps[1].coeffs(), v.comps[2].coeffs()];
        let mut dmax = T::zero();
        for m in 0..self.modes.len() {
            let k = self.kd[m];
            dmax = dmax.max((a[m] * k[0] + b[m] * k[1] + c[m] * k[2]).norm());
        }
        Ok(dmax / vmax)
    }

    pub fn is_divergence_free(&self, v: &VectorSpectrum<T>) -> Result<bool> {
        Ok(self.divergence_ratio(v)? <= T::lit(1e-10))
    }

    /// `(2π)³ Σ_k mult(k) |f̂(k)|²` over the full spectrum, for any scalar or vector spectrum.
    pub fn spectral_quadratic<M: AsComponents<T>>(&self, f: &M, mult: impl Fn(usize) -> T) -> Result<T> {
        let comps = f.components();
        let mut total = T::zero();
        for c in comps {
            if c.n() != self.n {
                return Err(Error::SizeMismatch { expected: self.n, found: c.n() });
            }
            for (m, z) in c.coeffs().iter().enumerate() {
                total = total + self.weight[m] * mult(m) * z.norm_sqr();
            }
        }
        Ok(total * self.volume())
    }

    /// `‖f‖²_{L²}` computed spectrally via Parseval.
    pub fn l2_norm_squared<M: AsComponents<T>>(&self, f: &M) -> Result<T> {
        self.spectral_quadratic(f, |_| T::one())
    }
}

/// Read access to the scalar spectra making up a field.
pub trait AsComponents<T> {
    fn components(&self) -> Vec<&Spectrum<T>>;
}

impl<T> AsComponents<T> for Spectrum<T> {
    fn components(&self) -> Vec<&Spectrum<T>> {
        vec![self]
    }
}

impl<T> AsComponents<T> for VectorSpectrum<T> {
    fn components(&self) -> Vec<&Spectrum<T>> {
        self.comps.iter().collect()
    }
}
