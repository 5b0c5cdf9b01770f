//! Periodic lattice, Fourier transforms and spectral differential operators.

mod field;
mod grid;

pub use field::{Modal, ScalarField, Spectrum, VectorField, VectorSpectrum};
pub use grid::{AsComponents, SpectralGrid};

pub(crate) use field::{cross, dot, norm3};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{random_scalar, random_vector};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn max_diff(a: &ScalarField<f64>, b: &ScalarField<f64>) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_resolutions() {
        assert!(SpectralGrid::<f64>::new(6).is_err());
        assert!(SpectralGrid::<f64>::new(9).is_err());
        assert!(SpectralGrid::<f64>::new(8).is_ok());
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = SpectralGrid::<f64>::new(8).unwrap();
        let s = g.forward(&ScalarField::from_fn(8, |_: f64, _: f64, _: f64| 1.0)).unwrap();
        assert!((s.coeffs()[0].re - 1.0).abs() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn sine_has_two_half_amplitude_modes() {
        let g = SpectralGrid::<f64>::new(16).unwrap();
        let s = g.forward(&ScalarField::from_fn(16, |x: f64, _: f64, _: f64| x.sin())).unwrap();
        let m = g.mode_index([1, 0, 0]).unwrap();
        assert!((s.coeffs()[m].norm() - 0.5).abs() < 1e-14);
        // (-1,0,0) is the conjugate of the stored (1,0,0) mode in half storage
        let total: f64 = s.coeffs().iter().enumerate().map(|(i, z)| g.weight(i) * z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let g = SpectralGrid::<f64>::new(8).unwrap();
        assert!(g.forward(&ScalarField::zeros(10)).is_err());
        assert!(g.backward(&Spectrum::zeros(10)).is_err());
    }

    #[test]
    fn round_trip_and_parseval_on_random_fields() {
        let g = SpectralGrid::<f64>::new(16).unwrap();
        for seed in 0..100 {
            let f = random_scalar(16, seed);
            let s = g.forward(&f).unwrap();
            let back = g.backward(&s).unwrap();
            let scale = f.max_abs();
            assert!(max_diff(&f, &back) <= 1e-12 * scale, "seed {seed}");
            let phys: f64 = f.values().iter().map(|x| x * x).sum::<f64>() * g.cell_volume();
            let spec = g.l2_norm_squared(&s).unwrap();
            assert!(rel(spec, phys) < 1e-10);
        }
    }

    #[test]
    fn lambda_single_modes() {
        let g = SpectralGrid::<f64>::new(16).unwrap();
        let f = g.forward(&ScalarField::from_fn(16, |x: f64, _: f64, _: f64| (2.0 * x).sin())).unwrap();
        let out = g.backward(&g.lambda(&f, 1.0).unwrap()).unwrap();
        assert!(max_diff(&out, &ScalarField::from_fn(16, |x: f64, _: f64, _: f64| 2.0 * (2.0 * x).sin())) < 1e-13);

        let h = ScalarField::from_fn(16, |x: f64, y: f64, _: f64| x.sin() * y.cos());
        let out = g.backward(&g.lambda(&g.forward(&h).unwrap(), 2.0).unwrap()).unwrap();
        assert!(max_diff(&out, &h.map(|v| 2.0 * v)) < 1e-13);
        assert!(g.lambda(&f, -0.5).is_err());
    }

    #[test]
    fn lambda_zero_kills_mean() {
        let g = SpectralGrid::<f64>::new(8).unwrap();
        let f = g.forward(&ScalarField::from_fn(8, |x: f64, _: f64, _: f64| 3.0 + x.cos())).unwrap();
        let out = g.lambda(&f, 0.0).unwrap();
        assert_eq!(out.coeffs()[0].norm(), 0.0);
        let m = g.mode_index([1, 0, 0]).unwrap();
        assert!((out.coeffs()[m] - f.coeffs()[m]).norm() < 1e-16);
    }

    #[test]
    fn lambda_matches_brute_force_mode_loop() {
        // independent oracle: explicit triple loop over integer wavenumbers with
        // a direct DFT per retained mode
        let n = 8;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let f = g.backward(&g.dealias(&g.forward(&random_scalar(n, 3)).unwrap()).unwrap()).unwrap();
        let got = g.backward(&g.lambda(&g.forward(&f).unwrap(), 1.5).unwrap()).unwrap();
        let h = std::f64::consts::TAU / n as f64;
        let kmax = (n / 3) as i64;
        let mut want = vec![0.0; n * n * n];
        for kz in -kmax..=kmax {
            for ky in -kmax..=kmax {
                for kx in -kmax..=kmax {
                    let kk = ((kx * kx + ky * ky + kz * kz) as f64).sqrt();
                    if kk == 0.0 {
                        continue;
                    }
                    let (mut re, mut im) = (0.0, 0.0);
                    for p in 0..n * n * n {
                        let (i, j, k) = (p % n, (p / n) % n, p / (n * n));
                        let ph = -h * (kx * i as i64 + ky * j as i64 + kz * k as i64) as f64;
                        re += f.values()[p] * ph.cos();
                        im += f.values()[p] * ph.sin();
                    }
                    let norm = (n * n * n) as f64;
                    let (re, im) = (re / norm * kk.powf(1.5), im / norm * kk.powf(1.5));
                    for (p, w) in want.iter_mut().enumerate() {
                        let (i, j, k) = (p % n, (p / n) % n, p / (n * n));
                        let ph = h * (kx * i as i64 + ky * j as i64 + kz * k as i64) as f64;
                        *w += re * ph.cos() - im * ph.sin();
                    }
                }
            }
        }
        let want = ScalarField::from_vec(n, want).unwrap();
        assert!(max_diff(&got, &want) < 1e-11 * want.max_abs());
    }

    #[test]
    fn taylor_green_curl_divergence_laplacian() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let v = VectorField::from_fn(n, |x: f64, y: f64, z: f64| {
            [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]
        });
        let vh = g.forward_vector(&v).unwrap();
        let w = g.backward_vector(&g.curl(&vh).unwrap()).unwrap();
        let wz = ScalarField::from_fn(n, |x: f64, y: f64, z: f64| 2.0 * x.sin() * y.sin() * z.cos());
        assert!(max_diff(&w.comps[2], &wz) < 1e-13);
        let wx = ScalarField::from_fn(n, |x: f64, y: f64, z: f64| -x.cos() * y.sin() * z.sin());
        assert!(max_diff(&w.comps[0], &wx) < 1e-13);
        let div = g.backward(&g.divergence(&vh).unwrap()).unwrap();
        assert!(div.max_abs() < 1e-12);

        let s = g.forward(&ScalarField::from_fn(n, |x: f64, _: f64, _: f64| x.sin())).unwrap();
        let lap = g.backward(&g.laplacian(&s).unwrap()).unwrap();
        assert!(max_diff(&lap, &ScalarField::from_fn(n, |x: f64, _: f64, _: f64| -x.sin())) < 1e-13);
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal_fields() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let phi = g.forward(&ScalarField::from_fn(n, |x: f64, y: f64, _: f64| x.sin() * y.sin())).unwrap();
        let p = g.leray_project(&g.gradient(&phi).unwrap()).unwrap();
        assert!(p.max_abs() < 1e-15);

        let abc = g
            .forward_vector(&VectorField::from_fn(n, |x: f64, y: f64, z: f64| {
                [z.sin() + y.cos(), x.sin() + z.cos(), y.sin() + x.cos()]
            }))
            .unwrap();
        let q = g.leray_project(&abc).unwrap();
        let diff = q.add_scaled(&abc, -1.0).max_abs();
        assert!(diff < 1e-12);
    }

    #[test]
    fn leray_is_orthogonal_and_idempotent() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        for seed in 0..10 {
            let v = g.forward_vector(&random_vector(n, seed)).unwrap();
            let p = g.leray_project(&v).unwrap();
            let q = v.add_scaled(&p, -1.0);
            let lhs = g.l2_norm_squared(&p).unwrap() + g.l2_norm_squared(&q).unwrap();
            let rhs = g.l2_norm_squared(&v).unwrap();
            assert!(rel(lhs, rhs) < 1e-10);
            assert!(g.divergence_ratio(&p).unwrap() <= 1e-10);
            let pp = g.leray_project(&p).unwrap();
            assert!(pp.add_scaled(&p, -1.0).max_abs() <= 1e-12 * p.max_abs());
        }
    }

    #[test]
    fn dealias_mask_arithmetic() {
        let g = SpectralGrid::<f64>::new(12).unwrap();
        assert_eq!(g.dealias_cutoff(), 4);
        for m in 0..g.mode_count() {
            let k = g.mode(m);
            let keep = k.iter().all(|c| c.abs() <= 4);
            assert_eq!(g.in_dealias_band(m), keep, "{k:?}");
        }
        let f = g.forward(&random_scalar(12, 1)).unwrap();
        let d = g.dealias(&f).unwrap();
        assert_eq!(g.dealias(&d).unwrap(), d);
        let band = g.forward(&ScalarField::from_fn(12, |x: f64, y: f64, z: f64| (4.0 * x).cos() * (3.0 * y + z).sin())).unwrap();
        // only transform round-off outside the band is removed
        let kept = g.dealias(&band).unwrap();
        let diff = band.coeffs().iter().zip(kept.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-15, "{diff}");
        assert_eq!(g.dealias(&kept).unwrap(), kept);
    }

    #[test]
    fn multiplier_consistency_and_semigroup() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let mut f = g.forward(&random_scalar(n, 11)).unwrap();
        f.coeffs_mut()[0] = Default::default();
        let l2 = g.lambda(&f, 2.0).unwrap();
        let neg_lap = g.laplacian(&f).unwrap();
        let scale = l2.max_abs();
        for (a, b) in l2.coeffs().iter().zip(neg_lap.coeffs()) {
            assert!((a + b).norm() <= 1e-10 * scale);
        }
        let ab = g.lambda(&g.lambda(&f, 0.7).unwrap(), 1.1).unwrap();
        let direct = g.lambda(&f, 1.8).unwrap();
        for (a, b) in ab.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm() <= 1e-10 * direct.max_abs());
        }
    }

    #[test]
    fn spectral_norm_matches_physical_quadrature() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let f = g.forward(&random_scalar(n, 5)).unwrap();
        for s in [0.5, 1.0, 1.5] {
            let ls = g.lambda(&f, s).unwrap();
            let spec = g.l2_norm_squared(&ls).unwrap();
            let phys = g.backward(&ls).unwrap();
            let quad: f64 = phys.values().iter().map(|x| x * x).sum::<f64>() * g.cell_volume();
            assert!(rel(spec, quad) < 1e-8);
        }
    }

    #[test]
    fn curl_grad_and_div_curl_vanish() {
        let n = 16;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let f = g.forward(&random_scalar(n, 2)).unwrap();
        let cg = g.curl(&g.gradient(&f).unwrap()).unwrap();
        assert!(cg.max_abs() <= 1e-10 * f.max_abs());
        let v = g.forward_vector(&random_vector(n, 4)).unwrap();
        let dc = g.divergence(&g.curl(&v).unwrap()).unwrap();
        assert!(dc.max_abs() <= 1e-10 * v.max_abs());
    }

    #[test]
    fn single_precision_round_trip() {
        let g = SpectralGrid::<f32>::new(8).unwrap();
        let f = ScalarField::<f32>::from_fn(8, |x: f32, y: f32, z: f32| (x + 2.0 * y).sin() * z.cos());
        let back = g.backward(&g.forward(&f).unwrap()).unwrap();
        let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
        assert!(err < 1e-5);
    }

    #[test]
    fn padding_interpolates_on_the_coarse_lattice() {
        let (n, r) = (8, 3);
        let (g, fine) = (SpectralGrid::<f64>::new(n).unwrap(), SpectralGrid::<f64>::new(n * r).unwrap());
        // random data carries Nyquist content on every axis
        let f = random_scalar(n, 21);
        let up = fine.backward(&g.pad_to(&g.forward(&f).unwrap(), &fine).unwrap()).unwrap();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    assert!((up.at(r * i, r * j, r * k) - f.at(i, j, k)).abs() <= 1e-12, "{i} {j} {k}");
                }
            }
        }
        let smooth = |x: f64, y: f64, z: f64| (x + 2.0 * y).sin() + (3.0 * z - y).cos();
        let up = fine
            .backward(&g.pad_to(&g.forward(&ScalarField::from_fn(n, smooth)).unwrap(), &fine).unwrap())
            .unwrap();
        assert!(max_diff(&up, &ScalarField::from_fn(n * r, smooth)) <= 1e-12);
        assert!(fine.pad_to(&fine.forward(&up).unwrap(), &g).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_property(seed in 0u64..10_000) {
            let g = SpectralGrid::<f64>::new(8).unwrap();
            let f = random_scalar(8, seed);
            let back = g.backward(&g.forward(&f).unwrap()).unwrap();
            prop_assert!(max_diff(&f, &back) <= 1e-12 * f.max_abs());
        }
    }
}
