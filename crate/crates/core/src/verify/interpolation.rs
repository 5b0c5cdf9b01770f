use crate::error::{Error, Result};
use crate::norms::spatial_norm;
use crate::scalar::{Exponent, Real};
use crate::spectral::{ScalarField, SpectralGrid, VectorSpectrum};
use crate::verify::exponents::{gradient_powers, lambda_powers, vorticity_powers};

/// Which interpolation inequality to probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterpolationKind<T> {
    /// `‖ω‖_p ≤ C ‖Λ^{β/2}v‖^{3/p+β/2−3/2} ‖∇Λ^{β/2}v‖^{5/2−3/p−β/2}`.
    Vorticity { beta: T, p: T },
    /// `‖Λ^βv‖_q ≤ C ‖Λ^{β/2}v‖^{3/q−β/2−1/2} ‖∇Λ^{β/2}v‖^{3/2−3/q+β/2}`.
    LambdaBeta { beta: T, q: T },
    /// `‖∇v‖_{2γ/(γ−2)} ≤ C ‖∇v‖_2^{1−3/γ} ‖Δv‖_2^{3/γ}`, γ ∈ [3, ∞].
    Gradient { gamma: Exponent<T> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationRatio<T> {
    pub lhs: T,
    pub low_norm: T,
    pub high_norm: T,
    pub powers: (T, T),
    /// `lhs / (low^θ₁ high^θ₂)`.
    pub ratio: T,
}

fn homogeneous<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>, order: T) -> Result<T> {
    grid.spectral_quadratic(v, |m| {
        let k2 = grid.k_squared(m);
        if k2 == T::zero() {
            T::zero()
        } else {
            k2.powf(order)
        }
    })
    .map(|x| x.sqrt())
}

fn check_powers<T: Real>(powers: (T, T)) -> Result<()> {
    let tol = T::lit(1e-12);
    if powers.0 < -tol || powers.1 < -tol {
        return Err(Error::InvalidParameter(format!(
            "interpolation powers ({}, {}) fall outside [0, 1]",
            powers.0, powers.1
        )));
    }
    Ok(())
}

/// Evaluates one side-by-side instance of an interpolation inequality on `v`.
pub fn interpolation_check<T: Real>(
    grid: &SpectralGrid<T>,
    v: &VectorSpectrum<T>,
    kind: InterpolationKind<T>,
) -> Result<InterpolationRatio<T>> {
    let two = T::lit(2.0);
    let (lhs, low_norm, high_norm, powers) = match kind {
        InterpolationKind::Vorticity { beta, p } => {
            let powers = vorticity_powers(&beta, &p);
            check_powers(powers)?;
            let w = grid.backward_vector(&grid.curl(v)?)?;
            let lhs = spatial_norm(grid, &w.magnitude(), Exponent::Finite(p), None)?;
            (lhs, homogeneous(grid, v, beta / two)?, homogeneous(grid, v, T::one() + beta / two)?, powers)
        }
        InterpolationKind::LambdaBeta { beta, q } => {
            let powers = lambda_powers(&beta, &q);
            check_powers(powers)?;
            let lv = grid.backward_vector(&grid.lambda(v, beta)?)?;
            let lhs = spatial_norm(grid, &lv.magnitude(), Exponent::Finite(q), None)?;
            (lhs, homogeneous(grid, v, beta / two)?, homogeneous(grid, v, T::one() + beta / two)?, powers)
        }
        InterpolationKind::Gradient { gamma } => {
            if gamma.finite().is_some_and(|g| g < T::lit(3.0)) {
                return Err(Error::InvalidParameter(format!("gradient interpolation needs γ ≥ 3, got {gamma}")));
            }
            let powers = gradient_powers(&gamma);
            let target = match gamma {
                Exponent::Infinity => two,
                Exponent::Finite(g) => two * g / (g - two),
            };
            let mut sq = vec![T::zero(); grid.point_count()];
            for c in &v.comps {
                let grad = grid.backward_vector(&grid.gradient(c)?)?;
                for d in &grad.comps {
                    for (s, x) in sq.iter_mut().zip(d.values()) {
                        *s = *s + *x * *x;
                    }
                }
            }
            let mag = ScalarField::from_vec(grid.n(), sq.into_iter().map(T::sqrt).collect())?;
            let lhs = spatial_norm(grid, &mag, Exponent::Finite(target), None)?;
            (lhs, homogeneous(grid, v, T::one())?, homogeneous(grid, v, two)?, powers)
        }
    };
    let denom = low_norm.powf(powers.0) * high_norm.powf(powers.1);
    if !(denom > T::zero()) {
        return Err(Error::Degenerate("interpolation denominator vanishes".into()));
    }
    Ok(InterpolationRatio { lhs, low_norm, high_norm, powers, ratio: lhs / denom })
}

/// Largest ratio over a corpus of fields: the empirical interpolation constant.
pub fn empirical_constant<T: Real>(
    grid: &SpectralGrid<T>,
    fields: impl IntoIterator<Item = VectorSpectrum<T>>,
    kind: InterpolationKind<T>,
) -> Result<T> {
    let mut best: Option<T> = None;
    for v in fields {
        let r = interpolation_check(grid, &v, kind)?.ratio;
        best = Some(best.map_or(r, |b| b.max(r)));
    }
    best.ok_or_else(|| Error::Degenerate("empty corpus".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::initial;
    use crate::spectral::VectorField;

    #[test]
    fn single_shell_ratio_is_one_for_l2() {
        // v = (0, sin 2x, 0) sits on |k| = 2: ‖ω‖₂ = 2‖v‖ = ‖Λ^{β/2}v‖^θ₁ ‖Λ^{1+β/2}v‖^θ₂
        let g = SpectralGrid::<f64>::new(16).unwrap();
        let v = g.forward_vector(&VectorField::from_fn(16, |x: f64, _: f64, _: f64| [0.0, (2.0 * x).sin(), 0.0])).unwrap();
        for beta in [1.0, 1.5, 2.0] {
            let r = interpolation_check(&g, &v, InterpolationKind::Vorticity { beta, p: 2.0 }).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-12, "{r:?}");
        }
        let r = interpolation_check(&g, &v, InterpolationKind::Gradient { gamma: Exponent::Infinity }).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_shell_lambda_ratio_against_direct_sum() {
        // |Λ^βv| = 2^β |sin 2x|; its lattice L^q norm is summed directly, the L² factors are exact
        let n = 32;
        let g = SpectralGrid::<f64>::new(n).unwrap();
        let v = g.forward_vector(&VectorField::from_fn(n, |x: f64, _: f64, _: f64| [0.0, (2.0 * x).sin(), 0.0])).unwrap();
        let (beta, q) = (1.0, 3.0);
        let r = interpolation_check(&g, &v, InterpolationKind::LambdaBeta { beta, q }).unwrap();
        let h = std::f64::consts::TAU / n as f64;
        let line: f64 = (0..n).map(|i| (2.0 * i as f64 * h).sin().abs().powf(q)).sum();
        let lq = 2f64.powf(beta) * (line * h * std::f64::consts::TAU.powi(2)).powf(1.0 / q);
        let l2 = (4.0 * std::f64::consts::PI.powi(3)).sqrt();
        let (a, d) = (2f64.powf(beta / 2.0) * l2, 2f64.powf(1.0 + beta / 2.0) * l2);
        let want = lq / (a.powf(r.powers.0) * d.powf(r.powers.1));
        assert!((r.ratio - want).abs() < 1e-12 * want, "{} vs {want}", r.ratio);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let g = SpectralGrid::<f64>::new(8).unwrap();
        let z = initial::zero(&g);
        assert!(matches!(
            interpolation_check(&g, &z, InterpolationKind::Vorticity { beta: 1.0, p: 2.0 }),
            Err(Error::Degenerate(_))
        ));
        let v = initial::taylor_green(&g, 1.0).unwrap();
        assert!(interpolation_check(&g, &v, InterpolationKind::Vorticity { beta: 1.0, p: 10.0 }).is_err());
        assert!(interpolation_check(&g, &v, InterpolationKind::Gradient { gamma: Exponent::Finite(2.5) }).is_err());
    }

    #[test]
    fn corpus_constant_is_finite() {
        let g = SpectralGrid::<f64>::new(16).unwrap();
        let corpus = (0..5).map(|s| initial::random_divfree(&g, -5.0 / 3.0, s, 1.0).unwrap());
        let c = empirical_constant(&g, corpus, InterpolationKind::Vorticity { beta: 1.0, p: 2.4 }).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }
}
