use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::{BetaTerms, Trajectory};

/// Time quadrature used to compare `ΔE_β/Δt` with the interval average of `D_β − T_β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResidualScheme {
    /// Endpoint average: second order in the sample spacing.
    Trapezoid,
    /// Cubic-interpolation interval average (weights −1, 13, 13, −1 over 24, one-sided at
    /// the ends): fourth order on uniform samples.
    #[default]
    FourthOrder,
}

/// Minimum sample count accepted by [`energy_balance_residual`].
pub const MIN_BALANCE_SAMPLES: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyBalanceReport<T> {
    pub beta: T,
    pub scheme: ResidualScheme,
    /// `(interval midpoint, ΔE_β/Δt + ⟨D_β − T_β⟩)` per sample interval.
    pub residuals: Vec<(T, T)>,
    pub max_abs: T,
    /// `max_t D_β`, the normalisation of [`Self::relative`].
    pub scale: T,
    pub relative: T,
}

/// Residual of `dE_β/dt + D_β − T_β = 0` between consecutive samples.
pub fn energy_balance_residual<T: Real>(
    trajectory: &Trajectory<T>,
    beta: T,
    scheme: ResidualScheme,
) -> Result<EnergyBalanceReport<T>> {
    let series = trajectory.beta_series(beta)?;
    energy_balance_from_series(&series, beta, scheme)
}

pub fn energy_balance_from_series<T: Real>(
    series: &[(T, BetaTerms<T>)],
    beta: T,
    scheme: ResidualScheme,
) -> Result<EnergyBalanceReport<T>> {
    let m = series.len();
    if m < MIN_BALANCE_SAMPLES {
        return Err(Error::TooSparse(format!(
            "energy balance needs at least {MIN_BALANCE_SAMPLES} samples, got {m}"
        )));
    }
    let h0 = series[1].0 - series[0].0;
    if scheme == ResidualScheme::FourthOrder {
        let uniform = series
            .windows(2)
            .all(|w| ((w[1].0 - w[0].0) - h0).abs() <= T::lit(1e-9) * h0.abs());
        if !uniform {
            return Err(Error::TooSparse("fourth-order energy balance needs uniformly spaced samples".into()));
        }
    }
    let f: Vec<T> = series.iter().map(|(_, b)| b.dissipation - b.production).collect();
    let c24 = T::lit(24.0);
    let average = |i: usize| -> T {
        match scheme {
            ResidualScheme::Trapezoid => (f[i] + f[i + 1]) / T::lit(2.0),
            ResidualScheme::FourthOrder => {
                if i == 0 {
                    (T::lit(9.0) * f[0] + T::lit(19.0) * f[1] - T::lit(5.0) * f[2] + f[3]) / c24
                } else if i + 2 == m {
                    (f[m - 4] - T::lit(5.0) * f[m - 3] + T::lit(19.0) * f[m - 2] + T::lit(9.0) * f[m - 1]) / c24
                } else {
                    (-f[i - 1] + T::lit(13.0) * (f[i] + f[i + 1]) - f[i + 2]) / c24
                }
            }
        }
    };
    let mut residuals = Vec::with_capacity(m - 1);
    for i in 0..m - 1 {
        let (t0, a) = series[i];
        let (t1, b) = series[i + 1];
        let r = (b.energy - a.energy) / (t1 - t0) + average(i);
        residuals.push(((t0 + t1) / T::lit(2.0), r));
    }
    let max_abs = residuals.iter().fold(T::zero(), |m, r| m.max(r.1.abs()));
    let scale = series.iter().fold(T::zero(), |m, (_, b)| m.max(b.dissipation));
    let relative = if max_abs == T::zero() { T::zero() } else { max_abs / scale };
    Ok(EnergyBalanceReport { beta, scheme, residuals, max_abs, scale, relative })
}
