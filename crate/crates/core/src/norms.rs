//! Spatial `L^γ` norms, temporal `L^α` composition, parabolic cylinders and
//! Sobolev norms computed from Fourier coefficients.

use crate::error::{Error, Result};
use crate::scalar::{Exponent, Real};
use crate::spectral::{AsComponents, Modal, ScalarField, SpectralGrid};

/// Lattice points of a periodic ball `{y : |y − x₀|_{T³} < r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallMask<T> {
    pub center: [T; 3],
    pub radius: T,
    inside: Vec<bool>,
    count: usize,
}

impl<T: Real> BallMask<T> {
    pub fn contains(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> &[bool] {
        &self.inside
    }
}

/// Builds the periodic ball mask; requires `0 < r < π`.
pub fn cylinder_mask<T: Real>(grid: &SpectralGrid<T>, center: [T; 3], radius: T) -> Result<BallMask<T>> {
    if !(radius > T::zero() && radius < T::PI()) {
        return Err(Error::InvalidParameter(format!("ball radius must lie in (0, π), got {radius}")));
    }
    let n = grid.n();
    let nf = T::from_usize_lossy(n);
    let half = nf / T::lit(2.0);
    let h = grid.spacing();
    // distances measured in lattice units
    let c: Vec<T> = center.iter().map(|&x| x / h).collect();
    let r2 = (radius / h).powi(2);
    let offset = |i: usize, c: T| -> T {
        let shifted = T::from_usize_lossy(i) - c + half;
        let d = shifted - nf * (shifted / nf).floor() - half;
        d * d
    };
    let dx: Vec<T> = (0..n).map(|i| offset(i, c[0])).collect();
    let dy: Vec<T> = (0..n).map(|i| offset(i, c[1])).collect();
    let dz: Vec<T> = (0..n).map(|i| offset(i, c[2])).collect();
    let mut inside = Vec::with_capacity(n * n * n);
    let mut count = 0;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let hit = dx[i] + dy[j] + dz[k] < r2;
                count += hit as usize;
                inside.push(hit);
            }
        }
    }
    Ok(BallMask { center, radius, inside, count })
}

/// `‖f‖_{L^γ}` by lattice quadrature, optionally restricted to a ball; `γ = ∞` is the masked maximum.
pub fn spatial_norm<T: Real>(
    grid: &SpectralGrid<T>,
    f: &ScalarField<T>,
    gamma: Exponent<T>,
    mask: Option<&BallMask<T>>,
) -> Result<T> {
    if f.n() != grid.n() {
        return Err(Error::SizeMismatch { expected: grid.n(), found: f.n() });
    }
    if let Some(m) = mask {
        if m.inside.len() != f.values().len() {
            return Err(Error::SizeMismatch { expected: grid.n(), found: f.n() });
        }
        if m.count == 0 {
            return Err(Error::EmptyMask);
        }
    }
    let selected = f.values().iter().enumerate().filter(|(i, _)| mask.map_or(true, |m| m.inside[*i]));
    match gamma {
        Exponent::Infinity => Ok(selected.fold(T::zero(), |acc, (_, x)| acc.max(x.abs()))),
        Exponent::Finite(g) => {
            if !(g >= T::one()) {
                return Err(Error::InvalidParameter(format!("γ must be ≥ 1, got {g}")));
            }
            let sum = selected.fold(T::zero(), |acc, (_, x)| acc + x.abs().powf(g));
            Ok((sum * grid.cell_volume()).powf(T::one() / g))
        }
    }
}

/// A closed time interval used to compose spatial norms in time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeWindow<T> {
    pub start: T,
    pub end: T,
    /// True when the requested window was cut back to the simulated interval.
    pub clipped: bool,
}

/// Where a criterion is measured: the whole slab or a parabolic cylinder `B(x₀, r) × (t₀ − r², t₀)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region<T> {
    Full,
    Cylinder { center: [T; 3], top: T, radius: T },
}

impl<T: Real> Region<T> {
    pub fn validate(&self) -> Result<()> {
        if let Region::Cylinder { radius, .. } = *self {
            if !(radius > T::zero() && radius < T::PI()) {
                return Err(Error::InvalidParameter(format!("cylinder radius must lie in (0, π), got {radius}")));
            }
        }
        Ok(())
    }

    pub fn mask(&self, grid: &SpectralGrid<T>) -> Result<Option<BallMask<T>>> {
        match *self {
            Region::Full => Ok(None),
            Region::Cylinder { center, radius, .. } => cylinder_mask(grid, center, radius).map(Some),
        }
    }

    /// Time window of the region, clipped to `[first, last]`.
    pub fn window(&self, first: T, last: T) -> Result<TimeWindow<T>> {
        match *self {
            Region::Full => Ok(TimeWindow { start: first, end: last, clipped: false }),
            Region::Cylinder { top, radius, .. } => {
                let (start, end) = (top - radius * radius, top);
                let (cs, ce) = (start.max(first), end.min(last));
                if cs > ce {
                    return Err(Error::WindowOutsideSamples {
                        start: start.as_f64(),
                        end: end.as_f64(),
                        first: first.as_f64(),
                        last: last.as_f64(),
                    });
                }
                let clipped = cs != start || ce != end;
                if clipped {
                    log::warn!(
                        "cylinder window ({}, {}) clipped to [{}, {}]",
                        start.as_f64(),
                        end.as_f64(),
                        cs.as_f64(),
                        ce.as_f64()
                    );
                }
                Ok(TimeWindow { start: cs, end: ce, clipped })
            }
        }
    }
}

fn interpolate<T: Real>(series: &[(T, T)], t: T) -> T {
    let pos = series.partition_point(|s| s.0 < t);
    if pos == 0 {
        return series[0].1;
    }
    if pos == series.len() {
        return series[pos - 1].1;
    }
    let (t0, f0) = series[pos - 1];
    let (t1, f1) = series[pos];
    if t1 == t0 {
        return f1;
    }
    f0 + (f1 - f0) * (t - t0) / (t1 - t0)
}

/// Composes spatial-norm samples `(tᵢ, ‖f(tᵢ)‖)` in `L^α` over `window` by trapezoid
/// quadrature; `α = ∞` is the maximum of the samples in the window.
pub fn mixed_norm<T: Real>(series: &[(T, T)], alpha: Exponent<T>, window: (T, T)) -> Result<T> {
    let (a, b) = window;
    if series.is_empty() {
        return Err(Error::TooSparse("no samples".into()));
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    let (first, last) = (series[0].0, series[series.len() - 1].0);
    let slack = T::lit(1e-12) * (T::one() + last.abs().max(first.abs()));
    if a > b || a < first - slack || b > last + slack {
        return Err(Error::WindowOutsideSamples {
            start: a.as_f64(),
            end: b.as_f64(),
            first: first.as_f64(),
            last: last.as_f64(),
        });
    }
    let (a, b) = (a.max(first), b.min(last));
    let inner = series.iter().filter(|(t, _)| *t >= a && *t <= b);
    match alpha {
        Exponent::Infinity => {
            let m = inner.fold(None, |m: Option<T>, (_, f)| Some(m.map_or(f.abs(), |m| m.max(f.abs()))));
            Ok(m.unwrap_or_else(|| interpolate(series, a).abs().max(interpolate(series, b).abs())))
        }
        Exponent::Finite(al) => {
            if !(al >= T::one()) {
                return Err(Error::InvalidParameter(format!("α must be ≥ 1, got {al}")));
            }
            if series.len() < 2 && a != b {
                return Err(Error::TooSparse("L^α in time needs at least two samples".into()));
            }
            let mut pts: Vec<(T, T)> = Vec::new();
            pts.push((a, interpolate(series, a)));
            pts.extend(series.iter().copied().filter(|(t, _)| *t > a && *t < b));
            if b > a {
                pts.push((b, interpolate(series, b)));
            }
            let values: Vec<(T, T)> = pts.iter().map(|&(t, f)| (t, f.abs().powf(al))).collect();
            Ok(trapezoid(&values).powf(T::one() / al))
        }
    }
}

/// Trapezoid rule over possibly non-uniform samples.
pub fn trapezoid<T: Real>(samples: &[(T, T)]) -> T {
    samples
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / T::lit(2.0))
}

/// Running trapezoid integral, starting from 0 at the first sample.
pub fn cumulative_trapezoid<T: Real>(samples: &[(T, T)]) -> Vec<T> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = T::zero();
    if !samples.is_empty() {
        out.push(acc);
    }
    for w in samples.windows(2) {
        acc = acc + (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / T::lit(2.0);
        out.push(acc);
    }
    out
}

/// Running integral with fourth-order accuracy on uniform samples: composite Simpson
/// on even indices, Simpson plus a 3/8 panel on odd indices. Falls back to the
/// trapezoid rule for fewer than four samples.
pub fn cumulative_simpson<T: Real>(samples: &[(T, T)]) -> Vec<T> {
    let len = samples.len();
    if len < 4 {
        return cumulative_trapezoid(samples);
    }
    let f = |i: usize| samples[i].1;
    let h = |i: usize, j: usize| samples[j].0 - samples[i].0;
    let three = T::lit(3.0);
    let mut even = vec![T::zero(); len];
    for i in (2..len).step_by(2) {
        even[i] = even[i - 2] + h(i - 2, i) / T::lit(6.0) * (f(i - 2) + T::lit(4.0) * f(i - 1) + f(i));
    }
    let mut out = vec![T::zero(); len];
    for i in 0..len {
        out[i] = if i % 2 == 0 {
            even[i]
        } else if i == 1 {
            // reuse the first 3/8 panel backwards: ∫₀¹ from the cubic through 0..3
            let hh = h(0, 1);
            hh / T::lit(24.0) * (T::lit(9.0) * f(0) + T::lit(19.0) * f(1) - T::lit(5.0) * f(2) + f(3))
        } else {
            even[i - 3] + h(i - 3, i) / T::lit(8.0) * (f(i - 3) + three * f(i - 2) + three * f(i - 1) + f(i))
        };
    }
    out
}

/// Homogeneous Sobolev norm `‖Λ^s f‖_{L²}` from Fourier coefficients.
pub fn sobolev_norm<T: Real, M: Modal<T> + AsComponents<T>>(grid: &SpectralGrid<T>, f: &M, s: T) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidParameter(format!("Sobolev order must be ≥ 0, got {s}")));
    }
    grid.spectral_quadratic(f, |m| if m == 0 { T::zero() } else { grid.k_squared(m).powf(s) }).map(|x| x.sqrt())
}

/// Inhomogeneous `H^s` norm `(‖f‖²_{L²} + ‖Λ^s f‖²_{L²})^{1/2}`.
pub fn sobolev_norm_inhomogeneous<T: Real, M: Modal<T> + AsComponents<T>>(
    grid: &SpectralGrid<T>,
    f: &M,
    s: T,
) -> Result<T> {
    let l2 = grid.l2_norm_squared(f)?;
    let hs = sobolev_norm(grid, f, s)?;
    Ok((l2 + hs * hs).sqrt())
}
