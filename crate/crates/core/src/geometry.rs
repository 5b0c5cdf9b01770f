//! Direction fields and positive-part triple-product criterion fields.
//!
//! A direction `u/|u|` is set to the zero vector wherever `|u(x)|` does not
//! exceed `floor · max_x |u|`. All products are formed pointwise in physical
//! space at full grid resolution.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{cross, dot, norm3, ScalarField, SpectralGrid, VectorField, VectorSpectrum};

/// Default relative floor below which a direction field is taken to be zero.
pub const DEFAULT_DIRECTION_FLOOR: f64 = 1e-13;

/// Physical-space quantities derived from one velocity spectrum, computed on demand.
pub struct FlowFields<'g, T: Real> {
    grid: &'g SpectralGrid<T>,
    velocity_hat: VectorSpectrum<T>,
    vorticity_hat: VectorSpectrum<T>,
    velocity: VectorField<T>,
    vorticity: VectorField<T>,
    curl_vorticity: Option<VectorField<T>>,
    lambda: Vec<(T, VectorField<T>)>,
}

impl<'g, T: Real> FlowFields<'g, T> {
    pub fn new(grid: &'g SpectralGrid<T>, velocity_hat: &VectorSpectrum<T>) -> Result<Self> {
        let vorticity_hat = grid.curl(velocity_hat)?;
        Ok(Self {
            grid,
            velocity: grid.backward_vector(velocity_hat)?,
            vorticity: grid.backward_vector(&vorticity_hat)?,
            velocity_hat: velocity_hat.clone(),
            vorticity_hat,
            curl_vorticity: None,
            lambda: Vec::new(),
        })
    }

    pub fn grid(&self) -> &'g SpectralGrid<T> {
        self.grid
    }

    pub fn velocity_hat(&self) -> &VectorSpectrum<T> {
        &self.velocity_hat
    }

    pub fn velocity(&self) -> &VectorField<T> {
        &self.velocity
    }

    pub fn vorticity(&self) -> &VectorField<T> {
        &self.vorticity
    }

    /// Computes `∇×ω` as the spectral curl of the vorticity.
    pub fn prepare_curl_vorticity(&mut self) -> Result<()> {
        if self.curl_vorticity.is_none() {
            let c = self.grid.curl(&self.vorticity_hat)?;
            self.curl_vorticity = Some(self.grid.backward_vector(&c)?);
        }
        Ok(())
    }

    pub fn curl_vorticity(&self) -> Option<&VectorField<T>> {
        self.curl_vorticity.as_ref()
    }

    pub fn prepare_lambda(&mut self, beta: T) -> Result<()> {
        if self.lambda_velocity(beta).is_none() {
            let l = self.grid.lambda(&self.velocity_hat, beta)?;
            let field = self.grid.backward_vector(&l)?;
            self.lambda.push((beta, field));
        }
        Ok(())
    }

    /// `Λ^β v` in physical space, if prepared.
    pub fn lambda_velocity(&self, beta: T) -> Option<&VectorField<T>> {
        self.lambda.iter().find(|(b, _)| *b == beta).map(|(_, f)| f)
    }
}

/// `u/|u|` with the zero convention below `floor · max|u|`.
pub fn direction<T: Real>(u: &VectorField<T>, floor: T) -> Result<VectorField<T>> {
    if !(floor >= T::zero()) {
        return Err(Error::InvalidParameter(format!("direction floor must be ≥ 0, got {floor}")));
    }
    let threshold = floor * u.max_magnitude();
    let n = u.n();
    let mut out = VectorField::zeros(n);
    for idx in 0..u.len() {
        let d = unit(u.get(idx), threshold);
        for c in 0..3 {
            out.comps[c].values_mut()[idx] = d[c];
        }
    }
    Ok(out)
}

#[inline]
fn unit<T: Real>(a: [T; 3], threshold: T) -> [T; 3] {
    let m = norm3(a);
    if m <= threshold {
        [T::zero(); 3]
    } else {
        [a[0] / m, a[1] / m, a[2] / m]
    }
}

/// Which triple-product functional a criterion field represents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriterionKind<T> {
    /// `{(v × ω/|ω|) · Λ^βv/|Λ^βv|}_+`, β ∈ [1, 2].
    KappaBeta { beta: T },
    /// `{(v × ω/|ω|) · (∇×ω)/|∇×ω|}_+`.
    Kappa,
    /// `{(v/|v| × ω) · (∇×ω)/|∇×ω|}_+`.
    Eta,
    /// `|v|^b {(v/|v| × ω/|ω|) · (∇×ω)/|∇×ω|}_+`, b > 0.
    WeightedKappa { b: T },
}

impl<T: Real> CriterionKind<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CriterionKind::KappaBeta { beta } if !(beta >= T::one() && beta <= T::lit(2.0)) => {
                Err(Error::InvalidParameter(format!("κ_β requires β ∈ [1, 2], got {beta}")))
            }
            CriterionKind::WeightedKappa { b } if !(b > T::zero()) => {
                Err(Error::InvalidParameter(format!("weighted κ requires b > 0, got {b}")))
            }
            _ => Ok(()),
        }
    }

    /// Short label used in CSV headers.
    pub fn label(&self) -> String {
        match self {
            CriterionKind::KappaBeta { beta } => format!("kappa_beta{beta}"),
            CriterionKind::Kappa => "kappa".to_string(),
            CriterionKind::Eta => "eta".to_string(),
            CriterionKind::WeightedKappa { b } => format!("weighted_kappa_b{b}"),
        }
    }
}

/// Nonnegative criterion values sampled on the grid.
#[derive(Clone, Debug)]
pub struct CriterionField<T> {
    pub kind: CriterionKind<T>,
    pub floor: T,
    pub values: ScalarField<T>,
}

/// Evaluates a criterion field from prepared flow quantities.
pub fn criterion_from_flow<T: Real>(
    flow: &mut FlowFields<'_, T>,
    kind: CriterionKind<T>,
    floor: T,
) -> Result<CriterionField<T>> {
    kind.validate()?;
    match kind {
        CriterionKind::KappaBeta { beta } => flow.prepare_lambda(beta)?,
        _ => flow.prepare_curl_vorticity()?,
    }
    let v = flow.velocity();
    let w = flow.vorticity();
    let target = match kind {
        CriterionKind::KappaBeta { beta } => flow.lambda_velocity(beta),
        _ => flow.curl_vorticity(),
    }
    .expect("target field prepared above");

    let v_cut = floor * v.max_magnitude();
    let w_cut = floor * w.max_magnitude();
    let t_cut = floor * target.max_magnitude();
    let n = v.n();
    let mut values = Vec::with_capacity(v.len());
    for idx in 0..v.len() {
        let (vi, wi, ti) = (v.get(idx), w.get(idx), target.get(idx));
        let t_dir = unit(ti, t_cut);
        let triple = match kind {
            CriterionKind::KappaBeta { .. } | CriterionKind::Kappa => dot(cross(vi, unit(wi, w_cut)), t_dir),
            CriterionKind::Eta => dot(cross(unit(vi, v_cut), wi), t_dir),
            CriterionKind::WeightedKappa { b } => {
                let base = dot(cross(unit(vi, v_cut), unit(wi, w_cut)), t_dir).max(T::zero());
                norm3(vi).powf(b) * base
            }
        };
        values.push(triple.max(T::zero()));
    }
    Ok(CriterionField { kind, floor, values: ScalarField::from_vec(n, values)? })
}

/// Evaluates a criterion field directly from a velocity spectrum.
pub fn criterion_field<T: Real>(
    grid: &SpectralGrid<T>,
    velocity_hat: &VectorSpectrum<T>,
    kind: CriterionKind<T>,
    floor: T,
) -> Result<CriterionField<T>> {
    let mut flow = FlowFields::new(grid, velocity_hat)?;
    criterion_from_flow(&mut flow, kind, floor)
}

pub fn kappa_beta_field<T: Real>(
    grid: &SpectralGrid<T>,
    v: &VectorSpectrum<T>,
    beta: T,
    floor: T,
) -> Result<CriterionField<T>> {
    criterion_field(grid, v, CriterionKind::KappaBeta { beta }, floor)
}

pub fn kappa_field<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>, floor: T) -> Result<CriterionField<T>> {
    criterion_field(grid, v, CriterionKind::Kappa, floor)
}

pub fn eta_field<T: Real>(grid: &SpectralGrid<T>, v: &VectorSpectrum<T>, floor: T) -> Result<CriterionField<T>> {
    criterion_field(grid, v, CriterionKind::Eta, floor)
}

pub fn weighted_kappa_b<T: Real>(
    grid: &SpectralGrid<T>,
    v: &VectorSpectrum<T>,
    b: T,
    floor: T,
) -> Result<CriterionField<T>> {
    criterion_field(grid, v, CriterionKind::WeightedKappa { b }, floor)
}
