//! Exponent bookkeeping for the regularity criteria and the energy-estimate chain.
//!
//! Everything here is generic over an exact-arithmetic-capable field so the
//! identities can be checked with `num_rational::Ratio<i64>` as well as floats.

use std::fmt::{self, Debug, Display};

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::scalar::Exponent;

/// Field operations needed for exponent arithmetic.
pub trait ExponentField: Num + PartialOrd + Clone + FromPrimitive + Display + Debug {}
impl<Q: Num + PartialOrd + Clone + FromPrimitive + Display + Debug> ExponentField for Q {}

fn int<Q: ExponentField>(i: i64) -> Q {
    Q::from_i64(i).expect("small integer representable")
}

fn ratio<Q: ExponentField>(a: i64, b: i64) -> Q {
    int::<Q>(a) / int::<Q>(b)
}

/// `3/γ`, with `3/∞ = 0`.
fn inverse<Q: ExponentField>(x: &Exponent<Q>, scale: i64) -> Q {
    match x {
        Exponent::Finite(v) => int::<Q>(scale) / v.clone(),
        Exponent::Infinity => Q::zero(),
    }
}

/// Which hypothesis an exponent pair is meant to satisfy.
#[derive(Clone, Debug, PartialEq)]
pub enum Target<Q> {
    /// Global smallness of κ_β in `L^{3,∞}`.
    GlobalSmallness,
    /// Global Serrin-type integrability of κ_β: `γ ∈ (3,∞]`, `α ∈ [2,∞]`, `3/γ + 2/α ≤ 1`.
    GlobalSerrin,
    /// Local smallness of κ in `L^{3,∞}` on a cylinder.
    LocalSmallness,
    /// Local Serrin-type integrability of κ on a cylinder, same range as the global one.
    LocalSerrin,
    /// Local integrability of η: `γ ∈ [2,∞]`, `α ∈ [2,∞]`, `3/γ + 2/α ≤ 2`.
    LocalEta,
    /// Local smallness of the `|v|^b`-weighted κ in `L^{3/b,∞}`.
    WeightedSmallness { b: Q },
}

impl<Q: Display> Display for Target<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::GlobalSmallness => write!(f, "global-smallness"),
            Target::GlobalSerrin => write!(f, "global-serrin"),
            Target::LocalSmallness => write!(f, "local-smallness"),
            Target::LocalSerrin => write!(f, "local-serrin"),
            Target::LocalEta => write!(f, "local-eta"),
            Target::WeightedSmallness { b } => write!(f, "weighted-smallness(b={b})"),
        }
    }
}

/// Outcome of [`check_exponents`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: String,
}

impl Admissibility {
    fn ok(reason: impl Into<String>) -> Self {
        Self { admissible: true, reason: reason.into() }
    }

    fn violation(reason: impl Into<String>) -> Self {
        Self { admissible: false, reason: reason.into() }
    }
}

fn show<Q: Display>(e: &Exponent<Q>) -> String {
    e.to_string()
}

/// Checks `(γ, α)` against the exponent range of `target`.
pub fn check_exponents<Q: ExponentField>(gamma: &Exponent<Q>, alpha: &Exponent<Q>, target: &Target<Q>) -> Admissibility {
    let (g, a) = (show(gamma), show(alpha));
    let smallness = |want_gamma: Q| {
        let gamma_ok = matches!(gamma, Exponent::Finite(x) if *x == want_gamma);
        if gamma_ok && matches!(alpha, Exponent::Infinity) {
            Admissibility::ok(format!("(γ, α) = ({g}, {a}) is the smallness pair ({want_gamma}, inf)"))
        } else {
            Admissibility::violation(format!("smallness form requires (γ, α) = ({want_gamma}, inf), got ({g}, {a})"))
        }
    };
    let serrin = |gamma_min: Q, gamma_open: bool, bound: Q| {
        let gamma_ok = match gamma {
            Exponent::Infinity => true,
            Exponent::Finite(x) => {
                if gamma_open {
                    *x > gamma_min
                } else {
                    *x >= gamma_min
                }
            }
        };
        if !gamma_ok {
            let bracket = if gamma_open { "(" } else { "[" };
            return Admissibility::violation(format!("γ = {g} outside {bracket}{gamma_min}, inf]"));
        }
        let alpha_ok = match alpha {
            Exponent::Infinity => true,
            Exponent::Finite(x) => *x >= int::<Q>(2),
        };
        if !alpha_ok {
            return Admissibility::violation(format!("α = {a} outside [2, inf]"));
        }
        let sum = inverse(gamma, 3) + inverse(alpha, 2);
        if sum <= bound {
            Admissibility::ok(format!("3/γ + 2/α = {sum} ≤ {bound}"))
        } else {
            Admissibility::violation(format!("3/γ + 2/α = {sum} exceeds {bound}"))
        }
    };
    match target {
        Target::GlobalSmallness | Target::LocalSmallness => smallness(int(3)),
        Target::GlobalSerrin | Target::LocalSerrin => serrin(int(3), true, Q::one()),
        Target::LocalEta => serrin(int(2), false, int(2)),
        Target::WeightedSmallness { b } => {
            if *b <= Q::zero() {
                Admissibility::violation(format!("weight exponent b = {b} must be > 0"))
            } else {
                smallness(int::<Q>(3) / b.clone())
            }
        }
    }
}

fn check_beta<Q: ExponentField>(beta: &Q) -> Result<()> {
    if *beta < Q::one() || *beta > int(2) {
        return Err(Error::InvalidParameter(format!("β must lie in [1, 2], got {beta}")));
    }
    Ok(())
}

fn check_gamma_above_three<Q: ExponentField>(gamma: &Exponent<Q>) -> Result<()> {
    if let Exponent::Finite(g) = gamma {
        if *g <= int(3) {
            return Err(Error::InvalidParameter(format!("γ must exceed 3, got {g}")));
        }
    }
    Ok(())
}

/// `(γ − 1)/γ`, equal to 1 at `γ = ∞`.
pub fn holder_budget<Q: ExponentField>(gamma: &Exponent<Q>) -> Q {
    Q::one() - inverse(gamma, 1)
}

/// Feasible interval for `1/p` given `γ` and `β`.
pub fn inverse_p_range<Q: ExponentField>(gamma: &Exponent<Q>, beta: &Q) -> (Q, Q) {
    let s = holder_budget(gamma);
    let six = int::<Q>(6);
    let lo_p = (int::<Q>(3) - beta.clone()) / six.clone();
    let hi_p = (int::<Q>(5) - beta.clone()) / six.clone();
    let lo_q = s.clone() - (int::<Q>(3) + beta.clone()) / six.clone();
    let hi_q = s - (Q::one() + beta.clone()) / six;
    (if lo_p > lo_q { lo_p } else { lo_q }, if hi_p < hi_q { hi_p } else { hi_q })
}

/// Hölder exponents `(p, q)` with `1/p + 1/q = (γ−1)/γ`, `p ∈ [6/(5−β), 6/(3−β)]`
/// and `q ∈ [6/(3+β), 6/(1+β)]`; `p = q` when feasible, otherwise the feasible
/// `1/p` closest to the symmetric value.
pub fn pq_exponents<Q: ExponentField>(gamma: &Exponent<Q>, beta: &Q) -> Result<(Q, Q)> {
    check_beta(beta)?;
    check_gamma_above_three(gamma)?;
    let s = holder_budget(gamma);
    let (lo, hi) = inverse_p_range(gamma, beta);
    if lo > hi {
        return Err(Error::Infeasible(format!("no (p, q) for γ = {}, β = {beta}", show(gamma))));
    }
    let sym = s.clone() / int(2);
    let u = if sym < lo {
        lo
    } else if sym > hi {
        hi
    } else {
        sym
    };
    let w = s - u.clone();
    Ok((Q::one() / u, Q::one() / w))
}

/// Powers of `(‖Λ^{β/2}v‖, ‖∇Λ^{β/2}v‖)` bounding `‖ω‖_{L^p}`.
pub fn vorticity_powers<Q: ExponentField>(beta: &Q, p: &Q) -> (Q, Q) {
    let three_over_p = int::<Q>(3) / p.clone();
    let half_beta = beta.clone() / int(2);
    (
        three_over_p.clone() + half_beta.clone() - ratio(3, 2),
        ratio::<Q>(5, 2) - three_over_p - half_beta,
    )
}

/// Powers of `(‖Λ^{β/2}v‖, ‖∇Λ^{β/2}v‖)` bounding `‖Λ^βv‖_{L^q}`.
pub fn lambda_powers<Q: ExponentField>(beta: &Q, q: &Q) -> (Q, Q) {
    let three_over_q = int::<Q>(3) / q.clone();
    let half_beta = beta.clone() / int(2);
    (
        three_over_q.clone() - half_beta.clone() - ratio(1, 2),
        ratio::<Q>(3, 2) - three_over_q + half_beta,
    )
}

/// Powers of `(‖∇u‖_{L²}, ‖Δu‖_{L²})` bounding `‖∇u‖_{L^{2γ/(γ−2)}}`.
pub fn gradient_powers<Q: ExponentField>(gamma: &Exponent<Q>) -> (Q, Q) {
    let t = inverse(gamma, 3);
    (Q::one() - t.clone(), t)
}

/// Combined powers `((γ−3)/γ, (γ+3)/γ)` after multiplying the two bounds.
pub fn combined_powers<Q: ExponentField>(gamma: &Exponent<Q>) -> (Q, Q) {
    let t = inverse(gamma, 3);
    (Q::one() - t.clone(), Q::one() + t)
}

/// Young exponents `(P, Q) = (2γ/(γ+3), 2γ/(γ−3))`; both equal 2 at `γ = ∞`.
pub fn young_exponents<Q: ExponentField>(gamma: &Exponent<Q>) -> Result<(Q, Q)> {
    check_gamma_above_three(gamma)?;
    Ok(match gamma {
        Exponent::Infinity => (int(2), int(2)),
        Exponent::Finite(g) => (
            int::<Q>(2) * g.clone() / (g.clone() + int(3)),
            int::<Q>(2) * g.clone() / (g.clone() - int(3)),
        ),
    })
}

/// Time exponent `2γ/(γ−3)` produced by the Young step.
pub fn time_exponent<Q: ExponentField>(gamma: &Exponent<Q>) -> Result<Q> {
    young_exponents(gamma).map(|(_, q)| q)
}

/// `3/γ + 2/α` for the given pair.
pub fn scaling_sum<Q: ExponentField>(gamma: &Exponent<Q>, alpha: &Exponent<Q>) -> Q {
    inverse(gamma, 3) + inverse(alpha, 2)
}
