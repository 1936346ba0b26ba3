//! Riemann–Liouville and Caputo power rules, Riemann–Liouville fractional
//! integrals, and the Grünwald–Letnikov grid derivative. Every operator
//! here has its lower terminal at 0.
//!
//! On a single power the Riemann–Liouville derivative is
//!
//! ```text
//! D^α x^β = Γ(β+1) / Γ(β−α+1) · x^(β−α),    β > −1
//! ```
//!
//! and the fractional integral of order μ is the same rule with α = −μ.
//! The reciprocal factor goes through [`rgamma`], so at α = 1 the constant
//! term is annihilated exactly instead of hitting the pole of Γ(0).

use crate::error::{Error, Result};
use crate::funclass::{fmt_real, GridFunction, PowerSum, PowerTerm};
use crate::specfun::{gamma, rgamma};

/// Derivative orders are supported on the open interval (0, 2).
pub const DERIVATIVE_RANGE: &str = "(0, 2)";
pub const CAPUTO_RANGE: &str = "(0, 1]";

pub fn check_derivative_order(operator: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange { operator, order: alpha, range: DERIVATIVE_RANGE })
    }
}

pub fn check_caputo_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange { operator: "Caputo derivative", order: alpha, range: CAPUTO_RANGE })
    }
}

fn term_label(t: &PowerTerm) -> String {
    format!("{}*x^{}", fmt_real(t.coeff), fmt_real(t.exponent))
}

/// Applies `x^β ↦ Γ(β+1)·rgamma(β+1−shift)·x^(β−shift)` term by term.
/// Positive `shift` differentiates, negative integrates.
fn power_rule(f: &PowerSum, shift: f64, operator: &str) -> Result<PowerSum> {
    let mut out = Vec::with_capacity(f.len());
    for t in f.terms() {
        if !(t.exponent > -1.0) {
            return Err(Error::TermDomain {
                operator: operator.to_string(),
                term: term_label(t),
                reason: "exponent must exceed -1",
            });
        }
        let lead = gamma(t.exponent + 1.0)?;
        let factor = lead * rgamma(t.exponent - shift + 1.0);
        out.push(PowerTerm::new(t.coeff * factor, t.exponent - shift));
    }
    Ok(PowerSum::from_terms(out))
}

/// Riemann–Liouville derivative of order α ∈ (0, 2).
pub fn rl_derivative(f: &PowerSum, alpha: f64) -> Result<PowerSum> {
    check_derivative_order("Riemann-Liouville derivative", alpha)?;
    power_rule(f, alpha, &format!("RL({})", fmt_real(alpha)))
}

/// Riemann–Liouville fractional integral of order μ > 0.
pub fn rl_integral(f: &PowerSum, mu: f64) -> Result<PowerSum> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::OrderOutOfRange {
            operator: "Riemann-Liouville integral",
            order: mu,
            range: "(0, inf)",
        });
    }
    power_rule(f, -mu, &format!("I({})", fmt_real(mu)))
}

/// Derivative for ν > 0, integral of order −ν for ν < 0, identity at 0.
pub fn frac_diffint(f: &PowerSum, nu: f64) -> Result<PowerSum> {
    if nu > 0.0 {
        rl_derivative(f, nu)
    } else if nu < 0.0 {
        rl_integral(f, -nu)
    } else {
        Ok(f.clone())
    }
}

/// Caputo derivative of order α ∈ (0, 1]. Constants are annihilated; positive
/// powers follow the Riemann–Liouville rule. Negative exponents are refused.
pub fn caputo_derivative(f: &PowerSum, alpha: f64) -> Result<PowerSum> {
    check_caputo_order(alpha)?;
    let label = format!("caputo({})", fmt_real(alpha));
    let mut kept = Vec::with_capacity(f.len());
    for t in f.terms() {
        if t.exponent < 0.0 {
            return Err(Error::TermDomain {
                operator: label,
                term: term_label(t),
                reason: "Caputo derivative supports only constants and positive exponents",
            });
        }
        if t.exponent > 0.0 {
            kept.push(*t);
        }
    }
    power_rule(&PowerSum::from_terms(kept), alpha, &label)
}

/// Grünwald–Letnikov weights `(−1)^k·C(α, k)` for `k = 0..=n`, built with
/// the recurrence `w_k = w_{k−1}·(k − 1 − α)/k`.
pub fn gl_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let prev = w[k - 1];
        w.push(prev * ((k as f64 - 1.0 - alpha) / k as f64));
    }
    w
}

/// Left-sided Grünwald–Letnikov derivative on a grid anchored at 0:
/// `out[n] = h^(−α) · Σ_{k=0}^{n} (−1)^k·C(α,k)·f[n−k]`.
pub fn gl_derivative(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    check_derivative_order("Grunwald-Letnikov derivative", alpha)?;
    let values = f.values();
    let weights = gl_weights(alpha, values.len() - 1);
    let scale = f.step().powf(-alpha);
    let out = (0..values.len())
        .map(|n| {
            let acc: f64 = weights[..=n].iter().zip(values[..=n].iter().rev()).map(|(w, v)| w * v).sum();
            scale * acc
        })
        .collect();
    GridFunction::new(f.step(), out)
}
