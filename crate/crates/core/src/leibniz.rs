//! The generalized Leibniz series
//!
//! ```text
//! D^α(f·g) = Σ_k C(α, k) · (D^{α−k} f) · (D^k g)
//! ```
//!
//! where `D^{α−k}` becomes a Riemann–Liouville integral once `k > α`, and
//! the pointwise Leibniz defect `Δ = D(fg) − (Df)·g − f·(Dg)` of an
//! arbitrary operator.

use crate::error::{Error, Result};
use crate::fracops::{check_derivative_order, frac_diffint};
use crate::funclass::{Domain, PowerSum};
use crate::operator::OperatorSpec;
use crate::specfun::gen_binom;

/// Truncation used when `g` is not a polynomial.
pub const DEFAULT_NON_POLYNOMIAL_K: usize = 16;

/// Default evaluation points: 20 geometrically spaced points in [0.2, 5].
pub fn default_points() -> Vec<f64> {
    Domain::new(0.2, 5.0).expect("static domain").geometric_points(20)
}

/// `max(deg g, ⌈α⌉ + 2)` for polynomial `g`, otherwise 16.
pub fn default_truncation(alpha: f64, g: &PowerSum) -> usize {
    match g.degree() {
        Some(d) => (d as usize).max(alpha.ceil() as usize + 2),
        None => DEFAULT_NON_POLYNOMIAL_K,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvaluation {
    pub alpha: f64,
    pub truncation: usize,
    /// `terms[k]` is the k-th summand.
    pub terms: Vec<PowerSum>,
    pub partial: PowerSum,
    /// Set when `D^{K+1} g = 0`, i.e. the series is exactly finite.
    pub terminated: bool,
}

impl SeriesEvaluation {
    /// Sup of `|terms[K]|` over `points`.
    pub fn tail_magnitude(&self, points: &[f64]) -> Result<f64> {
        let last = self.terms.last().expect("series has at least the k = 0 term");
        points.iter().try_fold(0.0_f64, |m, &x| Ok(m.max(last.eval(x)?.abs())))
    }

    /// Running partial sums `Σ_{k≤j} terms[k]` evaluated at `x`.
    pub fn partial_sums_at(&self, x: f64) -> Result<Vec<f64>> {
        let mut acc = 0.0;
        self.terms
            .iter()
            .map(|t| {
                acc += t.eval(x)?;
                Ok(acc)
            })
            .collect()
    }
}

/// Truncated series `Σ_{k=0}^{K} C(α,k)·(D^{α−k} f)·(D^k g)` for α ∈ (0, 2).
pub fn leibniz_series(
    f: &PowerSum,
    g: &PowerSum,
    alpha: f64,
    truncation: Option<usize>,
) -> Result<SeriesEvaluation> {
    check_derivative_order("generalized Leibniz series", alpha)?;
    let k_max = truncation.unwrap_or_else(|| default_truncation(alpha, g));
    let mut terms = Vec::with_capacity(k_max + 1);
    let mut g_deriv = g.clone();
    for k in 0..=k_max {
        if k > 0 {
            g_deriv = g_deriv.derivative();
        }
        let f_part =
            frac_diffint(f, alpha - k as f64).map_err(|e| Error::SeriesTerm { k, source: Box::new(e) })?;
        let coeff = gen_binom(alpha, k as u32);
        terms.push(f_part.multiply(&g_deriv).scale(coeff));
    }
    let terminated = g_deriv.derivative().is_zero();
    let partial = terms.iter().fold(PowerSum::zero(), |acc, t| acc.add(t));
    Ok(SeriesEvaluation { alpha, truncation: k_max, terms, partial, terminated })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub alpha: Option<f64>,
    pub operator: String,
    pub f: PowerSum,
    pub g: PowerSum,
    pub points: Vec<f64>,
    pub delta: Vec<f64>,
    pub max_abs: f64,
}

impl DefectReport {
    /// Index of the point with the largest |Δ| (first on ties).
    pub fn worst_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, d) in self.delta.iter().enumerate() {
            if best.is_none_or(|b| d.abs() > self.delta[b].abs()) {
                best = Some(i);
            }
        }
        best
    }
}

/// `Δ(x) = op(fg)(x) − op(f)(x)·g(x) − f(x)·op(g)(x)` at every point.
pub fn leibniz_defect(op: &OperatorSpec, f: &PowerSum, g: &PowerSum, points: &[f64]) -> Result<DefectReport> {
    if let Some(&bad) = points.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::NonPositivePoint(bad));
    }
    let reach = points.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let fg = f.multiply(g);
    let op_fg = op.apply(&fg, reach)?;
    let op_f = op.apply(f, reach)?;
    let op_g = op.apply(g, reach)?;
    let delta = points
        .iter()
        .map(|&x| Ok(op_fg.eval(x)? - op_f.eval(x)? * g.eval(x)? - f.eval(x)? * op_g.eval(x)?))
        .collect::<Result<Vec<f64>>>()?;
    let max_abs = delta.iter().fold(0.0, |m: f64, d| m.max(d.abs()));
    Ok(DefectReport {
        alpha: op.order(),
        operator: op.to_string(),
        f: f.clone(),
        g: g.clone(),
        points: points.to_vec(),
        delta,
        max_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::rl_derivative;

    #[test]
    fn unit_g_leaves_one_term() {
        let f = PowerSum::polynomial(&[1.0, 2.0, 3.0]);
        let s = leibniz_series(&f, &PowerSum::one(), 0.5, Some(5)).unwrap();
        assert!(s.terminated);
        assert_eq!(s.terms.len(), 6);
        assert!(s.terms[1..].iter().all(PowerSum::is_zero));
        assert_eq!(s.partial, rl_derivative(&f, 0.5).unwrap());
    }

    #[test]
    fn x_times_x_at_half() {
        let s = leibniz_series(&PowerSum::x(), &PowerSum::x(), 0.5, Some(1)).unwrap();
        assert!(s.terminated);
        let v = s.partial.eval(1.0).unwrap();
        assert!((v - 1.504_505_556_127_350_1).abs() < 1e-14);
        let direct = rl_derivative(&PowerSum::monomial(1.0, 2.0), 0.5).unwrap();
        assert!((v - direct.eval(1.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn order_one_is_classical_product_rule() {
        let f = PowerSum::polynomial(&[1.0, -2.0, 0.5]);
        let g = PowerSum::polynomial(&[3.0, 1.0]);
        let s = leibniz_series(&f, &g, 1.0, Some(1)).unwrap();
        let expected = f.derivative().multiply(&g).add(&f.multiply(&g.derivative()));
        for x in [0.3, 1.0, 2.7] {
            let a = s.partial.eval(x).unwrap();
            let b = expected.eval(x).unwrap();
            assert!((a - b).abs() < 1e-13 * b.abs().max(1.0));
        }
    }

    #[test]
    fn leading_terms_structure() {
        let f = PowerSum::polynomial(&[1.0, 1.0, 1.0]);
        let g = PowerSum::monomial(1.0, 3.0);
        let s = leibniz_series(&f, &g, 0.5, Some(3)).unwrap();
        assert_eq!(s.terms[0], rl_derivative(&f, 0.5).unwrap().multiply(&g));
        assert_eq!(s.terms[1], frac_diffint(&f, -0.5).unwrap().multiply(&g.derivative()).scale(0.5));
    }

    #[test]
    fn defaults() {
        assert_eq!(default_truncation(0.5, &PowerSum::monomial(1.0, 4.0)), 4);
        assert_eq!(default_truncation(1.5, &PowerSum::x()), 4);
        assert_eq!(default_truncation(0.5, &PowerSum::monomial(1.0, 0.5)), 16);
        let pts = default_points();
        assert_eq!(pts.len(), 20);
    }

    #[test]
    fn non_polynomial_g_is_not_terminated() {
        let g = PowerSum::monomial(1.0, 0.5);
        let s = leibniz_series(&PowerSum::monomial(1.0, 0.5), &g, 0.5, None).unwrap();
        assert!(!s.terminated);
        assert_eq!(s.truncation, 16);
        assert!(s.tail_magnitude(&default_points()).unwrap() > 0.0);
    }

    #[test]
    fn series_domain_error_names_k() {
        let f = PowerSum::monomial(1.0, -1.5);
        match leibniz_series(&f, &PowerSum::x(), 0.5, Some(2)) {
            Err(Error::SeriesTerm { k: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classical_defect_vanishes() {
        let f = PowerSum::polynomial(&[0.0, 0.0, 1.0]);
        let g = PowerSum::polynomial(&[1.0, 1.0]);
        let r = leibniz_defect(&OperatorSpec::Classical, &f, &g, &default_points()).unwrap();
        assert!(r.max_abs <= 1e-12);
    }

    #[test]
    fn rl_and_caputo_defect_on_x_x() {
        let expected = -0.752_252_778_063_675;
        for op in [OperatorSpec::rl(0.5).unwrap(), OperatorSpec::caputo(0.5).unwrap()] {
            let r = leibniz_defect(&op, &PowerSum::x(), &PowerSum::x(), &[1.0]).unwrap();
            assert!((r.delta[0] - expected).abs() < 1e-14);
            assert_eq!(r.max_abs, r.delta[0].abs());
        }
    }

    #[test]
    fn caputo_unit_factor_has_no_defect() {
        let op = OperatorSpec::caputo(0.5).unwrap();
        let r = leibniz_defect(&op, &PowerSum::one(), &PowerSum::x(), &default_points()).unwrap();
        assert_eq!(r.max_abs, 0.0);
    }

    #[test]
    fn rejects_non_positive_points() {
        let op = OperatorSpec::Classical;
        assert!(leibniz_defect(&op, &PowerSum::x(), &PowerSum::x(), &[1.0, 0.0]).is_err());
    }
}
