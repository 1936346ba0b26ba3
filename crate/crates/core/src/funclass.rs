//! Finite sums of real powers `Σ c·x^β`, the exact function class every
//! closed-form operator acts on, plus uniform grid sampling.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exponents closer than this are treated as equal when canonicalizing.
pub const EXPONENT_MERGE_TOL: f64 = 1e-12;

/// One monomial `coeff · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        PowerTerm { coeff, exponent }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.exponent == 0.0 {
            self.coeff
        } else if self.exponent == 1.0 {
            self.coeff * x
        } else {
            self.coeff * x.powf(self.exponent)
        }
    }
}

impl fmt::Display for PowerTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", PowerSum::from_terms(vec![*self]))
    }
}

/// A power sum in canonical form: exponents strictly increasing, no two
/// within [`EXPONENT_MERGE_TOL`], no zero coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerSum {
    terms: Vec<PowerTerm>,
}

impl PowerSum {
    pub fn zero() -> Self {
        PowerSum { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0.0)
    }

    /// The identity function `x`.
    pub fn x() -> Self {
        Self::monomial(1.0, 1.0)
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Self {
        Self::from_terms(vec![PowerTerm::new(coeff, exponent)])
    }

    /// Dense polynomial `Σ coeffs[i] · x^i`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| PowerTerm::new(c, i as f64)).collect())
    }

    /// Builds a canonical sum from arbitrary terms.
    pub fn from_terms(terms: Vec<PowerTerm>) -> Self {
        PowerSum { terms: canonicalize(terms) }
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-applies canonicalization; a no-op on any value built through this API.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms(self.terms.clone())
    }

    /// True when every exponent is a non-negative integer.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.exponent >= 0.0 && t.exponent == t.exponent.floor())
    }

    /// Degree when this is a polynomial; the zero polynomial has degree 0.
    pub fn degree(&self) -> Option<u32> {
        if !self.is_polynomial() {
            return None;
        }
        Some(self.terms.last().map_or(0, |t| t.exponent as u32))
    }

    /// Dense coefficient vector when this is a polynomial.
    pub fn dense_coefficients(&self) -> Option<Vec<f64>> {
        let degree = self.degree()? as usize;
        let mut dense = vec![0.0; degree + 1];
        for t in &self.terms {
            dense[t.exponent as usize] += t.coeff;
        }
        Some(dense)
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms.iter().any(|t| t.exponent < 0.0)
    }

    /// Value at `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositivePoint(x));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Value without the positivity check. Terms with negative exponents
    /// are infinite at 0.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `Σ |c·x^β|`, the natural scale for rounding error in [`eval`](Self::eval).
    pub fn abs_magnitude(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x).abs()).sum()
    }

    pub fn add(&self, other: &PowerSum) -> PowerSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn scale(&self, c: f64) -> PowerSum {
        Self::from_terms(self.terms.iter().map(|t| PowerTerm::new(c * t.coeff, t.exponent)).collect())
    }

    pub fn multiply(&self, other: &PowerSum) -> PowerSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(PowerTerm::new(a.coeff * b.coeff, a.exponent + b.exponent));
            }
        }
        Self::from_terms(terms)
    }

    /// Classical n-th derivative by the power rule; constants vanish.
    pub fn classical_derivative(&self, n: u32) -> PowerSum {
        let mut current = self.clone();
        for _ in 0..n {
            if current.is_zero() {
                break;
            }
            current = Self::from_terms(
                current
                    .terms
                    .iter()
                    .map(|t| PowerTerm::new(t.coeff * t.exponent, t.exponent - 1.0))
                    .collect(),
            );
        }
        current
    }

    pub fn derivative(&self) -> PowerSum {
        self.classical_derivative(1)
    }

    /// Largest |c| over the terms.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }
}

/// Shortest round-trip decimal for `v`; integers print without a fraction.
pub(crate) fn fmt_real(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:?}")
    }
}

fn canonicalize(mut terms: Vec<PowerTerm>) -> Vec<PowerTerm> {
    terms.retain(|t| t.coeff != 0.0);
    terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
    let mut out: Vec<PowerTerm> = Vec::with_capacity(terms.len());
    // Each group is anchored at its first exponent so that merging is
    // idempotent: survivors are more than the tolerance apart.
    let mut anchor = f64::NAN;
    for t in terms {
        match out.last_mut() {
            Some(last) if (t.exponent - anchor).abs() <= EXPONENT_MERGE_TOL => {
                last.coeff += t.coeff;
            }
            _ => {
                anchor = t.exponent;
                out.push(t);
            }
        }
    }
    out.retain(|t| t.coeff != 0.0);
    for t in &mut out {
        if t.exponent == 0.0 {
            t.exponent = 0.0; // normalizes -0.0
        }
    }
    out
}

impl fmt::Display for PowerSum {
    /// Writes the sum in the function grammar accepted by the parser, with
    /// coefficients printed round-trip exact.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.is_sign_negative();
            let magnitude = t.coeff.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let power = match t.exponent {
                0.0 => None,
                1.0 => Some("x".to_string()),
                e if e < 0.0 => Some(format!("x^({})", fmt_real(e))),
                e => Some(format!("x^{}", fmt_real(e))),
            };
            match power {
                None => write!(f, "{}", fmt_real(magnitude))?,
                Some(p) if magnitude == 1.0 => write!(f, "{p}")?,
                Some(p) => write!(f, "{}*{p}", fmt_real(magnitude))?,
            }
        }
        Ok(())
    }
}

impl Add for &PowerSum {
    type Output = PowerSum;
    fn add(self, rhs: &PowerSum) -> PowerSum {
        PowerSum::add(self, rhs)
    }
}

impl Sub for &PowerSum {
    type Output = PowerSum;
    fn sub(self, rhs: &PowerSum) -> PowerSum {
        PowerSum::add(self, &rhs.scale(-1.0))
    }
}

impl Mul for &PowerSum {
    type Output = PowerSum;
    fn mul(self, rhs: &PowerSum) -> PowerSum {
        self.multiply(rhs)
    }
}

impl Mul for PowerSum {
    type Output = PowerSum;
    fn mul(self, rhs: PowerSum) -> PowerSum {
        self.multiply(&rhs)
    }
}

impl Mul<&PowerSum> for f64 {
    type Output = PowerSum;
    fn mul(self, rhs: &PowerSum) -> PowerSum {
        rhs.scale(self)
    }
}

impl Neg for &PowerSum {
    type Output = PowerSum;
    fn neg(self) -> PowerSum {
        self.scale(-1.0)
    }
}

impl Neg for PowerSum {
    type Output = PowerSum;
    fn neg(self) -> PowerSum {
        self.scale(-1.0)
    }
}

/// Samples at `x_n = n·h`, `n = 0..=N`, origin fixed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    step: f64,
    values: Vec<f64>,
    origin_flagged: bool,
}

impl GridFunction {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if values.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need N >= 2 (at least 3 samples), got {} samples",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("sample {i} is not finite")));
        }
        Ok(GridFunction { step, values, origin_flagged: false })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the last sample.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn end(&self) -> f64 {
        self.node(self.last_index())
    }

    pub fn node(&self, n: usize) -> f64 {
        n as f64 * self.step
    }

    /// Set when the sample at x = 0 was replaced by 0 because the sampled
    /// function is singular there.
    pub fn origin_flagged(&self) -> bool {
        self.origin_flagged
    }

    /// Value at `x`, exact on nodes and linearly interpolated between them.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let pos = x / self.step;
        let nearest = pos.round();
        let last = self.last_index() as f64;
        if !(x >= 0.0) || nearest > last || (pos > last && nearest != last) {
            return Err(Error::OffGrid { x, end: self.end() });
        }
        if (pos - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            return Ok(self.values[nearest as usize]);
        }
        let lo = pos.floor() as usize;
        let w = pos - lo as f64;
        Ok((1.0 - w) * self.values[lo] + w * self.values[lo + 1])
    }
}

/// Samples `f` at `n·h` for `n = 0..=n_max`.
///
/// The sample at the origin is the constant term of `f`; if `f` has a
/// negative exponent it is recorded as 0 and the grid is flagged.
pub fn sample(f: &PowerSum, h: f64, n_max: usize) -> Result<GridFunction> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGrid(format!("step must be positive, got {h}")));
    }
    if n_max < 2 {
        return Err(Error::InvalidGrid(format!("need N >= 2, got {n_max}")));
    }
    let flagged = f.has_negative_exponent();
    let origin =
        if flagged { 0.0 } else { f.terms().iter().filter(|t| t.exponent == 0.0).map(|t| t.coeff).sum() };
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(origin);
    values.extend((1..=n_max).map(|n| f.eval_unchecked(n as f64 * h)));
    let mut grid = GridFunction::new(h, values)?;
    grid.origin_flagged = flagged;
    Ok(grid)
}

/// Evaluation interval `[lo, hi]` on the positive half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    lo: f64,
    hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidDomain { lo, hi });
        }
        Ok(Domain { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_interior(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// `n` points with constant ratio, endpoints included.
    pub fn geometric_points(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let ratio = self.hi / self.lo;
                (0..n).map(|i| self.lo * ratio.powf(i as f64 / (n - 1) as f64)).collect()
            }
        }
    }

    /// `n` evenly spaced points, endpoints included.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}
