//! Hadamard decomposition `f(x) = f(x0) + (x − x0)·g(x)` with
//!
//! ```text
//! g(x) = ∫₀¹ f′(x0 + (x − x0)·t) dt
//! ```
//!
//! and its second-order iterate
//! `f(x) = f(x0) + (x − x0)·f′(x0) + (x − x0)²·g₂(x)`, obtained by
//! decomposing `g` once more around the same anchor.
//!
//! Polynomials take an exact path (synthetic division by `x − x0`); other
//! functions evaluate the integral by adaptive Gauss–Kronrod quadrature.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funclass::{Domain, PowerSum};

/// Absolute tolerance requested from the quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Upper bound on adaptive subintervals.
pub const QUAD_MAX_SUBDIVISIONS: usize = 1 << 15;

/// A function with first and second derivatives available pointwise.
pub trait Smooth: Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
    /// Exact form when the function is a power sum.
    fn as_power_sum(&self) -> Option<&PowerSum> {
        None
    }
}

impl Smooth for PowerSum {
    fn value(&self, x: f64) -> f64 {
        self.eval_unchecked(x)
    }
    fn d1(&self, x: f64) -> f64 {
        self.derivative().eval_unchecked(x)
    }
    fn d2(&self, x: f64) -> f64 {
        self.classical_derivative(2).eval_unchecked(x)
    }
    fn as_power_sum(&self) -> Option<&PowerSum> {
        Some(self)
    }
}

/// Power sum with its first two derivatives precomputed.
struct PowerSumFn {
    f: PowerSum,
    d1: PowerSum,
    d2: PowerSum,
}

impl PowerSumFn {
    fn wrap(f: &PowerSum) -> Arc<dyn Smooth> {
        Arc::new(PowerSumFn { f: f.clone(), d1: f.derivative(), d2: f.classical_derivative(2) })
    }
}

impl Smooth for PowerSumFn {
    fn value(&self, x: f64) -> f64 {
        self.f.eval_unchecked(x)
    }
    fn d1(&self, x: f64) -> f64 {
        self.d1.eval_unchecked(x)
    }
    fn d2(&self, x: f64) -> f64 {
        self.d2.eval_unchecked(x)
    }
    fn as_power_sum(&self) -> Option<&PowerSum> {
        Some(&self.f)
    }
}

/// Swaps a bare power sum for one with cached derivatives.
fn prepared(f: Arc<dyn Smooth>) -> Arc<dyn Smooth> {
    match f.as_power_sum() {
        Some(p) => PowerSumFn::wrap(p),
        None => f,
    }
}

/// A [`Smooth`] function from three closures.
pub struct SmoothFn<F, D1, D2> {
    pub f: F,
    pub d1: D1,
    pub d2: D2,
}

impl<F, D1, D2> Smooth for SmoothFn<F, D1, D2>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D1: Fn(f64) -> f64 + Send + Sync,
    D2: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn d1(&self, x: f64) -> f64 {
        (self.d1)(x)
    }
    fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }
}

// Gauss–Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over [a, b] to absolute `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let err: f64 = intervals.iter().map(|i| i.3).sum();
        if err <= tol {
            return Ok(total);
        }
        if !err.is_finite() || intervals.len() >= QUAD_MAX_SUBDIVISIONS {
            return Err(Error::Quadrature { achieved: err, requested: tol });
        }
        let (idx, _) =
            intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// `(p(x) − p(x0)) / (x − x0)` by synthetic division.
fn divide_out_anchor(p: &PowerSum, x0: f64) -> PowerSum {
    let dense = p.dense_coefficients().expect("caller checked polynomial");
    let degree = dense.len() - 1;
    if degree == 0 {
        return PowerSum::zero();
    }
    // Horner: quotient coefficients q_{k-1} = a_k + x0·q_k, from the top down.
    let mut quotient = vec![0.0; degree];
    let mut carry = 0.0;
    for k in (1..=degree).rev() {
        carry = dense[k] + x0 * carry;
        quotient[k - 1] = carry;
    }
    PowerSum::polynomial(&quotient)
}

/// Remainder of a decomposition.
#[derive(Clone)]
pub enum Remainder {
    Exact(PowerSum),
    /// Evaluated by quadrature of the integral form.
    Integral(IntegralRemainder),
}

impl std::fmt::Debug for Remainder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Remainder::Exact(p) => write!(f, "Exact({p})"),
            Remainder::Integral(r) => write!(f, "Integral(level {}, x0 = {})", r.level, r.x0),
        }
    }
}

#[derive(Clone)]
pub struct IntegralRemainder {
    f: Arc<dyn Smooth>,
    x0: f64,
    level: u8,
}

impl IntegralRemainder {
    /// g(x) = ∫₀¹ f′(x0 + (x−x0)t) dt
    fn first(&self, x: f64) -> Result<f64> {
        if x == self.x0 {
            return Ok(self.f.d1(self.x0));
        }
        let (f, x0) = (&self.f, self.x0);
        integrate(|t| f.d1(x0 + (x - x0) * t), 0.0, 1.0, QUAD_TOL)
    }

    /// g′(y) = ∫₀¹ t·f″(x0 + (y−x0)t) dt
    fn first_derivative(&self, y: f64) -> Result<f64> {
        if y == self.x0 {
            return Ok(0.5 * self.f.d2(self.x0));
        }
        let (f, x0) = (&self.f, self.x0);
        integrate(|t| t * f.d2(x0 + (y - x0) * t), 0.0, 1.0, QUAD_TOL)
    }

    /// g₂(x) = ∫₀¹ g′(x0 + (x−x0)s) ds, with g′ itself an inner quadrature.
    fn second(&self, x: f64) -> Result<f64> {
        if x == self.x0 {
            return self.first_derivative(self.x0);
        }
        let x0 = self.x0;
        let failure = std::cell::Cell::new(None);
        let value = integrate(
            |s| match self.first_derivative(x0 + (x - x0) * s) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            },
            0.0,
            1.0,
            QUAD_TOL,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => value,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.level {
            1 => self.first(x),
            _ => self.second(x),
        }
    }
}

impl Remainder {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Remainder::Exact(p) => Ok(p.eval_unchecked(x)),
            Remainder::Integral(r) => r.eval(x),
        }
    }

    pub fn as_exact(&self) -> Option<&PowerSum> {
        match self {
            Remainder::Exact(p) => Some(p),
            Remainder::Integral(_) => None,
        }
    }
}

#[derive(Clone)]
pub struct HadamardDecomposition {
    pub x0: f64,
    pub domain: Domain,
    pub order: u8,
    pub f_at_x0: f64,
    /// f′(x0); present for order 2.
    pub deriv_at_x0: Option<f64>,
    pub remainder: Remainder,
}

impl std::fmt::Debug for HadamardDecomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HadamardDecomposition")
            .field("x0", &self.x0)
            .field("order", &self.order)
            .field("f_at_x0", &self.f_at_x0)
            .field("deriv_at_x0", &self.deriv_at_x0)
            .field("remainder", &self.remainder)
            .finish()
    }
}

impl HadamardDecomposition {
    fn check_point(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain { x, lo: self.domain.lo(), hi: self.domain.hi() })
        }
    }

    pub fn remainder_at(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        self.remainder.eval(x)
    }

    /// Right-hand side of the decomposition at `x`.
    pub fn reconstruct(&self, x: f64) -> Result<f64> {
        let r = self.remainder_at(x)?;
        let dx = x - self.x0;
        Ok(match self.deriv_at_x0 {
            None => self.f_at_x0 + dx * r,
            Some(d) => self.f_at_x0 + dx * d + dx * dx * r,
        })
    }

    /// `|f(x) − reconstruct(x)|`.
    pub fn residual(&self, f: &dyn Smooth, x: f64) -> Result<f64> {
        Ok((f.value(x) - self.reconstruct(x)?).abs())
    }
}

fn check_anchor(x0: f64, domain: &Domain) -> Result<()> {
    if domain.is_interior(x0) {
        Ok(())
    } else {
        Err(Error::AnchorOutsideDomain { x0, lo: domain.lo(), hi: domain.hi() })
    }
}

/// `f(x) = f(x0) + (x − x0)·g(x)`.
pub fn hadamard_first(f: Arc<dyn Smooth>, x0: f64, domain: Domain) -> Result<HadamardDecomposition> {
    check_anchor(x0, &domain)?;
    let f = prepared(f);
    let f_at_x0 = f.value(x0);
    let remainder = match f.as_power_sum().filter(|p| p.is_polynomial()) {
        Some(p) => Remainder::Exact(divide_out_anchor(p, x0)),
        None => Remainder::Integral(IntegralRemainder { f, x0, level: 1 }),
    };
    Ok(HadamardDecomposition { x0, domain, order: 1, f_at_x0, deriv_at_x0: None, remainder })
}

/// `f(x) = f(x0) + (x − x0)·f′(x0) + (x − x0)²·g₂(x)`, where `g₂` is the
/// first-order remainder of the first-order remainder.
pub fn hadamard_second(f: Arc<dyn Smooth>, x0: f64, domain: Domain) -> Result<HadamardDecomposition> {
    let f = prepared(f);
    let first = hadamard_first(f.clone(), x0, domain)?;
    // g(x0) = f′(x0)
    let deriv_at_x0 = first.remainder.eval(x0)?;
    let remainder = match &first.remainder {
        Remainder::Exact(g) => Remainder::Exact(divide_out_anchor(g, x0)),
        Remainder::Integral(_) => Remainder::Integral(IntegralRemainder { f, x0, level: 2 }),
    };
    Ok(HadamardDecomposition {
        x0,
        domain,
        order: 2,
        f_at_x0: first.f_at_x0,
        deriv_at_x0: Some(deriv_at_x0),
        remainder,
    })
}

/// Same decomposition forced onto the quadrature path, for cross-checks.
pub fn hadamard_by_quadrature(
    f: Arc<dyn Smooth>,
    x0: f64,
    domain: Domain,
    order: u8,
) -> Result<HadamardDecomposition> {
    check_anchor(x0, &domain)?;
    let f = prepared(f);
    let f_at_x0 = f.value(x0);
    let deriv = f.d1(x0);
    let level = if order >= 2 { 2 } else { 1 };
    Ok(HadamardDecomposition {
        x0,
        domain,
        order: level,
        f_at_x0,
        deriv_at_x0: (level == 2).then_some(deriv),
        remainder: Remainder::Integral(IntegralRemainder { f, x0, level }),
    })
}
