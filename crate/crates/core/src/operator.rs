//! Declarative linear operators and their application to power sums.

use std::fmt;

use crate::error::{Error, Result};
use crate::fracops::{
    caputo_derivative, check_caputo_order, check_derivative_order, gl_derivative, rl_derivative,
};
use crate::funclass::{fmt_real, sample, GridFunction, PowerSum};

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// Riemann–Liouville derivative, order in (0, 2).
    RiemannLiouville {
        alpha: f64,
    },
    /// Caputo derivative, order in (0, 1].
    Caputo {
        alpha: f64,
    },
    /// Grünwald–Letnikov derivative on a grid of step `h`.
    GrunwaldLetnikov {
        alpha: f64,
        h: f64,
    },
    /// d/dx
    Classical,
    /// `f ↦ a·f′ + b·f`
    LocalForm {
        a: PowerSum,
        b: PowerSum,
    },
    LinearCombo(Vec<(f64, OperatorSpec)>),
}

impl OperatorSpec {
    pub fn rl(alpha: f64) -> Result<Self> {
        check_derivative_order("RL", alpha)?;
        Ok(OperatorSpec::RiemannLiouville { alpha })
    }

    pub fn caputo(alpha: f64) -> Result<Self> {
        check_caputo_order(alpha)?;
        Ok(OperatorSpec::Caputo { alpha })
    }

    pub fn gl(alpha: f64, h: f64) -> Result<Self> {
        check_derivative_order("GL", alpha)?;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("GL step must be positive, got {h}")));
        }
        Ok(OperatorSpec::GrunwaldLetnikov { alpha, h })
    }

    pub fn local(a: PowerSum, b: PowerSum) -> Self {
        OperatorSpec::LocalForm { a, b }
    }

    pub fn combo(items: Vec<(f64, OperatorSpec)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidArgument("linear combination must be non-empty".into()));
        }
        Ok(OperatorSpec::LinearCombo(items))
    }

    /// Re-checks range invariants, e.g. for specs built by struct literal.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::RiemannLiouville { alpha } => Self::rl(*alpha).map(drop),
            OperatorSpec::Caputo { alpha } => Self::caputo(*alpha).map(drop),
            OperatorSpec::GrunwaldLetnikov { alpha, h } => Self::gl(*alpha, *h).map(drop),
            OperatorSpec::Classical | OperatorSpec::LocalForm { .. } => Ok(()),
            OperatorSpec::LinearCombo(items) => {
                if items.is_empty() {
                    return Err(Error::InvalidArgument("linear combination must be non-empty".into()));
                }
                items.iter().try_for_each(|(_, s)| s.validate())
            }
        }
    }

    /// Order of a single built-in derivative; `None` for local forms and
    /// combinations.
    pub fn order(&self) -> Option<f64> {
        match self {
            OperatorSpec::RiemannLiouville { alpha }
            | OperatorSpec::Caputo { alpha }
            | OperatorSpec::GrunwaldLetnikov { alpha, .. } => Some(*alpha),
            OperatorSpec::Classical => Some(1.0),
            _ => None,
        }
    }

    /// Finest grid step among GL constituents.
    pub fn grid_step(&self) -> Option<f64> {
        match self {
            OperatorSpec::GrunwaldLetnikov { h, .. } => Some(*h),
            OperatorSpec::LinearCombo(items) => {
                items.iter().filter_map(|(_, s)| s.grid_step()).reduce(f64::min)
            }
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.grid_step().is_none()
    }

    /// Applies the operator; `reach` is the largest x a grid-based
    /// constituent has to cover and is ignored by exact operators.
    pub fn apply(&self, f: &PowerSum, reach: f64) -> Result<Applied> {
        match self {
            OperatorSpec::RiemannLiouville { alpha } => rl_derivative(f, *alpha).map(Applied::exact),
            OperatorSpec::Caputo { alpha } => caputo_derivative(f, *alpha).map(Applied::exact),
            OperatorSpec::Classical => Ok(Applied::exact(f.derivative())),
            OperatorSpec::LocalForm { a, b } => {
                Ok(Applied::exact(a.multiply(&f.derivative()).add(&b.multiply(f))))
            }
            OperatorSpec::GrunwaldLetnikov { alpha, h } => {
                if !(reach > 0.0) || !reach.is_finite() {
                    return Err(Error::InvalidGrid(format!("grid reach must be positive, got {reach}")));
                }
                let n = ((reach / h) * (1.0 + 1e-12)).ceil().max(2.0) as usize;
                let grid = sample(f, *h, n)?;
                let d = gl_derivative(&grid, *alpha)?;
                Ok(Applied { exact: PowerSum::zero(), sampled: vec![(1.0, d)] })
            }
            OperatorSpec::LinearCombo(items) => {
                if items.is_empty() {
                    return Err(Error::InvalidArgument("linear combination must be non-empty".into()));
                }
                let mut acc = Applied::exact(PowerSum::zero());
                for (c, spec) in items {
                    let part = spec.apply(f, reach).map_err(|e| Error::Constituent {
                        constituent: spec.to_string(),
                        source: Box::new(e),
                    })?;
                    acc = acc.add(&part.scale(*c));
                }
                Ok(acc)
            }
        }
    }

    /// Applies an operator that has no grid constituent.
    pub fn apply_exact(&self, f: &PowerSum) -> Result<PowerSum> {
        if !self.is_exact() {
            return Err(Error::InvalidArgument(format!("{self} has no exact power-sum result")));
        }
        self.apply(f, 1.0).map(|a| a.exact)
    }
}

/// Free-function form of [`OperatorSpec::apply`].
pub fn apply_operator(spec: &OperatorSpec, f: &PowerSum, reach: f64) -> Result<Applied> {
    spec.apply(f, reach)
}

/// Result of applying an operator: an exact power sum plus a linear
/// combination of grid functions (non-empty only for GL constituents).
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub exact: PowerSum,
    pub sampled: Vec<(f64, GridFunction)>,
}

impl Applied {
    pub fn exact(p: PowerSum) -> Self {
        Applied { exact: p, sampled: Vec::new() }
    }

    pub fn is_exact(&self) -> bool {
        self.sampled.is_empty()
    }

    pub fn as_exact(&self) -> Option<&PowerSum> {
        self.is_exact().then_some(&self.exact)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut v = self.exact.eval(x)?;
        for (c, g) in &self.sampled {
            v += c * g.value_at(x)?;
        }
        Ok(v)
    }

    pub fn add(&self, other: &Applied) -> Applied {
        let mut sampled = self.sampled.clone();
        sampled.extend(other.sampled.iter().cloned());
        Applied { exact: self.exact.add(&other.exact), sampled }
    }

    pub fn scale(&self, c: f64) -> Applied {
        Applied {
            exact: self.exact.scale(c),
            sampled: self.sampled.iter().map(|(k, g)| (c * k, g.clone())).collect(),
        }
    }

    /// Combined samples on the finest constituent grid, when any.
    pub fn to_grid(&self, reach: f64) -> Result<Option<GridFunction>> {
        let Some(h) = self.sampled.iter().map(|(_, g)| g.step()).reduce(f64::min) else {
            return Ok(None);
        };
        let n = ((reach / h) * (1.0 + 1e-12)).ceil().max(2.0) as usize;
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let x = i as f64 * h;
            let mut v = if i == 0 { 0.0 } else { self.exact.eval_unchecked(x) };
            for (c, g) in &self.sampled {
                v += c * g.value_at(x.min(g.end()))?;
            }
            values.push(v);
        }
        GridFunction::new(h, values).map(Some)
    }
}

fn fmt_atom(spec: &OperatorSpec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match spec {
        OperatorSpec::LinearCombo(_) => write!(f, "({spec})"),
        _ => write!(f, "{spec}"),
    }
}

impl fmt::Display for OperatorSpec {
    /// Writes the operator in the grammar accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorSpec::RiemannLiouville { alpha } => write!(f, "RL({})", fmt_real(*alpha)),
            OperatorSpec::Caputo { alpha } => write!(f, "caputo({})", fmt_real(*alpha)),
            OperatorSpec::GrunwaldLetnikov { alpha, h } => {
                write!(f, "GL({}, h={})", fmt_real(*alpha), fmt_real(*h))
            }
            OperatorSpec::Classical => write!(f, "D"),
            OperatorSpec::LocalForm { a, b } => write!(f, "local(a={a}, b={b})"),
            OperatorSpec::LinearCombo(items) => {
                for (i, (c, spec)) in items.iter().enumerate() {
                    let negative = c.is_sign_negative();
                    match (i, negative) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    write!(f, "{}*", fmt_real(c.abs()))?;
                    fmt_atom(spec, f)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_unit_is_classical() {
        let f = PowerSum::polynomial(&[3.0, -1.0, 0.5, 2.0]);
        let op = OperatorSpec::local(PowerSum::one(), PowerSum::zero());
        assert_eq!(op.apply_exact(&f).unwrap(), f.derivative());
    }

    #[test]
    fn rl_on_constant() {
        let got = OperatorSpec::rl(0.5).unwrap().apply_exact(&PowerSum::one()).unwrap();
        assert_eq!(got.terms()[0].exponent, -0.5);
        assert!((got.terms()[0].coeff - 0.564_189_583_547_756_3).abs() < 1e-15);
    }

    #[test]
    fn combination_collapses() {
        let f = PowerSum::from_terms(vec![
            crate::funclass::PowerTerm::new(2.0, 0.5),
            crate::funclass::PowerTerm::new(1.0, 3.0),
        ]);
        let op = OperatorSpec::combo(vec![(2.0, OperatorSpec::Classical), (-1.0, OperatorSpec::Classical)])
            .unwrap();
        assert_eq!(op.apply_exact(&f).unwrap(), f.derivative());
        assert!(OperatorSpec::combo(vec![]).is_err());
    }

    #[test]
    fn constituent_errors_are_named() {
        let op = OperatorSpec::combo(vec![
            (1.0, OperatorSpec::Classical),
            (1.0, OperatorSpec::caputo(0.5).unwrap()),
        ])
        .unwrap();
        let err = op.apply_exact(&PowerSum::monomial(1.0, -0.5)).unwrap_err();
        match err {
            Error::Constituent { constituent, .. } => assert_eq!(constituent, "caputo(0.5)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gl_application() {
        let op = OperatorSpec::gl(1.0, 0.01).unwrap();
        let out = op.apply(&PowerSum::x(), 2.0).unwrap();
        assert!(!out.is_exact());
        assert!((out.eval(1.5).unwrap() - 1.0).abs() < 1e-10);
        assert!(op.apply_exact(&PowerSum::x()).is_err());
        let grid = out.to_grid(2.0).unwrap().unwrap();
        assert_eq!(grid.step(), 0.01);
    }

    #[test]
    fn display() {
        let op = OperatorSpec::combo(vec![
            (2.0, OperatorSpec::rl(0.5).unwrap()),
            (-1.0, OperatorSpec::Classical),
            (0.5, OperatorSpec::combo(vec![(1.0, OperatorSpec::gl(1.5, 0.001).unwrap())]).unwrap()),
        ])
        .unwrap();
        assert_eq!(op.to_string(), "2*RL(0.5) - 1*D + 0.5*(1*GL(1.5, h=0.001))");
        let local = OperatorSpec::local(PowerSum::monomial(1.0, 2.0), PowerSum::zero());
        assert_eq!(local.to_string(), "local(a=x^2, b=0)");
    }

    #[test]
    fn ranges() {
        assert!(OperatorSpec::rl(2.5).is_err());
        assert!(OperatorSpec::caputo(1.5).is_err());
        assert!(OperatorSpec::gl(0.5, 0.0).is_err());
        assert!(OperatorSpec::RiemannLiouville { alpha: 3.0 }.validate().is_err());
    }
}
