//! Leibniz-rule audit of a linear operator.
//!
//! Any operator of the form `a(x)·D¹ + b(x)` is recovered from its action
//! on the two functions `1` and `x`:
//!
//! ```text
//! b = op(1)
//! a = op(x) − x·op(1)
//! ```
//!
//! The audit extracts `a` and `b`, measures how far the operator is from
//! `a·D¹ + b` on a probe set, measures the Leibniz defect on probe pairs,
//! and classifies. An operator obeys the Leibniz rule exactly when it is a
//! first-order local form with `b ≡ 0`; everything the audit reports is
//! scoped to the finite probe, pair and point sets named in the report.

use std::fmt;

use crate::error::{Error, Result};
use crate::funclass::{Domain, PowerSum};
use crate::leibniz::{leibniz_defect, DefectReport};
use crate::operator::{Applied, OperatorSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    FirstOrderLocal,
    NonLeibniz,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::FirstOrderLocal => "FIRST_ORDER_LOCAL",
            Classification::NonLeibniz => "NON_LEIBNIZ",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The probe set `{1, x, x², x³, x^0.5, x^1.5}`.
pub fn default_probes() -> Vec<PowerSum> {
    [0.0, 1.0, 2.0, 3.0, 0.5, 1.5].iter().map(|&e| PowerSum::monomial(1.0, e)).collect()
}

/// All unordered pairs, repetition included, of `{1, x, x², x^0.5}`.
pub fn default_pairs() -> Vec<(PowerSum, PowerSum)> {
    let base: Vec<PowerSum> = [0.0, 1.0, 2.0, 0.5].iter().map(|&e| PowerSum::monomial(1.0, e)).collect();
    let mut pairs = Vec::new();
    for i in 0..base.len() {
        for j in i..base.len() {
            pairs.push((base[i].clone(), base[j].clone()));
        }
    }
    pairs
}

/// Default audit domain [0.2, 5].
pub fn default_domain() -> Domain {
    Domain::new(0.2, 5.0).expect("static domain")
}

/// 20 geometric points spanning the domain, plus x = 1 when it lies inside.
pub fn default_points(domain: &Domain) -> Vec<f64> {
    let mut pts = domain.geometric_points(20);
    if domain.contains(1.0) && !pts.contains(&1.0) {
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
    }
    pts
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub probes: Vec<PowerSum>,
    pub pairs: Vec<(PowerSum, PowerSum)>,
    pub domain: Domain,
    /// Evaluation points; `None` means [`default_points`] of the domain.
    pub points: Option<Vec<f64>>,
    /// Base tolerance; grid-based operators use `max(tolerance, 10·h)`.
    pub tolerance: f64,
    /// Coefficients of the linearity probe `op(c1·f + c2·g)`.
    pub linearity_coeffs: (f64, f64),
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            probes: default_probes(),
            pairs: default_pairs(),
            domain: default_domain(),
            points: None,
            tolerance: DEFAULT_TOLERANCE,
            linearity_coeffs: (1.5, -0.75),
        }
    }
}

impl AuditConfig {
    pub fn resolved_points(&self) -> Vec<f64> {
        self.points.clone().unwrap_or_else(|| default_points(&self.domain))
    }

    pub fn effective_tolerance(&self, spec: &OperatorSpec) -> f64 {
        match spec.grid_step() {
            Some(h) => self.tolerance.max(10.0 * h),
            None => self.tolerance,
        }
    }
}

/// The operator's action on `1` and on `x`, from which `a` and `b` follow.
#[derive(Debug, Clone)]
pub struct LocalFormExtract {
    op_one: Applied,
    op_x: Applied,
}

impl LocalFormExtract {
    pub fn b(&self, x: f64) -> Result<f64> {
        self.op_one.eval(x)
    }

    pub fn a(&self, x: f64) -> Result<f64> {
        Ok(self.op_x.eval(x)? - x * self.op_one.eval(x)?)
    }

    pub fn b_exact(&self) -> Option<PowerSum> {
        self.op_one.as_exact().cloned()
    }

    pub fn a_exact(&self) -> Option<PowerSum> {
        let op_one = self.op_one.as_exact()?;
        let op_x = self.op_x.as_exact()?;
        Some(op_x.add(&PowerSum::x().multiply(op_one).scale(-1.0)))
    }
}

/// `b = op(1)`, `a = op(x) − x·op(1)`; `reach` is the largest point used.
pub fn extract_local_form(spec: &OperatorSpec, reach: f64) -> Result<LocalFormExtract> {
    let op_one = spec.apply(&PowerSum::one(), reach).map_err(|_| Error::MissingProbe("1"))?;
    let op_x = spec.apply(&PowerSum::x(), reach).map_err(|_| Error::MissingProbe("x"))?;
    Ok(LocalFormExtract { op_one, op_x })
}

/// `max_x |op(c1·f + c2·g) − c1·op(f) − c2·op(g)|`.
pub fn check_linearity(
    spec: &OperatorSpec,
    f: &PowerSum,
    g: &PowerSum,
    c1: f64,
    c2: f64,
    points: &[f64],
) -> Result<f64> {
    let reach = reach_of(points)?;
    let combined = spec.apply(&f.scale(c1).add(&g.scale(c2)), reach)?;
    let op_f = spec.apply(f, reach)?;
    let op_g = spec.apply(g, reach)?;
    points.iter().try_fold(0.0_f64, |m, &x| {
        let r = combined.eval(x)? - c1 * op_f.eval(x)? - c2 * op_g.eval(x)?;
        Ok(m.max(r.abs()))
    })
}

fn reach_of(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no evaluation points".into()));
    }
    if let Some(&bad) = points.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositivePoint(bad));
    }
    Ok(points.iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResidual {
    pub probe: PowerSum,
    /// Signed residual `op(f) − a·f′ − b·f` at each point.
    pub residuals: Vec<f64>,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedProbe {
    pub what: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Worst local-form residual over the probes.
    LocalFormProbe,
    /// Worst Leibniz defect over the pairs.
    DefectPair,
    /// Largest |op(1)|, used only when no pair could be evaluated.
    UnitAction,
}

impl WitnessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessKind::LocalFormProbe => "local_form_probe",
            WitnessKind::DefectPair => "defect_pair",
            WitnessKind::UnitAction => "unit_action",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub detail: String,
    /// Point at which the witness value was observed.
    pub x: f64,
    /// Signed value; its magnitude is the maximum the report states for
    /// this kind.
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub spec: OperatorSpec,
    pub probes: Vec<PowerSum>,
    pub pairs: Vec<(PowerSum, PowerSum)>,
    pub points: Vec<f64>,
    pub a_exact: Option<PowerSum>,
    pub b_exact: Option<PowerSum>,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub b_max: f64,
    pub linearity_max_residual: f64,
    pub local_form_max_residual: f64,
    pub defect_max: f64,
    pub probe_residuals: Vec<ProbeResidual>,
    pub pair_defects: Vec<DefectReport>,
    pub skipped: Vec<SkippedProbe>,
    pub classification: Classification,
    pub witness: Witness,
    pub tolerance: f64,
}

impl AuditReport {
    pub fn pair_defect(&self, f: &PowerSum, g: &PowerSum) -> Option<&DefectReport> {
        self.pair_defects.iter().find(|d| (&d.f == f && &d.g == g) || (&d.f == g && &d.g == f))
    }
}

/// Runs the full audit under `config`.
pub fn classify(spec: &OperatorSpec, config: &AuditConfig) -> Result<AuditReport> {
    spec.validate()?;
    let points = config.resolved_points();
    let reach = reach_of(&points)?;
    if let Some(&x) = points.iter().find(|&&x| !config.domain.contains(x)) {
        return Err(Error::PointOutsideDomain { x, lo: config.domain.lo(), hi: config.domain.hi() });
    }
    let tolerance = config.effective_tolerance(spec);

    let extract = extract_local_form(spec, reach)?;
    let b_values = points.iter().map(|&x| extract.b(x)).collect::<Result<Vec<_>>>()?;
    let a_values = points.iter().map(|&x| extract.a(x)).collect::<Result<Vec<_>>>()?;
    let b_max = b_values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));

    let mut skipped = Vec::new();
    let mut probe_residuals = Vec::new();
    let mut usable = Vec::new();
    for probe in &config.probes {
        let applied = match spec.apply(probe, reach) {
            Ok(a) => a,
            Err(e) => {
                skipped.push(SkippedProbe { what: format!("probe {probe}"), reason: e.to_string() });
                continue;
            }
        };
        let d1 = probe.derivative();
        let residuals = points
            .iter()
            .enumerate()
            .map(|(i, &x)| Ok(applied.eval(x)? - a_values[i] * d1.eval(x)? - b_values[i] * probe.eval(x)?))
            .collect::<Result<Vec<f64>>>()?;
        let max_abs = residuals.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        probe_residuals.push(ProbeResidual { probe: probe.clone(), residuals, max_abs });
        usable.push(probe.clone());
    }

    let (c1, c2) = config.linearity_coeffs;
    let mut linearity_max_residual = 0.0_f64;
    if usable.len() >= 2 {
        for i in 0..usable.len() {
            let f = &usable[i];
            let g = &usable[(i + 1) % usable.len()];
            match check_linearity(spec, f, g, c1, c2, &points) {
                Ok(r) => linearity_max_residual = linearity_max_residual.max(r),
                Err(e) => skipped
                    .push(SkippedProbe { what: format!("linearity ({f}, {g})"), reason: e.to_string() }),
            }
        }
    }

    let mut pair_defects = Vec::new();
    for (f, g) in &config.pairs {
        match leibniz_defect(spec, f, g, &points) {
            Ok(report) => pair_defects.push(report),
            Err(e) => skipped.push(SkippedProbe { what: format!("pair ({f}, {g})"), reason: e.to_string() }),
        }
    }

    let local_witness = probe_residuals.iter().fold(None, |best: Option<Witness>, pr| {
        let (i, r) = worst(&pr.residuals)?;
        let better = best.as_ref().is_none_or(|w| r.abs() > w.value.abs());
        Some(if better {
            Witness {
                kind: WitnessKind::LocalFormProbe,
                detail: format!("probe {} at x = {}", pr.probe, points[i]),
                x: points[i],
                value: r,
            }
        } else {
            best.expect("checked")
        })
    });
    let defect_witness = pair_defects.iter().fold(None, |best: Option<Witness>, d| {
        let i = d.worst_index()?;
        let v = d.delta[i];
        let better = best.as_ref().is_none_or(|w| v.abs() > w.value.abs());
        Some(if better {
            Witness {
                kind: WitnessKind::DefectPair,
                detail: format!("pair ({}, {}) at x = {}", d.f, d.g, points[i]),
                x: points[i],
                value: v,
            }
        } else {
            best.expect("checked")
        })
    });
    let local_form_max_residual = local_witness.as_ref().map_or(0.0, |w| w.value.abs());
    let defect_max = defect_witness.as_ref().map_or(0.0, |w| w.value.abs());

    let classification = if local_form_max_residual < tolerance && b_max < tolerance {
        Classification::FirstOrderLocal
    } else {
        Classification::NonLeibniz
    };

    let unit_witness = || {
        let (i, v) = worst(&b_values).expect("points are non-empty");
        Witness {
            kind: WitnessKind::UnitAction,
            detail: format!("op(1) at x = {}", points[i]),
            x: points[i],
            value: v,
        }
    };
    let witness = match classification {
        Classification::FirstOrderLocal => local_witness.unwrap_or_else(unit_witness),
        Classification::NonLeibniz => match (defect_witness, local_witness) {
            (Some(w), _) => w,
            (None, Some(w)) if w.value.abs() >= tolerance => w,
            _ => unit_witness(),
        },
    };

    Ok(AuditReport {
        spec: spec.clone(),
        probes: config.probes.clone(),
        pairs: config.pairs.clone(),
        points,
        a_exact: extract.a_exact(),
        b_exact: extract.b_exact(),
        a_values,
        b_values,
        b_max,
        linearity_max_residual,
        local_form_max_residual,
        defect_max,
        probe_residuals,
        pair_defects,
        skipped,
        classification,
        witness,
        tolerance,
    })
}

/// First index attaining the largest magnitude, with its signed value.
fn worst(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
            best = Some((i, v));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_is_compliant() {
        let r = classify(&OperatorSpec::Classical, &AuditConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::FirstOrderLocal);
        assert!(r.local_form_max_residual <= 1e-10);
        assert!(r.defect_max <= 1e-10);
        assert_eq!(r.a_exact, Some(PowerSum::one()));
        assert_eq!(r.b_exact, Some(PowerSum::zero()));
        assert_eq!(r.witness.kind, WitnessKind::LocalFormProbe);
    }

    #[test]
    fn extraction_on_local_forms() {
        let a = PowerSum::monomial(1.0, 2.0);
        let b = PowerSum::constant(3.0);
        let e = extract_local_form(&OperatorSpec::local(a.clone(), b.clone()), 5.0).unwrap();
        assert_eq!(e.a_exact().unwrap(), a);
        assert_eq!(e.b_exact().unwrap(), b);
        assert_eq!(e.b(2.0).unwrap(), 3.0);
        assert_eq!(e.a(2.0).unwrap(), 4.0);
    }

    #[test]
    fn rl_half_extraction() {
        let e = extract_local_form(&OperatorSpec::rl(0.5).unwrap(), 5.0).unwrap();
        let b = 0.564_189_583_547_756_3;
        let a = 1.128_379_167_095_512_6 - b;
        assert!((e.b(1.0).unwrap() - b).abs() < 1e-15);
        assert!((e.a(1.0).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn local_form_with_unit_action_is_not_leibniz() {
        let spec = OperatorSpec::local(PowerSum::one(), PowerSum::constant(3.0));
        let r = classify(&spec, &AuditConfig::default()).unwrap();
        assert!(r.local_form_max_residual < 1e-12);
        assert!(r.defect_max > 1.0);
        assert_eq!(r.classification, Classification::NonLeibniz);
        assert_eq!(r.witness.kind, WitnessKind::DefectPair);
    }

    #[test]
    fn skipped_probes_are_recorded() {
        let mut cfg = AuditConfig::default();
        cfg.probes.push(PowerSum::monomial(1.0, -0.5));
        let r = classify(&OperatorSpec::caputo(0.5).unwrap(), &cfg).unwrap();
        assert_eq!(r.skipped.len(), 1);
        assert!(r.skipped[0].what.contains("x^(-0.5)"));
        assert_eq!(r.probe_residuals.len(), 6);
    }

    #[test]
    fn points_outside_domain_are_rejected() {
        let cfg = AuditConfig { points: Some(vec![0.5, 7.0]), ..AuditConfig::default() };
        assert!(matches!(classify(&OperatorSpec::Classical, &cfg), Err(Error::PointOutsideDomain { .. })));
    }

    #[test]
    fn linearity_probe() {
        let f = PowerSum::monomial(2.0, 0.5);
        let g = PowerSum::polynomial(&[1.0, 0.0, 3.0]);
        let pts = default_points(&default_domain());
        let r = check_linearity(&OperatorSpec::rl(0.3).unwrap(), &f, &g, 1.0, 0.0, &pts).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn default_sets() {
        assert_eq!(default_probes().len(), 6);
        assert_eq!(default_pairs().len(), 10);
        let pts = default_points(&default_domain());
        assert_eq!(pts.len(), 21);
        assert!(pts.contains(&1.0));
    }
}
