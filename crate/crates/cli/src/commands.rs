use std::fmt::Write as _;
use std::sync::Arc;

use fracleib::audit::{classify, AuditConfig, AuditReport};
use fracleib::fracops::{gl_derivative, rl_derivative};
use fracleib::funclass::{sample, Domain, PowerSum};
use fracleib::hadamard::{hadamard_first, hadamard_second, Remainder, Smooth};
use fracleib::leibniz::{default_points, leibniz_defect, leibniz_series};
use fracleib::{parse_function, parse_operator, Error, OperatorSpec};
use serde_json::{json, Value};

use crate::render::{cell, num, nums, opt_cell, opt_num, table, Report};

pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<fracleib::ParseError> for CliError {
    fn from(e: fracleib::ParseError) -> Self {
        CliError::Core(Error::Parse(e))
    }
}

/// A report plus, when a computed residual exceeded its tolerance, why.
pub struct Outcome {
    pub report: Report,
    pub tolerance_failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, tolerance_failure: None }
    }
}

pub type CmdResult = Result<Outcome, CliError>;

pub fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("--{flag}: `{s}` is not a finite number")))
        })
        .collect()
}

pub fn parse_domain(text: &str) -> Result<Domain, CliError> {
    match parse_list("domain", text)?.as_slice() {
        [lo, hi] => Ok(Domain::new(*lo, *hi)?),
        _ => Err(CliError::Usage("--domain expects `lo,hi`".into())),
    }
}

/// `h,N` → the grid nodes `h, 2h, …, N·h`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage("--grid expects `h,N` with h > 0 and integer N >= 1".into());
    let (h, n) = text.split_once(',').ok_or_else(bad)?;
    let h: f64 = h.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(h > 0.0 && h.is_finite()) || n == 0 {
        return Err(bad());
    }
    Ok((1..=n).map(|k| k as f64 * h).collect())
}

fn reach(points: &[f64]) -> f64 {
    points.iter().copied().fold(f64::MIN_POSITIVE, f64::max)
}

/// Shortest round-trip form; integers without a fractional part.
fn fmt(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

pub fn deriv(op: &str, f: &str, points: &[f64]) -> CmdResult {
    let spec = parse_operator(op)?;
    let f = parse_function(f)?;
    let applied = spec.apply(&f, reach(points))?;
    let values = points.iter().map(|&x| applied.eval(x)).collect::<Result<Vec<_>, _>>()?;
    let exact = applied.as_exact().map(ToString::to_string);

    let mut text = String::new();
    writeln!(text, "operator: {spec}").unwrap();
    writeln!(text, "function: {f}").unwrap();
    match (&exact, spec.grid_step()) {
        (Some(e), _) => writeln!(text, "exact:    {e}").unwrap(),
        (None, Some(h)) => writeln!(text, "exact:    n/a (sampled on grid h = {h})").unwrap(),
        (None, None) => writeln!(text, "exact:    n/a").unwrap(),
    }
    let rows: Vec<Vec<String>> = points.iter().zip(&values).map(|(&x, &v)| vec![fmt(x), fmt(v)]).collect();
    text.push_str(&table(&["x", "value"], &rows));

    Ok(Report {
        text,
        json: json!({
            "operator": spec.to_string(),
            "function": f.to_string(),
            "exact": exact,
            "points": nums(points),
            "values": nums(&values),
        }),
        csv_header: vec!["x", "value"],
        csv_rows: points.iter().zip(&values).map(|(&x, &v)| vec![cell(x), cell(v)]).collect(),
    }
    .into())
}

pub fn defect(op: &str, f: &str, g: &str, points: &[f64]) -> CmdResult {
    let spec = parse_operator(op)?;
    let f = parse_function(f)?;
    let g = parse_function(g)?;
    let r = leibniz_defect(&spec, &f, &g, points)?;

    let mut text = String::new();
    writeln!(text, "operator: {}", r.operator).unwrap();
    writeln!(text, "f:        {}", r.f).unwrap();
    writeln!(text, "g:        {}", r.g).unwrap();
    writeln!(text, "max |Δ|:  {}", fmt(r.max_abs)).unwrap();
    let rows: Vec<Vec<String>> = r.points.iter().zip(&r.delta).map(|(&x, &d)| vec![fmt(x), fmt(d)]).collect();
    text.push_str(&table(&["x", "delta"], &rows));

    Ok(Report {
        text,
        json: json!({
            "alpha": opt_num(r.alpha),
            "operator": r.operator,
            "f": r.f.to_string(),
            "g": r.g.to_string(),
            "points": nums(&r.points),
            "delta": nums(&r.delta),
            "max_abs": num(r.max_abs),
        }),
        csv_header: vec!["x", "delta"],
        csv_rows: r.points.iter().zip(&r.delta).map(|(&x, &d)| vec![cell(x), cell(d)]).collect(),
    }
    .into())
}

pub fn series(f: &str, g: &str, alpha: f64, k: Option<usize>, points: &[f64]) -> CmdResult {
    let f = parse_function(f)?;
    let g = parse_function(g)?;
    let s = leibniz_series(&f, &g, alpha, k)?;
    let direct = rl_derivative(&f.multiply(&g), alpha).ok();
    let partial_sums = points.iter().map(|&x| s.partial_sums_at(x)).collect::<Result<Vec<_>, _>>()?;
    let term_values = points
        .iter()
        .map(|&x| s.terms.iter().map(|t| t.eval(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let partial_values: Vec<f64> = partial_sums.iter().map(|p| *p.last().expect("k = 0 term")).collect();
    let direct_values = match &direct {
        Some(d) => Some(points.iter().map(|&x| d.eval(x)).collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    let tail = s.tail_magnitude(points)?;
    let nonzero = s.terms.iter().filter(|t| !t.is_zero()).count();

    let mut text = String::new();
    writeln!(text, "alpha:      {alpha}").unwrap();
    writeln!(text, "f:          {f}").unwrap();
    writeln!(text, "g:          {g}").unwrap();
    writeln!(text, "K:          {}", s.truncation).unwrap();
    writeln!(text, "terminated: {}", s.terminated).unwrap();
    writeln!(text, "nonzero terms: {nonzero}").unwrap();
    for (i, t) in s.terms.iter().enumerate() {
        writeln!(text, "  term {i}: {t}").unwrap();
    }
    writeln!(text, "partial:    {}", s.partial).unwrap();
    match &direct {
        Some(d) => writeln!(text, "direct D^alpha(fg): {d}").unwrap(),
        None => writeln!(text, "direct D^alpha(fg): undefined for this product").unwrap(),
    }
    writeln!(text, "tail |term K|: {}", fmt(tail)).unwrap();
    if !s.terminated {
        writeln!(text, "series truncated; no convergence claim is made").unwrap();
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            vec![
                fmt(x),
                fmt(partial_values[i]),
                direct_values.as_ref().map_or_else(|| "-".into(), |d| fmt(d[i])),
                fmt(term_values[i].last().expect("k = 0 term").abs()),
            ]
        })
        .collect();
    text.push_str(&table(&["x", "partial", "direct", "tail"], &rows));

    let mut csv_rows = Vec::new();
    for (i, &x) in points.iter().enumerate() {
        for (k, (t, p)) in term_values[i].iter().zip(&partial_sums[i]).enumerate() {
            csv_rows.push(vec![cell(x), k.to_string(), cell(*t), cell(*p)]);
        }
    }

    Ok(Report {
        text,
        json: json!({
            "alpha": num(alpha),
            "f": f.to_string(),
            "g": g.to_string(),
            "K": s.truncation,
            "terminated": s.terminated,
            "terms": s.terms.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "partial": s.partial.to_string(),
            "direct": direct.as_ref().map(ToString::to_string),
            "points": nums(points),
            "partial_values": nums(&partial_values),
            "direct_values": direct_values.as_deref().map_or(Value::Null, nums),
            "partial_sums": partial_sums.iter().map(|p| nums(p)).collect::<Vec<_>>(),
            "tail_magnitude": num(tail),
        }),
        csv_header: vec!["x", "k", "term", "partial_sum"],
        csv_rows,
    }
    .into())
}

pub fn audit(op: &str, domain: Option<Domain>, points: Option<Vec<f64>>, tolerance: f64) -> CmdResult {
    let spec = parse_operator(op)?;
    let mut config = AuditConfig { tolerance, points, ..AuditConfig::default() };
    if let Some(d) = domain {
        config.domain = d;
    }
    let r = classify(&spec, &config)?;
    Ok(audit_report(&r).into())
}

fn audit_report(r: &AuditReport) -> Report {
    let show = |p: &Option<PowerSum>| p.as_ref().map_or_else(|| "sampled".to_string(), ToString::to_string);
    let mut text = String::new();
    writeln!(text, "spec:                {}", r.spec).unwrap();
    writeln!(text, "classification:      {}", r.classification).unwrap();
    writeln!(text, "a_extract:           {}", show(&r.a_exact)).unwrap();
    writeln!(text, "b_extract:           {}", show(&r.b_exact)).unwrap();
    writeln!(text, "b_max:               {}", fmt(r.b_max)).unwrap();
    writeln!(text, "linearity_residual:  {}", fmt(r.linearity_max_residual)).unwrap();
    writeln!(text, "local_form_residual: {}", fmt(r.local_form_max_residual)).unwrap();
    writeln!(text, "defect_max:          {}", fmt(r.defect_max)).unwrap();
    writeln!(text, "tolerance:           {}", fmt(r.tolerance)).unwrap();
    writeln!(
        text,
        "witness:             {} {} -> {}",
        r.witness.kind.as_str(),
        r.witness.detail,
        fmt(r.witness.value)
    )
    .unwrap();
    let at_one = r.points.iter().position(|&x| x == 1.0);
    let rows: Vec<Vec<String>> = r
        .pair_defects
        .iter()
        .map(|d| {
            vec![
                format!("({}, {})", d.f, d.g),
                fmt(d.max_abs),
                at_one.map_or_else(|| "-".into(), |i| fmt(d.delta[i])),
            ]
        })
        .collect();
    writeln!(text, "pair defects:").unwrap();
    text.push_str(&table(&["pair", "max |delta|", "delta at x = 1"], &rows));
    let rows: Vec<Vec<String>> =
        r.probe_residuals.iter().map(|p| vec![p.probe.to_string(), fmt(p.max_abs)]).collect();
    writeln!(text, "local-form residuals:").unwrap();
    text.push_str(&table(&["probe", "max |residual|"], &rows));
    for s in &r.skipped {
        writeln!(text, "skipped {}: {}", s.what, s.reason).unwrap();
    }

    let mut csv_rows = Vec::new();
    for (i, &x) in r.points.iter().enumerate() {
        csv_rows.push(vec!["a_extract".into(), String::new(), cell(x), cell(r.a_values[i])]);
        csv_rows.push(vec!["b_extract".into(), String::new(), cell(x), cell(r.b_values[i])]);
    }
    for p in &r.probe_residuals {
        for (&x, &v) in r.points.iter().zip(&p.residuals) {
            csv_rows.push(vec!["local_form_residual".into(), p.probe.to_string(), cell(x), cell(v)]);
        }
    }
    for d in &r.pair_defects {
        for (&x, &v) in d.points.iter().zip(&d.delta) {
            csv_rows.push(vec!["defect".into(), format!("({}, {})", d.f, d.g), cell(x), cell(v)]);
        }
    }

    Report {
        text,
        json: json!({
            "spec": r.spec.to_string(),
            "classification": r.classification.as_str(),
            "b_max": num(r.b_max),
            "linearity_residual": num(r.linearity_max_residual),
            "local_form_residual": num(r.local_form_max_residual),
            "defect_max": num(r.defect_max),
            "witness": {
                "kind": r.witness.kind.as_str(),
                "detail": r.witness.detail,
                "x": num(r.witness.x),
                "value": num(r.witness.value),
            },
            "tolerance": num(r.tolerance),
            "a_extract": r.a_exact.as_ref().map(ToString::to_string),
            "b_extract": r.b_exact.as_ref().map(ToString::to_string),
            "points": nums(&r.points),
            "a_values": nums(&r.a_values),
            "b_values": nums(&r.b_values),
            "probes": r.probe_residuals.iter().map(|p| json!({
                "probe": p.probe.to_string(),
                "max_abs": num(p.max_abs),
            })).collect::<Vec<_>>(),
            "pairs": r.pair_defects.iter().map(|d| json!({
                "f": d.f.to_string(),
                "g": d.g.to_string(),
                "max_abs": num(d.max_abs),
                "delta": nums(&d.delta),
            })).collect::<Vec<_>>(),
            "skipped": r.skipped.iter().map(|s| json!({"what": s.what, "reason": s.reason})).collect::<Vec<_>>(),
        }),
        csv_header: vec!["quantity", "subject", "x", "value"],
        csv_rows,
    }
}

/// Default domain: [0.2, 5], widened to keep `x0` well inside.
pub fn hadamard_domain(x0: f64) -> Result<Domain, CliError> {
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(Error::AnchorOutsideDomain { x0, lo: 0.2, hi: 5.0 }.into());
    }
    Ok(Domain::new(0.2_f64.min(0.5 * x0), 5.0_f64.max(2.0 * x0))?)
}

pub fn hadamard(
    f: &str,
    x0: f64,
    order: u8,
    domain: Domain,
    points: Option<Vec<f64>>,
    tolerance: f64,
) -> CmdResult {
    let f = parse_function(f)?;
    let smooth: Arc<dyn Smooth> = Arc::new(f.clone());
    let d = match order {
        1 => hadamard_first(smooth, x0, domain)?,
        2 => hadamard_second(smooth, x0, domain)?,
        _ => return Err(CliError::Usage("--order must be 1 or 2".into())),
    };
    let points = points.unwrap_or_else(|| domain.linspace(20));
    let mut remainder = Vec::with_capacity(points.len());
    let mut rebuilt = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    for &x in &points {
        remainder.push(d.remainder_at(x)?);
        rebuilt.push(d.reconstruct(x)?);
        residuals.push(d.residual(&f, x)?);
    }
    let max_residual = residuals.iter().fold(0.0, |m: f64, r| m.max(*r));
    let exact = match &d.remainder {
        Remainder::Exact(g) => Some(g.to_string()),
        Remainder::Integral(_) => None,
    };
    let name = if order == 1 { "g" } else { "g2" };

    let mut text = String::new();
    writeln!(text, "function: {f}").unwrap();
    writeln!(text, "x0:       {x0}").unwrap();
    writeln!(text, "order:    {order}").unwrap();
    writeln!(text, "domain:   [{}, {}]", domain.lo(), domain.hi()).unwrap();
    writeln!(text, "f(x0):    {}", fmt(d.f_at_x0)).unwrap();
    if let Some(dv) = d.deriv_at_x0 {
        writeln!(text, "f'(x0):   {}", fmt(dv)).unwrap();
    }
    match &exact {
        Some(g) => writeln!(text, "{:<10}{g}", format!("{name}:")).unwrap(),
        None => writeln!(text, "{:<10}by quadrature", format!("{name}:")).unwrap(),
    }
    writeln!(text, "max residual: {}", fmt(max_residual)).unwrap();
    let rows: Vec<Vec<String>> = (0..points.len())
        .map(|i| vec![fmt(points[i]), fmt(remainder[i]), fmt(rebuilt[i]), fmt(residuals[i])])
        .collect();
    text.push_str(&table(&["x", name, "reconstruction", "residual"], &rows));

    let tolerance_failure = (max_residual > tolerance)
        .then(|| format!("reconstruction residual {max_residual:e} exceeds tolerance {tolerance:e}"));
    Ok(Outcome {
        report: Report {
            text,
            json: json!({
                "function": f.to_string(),
                "x0": num(x0),
                "order": order,
                "domain": [num(domain.lo()), num(domain.hi())],
                "f_x0": num(d.f_at_x0),
                "deriv_x0": opt_num(d.deriv_at_x0),
                "remainder": exact,
                "points": nums(&points),
                "remainder_values": nums(&remainder),
                "reconstruction": nums(&rebuilt),
                "residuals": nums(&residuals),
                "max_residual": num(max_residual),
                "tolerance": num(tolerance),
            }),
            csv_header: vec!["x", "remainder", "reconstruction", "residual"],
            csv_rows: (0..points.len())
                .map(|i| vec![cell(points[i]), cell(remainder[i]), cell(rebuilt[i]), cell(residuals[i])])
                .collect(),
        },
        tolerance_failure,
    })
}

pub const DEFAULT_LADDER: &str = "1e-2,5e-3,2.5e-3,1.25e-3";

pub fn convergence(f: &str, alpha: f64, x: f64, ladder: &[f64]) -> CmdResult {
    let f = parse_function(f)?;
    // Validates the order and the terms before any sampling.
    OperatorSpec::gl(alpha, ladder.first().copied().unwrap_or(1.0))?;
    let exact = rl_derivative(&f, alpha)?.eval(x)?;
    let mut rows: Vec<(f64, f64, f64, Option<f64>)> = Vec::with_capacity(ladder.len());
    for &h in ladder {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {h}")).into());
        }
        let n = (x / h).round();
        if n < 1.0 || (n * h - x).abs() > 1e-9 * x.max(1.0) {
            return Err(Error::InvalidGrid(format!("x = {x} is not a node of the grid h = {h}")).into());
        }
        let grid = sample(&f, h, (n as usize).max(2))?;
        let approx = gl_derivative(&grid, alpha)?.value_at(x)?;
        let error = (approx - exact).abs();
        let order = rows.last().and_then(|&(hp, _, ep, _)| {
            (ep > 0.0 && error > 0.0 && hp != h).then(|| (ep / error).ln() / (hp / h).ln())
        });
        rows.push((h, approx, error, order));
    }

    let mut text = String::new();
    writeln!(text, "operator: GL({alpha})").unwrap();
    writeln!(text, "function: {f}").unwrap();
    writeln!(text, "x:        {x}").unwrap();
    writeln!(text, "exact:    {}", fmt(exact)).unwrap();
    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|&(h, a, e, o)| vec![fmt(h), fmt(a), fmt(e), o.map_or_else(|| "-".into(), fmt)])
        .collect();
    text.push_str(&table(&["h", "approx", "error", "order"], &table_rows));

    Ok(Report {
        text,
        json: json!({
            "function": f.to_string(),
            "alpha": num(alpha),
            "x": num(x),
            "exact": num(exact),
            "rows": rows.iter().map(|&(h, a, e, o)| json!({
                "h": num(h),
                "approx": num(a),
                "error": num(e),
                "order": opt_num(o),
            })).collect::<Vec<_>>(),
        }),
        csv_header: vec!["h", "error", "order"],
        csv_rows: rows.iter().map(|&(h, _, e, o)| vec![cell(h), cell(e), opt_cell(o)]).collect(),
    }
    .into())
}

pub fn default_eval_points() -> Vec<f64> {
    default_points()
}
