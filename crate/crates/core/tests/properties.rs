use fracleib::fracops::{caputo_derivative, rl_derivative, rl_integral};
use fracleib::leibniz::leibniz_series;
use fracleib::operator::OperatorSpec;
use fracleib::{PowerSum, PowerTerm};
use proptest::prelude::*;

fn power_sum(max_terms: usize, lo: f64, hi: f64) -> impl Strategy<Value = PowerSum> {
    prop::collection::vec((-5.0..5.0f64, lo..hi), 1..=max_terms).prop_map(|terms| {
        PowerSum::from_terms(terms.into_iter().map(|(c, e)| PowerTerm::new(c, e)).collect())
    })
}

fn points() -> Vec<f64> {
    (0..50).map(|i| 0.1 + 9.9 * i as f64 / 49.0).collect()
}

/// |a − b| measured against the magnitude of the summands that produced them.
fn within(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiplication_is_pointwise(f in power_sum(6, -0.9, 4.0), g in power_sum(6, -0.9, 4.0)) {
        let fg = f.multiply(&g);
        for x in points() {
            let scale = f.abs_magnitude(x) * g.abs_magnitude(x);
            prop_assert!(within(fg.eval(x).unwrap(), f.eval(x).unwrap() * g.eval(x).unwrap(), scale, 1e-12));
        }
    }

    #[test]
    fn canonicalization_is_idempotent(f in power_sum(8, -2.0, 4.0), g in power_sum(8, -2.0, 4.0)) {
        let h = f.multiply(&g).add(&f);
        prop_assert_eq!(h.canonicalize(), h.clone());
        prop_assert_eq!(h.canonicalize().canonicalize(), h.canonicalize());
        let exps: Vec<f64> = h.terms().iter().map(|t| t.exponent).collect();
        prop_assert!(exps.windows(2).all(|w| w[1] - w[0] > 1e-12));
        prop_assert!(h.terms().iter().all(|t| t.coeff != 0.0));
    }

    #[test]
    fn eval_is_linear(f in power_sum(6, -0.9, 4.0), g in power_sum(6, -0.9, 4.0), c1 in -3.0..3.0f64, c2 in -3.0..3.0f64) {
        let combo = f.scale(c1).add(&g.scale(c2));
        for x in points() {
            let scale = c1.abs() * f.abs_magnitude(x) + c2.abs() * g.abs_magnitude(x);
            let direct = c1 * f.eval(x).unwrap() + c2 * g.eval(x).unwrap();
            prop_assert!(within(combo.eval(x).unwrap(), direct, scale, 1e-12));
        }
    }

    #[test]
    fn integrals_form_a_semigroup(f in power_sum(5, -0.9, 4.0), a in prop::sample::select(vec![0.3, 0.5, 1.0]), b in prop::sample::select(vec![0.3, 0.5, 1.0])) {
        let stepwise = rl_integral(&rl_integral(&f, a).unwrap(), b).unwrap();
        let direct = rl_integral(&f, a + b).unwrap();
        for x in [0.2, 0.7, 1.0, 2.5, 5.0] {
            prop_assert!(within(stepwise.eval(x).unwrap(), direct.eval(x).unwrap(), direct.abs_magnitude(x), 1e-11));
        }
    }

    #[test]
    fn derivative_undoes_integral(f in power_sum(5, -0.9, 4.0), alpha in prop::sample::select(vec![0.3, 0.5, 1.5])) {
        let back = rl_derivative(&rl_integral(&f, alpha).unwrap(), alpha).unwrap();
        for x in [0.2, 0.7, 1.0, 2.5, 5.0] {
            prop_assert!(within(back.eval(x).unwrap(), f.eval(x).unwrap(), f.abs_magnitude(x), 1e-11));
        }
    }

    #[test]
    fn order_one_matches_classical(f in power_sum(6, -0.9, 4.0)) {
        let rl = rl_derivative(&f, 1.0).unwrap();
        let classical = f.derivative();
        for x in points() {
            prop_assert!(within(rl.eval(x).unwrap(), classical.eval(x).unwrap(), classical.abs_magnitude(x), 1e-13));
        }
    }

    #[test]
    fn operators_are_linear(f in power_sum(5, 0.05, 4.0), g in power_sum(5, 0.05, 4.0), c1 in -3.0..3.0f64, c2 in -3.0..3.0f64) {
        let combo = f.scale(c1).add(&g.scale(c2));
        let ops = [
            OperatorSpec::rl(0.3).unwrap(),
            OperatorSpec::rl(1.5).unwrap(),
            OperatorSpec::caputo(0.5).unwrap(),
            OperatorSpec::Classical,
            OperatorSpec::local(PowerSum::monomial(2.0, 0.5), PowerSum::constant(-1.0)),
        ];
        for op in &ops {
            let lhs = op.apply_exact(&combo).unwrap();
            let of = op.apply_exact(&f).unwrap();
            let og = op.apply_exact(&g).unwrap();
            for x in [0.3, 1.0, 4.0] {
                let scale = c1.abs() * of.abs_magnitude(x) + c2.abs() * og.abs_magnitude(x) + lhs.abs_magnitude(x);
                let rhs = c1 * of.eval(x).unwrap() + c2 * og.eval(x).unwrap();
                prop_assert!(within(lhs.eval(x).unwrap(), rhs, scale, 1e-12), "{}", op);
            }
        }
    }

    #[test]
    fn caputo_ignores_constant_shift(f in power_sum(5, 0.05, 4.0), c in -10.0..10.0f64) {
        let shifted = f.add(&PowerSum::constant(c));
        prop_assert_eq!(caputo_derivative(&shifted, 0.5).unwrap(), caputo_derivative(&f, 0.5).unwrap());
    }

    #[test]
    fn series_partial_is_sum_of_terms(f in power_sum(3, -0.5, 3.0), g in power_sum(3, 0.0, 3.0), k in 0usize..6) {
        let s = leibniz_series(&f, &g, 0.5, Some(k)).unwrap();
        prop_assert_eq!(s.terms.len(), k + 1);
        for x in [0.3, 1.0, 3.0] {
            let sum: f64 = s.terms.iter().map(|t| t.eval(x).unwrap()).sum();
            let scale: f64 = s.terms.iter().map(|t| t.abs_magnitude(x)).sum();
            prop_assert!(within(s.partial.eval(x).unwrap(), sum, scale, 1e-13));
        }
    }

    #[test]
    fn terminated_series_is_stable(f in power_sum(3, 0.0, 3.0), coeffs in prop::collection::vec(-2.0..2.0f64, 1..4)) {
        let g = PowerSum::polynomial(&coeffs);
        let deg = g.degree().unwrap() as usize;
        let s = leibniz_series(&f, &g, 0.5, Some(deg)).unwrap();
        prop_assert!(s.terminated);
        let longer = leibniz_series(&f, &g, 0.5, Some(deg + 3)).unwrap();
        prop_assert!(longer.terms[deg + 1..].iter().all(PowerSum::is_zero));
        prop_assert_eq!(longer.partial, s.partial);
    }
}
