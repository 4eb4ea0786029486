//! Invariants that must hold for every input, checked with proptest.

use herzlab::cli::parse_complex;
use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::{ap_norm, quasi_expectation};
use herzlab::linalg::C64;
use herzlab::pnorm::opnorm_estimate;
use herzlab::report::{ReportRecord, Verdict};
use herzlab::{DenseMatrix, NormEstimate, OptimConfig, PExponent};
use proptest::prelude::*;

fn quick() -> OptimConfig {
    OptimConfig { restarts: 4, max_iters: 100, ..OptimConfig::default() }
}

fn matrix(max: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), m * n)
            .prop_map(move |v| DenseMatrix::from_iterator(m, n, v.into_iter().map(|(a, b)| C64::new(a, b))))
    })
}

fn function_on(order: usize) -> impl Strategy<Value = GroupFunction> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), order)
        .prop_map(|v| GroupFunction::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn col_row_max(a: &DenseMatrix) -> f64 {
    let col = (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let row = (0..a.nrows()).map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    col.max(row)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_brackets_are_ordered_and_interpolated(a in matrix(4), p in 1.05..6.0f64) {
        let e = opnorm_estimate(&a, PExponent::new(p).unwrap(), &quick()).unwrap();
        prop_assert!(e.is_consistent());
        // ‖A‖_p ≤ max(‖A‖_1, ‖A‖_∞) and ‖A‖_p ≥ max |a_ij|.
        prop_assert!(e.lower <= col_row_max(&a) * (1.0 + 1e-9) + 1e-12);
        let entry = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(e.upper >= entry * (1.0 - 1e-9));
    }

    #[test]
    fn transpose_duality(a in matrix(3), p in 1.1..5.0f64) {
        let p = PExponent::new(p).unwrap();
        let e = opnorm_estimate(&a, p, &quick()).unwrap();
        let f = opnorm_estimate(&a.transpose(), p.conjugate(), &quick()).unwrap();
        prop_assert!(e.overlaps(&f, 1e-7), "[{}, {}] vs [{}, {}]", e.lower, e.upper, f.lower, f.upper);
    }

    #[test]
    fn homogeneity(a in matrix(3), p in 1.1..5.0f64, s in 0.1..10.0f64) {
        let p = PExponent::new(p).unwrap();
        let e = opnorm_estimate(&a, p, &quick()).unwrap();
        let f = opnorm_estimate(&(&a * C64::new(0.0, s)), p, &quick()).unwrap();
        prop_assert!(f.overlaps(&e.scaled(s), 1e-7));
    }

    #[test]
    fn herz_norm_sits_between_sup_and_l1(u in function_on(4), p in 1.2..4.0f64) {
        let g = FiniteGroup::cyclic(4);
        let e = ap_norm(&g, &u, PExponent::new(p).unwrap(), &quick()).unwrap();
        let l1: f64 = u.values.iter().map(|z| z.norm()).sum();
        prop_assert!(e.is_consistent());
        prop_assert!(e.upper >= u.sup_norm() * (1.0 - 1e-9));
        prop_assert!(e.lower <= l1 * (1.0 + 1e-9));
    }

    #[test]
    fn herz_norm_is_translation_invariant(u in function_on(6), s in 0..6usize, p in 1.2..4.0f64) {
        let g = FiniteGroup::symmetric(3);
        let p = PExponent::new(p).unwrap();
        let shifted = GroupFunction::new((0..6).map(|t| u.values[g.mul(s, t)]).collect());
        let e = ap_norm(&g, &u, p, &quick()).unwrap();
        let f = ap_norm(&g, &shifted, p, &quick()).unwrap();
        prop_assert!(e.overlaps(&f, 1e-7));
    }

    #[test]
    fn averaging_projection_is_idempotent(v in prop::collection::vec(-1.0..1.0f64, 36)) {
        let g = FiniteGroup::symmetric(3);
        let t = DenseMatrix::from_iterator(6, 6, v.into_iter().map(|x| C64::new(x, 0.0)));
        let q = quasi_expectation(&g, &t).unwrap();
        let qq = quasi_expectation(&g, &q).unwrap();
        prop_assert!((q - qq).norm() < 1e-12);
    }

    #[test]
    fn complex_parsing_round_trips(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = parse_complex(&format!("{re}{im:+}i")).unwrap();
        prop_assert_eq!(z, C64::new(re, im));
        prop_assert_eq!(parse_complex(&format!("{re}")).unwrap(), C64::new(re, 0.0));
    }

    #[test]
    fn csv_has_one_row_per_estimate(values in prop::collection::vec(0.0..5.0f64, 0..6)) {
        let mut rec = ReportRecord::new("test", &serde_json::json!({"k": values.len()}), 1);
        for (i, v) in values.iter().enumerate() {
            rec.estimate(format!("e{i}"), NormEstimate::new(*v, f64::INFINITY, herzlab::Certificate::Interpolation, "m"));
        }
        let csv = rec.to_csv();
        prop_assert_eq!(csv.lines().count(), values.len() + 1);
        prop_assert!(values.is_empty() || csv.contains(",inf,"));
        prop_assert_eq!(rec.to_json(), rec.clone().to_json());
    }
}

#[test]
fn verdicts_combine_by_severity() {
    use Verdict::*;
    assert_eq!(Pass.combine(Indecisive), Indecisive);
    assert_eq!(Indecisive.combine(Fail), Fail);
    assert_eq!(Pass.combine(Pass), Pass);
    assert_eq!([Pass, Fail, Indecisive].map(Verdict::exit_code), [0, 1, 2]);
}
