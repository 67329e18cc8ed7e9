use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqspace::duality::{beta_gamma_dual_check, Dual};
use seqspace::lambda_ops::{inverse_transform, lambda_entry, lambda_transform};
use seqspace::matrix::MatrixSpec;
use seqspace::matrix_class::{brute_force_subset_sup, classify, eval_condition, subset_sup, tilde_for_conditions, ConditionId, Target};
use seqspace::paranorm::{ellp_series, membership, paranorm_ellp, Space};
use seqspace::seq::Transform;
use seqspace::{ExponentSeq, LambdaSeq, Mode, SeqSpec, TailRule, Thresholds, VerdictTag};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn family() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("n+1"), Just("n^2+1"), Just("2^n"), Just("3*n+2")]
}

fn explicit(values: Vec<Q>) -> SeqSpec {
    SeqSpec::explicit(values, TailRule::Zero).unwrap()
}

fn floats(values: &[f64]) -> SeqSpec {
    explicit(values.iter().map(|v| Q::from_float(*v).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_of_lambda_sum_to_one(lam in family(), n in 0usize..40) {
        let lambda = LambdaSeq::from_expr(lam).unwrap();
        let total = (0..=n + 3).fold(Q::zero(), |acc, k| acc + lambda_entry::<Q>(&lambda, n, k).unwrap());
        prop_assert_eq!(total, Q::one());
    }

    #[test]
    fn inverse_undoes_transform(lam in family(), x in prop::collection::vec(rational(), 1..40)) {
        let lambda = LambdaSeq::from_expr(lam).unwrap();
        let horizon = x.len() - 1;
        let y = lambda_transform::<Q>(&lambda, &explicit(x.clone()), horizon).unwrap();
        let back = inverse_transform::<Q>(&lambda, &explicit(y), horizon).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn sign_split_matches_enumeration(col in prop::collection::vec(rational(), 0..=12)) {
        prop_assert_eq!(subset_sup(&col), brute_force_subset_sup(&col).unwrap());
    }

    #[test]
    fn partial_sums_are_nondecreasing(x in prop::collection::vec(rational(), 1..30), p in 1u32..=3) {
        let exps = ExponentSeq::constant(&p.to_string()).unwrap();
        let series = ellp_series(&explicit(x), &exps, 60, Mode::Rational).unwrap();
        let exact = series.exact_terms().unwrap();
        prop_assert!(exact.iter().all(|t| *t >= Q::zero()));
        prop_assert!(series.running_sums().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn brute_force_rejects_long_columns() {
    let col = vec![Q::one(); 21];
    assert!(brute_force_subset_sup(&col).is_err());
}

/// y_n = c·r^n decays geometrically, so x = Λ⁻¹y lies in ℓ(λ, p) with a
/// rapidly convergent Λx.
fn geometric_preimage(rng: &mut ChaCha8Rng, lambda: &LambdaSeq, horizon: usize) -> (SeqSpec, Vec<f64>) {
    let c = rng.gen_range(-3.0..3.0);
    let r: f64 = rng.gen_range(0.2..0.7);
    let y: Vec<f64> = (0..=horizon).map(|n| c * r.powi(n as i32)).collect();
    let x = inverse_transform::<f64>(lambda, &floats(&y), horizon).unwrap();
    (floats(&x), x)
}

#[test]
fn bounded_beta_dual_gives_flat_partial_sums() {
    let horizon = 2000;
    let th = Thresholds::default();
    let lambda = LambdaSeq::from_expr("n+1").unwrap();
    let p = ExponentSeq::constant("2").unwrap();
    let a = SeqSpec::expr("1/(n+1)^2").unwrap();
    let report = beta_gamma_dual_check(&a, &lambda, &p, horizon, Dual::Beta, &th).unwrap();
    assert_eq!(report.combined.tag, VerdictTag::ConvergentNumeric, "{}", report.combined.rationale);

    let a_vals = a.prefix::<f64>(horizon + 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (_, x) = geometric_preimage(&mut rng, &lambda, horizon);
        let mut acc = 0.0;
        let partial: Vec<f64> = a_vals
            .iter()
            .zip(&x)
            .map(|(a, x)| {
                acc += a * x;
                acc
            })
            .collect();
        let window = &partial[horizon * 3 / 4..];
        let (lo, hi) = window.iter().fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        assert!(hi - lo < 1e-6, "oscillation {}", hi - lo);
    }
}

#[test]
fn bounded_lq_class_never_maps_members_to_divergent() {
    let horizon = 1000;
    let th = Thresholds::default();
    let lambda = LambdaSeq::from_expr("n+1").unwrap();
    let two = ExponentSeq::constant("2").unwrap();
    let matrices = [
        MatrixSpec::diagonal("2^(-n)").unwrap(),
        MatrixSpec::zero(),
        MatrixSpec::Banded(vec![
            (0, seqspace::Expr::parse("1/(n+1)^2").unwrap()),
            (-1, seqspace::Expr::parse("1/(n+1)^3").unwrap()),
        ]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for a in &matrices {
        let class = classify(a, &lambda, &two, &two, Target::Lq, horizon, Mode::Float, &th).unwrap();
        assert_eq!(class.combined.tag, VerdictTag::ConvergentNumeric, "{a:?}: {}", class.combined.rationale);
        let section = a.section::<f64>(horizon, horizon).unwrap();
        for _ in 0..5 {
            let (x_spec, x) = geometric_preimage(&mut rng, &lambda, horizon);
            let member = membership(&x_spec, &Space::EllLambda(lambda.clone(), two.clone()), horizon, Mode::Float, &th).unwrap();
            assert_eq!(member.verdict.tag, VerdictTag::ConvergentNumeric);
            let ax: Vec<f64> = (0..=horizon).map(|n| section.partial_row_sum(n, horizon, &x)).collect();
            let image = paranorm_ellp(&floats(&ax), &two, horizon, Mode::Float, &th).unwrap();
            assert_ne!(image.verdict.tag, VerdictTag::DivergentNumeric, "{a:?}: {}", image.verdict.rationale);
        }
    }
}

const SUP_TYPE: [ConditionId; 8] = [
    ConditionId::C4_6,
    ConditionId::C4_7,
    ConditionId::C4_8,
    ConditionId::C4_10,
    ConditionId::C4_12,
    ConditionId::C4_13,
    ConditionId::C4_17,
    ConditionId::C4_18,
];

#[test]
fn running_sups_grow_with_the_horizon() {
    let th = Thresholds::default();
    let lambda = LambdaSeq::from_expr("n+1").unwrap();
    let matrices = [
        MatrixSpec::identity(),
        MatrixSpec::diagonal("2^(-n)").unwrap(),
        MatrixSpec::Banded(vec![
            (0, seqspace::Expr::parse("1/(n+1)").unwrap()),
            (-2, seqspace::Expr::parse("1").unwrap()),
        ]),
    ];
    let exponents = [("1", "2"), ("2", "2"), ("1/2", "3")];
    for a in &matrices {
        for (p, q) in exponents {
            let p = ExponentSeq::constant(p).unwrap();
            let q = ExponentSeq::constant(q).unwrap();
            let mut previous: Vec<Option<f64>> = vec![None; SUP_TYPE.len()];
            for horizon in [100, 1000, 10_000] {
                let tilde = tilde_for_conditions(a, &lambda, horizon, Mode::Float).unwrap();
                for (slot, id) in previous.iter_mut().zip(SUP_TYPE) {
                    let r = eval_condition(id, &tilde, &p, &q, &th).unwrap();
                    let values: Vec<f64> = r.witness_curve.iter().map(|pt| pt.value).collect();
                    assert!(values.windows(2).all(|w| w[0] <= w[1]), "{id} at N={horizon}: {values:?}");
                    let last = *values.last().unwrap();
                    if let Some(prev) = *slot {
                        assert!(prev <= last, "{id}: {prev} at the previous horizon, {last} at N={horizon}");
                    }
                    *slot = Some(last);
                }
            }
        }
    }
}

#[test]
fn limit_conditions_have_monotone_curves_within_a_horizon() {
    let th = Thresholds::default();
    let lambda = LambdaSeq::from_expr("n+1").unwrap();
    let a = MatrixSpec::parse("triangle:1/(n+1)^2", None).unwrap();
    let p = ExponentSeq::constant("2").unwrap();
    let tilde = tilde_for_conditions(&a, &lambda, 1000, Mode::Float).unwrap();
    for id in [ConditionId::C4_14, ConditionId::C4_16, ConditionId::C4_11] {
        let r = eval_condition(id, &tilde, &p, &p, &th).unwrap();
        let values: Vec<f64> = r.witness_curve.iter().map(|pt| pt.value).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{id}: {values:?}");
    }
}

#[test]
fn scaling_transform_matches_manual_scaling() {
    let lambda = LambdaSeq::from_expr("n+1").unwrap();
    let x = explicit(vec![q(1, 2), q(-3, 4), q(5, 1)]);
    let scaled = SeqSpec::derived(Transform::Scale(q(-2, 3)), x.clone());
    let a = lambda_transform::<Q>(&lambda, &scaled, 10).unwrap();
    let b = lambda_transform::<Q>(&lambda, &x, 10).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert_eq!(*u, v * q(-2, 3));
    }
}
