//! Acceptance criteria 1–11. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqspace::duality::{build_b, build_d};
use seqspace::lambda_ops::{inverse_transform, lambda_transform, s_operator};
use seqspace::matrix::MatrixSpec;
use seqspace::matrix_class::{brute_force_subset_sup, build_tilde, classify, subset_sup, ConditionId, Target};
use seqspace::paranorm::{ellp_series, membership, paranorm_lambda, witness_strict_inclusion, Space};
use seqspace::seq::Transform;
use seqspace::{ExponentSeq, LambdaSeq, Mode, Scalar, SeqSpec, TailRule, Thresholds, VerdictTag};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(-100..=100), rng.gen_range(1..=10))
}

fn rand_nonzero_q(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let v = rand_q(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

fn rand_seq(rng: &mut ChaCha8Rng, len: usize) -> Vec<Q> {
    (0..len).map(|_| rand_q(rng)).collect()
}

fn explicit(values: Vec<Q>) -> SeqSpec {
    SeqSpec::explicit(values, TailRule::Zero).unwrap()
}

fn to_f64(v: &Q) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap()
}

/// λ families with an exact closed form for the oracle side.
#[derive(Clone, Copy, Debug)]
enum Family {
    Linear,
    Quadratic,
    Dyadic,
}

impl Family {
    fn spec(self) -> LambdaSeq {
        LambdaSeq::from_expr(match self {
            Family::Linear => "n+1",
            Family::Quadratic => "n^2+1",
            Family::Dyadic => "2^n",
        })
        .unwrap()
    }

    fn value(self, k: i64) -> Q {
        if k < 0 {
            return Q::zero();
        }
        match self {
            Family::Linear => qi(k + 1),
            Family::Quadratic => qi(k * k + 1),
            Family::Dyadic => Q::from_integer(BigInt::one() << k as usize),
        }
    }

    fn gap(self, k: i64) -> Q {
        self.value(k) - self.value(k - 1)
    }
}

/// Λx from the running numerator Σ_{k≤n} δ_k x_k.
fn oracle_lambda(f: Family, x: &[Q]) -> Vec<Q> {
    let mut numerator = Q::zero();
    (0..x.len())
        .map(|n| {
            numerator += f.gap(n as i64) * &x[n];
            &numerator / f.value(n as i64)
        })
        .collect()
}

/// Λx by summing row n of the matrix entries δ_k/λ_n directly.
fn oracle_lambda_direct(f: Family, x: &[Q]) -> Vec<Q> {
    (0..x.len())
        .map(|n| (0..=n).fold(Q::zero(), |acc, k| acc + f.gap(k as i64) / f.value(n as i64) * &x[k]))
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail = format!("{}; {:.2?} (limit {:?})", o.detail, elapsed, limit);
    o.pass &= elapsed < limit;
    o
}

fn triangle_inverse() -> Outcome {
    timed(Duration::from_secs(5), || {
        let size = 64;
        let mut worst = String::new();
        for f in [Family::Linear, Family::Quadratic, Family::Dyadic] {
            let table = f.spec().table::<Q>(size - 1).unwrap();
            let (l, inv) = (table.dense(), table.inverse_dense());
            for n in 0..size {
                for k in 0..size {
                    let expected = if k <= n { f.gap(k as i64) / f.value(n as i64) } else { Q::zero() };
                    if l[n][k] != expected {
                        return outcome(false, format!("{f:?}: Λ[{n}][{k}] = {} expected {expected}", l[n][k]));
                    }
                    let prod = (k..=n).fold(Q::zero(), |acc, j| acc + &l[n][j] * &inv[j][k]);
                    let id = if n == k { Q::one() } else { Q::zero() };
                    if prod != id && worst.is_empty() {
                        worst = format!("{f:?}: (ΛΛ⁻¹)[{n}][{k}] = {prod}");
                    }
                }
            }
        }
        outcome(worst.is_empty(), if worst.is_empty() { "64×64 products equal I for 3 families".into() } else { worst })
    })
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let horizon = 200;
    let mut worst_rel = 0.0f64;
    for i in 0..100 {
        let x: Vec<Q> = (0..=horizon).map(|_| rand_nonzero_q(&mut rng)).collect();
        let xs = explicit(x.clone());
        for f in [Family::Linear, Family::Quadratic, Family::Dyadic] {
            let lambda = f.spec();
            let y = lambda_transform::<Q>(&lambda, &xs, horizon).unwrap();
            let oracle = if i < 5 { oracle_lambda_direct(f, &x) } else { oracle_lambda(f, &x) };
            if y != oracle {
                return outcome(false, format!("sequence {i}, {f:?}: Λx differs from direct summation"));
            }
            let back = inverse_transform::<Q>(&lambda, &explicit(y), horizon).unwrap();
            if back != x {
                return outcome(false, format!("sequence {i}, {f:?}: rational round trip not exact"));
            }
            let yf = lambda_transform::<f64>(&lambda, &xs, horizon).unwrap();
            let yq: Vec<Q> = yf.iter().map(|v| Q::from_float(*v).unwrap()).collect();
            let backf = inverse_transform::<f64>(&lambda, &explicit(yq), horizon).unwrap();
            for (b, v) in backf.iter().zip(&x) {
                let v = to_f64(v);
                worst_rel = worst_rel.max((b - v).abs() / v.abs());
            }
        }
    }
    outcome(worst_rel <= 1e-8, format!("300 rational round trips exact; worst float relative error {worst_rel:.3e} (tol 1e-8)"))
}

fn lemma_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let horizon = 200;
    for i in 0..50 {
        let x = rand_seq(&mut rng, horizon + 1);
        for f in [Family::Linear, Family::Quadratic] {
            let lambda = f.spec();
            let s = s_operator::<Q>(&lambda, &explicit(x.clone()), horizon).unwrap();
            let y = oracle_lambda(f, &x);
            let mut inner = Q::zero();
            for n in 0..=horizon {
                if n >= 1 {
                    inner += f.value(n as i64 - 1) * (&x[n] - &x[n - 1]);
                }
                let defining = &inner / f.value(n as i64);
                if s[n] != defining {
                    return outcome(false, format!("x {i}, {f:?}: S_{n} differs from its defining sum"));
                }
                if s[n] != &x[n] - &y[n] {
                    return outcome(false, format!("x {i}, {f:?}: S_{n} ≠ x_n − Λ_n(x)"));
                }
                if n >= 1 {
                    let second = f.value(n as i64 - 1) / f.gap(n as i64) * (&y[n] - &y[n - 1]);
                    if s[n] != second {
                        return outcome(false, format!("x {i}, {f:?}: S_{n} ≠ λ_(n−1)/δ_n (Λ_n − Λ_(n−1))"));
                    }
                }
            }
        }
    }
    outcome(true, "50 sequences × 2 families, n ≤ 200: both forms exact")
}

fn paranorm_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let horizon = 1000;
    let th = Thresholds::default();
    let lambda = Family::Linear.spec();
    // Mixed exponents in (0, 3]; M = 3.
    let choices = [q(1, 2), qi(1), q(3, 2), qi(2), qi(3)];
    let exps: Vec<Q> = (0..=horizon).map(|_| choices[rng.gen_range(0..choices.len())].clone()).collect();
    let p = ExponentSeq::new(SeqSpec::explicit(exps, TailRule::RepeatLast).unwrap(), Some(3.0)).unwrap();
    let p_int = ExponentSeq::constant("2").unwrap();
    let m = 3.0f64;
    let lam = |s: SeqSpec| SeqSpec::derived(Transform::Lambda(lambda.clone()), s);

    let zero = paranorm_lambda(&SeqSpec::zero(), &lambda, &p_int, horizon, Mode::Rational, &th).unwrap();
    let zero_ok = zero.lambda_side.partial_sum == Scalar::Rational(Q::zero()) && zero.lambda_side.estimate == 0.0;

    let mut symmetric = true;
    let (mut sub_violations, mut scalar_violations) = (0usize, 0usize);
    for _ in 0..50 {
        let x = rand_seq(&mut rng, 40);
        let t = rand_seq(&mut rng, 40);
        let sum: Vec<Q> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
        let neg: Vec<Q> = x.iter().map(|a| -a).collect();

        let hx = paranorm_lambda(&explicit(x.clone()), &lambda, &p_int, horizon, Mode::Rational, &th).unwrap();
        let hn = paranorm_lambda(&explicit(neg), &lambda, &p_int, horizon, Mode::Rational, &th).unwrap();
        symmetric &= hx == hn;

        let series = |v: &[Q]| ellp_series(&lam(explicit(v.to_vec())), &p, horizon, Mode::Float).unwrap();
        let (sx, st, ss) = (series(&x), series(&t), series(&sum));
        let (hx, ht, hs) = (sx.truncated_paranorms(), st.truncated_paranorms(), ss.truncated_paranorms());
        for n in 0..=horizon {
            if hs[n] > (hx[n] + ht[n]) * (1.0 + 1e-12) {
                sub_violations += 1;
            }
        }

        let alpha = rand_nonzero_q(&mut rng) / qi(4);
        let scaled = ellp_series(
            &lam(SeqSpec::derived(Transform::Scale(alpha.clone()), explicit(x.clone()))),
            &p,
            horizon,
            Mode::Float,
        )
        .unwrap();
        let factor = 1f64.max(to_f64(&alpha).abs().powf(m));
        for (a, b) in scaled.terms().iter().zip(sx.terms()) {
            if *a > factor * b * (1.0 + 1e-12) {
                scalar_violations += 1;
            }
        }
    }
    let pass = zero_ok && symmetric && sub_violations == 0 && scalar_violations == 0;
    outcome(
        pass,
        format!(
            "h(θ)=0: {zero_ok}; h(−x)=h(x) exact: {symmetric}; subadditivity violations {sub_violations}; scalar-bound violations {scalar_violations} (50 pairs, N ≤ 1000)"
        ),
    )
}

fn isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let horizon = 10_000;
    let th = Thresholds::default();
    let f = Family::Linear;
    let lambda = f.spec();
    let p = ExponentSeq::new(cyclic_exponents(), Some(3.0)).unwrap();
    let mut checkpoints: Vec<usize> = (1..=200).collect();
    let mut c = 200.0f64;
    while c < horizon as f64 {
        c *= 1.25;
        checkpoints.push((c as usize).min(horizon));
    }
    checkpoints.dedup();
    for i in 0..20 {
        let support = rng.gen_range(1..=60);
        let x = rand_seq(&mut rng, support);
        let mut padded = x.clone();
        padded.resize(horizon + 1, Q::zero());
        let y = oracle_lambda(f, &padded);
        let lhs = ellp_series(&SeqSpec::derived(Transform::Lambda(lambda.clone()), explicit(x)), &p, horizon, Mode::Rational)
            .unwrap();
        let rhs = ellp_series(&explicit(y), &p, horizon, Mode::Rational).unwrap();
        if lhs.exact_terms().is_none() || lhs != rhs {
            return outcome(false, format!("x {i}: term series differ or are not exact"));
        }
        for &n in &checkpoints {
            if lhs.report(n, &th) != rhs.report(n, &th) {
                return outcome(false, format!("x {i}: reports differ at N = {n}"));
            }
        }
    }
    outcome(
        true,
        format!(
            "20 sequences, p_n ∈ {{1,2,3}}: exact term series identical for all N ≤ 10⁴; full reports identical at {} checkpoints",
            checkpoints.len()
        ),
    )
}

fn cyclic_exponents() -> SeqSpec {
    SeqSpec::explicit((0..=10_000).map(|n| qi(1 + n % 3)).collect(), TailRule::RepeatLast).unwrap()
}

fn witness() -> Outcome {
    timed(Duration::from_secs(10), || {
        let horizon = 10_000;
        let th = Thresholds::default();
        let harmonic: f64 = (1..=horizon + 1).rev().map(|j| 1.0 / j as f64).sum();
        let mut lines = Vec::new();
        let mut pass = true;
        for f in [Family::Linear, Family::Quadratic] {
            let lambda = f.spec();
            let (w, p) = witness_strict_inclusion(&lambda);
            let report = paranorm_lambda(&w, &lambda, &p, horizon, Mode::Float, &th).unwrap().lambda_side;
            let y = lambda_transform::<f64>(&lambda, &w, horizon).unwrap();
            let trailing = y[7500..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let c0 = membership(&w, &Space::C0Lambda(lambda.clone(), p.clone()), horizon, Mode::Float, &th).unwrap();
            let ell = membership(&w, &Space::EllLambda(lambda.clone(), p.clone()), horizon, Mode::Float, &th).unwrap();
            let sum = report.partial_sum.to_f64();
            let ok = sum >= harmonic - 1e-6
                && trailing < 2e-4
                && c0.verdict.tag == VerdictTag::ConvergentNumeric
                && ell.verdict.tag == VerdictTag::DivergentNumeric;
            pass &= ok;
            lines.push(format!(
                "{f:?}: Σ = {sum:.6} vs H = {harmonic:.6}, trailing max {trailing:.3e}, c0 {}, ell {}",
                c0.verdict.tag.as_str(),
                ell.verdict.tag.as_str()
            ));
        }
        outcome(pass, lines.join("; "))
    })
}

fn dual_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let horizon = 100;
    for i in 0..20 {
        let a = rand_seq(&mut rng, horizon + 2);
        let x = rand_seq(&mut rng, horizon + 1);
        for f in [Family::Linear, Family::Quadratic] {
            let lambda = f.spec();
            let y = oracle_lambda(f, &x);
            let d = build_d::<Q>(&explicit(a.clone()), &lambda, horizon).unwrap();
            let b = build_b::<Q>(&explicit(a.clone()), &lambda, horizon).unwrap();
            let (dy, by) = (d.apply(&y), b.apply(&y));
            let mut partial = Q::zero();
            for n in 0..=horizon {
                partial += &a[n] * &x[n];
                if dy[n] != &a[n] * &x[n] {
                    return outcome(false, format!("pair {i}, {f:?}: (D y)_{n} ≠ a_n x_n"));
                }
                if by[n] != partial {
                    return outcome(false, format!("pair {i}, {f:?}: (B y)_{n} ≠ Σ a_k x_k"));
                }
                let nn = n as i64;
                let dnn = f.value(nn) * &a[n] / f.gap(nn);
                if d.entry(n, n) != dnn || (n > 0 && d.entry(n, n - 1) != -f.value(nn - 1) * &a[n] / f.gap(nn)) {
                    return outcome(false, format!("pair {i}, {f:?}: D row {n} differs from closed form"));
                }
                let s1 = (&a[n] / f.gap(nn) - &a[n + 1] / f.gap(nn + 1)) * f.value(nn);
                if n < horizon && b.entry(n + 1, n) != s1 {
                    return outcome(false, format!("pair {i}, {f:?}: s¹_{n} differs from closed form"));
                }
            }
        }
    }
    outcome(true, "20 pairs × 2 families, n ≤ 100: both identities exact")
}

fn subset_sup_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let m = rng.gen_range(0..=12);
        let col = rand_seq(&mut rng, m);
        let mut enumerated = Q::zero();
        for mask in 0u32..(1 << m) {
            let s = (0..m).filter(|j| mask >> j & 1 == 1).fold(Q::zero(), |acc, j| acc + &col[j]);
            enumerated = enumerated.max(s.abs());
        }
        let fast = subset_sup(&col);
        let brute = brute_force_subset_sup(&col).unwrap();
        if fast != enumerated || brute != enumerated {
            return outcome(false, format!("column {i}: split {fast}, brute {brute}, enumeration {enumerated}"));
        }
    }
    outcome(true, "500 columns, m ≤ 12: sign split = brute force = enumeration")
}

/// Random closed-form matrix with rational coefficients.
fn rand_matrix(rng: &mut ChaCha8Rng) -> (MatrixSpec, impl Fn(i64, i64) -> Q) {
    let c: Vec<(i64, i64)> = (0..4).map(|_| (rng.gen_range(-9..=9), rng.gen_range(1..=9))).collect();
    let text = format!(
        "{}/{} + {}/{}*n + {}/{}*k^2/(n+1) + {}/{}/(n+k+1)",
        c[0].0, c[0].1, c[1].0, c[1].1, c[2].0, c[2].1, c[3].0, c[3].1
    );
    let spec = MatrixSpec::ClosedForm(seqspace::Expr::parse(&text).unwrap());
    let entry = move |n: i64, k: i64| {
        q(c[0].0, c[0].1) + q(c[1].0, c[1].1) * qi(n) + q(c[2].0, c[2].1) * qi(k * k) / qi(n + 1)
            + q(c[3].0, c[3].1) / qi(n + k + 1)
    };
    (spec, entry)
}

fn tilde_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let horizon = 50;
    for i in 0..20 {
        let f = if i % 2 == 0 { Family::Linear } else { Family::Quadratic };
        let lambda = f.spec();
        let (a, entry) = rand_matrix(&mut rng);
        let x = rand_seq(&mut rng, horizon + 1);
        let y = oracle_lambda(f, &x);
        let tilde = build_tilde::<Q>(&a, &lambda, horizon).unwrap();
        for n in 0..=horizon as i64 {
            for k in 0..horizon as i64 {
                let expected = (entry(n, k) / f.gap(k) - entry(n, k + 1) / f.gap(k + 1)) * f.value(k);
                if tilde.entry(n as usize, k as usize) != expected {
                    return outcome(false, format!("matrix {i}: ã[{n}][{k}] differs from closed form"));
                }
            }
            let (mut lhs, mut head) = (Q::zero(), Q::zero());
            for m in 0..=horizon as i64 {
                lhs += entry(n, m) * &x[m as usize];
                if m >= 1 {
                    head += tilde.entry(n as usize, m as usize - 1) * &y[m as usize - 1];
                }
                let rhs = &head + f.value(m) / f.gap(m) * entry(n, m) * &y[m as usize];
                if lhs != rhs {
                    return outcome(false, format!("matrix {i}, {f:?}: identity fails at n = {n}, m = {m}"));
                }
            }
        }
    }
    outcome(true, "20 random (A, x), m, n ≤ 50: identity exact")
}

fn classifier_smoke() -> Outcome {
    let horizon = 1000;
    let th = Thresholds::default();
    let lambda = Family::Linear.spec();
    let two = ExponentSeq::constant("2").unwrap();
    let one = ExponentSeq::constant("1").unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut run = |label: &str, a: &MatrixSpec, p: &ExponentSeq, target: Target, check: &dyn Fn(&seqspace::matrix_class::ClassificationResult) -> bool| {
        let start = Instant::now();
        let r = classify(a, &lambda, p, &two, target, horizon, Mode::Float, &th).unwrap();
        let elapsed = start.elapsed();
        let ok = check(&r) && elapsed < Duration::from_secs(5);
        pass &= ok;
        lines.push(format!("{label} {}: {} in {elapsed:.2?}", target.name(), r.combined.tag.as_str()));
    };
    let zero = MatrixSpec::zero();
    for target in [Target::Lq, Target::C0q, Target::Cq, Target::LinfQ] {
        run("zero", &zero, &two, target, &|r| {
            r.combined.tag == VerdictTag::ConvergentNumeric && r.conditions.iter().all(|c| c.witness_curve.iter().all(|pt| pt.value == 0.0))
        });
    }
    run("identity", &MatrixSpec::identity(), &one, Target::LinfQ, &|r| {
        let c417 = r.conditions.iter().find(|c| c.id == ConditionId::C4_17.label());
        r.combined.tag == VerdictTag::DivergentNumeric && c417.is_some_and(|c| c.verdict.tag == VerdictTag::DivergentNumeric)
    });
    run("diag(2^-n)", &MatrixSpec::diagonal("2^(-n)").unwrap(), &two, Target::Lq, &|r| {
        r.combined.tag == VerdictTag::ConvergentNumeric
    });
    outcome(pass, lines.join("; "))
}

fn cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_seqspace");
    let runs: &[&[&str]] = &[
        &["transform", "--lambda", "n+1", "--x", "list:1,0,0;tail=zero", "--N", "50"],
        &["--mode", "rational", "inverse", "--lambda", "n^2+1", "--y", "1/(n+1)", "--N", "50"],
        &["soperator", "--lambda", "n+1", "--x", "1/(n+1)", "--N", "50"],
        &["paranorm", "--x", "list:1,0,0;tail=zero", "--lambda", "n+1", "--p", "2", "--N", "2000"],
        &["member", "--space", "ell_lambda", "--lambda", "n+1", "--p", "2", "--x", "list:1,0,0;tail=zero", "--N", "2000"],
        &["witness", "--lambda", "n+1", "--N", "2000"],
        &["thm4", "--x", "list:1,0,0;tail=zero", "--lambda", "n+1", "--p", "2", "--N", "2000"],
        &["thm5", "--x", "list:1,0,0;tail=zero", "--lambda", "n+1", "--p", "2", "--N", "2000"],
        &["dual", "--which", "alpha", "--a", "1/(n+1)^2", "--lambda", "n+1", "--p", "2", "--N", "500"],
        &["dual", "--which", "beta", "--a", "1/(n+1)^2", "--lambda", "n+1", "--p", "2", "--N", "500"],
        &["dual", "--which", "gamma", "--a", "1", "--lambda", "n+1", "--p", "1", "--N", "500"],
        &["--mode", "rational", "tilde", "--A", "identity", "--lambda", "n+1", "--N", "20"],
        &["condition", "--id", "4.12", "--A", "identity", "--lambda", "n+1", "--p", "1", "--q", "2", "--N", "500"],
        &["classify", "--A", "zero", "--lambda", "n+1", "--p", "2", "--q", "2", "--target", "lq", "--N", "500"],
    ];
    for args in runs {
        let go = || Command::new(exe).args(*args).args(["--format", "json"]).output().unwrap();
        let (a, b) = (go(), go());
        if !a.status.success() {
            return outcome(false, format!("{} failed: {}", args.join(" "), String::from_utf8_lossy(&a.stderr)));
        }
        if a.stdout != b.stdout {
            return outcome(false, format!("{}: outputs differ", args.join(" ")));
        }
        if serde_json::from_slice::<serde_json::Value>(&a.stdout).is_err() {
            return outcome(false, format!("{}: output is not JSON", args.join(" ")));
        }
    }
    outcome(true, format!("{} invocations covering all 12 subcommands byte-identical", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("triangle inverse", triangle_inverse),
        ("round trip", round_trip),
        ("S-operator identities", lemma_identities),
        ("paranorm axioms", paranorm_axioms),
        ("isometry", isometry),
        ("strict-inclusion witness", witness),
        ("dual identities", dual_identities),
        ("subset-sup oracle", subset_sup_oracle),
        ("ã identity", tilde_identity),
        ("classifier smoke suite", classifier_smoke),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {:<26} {}  {} [{:.1?}]",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
