//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Pass criterion numbers as arguments to run a subset.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ark_ff::Zero;
use common::cli::{expected_answers, pipeline};
use common::{dot, orthogonal_to, policy_for, random_coalition, random_instance, random_vec, rng, small_policy, small_row};
use rand::Rng;
use selstream::aoe::{self, AoeParams, AttributeBundle};
use selstream::bench::{self, BenchConfig, BenchReport};
use selstream::bilinear::{random_gt, Gt};
use selstream::error::Error;
use selstream::invert::{check_admissible, const_adm, Constraint, ConstraintSet};
use selstream::secharness::fixed_point_check;
use selstream::sss::{self, Row};
use selstream::store::Stream;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const SHAPES: [(usize, usize, usize); 3] = [(1, 1, 1), (4, 5, 2), (8, 9, 2)];

fn bundle<R: Rng>(p: AoeParams, rng: &mut R) -> AttributeBundle {
    AttributeBundle::new(random_vec(p.u(), rng), (0..p.n()).map(|_| random_vec(p.v(), rng)).collect())
}

fn messages<R: Rng>(n: usize, rng: &mut R) -> Vec<Gt> {
    (0..n).map(|_| random_gt(rng)).collect()
}

fn aoe_correctness() -> Outcome {
    let mut rng = rng(1001);
    let started = Instant::now();
    let (mut p_ok, mut m_ok, mut total) = (0, 0, 0);
    for i in 0..200 {
        let (n, u, v) = SHAPES[i % 3];
        let p = AoeParams::new(n, u, v).unwrap();
        let (mpk, msk) = aoe::par_gen(p, &mut rng);
        let attrs = bundle(p, &mut rng);
        let msgs = messages(n, &mut rng);
        let ct = aoe::enc(&mpk, &attrs, &msgs, &mut rng).unwrap();

        let s0 = orthogonal_to(&attrs.shared, &mut rng);
        let pt = aoe::p_key_gen(&msk, &s0, &mut rng).unwrap();
        p_ok += ct.p_dec(&pt).unwrap() as usize;

        let k = rng.gen_range(1..=n);
        let mut x = attrs.shared.clone();
        x.extend_from_slice(&attrs.specific[k - 1]);
        let s = orthogonal_to(&x, &mut rng);
        let (s0, sk) = s.split_at(u);
        let mt = aoe::m_key_gen(&msk, s0, sk, k, &mut rng).unwrap();
        m_ok += (ct.m_dec(&mt).unwrap() == msgs[k - 1]) as usize;
        total += 1;
    }
    let elapsed = started.elapsed();
    outcome(
        p_ok == total && m_ok == total && elapsed <= Duration::from_secs(120),
        format!("p_dec {p_ok}/{total}, m_dec {m_ok}/{total}, {:.1}s of 120s", elapsed.as_secs_f64()),
    )
}

fn statistical_soundness() -> Outcome {
    let mut rng = rng(1002);
    let keys: Vec<_> = SHAPES[..2]
        .iter()
        .map(|&(n, u, v)| aoe::par_gen(AoeParams::new(n, u, v).unwrap(), &mut rng))
        .collect();
    let (mut p_acc, mut m_hits) = (0, 0);
    let trials = 1000;
    for i in 0..trials {
        // Three in four trials use the smallest shape to keep the run short.
        let (mpk, msk) = &keys[(i % 4 == 0) as usize];
        let p = mpk.params();
        let attrs = bundle(p, &mut rng);
        let msgs = messages(p.n(), &mut rng);
        let ct = aoe::enc(mpk, &attrs, &msgs, &mut rng).unwrap();

        let s0 = random_vec(p.u(), &mut rng);
        assert!(!dot(&s0, &attrs.shared).is_zero());
        p_acc += ct.p_dec(&aoe::p_key_gen(msk, &s0, &mut rng).unwrap()).unwrap() as usize;

        let k = rng.gen_range(1..=p.n());
        let sk = random_vec(p.v(), &mut rng);
        assert!(!(dot(&s0, &attrs.shared) + dot(&sk, &attrs.specific[k - 1])).is_zero());
        let mt = aoe::m_key_gen(msk, &s0, &sk, k, &mut rng).unwrap();
        m_hits += (ct.m_dec(&mt).unwrap() == msgs[k - 1]) as usize;
    }
    outcome(
        p_acc == 0 && m_hits == 0,
        format!("{p_acc}/{trials} p_dec acceptances, {m_hits}/{trials} m_dec recoveries"),
    )
}

fn sss_equivalence() -> Outcome {
    let mut rng = rng(1003);
    let started = Instant::now();
    let keys: Vec<_> = (1..=16).map(|n| sss::init(128, n, &mut rng).unwrap()).collect();
    let (mut sel_ok, mut dec_ok, mut matched) = (0, 0, 0);
    let cases = 500;
    for _ in 0..cases {
        let n = rng.gen_range(1..=16);
        let keys = &keys[n - 1];
        let row = small_row(n, &mut rng);
        let policy = if rng.gen_bool(0.5) { policy_for(&row, &mut rng) } else { small_policy(n, 0.8, &mut rng) };
        let k = rng.gen_range(1..=n);
        let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
        let pt = sss::authorize_sel(&keys.msk, &policy, &mut rng).unwrap();
        let mt = sss::authorize_dec(&keys.msk, &policy, k, &mut rng).unwrap();
        let expected = policy.matches(&row);
        matched += expected as usize;
        sel_ok += (sss::select(&erow, &pt).unwrap() == expected) as usize;
        dec_ok += match (sss::decrypt_cell(&erow, &mt, k), expected) {
            (Ok(cell), true) => cell == row.cell(k).unwrap(),
            (Err(Error::DecryptionFailed), false) => true,
            _ => false,
        } as usize;
    }
    let elapsed = started.elapsed();
    outcome(
        sel_ok == cases && dec_ok == cases && elapsed <= Duration::from_secs(300),
        format!(
            "select {sel_ok}/{cases}, decrypt {dec_ok}/{cases} ({matched} matching), {:.1}s of 300s",
            elapsed.as_secs_f64()
        ),
    )
}

fn bench_report() -> &'static BenchReport {
    use std::sync::OnceLock;
    static REPORT: OnceLock<BenchReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let config = BenchConfig { cols: vec![16, 32, 64, 128], rows: 1, reps: 5 };
        bench::run(&config, &mut rng(1005), |_| {}).unwrap()
    })
}

fn ratio_steps(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

fn size_formula() -> Outcome {
    let mut rng = rng(1004);
    let mut counts_ok = true;
    let mut counts = Vec::new();
    for n in [4, 8, 16, 32] {
        let keys = sss::init(128, n, &mut rng).unwrap();
        let row = Row::new(vec![b"v".to_vec(); n]);
        let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
        let back = sss::EncryptedRow::from_bytes(&erow.to_bytes()).unwrap();
        counts_ok &= back.group_elements() == 19 * n + 11;
        counts.push(back.group_elements());
    }
    let report = bench_report();
    let mem: Vec<f64> = report.results.iter().map(|r| r.ratio_mem).collect();
    let steps = ratio_steps(&mem);
    let steps_ok = steps.iter().all(|s| (1.7..=2.3).contains(s));
    outcome(
        counts_ok && steps_ok,
        format!(
            "elements {counts:?} for n=4,8,16,32; memory blow-up {} for n=16..128, steps {}",
            fmt(&mem),
            fmt(&steps)
        ),
    )
}

fn geo_mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}

fn time_scaling() -> Outcome {
    let report = bench_report();
    let time: Vec<f64> = report.results.iter().map(|r| r.ratio_time).collect();
    let steps = ratio_steps(&time);
    let steps_ok = steps.iter().all(|s| (1.6..=2.4).contains(s));

    // Per-cell ordering, averaged over column counts to damp timing noise.
    let cells = || report.results.iter().map(|r| &r.per_cell);
    let token = geo_mean(cells().map(|c| c.token_ms));
    let enc = geo_mean(cells().map(|c| c.encrypt_ms));
    let m = geo_mean(cells().map(|c| c.m_apply_ms));
    let p = geo_mean(cells().map(|c| c.p_apply_ms));
    let keygen = geo_mean(cells().map(|c| c.keygen_ms));
    let order_ok = token >= 5.0 * enc && enc > m && m > p && (1.0 / 3.0..=3.0).contains(&(p / keygen));
    outcome(
        steps_ok && order_ok,
        format!(
            "time blow-up {} for n=16..128, steps {}; per cell ms: token {token:.1}, enc {enc:.2}, \
             m-apply {m:.2}, p-apply {p:.2}, keygen {keygen:.2}",
            fmt(&time),
            fmt(&steps)
        ),
    )
}

fn constraint_set<R: Rng>(n: usize, rng: &mut R) -> ConstraintSet {
    let truth = small_row(n, rng);
    let mut set = ConstraintSet::default();
    for _ in 0..rng.gen_range(0..=8) {
        let policy = small_policy(n, 0.7, rng);
        if !policy.matches(&truth) {
            set.push(Constraint::Negative(policy));
        } else if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=n);
            let val = truth.cell(k).unwrap().to_vec();
            set.push(Constraint::FullPositive { policy, k, val });
        } else {
            set.push(Constraint::Positive(policy));
        }
    }
    set
}

fn const_adm_invertibility() -> Outcome {
    let mut rng = rng(1006);
    let cases = 500;
    let (mut ok, mut rounds) = (0, 0);
    for _ in 0..cases {
        let n = rng.gen_range(1..=12);
        let set = constraint_set(n, &mut rng);
        let s = const_adm(&set, n, &mut rng).unwrap();
        rounds += s.rounds;
        ok += set.iter().all(|c| check_admissible(&s.row, c).unwrap()) as usize;
    }
    let mean = rounds as f64 / cases as f64;
    outcome(
        ok == cases && mean < 1.01,
        format!("{ok}/{cases} admissible, mean rounds {mean:.3}"),
    )
}

fn leakage_fixed_point() -> Outcome {
    let mut rng = rng(1007);
    let cases = 200;
    let (mut leak_ok, mut tokens_ok) = (0, 0);
    for _ in 0..cases {
        let inst = random_instance(8, 10, 6, &mut rng);
        let c = random_coalition(&mut rng);
        let r = fixed_point_check(128, &c, &inst, &mut rng).unwrap();
        leak_ok += r.leakage_equal as usize;
        tokens_ok += (r.real_tokens_match && r.simulated_tokens_match && r.patterns_equal) as usize;
    }
    outcome(
        leak_ok == cases && tokens_ok == cases,
        format!("leakage equal {leak_ok}/{cases}, token patterns equal {tokens_ok}/{cases}"),
    )
}

fn cli_pipeline() -> Outcome {
    let mut rng = rng(1008);
    let cases = 100;
    let (mut ok, mut truncation_ok, mut truncated) = (0, 0, 0);
    for _ in 0..cases {
        let dir = tempfile::tempdir().unwrap();
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=20);
        let rows: Vec<Row> = (0..m).map(|_| small_row(n, &mut rng)).collect();
        let policy = if m > 0 && rng.gen_bool(0.5) {
            policy_for(&rows[rng.gen_range(0..m)], &mut rng)
        } else {
            small_policy(n, 0.7, &mut rng)
        };
        let k = rng.gen_range(1..=n);
        let (count, lines) = pipeline(dir.path(), &rows, &policy, k, &mut rng);
        let expected = expected_answers(&rows, &policy, k);
        ok += (count == expected.len() && lines == expected) as usize;

        if m > 0 {
            // Cut the stream somewhere inside its last record.
            let path = dir.path().join("stream.sst");
            let bytes = std::fs::read(&path).unwrap();
            let last = Stream::new(&path).read().unwrap().records.last().unwrap().row.len();
            let cut = rng.gen_range(1..=last);
            std::fs::write(&path, &bytes[..bytes.len() - cut]).unwrap();
            let left = Stream::new(&path).read().unwrap().records.len();
            truncated += 1;
            truncation_ok += (left == m - 1) as usize;
        }
    }
    outcome(
        ok == cases && truncation_ok == truncated,
        format!("{ok}/{cases} answer sets exact, {truncation_ok}/{truncated} truncations lost exactly one record"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AOE correctness", aoe_correctness),
        ("statistical soundness", statistical_soundness),
        ("SSS functional equivalence", sss_equivalence),
        ("ciphertext-size formula", size_formula),
        ("encryption-time scaling", time_scaling),
        ("ConstAdm invertibility", const_adm_invertibility),
        ("leakage fixed point", leakage_fixed_point),
        ("end-to-end CLI pipeline", cli_pipeline),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        failed += !result.pass as usize;
        println!(
            "acceptance {id} {name}: {} ({}) [{:.1}s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            started.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
