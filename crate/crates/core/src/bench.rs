//! Amortized vs non-amortized encryption, and per-operation timings.
//!
//! For each column count `n` a row of `n` random cells is encrypted both as
//! one cumulative ciphertext and as `n` independent ciphertexts under the
//! full attribute vector. Times are medians over `reps` runs after one
//! discarded warm-up run. Each baseline run is bracketed by two amortized
//! runs and the time ratio is the median of the per-run ratios, so that
//! drift in machine speed affects both sides alike.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aoe::{self, baseline_params};
use crate::bilinear::{random_gt, SUPPORTED_SECURITY_BITS};
use crate::error::{Error, Result};
use crate::sss::{self, Policy, Row};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub cols: Vec<usize>,
    /// Rows encrypted per timed run; times are reported per row.
    pub rows: usize,
    pub reps: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            cols: vec![16, 32, 64, 128],
            rows: 1,
            reps: 5,
        }
    }
}

/// Milliseconds per cell, except `token_ms` which is per issued token pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerCellTimings {
    pub keygen_ms: f64,
    pub encrypt_ms: f64,
    pub token_ms: f64,
    pub p_apply_ms: f64,
    pub m_apply_ms: f64,
}

/// `ratio_mem` is `bytes_baseline / bytes_amortized`; `ratio_time` is the
/// median of bracketed per-run ratios and so only approximately
/// `t_baseline_ms / t_amortized_ms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub cols: usize,
    pub t_amortized_ms: f64,
    pub t_baseline_ms: f64,
    pub bytes_amortized: usize,
    pub bytes_baseline: usize,
    pub ratio_time: f64,
    pub ratio_mem: f64,
    pub per_cell: PerCellTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: usize,
    pub reps: usize,
    pub results: Vec<ColumnReport>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Median wall time of `f` in milliseconds over `reps` runs after a warm-up.
fn time_ms<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    f()?;
    let mut xs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        std::hint::black_box(f()?);
        xs.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(median(xs))
}

fn timed<T>(f: &mut impl FnMut() -> Result<T>) -> Result<f64> {
    let t = Instant::now();
    std::hint::black_box(f()?);
    Ok(t.elapsed().as_secs_f64() * 1e3)
}

/// Returns median times of `a` and `b` and the median of `b / a`, where each
/// run of `b` is compared with the mean of the runs of `a` around it.
fn time_bracketed<T, U>(
    reps: usize,
    mut a: impl FnMut() -> Result<T>,
    mut b: impl FnMut() -> Result<U>,
) -> Result<(f64, f64, f64)> {
    a()?;
    b()?;
    let (mut ta, mut tb, mut ratios) = (Vec::new(), Vec::new(), Vec::new());
    let mut before = timed(&mut a)?;
    ta.push(before);
    for _ in 0..reps {
        let tb_i = timed(&mut b)?;
        let after = timed(&mut a)?;
        ratios.push(tb_i / ((before + after) / 2.0));
        tb.push(tb_i);
        ta.push(after);
        before = after;
    }
    Ok((median(ta), median(tb), median(ratios)))
}

fn random_row<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Row {
    Row::new((0..n).map(|_| format!("{:016x}", rng.gen::<u64>()).into_bytes()).collect())
}

/// Measures one column count.
pub fn bench_columns<R: Rng + ?Sized>(n: usize, rows: usize, reps: usize, rng: &mut R) -> Result<ColumnReport> {
    if n < 2 || rows == 0 || reps == 0 {
        return Err(Error::InvalidParams(
            "bench needs at least 2 columns, 1 row and 1 repetition".into(),
        ));
    }
    let params = sss::stream_params(n)?;
    let (mpk, msk) = aoe::par_gen(params, rng);
    let (bpk, _) = aoe::par_gen(baseline_params(params), rng);

    let data: Vec<_> = (0..rows)
        .map(|_| {
            let row = random_row(n, rng);
            let msgs: Vec<_> = (0..n).map(|_| random_gt(rng)).collect();
            (row.attributes(), msgs, row)
        })
        .collect();

    let per_row = rows as f64;
    let rng = std::cell::RefCell::new(rng);
    let (t_amortized_ms, t_baseline_ms, ratio_time) = time_bracketed(
        reps,
        || {
            data.iter()
                .map(|(a, m, _)| aoe::enc(&mpk, a, m, &mut **rng.borrow_mut()))
                .collect::<Result<Vec<_>>>()
        },
        || {
            data.iter()
                .map(|(a, m, _)| aoe::enc_non_amortized(&bpk, a, m, &mut **rng.borrow_mut()))
                .collect::<Result<Vec<_>>>()
        },
    )?;
    let (t_amortized_ms, t_baseline_ms) = (t_amortized_ms / per_row, t_baseline_ms / per_row);
    let rng = rng.into_inner();

    let (a, m, row) = &data[0];
    let bytes_amortized = aoe::enc(&mpk, a, m, rng)?.to_bytes().len();
    let bytes_baseline = aoe::enc_non_amortized(&bpk, a, m, rng)?.to_bytes().len();

    let keygen_ms = time_ms(reps, || Ok(aoe::par_gen(params, &mut *rng)))?;
    let policy = Policy::new(row.cells().iter().map(|c| Some(c.clone())).collect());
    let token_ms = time_ms(reps, || {
        Ok((
            sss::authorize_sel(&msk, &policy, &mut *rng)?,
            sss::authorize_dec(&msk, &policy, 1, &mut *rng)?,
        ))
    })?;
    let erow = sss::encrypt_row(&mpk, row, rng)?;
    let pt = sss::authorize_sel(&msk, &policy, rng)?;
    let mt = sss::authorize_dec(&msk, &policy, 1, rng)?;
    let p_apply_ms = time_ms(reps, || sss::select(&erow, &pt))?;
    let m_apply_ms = time_ms(reps, || sss::decrypt_cell(&erow, &mt, 1))?;

    let cells = n as f64;
    Ok(ColumnReport {
        cols: n,
        t_amortized_ms,
        t_baseline_ms,
        bytes_amortized,
        bytes_baseline,
        ratio_time,
        ratio_mem: bytes_baseline as f64 / bytes_amortized as f64,
        per_cell: PerCellTimings {
            keygen_ms: keygen_ms / cells,
            encrypt_ms: t_amortized_ms / cells,
            token_ms,
            p_apply_ms: p_apply_ms / cells,
            m_apply_ms: m_apply_ms / cells,
        },
    })
}

/// Runs every column count in `config`, calling `progress` after each.
pub fn run<R: Rng + ?Sized>(
    config: &BenchConfig,
    rng: &mut R,
    mut progress: impl FnMut(&ColumnReport),
) -> Result<BenchReport> {
    crate::bilinear::setup_group(SUPPORTED_SECURITY_BITS)?;
    let mut results = Vec::with_capacity(config.cols.len());
    for &n in &config.cols {
        let r = bench_columns(n, config.rows, config.reps, rng)?;
        progress(&r);
        results.push(r);
    }
    Ok(BenchReport {
        rows: config.rows,
        reps: config.reps,
        results,
    })
}
