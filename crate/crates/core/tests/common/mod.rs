#![allow(dead_code)]

use std::collections::BTreeSet;

use ark_ff::{Field, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use selstream::bilinear::{random_scalar, Scalar};
use selstream::secharness::{Coalition, Instance, Request, StreamEntry};
use selstream::sss::{Policy, Row};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| *x * y).sum()
}

/// Random vector orthogonal to `x`: random entries, then the last position
/// where `x` is nonzero is solved for. Returns all zeros if `x` is zero.
pub fn orthogonal_to<R: Rng>(x: &[Scalar], rng: &mut R) -> Vec<Scalar> {
    let mut s: Vec<Scalar> = x.iter().map(|_| random_scalar(rng)).collect();
    match x.iter().rposition(|v| !v.is_zero()) {
        Some(p) => {
            s[p] = Scalar::zero();
            let partial = dot(x, &s);
            s[p] = -partial * x[p].inverse().unwrap();
        }
        None => s.iter_mut().for_each(|v| *v = Scalar::zero()),
    }
    s
}

pub fn random_vec<R: Rng>(len: usize, rng: &mut R) -> Vec<Scalar> {
    (0..len).map(|_| random_scalar(rng)).collect()
}

pub const ALPHABET: [&str; 3] = ["a", "b", "c"];

/// Row over a tiny alphabet so that random policies match often.
pub fn small_row<R: Rng>(n: usize, rng: &mut R) -> Row {
    Row::from_strs(&(0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect::<Vec<_>>())
}

/// Policy with roughly `star` fraction of wildcards over the same alphabet.
pub fn small_policy<R: Rng>(n: usize, star: f64, rng: &mut R) -> Policy {
    Policy::new(
        (0..n)
            .map(|_| (!rng.gen_bool(star)).then(|| ALPHABET.choose(rng).unwrap().as_bytes().to_vec()))
            .collect(),
    )
}

/// Policy matching `row` at a random subset of positions, wildcards elsewhere.
pub fn policy_for<R: Rng>(row: &Row, rng: &mut R) -> Policy {
    Policy::new(row.cells().iter().map(|c| rng.gen_bool(0.5).then(|| c.clone())).collect())
}

fn ids(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn subset<R: Rng>(all: &[String], rng: &mut R) -> BTreeSet<String> {
    all.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect()
}

pub fn random_instance<R: Rng>(max_n: usize, max_m: usize, max_l: usize, rng: &mut R) -> Instance {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let l = rng.gen_range(0..=max_l);
    let sources = ids("s", 3);
    let queriers = ids("q", 3);
    let processors = ids("p", 3);
    let stream = (0..m)
        .map(|_| StreamEntry {
            cells: small_row(n, rng),
            source: sources.choose(rng).unwrap().clone(),
        })
        .collect();
    let requests = (0..l)
        .map(|_| Request {
            policy: small_policy(n, 0.6, rng),
            k: rng.gen_range(1..=n),
            qs: queriers.choose(rng).unwrap().clone(),
            qp: processors.choose(rng).unwrap().clone(),
        })
        .collect();
    Instance { n, stream, requests }
}

pub fn random_coalition<R: Rng>(rng: &mut R) -> Coalition {
    Coalition {
        sources: subset(&ids("s", 3), rng),
        processors: subset(&ids("p", 3), rng),
        queriers: subset(&ids("q", 3), rng),
    }
}

pub mod cli {
    use std::ffi::OsStr;
    use std::path::Path;
    use std::process::{Command, Output};

    use rand::Rng;
    use selstream::sss::{Policy, Row};

    pub fn selstream<I, S>(args: I) -> Output
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        Command::new(env!("CARGO_BIN_EXE_selstream"))
            .args(args)
            .output()
            .expect("spawn selstream")
    }

    /// Runs the command and panics with its stderr unless it succeeds.
    pub fn ok<I, S>(args: I) -> String
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        let out = selstream(args);
        assert!(
            out.status.success(),
            "selstream failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    pub fn p(path: &Path) -> &str {
        path.to_str().unwrap()
    }

    pub fn policy_json(policy: &Policy, k: usize) -> String {
        serde_json::json!({ "policy": policy, "k": k }).to_string()
    }

    /// Runs setup, ingest for every row, authorize, scan and decrypt in `dir`
    /// and returns the decrypted lines.
    pub fn pipeline<R: Rng>(dir: &Path, rows: &[Row], policy: &Policy, k: usize, rng: &mut R) -> (usize, Vec<String>) {
        let n = policy.len();
        let seed = rng.gen::<u64>().to_string();
        ok(["setup", "--n", &n.to_string(), "--out-dir", p(dir), "--seed", &seed]);
        let stream = dir.join("stream.sst");
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<_> = row.cells().iter().map(|c| String::from_utf8(c.clone()).unwrap()).collect();
            ok([
                "ingest",
                "--mpk",
                p(&dir.join("mpk.bin")),
                "--stream",
                p(&stream),
                "--row",
                &cells.join(","),
                "--source",
                &format!("s{i}"),
            ]);
        }
        if rows.is_empty() {
            selstream::store::write_all(&stream, n, &[]).unwrap();
        }
        let policy_file = dir.join("policy.json");
        std::fs::write(&policy_file, policy_json(policy, k)).unwrap();
        let tokens = dir.join("tokens");
        ok(["authorize", "--msk", p(&dir.join("msk.bin")), "--policy", p(&policy_file), "--out", p(&tokens)]);
        let selected = dir.join("selected.sst");
        let scan = ok([
            "scan",
            "--stream",
            p(&stream),
            "--ptoken",
            p(&tokens.join("ptoken.bin")),
            "--out",
            p(&selected),
        ]);
        let count: usize = scan.trim().strip_prefix("matched ").unwrap().parse().unwrap();
        let out = ok([
            "decrypt",
            "--selected",
            p(&selected),
            "--mtoken",
            p(&tokens.join("mtoken.bin")),
            "--k",
            &k.to_string(),
        ]);
        (count, out.lines().map(str::to_owned).collect())
    }

    /// Plaintext answer: cell `k` of every row the policy matches, in order.
    pub fn expected_answers(rows: &[Row], policy: &Policy, k: usize) -> Vec<String> {
        rows.iter()
            .filter(|r| policy.matches(r))
            .map(|r| String::from_utf8(r.cell(k).unwrap().to_vec()).unwrap())
            .collect()
    }
}
