//! Leakage profiles, the real view of a coalition and the simulator.
//!
//! These are executable versions of the security definitions, used as test
//! oracles and by the `audit` command. An instance is a stream of rows tagged
//! with source ids plus a list of access requests, each naming the querier
//! that asked for it and the processor that applies the predicate token.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aoe::{MToken, MasterPublicKey, PToken};
use crate::error::{Error, Result};
use crate::invert::{const_adm, Constraint, ConstraintSet};
use crate::sss::{self, EncryptedRow, Policy, Row};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamEntry {
    pub cells: Row,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub policy: Policy,
    /// 1-based cell index.
    pub k: usize,
    /// Querier that receives the answer.
    pub qs: String,
    /// Processor that applies the predicate token.
    pub qp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    #[serde(default)]
    pub stream: Vec<StreamEntry>,
    #[serde(default)]
    pub requests: Vec<Request>,
}

impl Instance {
    pub fn m(&self) -> usize {
        self.stream.len()
    }

    pub fn l(&self) -> usize {
        self.requests.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("instance width must be at least 1".into()));
        }
        for e in &self.stream {
            Error::check_len("row", self.n, e.cells.len())?;
        }
        for r in &self.requests {
            Error::check_len("policy", self.n, r.policy.len())?;
            if !(1..=self.n).contains(&r.k) {
                return Err(Error::IndexOutOfRange { index: r.k, max: self.n });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coalition {
    #[serde(default)]
    pub sources: BTreeSet<String>,
    #[serde(default)]
    pub processors: BTreeSet<String>,
    #[serde(default)]
    pub queriers: BTreeSet<String>,
}

impl Coalition {
    fn contains(&self, id: &str) -> bool {
        self.sources.contains(id) || self.processors.contains(id) || self.queriers.contains(id)
    }
}

/// What a coalition learns about one access request. `None` stands for ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RequestLeakage {
    pub policy: Option<Policy>,
    pub k: Option<usize>,
    pub sel: Vec<Option<bool>>,
    #[serde(serialize_with = "ser_values")]
    pub val: Vec<Option<Vec<u8>>>,
}

fn ser_values<S: serde::Serializer>(v: &[Option<Vec<u8>>], s: S) -> Result<S::Ok, S::Error> {
    v.iter()
        .map(|x| x.as_deref().map(String::from_utf8_lossy))
        .collect::<Vec<_>>()
        .serialize(s)
}

/// The minimal leakage of an instance to a coalition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeakageProfile {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub rows: Vec<Option<Row>>,
    pub requests: Vec<RequestLeakage>,
}

impl LeakageProfile {
    /// Checks that values only leak for selected rows of requests whose
    /// index leaked, and that all dimensions agree.
    pub fn validate(&self) -> Result<()> {
        Error::check_len("leaked rows", self.m, self.rows.len())?;
        Error::check_len("leaked requests", self.l, self.requests.len())?;
        for r in self.rows.iter().flatten() {
            Error::check_len("leaked row", self.n, r.len())?;
        }
        for q in &self.requests {
            Error::check_len("selection bits", self.m, q.sel.len())?;
            Error::check_len("leaked values", self.m, q.val.len())?;
            if let Some(p) = &q.policy {
                Error::check_len("leaked policy", self.n, p.len())?;
            }
            if q.k.is_some() && q.policy.is_none() {
                return Err(Error::malformed("index leaked without its policy"));
            }
            if q.policy.is_none() && q.sel.iter().any(Option::is_some) {
                return Err(Error::malformed("selection leaked without its policy"));
            }
            for (s, v) in q.sel.iter().zip(&q.val) {
                if v.is_some() && (*s != Some(true) || q.k.is_none()) {
                    return Err(Error::malformed("value leaked for an unselected row"));
                }
            }
        }
        Ok(())
    }
}

pub fn minimal_leakage(c: &Coalition, inst: &Instance) -> LeakageProfile {
    let rows = inst
        .stream
        .iter()
        .map(|e| c.sources.contains(&e.source).then(|| e.cells.clone()))
        .collect();
    let requests = inst
        .requests
        .iter()
        .map(|r| {
            let q = c.queriers.contains(&r.qs);
            let p = c.processors.contains(&r.qp);
            let sel = inst
                .stream
                .iter()
                .map(|e| (q || p).then(|| r.policy.matches(&e.cells)))
                .collect();
            let val = inst
                .stream
                .iter()
                .map(|e| {
                    (q && r.policy.matches(&e.cells))
                        .then(|| e.cells.cell(r.k).unwrap_or_default().to_vec())
                })
                .collect();
            RequestLeakage {
                policy: (q || p).then(|| r.policy.clone()),
                k: q.then_some(r.k),
                sel,
                val,
            }
        })
        .collect();
    LeakageProfile {
        n: inst.n,
        m: inst.m(),
        l: inst.l(),
        rows,
        requests,
    }
}

/// True iff both instances leak the same to `c`.
pub fn is_admissible_pair(c: &Coalition, i0: &Instance, i1: &Instance) -> Result<bool> {
    if (i0.n, i0.m(), i0.l()) != (i1.n, i1.m(), i1.l()) {
        return Err(Error::InvalidParams(format!(
            "instance dimensions differ: ({}, {}, {}) vs ({}, {}, {})",
            i0.n,
            i0.m(),
            i0.l(),
            i1.n,
            i1.m(),
            i1.l()
        )));
    }
    Ok(minimal_leakage(c, i0) == minimal_leakage(c, i1))
}

/// Everything a coalition sees. `None` stands for ⊥.
#[derive(Clone, Debug)]
pub struct View {
    pub mpk: MasterPublicKey,
    pub erows: Vec<EncryptedRow>,
    pub vrows: Vec<Option<Row>>,
    pub vtokens: Vec<(Option<PToken>, Option<MToken>)>,
    pub vpols: Vec<(Option<Policy>, Option<usize>)>,
}

pub fn real_view<R: Rng + ?Sized>(
    security_bits: u32,
    c: &Coalition,
    inst: &Instance,
    rng: &mut R,
) -> Result<View> {
    inst.validate()?;
    let keys = sss::init(security_bits, inst.n, rng)?;
    let mut erows = Vec::with_capacity(inst.m());
    let mut vrows = Vec::with_capacity(inst.m());
    for e in &inst.stream {
        erows.push(sss::encrypt_row(&keys.mpk, &e.cells, rng)?);
        vrows.push(c.sources.contains(&e.source).then(|| e.cells.clone()));
    }
    let mut vtokens = Vec::with_capacity(inst.l());
    let mut vpols = Vec::with_capacity(inst.l());
    for r in &inst.requests {
        let pt = sss::authorize_sel(&keys.msk, &r.policy, rng)?;
        let mt = sss::authorize_dec(&keys.msk, &r.policy, r.k, rng)?;
        let q = c.queriers.contains(&r.qs);
        let p = c.processors.contains(&r.qp);
        vtokens.push(((q || p).then_some(pt), q.then_some(mt)));
        vpols.push(((q || p).then(|| r.policy.clone()), q.then_some(r.k)));
    }
    Ok(View {
        mpk: keys.mpk,
        erows,
        vrows,
        vtokens,
        vpols,
    })
}

/// Constraints on row `i` implied by the leaked requests.
fn row_constraints(leak: &LeakageProfile, i: usize) -> ConstraintSet {
    let mut set = ConstraintSet::default();
    for q in &leak.requests {
        let Some(policy) = &q.policy else { continue };
        match (q.sel[i], q.k, &q.val[i]) {
            (Some(false), _, _) => set.push(Constraint::Negative(policy.clone())),
            (Some(true), Some(k), Some(val)) => set.push(Constraint::FullPositive {
                policy: policy.clone(),
                k,
                val: val.clone(),
            }),
            (Some(true), _, _) => set.push(Constraint::Positive(policy.clone())),
            (None, _, _) => {}
        }
    }
    set
}

fn fresh_id(c: &Coalition, base: &str) -> String {
    (0..)
        .map(|i| format!("{base}-{i}"))
        .find(|id| !c.contains(id))
        .expect("unbounded id space")
}

/// Runs the simulator on a leakage profile.
pub fn simulate_view<R: Rng + ?Sized>(
    security_bits: u32,
    c: &Coalition,
    leak: &LeakageProfile,
    rng: &mut R,
) -> Result<View> {
    simulate_view_traced(security_bits, c, leak, rng).map(|(v, _)| v)
}

/// [`simulate_view`] that also returns an instance consistent with the rows
/// it encrypted and the tokens it issued, so its leakage can be recomputed.
#[doc(hidden)]
pub fn simulate_view_traced<R: Rng + ?Sized>(
    security_bits: u32,
    c: &Coalition,
    leak: &LeakageProfile,
    rng: &mut R,
) -> Result<(View, Instance)> {
    leak.validate()?;
    let n = leak.n;
    let keys = sss::init(security_bits, n, rng)?;

    let honest_source = fresh_id(c, "source");
    let honest_querier = fresh_id(c, "querier");
    let honest_processor = fresh_id(c, "processor");
    let corrupt = |set: &BTreeSet<String>, what: &str| {
        set.iter()
            .next()
            .cloned()
            .ok_or_else(|| Error::malformed(format!("leakage needs a corrupted {what}")))
    };

    let mut stream = Vec::with_capacity(leak.m);
    for (i, leaked) in leak.rows.iter().enumerate() {
        let entry = match leaked {
            Some(row) => StreamEntry {
                cells: row.clone(),
                source: corrupt(&c.sources, "source")?,
            },
            None => StreamEntry {
                cells: const_adm(&row_constraints(leak, i), n, rng)?.row,
                source: honest_source.clone(),
            },
        };
        stream.push(entry);
    }
    let erows = stream
        .iter()
        .map(|e| sss::encrypt_row(&keys.mpk, &e.cells, rng))
        .collect::<Result<Vec<_>>>()?;

    let mut requests = Vec::with_capacity(leak.l);
    let mut vtokens = Vec::with_capacity(leak.l);
    let mut vpols = Vec::with_capacity(leak.l);
    for q in &leak.requests {
        let (req, tokens) = match (&q.policy, q.k) {
            (Some(policy), Some(k)) => (
                Request {
                    policy: policy.clone(),
                    k,
                    qs: corrupt(&c.queriers, "querier")?,
                    qp: honest_processor.clone(),
                },
                (
                    Some(sss::authorize_sel(&keys.msk, policy, rng)?),
                    Some(sss::authorize_dec(&keys.msk, policy, k, rng)?),
                ),
            ),
            (Some(policy), None) => (
                Request {
                    policy: policy.clone(),
                    k: 1,
                    qs: honest_querier.clone(),
                    qp: corrupt(&c.processors, "processor")?,
                },
                (Some(sss::authorize_sel(&keys.msk, policy, rng)?), None),
            ),
            (None, _) => (
                Request {
                    policy: Policy::any(n),
                    k: 1,
                    qs: honest_querier.clone(),
                    qp: honest_processor.clone(),
                },
                (None, None),
            ),
        };
        requests.push(req);
        vtokens.push(tokens);
        vpols.push((q.policy.clone(), q.k));
    }

    let view = View {
        mpk: keys.mpk,
        erows,
        vrows: leak.rows.clone(),
        vtokens,
        vpols,
    };
    Ok((view, Instance { n, stream, requests }))
}

/// Outcome of applying one request's visible tokens to a view's rows.
/// `None` where the token is not visible; cell values are `None` for rows
/// the predicate token rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenPattern {
    pub selected: Option<Vec<bool>>,
    pub values: Option<Vec<Option<Vec<u8>>>>,
}

/// Applies every visible token to every encrypted row of the view.
pub fn token_patterns(view: &View) -> Result<Vec<TokenPattern>> {
    view.vtokens
        .iter()
        .zip(&view.vpols)
        .map(|((pt, mt), (_, k))| {
            let selected = pt
                .as_ref()
                .map(|pt| view.erows.iter().map(|e| sss::select(e, pt)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let values = match (mt, k, &selected) {
                (Some(mt), Some(k), Some(sel)) => Some(
                    view.erows
                        .iter()
                        .zip(sel)
                        .map(|(e, &s)| match s {
                            true => sss::decrypt_cell(e, mt, *k).map(Some),
                            false => Ok(None),
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                _ => None,
            };
            Ok(TokenPattern { selected, values })
        })
        .collect()
}

fn pattern_matches_leakage(patterns: &[TokenPattern], leak: &LeakageProfile) -> bool {
    patterns.iter().zip(&leak.requests).all(|(p, q)| {
        let sel_ok = match &p.selected {
            Some(s) => s.iter().zip(&q.sel).all(|(a, b)| Some(*a) == *b),
            None => q.sel.iter().all(Option::is_none),
        };
        let val_ok = match &p.values {
            Some(v) => *v == q.val,
            None => q.val.iter().all(Option::is_none),
        };
        sel_ok && val_ok
    })
}

/// Result of [`fixed_point_check`].
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub leakage: LeakageProfile,
    /// Leakage of the instance reconstructed from the simulation equals the input.
    pub leakage_equal: bool,
    /// Real tokens on real rows reproduce the leaked selection bits and values.
    pub real_tokens_match: bool,
    /// Simulated tokens on simulated rows do the same.
    pub simulated_tokens_match: bool,
    /// Both produce the same accept/reject pattern.
    pub patterns_equal: bool,
}

impl FixedPointReport {
    pub fn passed(&self) -> bool {
        self.leakage_equal && self.real_tokens_match && self.simulated_tokens_match && self.patterns_equal
    }
}

/// Computes the leakage of `inst`, simulates from it, and compares.
pub fn fixed_point_check<R: Rng + ?Sized>(
    security_bits: u32,
    c: &Coalition,
    inst: &Instance,
    rng: &mut R,
) -> Result<FixedPointReport> {
    inst.validate()?;
    let leakage = minimal_leakage(c, inst);
    let real = real_view(security_bits, c, inst, rng)?;
    let (sim, rebuilt) = simulate_view_traced(security_bits, c, &leakage, rng)?;
    let real_p = token_patterns(&real)?;
    let sim_p = token_patterns(&sim)?;
    Ok(FixedPointReport {
        leakage_equal: minimal_leakage(c, &rebuilt) == leakage,
        real_tokens_match: pattern_matches_leakage(&real_p, &leakage),
        simulated_tokens_match: pattern_matches_leakage(&sim_p, &leakage),
        patterns_equal: real_p == sim_p,
        leakage,
    })
}
