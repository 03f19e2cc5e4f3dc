//! Constructing a row that satisfies a set of policy constraints.
//!
//! For conjunctive equality policies every positive constraint pins the
//! cells at its non-wildcard positions, so the solver unifies pins, fills the
//! remaining cells with fresh random values and resamples until every
//! negative constraint is violated.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sss::{Policy, Row};

/// Resampling rounds before [`const_adm`] gives up.
pub const RESAMPLE_BUDGET: usize = 64;

/// Random bytes behind each free cell; the cell is their hex encoding.
pub const FREE_CELL_BYTES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// The row satisfies `policy` and its cell `k` (1-based) equals `val`.
    FullPositive { policy: Policy, k: usize, val: Vec<u8> },
    /// The row satisfies the policy.
    Positive(Policy),
    /// The row does not satisfy the policy.
    Negative(Policy),
}

impl Constraint {
    pub fn policy(&self) -> &Policy {
        match self {
            Constraint::FullPositive { policy, .. }
            | Constraint::Positive(policy)
            | Constraint::Negative(policy) => policy,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub full: Vec<Constraint>,
    pub positive: Vec<Constraint>,
    pub negative: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.full.iter().chain(&self.positive).chain(&self.negative)
    }

    pub fn is_empty(&self) -> bool {
        self.full.is_empty() && self.positive.is_empty() && self.negative.is_empty()
    }

    /// Adds a constraint to the list matching its kind.
    pub fn push(&mut self, c: Constraint) {
        match c {
            Constraint::FullPositive { .. } => self.full.push(c),
            Constraint::Positive(_) => self.positive.push(c),
            Constraint::Negative(_) => self.negative.push(c),
        }
    }
}

/// Output of [`const_adm`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub row: Row,
    /// Number of times the free cells were sampled (at least 1).
    pub rounds: usize,
}

pub fn check_admissible(row: &Row, c: &Constraint) -> Result<bool> {
    let policy = c.policy();
    Error::check_len("constraint policy", row.len(), policy.len())?;
    Ok(match c {
        Constraint::FullPositive { k, val, .. } => {
            let cell = row.cell(*k).ok_or(Error::IndexOutOfRange {
                index: *k,
                max: row.len(),
            })?;
            policy.matches(row) && cell == val.as_slice()
        }
        Constraint::Positive(_) => policy.matches(row),
        Constraint::Negative(_) => !policy.matches(row),
    })
}

fn pin(pins: &mut [Option<Vec<u8>>], i: usize, v: &[u8]) -> Result<()> {
    match &pins[i] {
        Some(p) if p != v => Err(Error::IncompatibleConstraints(format!(
            "cell {} is pinned to two different values",
            i + 1
        ))),
        Some(_) => Ok(()),
        None => {
            pins[i] = Some(v.to_vec());
            Ok(())
        }
    }
}

fn random_cell<R: Rng + ?Sized>(rng: &mut R) -> Vec<u8> {
    let mut b = [0u8; FREE_CELL_BYTES];
    rng.fill_bytes(&mut b);
    hex::encode(b).into_bytes()
}

/// Returns a row admissible for every constraint in `set`.
///
/// Fails with [`Error::IncompatibleConstraints`] when two constraints pin a
/// cell to different values, when a negative constraint is implied by the
/// pins, or when resampling exceeds [`RESAMPLE_BUDGET`].
pub fn const_adm<R: Rng + ?Sized>(set: &ConstraintSet, n: usize, rng: &mut R) -> Result<Solution> {
    let mut pins: Vec<Option<Vec<u8>>> = vec![None; n];
    for c in set.full.iter().chain(&set.positive) {
        let policy = c.policy();
        Error::check_len("constraint policy", n, policy.len())?;
        if matches!(c, Constraint::Negative(_)) {
            return Err(Error::InvalidParams("negative constraint in a positive list".into()));
        }
        for (i, v) in policy.entries().iter().enumerate() {
            if let Some(v) = v {
                pin(&mut pins, i, v)?;
            }
        }
        if let Constraint::FullPositive { k, val, .. } = c {
            if !(1..=n).contains(k) {
                return Err(Error::IndexOutOfRange { index: *k, max: n });
            }
            pin(&mut pins, k - 1, val)?;
        }
    }

    for c in &set.negative {
        let Constraint::Negative(policy) = c else {
            return Err(Error::InvalidParams("positive constraint in the negative list".into()));
        };
        Error::check_len("constraint policy", n, policy.len())?;
        let forced = policy
            .entries()
            .iter()
            .zip(&pins)
            .all(|(v, p)| v.is_none() || (p.is_some() && p == v));
        if forced {
            return Err(Error::IncompatibleConstraints(
                "a negative constraint holds for every row meeting the positive ones".into(),
            ));
        }
    }

    for rounds in 1..=RESAMPLE_BUDGET {
        let row = Row::new(
            pins.iter()
                .map(|p| p.clone().unwrap_or_else(|| random_cell(rng)))
                .collect(),
        );
        if set.negative.iter().all(|c| !c.policy().matches(&row)) {
            return Ok(Solution { row, rounds });
        }
    }
    Err(Error::IncompatibleConstraints(format!(
        "no admissible row after {RESAMPLE_BUDGET} samples"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pol(entries: &[Option<&str>]) -> Policy {
        Policy::new(entries.iter().map(|e| e.map(|s| s.as_bytes().to_vec())).collect())
    }

    fn row(cells: &[&str]) -> Row {
        Row::from_strs(cells)
    }

    #[test]
    fn check_admissible_by_kind() {
        let r = row(&["5", "7"]);
        assert!(check_admissible(&r, &Constraint::Positive(pol(&[Some("5"), None]))).unwrap());
        assert!(!check_admissible(&r, &Constraint::Negative(pol(&[Some("5"), Some("7")]))).unwrap());
        assert!(check_admissible(&r, &Constraint::Negative(pol(&[Some("6"), None]))).unwrap());
        let full = Constraint::FullPositive { policy: pol(&[Some("5"), None]), k: 2, val: b"7".to_vec() };
        assert!(check_admissible(&r, &full).unwrap());
        let full = Constraint::FullPositive { policy: pol(&[Some("5"), None]), k: 2, val: b"8".to_vec() };
        assert!(!check_admissible(&r, &full).unwrap());
        assert!(check_admissible(&r, &Constraint::Positive(Policy::any(3))).is_err());
        let bad_k = Constraint::FullPositive { policy: Policy::any(2), k: 3, val: vec![] };
        assert!(check_admissible(&r, &bad_k).is_err());
    }

    #[test]
    fn empty_set_gives_random_row() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let a = const_adm(&ConstraintSet::default(), 3, &mut rng).unwrap();
        let b = const_adm(&ConstraintSet::default(), 3, &mut rng).unwrap();
        assert_eq!(a.row.len(), 3);
        assert_eq!(a.rounds, 1);
        assert_ne!(a.row, b.row);
        assert!(a.row.cells().iter().all(|c| c.len() == 2 * FREE_CELL_BYTES));
    }

    #[test]
    fn full_positive_pins_cells() {
        let mut set = ConstraintSet::default();
        set.push(Constraint::FullPositive { policy: pol(&[Some("5"), None]), k: 2, val: b"9".to_vec() });
        let s = const_adm(&set, 2, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        assert_eq!(s.row, row(&["5", "9"]));
    }

    #[test]
    fn positive_with_negative() {
        let mut set = ConstraintSet::default();
        set.push(Constraint::Positive(pol(&[Some("5"), None])));
        set.push(Constraint::Negative(pol(&[Some("5"), Some("7")])));
        let s = const_adm(&set, 2, &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
        assert_eq!(s.row.cell(1).unwrap(), b"5");
        assert_ne!(s.row.cell(2).unwrap(), b"7");
        for c in set.iter() {
            assert!(check_admissible(&s.row, c).unwrap());
        }
    }

    #[test]
    fn incompatibilities_are_reported() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut set = ConstraintSet::default();
        set.push(Constraint::Positive(pol(&[Some("5"), None])));
        set.push(Constraint::Positive(pol(&[Some("6"), None])));
        assert!(matches!(const_adm(&set, 2, &mut rng), Err(Error::IncompatibleConstraints(_))));

        let mut set = ConstraintSet::default();
        set.push(Constraint::Positive(pol(&[Some("5"), Some("7")])));
        set.push(Constraint::Negative(pol(&[Some("5"), None])));
        assert!(matches!(const_adm(&set, 2, &mut rng), Err(Error::IncompatibleConstraints(_))));

        let mut set = ConstraintSet::default();
        set.push(Constraint::Negative(Policy::any(2)));
        assert!(matches!(const_adm(&set, 2, &mut rng), Err(Error::IncompatibleConstraints(_))));

        let mut set = ConstraintSet::default();
        set.push(Constraint::FullPositive { policy: pol(&[Some("5"), None]), k: 1, val: b"4".to_vec() });
        assert!(matches!(const_adm(&set, 2, &mut rng), Err(Error::IncompatibleConstraints(_))));
    }

    #[test]
    fn negative_already_violated_by_pins() {
        let mut set = ConstraintSet::default();
        set.push(Constraint::Positive(pol(&[Some("5"), Some("7")])));
        set.push(Constraint::Negative(pol(&[Some("6"), None])));
        let s = const_adm(&set, 2, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        assert_eq!(s.row, row(&["5", "7"]));
    }
}
