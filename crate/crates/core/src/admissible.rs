//! Integer sequences under elementary augmentation.
//!
//! A sequence is admissible if it arises from `(0, k, 0, -k)` or
//! `(k, 0, -k, 0)` by elementary augmentations; it is of the first kind if in
//! addition every entry is at least `-2`.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// `augm_m` for `1 <= m <= n + 1`: insert `-1` at slot `m` and lower both
/// cyclic neighbours by one.
pub fn augment_sequence(a: &[i64], m: usize) -> Result<Vec<i64>> {
    let n = a.len();
    if m == 0 || m > n + 1 || n == 0 {
        return Err(Error::IndexOutOfRange(m, n + 1));
    }
    let mut out = a.to_vec();
    out.insert(m - 1, -1);
    let len = n + 1;
    out[(m + len - 2) % len] -= 1;
    out[m % len] -= 1;
    Ok(out)
}

/// Inverse of `augm_m` at an entry equal to `-1`.
fn unaugment(a: &[i64], m: usize) -> Vec<i64> {
    let n = a.len();
    let mut out = a.to_vec();
    out[(m + n - 2) % n] += 1;
    out[m % n] += 1;
    out.remove(m - 1);
    out
}

/// `(a_2, .., a_n, a_1)`.
pub fn shift(a: &[i64]) -> Vec<i64> {
    let mut v = a.to_vec();
    v.rotate_left(1);
    v
}

/// `(a_{n-1}, .., a_1, a_n)`.
pub fn sym(a: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut v: Vec<i64> = a[..n - 1].iter().rev().copied().collect();
    v.push(a[n - 1]);
    v
}

/// Lexicographically smallest sequence among all rotations and reversals.
pub fn canonical_dihedral(a: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut best = a.to_vec();
    let rev: Vec<i64> = a.iter().rev().copied().collect();
    for base in [a, rev.as_slice()] {
        for t in 0..n {
            let mut v = base.to_vec();
            v.rotate_left(t);
            if v < best {
                best = v;
            }
        }
    }
    best
}

fn is_base(a: &[i64]) -> bool {
    a.len() == 4
        && ((a[0] == 0 && a[2] == 0 && a[1] == -a[3]) || (a[1] == 0 && a[3] == 0 && a[0] == -a[2]))
}

/// How an admissible sequence arises: apply `steps` in order to `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub base: Vec<i64>,
    pub steps: Vec<usize>,
}

impl Derivation {
    pub fn replay(&self) -> Vec<i64> {
        self.steps.iter().fold(self.base.clone(), |a, &m| {
            augment_sequence(&a, m).expect("recorded step is in range")
        })
    }
}

/// Decides admissibility by removing `-1` entries in every possible order;
/// dead ends are memoized by their dihedral class.
pub fn admissible_derivation(a: &[i64]) -> Option<Derivation> {
    fn go(a: &[i64], failed: &mut HashSet<Vec<i64>>, path: &mut Vec<usize>) -> Option<Vec<i64>> {
        if a.len() < 4 {
            return None;
        }
        if a.len() == 4 {
            return is_base(a).then(|| a.to_vec());
        }
        let key = canonical_dihedral(a);
        if failed.contains(&key) {
            return None;
        }
        for m in 1..=a.len() {
            if a[m - 1] != -1 {
                continue;
            }
            path.push(m);
            if let Some(base) = go(&unaugment(a, m), failed, path) {
                return Some(base);
            }
            path.pop();
        }
        failed.insert(key);
        None
    }
    let mut path = Vec::new();
    let base = go(a, &mut HashSet::new(), &mut path)?;
    path.reverse();
    Some(Derivation { base, steps: path })
}

pub fn is_admissible(a: &[i64]) -> bool {
    admissible_derivation(a).is_some()
}

pub fn is_first_kind(a: &[i64]) -> bool {
    a.iter().all(|&x| x >= -2) && is_admissible(a)
}

/// Names of the first-kind dihedral classes, keyed by a representative.
pub const FIRST_KIND_NAMES: [(&str, &[i64]); 15] = [
    ("P1xP1", &[0, 0, 0, 0]),
    ("F1", &[0, -1, 0, 1]),
    ("F2", &[0, -2, 0, 2]),
    ("5a", &[0, 0, -1, -1, -1]),
    ("5b", &[0, -2, -1, -1, 1]),
    ("6a", &[-1, -1, -1, -1, -1, -1]),
    ("6b", &[-1, -1, -2, -1, -1, 0]),
    ("6c", &[0, 0, -2, -1, -2, -1]),
    ("6d", &[0, -2, -2, -1, -2, 1]),
    ("7a", &[-1, -1, -1, -2, -1, -2, -1]),
    ("7b", &[-2, -1, -2, -2, -1, -1, 0]),
    ("8a", &[-2, -1, -2, -1, -2, -1, -2, -1]),
    ("8b", &[-2, -1, -1, -2, -1, -2, -2, -1]),
    ("8c", &[-2, -1, -2, -2, -2, -1, -2, 0]),
    ("9", &[-2, -2, -1, -2, -2, -1, -2, -2, -1]),
];

/// Name of the first-kind type of `a` (up to rotation and reversal).
pub fn first_kind_name(a: &[i64]) -> Option<&'static str> {
    let c = canonical_dihedral(a);
    FIRST_KIND_NAMES
        .iter()
        .find(|(_, s)| canonical_dihedral(s) == c)
        .map(|(n, _)| *n)
}

/// All first-kind sequences up to rotation and reversal, as canonical
/// representatives sorted by length and then lexicographically.
pub fn enumerate_first_kind() -> Vec<Vec<i64>> {
    let mut found: BTreeSet<(usize, Vec<i64>)> = BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = Vec::new();
    for k in -2..=2 {
        for seed in [vec![0, k, 0, -k], vec![k, 0, -k, 0]] {
            let c = canonical_dihedral(&seed);
            if found.insert((4, c.clone())) {
                frontier.push(c);
            }
        }
    }
    while let Some(a) = frontier.pop() {
        // Entries only decrease under augmentation, so the length is bounded
        // once every entry must stay >= -2; the cap only guards against bugs.
        assert!(a.len() < 16, "first-kind closure did not terminate");
        for m in 1..=a.len() + 1 {
            let b = augment_sequence(&a, m).expect("in range");
            if b.iter().any(|&x| x < -2) {
                continue;
            }
            let c = canonical_dihedral(&b);
            if found.insert((c.len(), c.clone())) {
                frontier.push(c);
            }
        }
    }
    found.into_iter().map(|(_, c)| c).collect()
}

/// Parses `(a1, a2, ..)`, `a1,a2,..` or whitespace-separated integers.
pub fn parse_sequence(text: &str) -> Result<Vec<i64>> {
    let t = text
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    t.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer `{s}` in sequence")))
        })
        .collect()
}
