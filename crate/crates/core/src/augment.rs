//! Recognizing toric systems obtained from Hirzebruch surfaces (or the plane)
//! by elementary augmentations, transpositions and shifts.
//!
//! The searches run downwards: an irreducible (-1)-curve is brought into an
//! entry and contracted, until the Picard rank is two. A successful search
//! returns the forward chain, which replays to the input exactly.
//!
//! A (-1)-class can become an entry after transpositions only if it is the
//! sum of a segment whose squares are one `-1` and otherwise `-2`, and only
//! irreducible curves can be contracted. The weak search therefore tries
//! exactly those segment sums that are irreducible; a negative answer is a
//! certificate rather than a timeout.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::checker::{check, CheckPath, Grade};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, PicardLattice};
use crate::surface::{Registry, Surface};
use crate::toric::{cyclic, CyclicSegment, SystemFile, ToricSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentationKind {
    /// Elementary augmentations only.
    Standard,
    /// Augmentations, transpositions and shifts in any order.
    Weak,
    /// As `Weak`, with every intermediate system of the given grade.
    Graded(Grade),
}

impl FromStr for AugmentationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(AugmentationKind::Standard),
            "weak" => Ok(AugmentationKind::Weak),
            other => other
                .parse::<Grade>()
                .map(AugmentationKind::Graded)
                .map_err(|_| Error::Parse(format!("unknown augmentation kind `{s}`"))),
        }
    }
}

impl fmt::Display for AugmentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AugmentationKind::Standard => f.write_str("standard augmentation"),
            AugmentationKind::Weak => f.write_str("augmentation in the weak sense"),
            AugmentationKind::Graded(g) => write!(f, "{g} augmentation"),
        }
    }
}

fn serialize_surface_name<S: Serializer>(
    s: &Arc<Surface>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&s.display_name())
}

/// One forward operation.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Step {
    /// Pass to `target`, which contracts `exceptional` onto the current
    /// surface, inserting it at `slot`.
    Augment {
        slot: usize,
        #[serde(serialize_with = "serialize_surface_name")]
        target: Arc<Surface>,
        exceptional: DivisorClass,
    },
    Perm {
        k: usize,
    },
    Shift {
        times: usize,
    },
}

impl Step {
    pub fn apply(&self, a: &ToricSystem) -> Result<ToricSystem> {
        match self {
            Step::Augment {
                slot,
                target,
                exceptional,
            } => a.augment_lattice(*slot, target, exceptional),
            Step::Perm { k } => a.perm(*k),
            Step::Shift { times } => Ok(a.shift_by(*times)),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Augment {
                slot,
                target,
                exceptional,
            } => {
                write!(
                    f,
                    "augm_{slot} onto {} with E = {exceptional}",
                    target.display_name()
                )
            }
            Step::Perm { k } => write!(f, "perm_{k}"),
            Step::Shift { times } => write!(f, "sh^{times}"),
        }
    }
}

/// A base system on a surface of Picard rank two and the operations that
/// turn it into the searched system.
#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    #[serde(serialize_with = "serialize_system")]
    pub base: ToricSystem,
    pub steps: Vec<Step>,
}

fn serialize_system<S: Serializer>(
    a: &ToricSystem,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    SystemFile::from_system(a).serialize(ser)
}

impl Chain {
    /// All systems along the chain, starting with the base.
    pub fn systems(&self) -> Result<Vec<ToricSystem>> {
        let mut out = vec![self.base.clone()];
        for step in &self.steps {
            let next = step.apply(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn replay(&self) -> Result<ToricSystem> {
        Ok(self.systems()?.pop().expect("nonempty"))
    }

    /// Number of elementary augmentations in the chain.
    pub fn augmentations(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Augment { .. }))
            .count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AugmentationVerdict {
    pub kind: AugmentationKind,
    pub holds: bool,
    /// Irreducible (-1)-curves available at the top level: entries for the
    /// standard search, exposable segment sums otherwise.
    pub candidates: Vec<DivisorClass>,
    pub chain: Option<Chain>,
}

/// Irreducible (-1)-curves among the entries, with positions.
fn irreducible_entries(a: &ToricSystem) -> Vec<(usize, DivisorClass)> {
    let s = a.surface();
    (1..=a.len())
        .map(|i| (i, a.entry(i)))
        .filter(|(_, e)| s.is_irreducible_minus_one(e))
        .collect()
}

/// Exposable segments whose sums are irreducible (-1)-curves.
fn irreducible_exposable(a: &ToricSystem) -> Vec<(CyclicSegment, DivisorClass)> {
    let s = a.surface();
    a.exposable_segments()
        .into_iter()
        .filter(|(_, e)| s.is_irreducible_minus_one(e))
        .collect()
}

/// `I(X, A)` intersected with the irreducible (-1)-curves.
pub fn exposable_irreducible_curves(a: &ToricSystem) -> Vec<DivisorClass> {
    let mut v: Vec<DivisorClass> = irreducible_exposable(a)
        .into_iter()
        .map(|(_, e)| e)
        .collect();
    v.sort();
    v.dedup();
    v
}

fn is_base(a: &ToricSystem) -> bool {
    a.lattice().rank() <= 2
}

type StateKey = (PicardLattice, Vec<DivisorClass>, Vec<DivisorClass>);

struct Search<'r> {
    kind: AugmentationKind,
    registry: &'r Registry,
    /// Index into the sorted irreducible (-1)-curves to contract at each
    /// level; unconstrained when `None`.
    along: Option<Vec<usize>>,
    failed: HashSet<(StateKey, usize)>,
    collect_all: bool,
    limit: usize,
    found: Vec<Chain>,
}

impl Search<'_> {
    fn passes(&self, a: &ToricSystem) -> bool {
        match self.kind {
            AugmentationKind::Graded(g) => check(a, g, CheckPath::Fast).holds,
            _ => true,
        }
    }

    fn key(&self, a: &ToricSystem) -> StateKey {
        let (lattice, roots) = a.surface().key();
        let entries = match self.kind {
            // Shifts are free moves in these searches.
            AugmentationKind::Weak
            | AugmentationKind::Graded(Grade::Cyclic)
            | AugmentationKind::Graded(Grade::Exceptional) => (0..a.len())
                .map(|t| a.shift_by(t).entries().to_vec())
                .min()
                .expect("nonempty"),
            _ => a.entries().to_vec(),
        };
        (lattice, roots, entries)
    }

    /// Searches below `a`; `tail` holds the forward steps from `a` back up
    /// to the input, last step first. Returns true once the search is done.
    fn go(&mut self, a: &ToricSystem, depth: usize, tail: &[Step]) -> bool {
        if is_base(a) {
            self.found.push(Chain {
                base: a.clone(),
                steps: tail.iter().rev().cloned().collect(),
            });
            return !self.collect_all || self.found.len() >= self.limit;
        }
        let memo = (self.key(a), depth);
        if self.failed.contains(&memo) {
            return false;
        }
        let before = self.found.len();
        let wanted = self.wanted_curve(a, depth);
        let done = match self.kind {
            AugmentationKind::Standard => self.standard_moves(a, depth, tail, wanted),
            _ => self.exposure_moves(a, depth, tail, wanted),
        };
        if done {
            return true;
        }
        if self.found.len() == before {
            self.failed.insert(memo);
        }
        false
    }

    fn wanted_curve(&self, a: &ToricSystem, depth: usize) -> Option<DivisorClass> {
        let along = self.along.as_ref()?;
        let curves = a.surface().i_irr();
        let i = along.get(depth).copied().unwrap_or(0);
        Some(curves[i % curves.len()])
    }

    fn descend(&mut self, a: &ToricSystem, m: usize, depth: usize, tail: &mut Vec<Step>) -> bool {
        let (lower, _) = match a.blow_down_toric(m, self.registry) {
            Ok(x) => x,
            Err(_) => return false,
        };
        if !self.passes(&lower) {
            return false;
        }
        tail.push(Step::Augment {
            slot: m,
            target: a.surface().clone(),
            exceptional: a.entry(m),
        });
        let done = self.go(&lower, depth + 1, tail);
        tail.pop();
        done
    }

    fn standard_moves(
        &mut self,
        a: &ToricSystem,
        depth: usize,
        tail: &[Step],
        wanted: Option<DivisorClass>,
    ) -> bool {
        let mut tail = tail.to_vec();
        for (m, e) in irreducible_entries(a) {
            if wanted.is_some_and(|w| w != e) {
                continue;
            }
            if self.descend(a, m, depth, &mut tail) {
                return true;
            }
        }
        false
    }

    fn exposure_moves(
        &mut self,
        a: &ToricSystem,
        depth: usize,
        tail: &[Step],
        wanted: Option<DivisorClass>,
    ) -> bool {
        let mut seen = HashSet::new();
        for (seg, e) in irreducible_exposable(a) {
            if wanted.is_some_and(|w| w != e) || !seen.insert(e) {
                continue;
            }
            let mut tail = tail.to_vec();
            let mut visited = HashSet::new();
            if self.shrink(a, seg, depth, &mut tail, &mut visited) {
                return true;
            }
        }
        false
    }

    /// Moves the exposable segment `seg` of `a` into a single entry by
    /// transpositions at its ends and shifts, keeping every system of the
    /// required grade, then contracts it.
    fn shrink(
        &mut self,
        a: &ToricSystem,
        seg: CyclicSegment,
        depth: usize,
        tail: &mut Vec<Step>,
        visited: &mut HashSet<(Vec<DivisorClass>, CyclicSegment)>,
    ) -> bool {
        if !visited.insert((a.entries().to_vec(), seg)) {
            return false;
        }
        let n = a.len();
        if seg.k == seg.l {
            return self.descend(a, seg.k, depth, tail);
        }
        let sq = a.squares();
        let mut moves: Vec<(ToricSystem, CyclicSegment, Step)> = Vec::new();
        // perm at the last index of the segment (a -2 entry) keeps the sum on [k..l-1].
        if sq[seg.l - 1] == -2 {
            if let Ok(b) = a.perm(seg.l) {
                let shorter = CyclicSegment {
                    k: seg.k,
                    l: cyclic(seg.l as isize - 1, n),
                };
                moves.push((b, shorter, Step::Perm { k: seg.l }));
            }
        }
        if sq[seg.k - 1] == -2 {
            if let Ok(b) = a.perm(seg.k) {
                let shorter = CyclicSegment {
                    k: cyclic(seg.k as isize + 1, n),
                    l: seg.l,
                };
                moves.push((b, shorter, Step::Perm { k: seg.k }));
            }
        }
        for t in [1, n - 1] {
            let b = a.shift_by(t);
            let moved = CyclicSegment {
                k: cyclic(seg.k as isize - t as isize, n),
                l: cyclic(seg.l as isize - t as isize, n),
            };
            moves.push((b, moved, Step::Shift { times: n - t }));
        }
        for (b, next, undo) in moves {
            if !self.passes(&b) {
                continue;
            }
            tail.push(undo);
            let done = self.shrink(&b, next, depth, tail, visited);
            tail.pop();
            if done {
                return true;
            }
        }
        false
    }
}

fn run(
    a: &ToricSystem,
    kind: AugmentationKind,
    registry: &Registry,
    along: Option<Vec<usize>>,
    limit: usize,
) -> (Vec<Chain>, Vec<DivisorClass>) {
    let candidates = match kind {
        AugmentationKind::Standard => irreducible_entries(a).into_iter().map(|(_, e)| e).collect(),
        _ => exposable_irreducible_curves(a),
    };
    let mut search = Search {
        kind,
        registry,
        along,
        failed: HashSet::new(),
        collect_all: limit > 1,
        limit,
        found: Vec::new(),
    };
    search.go(a, 0, &[]);
    (search.found, candidates)
}

fn verdict(
    a: &ToricSystem,
    kind: AugmentationKind,
    along: Option<Vec<usize>>,
) -> AugmentationVerdict {
    let (mut chains, candidates) = run(a, kind, Registry::builtin(), along, 1);
    let chain = chains.pop();
    if let Some(c) = &chain {
        debug_assert_eq!(c.replay().ok().as_ref(), Some(a), "chain does not replay");
    }
    AugmentationVerdict {
        kind,
        holds: chain.is_some(),
        candidates,
        chain,
    }
}

pub fn is_standard_augmentation(a: &ToricSystem) -> AugmentationVerdict {
    verdict(a, AugmentationKind::Standard, None)
}

pub fn is_weak_augmentation(a: &ToricSystem) -> AugmentationVerdict {
    verdict(a, AugmentationKind::Weak, None)
}

/// Errors if `a` itself fails the grade.
pub fn is_graded_augmentation(a: &ToricSystem, grade: Grade) -> Result<AugmentationVerdict> {
    let own = check(a, grade, CheckPath::Fast);
    if !own.holds {
        return Err(Error::GradeCheckFailed(format!(
            "the system is not {grade}"
        )));
    }
    Ok(verdict(a, AugmentationKind::Graded(grade), None))
}

pub fn is_augmentation(a: &ToricSystem, kind: AugmentationKind) -> Result<AugmentationVerdict> {
    match kind {
        AugmentationKind::Graded(g) => is_graded_augmentation(a, g),
        _ => Ok(verdict(a, kind, None)),
    }
}

/// Weak-sense recognition along a prescribed chain of contractions: at level
/// `i` the curve with index `choices[i]` (modulo their number) among the
/// sorted irreducible (-1)-curves of the current surface is contracted.
pub fn weak_augmentation_along(a: &ToricSystem, choices: &[usize]) -> AugmentationVerdict {
    verdict(a, AugmentationKind::Weak, Some(choices.to_vec()))
}

/// Up to `limit` chains, differing in the contracted curves.
pub fn augmentation_chains(
    a: &ToricSystem,
    kind: AugmentationKind,
    registry: &Registry,
    limit: usize,
) -> Vec<Chain> {
    run(a, kind, registry, None, limit.max(1)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::tests::{counterexample, degree_four_example};

    fn sys(label: &str, entries: &[&str]) -> ToricSystem {
        ToricSystem::parse(Registry::builtin().get(label).unwrap(), entries).unwrap()
    }

    fn assert_replays(v: &AugmentationVerdict, a: &ToricSystem) {
        let chain = v.chain.as_ref().expect("chain");
        assert_eq!(&chain.replay().unwrap(), a);
        assert!(chain.base.lattice().rank() <= 2);
        assert_eq!(chain.augmentations() + 2, a.lattice().rank());
    }

    #[test]
    fn plane_is_a_base() {
        let a = sys("P2", &["L", "L", "L"]);
        let v = is_standard_augmentation(&a);
        assert!(v.holds);
        assert!(v.chain.unwrap().steps.is_empty());
    }

    #[test]
    fn counterexample_is_not_weak() {
        let a = counterexample();
        let v = is_weak_augmentation(&a);
        assert!(!v.holds);
        assert!(v.candidates.is_empty());
        assert!(!is_standard_augmentation(&a).holds);
    }

    #[test]
    fn degree_four_example_augmentations() {
        let a = degree_four_example();
        assert!(!is_standard_augmentation(&a).holds);
        let v = is_weak_augmentation(&a);
        assert!(v.holds);
        assert_replays(&v, &a);
        for grade in [Grade::Exceptional, Grade::Strong, Grade::Cyclic] {
            let v = is_graded_augmentation(&a, grade).unwrap();
            assert!(v.holds, "{grade}");
            assert_replays(&v, &a);
            for b in v.chain.unwrap().systems().unwrap() {
                assert!(check(&b, grade, CheckPath::General).holds);
            }
        }
    }

    #[test]
    fn standard_chain_replays() {
        let a = sys("6,∅", &["L13", "E1", "L12", "E2", "L23", "E3"]);
        let v = is_standard_augmentation(&a);
        assert!(v.holds);
        assert_replays(&v, &a);
        assert!(is_weak_augmentation(&a).holds);
        let chains = augmentation_chains(&a, AugmentationKind::Standard, Registry::builtin(), 100);
        assert!(chains.len() > 1);
        for c in &chains {
            assert_eq!(c.replay().unwrap(), a);
        }
    }

    #[test]
    fn grade_precondition() {
        let a = counterexample();
        assert!(is_graded_augmentation(&a, Grade::Cyclic).is_err());
        let v = is_graded_augmentation(&a, Grade::Strong).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn kinds_parse() {
        assert_eq!(
            "weak".parse::<AugmentationKind>().unwrap(),
            AugmentationKind::Weak
        );
        assert_eq!(
            "strong".parse::<AugmentationKind>().unwrap(),
            AugmentationKind::Graded(Grade::Strong)
        );
        assert!("mild".parse::<AugmentationKind>().is_err());
    }
}
