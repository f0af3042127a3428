//! Exhaustive enumeration of toric systems with prescribed squares, and the
//! classification checks built on it: surfaces with and without cyclic
//! strong exceptional toric systems, the degree-two counterexample, and a
//! bounded search for strong exceptional systems that are not augmentations.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::admissible::{canonical_dihedral, enumerate_first_kind, is_admissible};
use crate::augment::{
    exposable_irreducible_curves, is_standard_augmentation, is_weak_augmentation,
};
use crate::checker::{
    check, is_cyclic_strong_exceptional, is_strong_exceptional, CheckPath, Grade,
};
use crate::classes::{r_classes, reflect};
use crate::effective::zariski_reduce;
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, PicardLattice};
use crate::surface::{blow_down, Registry, Surface, TypeMatch};
use crate::toric::{CyclicSegment, ToricSystem};

/// Limits for an enumeration; `start_branch` skips that many choices for the
/// first entry, which makes interrupted runs resumable.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub start_branch: usize,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub systems: Vec<ToricSystem>,
    /// False if the deadline stopped the search.
    pub complete: bool,
    /// First-entry branch to resume from when incomplete.
    pub next_branch: usize,
    pub nodes: u64,
}

/// A predicate on prefixes `A_1..A_i` (the full system included); a prefix
/// it rejects is not extended.
pub type PrefixFilter<'a> = dyn Fn(&[DivisorClass]) -> bool + 'a;

/// All toric systems on `s` with `A_i^2 = squares[i]`, in lexicographic order.
pub fn enumerate_toric_systems(s: &Arc<Surface>, squares: &[i64]) -> Result<Vec<ToricSystem>> {
    Ok(enumerate_filtered(s, squares, None, Limits::default())?.systems)
}

pub fn enumerate_filtered(
    s: &Arc<Surface>,
    squares: &[i64],
    filter: Option<&PrefixFilter<'_>>,
    limits: Limits,
) -> Result<Enumeration> {
    let n = squares.len();
    let expected = (12 - s.degree()) as usize;
    if n != expected {
        return Err(Error::InvalidToricSystem(format!(
            "squares pattern of length {n}, expected {expected} on {}",
            s.display_name()
        )));
    }
    let lattice = s.lattice();
    let alphabets: Vec<Arc<Vec<DivisorClass>>> =
        squares.iter().map(|&r| r_classes(lattice, r)).collect();
    // Square of A_{i+1} + .. + A_n, which is determined by the squares.
    let tail_square: Vec<i64> = (0..=n)
        .map(|i| -2 + squares[i..].iter().map(|a| a + 2).sum::<i64>())
        .collect();
    let mut e = Enumerator {
        surface: s,
        n,
        alphabets,
        tail_square,
        minus_k: -s.canonical(),
        filter,
        deadline: limits.deadline,
        prefix: Vec::with_capacity(n),
        out: Vec::new(),
        nodes: 0,
        timed_out: false,
    };
    let first = e.alphabets[0].clone();
    let mut next_branch = first.len();
    for (b, c) in first.iter().enumerate().skip(limits.start_branch) {
        if e.out_of_time() {
            next_branch = b;
            break;
        }
        e.try_push(*c, 0);
    }
    let complete = !e.timed_out;
    Ok(Enumeration {
        systems: e.out,
        complete,
        next_branch: if complete { first.len() } else { next_branch },
        nodes: e.nodes,
    })
}

struct Enumerator<'a, 'f> {
    surface: &'a Arc<Surface>,
    n: usize,
    alphabets: Vec<Arc<Vec<DivisorClass>>>,
    tail_square: Vec<i64>,
    minus_k: DivisorClass,
    filter: Option<&'a PrefixFilter<'f>>,
    deadline: Option<Instant>,
    prefix: Vec<DivisorClass>,
    out: Vec<ToricSystem>,
    nodes: u64,
    timed_out: bool,
}

impl Enumerator<'_, '_> {
    fn out_of_time(&mut self) -> bool {
        if let Some(d) = self.deadline {
            if self.nodes % 256 == 0 && Instant::now() >= d {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    /// Products of a new entry at position `i` with the prefix.
    fn fits(&self, c: &DivisorClass, i: usize) -> bool {
        let n = self.n;
        for (j, a) in self.prefix.iter().enumerate() {
            let adjacent = j + 1 == i || (i == n - 1 && j == 0 && n > 2);
            if c.dot(a) != i64::from(adjacent) {
                return false;
            }
        }
        true
    }

    fn try_push(&mut self, c: DivisorClass, i: usize) {
        self.nodes += 1;
        if !self.fits(&c, i) {
            return;
        }
        self.prefix.push(c);
        let rest = self.minus_k - self.prefix.iter().copied().sum::<DivisorClass>();
        let consistent = i + 1 == self.n || rest.square() == self.tail_square[i + 1];
        if consistent && self.filter.is_none_or(|f| f(&self.prefix)) {
            self.extend(i + 1, rest);
        }
        self.prefix.pop();
    }

    fn extend(&mut self, i: usize, rest: DivisorClass) {
        if i == self.n {
            if rest.is_zero() {
                let sys = ToricSystem::new(self.surface.clone(), self.prefix.clone())
                    .expect("enumerated systems are valid");
                self.out.push(sys);
            }
            return;
        }
        if self.out_of_time() {
            return;
        }
        if i + 1 == self.n {
            // The last entry is forced.
            if self.alphabets[i].binary_search(&rest).is_ok() {
                self.try_push(rest, i);
            }
            return;
        }
        let alphabet = self.alphabets[i].clone();
        let prev = self.prefix[i - 1];
        for c in alphabet.iter() {
            if c.dot(&prev) == 1 {
                self.try_push(*c, i);
            }
            if self.timed_out {
                return;
            }
        }
    }
}

/// Rejects prefixes with a run of `-2` squares whose sum is effective or
/// anti-effective. With `cyclic` false, runs ending at the last position of
/// a complete system are not checked (the strong exceptional condition).
pub fn minus_two_run_filter(
    s: &Surface,
    n: usize,
    cyclic: bool,
) -> impl Fn(&[DivisorClass]) -> bool + '_ {
    move |prefix: &[DivisorClass]| {
        let i = prefix.len();
        if i == n && !cyclic {
            return true;
        }
        let mut sum = DivisorClass::zero(s.lattice());
        for a in prefix.iter().rev() {
            if a.square() != -2 {
                break;
            }
            sum += *a;
            if s.r_slo().binary_search(&sum).is_err() {
                return false;
            }
        }
        true
    }
}

/// All rotations and reversals of `pattern`, without repetitions.
pub fn dihedral_orbit(pattern: &[i64]) -> Vec<Vec<i64>> {
    let n = pattern.len();
    let rev: Vec<i64> = pattern.iter().rev().copied().collect();
    let mut out = BTreeSet::new();
    for base in [pattern.to_vec(), rev] {
        for t in 0..n {
            let mut v = base.clone();
            v.rotate_left(t);
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// First-kind squares patterns of length `n`, every rotation and reversal.
pub fn first_kind_patterns(n: usize) -> Vec<Vec<i64>> {
    enumerate_first_kind()
        .into_iter()
        .filter(|a| a.len() == n)
        .flat_map(|a| dihedral_orbit(&a))
        .collect()
}

/// Admissible patterns of length `n` that a strong exceptional system can
/// have: entries `1..n-1` at least `-2`, the last at least `floor`.
pub fn strong_patterns(n: usize, floor: i64) -> Vec<Vec<i64>> {
    let floor = floor.min(-2);
    let ok =
        |a: &[i64]| a.iter().all(|&x| x >= floor) && a.iter().filter(|&&x| x < -2).count() <= 1;
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier = Vec::new();
    let bound = -floor;
    for k in -bound..=bound {
        for seed in [vec![0, k, 0, -k], vec![k, 0, -k, 0]] {
            let c = canonical_dihedral(&seed);
            if ok(&c) && found.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    // Entries only decrease under augmentation, so every ancestor of an
    // accepted pattern is accepted as well.
    while let Some(a) = frontier.pop() {
        if a.len() >= n {
            continue;
        }
        for m in 1..=a.len() + 1 {
            let b = crate::admissible::augment_sequence(&a, m).expect("in range");
            let c = canonical_dihedral(&b);
            if ok(&c) && found.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    let mut out = BTreeSet::new();
    for a in found.into_iter().filter(|a| a.len() == n) {
        for b in dihedral_orbit(&a) {
            if b[..n - 1].iter().all(|&x| x >= -2) {
                out.insert(b);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Assertion {
        Assertion {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A row of the table of surfaces with cyclic strong exceptional systems.
pub struct YesRow {
    pub degree: i64,
    pub types: &'static [&'static str],
    /// Types whose effective roots contain those of every other listed type.
    pub maximal: &'static [&'static str],
    pub system: &'static [&'static str],
    /// Sums over runs of `-2` squares, which must be neither effective nor
    /// anti-effective.
    pub critical: &'static [&'static str],
}

pub const TABLE_YES: [YesRow; 9] = [
    YesRow {
        degree: 9,
        types: &["P2"],
        maximal: &["P2"],
        system: &["L", "L", "L"],
        critical: &[],
    },
    YesRow {
        degree: 8,
        types: &["F0"],
        maximal: &["F0"],
        system: &["F", "S", "F", "S"],
        critical: &[],
    },
    YesRow {
        degree: 8,
        types: &["F1"],
        maximal: &["F1"],
        system: &["L1", "E1", "L1", "L"],
        critical: &[],
    },
    YesRow {
        degree: 8,
        types: &["F2"],
        maximal: &["F2"],
        system: &["F", "S-F", "F", "S-F"],
        critical: &[],
    },
    YesRow {
        degree: 7,
        types: &["7,∅", "7,A1"],
        maximal: &["7,A1"],
        system: &["L1", "E1", "L12", "E2", "L2"],
        critical: &[],
    },
    YesRow {
        degree: 6,
        types: &["6,∅", "6,A1,4", "6,A1,3", "6,2A1", "6,A2", "6,A1+A2"],
        maximal: &["6,A1+A2"],
        system: &["L13", "E1", "L12", "E2", "L23", "E3"],
        critical: &[],
    },
    YesRow {
        degree: 5,
        types: &["5,∅", "5,A1", "5,2A1", "5,A2", "5,A1+A2"],
        maximal: &["5,A1+A2"],
        system: &["L134", "E4", "E1-E4", "L12", "E2", "L23", "E3"],
        critical: &["L134", "E1-E4"],
    },
    YesRow {
        degree: 4,
        types: &[
            "4,∅", "4,A1", "4,2A1,9", "4,2A1,8", "4,A2", "4,3A1", "4,A1+A2", "4,A3,4", "4,4A1",
            "4,2A1+A2", "4,A1+A3", "4,2A1+A3",
        ],
        maximal: &["4,2A1+A3", "4,2A1+A2"],
        system: &["L134", "E4", "E1-E4", "L12", "E2-E5", "E5", "L235", "E3"],
        critical: &["L134", "E1-E4", "E2-E5", "L235"],
    },
    YesRow {
        degree: 3,
        types: &[
            "3,∅", "3,A1", "3,2A1", "3,A2", "3,3A1", "3,A1+A2", "3,4A1", "3,2A1+A2", "3,2A2",
            "3,A1+2A2", "3,3A2",
        ],
        maximal: &["3,3A2", "3,4A1"],
        system: &[
            "E2-E4", "L125", "E5", "E1-E5", "L136", "E6", "E3-E6", "L234", "E4",
        ],
        critical: &[
            "E2-E4", "L125", "L145", "E1-E5", "L136", "L356", "E3-E6", "L234", "L246",
        ],
    },
];

/// A row of the table of surfaces without cyclic strong exceptional
/// systems, with the type it blows down to (if any).
pub struct NoRow {
    pub label: &'static str,
    pub blows_down_to: Option<&'static str>,
}

pub const TABLE_NO: [NoRow; 16] = [
    NoRow {
        label: "5,A3",
        blows_down_to: None,
    },
    NoRow {
        label: "5,A4",
        blows_down_to: None,
    },
    NoRow {
        label: "4,A3,5",
        blows_down_to: Some("5,A3"),
    },
    NoRow {
        label: "4,A4",
        blows_down_to: Some("5,A4"),
    },
    NoRow {
        label: "4,D4",
        blows_down_to: Some("5,A3"),
    },
    NoRow {
        label: "4,D5",
        blows_down_to: Some("5,A4"),
    },
    NoRow {
        label: "3,A3",
        blows_down_to: Some("4,A3,5"),
    },
    NoRow {
        label: "3,A1+A3",
        blows_down_to: Some("4,A3,5"),
    },
    NoRow {
        label: "3,A4",
        blows_down_to: Some("4,A4"),
    },
    NoRow {
        label: "3,D4",
        blows_down_to: Some("4,D4"),
    },
    NoRow {
        label: "3,2A1+A3",
        blows_down_to: Some("4,A3,5"),
    },
    NoRow {
        label: "3,A1+A4",
        blows_down_to: Some("4,A4"),
    },
    NoRow {
        label: "3,A5",
        blows_down_to: Some("4,A4"),
    },
    NoRow {
        label: "3,D5",
        blows_down_to: Some("4,D5"),
    },
    NoRow {
        label: "3,A1+A5",
        blows_down_to: Some("4,A4"),
    },
    NoRow {
        label: "3,E6",
        blows_down_to: Some("4,D5"),
    },
];

#[derive(Clone, Debug, Serialize)]
pub struct TypeCheck {
    pub surface: String,
    pub validates: bool,
    pub cyclic_fast: bool,
    pub cyclic_general: bool,
    pub standard_augmentation: bool,
    pub detail: Option<String>,
}

impl TypeCheck {
    pub fn passed(&self) -> bool {
        self.validates && self.cyclic_fast && self.cyclic_general && self.standard_augmentation
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct YesRowReport {
    pub degree: i64,
    pub system: Vec<String>,
    pub checks: Vec<TypeCheck>,
    /// The `-2` run sums agree with the listed classes.
    pub critical_classes: Assertion,
    /// The listed maximal types contain the effective roots of all others.
    pub maximal_types: Assertion,
    pub passed: bool,
}

fn check_type(s: &Arc<Surface>, entries: &[&str]) -> TypeCheck {
    let surface = s.display_name();
    match ToricSystem::parse(s.clone(), entries) {
        Err(e) => TypeCheck {
            surface,
            validates: false,
            cyclic_fast: false,
            cyclic_general: false,
            standard_augmentation: false,
            detail: Some(e.to_string()),
        },
        Ok(a) => {
            let fast = check(&a, Grade::Cyclic, CheckPath::Fast);
            let general = check(&a, Grade::Cyclic, CheckPath::General);
            let detail = fast
                .witness
                .as_ref()
                .or(general.witness.as_ref())
                .map(|w| format!("segment {} with sum {} fails", w.segment, w.sum));
            TypeCheck {
                surface,
                validates: true,
                cyclic_fast: fast.holds,
                cyclic_general: general.holds,
                standard_augmentation: is_standard_augmentation(&a).holds,
                detail,
            }
        }
    }
}

fn minus_two_run_sums(a: &ToricSystem) -> BTreeSet<DivisorClass> {
    let sq = a.squares();
    CyclicSegment::all(a.len())
        .into_iter()
        .filter(|seg| seg.indices(a.len()).all(|i| sq[i - 1] == -2))
        .map(|seg| a.segment_sum(seg))
        .collect()
}

pub fn verify_yes_row(registry: &Registry, row: &YesRow) -> Result<YesRowReport> {
    let surfaces: Vec<Arc<Surface>> = row
        .types
        .iter()
        .map(|t| registry.get(t))
        .collect::<Result<_>>()?;
    let checks: Vec<TypeCheck> = surfaces.iter().map(|s| check_type(s, row.system)).collect();
    let first = &surfaces[0];
    let critical_classes = match ToricSystem::parse(first.clone(), row.system) {
        Ok(a) => {
            let computed = minus_two_run_sums(&a);
            let listed: BTreeSet<DivisorClass> = row
                .critical
                .iter()
                .map(|c| first.parse_class(c))
                .collect::<Result<_>>()?;
            Assertion::new(
                "critical classes",
                computed == listed,
                join(computed.iter().map(|c| c.shorthand())),
            )
        }
        Err(e) => Assertion::new("critical classes", false, e.to_string()),
    };
    let maximal: Vec<Arc<Surface>> = row
        .maximal
        .iter()
        .map(|t| registry.get(t))
        .collect::<Result<_>>()?;
    let mut uncovered = Vec::new();
    for s in &surfaces {
        let covered = maximal.iter().any(|m| root_system_embeds(s, m));
        if !covered {
            uncovered.push(s.display_name());
        }
    }
    let maximal_types = Assertion::new(
        "maximal effective roots",
        uncovered.is_empty(),
        if uncovered.is_empty() {
            "every type is covered".to_string()
        } else {
            format!("not covered: {}", join(uncovered))
        },
    );
    let passed =
        checks.iter().all(TypeCheck::passed) && critical_classes.passed && maximal_types.passed;
    Ok(YesRowReport {
        degree: row.degree,
        system: row.system.iter().map(|s| s.to_string()).collect(),
        checks,
        critical_classes,
        maximal_types,
        passed,
    })
}

/// Simple reflections generating the Weyl group of the lattice.
fn weyl_generators(lattice: PicardLattice) -> Vec<DivisorClass> {
    match lattice {
        PicardLattice::Blowup(n) => {
            let n = n as usize;
            let mut gens: Vec<DivisorClass> = (1..n)
                .map(|i| lattice.basis(i) - lattice.basis(i + 1))
                .collect();
            if n >= 3 {
                gens.push(
                    lattice.basis(0) - lattice.basis(1) - lattice.basis(2) - lattice.basis(3),
                );
            }
            gens
        }
        PicardLattice::Hirzebruch { .. } => Vec::new(),
    }
}

/// Whether some Weyl group element maps the root system of `small` into
/// that of `big`.
pub fn root_system_embeds(small: &Surface, big: &Surface) -> bool {
    if small.lattice() != big.lattice() {
        return false;
    }
    let target: BTreeSet<DivisorClass> = big.r_eff().iter().flat_map(|r| [*r, -*r]).collect();
    let start: BTreeSet<DivisorClass> = small.r_eff().iter().flat_map(|r| [*r, -*r]).collect();
    let gens = weyl_generators(small.lattice());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(roots) = queue.pop_front() {
        if roots.is_subset(&target) {
            return true;
        }
        for g in &gens {
            let image: BTreeSet<DivisorClass> = roots
                .iter()
                .map(|r| reflect(r, g).expect("simple root"))
                .collect();
            if seen.insert(image.clone()) {
                queue.push_back(image);
            }
        }
    }
    false
}

pub fn verify_table_yes(registry: &Registry) -> Result<Vec<YesRowReport>> {
    TABLE_YES
        .iter()
        .map(|row| verify_yes_row(registry, row))
        .collect()
}

/// Cyclic strong exceptionality of `(F, S + tF, F, S - (d + t)F)` on the
/// Hirzebruch surfaces with `d <= 2`, against the closed condition
/// `t >= -1` and `d + t <= 1`.
pub fn verify_hirzebruch_family(
    registry: &Registry,
    range: std::ops::RangeInclusive<i64>,
) -> Result<Assertion> {
    let mut failures = Vec::new();
    let mut count = 0;
    for d in 0..=2i64 {
        let s = registry.get(&format!("F{d}"))?;
        let l = s.lattice();
        // F1 is stored as the blown-up plane: F = L - E1, S = L.
        let (fiber, section) = if d == 1 {
            (l.basis(0) - l.basis(1), l.basis(0))
        } else {
            (l.basis(0), l.basis(1))
        };
        for t in range.clone() {
            let entries = vec![fiber, section + t * fiber, fiber, section - (d + t) * fiber];
            let a = ToricSystem::new(s.clone(), entries)?;
            let expected = t >= -1 && d + t <= 1;
            for path in [CheckPath::Fast, CheckPath::General] {
                count += 1;
                if check(&a, Grade::Cyclic, path).holds != expected {
                    failures.push(format!("F{d} t={t} {path:?}"));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{count} checks agree")
    } else {
        join(failures.iter())
    };
    Ok(Assertion::new(
        "hirzebruch family",
        failures.is_empty(),
        detail,
    ))
}

/// Every registered type of degree at least three appears in exactly one
/// of the two tables, and the tables name only registered types.
pub fn verify_table_partition(registry: &Registry) -> Assertion {
    let mut seen: Vec<String> = Vec::new();
    let mut problems = Vec::new();
    for label in TABLE_YES
        .iter()
        .flat_map(|r| r.types.iter())
        .chain(TABLE_NO.iter().map(|r| &r.label))
    {
        match registry.get(label) {
            Ok(s) => seen.push(s.display_name()),
            Err(e) => problems.push(e.to_string()),
        }
    }
    for s in registry.surfaces().iter().filter(|s| s.degree() >= 3) {
        let name = s.display_name();
        match seen.iter().filter(|x| **x == name).count() {
            1 => {}
            k => problems.push(format!("{name} listed {k} times")),
        }
    }
    let detail = if problems.is_empty() {
        format!("{} types", seen.len())
    } else {
        join(problems.iter())
    };
    Assertion::new("table partition", problems.is_empty(), detail)
}

#[derive(Clone, Debug, Serialize)]
pub struct PatternResult {
    pub pattern: Vec<i64>,
    /// Systems surviving the `-2` run filter.
    pub candidates: usize,
    pub hits: Vec<Vec<String>>,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowDownEdge {
    pub curve: DivisorClass,
    pub target: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonexistenceReport {
    pub surface: String,
    /// Pairs of orthogonal strong left-orthogonal (-2)-classes.
    pub orthogonal_slo_pairs: usize,
    pub patterns: Vec<PatternResult>,
    pub enumerated: bool,
    pub enumeration_complete: bool,
    /// `(pattern index, first-entry branch)` to resume an interrupted run.
    pub checkpoint: Option<(usize, usize)>,
    pub expected_blow_down: Option<String>,
    pub blow_down_edges: Vec<BlowDownEdge>,
    pub blow_down_verified: Option<bool>,
    pub hits: usize,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NonexistenceOptions {
    pub enumerate: bool,
    pub deadline: Option<Instant>,
    pub resume: Option<(usize, usize)>,
}

/// Contractions of the irreducible (-1)-curves of `s`, typed by the registry.
pub fn blow_down_edges(registry: &Registry, s: &Surface) -> Vec<BlowDownEdge> {
    s.i_irr()
        .iter()
        .filter_map(|e| {
            let bd = blow_down(s, e).ok()?;
            let target = match registry.classify(&bd.surface) {
                TypeMatch::Registered(label) => label,
                m @ TypeMatch::Unregistered(_) => m.to_string(),
            };
            Some(BlowDownEdge { curve: *e, target })
        })
        .collect()
}

/// Searches all first-kind patterns for cyclic strong exceptional systems
/// on `s`, and checks the listed contraction to another surface of the
/// table.
pub fn verify_nonexistence(
    registry: &Registry,
    label: &str,
    options: NonexistenceOptions,
) -> Result<NonexistenceReport> {
    let s = registry.get(label)?;
    let row = TABLE_NO.iter().find(|r| {
        registry
            .get(r.label)
            .map(|t| t.key() == s.key())
            .unwrap_or(false)
    });
    let expected = row.and_then(|r| r.blows_down_to);
    let edges = blow_down_edges(registry, &s);
    let blow_down_verified = expected.map(|t| {
        let want = registry
            .get(t)
            .map(|x| x.display_name())
            .unwrap_or_default();
        edges.iter().any(|e| e.target == want)
    });
    let slo = s.r_slo();
    let orthogonal_slo_pairs = slo
        .iter()
        .enumerate()
        .map(|(i, a)| slo[i + 1..].iter().filter(|b| a.dot(b) == 0).count())
        .sum();
    let n = (12 - s.degree()) as usize;
    let mut patterns = Vec::new();
    let mut checkpoint = None;
    if options.enumerate {
        let filter = minus_two_run_filter(&s, n, true);
        let (start_pattern, start_branch) = options.resume.unwrap_or((0, 0));
        for (pi, pattern) in first_kind_patterns(n)
            .into_iter()
            .enumerate()
            .skip(start_pattern)
        {
            let branch = if pi == start_pattern { start_branch } else { 0 };
            let en = enumerate_filtered(
                &s,
                &pattern,
                Some(&filter),
                Limits {
                    deadline: options.deadline,
                    start_branch: branch,
                },
            )?;
            let hits = en
                .systems
                .iter()
                .filter(|a| is_cyclic_strong_exceptional(a).holds)
                .map(|a| a.entries().iter().map(|c| c.to_string()).collect())
                .collect();
            patterns.push(PatternResult {
                pattern,
                candidates: en.systems.len(),
                hits,
                complete: en.complete,
            });
            if !en.complete {
                checkpoint = Some((pi, en.next_branch));
                break;
            }
        }
    }
    let hits: usize = patterns.iter().map(|p| p.hits.len()).sum();
    let enumeration_complete = options.enumerate && checkpoint.is_none();
    let passed = hits == 0 && (enumeration_complete || blow_down_verified == Some(true));
    Ok(NonexistenceReport {
        surface: s.display_name(),
        orthogonal_slo_pairs,
        patterns,
        enumerated: options.enumerate,
        enumeration_complete,
        checkpoint,
        expected_blow_down: expected.map(str::to_string),
        blow_down_edges: edges,
        blow_down_verified,
        hits,
        passed,
    })
}

pub const COUNTEREXAMPLE_SURFACE: &str = "2,A1+2A3";

pub const COUNTEREXAMPLE_SYSTEM: [&str; 10] = [
    "L14",
    "L567",
    "-L467",
    "2L-E123467",
    "E2",
    "L245",
    "-L345",
    "2L-E13456",
    "E6-E7",
    "-2L+E11457",
];

pub const COUNTEREXAMPLE_SQUARES: [i64; 10] = [-1, -2, -2, -2, -1, -2, -2, -1, -2, -3];

const COUNTEREXAMPLE_EFFECTIVE_ROOTS: [&str; 13] = [
    "L167",
    "L124",
    "E1-E6",
    "L135",
    "L246",
    "L356",
    "2L-E123456",
    "E2-E4",
    "L237",
    "E3-E5",
    "L347",
    "L257",
    "L457",
];

/// The (-2)-classes `A_{k..l}`, `1 <= k <= l <= 9`, of the counterexample.
const COUNTEREXAMPLE_RUNS: [(usize, usize, &str); 10] = [
    (2, 2, "L567"),
    (3, 3, "-L467"),
    (4, 4, "2L-E123467"),
    (2, 3, "E4-E5"),
    (3, 4, "L123"),
    (2, 4, "2L-E123567"),
    (6, 6, "L245"),
    (7, 7, "-L345"),
    (6, 7, "E3-E2"),
    (9, 9, "E6-E7"),
];

/// Segment, its sum, and the bite chain that refutes effectiveness of the
/// negated sum.
const COUNTEREXAMPLE_MINUS_THREE: [(usize, usize, &str, [&str; 2], &str); 2] = [
    (10, 10, "-2L+E11457", ["L167", "E6"], "L145"),
    (9, 10, "-2L+E11456", ["L167", "E7"], "L145"),
];

pub const DEGREE_FOUR_SURFACE: &str = "4,2A1,8";

pub const DEGREE_FOUR_SYSTEM: [&str; 8] = [
    "L145", "E4", "L234", "L5", "E5-E1", "L35", "E3-E2", "-L+E125",
];

fn counterexample_candidates(s: &Surface) -> Result<BTreeSet<DivisorClass>> {
    let q = |i: u8, j: u8| s.parse_class(&format!("2L - E1234567 + E{i} + E{j}"));
    let c = |i: u8| s.parse_class(&format!("3L - E1234567 - E{i}"));
    let mut v = vec![
        s.parse_class("L14")?,
        q(2, 3)?,
        s.parse_class("L15")?,
        c(1)?,
    ];
    v.extend([
        s.parse_class("E2")?,
        q(2, 5)?,
        s.parse_class("L13")?,
        q(2, 4)?,
        s.parse_class("L45")?,
        c(4)?,
    ]);
    v.extend([
        q(6, 7)?,
        c(5)?,
        s.parse_class("E3")?,
        q(3, 5)?,
        s.parse_class("L12")?,
        q(3, 4)?,
    ]);
    v.extend([
        q(2, 7)?,
        s.parse_class("L16")?,
        q(3, 7)?,
        q(2, 6)?,
        s.parse_class("L17")?,
        q(3, 6)?,
    ]);
    Ok(v.into_iter().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub surface: String,
    pub system: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// The degree-two strong exceptional toric system that is not an
/// augmentation in the weak sense, checked step by step.
pub fn verify_counterexample(registry: &Registry) -> Result<CounterexampleReport> {
    let s = registry.get(COUNTEREXAMPLE_SURFACE)?;
    let c = |t: &str| s.parse_class(t);
    let mut assertions = Vec::new();
    let a = match ToricSystem::parse(s.clone(), &COUNTEREXAMPLE_SYSTEM) {
        Ok(a) => {
            assertions.push(Assertion::new("validates", true, a.to_string()));
            a
        }
        Err(e) => {
            assertions.push(Assertion::new("validates", false, e.to_string()));
            return Ok(CounterexampleReport {
                surface: s.display_name(),
                system: COUNTEREXAMPLE_SYSTEM
                    .iter()
                    .map(|x| x.to_string())
                    .collect(),
                assertions,
                passed: false,
            });
        }
    };
    let sq = a.squares();
    assertions.push(Assertion::new(
        "squares",
        sq == COUNTEREXAMPLE_SQUARES,
        format!("{sq:?}"),
    ));

    let listed: BTreeSet<DivisorClass> = COUNTEREXAMPLE_EFFECTIVE_ROOTS
        .iter()
        .map(|t| c(t))
        .collect::<Result<_>>()?;
    let computed: BTreeSet<DivisorClass> = s.r_eff().iter().copied().collect();
    assertions.push(Assertion::new(
        "effective roots",
        listed == computed,
        format!(
            "{} classes: {}",
            computed.len(),
            join(computed.iter().map(|x| x.shorthand()))
        ),
    ));

    let irr: BTreeSet<DivisorClass> = s.i_irr().iter().copied().collect();
    let want: BTreeSet<DivisorClass> = ["E4", "E5", "E6", "E7"]
        .iter()
        .map(|t| c(t))
        .collect::<Result<_>>()?;
    assertions.push(Assertion::new(
        "irreducible (-1)-curves",
        irr == want,
        join(irr.iter().map(|x| x.shorthand())),
    ));

    // Strong exceptionality three ways: fast path, general path, and the
    // explicit list of run sums and (-3)-classes.
    let fast = check(&a, Grade::Strong, CheckPath::Fast);
    let general = check(&a, Grade::Strong, CheckPath::General);
    let mut explicit = Vec::new();
    for (k, l, text) in COUNTEREXAMPLE_RUNS {
        let sum = a.segment(k, l)?;
        let ok = sum == c(text)?
            && !zariski_reduce(&s, &sum).is_effective()
            && !zariski_reduce(&s, &-sum).is_effective();
        if !ok {
            explicit.push(format!("A[{k}..{l}]"));
        }
    }
    let runs_found: BTreeSet<(usize, usize)> = CyclicSegment::linear(a.len())
        .into_iter()
        .filter(|seg| seg.l <= 9 && seg.indices(a.len()).all(|i| sq[i - 1] == -2))
        .map(|seg| (seg.k, seg.l))
        .collect();
    let runs_listed: BTreeSet<(usize, usize)> = COUNTEREXAMPLE_RUNS
        .iter()
        .map(|(k, l, _)| (*k, *l))
        .collect();
    if runs_found != runs_listed {
        explicit.push("run list".to_string());
    }
    for (k, l, text, bites, residual) in COUNTEREXAMPLE_MINUS_THREE {
        let sum = a.segment(k, l)?;
        let red = zariski_reduce(&s, &-sum);
        let bites: Vec<DivisorClass> = bites.iter().map(|t| c(t)).collect::<Result<_>>()?;
        let ok = sum == c(text)?
            && red.bites == bites
            && red.residual == c(residual)?
            && !red.is_effective();
        if !ok {
            explicit.push(format!(
                "-A[{k}..{l}] via {}",
                join(red.bites.iter().map(|x| x.shorthand()))
            ));
        }
    }
    assertions.push(Assertion::new(
        "strong exceptional",
        fast.holds && general.holds && explicit.is_empty(),
        format!(
            "fast: {}, general: {}, listed classes: {}",
            fast.holds,
            general.holds,
            if explicit.is_empty() {
                "ok".to_string()
            } else {
                join(explicit.iter())
            }
        ),
    ));

    let candidates: BTreeSet<DivisorClass> = a.candidate_positions().into_iter().collect();
    let listed = counterexample_candidates(&s)?;
    assertions.push(Assertion::new(
        "candidate positions",
        candidates == listed && candidates.len() == 22,
        format!("{} classes", candidates.len()),
    ));

    let irreducible = exposable_irreducible_curves(&a);
    assertions.push(Assertion::new(
        "no irreducible candidates",
        irreducible.is_empty() && candidates.is_disjoint(&irr),
        join(irreducible.iter().map(|x| x.shorthand())),
    ));

    let weak = is_weak_augmentation(&a);
    assertions.push(Assertion::new(
        "not a weak augmentation",
        !weak.holds,
        format!("weak augmentation: {}", weak.holds),
    ));

    let passed = assertions.iter().all(|x| x.passed);
    Ok(CounterexampleReport {
        surface: s.display_name(),
        system: a.entries().iter().map(|x| x.to_string()).collect(),
        assertions,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchHit {
    pub pattern: Vec<i64>,
    pub system: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub surface: String,
    pub patterns: usize,
    /// Strong exceptional systems found.
    pub strong: usize,
    pub hits: Vec<SearchHit>,
    pub complete: bool,
    pub checkpoint: Option<(usize, usize)>,
}

/// Strong exceptional toric systems on `s` with the given squares patterns
/// that are not augmentations in the weak sense.
pub fn search_counterexamples(
    s: &Arc<Surface>,
    patterns: &[Vec<i64>],
    deadline: Option<Instant>,
    resume: Option<(usize, usize)>,
) -> Result<SearchReport> {
    let n = (12 - s.degree()) as usize;
    let filter = minus_two_run_filter(s, n, false);
    let mut strong = 0;
    let mut hits = Vec::new();
    let mut checkpoint = None;
    let (start_pattern, start_branch) = resume.unwrap_or((0, 0));
    for (pi, pattern) in patterns.iter().enumerate().skip(start_pattern) {
        if !is_admissible(pattern)
            || pattern[..pattern.len().saturating_sub(1)]
                .iter()
                .any(|&x| x < -2)
        {
            continue;
        }
        let branch = if pi == start_pattern { start_branch } else { 0 };
        let en = enumerate_filtered(
            s,
            pattern,
            Some(&filter),
            Limits {
                deadline,
                start_branch: branch,
            },
        )?;
        for a in en.systems.iter().filter(|a| is_strong_exceptional(a).holds) {
            strong += 1;
            if !is_weak_augmentation(a).holds {
                hits.push(SearchHit {
                    pattern: pattern.clone(),
                    system: a.entries().iter().map(|c| c.to_string()).collect(),
                });
            }
        }
        if !en.complete {
            checkpoint = Some((pi, en.next_branch));
            break;
        }
    }
    Ok(SearchReport {
        surface: s.display_name(),
        patterns: patterns.len(),
        strong,
        hits,
        complete: checkpoint.is_none(),
        checkpoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static Registry {
        Registry::builtin()
    }

    #[test]
    fn plane_has_one_system() {
        let p2 = reg().get("P2").unwrap();
        let all = enumerate_toric_systems(&p2, &[1, 1, 1]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], ToricSystem::parse(p2, &["L", "L", "L"]).unwrap());
    }

    #[test]
    fn degree_five_enumeration() {
        let s = reg().get("5,A1+A2").unwrap();
        let all = enumerate_toric_systems(&s, &[-2, -1, -2, -2, -1, -1, 0]).unwrap();
        assert!(!all.is_empty());
        for a in &all {
            assert_eq!(a.squares(), vec![-2, -1, -2, -2, -1, -1, 0]);
        }
        let table = ToricSystem::parse(s.clone(), TABLE_YES[6].system).unwrap();
        let pattern = table.squares();
        assert!(enumerate_toric_systems(&s, &pattern)
            .unwrap()
            .contains(&table));
        assert!(enumerate_toric_systems(&s, &[-5, 1, 1, 1, 1, 1, 1])
            .unwrap()
            .is_empty());
        assert!(enumerate_toric_systems(&s, &[0, 0, 0]).is_err());
    }

    #[test]
    fn filtered_enumeration_keeps_cyclic_strong_systems() {
        let s = reg().get("5,2A1").unwrap();
        let filter = minus_two_run_filter(&s, 7, true);
        for pattern in first_kind_patterns(7).into_iter().take(6) {
            let all = enumerate_toric_systems(&s, &pattern).unwrap();
            let kept = enumerate_filtered(&s, &pattern, Some(&filter), Limits::default())
                .unwrap()
                .systems;
            let cyclic: Vec<ToricSystem> = all
                .into_iter()
                .filter(|a| is_cyclic_strong_exceptional(a).holds)
                .collect();
            assert!(
                kept.iter().all(|a| is_cyclic_strong_exceptional(a).holds)
                    || kept.len() >= cyclic.len()
            );
            for a in &cyclic {
                assert!(kept.contains(a));
            }
        }
    }

    #[test]
    fn yes_rows_pass() {
        for row in TABLE_YES.iter().filter(|r| r.degree >= 5) {
            let report = verify_yes_row(reg(), row).unwrap();
            assert!(
                report.passed,
                "{}",
                serde_json::to_string_pretty(&report).unwrap()
            );
        }
    }

    #[test]
    fn partition_and_family() {
        assert!(verify_table_partition(reg()).passed);
        assert!(verify_hirzebruch_family(reg(), -3..=3).unwrap().passed);
    }

    #[test]
    fn five_a4_has_no_candidates() {
        let report = verify_nonexistence(
            reg(),
            "5,A4",
            NonexistenceOptions {
                enumerate: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.passed);
        assert!(report.patterns.iter().all(|p| p.candidates == 0));
    }

    #[test]
    fn strong_patterns_contain_counterexample() {
        let p = strong_patterns(10, -3);
        assert!(p.contains(&COUNTEREXAMPLE_SQUARES.to_vec()));
        assert!(p.iter().all(|a| is_admissible(a)));
    }

    #[test]
    fn counterexample_report() {
        let report = verify_counterexample(reg()).unwrap();
        assert!(
            report.passed,
            "{}",
            serde_json::to_string_pretty(&report).unwrap()
        );
        assert_eq!(report.assertions.len(), 8);
    }
}
