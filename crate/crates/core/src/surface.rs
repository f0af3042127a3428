//! Weak del Pezzo surface types: a Picard lattice together with the classes
//! of the irreducible (-2)-curves. Everything else (effective and strong
//! left-orthogonal (-2)-classes, irreducible (-1)-curves) is derived.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::classes::{minus_one_classes, minus_two_classes, reflect};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, LatticeMap, PicardLattice};

/// ADE type of a simple-root system, as sorted `(letter, rank)` components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dynkin(pub Vec<(char, usize)>);

impl Dynkin {
    /// Classifies the incidence graph of `roots` (edges where the product is 1).
    pub fn of_roots(roots: &[DivisorClass]) -> Result<Dynkin> {
        let n = roots.len();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && roots[i].dot(&roots[j]) == 1)
                    .collect()
            })
            .collect();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                for &j in &adj[comp[i]] {
                    if !seen[j] {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                i += 1;
            }
            comps.push(classify_component(&comp, &adj).ok_or_else(|| {
                let names: Vec<String> = comp.iter().map(|&i| roots[i].to_string()).collect();
                Error::InvalidSurface(format!(
                    "roots {{{}}} do not form an ADE diagram",
                    names.join(", ")
                ))
            })?);
        }
        comps.sort();
        Ok(Dynkin(comps))
    }

    pub fn rank(&self) -> usize {
        self.0.iter().map(|c| c.1).sum()
    }

    pub fn positive_root_count(&self) -> usize {
        self.0
            .iter()
            .map(|&(t, n)| match (t, n) {
                ('A', n) => n * (n + 1) / 2,
                ('D', n) => n * (n - 1),
                ('E', 6) => 36,
                ('E', 7) => 63,
                ('E', 8) => 120,
                _ => unreachable!("not an ADE component"),
            })
            .sum()
    }
}

fn classify_component(comp: &[usize], adj: &[Vec<usize>]) -> Option<(char, usize)> {
    let k = comp.len();
    let edges: usize = comp.iter().map(|&i| adj[i].len()).sum::<usize>() / 2;
    if edges + 1 != k {
        return None;
    }
    let branch: Vec<usize> = comp
        .iter()
        .copied()
        .filter(|&i| adj[i].len() >= 3)
        .collect();
    match branch.as_slice() {
        [] => Some(('A', k)),
        [c] if adj[*c].len() == 3 => {
            let mut arms: Vec<usize> = adj[*c]
                .iter()
                .map(|&start| {
                    let (mut prev, mut cur, mut len) = (*c, start, 1);
                    while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            arms.sort();
            match (arms[0], arms[1], arms[2]) {
                (1, 1, r) => Some(('D', r + 3)),
                (1, 2, 2) => Some(('E', 6)),
                (1, 2, 3) => Some(('E', 7)),
                (1, 2, 4) => Some(('E', 8)),
                _ => None,
            }
        }
        _ => None,
    }
}

/// `∅`, `A1`, `2A1+A3`, `D4`, ...
impl fmt::Display for Dynkin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let (t, n) = self.0[i];
            let mult = j - i;
            parts.push(if mult == 1 {
                format!("{t}{n}")
            } else {
                format!("{mult}{t}{n}")
            });
            i = j;
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// Type invariants: degree, Dynkin type of the (-2)-curves and the number of
/// irreducible (-1)-curves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TypeInvariants {
    pub degree: i64,
    pub configuration: String,
    pub lines: usize,
}

impl fmt::Display for TypeInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.degree, self.configuration, self.lines)
    }
}

#[derive(Clone, Debug)]
pub struct Surface {
    name: Option<String>,
    lattice: PicardLattice,
    r_irr: Vec<DivisorClass>,
    r_eff: Vec<DivisorClass>,
    r_slo: Vec<DivisorClass>,
    i_irr: Vec<DivisorClass>,
    negative_curves: Vec<DivisorClass>,
    two_rho: DivisorClass,
    dynkin: Dynkin,
}

impl Surface {
    /// Validates the simple roots and computes all derived sets.
    pub fn new(
        name: Option<String>,
        lattice: PicardLattice,
        roots: Vec<DivisorClass>,
    ) -> Result<Surface> {
        if lattice.degree() <= 0 {
            return Err(Error::InvalidSurface(format!("{lattice} has K^2 <= 0")));
        }
        let mut r_irr = roots;
        r_irr.sort();
        for r in &r_irr {
            if r.lattice() != lattice {
                return Err(Error::LatticeMismatch(r.lattice(), lattice));
            }
            if r.square() != -2 || r.k_degree() != 0 {
                return Err(Error::InvalidSurface(format!("{r} is not a (-2)-class")));
            }
        }
        for (i, a) in r_irr.iter().enumerate() {
            for b in &r_irr[i + 1..] {
                let p = a.dot(b);
                if a == b || !(p == 0 || p == 1) {
                    return Err(Error::InvalidSurface(format!(
                        "roots {a} and {b} meet with product {p}"
                    )));
                }
            }
        }
        let dynkin = Dynkin::of_roots(&r_irr)?;
        let r_eff = positive_roots(&r_irr);
        let eff_set: HashSet<DivisorClass> = r_eff.iter().flat_map(|r| [*r, -*r]).collect();
        let r_slo: Vec<DivisorClass> = minus_two_classes(lattice)
            .iter()
            .copied()
            .filter(|r| !eff_set.contains(r))
            .collect();
        let i_irr: Vec<DivisorClass> = minus_one_classes(lattice)
            .iter()
            .copied()
            .filter(|e| r_irr.iter().all(|c| e.dot(c) >= 0))
            .collect();
        let mut negative_curves: Vec<DivisorClass> = i_irr.iter().rev().copied().collect();
        negative_curves.extend(r_irr.iter().rev().copied());
        let two_rho = r_eff
            .iter()
            .copied()
            .fold(DivisorClass::zero(lattice), |a, b| a + b);
        Ok(Surface {
            name,
            lattice,
            r_irr,
            r_eff,
            r_slo,
            i_irr,
            negative_curves,
            two_rho,
            dynkin,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The registry label if known, else the computed invariants.
    pub fn display_name(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("unregistered {}", self.invariants()),
        }
    }

    pub fn with_name(mut self, name: Option<String>) -> Surface {
        self.name = name;
        self
    }

    pub fn lattice(&self) -> PicardLattice {
        self.lattice
    }

    pub fn degree(&self) -> i64 {
        self.lattice.degree()
    }

    pub fn canonical(&self) -> DivisorClass {
        self.lattice.canonical()
    }

    /// Simple roots, sorted.
    pub fn r_irr(&self) -> &[DivisorClass] {
        &self.r_irr
    }

    /// Positive roots (effective (-2)-classes), sorted.
    pub fn r_eff(&self) -> &[DivisorClass] {
        &self.r_eff
    }

    /// (-2)-classes that are neither effective nor anti-effective, sorted.
    pub fn r_slo(&self) -> &[DivisorClass] {
        &self.r_slo
    }

    /// Irreducible (-1)-curves, sorted.
    pub fn i_irr(&self) -> &[DivisorClass] {
        &self.i_irr
    }

    /// All negative curves in bite order: (-1)-curves first, then (-2)-curves,
    /// each group in decreasing coefficient order.
    pub fn negative_curves(&self) -> &[DivisorClass] {
        &self.negative_curves
    }

    /// Sum of the positive roots.
    pub fn two_rho(&self) -> DivisorClass {
        self.two_rho
    }

    pub fn dynkin(&self) -> &Dynkin {
        &self.dynkin
    }

    pub fn invariants(&self) -> TypeInvariants {
        TypeInvariants {
            degree: self.degree(),
            configuration: self.dynkin.to_string(),
            lines: self.i_irr.len(),
        }
    }

    /// Identity of the type data, independent of the name.
    pub fn key(&self) -> (PicardLattice, Vec<DivisorClass>) {
        (self.lattice, self.r_irr.clone())
    }

    pub fn is_irreducible_minus_one(&self, d: &DivisorClass) -> bool {
        self.i_irr.binary_search(d).is_ok()
    }

    pub fn is_effective_root(&self, d: &DivisorClass) -> bool {
        self.r_eff.binary_search(d).is_ok()
    }

    pub fn parse_class(&self, text: &str) -> Result<DivisorClass> {
        DivisorClass::parse(self.lattice, text)
    }
}

/// Closure of the simple roots under adding simple roots while staying a root.
fn positive_roots(simple: &[DivisorClass]) -> Vec<DivisorClass> {
    let mut set: HashSet<DivisorClass> = simple.iter().copied().collect();
    let mut queue: VecDeque<DivisorClass> = simple.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for a in simple {
            let y = x + *a;
            if y.square() == -2 && set.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<DivisorClass> = set.into_iter().collect();
    out.sort();
    out
}

pub fn effective_minus_two_classes(s: &Surface) -> &[DivisorClass] {
    s.r_eff()
}

pub fn slo_minus_two_classes(s: &Surface) -> &[DivisorClass] {
    s.r_slo()
}

pub fn irreducible_minus_one_classes(s: &Surface) -> &[DivisorClass] {
    s.i_irr()
}

/// Result of contracting an irreducible (-1)-curve.
#[derive(Clone, Debug)]
pub struct BlowDown {
    /// The contracted curve, on the original lattice.
    pub exceptional: DivisorClass,
    pub surface: Surface,
    /// Pull-back from the contracted surface; its image is `E`-perp and it
    /// sends the canonical class to `K - E`.
    pub pullback: LatticeMap,
}

impl BlowDown {
    /// Coordinates on the contracted surface of a class orthogonal to `E`.
    pub fn project(&self, c: &DivisorClass) -> Result<DivisorClass> {
        if c.lattice() != self.pullback.target {
            return Err(Error::LatticeMismatch(c.lattice(), self.pullback.target));
        }
        if c.dot(&self.exceptional) != 0 {
            return Err(Error::InvalidToricSystem(format!(
                "{c} meets the contracted curve {}",
                self.exceptional
            )));
        }
        let pairings: Vec<i64> = self.pullback.columns.iter().map(|b| c.dot(b)).collect();
        Ok(self.pullback.source.coords_from_pairings(&pairings))
    }
}

/// Simple reflections generating the Weyl group of the whole lattice.
fn weyl_generators(lattice: PicardLattice) -> Vec<DivisorClass> {
    let mut gens = Vec::new();
    if let PicardLattice::Blowup(n) = lattice {
        let n = n as usize;
        for i in 1..n {
            gens.push(lattice.exceptional(i).unwrap() - lattice.exceptional(i + 1).unwrap());
        }
        if n >= 3 {
            gens.push(DivisorClass::parse(lattice, "L123").unwrap());
        }
    }
    gens
}

/// Shortest word of generator reflections taking `from` to `to`, found by BFS.
fn conjugating_word(
    from: DivisorClass,
    to: DivisorClass,
    gens: &[DivisorClass],
) -> Option<Vec<DivisorClass>> {
    let mut parent: HashMap<DivisorClass, (DivisorClass, DivisorClass)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashSet::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut word = Vec::new();
            let mut cur = x;
            while cur != from {
                let (prev, g) = parent[&cur];
                word.push(g);
                cur = prev;
            }
            word.reverse();
            return Some(word);
        }
        for g in gens {
            let y = reflect(&x, g).expect("generator is a root");
            if seen.insert(y) {
                parent.insert(y, (x, *g));
                queue.push_back(y);
            }
        }
    }
    None
}

/// Contracts the irreducible (-1)-curve `e`.
pub fn blow_down(s: &Surface, e: &DivisorClass) -> Result<BlowDown> {
    if !s.is_irreducible_minus_one(e) {
        return Err(Error::NotIrreducibleCurve(e.to_string()));
    }
    let up = s.lattice();
    let (down, columns) = match up {
        PicardLattice::Blowup(n) => {
            let n = n as usize;
            let last = up.exceptional(n)?;
            match conjugating_word(*e, last, &weyl_generators(up)) {
                Some(word) => {
                    // w = s_k .. s_1 maps e to E_n; the pull-back is w^-1 on the standard sub-basis.
                    let inverse = |mut x: DivisorClass| {
                        for g in word.iter().rev() {
                            x = reflect(&x, g).expect("generator is a root");
                        }
                        x
                    };
                    let down = PicardLattice::blowup(n - 1)?;
                    (down, (0..n).map(|i| inverse(up.basis(i))).collect())
                }
                None if n == 2 => {
                    // e = L - E1 - E2: the contraction is P1 x P1 with rulings L - E1, L - E2.
                    let f = DivisorClass::parse(up, "L - E1")?;
                    let g = DivisorClass::parse(up, "L - E2")?;
                    (PicardLattice::hirzebruch(0), vec![f, g])
                }
                None => {
                    return Err(Error::UnsupportedLattice(format!(
                        "cannot move {e} to E{n} on {up}"
                    )))
                }
            }
        }
        PicardLattice::Hirzebruch { d, blowups } if blowups > 0 => {
            let k = blowups as usize;
            let i = (1..=k)
                .find(|&i| up.exceptional(i).ok() == Some(*e))
                .ok_or_else(|| {
                    Error::UnsupportedLattice(format!("only E_i can be contracted on {up}"))
                })?;
            let swap = |x: DivisorClass| {
                if i == k {
                    x
                } else {
                    let r = up.exceptional(i).unwrap() - up.exceptional(k).unwrap();
                    reflect(&x, &r).unwrap()
                }
            };
            let down = PicardLattice::hirzebruch_blowup(d, k - 1)?;
            (down, (0..down.rank()).map(|j| swap(up.basis(j))).collect())
        }
        _ => return Err(Error::NotIrreducibleCurve(e.to_string())),
    };
    let pullback = LatticeMap::new(down, up, columns)?;
    debug_assert!(pullback.preserves_form());
    debug_assert_eq!(pullback.apply(&down.canonical())?, up.canonical() - *e);
    let mut bd = BlowDown {
        exceptional: *e,
        surface: Surface::new(None, down, Vec::new())?,
        pullback,
    };
    let roots = s
        .r_irr()
        .iter()
        .filter(|c| c.dot(e) == 0)
        .map(|c| bd.project(c))
        .collect::<Result<Vec<_>>>()?;
    bd.surface = Surface::new(None, down, roots)?;
    Ok(bd)
}

/// Outcome of matching a surface against the registry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeMatch {
    Registered(String),
    Unregistered(TypeInvariants),
}

impl fmt::Display for TypeMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeMatch::Registered(l) => write!(f, "{l}"),
            TypeMatch::Unregistered(inv) => write!(f, "unregistered ({inv})"),
        }
    }
}

/// Matches against the built-in registry.
pub fn classify_type(s: &Surface) -> TypeMatch {
    Registry::builtin().classify(s)
}

#[derive(Deserialize)]
struct RegistryFile {
    #[serde(default)]
    surface: Vec<RegistryEntry>,
}

#[derive(Deserialize)]
struct RegistryEntry {
    label: String,
    lattice: String,
    #[serde(default)]
    roots: Vec<String>,
    lines: Option<usize>,
}

/// An immutable set of named surface types.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    surfaces: Vec<Arc<Surface>>,
    by_label: BTreeMap<String, usize>,
    by_invariants: HashMap<TypeInvariants, usize>,
}

const BUILTIN: &str = include_str!("../data/registry.toml");

fn normalize_configuration(c: &str) -> String {
    match c {
        "" | "0" | "∅" | "empty" | "dP" => "∅".to_string(),
        other => other.to_string(),
    }
}

/// Canonical spelling of a label: whitespace removed, empty configurations as `∅`.
pub fn normalize_label(label: &str) -> String {
    let compact: String = label
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    let upper = compact.to_ascii_uppercase();
    if matches!(upper.as_str(), "P2" | "F0" | "F1" | "F2") {
        return upper;
    }
    let mut parts: Vec<String> = compact.split(',').map(str::to_string).collect();
    if parts.len() >= 2 {
        parts[1] = normalize_configuration(&parts[1]);
    } else if parts.len() == 1
        && parts[0].chars().all(|c| c.is_ascii_digit())
        && !parts[0].is_empty()
    {
        parts.push("∅".to_string());
    }
    parts.join(",")
}

impl Registry {
    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::from_toml_str(BUILTIN).expect("built-in registry is valid"))
    }

    pub fn from_toml_str(text: &str) -> Result<Registry> {
        let file: RegistryFile =
            toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        let mut reg = Registry::default();
        for entry in file.surface {
            reg.insert_entry(entry)?;
        }
        Ok(reg)
    }

    /// Loads every `*.toml` file of a directory, in file-name order.
    pub fn load_dir(dir: &Path) -> Result<Registry> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::Registry(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        let mut reg = Registry::default();
        for p in paths {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| Error::Registry(format!("{}: {e}", p.display())))?;
            let file: RegistryFile = toml::from_str(&text)
                .map_err(|e| Error::Registry(format!("{}: {e}", p.display())))?;
            for entry in file.surface {
                reg.insert_entry(entry)?;
            }
        }
        Ok(reg)
    }

    fn insert_entry(&mut self, entry: RegistryEntry) -> Result<()> {
        let label = normalize_label(&entry.label);
        let lattice: PicardLattice = entry.lattice.parse()?;
        let roots = entry
            .roots
            .iter()
            .map(|r| DivisorClass::parse(lattice, r))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Registry(format!("{label}: {e}")))?;
        let s = Surface::new(Some(label.clone()), lattice, roots)
            .map_err(|e| Error::Registry(format!("{label}: {e}")))?;
        let inv = s.invariants();
        if let Some(expected) = entry.lines {
            if expected != inv.lines {
                return Err(Error::Registry(format!(
                    "{label}: expected {expected} irreducible (-1)-curves, found {}",
                    inv.lines
                )));
            }
        }
        let parts: Vec<&str> = label.split(',').collect();
        if parts.len() >= 2 {
            let degree_ok = parts[0].parse::<i64>().ok() == Some(inv.degree);
            let lines_ok = parts
                .get(2)
                .is_none_or(|m| m.parse::<usize>().ok() == Some(inv.lines));
            if !degree_ok || parts[1] != inv.configuration || !lines_ok {
                return Err(Error::Registry(format!(
                    "{label}: data has invariants {inv}"
                )));
            }
        }
        if self.by_label.contains_key(&label) {
            return Err(Error::Registry(format!("duplicate label {label}")));
        }
        if let Some(&other) = self.by_invariants.get(&inv) {
            return Err(Error::Registry(format!(
                "{label} and {} share invariants {inv}",
                self.surfaces[other].display_name()
            )));
        }
        let idx = self.surfaces.len();
        self.by_label.insert(label, idx);
        self.by_invariants.insert(inv, idx);
        self.surfaces.push(Arc::new(s));
        Ok(())
    }

    pub fn surfaces(&self) -> &[Arc<Surface>] {
        &self.surfaces
    }

    /// Looks up a label such as `4,2A1,8`, `5,A4`, `3,∅` (or `3,0`), `F1`.
    /// A label without the line count resolves if it is unambiguous.
    pub fn get(&self, label: &str) -> Result<Arc<Surface>> {
        let key = normalize_label(label);
        if let Some(&i) = self.by_label.get(&key) {
            return Ok(self.surfaces[i].clone());
        }
        let prefix = format!("{key},");
        let matches: Vec<&String> = self
            .by_label
            .keys()
            .filter(|k| k.starts_with(&prefix))
            .collect();
        match matches.as_slice() {
            [one] => Ok(self.surfaces[self.by_label[*one]].clone()),
            [] => Err(Error::UnknownSurface(label.to_string())),
            many => Err(Error::UnknownSurface(format!(
                "{label} (ambiguous: {})",
                many.iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }

    pub fn classify(&self, s: &Surface) -> TypeMatch {
        let inv = s.invariants();
        match self.by_invariants.get(&inv) {
            Some(&i) => {
                TypeMatch::Registered(self.surfaces[i].name().unwrap_or_default().to_string())
            }
            None => TypeMatch::Unregistered(inv),
        }
    }

    /// Registered copy of `s` (if its type is known), carrying the registry name.
    pub fn named(&self, s: Surface) -> Surface {
        match self.classify(&s) {
            TypeMatch::Registered(l) => s.with_name(Some(l)),
            TypeMatch::Unregistered(_) => s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static Registry {
        Registry::builtin()
    }

    fn classes(s: &Surface, items: &[&str]) -> Vec<DivisorClass> {
        let mut v: Vec<DivisorClass> = items.iter().map(|t| s.parse_class(t).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn registry_loads_every_type() {
        let r = reg();
        assert_eq!(r.surfaces().len(), 57);
        for (d, count) in [(7, 2), (6, 6), (5, 7), (4, 16), (3, 21)] {
            assert_eq!(
                r.surfaces().iter().filter(|s| s.degree() == d).count(),
                count,
                "degree {d}"
            );
        }
    }

    #[test]
    fn effective_roots_examples() {
        let s = reg().get("5,A1+A2").unwrap();
        assert_eq!(
            s.r_eff(),
            classes(&s, &["L123", "E1-E2", "E2-E3", "E1-E3"]).as_slice()
        );
        let s = reg().get("2,A1+2A3").unwrap();
        let expected = classes(
            &s,
            &[
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
            ],
        );
        assert_eq!(s.r_eff(), expected.as_slice());
        assert!(reg().get("4,∅").unwrap().r_eff().is_empty());
    }

    #[test]
    fn slo_roots_examples() {
        let s = reg().get("5,A3").unwrap();
        let mut exp = classes(
            &s,
            &[
                "L123", "L124", "L134", "L234", "-L123", "-L124", "-L134", "-L234",
            ],
        );
        exp.sort();
        assert_eq!(s.r_slo(), exp.as_slice());
        assert!(reg().get("5,A4").unwrap().r_slo().is_empty());
        assert_eq!(reg().get("3,∅").unwrap().r_slo().len(), 72);
    }

    #[test]
    fn irreducible_minus_one_examples() {
        let s = reg().get("4,2A1,8").unwrap();
        assert_eq!(
            s.i_irr(),
            classes(&s, &["E1", "E2", "E3", "E5", "L14", "L24", "L34", "L45"]).as_slice()
        );
        let s = reg().get("2,A1+2A3").unwrap();
        assert_eq!(s.i_irr(), classes(&s, &["E4", "E5", "E6", "E7"]).as_slice());
        assert_eq!(reg().get("6,0").unwrap().i_irr().len(), 6);
    }

    #[test]
    fn positive_root_counts_match_dynkin_types() {
        for s in reg().surfaces() {
            assert_eq!(
                s.r_eff().len(),
                s.dynkin().positive_root_count(),
                "{}",
                s.display_name()
            );
        }
        for (label, n) in [("5,A1+A2", 4), ("5,A3", 6), ("4,D4", 12), ("3,E6", 36)] {
            assert_eq!(reg().get(label).unwrap().r_eff().len(), n);
        }
    }

    #[test]
    fn root_partition() {
        for s in reg().surfaces() {
            let all = minus_two_classes(s.lattice());
            let mut union: Vec<DivisorClass> = s.r_eff().to_vec();
            union.extend(s.r_eff().iter().map(|r| -*r));
            union.extend(s.r_slo().iter().copied());
            union.sort();
            let before = union.len();
            union.dedup();
            assert_eq!(before, union.len(), "overlap on {}", s.display_name());
            assert_eq!(union, *all, "{}", s.display_name());
            for r in s.i_irr() {
                assert!(minus_one_classes(s.lattice()).contains(r));
            }
        }
    }

    #[test]
    fn blow_down_examples() {
        let s = reg().get("2,A1+2A3").unwrap();
        let e4 = s.parse_class("E4").unwrap();
        let bd = blow_down(&s, &e4).unwrap();
        assert_eq!(bd.surface.degree(), 3);
        assert_eq!(bd.surface.r_irr().len(), 5);
        assert_eq!(bd.surface.dynkin().to_string(), "A1+2A2");
        assert_eq!(
            classify_type(&bd.surface),
            TypeMatch::Registered("3,A1+2A2".into())
        );
        let kept = classes(&s, &["L167", "E1-E6", "L135", "L237", "E3-E5"]);
        let pulled: Vec<DivisorClass> = bd
            .surface
            .r_irr()
            .iter()
            .map(|c| bd.pullback.apply(c).unwrap())
            .collect();
        let mut pulled_sorted = pulled.clone();
        pulled_sorted.sort();
        assert_eq!(pulled_sorted, kept);

        let dp = reg().get("5,∅").unwrap();
        for e in dp.i_irr() {
            let bd = blow_down(&dp, e).unwrap();
            assert!(bd.surface.r_irr().is_empty());
            assert_eq!(bd.surface.degree(), 6);
        }
        assert!(blow_down(&s, &s.parse_class("L124").unwrap()).is_err());
    }

    #[test]
    fn every_blow_down_is_a_registered_type() {
        for s in reg().surfaces() {
            for e in s.i_irr() {
                let bd = blow_down(s, e).unwrap();
                assert!(bd.pullback.preserves_form());
                assert_eq!(
                    bd.pullback.apply(&bd.surface.canonical()).unwrap(),
                    s.canonical() - *e
                );
                assert_eq!(bd.surface.degree(), s.degree() + 1);
                assert!(
                    matches!(classify_type(&bd.surface), TypeMatch::Registered(_)),
                    "{} / {e} -> {}",
                    s.display_name(),
                    bd.surface.invariants()
                );
            }
        }
    }

    #[test]
    fn classify_examples() {
        let a = reg().get("4,A3,5").unwrap();
        let b = reg().get("4,A3,4").unwrap();
        assert_ne!(a.invariants(), b.invariants());
        assert_eq!(a.i_irr().len(), 5);
        assert_eq!(
            classify_type(&reg().get("5,0").unwrap()),
            TypeMatch::Registered("5,∅".into())
        );
        assert!(reg().get("6,A1").is_err());
        assert_eq!(reg().get("f2").unwrap().name(), Some("F2"));
    }

    #[test]
    fn dynkin_labels() {
        let r = reg();
        assert_eq!(r.get("3,E6").unwrap().dynkin().to_string(), "E6");
        assert_eq!(r.get("4,2A1+A3").unwrap().dynkin().to_string(), "2A1+A3");
        assert_eq!(r.get("3,0").unwrap().dynkin().to_string(), "∅");
    }

    #[test]
    fn invalid_surfaces_are_rejected() {
        let l = PicardLattice::blowup(3).unwrap();
        let p = |s: &str| DivisorClass::parse(l, s).unwrap();
        assert!(Surface::new(None, l, vec![p("E1")]).is_err());
        assert!(Surface::new(None, l, vec![p("E1-E2"), p("E2-E1")]).is_err());
        assert!(Surface::new(None, l, vec![p("E1-E2"), p("E2-E3"), p("E3-E1")]).is_err());
    }
}
