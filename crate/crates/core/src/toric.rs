//! Toric systems: cyclic sequences `A_1, .., A_n` of classes with
//! `A_i.A_{i+1} = 1`, all other products between distinct entries zero and
//! `A_1 + .. + A_n = -K`. Indices are 1-based and cyclic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::surface::{blow_down, BlowDown, Registry, Surface};

#[derive(Clone, Debug)]
pub struct ToricSystem {
    surface: Arc<Surface>,
    entries: Vec<DivisorClass>,
}

impl PartialEq for ToricSystem {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.surface.key() == other.surface.key()
    }
}

impl Eq for ToricSystem {}

/// A cyclic segment `[k..l]`: `k, k+1, .., l` read cyclically, never the full circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclicSegment {
    pub k: usize,
    pub l: usize,
}

impl CyclicSegment {
    pub fn new(k: usize, l: usize, n: usize) -> Result<Self> {
        if k == 0 || l == 0 || k > n || l > n || k == l % n + 1 {
            return Err(Error::InvalidSegment(k, l, n));
        }
        Ok(CyclicSegment { k, l })
    }

    /// Number of indices in the segment.
    pub fn len(&self, n: usize) -> usize {
        if self.k <= self.l {
            self.l - self.k + 1
        } else {
            n - self.k + 1 + self.l
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self, n: usize) -> impl Iterator<Item = usize> {
        let k = self.k;
        (0..self.len(n)).map(move |t| (k - 1 + t) % n + 1)
    }

    pub fn contains(&self, i: usize, n: usize) -> bool {
        self.indices(n).any(|j| j == i)
    }

    /// All cyclic segments, ordered by `(k, l)`.
    pub fn all(n: usize) -> Vec<CyclicSegment> {
        let mut out = Vec::new();
        for k in 1..=n {
            for l in 1..=n {
                if let Ok(s) = CyclicSegment::new(k, l, n) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Segments `[k..l]` with `1 <= k <= l <= n - 1`.
    pub fn linear(n: usize) -> Vec<CyclicSegment> {
        let mut out = Vec::new();
        for k in 1..n {
            for l in k..n {
                out.push(CyclicSegment { k, l });
            }
        }
        out
    }
}

impl fmt::Display for CyclicSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.k, self.l)
    }
}

/// Index arithmetic modulo `n` on `1..=n`.
pub fn cyclic(i: isize, n: usize) -> usize {
    (i - 1).rem_euclid(n as isize) as usize + 1
}

/// A sequence of perms and a shift that moves a segment sum into one entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exposure {
    pub segment: CyclicSegment,
    /// The system is first shifted `shift` times.
    pub shift: usize,
    /// Then `perm_k` is applied for each `k` in order.
    pub perms: Vec<usize>,
    /// Position of the exposed segment sum afterwards.
    pub position: usize,
}

impl ToricSystem {
    /// Checks length, adjacency products, orthogonality and the sum.
    pub fn new(surface: Arc<Surface>, entries: Vec<DivisorClass>) -> Result<ToricSystem> {
        let n = entries.len();
        let expected = (12 - surface.degree()) as usize;
        if n != expected {
            return Err(Error::InvalidToricSystem(format!(
                "length {n}, expected {expected} on a surface of degree {}",
                surface.degree()
            )));
        }
        for e in &entries {
            if e.lattice() != surface.lattice() {
                return Err(Error::LatticeMismatch(e.lattice(), surface.lattice()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let want = if j == i + 1 || (i == 0 && j == n - 1) {
                    1
                } else {
                    0
                };
                let got = entries[i].dot(&entries[j]);
                if got != want {
                    return Err(Error::InvalidToricSystem(format!(
                        "A{}.A{} = {got}, expected {want}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let sum: DivisorClass = entries.iter().copied().sum();
        let anti = -surface.canonical();
        if sum != anti {
            return Err(Error::InvalidToricSystem(format!(
                "sum is {sum}, expected -K = {anti}"
            )));
        }
        Ok(ToricSystem { surface, entries })
    }

    /// Parses class expressions (or vectors) over the surface lattice.
    pub fn parse(surface: Arc<Surface>, entries: &[&str]) -> Result<ToricSystem> {
        let classes = entries
            .iter()
            .map(|t| surface.parse_class(t))
            .collect::<Result<Vec<_>>>()?;
        ToricSystem::new(surface, classes)
    }

    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn lattice(&self) -> crate::lattice::PicardLattice {
        self.surface.lattice()
    }

    pub fn entries(&self) -> &[DivisorClass] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `A_i`, 1-based and cyclic.
    pub fn entry(&self, i: usize) -> DivisorClass {
        self.entries[cyclic(i as isize, self.len()) - 1]
    }

    pub fn squares(&self) -> Vec<i64> {
        self.entries.iter().map(|a| a.square()).collect()
    }

    pub fn segment_sum(&self, seg: CyclicSegment) -> DivisorClass {
        seg.indices(self.len()).map(|i| self.entry(i)).sum()
    }

    /// `A_{k..l}` with validation of the segment.
    pub fn segment(&self, k: usize, l: usize) -> Result<DivisorClass> {
        Ok(self.segment_sum(CyclicSegment::new(k, l, self.len())?))
    }

    /// `(A_2, .., A_n, A_1)`.
    pub fn shift(&self) -> ToricSystem {
        self.shift_by(1)
    }

    pub fn shift_by(&self, t: usize) -> ToricSystem {
        let mut entries = self.entries.clone();
        entries.rotate_left(t % self.len());
        ToricSystem {
            surface: self.surface.clone(),
            entries,
        }
    }

    /// The transposition `perm_k`, defined when `A_k^2 = -2`.
    pub fn perm(&self, k: usize) -> Result<ToricSystem> {
        let n = self.len();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange(k, n));
        }
        let a = self.entry(k);
        if a.square() != -2 {
            return Err(Error::NotTransposable(k, a.square()));
        }
        let mut e = self.entries.clone();
        let prev = cyclic(k as isize - 1, n) - 1;
        let next = cyclic(k as isize + 1, n) - 1;
        // Both cyclic neighbours absorb A_k and A_k changes sign; this is the
        // same formula for k = 1 and k = n.
        e[prev] += a;
        e[next] += a;
        e[k - 1] = -a;
        Ok(ToricSystem {
            surface: self.surface.clone(),
            entries: e,
        })
    }

    /// Elementary augmentation: `target` contracts `e` onto this system's
    /// surface; `E` is inserted at slot `m` (1..=n+1) and subtracted from its
    /// two cyclic neighbours.
    pub fn augment_lattice(
        &self,
        m: usize,
        target: &Arc<Surface>,
        e: &DivisorClass,
    ) -> Result<ToricSystem> {
        let n = self.len();
        if m == 0 || m > n + 1 {
            return Err(Error::IndexOutOfRange(m, n + 1));
        }
        let bd = blow_down(target, e)?;
        if bd.surface.key() != self.surface.key() {
            return Err(Error::InvalidToricSystem(format!(
                "contracting {e} on {} does not give the surface of the system",
                target.display_name()
            )));
        }
        let mut entries = self
            .entries
            .iter()
            .map(|a| bd.pullback.apply(a))
            .collect::<Result<Vec<_>>>()?;
        entries.insert(m - 1, *e);
        let len = n + 1;
        let prev = cyclic(m as isize - 1, len) - 1;
        let next = cyclic(m as isize + 1, len) - 1;
        entries[prev] -= *e;
        entries[next] -= *e;
        ToricSystem::new(target.clone(), entries)
    }

    /// Inverse of [`augment_lattice`](Self::augment_lattice): contracts the
    /// irreducible (-1)-curve `A_m`. The contracted surface is named from
    /// `registry` when its type is registered.
    pub fn blow_down_toric(
        &self,
        m: usize,
        registry: &Registry,
    ) -> Result<(ToricSystem, BlowDown)> {
        let n = self.len();
        if m == 0 || m > n {
            return Err(Error::IndexOutOfRange(m, n));
        }
        let e = self.entry(m);
        if e.square() != -1 || e.k_degree() != -1 {
            return Err(Error::NotIrreducibleCurve(format!(
                "A{m} = {e} is not a (-1)-class"
            )));
        }
        let mut bd = blow_down(&self.surface, &e)?;
        bd.surface = registry.named(bd.surface.clone());
        let mut entries = self.entries.clone();
        let prev = cyclic(m as isize - 1, n) - 1;
        let next = cyclic(m as isize + 1, n) - 1;
        entries[prev] += e;
        entries[next] += e;
        entries.remove(m - 1);
        let projected = entries
            .iter()
            .map(|a| bd.project(a))
            .collect::<Result<Vec<_>>>()?;
        let sys = ToricSystem::new(Arc::new(bd.surface.clone()), projected)?;
        Ok((sys, bd))
    }

    /// Segments whose squares are one `-1` and otherwise `-2`, with their sums.
    pub fn exposable_segments(&self) -> Vec<(CyclicSegment, DivisorClass)> {
        let n = self.len();
        let sq = self.squares();
        CyclicSegment::all(n)
            .into_iter()
            .filter(|seg| {
                let mut ones = 0;
                for i in seg.indices(n) {
                    match sq[i - 1] {
                        -1 => ones += 1,
                        -2 => {}
                        _ => return false,
                    }
                }
                ones == 1
            })
            .map(|seg| (seg, self.segment_sum(seg)))
            .collect()
    }

    /// The set `I(X, A)`, sorted and without repetitions.
    pub fn candidate_positions(&self) -> Vec<DivisorClass> {
        let mut v: Vec<DivisorClass> = self
            .exposable_segments()
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Shift and perms that turn the exposable segment `seg` into an entry.
    pub fn exposure(&self, seg: CyclicSegment) -> Result<Exposure> {
        let n = self.len();
        let sq = self.squares();
        let ones: Vec<usize> = seg.indices(n).filter(|&i| sq[i - 1] == -1).collect();
        let ok = ones.len() == 1 && seg.indices(n).all(|i| sq[i - 1] == -1 || sq[i - 1] == -2);
        if !ok {
            return Err(Error::InvalidToricSystem(format!(
                "segment {seg} is not exposable"
            )));
        }
        // After shifting by k - 1 the segment is [1..len] with len <= n - 1.
        let shift = seg.k - 1;
        let len = seg.len(n);
        let m = cyclic(ones[0] as isize - shift as isize, n);
        let mut perms: Vec<usize> = (1..m).collect();
        perms.extend((m + 1..=len).rev());
        Ok(Exposure {
            segment: seg,
            shift,
            perms,
            position: m,
        })
    }

    pub fn apply_exposure(&self, ex: &Exposure) -> Result<ToricSystem> {
        let mut b = self.shift_by(ex.shift);
        for &k in &ex.perms {
            b = b.perm(k)?;
        }
        Ok(b)
    }

    /// Replaces the surface by another with the same lattice (e.g. to re-check
    /// the same classes on a different type).
    pub fn on_surface(&self, surface: Arc<Surface>) -> Result<ToricSystem> {
        ToricSystem::new(surface, self.entries.clone())
    }
}

impl fmt::Display for ToricSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// On-disk form of a toric system.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SystemFile {
    pub surface: String,
    pub entries: Vec<String>,
}

impl SystemFile {
    pub fn from_system(a: &ToricSystem) -> SystemFile {
        SystemFile {
            surface: a.surface().name().unwrap_or_default().to_string(),
            entries: a.entries().iter().map(|c| c.to_string()).collect(),
        }
    }

    /// JSON (`{"surface": .., "entries": [..]}`) or text: a `surface: <label>`
    /// line followed by one class per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<SystemFile> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text)
                .map_err(|e| Error::Parse(format!("system file: {e}")));
        }
        let mut surface = None;
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("surface") {
                let rest = rest.trim_start().trim_start_matches([':', '=']).trim();
                surface = Some(rest.trim_matches('"').to_string());
            } else {
                entries.push(line.to_string());
            }
        }
        let surface =
            surface.ok_or_else(|| Error::Parse("system file has no `surface` line".into()))?;
        Ok(SystemFile { surface, entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("surface: {}\n", self.surface);
        for e in &self.entries {
            out.push_str(e);
            out.push('\n');
        }
        out
    }

    /// Resolves the surface label in `registry` (or `surface_override`) and validates.
    pub fn resolve(
        &self,
        registry: &Registry,
        surface_override: Option<&str>,
    ) -> Result<ToricSystem> {
        let label = surface_override.unwrap_or(&self.surface);
        let s = registry.get(label)?;
        let refs: Vec<&str> = self.entries.iter().map(|e| e.as_str()).collect();
        ToricSystem::parse(s, &refs)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn reg() -> &'static Registry {
        Registry::builtin()
    }

    fn sys(label: &str, entries: &[&str]) -> ToricSystem {
        ToricSystem::parse(reg().get(label).unwrap(), entries).unwrap()
    }

    pub(crate) fn counterexample() -> ToricSystem {
        sys(
            "2,A1+2A3",
            &[
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
            ],
        )
    }

    pub(crate) fn degree_four_example() -> ToricSystem {
        sys(
            "4,2A1,8",
            &[
                "L145", "E4", "L234", "L5", "E5-E1", "L35", "E3-E2", "-L+E125",
            ],
        )
    }

    #[test]
    fn validate_examples() {
        assert_eq!(sys("P2", &["L", "L", "L"]).squares(), vec![1, 1, 1]);
        for label in ["6,∅", "6,A1,4", "6,A1+A2"] {
            sys(label, &["L13", "E1", "L12", "E2", "L23", "E3"]);
        }
        let p2 = reg().get("P2").unwrap();
        let err = ToricSystem::parse(p2.clone(), &["L", "L", "2L"]).unwrap_err();
        assert!(matches!(err, Error::InvalidToricSystem(_)));
        assert!(ToricSystem::parse(p2, &["L", "L"]).is_err());
    }

    #[test]
    fn squares_examples() {
        assert_eq!(
            counterexample().squares(),
            vec![-1, -2, -2, -2, -1, -2, -2, -1, -2, -3]
        );
        assert_eq!(
            degree_four_example().squares(),
            vec![-2, -1, -2, 0, -2, -1, -2, -2]
        );
    }

    #[test]
    fn segment_examples() {
        let a = counterexample();
        let s = a.surface().clone();
        assert_eq!(
            a.segment(9, 10).unwrap(),
            -s.parse_class("2L - E11456").unwrap()
        );
        assert_eq!(a.segment(3, 3).unwrap(), a.entry(3));
        assert!(a.segment(4, 3).is_err());
        assert!(a.segment(1, 10).is_err());
        assert!(a.segment(10, 9).is_err());
        assert_eq!(CyclicSegment::all(4).len(), 12);
        assert_eq!(
            CyclicSegment::new(3, 1, 4)
                .unwrap()
                .indices(4)
                .collect::<Vec<_>>(),
            vec![3, 4, 1]
        );
    }

    #[test]
    fn shift_examples() {
        let a = counterexample();
        assert_eq!(a.shift_by(a.len()), a);
        let mut b = a.clone();
        for _ in 0..a.len() {
            b = b.shift();
        }
        assert_eq!(b, a);
        let b = a.shift();
        ToricSystem::new(b.surface().clone(), b.entries().to_vec()).unwrap();
        let mut sq = a.squares();
        sq.rotate_left(1);
        assert_eq!(b.squares(), sq);
    }

    #[test]
    fn perm_examples() {
        let a = degree_four_example();
        let b = a.perm(8).unwrap().perm(7).unwrap();
        assert_eq!(b.entry(6), a.surface().parse_class("E1").unwrap());
        ToricSystem::new(b.surface().clone(), b.entries().to_vec()).unwrap();
        for k in 1..=a.len() {
            if let Ok(p) = a.perm(k) {
                assert_eq!(p.perm(k).unwrap(), a);
                assert_eq!(p.squares(), a.squares());
                ToricSystem::new(p.surface().clone(), p.entries().to_vec()).unwrap();
            }
        }
        assert!(matches!(a.perm(2), Err(Error::NotTransposable(2, -1))));
    }

    #[test]
    fn blow_down_examples() {
        let a = sys("F1", &["L1", "E1", "L1", "L"]);
        let (b, bd) = a.blow_down_toric(2, reg()).unwrap();
        assert_eq!(b.entries(), sys("P2", &["L", "L", "L"]).entries());
        assert_eq!(b.surface().name(), Some("P2"));
        let f1 = reg().get("F1").unwrap();
        assert_eq!(b.augment_lattice(2, &f1, &bd.exceptional).unwrap(), a);

        let a = degree_four_example();
        let b = a.perm(8).unwrap().perm(7).unwrap();
        let (c, _) = b.blow_down_toric(6, reg()).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c.surface().degree(), 5);
        assert!(
            a.blow_down_toric(2, reg()).is_err(),
            "E4 is not an irreducible curve here"
        );
    }

    #[test]
    fn augment_table_chain() {
        let f1 = sys("F1", &["L1", "E1", "L1", "L"]);
        let s7 = reg().get("7,∅").unwrap();
        let e2 = s7.parse_class("E2").unwrap();
        let b = f1.augment_lattice(4, &s7, &e2).unwrap();
        assert_eq!(
            b.entries(),
            sys("7,∅", &["L1", "E1", "L12", "E2", "L2"]).entries()
        );
        assert_eq!(b.blow_down_toric(4, reg()).unwrap().0, f1);
    }

    #[test]
    fn candidate_position_examples() {
        let a = counterexample();
        let s = a.surface().clone();
        let i = a.candidate_positions();
        assert_eq!(i.len(), 22);
        assert!(i.iter().all(|c| !s.is_irreducible_minus_one(c)));
        let six = sys("6,∅", &["E1", "L12", "E2", "L23", "E3", "L13"]);
        let mut entries = six.entries().to_vec();
        entries.sort();
        assert_eq!(six.candidate_positions(), entries);
    }

    #[test]
    fn exposures_reach_their_segment() {
        for a in [counterexample(), degree_four_example()] {
            for (seg, c) in a.exposable_segments() {
                let ex = a.exposure(seg).unwrap();
                let b = a.apply_exposure(&ex).unwrap();
                assert_eq!(b.entry(ex.position), c, "{seg}");
                ToricSystem::new(b.surface().clone(), b.entries().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn system_file_forms() {
        let text = "# degree six\nsurface: 6,0\nL13\nE1\nL12\nE2\nL23\nE3\n";
        let f = SystemFile::parse(text).unwrap();
        let a = f.resolve(reg(), None).unwrap();
        let json = serde_json::to_string(&SystemFile::from_system(&a)).unwrap();
        let back = SystemFile::parse(&json)
            .unwrap()
            .resolve(reg(), None)
            .unwrap();
        assert_eq!(a, back);
        assert_eq!(SystemFile::parse(&f.to_text()).unwrap(), f);
    }
}
