//! Left-orthogonality of single classes and exceptionality of toric systems
//! on weak del Pezzo surfaces, decided through effectiveness.
//!
//! The general path checks every relevant segment sum `A_{k..l}` with the
//! single-class criteria. The fast path only looks at runs of `-2` squares,
//! which is enough once the squares are bounded below by `-2`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::effective::{zariski_reduce, Reduction};
use crate::error::{Error, Result};
use crate::lattice::{is_numerically_left_orthogonal, DivisorClass};
use crate::surface::Surface;
use crate::toric::{cyclic, CyclicSegment, ToricSystem};

/// Why a class fails a left-orthogonality criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Obstruction {
    /// `class` is effective, certified by `reduction`.
    Effective {
        class: DivisorClass,
        reduction: Reduction,
    },
    /// Strong left-orthogonal classes have square at least `-2`.
    SquareBelowMinusTwo { square: i64 },
}

fn effective_obstruction(s: &Surface, class: DivisorClass) -> Option<Obstruction> {
    let reduction = zariski_reduce(s, &class);
    reduction
        .is_effective()
        .then_some(Obstruction::Effective { class, reduction })
}

fn require_left_orthogonal_numerics(s: &Surface, d: &DivisorClass) -> Result<()> {
    if d.lattice() != s.lattice() {
        return Err(Error::LatticeMismatch(d.lattice(), s.lattice()));
    }
    if !is_numerically_left_orthogonal(d) {
        return Err(Error::NotRClass(format!(
            "{d} is not numerically left-orthogonal"
        )));
    }
    Ok(())
}

/// `None` if `d` is left-orthogonal, otherwise the effective class that
/// prevents it.
pub fn left_orthogonality(s: &Surface, d: &DivisorClass) -> Result<Option<Obstruction>> {
    require_left_orthogonal_numerics(s, d)?;
    let r = d.square();
    let degree = s.degree();
    Ok(if r <= -2 {
        effective_obstruction(s, -*d)
    } else if r <= degree - 3 {
        None
    } else {
        effective_obstruction(s, s.canonical() + *d)
    })
}

pub fn strong_left_orthogonality(s: &Surface, d: &DivisorClass) -> Result<Option<Obstruction>> {
    require_left_orthogonal_numerics(s, d)?;
    let r = d.square();
    let degree = s.degree();
    Ok(if r <= -3 {
        Some(Obstruction::SquareBelowMinusTwo { square: r })
    } else if r == -2 {
        effective_obstruction(s, *d).or_else(|| effective_obstruction(s, -*d))
    } else if r <= degree - 3 {
        None
    } else {
        effective_obstruction(s, s.canonical() + *d)
    })
}

pub fn is_left_orthogonal(s: &Surface, d: &DivisorClass) -> Result<bool> {
    Ok(left_orthogonality(s, d)?.is_none())
}

pub fn is_strong_left_orthogonal(s: &Surface, d: &DivisorClass) -> Result<bool> {
    Ok(strong_left_orthogonality(s, d)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    Exceptional,
    Strong,
    Cyclic,
}

impl FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grade> {
        match s {
            "exc" | "exceptional" => Ok(Grade::Exceptional),
            "strong" => Ok(Grade::Strong),
            "cyclic" => Ok(Grade::Cyclic),
            _ => Err(Error::Parse(format!(
                "unknown grade `{s}` (expected exc, strong or cyclic)"
            ))),
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grade::Exceptional => "exceptional",
            Grade::Strong => "strong exceptional",
            Grade::Cyclic => "cyclic strong exceptional",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckPath {
    Fast,
    General,
}

/// A segment of the system whose sum violates the grade.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub segment: CyclicSegment,
    pub sum: DivisorClass,
    pub obstruction: Obstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub grade: Grade,
    pub holds: bool,
    /// The path that produced the verdict (the fast path falls back to the
    /// general one when its hypotheses fail).
    pub path: CheckPath,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn from_witness(grade: Grade, path: CheckPath, witness: Option<Witness>) -> Verdict {
        Verdict {
            grade,
            holds: witness.is_none(),
            path,
            witness,
        }
    }
}

pub fn is_exceptional(a: &ToricSystem) -> Verdict {
    check(a, Grade::Exceptional, CheckPath::Fast)
}

pub fn is_strong_exceptional(a: &ToricSystem) -> Verdict {
    check(a, Grade::Strong, CheckPath::Fast)
}

pub fn is_cyclic_strong_exceptional(a: &ToricSystem) -> Verdict {
    check(a, Grade::Cyclic, CheckPath::Fast)
}

pub fn check(a: &ToricSystem, grade: Grade, path: CheckPath) -> Verdict {
    match path {
        CheckPath::General => Verdict::from_witness(grade, CheckPath::General, general(a, grade)),
        CheckPath::Fast => match fast(a, grade) {
            Some(w) => Verdict::from_witness(grade, CheckPath::Fast, w),
            None => Verdict::from_witness(grade, CheckPath::General, general(a, grade)),
        },
    }
}

/// Checks every segment sum against the single-class criteria.
fn general(a: &ToricSystem, grade: Grade) -> Option<Witness> {
    let s = a.surface();
    let n = a.len();
    let segments = match grade {
        Grade::Exceptional | Grade::Strong => CyclicSegment::linear(n),
        Grade::Cyclic => CyclicSegment::all(n),
    };
    segments.into_iter().find_map(|segment| {
        let sum = a.segment_sum(segment);
        let obstruction = match grade {
            Grade::Exceptional => left_orthogonality(s, &sum),
            Grade::Strong | Grade::Cyclic => strong_left_orthogonality(s, &sum),
        }
        .expect("segment sums of a toric system are numerically left-orthogonal")?;
        Some(Witness {
            segment,
            sum,
            obstruction,
        })
    })
}

fn all_minus_two(sq: &[i64], seg: CyclicSegment) -> bool {
    seg.indices(sq.len()).all(|i| sq[i - 1] == -2)
}

/// `Some(verdict witness)` when the fast criteria apply, `None` to defer to
/// the general path.
fn fast(a: &ToricSystem, grade: Grade) -> Option<Option<Witness>> {
    let n = a.len();
    let sq = a.squares();
    let low: Vec<usize> = (1..=n).filter(|&i| sq[i - 1] < -2).collect();
    match grade {
        Grade::Cyclic => {
            if let Some(&i) = low.first() {
                return Some(Some(square_witness(a, i)));
            }
            Some(minus_two_runs(a, CyclicSegment::all(n), true))
        }
        Grade::Strong => {
            if let Some(&i) = low.iter().find(|&&i| i < n) {
                return Some(Some(square_witness(a, i)));
            }
            let w =
                fast_exceptional(a).or_else(|| minus_two_runs(a, CyclicSegment::linear(n), true));
            Some(w)
        }
        Grade::Exceptional => match low.as_slice() {
            [] | [_] => {
                // Exceptionality is shift-invariant: move the low entry last.
                let t = low.first().map_or(0, |&i| i % n);
                let shifted = a.shift_by(t);
                Some(fast_exceptional(&shifted).map(|w| unshift_witness(w, t, n)))
            }
            _ => None,
        },
    }
}

fn square_witness(a: &ToricSystem, i: usize) -> Witness {
    let sum = a.entry(i);
    Witness {
        segment: CyclicSegment { k: i, l: i },
        sum,
        obstruction: Obstruction::SquareBelowMinusTwo {
            square: sum.square(),
        },
    }
}

fn unshift_witness(mut w: Witness, t: usize, n: usize) -> Witness {
    w.segment = CyclicSegment {
        k: cyclic((w.segment.k + t) as isize, n),
        l: cyclic((w.segment.l + t) as isize, n),
    };
    w
}

/// For segments made of `-2` squares: `-A_{k..l}` (and `A_{k..l}` when
/// `both_signs`) must not be effective.
fn minus_two_runs(
    a: &ToricSystem,
    segments: Vec<CyclicSegment>,
    both_signs: bool,
) -> Option<Witness> {
    let s = a.surface();
    let sq = a.squares();
    segments
        .into_iter()
        .filter(|seg| all_minus_two(&sq, *seg))
        .find_map(|segment| {
            let sum = a.segment_sum(segment);
            let obstruction = effective_obstruction(s, -sum)
                .or_else(|| both_signs.then(|| effective_obstruction(s, sum)).flatten())?;
            Some(Witness {
                segment,
                sum,
                obstruction,
            })
        })
}

/// Exceptionality when `A_i^2 >= -2` for `i < n`: `-A_{k..l}` is not effective
/// on `-2` runs inside `[1..n-1]` and, if `A_n^2 <= -2`, on `-2` runs
/// wrapped around position `n`.
fn fast_exceptional(a: &ToricSystem) -> Option<Witness> {
    let n = a.len();
    let sq = a.squares();
    debug_assert!(sq[..n - 1].iter().all(|&x| x >= -2));
    if let Some(w) = minus_two_runs(a, CyclicSegment::linear(n), false) {
        return Some(w);
    }
    if sq[n - 1] > -2 {
        return None;
    }
    let s = a.surface();
    // k..n-1 and 1..l are -2 runs (possibly empty), l < k, never the full circle.
    let mut k_min = n;
    while k_min > 1 && sq[k_min - 2] == -2 {
        k_min -= 1;
    }
    let mut l_max = 0;
    while l_max < n - 1 && sq[l_max] == -2 {
        l_max += 1;
    }
    for k in k_min..=n {
        for l in 0..=l_max.min(k - 1) {
            if k == l + 1 {
                continue;
            }
            let segment = if l == 0 {
                CyclicSegment { k, l: n }
            } else {
                CyclicSegment { k, l }
            };
            let sum = a.segment_sum(segment);
            if let Some(obstruction) = effective_obstruction(s, -sum) {
                return Some(Witness {
                    segment,
                    sum,
                    obstruction,
                });
            }
        }
    }
    None
}
