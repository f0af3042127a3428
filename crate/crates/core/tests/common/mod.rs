//! Shared fixtures for the integration suites: a pool of first-kind toric
//! systems, seeded property runners and a brute-force effectiveness oracle.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use toric_systems::admissible::{augment_sequence, is_admissible, is_first_kind};
use toric_systems::augment::weak_augmentation_along;
use toric_systems::checker::{check, CheckPath, Grade};
use toric_systems::classes::{minus_one_classes, minus_two_classes, r_classes, reflect};
use toric_systems::classify::{enumerate_toric_systems, first_kind_patterns, strong_patterns};
use toric_systems::lattice::{euler_char, intersect, is_numerically_left_orthogonal};
use toric_systems::toric::CyclicSegment;
use toric_systems::{DivisorClass, Registry, Surface, ToricSystem};

pub const CASES: u32 = 500;
const SEED: [u8; 32] = *b"toric-systems property seed 0001";

/// Types whose first-kind systems make up the pool.
pub const POOL_TYPES: [&str; 10] = [
    "7,∅", "7,A1", "6,A1+A2", "6,2A1", "5,∅", "5,A1+A2", "5,A3", "4,∅", "4,2A1+A3", "4,D5",
];

pub fn registry() -> &'static Registry {
    Registry::builtin()
}

/// All first-kind toric systems on the pool types.
pub fn pool() -> &'static [ToricSystem] {
    static POOL: OnceLock<Vec<ToricSystem>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for label in POOL_TYPES {
            let s = registry().get(label).unwrap();
            let n = (12 - s.degree()) as usize;
            for pattern in first_kind_patterns(n) {
                out.extend(enumerate_toric_systems(&s, &pattern).unwrap());
            }
        }
        out
    })
}

/// Systems on degree-five types whose squares go below `-2`.
pub fn low_pool() -> &'static [ToricSystem] {
    static POOL: OnceLock<Vec<ToricSystem>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for label in ["5,∅", "5,A1+A2", "5,A2"] {
            let s = registry().get(label).unwrap();
            for pattern in strong_patterns(7, -4)
                .into_iter()
                .filter(|p| !is_first_kind(p))
            {
                out.extend(enumerate_toric_systems(&s, &pattern).unwrap());
            }
        }
        out
    })
}

pub fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

/// Runs `test` on `CASES` seeded inputs; the error names the first failure.
pub fn run_property<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

pub fn pool_system() -> impl Strategy<Value = ToricSystem> {
    (0..pool().len()).prop_map(|i| pool()[i].clone())
}

/// A pool system moved by a Weyl reflection and a few shifts and perms, so
/// that exceptionality varies.
pub fn scrambled_system() -> impl Strategy<Value = ToricSystem> {
    (
        pool_system(),
        any::<prop::sample::Index>(),
        prop::collection::vec(any::<prop::sample::Index>(), 0..4),
        0usize..12,
    )
        .prop_map(|(a, root, perms, shift)| {
            let roots = minus_two_classes(a.lattice());
            let r = roots[root.index(roots.len())];
            let entries = a
                .entries()
                .iter()
                .map(|d| reflect(d, &r).unwrap())
                .collect();
            let mut b = ToricSystem::new(a.surface().clone(), entries)
                .unwrap()
                .shift_by(shift % a.len());
            for p in perms {
                let sq = b.squares();
                let spots: Vec<usize> = (1..=b.len()).filter(|&k| sq[k - 1] == -2).collect();
                if !spots.is_empty() {
                    b = b.perm(spots[p.index(spots.len())]).unwrap();
                }
            }
            b
        })
}

fn minus_two_positions(a: &ToricSystem) -> Vec<usize> {
    let sq = a.squares();
    (1..=a.len()).filter(|&k| sq[k - 1] == -2).collect()
}

pub fn perm_involution() -> Result<(), String> {
    run_property(
        (scrambled_system(), any::<prop::sample::Index>()),
        |(a, i)| {
            let spots = minus_two_positions(&a);
            if spots.is_empty() {
                return Ok(());
            }
            let k = spots[i.index(spots.len())];
            let b = a.perm(k).unwrap();
            prop_assert_eq!(b.squares(), a.squares());
            prop_assert_eq!(b.perm(k).unwrap(), a);
            Ok(())
        },
    )
}

pub fn shift_identity() -> Result<(), String> {
    run_property(scrambled_system(), |a| {
        let mut b = a.clone();
        for _ in 0..a.len() {
            b = b.shift();
        }
        prop_assert_eq!(b, a);
        Ok(())
    })
}

/// Contracting an irreducible entry and augmenting back restores the system,
/// and squares follow the sequence-level augmentation.
pub fn blow_down_round_trip() -> Result<(), String> {
    run_property(
        (scrambled_system(), any::<prop::sample::Index>()),
        |(a, i)| {
            let s = a.surface();
            let spots: Vec<usize> = (1..=a.len())
                .filter(|&m| s.is_irreducible_minus_one(&a.entry(m)))
                .collect();
            if spots.is_empty() {
                return Ok(());
            }
            let m = spots[i.index(spots.len())];
            let (b, _) = a.blow_down_toric(m, registry()).unwrap();
            let back = b.augment_lattice(m, s, &a.entry(m)).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(augment_sequence(&b.squares(), m).unwrap(), a.squares());
            Ok(())
        },
    )
}

pub fn first_kind_descends() -> Result<(), String> {
    let seq = prop::collection::vec(-3i64..=2, 4..9);
    run_property((seq, any::<prop::sample::Index>()), |(a, i)| {
        let m = i.index(a.len() + 1) + 1;
        let b = augment_sequence(&a, m).unwrap();
        if is_first_kind(&b) {
            prop_assert!(is_first_kind(&a), "{:?} from {:?}", b, a);
        }
        Ok(())
    })
}

pub fn segment_identity() -> Result<(), String> {
    run_property(
        (scrambled_system(), any::<prop::sample::Index>()),
        |(a, i)| {
            let segs = CyclicSegment::all(a.len());
            let seg = segs[i.index(segs.len())];
            let sum = a.segment_sum(seg);
            let expected: i64 = seg.indices(a.len()).map(|j| a.entry(j).square() + 2).sum();
            prop_assert_eq!(sum.square() + 2, expected);
            prop_assert!(is_numerically_left_orthogonal(&sum));
            Ok(())
        },
    )
}

/// Random numerically left-orthogonal classes with squares in `-2..=1`.
fn nlo_class(lattice: toric_systems::PicardLattice) -> impl Strategy<Value = DivisorClass> {
    (-2i64..=1, any::<prop::sample::Index>()).prop_map(move |(r, i)| {
        let v = r_classes(lattice, r);
        v[i.index(v.len())]
    })
}

pub fn pair_equivalence() -> Result<(), String> {
    let strategy = (2usize..=6).prop_flat_map(|n| {
        let l = toric_systems::PicardLattice::blowup(n).unwrap();
        (nlo_class(l), nlo_class(l))
    });
    run_property(strategy, |(d1, d2)| {
        let sum = d1 + d2;
        let product = intersect(&d1, &d2).unwrap();
        prop_assert_eq!(is_numerically_left_orthogonal(&sum), product == 1);
        if product == 1 {
            prop_assert_eq!(euler_char(&sum), euler_char(&d1) + euler_char(&d2));
            prop_assert_eq!(sum.square(), d1.square() + d2.square() + 2);
        }
        Ok(())
    })
}

pub fn squares_admissible() -> Result<(), String> {
    run_property(scrambled_system(), |a| {
        prop_assert!(is_admissible(&a.squares()), "{:?}", a.squares());
        Ok(())
    })
}

pub fn fast_matches_general() -> Result<(), String> {
    let low = (0..low_pool().len()).prop_map(|i| low_pool()[i].clone());
    run_property(prop_oneof![scrambled_system(), low], |a| {
        for grade in [Grade::Exceptional, Grade::Strong, Grade::Cyclic] {
            let fast = check(&a, grade, CheckPath::Fast).holds;
            let general = check(&a, grade, CheckPath::General).holds;
            prop_assert_eq!(fast, general, "{} on {}", grade, a);
        }
        Ok(())
    })
}

/// First-kind systems are weak augmentations along any chain of
/// contractions, and expose as many (-1)-classes as the surface has.
pub fn first_kind_weak() -> Result<(), String> {
    run_property(
        (scrambled_system(), prop::collection::vec(0usize..64, 8)),
        |(a, choices)| {
            prop_assert!(is_first_kind(&a.squares()));
            let v = weak_augmentation_along(&a, &choices);
            prop_assert!(v.holds, "{} along {:?}", a, choices);
            let replayed = v.chain.unwrap().replay().unwrap();
            prop_assert_eq!(replayed, a.clone());
            if a.surface().degree() <= 7 {
                prop_assert_eq!(
                    a.candidate_positions().len(),
                    minus_one_classes(a.lattice()).len()
                );
            }
            Ok(())
        },
    )
}

pub const PROPERTIES: [(&str, fn() -> Result<(), String>); 9] = [
    ("perm involution and squares", perm_involution),
    ("shift^n identity", shift_identity),
    ("augment / blow-down round trip", blow_down_round_trip),
    (
        "first kind descends along augmentation",
        first_kind_descends,
    ),
    ("segment square identity", segment_identity),
    ("left-orthogonal pair equivalence", pair_equivalence),
    ("squares are admissible", squares_admissible),
    ("fast path matches general path", fast_matches_general),
    ("first-kind systems are weak augmentations", first_kind_weak),
];

/// Brute-force effectiveness: `D` is effective iff removing some
/// non-negative integer combination of negative curves leaves a nef class.
/// Negative curves are the simple roots and the (-1)-classes meeting every
/// simple root non-negatively. Every intermediate class must pair
/// non-negatively with a fixed set of nef classes, and its degree against a
/// class positive on all curves bounds the search.
pub struct Oracle {
    curves: Vec<DivisorClass>,
    nef_tests: Vec<DivisorClass>,
    polarization: DivisorClass,
}

impl Oracle {
    pub fn new(s: &Arc<Surface>) -> Oracle {
        let lattice = s.lattice();
        let mut curves: Vec<DivisorClass> = s.r_irr().to_vec();
        curves.extend(
            minus_one_classes(lattice)
                .iter()
                .filter(|e| s.r_irr().iter().all(|r| e.dot(r) >= 0)),
        );
        let anti = -s.canonical();
        let is_nef = |d: &DivisorClass| curves.iter().all(|c| d.dot(c) >= 0);
        let small = coefficient_box(lattice, 2);
        let nef_tests: Vec<DivisorClass> = small
            .iter()
            .filter(|d| !d.is_zero() && is_nef(d) && d.dot(&anti) <= 3)
            .copied()
            .collect();
        // Minus the sum of positive roots meets every simple root in 2.
        let twist = -s
            .r_eff()
            .iter()
            .copied()
            .fold(DivisorClass::zero(lattice), |a, b| a + b);
        let polarization = (1..100)
            .map(|t| t * anti + twist)
            .find(|h| curves.iter().all(|c| h.dot(c) > 0))
            .expect("a class positive on every negative curve");
        Oracle {
            curves,
            nef_tests,
            polarization,
        }
    }

    fn is_nef(&self, d: &DivisorClass) -> bool {
        self.curves.iter().all(|c| d.dot(c) >= 0)
    }

    fn in_cone(&self, d: &DivisorClass) -> bool {
        self.polarization.dot(d) >= 0 && self.nef_tests.iter().all(|n| n.dot(d) >= 0)
    }

    pub fn is_effective(&self, d: &DivisorClass) -> bool {
        if !self.in_cone(d) {
            return false;
        }
        let mut seen = HashSet::from([*d]);
        let mut stack = vec![*d];
        while let Some(x) = stack.pop() {
            if self.is_nef(&x) {
                return true;
            }
            // Curves meeting x negatively are tried first; the order only
            // affects speed.
            let mut order: Vec<&DivisorClass> = self.curves.iter().collect();
            order.sort_by_key(|c| -x.dot(c));
            for c in order {
                let y = x - *c;
                if self.in_cone(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// All classes with coefficients in `-bound..=bound`.
pub fn coefficient_box(lattice: toric_systems::PicardLattice, bound: i64) -> Vec<DivisorClass> {
    let rank = lattice.rank();
    let side = (2 * bound + 1) as usize;
    (0..side.pow(rank as u32))
        .map(|code| {
            let mut x = code;
            let coeffs: Vec<i64> = (0..rank)
                .map(|_| {
                    let c = (x % side) as i64 - bound;
                    x /= side;
                    c
                })
                .collect();
            DivisorClass::new(lattice, &coeffs).unwrap()
        })
        .collect()
}
