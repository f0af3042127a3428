//! Effectiveness of divisor classes on weak del Pezzo surfaces.
//!
//! The decision procedure subtracts negative curves `C` with `D.C < 0` (an
//! effective `D` must contain such a `C`) until the class is zero, nef, has
//! negative anticanonical degree, or is orthogonal to `K`. In the last case
//! it is effective exactly when it is a nonnegative integer combination of
//! (-2)-curves, which is decided by an exact linear solve since the simple
//! roots are linearly independent.

use serde::Serialize;

use crate::lattice::{DivisorClass, PicardLattice};
use crate::quadratic::{solve, Q};
use crate::surface::Surface;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Zero,
    Nef,
    /// `K`-orthogonal and equal to `sum coeffs[i] * r_irr[i]` with `coeffs >= 0`.
    RootCombination {
        coeffs: Vec<i64>,
    },
    /// `K`-orthogonal but not a nonnegative combination of (-2)-curves.
    NotRootCombination,
    NegativeDegree,
    /// Rank at most two: decided by the explicit cone.
    ClosedForm {
        effective: bool,
    },
}

impl Outcome {
    pub fn is_effective(&self) -> bool {
        match self {
            Outcome::Zero | Outcome::Nef | Outcome::RootCombination { .. } => true,
            Outcome::NotRootCombination | Outcome::NegativeDegree => false,
            Outcome::ClosedForm { effective } => *effective,
        }
    }
}

/// A bite chain: `D = bites[0] + bites[1] + .. + residual`, and `D` is
/// effective iff `residual` is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub bites: Vec<DivisorClass>,
    pub residual: DivisorClass,
    pub outcome: Outcome,
}

impl Reduction {
    pub fn is_effective(&self) -> bool {
        self.outcome.is_effective()
    }
}

/// Effective cone for rank at most two.
fn closed_form(d: &DivisorClass) -> bool {
    match d.lattice() {
        PicardLattice::Blowup(0) => d.coeff(0) >= 0,
        PicardLattice::Blowup(1) => d.coeff(0) >= 0 && d.coeff(0) + d.coeff(1) >= 0,
        PicardLattice::Hirzebruch { d: deg, blowups: 0 } => {
            let (f, s) = (d.coeff(0), d.coeff(1));
            s >= 0 && f + deg as i64 * s >= 0
        }
        l => unreachable!("closed form requested on {l}"),
    }
}

fn closed_form_nef(d: &DivisorClass) -> bool {
    match d.lattice() {
        PicardLattice::Blowup(0) => d.coeff(0) >= 0,
        PicardLattice::Blowup(1) => d.coeff(1) <= 0 && d.coeff(0) + d.coeff(1) >= 0,
        PicardLattice::Hirzebruch { blowups: 0, .. } => d.coeff(0) >= 0 && d.coeff(1) >= 0,
        l => unreachable!("closed form requested on {l}"),
    }
}

/// Coefficients of `d` over the simple roots, if it lies in their span with
/// integral nonnegative coefficients.
fn root_combination(s: &Surface, d: &DivisorClass) -> Option<Vec<i64>> {
    let roots = s.r_irr();
    let n = roots.len();
    if n == 0 {
        return None;
    }
    let gram: Vec<Vec<i64>> = roots
        .iter()
        .map(|a| roots.iter().map(|b| a.dot(b)).collect())
        .collect();
    let rhs: Vec<i64> = roots.iter().map(|r| d.dot(r)).collect();
    let mut coeffs = Vec::with_capacity(n);
    for c in solve(&gram, &rhs) {
        if !c.is_integer() || c < Q::from_integer(0) {
            return None;
        }
        coeffs.push(*c.numer() as i64);
    }
    let combo = coeffs
        .iter()
        .zip(roots)
        .fold(DivisorClass::zero(s.lattice()), |a, (&c, r)| a + c * *r);
    (combo == *d).then_some(coeffs)
}

/// Runs the bite chain in the surface's fixed curve order.
pub fn zariski_reduce(s: &Surface, d: &DivisorClass) -> Reduction {
    assert_eq!(
        d.lattice(),
        s.lattice(),
        "class and surface lattices differ"
    );
    let mut bites = Vec::new();
    let mut cur = *d;
    if s.lattice().rank() <= 2 {
        let outcome = if cur.is_zero() {
            Outcome::Zero
        } else {
            Outcome::ClosedForm {
                effective: closed_form(&cur),
            }
        };
        return Reduction {
            bites,
            residual: cur,
            outcome,
        };
    }
    let two_rho = s.two_rho();
    loop {
        if cur.is_zero() {
            return Reduction {
                bites,
                residual: cur,
                outcome: Outcome::Zero,
            };
        }
        let degree = cur.anticanonical_degree();
        if degree < 0 {
            return Reduction {
                bites,
                residual: cur,
                outcome: Outcome::NegativeDegree,
            };
        }
        if degree == 0 {
            let outcome = match root_combination(s, &cur) {
                Some(coeffs) => Outcome::RootCombination { coeffs },
                None => Outcome::NotRootCombination,
            };
            return Reduction {
                bites,
                residual: cur,
                outcome,
            };
        }
        let Some(c) = s.negative_curves().iter().find(|c| cur.dot(c) < 0) else {
            return Reduction {
                bites,
                residual: cur,
                outcome: Outcome::Nef,
            };
        };
        let next = cur - *c;
        let before = (degree, -cur.dot(&two_rho));
        let after = (next.anticanonical_degree(), -next.dot(&two_rho));
        assert!(
            after < before,
            "bite potential did not decrease: {before:?} -> {after:?}"
        );
        bites.push(*c);
        cur = next;
    }
}

pub fn is_effective(s: &Surface, d: &DivisorClass) -> bool {
    zariski_reduce(s, d).is_effective()
}

/// `D.C >= 0` for every negative curve (closed forms in rank at most two).
pub fn is_nef(s: &Surface, d: &DivisorClass) -> bool {
    if s.lattice().rank() <= 2 {
        return closed_form_nef(d);
    }
    s.negative_curves().iter().all(|c| d.dot(c) >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Registry;

    fn surf(label: &str) -> std::sync::Arc<Surface> {
        Registry::builtin().get(label).unwrap()
    }

    #[test]
    fn counterexample_surface_examples() {
        let s = surf("2,A1+2A3");
        let c = |t: &str| s.parse_class(t).unwrap();
        assert!(!is_effective(&s, &c("L145")));
        assert!(is_effective(&s, &c("2L - E123456")));
        let red = zariski_reduce(&s, &c("2L - 2E1 - E4 - E5 - E7"));
        assert_eq!(red.bites, vec![c("L167"), c("E6")]);
        assert_eq!(red.residual, c("L145"));
        assert!(!red.is_effective());
    }

    #[test]
    fn reduction_examples() {
        let s = surf("4,A1");
        let k = s.canonical();
        let red = zariski_reduce(&s, &-k);
        assert!(red.bites.is_empty());
        assert_eq!(red.outcome, Outcome::Nef);
        for e in s.i_irr() {
            let red = zariski_reduce(&s, e);
            assert_eq!(red.bites, vec![*e]);
            assert!(red.residual.is_zero());
        }
    }

    #[test]
    fn nef_examples() {
        for s in Registry::builtin().surfaces() {
            assert!(is_nef(s, &-s.canonical()), "{}", s.display_name());
            assert!(is_nef(s, &DivisorClass::zero(s.lattice())));
            for e in s.i_irr() {
                assert!(!is_nef(s, e));
            }
        }
    }

    #[test]
    fn minus_two_effectiveness_matches_positive_roots() {
        for s in Registry::builtin().surfaces() {
            for r in crate::classes::minus_two_classes(s.lattice()).iter() {
                assert_eq!(
                    is_effective(s, r),
                    s.is_effective_root(r),
                    "{} {r}",
                    s.display_name()
                );
            }
        }
    }

    #[test]
    fn rank_two_closed_forms() {
        let p2 = surf("P2");
        assert!(is_effective(&p2, &p2.parse_class("0").unwrap()));
        assert!(!is_effective(&p2, &p2.parse_class("-L").unwrap()));
        let f2 = surf("F2");
        assert!(is_effective(&f2, &f2.parse_class("S - 2F").unwrap()));
        assert!(!is_effective(&f2, &f2.parse_class("S - 3F").unwrap()));
        assert!(!is_effective(&f2, &f2.parse_class("F - S").unwrap()));
        let f1 = surf("F1");
        assert!(is_effective(&f1, &f1.parse_class("E1").unwrap()));
        assert!(is_effective(&f1, &f1.parse_class("L - E1").unwrap()));
        assert!(!is_effective(&f1, &f1.parse_class("L - 2E1").unwrap()));
        assert!(!is_nef(&f1, &f1.parse_class("E1").unwrap()));
        assert!(is_nef(&f1, &f1.parse_class("L - E1").unwrap()));
    }
}
