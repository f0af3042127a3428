//! Finite sets of classes with prescribed square and canonical degree, and
//! Weyl reflections.
//!
//! For `K^2 > 0` the form is negative definite on `K`-perp (Hodge index).
//! Classes with `x.K = k` form a translate `x0 + K-perp`, and `x^2 = s` cuts
//! out an ellipsoid in it; the lattice points are found by an exact
//! short-vector enumeration around the rational center and filtered exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, PicardLattice};
use crate::quadratic::{kernel_basis, solve, Cholesky, Q};

type Key = (PicardLattice, i64, i64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Vec<DivisorClass>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<DivisorClass>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All classes `D` with `D^2 = square` and `D.K = k_degree`, sorted.
pub fn enumerate_classes(
    lattice: PicardLattice,
    square: i64,
    k_degree: i64,
) -> Arc<Vec<DivisorClass>> {
    let key = (lattice, square, k_degree);
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = Arc::new(enumerate_uncached(lattice, square, k_degree));
    cache().lock().unwrap().entry(key).or_insert(v).clone()
}

fn enumerate_uncached(lattice: PicardLattice, square: i64, k_degree: i64) -> Vec<DivisorClass> {
    assert!(lattice.degree() > 0, "enumeration needs K^2 > 0");
    let r = lattice.rank();
    let canonical = lattice.canonical();
    let kappa: Vec<i64> = (0..r).map(|i| lattice.basis(i).dot(&canonical)).collect();
    let (g, cols) = kernel_basis(&kappa);
    if k_degree % g != 0 {
        return Vec::new();
    }
    let to_class = |v: &[i64]| DivisorClass::new(lattice, v).expect("rank-sized vector");
    let x0 = (k_degree / g) * to_class(&cols[0]);
    let kernel: Vec<DivisorClass> = cols[1..].iter().map(|c| to_class(c)).collect();
    if kernel.is_empty() {
        return if x0.square() == square {
            vec![x0]
        } else {
            Vec::new()
        };
    }
    // x = x0 + sum y_i u_i; x^2 = x0^2 + 2 b.y - y.G.y with G = -(u_i.u_j) positive definite.
    let gram: Vec<Vec<i64>> = kernel
        .iter()
        .map(|u| kernel.iter().map(|v| -u.dot(v)).collect())
        .collect();
    let b: Vec<i64> = kernel.iter().map(|u| x0.dot(u)).collect();
    let center = solve(&gram, &b);
    let center_norm: Q = center
        .iter()
        .zip(&b)
        .map(|(c, &bi)| *c * Q::from_integer(bi as i128))
        .sum();
    let bound = Q::from_integer((x0.square() - square) as i128) + center_norm;
    let mut out = Vec::new();
    Cholesky::new(&gram).for_each_in_ellipsoid(&center, bound, |y| {
        let x = y
            .iter()
            .zip(&kernel)
            .fold(x0, |acc, (&yi, u)| acc + yi * *u);
        if x.square() == square {
            debug_assert_eq!(x.k_degree(), k_degree);
            out.push(x);
        }
    });
    out.sort();
    out
}

/// `r`-classes: `D^2 = r`, `D.K = -r - 2`.
pub fn r_classes(lattice: PicardLattice, r: i64) -> Arc<Vec<DivisorClass>> {
    enumerate_classes(lattice, r, -r - 2)
}

/// `I(X)`.
pub fn minus_one_classes(lattice: PicardLattice) -> Arc<Vec<DivisorClass>> {
    enumerate_classes(lattice, -1, -1)
}

/// `R(X)`.
pub fn minus_two_classes(lattice: PicardLattice) -> Arc<Vec<DivisorClass>> {
    enumerate_classes(lattice, -2, 0)
}

pub fn zero_classes(lattice: PicardLattice) -> Arc<Vec<DivisorClass>> {
    enumerate_classes(lattice, 0, -2)
}

/// Reflection in a `(-2)`-class: `D + (D.r) r`.
pub fn reflect(d: &DivisorClass, root: &DivisorClass) -> Result<DivisorClass> {
    if root.lattice() != d.lattice() {
        return Err(Error::LatticeMismatch(d.lattice(), root.lattice()));
    }
    if root.square() != -2 || root.k_degree() != 0 {
        return Err(Error::NotRoot(root.to_string()));
    }
    Ok(*d + d.dot(root) * *root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: usize) -> PicardLattice {
        PicardLattice::blowup(n).unwrap()
    }

    /// Independent oracle: scan a coefficient box large enough for the
    /// small lattices used here.
    fn box_scan(l: PicardLattice, square: i64, kdeg: i64, bound: i64) -> Vec<DivisorClass> {
        let r = l.rank();
        let mut out = Vec::new();
        let mut x = vec![-bound; r];
        loop {
            let c = DivisorClass::new(l, &x).unwrap();
            if c.square() == square && c.k_degree() == kdeg {
                out.push(c);
            }
            let mut i = 0;
            loop {
                if i == r {
                    out.sort();
                    return out;
                }
                x[i] += 1;
                if x[i] <= bound {
                    break;
                }
                x[i] = -bound;
                i += 1;
            }
        }
    }

    #[test]
    fn table_one_examples() {
        assert_eq!(minus_one_classes(b(6)).len(), 27);
        assert_eq!(minus_two_classes(b(7)).len(), 126);
        assert_eq!(minus_one_classes(b(0)).len(), 0);
        assert_eq!(minus_one_classes(b(5)).len(), 16);
        assert_eq!(*minus_two_classes(b(2)), {
            let e = DivisorClass::parse(b(2), "E1 - E2").unwrap();
            let mut v = vec![e, -e];
            v.sort();
            v
        });
    }

    #[test]
    fn zero_classes_on_four_points() {
        let l = b(4);
        let mut expected: Vec<DivisorClass> = [
            "2L - E1 - E2 - E3 - E4",
            "L - E1",
            "L - E2",
            "L - E3",
            "L - E4",
        ]
        .iter()
        .map(|s| DivisorClass::parse(l, s).unwrap())
        .collect();
        expected.sort();
        assert_eq!(*zero_classes(l), expected);
    }

    #[test]
    fn agrees_with_box_scan() {
        for n in 0..=4 {
            for (s, k) in [(-1, -1), (-2, 0), (0, -2), (1, -3), (2, -4)] {
                assert_eq!(
                    *enumerate_classes(b(n), s, k),
                    box_scan(b(n), s, k, 4),
                    "n={n} s={s} k={k}"
                );
            }
        }
        for d in 0..4 {
            let l = PicardLattice::hirzebruch(d);
            for (s, k) in [(-2, 0), (0, -2), (2, -4)] {
                assert_eq!(
                    *enumerate_classes(l, s, k),
                    box_scan(l, s, k, 8),
                    "F{d} s={s} k={k}"
                );
            }
        }
    }

    #[test]
    fn reflection_examples() {
        let l = b(3);
        let r = DivisorClass::parse(l, "E1 - E2").unwrap();
        assert_eq!(reflect(&r, &r).unwrap(), -r);
        let d = DivisorClass::parse(l, "L - E3").unwrap();
        assert_eq!(reflect(&d, &r).unwrap(), d);
        let e = DivisorClass::parse(l, "E1").unwrap();
        assert_eq!(reflect(&reflect(&e, &r).unwrap(), &r).unwrap(), e);
        assert!(reflect(&e, &e).is_err());
    }

    #[test]
    fn enumeration_closed_under_reflections() {
        for n in [3, 5, 6] {
            let l = b(n);
            let roots = minus_two_classes(l);
            let ones = minus_one_classes(l);
            for r in roots.iter() {
                for c in ones.iter() {
                    assert!(ones.binary_search(&reflect(c, r).unwrap()).is_ok());
                }
            }
        }
    }

    #[test]
    fn low_r_classes_are_exceptional_or_positive() {
        for n in 1..=8 {
            let l = b(n);
            for r in -1..=2 {
                for d in r_classes(l, r).iter() {
                    let is_e = (1..=n).any(|i| *d == l.exceptional(i).unwrap());
                    let a = d.coeff(0);
                    assert!(
                        is_e || (a > 0 && (1..=n).all(|i| a + d.coeff(i) >= 0)),
                        "{d}"
                    );
                }
            }
        }
    }
}
