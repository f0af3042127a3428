//! Exact enumeration of integer vectors in an ellipsoid of a positive-definite
//! integer quadratic form (Fincke-Pohst with rational arithmetic).

use num_rational::Ratio;

pub(crate) type Q = Ratio<i128>;

/// `Q(x) = sum_i diag[i] * (x_i + sum_{j>i} upper[i][j] * x_j)^2`.
pub(crate) struct Cholesky {
    diag: Vec<Q>,
    upper: Vec<Vec<Q>>,
}

impl Cholesky {
    /// Panics if the form is not positive definite.
    pub(crate) fn new(gram: &[Vec<i64>]) -> Self {
        let r = gram.len();
        let mut q: Vec<Vec<Q>> = gram
            .iter()
            .map(|row| row.iter().map(|&v| Q::from_integer(v as i128)).collect())
            .collect();
        for i in 0..r {
            assert!(
                q[i][i] > Q::from_integer(0),
                "form is not positive definite"
            );
            for j in i + 1..r {
                q[j][i] = q[i][j];
                q[i][j] = q[i][j] / q[i][i];
            }
            for k in i + 1..r {
                for l in k..r {
                    let delta = q[k][i] * q[i][l];
                    q[k][l] -= delta;
                }
            }
        }
        let diag = (0..r).map(|i| q[i][i]).collect();
        Cholesky { diag, upper: q }
    }

    /// Calls `visit` on every integer `x` with `Q(x) <= bound`.
    #[cfg(test)]
    fn for_each_short_vector(&self, bound: i64, visit: impl FnMut(&[i64])) {
        let zero = vec![Q::from_integer(0); self.diag.len()];
        self.for_each_in_ellipsoid(&zero, Q::from_integer(bound as i128), visit);
    }

    /// Calls `visit` on every integer `x` with `Q(x - center) <= bound`.
    pub(crate) fn for_each_in_ellipsoid(
        &self,
        center: &[Q],
        bound: Q,
        mut visit: impl FnMut(&[i64]),
    ) {
        let r = self.diag.len();
        if bound < Q::from_integer(0) {
            return;
        }
        let mut x = vec![0i64; r];
        self.descend(r, bound, center, &mut x, &mut visit);
    }

    fn descend(
        &self,
        level: usize,
        remaining: Q,
        c: &[Q],
        x: &mut [i64],
        visit: &mut impl FnMut(&[i64]),
    ) {
        if level == 0 {
            visit(x);
            return;
        }
        let i = level - 1;
        // Coordinate i must satisfy diag[i] * (x_i - mid)^2 <= remaining.
        let mut mid = c[i];
        for j in i + 1..x.len() {
            mid -= self.upper[i][j] * (Q::from_integer(x[j] as i128) - c[j]);
        }
        let qi = self.diag[i];
        let fits = |v: i64| {
            let t = Q::from_integer(v as i128) - mid;
            qi * t * t <= remaining
        };
        let start = mid.floor().to_integer() as i64;
        let mut lo = start;
        while fits(lo - 1) {
            lo -= 1;
        }
        let mut hi = start;
        while fits(hi + 1) {
            hi += 1;
        }
        for v in lo..=hi {
            if !fits(v) {
                continue;
            }
            let t = Q::from_integer(v as i128) - mid;
            x[i] = v;
            self.descend(i, remaining - qi * t * t, c, x, visit);
        }
        x[i] = 0;
    }
}

/// Solves `gram * y = rhs` exactly; `gram` must be nonsingular.
pub(crate) fn solve(gram: &[Vec<i64>], rhs: &[i64]) -> Vec<Q> {
    let n = gram.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = gram[i]
                .iter()
                .map(|&v| Q::from_integer(v as i128))
                .collect();
            row.push(Q::from_integer(rhs[i] as i128));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| m[r][col] != Q::from_integer(0))
            .expect("singular system");
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != Q::from_integer(0) {
                let f = m[r][col];
                for k in col..=n {
                    let delta = f * m[col][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n]).collect()
}

/// Unimodular `U` with `row * U = (g, 0, .., 0)`, `g >= 0`. Columns `1..` of
/// `U` span the integer kernel of `row`.
pub(crate) fn kernel_basis(row: &[i64]) -> (i64, Vec<Vec<i64>>) {
    let r = row.len();
    let mut v = row.to_vec();
    let mut cols: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..r).filter(|&i| v[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| v[i].abs()).unwrap();
        for &q in &nonzero {
            if q == p {
                continue;
            }
            let t = v[q].div_euclid(v[p]);
            v[q] -= t * v[p];
            let colp = cols[p].clone();
            for (a, b) in cols[q].iter_mut().zip(&colp) {
                *a -= t * b;
            }
        }
    }
    if let Some(p) = (0..r).find(|&i| v[i] != 0) {
        v.swap(0, p);
        cols.swap(0, p);
        if v[0] < 0 {
            v[0] = -v[0];
            for a in cols[0].iter_mut() {
                *a = -*a;
            }
        }
    }
    (v.first().copied().unwrap_or(0), cols)
}
