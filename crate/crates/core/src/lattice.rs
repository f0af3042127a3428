//! Picard lattices of rational surfaces and exact divisor-class arithmetic.
//!
//! Two families of lattices are supported:
//!
//! * `Blowup(n)`: the plane blown up in `n` points, basis `L, E1, .., En` with
//!   `L^2 = 1`, `Ei^2 = -1` and canonical class `K = -3L + E1 + .. + En`.
//! * `Hirzebruch { d, blowups }`: the Hirzebruch surface `F_d` blown up in
//!   `blowups` points, basis `F, S, E1, ..` with `F^2 = 0`, `F.S = 1`,
//!   `S^2 = d` and `K = -2S + (d - 2)F + E1 + ..`.
//!
//! Coefficients are `i64`; the workspace builds with overflow checks enabled in
//! every profile so an overflow aborts instead of wrapping.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice rank (the plane blown up in eight points).
pub const MAX_RANK: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PicardLattice {
    /// The plane blown up in `n` points (`n = 0` is the plane itself).
    Blowup(u8),
    /// `F_d` blown up in `blowups` points.
    Hirzebruch { d: u32, blowups: u8 },
}

impl PicardLattice {
    pub const PLANE: PicardLattice = PicardLattice::Blowup(0);

    pub fn blowup(n: usize) -> Result<Self> {
        if n > 8 {
            return Err(Error::UnsupportedLattice(format!(
                "blow-up of the plane in {n} points has non-positive degree"
            )));
        }
        Ok(PicardLattice::Blowup(n as u8))
    }

    pub fn hirzebruch(d: u32) -> Self {
        PicardLattice::Hirzebruch { d, blowups: 0 }
    }

    pub fn hirzebruch_blowup(d: u32, blowups: usize) -> Result<Self> {
        if blowups > 7 {
            return Err(Error::UnsupportedLattice(format!(
                "F{d} blown up in {blowups} points has non-positive degree"
            )));
        }
        Ok(PicardLattice::Hirzebruch {
            d,
            blowups: blowups as u8,
        })
    }

    pub fn rank(&self) -> usize {
        match *self {
            PicardLattice::Blowup(n) => n as usize + 1,
            PicardLattice::Hirzebruch { blowups, .. } => blowups as usize + 2,
        }
    }

    /// Number of exceptional basis vectors `E1, .., En`.
    pub fn exceptional_count(&self) -> usize {
        match *self {
            PicardLattice::Blowup(n) => n as usize,
            PicardLattice::Hirzebruch { blowups, .. } => blowups as usize,
        }
    }

    /// Index of `E1` in the coefficient vector.
    fn first_exceptional(&self) -> usize {
        match self {
            PicardLattice::Blowup(_) => 1,
            PicardLattice::Hirzebruch { .. } => 2,
        }
    }

    /// `K^2`.
    pub fn degree(&self) -> i64 {
        match *self {
            PicardLattice::Blowup(n) => 9 - n as i64,
            PicardLattice::Hirzebruch { blowups, .. } => 8 - blowups as i64,
        }
    }

    /// Intersection number of basis vectors `i` and `j`.
    pub fn form(&self, i: usize, j: usize) -> i64 {
        match *self {
            PicardLattice::Blowup(_) => {
                if i != j {
                    0
                } else if i == 0 {
                    1
                } else {
                    -1
                }
            }
            PicardLattice::Hirzebruch { d, .. } => match (i, j) {
                (0, 0) => 0,
                (0, 1) | (1, 0) => 1,
                (1, 1) => d as i64,
                (a, b) if a == b => -1,
                _ => 0,
            },
        }
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| self.form(i, j)).collect())
            .collect()
    }

    pub fn basis(&self, i: usize) -> DivisorClass {
        assert!(i < self.rank(), "basis index {i} out of range for {self}");
        let mut c = DivisorClass::zero(*self);
        c.coeffs[i] = 1;
        c
    }

    pub fn canonical(&self) -> DivisorClass {
        let mut k = DivisorClass::zero(*self);
        match *self {
            PicardLattice::Blowup(n) => {
                k.coeffs[0] = -3;
                for i in 1..=n as usize {
                    k.coeffs[i] = 1;
                }
            }
            PicardLattice::Hirzebruch { d, blowups } => {
                k.coeffs[0] = d as i64 - 2;
                k.coeffs[1] = -2;
                for i in 0..blowups as usize {
                    k.coeffs[2 + i] = 1;
                }
            }
        }
        k
    }

    /// The exceptional class `Ei` (1-based).
    pub fn exceptional(&self, i: usize) -> Result<DivisorClass> {
        if i == 0 || i > self.exceptional_count() {
            return Err(Error::Parse(format!("E{i} does not exist on {self}")));
        }
        Ok(self.basis(self.first_exceptional() + i - 1))
    }

    /// Coordinates of the class whose pairings with the basis vectors are `pairings`.
    /// The forms in use are unimodular, so this is always integral.
    pub fn coords_from_pairings(&self, pairings: &[i64]) -> DivisorClass {
        let mut c = DivisorClass::zero(*self);
        match *self {
            PicardLattice::Blowup(n) => {
                c.coeffs[0] = pairings[0];
                for i in 1..=n as usize {
                    c.coeffs[i] = -pairings[i];
                }
            }
            PicardLattice::Hirzebruch { d, blowups } => {
                // D = fF + sS: D.F = s, D.S = f + d s.
                let s = pairings[0];
                c.coeffs[1] = s;
                c.coeffs[0] = pairings[1] - d as i64 * s;
                for i in 0..blowups as usize {
                    c.coeffs[2 + i] = -pairings[2 + i];
                }
            }
        }
        c
    }

    fn is_hirzebruch(&self) -> bool {
        matches!(self, PicardLattice::Hirzebruch { .. })
    }
}

impl fmt::Display for PicardLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PicardLattice::Blowup(0) => write!(f, "P2"),
            PicardLattice::Blowup(n) => write!(f, "B{n}"),
            PicardLattice::Hirzebruch { d, blowups: 0 } => write!(f, "F{d}"),
            PicardLattice::Hirzebruch { d, blowups } => write!(f, "F{d}+{blowups}"),
        }
    }
}

impl FromStr for PicardLattice {
    type Err = Error;

    /// Accepts `P2`, `B<n>`, `F<d>` and `F<d>+<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown lattice `{s}`"));
        if s.eq_ignore_ascii_case("p2") {
            return Ok(PicardLattice::PLANE);
        }
        if let Some(rest) = s.strip_prefix(['B', 'b']) {
            let n: usize = rest.parse().map_err(|_| bad())?;
            return PicardLattice::blowup(n);
        }
        if let Some(rest) = s.strip_prefix(['F', 'f']) {
            let (d, n) = match rest.split_once('+') {
                Some((d, n)) => (d, n.parse::<usize>().map_err(|_| bad())?),
                None => (rest, 0),
            };
            let d: u32 = d.parse().map_err(|_| bad())?;
            return PicardLattice::hirzebruch_blowup(d, n);
        }
        Err(bad())
    }
}

/// A divisor class: an integer coefficient vector over the basis of a lattice.
///
/// Ordering is lexicographic on the coefficient vector (after the lattice).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    lattice: PicardLattice,
    coeffs: [i64; MAX_RANK],
}

impl DivisorClass {
    pub fn zero(lattice: PicardLattice) -> Self {
        DivisorClass {
            lattice,
            coeffs: [0; MAX_RANK],
        }
    }

    pub fn new(lattice: PicardLattice, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() != lattice.rank() {
            return Err(Error::Parse(format!(
                "expected {} coefficients for {lattice}, got {}",
                lattice.rank(),
                coeffs.len()
            )));
        }
        let mut c = DivisorClass::zero(lattice);
        c.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(c)
    }

    pub fn lattice(&self) -> PicardLattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs[..self.lattice.rank()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Intersection number; panics if the lattices differ.
    pub fn dot(&self, other: &DivisorClass) -> i64 {
        assert_eq!(self.lattice, other.lattice, "intersection across lattices");
        match self.lattice {
            PicardLattice::Blowup(n) => {
                let mut s = self.coeffs[0] * other.coeffs[0];
                for i in 1..=n as usize {
                    s -= self.coeffs[i] * other.coeffs[i];
                }
                s
            }
            PicardLattice::Hirzebruch { d, blowups } => {
                let (f, s) = (self.coeffs[0], self.coeffs[1]);
                let (f2, s2) = (other.coeffs[0], other.coeffs[1]);
                let mut v = f * s2 + s * f2 + d as i64 * s * s2;
                for i in 2..2 + blowups as usize {
                    v -= self.coeffs[i] * other.coeffs[i];
                }
                v
            }
        }
    }

    pub fn square(&self) -> i64 {
        self.dot(self)
    }

    /// `D . K`.
    pub fn k_degree(&self) -> i64 {
        self.dot(&self.lattice.canonical())
    }

    /// `D . (-K)`.
    pub fn anticanonical_degree(&self) -> i64 {
        -self.k_degree()
    }

    /// The value of `D` for the `i`-th basis coordinate.
    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i]
    }

    /// Returns `r` if this class is an `r`-class.
    pub fn r_value(&self) -> Option<i64> {
        is_numerically_left_orthogonal(self).then(|| self.square())
    }
}

pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
    if a.lattice != b.lattice {
        return Err(Error::LatticeMismatch(a.lattice, b.lattice));
    }
    Ok(a.dot(b))
}

/// Riemann-Roch: `chi(D) = 1 + D.(D - K) / 2`.
pub fn euler_char(d: &DivisorClass) -> i64 {
    let k = d.lattice.canonical();
    let v = d.dot(&(*d - k));
    debug_assert!(v % 2 == 0, "D.(D-K) is even on these lattices");
    1 + v / 2
}

/// `D^2 + 2 = -D.K`, i.e. `chi(-D) = 0`.
pub fn is_numerically_left_orthogonal(d: &DivisorClass) -> bool {
    d.square() + 2 == -d.k_degree()
}

pub fn is_r_class(d: &DivisorClass, r: i64) -> bool {
    d.square() == r && d.k_degree() == -r - 2
}

/// `-K - D`, an `r'`-class with `r + r' = K^2 - 4`.
pub fn dual_class(d: &DivisorClass) -> Result<DivisorClass> {
    if !is_numerically_left_orthogonal(d) {
        return Err(Error::NotRClass(d.to_string()));
    }
    Ok(-d.lattice.canonical() - *d)
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(mut self, rhs: DivisorClass) -> DivisorClass {
        self += rhs;
        self
    }
}

impl AddAssign for DivisorClass {
    fn add_assign(&mut self, rhs: DivisorClass) {
        assert_eq!(self.lattice, rhs.lattice, "addition across lattices");
        for i in 0..MAX_RANK {
            self.coeffs[i] += rhs.coeffs[i];
        }
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(mut self, rhs: DivisorClass) -> DivisorClass {
        self -= rhs;
        self
    }
}

impl SubAssign for DivisorClass {
    fn sub_assign(&mut self, rhs: DivisorClass) {
        assert_eq!(self.lattice, rhs.lattice, "subtraction across lattices");
        for i in 0..MAX_RANK {
            self.coeffs[i] -= rhs.coeffs[i];
        }
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(mut self) -> DivisorClass {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, mut rhs: DivisorClass) -> DivisorClass {
        for c in rhs.coeffs.iter_mut() {
            *c *= self;
        }
        rhs
    }
}

impl std::iter::Sum for DivisorClass {
    /// Panics on an empty iterator: the lattice would be unknown.
    fn sum<I: Iterator<Item = DivisorClass>>(mut iter: I) -> DivisorClass {
        let first = iter.next().expect("sum of an empty class sequence");
        iter.fold(first, |a, b| a + b)
    }
}

fn symbol_names(lattice: PicardLattice) -> Vec<String> {
    let mut names = Vec::with_capacity(lattice.rank());
    if lattice.is_hirzebruch() {
        names.push("F".to_string());
        names.push("S".to_string());
    } else {
        names.push("L".to_string());
    }
    for i in 1..=lattice.exceptional_count() {
        names.push(format!("E{i}"));
    }
    names
}

/// Canonical text form, e.g. `2L - 2E1 - E4 - E5 - E7`. Zero prints as `0`.
/// Serialized as its display string; reading it back needs the lattice, see
/// [`DivisorClass::parse`].
impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = symbol_names(self.lattice);
        let mut first = true;
        for (c, name) in self.coeffs().iter().zip(&names) {
            let c = *c;
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{a}{name}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self, self.lattice)
    }
}

impl DivisorClass {
    /// Vector form `[a, b1, .., bn]`.
    pub fn to_vector_string(&self) -> String {
        let parts: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Compact shorthand: `L_{145}`, `E_{12}`, `2L-E_{11457}`, `-L_{345}`,
    /// `E_{3}-E_{6}`. Repeated indices stand for repeated summands.
    /// Falls back to the canonical text form on Hirzebruch lattices.
    pub fn shorthand(&self) -> String {
        let PicardLattice::Blowup(n) = self.lattice else {
            return self.to_string();
        };
        if self.is_zero() {
            return "0".to_string();
        }
        let a = self.coeffs[0];
        let mut pos = String::new();
        let mut neg = String::new();
        for i in 1..=n as usize {
            let b = self.coeffs[i];
            let digit = char::from_digit(i as u32, 10).unwrap();
            for _ in 0..b.abs() {
                if b > 0 {
                    pos.push(digit);
                } else {
                    neg.push(digit);
                }
            }
        }
        if a == 1 && pos.is_empty() && !neg.is_empty() {
            return format!("L_{{{neg}}}");
        }
        if a == -1 && neg.is_empty() && !pos.is_empty() {
            return format!("-L_{{{pos}}}");
        }
        let mut out = String::new();
        match a {
            0 => {}
            1 => out.push('L'),
            -1 => out.push_str("-L"),
            _ => out.push_str(&format!("{a}L")),
        }
        if !pos.is_empty() {
            if !out.is_empty() {
                out.push('+');
            }
            out.push_str(&format!("E_{{{pos}}}"));
        }
        if !neg.is_empty() {
            out.push_str(&format!("-E_{{{neg}}}"));
        }
        out
    }

    /// Parses a class over `lattice`.
    ///
    /// Accepts the vector form `[a, b1, ..]` and linear expressions over the
    /// symbols `L, E<i>, F, S, B, K, Z` with integer coefficients and
    /// parentheses. Shorthand: `E123 = E1+E2+E3`, `L123 = L-E123`, with an
    /// optional `_{..}` around the digits. `B = S - dF` on Hirzebruch lattices
    /// and `Z = 2L - E123456` on blow-ups of at least six points.
    pub fn parse(lattice: PicardLattice, text: &str) -> Result<DivisorClass> {
        let t = text.trim();
        if t.starts_with('[') {
            return parse_vector(lattice, t);
        }
        let mut p = ExprParser {
            lattice,
            chars: t.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let v = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("trailing input in `{text}`")));
        }
        Ok(v)
    }
}

fn parse_vector(lattice: PicardLattice, t: &str) -> Result<DivisorClass> {
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("malformed vector `{t}`")))?;
    let coeffs = inner
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer `{s}` in `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    DivisorClass::new(lattice, &coeffs)
}

struct ExprParser {
    lattice: PicardLattice,
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        let text: String = self.chars.iter().collect();
        Error::Parse(format!("{msg} at offset {} in `{text}`", self.pos))
    }

    fn expr(&mut self) -> Result<DivisorClass> {
        let mut acc = DivisorClass::zero(self.lattice);
        let mut sign = 1;
        match self.peek() {
            Some('-') => {
                sign = -1;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc += sign * t;
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn integer(&mut self) -> Option<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .ok()
    }

    fn term(&mut self) -> Result<DivisorClass> {
        let coeff = self.integer();
        if coeff.is_some() && self.peek() == Some('*') {
            self.pos += 1;
        }
        match (coeff, self.peek()) {
            (Some(0), None | Some('+') | Some('-') | Some(')')) => {
                return Ok(DivisorClass::zero(self.lattice));
            }
            (Some(_), None | Some('+') | Some('-') | Some(')')) => {
                return Err(self.err("bare integer is not a divisor class"));
            }
            _ => {}
        }
        let f = self.factor()?;
        Ok(coeff.unwrap_or(1) * f)
    }

    fn index_digits(&mut self) -> Result<Vec<usize>> {
        let braced = self.peek() == Some('_');
        if braced {
            self.pos += 1;
            if self.peek() != Some('{') {
                return Err(self.err("expected `{` after `_`"));
            }
            self.pos += 1;
        }
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            match c.to_digit(10) {
                Some(d) => {
                    out.push(d as usize);
                    self.pos += 1;
                }
                None if braced && c == ',' => self.pos += 1,
                None => break,
            }
        }
        if braced {
            if self.peek() != Some('}') {
                return Err(self.err("expected `}`"));
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn exceptional_sum(&self, idx: &[usize]) -> Result<DivisorClass> {
        let mut acc = DivisorClass::zero(self.lattice);
        for &i in idx {
            acc += self.lattice.exceptional(i)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DivisorClass> {
        let c = self
            .peek()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        let lat = self.lattice;
        match c {
            '(' => {
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            'K' => Ok(lat.canonical()),
            'L' if !lat.is_hirzebruch() => {
                let idx = self.index_digits()?;
                Ok(lat.basis(0) - self.exceptional_sum(&idx)?)
            }
            'E' => {
                let idx = self.index_digits()?;
                if idx.is_empty() {
                    return Err(self.err("`E` needs an index"));
                }
                self.exceptional_sum(&idx)
            }
            'F' if lat.is_hirzebruch() => Ok(lat.basis(0)),
            'S' if lat.is_hirzebruch() => Ok(lat.basis(1)),
            'B' if lat.is_hirzebruch() => {
                let PicardLattice::Hirzebruch { d, .. } = lat else {
                    unreachable!()
                };
                Ok(lat.basis(1) - (d as i64) * lat.basis(0))
            }
            'Z' if matches!(lat, PicardLattice::Blowup(n) if n >= 6) => {
                Ok(2 * lat.basis(0) - self.exceptional_sum(&[1, 2, 3, 4, 5, 6])?)
            }
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("unknown symbol `{c}` for lattice {lat}")))
            }
        }
    }
}

/// A linear map between Picard lattices, given by the images of the source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    pub source: PicardLattice,
    pub target: PicardLattice,
    /// `columns[i]` is the image of the `i`-th source basis vector.
    pub columns: Vec<DivisorClass>,
}

impl LatticeMap {
    pub fn new(
        source: PicardLattice,
        target: PicardLattice,
        columns: Vec<DivisorClass>,
    ) -> Result<Self> {
        if columns.len() != source.rank() || columns.iter().any(|c| c.lattice() != target) {
            return Err(Error::UnsupportedLattice(format!(
                "malformed map {source} -> {target}"
            )));
        }
        Ok(LatticeMap {
            source,
            target,
            columns,
        })
    }

    pub fn apply(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.lattice() != self.source {
            return Err(Error::LatticeMismatch(d.lattice(), self.source));
        }
        let mut out = DivisorClass::zero(self.target);
        for (c, col) in d.coeffs().iter().zip(&self.columns) {
            out += *c * *col;
        }
        Ok(out)
    }

    /// `<phi x, phi y> = <x, y>` on all basis pairs.
    pub fn preserves_form(&self) -> bool {
        let r = self.source.rank();
        (0..r).all(|i| {
            (0..r).all(|j| self.columns[i].dot(&self.columns[j]) == self.source.form(i, j))
        })
    }

    pub fn preserves_canonical(&self) -> bool {
        self.apply(&self.source.canonical())
            .map(|k| k == self.target.canonical())
            .unwrap_or(false)
    }
}

/// The isometry from the plane blown up in `n + 1` points onto `F_d` blown up
/// in `n` points, `d = 2m + 1`:
/// `L -> B + (m+1)F`, `E'_0 -> B + mF`, `E'_i -> E_i` where `B = S - dF`.
///
/// Source basis is `L, E'_0, E'_1, .., E'_n` (so `E'_0` is the source's `E1`).
pub fn hirzebruch_isometry(d: u32, n: usize) -> Result<LatticeMap> {
    if d % 2 == 0 {
        return Err(Error::UnsupportedLattice(format!(
            "no blow-up coordinates for F{d}: even Hirzebruch surfaces are terminal"
        )));
    }
    let m = (d as i64 - 1) / 2;
    let source = PicardLattice::blowup(n + 1)?;
    let target = PicardLattice::hirzebruch_blowup(d, n)?;
    let f = target.basis(0);
    let b = target.basis(1) - (d as i64) * f;
    let mut columns = vec![b + (m + 1) * f, b + m * f];
    for i in 1..=n {
        columns.push(target.exceptional(i)?);
    }
    LatticeMap::new(source, target, columns)
}
