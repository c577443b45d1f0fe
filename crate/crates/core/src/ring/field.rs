//! Dense linear algebra over the scalar fields ℚ and 𝔽ₚ.
//!
//! Every supported base ring that admits solving is a finite-dimensional
//! algebra over one of these two fields; higher layers flatten ring elements
//! into coordinate vectors and do all elimination here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Elem;

/// Scalar field used after flattening.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub fn zero(&self) -> Elem {
        match self {
            Field::Rationals => Elem::Q(BigRational::zero()),
            Field::Prime(_) => Elem::Mod(0),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        match self {
            Field::Rationals => Elem::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Elem::Mod(n.rem_euclid(*p as i64) as u64),
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Q(q) => q.is_zero(),
            Elem::Mod(r) => *r == 0,
            _ => unreachable!("non-scalar in field arithmetic"),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(super::rational::add(x, y)),
            (Field::Prime(p), Elem::Mod(x), Elem::Mod(y)) => Elem::Mod(add_mod(*x, *y, *p)),
            _ => unreachable!("field operand mismatch"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Field::Rationals, Elem::Q(x)) => Elem::Q(super::rational::neg(x)),
            (Field::Prime(p), Elem::Mod(x)) => Elem::Mod(if *x == 0 { 0 } else { p - x }),
            _ => unreachable!("field operand mismatch"),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(super::rational::mul(x, y)),
            (Field::Prime(p), Elem::Mod(x), Elem::Mod(y)) => Elem::Mod(mul_mod(*x, *y, *p)),
            _ => unreachable!("field operand mismatch"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        match (self, a) {
            (Field::Rationals, Elem::Q(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Elem::Q(x.recip()))
                }
            }
            (Field::Prime(p), Elem::Mod(x)) => inv_mod(*x, *p).map(Elem::Mod),
            _ => unreachable!("field operand mismatch"),
        }
    }
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse modulo `m` by the extended Euclidean algorithm; `None` when
/// `gcd(a, m) ≠ 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Row-major dense matrix of field scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

impl FMat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> FMat {
        FMat {
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> FMat {
        let mut m = FMat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<Elem>]) -> FMat {
        let mut m = FMat::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row");
            m.data[i * cols..(i + 1) * cols].clone_from_slice(r);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> FMat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        FMat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, field: Field, other: &FMat) -> FMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = FMat::zeros(field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if field.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = field.add(&out.data[idx], &field.mul(a, b));
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, field: Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut out = vec![field.zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !field.is_zero(b) {
                    *o = field.add(o, &field.mul(a, b));
                }
            }
        }
        out
    }
}

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns. Pivots are chosen at the lowest available row index.
pub fn rref(field: Field, m: &mut FMat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !field.is_zero(m.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
        }
        let inv = field.inv(m.get(r, c)).expect("nonzero pivot");
        for j in c..m.cols {
            let v = field.mul(m.get(r, j), &inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r || field.is_zero(m.get(i, c)) {
                continue;
            }
            let f = m.get(i, c).clone();
            for j in c..m.cols {
                if field.is_zero(m.get(r, j)) {
                    continue;
                }
                let v = field.sub(m.get(i, j), &field.mul(&f, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: Field, m: &FMat) -> usize {
    let mut w = m.clone();
    rref(field, &mut w).len()
}

/// Basis (in reduced echelon form) of the span of the given rows.
pub fn row_space(field: Field, cols: usize, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let mut m = FMat::from_rows(field, cols, rows);
    let k = rref(field, &mut m).len();
    (0..k).map(|i| m.row(i).to_vec()).collect()
}

/// Solves `x·m = b` for a row vector `x`; free variables are set to zero.
pub fn solve_left(field: Field, m: &FMat, b: &[Elem]) -> Option<Vec<Elem>> {
    assert_eq!(b.len(), m.cols, "dimension mismatch");
    // Transposed augmented system: mᵀ xᵀ = bᵀ.
    let mut aug = FMat::zeros(field, m.cols, m.rows + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(j, i, m.get(i, j).clone());
        }
    }
    for (j, bj) in b.iter().enumerate() {
        aug.set(j, m.rows, bj.clone());
    }
    let pivots = rref(field, &mut aug);
    if pivots.last() == Some(&m.rows) {
        return None;
    }
    let mut x = vec![field.zero(); m.rows];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, m.rows).clone();
    }
    Some(x)
}

/// Basis of `{x : x·m = 0}`.
pub fn left_kernel(field: Field, m: &FMat) -> Vec<Vec<Elem>> {
    let mut t = m.transpose();
    let pivots = rref(field, &mut t);
    let free: Vec<usize> = (0..m.rows).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![field.zero(); m.rows];
            x[f] = field.one();
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = field.neg(t.get(r, f));
            }
            x
        })
        .collect()
}

pub fn inverse(field: Field, m: &FMat) -> Option<FMat> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let mut aug = FMat::zeros(field, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n + i, field.one());
    }
    let pivots = rref(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut out = FMat::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, aug.get(i, n + j).clone());
        }
    }
    Some(out)
}

/// Determinant by elimination.
pub fn det(field: Field, m: &FMat) -> Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut w = m.clone();
    let mut d = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !field.is_zero(w.get(i, c))) else {
            return field.zero();
        };
        if p != c {
            for j in 0..n {
                w.data.swap(p * n + j, c * n + j);
            }
            d = field.neg(&d);
        }
        let piv = w.get(c, c).clone();
        d = field.mul(&d, &piv);
        let inv = field.inv(&piv).expect("nonzero pivot");
        for i in c + 1..n {
            if field.is_zero(w.get(i, c)) {
                continue;
            }
            let f = field.mul(w.get(i, c), &inv);
            for j in c..n {
                let v = field.sub(w.get(i, j), &field.mul(&f, w.get(c, j)));
                w.set(i, j, v);
            }
        }
    }
    d
}

/// `true` when a rational is an integer.
pub(crate) fn is_integral(q: &BigRational) -> bool {
    q.denom().is_one() || q.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Elem {
        Field::Rationals.from_i64(n)
    }

    #[test]
    fn inverse_mod_matches_brute_force() {
        for m in [5u64, 7, 101] {
            for a in 1..m {
                let b = inv_mod(a, m).unwrap();
                assert_eq!(mul_mod(a, b, m), 1);
            }
        }
        assert_eq!(inv_mod(2, 4), None);
    }

    #[test]
    fn solve_left_rank_defect_has_no_solution() {
        let f = Field::Rationals;
        let m = FMat::from_rows(f, 2, &[vec![q(1), q(0)], vec![q(0), q(0)]]);
        assert_eq!(solve_left(f, &m, &[q(0), q(1)]), None);
    }

    #[test]
    fn left_kernel_annihilates() {
        let f = Field::Prime(7);
        let m = FMat::from_rows(
            f,
            2,
            &[
                vec![f.from_i64(1), f.from_i64(2)],
                vec![f.from_i64(2), f.from_i64(4)],
                vec![f.from_i64(0), f.from_i64(1)],
            ],
        );
        let k = left_kernel(f, &m);
        assert_eq!(k.len(), 1);
        assert!(m.vec_mul(f, &k[0]).iter().all(|x| f.is_zero(x)));
    }

    #[test]
    fn det_of_permutation_is_sign() {
        let f = Field::Rationals;
        let m = FMat::from_rows(f, 2, &[vec![q(0), q(1)], vec![q(1), q(0)]]);
        assert_eq!(det(f, &m), q(-1));
        assert_eq!(inverse(f, &m), Some(m.clone()));
    }
}
