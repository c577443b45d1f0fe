//! Constant matrices over a base ring and linear solving after flattening.

use super::field::{self, FMat, Field};
use super::{Automorphism, Elem, Ring, RingError};

/// Row-major matrix with entries in a base ring. Matrices act on row
/// vectors from the right: `x ↦ x·M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

/// Outcome of [`solve_right_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(Vec<Elem>),
    NoSolution,
}

impl AMat {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> AMat {
        AMat {
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> AMat {
        let mut m = AMat::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> AMat {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        AMat {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// `rows×cols` matrix with `c` on the diagonal.
    pub fn scalar(ring: &Ring, n: usize, c: &Elem) -> AMat {
        let mut m = AMat::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
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

    pub fn is_zero(&self, ring: &Ring) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn is_identity(&self, ring: &Ring) -> bool {
        self.rows == self.cols && *self == AMat::identity(ring, self.rows)
    }

    pub fn add(&self, ring: &Ring, other: &AMat) -> AMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        AMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn neg(&self, ring: &Ring) -> AMat {
        AMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| ring.neg(a)).collect(),
        }
    }

    pub fn sub(&self, ring: &Ring, other: &AMat) -> AMat {
        self.add(ring, &other.neg(ring))
    }

    pub fn mul(&self, ring: &Ring, other: &AMat) -> AMat {
        AMat::mul_sum(ring, &[(self, other)])
    }

    /// `Σ Aₜ·Bₜ` with one normalization per entry.
    pub fn mul_sum(ring: &Ring, terms: &[(&AMat, &AMat)]) -> AMat {
        let (rows, cols) = match terms.first() {
            Some((a, b)) => (a.rows, b.cols),
            None => panic!("empty matrix sum"),
        };
        let mut out = AMat::zeros(ring, rows, cols);
        let mut pairs: Vec<(&Elem, &Elem)> = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                pairs.clear();
                for (a, b) in terms {
                    assert!(a.cols == b.rows && a.rows == rows && b.cols == cols, "dimension mismatch");
                    for k in 0..a.cols {
                        let (x, y) = (a.get(i, k), b.get(k, j));
                        if !ring.is_zero(x) && !ring.is_zero(y) {
                            pairs.push((x, y));
                        }
                    }
                }
                if !pairs.is_empty() {
                    out.data[i * cols + j] = ring.dot(&pairs);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, ring: &Ring, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut out = vec![ring.zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !ring.is_zero(b) {
                    *o = ring.add(o, &ring.mul(a, b));
                }
            }
        }
        out
    }

    /// Entrywise ρᵏ.
    pub fn twist(&self, rho: &Automorphism, k: i64) -> AMat {
        if k == 0 || rho.is_identity() {
            return self.clone();
        }
        AMat {
            rows: self.rows,
            cols: self.cols,
            data: rho.apply_all(k, &self.data),
        }
    }

    pub fn block_diag(ring: &Ring, blocks: &[&AMat]) -> AMat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = AMat::zeros(ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> AMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + cols]);
        }
        AMat { rows, cols, data }
    }

    pub fn transpose(&self) -> AMat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        AMat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

fn need_field(ring: &Ring) -> Result<Field, RingError> {
    ring.field().ok_or_else(|| {
        RingError::Capability(format!("{ring} has no scalar field to solve over"))
    })
}

fn need_solvable(ring: &Ring) -> Result<Field, RingError> {
    if !ring.solvable() {
        return Err(RingError::Capability(format!(
            "linear solving needs a field-flattenable ring, not {ring}"
        )));
    }
    need_field(ring)
}

pub fn flatten_row(ring: &Ring, row: &[Elem]) -> Vec<Elem> {
    row.iter().flat_map(|x| ring.flatten(x)).collect()
}

pub fn unflatten_row(ring: &Ring, v: &[Elem]) -> Option<Vec<Elem>> {
    v.chunks(ring.dim()).map(|c| ring.unflatten(c)).collect()
}

/// Scalar matrix of `x ↦ x·m` on flattened row vectors.
pub fn right_action(ring: &Ring, m: &AMat) -> Result<FMat, RingError> {
    let field = need_field(ring)?;
    let d = ring.dim();
    let basis = ring.basis();
    let mut rows = Vec::with_capacity(m.rows * d);
    for i in 0..m.rows {
        for b in &basis {
            let image: Vec<Elem> = m.row(i).iter().map(|x| ring.mul(b, x)).collect();
            rows.push(flatten_row(ring, &image));
        }
    }
    Ok(FMat::from_rows(field, m.cols * d, &rows))
}

/// Finds `x` with `x·m = b`; deterministic (free coordinates are zero).
pub fn solve_right_linear(ring: &Ring, m: &AMat, b: &[Elem]) -> Result<SolveOutcome, RingError> {
    let field = need_solvable(ring)?;
    let t = right_action(ring, m)?;
    Ok(match field::solve_left(field, &t, &flatten_row(ring, b)) {
        Some(x) => SolveOutcome::Solution(unflatten_row(ring, &x).expect("field coordinates")),
        None => SolveOutcome::NoSolution,
    })
}

/// Solves `X·m = b` row by row.
pub fn solve_rows(ring: &Ring, m: &AMat, b: &AMat) -> Result<Option<AMat>, RingError> {
    let field = need_solvable(ring)?;
    let t = right_action(ring, m)?;
    let mut rows = Vec::with_capacity(b.rows);
    for i in 0..b.rows {
        match field::solve_left(field, &t, &flatten_row(ring, b.row(i))) {
            Some(x) => rows.push(unflatten_row(ring, &x).expect("field coordinates")),
            None => return Ok(None),
        }
    }
    Ok(Some(AMat {
        rows: b.rows,
        cols: m.rows,
        data: rows.into_iter().flatten().collect(),
    }))
}

/// Two-sided inverse of a square matrix over the base ring.
pub fn invert(ring: &Ring, m: &AMat) -> Result<AMat, RingError> {
    if m.rows != m.cols {
        return Err(RingError::NotAUnit(format!("{}×{} matrix is not square", m.rows, m.cols)));
    }
    if m.rows == 1 {
        let x = ring.invert(m.get(0, 0))?;
        return Ok(AMat { rows: 1, cols: 1, data: vec![x] });
    }
    let field = need_field(ring)?;
    let t = right_action(ring, m)?;
    let Some(tinv) = field::inverse(field, &t) else {
        let kernel = field::left_kernel(field, &t);
        let witness = kernel
            .first()
            .and_then(|k| unflatten_row(ring, k))
            .map(|k| {
                let cells: Vec<String> = k.iter().map(|x| ring.display(x)).collect();
                format!("x = [{}] satisfies x·M = 0", cells.join(", "))
            })
            .unwrap_or_else(|| "singular pivot column".into());
        return Err(RingError::NotAUnit(witness));
    };
    let id = AMat::identity(ring, m.rows);
    let mut rows = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let x = tinv.vec_mul(field, &flatten_row(ring, id.row(i)));
        rows.push(unflatten_row(ring, &x).ok_or_else(|| {
            RingError::NotAUnit("inverse exists over ℚ but is not integral".into())
        })?);
    }
    let inv = AMat::from_rows(rows);
    if !m.mul(ring, &inv).is_identity(ring) {
        return Err(RingError::NotAUnit("one-sided inverse only".into()));
    }
    Ok(inv)
}

/// Flattened scalar basis of the left `A`-span of the given rows.
pub fn span_basis(ring: &Ring, cols: usize, rows: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>, RingError> {
    let field = need_solvable(ring)?;
    let basis = ring.basis();
    let mut gens = Vec::with_capacity(rows.len() * basis.len());
    for r in rows {
        for b in &basis {
            let v: Vec<Elem> = r.iter().map(|x| ring.mul(b, x)).collect();
            gens.push(flatten_row(ring, &v));
        }
    }
    Ok(field::row_space(field, cols * ring.dim(), &gens))
}

/// Dimension over the scalar field of the left `A`-span of the rows.
pub fn span_dim(ring: &Ring, cols: usize, rows: &[Vec<Elem>]) -> Result<usize, RingError> {
    Ok(span_basis(ring, cols, rows)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn q(n: i64) -> Elem {
        Elem::Q(rat(n))
    }

    #[test]
    fn solve_examples() {
        let r = Ring::rationals();
        let m = AMat::from_rows(vec![vec![q(2)]]);
        assert_eq!(
            solve_right_linear(&r, &m, &[q(1)]).unwrap(),
            SolveOutcome::Solution(vec![Elem::Q(num_rational::BigRational::new(1.into(), 2.into()))])
        );
        let m = AMat::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(0)]]);
        assert_eq!(solve_right_linear(&r, &m, &[q(0), q(1)]).unwrap(), SolveOutcome::NoSolution);
    }

    #[test]
    fn solve_mod_five() {
        let r = Ring::integers_mod(5).unwrap();
        let e = |n| r.from_i64(n);
        let m = AMat::from_rows(vec![vec![e(2), e(1)], vec![e(1), e(1)]]);
        let b = [e(1), e(0)];
        let SolveOutcome::Solution(x) = solve_right_linear(&r, &m, &b).unwrap() else {
            panic!("expected a solution");
        };
        assert_eq!(x, vec![e(1), e(4)]);
        assert_eq!(m.vec_mul(&r, &x), b.to_vec());
    }

    #[test]
    fn integers_cannot_solve() {
        let r = Ring::integers();
        let m = AMat::identity(&r, 1);
        assert!(matches!(
            solve_right_linear(&r, &m, &[r.one()]),
            Err(RingError::Capability(_))
        ));
    }

    #[test]
    fn matrix_inverse_over_m2() {
        let r = Ring::matrix_ring(2, Ring::rationals()).unwrap();
        let a = Elem::Mat(vec![q(1), q(2), q(0), q(1)]);
        let b = Elem::Mat(vec![q(0), q(1), q(1), q(0)]);
        let m = AMat::from_rows(vec![vec![a.clone(), b.clone()], vec![r.zero(), a]]);
        let inv = invert(&r, &m).unwrap();
        assert!(inv.mul(&r, &m).is_identity(&r));
        let singular = AMat::from_rows(vec![vec![b.clone(), b.clone()], vec![b.clone(), b]]);
        assert!(matches!(invert(&r, &singular), Err(RingError::NotAUnit(_))));
    }
}
