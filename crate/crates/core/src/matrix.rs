//! Matrices over the twisted rings, stored as coefficient matrices
//! `M = Σ zʲMⱼ` with `Mⱼ` over `A`. Matrices act on row vectors, so the
//! product rule is `(MB)_d = Σ_{i+j=d} ρʲ(Mᵢ)·Bⱼ`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ring::linalg;
use crate::ring::{AMat, RingError};
use crate::series::{Ctx, Flavor, Prec, Series, SeriesError, WittVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("flavor error: {0}")]
    Flavor(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedMatrix {
    ctx: Ctx,
    flavor: Flavor,
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<i64, AMat>,
    prec: Prec,
}

impl TwistedMatrix {
    pub fn zeros(ctx: &Ctx, flavor: Flavor, rows: usize, cols: usize, prec: Prec) -> TwistedMatrix {
        TwistedMatrix {
            ctx: ctx.clone(),
            flavor,
            rows,
            cols,
            coeffs: BTreeMap::new(),
            prec: if flavor.is_exact() { Prec::Infinite } else { prec },
        }
    }

    pub fn identity(ctx: &Ctx, flavor: Flavor, n: usize, prec: Prec) -> TwistedMatrix {
        TwistedMatrix::constant(ctx, flavor, &AMat::identity(&ctx.ring, n), prec)
    }

    pub fn constant(ctx: &Ctx, flavor: Flavor, m: &AMat, prec: Prec) -> TwistedMatrix {
        TwistedMatrix::from_coeffs(ctx, flavor, m.rows, m.cols, prec, [(0, m.clone())])
    }

    /// Builds `Σ zᵈ·M_d`; repeated degrees are summed.
    pub fn from_coeffs(
        ctx: &Ctx,
        flavor: Flavor,
        rows: usize,
        cols: usize,
        prec: Prec,
        terms: impl IntoIterator<Item = (i64, AMat)>,
    ) -> TwistedMatrix {
        let mut out = TwistedMatrix::zeros(ctx, flavor, rows, cols, prec);
        for (d, m) in terms {
            assert!(m.rows == rows && m.cols == cols, "coefficient has the wrong shape");
            assert!(d >= 0 || flavor.allows_negative(), "negative degree in {}", flavor.name());
            if out.prec.covers(d) {
                out.add_at(d, &m);
            }
        }
        out
    }

    /// Builds a matrix from a grid of series. The flavor is the join of the
    /// entry flavors (at least `flavor`) and the precision is the minimum.
    pub fn from_entries(
        ctx: &Ctx,
        flavor: Flavor,
        rows: usize,
        cols: usize,
        entries: &[Vec<Series>],
    ) -> Result<TwistedMatrix, MatrixError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension(format!("expected a {rows}×{cols} grid")));
        }
        let mut fl = flavor;
        let mut prec = Prec::Infinite;
        for e in entries.iter().flatten() {
            if e.ctx() != ctx {
                return Err(SeriesError::ContextMismatch("matrix entries over different contexts".into()).into());
            }
            fl = fl.join(e.flavor());
            prec = prec.min(e.prec());
        }
        if fl.is_exact() && prec != Prec::Infinite {
            fl = fl.inexact();
        }
        let ring = &ctx.ring;
        let mut coeffs: BTreeMap<i64, AMat> = BTreeMap::new();
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                for (d, c) in e.terms() {
                    if !prec.covers(d) {
                        continue;
                    }
                    coeffs
                        .entry(d)
                        .or_insert_with(|| AMat::zeros(ring, rows, cols))
                        .set(i, j, c.clone());
                }
            }
        }
        coeffs.retain(|_, m| !m.is_zero(ring));
        Ok(TwistedMatrix {
            ctx: ctx.clone(),
            flavor: fl,
            rows,
            cols,
            coeffs,
            prec,
        })
    }

    fn add_at(&mut self, d: i64, m: &AMat) {
        let ring = &self.ctx.ring;
        let v = match self.coeffs.get(&d) {
            Some(x) => x.add(ring, m),
            None => m.clone(),
        };
        if v.is_zero(ring) {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, v);
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &AMat)> {
        self.coeffs.iter().map(|(d, m)| (*d, m))
    }

    pub fn coeff(&self, d: i64) -> AMat {
        self.coeffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| AMat::zeros(&self.ctx.ring, self.rows, self.cols))
    }

    pub fn coeff_ref(&self, d: i64) -> Option<&AMat> {
        self.coeffs.get(&d)
    }

    pub fn lower(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn upper(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn valuation(&self) -> Prec {
        match self.lower() {
            Some(d) => Prec::Finite(d),
            None => self.prec,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> Series {
        let terms = self.coeffs.iter().map(|(d, m)| (*d, m.get(i, j).clone()));
        Series::from_coeffs(&self.ctx, self.flavor, self.prec, terms)
    }

    pub fn entries(&self) -> Vec<Vec<Series>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn promote(&self, flavor: Flavor) -> TwistedMatrix {
        let mut m = self.clone();
        m.flavor = self.flavor.join(flavor);
        m
    }

    fn check_same(&self, other: &TwistedMatrix) -> Result<(), MatrixError> {
        if self.ctx != other.ctx {
            return Err(SeriesError::ContextMismatch("matrices over different contexts".into()).into());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TwistedMatrix) -> Result<TwistedMatrix, MatrixError> {
        self.check_same(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Dimension(format!(
                "{}×{} + {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &TwistedMatrix) -> Result<TwistedMatrix, MatrixError> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &TwistedMatrix) -> TwistedMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols, "dimension mismatch in add");
        let flavor = self.flavor.join(other.flavor);
        let prec = self.prec.min(other.prec);
        let mut out = TwistedMatrix::zeros(&self.ctx, flavor, self.rows, self.cols, prec);
        out.prec = prec;
        for (d, m) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if prec.covers(*d) {
                out.add_at(*d, m);
            }
        }
        out
    }

    pub fn neg(&self) -> TwistedMatrix {
        let ring = &self.ctx.ring;
        let mut out = self.clone();
        for m in out.coeffs.values_mut() {
            *m = m.neg(ring);
        }
        out
    }

    pub fn sub(&self, other: &TwistedMatrix) -> TwistedMatrix {
        self.add(&other.neg())
    }

    pub fn product_prec(&self, other: &TwistedMatrix) -> Prec {
        let a = match (self.prec, other.valuation()) {
            (Prec::Finite(n), Prec::Finite(v)) => Prec::Finite(n + v),
            _ => Prec::Infinite,
        };
        let b = match (other.prec, self.valuation()) {
            (Prec::Finite(n), Prec::Finite(v)) => Prec::Finite(n + v),
            _ => Prec::Infinite,
        };
        a.min(b)
    }

    pub fn mul(&self, other: &TwistedMatrix) -> TwistedMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let ring = &self.ctx.ring;
        let rho = &self.ctx.rho;
        let flavor = self.flavor.join(other.flavor);
        let prec = self.product_prec(other);
        // ρʲ(mᵢ) for every right degree j in use
        let twisted: BTreeMap<(i64, i64), AMat> = if rho.is_identity() {
            BTreeMap::new()
        } else {
            other
                .coeffs
                .keys()
                .flat_map(|&j| self.coeffs.iter().map(move |(&i, m)| ((i, j), m)))
                .map(|((i, j), m)| ((i, j), m.twist(rho, j)))
                .collect()
        };
        let mut by_degree: BTreeMap<i64, Vec<(&AMat, &AMat)>> = BTreeMap::new();
        for (&j, b) in &other.coeffs {
            for (&i, m) in &self.coeffs {
                let d = i + j;
                if !prec.covers(d) {
                    break;
                }
                let m = twisted.get(&(i, j)).unwrap_or(m);
                by_degree.entry(d).or_default().push((m, b));
            }
        }
        let mut acc: BTreeMap<i64, AMat> = by_degree
            .into_iter()
            .map(|(d, terms)| (d, AMat::mul_sum(ring, &terms)))
            .collect();
        acc.retain(|_, m| !m.is_zero(ring));
        TwistedMatrix {
            ctx: self.ctx.clone(),
            flavor,
            rows: self.rows,
            cols: other.cols,
            coeffs: acc,
            prec: if flavor.is_exact() { Prec::Infinite } else { prec },
        }
    }

    /// `zᵏ·M`.
    pub fn shift(&self, k: i64) -> Result<TwistedMatrix, MatrixError> {
        if !self.flavor.allows_negative() && self.lower().is_some_and(|d| d + k < 0) {
            return Err(MatrixError::Flavor(format!("shift by {k} leaves {}", self.flavor.name())));
        }
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|(d, m)| (d + k, m.clone())).collect();
        out.prec = self.prec.plus(k);
        Ok(out)
    }

    /// Truncates to `min(n, precision)`; exact flavors become series flavors.
    pub fn truncate_to(&self, n: i64) -> TwistedMatrix {
        let n = match self.prec {
            Prec::Finite(p) => p.min(n),
            Prec::Infinite => n,
        };
        let mut out = self.clone();
        out.coeffs = self.coeffs.range(..n).map(|(d, m)| (*d, m.clone())).collect();
        out.prec = Prec::Finite(n);
        out.flavor = self.flavor.inexact();
        out
    }

    /// Entrywise ρᵏ on every coefficient.
    pub fn twist(&self, k: i64) -> TwistedMatrix {
        let mut out = self.clone();
        for m in out.coeffs.values_mut() {
            *m = m.twist(&self.ctx.rho, k);
        }
        out
    }

    /// Coefficient agreement below degree `n`.
    pub fn eq_below(&self, other: &TwistedMatrix, n: i64) -> bool {
        let ring = &self.ctx.ring;
        let degs: std::collections::BTreeSet<i64> = self
            .coeffs
            .range(..n)
            .chain(other.coeffs.range(..n))
            .map(|(d, _)| *d)
            .collect();
        degs.into_iter().all(|d| match (self.coeffs.get(&d), other.coeffs.get(&d)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(ring),
            (None, None) => true,
        })
    }

    /// Agreement on the common known window.
    pub fn eq_at_common_prec(&self, other: &TwistedMatrix) -> bool {
        match self.prec.min(other.prec) {
            Prec::Finite(n) => self.eq_below(other, n),
            Prec::Infinite => self.coeffs == other.coeffs,
        }
    }

    /// `true` when `M ≡ 1` on the known window.
    pub fn is_identity(&self) -> bool {
        let ring = &self.ctx.ring;
        self.is_square()
            && self.coeffs.len() == 1
            && self.coeffs.get(&0).is_some_and(|m| m.is_identity(ring))
    }

    pub fn block_diag(blocks: &[&TwistedMatrix]) -> TwistedMatrix {
        let first = blocks.first().expect("at least one block");
        let ctx = first.ctx.clone();
        let ring = &ctx.ring;
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let flavor = blocks.iter().fold(first.flavor, |f, b| f.join(b.flavor));
        let prec = blocks.iter().map(|b| b.prec).min().unwrap_or(Prec::Infinite);
        let degs: std::collections::BTreeSet<i64> =
            blocks.iter().flat_map(|b| b.coeffs.keys().copied()).collect();
        let terms = degs.into_iter().map(|d| {
            let parts: Vec<AMat> = blocks.iter().map(|b| b.coeff(d)).collect();
            let refs: Vec<&AMat> = parts.iter().collect();
            (d, AMat::block_diag(ring, &refs))
        });
        let mut out = TwistedMatrix::from_coeffs(&ctx, flavor, rows, cols, prec, terms);
        out.prec = if flavor.is_exact() { Prec::Infinite } else { prec };
        out
    }

    pub fn submatrix(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> TwistedMatrix {
        let ring = &self.ctx.ring;
        let mut out = self.clone();
        out.rows = rows;
        out.cols = cols;
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(d, m)| (*d, m.submatrix(r0, rows, c0, cols)))
            .filter(|(_, m)| !m.is_zero(ring))
            .collect();
        out
    }

    /// Left multiplication by a constant matrix.
    pub fn left_const(&self, c: &AMat) -> TwistedMatrix {
        TwistedMatrix::constant(&self.ctx, self.flavor, c, Prec::Infinite).mul(self)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_const(&self, c: &AMat) -> TwistedMatrix {
        self.mul(&TwistedMatrix::constant(&self.ctx, self.flavor, c, Prec::Infinite))
    }

    pub fn display(&self) -> String {
        self.entries()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|s| s.display()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A matrix together with a two-sided inverse verified below `verified_to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertiblePair {
    pub alpha: TwistedMatrix,
    pub beta: TwistedMatrix,
    pub verified_to: Prec,
}

impl InvertiblePair {
    /// Checks `αβ = βα = 1` on the largest window both products determine.
    pub fn verified(alpha: TwistedMatrix, beta: TwistedMatrix) -> Result<InvertiblePair, MatrixError> {
        if !alpha.is_square() || alpha.rows != beta.rows || beta.rows != beta.cols {
            return Err(MatrixError::Dimension("inverse pair must be square and of equal size".into()));
        }
        let ab = alpha.try_mul(&beta)?;
        let ba = beta.try_mul(&alpha)?;
        let id = TwistedMatrix::identity(alpha.ctx(), alpha.flavor(), alpha.rows, Prec::Infinite);
        let prec = ab.prec().min(ba.prec());
        for (name, p) in [("αβ", &ab), ("βα", &ba)] {
            if !p.eq_at_common_prec(&id) {
                let d = (p.lower().unwrap_or(0)..)
                    .find(|&d| p.coeff(d) != id.coeff(d))
                    .unwrap_or(0);
                return Err(MatrixError::NotInvertible(format!(
                    "{name} differs from 1 at degree {d}"
                )));
            }
        }
        Ok(InvertiblePair {
            alpha,
            beta,
            verified_to: prec,
        })
    }

    /// As [`InvertiblePair::verified`], requiring agreement below `n`.
    pub fn new(alpha: TwistedMatrix, beta: TwistedMatrix, n: i64) -> Result<InvertiblePair, MatrixError> {
        let pair = InvertiblePair::verified(alpha, beta)?;
        if !pair.verified_to.covers(n - 1) {
            return Err(MatrixError::Precision(format!(
                "inverse verified only below degree {}, {n} requested",
                pair.verified_to
            )));
        }
        Ok(pair)
    }

    pub fn n(&self) -> usize {
        self.alpha.rows
    }

    pub fn ctx(&self) -> &Ctx {
        self.alpha.ctx()
    }

    /// `(βα', α'β)` style composition: the pair of `self.alpha · other.alpha`.
    pub fn compose(&self, other: &InvertiblePair) -> Result<InvertiblePair, MatrixError> {
        let a = self.alpha.try_mul(&other.alpha)?;
        let b = other.beta.try_mul(&self.beta)?;
        InvertiblePair::verified(a, b)
    }

    pub fn inverse(&self) -> InvertiblePair {
        InvertiblePair {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            verified_to: self.verified_to,
        }
    }
}

fn need_power_series(m: &TwistedMatrix, what: &str) -> Result<(), MatrixError> {
    if m.flavor().allows_negative() && m.lower().is_some_and(|d| d < 0) {
        return Err(MatrixError::Flavor(format!("{what} needs a matrix over A_ρ[[z]]")));
    }
    Ok(())
}

/// Inverse over `A_ρ[[z]]`, which exists exactly when the constant term is
/// invertible over `A`.
pub fn invert_series_matrix(m: &TwistedMatrix, n: i64) -> Result<InvertiblePair, MatrixError> {
    need_power_series(m, "series inversion")?;
    if !m.is_square() {
        return Err(MatrixError::Dimension("series inversion needs a square matrix".into()));
    }
    let ctx = m.ctx().clone();
    let ring = &ctx.ring;
    let rho = &ctx.rho;
    let m0 = m.coeff(0);
    let b0 = linalg::invert(ring, &m0).map_err(|e| {
        MatrixError::NotInvertible(format!("constant term is singular over A ({e})"))
    })?;
    let n = match m.prec() {
        Prec::Finite(p) => p.min(n),
        Prec::Infinite => n,
    };
    let mut b: Vec<AMat> = vec![b0.clone()];
    for d in 1..n.max(1) {
        let twisted: Vec<(AMat, usize)> = m
            .terms()
            .filter(|&(i, _)| (1..=d).contains(&i))
            .map(|(i, mi)| (mi.twist(rho, d - i), (d - i) as usize))
            .collect();
        if twisted.is_empty() {
            b.push(AMat::zeros(ring, m.rows, m.rows));
            continue;
        }
        let terms: Vec<(&AMat, &AMat)> = twisted.iter().map(|(t, j)| (t, &b[*j])).collect();
        let acc = AMat::mul_sum(ring, &terms);
        b.push(b0.twist(rho, d).mul(ring, &acc).neg(ring));
    }
    let flavor = Flavor::PowerSeries;
    let beta = TwistedMatrix::from_coeffs(
        &ctx,
        flavor,
        m.rows,
        m.rows,
        Prec::Finite(n),
        b.into_iter().enumerate().map(|(d, x)| (d as i64, x)),
    );
    let alpha = m.promote(flavor).truncate_to(n);
    // exact recursion: β is a two-sided inverse below n by construction
    Ok(InvertiblePair {
        alpha,
        beta,
        verified_to: Prec::Finite(n),
    })
}

/// `row[target] ← row[target] + factor·row[source]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowOp {
    pub target: usize,
    pub source: usize,
    pub factor: Series,
}

impl RowOp {
    /// Elementary matrix of the operation (acting by left multiplication).
    pub fn matrix(&self, n: usize) -> TwistedMatrix {
        let ctx = self.factor.ctx();
        let mut grid: Vec<Vec<Series>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Series::one(ctx, Flavor::PowerSeries, self.factor.prec())
                        } else {
                            Series::zero(ctx, Flavor::PowerSeries, self.factor.prec())
                        }
                    })
                    .collect()
            })
            .collect();
        grid[self.target][self.source] = self.factor.clone();
        TwistedMatrix::from_entries(ctx, Flavor::PowerSeries, n, n, &grid).expect("square grid")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularizationCert {
    pub gamma: TwistedMatrix,
    pub ops: Vec<RowOp>,
    pub diag: Vec<WittVector>,
    pub prec: i64,
}

impl TriangularizationCert {
    /// Applies the recorded operations to `b`, truncated at the certificate
    /// precision.
    pub fn replay(&self, b: &TwistedMatrix) -> TwistedMatrix {
        let mut grid: Vec<Vec<Series>> = b
            .truncate_to(self.prec)
            .entries()
            .into_iter()
            .map(|r| r.into_iter().map(|s| s.truncate_to(self.prec)).collect())
            .collect();
        for op in &self.ops {
            apply_row_op(&mut grid, op, self.prec);
        }
        TwistedMatrix::from_entries(b.ctx(), Flavor::PowerSeries, b.rows(), b.cols(), &grid)
            .expect("replayed grid keeps its shape")
    }

    /// Ordered diagonal product `w₁·w₂·…·wₙ`.
    pub fn diag_product(&self) -> WittVector {
        let ctx = self.gamma.ctx();
        self.diag
            .iter()
            .fold(WittVector::one(ctx, self.prec), |acc, w| acc.mul(w))
    }

    /// `true` when γ is upper triangular with Witt diagonal.
    pub fn gamma_is_triangular(&self) -> bool {
        let ring = &self.gamma.ctx().ring;
        let n = self.gamma.rows();
        let c0 = self.gamma.coeff(0);
        if !c0.is_identity(ring) {
            return false;
        }
        self.gamma
            .terms()
            .all(|(_, m)| (0..n).all(|i| (0..i).all(|j| ring.is_zero(m.get(i, j)))))
    }
}

fn apply_row_op(grid: &mut [Vec<Series>], op: &RowOp, n: i64) {
    let src = grid[op.source].clone();
    for (c, s) in src.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let t = op.factor.mul(s).truncate_to(n);
        grid[op.target][c] = grid[op.target][c].add(&t).truncate_to(n);
    }
}

/// Reduces `B` (constant term 1) to upper triangular form by adding left
/// multiples of pivot rows, columns left to right.
pub fn witt_triangularize(b: &TwistedMatrix, n: i64) -> Result<TriangularizationCert, MatrixError> {
    need_power_series(b, "triangularization")?;
    let ring = b.ctx().ring.clone();
    if !b.is_square() {
        return Err(MatrixError::Dimension("triangularization needs a square matrix".into()));
    }
    if !b.coeff(0).is_identity(&ring) {
        return Err(MatrixError::Precondition(
            "constant term must be the identity; factor B = B₀·(B₀⁻¹B) first".into(),
        ));
    }
    let n = match b.prec() {
        Prec::Finite(p) => p.min(n),
        Prec::Infinite => n,
    };
    let size = b.rows();
    let mut grid: Vec<Vec<Series>> = b
        .truncate_to(n)
        .entries()
        .into_iter()
        .map(|r| r.into_iter().map(|s| s.with_flavor(Flavor::PowerSeries).expect("nonnegative")).collect())
        .collect();
    let mut ops = Vec::new();
    for j in 0..size {
        let pivot_inv = grid[j][j].invert(n)?;
        for i in (j + 1)..size {
            if grid[i][j].is_zero() {
                continue;
            }
            let factor = grid[i][j].mul(&pivot_inv).truncate_to(n).neg();
            let op = RowOp {
                target: i,
                source: j,
                factor,
            };
            apply_row_op(&mut grid, &op, n);
            debug_assert!(grid[i][j].is_zero());
            ops.push(op);
        }
    }
    let gamma = TwistedMatrix::from_entries(b.ctx(), Flavor::PowerSeries, size, size, &grid)?;
    let diag = (0..size)
        .map(|i| WittVector::new(grid[i][i].truncate_to(n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TriangularizationCert {
        gamma,
        ops,
        diag,
        prec: n,
    })
}

/// `(M₀, M₀⁻¹·M)`: the augmentation part and the torsion relative to it.
pub fn relative_f_torsion(m: &TwistedMatrix, n: i64) -> Result<(AMat, TwistedMatrix), MatrixError> {
    need_power_series(m, "relative torsion")?;
    let ring = &m.ctx().ring;
    let m0 = m.coeff(0);
    let inv = linalg::invert(ring, &m0)
        .map_err(|e| MatrixError::NotInvertible(format!("constant term is singular ({e})")))?;
    let rel = m.promote(Flavor::PowerSeries).truncate_to(n).left_const(&inv);
    Ok((m0, rel))
}

/// `x ↦ zᵏρᵏ(x)` on `Aⁿ` as the matrix `zᵏ·1ₙ`.
pub fn theta_shift(ctx: &Ctx, n: usize, k: i64) -> TwistedMatrix {
    let id = AMat::identity(&ctx.ring, n);
    TwistedMatrix::from_coeffs(ctx, Flavor::LaurentPoly, n, n, Prec::Infinite, [(k, id)])
}

/// Block swap `[[0, 1_q], [1_p, 0]]: Aᵖ ⊕ A^q → A^q ⊕ Aᵖ`.
pub fn swap_sign_matrix(ctx: &Ctx, p: usize, q: usize) -> TwistedMatrix {
    let ring = &ctx.ring;
    let mut m = AMat::zeros(ring, p + q, p + q);
    for i in 0..q {
        m.set(i, p + i, ring.one());
    }
    for i in 0..p {
        m.set(q + i, i, ring.one());
    }
    TwistedMatrix::constant(ctx, Flavor::Poly, &m, Prec::Infinite)
}

fn blocks2(ring: &crate::ring::Ring, a: &AMat, b: &AMat, c: &AMat, d: &AMat) -> AMat {
    let s = a.rows;
    let mut m = AMat::zeros(ring, 2 * s, 2 * s);
    for i in 0..s {
        for j in 0..s {
            m.set(i, j, a.get(i, j).clone());
            m.set(i, s + j, b.get(i, j).clone());
            m.set(s + i, j, c.get(i, j).clone());
            m.set(s + i, s + j, d.get(i, j).clone());
        }
    }
    m
}

/// The four factors of `diag(α, α⁻¹) = [[1,α],[0,1]]·[[1,0],[−α⁻¹,1]]·[[1,α],[0,1]]·[[0,−1],[1,0]]`.
pub fn whitehead_factors(ring: &crate::ring::Ring, a: &AMat, a_inv: &AMat) -> [AMat; 4] {
    let s = a.rows;
    let one = AMat::identity(ring, s);
    let zero = AMat::zeros(ring, s, s);
    let u = blocks2(ring, &one, a, &zero, &one);
    let l = blocks2(ring, &one, &zero, &a_inv.neg(ring), &one);
    let w = blocks2(ring, &zero, &one.neg(ring), &one, &zero);
    [u.clone(), l, u, w]
}

/// `(g, h, g⁻¹, h⁻¹)` with `g·h·g⁻¹·h⁻¹ = [[1,e],[0,1]] ⊕ 1` on three blocks.
pub fn elementary_commutator(ring: &crate::ring::Ring, e: &AMat) -> [AMat; 4] {
    let s = e.rows;
    let make = |sign: bool, hmat: bool| {
        let mut m = AMat::identity(ring, 3 * s);
        for i in 0..s {
            for j in 0..s {
                if hmat {
                    let v = if sign { ring.neg(e.get(i, j)) } else { e.get(i, j).clone() };
                    m.set(2 * s + i, s + j, v);
                } else if i == j {
                    let v = if sign { ring.neg(&ring.one()) } else { ring.one() };
                    m.set(i, 2 * s + j, v);
                }
            }
        }
        m
    };
    [make(false, false), make(false, true), make(true, false), make(true, true)]
}

/// Product of constant matrices, left to right.
pub fn product(ring: &crate::ring::Ring, ms: &[AMat]) -> AMat {
    let mut it = ms.iter();
    let first = it.next().expect("nonempty product").clone();
    it.fold(first, |acc, m| acc.mul(ring, m))
}

/// Determinant by cofactor expansion; commutative `A` with `ρ = id` only.
pub fn cofactor_det(m: &TwistedMatrix) -> Result<Series, MatrixError> {
    let ctx = m.ctx();
    if !ctx.ring.is_commutative() || !ctx.rho.is_identity() {
        return Err(RingError::Capability(
            "determinants need a commutative base ring with ρ = id".into(),
        )
        .into());
    }
    if !m.is_square() {
        return Err(MatrixError::Dimension("determinant of a non-square matrix".into()));
    }
    let grid = m.entries();
    let idx: Vec<usize> = (0..m.rows()).collect();
    Ok(det_rec(&grid, 0, &idx, ctx, m.flavor(), m.prec()))
}

fn det_rec(g: &[Vec<Series>], row: usize, cols: &[usize], ctx: &Ctx, fl: Flavor, prec: Prec) -> Series {
    if cols.is_empty() {
        return Series::one(ctx, fl, prec);
    }
    let mut acc = Series::zero(ctx, fl, Prec::Infinite);
    for (pos, &c) in cols.iter().enumerate() {
        let e = &g[row][c];
        if e.is_zero() && e.prec() == Prec::Infinite {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let t = e.mul(&det_rec(g, row + 1, &rest, ctx, fl, prec));
        acc = if pos % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, AutoKind, Automorphism, Elem, Ring};

    fn q(n: i64) -> Elem {
        Elem::Q(rat(n))
    }

    fn qctx() -> Ctx {
        Ctx::untwisted(Ring::rationals())
    }

    fn amat(rows: &[&[i64]]) -> AMat {
        AMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    fn one_z_z_one(ctx: &Ctx) -> TwistedMatrix {
        TwistedMatrix::from_coeffs(
            ctx,
            Flavor::Poly,
            2,
            2,
            Prec::Infinite,
            [(0, amat(&[&[1, 0], &[0, 1]])), (1, amat(&[&[0, 1], &[1, 0]]))],
        )
    }

    #[test]
    fn swap_squares_to_identity() {
        let ctx = qctx();
        let s = TwistedMatrix::constant(&ctx, Flavor::Poly, &amat(&[&[0, 1], &[1, 0]]), Prec::Infinite);
        assert!(s.mul(&s).is_identity());
        let id = TwistedMatrix::identity(&ctx, Flavor::Poly, 2, Prec::Infinite);
        assert_eq!(id.mul(&s), s);
    }

    #[test]
    fn twisted_product_of_z_and_i() {
        let r = Ring::gaussian_rationals();
        let rho = Automorphism::new(&r, AutoKind::ComplexConjugation).unwrap();
        let ctx = Ctx::new(r, rho).unwrap();
        let z = theta_shift(&ctx, 1, 1);
        let i = TwistedMatrix::constant(
            &ctx,
            Flavor::Poly,
            &AMat::from_rows(vec![vec![Elem::Gauss(rat(0), rat(1))]]),
            Prec::Infinite,
        );
        let p = i.mul(&z);
        assert_eq!(p.coeff(1).get(0, 0), &Elem::Gauss(rat(0), rat(-1)));
        // z·i keeps i on the right
        assert_eq!(z.mul(&i).coeff(1).get(0, 0), &Elem::Gauss(rat(0), rat(1)));
    }

    #[test]
    fn prop9_examples() {
        let ctx = qctx();
        let m = one_z_z_one(&ctx);
        let pair = invert_series_matrix(&m, 4).unwrap();
        let expect = TwistedMatrix::from_coeffs(
            &ctx,
            Flavor::PowerSeries,
            2,
            2,
            Prec::Finite(4),
            [
                (0, amat(&[&[1, 0], &[0, 1]])),
                (1, amat(&[&[0, -1], &[-1, 0]])),
                (2, amat(&[&[1, 0], &[0, 1]])),
                (3, amat(&[&[0, -1], &[-1, 0]])),
            ],
        );
        assert_eq!(pair.beta, expect);

        let u = TwistedMatrix::from_coeffs(
            &ctx,
            Flavor::Poly,
            2,
            2,
            Prec::Infinite,
            [(0, amat(&[&[1, 0], &[0, 1]])), (1, amat(&[&[0, 1], &[0, 0]]))],
        );
        let inv = invert_series_matrix(&u, 6).unwrap().beta;
        assert_eq!(inv.coeff(1), amat(&[&[0, -1], &[0, 0]]));
        assert!(inv.coeff_ref(2).is_none());

        let sing = TwistedMatrix::constant(&ctx, Flavor::Poly, &amat(&[&[1, 0], &[0, 0]]), Prec::Infinite);
        assert!(matches!(invert_series_matrix(&sing, 4), Err(MatrixError::NotInvertible(_))));
    }

    #[test]
    fn triangularize_one_z_z_one() {
        let ctx = qctx();
        let m = one_z_z_one(&ctx);
        let cert = witt_triangularize(&m, 6).unwrap();
        assert_eq!(cert.ops.len(), 1);
        assert!(cert.gamma_is_triangular());
        assert_eq!(cert.replay(&m), cert.gamma);
        let w = cert.diag_product();
        let expect = Series::from_coeffs(&ctx, Flavor::PowerSeries, Prec::Finite(6), [(0, q(1)), (2, q(-1))]);
        assert_eq!(w.series(), &expect);
        assert_eq!(cofactor_det(&m).unwrap().truncate_to(6), expect);
    }

    #[test]
    fn relative_torsion_factors_constant() {
        let ctx = qctx();
        let m = TwistedMatrix::from_coeffs(
            &ctx,
            Flavor::Poly,
            1,
            1,
            Prec::Infinite,
            [(0, amat(&[&[2]])), (1, amat(&[&[2]]))],
        );
        let (m0, rel) = relative_f_torsion(&m, 8).unwrap();
        assert_eq!(m0, amat(&[&[2]]));
        assert_eq!(rel.coeff(1), amat(&[&[1]]));
        let s = swap_sign_matrix(&ctx, 2, 1);
        assert!(relative_f_torsion(&s, 8).unwrap().1.is_identity());
        assert!(swap_sign_matrix(&ctx, 0, 3).is_identity());
    }

    #[test]
    fn matrix_identities() {
        let r = Ring::rationals();
        let a = amat(&[&[2, 1], &[1, 1]]);
        let ai = linalg::invert(&r, &a).unwrap();
        let f = whitehead_factors(&r, &a, &ai);
        let z = AMat::zeros(&r, 2, 2);
        assert_eq!(product(&r, &f), blocks2(&r, &a, &z, &z, &ai));
        let e = amat(&[&[3, -1], &[0, 5]]);
        let c = elementary_commutator(&r, &e);
        let mut expect = AMat::identity(&r, 6);
        for i in 0..2 {
            for j in 0..2 {
                expect.set(i, 2 + j, e.get(i, j).clone());
            }
        }
        assert_eq!(product(&r, &c), expect);
        assert!(c[0].mul(&r, &c[2]).is_identity(&r) && c[1].mul(&r, &c[3]).is_identity(&r));
    }
}
