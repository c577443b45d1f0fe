//! Group structure on Witt vectors, conjugation commutators and the
//! degree-one obstruction showing `W(A,ρ)ᵃᵇ → W₁(A,ρ)` is not injective.

use crate::decompose::decompose_series;
use crate::error::{Error, Result};
use crate::matrix::TwistedMatrix;
use crate::ring::{Elem, Ring, RingKind};
use crate::series::{Ctx, Flavor, Prec, Series, WittVector};

/// Element of `W(A,ρ) = 1 + zA_ρ[[z]]` at a fixed precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittGroupElem(WittVector);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittOp {
    Mul,
    Inv,
    Commutator,
}

impl WittGroupElem {
    pub fn new(w: WittVector) -> WittGroupElem {
        WittGroupElem(w)
    }

    pub fn one(ctx: &Ctx, n: i64) -> WittGroupElem {
        WittGroupElem(WittVector::one(ctx, n))
    }

    pub fn ctx(&self) -> &Ctx {
        self.0.series().ctx()
    }

    pub fn prec(&self) -> i64 {
        self.0.prec()
    }

    pub fn witt(&self) -> &WittVector {
        &self.0
    }

    pub fn series(&self) -> &Series {
        self.0.series()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn mul(&self, other: &WittGroupElem) -> WittGroupElem {
        WittGroupElem(self.0.mul(&other.0))
    }

    pub fn inv(&self) -> WittGroupElem {
        WittGroupElem(self.0.inv())
    }
}

fn same_group(u: &WittGroupElem, v: &WittGroupElem) -> Result<()> {
    if u.ctx() != v.ctx() {
        return Err(Error::Precondition("Witt vectors live over different contexts".into()));
    }
    if u.prec() != v.prec() {
        return Err(Error::Precondition(format!("precision mismatch: {} vs {}", u.prec(), v.prec())));
    }
    Ok(())
}

/// `v` is ignored for [`WittOp::Inv`].
pub fn witt_group_op(op: WittOp, u: &WittGroupElem, v: &WittGroupElem) -> Result<WittGroupElem> {
    same_group(u, v)?;
    Ok(match op {
        WittOp::Mul => u.mul(v),
        WittOp::Inv => u.inv(),
        WittOp::Commutator => u.mul(v).mul(&u.inv()).mul(&v.inv()),
    })
}

pub fn first_coefficient(u: &WittGroupElem) -> Elem {
    u.0.first_coefficient()
}

/// `α·x·α⁻¹·x⁻¹` for a unit `α` of `A`.
pub fn kernel_element(alpha: &Elem, x: &WittGroupElem) -> Result<WittGroupElem> {
    let ctx = x.ctx();
    let inv = ctx
        .ring
        .invert(alpha)
        .map_err(|_| Error::Precondition(format!("{} is not a unit", ctx.ring.display(alpha))))?;
    let n = Prec::Infinite;
    let a = Series::constant(ctx, Flavor::PowerSeries, n, alpha.clone());
    let ai = Series::constant(ctx, Flavor::PowerSeries, n, inv);
    let conj = a.mul(x.series()).mul(&ai).mul(x.inv().series());
    Ok(WittGroupElem(WittVector::new(conj)?))
}

/// Elementary 2×2 matrix `1 + x·e_{row,col}`, `row ≠ col`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elementary {
    pub row: usize,
    pub col: usize,
    pub x: Series,
}

impl Elementary {
    pub fn matrix(&self) -> TwistedMatrix {
        let ctx = self.x.ctx();
        let one = Series::one(ctx, Flavor::PowerSeries, Prec::Infinite);
        let zero = Series::zero(ctx, Flavor::PowerSeries, Prec::Infinite);
        let mut grid = vec![vec![one.clone(), zero.clone()], vec![zero, one]];
        grid[self.row][self.col] = self.x.clone();
        TwistedMatrix::from_entries(ctx, Flavor::PowerSeries, 2, 2, &grid).expect("2×2 grid")
    }
}

/// `diag(y, 1)` written as a product of elementary matrices, where
/// `y = α·x·α⁻¹·x⁻¹`.
#[derive(Clone, Debug)]
pub struct CommutatorCert {
    pub alpha: Elem,
    pub x: WittGroupElem,
    pub y: WittGroupElem,
    pub factors: Vec<Elementary>,
}

/// Factors of `diag(u, u⁻¹) = e₁₂(u)·e₂₁(−u⁻¹)·e₁₂(u)·e₁₂(−1)·e₂₁(1)·e₁₂(−1)`.
fn whitehead(u: &Series, u_inv: &Series) -> Vec<Elementary> {
    let one = Series::one(u.ctx(), Flavor::PowerSeries, Prec::Infinite);
    let e = |row, col, x: Series| Elementary { row, col, x };
    vec![
        e(0, 1, u.clone()),
        e(1, 0, u_inv.neg()),
        e(0, 1, u.clone()),
        e(0, 1, one.neg()),
        e(1, 0, one.clone()),
        e(0, 1, one.neg()),
    ]
}

impl CommutatorCert {
    pub fn target(&self) -> TwistedMatrix {
        let ctx = self.y.ctx();
        let one = Series::one(ctx, Flavor::PowerSeries, Prec::Infinite);
        let zero = Series::zero(ctx, Flavor::PowerSeries, Prec::Infinite);
        let grid = vec![vec![self.y.series().clone(), zero.clone()], vec![zero, one]];
        TwistedMatrix::from_entries(ctx, Flavor::PowerSeries, 2, 2, &grid).expect("2×2 grid")
    }

    pub fn product(&self) -> TwistedMatrix {
        let ctx = self.y.ctx();
        let id = TwistedMatrix::identity(ctx, Flavor::PowerSeries, 2, Prec::Infinite);
        self.factors.iter().fold(id, |acc, f| acc.mul(&f.matrix()))
    }

    /// Recomputes `y` and the product of the factors from scratch.
    pub fn verify(&self) -> bool {
        let Ok(y) = kernel_element(&self.alpha, &self.x) else {
            return false;
        };
        y == self.y
            && self.factors.iter().all(|f| f.row != f.col && f.row < 2 && f.col < 2)
            && self.product().eq_below(&self.target(), self.y.prec())
    }
}

/// `diag(αxα⁻¹x⁻¹, 1) = diag(α,α⁻¹)·diag(x,x⁻¹)·diag((xα)⁻¹, xα)`, each
/// factor expanded by the Whitehead identity.
pub fn commutator_certificate(alpha: &Elem, x: &WittGroupElem) -> Result<CommutatorCert> {
    let y = kernel_element(alpha, x)?;
    let ctx = x.ctx();
    let n = x.prec();
    let a = Series::constant(ctx, Flavor::PowerSeries, Prec::Infinite, alpha.clone());
    let ai = Series::constant(ctx, Flavor::PowerSeries, Prec::Infinite, ctx.ring.invert(alpha)?);
    let xs = x.series().clone();
    let xi = x.inv().series().clone();
    let xa = xs.mul(&a).truncate_to(n);
    let xa_inv = ai.mul(&xi).truncate_to(n);
    let mut factors = whitehead(&a, &ai);
    factors.extend(whitehead(&xs, &xi));
    factors.extend(whitehead(&xa_inv, &xa));
    Ok(CommutatorCert {
        alpha: alpha.clone(),
        x: x.clone(),
        y,
        factors,
    })
}

#[derive(Clone, Debug)]
pub struct NoninjectivityWitness {
    pub alpha: Elem,
    pub beta: Elem,
    /// `α(1+βz)α⁻¹(1+βz)⁻¹`.
    pub y: WittGroupElem,
    /// `αβα⁻¹ − β`, the coefficient of `z` in `y`.
    pub obstruction: Elem,
    pub cert: CommutatorCert,
    /// Diagonal product from `decompose_series(diag(y, 1))`.
    pub series_b2: WittVector,
}

impl NoninjectivityWitness {
    pub fn verify(&self) -> bool {
        let ring = &self.y.ctx().ring;
        let Ok(ai) = ring.invert(&self.alpha) else {
            return false;
        };
        let conj = ring.mul(&ring.mul(&self.alpha, &self.beta), &ai);
        let obs = ring.sub(&conj, &self.beta);
        obs == self.obstruction
            && !ring.is_zero(&obs)
            && first_coefficient(&self.y) == obs
            && self.cert.y == self.y
            && self.cert.verify()
            && &self.series_b2 == self.y.witt()
    }
}

/// Units tried first: the transposition in matrix rings, then basis units
/// (group elements in group rings) and `1 + b`.
fn unit_candidates(ring: &Ring) -> Vec<Elem> {
    let mut out = Vec::new();
    if let RingKind::MatrixRing { size, base } = ring.kind() {
        if *size >= 2 {
            let s = *size;
            let mut grid = vec![base.zero(); s * s];
            for i in 0..s {
                let j = match i {
                    0 => 1,
                    1 => 0,
                    _ => i,
                };
                grid[i * s + j] = base.one();
            }
            out.push(Elem::Mat(grid));
        }
    }
    let basis = ring.basis();
    out.extend(basis.iter().filter(|b| ring.is_unit(b) && !ring.is_one(b)).cloned());
    out.extend(basis.iter().map(|b| ring.add(&ring.one(), b)).filter(|u| ring.is_unit(u)));
    out
}

/// Searches for a unit `α` and a `β` with `αβα⁻¹ ≠ β` and certifies
/// `y = α(1+βz)α⁻¹(1+βz)⁻¹` at precision `n`.
pub fn noninjectivity_witness(ctx: &Ctx, n: i64) -> Result<NoninjectivityWitness> {
    let ring = &ctx.ring;
    if ring.is_commutative() {
        return Err(Error::NoWitness("base ring is commutative, so αβα⁻¹ = β always".into()));
    }
    if !ctx.rho.is_identity() {
        return Err(Error::Capability("the witness is certified for ρ = id only".into()));
    }
    if n < 2 {
        return Err(Error::Precision("the obstruction sits in degree 1; need N ≥ 2".into()));
    }
    let basis = ring.basis();
    for alpha in unit_candidates(ring) {
        let ai = ring.invert(&alpha)?;
        for beta in &basis {
            let obs = ring.sub(&ring.mul(&ring.mul(&alpha, beta), &ai), beta);
            if ring.is_zero(&obs) {
                continue;
            }
            let x = Series::from_coeffs(ctx, Flavor::PowerSeries, Prec::Finite(n), vec![(0, ring.one()), (1, beta.clone())]);
            let x = WittGroupElem(WittVector::new(x)?);
            let cert = commutator_certificate(&alpha, &x)?;
            let y = cert.y.clone();
            let target = cert.target();
            let series_b2 = decompose_series(&target, n)?.b2;
            return Ok(NoninjectivityWitness {
                alpha,
                beta: beta.clone(),
                y,
                obstruction: obs,
                cert,
                series_b2,
            });
        }
    }
    Err(Error::NoWitness("no non-central conjugate found among the candidate units".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{standard_context, Sampler};
    use crate::ring::{rat, FiniteGroup};

    fn q(n: i64) -> Elem {
        Elem::Q(rat(n))
    }

    fn m2() -> Ctx {
        Ctx::untwisted(Ring::matrix_ring(2, Ring::rationals()).unwrap())
    }

    fn e(i: usize, j: usize) -> Elem {
        let mut g = vec![q(0); 4];
        g[2 * i + j] = q(1);
        Elem::Mat(g)
    }

    fn w(ctx: &Ctx, n: i64, terms: Vec<(i64, Elem)>) -> WittGroupElem {
        let mut t = vec![(0, ctx.ring.one())];
        t.extend(terms);
        WittGroupElem::new(WittVector::new(Series::from_coeffs(ctx, Flavor::PowerSeries, Prec::Finite(n), t)).unwrap())
    }

    #[test]
    fn commutator_of_elementary_units() {
        let ctx = m2();
        let u = w(&ctx, 3, vec![(1, e(0, 1))]);
        let v = w(&ctx, 3, vec![(1, e(1, 0))]);
        let c = witt_group_op(WittOp::Commutator, &u, &v).unwrap();
        let r = &ctx.ring;
        let want = w(&ctx, 3, vec![(2, r.sub(&e(0, 0), &e(1, 1)))]);
        assert_eq!(c, want);
        assert!(witt_group_op(WittOp::Commutator, &u, &u).unwrap().is_one());
    }

    #[test]
    fn commutative_rationals() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let u = w(&ctx, 8, vec![(1, q(1))]);
        let v = w(&ctx, 8, vec![(2, q(1))]);
        assert!(witt_group_op(WittOp::Commutator, &u, &v).unwrap().is_one());
        assert!(matches!(noninjectivity_witness(&ctx, 4), Err(Error::NoWitness(_))));
    }

    #[test]
    fn precision_mismatch_is_rejected() {
        let ctx = m2();
        assert!(witt_group_op(WittOp::Mul, &WittGroupElem::one(&ctx, 3), &WittGroupElem::one(&ctx, 4)).is_err());
    }

    #[test]
    fn first_coefficient_examples() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let u = w(&ctx, 4, vec![(1, q(3)), (2, q(5))]);
        assert_eq!(first_coefficient(&u), q(3));
    }

    #[test]
    fn swap_conjugates_e11() {
        let ctx = m2();
        let swap = Elem::Mat(vec![q(0), q(1), q(1), q(0)]);
        let x = w(&ctx, 4, vec![(1, e(0, 0))]);
        let y = kernel_element(&swap, &x).unwrap();
        assert_eq!(first_coefficient(&y), ctx.ring.sub(&e(1, 1), &e(0, 0)));
        assert!(kernel_element(&e(0, 0), &x).is_err());
        assert!(kernel_element(&ctx.ring.from_i64(3), &x).unwrap().is_one());
    }

    #[test]
    fn witness_matrix_ring() {
        let wit = noninjectivity_witness(&m2(), 6).unwrap();
        assert_eq!(wit.obstruction, m2().ring.sub(&e(1, 1), &e(0, 0)));
        assert!(wit.verify());
    }

    #[test]
    fn witness_group_ring() {
        let ctx = Ctx::untwisted(Ring::group_ring(FiniteGroup::symmetric3(), Ring::rationals()).unwrap());
        let wit = noninjectivity_witness(&ctx, 5).unwrap();
        assert!(wit.verify());
        assert!(!ctx.ring.is_zero(&wit.obstruction));
    }

    #[test]
    fn transposition_conjugates_three_cycle() {
        let ctx = Ctx::untwisted(Ring::group_ring(FiniteGroup::symmetric3(), Ring::rationals()).unwrap());
        let g = |i: usize| Elem::Grp([(i, q(1))].into_iter().collect());
        let x = w(&ctx, 4, vec![(1, g(4))]);
        let y = kernel_element(&g(1), &x).unwrap();
        assert_eq!(first_coefficient(&y), ctx.ring.sub(&g(5), &g(4)));
    }

    #[test]
    fn random_certificates_verify() {
        for name in ["m2-swap", "s3", "gaussian-conj"] {
            let ctx = standard_context(name).unwrap();
            let mut s = Sampler::new(&ctx, 9);
            for _ in 0..5 {
                let (a, _) = s.unit();
                let x = WittGroupElem::new(s.witt(6));
                let cert = commutator_certificate(&a, &x).unwrap();
                assert!(cert.verify(), "{name}");
                let r = &ctx.ring;
                let x1 = first_coefficient(&x);
                let want = r.sub(&r.mul(&r.mul(&ctx.rho.apply(1, &a), &x1), &r.invert(&a).unwrap()), &x1);
                assert_eq!(first_coefficient(&cert.y), want, "{name}");
            }
        }
    }
}
