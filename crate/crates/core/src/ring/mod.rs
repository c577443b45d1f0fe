//! Exact base rings `A` with canonical payloads, unit inversion, flattening
//! to a scalar field, and automorphisms with integer powers.

mod auto;
pub mod field;
mod group;
pub mod linalg;
mod rational;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use auto::{AutoKind, Automorphism};
pub use field::{FMat, Field};
pub use group::FiniteGroup;
pub use linalg::{AMat, SolveOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("unsupported for this ring: {0}")]
    Capability(String),
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
}

/// Canonical element payload. Which variants are legal depends on the ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Z(BigInt),
    Q(BigRational),
    Mod(u64),
    Gauss(BigRational, BigRational),
    /// Row-major `s×s` grid.
    Mat(Vec<Elem>),
    /// Group element index → nonzero coefficient.
    Grp(BTreeMap<usize, Elem>),
}

#[derive(Debug, PartialEq, Eq)]
pub enum RingKind {
    Rationals,
    Integers,
    IntegersMod(u64),
    GaussianRationals,
    MatrixRing { size: usize, base: Ring },
    GroupRing { group: Arc<FiniteGroup>, base: Ring },
}

/// Shared handle to a ring context.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingKind>);

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Ring {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Neg,
    Mul,
    One,
    Zero,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithValue {
    Elem(Elem),
    Bool(bool),
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Ring {
    pub fn rationals() -> Ring {
        Ring(Arc::new(RingKind::Rationals))
    }

    pub fn integers() -> Ring {
        Ring(Arc::new(RingKind::Integers))
    }

    pub fn integers_mod(m: u64) -> Result<Ring, RingError> {
        if m < 2 {
            return Err(RingError::InvalidDescriptor("modulus must be at least 2".into()));
        }
        Ok(Ring(Arc::new(RingKind::IntegersMod(m))))
    }

    pub fn gaussian_rationals() -> Ring {
        Ring(Arc::new(RingKind::GaussianRationals))
    }

    pub fn matrix_ring(size: usize, base: Ring) -> Result<Ring, RingError> {
        if size == 0 {
            return Err(RingError::InvalidDescriptor("matrix size must be at least 1".into()));
        }
        base.check_nestable()?;
        Ok(Ring(Arc::new(RingKind::MatrixRing { size, base })))
    }

    pub fn group_ring(group: FiniteGroup, base: Ring) -> Result<Ring, RingError> {
        base.check_nestable()?;
        Ok(Ring(Arc::new(RingKind::GroupRing {
            group: Arc::new(group),
            base,
        })))
    }

    // Matrix and group rings invert through a scalar field (or ℚ with an
    // integrality check), which a composite modulus does not provide.
    fn check_nestable(&self) -> Result<(), RingError> {
        if self.field().is_none() {
            return Err(RingError::InvalidDescriptor(
                "matrix and group rings need a base over ℚ, ℤ or a prime field".into(),
            ));
        }
        Ok(())
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn zero(&self) -> Elem {
        match self.kind() {
            RingKind::Rationals => Elem::Q(BigRational::zero()),
            RingKind::Integers => Elem::Z(BigInt::zero()),
            RingKind::IntegersMod(_) => Elem::Mod(0),
            RingKind::GaussianRationals => Elem::Gauss(BigRational::zero(), BigRational::zero()),
            RingKind::MatrixRing { size, base } => Elem::Mat(vec![base.zero(); size * size]),
            RingKind::GroupRing { .. } => Elem::Grp(BTreeMap::new()),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        match self.kind() {
            RingKind::Rationals => Elem::Q(rat(n)),
            RingKind::Integers => Elem::Z(BigInt::from(n)),
            RingKind::IntegersMod(m) => Elem::Mod(n.rem_euclid(*m as i64) as u64),
            RingKind::GaussianRationals => Elem::Gauss(rat(n), BigRational::zero()),
            RingKind::MatrixRing { size, base } => {
                let mut v = vec![base.zero(); size * size];
                for i in 0..*size {
                    v[i * size + i] = base.from_i64(n);
                }
                Elem::Mat(v)
            }
            RingKind::GroupRing { group, base } => {
                let c = base.from_i64(n);
                let mut map = BTreeMap::new();
                if !base.is_zero(&c) {
                    map.insert(group.identity(), c);
                }
                Elem::Grp(map)
            }
        }
    }

    /// Embeds a rational scalar; fails when the ring cannot hold it.
    pub fn from_rational(&self, q: &BigRational) -> Result<Elem, RingError> {
        let scalar = match self.kind() {
            RingKind::Rationals => Elem::Q(q.clone()),
            RingKind::Integers => {
                if !field::is_integral(q) {
                    return Err(RingError::Capability(format!("{q} is not an integer")));
                }
                Elem::Z(q.to_integer())
            }
            RingKind::IntegersMod(m) => {
                let m_big = BigInt::from(*m);
                let num = q.numer().mod_floor(&m_big).to_u64().unwrap();
                let den = q.denom().mod_floor(&m_big).to_u64().unwrap();
                let inv = field::inv_mod(den, *m)
                    .ok_or_else(|| RingError::Capability(format!("{q} has no residue mod {m}")))?;
                Elem::Mod(field::mul_mod(num, inv, *m))
            }
            RingKind::GaussianRationals => Elem::Gauss(q.clone(), BigRational::zero()),
            RingKind::MatrixRing { size, base } => {
                let c = base.from_rational(q)?;
                let mut v = vec![base.zero(); size * size];
                for i in 0..*size {
                    v[i * size + i] = c.clone();
                }
                Elem::Mat(v)
            }
            RingKind::GroupRing { group, base } => {
                let c = base.from_rational(q)?;
                let mut map = BTreeMap::new();
                if !base.is_zero(&c) {
                    map.insert(group.identity(), c);
                }
                Elem::Grp(map)
            }
        };
        Ok(scalar)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Z(x) => x.is_zero(),
            Elem::Q(x) => x.is_zero(),
            Elem::Mod(x) => *x == 0,
            Elem::Gauss(x, y) => x.is_zero() && y.is_zero(),
            Elem::Mat(v) => {
                let RingKind::MatrixRing { base, .. } = self.kind() else {
                    unreachable!("matrix payload outside a matrix ring")
                };
                v.iter().all(|x| base.is_zero(x))
            }
            Elem::Grp(m) => m.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.kind(), a, b) {
            (_, Elem::Z(x), Elem::Z(y)) => Elem::Z(x + y),
            (_, Elem::Q(x), Elem::Q(y)) => Elem::Q(rational::add(x, y)),
            (RingKind::IntegersMod(m), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(field::add_mod(*x, *y, *m))
            }
            (_, Elem::Gauss(a1, b1), Elem::Gauss(a2, b2)) => Elem::Gauss(rational::add(a1, a2), rational::add(b1, b2)),
            (RingKind::MatrixRing { base, .. }, Elem::Mat(x), Elem::Mat(y)) => {
                Elem::Mat(x.iter().zip(y).map(|(p, q)| base.add(p, q)).collect())
            }
            (RingKind::GroupRing { base, .. }, Elem::Grp(x), Elem::Grp(y)) => {
                let mut out = x.clone();
                for (g, c) in y {
                    let s = match out.get(g) {
                        Some(d) => base.add(d, c),
                        None => c.clone(),
                    };
                    if base.is_zero(&s) {
                        out.remove(g);
                    } else {
                        out.insert(*g, s);
                    }
                }
                Elem::Grp(out)
            }
            _ => unreachable!("operands do not belong to {}", self),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self.kind(), a) {
            (_, Elem::Z(x)) => Elem::Z(-x),
            (_, Elem::Q(x)) => Elem::Q(rational::neg(x)),
            (RingKind::IntegersMod(m), Elem::Mod(x)) => Elem::Mod(if *x == 0 { 0 } else { m - x }),
            (_, Elem::Gauss(x, y)) => Elem::Gauss(rational::neg(x), rational::neg(y)),
            (RingKind::MatrixRing { base, .. }, Elem::Mat(v)) => {
                Elem::Mat(v.iter().map(|x| base.neg(x)).collect())
            }
            (RingKind::GroupRing { base, .. }, Elem::Grp(m)) => {
                Elem::Grp(m.iter().map(|(g, c)| (*g, base.neg(c))).collect())
            }
            _ => unreachable!("operand does not belong to {}", self),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.kind(), a, b) {
            (_, Elem::Z(x), Elem::Z(y)) => Elem::Z(x * y),
            (_, Elem::Q(x), Elem::Q(y)) => Elem::Q(rational::mul(x, y)),
            (RingKind::IntegersMod(m), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(field::mul_mod(*x, *y, *m))
            }
            (_, Elem::Gauss(a1, b1), Elem::Gauss(a2, b2)) => {
                Elem::Gauss(
                    rational::sub(&rational::mul(a1, a2), &rational::mul(b1, b2)),
                    rational::add(&rational::mul(a1, b2), &rational::mul(b1, a2)),
                )
            }
            (RingKind::MatrixRing { .. }, Elem::Mat(_), Elem::Mat(_))
            | (RingKind::GroupRing { .. }, Elem::Grp(_), Elem::Grp(_)) => self.dot(&[(a, b)]),
            _ => unreachable!("operands do not belong to {}", self),
        }
    }

    /// `Σ xᵢ·yᵢ`, normalizing each scalar coordinate once.
    pub fn dot(&self, pairs: &[(&Elem, &Elem)]) -> Elem {
        match self.kind() {
            RingKind::Rationals => {
                let mut acc = rational::Acc::new();
                for (x, y) in pairs {
                    match (x, y) {
                        (Elem::Q(a), Elem::Q(b)) => acc.add_prod(a, b, false),
                        _ => unreachable!("operands do not belong to {}", self),
                    }
                }
                Elem::Q(acc.finish())
            }
            RingKind::GaussianRationals => {
                let (mut re, mut im) = (rational::Acc::new(), rational::Acc::new());
                for (x, y) in pairs {
                    let (Elem::Gauss(a1, b1), Elem::Gauss(a2, b2)) = (x, y) else {
                        unreachable!("operands do not belong to {}", self);
                    };
                    re.add_prod(a1, a2, false);
                    re.add_prod(b1, b2, true);
                    im.add_prod(a1, b2, false);
                    im.add_prod(b1, a2, false);
                }
                Elem::Gauss(re.finish(), im.finish())
            }
            RingKind::MatrixRing { size, base } => {
                let s = *size;
                let mut buckets: Vec<Vec<(&Elem, &Elem)>> = vec![Vec::with_capacity(pairs.len() * s); s * s];
                for (x, y) in pairs {
                    let (Elem::Mat(x), Elem::Mat(y)) = (x, y) else {
                        unreachable!("operands do not belong to {}", self);
                    };
                    for i in 0..s {
                        for k in 0..s {
                            let p = &x[i * s + k];
                            if base.is_zero(p) {
                                continue;
                            }
                            for j in 0..s {
                                let q = &y[k * s + j];
                                if !base.is_zero(q) {
                                    buckets[i * s + j].push((p, q));
                                }
                            }
                        }
                    }
                }
                Elem::Mat(buckets.iter().map(|b| base.dot(b)).collect())
            }
            RingKind::GroupRing { group, base } => {
                let mut buckets: Vec<Vec<(&Elem, &Elem)>> = vec![Vec::with_capacity(pairs.len() * 2); group.order()];
                for (x, y) in pairs {
                    let (Elem::Grp(x), Elem::Grp(y)) = (x, y) else {
                        unreachable!("operands do not belong to {}", self);
                    };
                    for (g, c) in x {
                        for (h, d) in y {
                            buckets[group.mul(*g, *h)].push((c, d));
                        }
                    }
                }
                let out = buckets
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| !b.is_empty())
                    .map(|(g, b)| (g, base.dot(b)))
                    .filter(|(_, c)| !base.is_zero(c))
                    .collect();
                Elem::Grp(out)
            }
            _ => pairs
                .iter()
                .fold(self.zero(), |acc, (x, y)| self.add(&acc, &self.mul(x, y))),
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self.kind() {
            RingKind::MatrixRing { size, base } => *size == 1 && base.is_commutative(),
            RingKind::GroupRing { group, base } => group.is_abelian() && base.is_commutative(),
            _ => true,
        }
    }

    /// `true` when `a` is a canonical payload of this ring.
    pub fn contains(&self, a: &Elem) -> bool {
        match (self.kind(), a) {
            (RingKind::Rationals, Elem::Q(x)) => x.denom().is_positive(),
            (RingKind::Integers, Elem::Z(_)) => true,
            (RingKind::IntegersMod(m), Elem::Mod(x)) => x < m,
            (RingKind::GaussianRationals, Elem::Gauss(x, y)) => {
                x.denom().is_positive() && y.denom().is_positive()
            }
            (RingKind::MatrixRing { size, base }, Elem::Mat(v)) => {
                v.len() == size * size && v.iter().all(|x| base.contains(x))
            }
            (RingKind::GroupRing { group, base }, Elem::Grp(m)) => m
                .iter()
                .all(|(g, c)| *g < group.order() && base.contains(c) && !base.is_zero(c)),
            _ => false,
        }
    }

    fn check(&self, a: &Elem) -> Result<(), RingError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(RingError::ContextMismatch(format!("{a:?} is not an element of {self}")))
        }
    }

    /// Checked single entry point for the basic ring operations.
    pub fn arith(&self, op: ArithOp, a: &Elem, b: Option<&Elem>) -> Result<ArithValue, RingError> {
        self.check(a)?;
        if let Some(b) = b {
            self.check(b)?;
        }
        let need_b = || b.ok_or_else(|| RingError::ContextMismatch("missing operand".into()));
        Ok(match op {
            ArithOp::Add => ArithValue::Elem(self.add(a, need_b()?)),
            ArithOp::Mul => ArithValue::Elem(self.mul(a, need_b()?)),
            ArithOp::Neg => ArithValue::Elem(self.neg(a)),
            ArithOp::One => ArithValue::Elem(self.one()),
            ArithOp::Zero => ArithValue::Elem(self.zero()),
            ArithOp::Eq => ArithValue::Bool(a == need_b()?),
        })
    }

    pub fn is_unit(&self, a: &Elem) -> bool {
        self.invert(a).is_ok()
    }

    /// Two-sided inverse, or a not-a-unit error with a witness.
    pub fn invert(&self, a: &Elem) -> Result<Elem, RingError> {
        match (self.kind(), a) {
            (RingKind::Rationals, Elem::Q(x)) => {
                if x.is_zero() {
                    Err(RingError::NotAUnit("zero has no inverse".into()))
                } else {
                    Ok(Elem::Q(x.recip()))
                }
            }
            (RingKind::Integers, Elem::Z(x)) => {
                if x.abs().is_one() {
                    Ok(Elem::Z(x.clone()))
                } else {
                    Err(RingError::NotAUnit(format!("the only integer units are ±1, got {x}")))
                }
            }
            (RingKind::IntegersMod(m), Elem::Mod(x)) => field::inv_mod(*x, *m)
                .map(Elem::Mod)
                .ok_or_else(|| RingError::NotAUnit(format!("gcd({x}, {m}) ≠ 1"))),
            (RingKind::GaussianRationals, Elem::Gauss(x, y)) => {
                let norm = x * x + y * y;
                if norm.is_zero() {
                    Err(RingError::NotAUnit("zero has no inverse".into()))
                } else {
                    Ok(Elem::Gauss(x / &norm, -y / &norm))
                }
            }
            _ => self.invert_by_flattening(a),
        }
    }

    // Solve b·a = 1 in coordinates over the scalar field, then confirm both
    // products exactly.
    fn invert_by_flattening(&self, a: &Elem) -> Result<Elem, RingError> {
        let field = self.field().expect("nested rings always have a scalar field");
        let r = self.right_mul_matrix(a);
        let one = self.flatten(&self.one());
        let Some(x) = field::solve_left(field, &r, &one) else {
            let kernel = field::left_kernel(field, &r);
            let witness = kernel
                .first()
                .and_then(|k| self.unflatten(k))
                .map(|k| format!("x = {} satisfies x·a = 0", self.display(&k)))
                .unwrap_or_else(|| "right multiplication is not surjective".into());
            return Err(RingError::NotAUnit(witness));
        };
        let b = self.unflatten(&x).ok_or_else(|| {
            RingError::NotAUnit("inverse exists over ℚ but is not integral".into())
        })?;
        if !self.is_one(&self.mul(&b, a)) || !self.is_one(&self.mul(a, &b)) {
            return Err(RingError::NotAUnit("one-sided inverse only".into()));
        }
        Ok(b)
    }

    /// Scalar field of the flattening, if any. Integer-based rings flatten
    /// over ℚ; composite moduli have none.
    pub fn field(&self) -> Option<Field> {
        match self.kind() {
            RingKind::Rationals | RingKind::Integers | RingKind::GaussianRationals => {
                Some(Field::Rationals)
            }
            RingKind::IntegersMod(m) => is_prime(*m).then_some(Field::Prime(*m)),
            RingKind::MatrixRing { base, .. } | RingKind::GroupRing { base, .. } => base.field(),
        }
    }

    /// `true` when solving over the flattening is exact (no integrality
    /// constraint).
    pub fn solvable(&self) -> bool {
        match self.kind() {
            RingKind::Integers => false,
            RingKind::IntegersMod(m) => is_prime(*m),
            RingKind::MatrixRing { base, .. } | RingKind::GroupRing { base, .. } => base.solvable(),
            _ => true,
        }
    }

    /// Dimension over the scalar field.
    pub fn dim(&self) -> usize {
        match self.kind() {
            RingKind::Rationals | RingKind::Integers | RingKind::IntegersMod(_) => 1,
            RingKind::GaussianRationals => 2,
            RingKind::MatrixRing { size, base } => size * size * base.dim(),
            RingKind::GroupRing { group, base } => group.order() * base.dim(),
        }
    }

    pub fn flatten(&self, a: &Elem) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.dim());
        self.flatten_into(a, &mut out);
        out
    }

    fn flatten_into(&self, a: &Elem, out: &mut Vec<Elem>) {
        match (self.kind(), a) {
            (_, Elem::Q(x)) => out.push(Elem::Q(x.clone())),
            (_, Elem::Z(x)) => out.push(Elem::Q(BigRational::from_integer(x.clone()))),
            (_, Elem::Mod(x)) => out.push(Elem::Mod(*x)),
            (_, Elem::Gauss(x, y)) => {
                out.push(Elem::Q(x.clone()));
                out.push(Elem::Q(y.clone()));
            }
            (RingKind::MatrixRing { base, .. }, Elem::Mat(v)) => {
                for x in v {
                    base.flatten_into(x, out);
                }
            }
            (RingKind::GroupRing { group, base }, Elem::Grp(m)) => {
                let zero = base.zero();
                for g in 0..group.order() {
                    base.flatten_into(m.get(&g).unwrap_or(&zero), out);
                }
            }
            _ => unreachable!("operand does not belong to {}", self),
        }
    }

    /// Inverse of [`Ring::flatten`]; `None` when the coordinates are not
    /// integral for an integer-based ring.
    pub fn unflatten(&self, v: &[Elem]) -> Option<Elem> {
        assert_eq!(v.len(), self.dim(), "coordinate vector has wrong length");
        match self.kind() {
            RingKind::Rationals => Some(v[0].clone()),
            RingKind::IntegersMod(_) => Some(v[0].clone()),
            RingKind::Integers => match &v[0] {
                Elem::Q(q) if field::is_integral(q) => Some(Elem::Z(q.to_integer())),
                _ => None,
            },
            RingKind::GaussianRationals => match (&v[0], &v[1]) {
                (Elem::Q(x), Elem::Q(y)) => Some(Elem::Gauss(x.clone(), y.clone())),
                _ => None,
            },
            RingKind::MatrixRing { base, .. } => {
                let d = base.dim();
                v.chunks(d)
                    .map(|c| base.unflatten(c))
                    .collect::<Option<Vec<_>>>()
                    .map(Elem::Mat)
            }
            RingKind::GroupRing { base, .. } => {
                let d = base.dim();
                let mut m = BTreeMap::new();
                for (g, c) in v.chunks(d).enumerate() {
                    let x = base.unflatten(c)?;
                    if !base.is_zero(&x) {
                        m.insert(g, x);
                    }
                }
                Some(Elem::Grp(m))
            }
        }
    }

    /// Basis over the scalar field, in flattening order.
    pub fn basis(&self) -> Vec<Elem> {
        let field = self.field().expect("ring has a scalar field");
        let d = self.dim();
        (0..d)
            .map(|i| {
                let mut v = vec![field.zero(); d];
                v[i] = field.one();
                self.unflatten(&v).expect("unit coordinates are integral")
            })
            .collect()
    }

    /// Matrix of `x ↦ x·a` on flattened row vectors.
    pub fn right_mul_matrix(&self, a: &Elem) -> FMat {
        let field = self.field().expect("ring has a scalar field");
        let rows: Vec<Vec<Elem>> = self.basis().iter().map(|b| self.flatten(&self.mul(b, a))).collect();
        FMat::from_rows(field, self.dim(), &rows)
    }

    /// Human-readable rendering of an element.
    pub fn display(&self, a: &Elem) -> String {
        match (self.kind(), a) {
            (_, Elem::Q(x)) => x.to_string(),
            (_, Elem::Z(x)) => x.to_string(),
            (_, Elem::Mod(x)) => x.to_string(),
            (_, Elem::Gauss(x, y)) => {
                if y.is_zero() {
                    x.to_string()
                } else if x.is_zero() {
                    format!("{y}i")
                } else if y.is_negative() {
                    format!("{x}-{}i", -y)
                } else {
                    format!("{x}+{y}i")
                }
            }
            (RingKind::MatrixRing { size, base }, Elem::Mat(v)) => {
                let rows: Vec<String> = v
                    .chunks(*size)
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|x| base.display(x)).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect();
                format!("[{}]", rows.join(","))
            }
            (RingKind::GroupRing { group, base }, Elem::Grp(m)) => {
                if m.is_empty() {
                    return "0".into();
                }
                let terms: Vec<String> = m
                    .iter()
                    .map(|(g, c)| format!("({})*{}", base.display(c), group.name(*g)))
                    .collect();
                terms.join(" + ")
            }
            _ => format!("{a:?}"),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Rationals => write!(f, "rationals"),
            RingKind::Integers => write!(f, "integers"),
            RingKind::IntegersMod(m) => write!(f, "integers-mod-{m}"),
            RingKind::GaussianRationals => write!(f, "gaussian-rationals"),
            RingKind::MatrixRing { size, base } => write!(f, "matrix-ring({size}, {base})"),
            RingKind::GroupRing { group, base } => {
                write!(f, "group-ring(order {}, {base})", group.order())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q(n: i64, d: i64) -> Elem {
        Elem::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn m2() -> Ring {
        Ring::matrix_ring(2, Ring::rationals()).unwrap()
    }

    fn unit(i: usize, j: usize) -> Elem {
        let mut v = vec![q(0, 1); 4];
        v[i * 2 + j] = q(1, 1);
        Elem::Mat(v)
    }

    #[test]
    fn fraction_addition() {
        let r = Ring::rationals();
        assert_eq!(r.add(&q(1, 3), &q(1, 6)), q(1, 2));
    }

    #[test]
    fn residue_product_matches_integer_oracle() {
        let r = Ring::integers_mod(101).unwrap();
        assert_eq!(r.mul(&Elem::Mod(50), &Elem::Mod(50)), Elem::Mod((2500 % 101) as u64));
        assert_eq!(r.mul(&Elem::Mod(50), &Elem::Mod(50)), Elem::Mod(76));
    }

    #[test]
    fn matrix_unit_products() {
        let r = m2();
        assert_eq!(r.mul(&unit(0, 0), &unit(0, 1)), unit(0, 1));
        assert!(r.is_zero(&r.mul(&unit(0, 1), &unit(0, 0))));
    }

    #[test]
    fn invert_examples() {
        let r = Ring::rationals();
        assert_eq!(r.invert(&q(-3, 4)).unwrap(), q(-4, 3));
        let swap = Elem::Mat(vec![q(0, 1), q(1, 1), q(1, 1), q(0, 1)]);
        assert_eq!(m2().invert(&swap).unwrap(), swap);
    }

    #[test]
    fn one_plus_g_is_a_zero_divisor_in_q_c2() {
        let r = Ring::group_ring(FiniteGroup::cyclic(2), Ring::rationals()).unwrap();
        let g = Elem::Grp(BTreeMap::from([(1usize, q(1, 1))]));
        let a = r.add(&r.one(), &g);
        let b = r.sub(&r.one(), &g);
        assert!(r.is_zero(&r.mul(&a, &b)));
        // regular representation determinant is zero
        let f = r.field().unwrap();
        assert_eq!(field::det(f, &r.right_mul_matrix(&a)), f.zero());
        assert!(!r.is_unit(&a));
        assert!(matches!(r.invert(&a), Err(RingError::NotAUnit(_))));
    }

    #[test]
    fn integer_units_are_plus_minus_one() {
        let z = Ring::integers();
        assert!(z.is_unit(&z.from_i64(-1)));
        assert!(!z.is_unit(&z.from_i64(2)));
        let m = Ring::matrix_ring(2, z.clone()).unwrap();
        let a = Elem::Mat(vec![z.from_i64(2), z.from_i64(1), z.from_i64(1), z.from_i64(1)]);
        let b = m.invert(&a).unwrap();
        assert!(m.is_one(&m.mul(&a, &b)));
        let c = Elem::Mat(vec![z.from_i64(2), z.from_i64(0), z.from_i64(0), z.from_i64(1)]);
        assert!(!m.is_unit(&c));
    }

    #[test]
    fn mixed_context_is_rejected() {
        let r = Ring::rationals();
        let err = r.arith(ArithOp::Add, &q(1, 2), Some(&Elem::Mod(3))).unwrap_err();
        assert!(matches!(err, RingError::ContextMismatch(_)));
        assert_eq!(
            r.arith(ArithOp::Eq, &q(2, 4), Some(&q(1, 2))).unwrap(),
            ArithValue::Bool(true)
        );
    }

    #[test]
    fn composite_modulus_cannot_be_nested() {
        let z6 = Ring::integers_mod(6).unwrap();
        assert!(Ring::matrix_ring(2, z6).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let r = Ring::group_ring(FiniteGroup::symmetric3(), Ring::gaussian_rationals()).unwrap();
        for b in r.basis() {
            assert_eq!(r.unflatten(&r.flatten(&b)).unwrap(), b);
        }
        assert_eq!(r.dim(), 12);
    }
}
