//! Twisted series `Σ zʲaⱼ` in right-coefficient form with explicit precision.
//!
//! Multiplication follows `a·z = z·ρ(a)`, so `(zⁱa)(zʲb) = z^{i+j} ρʲ(a) b`.
//! A finite precision `N` asserts every coefficient below degree `N`; nothing
//! is known at or above it.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ring::{Automorphism, Elem, Ring, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("flavor error: {0}")]
    Flavor(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("not invertible here: {0}")]
    NotInvertibleHere(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Which of the four rings a series lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Poly,
    LaurentPoly,
    PowerSeries,
    Novikov,
}

impl Flavor {
    pub fn is_exact(self) -> bool {
        matches!(self, Flavor::Poly | Flavor::LaurentPoly)
    }

    pub fn allows_negative(self) -> bool {
        matches!(self, Flavor::LaurentPoly | Flavor::Novikov)
    }

    /// Smallest flavor containing both.
    pub fn join(self, other: Flavor) -> Flavor {
        use Flavor::*;
        match (self, other) {
            (a, b) if a == b => a,
            (Poly, PowerSeries) | (PowerSeries, Poly) => PowerSeries,
            (Poly, LaurentPoly) | (LaurentPoly, Poly) => LaurentPoly,
            _ => Novikov,
        }
    }

    /// Flavor after a finite truncation.
    pub fn inexact(self) -> Flavor {
        match self {
            Flavor::Poly => Flavor::PowerSeries,
            Flavor::LaurentPoly => Flavor::Novikov,
            f => f,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Poly => "poly",
            Flavor::LaurentPoly => "laurent-poly",
            Flavor::PowerSeries => "power-series",
            Flavor::Novikov => "novikov",
        }
    }

    pub fn from_name(s: &str) -> Option<Flavor> {
        [Flavor::Poly, Flavor::LaurentPoly, Flavor::PowerSeries, Flavor::Novikov]
            .into_iter()
            .find(|f| f.name() == s)
    }
}

/// Precision: coefficients are known below `Finite(N)`, or everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prec {
    Finite(i64),
    Infinite,
}

impl Prec {
    pub fn plus(self, k: i64) -> Prec {
        match self {
            Prec::Finite(n) => Prec::Finite(n + k),
            Prec::Infinite => Prec::Infinite,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Prec::Finite(n) => Some(n),
            Prec::Infinite => None,
        }
    }

    /// `true` when degree `d` is inside the known window.
    pub fn covers(self, d: i64) -> bool {
        match self {
            Prec::Finite(n) => d < n,
            Prec::Infinite => true,
        }
    }
}

impl fmt::Display for Prec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prec::Finite(n) => write!(f, "{n}"),
            Prec::Infinite => write!(f, "∞"),
        }
    }
}

/// Base ring together with its automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub ring: Ring,
    pub rho: Automorphism,
}

impl Ctx {
    pub fn new(ring: Ring, rho: Automorphism) -> Result<Ctx, SeriesError> {
        if *rho.ring() != ring {
            return Err(SeriesError::ContextMismatch(format!(
                "automorphism of {} used with {}",
                rho.ring(),
                ring
            )));
        }
        Ok(Ctx { ring, rho })
    }

    pub fn untwisted(ring: Ring) -> Ctx {
        let rho = Automorphism::identity(&ring);
        Ctx { ring, rho }
    }
}

/// Side of a monomial in raw input: `a·zʲ` (left) or `zʲ·a` (right).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    ctx: Ctx,
    flavor: Flavor,
    coeffs: BTreeMap<i64, Elem>,
    prec: Prec,
}

impl Series {
    pub fn zero(ctx: &Ctx, flavor: Flavor, prec: Prec) -> Series {
        let prec = if flavor.is_exact() { Prec::Infinite } else { prec };
        Series {
            ctx: ctx.clone(),
            flavor,
            coeffs: BTreeMap::new(),
            prec,
        }
    }

    /// Constant series `c`.
    pub fn constant(ctx: &Ctx, flavor: Flavor, prec: Prec, c: Elem) -> Series {
        Series::monomial(ctx, flavor, prec, 0, c)
    }

    pub fn one(ctx: &Ctx, flavor: Flavor, prec: Prec) -> Series {
        Series::constant(ctx, flavor, prec, ctx.ring.one())
    }

    /// `zᵈ·c`. Panics if `d` is illegal for the flavor; use
    /// [`Series::from_terms`] for checked construction.
    pub fn monomial(ctx: &Ctx, flavor: Flavor, prec: Prec, d: i64, c: Elem) -> Series {
        let mut s = Series::zero(ctx, flavor, prec);
        assert!(d >= 0 || flavor.allows_negative(), "negative degree in {}", flavor.name());
        if s.prec.covers(d) && !ctx.ring.is_zero(&c) {
            s.coeffs.insert(d, c);
        }
        s
    }

    /// Normalizes raw monomials into right-coefficient form; left monomials
    /// `a·zʲ` become `zʲ·ρʲ(a)`.
    pub fn from_terms(
        ctx: &Ctx,
        flavor: Flavor,
        prec: Prec,
        terms: &[(Side, i64, Elem)],
    ) -> Result<Series, SeriesError> {
        let mut s = Series::zero(ctx, flavor, prec);
        for (side, d, a) in terms {
            if *d < 0 && !flavor.allows_negative() {
                return Err(SeriesError::Flavor(format!(
                    "degree {d} is not allowed in a {} series",
                    flavor.name()
                )));
            }
            if !ctx.ring.contains(a) {
                return Err(RingError::ContextMismatch(format!(
                    "coefficient {a:?} is not an element of {}",
                    ctx.ring
                ))
                .into());
            }
            if !s.prec.covers(*d) {
                continue;
            }
            let c = match side {
                Side::Right => a.clone(),
                Side::Left => ctx.rho.apply(*d, a),
            };
            s.add_at(*d, &c);
        }
        Ok(s)
    }

    /// Right-coefficient series from `(degree, coefficient)` pairs.
    pub fn from_coeffs(
        ctx: &Ctx,
        flavor: Flavor,
        prec: Prec,
        terms: impl IntoIterator<Item = (i64, Elem)>,
    ) -> Series {
        let mut s = Series::zero(ctx, flavor, prec);
        for (d, c) in terms {
            assert!(d >= 0 || flavor.allows_negative(), "negative degree in {}", flavor.name());
            if s.prec.covers(d) {
                s.add_at(d, &c);
            }
        }
        s
    }

    fn add_at(&mut self, d: i64, c: &Elem) {
        let ring = &self.ctx.ring;
        let v = match self.coeffs.get(&d) {
            Some(x) => ring.add(x, c),
            None => c.clone(),
        };
        if ring.is_zero(&v) {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, v);
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn ring(&self) -> &Ring {
        &self.ctx.ring
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Elem)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, d: i64) -> Elem {
        self.coeffs.get(&d).cloned().unwrap_or_else(|| self.ctx.ring.zero())
    }

    pub fn coeff_ref(&self, d: i64) -> Option<&Elem> {
        self.coeffs.get(&d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest stored degree.
    pub fn lower(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest stored degree.
    pub fn upper(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Valuation used by the precision calculus: the smallest stored degree,
    /// or the precision itself for a series that is zero as far as known.
    pub fn valuation(&self) -> Prec {
        match self.lower() {
            Some(d) => Prec::Finite(d),
            None => self.prec,
        }
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Result<Series, SeriesError> {
        if flavor.is_exact() && !self.prec.eq(&Prec::Infinite) {
            return Err(SeriesError::Flavor(format!(
                "{} series cannot carry finite precision",
                flavor.name()
            )));
        }
        if !flavor.allows_negative() && self.lower().is_some_and(|d| d < 0) {
            return Err(SeriesError::Flavor(format!(
                "negative degree in a {} series",
                flavor.name()
            )));
        }
        let mut s = self.clone();
        s.flavor = flavor;
        Ok(s)
    }

    /// Promotes to the flavor `self.flavor ⊔ flavor`.
    pub fn promote(&self, flavor: Flavor) -> Series {
        let mut s = self.clone();
        s.flavor = self.flavor.join(flavor);
        s
    }

    fn check_ctx(&self, other: &Series) -> Result<(), SeriesError> {
        if self.ctx != other.ctx {
            return Err(SeriesError::ContextMismatch("series over different contexts".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_ctx(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_ctx(other)?;
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Series) -> Series {
        let flavor = self.flavor.join(other.flavor);
        let prec = self.prec.min(other.prec);
        let mut out = Series::zero(&self.ctx, flavor, prec);
        out.prec = prec;
        for (d, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if prec.covers(*d) {
                out.add_at(*d, c);
            }
        }
        out
    }

    pub fn neg(&self) -> Series {
        let ring = &self.ctx.ring;
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = ring.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    /// Precision of a product: `min(N₁ + v₂, N₂ + v₁)`.
    pub fn product_prec(&self, other: &Series) -> Prec {
        let a = match (self.prec, other.valuation()) {
            (Prec::Finite(n), Prec::Finite(v)) => Prec::Finite(n + v),
            (Prec::Finite(_), Prec::Infinite) => Prec::Infinite,
            (Prec::Infinite, _) => Prec::Infinite,
        };
        let b = match (other.prec, self.valuation()) {
            (Prec::Finite(n), Prec::Finite(v)) => Prec::Finite(n + v),
            _ => Prec::Infinite,
        };
        a.min(b)
    }

    pub fn mul(&self, other: &Series) -> Series {
        let flavor = self.flavor.join(other.flavor);
        let prec = self.product_prec(other);
        let mut out = Series::zero(&self.ctx, flavor, prec);
        out.prec = if flavor.is_exact() { Prec::Infinite } else { prec };
        let ring = &self.ctx.ring;
        let rho = &self.ctx.rho;
        let twisted = !rho.is_identity();
        let mut acc: BTreeMap<i64, Elem> = BTreeMap::new();
        for (&j, b) in &other.coeffs {
            for (&i, a) in &self.coeffs {
                let d = i + j;
                if !prec.covers(d) {
                    break;
                }
                let t = if twisted {
                    ring.mul(&rho.apply(j, a), b)
                } else {
                    ring.mul(a, b)
                };
                match acc.get_mut(&d) {
                    Some(x) => *x = ring.add(x, &t),
                    None => {
                        acc.insert(d, t);
                    }
                }
            }
        }
        acc.retain(|_, c| !ring.is_zero(c));
        out.coeffs = acc;
        out
    }

    /// `s·c` for a constant `c`.
    pub fn mul_const_right(&self, c: &Elem) -> Series {
        let ring = &self.ctx.ring;
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(d, a)| (*d, ring.mul(a, c)))
            .filter(|(_, x)| !ring.is_zero(x))
            .collect();
        if ring.is_zero(c) && self.prec == Prec::Infinite {
            out.coeffs.clear();
        }
        out
    }

    /// `c·s` for a constant `c`: `c·zʲa = zʲρʲ(c)a`.
    pub fn mul_const_left(&self, c: &Elem) -> Series {
        let ring = &self.ctx.ring;
        let rho = &self.ctx.rho;
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(d, a)| (*d, ring.mul(&rho.apply(*d, c), a)))
            .filter(|(_, x)| !ring.is_zero(x))
            .collect();
        out
    }

    /// `zᵏ·s`: degrees move by `k`, coefficients are unchanged.
    pub fn shift(&self, k: i64) -> Result<Series, SeriesError> {
        if !self.flavor.allows_negative() && self.lower().is_some_and(|d| d + k < 0) {
            return Err(SeriesError::Flavor(format!(
                "shift by {k} leaves a {} series",
                self.flavor.name()
            )));
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            flavor: self.flavor,
            coeffs: self.coeffs.iter().map(|(d, c)| (d + k, c.clone())).collect(),
            prec: self.prec.plus(k),
        })
    }

    /// Drops everything at degree ≥ `n`; the precision can only decrease.
    pub fn truncate(&self, n: i64) -> Result<Series, SeriesError> {
        if let Prec::Finite(p) = self.prec {
            if n > p {
                return Err(SeriesError::Precision(format!(
                    "cannot raise precision from {p} to {n}"
                )));
            }
        }
        Ok(self.truncate_to(n))
    }

    /// Truncates to `min(n, precision)`.
    pub fn truncate_to(&self, n: i64) -> Series {
        let n = match self.prec {
            Prec::Finite(p) => p.min(n),
            Prec::Infinite => n,
        };
        let coeffs = self.coeffs.range(..n).map(|(d, c)| (*d, c.clone())).collect();
        Series {
            ctx: self.ctx.clone(),
            flavor: self.flavor.inexact(),
            coeffs,
            prec: Prec::Finite(n),
        }
    }

    /// Keeps only degrees in `[lo, hi)`, without changing the precision
    /// bookkeeping beyond `hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Series {
        let mut s = self.truncate_to(hi);
        s.coeffs.retain(|d, _| *d >= lo);
        s
    }

    /// Coefficient at degree 0; only for poly and power-series flavors.
    pub fn augment(&self) -> Result<Elem, SeriesError> {
        match self.flavor {
            Flavor::Poly | Flavor::PowerSeries => Ok(self.coeff(0)),
            f => Err(SeriesError::Flavor(format!("no augmentation on {} series", f.name()))),
        }
    }

    /// Inverse to precision `n` (or less when the input does not determine
    /// more). Requires a unit leading coefficient.
    pub fn invert(&self, n: i64) -> Result<Series, SeriesError> {
        let ring = &self.ctx.ring;
        let rho = &self.ctx.rho;
        let Some(v) = self.lower() else {
            return Err(SeriesError::NotInvertibleHere("series is zero to known precision".into()));
        };
        if v != 0 && !self.flavor.allows_negative() {
            return Err(SeriesError::NotInvertibleHere(format!(
                "constant coefficient of a {} series is zero",
                self.flavor.name()
            )));
        }
        let lead = self.coeff(v);
        let lead_inv = ring.invert(&lead).map_err(|e| {
            SeriesError::NotInvertibleHere(format!("leading coefficient {} ({e})", ring.display(&lead)))
        })?;
        // s = zᵛ·u with u₀ a unit; s⁻¹ = u⁻¹·z⁻ᵛ.
        let rel = match self.prec {
            Prec::Finite(p) => (p - v).min(n + v),
            Prec::Infinite => n + v,
        };
        let u: Vec<Elem> = (0..rel.max(0)).map(|i| self.coeff(i + v)).collect();
        let mut b: Vec<Elem> = Vec::with_capacity(u.len());
        for d in 0..rel.max(0) {
            if d == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let mut acc = ring.zero();
            for i in 1..=d {
                let ui = &u[i as usize];
                if ring.is_zero(ui) {
                    continue;
                }
                let j = d - i;
                acc = ring.add(&acc, &ring.mul(&rho.apply(j, ui), &b[j as usize]));
            }
            let bd = ring.neg(&ring.mul(&rho.apply(d, &lead_inv), &acc));
            b.push(bd);
        }
        let flavor = self.flavor.inexact();
        let terms = b
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - v, rho.apply(-v, &c)));
        Ok(Series::from_coeffs(&self.ctx, flavor, Prec::Finite(rel - v), terms))
    }

    /// Agreement of all coefficients below degree `n`.
    pub fn eq_below(&self, other: &Series, n: i64) -> bool {
        let a = self.coeffs.range(..n);
        let b = other.coeffs.range(..n);
        a.eq(b)
    }

    /// Agreement on the common known window.
    pub fn eq_at_common_prec(&self, other: &Series) -> bool {
        match self.prec.min(other.prec) {
            Prec::Finite(n) => self.eq_below(other, n),
            Prec::Infinite => self.coeffs == other.coeffs,
        }
    }

    /// `true` when the series equals the constant `c` on its known window.
    pub fn is_constant(&self, c: &Elem) -> bool {
        let ring = &self.ctx.ring;
        if ring.is_zero(c) {
            return self.coeffs.is_empty();
        }
        self.coeffs.len() == 1 && self.coeffs.get(&0) == Some(c)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant(&self.ctx.ring.one())
    }

    /// Entrywise ρᵏ on coefficients (the ring automorphism extended by
    /// `z ↦ z`).
    pub fn twist(&self, k: i64) -> Series {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = self.ctx.rho.apply(k, c);
        }
        out
    }

    /// Left-coefficient form: `zʲx = ρ⁻ʲ(x)zʲ`.
    pub fn left_coeffs(&self) -> Vec<(i64, Elem)> {
        self.coeffs
            .iter()
            .map(|(d, c)| (*d, self.ctx.rho.apply(-d, c)))
            .collect()
    }

    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return match self.prec {
                Prec::Finite(n) => format!("O(z^{n})"),
                Prec::Infinite => "0".into(),
            };
        }
        let ring = &self.ctx.ring;
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| match d {
                0 => ring.display(c),
                1 => format!("z*({})", ring.display(c)),
                _ => format!("z^{d}*({})", ring.display(c)),
            })
            .collect();
        if let Prec::Finite(n) = self.prec {
            parts.push(format!("O(z^{n})"));
        }
        parts.join(" + ")
    }
}

/// A power series with constant term exactly 1 and finite precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector(Series);

impl WittVector {
    pub fn new(s: Series) -> Result<WittVector, SeriesError> {
        if s.lower().is_some_and(|d| d < 0) {
            return Err(SeriesError::Flavor("Witt vector with negative degree".into()));
        }
        if s.coeff(0) != s.ring().one() {
            return Err(SeriesError::Flavor("Witt vector must have constant term 1".into()));
        }
        let Prec::Finite(n) = s.prec() else {
            return Err(SeriesError::Precision("Witt vector needs a finite precision".into()));
        };
        let mut s = s.truncate_to(n);
        s.flavor = Flavor::PowerSeries;
        Ok(WittVector(s))
    }

    pub fn one(ctx: &Ctx, n: i64) -> WittVector {
        WittVector(Series::one(ctx, Flavor::PowerSeries, Prec::Finite(n)))
    }

    pub fn series(&self) -> &Series {
        &self.0
    }

    pub fn into_series(self) -> Series {
        self.0
    }

    pub fn prec(&self) -> i64 {
        self.0.prec().finite().expect("Witt vectors have finite precision")
    }

    pub fn mul(&self, other: &WittVector) -> WittVector {
        WittVector(self.0.mul(&other.0))
    }

    pub fn inv(&self) -> WittVector {
        let n = self.prec();
        WittVector(self.0.invert(n).expect("constant term 1 is a unit"))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Coefficient of `z`.
    pub fn first_coefficient(&self) -> Elem {
        self.0.coeff(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, AutoKind};

    fn gauss_conj() -> Ctx {
        let r = Ring::gaussian_rationals();
        let rho = Automorphism::new(&r, AutoKind::ComplexConjugation).unwrap();
        Ctx::new(r, rho).unwrap()
    }

    fn g(a: i64, b: i64) -> Elem {
        Elem::Gauss(rat(a), rat(b))
    }

    fn q(n: i64) -> Elem {
        Elem::Q(rat(n))
    }

    #[test]
    fn left_monomial_normalizes_through_rho() {
        let ctx = gauss_conj();
        let s = Series::from_terms(&ctx, Flavor::Poly, Prec::Infinite, &[(Side::Left, 1, g(0, 1))])
            .unwrap();
        assert_eq!(s.coeff(1), g(0, -1));
        let again = Series::from_terms(
            &ctx,
            Flavor::Poly,
            Prec::Infinite,
            &s.terms().map(|(d, c)| (Side::Right, d, c.clone())).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn negative_degree_rejected_for_poly() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let err = Series::from_terms(&ctx, Flavor::Poly, Prec::Infinite, &[(Side::Right, -1, q(1))]);
        assert!(matches!(err, Err(SeriesError::Flavor(_))));
    }

    #[test]
    fn twisted_product_cancels_cross_terms() {
        let ctx = gauss_conj();
        let one = g(1, 0);
        let a = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, one.clone()), (1, g(0, 1))]);
        let b = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, one), (1, g(0, -1))]);
        let p = a.mul(&b);
        let expect = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, g(1, 0)), (2, g(-1, 0))]);
        assert_eq!(p, expect);
    }

    #[test]
    fn telescoping_truncates_to_one() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let a = Series::from_coeffs(&ctx, Flavor::PowerSeries, Prec::Finite(4), [(0, q(1)), (1, q(-1))]);
        let b = Series::from_coeffs(
            &ctx,
            Flavor::PowerSeries,
            Prec::Finite(4),
            (0..4).map(|d| (d, q(1))),
        );
        let p = a.mul(&b);
        assert_eq!(p.prec(), Prec::Finite(4));
        assert!(p.is_one());
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn inversion_examples() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let a = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, q(1)), (1, q(-1))]);
        let inv = a.invert(4).unwrap();
        assert_eq!(inv.prec(), Prec::Finite(4));
        assert_eq!(inv.terms().count(), 4);
        assert!((0..4).all(|d| inv.coeff(d) == q(1)));

        let ctx = gauss_conj();
        let s = Series::from_coeffs(&ctx, Flavor::PowerSeries, Prec::Finite(5), [(0, g(1, 0)), (1, g(0, 1))]);
        let inv = s.invert(5).unwrap();
        let expect = Series::from_coeffs(
            &ctx,
            Flavor::PowerSeries,
            Prec::Finite(5),
            [(0, g(1, 0)), (1, g(0, -1)), (2, g(1, 0)), (3, g(0, -1)), (4, g(1, 0))],
        );
        assert_eq!(inv, expect);
        assert!(inv.mul(&s).is_one() && s.mul(&inv).is_one());

        let ctx = Ctx::untwisted(Ring::rationals());
        let z = Series::monomial(&ctx, Flavor::Novikov, Prec::Finite(8), 1, q(1));
        let zi = z.invert(8).unwrap();
        assert_eq!(zi.lower(), Some(-1));
        assert_eq!(zi.num_terms(), 1);
    }

    #[test]
    fn augmentation_and_shift() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let s = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, q(1)), (1, q(3)), (2, q(5))]);
        assert_eq!(s.augment().unwrap(), q(1));
        let sh = s.shift(2).unwrap();
        assert_eq!(sh.lower(), Some(2));
        assert_eq!(sh.shift(-2).unwrap(), s);
        let n = Series::monomial(&ctx, Flavor::Novikov, Prec::Finite(4), -1, q(1));
        assert!(n.augment().is_err());
        assert!(n.shift(1).unwrap().is_one());
    }

    #[test]
    fn truncation_contract() {
        let ctx = Ctx::untwisted(Ring::rationals());
        let s = Series::from_coeffs(&ctx, Flavor::Poly, Prec::Infinite, [(0, q(1)), (1, q(1)), (2, q(1))]);
        let t = s.truncate(2).unwrap();
        assert_eq!(t.prec(), Prec::Finite(2));
        assert_eq!(t.num_terms(), 2);
        assert_eq!(t.truncate(2).unwrap(), t);
        assert!(matches!(t.truncate(3), Err(SeriesError::Precision(_))));
    }
}
