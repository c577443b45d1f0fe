//! Seeded generators for ring elements, units, Witt vectors and products of
//! elementary generators with exact inverses.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{InvertiblePair, TwistedMatrix};
use crate::ring::{linalg, AMat, AutoKind, Automorphism, Elem, FiniteGroup, Ring};
use crate::series::{Ctx, Flavor, Prec, Series, WittVector};

/// The five base rings of the acceptance suite, by short name.
pub const STANDARD_CONTEXTS: [&str; 5] = ["rationals", "mod101", "gaussian-conj", "m2-swap", "s3"];

/// `rationals`, `mod101` and `s3` are untwisted; `gaussian-conj` uses complex
/// conjugation and `m2-swap` conjugation by the swap matrix.
pub fn standard_context(name: &str) -> Result<Ctx> {
    let ctx = match name {
        "rationals" => Ctx::untwisted(Ring::rationals()),
        "mod101" => Ctx::untwisted(Ring::integers_mod(101)?),
        "gaussian-conj" => {
            let r = Ring::gaussian_rationals();
            let rho = Automorphism::new(&r, AutoKind::ComplexConjugation)?;
            Ctx::new(r, rho)?
        }
        "m2-swap" => {
            let r = Ring::matrix_ring(2, Ring::rationals())?;
            let q = |n: i64| Elem::Q(BigRational::from_integer(BigInt::from(n)));
            let swap = Elem::Mat(vec![q(0), q(1), q(1), q(0)]);
            let rho = Automorphism::new(&r, AutoKind::ConjugationByUnit(swap))?;
            Ctx::new(r, rho)?
        }
        "s3" => Ctx::untwisted(Ring::group_ring(FiniteGroup::symmetric3(), Ring::rationals())?),
        other => return Err(Error::Precondition(format!("unknown standard context {other}"))),
    };
    Ok(ctx)
}

/// Every scalar coordinate is `p/q` with `|p|, q ≤ 4`.
fn small(ring: &Ring, a: &Elem) -> bool {
    let four = BigInt::from(4);
    ring.flatten(a).iter().all(|c| match c {
        Elem::Q(q) => q.numer().magnitude() <= four.magnitude() && q.denom() <= &four,
        _ => true,
    })
}

/// Kinds of elementary generators for products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    ConstUnit,
    ZShift,
    ZInvShift,
    Elementary,
    Witt,
    NilMinus,
}

pub struct Sampler {
    rng: ChaCha8Rng,
    ctx: Ctx,
}

impl Sampler {
    pub fn new(ctx: &Ctx, seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ctx: ctx.clone(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn small_rational(&mut self) -> BigRational {
        let num = self.rng.gen_range(-3i64..=3);
        let den = if self.rng.gen_bool(0.2) { 2 } else { 1 };
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Sparse combination of scalar-field basis elements with small
    /// coefficients.
    pub fn elem(&mut self) -> Elem {
        let ring = self.ctx.ring.clone();
        let basis = ring.basis();
        let mut acc = ring.zero();
        let keep = if basis.len() > 2 { 0.5 } else { 1.0 };
        for b in &basis {
            if !self.rng.gen_bool(keep) {
                continue;
            }
            let c = self.small_rational();
            let c = ring.from_rational(&c).unwrap_or_else(|_| ring.from_i64(self.rng.gen_range(-3..=3)));
            acc = ring.add(&acc, &ring.mul(&c, b));
        }
        acc
    }

    pub fn nonzero_elem(&mut self) -> Elem {
        loop {
            let x = self.elem();
            if !self.ctx.ring.is_zero(&x) {
                return x;
            }
        }
    }

    /// A unit and its inverse. Units whose inverse has small coordinates are
    /// preferred; otherwise inverses in ℚ[S₃] or M₂(ℚ) carry large
    /// denominators that then grow through every series computation.
    pub fn unit(&mut self) -> (Elem, Elem) {
        let ring = self.ctx.ring.clone();
        let mut fallback = None;
        for _ in 0..64 {
            let x = self.nonzero_elem();
            if let Ok(inv) = ring.invert(&x) {
                if small(&ring, &inv) {
                    return (x, inv);
                }
                fallback.get_or_insert((x, inv));
            }
        }
        fallback.unwrap_or_else(|| (ring.one(), ring.one()))
    }

    /// Witt vector `1 + Σ aⱼzʲ` with about half the coefficients nonzero.
    pub fn witt(&mut self, prec: i64) -> WittVector {
        let ring = self.ctx.ring.clone();
        let top = prec.min(6);
        let mut terms = vec![(0, ring.one())];
        for d in 1..top {
            if self.rng.gen_bool(0.5) {
                terms.push((d, self.elem()));
            }
        }
        let s = Series::from_coeffs(&self.ctx, Flavor::PowerSeries, Prec::Finite(prec), terms);
        WittVector::new(s).expect("constant term 1")
    }

    /// Invertible constant matrix `L·D·U` and its inverse.
    pub fn const_unit_matrix(&mut self, n: usize) -> (AMat, AMat) {
        let ring = self.ctx.ring.clone();
        let mut l = AMat::identity(&ring, n);
        let mut d = AMat::identity(&ring, n);
        let mut u = AMat::identity(&ring, n);
        for i in 0..n {
            d.set(i, i, self.unit().0);
            for j in 0..n {
                if i > j && self.rng.gen_bool(0.5) {
                    l.set(i, j, self.elem());
                }
                if i < j && self.rng.gen_bool(0.5) {
                    u.set(i, j, self.elem());
                }
            }
        }
        let m = l.mul(&ring, &d).mul(&ring, &u);
        let inv = linalg::invert(&ring, &m).expect("L·D·U is invertible");
        (m, inv)
    }

    /// Strictly upper triangular matrix.
    pub fn strict_upper(&mut self, n: usize) -> AMat {
        let ring = self.ctx.ring.clone();
        let mut m = AMat::zeros(&ring, n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rng.gen_bool(0.6) {
                    m.set(i, j, self.elem());
                }
            }
        }
        m
    }

    /// `n×n` power series matrix with invertible constant term, sparse higher
    /// coefficients, known below `prec`.
    pub fn series_matrix(&mut self, n: usize, prec: i64) -> TwistedMatrix {
        let ring = self.ctx.ring.clone();
        let (c0, _) = self.const_unit_matrix(n);
        let mut terms = vec![(0, c0)];
        for d in 1..prec.min(5) {
            let mut m = AMat::zeros(&ring, n, n);
            for i in 0..n {
                for j in 0..n {
                    if self.rng.gen_bool(0.4) {
                        m.set(i, j, self.elem());
                    }
                }
            }
            terms.push((d, m));
        }
        TwistedMatrix::from_coeffs(&self.ctx, Flavor::PowerSeries, n, n, Prec::Finite(prec), terms)
    }

    /// Witt matrix with constant term 1.
    pub fn unipotent_series_matrix(&mut self, n: usize, prec: i64) -> TwistedMatrix {
        let m = self.series_matrix(n, prec);
        let ring = self.ctx.ring.clone();
        let terms: Vec<(i64, AMat)> = m
            .terms()
            .map(|(d, c)| if d == 0 { (0, AMat::identity(&ring, n)) } else { (d, c.clone()) })
            .collect();
        TwistedMatrix::from_coeffs(&self.ctx, Flavor::PowerSeries, n, n, m.prec(), terms)
    }

    fn exact(&self, n: usize, terms: Vec<(i64, AMat)>) -> TwistedMatrix {
        TwistedMatrix::from_coeffs(&self.ctx, Flavor::LaurentPoly, n, n, Prec::Infinite, terms)
    }

    /// One elementary generator of the given kind with its inverse.
    pub fn generator(&mut self, kind: GenKind, n: usize, prec: i64) -> Result<InvertiblePair> {
        let ring = self.ctx.ring.clone();
        let id = AMat::identity(&ring, n);
        let unit_at = |i: usize| {
            let mut e = AMat::zeros(&ring, n, n);
            e.set(i, i, ring.one());
            e
        };
        let pair = match kind {
            GenKind::ConstUnit => {
                let (c, ci) = self.const_unit_matrix(n);
                InvertiblePair::verified(self.exact(n, vec![(0, c)]), self.exact(n, vec![(0, ci)]))?
            }
            GenKind::ZShift | GenKind::ZInvShift => {
                let i = self.below(n);
                let s = if kind == GenKind::ZShift { 1 } else { -1 };
                let e = unit_at(i);
                let rest = id.sub(&ring, &e);
                InvertiblePair::verified(
                    self.exact(n, vec![(0, rest.clone()), (s, e.clone())]),
                    self.exact(n, vec![(0, rest), (-s, e)]),
                )?
            }
            GenKind::Elementary => {
                if n < 2 {
                    return self.generator(GenKind::ConstUnit, n, prec);
                }
                let i = self.below(n);
                let j = (i + 1 + self.below(n - 1)) % n;
                let d = [-1, 0, 1, 2][self.below(4)];
                let mut m = AMat::zeros(&ring, n, n);
                m.set(i, j, self.nonzero_elem());
                let a = self.exact(n, vec![(0, id.clone())]).add(&self.exact(n, vec![(d, m.clone())]));
                let b = self.exact(n, vec![(0, id.clone())]).sub(&self.exact(n, vec![(d, m)]));
                InvertiblePair::verified(a, b)?
            }
            GenKind::Witt => {
                let i = self.below(n);
                let w = self.witt(prec);
                let wi = w.inv();
                let diag = |x: &Series| {
                    let one = Series::one(&self.ctx, Flavor::PowerSeries, Prec::Infinite);
                    let zero = Series::zero(&self.ctx, Flavor::PowerSeries, Prec::Infinite);
                    let grid: Vec<Vec<Series>> = (0..n)
                        .map(|r| {
                            (0..n)
                                .map(|c| match (r == c, r == i) {
                                    (true, true) => x.clone(),
                                    (true, false) => one.clone(),
                                    _ => zero.clone(),
                                })
                                .collect()
                        })
                        .collect();
                    TwistedMatrix::from_entries(&self.ctx, Flavor::PowerSeries, n, n, &grid)
                };
                InvertiblePair::verified(diag(w.series())?, diag(wi.series())?)?
            }
            GenKind::NilMinus => {
                let nu = self.strict_upper(n);
                let z = self.exact(n, vec![(-1, nu)]);
                let one = self.exact(n, vec![(0, id.clone())]);
                let mut beta = one.clone();
                let mut pw = one.clone();
                for _ in 0..n {
                    pw = pw.mul(&z);
                    beta = beta.add(&pw);
                }
                InvertiblePair::verified(one.sub(&z), beta)?
            }
        };
        Ok(pair)
    }

    /// Product of `count` random generators. At most `neg_budget` factors
    /// carry negative degrees, which keeps the cokernel windows small.
    pub fn generator_product(&mut self, n: usize, count: usize, prec: i64, neg_budget: usize) -> Result<(InvertiblePair, Vec<GenKind>)> {
        let all = [
            GenKind::ConstUnit,
            GenKind::ZShift,
            GenKind::ZInvShift,
            GenKind::Elementary,
            GenKind::Witt,
            GenKind::NilMinus,
        ];
        let mut budget = neg_budget;
        let mut kinds = Vec::with_capacity(count);
        let mut acc: Option<InvertiblePair> = None;
        for _ in 0..count {
            let mut kind = all[self.below(all.len())];
            if matches!(kind, GenKind::ZInvShift | GenKind::NilMinus | GenKind::Elementary) {
                if budget == 0 {
                    kind = [GenKind::ConstUnit, GenKind::ZShift, GenKind::Witt][self.below(3)];
                } else {
                    budget -= 1;
                }
            }
            let g = self.generator(kind, n, prec)?;
            kinds.push(kind);
            acc = Some(match acc {
                None => g,
                Some(a) => a.compose(&g)?,
            });
        }
        let pair = match acc {
            Some(p) => p,
            None => self.generator(GenKind::ConstUnit, n, prec)?,
        };
        Ok((pair, kinds))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_are_deterministic() {
        for name in STANDARD_CONTEXTS {
            let ctx = standard_context(name).unwrap();
            let mut a = Sampler::new(&ctx, 7);
            let mut b = Sampler::new(&ctx, 7);
            assert_eq!(a.elem(), b.elem());
            let (pa, ka) = a.generator_product(2, 4, 12, 2).unwrap();
            let (pb, kb) = b.generator_product(2, 4, 12, 2).unwrap();
            assert_eq!(ka, kb);
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn units_invert() {
        for name in STANDARD_CONTEXTS {
            let ctx = standard_context(name).unwrap();
            let mut s = Sampler::new(&ctx, 3);
            for _ in 0..10 {
                let (u, v) = s.unit();
                assert!(ctx.ring.is_one(&ctx.ring.mul(&u, &v)), "{name}");
            }
        }
    }
}
