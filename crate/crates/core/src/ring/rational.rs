//! Rational arithmetic with a gcd that stays fast when one operand is small.
//!
//! Series coefficients tend to have long numerators over short
//! denominators. The binary gcd used by `Ratio::reduce` is quadratic on such
//! unbalanced pairs; one remainder step first brings both into a machine
//! word.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn gcd_u(a: &BigUint, b: &BigUint) -> BigUint {
    if let (Some(x), Some(y)) = (a.to_u64(), b.to_u64()) {
        return BigUint::from(x.gcd(&y));
    }
    let (mut a, mut b) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    loop {
        if b.is_zero() {
            return a;
        }
        if let Some(small) = b.to_u64() {
            let r = (&a % small).to_u64().expect("remainder below a u64");
            return BigUint::from(small.gcd(&r));
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
}

pub(crate) fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, gcd_u(a.magnitude(), b.magnitude()))
}

/// `n/d` in lowest terms with `d > 0`; `d ≠ 0`.
fn reduced(n: BigInt, d: BigInt) -> BigRational {
    if n.is_zero() {
        return BigRational::zero();
    }
    let g = gcd(&n, &d);
    let (n, d) = if g.is_one() { (n, d) } else { (n / &g, d / &g) };
    if d.sign() == Sign::Minus {
        BigRational::new_raw(-n, -d)
    } else {
        BigRational::new_raw(n, d)
    }
}

pub(crate) fn add(x: &BigRational, y: &BigRational) -> BigRational {
    if x.is_zero() {
        return y.clone();
    }
    if y.is_zero() {
        return x.clone();
    }
    let (a, b, c, d) = (x.numer(), x.denom(), y.numer(), y.denom());
    if b.is_one() && d.is_one() {
        return BigRational::from_integer(a + c);
    }
    if b == d {
        return reduced(a + c, b.clone());
    }
    let g = gcd(b, d);
    if g.is_one() {
        return reduced(a * d + c * b, b * d);
    }
    let (bg, dg) = (b / &g, d / &g);
    reduced(a * &dg + c * &bg, bg * d)
}

pub(crate) fn neg(x: &BigRational) -> BigRational {
    BigRational::new_raw(-x.numer(), x.denom().clone())
}

pub(crate) fn sub(x: &BigRational, y: &BigRational) -> BigRational {
    add(x, &neg(y))
}

pub(crate) fn mul(x: &BigRational, y: &BigRational) -> BigRational {
    if x.is_zero() || y.is_zero() {
        return BigRational::zero();
    }
    let (a, b, c, d) = (x.numer(), x.denom(), y.numer(), y.denom());
    if b.is_one() && d.is_one() {
        return BigRational::from_integer(a * c);
    }
    let g1 = gcd(a, d);
    let g2 = gcd(c, b);
    let (a, d) = if g1.is_one() { (a.clone(), d.clone()) } else { (a / &g1, d / &g1) };
    let (c, b) = if g2.is_one() { (c.clone(), b.clone()) } else { (c / &g2, b / &g2) };
    BigRational::new_raw(a * c, b * d)
}

/// Sum of products kept over a common denominator, reduced once at the end.
pub(crate) struct Acc {
    num: BigInt,
    den: BigInt,
}

impl Acc {
    pub(crate) fn new() -> Acc {
        Acc {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    /// `self += ±x·y`.
    pub(crate) fn add_prod(&mut self, x: &BigRational, y: &BigRational, negate: bool) {
        if x.is_zero() || y.is_zero() {
            return;
        }
        let mut p = x.numer() * y.numer();
        if negate {
            p = -p;
        }
        let (b, d) = (x.denom(), y.denom());
        if b.is_one() && d.is_one() {
            if self.den.is_one() {
                self.num += p;
            } else {
                self.num += p * &self.den;
            }
            return;
        }
        let small = match (b.to_u64(), d.to_u64(), self.den.to_u64()) {
            (Some(b), Some(d), Some(den)) => b.checked_mul(d).map(|q| (q, den)),
            _ => None,
        };
        if let Some((q, den)) = small {
            let g = den.gcd(&q);
            let (sd, qg) = (den / g, q / g);
            if let Some(lcm) = den.checked_mul(qg) {
                if qg != 1 {
                    self.num *= qg;
                    self.den = BigInt::from(lcm);
                }
                if sd != 1 {
                    p *= sd;
                }
                self.num += p;
                return;
            }
        }
        let q = b * d;
        let g = gcd(&self.den, &q);
        let (sd, qg) = (&self.den / &g, q / &g);
        // common denominator den·q/g
        if !qg.is_one() {
            self.num *= &qg;
            self.den *= &qg;
        }
        self.num += if sd.is_one() { p } else { p * sd };
    }

    pub(crate) fn finish(self) -> BigRational {
        reduced(self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn unbalanced_gcd() {
        let big = BigInt::from(3u8).pow(200) * BigInt::from(1u64 << 40);
        assert_eq!(gcd(&big, &BigInt::from(1u64 << 50)), BigInt::from(1u64 << 40));
        assert_eq!(gcd(&BigInt::from(-12), &BigInt::from(18)), BigInt::from(6));
        assert_eq!(gcd(&BigInt::zero(), &BigInt::from(-5)), BigInt::from(5));
    }

    proptest! {
        #[test]
        fn agrees_with_ratio(a in -1000i64..1000, b in 1i64..200, c in -1000i64..1000, d in 1i64..200) {
            let (x, y) = (q(a, b), q(c, d));
            prop_assert_eq!(add(&x, &y), &x + &y);
            prop_assert_eq!(sub(&x, &y), &x - &y);
            prop_assert_eq!(mul(&x, &y), &x * &y);
            prop_assert_eq!(neg(&x), -&x);
        }

        #[test]
        fn accumulator_matches_sum(v in proptest::collection::vec((-50i64..50, 1i64..9, -50i64..50, 1i64..9, any::<bool>()), 0..12)) {
            let mut acc = Acc::new();
            let mut want = BigRational::zero();
            for &(a, b, c, d, neg) in &v {
                acc.add_prod(&q(a, b), &q(c, d), neg);
                let t = q(a, b) * q(c, d);
                want = if neg { want - t } else { want + t };
            }
            prop_assert_eq!(acc.finish(), want);
        }
    }
}
