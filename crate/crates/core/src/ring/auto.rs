//! Ring automorphisms ρ with an explicit inverse and integer powers ρᵏ.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Elem, Ring, RingError, RingKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutoKind {
    Identity,
    /// `a + bi ↦ a − bi` on the Gaussian rationals.
    ComplexConjugation,
    /// `a ↦ u·a·u⁻¹`.
    ConjugationByUnit(Elem),
    /// Permutation of group elements, extended linearly to the group ring.
    GroupAutomorphism(Vec<usize>),
}

#[derive(Debug)]
struct Inner {
    ring: Ring,
    kind: AutoKind,
    inverse: AutoKind,
    // Smallest p ≥ 1 with ρᵖ = id, when known.
    period: Option<i64>,
}

/// Shared handle to an automorphism of a fixed ring.
#[derive(Clone, Debug)]
pub struct Automorphism(Arc<Inner>);

impl PartialEq for Automorphism {
    fn eq(&self, other: &Automorphism) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ring == other.0.ring && self.0.kind == other.0.kind)
    }
}
impl Eq for Automorphism {}

const MAX_PERIOD_SEARCH: i64 = 24;

impl Automorphism {
    pub fn identity(ring: &Ring) -> Automorphism {
        Automorphism(Arc::new(Inner {
            ring: ring.clone(),
            kind: AutoKind::Identity,
            inverse: AutoKind::Identity,
            period: Some(1),
        }))
    }

    pub fn new(ring: &Ring, kind: AutoKind) -> Result<Automorphism, RingError> {
        let bad = |m: String| Err(RingError::InvalidAutomorphism(m));
        let (inverse, period) = match &kind {
            AutoKind::Identity => (AutoKind::Identity, Some(1)),
            AutoKind::ComplexConjugation => {
                if *ring.kind() != RingKind::GaussianRationals {
                    return bad(format!("complex conjugation needs gaussian-rationals, not {ring}"));
                }
                (AutoKind::ComplexConjugation, Some(2))
            }
            AutoKind::ConjugationByUnit(u) => {
                if !ring.contains(u) {
                    return bad(format!("{u:?} is not an element of {ring}"));
                }
                let u_inv = match ring.invert(u) {
                    Ok(v) => v,
                    Err(e) => return bad(format!("conjugating element is not a unit ({e})")),
                };
                let period = conjugation_period(ring, u);
                (AutoKind::ConjugationByUnit(u_inv), period)
            }
            AutoKind::GroupAutomorphism(perm) => {
                let RingKind::GroupRing { group, .. } = ring.kind() else {
                    return bad(format!("group automorphism needs a group ring, not {ring}"));
                };
                if !group.is_automorphism(perm) {
                    return bad("permutation does not respect the multiplication table".into());
                }
                let mut inv = vec![0; perm.len()];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p] = i;
                }
                let mut period = 1;
                let mut cur = perm.clone();
                while cur.iter().enumerate().any(|(i, &p)| i != p) {
                    cur = cur.iter().map(|&p| perm[p]).collect();
                    period += 1;
                }
                (AutoKind::GroupAutomorphism(inv), Some(period))
            }
        };
        Ok(Automorphism(Arc::new(Inner {
            ring: ring.clone(),
            kind,
            inverse,
            period,
        })))
    }

    pub fn ring(&self) -> &Ring {
        &self.0.ring
    }

    pub fn kind(&self) -> &AutoKind {
        &self.0.kind
    }

    /// Descriptor of ρ⁻¹.
    pub fn inverse_kind(&self) -> &AutoKind {
        &self.0.inverse
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism(Arc::new(Inner {
            ring: self.0.ring.clone(),
            kind: self.0.inverse.clone(),
            inverse: self.0.kind.clone(),
            period: self.0.period,
        }))
    }

    pub fn period(&self) -> Option<i64> {
        self.0.period
    }

    pub fn is_identity(&self) -> bool {
        self.0.period == Some(1)
    }

    /// ρᵏ(a) for any integer k; negative powers use the stored inverse.
    pub fn apply(&self, k: i64, a: &Elem) -> Elem {
        let k = match self.0.period {
            Some(p) => k.rem_euclid(p),
            None => k,
        };
        if k == 0 {
            return a.clone();
        }
        let (kind, steps) = if k > 0 {
            (&self.0.kind, k)
        } else {
            (&self.0.inverse, -k)
        };
        let ring = &self.0.ring;
        match kind {
            AutoKind::Identity => a.clone(),
            AutoKind::ComplexConjugation => {
                if steps % 2 == 0 {
                    a.clone()
                } else {
                    match a {
                        Elem::Gauss(x, y) => Elem::Gauss(x.clone(), -y),
                        _ => unreachable!("conjugation on a non-Gaussian payload"),
                    }
                }
            }
            AutoKind::ConjugationByUnit(u) => {
                let other = if std::ptr::eq(kind, &self.0.kind) {
                    &self.0.inverse
                } else {
                    &self.0.kind
                };
                let AutoKind::ConjugationByUnit(u_inv) = other else {
                    unreachable!("inverse descriptor mismatch")
                };
                let mut x = a.clone();
                for _ in 0..steps {
                    x = ring.mul(&ring.mul(u, &x), u_inv);
                }
                x
            }
            AutoKind::GroupAutomorphism(perm) => {
                let Elem::Grp(m) = a else {
                    unreachable!("group automorphism on a non-group payload")
                };
                let mut out = BTreeMap::new();
                for (g, c) in m {
                    let mut h = *g;
                    for _ in 0..steps {
                        h = perm[h];
                    }
                    out.insert(h, c.clone());
                }
                Elem::Grp(out)
            }
        }
    }

    /// Entrywise ρᵏ on a slice.
    pub fn apply_all(&self, k: i64, v: &[Elem]) -> Vec<Elem> {
        v.iter().map(|x| self.apply(k, x)).collect()
    }
}

// Smallest p with uᵖ central (so conjugation by uᵖ is trivial), searched up
// to a small bound.
fn conjugation_period(ring: &Ring, u: &Elem) -> Option<i64> {
    if ring.is_commutative() {
        return Some(1);
    }
    ring.field()?;
    let basis = ring.basis();
    let mut pow = u.clone();
    for p in 1..=MAX_PERIOD_SEARCH {
        if basis.iter().all(|b| ring.mul(&pow, b) == ring.mul(b, &pow)) {
            return Some(p);
        }
        pow = ring.mul(&pow, u);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, FiniteGroup};
    use num_traits::Zero;

    fn is_real(a: &Elem) -> bool {
        matches!(a, Elem::Gauss(_, y) if y.is_zero())
    }

    fn i() -> Elem {
        Elem::Gauss(rat(0), rat(1))
    }

    #[test]
    fn conjugation_powers() {
        let r = Ring::gaussian_rationals();
        let rho = Automorphism::new(&r, AutoKind::ComplexConjugation).unwrap();
        assert_eq!(rho.apply(1, &i()), Elem::Gauss(rat(0), rat(-1)));
        assert_eq!(rho.apply(2, &i()), i());
        assert_eq!(rho.apply(-1, &i()), Elem::Gauss(rat(0), rat(-1)));
        assert!(is_real(&rho.apply(1, &r.from_i64(3))));
    }

    #[test]
    fn swap_conjugation_moves_e11_to_e22() {
        let r = Ring::matrix_ring(2, Ring::rationals()).unwrap();
        let z = || Elem::Q(rat(0));
        let o = || Elem::Q(rat(1));
        let swap = Elem::Mat(vec![z(), o(), o(), z()]);
        let rho = Automorphism::new(&r, AutoKind::ConjugationByUnit(swap.clone())).unwrap();
        let e11 = Elem::Mat(vec![o(), z(), z(), z()]);
        let e22 = Elem::Mat(vec![z(), z(), z(), o()]);
        // direct u·e11·u⁻¹ with u⁻¹ = u
        assert_eq!(r.mul(&r.mul(&swap, &e11), &swap), e22);
        assert_eq!(rho.apply(1, &e11), e22);
        assert_eq!(rho.period(), Some(2));
    }

    #[test]
    fn powers_compose() {
        let r = Ring::matrix_ring(2, Ring::rationals()).unwrap();
        let u = Elem::Mat(vec![Elem::Q(rat(1)), Elem::Q(rat(1)), Elem::Q(rat(0)), Elem::Q(rat(1))]);
        let rho = Automorphism::new(&r, AutoKind::ConjugationByUnit(u)).unwrap();
        assert_eq!(rho.period(), None);
        let a = Elem::Mat(vec![Elem::Q(rat(2)), Elem::Q(rat(0)), Elem::Q(rat(5)), Elem::Q(rat(-1))]);
        for j in -3..=3 {
            for k in -3..=3 {
                assert_eq!(rho.apply(j + k, &a), rho.apply(j, &rho.apply(k, &a)));
            }
        }
    }

    #[test]
    fn group_automorphism_validation() {
        let g = FiniteGroup::symmetric3();
        let r = Ring::group_ring(g.clone(), Ring::rationals()).unwrap();
        let s = g.index_of("s01").unwrap();
        let perm: Vec<usize> = (0..6).map(|x| g.mul(g.mul(s, x), g.inverse(s))).collect();
        let rho = Automorphism::new(&r, AutoKind::GroupAutomorphism(perm)).unwrap();
        assert_eq!(rho.period(), Some(2));
        assert!(Automorphism::new(&r, AutoKind::GroupAutomorphism(vec![1, 0, 2, 3, 4, 5])).is_err());
        assert!(Automorphism::new(&Ring::rationals(), AutoKind::ComplexConjugation).is_err());
    }
}
