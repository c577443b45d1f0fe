use novikov_k1::decompose::{assemble_c2, decompose_novikov};
use novikov_k1::matrix::{invert_series_matrix, witt_triangularize, TwistedMatrix};
use novikov_k1::random::{standard_context, Sampler, STANDARD_CONTEXTS};
use novikov_k1::series::{Flavor, Prec};
use novikov_k1::witt::{first_coefficient, witt_group_op, WittGroupElem, WittOp};
use proptest::prelude::*;

fn ring_index() -> impl Strategy<Value = usize> {
    0..STANDARD_CONTEXTS.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_coefficient_is_additive(ri in ring_index(), seed in any::<u64>()) {
        let ctx = standard_context(STANDARD_CONTEXTS[ri]).unwrap();
        let mut s = Sampler::new(&ctx, seed);
        let u = WittGroupElem::new(s.witt(8));
        let v = WittGroupElem::new(s.witt(8));
        let uv = witt_group_op(WittOp::Mul, &u, &v).unwrap();
        let ring = &ctx.ring;
        prop_assert_eq!(first_coefficient(&uv), ring.add(&first_coefficient(&u), &first_coefficient(&v)));
        let k = witt_group_op(WittOp::Commutator, &u, &v).unwrap();
        prop_assert!(ring.is_zero(&first_coefficient(&k)));
        prop_assert!(u.mul(&u.inv()).is_one());
    }

    #[test]
    fn series_inverse_is_two_sided(ri in ring_index(), seed in any::<u64>(), n in 1usize..4) {
        let ctx = standard_context(STANDARD_CONTEXTS[ri]).unwrap();
        let mut s = Sampler::new(&ctx, seed);
        let m = s.series_matrix(n, 10);
        let p = invert_series_matrix(&m, 10).unwrap();
        let id = TwistedMatrix::identity(&ctx, Flavor::PowerSeries, n, Prec::Infinite);
        prop_assert!(p.alpha.mul(&p.beta).eq_below(&id, 10));
        prop_assert!(p.beta.mul(&p.alpha).eq_below(&id, 10));
    }

    #[test]
    fn triangularization_replays(ri in ring_index(), seed in any::<u64>(), n in 1usize..4) {
        let ctx = standard_context(STANDARD_CONTEXTS[ri]).unwrap();
        let mut s = Sampler::new(&ctx, seed);
        let b = s.unipotent_series_matrix(n, 10);
        let cert = witt_triangularize(&b, 10).unwrap();
        prop_assert_eq!(cert.replay(&b), cert.gamma.clone());
        prop_assert!(cert.gamma_is_triangular());
    }

    #[test]
    fn witt_vectors_round_trip(ri in ring_index(), seed in any::<u64>()) {
        let ctx = standard_context(STANDARD_CONTEXTS[ri]).unwrap();
        let mut s = Sampler::new(&ctx, seed);
        let w = s.witt(10);
        let d = decompose_novikov(&assemble_c2(&w).unwrap(), 10).unwrap();
        prop_assert_eq!(d.b2, w);
        prop_assert!(d.b3.module.is_zero(&ctx.ring));
    }
}
