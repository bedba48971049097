//! Property tests for the chain/table correspondence and the field axioms.

use fqn::carlitz::{decompose, CarlitzChain, PoleSet};
use fqn::family::{is_permutation, FamilyInstance, LinearMap};
use fqn::gf::{FieldCtx, FieldElement};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx_pool() -> Vec<FieldCtx> {
    [(5u64, 1usize), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (17, 1), (3, 3), (7, 2)]
        .iter()
        .map(|&(p, r)| FieldCtx::new(p, r).unwrap())
        .collect()
}

/// Exhaustive chain/table equivalence on small fields: every family-valid
/// chain evaluates to exactly the piecewise table of its linear part and
/// pole set, and is a bijection.
#[test]
fn chain_table_equivalence_exhaustive_small() {
    for (p, r, n) in [(5u64, 1usize, 2usize), (5, 1, 3), (7, 1, 2), (3, 2, 2)] {
        let ctx = FieldCtx::new(p, r).unwrap();
        let q = ctx.q();
        let units: Vec<FieldElement> =
            ctx.elements().filter(|e| !e.is_zero()).collect();
        let mut stack = vec![0usize; n + 1];
        let mut valid_count = 0u64;
        loop {
            let constants: Vec<FieldElement> =
                stack.iter().map(|&i| units[i].clone()).collect();
            let chain = CarlitzChain::new(&ctx, constants).unwrap();
            if chain.validate().is_valid() {
                valid_count += 1;
                let g = chain.linear_part().unwrap();
                let poles = chain.poles().unwrap();
                let inst = FamilyInstance::build(&ctx, &g, &poles).unwrap();
                assert_eq!(chain.eval_table().as_slice(), inst.f_table());
                assert!(is_permutation(&ctx, inst.f_table()));
            }
            // odometer over (q-1)^(n+1) tuples
            let mut k = 0;
            loop {
                stack[k] += 1;
                if stack[k] < units.len() {
                    break;
                }
                stack[k] = 0;
                k += 1;
                if k > n {
                    break;
                }
            }
            if k > n {
                break;
            }
        }
        // n = 2 family-valid chains are exactly (c_0, c_1, -1/c_1).
        if n == 2 {
            assert_eq!(valid_count, (q - 1) * (q - 1), "q={q}");
        }
    }
}

fn random_instance(
    ctx: &FieldCtx,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (LinearMap, PoleSet) {
    let q = ctx.q();
    let a = ctx.from_index(rng.random_range(1..q));
    let b = ctx.from_index(rng.random_range(1..q));
    let g = LinearMap::new(ctx, a, b).unwrap();
    let xn = ctx.div(&ctx.neg(&g.b), &g.a).unwrap();
    let xn_idx = ctx.index_of(&xn);
    let mut allowed: Vec<u64> = (1..q).filter(|&i| i != xn_idx).collect();
    for j in 0..n - 2 {
        let k = j + rng.random_range(0..(allowed.len() - j));
        allowed.swap(j, k);
    }
    let mut points = vec![ctx.zero()];
    points.extend(allowed[..n - 2].iter().map(|&i| ctx.from_index(i)));
    points.push(xn);
    (g, PoleSet::new(ctx, points).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// decompose is a right inverse of (linear_part, poles), and the chain's
    /// evaluation table reproduces the piecewise definition everywhere.
    #[test]
    fn decompose_round_trip(ctx_idx in 0usize..9, n in 2usize..=5, seed in any::<u64>()) {
        let pool = ctx_pool();
        let ctx = &pool[ctx_idx];
        prop_assume!((n as u64) < ctx.q());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, poles) = random_instance(ctx, n, &mut rng);
        let dec = decompose(ctx, &g, &poles).unwrap();
        prop_assert!(dec.chain.validate().is_valid());
        prop_assert!(dec.chain.constants().iter().all(|c| !c.is_zero()));
        prop_assert_eq!(dec.chain.linear_part().unwrap(), g.clone());
        prop_assert_eq!(dec.chain.poles().unwrap(), poles.clone());
        let inst = FamilyInstance::build(ctx, &g, &poles).unwrap();
        let table = dec.chain.eval_table();
        prop_assert_eq!(table.as_slice(), inst.f_table());
    }

    /// Field axioms on randomly drawn triples across the context pool.
    #[test]
    fn field_axioms_random(ctx_idx in 0usize..9, xi in any::<u64>(), yi in any::<u64>(), zi in any::<u64>()) {
        let pool = ctx_pool();
        let ctx = &pool[ctx_idx];
        let q = ctx.q();
        let x = ctx.from_index(xi % q);
        let y = ctx.from_index(yi % q);
        let z = ctx.from_index(zi % q);
        prop_assert_eq!(ctx.add(&x, &y), ctx.add(&y, &x));
        prop_assert_eq!(ctx.mul(&x, &y), ctx.mul(&y, &x));
        prop_assert_eq!(
            ctx.mul(&ctx.mul(&x, &y), &z),
            ctx.mul(&x, &ctx.mul(&y, &z))
        );
        prop_assert_eq!(
            ctx.mul(&ctx.add(&x, &y), &z),
            ctx.add(&ctx.mul(&x, &z), &ctx.mul(&y, &z))
        );
        prop_assert_eq!(ctx.sub(&x, &x), ctx.zero());
        let inv_prod = ctx.mul(&ctx.pow_qm2(&x), &x);
        if x.is_zero() {
            prop_assert!(inv_prod.is_zero());
        } else {
            prop_assert_eq!(inv_prod, ctx.one());
        }
    }

    /// The value profile conservation laws hold for arbitrary total maps,
    /// not just family instances.
    #[test]
    fn profile_conservation_random_tables(ctx_idx in 0usize..9, seed in any::<u64>()) {
        let pool = ctx_pool();
        let ctx = &pool[ctx_idx];
        let q = ctx.q();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<_> = (0..q).map(|_| ctx.from_index(rng.random_range(0..q))).collect();
        let prof = fqn::family::ValueProfile::from_table(ctx, &table);
        prop_assert_eq!(prof.counts.iter().sum::<u64>(), q);
        let weighted: u64 = prof.counts.iter().enumerate().map(|(i, &v)| i as u64 * v).sum();
        prop_assert_eq!(weighted, q);
        prop_assert_eq!(prof.counts.iter().skip(1).sum::<u64>() as usize, prof.size());
        prop_assert!(prof.counts[prof.max_count as usize] >= 1);
    }
}
