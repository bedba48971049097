//! Exhaustive and sampled enumeration of the attained value-set sizes
//! |V_F| over all instances for a fixed (q, n), with one witness per size.
//!
//! The scan works on element indices with precomputed operation tables.
//! Off the poles F is the affine map (a+1)x + b, so |V_F| needs only the
//! n pole images and the n affine images the poles displace; a bitmask
//! covers q <= 64 and a stamped scan covers larger fields. The (a, b)
//! grid is partitioned across workers and partial results merge by
//! lexicographically-least witness key, so output does not depend on the
//! worker count.

use super::{FamilyError, LinearMap};
use crate::carlitz::{decompose, PoleSet};
use crate::gf::{FieldCtx, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectrumOptions {
    pub mode: SpectrumMode,
    /// Maximum table evaluations (instances times q, plus table setup).
    pub budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { mode: SpectrumMode::Exhaustive, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumWitness {
    pub a: FieldElement,
    pub b: FieldElement,
    pub poles: Vec<FieldElement>,
    pub chain: Vec<FieldElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub size: usize,
    pub witness: SpectrumWitness,
    /// Number of instances attaining this size; exhaustive mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub q: u64,
    pub n: usize,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub total_instances: u64,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumReport {
    pub fn sizes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.size).collect()
    }

    pub fn contains_size(&self, size: usize) -> bool {
        self.entries.iter().any(|e| e.size == size)
    }
}

/// Index-level operation tables for one field.
pub(crate) struct IdxOps {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    one: u32,
}

impl IdxOps {
    pub(crate) fn build(ctx: &FieldCtx) -> IdxOps {
        let q = ctx.q() as usize;
        let elems: Vec<FieldElement> = ctx.elements().collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = ctx.index_of(&ctx.add(&elems[i], &elems[j])) as u32;
                mul[i * q + j] = ctx.index_of(&ctx.mul(&elems[i], &elems[j])) as u32;
            }
        }
        let neg = (0..q)
            .map(|i| ctx.index_of(&ctx.neg(&elems[i])) as u32)
            .collect();
        let inv = (0..q)
            .map(|i| ctx.index_of(&ctx.pow_qm2(&elems[i])) as u32)
            .collect();
        let one = ctx.index_of(&ctx.one()) as u32;
        IdxOps { q, add, mul, neg, inv, one }
    }

    #[inline]
    fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline]
    fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.q + y as usize]
    }

    #[inline]
    fn neg(&self, x: u32) -> u32 {
        self.neg[x as usize]
    }

    #[inline]
    fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    /// -b/a for nonzero a.
    #[inline]
    fn pole_anchor(&self, a: u32, b: u32) -> u32 {
        self.mul(self.neg(b), self.inv(a))
    }
}

/// Ascending interior-candidate indices: everything except 0 and x_n.
fn interior_allowed(q: usize, xn: u32) -> Vec<u32> {
    (1..q as u32).filter(|&i| i != xn).collect()
}

/// Lexicographic ordered k-tuples of distinct entries of `allowed`
/// (which is ascending), delivered into a shared buffer.
fn for_each_tuple(allowed: &[u32], k: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(
        allowed: &[u32],
        used: &mut [bool],
        buf: &mut Vec<u32>,
        k: usize,
        f: &mut impl FnMut(&[u32]),
    ) {
        if buf.len() == k {
            f(buf);
            return;
        }
        for i in 0..allowed.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            buf.push(allowed[i]);
            rec(allowed, used, buf, k, f);
            buf.pop();
            used[i] = false;
        }
    }
    if k == 0 {
        f(&[]);
        return;
    }
    let mut used = vec![false; allowed.len()];
    let mut buf = Vec::with_capacity(k);
    rec(allowed, &mut used, &mut buf, k, f);
}

/// Number of instances for (q, n): (q-1)^2 ordered choices of interior poles.
fn instance_count(q: u64, n: usize) -> u128 {
    let mut count = (q as u128 - 1) * (q as u128 - 1);
    for j in 0..n.saturating_sub(2) {
        count *= q as u128 - 2 - j as u128;
    }
    count
}

/// |V_F| for one instance given pole indices (poles[0] = 0, last = -b/a).
/// `a1` is the index of a+1.
fn instance_size(ops: &IdxOps, a: u32, a1: u32, b: u32, poles: &[u32], scratch: &mut Scratch) -> usize {
    let q = ops.q;
    let n = poles.len();
    if q <= 64 {
        let full: u64 = if q == 64 { !0u64 } else { (1u64 << q) - 1 };
        // F(x_1) = 0 and F(x_i) = a x_{i-1} + x_i + b for i >= 2.
        let mut mask_f: u64 = 1;
        for i in 1..n {
            let v = ops.add(ops.add(ops.mul(a, poles[i - 1]), poles[i]), b);
            mask_f |= 1u64 << v;
        }
        let mask = if a1 == 0 {
            // a = -1: off the poles F is constantly b.
            mask_f | (1u64 << b)
        } else {
            let mut mask_g: u64 = 0;
            for &x in poles {
                mask_g |= 1u64 << ops.add(ops.mul(a1, x), b);
            }
            (full & !mask_g) | mask_f
        };
        mask.count_ones() as usize
    } else {
        scratch.epoch += 1;
        let epoch = scratch.epoch;
        scratch.pole_mark[poles[0] as usize] = epoch;
        scratch.pole_val[poles[0] as usize] = 0;
        for i in 1..n {
            let v = ops.add(ops.add(ops.mul(a, poles[i - 1]), poles[i]), b);
            scratch.pole_mark[poles[i] as usize] = epoch;
            scratch.pole_val[poles[i] as usize] = v;
        }
        let mut distinct = 0usize;
        for delta in 0..q as u32 {
            let v = if scratch.pole_mark[delta as usize] == epoch {
                scratch.pole_val[delta as usize]
            } else {
                ops.add(ops.mul(a1, delta), b)
            };
            if scratch.seen[v as usize] != epoch {
                scratch.seen[v as usize] = epoch;
                distinct += 1;
            }
        }
        distinct
    }
}

struct Scratch {
    epoch: u64,
    pole_mark: Vec<u64>,
    pole_val: Vec<u32>,
    seen: Vec<u64>,
}

impl Scratch {
    fn new(q: usize) -> Scratch {
        Scratch {
            epoch: 0,
            pole_mark: vec![0; q],
            pole_val: vec![0; q],
            seen: vec![0; q],
        }
    }
}

/// Per-size accumulator; the witness key (a, b, interior tuple) follows
/// enumeration order, so the minimum key is the first instance visited.
#[derive(Clone)]
struct SizeAcc {
    count: u64,
    a: u32,
    b: u32,
    interior: Vec<u32>,
}

fn merge_maps(
    mut left: BTreeMap<usize, SizeAcc>,
    right: BTreeMap<usize, SizeAcc>,
) -> BTreeMap<usize, SizeAcc> {
    for (size, acc) in right {
        match left.get_mut(&size) {
            None => {
                left.insert(size, acc);
            }
            Some(cur) => {
                cur.count += acc.count;
                let newer = (acc.a, acc.b, &acc.interior);
                let older = (cur.a, cur.b, &cur.interior);
                if newer < older {
                    cur.a = acc.a;
                    cur.b = acc.b;
                    cur.interior = acc.interior;
                }
            }
        }
    }
    left
}

/// Enumerates attained |V_F| values for the family at (q, n).
///
/// Exhaustive mode walks a over F_q*, then b over F_q*, then interior poles
/// in lexicographic order; sample mode draws seeded uniform instances.
/// Witnesses are the first instance in that order attaining each size.
pub fn enumerate_spectrum(
    ctx: &FieldCtx,
    n: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport, FamilyError> {
    let q = ctx.q();
    if n < 2 || n as u64 > q - 1 {
        return Err(FamilyError::InvalidN { n, q });
    }
    let setup_cost = 2u128 * (q as u128) * (q as u128);
    let (instances, work): (u128, u128) = match opts.mode {
        SpectrumMode::Exhaustive => {
            let c = instance_count(q, n);
            (c, c * q as u128)
        }
        SpectrumMode::Sample { count, .. } => (count as u128, count as u128 * q as u128),
    };
    let required = setup_cost + work;
    if required > opts.budget as u128 {
        return Err(FamilyError::BudgetExceeded { required, budget: opts.budget });
    }

    let ops = IdxOps::build(ctx);
    let k = n - 2;

    let merged: BTreeMap<usize, SizeAcc> = match opts.mode {
        SpectrumMode::Exhaustive => {
            let pairs: Vec<(u32, u32)> = (1..q as u32)
                .flat_map(|a| (1..q as u32).map(move |b| (a, b)))
                .collect();
            pairs
                .par_iter()
                .map_init(
                    || Scratch::new(q as usize),
                    |scratch, &(a, b)| {
                        let mut local: BTreeMap<usize, SizeAcc> = BTreeMap::new();
                        let a1 = ops.add(a, ops.one);
                        let xn = ops.pole_anchor(a, b);
                        let allowed = interior_allowed(q as usize, xn);
                        let mut poles = vec![0u32; n];
                        poles[n - 1] = xn;
                        for_each_tuple(&allowed, k, &mut |interior| {
                            poles[1..n - 1].copy_from_slice(interior);
                            let size = instance_size(&ops, a, a1, b, &poles, scratch);
                            match local.get_mut(&size) {
                                None => {
                                    local.insert(
                                        size,
                                        SizeAcc { count: 1, a, b, interior: interior.to_vec() },
                                    );
                                }
                                Some(acc) => acc.count += 1,
                            }
                        });
                        local
                    },
                )
                .reduce(BTreeMap::new, merge_maps)
        }
        SpectrumMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scratch = Scratch::new(q as usize);
            let mut map: BTreeMap<usize, SizeAcc> = BTreeMap::new();
            let mut poles = vec![0u32; n];
            for _ in 0..count {
                let a = rng.random_range(1..q as u32);
                let b = rng.random_range(1..q as u32);
                let a1 = ops.add(a, ops.one);
                let xn = ops.pole_anchor(a, b);
                let mut allowed = interior_allowed(q as usize, xn);
                for j in 0..k {
                    let t = j + rng.random_range(0..(allowed.len() - j) as u32) as usize;
                    allowed.swap(j, t);
                }
                poles[n - 1] = xn;
                poles[1..n - 1].copy_from_slice(&allowed[..k]);
                let size = instance_size(&ops, a, a1, b, &poles, &mut scratch);
                match map.get_mut(&size) {
                    None => {
                        // first sample attaining this size is the witness
                        map.insert(
                            size,
                            SizeAcc { count: 1, a, b, interior: allowed[..k].to_vec() },
                        );
                    }
                    Some(acc) => acc.count += 1,
                }
            }
            map
        }
    };

    let entries = merged
        .into_iter()
        .map(|(size, acc)| {
            let a = ctx.from_index(acc.a as u64);
            let b = ctx.from_index(acc.b as u64);
            let g = LinearMap::new(ctx, a.clone(), b.clone()).expect("a, b nonzero");
            let mut points = Vec::with_capacity(n);
            points.push(ctx.zero());
            for &i in &acc.interior {
                points.push(ctx.from_index(i as u64));
            }
            points.push(ctx.div(&ctx.neg(&b), &a).unwrap());
            let poles = PoleSet::new(ctx, points.clone()).expect("enumerated poles are distinct");
            let chain = decompose(ctx, &g, &poles)
                .expect("valid (g, poles) always decomposes")
                .chain;
            SpectrumEntry {
                size,
                witness: SpectrumWitness {
                    a,
                    b,
                    poles: points,
                    chain: chain.constants().to_vec(),
                },
                count: match opts.mode {
                    SpectrumMode::Exhaustive => Some(acc.count),
                    SpectrumMode::Sample { .. } => None,
                },
            }
        })
        .collect();

    let (mode, sample_count, seed) = match opts.mode {
        SpectrumMode::Exhaustive => ("exhaustive".to_string(), None, None),
        SpectrumMode::Sample { count, seed } => ("sample".to_string(), Some(count), Some(seed)),
    };
    Ok(SpectrumReport {
        q,
        n,
        mode,
        sample_count,
        seed,
        total_instances: instances as u64,
        entries,
    })
}

/// Walks every instance of the family at (q, n) in enumeration order,
/// handing (g, poles) to the visitor. Slow path: materializes field
/// elements; intended for cross-checking and modest (q, n).
pub fn visit_all_instances(
    ctx: &FieldCtx,
    n: usize,
    mut visitor: impl FnMut(&LinearMap, &PoleSet),
) -> Result<(), FamilyError> {
    let q = ctx.q();
    if n < 2 || n as u64 > q - 1 {
        return Err(FamilyError::InvalidN { n, q });
    }
    let ops = IdxOps::build(ctx);
    let k = n - 2;
    for a_idx in 1..q as u32 {
        for b_idx in 1..q as u32 {
            let a = ctx.from_index(a_idx as u64);
            let b = ctx.from_index(b_idx as u64);
            let g = LinearMap::new(ctx, a.clone(), b.clone()).unwrap();
            let xn = ops.pole_anchor(a_idx, b_idx);
            let allowed = interior_allowed(q as usize, xn);
            for_each_tuple(&allowed, k, &mut |interior| {
                let mut points = Vec::with_capacity(n);
                points.push(ctx.zero());
                for &i in interior {
                    points.push(ctx.from_index(i as u64));
                }
                points.push(ctx.from_index(xn as u64));
                let poles = PoleSet::new(ctx, points).expect("enumerated poles are distinct");
                visitor(&g, &poles);
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilyInstance, ValueProfile};

    #[test]
    fn spectrum_small_fields_n2() {
        let opts = SpectrumOptions::default();
        let f5 = FieldCtx::new(5, 1).unwrap();
        let rep = enumerate_spectrum(&f5, 2, &opts).unwrap();
        assert_eq!(rep.sizes(), vec![3]);
        assert_eq!(rep.total_instances, 16);

        let f7 = FieldCtx::new(7, 1).unwrap();
        let rep = enumerate_spectrum(&f7, 2, &opts).unwrap();
        assert_eq!(rep.sizes(), vec![3, 5]);
    }

    #[test]
    fn spectrum_f9_n3() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        let rep = enumerate_spectrum(&f9, 3, &SpectrumOptions::default()).unwrap();
        assert_eq!(rep.sizes(), vec![2, 4, 6, 7, 9]);
    }

    #[test]
    fn fast_path_matches_profile_scan() {
        for (p, r, n) in [(5u64, 1usize, 2usize), (5, 1, 3), (7, 1, 3), (3, 2, 3), (13, 1, 2)] {
            let ctx = FieldCtx::new(p, r).unwrap();
            let rep = enumerate_spectrum(&ctx, n, &SpectrumOptions::default()).unwrap();
            let mut sizes: BTreeMap<usize, u64> = BTreeMap::new();
            visit_all_instances(&ctx, n, |g, poles| {
                let inst = FamilyInstance::build(&ctx, g, poles).unwrap();
                let prof = ValueProfile::from_table(&ctx, inst.f_plus_table());
                *sizes.entry(prof.size()).or_insert(0) += 1;
            })
            .unwrap();
            let expect: Vec<(usize, u64)> = sizes.into_iter().collect();
            let got: Vec<(usize, u64)> = rep
                .entries
                .iter()
                .map(|e| (e.size, e.count.unwrap()))
                .collect();
            assert_eq!(got, expect, "q={} n={}", ctx.q(), n);
        }
    }

    #[test]
    fn witnesses_check_out() {
        let ctx = FieldCtx::new(7, 1).unwrap();
        let rep = enumerate_spectrum(&ctx, 3, &SpectrumOptions::default()).unwrap();
        for e in &rep.entries {
            let g = LinearMap::new(&ctx, e.witness.a.clone(), e.witness.b.clone()).unwrap();
            let inst =
                FamilyInstance::build_from_points(&ctx, &g, &e.witness.poles).unwrap();
            let prof = ValueProfile::from_table(&ctx, inst.f_plus_table());
            assert_eq!(prof.size(), e.size);
            // the stored chain reproduces f pointwise
            let chain =
                crate::carlitz::CarlitzChain::new(&ctx, e.witness.chain.clone()).unwrap();
            assert_eq!(chain.eval_table().as_slice(), inst.f_table());
        }
    }

    #[test]
    fn stamped_path_matches_profile_scan_above_64() {
        // q = 67 exceeds the bitmask width, exercising the epoch-stamped scan.
        let ctx = FieldCtx::new(67, 1).unwrap();
        let rep = enumerate_spectrum(&ctx, 2, &SpectrumOptions::default()).unwrap();
        let mut sizes: BTreeMap<usize, u64> = BTreeMap::new();
        visit_all_instances(&ctx, 2, |g, poles| {
            let inst = FamilyInstance::build(&ctx, g, poles).unwrap();
            let prof = ValueProfile::from_table(&ctx, inst.f_plus_table());
            *sizes.entry(prof.size()).or_insert(0) += 1;
        })
        .unwrap();
        let expect: Vec<(usize, u64)> = sizes.into_iter().collect();
        let got: Vec<(usize, u64)> = rep
            .entries
            .iter()
            .map(|e| (e.size, e.count.unwrap()))
            .collect();
        assert_eq!(got, expect);
        assert_eq!(rep.sizes(), vec![3, 65]);
    }

    #[test]
    fn witnesses_are_first_in_enumeration_order() {
        let ctx = FieldCtx::new(7, 1).unwrap();
        let rep = enumerate_spectrum(&ctx, 3, &SpectrumOptions::default()).unwrap();
        let mut first: BTreeMap<usize, (FieldElement, FieldElement, Vec<FieldElement>)> =
            BTreeMap::new();
        visit_all_instances(&ctx, 3, |g, poles| {
            let inst = FamilyInstance::build(&ctx, g, poles).unwrap();
            let prof = ValueProfile::from_table(&ctx, inst.f_plus_table());
            first.entry(prof.size()).or_insert_with(|| {
                (g.a.clone(), g.b.clone(), poles.points().to_vec())
            });
        })
        .unwrap();
        for e in &rep.entries {
            let (a, b, poles) = &first[&e.size];
            assert_eq!(&e.witness.a, a);
            assert_eq!(&e.witness.b, b);
            assert_eq!(&e.witness.poles, poles);
        }
    }

    #[test]
    fn sample_mode_is_reproducible() {
        let ctx = FieldCtx::new(13, 1).unwrap();
        let opts = SpectrumOptions {
            mode: SpectrumMode::Sample { count: 200, seed: 42 },
            budget: DEFAULT_BUDGET,
        };
        let rep1 = enumerate_spectrum(&ctx, 4, &opts).unwrap();
        let rep2 = enumerate_spectrum(&ctx, 4, &opts).unwrap();
        assert_eq!(rep1, rep2);
        assert!(!rep1.entries.is_empty());
        assert!(rep1.entries.iter().all(|e| e.count.is_none()));
    }

    #[test]
    fn budget_guard() {
        let ctx = FieldCtx::new(13, 1).unwrap();
        let opts = SpectrumOptions { mode: SpectrumMode::Exhaustive, budget: 1000 };
        let err = enumerate_spectrum(&ctx, 6, &opts).unwrap_err();
        assert!(matches!(err, FamilyError::BudgetExceeded { .. }));
    }

    #[test]
    fn invalid_n_rejected() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        let opts = SpectrumOptions::default();
        assert!(matches!(
            enumerate_spectrum(&ctx, 1, &opts),
            Err(FamilyError::InvalidN { .. })
        ));
        assert!(matches!(
            enumerate_spectrum(&ctx, 5, &opts),
            Err(FamilyError::InvalidN { .. })
        ));
    }
}
