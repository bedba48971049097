//! Instances F(x) = f(x) + x obtained by modifying a linear permutation
//! g(x) = ax + b at an ordered pole set, together with value-set statistics
//! (value set, multiplicity map, count vector, maximum count) and the
//! spectrum enumerator.

mod spectrum;

pub use spectrum::{
    enumerate_spectrum, visit_all_instances, SpectrumEntry, SpectrumMode, SpectrumOptions,
    SpectrumReport, SpectrumWitness,
};

use crate::carlitz::{CarlitzError, PoleSet};
use crate::gf::{FieldCtx, FieldElement, GfError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("linear map coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("pole anchor violated: {0}")]
    PoleAnchorMismatch(String),
    #[error("poles are not pairwise distinct")]
    DuplicatePoles,
    #[error("n = {n} out of range for q = {q} (need 2 <= n <= q-1)")]
    InvalidN { n: usize, q: u64 },
    #[error("enumeration needs {required} table evaluations, budget is {budget}; use sample mode or raise the budget")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// g(x) = ax + b with a, b nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMap {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl LinearMap {
    pub fn new(ctx: &FieldCtx, a: FieldElement, b: FieldElement) -> Result<Self, FamilyError> {
        ctx.check(&a)?;
        ctx.check(&b)?;
        if a.is_zero() || b.is_zero() {
            return Err(FamilyError::ZeroCoefficient);
        }
        Ok(LinearMap { a, b })
    }

    pub fn apply(&self, ctx: &FieldCtx, x: &FieldElement) -> FieldElement {
        ctx.add(&ctx.mul(&self.a, x), &self.b)
    }
}

/// A member of the family: the permutation f agreeing with g off the poles,
/// cyclically shifted on them, plus the full tables of f and F = f + x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    ctx: FieldCtx,
    g: LinearMap,
    poles: PoleSet,
    f_table: Vec<FieldElement>,
    f_plus_table: Vec<FieldElement>,
}

impl FamilyInstance {
    /// Builds the instance. The pole set must satisfy x_1 = 0 (enforced by
    /// `PoleSet`) and x_n = -b/a, with 2 <= n <= q-1.
    pub fn build(ctx: &FieldCtx, g: &LinearMap, poles: &PoleSet) -> Result<Self, FamilyError> {
        let q = ctx.q();
        let n = poles.n();
        if n < 2 || n as u64 > q - 1 {
            return Err(FamilyError::InvalidN { n, q });
        }
        let expected_last = ctx.div(&ctx.neg(&g.b), &g.a).unwrap();
        if poles.last() != &expected_last {
            return Err(FamilyError::PoleAnchorMismatch(format!(
                "x_n = {} but -b/a = {}",
                poles.last(),
                expected_last
            )));
        }
        let x = poles.points();
        let mut f_table: Vec<FieldElement> =
            ctx.elements().map(|d| g.apply(ctx, &d)).collect();
        // f(x_i) = g(x_{i-1}) for i >= 2, and f(x_1) = g(x_n) = 0.
        f_table[ctx.index_of(&x[0]) as usize] = g.apply(ctx, &x[n - 1]);
        for i in 1..n {
            f_table[ctx.index_of(&x[i]) as usize] = g.apply(ctx, &x[i - 1]);
        }
        debug_assert!(f_table[ctx.index_of(&x[0]) as usize].is_zero());
        let f_plus_table: Vec<FieldElement> = ctx
            .elements()
            .zip(&f_table)
            .map(|(d, f)| ctx.add(f, &d))
            .collect();
        Ok(FamilyInstance {
            ctx: ctx.clone(),
            g: g.clone(),
            poles: poles.clone(),
            f_table,
            f_plus_table,
        })
    }

    /// Convenience entry point from raw pole points.
    pub fn build_from_points(
        ctx: &FieldCtx,
        g: &LinearMap,
        points: &[FieldElement],
    ) -> Result<Self, FamilyError> {
        let poles = PoleSet::new(ctx, points.to_vec()).map_err(|e| match e {
            CarlitzError::InvalidPoleSet(msg) if msg.contains("coincide") => {
                FamilyError::DuplicatePoles
            }
            CarlitzError::InvalidPoleSet(msg) => FamilyError::PoleAnchorMismatch(msg),
            CarlitzError::Field(e) => FamilyError::Field(e),
            other => FamilyError::PoleAnchorMismatch(other.to_string()),
        })?;
        Self::build(ctx, g, &poles)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn g(&self) -> &LinearMap {
        &self.g
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    /// Table of f in element-index order.
    pub fn f_table(&self) -> &[FieldElement] {
        &self.f_table
    }

    /// Table of F = f + x in element-index order.
    pub fn f_plus_table(&self) -> &[FieldElement] {
        &self.f_plus_table
    }

    pub fn f_value(&self, x: &FieldElement) -> &FieldElement {
        &self.f_table[self.ctx.index_of(x) as usize]
    }

    pub fn f_plus_value(&self, x: &FieldElement) -> &FieldElement {
        &self.f_plus_table[self.ctx.index_of(x) as usize]
    }

    /// True iff both f and f + x are bijections.
    pub fn is_complete_mapping(&self) -> bool {
        is_permutation(&self.ctx, &self.f_table) && is_permutation(&self.ctx, &self.f_plus_table)
    }
}

/// True iff the table (one entry per field element) is a bijection of F_q.
pub fn is_permutation(ctx: &FieldCtx, table: &[FieldElement]) -> bool {
    let q = ctx.q() as usize;
    if table.len() != q {
        return false;
    }
    let mut seen = vec![false; q];
    for v in table {
        let i = ctx.index_of(v) as usize;
        if seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Complete-mapping check for a raw permutation table: the table and the
/// table plus identity must both be bijections.
pub fn is_complete_mapping_table(ctx: &FieldCtx, f_table: &[FieldElement]) -> bool {
    if !is_permutation(ctx, f_table) {
        return false;
    }
    let shifted: Vec<FieldElement> = ctx
        .elements()
        .zip(f_table)
        .map(|(d, f)| ctx.add(f, &d))
        .collect();
    is_permutation(ctx, &shifted)
}

/// The field sum of all table outputs.
pub fn sum_of_values(ctx: &FieldCtx, table: &[FieldElement]) -> FieldElement {
    let mut acc = ctx.zero();
    for v in table {
        acc = ctx.add(&acc, v);
    }
    acc
}

/// Exact multiset statistics of a total map on F_q: the value set, the
/// multiplicity of every attained value, the count vector (v_0, ..., v_M)
/// where v_i counts elements with exactly i preimages, and the maximum
/// count M.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueProfile {
    pub values: Vec<FieldElement>,
    pub mult: Vec<(FieldElement, u64)>,
    pub counts: Vec<u64>,
    pub max_count: u64,
}

impl ValueProfile {
    pub fn from_table(ctx: &FieldCtx, table: &[FieldElement]) -> Self {
        let q = ctx.q() as usize;
        assert_eq!(table.len(), q, "profile needs a total map on F_q");
        let mut fibers = vec![0u64; q];
        for v in table {
            fibers[ctx.index_of(v) as usize] += 1;
        }
        let max_count = fibers.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0u64; max_count as usize + 1];
        let mut values = Vec::new();
        let mut mult = Vec::new();
        for (i, &m) in fibers.iter().enumerate() {
            counts[m as usize] += 1;
            if m > 0 {
                let elem = ctx.from_index(i as u64);
                values.push(elem.clone());
                mult.push((elem, m));
            }
        }
        ValueProfile { values, mult, counts, max_count }
    }

    /// |V|, the number of attained values.
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn multiplicity(&self, v: &FieldElement) -> u64 {
        self.mult
            .iter()
            .find(|(e, _)| e == v)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    /// Nonzero entries of the count vector as (index, count) pairs, the way
    /// interior zero runs are conventionally collapsed; v_0 is always kept.
    pub fn sparse_counts(&self) -> Vec<(usize, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i == 0 || v != 0)
            .map(|(i, &v)| (i, v))
            .collect()
    }
}

/// Coefficients (little-endian, trailing zeros trimmed) of the unique
/// polynomial of degree <= q-1 agreeing with the table on all of F_q.
pub fn interpolate(ctx: &FieldCtx, table: &[FieldElement]) -> Vec<FieldElement> {
    let q = ctx.q() as usize;
    assert_eq!(table.len(), q, "interpolation needs a total map on F_q");
    // Master product M(x) = prod_(gamma) (x - gamma), degree q.
    let mut master = vec![ctx.one()];
    for gamma in ctx.elements() {
        let neg = ctx.neg(&gamma);
        let mut next = vec![ctx.zero(); master.len() + 1];
        for (i, c) in master.iter().enumerate() {
            next[i + 1] = ctx.add(&next[i + 1], c);
            next[i] = ctx.add(&next[i], &ctx.mul(c, &neg));
        }
        master = next;
    }
    let mut acc = vec![ctx.zero(); q];
    for (idx, delta) in ctx.elements().enumerate() {
        let fv = &table[idx];
        if fv.is_zero() {
            continue;
        }
        // Synthetic division: quotient of M by (x - delta), degree q-1.
        let mut quot = vec![ctx.zero(); q];
        let mut carry = master[q].clone();
        for i in (0..q).rev() {
            quot[i] = carry.clone();
            carry = ctx.add(&master[i], &ctx.mul(&carry, &delta));
        }
        let norm = eval_poly(ctx, &quot, &delta);
        let scale = ctx.div(fv, &norm).expect("distinct nodes give nonzero normalizer");
        for (a, qc) in acc.iter_mut().zip(&quot) {
            *a = ctx.add(a, &ctx.mul(qc, &scale));
        }
    }
    while acc.len() > 1 && acc.last().map(|c| c.is_zero()) == Some(true) {
        acc.pop();
    }
    if acc.len() == 1 && acc[0].is_zero() {
        acc.clear();
    }
    acc
}

/// Horner evaluation of a little-endian coefficient list.
pub fn eval_poly(ctx: &FieldCtx, coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = ctx.zero();
    for c in coeffs.iter().rev() {
        acc = ctx.add(&ctx.mul(&acc, x), c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::CarlitzChain;

    fn f13() -> FieldCtx {
        FieldCtx::new(13, 1).unwrap()
    }

    fn elems(ctx: &FieldCtx, vs: &[i64]) -> Vec<FieldElement> {
        vs.iter().map(|&v| ctx.element(v)).collect()
    }

    fn example2_instance() -> FamilyInstance {
        let ctx = f13();
        let g = LinearMap::new(&ctx, ctx.element(-1), ctx.element(2)).unwrap();
        FamilyInstance::build_from_points(&ctx, &g, &elems(&ctx, &[0, 11, 9, 2])).unwrap()
    }

    #[test]
    fn build_instance_matches_piecewise_definition() {
        let inst = example2_instance();
        let ctx = inst.ctx().clone();
        assert_eq!(inst.f_value(&ctx.element(0)), &ctx.element(0));
        assert_eq!(inst.f_value(&ctx.element(11)), &ctx.element(2));
        assert_eq!(inst.f_value(&ctx.element(9)), &ctx.element(4));
        assert_eq!(inst.f_value(&ctx.element(2)), &ctx.element(6));
        for d in ctx.elements() {
            let idx = ctx.index_of(&d);
            if ![0u64, 11, 9, 2].contains(&idx) {
                let expect = ctx.add(&ctx.neg(&d), &ctx.element(2));
                assert_eq!(inst.f_value(&d), &expect);
            }
        }
        assert!(is_permutation(&ctx, inst.f_table()));
    }

    #[test]
    fn instance_agrees_with_chain_evaluation() {
        let ctx = f13();
        let g = LinearMap::new(&ctx, ctx.element(5), ctx.element(3)).unwrap();
        let inst =
            FamilyInstance::build_from_points(&ctx, &g, &elems(&ctx, &[0, 12, 1, 8, 6, 2]))
                .unwrap();
        let chain = CarlitzChain::new(&ctx, elems(&ctx, &[7, 2, 3, 6, 10, 5, 2])).unwrap();
        assert_eq!(inst.f_table(), chain.eval_table().as_slice());
    }

    #[test]
    fn pole_anchor_is_enforced() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let g = LinearMap::new(&f5, f5.element(1), f5.element(1)).unwrap();
        let err =
            FamilyInstance::build_from_points(&f5, &g, &elems(&f5, &[0, 3])).unwrap_err();
        assert!(matches!(err, FamilyError::PoleAnchorMismatch(_)));
    }

    #[test]
    fn duplicate_poles_are_rejected() {
        let ctx = f13();
        let g = LinearMap::new(&ctx, ctx.element(-1), ctx.element(2)).unwrap();
        let err =
            FamilyInstance::build_from_points(&ctx, &g, &elems(&ctx, &[0, 11, 11, 2])).unwrap_err();
        assert_eq!(err, FamilyError::DuplicatePoles);
    }

    #[test]
    fn value_profile_of_example2() {
        let inst = example2_instance();
        let ctx = inst.ctx().clone();
        let prof = ValueProfile::from_table(&ctx, inst.f_plus_table());
        assert_eq!(prof.values, elems(&ctx, &[0, 2, 8]));
        assert_eq!(prof.multiplicity(&ctx.element(0)), 3);
        assert_eq!(prof.multiplicity(&ctx.element(2)), 9);
        assert_eq!(prof.multiplicity(&ctx.element(8)), 1);
        assert_eq!(prof.max_count, 9);
        // conservation: sum v_i = q and sum i v_i = q
        assert_eq!(prof.counts.iter().sum::<u64>(), 13);
        let weighted: u64 = prof.counts.iter().enumerate().map(|(i, &v)| i as u64 * v).sum();
        assert_eq!(weighted, 13);
    }

    #[test]
    fn value_profile_of_identity() {
        let ctx = f13();
        let table: Vec<FieldElement> = ctx.elements().collect();
        let prof = ValueProfile::from_table(&ctx, &table);
        assert_eq!(prof.size(), 13);
        assert_eq!(prof.counts, vec![0, 13]);
        assert_eq!(prof.max_count, 1);
        assert_eq!(prof.sparse_counts(), vec![(0, 0), (1, 13)]);
    }

    #[test]
    fn sums_vanish() {
        let ctx = f13();
        let inst = example2_instance();
        assert!(sum_of_values(&ctx, inst.f_plus_table()).is_zero());
        let identity: Vec<FieldElement> = ctx.elements().collect();
        assert!(sum_of_values(&ctx, &identity).is_zero());
        let constant: Vec<FieldElement> = (0..13).map(|_| ctx.element(7)).collect();
        assert!(sum_of_values(&ctx, &constant).is_zero());
    }

    #[test]
    fn complete_mapping_checks() {
        let ctx = f13();
        let identity: Vec<FieldElement> = ctx.elements().collect();
        assert!(is_complete_mapping_table(&ctx, &identity));
        let inst = example2_instance();
        assert!(!inst.is_complete_mapping());
    }

    #[test]
    fn interpolation_roundtrip() {
        let ctx = f13();
        let identity: Vec<FieldElement> = ctx.elements().collect();
        assert_eq!(interpolate(&ctx, &identity), elems(&ctx, &[0, 1]));

        let constant: Vec<FieldElement> = (0..13).map(|_| ctx.element(7)).collect();
        assert_eq!(interpolate(&ctx, &constant), elems(&ctx, &[7]));

        let inst = example2_instance();
        let coeffs = interpolate(&ctx, inst.f_table());
        assert!(coeffs.len() <= 13);
        for (d, expect) in ctx.elements().zip(inst.f_table()) {
            assert_eq!(&eval_poly(&ctx, &coeffs, &d), expect);
        }
    }

    #[test]
    fn interpolation_over_extension_field() {
        let f25 = FieldCtx::new(5, 2).unwrap();
        let table: Vec<FieldElement> = f25
            .elements()
            .map(|d| f25.add(&f25.mul(&d, &d), &f25.from_coeffs(&[1, 2]).unwrap()))
            .collect();
        let coeffs = interpolate(&f25, &table);
        for (d, expect) in f25.elements().zip(&table) {
            assert_eq!(&eval_poly(&f25, &coeffs, &d), expect);
        }
    }
}
