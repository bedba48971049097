//! Generators for the explicit families with prescribed value sets, each
//! paired with its predicted profile, plus a brute-force verifier that
//! compares prediction against the observed profile.

use crate::carlitz::{decompose, CarlitzChain, CarlitzError, PoleSet};
use crate::family::{FamilyError, FamilyInstance, LinearMap, ValueProfile};
use crate::gf::{FieldCtx, FieldElement, GfError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(&'static str),
    #[error("congruence violated: {0}")]
    CongruenceViolation(String),
    #[error("no element of F_q satisfies {0}")]
    NoSuchRoot(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("characteristic {p} too small: need {need}")]
    CharacteristicTooSmall { p: u64, need: String },
    #[error("order mismatch: ord = {found}, need {expected}")]
    OrderMismatch { found: u64, expected: u64 },
    #[error("coset representative must avoid {{0, 1}}")]
    BadCosetRep,
    #[error("alpha does not generate a subgroup of size >= 2")]
    NotAGenerator,
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Carlitz(#[from] CarlitzError),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// The families this module can generate and verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Cor3i,
    Cor3ii,
    Cor5i,
    Cor5ii,
    Cor5iii,
    Cor6,
    Thm7i,
    Thm7ii,
    Thm7iii,
    Thm7iv,
    Coset,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 11] = [
        FamilyKind::Cor3i,
        FamilyKind::Cor3ii,
        FamilyKind::Cor5i,
        FamilyKind::Cor5ii,
        FamilyKind::Cor5iii,
        FamilyKind::Cor6,
        FamilyKind::Thm7i,
        FamilyKind::Thm7ii,
        FamilyKind::Thm7iii,
        FamilyKind::Thm7iv,
        FamilyKind::Coset,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Cor3i => "cor3i",
            FamilyKind::Cor3ii => "cor3ii",
            FamilyKind::Cor5i => "cor5i",
            FamilyKind::Cor5ii => "cor5ii",
            FamilyKind::Cor5iii => "cor5iii",
            FamilyKind::Cor6 => "cor6",
            FamilyKind::Thm7i => "thm7i",
            FamilyKind::Thm7ii => "thm7ii",
            FamilyKind::Thm7iii => "thm7iii",
            FamilyKind::Thm7iv => "thm7iv",
            FamilyKind::Coset => "coset",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyKind> {
        FamilyKind::ALL.iter().copied().find(|k| k.as_str() == s)
    }
}

/// Predicted value set: an explicit list or "everything except these".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSetPrediction {
    Exact(Vec<FieldElement>),
    Complement(Vec<FieldElement>),
}

/// What a construction promises about its profile. Exact families predict a
/// complete multiplicity map; bound-type families predict inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedProfile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_set: Option<ValueSetPrediction>,
    /// Predicted multiplicities for specific values.
    pub mult: Vec<(FieldElement, u64)>,
    /// Multiplicity of every attained value not listed in `mult`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult_rest: Option<u64>,
    /// Complete nonzero entries (i, v_i) of the count vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<(usize, u64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_count_le: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete_mapping: Option<bool>,
    pub source: String,
}

impl PredictedProfile {
    fn empty(source: &str) -> Self {
        PredictedProfile {
            value_set: None,
            mult: Vec::new(),
            mult_rest: None,
            counts: None,
            min_size: None,
            max_count_le: None,
            permutation: None,
            complete_mapping: None,
            source: source.to_string(),
        }
    }

    /// Fills `counts` from a complete multiplicity description: the listed
    /// multiplicities plus `rest` for the remaining `size - mult.len()`
    /// values.
    fn derive_counts(&mut self, q: u64, size: usize, rest: u64) {
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for (_, m) in &self.mult {
            *hist.entry(*m as usize).or_insert(0) += 1;
        }
        let rest_count = size as u64 - self.mult.len() as u64;
        if rest_count > 0 {
            *hist.entry(rest as usize).or_insert(0) += rest_count;
        }
        let missing = q - size as u64;
        if missing > 0 {
            *hist.entry(0).or_insert(0) += missing;
        }
        self.counts = Some(hist.into_iter().collect());
    }
}

/// A generated instance: the defining data in whichever form the family is
/// stated (a chain, or a linear map with its pole set), plus the prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceSpec {
    Chain(CarlitzChain),
    Pair { g: LinearMap, poles: PoleSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub kind: FamilyKind,
    pub ctx: FieldCtx,
    pub params: Vec<(String, serde_json::Value)>,
    pub spec: InstanceSpec,
    pub predicted: PredictedProfile,
}

impl Construction {
    /// Normalizes to (g, poles, chain) via the chain/pair correspondence.
    pub fn normalize(&self) -> Result<(LinearMap, PoleSet, CarlitzChain), ConstructError> {
        match &self.spec {
            InstanceSpec::Chain(chain) => {
                let g = chain.linear_part()?;
                let poles = chain.poles()?;
                Ok((g, poles, chain.clone()))
            }
            InstanceSpec::Pair { g, poles } => {
                let chain = decompose(&self.ctx, g, poles)?.chain;
                Ok((g.clone(), poles.clone(), chain))
            }
        }
    }

    pub fn instance(&self) -> Result<FamilyInstance, ConstructError> {
        let (g, poles, _) = self.normalize()?;
        Ok(FamilyInstance::build(&self.ctx, &g, &poles)?)
    }
}

/// Prediction vs brute force for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub family: String,
    pub q: u64,
    pub n: usize,
    pub params: Vec<(String, serde_json::Value)>,
    pub g: LinearMap,
    pub poles: Vec<FieldElement>,
    pub chain: Vec<FieldElement>,
    pub predicted: PredictedProfile,
    pub observed: ValueProfile,
    #[serde(rename = "match")]
    pub matches: bool,
    pub mismatches: Vec<String>,
}

/// Builds the instance, computes the observed profile of F = f + x by brute
/// force, and compares it field-by-field against the prediction.
pub fn verify(construction: &Construction) -> Result<ConstructionReport, ConstructError> {
    let ctx = &construction.ctx;
    let (g, poles, chain) = construction.normalize()?;
    let inst = FamilyInstance::build(ctx, &g, &poles)?;
    let observed = ValueProfile::from_table(ctx, inst.f_plus_table());
    let pred = &construction.predicted;
    let mut mismatches = Vec::new();

    if let Some(vs) = &pred.value_set {
        let expected: Vec<FieldElement> = match vs {
            ValueSetPrediction::Exact(v) => {
                let mut v = v.clone();
                v.sort_by_key(|e| ctx.index_of(e));
                v
            }
            ValueSetPrediction::Complement(missing) => ctx
                .elements()
                .filter(|e| !missing.contains(e))
                .collect(),
        };
        if observed.values != expected {
            mismatches.push(format!(
                "value_set: predicted {} elements, observed {}",
                expected.len(),
                observed.values.len()
            ));
        }
    }
    for (elem, m) in &pred.mult {
        let got = observed.multiplicity(elem);
        if got != *m {
            mismatches.push(format!("mult({elem}): predicted {m}, observed {got}"));
        }
    }
    if let Some(rest) = pred.mult_rest {
        for (elem, got) in &observed.mult {
            if pred.mult.iter().any(|(e, _)| e == elem) {
                continue;
            }
            if *got != rest {
                mismatches.push(format!("mult({elem}): predicted {rest}, observed {got}"));
            }
        }
    }
    if let Some(counts) = &pred.counts {
        let got = observed.sparse_counts();
        let got_nonzero: Vec<(usize, u64)> =
            got.into_iter().filter(|&(_, v)| v != 0).collect();
        let want: Vec<(usize, u64)> =
            counts.iter().copied().filter(|&(_, v)| v != 0).collect();
        if got_nonzero != want {
            mismatches.push(format!(
                "counts: predicted {:?}, observed {:?}",
                want, got_nonzero
            ));
        }
    }
    if let Some(min) = pred.min_size {
        if observed.size() < min {
            mismatches.push(format!("size: predicted >= {min}, observed {}", observed.size()));
        }
    }
    if let Some(max) = pred.max_count_le {
        if observed.max_count > max {
            mismatches.push(format!(
                "max_count: predicted <= {max}, observed {}",
                observed.max_count
            ));
        }
    }
    if let Some(perm) = pred.permutation {
        let got = observed.size() as u64 == ctx.q();
        if got != perm {
            mismatches.push(format!("permutation: predicted {perm}, observed {got}"));
        }
    }
    if let Some(cm) = pred.complete_mapping {
        let got = inst.is_complete_mapping();
        if got != cm {
            mismatches.push(format!("complete_mapping: predicted {cm}, observed {got}"));
        }
    }

    Ok(ConstructionReport {
        family: construction.kind.as_str().to_string(),
        q: ctx.q(),
        n: poles.n(),
        params: construction.params.clone(),
        g,
        poles: poles.points().to_vec(),
        chain: chain.constants().to_vec(),
        predicted: pred.clone(),
        observed,
        matches: mismatches.is_empty(),
        mismatches,
    })
}

fn param_elem(name: &str, e: &FieldElement) -> (String, serde_json::Value) {
    (name.to_string(), serde_json::to_value(e).unwrap())
}

fn nonzero(name: &'static str, e: &FieldElement) -> Result<(), ConstructError> {
    if e.is_zero() {
        return Err(ConstructError::ZeroParameter(name));
    }
    Ok(())
}

/// V_F = {0, -c, -2c} with count vector (q-3, 2, 1) at indices (0, 1, q-2);
/// the 3-constant chain (1/c^2, c, -1/c).
pub fn cor3_i(ctx: &FieldCtx, c: &FieldElement) -> Result<Construction, ConstructError> {
    nonzero("c", c)?;
    ctx.check(c)?;
    let c0 = ctx.inv(&ctx.mul(c, c)).unwrap();
    let c2 = ctx.neg(&ctx.inv(c).unwrap());
    let chain = CarlitzChain::new(ctx, vec![c0, c.clone(), c2])?;
    let q = ctx.q();
    let neg_c = ctx.neg(c);
    let neg_2c = ctx.neg(&ctx.add(c, c));
    let mut pred = PredictedProfile::empty("cor3i");
    pred.value_set = Some(ValueSetPrediction::Exact(vec![
        ctx.zero(),
        neg_c.clone(),
        neg_2c.clone(),
    ]));
    pred.mult = vec![(ctx.zero(), 1), (neg_2c, 1), (neg_c, q - 2)];
    pred.derive_counts(q, 3, 1);
    Ok(Construction {
        kind: FamilyKind::Cor3i,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// V_F = F_q minus {c, -c} with count vector (2, q-3, 1) at indices (0, 1, 3);
/// the 3-constant chain (-1/c^2, c, -1/c).
pub fn cor3_ii(ctx: &FieldCtx, c: &FieldElement) -> Result<Construction, ConstructError> {
    nonzero("c", c)?;
    ctx.check(c)?;
    let c0 = ctx.neg(&ctx.inv(&ctx.mul(c, c)).unwrap());
    let c2 = ctx.neg(&ctx.inv(c).unwrap());
    let chain = CarlitzChain::new(ctx, vec![c0, c.clone(), c2])?;
    let q = ctx.q();
    let mut pred = PredictedProfile::empty("cor3ii");
    pred.value_set = Some(ValueSetPrediction::Complement(vec![c.clone(), ctx.neg(c)]));
    pred.mult = vec![(ctx.zero(), 3)];
    pred.mult_rest = Some(1);
    pred.derive_counts(q, (q - 2) as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Cor3ii,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// The 4-constant chain (c0, c, d/c, -c/(d+1)) shared by the n = 3 families.
fn n3_chain(
    ctx: &FieldCtx,
    c0: FieldElement,
    c: &FieldElement,
    d: &FieldElement,
) -> Result<CarlitzChain, ConstructError> {
    let d1 = ctx.add(d, &ctx.one());
    let c2 = ctx.div(d, c).unwrap();
    let c3 = ctx.neg(&ctx.div(c, &d1).unwrap());
    Ok(CarlitzChain::new(ctx, vec![c0, c.clone(), c2, c3])?)
}

/// Primitive cube roots of unity, ascending by index. Exhaustive scan; q is
/// desk-scale.
pub fn primitive_cube_roots(ctx: &FieldCtx) -> Vec<FieldElement> {
    ctx.elements()
        .filter(|d| {
            let v = ctx.add(&ctx.add(&ctx.mul(d, d), d), &ctx.one());
            v.is_zero()
        })
        .collect()
}

/// Solutions d of (d+1)^2 = -1, ascending by index.
pub fn quartic_shift_roots(ctx: &FieldCtx) -> Vec<FieldElement> {
    let minus_one = ctx.neg(&ctx.one());
    ctx.elements()
        .filter(|d| {
            let d1 = ctx.add(d, &ctx.one());
            ctx.mul(&d1, &d1) == minus_one
        })
        .collect()
}

/// Permutation instance (complete mapping): q = 1 mod 3 and d a primitive
/// third root of unity.
pub fn cor5_i(
    ctx: &FieldCtx,
    c: &FieldElement,
    d: &FieldElement,
) -> Result<Construction, ConstructError> {
    if ctx.q() % 3 != 1 {
        return Err(ConstructError::CongruenceViolation(format!(
            "q = {} but need q = 1 mod 3",
            ctx.q()
        )));
    }
    nonzero("c", c)?;
    ctx.check(c)?;
    ctx.check(d)?;
    let probe = ctx.add(&ctx.add(&ctx.mul(d, d), d), &ctx.one());
    if !probe.is_zero() {
        return Err(ConstructError::BadParameter(format!(
            "d = {d} is not a primitive third root of unity"
        )));
    }
    let d1 = ctx.add(d, &ctx.one());
    let c0 = ctx.neg(&ctx.inv(&d1).unwrap());
    let chain = n3_chain(ctx, c0, c, d)?;
    let q = ctx.q();
    let mut pred = PredictedProfile::empty("cor5i");
    pred.permutation = Some(true);
    pred.complete_mapping = Some(true);
    pred.mult_rest = Some(1);
    pred.derive_counts(q, q as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Cor5i,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c), param_elem("d", d)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// V_F = F_q minus {d/c, (-d-2)/c}, maximum count 3 at -1/c: q = 5 mod 12
/// and (d+1)^2 = -1.
pub fn cor5_ii(
    ctx: &FieldCtx,
    c: &FieldElement,
    d: &FieldElement,
) -> Result<Construction, ConstructError> {
    if ctx.q() % 12 != 5 {
        return Err(ConstructError::CongruenceViolation(format!(
            "q = {} but need q = 5 mod 12",
            ctx.q()
        )));
    }
    nonzero("c", c)?;
    ctx.check(c)?;
    ctx.check(d)?;
    let d1 = ctx.add(d, &ctx.one());
    if ctx.mul(&d1, &d1) != ctx.neg(&ctx.one()) {
        return Err(ConstructError::BadParameter(format!("(d+1)^2 != -1 for d = {d}")));
    }
    let c0 = ctx.neg(&ctx.inv(&d1).unwrap());
    let chain = n3_chain(ctx, c0, c, d)?;
    let q = ctx.q();
    let missing = vec![
        ctx.div(d, c).unwrap(),
        ctx.div(&ctx.neg(&ctx.add(d, &ctx.element(2))), c).unwrap(),
    ];
    let triple = ctx.neg(&ctx.inv(c).unwrap());
    let mut pred = PredictedProfile::empty("cor5ii");
    pred.value_set = Some(ValueSetPrediction::Complement(missing));
    pred.mult = vec![(triple, 3)];
    pred.mult_rest = Some(1);
    pred.max_count_le = Some(3);
    pred.derive_counts(q, (q - 2) as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Cor5ii,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c), param_elem("d", d)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// V_F = F_q minus {d(d+1)/c, -(d+1)^2/c, -d^2/c} with count vector
/// (3, q-5, 1, 1): q = 11 mod 12, d outside {0, -1, -1/2}.
pub fn cor5_iii(
    ctx: &FieldCtx,
    c: &FieldElement,
    d: &FieldElement,
) -> Result<Construction, ConstructError> {
    if ctx.q() % 12 != 11 {
        return Err(ConstructError::CongruenceViolation(format!(
            "q = {} but need q = 11 mod 12",
            ctx.q()
        )));
    }
    nonzero("c", c)?;
    ctx.check(c)?;
    ctx.check(d)?;
    let minus_half = ctx.neg(&ctx.inv(&ctx.element(2)).unwrap());
    if d.is_zero() || *d == ctx.element(-1) || *d == minus_half {
        return Err(ConstructError::BadParameter(format!(
            "d = {d} must avoid {{0, -1, -1/2}}"
        )));
    }
    let d1 = ctx.add(d, &ctx.one());
    let c0 = ctx.inv(&ctx.mul(d, &d1)).unwrap();
    let chain = n3_chain(ctx, c0, c, d)?;
    let q = ctx.q();
    let missing = vec![
        ctx.div(&ctx.mul(d, &d1), c).unwrap(),
        ctx.neg(&ctx.div(&ctx.mul(&d1, &d1), c).unwrap()),
        ctx.neg(&ctx.div(&ctx.mul(d, d), c).unwrap()),
    ];
    // F(x_3) = -(d^2 + d + 1)/c carries multiplicity 2; 0 carries 3.
    let pair = ctx.neg(&ctx.div(&ctx.add(&ctx.add(&ctx.mul(d, d), d), &ctx.one()), c).unwrap());
    let mut pred = PredictedProfile::empty("cor5iii");
    pred.value_set = Some(ValueSetPrediction::Complement(missing));
    pred.mult = vec![(ctx.zero(), 3), (pair, 2)];
    pred.mult_rest = Some(1);
    pred.max_count_le = Some(3);
    pred.derive_counts(q, (q - 3) as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Cor5iii,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c), param_elem("d", d)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// |V_F| = 4: V_F = {0, (d^2-1)/c, d(d+1)/c, (d+1)(2d+1)/c} with counts
/// (q-4, 3, 1) at (0, 1, q-3); d outside {-2, -1, -1/2, 0, 1}.
pub fn cor6(
    ctx: &FieldCtx,
    c: &FieldElement,
    d: &FieldElement,
) -> Result<Construction, ConstructError> {
    nonzero("c", c)?;
    ctx.check(c)?;
    ctx.check(d)?;
    let minus_half = ctx.neg(&ctx.inv(&ctx.element(2)).unwrap());
    let banned = [ctx.element(-2), ctx.element(-1), minus_half, ctx.zero(), ctx.one()];
    if banned.contains(d) {
        return Err(ConstructError::BadParameter(format!(
            "d = {d} must avoid {{-2, -1, -1/2, 0, 1}}"
        )));
    }
    let d1 = ctx.add(d, &ctx.one());
    let c0 = ctx.neg(&ctx.inv(&ctx.mul(&d1, &d1)).unwrap());
    let chain = n3_chain(ctx, c0, c, d)?;
    let q = ctx.q();
    let two_d1 = ctx.add(&ctx.add(d, d), &ctx.one());
    let v1 = ctx.div(&ctx.sub(&ctx.mul(d, d), &ctx.one()), c).unwrap();
    let v2 = ctx.div(&ctx.mul(d, &d1), c).unwrap();
    let v3 = ctx.div(&ctx.mul(&d1, &two_d1), c).unwrap();
    let mut pred = PredictedProfile::empty("cor6");
    pred.value_set = Some(ValueSetPrediction::Exact(vec![
        ctx.zero(),
        v1.clone(),
        v2.clone(),
        v3.clone(),
    ]));
    pred.mult = vec![(ctx.zero(), 1), (v1, 1), (v3, 1), (v2, q - 3)];
    pred.derive_counts(q, 4, 1);
    Ok(Construction {
        kind: FamilyKind::Cor6,
        ctx: ctx.clone(),
        params: vec![param_elem("c", c), param_elem("d", d)],
        spec: InstanceSpec::Chain(chain),
        predicted: pred,
    })
}

/// |V_F| = n+1 via a = -1, b = n(n-1)/2 and the staircase pole set
/// x_i = x_{i-1} + (i-1); needs p > n(n+1).
pub fn thm7_i(ctx: &FieldCtx, n: usize) -> Result<Construction, ConstructError> {
    if n < 2 {
        return Err(ConstructError::BadParameter(format!("n = {n} must be >= 2")));
    }
    let p = ctx.p();
    if p <= (n as u64) * (n as u64 + 1) {
        return Err(ConstructError::CharacteristicTooSmall {
            p,
            need: format!("p > n(n+1) = {}", n * (n + 1)),
        });
    }
    let b_int = (n * (n - 1) / 2) as i64;
    let b = ctx.element(b_int);
    let g = LinearMap::new(ctx, ctx.element(-1), b.clone())?;
    let mut points = vec![ctx.zero()];
    for i in 2..=n {
        let prev = points[i - 2].clone();
        points.push(ctx.add(&prev, &ctx.element((i - 1) as i64)));
    }
    let poles = PoleSet::new(ctx, points)?;
    let q = ctx.q();
    let mut value_set = vec![ctx.zero()];
    let mut mult = vec![(ctx.zero(), 1u64)];
    for i in 0..n {
        let v = ctx.add(&b, &ctx.element(i as i64));
        value_set.push(v.clone());
        mult.push((v, if i == 0 { q - n as u64 } else { 1 }));
    }
    let mut pred = PredictedProfile::empty("thm7i");
    pred.value_set = Some(ValueSetPrediction::Exact(value_set));
    pred.mult = mult;
    pred.derive_counts(q, n + 1, 1);
    Ok(Construction {
        kind: FamilyKind::Thm7i,
        ctx: ctx.clone(),
        params: vec![("n".to_string(), serde_json::json!(n))],
        spec: InstanceSpec::Pair { g, poles },
        predicted: pred,
    })
}

/// Pole set of the order-n family: x_i = b * sum_{j=0}^{n-i} (-1/a)^{j+1}.
fn geometric_poles(
    ctx: &FieldCtx,
    n: usize,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<PoleSet, ConstructError> {
    let t = ctx.neg(&ctx.inv(a).unwrap());
    let mut points = Vec::with_capacity(n);
    for i in 1..=n {
        let mut sum = ctx.zero();
        let mut power = t.clone();
        for _ in 0..=(n - i) {
            sum = ctx.add(&sum, &power);
            power = ctx.mul(&power, &t);
        }
        points.push(ctx.mul(b, &sum));
    }
    Ok(PoleSet::new(ctx, points)?)
}

/// |V_F| = q-n with m(0) = n+1 and every other multiplicity 1: needs
/// q = 1 mod n and ord(-a) = n.
pub fn thm7_ii(
    ctx: &FieldCtx,
    n: usize,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<Construction, ConstructError> {
    if n < 2 {
        return Err(ConstructError::BadParameter(format!("n = {n} must be >= 2")));
    }
    if !(ctx.q() - 1).is_multiple_of(n as u64) {
        return Err(ConstructError::CongruenceViolation(format!(
            "q = {} but need q = 1 mod {n}",
            ctx.q()
        )));
    }
    nonzero("a", a)?;
    nonzero("b", b)?;
    ctx.check(a)?;
    ctx.check(b)?;
    let ord = ctx.order(&ctx.neg(a)).unwrap();
    if ord != n as u64 {
        return Err(ConstructError::OrderMismatch { found: ord, expected: n as u64 });
    }
    let g = LinearMap::new(ctx, a.clone(), b.clone())?;
    let poles = geometric_poles(ctx, n, a, b)?;
    let q = ctx.q();
    // Missing values: (-b/a) * <(-1/a)>, the full coset of the order-n group.
    let t = ctx.neg(&ctx.inv(a).unwrap());
    let lead = ctx.div(&ctx.neg(b), a).unwrap();
    let mut missing = Vec::with_capacity(n);
    let mut power = ctx.one();
    for _ in 0..n {
        missing.push(ctx.mul(&lead, &power));
        power = ctx.mul(&power, &t);
    }
    let mut pred = PredictedProfile::empty("thm7ii");
    pred.value_set = Some(ValueSetPrediction::Complement(missing));
    pred.mult = vec![(ctx.zero(), n as u64 + 1)];
    pred.mult_rest = Some(1);
    pred.derive_counts(q, (q - n as u64) as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Thm7ii,
        ctx: ctx.clone(),
        params: vec![
            ("n".to_string(), serde_json::json!(n)),
            param_elem("a", a),
            param_elem("b", b),
        ],
        spec: InstanceSpec::Pair { g, poles },
        predicted: pred,
    })
}

/// |V_F| >= q-n and maximum count at most 2: needs q = 1 mod 2n and
/// ord(a) = 2n; poles x_i = (b a^{i-1} - b)/(a+1).
pub fn thm7_iii(
    ctx: &FieldCtx,
    n: usize,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<Construction, ConstructError> {
    if n < 2 {
        return Err(ConstructError::BadParameter(format!("n = {n} must be >= 2")));
    }
    if !(ctx.q() - 1).is_multiple_of(2 * n as u64) {
        return Err(ConstructError::CongruenceViolation(format!(
            "q = {} but need q = 1 mod {}",
            ctx.q(),
            2 * n
        )));
    }
    nonzero("a", a)?;
    nonzero("b", b)?;
    ctx.check(a)?;
    ctx.check(b)?;
    let ord = ctx.order(a).unwrap();
    if ord != 2 * n as u64 {
        return Err(ConstructError::OrderMismatch { found: ord, expected: 2 * n as u64 });
    }
    let g = LinearMap::new(ctx, a.clone(), b.clone())?;
    let a1 = ctx.add(a, &ctx.one());
    let mut points = Vec::with_capacity(n);
    let mut z = b.clone();
    for _ in 1..=n {
        points.push(ctx.div(&ctx.sub(&z, b), &a1).unwrap());
        z = ctx.mul(&z, a);
    }
    let poles = PoleSet::new(ctx, points)?;
    let mut pred = PredictedProfile::empty("thm7iii");
    pred.min_size = Some((ctx.q() - n as u64) as usize);
    pred.max_count_le = Some(2);
    Ok(Construction {
        kind: FamilyKind::Thm7iii,
        ctx: ctx.clone(),
        params: vec![
            ("n".to_string(), serde_json::json!(n)),
            param_elem("a", a),
            param_elem("b", b),
        ],
        spec: InstanceSpec::Pair { g, poles },
        predicted: pred,
    })
}

/// V_F = {0, b, nb} with multiplicities (n-1, q-n, 1); collapses to
/// {0, b} when p divides n. Pole set x_i = (1-i)b, x_n = b.
pub fn thm7_iv(ctx: &FieldCtx, n: usize, b: &FieldElement) -> Result<Construction, ConstructError> {
    if n < 2 || n as u64 > ctx.q() - 1 {
        return Err(ConstructError::BadParameter(format!(
            "n = {n} out of range for q = {}",
            ctx.q()
        )));
    }
    let p = ctx.p();
    if p + 2 <= n as u64 {
        return Err(ConstructError::CharacteristicTooSmall {
            p,
            need: format!("p > n-2 = {}", n - 2),
        });
    }
    // p = n-1 collapses x_{n-1} = (2-n)b onto x_n = b.
    if p == n as u64 - 1 {
        return Err(ConstructError::CharacteristicTooSmall {
            p,
            need: format!("p = n-1 = {} degenerates the pole set", n - 1),
        });
    }
    nonzero("b", b)?;
    ctx.check(b)?;
    let g = LinearMap::new(ctx, ctx.element(-1), b.clone())?;
    let mut points = Vec::with_capacity(n);
    for i in 1..n {
        points.push(ctx.mul(&ctx.element(1 - i as i64), b));
    }
    points.push(b.clone());
    let poles = PoleSet::new(ctx, points)?;
    let q = ctx.q();
    let nb = ctx.mul(&ctx.element(n as i64), b);
    let mut pred = PredictedProfile::empty("thm7iv");
    if (n as u64).is_multiple_of(p) {
        // nb = 0: the size-2 case.
        pred.value_set = Some(ValueSetPrediction::Exact(vec![ctx.zero(), b.clone()]));
        pred.mult = vec![(ctx.zero(), n as u64), (b.clone(), q - n as u64)];
        pred.derive_counts(q, 2, 1);
    } else {
        pred.value_set =
            Some(ValueSetPrediction::Exact(vec![ctx.zero(), b.clone(), nb.clone()]));
        pred.mult =
            vec![(ctx.zero(), n as u64 - 1), (b.clone(), q - n as u64), (nb, 1)];
        pred.derive_counts(q, 3, 1);
    }
    Ok(Construction {
        kind: FamilyKind::Thm7iv,
        ctx: ctx.clone(),
        params: vec![
            ("n".to_string(), serde_json::json!(n)),
            param_elem("b", b),
        ],
        spec: InstanceSpec::Pair { g, poles },
        predicted: pred,
    })
}

/// V_F = F_q minus the coset c`<alpha>`: a = -1/alpha, b = -ac, poles as
/// in the order-n family. Needs ord(alpha) = |U| >= 2 and c outside {0, 1}.
pub fn thm8_coset(
    ctx: &FieldCtx,
    alpha: &FieldElement,
    c: &FieldElement,
) -> Result<Construction, ConstructError> {
    ctx.check(alpha)?;
    ctx.check(c)?;
    if alpha.is_zero() {
        return Err(ConstructError::NotAGenerator);
    }
    let n = ctx.order(alpha).unwrap() as usize;
    if n < 2 {
        return Err(ConstructError::NotAGenerator);
    }
    if c.is_zero() || *c == ctx.one() {
        return Err(ConstructError::BadCosetRep);
    }
    let a = ctx.neg(&ctx.inv(alpha).unwrap());
    let b = ctx.mul(&ctx.neg(&a), c);
    let g = LinearMap::new(ctx, a.clone(), b.clone())?;
    let poles = geometric_poles(ctx, n, &a, &b)?;
    let q = ctx.q();
    let mut missing = Vec::with_capacity(n);
    let mut power = ctx.one();
    for _ in 0..n {
        missing.push(ctx.mul(c, &power));
        power = ctx.mul(&power, alpha);
    }
    let mut pred = PredictedProfile::empty("coset");
    pred.value_set = Some(ValueSetPrediction::Complement(missing));
    pred.mult = vec![(ctx.zero(), n as u64 + 1)];
    pred.mult_rest = Some(1);
    pred.derive_counts(q, (q - n as u64) as usize, 1);
    Ok(Construction {
        kind: FamilyKind::Coset,
        ctx: ctx.clone(),
        params: vec![param_elem("alpha", alpha), param_elem("c", c)],
        spec: InstanceSpec::Pair { g, poles },
        predicted: pred,
    })
}

/// One parameter point for a family sweep.
#[derive(Debug, Clone, Default)]
pub struct SweepPoint {
    pub n: Option<usize>,
    pub c: Option<FieldElement>,
    pub d: Option<FieldElement>,
    pub a: Option<FieldElement>,
    pub b: Option<FieldElement>,
    pub alpha: Option<FieldElement>,
}

/// Builds a construction from a parameter point, erroring on missing or
/// inadmissible parameters.
pub fn build(
    kind: FamilyKind,
    ctx: &FieldCtx,
    point: &SweepPoint,
) -> Result<Construction, ConstructError> {
    let need = |o: &Option<FieldElement>, name: &str| -> Result<FieldElement, ConstructError> {
        o.clone()
            .ok_or_else(|| ConstructError::BadParameter(format!("missing parameter {name}")))
    };
    match kind {
        FamilyKind::Cor3i => cor3_i(ctx, &need(&point.c, "c")?),
        FamilyKind::Cor3ii => cor3_ii(ctx, &need(&point.c, "c")?),
        FamilyKind::Cor5i => {
            let d = match &point.d {
                Some(d) => d.clone(),
                None => primitive_cube_roots(ctx)
                    .into_iter()
                    .next()
                    .ok_or_else(|| ConstructError::NoSuchRoot("d^2 + d + 1 = 0".into()))?,
            };
            cor5_i(ctx, &need(&point.c, "c")?, &d)
        }
        FamilyKind::Cor5ii => {
            let d = match &point.d {
                Some(d) => d.clone(),
                None => quartic_shift_roots(ctx)
                    .into_iter()
                    .next()
                    .ok_or_else(|| ConstructError::NoSuchRoot("(d+1)^2 = -1".into()))?,
            };
            cor5_ii(ctx, &need(&point.c, "c")?, &d)
        }
        FamilyKind::Cor5iii => cor5_iii(ctx, &need(&point.c, "c")?, &need(&point.d, "d")?),
        FamilyKind::Cor6 => cor6(ctx, &need(&point.c, "c")?, &need(&point.d, "d")?),
        FamilyKind::Thm7i => {
            let n = point.n.ok_or_else(|| ConstructError::BadParameter("missing n".into()))?;
            thm7_i(ctx, n)
        }
        FamilyKind::Thm7ii => {
            let n = point.n.ok_or_else(|| ConstructError::BadParameter("missing n".into()))?;
            thm7_ii(ctx, n, &need(&point.a, "a")?, &need(&point.b, "b")?)
        }
        FamilyKind::Thm7iii => {
            let n = point.n.ok_or_else(|| ConstructError::BadParameter("missing n".into()))?;
            thm7_iii(ctx, n, &need(&point.a, "a")?, &need(&point.b, "b")?)
        }
        FamilyKind::Thm7iv => {
            let n = point.n.ok_or_else(|| ConstructError::BadParameter("missing n".into()))?;
            thm7_iv(ctx, n, &need(&point.b, "b")?)
        }
        FamilyKind::Coset => thm8_coset(ctx, &need(&point.alpha, "alpha")?, &need(&point.c, "c")?),
    }
}

/// Every admissible parameter point for a family over this field, in
/// deterministic order. `n_filter` restricts to one n (or one subgroup
/// size for the coset family); `b_only` keeps other parameters at their
/// first admissible value and sweeps b.
pub fn admissible_points(
    kind: FamilyKind,
    ctx: &FieldCtx,
    n_filter: Option<usize>,
    b_only: bool,
) -> Result<Vec<SweepPoint>, ConstructError> {
    let q = ctx.q();
    let units: Vec<FieldElement> = ctx.elements().filter(|e| !e.is_zero()).collect();
    let mut out = Vec::new();
    match kind {
        FamilyKind::Cor3i | FamilyKind::Cor3ii => {
            for c in &units {
                out.push(SweepPoint { c: Some(c.clone()), ..Default::default() });
            }
        }
        FamilyKind::Cor5i => {
            if q % 3 != 1 {
                return Err(ConstructError::CongruenceViolation(format!(
                    "q = {q} but need q = 1 mod 3"
                )));
            }
            let roots = primitive_cube_roots(ctx);
            if roots.is_empty() {
                return Err(ConstructError::NoSuchRoot("d^2 + d + 1 = 0".into()));
            }
            for d in roots {
                for c in &units {
                    out.push(SweepPoint {
                        c: Some(c.clone()),
                        d: Some(d.clone()),
                        ..Default::default()
                    });
                }
                if b_only {
                    break;
                }
            }
        }
        FamilyKind::Cor5ii => {
            if q % 12 != 5 {
                return Err(ConstructError::CongruenceViolation(format!(
                    "q = {q} but need q = 5 mod 12"
                )));
            }
            let roots = quartic_shift_roots(ctx);
            if roots.is_empty() {
                return Err(ConstructError::NoSuchRoot("(d+1)^2 = -1".into()));
            }
            for d in roots {
                for c in &units {
                    out.push(SweepPoint {
                        c: Some(c.clone()),
                        d: Some(d.clone()),
                        ..Default::default()
                    });
                }
            }
        }
        FamilyKind::Cor5iii => {
            if q % 12 != 11 {
                return Err(ConstructError::CongruenceViolation(format!(
                    "q = {q} but need q = 11 mod 12"
                )));
            }
            let minus_half = ctx.neg(&ctx.inv(&ctx.element(2)).unwrap());
            for d in ctx.elements() {
                if d.is_zero() || d == ctx.element(-1) || d == minus_half {
                    continue;
                }
                for c in &units {
                    out.push(SweepPoint {
                        c: Some(c.clone()),
                        d: Some(d.clone()),
                        ..Default::default()
                    });
                }
            }
        }
        FamilyKind::Cor6 => {
            let minus_half = ctx.neg(&ctx.inv(&ctx.element(2)).unwrap());
            let banned = [ctx.element(-2), ctx.element(-1), minus_half, ctx.zero(), ctx.one()];
            for d in ctx.elements() {
                if banned.contains(&d) {
                    continue;
                }
                for c in &units {
                    out.push(SweepPoint {
                        c: Some(c.clone()),
                        d: Some(d.clone()),
                        ..Default::default()
                    });
                }
            }
        }
        FamilyKind::Thm7i => {
            for n in 2.. {
                if ctx.p() <= (n as u64) * (n as u64 + 1) {
                    break;
                }
                if n_filter.is_some_and(|f| f != n) {
                    continue;
                }
                out.push(SweepPoint { n: Some(n), ..Default::default() });
            }
        }
        FamilyKind::Thm7ii => {
            for n in 2..=(q - 1) as usize {
                if !(q - 1).is_multiple_of(n as u64) || n_filter.is_some_and(|f| f != n) {
                    continue;
                }
                let a_values: Vec<FieldElement> = units
                    .iter()
                    .filter(|u| ctx.order(u).unwrap() == n as u64)
                    .map(|u| ctx.neg(u))
                    .collect();
                for a in a_values {
                    for b in &units {
                        out.push(SweepPoint {
                            n: Some(n),
                            a: Some(a.clone()),
                            b: Some(b.clone()),
                            ..Default::default()
                        });
                    }
                    if b_only {
                        return Ok(out);
                    }
                }
            }
        }
        FamilyKind::Thm7iii => {
            for n in 2..=((q - 1) / 2) as usize {
                if !(q - 1).is_multiple_of(2 * n as u64) || n_filter.is_some_and(|f| f != n) {
                    continue;
                }
                let a_values: Vec<FieldElement> = units
                    .iter()
                    .filter(|u| ctx.order(u).unwrap() == 2 * n as u64)
                    .cloned()
                    .collect();
                for a in a_values {
                    for b in &units {
                        out.push(SweepPoint {
                            n: Some(n),
                            a: Some(a.clone()),
                            b: Some(b.clone()),
                            ..Default::default()
                        });
                    }
                    if b_only {
                        return Ok(out);
                    }
                }
            }
        }
        FamilyKind::Thm7iv => {
            let p = ctx.p();
            for n in 2..=(q - 1).min(p) as usize {
                if n_filter.is_some_and(|f| f != n) {
                    continue;
                }
                for b in &units {
                    out.push(SweepPoint {
                        n: Some(n),
                        b: Some(b.clone()),
                        ..Default::default()
                    });
                }
            }
        }
        FamilyKind::Coset => {
            for alpha in &units {
                let ord = ctx.order(alpha).unwrap() as usize;
                if ord < 2 || n_filter.is_some_and(|f| f != ord) {
                    continue;
                }
                for c in &units {
                    if *c == ctx.one() {
                        continue;
                    }
                    out.push(SweepPoint {
                        alpha: Some(alpha.clone()),
                        c: Some(c.clone()),
                        ..Default::default()
                    });
                }
                if b_only {
                    break;
                }
            }
        }
    }
    Ok(out)
}
