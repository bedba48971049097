//! Chains of (q-2)-powers and translations: evaluation, the two-term
//! recursion for the chain coefficients, pole sets, validity checks, and
//! the decomposition from a linear map plus pole set back to a chain.

use crate::family::LinearMap;
use crate::gf::{FieldCtx, FieldElement, GfError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CarlitzError {
    #[error("chain constant c_{0} must be nonzero")]
    ZeroConstant(usize),
    #[error("a chain needs at least 3 constants (n >= 2), got {0}")]
    ChainTooShort(usize),
    #[error("alpha_{0} vanishes; the chain has no pole set of size n")]
    ZeroAlpha(usize),
    #[error("beta_{{n+1}} vanishes; the chain has no linear part")]
    ZeroBetaLast,
    #[error("chain is not family-valid: {0}")]
    NotFamilyValid(String),
    #[error("invalid pole set: {0}")]
    InvalidPoleSet(String),
    #[error("degenerate denominator during decomposition: {0}")]
    DegenerateDenominator(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Ordered poles x_1, ..., x_n: pairwise distinct with x_1 = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleSet {
    points: Vec<FieldElement>,
}

impl PoleSet {
    pub fn new(ctx: &FieldCtx, points: Vec<FieldElement>) -> Result<Self, CarlitzError> {
        if points.is_empty() {
            return Err(CarlitzError::InvalidPoleSet("empty pole set".into()));
        }
        for x in &points {
            ctx.check(x)?;
        }
        if !points[0].is_zero() {
            return Err(CarlitzError::InvalidPoleSet("x_1 must be 0".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(CarlitzError::InvalidPoleSet(format!(
                        "x_{} and x_{} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(PoleSet { points })
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn last(&self) -> &FieldElement {
        self.points.last().unwrap()
    }
}

/// The sequences alpha_0..alpha_{n+1}, beta_0..beta_{n+1} attached to a
/// chain: alpha_0 = 0, alpha_1 = c_0, beta_0 = 1, beta_1 = 0, then
/// alpha_k = c_{k-1} alpha_{k-1} + alpha_{k-2} and likewise for beta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionTable {
    pub alpha: Vec<FieldElement>,
    pub beta: Vec<FieldElement>,
}

/// Validity report: a chain represents an n-point modification of a linear
/// permutation iff all three conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainValidity {
    /// alpha_{n+1} = 0
    pub alpha_last_is_zero: bool,
    /// alpha_k != 0 for 1 <= k <= n
    pub interior_alphas_nonzero: bool,
    /// the n poles -beta_i/alpha_i are pairwise distinct
    pub poles_distinct: bool,
}

impl ChainValidity {
    pub fn is_valid(&self) -> bool {
        self.alpha_last_is_zero && self.interior_alphas_nonzero && self.poles_distinct
    }
}

/// A chain of constants c_0, ..., c_n in F_q*, n >= 2, representing the
/// permutation delta -> (...((c_0 delta)^{q-2} + c_1)^{q-2} ... + c_n)^{q-2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarlitzChain {
    ctx: FieldCtx,
    c: Vec<FieldElement>,
}

impl CarlitzChain {
    pub fn new(ctx: &FieldCtx, constants: Vec<FieldElement>) -> Result<Self, CarlitzError> {
        if constants.len() < 3 {
            return Err(CarlitzError::ChainTooShort(constants.len()));
        }
        for (i, c) in constants.iter().enumerate() {
            ctx.check(c)?;
            if c.is_zero() {
                return Err(CarlitzError::ZeroConstant(i));
            }
        }
        Ok(CarlitzChain { ctx: ctx.clone(), c: constants })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn constants(&self) -> &[FieldElement] {
        &self.c
    }

    /// n, the number of modification points.
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    /// Evaluates the chain at delta: t_0 = c_0 delta, t_i = t_{i-1}^{q-2} + c_i,
    /// result t_n^{q-2}. Total on F_q since the (q-2)-power sends 0 to 0.
    pub fn eval(&self, delta: &FieldElement) -> FieldElement {
        let ctx = &self.ctx;
        let mut t = ctx.mul(&self.c[0], delta);
        for ci in &self.c[1..] {
            t = ctx.add(&ctx.pow_qm2(&t), ci);
        }
        ctx.pow_qm2(&t)
    }

    /// The full evaluation table in element-index order.
    pub fn eval_table(&self) -> Vec<FieldElement> {
        self.ctx.elements().map(|d| self.eval(&d)).collect()
    }

    pub fn recursion_table(&self) -> RecursionTable {
        let ctx = &self.ctx;
        let n = self.n();
        let mut alpha = Vec::with_capacity(n + 2);
        let mut beta = Vec::with_capacity(n + 2);
        alpha.push(ctx.zero());
        alpha.push(self.c[0].clone());
        beta.push(ctx.one());
        beta.push(ctx.zero());
        for k in 2..=n + 1 {
            let a = ctx.add(&ctx.mul(&self.c[k - 1], &alpha[k - 1]), &alpha[k - 2]);
            let b = ctx.add(&ctx.mul(&self.c[k - 1], &beta[k - 1]), &beta[k - 2]);
            alpha.push(a);
            beta.push(b);
        }
        RecursionTable { alpha, beta }
    }

    /// Structured validity report; spectrum enumeration wants to skip invalid
    /// chains cheaply, so this never errors.
    pub fn validate(&self) -> ChainValidity {
        let n = self.n();
        let table = self.recursion_table();
        let alpha_last_is_zero = table.alpha[n + 1].is_zero();
        let interior_alphas_nonzero = (1..=n).all(|k| !table.alpha[k].is_zero());
        let poles_distinct = if interior_alphas_nonzero {
            self.poles().is_ok()
        } else {
            false
        };
        ChainValidity { alpha_last_is_zero, interior_alphas_nonzero, poles_distinct }
    }

    /// The pole set x_i = -beta_i/alpha_i, i = 1..n. x_1 = 0 always since
    /// beta_1 = 0.
    pub fn poles(&self) -> Result<PoleSet, CarlitzError> {
        let ctx = &self.ctx;
        let n = self.n();
        let table = self.recursion_table();
        let mut points = Vec::with_capacity(n);
        for i in 1..=n {
            if table.alpha[i].is_zero() {
                return Err(CarlitzError::ZeroAlpha(i));
            }
            let x = ctx
                .div(&ctx.neg(&table.beta[i]), &table.alpha[i])
                .expect("alpha_i checked nonzero");
            points.push(x);
        }
        PoleSet::new(ctx, points)
    }

    /// The linear map g(x) = ax + b with a = alpha_n/beta_{n+1},
    /// b = beta_n/beta_{n+1}.
    pub fn linear_part(&self) -> Result<LinearMap, CarlitzError> {
        let ctx = &self.ctx;
        let n = self.n();
        let table = self.recursion_table();
        if table.beta[n + 1].is_zero() {
            return Err(CarlitzError::ZeroBetaLast);
        }
        let a = ctx.div(&table.alpha[n], &table.beta[n + 1]).unwrap();
        let b = ctx.div(&table.beta[n], &table.beta[n + 1]).unwrap();
        LinearMap::new(ctx, a, b)
            .map_err(|_| CarlitzError::NotFamilyValid("linear part has a zero coefficient".into()))
    }
}

/// A multiple of the symbolic unit eps used by the decomposition procedure:
/// the value is coeff * eps. Ratios of two such scalars cancel eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonScalar {
    pub coeff: FieldElement,
}

impl EpsilonScalar {
    pub fn new(coeff: FieldElement) -> Self {
        EpsilonScalar { coeff }
    }

    fn add(&self, ctx: &FieldCtx, other: &EpsilonScalar) -> EpsilonScalar {
        EpsilonScalar { coeff: ctx.add(&self.coeff, &other.coeff) }
    }

    fn sub(&self, ctx: &FieldCtx, other: &EpsilonScalar) -> EpsilonScalar {
        EpsilonScalar { coeff: ctx.sub(&self.coeff, &other.coeff) }
    }

    fn scale(&self, ctx: &FieldCtx, k: &FieldElement) -> EpsilonScalar {
        EpsilonScalar { coeff: ctx.mul(&self.coeff, k) }
    }

    /// self / other as a plain field element; eps cancels.
    fn ratio(&self, ctx: &FieldCtx, other: &EpsilonScalar) -> Result<FieldElement, CarlitzError> {
        if other.coeff.is_zero() {
            return Err(CarlitzError::DegenerateDenominator(
                "eps-scalar ratio with zero denominator".into(),
            ));
        }
        Ok(ctx.div(&self.coeff, &other.coeff).unwrap())
    }

    /// The concrete value once eps is solved.
    fn eval(&self, ctx: &FieldCtx, eps: &FieldElement) -> FieldElement {
        ctx.mul(&self.coeff, eps)
    }
}

/// Audit trace of a decomposition, in the order the procedure produces it:
/// c_n down to c_3, then eps, c_2, c_1, c_0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeTrace {
    pub c_descending: Vec<(usize, FieldElement)>,
    pub epsilon: FieldElement,
    pub c2: FieldElement,
    pub c1: FieldElement,
    pub c0: FieldElement,
    /// eps-coefficients of alpha_k / beta_k for k = 2..=n+1 (indices 0 and 1
    /// unused); exposed for the recursion cross-check.
    #[serde(skip)]
    pub eps_alpha: Vec<FieldElement>,
    #[serde(skip)]
    pub eps_beta: Vec<FieldElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub chain: CarlitzChain,
    pub trace: DecomposeTrace,
}

/// Recovers the unique chain with the given linear part and pole set.
///
/// Seeds alpha_n = eps a, beta_n = eps b, alpha_{n+1} = 0, beta_{n+1} = eps,
/// walks c_i = (beta_{i+1} + x_{i-1} alpha_{i+1}) / (beta_i + x_{i-1} alpha_i)
/// down from i = n to 3 together with the backward recursion, solves
/// beta_2 = 1 for eps, then reads off c_2 = beta_3, alpha_1 = alpha_3 - c_2 alpha_2,
/// c_1 = alpha_2/alpha_1 and c_0 = alpha_1.
pub fn decompose(
    ctx: &FieldCtx,
    g: &LinearMap,
    poles: &PoleSet,
) -> Result<Decomposition, CarlitzError> {
    let n = poles.n();
    if n < 2 {
        return Err(CarlitzError::InvalidPoleSet(format!("need n >= 2 poles, got {n}")));
    }
    let expected_last = ctx.div(&ctx.neg(&g.b), &g.a).unwrap();
    if poles.last() != &expected_last {
        return Err(CarlitzError::InvalidPoleSet(format!(
            "x_n = {} but -b/a = {}",
            poles.last(),
            expected_last
        )));
    }
    let x = poles.points();

    let zero = EpsilonScalar::new(ctx.zero());
    let mut alpha = vec![zero.clone(); n + 2];
    let mut beta = vec![zero; n + 2];
    alpha[n] = EpsilonScalar::new(g.a.clone());
    beta[n] = EpsilonScalar::new(g.b.clone());
    alpha[n + 1] = EpsilonScalar::new(ctx.zero());
    beta[n + 1] = EpsilonScalar::new(ctx.one());

    let mut c = vec![ctx.zero(); n + 1];
    let mut c_descending = Vec::with_capacity(n.saturating_sub(2));
    for i in (3..=n).rev() {
        // x_{i-1} is x[i - 2] (poles are 1-based in the recursion).
        let xi = &x[i - 2];
        let num = beta[i + 1].add(ctx, &alpha[i + 1].scale(ctx, xi));
        let den = beta[i].add(ctx, &alpha[i].scale(ctx, xi));
        let ci = num.ratio(ctx, &den)?;
        alpha[i - 1] = alpha[i + 1].sub(ctx, &alpha[i].scale(ctx, &ci));
        beta[i - 1] = beta[i + 1].sub(ctx, &beta[i].scale(ctx, &ci));
        c_descending.push((i, ci.clone()));
        c[i] = ci;
    }

    // beta_2 = 1 fixes eps.
    if beta[2].coeff.is_zero() {
        return Err(CarlitzError::DegenerateDenominator("beta_2 has zero eps-coefficient".into()));
    }
    let eps = ctx.inv(&beta[2].coeff).unwrap();

    let alpha2 = alpha[2].eval(ctx, &eps);
    let alpha3 = alpha[3].eval(ctx, &eps);
    let c2 = beta[3].eval(ctx, &eps);
    let alpha1 = ctx.sub(&alpha3, &ctx.mul(&c2, &alpha2));
    if alpha1.is_zero() {
        return Err(CarlitzError::DegenerateDenominator("alpha_1 vanished".into()));
    }
    let c1 = ctx.div(&alpha2, &alpha1).unwrap();
    let c0 = alpha1;
    c[2] = c2.clone();
    c[1] = c1.clone();
    c[0] = c0.clone();

    let chain = CarlitzChain::new(ctx, c)?;
    let trace = DecomposeTrace {
        c_descending,
        epsilon: eps,
        c2,
        c1,
        c0,
        eps_alpha: alpha.into_iter().map(|e| e.coeff).collect(),
        eps_beta: beta.into_iter().map(|e| e.coeff).collect(),
    };
    Ok(Decomposition { chain, trace })
}
