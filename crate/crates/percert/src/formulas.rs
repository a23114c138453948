//! Closed-form evaluators for every bound and exact recursion the certifier
//! relies on, plus the bounds-match predicate for tree products.
//!
//! All evaluators are pure integer arithmetic over degree histograms. The
//! "exact" kind is never self-certified: it requires an explicit hypothesis
//! token from the caller, or a product recursion that carries the guarantee
//! structurally.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DegreeHistogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaKind {
    Exact,
    UpperBound,
    LowerBound,
}

/// A formula value together with the strength of the claim and the
/// hypothesis under which "exact" holds.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaResult {
    pub value: u64,
    pub kind: FormulaKind,
    pub hypothesis: String,
}

/// Caller-supplied evidence that the minimum percolating size of the base
/// graph equals its witness-space dimension at the thresholds a theorem
/// consumes.
#[derive(Debug, Clone)]
pub enum Hypothesis {
    /// Dimension equality was certified; the payload names the provenance.
    Certified(String),
    Unverified,
}

impl Hypothesis {
    fn describe(&self, needed: &str) -> (FormulaKind, String) {
        match self {
            Hypothesis::Certified(src) => (
                FormulaKind::Exact,
                format!("dimension equality {needed} ({src})"),
            ),
            Hypothesis::Unverified => (
                FormulaKind::UpperBound,
                format!("unverified: needs dimension equality {needed}"),
            ),
        }
    }
}

fn d(h: &DegreeHistogram, t: i64) -> u64 {
    h.d(t)
}

/// Sum of d_t for 0 <= t <= upto (empty when upto < 0).
fn d_below(h: &DegreeHistogram, upto: i64) -> u64 {
    (0..=upto).map(|t| h.d(t)).sum()
}

/// Number of tree vertices of degree >= 2.
fn internal_vertices(ht: &DegreeHistogram) -> u64 {
    ht.counts()
        .iter()
        .filter(|(&deg, _)| deg >= 2)
        .map(|(_, &c)| c)
        .sum()
}

fn tail_tree_lower(hg: &DegreeHistogram, ht: &DegreeHistogram, r: u32) -> u64 {
    let r = r as i64;
    let mut tail = d(hg, r - 1);
    for t in 0..=r - 2 {
        tail += d(hg, t) * (1 + internal_vertices(ht));
    }
    tail
}

fn tail_tree_upper(hg: &DegreeHistogram, ht: &DegreeHistogram, r: u32) -> u64 {
    let r = r as i64;
    let mut tail = d(hg, r - 1);
    for t in 1..=r - 1 {
        let high: u64 = ht
            .counts()
            .iter()
            .filter(|(&deg, _)| deg as i64 >= t + 1)
            .map(|(_, &c)| c)
            .sum();
        let low: u64 = ht
            .counts()
            .iter()
            .filter(|(&deg, _)| (2..=t as usize).contains(&deg))
            .map(|(&deg, &c)| (deg as u64 - 1) * c)
            .sum();
        tail += d(hg, r - 1 - t) * (1 + t as u64 * high + low);
    }
    tail
}

fn check_tree_args(n: u32, r: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "tree product formulas require order n >= 2".into(),
        ));
    }
    if r < 1 {
        return Err(Error::InvalidParameter(
            "tree product formulas require r >= 1".into(),
        ));
    }
    Ok(())
}

/// Construction bound for G x T.
pub fn formula_tree_upper(
    m_r: u64,
    m_rm1: u64,
    hg: &DegreeHistogram,
    ht: &DegreeHistogram,
    n: u32,
    r: u32,
) -> Result<FormulaResult> {
    check_tree_args(n, r)?;
    Ok(FormulaResult {
        value: m_r + (n as u64 - 1) * m_rm1 + tail_tree_upper(hg, ht, r),
        kind: FormulaKind::UpperBound,
        hypothesis: "none; holds for every graph and tree".into(),
    })
}

/// Witness-space bound for G x T; the first two inputs are dimensions.
pub fn formula_tree_lower(
    dim_r: u64,
    dim_rm1: u64,
    hg: &DegreeHistogram,
    ht: &DegreeHistogram,
    n: u32,
    r: u32,
) -> Result<FormulaResult> {
    check_tree_args(n, r)?;
    Ok(FormulaResult {
        value: dim_r + (n as u64 - 1) * dim_rm1 + tail_tree_lower(hg, ht, r),
        kind: FormulaKind::LowerBound,
        hypothesis: "inputs are witness-space dimensions of the base".into(),
    })
}

/// True exactly when the tree upper and lower tails coincide for these
/// histograms, i.e. when matching base inputs make the two bounds equal.
pub fn bounds_match_predicate(hg: &DegreeHistogram, ht: &DegreeHistogram, r: u32) -> bool {
    tail_tree_upper(hg, ht, r) == tail_tree_lower(hg, ht, r)
}

/// Structural side conditions of the exact tree-product formula.
#[derive(Debug, Clone)]
pub struct TreeExactHypotheses {
    pub t_is_path: bool,
    pub min_degree_ge_r_minus_2: bool,
    pub dim_equality: Hypothesis,
}

/// Exact value of the minimum percolating size of G x T, under the
/// structural hypothesis (T a path, or min degree of G at least r-2) and
/// dimension equality at r-1 and r. Refuses when the structural hypothesis
/// fails.
pub fn formula_tree_exact(
    m_r: u64,
    m_rm1: u64,
    hg: &DegreeHistogram,
    ht: &DegreeHistogram,
    n: u32,
    r: u32,
    hyp: &TreeExactHypotheses,
) -> Result<FormulaResult> {
    check_tree_args(n, r)?;
    if !(hyp.t_is_path || hyp.min_degree_ge_r_minus_2) {
        return Err(Error::Hypothesis(
            "needs T a path or min degree of G at least r-2".into(),
        ));
    }
    if !bounds_match_predicate(hg, ht, r) {
        return Err(Error::Hypothesis(
            "upper and lower tails differ for these histograms".into(),
        ));
    }
    let value = m_r + (n as u64 - 1) * m_rm1 + tail_tree_lower(hg, ht, r);
    let (kind, hypothesis) = hyp.dim_equality.describe("at r-1 and r");
    Ok(FormulaResult {
        value,
        kind,
        hypothesis,
    })
}

/// Exact value for G x P_n.
pub fn formula_path_corollary(
    m_r: u64,
    m_rm1: u64,
    hg: &DegreeHistogram,
    n: u32,
    r: u32,
    hyp: &Hypothesis,
) -> Result<FormulaResult> {
    check_tree_args(n, r)?;
    let r_i = r as i64;
    let value = m_r + (n as u64 - 1) * m_rm1 + d(hg, r_i - 1) + (n as u64 - 1) * d_below(hg, r_i - 2);
    let (kind, hypothesis) = hyp.describe("at r-1 and r");
    Ok(FormulaResult {
        value,
        kind,
        hypothesis,
    })
}

/// Exact value for G x S_k.
pub fn formula_star_general(
    m_r: u64,
    m_rm1: u64,
    hg: &DegreeHistogram,
    k: u32,
    r: u32,
    hyp: &Hypothesis,
) -> Result<FormulaResult> {
    if k < 1 || r < 1 {
        return Err(Error::InvalidParameter(
            "star formula requires k >= 1 and r >= 1".into(),
        ));
    }
    let r_i = r as i64;
    let mut value = m_r + k as u64 * m_rm1;
    for t in 1..=k as i64 - 1 {
        value += t as u64 * d(hg, r_i - t);
    }
    for t in k as i64..=r_i {
        value += k as u64 * d(hg, r_i - t);
    }
    let (kind, hypothesis) = hyp.describe("at r-1 and r");
    Ok(FormulaResult {
        value,
        kind,
        hypothesis,
    })
}

/// Exact value for G x H_{k,l}.
#[allow(clippy::too_many_arguments)]
pub fn formula_theta_general(
    m_r: u64,
    m_rm1: u64,
    m_rm2: u64,
    hg: &DegreeHistogram,
    k: u32,
    l: u32,
    r: u32,
    hyp: &Hypothesis,
) -> Result<FormulaResult> {
    if l < 4 || k < l {
        return Err(Error::InvalidParameter(
            "theta formula requires k >= l >= 4".into(),
        ));
    }
    if r < 2 {
        return Err(Error::InvalidParameter("theta formula requires r >= 2".into()));
    }
    let kl = (k + l) as u64;
    let r_i = r as i64;
    let value = m_r
        + (kl - 5) * m_rm1
        + 2 * m_rm2
        + d(hg, r_i - 1)
        + (kl - 3) * d(hg, r_i - 2)
        + (kl - 1) * d_below(hg, r_i - 3);
    let (kind, hypothesis) = hyp.describe("at r-2, r-1 and r");
    Ok(FormulaResult {
        value,
        kind,
        hypothesis,
    })
}

// ---------------------------------------------------------------------------
// One recursion step per factor kind, acting on a value table m[0..=R].
// ---------------------------------------------------------------------------

/// Extends a table of minimum sizes through a path factor P_n.
pub fn step_path(m: &[u64], hg: &DegreeHistogram, n: u32) -> Vec<u64> {
    let mut out = vec![0u64; m.len()];
    for rho in 1..m.len() {
        let r = rho as i64;
        out[rho] =
            m[rho] + (n as u64 - 1) * m[rho - 1] + d(hg, r - 1) + (n as u64 - 1) * d_below(hg, r - 2);
    }
    out
}

/// Extends a table of minimum sizes through a star factor S_k.
pub fn step_star(m: &[u64], hg: &DegreeHistogram, k: u32) -> Vec<u64> {
    let mut out = vec![0u64; m.len()];
    for rho in 1..m.len() {
        let r = rho as i64;
        let mut v = m[rho] + k as u64 * m[rho - 1];
        for t in 1..=k as i64 - 1 {
            v += t as u64 * d(hg, r - t);
        }
        for t in k as i64..=r {
            v += k as u64 * d(hg, r - t);
        }
        out[rho] = v;
    }
    out
}

/// Extends a table through a theta factor H_{k,l}. The step recursion is
/// only defined for thresholds >= 2; at threshold 1 the caller supplies the
/// product's own value (1 for any connected product with an edge).
pub fn step_theta(m: &[u64], hg: &DegreeHistogram, k: u32, l: u32, me_at_1: u64) -> Vec<u64> {
    let kl = (k + l) as u64;
    let mut out = vec![0u64; m.len()];
    if m.len() > 1 {
        out[1] = me_at_1;
    }
    for rho in 2..m.len() {
        let r = rho as i64;
        out[rho] = m[rho]
            + (kl - 5) * m[rho - 1]
            + 2 * m[rho - 2]
            + d(hg, r - 1)
            + (kl - 3) * d(hg, r - 2)
            + (kl - 1) * d_below(hg, r - 3);
    }
    out
}

/// Full recursion for a product of stars S_{a_1} x ... x S_{a_p}, tracking
/// degree histograms symbolically; no graph is materialized.
pub fn formula_star_product(a: &[u32], r: u32) -> Result<FormulaResult> {
    if r < 1 {
        return Err(Error::InvalidParameter("star recursion requires r >= 1".into()));
    }
    if a.iter().any(|&ai| ai < 1) {
        return Err(Error::InvalidParameter("star sizes must be >= 1".into()));
    }
    let mut m = vec![0u64; r as usize + 1];
    let mut hist = DegreeHistogram::of_unit();
    for &ai in a {
        m = step_star(&m, &hist, ai);
        hist = hist.convolve(&DegreeHistogram::of_star(ai));
    }
    Ok(FormulaResult {
        value: m[r as usize],
        kind: FormulaKind::Exact,
        hypothesis: "product of stars; dimension equality holds at every threshold".into(),
    })
}

/// Full recursion for a product of theta graphs.
pub fn formula_theta_product(pairs: &[(u32, u32)], r: u32) -> Result<FormulaResult> {
    if r < 2 {
        return Err(Error::InvalidParameter("theta recursion requires r > 1".into()));
    }
    for &(k, l) in pairs {
        if l < 4 || k < l {
            return Err(Error::InvalidParameter(
                "theta recursion requires k >= l >= 4 in every factor".into(),
            ));
        }
    }
    let mut m = vec![0u64; r as usize + 1];
    let mut hist = DegreeHistogram::of_unit();
    for &(k, l) in pairs {
        // Each partial product is connected with at least one edge.
        m = step_theta(&m, &hist, k, l, 1);
        hist = hist.convolve(&DegreeHistogram::of_theta(k, l));
    }
    Ok(FormulaResult {
        value: m[r as usize],
        kind: FormulaKind::Exact,
        hypothesis: "product of theta graphs; dimension equality holds at every threshold".into(),
    })
}
