//! Reductions that share one auxiliary across several terms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::gadgets::{GadgetResult, Guarantee};
use crate::poly::{Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{format_short, half, int, Rational};
use crate::Penalty;

/// Terms sharing a common sub-monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermGroup {
    members: Vec<(Monomial, Rational)>,
    common: Monomial,
}

impl TermGroup {
    /// `common` must divide every member; there must be at least one member.
    pub fn new(members: Vec<(Monomial, Rational)>, common: Monomial) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("term group needs at least one member".into()));
        }
        if let Some((m, _)) = members.iter().find(|(m, _)| !common.divides(m)) {
            return Err(Error::InvalidParameter(format!(
                "common part does not divide a member of degree {}",
                m.degree()
            )));
        }
        Ok(TermGroup { members, common })
    }

    pub fn members(&self) -> &[(Monomial, Rational)] {
        &self.members
    }

    pub fn common(&self) -> &Monomial {
        &self.common
    }

    fn target(&self, reg: &VariableRegistry) -> Polynomial {
        Polynomial::from_terms(reg.space(), self.members.iter().cloned())
    }

    fn boolean(&self) -> Result<()> {
        let bad = self.members.iter().flat_map(|(m, _)| m.vars()).find(|v| v.domain != Domain::Boolean);
        match bad {
            Some(v) => Err(Error::DomainViolation(format!("term group variable {} is not Boolean", v.id))),
            None => Ok(()),
        }
    }
}

/// Replaces `b_i b_j` by a fresh `b_a` in every term containing both and adds
/// `M (b_i b_j - 2 b_i b_a - 2 b_j b_a + 3 b_a)`.
///
/// `Penalty::Auto` takes `M = 1 + sum |c|` over the rewritten terms, which
/// exceeds anything a wrong `b_a` could gain.
pub fn rosenberg_pair(
    p: &Polynomial,
    reg: &mut VariableRegistry,
    i: VarId,
    j: VarId,
    penalty: &Penalty,
) -> Result<GadgetResult> {
    const NAME: &str = "rosenberg";
    let (vi, vj) = (reg.var(i)?, reg.var(j)?);
    if vi.domain != Domain::Boolean || vj.domain != Domain::Boolean {
        return Err(Error::DomainViolation("substituted pair must be Boolean".into()));
    }
    if i == j {
        return Err(Error::InvalidParameter("pair needs two distinct variables".into()));
    }
    let has_pair = |m: &Monomial| m.contains(i) && m.contains(j);
    if !p.terms().any(|(m, _)| m.degree() >= 3 && has_pair(m)) {
        return Err(Error::PairAbsent(i, j));
    }
    let weight: Rational = p.terms().filter(|(m, _)| has_pair(m)).map(|(_, c)| c.abs()).sum();
    let m_pen = match penalty {
        Penalty::Auto => weight + int(1),
        Penalty::Value(v) if !v.is_positive() => return Err(Error::NonPositivePenalty),
        Penalty::Value(v) => v.clone(),
    };
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let mut out = reg.zero();
    for (m, c) in p.terms() {
        if has_pair(m) {
            out.add_term(m.without(i).without(j).mul(&Monomial::var(a)), c.clone());
        } else {
            out.add_term(m.clone(), c.clone());
        }
    }
    let (pi, pj, pa) = (reg.poly(vi), reg.poly(vj), reg.poly(a));
    let pen = &pi * &pj - (&pi * &pa).scale(&int(2)) - (&pj * &pa).scale(&int(2)) + pa.scale(&int(3));
    let output = out + pen.scale(&m_pen);
    Ok(GadgetResult {
        gadget: NAME.into(),
        target: p.clone(),
        output,
        aux: vec![a.id],
        guarantee: Guarantee::PointwiseMin,
        trace: format!("{NAME}: pair ({i}, {j}) -> {}, penalty {}", a.id, format_short(&m_pen)),
    })
}

/// Pair of Boolean variables shared by the most terms of degree 3 or more,
/// lowest `(i, j)` on ties.
pub fn pick_pair(p: &Polynomial) -> Option<(VarId, VarId)> {
    let mut counts: BTreeMap<(VarId, VarId), usize> = BTreeMap::new();
    for (m, _) in p.terms().filter(|(m, _)| m.degree() >= 3) {
        let vs: Vec<VarId> = m.vars().filter(|v| v.domain == Domain::Boolean).map(|v| v.id).collect();
        for x in 0..vs.len() {
            for y in x + 1..vs.len() {
                *counts.entry((vs[x], vs[y])).or_default() += 1;
            }
        }
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(k, _)| k)
}

/// Repeats [`rosenberg_pair`] with the heuristic pair and automatic penalty
/// until no term of degree 3 or more has a Boolean pair left.
pub fn rosenberg_reduce(p: &Polynomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    let mut current = p.clone();
    let mut aux = Vec::new();
    let mut trace = Vec::new();
    while let Some((i, j)) = pick_pair(&current) {
        let r = rosenberg_pair(&current, reg, i, j, &Penalty::Auto)?;
        current = r.output;
        aux.extend(r.aux);
        trace.push(r.trace);
    }
    Ok(GadgetResult {
        gadget: "rosenberg".into(),
        target: p.clone(),
        output: current,
        aux,
        guarantee: Guarantee::PointwiseMin,
        trace: trace.join("; "),
    })
}

/// `sum_H |a_H| (1 - prod_C b - prod_{H\C} b) b_a` for negative terms sharing `C`, `|C| >= 2`.
pub fn fgbz_negative(group: &TermGroup, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "fgbz_negative";
    if group.members.iter().any(|(_, c)| !c.is_negative()) {
        return Err(Error::MixedSigns);
    }
    if group.common.len() < 2 {
        return Err(Error::CommonTooSmall(group.common.len()));
    }
    group.boolean()?;
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let common = Polynomial::monomial(reg.space(), group.common.clone(), Rational::one());
    let mut output = reg.zero();
    for (m, c) in &group.members {
        let rest = m.divide(&group.common).expect("checked on construction");
        let rest = Polynomial::monomial(reg.space(), rest, Rational::one());
        let inner = reg.constant(Rational::one()) - &common - rest;
        output = output + (&inner * &pa).scale(&c.abs());
    }
    Ok(GadgetResult {
        gadget: NAME.into(),
        target: group.target(reg),
        output,
        aux: vec![a.id],
        guarantee: Guarantee::PointwiseMin,
        trace: format!("{NAME}: {} terms share a degree {} factor", group.members.len(), group.common.degree()),
    })
}

/// `(sum a_H) b_a prod_C b + sum_H a_H (1 - b_a) prod_{H\C} b` for positive terms sharing `C`.
pub fn fgbz_positive(group: &TermGroup, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "fgbz_positive";
    if group.members.iter().any(|(_, c)| !c.is_positive()) {
        return Err(Error::MixedSigns);
    }
    group.boolean()?;
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let total: Rational = group.members.iter().map(|(_, c)| c.clone()).sum();
    let mut output = Polynomial::monomial(reg.space(), group.common.clone(), total) * &pa;
    let not_a = reg.constant(Rational::one()) - &pa;
    for (m, c) in &group.members {
        let rest = m.divide(&group.common).expect("checked on construction");
        output = output + Polynomial::monomial(reg.space(), rest, c.clone()) * &not_a;
    }
    Ok(GadgetResult {
        gadget: NAME.into(),
        target: group.target(reg),
        output,
        aux: vec![a.id],
        guarantee: Guarantee::PointwiseMin,
        trace: format!("{NAME}: {} terms share a degree {} factor", group.members.len(), group.common.degree()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverSign {
    Positive,
    Negative,
}

/// Same rewrite as the FGBZ pair, selected by sign.
pub fn pairwise_cover(group: &TermGroup, sign: CoverSign, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    let mut r = match sign {
        CoverSign::Positive => fgbz_positive(group, reg)?,
        CoverSign::Negative => fgbz_negative(group, reg)?,
    };
    r.gadget = "pairwise_cover".into();
    Ok(r)
}

/// Greedy grouping: repeatedly takes the common set shared by the most
/// remaining same-sign terms of degree 3 or more. Negative groups share a
/// variable pair, positive groups a single variable. Groups have at least two members.
pub fn discover_groups(p: &Polynomial, sign: CoverSign) -> Vec<TermGroup> {
    let mut pool: Vec<(Monomial, Rational)> = p
        .terms()
        .filter(|(m, c)| {
            m.degree() >= 3
                && m.vars().all(|v| v.domain == Domain::Boolean)
                && match sign {
                    CoverSign::Positive => c.is_positive(),
                    CoverSign::Negative => c.is_negative(),
                }
        })
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    let width = if sign == CoverSign::Negative { 2 } else { 1 };
    let mut groups = Vec::new();
    loop {
        let mut counts: BTreeMap<Vec<Var>, usize> = BTreeMap::new();
        for (m, _) in &pool {
            let vs: Vec<Var> = m.vars().collect();
            for subset in subsets(&vs, width) {
                *counts.entry(subset).or_default() += 1;
            }
        }
        let best = counts.into_iter().filter(|(_, n)| *n >= 2).max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((common, _)) = best else { return groups };
        let common = Monomial::from_vars(common);
        let (taken, rest): (Vec<_>, Vec<_>) = pool.into_iter().partition(|(m, _)| common.divides(m));
        pool = rest;
        groups.push(TermGroup { members: taken, common });
    }
}

fn subsets(vs: &[Var], width: usize) -> Vec<Vec<Var>> {
    match width {
        1 => vs.iter().map(|&v| vec![v]).collect(),
        _ => {
            let mut out = Vec::new();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    out.push(vec![vs[i], vs[j]]);
                }
            }
            out
        }
    }
}

/// The two parts of `c b_1...b_k = c H - c H (1 - T)` where `H` is the first
/// `split_at` variables and `T` the rest.
#[derive(Clone, Debug)]
pub struct ScmParts {
    /// `c H`
    pub head: Polynomial,
    /// `-c H (1 - T)`
    pub remainder: Polynomial,
    pub head_vars: Vec<Var>,
    pub tail_vars: Vec<Var>,
}

/// Splits a term without auxiliaries; `split_at` defaults to `k - 1`.
pub fn scm_split(reg: &VariableRegistry, coeff: &Rational, m: &Monomial, split_at: Option<usize>) -> Result<ScmParts> {
    let k = m.len();
    let vars: Vec<Var> = m.vars().collect();
    if split_at.is_none() && k <= 1 {
        return Ok(ScmParts {
            head: Polynomial::monomial(reg.space(), m.clone(), coeff.clone()),
            remainder: reg.zero(),
            head_vars: vars,
            tail_vars: Vec::new(),
        });
    }
    let s = split_at.unwrap_or(k.saturating_sub(1));
    if s < 1 || s >= k {
        return Err(Error::InvalidSplit { split_at: s, degree: k });
    }
    let head = Polynomial::monomial(reg.space(), Monomial::from_vars(vars[..s].iter().copied()), coeff.clone());
    let tail = Polynomial::monomial(reg.space(), Monomial::from_vars(vars[s..].iter().copied()), Rational::one());
    let remainder = -(&head * &(reg.constant(Rational::one()) - tail));
    Ok(ScmParts { head, remainder, head_vars: vars[..s].to_vec(), tail_vars: vars[s..].to_vec() })
}

/// `f_sym = (f(b) + f(1-b))/2` and `f_anti = (f(b) - f(1-b))/2` for Boolean `f`.
pub fn sym_antisym_split(p: &Polynomial, reg: &VariableRegistry) -> Result<(Polynomial, Polynomial)> {
    let ids: BTreeSet<VarId> = p.support_ids().into_iter().collect();
    let (flipped, _) = p.flip(reg, &ids)?;
    Ok(((p + &flipped).scale(&half()), (p - &flipped).scale(&half())))
}
