//! Rewrites that need no auxiliary variables: monomial deductions, excludable
//! local configurations and splitting on a variable.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gadgets::{GadgetResult, Guarantee};
use crate::pipeline::{quadratize, Strategy};
use crate::poly::{Assignment, Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{format_short, int, Rational};
use crate::verify::Verifier;
use crate::Penalty;

/// A partial assignment of Boolean variables.
pub type PartialAssignment = Assignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvidenceTag {
    /// Supplied by the caller; only usable with an explicit override.
    Asserted,
    /// Confirmed by enumeration against the reference polynomial.
    OracleProven,
}

/// "This monomial is 0 at every global minimum."
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deduction {
    monomial: Monomial,
    evidence: EvidenceTag,
}

impl Deduction {
    /// A deduction taken on trust.
    pub fn asserted(monomial: Monomial) -> Self {
        Deduction { monomial, evidence: EvidenceTag::Asserted }
    }

    pub fn monomial(&self) -> &Monomial {
        &self.monomial
    }

    pub fn evidence(&self) -> EvidenceTag {
        self.evidence
    }

    pub fn is_proven(&self) -> bool {
        self.evidence == EvidenceTag::OracleProven
    }
}

fn boolean_support(p: &Polynomial) -> Vec<Var> {
    p.support().into_iter().filter(|v| v.domain == Domain::Boolean).collect()
}

/// Every Boolean monomial of at most `max_arity` variables that vanishes at all
/// global minima of `p`, ordered by arity then by ids.
pub fn find_zero_deductions(p: &Polynomial, max_arity: usize) -> Result<Vec<Deduction>> {
    find_zero_deductions_with(&Verifier::default(), p, max_arity)
}

pub fn find_zero_deductions_with(verifier: &Verifier, p: &Polynomial, max_arity: usize) -> Result<Vec<Deduction>> {
    let (_, minima) = verifier.enumerate_min(p)?;
    let vars = boolean_support(p);
    let mut out = Vec::new();
    for arity in 1..=max_arity.min(vars.len()) {
        for subset in combinations(vars.len(), arity) {
            let chosen: Vec<Var> = subset.iter().map(|&i| vars[i]).collect();
            let vanishes = minima.iter().all(|a| chosen.iter().any(|v| a.get(v.id) == Some(0)));
            if vanishes {
                out.push(Deduction { monomial: Monomial::from_vars(chosen), evidence: EvidenceTag::OracleProven });
            }
        }
    }
    Ok(out)
}

/// Index subsets of size `r` from `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Splits `p = m C + R` for the monomial `m`.
pub fn cofactor(p: &Polynomial, m: &Monomial) -> (Polynomial, Polynomial) {
    let mut c = Polynomial::zero(p.space());
    let mut r = Polynomial::zero(p.space());
    for (t, k) in p.terms() {
        match t.divide(m) {
            Some(q) if !m.is_one() => c.add_term(q, k.clone()),
            _ => r.add_term(t.clone(), k.clone()),
        }
    }
    (c, r)
}

/// Replaces `m C` by `lambda m` where `m` is a deduced-zero monomial.
///
/// `Penalty::Auto` uses `lambda = max C`, found by enumeration. A smaller
/// explicit value is rejected.
pub fn apply_deduc_reduc(p: &Polynomial, d: &Deduction, lambda: &Penalty, allow_asserted: bool) -> Result<GadgetResult> {
    apply_deduc_reduc_with(&Verifier::default(), p, d, lambda, allow_asserted)
}

pub fn apply_deduc_reduc_with(
    verifier: &Verifier,
    p: &Polynomial,
    d: &Deduction,
    lambda: &Penalty,
    allow_asserted: bool,
) -> Result<GadgetResult> {
    if !d.is_proven() && !allow_asserted {
        return Err(Error::DeductionUnproven);
    }
    let m = d.monomial();
    let (c, r) = cofactor(p, m);
    let max_c = if c.is_zero() { Rational::zero() } else { -verifier.enumerate_min(&-&c)?.0 };
    let lambda = match lambda {
        Penalty::Auto => max_c.clone(),
        Penalty::Value(v) if *v < max_c => {
            return Err(Error::InvalidParameter(format!(
                "lambda {} is below the cofactor maximum {}",
                format_short(v),
                format_short(&max_c)
            )))
        }
        Penalty::Value(v) => v.clone(),
    };
    let output = r + Polynomial::monomial(p.space(), m.clone(), lambda.clone());
    Ok(GadgetResult {
        gadget: "deduc_reduc".into(),
        target: p.clone(),
        output,
        aux: Vec::new(),
        guarantee: Guarantee::ConditionalMin,
        trace: format!("deduc_reduc: degree {} deduction, lambda {}", m.degree(), format_short(&lambda)),
    })
}

fn elc_vars(p: &Polynomial, ids: &[VarId]) -> Result<Vec<Var>> {
    let support: BTreeMap<VarId, Var> = p.support().into_iter().map(|v| (v.id, v)).collect();
    ids.iter()
        .map(|&id| {
            let v = support.get(&id).copied().unwrap_or(Var { id, domain: Domain::Boolean });
            if v.domain == Domain::Boolean {
                Ok(v)
            } else {
                Err(Error::DomainViolation(format!("ELC variable {id} is not Boolean")))
            }
        })
        .collect()
}

fn minima_over(verifier: &Verifier, p: &Polynomial, extra: &[Var]) -> Result<(Rational, Vec<Assignment>)> {
    let mut vars: BTreeSet<Var> = p.support();
    vars.extend(extra.iter().copied());
    let vars: Vec<Var> = vars.into_iter().collect();
    verifier.enumerate_min_over(p, &vars)
}

/// All full assignments of `vars` that no global minimizer of `p` extends, in
/// enumeration order (first variable fastest).
pub fn find_elcs(p: &Polynomial, vars: &[VarId]) -> Result<Vec<PartialAssignment>> {
    find_elcs_with(&Verifier::default(), p, vars)
}

pub fn find_elcs_with(verifier: &Verifier, p: &Polynomial, vars: &[VarId]) -> Result<Vec<PartialAssignment>> {
    let vs = elc_vars(p, vars)?;
    let (_, minima) = minima_over(verifier, p, &vs)?;
    let seen: BTreeSet<Assignment> = minima.iter().map(|a| a.restrict(vars)).collect();
    let mut out = Vec::new();
    for i in 0..(1usize << vs.len()) {
        let a: Assignment = vs.iter().enumerate().map(|(j, v)| (v.id, ((i >> j) & 1) as i8)).collect();
        if !seen.contains(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

pub(crate) fn is_elc_with(verifier: &Verifier, p: &Polynomial, elc: &PartialAssignment) -> Result<bool> {
    let ids: Vec<VarId> = elc.iter().map(|(id, _)| id).collect();
    if elc.iter().any(|(_, v)| v != 0 && v != 1) {
        return Err(Error::DomainViolation("ELC values must be 0 or 1".into()));
    }
    let vs = elc_vars(p, &ids)?;
    let (_, minima) = minima_over(verifier, p, &vs)?;
    Ok(minima.iter().all(|a| a.restrict(&ids) != *elc))
}

/// `prod_{elc=1} b_i prod_{elc=0} (1 - b_j)`.
pub fn elc_indicator(p: &Polynomial, reg: &VariableRegistry, elc: &PartialAssignment) -> Result<Polynomial> {
    let mut out = Polynomial::constant(p.space(), Rational::one());
    for (id, v) in elc.iter() {
        let var = reg.var(id)?;
        if var.domain != Domain::Boolean || !(v == 0 || v == 1) {
            return Err(Error::DomainViolation(format!("ELC entry {id}={v} is not Boolean")));
        }
        let x = reg.poly(var);
        out = out * if v == 1 { x } else { reg.constant(int(1)) - x };
    }
    Ok(out)
}

/// Adds `alpha` times the ELC indicator. `Penalty::Auto` uses `max p - min p + 1`.
pub fn apply_elc(
    p: &Polynomial,
    reg: &VariableRegistry,
    elc: &PartialAssignment,
    alpha: &Penalty,
    allow_unproven: bool,
) -> Result<GadgetResult> {
    apply_elc_with(&Verifier::default(), p, reg, elc, alpha, allow_unproven)
}

pub fn apply_elc_with(
    verifier: &Verifier,
    p: &Polynomial,
    reg: &VariableRegistry,
    elc: &PartialAssignment,
    alpha: &Penalty,
    allow_unproven: bool,
) -> Result<GadgetResult> {
    let indicator = elc_indicator(p, reg, elc)?;
    if !allow_unproven && !is_elc_with(verifier, p, elc)? {
        return Err(Error::ElcUnproven);
    }
    let alpha = match alpha {
        Penalty::Auto => {
            let min = verifier.enumerate_min(p)?.0;
            let max = -verifier.enumerate_min(&-p)?.0;
            max - min + int(1)
        }
        Penalty::Value(v) if v.is_negative() => return Err(Error::NonPositivePenalty),
        Penalty::Value(v) => v.clone(),
    };
    let output = p + &indicator.scale(&alpha);
    Ok(GadgetResult {
        gadget: "elc".into(),
        target: p.clone(),
        output,
        aux: Vec::new(),
        guarantee: Guarantee::ConditionalMin,
        trace: format!("elc: {} fixed variables, alpha {}", elc.len(), format_short(&alpha)),
    })
}

/// Picks an ELC on the variables of `target` whose indicator cancels the
/// coefficient of `target` in `p`, with `alpha = |coefficient|`.
///
/// The first ELC in enumeration order with the right parity of zeros wins.
pub fn elc_cancel(p: &Polynomial, target: &Monomial) -> Result<Option<(PartialAssignment, Rational)>> {
    let c = p.coefficient(target);
    if c.is_zero() {
        return Ok(None);
    }
    let ids: Vec<VarId> = target.ids().collect();
    // the top coefficient of the indicator is (-1)^zeros
    let want_even = c.is_negative();
    for elc in find_elcs(p, &ids)? {
        let zeros = elc.iter().filter(|&(_, v)| v == 0).count();
        if (zeros % 2 == 0) == want_even {
            return Ok(Some((elc, c.abs())));
        }
    }
    Ok(None)
}

/// `(p | v = 0, p | v = 1)`.
pub fn split(p: &Polynomial, reg: &VariableRegistry, v: VarId) -> Result<(Polynomial, Polynomial)> {
    let var = reg.var(v)?;
    if var.domain != Domain::Boolean {
        return Err(Error::DomainViolation(format!("cannot split on non-Boolean {v}")));
    }
    Ok((p.restrict(&Assignment::new().with(v, 0))?, p.restrict(&Assignment::new().with(v, 1))?))
}

/// Variable in the most terms of degree 3 or more, lowest id on ties.
pub fn most_connected(p: &Polynomial) -> Option<VarId> {
    let mut counts: BTreeMap<VarId, usize> = BTreeMap::new();
    for (m, _) in p.terms().filter(|(m, _)| m.degree() >= 3) {
        for v in m.vars().filter(|v| v.domain == Domain::Boolean) {
            *counts.entry(v.id).or_default() += 1;
        }
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(id, _)| id)
}

#[derive(Clone, Debug)]
pub struct SplitOptions {
    /// Keep splitting a branch while it has at least this many terms of degree 3 or more.
    pub min_high_terms: usize,
    pub verifier: Verifier,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { min_high_terms: 2, verifier: Verifier::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SplitLeaf {
    /// Values fixed on the way to this leaf, in split order.
    pub fixed: Vec<(VarId, i8)>,
    pub poly: Polynomial,
    pub min: Rational,
}

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub min: Rational,
    /// Minimizer over the support of the input.
    pub argmin: Assignment,
    pub leaves: Vec<SplitLeaf>,
}

/// Solver callback: exact minimum and one minimizer of a quadratic polynomial.
pub type QuadSolver<'a> = dyn Fn(&Polynomial) -> Result<(Rational, Assignment)> + 'a;

/// Splits on the most connected variable until each branch has fewer than
/// `min_high_terms` terms of degree 3 or more. Leaves that are still not
/// quadratic are quadratized with the default strategy before solving.
pub fn solve_by_splitting(
    p: &Polynomial,
    reg: &VariableRegistry,
    options: &SplitOptions,
    solver: &QuadSolver<'_>,
) -> Result<SplitOutcome> {
    let mut leaves = Vec::new();
    let mut best: Option<(Rational, Assignment)> = None;
    let mut stack = vec![(p.clone(), Vec::<(VarId, i8)>::new())];
    while let Some((q, fixed)) = stack.pop() {
        let high = q.terms().filter(|(m, _)| m.degree() >= 3).count();
        if high >= options.min_high_terms.max(1) {
            if let Some(v) = most_connected(&q) {
                let (q0, q1) = split(&q, reg, v)?;
                let mut f1 = fixed.clone();
                f1.push((v, 1));
                let mut f0 = fixed;
                f0.push((v, 0));
                // popped in order: branch 0 first
                stack.push((q1, f1));
                stack.push((q0, f0));
                continue;
            }
        }
        let (min, sol) = solve_leaf(&q, reg, options, solver)?;
        let mut a: Assignment = fixed.iter().copied().collect();
        a = a.merged(&sol);
        if best.as_ref().is_none_or(|(b, _)| min < *b) {
            best = Some((min.clone(), a));
        }
        leaves.push(SplitLeaf { fixed, poly: q, min });
    }
    let (min, sol) = best.expect("at least one leaf");
    let argmin = p.support().into_iter().map(|v| (v.id, sol.get(v.id).unwrap_or(v.domain.values()[0]))).collect();
    Ok(SplitOutcome { min, argmin, leaves })
}

fn solve_leaf(
    q: &Polynomial,
    reg: &VariableRegistry,
    options: &SplitOptions,
    solver: &QuadSolver<'_>,
) -> Result<(Rational, Assignment)> {
    if q.degree() <= 2 {
        return solver(q);
    }
    let mut scratch = reg.clone();
    let strategy = Strategy { max_states: options.verifier.max_states, ..Strategy::default() };
    let result = quadratize(q, &mut scratch, &strategy)?;
    let (min, sol) = solver(&result.output)?;
    let originals: Vec<VarId> = q.support_ids();
    Ok((min, sol.restrict(&originals)))
}
