//! Whole-function gadgets for symmetric functions and the ternary rewrite.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::gadgets::{sum, GadgetResult, Guarantee};
use crate::poly::{Assignment, Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{ceil_log2, format_short, half, int, pow2, Rational};
use crate::verify::{Counterexample, Mode, Stats, VerificationReport, Verifier};

/// `gamma` when exactly `c` of `n` Boolean inputs are 1, zero otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCSpec {
    pub n: usize,
    pub c: usize,
    pub gamma: Rational,
}

impl ExactCSpec {
    pub fn new(n: usize, c: usize, gamma: Rational) -> Self {
        ExactCSpec { n, c, gamma }
    }

    /// Auxiliary count of a variant, or the range it needs.
    pub fn aux_count(&self, variant: u8) -> Result<usize> {
        let (n, c) = (self.n, self.c);
        let violation = |requirement: &str| Err(Error::VariantRangeViolation { variant, requirement: requirement.into() });
        match variant {
            1 | 3 if 2 * c < n || c > n => violation("n/2 <= c <= n"),
            2 | 4 if 2 * c > n => violation("0 <= c <= n/2"),
            1 if c == 0 => violation("c >= 1"),
            2 if n == c => violation("n - c >= 1"),
            3 if c < 2 => violation("c >= 2; use variant 1"),
            4 if n - c < 2 => violation("n - c >= 2; use variant 2"),
            1 => Ok(ceil_log2(c) as usize + 1),
            2 => Ok(ceil_log2(n - c) as usize + 1),
            3 => Ok(ceil_log2(c) as usize),
            4 => Ok(ceil_log2(n - c) as usize),
            _ => Err(Error::InvalidParameter(format!("unknown exact-c variant {variant}"))),
        }
    }
}

/// Variant with the fewest auxiliaries for `(n, c)`, lowest number on ties.
pub fn auto_variant(spec: &ExactCSpec) -> Result<u8> {
    [3, 4, 1, 2]
        .into_iter()
        .filter_map(|v| spec.aux_count(v).ok().map(|m| (m, v)))
        .min()
        .map(|(_, v)| v)
        .ok_or_else(|| Error::InvalidParameter(format!("no exact-c variant for n={} c={}", spec.n, spec.c)))
}

/// `gamma * [sum b = c]` as a multilinear polynomial.
pub fn exact_c_indicator(reg: &VariableRegistry, vars: &[Var], c: usize, gamma: &Rational) -> Polynomial {
    // inclusion-exclusion: sum over |T| >= c of (-1)^(|T|-c) C(|T|, c) prod_T b
    let n = vars.len();
    let mut p = reg.zero();
    for mask in 0u64..(1u64 << n) {
        let t = mask.count_ones() as usize;
        if t < c {
            continue;
        }
        let mut coeff = binomial(t, c) * gamma;
        if (t - c) % 2 == 1 {
            coeff = -coeff;
        }
        let m = Monomial::from_vars((0..n).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]));
        p.add_term(m, coeff);
    }
    p
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

fn check_exact_c(spec: &ExactCSpec, vars: &[VarId], reg: &VariableRegistry) -> Result<Vec<Var>> {
    if !spec.gamma.is_positive() {
        return Err(Error::InvalidParameter(
            "gamma must be positive; negative exact-c values need a negative-term route".into(),
        ));
    }
    if vars.len() != spec.n {
        return Err(Error::InvalidParameter(format!("expected {} variables, got {}", spec.n, vars.len())));
    }
    let vars = vars.iter().map(|&id| reg.var(id)).collect::<Result<Vec<_>>>()?;
    if let Some(v) = vars.iter().find(|v| v.domain != Domain::Boolean) {
        return Err(Error::DomainViolation(format!("exact-c input {} is not Boolean", v.id)));
    }
    Ok(vars)
}

/// The linear form inside the square or binomial of each variant.
fn inner_form(variant: u8, spec: &ExactCSpec, reg: &VariableRegistry, vars: &[Var], aux: &[Var]) -> Polynomial {
    let m = aux.len() as u32;
    let c = int(spec.c as i64);
    let s = sum(reg, vars);
    let (offset, sign) = match variant {
        1 | 3 => (-(c + int(1)), int(1)),
        _ => (c - int(1), int(-1)),
    };
    // variants 1 and 2 weight head aux by 2^(i-1), variants 3 and 4 by 2^i
    let shift = if variant <= 2 { 0 } else { 1 };
    let mut y = reg.constant(offset) + s.scale(&sign);
    for (i, &a) in aux.iter().enumerate().take(aux.len().saturating_sub(1)) {
        y = y - reg.poly(a).scale(&pow2(i as u32 + shift));
    }
    if let Some(&last) = aux.last() {
        y = y + reg.poly(last).scale(&(int(1) + pow2(m - 1 + shift)));
    }
    y
}

/// Exact-c indicator gadget, variants 1 to 4, as squares (1, 2) or
/// `x(x-1)/2` (3, 4) of a linear form in the inputs and `m` aux.
pub fn sfr_bcr(variant: u8, spec: &ExactCSpec, vars: &[VarId], reg: &mut VariableRegistry) -> Result<GadgetResult> {
    let vars = check_exact_c(spec, vars, reg)?;
    let m = spec.aux_count(variant)?;
    let name = format!("sfr_bcr{variant}");
    let aux: Vec<Var> = (0..m).map(|_| reg.fresh_aux(Domain::Boolean, &name)).collect();
    let y = inner_form(variant, spec, reg, &vars, &aux);
    let unit = if variant <= 2 { y.pow(2) } else { (&y * &(&y - &reg.constant(int(1)))).scale(&half()) };
    Ok(GadgetResult {
        gadget: name.clone(),
        target: exact_c_indicator(reg, &vars, spec.c, &spec.gamma),
        output: unit.scale(&spec.gamma),
        aux: aux.iter().map(|v| v.id).collect(),
        guarantee: Guarantee::PointwiseMin,
        trace: format!("{name}: n={} c={} gamma={} -> {m} aux", spec.n, spec.c, format_short(&spec.gamma)),
    })
}

/// Builds the exact-c gadget from its coefficient table rather than the
/// closed form. Input pairs run over ordered pairs with the diagonal, aux
/// pairs over `i < j`, and the head aux are those below `m`. Kept to compare
/// against [`sfr_bcr`]: the tables leave out some head-aux terms.
pub fn sfr_bcr_table(variant: u8, spec: &ExactCSpec, vars: &[VarId], reg: &mut VariableRegistry) -> Result<Polynomial> {
    let vars = check_exact_c(spec, vars, reg)?;
    let m = spec.aux_count(variant)?;
    let aux: Vec<Var> = (0..m).map(|_| reg.fresh_aux(Domain::Boolean, &format!("sfr_bcr{variant}_table"))).collect();
    let c = int(spec.c as i64);
    let one = int(1);
    let two = int(2);
    let mm = m as u32;
    // (constant, bb, b, head b*a (x 2^i), head a (x 2^i), last b*a, last a, head aa (x 2^(i+j)), head-last aa (x 2^i))
    let k = if variant <= 2 { &one + pow2(mm.saturating_sub(1)) } else { &one + pow2(mm) };
    let hm = pow2(mm.saturating_sub(1));
    let row = match variant {
        1 => [
            (&c + &one) * (&c + &one),
            one.clone(),
            -&two * (&c + &one),
            -one.clone(),
            &c + &one,
            &two * &k,
            &k * (&hm - &two * &c - &one),
            half(),
            -k.clone(),
        ],
        2 => [
            (&c - &one) * (&c - &one),
            one.clone(),
            -&two * (&c - &one),
            one.clone(),
            &one - &c,
            -&two * &k,
            &k * (&hm + &two * &c - &one),
            half(),
            -k.clone(),
        ],
        3 => [
            (&c * &c + int(3) * &c + &two) / &two,
            half(),
            -&c - int(3) / &two,
            -one.clone(),
            (int(3) + &c) / &two,
            k.clone(),
            &k * (&pow2(mm) / &two - &c - &one),
            half(),
            -k.clone(),
        ],
        _ => [
            (&c * &c - int(3) * &c + &two) / &two,
            half(),
            -&c + int(3) / &two,
            one.clone(),
            (int(3) - &c) / &two,
            -k.clone(),
            &k * (&pow2(mm) / &two + &c - &one),
            half(),
            -k.clone(),
        ],
    };
    let mut p = reg.constant(row[0].clone());
    for &x in &vars {
        for &y in &vars {
            p.add_term(Monomial::from_vars([x, y]), row[1].clone());
        }
        p.add_term(Monomial::var(x), row[2].clone());
    }
    let (head, last) = aux.split_at(m.saturating_sub(1));
    for (i, &a) in head.iter().enumerate() {
        let w = pow2(i as u32 + 1);
        for &x in &vars {
            p.add_term(Monomial::from_vars([x, a]), &row[3] * &w);
        }
        p.add_term(Monomial::var(a), &row[4] * &w);
        for (j, &b) in head.iter().enumerate().skip(i + 1) {
            p.add_term(Monomial::from_vars([a, b]), &row[7] * pow2((i + j + 2) as u32));
        }
        if let Some(&l) = last.first() {
            p.add_term(Monomial::from_vars([a, l]), &row[8] * &w);
        }
    }
    if let Some(&l) = last.first() {
        for &x in &vars {
            p.add_term(Monomial::from_vars([x, l]), row[5].clone());
        }
        p.add_term(Monomial::var(l), row[6].clone());
    }
    Ok(p.scale(&spec.gamma))
}

/// Target spectrum for the four-variable counting gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CzwBias {
    /// `b1 b2 b3 b4`, bias `-a4`.
    B4,
    /// `z1 z2 z3 z4` over `z = 2b - 1`, bias `2a1 - 2a2 + 2a3 - 2a4`.
    Z4,
    /// Linear aux biases `r_i a_i`.
    Custom(Box<[Rational; 4]>),
}

impl CzwBias {
    pub fn from_name(name: &str) -> Option<CzwBias> {
        match name {
            "b1b2b3b4" => Some(CzwBias::B4),
            "z1z2z3z4" => Some(CzwBias::Z4),
            _ => None,
        }
    }

    pub fn weights(&self) -> [Rational; 4] {
        match self {
            CzwBias::B4 => [int(0), int(0), int(0), int(-1)],
            CzwBias::Z4 => [int(2), int(-2), int(2), int(-2)],
            CzwBias::Custom(w) => (**w).clone(),
        }
    }

    /// Spread of the bias over all aux states.
    pub fn range(&self) -> Rational {
        let w = self.weights();
        let pos: Rational = w.iter().filter(|r| r.is_positive()).sum();
        let neg: Rational = w.iter().filter(|r| r.is_negative()).sum();
        pos - neg
    }

    /// `1 + range`.
    pub fn default_lambda(&self) -> Rational {
        int(1) + self.range()
    }
}

/// The counting Hamiltonian over four inputs and four aux.
pub fn h_4count(reg: &VariableRegistry, b: &[Var], a: &[Var]) -> Polynomial {
    let mut h = reg.constant(int(26));
    for i in 0..4 {
        for j in 0..i {
            h.add_term(Monomial::from_vars([b[i], b[j]]), int(4));
        }
        for &aj in &a[..4] {
            h.add_term(Monomial::from_vars([b[i], aj]), int(4));
        }
        h.add_term(Monomial::var(b[i]), int(-15));
        h.add_term(Monomial::var(a[i]), int(-8));
    }
    for (aj, w) in a.iter().zip([5, 1, -3, -7]) {
        h.add_term(Monomial::var(*aj), int(w));
    }
    h
}

fn czw_target(bias: &CzwBias, reg: &VariableRegistry, b: &[Var], a: &[Var]) -> Result<Polynomial> {
    let one = reg.constant(int(1));
    Ok(match bias {
        CzwBias::B4 => Polynomial::monomial(reg.space(), Monomial::from_vars(b.iter().copied()), int(1)),
        CzwBias::Z4 => b.iter().fold(one.clone(), |acc, &v| acc * (reg.poly(v).scale(&int(2)) - &one)),
        CzwBias::Custom(w) => {
            // bias of the unique counting ground state at each input weight
            let h = h_4count(reg, b, a);
            let verifier = Verifier::new(u128::MAX);
            let mut p = reg.zero();
            for s in 0..=4 {
                let x = Assignment::from_pairs(b.iter().enumerate().map(|(i, v)| (v.id, (i < s) as i8)));
                let (_, states) = verifier.enumerate_min_over(&h.restrict(&x)?, a)?;
                let value: Rational =
                    a.iter().zip(w.iter()).filter(|(v, _)| states[0].get(v.id) == Some(1)).map(|(_, r)| r.clone()).sum();
                p = p + exact_c_indicator(reg, b, s, &value);
            }
            p
        }
    })
}

fn czw_build(lambda: Option<&Rational>, bias: &CzwBias, vars: &[VarId], reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "czw_count4";
    let lambda = lambda.cloned().unwrap_or_else(|| bias.default_lambda());
    if !lambda.is_positive() {
        return Err(Error::InvalidParameter("czw lambda must be positive".into()));
    }
    if vars.len() != 4 {
        return Err(Error::InvalidParameter(format!("{NAME} needs exactly 4 variables, got {}", vars.len())));
    }
    let b = vars.iter().map(|&id| reg.var(id)).collect::<Result<Vec<_>>>()?;
    if let Some(v) = b.iter().find(|v| v.domain != Domain::Boolean) {
        return Err(Error::DomainViolation(format!("{NAME} input {} is not Boolean", v.id)));
    }
    let a: Vec<Var> = (0..4).map(|_| reg.fresh_aux(Domain::Boolean, NAME)).collect();
    let mut output = h_4count(reg, &b, &a).scale(&lambda);
    for (v, w) in a.iter().zip(bias.weights()) {
        output.add_term(Monomial::var(*v), w);
    }
    Ok(GadgetResult {
        gadget: NAME.into(),
        target: czw_target(bias, reg, &b, &a)?,
        output,
        aux: a.iter().map(|v| v.id).collect(),
        guarantee: Guarantee::GroundStatePreserving,
        trace: format!("{NAME}: lambda {}", format_short(&lambda)),
    })
}

/// Counting gadget with its oracle report: pointwise up to a constant shift.
pub fn czw_count4_report(
    lambda: Option<&Rational>,
    bias: &CzwBias,
    vars: &[VarId],
    reg: &mut VariableRegistry,
) -> Result<(GadgetResult, VerificationReport)> {
    let r = czw_build(lambda, bias, vars, reg)?;
    let report = Verifier::default().check(Mode::PointwiseOffset, &r.target, &r.output, &r.aux)?;
    Ok((r, report))
}

/// Counting gadget, returned only when the oracle confirms it for this `lambda`
/// (`None` takes `1 + range` of the bias).
pub fn czw_count4(lambda: Option<&Rational>, bias: &CzwBias, vars: &[VarId], reg: &mut VariableRegistry) -> Result<GadgetResult> {
    let (r, report) = czw_count4_report(lambda, bias, vars, reg)?;
    report.into_result()?;
    Ok(r)
}

/// Replaces ternary `t` by `(z1 + z2)/2` over two fresh spins and adds
/// `-lambda (z1 z2 + z1 - z2)`, which puts the unused state `(-1, 1)` at `+3 lambda`.
pub fn ternary_to_binary_report(
    p: &Polynomial,
    reg: &mut VariableRegistry,
    t: VarId,
    lambda: &Rational,
) -> Result<(GadgetResult, VerificationReport)> {
    const NAME: &str = "ternary_to_binary";
    if reg.var(t)?.domain != Domain::Ternary {
        return Err(Error::DomainViolation(format!("{t} is not ternary")));
    }
    if !lambda.is_positive() {
        return Err(Error::NonPositivePenalty);
    }
    if !p.support_ids().contains(&t) {
        let r = GadgetResult {
            gadget: NAME.into(),
            target: p.clone(),
            output: p.clone(),
            aux: Vec::new(),
            guarantee: Guarantee::PointwiseMin,
            trace: format!("{NAME}: {t} absent"),
        };
        let report = VerificationReport { mode: Mode::GroundState, passed: true, counterexample: None, stats: Stats::default() };
        return Ok((r, report));
    }
    let z1 = reg.fresh_aux(Domain::Spin, NAME);
    let z2 = reg.fresh_aux(Domain::Spin, NAME);
    let (p1, p2) = (reg.poly(z1), reg.poly(z2));
    let replaced = p.substitute(reg, t, &(&p1 + &p2).scale(&half()))?;
    let penalty = (&p1 * &p2 + &p1 - &p2).scale(&-lambda.clone());
    let output = replaced + penalty;
    let report = ternary_check(p, &output, t, z1, z2, lambda)?;
    let r = GadgetResult {
        gadget: NAME.into(),
        target: p.clone(),
        output,
        aux: vec![z1.id, z2.id],
        guarantee: Guarantee::GroundStatePreserving,
        trace: format!("{NAME}: {t} -> ({}, {}), lambda {}", z1.id, z2.id, format_short(lambda)),
    };
    Ok((r, report))
}

/// Oracle-gated form of [`ternary_to_binary_report`].
pub fn ternary_to_binary(p: &Polynomial, reg: &mut VariableRegistry, t: VarId, lambda: &Rational) -> Result<Polynomial> {
    let (r, report) = ternary_to_binary_report(p, reg, t, lambda)?;
    report.into_result()?;
    Ok(r.output)
}

/// Every `(y, z1, z2)` must score `p(y, t(z))` plus the penalty, and the
/// decoded ground states must be exactly the ground states of `p`.
fn ternary_check(p: &Polynomial, output: &Polynomial, t: VarId, z1: Var, z2: Var, lambda: &Rational) -> Result<VerificationReport> {
    let verifier = Verifier::default();
    let others: Vec<Var> = p.support().into_iter().filter(|v| v.id != t).collect();
    let mut vars = others.clone();
    vars.extend([z1, z2]);
    let decode = |a: &Assignment| -> Assignment {
        let t_val = (a.get(z1.id).unwrap_or(0) + a.get(z2.id).unwrap_or(0)) / 2;
        others.iter().map(|v| (v.id, a.get(v.id).unwrap_or(0))).chain([(t, t_val)]).collect()
    };
    let mut stats = Stats::default();
    let (min_out, out_states) = verifier.enumerate_min_over(output, &vars)?;
    let (min_p, p_states) = verifier.enumerate_min(p)?;
    stats.states_enumerated = out_states.len() as u128;
    stats.min_original = Some(min_p.clone());
    stats.min_transformed = Some(min_out.clone());
    stats.offset = Some(&min_out - &min_p);
    let fail = |x: Assignment, aux: Assignment, ov: Rational, tv: Rational, stats: Stats| VerificationReport {
        mode: Mode::GroundState,
        passed: false,
        counterexample: Some(Counterexample { original: x, aux, original_value: ov, transformed_value: tv }),
        stats,
    };
    // full table over every state
    let mut total = 0u128;
    for a in all_states(&vars) {
        total += 1;
        let x = decode(&a);
        let pv = p.evaluate(&x)?;
        let ov = output.evaluate(&a)?;
        let pen = match (a.get(z1.id), a.get(z2.id)) {
            (Some(-1), Some(1)) => lambda * int(3),
            _ => -lambda.clone(),
        };
        if ov != &pv + &pen {
            stats.states_enumerated = total;
            return Ok(fail(x, a.restrict(&[z1.id, z2.id]), pv, ov, stats));
        }
    }
    stats.states_enumerated = total;
    let mut decoded: Vec<Assignment> = out_states.iter().map(decode).collect();
    decoded.sort();
    decoded.dedup();
    let mut expected = p_states.clone();
    expected.sort();
    if decoded != expected {
        let x = expected.iter().find(|e| !decoded.contains(e)).or(decoded.first()).cloned().unwrap_or_default();
        return Ok(fail(x, Assignment::new(), min_p, min_out, stats));
    }
    Ok(VerificationReport { mode: Mode::GroundState, passed: true, counterexample: None, stats })
}

fn all_states(vars: &[Var]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| v.domain.values().iter().map(move |&x| a.clone().with(v.id, x)))
            .collect();
    }
    out
}
