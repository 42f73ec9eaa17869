//! Exhaustive oracle: enumeration, guarantee checks and counterexamples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug};
use std::ops::{AddAssign, Mul, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Assignment, Domain, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::Rational;
use crate::zero_aux::{Deduction, PartialAssignment};

pub const DEFAULT_MAX_STATES: u128 = 1 << 20;
pub const MAX_STATES_ENV: &str = "QUADRATIZER_MAX_STATES";

/// The state cap from `QUADRATIZER_MAX_STATES`, or 2^20.
pub fn default_max_states() -> u128 {
    std::env::var(MAX_STATES_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Pointwise,
    /// Pointwise up to a constant shift, recorded in the stats.
    PointwiseOffset,
    GroundState,
    SpectrumMultiset,
    Conditional,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Assignment of the original variables.
    pub original: Assignment,
    /// Aux values minimizing the transformed polynomial at `original`.
    pub aux: Assignment,
    #[serde(with = "crate::rational::as_ratio")]
    pub original_value: Rational,
    #[serde(with = "crate::rational::as_ratio")]
    pub transformed_value: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states_enumerated: u128,
    #[serde(with = "crate::rational::as_ratio::option")]
    pub min_original: Option<Rational>,
    #[serde(with = "crate::rational::as_ratio::option")]
    pub min_transformed: Option<Rational>,
    /// `min_transformed - min_original`.
    #[serde(with = "crate::rational::as_ratio::option")]
    pub offset: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub stats: Stats,
}

impl VerificationReport {
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "passed" } else { "failed" };
        match &self.counterexample {
            None => format!("{:?} check {verdict}", self.mode),
            Some(cx) => {
                let show = |a: &Assignment| {
                    a.iter().map(|(id, v)| format!("{id}={v}")).collect::<Vec<_>>().join(" ")
                };
                format!(
                    "{:?} check {verdict} at [{}] aux [{}]: original {}, transformed {}",
                    self.mode,
                    show(&cx.original),
                    show(&cx.aux),
                    cx.original_value,
                    cx.transformed_value
                )
            }
        }
    }

    /// Like [`summary`](Self::summary) but with variable names from `reg`.
    pub fn describe(&self, reg: &VariableRegistry) -> String {
        let verdict = if self.passed { "passed" } else { "failed" };
        match &self.counterexample {
            None => format!("{:?} check {verdict}", self.mode),
            Some(cx) => format!(
                "{:?} check {verdict} at [{}] aux [{}]: original {}, transformed {}",
                self.mode,
                crate::io::text::format_assignment(&cx.original, reg),
                crate::io::text::format_assignment(&cx.aux, reg),
                cx.original_value,
                cx.transformed_value
            ),
        }
    }

    /// `Ok(self)` when passed, otherwise `VerificationFailed`.
    pub fn into_result(self) -> Result<VerificationReport> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::VerificationFailed(Box::new(self)))
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub aux_count: usize,
    /// Quadratic terms over Boolean variables with a positive coefficient.
    pub non_submodular: usize,
    pub quadratic_terms: usize,
    #[serde(with = "crate::rational::as_ratio")]
    pub max_abs_coefficient: Rational,
    pub terms: usize,
}

pub fn cost_report(transformed: &Polynomial, aux: &[VarId]) -> CostReport {
    let mut r = CostReport { aux_count: aux.len(), terms: transformed.len(), ..Default::default() };
    for (m, c) in transformed.terms() {
        if m.degree() == 2 {
            r.quadratic_terms += 1;
            if c.is_positive() && m.vars().all(|v| v.domain == Domain::Boolean) {
                r.non_submodular += 1;
            }
        }
        if !m.is_one() && c.abs() > r.max_abs_coefficient {
            r.max_abs_coefficient = c.abs();
        }
    }
    r
}

/// Exhaustive checks bounded by a state cap.
#[derive(Clone, Copy, Debug)]
pub struct Verifier {
    pub max_states: u128,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier { max_states: default_max_states() }
    }
}

pub fn enumerate_min(p: &Polynomial) -> Result<(Rational, Vec<Assignment>)> {
    Verifier::default().enumerate_min(p)
}

pub fn check_pointwise(original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<VerificationReport> {
    Verifier::default().check(Mode::Pointwise, original, transformed, aux)
}

pub fn check_groundstate(original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<VerificationReport> {
    Verifier::default().check(Mode::GroundState, original, transformed, aux)
}

pub fn check_conditional(
    original: &Polynomial,
    transformed: &Polynomial,
    evidence: &[Evidence],
) -> Result<VerificationReport> {
    Verifier::default().check_conditional(original, transformed, evidence)
}

/// What a zero-aux rewrite relied on.
#[derive(Clone, Debug)]
pub enum Evidence {
    Deduction(Deduction),
    Elc(PartialAssignment),
}

impl Verifier {
    pub fn new(max_states: u128) -> Self {
        Verifier { max_states }
    }

    fn cap(&self, vars: &[Var]) -> Result<u128> {
        let mut states: u128 = 1;
        for v in vars {
            states = states.saturating_mul(v.domain.size() as u128);
        }
        if states > self.max_states {
            return Err(Error::EnumerationCapExceeded { states, cap: self.max_states });
        }
        Ok(states)
    }

    /// Global minimum over the support of `p` and every minimizer, in enumeration order.
    pub fn enumerate_min(&self, p: &Polynomial) -> Result<(Rational, Vec<Assignment>)> {
        let vars: Vec<Var> = p.support().into_iter().collect();
        self.enumerate_min_over(p, &vars)
    }

    /// As [`enumerate_min`](Self::enumerate_min) over an explicit variable list (a superset of the support).
    pub fn enumerate_min_over(&self, p: &Polynomial, vars: &[Var]) -> Result<(Rational, Vec<Assignment>)> {
        self.cap(vars)?;
        let table = Table::build(p, &p.scale(&Rational::zero()), vars, &[])?;
        let values = table.values();
        let min = values.iter().map(|(f, _)| f).min().cloned().expect("at least one state");
        let minimizers = values
            .iter()
            .enumerate()
            .filter(|(_, (f, _))| *f == min)
            .map(|(i, _)| table.x_assignment(i))
            .collect();
        Ok((table.to_rational(&min), minimizers))
    }

    /// One exact minimizer, as a quadratic solver callback would return.
    pub fn solve(&self, p: &Polynomial) -> Result<(Rational, Assignment)> {
        let (min, mut all) = self.enumerate_min(p)?;
        Ok((min, all.swap_remove(0)))
    }

    pub fn check_pointwise(&self, original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<VerificationReport> {
        self.check(Mode::Pointwise, original, transformed, aux)
    }

    pub fn check_groundstate(&self, original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<VerificationReport> {
        self.check(Mode::GroundState, original, transformed, aux)
    }

    /// Compares `original(x)` against `min_aux transformed(x, aux)` over every `x`.
    pub fn check(&self, mode: Mode, original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<VerificationReport> {
        if mode == Mode::Conditional {
            return self.check_conditional(original, transformed, &[]);
        }
        let (xs, auxv) = split_vars(original, transformed, aux)?;
        let all: Vec<Var> = xs.iter().chain(&auxv).copied().collect();
        let states = self.cap(&all)?;
        let table = Table::build(original, transformed, &xs, &auxv)?;
        Ok(table.judge(mode, states))
    }

    /// Min value and argmin set must both survive a zero-aux rewrite backed by proven evidence.
    pub fn check_conditional(&self, original: &Polynomial, transformed: &Polynomial, evidence: &[Evidence]) -> Result<VerificationReport> {
        for e in evidence {
            match e {
                Evidence::Deduction(d) if !d.is_proven() => return Err(Error::DeductionUnproven),
                Evidence::Elc(elc)
                    if !crate::zero_aux::is_elc_with(self, original, elc)? => {
                        return Err(Error::ElcUnproven);
                    }
                _ => {}
            }
        }
        let (xs, auxv) = split_vars(original, transformed, &[])?;
        let states = self.cap(&xs)?;
        let table = Table::build(original, transformed, &xs, &auxv)?;
        Ok(table.judge(Mode::Conditional, states))
    }

    /// Minimizing aux values of `transformed` with the original variables fixed by `x`.
    pub fn minimize_aux(&self, transformed: &Polynomial, x: &Assignment, aux: &[VarId]) -> Result<(Rational, Assignment)> {
        let restricted = transformed.restrict(x)?;
        let auxv: Vec<Var> = aux_vars(transformed, aux);
        if let Some(v) = restricted.support().into_iter().find(|v| !auxv.contains(v)) {
            return Err(Error::MissingVariable(v.id));
        }
        self.cap(&auxv)?;
        let (min, mut all) = self.enumerate_min_over(&restricted, &auxv)?;
        Ok((min, all.swap_remove(0)))
    }
}

fn aux_vars(transformed: &Polynomial, aux: &[VarId]) -> Vec<Var> {
    let support: BTreeMap<VarId, Var> = transformed.support().into_iter().map(|v| (v.id, v)).collect();
    let mut out: Vec<Var> = Vec::new();
    for id in aux {
        // aux missing from the output still get enumerated; their domain defaults to Boolean
        let v = support.get(id).copied().unwrap_or(Var { id: *id, domain: Domain::Boolean });
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn split_vars(original: &Polynomial, transformed: &Polynomial, aux: &[VarId]) -> Result<(Vec<Var>, Vec<Var>)> {
    if original.space() != transformed.space() {
        return Err(Error::RegistryMismatch);
    }
    let xs: Vec<Var> = original.support().into_iter().collect();
    let aux_set: BTreeSet<VarId> = aux.iter().copied().collect();
    if let Some(v) = xs.iter().find(|v| aux_set.contains(&v.id)) {
        return Err(Error::VariableMismatch(format!("auxiliary {} appears in the original polynomial", v.id)));
    }
    if let Some(v) = transformed.support().into_iter().find(|v| !aux_set.contains(&v.id) && !xs.contains(v)) {
        return Err(Error::VariableMismatch(format!(
            "variable {} occurs in the transformed polynomial but is neither original nor auxiliary",
            v.id
        )));
    }
    Ok((xs, aux_vars(transformed, aux)))
}

trait Scalar: Clone + Ord + Zero + AddAssign + SubAssign + Mul<Output = Self> + From<i64> + Send + Sync + Debug {
    fn to_big(&self) -> BigInt;
    fn from_big(b: &BigInt) -> Self;
}

impl Scalar for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("bounded by construction")
    }
}

impl Scalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
}

type Factors = Vec<(usize, u32)>;

/// `original` and `transformed` compiled to integers over a common denominator.
struct Table {
    xs: Vec<Var>,
    auxv: Vec<Var>,
    denom: BigInt,
    inner: Inner,
}

enum Inner {
    Small(Compiled<i128>),
    Big(Compiled<BigInt>),
}

struct Compiled<T> {
    f_terms: Vec<(Factors, T)>,
    // transformed grouped by aux part: sum_k aux_k(a) * sum_j c_j x_j(x)
    groups: Vec<Vec<(Factors, T)>>,
    // aux_table[s * groups + k] = value of group k's aux monomial at aux state s
    aux_table: Vec<i8>,
    aux_states: usize,
}

impl Table {
    fn build(original: &Polynomial, transformed: &Polynomial, xs: &[Var], auxv: &[Var]) -> Result<Table> {
        let mut denom = BigInt::one();
        for (_, c) in original.terms().chain(transformed.terms()) {
            denom = denom.lcm(c.denom());
        }
        let bound: BigInt = original
            .terms()
            .chain(transformed.terms())
            .map(|(_, c)| (c * Rational::from_integer(denom.clone())).to_integer().abs())
            .sum();
        let small = bound.bits() < 100;
        let inner = if small {
            Inner::Small(Compiled::new(original, transformed, xs, auxv, &denom)?)
        } else {
            Inner::Big(Compiled::new(original, transformed, xs, auxv, &denom)?)
        };
        Ok(Table { xs: xs.to_vec(), auxv: auxv.to_vec(), denom, inner })
    }

    fn to_rational(&self, v: &BigInt) -> Rational {
        Rational::new(v.clone(), self.denom.clone())
    }

    fn values(&self) -> Vec<(BigInt, BigInt)> {
        match &self.inner {
            Inner::Small(c) => c.values(&self.xs).into_iter().map(|(a, b)| (a.to_big(), b.to_big())).collect(),
            Inner::Big(c) => c.values(&self.xs),
        }
    }

    fn x_assignment(&self, index: usize) -> Assignment {
        decode(&self.xs, index)
    }

    fn best_aux(&self, x_index: usize) -> (BigInt, Assignment) {
        let digits = digits_of(&self.xs, x_index);
        let (v, s) = match &self.inner {
            Inner::Small(c) => {
                let (v, s) = c.min_aux(&digits);
                (v.to_big(), s)
            }
            Inner::Big(c) => c.min_aux(&digits),
        };
        (v, decode(&self.auxv, s))
    }

    fn counterexample(&self, values: &[(BigInt, BigInt)], i: usize) -> Counterexample {
        let (m, aux) = self.best_aux(i);
        debug_assert_eq!(m, values[i].1);
        Counterexample {
            original: self.x_assignment(i),
            aux,
            original_value: self.to_rational(&values[i].0),
            transformed_value: self.to_rational(&m),
        }
    }

    fn judge(&self, mode: Mode, states: u128) -> VerificationReport {
        let values = self.values();
        let min_f = values.iter().map(|v| &v.0).min().cloned().expect("non-empty");
        let min_g = values.iter().map(|v| &v.1).min().cloned().expect("non-empty");
        let offset = &min_g - &min_f;
        let failing = match mode {
            Mode::Pointwise => values.iter().position(|(f, g)| f != g),
            Mode::PointwiseOffset => values.iter().position(|(f, g)| (g - f) != offset),
            Mode::GroundState => values.iter().position(|(f, g)| (*f == min_f) != (*g == min_g)),
            Mode::Conditional => {
                if min_f != min_g {
                    Some(values.iter().position(|(f, _)| *f == min_f).expect("min attained"))
                } else {
                    values.iter().position(|(f, g)| (*f == min_f) != (*g == min_g))
                }
            }
            Mode::SpectrumMultiset => {
                let mut fs: BTreeMap<&BigInt, i64> = BTreeMap::new();
                for (f, g) in &values {
                    *fs.entry(f).or_default() += 1;
                    *fs.entry(g).or_default() -= 1;
                }
                let bad: BTreeSet<&BigInt> = fs.iter().filter(|(_, &n)| n != 0).map(|(k, _)| *k).collect();
                values.iter().position(|(f, g)| bad.contains(f) || bad.contains(g))
            }
        };
        VerificationReport {
            mode,
            passed: failing.is_none(),
            counterexample: failing.map(|i| self.counterexample(&values, i)),
            stats: Stats {
                states_enumerated: states,
                min_original: Some(self.to_rational(&min_f)),
                min_transformed: Some(self.to_rational(&min_g)),
                offset: Some(self.to_rational(&offset)),
            },
        }
    }
}

fn digits_of(vars: &[Var], mut index: usize) -> Vec<i8> {
    vars.iter()
        .map(|v| {
            let vals = v.domain.values();
            let d = vals[index % vals.len()];
            index /= vals.len();
            d
        })
        .collect()
}

fn decode(vars: &[Var], index: usize) -> Assignment {
    vars.iter().zip(digits_of(vars, index)).map(|(v, d)| (v.id, d)).collect()
}

fn total_states(vars: &[Var]) -> usize {
    vars.iter().map(|v| v.domain.size()).product()
}

fn eval_factors(fs: &Factors, digits: &[i8]) -> i64 {
    fs.iter().map(|&(p, e)| i64::from(digits[p]).pow(e)).product()
}

impl<T: Scalar> Compiled<T> {
    fn new(original: &Polynomial, transformed: &Polynomial, xs: &[Var], auxv: &[Var], denom: &BigInt) -> Result<Self> {
        let xpos: BTreeMap<VarId, usize> = xs.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let apos: BTreeMap<VarId, usize> = auxv.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let scaled = |c: &Rational| T::from_big(&(c * Rational::from_integer(denom.clone())).to_integer());
        let f_terms = original
            .terms()
            .map(|(m, c)| {
                let fs = m.factors().iter().map(|&(v, e)| (xpos[&v.id], e)).collect();
                (fs, scaled(c))
            })
            .collect();
        let mut by_aux: BTreeMap<Factors, Vec<(Factors, T)>> = BTreeMap::new();
        for (m, c) in transformed.terms() {
            let mut xf = Vec::new();
            let mut af = Vec::new();
            for &(v, e) in m.factors() {
                if let Some(&p) = apos.get(&v.id) {
                    af.push((p, e));
                } else if let Some(&p) = xpos.get(&v.id) {
                    xf.push((p, e));
                } else {
                    return Err(Error::MissingVariable(v.id));
                }
            }
            by_aux.entry(af).or_default().push((xf, scaled(c)));
        }
        let aux_states = total_states(auxv);
        let keys: Vec<&Factors> = by_aux.keys().collect();
        let mut aux_table = Vec::with_capacity(aux_states * keys.len());
        for s in 0..aux_states {
            let digits = digits_of(auxv, s);
            for k in &keys {
                aux_table.push(eval_factors(k, &digits) as i8);
            }
        }
        Ok(Compiled { f_terms, groups: by_aux.into_values().collect(), aux_table, aux_states })
    }

    fn f_value(&self, digits: &[i8]) -> T {
        let mut acc = T::zero();
        for (fs, c) in &self.f_terms {
            add_signed(&mut acc, c, eval_factors(fs, digits));
        }
        acc
    }

    fn min_aux(&self, digits: &[i8]) -> (T, usize) {
        let coeffs: Vec<T> = self
            .groups
            .iter()
            .map(|g| {
                let mut acc = T::zero();
                for (fs, c) in g {
                    add_signed(&mut acc, c, eval_factors(fs, digits));
                }
                acc
            })
            .collect();
        let active: Vec<usize> = (0..coeffs.len()).filter(|&k| !coeffs[k].is_zero()).collect();
        let k = coeffs.len();
        let mut best: Option<(T, usize)> = None;
        for s in 0..self.aux_states {
            let row = &self.aux_table[s * k..(s + 1) * k];
            let mut acc = T::zero();
            for &j in &active {
                match row[j] {
                    0 => {}
                    1 => acc += coeffs[j].clone(),
                    -1 => acc -= coeffs[j].clone(),
                    _ => unreachable!("domain values are in -1..=1"),
                }
            }
            if best.as_ref().is_none_or(|(b, _)| acc < *b) {
                best = Some((acc, s));
            }
        }
        best.expect("at least one aux state")
    }

    fn values(&self, xs: &[Var]) -> Vec<(T, T)> {
        let n = total_states(xs);
        const CHUNK: usize = 1024;
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(n);
                let mut digits = digits_of(xs, start);
                let mut out = Vec::with_capacity(end - start);
                for _ in start..end {
                    out.push((self.f_value(&digits), self.min_aux(&digits).0));
                    advance(xs, &mut digits);
                }
                out
            })
            .collect()
    }
}

fn add_signed<T: Scalar>(acc: &mut T, c: &T, x: i64) {
    match x {
        0 => {}
        1 => *acc += c.clone(),
        -1 => *acc -= c.clone(),
        _ => *acc += c.clone() * T::from(x),
    }
}

// Mixed-radix increment, first variable fastest.
fn advance(vars: &[Var], digits: &mut [i8]) {
    for (v, d) in vars.iter().zip(digits.iter_mut()) {
        let vals = v.domain.values();
        let pos = vals.iter().position(|x| x == d).expect("domain value");
        if pos + 1 < vals.len() {
            *d = vals[pos + 1];
            return;
        }
        *d = vals[0];
    }
}
