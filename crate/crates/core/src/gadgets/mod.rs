//! Single-term quadratization gadgets.
//!
//! Every gadget takes a coefficient and a monomial and scales its unit
//! formula by `|coeff|`. Sign routing is the caller's job: a coefficient of
//! the wrong sign is an error.

mod experimental;
mod negative;
mod positive;

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

pub use experimental::{
    experimental_report, experimental_single_term, ntr_lhz, ntr_lhz_z, ptr_bcr1, ptr_bcr2, ptr_kz_z, ptr_rbl_3to2,
    ptr_rbl_3to2_mirrored, ptr_rbl_4to2,
};
pub use negative::{ntr_abcg, ntr_abcg2, ntr_gbp, ntr_kzfd, ntr_rbl};
pub use positive::{ptr_bcr3, ptr_bcr4, ptr_bg, ptr_gbp, ptr_ishikawa, ptr_kz};

use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{ceil_log2, Rational};
use crate::verify::{Mode, VerificationReport, Verifier};

/// Strength of what a rewrite preserves. Ordered weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Guarantee {
    /// Minima preserved only under side conditions such as a proven deduction.
    ConditionalMin,
    /// Minimum set preserved, projected onto the original variables.
    GroundStatePreserving,
    /// `min_aux g(x, aux) = f(x)` for every `x`.
    PointwiseMin,
}

impl Guarantee {
    /// The check that certifies this guarantee.
    pub fn mode(self) -> Mode {
        match self {
            Guarantee::PointwiseMin => Mode::Pointwise,
            Guarantee::GroundStatePreserving => Mode::GroundState,
            Guarantee::ConditionalMin => Mode::Conditional,
        }
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct GadgetResult {
    pub gadget: String,
    /// The function the output claims to represent, usually `coeff * m`.
    pub target: Polynomial,
    pub output: Polynomial,
    pub aux: Vec<VarId>,
    pub guarantee: Guarantee,
    pub trace: String,
}

impl GadgetResult {
    /// Checks the output against the target at the claimed guarantee.
    pub fn verify(&self, verifier: &Verifier) -> Result<VerificationReport> {
        verifier.check(self.guarantee.mode(), &self.target, &self.output, &self.aux)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    MustPass,
    Experimental,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignRule {
    Negative,
    Positive,
    Either,
}

type Builder = fn(&Rational, &Monomial, &mut VariableRegistry) -> Result<GadgetResult>;

#[derive(Clone, Copy)]
pub struct GadgetDescriptor {
    pub name: &'static str,
    pub sign: SignRule,
    pub domain: Domain,
    pub min_degree: usize,
    pub max_degree: Option<usize>,
    /// Only odd degrees.
    pub odd_only: bool,
    pub claimed_aux: fn(usize) -> usize,
    pub guarantee: Guarantee,
    pub status: Status,
    pub build: Builder,
}

impl fmt::Debug for GadgetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GadgetDescriptor")
            .field("name", &self.name)
            .field("sign", &self.sign)
            .field("domain", &self.domain)
            .field("degrees", &(self.min_degree, self.max_degree))
            .field("guarantee", &self.guarantee)
            .field("status", &self.status)
            .finish()
    }
}

impl GadgetDescriptor {
    pub fn applies(&self, coeff: &Rational, degree: usize, domain: Domain) -> bool {
        let sign_ok = match self.sign {
            SignRule::Negative => coeff.is_negative(),
            SignRule::Positive => coeff.is_positive(),
            SignRule::Either => !coeff.is_zero(),
        };
        sign_ok
            && domain == self.domain
            && degree >= self.min_degree
            && self.max_degree.is_none_or(|d| degree <= d)
            && (!self.odd_only || degree % 2 == 1)
    }

    /// Degrees this gadget accepts, capped at `limit`.
    pub fn degrees(&self, limit: usize) -> impl Iterator<Item = usize> + '_ {
        let hi = self.max_degree.unwrap_or(limit).min(limit);
        (self.min_degree..=hi).filter(move |k| !self.odd_only || k % 2 == 1)
    }

    pub fn sign_text(&self) -> &'static str {
        match self.sign {
            SignRule::Negative => "negative",
            SignRule::Positive => "positive",
            SignRule::Either => "any",
        }
    }
}

fn one(_: usize) -> usize {
    1
}

fn minus_two(k: usize) -> usize {
    k.saturating_sub(2)
}

fn half_floor(k: usize) -> usize {
    k.saturating_sub(1) / 2
}

fn log_ceil(k: usize) -> usize {
    ceil_log2(k.max(1)) as usize
}

fn log_ceil_minus_one(k: usize) -> usize {
    log_ceil(k).saturating_sub(1)
}

fn quarter_ceil(k: usize) -> usize {
    k.div_ceil(4)
}

#[allow(clippy::too_many_arguments)]
const fn desc(
    name: &'static str,
    sign: SignRule,
    domain: Domain,
    degrees: (usize, Option<usize>),
    claimed_aux: fn(usize) -> usize,
    guarantee: Guarantee,
    status: Status,
    build: Builder,
) -> GadgetDescriptor {
    GadgetDescriptor {
        name,
        sign,
        domain,
        min_degree: degrees.0,
        max_degree: degrees.1,
        odd_only: false,
        claimed_aux,
        guarantee,
        status,
        build,
    }
}

use Domain::{Boolean, Spin};
use Guarantee::{GroundStatePreserving as GS, PointwiseMin as PW};
use SignRule::{Either, Negative, Positive};
use Status::{Experimental, MustPass};

static CATALOG: [GadgetDescriptor; 20] = [
    desc("ntr_kzfd", Negative, Boolean, (1, None), one, PW, MustPass, ntr_kzfd),
    desc("ntr_abcg", Negative, Boolean, (3, None), one, PW, MustPass, ntr_abcg),
    desc("ntr_abcg2", Negative, Boolean, (1, None), one, PW, MustPass, |c, m, r| ntr_abcg2(c, m, r, None)),
    desc("ntr_gbp", Negative, Boolean, (3, Some(3)), one, PW, MustPass, |c, m, r| ntr_gbp(c, m, r, 1)),
    desc("ntr_rbl", Negative, Spin, (3, Some(3)), one, GS, MustPass, ntr_rbl),
    desc("ptr_bg", Positive, Boolean, (3, None), minus_two, PW, MustPass, ptr_bg),
    desc("ptr_ishikawa", Positive, Boolean, (3, None), half_floor, PW, MustPass, ptr_ishikawa),
    desc("ptr_bcr3", Positive, Boolean, (3, None), log_ceil, PW, MustPass, ptr_bcr3),
    desc("ptr_bcr4", Positive, Boolean, (3, None), log_ceil_minus_one, PW, MustPass, ptr_bcr4),
    desc("ptr_kz", Positive, Boolean, (3, Some(3)), one, PW, MustPass, ptr_kz),
    desc("ptr_gbp", Positive, Boolean, (3, Some(3)), one, PW, MustPass, |c, m, r| ptr_gbp(c, m, r, 1)),
    GadgetDescriptor {
        odd_only: true,
        ..desc("ptr_bcr1", Positive, Boolean, (3, None), half_floor, PW, Experimental, ptr_bcr1)
    },
    desc("ptr_bcr2", Positive, Boolean, (4, None), quarter_ceil, PW, Experimental, ptr_bcr2),
    desc("ptr_kz_z", Either, Spin, (3, Some(3)), one, PW, Experimental, ptr_kz_z),
    desc("ptr_rbl_3to2", Positive, Spin, (3, Some(3)), one, GS, Experimental, ptr_rbl_3to2),
    desc("ptr_rbl_3to2_mirrored", Positive, Spin, (3, Some(3)), one, GS, Experimental, |c, m, r| {
        ptr_rbl_3to2_mirrored(c, m, r)
    }),
    desc("ptr_rbl_4to2", Positive, Spin, (4, Some(4)), one, GS, Experimental, ptr_rbl_4to2),
    desc("ntr_lhz", Negative, Spin, (4, Some(4)), one, GS, Experimental, ntr_lhz),
    desc("ntr_lhz_z", Negative, Spin, (4, Some(4)), one, GS, Experimental, ntr_lhz_z),
    // degree 2 and below pass through; kept so routes can name it explicitly
    desc("identity", Either, Boolean, (0, Some(2)), |_| 0, PW, MustPass, identity),
];

/// Every registered single-term gadget.
pub fn catalog() -> &'static [GadgetDescriptor] {
    &CATALOG
}

pub fn descriptor(name: &str) -> Option<&'static GadgetDescriptor> {
    CATALOG.iter().find(|d| d.name == name)
}

/// Applies a gadget by name with default parameters. Experimental gadgets are
/// oracle-checked first and fail with `VerificationFailed`.
pub fn apply(name: &str, coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    let d = descriptor(name).ok_or_else(|| Error::UnknownGadget(name.to_string()))?;
    match d.status {
        Status::MustPass => (d.build)(coeff, m, reg),
        Status::Experimental => experimental_single_term(name, coeff, m, reg),
    }
}

fn identity(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    if m.degree() > 2 {
        return Err(Error::WrongDegree { gadget: "identity", degree: m.degree() });
    }
    Ok(passthrough("identity", coeff, m, reg))
}

// Shared helpers for the gadget implementations.

pub(crate) fn target(coeff: &Rational, m: &Monomial, reg: &VariableRegistry) -> Polynomial {
    Polynomial::monomial(reg.space(), m.clone(), coeff.clone())
}

pub(crate) fn passthrough(name: &str, coeff: &Rational, m: &Monomial, reg: &VariableRegistry) -> GadgetResult {
    let t = target(coeff, m, reg);
    GadgetResult {
        gadget: name.to_string(),
        target: t.clone(),
        output: t,
        aux: Vec::new(),
        guarantee: Guarantee::PointwiseMin,
        trace: format!("{name}: degree {} term kept as is", m.degree()),
    }
}

pub(crate) fn require_negative(name: &'static str, coeff: &Rational) -> Result<()> {
    if coeff.is_negative() {
        Ok(())
    } else {
        Err(Error::WrongSign { gadget: name })
    }
}

pub(crate) fn require_positive(name: &'static str, coeff: &Rational) -> Result<()> {
    if coeff.is_positive() {
        Ok(())
    } else {
        Err(Error::WrongSign { gadget: name })
    }
}

/// The monomial's variables, which must all be in `domain` with exponent 1.
pub(crate) fn plain_vars(name: &str, m: &Monomial, domain: Domain) -> Result<Vec<Var>> {
    for &(v, e) in m.factors() {
        if v.domain != domain {
            return Err(Error::DomainViolation(format!(
                "{name} needs {domain:?} variables, {} is {:?}",
                v.id, v.domain
            )));
        }
        if e != 1 {
            return Err(Error::DomainViolation(format!("{name} needs exponent 1 on {}", v.id)));
        }
    }
    Ok(m.vars().collect())
}

pub(crate) fn require_degree(name: &'static str, k: usize, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::WrongDegree { gadget: name, degree: k })
    }
}

/// `sum` of the given variables as a polynomial.
pub(crate) fn sum(reg: &VariableRegistry, vars: &[Var]) -> Polynomial {
    vars.iter().fold(reg.zero(), |acc, &v| acc + reg.poly(v))
}

/// Sum over unordered pairs `i < j` of `x_i x_j`.
pub(crate) fn pair_sum(reg: &VariableRegistry, vars: &[Var]) -> Polynomial {
    let mut p = reg.zero();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            p.add_term(Monomial::from_vars([vars[i], vars[j]]), Rational::from_integer(1.into()));
        }
    }
    p
}

pub(crate) fn finish(
    name: &str,
    coeff: &Rational,
    m: &Monomial,
    reg: &VariableRegistry,
    unit: Polynomial,
    aux: Vec<Var>,
    guarantee: Guarantee,
) -> GadgetResult {
    let output = unit.scale(&coeff.abs());
    GadgetResult {
        gadget: name.to_string(),
        target: target(coeff, m, reg),
        output,
        aux: aux.iter().map(|v| v.id).collect(),
        guarantee,
        trace: format!(
            "{name}: degree {} term with coefficient {} -> {} aux",
            m.degree(),
            crate::rational::format_short(coeff),
            aux.len()
        ),
    }
}
