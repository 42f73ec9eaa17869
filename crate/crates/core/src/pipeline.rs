//! End-to-end quadratization: routing terms to gadgets until degree <= 2.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadgets::{self, descriptor, GadgetResult, Guarantee, Status};
use crate::multi_term::{discover_groups, fgbz_negative, fgbz_positive, rosenberg_reduce, scm_split, CoverSign};
use crate::poly::{Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{format_short, int, Rational};
use crate::verify::{cost_report, default_max_states, CostReport, VerificationReport, Verifier};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum MultiTerm {
    #[default]
    Off,
    Rosenberg,
    Fgbz,
}

/// How to choose among applicable gadgets of a route; ties keep route order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Objective {
    #[default]
    MinimizeAux,
    MinimizeNonSubmodular,
    MinimizeMaxCoeff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Strategy {
    pub name: String,
    pub negative_route: Vec<String>,
    pub positive_route: Vec<String>,
    pub multi_term: MultiTerm,
    /// Split odd positive terms into an even head and a negative remainder.
    pub odd_split: bool,
    pub objective: Objective,
    pub verify_after: bool,
    pub max_states: u128,
    pub allow_experimental: bool,
    /// Greedily complement aux variables when that lowers the count of
    /// positive Boolean quadratic terms.
    pub flip_aux: bool,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy {
            name: "default".into(),
            negative_route: vec!["ntr_kzfd".into()],
            positive_route: vec!["ptr_ishikawa".into()],
            multi_term: MultiTerm::Off,
            odd_split: false,
            objective: Objective::MinimizeAux,
            verify_after: false,
            max_states: default_max_states(),
            allow_experimental: false,
            flip_aux: false,
        }
    }
}

impl Strategy {
    /// Presets: `default`, `bg`, `bcr3`, `bcr4`, `kz`, `abcg`, `abcg2`, `rosenberg`, `fgbz`, `odd-split`.
    pub fn preset(name: &str) -> Option<Strategy> {
        let base = Strategy { name: name.to_string(), ..Strategy::default() };
        let route = |neg: &str, pos: &str| Strategy {
            negative_route: vec![neg.into()],
            positive_route: vec![pos.into()],
            ..base.clone()
        };
        Some(match name {
            "default" => base,
            "bg" => route("ntr_kzfd", "ptr_bg"),
            "bcr3" => route("ntr_kzfd", "ptr_bcr3"),
            "bcr4" => route("ntr_kzfd", "ptr_bcr4"),
            "kz" => Strategy { positive_route: vec!["ptr_kz".into(), "ptr_ishikawa".into()], ..base },
            "abcg" => route("ntr_abcg", "ptr_ishikawa"),
            "abcg2" => route("ntr_abcg2", "ptr_ishikawa"),
            "rosenberg" => Strategy { multi_term: MultiTerm::Rosenberg, ..base },
            "fgbz" => Strategy { multi_term: MultiTerm::Fgbz, ..base },
            "odd-split" => Strategy { odd_split: true, positive_route: vec!["ptr_bcr4".into()], ..base },
            _ => return None,
        })
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["default", "bg", "bcr3", "bcr4", "kz", "abcg", "abcg2", "rosenberg", "fgbz", "odd-split"]
    }

    /// Applies one `key=value` override. Routes are comma separated.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::InvalidParameter(format!("bad value `{value}` for `{key}`"));
        let flag = |v: &str| v.parse::<bool>().map_err(|_| bad());
        let names = |v: &str| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        match key {
            "negative" | "negative_route" => self.negative_route = names(value),
            "positive" | "positive_route" => self.positive_route = names(value),
            "multi_term" => self.multi_term = value.parse().map_err(|_| bad())?,
            "odd_split" => self.odd_split = flag(value)?,
            "objective" => self.objective = value.parse().map_err(|_| bad())?,
            "verify" | "verify_after" => self.verify_after = flag(value)?,
            "max_states" => self.max_states = value.parse().map_err(|_| bad())?,
            "allow_experimental" => self.allow_experimental = flag(value)?,
            "flip_aux" => self.flip_aux = flag(value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown strategy key `{key}`"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for name in self.negative_route.iter().chain(&self.positive_route) {
            let d = descriptor(name).ok_or_else(|| Error::UnknownGadget(name.clone()))?;
            if d.status == Status::Experimental && !self.allow_experimental {
                return Err(Error::InvalidParameter(format!(
                    "{name} is experimental; enable allow_experimental to route to it"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for MultiTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" | "none" => Ok(MultiTerm::Off),
            "rosenberg" => Ok(MultiTerm::Rosenberg),
            "fgbz" => Ok(MultiTerm::Fgbz),
            _ => Err(Error::InvalidParameter(format!("unknown multi-term mode `{s}`"))),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aux" | "min_aux" => Ok(Objective::MinimizeAux),
            "nonsubmodular" | "min_nonsubmodular" => Ok(Objective::MinimizeNonSubmodular),
            "maxcoeff" | "min_maxcoeff" => Ok(Objective::MinimizeMaxCoeff),
            _ => Err(Error::InvalidParameter(format!("unknown objective `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratizationResult {
    pub output: Polynomial,
    /// Each aux with the trace of the application that introduced it.
    pub aux_map: BTreeMap<VarId, String>,
    pub cost: CostReport,
    pub report: Option<VerificationReport>,
    /// Weakest guarantee among the applied rewrites.
    pub guarantee: Guarantee,
    pub trace: Vec<String>,
    pub gadgets_used: BTreeSet<String>,
}

impl QuadratizationResult {
    pub fn aux(&self) -> Vec<VarId> {
        self.aux_map.keys().copied().collect()
    }
}

struct Run {
    aux_map: BTreeMap<VarId, String>,
    guarantee: Guarantee,
    trace: Vec<String>,
    used: BTreeSet<String>,
}

impl Run {
    fn record(&mut self, r: &GadgetResult) {
        for &a in &r.aux {
            self.aux_map.insert(a, r.trace.clone());
        }
        self.guarantee = self.guarantee.min(r.guarantee);
        self.trace.push(r.trace.clone());
        self.used.insert(r.gadget.clone());
    }
}

pub fn quadratize(p: &Polynomial, reg: &mut VariableRegistry, strategy: &Strategy) -> Result<QuadratizationResult> {
    if p.space() != reg.space() {
        return Err(Error::RegistryMismatch);
    }
    strategy.validate()?;
    let mut run = Run { aux_map: BTreeMap::new(), guarantee: Guarantee::PointwiseMin, trace: Vec::new(), used: BTreeSet::new() };
    let mut current = p.clone();
    if current.degree() > 2 {
        current = match strategy.multi_term {
            MultiTerm::Off => current,
            MultiTerm::Rosenberg => {
                let r = rosenberg_reduce(&current, reg)?;
                if !r.aux.is_empty() {
                    run.record(&r);
                }
                r.output
            }
            MultiTerm::Fgbz => fgbz_pass(&current, reg, &mut run)?,
        };
    }
    while current.degree() > 2 {
        let (low, high): (Vec<_>, Vec<_>) =
            current.terms().map(|(m, c)| (m.clone(), c.clone())).partition(|(m, _)| m.degree() <= 2);
        let mut next = Polynomial::from_terms(reg.space(), low);
        for (m, c) in high {
            let r = route_term(&c, &m, reg, strategy)?;
            run.record(&r);
            next = next + r.output;
        }
        if next.degree() >= current.degree() && next.terms_of_degree_at_least(3).len() >= current.terms_of_degree_at_least(3).len() {
            let (m, c) = next.terms_of_degree_at_least(3).remove(0);
            return Err(Error::NoApplicableGadget(describe_term(&c, &m, reg)));
        }
        current = next;
    }
    if strategy.flip_aux {
        current = flip_pass(&current, reg, &mut run)?;
    }
    let aux: Vec<VarId> = run.aux_map.keys().copied().collect();
    let cost = cost_report(&current, &aux);
    let report = if strategy.verify_after {
        let verifier = Verifier::new(strategy.max_states);
        let report = match run.guarantee {
            Guarantee::PointwiseMin => verifier.check_pointwise(p, &current, &aux)?,
            _ => verifier.check_groundstate(p, &current, &aux)?,
        };
        Some(report.into_result()?)
    } else {
        None
    };
    Ok(QuadratizationResult {
        output: current,
        aux_map: run.aux_map,
        cost,
        report,
        guarantee: run.guarantee,
        trace: run.trace,
        gadgets_used: run.used,
    })
}

fn describe_term(c: &Rational, m: &Monomial, reg: &VariableRegistry) -> String {
    crate::io::text::print(&Polynomial::monomial(reg.space(), m.clone(), c.clone()), reg)
}

fn fgbz_pass(p: &Polynomial, reg: &mut VariableRegistry, run: &mut Run) -> Result<Polynomial> {
    let mut current = p.clone();
    loop {
        let sign = [CoverSign::Negative, CoverSign::Positive]
            .into_iter()
            .map(|s| (s, discover_groups(&current, s)))
            .find(|(_, g)| !g.is_empty());
        let Some((sign, groups)) = sign else { return Ok(current) };
        for group in groups {
            let r = match sign {
                CoverSign::Negative => fgbz_negative(&group, reg)?,
                CoverSign::Positive => fgbz_positive(&group, reg)?,
            };
            run.record(&r);
            current = current - r.target + r.output;
        }
    }
}

fn route_term(c: &Rational, m: &Monomial, reg: &mut VariableRegistry, s: &Strategy) -> Result<GadgetResult> {
    let domain = single_domain(m);
    if s.odd_split && c.is_positive() && domain == Some(Domain::Boolean) && m.degree() % 2 == 1 {
        return odd_split(c, m, reg, s);
    }
    let route = if c.is_negative() { &s.negative_route } else { &s.positive_route };
    let k = m.degree();
    let candidates: Vec<&str> = route
        .iter()
        .map(String::as_str)
        .filter(|name| {
            let d = descriptor(name).expect("validated");
            domain.is_some_and(|dom| d.applies(c, k, dom)) && m.factors().iter().all(|&(_, e)| e == 1)
        })
        .collect();
    let chosen = match (s.objective, candidates.len()) {
        (_, 0) => return Err(Error::NoApplicableGadget(describe_term(c, m, reg))),
        (_, 1) => candidates[0],
        (Objective::MinimizeAux, _) => {
            candidates.iter().copied().min_by_key(|n| (descriptor(n).expect("validated").claimed_aux)(k)).expect("nonempty")
        }
        (objective, _) => {
            let mut best: Option<(Rational, &str)> = None;
            for name in &candidates {
                let mut scratch = reg.clone();
                let Ok(r) = gadgets::apply(name, c, m, &mut scratch) else { continue };
                let cost = cost_report(&r.output, &r.aux);
                let score = match objective {
                    Objective::MinimizeNonSubmodular => int(cost.non_submodular as i64),
                    _ => cost.max_abs_coefficient,
                };
                if best.as_ref().is_none_or(|(b, _)| score < *b) {
                    best = Some((score, name));
                }
            }
            best.map(|(_, n)| n).unwrap_or(candidates[0])
        }
    };
    gadgets::apply(chosen, c, m, reg)
}

fn single_domain(m: &Monomial) -> Option<Domain> {
    let mut vars = m.vars();
    let first = vars.next()?.domain;
    vars.all(|v| v.domain == first).then_some(first)
}

/// Positive odd-degree term as `c H - c H (1 - b_k)`: the head has even
/// degree and goes to the positive route, the remainder is a negative term
/// over literals and takes a single aux `c a (k - 1 - sum of literals)`.
fn odd_split(c: &Rational, m: &Monomial, reg: &mut VariableRegistry, s: &Strategy) -> Result<GadgetResult> {
    const NAME: &str = "odd_split";
    let parts = scm_split(reg, c, m, None)?;
    let head_m = Monomial::from_vars(parts.head_vars.iter().copied());
    let head = if head_m.degree() > 2 {
        route_term(c, &head_m, reg, &Strategy { odd_split: false, ..s.clone() })?
    } else {
        gadgets::passthrough("identity", c, &head_m, reg)
    };
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let one = reg.constant(Rational::one());
    let k = m.degree() as i64;
    let mut literals = parts.head_vars.iter().fold(reg.zero(), |acc, &v| acc + reg.poly(v));
    literals = literals + parts.tail_vars.iter().fold(reg.zero(), |acc, &v: &Var| acc + (&one - &reg.poly(v)));
    let remainder = (reg.constant(int(k - 1)) - literals) * reg.poly(a);
    let mut aux = head.aux.clone();
    aux.push(a.id);
    Ok(GadgetResult {
        gadget: NAME.into(),
        target: Polynomial::monomial(reg.space(), m.clone(), c.clone()),
        output: head.output + remainder.scale(c),
        aux,
        guarantee: head.guarantee,
        trace: format!("{NAME}: degree {} term with coefficient {}; {}", m.degree(), format_short(c), head.trace),
    })
}

/// Complements aux variables one at a time, in id order, whenever that
/// lowers the number of positive Boolean quadratic terms.
fn flip_pass(p: &Polynomial, reg: &VariableRegistry, run: &mut Run) -> Result<Polynomial> {
    let mut current = p.clone();
    let mut count = cost_report(&current, &[]).non_submodular;
    let mut flipped = Vec::new();
    for &a in run.aux_map.keys() {
        if reg.var(a)?.domain != Domain::Boolean {
            continue;
        }
        let (candidate, _) = current.flip(reg, &BTreeSet::from([a]))?;
        let n = cost_report(&candidate, &[]).non_submodular;
        if n < count {
            current = candidate;
            count = n;
            flipped.push(a.to_string());
        }
    }
    if !flipped.is_empty() {
        run.trace.push(format!("flip_aux: complemented {}", flipped.join(", ")));
    }
    Ok(current)
}

/// One row of [`compare_strategies`].
#[derive(Clone, Debug)]
pub struct StrategyRow {
    pub strategy: String,
    pub outcome: std::result::Result<CostReport, String>,
}

impl fmt::Display for StrategyRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Ok(c) => write!(
                f,
                "{}: aux {}, non-submodular {}, quadratic terms {}, max |coeff| {}",
                self.strategy,
                c.aux_count,
                c.non_submodular,
                c.quadratic_terms,
                format_short(&c.max_abs_coefficient)
            ),
            Err(e) => write!(f, "{}: failed: {e}", self.strategy),
        }
    }
}

/// Runs each strategy on its own copy of the registry; failures become rows.
pub fn compare_strategies(p: &Polynomial, reg: &VariableRegistry, strategies: &[Strategy]) -> Vec<StrategyRow> {
    strategies
        .iter()
        .map(|s| {
            let mut scratch = reg.clone();
            StrategyRow {
                strategy: s.name.clone(),
                outcome: quadratize(p, &mut scratch, s).map(|r| r.cost).map_err(|e| e.to_string()),
            }
        })
        .collect()
}
