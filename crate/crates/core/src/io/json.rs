//! Exact JSON form of a polynomial. Coefficients are always `"p/q"` strings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, Polynomial, Var, VarKind, VariableRegistry};
use crate::rational::{format_ratio, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub vars: Vec<VarJson>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarJson {
    pub id: u32,
    pub domain: Domain,
    pub kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KindJson {
    #[serde(rename = "orig")]
    Original,
    #[serde(rename = "aux")]
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    /// Variable id (as a string key) to exponent.
    pub m: BTreeMap<String, u32>,
    pub c: String,
}

pub(crate) fn kind_of(reg: &VariableRegistry, v: Var) -> KindJson {
    if reg.is_aux(v.id) {
        KindJson::Auxiliary
    } else {
        KindJson::Original
    }
}

/// Serializes `p` with the variables it uses, in id order.
pub fn to_json(p: &Polynomial, reg: &VariableRegistry) -> PolyJson {
    let vars = p
        .support()
        .into_iter()
        .map(|v| VarJson {
            id: v.id.0,
            domain: v.domain,
            kind: kind_of(reg, v),
            label: reg.label(v.id).map(str::to_string),
        })
        .collect();
    let terms = p
        .terms()
        .map(|(m, c)| TermJson {
            m: m.factors().iter().map(|&(v, e)| (v.id.0.to_string(), e)).collect(),
            c: format_ratio(c),
        })
        .collect();
    PolyJson { vars, terms }
}

pub fn to_json_string(p: &Polynomial, reg: &VariableRegistry) -> String {
    serde_json::to_string_pretty(&to_json(p, reg)).expect("plain data serializes")
}

pub fn from_json(text: &str) -> Result<(VariableRegistry, Polynomial)> {
    let mut reg = VariableRegistry::new();
    let p = from_json_into(&parse_doc(text)?, &mut reg)?;
    Ok((reg, p))
}

pub fn parse_doc(text: &str) -> Result<PolyJson> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

/// Loads into `reg`; labelled variables already in `reg` are reused.
pub fn from_json_into(doc: &PolyJson, reg: &mut VariableRegistry) -> Result<Polynomial> {
    let mut ids: HashMap<u32, Var> = HashMap::new();
    for v in &doc.vars {
        if ids.contains_key(&v.id) {
            return Err(Error::Schema(format!("duplicate variable id {}", v.id)));
        }
        let kind = match v.kind {
            KindJson::Original => VarKind::Original,
            KindJson::Auxiliary => VarKind::Auxiliary(String::new()),
        };
        let var = resolve(reg, v.domain, kind, v.label.as_deref())?;
        ids.insert(v.id, var);
    }
    let mut p = reg.zero();
    for t in &doc.terms {
        let c = parse_rational(&t.c).ok_or_else(|| Error::Schema(format!("bad coefficient `{}`", t.c)))?;
        let mut factors = Vec::with_capacity(t.m.len());
        for (key, &e) in &t.m {
            let id: u32 = key.parse().map_err(|_| Error::Schema(format!("bad variable key `{key}`")))?;
            let var = ids.get(&id).ok_or_else(|| Error::Schema(format!("term uses undeclared variable {id}")))?;
            if e == 0 {
                return Err(Error::Schema(format!("zero exponent for variable {id}")));
            }
            factors.push((*var, e));
        }
        p.add_term(Monomial::from_factors(factors), c);
    }
    Ok(p)
}

pub(crate) fn resolve(reg: &mut VariableRegistry, domain: Domain, kind: VarKind, label: Option<&str>) -> Result<Var> {
    if let Some(l) = label {
        if let Some(existing) = reg.lookup(l) {
            if existing.domain != domain {
                return Err(Error::DomainViolation(format!(
                    "`{l}` is registered with domain {:?}, file says {:?}",
                    existing.domain, domain
                )));
            }
            return Ok(existing);
        }
    }
    reg.add_var(domain, kind, label)
}
