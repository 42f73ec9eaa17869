//! QUBO export: offset, linear and upper-triangular quadratic coefficients.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::json::{kind_of, resolve, KindJson};
use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, Polynomial, Var, VarKind, VariableRegistry};
use crate::rational::{format_ratio, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuboJson {
    pub offset: String,
    pub linear: BTreeMap<String, String>,
    /// Keys are `"i,j"` with `i < j`.
    pub quadratic: BTreeMap<String, String>,
    pub var_map: BTreeMap<String, QuboVar>,
    pub guarantee: String,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuboVar {
    /// Text-format name.
    pub name: String,
    pub kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// QUBO indices are positions in the support, in id order.
pub fn to_qubo(p: &Polynomial, reg: &VariableRegistry, guarantee: &str, trace: Vec<String>) -> Result<QuboJson> {
    let d = p.degree();
    if d > 2 {
        return Err(Error::NotQuadratic(d));
    }
    let support: Vec<Var> = p.support().into_iter().collect();
    if let Some(v) = support.iter().find(|v| v.domain != Domain::Boolean) {
        return Err(Error::DomainViolation(format!(
            "QUBO export needs Boolean variables; {} is {:?}",
            v.id, v.domain
        )));
    }
    let names = super::text::NameTable::new(reg);
    let index: HashMap<_, usize> = support.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    let mut q = QuboJson {
        offset: format_ratio(&p.constant_term()),
        linear: BTreeMap::new(),
        quadratic: BTreeMap::new(),
        var_map: BTreeMap::new(),
        guarantee: guarantee.to_string(),
        trace,
    };
    for (i, v) in support.iter().enumerate() {
        q.var_map.insert(
            i.to_string(),
            QuboVar {
                name: names.name(v.id).to_string(),
                kind: kind_of(reg, *v),
                label: reg.label(v.id).map(str::to_string),
            },
        );
    }
    for (m, c) in p.terms() {
        let idx: Vec<usize> = m.ids().map(|id| index[&id]).collect();
        match idx.as_slice() {
            [] => {}
            [i] => {
                q.linear.insert(i.to_string(), format_ratio(c));
            }
            [i, j] => {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                q.quadratic.insert(format!("{i},{j}"), format_ratio(c));
            }
            _ => unreachable!("degree checked"),
        }
    }
    Ok(q)
}

/// Loads a QUBO back into `reg`, reusing variables whose labels already exist.
pub fn from_qubo_into(q: &QuboJson, reg: &mut VariableRegistry) -> Result<Polynomial> {
    let mut vars: HashMap<usize, Var> = HashMap::new();
    for (key, v) in &q.var_map {
        let i: usize = key.parse().map_err(|_| Error::Schema(format!("bad var_map key `{key}`")))?;
        let kind = match v.kind {
            KindJson::Original => VarKind::Original,
            KindJson::Auxiliary => VarKind::Auxiliary(String::new()),
        };
        let label = v.label.as_deref().or(Some(v.name.as_str()));
        vars.insert(i, resolve(reg, Domain::Boolean, kind, label)?);
    }
    let coeff = |s: &str| parse_rational(s).ok_or_else(|| Error::Schema(format!("bad coefficient `{s}`")));
    let var = |s: &str| -> Result<Var> {
        let i: usize = s.trim().parse().map_err(|_| Error::Schema(format!("bad index `{s}`")))?;
        vars.get(&i).copied().ok_or_else(|| Error::Schema(format!("index {i} missing from var_map")))
    };
    let mut p = reg.constant(coeff(&q.offset)?);
    for (k, c) in &q.linear {
        p.add_term(Monomial::var(var(k)?), coeff(c)?);
    }
    for (k, c) in &q.quadratic {
        let (i, j) = k.split_once(',').ok_or_else(|| Error::Schema(format!("bad quadratic key `{k}`")))?;
        let (vi, vj) = (var(i)?, var(j)?);
        if vi.id == vj.id {
            return Err(Error::Schema(format!("quadratic key `{k}` repeats a variable")));
        }
        p.add_term(Monomial::from_vars([vi, vj]), coeff(c)?);
    }
    Ok(p)
}
