use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{Domain, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense index of a variable inside its registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A variable together with its domain, so monomials can canonicalize without a registry lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub id: VarId,
    pub domain: Domain,
}

/// Identifies the registry a polynomial was built against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceId(u64);

static NEXT_SPACE: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    Original,
    /// Introduced by the named gadget.
    Auxiliary(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub domain: Domain,
    pub kind: VarKind,
    pub label: Option<String>,
}

impl VarInfo {
    pub fn is_aux(&self) -> bool {
        matches!(self.kind, VarKind::Auxiliary(_))
    }
}

/// Owns the identity, domain and origin of every variable.
///
/// Cloning keeps the same [`SpaceId`], so a clone can be used to try out
/// rewrites and discarded.
#[derive(Clone, Debug)]
pub struct VariableRegistry {
    space: SpaceId,
    entries: Vec<VarInfo>,
    labels: HashMap<String, VarId>,
    // b <-> z counterparts created by domain conversion
    pairs: HashMap<VarId, VarId>,
    aux_counter: u32,
}

impl Default for VariableRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl VariableRegistry {
    pub fn new() -> Self {
        VariableRegistry {
            space: SpaceId(NEXT_SPACE.fetch_add(1, Ordering::Relaxed)),
            entries: Vec::new(),
            labels: HashMap::new(),
            pairs: HashMap::new(),
            aux_counter: 0,
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_var(&mut self, domain: Domain, kind: VarKind, label: Option<&str>) -> Result<Var> {
        if let Some(l) = label {
            if self.labels.contains_key(l) {
                return Err(Error::InvalidParameter(format!("duplicate variable label `{l}`")));
            }
        }
        let id = VarId(self.entries.len() as u32);
        if let Some(l) = label {
            self.labels.insert(l.to_string(), id);
        }
        self.entries.push(VarInfo { domain, kind, label: label.map(str::to_string) });
        Ok(Var { id, domain })
    }

    pub fn add_original(&mut self, domain: Domain, label: Option<&str>) -> Result<Var> {
        self.add_var(domain, VarKind::Original, label)
    }

    /// `n` Boolean originals labelled `b1..bn`.
    pub fn booleans(&mut self, n: usize) -> Result<Vec<Var>> {
        self.labelled(Domain::Boolean, n)
    }

    /// `n` spin originals labelled `z1..zn`.
    pub fn spins(&mut self, n: usize) -> Result<Vec<Var>> {
        self.labelled(Domain::Spin, n)
    }

    fn labelled(&mut self, domain: Domain, n: usize) -> Result<Vec<Var>> {
        let start = self
            .entries
            .iter()
            .filter_map(|e| e.label.as_deref().and_then(|l| grammatical_index(l, domain)))
            .max()
            .unwrap_or(0);
        (1..=n as u64)
            .map(|i| self.add_original(domain, Some(&format!("{}{}", domain.letter(), start + i))))
            .collect()
    }

    /// Allocates a fresh auxiliary labelled `a1`, `a2`, ... in allocation order.
    pub fn fresh_aux(&mut self, domain: Domain, gadget: &str) -> Var {
        let label = loop {
            self.aux_counter += 1;
            let l = format!("a{}", self.aux_counter);
            if !self.labels.contains_key(&l) {
                break l;
            }
        };
        self.add_var(domain, VarKind::Auxiliary(gadget.to_string()), Some(&label))
            .expect("label checked free")
    }

    pub fn info(&self, id: VarId) -> Result<&VarInfo> {
        self.entries.get(id.index()).ok_or(Error::UnknownVariable(id))
    }

    pub fn var(&self, id: VarId) -> Result<Var> {
        Ok(Var { id, domain: self.info(id)?.domain })
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| Var { id: VarId(i as u32), domain: e.domain })
    }

    pub fn lookup(&self, label: &str) -> Option<Var> {
        self.labels.get(label).map(|&id| Var { id, domain: self.entries[id.index()].domain })
    }

    pub fn label(&self, id: VarId) -> Option<&str> {
        self.entries.get(id.index()).and_then(|e| e.label.as_deref())
    }

    pub fn is_aux(&self, id: VarId) -> bool {
        self.entries.get(id.index()).is_some_and(VarInfo::is_aux)
    }

    /// Counterpart of `id` in `domain` under `z = 2b - 1`, created on first use.
    ///
    /// A label like `b3` becomes `z3` when that label is free.
    pub fn counterpart(&mut self, id: VarId, domain: Domain) -> Result<Var> {
        let info = self.info(id)?.clone();
        if info.domain == domain {
            return Ok(Var { id, domain });
        }
        if let Some(&other) = self.pairs.get(&id) {
            if self.entries[other.index()].domain == domain {
                return Ok(Var { id: other, domain });
            }
        }
        let label = info
            .label
            .as_deref()
            .and_then(|l| grammatical_index(l, info.domain))
            .map(|n| format!("{}{}", domain.letter(), n))
            .filter(|l| !self.labels.contains_key(l));
        let var = self.add_var(domain, info.kind, label.as_deref())?;
        self.pairs.insert(id, var.id);
        self.pairs.insert(var.id, id);
        Ok(var)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.space)
    }

    pub fn constant(&self, c: Rational) -> Polynomial {
        Polynomial::constant(self.space, c)
    }

    pub fn poly(&self, var: Var) -> Polynomial {
        Polynomial::monomial(self.space, Monomial::var(var), crate::rational::int(1))
    }

    /// Product of the given variables, as a monomial.
    pub fn monomial(&self, ids: &[VarId]) -> Result<Monomial> {
        let vars = ids.iter().map(|&id| self.var(id)).collect::<Result<Vec<_>>>()?;
        Ok(Monomial::from_vars(vars))
    }
}

/// `Some(n)` when `label` is `<letter of domain><n>` with `n >= 1` and no leading zero.
pub(crate) fn grammatical_index(label: &str, domain: Domain) -> Option<u64> {
    let rest = label.strip_prefix(domain.letter())?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_ids_and_unique_labels() {
        let mut reg = VariableRegistry::new();
        let b = reg.booleans(3).unwrap();
        assert_eq!(b.iter().map(|v| v.id.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(reg.add_original(Domain::Boolean, Some("b2")).is_err());
        let a = reg.fresh_aux(Domain::Boolean, "g");
        let a2 = reg.fresh_aux(Domain::Boolean, "g");
        assert_eq!(reg.label(a.id), Some("a1"));
        assert_eq!(reg.label(a2.id), Some("a2"));
        assert!(reg.is_aux(a.id) && !reg.is_aux(b[0].id));
    }

    #[test]
    fn counterpart_is_cached_and_named() {
        let mut reg = VariableRegistry::new();
        let b = reg.booleans(2).unwrap();
        let z = reg.counterpart(b[1].id, Domain::Spin).unwrap();
        assert_eq!(reg.label(z.id), Some("z2"));
        assert_eq!(reg.counterpart(b[1].id, Domain::Spin).unwrap(), z);
        assert_eq!(reg.counterpart(z.id, Domain::Boolean).unwrap(), b[1]);
    }

    #[test]
    fn grammatical_labels() {
        assert_eq!(grammatical_index("b12", Domain::Boolean), Some(12));
        assert_eq!(grammatical_index("b0", Domain::Boolean), None);
        assert_eq!(grammatical_index("z1", Domain::Boolean), None);
        assert_eq!(grammatical_index("a1", Domain::Boolean), None);
    }
}
