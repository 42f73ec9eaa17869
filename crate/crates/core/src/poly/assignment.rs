use std::collections::BTreeMap;

use serde::Serialize;

use super::VarId;

/// Values for some set of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Assignment {
    values: BTreeMap<VarId, i8>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, i8)>) -> Self {
        Assignment { values: pairs.into_iter().collect() }
    }

    pub fn set(&mut self, id: VarId, value: i8) {
        self.values.insert(id, value);
    }

    pub fn with(mut self, id: VarId, value: i8) -> Self {
        self.set(id, value);
        self
    }

    pub fn get(&self, id: VarId) -> Option<i8> {
        self.values.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, i8)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    /// Only the listed variables.
    pub fn restrict(&self, ids: &[VarId]) -> Assignment {
        Assignment::from_pairs(ids.iter().filter_map(|&id| self.get(id).map(|v| (id, v))))
    }

    /// Union, with `other` winning on shared ids.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        out.values.extend(other.iter());
        out
    }
}

impl FromIterator<(VarId, i8)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, i8)>>(iter: I) -> Self {
        Assignment::from_pairs(iter)
    }
}
