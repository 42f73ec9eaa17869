use std::cmp::Ordering;

use super::{Var, VarId};

/// Product of variable powers in canonical form.
///
/// Factors are sorted by id and each exponent is reduced for its domain:
/// Boolean and spin exponents are 1, ternary exponents are 1 or 2. The empty
/// product is the constant monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial::from_factors([(v, 1)])
    }

    pub fn from_vars(vars: impl IntoIterator<Item = Var>) -> Self {
        Monomial::from_factors(vars.into_iter().map(|v| (v, 1)))
    }

    /// Builds a monomial from arbitrary factors, merging repeats and reducing exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut raw: Vec<(Var, u32)> = factors.into_iter().filter(|&(_, e)| e > 0).collect();
        raw.sort_by_key(|(v, _)| v.id);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(raw.len());
        for (v, e) in raw {
            match out.last_mut() {
                Some((last, le)) if last.id == v.id => *le += e,
                _ => out.push((v, e)),
            }
        }
        out.iter_mut().for_each(|(v, e)| *e = v.domain.reduce_exponent(*e));
        out.retain(|&(_, e)| e > 0);
        Monomial { factors: out }
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.factors.iter().map(|&(v, _)| v.id)
    }

    /// Total exponent.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize).sum()
    }

    /// Number of distinct variables.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, id: VarId) -> u32 {
        self.factors
            .binary_search_by_key(&id, |(v, _)| v.id)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, id: VarId) -> bool {
        self.exponent(id) > 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        Monomial::from_factors(self.factors.iter().chain(&other.factors).copied())
    }

    /// The monomial with `id` removed, and the exponent it had.
    pub fn split_off(&self, id: VarId) -> (Monomial, u32) {
        let e = self.exponent(id);
        let rest = self.factors.iter().filter(|(v, _)| v.id != id).copied().collect();
        (Monomial { factors: rest }, e)
    }

    pub fn without(&self, id: VarId) -> Monomial {
        self.split_off(id).0
    }

    /// `self / d` when every factor of `d` appears in `self` with at least its exponent.
    pub fn divide(&self, d: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for &(v, e) in &self.factors {
            if j < d.factors.len() && d.factors[j].0.id == v.id {
                let de = d.factors[j].1;
                if de > e {
                    return None;
                }
                if e > de {
                    out.push((v, e - de));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        (j == d.factors.len()).then_some(Monomial { factors: out })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.divide(self).is_some()
    }

    /// Value under `value(id)`, which must return a domain value for every factor.
    pub fn eval_with(&self, mut value: impl FnMut(VarId) -> i64) -> i64 {
        self.factors.iter().map(|&(v, e)| value(v.id).pow(e)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let a = self.factors.iter().map(|(v, e)| (v.id, *e));
            let b = other.factors.iter().map(|(v, e)| (v.id, *e));
            a.cmp(b)
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
