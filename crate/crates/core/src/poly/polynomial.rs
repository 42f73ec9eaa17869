use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Assignment, Domain, Monomial, SpaceId, Var, VarId, VariableRegistry};
use crate::error::{Error, Result};
use crate::rational::{half, int, Rational};

/// Sparse polynomial with exact coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    space: SpaceId,
    terms: BTreeMap<Monomial, Rational>,
}

/// Which Boolean variables were complemented, for mapping assignments back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlipMask {
    pub vars: BTreeSet<VarId>,
}

impl FlipMask {
    /// Complements the flipped coordinates. Applying it twice is the identity.
    pub fn apply(&self, a: &Assignment) -> Assignment {
        a.iter()
            .map(|(id, v)| if self.vars.contains(&id) { (id, 1 - v) } else { (id, v) })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubmodularityReport {
    /// Quadratic terms with a positive coefficient.
    pub non_submodular: usize,
    pub quadratic_terms: usize,
    /// Largest |coefficient| over non-constant terms.
    pub max_abs_coefficient: Rational,
}

impl Polynomial {
    pub fn zero(space: SpaceId) -> Self {
        Polynomial { space, terms: BTreeMap::new() }
    }

    pub fn constant(space: SpaceId, c: Rational) -> Self {
        Polynomial::monomial(space, Monomial::one(), c)
    }

    pub fn monomial(space: SpaceId, m: Monomial, c: Rational) -> Self {
        let mut p = Polynomial::zero(space);
        p.add_term(m, c);
        p
    }

    /// Sums the given terms, merging equal monomials.
    pub fn from_terms(space: SpaceId, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(space);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Rebuilds every monomial through the canonicalizing constructor.
    pub fn canonicalize(&self) -> Polynomial {
        Polynomial::from_terms(
            self.space,
            self.terms.iter().map(|(m, c)| (Monomial::from_factors(m.factors().iter().copied()), c.clone())),
        )
    }

    fn same_space(&self, other: &Polynomial) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_space(other)?;
        let mut out = Polynomial::zero(self.space);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.space);
        }
        Polynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    fn neg_ref(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.space, Rational::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Variables that appear in some term.
    pub fn support(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn support_ids(&self) -> Vec<VarId> {
        let ids: BTreeSet<VarId> = self.terms.keys().flat_map(|m| m.ids()).collect();
        ids.into_iter().collect()
    }

    /// Exact value at `a`, which must cover the support with in-domain values.
    pub fn evaluate(&self, a: &Assignment) -> Result<Rational> {
        for v in self.support() {
            let x = a.get(v.id).ok_or(Error::MissingVariable(v.id))?;
            check_value(v, x)?;
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let x = m.eval_with(|id| i64::from(a.get(id).expect("checked above")));
            if x != 0 {
                total += c * int(x);
            }
        }
        Ok(total)
    }

    /// Fixes the variables that `a` assigns and keeps the rest symbolic.
    pub fn restrict(&self, a: &Assignment) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.space);
        for (m, c) in &self.terms {
            let mut factor = 1i64;
            let mut rest = Vec::new();
            for &(v, e) in m.factors() {
                match a.get(v.id) {
                    Some(x) => {
                        check_value(v, x)?;
                        factor *= i64::from(x).pow(e);
                    }
                    None => rest.push((v, e)),
                }
            }
            if factor != 0 {
                out.add_term(Monomial::from_factors(rest), c * int(factor));
            }
        }
        Ok(out)
    }

    /// Replaces every occurrence of `v` by `r`.
    pub fn substitute(&self, reg: &VariableRegistry, v: VarId, r: &Polynomial) -> Result<Polynomial> {
        self.same_space(r)?;
        if reg.space() != self.space {
            return Err(Error::RegistryMismatch);
        }
        reg.info(v)?;
        for id in r.support_ids() {
            reg.info(id)?;
        }
        let mut powers: Vec<Polynomial> = vec![Polynomial::constant(self.space, Rational::one())];
        let mut out = Polynomial::zero(self.space);
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(v);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e as usize {
                let next = powers.last().expect("non-empty") * r;
                powers.push(next);
            }
            for (rm, rc) in &powers[e as usize].terms {
                out.add_term(rest.mul(rm), c * rc);
            }
        }
        Ok(out)
    }

    /// Replaces each listed Boolean `b` by `1 - b`.
    pub fn flip(&self, reg: &VariableRegistry, vars: &BTreeSet<VarId>) -> Result<(Polynomial, FlipMask)> {
        let mut out = self.clone();
        for &id in vars {
            let var = reg.var(id)?;
            if var.domain != Domain::Boolean {
                return Err(Error::DomainViolation(format!("cannot flip non-Boolean variable {id}")));
            }
            let r = &reg.constant(Rational::one()) - &reg.poly(var);
            out = out.substitute(reg, id, &r)?;
        }
        Ok((out, FlipMask { vars: vars.clone() }))
    }

    /// Rewrites a Boolean polynomial over spins via `b = (1 + z)/2`.
    pub fn to_spin(&self, reg: &mut VariableRegistry) -> Result<Polynomial> {
        self.convert(reg, Domain::Boolean, Domain::Spin)
    }

    /// Rewrites a spin polynomial over Booleans via `z = 2b - 1`.
    pub fn to_boolean(&self, reg: &mut VariableRegistry) -> Result<Polynomial> {
        self.convert(reg, Domain::Spin, Domain::Boolean)
    }

    fn convert(&self, reg: &mut VariableRegistry, from: Domain, to: Domain) -> Result<Polynomial> {
        if reg.space() != self.space {
            return Err(Error::RegistryMismatch);
        }
        let support = self.support();
        if let Some(v) = support.iter().find(|v| v.domain != from) {
            return Err(Error::DomainViolation(format!(
                "variable {} has domain {:?}, expected {:?}",
                v.id, v.domain, from
            )));
        }
        let mut out = self.clone();
        for v in support {
            let w = reg.counterpart(v.id, to)?;
            let one = reg.constant(Rational::one());
            let r = match to {
                Domain::Spin => (&one + &reg.poly(w)).scale(&half()),
                _ => &reg.poly(w).scale(&int(2)) - &one,
            };
            out = out.substitute(reg, v.id, &r)?;
        }
        Ok(out)
    }

    pub fn submodularity_report(&self) -> Result<SubmodularityReport> {
        let d = self.degree();
        if d > 2 {
            return Err(Error::NotQuadratic(d));
        }
        if let Some(v) = self.support().into_iter().find(|v| v.domain != Domain::Boolean) {
            return Err(Error::DomainViolation(format!("variable {} is not Boolean", v.id)));
        }
        let mut report = SubmodularityReport::default();
        for (m, c) in &self.terms {
            if m.degree() == 2 {
                report.quadratic_terms += 1;
                if c.is_positive() {
                    report.non_submodular += 1;
                }
            }
            if !m.is_one() && c.abs() > report.max_abs_coefficient {
                report.max_abs_coefficient = c.abs();
            }
        }
        Ok(report)
    }

    /// Terms of degree at least `d`.
    pub fn terms_of_degree_at_least(&self, d: usize) -> Vec<(Monomial, Rational)> {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree() >= d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

fn check_value(v: Var, x: i8) -> Result<()> {
    if v.domain.contains(i64::from(x)) {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!("value {x} outside {:?} for variable {}", v.domain, v.id)))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomials from different registries")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}
