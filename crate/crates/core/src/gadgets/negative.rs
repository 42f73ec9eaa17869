//! Gadgets for negative monomials.

use super::{finish, passthrough, plain_vars, require_degree, require_negative, sum, GadgetResult, Guarantee};
use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, VariableRegistry};
use crate::rational::{int, Rational};

/// `(k-1) a - sum_i b_i a`. All quadratic terms are submodular.
pub fn ntr_kzfd(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ntr_kzfd";
    require_negative(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len() as i64;
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let unit = pa.scale(&int(k - 1)) - sum(reg, &b) * &pa;
    Ok(finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin))
}

/// `sum_{i<k} b_i - sum_{i<k} b_i b_k - sum_i b_i a + (k-1) b_k a`, with exactly
/// one positive quadratic term.
pub fn ntr_abcg(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ntr_abcg";
    require_negative(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    if k <= 2 {
        return Ok(passthrough(NAME, coeff, m, reg));
    }
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let (pa, last) = (reg.poly(a), reg.poly(b[k - 1]));
    let head = sum(reg, &b[..k - 1]);
    let unit = &head - &(&head * &last) - sum(reg, &b) * &pa + (&last * &pa).scale(&int(k as i64 - 1));
    Ok(finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin))
}

/// `(C k - 1) a - C sum_i b_i a` for `C >= 1` (default 2). `C = 1` is [`ntr_kzfd`].
pub fn ntr_abcg2(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry, c: Option<Rational>) -> Result<GadgetResult> {
    const NAME: &str = "ntr_abcg2";
    require_negative(NAME, coeff)?;
    let c = c.unwrap_or_else(|| int(2));
    if c < int(1) {
        return Err(Error::InvalidParameter(format!("{NAME} needs C >= 1, got {c}")));
    }
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = int(b.len() as i64);
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let unit = pa.scale(&(&c * k - int(1))) - (sum(reg, &b) * &pa).scale(&c);
    let mut r = finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin);
    r.trace.push_str(&format!(" (C = {c})"));
    Ok(r)
}

/// Cubic rewrite that singles out one variable:
/// `a (-b_p + b_q + b_r) - b_p b_q - b_p b_r + b_p` for pivot `p` in 1..=3.
pub fn ntr_gbp(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry, pivot: usize) -> Result<GadgetResult> {
    const NAME: &str = "ntr_gbp";
    require_negative(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    require_degree(NAME, b.len(), b.len() == 3)?;
    if !(1..=3).contains(&pivot) {
        return Err(Error::InvalidParameter(format!("pivot must be 1, 2 or 3, got {pivot}")));
    }
    let p = reg.poly(b[pivot - 1]);
    let others: Vec<_> = b.iter().enumerate().filter(|&(i, _)| i != pivot - 1).map(|(_, &v)| v).collect();
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let so = sum(reg, &others);
    let unit = &pa * &(&so - &p) - &p * &so + &p;
    let mut r = finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin);
    r.trace.push_str(&format!(" (pivot {pivot})"));
    Ok(r)
}

/// `(1 + 4t + z_1 + z_2 + z_3)^2 - 1` with a ternary `t`. Only the minimizing
/// set survives: the minimum over `t` is `2 f + 1`.
pub fn ntr_rbl(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ntr_rbl";
    require_negative(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 3)?;
    let t = reg.fresh_aux(Domain::Ternary, NAME);
    let one = reg.constant(int(1));
    let inner = &one + &reg.poly(t).scale(&int(4)) + sum(reg, &z);
    let unit = inner.pow(2) - one;
    Ok(finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving))
}
