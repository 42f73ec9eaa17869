//! Gadgets for positive monomials.

use super::{finish, pair_sum, passthrough, plain_vars, require_degree, require_positive, sum, GadgetResult, Guarantee};
use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, Var, VariableRegistry};
use crate::rational::{ceil_log2, frac, int, pow2, Rational};

fn fresh(reg: &mut VariableRegistry, name: &str, n: usize) -> Vec<Var> {
    (0..n).map(|_| reg.fresh_aux(Domain::Boolean, name)).collect()
}

/// `sum_{i=1}^{k-2} a_i (k-i-1 + b_i - sum_{j>i} b_j) + b_{k-1} b_k`, with `k - 2` aux.
pub fn ptr_bg(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_bg";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    require_degree(NAME, k, k >= 3)?;
    let a = fresh(reg, NAME, k - 2);
    let mut unit = reg.poly(b[k - 2]) * reg.poly(b[k - 1]);
    for i in 1..=k - 2 {
        let inner = reg.constant(int((k - i - 1) as i64)) + reg.poly(b[i - 1]) - sum(reg, &b[i..]);
        unit = unit + reg.poly(a[i - 1]) * inner;
    }
    Ok(finish(NAME, coeff, m, reg, unit, a, Guarantee::PointwiseMin))
}

/// Symmetric reduction with `floor((k-1)/2)` aux:
/// `sum_i a_i (c_i (2i - sum b) - 1) + sum_{i<j} b_i b_j`, where `c_i = 1` for
/// the last aux when `k` is odd and 2 otherwise.
pub fn ptr_ishikawa(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_ishikawa";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    require_degree(NAME, k, k >= 3)?;
    let n = (k - 1) / 2;
    let a = fresh(reg, NAME, n);
    let s = sum(reg, &b);
    let mut unit = pair_sum(reg, &b);
    for i in 1..=n {
        let c = if i == n && k % 2 == 1 { 1 } else { 2 };
        let inner = (reg.constant(int(2 * i as i64)) - &s).scale(&int(c)) - reg.constant(int(1));
        unit = unit + reg.poly(a[i - 1]) * inner;
    }
    Ok(finish(NAME, coeff, m, reg, unit, a, Guarantee::PointwiseMin))
}

/// `(2^m - k + sum b - sum_{i=1}^m 2^{i-1} a_i)^2` with `m = ceil(log2 k)`.
pub fn ptr_bcr3(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_bcr3";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    if k <= 2 {
        return Ok(passthrough(NAME, coeff, m, reg));
    }
    let mm = ceil_log2(k);
    let a = fresh(reg, NAME, mm as usize);
    let mut inner = reg.constant(pow2(mm) - int(k as i64)) + sum(reg, &b);
    for (i, &ai) in a.iter().enumerate() {
        inner = inner - reg.poly(ai).scale(&pow2(i as u32));
    }
    let unit = inner.pow(2);
    Ok(finish(NAME, coeff, m, reg, unit, a, Guarantee::PointwiseMin))
}

/// `1/2 (N + sum b - sum_{i=1}^m 2^i a_i)(N + sum b - sum_{i=1}^m 2^i a_i - 1)`
/// with `m = ceil(log2 k) - 1` and `N = 2^(m+1) - k`.
pub fn ptr_bcr4(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_bcr4";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    if k <= 2 {
        return Ok(passthrough(NAME, coeff, m, reg));
    }
    let mm = ceil_log2(k) - 1;
    let a = fresh(reg, NAME, mm as usize);
    let mut y = reg.constant(pow2(mm + 1) - int(k as i64)) + sum(reg, &b);
    for (i, &ai) in a.iter().enumerate() {
        y = y - reg.poly(ai).scale(&pow2(i as u32 + 1));
    }
    let unit = (&y * &(&y - &reg.constant(int(1)))).scale(&frac(1, 2));
    Ok(finish(NAME, coeff, m, reg, unit, a, Guarantee::PointwiseMin))
}

/// Minimum-selection cubic: `1 - (a + sum b) + a sum b + sum_{i<j} b_i b_j`.
pub fn ptr_kz(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_kz";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    require_degree(NAME, b.len(), b.len() == 3)?;
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let (pa, s) = (reg.poly(a), sum(reg, &b));
    let unit = reg.constant(int(1)) - &pa - &s + &pa * &s + pair_sum(reg, &b);
    Ok(finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin))
}

/// Cubic rewrite that singles out one variable:
/// `a - (b_q + b_r) a + b_p a + b_q b_r` for pivot `p` in 1..=3.
pub fn ptr_gbp(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry, pivot: usize) -> Result<GadgetResult> {
    const NAME: &str = "ptr_gbp";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    require_degree(NAME, b.len(), b.len() == 3)?;
    if !(1..=3).contains(&pivot) {
        return Err(Error::InvalidParameter(format!("pivot must be 1, 2 or 3, got {pivot}")));
    }
    let others: Vec<Var> = b.iter().enumerate().filter(|&(i, _)| i != pivot - 1).map(|(_, &v)| v).collect();
    let a = reg.fresh_aux(Domain::Boolean, NAME);
    let pa = reg.poly(a);
    let unit = &pa - &(sum(reg, &others) * &pa) + reg.poly(b[pivot - 1]) * &pa + reg.poly(others[0]) * reg.poly(others[1]);
    let mut r = finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin);
    r.trace.push_str(&format!(" (pivot {pivot})"));
    Ok(r)
}
