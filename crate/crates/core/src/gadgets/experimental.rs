//! Gadgets whose formulas are only exposed after the oracle accepts them.

use num_traits::{Signed, Zero};

use super::{
    descriptor, finish, pair_sum, plain_vars, require_degree, require_negative, require_positive, sum, GadgetResult,
    Guarantee,
};
use crate::error::{Error, Result};
use crate::poly::{Domain, Monomial, Polynomial, Var, VariableRegistry};
use crate::rational::{frac, int, Rational};
use crate::verify::{VerificationReport, Verifier};

/// Builds the named gadget and checks it exhaustively. A failed check is
/// returned as `VerificationFailed` carrying the report.
pub fn experimental_single_term(
    name: &str,
    coeff: &Rational,
    m: &Monomial,
    reg: &mut VariableRegistry,
) -> Result<GadgetResult> {
    let (result, report) = experimental_report(name, coeff, m, reg)?;
    report.into_result()?;
    Ok(result)
}

/// Builds the named gadget and returns it together with its verification report,
/// whatever the verdict.
pub fn experimental_report(
    name: &str,
    coeff: &Rational,
    m: &Monomial,
    reg: &mut VariableRegistry,
) -> Result<(GadgetResult, VerificationReport)> {
    let d = descriptor(name).ok_or_else(|| Error::UnknownGadget(name.to_string()))?;
    let result = (d.build)(coeff, m, reg)?;
    let report = result.verify(&Verifier::default())?;
    Ok((result, report))
}

/// `sum b + sum_{i<j} b_i b_j + sum_{i=1}^{(k-1)/2} a_i (4i - 3 - sum b)`, odd `k`.
pub fn ptr_bcr1(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_bcr1";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let k = b.len();
    require_degree(NAME, k, k >= 3 && k % 2 == 1)?;
    let s = sum(reg, &b);
    let mut unit = &s + &pair_sum(reg, &b);
    let mut aux = Vec::new();
    for i in 1..=(k - 1) / 2 {
        let a = reg.fresh_aux(Domain::Boolean, NAME);
        unit = unit + reg.poly(a) * (reg.constant(int(4 * i as i64 - 3)) - &s);
        aux.push(a);
    }
    Ok(finish(NAME, coeff, m, reg, unit, aux, Guarantee::PointwiseMin))
}

/// Linear-aux reduction with `m = ceil(k/4)` aux and the tabulated coefficient
/// table read row by row.
pub fn ptr_bcr2(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_bcr2";
    require_positive(NAME, coeff)?;
    let b = plain_vars(NAME, m, Domain::Boolean)?;
    let n = b.len();
    require_degree(NAME, n, n >= 3)?;
    let mm = n.div_ceil(4);
    let a: Vec<Var> = (0..mm).map(|_| reg.fresh_aux(Domain::Boolean, NAME)).collect();
    let (ni, mi) = (n as i64, mm as i64);
    let alpha_b = frac(-1, 2);
    let alpha_bba1 = int(-1);
    let alpha_a1 = int(1);
    let alpha_bba2 = int(-2);
    let alpha_a2 = frac(ni - mi + ni * ni - 2 * mi * ni + mi * mi, 2);
    let alpha_a1a1 = int(-(ni - mi));
    let alpha_bb = frac(1, 2);
    let alpha_a1a2 = int(4 * (ni - mi));

    let last = reg.poly(a[mm - 1]);
    let head = &a[..mm - 1];
    let (sb, sh) = (sum(reg, &b), sum(reg, head));
    let unit = sb.scale(&alpha_b)
        + sh.scale(&alpha_a1)
        + last.scale(&alpha_a2)
        + pair_sum(reg, &b).scale(&alpha_bb)
        + (&sb * &sh).scale(&alpha_bba1)
        + (&sb * &last).scale(&alpha_bba2)
        + pair_sum(reg, head).scale(&alpha_a1a1)
        + (&sh * &last).scale(&alpha_a1a2);
    Ok(finish(NAME, coeff, m, reg, unit, a, Guarantee::PointwiseMin))
}

/// `3 ± (z_1 + z_2 + z_3 + z_a) + 2 z_a (z_1 + z_2 + z_3) + sum_{i<j} z_i z_j`
/// with the sign of the coefficient.
pub fn ptr_kz_z(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_kz_z";
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 3)?;
    if coeff.is_zero() {
        return Err(Error::WrongSign { gadget: NAME });
    }
    let a = reg.fresh_aux(Domain::Spin, NAME);
    let (pa, s) = (reg.poly(a), sum(reg, &z));
    let sign = if coeff.is_negative() { int(-1) } else { int(1) };
    let unit = reg.constant(int(3)) + (&s + &pa).scale(&sign) + (&pa * &s).scale(&int(2)) + pair_sum(reg, &z);
    Ok(finish(NAME, coeff, m, reg, unit, vec![a], Guarantee::PointwiseMin))
}

fn rbl_square(reg: &mut VariableRegistry, name: &str, z: &[Var], mirrored: bool) -> (Polynomial, Var) {
    let t = reg.fresh_aux(Domain::Ternary, name);
    let s = sum(reg, z);
    let s = if mirrored { -s } else { s };
    let one = reg.constant(int(1));
    let inner = &one + &reg.poly(t).scale(&int(4)) + s;
    (inner.pow(2) - one, t)
}

/// `(1 + 4t + z_1 + z_2 + z_3)^2 - 1` applied to a positive cubic, unmodified.
pub fn ptr_rbl_3to2(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_rbl_3to2";
    require_positive(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 3)?;
    let (unit, t) = rbl_square(reg, NAME, &z, false);
    Ok(finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving))
}

/// `(1 + 4t - z_1 - z_2 - z_3)^2 - 1`, the `z -> -z` image of the negative-cubic form.
pub fn ptr_rbl_3to2_mirrored(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_rbl_3to2_mirrored";
    require_positive(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 3)?;
    let (unit, t) = rbl_square(reg, NAME, &z, true);
    Ok(finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving))
}

fn quartic_z_form(reg: &mut VariableRegistry, name: &str, z: &[Var]) -> (Polynomial, Var) {
    let t = reg.fresh_aux(Domain::Ternary, name);
    let pt = reg.poly(t);
    let unit = pt.pow(2).scale(&int(16))
        + (&pt * &sum(reg, z)).scale(&int(4))
        + pair_sum(reg, z).scale(&int(2))
        + reg.constant(int(4));
    (unit, t)
}

/// `16 t^2 + 4 t sum z + 2 sum_{i<j} z_i z_j + 4` for a positive quartic.
pub fn ptr_rbl_4to2(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ptr_rbl_4to2";
    require_positive(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 4)?;
    let (unit, t) = quartic_z_form(reg, NAME, &z);
    Ok(finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving))
}

/// The same quartic form applied to a negative quartic.
pub fn ntr_lhz_z(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ntr_lhz_z";
    require_negative(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 4)?;
    let (unit, t) = quartic_z_form(reg, NAME, &z);
    Ok(finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving))
}

/// Negative spin quartic rewritten over the Boolean counterparts:
/// `16 t^2 + 8 t sum b + 8 sum_{i<j} b_i b_j + 16`. The target is the
/// Boolean expansion of the input term.
pub fn ntr_lhz(coeff: &Rational, m: &Monomial, reg: &mut VariableRegistry) -> Result<GadgetResult> {
    const NAME: &str = "ntr_lhz";
    require_negative(NAME, coeff)?;
    let z = plain_vars(NAME, m, Domain::Spin)?;
    require_degree(NAME, z.len(), z.len() == 4)?;
    let target = Polynomial::monomial(reg.space(), m.clone(), coeff.clone()).to_boolean(reg)?;
    let b: Vec<Var> = z.iter().map(|v| reg.counterpart(v.id, Domain::Boolean)).collect::<Result<_>>()?;
    let t = reg.fresh_aux(Domain::Ternary, NAME);
    let pt = reg.poly(t);
    let unit = pt.pow(2).scale(&int(16))
        + (&pt * &sum(reg, &b)).scale(&int(8))
        + pair_sum(reg, &b).scale(&int(8))
        + reg.constant(int(16));
    let mut r = finish(NAME, coeff, m, reg, unit, vec![t], Guarantee::GroundStatePreserving);
    r.target = target;
    Ok(r)
}
