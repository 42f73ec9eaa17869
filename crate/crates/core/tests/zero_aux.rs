mod common;

use common::{poly, random_boolean};
use quadratizer::poly::{Assignment, Monomial};
use quadratizer::rational::int;
use quadratizer::verify::{check_conditional, enumerate_min, Evidence, Verifier};
use quadratizer::zero_aux::{
    apply_deduc_reduc, apply_elc, cofactor, elc_cancel, elc_indicator, find_elcs, find_zero_deductions,
    most_connected, solve_by_splitting, split, Deduction, EvidenceTag, SplitOptions,
};
use quadratizer::{Error, Guarantee, Penalty, Polynomial, VariableRegistry};

// b1 b2 (4 + b3 + b3 b4) + b1 (b3 - 3) + b2 (1 - 2 b3 - b4)
const DEDUC: &str = "4 b1 b2 + b1 b2 b3 + b1 b2 b3 b4 + b1 b3 - 3 b1 + b2 - 2 b2 b3 - b2 b4";
const ELC: &str = "b1 b2 + b2 b3 + b3 b4 - 4 b1 b2 b3";
const SPLIT: &str = "1 + b1 b2 b5 + b1 b6 b7 b8 + b3 b4 b8 - b1 b3 b4";

/// Minimizers over all of `reg`'s variables, restricted to `ids`.
fn projected_argmin_in(reg: &VariableRegistry, p: &Polynomial, ids: &[quadratizer::VarId]) -> Vec<Assignment> {
    let vars: Vec<_> = reg.vars().collect();
    let (_, mut states) = Verifier::default().enumerate_min_over(p, &vars).unwrap();
    states.iter_mut().for_each(|a| *a = a.restrict(ids));
    states.sort();
    states.dedup();
    states
}

fn projected_argmin(p: &Polynomial, ids: &[quadratizer::VarId]) -> Vec<Assignment> {
    let (_, mut states) = enumerate_min(p).unwrap();
    states.iter_mut().for_each(|a| *a = a.restrict(ids));
    states.sort();
    states.dedup();
    states
}

/// Parses `text` over the labels already in `reg`.
fn reparse(reg: &VariableRegistry, text: &str) -> Polynomial {
    quadratizer::io::parse_into(text, &mut reg.clone()).unwrap()
}

fn mono(reg: &VariableRegistry, labels: &[&str]) -> Monomial {
    Monomial::from_vars(labels.iter().map(|l| reg.lookup(l).unwrap()))
}

#[test]
fn deduction_found_and_applied() {
    let (reg, p) = poly(DEDUC);
    let deductions = find_zero_deductions(&p, 2).unwrap();
    let target = mono(&reg, &["b1", "b2"]);
    let d = deductions.iter().find(|d| d.monomial() == &target).expect("b1 b2 vanishes at every minimum");
    assert_eq!(d.evidence(), EvidenceTag::OracleProven);
    let r = apply_deduc_reduc(&p, d, &Penalty::Auto, false).unwrap();
    let expected = reparse(&reg, "6 b1 b2 + b1 b3 - 3 b1 + b2 - 2 b2 b3 - b2 b4");
    assert_eq!(r.output, expected);
    assert_eq!(r.guarantee, Guarantee::ConditionalMin);
    let report = check_conditional(&p, &r.output, &[Evidence::Deduction(d.clone())]).unwrap();
    assert!(report.passed);
    assert_eq!(enumerate_min(&p).unwrap(), enumerate_min(&r.output).unwrap());
}

#[test]
fn deduction_ordering_and_trivial_case() {
    let (reg, p) = poly("b1");
    let d = find_zero_deductions(&p, 1).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].monomial(), &mono(&reg, &["b1"]));

    let (reg, p) = poly(ELC);
    let d = find_zero_deductions(&p, 2).unwrap();
    assert!(d.iter().any(|d| d.monomial() == &mono(&reg, &["b4"])));
    assert!(d.iter().any(|d| d.monomial() == &mono(&reg, &["b1", "b4"])));
    let arities: Vec<_> = d.iter().map(|d| d.monomial().degree()).collect();
    assert!(arities.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn deduc_reduc_rejects_unproven_and_low_penalties() {
    let (reg, p) = poly(DEDUC);
    let asserted = Deduction::asserted(mono(&reg, &["b1", "b2"]));
    assert!(matches!(apply_deduc_reduc(&p, &asserted, &Penalty::Auto, false), Err(Error::DeductionUnproven)));
    assert!(apply_deduc_reduc(&p, &asserted, &Penalty::Auto, true).is_ok());
    let proven = find_zero_deductions(&p, 2).unwrap().into_iter().find(|d| d.monomial().degree() == 2).unwrap();
    assert!(matches!(apply_deduc_reduc(&p, &proven, &Penalty::Value(int(5)), false), Err(Error::InvalidParameter(_))));
    let report = check_conditional(&p, &p, &[Evidence::Deduction(asserted)]);
    assert!(matches!(report, Err(Error::DeductionUnproven)));
}

#[test]
fn deduction_with_empty_cofactor_adds_penalty() {
    let (reg, p) = poly("b1 b2 b3 - b3 + 2 b4");
    let m = mono(&reg, &["b4"]);
    let (c, rest) = cofactor(&p, &m);
    assert_eq!(c, reg.constant(int(2)));
    let d = find_zero_deductions(&p, 1).unwrap().into_iter().find(|d| d.monomial() == &m).unwrap();
    let r = apply_deduc_reduc(&p, &d, &Penalty::Auto, false).unwrap();
    assert_eq!(r.output, rest + Polynomial::monomial(reg.space(), m, int(2)));
}

#[test]
fn deduc_reduc_preserves_minima_on_random_instances() {
    let mut checked = 0;
    for seed in 0..60 {
        let (reg, p) = random_boolean(seed, 6, 4, 10);
        let Some(d) = find_zero_deductions(&p, 2).unwrap().into_iter().find(|d| {
            let (c, _) = cofactor(&p, d.monomial());
            c.degree() > 0
        }) else {
            continue;
        };
        let r = apply_deduc_reduc(&p, &d, &Penalty::Auto, false).unwrap();
        let ids = p.support_ids();
        assert_eq!(enumerate_min(&p).unwrap().0, enumerate_min(&r.output).unwrap().0, "seed {seed}");
        assert_eq!(projected_argmin_in(&reg, &p, &ids), projected_argmin_in(&reg, &r.output, &ids), "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} instances had a usable deduction");
}

#[test]
fn elcs_of_the_cubic() {
    let (reg, p) = poly(ELC);
    let vars: Vec<_> = ["b1", "b2", "b3"].iter().map(|l| reg.lookup(l).unwrap().id).collect();
    let elcs = find_elcs(&p, &vars).unwrap();
    // full assignments of (b1, b2, b3) other than (1, 1, 1)
    assert_eq!(elcs.len(), 7);
    let target = Assignment::from_pairs([(vars[0], 1), (vars[1], 0), (vars[2], 0)]);
    assert!(elcs.contains(&target));
    let r = apply_elc(&p, &reg, &target, &Penalty::Value(int(4)), false).unwrap();
    let expected = reparse(&reg, "b1 b2 + b2 b3 + b3 b4 + 4 b1 - 4 b1 b2 - 4 b1 b3");
    assert_eq!(r.output, expected);
    let ids = p.support_ids();
    assert_eq!(projected_argmin(&p, &ids), projected_argmin(&r.output, &ids));
    assert!(check_conditional(&p, &r.output, &[Evidence::Elc(target)]).unwrap().passed);
}

#[test]
fn elc_cancel_finds_the_expected_choice() {
    let (reg, p) = poly(ELC);
    let (elc, alpha) = elc_cancel(&p, &mono(&reg, &["b1", "b2", "b3"])).unwrap().unwrap();
    let b = ["b1", "b2", "b3"].map(|l| reg.lookup(l).unwrap().id);
    assert_eq!(elc, Assignment::from_pairs([(b[0], 1), (b[1], 0), (b[2], 0)]));
    assert_eq!(alpha, int(4));
}

#[test]
fn elc_edge_cases() {
    let (reg, p) = poly(ELC);
    let b1 = reg.lookup("b1").unwrap().id;
    let not_elc = Assignment::from_pairs([(b1, 1)]);
    assert!(matches!(apply_elc(&p, &reg, &not_elc, &Penalty::Auto, false), Err(Error::ElcUnproven)));
    let r = apply_elc(&p, &reg, &Assignment::from_pairs([(b1, 0)]), &Penalty::Value(int(0)), false).unwrap();
    assert_eq!(r.output, p);
    let ind = elc_indicator(&p, &reg, &Assignment::from_pairs([(b1, 0)])).unwrap();
    assert_eq!(ind, reg.constant(int(1)) - reg.poly(reg.lookup("b1").unwrap()));

    let (reg, p) = poly("b1 + b2 + b3");
    let ids: Vec<_> = p.support_ids();
    let elcs = find_elcs(&p, &ids).unwrap();
    assert_eq!(elcs.len(), 7);
    assert!(elcs.iter().all(|a| a.iter().any(|(_, v)| v == 1)));
    let r = apply_elc(&p, &reg, &elcs[0], &Penalty::Auto, false).unwrap();
    assert_eq!(projected_argmin(&p, &ids), projected_argmin(&r.output, &ids));
}

#[test]
fn elc_auto_preserves_argmin_on_random_instances() {
    for seed in 100..130 {
        let (reg, p) = random_boolean(seed, 5, 3, 8);
        let ids = p.support_ids();
        let Some(elc) = find_elcs(&p, &ids[..ids.len().min(3)]).unwrap().into_iter().next() else { continue };
        let r = apply_elc(&p, &reg, &elc, &Penalty::Auto, false).unwrap();
        assert_eq!(projected_argmin_in(&reg, &p, &ids), projected_argmin_in(&reg, &r.output, &ids), "seed {seed}");
    }
}

#[test]
fn split_reduces_to_three_problems() {
    let (reg, p) = poly(SPLIT);
    let b1 = reg.lookup("b1").unwrap().id;
    assert_eq!(most_connected(&p), Some(b1));
    let (h0, h1) = split(&p, &reg, b1).unwrap();
    assert_eq!(h0, reparse(&reg, "1 + b3 b4 b8"));
    assert_eq!(h1, reparse(&reg, "1 + b2 b5 + b6 b7 b8 + b3 b4 b8 - b3 b4"));

    let verifier = Verifier::default();
    let solver = |q: &Polynomial| verifier.solve(q);
    let outcome = solve_by_splitting(&p, &reg, &SplitOptions::default(), &solver).unwrap();
    assert_eq!(outcome.leaves.len(), 3);
    let b8 = reg.lookup("b8").unwrap().id;
    let paths: Vec<_> = outcome.leaves.iter().map(|l| l.fixed.clone()).collect();
    assert_eq!(paths, vec![vec![(b1, 0)], vec![(b1, 1), (b8, 0)], vec![(b1, 1), (b8, 1)]]);
    assert!(outcome.leaves[1..].iter().all(|l| l.poly.degree() <= 2));
    let (min, _) = enumerate_min(&p).unwrap();
    assert_eq!(outcome.min, min);
    assert_eq!(p.evaluate(&outcome.argmin).unwrap(), min);
}

#[test]
fn split_on_absent_or_non_boolean() {
    let (mut reg, p) = poly("b1 b2 b3");
    let extra = reg.add_original(quadratizer::Domain::Boolean, Some("b9")).unwrap();
    let (h0, h1) = split(&p, &reg, extra.id).unwrap();
    assert_eq!((h0, h1), (p.clone(), p.clone()));
    let z = reg.add_original(quadratizer::Domain::Spin, Some("z1")).unwrap();
    assert!(matches!(split(&p, &reg, z.id), Err(Error::DomainViolation(_))));
}

#[test]
fn split_branches_agree_with_evaluation() {
    for seed in 200..220 {
        let (reg, p) = random_boolean(seed, 5, 4, 8);
        let v = reg.vars().next().unwrap().id;
        let (h0, h1) = split(&p, &reg, v).unwrap();
        for mask in 0..32u32 {
            let a = Assignment::from_pairs(reg.vars().enumerate().map(|(i, w)| (w.id, (mask >> i & 1) as i8)));
            let branch = if a.get(v) == Some(1) { &h1 } else { &h0 };
            assert_eq!(branch.evaluate(&a).unwrap(), p.evaluate(&a).unwrap());
        }
        let verifier = Verifier::default();
        let solver = |q: &Polynomial| verifier.solve(q);
        let outcome = solve_by_splitting(&p, &reg, &SplitOptions::default(), &solver).unwrap();
        assert_eq!(outcome.min, enumerate_min(&p).unwrap().0, "seed {seed}");
    }
}
