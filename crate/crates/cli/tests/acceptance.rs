//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use quadratizer::gadgets::{self, catalog, experimental_report, ntr_abcg, ntr_kzfd, Status};
use quadratizer::io::json::{from_json, to_json_string};
use quadratizer::io::{parse, parse_into, print};
use quadratizer::multi_term::rosenberg_reduce;
use quadratizer::poly::{Assignment, Var};
use quadratizer::rational::{frac, half, int, Rational};
use quadratizer::structured::{czw_count4_report, sfr_bcr, ternary_to_binary_report, CzwBias, ExactCSpec};
use quadratizer::verify::{check_conditional, check_groundstate, check_pointwise, cost_report, enumerate_min, Evidence, Verifier};
use quadratizer::zero_aux::{apply_deduc_reduc, apply_elc, find_elcs, find_zero_deductions, solve_by_splitting, split, SplitOptions};
use quadratizer::{quadratize, Domain, Guarantee, Monomial, Penalty, Polynomial, Strategy, VarId, VariableRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUBIC: &str = "b1 b2 + b2 b3 + b3 b4 - 4 b1 b2 b3";
const QUADRATIC: &str = "b1 b2 + b2 b3 + b3 b4 + 4 b1 - 4 b1 b2 - 4 b1 b3";
// b1 b2 (4 + b3 + b3 b4) + b1 (b3 - 3) + b2 (1 - 2 b3 - b4), expanded
const DEDUC: &str = "4 b1 b2 + b1 b2 b3 + b1 b2 b3 b4 + b1 b3 - 3 b1 + b2 - 2 b2 b3 - b2 b4";
const SPLIT: &str = "1 + b1 b2 b5 + b1 b6 b7 b8 + b3 b4 b8 - b1 b3 b4";

type Criterion = (u32, &'static str, Duration, fn() -> Result<String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "cubic and quadratic share a minimum", secs(1), shared_minimum),
        (2, "ELC rewrite", secs(1), elc_reproduction),
        (3, "deduc-reduc rewrite", secs(1), deduc_reduc_reproduction),
        (4, "gadget pointwise suite", secs(30), gadget_suite),
        (5, "aux-count ledger", secs(1), aux_ledger),
        (6, "submodularity claims", secs(1), submodularity_claims),
        (7, "SFR indicators", secs(10), sfr_indicators),
        (8, "Rosenberg spectrum preservation", secs(30), rosenberg_spectrum),
        (9, "pipeline end-to-end", secs(120), pipeline_end_to_end),
        (10, "split-reduc", secs(1), split_reproduction),
        (11, "experimental gadget gate", secs(30), experimental_gate),
        (12, "round trips", secs(5), round_trips),
    ];
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed <= budget => Ok(note),
            Ok(_) => Err(format!("over budget: took {elapsed:.2?}, limit {budget:?}")),
            Err(e) => Err(format!("{e:#}")),
        };
        match outcome {
            Ok(note) => println!("PASS criterion {n}: {name} [{elapsed:.2?}] {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {name} [{elapsed:.2?}] {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coefficient(r: &mut impl Rng) -> Rational {
    loop {
        let c = if r.random_bool(0.25) { frac(r.random_range(-10..=10), 2) } else { int(r.random_range(-5..=5)) };
        if c != int(0) {
            return c;
        }
    }
}

fn random_poly(r: &mut impl Rng, reg: &VariableRegistry, vars: &[Var], max_degree: usize, terms: usize) -> Polynomial {
    let mut p = reg.zero();
    for _ in 0..terms {
        let d = r.random_range(0..=max_degree.min(vars.len()));
        let mut pool = vars.to_vec();
        let chosen: Vec<Var> = (0..d).map(|_| pool.swap_remove(r.random_range(0..pool.len()))).collect();
        p.add_term(Monomial::from_vars(chosen), coefficient(r));
    }
    p
}

fn lookup(reg: &VariableRegistry, labels: &[&str]) -> Vec<VarId> {
    labels.iter().map(|l| reg.lookup(l).expect("label exists").id).collect()
}

fn reparse(reg: &VariableRegistry, text: &str) -> Result<Polynomial> {
    Ok(parse_into(text, &mut reg.clone())?)
}

fn projected_argmin(reg: &VariableRegistry, p: &Polynomial, ids: &[VarId]) -> Result<Vec<Assignment>> {
    let vars: Vec<Var> = reg.vars().collect();
    let (_, mut states) = Verifier::default().enumerate_min_over(p, &vars)?;
    states.iter_mut().for_each(|a| *a = a.restrict(ids));
    states.sort();
    states.dedup();
    Ok(states)
}

fn shared_minimum() -> Result<String> {
    for text in [CUBIC, QUADRATIC] {
        let (reg, p) = parse(text)?;
        let (min, argmin) = enumerate_min(&p)?;
        ensure!(min == int(-2), "minimum of `{text}` is {min}");
        let expected: Assignment = lookup(&reg, &["b1", "b2", "b3", "b4"]).into_iter().zip([1, 1, 1, 0]).collect();
        ensure!(argmin == vec![expected], "minimizers of `{text}` differ");
    }
    Ok("min -2 at (1,1,1,0) for both".into())
}

fn elc_reproduction() -> Result<String> {
    let (reg, p) = parse(CUBIC)?;
    let b = lookup(&reg, &["b1", "b2", "b3"]);
    let elc = Assignment::from_pairs([(b[0], 1), (b[1], 0), (b[2], 0)]);
    ensure!(find_elcs(&p, &b)?.contains(&elc), "(1,0,0) is not excludable");
    let r = apply_elc(&p, &reg, &elc, &Penalty::Value(int(4)), false)?;
    let expected = reparse(&reg, QUADRATIC)?;
    ensure!(r.output.canonicalize() == expected, "got {}", print(&r.output, &reg));
    let ids = p.support_ids();
    ensure!(projected_argmin(&reg, &p, &ids)? == projected_argmin(&reg, &r.output, &ids)?, "argmin sets differ");
    ensure!(check_conditional(&p, &r.output, &[Evidence::Elc(elc)])?.passed, "conditional check failed");
    Ok(String::new())
}

fn deduc_reduc_reproduction() -> Result<String> {
    let (reg, p) = parse(DEDUC)?;
    let target = Monomial::from_vars(lookup(&reg, &["b1", "b2"]).into_iter().map(|id| reg.var(id).unwrap()));
    let d = find_zero_deductions(&p, 2)?
        .into_iter()
        .find(|d| d.monomial() == &target)
        .context("b1 b2 = 0 not deduced")?;
    let r = apply_deduc_reduc(&p, &d, &Penalty::Auto, false)?;
    // 6 b1 b2 + b1 (b3 - 3) + b2 (1 - 2 b3 - b4)
    let expected = reparse(&reg, "6 b1 b2 + b1 b3 - 3 b1 + b2 - 2 b2 b3 - b2 b4")?;
    ensure!(r.output == expected, "got {}", print(&r.output, &reg));
    let (m0, a0) = enumerate_min(&p)?;
    let (m1, a1) = enumerate_min(&r.output)?;
    ensure!(m0 == m1 && a0 == a1, "minima differ: {m0} vs {m1}");
    Ok(format!("min {m0}"))
}

fn must_pass_coefficients() -> [Rational; 6] {
    [int(1), int(-1), int(3), int(-3), frac(7, 2), frac(-7, 2)]
}

fn fresh(domain: Domain, k: usize) -> Result<(VariableRegistry, Vec<Var>)> {
    let mut reg = VariableRegistry::new();
    let vars = match domain {
        Domain::Boolean => reg.booleans(k)?,
        Domain::Spin => reg.spins(k)?,
        Domain::Ternary => (0..k).map(|i| reg.add_original(Domain::Ternary, Some(&format!("t{}", i + 1)))).collect::<Result<_, _>>()?,
    };
    Ok((reg, vars))
}

fn gadget_suite() -> Result<String> {
    let verifier = Verifier::default();
    let mut cases = 0;
    for d in catalog().iter().filter(|d| d.status == Status::MustPass) {
        for k in d.degrees(6) {
            for c in must_pass_coefficients() {
                if !d.applies(&c, k, d.domain) {
                    continue;
                }
                let (mut reg, vars) = fresh(d.domain, k)?;
                let r = (d.build)(&c, &Monomial::from_vars(vars), &mut reg)?;
                ensure!(r.output.degree() <= 2, "{} k={k} left degree {}", d.name, r.output.degree());
                let report = r.verify(&verifier)?;
                ensure!(report.passed, "{} k={k} c={c}: {}", d.name, report.summary());
                if r.guarantee == Guarantee::PointwiseMin {
                    ensure!(check_pointwise(&r.target, &r.output, &r.aux)?.passed, "{} k={k}", d.name);
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn log2_ceil(k: usize) -> usize {
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

fn aux_ledger() -> Result<String> {
    for k in 3..=10 {
        let expected = [
            ("ntr_kzfd", 1),
            ("ntr_abcg", 1),
            ("ntr_abcg2", 1),
            ("ptr_bg", k - 2),
            ("ptr_ishikawa", (k - 1) / 2),
            ("ptr_bcr4", log2_ceil(k) - 1),
            ("ptr_bcr3", log2_ceil(k)),
        ];
        for (name, want) in expected {
            let (mut reg, vars) = fresh(Domain::Boolean, k)?;
            let c = if name.starts_with("ntr") { int(-1) } else { int(1) };
            let r = gadgets::apply(name, &c, &Monomial::from_vars(vars), &mut reg)?;
            ensure!(r.aux.len() == want, "{name} k={k}: {} aux, expected {want}", r.aux.len());
        }
        for n in [k] {
            for c in 0..=n {
                for variant in 1..=4u8 {
                    let want = match variant {
                        1 if 2 * c >= n && c >= 1 => log2_ceil(c) + 1,
                        2 if 2 * c <= n && n - c >= 1 => log2_ceil(n - c) + 1,
                        3 if 2 * c >= n && c >= 2 => log2_ceil(c),
                        4 if 2 * c <= n && n - c >= 2 => log2_ceil(n - c),
                        _ => continue,
                    };
                    let spec = ExactCSpec::new(n, c, int(1));
                    let (mut reg, vars) = fresh(Domain::Boolean, n)?;
                    let ids: Vec<VarId> = vars.iter().map(|v| v.id).collect();
                    let r = sfr_bcr(variant, &spec, &ids, &mut reg)?;
                    ensure!(r.aux.len() == want, "sfr_bcr{variant} n={n} c={c}: {} aux, expected {want}", r.aux.len());
                }
            }
        }
    }
    // the remaining single-degree negative gadgets
    for (name, domain) in [("ntr_gbp", Domain::Boolean), ("ntr_rbl", Domain::Spin)] {
        let (mut reg, vars) = fresh(domain, 3)?;
        let r = gadgets::apply(name, &int(-1), &Monomial::from_vars(vars), &mut reg)?;
        ensure!(r.aux.len() == 1, "{name}: {} aux", r.aux.len());
    }
    Ok(String::new())
}

fn submodularity_claims() -> Result<String> {
    for k in 1..=10 {
        for c in [int(-1), int(-3), frac(-7, 2)] {
            let (mut reg, vars) = fresh(Domain::Boolean, k)?;
            let m = Monomial::from_vars(vars);
            let r = ntr_kzfd(&c, &m, &mut reg)?;
            let positive = cost_report(&r.output, &r.aux).non_submodular;
            ensure!(positive == 0, "ntr_kzfd k={k}: {positive} positive quadratic terms");
            if k >= 3 {
                let r = ntr_abcg(&c, &m, &mut reg)?;
                let positive = cost_report(&r.output, &r.aux).non_submodular;
                ensure!(positive == 1, "ntr_abcg k={k}: {positive} positive quadratic terms");
            }
        }
    }
    Ok(String::new())
}

fn sfr_indicators() -> Result<String> {
    let mut cases = 0;
    for variant in 1..=4u8 {
        for n in 1..=6 {
            for c in 0..=n {
                if ExactCSpec::new(n, c, int(1)).aux_count(variant).is_err() {
                    continue;
                }
                for gamma in [int(1), int(3), frac(5, 2)] {
                    let (mut reg, vars) = fresh(Domain::Boolean, n)?;
                    let ids: Vec<VarId> = vars.iter().map(|v| v.id).collect();
                    let r = sfr_bcr(variant, &ExactCSpec::new(n, c, gamma.clone()), &ids, &mut reg)?;
                    let report = check_pointwise(&r.target, &r.output, &r.aux)?;
                    ensure!(report.passed, "sfr_bcr{variant} n={n} c={c} gamma={gamma}: {}", report.summary());
                    for mask in 0..1u32 << n {
                        let x = Assignment::from_pairs(vars.iter().enumerate().map(|(i, v)| (v.id, (mask >> i & 1) as i8)));
                        let want = if mask.count_ones() as usize == c { gamma.clone() } else { int(0) };
                        ensure!(r.target.evaluate(&x)? == want, "sfr_bcr{variant} target is not gamma times the indicator");
                    }
                    cases += 1;
                }
            }
        }
    }
    let (reg0, vars) = fresh(Domain::Boolean, 4)?;
    let ids: Vec<VarId> = vars.iter().map(|v| v.id).collect();
    let spec = ExactCSpec::new(4, 2, int(1));
    let s = vars.iter().fold(reg0.zero(), |acc, &v| acc + reg0.poly(v));
    let one = reg0.constant(int(1));
    for variant in 1..=4u8 {
        let mut reg = reg0.clone();
        let r = sfr_bcr(variant, &spec, &ids, &mut reg)?;
        let a: Vec<Polynomial> = r.aux.iter().map(|&id| reg.poly(reg.var(id).unwrap())).collect();
        let expected = match variant {
            1 => (reg.constant(int(-3)) + &s - &a[0] + a[1].scale(&int(3))).pow(2),
            2 => (reg.constant(int(1)) - &s - &a[0] + a[1].scale(&int(3))).pow(2),
            3 => {
                let y = reg.constant(int(-3)) + &s + a[0].scale(&int(3));
                (&y * &(&y - &one)).scale(&half())
            }
            _ => {
                let y = reg.constant(int(1)) - &s + a[0].scale(&int(3));
                (&y * &(&y - &one)).scale(&half())
            }
        };
        ensure!(r.output == expected, "sfr_bcr{variant} n=4 c=2 differs from its closed form");
    }
    Ok(format!("{cases} cases"))
}

fn rosenberg_spectrum() -> Result<String> {
    let mut total_aux = 0;
    for seed in 0..50 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(3..=8);
        let (mut reg, vars) = fresh(Domain::Boolean, n)?;
        let terms = r.random_range(1..=8);
        let p = random_poly(&mut r, &reg, &vars, 4, terms);
        let out = rosenberg_reduce(&p, &mut reg)?;
        ensure!(out.output.degree() <= 2, "seed {seed}: degree {}", out.output.degree());
        let report = check_pointwise(&p, &out.output, &out.aux)?;
        ensure!(report.passed, "seed {seed}: {}", report.describe(&reg));
        total_aux += out.aux.len();
    }
    Ok(format!("{total_aux} aux over 50 instances"))
}

fn pipeline_end_to_end() -> Result<String> {
    let strategy = Strategy { verify_after: true, ..Strategy::default() };
    let mut pointwise = 0;
    for seed in 0..100 {
        let mut r = rng(5000 + seed);
        let n = r.random_range(3..=10);
        let (mut reg, vars) = fresh(Domain::Boolean, n)?;
        let terms = r.random_range(1..=6);
        let p = random_poly(&mut r, &reg, &vars, 5, terms);
        let out = quadratize(&p, &mut reg, &strategy).with_context(|| format!("seed {seed}: {}", print(&p, &reg)))?;
        ensure!(out.output.degree() <= 2, "seed {seed}: degree {}", out.output.degree());
        let aux = out.aux();
        ensure!(check_groundstate(&p, &out.output, &aux)?.passed, "seed {seed}: ground states differ");
        if out.guarantee == Guarantee::PointwiseMin {
            ensure!(check_pointwise(&p, &out.output, &aux)?.passed, "seed {seed}: pointwise check failed");
            pointwise += 1;
        }
    }
    Ok(format!("{pointwise}/100 pointwise"))
}

fn split_reproduction() -> Result<String> {
    let (reg, p) = parse(SPLIT)?;
    let b1 = reg.lookup("b1").context("b1")?.id;
    let (h0, h1) = split(&p, &reg, b1)?;
    ensure!(h0 == reparse(&reg, "1 + b3 b4 b8")?, "H0 = {}", print(&h0, &reg));
    ensure!(h1 == reparse(&reg, "1 + b2 b5 + b6 b7 b8 + b3 b4 b8 - b3 b4")?, "H1 = {}", print(&h1, &reg));
    let verifier = Verifier::default();
    let solver = |q: &Polynomial| {
        if q.degree() > 2 {
            return Err(quadratizer::Error::NotQuadratic(q.degree()));
        }
        verifier.solve(q)
    };
    let outcome = solve_by_splitting(&p, &reg, &SplitOptions::default(), &solver)?;
    ensure!(outcome.leaves.len() == 3, "{} subproblems", outcome.leaves.len());
    let (min, _) = enumerate_min(&p)?;
    let branch_min = outcome.leaves.iter().map(|l| l.min.clone()).min().context("no leaves")?;
    ensure!(outcome.min == min && branch_min == min, "branch minimum {} vs exhaustive {min}", outcome.min);
    ensure!(p.evaluate(&outcome.argmin)? == min, "returned minimizer does not attain the minimum");
    Ok(format!("3 subproblems, min {min}"))
}

fn experimental_gate() -> Result<String> {
    let single = [
        ("ptr_kz_z", int(1), Domain::Spin, 3),
        ("ptr_rbl_3to2", int(1), Domain::Spin, 3),
        ("ptr_rbl_4to2", int(1), Domain::Spin, 4),
        ("ntr_lhz", int(-1), Domain::Spin, 4),
        ("ptr_bcr1", int(1), Domain::Boolean, 3),
        ("ptr_bcr2", int(1), Domain::Boolean, 4),
    ];
    let mut verdicts = Vec::new();
    let mut failing = Vec::new();
    for (name, c, domain, k) in single {
        let (mut reg, vars) = fresh(domain, k)?;
        let (_, report) = experimental_report(name, &c, &Monomial::from_vars(vars), &mut reg)?;
        if !report.passed {
            ensure!(report.counterexample.is_some(), "{name} failed without a counterexample");
            failing.push(name);
        }
        verdicts.push(format!("{name}={}", if report.passed { "pass" } else { "fail" }));
    }

    let (mut reg, b) = fresh(Domain::Boolean, 4)?;
    let ids: Vec<VarId> = b.iter().map(|v| v.id).collect();
    let (_, report) = czw_count4_report(None, &CzwBias::B4, &ids, &mut reg)?;
    verdicts.push(format!("czw_count4={}", if report.passed { "pass" } else { "fail" }));
    if !report.passed {
        failing.push("czw_count4");
    }

    let (mut reg, t) = fresh(Domain::Ternary, 2)?;
    let p = parse_into("t1 t2 - t1^2 + t2", &mut reg)?;
    let (_, report) = ternary_to_binary_report(&p, &mut reg, t[0].id, &int(1))?;
    verdicts.push(format!("ternary_to_binary={}", if report.passed { "pass" } else { "fail" }));
    if !report.passed {
        failing.push("ternary_to_binary");
    }

    let default = Strategy::default();
    for name in &failing {
        let routed = default.negative_route.iter().chain(&default.positive_route).any(|g| g == name);
        ensure!(!routed, "default strategy routes to failing {name}");
    }
    for seed in 0..20 {
        let mut r = rng(9000 + seed);
        let (mut reg, vars) = fresh(Domain::Boolean, 6)?;
        let p = random_poly(&mut r, &reg, &vars, 5, 6);
        let out = quadratize(&p, &mut reg, &default)?;
        if let Some(bad) = out.gadgets_used.iter().find(|g| failing.contains(&g.as_str())) {
            bail!("default pipeline used failing gadget {bad}");
        }
    }

    let dir = tempfile::tempdir()?;
    let input = dir.path().join("cubic.txt");
    std::fs::write(&input, "b1 b2 b3 + b2 b3 b4\n")?;
    let status = Command::new(env!("CARGO_BIN_EXE_quadratizer"))
        .args(["quadratize", "--in"])
        .arg(&input)
        .args(["--route", "positive=ptr_bcr1", "--allow-experimental"])
        .output()?;
    ensure!(status.status.code() == Some(1), "forced ptr_bcr1 exited with {:?}", status.status.code());
    let stderr = String::from_utf8_lossy(&status.stderr);
    ensure!(stderr.contains("b1="), "no counterexample printed: {stderr}");
    Ok(verdicts.join(" "))
}

fn corpus(count: u64) -> Result<Vec<(VariableRegistry, Polynomial)>> {
    (0..count)
        .map(|seed| {
            let mut r = rng(7000 + seed);
            let mut reg = VariableRegistry::new();
            let mut vars = reg.booleans(r.random_range(1..=4))?;
            vars.extend(reg.spins(r.random_range(0..=2))?);
            if r.random_bool(0.3) {
                vars.push(reg.add_original(Domain::Ternary, Some("t1"))?);
            }
            let terms = r.random_range(0..=7);
            let p = random_poly(&mut r, &reg, &vars, 4, terms);
            Ok((reg, p))
        })
        .collect()
}

fn round_trips() -> Result<String> {
    for (i, (reg, p)) in corpus(100)?.into_iter().enumerate() {
        let (reg1, canonical) = parse(&print(&p, &reg))?;
        let text = print(&canonical, &reg1);
        let (reg2, again) = parse(&text)?;
        ensure!(print(&again, &reg2) == text, "text round trip {i}: {text}");
        let (reg3, from) = from_json(&to_json_string(&canonical, &reg1))?;
        ensure!(print(&from, &reg3) == text, "JSON round trip {i}: {text}");
    }
    for seed in 0..100 {
        let mut r = rng(8000 + seed);
        let (mut reg, vars) = fresh(Domain::Boolean, r.random_range(1..=5))?;
        let terms = r.random_range(0..=7);
        let p = random_poly(&mut r, &reg, &vars, 5, terms);
        let z = p.to_spin(&mut reg)?;
        ensure!(z.to_boolean(&mut reg)? == p, "b->z->b round trip {seed}");
        let (mut sreg, spins) = fresh(Domain::Spin, vars.len())?;
        let q = random_poly(&mut r, &sreg, &spins, 5, terms);
        let b = q.to_boolean(&mut sreg)?;
        ensure!(b.to_spin(&mut sreg)? == q, "z->b->z round trip {seed}");
    }

    let dir = tempfile::tempdir()?;
    let source = dir.path().join("cubic.txt");
    let spin = dir.path().join("spin.txt");
    let back = dir.path().join("back.txt");
    std::fs::write(&source, format!("{CUBIC}\n"))?;
    let bin = env!("CARGO_BIN_EXE_quadratizer");
    for (from, to, target) in [(&source, &spin, "spin"), (&spin, &back, "boolean")] {
        let status = Command::new(bin).args(["convert", "--in"]).arg(from).args(["--to", target, "--out"]).arg(to).status()?;
        ensure!(status.success(), "convert --to {target} failed");
    }
    let canonical = {
        let (reg, p) = parse(CUBIC)?;
        format!("{}\n", print(&p, &reg))
    };
    ensure!(std::fs::read_to_string(&back)? == canonical, "CLI spin round trip changed the text");
    Ok("100 text/JSON, 200 domain, CLI convert".into())
}
