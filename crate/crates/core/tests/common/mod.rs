#![allow(dead_code)]

use quadratizer::io::parse;
use quadratizer::poly::{Domain, Monomial, Polynomial, Var, VariableRegistry};
use quadratizer::rational::{frac, int, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn poly(text: &str) -> (VariableRegistry, Polynomial) {
    parse(text).expect("test polynomial parses")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients drawn from nonzero integers and halves in [-5, 5].
pub fn coefficient(rng: &mut impl Rng) -> Rational {
    loop {
        let c = if rng.random_bool(0.25) { frac(rng.random_range(-10..=10), 2) } else { int(rng.random_range(-5..=5)) };
        if c != int(0) {
            return c;
        }
    }
}

/// Random polynomial over `vars` with `terms` terms of degree up to `max_degree`.
pub fn random_poly(rng: &mut impl Rng, reg: &VariableRegistry, vars: &[Var], max_degree: usize, terms: usize) -> Polynomial {
    let mut p = reg.zero();
    for _ in 0..terms {
        let d = rng.random_range(0..=max_degree.min(vars.len()));
        let mut pool: Vec<Var> = vars.to_vec();
        let mut chosen = Vec::new();
        for _ in 0..d {
            let i = rng.random_range(0..pool.len());
            chosen.push(pool.swap_remove(i));
        }
        p.add_term(Monomial::from_vars(chosen), coefficient(rng));
    }
    p
}

/// Registry with `n` Boolean variables and a random polynomial over them.
pub fn random_boolean(seed: u64, n: usize, max_degree: usize, terms: usize) -> (VariableRegistry, Polynomial) {
    let mut rng = rng(seed);
    let mut reg = VariableRegistry::new();
    let vars = reg.booleans(n).unwrap();
    let p = random_poly(&mut rng, &reg, &vars, max_degree, terms);
    (reg, p)
}

pub fn monomial_of(vars: &[Var]) -> Monomial {
    Monomial::from_vars(vars.iter().copied())
}

pub fn fresh(domain: Domain, n: usize) -> (VariableRegistry, Vec<Var>) {
    let mut reg = VariableRegistry::new();
    let vars = match domain {
        Domain::Boolean => reg.booleans(n).unwrap(),
        Domain::Spin => reg.spins(n).unwrap(),
        Domain::Ternary => (0..n).map(|i| reg.add_original(Domain::Ternary, Some(&format!("t{}", i + 1))).unwrap()).collect(),
    };
    (reg, vars)
}
