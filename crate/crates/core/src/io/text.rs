//! Human-readable polynomial syntax, e.g. `b1 b2 + b2 b3 - 4 b1 b2 b3`.
//!
//! Coefficients are integers or `p/q` fractions, factors are `b`, `z` or `t`
//! followed by a positive index, optionally raised with `^`. `*` between
//! factors is accepted and ignored. Decimals are rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Assignment, Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
use crate::rational::{format_short, Rational};

/// Display names for every variable of a registry.
///
/// A label of the form `<domain letter><n>` is used as is; other variables get
/// the next free index for their letter, in id order.
pub struct NameTable {
    names: Vec<String>,
}

impl NameTable {
    pub fn new(reg: &VariableRegistry) -> Self {
        let mut used: HashMap<char, BTreeSet<u64>> = HashMap::new();
        let mut names: Vec<Option<String>> = Vec::with_capacity(reg.len());
        for v in reg.vars() {
            let name = reg.label(v.id).and_then(|l| {
                crate::poly::grammatical_index(l, v.domain).map(|n| {
                    used.entry(v.domain.letter()).or_default().insert(n);
                    l.to_string()
                })
            });
            names.push(name);
        }
        let mut next: HashMap<char, u64> =
            used.iter().map(|(&c, s)| (c, s.iter().next_back().copied().unwrap_or(0))).collect();
        let names = reg
            .vars()
            .zip(names)
            .map(|(v, n)| {
                n.unwrap_or_else(|| {
                    let c = v.domain.letter();
                    let k = next.entry(c).or_insert(0);
                    *k += 1;
                    format!("{c}{k}")
                })
            })
            .collect();
        NameTable { names }
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id.index()]
    }
}

/// Canonical text form. The zero polynomial prints as `0`.
pub fn print(p: &Polynomial, reg: &VariableRegistry) -> String {
    let names = NameTable::new(reg);
    print_with(p, &names)
}

pub fn print_with(p: &Polynomial, names: &NameTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = c.abs();
        let mut parts: Vec<String> = Vec::new();
        if !mag.is_one() || m.is_one() {
            parts.push(format_short(&mag));
        }
        for &(v, e) in m.factors() {
            let n = names.name(v.id);
            parts.push(if e == 1 { n.to_string() } else { format!("{n}^{e}") });
        }
        out.push_str(&parts.join(" "));
    }
    out
}

pub fn format_assignment(a: &Assignment, reg: &VariableRegistry) -> String {
    let names = NameTable::new(reg);
    a.iter()
        .map(|(id, v)| {
            let n = if id.index() < reg.len() { names.name(id).to_string() } else { id.to_string() };
            format!("{n}={v}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses into a fresh registry.
pub fn parse(text: &str) -> Result<(VariableRegistry, Polynomial)> {
    let mut reg = VariableRegistry::new();
    let p = parse_into(text, &mut reg)?;
    Ok((reg, p))
}

/// Parses against `reg`, resolving names by label and creating missing variables.
///
/// New variables are created in `(index, letter)` order so that `b1` gets a
/// lower id than `b2` regardless of where they first appear.
pub fn parse_into(text: &str, reg: &mut VariableRegistry) -> Result<Polynomial> {
    let tokens = lex(text)?;
    let terms = Parser { tokens: &tokens, pos: 0, end: end_position(text) }.poly()?;
    let mut wanted: BTreeSet<(u64, char)> = BTreeSet::new();
    for (_, factors) in &terms {
        for f in factors {
            wanted.insert((f.index, f.letter));
        }
    }
    let mut vars: BTreeMap<(u64, char), Var> = BTreeMap::new();
    for (index, letter) in wanted {
        let name = format!("{letter}{index}");
        let domain = Domain::from_letter(letter).expect("lexer checked letter");
        let var = match reg.lookup(&name) {
            Some(v) if v.domain == domain => v,
            Some(v) => {
                return Err(Error::DomainViolation(format!(
                    "`{name}` is registered with domain {:?}",
                    v.domain
                )))
            }
            None => reg.add_original(domain, Some(&name))?,
        };
        vars.insert((index, letter), var);
    }
    let mut p = reg.zero();
    for (c, factors) in terms {
        let m = Monomial::from_factors(factors.iter().map(|f| (vars[&(f.index, f.letter)], f.exp)));
        p.add_term(m, c);
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(char, u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn end_position(text: &str) -> Pos {
    let mut pos = Pos { line: 1, column: 1 };
    for ch in text.chars() {
        if ch == '\n' {
            pos = Pos { line: pos.line + 1, column: 1 };
        } else {
            pos.column += 1;
        }
    }
    pos
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column: col };
        let mut take = 1;
        match ch {
            '\n' => {
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => {}
            '+' => out.push((Tok::Plus, pos)),
            '-' | '\u{2212}' => out.push((Tok::Minus, pos)),
            '*' | '\u{00b7}' => out.push((Tok::Star, pos)),
            '/' => out.push((Tok::Slash, pos)),
            '^' => out.push((Tok::Caret, pos)),
            c if c.is_ascii_digit() => {
                let digits: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                take = digits.len();
                if chars.get(i + take) == Some(&'.') {
                    return Err(syntax(pos, "decimal coefficients are not supported; use p/q"));
                }
                out.push((Tok::Num(digits.parse().expect("digits")), pos));
            }
            c if c.is_alphabetic() => {
                let word: String = chars[i..].iter().take_while(|c| c.is_alphanumeric() || **c == '_').collect();
                take = word.chars().count();
                let letter = c;
                if Domain::from_letter(letter).is_none() {
                    return Err(syntax(pos, format!("unknown variable `{word}`; names start with b, z or t")));
                }
                let rest = &word[letter.len_utf8()..];
                let valid = !rest.is_empty() && !rest.starts_with('0') && rest.bytes().all(|b| b.is_ascii_digit());
                let index = rest.parse::<u64>().ok().filter(|_| valid);
                match index {
                    Some(n) => out.push((Tok::Var(letter, n), pos)),
                    None => return Err(syntax(pos, format!("bad variable name `{word}`"))),
                }
            }
            c => return Err(syntax(pos, format!("unexpected character `{c}`"))),
        }
        i += take;
        col += take;
    }
    Ok(out)
}

struct Factor {
    letter: char,
    index: u64,
    exp: u32,
}

struct Parser<'a> {
    tokens: &'a [(Tok, Pos)],
    pos: usize,
    end: Pos,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> Pos {
        self.tokens.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn poly(&mut self) -> Result<Vec<(Rational, Vec<Factor>)>> {
        let mut terms = Vec::new();
        if self.tokens.is_empty() {
            return Ok(terms);
        }
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let (c, fs) = self.term()?;
            terms.push((if sign < 0 { -c } else { c }, fs));
            match self.peek() {
                None => return Ok(terms),
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                Some(_) => return Err(syntax(self.here(), "expected `+` or `-` between terms")),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Rational, Vec<Factor>)> {
        let start = self.here();
        let mut coeff = Rational::one();
        let mut seen = false;
        if let Some(Tok::Num(n)) = self.peek() {
            let n = n.clone();
            self.pos += 1;
            seen = true;
            coeff = Rational::from_integer(n);
            if let Some(Tok::Slash) = self.peek() {
                self.pos += 1;
                let here = self.here();
                match self.peek() {
                    Some(Tok::Num(d)) if !d.is_zero() => {
                        coeff /= Rational::from_integer(d.clone());
                        self.pos += 1;
                    }
                    Some(Tok::Num(_)) => return Err(syntax(here, "zero denominator")),
                    _ => return Err(syntax(here, "expected a denominator after `/`")),
                }
            }
        }
        let mut factors = Vec::new();
        loop {
            if let Some(Tok::Star) = self.peek() {
                if !seen {
                    return Err(syntax(self.here(), "`*` must follow a coefficient or factor"));
                }
                self.pos += 1;
                if !matches!(self.peek(), Some(Tok::Var(..))) {
                    return Err(syntax(self.here(), "expected a variable after `*`"));
                }
            }
            match self.peek() {
                Some(Tok::Var(letter, index)) => {
                    let (letter, index) = (*letter, *index);
                    self.pos += 1;
                    seen = true;
                    let mut exp = 1u32;
                    if let Some(Tok::Caret) = self.peek() {
                        self.pos += 1;
                        let here = self.here();
                        match self.peek() {
                            Some(Tok::Num(e)) => {
                                exp = u32::try_from(e).map_err(|_| syntax(here, "exponent too large"))?;
                                self.pos += 1;
                            }
                            _ => return Err(syntax(here, "expected an integer exponent after `^`")),
                        }
                    }
                    factors.push(Factor { letter, index, exp });
                }
                Some(Tok::Num(_)) => return Err(syntax(self.here(), "unexpected number inside a term")),
                _ => break,
            }
        }
        if !seen {
            return Err(syntax(start, "expected a term"));
        }
        Ok((coeff, factors))
    }
}
