//! Monomials, monomial ideals, LCM lattices and genericity.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atoms::{AtomSet, MAX_ATOMS};
use crate::lattice::{ElementRef, FiniteAtomicLattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("ideal has no generators")]
    NoGenerators,
    #[error("{0} generators exceed the supported maximum of {MAX_ATOMS}")]
    TooManyGenerators(usize),
    #[error("generator {0} is the unit monomial")]
    UnitGenerator(usize),
    #[error("generators {0} and {1} are equal")]
    DuplicateGenerator(usize, usize),
    #[error("generator {divisor} divides generator {multiple}; the generating set is not minimal")]
    NotMinimal { divisor: usize, multiple: usize },
    #[error("generator {generator} uses variable index {var} but only {nvars} variables are declared")]
    VariableOutOfRange { generator: usize, var: usize, nvars: usize },
    #[error("variable name '{0}' is declared twice")]
    DuplicateVariable(String),
    #[error("exponent overflow")]
    Overflow,
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

impl IdealError {
    pub fn code(&self) -> &'static str {
        match self {
            IdealError::NoGenerators => "NoGenerators",
            IdealError::TooManyGenerators(_) => "TooManyGenerators",
            IdealError::UnitGenerator(_) => "UnitGenerator",
            IdealError::DuplicateGenerator(..) => "DuplicateGenerator",
            IdealError::NotMinimal { .. } => "NotMinimal",
            IdealError::VariableOutOfRange { .. } => "VariableOutOfRange",
            IdealError::DuplicateVariable(_) => "DuplicateVariable",
            IdealError::Overflow => "Overflow",
            IdealError::Parse { .. } => "ParseError",
        }
    }
}

/// A monomial as a sparse map from variable index to positive exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: BTreeMap<usize, u64>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    /// `x_var^exp`.
    pub fn power(var: usize, exp: u64) -> Self {
        let mut m = Monomial::unit();
        if exp > 0 {
            m.exps.insert(var, exp);
        }
        m
    }

    pub fn var(var: usize) -> Self {
        Monomial::power(var, 1)
    }

    pub fn from_dense(exponents: &[u64]) -> Self {
        Monomial { exps: exponents.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect() }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, u64)>>(pairs: I) -> Self {
        let mut m = Monomial::unit();
        for (v, e) in pairs {
            if e > 0 {
                *m.exps.entry(v).or_insert(0) += e;
            }
        }
        m
    }

    pub fn to_dense(&self, nvars: usize) -> Vec<u64> {
        let mut out = vec![0; nvars];
        for (&v, &e) in &self.exps {
            if v < nvars {
                out[v] = e;
            }
        }
        out
    }

    pub fn exponent(&self, var: usize) -> u64 {
        self.exps.get(&var).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    /// Variables with positive exponent, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.keys().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.exps.keys().next_back().copied()
    }

    pub fn degree(&self) -> u64 {
        self.exps.values().sum()
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let slot = exps.entry(v).or_insert(0);
            *slot = (*slot).max(e);
        }
        Monomial { exps }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .filter_map(|(&v, &e)| other.exps.get(&v).map(|&f| (v, e.min(f))))
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|(&v, &e)| other.exponent(v) >= e)
    }

    /// `self` divides `other`, and in every variable of `other` the exponent
    /// of `self` is strictly smaller.
    pub fn strictly_divides(&self, other: &Monomial) -> bool {
        self.divides(other) && other.exps.iter().all(|(&v, &e)| self.exponent(v) < e)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, IdealError> {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let slot = exps.entry(v).or_insert(0);
            *slot = slot.checked_add(e).ok_or(IdealError::Overflow)?;
        }
        Ok(Monomial { exps })
    }

    /// `self / other`, when `other` divides `self`.
    pub fn quotient(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self
                .exps
                .iter()
                .filter_map(|(&v, &e)| {
                    let q = e - other.exponent(v);
                    (q > 0).then_some((v, q))
                })
                .collect(),
        })
    }

    /// Renders with `*` and `^`, e.g. `a*b^2`; the unit is `1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::with_capacity(self.exps.len());
        for (&v, &e) in &self.exps {
            let name = names.get(v).cloned().unwrap_or_else(|| format!("x{}", v + 1));
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

/// Result of [`monomial_ops`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOps {
    pub lcm: Monomial,
    pub gcd: Monomial,
    pub divides: bool,
    pub strictly_divides: bool,
}

pub fn monomial_ops(a: &Monomial, b: &Monomial) -> MonomialOps {
    MonomialOps { lcm: a.lcm(b), gcd: a.gcd(b), divides: a.divides(b), strictly_divides: a.strictly_divides(b) }
}

/// Names `x1, x2, ...`.
pub fn indexed_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

/// Names `a, b, ...`; falls back to [`indexed_names`] past 26 variables.
pub fn letter_names(k: usize) -> Vec<String> {
    if k > 26 {
        return indexed_names(k);
    }
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A monomial ideal given by its minimal generators, in input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    variables: Vec<String>,
    generators: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn new(variables: Vec<String>, generators: Vec<Monomial>) -> Result<Self, IdealError> {
        if generators.is_empty() {
            return Err(IdealError::NoGenerators);
        }
        if generators.len() > MAX_ATOMS {
            return Err(IdealError::TooManyGenerators(generators.len()));
        }
        let mut names = std::collections::HashSet::new();
        for v in &variables {
            if !names.insert(v) {
                return Err(IdealError::DuplicateVariable(v.clone()));
            }
        }
        for (i, g) in generators.iter().enumerate() {
            if g.is_unit() {
                return Err(IdealError::UnitGenerator(i));
            }
            if let Some(var) = g.max_var().filter(|&v| v >= variables.len()) {
                return Err(IdealError::VariableOutOfRange { generator: i, var, nvars: variables.len() });
            }
        }
        for i in 0..generators.len() {
            for j in 0..generators.len() {
                if i == j {
                    continue;
                }
                if generators[i] == generators[j] {
                    return Err(IdealError::DuplicateGenerator(i.min(j), i.max(j)));
                }
                if generators[i].divides(&generators[j]) {
                    return Err(IdealError::NotMinimal { divisor: i, multiple: j });
                }
            }
        }
        Ok(MonomialIdeal { variables, generators })
    }

    /// Builds an ideal from dense exponent rows.
    pub fn from_dense(variables: Vec<String>, rows: &[Vec<u64>]) -> Result<Self, IdealError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != variables.len() {
                return Err(IdealError::VariableOutOfRange { generator: i, var: r.len(), nvars: variables.len() });
            }
        }
        Self::new(variables, rows.iter().map(|r| Monomial::from_dense(r)).collect())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Exponent of variable `var` in generator `gen`.
    pub fn exponent(&self, gen: usize, var: usize) -> u64 {
        self.generators[gen].exponent(var)
    }

    pub fn exponent_matrix(&self) -> Vec<Vec<u64>> {
        self.generators.iter().map(|g| g.to_dense(self.variables.len())).collect()
    }

    /// Same generators under different variable names.
    pub fn with_names(&self, names: Vec<String>) -> Result<Self, IdealError> {
        Self::new(names, self.generators.clone())
    }

    /// LCM lattice of the generators; atom `i` is generator `i`.
    pub fn lcm_lattice(&self) -> LabeledLattice {
        let gens = &self.generators;
        let support_of = |m: &Monomial| {
            AtomSet::from_atoms(gens.iter().enumerate().filter(|(_, g)| g.divides(m)).map(|(i, _)| i + 1))
                .expect("at most 32 generators")
        };
        let mut found: HashMap<AtomSet, Monomial> = HashMap::new();
        found.insert(AtomSet::EMPTY, Monomial::unit());
        let mut queue = VecDeque::new();
        for (i, g) in gens.iter().enumerate() {
            let s = AtomSet::singleton(i + 1);
            debug_assert_eq!(support_of(g), s);
            found.insert(s, g.clone());
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            let m = found[&s].clone();
            for (i, g) in gens.iter().enumerate() {
                if s.contains(i + 1) {
                    continue;
                }
                let l = m.lcm(g);
                let t = support_of(&l);
                if let std::collections::hash_map::Entry::Vacant(slot) = found.entry(t) {
                    slot.insert(l);
                    queue.push_back(t);
                }
            }
        }
        let mut pairs: Vec<(AtomSet, Monomial)> = found.into_iter().collect();
        pairs.sort_unstable_by_key(|(s, _)| *s);
        let lattice = FiniteAtomicLattice::from_family(gens.len(), pairs.iter().map(|(s, _)| *s))
            .expect("LCM supports form an atomic lattice");
        LabeledLattice {
            lattice,
            variables: self.variables.clone(),
            multidegrees: pairs.into_iter().map(|(_, m)| m).collect(),
        }
    }

    /// No variable appears with the same positive exponent in two generators.
    pub fn is_strongly_generic(&self) -> Genericity {
        for v in 0..self.variables.len() {
            for i in 0..self.generators.len() {
                let e = self.exponent(i, v);
                if e == 0 {
                    continue;
                }
                for j in i + 1..self.generators.len() {
                    if self.exponent(j, v) == e {
                        return Genericity::fails(v, i, j);
                    }
                }
            }
        }
        Genericity::holds()
    }

    /// Whenever two generators share a positive exponent in some variable, a
    /// third generator strictly divides their lcm.
    pub fn is_generic(&self) -> Genericity {
        let t = self.generators.len();
        for v in 0..self.variables.len() {
            for i in 0..t {
                let e = self.exponent(i, v);
                if e == 0 {
                    continue;
                }
                for j in i + 1..t {
                    if self.exponent(j, v) != e {
                        continue;
                    }
                    let l = self.generators[i].lcm(&self.generators[j]);
                    let rescued = (0..t).any(|k| k != i && k != j && self.generators[k].strictly_divides(&l));
                    if !rescued {
                        return Genericity::fails(v, i, j);
                    }
                }
            }
        }
        Genericity::holds()
    }

    /// `c*d*f, d*e*f, ...`
    pub fn to_text(&self) -> String {
        self.generators.iter().map(|g| g.render(&self.variables)).collect::<Vec<_>>().join(", ")
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson { vars: self.variables.clone(), gens: self.exponent_matrix() }
    }

    pub fn from_json(j: &IdealJson) -> Result<Self, IdealError> {
        Self::from_dense(j.vars.clone(), &j.gens)
    }

    /// Parses the text format. Variables are ordered naturally by name
    /// (`a < b`, `x2 < x10`).
    pub fn parse_text(src: &str) -> Result<Self, IdealError> {
        let raw = parse_products(src)?;
        let mut names: Vec<String> = raw.iter().flat_map(|g| g.iter().map(|(n, _)| n.clone())).collect();
        names.sort_by_key(|a| natural_key(a));
        names.dedup();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let gens = raw
            .iter()
            .map(|g| Monomial::from_pairs(g.iter().map(|(n, e)| (index[n.as_str()], *e))))
            .collect();
        Self::new(names, gens)
    }

    /// Parses either the JSON or the text format.
    pub fn parse(src: &str) -> Result<Self, IdealError> {
        if src.trim_start().starts_with('{') {
            let j: IdealJson = serde_json::from_str(src)
                .map_err(|e| IdealError::Parse { column: e.column(), message: e.to_string() })?;
            Self::from_json(&j)
        } else {
            Self::parse_text(src)
        }
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `{"vars": [...], "gens": [[exponents], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJson {
    pub vars: Vec<String>,
    pub gens: Vec<Vec<u64>>,
}

/// Verdict of a genericity test, with the first offending pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Genericity {
    pub holds: bool,
    pub witness: Option<GenericityWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenericityWitness {
    pub variable: usize,
    pub first: usize,
    pub second: usize,
}

impl Genericity {
    fn holds() -> Self {
        Genericity { holds: true, witness: None }
    }

    fn fails(variable: usize, first: usize, second: usize) -> Self {
        Genericity { holds: false, witness: Some(GenericityWitness { variable, first, second }) }
    }
}

/// An LCM lattice together with the multidegree of every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledLattice {
    pub lattice: FiniteAtomicLattice,
    pub variables: Vec<String>,
    /// Indexed by element.
    pub multidegrees: Vec<Monomial>,
}

impl LabeledLattice {
    pub fn multidegree(&self, e: ElementRef) -> &Monomial {
        &self.multidegrees[e.0]
    }
}

fn natural_key(s: &str) -> (String, u64, String) {
    let digits = s.chars().rev().take_while(|c| c.is_ascii_digit()).count();
    let (head, tail) = s.split_at(s.len() - digits);
    (head.to_string(), tail.parse().unwrap_or(0), s.to_string())
}

type RawProduct = Vec<(String, u64)>;

fn parse_products(src: &str) -> Result<Vec<RawProduct>, IdealError> {
    let chars: Vec<char> = src.chars().collect();
    let mut pos = 0usize;
    let err = |pos: usize, msg: &str| IdealError::Parse { column: pos + 1, message: msg.to_string() };
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let mut out = Vec::new();
    skip_ws(&mut pos);
    if pos == chars.len() {
        return Err(err(pos, "empty input"));
    }
    loop {
        let mut product = Vec::new();
        loop {
            skip_ws(&mut pos);
            let start = pos;
            if pos < chars.len() && (chars[pos].is_ascii_alphabetic() || chars[pos] == '_') {
                while pos < chars.len() && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_') {
                    pos += 1;
                }
            } else {
                return Err(err(pos, "expected a variable name"));
            }
            let name: String = chars[start..pos].iter().collect();
            skip_ws(&mut pos);
            let mut exp = 1u64;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                skip_ws(&mut pos);
                let ds = pos;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                if ds == pos {
                    return Err(err(pos, "expected an exponent after '^'"));
                }
                let digits: String = chars[ds..pos].iter().collect();
                exp = digits.parse().map_err(|_| err(ds, "exponent too large"))?;
                skip_ws(&mut pos);
            }
            product.push((name, exp));
            if pos < chars.len() && chars[pos] == '*' {
                pos += 1;
                continue;
            }
            break;
        }
        out.push(product);
        if pos == chars.len() {
            break;
        }
        if chars[pos] == ',' {
            pos += 1;
            continue;
        }
        return Err(err(pos, &format!("unexpected character '{}'", chars[pos])));
    }
    Ok(out)
}
