//! Labelings of lattice elements by monomials and the ideals they realize.
//!
//! A labeling assigns a monomial `m_p` to some elements `p`. Atom `a_i`
//! becomes the generator `∏ m_p` over all `p` not above `a_i`. The labeling
//! is a coordinatization when every meet-irreducible carries a non-unit label
//! and the elements whose labels use a given variable form a chain.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atoms::AtomSet;
use crate::ideals::{indexed_names, IdealError, LabeledLattice, Monomial, MonomialIdeal};
use crate::lattice::{ElementRef, FiniteAtomicLattice, LatticeError, LatticeJson};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinatizationError {
    #[error("labeling is not a coordinatization: {}", describe(.0))]
    InvalidLabeling(Vec<Violation>),
    #[error("scheme '{0}' needs a monomial ideal as input")]
    NeedsIdeal(&'static str),
    #[error("label uses variable index {var} but only {nvars} variables are declared")]
    VariableOutOfRange { var: usize, nvars: usize },
    #[error("labels refer to {0}, which is not an element of the lattice")]
    UnknownElement(String),
    #[error("label for {key} has {got} exponents, expected {expected}")]
    ExponentCount { key: String, got: usize, expected: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

impl CoordinatizationError {
    pub fn code(&self) -> &'static str {
        match self {
            CoordinatizationError::InvalidLabeling(_) => "InvalidLabeling",
            CoordinatizationError::NeedsIdeal(_) => "NeedsIdeal",
            CoordinatizationError::VariableOutOfRange { .. } => "VariableOutOfRange",
            CoordinatizationError::UnknownElement(_) => "UnknownElement",
            CoordinatizationError::ExponentCount { .. } => "ExponentCount",
            CoordinatizationError::Lattice(e) => e.code(),
            CoordinatizationError::Ideal(e) => e.code(),
        }
    }
}

fn describe(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Why a labeling fails to be a coordinatization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A meet-irreducible element has the unit label.
    UnlabeledMeetIrreducible { element: Vec<usize> },
    /// A variable appears on two incomparable elements.
    VariableOffChain { variable: String, first: Vec<usize>, second: Vec<usize> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnlabeledMeetIrreducible { element } => {
                write!(f, "meet-irreducible {element:?} is unlabeled")
            }
            Violation::VariableOffChain { variable, first, second } => {
                write!(f, "variable {variable} labels incomparable elements {first:?} and {second:?}")
            }
        }
    }
}

/// Verdict of [`validate_labeling`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(Vec<Violation>),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Monomial labels on the elements of a lattice. Unlabeled elements carry
/// the unit; the top is always unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    lattice: FiniteAtomicLattice,
    variables: Vec<String>,
    labels: Vec<Monomial>,
}

impl Labeling {
    pub fn new<I>(lattice: FiniteAtomicLattice, variables: Vec<String>, labels: I) -> Result<Self, CoordinatizationError>
    where
        I: IntoIterator<Item = (ElementRef, Monomial)>,
    {
        let mut out = vec![Monomial::unit(); lattice.len()];
        let top = lattice.top();
        for (e, m) in labels {
            if e.0 >= lattice.len() {
                return Err(CoordinatizationError::UnknownElement(format!("element #{}", e.0)));
            }
            if let Some(var) = m.max_var().filter(|&v| v >= variables.len()) {
                return Err(CoordinatizationError::VariableOutOfRange { var, nvars: variables.len() });
            }
            if e != top {
                out[e.0] = m;
            }
        }
        Ok(Labeling { lattice, variables, labels: out })
    }

    pub fn lattice(&self) -> &FiniteAtomicLattice {
        &self.lattice
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn label(&self, e: ElementRef) -> &Monomial {
        &self.labels[e.0]
    }

    /// Non-unit labels in canonical element order.
    pub fn labeled(&self) -> impl Iterator<Item = (ElementRef, &Monomial)> {
        self.labels.iter().enumerate().filter(|(_, m)| !m.is_unit()).map(|(i, m)| (ElementRef(i), m))
    }

    /// Same labels with the variables renamed.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, CoordinatizationError> {
        if names.len() != self.variables.len() {
            return Err(CoordinatizationError::VariableOutOfRange { var: self.variables.len(), nvars: names.len() });
        }
        self.variables = names;
        Ok(self)
    }

    pub fn to_json(&self) -> LabelingJson {
        let labels = self
            .labeled()
            .map(|(e, m)| (set_key(self.lattice.set(e)), m.to_dense(self.variables.len())))
            .collect();
        LabelingJson { lattice: self.lattice.to_json(), vars: self.variables.clone(), labels }
    }

    pub fn from_json(j: &LabelingJson) -> Result<Self, CoordinatizationError> {
        let lattice = FiniteAtomicLattice::from_json(&j.lattice)?;
        let mut labels = Vec::with_capacity(j.labels.len());
        for (key, exps) in &j.labels {
            let atoms: Vec<usize> =
                serde_json::from_str(key).map_err(|_| CoordinatizationError::UnknownElement(key.clone()))?;
            let e = AtomSet::from_atoms(atoms)
                .and_then(|s| lattice.index_of(s))
                .ok_or_else(|| CoordinatizationError::UnknownElement(key.clone()))?;
            if exps.len() != j.vars.len() {
                return Err(CoordinatizationError::ExponentCount {
                    key: key.clone(),
                    got: exps.len(),
                    expected: j.vars.len(),
                });
            }
            labels.push((e, Monomial::from_dense(exps)));
        }
        Labeling::new(lattice, j.vars.clone(), labels)
    }

    /// One line per labeled element, e.g. `[1,2]: x1*x2`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, m) in self.labeled() {
            s.push_str(&set_key(self.lattice.set(e)));
            s.push_str(": ");
            s.push_str(&m.render(&self.variables));
            s.push('\n');
        }
        s
    }
}

/// `[1,2,3]`
pub fn set_key(s: AtomSet) -> String {
    let atoms: Vec<String> = s.atoms().map(|a| a.to_string()).collect();
    format!("[{}]", atoms.join(","))
}

/// `{"lattice": {...}, "vars": [...], "labels": {"[1,2]": [exponents]}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingJson {
    pub lattice: LatticeJson,
    pub vars: Vec<String>,
    pub labels: BTreeMap<String, Vec<u64>>,
}

pub fn validate_labeling(lab: &Labeling) -> Validity {
    let l = &lab.lattice;
    let mut violations = Vec::new();
    for mi in l.meet_irreducibles() {
        if lab.label(mi).is_unit() {
            violations.push(Violation::UnlabeledMeetIrreducible { element: l.set(mi).atoms().collect() });
        }
    }
    let mut carriers: BTreeMap<usize, Vec<ElementRef>> = BTreeMap::new();
    for (e, m) in lab.labeled() {
        for v in m.support() {
            carriers.entry(v).or_default().push(e);
        }
    }
    for (v, elems) in carriers {
        // Canonical order is a linear extension, so a chain is consecutive-comparable.
        if let Some(w) = elems.windows(2).find(|w| !l.leq(w[0], w[1])) {
            violations.push(Violation::VariableOffChain {
                variable: lab.variables[v].clone(),
                first: l.set(w[0]).atoms().collect(),
                second: l.set(w[1]).atoms().collect(),
            });
        }
    }
    if violations.is_empty() {
        Validity::Valid
    } else {
        Validity::Invalid(violations)
    }
}

/// The ideal whose `i`-th generator is the product of the labels of all
/// elements not above atom `i`.
pub fn realize(lab: &Labeling) -> Result<MonomialIdeal, CoordinatizationError> {
    if let Validity::Invalid(v) = validate_labeling(lab) {
        return Err(CoordinatizationError::InvalidLabeling(v));
    }
    let l = &lab.lattice;
    let mut gens = Vec::with_capacity(l.n());
    for i in 1..=l.n() {
        let mut g = Monomial::unit();
        for p in l.filter_complement(l.atom(i)) {
            g = g.checked_mul(lab.label(p))?;
        }
        gens.push(g);
    }
    let ideal = MonomialIdeal::new(lab.variables.clone(), gens)?;
    debug_assert_eq!(ideal.lcm_lattice().lattice.family(), l.family());
    Ok(ideal)
}

/// `realize(deficit_labeling(lcm_lattice(M))) == M`.
pub fn roundtrip_check(m: &MonomialIdeal) -> Result<bool, CoordinatizationError> {
    let ll = m.lcm_lattice();
    let back = realize(&deficit_labeling(&ll))?;
    Ok(&back == m)
}

/// One fresh variable per meet-irreducible, in canonical element order.
pub fn minimal_squarefree_labeling(l: &FiniteAtomicLattice) -> Labeling {
    let mis = l.meet_irreducibles();
    let labels: Vec<(ElementRef, Monomial)> = mis.iter().enumerate().map(|(v, &e)| (e, Monomial::var(v))).collect();
    Labeling::new(l.clone(), indexed_names(mis.len()), labels).expect("labels are in range")
}

/// One variable per maximal chain in lexicographic order; each element
/// strictly between `0̂` and `1̂` is labeled by the variables of the chains
/// through it.
pub fn eccv_labeling(l: &FiniteAtomicLattice) -> Labeling {
    let chains = l.maximal_chains();
    let mut exps: Vec<Vec<(usize, u64)>> = vec![Vec::new(); l.len()];
    for (v, chain) in chains.iter().enumerate() {
        for &p in chain {
            exps[p.0].push((v, 1));
        }
        // On one atom the only chain is 0̂ < 1̂ and 0̂ is meet-irreducible.
        if chain.is_empty() {
            exps[l.bottom().0].push((v, 1));
        }
    }
    let labels = exps.into_iter().enumerate().map(|(i, e)| (ElementRef(i), Monomial::from_pairs(e)));
    Labeling::new(l.clone(), indexed_names(chains.len()), labels).expect("labels are in range")
}

/// `m_p = gcd{ t̄ : t > p } / p̄`, with the top unlabeled.
pub fn deficit_labeling(ll: &LabeledLattice) -> Labeling {
    let l = &ll.lattice;
    let mut labels = Vec::with_capacity(l.len());
    for p in l.elements() {
        if p == l.top() {
            continue;
        }
        let covers = l.covers_of(p);
        let mut g = ll.multidegree(covers[0]).clone();
        for &c in &covers[1..] {
            g = g.gcd(ll.multidegree(c));
        }
        let m = g.quotient(ll.multidegree(p)).expect("multidegrees increase along the order");
        labels.push((p, m));
    }
    Labeling::new(l.clone(), ll.variables.clone(), labels).expect("labels use the ideal's variables")
}

/// What a labeling scheme is applied to.
#[derive(Debug, Clone, Copy)]
pub enum SchemeInput<'a> {
    Lattice(&'a FiniteAtomicLattice),
    Lcm(&'a LabeledLattice),
}

impl<'a> SchemeInput<'a> {
    pub fn lattice(&self) -> &'a FiniteAtomicLattice {
        match self {
            SchemeInput::Lattice(l) => l,
            SchemeInput::Lcm(ll) => &ll.lattice,
        }
    }
}

pub trait LabelingScheme: Named + Send + Sync {
    fn label(&self, input: SchemeInput<'_>) -> Result<Labeling, CoordinatizationError>;
}

pub struct Eccv;

impl Named for Eccv {
    fn name(&self) -> &'static str {
        "eccv"
    }

    fn description(&self) -> &'static str {
        "one variable per maximal chain"
    }
}

impl LabelingScheme for Eccv {
    fn label(&self, input: SchemeInput<'_>) -> Result<Labeling, CoordinatizationError> {
        Ok(eccv_labeling(input.lattice()))
    }
}

pub struct MinSquarefree;

impl Named for MinSquarefree {
    fn name(&self) -> &'static str {
        "min-squarefree"
    }

    fn description(&self) -> &'static str {
        "one variable per meet-irreducible"
    }
}

impl LabelingScheme for MinSquarefree {
    fn label(&self, input: SchemeInput<'_>) -> Result<Labeling, CoordinatizationError> {
        Ok(minimal_squarefree_labeling(input.lattice()))
    }
}

pub struct Deficit;

impl Named for Deficit {
    fn name(&self) -> &'static str {
        "deficit"
    }

    fn description(&self) -> &'static str {
        "labels recovered from the multidegrees of an ideal"
    }
}

impl LabelingScheme for Deficit {
    fn label(&self, input: SchemeInput<'_>) -> Result<Labeling, CoordinatizationError> {
        match input {
            SchemeInput::Lcm(ll) => Ok(deficit_labeling(ll)),
            SchemeInput::Lattice(_) => Err(CoordinatizationError::NeedsIdeal(self.name())),
        }
    }
}

pub fn labeling_schemes() -> Registry<dyn LabelingScheme> {
    let r: Registry<dyn LabelingScheme> = Registry::new("labeling scheme");
    r.with(Box::new(Eccv)).with(Box::new(MinSquarefree)).with(Box::new(Deficit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::letter_names;

    fn set(atoms: &[usize]) -> AtomSet {
        AtomSet::from_atoms(atoms.iter().copied()).unwrap()
    }

    fn lat(n: usize, sets: &[&[usize]]) -> FiniteAtomicLattice {
        FiniteAtomicLattice::from_family(n, sets.iter().map(|s| set(s))).unwrap()
    }

    fn figure() -> FiniteAtomicLattice {
        lat(4, &[&[], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3], &[1, 2, 3, 4]])
    }

    fn ideal(s: &str) -> MonomialIdeal {
        MonomialIdeal::parse_text(s).unwrap()
    }

    #[test]
    fn figure_eccv_reproduces_printed_ideal() {
        let lab = eccv_labeling(&figure()).with_names(letter_names(6)).unwrap();
        assert!(validate_labeling(&lab).is_valid());
        let l = lab.lattice();
        let at = |s: &[usize]| lab.label(l.index_of(set(s)).unwrap()).render(lab.variables());
        assert_eq!(at(&[1, 2, 3]), "a*b*c*d");
        assert_eq!(at(&[3, 4]), "e*f");
        assert_eq!(at(&[4]), "f");
        assert_eq!(at(&[]), "1");
        assert_eq!(realize(&lab).unwrap().to_text(), "b*c^2*d^2*e^2*f^2, a*d*e^2*f^2, a^2*b^2*c*f, a^3*b^3*c^3*d^3*e");
    }

    #[test]
    fn figure_min_squarefree_with_documented_assignment() {
        let l = figure();
        let lab = minimal_squarefree_labeling(&l);
        let labeled: Vec<AtomSet> = lab.labeled().map(|(e, _)| l.set(e)).collect();
        assert_eq!(labeled, vec![set(&[1]), set(&[1, 2]), set(&[2, 3]), set(&[1, 2, 3]), set(&[4]), set(&[3, 4])]);
        // {1}↦e, {12}↦b, {23}↦c, {123}↦a, {4}↦f, {34}↦d
        let names = ["e", "b", "c", "a", "f", "d"].iter().map(|s| s.to_string()).collect();
        let m = realize(&lab.with_names(names).unwrap()).unwrap();
        // Re-reading the text sorts the variables alphabetically.
        assert_eq!(MonomialIdeal::parse_text(&m.to_text()).unwrap(), ideal("c*d*f, d*e*f, b*e*f, a*b*c*e"));
    }

    #[test]
    fn min_squarefree_counts() {
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        let lab = minimal_squarefree_labeling(&b3);
        assert_eq!(lab.variables().len(), 3);
        assert!(lab.labeled().all(|(e, _)| b3.set(e).len() == 2));
        let path = lat(4, &[&[], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3, 4]]);
        assert_eq!(minimal_squarefree_labeling(&path).variables().len(), 5);
        assert!(validate_labeling(&minimal_squarefree_labeling(&path)).is_valid());
    }

    #[test]
    fn eccv_small_cases() {
        let m3 = FiniteAtomicLattice::minimal(3).unwrap();
        let lab = eccv_labeling(&m3);
        assert_eq!(lab.variables().len(), 3);
        assert_eq!(realize(&lab).unwrap().to_text(), "x2*x3, x1*x3, x1*x2");
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        let m = realize(&eccv_labeling(&b3)).unwrap();
        assert_eq!(m.num_variables(), 6);
        assert!(m.is_strongly_generic().holds);
    }

    #[test]
    fn deficit_examples() {
        let ll = ideal("x*y, y*z, x*z").lcm_lattice();
        let lab = deficit_labeling(&ll);
        let l = &ll.lattice;
        let at = |s: &[usize]| lab.label(l.index_of(set(s)).unwrap()).render(lab.variables());
        assert_eq!(at(&[1]), "z");
        assert_eq!(at(&[2]), "x");
        assert_eq!(at(&[3]), "y");
        assert_eq!(at(&[]), "1");
        assert_eq!(at(&[1, 2, 3]), "1");
        assert_eq!(realize(&lab).unwrap(), ideal("x*y, y*z, x*z"));

        let ll = ideal("x, y, z").lcm_lattice();
        let lab = deficit_labeling(&ll);
        let l = &ll.lattice;
        let at = |s: &[usize]| lab.label(l.index_of(set(s)).unwrap()).render(lab.variables());
        assert_eq!(at(&[1, 2]), "z");
        assert_eq!(at(&[1, 3]), "y");
        assert_eq!(at(&[2, 3]), "x");
        assert_eq!(at(&[1]), "1");
        assert!(roundtrip_check(&ideal("x^2*y, x*y^2")).unwrap());
        assert!(roundtrip_check(&ideal("c*d*f, d*e*f, b*e*f, a*b*c*e")).unwrap());
    }

    #[test]
    fn deficit_labels_bottom_with_common_factor() {
        let ll = ideal("x*y*z, x*z^2").lcm_lattice();
        let lab = deficit_labeling(&ll);
        assert_eq!(lab.label(ll.lattice.bottom()).render(lab.variables()), "x*z");
        assert!(roundtrip_check(&ideal("x*y*z, x*z^2")).unwrap());
    }

    #[test]
    fn invalid_labelings_are_explained() {
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        let coatom = |s: &[usize]| b3.index_of(set(s)).unwrap();
        let lab = Labeling::new(
            b3.clone(),
            indexed_names(2),
            vec![(coatom(&[1, 2]), Monomial::var(0)), (coatom(&[1, 3]), Monomial::var(1))],
        )
        .unwrap();
        assert_eq!(
            validate_labeling(&lab),
            Validity::Invalid(vec![Violation::UnlabeledMeetIrreducible { element: vec![2, 3] }])
        );
        let lab = Labeling::new(
            b3.clone(),
            indexed_names(3),
            vec![
                (coatom(&[1, 2]), Monomial::var(0)),
                (coatom(&[1, 3]), Monomial::var(1)),
                (coatom(&[2, 3]), Monomial::var(2)),
                (coatom(&[1]), Monomial::var(2)),
            ],
        )
        .unwrap();
        match validate_labeling(&lab) {
            Validity::Invalid(v) => assert!(matches!(&v[0], Violation::VariableOffChain { variable, .. } if variable == "x3")),
            Validity::Valid => panic!("expected a chain violation"),
        }
        assert!(matches!(realize(&lab), Err(CoordinatizationError::InvalidLabeling(_))));
    }

    #[test]
    fn top_labels_are_dropped() {
        let b2 = FiniteAtomicLattice::boolean(2).unwrap();
        let lab = Labeling::new(
            b2.clone(),
            indexed_names(3),
            vec![(b2.top(), Monomial::var(2)), (b2.atom(1), Monomial::var(0)), (b2.atom(2), Monomial::var(1))],
        )
        .unwrap();
        assert!(lab.label(b2.top()).is_unit());
        assert_eq!(realize(&lab).unwrap().to_text(), "x2, x1");
    }

    #[test]
    fn json_round_trip() {
        let lab = eccv_labeling(&figure());
        let j = serde_json::to_string(&lab.to_json()).unwrap();
        let back: LabelingJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Labeling::from_json(&back).unwrap(), lab);
        assert!(j.contains(r#""[3,4]":[0,0,0,0,1,1]"#));
    }

    #[test]
    fn registry_dispatch() {
        let r = labeling_schemes();
        assert_eq!(r.names(), vec!["eccv", "min-squarefree", "deficit"]);
        let f = figure();
        assert_eq!(r.get("eccv").unwrap().label(SchemeInput::Lattice(&f)).unwrap(), eccv_labeling(&f));
        assert!(matches!(
            r.get("deficit").unwrap().label(SchemeInput::Lattice(&f)),
            Err(CoordinatizationError::NeedsIdeal("deficit"))
        ));
        assert!(r.get("greedy").is_err());
    }
}
