//! Deformations of exponents, and realizing relations `Q ≤ P` in `L(n)` as
//! deformations between coordinatizations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coordinatization::{eccv_labeling, realize, CoordinatizationError, Labeling};
use crate::ideals::{IdealError, IdealJson, Monomial, MonomialIdeal};
use crate::lattice::{ElementRef, FiniteAtomicLattice};
use crate::ln::{canonical_map, ln_leq, LnError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformationError {
    #[error("epsilon is {rows}x{cols} but the base ideal has {gens} generators in {vars} variables")]
    ShapeMismatch { rows: usize, cols: usize, gens: usize, vars: usize },
    #[error("not a deformation: {0}")]
    Invalid(DeformationWitness),
    #[error(transparent)]
    Ln(#[from] LnError),
    #[error(transparent)]
    Coordinatization(#[from] CoordinatizationError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

impl DeformationError {
    pub fn code(&self) -> &'static str {
        match self {
            DeformationError::ShapeMismatch { .. } => "ShapeMismatch",
            DeformationError::Invalid(_) => "InvalidDeformation",
            DeformationError::Ln(e) => e.code(),
            DeformationError::Coordinatization(e) => e.code(),
            DeformationError::Ideal(e) => e.code(),
        }
    }
}

/// First rule broken by a candidate deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DeformationWitness {
    /// `m_is = 0` but `ε_is ≠ 0`.
    ZeroMoved { generator: usize, variable: usize },
    /// `m_is < m_js` but not after adding epsilon.
    OrderBroken { variable: usize, lower: usize, upper: usize },
    /// A deformed exponent is negative.
    Negative { generator: usize, variable: usize },
}

impl std::fmt::Display for DeformationWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            DeformationWitness::ZeroMoved { generator, variable } => {
                write!(f, "generator {generator} has exponent 0 in variable {variable} but a nonzero epsilon")
            }
            DeformationWitness::OrderBroken { variable, lower, upper } => write!(
                f,
                "in variable {variable}, generator {lower} is below generator {upper} but not after deforming"
            ),
            DeformationWitness::Negative { generator, variable } => {
                write!(f, "generator {generator} gets a negative exponent in variable {variable}")
            }
        }
    }
}

/// A base ideal and integer shifts, rows indexed by generator and columns by
/// variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deformation {
    pub base: MonomialIdeal,
    pub epsilon: Vec<Vec<i64>>,
}

/// `{"base": <ideal>, "epsilon": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationJson {
    pub base: IdealJson,
    pub epsilon: Vec<Vec<i64>>,
}

impl Deformation {
    pub fn new(base: MonomialIdeal, epsilon: Vec<Vec<i64>>) -> Result<Self, DeformationError> {
        let d = Deformation { base, epsilon };
        d.check_shape()?;
        Ok(d)
    }

    /// The identity deformation.
    pub fn zero(base: MonomialIdeal) -> Self {
        let epsilon = vec![vec![0; base.num_variables()]; base.num_generators()];
        Deformation { base, epsilon }
    }

    fn check_shape(&self) -> Result<(), DeformationError> {
        let (gens, vars) = (self.base.num_generators(), self.base.num_variables());
        let rows = self.epsilon.len();
        let bad = self.epsilon.iter().find(|r| r.len() != vars).map(|r| r.len());
        if rows != gens || bad.is_some() {
            return Err(DeformationError::ShapeMismatch { rows, cols: bad.unwrap_or(vars), gens, vars });
        }
        Ok(())
    }

    /// Base exponents plus epsilon; `None` if some entry would be negative.
    pub fn deformed_exponents(&self) -> Option<Vec<Vec<u64>>> {
        self.base
            .exponent_matrix()
            .iter()
            .zip(&self.epsilon)
            .map(|(row, eps)| {
                row.iter().zip(eps).map(|(&m, &e)| u64::try_from(m as i128 + e as i128).ok()).collect()
            })
            .collect()
    }

    /// The deformed ideal, with the base's variable names.
    pub fn deformed(&self) -> Result<MonomialIdeal, DeformationError> {
        let v = is_valid_deformation(self)?;
        if let Some(w) = v.witness {
            return Err(DeformationError::Invalid(w));
        }
        let rows = self.deformed_exponents().expect("valid deformations stay non-negative");
        Ok(MonomialIdeal::from_dense(self.base.variables().to_vec(), &rows)?)
    }

    pub fn to_json(&self) -> DeformationJson {
        DeformationJson { base: self.base.to_json(), epsilon: self.epsilon.clone() }
    }

    pub fn from_json(j: &DeformationJson) -> Result<Self, DeformationError> {
        Self::new(MonomialIdeal::from_json(&j.base)?, j.epsilon.clone())
    }
}

/// Verdict of [`is_valid_deformation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeformationVerdict {
    pub valid: bool,
    pub witness: Option<DeformationWitness>,
}

pub fn is_valid_deformation(d: &Deformation) -> Result<DeformationVerdict, DeformationError> {
    d.check_shape()?;
    let m = d.base.exponent_matrix();
    let eps = &d.epsilon;
    let fail = |w| Ok(DeformationVerdict { valid: false, witness: Some(w) });
    for (i, row) in m.iter().enumerate() {
        for (s, &e) in row.iter().enumerate() {
            if e == 0 && eps[i][s] != 0 {
                return fail(DeformationWitness::ZeroMoved { generator: i, variable: s });
            }
            if (e as i128) + (eps[i][s] as i128) < 0 {
                return fail(DeformationWitness::Negative { generator: i, variable: s });
            }
        }
    }
    let vars = d.base.num_variables();
    for s in 0..vars {
        for i in 0..m.len() {
            for j in 0..m.len() {
                if m[i][s] < m[j][s] && m[i][s] as i128 + eps[i][s] as i128 >= m[j][s] as i128 + eps[j][s] as i128 {
                    return fail(DeformationWitness::OrderBroken { variable: s, lower: i, upper: j });
                }
            }
        }
    }
    Ok(DeformationVerdict { valid: true, witness: None })
}

/// How a fiber `f⁻¹(q)` decides which variables label `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiberRule {
    /// The label of the largest fiber element, the member of `P` with the
    /// same support as `q`. Along each chain variable the exponents of the
    /// result count the chain members that lie in `Q`, so they are a
    /// monotone collapse of the exponents over `P`.
    #[default]
    Max,
    /// Variables dividing the label of some fiber element. Each variable then
    /// lives on the image of its chain.
    Any,
    /// Variables dividing the label of every fiber element. Can leave a
    /// meet-irreducible of `Q` unlabeled when its fiber is not a chain.
    All,
}

/// Moves a labeling of `P` to `Q` along `f: P → Q`, giving `q` the squarefree
/// product of the variables selected by `rule` from its fiber. The top of
/// `Q` stays unlabeled.
pub fn pushforward_labeling(
    lab: &Labeling,
    q: &FiniteAtomicLattice,
    f: &[ElementRef],
    rule: FiberRule,
) -> Result<Labeling, CoordinatizationError> {
    let p = lab.lattice();
    let mut fibers: Vec<Vec<ElementRef>> = vec![Vec::new(); q.len()];
    for e in p.elements() {
        fibers[f[e.0].0].push(e);
    }
    let mut labels = Vec::new();
    for (qi, fiber) in fibers.iter().enumerate() {
        if fiber.is_empty() || ElementRef(qi) == q.top() {
            continue;
        }
        let acc = match rule {
            FiberRule::Max => {
                let top = fiber.iter().find(|&&e| p.set(e) == q.set(ElementRef(qi))).expect("Q's members lie in P");
                lab.label(*top).clone()
            }
            FiberRule::Any => fiber[1..].iter().fold(lab.label(fiber[0]).clone(), |a, &e| a.lcm(lab.label(e))),
            FiberRule::All => fiber[1..].iter().fold(lab.label(fiber[0]).clone(), |a, &e| a.gcd(lab.label(e))),
        };
        let squarefree = Monomial::from_pairs(acc.support().map(|v| (v, 1)));
        labels.push((ElementRef(qi), squarefree));
    }
    Labeling::new(q.clone(), lab.variables().to_vec(), labels)
}

/// Output of [`construct_deformation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    /// Coordinatization of `Q`: the pushforward of the ECCV labeling of `P`.
    pub m_q: MonomialIdeal,
    /// The ECCV coordinatization of `P`.
    pub m_p: MonomialIdeal,
    /// Base `m_q`, epsilon `m_p − m_q`.
    pub deformation: Deformation,
    /// Chain-count epsilon `|⌈a_i⌉ᶜ_P ∩ c_j| − |⌈a_i⌉ᶜ_Q ∩ f(c_j)|`.
    pub chain_count_epsilon: Vec<Vec<i64>>,
}

impl Construction {
    pub fn chain_count_matches(&self) -> bool {
        self.chain_count_epsilon == self.deformation.epsilon
    }
}

fn difference(big: &MonomialIdeal, small: &MonomialIdeal) -> Vec<Vec<i64>> {
    big.exponent_matrix()
        .iter()
        .zip(small.exponent_matrix())
        .map(|(a, b)| a.iter().zip(&b).map(|(&x, &y)| x as i64 - y as i64).collect())
        .collect()
}

/// `|⌈a_i⌉ᶜ_P ∩ c_j| − |⌈a_i⌉ᶜ_Q ∩ f(c_j)|` for chains `c_j` of `P`.
fn chain_count_epsilon(
    p: &FiniteAtomicLattice,
    q: &FiniteAtomicLattice,
    chains: &[Vec<ElementRef>],
    f: &[ElementRef],
) -> Vec<Vec<i64>> {
    (1..=p.n())
        .map(|i| {
            let (ap, aq) = (p.atom(i), q.atom(i));
            chains
                .iter()
                .map(|c| {
                    let in_p = c.iter().filter(|&&e| !p.leq(ap, e)).count() as i64;
                    let mut image: Vec<ElementRef> = c.iter().map(|e| f[e.0]).collect();
                    image.dedup();
                    let in_q = image.iter().filter(|&&e| !q.leq(aq, e)).count() as i64;
                    in_p - in_q
                })
                .collect()
        })
        .collect()
}

/// Realizes `Q ≤ P` as a deformation of exponents: `Q` is coordinatized by
/// pushing the ECCV labeling of `P` forward along the canonical map.
pub fn construct_deformation(p: &FiniteAtomicLattice, q: &FiniteAtomicLattice) -> Result<Construction, DeformationError> {
    let c = construct_deformation_with(p, q, FiberRule::Max)?;
    debug_assert!(is_valid_deformation(&c.deformation)?.valid);
    Ok(c)
}

/// [`construct_deformation`] with a chosen fiber rule. Only
/// [`FiberRule::Max`] always yields a valid deformation; the result is not
/// checked here.
pub fn construct_deformation_with(
    p: &FiniteAtomicLattice,
    q: &FiniteAtomicLattice,
    rule: FiberRule,
) -> Result<Construction, DeformationError> {
    let f = canonical_map(p, q)?;
    let eccv = eccv_labeling(p);
    let m_p = realize(&eccv)?;
    let m_q = realize(&pushforward_labeling(&eccv, q, &f, rule)?)?;
    let epsilon = difference(&m_p, &m_q);
    let chain_count_epsilon = chain_count_epsilon(p, q, &p.maximal_chains(), &f);
    let deformation = Deformation::new(m_q.clone(), epsilon)?;
    Ok(Construction { m_q, m_p, deformation, chain_count_epsilon })
}

/// One coordinatization of `Q` from which every lattice above `Q` is reached
/// by a deformation: the pushforward of the ECCV labeling of `B_n`.
#[derive(Debug, Clone)]
pub struct UniversalFamily {
    q: FiniteAtomicLattice,
    boolean_eccv: Labeling,
    m_q: MonomialIdeal,
}

impl UniversalFamily {
    pub fn m_q(&self) -> &MonomialIdeal {
        &self.m_q
    }

    pub fn lattice(&self) -> &FiniteAtomicLattice {
        &self.q
    }

    /// The coordinatization of `P'` from the same labeling of `B_n`.
    pub fn coordinatize(&self, target: &FiniteAtomicLattice) -> Result<MonomialIdeal, DeformationError> {
        let b = self.boolean_eccv.lattice();
        let g = canonical_map(b, target)?;
        Ok(realize(&pushforward_labeling(&self.boolean_eccv, target, &g, FiberRule::Max)?)?)
    }

    /// The deformation of `m_q` whose LCM lattice is `target`.
    pub fn deform_to(&self, target: &FiniteAtomicLattice) -> Result<Deformation, DeformationError> {
        if !ln_leq(&self.q, target)? {
            return Err(LnError::NotComparable.into());
        }
        let m_target = self.coordinatize(target)?;
        Deformation::new(self.m_q.clone(), difference(&m_target, &self.m_q))
    }
}

pub fn universal_family(q: &FiniteAtomicLattice) -> Result<UniversalFamily, DeformationError> {
    let b = FiniteAtomicLattice::boolean(q.n()).map_err(LnError::from)?;
    let boolean_eccv = eccv_labeling(&b);
    let f = canonical_map(&b, q)?;
    let m_q = realize(&pushforward_labeling(&boolean_eccv, q, &f, FiberRule::Max)?)?;
    Ok(UniversalFamily { q: q.clone(), boolean_eccv, m_q })
}
