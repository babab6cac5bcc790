//! Betti numbers of finite atomic lattices, Scarf complexes and cellular
//! support checks.
//!
//! `b_{i,p}` is the dimension of `H̃_{i−2}` of an interval complex of the
//! open interval `(0̂, p)`, with `b_0 = 1` at `0̂`.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::atoms::AtomSet;
use crate::complexes::{
    crosscut_open_interval, numbered_vertices, order_complex_open_interval, ComplexError, Face, HomologyProfile,
    SimplicialComplex,
};
use crate::coordinatization::{eccv_labeling, realize, CoordinatizationError};
use crate::field::FieldSpec;
use crate::ideals::MonomialIdeal;
use crate::lattice::{ElementRef, FiniteAtomicLattice, LatticeError, LatticeJson};
use crate::ln::{ln_upper_covers, LnError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("crosscut and order complexes disagree at {element:?}: {crosscut} vs {order}")]
    HomotopyMismatch { element: Vec<usize>, crosscut: String, order: String },
    #[error("lattice is not graded of rank {n}: the chain {chain:?} has length {length}")]
    NotGradedRankN { n: usize, length: usize, chain: Vec<Vec<usize>> },
    #[error("inconsistent labels: {0}")]
    LabelInconsistent(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unknown interval complex '{0}' (expected crosscut, order or both)")]
    UnknownVia(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ln(#[from] LnError),
    #[error(transparent)]
    Coordinatization(#[from] CoordinatizationError),
}

impl ResolutionError {
    pub fn code(&self) -> &'static str {
        match self {
            ResolutionError::HomotopyMismatch { .. } => "HomotopyMismatch",
            ResolutionError::NotGradedRankN { .. } => "NotGradedRankN",
            ResolutionError::LabelInconsistent(_) => "LabelInconsistent",
            ResolutionError::NotApplicable(_) => "NotApplicable",
            ResolutionError::UnknownVia(_) => "Usage",
            ResolutionError::Complex(_) => "ComplexError",
            ResolutionError::Lattice(e) => e.code(),
            ResolutionError::Ln(e) => e.code(),
            ResolutionError::Coordinatization(e) => e.code(),
        }
    }
}

/// Which interval complex computes the Betti numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Via {
    #[default]
    Crosscut,
    Order,
    /// Both, failing on any disagreement.
    Both,
}

impl FromStr for Via {
    type Err = ResolutionError;

    fn from_str(s: &str) -> Result<Self, ResolutionError> {
        match s {
            "crosscut" => Ok(Via::Crosscut),
            "order" => Ok(Via::Order),
            "both" => Ok(Via::Both),
            _ => Err(ResolutionError::UnknownVia(s.to_string())),
        }
    }
}

fn atoms_of(s: AtomSet) -> Vec<usize> {
    s.atoms().collect()
}

/// Multigraded Betti numbers of a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub field: FieldSpec,
    pub lattice: FiniteAtomicLattice,
    /// Non-zero `b_{i,p}` for `i ≥ 1`.
    pub entries: BTreeMap<(usize, ElementRef), usize>,
    /// `b_i` summed over `p`, starting with `b_0 = 1`.
    pub totals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiEntryJson {
    pub degree: usize,
    pub element: Vec<usize>,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiTableJson {
    pub field: String,
    pub totals: Vec<usize>,
    pub entries: Vec<BettiEntryJson>,
}

impl BettiTable {
    pub fn get(&self, i: usize, p: ElementRef) -> usize {
        if i == 0 {
            return usize::from(p == self.lattice.bottom());
        }
        self.entries.get(&(i, p)).copied().unwrap_or(0)
    }

    /// Non-zero Betti numbers at `p`, by homological degree.
    pub fn at(&self, p: ElementRef) -> BTreeMap<usize, usize> {
        let mut out: BTreeMap<usize, usize> =
            self.entries.iter().filter(|((_, e), _)| *e == p).map(|(&(i, _), &v)| (i, v)).collect();
        if p == self.lattice.bottom() {
            out.insert(0, 1);
        }
        out
    }

    pub fn to_json(&self) -> BettiTableJson {
        let mut entries: Vec<BettiEntryJson> = self
            .entries
            .iter()
            .map(|(&(i, p), &v)| BettiEntryJson { degree: i, element: atoms_of(self.lattice.set(p)), value: v })
            .collect();
        entries.sort_by(|a, b| {
            (a.degree, a.element.len(), &a.element).cmp(&(b.degree, b.element.len(), &b.element))
        });
        BettiTableJson { field: self.field.to_string(), totals: self.totals.clone(), entries }
    }

    /// Rows are elements with a non-zero Betti number, columns degrees.
    pub fn to_text(&self) -> String {
        let width = self.totals.len();
        let mut rows: Vec<(String, Vec<String>)> = Vec::new();
        let mut header = vec!["".to_string()];
        header.extend((0..width).map(|i| format!("b{i}")));
        let mut elems: Vec<ElementRef> = self.lattice.elements().filter(|&p| !self.at(p).is_empty()).collect();
        elems.sort_by_key(|&p| {
            let s = self.lattice.set(p);
            (s.len(), atoms_of(s))
        });
        for p in elems {
            let at = self.at(p);
            let cells = (0..width).map(|i| at.get(&i).map_or(".".to_string(), |v| v.to_string())).collect();
            rows.push((crate::coordinatization::set_key(self.lattice.set(p)), cells));
        }
        rows.push(("total".to_string(), self.totals.iter().map(|v| v.to_string()).collect()));
        let first = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
        let col = rows.iter().flat_map(|r| r.1.iter().map(|c| c.len())).max().unwrap_or(1).max(2);
        let mut s = format!("field: {}\n", self.field);
        let _ = write!(s, "{:<first$}", header[0]);
        for h in &header[1..] {
            let _ = write!(s, "  {h:>col$}");
        }
        s.push('\n');
        for (name, cells) in rows {
            let _ = write!(s, "{name:<first$}");
            for c in cells {
                let _ = write!(s, "  {c:>col$}");
            }
            s.push('\n');
        }
        s
    }
}

fn interval_homology(
    l: &FiniteAtomicLattice,
    p: ElementRef,
    field: FieldSpec,
    via: Via,
) -> Result<HomologyProfile, ResolutionError> {
    match via {
        Via::Crosscut => Ok(crosscut_open_interval(l, p)?.reduced_homology(field)),
        Via::Order => Ok(order_complex_open_interval(l, p)?.reduced_homology(field)),
        Via::Both => {
            let a = crosscut_open_interval(l, p)?.reduced_homology(field);
            let b = order_complex_open_interval(l, p)?.reduced_homology(field);
            if a != b {
                return Err(ResolutionError::HomotopyMismatch {
                    element: atoms_of(l.set(p)),
                    crosscut: a.to_string(),
                    order: b.to_string(),
                });
            }
            Ok(a)
        }
    }
}

pub fn betti_table(l: &FiniteAtomicLattice, field: FieldSpec, via: Via) -> Result<BettiTable, ResolutionError> {
    let elems: Vec<ElementRef> = l.elements().filter(|&p| p != l.bottom()).collect();
    let profiles: Vec<HomologyProfile> =
        elems.par_iter().map(|&p| interval_homology(l, p, field, via)).collect::<Result<_, _>>()?;
    let mut entries = BTreeMap::new();
    let mut totals = vec![1usize];
    for (&p, h) in elems.iter().zip(&profiles) {
        for (&d, &v) in &h.dims {
            if v == 0 {
                continue;
            }
            let i = (d + 2) as usize;
            entries.insert((i, p), v);
            if totals.len() <= i {
                totals.resize(i + 1, 0);
            }
            totals[i] += v;
        }
    }
    Ok(BettiTable { field, lattice: l.clone(), entries, totals })
}

/// Total Betti numbers `(b_0, b_1, ...)`.
pub fn total_betti(l: &FiniteAtomicLattice, field: FieldSpec) -> Result<Vec<usize>, ResolutionError> {
    Ok(betti_table(l, field, Via::Crosscut)?.totals)
}

/// Atom sets that are the only set joining to their join. Vertex `i − 1`
/// of the result is atom `i`.
pub fn scarf_complex(l: &FiniteAtomicLattice) -> SimplicialComplex {
    let faces: Vec<Face> = l.elements().filter(|&p| l.equiv_unique(p)).map(|p| l.set(p).bits() as Face).collect();
    let x = SimplicialComplex::from_faces(numbered_vertices(l.n()), faces.iter().copied())
        .expect("at most 32 vertices");
    let listed: BTreeSet<Face> = faces.into_iter().collect();
    let closure: BTreeSet<Face> = x.faces().into_iter().collect();
    assert_eq!(listed, closure, "Scarf faces are closed under taking subsets");
    x
}

/// `b_i` equals the number of Scarf faces with `i` vertices, for every `i`.
pub fn is_scarf_resolved(l: &FiniteAtomicLattice, field: FieldSpec) -> Result<bool, ResolutionError> {
    let totals = total_betti(l, field)?;
    Ok(same_vector(&totals, &scarf_complex(l).f_vector()))
}

fn same_vector(a: &[usize], b: &[usize]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| a.get(i).copied().unwrap_or(0) == b.get(i).copied().unwrap_or(0))
}

/// ECCV coordinatization of a lattice graded of rank `n`, which is strongly
/// generic.
pub fn strongly_generic_coordinatization(l: &FiniteAtomicLattice) -> Result<MonomialIdeal, ResolutionError> {
    let n = l.n();
    for chain in l.maximal_chains() {
        let length = chain.len() + 1;
        if length != n {
            let mut sets = vec![Vec::new()];
            sets.extend(chain.iter().map(|&e| atoms_of(l.set(e))));
            sets.push(atoms_of(l.set(l.top())));
            return Err(ResolutionError::NotGradedRankN { n, length, chain: sets });
        }
    }
    let m = realize(&eccv_labeling(l))?;
    assert!(m.is_strongly_generic().holds, "ECCV of a rank-n graded lattice is strongly generic");
    Ok(m)
}

/// Face supports of `X` together with `∅` and the full vertex set, vertex
/// `i − 1` becoming atom `i`.
pub fn augmented_face_lattice(x: &SimplicialComplex) -> Result<FiniteAtomicLattice, ResolutionError> {
    if x.facets().is_empty() {
        return Err(ResolutionError::NotApplicable("the void complex has no face lattice".into()));
    }
    let n = x.vertices().len();
    if n > crate::atoms::MAX_ATOMS {
        return Err(LatticeError::AtomCount(n).into());
    }
    let sets = x.faces().into_iter().map(|f| AtomSet::from_bits(f as u32)).chain([AtomSet::full(n)]);
    Ok(FiniteAtomicLattice::from_family(n, sets)?)
}

/// Why a complex fails to support a resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportFailure {
    /// `X_{≤p}` has homology.
    NotAcyclic { element: Vec<usize>, homology: String },
    /// A face and a facet of it carry the same label.
    SharedLabel { face: Vec<usize>, coface: Vec<usize>, label: Vec<usize> },
}

/// Outcome of [`supports_resolution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellularCertificate {
    pub complex: SimplicialComplex,
    /// Label of every face, in the order of `complex.faces()`.
    pub face_labels: Vec<(Face, ElementRef)>,
    pub supports: bool,
    pub minimal: bool,
    pub failures: Vec<SupportFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceLabelJson {
    pub face: Vec<usize>,
    pub label: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateJson {
    pub supports: bool,
    pub minimal: bool,
    pub faces: Vec<FaceLabelJson>,
    pub failures: Vec<SupportFailure>,
}

impl CellularCertificate {
    pub fn to_json(&self, l: &FiniteAtomicLattice) -> CertificateJson {
        let faces = self
            .face_labels
            .iter()
            .map(|&(f, p)| FaceLabelJson { face: face_vertices(&self.complex, f), label: atoms_of(l.set(p)) })
            .collect();
        CertificateJson { supports: self.supports, minimal: self.minimal, faces, failures: self.failures.clone() }
    }
}

/// 1-based vertex numbers of a face.
fn face_vertices(_x: &SimplicialComplex, f: Face) -> Vec<usize> {
    crate::complexes::bits(f).map(|v| v + 1).collect()
}

/// Checks that `X`, with vertex `v` labeled `vertex_labels[v]` (atom `v + 1`
/// by default) and each face labeled by the join of its vertices, supports a
/// resolution of any coordinatization of `L`.
pub fn supports_resolution(
    l: &FiniteAtomicLattice,
    x: &SimplicialComplex,
    vertex_labels: Option<&[ElementRef]>,
    field: FieldSpec,
) -> Result<CellularCertificate, ResolutionError> {
    let nv = x.vertices().len();
    let labels: Vec<ElementRef> = match vertex_labels {
        Some(v) => {
            if v.len() != nv {
                return Err(ResolutionError::LabelInconsistent(format!(
                    "{} vertex labels for {nv} vertices",
                    v.len()
                )));
            }
            if let Some(bad) = v.iter().find(|e| e.0 >= l.len()) {
                return Err(ResolutionError::LabelInconsistent(format!("element #{} is not in the lattice", bad.0)));
            }
            v.to_vec()
        }
        None => {
            if nv != l.n() {
                return Err(ResolutionError::LabelInconsistent(format!(
                    "complex has {nv} vertices but the lattice has {} atoms",
                    l.n()
                )));
            }
            (1..=nv).map(|i| l.atom(i)).collect()
        }
    };
    let faces = x.faces();
    let face_labels: Vec<(Face, ElementRef)> = faces
        .iter()
        .map(|&f| {
            let s = crate::complexes::bits(f).fold(AtomSet::EMPTY, |acc, v| acc.union(l.set(labels[v])));
            (f, l.join_of_set(s))
        })
        .collect();
    let mut failures = Vec::new();
    for p in l.elements() {
        let below: Vec<Face> =
            face_labels.iter().filter(|&&(f, q)| f != 0 && l.leq(q, p)).map(|&(f, _)| f).collect();
        if below.is_empty() {
            continue;
        }
        let sub = SimplicialComplex::from_faces(x.vertices().to_vec(), below)?;
        let h = sub.reduced_homology(field);
        if !h.is_zero() {
            failures.push(SupportFailure::NotAcyclic { element: atoms_of(l.set(p)), homology: h.to_string() });
        }
    }
    let supports = failures.is_empty();
    let by_face: BTreeMap<Face, ElementRef> = face_labels.iter().copied().collect();
    let mut shared = Vec::new();
    for &(g, lg) in &face_labels {
        for v in crate::complexes::bits(g) {
            let f = g & !(1 << v);
            if by_face[&f] == lg {
                shared.push(SupportFailure::SharedLabel {
                    face: face_vertices(x, f),
                    coface: face_vertices(x, g),
                    label: atoms_of(l.set(lg)),
                });
            }
        }
    }
    let minimal = supports && shared.is_empty();
    failures.extend(shared);
    Ok(CellularCertificate { complex: x.clone(), face_labels, supports, minimal, failures })
}

/// Which statement [`verify_scarf_filter`] tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Lattices above a Scarf-resolved `P` with the same total Betti numbers
    /// are Scarf-resolved with the same Scarf complex.
    Betti,
    /// Covers of the augmented face lattice of an acyclic complex `X`, with
    /// the same total Betti numbers and Betti numbers only at members shared
    /// with it, are minimally resolved on `X`.
    Cover,
}

impl FromStr for FilterMode {
    type Err = ResolutionError;

    fn from_str(s: &str) -> Result<Self, ResolutionError> {
        match s {
            "betti" => Ok(FilterMode::Betti),
            "cover" => Ok(FilterMode::Cover),
            _ => Err(ResolutionError::NotApplicable(format!("unknown mode '{s}' (expected betti or cover)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub lattice: LatticeJson,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub mode: FilterMode,
    pub field: String,
    pub reading: String,
    pub lattice: LatticeJson,
    pub totals: Vec<usize>,
    /// Lattices examined: the filter above `P`, or its upper covers.
    pub examined: usize,
    /// Those with the same total Betti numbers as `P`.
    pub same_totals: usize,
    /// Those whose remaining hypotheses held and whose conclusion was tested.
    pub checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Every lattice `Q ≥ P` in `L(n)`, sorted canonically.
pub fn ln_filter(p: &FiniteAtomicLattice) -> Vec<FiniteAtomicLattice> {
    let mut seen: HashSet<FiniteAtomicLattice> = HashSet::from([p.clone()]);
    let mut queue = VecDeque::from([p.clone()]);
    while let Some(q) = queue.pop_front() {
        for c in ln_upper_covers(&q) {
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    let mut out: Vec<FiniteAtomicLattice> = seen.into_iter().collect();
    out.sort();
    out
}

/// The simplicial complex whose augmented face lattice is `P`: the full
/// simplex for `B_n`, otherwise every member but the top.
pub fn complex_of_face_lattice(p: &FiniteAtomicLattice) -> Result<SimplicialComplex, ResolutionError> {
    let n = p.n();
    let faces: Vec<Face> = if p.len() == 1 << n {
        vec![AtomSet::full(n).bits() as Face]
    } else {
        p.family().iter().filter(|&&s| s != AtomSet::full(n)).map(|s| s.bits() as Face).collect()
    };
    let x = SimplicialComplex::from_faces(numbered_vertices(n), faces.iter().copied())?;
    if x.faces().len() != faces.len() && p.len() != 1 << n {
        return Err(ResolutionError::NotApplicable(
            "the lattice is not the augmented face lattice of a simplicial complex".into(),
        ));
    }
    Ok(x)
}

pub fn verify_scarf_filter(
    p: &FiniteAtomicLattice,
    field: FieldSpec,
    mode: FilterMode,
) -> Result<FilterReport, ResolutionError> {
    if p.n() > 4 {
        return Err(LnError::OutOfSupportedRange(format!("filter scans need n <= 4, got n = {}", p.n())).into());
    }
    let totals = total_betti(p, field)?;
    let reading = match mode {
        FilterMode::Betti => "same total Betti numbers means an equal total Betti vector over the given field",
        FilterMode::Cover => {
            "same total Betti numbers means an equal total Betti vector over the given field; the fiber maxima of \
             the canonical map Q -> P are the members of Q that are also members of P, and Q must have the Betti \
             numbers of P there and none elsewhere"
        }
    };
    let mut report = FilterReport {
        mode,
        field: field.to_string(),
        reading: reading.to_string(),
        lattice: p.to_json(),
        totals: totals.clone(),
        examined: 0,
        same_totals: 0,
        checked: 0,
        counterexamples: Vec::new(),
    };
    match mode {
        FilterMode::Betti => {
            if !is_scarf_resolved(p, field)? {
                return Err(ResolutionError::NotApplicable("the lattice is not resolved by its Scarf complex".into()));
            }
            let scarf_p = scarf_complex(p);
            let filter = ln_filter(p);
            report.examined = filter.len();
            let outcomes: Vec<Option<Option<String>>> = filter
                .par_iter()
                .map(|q| -> Result<_, ResolutionError> {
                    if total_betti(q, field)? != totals {
                        return Ok(None);
                    }
                    let scarf_q = scarf_complex(q);
                    let reason = if scarf_q != scarf_p {
                        Some("Scarf complex differs from that of P".to_string())
                    } else if !is_scarf_resolved(q, field)? {
                        Some("not resolved by its Scarf complex".to_string())
                    } else {
                        None
                    };
                    Ok(Some(reason))
                })
                .collect::<Result<_, _>>()?;
            for (q, o) in filter.iter().zip(outcomes) {
                if let Some(reason) = o {
                    report.same_totals += 1;
                    report.checked += 1;
                    if let Some(reason) = reason {
                        report.counterexamples.push(Counterexample { lattice: q.to_json(), reason });
                    }
                }
            }
        }
        FilterMode::Cover => {
            let x = complex_of_face_lattice(p)?;
            if !x.is_acyclic(field) {
                return Err(ResolutionError::NotApplicable("the complex of the lattice is not acyclic".into()));
            }
            let bp = betti_table(p, field, Via::Crosscut)?;
            let covers = ln_upper_covers(p);
            report.examined = covers.len();
            for q in &covers {
                let bq = betti_table(q, field, Via::Crosscut)?;
                if bq.totals != totals {
                    continue;
                }
                report.same_totals += 1;
                let concentrated = q.elements().all(|e| match p.index_of(q.set(e)) {
                    Some(pe) => bq.at(e) == bp.at(pe),
                    None => bq.at(e).is_empty(),
                });
                if !concentrated {
                    continue;
                }
                report.checked += 1;
                let cert = supports_resolution(q, &x, None, field)?;
                if !(cert.supports && cert.minimal) {
                    let why: Vec<String> = cert.failures.iter().map(|f| format!("{f:?}")).collect();
                    report.counterexamples.push(Counterexample {
                        lattice: q.to_json(),
                        reason: format!("X does not minimally support a resolution: {}", why.join("; ")),
                    });
                }
            }
        }
    }
    Ok(report)
}
