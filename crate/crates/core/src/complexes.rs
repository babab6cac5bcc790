//! Simplicial complexes, interval complexes of a lattice, and reduced
//! homology over an exact field.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldSpec;
use crate::lattice::{ElementRef, FiniteAtomicLattice};
use crate::registry::{Named, Registry};

/// Faces are bit masks over vertex positions.
pub type Face = u64;

/// Largest vertex count a [`SimplicialComplex`] supports.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("complex has {0} vertices; at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("face refers to unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex identifier {0}")]
    DuplicateVertex(String),
}

/// Opaque vertex identifier: integers and strings are both accepted in JSON.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexId {
    Int(i64),
    Text(String),
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Int(i) => write!(f, "{i}"),
            VertexId::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    /// No faces at all.
    Void,
    /// Only the empty face.
    Empty,
    NonEmpty,
}

/// A finite simplicial complex stored by its facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<VertexId>,
    /// Maximal faces, sorted ascending. `[]` is the void complex and `[0]`
    /// the empty complex.
    facets: Vec<Face>,
}

impl SimplicialComplex {
    pub fn void(vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        Self::from_faces(vertices, std::iter::empty())
    }

    /// The complex generated by `faces` (which need not be maximal or closed).
    pub fn from_faces<I: IntoIterator<Item = Face>>(vertices: Vec<VertexId>, faces: I) -> Result<Self, ComplexError> {
        if vertices.len() > MAX_VERTICES {
            return Err(ComplexError::TooManyVertices(vertices.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(ComplexError::DuplicateVertex(v.to_string()));
            }
        }
        let limit = if vertices.len() == 64 { u64::MAX } else { (1u64 << vertices.len()) - 1 };
        let mut faces: Vec<Face> = faces.into_iter().collect();
        if let Some(&bad) = faces.iter().find(|&&f| f & !limit != 0) {
            return Err(ComplexError::UnknownVertex(format!("#{}", 63 - bad.leading_zeros())));
        }
        // Largest first so maximality only needs to look at kept facets.
        faces.sort_unstable_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
        faces.dedup();
        let mut facets: Vec<Face> = Vec::new();
        for f in faces {
            if !facets.iter().any(|&g| f & !g == 0) {
                facets.push(f);
            }
        }
        facets.sort_unstable();
        Ok(SimplicialComplex { vertices, facets })
    }

    /// Builds a complex from facets named by vertex identifiers.
    pub fn from_named_facets(vertices: Vec<VertexId>, facets: &[Vec<VertexId>]) -> Result<Self, ComplexError> {
        let index: HashMap<&VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut masks = Vec::with_capacity(facets.len());
        for facet in facets {
            let mut m = 0u64;
            for v in facet {
                let &i = index.get(v).ok_or_else(|| ComplexError::UnknownVertex(v.to_string()))?;
                m |= 1 << i;
            }
            masks.push(m);
        }
        Self::from_faces(vertices.clone(), masks)
    }

    /// The full simplex on `k` vertices labelled `1..=k`.
    pub fn simplex(k: usize) -> Result<Self, ComplexError> {
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Self::from_faces(numbered_vertices(k), [full])
    }

    /// Boundary of the simplex on `k` vertices.
    pub fn simplex_boundary(k: usize) -> Result<Self, ComplexError> {
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Self::from_faces(numbered_vertices(k), (0..k).map(|i| full & !(1 << i)))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn kind(&self) -> ComplexKind {
        match self.facets.as_slice() {
            [] => ComplexKind::Void,
            [0] => ComplexKind::Empty,
            _ => ComplexKind::NonEmpty,
        }
    }

    pub fn contains(&self, face: Face) -> bool {
        self.facets.iter().any(|&g| face & !g == 0)
    }

    /// Dimension of the largest face; `None` for the void complex.
    pub fn dimension(&self) -> Option<isize> {
        self.facets.iter().map(|f| f.count_ones() as isize - 1).max()
    }

    /// Every face, ordered by dimension and then by bit pattern.
    pub fn faces(&self) -> Vec<Face> {
        let mut all = std::collections::BTreeSet::new();
        for &f in &self.facets {
            let mut s = f;
            loop {
                all.insert(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & f;
            }
        }
        let mut v: Vec<Face> = all.into_iter().collect();
        v.sort_unstable_by_key(|&f| (f.count_ones(), f));
        v
    }

    /// Faces grouped by dimension (the empty face has dimension −1).
    pub fn faces_by_dim(&self) -> BTreeMap<isize, Vec<Face>> {
        let mut out: BTreeMap<isize, Vec<Face>> = BTreeMap::new();
        for f in self.faces() {
            out.entry(f.count_ones() as isize - 1).or_default().push(f);
        }
        out
    }

    /// Face counts from dimension −1 upward.
    pub fn f_vector(&self) -> Vec<usize> {
        let by_dim = self.faces_by_dim();
        match self.dimension() {
            None => Vec::new(),
            Some(d) => (-1..=d).map(|k| by_dim.get(&k).map_or(0, Vec::len)).collect(),
        }
    }

    /// Vertex identifiers of a face.
    pub fn face_vertices(&self, face: Face) -> Vec<VertexId> {
        bits(face).map(|i| self.vertices[i].clone()).collect()
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            vertices: self.vertices.clone(),
            facets: self.facets.iter().map(|&f| self.face_vertices(f)).collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self, ComplexError> {
        Self::from_named_facets(j.vertices.clone(), &j.facets)
    }

    /// Reduced simplicial homology over `field`.
    ///
    /// The empty complex has `H̃_{-1} = 1`; the void complex has no homology
    /// at all.
    pub fn reduced_homology(&self, field: FieldSpec) -> HomologyProfile {
        let by_dim = self.faces_by_dim();
        let Some(top) = self.dimension() else {
            return HomologyProfile::default();
        };
        let index: HashMap<Face, usize> = by_dim
            .values()
            .flat_map(|faces| faces.iter().enumerate().map(|(i, &f)| (f, i)))
            .collect();
        // rank of the boundary map out of dimension d, for d in -1..=top+1
        let mut ranks: BTreeMap<isize, usize> = BTreeMap::new();
        for d in 0..=top {
            let rows: Vec<Vec<(usize, i64)>> = by_dim
                .get(&d)
                .map(|faces| {
                    faces
                        .iter()
                        .map(|&f| {
                            bits(f)
                                .enumerate()
                                .map(|(k, v)| {
                                    let sign = if k % 2 == 0 { 1 } else { -1 };
                                    (index[&(f & !(1u64 << v))], sign)
                                })
                                .collect()
                        })
                        .collect()
                })
                .unwrap_or_default();
            ranks.insert(d, field.rank(&rows));
        }
        let mut dims = BTreeMap::new();
        for d in -1..=top {
            let count = by_dim.get(&d).map_or(0, Vec::len);
            let out_rank = ranks.get(&d).copied().unwrap_or(0);
            let in_rank = ranks.get(&(d + 1)).copied().unwrap_or(0);
            let h = count - out_rank - in_rank;
            if h > 0 {
                dims.insert(d as i32, h);
            }
        }
        HomologyProfile { dims }
    }

    /// Zero reduced homology in every degree. The empty complex is not
    /// acyclic; the void complex is.
    pub fn is_acyclic(&self, field: FieldSpec) -> bool {
        self.reduced_homology(field).is_zero()
    }
}

/// Bit positions of a face, ascending.
pub fn bits(face: Face) -> impl Iterator<Item = usize> {
    let mut f = face;
    std::iter::from_fn(move || {
        if f == 0 {
            None
        } else {
            let i = f.trailing_zeros() as usize;
            f &= f - 1;
            Some(i)
        }
    })
}

/// Vertex identifiers `1..=k`.
pub fn numbered_vertices(k: usize) -> Vec<VertexId> {
    (1..=k as i64).map(VertexId::Int).collect()
}

/// `{"vertices": [...], "facets": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub vertices: Vec<VertexId>,
    pub facets: Vec<Vec<VertexId>>,
}

/// Dimensions of reduced homology by degree; missing degrees are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub dims: BTreeMap<i32, usize>,
}

impl HomologyProfile {
    pub fn get(&self, degree: i32) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// `Σ (−1)^i dim H̃_i`.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().map(|(&d, &v)| if d.rem_euclid(2) == 0 { v as i64 } else { -(v as i64) }).sum()
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (d, v)) in self.dims.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// A way of turning the open interval `(0̂, p)` into a simplicial complex
/// whose reduced homology computes the Betti numbers at `p`.
pub trait IntervalComplex: Named + Send + Sync {
    fn build(&self, lattice: &FiniteAtomicLattice, p: ElementRef) -> Result<SimplicialComplex, ComplexError>;
}

/// Cross-cut complex on the atoms below `p`: a set of atoms is a face when
/// its join lies strictly below `p`.
pub struct CrossCut;

impl Named for CrossCut {
    fn name(&self) -> &'static str {
        "crosscut"
    }

    fn description(&self) -> &'static str {
        "atoms below p; faces are atom sets joining strictly below p"
    }
}

impl IntervalComplex for CrossCut {
    fn build(&self, lattice: &FiniteAtomicLattice, p: ElementRef) -> Result<SimplicialComplex, ComplexError> {
        crosscut_open_interval(lattice, p)
    }
}

/// Order complex of the open interval: chains of elements strictly between
/// `0̂` and `p`.
pub struct OrderComplex;

impl Named for OrderComplex {
    fn name(&self) -> &'static str {
        "order"
    }

    fn description(&self) -> &'static str {
        "chains of the open interval (0, p)"
    }
}

impl IntervalComplex for OrderComplex {
    fn build(&self, lattice: &FiniteAtomicLattice, p: ElementRef) -> Result<SimplicialComplex, ComplexError> {
        order_complex_open_interval(lattice, p)
    }
}

pub fn interval_complexes() -> Registry<dyn IntervalComplex> {
    let r: Registry<dyn IntervalComplex> = Registry::new("interval complex");
    r.with(Box::new(CrossCut)).with(Box::new(OrderComplex))
}

pub fn crosscut_open_interval(
    lattice: &FiniteAtomicLattice,
    p: ElementRef,
) -> Result<SimplicialComplex, ComplexError> {
    let sp = lattice.set(p);
    // Atoms strictly below p; an atom has none.
    let atoms: Vec<usize> = if sp.len() <= 1 { Vec::new() } else { sp.atoms().collect() };
    let vertices: Vec<VertexId> = atoms.iter().map(|&a| VertexId::Int(a as i64)).collect();
    if vertices.len() > MAX_VERTICES {
        return Err(ComplexError::TooManyVertices(vertices.len()));
    }
    // Grow faces one vertex at a time; faces are closed under subsets, so
    // only extensions of faces can be faces.
    let mut faces: Vec<Face> = vec![0];
    let mut frontier: Vec<Face> = vec![0];
    while let Some(f) = frontier.pop() {
        let start = if f == 0 { 0 } else { 64 - f.leading_zeros() as usize };
        for v in start..atoms.len() {
            let g = f | (1u64 << v);
            let set = crate::atoms::AtomSet::from_atoms(bits(g).map(|i| atoms[i])).expect("atoms in range");
            if lattice.join_of_set(set) != p {
                faces.push(g);
                frontier.push(g);
            }
        }
    }
    SimplicialComplex::from_faces(vertices, faces)
}

pub fn order_complex_open_interval(
    lattice: &FiniteAtomicLattice,
    p: ElementRef,
) -> Result<SimplicialComplex, ComplexError> {
    let sp = lattice.set(p);
    let inner: Vec<ElementRef> = lattice
        .elements()
        .filter(|&q| q != lattice.bottom() && lattice.set(q).is_strict_subset(sp))
        .collect();
    if inner.len() > MAX_VERTICES {
        return Err(ComplexError::TooManyVertices(inner.len()));
    }
    let vertices: Vec<VertexId> = inner.iter().map(|&q| VertexId::Text(lattice.set(q).to_string())).collect();
    // Chains, extended upward in canonical order.
    let mut faces: Vec<Face> = vec![0];
    let mut stack: Vec<(Face, Option<usize>)> = vec![(0, None)];
    while let Some((f, last)) = stack.pop() {
        let from = last.map_or(0, |l| l + 1);
        for j in from..inner.len() {
            let ok = last.is_none_or(|l| lattice.set(inner[l]).is_strict_subset(lattice.set(inner[j])));
            if ok {
                let g = f | (1u64 << j);
                faces.push(g);
                stack.push((g, Some(j)));
            }
        }
    }
    SimplicialComplex::from_faces(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::AtomSet;

    fn set(atoms: &[usize]) -> AtomSet {
        AtomSet::from_atoms(atoms.iter().copied()).unwrap()
    }

    fn path() -> FiniteAtomicLattice {
        FiniteAtomicLattice::from_family(
            4,
            [&[][..], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3, 4]].iter().map(|s| set(s)),
        )
        .unwrap()
    }

    fn profile(pairs: &[(i32, usize)]) -> HomologyProfile {
        HomologyProfile { dims: pairs.iter().copied().collect() }
    }

    #[test]
    fn kinds() {
        let v = SimplicialComplex::void(vec![]).unwrap();
        assert_eq!(v.kind(), ComplexKind::Void);
        let e = SimplicialComplex::from_faces(vec![], [0]).unwrap();
        assert_eq!(e.kind(), ComplexKind::Empty);
        assert_eq!(SimplicialComplex::simplex(2).unwrap().kind(), ComplexKind::NonEmpty);
    }

    #[test]
    fn homology_conventions() {
        let e = SimplicialComplex::from_faces(vec![], [0]).unwrap();
        assert_eq!(e.reduced_homology(FieldSpec::Rationals), profile(&[(-1, 1)]));
        assert!(!e.is_acyclic(FieldSpec::Rationals));
        let v = SimplicialComplex::void(vec![]).unwrap();
        assert!(v.reduced_homology(FieldSpec::Rationals).is_zero());
        assert!(v.is_acyclic(FieldSpec::Rationals));
    }

    #[test]
    fn homology_of_small_complexes() {
        let points = SimplicialComplex::from_faces(numbered_vertices(3), [1, 2, 4]).unwrap();
        assert_eq!(points.reduced_homology(FieldSpec::Rationals), profile(&[(0, 2)]));
        let circle = SimplicialComplex::simplex_boundary(3).unwrap();
        assert_eq!(circle.reduced_homology(FieldSpec::Rationals), profile(&[(1, 1)]));
        assert!(!circle.is_acyclic(FieldSpec::Rationals));
        assert!(SimplicialComplex::simplex(3).unwrap().is_acyclic(FieldSpec::Rationals));
        let sphere = SimplicialComplex::simplex_boundary(4).unwrap();
        assert_eq!(sphere.reduced_homology(FieldSpec::Prime(2)), profile(&[(2, 1)]));
        let path = SimplicialComplex::from_faces(numbered_vertices(4), [0b0011, 0b0110, 0b1100]).unwrap();
        assert!(path.is_acyclic(FieldSpec::Rationals));
    }

    #[test]
    fn facets_are_maximal() {
        let c = SimplicialComplex::from_faces(numbered_vertices(3), [0b011, 0b001, 0b111, 0]).unwrap();
        assert_eq!(c.facets(), &[0b111]);
        assert_eq!(c.f_vector(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn named_facets_reject_unknown_vertices() {
        let err = SimplicialComplex::from_named_facets(numbered_vertices(2), &[vec![VertexId::Int(3)]]).unwrap_err();
        assert_eq!(err, ComplexError::UnknownVertex("3".into()));
        let dup = SimplicialComplex::from_faces(vec![VertexId::Int(1), VertexId::Int(1)], []).unwrap_err();
        assert_eq!(dup, ComplexError::DuplicateVertex("1".into()));
    }

    #[test]
    fn crosscut_examples() {
        let m = FiniteAtomicLattice::minimal(3).unwrap();
        let g = crosscut_open_interval(&m, m.top()).unwrap();
        assert_eq!(g.facets(), &[1, 2, 4]);
        let b = FiniteAtomicLattice::boolean(3).unwrap();
        let g = crosscut_open_interval(&b, b.top()).unwrap();
        assert_eq!(g, SimplicialComplex::simplex_boundary(3).unwrap());
        let l = path();
        let g = crosscut_open_interval(&l, l.top()).unwrap();
        assert_eq!(g.facets(), &[0b0011, 0b0110, 0b1100]);
        let a = crosscut_open_interval(&l, l.atom(2)).unwrap();
        assert_eq!(a.kind(), ComplexKind::Empty);
    }

    #[test]
    fn order_complex_examples() {
        let l = path();
        let d = order_complex_open_interval(&l, l.index_of(set(&[1, 2])).unwrap()).unwrap();
        assert_eq!(d.vertices().len(), 2);
        assert_eq!(d.facets(), &[1, 2]);
        let a = order_complex_open_interval(&l, l.atom(3)).unwrap();
        assert_eq!(a.kind(), ComplexKind::Empty);
        let b = FiniteAtomicLattice::boolean(3).unwrap();
        let d = order_complex_open_interval(&b, b.top()).unwrap();
        assert_eq!(d.f_vector(), vec![1, 6, 6]);
        assert_eq!(d.reduced_homology(FieldSpec::Rationals), profile(&[(1, 1)]));
    }

    #[test]
    fn registry_has_both_complexes() {
        let r = interval_complexes();
        assert_eq!(r.names(), vec!["crosscut", "order"]);
    }

    #[test]
    fn json_round_trip() {
        let c = SimplicialComplex::from_faces(numbered_vertices(4), [0b0011, 0b0110, 0b1100]).unwrap();
        let j = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(j, r#"{"vertices":[1,2,3,4],"facets":[[1,2],[2,3],[3,4]]}"#);
        let back: ComplexJson = serde_json::from_str(&j).unwrap();
        assert_eq!(SimplicialComplex::from_json(&back).unwrap(), c);
        let e = SimplicialComplex::from_faces(vec![], [0]).unwrap();
        assert_eq!(serde_json::to_string(&e.to_json()).unwrap(), r#"{"vertices":[],"facets":[[]]}"#);
    }
}
