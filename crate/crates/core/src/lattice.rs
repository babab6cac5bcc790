//! Finite atomic lattices stored as intersection-closed families of atom sets.
//!
//! A lattice on `n` ordered atoms is identified with the family of atom
//! supports of its elements. The family always contains `∅` (the bottom),
//! the full set (the top) and every singleton, and it is closed under
//! intersection. Meet is intersection; the join of `x` and `y` is the
//! smallest member containing `x ∪ y`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atoms::{AtomSet, MAX_ATOMS};

/// Handle to an element: its position in the canonical family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementRef(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("atom count {0} is outside the supported range 1..={MAX_ATOMS}")]
    AtomCount(usize),
    #[error("empty set family")]
    EmptyFamily,
    #[error("set {set:?} uses atoms outside 1..={n}")]
    AtomOutOfRange { set: AtomSet, n: usize },
    #[error("required set {0:?} is missing (families must contain ∅, the full set and every singleton)")]
    MissingRequiredSet(AtomSet),
    #[error("family is not closed under intersection: {a:?} ∩ {b:?} = {meet:?} is missing")]
    NotIntersectionClosed { a: AtomSet, b: AtomSet, meet: AtomSet },
    #[error("malformed canonical encoding: {0}")]
    BadEncoding(&'static str),
}

impl LatticeError {
    pub fn code(&self) -> &'static str {
        match self {
            LatticeError::AtomCount(_) => "AtomCount",
            LatticeError::EmptyFamily => "EmptyFamily",
            LatticeError::AtomOutOfRange { .. } => "AtomOutOfRange",
            LatticeError::MissingRequiredSet(_) => "MissingRequiredSet",
            LatticeError::NotIntersectionClosed { .. } => "NotIntersectionClosed",
            LatticeError::BadEncoding(_) => "BadEncoding",
        }
    }
}

/// Result of [`FiniteAtomicLattice::order_ops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderOps {
    pub leq: bool,
    pub meet: ElementRef,
    pub join: ElementRef,
}

/// Result of [`FiniteAtomicLattice::is_graded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gradedness {
    pub graded: bool,
    /// Common length of all maximal `0̂–1̂` chains, when graded.
    pub rank: Option<usize>,
}

/// A finite atomic lattice on `n` ordered atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAtomicLattice {
    n: usize,
    family: Vec<AtomSet>,
}

impl FiniteAtomicLattice {
    /// Validates `sets` and returns the lattice in canonical form.
    pub fn from_family<I: IntoIterator<Item = AtomSet>>(n: usize, sets: I) -> Result<Self, LatticeError> {
        if n == 0 || n > MAX_ATOMS {
            return Err(LatticeError::AtomCount(n));
        }
        let mut family: Vec<AtomSet> = sets.into_iter().collect();
        if family.is_empty() {
            return Err(LatticeError::EmptyFamily);
        }
        family.sort_unstable();
        family.dedup();
        if let Some(&bad) = family.iter().find(|s| !s.fits(n)) {
            return Err(LatticeError::AtomOutOfRange { set: bad, n });
        }
        for required in required_sets(n) {
            if family.binary_search(&required).is_err() {
                return Err(LatticeError::MissingRequiredSet(required));
            }
        }
        for (i, &a) in family.iter().enumerate() {
            for &b in &family[i + 1..] {
                let meet = a.intersection(b);
                if family.binary_search(&meet).is_err() {
                    return Err(LatticeError::NotIntersectionClosed { a, b, meet });
                }
            }
        }
        Ok(FiniteAtomicLattice { n, family })
    }

    /// The smallest lattice whose family contains every set in `sets`.
    pub fn closure<I: IntoIterator<Item = AtomSet>>(n: usize, sets: I) -> Result<Self, LatticeError> {
        if n == 0 || n > MAX_ATOMS {
            return Err(LatticeError::AtomCount(n));
        }
        let mut family: Vec<AtomSet> = required_sets(n).collect();
        for s in sets {
            if !s.fits(n) {
                return Err(LatticeError::AtomOutOfRange { set: s, n });
            }
            family.push(s);
        }
        family.sort_unstable();
        family.dedup();
        // Repeat pairwise intersection until no new sets appear.
        loop {
            let mut fresh = Vec::new();
            for (i, &a) in family.iter().enumerate() {
                for &b in &family[i + 1..] {
                    let m = a.intersection(b);
                    if family.binary_search(&m).is_err() {
                        fresh.push(m);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            family.extend(fresh);
            family.sort_unstable();
            family.dedup();
        }
        Ok(FiniteAtomicLattice { n, family })
    }

    /// Trusted constructor for families that are already canonical and valid.
    pub(crate) fn from_sorted_unchecked(n: usize, family: Vec<AtomSet>) -> Self {
        debug_assert!(family.windows(2).all(|w| w[0] < w[1]));
        FiniteAtomicLattice { n, family }
    }

    /// The bottom of `L(n)`: atoms are also the coatoms.
    pub fn minimal(n: usize) -> Result<Self, LatticeError> {
        Self::closure(n, std::iter::empty())
    }

    /// The Boolean lattice `B_n`.
    pub fn boolean(n: usize) -> Result<Self, LatticeError> {
        if n == 0 || n > 20 {
            return Err(LatticeError::AtomCount(n));
        }
        Ok(FiniteAtomicLattice { n, family: AtomSet::full(n).subsets().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `n = 1`: the two-element chain `∅ < {1}`.
    pub fn is_trivial(&self) -> bool {
        self.n == 1
    }

    pub fn family(&self) -> &[AtomSet] {
        &self.family
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementRef> {
        (0..self.family.len()).map(ElementRef)
    }

    pub fn set(&self, e: ElementRef) -> AtomSet {
        self.family[e.0]
    }

    pub fn index_of(&self, s: AtomSet) -> Option<ElementRef> {
        self.family.binary_search(&s).ok().map(ElementRef)
    }

    pub fn contains_set(&self, s: AtomSet) -> bool {
        self.family.binary_search(&s).is_ok()
    }

    pub fn bottom(&self) -> ElementRef {
        ElementRef(0)
    }

    pub fn top(&self) -> ElementRef {
        ElementRef(self.family.len() - 1)
    }

    /// Element for the 1-based atom `i`.
    pub fn atom(&self, i: usize) -> ElementRef {
        self.index_of(AtomSet::singleton(i)).expect("singletons are always present")
    }

    pub fn atoms(&self) -> impl Iterator<Item = ElementRef> + '_ {
        (1..=self.n).map(|i| self.atom(i))
    }

    pub fn leq(&self, x: ElementRef, y: ElementRef) -> bool {
        self.set(x).is_subset(self.set(y))
    }

    pub fn meet(&self, x: ElementRef, y: ElementRef) -> ElementRef {
        self.index_of(self.set(x).intersection(self.set(y))).expect("family is intersection-closed")
    }

    pub fn join(&self, x: ElementRef, y: ElementRef) -> ElementRef {
        self.join_of_set(self.set(x).union(self.set(y)))
    }

    /// Smallest element whose support contains `s`; for an atom set this is
    /// the join of those atoms.
    pub fn join_of_set(&self, s: AtomSet) -> ElementRef {
        let mut acc = AtomSet::full(self.n);
        for &m in &self.family {
            if s.is_subset(m) {
                acc = acc.intersection(m);
            }
        }
        self.index_of(acc).expect("intersection of members is a member")
    }

    pub fn order_ops(&self, x: ElementRef, y: ElementRef) -> OrderOps {
        OrderOps { leq: self.leq(x, y), meet: self.meet(x, y), join: self.join(x, y) }
    }

    /// Upper covers of `x`, in canonical order.
    pub fn covers_of(&self, x: ElementRef) -> Vec<ElementRef> {
        let sx = self.set(x);
        let above: Vec<usize> = (x.0 + 1..self.family.len())
            .filter(|&j| sx.is_strict_subset(self.family[j]))
            .collect();
        above
            .iter()
            .copied()
            .filter(|&j| {
                let sj = self.family[j];
                !above.iter().any(|&k| self.family[k].is_strict_subset(sj))
            })
            .map(ElementRef)
            .collect()
    }

    /// Lower covers of `x`, in canonical order.
    pub fn lower_covers_of(&self, x: ElementRef) -> Vec<ElementRef> {
        let sx = self.set(x);
        let below: Vec<usize> = (0..x.0).filter(|&j| self.family[j].is_strict_subset(sx)).collect();
        below
            .iter()
            .copied()
            .filter(|&j| {
                let sj = self.family[j];
                !below.iter().any(|&k| sj.is_strict_subset(self.family[k]))
            })
            .map(ElementRef)
            .collect()
    }

    /// Upper covers of every element, indexed by element.
    pub fn cover_table(&self) -> Vec<Vec<ElementRef>> {
        self.elements().map(|e| self.covers_of(e)).collect()
    }

    /// Elements other than `1̂` with exactly one upper cover.
    ///
    /// In a finite lattice this is the same as not being the meet of two
    /// strictly larger elements. The top is left out because it lies in every
    /// atom filter, so a label on it never reaches a generator.
    pub fn meet_irreducibles(&self) -> Vec<ElementRef> {
        let top = self.top();
        self.elements().filter(|&e| e != top && self.covers_of(e).len() == 1).collect()
    }

    /// Every maximal chain with `0̂` and `1̂` removed, sorted lexicographically
    /// by the sequence of bit encodings.
    pub fn maximal_chains(&self) -> Vec<Vec<ElementRef>> {
        let covers = self.cover_table();
        let top = self.top();
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.chain_dfs(self.bottom(), top, &covers, &mut path, &mut out);
        // Covers are generated in ascending order, so DFS already emits the
        // chains lexicographically; sort anyway to pin the contract.
        out.sort_by(|a, b| {
            let ka: Vec<AtomSet> = a.iter().map(|&e| self.set(e)).collect();
            let kb: Vec<AtomSet> = b.iter().map(|&e| self.set(e)).collect();
            ka.cmp(&kb)
        });
        out
    }

    fn chain_dfs(
        &self,
        at: ElementRef,
        top: ElementRef,
        covers: &[Vec<ElementRef>],
        path: &mut Vec<ElementRef>,
        out: &mut Vec<Vec<ElementRef>>,
    ) {
        if at == top {
            out.push(path.clone());
            return;
        }
        for &c in &covers[at.0] {
            if c != top {
                path.push(c);
            }
            self.chain_dfs(c, top, covers, path, out);
            if c != top {
                path.pop();
            }
        }
    }

    /// Shortest and longest `0̂–1̂` chain lengths (number of cover steps).
    pub fn chain_length_range(&self) -> (usize, usize) {
        let covers = self.cover_table();
        // Family order is a linear extension, so one forward pass suffices.
        let len = self.family.len();
        let mut shortest = vec![usize::MAX; len];
        let mut longest = vec![0usize; len];
        shortest[0] = 0;
        for i in 0..len {
            if shortest[i] == usize::MAX {
                continue;
            }
            for c in &covers[i] {
                shortest[c.0] = shortest[c.0].min(shortest[i] + 1);
                longest[c.0] = longest[c.0].max(longest[i] + 1);
            }
        }
        (shortest[len - 1], longest[len - 1])
    }

    pub fn is_graded(&self) -> Gradedness {
        let (lo, hi) = self.chain_length_range();
        if lo == hi {
            Gradedness { graded: true, rank: Some(lo) }
        } else {
            Gradedness { graded: false, rank: None }
        }
    }

    /// Elements not above `a`: the complement of the filter of `a`.
    pub fn filter_complement(&self, a: ElementRef) -> Vec<ElementRef> {
        let sa = self.set(a);
        self.elements().filter(|&e| !sa.is_subset(self.set(e))).collect()
    }

    /// Whether `supp(p)` is the only atom subset whose join is `p`.
    ///
    /// Join is monotone, so if some proper subset of `supp(p)` joins to `p`
    /// then so does `supp(p)` minus a single atom; checking those `|supp(p)|`
    /// candidates is enough. `0̂` is only reached by the empty set.
    pub fn equiv_unique(&self, p: ElementRef) -> bool {
        let sp = self.set(p);
        sp.atoms().all(|a| self.join_of_set(sp.without(a)) != p)
    }

    /// All atom subsets whose join is `p`, by exhaustive search over
    /// `supp(p)`.
    pub fn equiv_set(&self, p: ElementRef) -> Vec<AtomSet> {
        self.set(p).subsets().filter(|&t| self.join_of_set(t) == p).collect()
    }

    /// Byte encoding: `n` followed by each member as a little-endian `u32`.
    pub fn canonical_encoding(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 4 * self.family.len());
        out.push(self.n as u8);
        for s in &self.family {
            out.extend_from_slice(&s.bits().to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, LatticeError> {
        let (&n, rest) = bytes.split_first().ok_or(LatticeError::BadEncoding("empty input"))?;
        if rest.len() % 4 != 0 {
            return Err(LatticeError::BadEncoding("length is not 1 + 4k"));
        }
        let sets = rest
            .chunks_exact(4)
            .map(|c| AtomSet::from_bits(u32::from_le_bytes([c[0], c[1], c[2], c[3]])));
        let lat = Self::from_family(n as usize, sets)?;
        if lat.canonical_encoding() != bytes {
            return Err(LatticeError::BadEncoding("family not in canonical order"));
        }
        Ok(lat)
    }

    /// Graphviz rendering of the Hasse diagram.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for e in self.elements() {
            let _ = writeln!(s, "  e{} [label=\"{}\"];", e.0, self.set(e));
        }
        for e in self.elements() {
            for c in self.covers_of(e) {
                let _ = writeln!(s, "  e{} -> e{};", e.0, c.0);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// `{"n": 4, "sets": [[], [1], ..., [1,2,3,4]]}` with 1-based atoms, sets
/// ordered by size and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl FiniteAtomicLattice {
    pub fn to_json(&self) -> LatticeJson {
        let mut sets: Vec<Vec<usize>> = self.family.iter().map(|s| s.atoms().collect()).collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        LatticeJson { n: self.n, sets }
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self, LatticeError> {
        let mut family = Vec::with_capacity(j.sets.len());
        for s in &j.sets {
            let set = AtomSet::from_atoms(s.iter().copied())
                .filter(|set| set.fits(j.n))
                .ok_or_else(|| LatticeError::AtomOutOfRange {
                    set: AtomSet::from_atoms(s.iter().copied().filter(|&a| (1..=MAX_ATOMS).contains(&a)))
                        .unwrap_or(AtomSet::EMPTY),
                    n: j.n,
                })?;
            family.push(set);
        }
        Self::from_family(j.n, family)
    }
}

/// `∅`, every singleton and the full set.
pub fn required_sets(n: usize) -> impl Iterator<Item = AtomSet> {
    std::iter::once(AtomSet::EMPTY)
        .chain((1..=n).map(AtomSet::singleton))
        .chain(std::iter::once(AtomSet::full(n)))
}
