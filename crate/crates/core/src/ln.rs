//! The lattice `L(n)` of all finite atomic lattices on `n` ordered atoms.
//!
//! Elements are compared by containment of their families. For enumeration a
//! family on at most six atoms is packed into a `u64` whose bit `s` is set
//! when the atom set with bit pattern `s` is a member.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::atoms::AtomSet;
use crate::lattice::{required_sets, ElementRef, FiniteAtomicLattice, LatticeError};
use crate::registry::{Named, Registry};

/// Largest `n` for navigation and packed families.
pub const MAX_LN_ATOMS: usize = 6;
/// Largest `n` for which enumeration is attempted.
pub const MAX_ENUMERATION_ATOMS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LnError {
    #[error("lattices have different atom counts ({0} and {1})")]
    AtomCountMismatch(usize, usize),
    #[error("the lattices are not comparable in L(n)")]
    NotComparable,
    #[error("{0}")]
    OutOfSupportedRange(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl LnError {
    pub fn code(&self) -> &'static str {
        match self {
            LnError::AtomCountMismatch(..) => "AtomCountMismatch",
            LnError::NotComparable => "NotComparable",
            LnError::OutOfSupportedRange(_) => "OutOfSupportedRange",
            LnError::Lattice(e) => e.code(),
        }
    }
}

/// An atom count for `L(n)`, checked against the supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LnContext {
    n: usize,
}

impl LnContext {
    pub fn new(n: usize) -> Result<Self, LnError> {
        if n == 0 || n > MAX_LN_ATOMS {
            return Err(LnError::OutOfSupportedRange(format!(
                "L(n) is supported for 1 <= n <= {MAX_LN_ATOMS}, got n = {n}"
            )));
        }
        Ok(LnContext { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_enumerable(&self) -> Result<(), LnError> {
        match self.n {
            6 => Err(LnError::OutOfSupportedRange(
                "enumeration of L(6) is out of range; its size is 66,960,965,307".to_string(),
            )),
            n if n > MAX_ENUMERATION_ATOMS => {
                Err(LnError::OutOfSupportedRange(format!("enumeration of L({n}) is out of range")))
            }
            _ => Ok(()),
        }
    }

    pub fn minimal(&self) -> FiniteAtomicLattice {
        FiniteAtomicLattice::minimal(self.n).expect("n is in range")
    }

    pub fn top(&self) -> FiniteAtomicLattice {
        FiniteAtomicLattice::boolean(self.n).expect("n is in range")
    }
}

fn same_n(a: &FiniteAtomicLattice, b: &FiniteAtomicLattice) -> Result<(), LnError> {
    if a.n() == b.n() {
        Ok(())
    } else {
        Err(LnError::AtomCountMismatch(a.n(), b.n()))
    }
}

/// `Q ≤ P` in `L(n)`: every member of `Q`'s family belongs to `P`'s.
pub fn ln_leq(q: &FiniteAtomicLattice, p: &FiniteAtomicLattice) -> Result<bool, LnError> {
    same_n(q, p)?;
    Ok(q.family().iter().all(|&s| p.contains_set(s)))
}

/// Family intersection.
pub fn ln_meet(p: &FiniteAtomicLattice, q: &FiniteAtomicLattice) -> Result<FiniteAtomicLattice, LnError> {
    same_n(p, q)?;
    let common: Vec<AtomSet> = p.family().iter().copied().filter(|&s| q.contains_set(s)).collect();
    Ok(FiniteAtomicLattice::from_family(p.n(), common)?)
}

/// Intersection closure of the family union.
pub fn ln_join(p: &FiniteAtomicLattice, q: &FiniteAtomicLattice) -> Result<FiniteAtomicLattice, LnError> {
    same_n(p, q)?;
    Ok(FiniteAtomicLattice::closure(p.n(), p.family().iter().chain(q.family()).copied())?)
}

/// Sets that can be added to `P`'s family keeping it intersection-closed.
pub fn addable_sets(p: &FiniteAtomicLattice) -> Vec<AtomSet> {
    AtomSet::full(p.n())
        .subsets()
        .filter(|&s| {
            !p.contains_set(s)
                && p.family().iter().all(|&t| {
                    let m = s.intersection(t);
                    m == s || p.contains_set(m)
                })
        })
        .collect()
}

/// Members that can be removed from `P`'s family keeping it a lattice.
pub fn removable_sets(p: &FiniteAtomicLattice) -> Vec<AtomSet> {
    let required: HashSet<AtomSet> = required_sets(p.n()).collect();
    p.meet_irreducibles().into_iter().map(|e| p.set(e)).filter(|s| !required.contains(s)).collect()
}

pub fn ln_upper_covers(p: &FiniteAtomicLattice) -> Vec<FiniteAtomicLattice> {
    addable_sets(p)
        .into_iter()
        .map(|s| {
            let mut fam = p.family().to_vec();
            let at = fam.binary_search(&s).unwrap_err();
            fam.insert(at, s);
            FiniteAtomicLattice::from_sorted_unchecked(p.n(), fam)
        })
        .collect()
}

pub fn ln_lower_covers(p: &FiniteAtomicLattice) -> Vec<FiniteAtomicLattice> {
    removable_sets(p)
        .into_iter()
        .map(|s| {
            let fam = p.family().iter().copied().filter(|&t| t != s).collect();
            FiniteAtomicLattice::from_sorted_unchecked(p.n(), fam)
        })
        .collect()
}

/// Height above the minimal lattice: the number of non-required members.
pub fn ln_rank(p: &FiniteAtomicLattice) -> usize {
    let required: HashSet<AtomSet> = required_sets(p.n()).collect();
    p.len() - required.len()
}

/// The map `P → Q`, `p ↦ join_Q(supp p)`, indexed by the elements of `P`.
pub fn canonical_map(p: &FiniteAtomicLattice, q: &FiniteAtomicLattice) -> Result<Vec<ElementRef>, LnError> {
    if !ln_leq(q, p)? {
        return Err(LnError::NotComparable);
    }
    Ok(p.elements().map(|e| q.join_of_set(p.set(e))).collect())
}

/// `B_n` minus the interval `[σ, [n]∖{i}]`, for every `i` and every `σ`
/// with `|σ| ≥ 2` avoiding `i`; ordered by `i`, then `σ`.
pub fn ln_meet_irreducibles(ctx: LnContext) -> Vec<FiniteAtomicLattice> {
    let n = ctx.n();
    let full = AtomSet::full(n);
    let mut out = Vec::new();
    for i in 1..=n {
        let coatom = full.without(i);
        for sigma in coatom.subsets().filter(|s| s.len() >= 2) {
            let fam: Vec<AtomSet> = full.subsets().filter(|&t| !(sigma.is_subset(t) && t.is_subset(coatom))).collect();
            let l = FiniteAtomicLattice::from_family(n, fam).expect("L_{i,σ} is a lattice");
            debug_assert_eq!(ln_upper_covers(&l).len(), 1);
            out.push(l);
        }
    }
    out
}

/// Packs a family over at most six atoms into a `u64`.
pub fn pack(l: &FiniteAtomicLattice) -> u64 {
    debug_assert!(l.n() <= MAX_LN_ATOMS);
    l.family().iter().fold(0u64, |m, s| m | 1u64 << s.bits())
}

pub fn unpack(n: usize, mask: u64) -> FiniteAtomicLattice {
    let fam = Bits(mask).map(|b| AtomSet::from_bits(b as u32)).collect();
    FiniteAtomicLattice::from_sorted_unchecked(n, fam)
}

struct Bits(u64);

impl Iterator for Bits {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as u64;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

fn required_mask(n: usize) -> u64 {
    required_sets(n).fold(0u64, |m, s| m | 1u64 << s.bits())
}

/// Whether `s` can join the packed family `mask` (all `s ∩ t` present,
/// treating `s` itself as present).
fn addable(mask: u64, s: u64) -> bool {
    Bits(mask).all(|t| {
        let m = s & t;
        m == s || mask >> m & 1 == 1
    })
}

/// Enumerates `L(n)` for `n ≤ 5`.
pub trait Enumerator: Named + Send + Sync {
    /// Every packed family exactly once, in a fixed order.
    fn masks(&self, n: usize) -> Vec<u64>;

    fn count(&self, n: usize) -> u64 {
        self.masks(n).len() as u64
    }
}

/// Depth-first search over the non-required subsets in increasing order,
/// deciding exclude-then-include for each. A subset may be included when its
/// intersection with every member already chosen is present; every member
/// smaller than it has been decided by then, so each leaf is a distinct
/// lattice and no branch dies.
pub struct ClosureDfs;

/// Depth at which the search is split into parallel tasks.
const SPLIT_DEPTH: usize = 10;

impl ClosureDfs {
    fn candidates(n: usize) -> Vec<u64> {
        let req = required_mask(n);
        (0..1u64 << n).filter(|&s| req >> s & 1 == 0).collect()
    }

    /// Prefixes after deciding the first `depth` candidates, in DFS order.
    fn prefixes(cands: &[u64], base: u64, depth: usize) -> Vec<u64> {
        let mut layer = vec![base];
        for &s in &cands[..depth.min(cands.len())] {
            let mut next = Vec::with_capacity(layer.len() * 2);
            for m in layer {
                next.push(m);
                if addable(m, s) {
                    next.push(m | 1 << s);
                }
            }
            layer = next;
        }
        layer
    }

    fn walk(cands: &[u64], mask: u64, out: &mut Vec<u64>) {
        match cands.split_first() {
            None => out.push(mask),
            Some((&s, rest)) => {
                Self::walk(rest, mask, out);
                if addable(mask, s) {
                    Self::walk(rest, mask | 1 << s, out);
                }
            }
        }
    }

    fn tally(cands: &[u64], mask: u64) -> u64 {
        match cands.split_first() {
            None => 1,
            Some((&s, rest)) => {
                let mut c = Self::tally(rest, mask);
                if addable(mask, s) {
                    c += Self::tally(rest, mask | 1 << s);
                }
                c
            }
        }
    }
}

impl Named for ClosureDfs {
    fn name(&self) -> &'static str {
        "closure-dfs"
    }

    fn description(&self) -> &'static str {
        "depth-first search over addable subsets in increasing order"
    }
}

impl Enumerator for ClosureDfs {
    fn masks(&self, n: usize) -> Vec<u64> {
        let cands = Self::candidates(n);
        let depth = SPLIT_DEPTH.min(cands.len());
        let prefixes = Self::prefixes(&cands, required_mask(n), depth);
        let rest = &cands[depth..];
        let chunks: Vec<Vec<u64>> = prefixes
            .par_iter()
            .map(|&m| {
                let mut out = Vec::new();
                Self::walk(rest, m, &mut out);
                out
            })
            .collect();
        chunks.concat()
    }

    fn count(&self, n: usize) -> u64 {
        let cands = Self::candidates(n);
        let depth = SPLIT_DEPTH.min(cands.len());
        let prefixes = Self::prefixes(&cands, required_mask(n), depth);
        let rest = &cands[depth..];
        prefixes.par_iter().map(|&m| Self::tally(rest, m)).sum()
    }
}

/// Breadth-first search from the minimal lattice through upper covers with a
/// seen-set. Output is sorted by packed value.
pub struct CoverBfs;

impl Named for CoverBfs {
    fn name(&self) -> &'static str {
        "cover-bfs"
    }

    fn description(&self) -> &'static str {
        "breadth-first search through upper covers with deduplication"
    }
}

impl Enumerator for CoverBfs {
    fn masks(&self, n: usize) -> Vec<u64> {
        let start = required_mask(n);
        let universe = (1u64 << n) - 1;
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(m) = queue.pop_front() {
            for s in 0..=universe {
                if m >> s & 1 == 0 && addable(m, s) {
                    let next = m | 1 << s;
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

pub fn enumerators() -> Registry<dyn Enumerator> {
    let r: Registry<dyn Enumerator> = Registry::new("enumerator");
    r.with(Box::new(ClosureDfs)).with(Box::new(CoverBfs))
}

/// `|L(n)|`.
pub fn ln_count(ctx: LnContext, strategy: &dyn Enumerator) -> Result<u64, LnError> {
    ctx.check_enumerable()?;
    Ok(strategy.count(ctx.n()))
}

/// Calls `f` on every lattice of `L(n)` in the strategy's order and returns
/// the count.
pub fn ln_enumerate<F>(ctx: LnContext, strategy: &dyn Enumerator, mut f: F) -> Result<u64, LnError>
where
    F: FnMut(FiniteAtomicLattice),
{
    ctx.check_enumerable()?;
    let masks = strategy.masks(ctx.n());
    for &m in &masks {
        f(unpack(ctx.n(), m));
    }
    Ok(masks.len() as u64)
}

/// All of `L(n)` as a vector.
pub fn ln_all(ctx: LnContext, strategy: &dyn Enumerator) -> Result<Vec<FiniteAtomicLattice>, LnError> {
    let mut out = Vec::new();
    ln_enumerate(ctx, strategy, |l| out.push(l))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(atoms: &[usize]) -> AtomSet {
        AtomSet::from_atoms(atoms.iter().copied()).unwrap()
    }

    fn lat(n: usize, sets: &[&[usize]]) -> FiniteAtomicLattice {
        FiniteAtomicLattice::from_family(n, sets.iter().map(|s| set(s))).unwrap()
    }

    fn path() -> FiniteAtomicLattice {
        lat(4, &[&[], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3, 4]])
    }

    fn figure() -> FiniteAtomicLattice {
        lat(4, &[&[], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3], &[1, 2, 3, 4]])
    }

    #[test]
    fn order_meet_join() {
        let a = lat(3, &[&[], &[1], &[2], &[3], &[1, 2], &[1, 2, 3]]);
        let b = lat(3, &[&[], &[1], &[2], &[3], &[2, 3], &[1, 2, 3]]);
        let m3 = FiniteAtomicLattice::minimal(3).unwrap();
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        assert!(ln_leq(&m3, &b3).unwrap());
        assert!(!ln_leq(&a, &b).unwrap());
        assert!(ln_leq(&a, &a).unwrap());
        assert_eq!(ln_meet(&a, &b).unwrap(), m3);
        assert_eq!(ln_join(&a, &b).unwrap(), lat(3, &[&[], &[1], &[2], &[3], &[1, 2], &[2, 3], &[1, 2, 3]]));
        assert_eq!(ln_join(&a, &m3).unwrap(), a);
        assert_eq!(ln_leq(&a, &path()), Err(LnError::AtomCountMismatch(3, 4)));
    }

    #[test]
    fn covers() {
        let m3 = FiniteAtomicLattice::minimal(3).unwrap();
        assert_eq!(ln_upper_covers(&m3).len(), 3);
        assert!(ln_lower_covers(&m3).is_empty());
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        assert!(ln_upper_covers(&b3).is_empty());
        assert_eq!(ln_lower_covers(&b3).len(), 3);
        assert_eq!(removable_sets(&figure()), vec![set(&[1, 2]), set(&[2, 3]), set(&[1, 2, 3]), set(&[3, 4])]);
        // Every intersection with 12, 23 or 34 is already present.
        let add = addable_sets(&path());
        assert_eq!(
            add,
            vec![
                set(&[1, 3]),
                set(&[1, 2, 3]),
                set(&[1, 4]),
                set(&[2, 4]),
                set(&[1, 2, 4]),
                set(&[1, 3, 4]),
                set(&[2, 3, 4])
            ]
        );
        for c in ln_upper_covers(&path()) {
            assert_eq!(c.len(), path().len() + 1);
            assert!(ln_leq(&path(), &c).unwrap());
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(ln_rank(&FiniteAtomicLattice::minimal(4).unwrap()), 0);
        assert_eq!(ln_rank(&FiniteAtomicLattice::boolean(4).unwrap()), 10);
        assert_eq!(ln_rank(&figure()), 4);
        assert_eq!(ln_rank(&FiniteAtomicLattice::boolean(1).unwrap()), 0);
    }

    #[test]
    fn canonical_map_examples() {
        let b3 = FiniteAtomicLattice::boolean(3).unwrap();
        let m3 = FiniteAtomicLattice::minimal(3).unwrap();
        let f = canonical_map(&b3, &m3).unwrap();
        assert_eq!(f[b3.index_of(set(&[1, 2])).unwrap().0], m3.top());
        assert_eq!(f[b3.atom(2).0], m3.atom(2));
        let id = canonical_map(&figure(), &figure()).unwrap();
        assert!(id.iter().enumerate().all(|(i, e)| e.0 == i));
        assert_eq!(canonical_map(&m3, &b3), Err(LnError::NotComparable));
    }

    #[test]
    fn meet_irreducible_counts() {
        for (n, want) in [(3, 3), (4, 16), (5, 55)] {
            let mis = ln_meet_irreducibles(LnContext::new(n).unwrap());
            assert_eq!(mis.len(), want);
            assert_eq!(mis.len(), n * ((1 << (n - 1)) - n));
        }
    }

    #[test]
    fn small_counts_agree() {
        for (n, want) in [(1, 1), (2, 1), (3, 8), (4, 545)] {
            let ctx = LnContext::new(n).unwrap();
            assert_eq!(ln_count(ctx, &ClosureDfs).unwrap(), want);
            let mut dfs = ClosureDfs.masks(n);
            assert_eq!(dfs.len() as u64, want);
            dfs.sort_unstable();
            assert_eq!(dfs, CoverBfs.masks(n));
        }
    }

    #[test]
    fn enumeration_output_is_valid_and_distinct() {
        let all = ln_all(LnContext::new(4).unwrap(), &ClosureDfs).unwrap();
        let encodings: HashSet<Vec<u8>> = all.iter().map(|l| l.canonical_encoding()).collect();
        assert_eq!(encodings.len(), all.len());
        for l in &all {
            assert_eq!(FiniteAtomicLattice::from_family(4, l.family().iter().copied()).as_ref(), Ok(l));
        }
    }

    #[test]
    fn order_is_independent_of_thread_count() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(|| ClosureDfs.masks(4)), four.install(|| ClosureDfs.masks(4)));
    }

    #[test]
    fn six_atoms_are_refused() {
        let err = ln_count(LnContext::new(6).unwrap(), &ClosureDfs).unwrap_err();
        assert!(err.to_string().contains("66,960,965,307"));
        assert!(LnContext::new(7).is_err());
        // Navigation still works.
        let m6 = LnContext::new(6).unwrap().minimal();
        assert_eq!(ln_upper_covers(&m6).len(), 64 - 8);
    }

    #[test]
    fn pack_round_trip() {
        let f = figure();
        assert_eq!(unpack(4, pack(&f)), f);
    }
}
