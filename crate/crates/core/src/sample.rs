//! Seeded random generators for lattices, comparable pairs, ideals and
//! labelings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coordinatization::Labeling;
use crate::ideals::{indexed_names, Monomial, MonomialIdeal};
use crate::lattice::{ElementRef, FiniteAtomicLattice};
use crate::ln::{ln_lower_covers, ln_upper_covers};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank of the top of `L(n)`.
pub fn ln_height(n: usize) -> usize {
    (1usize << n).saturating_sub(n + 2)
}

/// Ascends `steps` random upper covers from `p`, stopping at the top.
pub fn ascend<R: Rng>(rng: &mut R, p: &FiniteAtomicLattice, steps: usize) -> FiniteAtomicLattice {
    let mut cur = p.clone();
    for _ in 0..steps {
        let covers = ln_upper_covers(&cur);
        match covers.choose(rng) {
            Some(c) => cur = c.clone(),
            None => break,
        }
    }
    cur
}

/// Descends `steps` random lower covers from `p`, stopping at the bottom.
pub fn descend<R: Rng>(rng: &mut R, p: &FiniteAtomicLattice, steps: usize) -> FiniteAtomicLattice {
    let mut cur = p.clone();
    for _ in 0..steps {
        let covers = ln_lower_covers(&cur);
        match covers.choose(rng) {
            Some(c) => cur = c.clone(),
            None => break,
        }
    }
    cur
}

/// A lattice on `n` atoms reached by a random ascent of random length from
/// the minimal lattice.
pub fn random_lattice<R: Rng>(rng: &mut R, n: usize) -> FiniteAtomicLattice {
    let start = FiniteAtomicLattice::minimal(n).expect("1 <= n <= 32");
    let steps = rng.gen_range(0..=ln_height(n));
    ascend(rng, &start, steps)
}

/// A pair `(q, p)` with `q ≤ p` in `L(n)`.
pub fn random_comparable_pair<R: Rng>(rng: &mut R, n: usize) -> (FiniteAtomicLattice, FiniteAtomicLattice) {
    let p = random_lattice(rng, n);
    let depth = rng.gen_range(0..=ln_height(n));
    (descend(rng, &p, depth), p)
}

/// A minimal monomial ideal with at most `max_gens` generators in at most
/// `max_vars` variables, exponents at most `max_exp`.
pub fn random_minimal_ideal<R: Rng>(rng: &mut R, max_gens: usize, max_vars: usize, max_exp: u64) -> MonomialIdeal {
    loop {
        let k = rng.gen_range(1..=max_gens);
        let v = rng.gen_range(1..=max_vars);
        let rows: Vec<Vec<u64>> = (0..k).map(|_| (0..v).map(|_| rng.gen_range(0..=max_exp)).collect()).collect();
        if let Ok(m) = MonomialIdeal::from_dense(indexed_names(v), &rows) {
            return m;
        }
    }
}

/// A strongly generic minimal ideal: no variable has the same non-zero
/// exponent in two generators.
pub fn random_strongly_generic_ideal<R: Rng>(rng: &mut R, max_gens: usize, max_vars: usize) -> MonomialIdeal {
    loop {
        let k = rng.gen_range(1..=max_gens);
        let v = rng.gen_range(1..=max_vars);
        let mut rows = vec![vec![0u64; v]; k];
        for j in 0..v {
            let mut values: Vec<u64> = (1..=k as u64 + 2).collect();
            values.shuffle(rng);
            for (i, row) in rows.iter_mut().enumerate() {
                if rng.gen_bool(0.7) {
                    row[j] = values[i];
                }
            }
        }
        if let Ok(m) = MonomialIdeal::from_dense(indexed_names(v), &rows) {
            debug_assert!(m.is_strongly_generic().holds);
            return m;
        }
    }
}

/// A valid labeling of `l`: each variable runs along a random chain, then
/// every meet-irreducible left unlabeled gets a fresh variable.
pub fn random_labeling<R: Rng>(rng: &mut R, l: &FiniteAtomicLattice) -> Labeling {
    let mut exps: Vec<Vec<(usize, u64)>> = vec![Vec::new(); l.len()];
    let chain_vars = rng.gen_range(0..=3);
    for v in 0..chain_vars {
        let below_top: Vec<ElementRef> = l.elements().filter(|&e| e != l.top()).collect();
        let mut cur = *below_top.choose(rng).expect("a lattice has a bottom");
        loop {
            if cur != l.top() && rng.gen_bool(0.5) {
                exps[cur.0].push((v, rng.gen_range(1..=3)));
            }
            match l.covers_of(cur).choose(rng) {
                Some(&c) => cur = c,
                None => break,
            }
        }
    }
    let mut nvars = chain_vars;
    for mi in l.meet_irreducibles() {
        if exps[mi.0].is_empty() {
            exps[mi.0].push((nvars, rng.gen_range(1..=3)));
            nvars += 1;
        }
    }
    let labels = exps.into_iter().enumerate().map(|(i, e)| (ElementRef(i), Monomial::from_pairs(e)));
    Labeling::new(l.clone(), indexed_names(nvars), labels).expect("labels are in range")
}
