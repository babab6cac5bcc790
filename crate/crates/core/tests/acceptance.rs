//! Acceptance suite. Each criterion prints one PASS or FAIL line; the run
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::Rng;

use lcmlat_core::coordinatization::{deficit_labeling, eccv_labeling, realize, roundtrip_check, Labeling};
use lcmlat_core::deformation::{construct_deformation, is_valid_deformation};
use lcmlat_core::ideals::letter_names;
use lcmlat_core::ln::{enumerators, ln_all, ln_count, ln_meet_irreducibles, ln_upper_covers, LnContext};
use lcmlat_core::resolutions::{
    betti_table, strongly_generic_coordinatization, total_betti, verify_scarf_filter, FilterMode, Via,
};
use lcmlat_core::sample::{
    random_comparable_pair, random_labeling, random_lattice, random_minimal_ideal, random_strongly_generic_ideal,
    rng,
};
use lcmlat_core::{AtomSet, FieldSpec, FiniteAtomicLattice, Monomial, MonomialIdeal};

// Pinned tolerances. Every numeric comparison below is exact; only wall-clock
// budgets carry slack.
const COUNT_BUDGET_SMALL: Duration = Duration::from_secs(1);
const COUNT_BUDGET_N5: Duration = Duration::from_secs(300);
const ROUNDTRIP_BUDGET: Duration = Duration::from_secs(30);
const FILTER_BUDGET: Duration = Duration::from_secs(120);
const SEED: u64 = 0x1c_3a77;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} ({secs:.2}s)"),
        Err(detail) => println!("criterion {id:>2} FAIL  {title}: {detail} ({secs:.2}s)"),
    }
    outcome.is_ok()
}

fn set(atoms: &[usize]) -> AtomSet {
    AtomSet::from_atoms(atoms.iter().copied()).unwrap()
}

fn ideal(s: &str) -> MonomialIdeal {
    MonomialIdeal::parse_text(s).unwrap()
}

fn lattice(n: usize, sets: &[&[usize]]) -> FiniteAtomicLattice {
    FiniteAtomicLattice::from_family(n, sets.iter().map(|s| set(s))).unwrap()
}

fn path() -> FiniteAtomicLattice {
    lattice(4, &[&[], &[1], &[2], &[3], &[4], &[1, 2], &[2, 3], &[3, 4], &[1, 2, 3, 4]])
}

const FIGURE_A: &str = "c*d*f, d*e*f, b*e*f, a*b*c*e";
const FIGURE_B: &str = "b*c^2*d^2*e^2*f^2, a*d*e^2*f^2, a^2*b^2*c*f, a^3*b^3*c^3*d^3*e";

fn count_closure_dfs(n: usize) -> u64 {
    ln_count(LnContext::new(n).unwrap(), enumerators().get("closure-dfs").unwrap()).unwrap()
}

fn all(n: usize) -> Vec<FiniteAtomicLattice> {
    ln_all(LnContext::new(n).unwrap(), enumerators().get("closure-dfs").unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut detail = Vec::new();
    for (n, expected, budget) in
        [(3, 8u64, COUNT_BUDGET_SMALL), (4, 545, COUNT_BUDGET_SMALL), (5, 702_525, COUNT_BUDGET_N5)]
    {
        let t = Instant::now();
        let c = count_closure_dfs(n);
        let dt = t.elapsed();
        ensure(c == expected, || format!("|L({n})| = {c}, expected {expected}"))?;
        ensure(dt <= budget, || format!("|L({n})| took {dt:?}, budget {budget:?}"))?;
        detail.push(format!("|L({n})|={c} in {:.2}s", dt.as_secs_f64()));
    }
    Ok(detail.join(", "))
}

fn criterion_2() -> Outcome {
    let mut sizes = Vec::new();
    for n in 3..=5 {
        let mis = ln_meet_irreducibles(LnContext::new(n).unwrap());
        let formula = n * ((1 << (n - 1)) - n);
        ensure(mis.len() == formula, || format!("n={n}: {} meet-irreducibles, formula {formula}", mis.len()))?;
        if n <= 4 {
            let built: BTreeSet<FiniteAtomicLattice> = mis.into_iter().collect();
            let brute: BTreeSet<FiniteAtomicLattice> =
                all(n).into_iter().filter(|l| ln_upper_covers(l).len() == 1).collect();
            ensure(built == brute, || format!("n={n}: constructed set differs from brute force"))?;
        }
        sizes.push(formula.to_string());
    }
    Ok(format!("sizes {}; brute-force sets agree for n=3,4", sizes.join(", ")))
}

fn criterion_3() -> Outcome {
    let mut r = rng(SEED);
    let bottom = FiniteAtomicLattice::minimal(4).unwrap();
    for k in 0..1000 {
        let mut cur = bottom.clone();
        let mut length = 0;
        loop {
            let covers = ln_upper_covers(&cur);
            if covers.is_empty() {
                break;
            }
            cur = covers[r.gen_range(0..covers.len())].clone();
            length += 1;
        }
        ensure(length == 10, || format!("chain {k} has length {length}"))?;
        ensure(cur.len() == 16, || format!("chain {k} ended below B_4"))?;
    }
    Ok("1000 chains, all of length 10".into())
}

fn criterion_4() -> Outcome {
    let m = ideal(FIGURE_A);
    let ll = m.lcm_lattice();
    let l = &ll.lattice;
    ensure(l.len() == 10, || format!("{} elements", l.len()))?;
    ensure(l.meet_irreducibles().len() == 6, || "meet-irreducible count".into())?;
    ensure(l.maximal_chains().len() == 6, || "maximal chain count".into())?;
    let assignment = [(&[1][..], "e"), (&[4], "f"), (&[1, 2], "b"), (&[2, 3], "c"), (&[3, 4], "d"), (&[1, 2, 3], "a")];
    let names = letter_names(6);
    let labels: Vec<_> = assignment
        .iter()
        .map(|(s, v)| {
            let var = names.iter().position(|n| n == v).unwrap();
            (l.index_of(set(s)).unwrap(), Monomial::var(var))
        })
        .collect();
    let lab = Labeling::new(l.clone(), names, labels).unwrap();
    let squarefree = realize(&lab).map_err(|e| e.to_string())?.to_text();
    ensure(squarefree == FIGURE_A, || format!("minimal squarefree gave {squarefree}"))?;
    let eccv = realize(&eccv_labeling(l).with_names(letter_names(6)).unwrap()).map_err(|e| e.to_string())?.to_text();
    ensure(eccv == FIGURE_B, || format!("ECCV gave {eccv}"))?;
    Ok("10 elements, 6 meet-irreducibles, 6 chains; both ideals byte-exact".into())
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    for src in [FIGURE_A, FIGURE_B] {
        let m = ideal(src);
        ensure(roundtrip_check(&m) == Ok(true), || format!("round trip failed for {src}"))?;
    }
    let mut r = rng(SEED + 5);
    for k in 0..500 {
        let m = random_minimal_ideal(&mut r, 5, 5, 4);
        let back = realize(&deficit_labeling(&m.lcm_lattice())).map_err(|e| format!("sample {k}: {e}"))?;
        ensure(back == m, || format!("sample {k}: {m} came back as {back}"))?;
    }
    let dt = t.elapsed();
    ensure(dt <= ROUNDTRIP_BUDGET, || format!("took {dt:?}"))?;
    Ok("2 printed ideals and 500 random ideals round-trip".into())
}

fn criterion_6() -> Outcome {
    let mut r = rng(SEED + 6);
    for k in 0..1000 {
        let n = r.gen_range(1..=5);
        let l = random_lattice(&mut r, n);
        let lab = random_labeling(&mut r, &l);
        let m = realize(&lab).map_err(|e| format!("labeling {k}: {e}"))?;
        let back = m.lcm_lattice().lattice;
        ensure(back.family() == l.family(), || format!("labeling {k}: family changed"))?;
    }
    Ok("1000 random labelings reproduce their lattice".into())
}

fn check_pair(q: &FiniteAtomicLattice, p: &FiniteAtomicLattice) -> Result<(), String> {
    let c = construct_deformation(p, q).map_err(|e| e.to_string())?;
    let verdict = is_valid_deformation(&c.deformation).map_err(|e| e.to_string())?;
    ensure(verdict.valid, || format!("invalid deformation {:?}", verdict.witness))?;
    ensure(c.deformation.base.lcm_lattice().lattice.family() == q.family(), || "base lattice is not Q".into())?;
    let deformed = c.deformation.deformed().map_err(|e| e.to_string())?;
    ensure(deformed.lcm_lattice().lattice.family() == p.family(), || "deformed lattice is not P".into())
}

fn criterion_7() -> Outcome {
    let l3 = all(3);
    let mut pairs = 0;
    for p in &l3 {
        for q in &l3 {
            if lcmlat_core::ln::ln_leq(q, p).unwrap() {
                check_pair(q, p).map_err(|e| format!("L(3) {:?} <= {:?}: {e}", q.family(), p.family()))?;
                pairs += 1;
            }
        }
    }
    let mut r = rng(SEED + 7);
    for k in 0..200 {
        let (q, p) = random_comparable_pair(&mut r, 4);
        check_pair(&q, &p).map_err(|e| format!("L(4) pair {k}: {e}"))?;
    }
    Ok(format!("{pairs} comparable pairs of L(3) and 200 random pairs of L(4)"))
}

/// Reduced homology ranks of the order complex of the open interval
/// `(∅, top)` of a set family, by elimination over the rationals.
fn oracle_reduced_homology(family: &[u32], top: u32) -> Vec<usize> {
    let inner: Vec<u32> = family.iter().copied().filter(|&s| s != 0 && s != top && s & top == s).collect();
    let mut chains: Vec<Vec<Vec<usize>>> = vec![vec![vec![]]];
    loop {
        let last = chains.last().unwrap();
        let mut next = Vec::new();
        for c in last {
            for (i, &s) in inner.iter().enumerate() {
                let ok = match c.last() {
                    None => true,
                    Some(&j) => inner[j] & s == inner[j] && inner[j] != s,
                };
                if ok {
                    let mut d = c.clone();
                    d.push(i);
                    next.push(d);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        chains.push(next);
    }
    // rank of ∂_k from k-vertex chains to (k−1)-vertex chains
    let rank = |k: usize| -> usize {
        if k == 0 || k >= chains.len() {
            return 0;
        }
        let lower = &chains[k - 1];
        let mut rows: Vec<Vec<Ratio<i64>>> = chains[k]
            .iter()
            .map(|c| {
                let mut row = vec![Ratio::from_integer(0); lower.len()];
                for drop in 0..c.len() {
                    let mut f = c.clone();
                    f.remove(drop);
                    let col = lower.iter().position(|x| *x == f).unwrap();
                    row[col] = Ratio::from_integer(if drop % 2 == 0 { 1 } else { -1 });
                }
                row
            })
            .collect();
        let mut r = 0;
        for col in 0..lower.len() {
            if let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != Ratio::from_integer(0)) {
                rows.swap(r, piv);
                let pivot = rows[r][col];
                for i in 0..rows.len() {
                    if i != r && rows[i][col] != Ratio::from_integer(0) {
                        let factor = rows[i][col] / pivot;
                        let pivot_row = rows[r].clone();
                        for (x, p) in rows[i].iter_mut().zip(pivot_row) {
                            *x -= p * factor;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    };
    // H̃_{k−1} from chains with k vertices, the empty chain included
    (0..chains.len()).map(|k| chains[k].len() - rank(k) - rank(k + 1)).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_8() -> Outcome {
    let q = FieldSpec::Rationals;
    let totals = betti_table(&path(), q, Via::Both).map_err(|e| e.to_string())?.totals;
    ensure(totals == vec![1, 4, 3], || format!("path totals {totals:?}"))?;
    let b3 = total_betti(&FiniteAtomicLattice::boolean(3).unwrap(), q).map_err(|e| e.to_string())?;
    let koszul: Vec<usize> = (0..=3).map(|i| binomial(3, i)).collect();
    ensure(b3 == koszul, || format!("B3 totals {b3:?}, Koszul {koszul:?}"))?;
    for n in 3..=6 {
        let m = FiniteAtomicLattice::minimal(n).unwrap();
        let got = total_betti(&m, q).map_err(|e| e.to_string())?;
        let family: Vec<u32> = m.family().iter().map(|s| s.bits()).collect();
        let mut oracle = vec![1usize, 0, 0];
        for &s in &family[1..] {
            for (k, h) in oracle_reduced_homology(&family, s).into_iter().enumerate() {
                // H̃_{k−1} contributes to b_{k+1}
                oracle[k + 1] += h;
            }
        }
        while oracle.last() == Some(&0) {
            oracle.pop();
        }
        ensure(got == oracle && got == vec![1, n, n - 1], || format!("minimal n={n}: {got:?} vs oracle {oracle:?}"))?;
    }
    let mut elements = 0;
    for n in [3, 4] {
        for l in all(n) {
            for field in [FieldSpec::Rationals, FieldSpec::Prime(2)] {
                betti_table(&l, field, Via::Both).map_err(|e| e.to_string())?;
            }
            elements += l.len() - 1;
        }
    }
    Ok(format!("path (1,4,3), B3 (1,3,3,1), minimal n=3..6; crosscut = order on {elements} elements over Q and F2"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(SEED + 9);
    for k in 0..200 {
        let (q, p) = random_comparable_pair(&mut r, 4);
        let bq = total_betti(&q, FieldSpec::Rationals).map_err(|e| e.to_string())?;
        let bp = total_betti(&p, FieldSpec::Rationals).map_err(|e| e.to_string())?;
        let ok = (0..bq.len().max(bp.len()))
            .all(|i| bq.get(i).copied().unwrap_or(0) <= bp.get(i).copied().unwrap_or(0));
        ensure(ok, || format!("pair {k}: {bq:?} not below {bp:?}"))?;
    }
    Ok("200 random pairs increase entrywise".into())
}

fn criterion_10() -> Outcome {
    let mut graded = 0;
    for l in all(4) {
        if l.is_graded().rank == Some(4) {
            let m = strongly_generic_coordinatization(&l).map_err(|e| e.to_string())?;
            ensure(m.is_strongly_generic().holds, || format!("{:?} gave a non-generic ideal", l.family()))?;
            graded += 1;
        }
    }
    let mut r = rng(SEED + 10);
    for k in 0..100 {
        let m = random_strongly_generic_ideal(&mut r, 5, 5);
        ensure(m.is_strongly_generic().holds, || format!("sample {k} not strongly generic"))?;
        let g = m.lcm_lattice().lattice.is_graded();
        ensure(g.rank == Some(m.num_generators()), || format!("sample {k}: {m} has {g:?}"))?;
    }
    Ok(format!("{graded} graded rank-4 lattices; 100 random strongly generic ideals"))
}

fn criterion_11() -> Outcome {
    let t = Instant::now();
    let mut detail = Vec::new();
    for mode in [FilterMode::Betti, FilterMode::Cover] {
        let r = verify_scarf_filter(&path(), FieldSpec::Rationals, mode).map_err(|e| e.to_string())?;
        ensure(r.counterexamples.is_empty(), || format!("{mode:?}: {} counterexamples", r.counterexamples.len()))?;
        detail.push(format!("{mode:?}: {} examined, {} checked, 0 counterexamples", r.examined, r.checked));
    }
    let dt = t.elapsed();
    ensure(dt <= FILTER_BUDGET, || format!("took {dt:?}"))?;
    Ok(detail.join("; "))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("enumeration counts", criterion_1),
        ("meet-irreducibles of L(n)", criterion_2),
        ("gradedness of L(4)", criterion_3),
        ("figure golden ideals", criterion_4),
        ("deficit round trip", criterion_5),
        ("labelings realize their lattice", criterion_6),
        ("deformations between comparable lattices", criterion_7),
        ("Betti benchmarks", criterion_8),
        ("total Betti monotonicity", criterion_9),
        ("strongly generic and graded", criterion_10),
        ("Scarf filter harness", criterion_11),
    ];
    let passed = criteria.iter().enumerate().filter(|(i, (title, f))| run(i + 1, title, *f)).count();
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
