//! Coefficient fields and exact matrix rank.
//!
//! Rank over the rationals uses fraction-free integer row reduction: rows are
//! combined as `a·r − b·p` and divided by their content, so no rounding ever
//! happens. Prime fields use ordinary elimination modulo `p`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FieldSpec {
    #[default]
    Rationals,
    /// `Z/pZ` for a prime `p`.
    Prime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unrecognised field '{0}' (expected q, f2 or fp:<prime>)")]
    Unrecognised(String),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) && p < (1 << 32) {
            Ok(FieldSpec::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => p,
        }
    }

    /// Rank of a sparse matrix given as rows of `(column, entry)` pairs.
    pub fn rank(self, rows: &[Vec<(usize, i64)>]) -> usize {
        match self {
            FieldSpec::Rationals => rank_with(&mut Integers, rows),
            FieldSpec::Prime(p) => rank_with(&mut ModP(p), rows),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(2) => write!(f, "f2"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "q" | "qq" | "rationals" => Ok(FieldSpec::Rationals),
            "f2" => Ok(FieldSpec::Prime(2)),
            _ => {
                let p = t
                    .strip_prefix("fp:")
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| FieldError::Unrecognised(s.to_string()))?;
                FieldSpec::prime(p)
            }
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Row operations for one coefficient domain.
trait Reducer {
    type Elem: Clone;

    fn lift(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, v: &Self::Elem) -> bool;
    /// Clear the leading entry of `row` using `pivot` (same leading column).
    fn eliminate(&self, pivot: &[(usize, Self::Elem)], row: &[(usize, Self::Elem)]) -> Vec<(usize, Self::Elem)>;
    fn normalize(&self, row: &mut Vec<(usize, Self::Elem)>);
}

fn rank_with<R: Reducer>(r: &mut R, rows: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, R::Elem)>> = HashMap::new();
    let mut rank = 0;
    for raw in rows {
        let mut row: Vec<(usize, R::Elem)> = {
            let mut sorted = raw.clone();
            sorted.sort_unstable_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(sorted.len());
            for (c, v) in sorted {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.into_iter().map(|(c, v)| (c, r.lift(v))).filter(|(_, v)| !r.is_zero(v)).collect()
        };
        r.normalize(&mut row);
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    row = r.eliminate(p, &row);
                    r.normalize(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

struct Integers;

impl Reducer for Integers {
    type Elem = BigInt;

    fn lift(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn is_zero(&self, v: &BigInt) -> bool {
        v.is_zero()
    }

    fn eliminate(&self, pivot: &[(usize, BigInt)], row: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
        let a = &pivot[0].1;
        let b = &row[0].1;
        // a·row − b·pivot
        let mut out = Vec::with_capacity(pivot.len() + row.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < pivot.len() {
            let (col, val) = match (row.get(i), pivot.get(j)) {
                (Some((cr, vr)), Some((cp, vp))) if cr == cp => {
                    i += 1;
                    j += 1;
                    (*cr, a * vr - b * vp)
                }
                (Some((cr, vr)), Some((cp, _))) if cr < cp => {
                    i += 1;
                    (*cr, a * vr)
                }
                (Some((cr, vr)), None) => {
                    i += 1;
                    (*cr, a * vr)
                }
                (_, Some((cp, vp))) => {
                    j += 1;
                    (*cp, -(b * vp))
                }
                (None, None) => unreachable!(),
            };
            if !val.is_zero() {
                out.push((col, val));
            }
        }
        out
    }

    fn normalize(&self, row: &mut Vec<(usize, BigInt)>) {
        let Some(first) = row.first() else { return };
        let mut g = first.1.abs();
        for (_, v) in row.iter().skip(1) {
            if g.is_one() {
                break;
            }
            g = g.gcd(v);
        }
        if row[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, v) in row.iter_mut() {
                *v = &*v / &g;
            }
        }
    }
}

struct ModP(u64);

impl ModP {
    fn inv(&self, v: u64) -> u64 {
        // Fermat: v^(p-2).
        let p = self.0;
        let (mut base, mut exp, mut acc) = (v % p, p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = ((acc as u128 * base as u128) % p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % p as u128) as u64;
            exp >>= 1;
        }
        acc
    }
}

impl Reducer for ModP {
    type Elem = u64;

    fn lift(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }

    fn eliminate(&self, pivot: &[(usize, u64)], row: &[(usize, u64)]) -> Vec<(usize, u64)> {
        // Pivot rows are monic; subtract b·pivot.
        let p = self.0;
        let b = row[0].1;
        let mut out = Vec::with_capacity(pivot.len() + row.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < pivot.len() {
            let (col, val) = match (row.get(i), pivot.get(j)) {
                (Some(&(cr, vr)), Some(&(cp, vp))) if cr == cp => {
                    i += 1;
                    j += 1;
                    (cr, (vr + p - (b * vp) % p) % p)
                }
                (Some(&(cr, vr)), Some(&(cp, _))) if cr < cp => {
                    i += 1;
                    (cr, vr)
                }
                (Some(&(cr, vr)), None) => {
                    i += 1;
                    (cr, vr)
                }
                (_, Some(&(cp, vp))) => {
                    j += 1;
                    (cp, (p - (b * vp) % p) % p)
                }
                (None, None) => unreachable!(),
            };
            if val != 0 {
                out.push((col, val));
            }
        }
        out
    }

    fn normalize(&self, row: &mut Vec<(usize, u64)>) {
        let Some(&(_, lead)) = row.first() else { return };
        if lead != 1 {
            let inv = self.inv(lead);
            for (_, v) in row.iter_mut() {
                *v = ((*v as u128 * inv as u128) % self.0 as u128) as u64;
            }
        }
    }
}
