//! Minimal arithmetic-progression covers in `Z/pZ`: `ell(X)`, the
//! fixed-difference variant, relative covers `ell_X(Y)`, densities, and the
//! rectifiability criterion.

use crate::verdict::Verdict;
use crate::zp::{ResidueSet, apply_affine, AffineMap};
use crate::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

/// `{start + i*d : 0 <= i < length}` with `d` normalized to `[1,(p-1)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArithmeticProgression {
    pub start: u64,
    pub difference: u64,
    pub length: u64,
}

impl ArithmeticProgression {
    pub fn point_set(&self, s: &ResidueSet) -> ResidueSet {
        let p = s.group().p();
        ResidueSet::from_elems(
            s.group(),
            (0..self.length).map(|i| (self.start + i % p * self.difference % p) % p),
        )
    }

    pub fn covers(&self, x: &ResidueSet) -> bool {
        x.is_subset_of(&self.point_set(x))
    }
}

/// Minimal cover length with a witnessing progression and the density
/// `rho = (|X|-1)/ell(X)` (absent for singletons).
#[derive(Debug, Clone)]
pub struct CoverResult {
    pub ell: u64,
    pub witness: ArithmeticProgression,
    pub rho: Option<Ratio<u64>>,
}

/// Smallest AP of difference `d` containing `X`: map by `d^{-1}`, then the
/// cover length is `p` minus the largest cyclic gap. Returns the length and
/// a witness with normalized difference.
pub fn ell_fixed_difference(x: &ResidueSet, d: u64) -> Result<(u64, ArithmeticProgression)> {
    let p = x.group().p();
    if d % p == 0 {
        return Err(Error::Usage("difference must be nonzero mod p".into()));
    }
    if x.is_empty() {
        return Err(Error::Usage("ell of the empty set".into()));
    }
    let d = d % p;
    if x.card() == p {
        return Ok((p, ArithmeticProgression { start: 0, difference: normalize_d(d, p), length: p }));
    }
    let inv = x.group().inv(d);
    let y = apply_affine(x, AffineMap { a: inv, b: 0 });
    let elems = y.elems();
    if elems.len() == 1 {
        let start = elems[0] * d % p;
        return Ok((1, ArithmeticProgression { start, difference: normalize_d(d, p), length: 1 }));
    }
    // Largest cyclic gap; on ties pick the candidate with the smallest
    // mapped witness start, for determinism.
    let mut best_gap = 0u64;
    let mut best_start = u64::MAX;
    let n = elems.len();
    for i in 0..n {
        let cur = elems[i];
        let next = elems[(i + 1) % n];
        let gap = (next + p - cur - 1) % p;
        let start_elem = next; // first element after the gap
        let start = start_elem % p * d % p;
        if gap > best_gap || (gap == best_gap && start < best_start) {
            best_gap = gap;
            best_start = start;
        }
    }
    let len = p - best_gap;
    let witness = if d <= (p - 1) / 2 {
        ArithmeticProgression { start: best_start, difference: d, length: len }
    } else {
        // d and p-d describe the same point set traversed oppositely.
        let end = (best_start as u128 + (len as u128 - 1) * d as u128) % p as u128;
        ArithmeticProgression { start: end as u64, difference: p - d, length: len }
    };
    Ok((len, witness))
}

fn normalize_d(d: u64, p: u64) -> u64 {
    if d <= (p - 1) / 2 { d } else { p - d }
}

/// `ell(X)`: minimum of the fixed-difference cover over `d in [1,(p-1)/2]`;
/// ties broken by smallest `d`, then smallest start.
pub fn ell(x: &ResidueSet) -> Result<CoverResult> {
    if x.is_empty() {
        return Err(Error::Usage("ell of the empty set".into()));
    }
    let p = x.group().p();
    let mut best: Option<(u64, ArithmeticProgression)> = None;
    for d in 1..=(p - 1) / 2 {
        let (len, w) = ell_fixed_difference(x, d)?;
        let better = match &best {
            None => true,
            Some((bl, bw)) => {
                len < *bl || (len == *bl && w.difference == bw.difference && w.start < bw.start)
            }
        };
        if better {
            best = Some((len, w));
        }
        if len == x.card() {
            // Cannot do better than |X|.
            break;
        }
    }
    let (ell, witness) = best.unwrap();
    let rho = if x.card() >= 2 { Some(Ratio::new(x.card() - 1, ell)) } else { None };
    Ok(CoverResult { ell, witness, rho })
}

/// `ell_X(Y)` together with the difference that was used.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelCover {
    pub len: u64,
    pub d: u64,
}

/// Length of a smallest AP containing `Y` whose difference realizes
/// `ell(X)`. When several differences realize `ell(X)`, the minimum of the
/// fixed-difference lengths over all of them is taken.
pub fn ell_rel(x: &ResidueSet, y: &ResidueSet) -> Result<RelCover> {
    if x.card() < 2 {
        return Err(Error::Usage("ell_X(Y) needs |X| >= 2".into()));
    }
    if y.is_empty() {
        return Err(Error::Usage("ell_X(Y) needs Y nonempty".into()));
    }
    if x.group() != y.group() {
        return Err(Error::Usage("ell_X(Y) needs X, Y over the same group".into()));
    }
    let p = x.group().p();
    let ell_x = ell(x)?.ell;
    let mut best: Option<RelCover> = None;
    for d in 1..=(p - 1) / 2 {
        if ell_fixed_difference(x, d)?.0 != ell_x {
            continue;
        }
        let (len, _) = ell_fixed_difference(y, d)?;
        if best.map_or(true, |b| len < b.len) {
            best = Some(RelCover { len, d });
        }
    }
    Ok(best.unwrap())
}

/// Exact density `(|X|-1)/ell(X)`.
pub fn density(x: &ResidueSet) -> Result<Ratio<u64>> {
    if x.card() < 2 {
        return Err(Error::Usage("density needs |X| >= 2".into()));
    }
    Ok(ell(x)?.rho.unwrap())
}

/// Rectifiability criterion: pass iff `ell_A(S) + ell(A) <= p`.
pub fn rectifiable_pair(a: &ResidueSet, s: &ResidueSet) -> Result<Verdict> {
    let rel = ell_rel(a, s)?;
    let ell_a = ell(a)?.ell;
    let p = a.group().p();
    let witness = json!({
        "ell_rel": rel.len,
        "d": rel.d,
        "ell_a": ell_a,
        "p": p,
    });
    if rel.len + ell_a <= p {
        Ok(Verdict::pass(
            "rectifiable-pair",
            witness,
            format!("ell_A(S)+ell(A) = {} + {} <= p = {}", rel.len, ell_a, p),
        ))
    } else {
        Ok(Verdict::fail(
            "rectifiable-pair",
            witness,
            format!("ell_A(S)+ell(A) = {} + {} > p = {}", rel.len, ell_a, p),
        ))
    }
}
