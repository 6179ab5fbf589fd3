//! Finite sets of integers, for the `Z`-side statements (Freiman 3k-4,
//! Lev-Smelianski, Pluennecke-Ruzsa over `Z`).

use crate::{Error, Result};
use num_integer::Integer;

/// A nonempty finite set of integers, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet {
    elems: Vec<i64>,
}

impl IntSet {
    pub fn new<I: IntoIterator<Item = i64>>(elems: I) -> Result<Self> {
        let mut v: Vec<i64> = elems.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::Usage("integer set must be nonempty".into()));
        }
        Ok(IntSet { elems: v })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let e: i64 = tok
                .parse()
                .map_err(|_| Error::Usage(format!("bad integer {tok:?} in set literal")))?;
            v.push(e);
        }
        IntSet::new(v)
    }

    pub fn card(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn elems(&self) -> &[i64] {
        &self.elems
    }

    pub fn min(&self) -> i64 {
        self.elems[0]
    }

    pub fn max(&self) -> i64 {
        *self.elems.last().unwrap()
    }

    pub fn format(&self) -> String {
        let v: Vec<String> = self.elems.iter().map(|e| e.to_string()).collect();
        v.join(",")
    }
}

pub fn sumset_int(a: &IntSet, b: &IntSet) -> IntSet {
    let mut v = Vec::with_capacity(a.elems.len() * b.elems.len());
    for &x in &a.elems {
        for &y in &b.elems {
            v.push(x + y);
        }
    }
    IntSet::new(v).unwrap()
}

pub fn iterated_sumset_int(s: &IntSet, k: u64) -> Result<IntSet> {
    if k == 0 {
        return Err(Error::Usage("iterated sumset needs k >= 1".into()));
    }
    let mut acc = s.clone();
    for _ in 1..k {
        acc = sumset_int(&acc, s);
    }
    Ok(acc)
}

/// Minimal arithmetic-progression length over `Z`:
/// `(max - min)/g + 1` with `g` the gcd of all differences (1 for singletons).
pub fn ell_int(x: &IntSet) -> u64 {
    if x.elems.len() == 1 {
        return 1;
    }
    let base = x.elems[0];
    let mut g: i64 = 0;
    for &e in &x.elems[1..] {
        g = g.gcd(&(e - base));
    }
    ((x.max() - base) / g) as u64 + 1
}
