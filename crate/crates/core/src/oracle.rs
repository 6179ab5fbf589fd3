//! Independent brute-force reference implementations. These deliberately
//! share no code with the bit-parallel paths they are used to check.

use crate::zp::{CyclicGroup, ResidueSet};

/// Pairwise double-loop sumset.
pub fn naive_sumset(s: &ResidueSet, t: &ResidueSet) -> ResidueSet {
    let p = s.group().p();
    let mut member = vec![false; p as usize];
    for a in s.elems() {
        for b in t.elems() {
            member[((a + b) % p) as usize] = true;
        }
    }
    ResidueSet::from_elems(
        s.group(),
        member.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u64),
    )
}

/// Minimal AP cover length by trying every (start, difference, length)
/// triple directly.
pub fn brute_ell(x: &ResidueSet) -> u64 {
    let p = x.group().p();
    let elems = x.elems();
    'len: for len in x.card()..=p {
        for d in 1..p {
            for start in 0..p {
                let mut covered = vec![false; p as usize];
                for i in 0..len {
                    covered[((start + i * d) % p) as usize] = true;
                }
                if elems.iter().all(|&e| covered[e as usize]) {
                    return len;
                }
            }
        }
        if len == p {
            break 'len;
        }
    }
    p
}

/// Isoperimetric number by scanning every subset `X` of `Z/pZ` (not only
/// the translates containing 0), with naive sumsets. `p <= 25` expected.
/// Returns `None` when `S` is not k-separable, otherwise
/// `(kappa, minimal atom cardinality)`.
pub fn brute_kappa(s: &ResidueSet, k: u64) -> Option<(u64, u64)> {
    let p = s.group().p();
    assert!(p <= 25);
    let mut best: Option<(u64, u64)> = None;
    for mask in 1u64..(1 << p) {
        let x = ResidueSet::from_u64_mask(CyclicGroup::new(p).unwrap(), mask);
        if x.card() < k {
            continue;
        }
        let xs = naive_sumset(&x, s);
        if xs.card() > p - k {
            continue;
        }
        let boundary = xs.card() - x.card();
        best = Some(match best {
            None => (boundary, x.card()),
            Some((bb, bc)) => {
                if boundary < bb || (boundary == bb && x.card() < bc) {
                    (boundary, x.card())
                } else {
                    (bb, bc)
                }
            }
        });
    }
    best
}
