//! k-separability, isoperimetric numbers `kappa_k(S)`, k-fragments and
//! k-atoms, and the atom lemma checkers.
//!
//! Exhaustive scans fix `0 in X` (translation invariance) and run on u64
//! masks, which is why the exhaustive budget stays below word size.

use crate::verdict::Verdict;
use crate::zp::{self, ResidueSet};
use crate::{exhaustive_cap, Error, Result};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;

/// Listing cap for atoms/fragments inside reports; counts stay exact.
pub const LIST_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "cap")]
pub enum SearchMode {
    Exhaustive,
    Bounded(u64),
}

/// Result of a `kappa_k` search.
///
/// `atoms` lists one representative per translation class (the lex-least
/// translate, which contains 0), capped at [`LIST_CAP`]; `atom_count` and
/// `fragments_sampled` count the 0-containing atoms / fragments exactly.
#[derive(Debug, Clone)]
pub struct AtomReport {
    pub k: u64,
    pub separable: bool,
    pub kappa: Option<u64>,
    pub atom_card: Option<u64>,
    pub atoms: Vec<ResidueSet>,
    pub atom_count: u64,
    pub fragments_sampled: u64,
    pub mode: SearchMode,
}

impl AtomReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "k": self.k,
            "separable": self.separable,
            "kappa": self.kappa,
            "atom_card": self.atom_card,
            "atoms": self.atoms.iter().map(zp::format_set_literal).collect::<Vec<_>>(),
            "atom_count": self.atom_count,
            "fragments_sampled": self.fragments_sampled,
            "mode": self.mode,
        })
    }
}

fn require_small(s: &ResidueSet, what: &str) -> Result<u64> {
    let p = s.group().p();
    let cap = exhaustive_cap().min(63);
    if p > cap {
        return Err(Error::Resource(format!(
            "{what} is exhaustive and limited to p <= {cap} (set DOUBLING_EXHAUSTIVE_CAP to raise)"
        )));
    }
    Ok(p)
}

fn check_preconditions(s: &ResidueSet, k: u64) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Usage("S must be nonempty".into()));
    }
    if !s.contains(0) {
        return Err(Error::Usage("S must contain 0 (translate it first)".into()));
    }
    if k == 0 {
        return Err(Error::Usage("k must be >= 1".into()));
    }
    if k > s.group().p() {
        return Err(Error::Usage(format!("k = {k} exceeds p = {}", s.group().p())));
    }
    Ok(())
}

/// Does some `X` with `|X| >= k` and `|X+S| <= p-k` exist?
pub fn is_k_separable(s: &ResidueSet, k: u64) -> Result<bool> {
    check_preconditions(s, k)?;
    let p = require_small(s, "k-separability search")?;
    let sm = s.to_u64_mask();
    // 0 in X by translation invariance.
    for m in 0..1u64 << (p - 1) {
        let x = (m << 1) | 1;
        if (x.count_ones() as u64) < k {
            continue;
        }
        let xs = zp::sumset_u64(x, sm, p);
        if (xs.count_ones() as u64) <= p - k {
            return Ok(true);
        }
    }
    Ok(false)
}

struct Scan {
    kappa: Option<u64>,
    atom_card: u64,
    atoms: Vec<u64>,
    atom_count: u64,
    fragments: u64,
}

impl Scan {
    fn new() -> Self {
        Scan { kappa: None, atom_card: 0, atoms: Vec::new(), atom_count: 0, fragments: 0 }
    }

    fn visit(&mut self, x: u64, boundary: u64) {
        let card = x.count_ones() as u64;
        match self.kappa {
            Some(k) if boundary > k => return,
            Some(k) if boundary == k => {
                self.fragments += 1;
                if card < self.atom_card {
                    self.atom_card = card;
                    self.atoms.clear();
                    self.atom_count = 0;
                }
                if card == self.atom_card {
                    self.atom_count += 1;
                    if self.atoms.len() < 4 * LIST_CAP {
                        self.atoms.push(x);
                    }
                }
            }
            _ => {
                self.kappa = Some(boundary);
                self.fragments = 1;
                self.atom_card = card;
                self.atoms = vec![x];
                self.atom_count = 1;
            }
        }
    }
}

/// Lex-least cyclic translate of a mask; canonical per translation class.
fn canonical_translate(mask: u64, p: u64) -> u64 {
    let mut best = mask;
    for s in 1..p {
        let r = zp::rot_u64(mask, s, p);
        if zp::lex_less_u64(r, best) {
            best = r;
        }
    }
    best
}

/// `kappa_k(S)` with the set of minimizers.
///
/// Exhaustive mode enumerates every `X` containing 0 with `|X| >= k` and
/// `|X+S| <= p-k`; bounded mode additionally restricts `|X|` to the given
/// cap and is marked non-exhaustive. A non-separable `S` yields a report
/// with `separable = false` rather than an error.
pub fn kappa_report(s: &ResidueSet, k: u64, mode: SearchMode) -> Result<AtomReport> {
    check_preconditions(s, k)?;
    let p = require_small(s, "kappa search")?;
    let sm = s.to_u64_mask();
    let mut scan = Scan::new();
    match mode {
        SearchMode::Exhaustive => {
            for m in 0..1u64 << (p - 1) {
                let x = (m << 1) | 1;
                if (x.count_ones() as u64) < k {
                    continue;
                }
                let xs = zp::sumset_u64(x, sm, p);
                if (xs.count_ones() as u64) <= p - k {
                    scan.visit(x, (xs.count_ones() - x.count_ones()) as u64);
                }
            }
        }
        SearchMode::Bounded(cap) => {
            // Grow X element by element; |X+S| only grows, so branches whose
            // partial sumset already exceeds p-k are pruned.
            fn rec(
                scan: &mut Scan,
                p: u64,
                sm: u64,
                k: u64,
                cap: u64,
                next: u64,
                x: u64,
                xs: u64,
            ) {
                let card = x.count_ones() as u64;
                let xs_card = xs.count_ones() as u64;
                if xs_card > p - k {
                    return;
                }
                if card >= k {
                    scan.visit(x, xs_card - card);
                }
                if card == cap {
                    return;
                }
                for e in next..p {
                    rec(scan, p, sm, k, cap, e + 1, x | 1 << e, xs | zp::rot_u64(sm, e, p));
                }
            }
            if cap < k.max(1) {
                return Err(Error::Usage(format!("bounded cap {cap} is below k = {k}")));
            }
            rec(&mut scan, p, sm, k, cap, 1, 1, sm);
        }
    }
    let group = s.group();
    let report = match scan.kappa {
        None => AtomReport {
            k,
            separable: false,
            kappa: None,
            atom_card: None,
            atoms: Vec::new(),
            atom_count: 0,
            fragments_sampled: 0,
            mode,
        },
        Some(kappa) => {
            let mut reps = BTreeSet::new();
            for &a in &scan.atoms {
                reps.insert(canonical_translate(a, p));
                if reps.len() >= LIST_CAP {
                    break;
                }
            }
            AtomReport {
                k,
                separable: true,
                kappa: Some(kappa),
                atom_card: Some(scan.atom_card),
                atoms: reps
                    .into_iter()
                    .map(|m| ResidueSet::from_u64_mask(group, m))
                    .collect(),
                atom_count: scan.atom_count,
                fragments_sampled: scan.fragments,
                mode,
            }
        }
    };
    Ok(report)
}

/// All fragments of `S` for the given `k`, over every position (not just
/// those containing 0). Used by the lemma checkers.
fn all_fragments(s: &ResidueSet, k: u64, kappa: u64) -> Vec<u64> {
    let p = s.group().p();
    let sm = s.to_u64_mask();
    let mut out = Vec::new();
    for x in 1u64..1 << p {
        if (x.count_ones() as u64) < k {
            continue;
        }
        let xs = zp::sumset_u64(x, sm, p);
        if (xs.count_ones() as u64) <= p - k && (xs.count_ones() - x.count_ones()) as u64 == kappa {
            out.push(x);
        }
    }
    out
}

/// Lemma: a k-atom `A` and a k-fragment `F` with `A` not contained in `F`
/// intersect in at most `k-1` elements.
pub fn check_intersection_property(s: &ResidueSet, k: u64) -> Result<Verdict> {
    const ID: &str = "atom-intersection";
    let report = kappa_report(s, k, SearchMode::Exhaustive)?;
    if !report.separable {
        return Ok(Verdict::not_applicable(
            ID,
            json!({"set": zp::format_set_literal(s), "k": k}),
            format!("S is not {k}-separable"),
        ));
    }
    let kappa = report.kappa.unwrap();
    let fragments = all_fragments(s, k, kappa);
    let atom_card = fragments.iter().map(|f| f.count_ones() as u64).min().unwrap();
    let atoms: Vec<u64> =
        fragments.iter().copied().filter(|f| f.count_ones() as u64 == atom_card).collect();
    if atoms.len() as u64 * fragments.len() as u64 > 200_000_000 {
        return Err(Error::Resource(format!(
            "{} atoms x {} fragments exceeds the pair budget",
            atoms.len(),
            fragments.len()
        )));
    }
    let group = s.group();
    for &a in &atoms {
        for &f in &fragments {
            if a & !f == 0 {
                continue; // A is contained in F
            }
            let inter = (a & f).count_ones() as u64;
            if inter > k - 1 {
                return Ok(Verdict::fail(
                    ID,
                    json!({
                        "set": zp::format_set_literal(s),
                        "k": k,
                        "kappa": kappa,
                        "atom": zp::format_set_literal(&ResidueSet::from_u64_mask(group, a)),
                        "fragment": zp::format_set_literal(&ResidueSet::from_u64_mask(group, f)),
                        "intersection": inter,
                    }),
                    format!("|A ∩ F| = {inter} > k-1 = {}", k - 1),
                ));
            }
        }
    }
    Ok(Verdict::pass(
        ID,
        json!({
            "set": zp::format_set_literal(s),
            "k": k,
            "kappa": kappa,
            "atoms": atoms.len(),
            "fragments": fragments.len(),
        }),
        format!("|A ∩ F| <= {} over {} atoms x {} fragments", k - 1, atoms.len(), fragments.len()),
    ))
}

/// Atom size bounds with `m := kappa_k(S) - |S|`: every 2-atom has
/// `|A| <= m+3` (needs `|S| >= 3`), every k-atom with `k >= 3` has
/// `|A| <= 2m+k+2` (needs `|S| >= 2`).
pub fn check_atom_size_bounds(s: &ResidueSet, k: u64) -> Result<Verdict> {
    const ID: &str = "atom-size-bound";
    let base = json!({"set": zp::format_set_literal(s), "k": k});
    if k == 1 {
        return Ok(Verdict::not_applicable(ID, base, "no size bound is stated for k = 1"));
    }
    if k == 2 && s.card() < 3 {
        return Ok(Verdict::not_applicable(ID, base, "k = 2 bound needs |S| >= 3"));
    }
    if k >= 3 && s.card() < 2 {
        return Ok(Verdict::not_applicable(ID, base, "k >= 3 bound needs |S| >= 2"));
    }
    let report = kappa_report(s, k, SearchMode::Exhaustive)?;
    if !report.separable {
        return Ok(Verdict::not_applicable(ID, base, format!("S is not {k}-separable")));
    }
    let kappa = report.kappa.unwrap() as i64;
    let m = kappa - s.card() as i64;
    let bound = if k == 2 { m + 3 } else { 2 * m + k as i64 + 2 };
    let atom_card = report.atom_card.unwrap() as i64;
    let witness = json!({
        "set": zp::format_set_literal(s),
        "k": k,
        "kappa": kappa,
        "m": m,
        "bound": bound,
        "atom_card": atom_card,
        "atom": report.atoms.first().map(zp::format_set_literal),
    });
    if atom_card <= bound {
        Ok(Verdict::pass(witness_id(k), witness, format!("|A| = {atom_card} <= {bound}")))
    } else {
        Ok(Verdict::fail(witness_id(k), witness, format!("|A| = {atom_card} > {bound}")))
    }
}

fn witness_id(k: u64) -> &'static str {
    if k == 2 { "atom-size-bound-2" } else { "atom-size-bound-k" }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::verdict::Status;
    use crate::zp::CyclicGroup;

    fn set(p: u64, elems: &[u64]) -> ResidueSet {
        ResidueSet::from_elems(CyclicGroup::new(p).unwrap(), elems.iter().copied())
    }

    #[test]
    fn separability_examples() {
        assert!(is_k_separable(&set(7, &[0]), 1).unwrap());
        let full = ResidueSet::full(CyclicGroup::new(7).unwrap());
        assert!(!is_k_separable(&full, 1).unwrap());
        // direct search decides the p=13 example
        let s = set(13, &[0, 3, 4, 5, 6, 7]);
        let by_scan = oracle::brute_kappa(&s, 3).is_some();
        assert_eq!(is_k_separable(&s, 3).unwrap(), by_scan);
    }

    #[test]
    fn kappa_examples() {
        // p=7, S={0,1}, k=1: kappa=1, atoms are singletons
        let r = kappa_report(&set(7, &[0, 1]), 1, SearchMode::Exhaustive).unwrap();
        assert!(r.separable);
        assert_eq!(r.kappa, Some(1));
        assert_eq!(r.atom_card, Some(1));

        // p=11, S={0,1,2}, k=2: kappa=2, atoms are the translates of {0,1}
        let r = kappa_report(&set(11, &[0, 1, 2]), 2, SearchMode::Exhaustive).unwrap();
        assert_eq!(r.kappa, Some(2));
        assert_eq!(r.atom_card, Some(2));
        assert_eq!(r.atoms.len(), 1); // one translation class
        assert_eq!(r.atoms[0].elems(), vec![0, 1]);

        // S={0}: kappa=0, atoms are all k-subsets
        let r = kappa_report(&set(11, &[0]), 3, SearchMode::Exhaustive).unwrap();
        assert_eq!(r.kappa, Some(0));
        assert_eq!(r.atom_card, Some(3));
    }

    #[test]
    fn kappa_matches_brute_oracle() {
        for p in [7u64, 11] {
            let g = CyclicGroup::new(p).unwrap();
            for mask in 0..1u64 << (p - 1) {
                let s_mask = (mask << 1) | 1;
                if s_mask.count_ones() > 4 {
                    continue;
                }
                let s = ResidueSet::from_u64_mask(g, s_mask);
                for k in 1..=3 {
                    let r = kappa_report(&s, k, SearchMode::Exhaustive).unwrap();
                    match oracle::brute_kappa(&s, k) {
                        None => assert!(!r.separable),
                        Some((kappa, card)) => {
                            assert_eq!(r.kappa, Some(kappa), "p={p} S={s} k={k}");
                            assert_eq!(r.atom_card, Some(card), "p={p} S={s} k={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bounded_mode_is_sound() {
        let s = set(13, &[0, 1, 3]);
        for k in 1..=3 {
            let ex = kappa_report(&s, k, SearchMode::Exhaustive).unwrap();
            let bd = kappa_report(&s, k, SearchMode::Bounded(4)).unwrap();
            if let (Some(a), Some(b)) = (ex.kappa, bd.kappa) {
                assert!(b >= a);
            }
        }
    }

    #[test]
    fn intersection_property_examples() {
        let v = check_intersection_property(&set(11, &[0, 1, 2]), 2).unwrap();
        assert_eq!(v.status, Status::Pass);
        let v = check_intersection_property(&set(11, &[0]), 2).unwrap();
        assert_eq!(v.status, Status::Pass);
    }

    #[test]
    fn size_bound_examples() {
        // p=11, S={0,1,2}, k=2: kappa=2, m=-1, atoms {x,x+1}: 2 <= m+3 = 2
        let v = check_atom_size_bounds(&set(11, &[0, 1, 2]), 2).unwrap();
        assert_eq!(v.status, Status::Pass);
        let v = check_atom_size_bounds(&set(11, &[0, 1, 2]), 3).unwrap();
        assert_eq!(v.status, Status::Pass);
        let v = check_atom_size_bounds(&set(11, &[0, 1, 2]), 1).unwrap();
        assert_eq!(v.status, Status::NotApplicable);
    }

    #[test]
    fn translate_closure() {
        // X is a k-atom iff x+X is: the canonical-translate dedup relies on
        // it; verify by direct enumeration.
        let s = set(11, &[0, 1, 3]);
        let k = 2;
        let r = kappa_report(&s, k, SearchMode::Exhaustive).unwrap();
        let kappa = r.kappa.unwrap();
        let frags = all_fragments(&s, k, kappa);
        let atom_card = frags.iter().map(|f| f.count_ones()).min().unwrap();
        let atoms: Vec<u64> =
            frags.iter().copied().filter(|f| f.count_ones() == atom_card).collect();
        for &a in &atoms {
            for t in 0..11 {
                assert!(atoms.contains(&zp::rot_u64(a, t, 11)));
            }
        }
    }
}
