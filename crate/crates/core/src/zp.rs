//! Subsets of `Z/pZ` stored as membership bitmasks, with bit-parallel
//! sumsets, affine maps, and canonical forms under the affine group.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// Moduli are capped so a mask never exceeds 128 KiB.
pub const MODULUS_CAP: u64 = 1 << 20;

/// `Z/pZ` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicGroup {
    p: u64,
}

impl CyclicGroup {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::Usage(format!("modulus {p} is not an odd prime >= 3")));
        }
        if p > MODULUS_CAP {
            return Err(Error::Usage(format!(
                "modulus {p} exceeds the build cap {MODULUS_CAP}"
            )));
        }
        if !is_prime(p) {
            return Err(Error::Usage(format!("modulus {p} is not prime")));
        }
        Ok(CyclicGroup { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Multiplicative inverse mod p (p prime, x != 0).
    pub fn inv(&self, x: u64) -> u64 {
        debug_assert!(x % self.p != 0);
        mod_pow(x % self.p, self.p - 2, self.p)
    }
}

/// Deterministic trial division; moduli are capped well below 2^32.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// The map `x -> a*x + b` on `Z/pZ`, with `a != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineMap {
    pub a: u64,
    pub b: u64,
}

impl AffineMap {
    pub fn new(group: CyclicGroup, a: u64, b: u64) -> Result<Self> {
        if a % group.p() == 0 {
            return Err(Error::Usage("affine multiplier must be nonzero mod p".into()));
        }
        Ok(AffineMap { a: a % group.p(), b: b % group.p() })
    }

    #[inline]
    pub fn apply(&self, group: CyclicGroup, x: u64) -> u64 {
        ((self.a as u128 * x as u128 + self.b as u128) % group.p() as u128) as u64
    }
}

/// A subset of `Z/pZ`: membership bitmask (bit `i` = residue `i`,
/// little-end-first in 64-bit words) plus a cached cardinality.
#[derive(Debug, Clone)]
pub struct ResidueSet {
    group: CyclicGroup,
    words: Vec<u64>,
    card: u64,
}

impl PartialEq for ResidueSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.words == other.words
    }
}
impl Eq for ResidueSet {}

fn word_len(p: u64) -> usize {
    ((p + 63) / 64) as usize
}

fn mask_top(words: &mut [u64], p: u64) {
    let rem = (p % 64) as u32;
    if rem != 0 {
        let last = words.len() - 1;
        words[last] &= (1u64 << rem) - 1;
    }
}

/// dst |= src << s (word-level; bits falling off the top are dropped).
fn or_shl(dst: &mut [u64], src: &[u64], s: usize) {
    let (o, r) = (s / 64, (s % 64) as u32);
    for i in 0..src.len() {
        let j = i + o;
        if j < dst.len() {
            dst[j] |= src[i] << r;
        }
        if r != 0 && j + 1 < dst.len() {
            dst[j + 1] |= src[i] >> (64 - r);
        }
    }
}

/// dst |= src >> s.
fn or_shr(dst: &mut [u64], src: &[u64], s: usize) {
    let (o, r) = (s / 64, (s % 64) as u32);
    for i in 0..dst.len() {
        let j = i + o;
        if j < src.len() {
            dst[i] |= src[j] >> r;
            if r != 0 && j + 1 < src.len() {
                dst[i] |= src[j + 1] << (64 - r);
            }
        }
    }
}

/// dst |= (src rotated by s within p bits). Bits >= p in the last word of
/// dst may become dirty and must be cleared by the caller via `mask_top`.
fn or_rot(dst: &mut [u64], src: &[u64], s: u64, p: u64) {
    let s = (s % p) as usize;
    if s == 0 {
        for (d, w) in dst.iter_mut().zip(src) {
            *d |= *w;
        }
    } else {
        or_shl(dst, src, s);
        or_shr(dst, src, p as usize - s);
    }
}

impl ResidueSet {
    pub fn empty(group: CyclicGroup) -> Self {
        ResidueSet { group, words: vec![0; word_len(group.p())], card: 0 }
    }

    pub fn full(group: CyclicGroup) -> Self {
        let mut words = vec![!0u64; word_len(group.p())];
        mask_top(&mut words, group.p());
        ResidueSet { group, words, card: group.p() }
    }

    pub fn from_elems<I: IntoIterator<Item = u64>>(group: CyclicGroup, elems: I) -> Self {
        let mut s = Self::empty(group);
        for e in elems {
            s.insert(e % group.p());
        }
        s
    }

    /// Build from a u64 membership mask; only valid when `p <= 64`.
    pub fn from_u64_mask(group: CyclicGroup, mask: u64) -> Self {
        assert!(group.p() <= 64);
        let m = if group.p() == 64 { mask } else { mask & ((1u64 << group.p()) - 1) };
        ResidueSet { group, words: vec![m], card: m.count_ones() as u64 }
    }

    pub fn to_u64_mask(&self) -> u64 {
        assert!(self.group.p() <= 64);
        self.words[0]
    }

    fn insert(&mut self, x: u64) {
        let (w, b) = ((x / 64) as usize, x % 64);
        if self.words[w] & (1 << b) == 0 {
            self.words[w] |= 1 << b;
            self.card += 1;
        }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        let x = x % self.group.p();
        self.words[(x / 64) as usize] & (1 << (x % 64)) != 0
    }

    #[inline]
    pub fn card(&self) -> u64 {
        self.card
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn elems(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.card as usize);
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as u64;
                out.push(i as u64 * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            std::iter::successors(Some(w), |w| Some(w & w.wrapping_sub(1)))
                .take_while(|&w| w != 0)
                .map(move |w| i as u64 * 64 + w.trailing_zeros() as u64)
        })
    }

    /// `{x + s : x in self}`.
    pub fn rotated(&self, s: u64) -> Self {
        let p = self.group.p();
        let s = s % p;
        if s == 0 {
            return self.clone();
        }
        let mut words = vec![0u64; self.words.len()];
        or_rot(&mut words, &self.words, s, p);
        mask_top(&mut words, p);
        ResidueSet { group: self.group, words, card: self.card }
    }

    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_top(&mut words, self.group.p());
        let card = self.group.p() - self.card;
        ResidueSet { group: self.group, words, card }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection_card(&self, other: &Self) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    /// Ordering by the smallest residue on which the two sets differ; the
    /// set containing it is the smaller one.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let t = (a ^ b).trailing_zeros();
                return if a >> t & 1 == 1 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        self.recount();
    }

    fn recount(&mut self) {
        self.card = self.words.iter().map(|w| w.count_ones() as u64).sum();
    }
}

fn check_same_group(a: &ResidueSet, b: &ResidueSet) -> Result<()> {
    if a.group() != b.group() {
        return Err(Error::Usage(format!(
            "mismatched moduli: {} vs {}",
            a.group().p(),
            b.group().p()
        )));
    }
    Ok(())
}

/// `S + T = {s + t mod p}`, as a union of cyclic rotations of the larger
/// operand's mask by each element of the smaller one.
pub fn sumset(s: &ResidueSet, t: &ResidueSet) -> Result<ResidueSet> {
    check_same_group(s, t)?;
    if s.is_empty() || t.is_empty() {
        return Err(Error::Usage("sumset operands must be nonempty".into()));
    }
    let (driver, other) = if s.card() <= t.card() { (s, t) } else { (t, s) };
    let p = s.group().p();
    let mut out = ResidueSet::empty(s.group());
    for e in driver.iter() {
        or_rot(&mut out.words, &other.words, e, p);
    }
    mask_top(&mut out.words, p);
    out.recount();
    Ok(out)
}

/// `kS`, computed by binary doubling of masks.
pub fn iterated_sumset(s: &ResidueSet, k: u64) -> Result<ResidueSet> {
    if k == 0 {
        return Err(Error::Usage("iterated sumset needs k >= 1".into()));
    }
    if s.is_empty() {
        return Err(Error::Usage("iterated sumset of the empty set".into()));
    }
    let mut k = k;
    let mut base = s.clone();
    let mut acc: Option<ResidueSet> = None;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => sumset(&a, &base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = sumset(&base, &base)?;
    }
    Ok(acc.unwrap())
}

/// `{a*s + b mod p : s in S}`; cardinality preserved.
pub fn apply_affine(s: &ResidueSet, f: AffineMap) -> ResidueSet {
    let g = s.group();
    let mut out = ResidueSet::empty(g);
    for x in s.iter() {
        out.insert(f.apply(g, x));
    }
    out
}

/// Lexicographically least bitmask among all `p(p-1)` affine images of `S`,
/// together with one map achieving it. Exhausts the whole affine group.
pub fn canonical_form(s: &ResidueSet) -> (ResidueSet, AffineMap) {
    let p = s.group().p();
    let mut best = s.clone();
    let mut best_map = AffineMap { a: 1, b: 0 };
    for a in 1..p {
        for b in 0..p {
            let f = AffineMap { a, b };
            let img = apply_affine(s, f);
            if img.lex_cmp(&best) == Ordering::Less {
                best = img;
                best_map = f;
            }
        }
    }
    (best, best_map)
}

// ---------------------------------------------------------------------------
// u64 fast path (p <= 63), used by the exhaustive survey and atom scans.
// ---------------------------------------------------------------------------

#[inline]
pub fn rot_u64(mask: u64, s: u64, p: u64) -> u64 {
    let s = s % p;
    if s == 0 {
        mask
    } else {
        ((mask << s) | (mask >> (p - s))) & ((1u64 << p) - 1)
    }
}

#[inline]
pub fn sumset_u64(s: u64, t: u64, p: u64) -> u64 {
    let mut out = 0u64;
    let mut m = s;
    while m != 0 {
        let e = m.trailing_zeros() as u64;
        out |= rot_u64(t, e, p);
        m &= m - 1;
    }
    out
}

pub fn affine_image_u64(mask: u64, p: u64, a: u64, b: u64) -> u64 {
    let mut img = 0u64;
    let mut m = mask;
    while m != 0 {
        let x = m.trailing_zeros() as u64;
        img |= 1 << ((a * x + b) % p);
        m &= m - 1;
    }
    img
}

/// Mask order matching `ResidueSet::lex_cmp`.
#[inline]
pub fn lex_less_u64(x: u64, y: u64) -> bool {
    if x == y {
        return false;
    }
    let t = (x ^ y).trailing_zeros();
    x >> t & 1 == 1
}

/// Is `mask` the lex-least element of its affine orbit?
pub fn is_canonical_u64(mask: u64, p: u64) -> bool {
    debug_assert!(mask != 0 && p <= 63);
    // Cheap rejects: a canonical set contains 0, and 1 as soon as |S| >= 2.
    if mask & 1 == 0 {
        return false;
    }
    if mask.count_ones() >= 2 && mask & 2 == 0 {
        return false;
    }
    for a in 1..p {
        for b in 0..p {
            if a == 1 && b == 0 {
                continue;
            }
            let img = affine_image_u64(mask, p, a, b);
            if lex_less_u64(img, mask) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Set literals: `p:e1,e2,...` or `p:xHEX` (hex of the membership mask,
// bit i = residue i).
// ---------------------------------------------------------------------------

pub fn parse_set_literal(s: &str) -> Result<ResidueSet> {
    let (p_str, body) = s
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("bad set literal {s:?}: expected p:elems")))?;
    let p: u64 = p_str
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("bad modulus in set literal {s:?}")))?;
    let group = CyclicGroup::new(p)?;
    let body = body.trim();
    if let Some(hex) = body.strip_prefix('x').or_else(|| body.strip_prefix('X')) {
        let mut set = ResidueSet::empty(group);
        // Hex digits are most-significant first.
        for (k, ch) in hex.chars().rev().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Usage(format!("bad hex digit {ch:?} in {s:?}")))?;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let bit = 4 * k as u64 + b;
                    if bit >= p {
                        return Err(Error::Usage(format!(
                            "hex mask in {s:?} sets bit {bit} >= p={p}"
                        )));
                    }
                    set.insert(bit);
                }
            }
        }
        Ok(set)
    } else {
        let mut set = ResidueSet::empty(group);
        for tok in body.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let e: u64 = tok
                .parse()
                .map_err(|_| Error::Usage(format!("bad element {tok:?} in {s:?}")))?;
            set.insert(e % p);
        }
        Ok(set)
    }
}

/// List form when `|S| <= 64`, hex mask form otherwise.
pub fn format_set_literal(s: &ResidueSet) -> String {
    let p = s.group().p();
    if s.card() <= 64 {
        let elems: Vec<String> = s.iter().map(|e| e.to_string()).collect();
        format!("{p}:{}", elems.join(","))
    } else {
        let mut hex = String::new();
        let nibbles = (p as usize + 3) / 4;
        for k in (0..nibbles).rev() {
            let mut v = 0u32;
            for b in 0..4 {
                let bit = 4 * k as u64 + b;
                if bit < p && s.contains(bit) {
                    v |= 1 << b;
                }
            }
            hex.push(char::from_digit(v, 16).unwrap());
        }
        format!("{p}:x{hex}")
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_set_literal(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn set(p: u64, elems: &[u64]) -> ResidueSet {
        ResidueSet::from_elems(CyclicGroup::new(p).unwrap(), elems.iter().copied())
    }

    #[test]
    fn group_rejects_bad_moduli() {
        assert!(CyclicGroup::new(2).is_err());
        assert!(CyclicGroup::new(9).is_err());
        assert!(CyclicGroup::new(15).is_err());
        assert!(CyclicGroup::new(1 << 21).is_err());
        assert!(CyclicGroup::new(13).is_ok());
    }

    #[test]
    fn sumset_small_examples() {
        // p=5, {0,1}+{0,1} = {0,1,2}
        let s = set(5, &[0, 1]);
        let r = sumset(&s, &s).unwrap();
        assert_eq!(r.elems(), vec![0, 1, 2]);

        // p=7, {0,2,4}+{0,2,4} = {0,1,2,4,6}
        let s = set(7, &[0, 2, 4]);
        let r = sumset(&s, &s).unwrap();
        assert_eq!(r.elems(), vec![0, 1, 2, 4, 6]);
        assert_eq!(r.card(), 5);
    }

    #[test]
    fn sumset_extremal_13() {
        // p=13, S={0,3,4,5,6,7}: 2S = Z/13 minus {2}; checked against the
        // pairwise-sum oracle.
        let s = set(13, &[0, 3, 4, 5, 6, 7]);
        let r = sumset(&s, &s).unwrap();
        assert_eq!(r.card(), 12);
        assert!(!r.contains(2));
        assert_eq!(r, oracle::naive_sumset(&s, &s));
    }

    #[test]
    fn iterated_sumset_examples() {
        let s = set(11, &[0, 1]);
        assert_eq!(iterated_sumset(&s, 1).unwrap(), s);
        assert_eq!(iterated_sumset(&s, 3).unwrap().elems(), vec![0, 1, 2, 3]);
        let s = set(13, &[0, 3, 4, 5, 6, 7]);
        assert_eq!(iterated_sumset(&s, 2).unwrap(), oracle::naive_sumset(&s, &s));
        assert!(iterated_sumset(&s, 0).is_err());
    }

    #[test]
    fn affine_examples() {
        let s = set(7, &[0, 1, 3]);
        let id = AffineMap { a: 1, b: 0 };
        assert_eq!(apply_affine(&s, id), s);
        let f = AffineMap { a: 2, b: 0 };
        assert_eq!(apply_affine(&s, f).elems(), vec![0, 2, 6]);
        let t = AffineMap { a: 1, b: 4 };
        assert_eq!(apply_affine(&s, t).elems(), vec![0, 4, 5]);
        assert!(AffineMap::new(CyclicGroup::new(7).unwrap(), 7, 1).is_err());
    }

    #[test]
    fn canonical_form_examples() {
        let s = set(7, &[0]);
        assert_eq!(canonical_form(&s).0.elems(), vec![0]);
        let s = set(5, &[1, 3]);
        assert_eq!(canonical_form(&s).0.elems(), vec![0, 1]);
        // canonical_form is constant on the orbit and idempotent:
        // {0,2,6} = 2*{0,1,3} and {1,2,4} = {0,1,3}+1
        let s = set(7, &[0, 2, 6]);
        let t = set(7, &[1, 2, 4]);
        let (cs, f) = canonical_form(&s);
        let (ct, _) = canonical_form(&t);
        assert_eq!(cs, ct);
        assert_eq!(apply_affine(&s, f), cs);
        assert_eq!(canonical_form(&cs).0, cs);
    }

    #[test]
    fn literal_roundtrip() {
        let s = parse_set_literal("13:0,3,4,5,6,7").unwrap();
        assert_eq!(s.elems(), vec![0, 3, 4, 5, 6, 7]);
        assert_eq!(format_set_literal(&s), "13:0,3,4,5,6,7");
        let h = parse_set_literal("13:xf9").unwrap();
        assert_eq!(h.elems(), vec![0, 3, 4, 5, 6, 7]);
        assert!(parse_set_literal("12:0,1").is_err());
        assert!(parse_set_literal("13:x4000").is_err()); // bit >= p
    }

    #[test]
    fn u64_fast_path_matches_generic() {
        let g = CyclicGroup::new(23).unwrap();
        for (ma, mb) in [(0b1011u64, 0b1_0000_0001u64), (0x7fffff, 1), (0b110, 0b101)] {
            let a = ResidueSet::from_u64_mask(g, ma);
            let b = ResidueSet::from_u64_mask(g, mb);
            assert_eq!(sumset(&a, &b).unwrap().to_u64_mask(), sumset_u64(ma, mb, 23));
        }
    }

    #[test]
    fn multiword_rotation_and_sumset() {
        let g = CyclicGroup::new(101).unwrap();
        let s = ResidueSet::from_elems(g, [0, 1, 63, 64, 65, 100]);
        let r = s.rotated(1);
        assert_eq!(r.elems(), vec![0, 1, 2, 64, 65, 66]);
        assert_eq!(r.card(), 6);
        let t = ResidueSet::from_elems(g, [0, 50, 99]);
        assert_eq!(sumset(&s, &t).unwrap(), oracle::naive_sumset(&s, &t));
    }
}
