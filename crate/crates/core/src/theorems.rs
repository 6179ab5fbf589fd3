//! Executable checkers for the classical sumset statements: the small-prime
//! doubling conjecture, Cauchy-Davenport, Freiman 3k-4 over `Z`,
//! Lev-Smelianski, BLR, Pluennecke-Ruzsa witnesses, the density lemma, and
//! the Freiman-in-`Z/pZ` hypothesis checker.
//!
//! Every comparison that the verdict depends on is exact (integer or
//! rational); no floating point is consulted.

use crate::ap;
use crate::verdict::Verdict;
use crate::zint::{self, IntSet};
use crate::zp::{self, ResidueSet};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_rational::Ratio;
use serde_json::json;

/// Doubling data for one set: `m := |2S| - 2|S|` (signed), the cover
/// length, and where the set stands relative to the conjectured range
/// `-1 <= m <= min(|S|-4, p-|2S|-3)`.
#[derive(Debug, Clone)]
pub struct DoublingProfile {
    pub set: ResidueSet,
    pub two_s: ResidueSet,
    pub m: i64,
    pub ell_s: u64,
    pub in_conjecture_range: bool,
    pub tight: bool,
}

impl DoublingProfile {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "set": zp::format_set_literal(&self.set),
            "two_s": zp::format_set_literal(&self.two_s),
            "card": self.set.card(),
            "card_two_s": self.two_s.card(),
            "m": self.m,
            "ell_s": self.ell_s,
            "in_conjecture_range": self.in_conjecture_range,
            "tight": self.tight,
        })
    }
}

pub fn doubling_profile(s: &ResidueSet) -> Result<DoublingProfile> {
    if s.is_empty() {
        return Err(Error::Usage("doubling profile needs |S| >= 1".into()));
    }
    let p = s.group().p() as i64;
    let two_s = zp::sumset(s, s)?;
    let m = two_s.card() as i64 - 2 * s.card() as i64;
    let ell_s = ap::ell(s)?.ell;
    let upper = (s.card() as i64 - 4).min(p - two_s.card() as i64 - 3);
    let in_range = -1 <= m && m <= upper;
    let tight = ell_s as i64 == s.card() as i64 + m + 1;
    Ok(DoublingProfile { set: s.clone(), two_s, m, ell_s, in_conjecture_range: in_range, tight })
}

/// Small-doubling cover conjecture: for in-range `S`,
/// `ell(S) <= |S| + m + 1`. Out-of-range sets get not-applicable naming the
/// violated bound.
pub fn conjecture_verdict(s: &ResidueSet) -> Result<(DoublingProfile, Verdict)> {
    const ID: &str = "conjecture";
    let prof = doubling_profile(s)?;
    let p = s.group().p() as i64;
    let witness = prof.to_json();
    let verdict = if !prof.in_conjecture_range {
        let msg = if prof.m < -1 {
            format!("m = {} < -1", prof.m)
        } else if prof.m > s.card() as i64 - 4 {
            format!("m = {} > |S|-4 = {}", prof.m, s.card() as i64 - 4)
        } else {
            format!("m = {} > p-|2S|-3 = {}", prof.m, p - prof.two_s.card() as i64 - 3)
        };
        Verdict::not_applicable(ID, witness, msg)
    } else {
        let bound = s.card() as i64 + prof.m + 1;
        if (prof.ell_s as i64) <= bound {
            let tightness = if prof.tight { " (tight)" } else { "" };
            Verdict::pass(ID, witness, format!("ell(S) = {} <= {bound}{tightness}", prof.ell_s))
        } else {
            Verdict::fail(ID, witness, format!("ell(S) = {} > {bound}", prof.ell_s))
        }
    };
    Ok((prof, verdict))
}

/// `|S+T| >= min(p, |S|+|T|-1)`.
pub fn cauchy_davenport_check(s: &ResidueSet, t: &ResidueSet) -> Result<Verdict> {
    const ID: &str = "cauchy-davenport";
    let st = zp::sumset(s, t)?;
    let p = s.group().p();
    let bound = p.min(s.card() + t.card() - 1);
    let witness = json!({
        "s": zp::format_set_literal(s),
        "t": zp::format_set_literal(t),
        "card_sum": st.card(),
        "bound": bound,
    });
    if st.card() >= bound {
        Ok(Verdict::pass(ID, witness, format!("|S+T| = {} >= {bound}", st.card())))
    } else {
        Ok(Verdict::fail(ID, witness, format!("|S+T| = {} < {bound}", st.card())))
    }
}

/// Freiman 3k-4 over `Z`: `|2S| <= 3|S|-4` implies
/// `ell_int(S) <= |2S|-|S|+1`.
pub fn freiman_3k4_int(s: &IntSet) -> Result<Verdict> {
    const ID: &str = "freiman-3k4-int";
    if s.card() < 3 {
        return Err(Error::Usage("Freiman 3k-4 needs |S| >= 3".into()));
    }
    let two_s = zint::sumset_int(s, s);
    let witness = json!({
        "s": s.format(),
        "card": s.card(),
        "card_two_s": two_s.card(),
        "ell_int": zint::ell_int(s),
    });
    if two_s.card() > 3 * s.card() - 4 {
        return Ok(Verdict::not_applicable(
            ID,
            witness,
            format!("|2S| = {} > 3|S|-4 = {}", two_s.card(), 3 * s.card() - 4),
        ));
    }
    let bound = two_s.card() - s.card() + 1;
    let ell = zint::ell_int(s);
    if ell <= bound {
        Ok(Verdict::pass(ID, witness, format!("ell(S) = {ell} <= |2S|-|S|+1 = {bound}")))
    } else {
        Ok(Verdict::fail(ID, witness, format!("ell(S) = {ell} > |2S|-|S|+1 = {bound}")))
    }
}

/// Lev-Smelianski: with `mu = |X+Y|-|X|-|Y|`, if `mu <= min(|X|,|Y|)-3` and
/// one of the sets has size at least `mu+4`, then both sets lie in APs of
/// lengths `|X|+mu+1` and `|Y|+mu+1`.
pub fn lev_smelianski_check(x: &IntSet, y: &IntSet) -> Verdict {
    const ID: &str = "lev-smelianski";
    let xy = zint::sumset_int(x, y);
    let mu = xy.card() as i64 - x.card() as i64 - y.card() as i64;
    let witness = json!({
        "x": x.format(),
        "y": y.format(),
        "mu": mu,
        "ell_x": zint::ell_int(x),
        "ell_y": zint::ell_int(y),
    });
    let min_card = x.card().min(y.card()) as i64;
    let max_card = x.card().max(y.card()) as i64;
    if mu > min_card - 3 {
        return Verdict::not_applicable(
            ID,
            witness,
            format!("mu = {mu} > min(|X|,|Y|)-3 = {}", min_card - 3),
        );
    }
    if max_card < mu + 4 {
        return Verdict::not_applicable(
            ID,
            witness,
            format!("max(|X|,|Y|) = {max_card} < mu+4 = {}", mu + 4),
        );
    }
    let bx = x.card() as i64 + mu + 1;
    let by = y.card() as i64 + mu + 1;
    let (ex, ey) = (zint::ell_int(x) as i64, zint::ell_int(y) as i64);
    if ex <= bx && ey <= by {
        Verdict::pass(ID, witness, format!("ell(X) = {ex} <= {bx} and ell(Y) = {ey} <= {by}"))
    } else {
        Verdict::fail(ID, witness, format!("ell(X) = {ex} vs {bx}, ell(Y) = {ey} vs {by}"))
    }
}

/// BLR: `|X| <= log_4 p` implies `ell(X) < p/2`. Applicability is the
/// exact integer condition `4^|X| <= p`.
pub fn blr_check(x: &ResidueSet) -> Result<Verdict> {
    const ID: &str = "blr";
    if x.is_empty() {
        return Err(Error::Usage("BLR needs |X| >= 1".into()));
    }
    let p = x.group().p();
    let witness_base = json!({"x": zp::format_set_literal(x), "card": x.card(), "p": p});
    // p < 2^21, so |X| >= 11 always exceeds log_4 p here.
    let applicable = x.card() <= 10 && 1u64 << (2 * x.card()) <= p;
    if !applicable {
        return Ok(Verdict::not_applicable(
            ID,
            witness_base,
            format!("|X| = {} > log_4 p (4^|X| > {p})", x.card()),
        ));
    }
    let ell = ap::ell(x)?.ell;
    let witness = json!({"x": zp::format_set_literal(x), "card": x.card(), "p": p, "ell": ell});
    if 2 * ell < p {
        Ok(Verdict::pass(ID, witness, format!("ell(X) = {ell} < p/2")))
    } else {
        Ok(Verdict::fail(ID, witness, format!("ell(X) = {ell} >= p/2")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlunneckeMode {
    Exhaustive,
    Greedy,
}

/// Largest `|S|` for which every nonempty subset is scanned.
pub const PLUNNECKE_CAP: u64 = 18;

#[derive(Debug, Clone)]
pub struct PlunneckeResult {
    pub witness_set: String,
    pub ratio: Ratio<u64>,
    pub verdict: Verdict,
}

fn ratio_le_power(num: u64, den: u64, base_num: u64, base_den: u64, j: u32) -> bool {
    // num/den <= (base_num/base_den)^j
    BigUint::from(num) * BigUint::from(base_den).pow(j)
        <= BigUint::from(base_num).pow(j) * BigUint::from(den)
}

/// Pluennecke-Ruzsa witness over `Z/pZ`: find nonempty `S' ⊆ S` with
/// `|S'+jT| <= c^j |S'|` where `c = |S+T|/|S|`.
pub fn plunnecke_witness(
    s: &ResidueSet,
    t: &ResidueSet,
    j: u64,
    mode: PlunneckeMode,
) -> Result<PlunneckeResult> {
    const ID: &str = "plunnecke";
    if j == 0 {
        return Err(Error::Usage("Pluennecke-Ruzsa needs j >= 1".into()));
    }
    if j > 20 {
        return Err(Error::Resource("j > 20 is outside the supported range".into()));
    }
    if s.is_empty() || t.is_empty() {
        return Err(Error::Usage("Pluennecke-Ruzsa needs nonempty S, T".into()));
    }
    if s.group() != t.group() {
        return Err(Error::Usage("S and T must share a modulus".into()));
    }
    let st_card = zp::sumset(s, t)?.card();
    let jt = zp::iterated_sumset(t, j)?;
    let elems = s.elems();
    let rots: Vec<ResidueSet> = elems.iter().map(|&e| jt.rotated(e)).collect();
    let eval = |included: &[usize]| -> (u64, u64) {
        let mut acc = ResidueSet::empty(s.group());
        for &i in included {
            acc.union_with(&rots[i]);
        }
        (acc.card(), included.len() as u64)
    };
    search(ID, s.card(), st_card, j as u32, mode, eval, |included| {
        zp::format_set_literal(&ResidueSet::from_elems(
            s.group(),
            included.iter().map(|&i| elems[i]),
        ))
    })
}

/// Pluennecke-Ruzsa witness over `Z`.
pub fn plunnecke_witness_int(
    s: &IntSet,
    t: &IntSet,
    j: u64,
    mode: PlunneckeMode,
) -> Result<PlunneckeResult> {
    const ID: &str = "plunnecke-int";
    if j == 0 {
        return Err(Error::Usage("Pluennecke-Ruzsa needs j >= 1".into()));
    }
    if j > 20 {
        return Err(Error::Resource("j > 20 is outside the supported range".into()));
    }
    let st_card = zint::sumset_int(s, t).card();
    let jt = zint::iterated_sumset_int(t, j)?;
    let elems: Vec<i64> = s.elems().to_vec();
    let elems_ref = &elems;
    let eval = |included: &[usize]| -> (u64, u64) {
        let mut sum: Vec<i64> = included
            .iter()
            .flat_map(|&i| jt.elems().iter().map(move |&x| x + elems_ref[i]))
            .collect();
        sum.sort_unstable();
        sum.dedup();
        (sum.len() as u64, included.len() as u64)
    };
    search(ID, s.card(), st_card, j as u32, mode, eval, |included| {
        IntSet::new(included.iter().map(|&i| elems[i])).unwrap().format()
    })
}

/// Shared subset search: `eval` maps a set of element indices to
/// `(|S'+jT|, |S'|)`.
fn search(
    id: &'static str,
    s_card: u64,
    st_card: u64,
    j: u32,
    mode: PlunneckeMode,
    eval: impl Fn(&[usize]) -> (u64, u64),
    show: impl Fn(&[usize]) -> String,
) -> Result<PlunneckeResult> {
    let n = s_card as usize;
    let full: Vec<usize> = (0..n).collect();
    let (mut best_num, mut best_den) = eval(&full);
    let mut best_set = full.clone();
    let better =
        |num: u64, den: u64, bn: u64, bd: u64| (num as u128) * (bd as u128) < (bn as u128) * (den as u128);
    let exhaustive = match mode {
        PlunneckeMode::Exhaustive => {
            if s_card > PLUNNECKE_CAP {
                return Err(Error::Resource(format!(
                    "|S| = {s_card} exceeds the exhaustive cap {PLUNNECKE_CAP}; use greedy mode"
                )));
            }
            let mut included = Vec::with_capacity(n);
            fn rec(
                idx: usize,
                n: usize,
                included: &mut Vec<usize>,
                best: &mut (u64, u64, Vec<usize>),
                eval: &impl Fn(&[usize]) -> (u64, u64),
                better: &impl Fn(u64, u64, u64, u64) -> bool,
            ) {
                if idx == n {
                    if !included.is_empty() {
                        let (num, den) = eval(included);
                        if better(num, den, best.0, best.1) {
                            *best = (num, den, included.clone());
                        }
                    }
                    return;
                }
                included.push(idx);
                rec(idx + 1, n, included, best, eval, better);
                included.pop();
                rec(idx + 1, n, included, best, eval, better);
            }
            let mut best = (best_num, best_den, best_set.clone());
            rec(0, n, &mut included, &mut best, &eval, &better);
            (best_num, best_den, best_set) = best;
            true
        }
        PlunneckeMode::Greedy => {
            // Repeatedly drop the element whose removal lowers the ratio most.
            let mut cur = full;
            loop {
                if cur.len() == 1 {
                    break;
                }
                let mut improved: Option<(u64, u64, usize)> = None;
                for drop in 0..cur.len() {
                    let cand: Vec<usize> = cur
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != drop)
                        .map(|(_, &e)| e)
                        .collect();
                    let (num, den) = eval(&cand);
                    let (bn, bd) = improved.map_or((best_num, best_den), |(a, b, _)| (a, b));
                    if better(num, den, bn, bd) {
                        improved = Some((num, den, drop));
                    }
                }
                match improved {
                    None => break,
                    Some((num, den, drop)) => {
                        cur.remove(drop);
                        best_num = num;
                        best_den = den;
                        best_set = cur.clone();
                    }
                }
            }
            false
        }
    };
    let ok = ratio_le_power(best_num, best_den, st_card, s_card, j);
    let witness = json!({
        "witness": show(&best_set),
        "ratio": [best_num, best_den],
        "c": [st_card, s_card],
        "j": j,
        "exhaustive": exhaustive,
    });
    let msg = format!("|S'+jT|/|S'| = {best_num}/{best_den} vs c^j = ({st_card}/{s_card})^{j}");
    let verdict = if ok {
        Verdict::pass(id, witness, msg)
    } else if exhaustive {
        Verdict::fail(id, witness, msg)
    } else {
        Verdict::not_applicable(id, witness, format!("greedy search inconclusive: {msg}"))
    };
    Ok(PlunneckeResult {
        witness_set: show(&best_set),
        ratio: Ratio::new(best_num, best_den.max(1)),
        verdict,
    })
}

/// Density lemma: with `C ⊆ [0,c)` containing 0, `c = ell(C)` realized at
/// difference 1, `B` meeting every interval `I_i = [(i-1)c, ic)` for
/// `i = 1..2t`, and `2tc < p`:
/// `|B+C| >= |B| + (t - 1/2)(|C|-1) - |B ∩ I|/2` with `I = [0, 2tc)`.
/// The comparison is the cleared integer form (both sides doubled).
pub fn density_lemma_check(b: &ResidueSet, c: &ResidueSet, t: u64) -> Result<Verdict> {
    const ID: &str = "density-lemma";
    if t == 0 {
        return Err(Error::Usage("density lemma needs t >= 1".into()));
    }
    if b.is_empty() || c.is_empty() {
        return Err(Error::Usage("density lemma needs nonempty B, C".into()));
    }
    if b.group() != c.group() {
        return Err(Error::Usage("B and C must share a modulus".into()));
    }
    let p = b.group().p();
    let base = json!({
        "b": zp::format_set_literal(b),
        "c": zp::format_set_literal(c),
        "t": t,
    });
    if !c.contains(0) {
        return Ok(Verdict::not_applicable(ID, base, "precondition failed: 0 not in C"));
    }
    let cc = ap::ell_fixed_difference(c, 1)?.0;
    let max_c = c.elems().into_iter().max().unwrap();
    if max_c + 1 != cc {
        return Ok(Verdict::not_applicable(
            ID,
            base,
            "precondition failed: C is not contained in [0, ell(C)) as residues",
        ));
    }
    if ap::ell(c)?.ell != cc {
        return Ok(Verdict::not_applicable(
            ID,
            base,
            "precondition failed: ell(C) is not realized with difference 1",
        ));
    }
    if 2 * cc >= p {
        return Ok(Verdict::not_applicable(ID, base, format!("precondition failed: 2 ell(C) = {} >= p", 2 * cc)));
    }
    if 2 * t * cc >= p {
        return Ok(Verdict::not_applicable(
            ID,
            base,
            format!("precondition failed: 2tc = {} >= p", 2 * t * cc),
        ));
    }
    for i in 1..=2 * t {
        if !((i - 1) * cc..i * cc).any(|x| b.contains(x)) {
            return Ok(Verdict::not_applicable(
                ID,
                base,
                format!("precondition failed: B misses I_{i} = [{}, {})", (i - 1) * cc, i * cc),
            ));
        }
    }
    let b_in_i = (0..2 * t * cc).filter(|&x| b.contains(x)).count() as i64;
    let bc = zp::sumset(b, c)?.card() as i64;
    let lhs = 2 * bc;
    let rhs = 2 * b.card() as i64 + (2 * t as i64 - 1) * (c.card() as i64 - 1) - b_in_i;
    let witness = json!({
        "b": zp::format_set_literal(b),
        "c": zp::format_set_literal(c),
        "t": t,
        "ell_c": cc,
        "card_bc": bc,
        "b_in_i": b_in_i,
        "rhs_doubled": rhs,
    });
    if lhs >= rhs {
        Ok(Verdict::pass(ID, witness, format!("2|B+C| = {lhs} >= {rhs}")))
    } else {
        Ok(Verdict::fail(ID, witness, format!("2|B+C| = {lhs} < {rhs}")))
    }
}

/// Parameters `(c0, c1)` for the Freiman theorem in `Z/pZ`; the constructor
/// enforces `0 < c0 <= 1/12`, `c1 > 2`, and the constraint
/// `(2c1-3)/3 < (1-c0 c1)/sqrt(c1)`, checked in the equivalent squared form
/// `((2c1-3)/3)^2 c1 < (1-c0 c1)^2` (both sides exact rationals).
#[derive(Debug, Clone, Copy)]
pub struct FreimanZpParams {
    pub c0: Ratio<u64>,
    pub c1: Ratio<u64>,
}

impl FreimanZpParams {
    pub fn new(c0: Ratio<u64>, c1: Ratio<u64>) -> Result<Self> {
        let r = |n: u64, d: u64| Ratio::<i128>::new(n as i128, d as i128);
        let c0i = r(*c0.numer(), *c0.denom());
        let c1i = r(*c1.numer(), *c1.denom());
        if c0i <= r(0, 1) || c0i > r(1, 12) {
            return Err(Error::Usage(format!("c0 = {c0} outside (0, 1/12]")));
        }
        if c1i <= r(2, 1) {
            return Err(Error::Usage(format!("c1 = {c1} must exceed 2")));
        }
        let a = (c1i * 2 - 3) / 3;
        let b = Ratio::from_integer(1) - c0i * c1i;
        if b <= Ratio::from_integer(0) || a * a * c1i >= b * b {
            return Err(Error::Usage(format!(
                "(c0, c1) = ({c0}, {c1}) violates (2c1-3)/3 < (1-c0 c1)/sqrt(c1)"
            )));
        }
        Ok(FreimanZpParams { c0, c1 })
    }
}

/// Freiman in `Z/pZ`: under `3 <= |S| <= c0 p` and `|2S| <= c1|S|-3`,
/// `ell(S) <= |2S|-|S|+1`.
pub fn freiman_zp_hypotheses(s: &ResidueSet, params: FreimanZpParams) -> Result<Verdict> {
    const ID: &str = "freiman-zp";
    let p = s.group().p();
    let two_s = zp::sumset(s, s)?;
    let witness = json!({
        "s": zp::format_set_literal(s),
        "card": s.card(),
        "card_two_s": two_s.card(),
        "c0": params.c0.to_string(),
        "c1": params.c1.to_string(),
    });
    if s.card() < 3 {
        return Ok(Verdict::not_applicable(ID, witness, format!("|S| = {} < 3", s.card())));
    }
    // |S| <= c0 p, exact cross-multiplication
    if (s.card() as u128) * *params.c0.denom() as u128 > *params.c0.numer() as u128 * p as u128 {
        return Ok(Verdict::not_applicable(
            ID,
            witness,
            format!("|S| = {} > c0 p = {} * {p}", s.card(), params.c0),
        ));
    }
    // |2S| <= c1|S| - 3  <=>  (|2S|+3) den <= num |S|
    if (two_s.card() as u128 + 3) * *params.c1.denom() as u128
        > *params.c1.numer() as u128 * s.card() as u128
    {
        return Ok(Verdict::not_applicable(
            ID,
            witness,
            format!("|2S| = {} > c1|S| - 3", two_s.card()),
        ));
    }
    let ell = ap::ell(s)?.ell;
    let bound = two_s.card() - s.card() + 1;
    if ell <= bound {
        let tight = if ell == bound { " (tight)" } else { "" };
        Ok(Verdict::pass(ID, witness, format!("ell(S) = {ell} <= |2S|-|S|+1 = {bound}{tight}")))
    } else {
        Ok(Verdict::fail(ID, witness, format!("ell(S) = {ell} > |2S|-|S|+1 = {bound}")))
    }
}
