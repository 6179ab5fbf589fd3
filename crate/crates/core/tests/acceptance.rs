//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: ...` line (visible with `--nocapture`; failures abort the
//! test regardless).

use doubling::theorems::{self, PlunneckeMode};
use doubling::verdict::Status;
use doubling::zint::IntSet;
use doubling::zp::{self, CyclicGroup, ResidueSet};
use doubling::{ap, atoms, audit, oracle, survey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn check(n: u32, ok: bool, what: &str) {
    println!("criterion {n}: {} — {what}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {what}");
}

fn survey_cfg(kind: survey::SurveyKind, p: Vec<u64>, out: std::path::PathBuf) -> survey::SurveyConfig {
    survey::SurveyConfig {
        kind,
        p_list: p,
        mode: survey::Mode::Exhaustive,
        size_min: None,
        size_max: None,
        jobs: 4,
        checkpoint: None,
        out,
        stop_after_blocks: None,
    }
}

fn random_residue_set(rng: &mut ChaCha8Rng, group: CyclicGroup) -> ResidueSet {
    let p = group.p();
    let mut elems: Vec<u64> = (0..p).filter(|_| rng.gen_bool(0.5)).collect();
    if elems.is_empty() {
        elems.push(rng.gen_range(0..p));
    }
    ResidueSet::from_elems(group, elems)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn criterion_01_conjecture_survey() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let cfg = survey_cfg(
        survey::SurveyKind::Conjecture,
        vec![5, 7, 11, 13, 17, 19],
        dir.path().join("conjecture.jsonl"),
    );
    let out = survey::run_survey(&cfg).unwrap();
    let elapsed = started.elapsed();
    let violations: u64 = out.totals.values().map(|c| c.violations).sum();
    let tight_ok = out.totals.iter().all(|(&p, c)| p < 7 || c.tight > 0);
    check(
        1,
        out.complete && violations == 0 && tight_ok && elapsed.as_secs() < 60,
        &format!(
            "conjecture survey p<=19: {violations} violations, tight cases present, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
#[ignore = "optional long run (~minutes); criterion 1's p=23 clause"]
fn criterion_01_conjecture_survey_p23() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let cfg = survey_cfg(
        survey::SurveyKind::Conjecture,
        vec![23],
        dir.path().join("conjecture23.jsonl"),
    );
    let out = survey::run_survey(&cfg).unwrap();
    let violations: u64 = out.totals.values().map(|c| c.violations).sum();
    check(
        1,
        out.complete && violations == 0 && started.elapsed().as_secs() < 1800,
        &format!("p=23 exhaustive: {violations} violations, {:.0}s", started.elapsed().as_secs_f64()),
    );
}

#[test]
fn criterion_02_extremal_family() {
    let started = Instant::now();
    let mut instances = 0u64;
    for p in (13..=499).filter(|&p| is_prime(p)) {
        let mut m = -1i64;
        while 2 * m + 6 <= ((p + 1) / 2) as i64 {
            // identities are asserted inside the constructor
            let inst = survey::extremal_family(p, m).unwrap();
            assert_eq!(inst.card_two_s as i64, p as i64 - (m + 1));
            instances += 1;
            m += 1;
        }
    }
    let p13 = survey::extremal_family(13, 0).unwrap();
    let elapsed = started.elapsed();
    check(
        2,
        p13.ell_s == 8 && instances > 0 && elapsed.as_secs() < 10,
        &format!("{instances} extremal instances over 13 <= p <= 499, {:.1}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_03_atom_lemma_suite() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let cfg = survey_cfg(
        survey::SurveyKind::AtomLemmas { k_max: 5 },
        vec![5, 7, 11, 13],
        dir.path().join("atoms.jsonl"),
    );
    let out = survey::run_survey(&cfg).unwrap();
    let violations: u64 = out.totals.values().map(|c| c.violations).sum();
    let checks: u64 = out.totals.values().map(|c| c.checks).sum();
    check(
        3,
        out.complete && violations == 0 && checks > 0 && started.elapsed().as_secs() < 900,
        &format!(
            "atom lemmas p<=13, k<=5: {checks} checks, {violations} violations, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_04_cauchy_davenport() {
    let primes: Vec<u64> = (7..=101).filter(|&p| is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let started = Instant::now();
    for _ in 0..100_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let g = CyclicGroup::new(p).unwrap();
        let s = random_residue_set(&mut rng, g);
        let t = random_residue_set(&mut rng, g);
        let v = theorems::cauchy_davenport_check(&s, &t).unwrap();
        assert_eq!(v.status, Status::Pass, "p={p} S={s} T={t}");
    }
    let elapsed = started.elapsed();
    check(
        4,
        elapsed.as_secs() < 5,
        &format!("10^5 random pairs, zero violations, {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_05_freiman_3k4_exhaustive() {
    let started = Instant::now();
    let mut applicable = 0u64;
    for mask in 0u32..1 << 13 {
        if mask.count_ones() < 3 {
            continue;
        }
        let s = IntSet::new((0..13).filter(|&i| mask >> i & 1 == 1).map(i64::from)).unwrap();
        let v = theorems::freiman_3k4_int(&s).unwrap();
        assert_ne!(v.status, Status::Fail, "S={}", s.format());
        if v.status == Status::Pass {
            applicable += 1;
        }
    }
    let elapsed = started.elapsed();
    check(
        5,
        applicable > 0 && elapsed.as_secs() < 10,
        &format!(
            "all S in [0,12], |S| >= 3: {applicable} applicable, zero violations, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_lev_smelianski() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut applicable = 0u64;
    let mut attempts = 0u64;
    while applicable < 10_000 {
        attempts += 1;
        assert!(attempts < 5_000_000, "not enough applicable pairs");
        let draw = |rng: &mut ChaCha8Rng| {
            let mut v: Vec<i64> = (0..=20).filter(|_| rng.gen_bool(0.5)).collect();
            if v.is_empty() {
                v.push(rng.gen_range(0..=20));
            }
            IntSet::new(v).unwrap()
        };
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let v = theorems::lev_smelianski_check(&x, &y);
        match v.status {
            Status::NotApplicable => {}
            Status::Pass => applicable += 1,
            Status::Fail => panic!("violation: X={} Y={} — {}", x.format(), y.format(), v.message),
        }
    }
    check(6, true, &format!("10^4 applicable pairs in [0,20], zero violations ({attempts} draws)"));
}

#[test]
fn criterion_07_plunnecke_witness() {
    let primes = [7u64, 11, 13, 17, 19, 23, 29, 31];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let g = CyclicGroup::new(p).unwrap();
        let draw = |rng: &mut ChaCha8Rng| {
            let card = rng.gen_range(1..=8.min(p));
            let mut elems = std::collections::BTreeSet::new();
            while (elems.len() as u64) < card {
                elems.insert(rng.gen_range(0..p));
            }
            ResidueSet::from_elems(g, elems)
        };
        let s = draw(&mut rng);
        let t = draw(&mut rng);
        let j = rng.gen_range(1..=3);
        let r = theorems::plunnecke_witness(&s, &t, j, PlunneckeMode::Exhaustive).unwrap();
        assert_eq!(r.verdict.status, Status::Pass, "instance {i}: p={p} S={s} T={t} j={j}");
    }
    check(7, true, "10^3 exhaustive witness searches, a witness with ratio <= c^j in every instance");
}

#[test]
fn criterion_08_density_lemma() {
    let primes = [29u64, 31, 37, 41, 53, 61, 71, 83, 97, 101];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut satisfied = 0u64;
    let mut attempts = 0u64;
    while satisfied < 10_000 {
        attempts += 1;
        assert!(attempts < 5_000_000, "not enough precondition-satisfying instances");
        let p = primes[rng.gen_range(0..primes.len())];
        let g = CyclicGroup::new(p).unwrap();
        let c_len = rng.gen_range(2..=6u64);
        let t = rng.gen_range(1..=(p / (2 * c_len)).min(4).max(1));
        if 2 * t * c_len >= p {
            continue;
        }
        // C: subset of [0, c) containing 0 and c-1
        let mut c_elems = vec![0, c_len - 1];
        for e in 1..c_len - 1 {
            if rng.gen_bool(0.6) {
                c_elems.push(e);
            }
        }
        let c = ResidueSet::from_elems(g, c_elems);
        // B: one point per interval I_1..I_2t plus random extras
        let mut b_elems = Vec::new();
        for i in 0..2 * t {
            b_elems.push(i * c_len + rng.gen_range(0..c_len));
        }
        for e in 0..p {
            if rng.gen_bool(0.2) {
                b_elems.push(e);
            }
        }
        let b = ResidueSet::from_elems(g, b_elems);
        let v = theorems::density_lemma_check(&b, &c, t).unwrap();
        match v.status {
            Status::NotApplicable => {}
            Status::Pass => satisfied += 1,
            Status::Fail => panic!("violation: B={b} C={c} t={t} — {}", v.message),
        }
    }
    check(8, true, &format!("10^4 precondition-satisfying instances, zero violations ({attempts} draws)"));
}

#[test]
fn criterion_09_numeric_audit() {
    let items = audit::audit_all(32);
    let doubled = audit::audit_all(64);
    let stable = items
        .iter()
        .zip(&doubled)
        .all(|(a, b)| a.status == b.status);
    let item3 = items.iter().find(|i| i.id == "c1-chain").unwrap();
    let m = item3.margin.value();
    let window = m > &num_rational::BigRational::new(486.into(), 1000.into())
        && m < &num_rational::BigRational::new(487.into(), 1000.into());
    let failing: Vec<&str> =
        items.iter().filter(|i| i.status != Status::Pass).map(|i| i.id).collect();
    check(
        9,
        failing.is_empty() && window && stable,
        &format!(
            "8 audit items (failing: {failing:?}), c1-chain margin in [0.486, 0.487]: {window}, precision-stable: {stable}"
        ),
    );
}

#[test]
fn criterion_10_oracle_equivalence() {
    let primes: Vec<u64> = (5..=101).filter(|&p| is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // bit-parallel sumset vs naive
    for _ in 0..10_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let g = CyclicGroup::new(p).unwrap();
        let s = random_residue_set(&mut rng, g);
        let t = random_residue_set(&mut rng, g);
        assert_eq!(zp::sumset(&s, &t).unwrap(), oracle::naive_sumset(&s, &t));
    }
    // ell vs brute AP cover
    let small: Vec<u64> = primes.iter().copied().filter(|&p| p <= 17).collect();
    for _ in 0..1000 {
        let p = small[rng.gen_range(0..small.len())];
        let g = CyclicGroup::new(p).unwrap();
        let x = random_residue_set(&mut rng, g);
        let cover = ap::ell(&x).unwrap();
        assert_eq!(cover.ell, oracle::brute_ell(&x), "X={x}");
        assert!(cover.witness.covers(&x));
    }
    // kappa_report vs independent subset scan
    for p in [5u64, 7, 11] {
        let g = CyclicGroup::new(p).unwrap();
        for idx in 0..1u64 << (p - 1) {
            let mask = (idx << 1) | 1;
            if mask.count_ones() > 4 {
                continue;
            }
            let s = ResidueSet::from_u64_mask(g, mask);
            for k in 1..=3 {
                let r = atoms::kappa_report(&s, k, atoms::SearchMode::Exhaustive).unwrap();
                match oracle::brute_kappa(&s, k) {
                    None => assert!(!r.separable),
                    Some((kappa, card)) => {
                        assert_eq!(r.kappa, Some(kappa));
                        assert_eq!(r.atom_card, Some(card));
                    }
                }
            }
        }
    }
    check(10, true, "sumset (10^4), ell (10^3), and kappa (exhaustive small) all match their oracles");
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    // jobs 1 vs 8
    let mut cfg = survey_cfg(survey::SurveyKind::Conjecture, vec![19], dir.path().join("j1.jsonl"));
    cfg.jobs = 1;
    survey::run_survey(&cfg).unwrap();
    cfg.jobs = 8;
    cfg.out = dir.path().join("j8.jsonl");
    survey::run_survey(&cfg).unwrap();
    let j1 = std::fs::read(dir.path().join("j1.jsonl")).unwrap();
    let j8 = std::fs::read(dir.path().join("j8.jsonl")).unwrap();
    // kill at 50% (1 of 2 blocks) and resume
    let mut cfg2 = survey_cfg(survey::SurveyKind::Conjecture, vec![19], dir.path().join("resumed.jsonl"));
    cfg2.checkpoint = Some(dir.path().join("ck.json"));
    cfg2.stop_after_blocks = Some(1);
    let partial = survey::run_survey(&cfg2).unwrap();
    assert!(!partial.complete);
    cfg2.stop_after_blocks = None;
    let resumed = survey::run_survey(&cfg2).unwrap();
    assert!(resumed.complete);
    let r = std::fs::read(dir.path().join("resumed.jsonl")).unwrap();
    check(
        11,
        j1 == j8 && j1 == r,
        "byte-identical reports across jobs {1,8} and across kill/resume at 50%",
    );
}
