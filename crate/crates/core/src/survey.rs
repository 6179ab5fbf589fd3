//! Exhaustive and randomized sweeps over canonical subsets of `Z/pZ`:
//! conjecture verification, atom-lemma suites, equality-case hunts, the
//! extremal family, and the persistent JSONL reporting machinery.
//!
//! Determinism contract: report bytes are a function of the config (and
//! seed) only. Work is split into fixed blocks of mask indices; workers
//! compute blocks in parallel but results are committed strictly in block
//! order, so the job count never changes the output. Checkpoints record the
//! committed block count and byte offset, and resume refuses a config whose
//! hash differs.

use crate::theorems;
use crate::verdict::Status;
use crate::zp::{self, CyclicGroup, ResidueSet};
use crate::{atoms, exhaustive_cap, Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{Seek, SeekFrom, Write};
use std::path::PathBuf;

/// JSONL schema version emitted in the header row.
pub const REPORT_VERSION: u32 = 1;

/// Mask indices per checkpointable block.
pub const BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurveyKind {
    Conjecture,
    AtomLemmas { k_max: u64 },
    Hunt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SurveyConfig {
    pub kind: SurveyKind,
    pub p_list: Vec<u64>,
    pub mode: Mode,
    pub size_min: Option<u64>,
    pub size_max: Option<u64>,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub out: PathBuf,
    /// Test hook: stop (with a valid checkpoint) after committing this many
    /// blocks in the current invocation.
    pub stop_after_blocks: Option<u64>,
}

impl SurveyConfig {
    /// The part of the config that determines report content — job count
    /// and file paths are excluded so they can vary across resumes.
    pub fn hashable_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "p": self.p_list,
            "mode": self.mode,
            "size_min": self.size_min,
            "size_max": self.size_max,
            "exhaustive_cap": exhaustive_cap(),
        })
    }

    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.hashable_json()).unwrap();
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub classes: u64,
    pub pass: u64,
    pub tight: u64,
    pub not_applicable: u64,
    pub violations: u64,
    pub checks: u64,
}

impl Counters {
    fn add(&mut self, o: &Counters) {
        self.classes += o.classes;
        self.pass += o.pass;
        self.tight += o.tight;
        self.not_applicable += o.not_applicable;
        self.violations += o.violations;
        self.checks += o.checks;
    }
}

#[derive(Debug, Clone)]
pub struct SurveyOutcome {
    pub complete: bool,
    pub totals: BTreeMap<u64, Counters>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    config_hash: String,
    blocks_done: u64,
    bytes_written: u64,
    complete: bool,
    counters: BTreeMap<u64, Counters>,
}

/// Visit one representative (the canonical form) of every affine class of
/// nonempty subsets of `Z/pZ` matching the size filter; returns the count.
pub fn enumerate_canonical(
    p: u64,
    size_min: Option<u64>,
    size_max: Option<u64>,
    mut visitor: impl FnMut(&ResidueSet),
) -> Result<u64> {
    let cap = exhaustive_cap().min(63);
    if p > cap {
        return Err(Error::Resource(format!(
            "exhaustive enumeration is limited to p <= {cap}"
        )));
    }
    let group = CyclicGroup::new(p)?;
    let mut count = 0;
    for idx in 0..1u64 << (p - 1) {
        let mask = (idx << 1) | 1;
        let card = mask.count_ones() as u64;
        if size_min.map_or(false, |lo| card < lo) || size_max.map_or(false, |hi| card > hi) {
            continue;
        }
        if !zp::is_canonical_u64(mask, p) {
            continue;
        }
        count += 1;
        visitor(&ResidueSet::from_u64_mask(group, mask));
    }
    Ok(count)
}

/// Lex-least affine image of a u64 mask (the canonical class member).
pub fn canon_u64(mask: u64, p: u64) -> u64 {
    let mut best = u64::MAX;
    for a in 1..p {
        let img = zp::affine_image_u64(mask, p, a, 0);
        for b in 0..p {
            let cand = zp::rot_u64(img, b, p);
            if best == u64::MAX || zp::lex_less_u64(cand, best) {
                best = cand;
            }
        }
    }
    best
}

/// Per-set work: returns emitted rows and counter deltas.
fn handle_set(kind: SurveyKind, p: u64, mask: u64) -> Result<(Vec<Value>, Counters)> {
    let group = CyclicGroup::new(p)?;
    let set = ResidueSet::from_u64_mask(group, mask);
    let mut rows = Vec::new();
    let mut c = Counters { classes: 1, ..Counters::default() };
    match kind {
        SurveyKind::Conjecture => {
            let (prof, v) = theorems::conjecture_verdict(&set)?;
            c.checks += 1;
            match v.status {
                Status::Pass => {
                    c.pass += 1;
                    if prof.tight {
                        c.tight += 1;
                    }
                }
                Status::NotApplicable => c.not_applicable += 1,
                Status::Fail => {
                    c.violations += 1;
                    rows.push(json!({
                        "type": "violation",
                        "p": p,
                        "set": zp::format_set_literal(&set),
                        "statement_id": v.statement_id,
                        "card": set.card(),
                        "card_two_s": prof.two_s.card(),
                        "m": prof.m,
                        "ell": prof.ell_s,
                        "witness": v.witness,
                        "message": v.message,
                    }));
                }
            }
        }
        SurveyKind::Hunt => {
            let prof = theorems::doubling_profile(&set)?;
            c.checks += 1;
            if prof.in_conjecture_range && prof.tight {
                c.pass += 1;
                rows.push(json!({
                    "type": "equality",
                    "p": p,
                    "set": zp::format_set_literal(&set),
                    "card": set.card(),
                    "card_two_s": prof.two_s.card(),
                    "m": prof.m,
                    "ell": prof.ell_s,
                }));
            }
        }
        SurveyKind::AtomLemmas { k_max } => {
            for k in 2..=k_max.min(p) {
                let report = atoms::kappa_report(&set, k, atoms::SearchMode::Exhaustive)?;
                if !report.separable {
                    continue;
                }
                for v in [
                    atoms::check_intersection_property(&set, k)?,
                    atoms::check_atom_size_bounds(&set, k)?,
                ] {
                    c.checks += 1;
                    match v.status {
                        Status::Pass => c.pass += 1,
                        Status::NotApplicable => c.not_applicable += 1,
                        Status::Fail => {
                            c.violations += 1;
                            rows.push(json!({
                                "type": "violation",
                                "p": p,
                                "set": zp::format_set_literal(&set),
                                "statement_id": v.statement_id,
                                "k": k,
                                "card": set.card(),
                                "witness": v.witness,
                                "message": v.message,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok((rows, c))
}

fn run_block(cfg: &SurveyConfig, p: u64, start: u64, end: u64) -> Result<(Vec<Value>, Counters)> {
    let mut rows = Vec::new();
    let mut counters = Counters::default();
    match cfg.mode {
        Mode::Exhaustive => {
            for idx in start..end {
                let mask = (idx << 1) | 1;
                let card = mask.count_ones() as u64;
                if cfg.size_min.map_or(false, |lo| card < lo)
                    || cfg.size_max.map_or(false, |hi| card > hi)
                {
                    continue;
                }
                if !zp::is_canonical_u64(mask, p) {
                    continue;
                }
                let (r, c) = handle_set(cfg.kind, p, mask)?;
                rows.extend(r);
                counters.add(&c);
            }
        }
        Mode::Random { seed, .. } => {
            let full = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
            for i in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 40) ^ i);
                let mask = canon_u64((rng.next_u64() & full) | 1, p);
                let card = mask.count_ones() as u64;
                if cfg.size_min.map_or(false, |lo| card < lo)
                    || cfg.size_max.map_or(false, |hi| card > hi)
                {
                    continue;
                }
                let (r, c) = handle_set(cfg.kind, p, mask)?;
                rows.extend(r);
                counters.add(&c);
            }
        }
    }
    Ok((rows, counters))
}

struct Block {
    p: u64,
    start: u64,
    end: u64,
    last_of_p: bool,
}

fn plan_blocks(cfg: &SurveyConfig) -> Vec<Block> {
    let mut blocks = Vec::new();
    for &p in &cfg.p_list {
        let total = match cfg.mode {
            Mode::Exhaustive => 1u64 << (p - 1),
            Mode::Random { samples, .. } => samples,
        };
        let n = total.div_ceil(BLOCK_SIZE).max(1);
        for b in 0..n {
            blocks.push(Block {
                p,
                start: b * BLOCK_SIZE,
                end: total.min((b + 1) * BLOCK_SIZE),
                last_of_p: b + 1 == n,
            });
        }
    }
    blocks
}

fn validate(cfg: &SurveyConfig) -> Result<()> {
    let cap = exhaustive_cap().min(63);
    for &p in &cfg.p_list {
        CyclicGroup::new(p)?;
        if p > cap {
            return Err(Error::Resource(format!("p = {p} exceeds the exhaustive cap {cap}")));
        }
    }
    if let SurveyKind::AtomLemmas { k_max } = cfg.kind {
        if k_max < 2 {
            return Err(Error::Usage("atom-lemmas needs --k-max >= 2".into()));
        }
    }
    if let Mode::Random { samples, .. } = cfg.mode {
        if samples == 0 {
            return Err(Error::Usage("random mode needs samples >= 1".into()));
        }
    }
    Ok(())
}

fn append_line(file: &mut std::fs::File, bytes_written: &mut u64, row: &Value) -> Result<()> {
    let mut line = serde_json::to_string(row).map_err(|e| Error::Resource(e.to_string()))?;
    line.push('\n');
    file.write_all(line.as_bytes())?;
    *bytes_written += line.len() as u64;
    Ok(())
}

fn save_checkpoint(cfg: &SurveyConfig, ck: &Checkpoint) -> Result<()> {
    if let Some(path) = &cfg.checkpoint {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(ck).unwrap())?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(())
}

fn summary_row(p: u64, c: &Counters) -> Value {
    json!({
        "type": "summary",
        "p": p,
        "classes": c.classes,
        "checks": c.checks,
        "pass": c.pass,
        "tight": c.tight,
        "not_applicable": c.not_applicable,
        "violations": c.violations,
    })
}

/// Run a survey to completion (or to the `stop_after_blocks` test hook),
/// writing the JSONL report and maintaining the checkpoint.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyOutcome> {
    validate(cfg)?;
    let hash = cfg.config_hash();
    let blocks = plan_blocks(cfg);

    // Resume or start fresh.
    let mut state = match &cfg.checkpoint {
        Some(path) if path.exists() => {
            let raw = std::fs::read(path)?;
            let ck: Checkpoint = serde_json::from_slice(&raw)
                .map_err(|e| Error::Usage(format!("unreadable checkpoint: {e}")))?;
            if ck.config_hash != hash {
                return Err(Error::Usage(
                    "checkpoint was written by a different configuration; refusing to resume"
                        .into(),
                ));
            }
            ck
        }
        _ => Checkpoint {
            config_hash: hash.clone(),
            blocks_done: 0,
            bytes_written: 0,
            complete: false,
            counters: BTreeMap::new(),
        },
    };
    if state.complete {
        return Ok(SurveyOutcome { complete: true, totals: state.counters });
    }

    let mut file = if state.blocks_done == 0 && state.bytes_written == 0 {
        let mut f = std::fs::File::create(&cfg.out)?;
        let mut bytes = 0;
        append_line(
            &mut f,
            &mut bytes,
            &json!({
                "type": "header",
                "version": REPORT_VERSION,
                "config_hash": hash,
                "config": cfg.hashable_json(),
            }),
        )?;
        state.bytes_written = bytes;
        save_checkpoint(cfg, &state)?;
        f
    } else {
        // Drop any bytes from a block that was in flight when we stopped.
        let f = std::fs::OpenOptions::new().read(true).write(true).open(&cfg.out)?;
        f.set_len(state.bytes_written)?;
        let mut f = f;
        f.seek(SeekFrom::End(0))?;
        f
    };

    let jobs = cfg.jobs.max(1);
    let mut committed_this_run = 0u64;
    let mut idx = state.blocks_done as usize;
    while idx < blocks.len() {
        let chunk = &blocks[idx..blocks.len().min(idx + jobs)];
        let mut results: Vec<Option<Result<(Vec<Value>, Counters)>>> =
            (0..chunk.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for b in chunk {
                handles.push(scope.spawn(move || run_block(cfg, b.p, b.start, b.end)));
            }
            for (slot, h) in results.iter_mut().zip(handles) {
                *slot = Some(h.join().expect("survey worker panicked"));
            }
        });
        // Commit strictly in block order.
        for (b, res) in chunk.iter().zip(results) {
            let (rows, delta) = res.unwrap()?;
            for row in &rows {
                append_line(&mut file, &mut state.bytes_written, row)?;
            }
            state.counters.entry(b.p).or_default().add(&delta);
            if b.last_of_p {
                let row = summary_row(b.p, &state.counters[&b.p]);
                append_line(&mut file, &mut state.bytes_written, &row)?;
            }
            state.blocks_done += 1;
            committed_this_run += 1;
            save_checkpoint(cfg, &state)?;
            if cfg.stop_after_blocks == Some(committed_this_run)
                && (state.blocks_done as usize) < blocks.len()
            {
                file.flush()?;
                return Ok(SurveyOutcome { complete: false, totals: state.counters });
            }
        }
        idx += chunk.len();
    }

    let total_violations: u64 = state.counters.values().map(|c| c.violations).sum();
    append_line(
        &mut file,
        &mut state.bytes_written,
        &json!({
            "type": "footer",
            "complete": true,
            "blocks": state.blocks_done,
            "violations": total_violations,
        }),
    )?;
    file.flush()?;
    state.complete = true;
    save_checkpoint(cfg, &state)?;
    Ok(SurveyOutcome { complete: true, totals: state.counters })
}

/// The paper's extremal family `S = {0} ∪ {m+3, ..., (p+1)/2}`.
#[derive(Debug, Clone)]
pub struct ExtremalInstance {
    pub p: u64,
    pub m: i64,
    pub set: ResidueSet,
    pub card_two_s: u64,
    pub ell_s: u64,
}

impl ExtremalInstance {
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "m": self.m,
            "set": zp::format_set_literal(&self.set),
            "card": self.set.card(),
            "card_two_s": self.card_two_s,
            "ell_s": self.ell_s,
        })
    }
}

/// Construct and measure an extremal instance. Inside the validity window
/// the identities `|2S| = p-(m+1) = 2|S|+m` and `ell(S) >= |S|+m+2` hold
/// and are asserted.
///
/// The window requires `2m+6 <= (p+1)/2` (equivalently `p >= 4m+11`): at
/// the boundary `2m+6 = (p+3)/2` the doubling identity still holds but the
/// cover bound fails (e.g. p=13, m=1 has `ell(S) = |S|+m+1`), so the
/// constructor rejects it.
pub fn extremal_family(p: u64, m: i64) -> Result<ExtremalInstance> {
    let group = CyclicGroup::new(p)?;
    if m < -1 {
        return Err(Error::Usage(format!("extremal family needs m >= -1, got {m}")));
    }
    if m + 3 > ((p + 1) / 2) as i64 {
        return Err(Error::Usage(format!(
            "extremal family needs m+3 <= (p+1)/2: {} > {}",
            m + 3,
            (p + 1) / 2
        )));
    }
    if 2 * m + 6 > ((p + 1) / 2) as i64 {
        return Err(Error::Usage(format!(
            "extremal family needs 2m+6 <= (p+1)/2: {} > {}",
            2 * m + 6,
            (p + 1) / 2
        )));
    }
    let set = ResidueSet::from_elems(
        group,
        std::iter::once(0).chain((m + 3) as u64..=(p + 1) / 2),
    );
    let two_s = zp::sumset(&set, &set)?;
    let ell_s = crate::ap::ell(&set)?.ell;
    assert_eq!(two_s.card() as i64, p as i64 - (m + 1), "extremal doubling identity");
    assert_eq!(two_s.card() as i64, 2 * set.card() as i64 + m, "extremal doubling identity");
    assert!(
        ell_s as i64 >= set.card() as i64 + m + 2,
        "extremal cover bound failed at p={p}, m={m}"
    );
    Ok(ExtremalInstance { p, m, set, card_two_s: two_s.card(), ell_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn base_config(kind: SurveyKind, p: Vec<u64>, out: PathBuf) -> SurveyConfig {
        SurveyConfig {
            kind,
            p_list: p,
            mode: Mode::Exhaustive,
            size_min: None,
            size_max: None,
            jobs: 1,
            checkpoint: None,
            out,
            stop_after_blocks: None,
        }
    }

    #[test]
    fn canonical_counts_small() {
        // p=5: classes of sizes 1..5 are {0},{0,1},{0,1,2},{0,1,2,3},Z_5
        assert_eq!(enumerate_canonical(5, None, None, |_| {}).unwrap(), 5);
        assert_eq!(enumerate_canonical(7, Some(1), Some(1), |_| {}).unwrap(), 1);
        assert_eq!(enumerate_canonical(7, Some(2), Some(2), |_| {}).unwrap(), 1);
    }

    #[test]
    fn orbit_sizes_partition_the_power_set() {
        for p in [5u64, 7, 11, 13] {
            let mut total = 0u64;
            enumerate_canonical(p, None, None, |s| {
                let mask = s.to_u64_mask();
                let mut orbit = std::collections::BTreeSet::new();
                for a in 1..p {
                    let img = zp::affine_image_u64(mask, p, a, 0);
                    for b in 0..p {
                        orbit.insert(zp::rot_u64(img, b, p));
                    }
                }
                total += orbit.len() as u64;
            })
            .unwrap();
            assert_eq!(total, (1u64 << p) - 1, "p={p}");
        }
    }

    #[test]
    fn conjecture_survey_small() {
        let dir = tempdir().unwrap();
        let cfg = base_config(SurveyKind::Conjecture, vec![5, 13], dir.path().join("r.jsonl"));
        let out = run_survey(&cfg).unwrap();
        assert!(out.complete);
        for (&p, c) in &out.totals {
            assert_eq!(c.violations, 0, "p={p}");
        }
        // tight cases exist at p=13 (e.g. every AP class)
        assert!(out.totals[&13].tight > 0);
        let text = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
        let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["type"], "header");
        assert_eq!(first["version"], 1);
        let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(last["type"], "footer");
    }

    #[test]
    fn atom_survey_small() {
        let dir = tempdir().unwrap();
        let cfg = base_config(
            SurveyKind::AtomLemmas { k_max: 3 },
            vec![7],
            dir.path().join("r.jsonl"),
        );
        let out = run_survey(&cfg).unwrap();
        assert!(out.complete);
        assert_eq!(out.totals[&7].violations, 0);
        assert!(out.totals[&7].checks > 0);
    }

    #[test]
    fn hunt_includes_known_equality_case() {
        let dir = tempdir().unwrap();
        let cfg = base_config(SurveyKind::Hunt, vec![13], dir.path().join("r.jsonl"));
        run_survey(&cfg).unwrap();
        // {0,1,2,4}: m=0, in range, ell=5=|S|+1 — its canonical class is listed
        let g = CyclicGroup::new(13).unwrap();
        let target = zp::canonical_form(&ResidueSet::from_elems(g, [0u64, 1, 2, 4])).0;
        let text = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
        let found = text.lines().any(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            v["type"] == "equality" && v["set"] == zp::format_set_literal(&target)
        });
        assert!(found);
    }

    #[test]
    fn jobs_do_not_change_bytes() {
        let dir = tempdir().unwrap();
        let mut cfg = base_config(SurveyKind::Conjecture, vec![11], dir.path().join("a.jsonl"));
        run_survey(&cfg).unwrap();
        cfg.out = dir.path().join("b.jsonl");
        cfg.jobs = 8;
        run_survey(&cfg).unwrap();
        let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
        let b = std::fs::read(dir.path().join("b.jsonl")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_mode_is_deterministic() {
        let dir = tempdir().unwrap();
        let mut cfg = base_config(SurveyKind::Conjecture, vec![17], dir.path().join("a.jsonl"));
        cfg.mode = Mode::Random { samples: 200, seed: 42 };
        run_survey(&cfg).unwrap();
        cfg.out = dir.path().join("b.jsonl");
        cfg.jobs = 4;
        run_survey(&cfg).unwrap();
        assert_eq!(
            std::fs::read(dir.path().join("a.jsonl")).unwrap(),
            std::fs::read(dir.path().join("b.jsonl")).unwrap()
        );
    }

    #[test]
    fn checkpoint_mismatch_refused() {
        let dir = tempdir().unwrap();
        let mut cfg = base_config(SurveyKind::Conjecture, vec![5], dir.path().join("r.jsonl"));
        cfg.checkpoint = Some(dir.path().join("ck.json"));
        run_survey(&cfg).unwrap();
        cfg.p_list = vec![7];
        cfg.out = dir.path().join("r2.jsonl");
        let err = run_survey(&cfg).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn extremal_examples() {
        let inst = extremal_family(13, 0).unwrap();
        assert_eq!(inst.set.elems(), vec![0, 3, 4, 5, 6, 7]);
        assert_eq!(inst.card_two_s, 12);
        assert_eq!(inst.ell_s, 8);

        let inst = extremal_family(29, 2).unwrap();
        assert_eq!(inst.set.card(), 12);
        assert_eq!(inst.card_two_s, 26);
        assert!(inst.ell_s >= 16); // |S|+m+2

        assert!(matches!(extremal_family(13, 3), Err(Error::Usage(_))));
        // boundary excluded: p=13, m=1 has ell(S)=|S|+m+1
        assert!(matches!(extremal_family(13, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn extremal_identities_sweep() {
        for p in [11u64, 13, 17, 19, 23, 31, 43, 59, 101] {
            let mut m = -1i64;
            while 2 * m + 6 <= ((p + 1) / 2) as i64 {
                extremal_family(p, m).unwrap(); // asserts internally
                m += 1;
            }
        }
    }
}
