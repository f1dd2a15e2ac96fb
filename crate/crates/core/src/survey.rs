//! Range surveys with resumable JSONL output, and the tabular emitters used by
//! the command line.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::classify::{attach_mclass, classify_with, classify_with_mclass, ClassifyOptions, PfType};
use crate::criteria::{bound_b, p4_f64, Coarse, CosetVerdict, MLevel};
use crate::error::{Error, Result};
use crate::radicand::{Radicand, Species};

/// One line of survey output. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub d: u64,
    pub a: u64,
    pub b: u64,
    pub species: Species,
    pub f: u64,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "type")]
    pub pf_type: PfType,
    #[serde(rename = "Q")]
    pub q: Option<u8>,
    pub period_length: Option<usize>,
    pub pf_norms: Vec<u64>,
    pub m_class: Option<MLevel>,
    pub timing_ms: f64,
}

impl SurveyRecord {
    /// The record with timing cleared, for comparisons across runs.
    pub fn canonical(&self) -> Self {
        SurveyRecord { timing_ms: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct SurveyOptions {
    pub workers: usize,
    pub mclass: bool,
    pub resume: bool,
    pub out: Option<PathBuf>,
    pub classify: ClassifyOptions,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        SurveyOptions { workers: 1, mclass: false, resume: false, out: None, classify: ClassifyOptions::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub lo: u64,
    pub hi: u64,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub m_levels: BTreeMap<String, usize>,
    pub m0: Vec<u64>,
    /// Records reused from an existing output file.
    pub resumed: usize,
}

impl SurveySummary {
    pub fn total(&self) -> usize {
        self.alpha + self.beta + self.gamma
    }

    fn add(&mut self, rec: &SurveyRecord) {
        match rec.pf_type {
            PfType::Alpha => self.alpha += 1,
            PfType::Beta => self.beta += 1,
            PfType::Gamma => self.gamma += 1,
        }
        if let Some(m) = rec.m_class {
            *self.m_levels.entry(m.to_string()).or_default() += 1;
            if m == MLevel::M0 {
                self.m0.push(rec.d);
            }
        }
    }
}

impl std::fmt::Display for SurveySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} ≤ d ≤ {}: α = {}, β = {}, γ = {}, total {}", self.lo, self.hi, self.alpha, self.beta, self.gamma, self.total())?;
        if !self.m_levels.is_empty() {
            let levels: Vec<String> = self.m_levels.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            writeln!(f, "M-classes of type β: {}", levels.join(", "))?;
            let list: Vec<String> = self.m0.iter().map(u64::to_string).collect();
            writeln!(f, "M0 fields ({}): {}", self.m0.len(), list.join(", "))?;
        }
        Ok(())
    }
}

pub fn survey_record(d: u64, mclass: bool, opts: &ClassifyOptions) -> Result<SurveyRecord> {
    let start = Instant::now();
    let r = Radicand::normalize(d)?;
    let mut c = classify_with(d, opts)?;
    if mclass && c.pf_type == PfType::Beta {
        attach_mclass(&mut c, opts)?;
    }
    Ok(SurveyRecord {
        d: r.d,
        a: r.a,
        b: r.b,
        species: r.species,
        f: r.f,
        r: r.r,
        pf_type: c.pf_type,
        q: c.q,
        period_length: c.period_length,
        pf_norms: c.pf_norms.clone(),
        m_class: c.m_class.as_ref().map(|m| m.level),
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Reads the complete records of an existing output file and truncates a
/// partial trailing line left by an interrupted run.
pub fn load_existing(path: &Path) -> Result<Vec<SurveyRecord>> {
    let io = |e: std::io::Error| Error::Inconsistent(format!("{}: {e}", path.display()));
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = File::open(path).map_err(io)?;
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good_len = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(io)?;
        if n == 0 || !line.ends_with('\n') {
            break;
        }
        match serde_json::from_str::<SurveyRecord>(line.trim_end()) {
            Ok(rec) => records.push(rec),
            Err(_) => break,
        }
        good_len += n as u64;
    }
    let file = OpenOptions::new().write(true).open(path).map_err(io)?;
    file.set_len(good_len).map_err(io)?;
    Ok(records)
}

const CHUNK: usize = 64;

/// Classifies every normalized radicand in `[lo, hi]`, appending JSONL records
/// to `opts.out` in increasing `d` and returning the group-by summary.
pub fn survey(lo: u64, hi: u64, opts: &SurveyOptions) -> Result<(SurveySummary, Vec<SurveyRecord>)> {
    let io = |e: std::io::Error| Error::Inconsistent(format!("output: {e}"));
    let mut summary = SurveySummary { lo, hi, ..Default::default() };
    let mut records: Vec<SurveyRecord> = Vec::new();
    let mut done = BTreeSet::new();
    if let (Some(path), true) = (&opts.out, opts.resume) {
        for rec in load_existing(path)? {
            if rec.d >= lo && rec.d <= hi && done.insert(rec.d) {
                records.push(rec);
            }
        }
        summary.resumed = records.len();
    }
    let mut sink = match &opts.out {
        Some(path) => Some(
            OpenOptions::new()
                .create(true)
                .append(opts.resume)
                .write(true)
                .truncate(!opts.resume)
                .open(path)
                .map_err(io)?,
        ),
        None => None,
    };
    let todo: Vec<u64> = Radicand::range(lo, hi).map(|r| r.d).filter(|d| !done.contains(d)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Inconsistent(e.to_string()))?;
    for chunk in todo.chunks(CHUNK) {
        let batch: Vec<Result<SurveyRecord>> = pool.install(|| {
            chunk.par_iter().map(|&d| survey_record(d, opts.mclass, &opts.classify)).collect()
        });
        for rec in batch {
            let rec = rec?;
            if let Some(f) = sink.as_mut() {
                let line = serde_json::to_string(&rec).map_err(|e| Error::Inconsistent(e.to_string()))?;
                writeln!(f, "{line}").map_err(io)?;
            }
            records.push(rec);
        }
        if let Some(f) = sink.as_mut() {
            f.flush().map_err(io)?;
        }
    }
    records.sort_by_key(|rec| rec.d);
    for rec in &records {
        summary.add(rec);
    }
    Ok((summary, records))
}

/// `x ≥ 0` cut to four decimals, the format of the justification table. The
/// small offset keeps exact decimals such as 1.3 from dropping a digit.
pub fn truncate4(x: f64) -> String {
    let t = (x * 1e4 + 1e-7).trunc() / 1e4;
    format!("{t:.4}")
}

fn coarse_mark(c: &CosetVerdict) -> &'static str {
    if c.coarse == Coarse::ForcesNonMinimum {
        "✓"
    } else {
        "✗"
    }
}

/// Per coset: `y`, `C = B(−u1u2)`, coarse verdict, `P2(u1γ, u2γ̄)`, threshold 9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JustifyRow {
    pub d: u64,
    pub cosets: [[String; 5]; 2],
}

/// Justification row for a species-2 field of type β. The first coset is the
/// one met first in the suborder chain.
pub fn justify(d: u64, opts: &ClassifyOptions) -> Result<JustifyRow> {
    let r = Radicand::normalize(d)?;
    if r.species != Species::S2 {
        return Err(Error::HypothesisViolated(format!("d = {d} is not of species 2")));
    }
    let c = classify_with_mclass(d, opts)?;
    let m = c.m_class.as_ref().ok_or(Error::NotTypeBeta(d))?;
    let row = |v: &CosetVerdict| -> Result<[String; 5]> {
        let (u1, u2) = v.u.ok_or(Error::ThreeDividesInvariant)?;
        let p2 = v.p2.ok_or(Error::ThreeDividesInvariant)?;
        Ok([truncate4(v.y), truncate4(bound_b(-u1 * u2).value()), coarse_mark(v).into(), truncate4(p2), truncate4(9.0)])
    };
    Ok(JustifyRow { d: r.d, cosets: [row(&m.cosets[0])?, row(&m.cosets[1])?] })
}

pub const JUSTIFY_HEADER: &str = "d,y1,C1,coarse1,P2_1,B1,y2,C2,coarse2,P2_2,B2";

impl JustifyRow {
    pub fn csv(&self) -> String {
        let mut cells = vec![self.d.to_string()];
        cells.extend(self.cosets.iter().flatten().cloned());
        cells.join(",")
    }
}

/// Grid samples of `sign P4(X, Y)`, followed by the marker lines `Y = 2` and `Y = √6`.
pub fn p4_locus(x: (f64, f64), y: (f64, f64), step: f64) -> Vec<(f64, f64, f64, i8, &'static str)> {
    let steps = |lo: f64, hi: f64| ((hi - lo) / step).floor().max(0.0) as usize;
    let sgn = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    let mut out = Vec::new();
    let (nx, ny) = (steps(x.0, x.1), steps(y.0, y.1));
    for i in 0..=nx {
        let xv = x.0 + i as f64 * step;
        for j in 0..=ny {
            let yv = y.0 + j as f64 * step;
            let v = p4_f64(xv, yv);
            out.push((xv, yv, v, sgn(v), "grid"));
        }
    }
    for (yv, tag) in [(2.0, "marker_2"), (6f64.sqrt(), "marker_sqrt6")] {
        for i in 0..=nx {
            let xv = x.0 + i as f64 * step;
            let v = p4_f64(xv, yv);
            out.push((xv, yv, v, sgn(v), tag));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation() {
        assert_eq!(truncate4(6f64.sqrt()), "2.4494");
        assert_eq!(truncate4(13.0 / 11.0), "1.1818");
        assert_eq!(truncate4(9.0), "9.0000");
    }

    #[test]
    fn locus_samples() {
        let s = p4_locus((0.0, 5.0), (-20.0, 5.0), 0.5);
        let at = s.iter().find(|t| t.0 == 1.0 && t.1 == 0.0).unwrap();
        assert_eq!((at.2, at.3), (-8.0, -1));
        assert!(s.iter().any(|t| t.4 == "marker_sqrt6"));
    }
}
