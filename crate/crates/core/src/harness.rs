//! Corpus files, batch runs and text/JSON rendering of judgments.
//!
//! Corpus entries are blank-line separated blocks:
//!
//! ```text
//! id: 36
//! sent: ʕali biz l-masaaha wa ʔimsaħ ṣ-ṣabuura
//! expect: OK
//! coref: pro1=ʕali pro2=ʕali
//! ```
//!
//! `expect` is `OK` or a violation code; `coref` is only allowed with `OK`
//! and an empty `coref:` line asserts that there is no *pro* at all.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::chains::{CoreferenceMap, Locality};
use crate::clause::{Position, Slot};
use crate::judge::{judge, Judgment, Verdict, ViolationCode};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Ok,
    Code(ViolationCode),
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Ok => f.write_str("OK"),
            Expectation::Code(c) => f.write_str(c.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub line: usize,
    pub sentence: String,
    pub expect: Expectation,
    /// 1-based *pro* index to antecedent form (or `NULLTOP`).
    pub coref: Option<BTreeMap<usize, String>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

/// Parses a corpus. Malformed blocks are reported and skipped.
pub fn parse_corpus(text: &str) -> (Vec<CorpusEntry>, Vec<CorpusError>) {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    for (n, line) in lines.chain(std::iter::once((0, ""))) {
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !block.is_empty() {
                match parse_block(&block) {
                    Ok(e) => entries.push(e),
                    Err(e) => errors.push(e),
                }
                block.clear();
            }
            continue;
        }
        block.push((n, line));
    }
    (entries, errors)
}

fn parse_block(block: &[(usize, &str)]) -> Result<CorpusEntry, CorpusError> {
    let start = block[0].0;
    let err = |line, message: String| CorpusError { line, message };
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for &(n, line) in block {
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(n, format!("expected `key: value`, got `{line}`")))?;
        let key = key.trim();
        if !matches!(key, "id" | "sent" | "expect" | "coref") {
            return Err(err(n, format!("unknown field `{key}`")));
        }
        if fields.insert(key, (n, value.trim())).is_some() {
            return Err(err(n, format!("field `{key}` given twice")));
        }
    }
    let field = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| err(start, format!("missing `{k}`")))
    };
    let (_, id) = field("id")?;
    let (_, sentence) = field("sent")?;
    let (en, expect_text) = field("expect")?;
    let expect = if expect_text == "OK" {
        Expectation::Ok
    } else {
        Expectation::Code(
            expect_text
                .parse()
                .map_err(|e: crate::judge::UnknownCode| err(en, e.to_string()))?,
        )
    };
    let coref = match fields.get("coref") {
        None => None,
        Some(&(cn, _)) if expect != Expectation::Ok => {
            return Err(err(cn, "`coref` is only allowed with `expect: OK`".into()));
        }
        Some(&(cn, text)) => {
            let mut map = BTreeMap::new();
            for pair in text.split_whitespace() {
                let bad = || err(cn, format!("expected `proN=FORM`, got `{pair}`"));
                let (lhs, rhs) = pair.split_once('=').ok_or_else(bad)?;
                let k: usize = lhs
                    .strip_prefix("pro")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(bad)?;
                if k == 0 || map.insert(k, rhs.to_string()).is_some() {
                    return Err(bad());
                }
            }
            Some(map)
        }
    };
    Ok(CorpusEntry {
        id: id.to_string(),
        line: start,
        sentence: sentence.to_string(),
        expect,
        coref,
    })
}

/// Coreference as `pro index (1-based) → antecedent`.
pub fn coref_forms(c: &CoreferenceMap) -> BTreeMap<usize, String> {
    c.iter().map(|(k, a)| (k + 1, a.head.to_string())).collect()
}

fn describe(j: &Judgment) -> String {
    match &j.verdict {
        Verdict::Grammatical(c) => {
            let pairs: Vec<String> = coref_forms(c)
                .iter()
                .map(|(k, f)| format!("pro{k}={f}"))
                .collect();
            if pairs.is_empty() {
                "OK".to_string()
            } else {
                format!("OK [{}]", pairs.join(" "))
            }
        }
        Verdict::Ungrammatical(v) => v[0].code.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct EntryResult {
    pub entry: CorpusEntry,
    pub judgment: Judgment,
    pub matched: bool,
    pub diff: Option<String>,
}

pub fn check_entry(entry: &CorpusEntry, lex: &Lexicon) -> EntryResult {
    let judgment = judge(&entry.sentence, lex);
    let diff = match (&entry.expect, &judgment.verdict) {
        (Expectation::Ok, Verdict::Grammatical(c)) => entry
            .coref
            .as_ref()
            .filter(|want| **want != coref_forms(c))
            .map(|want| {
                let want: Vec<String> = want.iter().map(|(k, f)| format!("pro{k}={f}")).collect();
                format!(
                    "expected coreference [{}], got {}",
                    want.join(" "),
                    describe(&judgment)
                )
            }),
        (Expectation::Code(c), Verdict::Ungrammatical(v)) if v[0].code == *c => None,
        (expect, _) => Some(format!("expected {expect}, got {}", describe(&judgment))),
    };
    EntryResult {
        entry: entry.clone(),
        matched: diff.is_none(),
        diff,
        judgment,
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub results: Vec<EntryResult>,
    pub errors: Vec<CorpusError>,
}

impl RunReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.matched).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0 && self.errors.is_empty()
    }

    pub fn render_text(&self, trace: bool) -> String {
        let mut out = String::new();
        let width = self
            .results
            .iter()
            .map(|r| r.entry.id.chars().count())
            .max()
            .unwrap_or(0);
        for r in &self.results {
            let flag = if r.matched { "PASS" } else { "FAIL" };
            let pad = width - r.entry.id.chars().count();
            let _ = writeln!(
                out,
                "{flag} {}{}  {}  → {}",
                r.entry.id,
                " ".repeat(pad),
                r.entry.sentence,
                describe(&r.judgment)
            );
            if let Some(d) = &r.diff {
                let _ = writeln!(out, "     {d}");
            }
            if trace {
                for line in render_text(&r.judgment, true).lines() {
                    let _ = writeln!(out, "     | {line}");
                }
            }
        }
        for e in &self.errors {
            let _ = writeln!(out, "ERROR {e}");
        }
        let _ = writeln!(
            out,
            "{} entries: {} passed, {} failed, {} malformed",
            self.results.len(),
            self.passed(),
            self.failed(),
            self.errors.len()
        );
        out
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                json!({
                    "id": r.entry.id,
                    "line": r.entry.line,
                    "expected": r.entry.expect.to_string(),
                    "expected_coreference": r.entry.coref.as_ref().map(|m| {
                        m.iter().map(|(k, f)| (format!("pro{k}"), f.clone())).collect::<BTreeMap<_, _>>()
                    }),
                    "actual": describe(&r.judgment),
                    "matched": r.matched,
                    "diff": r.diff,
                    "judgment": to_json(&r.judgment),
                })
            })
            .collect();
        let errors: Vec<Value> = self
            .errors
            .iter()
            .map(|e| json!({"line": e.line, "message": e.message}))
            .collect();
        json!({
            "entries": entries,
            "errors": errors,
            "total": self.results.len(),
            "passed": self.passed(),
            "failed": self.failed(),
        })
    }
}

pub fn run_corpus(text: &str, lex: &Lexicon) -> RunReport {
    let (entries, errors) = parse_corpus(text);
    RunReport {
        results: entries.iter().map(|e| check_entry(e, lex)).collect(),
        errors,
    }
}

const HEAD_SLOTS: [Slot; 5] = [
    Slot::Topic,
    Slot::TopHead,
    Slot::TenseHead,
    Slot::LittleV,
    Slot::Pro,
];

fn heads(j: &Judgment) -> Vec<(Position, String, BTreeMap<String, Option<String>>)> {
    let Some(s) = &j.trace.structure else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for k in 0..s.len() {
        for slot in HEAD_SLOTS {
            let pos = Position::new(k, slot);
            if let Some(f) = s.feats(pos) {
                let map = f
                    .iter()
                    .map(|feat| {
                        (
                            feat.attr.short().to_string(),
                            feat.value().map(|v| v.to_string()),
                        )
                    })
                    .collect();
                out.push((pos, f.to_string(), map));
            }
        }
    }
    out
}

fn coref_line(k: usize, a: &crate::chains::Antecedent) -> String {
    let extra = if a.discourse_dependent() {
        ", discourse-dependent"
    } else {
        ""
    };
    format!("pro{} ⇒ {} (chain {}{extra})", k + 1, a.head, a.chain)
}

pub fn render_text(j: &Judgment, trace: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input: {}", j.input);
    match &j.verdict {
        Verdict::Grammatical(_) => {
            let _ = writeln!(out, "verdict: Grammatical");
        }
        Verdict::Ungrammatical(vs) => {
            let _ = writeln!(out, "verdict: Ungrammatical");
            let _ = writeln!(out, "violations:");
            for v in vs {
                let _ = writeln!(out, "  {} at {}: {}", v.code, v.locus, v.detail);
            }
        }
    }
    if !j.trace.coreference.is_empty() {
        let _ = writeln!(out, "coreference:");
        for (k, a) in &j.trace.coreference {
            let _ = writeln!(out, "  {}", coref_line(*k, a));
        }
    }
    if !trace {
        return out;
    }
    if let Some(s) = &j.trace.structure {
        let _ = writeln!(out, "structure:");
        for c in &s.conjuncts {
            let _ = writeln!(out, "  {}", c.render());
        }
        let _ = writeln!(out, "  (FocP not projected)");
    }
    if !j.trace.chains.is_empty() {
        let _ = writeln!(out, "chains:");
        for c in &j.trace.chains {
            let loc = match c.locality {
                Locality::Local => "local",
                Locality::NonLocal => "nonlocal",
            };
            let _ = writeln!(out, "  {} ({loc}): {}", c.index, c.diagram());
        }
    }
    if !j.trace.steps.is_empty() {
        let _ = writeln!(out, "steps:");
        for (i, s) in j.trace.steps.iter().enumerate() {
            let _ = writeln!(out, "  {:>2}. {s}", i + 1);
        }
    }
    let hs = heads(j);
    if !hs.is_empty() {
        let _ = writeln!(out, "heads:");
        for (pos, text, _) in hs {
            let _ = writeln!(out, "  {pos} {text}");
        }
    }
    if !j.trace.notes.is_empty() {
        let _ = writeln!(out, "notes:");
        for n in &j.trace.notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}

pub fn to_json(j: &Judgment) -> Value {
    let violations: Vec<Value> = j
        .violations()
        .iter()
        .map(|v| json!({"code": v.code.as_str(), "locus": v.locus, "token": v.token.map(|t| t + 1), "detail": v.detail}))
        .collect();
    let coreference: Vec<Value> = j
        .trace
        .coreference
        .iter()
        .map(|(k, a)| {
            json!({
                "pro": format!("pro{}", k + 1),
                "antecedent": a.head.to_string(),
                "chain": a.chain,
                "discourse_dependent": a.discourse_dependent(),
            })
        })
        .collect();
    let chains: Vec<Value> = j
        .trace
        .chains
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "head": c.head.to_string(),
                "locality": match c.locality { Locality::Local => "local", Locality::NonLocal => "nonlocal" },
                "conjuncts": c.conjuncts.iter().map(|k| k + 1).collect::<Vec<_>>(),
                "links": c.links.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "diagram": c.diagram(),
            })
        })
        .collect();
    let steps: Vec<Value> = j
        .trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "kind": format!("{:?}", s.kind),
                "probe": s.probe.to_string(),
                "goal": s.goal.to_string(),
                "attrs": s.attrs.iter().map(|a| a.short()).collect::<Vec<_>>(),
                "outcome": match s.outcome {
                    crate::agree::StepOutcome::Valued => "Valued".to_string(),
                    crate::agree::StepOutcome::NoChange => "NoChange".to_string(),
                    crate::agree::StepOutcome::Conflict(a) => format!("Conflict({})", a.short()),
                },
                "valued": s.valued.iter().map(|(a, v)| (a.short().to_string(), v.to_string())).collect::<BTreeMap<_, _>>(),
                "conflicts": s.conflicts.iter().map(|a| a.short()).collect::<Vec<_>>(),
                "text": s.to_string(),
            })
        })
        .collect();
    let heads: Vec<Value> = heads(j)
        .into_iter()
        .map(|(pos, _, feats)| json!({"position": pos.to_string(), "features": feats}))
        .collect();
    let structure = j
        .trace
        .structure
        .as_ref()
        .map(|s| s.conjuncts.iter().map(|c| c.render()).collect::<Vec<_>>());
    json!({
        "input": j.input,
        "verdict": if j.is_grammatical() { "Grammatical" } else { "Ungrammatical" },
        "violations": violations,
        "coreference": coreference,
        "structure": structure,
        "chains": chains,
        "steps": steps,
        "heads": heads,
        "notes": j.trace.notes,
    })
}
