//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use aap_core::agree::inherit_features;
use aap_core::clause::{
    parse_imperative, remerge_v_to_t, tokenize, ClauseStructure, Position, Slot, TopicStatus,
};
use aap_core::features::{FeatureAttribute, FeatureBundle, FeatureValue};
use aap_core::harness::{parse_corpus, CorpusEntry};
use aap_core::judge::{derive, Derivation};
use aap_core::lexicon::{seed_lexicon, Lexicon};

pub const CORPUS: &str = include_str!("../../corpus/imperatives.corpus");

pub fn lexicon() -> Lexicon {
    seed_lexicon()
}

pub fn corpus() -> Vec<CorpusEntry> {
    let (entries, errors) = parse_corpus(CORPUS);
    assert!(errors.is_empty(), "{errors:?}");
    entries
}

pub fn entry(id: &str) -> CorpusEntry {
    corpus()
        .into_iter()
        .find(|e| e.id == id)
        .unwrap_or_else(|| panic!("no corpus entry `{id}`"))
}

/// Full derivation for a sentence, or `None` if it does not parse.
pub fn derivation(sentence: &str) -> Option<Derivation> {
    let tokens = tokenize(sentence, &lexicon()).ok()?;
    derive(&tokens).ok()
}

pub const SLOTS: [Slot; 5] = [
    Slot::Topic,
    Slot::TopHead,
    Slot::TenseHead,
    Slot::LittleV,
    Slot::Pro,
];

/// Every addressable feature bundle, keyed by position.
pub fn snapshot(s: &ClauseStructure) -> BTreeMap<Position, FeatureBundle> {
    let mut out = BTreeMap::new();
    for k in 0..s.len() {
        for slot in SLOTS {
            let p = Position::new(k, slot);
            if let Some(f) = s.feats(p) {
                out.insert(p, f.clone());
            }
        }
    }
    out
}

/// Parse, remerge and inherit: the state Agree starts from.
pub fn pre_agree(sentence: &str) -> Option<ClauseStructure> {
    let tokens = tokenize(sentence, &lexicon()).ok()?;
    let mut s = parse_imperative(&tokens).ok()?;
    for k in 0..s.len() {
        if s.has_tense(k) {
            s.conjuncts[k] = remerge_v_to_t(s.conjuncts[k].clone()).ok()?;
            inherit_features(
                &mut s,
                Position::new(k, Slot::TopHead),
                Position::new(k, Slot::TenseHead),
            )
            .ok()?;
        }
    }
    Some(s)
}

pub const ORACLE_ATTRS: [FeatureAttribute; 7] = [
    FeatureAttribute::Person,
    FeatureAttribute::Number,
    FeatureAttribute::Gender,
    FeatureAttribute::Case,
    FeatureAttribute::Adrs,
    FeatureAttribute::Spcty,
    FeatureAttribute::Tense,
];

/// Groups conjuncts into chains: a conjunct with an overt topic (or the
/// first conjunct) starts a new group.
fn chain_groups(s: &ClauseStructure) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, t) in s.topics.iter().enumerate() {
        if k == 0 || matches!(t.status, TopicStatus::Overt(_)) {
            groups.push(vec![k]);
        } else {
            groups.last_mut().unwrap().push(k);
        }
    }
    groups
}

/// Pairwise composition oracle. Along each chain's link sequence, every
/// unvalued slot repeatedly copies the value of its nearest bearer of that
/// attribute (the verb copy first, then the link above, then the link
/// below within the same conjunct), all slots updating simultaneously,
/// until nothing changes. Values cross conjunct boundaries only downwards.
/// An overt addressable topic passes Person 2 on.
pub fn composition_fixpoint(s: &ClauseStructure) -> BTreeMap<Position, FeatureBundle> {
    let mut state = snapshot(s);
    let overt: Vec<bool> = s
        .topics
        .iter()
        .map(|t| matches!(t.status, TopicStatus::Overt(_)))
        .collect();
    let emit = |state: &BTreeMap<Position, FeatureBundle>, p: Position, a: FeatureAttribute| {
        let b = &state[&p];
        let v = b.value(a)?;
        if a == FeatureAttribute::Person
            && p.slot == Slot::Topic
            && overt[p.conjunct]
            && b.value(FeatureAttribute::Adrs) == Some(FeatureValue::Addressee)
        {
            return Some(FeatureValue::P2);
        }
        Some(v)
    };
    for group in chain_groups(s) {
        let links: Vec<Position> = group
            .iter()
            .flat_map(|&k| SLOTS.iter().map(move |&slot| Position::new(k, slot)))
            .filter(|p| state.contains_key(p))
            .collect();
        loop {
            let mut next = state.clone();
            let mut changed = false;
            for (i, &p) in links.iter().enumerate() {
                for a in ORACLE_ATTRS {
                    if !state[&p].contains(a) || state[&p].value(a).is_some() {
                        continue;
                    }
                    let side = (p.slot == Slot::TenseHead)
                        .then(|| s.feats(Position::new(p.conjunct, Slot::VerbCopy)))
                        .flatten()
                        .and_then(|v| v.value(a));
                    let up = links[..i].iter().rev().find(|q| state[q].contains(a));
                    let down = links[i + 1..]
                        .iter()
                        .take_while(|q| q.conjunct == p.conjunct)
                        .find(|q| state[q].contains(a));
                    let found = side
                        .or_else(|| up.and_then(|&q| emit(&state, q, a)))
                        .or_else(|| down.and_then(|&q| emit(&state, q, a)));
                    if let Some(v) = found {
                        let mut f = *state[&p].get(a).unwrap();
                        f.val = aap_core::features::Valuation::Valued(v);
                        next.get_mut(&p).unwrap().insert(f);
                        changed = true;
                    }
                }
            }
            state = next;
            if !changed {
                break;
            }
        }
    }
    state
}

/// Differences between two feature states on the oracle's attributes.
pub fn state_diff(
    a: &BTreeMap<Position, FeatureBundle>,
    b: &BTreeMap<Position, FeatureBundle>,
) -> Vec<String> {
    let mut out = Vec::new();
    for (p, fa) in a {
        let Some(fb) = b.get(p) else {
            out.push(format!("{p} missing"));
            continue;
        };
        for attr in ORACLE_ATTRS {
            if fa.value(attr) != fb.value(attr) || fa.contains(attr) != fb.contains(attr) {
                out.push(format!(
                    "{p} {}: {:?} vs {:?}",
                    attr.short(),
                    fa.value(attr),
                    fb.value(attr)
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Overt(usize),
    Null,
}

/// Brute-force antecedent assignment. Every map from *pro* occurrences to
/// candidate antecedents is generated and kept only if each *pro* takes an
/// antecedent from its own or an earlier conjunct, no overt topic stands
/// between them, the null topic is used only before any overt topic, and the
/// antecedent's φ agree with the verb.
pub fn stp_assignments(s: &ClauseStructure) -> Vec<BTreeMap<usize, String>> {
    let pros: Vec<usize> = (0..s.len())
        .filter(|&k| s.feats(Position::new(k, Slot::Pro)).is_some())
        .collect();
    let overt: Vec<usize> = (0..s.len()).filter(|&k| s.topics[k].is_overt()).collect();
    let mut candidates: Vec<Candidate> = overt.iter().map(|&k| Candidate::Overt(k)).collect();
    if !s.topics[0].is_overt() {
        candidates.push(Candidate::Null);
    }

    let allowed = |pro: usize, c: Candidate| -> bool {
        let from = match c {
            Candidate::Overt(k) => {
                if k > pro {
                    return false;
                }
                k + 1
            }
            Candidate::Null => 0,
        };
        if overt.iter().any(|&k| k >= from && k <= pro) {
            return false;
        }
        let Candidate::Overt(k) = c else { return true };
        let topic = &s.topics[k].overt().unwrap().item.feats;
        let Some(verb) = s.verb(pro) else { return true };
        FeatureAttribute::PHI.iter().all(|&a| {
            let t =
                if a == FeatureAttribute::Person && topic.value(FeatureAttribute::Adrs).is_some() {
                    Some(FeatureValue::P2)
                } else {
                    topic.value(a)
                };
            match (t, verb.item.feats.value(a)) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            }
        })
    };

    let n = candidates.len();
    let total = n.checked_pow(pros.len() as u32).unwrap_or(0);
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let mut map = BTreeMap::new();
        let mut ok = true;
        for &pro in &pros {
            let c = candidates[rest % n];
            rest /= n;
            if !allowed(pro, c) {
                ok = false;
                break;
            }
            let name = match c {
                Candidate::Overt(k) => s.topics[k].overt().unwrap().item.form.clone(),
                Candidate::Null => "NULLTOP".to_string(),
            };
            map.insert(pro + 1, name);
        }
        if ok {
            out.push(map);
        }
    }
    out
}
