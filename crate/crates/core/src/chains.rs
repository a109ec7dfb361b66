//! A′-chains, the silent-topic principle and binding checks.
//!
//! A chain runs from a topic down through Top°, T°, v° and *pro* of its own
//! conjunct and of every following conjunct that has no overt topic.

use std::collections::BTreeMap;
use std::fmt;

use crate::clause::{ClauseStructure, Position, Slot, TopicStatus};
use crate::features::{FeatureAttribute, FeatureValue};
use crate::lexicon::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locality {
    Local,
    NonLocal,
}

/// What heads a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainHead {
    Overt { form: String, token: Option<usize> },
    NullTopic,
}

impl fmt::Display for ChainHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainHead::Overt { form, .. } => f.write_str(form),
            ChainHead::NullTopic => f.write_str("NULLTOP"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AChain {
    /// 1-based referential index.
    pub index: usize,
    pub head: ChainHead,
    /// Conjuncts spanned, in order; the first holds the head.
    pub conjuncts: Vec<usize>,
    pub links: Vec<Position>,
    pub locality: Locality,
}

impl AChain {
    pub fn head_conjunct(&self) -> usize {
        self.conjuncts[0]
    }

    pub fn pros(&self) -> impl Iterator<Item = Position> + '_ {
        self.links.iter().copied().filter(|p| p.slot == Slot::Pro)
    }

    /// Text diagram: `ʕali_1 … Top°1 … T°1 … v°1 … pro1_1 ‖ ⟨topic2⟩_1 …`.
    pub fn diagram(&self) -> String {
        let i = self.index;
        let mut out = String::new();
        let mut last = None;
        for link in &self.links {
            match last {
                Some(c) if c != link.conjunct => out.push_str(" ‖ "),
                Some(_) => out.push_str(" … "),
                None => {}
            }
            last = Some(link.conjunct);
            let text = match (link.slot, link.conjunct == self.head_conjunct()) {
                (Slot::Topic, true) => format!("{}_{i}", self.head),
                (Slot::Topic, false) => format!("⟨{}⟩_{i}", self.head),
                (Slot::Pro, _) => format!("pro{}_{i}", link.conjunct + 1),
                _ => link.to_string(),
            };
            out.push_str(&text);
        }
        out
    }
}

const LINK_SLOTS: [Slot; 5] = [
    Slot::Topic,
    Slot::TopHead,
    Slot::TenseHead,
    Slot::LittleV,
    Slot::Pro,
];

/// Left-to-right chain formation: an overt topic opens a chain, a topicless
/// conjunct joins the nearest chain to its left, and a topicless first
/// conjunct opens a null-topic chain.
pub fn build_chains(s: &ClauseStructure) -> Vec<AChain> {
    let mut chains: Vec<AChain> = Vec::new();
    for (k, slot) in s.topics.iter().enumerate() {
        let head = match &slot.status {
            TopicStatus::Overt(o) => Some(ChainHead::Overt {
                form: o.item.form.clone(),
                token: o.token,
            }),
            TopicStatus::Null => Some(ChainHead::NullTopic),
            TopicStatus::Silent if chains.is_empty() => Some(ChainHead::NullTopic),
            TopicStatus::Silent => None,
        };
        if let Some(head) = head {
            chains.push(AChain {
                index: chains.len() + 1,
                head,
                conjuncts: Vec::new(),
                links: Vec::new(),
                locality: Locality::Local,
            });
        }
        let chain = chains.last_mut().expect("a chain is open");
        chain.conjuncts.push(k);
        chain.links.extend(
            LINK_SLOTS
                .iter()
                .map(|&slot| Position::new(k, slot))
                .filter(|&p| s.feats(p).is_some()),
        );
    }
    for chain in &mut chains {
        if chain.conjuncts.len() > 1 {
            chain.locality = Locality::NonLocal;
        }
    }
    chains
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StpReport {
    Ok,
    /// A non-initial conjunct spells out the same topic that already
    /// controls the discourse to its left.
    Violation {
        conjunct: usize,
        form: String,
        token: Option<usize>,
    },
}

/// Topics count as the same when form and φ-features coincide; two tokens of
/// one name are never told apart.
pub fn apply_stp(s: &ClauseStructure, chains: &[AChain]) -> Vec<StpReport> {
    let mut out = Vec::new();
    for pair in chains.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let (Some(a), Some(b)) = (
            s.topics[prev.head_conjunct()].overt(),
            s.topics[cur.head_conjunct()].overt(),
        ) else {
            continue;
        };
        let phi = |o: &crate::clause::Occupant| {
            FeatureAttribute::PHI.map(|attr| o.item.feats.value(attr))
        };
        if a.item.form == b.item.form && phi(a) == phi(b) {
            out.push(StpReport::Violation {
                conjunct: cur.head_conjunct(),
                form: b.item.form.clone(),
                token: b.token,
            });
        }
    }
    if out.is_empty() {
        out.push(StpReport::Ok);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antecedent {
    pub head: ChainHead,
    pub chain: usize,
}

impl Antecedent {
    /// Null-topic antecedents are fixed by the discourse, not the sentence.
    pub fn discourse_dependent(&self) -> bool {
        self.head == ChainHead::NullTopic
    }
}

/// Antecedent of every *pro*, keyed by conjunct index.
pub type CoreferenceMap = BTreeMap<usize, Antecedent>;

pub fn resolve_pro(chains: &[AChain]) -> CoreferenceMap {
    chains
        .iter()
        .flat_map(|c| {
            c.pros().map(move |p| {
                (
                    p.conjunct,
                    Antecedent {
                        head: c.head.clone(),
                        chain: c.index,
                    },
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingViolation {
    /// A reflexive object that is not 2nd person.
    PersonMismatch {
        conjunct: usize,
        form: String,
        token: Option<usize>,
    },
    /// A reciprocal object whose *pro* is not plural.
    NumberMismatch {
        conjunct: usize,
        form: String,
        token: Option<usize>,
    },
}

/// Checks each anaphoric object against its own conjunct's *pro*.
pub fn check_binding(s: &ClauseStructure, coref: &CoreferenceMap) -> Vec<BindingViolation> {
    let mut out = Vec::new();
    for &k in coref.keys() {
        let pro = s.feats(Position::new(k, Slot::Pro));
        for obj in s.objects(k) {
            let item = &obj.item;
            match item.role {
                Some(Role::Refl) => {
                    let anaphor = item.feats.value(FeatureAttribute::Person);
                    let binder = pro.and_then(|b| b.value(FeatureAttribute::Person));
                    if anaphor != Some(FeatureValue::P2) || anaphor != binder {
                        out.push(BindingViolation::PersonMismatch {
                            conjunct: k,
                            form: item.form.clone(),
                            token: obj.token,
                        });
                    }
                }
                Some(Role::Recip)
                    if pro.and_then(|b| b.value(FeatureAttribute::Number))
                        != Some(FeatureValue::Pl) =>
                {
                    out.push(BindingViolation::NumberMismatch {
                        conjunct: k,
                        form: item.form.clone(),
                        token: obj.token,
                    });
                }
                _ => {}
            }
        }
    }
    out
}
