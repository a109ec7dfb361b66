//! Feature Inheritance, clause-local Agree and Agree Across Phases.
//!
//! Every operation is a sequence of probe–goal steps. A step that hits a
//! valued–valued mismatch records the conflict, leaves that attribute alone
//! and carries on with the rest.

use std::fmt;

use thiserror::Error;

use crate::chains::{AChain, Locality};
use crate::clause::{ClauseStructure, Position, Slot, TopicStatus};
use crate::features::{
    value_bundle, BundleOutcome, Feature, FeatureAttribute, FeatureBundle, FeatureValue,
};

use FeatureAttribute::{Adrs, Case, Gender, Number, Person, Spcty, Tense};

const PHI: [FeatureAttribute; 3] = FeatureAttribute::PHI;
const PHI_ADRS: [FeatureAttribute; 4] = [Person, Number, Gender, Adrs];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Inheritance,
    Local,
    AcrossPhases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Valued,
    NoChange,
    Conflict(FeatureAttribute),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeGoalStep {
    pub kind: StepKind,
    pub probe: Position,
    pub goal: Position,
    pub attrs: Vec<FeatureAttribute>,
    pub outcome: StepOutcome,
    /// Attributes this step valued, with the values they received.
    pub valued: Vec<(FeatureAttribute, FeatureValue)>,
    /// Every attribute that clashed, in attribute order.
    pub conflicts: Vec<FeatureAttribute>,
}

impl fmt::Display for ProbeGoalStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.kind {
            StepKind::Inheritance => "⇐inherit",
            StepKind::Local => "←",
            StepKind::AcrossPhases => "⇠AAP",
        };
        let attrs: Vec<&str> = self.attrs.iter().map(|a| a.short()).collect();
        write!(
            f,
            "{} {arrow} {} [{}]: ",
            self.probe,
            self.goal,
            attrs.join(",")
        )?;
        match self.outcome {
            StepOutcome::NoChange => f.write_str("no change")?,
            StepOutcome::Valued | StepOutcome::Conflict(_) => {
                let vals: Vec<String> = self
                    .valued
                    .iter()
                    .map(|(a, v)| format!("{}={}", a.short(), v))
                    .collect();
                if !vals.is_empty() {
                    write!(f, "valued {}", vals.join(", "))?;
                }
                if !self.conflicts.is_empty() {
                    let c: Vec<&str> = self.conflicts.iter().map(|a| a.short()).collect();
                    if !vals.is_empty() {
                        f.write_str("; ")?;
                    }
                    write!(f, "CONFLICT on {}", c.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgreeError {
    #[error("{phase} does not dominate {target}")]
    NotDominated { phase: Position, target: Position },
    #[error("no {0} in the structure")]
    Missing(Position),
}

/// The goal's features as a probe sees them. An addressable overt topic is
/// read as 2nd person: it names the addressee.
pub fn goal_view(s: &ClauseStructure, pos: Position) -> Option<FeatureBundle> {
    let mut b = s.feats(pos)?.clone();
    if pos.slot == Slot::Topic
        && s.topics.get(pos.conjunct).is_some_and(|t| t.is_overt())
        && b.value(Adrs) == Some(FeatureValue::Addressee)
        && b.value(Person).is_some()
    {
        let interp = b.get(Person).map(|f| f.interp).expect("person present");
        let mut f = Feature::valued(Person, FeatureValue::P2);
        f.interp = interp;
        b.insert(f);
    }
    Some(b)
}

/// One probe–goal step over `attrs` (restricted to those the probe bears).
/// Returns `None` when either position is absent or no attribute applies.
pub fn agree_step(
    s: &mut ClauseStructure,
    kind: StepKind,
    probe: Position,
    goal: Position,
    attrs: &[FeatureAttribute],
) -> Option<ProbeGoalStep> {
    let goal_feats = goal_view(s, goal)?;
    let probe_feats = s.feats_mut(probe)?;
    let mut pending: Vec<FeatureAttribute> = attrs
        .iter()
        .copied()
        .filter(|a| probe_feats.contains(*a))
        .collect();
    if pending.is_empty() {
        return None;
    }
    let listed = pending.clone();
    let mut conflicts = Vec::new();
    let valued_attrs = loop {
        match value_bundle(probe_feats, &goal_feats, &pending) {
            BundleOutcome::Updated { bundle, valued } => {
                *probe_feats = bundle;
                break valued;
            }
            BundleOutcome::Conflict(a) => {
                conflicts.push(a);
                pending.retain(|x| *x != a);
            }
        }
    };
    let valued: Vec<(FeatureAttribute, FeatureValue)> = valued_attrs
        .into_iter()
        .map(|a| (a, probe_feats.value(a).expect("just valued")))
        .collect();
    let outcome = match (conflicts.first(), valued.is_empty()) {
        (Some(&a), _) => StepOutcome::Conflict(a),
        (None, false) => StepOutcome::Valued,
        (None, true) => StepOutcome::NoChange,
    };
    Some(ProbeGoalStep {
        kind,
        probe,
        goal,
        attrs: listed,
        outcome,
        valued,
        conflicts,
    })
}

/// T° takes over the phase head's φ slots (unvalued), Tense and Case. Only
/// a T° in the phase head's own clause can inherit.
pub fn inherit_features(
    s: &mut ClauseStructure,
    phase_head: Position,
    t_head: Position,
) -> Result<ProbeGoalStep, AgreeError> {
    if phase_head.slot != Slot::TopHead
        || t_head.slot != Slot::TenseHead
        || phase_head.conjunct != t_head.conjunct
    {
        return Err(AgreeError::NotDominated {
            phase: phase_head,
            target: t_head,
        });
    }
    let source = s
        .feats(phase_head)
        .ok_or(AgreeError::Missing(phase_head))?
        .clone();
    let target = s.feats_mut(t_head).ok_or(AgreeError::Missing(t_head))?;
    let attrs = [Person, Number, Gender, Tense, Case];
    let mut valued = Vec::new();
    for attr in attrs {
        if target.contains(attr) {
            continue;
        }
        let Some(f) = source.get(attr) else { continue };
        if PHI.contains(&attr) {
            target.insert(Feature::unvalued(attr));
        } else {
            target.insert(*f);
            if let Some(v) = f.value() {
                valued.push((attr, v));
            }
        }
    }
    let outcome = if valued.is_empty() {
        StepOutcome::NoChange
    } else {
        StepOutcome::Valued
    };
    Ok(ProbeGoalStep {
        kind: StepKind::Inheritance,
        probe: t_head,
        goal: phase_head,
        attrs: attrs.to_vec(),
        outcome,
        valued,
        conflicts: Vec::new(),
    })
}

/// Clause-internal Agree, in derivational order:
/// T° reads the verb copy's morphology, Top° reads its topic, Top° and T°
/// share φ, *pro* is valued by T° (φ, Case), v° by *pro* (φ) and Top° (Adrs),
/// *pro* takes [Adrs] from v°, and the topic takes what Top° imposes.
pub fn agree_local(s: &mut ClauseStructure, k: usize) -> Vec<ProbeGoalStep> {
    let at = |slot| Position::new(k, slot);
    let status = s.topics.get(k).map(|t| t.status.clone());
    let topic_feeds_top = matches!(status, Some(TopicStatus::Overt(_) | TopicStatus::Null));
    let topic_takes: &[FeatureAttribute] = match status {
        Some(TopicStatus::Overt(_)) => &[Spcty],
        _ => &[Person, Number, Gender, Spcty],
    };

    let mut plan: Vec<(Slot, Slot, &[FeatureAttribute])> =
        vec![(Slot::TenseHead, Slot::VerbCopy, &PHI)];
    if topic_feeds_top {
        plan.push((Slot::TopHead, Slot::Topic, &PHI_ADRS));
    }
    plan.extend([
        (Slot::TopHead, Slot::TenseHead, &PHI[..]),
        (Slot::TenseHead, Slot::TopHead, &PHI[..]),
        (
            Slot::Pro,
            Slot::TenseHead,
            &[Person, Number, Gender, Case][..],
        ),
        (Slot::LittleV, Slot::Pro, &PHI[..]),
        (Slot::LittleV, Slot::TopHead, &[Adrs][..]),
        (Slot::Pro, Slot::LittleV, &[Adrs][..]),
        (Slot::Topic, Slot::TopHead, topic_takes),
    ]);
    plan.into_iter()
        .filter_map(|(p, g, attrs)| agree_step(s, StepKind::Local, at(p), at(g), attrs))
        .collect()
}

/// Agree Across Phases: in every nonlocal chain, the head conjunct's Top°
/// values [Adrs] and φ on each lower silent topic, Top° and v°. T° is not a
/// phase head and never intervenes; it is valued from its own Top°
/// afterwards, and each lower *pro* from its v°.
pub fn agree_across_phases(s: &mut ClauseStructure, chains: &[AChain]) -> Vec<ProbeGoalStep> {
    let mut steps = Vec::new();
    for chain in chains.iter().filter(|c| c.locality == Locality::NonLocal) {
        let top1 = Position::new(chain.head_conjunct(), Slot::TopHead);
        for &j in &chain.conjuncts[1..] {
            let at = |slot| Position::new(j, slot);
            let plan = [
                (at(Slot::Topic), top1, &PHI_ADRS[..]),
                (at(Slot::TopHead), top1, &PHI_ADRS[..]),
                (at(Slot::LittleV), top1, &PHI_ADRS[..]),
                (at(Slot::TenseHead), at(Slot::TopHead), &PHI[..]),
                (at(Slot::Pro), at(Slot::LittleV), &PHI_ADRS[..]),
            ];
            steps
                .extend(plan.into_iter().filter_map(|(p, g, attrs)| {
                    agree_step(s, StepKind::AcrossPhases, p, g, attrs)
                }));
        }
    }
    steps
}
