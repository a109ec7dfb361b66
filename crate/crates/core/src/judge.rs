//! Runs the whole derivation and turns what goes wrong into violation codes.
//!
//! Parsing failures short-circuit. Everything after parsing accumulates, in
//! the order Agree, silent-topic principle, binding, tense; the first
//! violation listed is the primary one.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::agree::{agree_across_phases, agree_local, inherit_features, ProbeGoalStep};
use crate::chains::{
    apply_stp, build_chains, check_binding, resolve_pro, AChain, BindingViolation, CoreferenceMap,
    StpReport,
};
use crate::clause::{
    parse_imperative, remerge_v_to_t, tokenize, ClauseStructure, ParseError, Position, Slot,
    StructureError, Token,
};
use crate::features::{fully_valued, FeatureAttribute, FeatureValue};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    PastTense,
    TopicRecursion,
    ForcBeforeTop,
    ForcDoubleFill,
    AgreementMismatch,
    PersonMismatchAnaphor,
    NumberMismatchReciprocal,
    StpIterationViolation,
    UnvaluedFeature,
    OutOfScopeNegation,
    OutOfScopeQuestion,
    NotImperative,
    Unparsable,
    UnknownForm,
    EmptyInput,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 15] = [
        ViolationCode::PastTense,
        ViolationCode::TopicRecursion,
        ViolationCode::ForcBeforeTop,
        ViolationCode::ForcDoubleFill,
        ViolationCode::AgreementMismatch,
        ViolationCode::PersonMismatchAnaphor,
        ViolationCode::NumberMismatchReciprocal,
        ViolationCode::StpIterationViolation,
        ViolationCode::UnvaluedFeature,
        ViolationCode::OutOfScopeNegation,
        ViolationCode::OutOfScopeQuestion,
        ViolationCode::NotImperative,
        ViolationCode::Unparsable,
        ViolationCode::UnknownForm,
        ViolationCode::EmptyInput,
    ];

    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            PastTense => "PastTense",
            TopicRecursion => "TopicRecursion",
            ForcBeforeTop => "ForcBeforeTop",
            ForcDoubleFill => "ForcDoubleFill",
            AgreementMismatch => "AgreementMismatch",
            PersonMismatchAnaphor => "PersonMismatchAnaphor",
            NumberMismatchReciprocal => "NumberMismatchReciprocal",
            StpIterationViolation => "StpIterationViolation",
            UnvaluedFeature => "UnvaluedFeature",
            OutOfScopeNegation => "OutOfScopeNegation",
            OutOfScopeQuestion => "OutOfScopeQuestion",
            NotImperative => "NotImperative",
            Unparsable => "Unparsable",
            UnknownForm => "UnknownForm",
            EmptyInput => "EmptyInput",
        }
    }

    /// Problems with the input itself rather than with the sentence.
    pub fn is_input_error(self) -> bool {
        matches!(self, ViolationCode::UnknownForm | ViolationCode::EmptyInput)
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown violation code `{0}`")]
pub struct UnknownCode(pub String);

impl FromStr for ViolationCode {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ViolationCode::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub locus: String,
    /// Input token at fault, when the violation has one.
    pub token: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Grammatical(CoreferenceMap),
    Ungrammatical(Vec<Violation>),
}

/// Everything the pipeline built, for tracing and for the oracles.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Derivation {
    pub structure: Option<ClauseStructure>,
    pub chains: Vec<AChain>,
    pub steps: Vec<ProbeGoalStep>,
    pub coreference: CoreferenceMap,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub input: String,
    pub verdict: Verdict,
    pub trace: Derivation,
}

impl Judgment {
    pub fn is_grammatical(&self) -> bool {
        matches!(self.verdict, Verdict::Grammatical(_))
    }

    pub fn violations(&self) -> &[Violation] {
        match &self.verdict {
            Verdict::Grammatical(_) => &[],
            Verdict::Ungrammatical(v) => v,
        }
    }

    pub fn primary(&self) -> Option<ViolationCode> {
        self.violations().first().map(|v| v.code)
    }

    pub fn is_input_error(&self) -> bool {
        self.primary().is_some_and(ViolationCode::is_input_error)
    }
}

fn token_locus(form: &str, index: usize) -> String {
    format!("`{form}` (token {})", index + 1)
}

fn opt_locus(form: &str, token: Option<usize>) -> String {
    match token {
        Some(i) => token_locus(form, i),
        None => format!("`{form}`"),
    }
}

impl From<&ParseError> for Violation {
    fn from(err: &ParseError) -> Self {
        use ParseError as P;
        let code = match err {
            P::EmptyInput => ViolationCode::EmptyInput,
            P::UnknownForm { .. } => ViolationCode::UnknownForm,
            P::OutOfScopeNegation { .. } => ViolationCode::OutOfScopeNegation,
            P::OutOfScopeQuestion { .. } => ViolationCode::OutOfScopeQuestion,
            P::TopicRecursion { .. } => ViolationCode::TopicRecursion,
            P::ForcDoubleFill { .. } => ViolationCode::ForcDoubleFill,
            P::ForcBeforeTop { .. } => ViolationCode::ForcBeforeTop,
            P::NotImperative { .. } | P::Structure(StructureError::NoVerb) => {
                ViolationCode::NotImperative
            }
            P::Unparsable { .. } | P::Structure(_) => ViolationCode::Unparsable,
        };
        let locus = match (err, err.locus()) {
            (_, Some((form, index))) => token_locus(form, index),
            (P::NotImperative { conjunct }, None) => format!("conjunct {}", conjunct + 1),
            _ => "input".to_string(),
        };
        Violation {
            code,
            locus,
            token: err.locus().map(|(_, i)| i),
            detail: err.to_string(),
        }
    }
}

const STANDING_NOTES: [&str; 3] = [
    "the verb copy at T° supplies φ; only Person:2 is intrinsic to pro",
    "[Spcty] is matched from Top° onto its topic like any other feature",
    "topics count as identical when form and φ coincide",
];

/// Parses and derives without judging. Parse failures are returned as is.
pub fn derive(tokens: &[Token]) -> Result<Derivation, ParseError> {
    derive_structure(parse_imperative(tokens)?)
}

/// Runs remerge, inheritance, Agree and chain formation on a parsed
/// structure. Conjuncts without a TP skip remerge and inheritance.
pub fn derive_structure(mut s: ClauseStructure) -> Result<Derivation, ParseError> {
    let mut d = Derivation::default();
    d.notes.extend(STANDING_NOTES.iter().map(|n| n.to_string()));
    d.notes.append(&mut s.notes);

    for k in 0..s.len() {
        if !s.has_tense(k) {
            d.notes
                .push(format!("conjunct {}: verbless clause, no TP or pro", k + 1));
            continue;
        }
        s.conjuncts[k] = remerge_v_to_t(s.conjuncts[k].clone())?;
        let step = inherit_features(
            &mut s,
            Position::new(k, Slot::TopHead),
            Position::new(k, Slot::TenseHead),
        )
        .expect("T° sits in the complement of its own Top°");
        d.steps.push(step);
    }
    for k in 0..s.len() {
        d.steps.extend(agree_local(&mut s, k));
    }
    let chains = build_chains(&s);
    d.steps.extend(agree_across_phases(&mut s, &chains));
    for (k, slot) in s.topics.iter().enumerate() {
        if let Some(o) = slot.overt() {
            if o.item.is_addressable()
                && o.item.feats.value(FeatureAttribute::Person) != Some(FeatureValue::P2)
            {
                d.notes.push(format!(
                    "conjunct {}: `{}` is read as the addressee (Person 2)",
                    k + 1,
                    o.item.form
                ));
            }
        }
    }
    d.coreference = resolve_pro(&chains);
    if d.coreference.values().any(|a| a.discourse_dependent()) {
        d.notes
            .push("NULLTOP antecedents are fixed by the discourse".to_string());
    }
    d.chains = chains;
    d.structure = Some(s);
    Ok(d)
}

fn collect_violations(d: &Derivation) -> Vec<Violation> {
    let s = d.structure.as_ref().expect("derivation has a structure");
    let mut out = Vec::new();

    for step in d.steps.iter().filter(|st| !st.conflicts.is_empty()) {
        out.push(Violation {
            code: ViolationCode::AgreementMismatch,
            locus: step.probe.to_string(),
            token: None,
            detail: step.to_string(),
        });
    }
    for k in 0..s.len() {
        for slot in [Slot::TopHead, Slot::TenseHead, Slot::LittleV, Slot::Pro] {
            let pos = Position::new(k, slot);
            if let Some(f) = s.feats(pos).filter(|f| !fully_valued(f)) {
                let missing: Vec<&str> = f.unvalued_attrs().iter().map(|a| a.short()).collect();
                out.push(Violation {
                    code: ViolationCode::UnvaluedFeature,
                    locus: pos.to_string(),
                    token: None,
                    detail: format!("unvalued {}", missing.join(",")),
                });
            }
        }
    }
    for report in apply_stp(s, &d.chains) {
        if let StpReport::Violation {
            conjunct,
            form,
            token,
        } = report
        {
            out.push(Violation {
                code: ViolationCode::StpIterationViolation,
                locus: opt_locus(&form, token),
                token,
                detail: format!(
                    "conjunct {} repeats the topic `{form}` instead of leaving it silent",
                    conjunct + 1
                ),
            });
        }
    }
    for b in check_binding(s, &d.coreference) {
        let (code, conjunct, form, token, why) = match b {
            BindingViolation::PersonMismatch {
                conjunct,
                form,
                token,
            } => (
                ViolationCode::PersonMismatchAnaphor,
                conjunct,
                form,
                token,
                "is not 2nd person",
            ),
            BindingViolation::NumberMismatch {
                conjunct,
                form,
                token,
            } => (
                ViolationCode::NumberMismatchReciprocal,
                conjunct,
                form,
                token,
                "needs a plural pro",
            ),
        };
        out.push(Violation {
            code,
            locus: opt_locus(&form, token),
            token,
            detail: format!("anaphor `{form}` in conjunct {} {why}", conjunct + 1),
        });
    }
    for k in 0..s.len() {
        let t_past = s
            .feats(Position::new(k, Slot::TenseHead))
            .is_some_and(|f| f.value(FeatureAttribute::Tense) == Some(FeatureValue::Past));
        if t_past {
            out.push(Violation {
                code: ViolationCode::PastTense,
                locus: Position::new(k, Slot::TenseHead).to_string(),
                token: None,
                detail: "T° is past".to_string(),
            });
        }
        let tag = s.tag(k);
        if let Some(o) = tag
            .iter()
            .find(|o| o.item.feats.value(FeatureAttribute::Tense) == Some(FeatureValue::Past))
        {
            out.push(Violation {
                code: ViolationCode::PastTense,
                locus: opt_locus(&o.item.form, o.token),
                token: o.token,
                detail: format!("tag `{}` is past", o.item.form),
            });
        }
    }
    out
}

pub fn judge_tokens(input: &str, tokens: &[Token]) -> Judgment {
    match derive(tokens) {
        Err(e) => Judgment {
            input: input.to_string(),
            verdict: Verdict::Ungrammatical(vec![Violation::from(&e)]),
            trace: Derivation::default(),
        },
        Ok(d) => {
            let violations = collect_violations(&d);
            let verdict = if violations.is_empty() {
                Verdict::Grammatical(d.coreference.clone())
            } else {
                Verdict::Ungrammatical(violations)
            };
            Judgment {
                input: input.to_string(),
                verdict,
                trace: d,
            }
        }
    }
}

/// Judges one sentence against a lexicon.
pub fn judge(sentence: &str, lex: &Lexicon) -> Judgment {
    match tokenize(sentence, lex) {
        Ok(tokens) => judge_tokens(sentence, &tokens),
        Err(e) => Judgment {
            input: sentence.to_string(),
            verdict: Verdict::Ungrammatical(vec![Violation::from(&e)]),
            trace: Derivation::default(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::seed_lexicon;

    fn run(s: &str) -> Judgment {
        judge(s, &seed_lexicon())
    }

    fn heads(j: &Judgment) -> Vec<String> {
        match &j.verdict {
            Verdict::Grammatical(c) => c.values().map(|a| a.head.to_string()).collect(),
            Verdict::Ungrammatical(v) => panic!("{}: {v:?}", j.input),
        }
    }

    #[test]
    fn future_tag_is_fine_and_past_tag_is_not() {
        assert!(run("taʕaal baʕd saaʕah ʕa tʒaħ").is_grammatical());
        let j = run("taʕaal baʕd saaʕah qa jiʔk");
        assert_eq!(j.primary(), Some(ViolationCode::PastTense));
        assert_eq!(j.violations().len(), 1);
        assert_eq!(j.violations()[0].locus, "`qa` (token 4)");
    }

    #[test]
    fn contrastive_topics_each_bind_their_pro() {
        assert_eq!(
            heads(&run("ʔawlaad ʔimšuu wa banaat ʔibquu")),
            ["ʔawlaad", "banaat"]
        );
    }

    #[test]
    fn negation_is_out_of_scope() {
        assert_eq!(
            run("laa t-imnaʕ-š l-kalaam").primary(),
            Some(ViolationCode::OutOfScopeNegation)
        );
    }

    #[test]
    fn anaphors_must_be_second_person() {
        assert!(run("ʕali ʕarrif nafas-ak").is_grammatical());
        for bad in ["ʕali ʕarrif nafas-i", "ʕali ʕarrif nafas-uh"] {
            let j = run(bad);
            assert_eq!(
                j.violations().iter().map(|v| v.code).collect::<Vec<_>>(),
                [ViolationCode::PersonMismatchAnaphor],
                "{bad}"
            );
        }
    }

    #[test]
    fn reciprocals_need_plural_pro() {
        assert!(run("ʕaawinuu baʕḍ baʕḍ").is_grammatical());
        assert!(run("ʕaawin-ayn baʕḍ baʕḍ").is_grammatical());
        for bad in ["ʕaawin baʕḍ baʕḍ", "ʕaawin-i baʕḍ baʕḍ"] {
            assert_eq!(
                run(bad).primary(),
                Some(ViolationCode::NumberMismatchReciprocal),
                "{bad}"
            );
        }
    }

    #[test]
    fn mismatched_topic_is_an_agreement_error() {
        let j = run("ʕaliya taʕaal");
        assert_eq!(j.primary(), Some(ViolationCode::AgreementMismatch));
        assert!(j.trace.steps.iter().any(|s| !s.conflicts.is_empty()));
    }

    #[test]
    fn stp_violation_is_reported_at_the_repeat() {
        let j = run("ʕali biz l-masaaha wa ʕali ʔimsaħ ṣ-ṣabuura");
        assert_eq!(j.primary(), Some(ViolationCode::StpIterationViolation));
        assert_eq!(j.violations()[0].locus, "`ʕali` (token 5)");
    }

    #[test]
    fn input_errors() {
        let j = run("");
        assert_eq!(j.primary(), Some(ViolationCode::EmptyInput));
        assert!(j.is_input_error());
        let j = run("qulk lak ʔijzaʕ");
        assert_eq!(j.primary(), Some(ViolationCode::UnknownForm));
        assert_eq!(j.violations()[0].locus, "`qulk` (token 1)");
    }

    #[test]
    fn grammatical_means_every_head_is_valued() {
        for text in [
            "ʕali ʔiftaħ l-baab",
            "biz l-masaaha wa ʔimsaħ ṣ-ṣabuura",
            "ʔawlaad ʔimšuu wa banaat ʔibquu",
        ] {
            let j = run(text);
            assert!(j.is_grammatical(), "{text}");
            let s = j.trace.structure.as_ref().unwrap();
            for k in 0..s.len() {
                for slot in [Slot::TopHead, Slot::TenseHead, Slot::LittleV, Slot::Pro] {
                    assert!(fully_valued(s.feats(Position::new(k, slot)).unwrap()));
                }
            }
        }
    }

    #[test]
    fn codes_round_trip_through_text() {
        for c in ViolationCode::ALL {
            assert_eq!(c.as_str().parse::<ViolationCode>().unwrap(), c);
        }
        assert!("Nope".parse::<ViolationCode>().is_err());
    }
}
