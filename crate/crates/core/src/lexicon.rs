//! Glossed lexical items and the line-oriented lexicon format.
//!
//! ```text
//! FORM CAT [GLOSS=...] [PERS=1|2|3] [NUM=Sg|Pl] [GEND=M|F] [TENSE=Pres|Fut|Past]
//!          [ADRS=Addressee] [ROLE=Refl|Recip|Pred]
//! ```
//!
//! `#` starts a comment. Forms are compared byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::features::{Feature, FeatureAttribute, FeatureBundle, FeatureValue};

const SEED: &str = include_str!("seed.lex");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    VerbImp,
    /// Finite non-imperative verb; only occurs in question tags.
    VerbFin,
    Noun,
    Pron,
    ProNull,
    TopicNull,
    Comp,
    QPart,
    WhWord,
    AspPart,
    Conj,
    VocPart,
    Neg,
}

impl Category {
    /// Tag used in lexicon files. Null elements have none: they are inserted
    /// by the parser and never loaded.
    pub fn file_tag(self) -> Option<&'static str> {
        Some(match self {
            Category::VerbImp => "V.IMP",
            Category::VerbFin => "V.FIN",
            Category::Noun => "N",
            Category::Pron => "PRON",
            Category::Comp => "C",
            Category::QPart => "Q",
            Category::WhWord => "WH",
            Category::AspPart => "ASP",
            Category::Conj => "CONJ",
            Category::VocPart => "VOC",
            Category::Neg => "NEG",
            Category::ProNull | Category::TopicNull => return None,
        })
    }

    pub fn from_file_tag(tag: &str) -> Option<Self> {
        use Category::*;
        [
            VerbImp, VerbFin, Noun, Pron, Comp, QPart, WhWord, AspPart, Conj, VocPart, Neg,
        ]
        .into_iter()
        .find(|c| c.file_tag() == Some(tag))
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Category::Noun | Category::Pron)
    }

    /// Elements that sit in Forc°.
    pub fn is_force(self) -> bool {
        matches!(self, Category::Comp | Category::QPart | Category::WhWord)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::ProNull => f.write_str("pro"),
            Category::TopicNull => f.write_str("TOP.NULL"),
            other => f.write_str(other.file_tag().unwrap_or("?")),
        }
    }
}

/// Binding-relevant role of a nominal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Refl,
    Recip,
    /// Predicative phrase, e.g. `maʕak` "with.you"; never an argument.
    Pred,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Refl => "Refl",
            Role::Recip => "Recip",
            Role::Pred => "Pred",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Role::Refl, Role::Recip, Role::Pred]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalItem {
    pub form: String,
    pub gloss: String,
    pub cat: Category,
    pub feats: FeatureBundle,
    pub role: Option<Role>,
}

impl LexicalItem {
    /// The imperative subject: intrinsically 2nd person, valued but
    /// uninterpretable; Number, Gender, Case and [Adrs] arrive by Agree.
    pub fn pro() -> Self {
        use FeatureAttribute::*;
        LexicalItem {
            form: "pro".into(),
            gloss: "pro".into(),
            cat: Category::ProNull,
            feats: FeatureBundle::from_features([
                Feature::valued(Person, FeatureValue::P2).uninterpretable(),
                Feature::unvalued(Number),
                Feature::unvalued(Gender),
                Feature::unvalued(Case),
                Feature::unvalued(Adrs),
            ]),
            role: None,
        }
    }

    /// Null topic heading a topicless stretch of discourse. Its referent is
    /// supplied by the discourse, so only [Adrs] is valued.
    pub fn null_topic() -> Self {
        use FeatureAttribute::*;
        LexicalItem {
            form: "NULLTOP".into(),
            gloss: "null.topic".into(),
            cat: Category::TopicNull,
            feats: FeatureBundle::from_features([
                Feature::unvalued(Person),
                Feature::unvalued(Number),
                Feature::unvalued(Gender),
                Feature::valued(Adrs, FeatureValue::Addressee),
                Feature::unvalued(Spcty),
            ]),
            role: None,
        }
    }

    /// Unpronounced repeat of a controlling topic in a later conjunct.
    pub fn silent_topic() -> Self {
        use FeatureAttribute::*;
        LexicalItem {
            form: "⟨silent⟩".into(),
            gloss: "silent.topic".into(),
            cat: Category::TopicNull,
            feats: FeatureBundle::from_features([
                Feature::unvalued(Person),
                Feature::unvalued(Number),
                Feature::unvalued(Gender),
                Feature::unvalued(Adrs),
                Feature::unvalued(Spcty),
            ]),
            role: None,
        }
    }

    /// Nominal that can be addressed and so can be an aboutness topic.
    pub fn is_addressable(&self) -> bool {
        self.cat.is_nominal() && self.feats.value(FeatureAttribute::Adrs).is_some()
    }

    /// Renders the item as one lexicon line.
    pub fn to_line(&self) -> String {
        let mut out = format!("{} {}", self.form, self.cat.file_tag().unwrap_or("?"));
        if !self.gloss.is_empty() {
            out.push_str(&format!(" GLOSS={}", self.gloss));
        }
        for f in self.feats.iter() {
            if let Some(v) = f.value() {
                out.push_str(&format!(" {}={}", f.attr.file_key(), v));
            }
        }
        if let Some(r) = self.role {
            out.push_str(&format!(" ROLE={}", r.as_str()));
        }
        out
    }
}

impl fmt::Display for LexicalItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} {})", self.form, self.cat, self.gloss)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: expected `FORM CAT [KEY=VALUE ...]`")]
    Malformed { line: usize },
    #[error("line {line}: unknown category `{tag}`")]
    UnknownCategory { line: usize, tag: String },
    #[error("line {line}: unknown attribute `{key}`")]
    UnknownAttribute { line: usize, key: String },
    #[error("line {line}: `{value}` is not a legal value for {key}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: {key} given twice")]
    RepeatedKey { line: usize, key: String },
    #[error("line {line}: duplicate entry `{form}` with gloss `{gloss}`")]
    Duplicate {
        line: usize,
        form: String,
        gloss: String,
    },
    #[error("line {line}: {reason}")]
    IllFormed { line: usize, reason: String },
}

/// Form to entries; homographs are kept in load order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexicalItem>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = &LexicalItem> {
        self.entries.values().flatten()
    }

    /// All entries for `form`; empty iff the form is unknown.
    pub fn lookup(&self, form: &str) -> &[LexicalItem] {
        self.entries.get(form).map(Vec::as_slice).unwrap_or(&[])
    }

    fn add(&mut self, item: LexicalItem, line: usize) -> Result<(), LexiconError> {
        let slot = self.entries.entry(item.form.clone()).or_default();
        if slot.iter().any(|e| e.gloss == item.gloss) {
            return Err(LexiconError::Duplicate {
                line,
                form: item.form,
                gloss: item.gloss,
            });
        }
        slot.push(item);
        Ok(())
    }

    /// Serializes the lexicon back into the file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for item in self.items() {
            out.push_str(&item.to_line());
            out.push('\n');
        }
        out
    }
}

pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        lex.add(parse_line(text, line)?, line)?;
    }
    Ok(lex)
}

/// The built-in lexicon covering the shipped corpus.
pub fn seed_lexicon() -> Lexicon {
    load_lexicon(SEED).expect("seed lexicon is well-formed")
}

pub fn lookup<'a>(lex: &'a Lexicon, form: &str) -> &'a [LexicalItem] {
    lex.lookup(form)
}

fn parse_line(text: &str, line: usize) -> Result<LexicalItem, LexiconError> {
    let mut parts = text.split_whitespace();
    let (Some(form), Some(tag)) = (parts.next(), parts.next()) else {
        return Err(LexiconError::Malformed { line });
    };
    let cat = Category::from_file_tag(tag).ok_or_else(|| LexiconError::UnknownCategory {
        line,
        tag: tag.to_string(),
    })?;

    let mut gloss = None;
    let mut role = None;
    let mut feats = FeatureBundle::new();
    for kv in parts {
        let Some((key, value)) = kv.split_once('=') else {
            return Err(LexiconError::Malformed { line });
        };
        let repeated = || LexiconError::RepeatedKey {
            line,
            key: key.to_string(),
        };
        let bad = || LexiconError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "GLOSS" => {
                if gloss.replace(value.to_string()).is_some() {
                    return Err(repeated());
                }
            }
            "ROLE" => {
                if role.replace(Role::parse(value).ok_or_else(bad)?).is_some() {
                    return Err(repeated());
                }
            }
            _ => {
                let attr = FeatureAttribute::from_file_key(key)
                    .filter(|a| lexical_attr(*a))
                    .ok_or_else(|| LexiconError::UnknownAttribute {
                        line,
                        key: key.to_string(),
                    })?;
                let v = FeatureValue::parse(attr, value).ok_or_else(bad)?;
                if feats.contains(attr) {
                    return Err(repeated());
                }
                feats.insert(Feature::valued(attr, v));
            }
        }
    }

    let ill = |reason: &str| LexiconError::IllFormed {
        line,
        reason: reason.to_string(),
    };
    match cat {
        Category::VerbImp => {
            if feats.value(FeatureAttribute::Person).is_none()
                || feats.value(FeatureAttribute::Number).is_none()
            {
                return Err(ill("imperative verbs need PERS and NUM"));
            }
            match feats.value(FeatureAttribute::Tense) {
                None => feats.insert(Feature::valued(FeatureAttribute::Tense, FeatureValue::Pres)),
                Some(FeatureValue::Past) => {
                    return Err(ill("imperative verbs are present or future, never past"))
                }
                Some(_) => {}
            }
        }
        Category::AspPart | Category::VerbFin if feats.value(FeatureAttribute::Tense).is_none() => {
            return Err(ill("aspect particles and tag verbs need TENSE"));
        }
        _ => {}
    }
    if feats.contains(FeatureAttribute::Adrs) && !cat.is_nominal() {
        return Err(ill("ADRS is only meaningful on nominals"));
    }
    if role.is_some() && cat != Category::Noun {
        return Err(ill("ROLE is only meaningful on nouns"));
    }
    // Verbal agreement is uninterpretable; nominal features are interpretable.
    if matches!(cat, Category::VerbImp | Category::VerbFin) {
        for attr in FeatureAttribute::PHI {
            if let Some(f) = feats.get(attr).copied() {
                feats.insert(f.uninterpretable());
            }
        }
    }

    Ok(LexicalItem {
        form: form.to_string(),
        gloss: gloss.unwrap_or_default(),
        cat,
        feats,
        role,
    })
}

fn lexical_attr(attr: FeatureAttribute) -> bool {
    use FeatureAttribute::*;
    matches!(attr, Person | Number | Gender | Tense | Adrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use FeatureAttribute::*;
    use FeatureValue::*;

    #[test]
    fn loads_an_imperative_verb_line() {
        let lex = load_lexicon("ʔiktub-uu V.IMP GLOSS=write.2MPL PERS=2 NUM=Pl GEND=M TENSE=Pres")
            .unwrap();
        let items = lex.lookup("ʔiktub-uu");
        assert_eq!(items.len(), 1);
        let item = &items[0];
        assert_eq!(item.cat, Category::VerbImp);
        assert_eq!(item.gloss, "write.2MPL");
        assert_eq!(item.feats.value(Person), Some(P2));
        assert_eq!(item.feats.value(Number), Some(Pl));
        assert_eq!(item.feats.value(Gender), Some(M));
        assert_eq!(item.feats.value(Tense), Some(Pres));
    }

    #[test]
    fn empty_source_is_empty_lexicon() {
        assert!(load_lexicon("").unwrap().is_empty());
        assert!(load_lexicon("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn out_of_range_person_is_rejected() {
        let err = load_lexicon("x N\ny N PERS=4").unwrap_err();
        assert!(
            matches!(err, LexiconError::BadValue { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn unknown_category_and_attribute() {
        assert!(matches!(
            load_lexicon("x ADV").unwrap_err(),
            LexiconError::UnknownCategory { line: 1, .. }
        ));
        assert!(matches!(
            load_lexicon("x N COLOR=red").unwrap_err(),
            LexiconError::UnknownAttribute { line: 1, .. }
        ));
        assert!(matches!(
            load_lexicon("lonely").unwrap_err(),
            LexiconError::Malformed { line: 1 }
        ));
    }

    #[test]
    fn duplicate_form_gloss_is_rejected_but_homographs_are_kept() {
        let err = load_lexicon("a N GLOSS=x\na N GLOSS=x").unwrap_err();
        assert!(matches!(err, LexiconError::Duplicate { line: 2, .. }));
        let lex = load_lexicon("a N GLOSS=x\na PRON GLOSS=y").unwrap();
        assert_eq!(lex.lookup("a").len(), 2);
    }

    #[test]
    fn past_imperative_is_rejected() {
        let err = load_lexicon("jaa V.IMP PERS=2 NUM=Sg TENSE=Past").unwrap_err();
        assert!(matches!(err, LexiconError::IllFormed { .. }));
    }

    #[test]
    fn seed_entries_read_off_the_glosses() {
        let lex = seed_lexicon();
        let ali = &lex.lookup("ʕali")[0];
        assert_eq!(ali.cat, Category::Noun);
        assert_eq!(ali.feats.value(Person), Some(P3));
        assert_eq!(ali.feats.value(Number), Some(Sg));
        assert_eq!(ali.feats.value(Gender), Some(M));
        assert_eq!(lex.lookup("muh")[0].cat, Category::QPart);
        let qa = &lex.lookup("qa")[0];
        assert_eq!(qa.cat, Category::AspPart);
        assert_eq!(qa.feats.value(Tense), Some(Past));
    }

    #[test]
    fn lookup_examples() {
        let lex = seed_lexicon();
        let come = lookup(&lex, "taʕaal");
        assert_eq!(come.len(), 1);
        assert_eq!(come[0].cat, Category::VerbImp);
        assert_eq!(
            (come[0].feats.value(Number), come[0].feats.value(Gender)),
            (Some(Sg), Some(M))
        );
        let come_f = lookup(&lex, "taʕaal-i");
        assert_eq!(come_f[0].feats.value(Gender), Some(F));
        assert!(lookup(&lex, "zzz").is_empty());
    }

    #[test]
    fn seed_round_trips_through_text() {
        let lex = seed_lexicon();
        assert_eq!(load_lexicon(&lex.to_text()).unwrap(), lex);
    }

    #[test]
    fn seed_imperatives_are_never_past() {
        for item in seed_lexicon()
            .items()
            .filter(|i| i.cat == Category::VerbImp)
        {
            assert_ne!(item.feats.value(Tense), Some(Past), "{item}");
        }
    }

    #[test]
    fn pro_is_second_person_with_open_slots() {
        let pro = LexicalItem::pro();
        assert_eq!(pro.feats.value(Person), Some(P2));
        assert_eq!(pro.feats.unvalued_attrs(), vec![Number, Gender, Case, Adrs]);
    }
}
