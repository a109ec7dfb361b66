//! Clause construction: tokenizing, Merge, V-to-T remerge and the
//! deterministic parse of a (possibly coordinated) imperative into
//! `TopP > (ForcP) > (FocP) > TP > vP > VP` spines.

use std::fmt;

use thiserror::Error;

use crate::features::{Feature, FeatureAttribute, FeatureBundle, FeatureValue};
use crate::lexicon::{Category, LexicalItem, Lexicon, Role};

/// The projections a head can label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Projection {
    Top,
    Forc,
    Foc,
    T,
    LittleV,
    V,
    D,
}

impl Projection {
    pub fn phrase_name(self) -> &'static str {
        match self {
            Projection::Top => "TopP",
            Projection::Forc => "ForcP",
            Projection::Foc => "FocP",
            Projection::T => "TP",
            Projection::LittleV => "vP",
            Projection::V => "VP",
            Projection::D => "DP",
        }
    }

    pub fn head_name(self) -> &'static str {
        match self {
            Projection::Top => "Top°",
            Projection::Forc => "Forc°",
            Projection::Foc => "Foc°",
            Projection::T => "T°",
            Projection::LittleV => "v°",
            Projection::V => "V°",
            Projection::D => "D°",
        }
    }

    /// Top° and v° are the phase heads; everything else is transparent.
    pub fn is_phase(self) -> bool {
        matches!(self, Projection::Top | Projection::LittleV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Phrase(Projection),
    Head(Projection),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Phrase(p) => f.write_str(p.phrase_name()),
            Label::Head(p) => f.write_str(p.head_name()),
        }
    }
}

/// A lexical item in a position, tagged with the input token it came from.
/// Inserted null elements have no token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupant {
    pub item: LexicalItem,
    pub token: Option<usize>,
}

impl Occupant {
    pub fn new(item: LexicalItem, token: Option<usize>) -> Self {
        Occupant { item, token }
    }
}

/// Record of a remerged copy: which lower position the material came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyLink {
    pub from: Projection,
    pub token: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjunctKind {
    /// Fronted non-aboutness phrase (not a topic).
    Dislocated,
    /// Material between Forc° and the verb.
    ForcComplement,
    /// Second and later postverbal nominals.
    Object,
    /// Clause-final aspect particle and tag verb.
    Tag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjunct {
    pub kind: AdjunctKind,
    pub node: Occupant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntacticObject {
    pub label: Label,
    pub head_feats: FeatureBundle,
    pub occupant: Option<Occupant>,
    pub spec: Option<Box<SyntacticObject>>,
    pub comp: Option<Box<SyntacticObject>>,
    pub phase: bool,
    pub copies: Vec<CopyLink>,
    pub adjuncts: Vec<Adjunct>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("{label} already has a specifier")]
    Saturated { label: Label },
    #[error("{label} cannot select a complement")]
    NotSelecting { label: Label },
    #[error("only a DP can be merged as the specifier of {label}")]
    SpecNotNominal { label: Label },
    #[error("no imperative verb under TP")]
    NoVerb,
}

impl SyntacticObject {
    fn bare(label: Label, head_feats: FeatureBundle, occupant: Option<Occupant>) -> Self {
        let phase = matches!(label, Label::Phrase(p) if p.is_phase());
        SyntacticObject {
            label,
            head_feats,
            occupant,
            spec: None,
            comp: None,
            phase,
            copies: Vec::new(),
            adjuncts: Vec::new(),
        }
    }

    pub fn head(proj: Projection, feats: FeatureBundle, occupant: Option<Occupant>) -> Self {
        Self::bare(Label::Head(proj), feats, occupant)
    }

    /// A nominal phrase; its features start as the item's own.
    pub fn dp(occupant: Occupant) -> Self {
        let feats = occupant.item.feats.clone();
        Self::bare(Label::Phrase(Projection::D), feats, Some(occupant))
    }

    /// Projects a head with no complement.
    pub fn project(head: SyntacticObject) -> Result<Self, StructureError> {
        match head.label {
            Label::Head(p) if p != Projection::D => {
                Ok(Self::bare(Label::Phrase(p), head.head_feats, head.occupant))
            }
            label => Err(StructureError::NotSelecting { label }),
        }
    }

    pub fn projection(&self) -> Option<Projection> {
        match self.label {
            Label::Phrase(p) => Some(p),
            Label::Head(_) => None,
        }
    }

    /// The clausal spine from this node down through complements.
    pub fn spine(&self) -> Vec<&SyntacticObject> {
        let mut out = Vec::new();
        let mut cur = Some(self);
        while let Some(node) = cur {
            out.push(node);
            cur = node
                .comp
                .as_deref()
                .filter(|c| c.label != Label::Phrase(Projection::D));
        }
        out
    }

    pub fn spine_labels(&self) -> Vec<Label> {
        self.spine().into_iter().map(|n| n.label).collect()
    }

    pub fn find(&self, proj: Projection) -> Option<&SyntacticObject> {
        self.spine()
            .into_iter()
            .find(|n| n.label == Label::Phrase(proj))
    }

    pub fn find_mut(&mut self, proj: Projection) -> Option<&mut SyntacticObject> {
        if self.label == Label::Phrase(proj) {
            return Some(self);
        }
        match self.comp.as_deref_mut() {
            Some(c) if c.label != Label::Phrase(Projection::D) => c.find_mut(proj),
            _ => None,
        }
    }

    /// Removes the first node labeled `proj` below the root, splicing its
    /// complement into its place. Returns the removed node without its
    /// complement.
    pub fn excise(&mut self, proj: Projection) -> Option<SyntacticObject> {
        let child = self.comp.as_deref_mut()?;
        if child.label == Label::Phrase(proj) {
            let mut removed = *self.comp.take()?;
            self.comp = removed.comp.take();
            return Some(removed);
        }
        if child.label == Label::Phrase(Projection::D) {
            return None;
        }
        child.excise(proj)
    }

    /// Inserts `node` (whose complement is ignored) directly above the first
    /// spine node labeled `below`.
    pub fn insert_above(&mut self, below: Projection, mut node: SyntacticObject) -> bool {
        let Some(child) = self.comp.as_deref_mut() else {
            return false;
        };
        if child.label == Label::Phrase(below) {
            node.comp = self.comp.take();
            self.comp = Some(Box::new(node));
            return true;
        }
        if child.label == Label::Phrase(Projection::D) {
            return false;
        }
        child.insert_above(below, node)
    }

    /// Bracketed rendering; the lower copy of a remerged verb is shown in
    /// angle brackets.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, None);
        out
    }

    fn render_into(&self, out: &mut String, raised: Option<usize>) {
        match self.label {
            Label::Phrase(Projection::D) | Label::Head(_) => {
                out.push_str(self.occupant.as_ref().map_or("∅", |o| o.item.form.as_str()));
            }
            Label::Phrase(p) => {
                out.push('[');
                out.push_str(p.phrase_name());
                let pieces = |kind: AdjunctKind| {
                    self.adjuncts
                        .iter()
                        .filter(move |a| a.kind == kind)
                        .map(|a| a.node.item.form.as_str())
                };
                for form in pieces(AdjunctKind::Dislocated) {
                    out.push(' ');
                    out.push_str(form);
                }
                if let Some(spec) = &self.spec {
                    out.push(' ');
                    spec.render_into(out, raised);
                }
                out.push(' ');
                let mut raised = raised;
                match (&self.occupant, p) {
                    (Some(o), Projection::T) => {
                        raised = o.token;
                        out.push_str(&format!("{}+T°", o.item.form));
                    }
                    (Some(o), Projection::V) if o.token.is_some() && o.token == raised => {
                        out.push_str(&format!("⟨{}⟩", o.item.form));
                    }
                    (Some(o), _) => out.push_str(&o.item.form),
                    (None, _) => out.push_str(p.head_name()),
                }
                for form in pieces(AdjunctKind::ForcComplement) {
                    out.push(' ');
                    out.push_str(form);
                }
                if let Some(comp) = &self.comp {
                    out.push(' ');
                    comp.render_into(out, raised);
                }
                for kind in [AdjunctKind::Object, AdjunctKind::Tag] {
                    for form in pieces(kind) {
                        out.push(' ');
                        out.push_str(form);
                    }
                }
                out.push(']');
            }
        }
    }
}

/// Merge. A head takes its sister as complement and projects; a phrase takes
/// a DP as specifier, which satisfies its Edge Feature.
pub fn merge(a: SyntacticObject, b: SyntacticObject) -> Result<SyntacticObject, StructureError> {
    match a.label {
        Label::Head(Projection::D) => Err(StructureError::NotSelecting { label: a.label }),
        Label::Head(_) => {
            let mut phrase = SyntacticObject::project(a)?;
            phrase.comp = Some(Box::new(b));
            Ok(phrase)
        }
        Label::Phrase(Projection::D) => Err(StructureError::NotSelecting { label: a.label }),
        Label::Phrase(_) => {
            if b.label != Label::Phrase(Projection::D) {
                return Err(StructureError::SpecNotNominal { label: a.label });
            }
            if a.spec.is_some() {
                return Err(StructureError::Saturated { label: a.label });
            }
            let mut a = a;
            a.spec = Some(Box::new(b));
            if a.head_feats.contains(FeatureAttribute::EdgeF) {
                a.head_feats.satisfy(FeatureAttribute::EdgeF);
            }
            Ok(a)
        }
    }
}

/// Copies the verb into T°, recording the lower site, and satisfies T's
/// EPP. A clause whose T° is already filled is returned unchanged.
pub fn remerge_v_to_t(mut clause: SyntacticObject) -> Result<SyntacticObject, StructureError> {
    let tp = clause
        .find_mut(Projection::T)
        .ok_or(StructureError::NoVerb)?;
    if tp.occupant.is_some() {
        return Ok(clause);
    }
    let verb = tp
        .find(Projection::V)
        .and_then(|vp| vp.occupant.clone())
        .filter(|o| o.item.cat == Category::VerbImp)
        .ok_or(StructureError::NoVerb)?;
    tp.copies.push(CopyLink {
        from: Projection::V,
        token: verb.token,
    });
    tp.occupant = Some(verb);
    tp.head_feats.satisfy(FeatureAttribute::EPP);
    Ok(clause)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopicStatus {
    Overt(Occupant),
    /// Chain-opening null topic whose referent the discourse supplies.
    Null,
    /// Unpronounced topic of a later conjunct, controlled from the left.
    Silent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSlot {
    pub status: TopicStatus,
    pub position: usize,
}

impl TopicSlot {
    pub fn is_overt(&self) -> bool {
        matches!(self.status, TopicStatus::Overt(_))
    }

    pub fn overt(&self) -> Option<&Occupant> {
        match &self.status {
            TopicStatus::Overt(o) => Some(o),
            _ => None,
        }
    }
}

/// Addressable positions inside one conjunct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Topic,
    TopHead,
    TenseHead,
    /// The verb copy at T°; its features are the agreement morphology.
    VerbCopy,
    LittleV,
    Pro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub conjunct: usize,
    pub slot: Slot,
}

impl Position {
    pub fn new(conjunct: usize, slot: Slot) -> Self {
        Position { conjunct, slot }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.conjunct + 1;
        match self.slot {
            Slot::Topic => write!(f, "topic{n}"),
            Slot::TopHead => write!(f, "Top°{n}"),
            Slot::TenseHead => write!(f, "T°{n}"),
            Slot::VerbCopy => write!(f, "V@T{n}"),
            Slot::LittleV => write!(f, "v°{n}"),
            Slot::Pro => write!(f, "pro{n}"),
        }
    }
}

/// A parsed sentence: one spine per conjunct plus its topic slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseStructure {
    pub conjuncts: Vec<SyntacticObject>,
    pub topics: Vec<TopicSlot>,
    pub notes: Vec<String>,
}

impl ClauseStructure {
    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn feats(&self, pos: Position) -> Option<&FeatureBundle> {
        let root = self.conjuncts.get(pos.conjunct)?;
        match pos.slot {
            Slot::Topic => root
                .find(Projection::Top)?
                .spec
                .as_ref()
                .map(|s| &s.head_feats),
            Slot::TopHead => root.find(Projection::Top).map(|n| &n.head_feats),
            Slot::TenseHead => root.find(Projection::T).map(|n| &n.head_feats),
            Slot::VerbCopy => root
                .find(Projection::T)?
                .occupant
                .as_ref()
                .map(|o| &o.item.feats),
            Slot::LittleV => root.find(Projection::LittleV).map(|n| &n.head_feats),
            Slot::Pro => root
                .find(Projection::LittleV)?
                .spec
                .as_ref()
                .map(|s| &s.head_feats),
        }
    }

    /// Mutable access to a position's features. The verb copy is read-only.
    pub fn feats_mut(&mut self, pos: Position) -> Option<&mut FeatureBundle> {
        let root = self.conjuncts.get_mut(pos.conjunct)?;
        match pos.slot {
            Slot::Topic => root
                .find_mut(Projection::Top)?
                .spec
                .as_mut()
                .map(|s| &mut s.head_feats),
            Slot::TopHead => root.find_mut(Projection::Top).map(|n| &mut n.head_feats),
            Slot::TenseHead => root.find_mut(Projection::T).map(|n| &mut n.head_feats),
            Slot::VerbCopy => None,
            Slot::LittleV => root
                .find_mut(Projection::LittleV)
                .map(|n| &mut n.head_feats),
            Slot::Pro => root
                .find_mut(Projection::LittleV)?
                .spec
                .as_mut()
                .map(|s| &mut s.head_feats),
        }
    }

    /// Whether the conjunct has a TP (verbless clauses do not).
    pub fn has_tense(&self, conjunct: usize) -> bool {
        self.conjuncts
            .get(conjunct)
            .and_then(|c| c.find(Projection::T))
            .is_some()
    }

    /// The imperative verb of a conjunct, if any.
    pub fn verb(&self, conjunct: usize) -> Option<&Occupant> {
        self.conjuncts
            .get(conjunct)?
            .find(Projection::V)?
            .occupant
            .as_ref()
    }

    /// Postverbal nominals of a conjunct, in order.
    pub fn objects(&self, conjunct: usize) -> Vec<&Occupant> {
        let Some(vp) = self
            .conjuncts
            .get(conjunct)
            .and_then(|c| c.find(Projection::V))
        else {
            return Vec::new();
        };
        let mut out: Vec<&Occupant> = vp.comp.iter().filter_map(|c| c.occupant.as_ref()).collect();
        out.extend(
            vp.adjuncts
                .iter()
                .filter(|a| a.kind == AdjunctKind::Object)
                .map(|a| &a.node),
        );
        out
    }

    /// Tag material (aspect particle and finite verb) of a conjunct.
    pub fn tag(&self, conjunct: usize) -> Vec<&Occupant> {
        self.conjuncts
            .get(conjunct)
            .map(|c| {
                c.spine()
                    .into_iter()
                    .flat_map(|n| n.adjuncts.iter())
                    .filter(|a| a.kind == AdjunctKind::Tag)
                    .map(|a| &a.node)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn pro_count(&self) -> usize {
        (0..self.len())
            .filter(|&k| self.feats(Position::new(k, Slot::Pro)).is_some())
            .count()
    }

    pub fn render(&self) -> String {
        self.conjuncts
            .iter()
            .map(SyntacticObject::render)
            .collect::<Vec<_>>()
            .join(" & ")
    }
}

/// One resolved input token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub text: String,
    pub item: LexicalItem,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("unknown form `{form}`")]
    UnknownForm { form: String, index: usize },
    #[error("negation `{form}` is outside the imperative fragment")]
    OutOfScopeNegation { form: String, index: usize },
    #[error("information question with `{form}` is outside the imperative fragment")]
    OutOfScopeQuestion { form: String, index: usize },
    #[error("`{form}` would be a second aboutness topic")]
    TopicRecursion { form: String, index: usize },
    #[error("`{form}` would be a second element in Forc°")]
    ForcDoubleFill { form: String, index: usize },
    #[error("topic `{form}` follows a Forc element")]
    ForcBeforeTop { form: String, index: usize },
    #[error("conjunct {} has no imperative verb", conjunct + 1)]
    NotImperative { conjunct: usize },
    #[error("cannot place `{form}` in the clause")]
    Unparsable { form: String, index: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl ParseError {
    /// The offending token, when there is one.
    pub fn locus(&self) -> Option<(&str, usize)> {
        use ParseError::*;
        match self {
            UnknownForm { form, index }
            | OutOfScopeNegation { form, index }
            | OutOfScopeQuestion { form, index }
            | TopicRecursion { form, index }
            | ForcDoubleFill { form, index }
            | ForcBeforeTop { form, index }
            | Unparsable { form, index } => Some((form, *index)),
            _ => None,
        }
    }
}

const TRAILING: &[char] = &['!', '?', ',', '.'];

/// Splits a sentence on whitespace and resolves each token. `form/GLOSS`
/// selects a homograph by gloss; otherwise the first entry wins. Negation
/// is reported before unknown forms since it marks the whole input as out of
/// scope.
pub fn tokenize(sentence: &str, lex: &Lexicon) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut unknown = None;
    let words = sentence
        .split_whitespace()
        .map(|w| w.trim_end_matches(TRAILING))
        .filter(|w| !w.is_empty());
    for (index, text) in words.enumerate() {
        let (form, gloss) = match text.split_once('/') {
            Some((f, g)) => (f, Some(g)),
            None => (text, None),
        };
        let found = lex
            .lookup(form)
            .iter()
            .find(|i| gloss.is_none_or(|g| i.gloss == g));
        match found {
            Some(item) => tokens.push(Token {
                index,
                text: text.to_string(),
                item: item.clone(),
            }),
            None => {
                unknown.get_or_insert(ParseError::UnknownForm {
                    form: text.to_string(),
                    index,
                });
            }
        }
    }
    if let Some(neg) = tokens.iter().find(|t| t.item.cat == Category::Neg) {
        return Err(ParseError::OutOfScopeNegation {
            form: neg.text.clone(),
            index: neg.index,
        });
    }
    if let Some(err) = unknown {
        return Err(err);
    }
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    Ok(tokens)
}

/// Parses resolved tokens into one spine per conjunct, inserting *pro* in
/// every Spec,vP and a null topic when the first conjunct has none.
pub fn parse_imperative(tokens: &[Token]) -> Result<ClauseStructure, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    if let Some(neg) = tokens.iter().find(|t| t.item.cat == Category::Neg) {
        return Err(ParseError::OutOfScopeNegation {
            form: neg.text.clone(),
            index: neg.index,
        });
    }
    let mut structure = ClauseStructure {
        conjuncts: Vec::new(),
        topics: Vec::new(),
        notes: Vec::new(),
    };
    for (k, part) in tokens.split(|t| t.item.cat == Category::Conj).enumerate() {
        if part.is_empty() {
            return Err(ParseError::NotImperative { conjunct: k });
        }
        let pieces = scan_conjunct(part, k)?;
        let (root, slot, note) = build_conjunct(pieces, k)?;
        structure.conjuncts.push(root);
        structure.topics.push(slot);
        structure.notes.extend(note);
    }
    Ok(structure)
}

#[derive(Default)]
struct Pieces {
    topic: Option<Occupant>,
    dislocated: Vec<Occupant>,
    forc: Option<Occupant>,
    forc_comp: Vec<Occupant>,
    verb: Option<Occupant>,
    post: Vec<Occupant>,
    tag: Vec<Occupant>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Zone {
    Pre,
    Forc,
    Post,
    Tag,
}

fn occ(t: &Token) -> Occupant {
    Occupant::new(t.item.clone(), Some(t.index))
}

fn err_at(t: &Token, make: fn(String, usize) -> ParseError) -> ParseError {
    make(t.text.clone(), t.index)
}

fn scan_conjunct(part: &[Token], k: usize) -> Result<Pieces, ParseError> {
    let mut p = Pieces::default();
    let mut zone = Zone::Pre;
    let mut i = 0;
    while i < part.len() {
        let t = &part[i];
        let cat = t.item.cat;
        match (zone, cat) {
            (Zone::Pre | Zone::Forc, Category::VerbImp) => {
                p.verb = Some(occ(t));
                zone = Zone::Post;
            }
            (Zone::Pre, Category::VocPart) => {
                let next = part
                    .get(i + 1)
                    .filter(|n| n.item.cat.is_nominal())
                    .ok_or_else(|| {
                        err_at(t, |form, index| ParseError::Unparsable { form, index })
                    })?;
                set_topic(&mut p, next)?;
                i += 1;
            }
            (Zone::Pre, c) if c.is_nominal() => {
                if t.item.is_addressable() {
                    set_topic(&mut p, t)?;
                } else {
                    p.dislocated.push(occ(t));
                }
            }
            (Zone::Pre, c) if c.is_force() => {
                p.forc = Some(occ(t));
                zone = Zone::Forc;
            }
            (Zone::Forc, c) if c.is_force() => {
                return Err(err_at(t, |form, index| ParseError::ForcDoubleFill {
                    form,
                    index,
                }));
            }
            (Zone::Forc, c) if c.is_nominal() => p.forc_comp.push(occ(t)),
            (Zone::Post, c) if c.is_nominal() => p.post.push(occ(t)),
            (Zone::Post | Zone::Tag, Category::AspPart | Category::VerbFin) => {
                p.tag.push(occ(t));
                zone = Zone::Tag;
            }
            _ => {
                return Err(err_at(t, |form, index| ParseError::Unparsable {
                    form,
                    index,
                }))
            }
        }
        i += 1;
    }

    if let Some(f) = &p.forc {
        let args: Vec<&Occupant> = p
            .forc_comp
            .iter()
            .filter(|o| o.item.role != Some(Role::Pred))
            .collect();
        if args.len() >= 2 && args.iter().any(|o| o.item.is_addressable()) {
            let locus = args
                .iter()
                .find(|o| o.item.is_addressable() && o.item.cat == Category::Noun)
                .or_else(|| args.iter().find(|o| o.item.is_addressable()))
                .expect("an addressable argument exists");
            return Err(ParseError::ForcBeforeTop {
                form: locus.item.form.clone(),
                index: locus.token.unwrap_or_default(),
            });
        }
        if f.item.cat == Category::WhWord {
            if let Some(v) = &p.verb {
                if v.item.feats.value(FeatureAttribute::Person) == Some(FeatureValue::P1) {
                    return Err(ParseError::OutOfScopeQuestion {
                        form: f.item.form.clone(),
                        index: f.token.unwrap_or_default(),
                    });
                }
            }
        }
    }
    let verbless_ok = p
        .forc
        .as_ref()
        .is_some_and(|f| f.item.cat == Category::Comp && !p.forc_comp.is_empty());
    if p.verb.is_none() && !verbless_ok {
        return Err(ParseError::NotImperative { conjunct: k });
    }
    Ok(p)
}

fn set_topic(p: &mut Pieces, t: &Token) -> Result<(), ParseError> {
    if p.topic.is_some() {
        return Err(err_at(t, |form, index| ParseError::TopicRecursion {
            form,
            index,
        }));
    }
    p.topic = Some(occ(t));
    Ok(())
}

fn top_head() -> SyntacticObject {
    use FeatureAttribute::*;
    SyntacticObject::head(
        Projection::Top,
        FeatureBundle::from_features([
            Feature::unvalued(Person),
            Feature::unvalued(Number),
            Feature::unvalued(Gender),
            Feature::unvalued(Adrs),
            Feature::valued(Spcty, FeatureValue::Specific),
            Feature::valued(Tense, FeatureValue::Pres),
            Feature::valued(Case, FeatureValue::Nom).uninterpretable(),
            Feature::unvalued(EdgeF),
        ]),
        None,
    )
}

fn tense_head() -> SyntacticObject {
    SyntacticObject::head(
        Projection::T,
        FeatureBundle::from_features([Feature::unvalued(FeatureAttribute::EPP)]),
        None,
    )
}

fn little_v_head() -> SyntacticObject {
    use FeatureAttribute::*;
    SyntacticObject::head(
        Projection::LittleV,
        FeatureBundle::from_features([
            Feature::unvalued(Person),
            Feature::unvalued(Number),
            Feature::unvalued(Gender),
            Feature::unvalued(Adrs),
            Feature::unvalued(EdgeF),
        ]),
        None,
    )
}

fn topic_dp(o: Occupant) -> SyntacticObject {
    let mut dp = SyntacticObject::dp(o);
    if !dp.head_feats.contains(FeatureAttribute::Spcty) {
        dp.head_feats
            .insert(Feature::unvalued(FeatureAttribute::Spcty));
    }
    dp
}

fn adjunct(kind: AdjunctKind, node: Occupant) -> Adjunct {
    Adjunct { kind, node }
}

fn build_conjunct(
    mut p: Pieces,
    k: usize,
) -> Result<(SyntacticObject, TopicSlot, Option<String>), ParseError> {
    let mut note = None;
    if p.topic.is_none() && p.verb.is_some() {
        let first_post = p.post.first().map(|o| &o.item);
        let variant = first_post.is_some_and(|item| {
            item.cat == Category::Pron
                && item.is_addressable()
                && item.feats.value(FeatureAttribute::Person) == Some(FeatureValue::P2)
        });
        if variant {
            let moved = p.post.remove(0);
            note = Some(format!(
                "conjunct {}: postverbal `{}` read as the topic (linearization variant)",
                k + 1,
                moved.item.form
            ));
            p.topic = Some(moved);
        }
    }

    let clause_top = match p.verb.take() {
        Some(verb) => {
            let mut objects = std::mem::take(&mut p.post).into_iter();
            let v_head = SyntacticObject::head(Projection::V, FeatureBundle::new(), Some(verb));
            let mut vp = match objects.next() {
                Some(obj) => merge(v_head, SyntacticObject::dp(obj))?,
                None => SyntacticObject::project(v_head)?,
            };
            vp.adjuncts
                .extend(objects.map(|o| adjunct(AdjunctKind::Object, o)));
            let vp = merge(little_v_head(), vp)?;
            let pro = SyntacticObject::dp(Occupant::new(LexicalItem::pro(), None));
            let vp = merge(vp, pro)?;
            let mut tp = merge(tense_head(), vp)?;
            tp.adjuncts
                .extend(p.tag.drain(..).map(|o| adjunct(AdjunctKind::Tag, o)));
            Some(tp)
        }
        None => None,
    };

    let below_top = match p.forc.take() {
        Some(f) => {
            let head = SyntacticObject::head(Projection::Forc, FeatureBundle::new(), Some(f));
            let mut forc = match clause_top {
                Some(tp) => merge(head, tp)?,
                None => SyntacticObject::project(head)?,
            };
            forc.adjuncts.extend(
                p.forc_comp
                    .drain(..)
                    .map(|o| adjunct(AdjunctKind::ForcComplement, o)),
            );
            forc
        }
        None => clause_top.ok_or(ParseError::NotImperative { conjunct: k })?,
    };

    let mut top = merge(top_head(), below_top)?;
    top.adjuncts.extend(
        p.dislocated
            .drain(..)
            .map(|o| adjunct(AdjunctKind::Dislocated, o)),
    );
    let (status, dp) = match p.topic.take() {
        Some(o) => (TopicStatus::Overt(o.clone()), topic_dp(o)),
        None if k == 0 => (
            TopicStatus::Null,
            SyntacticObject::dp(Occupant::new(LexicalItem::null_topic(), None)),
        ),
        None => (
            TopicStatus::Silent,
            SyntacticObject::dp(Occupant::new(LexicalItem::silent_topic(), None)),
        ),
    };
    let top = merge(top, dp)?;
    Ok((
        top,
        TopicSlot {
            status,
            position: k,
        },
        note,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::seed_lexicon;
    use FeatureAttribute::*;

    fn parse(s: &str) -> Result<ClauseStructure, ParseError> {
        parse_imperative(&tokenize(s, &seed_lexicon())?)
    }

    fn dp(form: &str) -> SyntacticObject {
        let item = seed_lexicon().lookup(form)[0].clone();
        SyntacticObject::dp(Occupant::new(item, None))
    }

    #[test]
    fn topic_merge_fills_spec_and_satisfies_edge_feature() {
        let tp = SyntacticObject::project(tense_head()).unwrap();
        let top = merge(top_head(), tp).unwrap();
        assert_eq!(
            top.head_feats.state(EdgeF),
            crate::features::SlotState::Unvalued
        );
        let top = merge(top, dp("ʕali")).unwrap();
        assert_eq!(top.label, Label::Phrase(Projection::Top));
        assert!(top.phase);
        assert_eq!(
            top.spec
                .as_ref()
                .unwrap()
                .occupant
                .as_ref()
                .unwrap()
                .item
                .form,
            "ʕali"
        );
        assert_eq!(top.head_feats.value(EdgeF), Some(FeatureValue::Sat));
    }

    #[test]
    fn verb_and_object_make_vp() {
        let item = seed_lexicon().lookup("ʔiftaħ")[0].clone();
        let v = SyntacticObject::head(
            Projection::V,
            FeatureBundle::new(),
            Some(Occupant::new(item, Some(0))),
        );
        let vp = merge(v, dp("l-baab")).unwrap();
        assert_eq!(vp.label, Label::Phrase(Projection::V));
        assert!(!vp.phase);
        assert_eq!(vp.render(), "[VP ʔiftaħ l-baab]");
    }

    #[test]
    fn every_second_specifier_is_rejected() {
        let forms = ["ʕali", "ʔiftaħ", "l-baab", "li-ʕaliya"];
        for first in forms {
            for second in forms {
                let tp = SyntacticObject::project(tense_head()).unwrap();
                let top = merge(merge(top_head(), tp).unwrap(), dp(first)).unwrap();
                assert_eq!(
                    merge(top, dp(second)).unwrap_err(),
                    StructureError::Saturated {
                        label: Label::Phrase(Projection::Top)
                    },
                    "{first} then {second}"
                );
            }
        }
    }

    #[test]
    fn remerge_copies_verb_to_t() {
        let s = parse("ʔiftaħ l-baab").unwrap();
        let clause = remerge_v_to_t(s.conjuncts[0].clone()).unwrap();
        let tp = clause.find(Projection::T).unwrap();
        let vp = clause.find(Projection::V).unwrap();
        assert_eq!(tp.occupant.as_ref().unwrap().item.form, "ʔiftaħ");
        assert_eq!(tp.occupant, vp.occupant);
        assert_eq!(tp.head_feats.value(EPP), Some(FeatureValue::Sat));
        assert_eq!(
            tp.copies,
            vec![CopyLink {
                from: Projection::V,
                token: Some(0)
            }]
        );
        let pro = &clause
            .find(Projection::LittleV)
            .unwrap()
            .spec
            .as_ref()
            .unwrap()
            .occupant;
        assert_eq!(pro.as_ref().unwrap().item.cat, Category::ProNull);
        assert_eq!(remerge_v_to_t(clause.clone()).unwrap(), clause);
        assert_eq!(
            clause.render(),
            "[TopP NULLTOP Top° [TP ʔiftaħ+T° [vP pro v° [VP ⟨ʔiftaħ⟩ l-baab]]]]"
        );
    }

    #[test]
    fn remerge_without_verb_fails() {
        let vp = SyntacticObject::project(SyntacticObject::head(
            Projection::V,
            FeatureBundle::new(),
            None,
        ))
        .unwrap();
        let tp = merge(tense_head(), merge(little_v_head(), vp).unwrap()).unwrap();
        assert_eq!(remerge_v_to_t(tp).unwrap_err(), StructureError::NoVerb);
        assert_eq!(
            parse("ʕali").unwrap_err(),
            ParseError::NotImperative { conjunct: 0 }
        );
    }

    #[test]
    fn topic_clause() {
        let s = parse("ʕali ʔiftaħ l-baab").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.topics[0].overt().unwrap().item.form, "ʕali");
        assert_eq!(
            s.conjuncts[0].render(),
            "[TopP ʕali Top° [TP T° [vP pro v° [VP ʔiftaħ l-baab]]]]"
        );
        assert_eq!(
            s.feats(Position::new(0, Slot::Topic)).unwrap().state(Spcty),
            crate::features::SlotState::Unvalued
        );
    }

    #[test]
    fn topic_sits_above_wh_in_forc() {
        let s = parse("ʕali ʔayna ʔantah taʕaal").unwrap();
        let labels = s.conjuncts[0].spine_labels();
        assert_eq!(
            labels,
            vec![
                Label::Phrase(Projection::Top),
                Label::Phrase(Projection::Forc),
                Label::Phrase(Projection::T),
                Label::Phrase(Projection::LittleV),
                Label::Phrase(Projection::V),
            ]
        );
        assert_eq!(s.topics[0].overt().unwrap().item.form, "ʕali");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("ʕali ʔaħmad ʔiftaħ l-baab li-ʕaliya").unwrap_err(),
            ParseError::TopicRecursion { ref form, index: 1 } if form == "ʔaħmad"
        ));
        assert!(matches!(
            parse("ʕali muh ʔinna al-kitaab maʕak taʕaal").unwrap_err(),
            ParseError::ForcDoubleFill { ref form, .. } if form == "ʔinna"
        ));
        assert!(matches!(
            parse("ʔayna ʔantah ʕali taʕaal").unwrap_err(),
            ParseError::ForcBeforeTop { ref form, .. } if form == "ʕali"
        ));
        assert!(matches!(
            parse("laa t-imnaʕ-š l-kalaam").unwrap_err(),
            ParseError::OutOfScopeNegation { .. }
        ));
        assert!(
            matches!(parse("qulk lak ʔijzaʕ").unwrap_err(), ParseError::UnknownForm { ref form, index: 0 } if form == "qulk")
        );
        assert_eq!(parse("   ").unwrap_err(), ParseError::EmptyInput);
        assert_eq!(
            parse("biz l-masaaha wa").unwrap_err(),
            ParseError::NotImperative { conjunct: 1 }
        );
        assert!(matches!(
            parse("ʔaiš ʔaktub").unwrap_err(),
            ParseError::OutOfScopeQuestion { .. }
        ));
    }

    #[test]
    fn null_topic_and_pro_are_inserted() {
        let s = parse("ʔiftaħ l-baab!").unwrap();
        assert_eq!(s.topics[0].status, TopicStatus::Null);
        let topic = s.conjuncts[0].spec.as_ref().unwrap();
        assert_eq!(
            topic.occupant.as_ref().unwrap().item.cat,
            Category::TopicNull
        );
        assert_eq!(s.pro_count(), 1);
    }

    #[test]
    fn coordination_gives_silent_later_topics() {
        let s = parse("ʕali biz l-masaaha wa ʔimsaħ ṣ-ṣabuura").unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.topics[0].is_overt());
        assert_eq!(s.topics[1].status, TopicStatus::Silent);
        assert_eq!(s.pro_count(), 2);
    }

    #[test]
    fn postverbal_pronoun_is_normalized_to_topic() {
        let a = parse("ʔantah ʔiftaħ l-baab").unwrap();
        let b = parse("ʔiftaħ ʔantah l-baab").unwrap();
        assert_eq!(b.topics[0].overt().unwrap().item.form, "ʔantah");
        assert_eq!(a.conjuncts[0].render(), b.conjuncts[0].render());
        assert_eq!(b.notes.len(), 1);
    }

    #[test]
    fn dislocated_phrases_are_not_topics() {
        let s = parse("li-ʕaliya ʕali ʔiftaħ l-baab").unwrap();
        assert_eq!(s.topics[0].overt().unwrap().item.form, "ʕali");
        assert_eq!(s.conjuncts[0].adjuncts[0].kind, AdjunctKind::Dislocated);
    }

    #[test]
    fn verbless_comp_clause_has_no_tense() {
        let s = parse("ʕali ʔinna ʔallah maʕak").unwrap();
        assert!(!s.has_tense(0));
        assert_eq!(s.pro_count(), 0);
    }

    #[test]
    fn tag_is_attached_to_tp() {
        let s = parse("taʕaal baʕd saaʕah ʕa tʒaħ").unwrap();
        let tag: Vec<&str> = s.tag(0).iter().map(|o| o.item.form.as_str()).collect();
        assert_eq!(tag, ["ʕa", "tʒaħ"]);
        assert_eq!(s.objects(0).len(), 2);
    }

    #[test]
    fn gloss_override_selects_entry() {
        let lex =
            crate::lexicon::load_lexicon("x N GLOSS=a\nx V.IMP GLOSS=b PERS=2 NUM=Sg").unwrap();
        let toks = tokenize("x/b", &lex).unwrap();
        assert_eq!(toks[0].item.cat, Category::VerbImp);
        assert!(matches!(
            tokenize("x/c", &lex).unwrap_err(),
            ParseError::UnknownForm { .. }
        ));
    }

    #[test]
    fn excise_and_insert_keep_the_spine_connected() {
        let mut root = parse("ʕali ʔiftaħ l-baab").unwrap().conjuncts.remove(0);
        let foc = SyntacticObject::project(SyntacticObject::head(
            Projection::Foc,
            FeatureBundle::new(),
            None,
        ))
        .unwrap();
        assert!(root.insert_above(Projection::T, foc));
        assert_eq!(root.spine_labels()[1], Label::Phrase(Projection::Foc));
        let t = root.excise(Projection::T).unwrap();
        assert!(t.comp.is_none());
        assert!(root.find(Projection::T).is_none());
        assert!(root.find(Projection::LittleV).is_some());
    }
}
