//! Features, feature bundles, and the Match operation every Agree step
//! reduces to.
//!
//! A [`Feature`] is an attribute paired with a valuation state and an
//! interpretability flag. The two are independent: a feature may be valued
//! yet uninterpretable (the imperative *pro* enters the derivation that way).
//! Interpretability never gates valuation; it is carried for reporting only.

use std::collections::BTreeMap;
use std::fmt;

/// Closed set of attributes the engine knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureAttribute {
    Person,
    Number,
    Gender,
    Case,
    Tense,
    Adrs,
    Spcty,
    EPP,
    EdgeF,
}

impl FeatureAttribute {
    pub const ALL: [FeatureAttribute; 9] = [
        FeatureAttribute::Person,
        FeatureAttribute::Number,
        FeatureAttribute::Gender,
        FeatureAttribute::Case,
        FeatureAttribute::Tense,
        FeatureAttribute::Adrs,
        FeatureAttribute::Spcty,
        FeatureAttribute::EPP,
        FeatureAttribute::EdgeF,
    ];

    /// Person, Number, Gender.
    pub const PHI: [FeatureAttribute; 3] = [
        FeatureAttribute::Person,
        FeatureAttribute::Number,
        FeatureAttribute::Gender,
    ];

    /// Short name used in traces, e.g. `Gend`.
    pub fn short(self) -> &'static str {
        match self {
            FeatureAttribute::Person => "Pers",
            FeatureAttribute::Number => "Num",
            FeatureAttribute::Gender => "Gend",
            FeatureAttribute::Case => "Case",
            FeatureAttribute::Tense => "Tense",
            FeatureAttribute::Adrs => "Adrs",
            FeatureAttribute::Spcty => "Spcty",
            FeatureAttribute::EPP => "EPP",
            FeatureAttribute::EdgeF => "EF",
        }
    }

    /// Key used in lexicon files, e.g. `GEND`.
    pub fn file_key(self) -> &'static str {
        match self {
            FeatureAttribute::Person => "PERS",
            FeatureAttribute::Number => "NUM",
            FeatureAttribute::Gender => "GEND",
            FeatureAttribute::Case => "CASE",
            FeatureAttribute::Tense => "TENSE",
            FeatureAttribute::Adrs => "ADRS",
            FeatureAttribute::Spcty => "SPCTY",
            FeatureAttribute::EPP => "EPP",
            FeatureAttribute::EdgeF => "EDGEF",
        }
    }

    pub fn from_file_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.file_key() == key)
    }

    /// Every value that is legal under this attribute.
    pub fn values(self) -> &'static [FeatureValue] {
        use FeatureValue::*;
        match self {
            FeatureAttribute::Person => &[P1, P2, P3],
            FeatureAttribute::Number => &[Sg, Pl],
            FeatureAttribute::Gender => &[M, F],
            FeatureAttribute::Case => &[Nom, Acc],
            FeatureAttribute::Tense => &[Pres, Fut, Past],
            FeatureAttribute::Adrs => &[Addressee],
            FeatureAttribute::Spcty => &[Specific],
            FeatureAttribute::EPP | FeatureAttribute::EdgeF => &[Sat],
        }
    }
}

impl fmt::Display for FeatureAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Attribute-scoped scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    P1,
    P2,
    P3,
    Sg,
    Pl,
    M,
    F,
    Nom,
    Acc,
    Pres,
    Fut,
    Past,
    Addressee,
    Specific,
    Sat,
}

impl FeatureValue {
    pub fn legal_under(self, attr: FeatureAttribute) -> bool {
        attr.values().contains(&self)
    }

    pub fn as_str(self) -> &'static str {
        use FeatureValue::*;
        match self {
            P1 => "1",
            P2 => "2",
            P3 => "3",
            Sg => "Sg",
            Pl => "Pl",
            M => "M",
            F => "F",
            Nom => "Nom",
            Acc => "Acc",
            Pres => "Pres",
            Fut => "Fut",
            Past => "Past",
            Addressee => "Addressee",
            Specific => "Specific",
            Sat => "Sat",
        }
    }

    /// Parses a value written under `attr`; `None` if the text is not a
    /// legal value for that attribute.
    pub fn parse(attr: FeatureAttribute, text: &str) -> Option<Self> {
        attr.values().iter().copied().find(|v| v.as_str() == text)
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Unvalued,
    Valued(FeatureValue),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interpretability {
    Interpretable,
    Uninterpretable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Feature {
    pub attr: FeatureAttribute,
    pub val: Valuation,
    pub interp: Interpretability,
}

impl Feature {
    pub fn unvalued(attr: FeatureAttribute) -> Self {
        Feature {
            attr,
            val: Valuation::Unvalued,
            interp: Interpretability::Uninterpretable,
        }
    }

    /// Panics if `value` is not legal under `attr`.
    pub fn valued(attr: FeatureAttribute, value: FeatureValue) -> Self {
        assert!(
            value.legal_under(attr),
            "value {value} is not legal under attribute {attr}"
        );
        Feature {
            attr,
            val: Valuation::Valued(value),
            interp: Interpretability::Interpretable,
        }
    }

    pub fn uninterpretable(mut self) -> Self {
        self.interp = Interpretability::Uninterpretable;
        self
    }

    pub fn interpretable(mut self) -> Self {
        self.interp = Interpretability::Interpretable;
        self
    }

    pub fn value(&self) -> Option<FeatureValue> {
        match self.val {
            Valuation::Valued(v) => Some(v),
            Valuation::Unvalued => None,
        }
    }

    pub fn is_valued(&self) -> bool {
        matches!(self.val, Valuation::Valued(_))
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            Valuation::Valued(v) => write!(f, "[{}: {}]", self.attr, v),
            Valuation::Unvalued => write!(f, "[{}: __]", self.attr),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchOutcome {
    /// The probe copy carrying the goal's value.
    Valued(Feature),
    NoChange,
    Conflict,
}

/// Agree as Match on a single attribute: the goal's value is copied into an
/// unvalued probe. Two distinct values cannot unify.
///
/// Panics if the attributes differ; that is a caller bug.
pub fn match_feature(probe: &Feature, goal: &Feature) -> MatchOutcome {
    assert_eq!(
        probe.attr, goal.attr,
        "match_feature called on mismatched attributes"
    );
    match (probe.val, goal.val) {
        (_, Valuation::Unvalued) => MatchOutcome::NoChange,
        (Valuation::Unvalued, Valuation::Valued(v)) => MatchOutcome::Valued(Feature {
            val: Valuation::Valued(v),
            ..*probe
        }),
        (Valuation::Valued(a), Valuation::Valued(b)) if a == b => MatchOutcome::NoChange,
        (Valuation::Valued(_), Valuation::Valued(_)) => MatchOutcome::Conflict,
    }
}

/// What a bundle holds for one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotState {
    Absent,
    Unvalued,
    Valued(FeatureValue),
}

/// At most one feature per attribute, kept in attribute order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FeatureBundle {
    features: BTreeMap<FeatureAttribute, Feature>,
}

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_features(features: impl IntoIterator<Item = Feature>) -> Self {
        let mut bundle = Self::new();
        for f in features {
            bundle.insert(f);
        }
        bundle
    }

    /// Inserts or replaces the feature for its attribute.
    pub fn insert(&mut self, feature: Feature) {
        self.features.insert(feature.attr, feature);
    }

    pub fn with(mut self, feature: Feature) -> Self {
        self.insert(feature);
        self
    }

    pub fn remove(&mut self, attr: FeatureAttribute) -> Option<Feature> {
        self.features.remove(&attr)
    }

    pub fn get(&self, attr: FeatureAttribute) -> Option<&Feature> {
        self.features.get(&attr)
    }

    pub fn contains(&self, attr: FeatureAttribute) -> bool {
        self.features.contains_key(&attr)
    }

    pub fn state(&self, attr: FeatureAttribute) -> SlotState {
        match self.features.get(&attr) {
            None => SlotState::Absent,
            Some(f) => match f.val {
                Valuation::Unvalued => SlotState::Unvalued,
                Valuation::Valued(v) => SlotState::Valued(v),
            },
        }
    }

    pub fn value(&self, attr: FeatureAttribute) -> Option<FeatureValue> {
        self.get(attr).and_then(Feature::value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Feature> {
        self.features.values()
    }

    pub fn attrs(&self) -> impl Iterator<Item = FeatureAttribute> + '_ {
        self.features.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn unvalued_count(&self) -> usize {
        self.iter().filter(|f| !f.is_valued()).count()
    }

    pub fn unvalued_attrs(&self) -> Vec<FeatureAttribute> {
        self.iter()
            .filter(|f| !f.is_valued())
            .map(|f| f.attr)
            .collect()
    }

    /// Marks `attr` as `Sat` (EPP / EdgeF satisfaction). Adds the feature if
    /// it is missing.
    pub fn satisfy(&mut self, attr: FeatureAttribute) {
        let interp = self
            .get(attr)
            .map(|f| f.interp)
            .unwrap_or(Interpretability::Uninterpretable);
        self.insert(Feature {
            attr,
            val: Valuation::Valued(FeatureValue::Sat),
            interp,
        });
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, feat) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match feat.val {
                Valuation::Valued(v) => write!(f, "{}:{}", feat.attr, v)?,
                Valuation::Unvalued => write!(f, "{}:__", feat.attr)?,
            }
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleOutcome {
    /// The probe after every flowable value was copied; `valued` lists the
    /// attributes that changed.
    Updated {
        bundle: FeatureBundle,
        valued: Vec<FeatureAttribute>,
    },
    Conflict(FeatureAttribute),
}

/// [`match_feature`] lifted pointwise over `attrs`. The first conflict aborts
/// the whole valuation and leaves the probe untouched.
///
/// Panics if some attribute in `attrs` is absent from the probe. Attributes
/// absent from the goal contribute nothing.
pub fn value_bundle(
    probe: &FeatureBundle,
    goal: &FeatureBundle,
    attrs: &[FeatureAttribute],
) -> BundleOutcome {
    let mut bundle = probe.clone();
    let mut valued = Vec::new();
    for &attr in attrs {
        let p = probe
            .get(attr)
            .unwrap_or_else(|| panic!("value_bundle: probe lacks attribute {attr}"));
        let Some(g) = goal.get(attr) else { continue };
        match match_feature(p, g) {
            MatchOutcome::Valued(f) => {
                bundle.insert(f);
                valued.push(attr);
            }
            MatchOutcome::NoChange => {}
            MatchOutcome::Conflict => return BundleOutcome::Conflict(attr),
        }
    }
    BundleOutcome::Updated { bundle, valued }
}

/// True iff every feature in the bundle is valued (vacuously true when empty).
pub fn fully_valued(bundle: &FeatureBundle) -> bool {
    bundle.iter().all(Feature::is_valued)
}
