use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ConceptId, Curie, Domain, EvidenceAtom, Logic, ModelError, Ontology, Outcome};

/// How a mapping was produced, with its cardinality and level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MappingCategory {
    AutoOneToOneConcept,
    AutoOneToOneAncestor,
    AutoOneToManyConcept,
    AutoOneToManyAncestor,
    CosineOneToOneConcept,
    ManualOneToOneConcept,
    ManualOneToManyConcept,
    Unmapped,
}

impl MappingCategory {
    pub const ALL: [MappingCategory; 8] = [
        MappingCategory::AutoOneToOneConcept,
        MappingCategory::AutoOneToOneAncestor,
        MappingCategory::AutoOneToManyConcept,
        MappingCategory::AutoOneToManyAncestor,
        MappingCategory::CosineOneToOneConcept,
        MappingCategory::ManualOneToOneConcept,
        MappingCategory::ManualOneToManyConcept,
        MappingCategory::Unmapped,
    ];

    pub fn level(self) -> Level {
        use MappingCategory::*;
        match self {
            AutoOneToOneAncestor | AutoOneToManyAncestor => Level::Ancestor,
            Unmapped => Level::None,
            _ => Level::Concept,
        }
    }

    pub fn is_one_to_one(self) -> bool {
        use MappingCategory::*;
        matches!(
            self,
            AutoOneToOneConcept | AutoOneToOneAncestor | CosineOneToOneConcept | ManualOneToOneConcept
        )
    }

    pub fn is_one_to_many(self) -> bool {
        use MappingCategory::*;
        matches!(
            self,
            AutoOneToManyConcept | AutoOneToManyAncestor | ManualOneToManyConcept
        )
    }

    pub fn is_manual(self) -> bool {
        matches!(
            self,
            MappingCategory::ManualOneToOneConcept | MappingCategory::ManualOneToManyConcept
        )
    }

    pub fn display(self) -> &'static str {
        use MappingCategory::*;
        match self {
            AutoOneToOneConcept => "Automatic One-to-One Concept",
            AutoOneToOneAncestor => "Automatic One-to-One Ancestor",
            AutoOneToManyConcept => "Automatic One-to-Many Concept",
            AutoOneToManyAncestor => "Automatic One-to-Many Ancestor",
            CosineOneToOneConcept => "Cosine Similarity One-to-One Concept",
            ManualOneToOneConcept => "Manual One-to-One Concept",
            ManualOneToManyConcept => "Manual One-to-Many Concept",
            Unmapped => "Unmapped",
        }
    }

    /// Inverse of [`MappingCategory::display`].
    pub fn from_display(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.display() == s)
    }
}

/// Human-readable category label.
///
/// The level is implied by the category; a mismatching level is a record
/// invariant violation caught by [`validate_record`], not a rendering concern.
pub fn render_category(category: MappingCategory, level: Level) -> &'static str {
    debug_assert_eq!(category.level(), level, "inconsistent category/level");
    category.display()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Level {
    Concept,
    Ancestor,
    None,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Concept => "CONCEPT",
            Level::Ancestor => "ANCESTOR",
            Level::None => "NONE",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CONCEPT" => Ok(Level::Concept),
            "ANCESTOR" => Ok(Level::Ancestor),
            "NONE" => Ok(Level::None),
            _ => Err(ModelError::Invariant(format!("unknown level {s:?}"))),
        }
    }
}

/// Closed set of reasons a concept carries no mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UnmappedReason {
    NoneFound,
    NotYetMapped,
    Injury,
    Complication,
    Finding,
    CarrierStatus,
    UnspecifiedSample,
    NotMappedTestType,
}

impl UnmappedReason {
    pub const ALL: [UnmappedReason; 8] = [
        UnmappedReason::NoneFound,
        UnmappedReason::NotYetMapped,
        UnmappedReason::Injury,
        UnmappedReason::Complication,
        UnmappedReason::Finding,
        UnmappedReason::CarrierStatus,
        UnmappedReason::UnspecifiedSample,
        UnmappedReason::NotMappedTestType,
    ];

    pub fn code(self) -> &'static str {
        match self {
            UnmappedReason::NoneFound => "NONE_FOUND",
            UnmappedReason::NotYetMapped => "NOT_YET_MAPPED",
            UnmappedReason::Injury => "INJURY",
            UnmappedReason::Complication => "COMPLICATION",
            UnmappedReason::Finding => "FINDING",
            UnmappedReason::CarrierStatus => "CARRIER_STATUS",
            UnmappedReason::UnspecifiedSample => "UNSPECIFIED_SAMPLE",
            UnmappedReason::NotMappedTestType => "NOT_MAPPED_TEST_TYPE",
        }
    }

    /// Text used in evidence strings and summary row labels.
    pub fn display(self) -> &'static str {
        match self {
            UnmappedReason::NoneFound => "None",
            UnmappedReason::NotYetMapped => "NOT YET MAPPED",
            UnmappedReason::Injury => "Injury",
            UnmappedReason::Complication => "Complication",
            UnmappedReason::Finding => "Finding",
            UnmappedReason::CarrierStatus => "Carrier Status",
            UnmappedReason::UnspecifiedSample => "Unspecified Sample",
            UnmappedReason::NotMappedTestType => "Not Mapped Test Type",
        }
    }
}

impl fmt::Display for UnmappedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for UnmappedReason {
    type Err = ModelError;

    /// Accepts either the code (`NOT_YET_MAPPED`) or the display text, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        UnmappedReason::ALL
            .into_iter()
            .find(|r| r.code().eq_ignore_ascii_case(t) || r.display().eq_ignore_ascii_case(t))
            .ok_or_else(|| ModelError::UnknownReason(s.to_string()))
    }
}

/// One synthesized mapping of a concept to one ontology.
///
/// Measurement concepts additionally carry one record per interpretable
/// result (`result` is set on those).
#[derive(Debug, Clone, PartialEq)]
pub struct MappingRecord {
    pub concept_id: ConceptId,
    pub domain: Domain,
    pub ontology: Ontology,
    pub category: MappingCategory,
    pub level: Level,
    pub logic: Option<Logic>,
    pub targets: Vec<Curie>,
    pub score: Option<f64>,
    pub evidence: Vec<EvidenceAtom>,
    pub unmapped_reason: Option<UnmappedReason>,
    pub result: Option<Outcome>,
}

impl MappingRecord {
    pub fn unmapped(
        concept_id: ConceptId,
        domain: Domain,
        ontology: Ontology,
        reason: UnmappedReason,
        mut evidence: Vec<EvidenceAtom>,
    ) -> Self {
        evidence.push(EvidenceAtom::new(
            super::EvidenceKind::ExclusionReason,
            reason.display(),
        ));
        super::evidence::canonical_order(&mut evidence);
        Self {
            concept_id,
            domain,
            ontology,
            category: MappingCategory::Unmapped,
            level: Level::None,
            logic: None,
            targets: Vec::new(),
            score: None,
            evidence,
            unmapped_reason: Some(reason),
            result: None,
        }
    }

    pub fn is_mapped(&self) -> bool {
        self.category != MappingCategory::Unmapped
    }

    pub fn evidence_string(&self) -> String {
        super::evidence::render_atoms(&self.evidence)
    }
}

/// Which record invariant failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Unmapped,
    Level,
    Cardinality,
    Logic,
    Score,
    EvidenceEmpty,
    EvidenceDelimiter,
    TargetOntology,
    DuplicateTarget,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Unmapped => "unmapped",
            ViolationKind::Level => "level",
            ViolationKind::Cardinality => "cardinality",
            ViolationKind::Logic => "logic",
            ViolationKind::Score => "score",
            ViolationKind::EvidenceEmpty => "evidence empty",
            ViolationKind::EvidenceDelimiter => "evidence delimiter",
            ViolationKind::TargetOntology => "target ontology",
            ViolationKind::DuplicateTarget => "duplicate target",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub path: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.kind.as_str(), self.path)
    }
}

/// Checks a record against the mapping invariants and reports the first
/// violation found.
pub fn validate_record(record: &MappingRecord) -> Result<(), Violation> {
    let fail = |kind, path: &str| {
        Err(Violation {
            kind,
            path: path.to_string(),
        })
    };
    let unmapped = record.category == MappingCategory::Unmapped;
    if unmapped != record.targets.is_empty() || unmapped != record.unmapped_reason.is_some() {
        let path = if unmapped == record.targets.is_empty() {
            "unmapped_reason"
        } else {
            "targets"
        };
        return fail(ViolationKind::Unmapped, path);
    }
    if record.category.level() != record.level {
        return fail(ViolationKind::Level, "level");
    }
    let n = record.targets.len();
    if (record.category.is_one_to_one() && n != 1) || (record.category.is_one_to_many() && n < 2) {
        return fail(ViolationKind::Cardinality, "targets");
    }
    match (&record.logic, unmapped) {
        (None, true) => {}
        (Some(_), true) | (None, false) => return fail(ViolationKind::Logic, "logic"),
        (Some(logic), false) => {
            let shape_ok = match logic {
                Logic::Single(_) => n == 1,
                Logic::And(ts) | Logic::Or(ts) => ts.len() >= 2,
            };
            if !shape_ok || !logic.references_each_once(n) {
                return fail(ViolationKind::Logic, "logic");
            }
        }
    }
    let is_cosine = record.category == MappingCategory::CosineOneToOneConcept;
    match record.score {
        Some(s) if !is_cosine || !(0.0..=1.0).contains(&s) => {
            return fail(ViolationKind::Score, "score")
        }
        None if is_cosine => return fail(ViolationKind::Score, "score"),
        _ => {}
    }
    if record.evidence.is_empty() {
        return fail(ViolationKind::EvidenceEmpty, "evidence");
    }
    if let Some(i) = record.evidence.iter().position(|a| a.payload.contains('|')) {
        return fail(ViolationKind::EvidenceDelimiter, &format!("evidence[{i}].payload"));
    }
    for (i, t) in record.targets.iter().enumerate() {
        if t.ontology() != record.ontology {
            return fail(ViolationKind::TargetOntology, &format!("targets[{i}]"));
        }
        if record.targets[..i].contains(t) {
            return fail(ViolationKind::DuplicateTarget, &format!("targets[{i}]"));
        }
    }
    Ok(())
}
