use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Kind of support behind a mapping.
///
/// Declaration order is the canonical rendering order: code-based support
/// first, then lexical, then scored and curated sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EvidenceKind {
    XrefMatch,
    CuiMatch,
    LabelMatch,
    SynonymMatch,
    DefinitionMatch,
    CosineScore,
    ManualSource,
    ExclusionReason,
}

impl EvidenceKind {
    pub const ALL: [EvidenceKind; 8] = [
        EvidenceKind::XrefMatch,
        EvidenceKind::CuiMatch,
        EvidenceKind::LabelMatch,
        EvidenceKind::SynonymMatch,
        EvidenceKind::DefinitionMatch,
        EvidenceKind::CosineScore,
        EvidenceKind::ManualSource,
        EvidenceKind::ExclusionReason,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceKind::XrefMatch => "XREF_MATCH",
            EvidenceKind::CuiMatch => "CUI_MATCH",
            EvidenceKind::LabelMatch => "LABEL_MATCH",
            EvidenceKind::SynonymMatch => "SYNONYM_MATCH",
            EvidenceKind::DefinitionMatch => "DEFINITION_MATCH",
            EvidenceKind::CosineScore => "COSINE_SCORE",
            EvidenceKind::ManualSource => "MANUAL_SOURCE",
            EvidenceKind::ExclusionReason => "EXCLUSION_REASON",
        }
    }
}

impl fmt::Display for EvidenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvidenceKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvidenceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::BadEvidence(s.to_string()))
    }
}

/// One unit of mapping evidence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvidenceAtom {
    pub kind: EvidenceKind,
    pub payload: String,
}

impl EvidenceAtom {
    /// Builds an atom, replacing the reserved `|` delimiter and any control
    /// whitespace in the payload.
    pub fn new(kind: EvidenceKind, payload: impl AsRef<str>) -> Self {
        let payload = payload
            .as_ref()
            .chars()
            .map(|c| match c {
                '|' => '/',
                '\t' | '\n' | '\r' => ' ',
                c => c,
            })
            .collect::<String>()
            .trim()
            .to_string();
        Self { kind, payload }
    }
}

impl fmt::Display for EvidenceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.payload)
    }
}

/// Sorts atoms into canonical order and drops duplicates.
pub fn canonical_order(atoms: &mut Vec<EvidenceAtom>) {
    atoms.sort();
    atoms.dedup();
}

/// Renders atoms as `KIND:payload` joined by `|`.
pub fn render_atoms(atoms: &[EvidenceAtom]) -> String {
    let mut out = String::new();
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        out.push_str(a.kind.as_str());
        out.push(':');
        out.push_str(&a.payload);
    }
    out
}

/// Inverse of [`render_atoms`].
pub fn parse_atoms(s: &str) -> Result<Vec<EvidenceAtom>, ModelError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('|')
        .map(|part| {
            let (kind, payload) = part
                .split_once(':')
                .ok_or_else(|| ModelError::BadEvidence(part.to_string()))?;
            Ok(EvidenceAtom {
                kind: kind.parse()?,
                payload: payload.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xrefs_render_before_strings() {
        let mut atoms = vec![
            EvidenceAtom::new(EvidenceKind::SynonymMatch, "overjet"),
            EvidenceAtom::new(EvidenceKind::XrefMatch, "SNOMED:70305005"),
        ];
        canonical_order(&mut atoms);
        assert_eq!(
            render_atoms(&atoms),
            "XREF_MATCH:SNOMED:70305005|SYNONYM_MATCH:overjet"
        );
    }

    #[test]
    fn constructor_strips_delimiter() {
        let a = EvidenceAtom::new(EvidenceKind::ManualSource, "a|b\tc");
        assert_eq!(a.payload, "a/b c");
    }

    fn arb_atom() -> impl Strategy<Value = EvidenceAtom> {
        (0usize..8, "[^|\t\n\r]{0,20}").prop_map(|(k, p)| EvidenceAtom::new(EvidenceKind::ALL[k], p))
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(atoms in prop::collection::vec(arb_atom(), 1..8)) {
            let mut atoms = atoms;
            canonical_order(&mut atoms);
            let parsed = parse_atoms(&render_atoms(&atoms)).unwrap();
            prop_assert_eq!(parsed, atoms);
        }
    }
}
