use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Identifier of a clinical vocabulary concept. Always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConceptId(u64);

impl ConceptId {
    pub fn new(id: u64) -> Result<Self, ModelError> {
        if id == 0 {
            return Err(ModelError::ZeroConceptId);
        }
        Ok(Self(id))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ConceptId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = s
            .trim()
            .parse::<u64>()
            .map_err(|_| ModelError::BadConceptId(s.to_string()))?;
        Self::new(id)
    }
}

/// Clinical domain a concept belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    Condition,
    Drug,
    Measurement,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Condition, Domain::Drug, Domain::Measurement];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Condition => "CONDITION",
            Domain::Drug => "DRUG",
            Domain::Measurement => "MEASUREMENT",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CONDITION" => Ok(Domain::Condition),
            "DRUG" => Ok(Domain::Drug),
            "MEASUREMENT" => Ok(Domain::Measurement),
            _ => Err(ModelError::UnknownDomain(s.to_string())),
        }
    }
}

/// The registered target ontologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ontology {
    #[serde(rename = "HP")]
    Hp,
    #[serde(rename = "MONDO")]
    Mondo,
    #[serde(rename = "CHEBI")]
    Chebi,
    #[serde(rename = "NCBITAXON")]
    NcbiTaxon,
    #[serde(rename = "PR")]
    Pr,
    #[serde(rename = "VO")]
    Vo,
    #[serde(rename = "UBERON")]
    Uberon,
    #[serde(rename = "CL")]
    Cl,
}

impl Ontology {
    pub const ALL: [Ontology; 8] = [
        Ontology::Hp,
        Ontology::Mondo,
        Ontology::Chebi,
        Ontology::NcbiTaxon,
        Ontology::Pr,
        Ontology::Vo,
        Ontology::Uberon,
        Ontology::Cl,
    ];

    /// Uppercase key used in configuration and output files.
    pub fn key(self) -> &'static str {
        match self {
            Ontology::Hp => "HP",
            Ontology::Mondo => "MONDO",
            Ontology::Chebi => "CHEBI",
            Ontology::NcbiTaxon => "NCBITAXON",
            Ontology::Pr => "PR",
            Ontology::Vo => "VO",
            Ontology::Uberon => "UBERON",
            Ontology::Cl => "CL",
        }
    }

    /// Prefix as it appears in CURIEs.
    pub fn curie_prefix(self) -> &'static str {
        match self {
            Ontology::NcbiTaxon => "NCBITaxon",
            other => other.key(),
        }
    }

    /// Default target ontologies for each clinical domain.
    pub fn defaults_for(domain: Domain) -> &'static [Ontology] {
        match domain {
            Domain::Condition => &[Ontology::Hp, Ontology::Mondo],
            Domain::Drug => &[
                Ontology::Chebi,
                Ontology::Pr,
                Ontology::Vo,
                Ontology::NcbiTaxon,
            ],
            Domain::Measurement => &[
                Ontology::Hp,
                Ontology::Uberon,
                Ontology::NcbiTaxon,
                Ontology::Pr,
                Ontology::Chebi,
                Ontology::Cl,
            ],
        }
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Ontology {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Ontology::ALL
            .into_iter()
            .find(|o| o.key() == upper)
            .ok_or_else(|| ModelError::UnknownOntology(s.to_string()))
    }
}

/// Compact identifier `PREFIX:LOCAL` of an ontology class.
///
/// The prefix is canonicalized to the registered spelling, so `hp:0000001`
/// and `HP:0000001` compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Curie(Arc<str>);

impl Curie {
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let s = s.trim();
        let (prefix, local) = s
            .split_once(':')
            .ok_or_else(|| ModelError::BadCurie(s.to_string()))?;
        let ontology: Ontology = prefix
            .parse()
            .map_err(|_| ModelError::BadCurie(s.to_string()))?;
        if local.is_empty() || local.contains(|c: char| c.is_whitespace() || c == '|') {
            return Err(ModelError::BadCurie(s.to_string()));
        }
        Ok(Self(format!("{}:{}", ontology.curie_prefix(), local).into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn ontology(&self) -> Ontology {
        let prefix = self.0.split_once(':').map(|(p, _)| p).unwrap_or_default();
        prefix.parse().expect("validated at construction")
    }

    pub fn local_id(&self) -> &str {
        self.0.split_once(':').map(|(_, l)| l).unwrap_or_default()
    }
}

impl fmt::Debug for Curie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Curie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Curie {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Curie::parse(s)
    }
}

impl Serialize for Curie {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Curie {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Curie::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A vocabulary code with its canonical prefix, e.g. `SNOMED:70305005`.
///
/// Build these through [`crate::lexical::canonicalize_code`] so that prefix
/// spelling variants collapse onto one key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodeRef {
    prefix: String,
    code: String,
}

impl CodeRef {
    pub fn new(prefix: impl Into<String>, code: impl Into<String>) -> Result<Self, ModelError> {
        let prefix = prefix.into();
        let code = code.into();
        if prefix.is_empty()
            || prefix
                .chars()
                .any(|c| c == ':' || c == '|' || c.is_whitespace())
        {
            return Err(ModelError::BadPrefix(prefix));
        }
        let code = code.trim().to_string();
        if code.is_empty() || code.contains('|') {
            return Err(ModelError::EmptyCode);
        }
        Ok(Self { prefix, code })
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn code(&self) -> &str {
        &self.code
    }
}

impl fmt::Display for CodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.code)
    }
}

/// UMLS concept unique identifier: `C` followed by seven digits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cui(String);

impl Cui {
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let s = s.trim();
        let bytes = s.as_bytes();
        if bytes.len() == 8 && bytes[0] == b'C' && bytes[1..].iter().all(u8::is_ascii_digit) {
            Ok(Self(s.to_string()))
        } else {
            Err(ModelError::BadCui(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Cui {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Cui::parse(&value)
    }
}

impl From<Cui> for String {
    fn from(value: Cui) -> Self {
        value.0
    }
}

impl fmt::Display for Cui {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
