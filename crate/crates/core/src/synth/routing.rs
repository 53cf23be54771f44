use std::collections::{BTreeMap, BTreeSet};

use crate::model::{ClinicalConcept, Ontology, UnmappedReason};

/// Semantic-type driven ontology routing and purposeful exclusion.
///
/// Semantic-type names are matched case-insensitively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoutingPolicy {
    allow: BTreeMap<String, BTreeSet<Ontology>>,
    exclude: BTreeMap<String, UnmappedReason>,
}

/// Outcome of routing one concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub allowed: BTreeSet<Ontology>,
    pub exclusion: Option<UnmappedReason>,
}

impl Route {
    pub fn permits(&self, ontology: Ontology) -> bool {
        self.exclusion.is_none() && self.allowed.contains(&ontology)
    }
}

fn key(sty: &str) -> String {
    sty.trim().to_lowercase()
}

impl RoutingPolicy {
    /// The allow-all policy.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn allow(&mut self, semantic_type: &str, ontologies: impl IntoIterator<Item = Ontology>) {
        self.allow.entry(key(semantic_type)).or_default().extend(ontologies);
    }

    /// Registers an exclusion; a semantic type may carry only one reason.
    pub fn exclude(&mut self, semantic_type: &str, reason: UnmappedReason) -> Result<(), UnmappedReason> {
        match self.exclude.get(&key(semantic_type)) {
            Some(&existing) if existing != reason => Err(existing),
            _ => {
                self.exclude.insert(key(semantic_type), reason);
                Ok(())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.allow.is_empty() && self.exclude.is_empty()
    }

    /// Routes a set of semantic types against the configured ontologies.
    ///
    /// Exclusion wins over allow rules. Types with allow rules union their
    /// sets; types without rules are ignored unless no type has a rule, in
    /// which case every configured ontology is allowed.
    pub fn route_types<'a>(
        &self,
        semantic_types: impl IntoIterator<Item = &'a str>,
        configured: &[Ontology],
    ) -> Route {
        let mut exclusion: Option<UnmappedReason> = None;
        let mut allowed: Option<BTreeSet<Ontology>> = None;
        for sty in semantic_types {
            let k = key(sty);
            if let Some(&r) = self.exclude.get(&k) {
                exclusion = Some(exclusion.map_or(r, |e| e.min(r)));
            }
            if let Some(set) = self.allow.get(&k) {
                allowed.get_or_insert_with(BTreeSet::new).extend(set.iter().copied());
            }
        }
        let allowed = match allowed {
            Some(set) => configured.iter().copied().filter(|o| set.contains(o)).collect(),
            None => configured.iter().copied().collect(),
        };
        Route { allowed, exclusion }
    }

    pub fn route(&self, concept: &ClinicalConcept, configured: &[Ontology]) -> Route {
        self.route_types(concept.semantic_types.iter().map(String::as_str), configured)
    }
}
