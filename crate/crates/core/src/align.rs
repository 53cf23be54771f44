//! Exact alignment: normalized strings, shared codes and bridged CUIs, at
//! concept level with an ancestor-level fallback.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ingest::{OntologySet, UmlsIndex};
use crate::lexical::normalize_string;
use crate::model::{
    evidence::canonical_order, ClinicalConcept, CodeRef, ConceptId, Cui, Curie, EvidenceAtom,
    EvidenceKind, Level, Ontology, OntologyClass, StringRole,
};

/// Vocabulary prefix whose xrefs feed the CUI index instead of the code index.
pub const UMLS_PREFIX: &str = "UMLS";

/// Which field of a class produced a string-index key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassField {
    Label,
    Synonym,
    Definition,
}

/// A proposed exact match between a concept and a class.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMatch {
    pub concept_id: ConceptId,
    pub curie: Curie,
    pub level: Level,
    pub evidence: Vec<EvidenceAtom>,
    pub via_ancestor: Option<ConceptId>,
}

/// Frozen lookup tables over non-deprecated classes.
#[derive(Debug, Default)]
pub struct AlignmentIndexes {
    curies: Vec<Curie>,
    strings: HashMap<String, Vec<(u32, ClassField)>>,
    codes: HashMap<CodeRef, Vec<u32>>,
    cuis: HashMap<Cui, Vec<u32>>,
}

fn push_sorted<K: std::hash::Hash + Eq, V>(map: &mut HashMap<K, Vec<V>>, key: K, value: V) {
    map.entry(key).or_default().push(value);
}

impl AlignmentIndexes {
    /// Builds the three indexes. Class ids are assigned in CURIE order and
    /// every value list is sorted, so construction is deterministic.
    pub fn build(classes: &OntologySet) -> Self {
        let mut ix = AlignmentIndexes::default();
        for class in classes.active() {
            let id = ix.curies.len() as u32;
            ix.curies.push(class.curie.clone());
            let mut add = |text: &str, field| {
                let key = normalize_string(text);
                if !key.is_empty() {
                    push_sorted(&mut ix.strings, key, (id, field));
                }
            };
            add(&class.label, ClassField::Label);
            for s in &class.synonyms {
                add(&s.text, ClassField::Synonym);
            }
            if let Some(d) = &class.definition {
                add(d, ClassField::Definition);
            }
            for x in &class.xrefs {
                if x.prefix() == UMLS_PREFIX {
                    if let Ok(cui) = Cui::parse(x.code()) {
                        push_sorted(&mut ix.cuis, cui, id);
                    }
                } else {
                    push_sorted(&mut ix.codes, x.clone(), id);
                }
            }
        }
        for v in ix.strings.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        for v in ix.codes.values_mut().chain(ix.cuis.values_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        ix
    }

    pub fn class_count(&self) -> usize {
        self.curies.len()
    }

    pub fn string_keys(&self) -> usize {
        self.strings.len()
    }

    pub fn code_keys(&self) -> usize {
        self.codes.len()
    }

    pub fn cui_keys(&self) -> usize {
        self.cuis.len()
    }

    /// Classes whose label, synonym or definition normalizes to `key`.
    pub fn lookup_string(&self, key: &str) -> impl Iterator<Item = (&Curie, ClassField)> {
        self.strings
            .get(key)
            .into_iter()
            .flatten()
            .map(|&(id, f)| (&self.curies[id as usize], f))
    }

    pub fn lookup_code(&self, code: &CodeRef) -> impl Iterator<Item = &Curie> {
        self.codes.get(code).into_iter().flatten().map(|&id| &self.curies[id as usize])
    }

    pub fn lookup_cui(&self, cui: &Cui) -> impl Iterator<Item = &Curie> {
        self.cuis.get(cui).into_iter().flatten().map(|&id| &self.curies[id as usize])
    }
}

/// CUIs whose MRCONSO atom shares the concept's canonical (vocabulary, code).
pub fn bridge_cuis(concept: &ClinicalConcept, umls: &UmlsIndex) -> BTreeSet<Cui> {
    umls.cuis_for(&concept.code).cloned().collect()
}

/// Fills `cuis` and `semantic_types` on every concept from the UMLS index.
pub fn attach_umls(concepts: &mut crate::ingest::ConceptSet, umls: &UmlsIndex) {
    for c in concepts.iter_mut() {
        c.cuis = bridge_cuis(c, umls);
        let stys: BTreeSet<String> = c
            .cuis
            .iter()
            .flat_map(|cui| umls.semantic_types(cui))
            .map(str::to_string)
            .collect();
        c.semantic_types.extend(stys);
    }
}

fn string_kind(role: StringRole, field: ClassField) -> EvidenceKind {
    match (role, field) {
        (_, ClassField::Definition) => EvidenceKind::DefinitionMatch,
        (StringRole::Label, _) => EvidenceKind::LabelMatch,
        (StringRole::Synonym, _) => EvidenceKind::SynonymMatch,
    }
}

/// Raw hits of one concept's own strings and codes, keyed by CURIE.
fn hits(
    concept: &ClinicalConcept,
    ix: &AlignmentIndexes,
    allowed: &BTreeSet<Ontology>,
) -> BTreeMap<Curie, Vec<EvidenceAtom>> {
    let mut out: BTreeMap<Curie, Vec<EvidenceAtom>> = BTreeMap::new();
    let mut add = |curie: &Curie, atom: EvidenceAtom| {
        if allowed.contains(&curie.ontology()) {
            out.entry(curie.clone()).or_default().push(atom);
        }
    };
    for curie in ix.lookup_code(&concept.code) {
        add(curie, EvidenceAtom::new(EvidenceKind::XrefMatch, concept.code.to_string()));
    }
    for cui in &concept.cuis {
        for curie in ix.lookup_cui(cui) {
            add(curie, EvidenceAtom::new(EvidenceKind::CuiMatch, cui.as_str()));
        }
    }
    for (text, role) in concept.strings() {
        let key = normalize_string(text);
        if key.is_empty() {
            continue;
        }
        // a class reachable through both a definition and a label/synonym
        // under the same key is reported once, as the stronger match
        let mut best: BTreeMap<&Curie, ClassField> = BTreeMap::new();
        for (curie, field) in ix.lookup_string(&key) {
            let e = best.entry(curie).or_insert(field);
            *e = (*e).min(field);
        }
        for (curie, field) in best {
            add(curie, EvidenceAtom::new(string_kind(role, field), &key));
        }
    }
    for atoms in out.values_mut() {
        canonical_order(atoms);
    }
    out
}

/// Concept-level exact candidates, sorted by CURIE.
pub fn align_concept(
    concept: &ClinicalConcept,
    ix: &AlignmentIndexes,
    allowed: &BTreeSet<Ontology>,
) -> Vec<CandidateMatch> {
    hits(concept, ix, allowed)
        .into_iter()
        .map(|(curie, evidence)| CandidateMatch {
            concept_id: concept.concept_id,
            curie,
            level: Level::Concept,
            evidence,
            via_ancestor: None,
        })
        .collect()
}

/// Ancestor-level candidates: the concept-level rules applied to every
/// ancestor, all hits kept. Hits on the same CURIE through several ancestors
/// merge their evidence and record the smallest ancestor id.
///
/// Callers restrict `allowed` to ontologies with no concept-level hit.
pub fn align_via_ancestors<'a>(
    concept: &ClinicalConcept,
    ancestors: impl IntoIterator<Item = &'a ClinicalConcept>,
    ix: &AlignmentIndexes,
    allowed: &BTreeSet<Ontology>,
) -> Vec<CandidateMatch> {
    let mut merged: BTreeMap<Curie, (ConceptId, Vec<EvidenceAtom>)> = BTreeMap::new();
    if allowed.is_empty() {
        return Vec::new();
    }
    for ancestor in ancestors {
        if ancestor.concept_id == concept.concept_id {
            continue;
        }
        for (curie, atoms) in hits(ancestor, ix, allowed) {
            let entry = merged
                .entry(curie)
                .or_insert_with(|| (ancestor.concept_id, Vec::new()));
            entry.0 = entry.0.min(ancestor.concept_id);
            entry.1.extend(atoms);
        }
    }
    merged
        .into_iter()
        .map(|(curie, (via, mut evidence))| {
            canonical_order(&mut evidence);
            CandidateMatch {
                concept_id: concept.concept_id,
                curie,
                level: Level::Ancestor,
                evidence,
                via_ancestor: Some(via),
            }
        })
        .collect()
}

/// Replays one evidence atom against the raw concept (or ancestor) and class.
pub fn verify_evidence(source: &ClinicalConcept, class: &OntologyClass, atom: &EvidenceAtom) -> bool {
    let norm_eq = |a: &str| normalize_string(a) == atom.payload;
    let concept_has = |role: StringRole| source.strings().any(|(t, r)| r == role && norm_eq(t));
    let class_has_term = class.strings().any(|(t, _)| norm_eq(t));
    match atom.kind {
        EvidenceKind::XrefMatch => {
            source.code.to_string() == atom.payload && class.xrefs.contains(&source.code)
        }
        EvidenceKind::CuiMatch => {
            source.cuis.iter().any(|c| c.as_str() == atom.payload)
                && class
                    .xrefs
                    .iter()
                    .any(|x| x.prefix() == UMLS_PREFIX && x.code() == atom.payload)
        }
        EvidenceKind::LabelMatch => concept_has(StringRole::Label) && class_has_term,
        EvidenceKind::SynonymMatch => concept_has(StringRole::Synonym) && class_has_term,
        EvidenceKind::DefinitionMatch => {
            source.strings().any(|(t, _)| norm_eq(t))
                && class.definition.as_deref().is_some_and(norm_eq)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, Synonym, SynonymKind};

    pub(crate) fn concept(id: u64, label: &str, syns: &[&str], code: (&str, &str), cuis: &[&str]) -> ClinicalConcept {
        ClinicalConcept {
            concept_id: ConceptId::new(id).unwrap(),
            vocabulary: code.0.into(),
            code: CodeRef::new(code.0, code.1).unwrap(),
            label: label.into(),
            synonyms: syns.iter().map(|s| s.to_string()).collect(),
            domain: Domain::Condition,
            used_in_practice: true,
            record_count: 1,
            ancestors: vec![],
            semantic_types: BTreeSet::new(),
            cuis: cuis.iter().map(|c| Cui::parse(c).unwrap()).collect(),
        }
    }

    pub(crate) fn class(curie: &str, label: &str, syns: &[&str], xrefs: &[(&str, &str)]) -> OntologyClass {
        let curie = Curie::parse(curie).unwrap();
        OntologyClass {
            ontology: curie.ontology(),
            curie,
            label: label.into(),
            definition: None,
            synonyms: syns
                .iter()
                .map(|s| Synonym { text: s.to_string(), kind: SynonymKind::Exact })
                .collect(),
            xrefs: xrefs.iter().map(|(p, c)| CodeRef::new(*p, *c).unwrap()).collect(),
            ancestors: vec![],
            deprecated: false,
        }
    }

    fn all() -> BTreeSet<Ontology> {
        Ontology::ALL.into_iter().collect()
    }

    fn set(classes: Vec<OntologyClass>) -> OntologySet {
        let mut s = OntologySet::new();
        for c in classes {
            s.insert(c).unwrap();
        }
        s
    }

    #[test]
    fn overjet_worked_example() {
        let classes = set(vec![class("HP:0011095", "Overjet", &[], &[("SNOMED", "70305005"), ("UMLS", "C0596028")])]);
        let ix = AlignmentIndexes::build(&classes);
        assert_eq!(ix.lookup_string("overjet").count(), 1);
        let c = concept(22945, "Horizontal overbite", &["overjet"], ("SNOMED", "70305005"), &["C0596028"]);
        let got = align_concept(&c, &ix, &all());
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].curie.as_str(), "HP:0011095");
        assert_eq!(
            crate::model::evidence::render_atoms(&got[0].evidence),
            "XREF_MATCH:SNOMED:70305005|CUI_MATCH:C0596028|SYNONYM_MATCH:overjet"
        );
        let cls = classes.get(&got[0].curie).unwrap();
        assert!(got[0].evidence.iter().all(|a| verify_evidence(&c, cls, a)));
    }

    #[test]
    fn empty_and_deprecated() {
        let ix = AlignmentIndexes::build(&OntologySet::new());
        assert_eq!((ix.string_keys(), ix.code_keys(), ix.cui_keys()), (0, 0, 0));
        let mut dep = class("HP:0000001", "Overjet", &[], &[]);
        dep.deprecated = true;
        let ix = AlignmentIndexes::build(&set(vec![dep]));
        assert_eq!(ix.string_keys(), 0);
    }

    #[test]
    fn label_matching_two_classes() {
        let ix = AlignmentIndexes::build(&set(vec![
            class("HP:0000001", "Fever", &[], &[]),
            class("MONDO:0000001", "x", &["fever"], &[]),
        ]));
        let c = concept(1, "FEVER", &[], ("SNOMED", "1"), &[]);
        let got = align_concept(&c, &ix, &all());
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|m| m.evidence == [EvidenceAtom::new(EvidenceKind::LabelMatch, "fever")]));
        let hp_only: BTreeSet<_> = [Ontology::Hp].into();
        assert_eq!(align_concept(&c, &ix, &hp_only).len(), 1);
    }

    #[test]
    fn definition_only_match() {
        let mut k = class("HP:0000001", "A", &[], &[]);
        k.definition = Some("Sore  throat".into());
        let ix = AlignmentIndexes::build(&set(vec![k.clone()]));
        let c = concept(1, "sore throat", &[], ("SNOMED", "1"), &[]);
        let got = align_concept(&c, &ix, &all());
        assert_eq!(got[0].evidence, [EvidenceAtom::new(EvidenceKind::DefinitionMatch, "sore throat")]);
        assert!(verify_evidence(&c, &k, &got[0].evidence[0]));
    }

    #[test]
    fn ancestor_fallback_merges() {
        let ix = AlignmentIndexes::build(&set(vec![
            class("MONDO:0005315", "bone fracture", &["fracture of bone"], &[("SNOMED", "125605004")]),
            class("MONDO:0044989", "foot disease", &["disorder of foot"], &[]),
        ]));
        let c = concept(74185, "Open fracture of cuboid bone of foot", &[], ("SNOMED", "1"), &[]);
        let a1 = concept(10, "Fracture of bone", &[], ("SNOMED", "125605004"), &[]);
        let a2 = concept(11, "Disorder of foot", &[], ("SNOMED", "118932009"), &[]);
        assert!(align_concept(&c, &ix, &all()).is_empty());
        let got = align_via_ancestors(&c, [&a2, &a1], &ix, &all());
        let curies: Vec<_> = got.iter().map(|m| m.curie.as_str()).collect();
        assert_eq!(curies, ["MONDO:0005315", "MONDO:0044989"]);
        assert_eq!(got[0].via_ancestor, Some(a1.concept_id));
        assert_eq!(got[0].evidence.len(), 2);
        assert!(got.iter().all(|m| m.level == Level::Ancestor));
        assert!(align_via_ancestors(&c, [], &ix, &all()).is_empty());
    }
}
