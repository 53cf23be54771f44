use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use super::{open, split_multi, IngestError, LoadReport, Tsv};
use crate::lexical::{vocabulary_code, NormalizationDictionary};
use crate::model::{ClinicalConcept, ConceptId, Domain};

const COLUMNS: [&str; 8] = [
    "concept_id",
    "vocabulary",
    "concept_code",
    "label",
    "synonyms",
    "domain",
    "used_in_practice",
    "record_count",
];

/// Loaded clinical concepts keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConceptSet {
    concepts: BTreeMap<ConceptId, ClinicalConcept>,
}

impl ConceptSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a concept; fails if the id is already present.
    #[allow(clippy::result_large_err)]
    pub fn insert(&mut self, concept: ClinicalConcept) -> Result<(), ClinicalConcept> {
        match self.concepts.entry(concept.concept_id) {
            Entry::Occupied(_) => Err(concept),
            Entry::Vacant(v) => {
                v.insert(concept);
                Ok(())
            }
        }
    }

    pub fn get(&self, id: ConceptId) -> Option<&ClinicalConcept> {
        self.concepts.get(&id)
    }

    pub fn get_mut(&mut self, id: ConceptId) -> Option<&mut ClinicalConcept> {
        self.concepts.get_mut(&id)
    }

    pub fn contains(&self, id: ConceptId) -> bool {
        self.concepts.contains_key(&id)
    }

    /// Concepts in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &ClinicalConcept> {
        self.concepts.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut ClinicalConcept> {
        self.concepts.values_mut()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Ancestor concepts of `concept` that are present in the set.
    pub fn ancestors_of<'a>(
        &'a self,
        concept: &'a ClinicalConcept,
    ) -> impl Iterator<Item = &'a ClinicalConcept> + 'a {
        concept.ancestors.iter().filter_map(|id| self.get(*id))
    }

    /// Joins `(concept_id, ancestor_concept_id)` pairs onto the set.
    ///
    /// Self rows are skipped. Rows whose ancestor is unknown are counted as
    /// dangling and dropped; rows whose child is unknown are ignored.
    pub fn attach_ancestors(&mut self, pairs: impl IntoIterator<Item = (ConceptId, ConceptId)>) -> LoadReport {
        let mut report = LoadReport::default();
        for (child, ancestor) in pairs {
            if child == ancestor {
                continue;
            }
            if !self.concepts.contains_key(&ancestor) {
                report.dangling_ancestors += 1;
                continue;
            }
            if let Some(c) = self.concepts.get_mut(&child) {
                c.ancestors.push(ancestor);
            }
        }
        for c in self.concepts.values_mut() {
            c.ancestors.sort_unstable();
            c.ancestors.dedup();
        }
        if report.dangling_ancestors > 0 {
            report.warnings.push(format!(
                "DANGLING_ANCESTOR: {} ancestor rows reference unknown concepts",
                report.dangling_ancestors
            ));
        }
        report
    }
}

impl FromIterator<ClinicalConcept> for ConceptSet {
    fn from_iter<T: IntoIterator<Item = ClinicalConcept>>(iter: T) -> Self {
        let mut set = ConceptSet::new();
        for c in iter {
            let _ = set.insert(c);
        }
        set
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "1" | "true" | "TRUE" | "True" => Some(true),
        "0" | "false" | "FALSE" | "False" => Some(false),
        _ => None,
    }
}

/// Parses a concept table from any reader. `domain` keeps only rows of that domain.
pub fn read_concepts<R: Read>(
    path: &str,
    input: R,
    domain: Option<Domain>,
    dict: &NormalizationDictionary,
) -> Result<ConceptSet, IngestError> {
    let mut tsv = Tsv::new(path, input, &COLUMNS)?;
    let idx: Vec<usize> = COLUMNS.iter().map(|c| tsv.col(c)).collect();
    let path = tsv.path.clone();
    let bad = |line, message: String| IngestError::MalformedRow {
        path: path.clone(),
        line,
        message,
    };
    let mut set = ConceptSet::new();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let f = |i: usize| row.get(idx[i]);
        let concept_id: ConceptId = f(0)
            .parse()
            .map_err(|e| bad(line, format!("concept_id: {e}")))?;
        let row_domain: Domain = f(5).parse().map_err(|e| bad(line, format!("domain: {e}")))?;
        if domain.is_some_and(|d| d != row_domain) {
            continue;
        }
        let code = vocabulary_code(f(1), f(2), dict).map_err(|e| bad(line, e.to_string()))?;
        let used_in_practice =
            parse_bool(f(6)).ok_or_else(|| bad(line, format!("used_in_practice: {:?}", f(6))))?;
        let record_count: u64 = f(7)
            .parse()
            .map_err(|_| bad(line, format!("record_count: {:?}", f(7))))?;
        let label = f(3).to_string();
        if label.is_empty() {
            return Err(bad(line, "empty label".into()));
        }
        let concept = ClinicalConcept {
            concept_id,
            vocabulary: code.prefix().to_string(),
            code,
            label,
            synonyms: split_multi(f(4)).map(str::to_string).collect(),
            domain: row_domain,
            used_in_practice,
            record_count,
            ancestors: Vec::new(),
            semantic_types: BTreeSet::new(),
            cuis: BTreeSet::new(),
        };
        concept.check().map_err(|e| bad(line, e.to_string()))?;
        set.insert(concept).map_err(|c| IngestError::DuplicateId {
            path: path.clone(),
            line,
            id: c.concept_id.to_string(),
        })?;
    }
    Ok(set)
}

fn read_ancestor_pairs<R: Read>(path: &str, input: R) -> Result<Vec<(ConceptId, ConceptId)>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["concept_id", "ancestor_concept_id"])?;
    let (c, a) = (tsv.col("concept_id"), tsv.col("ancestor_concept_id"));
    let path = tsv.path.clone();
    let mut pairs = Vec::new();
    for row in tsv.rows() {
        let row = row?;
        let parse = |s: &str| {
            s.parse::<ConceptId>().map_err(|e| IngestError::MalformedRow {
                path: path.clone(),
                line: row.line,
                message: e.to_string(),
            })
        };
        pairs.push((parse(row.get(c))?, parse(row.get(a))?));
    }
    Ok(pairs)
}

/// Loads `concepts.tsv` and, when given, joins `concept_ancestors.tsv`.
pub fn load_concepts(
    path: &Path,
    ancestors: Option<&Path>,
    domain: Option<Domain>,
    dict: &NormalizationDictionary,
) -> Result<(ConceptSet, LoadReport), IngestError> {
    let mut set = read_concepts(&path.display().to_string(), open(path)?, domain, dict)?;
    let report = match ancestors {
        Some(p) => {
            let pairs = read_ancestor_pairs(&p.display().to_string(), open(p)?)?;
            set.attach_ancestors(pairs)
        }
        None => LoadReport::default(),
    };
    Ok((set, report))
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ").replace('|', "/")
}

/// Writes a concept table in the canonical column order.
pub fn write_concepts<W: Write>(out: W, concepts: &ConceptSet) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "{}", COLUMNS.join("\t"))?;
    for c in concepts.iter() {
        let synonyms: Vec<String> = c.synonyms.iter().map(|s| clean(s)).collect();
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.concept_id,
            c.vocabulary,
            c.code.code(),
            clean(&c.label),
            synonyms.join("|"),
            c.domain,
            u8::from(c.used_in_practice),
            c.record_count
        )?;
    }
    w.flush()
}

pub fn write_concept_ancestors<W: Write>(out: W, concepts: &ConceptSet) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "concept_id\tancestor_concept_id")?;
    for c in concepts.iter() {
        for a in &c.ancestors {
            writeln!(w, "{}\t{}", c.concept_id, a)?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str =
        "concept_id\tvocabulary\tconcept_code\tlabel\tsynonyms\tdomain\tused_in_practice\trecord_count\n";

    fn read(body: &str) -> Result<ConceptSet, IngestError> {
        read_concepts(
            "concepts.tsv",
            format!("{HEADER}{body}").as_bytes(),
            None,
            &NormalizationDictionary::builtin(),
        )
    }

    #[test]
    fn parses_worked_example_row() {
        let set = read("22945\tSNOMED\t70305005\tHorizontal overbite\toverjet\tCONDITION\t1\t12\n").unwrap();
        let c = set.get(ConceptId::new(22945).unwrap()).unwrap();
        assert_eq!(c.synonyms, ["overjet"]);
        assert_eq!(c.code.to_string(), "SNOMED:70305005");
        assert!(c.used_in_practice);
        assert_eq!(c.record_count, 12);
    }

    #[test]
    fn empty_file_is_empty_set() {
        assert!(read("").unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_rejected_with_line() {
        let err = read(
            "1\tSNOMED\t1\ta\t\tCONDITION\t1\t5\n1\tSNOMED\t2\tb\t\tCONDITION\t1\t5\n",
        )
        .unwrap_err();
        assert_eq!(err.code(), "DUPLICATE_ID");
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn missing_column() {
        let err = read_concepts(
            "x",
            "concept_id\tlabel\n".as_bytes(),
            None,
            &NormalizationDictionary::builtin(),
        )
        .unwrap_err();
        assert_eq!(err.code(), "MISSING_COLUMN");
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = read("1\tSNOMED\t1\ta\t\tCONDITION\tmaybe\t5\n").unwrap_err();
        assert_eq!(err.code(), "MALFORMED_ROW");
        assert_eq!(err.line(), Some(2));
        let err = read("1\tSNOMED\t1\ta\t\tCONDITION\t1\t0\n").unwrap_err();
        assert_eq!(err.code(), "MALFORMED_ROW");
    }

    #[test]
    fn ancestors_join_and_dangling_count() {
        let mut set = read(
            "1\tSNOMED\t1\ta\t\tCONDITION\t1\t5\n2\tSNOMED\t2\tb\t\tCONDITION\t0\t0\n",
        )
        .unwrap();
        let one = ConceptId::new(1).unwrap();
        let two = ConceptId::new(2).unwrap();
        let nine = ConceptId::new(9).unwrap();
        let report = set.attach_ancestors([(one, two), (one, one), (one, nine), (one, two)]);
        assert_eq!(report.dangling_ancestors, 1);
        assert_eq!(set.get(one).unwrap().ancestors, [two]);
    }

    #[test]
    fn domain_filter() {
        let set = read_concepts(
            "x",
            format!("{HEADER}1\tSNOMED\t1\ta\t\tCONDITION\t1\t5\n2\tRxNorm\t2\tb\t\tDRUG\t1\t5\n").as_bytes(),
            Some(Domain::Drug),
            &NormalizationDictionary::builtin(),
        )
        .unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.iter().next().unwrap().vocabulary, "RXNORM");
    }

    proptest! {
        #[test]
        fn write_read_round_trip(rows in prop::collection::btree_map(
            1u64..10_000,
            ("[A-Za-z][A-Za-z ]{0,12}[a-z]", prop::collection::vec("[a-z]{1,8}", 0..3), any::<bool>(), 1u64..1_000_000),
            0..20,
        )) {
            let dict = NormalizationDictionary::builtin();
            let set: ConceptSet = rows
                .iter()
                .map(|(id, (label, syns, used, count))| ClinicalConcept {
                    concept_id: ConceptId::new(*id).unwrap(),
                    vocabulary: "SNOMED".into(),
                    code: vocabulary_code("SNOMED", &id.to_string(), &dict).unwrap(),
                    label: label.clone(),
                    synonyms: syns.clone(),
                    domain: Domain::Condition,
                    used_in_practice: *used,
                    record_count: *count,
                    ancestors: vec![],
                    semantic_types: BTreeSet::new(),
                    cuis: BTreeSet::new(),
                })
                .collect();
            let mut buf = Vec::new();
            write_concepts(&mut buf, &set).unwrap();
            let back = read_concepts("mem", buf.as_slice(), None, &dict).unwrap();
            prop_assert_eq!(back, set);
        }
    }
}
