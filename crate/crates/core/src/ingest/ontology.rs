use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{open, IngestError, LoadReport, Tsv};
use crate::lexical::{canonicalize_code, NormalizationDictionary};
use crate::model::{Curie, Ontology, OntologyClass, Synonym};

/// One line of the ontology dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DumpLine {
    curie: String,
    ontology: String,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    definition: Option<String>,
    #[serde(default)]
    synonyms: Vec<Synonym>,
    #[serde(default)]
    xrefs: Vec<String>,
    #[serde(default)]
    deprecated: bool,
}

/// Ontology classes keyed by CURIE.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OntologySet {
    classes: BTreeMap<Curie, OntologyClass>,
}

impl OntologySet {
    pub fn new() -> Self {
        Self::default()
    }

    #[allow(clippy::result_large_err)]
    pub fn insert(&mut self, class: OntologyClass) -> Result<(), OntologyClass> {
        if self.classes.contains_key(&class.curie) {
            return Err(class);
        }
        self.classes.insert(class.curie.clone(), class);
        Ok(())
    }

    pub fn get(&self, curie: &Curie) -> Option<&OntologyClass> {
        self.classes.get(curie)
    }

    pub fn label(&self, curie: &Curie) -> Option<&str> {
        self.get(curie).map(|c| c.label.as_str())
    }

    /// All classes in CURIE order, including deprecated ones.
    pub fn iter(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.values()
    }

    /// Classes that may be emitted as mapping targets.
    pub fn active(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.values().filter(|c| !c.deprecated)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Merges another set; duplicate CURIEs are reported by id.
    pub fn extend(&mut self, other: OntologySet) -> Result<(), Curie> {
        for (k, v) in other.classes {
            if self.classes.contains_key(&k) {
                return Err(k);
            }
            self.classes.insert(k, v);
        }
        Ok(())
    }

    pub fn ontologies(&self) -> std::collections::BTreeSet<Ontology> {
        self.classes.values().map(|c| c.ontology).collect()
    }

    /// Joins `(curie, ancestor_curie)` pairs. Unknown children are ignored,
    /// unknown ancestors are counted as dangling.
    pub fn attach_ancestors(&mut self, pairs: impl IntoIterator<Item = (Curie, Curie)>) -> LoadReport {
        let mut report = LoadReport::default();
        for (child, ancestor) in pairs {
            if child == ancestor {
                continue;
            }
            if !self.classes.contains_key(&ancestor) {
                report.dangling_ancestors += 1;
                continue;
            }
            if let Some(c) = self.classes.get_mut(&child) {
                c.ancestors.push(ancestor);
            }
        }
        for c in self.classes.values_mut() {
            c.ancestors.sort();
            c.ancestors.dedup();
        }
        if report.dangling_ancestors > 0 {
            report.warnings.push(format!(
                "DANGLING_ANCESTOR: {} class ancestor rows reference unknown classes",
                report.dangling_ancestors
            ));
        }
        report
    }
}

/// Parses a JSON-Lines ontology dump. Unparseable xrefs are skipped with a warning.
pub fn read_ontology_dump<R: BufRead>(
    path: &str,
    input: R,
    dict: &NormalizationDictionary,
) -> Result<(OntologySet, LoadReport), IngestError> {
    let mut set = OntologySet::new();
    let mut report = LoadReport::default();
    for (i, line) in input.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: DumpLine = serde_json::from_str(&line).map_err(|e| IngestError::MalformedLine {
            path: path.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        let bad_curie = || IngestError::BadCurie {
            path: path.to_string(),
            line: line_no,
            curie: raw.curie.clone(),
        };
        let curie = Curie::parse(&raw.curie).map_err(|_| bad_curie())?;
        let ontology: Ontology = raw.ontology.parse().map_err(|_| IngestError::UnknownOntology {
            path: path.to_string(),
            line: line_no,
            value: raw.ontology.clone(),
        })?;
        if curie.ontology() != ontology {
            return Err(bad_curie());
        }
        let mut xrefs = Vec::new();
        for x in raw.xrefs.iter().flat_map(|x| x.split('|')) {
            let x = x.trim();
            if x.is_empty() {
                continue;
            }
            match canonicalize_code(x, dict) {
                Ok(c) => xrefs.push(c),
                Err(e) => report
                    .warnings
                    .push(format!("{path}:{line_no}: skipped xref {x:?}: {e}")),
            }
        }
        xrefs.sort();
        xrefs.dedup();
        let class = OntologyClass {
            curie,
            ontology,
            label: raw.label.trim().to_string(),
            definition: raw.definition.filter(|d| !d.trim().is_empty()),
            synonyms: raw
                .synonyms
                .into_iter()
                .filter(|s| !s.text.trim().is_empty())
                .collect(),
            xrefs,
            ancestors: Vec::new(),
            deprecated: raw.deprecated,
        };
        set.insert(class).map_err(|c| IngestError::DuplicateCurie {
            path: path.to_string(),
            line: line_no,
            curie: c.curie.to_string(),
        })?;
    }
    Ok((set, report))
}

fn read_class_ancestors<R: Read>(path: &str, input: R) -> Result<Vec<(Curie, Curie)>, IngestError> {
    let mut tsv = Tsv::new(path, input, &["curie", "ancestor_curie"])?;
    let (c, a) = (tsv.col("curie"), tsv.col("ancestor_curie"));
    let path = tsv.path.clone();
    let mut pairs = Vec::new();
    for row in tsv.rows() {
        let row = row?;
        let parse = |s: &str| {
            Curie::parse(s).map_err(|_| IngestError::BadCurie {
                path: path.clone(),
                line: row.line,
                curie: s.to_string(),
            })
        };
        pairs.push((parse(row.get(c))?, parse(row.get(a))?));
    }
    Ok(pairs)
}

/// Reads a standalone `class_ancestors.tsv`.
pub fn load_class_ancestors(path: &Path) -> Result<Vec<(Curie, Curie)>, IngestError> {
    read_class_ancestors(&path.display().to_string(), open(path)?)
}

/// Loads one `ontology.jsonl` dump and, when given, its `class_ancestors.tsv`.
pub fn load_ontology_dump(
    path: &Path,
    ancestors: Option<&Path>,
    dict: &NormalizationDictionary,
) -> Result<(OntologySet, LoadReport), IngestError> {
    let (mut set, mut report) = read_ontology_dump(&path.display().to_string(), open(path)?, dict)?;
    if let Some(p) = ancestors {
        let pairs = read_class_ancestors(&p.display().to_string(), open(p)?)?;
        report.merge(set.attach_ancestors(pairs));
    }
    Ok((set, report))
}

pub fn write_ontology_dump<W: Write>(out: W, set: &OntologySet) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    for c in set.iter() {
        let line = DumpLine {
            curie: c.curie.to_string(),
            ontology: c.ontology.key().to_string(),
            label: c.label.clone(),
            definition: c.definition.clone(),
            synonyms: c.synonyms.clone(),
            xrefs: c.xrefs.iter().map(ToString::to_string).collect(),
            deprecated: c.deprecated,
        };
        serde_json::to_writer(&mut w, &line)?;
        writeln!(w)?;
    }
    w.flush()
}

pub fn write_class_ancestors<W: Write>(out: W, set: &OntologySet) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "curie\tancestor_curie")?;
    for c in set.iter() {
        for a in &c.ancestors {
            writeln!(w, "{}\t{}", c.curie, a)?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CodeRef, SynonymKind};

    fn read(text: &str) -> Result<(OntologySet, LoadReport), IngestError> {
        read_ontology_dump("ontology.jsonl", text.as_bytes(), &NormalizationDictionary::builtin())
    }

    #[test]
    fn normalizes_xrefs() {
        let (set, _) = read(
            r#"{"curie":"HP:0011095","ontology":"HP","label":"Overjet","xrefs":["SNOMEDCT_US:70305005|UMLS:C0596028"]}"#,
        )
        .unwrap();
        let c = set.get(&Curie::parse("HP:0011095").unwrap()).unwrap();
        assert_eq!(
            c.xrefs,
            [
                CodeRef::new("SNOMED", "70305005").unwrap(),
                CodeRef::new("UMLS", "C0596028").unwrap()
            ]
        );
    }

    #[test]
    fn deprecated_loaded_but_inactive() {
        let (set, _) = read(
            r#"{"curie":"HP:0000001","ontology":"HP","label":"All","deprecated":true}"#,
        )
        .unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.active().count(), 0);
    }

    #[test]
    fn three_line_fixture_matches_hand_parse() {
        let text = concat!(
            r#"{"curie":"MONDO:0001414","ontology":"MONDO","label":"osteopoikilosis","synonyms":[{"text":"Osteopoikilosis","kind":"EXACT"}],"xrefs":["SCTID:9147009"]}"#,
            "\n",
            r#"{"curie":"MONDO:0008157","ontology":"MONDO","label":"Buschke-Ollendorff syndrome","definition":"A rare disorder.","synonyms":[{"text":"Duschke-Ollendorff syndrome","kind":"EXACT"}]}"#,
            "\n\n",
            r#"{"curie":"HP:0033050","ontology":"HP","label":"Throat pain","synonyms":[{"text":"Sore throat","kind":"RELATED"}]}"#,
            "\n"
        );
        let (set, report) = read(text).unwrap();
        assert!(report.warnings.is_empty());
        let mut expected = OntologySet::new();
        let mk = |curie: &str, ontology, label: &str, definition: Option<&str>, syns: &[(&str, SynonymKind)], xrefs: Vec<CodeRef>| OntologyClass {
            curie: Curie::parse(curie).unwrap(),
            ontology,
            label: label.into(),
            definition: definition.map(Into::into),
            synonyms: syns.iter().map(|(t, k)| Synonym { text: (*t).into(), kind: *k }).collect(),
            xrefs,
            ancestors: vec![],
            deprecated: false,
        };
        // insertion order differs from file order on purpose
        expected.insert(mk("HP:0033050", Ontology::Hp, "Throat pain", None, &[("Sore throat", SynonymKind::Related)], vec![])).unwrap();
        expected.insert(mk("MONDO:0008157", Ontology::Mondo, "Buschke-Ollendorff syndrome", Some("A rare disorder."), &[("Duschke-Ollendorff syndrome", SynonymKind::Exact)], vec![])).unwrap();
        expected.insert(mk("MONDO:0001414", Ontology::Mondo, "osteopoikilosis", None, &[("Osteopoikilosis", SynonymKind::Exact)], vec![CodeRef::new("SNOMED", "9147009").unwrap()])).unwrap();
        assert_eq!(set, expected);
    }

    #[test]
    fn error_codes() {
        let e = read(r#"{"curie":"XX:1","ontology":"HP","label":"x"}"#).unwrap_err();
        assert_eq!(e.code(), "BAD_CURIE");
        let e = read(r#"{"curie":"HP:1","ontology":"MONDO","label":"x"}"#).unwrap_err();
        assert_eq!(e.code(), "BAD_CURIE");
        let e = read("{\"curie\":\"HP:1\",\"ontology\":\"HP\",\"label\":\"x\"}\n{\"curie\":\"HP:1\",\"ontology\":\"HP\",\"label\":\"y\"}").unwrap_err();
        assert_eq!(e.code(), "DUPLICATE_CURIE");
        assert_eq!(e.line(), Some(2));
        let e = read("{not json").unwrap_err();
        assert_eq!(e.code(), "MALFORMED_LINE");
        assert_eq!(e.line(), Some(1));
    }

    #[test]
    fn dump_round_trip() {
        let text = concat!(
            r#"{"curie":"HP:0011095","ontology":"HP","label":"Overjet","synonyms":[{"text":"Increased overjet","kind":"EXACT"}],"xrefs":["SNOMEDCT_US:70305005","UMLS:C0596028"]}"#,
            "\n",
            r#"{"curie":"HP:0000002","ontology":"HP","label":"Old","deprecated":true}"#,
            "\n"
        );
        let (set, _) = read(text).unwrap();
        let mut buf = Vec::new();
        write_ontology_dump(&mut buf, &set).unwrap();
        let (back, _) = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, set);
    }
}
