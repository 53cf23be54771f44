use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use super::{open, IngestError};
use crate::lexical::NormalizationDictionary;
use crate::model::{CodeRef, Cui};

const MRCONSO_FIELDS: usize = 15;
const MRSTY_FIELDS: usize = 4;

/// One MRCONSO row, projected to the fields alignment needs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UmlsAtom {
    pub cui: Cui,
    pub sab: String,
    pub code: String,
    pub str_text: String,
}

/// One MRSTY row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SemanticTypeRow {
    pub cui: Cui,
    pub sty_name: String,
}

/// Atoms indexed by canonical `(sab, code)` plus semantic types by CUI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UmlsIndex {
    atoms: BTreeMap<CodeRef, BTreeSet<Cui>>,
    semantic_types: BTreeMap<Cui, BTreeSet<String>>,
}

impl UmlsIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_atom(&mut self, code: CodeRef, cui: Cui) {
        self.atoms.entry(code).or_default().insert(cui);
    }

    pub fn add_semantic_type(&mut self, cui: Cui, sty: impl Into<String>) {
        self.semantic_types.entry(cui).or_default().insert(sty.into());
    }

    /// CUIs sharing a canonicalized code; empty when the code is unknown.
    pub fn cuis_for(&self, code: &CodeRef) -> impl Iterator<Item = &Cui> {
        self.atoms.get(code).into_iter().flatten()
    }

    pub fn semantic_types(&self, cui: &Cui) -> impl Iterator<Item = &str> {
        self.semantic_types.get(cui).into_iter().flatten().map(String::as_str)
    }

    pub fn atom_keys(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.semantic_types.is_empty()
    }
}

fn fields(line: &str) -> Vec<&str> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let line = line.strip_suffix('|').unwrap_or(line);
    line.split('|').collect()
}

fn parse_cui(path: &str, line: u64, s: &str) -> Result<Cui, IngestError> {
    Cui::parse(s).map_err(|_| IngestError::BadCui {
        path: path.to_string(),
        line,
        cui: s.to_string(),
    })
}

fn for_each_row<R: BufRead>(
    path: &str,
    input: R,
    min_fields: usize,
    mut f: impl FnMut(u64, &[&str]) -> Result<(), IngestError>,
) -> Result<(), IngestError> {
    for (i, line) in input.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parts = fields(&line);
        if parts.len() < min_fields {
            return Err(IngestError::ShortRow {
                path: path.to_string(),
                line: line_no,
                fields: parts.len(),
                expected: min_fields,
            });
        }
        f(line_no, &parts)?;
    }
    Ok(())
}

/// Streams MRCONSO rows into `visit`. Only fields 0, 11, 13 and 14 are read.
pub fn parse_mrconso<R: BufRead>(
    path: &str,
    input: R,
    mut visit: impl FnMut(UmlsAtom),
) -> Result<(), IngestError> {
    for_each_row(path, input, MRCONSO_FIELDS, |line, f| {
        let cui = parse_cui(path, line, f[0])?;
        let (sab, code) = (f[11].trim(), f[13].trim());
        if sab.is_empty() || code.is_empty() {
            return Err(IngestError::MalformedRow {
                path: path.to_string(),
                line,
                message: "empty SAB or CODE".into(),
            });
        }
        visit(UmlsAtom {
            cui,
            sab: sab.to_string(),
            code: code.to_string(),
            str_text: f[14].to_string(),
        });
        Ok(())
    })
}

/// Streams MRSTY rows into `visit`. Only fields 0 and 3 are read.
pub fn parse_mrsty<R: BufRead>(
    path: &str,
    input: R,
    mut visit: impl FnMut(SemanticTypeRow),
) -> Result<(), IngestError> {
    for_each_row(path, input, MRSTY_FIELDS, |line, f| {
        let cui = parse_cui(path, line, f[0])?;
        visit(SemanticTypeRow {
            cui,
            sty_name: f[3].trim().to_string(),
        });
        Ok(())
    })
}

/// Builds the atom and semantic-type index. When `keep_prefixes` is given,
/// only atoms whose canonical SAB is listed are retained, so memory tracks
/// the retained index rather than the file.
pub fn load_umls(
    mrconso: &Path,
    mrsty: Option<&Path>,
    dict: &NormalizationDictionary,
    keep_prefixes: Option<&BTreeSet<String>>,
) -> Result<UmlsIndex, IngestError> {
    let mut index = UmlsIndex::new();
    let mut sab_cache: BTreeMap<String, String> = BTreeMap::new();
    parse_mrconso(&mrconso.display().to_string(), open(mrconso)?, |atom| {
        let prefix = sab_cache
            .entry(atom.sab.clone())
            .or_insert_with(|| dict.canonical_prefix(&atom.sab))
            .clone();
        if keep_prefixes.is_some_and(|k| !k.contains(&prefix)) {
            return;
        }
        if let Ok(code) = CodeRef::new(prefix, atom.code) {
            index.add_atom(code, atom.cui);
        }
    })?;
    if let Some(p) = mrsty {
        parse_mrsty(&p.display().to_string(), open(p)?, |row| {
            index.add_semantic_type(row.cui, row.sty_name);
        })?;
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conso_line(cui: &str, sab: &str, code: &str, text: &str) -> String {
        format!("{cui}|ENG|P|L0000001|PF|S0000001|Y|A0000001||||{sab}|PT|{code}|{text}|0|N|256|")
    }

    fn atoms(text: &str) -> Result<Vec<UmlsAtom>, IngestError> {
        let mut out = Vec::new();
        parse_mrconso("MRCONSO.RRF", text.as_bytes(), |a| out.push(a))?;
        Ok(out)
    }

    #[test]
    fn projects_mrconso_fields() {
        let got = atoms(&conso_line("C0596028", "SNOMEDCT_US", "70305005", "Overjet")).unwrap();
        assert_eq!(
            got,
            [UmlsAtom {
                cui: Cui::parse("C0596028").unwrap(),
                sab: "SNOMEDCT_US".into(),
                code: "70305005".into(),
                str_text: "Overjet".into()
            }]
        );
    }

    #[test]
    fn projects_mrsty_fields() {
        let mut rows = Vec::new();
        parse_mrsty("MRSTY.RRF", "C0596028|T033|A2.2|Finding|AT0001|256|\n".as_bytes(), |r| rows.push(r))
            .unwrap();
        assert_eq!(rows[0].cui.as_str(), "C0596028");
        assert_eq!(rows[0].sty_name, "Finding");
    }

    #[test]
    fn short_row_and_bad_cui_carry_line() {
        let text = format!("{}\nC0000001|ENG|P\n", conso_line("C0596028", "SNOMEDCT_US", "1", "x"));
        let e = atoms(&text).unwrap_err();
        assert_eq!((e.code(), e.line()), ("SHORT_ROW", Some(2)));
        let e = atoms(&conso_line("X123", "SNOMEDCT_US", "1", "x")).unwrap_err();
        assert_eq!((e.code(), e.line()), ("BAD_CUI", Some(1)));
    }

    #[test]
    fn index_matches_nested_loop_oracle() {
        let fixture = [
            ("C0596028", "SNOMEDCT_US", "70305005", "Overjet"),
            ("C0036093", "SNOMEDCT_US", "10890000", "Salivary gland"),
            ("C1527405", "SNOMEDCT_US", "127062003", "Erythrocytosis"),
            ("C0032461", "SNOMEDCT_US", "127062003", "Polycythemia"),
            ("C0596028", "MSH", "D015405", "Overbite"),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("MRCONSO.RRF");
        let text: String = fixture.iter().map(|(c, s, k, t)| conso_line(c, s, k, t) + "\n").collect();
        std::fs::write(&path, text).unwrap();
        let dict = NormalizationDictionary::builtin();
        let index = load_umls(&path, None, &dict, None).unwrap();

        let mut keys: Vec<CodeRef> = fixture
            .iter()
            .map(|(_, s, k, _)| CodeRef::new(dict.canonical_prefix(s), *k).unwrap())
            .collect();
        keys.sort();
        keys.dedup();
        assert_eq!(index.atom_keys(), keys.len());
        for key in &keys {
            let mut expected = Vec::new();
            for (c, s, k, _) in &fixture {
                if dict.canonical_prefix(s) == key.prefix() && *k == key.code() {
                    expected.push(Cui::parse(c).unwrap());
                }
            }
            expected.sort();
            expected.dedup();
            let got: Vec<Cui> = index.cuis_for(key).cloned().collect();
            assert_eq!(got, expected, "{key}");
        }

        let keep: BTreeSet<String> = ["MESH".to_string()].into();
        let filtered = load_umls(&path, None, &dict, Some(&keep)).unwrap();
        assert_eq!(filtered.atom_keys(), 1);
    }
}
