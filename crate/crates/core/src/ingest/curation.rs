use std::io::{Read, Write};
use std::path::Path;

use super::{open, split_multi, IngestError, Tsv};
use crate::model::{ConceptId, Curie, Logic, Ontology, UnmappedReason};

const COLUMNS: [&str; 6] = ["concept_id", "ontology", "logic", "targets", "evidence", "unmapped_reason"];

/// One manually curated decision for a (concept, ontology) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CurationRow {
    pub line: u64,
    pub concept_id: ConceptId,
    pub ontology: Ontology,
    /// Present iff `targets` is non-empty.
    pub logic: Option<Logic>,
    pub targets: Vec<Curie>,
    /// Citation texts, one per source.
    pub evidence: Vec<String>,
    pub unmapped_reason: Option<UnmappedReason>,
}

/// Rewrites CURIE operands (`AND(HP:1,HP:2)`) to target indexes (`AND(0,1)`).
fn index_logic(logic: &str, targets: &[Curie]) -> String {
    let mut out = String::with_capacity(logic.len());
    let mut token = String::new();
    let flush = |token: &mut String, out: &mut String| {
        let t = token.trim();
        match targets.iter().position(|c| c.as_str() == t) {
            Some(i) => out.push_str(&i.to_string()),
            None => out.push_str(t),
        }
        token.clear();
    };
    for ch in logic.chars() {
        if matches!(ch, '(' | ')' | ',') {
            flush(&mut token, &mut out);
            out.push(ch);
        } else {
            token.push(ch);
        }
    }
    flush(&mut token, &mut out);
    out
}

pub fn read_curation<R: Read>(path: &str, input: R) -> Result<Vec<CurationRow>, IngestError> {
    let mut tsv = Tsv::new(path, input, &COLUMNS)?;
    let idx: Vec<usize> = COLUMNS.iter().map(|c| tsv.col(c)).collect();
    let path = tsv.path.clone();
    let bad = |line, message: String| IngestError::MalformedRow {
        path: path.clone(),
        line,
        message,
    };
    let mut out = Vec::new();
    for row in tsv.rows() {
        let row = row?;
        let line = row.line;
        let f = |i: usize| row.get(idx[i]);
        let concept_id: ConceptId = f(0).parse().map_err(|e| bad(line, format!("concept_id: {e}")))?;
        let ontology: Ontology = f(1).parse().map_err(|_| IngestError::UnknownOntology {
            path: path.clone(),
            line,
            value: f(1).to_string(),
        })?;
        let targets = split_multi(f(3))
            .map(|t| {
                Curie::parse(t).map_err(|_| IngestError::BadCurie {
                    path: path.clone(),
                    line,
                    curie: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let unmapped_reason = match f(5) {
            "" => None,
            r => Some(r.parse::<UnmappedReason>().map_err(|_| IngestError::UnknownReason {
                path: path.clone(),
                line,
                value: r.to_string(),
            })?),
        };
        if !targets.is_empty() && unmapped_reason.is_some() {
            return Err(IngestError::BothTargetsAndReason {
                path: path.clone(),
                line,
            });
        }
        if targets.is_empty() && unmapped_reason.is_none() {
            return Err(bad(line, "row has neither targets nor an unmapped reason".into()));
        }
        if let Some(t) = targets.iter().find(|t| t.ontology() != ontology) {
            return Err(bad(line, format!("target {t} is not in ontology {}", ontology.key())));
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(bad(line, format!("duplicate target {t}")));
            }
        }
        let logic = if targets.is_empty() {
            if !f(2).is_empty() {
                return Err(bad(line, "logic given without targets".into()));
            }
            None
        } else if f(2).is_empty() {
            Some(Logic::conjunction(targets.len()))
        } else {
            let logic: Logic = index_logic(f(2), &targets)
                .parse()
                .map_err(|e| bad(line, format!("logic: {e}")))?;
            if !logic.references_each_once(targets.len()) {
                return Err(bad(line, format!("logic {:?} must reference each target once", f(2))));
            }
            Some(logic)
        };
        out.push(CurationRow {
            line,
            concept_id,
            ontology,
            logic,
            targets,
            evidence: split_multi(f(4)).map(str::to_string).collect(),
            unmapped_reason,
        });
    }
    Ok(out)
}

pub fn load_curation(path: &Path) -> Result<Vec<CurationRow>, IngestError> {
    read_curation(&path.display().to_string(), open(path)?)
}

/// Writes rows in canonical form (index logic, code reasons).
pub fn write_curation<W: Write>(out: W, rows: &[CurationRow]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "{}", COLUMNS.join("\t"))?;
    for r in rows {
        let targets: Vec<&str> = r.targets.iter().map(Curie::as_str).collect();
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.concept_id,
            r.ontology.key(),
            r.logic.as_ref().map(ToString::to_string).unwrap_or_default(),
            targets.join("|"),
            r.evidence.join("|"),
            r.unmapped_reason.map(|u| u.code()).unwrap_or(""),
        )?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Term;

    const HEADER: &str = "concept_id\tontology\tlogic\ttargets\tevidence\tunmapped_reason\n";

    fn read(body: &str) -> Result<Vec<CurationRow>, IngestError> {
        read_curation("curation.tsv", format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn manual_one_to_one() {
        let rows = read("4070954\tMONDO\t\tMONDO:0008533\tPMID:21998774\t\n").unwrap();
        assert_eq!(rows[0].targets, [Curie::parse("MONDO:0008533").unwrap()]);
        assert_eq!(rows[0].logic, Some(Logic::Single(Term::Target(0))));
        assert_eq!(rows[0].evidence, ["PMID:21998774"]);
    }

    #[test]
    fn manual_one_to_many_with_curie_logic() {
        let rows = read("439140\tHP\tAND(HP:0003623,HP:0001901)\tHP:0003623|HP:0001901\tclinician review\t\n").unwrap();
        assert_eq!(rows[0].logic, Some(Logic::And(vec![Term::Target(0), Term::Target(1)])));
        let rows = read("439140\tHP\tOR(1,NOT(0))\tHP:0003623|HP:0001901\t\t\n").unwrap();
        assert_eq!(rows[0].logic, Some(Logic::Or(vec![Term::Target(1), Term::Not(0)])));
    }

    #[test]
    fn rejects_invalid_rows() {
        let e = read("1\tHP\t\tHP:0000001\t\tINJURY\n").unwrap_err();
        assert_eq!(e.code(), "BOTH_TARGETS_AND_REASON");
        let e = read("1\tSNOMED\t\tHP:0000001\t\t\n").unwrap_err();
        assert_eq!(e.code(), "UNKNOWN_ONTOLOGY");
        let e = read("1\tHP\t\t\t\tSPRAINED\n").unwrap_err();
        assert_eq!((e.code(), e.line()), ("UNKNOWN_REASON", Some(2)));
        let e = read("1\tHP\tAND(0,0)\tHP:0000001|HP:0000002\t\t\n").unwrap_err();
        assert_eq!(e.code(), "MALFORMED_ROW");
    }

    #[test]
    fn reason_by_code_or_display() {
        let rows = read("432498\tHP\t\t\t\tInjury\n4056963\tHP\t\t\t\tFINDING\n").unwrap();
        assert_eq!(rows[0].unmapped_reason, Some(UnmappedReason::Injury));
        assert_eq!(rows[1].unmapped_reason, Some(UnmappedReason::Finding));
    }

    #[test]
    fn round_trip_canonical_form() {
        let rows = read("439140\tHP\tAND(HP:0003623,HP:0001901)\tHP:0003623|HP:0001901\ta|b\t\n432498\tHP\t\t\t\tInjury\n").unwrap();
        let mut buf = Vec::new();
        write_curation(&mut buf, &rows).unwrap();
        let back = read_curation("c", buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }
}
