mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use common::*;
use termbridge::report::load_mappings;

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

const CONCEPT_HEADER: &str = "concept_id\tvocabulary\tconcept_code\tlabel\tsynonyms\tdomain\tused_in_practice\trecord_count\n";

#[test]
fn worked_fixture_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let r = run_cli(worked_map_args(out));
        assert!(r.status.success(), "{}", stderr(&r));
    }
    assert_eq!(file_map(&a), file_map(&b));
    let records = load_mappings(&a.join("mappings.tsv")).unwrap();
    // 12 concepts, two condition ontologies each
    assert_eq!(records.len(), 24);
}

#[test]
fn summary_counts_match_mapping_rows() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_cli(worked_map_args(dir.path()));
    assert!(r.status.success(), "{}", stderr(&r));
    let records = load_mappings(&dir.path().join("mappings.tsv")).unwrap();
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let hp_mapped = records
        .iter()
        .filter(|r| r.ontology.key() == "HP" && r.is_mapped())
        .count() as u64;
    let tables = &summary["tables"]["CONDITION"]["HP"];
    let total: u64 = ["yes", "no"]
        .iter()
        .map(|k| tables[k]["total_mapped"].as_u64().unwrap())
        .sum();
    assert_eq!(total, hp_mapped);
}

#[test]
fn empty_concept_file_gives_header_and_zero_summary() {
    let dir = tempfile::tempdir().unwrap();
    let concepts = write(dir.path(), "concepts.tsv", CONCEPT_HEADER);
    let out = dir.path().join("out");
    let r = run_cli(["map", "--concepts", &concepts, "--out", &out.display().to_string()]);
    assert!(r.status.success(), "{}", stderr(&r));
    let text = fs::read_to_string(out.join("mappings.tsv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("concept_id\tdomain\tontology\tcategory"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    let mut totals = Vec::new();
    for domain in summary["tables"].as_object().unwrap().values() {
        for ontology in domain.as_object().unwrap().values() {
            for column in ontology.as_object().unwrap().values() {
                totals.push(column["total_mapped"].as_u64().unwrap());
                totals.push(column["total_unmapped"].as_u64().unwrap());
            }
        }
    }
    assert!(!totals.is_empty());
    assert!(totals.iter().all(|&t| t == 0));
}

#[test]
fn config_file_paths_resolve_against_the_config_directory() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    for f in ["concepts.tsv", "concept_ancestors.tsv", "hp.jsonl", "mondo.jsonl", "MRCONSO.RRF", "MRSTY.RRF", "routing.tsv", "curation.tsv"] {
        fs::copy(fixture(&format!("worked/{f}")), data.join(f)).unwrap();
    }
    let config = write(
        &data,
        "run.toml",
        r#"concepts = "concepts.tsv"
ancestors = "concept_ancestors.tsv"
ontology = ["hp.jsonl", "mondo.jsonl"]
umls_mrconso = "MRCONSO.RRF"
umls_mrsty = "MRSTY.RRF"
routing = "routing.tsv"
curation = "curation.tsv"
jobs = 2
"#,
    );
    let via_config = dir.path().join("via_config");
    let r = run_cli(["map", "--config", &config, "--out", &via_config.display().to_string()]);
    assert!(r.status.success(), "{}", stderr(&r));
    let via_flags = dir.path().join("via_flags");
    assert!(run_cli(worked_map_args(&via_flags)).status.success());
    assert_eq!(file_map(&via_config), file_map(&via_flags));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out").display().to_string();

    let r = run_cli(["map", "--no-such-flag"]);
    assert_eq!(r.status.code(), Some(1), "usage: {}", stderr(&r));

    let r = run_cli(["map", "--concepts", "/nonexistent/concepts.tsv", "--out", &out]);
    assert_eq!(r.status.code(), Some(1), "missing input: {}", stderr(&r));
    assert!(stderr(&r).contains("MISSING_INPUT"));

    let r = run_cli(["map", "--concepts", &fixture("worked/concepts.tsv").display().to_string(), "--tau", "1.5", "--out", &out]);
    assert_eq!(r.status.code(), Some(1), "bad tau: {}", stderr(&r));

    let bad = write(dir.path(), "bad.tsv", &format!("{CONCEPT_HEADER}1\tSNOMED\t1\tx\t\tnot_a_domain\t1\t10\n"));
    let r = run_cli(["map", "--concepts", &bad, "--out", &out]);
    assert_eq!(r.status.code(), Some(2), "parse: {}", stderr(&r));

    let dup = write(
        dir.path(),
        "dup.tsv",
        &format!("{CONCEPT_HEADER}1\tSNOMED\t1\tx\t\tcondition\t1\t10\n1\tSNOMED\t2\ty\t\tcondition\t1\t10\n"),
    );
    let r = run_cli(["map", "--concepts", &dup, "--out", &out]);
    assert_eq!(r.status.code(), Some(3), "duplicate: {}", stderr(&r));
}

fn phers_files(dir: &Path, cases: &[f64], controls: &[f64]) -> [String; 3] {
    // one phenotype of weight 1 per unit of raw score
    let max = cases.iter().chain(controls).fold(0.0f64, |a, &b| a.max(b)) as usize;
    let mut weights = String::from("hpo_curie\tweight\n");
    for k in 1..=max {
        weights.push_str(&format!("HP:{k:07}\t1\n"));
    }
    let mut patients = String::from("patient_id\thpo_curie\n");
    let mut cohort = String::from("patient_id\tgroup\n");
    for (group, scores) in [("CASE", cases), ("CONTROL", controls)] {
        for (i, &s) in scores.iter().enumerate() {
            let id = format!("{}{i}", &group[..2]);
            for k in 1..=s as usize {
                patients.push_str(&format!("{id}\tHP:{k:07}\n"));
            }
            cohort.push_str(&format!("{id}\t{group}\n"));
        }
    }
    [
        write(dir, "weights.tsv", &weights),
        write(dir, "patients.tsv", &patients),
        write(dir, "cohort.tsv", &cohort),
    ]
}

fn run_phers(dir: &Path, files: &[String; 3]) -> std::process::Output {
    let out = dir.join("out").display().to_string();
    run_cli(["phers", "--weights", &files[0], "--patients", &files[1], "--cohort", &files[2], "--out", &out])
}

#[test]
fn phers_three_patients_standardize_to_unit_steps() {
    let dir = tempfile::tempdir().unwrap();
    let files = phers_files(dir.path(), &[3.0], &[1.0, 2.0]);
    let r = run_phers(dir.path(), &files);
    assert!(r.status.success(), "{}", stderr(&r));
    let mut z: Vec<(f64, f64)> = data_lines(&dir.path().join("out/phers.tsv"))
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    z.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(z, [(1.0, -1.0), (2.0, 0.0), (3.0, 1.0)]);
}

#[test]
fn phers_shifted_cases_are_significant() {
    let dir = tempfile::tempdir().unwrap();
    let controls: Vec<f64> = (1..=10).map(f64::from).collect();
    let cases: Vec<f64> = controls.iter().map(|c| c + 6.0).collect();
    let r = run_phers(dir.path(), &phers_files(dir.path(), &cases, &controls));
    assert!(r.status.success(), "{}", stderr(&r));
    let test: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/test.json")).unwrap()).unwrap();
    let p = test["wilcoxon"]["p_value"].as_f64().unwrap();
    let exact = permutation_p(&cases, &controls);
    assert!(exact < 0.05, "oracle p {exact}");
    assert!(p < 0.05, "p {p}");
    assert!((p - exact).abs() < 0.01, "normal approximation {p} far from exact {exact}");
}

#[test]
fn phers_empty_group_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_phers(dir.path(), &phers_files(dir.path(), &[1.0, 2.0, 3.0], &[]));
    assert_eq!(r.status.code(), Some(3), "{}", stderr(&r));
    assert!(stderr(&r).contains("EMPTY_GROUP"));
}

/// Mapped concept ids of the worked fixture, and its mappings.tsv path.
fn worked_mappings(dir: &Path) -> (Vec<u64>, String) {
    let out = dir.join("worked");
    assert!(run_cli(worked_map_args(&out)).status.success());
    let path = out.join("mappings.tsv");
    let mapped: BTreeSet<u64> = load_mappings(&path)
        .unwrap()
        .iter()
        .filter(|r| r.is_mapped())
        .map(|r| r.concept_id.get())
        .collect();
    (mapped.into_iter().collect(), path.display().to_string())
}

#[test]
fn single_site_coverage_has_empty_pairwise_table() {
    let dir = tempfile::tempdir().unwrap();
    let (mapped, mappings) = worked_mappings(dir.path());
    let mut prevalence = String::from("site_id\tconcept_id\trecord_count\n");
    for id in &mapped[..4] {
        prevalence.push_str(&format!("A\t{id}\t500\n"));
    }
    prevalence.push_str("A\t999999\t20\n");
    let prev = write(dir.path(), "prev.tsv", &prevalence);
    let out = dir.path().join("cov");
    let r = run_cli(["coverage", "--mappings", &mappings, "--prevalence", &prev, "--out", &out.display().to_string()]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(fs::read_to_string(out.join("pairwise.tsv")).unwrap().lines().count(), 1);
    let cov: serde_json::Value = serde_json::from_slice(&fs::read(out.join("coverage.json")).unwrap()).unwrap();
    assert_eq!(cov["pooled"]["unweighted_coverage_pct"].as_f64().unwrap(), 80.0);
    // the 20 is floored to 100
    let weighted = cov["pooled"]["weighted_coverage_pct"].as_f64().unwrap();
    assert!((weighted - 100.0 * 2000.0 / 2100.0).abs() < 1e-9);
    assert!(cov["omnibus"].is_null());
}

#[test]
fn four_site_coverage_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (mapped, mappings) = worked_mappings(dir.path());
    assert!(mapped.len() >= 9);
    // (site, covered, uncovered)
    let sites = [("A", 9usize, 1usize), ("B", 8, 30), ("C", 3, 40), ("D", 6, 6)];
    let mut prevalence = String::from("site_id\tconcept_id\trecord_count\n");
    for (s, covered, uncovered) in sites {
        for id in &mapped[..covered] {
            prevalence.push_str(&format!("{s}\t{id}\t1000\n"));
        }
        for k in 0..uncovered {
            prevalence.push_str(&format!("{s}\t{}\t300\n", 5_000_000 + k));
        }
    }
    let prev = write(dir.path(), "prev.tsv", &prevalence);
    // uncovered ids 5_000_000.. are split: first 5 newer CDM, next 20 excluded, rest missing
    let newer = write(dir.path(), "newer.tsv", &(0..5).fold("concept_id\n".to_string(), |s, k| s + &format!("{}\n", 5_000_000 + k)));
    let excluded = write(dir.path(), "excluded.tsv", &(5..25).fold("concept_id\n".to_string(), |s, k| s + &format!("{}\n", 5_000_000 + k)));
    let out = dir.path().join("cov");
    let r = run_cli([
        "coverage", "--mappings", &mappings, "--prevalence", &prev, "--newer-cdm", &newer, "--excluded", &excluded,
        "--out", &out.display().to_string(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));

    let pairwise = data_lines(&out.join("pairwise.tsv"));
    assert_eq!(pairwise.len(), 6);
    let threshold = 0.05 / 6.0;
    for line in &pairwise {
        let f: Vec<&str> = line.split('\t').collect();
        let a = sites.iter().find(|s| s.0 == f[0]).unwrap();
        let b = sites.iter().find(|s| s.0 == f[1]).unwrap();
        let stat = yates_2x2_closed(a.1 as u64, a.2 as u64, b.1 as u64, b.2 as u64);
        let p = gamma_q_closed(0.5, stat / 2.0);
        let got_stat: f64 = f[2].parse().unwrap();
        let got_p: f64 = f[3].parse().unwrap();
        assert!((got_stat - stat).abs() < 1e-6, "{line}: statistic {stat}");
        assert!((got_p - p).abs() <= 1e-6 * p, "{line}: p {p}");
        assert_eq!(f[4] == "true", p < threshold, "{line}");
    }

    // pooled site-only concepts are 5_000_000 .. 5_000_040
    let buckets = data_lines(&out.join("buckets.tsv"));
    let counts: Vec<(String, usize)> = buckets
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(
        counts,
        [
            ("RECOVERED_NEWER_CDM".to_string(), 5),
            ("PURPOSEFULLY_EXCLUDED".to_string(), 20),
            ("TRULY_MISSING".to_string(), 15)
        ]
    );
    assert_eq!(data_lines(&out.join("bucket_members.tsv")).len(), 40);
}

#[test]
fn sssom_rows_equal_target_count() {
    let dir = tempfile::tempdir().unwrap();
    let (_, mappings) = worked_mappings(dir.path());
    let targets: usize = load_mappings(Path::new(&mappings))
        .unwrap()
        .iter()
        .filter(|r| r.is_mapped())
        .map(|r| r.targets.len())
        .sum();
    let out = dir.path().join("map.sssom.tsv");
    let r = run_cli([
        "export-sssom", "--mappings", &mappings,
        "--concepts", &fixture("worked/concepts.tsv").display().to_string(),
        "--ontology", &fixture("worked/hp.jsonl").display().to_string(),
        "--ontology", &fixture("worked/mondo.jsonl").display().to_string(),
        "--out", &out.display().to_string(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let rows = data_lines(&out);
    assert_eq!(rows.len(), targets);
    assert!(rows.iter().any(|l| l.starts_with("22945/HP\tSNOMED:70305005\tHorizontal overbite\tskos:exactMatch")), "{rows:#?}");
}

#[test]
fn measurement_fixture_excludes_unspecified_samples() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_cli(measurement_map_args(dir.path()));
    assert!(r.status.success(), "{}", stderr(&r));
    let records = load_mappings(&dir.path().join("mappings.tsv")).unwrap();
    let sodium: Vec<_> = records.iter().filter(|r| r.concept_id.get() == 3040000).collect();
    assert_eq!(sodium.len(), 6);
    assert!(sodium.iter().all(|r| r.unmapped_reason.map(|x| x.code()) == Some("UNSPECIFIED_SAMPLE")));
}
