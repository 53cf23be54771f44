//! Phenotype risk scores for a small case/control cohort and the one-sided
//! rank-sum test of cases scoring higher.
//!
//!     cargo run --example phers_case_control

use std::collections::{BTreeMap, BTreeSet};

use termbridge::eval::{phers, wilcoxon_rank_sum_one_sided};
use termbridge::ingest::CohortGroup;
use termbridge::model::Curie;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hp = |s: &str| Curie::parse(s);
    // weights are typically -log prevalence of each phenotype
    let weights: BTreeMap<Curie, f64> = [
        (hp("HP:0001250")?, 2.3),
        (hp("HP:0001263")?, 1.7),
        (hp("HP:0000252")?, 3.1),
        (hp("HP:0001290")?, 0.9),
    ]
    .into();
    let observed = [
        ("case1", CohortGroup::Case, vec!["HP:0001250", "HP:0001263", "HP:0000252"]),
        ("case2", CohortGroup::Case, vec!["HP:0001250", "HP:0000252"]),
        ("case3", CohortGroup::Case, vec!["HP:0001263", "HP:0001290", "HP:0000252"]),
        ("case4", CohortGroup::Case, vec!["HP:0001250", "HP:0001290"]),
        ("ctrl1", CohortGroup::Control, vec!["HP:0001290"]),
        ("ctrl2", CohortGroup::Control, vec![]),
        ("ctrl3", CohortGroup::Control, vec!["HP:0001263"]),
        ("ctrl4", CohortGroup::Control, vec!["HP:0001290", "HP:0001263"]),
        ("ctrl5", CohortGroup::Control, vec![]),
    ];
    let mut patients: BTreeMap<String, BTreeSet<Curie>> = BTreeMap::new();
    let mut cohort = BTreeMap::new();
    for (id, group, terms) in observed {
        cohort.insert(id.to_string(), group);
        patients.insert(id.to_string(), terms.into_iter().map(hp).collect::<Result<_, _>>()?);
    }

    let result = phers(&patients, &weights, Some(&cohort))?;
    let (mut cases, mut controls) = (Vec::new(), Vec::new());
    for s in &result.scores {
        println!("{:<6} {:<8} raw {:>4.1}  z {:>6.3}", s.patient_id, s.group.unwrap_or(""), s.raw, s.standardized);
        match cohort[&s.patient_id] {
            CohortGroup::Case => cases.push(s.standardized),
            CohortGroup::Control => controls.push(s.standardized),
        }
    }
    let test = wilcoxon_rank_sum_one_sided(&cases, &controls)?;
    println!("rank sum W = {}, U = {}, p = {:.4} ({:?})", test.rank_sum, test.u, test.p_value, test.method);
    Ok(())
}
