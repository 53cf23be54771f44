//! Command-line surface: `map`, `coverage`, `phers` and `export-sssom`.
//!
//! Exit codes: 0 success, 1 configuration, usage or I/O problem, 2 input
//! parse error, 3 data-integrity error. Errors are printed to standard error
//! as `error[CODE]: message`.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Deserialize;

use crate::align::attach_umls;
use crate::eval::{
    bonferroni_pairwise, bucket_errors, chi_square_yates, cohort_stats, partition_coverage, phers,
    wilcoxon_rank_sum_one_sided, EvalError,
};
use crate::ingest::{
    load_class_ancestors, load_cohort, load_concept_list, load_concepts, load_curation, load_measurement_scales,
    load_measurement_targets, load_ontology_dump, load_patient_phenotypes, load_phenotype_weights,
    load_prevalence, load_routing_policy, load_umls, CohortGroup, ConceptSet, IngestError, OntologySet,
    PREVALENCE_FLOOR,
};
use crate::lexical::{parse_stopwords, LexicalError, NormalizationDictionary, TokenizerConfig};
use crate::model::{Domain, Ontology};
use crate::pipeline::{run_mapping_with_jobs, MappingInputs, PipelineError};
use crate::report::{
    load_mappings, summarize, write_bucket_members, write_buckets, write_json, write_mappings, write_pairwise,
    write_phers, write_sssom, CoverageOutput, PhersTestOutput, PosthocSummary, SummaryMetadata,
};
use crate::similarity::SimilarityConfig;

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// A failed command: machine-readable code, exit status and message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub exit: i32,
    pub message: String,
}

impl CliError {
    fn config(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, exit: EXIT_CONFIG, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        let exit = match e {
            IngestError::Io { .. } => EXIT_CONFIG,
            IngestError::DuplicateId { .. } | IngestError::DuplicateCurie { .. } => EXIT_DATA,
            _ => EXIT_PARSE,
        };
        Self { code: e.code(), exit, message: e.to_string() }
    }
}

impl From<LexicalError> for CliError {
    fn from(e: LexicalError) -> Self {
        match e {
            LexicalError::Io(_) => Self::config("IO", e.to_string()),
            _ => Self { code: "BAD_CODE_MAP", exit: EXIT_PARSE, message: e.to_string() },
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        Self { code: e.code(), exit: EXIT_DATA, message: e.to_string() }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        Self { code: e.code(), exit: EXIT_DATA, message: e.to_string() }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::config("IO", format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "termbridge", version, about = "Align clinical vocabulary concepts to OBO ontologies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Align concepts and write mappings.tsv and summary.json
    Map(MapArgs),
    /// Coverage of a mapping set against site usage
    Coverage(CoverageArgs),
    /// Phenotype risk scores and a one-sided case/control test
    Phers(PhersArgs),
    /// Flatten mappings.tsv into an SSSOM-style TSV
    ExportSssom(SssomArgs),
}

#[derive(Debug, Args, Default)]
pub struct MapArgs {
    /// TOML file with the same keys as the flags (underscored); flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub concepts: Option<PathBuf>,
    #[arg(long)]
    pub ancestors: Option<PathBuf>,
    /// Ontology dump (JSONL); repeat for each ontology
    #[arg(long)]
    pub ontology: Vec<PathBuf>,
    /// Class ancestor table (TSV); repeatable, applies to all loaded dumps
    #[arg(long)]
    pub class_ancestors: Vec<PathBuf>,
    #[arg(long)]
    pub umls_mrconso: Option<PathBuf>,
    #[arg(long)]
    pub umls_mrsty: Option<PathBuf>,
    /// Vocabulary prefix normalization CSV; the bundled map when absent
    #[arg(long)]
    pub code_map: Option<PathBuf>,
    #[arg(long)]
    pub routing: Option<PathBuf>,
    #[arg(long)]
    pub curation: Option<PathBuf>,
    #[arg(long)]
    pub measurement_scales: Option<PathBuf>,
    #[arg(long)]
    pub measurement_targets: Option<PathBuf>,
    /// One stopword per line; the bundled list when absent
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Target ontologies for a domain, e.g. `condition=HP,MONDO`; repeatable
    #[arg(long = "domain-ontologies", value_name = "DOMAIN=LIST")]
    pub domain_ontologies: Vec<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Worker threads; defaults to available parallelism
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub mappings: PathBuf,
    /// Site prevalence TSV; repeatable
    #[arg(long, required = true)]
    pub prevalence: Vec<PathBuf>,
    /// Concept list recovered by a newer CDM release
    #[arg(long)]
    pub newer_cdm: Option<PathBuf>,
    /// Concept list purposefully excluded from mapping
    #[arg(long)]
    pub excluded: Option<PathBuf>,
    /// Restrict the mapping set to one domain
    #[arg(long)]
    pub domain: Option<Domain>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhersArgs {
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long)]
    pub patients: PathBuf,
    #[arg(long)]
    pub cohort: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SssomArgs {
    #[arg(long)]
    pub mappings: PathBuf,
    /// Concept table, for `VOCAB:code` subjects and labels
    #[arg(long)]
    pub concepts: Option<PathBuf>,
    /// Ontology dumps, for object labels; repeatable
    #[arg(long)]
    pub ontology: Vec<PathBuf>,
    #[arg(long)]
    pub code_map: Option<PathBuf>,
    /// Output file
    #[arg(long)]
    pub out: PathBuf,
}

/// Keys accepted in the `--config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub concepts: Option<PathBuf>,
    pub ancestors: Option<PathBuf>,
    #[serde(default)]
    pub ontology: Vec<PathBuf>,
    #[serde(default)]
    pub class_ancestors: Vec<PathBuf>,
    pub umls_mrconso: Option<PathBuf>,
    pub umls_mrsty: Option<PathBuf>,
    pub code_map: Option<PathBuf>,
    pub routing: Option<PathBuf>,
    pub curation: Option<PathBuf>,
    pub measurement_scales: Option<PathBuf>,
    pub measurement_targets: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub tau: Option<f64>,
    pub rho: Option<f64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Domain name to ontology keys.
    #[serde(default)]
    pub domain_ontologies: BTreeMap<String, Vec<String>>,
}

/// Fully resolved settings for one `map` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub concepts: PathBuf,
    pub ancestors: Option<PathBuf>,
    pub ontology: Vec<PathBuf>,
    pub class_ancestors: Vec<PathBuf>,
    pub umls_mrconso: Option<PathBuf>,
    pub umls_mrsty: Option<PathBuf>,
    pub code_map: Option<PathBuf>,
    pub routing: Option<PathBuf>,
    pub curation: Option<PathBuf>,
    pub measurement_scales: Option<PathBuf>,
    pub measurement_targets: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub ontologies: BTreeMap<Domain, Vec<Ontology>>,
    pub similarity: SimilarityConfig,
    pub jobs: usize,
    pub out: PathBuf,
}

fn parse_ontology_list(domain: &str, list: &[&str]) -> Result<(Domain, Vec<Ontology>), CliError> {
    let d: Domain = domain
        .parse()
        .map_err(|_| CliError::config("BAD_CONFIG", format!("unknown domain {domain:?}")))?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for o in list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let o: Ontology = o
            .parse()
            .map_err(|_| CliError::config("BAD_CONFIG", format!("unknown ontology {o:?}")))?;
        if seen.insert(o) {
            out.push(o);
        }
    }
    Ok((d, out))
}

impl RunConfig {
    /// Merges flags over the config file (whose relative paths resolve
    /// against the file's directory) and checks that every input exists.
    pub fn resolve(args: &MapArgs) -> Result<Self, CliError> {
        let (file, base) = match &args.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                let cfg: FileConfig = toml::from_str(&text)
                    .map_err(|e| CliError::config("BAD_CONFIG", format!("{}: {e}", p.display())))?;
                (cfg, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let rel = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });
        let rel_all = |v: Vec<PathBuf>| v.into_iter().map(|p| base.join(p)).collect::<Vec<_>>();
        let pick = |flag: &Option<PathBuf>, file: Option<PathBuf>| flag.clone().or_else(|| rel(file));
        let pick_all = |flag: &Vec<PathBuf>, file: Vec<PathBuf>| if flag.is_empty() { rel_all(file) } else { flag.clone() };

        let mut ontologies: BTreeMap<Domain, Vec<Ontology>> =
            Domain::ALL.iter().map(|&d| (d, Ontology::defaults_for(d).to_vec())).collect();
        for (d, list) in &file.domain_ontologies {
            let refs: Vec<&str> = list.iter().map(String::as_str).collect();
            let (d, os) = parse_ontology_list(d, &refs)?;
            ontologies.insert(d, os);
        }
        for spec in &args.domain_ontologies {
            let (d, list) = spec
                .split_once('=')
                .ok_or_else(|| CliError::config("BAD_CONFIG", format!("expected DOMAIN=LIST, got {spec:?}")))?;
            let refs: Vec<&str> = list.split(',').collect();
            let (d, os) = parse_ontology_list(d, &refs)?;
            ontologies.insert(d, os);
        }

        let defaults = SimilarityConfig::default();
        let tau = args.tau.or(file.tau).unwrap_or(defaults.tau);
        let rho = args.rho.or(file.rho).unwrap_or(defaults.rho);
        let similarity =
            SimilarityConfig::new(tau, rho).map_err(|e| CliError::config("BAD_CONFIG", e.to_string()))?;
        let jobs = args
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::config("BAD_CONFIG", "--jobs must be at least 1"));
        }

        let cfg = RunConfig {
            concepts: pick(&args.concepts, file.concepts)
                .ok_or_else(|| CliError::config("MISSING_INPUT", "--concepts is required"))?,
            ancestors: pick(&args.ancestors, file.ancestors),
            ontology: pick_all(&args.ontology, file.ontology),
            class_ancestors: pick_all(&args.class_ancestors, file.class_ancestors),
            umls_mrconso: pick(&args.umls_mrconso, file.umls_mrconso),
            umls_mrsty: pick(&args.umls_mrsty, file.umls_mrsty),
            code_map: pick(&args.code_map, file.code_map),
            routing: pick(&args.routing, file.routing),
            curation: pick(&args.curation, file.curation),
            measurement_scales: pick(&args.measurement_scales, file.measurement_scales),
            measurement_targets: pick(&args.measurement_targets, file.measurement_targets),
            stopwords: pick(&args.stopwords, file.stopwords),
            ontologies,
            similarity,
            jobs,
            out: pick(&args.out, file.out).ok_or_else(|| CliError::config("MISSING_INPUT", "--out is required"))?,
        };
        if cfg.umls_mrsty.is_some() && cfg.umls_mrconso.is_none() {
            return Err(CliError::config("BAD_CONFIG", "--umls-mrsty needs --umls-mrconso"));
        }
        for p in cfg.inputs() {
            if !p.is_file() {
                return Err(CliError::config("MISSING_INPUT", format!("{} does not exist", p.display())));
            }
        }
        Ok(cfg)
    }

    fn inputs(&self) -> Vec<&Path> {
        let mut v = vec![self.concepts.as_path()];
        v.extend(self.ontology.iter().map(PathBuf::as_path));
        v.extend(self.class_ancestors.iter().map(PathBuf::as_path));
        for p in [
            &self.ancestors,
            &self.umls_mrconso,
            &self.umls_mrsty,
            &self.code_map,
            &self.routing,
            &self.curation,
            &self.measurement_scales,
            &self.measurement_targets,
            &self.stopwords,
        ]
        .into_iter()
        .flatten()
        {
            v.push(p);
        }
        v
    }
}

fn dictionary(path: Option<&Path>) -> Result<NormalizationDictionary, CliError> {
    match path {
        Some(p) => Ok(NormalizationDictionary::from_csv(File::open(p).map_err(io_err(p))?)?),
        None => Ok(NormalizationDictionary::builtin()),
    }
}

fn load_classes(
    dumps: &[PathBuf],
    ancestors: &[PathBuf],
    dict: &NormalizationDictionary,
) -> Result<OntologySet, CliError> {
    let mut classes = OntologySet::new();
    for p in dumps {
        let (set, report) = load_ontology_dump(p, None, dict)?;
        for w in report.warnings {
            log::warn!("{w}");
        }
        classes.extend(set).map_err(|c| CliError {
            code: "DUPLICATE_CURIE",
            exit: EXIT_DATA,
            message: format!("{c} appears in more than one dump"),
        })?;
    }
    for p in ancestors {
        let pairs = load_class_ancestors(p)?;
        let report = classes.attach_ancestors(pairs);
        if report.dangling_ancestors > 0 {
            log::warn!("{}: {} ancestor rows reference unknown classes", p.display(), report.dangling_ancestors);
        }
    }
    Ok(classes)
}

/// Loads every input named by the configuration.
pub fn load_inputs(cfg: &RunConfig) -> Result<MappingInputs, CliError> {
    let dict = dictionary(cfg.code_map.as_deref())?;
    let (mut concepts, report) = load_concepts(&cfg.concepts, cfg.ancestors.as_deref(), None, &dict)?;
    if report.dangling_ancestors > 0 {
        log::warn!("{} concept ancestor rows reference unknown concepts", report.dangling_ancestors);
    }
    let classes = load_classes(&cfg.ontology, &cfg.class_ancestors, &dict)?;
    if let Some(mrconso) = &cfg.umls_mrconso {
        let keep: BTreeSet<String> = concepts.iter().map(|c| c.code.prefix().to_string()).collect();
        let umls = load_umls(mrconso, cfg.umls_mrsty.as_deref(), &dict, Some(&keep))?;
        attach_umls(&mut concepts, &umls);
    }
    info!("loaded {} concepts, {} classes", concepts.len(), classes.len());
    let mut inputs = MappingInputs::new(concepts, classes);
    inputs.ontologies = cfg.ontologies.clone();
    inputs.similarity = cfg.similarity;
    if let Some(p) = &cfg.routing {
        inputs.routing = load_routing_policy(p)?;
    }
    if let Some(p) = &cfg.curation {
        inputs.curation = load_curation(p)?;
    }
    if let Some(p) = &cfg.measurement_scales {
        inputs.measurement_scales = load_measurement_scales(p)?;
    }
    if let Some(p) = &cfg.measurement_targets {
        inputs.measurement_targets = load_measurement_targets(p)?;
    }
    if let Some(p) = &cfg.stopwords {
        let text = fs::read_to_string(p).map_err(io_err(p))?;
        inputs.tokenizer = TokenizerConfig { stopwords: parse_stopwords(&text), ..TokenizerConfig::for_similarity() };
    }
    Ok(inputs)
}

fn create(dir: &Path, name: &str) -> Result<(BufWriter<File>, PathBuf), CliError> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(io_err(&path))?;
    Ok((BufWriter::new(f), path))
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let (mut w, path) = create(dir, name)?;
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn cmd_map(args: &MapArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = RunConfig::resolve(args)?;
    let inputs = load_inputs(&cfg)?;
    let run = run_mapping_with_jobs(&inputs, cfg.jobs)?;
    make_dir(&cfg.out)?;
    write_file(&cfg.out, "mappings.tsv", |w| write_mappings(w, &run.records, Some(&inputs.classes)))?;
    let summary = summarize(
        &run.records,
        &inputs.concepts,
        &inputs.ontologies,
        SummaryMetadata::new(&inputs.similarity, &inputs.tokenizer),
    );
    write_file(&cfg.out, "summary.json", |w| write_json(w, &summary))?;
    info!(
        "wrote {} records for {} concepts in {:.2?}",
        run.records.len(),
        inputs.concepts.len(),
        started.elapsed()
    );
    Ok(())
}

pub fn cmd_coverage(args: &CoverageArgs) -> Result<(), CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::config("BAD_CONFIG", "--alpha must be in (0, 1)"));
    }
    let records = load_mappings(&args.mappings)?;
    let mapped: BTreeSet<_> = records
        .iter()
        .filter(|r| r.is_mapped() && args.domain.is_none_or(|d| r.domain == d))
        .map(|r| r.concept_id)
        .collect();
    let mut freqs = Vec::new();
    for p in &args.prevalence {
        let (rows, report) = load_prevalence(p)?;
        if report.floored > 0 {
            info!("{}: {} counts raised to {PREVALENCE_FLOOR}", p.display(), report.floored);
        }
        freqs.extend(rows);
    }
    let report = partition_coverage(&mapped, &freqs)?;
    let table = report.site_table();
    let (omnibus, omnibus_note) = if table.len() < 2 {
        (None, Some("fewer than two sites".to_string()))
    } else {
        let rows: Vec<Vec<u64>> = table.iter().map(|(_, a, b)| vec![*a, *b]).collect();
        match chi_square_yates(&rows) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let posthoc = bonferroni_pairwise(&table, args.alpha);
    let buckets = if args.newer_cdm.is_some() || args.excluded.is_some() {
        let newer = args.newer_cdm.as_deref().map(load_concept_list).transpose()?.unwrap_or_default();
        let excluded = args.excluded.as_deref().map(load_concept_list).transpose()?.unwrap_or_default();
        Some(bucket_errors(&report.site_only_concepts, &newer, &excluded, &freqs))
    } else {
        None
    };
    make_dir(&args.out)?;
    let out = CoverageOutput {
        mapped_concepts: mapped.len(),
        prevalence_floor: PREVALENCE_FLOOR,
        report: &report,
        omnibus,
        omnibus_note,
        posthoc: PosthocSummary::from(&posthoc),
        buckets: buckets.as_ref(),
    };
    write_file(&args.out, "coverage.json", |w| write_json(w, &out))?;
    write_file(&args.out, "pairwise.tsv", |w| write_pairwise(w, &posthoc))?;
    if let Some(b) = &buckets {
        write_file(&args.out, "buckets.tsv", |w| write_buckets(w, b))?;
        write_file(&args.out, "bucket_members.tsv", |w| write_bucket_members(w, b))?;
    }
    Ok(())
}

pub fn cmd_phers(args: &PhersArgs) -> Result<(), CliError> {
    let weights = load_phenotype_weights(&args.weights)?;
    let patients = load_patient_phenotypes(&args.patients)?;
    let cohort = load_cohort(&args.cohort)?;
    let result = phers(&patients, &weights, Some(&cohort))?;
    let pick = |g: CohortGroup| -> Vec<f64> {
        result
            .scores
            .iter()
            .filter(|s| s.group == Some(g.as_str()))
            .map(|s| s.standardized)
            .collect()
    };
    let (cases, controls) = (pick(CohortGroup::Case), pick(CohortGroup::Control));
    let test = wilcoxon_rank_sum_one_sided(&cases, &controls)?;
    let groups = [
        (CohortGroup::Case.as_str(), cohort_stats(&cases)),
        (CohortGroup::Control.as_str(), cohort_stats(&controls)),
    ]
    .into();
    make_dir(&args.out)?;
    write_file(&args.out, "phers.tsv", |w| write_phers(w, &result))?;
    let out = PhersTestOutput::new(test, &result, groups);
    write_file(&args.out, "test.json", |w| write_json(w, &out))?;
    Ok(())
}

pub fn cmd_export_sssom(args: &SssomArgs) -> Result<(), CliError> {
    let records = load_mappings(&args.mappings)?;
    let dict = dictionary(args.code_map.as_deref())?;
    let concepts: Option<ConceptSet> = match &args.concepts {
        Some(p) => Some(load_concepts(p, None, None, &dict)?.0),
        None => None,
    };
    let classes = if args.ontology.is_empty() {
        None
    } else {
        Some(load_classes(&args.ontology, &[], &dict)?)
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        make_dir(dir)?;
    }
    let f = File::create(&args.out).map_err(io_err(&args.out))?;
    let mut w = BufWriter::new(f);
    let rows = write_sssom(&mut w, &records, concepts.as_ref(), classes.as_ref())
        .and_then(|n| w.flush().map(|_| n))
        .map_err(io_err(&args.out))?;
    info!("wrote {rows} SSSOM rows");
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Map(a) => cmd_map(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Phers(a) => cmd_phers(a),
        Command::ExportSssom(a) => cmd_export_sssom(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
/// Usage errors exit 1; `--help` and `--version` exit 0.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[USAGE]: {first}");
            return EXIT_CONFIG;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit
        }
    }
}
