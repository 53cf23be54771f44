//! String and code normalization shared by exact alignment and similarity
//! scoring.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use crate::model::CodeRef;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const DEFAULT_CODE_MAP: &str = include_str!("../data/source_code_vocab_map.csv");

/// Prefix used for codes that carry no recognizable prefix.
pub const UNKNOWN_PREFIX: &str = "UNKNOWN";

#[derive(Debug, thiserror::Error)]
pub enum LexicalError {
    #[error("empty code in {0:?}")]
    EmptyCode(String),
    #[error("invalid prefix in {0:?}")]
    BadPrefix(String),
    #[error("code map line {line}: {message}")]
    BadDictionary { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Maps raw vocabulary prefixes (`sctid`, `SNOMEDCT_US`, ...) onto one
/// canonical spelling. Lookup is case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct NormalizationDictionary {
    rows: HashMap<String, String>,
}

impl NormalizationDictionary {
    /// Builds a dictionary, rejecting rows whose canonical value would itself
    /// be rewritten to something else.
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self, LexicalError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut rows = HashMap::new();
        for (i, (raw, canonical)) in pairs.into_iter().enumerate() {
            let raw = raw.as_ref().trim().to_uppercase();
            let canonical = canonical.as_ref().trim().to_uppercase();
            if raw.is_empty() || !valid_prefix(&canonical) {
                return Err(LexicalError::BadDictionary {
                    line: i as u64 + 2,
                    message: format!("invalid row {raw:?} -> {canonical:?}"),
                });
            }
            rows.insert(raw, canonical);
        }
        for canonical in rows.values() {
            if let Some(again) = rows.get(canonical) {
                if again != canonical {
                    return Err(LexicalError::BadDictionary {
                        line: 0,
                        message: format!(
                            "canonical prefix {canonical:?} is not a fixed point (maps to {again:?})"
                        ),
                    });
                }
            }
        }
        Ok(Self { rows })
    }

    /// Reads the two-column `raw_prefix,canonical_prefix` CSV (header row required).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, LexicalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pairs = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| LexicalError::BadDictionary {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            if row.len() != 2 {
                return Err(LexicalError::BadDictionary {
                    line,
                    message: format!("expected 2 columns, found {}", row.len()),
                });
            }
            pairs.push((row[0].to_string(), row[1].to_string()));
        }
        Self::from_pairs(pairs)
    }

    /// The dictionary shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_csv(DEFAULT_CODE_MAP.as_bytes()).expect("bundled code map is valid")
    }

    /// Canonical spelling of a bare prefix; unknown prefixes are uppercased.
    pub fn canonical_prefix(&self, raw: &str) -> String {
        let key = raw.trim().to_uppercase();
        self.rows.get(&key).cloned().unwrap_or(key)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn valid_prefix(p: &str) -> bool {
    !p.is_empty() && !p.chars().any(|c| c == ':' || c == '|' || c.is_whitespace())
}

/// Splits `raw` into prefix and code and rewrites the prefix through `dict`.
///
/// The split point is the first `:`; failing that the first `_`, then the
/// first `#`. A string with none of these is a bare code under
/// [`UNKNOWN_PREFIX`]. The code keeps its case and inner punctuation.
pub fn canonicalize_code(raw: &str, dict: &NormalizationDictionary) -> Result<CodeRef, LexicalError> {
    let raw_trimmed = raw.trim();
    let split = [':', '_', '#']
        .iter()
        .find_map(|sep| raw_trimmed.split_once(*sep));
    let (prefix, code) = match split {
        Some((p, c)) => (dict.canonical_prefix(p), c.trim()),
        None => (UNKNOWN_PREFIX.to_string(), raw_trimmed),
    };
    if code.is_empty() {
        return Err(LexicalError::EmptyCode(raw.to_string()));
    }
    CodeRef::new(prefix, code).map_err(|_| LexicalError::BadPrefix(raw.to_string()))
}

/// Code under an explicit vocabulary name (e.g. a concept table's
/// `vocabulary` column, or a UMLS source abbreviation).
pub fn vocabulary_code(
    vocabulary: &str,
    code: &str,
    dict: &NormalizationDictionary,
) -> Result<CodeRef, LexicalError> {
    let code = code.trim();
    if code.is_empty() {
        return Err(LexicalError::EmptyCode(format!("{vocabulary}:{code}")));
    }
    CodeRef::new(dict.canonical_prefix(vocabulary), code)
        .map_err(|_| LexicalError::BadPrefix(vocabulary.to_string()))
}

/// Lowercases and collapses whitespace runs to single spaces.
pub fn normalize_string(s: &str) -> String {
    let lowered = s.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Lemmatize {
    #[default]
    Off,
    SuffixRules,
}

#[derive(Debug, Clone)]
pub struct TokenizerConfig {
    pub stopwords: HashSet<String>,
    pub lemmatize: Lemmatize,
    pub min_token_len: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            stopwords: default_stopwords(),
            lemmatize: Lemmatize::Off,
            min_token_len: 1,
        }
    }
}

impl TokenizerConfig {
    /// No stopwords, no lemmatization.
    pub fn plain() -> Self {
        Self {
            stopwords: HashSet::new(),
            lemmatize: Lemmatize::Off,
            min_token_len: 1,
        }
    }

    /// Configuration used for similarity scoring: bundled stopwords plus suffix rules.
    pub fn for_similarity() -> Self {
        Self {
            lemmatize: Lemmatize::SuffixRules,
            ..Self::default()
        }
    }

    pub fn with_stopwords<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, words: I) -> Self {
        self.stopwords = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        self
    }
}

/// The bundled English stopword list.
pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// One token per line; blank lines and `#` comments ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Splits on non-alphanumeric boundaries, then removes stopwords and short
/// tokens, optionally applying suffix lemmatization.
pub fn tokenize(s: &str, cfg: &TokenizerConfig) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !cfg.stopwords.contains(t))
        .map(|t| match cfg.lemmatize {
            Lemmatize::Off => t,
            Lemmatize::SuffixRules => lemmatize_suffix(&t),
        })
        .filter(|t| t.chars().count() >= cfg.min_token_len.max(1))
        .filter(|t| !cfg.stopwords.contains(t))
        .filter(|t| !t.chars().any(char::is_uppercase))
        .collect()
}

const MIN_STEM: usize = 3;

/// Deterministic suffix stripping. The first matching rule wins:
///
/// 1. `-ies` becomes `-y` (`allergies` to `allergy`)
/// 2. `-es` after `s`, `x`, `z`, `ch` or `sh` is removed (`boxes` to `box`)
/// 3. `-s` is removed unless preceded by `s`, `u` or `i` (`fractures` to `fracture`)
/// 4. `-ing` is removed (`bleeding` to `bleed`)
/// 5. `-ed` is removed (`infected` to `infect`)
///
/// A rule only fires when at least three characters of stem remain.
pub fn lemmatize_suffix(token: &str) -> String {
    let chars: Vec<char> = token.chars().collect();
    let n = chars.len();
    let ends = |suffix: &str| token.ends_with(suffix);
    let stem = |k: usize| chars[..n - k].iter().collect::<String>();

    if ends("ies") && n - 3 >= MIN_STEM {
        return stem(3) + "y";
    }
    if ends("es") && n - 2 >= MIN_STEM {
        let base = &chars[..n - 2];
        let sibilant = matches!(base.last(), Some('s' | 'x' | 'z'))
            || base.ends_with(&['c', 'h'])
            || base.ends_with(&['s', 'h']);
        if sibilant {
            return stem(2);
        }
    }
    if ends("s") && n > MIN_STEM && !matches!(chars[n - 2], 's' | 'u' | 'i') {
        return stem(1);
    }
    if ends("ing") && n - 3 >= MIN_STEM {
        return stem(3);
    }
    if ends("ed") && n - 2 >= MIN_STEM {
        return stem(2);
    }
    token.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dict() -> NormalizationDictionary {
        NormalizationDictionary::builtin()
    }

    #[test]
    fn canonicalizes_prefix_variants() {
        let d = dict();
        let a = canonicalize_code("sctid:1234567", &d).unwrap();
        let b = canonicalize_code("SNOMED-CT:1234567", &d).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.prefix(), "SNOMED");
        assert_eq!(a.code(), "1234567");
        let u = canonicalize_code("UMLS:C0596028", &d).unwrap();
        assert_eq!(u.to_string(), "UMLS:C0596028");
        assert_eq!(canonicalize_code(&u.to_string(), &d).unwrap(), u);
    }

    #[test]
    fn colon_wins_over_underscore() {
        let c = canonicalize_code("SNOMEDCT_US:70305005", &dict()).unwrap();
        assert_eq!(c.to_string(), "SNOMED:70305005");
        let c = canonicalize_code("sctid_70305005", &dict()).unwrap();
        assert_eq!(c.to_string(), "SNOMED:70305005");
    }

    #[test]
    fn loinc_punctuation_preserved_and_bare_codes() {
        let c = canonicalize_code("LNC:12460-2", &dict()).unwrap();
        assert_eq!(c.to_string(), "LOINC:12460-2");
        let bare = canonicalize_code("12460-2", &dict()).unwrap();
        assert_eq!(bare.prefix(), UNKNOWN_PREFIX);
        assert!(matches!(
            canonicalize_code("SNOMED:  ", &dict()),
            Err(LexicalError::EmptyCode(_))
        ));
    }

    #[test]
    fn dictionary_must_be_fixed_point() {
        assert!(NormalizationDictionary::from_pairs([("a", "B"), ("b", "C")]).is_err());
        assert!(NormalizationDictionary::from_pairs([("a", "B"), ("b", "B")]).is_ok());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_string("Horizontal  Overbite "), "horizontal overbite");
        assert_eq!(normalize_string("Overjet"), "overjet");
        assert_eq!(normalize_string(""), "");
    }

    #[test]
    fn tokenize_examples() {
        let none = TokenizerConfig::plain();
        assert_eq!(tokenize("sore throat symptom", &none), ["sore", "throat", "symptom"]);
        let some = TokenizerConfig::plain().with_stopwords(["in", "the"]);
        assert_eq!(tokenize("pain in the throat", &some), ["pain", "throat"]);
        let lemma = TokenizerConfig {
            lemmatize: Lemmatize::SuffixRules,
            ..TokenizerConfig::plain()
        };
        assert_eq!(tokenize("fractures", &lemma), ["fracture"]);
    }

    #[test]
    fn suffix_rules() {
        for (input, want) in [
            ("allergies", "allergy"),
            ("boxes", "box"),
            ("classes", "class"),
            ("fractures", "fracture"),
            ("bleeding", "bleed"),
            ("infected", "infect"),
            ("virus", "virus"),
            ("class", "class"),
            ("ties", "tie"),
            ("dies", "die"),
            ("red", "red"),
            ("sing", "sing"),
        ] {
            assert_eq!(lemmatize_suffix(input), want, "{input}");
        }
    }

    #[test]
    fn min_token_len() {
        let cfg = TokenizerConfig {
            min_token_len: 3,
            ..TokenizerConfig::plain()
        };
        assert_eq!(tokenize("a bb ccc", &cfg), ["ccc"]);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_string(&s);
            prop_assert_eq!(normalize_string(&once), once);
        }

        #[test]
        fn canonicalize_is_idempotent(p in "[A-Za-z][A-Za-z_-]{0,8}", c in "[A-Za-z0-9.-]{1,10}") {
            let d = dict();
            let raw = format!("{p}:{c}");
            let once = canonicalize_code(&raw, &d).unwrap();
            let twice = canonicalize_code(&once.to_string(), &d).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_clean(s in "\\PC{0,60}", lemma in any::<bool>()) {
            let cfg = TokenizerConfig {
                lemmatize: if lemma { Lemmatize::SuffixRules } else { Lemmatize::Off },
                ..TokenizerConfig::default()
            };
            for t in tokenize(&normalize_string(&s), &cfg) {
                prop_assert!(!t.is_empty());
                prop_assert!(!cfg.stopwords.contains(&t));
                prop_assert!(!t.chars().any(char::is_uppercase));
            }
        }
    }
}
