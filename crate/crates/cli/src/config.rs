//! Run configuration: one TOML file, every bound explicit.

use std::fmt;
use std::path::Path;

use amalgam_core::instances::group::smallcanc::{check_c16, SCPresentation, TEMPLATE_RELATOR};
use amalgam_core::instances::group::word::Word;
use amalgam_core::report::Verdict;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    VecGf2,
    VecGf3,
    FreeFactor,
    Squarefree,
    Smallcanc,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::VecGf2,
        InstanceKind::VecGf3,
        InstanceKind::FreeFactor,
        InstanceKind::Squarefree,
        InstanceKind::Smallcanc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::VecGf2 => "vec-gf2",
            InstanceKind::VecGf3 => "vec-gf3",
            InstanceKind::FreeFactor => "free-factor",
            InstanceKind::Squarefree => "squarefree",
            InstanceKind::Smallcanc => "smallcanc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Suites in the order `list` prints them.
    pub fn suites(self) -> &'static [&'static str] {
        match self {
            InstanceKind::VecGf2 | InstanceKind::VecGf3 => &[
                "notion-axioms",
                "structural",
                "oplus-lemmas",
                "sequential",
                "independence",
                "types",
                "nonuniqueness",
                "catlab",
                "pregeometry",
            ],
            InstanceKind::FreeFactor => &[
                "notion-axioms",
                "structural",
                "oplus-lemmas",
                "sequential",
                "kurosh",
                "catlab",
            ],
            InstanceKind::Squarefree => &["notion-axioms", "structural", "catlab"],
            InstanceKind::Smallcanc => &["uniqueness", "many-extensions"],
        }
    }

    /// `(selector, notion name)`; the first entry is the default.
    pub fn notions(self) -> &'static [(&'static str, &'static str)] {
        match self {
            InstanceKind::VecGf2 | InstanceKind::VecGf3 => {
                &[("native", "direct-sum"), ("derived", "derived(direct-sum)")]
            }
            InstanceKind::FreeFactor => &[
                ("native", "free-amalgam"),
                ("derived", "derived(free-amalgam)"),
            ],
            InstanceKind::Squarefree => &[("native", "prime-union")],
            InstanceKind::Smallcanc => &[("native", "template-quotient")],
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Jsonl,
    Table,
}

/// Size bounds; which ones a suite needs depends on the instance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    /// Ambient dimension of the exhaustive pools.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Ambient dimension of the sampled span pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Ambient dimension or rank of sequential decompositions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seq_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<usize>,
    /// Largest copy count for `many-extensions`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extensions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub suite: String,
    /// Every property of the suite when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub instance: InstanceKind,
    #[serde(default = "native")]
    pub notion: String,
    pub seed: u64,
    pub suites: Vec<String>,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub allow_unknown: bool,
    #[serde(default)]
    pub format: Format,
    /// Template relator for `smallcanc`, written in the word syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relator: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
}

fn native() -> String {
    "native".into()
}

/// Field diagnostics, one per problem found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigInvalid {
    pub diagnostics: Vec<String>,
}

impl fmt::Display for ConfigInvalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConfigInvalid: {}", self.diagnostics.join("; "))
    }
}

impl std::error::Error for ConfigInvalid {}

fn invalid(msg: impl Into<String>) -> ConfigInvalid {
    ConfigInvalid {
        diagnostics: vec![msg.into()],
    }
}

/// Guards keeping every suite's pool enumerable.
const MAX_DIM: [(InstanceKind, usize); 2] = [(InstanceKind::VecGf2, 4), (InstanceKind::VecGf3, 3)];
const MAX_SAMPLE_DIM: usize = 6;
const MAX_SEQ_DIM: usize = 5;
const MAX_PIECES: usize = 4;
const MAX_RANK: usize = 4;
const MAX_THETA: usize = 3;
const MAX_PRIME: u32 = 97;

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigInvalid> {
        let cfg: SuiteConfig =
            toml::from_str(text).map_err(|e| invalid(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigInvalid> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("config: cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        let mut diag = Vec::new();
        let kind = self.instance;
        if self.suites.is_empty() {
            diag.push("suites: must list at least one suite".to_string());
        }
        for s in &self.suites {
            if !kind.suites().contains(&s.as_str()) {
                diag.push(format!(
                    "suites: `{s}` is not a suite of {kind} (expected one of {})",
                    kind.suites().join(", ")
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.suites {
            if !seen.insert(s) {
                diag.push(format!("suites: `{s}` listed twice"));
            }
        }
        if !kind.notions().iter().any(|(sel, _)| *sel == self.notion) {
            let sels: Vec<_> = kind.notions().iter().map(|(s, _)| *s).collect();
            diag.push(format!(
                "notion: `{}` is not available for {kind} (expected one of {})",
                self.notion,
                sels.join(", ")
            ));
        }
        for e in &self.expect {
            if !self.suites.contains(&e.suite) {
                diag.push(format!(
                    "expect.suite: `{}` is not among the configured suites",
                    e.suite
                ));
            }
        }
        if self.relator.is_some() && kind != InstanceKind::Smallcanc {
            diag.push("relator: only meaningful for smallcanc".to_string());
        }
        if let Some(r) = &self.relator {
            match r.parse::<Word>() {
                Ok(w) if w.support().iter().all(|&g| g < 2) && w.support().len() == 2 => {
                    if !check_c16(&SCPresentation::new([0, 1], &[w])) {
                        diag.push(format!("relator: `{r}` fails C'(1/6)"));
                    }
                }
                Ok(_) => diag.push(format!(
                    "relator: `{r}` must use exactly the letters a and b"
                )),
                Err(e) => diag.push(format!("relator: {e}")),
            }
        }
        for (field, needed) in self.required_bounds() {
            if !needed {
                diag.push(format!(
                    "bounds.{field}: required by suites {:?}",
                    self.suites
                ));
            }
        }
        self.check_guards(&mut diag);
        if diag.is_empty() {
            Ok(())
        } else {
            Err(ConfigInvalid { diagnostics: diag })
        }
    }

    fn wants(&self, suite: &str) -> bool {
        self.suites.iter().any(|s| s == suite)
    }

    /// `(field, present)` for every bound some configured suite reads.
    fn required_bounds(&self) -> Vec<(&'static str, bool)> {
        let b = &self.bounds;
        let mut out = Vec::new();
        let mut need = |field: &'static str, present: bool| {
            if !out.iter().any(|(f, _)| *f == field) {
                out.push((field, present));
            }
        };
        match self.instance {
            InstanceKind::VecGf2 | InstanceKind::VecGf3 => {
                let exhaustive = [
                    "notion-axioms",
                    "structural",
                    "oplus-lemmas",
                    "independence",
                    "types",
                    "nonuniqueness",
                    "catlab",
                    "pregeometry",
                ];
                if exhaustive.iter().any(|s| self.wants(s)) {
                    need("dim", b.dim.is_some());
                }
                if b.samples.is_some() != b.sample_dim.is_some() {
                    need("samples", b.samples.is_some());
                    need("sample_dim", b.sample_dim.is_some());
                }
                if self.wants("sequential") {
                    need("seq_dim", b.seq_dim.is_some());
                    need("pieces", b.pieces.is_some());
                }
                if self.wants("catlab") {
                    need("theta", b.theta.is_some());
                }
            }
            InstanceKind::FreeFactor => {
                if [
                    "notion-axioms",
                    "structural",
                    "oplus-lemmas",
                    "kurosh",
                    "catlab",
                ]
                .iter()
                .any(|s| self.wants(s))
                {
                    need("rank", b.rank.is_some());
                }
                if self.wants("kurosh") {
                    need("samples", b.samples.is_some());
                }
                if self.wants("sequential") {
                    need("seq_dim", b.seq_dim.is_some());
                    need("pieces", b.pieces.is_some());
                }
                if self.wants("catlab") {
                    need("theta", b.theta.is_some());
                }
            }
            InstanceKind::Squarefree => {
                need("primes", b.primes.as_ref().is_some_and(|p| !p.is_empty()));
                if self.wants("catlab") {
                    need("theta", b.theta.is_some());
                }
            }
            InstanceKind::Smallcanc => {
                if self.wants("many-extensions") {
                    need("extensions", b.extensions.is_some());
                }
            }
        }
        out
    }

    fn check_guards(&self, diag: &mut Vec<String>) {
        let b = &self.bounds;
        let mut range = |field: &str, v: Option<usize>, lo: usize, hi: usize| {
            if let Some(v) = v {
                if v < lo || v > hi {
                    diag.push(format!("bounds.{field}: {v} outside {lo}..={hi}"));
                }
            }
        };
        let max_dim = MAX_DIM
            .iter()
            .find(|(k, _)| *k == self.instance)
            .map_or(MAX_RANK, |(_, d)| *d);
        range("dim", b.dim, 1, max_dim);
        range("sample_dim", b.sample_dim, 1, MAX_SAMPLE_DIM);
        range("samples", b.samples, 1, 100_000);
        range("seq_dim", b.seq_dim, 1, MAX_SEQ_DIM);
        range("pieces", b.pieces, 1, MAX_PIECES);
        range("rank", b.rank, 1, MAX_RANK);
        range("theta", b.theta, 1, MAX_THETA);
        range("extensions", b.extensions, 1, 3);
        if let Some(ps) = &b.primes {
            for &p in ps {
                if !(2..=MAX_PRIME).contains(&p) || (2..p).any(|d| p.is_multiple_of(d)) {
                    diag.push(format!(
                        "bounds.primes: {p} is not a prime at most {MAX_PRIME}"
                    ));
                }
            }
            if ps.len() > 4 {
                diag.push(format!("bounds.primes: at most 4 primes, got {}", ps.len()));
            }
        }
        if self.instance == InstanceKind::FreeFactor && self.wants("sequential") {
            if let Some(d) = b.seq_dim {
                if d > MAX_RANK {
                    diag.push(format!("bounds.seq_dim: rank {d} exceeds {MAX_RANK}"));
                }
            }
        }
    }

    /// Template relator for the small-cancellation suites.
    pub fn template(&self) -> Word {
        self.relator
            .as_deref()
            .unwrap_or(TEMPLATE_RELATOR)
            .parse()
            .expect("validated relator")
    }

    /// Expected verdict for a property, if declared.
    pub fn expected(&self, suite: &str, property: &str) -> Option<Verdict> {
        self.expect
            .iter()
            .find(|e| e.suite == suite && e.property.as_deref().is_none_or(|p| p == property))
            .map(|e| e.verdict)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_list_is_rejected() {
        let err = SuiteConfig::from_toml(
            "instance = \"vec-gf2\"\nseed = 1\nsuites = []\n[bounds]\ndim = 3\n",
        )
        .unwrap_err();
        assert!(
            err.diagnostics.iter().any(|d| d.starts_with("suites:")),
            "{err}"
        );
    }

    #[test]
    fn missing_bounds_are_named() {
        let err = SuiteConfig::from_toml(
            "instance = \"vec-gf2\"\nseed = 1\nsuites = [\"notion-axioms\"]\n",
        )
        .unwrap_err();
        assert_eq!(
            err.diagnostics,
            ["bounds.dim: required by suites [\"notion-axioms\"]"]
        );
    }

    #[test]
    fn guards_and_unknown_fields() {
        let err = SuiteConfig::from_toml(
            "instance = \"vec-gf2\"\nseed = 1\nsuites = [\"types\"]\n[bounds]\ndim = 9\n",
        )
        .unwrap_err();
        assert_eq!(err.diagnostics, ["bounds.dim: 9 outside 1..=4"]);
        assert!(SuiteConfig::from_toml(
            "instance = \"vec-gf2\"\nseed = 1\nsuites = [\"types\"]\nwidth = 2\n"
        )
        .is_err());
        assert!(
            SuiteConfig::from_toml("instance = \"vec-gf7\"\nseed = 1\nsuites = [\"types\"]\n")
                .is_err()
        );
    }

    #[test]
    fn relator_must_be_small_cancellation() {
        let base = "instance = \"smallcanc\"\nseed = 1\nsuites = [\"uniqueness\"]\n";
        assert!(
            SuiteConfig::from_toml(&format!("{base}relator = \"abABABBAAAABaBBBABa\"\n")).is_ok()
        );
        let err = SuiteConfig::from_toml(&format!("{base}relator = \"abAB\"\n")).unwrap_err();
        assert!(err.diagnostics[0].contains("C'(1/6)"), "{err}");
    }

    #[test]
    fn expectations_match_by_suite_and_property() {
        let cfg = SuiteConfig::from_toml(
            "instance = \"smallcanc\"\nseed = 1\nsuites = [\"uniqueness\"]\n[[expect]]\nsuite = \"uniqueness\"\nverdict = \"fails\"\n",
        )
        .unwrap();
        assert_eq!(cfg.expected("uniqueness", "anything"), Some(Verdict::Fails));
        assert_eq!(cfg.expected("many-extensions", "anything"), None);
    }
}
