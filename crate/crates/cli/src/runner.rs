//! Suite execution and report assembly.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use amalgam_core::report::{PropertyReport, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Format, SuiteConfig};
use crate::suites::run_suite;

pub const TOOL: &str = "amalgam";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Worker thread count for suites; the report order does not depend on it.
pub const THREADS_ENV: &str = "AMALGAM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Expected,
    Unexpected,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub suite: String,
    #[serde(flatten)]
    pub report: PropertyReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<Verdict>,
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub holds: usize,
    pub fails: usize,
    pub unknown: usize,
    pub not_checkable: usize,
    pub expected: usize,
    pub unexpected: usize,
    pub inconclusive: usize,
    pub exit: u8,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckLine>,
    pub summary: Summary,
    /// Kept out of the serialized lines so reruns compare byte for byte.
    pub wall_time: Duration,
}

fn classify(cfg: &SuiteConfig, suite: &str, r: &PropertyReport) -> (Option<Verdict>, Status) {
    let expected = cfg.expected(suite, &r.property);
    let status = match (r.verdict, expected) {
        (v, Some(e)) if v == e && v != Verdict::Holds => Status::Expected,
        (Verdict::Holds, _) => Status::Ok,
        (Verdict::Fails, _) => Status::Unexpected,
        (Verdict::Unknown | Verdict::NotCheckable, _) if cfg.allow_unknown => Status::Ok,
        (Verdict::Unknown | Verdict::NotCheckable, _) => Status::Inconclusive,
    };
    (expected, status)
}

fn error_report(e: amalgam_core::Error) -> PropertyReport {
    PropertyReport::fails(
        "suite-error",
        0,
        json!({ "kind": "error", "message": e.to_string() }),
    )
}

fn thread_count(jobs: usize) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(1)
        .clamp(1, jobs.max(1))
}

/// Runs every configured suite; results are placed by declared suite order.
pub fn run(cfg: &SuiteConfig) -> RunReport {
    let start = Instant::now();
    let jobs = cfg.suites.len();
    let results: Mutex<Vec<Option<Vec<PropertyReport>>>> = Mutex::new(vec![None; jobs]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..thread_count(jobs) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs {
                    break;
                }
                let reports =
                    run_suite(cfg, &cfg.suites[i]).unwrap_or_else(|e| vec![error_report(e)]);
                results.lock().expect("no poisoned worker")[i] = Some(reports);
            });
        }
    });
    let mut checks = Vec::new();
    for (suite, reports) in cfg
        .suites
        .iter()
        .zip(results.into_inner().expect("no poisoned worker"))
    {
        for report in reports.expect("every suite ran") {
            let (expected, status) = classify(cfg, suite, &report);
            checks.push(CheckLine {
                suite: suite.clone(),
                report,
                expected,
                status,
            });
        }
    }
    let summary = summarize(&checks);
    RunReport {
        config: cfg.clone(),
        checks,
        summary,
        wall_time: start.elapsed(),
    }
}

fn summarize(checks: &[CheckLine]) -> Summary {
    let mut s = Summary {
        checks: checks.len(),
        ..Summary::default()
    };
    for c in checks {
        match c.report.verdict {
            Verdict::Holds => s.holds += 1,
            Verdict::Fails => s.fails += 1,
            Verdict::Unknown => s.unknown += 1,
            Verdict::NotCheckable => s.not_checkable += 1,
        }
        match c.status {
            Status::Ok => {}
            Status::Expected => s.expected += 1,
            Status::Unexpected => s.unexpected += 1,
            Status::Inconclusive => s.inconclusive += 1,
        }
    }
    s.exit = if s.unexpected > 0 {
        1
    } else if s.inconclusive > 0 {
        3
    } else {
        0
    };
    s
}

impl RunReport {
    /// Header, one line per check, summary.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        let header = json!({
            "record": "header",
            "tool": TOOL,
            "version": VERSION,
            "seed": self.config.seed,
            "config": self.config,
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for c in &self.checks {
            let mut line = serde_json::to_value(c).expect("serializable check");
            line.as_object_mut()
                .expect("object")
                .insert("record".into(), "check".into());
            out.push_str(&line.to_string());
            out.push('\n');
        }
        let mut summary = serde_json::to_value(&self.summary).expect("serializable summary");
        summary
            .as_object_mut()
            .expect("object")
            .insert("record".into(), "summary".into());
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{TOOL} {VERSION}  instance={}  seed={}\n",
            self.config.instance, self.config.seed
        );
        let w1 = self
            .checks
            .iter()
            .map(|c| c.suite.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let w2 = self
            .checks
            .iter()
            .map(|c| c.report.property.len())
            .max()
            .unwrap_or(8)
            .max(8);
        out.push_str(&format!(
            "{:w1$}  {:w2$}  {:13}  {:>8}  status\n",
            "suite", "property", "verdict", "cases"
        ));
        for c in &self.checks {
            let verdict = serde_json::to_value(c.report.verdict).expect("verdict");
            let status = serde_json::to_value(c.status).expect("status");
            out.push_str(&format!(
                "{:w1$}  {:w2$}  {:13}  {:>8}  {}\n",
                c.suite,
                c.report.property,
                verdict.as_str().unwrap_or_default(),
                c.report.cases,
                status.as_str().unwrap_or_default()
            ));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} checks: {} holds, {} fails ({} expected), {} inconclusive; exit {}\n",
            s.checks, s.holds, s.fails, s.expected, s.inconclusive, s.exit
        ));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Jsonl => self.jsonl(),
            Format::Table => self.table(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> SuiteConfig {
        SuiteConfig::from_toml(text).unwrap()
    }

    #[test]
    fn expected_failures_exit_zero() {
        let c = cfg("instance = \"smallcanc\"\nseed = 1\nsuites = [\"uniqueness\"]\n[[expect]]\nsuite = \"uniqueness\"\nverdict = \"fails\"\n");
        let r = run(&c);
        assert_eq!(r.summary.exit, 0, "{}", r.jsonl());
        assert_eq!(r.checks[0].status, Status::Expected);
        assert!(r.checks[0].report.counterexample.is_some());
    }

    #[test]
    fn undeclared_failures_exit_one() {
        let c = cfg("instance = \"smallcanc\"\nseed = 1\nsuites = [\"uniqueness\"]\n");
        assert_eq!(run(&c).summary.exit, 1);
    }

    #[test]
    fn inconclusive_verdicts_exit_three_unless_allowed() {
        let mut c = cfg("instance = \"smallcanc\"\nseed = 1\nsuites = [\"uniqueness\"]\n");
        let checks = vec![CheckLine {
            suite: "s".into(),
            report: PropertyReport::not_checkable("p", "n"),
            expected: None,
            status: classify(&c, "s", &PropertyReport::not_checkable("p", "n")).1,
        }];
        assert_eq!(summarize(&checks).exit, 3);
        c.allow_unknown = true;
        assert_eq!(
            classify(&c, "s", &PropertyReport::not_checkable("p", "n")).1,
            Status::Ok
        );
    }

    #[test]
    fn report_lines_are_stable() {
        let c = cfg("instance = \"vec-gf2\"\nseed = 4\nsuites = [\"types\", \"oplus-lemmas\"]\n[bounds]\ndim = 2\n");
        let a = run(&c).jsonl();
        assert_eq!(a, run(&c).jsonl());
        let lines: Vec<&str> = a.lines().collect();
        assert!(lines[0].contains("\"record\":\"header\"") && lines[0].contains("\"seed\":4"));
        assert!(lines.last().unwrap().contains("\"record\":\"summary\""));
    }
}
