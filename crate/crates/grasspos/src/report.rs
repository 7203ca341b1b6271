//! Deterministic JSON and CSV renderings of pipeline results.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use grasspos_core::tp_flow::FlowTrace;
use grasspos_core::verify::{ClosureReport, SuiteReport, TheoremCertificate};
use grasspos_core::Classification;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Pretty JSON with a trailing newline. Key order follows field order, so
/// equal values always render to equal bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

/// The JSON summary of a flow: convergence step, measured rate and the
/// theoretical gap ratio.
#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub converged_at: Option<usize>,
    pub rate_estimate: Option<f64>,
    pub gap_ratio: f64,
}

impl From<&FlowTrace> for FlowSummary {
    fn from(t: &FlowTrace) -> Self {
        Self { converged_at: t.converged_at, rate_estimate: t.rate_estimate, gap_ratio: t.gap_ratio }
    }
}

fn real(x: f64) -> String {
    format!("{x:e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_table<const W: usize>(header: [&str; W], rows: impl IntoIterator<Item = [String; W]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory writer");
    for row in rows {
        w.write_record(&row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("records are UTF-8")
}

pub fn trace_csv(trace: &FlowTrace) -> String {
    csv_table(
        ["n", "distance", "min_margin", "sign_ok"],
        trace.steps.iter().map(|s| [s.n.to_string(), real(s.distance), real(s.min_margin), s.sign_ok.to_string()]),
    )
}

pub fn classification_csv(c: &Classification) -> String {
    csv_table(
        ["positive", "nonnegative", "all_nonzero", "generic", "failed_condition", "witness", "margin"],
        [[
            c.positive.to_string(),
            c.nonnegative.to_string(),
            c.all_nonzero.to_string(),
            c.generic.to_string(),
            opt(c.failed_condition),
            opt(c.witness.as_ref()),
            opt(c.margin.map(real)),
        ]],
    )
}

/// Path grid of a certificate, one row per `r`.
pub fn certificate_csv(cert: &TheoremCertificate) -> String {
    csv_table(
        ["r", "all_nonzero", "min_margin"],
        cert.path_check.iter().map(|p| [p.r.to_string(), p.all_nonzero.to_string(), real(p.min_margin)]),
    )
}

pub fn closure_csv(report: &ClosureReport) -> String {
    csv_table(
        ["r", "positive", "margin", "distance", "decreasing"],
        report.items.iter().map(|i| {
            [i.r.to_string(), i.positive.to_string(), real(i.margin), real(i.distance), i.decreasing.to_string()]
        }),
    )
}

pub fn suite_csv(report: &SuiteReport) -> String {
    csv_table(
        ["index", "kind", "seed", "positive", "nonnegative", "all_nonzero", "generic", "failures"],
        report.samples.iter().map(|s| {
            let kind = serde_json::to_value(s.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            let flag = |f: fn(&grasspos_core::verify::SampleFacts) -> bool| opt(s.facts.as_ref().map(f));
            [
                s.index.to_string(),
                kind,
                s.seed.to_string(),
                flag(|f| f.positive),
                flag(|f| f.nonnegative),
                flag(|f| f.all_nonzero),
                flag(|f| f.generic),
                s.failures.len().to_string(),
            ]
        }),
    )
}

/// Where a report goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// An explicit path wins; otherwise `<dir>/<stem>.<ext>` under `default_dir`
    /// when given; otherwise standard output.
    pub fn resolve(explicit: Option<&Path>, default_dir: Option<&Path>, stem: &str, format: Format) -> Self {
        match (explicit, default_dir) {
            (Some(p), _) => Destination::File(p.to_path_buf()),
            (None, Some(dir)) => Destination::File(dir.join(format!("{stem}.{}", format.extension()))),
            (None, None) => Destination::Stdout,
        }
    }
}

pub fn emit(content: &str, destination: &Destination) -> io::Result<()> {
    match destination {
        Destination::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()
        }
        Destination::File(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, content)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use grasspos_core::tp_flow::FlowStep;

    fn trace() -> FlowTrace {
        FlowTrace {
            steps: vec![
                FlowStep { n: 0, distance: 0.5, min_margin: 0.25, sign_ok: true },
                FlowStep { n: 1, distance: 1e-10, min_margin: 0.5, sign_ok: true },
            ],
            converged_at: Some(1),
            rate_estimate: Some(2e-10),
            gap_ratio: 0.243,
        }
    }

    #[test]
    fn trace_csv_layout() {
        assert_eq!(trace_csv(&trace()), "n,distance,min_margin,sign_ok\n0,5e-1,2.5e-1,true\n1,1e-10,5e-1,true\n");
    }

    #[test]
    fn labels_with_commas_are_quoted() {
        let c = Classification {
            positive: false,
            nonnegative: false,
            all_nonzero: false,
            generic: false,
            failed_condition: None,
            witness: Some(grasspos_core::Witness::Coordinate(grasspos_core::IndexSet::new(vec![1, 10], 10).unwrap())),
            margin: None,
        };
        assert!(classification_csv(&c).ends_with("false,false,false,false,,\"p_1,10\",\n"));
    }

    #[test]
    fn summary_json_is_stable() {
        let a = to_json(&FlowSummary::from(&trace()));
        assert_eq!(a, to_json(&FlowSummary::from(&trace())));
        assert_eq!(a, "{\n  \"converged_at\": 1,\n  \"rate_estimate\": 2e-10,\n  \"gap_ratio\": 0.243\n}\n");
    }

    #[test]
    fn destination_resolution() {
        let dir = Path::new("/tmp/out");
        assert_eq!(
            Destination::resolve(None, Some(dir), "suite", Format::Csv),
            Destination::File(dir.join("suite.csv"))
        );
        let explicit = Path::new("x.json");
        assert_eq!(
            Destination::resolve(Some(explicit), Some(dir), "suite", Format::Json),
            Destination::File(explicit.to_path_buf())
        );
        assert_eq!(Destination::resolve(None, None, "suite", Format::Json), Destination::Stdout);
    }

    #[test]
    fn unwritable_destination_errors() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        assert!(emit("{}", &Destination::File(blocker.join("nested.json"))).is_err());
    }
}
