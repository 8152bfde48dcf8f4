//! The `wrpg` command-line tool.
//!
//! Exit codes: 0 success or valid graph, 2 false-incorrect graph, 3 invalid
//! input or arguments, 4 theorem-verification mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::integrity::{
    apply_edge_edits, classify_graph, parse_edits, AttackVerdict, CheckStatus, Verdict,
};
use crate::resilience::{
    analyze, survey, verify_theorem, ResilienceReport, SurveyRow, VerificationReport,
    DEFAULT_ENUMERATION_CAP,
};
use crate::rpg::{from_json, graph_distance, to_dot, to_json, ReduciblePermutationGraph};
use crate::sip::encode_w_to_sip;
use crate::{encode_sip_to_rpg, ResilienceError, Watermark};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE_INCORRECT: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "wrpg",
    version,
    about = "Encode, attack and analyze permutation-graph watermarks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a watermark into a graph file.
    Encode {
        w: String,
        /// Output graph file; `-` writes to stdout. Defaults to `<w>.rpg.json`.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write a Graphviz rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Print the self-inverting permutation in one-line notation.
        #[arg(long)]
        show_sip: bool,
    },
    /// Decode a graph file and report whether it is a valid watermark.
    Decode { file: PathBuf },
    /// Show every structural check for a graph file.
    Classify {
        file: PathBuf,
        /// Watermark the graph originally encoded, to label true-incorrect results.
        #[arg(long)]
        original: Option<String>,
    },
    /// Retarget back edges of a graph file.
    Attack {
        file: PathBuf,
        /// Comma-separated `source:new_target` pairs, e.g. `3:5,7:9`.
        #[arg(long, allow_hyphen_values = true)]
        edits: String,
        /// Output graph file. Defaults to `<input stem>.attacked.json`.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Resilience report for one watermark.
    Analyze {
        w: String,
        /// Largest bit-length the brute-force oracle may enumerate.
        #[arg(long)]
        cap_override: Option<u32>,
    },
    /// Resilience table for every watermark of one bit-length.
    Survey {
        #[arg(long)]
        bits: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        cap_override: Option<u32>,
    },
    /// Check the closed form against the oracle over a range of bit-lengths.
    VerifyTheorem {
        #[arg(long)]
        bits_min: u32,
        #[arg(long)]
        bits_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        cap_override: Option<u32>,
    },
}

/// Result of one invocation; `main` prints the streams and exits with the code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn invalid(message: impl std::fmt::Display) -> Self {
        Self {
            exit_code: EXIT_INVALID_INPUT,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome {
                    exit_code: code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                CommandOutcome::ok(rendered)
            };
        }
    };
    match cli.command {
        Command::Encode {
            w,
            out,
            dot,
            show_sip,
        } => cmd_encode(&w, out, dot, show_sip),
        Command::Decode { file } => cmd_decode(&file),
        Command::Classify { file, original } => cmd_classify(&file, original.as_deref()),
        Command::Attack { file, edits, out } => cmd_attack(&file, &edits, out),
        Command::Analyze { w, cap_override } => cmd_analyze(&w, cap_override),
        Command::Survey {
            bits,
            format,
            cap_override,
        } => cmd_survey(bits, format, cap_override),
        Command::VerifyTheorem {
            bits_min,
            bits_max,
            format,
            cap_override,
        } => cmd_verify(bits_min, bits_max, format, cap_override),
    }
}

fn parse_watermark(s: &str) -> Result<Watermark, CommandOutcome> {
    s.parse::<Watermark>()
        .map_err(|e| CommandOutcome::invalid(format!("watermark {s:?}: {e}")))
}

fn read_graph(path: &Path) -> Result<ReduciblePermutationGraph, CommandOutcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandOutcome::invalid(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| CommandOutcome::invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CommandOutcome> {
    fs::write(path, contents)
        .map_err(|e| CommandOutcome::invalid(format!("{}: {e}", path.display())))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(outcome) => return outcome,
        }
    };
}

pub fn cmd_encode(
    w: &str,
    out: Option<PathBuf>,
    dot: Option<PathBuf>,
    show_sip: bool,
) -> CommandOutcome {
    let w = attempt!(parse_watermark(w));
    let sip = encode_w_to_sip(&w).0;
    let graph = encode_sip_to_rpg(&sip);
    let json = to_json(&graph).expect("encoded graphs have odd size");

    let mut stdout = String::new();
    if show_sip {
        let _ = writeln!(stdout, "{sip}");
    }
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{w}.rpg.json")));
    if out.as_os_str() == "-" {
        stdout.push_str(&json);
    } else {
        attempt!(write_file(&out, &json));
    }
    if let Some(dot) = dot {
        attempt!(write_file(&dot, &to_dot(&graph)));
    }
    CommandOutcome::ok(stdout)
}

fn failure_lines(out: &mut String, checks: &[(crate::CheckName, CheckStatus)]) {
    for (name, status) in checks {
        match status {
            CheckStatus::Pass => {}
            CheckStatus::Fail(detail) => {
                let _ = writeln!(out, "failed {name}: {detail}");
            }
            CheckStatus::Skipped => {
                let _ = writeln!(out, "skipped {name}");
            }
        }
    }
}

pub fn cmd_decode(file: &Path) -> CommandOutcome {
    let graph = attempt!(read_graph(file));
    let report = classify_graph(&graph);
    match report.verdict {
        Verdict::Valid(w) => CommandOutcome::ok(format!("VALID w={w}\n")),
        Verdict::FalseIncorrect(_) => {
            let mut stdout = String::from("FALSE-INCORRECT\n");
            failure_lines(&mut stdout, &report.checks);
            CommandOutcome {
                exit_code: EXIT_FALSE_INCORRECT,
                stdout,
                stderr: String::new(),
            }
        }
    }
}

pub fn cmd_classify(file: &Path, original: Option<&str>) -> CommandOutcome {
    let original = match original.map(parse_watermark).transpose() {
        Ok(o) => o,
        Err(outcome) => return outcome,
    };
    let graph = attempt!(read_graph(file));
    let report = classify_graph(&graph);
    let mut stdout = String::new();
    for (name, status) in &report.checks {
        let _ = match status {
            CheckStatus::Pass => writeln!(stdout, "{name}: pass"),
            CheckStatus::Fail(detail) => writeln!(stdout, "{name}: fail ({detail})"),
            CheckStatus::Skipped => writeln!(stdout, "{name}: skipped"),
        };
    }
    let exit_code = match report.verdict {
        Verdict::Valid(w) => {
            let _ = writeln!(stdout, "verdict: VALID w={w}");
            EXIT_OK
        }
        Verdict::FalseIncorrect(_) => {
            let _ = writeln!(stdout, "verdict: FALSE-INCORRECT");
            EXIT_FALSE_INCORRECT
        }
    };
    if let Some(original) = original {
        let _ = match report.relation_to(&original) {
            AttackVerdict::Intact => writeln!(stdout, "relation: intact"),
            AttackVerdict::TrueIncorrect(w) => writeln!(stdout, "relation: true-incorrect w'={w}"),
            AttackVerdict::FalseIncorrect => writeln!(stdout, "relation: false-incorrect"),
        };
    }
    CommandOutcome {
        exit_code,
        stdout,
        stderr: String::new(),
    }
}

fn attacked_path(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph");
    let stem = stem.strip_suffix(".rpg").unwrap_or(stem);
    input.with_file_name(format!("{stem}.attacked.json"))
}

pub fn cmd_attack(file: &Path, edits: &str, out: Option<PathBuf>) -> CommandOutcome {
    let graph = attempt!(read_graph(file));
    let edits = match parse_edits(edits) {
        Ok(e) => e,
        Err(e) => return CommandOutcome::invalid(e),
    };
    let outcome = match apply_edge_edits(&graph, &edits) {
        Ok(o) => o,
        Err(e) => return CommandOutcome::invalid(e),
    };
    let json = to_json(&outcome.graph).expect("edits keep the node count");
    let out = out.unwrap_or_else(|| attacked_path(file));
    attempt!(write_file(&out, &json));

    let mut stdout = format!("edits={}\n", outcome.applied);
    if outcome.applied <= graph.n_star() {
        let d = graph_distance(&graph, &outcome.graph).expect("same size");
        let _ = writeln!(stdout, "distance={d}");
    }
    CommandOutcome::ok(stdout)
}

fn resilience_failure(e: ResilienceError) -> CommandOutcome {
    match e {
        ResilienceError::Unsound { .. } => CommandOutcome {
            exit_code: EXIT_MISMATCH,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        other => CommandOutcome::invalid(other),
    }
}

fn render_report(r: &ResilienceReport) -> String {
    let na = || "n/a".to_owned();
    let mut out = String::new();
    let _ = writeln!(out, "w={}", r.w);
    let _ = writeln!(out, "bits={}", r.w.bits());
    let _ = writeln!(out, "binary={}", r.w.bit_string());
    let _ = writeln!(out, "shape={}", r.shape);
    let _ = writeln!(
        out,
        "minvm_closed={}",
        r.minvm_closed.map_or_else(na, |v| v.to_string())
    );
    let _ = writeln!(out, "minvm_oracle={}", r.minvm_oracle);
    let _ = writeln!(
        out,
        "agree={}",
        r.agreement.map_or_else(na, |v| v.to_string())
    );
    let nearest: Vec<String> = r.nearest.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "nearest={}", nearest.join(","));
    let _ = writeln!(
        out,
        "strength={}",
        r.strength.map_or_else(na, |s| s.to_string())
    );
    if r.below_theorem_range() {
        let _ = writeln!(
            out,
            "note=below 4 bits the closed form does not apply; oracle only"
        );
    }
    out
}

pub fn cmd_analyze(w: &str, cap_override: Option<u32>) -> CommandOutcome {
    let w = attempt!(parse_watermark(w));
    match analyze(&w, cap_override.unwrap_or(DEFAULT_ENUMERATION_CAP)) {
        Ok(report) => CommandOutcome::ok(render_report(&report)),
        Err(e) => resilience_failure(e),
    }
}

pub fn survey_csv(rows: &[SurveyRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("in-memory CSV write");
    }
    if rows.is_empty() {
        return String::new();
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("CSV is UTF-8")
}

fn json_text<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

pub fn cmd_survey(bits: u32, format: Format, cap_override: Option<u32>) -> CommandOutcome {
    match survey(bits, cap_override.unwrap_or(DEFAULT_ENUMERATION_CAP)) {
        Ok(rows) => CommandOutcome::ok(match format {
            Format::Csv => survey_csv(&rows),
            Format::Json => json_text(&rows),
        }),
        Err(e) => resilience_failure(e),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn verification_csv(report: &VerificationReport) -> String {
    let mut out = String::from(
        "n,watermarks,mismatches,max_minvm,argmax,argmax_nearest_counts,strong,strong_nearest_count,\
         strong_claim_holds,min_pairwise_distance,separation_holds,proof_witnesses_checked\n",
    );
    for r in &report.ranges {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.watermarks,
            r.mismatches,
            r.max_minvm,
            join(&r.argmax),
            join(&r.argmax_nearest_counts),
            r.strong,
            r.strong_nearest_count,
            r.strong_claim_holds,
            r.min_pairwise_distance,
            r.separation_holds,
            r.proof_witnesses_checked
        );
    }
    if !report.counterexamples.is_empty() {
        out.push_str("\n# counterexamples\n");
        out.push_str(&survey_csv(&report.counterexamples));
    }
    out
}

pub fn cmd_verify(
    bits_min: u32,
    bits_max: u32,
    format: Format,
    cap_override: Option<u32>,
) -> CommandOutcome {
    match verify_theorem(
        bits_min,
        bits_max,
        cap_override.unwrap_or(DEFAULT_ENUMERATION_CAP),
    ) {
        Ok(report) => verification_outcome(&report, format),
        Err(e) => resilience_failure(e),
    }
}

/// Renders a sweep report; exit 4 unless every claim held.
pub fn verification_outcome(report: &VerificationReport, format: Format) -> CommandOutcome {
    let stdout = match format {
        Format::Csv => verification_csv(report),
        Format::Json => json_text(report),
    };
    if report.holds() {
        return CommandOutcome::ok(stdout);
    }
    let claims = if report
        .ranges
        .iter()
        .all(|r| r.strong_claim_holds && r.separation_holds)
    {
        "hold"
    } else {
        "fail"
    };
    CommandOutcome {
        exit_code: EXIT_MISMATCH,
        stdout,
        stderr: format!(
            "error: {} closed-form mismatches; strong/separation claims {claims}\n",
            report.counterexamples.len()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_below_domain_is_invalid_input() {
        let out = run(["wrpg", "encode", "1", "--out", "-"]);
        assert_eq!(out.exit_code, EXIT_INVALID_INPUT);
        let out = run(["wrpg", "encode", "abc", "--out", "-"]);
        assert_eq!(out.exit_code, EXIT_INVALID_INPUT);
    }

    #[test]
    fn encode_to_stdout() {
        let out = run(["wrpg", "encode", "7", "--out", "-", "--show-sip"]);
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(
            out.stdout,
            "4 5 6 1 2 3 7\n{\"version\":1,\"n\":3,\"nstar\":7,\"back_edges\":[6,6,6,8,8,8,8]}\n"
        );
    }

    #[test]
    fn unknown_subcommand_is_invalid_input() {
        assert_eq!(run(["wrpg", "frobnicate"]).exit_code, EXIT_INVALID_INPUT);
        assert_eq!(run(["wrpg", "--help"]).exit_code, EXIT_OK);
    }

    #[test]
    fn analyze_strong_watermark() {
        let out = run(["wrpg", "analyze", "27"]);
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.stdout.contains("minvm_closed=5\n"));
        assert!(out.stdout.contains("strength=strong\n"));
    }

    #[test]
    fn cap_is_enforced() {
        let out = run(["wrpg", "analyze", "40000"]);
        assert_eq!(out.exit_code, EXIT_INVALID_INPUT);
        let out = run(["wrpg", "survey", "--bits", "15"]);
        assert_eq!(out.exit_code, EXIT_INVALID_INPUT);
    }

    #[test]
    fn attacked_file_name() {
        assert_eq!(
            attacked_path(Path::new("dir/12.rpg.json")),
            PathBuf::from("dir/12.attacked.json")
        );
        assert_eq!(
            attacked_path(Path::new("g.json")),
            PathBuf::from("g.attacked.json")
        );
    }
}
