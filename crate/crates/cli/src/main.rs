use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use knotdance::braid::{braid_closure, braid_schedule, parse_braid, BraidError};
use knotdance::bridge::{bridge_count, reduce_to_bridge_minimal, BridgeError, BridgeReport};
use knotdance::codec::{parse_corpus, DiagramCode};
use knotdance::dance::{
    render_trace_table, try_dance, ClassicalRule, Configuration, DanceError, Rule, Trace, VirtualRule,
    DEFAULT_STATE_LIMIT,
};
use knotdance::search::{
    check_with, corpus, enumerate_codes, min_dancers, standard_properties, CheckOptions, MinDance, SearchError,
};
use serde::Serialize;
use serde_json::{json, Value};

const STATE_LIMIT_VAR: &str = "KNOTDANCE_STATE_LIMIT";

#[derive(Parser)]
#[command(name = "knotdance", version, about = "Dances, bridges and braids on extended Gauss codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bridge counts and minimal dancer numbers for every code in a file.
    Compute {
        /// File of codes, one per line; `-` reads stdin.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleArg::All)]
        rule: RuleArg,
        /// Only try configurations whose dancers start at bridges.
        #[arg(long)]
        restrict_starts: bool,
        /// Include the witness schedule for each number.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Slide bridges until the bridge count equals the over-first dancer number.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the dance table for each code, from given starts or a minimal witness.
    Trace {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleArg::Over)]
        rule: RuleArg,
        /// Comma-separated start arcs; the minimal witness when omitted.
        #[arg(long, value_delimiter = ',')]
        starts: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Close a braid word such as "n=2 s1 S1 v1".
    Closure {
        word: String,
        /// Also print the one-dancer-per-strand coincident schedule.
        #[arg(long)]
        schedule: bool,
    },
    /// List codes with the given crossing counts, one per rotation class.
    Enumerate {
        #[arg(long, default_value_t = 0)]
        classical: usize,
        #[arg(long = "virtual", default_value_t = 0)]
        virtual_count: usize,
        /// Include every smaller pair of counts as well.
        #[arg(long)]
        up_to: bool,
    },
    /// Run the property suite over all codes up to the given sizes.
    Check {
        #[arg(long, default_value_t = 3)]
        max_classical: usize,
        #[arg(long, default_value_t = 0)]
        max_virtual: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Over,
    Under,
    Unrestricted,
    Coincident,
    Smoothing,
    All,
}

impl RuleArg {
    fn rules(self) -> Vec<(&'static str, Rule)> {
        let unrestricted = Rule::new(ClassicalRule::OverFirst, VirtualRule::Unrestricted);
        let all = [
            ("over_first", Rule::OVER_FIRST),
            ("under_first", Rule::UNDER_FIRST),
            ("unrestricted", unrestricted),
            ("coincident", Rule::COINCIDENT),
            ("smoothing", Rule::SMOOTHING),
        ];
        match self {
            RuleArg::All => all.to_vec(),
            RuleArg::Over => vec![all[0]],
            RuleArg::Under => vec![all[1]],
            RuleArg::Unrestricted => vec![all[2]],
            RuleArg::Coincident => vec![all[3]],
            RuleArg::Smoothing => vec![all[4]],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Limit(String),
    Properties,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Properties => 1,
            Failure::Input(_) => 2,
            Failure::Limit(_) => 3,
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        if e.is_resource_limit() {
            Failure::Limit(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<DanceError> for Failure {
    fn from(e: DanceError) -> Self {
        SearchError::from(e).into()
    }
}

impl From<BridgeError> for Failure {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Search(e) => e.into(),
            BridgeError::Dance(e) => e.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<BraidError> for Failure {
    fn from(e: BraidError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Vec::new();
    let result = run(cli.command, &mut out);
    let _ = io::stdout().write_all(&out);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Limit(msg) => eprintln!("resource limit: {msg}"),
                Failure::Properties => eprintln!("property check failed"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command, out: &mut Vec<u8>) -> Result<(), Failure> {
    match command {
        Command::Compute { input, rule, restrict_starts, trace, format } => {
            let codes = read_codes(&input)?;
            if restrict_starts && !matches!(rule, RuleArg::Over | RuleArg::Unrestricted | RuleArg::All) {
                return Err(Failure::Input("--restrict-starts needs --rule over, unrestricted or all".into()));
            }
            for (line, code) in codes {
                compute(out, line, &code, rule, restrict_starts, trace, format)?;
            }
        }
        Command::Reduce { input, format } => {
            for (line, code) in read_codes(&input)? {
                reduce(out, line, &code, format)?;
            }
        }
        Command::Trace { input, rule, starts, format } => {
            if rule == RuleArg::All {
                return Err(Failure::Input("trace needs a single rule".into()));
            }
            let (_, rule) = rule.rules()[0];
            for (line, code) in read_codes(&input)? {
                trace_one(out, line, &code, rule, starts.as_deref(), format)?;
            }
        }
        Command::Closure { word, schedule } => {
            let word = parse_braid(&word)?;
            if schedule {
                let (code, trace) = braid_schedule(&word)?;
                writeln!(out, "{code}")?;
                match render_trace_table(&code, &trace) {
                    Ok(table) => out.extend_from_slice(table.as_bytes()),
                    Err(DanceError::EmptyTrace) => writeln!(out, "(one dancer, no crossings)")?,
                    Err(e) => return Err(e.into()),
                }
            } else {
                writeln!(out, "{}", braid_closure(&word)?)?;
            }
        }
        Command::Enumerate { classical, virtual_count, up_to } => {
            let codes = if up_to { corpus(classical, virtual_count)? } else { enumerate_codes(classical, virtual_count)? };
            for code in codes {
                writeln!(out, "{code}")?;
            }
        }
        Command::Check { max_classical, max_virtual, format } => {
            let codes = corpus(max_classical, max_virtual)?;
            let options = CheckOptions { state_limit: state_limit()?, ..CheckOptions::default() };
            let report = check_with(&codes, &standard_properties(), &options);
            match format {
                Format::Text => out.extend_from_slice(report.summary().as_bytes()),
                Format::JsonLines => {
                    for r in &report.results {
                        json_line(out, r)?;
                    }
                }
            }
            if report.failures() > 0 {
                return Err(Failure::Properties);
            }
            if report.limited() > 0 {
                return Err(Failure::Limit(format!("{} checks hit the state limit", report.limited())));
            }
        }
    }
    Ok(())
}

fn state_limit() -> Result<usize, Failure> {
    match std::env::var(STATE_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{STATE_LIMIT_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_STATE_LIMIT),
    }
}

/// Parse every line first so no output is produced for a file with errors.
fn read_codes(path: &Path) -> Result<Vec<(usize, DiagramCode)>, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let mut codes = Vec::new();
    let mut errors = String::new();
    for (line, parsed) in parse_corpus(&text) {
        match parsed {
            Ok(code) => codes.push((line, code)),
            Err(e) => {
                let _ = writeln!(errors, "{}:{line}: {e}", path.display());
            }
        }
    }
    if errors.is_empty() {
        Ok(codes)
    } else {
        Err(Failure::Input(errors.trim_end().to_string()))
    }
}

fn json_line<T: Serialize>(out: &mut Vec<u8>, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Failure::Input(e.to_string()))?;
    out.push(b'\n');
    Ok(())
}

fn optional(result: Result<MinDance, SearchError>) -> Result<Option<MinDance>, Failure> {
    match result {
        Ok(m) => Ok(Some(m)),
        Err(SearchError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn bridge_json(report: &BridgeReport) -> Value {
    json!({ "count": report.count, "starts": report.starts(), "runs": report.bridges })
}

fn compute(
    out: &mut Vec<u8>,
    line: usize,
    code: &DiagramCode,
    rule: RuleArg,
    restrict: bool,
    with_trace: bool,
    format: Format,
) -> Result<(), Failure> {
    let bridges = bridge_count(code);
    let mut numbers = Vec::new();
    for (name, r) in rule.rules() {
        let restrict_here = restrict && r.virtual_rule == VirtualRule::Unrestricted && r.classical == ClassicalRule::OverFirst;
        numbers.push((name, optional(min_dancers(code, r, restrict_here))?));
    }
    match format {
        Format::Text => {
            writeln!(out, "line {line}: {code}")?;
            writeln!(out, "  bridges: {} (starts {})", bridges.count, join(&bridges.starts()))?;
            for (name, m) in &numbers {
                match m {
                    Some(m) => writeln!(out, "  {name}: {} (starts {})", m.dancers, join(m.config().starts()))?,
                    None => writeln!(out, "  {name}: infeasible")?,
                }
            }
            if with_trace {
                for (name, m) in &numbers {
                    if let Some(m) = m {
                        if !m.trace.moves().is_empty() {
                            writeln!(out, "  {name} schedule:")?;
                            for row in render_trace_table(code, &m.trace)?.lines() {
                                writeln!(out, "    {row}")?;
                            }
                        }
                    }
                }
            }
        }
        Format::JsonLines => {
            let mut entries = serde_json::Map::new();
            for (name, m) in &numbers {
                let value = match m {
                    Some(m) => {
                        let mut v = json!({ "dancers": m.dancers, "starts": m.config().starts() });
                        if with_trace {
                            v["trace"] = serde_json::to_value(&m.trace).map_err(|e| Failure::Input(e.to_string()))?;
                        }
                        v
                    }
                    None => Value::Null,
                };
                entries.insert(name.to_string(), value);
            }
            let record = json!({
                "line": line,
                "code": code.to_string(),
                "bridges": bridge_json(&bridges),
                "numbers": entries,
            });
            json_line(out, &record)?;
        }
    }
    Ok(())
}

fn reduce(out: &mut Vec<u8>, line: usize, code: &DiagramCode, format: Format) -> Result<(), Failure> {
    let record = match reduce_to_bridge_minimal(code) {
        Ok(r) => json!({
            "line": line,
            "original": r.original.to_string(),
            "reduced": r.reduced.to_string(),
            "original_bridges": r.original_bridges,
            "reduced_bridges": r.reduced_bridges,
            "dancers": r.dancers,
            "steps": r.steps.len(),
            "flag": if r.already_minimal() { Value::from("already-minimal") } else { Value::Null },
        }),
        Err(BridgeError::NoClassicalCrossings) => json!({
            "line": line,
            "original": code.to_string(),
            "reduced": code.to_string(),
            "original_bridges": 0,
            "reduced_bridges": 0,
            "dancers": 1,
            "steps": 0,
            "flag": "no-classical-crossings",
        }),
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::JsonLines => json_line(out, &record),
        Format::Text => {
            write!(
                out,
                "line {line}: {} -> {}  bridges {} -> {}, dancers {}, steps {}",
                record["original"].as_str().unwrap_or_default(),
                record["reduced"].as_str().unwrap_or_default(),
                record["original_bridges"],
                record["reduced_bridges"],
                record["dancers"],
                record["steps"],
            )?;
            if let Some(flag) = record["flag"].as_str() {
                write!(out, "  [{flag}]")?;
            }
            writeln!(out)?;
            Ok(())
        }
    }
}

fn trace_one(
    out: &mut Vec<u8>,
    line: usize,
    code: &DiagramCode,
    rule: Rule,
    starts: Option<&[usize]>,
    format: Format,
) -> Result<(), Failure> {
    let trace: Option<Trace> = match starts {
        Some(starts) => {
            let config = Configuration::new(starts.to_vec(), rule)?;
            config.check_against(code).map_err(|e| Failure::Input(format!("line {line}: {e}")))?;
            try_dance(code, &config)?
        }
        None => optional(min_dancers(code, rule, false))?.map(|m| m.trace),
    };
    match format {
        Format::JsonLines => json_line(out, &json!({ "line": line, "code": code.to_string(), "rule": rule.to_string(), "trace": trace })),
        Format::Text => {
            writeln!(out, "line {line}: {code} ({rule})")?;
            match trace {
                None => writeln!(out, "  not danceable")?,
                Some(t) if t.moves().is_empty() => writeln!(out, "  no crossings")?,
                Some(t) => out.extend_from_slice(render_trace_table(code, &t)?.as_bytes()),
            }
            Ok(())
        }
    }
}

fn join(values: &[usize]) -> String {
    if values.is_empty() {
        return "-".into();
    }
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
