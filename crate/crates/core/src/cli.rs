//! The `profinite-lab` command line.
//!
//! Exit codes: 0 when the question was answered, 1 for usage or input
//! errors, 2 when the answer is unknown within the step budget.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use crate::depth::{default_schedule, DepthHarness, DepthOutcome, QuotientOutcome};
use crate::halting_set::{bound_is_consistent, HaltingSet, WitnessResult, XnDescription, XnKnowledge};
use crate::lamp_groups::{eval_factor, is_trivial, normal_form, parse_word};
use crate::machines::{audit, Registry};
use crate::profinite::{closed_ball, dist, norm, open_ball, theta, Radius};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "profinite-lab", version, about = "Profinite metric, halting-driven open sets and lamplighter amalgams")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Machine registry file; repeat to concatenate registries in order.
    #[arg(long, global = true)]
    registry: Vec<PathBuf>,
    /// Simulation budget in steps.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Profinite norm, distance, theta and balls.
    #[command(subcommand)]
    Metric(MetricCmd),
    /// Validate or run registry machines.
    #[command(subcommand)]
    Machine(MachineCmd),
    /// Membership, descriptions and witnesses for the set B.
    #[command(subcommand)]
    Set(SetCmd),
    /// Word problem in L(A).
    #[command(subcommand)]
    Group(GroupCmd),
    /// Depth tables and quotient checks.
    #[command(subcommand)]
    Depth(DepthCmd),
    /// Demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Debug, Subcommand)]
enum MetricCmd {
    #[command(allow_negative_numbers = true)]
    Norm { x: BigInt },
    #[command(allow_negative_numbers = true)]
    Dist { x: BigInt, y: BigInt },
    Theta { n: u64 },
    /// Closed ball of radius 1/n.
    #[command(allow_negative_numbers = true)]
    Cball { x: BigInt, n: u64 },
    /// Open ball of rational radius, e.g. 1/12.
    #[command(allow_negative_numbers = true)]
    Oball { x: BigInt, r: String },
}

#[derive(Debug, Subcommand)]
enum MachineCmd {
    Validate {
        /// Also check declared statuses by simulating up to the budget.
        #[arg(long)]
        audit: bool,
    },
    /// Run a machine (name or 1-based registry index) for the budget.
    Run { machine: String },
}

#[derive(Debug, Subcommand)]
enum SetCmd {
    #[command(allow_negative_numbers = true)]
    Member { x: BigInt },
    Describe { n: usize },
    #[command(allow_negative_numbers = true)]
    Witness { x: BigInt },
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    Eval { word: Vec<String> },
    Nf { word: Vec<String> },
    Trivial { word: Vec<String> },
}

#[derive(Debug, Subcommand)]
enum DepthCmd {
    #[command(allow_negative_numbers = true)]
    Table {
        /// Comma-separated integers.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "2")]
        xs: Vec<BigInt>,
        /// Comma-separated moduli; defaults to theta(1..=20).
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<BigUint>,
    },
    #[command(allow_negative_numbers = true)]
    Quotient { x: BigInt, n: BigUint },
}

#[derive(Debug, Subcommand)]
enum DemoCmd {
    /// Read step bounds off verified balls around each t_n.
    HaltingBound,
}

type Record = Vec<(String, String)>;

struct Report {
    records: Vec<Record>,
    code: i32,
}

impl Report {
    fn one(record: Record) -> Self {
        Report {
            records: vec![record],
            code: EXIT_OK,
        }
    }

    fn value(v: impl ToString) -> Self {
        Report::one(vec![kv("value", v)])
    }

    fn render(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Text if self.records.len() == 1 => {
                let mut fields = self.records[0].iter();
                if let Some((_, v)) = fields.next() {
                    writeln!(out, "{v}")?;
                }
                for (k, v) in fields {
                    writeln!(out, "{k}={v}")?;
                }
            }
            Format::Text => {
                for r in &self.records {
                    let line: Vec<String> = r.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(out, "{}", line.join(" "))?;
                }
            }
            Format::Tsv => {
                if let Some(first) = self.records.first() {
                    let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
                    writeln!(out, "{}", header.join("\t"))?;
                }
                for r in &self.records {
                    let row: Vec<&str> = r.iter().map(|(_, v)| v.as_str()).collect();
                    writeln!(out, "{}", row.join("\t"))?;
                }
            }
        }
        Ok(())
    }
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

type CliResult = Result<Report, String>;

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(report) => match report.render(cli.global.format, out) {
            Ok(()) => report.code,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_ERROR
            }
        },
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn load_set(g: &GlobalArgs) -> Result<HaltingSet, String> {
    Ok(HaltingSet::new(Registry::load(&g.registry).map_err(|e| e.to_string())?))
}

fn dispatch(cli: &Cli) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Metric(cmd) => metric(cmd),
        Command::Machine(cmd) => machine(cmd, g),
        Command::Set(cmd) => set(cmd, g),
        Command::Group(cmd) => group(cmd, g),
        Command::Depth(cmd) => depth(cmd, g),
        Command::Demo(DemoCmd::HaltingBound) => demo_halting_bound(g),
    }
}

fn metric(cmd: &MetricCmd) -> CliResult {
    let e = |e: crate::profinite::ProfiniteError| e.to_string();
    Ok(match cmd {
        MetricCmd::Norm { x } => Report::value(norm(x)),
        MetricCmd::Dist { x, y } => Report::value(dist(x, y)),
        MetricCmd::Theta { n } => Report::value(theta(*n).map_err(e)?),
        MetricCmd::Cball { x, n } => {
            let p = closed_ball(x, *n).map_err(e)?;
            Report::one(vec![kv("ball", &p), kv("residue", p.residue()), kv("modulus", p.modulus())])
        }
        MetricCmd::Oball { x, r } => {
            let r: Radius = r.parse().map_err(e)?;
            let p = open_ball(x, &r).map_err(e)?;
            Report::one(vec![kv("ball", &p), kv("residue", p.residue()), kv("modulus", p.modulus())])
        }
    })
}

fn machine(cmd: &MachineCmd, g: &GlobalArgs) -> CliResult {
    if g.registry.is_empty() {
        return Err("machine commands need at least one --registry".into());
    }
    let registry = Registry::load(&g.registry).map_err(|e| e.to_string())?;
    match cmd {
        MachineCmd::Validate { audit: false } => Ok(Report {
            records: registry
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    vec![
                        kv("index", i + 1),
                        kv("name", m.name()),
                        kv("states", m.non_halt_states()),
                        kv("declared", m.declared_status()),
                    ]
                })
                .collect(),
            code: EXIT_OK,
        }),
        MachineCmd::Validate { audit: true } => {
            let reports = audit(&registry, g.budget);
            let code = if reports.iter().all(|r| r.consistent) { EXIT_OK } else { EXIT_ERROR };
            Ok(Report {
                records: reports
                    .into_iter()
                    .map(|r| {
                        vec![
                            kv("name", r.machine),
                            kv("declared", r.declared),
                            kv("observed", r.observed),
                            kv("consistent", r.consistent),
                        ]
                    })
                    .collect(),
                code,
            })
        }
        MachineCmd::Run { machine } => {
            let n = registry
                .position(machine)
                .or_else(|| machine.parse::<usize>().ok().filter(|&n| registry.get(n).is_some()))
                .ok_or_else(|| format!("no machine {machine:?} in the registry"))?;
            let status = registry.get(n).expect("position is valid").run_bounded(g.budget);
            Ok(Report::one(vec![kv("status", status), kv("index", n)]))
        }
    }
}

fn set(cmd: &SetCmd, g: &GlobalArgs) -> CliResult {
    let hs = load_set(g)?;
    let e = |e: crate::halting_set::SetError| e.to_string();
    match cmd {
        SetCmd::Member { x } => {
            let answer = hs.member_b(x).map_err(e)?;
            let mut record = vec![kv("member", answer.verdict)];
            record.extend(answer.certificate.kv_lines());
            Ok(Report::one(record))
        }
        SetCmd::Describe { n } => {
            let p = hs.xn_params(*n).map_err(e)?;
            let mut record = vec![];
            match hs.describe_xn(*n, g.budget).map_err(e)? {
                XnDescription::Exact(x) => {
                    record.push(kv("status", "exact"));
                    record.push(kv("t_n", &p.t_n));
                    record.push(kv("m", &p.m));
                    record.push(kv("halting_step", x.halting_step));
                    record.push(kv("r", &x.r));
                    record.push(kv("y", &x.y));
                    record.push(kv("r_prime", &x.r_prime));
                    record.push(kv("final_ball", &x.final_ball));
                    for b in &x.step_balls {
                        record.push(kv(&format!("ball.k{}", b.k), &b.ball));
                    }
                }
                XnDescription::NonHaltingSoFar { steps, balls } => {
                    record.push(kv("status", "non-halting-so-far"));
                    record.push(kv("t_n", &p.t_n));
                    record.push(kv("m", &p.m));
                    record.push(kv("steps", steps));
                    record.push(kv("balls", balls.len()));
                }
            }
            Ok(Report::one(record))
        }
        SetCmd::Witness { x } => match hs.openness_witness(x, g.budget).map_err(e)? {
            WitnessResult::Witness { modulus, verified } => Ok(Report::one(vec![
                kv("modulus", modulus),
                kv("verified", verified),
            ])),
            WitnessResult::UnknownWithinBudget(b) => Ok(Report {
                records: vec![vec![kv("result", "unknown"), kv("budget", b)]],
                code: EXIT_UNKNOWN,
            }),
        },
    }
}

fn group(cmd: &GroupCmd, g: &GlobalArgs) -> CliResult {
    let hs = load_set(g)?;
    let (GroupCmd::Eval { word } | GroupCmd::Nf { word } | GroupCmd::Trivial { word }) = cmd;
    let w = parse_word(&word.join(" ")).map_err(|e| e.to_string())?;
    Ok(match cmd {
        GroupCmd::Eval { .. } => {
            let (factor, element) = eval_factor(&w.0).map_err(|e| e.to_string())?;
            Report::one(vec![kv("element", format!("{factor}{element}"))])
        }
        GroupCmd::Nf { .. } => {
            let nf = normal_form(&w, &hs);
            let text = if nf.is_empty() {
                "identity".to_string()
            } else {
                nf.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
            };
            Report::one(vec![kv("normal_form", text), kv("syllables", nf.len())])
        }
        GroupCmd::Trivial { .. } => Report::value(is_trivial(&w, &hs)),
    })
}

fn depth(cmd: &DepthCmd, g: &GlobalArgs) -> CliResult {
    let hs = load_set(g)?;
    let harness = DepthHarness::new(&hs, g.budget);
    let e = |e: crate::depth::DepthError| e.to_string();
    match cmd {
        DepthCmd::Table { xs, schedule } => {
            let schedule = if schedule.is_empty() { default_schedule() } else { schedule.clone() };
            let rows = harness.depth_table(xs, &schedule).map_err(e)?;
            Ok(Report {
                records: rows
                    .into_iter()
                    .map(|r| {
                        let witness = match &r.outcome {
                            DepthOutcome::Witness(n) => n.to_string(),
                            DepthOutcome::Unknown => "unknown".into(),
                            DepthOutcome::Skipped => "skipped".into(),
                        };
                        vec![
                            kv("x", r.x),
                            kv("word_length", r.word_length),
                            kv("witness_modulus", witness),
                            kv("certificate", r.certificate),
                        ]
                    })
                    .collect(),
                code: EXIT_OK,
            })
        }
        DepthCmd::Quotient { x, n } => match harness.quotient_kill_shifts(x, n).map_err(e)? {
            QuotientOutcome::Decided(v) => {
                let verdict = if v.identity_in_quotient { "identity" } else { "non-identity" };
                let mut record = vec![kv("verdict", verdict), kv("x", &v.x), kv("modulus", &v.modulus)];
                if let Some(k) = v.witness_k {
                    record.push(kv("k", k));
                }
                Ok(Report::one(record))
            }
            QuotientOutcome::BudgetExhausted => Ok(Report {
                records: vec![vec![kv("verdict", "unknown"), kv("budget", g.budget)]],
                code: EXIT_UNKNOWN,
            }),
        },
    }
}

fn demo_halting_bound(g: &GlobalArgs) -> CliResult {
    let hs = load_set(g)?;
    let e = |e: crate::halting_set::SetError| e.to_string();
    let mut records = Vec::new();
    for (i, m) in hs.registry().iter().enumerate() {
        let n = i + 1;
        let p = hs.xn_params(n).map_err(e)?;
        let mut record = vec![kv("n", n), kv("machine", m.name()), kv("t_n", &p.t_n)];
        let radius = match hs.knowledge(n, g.budget).map_err(e)? {
            XnKnowledge::Exact(x) => Some(x.r_prime),
            // B(t_n, 1/(t_{n+1} - 1)) is the closed ball t_n + mZ
            XnKnowledge::DeclaredLoops { .. } => Some(Radius::reciprocal_big(&(&p.t_next - 1u32))),
            XnKnowledge::Partial { .. } => None,
        };
        match radius {
            None => {
                record.push(kv("radius", "unknown"));
                record.push(kv("bound", "unknown"));
                record.push(kv("consistent", "n/a"));
            }
            Some(r) => {
                let ball = open_ball(&p.t_n, &r).map_err(|e| e.to_string())?;
                let bound = hs.halting_bound_from_certificate(n, &r).map_err(e)?;
                record.push(kv("radius", &r));
                record.push(kv("ball", &ball));
                record.push(kv("bound", &bound.steps));
                record.push(kv("consistent", bound_is_consistent(m, &bound.steps, g.budget)));
            }
        }
        records.push(record);
    }
    Ok(Report { records, code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("profinite-lab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn metric_commands() {
        assert_eq!(run_str(&["metric", "dist", "2", "62"]), (0, "1/6\n".into(), String::new()));
        assert_eq!(run_str(&["metric", "norm", "-7"]).1, "1\n");
        assert_eq!(run_str(&["metric", "theta", "13"]).1, "360360\n");
        assert!(run_str(&["metric", "oball", "2", "1/12"]).1.starts_with("2 + 360360Z\n"));
        assert!(run_str(&["metric", "cball", "-58", "13"]).1.starts_with("360302 + 360360Z\n"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["metric", "theta", "0"]).0, 1);
        assert_eq!(run_str(&["bogus"]).0, 1);
        assert_eq!(run_str(&["metric", "oball", "2", "-1/2"]).0, 1);
        assert_eq!(run_str(&["group", "trivial", "aex"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn tsv_output() {
        let (code, out, _) = run_str(&["metric", "cball", "2", "6", "--format", "tsv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "ball\tresidue\tmodulus\n2 + 60Z\t2\t60\n");
    }

    #[test]
    fn group_without_registry_is_free_product() {
        // empty registry: B is empty, A is everything
        assert_eq!(run_str(&["group", "trivial", "ef"]).1, "true\n");
        assert_eq!(run_str(&["group", "nf", "aeA"]).1, "L({1}, 0)\nsyllables=1\n");
    }
}
