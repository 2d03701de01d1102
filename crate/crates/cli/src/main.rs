//! `countsyn`: synthesis, equivalence, fidelity and counting from the shell.
//!
//! Exit codes: 0 success or equivalent, 2 negative verdict (not found, not
//! equivalent), 1 error.

mod report;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use countsyn::equivalence::{check_equiv, fidelity, EqEncoding};
use countsyn::synthesis::{gen_random_benchmark, synthesize_with, GateSetSpec, Rules, SynEncoding, SynMode, SynthesisProblem};
use countsyn::{Basis, Counter, CounterOptions, Operator, WeightedCnf};

use report::{Report, WeightJson};

#[derive(Parser, Debug)]
#[command(name = "countsyn", version, about = "Clifford+T synthesis and equivalence checking by weighted model counting")]
struct Cli {
    /// Counter worker threads.
    #[arg(long, global = true, env = "COUNTSYN_THREADS", default_value_t = 1)]
    threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Pb,
    Cb,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::Pb => Basis::PB,
            BasisArg::Cb => Basis::CB,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SynEncodingArg {
    Cyclic,
    #[value(name = "lc", alias = "linear-cyclic")]
    Lc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EqEncodingArg {
    Linear,
    Cyclic,
    #[value(name = "lc", alias = "linear-cyclic")]
    Lc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Depth-optimal synthesis of a circuit or unitary file.
    Synth(SynthArgs),
    /// Equivalence up to global phase of two circuit or unitary files.
    CheckEq(PairArgs<EqEncodingArg>),
    /// Jamiołkowski fidelity of two circuit or unitary files.
    Fidelity(FidelityArgs),
    /// Weighted model count of a weighted-CNF file.
    Count(CountArgs),
    /// Benchmark generation.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Defaults to PB, or CB for unitary specifications.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    #[arg(long, value_enum, default_value_t = SynEncodingArg::Cyclic)]
    encoding: SynEncodingArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Fidelity tolerance of approximate synthesis.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    min_depth: usize,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    /// `all`, `none`, or a list such as `1,2,3,4,5` (`2s`: signed T windows).
    #[arg(long, default_value = "all")]
    rules: Rules,
    /// Gate set; `I` is always included.
    #[arg(long, default_value = "H,T,Tdg,CX")]
    gates: String,
    /// Write each depth's formula to `<PREFIX>.d<depth>.wcnf`.
    #[arg(long, value_name = "PREFIX")]
    dump_cnf: Option<PathBuf>,
    /// Prune the Max#SAT search with upper bounds (non-negative weights only).
    #[arg(long)]
    bound_pruning: bool,
}

#[derive(Args, Debug)]
struct PairArgs<E: ValueEnum + Clone + Send + Sync + 'static> {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value = "cyclic")]
    encoding: E,
    /// Basis of the cyclic encoding; defaults to PB, or CB when either
    /// input is a unitary.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
}

#[derive(Args, Debug)]
struct FidelityArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
}

#[derive(Args, Debug)]
struct CountArgs {
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// A seeded random circuit in the circuit text format.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(short = 'n', long)]
    qubits: usize,
    #[arg(short = 'd', long)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resample until no shallower circuit implements the result.
    #[arg(long)]
    irreducible: bool,
    #[arg(long, default_value = "H,T,Tdg,CX")]
    gates: String,
    /// Write the circuit here instead of standard output.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let ok = report.success();
            let text = match cli.output {
                Format::Text => report.text(),
                Format::Json => report.json(),
            };
            let mut out = io::stdout().lock();
            if writeln!(out, "{}", text.trim_end()).is_err() {
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            match cli.output {
                Format::Text => eprintln!("error: {e:#}"),
                Format::Json => println!("{}", report::error_json(&e)),
            }
            ExitCode::from(1)
        }
    }
}

fn read_operator(path: &Path) -> Result<Operator> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Operator::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn is_unitary(op: &Operator) -> bool {
    matches!(op, Operator::Unitary(_))
}

/// PB unless a unitary input requires CB; an explicit choice is validated.
fn pick_basis(explicit: Option<BasisArg>, ops: &[&Operator], needs_pb: Option<&str>) -> Result<Basis> {
    let unitary = ops.iter().any(|o| is_unitary(o));
    match (explicit.map(Basis::from), needs_pb) {
        (Some(Basis::CB), Some(what)) => bail!("{what} works in the Pauli basis only"),
        (Some(Basis::PB), _) | (None, Some(_)) if unitary => {
            bail!("unitary inputs need the computational basis (--basis cb)")
        }
        (Some(b), _) => Ok(b),
        (None, Some(_)) => Ok(Basis::PB),
        (None, None) => Ok(if unitary { Basis::CB } else { Basis::PB }),
    }
}

fn counter_options(cli: &Cli) -> Result<CounterOptions> {
    if cli.threads == 0 {
        bail!("--threads must be at least 1");
    }
    Ok(CounterOptions { threads: cli.threads, ..CounterOptions::default() })
}

fn run(cli: &Cli) -> Result<Report> {
    let opts = counter_options(cli)?;
    match &cli.command {
        Command::Synth(a) => synth(a, opts, cli.output),
        Command::CheckEq(a) => {
            let (o1, o2) = (read_operator(&a.a)?, read_operator(&a.b)?);
            let enc = match a.encoding {
                EqEncodingArg::Linear => {
                    pick_basis(a.basis, &[&o1, &o2], Some("the linear encoding"))?;
                    EqEncoding::Linear
                }
                EqEncodingArg::Lc => {
                    pick_basis(a.basis, &[&o1, &o2], Some("the linear-cyclic encoding"))?;
                    EqEncoding::LinearCyclic
                }
                EqEncodingArg::Cyclic => EqEncoding::Cyclic(pick_basis(a.basis, &[&o1, &o2], None)?),
            };
            let v = check_equiv(&o1, &o2, enc, &Counter::new(opts))?;
            Ok(Report::CheckEq {
                encoding: enc.to_string(),
                equivalent: v.equivalent,
                score: v.score,
                raw: WeightJson::from(&v.raw),
                counts: v.counts.iter().map(WeightJson::from).collect(),
                global_phase_note: v.global_phase_note,
            })
        }
        Command::Fidelity(a) => {
            let (o1, o2) = (read_operator(&a.a)?, read_operator(&a.b)?);
            let basis = pick_basis(a.basis, &[&o1, &o2], None)?;
            let r = fidelity(&o1, &o2, basis, &Counter::new(opts))?;
            Ok(Report::Fidelity { basis: basis.name(), fidelity: r.fidelity, raw: WeightJson::from(&r.raw) })
        }
        Command::Count(a) => {
            let file = fs::File::open(&a.file).with_context(|| format!("cannot read {}", a.file.display()))?;
            let f = WeightedCnf::read_wcnf(BufReader::new(file)).with_context(|| format!("in {}", a.file.display()))?;
            let r = Counter::new(opts).count(&f);
            Ok(Report::Count {
                vars: f.num_vars(),
                clauses: f.num_clauses(),
                count: WeightJson::from(&r.count),
                stats: r.stats,
            })
        }
        Command::Bench(BenchCommand::Gen(a)) => {
            let gs = GateSetSpec::parse(&a.gates)?;
            let c = gen_random_benchmark(a.qubits, a.depth, &gs, a.seed, a.irreducible)?;
            let text = c.to_text();
            if let Some(path) = &a.out {
                fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(Report::Bench {
                qubits: a.qubits,
                depth: c.depth(),
                seed: a.seed,
                irreducible: a.irreducible,
                gates: gs.to_string(),
                circuit: text,
                path: a.out.clone(),
            })
        }
    }
}

fn synth(a: &SynthArgs, counter: CounterOptions, format: Format) -> Result<Report> {
    let spec = read_operator(&a.spec)?;
    let encoding = match a.encoding {
        SynEncodingArg::Cyclic => SynEncoding::Cyclic,
        SynEncodingArg::Lc => SynEncoding::LinearCyclic,
    };
    let needs_pb = (encoding == SynEncoding::LinearCyclic).then_some("the linear-cyclic encoding");
    let basis = pick_basis(a.basis, &[&spec], needs_pb)?;
    let mode = match a.mode {
        ModeArg::Exact => SynMode::Exact,
        ModeArg::Approx => SynMode::Approx(a.eps),
    };
    let p = SynthesisProblem {
        min_depth: a.min_depth,
        max_depth: a.max_depth,
        rules: a.rules,
        counter: CounterOptions { upper_bound_pruning: a.bound_pruning, ..counter },
        dump_cnf: a.dump_cnf.clone(),
        ..SynthesisProblem::new(spec, GateSetSpec::parse(&a.gates)?, basis, encoding, mode)
    };
    let r = synthesize_with(&p, &Counter::new(p.counter.clone()), |l| {
        if format == Format::Text {
            eprintln!("{}", report::depth_line(l));
        }
    })?;
    Ok(Report::Synth {
        basis: basis.name(),
        encoding: match encoding {
            SynEncoding::Cyclic => "cyclic",
            SynEncoding::LinearCyclic => "linear-cyclic",
        },
        mode: match a.mode {
            ModeArg::Exact => "exact",
            ModeArg::Approx => "approx",
        },
        eps: (a.mode == ModeArg::Approx).then_some(a.eps),
        rules: a.rules.to_string(),
        gates: p.gate_set.to_string(),
        found: r.found,
        depth: r.depth,
        circuit: r.circuit.as_ref().map(|c| c.to_text()),
        score: r.score,
        raw: WeightJson::from(&r.raw),
        fidelity: r.fidelity,
        log: r.log,
    })
}
