use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64 as C64;

use tensor_counter::circuit::{lower_quantum, lower_to_network, parse_dimacs, parse_netlist, Circuit};
use tensor_counter::counter::{build_counter, verify_checker, CountQuery, Mode};
use tensor_counter::geometric::{absorb_boundaries, fold_and_merge, order_cost, order_for, prune_support, OrderKind};
use tensor_counter::oracle::{dense_count_probability, enumerate_count, ENUMERATION_LIMIT, STATE_QUBIT_LIMIT};
use tensor_counter::search::{find, Engine, FixedLength, Status, Strategy};
use tensor_counter::tensor::TensorNetwork;
use tensor_counter::{BitString, Error, Scalar};

mod format;

use format::fmt_g;

#[derive(Parser, Debug)]
#[command(name = "tcount", version, about = "Count and search solutions of circuit checkers with tensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print #(x,n,w') for one query.
    Count(QueryArgs),
    /// Find a solution by counting.
    Solve(SolveArgs),
    /// Compare engine counts with brute-force oracles.
    Verify(VerifyArgs),
    /// Print the acceptance probability P for one query.
    Simulate(QueryArgs),
    /// Print the contraction order report for one query.
    Cost(QueryArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Dimacs,
    Netlist,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Geometric,
    Stabiliser,
    Gaussian,
    Concat,
    Auto,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Tree,
    Minfill,
    Auto,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Probability,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Human,
    Tsv,
}

#[derive(Args, Debug)]
struct Common {
    /// Input file, or `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    format: InputFormat,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = OrderArg::Auto)]
    order: OrderArg,
    /// Default: exact for Boolean checkers, probability for quantum ones.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = OutputArg::Human)]
    output: OutputArg,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    common: Common,
    /// Solution length; defaults to the checker's input count.
    #[arg(long)]
    n: Option<usize>,
    /// Suffix w', most significant bit first.
    #[arg(long, default_value = "")]
    suffix: String,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Longest length tried; defaults to the checker's input count.
    #[arg(long)]
    n_max: Option<usize>,
    /// Query the 1-branch too instead of inferring it.
    #[arg(long)]
    paranoid: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Longest suffix compared.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Inputs sampled by the checker-condition test above its budget.
    #[arg(long, default_value_t = 1024)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidQuery(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn read_input(c: &Common) -> std::result::Result<Circuit, Failure> {
    let text = if c.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&c.input).map_err(|e| Failure::usage(format!("cannot read {}: {e}", c.input.display())))?
    };
    let dimacs = match c.format {
        InputFormat::Dimacs => true,
        InputFormat::Netlist => false,
        InputFormat::Auto => {
            c.input.extension().is_some_and(|e| e == "cnf" || e == "dimacs")
                || text.lines().any(|l| l.trim_start().starts_with("p cnf"))
        }
    };
    Ok(if dimacs {
        Circuit::Boolean(parse_dimacs(&text)?)
    } else {
        parse_netlist(&text)?
    })
}

fn engine(c: &Common, circuit: &Circuit) -> std::result::Result<Engine, Failure> {
    let strategy = match c.strategy {
        StrategyArg::Geometric => Strategy::Geometric,
        StrategyArg::Stabiliser => Strategy::Stabiliser,
        StrategyArg::Gaussian => Strategy::Gaussian,
        StrategyArg::Concat => Strategy::Concat,
        StrategyArg::Auto => Strategy::Auto,
    };
    let order = match c.order {
        OrderArg::Tree => OrderKind::Tree,
        OrderArg::Minfill => OrderKind::Minfill,
        OrderArg::Auto => OrderKind::Auto,
    };
    let mode = c.mode.map(|m| match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Probability => Mode::Probability,
    });
    if mode == Some(Mode::Exact) {
        if let Circuit::Quantum(q) = circuit {
            if !q.is_permutation() {
                return Err(Failure::usage(
                    "--mode exact needs a Boolean or permutation checker; use --mode probability",
                ));
            }
        }
        if strategy != Strategy::Auto && strategy != Strategy::Geometric {
            return Err(Failure::usage(format!("--mode exact runs on the geometric strategy, not {strategy}")));
        }
    }
    Ok(Engine::new(strategy, order, mode))
}

fn query(args: &QueryArgs, circuit: &Circuit) -> std::result::Result<CountQuery, Failure> {
    let suffix: BitString = args.suffix.parse()?;
    let n = args.n.unwrap_or(circuit.n_solution());
    Ok(CountQuery::new(n, suffix, circuit.n_solution())?)
}

fn count(args: &QueryArgs) -> Outcome {
    let circuit = read_input(&args.common)?;
    let e = engine(&args.common, &circuit)?;
    let q = query(args, &circuit)?;
    let r = e.count(&circuit, &q)?;
    let chi = r.chi.map_or("-".to_string(), |c| c.to_string());
    Ok(match args.common.output {
        OutputArg::Human => format!(
            "#(x,{},{}) = {}\nstrategy {}  mode {}  order {}  width {}  cost {}  peak {}  chi {}\n",
            q.n(),
            q.suffix(),
            r.count,
            r.strategy,
            r.mode,
            r.report.order,
            fmt_g(r.report.width, 12),
            fmt_g(r.report.cost, 12),
            r.report.peak,
            chi
        ),
        OutputArg::Tsv => format!(
            "n\tsuffix\tcount\tstrategy\tmode\torder\twidth\tcost\tpeak\tchi\n{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            q.n(),
            q.suffix(),
            r.count,
            r.strategy,
            r.mode,
            r.report.order,
            fmt_g(r.report.width, 12),
            fmt_g(r.report.cost, 12),
            r.report.peak,
            chi
        ),
    })
}

fn solve(args: &SolveArgs) -> Outcome {
    let circuit = read_input(&args.common)?;
    let e = engine(&args.common, &circuit)?;
    let n_max = args.n_max.unwrap_or(circuit.n_solution());
    if n_max == 0 {
        return Err(Failure::usage("--n-max must be at least 1"));
    }
    let out = find(&FixedLength(circuit), n_max, &e, args.paranoid)?;
    let mut s = String::new();
    if args.common.output == OutputArg::Human {
        match &out.status {
            Status::Found(w) => writeln!(s, "SOLUTION {w}").unwrap(),
            Status::NoneExists => writeln!(s, "UNSAT up to {n_max}").unwrap(),
        }
    }
    s.push_str(&out.trace_tsv());
    if args.common.output == OutputArg::Human {
        writeln!(
            s,
            "queries: {} length, {} suffix, {} total",
            out.sweep_queries,
            out.suffix_queries,
            out.total_queries()
        )
        .unwrap();
    }
    Ok(s)
}

fn simulate(args: &QueryArgs) -> Outcome {
    let circuit = read_input(&args.common)?;
    if args.common.mode == Some(ModeArg::Exact) {
        return Err(Failure::usage("simulate reports a probability; --mode exact does not apply"));
    }
    let e = engine(&args.common, &circuit)?;
    let q = query(args, &circuit)?;
    let p = e.probability(&circuit, &q)?;
    Ok(match args.common.output {
        OutputArg::Human => format!("P = {}\n", fmt_g(p, 12)),
        OutputArg::Tsv => format!("n\tsuffix\tP\n{}\t{}\t{}\n", q.n(), q.suffix(), fmt_g(p, 12)),
    })
}

fn cost(args: &QueryArgs) -> Outcome {
    let circuit = read_input(&args.common)?;
    let e = engine(&args.common, &circuit)?;
    let q = query(args, &circuit)?;
    let mode = e.mode_for(&circuit);
    if mode == Mode::Exact {
        let checker = lower_to_network::<BigInt>(&circuit)?;
        cost_report(build_counter(&checker, &q, mode)?.network()?, e.order, args.common.output)
    } else {
        let checker = lower_quantum::<C64>(&circuit.to_quantum())?;
        cost_report(fold_and_merge(&build_counter(&checker, &q, mode)?)?, e.order, args.common.output)
    }
}

fn cost_report<T: Scalar>(
    net: TensorNetwork<T>,
    kind: OrderKind,
    output: OutputArg,
) -> Outcome {
    let Some(pruned) = prune_support(&net)? else {
        return Ok("value is zero by support pruning; nothing to contract\n".into());
    };
    let absorbed = absorb_boundaries(&pruned)?;
    let net = absorbed.net;
    let (order, used) = order_for(&net, kind)?;
    let rep = order_cost(&net, &order)?;
    let peak = rep.peak.max(absorbed.peak);
    Ok(match output {
        OutputArg::Human => format!(
            "order {used}  absorbed {}  tensors {}  steps {}  width {}  cost {}  peak {}\n",
            absorbed.steps,
            net.len(),
            rep.steps.len(),
            fmt_g((peak.max(1) as f64).log2(), 12),
            rep.total + absorbed.cost,
            peak
        ),
        OutputArg::Tsv => rep.to_tsv(),
    })
}

fn verify(args: &VerifyArgs) -> Outcome {
    let circuit = read_input(&args.common)?;
    let e = engine(&args.common, &circuit)?;
    let n = circuit.n_solution();
    let mut s = String::from("check\tsuffix\tengine\toracle\tstatus\n");
    let mut ok = true;
    let mut row = |s: &mut String, check: &str, suffix: &str, engine: String, oracle: String, pass: bool| {
        ok &= pass;
        writeln!(s, "{check}\t{suffix}\t{engine}\t{oracle}\t{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    };
    let suffixes: Vec<BitString> = (0..=args.depth.min(n))
        .flat_map(|len| (0..1u64 << len).map(move |v| BitString::from_u64(v, len)))
        .collect();
    match &circuit {
        Circuit::Boolean(b) if n <= ENUMERATION_LIMIT => {
            for w in &suffixes {
                let q = CountQuery::at(n, w.clone())?;
                let got = e.count(&circuit, &q)?.count;
                let want = BigUint::from(enumerate_count(b, n, w)?);
                row(&mut s, "count", &w.to_string(), got.to_string(), want.to_string(), got == want);
            }
        }
        _ => {
            let qc = circuit.to_quantum();
            if qc.qubits() <= STATE_QUBIT_LIMIT {
                for w in &suffixes {
                    let q = CountQuery::at(n, w.clone())?;
                    let got = e.probability(&circuit, &q)?;
                    let want = dense_count_probability(&qc, n, w)?;
                    row(
                        &mut s,
                        "probability",
                        &w.to_string(),
                        fmt_g(got, 12),
                        fmt_g(want, 12),
                        (got - want).abs() <= 1e-9,
                    );
                }
            } else {
                writeln!(s, "# {} qubits exceed the dense oracle; counts not compared", qc.qubits()).unwrap();
            }
        }
    }
    let qc = circuit.to_quantum();
    let report = if qc.is_permutation() {
        verify_checker(&lower_quantum::<BigInt>(&qc)?, n, args.budget, args.seed)?
    } else {
        verify_checker(&lower_quantum::<C64>(&qc)?, n, args.budget, args.seed)?
    };
    let how = if report.exhaustive { "exhaustive" } else { "sampled" };
    row(
        &mut s,
        "checker",
        "*",
        format!("{} inputs {how}", report.checked),
        format!("{} violations", report.violations.len()),
        report.passed(),
    );
    s.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    if ok {
        Ok(s)
    } else {
        print!("{s}");
        Err(Failure {
            code: 1,
            message: "oracle comparison failed".into(),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).parse_default_env().init();
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Count(a) => count(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Cost(a) => cost(a),
    };
    match out {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
