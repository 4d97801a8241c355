use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rado_walk::chain::{
    check_reversibility, evolve, evolve_exact, kernel_row, kernel_row_exact, MixingTime, TvEngine, DEFAULT_CURVE_CAP,
};
use rado_walk::graph::{check_event_b, estimate_prob_b, find_lowerbound_sequence, verify_tree, GraphOracle};
use rado_walk::hardy::{
    gap_bounds, hardy_b, hardy_c, hardy_sandwich, path_series, rado_hardy_bracket, rado_measured_tree, random_measured_tree,
    MeasuredTree, TopScope, DEFAULT_ENUMERATION_CAP,
};
use rado_walk::measure::WeightFamily;
use rado_walk::numerics::{log_star, ExactRational, LogStarConvention};
use rado_walk::report::{csv, output_dir, write_outputs, ModelDescriptor, RunManifest};
use rado_walk::spectral::{
    cheeger_constant, cheeger_sandwich_check, counterexample_eps, counterexample_generator, dirichlet_eigenvalue,
    pruned_tree_generator, random_reversible_generator, random_tree_generator, spanning_tree_iota_max, tree_cheeger_rado,
    truncate_chain, CheegerStrategy, SpanningMode, SubMarkovGenerator, Truncation,
};
use rado_walk::verify::{run_criterion, Status, CRITERIA};
use rado_walk::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_UNDETERMINED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "rado-walk", version, about = "Ball walk on the Rado graph and seeded G(inf, p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Binary)]
    model: ModelKind,
    /// Edge probability of the random model.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Required for the random model.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Binary,
    Random,
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Geometric weight ratio, as `num/den` or a decimal.
    #[arg(long, default_value = "1/2")]
    delta: ExactRational,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, value_enum, default_value_t = Family::Random)]
    family: Family,
    /// States for `random`, `random-tree` and `counterexample`.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.35)]
    density: f64,
    /// Window for `rado` and `pruned`.
    #[arg(long, default_value_t = 64)]
    cap: u64,
    #[arg(long, default_value = "pinned-root")]
    truncation: Truncation,
    #[arg(long, default_value = "1/2")]
    delta: ExactRational,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Family {
    /// Seeded random reversible generator.
    Random,
    /// Seeded random tree-shaped generator.
    RandomTree,
    /// Two-layer family with `eps = 1/(4n)`, in exact arithmetic.
    Counterexample,
    /// Binary Rado walk truncated to a window.
    Rado,
    /// Parent tree of the binary Rado graph on `1..=cap`.
    Pruned,
}

#[derive(Args, Clone)]
struct TreeArgs {
    #[arg(long, value_enum, default_value_t = TreeSource::Random)]
    tree: TreeSource,
    /// Non-root vertices of a random tree.
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Random measures are log-uniform over this many decades each way.
    #[arg(long, default_value_t = 3.0)]
    decades: f64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 8)]
    breadth: usize,
    #[arg(long, default_value = "1/2")]
    delta: ExactRational,
    /// JSON file with `parent` (null for the root), `mu` and `nu` arrays.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum TreeSource {
    Random,
    Rado,
    File,
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Single value; omit to sweep.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    from: f64,
    #[arg(long, default_value_t = 0.95)]
    to: f64,
    #[arg(long, default_value_t = 19)]
    points: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Neighbors of `x` up to `cap`, with parent and children.
    Neighbors {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 64)]
        cap: u64,
    },
    /// One row of the transition kernel.
    KernelRow {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 64)]
        cap: u64,
        #[arg(long)]
        exact: bool,
    },
    /// Law of the walk after `steps` steps from `x0`.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        x0: u64,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 256)]
        cap: u64,
        #[arg(long)]
        exact: bool,
    },
    /// Total-variation bracket to stationarity per step.
    TvCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        x0: u64,
        #[arg(long, default_value_t = 60)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_CURVE_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// First step whose TV upper bound is at most the threshold.
    MixTime {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        x0: u64,
        #[arg(long, default_value_t = 0.25)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_CURVE_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 200)]
        max_steps: u64,
    },
    /// Exact detailed balance on `[0, cap]^2`.
    Reversibility {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = 64)]
        cap: u64,
    },
    /// Whether every vertex in `[1, n_max]` has a smaller neighbor.
    EventB {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
    },
    /// Probability of that event: product, series and Monte Carlo over seeds.
    ProbB {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Whether parent links on `[1, n_max]` form a tree.
    TreeCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4096)]
        n_max: u64,
    },
    /// Fast-growing sequence with private parents.
    LowerboundSeq {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        x0: u64,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
    },
    /// Dirichlet-Cheeger constant of a generator.
    Cheeger {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long, default_value = "exhaustive")]
        strategy: CheegerStrategy,
    },
    /// Bottom Dirichlet eigenvalue of a generator.
    Eigen {
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// `iota^2 / (2 ell) <= lambda <= iota`.
    Sandwich {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long, default_value = "exhaustive")]
        strategy: CheegerStrategy,
    },
    /// Two-layer family: Cheeger constant against its spanning trees.
    Counterexample {
        #[arg(long)]
        n: usize,
        /// Defaults to `1/(4n)`.
        #[arg(long)]
        eps: Option<ExactRational>,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact Cheeger ratios of the parent tree's subtrees.
    TreeCheeger {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = 1 << 12)]
        a_max: u64,
    },
    /// Combinatorial Hardy constant `b`.
    HardyB {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value = "all")]
        scope: TopScope,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        enumeration_cap: usize,
    },
    /// Best Hardy constant `c` with its maximizer.
    HardyC {
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// `b <= c <= 16 b`, with root-child tops and with every top.
    HardySandwich {
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Path series of the parent tree.
    #[command(name = "rado-C")]
    RadoC {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Bracket on the Hardy supremum of the parent tree.
    #[command(name = "rado-A")]
    RadoA {
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 16)]
        breadth: usize,
    },
    /// Analytic spectral-gap lower bounds.
    GapBounds {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Iterated logarithm.
    Logstar {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        #[arg(long, default_value = "at-most-one")]
        convention: LogStarConvention,
    },
    /// Runs the acceptance suite.
    VerifyAll {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// What a command produced: text for stdout, its file extension, and the exit code.
struct Output {
    text: String,
    ext: &'static str,
    code: u8,
}

impl Output {
    fn json(v: &impl Serialize) -> Self {
        Self { text: serde_json::to_string_pretty(v).expect("serializable") + "\n", ext: "json", code: 0 }
    }

    fn csv(text: String) -> Self {
        Self { text, ext: "csv", code: 0 }
    }

    fn verdict(mut self, pass: bool) -> Self {
        self.code = if pass { 0 } else { EXIT_FAIL };
        self
    }
}

fn oracle(m: &ModelArgs) -> rado_walk::Result<(GraphOracle, ModelDescriptor)> {
    match m.model {
        ModelKind::Binary => Ok((GraphOracle::binary(), ModelDescriptor::Binary)),
        ModelKind::Random => {
            let seed = m.seed.ok_or_else(|| Error::Parse("--seed is required with --model random".into()))?;
            Ok((GraphOracle::random(m.p, seed)?, ModelDescriptor::Random { p: m.p, seed }))
        }
    }
}

fn weights(w: &WeightArgs) -> rado_walk::Result<WeightFamily> {
    WeightFamily::geometric(w.delta.clone())
}

enum Generator {
    Exact(SubMarkovGenerator<ExactRational>),
    Float(SubMarkovGenerator<f64>),
}

fn need_seed(seed: Option<u64>, what: &str) -> rado_walk::Result<u64> {
    seed.ok_or_else(|| Error::Parse(format!("--seed is required for {what}")))
}

fn generator(a: &GeneratorArgs) -> rado_walk::Result<Generator> {
    Ok(match a.family {
        Family::Random => Generator::Float(random_reversible_generator(a.n, a.density, need_seed(a.seed, "random generators")?)?),
        Family::RandomTree => Generator::Float(random_tree_generator(a.n, need_seed(a.seed, "random generators")?)?),
        Family::Counterexample => Generator::Exact(counterexample_generator(a.n, &counterexample_eps(a.n))?),
        Family::Rado => {
            let w = WeightFamily::geometric(a.delta.clone())?;
            Generator::Float(truncate_chain(&GraphOracle::binary(), &w, a.cap, a.truncation)?)
        }
        Family::Pruned => Generator::Float(pruned_tree_generator(&WeightFamily::geometric(a.delta.clone())?, a.cap)?),
    })
}

#[derive(serde::Deserialize)]
struct TreeFile {
    parent: Vec<Option<usize>>,
    mu: Vec<f64>,
    nu: Vec<f64>,
}

fn measured_tree(a: &TreeArgs) -> rado_walk::Result<MeasuredTree<f64>> {
    match a.tree {
        TreeSource::Random => random_measured_tree(a.n, a.decades, need_seed(a.seed, "random trees")?),
        TreeSource::Rado => Ok(rado_measured_tree(&WeightFamily::geometric(a.delta.clone())?, a.depth, a.breadth)?.tree),
        TreeSource::File => {
            let path = a.file.as_ref().ok_or_else(|| Error::Parse("--file is required with --tree file".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let f: TreeFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            MeasuredTree::new(f.parent, f.mu, f.nu)
        }
    }
}

fn sweep_points(s: &SweepArgs) -> rado_walk::Result<Option<Vec<f64>>> {
    if s.delta.is_some() {
        return Ok(None);
    }
    if s.points < 2 || !(s.from < s.to) {
        return Err(Error::Parse("a sweep needs --points >= 2 and --from < --to".into()));
    }
    let step = (s.to - s.from) / (s.points - 1) as f64;
    Ok(Some((0..s.points).map(|i| s.from + step * i as f64).collect()))
}

fn mixing_json(m: &MixingTime) -> Output {
    let mut out = Output::json(m);
    if matches!(m, MixingTime::Undetermined { .. }) {
        out.code = EXIT_UNDETERMINED;
    }
    out
}

fn run(cmd: &Command, manifest: &mut RunManifest) -> rado_walk::Result<Output> {
    let mut cap = |name: &str, v: u64| {
        manifest.caps.insert(name.to_string(), v);
    };
    Ok(match cmd {
        Command::Neighbors { model, x, cap: c } => {
            cap("cap", *c);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            let parent = if *x == 0 { None } else { Some(g.parent(*x)?) };
            Output::json(&json!({
                "x": x, "cap": c, "neighbors": g.neighbors_up_to(*x, *c), "parent": parent, "children": g.children_up_to(*x, *c),
            }))
        }
        Command::KernelRow { model, weights: wa, x, cap: c, exact } => {
            cap("cap", *c);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            let w = weights(wa)?;
            if *exact {
                let row = kernel_row_exact(&g, &w, *x, *c)?;
                let entries: Vec<Value> = row
                    .window
                    .iter()
                    .map(|&j| match row.entry_value(j) {
                        Some(v) => json!({ "j": j, "value": v }),
                        None => json!({ "j": j, "value": row.entry(j).to_string(), "lower": row.entry_lower(j) }),
                    })
                    .collect();
                Output::json(&json!({
                    "source": row.source, "cap": row.cap, "materialized": row.is_materialized(), "entries": entries,
                    "tail": row.tail().to_string(), "sums_to_one": row.sums_to_one(),
                }))
            } else {
                Output::json(&kernel_row(&g, &w, *x, *c)?)
            }
        }
        Command::Evolve { model, weights: wa, x0, steps, cap: c, exact } => {
            cap("cap", *c);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            let w = weights(wa)?;
            if *exact {
                Output::json(&evolve_exact(&g, &w, *x0, *steps, *c)?)
            } else {
                Output::json(&evolve(&g, &w, *x0, *steps, *c)?)
            }
        }
        Command::TvCurve { model, weights: wa, x0, steps, cap: c, format } => {
            cap("cap", *c);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            let curve = TvEngine::new(&g, &weights(wa)?, *c)?.curve(*x0, *steps)?;
            if *format == Format::Json {
                Output::json(&curve)
            } else {
                let rows = curve.points.iter().map(|p| vec![p.step.to_string(), p.lo.to_string(), p.hi.to_string(), p.escaped.to_string()]);
                Output::csv(csv(&["step", "tv_lo", "tv_hi", "escaped"], rows))
            }
        }
        Command::MixTime { model, weights: wa, x0, threshold, cap: c, max_steps } => {
            cap("cap", *c);
            cap("max_steps", *max_steps);
            manifest.tolerances.insert("threshold".into(), *threshold);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            mixing_json(&TvEngine::new(&g, &weights(wa)?, *c)?.mixing_time(*x0, *threshold, *max_steps)?)
        }
        Command::Reversibility { model, weights: wa, cap: c } => {
            cap("cap", *c);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            let rep = check_reversibility(&g, &weights(wa)?, *c)?;
            Output::json(&rep).verdict(rep.holds)
        }
        Command::EventB { model, n_max } => {
            cap("n_max", *n_max);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            let rep = check_event_b(&g, *n_max);
            Output::json(&rep).verdict(rep.holds)
        }
        Command::ProbB { p, n_max, samples } => {
            cap("n_max", *n_max);
            cap("samples", *samples);
            Output::json(&estimate_prob_b(*p, *n_max, *samples)?)
        }
        Command::TreeCheck { model, n_max } => {
            cap("n_max", *n_max);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            let rep = verify_tree(&g, *n_max);
            Output::json(&rep).verdict(rep.is_tree)
        }
        Command::LowerboundSeq { model, x0, steps, budget } => {
            cap("budget", *budget);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            let seq = find_lowerbound_sequence(&g, *x0, *steps, *budget)?;
            let complete = seq.stopped.is_none();
            let mut out = Output::json(&seq);
            if !complete {
                out.code = EXIT_UNDETERMINED;
            }
            out
        }
        Command::Cheeger { generator: ga, strategy } => match generator(ga)? {
            Generator::Exact(l) => Output::json(&cheeger_constant(&l, *strategy)?),
            Generator::Float(l) => Output::json(&cheeger_constant(&l, *strategy)?),
        },
        Command::Eigen { generator: ga } => match generator(ga)? {
            Generator::Exact(l) => Output::json(&dirichlet_eigenvalue(&l)?),
            Generator::Float(l) => Output::json(&dirichlet_eigenvalue(&l)?),
        },
        Command::Sandwich { generator: ga, strategy } => {
            let rep = match generator(ga)? {
                Generator::Exact(l) => cheeger_sandwich_check(&l, *strategy)?,
                Generator::Float(l) => cheeger_sandwich_check(&l, *strategy)?,
            };
            Output::json(&rep).verdict(rep.pass)
        }
        Command::Counterexample { n, eps, samples, seed } => {
            let eps = eps.clone().unwrap_or_else(|| counterexample_eps(*n));
            let l = counterexample_generator(*n, &eps)?;
            let iota = cheeger_constant(&l, CheegerStrategy::Exhaustive)?.iota;
            let mode = if *n <= 3 {
                SpanningMode::Exhaustive
            } else {
                SpanningMode::Witness { samples: *samples, seed: *seed }
            };
            let trees = spanning_tree_iota_max(&l, mode)?;
            let ratio = trees.upper_bound.checked_div(&iota)?;
            let pass = trees.upper_bound <= eps && ratio <= ExactRational::ratio(1, *n as i64);
            Output::json(&json!({
                "n": n, "eps": eps, "iota": iota, "tree_max_upper": trees.upper_bound, "ratio_upper": ratio,
                "mode": trees.mode, "trees_examined": trees.trees_examined, "exact": trees.exact, "pass": pass,
            }))
            .verdict(pass)
        }
        Command::TreeCheeger { model, weights: wa, a_max } => {
            cap("a_max", *a_max);
            let (g, d) = oracle(model)?;
            manifest.model = d;
            manifest.delta = Some(wa.delta.to_string());
            let rep = tree_cheeger_rado(&g, &weights(wa)?, *a_max)?;
            Output::json(&rep).verdict(rep.holds)
        }
        Command::HardyB { tree, scope, enumeration_cap } => {
            cap("enumeration_cap", *enumeration_cap as u64);
            let t = measured_tree(tree)?;
            Output::json(&json!({ "tree_digest": t.digest(), "scope": scope, "b": hardy_b(&t, *scope, *enumeration_cap)? }))
        }
        Command::HardyC { tree } => {
            let t = measured_tree(tree)?;
            Output::json(&json!({ "tree_digest": t.digest(), "c": hardy_c(&t)? }))
        }
        Command::HardySandwich { tree } => {
            let rep = hardy_sandwich(&measured_tree(tree)?)?;
            Output::json(&rep).verdict(rep.pass)
        }
        Command::RadoC { sweep } => match sweep_points(sweep)? {
            None => Output::json(&path_series(sweep.delta.expect("single value"))?),
            Some(ds) => {
                let rows = ds
                    .iter()
                    .map(|&d| {
                        let s = path_series(d)?;
                        Ok(vec![d.to_string(), s.value.to_string(), s.tail_bound.to_string(), s.closed_form_bound.to_string()])
                    })
                    .collect::<rado_walk::Result<Vec<_>>>()?;
                Output::csv(csv(&["delta", "series", "tail_bound", "closed_form_bound"], rows))
            }
        },
        Command::RadoA { delta, depth, breadth } => {
            cap("depth", *depth as u64);
            cap("breadth", *breadth as u64);
            Output::json(&rado_hardy_bracket(*delta, *depth, *breadth)?)
        }
        Command::GapBounds { sweep } => match sweep_points(sweep)? {
            None => Output::json(&gap_bounds(sweep.delta.expect("single value"))?),
            Some(ds) => {
                let rows = ds
                    .iter()
                    .map(|&d| {
                        let g = gap_bounds(d)?;
                        Ok([d, g.cheeger, g.hardy, g.hardy_chained, g.series, g.walk_factor].iter().map(f64::to_string).collect())
                    })
                    .collect::<rado_walk::Result<Vec<_>>>()?;
                Output::csv(csv(&["delta", "cheeger", "hardy", "hardy_chained", "series", "walk_factor"], rows))
            }
        },
        Command::Logstar { x, base, convention } => {
            Output::json(&json!({ "x": x, "base": base, "convention": convention, "value": log_star(*x, *base, *convention)? }))
        }
        Command::VerifyAll { only, format } => {
            let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.clone() };
            let mut reports = Vec::new();
            for id in ids {
                let r = run_criterion(id)?;
                eprintln!("{}", r.line());
                reports.push(r);
            }
            let code = if reports.iter().any(|r| r.status == Status::Fail) {
                EXIT_FAIL
            } else if reports.iter().any(|r| r.status == Status::Undetermined) {
                EXIT_UNDETERMINED
            } else {
                0
            };
            // timings stay on stderr so reruns emit identical bytes
            let mut out = if *format == Format::Json {
                let rows: Vec<Value> = reports
                    .iter()
                    .map(|r| json!({ "id": r.id, "title": r.title, "status": r.status, "detail": r.detail }))
                    .collect();
                Output::json(&rows)
            } else {
                let rows = reports.iter().map(|r| {
                    vec![r.id.to_string(), r.status.label().into(), format!("\"{}\"", r.title), format!("\"{}\"", r.detail.replace('"', "'"))]
                });
                Output::csv(csv(&["id", "status", "title", "detail"], rows))
            };
            out.code = code;
            out
        }
    })
}

fn main() -> ExitCode {
    let parsed = Cli::command().try_get_matches().and_then(|m| Ok((Cli::from_arg_matches(&m)?, m)));
    let (cli, matches) = match parsed {
        Ok(v) => v,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let name = matches.subcommand_name().unwrap_or("run").to_string();
    let mut manifest = RunManifest::new(&name, std::env::args().skip(2).collect(), ModelDescriptor::None);
    let start = Instant::now();
    let out = match run(&cli.command, &mut manifest) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::Parse(_) | Error::Domain(_) => EXIT_USAGE,
                Error::BudgetExhausted { .. } | Error::EnumerationCap { .. } | Error::CapTooSmall { .. } => EXIT_UNDETERMINED,
                _ => EXIT_FAIL,
            });
        }
    };
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    print!("{}", out.text);
    let file = format!("{name}.{}", out.ext);
    manifest.record_output(&file, out.text.as_bytes());
    match output_dir() {
        Ok(Some(dir)) => {
            if let Err(e) = write_outputs(&dir, &file, out.text.as_bytes(), &manifest) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_FAIL);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    ExitCode::from(out.code)
}
