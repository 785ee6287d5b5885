//! `cqa`: consistency checks, repairs and consistent answers from the
//! command line.
//!
//! Exit status: 0 for a consistent instance or a yes/non-empty answer, 1 for
//! an inconsistent instance or a no/empty answer, 2 on any error.

mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cqa_core::gadgets::{parse_graph_file, SimpleGraph};
use cqa_core::{
    block, build_conflict_hypergraph, consistent_answers, graph_to_database, incremental_answer,
    parse_candidates, parse_constraints, parse_instance, parse_query, parse_updates, repairs,
    rhombus_extension, twin_extension, AnswerMode, AnswerSet, BoundedASpec, ConstraintSet,
    IncrementalError, IncrementalProblem, Instance, Query, RepairError, Semantics, SolveBudget,
    Weight, WeightFn,
};

use output::{Format, Printer};

#[derive(Parser, Debug)]
#[command(
    name = "cqa",
    version,
    about = "Consistent query answering under denial constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Log solver progress to standard error.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report whether an instance satisfies the constraints, listing every
    /// minimal violating set.
    Check {
        instance: PathBuf,
        constraints: PathBuf,
    },
    /// Print the repairs of an instance.
    Repairs {
        instance: PathBuf,
        constraints: PathBuf,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Certain or possible answers to a query; with `--updates`, over the
    /// updated instance using the incremental path.
    Answer {
        instance: PathBuf,
        constraints: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Certain)]
        mode: ModeArg,
        /// Update script applied to the (consistent) instance.
        #[arg(long)]
        updates: Option<PathBuf>,
        #[command(flatten)]
        inc: IncrementalArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Answers over a consistent base instance plus an update script.
    Incremental {
        base: PathBuf,
        constraints: PathBuf,
        updates: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Certain)]
        mode: ModeArg,
        #[command(flatten)]
        inc: IncrementalArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Graph constructions: twin and rhombus extensions, blocks, and the
    /// graph-to-database encoding.
    Gadget {
        #[command(subcommand)]
        gadget: GadgetCommand,
    },
}

#[derive(Subcommand, Debug)]
enum GadgetCommand {
    /// Add a twin of vertex `v`.
    Twin {
        graph: PathBuf,
        #[arg(long)]
        v: u32,
    },
    /// Hang a rhombus from vertex `v`.
    Rhombus {
        graph: PathBuf,
        #[arg(long)]
        v: u32,
    },
    /// The block whose vertex `t` is in every maximum independent set iff
    /// the graph's independence number is `k`.
    Block {
        graph: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Encode the graph as an instance and a denial constraint.
    Encode {
        graph: PathBuf,
        /// Write the instance here instead of standard output.
        #[arg(long)]
        instance_out: Option<PathBuf>,
        /// Write the constraint here instead of standard output.
        #[arg(long)]
        constraints_out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct QueryArgs {
    /// Query text, e.g. `? P(x,y,z)`.
    #[arg(long, short = 'q')]
    query: Option<String>,
    /// File holding the query.
    #[arg(long)]
    query_file: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    #[value(name = "S")]
    S,
    #[value(name = "C")]
    C,
    #[value(name = "WC")]
    Wc,
    #[value(name = "A")]
    A,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Certain,
    Possible,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum WeightFnArg {
    Unit,
    Quadratic,
}

#[derive(Args, Debug)]
struct SemanticsArgs {
    #[arg(long, value_enum, default_value_t = SemanticsArg::C, ignore_case = true)]
    semantics: SemanticsArg,
    /// Candidate values for attribute changes (A semantics).
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Per-change cost (A semantics).
    #[arg(long, value_enum, default_value_t = WeightFnArg::Unit)]
    weight_fn: WeightFnArg,
    /// Quadratic coefficient for one attribute, as `REL.INDEX=WEIGHT`
    /// (repeatable; the default is 1).
    #[arg(long = "alpha", value_name = "REL.INDEX=WEIGHT")]
    alphas: Vec<String>,
    /// Cap on search states explored for A semantics.
    #[arg(long)]
    max_states: Option<usize>,
}

#[derive(Args, Debug)]
struct IncrementalArgs {
    /// Skip the consistency check of the base instance.
    #[arg(long, requires = "updates")]
    force: bool,
    /// Refuse update scripts with at least this many updates per base tuple.
    #[arg(long)]
    max_update_ratio: Option<f64>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Largest conflict hypergraph (in vertices) the solvers accept.
    #[arg(long)]
    budget_vertices: Option<usize>,
    /// Cap on the hitting-set search depth.
    #[arg(long)]
    kmax: Option<usize>,
    /// Wall-clock limit per solver call, in milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> SolveBudget {
        let mut b = SolveBudget::default();
        if let Some(v) = self.budget_vertices {
            b.max_vertices = v;
        }
        if let Some(k) = self.kmax {
            b.max_depth = k;
        }
        b.time_limit = self.time_limit_ms.map(Duration::from_millis);
        b
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses a file, prefixing parse errors with the path so that they read
/// `path:line:col: message`.
fn load<T, E: std::fmt::Display>(
    path: &Path,
    parse: impl FnOnce(&str) -> Result<T, E>,
) -> Result<T> {
    let text = read(path)?;
    parse(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    load(path, parse_instance)
}

/// Loads constraints, declaring any relation they mention that the
/// instance lacks (it is simply empty). Arity clashes are errors.
fn load_constraints(path: &Path, instance: &mut Instance) -> Result<ConstraintSet> {
    let ics = load(path, parse_constraints)?;
    for atom in ics.constraints().iter().flat_map(|c| &c.atoms) {
        instance
            .schema_mut()
            .ensure_relation(&atom.relation, atom.terms.len())
            .with_context(|| format!("{} does not fit the instance schema", path.display()))?;
    }
    Ok(ics)
}

fn load_query(q: &QueryArgs) -> Result<Query> {
    match (&q.query, &q.query_file) {
        (Some(text), _) => parse_query(text).map_err(|e| anyhow::anyhow!("query:{e}")),
        (None, Some(path)) => load(path, parse_query),
        (None, None) => bail!("a query is required"),
    }
}

fn load_graph(path: &Path) -> Result<SimpleGraph> {
    Ok(load(path, parse_graph_file)?.0)
}

fn parse_alpha(s: &str) -> Result<((String, usize), Weight)> {
    let (lhs, w) = s.split_once('=').context("expected REL.INDEX=WEIGHT")?;
    let (rel, idx) = lhs.rsplit_once('.').context("expected REL.INDEX=WEIGHT")?;
    let idx: usize = idx
        .parse()
        .with_context(|| format!("bad attribute index `{idx}`"))?;
    let weight = match w.split_once('/') {
        Some((n, d)) => Weight::new(n.trim().parse()?, d.trim().parse()?),
        None => Weight::integer(
            w.trim()
                .parse()
                .with_context(|| format!("bad weight `{w}`"))?,
        ),
    };
    if !weight.is_positive() {
        bail!("weight `{w}` is not positive");
    }
    Ok(((rel.to_string(), idx), weight))
}

impl SemanticsArgs {
    fn semantics(&self) -> Result<Semantics> {
        if self.semantics != SemanticsArg::A
            && (self.candidates.is_some() || !self.alphas.is_empty())
        {
            bail!("--candidates and --alpha apply to A semantics only");
        }
        Ok(match self.semantics {
            SemanticsArg::S => Semantics::S,
            SemanticsArg::C => Semantics::C,
            SemanticsArg::Wc => Semantics::WeightedC,
            SemanticsArg::A => {
                let path = self
                    .candidates
                    .as_deref()
                    .context("A semantics needs --candidates")?;
                let candidates = load(path, parse_candidates)?;
                let weight_fn = match self.weight_fn {
                    WeightFnArg::Unit => {
                        if !self.alphas.is_empty() {
                            bail!("--alpha needs --weight-fn quadratic");
                        }
                        WeightFn::Unit
                    }
                    WeightFnArg::Quadratic => {
                        let coefficients: BTreeMap<_, _> = self
                            .alphas
                            .iter()
                            .map(|a| parse_alpha(a))
                            .collect::<Result<_>>()?;
                        WeightFn::Quadratic { coefficients }
                    }
                };
                let mut spec = BoundedASpec::new(candidates, weight_fn);
                if let Some(m) = self.max_states {
                    spec.max_states = m;
                }
                Semantics::BoundedA(spec)
            }
        })
    }
}

fn mode(m: ModeArg) -> AnswerMode {
    match m {
        ModeArg::Certain => AnswerMode::Certain,
        ModeArg::Possible => AnswerMode::Possible,
    }
}

fn answer_status(a: &AnswerSet) -> ExitCode {
    if a.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = Printer::new(cli.format);
    match cli.command {
        Command::Check {
            instance,
            constraints,
        } => {
            let mut d = load_instance(&instance)?;
            let ics = load_constraints(&constraints, &mut d)?;
            let h = build_conflict_hypergraph(&d, &ics);
            out.check(&h)?;
            Ok(if h.graph().edges().is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Repairs {
            instance,
            constraints,
            sem,
            budget,
        } => {
            let mut d = load_instance(&instance)?;
            let ics = load_constraints(&constraints, &mut d)?;
            match repairs(&d, &ics, &sem.semantics()?, &budget.budget()) {
                Ok(list) => {
                    out.repairs(&list)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(RepairError::NoRepair) => {
                    out.no_repair()?;
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Answer {
            instance,
            constraints,
            query,
            sem,
            mode: m,
            updates: Some(updates),
            inc,
            budget,
        } => incremental(
            &mut out,
            &instance,
            &constraints,
            &updates,
            &query,
            &sem,
            m,
            &inc,
            &budget,
        ),
        Command::Answer {
            instance,
            constraints,
            query,
            sem,
            mode: m,
            updates: None,
            budget,
            ..
        } => {
            let mut d = load_instance(&instance)?;
            let ics = load_constraints(&constraints, &mut d)?;
            let q = load_query(&query)?;
            let semantics = sem.semantics()?;
            let a = consistent_answers(&d, &ics, &q, &semantics, mode(m), &budget.budget())?;
            out.answers(&a, mode(m), &semantics)?;
            Ok(answer_status(&a))
        }
        Command::Incremental {
            base,
            constraints,
            updates,
            query,
            sem,
            mode: m,
            inc,
            budget,
        } => incremental(
            &mut out,
            &base,
            &constraints,
            &updates,
            &query,
            &sem,
            m,
            &inc,
            &budget,
        ),
        Command::Gadget { gadget } => {
            gadget_command(&mut out, gadget)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn incremental(
    out: &mut Printer,
    base: &Path,
    constraints: &Path,
    updates: &Path,
    query: &QueryArgs,
    sem: &SemanticsArgs,
    m: ModeArg,
    inc: &IncrementalArgs,
    budget: &BudgetArgs,
) -> Result<ExitCode> {
    let mut d = load_instance(base)?;
    let ics = load_constraints(constraints, &mut d)?;
    let seq = load(updates, |t| parse_updates(t, d.schema()))?;
    let q = load_query(query)?;
    let mut p = IncrementalProblem::new(d, seq, ics, q, sem.semantics()?);
    p.budget = budget.budget();
    p.trust_base = inc.force;
    p.max_update_ratio = inc.max_update_ratio;
    let a = match incremental_answer(&p, mode(m)) {
        Err(e @ IncrementalError::BaseInconsistent) => {
            return Err(anyhow::Error::new(e).context("use --force to skip the base check"))
        }
        r => r.context("incremental answering failed")?,
    };
    out.answers(&a, mode(m), &p.semantics)?;
    Ok(answer_status(&a))
}

fn gadget_command(out: &mut Printer, g: GadgetCommand) -> Result<()> {
    let checked = |g: &SimpleGraph, v: u32| -> Result<()> {
        if v >= g.vertex_count() {
            bail!(
                "vertex {v} is not in the graph ({} vertices)",
                g.vertex_count()
            );
        }
        Ok(())
    };
    match g {
        GadgetCommand::Twin { graph, v } => {
            let g = load_graph(&graph)?;
            checked(&g, v)?;
            out.raw(&twin_extension(&g, v).to_string())
        }
        GadgetCommand::Rhombus { graph, v } => {
            let g = load_graph(&graph)?;
            checked(&g, v)?;
            out.raw(&rhombus_extension(&g, v).to_string())
        }
        GadgetCommand::Block { graph, k } => {
            if k == 0 {
                bail!("--k must be at least 1");
            }
            let g = load_graph(&graph)?;
            out.raw(&block(&g, k).to_file())
        }
        GadgetCommand::Encode {
            graph,
            instance_out,
            constraints_out,
        } => {
            let g = load_graph(&graph)?;
            let (db, c) = graph_to_database(&g);
            let db_text = db.to_string();
            let c_text = format!("{c}\n");
            match &instance_out {
                Some(p) => fs::write(p, &db_text)
                    .with_context(|| format!("cannot write {}", p.display()))?,
                None => out.raw(&db_text)?,
            }
            match &constraints_out {
                Some(p) => fs::write(p, &c_text)
                    .with_context(|| format!("cannot write {}", p.display()))?,
                None => out.raw(&c_text)?,
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.trace { "trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
