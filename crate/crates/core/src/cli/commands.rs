//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use super::dsl::{parse_classical_formula, parse_formula, parse_sequent};
use super::interp_file::{load_interpretation, load_theory};
use super::report::{provenance, Format, Report, RunConfig, EXIT_INPUT};
use crate::analysis::{
    check_definable_automorphism, check_local_properties, check_normality,
    conceptual_completeness_report, isotropy_at_model, AnalysisBounds, AnalysisError,
    AutomorphismCandidate, Verdict,
};
use crate::definability::{definable_pieces, find_defining_formula, Definability, EquivariantFamily};
use crate::logic::{print_formula, print_sequent, print_theory, well_formed, Context, Formula, Theory};
use crate::models::{enumerate_models_cached, ModelCache, ModelClass, ModelError, SearchLimits};
use crate::prover::{prove, ProofOutcome, ProverBounds};
use crate::spectrum::{closure_leq, param_pool, Env, SpectrumGroupoid, SpectrumPoint};
use crate::transforms::{copower, diagram_theory, morleyize_with, pushout, slice_theory};

#[derive(Debug, Parser)]
#[command(name = "cohere", version, about = "Finite-model workbench for coherent theories")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Largest carrier size; with several sorts the bound applies to each
    /// sort separately, not to the sum.
    #[arg(long, global = true, default_value_t = 4)]
    pub n: usize,
    /// Formula depth for searches over formulas.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Parameter labels per sort in spectrum points.
    #[arg(long, global = true, default_value_t = 3)]
    pub label_budget: usize,
    /// Depth of terms in atomic formulas.
    #[arg(long, global = true, default_value_t = 2)]
    pub term_depth: usize,
    #[arg(long, global = true, default_value_t = 8)]
    pub max_elements: usize,
    #[arg(long, global = true, default_value_t = 500)]
    pub max_firings: usize,
    #[arg(long, global = true, default_value_t = 64)]
    pub max_branches: usize,
    /// Node budget for the countermodel search.
    #[arg(long, global = true, default_value_t = 300_000)]
    pub countermodel_nodes: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory for enumerated model classes.
    #[arg(long, global = true, env = "COHERE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Echoed into reports; every algorithm is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl GlobalOpts {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            depth: self.depth,
            label_budget: self.label_budget,
            term_depth: self.term_depth,
            prover: ProverBounds {
                max_elements: self.max_elements,
                max_firings: self.max_firings,
                max_branches: self.max_branches,
                countermodel_nodes: self.countermodel_nodes,
            },
            format: self.format,
            cache_dir: self.cache_dir.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a theory and report well-formedness diagnostics.
    Check { theory: PathBuf },
    /// Enumerate models up to isomorphism.
    Models {
        theory: PathBuf,
        /// Include the full tables.
        #[arg(long)]
        show: bool,
    },
    /// Run the bounded prover on a sequent `[ctx] lhs |- rhs`.
    Prove {
        theory: PathBuf,
        sequent: String,
        /// Include the rule firing trace.
        #[arg(long)]
        trace: bool,
    },
    /// Print the Morleyization of a theory.
    Morleyize {
        theory: PathBuf,
        /// Extra classical formulas to name.
        #[arg(long = "formula")]
        formulas: Vec<String>,
    },
    /// Print the diagram theory of an enumerated model.
    Diagram {
        theory: PathBuf,
        /// Index of the model in the class at `--n`.
        #[arg(long)]
        model: usize,
        /// Also count the models of the result.
        #[arg(long)]
        count: bool,
    },
    /// Print the slice theory over a formula.
    Slice {
        theory: PathBuf,
        formula: String,
        #[arg(long)]
        count: bool,
    },
    /// Print the pushout of two interpretations with a common source.
    Pushout { left: PathBuf, right: PathBuf },
    /// Print the copower of a theory.
    Copower {
        theory: PathBuf,
        #[arg(long)]
        count: bool,
    },
    /// Build the spectral groupoid of the class at `--n`.
    Spectrum {
        theory: PathBuf,
        /// Emit the specialization preorder as a graph description instead.
        #[arg(long)]
        dot: bool,
        /// Include every point, arrow and closure edge.
        #[arg(long)]
        full: bool,
        /// Closed formulas to evaluate on each component.
        #[arg(long = "sentence")]
        sentences: Vec<String>,
    },
    /// Decide whether point `mu` lies in the closure of point `nu`.
    /// Points are written `MODEL` or `MODEL:k0=1,k1=0`.
    Closure {
        theory: PathBuf,
        mu: String,
        nu: String,
    },
    /// Search for a formula defining an equivariant family.
    Definable {
        theory: PathBuf,
        family: PathBuf,
        /// Also list formulas whose extension lies inside the family.
        #[arg(long)]
        pieces: bool,
    },
    /// Definable automorphisms: the stalk at `--model`, or the sequent
    /// check of a candidate given by `--sigma`, one formula per sort in
    /// context `[y, y', params..]`.
    Isotropy {
        theory: PathBuf,
        #[arg(long, conflicts_with = "sigma")]
        model: Option<usize>,
        #[arg(long)]
        sigma: Vec<String>,
        /// Parameters per stalk candidate.
        #[arg(long, default_value_t = 1)]
        param_budget: usize,
    },
    /// Conceptual completeness diagnostics for an interpretation.
    Compare { interpretation: PathBuf },
    /// Existence and disjunction properties of a theory, or of the diagram
    /// of one of its models.
    Local {
        theory: PathBuf,
        #[arg(long)]
        model: Option<usize>,
    },
}

/// Why a command produced no report.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input; exit status 3.
    Input(String),
    /// A search limit was hit before anything could be said.
    Bound(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::BoundExceeded(m) => Failure::Bound(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Models(m) => m.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    cache: Option<ModelCache>,
}

impl Ctx<'_> {
    fn class(&self, theory: Arc<Theory>) -> Result<ModelClass, Failure> {
        Ok(enumerate_models_cached(
            &theory,
            self.cfg.n,
            SearchLimits::default(),
            self.cache.as_ref(),
        )?)
    }

    fn theory(&self, path: &Path) -> Result<Arc<Theory>, Failure> {
        load_theory(path).map(Arc::new).map_err(Failure::Input)
    }

    fn report(&self, command: &str, inputs: Value) -> Report {
        Report::new(command, inputs, self.cfg)
    }
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Models { .. } => "models",
        Command::Prove { .. } => "prove",
        Command::Morleyize { .. } => "morleyize",
        Command::Diagram { .. } => "diagram",
        Command::Slice { .. } => "slice",
        Command::Pushout { .. } => "pushout",
        Command::Copower { .. } => "copower",
        Command::Spectrum { .. } => "spectrum",
        Command::Closure { .. } => "closure",
        Command::Definable { .. } => "definable",
        Command::Isotropy { .. } => "isotropy",
        Command::Compare { .. } => "compare",
        Command::Local { .. } => "local",
    }
}

fn path(p: &Path) -> Value {
    json!(p.display().to_string())
}

/// What a command prints.
pub enum Output {
    Report(Report),
    /// Raw text, for `spectrum --dot`.
    Text(String),
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let cfg = cli.opts.config();
    cfg.validate().map_err(Failure::Input)?;
    let ctx = Ctx {
        cfg: &cfg,
        cache: cfg.cache_dir.as_ref().map(ModelCache::new),
    };
    let cmd = name(&cli.command);
    let out = match &cli.command {
        Command::Check { theory } => check(&ctx, theory),
        Command::Models { theory, show } => models(&ctx, theory, *show),
        Command::Prove {
            theory,
            sequent,
            trace,
        } => prove_cmd(&ctx, theory, sequent, *trace),
        Command::Morleyize { theory, formulas } => morleyize_cmd(&ctx, theory, formulas),
        Command::Diagram {
            theory,
            model,
            count,
        } => diagram(&ctx, theory, *model, *count),
        Command::Slice {
            theory,
            formula,
            count,
        } => slice(&ctx, theory, formula, *count),
        Command::Pushout { left, right } => pushout_cmd(&ctx, left, right),
        Command::Copower { theory, count } => copower_cmd(&ctx, theory, *count),
        Command::Spectrum {
            theory,
            dot,
            full,
            sentences,
        } => return spectrum(&ctx, theory, *dot, *full, sentences),
        Command::Closure { theory, mu, nu } => closure(&ctx, theory, mu, nu),
        Command::Definable {
            theory,
            family,
            pieces,
        } => definable(&ctx, theory, family, *pieces),
        Command::Isotropy {
            theory,
            model,
            sigma,
            param_budget,
        } => isotropy(&ctx, theory, *model, sigma, *param_budget),
        Command::Compare { interpretation } => compare(&ctx, interpretation),
        Command::Local { theory, model } => local(&ctx, theory, *model),
    };
    match out {
        Ok(r) => Ok(Output::Report(r)),
        Err(Failure::Bound(m)) => Ok(Output::Report(ctx.report(cmd, json!({})).with(
            Verdict::Unknown,
            provenance::UNKNOWN,
            json!({ "error": m }),
        ))),
        Err(e) => Err(e),
    }
}

/// Parses `args` (program name first), runs the command and prints its
/// report to stdout. Returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Output::Report(r)) => {
            print(&r.render(cli.opts.format));
            r.exit_code()
        }
        Ok(Output::Text(t)) => {
            print(&t);
            0
        }
        Err(Failure::Input(m)) | Err(Failure::Bound(m)) => {
            eprintln!("error: {m}");
            EXIT_INPUT
        }
    }
}

fn print(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    let _ = out.flush();
}

fn check(ctx: &Ctx, p: &Path) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let sig = &t.sig;
    let diags = well_formed(&t);
    let funcs: Vec<Value> = sig
        .funcs
        .iter()
        .map(|f| {
            let args: Vec<&str> = f.args.iter().map(|s| sig.sort_name(*s)).collect();
            json!({ "name": f.name, "args": args, "result": sig.sort_name(f.result) })
        })
        .collect();
    let rels: Vec<Value> = sig
        .rels
        .iter()
        .map(|r| {
            let args: Vec<&str> = r.args.iter().map(|s| sig.sort_name(*s)).collect();
            json!({ "name": r.name, "args": args })
        })
        .collect();
    let result = json!({
        "name": t.name,
        "classical": t.classical,
        "sorts": sig.sorts,
        "funcs": funcs,
        "rels": rels,
        "axioms": t.axioms.len(),
        "uses_negation": t.uses_negation(),
        "diagnostics": diags,
    });
    let verdict = if diags.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(ctx
        .report("check", json!({ "theory": path(p) }))
        .with(verdict, provenance::SYNTACTIC, result))
}

fn models(ctx: &Ctx, p: &Path, show: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let class = ctx.class(t)?;
    let list: Vec<Value> = (0..class.len())
        .map(|i| {
            let m = class.get(i);
            let mut v = json!({
                "index": i,
                "sizes": m.sizes(),
                "automorphisms": class.automorphisms(i).len(),
            });
            if show {
                v["structure"] = serde_json::to_value(m.to_data()).expect("structures serialize");
            }
            v
        })
        .collect();
    Ok(ctx.report("models", json!({ "theory": path(p) })).with(
        Verdict::Pass,
        provenance::EXHAUSTIVE,
        json!({ "count": class.len(), "models": list }),
    ))
}

fn prove_cmd(ctx: &Ctx, p: &Path, text: &str, trace: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let s = parse_sequent(&t, text).map_err(|e| Failure::Input(format!("sequent: {e}")))?;
    let outcome = prove(&t, &s, &ctx.cfg.prover).map_err(input)?;
    let mut result = json!({
        "sequent": print_sequent(&t.sig, &s),
        "outcome": outcome.verdict(),
        "firings": outcome.trace().firings(),
    });
    if trace {
        result["trace"] = outcome.trace().to_json();
    }
    let (verdict, prov) = match &outcome {
        ProofOutcome::Proved(_) => (Verdict::Pass, provenance::PROVED),
        ProofOutcome::Countermodel { model, witness, .. } => {
            result["countermodel"] = json!({
                "model": serde_json::to_value(model.to_data()).expect("structures serialize"),
                "witness": witness,
            });
            (Verdict::Fail, provenance::COUNTERMODEL)
        }
        ProofOutcome::Unknown { report, .. } => {
            result["bound"] = serde_json::to_value(report).expect("bound reports serialize");
            (Verdict::Unknown, provenance::UNKNOWN)
        }
    };
    Ok(ctx
        .report("prove", json!({ "theory": path(p), "sequent": text }))
        .with(verdict, prov, result))
}

fn count_models(ctx: &Ctx, t: &Arc<Theory>, result: &mut Value) -> Result<(), Failure> {
    let class = ctx.class(t.clone())?;
    result["models"] = json!(class.len());
    Ok(())
}

fn morleyize_cmd(ctx: &Ctx, p: &Path, formulas: &[String]) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let extra = formulas
        .iter()
        .map(|f| parse_classical_formula(&t.sig, f).map_err(|e| Failure::Input(format!("formula: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let star = morleyize_with(&t, &extra);
    let symbols: Vec<Value> = star
        .symbols
        .iter()
        .map(|s| {
            json!({
                "name": star.theory.sig.rel(s.rel).name,
                "negates": print_formula(&t.sig, &Context::of_sorts(&s.scope), &s.body),
            })
        })
        .collect();
    Ok(ctx
        .report("morleyize", json!({ "theory": path(p), "formulas": formulas }))
        .with(
            Verdict::Pass,
            provenance::CONSTRUCTION,
            json!({ "symbols": symbols, "theory": print_theory(&star.theory) }),
        ))
}

fn diagram(ctx: &Ctx, p: &Path, model: usize, count: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let class = ctx.class(t.clone())?;
    if model >= class.len() {
        return Err(Failure::Input(format!(
            "model {model} out of range: {} models at n = {}",
            class.len(),
            ctx.cfg.n
        )));
    }
    let d = diagram_theory(&t, class.get(model)).map_err(input)?;
    let mut result = json!({
        "base": serde_json::to_value(d.base.to_data()).expect("structures serialize"),
        "theory": print_theory(&d.theory),
    });
    if count {
        count_models(ctx, &d.theory, &mut result)?;
    }
    Ok(ctx
        .report("diagram", json!({ "theory": path(p), "model": model }))
        .with(Verdict::Pass, counted(count), result))
}

fn counted(count: bool) -> &'static str {
    if count {
        provenance::EXHAUSTIVE
    } else {
        provenance::CONSTRUCTION
    }
}

fn slice(ctx: &Ctx, p: &Path, text: &str, count: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let phi = parse_formula(&t.sig, text).map_err(|e| Failure::Input(format!("formula: {e}")))?;
    let s = slice_theory(&t, &phi).map_err(input)?;
    let mut result = json!({ "theory": print_theory(&s.theory) });
    if count {
        count_models(ctx, &s.theory, &mut result)?;
    }
    Ok(ctx
        .report("slice", json!({ "theory": path(p), "formula": text }))
        .with(Verdict::Pass, counted(count), result))
}

fn pushout_cmd(ctx: &Ctx, left: &Path, right: &Path) -> Result<Report, Failure> {
    let i = load_interpretation(left).map_err(Failure::Input)?;
    let j = load_interpretation(right).map_err(Failure::Input)?;
    let po = pushout(&i, &j).map_err(input)?;
    Ok(ctx
        .report("pushout", json!({ "left": path(left), "right": path(right) }))
        .with(
            Verdict::Pass,
            provenance::CONSTRUCTION,
            json!({ "theory": print_theory(&po.theory) }),
        ))
}

fn copower_cmd(ctx: &Ctx, p: &Path, count: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let c = copower(&t);
    let mut result = json!({ "theory": print_theory(&c.theory) });
    if count {
        count_models(ctx, &c.theory, &mut result)?;
    }
    Ok(ctx
        .report("copower", json!({ "theory": path(p) }))
        .with(Verdict::Pass, counted(count), result))
}

fn spectrum(
    ctx: &Ctx,
    p: &Path,
    dot: bool,
    full: bool,
    sentences: &[String],
) -> Result<Output, Failure> {
    let t = ctx.theory(p)?;
    let parsed = sentences
        .iter()
        .map(|s| {
            let f = parse_formula(&t.sig, s).map_err(|e| Failure::Input(format!("sentence: {e}")))?;
            if f.ctx().is_empty() {
                Ok(f)
            } else {
                Err(Failure::Input(format!("sentence `{s}` has free variables")))
            }
        })
        .collect::<Result<Vec<Formula>, _>>()?;
    let class = Arc::new(ctx.class(t)?);
    let g = SpectrumGroupoid::build(class, ctx.cfg.label_budget);
    if dot {
        return Ok(Output::Text(g.to_dot()));
    }
    let components: Vec<Value> = g
        .components(&parsed)
        .iter()
        .map(|c| {
            let mut models: Vec<usize> = c.points.iter().map(|i| g.points[*i].model).collect();
            models.dedup();
            json!({
                "points": c.points.len(),
                "models": models,
                "shared": c.shared.iter().map(|s| sentences[*s].clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut result = json!({
        "params": g.params.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
        "points": g.points.len(),
        "arrows": g.arrow_count(),
        "closure_edges": g.closure_edges().len(),
        "components": components,
    });
    if full {
        result["groupoid"] = g.to_json();
    }
    Ok(Output::Report(
        ctx.report("spectrum", json!({ "theory": path(p), "sentences": sentences }))
            .with(Verdict::Pass, provenance::EXHAUSTIVE, result),
    ))
}

fn parse_point(text: &str, class: &ModelClass, budget: usize) -> Result<SpectrumPoint, Failure> {
    let (m, labels) = text.split_once(':').unwrap_or((text, ""));
    let model: usize = m
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("point `{text}`: expected a model index")))?;
    if model >= class.len() {
        return Err(Failure::Input(format!("point `{text}`: no model {model}")));
    }
    let pool = param_pool(&class.theory.sig, budget);
    let mut env = Env::new();
    for item in labels.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("point `{text}`: expected label=element")))?;
        let param = pool
            .iter()
            .find(|p| p.name == k.trim())
            .ok_or_else(|| Failure::Input(format!("point `{text}`: unknown label `{k}`")))?;
        let v: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("point `{text}`: bad element `{v}`")))?;
        env.insert(param.clone(), v);
    }
    SpectrumPoint::new(model, Arc::new(class.get(model).clone()), env).map_err(input)
}

fn closure(ctx: &Ctx, p: &Path, mu: &str, nu: &str) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let class = ctx.class(t)?;
    let a = parse_point(mu, &class, ctx.cfg.label_budget)?;
    let b = parse_point(nu, &class, ctx.cfg.label_budget)?;
    let report = ctx.report(
        "closure",
        json!({ "theory": path(p), "mu": mu, "nu": nu }),
    );
    Ok(match closure_leq(&a, &b) {
        Some(h) => report.with(
            Verdict::Pass,
            provenance::EXHAUSTIVE,
            json!({ "in_closure": true, "homomorphism": h.maps }),
        ),
        None => report.with(
            Verdict::Fail,
            provenance::EXHAUSTIVE,
            json!({
                "in_closure": false,
                "witness": "no homomorphism from the model of mu to the model of nu respects the labels",
            }),
        ),
    })
}

fn definable(ctx: &Ctx, p: &Path, family: &Path, pieces: bool) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let class = Arc::new(ctx.class(t.clone())?);
    let text = std::fs::read_to_string(family).map_err(|e| Failure::Input(format!("{}: {e}", family.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", family.display())))?;
    let fam = EquivariantFamily::from_json(class, &v).map_err(|e| Failure::Input(format!("{}: {e}", family.display())))?;
    let (d, td) = (ctx.cfg.depth, ctx.cfg.term_depth);
    let outcome = find_defining_formula(&fam, d, td);
    let mut result = json!({ "outcome": outcome.verdict() });
    let (verdict, prov) = match &outcome {
        Definability::Found(f) => {
            result["formula"] = json!(print_formula(&t.sig, f.ctx(), f.body()));
            (Verdict::Pass, provenance::BOUND_VALIDATED)
        }
        Definability::NotEquivariant(w) => {
            result["witness"] = w.to_json();
            (Verdict::Fail, provenance::EXHAUSTIVE)
        }
        Definability::NoneAtBound { .. } => (Verdict::Unknown, provenance::UNKNOWN),
    };
    if pieces && !matches!(outcome, Definability::NotEquivariant(_)) {
        if let Ok(ps) = definable_pieces(&fam, d, td) {
            result["pieces"] = json!({
                "covers": ps.covers,
                "formulas": ps.formulas.iter().map(|f| print_formula(&t.sig, f.ctx(), f.body())).collect::<Vec<_>>(),
            });
        }
    }
    Ok(ctx
        .report("definable", json!({ "theory": path(p), "family": path(family) }))
        .with(verdict, prov, result))
}

fn isotropy(
    ctx: &Ctx,
    p: &Path,
    model: Option<usize>,
    sigma: &[String],
    param_budget: usize,
) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let class = ctx.class(t.clone())?;
    let inputs = json!({ "theory": path(p), "model": model, "sigma": sigma, "param_budget": param_budget });
    if let Some(m) = model {
        if m >= class.len() {
            return Err(Failure::Input(format!("no model {m} at n = {}", ctx.cfg.n)));
        }
        let r = isotropy_at_model(&class, m, ctx.cfg.depth, ctx.cfg.term_depth, param_budget)?;
        let normal = check_normality(&class, &r);
        let verdict = if r.closed && normal.holds { Verdict::Pass } else { Verdict::Fail };
        return Ok(ctx.report("isotropy", inputs).with(
            verdict,
            provenance::EXHAUSTIVE,
            json!({ "stalk": r.to_json(&t.sig), "normality": normal.to_json() }),
        ));
    }
    if sigma.is_empty() {
        return Err(Failure::Input("isotropy needs --model or --sigma".into()));
    }
    let formulas = sigma
        .iter()
        .map(|s| parse_formula(&t.sig, s).map_err(|e| Failure::Input(format!("sigma: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let vars = formulas[0].ctx().vars();
    if vars.len() < 2 {
        return Err(Failure::Input("sigma formulas need the variables y, y' first".into()));
    }
    let params = Context::new(vars[2..].to_vec()).map_err(input)?;
    let cand = AutomorphismCandidate::new(&t.sig, params, formulas)?;
    let check = check_definable_automorphism(&t, &cand, &ctx.cfg.prover, Some(&class))?;
    let prov = match check.verdict {
        Verdict::Pass if check.all_proved() => provenance::PROVED,
        Verdict::Pass => provenance::BOUND_VALIDATED,
        Verdict::Fail => provenance::COUNTERMODEL,
        Verdict::Unknown => provenance::UNKNOWN,
    };
    Ok(ctx.report("isotropy", inputs).with(
        check.verdict,
        prov,
        json!({ "candidate": cand.to_json(&t.sig), "check": check.to_json(&t.sig) }),
    ))
}

fn compare(ctx: &Ctx, p: &Path) -> Result<Report, Failure> {
    let i = load_interpretation(p).map_err(Failure::Input)?;
    let source = ctx.class(i.source.clone())?;
    let target = ctx.class(i.target.clone())?;
    let bounds = AnalysisBounds {
        n: ctx.cfg.n,
        depth: ctx.cfg.depth,
        term_depth: ctx.cfg.term_depth,
        prover: ctx.cfg.prover,
    };
    let r = conceptual_completeness_report(&i, &source, &target, &bounds)?;
    Ok(ctx
        .report("compare", json!({ "interpretation": path(p) }))
        .with(r.verdict(), r.provenance, r.to_json()))
}

fn local(ctx: &Ctx, p: &Path, model: Option<usize>) -> Result<Report, Failure> {
    let t = ctx.theory(p)?;
    let theory = match model {
        Some(m) => {
            let class = ctx.class(t.clone())?;
            if m >= class.len() {
                return Err(Failure::Input(format!("no model {m} at n = {}", ctx.cfg.n)));
            }
            diagram_theory(&t, class.get(m)).map_err(input)?.theory
        }
        None => t,
    };
    let class = ctx.class(theory.clone())?;
    let r = check_local_properties(&theory, &class, ctx.cfg.depth, ctx.cfg.term_depth, &ctx.cfg.prover)?;
    let prov = match r.verdict() {
        Verdict::Pass => provenance::BOUND_VALIDATED,
        Verdict::Fail => provenance::COUNTERMODEL,
        Verdict::Unknown => provenance::UNKNOWN,
    };
    Ok(ctx
        .report("local", json!({ "theory": path(p), "model": model }))
        .with(r.verdict(), prov, r.to_json(&theory.sig)))
}
