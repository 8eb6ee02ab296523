use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use curvlab::catalog::{self, Expected};
use curvlab::classify::{ClassifyConfig, Tolerances};
use curvlab::dsl::{parse_metric_source, MetricField};
use curvlab::report::{check_to_json, check_to_text, JsonReport, MetricInfo};
use curvlab::sweep::{classify_at, sample_points};
use curvlab::theorems::{check, CheckId, Status, Subject};

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Classify Riemannian metrics by curvature structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a metric at sample points.
    Classify(RunArgs),
    /// Run one theorem check.
    Verify {
        /// Check id, e.g. T1, PROP, EQ1617.
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Inspect the built-in metrics.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List entries with expected labels and provenance.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print an entry as a metric file.
    Export { name: String },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Built-in metric name.
    #[arg(long, conflicts_with = "file")]
    catalog: Option<String>,
    /// Metric file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random planes per point for model validation.
    #[arg(long, default_value_t = 200)]
    planes: usize,
    #[arg(long)]
    tol_cluster: Option<f64>,
    #[arg(long)]
    tol_label: Option<f64>,
    #[arg(long)]
    tol_distinct: Option<f64>,
    #[arg(long)]
    tol_const: Option<f64>,
    #[arg(long)]
    tol_dep: Option<f64>,
    #[arg(long)]
    json: bool,
    /// Explicit point `x1,...,xn`; repeatable. Replaces sampling.
    #[arg(long = "point", value_name = "X1,...,XN")]
    points: Vec<String>,
}

enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    /// Evaluation failed on valid input.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

struct Source {
    name: String,
    metric: MetricField,
    conformally_euclidean: Option<bool>,
    from_catalog: bool,
}

fn load_catalog(name: &str) -> Result<Source, CliError> {
    let e = catalog::get(name).ok_or_else(|| {
        CliError::Input(format!(
            "unknown catalog entry `{name}`; available: {}",
            catalog::names_list().join(", ")
        ))
    })?;
    Ok(Source {
        name: e.name.to_string(),
        metric: e.metric,
        conformally_euclidean: e.expected.conformally_euclidean,
        from_catalog: true,
    })
}

fn load_file(path: &PathBuf) -> Result<Source, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let metric = parse_metric_source(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
    Ok(Source {
        name: path.display().to_string(),
        metric,
        conformally_euclidean: None,
        from_catalog: false,
    })
}

impl RunArgs {
    fn source(&self) -> Result<Option<Source>, CliError> {
        match (&self.catalog, &self.file) {
            (Some(name), _) => load_catalog(name).map(Some),
            (None, Some(path)) => load_file(path).map(Some),
            (None, None) => Ok(None),
        }
    }

    /// Catalog tolerances for built-in metrics, looser label tolerance for
    /// user files; flags override either.
    fn config(&self, from_catalog: bool) -> Result<ClassifyConfig, CliError> {
        let mut tol = if from_catalog { Tolerances::CATALOG } else { Tolerances::USER };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut tol.cluster, self.tol_cluster);
        set(&mut tol.label, self.tol_label);
        set(&mut tol.distinct, self.tol_distinct);
        set(&mut tol.constant, self.tol_const);
        set(&mut tol.dep, self.tol_dep);
        tol.validate().map_err(CliError::Input)?;
        Ok(ClassifyConfig {
            tol,
            planes: self.planes,
            seed: self.seed,
        })
    }

    fn points(&self, m: &MetricField, seed: u64) -> Result<Vec<Vec<f64>>, CliError> {
        if self.points.is_empty() {
            return Ok(sample_points(m.domain(), self.samples as usize, seed));
        }
        self.points
            .iter()
            .map(|s| {
                let p: Vec<f64> = s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Input(format!("--point `{s}`: {e}")))?;
                if p.len() != m.dim() {
                    return Err(CliError::Input(format!(
                        "--point `{s}` has {} coordinates, metric has {}",
                        p.len(),
                        m.dim()
                    )));
                }
                Ok(p)
            })
            .collect()
    }

    fn sample_count(&self) -> usize {
        if self.points.is_empty() {
            self.samples as usize
        } else {
            self.points.len()
        }
    }

    fn subject(&self, src: Source) -> Result<Subject, CliError> {
        let cfg = self.config(src.from_catalog)?;
        let pts = self.points(&src.metric, cfg.seed)?;
        let report = classify_at(&src.metric, &pts, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(Subject {
            name: src.name,
            report,
            conformally_euclidean: src.conformally_euclidean,
        })
    }
}

fn cmd_classify(args: &RunArgs) -> Result<u8, CliError> {
    let src = args
        .source()?
        .ok_or_else(|| CliError::Input("classify needs --catalog or --file".into()))?;
    let metric = src.metric.clone();
    let subject = args.subject(src)?;
    let out = JsonReport::new(MetricInfo::new(&subject.name, &metric), args.sample_count(), &subject.report);
    if args.json {
        println!("{}", out.to_json());
    } else {
        print!("{}", out.to_text());
    }
    Ok(0)
}

fn cmd_verify(id: &str, args: &RunArgs) -> Result<u8, CliError> {
    let id = CheckId::from_name(id).ok_or_else(|| {
        let ids: Vec<_> = CheckId::ALL.iter().map(|c| c.name()).collect();
        CliError::Input(format!("unknown check `{id}`; available: {}", ids.join(", ")))
    })?;
    let c = check(id);
    let mut subjects = Vec::new();
    let src = args.source()?;
    // A named catalog entry replaces the default subset; a user file joins it.
    if src.as_ref().is_none_or(|s| !s.from_catalog) {
        let cfg = args.config(true)?;
        subjects = c
            .default_subjects(args.samples as usize, &cfg)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    if let Some(src) = src {
        subjects.push(args.subject(src)?);
    }
    let result = c.run(&subjects);
    if args.json {
        println!("{}", check_to_json(&result));
    } else {
        print!("{}", check_to_text(&result));
    }
    Ok(if result.status == Status::Fail { 1 } else { 0 })
}

#[derive(Serialize)]
struct ListEntry<'a> {
    name: &'a str,
    description: &'a str,
    dim: usize,
    coords: &'a [String],
    expected: &'a Expected,
}

fn cmd_catalog(cmd: &CatalogCommand) -> Result<u8, CliError> {
    match cmd {
        CatalogCommand::List { json } => {
            let entries = catalog::entries();
            if *json {
                let list: Vec<ListEntry> = entries
                    .iter()
                    .map(|e| ListEntry {
                        name: e.name,
                        description: e.description,
                        dim: e.metric.dim(),
                        coords: e.metric.coords(),
                        expected: &e.expected,
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&list).expect("serializable"));
            } else {
                for e in &entries {
                    let labels: Vec<_> = e.expected.labels.iter().map(|l| l.name()).collect();
                    println!(
                        "{:<9} n={} {:<11} {}",
                        e.name,
                        e.metric.dim(),
                        format!("{:?}", e.expected.provenance).to_lowercase(),
                        e.description
                    );
                    println!("          expected: {}", labels.join(", "));
                    println!("          {}", e.expected.note);
                }
            }
            Ok(0)
        }
        CatalogCommand::Export { name } => {
            let src = catalog::export(name).ok_or_else(|| CliError::Input(format!("unknown catalog entry `{name}`")))?;
            print!("{src}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Verify { id, run } => cmd_verify(id, run),
        Command::Catalog { command } => cmd_catalog(command),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
