//! `nem` — elastic shape matching distances and metric audits.
//!
//! Subcommands: `gen` (shape fixtures), `dist` (pairwise distance), `audit`
//! (axiom and relaxed-triangle checks over a corpus), `retrieve` (k-NN),
//! `demo-robots` (the three-robot triangle-inequality scene), and `sweep-r`
//! (stretch-penalty sweeps as CSV plot data).
//!
//! Exit status: 0 on success, 1 when a strict audit found violations, 2 on
//! usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nem_core::audit::{
    audit_nem_r_bound, check_axioms, default_triples, nem_r_matrix, relaxation_modulus,
    theta_surrogate_nem_sigma, verify_relaxed_triangle, AuditReport, ModulusEstimate,
};
use nem_core::contour::{load_contour, resample_uniform, AttrValue, Contour, FeatureSequence};
use nem_core::cost::{load_cost_model, CostModel, StretchFn};
use nem_core::elastic::{nem_sigma, nem_sigma_cyclic};
use nem_core::retrieval::{
    build_corpus, distance_matrix, knn_query, manifest_from_json, robot_scenario, save_matrix,
    Corpus, ScenePlacement, SceneSpec,
};
use nem_core::shapes::{generate_shape, ShapeKind, ShapeSpec, DEFAULT_SEED};
use nem_core::{save_contour, Contour64, CostModel64};

#[derive(Parser)]
#[command(
    name = "nem",
    version,
    about = "Elastic shape matching distances (NEM family) and metric audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a shape contour and write it as a JSON document.
    Gen(GenArgs),
    /// Compute the elastic distance between two contour files.
    Dist(DistArgs),
    /// Audit metric axioms and relaxed-triangle bounds over a corpus.
    Audit(AuditArgs),
    /// Rank corpus entries by distance to a query contour.
    Retrieve(RetrieveArgs),
    /// Run the three-robot triangle-inequality demonstration.
    DemoRobots(DemoArgs),
    /// Sweep the constant stretch penalty and emit CSV plot data.
    SweepR(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Circle,
    Ellipse,
    RegularPolygon,
    Superellipse,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Radius (circle) or circumradius (regular polygon).
    #[arg(long)]
    radius: Option<f64>,
    /// Semi-axis a (ellipse, superellipse).
    #[arg(long)]
    a: Option<f64>,
    /// Semi-axis b (ellipse, superellipse).
    #[arg(long)]
    b: Option<f64>,
    /// Superellipse exponent.
    #[arg(long)]
    exponent: Option<f64>,
    /// Regular polygon side count.
    #[arg(long)]
    sides: Option<usize>,
    /// Number of boundary sample points.
    #[arg(long)]
    n: usize,
    /// Radial noise amplitude in [0, 1); > 0 perturbs the base shape.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Contour name; defaults to the shape kind.
    #[arg(long)]
    name: Option<String>,
    /// Scalar attribute `name=value`; repeatable.
    #[arg(long = "attr", value_name = "NAME=VALUE")]
    attrs: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Cost-model config JSON; defaults to classic NEM.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Override the stretch penalty with a constant.
    #[arg(long)]
    r: Option<f64>,
    /// Resample both contours to this point count first.
    #[arg(long)]
    resample: Option<usize>,
    /// Minimize over cyclic rotations of the start point of y.
    #[arg(long)]
    cyclic: bool,
    /// Write the optimal mapping in its text fixture form.
    #[arg(long)]
    mapping_out: Option<PathBuf>,
    /// Write the full distance report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Corpus manifest JSON.
    #[arg(long)]
    corpus: PathBuf,
    /// Audit NEM_r against the uniform-case bound 1 + pi/(2r) instead of
    /// NEM_sigma against its endpoint-dependent surrogate.
    #[arg(long)]
    r: Option<f64>,
    /// Check against this constant bound instead of the derived one.
    #[arg(long)]
    theta: Option<f64>,
    /// Triple sample size (exhaustive for small corpora regardless).
    #[arg(long, default_value_t = 200)]
    triples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Exit with status 1 when violations are found.
    #[arg(long)]
    strict: bool,
    /// Write the audit report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RetrieveArgs {
    /// Corpus manifest JSON.
    #[arg(long)]
    corpus: PathBuf,
    /// Query contour JSON; omit to only emit the distance matrix.
    #[arg(long)]
    query: Option<PathBuf>,
    /// Number of neighbors; defaults to the whole corpus.
    #[arg(short)]
    k: Option<usize>,
    /// Write the ranking as CSV (name,distance).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the corpus distance matrix as CSV.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// Robot center x positions, comma separated.
    #[arg(long, default_value = "0,4,8")]
    centers: String,
    /// Robot circle radii, comma separated.
    #[arg(long, default_value = "1,1,1")]
    radii: String,
    /// Robot velocities along the line, comma separated.
    #[arg(long, default_value = "0,0,0")]
    velocities: String,
    /// Evaluation time.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Boundary sample count for the gap dissimilarity.
    #[arg(long, default_value_t = 256)]
    gap_n: usize,
    /// Boundary sample count for NEM_sigma.
    #[arg(long, default_value_t = 64)]
    nem_n: usize,
    /// Write the full scenario report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Sweep range `start:end:step`, inclusive of the end.
    #[arg(long)]
    r: String,
    /// Cost-model config JSON; its stretch kind is overridden per row.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Dist(args) => dist(args),
        Command::Audit(args) => audit(args),
        Command::Retrieve(args) => retrieve(args),
        Command::DemoRobots(args) => demo_robots(args),
        Command::SweepR(args) => sweep_r(args),
    }
}

fn require(value: Option<f64>, flag: &str, kind: &str) -> Result<f64> {
    value.with_context(|| format!("--{flag} is required for --kind {kind}"))
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let base = match args.kind {
        KindArg::Circle => ShapeKind::Circle {
            radius: require(args.radius, "radius", "circle")?,
        },
        KindArg::Ellipse => ShapeKind::Ellipse {
            a: require(args.a, "a", "ellipse")?,
            b: require(args.b, "b", "ellipse")?,
        },
        KindArg::RegularPolygon => ShapeKind::RegularPolygon {
            circumradius: require(args.radius, "radius", "regular-polygon")?,
            sides: args
                .sides
                .context("--sides is required for --kind regular-polygon")?,
        },
        KindArg::Superellipse => ShapeKind::Superellipse {
            a: require(args.a, "a", "superellipse")?,
            b: require(args.b, "b", "superellipse")?,
            exponent: require(args.exponent, "exponent", "superellipse")?,
        },
    };
    let kind = if args.noise > 0.0 {
        ShapeKind::Perturbed {
            base: Box::new(base),
            noise: args.noise,
        }
    } else {
        base
    };
    let spec = ShapeSpec::new(kind, args.n).with_seed(args.seed);
    let mut contour: Contour64 = generate_shape(&spec)?;
    if let Some(name) = args.name {
        contour = contour.renamed(name);
    }
    for attr in &args.attrs {
        let (name, value) = attr
            .split_once('=')
            .with_context(|| format!("bad --attr `{attr}`, expected NAME=VALUE"))?;
        let value: f64 = value
            .parse()
            .with_context(|| format!("bad --attr value in `{attr}`"))?;
        contour = contour.with_attr(name, AttrValue::Scalar(value))?;
    }
    save_contour(&args.out, &contour)?;
    println!("wrote {} ({} points)", args.out.display(), contour.len());
    Ok(ExitCode::SUCCESS)
}

fn load_model(path: &Option<PathBuf>, r: Option<f64>) -> Result<CostModel64> {
    let mut model = match path {
        Some(path) => load_cost_model(path)
            .with_context(|| format!("loading cost model {}", path.display()))?,
        None => CostModel::nem(),
    };
    if let Some(r) = r {
        model = model.with_stretch(StretchFn::Constant(r))?;
    }
    Ok(model)
}

fn load_sequence(path: &Path, resample: Option<usize>) -> Result<FeatureSequence<f64>> {
    let contour: Contour64 =
        load_contour(path).with_context(|| format!("loading contour {}", path.display()))?;
    let contour = match resample {
        Some(n) => resample_uniform(&contour, n)?,
        None => contour,
    };
    Ok(FeatureSequence::from_contour(&contour)?)
}

fn dist(args: DistArgs) -> Result<ExitCode> {
    let model = load_model(&args.model, args.r)?;
    let x = load_sequence(&args.x, args.resample)?;
    let y = load_sequence(&args.y, args.resample)?;

    let (report, rotation) = if args.cyclic {
        let cyclic = nem_sigma_cyclic(&x, &y, &model)?;
        (cyclic.report, Some(cyclic.best_rotation))
    } else {
        (nem_sigma(&x, &y, &model)?, None)
    };

    println!("total {}", report.total);
    println!("stretch_part {}", report.stretch_part);
    println!("distance_part {}", report.distance_part);
    println!("m {}", report.m);
    println!("n {}", report.n);
    if let Some(k) = rotation {
        println!("best_rotation {k}");
    }
    if let Some(path) = &args.mapping_out {
        fs::write(path, report.optimal_mapping.to_text())?;
    }
    if let Some(path) = &args.out {
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        fs::write(path, json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn load_corpus(path: &Path) -> Result<Corpus<f64>> {
    let json =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest = manifest_from_json(&json)?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    Ok(build_corpus(&manifest, base_dir)?)
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    mode: &'a str,
    report: &'a AuditReport<f64>,
    theta_hat: Option<&'a ModulusEstimate<f64>>,
}

fn print_audit_summary(report: &AuditReport<f64>, theta_hat: Option<&ModulusEstimate<f64>>) {
    let ok = |flag: bool| if flag { "OK" } else { "FAIL" };
    println!(
        "identity {}  symmetry {}  nonneg {}",
        ok(report.identity_ok),
        ok(report.symmetry_ok),
        ok(report.nonneg_ok)
    );
    match report.max_ratio {
        Some(ratio) => println!("max_ratio {ratio}"),
        None => println!("max_ratio undefined (all denominators degenerate)"),
    }
    if let Some(bound) = report.bound {
        println!("bound {bound}");
    }
    if let Some(estimate) = theta_hat {
        println!("theta_hat {}", estimate.theta_hat);
    }
    println!("violations {}", report.violations.len());
    for witness in report.violations.iter().take(5) {
        println!(
            "  d({}, {}) = {} exceeds the bound against d({}, {}) + d({}, {}) = {}",
            witness.x, witness.z, witness.lhs, witness.x, witness.y, witness.y, witness.z,
            witness.rhs
        );
    }
}

fn audit(args: AuditArgs) -> Result<ExitCode> {
    let corpus = load_corpus(&args.corpus)?;
    let names = corpus.names();

    let (mode, mut report, theta_hat) = if let Some(r) = args.r {
        let contours: Vec<Contour<f64>> = corpus
            .entries()
            .iter()
            .map(|e| e.contour().clone())
            .collect();
        let report = audit_nem_r_bound(
            &contours,
            r,
            corpus.resample_n(),
            args.triples,
            args.seed,
        )?;
        let (_, matrix) = nem_r_matrix(&contours, r, corpus.resample_n())?;
        let d = |i: usize, j: usize| matrix[i][j];
        let triples = default_triples(names.len(), args.triples, args.seed);
        let estimate = relaxation_modulus(&names, d, &triples).ok();
        ("nem-r-bound", report, estimate)
    } else {
        let matrix = distance_matrix(&corpus)?;
        let d = |i: usize, j: usize| matrix.value(i, j);
        let triples = default_triples(names.len(), args.triples, args.seed);
        let mut thetas = vec![vec![0.0f64; names.len()]; names.len()];
        for (i, row) in thetas.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = theta_surrogate_nem_sigma(
                    corpus.entries()[i].sequence(),
                    corpus.entries()[k].sequence(),
                    corpus.cost_model(),
                )?;
            }
        }
        let report = check_axioms(&names, d, 1e-9)
            .with_triangle(verify_relaxed_triangle(&names, d, &triples, |i, k| {
                thetas[i][k]
            }));
        let estimate = relaxation_modulus(&names, d, &triples).ok();
        ("nem-sigma-extended", report, estimate)
    };

    if let Some(theta) = args.theta {
        let matrix = match args.r {
            Some(r) => {
                let contours: Vec<Contour<f64>> = corpus
                    .entries()
                    .iter()
                    .map(|e| e.contour().clone())
                    .collect();
                nem_r_matrix(&contours, r, corpus.resample_n())?.1
            }
            None => distance_matrix(&corpus)?.values().to_vec(),
        };
        let d = |i: usize, j: usize| matrix[i][j];
        let triples = default_triples(names.len(), args.triples, args.seed);
        report = report.with_triangle(verify_relaxed_triangle(&names, d, &triples, |_, _| theta));
        report.bound = Some(theta);
    }

    println!("audit mode: {mode}");
    print_audit_summary(&report, theta_hat.as_ref());
    if let Some(path) = &args.out {
        let output = AuditOutput {
            mode,
            report: &report,
            theta_hat: theta_hat.as_ref(),
        };
        let mut json = serde_json::to_string_pretty(&output)?;
        json.push('\n');
        fs::write(path, json)?;
    }

    if args.strict && !report.passed() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn retrieve(args: RetrieveArgs) -> Result<ExitCode> {
    let corpus = load_corpus(&args.corpus)?;
    if let Some(path) = &args.matrix_out {
        let matrix = distance_matrix(&corpus)?;
        save_matrix(path, &matrix)?;
        println!("wrote {} ({} entries)", path.display(), matrix.len());
    }
    if let Some(query_path) = &args.query {
        let query: Contour64 = load_contour(query_path)
            .with_context(|| format!("loading query {}", query_path.display()))?;
        let k = args.k.unwrap_or(corpus.len());
        let ranking = knn_query(&corpus, &query, k)?;
        let mut csv = String::from("name,distance\n");
        for (name, distance) in &ranking {
            println!("{name},{distance}");
            csv.push_str(&format!("{name},{distance}\n"));
        }
        if let Some(path) = &args.out {
            fs::write(path, csv)?;
        }
    } else if args.matrix_out.is_none() {
        bail!("nothing to do: pass --query and/or --matrix-out");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_triplet(text: &str, flag: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad --{flag} `{text}`, expected three comma-separated numbers"))?;
    if parts.len() != 3 {
        bail!("--{flag} needs exactly three values, got {}", parts.len());
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn demo_robots(args: DemoArgs) -> Result<ExitCode> {
    let centers = parse_triplet(&args.centers, "centers")?;
    let radii = parse_triplet(&args.radii, "radii")?;
    let velocities = parse_triplet(&args.velocities, "velocities")?;
    let placement = |i: usize| ScenePlacement {
        kind: ShapeKind::Circle { radius: radii[i] },
        center_x: centers[i],
        velocity: velocities[i],
    };
    let scene = SceneSpec {
        green: placement(0),
        blue: placement(1),
        purple: placement(2),
        t: args.t,
        gap_samples: args.gap_n,
        nem_samples: args.nem_n,
    };
    let report = robot_scenario::<f64>(&scene)?;

    let gap = &report.gap_values;
    println!("boundary-gap dissimilarity at t = {}:", args.t);
    println!("  gap(green, blue)   = {}", gap.value(0, 1));
    println!("  gap(blue, purple)  = {}", gap.value(1, 2));
    println!("  gap(green, purple) = {}", gap.value(0, 2));
    let lhs = gap.value(0, 1) + gap.value(1, 2);
    let rhs = gap.value(0, 2);
    if lhs < rhs {
        println!(
            "  triangle inequality VIOLATED: {lhs} = gap(g,b) + gap(b,p) < gap(g,p) = {rhs}"
        );
    } else {
        println!("  triangle inequality holds on this scene ({lhs} >= {rhs})");
    }
    if let Some(estimate) = &report.gap_theta_hat {
        println!("  gap theta_hat = {}", estimate.theta_hat);
    }
    if !report.overlapping_pairs.is_empty() {
        println!("  overlapping at t: {:?}", report.overlapping_pairs);
    }

    println!("NEM_sigma with velocity-scaled stretch:");
    print_audit_summary(&report.nem_sigma_audit, report.theta_hat.as_ref());

    if let Some(path) = &args.out {
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        fs::write(path, json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("bad --r `{text}`, expected start:end:step");
    }
    let start: f64 = parts[0].parse().context("bad range start")?;
    let end: f64 = parts[1].parse().context("bad range end")?;
    let step: f64 = parts[2].parse().context("bad range step")?;
    if !(step > 0.0 && start >= 0.0 && end >= start) {
        bail!("empty or invalid range `{text}`: need start >= 0, end >= start, step > 0");
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn sweep_r(args: SweepArgs) -> Result<ExitCode> {
    let rs = parse_range(&args.r)?;
    let base = load_model(&args.model, None)?;
    let x = load_sequence(&args.x, None)?;
    let y = load_sequence(&args.y, None)?;

    let mut csv = String::from("r,total,stretch_part,distance_part\n");
    for &r in &rs {
        let model = base.clone().with_stretch(StretchFn::Constant(r))?;
        let report = nem_sigma(&x, &y, &model)?;
        csv.push_str(&format!(
            "{r},{},{},{}\n",
            report.total, report.stretch_part, report.distance_part
        ));
    }
    fs::write(&args.out, csv)?;
    println!("wrote {} ({} rows)", args.out.display(), rs.len());
    Ok(ExitCode::SUCCESS)
}
