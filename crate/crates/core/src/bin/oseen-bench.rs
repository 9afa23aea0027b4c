use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oseen_afem::bench::{run_benchmark, BenchmarkSpec, ProblemKind};
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::io::{write_mesh_dump, write_vtk};
use oseen_afem::mesh::build_unit_square;
use oseen_afem::pipeline::{oseen_parameters, RunOptions};
use oseen_afem::assembly::{apply_dirichlet, assemble, Convection};
use oseen_afem::Result;

#[derive(Parser)]
#[command(name = "oseen-bench", version, about = "Stabilized Oseen / Navier-Stokes convergence and adaptivity studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smooth Oseen benchmark with sigma = 1 and b = u.
    OseenSmooth(StudyArgs),
    /// Oseen benchmark with boundary layers at x = 1 and y = 1.
    OseenLayer(StudyArgs),
    /// Steady Navier-Stokes with the smooth solution, solved by Picard iteration.
    NseSmooth(StudyArgs),
    /// Print mesh statistics of a uniform level.
    MeshInfo(MeshArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// TOML file with a study description; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Element pair, repeatable (P1/P1, P2/P2, P3/P3, P2/P1, P3/P2).
    #[arg(long)]
    pair: Vec<SpacePair>,
    /// Viscosity, repeatable.
    #[arg(long)]
    nu: Vec<f64>,
    /// Finest uniform level, or number of adaptive solves.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    min_level: Option<usize>,
    #[arg(long)]
    adaptive: bool,
    #[arg(long)]
    initial_level: Option<usize>,
    /// Marking parameter: fraction of the maximum, or the bulk fraction for Dörfler marking.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    vtk: bool,
    #[arg(long)]
    quad_degree: Option<usize>,
    #[arg(long)]
    c_inv: Option<f64>,
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Record the interpolation hypotheses in report.json.
    #[arg(long)]
    hypotheses: bool,
    /// Write the Dirichlet-reduced system of the finest level as Matrix Market.
    #[arg(long)]
    dump_system: bool,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Write the mesh as VTK to this file.
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Write vertices and cells as plain text to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl StudyArgs {
    fn spec(&self, problem: ProblemKind) -> Result<BenchmarkSpec> {
        let mut spec = match &self.config {
            Some(path) => BenchmarkSpec::from_toml_file(path)?,
            None => BenchmarkSpec::default(),
        };
        spec.problem = problem;
        if !self.pair.is_empty() {
            spec.pairs = self.pair.clone();
        }
        if !self.nu.is_empty() {
            spec.nu = self.nu.clone();
        }
        spec.levels = self.levels.unwrap_or(spec.levels);
        spec.min_level = self.min_level.unwrap_or(spec.min_level);
        spec.adaptive |= self.adaptive;
        spec.initial_level = self.initial_level.unwrap_or(spec.initial_level);
        spec.theta = self.theta.unwrap_or(spec.theta);
        spec.out = self.out.clone().or(spec.out);
        spec.vtk |= self.vtk;
        spec.quad_degree = self.quad_degree.or(spec.quad_degree);
        spec.c_inv = self.c_inv.unwrap_or(spec.c_inv);
        spec.solver_tol = self.solver_tol.unwrap_or(spec.solver_tol);
        spec.hypotheses |= self.hypotheses;
        Ok(spec)
    }
}

fn study(problem: ProblemKind, args: &StudyArgs) -> Result<()> {
    let spec = args.spec(problem)?;
    let report = run_benchmark(&spec)?;
    println!(
        "{:<13} {:<6} {:>9} {:>5} {:>8} {:>11} {:>11} {:>7} {:>6}",
        "problem", "pair", "nu", "level", "dofs", "err_spg", "eta", "eff", "order"
    );
    let fmt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.p$e}"));
    for r in &report.records {
        let row = &r.row;
        println!(
            "{:<13} {:<6} {:>9.1e} {:>5} {:>8} {:>11} {:>11} {:>7} {:>6}",
            row.problem,
            row.pair,
            row.nu,
            row.level,
            row.dofs,
            fmt(row.err_spg, 3),
            fmt(row.eta, 3),
            row.effectivity.map_or("-".into(), |x| format!("{x:.2}")),
            row.order.map_or("-".into(), |x| format!("{x:.2}")),
        );
        if let Some(f) = &r.failure {
            println!("  failed: {f}");
        }
    }
    if args.dump_system {
        dump_system(&spec)?;
    }
    Ok(())
}

fn dump_system(spec: &BenchmarkSpec) -> Result<()> {
    let dir = spec.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let opts = RunOptions::default();
    for &pair in &spec.pairs {
        for &nu in &spec.nu {
            let data = spec.problem.data(nu);
            let disc = Discretization::new(build_unit_square(spec.levels), pair)?;
            let params = oseen_parameters(&disc, &data, opts.constants)?;
            let mut system = assemble(&disc, &data, &params, Convection::Field(&data.b), &opts.assembly)?;
            apply_dirichlet(&mut system, &disc, &data);
            let stem = format!("system_{}_nu{nu:e}", pair.to_string().replace('/', ""));
            system.dump_matrix_market(&dir, &stem)?;
        }
    }
    Ok(())
}

fn mesh_info(args: &MeshArgs) -> Result<()> {
    let mesh = build_unit_square(args.levels);
    mesh.validate()?;
    println!("level        {}", args.levels);
    println!("vertices     {}", mesh.n_vertices());
    println!("cells        {}", mesh.n_cells());
    println!("facets       {}", mesh.n_facets());
    println!("h            {:.6e}", mesh.max_diameter());
    println!("shape ratio  {:.6}", mesh.max_shape_ratio());
    println!("area         {:.15}", mesh.total_area());
    for pair in SpacePair::STUDY_PAIRS {
        let disc = Discretization::new(mesh.clone(), pair)?;
        println!("dofs {:<7} {}", pair.to_string(), disc.layout().n_dofs());
    }
    if let Some(path) = &args.vtk {
        write_vtk(BufWriter::new(File::create(path)?), &mesh, &[])?;
    }
    if let Some(path) = &args.out {
        write_mesh_dump(BufWriter::new(File::create(path)?), &mesh)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::OseenSmooth(a) => study(ProblemKind::OseenSmooth, a),
        Command::OseenLayer(a) => study(ProblemKind::OseenLayer, a),
        Command::NseSmooth(a) => study(ProblemKind::NseSmooth, a),
        Command::MeshInfo(a) => mesh_info(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
