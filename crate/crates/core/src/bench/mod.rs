//! Convergence and adaptivity studies on the benchmark problems, written as
//! `report.csv` and `report.json`.

pub mod problems;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptivity::{adaptive_loop, AdaptiveConfig, Marking};
use crate::assembly::{AssemblyOptions, DiscreteSolution};
use crate::error::{Error, Result};
use crate::estimator::{effectivity, ErrorEstimate, HypothesisReport, NormReport};
use crate::fem::{Discretization, SpacePair};
use crate::io::write_solution_vtk;
use crate::mesh::build_unit_square;
use crate::navier_stokes::{nse_estimate, nse_parameters, picard_solve, spg_nse_norm, InitialGuess, PicardConfig};
use crate::pipeline::{OseenRun, RunOptions};
use crate::problem::ProblemData;
use crate::solver::SolverConfig;
use crate::stabilization::StabilizationConstants;

use self::problems::{problem_nse_smooth, problem_oseen_layer, problem_oseen_smooth};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    OseenSmooth,
    OseenLayer,
    NseSmooth,
}

impl ProblemKind {
    pub fn data(&self, nu: f64) -> ProblemData {
        match self {
            ProblemKind::OseenSmooth => problem_oseen_smooth(nu),
            ProblemKind::OseenLayer => problem_oseen_layer(nu),
            ProblemKind::NseSmooth => problem_nse_smooth(nu),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::OseenSmooth => "oseen-smooth",
            ProblemKind::OseenLayer => "oseen-layer",
            ProblemKind::NseSmooth => "nse-smooth",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oseen-smooth" => Ok(ProblemKind::OseenSmooth),
            "oseen-layer" => Ok(ProblemKind::OseenLayer),
            "nse-smooth" => Ok(ProblemKind::NseSmooth),
            _ => Err(Error::Config(format!("unknown problem {s:?}"))),
        }
    }
}

/// One study: every pair and viscosity on a sequence of meshes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub problem: ProblemKind,
    pub pairs: Vec<SpacePair>,
    pub nu: Vec<f64>,
    /// Finest uniform level, or the number of adaptive solves.
    pub levels: usize,
    /// Coarsest uniform level.
    pub min_level: usize,
    pub adaptive: bool,
    /// Uniform level of the initial adaptive mesh.
    pub initial_level: usize,
    pub marking: Marking,
    pub theta: f64,
    pub dof_budget: usize,
    pub quad_degree: Option<usize>,
    pub c_inv: f64,
    pub solver_tol: f64,
    pub hypotheses: bool,
    pub vtk: bool,
    pub picard: PicardConfig,
    pub out: Option<PathBuf>,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            problem: ProblemKind::OseenSmooth,
            pairs: vec![SpacePair::taylor_hood(2).expect("P2/P1 is valid")],
            nu: vec![1e-5],
            levels: 5,
            min_level: 1,
            adaptive: false,
            initial_level: 3,
            marking: Marking::Maximum,
            theta: 0.5,
            dof_budget: 200_000,
            quad_degree: None,
            c_inv: 1.0,
            solver_tol: 1e-12,
            hypotheses: false,
            vtk: false,
            picard: PicardConfig::default(),
            out: None,
        }
    }
}

impl BenchmarkSpec {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.pairs {
            if !SpacePair::STUDY_PAIRS.contains(p) {
                return Err(Error::Config(format!("pair {p} is not one of the study pairs")));
            }
        }
        if self.pairs.is_empty() || self.nu.is_empty() {
            return Err(Error::Config("need at least one pair and one viscosity".into()));
        }
        if let Some(nu) = self.nu.iter().find(|&&nu| !(nu > 0.0)) {
            return Err(Error::Config(format!("viscosity must be positive, got {nu}")));
        }
        if !self.adaptive && self.min_level > self.levels {
            return Err(Error::Config(format!("min_level {} above levels {}", self.min_level, self.levels)));
        }
        if self.problem == ProblemKind::NseSmooth && self.adaptive {
            return Err(Error::Config("adaptive refinement is available for the Oseen problems only".into()));
        }
        if self.adaptive {
            self.adaptive_config().validate()?;
        }
        Ok(())
    }

    fn adaptive_config(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            marking: self.marking,
            theta: self.theta,
            max_levels: self.levels,
            dof_budget: self.dof_budget,
        }
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            constants: StabilizationConstants {
                c_inv: self.c_inv,
                ..Default::default()
            },
            assembly: AssemblyOptions {
                quad_degree: self.quad_degree,
            },
            solver: SolverConfig {
                tolerance: self.solver_tol,
                ..Default::default()
            },
            hypotheses: self.hypotheses,
        }
    }
}

/// One line of `report.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub problem: String,
    pub pair: String,
    pub nu: f64,
    pub level: usize,
    pub dofs: usize,
    /// `||e||_spg`, or `||e||_{spg,nse}` for Navier-Stokes.
    pub err_spg: Option<f64>,
    pub eta: Option<f64>,
    pub eta_res: Option<f64>,
    pub eta_div: Option<f64>,
    #[serde(rename = "eta_F")]
    pub eta_f: Option<f64>,
    pub eta_delta: Option<f64>,
    pub eta_mu: Option<f64>,
    pub effectivity: Option<f64>,
    pub order: Option<f64>,
}

/// Everything computed for one (pair, nu, level), serialized to JSON.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    #[serde(flatten)]
    pub row: ReportRow,
    pub cells: usize,
    pub h: f64,
    pub norm: Option<NormReport>,
    pub hypotheses: Option<HypothesisReport>,
    pub parameters_admissible: Option<bool>,
    pub solver_residual: Option<f64>,
    pub picard_iterations: Option<usize>,
    pub picard_history: Option<Vec<f64>>,
    pub picard_monotone: Option<bool>,
    /// Fraction of cells meeting `{x > 0.9} u {y > 0.9}`.
    pub corner_fraction: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkReport {
    pub spec: BenchmarkSpec,
    pub records: Vec<LevelRecord>,
}

impl BenchmarkReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.records.iter().map(|r| &r.row)
    }

    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in self.rows() {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_json(&self, w: impl std::io::Write) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// The records of one (pair, nu) series in level order.
    pub fn series(&self, pair: SpacePair, nu: f64) -> Vec<&LevelRecord> {
        let p = pair.to_string();
        self.records.iter().filter(|r| r.row.pair == p && r.row.nu == nu).collect()
    }
}

/// Fraction of cells intersecting `{x > 0.9} u {y > 0.9}`.
pub fn corner_fraction(disc: &Discretization) -> f64 {
    let mesh = &disc.mesh;
    let n = (0..mesh.n_cells())
        .filter(|&c| mesh.cell_vertices(c).iter().any(|v| v[0] > 0.9 || v[1] > 0.9))
        .count();
    n as f64 / mesh.n_cells() as f64
}

struct LevelOutcome {
    estimate: ErrorEstimate,
    norm: Option<NormReport>,
    hypotheses: Option<HypothesisReport>,
    admissible: bool,
    solver_residual: Option<f64>,
    picard: Option<(usize, Vec<f64>, bool)>,
    solution: DiscreteSolution,
}

fn solve_nse_level(disc: &Discretization, data: &ProblemData, spec: &BenchmarkSpec) -> Result<LevelOutcome> {
    let opts = spec.run_options();
    data.validate(disc, opts.assembly.degree(disc.space))?;
    let params = nse_parameters(disc, data.nu, opts.constants);
    let result = picard_solve(disc, data, &params, &spec.picard, &opts.assembly, &opts.solver)?;
    let estimate = nse_estimate(disc, data, &params, &result.solution)?;
    let norm = spg_nse_norm(disc, data, &params, &result.solution, None)?;
    let monotone = result.monotone_after(3);
    Ok(LevelOutcome {
        estimate,
        norm: Some(norm),
        hypotheses: None,
        admissible: params.all_admissible(),
        solver_residual: None,
        picard: Some((result.iterations, result.history, monotone)),
        solution: result.solution,
    })
}

fn outcome_from_run(run: OseenRun) -> LevelOutcome {
    LevelOutcome {
        admissible: run.params.all_admissible(),
        solver_residual: Some(run.solve.relative_residual),
        estimate: run.estimate,
        norm: run.norm,
        hypotheses: run.hypotheses,
        picard: None,
        solution: run.solution,
    }
}

fn record(
    spec: &BenchmarkSpec,
    pair: SpacePair,
    nu: f64,
    level: usize,
    disc: &Discretization,
    outcome: Result<LevelOutcome>,
) -> (LevelRecord, Option<LevelOutcome>) {
    let mut row = ReportRow {
        problem: spec.problem.to_string(),
        pair: pair.to_string(),
        nu,
        level,
        dofs: disc.layout().n_dofs(),
        err_spg: None,
        eta: None,
        eta_res: None,
        eta_div: None,
        eta_f: None,
        eta_delta: None,
        eta_mu: None,
        effectivity: None,
        order: None,
    };
    let mut rec = LevelRecord {
        row: row.clone(),
        cells: disc.n_cells(),
        h: disc.h(),
        norm: None,
        hypotheses: None,
        parameters_admissible: None,
        solver_residual: None,
        picard_iterations: None,
        picard_history: None,
        picard_monotone: None,
        corner_fraction: corner_fraction(disc),
        failure: None,
    };
    match outcome {
        Ok(o) => {
            let [res, div, f, delta, mu] = o.estimate.component_norms();
            row.eta = Some(o.estimate.eta);
            row.eta_res = Some(res);
            row.eta_div = Some(div);
            row.eta_f = Some(f);
            row.eta_delta = Some(delta);
            row.eta_mu = Some(mu);
            if let Some(n) = &o.norm {
                row.err_spg = Some(n.primary());
                row.effectivity = effectivity(&o.estimate, n).ok();
            }
            rec.row = row;
            rec.norm = o.norm;
            rec.hypotheses = o.hypotheses;
            rec.parameters_admissible = Some(o.admissible);
            rec.solver_residual = o.solver_residual;
            if let Some((it, hist, mono)) = &o.picard {
                rec.picard_iterations = Some(*it);
                rec.picard_history = Some(hist.clone());
                rec.picard_monotone = Some(*mono);
            }
            (rec, Some(o))
        }
        Err(e) => {
            rec.row = row;
            if let Error::PicardNotConverged { iterations, history, .. } = &e {
                rec.picard_iterations = Some(*iterations);
                rec.picard_history = Some(history.clone());
            }
            rec.failure = Some(e.to_string());
            (rec, None)
        }
    }
}

fn vtk_name(spec: &BenchmarkSpec, pair: SpacePair, nu: f64, level: usize) -> String {
    format!(
        "{}_{}_nu{:e}_L{level}.vtk",
        spec.problem,
        pair.to_string().replace('/', ""),
        nu
    )
}

fn write_snapshot(spec: &BenchmarkSpec, pair: SpacePair, nu: f64, level: usize, disc: &Discretization, o: &LevelOutcome) -> Result<()> {
    if let (true, Some(dir)) = (spec.vtk, &spec.out) {
        let indicators = crate::adaptivity::local_indicators(&disc.mesh, &o.estimate);
        let file = fs::File::create(dir.join(vtk_name(spec, pair, nu, level)))?;
        write_solution_vtk(std::io::BufWriter::new(file), disc, &o.solution, &[("indicator", &indicators)])?;
    }
    Ok(())
}

fn fill_orders(records: &mut [LevelRecord], adaptive: bool) {
    for i in 1..records.len() {
        let (a, b) = (&records[i - 1].row, &records[i].row);
        let order = match (a.err_spg, b.err_spg) {
            (Some(ea), Some(eb)) if ea > 0.0 && eb > 0.0 => {
                if adaptive {
                    let ratio = b.dofs as f64 / a.dofs as f64;
                    (ratio > 1.0).then(|| 2.0 * (ea / eb).ln() / ratio.ln())
                } else {
                    Some((ea / eb).log2() / (b.level - a.level) as f64)
                }
            }
            _ => None,
        };
        records[i].row.order = order;
    }
}

fn run_series(spec: &BenchmarkSpec, pair: SpacePair, nu: f64) -> Result<Vec<LevelRecord>> {
    let data = spec.problem.data(nu);
    let mut records = Vec::new();
    if spec.adaptive {
        let steps = adaptive_loop(
            build_unit_square(spec.initial_level),
            pair,
            &data,
            &spec.adaptive_config(),
            &spec.run_options(),
        );
        match steps {
            Ok(steps) => {
                for s in steps {
                    let (rec, o) = record(spec, pair, nu, s.level, &s.disc, Ok(outcome_from_run(s.run)));
                    if let Some(o) = o {
                        write_snapshot(spec, pair, nu, s.level, &s.disc, &o)?;
                    }
                    records.push(rec);
                }
            }
            Err(e) => {
                let disc = Discretization::new(build_unit_square(spec.initial_level), pair)?;
                records.push(record(spec, pair, nu, 0, &disc, Err(e)).0);
            }
        }
    } else {
        for level in spec.min_level..=spec.levels {
            let disc = Discretization::new(build_unit_square(level), pair)?;
            let outcome = match spec.problem {
                ProblemKind::NseSmooth => solve_nse_level(&disc, &data, spec),
                _ => OseenRun::new(&disc, &data, &spec.run_options()).map(outcome_from_run),
            };
            let (rec, o) = record(spec, pair, nu, level, &disc, outcome);
            if let Some(o) = o {
                write_snapshot(spec, pair, nu, level, &disc, &o)?;
            }
            records.push(rec);
        }
    }
    fill_orders(&mut records, spec.adaptive);
    Ok(records)
}

/// Runs every (pair, nu) series of `spec`; failures are recorded per row.
/// Writes `report.csv` and `report.json` when an output directory is set.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    spec.validate()?;
    if let Some(dir) = &spec.out {
        fs::create_dir_all(dir)?;
    }
    let mut records = Vec::new();
    for &pair in &spec.pairs {
        for &nu in &spec.nu {
            records.extend(run_series(spec, pair, nu)?);
        }
    }
    let report = BenchmarkReport {
        spec: spec.clone(),
        records,
    };
    if let Some(dir) = &spec.out {
        report.write_csv(fs::File::create(dir.join("report.csv"))?)?;
        report.write_json(fs::File::create(dir.join("report.json"))?)?;
    }
    Ok(report)
}

/// Default Picard settings with the zero start, for the CLI switch.
pub fn picard_zero_start() -> PicardConfig {
    PicardConfig {
        initial_guess: InitialGuess::Zero,
        ..Default::default()
    }
}
