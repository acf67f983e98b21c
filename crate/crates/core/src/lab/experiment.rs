//! Dispatch of configured experiments to the samplers.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind, ModeSpec, OutputSpec, Spacing, XiGridSpec, SCHEMA_VERSION};
use super::io::{fmt_f64, json_bytes, write_atomic, write_csv, CsvTable};
use super::report::{StatReport, StatRow};
use super::stats::{binomial_stderr, loglog_fit};
use super::LabError;
use crate::flight::{run_ensemble, FlightSampler, DEFAULT_XI_MAX};
use crate::gridalg::{make_admissible, Mark, Presentation, PresentationJson, TorusMode, DEFAULT_ORBIT_CAP};
use crate::homspace::{
    product_tail, siegel_check, tail_estimate, ConfigMode, Region, TailEstimate, TailMode, TailScope,
};
use crate::rng::derive;
use crate::scene::{DirectionLaw, PathSamples, ScattererScene, StartLaw};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_RHO: f64 = 0.01;
pub const COMPARE_XI: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Result of one experiment: a JSON summary, optional CSV tables (with a
/// file-name suffix each) and optional pass/fail rows.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub kind: ExperimentKind,
    pub summary: Value,
    pub tables: Vec<(Option<String>, CsvTable)>,
    pub stats: Option<StatReport>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.stats.as_ref().map_or(true, StatReport::pass)
    }

    /// Writes tables and the summary to the configured paths.
    pub fn write(&self, out: &OutputSpec) -> Result<(), LabError> {
        if let Some(path) = &out.csv {
            for (suffix, table) in &self.tables {
                let p = match suffix {
                    None => path.clone(),
                    Some(s) => {
                        let stem = path.file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_default();
                        let ext = path.extension().map(|x| format!(".{}", x.to_string_lossy())).unwrap_or_default();
                        path.with_file_name(format!("{stem}_{s}{ext}"))
                    }
                };
                write_csv(&p, table)?;
            }
        }
        if let Some(path) = &out.json {
            write_atomic(path, &json_bytes(&self.summary)?)?;
        }
        Ok(())
    }
}

struct Settings {
    seed: u64,
    workers: usize,
    samples: usize,
    xi_max: f64,
}

fn settings(cfg: &ExperimentConfig) -> Settings {
    Settings {
        seed: cfg.seed.unwrap_or(0),
        workers: cfg.workers.unwrap_or(1),
        samples: cfg.samples.unwrap_or(DEFAULT_SAMPLES),
        xi_max: cfg.xi_max.unwrap_or(DEFAULT_XI_MAX),
    }
}

/// The configured presentation made admissible; marks in configs index this.
pub fn admissible_presentation(cfg: &ExperimentConfig) -> Result<(Presentation, Presentation), LabError> {
    let raw = cfg.presentation()?;
    let adm = make_admissible(&raw)?;
    Ok((raw, adm))
}

fn check_mark(p: &Presentation, m: Mark) -> Result<Mark, LabError> {
    p.member(m)
        .map(|_| m)
        .map_err(|_| LabError::Invalid(format!("mark {m} is not in the admissible presentation")))
}

fn mark_cells(m: Option<Mark>) -> [String; 2] {
    match m {
        Some(m) => [(m.class + 1).to_string(), (m.member + 1).to_string()],
        None => [String::new(), String::new()],
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let kind = cfg
        .experiment
        .ok_or_else(|| LabError::Invalid("no experiment kind given".into()))?;
    match kind {
        ExperimentKind::Analyze => analyze(cfg),
        ExperimentKind::Simulate => simulate(cfg),
        ExperimentKind::LimitTail => limit_tail(cfg),
        ExperimentKind::Flight => flight(cfg),
        ExperimentKind::SiegelCheck => siegel(cfg),
        ExperimentKind::Compare => compare(cfg),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkSummary {
    pub mark: String,
    pub density: f64,
    pub weight: f64,
    pub marked_subspace_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub dim: usize,
    pub input_grids: usize,
    pub input_admissible: bool,
    pub classes: usize,
    pub class_sizes: Vec<usize>,
    pub admissible: bool,
    pub total_density: f64,
    pub class_subspace_dims: Vec<usize>,
    pub torus_components: Vec<usize>,
    pub marks: Vec<MarkSummary>,
    /// Rule for points lying on several grids.
    pub overlap_marking: &'static str,
    pub presentation: PresentationJson,
}

/// Scatterers on several grids carry the lowest mark.
pub const OVERLAP_MARKING: &str = "lowest-mark";

pub fn analysis_report(raw: &Presentation, adm: &Presentation) -> Result<AnalysisReport, LabError> {
    let marks = adm
        .marks()
        .into_iter()
        .map(|m| {
            Ok(MarkSummary {
                mark: m.to_string(),
                density: adm.density_f64(m),
                weight: adm.weight(m)?.to_f64(),
                marked_subspace_dim: adm.subspace_lpsi(m, m.class)?.dim(),
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let js = 0..adm.num_classes();
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        dim: adm.dim,
        input_grids: raw.marks().len(),
        input_admissible: raw.is_admissible()?.is_admissible() && raw.satisfies_disjointness(),
        classes: adm.num_classes(),
        class_sizes: js.clone().map(|j| adm.class_size(j)).collect(),
        admissible: adm.is_admissible()?.is_admissible(),
        total_density: adm.total_density_f64(),
        class_subspace_dims: js
            .clone()
            .map(|j| adm.subspace_lj(j).map(|l| l.dim()))
            .collect::<Result<_, _>>()?,
        torus_components: js
            .map(|j| {
                crate::gridalg::torus_data(adm, j, &TorusMode::Generic, DEFAULT_ORBIT_CAP).map(|t| t.num_components())
            })
            .collect::<Result<_, _>>()?,
        marks,
        overlap_marking: OVERLAP_MARKING,
        presentation: adm.to_json(),
    })
}

fn analyze(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let (raw, adm) = admissible_presentation(cfg)?;
    let report = analysis_report(&raw, &adm)?;
    Ok(Outcome {
        kind: ExperimentKind::Analyze,
        summary: serde_json::to_value(report)?,
        tables: Vec::new(),
        stats: None,
    })
}

fn scene_samples(
    p: &Presentation,
    rho: f64,
    n: usize,
    xi_max: f64,
    seed: u64,
    workers: usize,
) -> Result<PathSamples, LabError> {
    let scene = ScattererScene::new(p)?;
    Ok(scene.sample_path_lengths(rho, n, &StartLaw::UniformCell, &DirectionLaw::Uniform, xi_max, seed, workers)?)
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = settings(cfg);
    let (_, p) = admissible_presentation(cfg)?;
    let rhos = if cfg.rho.is_empty() { vec![DEFAULT_RHO] } else { cfg.rho.clone() };
    let mut tables = Vec::new();
    let mut runs = Vec::new();
    for (k, rho) in rhos.iter().enumerate() {
        let ps = scene_samples(&p, *rho, s.samples, s.xi_max, derive(s.seed, k as u64), s.workers)?;
        let mut t = CsvTable::new(&["xi", "mark_j", "mark_i", "impact_w", "censored"]);
        for x in &ps.samples {
            let [j, i] = mark_cells(x.mark);
            t.push(vec![fmt_f64(x.xi), j, i, fmt_f64(x.w), u8::from(x.censored).to_string()]);
        }
        let suffix = (rhos.len() > 1).then(|| format!("rho{}", fmt_f64(*rho)));
        tables.push((suffix, t));
        let censored = ps.samples.iter().filter(|x| x.censored).count();
        let tail: Vec<Value> = cfg
            .xi
            .as_ref()
            .map(XiGridSpec::values)
            .transpose()?
            .unwrap_or_default()
            .into_iter()
            .map(|x| json!({"xi": x, "tail": ps.tail_at(x)}))
            .collect();
        runs.push(json!({
            "rho": rho,
            "n": ps.samples.len(),
            "censored": censored,
            "resampled": ps.resampled,
            "tail": tail,
        }));
    }
    Ok(Outcome {
        kind: ExperimentKind::Simulate,
        summary: json!({"schema_version": SCHEMA_VERSION, "experiment": "simulate", "seed": s.seed, "overlap_marking": OVERLAP_MARKING, "runs": runs}),
        tables,
        stats: None,
    })
}

fn tail_mode(p: &Presentation, cfg: &ExperimentConfig) -> Result<TailMode, LabError> {
    Ok(match cfg.mode.unwrap_or(ModeSpec::Generic) {
        ModeSpec::Generic => TailMode::Generic,
        m @ ModeSpec::Mark { .. } => TailMode::Mark {
            psi: check_mark(p, m.mark().expect("mark mode"))?,
            shift: m.shift(),
        },
    })
}

fn default_xi() -> XiGridSpec {
    XiGridSpec {
        lo: 0.25,
        hi: 64.0,
        spacing: Spacing::Log,
        count: None,
    }
}

pub fn tail_table(t: &TailEstimate) -> CsvTable {
    let mut table = CsvTable::new(&["xi", "F_raw", "F_iso", "stderr", "n"]);
    for k in 0..t.xi.len() {
        table.push(vec![
            fmt_f64(t.xi[k]),
            fmt_f64(t.f_raw[k]),
            fmt_f64(t.f_iso[k]),
            fmt_f64(t.stderr[k]),
            t.n.to_string(),
        ]);
    }
    table
}

/// Slope of the tail over all points with F̂ > 10·stderr.
pub fn tail_slope(t: &TailEstimate, lo: f64, hi: f64) -> Result<super::stats::SlopeFit, LabError> {
    let idx: Vec<usize> = (0..t.xi.len())
        .filter(|&k| t.xi[k] >= lo && t.xi[k] <= hi && t.f_iso[k] > 10.0 * t.stderr[k])
        .collect();
    let pick = |v: &[f64]| idx.iter().map(|&k| v[k]).collect::<Vec<_>>();
    loglog_fit(&pick(&t.xi), &pick(&t.f_iso), &pick(&t.stderr), 4)
        .map_err(|e| LabError::Invalid(format!("slope fit: {e}")))
}

fn limit_tail(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = settings(cfg);
    let (_, p) = admissible_presentation(cfg)?;
    let xi = cfg.xi.unwrap_or_else(default_xi).values()?;
    let mode = tail_mode(&p, cfg)?;
    let t = tail_estimate(&p, TailScope::Whole, mode, &xi, s.samples, s.seed, s.workers)?;
    let slope = tail_slope(&t, xi[0], *xi.last().expect("nonempty")).ok();
    Ok(Outcome {
        kind: ExperimentKind::LimitTail,
        summary: json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": "limit-tail",
            "seed": s.seed,
            "n": t.n,
            "censored": t.censored,
            "classes": p.num_classes(),
            "slope": slope.map(|f| f.slope),
            "slope_stderr": slope.map(|f| f.stderr),
        }),
        tables: vec![(None, tail_table(&t))],
        stats: None,
    })
}

fn flight(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = settings(cfg);
    let (_, p) = admissible_presentation(cfg)?;
    let sampler = FlightSampler::new(&p)?;
    let events = cfg.events.unwrap_or(1000);
    let trajs = run_ensemble(&sampler, cfg.trajectories.unwrap_or(100), events, s.seed, s.workers, s.xi_max)?;
    let mut t = CsvTable::new(&["traj_id", "step", "xi", "mark_j", "mark_i", "w", "vx", "vy", "qx", "qy", "censored"]);
    let mut freq = vec![0usize; sampler.marks().len()];
    for (id, tr) in trajs.iter().enumerate() {
        for (k, e) in tr.events.iter().enumerate() {
            if let Some(m) = e.mark {
                if let Some(pos) = sampler.marks().iter().position(|x| *x == m) {
                    freq[pos] += 1;
                }
            }
            let [j, i] = mark_cells(e.mark);
            let q = tr.positions[k + 1];
            t.push(vec![
                id.to_string(),
                (k + 1).to_string(),
                fmt_f64(e.xi),
                j,
                i,
                fmt_f64(e.w),
                fmt_f64(e.velocity[0]),
                fmt_f64(e.velocity[1]),
                fmt_f64(q[0]),
                fmt_f64(q[1]),
                u8::from(e.censored).to_string(),
            ]);
        }
    }
    let marks: Vec<Value> = sampler
        .marks()
        .iter()
        .zip(&freq)
        .map(|(m, f)| json!({"mark": m.to_string(), "hits": f}))
        .collect();
    Ok(Outcome {
        kind: ExperimentKind::Flight,
        summary: json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": "flight",
            "seed": s.seed,
            "trajectories": trajs.len(),
            "events": trajs.iter().map(|t| t.events.len()).sum::<usize>(),
            "censored_trajectories": trajs.iter().filter(|t| t.censored()).count(),
            "marks": marks,
        }),
        tables: vec![(None, t)],
        stats: None,
    })
}

fn siegel(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = settings(cfg);
    let (_, p) = admissible_presentation(cfg)?;
    let (psi, mode) = match cfg.mode.unwrap_or(ModeSpec::Generic) {
        ModeSpec::Generic => (Mark::new(0, 0), ConfigMode::Generic),
        m => {
            let psi = check_mark(&p, m.mark().expect("mark mode"))?;
            (psi, ConfigMode::Mark(psi))
        }
    };
    let region = cfg.region.unwrap_or(Region::Box {
        x0: 2.0,
        x1: 5.0,
        y0: 1.0,
        y1: 3.0,
    });
    let r = siegel_check(&p, psi, region, mode, s.samples, s.seed, s.workers)?;
    let mut stats = StatReport::default();
    stats.push(StatRow::difference(
        format!("siegel {psi}"),
        (r.mean, r.stderr, r.n),
        (r.predicted, 0.0, r.n),
        3.0,
        0.0,
    ));
    Ok(Outcome {
        kind: ExperimentKind::SiegelCheck,
        summary: json!({"schema_version": SCHEMA_VERSION, "experiment": "siegel-check", "seed": s.seed, "report": r, "stats": stats}),
        tables: Vec::new(),
        stats: Some(stats),
    })
}

fn compare(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = settings(cfg);
    let (_, p) = admissible_presentation(cfg)?;
    let rho = cfg.rho.first().copied().unwrap_or(DEFAULT_RHO);
    let xi = match &cfg.xi {
        Some(g) => g.values()?,
        None => COMPARE_XI.to_vec(),
    };
    let horizon = 2.0 * xi.last().expect("nonempty grid");
    let ps = scene_samples(&p, rho, s.samples, horizon, derive(s.seed, 0), s.workers)?;
    let direct = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, s.samples, derive(s.seed, 1), s.workers)?;
    let product = if p.num_classes() > 1 {
        let parts = (0..p.num_classes())
            .map(|c| {
                tail_estimate(&p, TailScope::Class(c), TailMode::Generic, &xi, s.samples, derive(s.seed, 2 + c as u64), s.workers)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Some(product_tail(&parts)?)
    } else {
        None
    };
    let mut stats = StatReport::default();
    let mut table = CsvTable::new(&["xi", "F_scene", "stderr_scene", "F_limit", "stderr_limit", "F_product", "stderr_product"]);
    let n = ps.samples.len();
    for (k, x) in xi.iter().enumerate() {
        let fs = ps.tail_at(*x);
        let ses = binomial_stderr(fs, n);
        stats.push(StatRow::difference(
            format!("scene vs limit at xi={}", fmt_f64(*x)),
            (fs, ses, n),
            (direct.f_iso[k], direct.stderr[k], direct.n),
            3.0,
            0.01,
        ));
        let (fp, sp) = match &product {
            Some(pt) => {
                stats.push(StatRow::difference(
                    format!("product vs direct at xi={}", fmt_f64(*x)),
                    (pt.f_raw[k], pt.stderr[k], pt.n),
                    (direct.f_raw[k], direct.stderr[k], direct.n),
                    3.0,
                    0.0,
                ));
                (fmt_f64(pt.f_raw[k]), fmt_f64(pt.stderr[k]))
            }
            None => (String::new(), String::new()),
        };
        table.push(vec![
            fmt_f64(*x),
            fmt_f64(fs),
            fmt_f64(ses),
            fmt_f64(direct.f_iso[k]),
            fmt_f64(direct.stderr[k]),
            fp,
            sp,
        ]);
    }
    Ok(Outcome {
        kind: ExperimentKind::Compare,
        summary: json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": "compare",
            "seed": s.seed,
            "rho": rho,
            "pass": stats.pass(),
            "stats": stats,
        }),
        tables: vec![(None, table)],
        stats: Some(stats),
    })
}
