//! Monte Carlo on the space of random configurations in the plane.
//!
//! A random configuration assigns each commensurability class j an
//! independent pair (U_j, B_j): U_j is a Haar point of the class's torus
//! component set and B_j a Haar-random unimodular matrix. Grid (j, i) then
//! occupies the points c_{j,i}(ℤ² + U_{j,i})B_j. Cylinder statistics on these
//! configurations give the Boltzmann–Grad free path tails.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridalg::{torus_data, GridError, Mark, Presentation, TorusComponentSet, TorusMode, DEFAULT_ORBIT_CAP};
use crate::lab::stats::{binomial_stderr, isotonic_nonincreasing, mean_stderr};
use crate::planar::{PlanarGrid, Rect, Vec2};
use crate::rng::{par_sample, tags};

#[cfg(test)]
mod tests;

#[derive(Debug, Error)]
pub enum HomspaceError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("random configurations are only available in dimension 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("mark {mark} does not belong to class {class}")]
    MarkOutsideClass { mark: Mark, class: usize },
    #[error("xi grid must be nonempty, positive and strictly increasing")]
    BadXiGrid,
    #[error("tail estimates are on different xi grids")]
    GridMismatch,
    #[error("need at least {0} tail estimates")]
    TooFewEstimates(usize),
    #[error("region must be bounded with positive size")]
    BadRegion,
}

pub type Matrix2 = [[f64; 2]; 2];

/// Haar-random element of SL₂(ℤ)\SL₂(ℝ), returned as a matrix whose rows
/// span the random lattice.
pub fn haar_sl2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let y0 = 3f64.sqrt() / 2.0;
    let (x, y) = loop {
        let x: f64 = rng.random::<f64>() - 0.5;
        let y = y0 / (1.0 - rng.random::<f64>());
        if x * x + y * y >= 1.0 {
            break (x, y);
        }
    };
    let s = y.sqrt().recip();
    let theta: f64 = rng.random_range(0.0..TAU);
    let (sin, cos) = theta.sin_cos();
    let rows = [[s, 0.0], [s * x, s * y]];
    rows.map(|r| [r[0] * cos - r[1] * sin, r[0] * sin + r[1] * cos])
}

/// Which measure configurations are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigMode {
    /// Seen from a generic point.
    Generic,
    /// Seen from a point of grid ψ, whose origin point is removed.
    Mark(Mark),
}

#[derive(Clone, Debug)]
struct ClassSampler {
    torus: TorusComponentSet,
    scales: Vec<f64>,
}

/// Draws random configurations of a fixed presentation.
#[derive(Clone, Debug)]
pub struct ConfigurationSampler {
    mode: ConfigMode,
    marks: Vec<Mark>,
    classes: Vec<ClassSampler>,
    density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassConfig {
    /// Torus point, one row per grid of the class, entries in [0, 1).
    pub u: Vec<Vec<f64>>,
    /// Unimodular matrix, det 1.
    pub a: Matrix2,
    /// Index of the torus component the point was drawn from.
    pub component: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomConfiguration {
    pub mode: ConfigMode,
    pub classes: Vec<ClassConfig>,
    /// One planar grid per mark, in mark order.
    pub grids: Vec<(Mark, PlanarGrid)>,
}

/// First configuration point in a cylinder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderHit {
    pub x: f64,
    pub y: f64,
    pub mark: Mark,
}

impl ConfigurationSampler {
    pub fn new(p: &Presentation, mode: ConfigMode) -> Result<Self, HomspaceError> {
        if p.dim != 2 {
            return Err(HomspaceError::UnsupportedDimension(p.dim));
        }
        let torus_mode = match mode {
            ConfigMode::Generic => TorusMode::Generic,
            ConfigMode::Mark(psi) => {
                p.member(psi)?;
                TorusMode::Mark { psi, q: None }
            }
        };
        let classes = (0..p.num_classes())
            .map(|j| {
                Ok(ClassSampler {
                    torus: torus_data(p, j, &torus_mode, DEFAULT_ORBIT_CAP)?,
                    scales: p.classes[j].members.iter().map(|m| m.c.to_f64()).collect(),
                })
            })
            .collect::<Result<Vec<_>, GridError>>()?;
        Ok(ConfigurationSampler {
            mode,
            marks: p.marks(),
            classes,
            density: p.total_density_f64(),
        })
    }

    pub fn mode(&self) -> ConfigMode {
        self.mode
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// n̄_𝒫 as a float.
    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn torus(&self, class: usize) -> &TorusComponentSet {
        &self.classes[class].torus
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomConfiguration {
        let mut classes = Vec::with_capacity(self.classes.len());
        let mut grids = Vec::with_capacity(self.marks.len());
        for (j, cs) in self.classes.iter().enumerate() {
            let (component, u) = cs.torus.sample_component(rng);
            let a = haar_sl2(rng);
            for (i, (row, c)) in u.iter().zip(&cs.scales).enumerate() {
                let b1 = [c * a[0][0], c * a[0][1]];
                let b2 = [c * a[1][0], c * a[1][1]];
                let origin = [row[0] * b1[0] + row[1] * b2[0], row[0] * b1[1] + row[1] * b2[1]];
                grids.push((Mark::new(j, i), PlanarGrid::new(b1, b2, origin)));
            }
            classes.push(ClassConfig { u, a, component });
        }
        RandomConfiguration {
            mode: self.mode,
            classes,
            grids,
        }
    }
}

fn cylinder(xi: f64, shift: f64) -> Rect {
    Rect::new(0.0, xi, shift - 1.0, shift + 1.0)
}

impl RandomConfiguration {
    /// Number of points in (0, ξ) × (w′ − 1, w′ + 1).
    pub fn count_in_cylinder(&self, xi: f64, shift: f64) -> u64 {
        let r = cylinder(xi, shift);
        self.grids.iter().map(|(_, g)| g.count_in_rect(&r)).sum()
    }

    /// Point of least first coordinate in (0, ξ_max) × (w′ − 1, w′ + 1),
    /// found with doubling windows; ties go to the earlier mark.
    pub fn first_in_cylinder(&self, shift: f64, xi_max: f64) -> Option<CylinderHit> {
        let mut x = xi_max.min(1.0);
        loop {
            let r = cylinder(x, shift);
            let mut best: Option<CylinderHit> = None;
            for (mark, g) in &self.grids {
                if let Some(p) = g.min_x_in_rect(&r) {
                    if best.map_or(true, |b| p[0] < b.x) {
                        best = Some(CylinderHit {
                            x: p[0],
                            y: p[1],
                            mark: *mark,
                        });
                    }
                }
            }
            if best.is_some() || x >= xi_max {
                return best;
            }
            x = (2.0 * x).min(xi_max);
        }
    }

    /// Points of grid ψ in the region.
    pub fn count_in_region(&self, psi: Mark, region: &Region) -> u64 {
        let mut n = 0;
        for (_, g) in self.grids.iter().filter(|(m, _)| *m == psi) {
            g.for_each_in_rect(&region.bounding_rect(), |p| {
                if region.contains(p) {
                    n += 1;
                }
            });
        }
        n
    }

    /// Points of every grid in the region.
    pub fn count_all_in_region(&self, region: &Region) -> u64 {
        self.grids
            .iter()
            .map(|(m, _)| self.count_in_region(*m, region))
            .sum()
    }

    /// Whether grid ψ has a point at the origin.
    pub fn has_origin(&self, psi: Mark) -> bool {
        self.classes
            .get(psi.class)
            .and_then(|c| c.u.get(psi.member))
            .is_some_and(|row| row.iter().all(|x| *x == 0.0))
    }
}

/// Bounded planar region for point counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Open box (x0, x1) × (y0, y1).
    Box { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Open disc.
    Ball { center: Vec2, radius: f64 },
}

impl Region {
    pub fn validate(&self) -> Result<(), HomspaceError> {
        let ok = match *self {
            Region::Box { x0, x1, y0, y1 } => [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1,
            Region::Ball { center, radius } => center.iter().all(|v| v.is_finite()) && radius.is_finite() && radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(HomspaceError::BadRegion)
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Region::Box { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            Region::Ball { radius, .. } => PI * radius * radius,
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            Region::Box { x0, x1, y0, y1 } => p[0] > x0 && p[0] < x1 && p[1] > y0 && p[1] < y1,
            Region::Ball { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                dx * dx + dy * dy < radius * radius
            }
        }
    }

    pub fn bounding_rect(&self) -> Rect {
        match *self {
            Region::Box { x0, x1, y0, y1 } => Rect::new(x0, x1, y0, y1),
            Region::Ball { center, radius } => Rect::new(
                center[0] - radius,
                center[0] + radius,
                center[1] - radius,
                center[1] + radius,
            ),
        }
    }
}

/// Which part of the presentation a tail refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailScope {
    Whole,
    Class(usize),
}

/// Starting law for a tail: generic, or leaving grid ψ at transverse offset w′.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailMode {
    Generic,
    Mark { psi: Mark, shift: f64 },
}

/// Estimate of the free path tail ξ ↦ P(ξ_free ≥ ξ) on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub xi: Vec<f64>,
    pub f_raw: Vec<f64>,
    pub f_iso: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n: usize,
    pub scope: TailScope,
    pub mode: TailMode,
    /// Samples with no point before the last grid value.
    pub censored: usize,
}

impl TailEstimate {
    /// Builds the estimate from first-hit positions (∞ when censored).
    pub fn from_first_hits(xi: Vec<f64>, mut hits: Vec<f64>, scope: TailScope, mode: TailMode) -> Self {
        hits.sort_by(f64::total_cmp);
        let n = hits.len();
        let censored = hits.iter().filter(|x| x.is_infinite()).count();
        let f_raw: Vec<f64> = xi
            .iter()
            .map(|x| (n - hits.partition_point(|h| h < x)) as f64 / n.max(1) as f64)
            .collect();
        let stderr: Vec<f64> = f_raw.iter().map(|f| binomial_stderr(*f, n)).collect();
        let f_iso = isotonic_nonincreasing(&f_raw, &vec![1.0; f_raw.len()]);
        TailEstimate {
            xi,
            f_raw,
            f_iso,
            stderr,
            n,
            scope,
            mode,
            censored,
        }
    }

    /// Tail at the grid point nearest to x.
    pub fn at(&self, x: f64) -> Option<(f64, f64)> {
        let k = self
            .xi
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))?
            .0;
        Some((self.f_iso[k], self.stderr[k]))
    }
}

fn check_grid(xi: &[f64]) -> Result<(), HomspaceError> {
    let ok = !xi.is_empty()
        && xi.iter().all(|x| x.is_finite() && *x > 0.0)
        && xi.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(HomspaceError::BadXiGrid)
    }
}

/// Restricts a presentation and a mark to the requested scope.
fn scoped(p: &Presentation, scope: TailScope, mode: TailMode) -> Result<(Presentation, ConfigMode, f64), HomspaceError> {
    let (pp, remap): (Presentation, Box<dyn Fn(Mark) -> Result<Mark, HomspaceError>>) = match scope {
        TailScope::Whole => (p.clone(), Box::new(Ok)),
        TailScope::Class(c) => (
            p.class_restricted(c)?,
            Box::new(move |m: Mark| {
                if m.class == c {
                    Ok(Mark::new(0, m.member))
                } else {
                    Err(HomspaceError::MarkOutsideClass { mark: m, class: c })
                }
            }),
        ),
    };
    let (cm, shift) = match mode {
        TailMode::Generic => (ConfigMode::Generic, 0.0),
        TailMode::Mark { psi, shift } => (ConfigMode::Mark(remap(psi)?), shift),
    };
    Ok((pp, cm, shift))
}

/// Monte Carlo tail with common random numbers across the grid.
pub fn tail_estimate(
    p: &Presentation,
    scope: TailScope,
    mode: TailMode,
    xi: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<TailEstimate, HomspaceError> {
    check_grid(xi)?;
    let (pp, cm, shift) = scoped(p, scope, mode)?;
    let sampler = ConfigurationSampler::new(&pp, cm)?;
    let xmax = *xi.last().expect("nonempty grid");
    let hits = par_sample(n, workers, seed, tags::TAIL, |rng| {
        sampler
            .sample(rng)
            .first_in_cylinder(shift, xmax)
            .map_or(f64::INFINITY, |h| h.x)
    });
    Ok(TailEstimate::from_first_hits(xi.to_vec(), hits, scope, mode))
}

/// Pointwise product of per-class tails with delta-method errors.
pub fn product_tail(parts: &[TailEstimate]) -> Result<TailEstimate, HomspaceError> {
    let first = parts.first().ok_or(HomspaceError::TooFewEstimates(1))?;
    if parts.iter().any(|t| t.xi != first.xi) {
        return Err(HomspaceError::GridMismatch);
    }
    let k = first.xi.len();
    let prod = |f: &dyn Fn(&TailEstimate) -> &Vec<f64>| -> Vec<f64> {
        (0..k).map(|i| parts.iter().map(|t| f(t)[i]).product()).collect()
    };
    let f_raw = prod(&|t| &t.f_raw);
    let f_iso = prod(&|t| &t.f_iso);
    let stderr = (0..k)
        .map(|i| {
            parts
                .iter()
                .enumerate()
                .map(|(c, t)| {
                    let others: f64 = parts
                        .iter()
                        .enumerate()
                        .filter(|(o, _)| *o != c)
                        .map(|(_, s)| s.f_raw[i])
                        .product();
                    (others * t.stderr[i]).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(TailEstimate {
        xi: first.xi.clone(),
        f_raw,
        f_iso,
        stderr,
        n: parts.iter().map(|t| t.n).min().unwrap_or(0),
        scope: TailScope::Whole,
        mode: first.mode,
        censored: parts.iter().map(|t| t.censored).max().unwrap_or(0),
    })
}

/// Density estimate on grid midpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
}

/// −dF/dξ from the isotonic tail, clipped to [0, 2n̄].
pub fn phi_from_tail(t: &TailEstimate, density: f64) -> Result<DensityEstimate, HomspaceError> {
    if t.xi.len() < 2 {
        return Err(HomspaceError::BadXiGrid);
    }
    let cap = 2.0 * density;
    let (xi, phi) = t
        .xi
        .windows(2)
        .zip(t.f_iso.windows(2))
        .map(|(x, f)| (0.5 * (x[0] + x[1]), ((f[0] - f[1]) / (x[1] - x[0])).clamp(0.0, cap)))
        .unzip();
    Ok(DensityEstimate { xi, phi })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelReport {
    pub mark: Mark,
    pub mode: ConfigMode,
    pub region: Region,
    pub mean: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub density: f64,
    pub volume: f64,
    /// Atom at the origin used in the prediction.
    pub atom: f64,
    /// Fraction of samples in which grid ψ contained the origin.
    pub atom_mc: f64,
    pub n: usize,
}

impl SiegelReport {
    pub fn z_score(&self) -> f64 {
        if self.stderr > 0.0 {
            (self.mean - self.predicted) / self.stderr
        } else if (self.mean - self.predicted).abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Mean count of grid-ψ points in a region against n̄_ψ·vol + atom·[0 ∈ region].
pub fn siegel_check(
    p: &Presentation,
    psi: Mark,
    region: Region,
    mode: ConfigMode,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<SiegelReport, HomspaceError> {
    region.validate()?;
    let sampler = ConfigurationSampler::new(p, mode)?;
    let density = p.density_f64(psi);
    p.member(psi)?;
    let draws = par_sample(n, workers, seed, tags::SIEGEL, |rng| {
        let conf = sampler.sample(rng);
        (conf.count_in_region(psi, &region) as f64, conf.has_origin(psi))
    });
    let counts: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let (mean, stderr) = mean_stderr(&counts);
    let atom_mc = draws.iter().filter(|d| d.1).count() as f64 / n.max(1) as f64;
    let atom = match mode {
        ConfigMode::Mark(m) if m == psi => 1.0,
        ConfigMode::Mark(_) => atom_mc,
        ConfigMode::Generic => sampler.torus(psi.class).origin_atom(psi.member),
    };
    let origin_in = if region.contains([0.0, 0.0]) { 1.0 } else { 0.0 };
    let volume = region.volume();
    Ok(SiegelReport {
        mark: psi,
        mode,
        region,
        mean,
        stderr,
        predicted: density * volume + atom * origin_in,
        density,
        volume,
        atom,
        atom_mc,
        n,
    })
}

/// Mean number of nonzero points of a Haar-random unimodular lattice in the
/// open unit disc, with its standard error.
pub fn haar_ball_count(n: usize, seed: u64, workers: usize) -> (f64, f64) {
    let region = Region::Ball {
        center: [0.0, 0.0],
        radius: 1.0,
    };
    let counts = par_sample(n, workers, seed, tags::HAAR, |rng| {
        let a = haar_sl2(rng);
        let g = PlanarGrid::new(a[0], a[1], [0.0, 0.0]);
        let mut k = 0u32;
        g.for_each_in_rect(&region.bounding_rect(), |p| {
            if region.contains(p) && (p[0] != 0.0 || p[1] != 0.0) {
                k += 1;
            }
        });
        k as f64
    });
    mean_stderr(&counts)
}
