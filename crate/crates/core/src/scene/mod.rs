//! Finite-radius Lorentz gas: hard scatterers of radius ρ centred on the
//! points of a presentation, first-hit queries, specular trajectories and
//! Boltzmann–Grad rescaled free paths ξ = ρ^{d−1}·length.

mod linalg;

use std::f64::consts::TAU;

use rand::Rng;
use thiserror::Error;

use crate::gridalg::matrix::to_f64;
use crate::gridalg::{GridError, Mark, Presentation};
use crate::planar::{PlanarGrid, Rect};
use crate::rng::{par_sample, tags, StreamRng};

pub use linalg::{det, dot, invert, norm, reduce_basis};

/// Hit times at or below this count as the start point.
const TIME_TOL: f64 = 1e-9;
/// Discriminants within this band are grazing misses.
const GRAZE_TOL: f64 = 1e-14;
/// Distance to a second boundary that marks an overlap corner.
const CORNER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("start point lies inside a scatterer centred at {center:?}")]
    StartInside { center: Vec<f64> },
    #[error("horizon must be positive")]
    NonPositiveHorizon,
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("scenes support d = 2 and d = 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("direction must be a unit vector of length {0}")]
    BadDirection(usize),
    #[error("direction table needs positive weights and d = 2")]
    BadDirectionTable,
    #[error("lattice matrix has |det − 1| = {0:e}")]
    Determinant(f64),
    #[error("no valid start found after {0} attempts")]
    NoStart(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// One grid of the scene in floating point.
#[derive(Clone, Debug)]
pub struct SceneGrid {
    pub mark: Mark,
    pub c: f64,
    pub w: Vec<f64>,
    pub m: Vec<Vec<f64>>,
    pub m_inv: Vec<Vec<f64>>,
    /// Reduced rows spanning c·ℤ^d M.
    pub basis: Vec<Vec<f64>>,
    pub basis_inv: Vec<Vec<f64>>,
    /// Integer matrix taking the rows of cM to the reduced rows.
    pub change: Vec<Vec<i64>>,
    /// c·w·M.
    pub origin: Vec<f64>,
    planar: Option<PlanarGrid>,
}

impl SceneGrid {
    pub fn center(&self, m: &[i64]) -> Vec<f64> {
        let mut p = self.origin.clone();
        for (k, mk) in m.iter().enumerate() {
            for (pi, bi) in p.iter_mut().zip(&self.basis[k]) {
                *pi += *mk as f64 * bi;
            }
        }
        p
    }

    /// Visits every center inside the axis-aligned box [lo, hi].
    fn for_each_in_box<F: FnMut(Vec<f64>)>(&self, lo: &[f64], hi: &[f64], mut f: F) {
        if let Some(g) = &self.planar {
            let r = Rect::new(lo[0], hi[0], lo[1], hi[1]);
            g.for_each_in_rect(&r, |p| f(p.to_vec()));
            return;
        }
        let d = lo.len();
        let mid: Vec<f64> = (0..d).map(|i| 0.5 * (lo[i] + hi[i]) - self.origin[i]).collect();
        let half: Vec<f64> = (0..d).map(|i| 0.5 * (hi[i] - lo[i])).collect();
        let ranges: Vec<(i64, i64)> = (0..d)
            .map(|k| {
                let centre: f64 = (0..d).map(|i| mid[i] * self.basis_inv[i][k]).sum();
                let width: f64 = (0..d).map(|i| half[i] * self.basis_inv[i][k].abs()).sum();
                ((centre - width).floor() as i64, (centre + width).ceil() as i64)
            })
            .collect();
        let mut m: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let p = self.center(&m);
            if p.iter().zip(lo).zip(hi).all(|((x, a), b)| x > a && x < b) {
                f(p);
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                m[k] += 1;
                if m[k] <= ranges[k].1 {
                    break;
                }
                m[k] = ranges[k].0;
                k += 1;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScattererScene {
    pub dim: usize,
    pub grids: Vec<SceneGrid>,
    pub presentation: Presentation,
    /// n̄_𝒫 as a float.
    pub density: f64,
    cell: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub center: Vec<f64>,
    pub mark: Mark,
    /// Signed impact parameter (d = 2); its norm in d = 3.
    pub w: f64,
    /// Transverse offset of the ray from the center, divided by ρ.
    pub impact: Vec<f64>,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// The hit point is within 10⁻⁹ of another scatterer boundary.
    pub near_corner: bool,
}

/// Specular reflection v − 2(v·n)n, renormalized.
pub fn reflect(v: &[f64], n: &[f64]) -> Vec<f64> {
    let vn = dot(v, n);
    let out: Vec<f64> = v.iter().zip(n).map(|(a, b)| a - 2.0 * vn * b).collect();
    let len = norm(&out);
    out.into_iter().map(|x| x / len).collect()
}

/// Outgoing direction in the incoming frame for impact parameter w (d = 2).
pub fn scatter_in_frame(w: f64) -> [f64; 2] {
    [2.0 * w * w - 1.0, 2.0 * w * (1.0 - w * w).max(0.0).sqrt()]
}

/// Orthonormal vectors completing v to a basis; for d = 2 this is v⊥ = (−v_y, v_x).
pub fn transverse_frame(v: &[f64]) -> Vec<Vec<f64>> {
    match v.len() {
        2 => vec![vec![-v[1], v[0]]],
        _ => {
            let pick = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let pv = dot(&pick, v);
            let mut e1: Vec<f64> = pick.iter().zip(v).map(|(p, x)| p - pv * x).collect();
            let n1 = norm(&e1);
            e1.iter_mut().for_each(|x| *x /= n1);
            let e2 = vec![
                v[1] * e1[2] - v[2] * e1[1],
                v[2] * e1[0] - v[0] * e1[2],
                v[0] * e1[1] - v[1] * e1[0],
            ];
            vec![e1, e2]
        }
    }
}

impl ScattererScene {
    pub fn new(p: &Presentation) -> Result<Self, SceneError> {
        let d = p.dim;
        if d != 2 && d != 3 {
            return Err(SceneError::UnsupportedDimension(d));
        }
        let mut grids = Vec::new();
        for psi in p.marks() {
            let g = p.grid(psi)?;
            let m = to_f64(&g.m);
            let dm = det(&m);
            if (dm - 1.0).abs() > 1e-12 {
                return Err(SceneError::Determinant((dm - 1.0).abs()));
            }
            let c = g.c.to_f64();
            let w: Vec<f64> = g.w.iter().map(|x| x.to_f64()).collect();
            let raw: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|x| c * x).collect()).collect();
            let (basis, change) = reduce_basis(&raw);
            let origin: Vec<f64> = (0..d)
                .map(|k| (0..d).map(|i| c * w[i] * m[i][k]).sum())
                .collect();
            let planar = (d == 2).then(|| PlanarGrid {
                b1: [basis[0][0], basis[0][1]],
                b2: [basis[1][0], basis[1][1]],
                origin: [origin[0], origin[1]],
            });
            grids.push(SceneGrid {
                mark: psi,
                c,
                w,
                m_inv: invert(&m),
                m,
                basis_inv: invert(&basis),
                basis,
                change,
                origin,
                planar,
            });
        }
        let cell = grids
            .iter()
            .flat_map(|g| g.basis.iter().map(|b| norm(b)))
            .fold(0.0, f64::max);
        Ok(ScattererScene {
            dim: d,
            grids,
            presentation: p.clone(),
            density: p.total_density_f64(),
            cell,
        })
    }

    /// Center of a scatterer containing q in its open disc, if any.
    pub fn containing_scatterer(&self, q: &[f64], rho: f64) -> Option<Vec<f64>> {
        let lo: Vec<f64> = q.iter().map(|x| x - rho).collect();
        let hi: Vec<f64> = q.iter().map(|x| x + rho).collect();
        let mut found = None;
        for g in &self.grids {
            g.for_each_in_box(&lo, &hi, |c| {
                if found.is_none() {
                    let d2: f64 = c.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < rho * rho * (1.0 - 1e-12) {
                        found = Some(c);
                    }
                }
            });
        }
        found
    }

    fn near_corner(&self, point: &[f64], own: &[f64], rho: f64) -> bool {
        let r = rho + CORNER_TOL;
        let lo: Vec<f64> = point.iter().map(|x| x - r).collect();
        let hi: Vec<f64> = point.iter().map(|x| x + r).collect();
        let mut hit = false;
        for g in &self.grids {
            g.for_each_in_box(&lo, &hi, |c| {
                let same: f64 = c.iter().zip(own).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if same > CORNER_TOL {
                    let dist = c.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    if (dist - rho).abs() < CORNER_TOL {
                        hit = true;
                    }
                }
            });
        }
        hit
    }

    /// First scatterer boundary crossed by q + tv for 0 < t ≤ horizon.
    pub fn first_hit(&self, q: &[f64], v: &[f64], rho: f64, horizon: f64) -> Result<Option<Hit>, SceneError> {
        if !(rho > 0.0) {
            return Err(SceneError::NonPositiveRadius);
        }
        if !(horizon > 0.0) {
            return Err(SceneError::NonPositiveHorizon);
        }
        if q.len() != self.dim || v.len() != self.dim || (norm(v) - 1.0).abs() > 1e-9 {
            return Err(SceneError::BadDirection(self.dim));
        }
        let mut search = Search {
            q,
            v,
            rho,
            horizon,
            best: None,
            inside: None,
        };
        let mut start = 0.0;
        let mut end = (4.0 * self.cell).min(horizon);
        loop {
            if self.dim == 2 {
                let cs = (v[0], -v[1]);
                let rect = Rect::new(start - rho, end + rho, -rho, rho);
                let shift = [-(cs.0 * q[0] - cs.1 * q[1]), -(cs.1 * q[0] + cs.0 * q[1])];
                for (gi, g) in self.grids.iter().enumerate() {
                    let pg = g.planar.expect("planar grid");
                    let local = pg.rotated_shifted(cs.0, cs.1, shift);
                    local.for_each_in_rect(&rect, |p| {
                        let world = vec![v[0] * p[0] - v[1] * p[1] + q[0], v[1] * p[0] + v[0] * p[1] + q[1]];
                        search.consider(gi, snap_center(g, world));
                    });
                }
            } else {
                let step = self.cell.max(rho);
                let mut a = start;
                while a < end {
                    let b = (a + step).min(end);
                    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..self.dim)
                        .map(|i| {
                            let p0 = q[i] + a * v[i];
                            let p1 = q[i] + b * v[i];
                            (p0.min(p1) - rho, p0.max(p1) + rho)
                        })
                        .unzip();
                    for (gi, g) in self.grids.iter().enumerate() {
                        g.for_each_in_box(&lo, &hi, |c| search.consider(gi, c));
                    }
                    a = b;
                }
            }
            if let Some(center) = search.inside.take() {
                return Err(SceneError::StartInside { center });
            }
            let done = search.best.as_ref().is_some_and(|b| b.0 <= end);
            if done || end >= horizon {
                break;
            }
            start = end;
            end = (end * 2.0).min(horizon);
        }
        let Some((t, gi, center)) = search.best else {
            return Ok(None);
        };
        let position: Vec<f64> = q.iter().zip(v).map(|(x, y)| x + t * y).collect();
        let normal: Vec<f64> = position.iter().zip(&center).map(|(p, c)| (p - c) / rho).collect();
        let velocity = reflect(v, &normal);
        let offset: Vec<f64> = q.iter().zip(&center).map(|(x, c)| x - c).collect();
        let impact: Vec<f64> = transverse_frame(v).iter().map(|e| dot(&offset, e) / rho).collect();
        let w = if self.dim == 2 { impact[0] } else { norm(&impact) };
        let near_corner = self.near_corner(&position, &center, rho);
        Ok(Some(Hit {
            t,
            center,
            mark: self.grids[gi].mark,
            w,
            impact,
            position,
            velocity,
            near_corner,
        }))
    }

    /// Iterated first hits with specular reflection.
    pub fn trajectory(
        &self,
        q0: &[f64],
        v0: &[f64],
        rho: f64,
        n_collisions: usize,
        horizon_per_leg: f64,
    ) -> Result<Trajectory, SceneError> {
        let mut hits = Vec::with_capacity(n_collisions);
        let mut q = q0.to_vec();
        let mut v = v0.to_vec();
        for _ in 0..n_collisions {
            match self.first_hit(&q, &v, rho, horizon_per_leg)? {
                Some(h) => {
                    q = h.position.clone();
                    v = h.velocity.clone();
                    hits.push(h);
                }
                None => return Ok(Trajectory { hits, escaped: true }),
            }
        }
        Ok(Trajectory { hits, escaped: false })
    }

    fn uniform_in_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let g = &self.grids[0];
        let mut p = g.origin.clone();
        for b in &g.basis {
            let u: f64 = rng.random();
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += u * bi;
            }
        }
        p
    }

    /// Boltzmann–Grad rescaled free paths from i.i.d. starts.
    pub fn sample_path_lengths(
        &self,
        rho: f64,
        n_samples: usize,
        start: &StartLaw,
        directions: &DirectionLaw,
        xi_max: f64,
        seed: u64,
        workers: usize,
    ) -> Result<PathSamples, SceneError> {
        directions.validate(self.dim)?;
        if let StartLaw::Fixed(q) = start {
            if let Some(center) = self.containing_scatterer(q, rho) {
                return Err(SceneError::StartInside { center });
            }
        }
        let scale = rho.powi(self.dim as i32 - 1);
        let horizon = xi_max / scale;
        let results = par_sample(n_samples, workers, seed, tags::SCENE, |rng| {
            self.one_path(rho, start, directions, horizon, scale, xi_max, rng)
        });
        let mut out = PathSamples::default();
        for r in results {
            let (s, redraws) = r?;
            out.resampled += redraws;
            out.samples.push(s);
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn one_path(
        &self,
        rho: f64,
        start: &StartLaw,
        directions: &DirectionLaw,
        horizon: f64,
        scale: f64,
        xi_max: f64,
        rng: &mut StreamRng,
    ) -> Result<(PathSample, u64), SceneError> {
        const ATTEMPTS: usize = 10_000;
        let mut redraws = 0u64;
        for _ in 0..ATTEMPTS {
            let v = directions.sample(self.dim, rng);
            let q = match start {
                StartLaw::Fixed(q) => q.clone(),
                StartLaw::UniformCell => {
                    let q = self.uniform_in_cell(rng);
                    if self.containing_scatterer(&q, rho).is_some() {
                        redraws += 1;
                        continue;
                    }
                    q
                }
                StartLaw::AtScatterer(psi) => {
                    let g = self
                        .grids
                        .iter()
                        .find(|g| g.mark == *psi)
                        .ok_or(SceneError::Grid(GridError::IndexOutOfRange))?;
                    let m: Vec<i64> = (0..self.dim).map(|_| rng.random_range(-1000..=1000)).collect();
                    let center = g.center(&m);
                    let exit = uniform_in_ball(self.dim - 1, rng);
                    let along = (1.0 - dot(&exit, &exit)).max(0.0).sqrt();
                    let frame = transverse_frame(&v);
                    let q: Vec<f64> = (0..self.dim)
                        .map(|i| {
                            center[i]
                                + rho * (along * v[i] + frame.iter().zip(&exit).map(|(e, x)| x * e[i]).sum::<f64>())
                        })
                        .collect();
                    if self.containing_scatterer(&q, rho).is_some() {
                        redraws += 1;
                        continue;
                    }
                    q
                }
            };
            match self.first_hit(&q, &v, rho, horizon)? {
                None => {
                    return Ok((
                        PathSample { xi: xi_max, mark: None, w: 0.0, censored: true },
                        redraws,
                    ))
                }
                Some(h) if h.near_corner => {
                    redraws += 1;
                }
                Some(h) => {
                    return Ok((
                        PathSample { xi: scale * h.t, mark: Some(h.mark), w: h.w, censored: false },
                        redraws,
                    ))
                }
            }
        }
        Err(SceneError::NoStart(ATTEMPTS))
    }
}

struct Search<'a> {
    q: &'a [f64],
    v: &'a [f64],
    rho: f64,
    horizon: f64,
    /// (t, grid index, center)
    best: Option<(f64, usize, Vec<f64>)>,
    inside: Option<Vec<f64>>,
}

impl Search<'_> {
    fn consider(&mut self, gi: usize, center: Vec<f64>) {
        let rel: Vec<f64> = center.iter().zip(self.q).map(|(c, x)| c - x).collect();
        let along = dot(&rel, self.v);
        let perp2 = (dot(&rel, &rel) - along * along).max(0.0);
        let disc = self.rho * self.rho - perp2;
        if disc <= GRAZE_TOL {
            return;
        }
        let s = disc.sqrt();
        let (t1, t2) = (along - s, along + s);
        if t1 < -TIME_TOL && t2 > TIME_TOL {
            self.inside.get_or_insert(center);
            return;
        }
        if t1 > TIME_TOL && t1 <= self.horizon {
            let better = match &self.best {
                None => true,
                Some((bt, bg, _)) => t1 < *bt || (t1 == *bt && gi < *bg),
            };
            if better {
                self.best = Some((t1, gi, center));
            }
        }
    }
}

/// Rounds a reconstructed world point back onto the exact lattice expression.
fn snap_center(g: &SceneGrid, p: Vec<f64>) -> Vec<f64> {
    let d = p.len();
    let rel: Vec<f64> = (0..d).map(|i| p[i] - g.origin[i]).collect();
    let m: Vec<i64> = (0..d)
        .map(|k| (0..d).map(|i| rel[i] * g.basis_inv[i][k]).sum::<f64>().round() as i64)
        .collect();
    g.center(&m)
}

fn uniform_in_ball<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        if dot(&x, &x) < 1.0 {
            return x;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub hits: Vec<Hit>,
    pub escaped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StartLaw {
    Fixed(Vec<f64>),
    /// Uniform in the fundamental cell of the first grid, redrawn inside scatterers.
    UniformCell,
    /// Leaving a random scatterer of the given grid with uniform exit parameter.
    AtScatterer(Mark),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DirectionLaw {
    Uniform,
    /// Piecewise-constant density on equal angle bins of [0, 2π) (d = 2).
    Table(Vec<f64>),
}

impl DirectionLaw {
    fn validate(&self, d: usize) -> Result<(), SceneError> {
        match self {
            DirectionLaw::Uniform => Ok(()),
            DirectionLaw::Table(w) => {
                if d != 2 || w.is_empty() || w.iter().any(|x| !(*x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
                    Err(SceneError::BadDirectionTable)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match self {
            DirectionLaw::Uniform if d == 2 => {
                let a: f64 = rng.random_range(0.0..TAU);
                vec![a.cos(), a.sin()]
            }
            DirectionLaw::Uniform => loop {
                let x = uniform_in_ball(d, rng);
                let n = norm(&x);
                if n > 1e-3 {
                    return x.into_iter().map(|y| y / n).collect();
                }
            },
            DirectionLaw::Table(w) => {
                let total: f64 = w.iter().sum();
                let mut u: f64 = rng.random::<f64>() * total;
                let mut k = w.len() - 1;
                for (i, wi) in w.iter().enumerate() {
                    if u < *wi {
                        k = i;
                        break;
                    }
                    u -= wi;
                }
                let width = TAU / w.len() as f64;
                let a = (k as f64 + rng.random::<f64>()) * width;
                vec![a.cos(), a.sin()]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub xi: f64,
    pub mark: Option<Mark>,
    pub w: f64,
    pub censored: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathSamples {
    pub samples: Vec<PathSample>,
    /// Starts or hits discarded and redrawn.
    pub resampled: u64,
}

impl PathSamples {
    /// Fraction of samples with ξ > x (censored samples count as exceeding).
    pub fn tail_at(&self, x: f64) -> f64 {
        let n = self.samples.len().max(1) as f64;
        self.samples.iter().filter(|s| s.censored || s.xi > x).count() as f64 / n
    }
}
