//! The limiting random flight: first-collision and transition kernels
//! sampled through random configurations, hard-disk scattering, merging of
//! per-class kernels, and trajectory reconstruction.
//!
//! All kernels work in the frame of the incoming velocity, so a sample is a
//! triple (ξ, ψ, w) and the outgoing velocity follows from `scatter`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridalg::{Mark, Presentation};
use crate::homspace::{ConfigMode, ConfigurationSampler, CylinderHit, HomspaceError};
use crate::planar::Vec2;
use crate::rng::{par_sample, tags};
use crate::scene::scatter_in_frame;


pub const DEFAULT_XI_MAX: f64 = 1e6;

#[derive(Debug, Error)]
pub enum FlightError {
    #[error(transparent)]
    Homspace(#[from] HomspaceError),
    #[error("unknown mark {0}")]
    UnknownMark(Mark),
    #[error("exit parameter {0} outside (-1, 1)")]
    BadExit(f64),
    #[error("censoring horizon must be positive and finite")]
    BadHorizon,
}

/// One collision of the limiting flight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightEvent {
    pub xi: f64,
    /// None when censored.
    pub mark: Option<Mark>,
    pub w: f64,
    /// Outgoing unit velocity.
    pub velocity: Vec2,
    pub censored: bool,
}

/// Exit parameter of a hard disk: the transverse coordinate of the impact
/// point in the outgoing frame, which equals the impact parameter.
pub fn exit_parameter(_v_in: Vec2, w: f64) -> f64 {
    w
}

/// Outgoing velocity for incoming unit velocity `v_in` and impact parameter w.
pub fn scatter(v_in: Vec2, w: f64) -> Vec2 {
    let f = scatter_in_frame(w);
    let out = [v_in[0] * f[0] - v_in[1] * f[1], v_in[1] * f[0] + v_in[0] * f[1]];
    let n = out[0].hypot(out[1]);
    [out[0] / n, out[1] / n]
}

fn event(hit: Option<CylinderHit>, shift: f64, v_in: Vec2, xi_max: f64) -> FlightEvent {
    match hit {
        Some(h) => {
            let w = shift - h.y;
            FlightEvent {
                xi: h.x,
                mark: Some(h.mark),
                w,
                velocity: scatter(v_in, w),
                censored: false,
            }
        }
        None => FlightEvent {
            xi: xi_max,
            mark: None,
            w: 0.0,
            velocity: v_in,
            censored: true,
        },
    }
}

fn check_horizon(xi_max: f64) -> Result<(), FlightError> {
    if xi_max.is_finite() && xi_max > 0.0 {
        Ok(())
    } else {
        Err(FlightError::BadHorizon)
    }
}

fn check_exit(w: f64) -> Result<(), FlightError> {
    if w.abs() < 1.0 {
        Ok(())
    } else {
        Err(FlightError::BadExit(w))
    }
}

/// Kernels of one presentation.
#[derive(Clone, Debug)]
pub struct FlightSampler {
    generic: ConfigurationSampler,
    marked: Vec<ConfigurationSampler>,
    marks: Vec<Mark>,
    weights: Vec<f64>,
}

impl FlightSampler {
    /// Requires an admissible presentation in dimension 2.
    pub fn new(p: &Presentation) -> Result<Self, FlightError> {
        let marks = p.marks();
        let marked = marks
            .iter()
            .map(|m| ConfigurationSampler::new(p, ConfigMode::Mark(*m)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FlightSampler {
            generic: ConfigurationSampler::new(p, ConfigMode::Generic)?,
            marked,
            weights: p.weights_f64(),
            marks,
        })
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    /// Relative densities 𝗆(ψ) in mark order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn density(&self) -> f64 {
        self.generic.density()
    }

    fn mark_index(&self, psi: Mark) -> Result<usize, FlightError> {
        self.marks
            .iter()
            .position(|m| *m == psi)
            .ok_or(FlightError::UnknownMark(psi))
    }

    /// Draws ψ with probability 𝗆(ψ).
    pub fn draw_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> Mark {
        let mut u: f64 = rng.random();
        for (m, w) in self.marks.iter().zip(&self.weights) {
            if u < *w {
                return *m;
            }
            u -= w;
        }
        *self.marks.last().expect("presentation has a grid")
    }

    /// First collision from a generic point, shifted transversally by w′.
    pub fn sample_initial_shifted<R: Rng + ?Sized>(&self, shift: f64, v_in: Vec2, rng: &mut R, xi_max: f64) -> FlightEvent {
        let conf = self.generic.sample(rng);
        event(conf.first_in_cylinder(shift, xi_max), shift, v_in, xi_max)
    }

    /// First collision from a generic point.
    pub fn sample_initial<R: Rng + ?Sized>(&self, v_in: Vec2, rng: &mut R, xi_max: f64) -> FlightEvent {
        self.sample_initial_shifted(0.0, v_in, rng, xi_max)
    }

    /// Next collision after leaving a scatterer of grid ψ′ with exit parameter w′.
    pub fn sample_transition<R: Rng + ?Sized>(
        &self,
        prev: Mark,
        exit: f64,
        v_in: Vec2,
        rng: &mut R,
        xi_max: f64,
    ) -> Result<FlightEvent, FlightError> {
        check_exit(exit)?;
        let conf = self.marked[self.mark_index(prev)?].sample(rng);
        Ok(event(conf.first_in_cylinder(exit, xi_max), exit, v_in, xi_max))
    }

    /// Flight of up to `n_events` collisions, stopping at the first censored one.
    pub fn run_flight<R: Rng + ?Sized>(&self, n_events: usize, v0: Vec2, rng: &mut R, xi_max: f64) -> Trajectory {
        let mut events = Vec::with_capacity(n_events);
        let mut positions = vec![[0.0, 0.0]];
        let mut v = v0;
        for step in 0..n_events {
            let e = match events.last() {
                None => self.sample_initial(v, rng, xi_max),
                Some(FlightEvent { mark: Some(m), w, .. }) => self
                    .sample_transition(*m, exit_parameter(v, *w), v, rng, xi_max)
                    .expect("marks and exits come from the chain"),
                Some(_) => unreachable!("censored events end the chain"),
            };
            let q = positions[step];
            positions.push([q[0] + e.xi * v[0], q[1] + e.xi * v[1]]);
            v = e.velocity;
            events.push(e);
            if e.censored {
                break;
            }
        }
        Trajectory { events, positions }
    }
}

/// Collision events with positions Q₀ = 0, Q_j = Q_{j−1} + ξ_j V_{j−1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub events: Vec<FlightEvent>,
    pub positions: Vec<Vec2>,
}

impl Trajectory {
    pub fn censored(&self) -> bool {
        self.events.last().is_some_and(|e| e.censored)
    }
}

/// Transition kernel assembled from independent per-class kernels.
#[derive(Clone, Debug)]
pub struct MergedSampler {
    classes: Vec<FlightSampler>,
}

/// A merged draw with the class-local path lengths it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedDraw {
    pub event: FlightEvent,
    pub class_xi: Vec<f64>,
}

impl MergedSampler {
    pub fn new(p: &Presentation) -> Result<Self, FlightError> {
        let classes = (0..p.num_classes())
            .map(|c| {
                let restricted = p.class_restricted(c).map_err(HomspaceError::from)?;
                FlightSampler::new(&restricted)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MergedSampler { classes })
    }

    /// Per class: a transition draw for the class of ψ′ and a generic draw
    /// otherwise; keeps the shortest, ties going to the lower class.
    pub fn merged_transition<R: Rng + ?Sized>(
        &self,
        prev: Mark,
        exit: f64,
        v_in: Vec2,
        rng: &mut R,
        xi_max: f64,
    ) -> Result<MergedDraw, FlightError> {
        check_exit(exit)?;
        if prev.class >= self.classes.len() {
            return Err(FlightError::UnknownMark(prev));
        }
        let mut best: Option<FlightEvent> = None;
        let mut class_xi = Vec::with_capacity(self.classes.len());
        for (c, s) in self.classes.iter().enumerate() {
            let mut e = if c == prev.class {
                s.sample_transition(Mark::new(0, prev.member), exit, v_in, rng, xi_max)
                    .map_err(|_| FlightError::UnknownMark(prev))?
            } else {
                s.sample_initial_shifted(exit, v_in, rng, xi_max)
            };
            e.mark = e.mark.map(|m| Mark::new(c, m.member));
            class_xi.push(e.xi);
            let better = match best {
                None => true,
                Some(b) => !e.censored && (b.censored || e.xi < b.xi),
            };
            if better {
                best = Some(e);
            }
        }
        Ok(MergedDraw {
            event: best.expect("at least one class"),
            class_xi,
        })
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    [a.cos(), a.sin()]
}

/// Independent first-collision draws with incoming velocity 𝒆₁.
pub fn initial_samples(
    s: &FlightSampler,
    n: usize,
    seed: u64,
    workers: usize,
    xi_max: f64,
) -> Result<Vec<FlightEvent>, FlightError> {
    check_horizon(xi_max)?;
    Ok(par_sample(n, workers, seed, tags::FLIGHT, |rng| s.sample_initial([1.0, 0.0], rng, xi_max)))
}

/// Independent transition draws from a fixed (ψ′, w′) with incoming velocity 𝒆₁.
pub fn transition_samples(
    s: &FlightSampler,
    prev: Mark,
    exit: f64,
    n: usize,
    seed: u64,
    workers: usize,
    xi_max: f64,
) -> Result<Vec<FlightEvent>, FlightError> {
    check_horizon(xi_max)?;
    check_exit(exit)?;
    s.mark_index(prev)?;
    Ok(par_sample(n, workers, seed, tags::TRANSITION, |rng| {
        s.sample_transition(prev, exit, [1.0, 0.0], rng, xi_max).expect("checked inputs")
    }))
}

/// Transition draws with ψ′ ~ 𝗆 and w′ uniform on (−1, 1).
pub fn averaged_transition_samples(
    s: &FlightSampler,
    n: usize,
    seed: u64,
    workers: usize,
    xi_max: f64,
) -> Result<Vec<FlightEvent>, FlightError> {
    check_horizon(xi_max)?;
    Ok(par_sample(n, workers, seed, tags::TRANSITION, |rng| {
        let prev = s.draw_mark(rng);
        let exit = loop {
            let w: f64 = rng.random_range(-1.0..1.0);
            if w > -1.0 {
                break w;
            }
        };
        s.sample_transition(prev, exit, [1.0, 0.0], rng, xi_max).expect("valid mark")
    }))
}

/// Independent merged draws from a fixed (ψ′, w′).
pub fn merged_samples(
    s: &MergedSampler,
    prev: Mark,
    exit: f64,
    n: usize,
    seed: u64,
    workers: usize,
    xi_max: f64,
) -> Result<Vec<MergedDraw>, FlightError> {
    check_horizon(xi_max)?;
    check_exit(exit)?;
    if prev.class >= s.classes.len() || prev.member >= s.classes[prev.class].marks.len() {
        return Err(FlightError::UnknownMark(prev));
    }
    Ok(par_sample(n, workers, seed, tags::MERGED, |rng| {
        s.merged_transition(prev, exit, [1.0, 0.0], rng, xi_max).expect("checked inputs")
    }))
}

/// Independent trajectories with uniformly random initial velocity.
pub fn run_ensemble(
    s: &FlightSampler,
    trajectories: usize,
    events: usize,
    seed: u64,
    workers: usize,
    xi_max: f64,
) -> Result<Vec<Trajectory>, FlightError> {
    check_horizon(xi_max)?;
    Ok(par_sample(trajectories, workers, seed, tags::TRAJECTORY, |rng| {
        let v0 = random_direction(rng);
        s.run_flight(events, v0, rng, xi_max)
    }))
}

/// Inter-collision path lengths (every event after the first) in trajectory
/// order; censored events contribute ξ_max.
pub fn inter_collision_lengths(trajs: &[Trajectory]) -> Vec<f64> {
    trajs
        .iter()
        .flat_map(|t| t.events.iter().skip(1).map(|e| e.xi))
        .collect()
}

/// Mean of min(ξ, cap)².
pub fn truncated_second_moment(xs: &[f64], cap: f64) -> f64 {
    xs.iter().map(|x| x.min(cap).powi(2)).sum::<f64>() / xs.len().max(1) as f64
}

/// Mean of min(ξ, cap) with its standard error.
pub fn truncated_mean(xs: &[f64], cap: f64) -> (f64, f64) {
    let t: Vec<f64> = xs.iter().map(|x| x.min(cap)).collect();
    crate::lab::stats::mean_stderr(&t)
}
