//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs at full size; expect several minutes on one core.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use gridgas::catalog::{scaled_pair, square_lattice, three_grid_presentation, three_grids, two_lattices};
use gridgas::exactfield::rational::rat;
use gridgas::exactfield::{AlgebraicNumber, Field, FieldSpec, NumberField, Rational};
use gridgas::flight::{
    averaged_transition_samples, inter_collision_lengths, merged_samples, run_ensemble, transition_samples,
    truncated_mean, truncated_second_moment, FlightSampler, MergedSampler, DEFAULT_XI_MAX,
};
use gridgas::gridalg::matrix::{identity, mat_mul, NfMatrix};
use gridgas::gridalg::presentation::grid_window_points;
use gridgas::gridalg::{canonical_presentation, frak_l, make_admissible, Grid, Mark, Presentation, RationalSubspace};
use gridgas::homspace::{
    haar_ball_count, product_tail, siegel_check, tail_estimate, ConfigMode, Region, TailMode, TailScope,
};
use gridgas::lab::experiment::tail_slope;
use gridgas::lab::stats::{ks_two_sample, log_grid};
use gridgas::lab::{run_experiment, ExperimentConfig, ExperimentKind};
use gridgas::rng::{derive, stream, StreamRng};
use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn rng(k: u64, i: u64) -> StreamRng {
    stream(SEED, 100 + k, i)
}

fn q2() -> Field {
    NumberField::new(FieldSpec::quadratic(2)).unwrap()
}

fn num(f: &Field, a: (i64, i64), b: (i64, i64)) -> AlgebraicNumber {
    AlgebraicNumber::from_coeffs(f, vec![rat(a.0, a.1), rat(b.0, b.1)]).unwrap()
}

fn small_rat(r: &mut StreamRng) -> (i64, i64) {
    (r.random_range(-2..=2), r.random_range(1..=3))
}

fn element(f: &Field, r: &mut StreamRng) -> AlgebraicNumber {
    let a = small_rat(r);
    let b = if r.random::<bool>() { (0, 1) } else { small_rat(r) };
    num(f, a, b)
}

/// Shear and diagonal rescaling of ℤ² or of the incommensurable base M₂, with a
/// random scale and shift.
fn random_grid(f: &Field, r: &mut StreamRng) -> Grid {
    let base = if r.random::<bool>() {
        identity(f, 2)
    } else {
        vec![
            vec![num(f, (1, 1), (0, 1)), num(f, (0, 1), (1, 1))],
            vec![num(f, (1, 1), (0, 1)), num(f, (1, 1), (1, 1))],
        ]
    };
    let shear: i64 = r.random_range(-2..=2);
    let s: NfMatrix = vec![
        vec![num(f, (1, 1), (0, 1)), num(f, (shear, 1), (0, 1))],
        vec![num(f, (0, 1), (0, 1)), num(f, (1, 1), (0, 1))],
    ];
    let d: NfMatrix = if r.random::<bool>() {
        vec![
            vec![num(f, (2, 1), (0, 1)), num(f, (0, 1), (0, 1))],
            vec![num(f, (0, 1), (0, 1)), num(f, (1, 2), (0, 1))],
        ]
    } else {
        identity(f, 2)
    };
    let m = mat_mul(&mat_mul(&d, &s), &base);
    let scales = [(1, 1), (2, 1), (3, 2)];
    let c = if r.random_range(0..4) == 3 {
        num(f, (0, 1), (1, 1))
    } else {
        num(f, scales[r.random_range(0..3)], (0, 1))
    };
    let shifts = [((0, 1), (0, 1)), ((1, 2), (0, 1)), ((1, 3), (0, 1)), ((0, 1), (1, 1)), ((0, 1), (1, 2))];
    let mut w = || {
        let (a, b) = shifts[r.random_range(0..shifts.len())];
        num(f, a, b)
    };
    let w = vec![w(), w()];
    Grid::new(c, w, m).unwrap()
}

fn random_grids(f: &Field, r: &mut StreamRng) -> Vec<Grid> {
    let n = r.random_range(1..=3);
    (0..n).map(|_| random_grid(f, r)).collect()
}

fn union_points(grids: &[Grid], h: i64) -> HashSet<Vec<AlgebraicNumber>> {
    grids.iter().flat_map(|g| grid_window_points(g, h)).collect()
}

fn lemma_identities_hold(p: &Presentation) -> bool {
    p.marks().into_iter().all(|psi| {
        let lpsi = p.subspace_lpsi(psi, psi.class).unwrap();
        let lj = p.subspace_lj(psi.class).unwrap();
        lpsi == lj.intersect_coordinate_hyperplane(psi.member)
            && lj == lpsi.plus_line(&p.c_tilde(psi.class).unwrap())
    })
}

fn exact_algebra() -> Verdict {
    let verdict = |w1: &[&str]| {
        canonical_presentation(&scaled_pair(w1))
            .unwrap()
            .is_admissible()
            .unwrap()
            .is_admissible()
    };
    let irrational = verdict(&["0", "1/2"]);
    let rational = verdict(&["1/4"]);
    let a_ok = irrational && !rational;

    let f = q2();
    let mut b_ok = 0;
    for k in 0..25 {
        let grids = random_grids(&f, &mut rng(1, k));
        let expected = union_points(&grids, 6);
        let a = make_admissible(&canonical_presentation(&grids).unwrap()).unwrap();
        if a.is_admissible().unwrap().is_admissible() && a.window_points(6) == expected {
            b_ok += 1;
        }
    }

    let remark = make_admissible(&canonical_presentation(&three_grids()).unwrap()).unwrap();
    let sizes = |p: &Presentation| {
        let mut s: Vec<usize> = (0..p.num_classes()).map(|j| p.class_size(j)).collect();
        s.sort_unstable();
        s
    };
    let c_ok = remark.num_classes() == 2
        && sizes(&remark) == [1, 2]
        && sizes(&three_grid_presentation()) == [1, 2];

    let mut d_ok = 0;
    let mut marks = 0;
    for k in 0..10 {
        let grids = random_grids(&f, &mut rng(2, k));
        let p = make_admissible(&canonical_presentation(&grids).unwrap()).unwrap();
        marks += p.marks().len();
        if p.is_admissible().unwrap().is_admissible() && lemma_identities_hold(&p) {
            d_ok += 1;
        }
    }
    Verdict::new(
        a_ok && b_ok == 25 && c_ok && d_ok == 10,
        format!(
            "(a) sqrt2 shift {irrational}, rational shift {rational}; (b) {b_ok}/25; (c) classes {} sizes {:?}; (d) {d_ok}/10 over {marks} marks",
            remark.num_classes(),
            sizes(&remark)
        ),
    )
}

/// Integer vectors a ∈ [−4, 4]^r with a·s ∈ n⁻¹ℤ (n ≤ 24) for every s and a·c = 0.
fn annihilates(a: &[i64], s: &[Vec<f64>], line: Option<&[f64]>) -> bool {
    let dot = |v: &[f64]| a.iter().zip(v).map(|(x, y)| *x as f64 * y).sum::<f64>();
    s.iter().all(|v| {
        let d = dot(v);
        (1..=24).any(|n| {
            let t = d * n as f64;
            (t - t.round()).abs() < 1e-9
        })
    }) && line.map_or(true, |c| dot(c).abs() < 1e-9)
}

fn box_annihilators(r: usize, s: &[Vec<f64>], line: Option<&[f64]>) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut a = vec![-4i64; r];
    loop {
        if a.iter().any(|&x| x != 0) && annihilates(&a, s, line) {
            out.push(a.clone());
        }
        let mut k = 0;
        loop {
            if k == r {
                return out;
            }
            a[k] += 1;
            if a[k] <= 4 {
                break;
            }
            a[k] = -4;
            k += 1;
        }
    }
}

fn floats(v: &[AlgebraicNumber]) -> Vec<f64> {
    v.iter().map(AlgebraicNumber::to_f64).collect()
}

fn int_span(r: usize, rows: &[Vec<BigInt>]) -> RationalSubspace {
    let rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    RationalSubspace::span(r, &rows)
}

fn frak_l_oracle() -> Verdict {
    let f = q2();
    let mut agree = 0;
    let mut boxed = 0;
    for k in 0..200 {
        let mut r_ = rng(3, k);
        let r = r_.random_range(1..=3);
        let count = r_.random_range(0..=3);
        let s: Vec<Vec<AlgebraicNumber>> = (0..count).map(|_| (0..r).map(|_| element(&f, &mut r_)).collect()).collect();
        let line: Option<Vec<AlgebraicNumber>> =
            r_.random::<bool>().then(|| (0..r).map(|_| element(&f, &mut r_)).collect());
        let ours = frak_l(r, &s, line.as_deref()).unwrap();
        let sf: Vec<Vec<f64>> = s.iter().map(|v| floats(v)).collect();
        let lf = line.as_ref().map(|c| floats(c));
        let ann: Vec<Vec<BigInt>> = box_annihilators(r, &sf, lf.as_deref())
            .into_iter()
            .map(|a| a.into_iter().map(BigInt::from).collect())
            .collect();
        let oracle_perp = int_span(r, &ann);
        let ours_perp = int_span(r, ours.perp_basis());
        let sound = ours.perp_basis().iter().all(|a| {
            let a: Vec<i64> = a.iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect();
            annihilates(&a, &sf, lf.as_deref())
        });
        let small = ours.perp_basis().iter().flatten().all(|x| x.abs() <= BigInt::from(4));
        if small {
            boxed += 1;
        }
        if sound && oracle_perp.is_subspace_of(&ours_perp) && (!small || oracle_perp == ours_perp) {
            agree += 1;
        }
    }
    Verdict::new(
        agree == 200,
        format!("{agree}/200 agree ({boxed} fully inside the search box)"),
    )
}

fn random_box(r: &mut StreamRng) -> Region {
    let x0 = r.random_range(-3.0..2.0);
    let y0 = r.random_range(-3.0..2.0);
    Region::Box {
        x0,
        x1: x0 + r.random_range(0.3..2.5),
        y0,
        y1: y0 + r.random_range(0.3..2.5),
    }
}

fn siegel() -> Verdict {
    let w = workers();
    let (mean, se) = haar_ball_count(1_000_000, derive(SEED, 30), w);
    let haar_ok = (mean - std::f64::consts::PI).abs() <= 3.0 * se;
    let p = three_grid_presentation();
    let marks = p.marks();
    let mut passed = [0usize; 2];
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let mut r = rng(4, k);
        let region = random_box(&mut r);
        let psi = marks[r.random_range(0..marks.len())];
        let m = marks[r.random_range(0..marks.len())];
        for (slot, mode) in [ConfigMode::Generic, ConfigMode::Mark(m)].into_iter().enumerate() {
            let rep = siegel_check(&p, psi, region.clone(), mode, 100_000, derive(SEED, 31 + 2 * k + slot as u64), w).unwrap();
            let z = rep.z_score();
            worst = worst.max(z.abs());
            if z.abs() <= 3.0 {
                passed[slot] += 1;
            }
        }
    }
    Verdict::new(
        haar_ok && passed == [20, 20],
        format!(
            "disc count {mean:.5} +- {se:.5} vs pi; boxes generic {}/20, mark {}/20, max |z| {worst:.2}",
            passed[0], passed[1]
        ),
    )
}

fn mean_free_path() -> Verdict {
    let w = workers();
    let cap = 1e3;
    let n = 100_000;
    let p = two_lattices();
    let nbar = p.total_density_f64();
    let s = FlightSampler::new(&p).unwrap();
    let xs: Vec<f64> = averaged_transition_samples(&s, n, derive(SEED, 40), w, cap)
        .unwrap()
        .iter()
        .map(|e| e.xi)
        .collect();
    let (flight, flight_se) = truncated_mean(&xs, cap);
    let t = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &[cap], n, derive(SEED, 41), w).unwrap();
    let limit = (1.0 - t.f_raw[0]) / (2.0 * nbar);
    let limit_se = t.stderr[0] / (2.0 * nbar);
    let remainder = t.f_raw[0] / (2.0 * nbar);
    let target = 1.0 / (2.0 * nbar);
    let agree = (flight - limit).abs() <= 3.0 * (flight_se.powi(2) + limit_se.powi(2)).sqrt();
    let close = |x: f64| ((x + remainder) / target - 1.0).abs() <= 0.05;
    Verdict::new(
        agree && close(flight) && close(limit),
        format!(
            "flight {flight:.5} +- {flight_se:.5}, limit {limit:.5} +- {limit_se:.5}, remainder {remainder:.2e}, target {target}"
        ),
    )
}

fn product_formula() -> Verdict {
    let w = workers();
    let n = 1_000_000;
    let p = two_lattices();
    let xi = log_grid(0.25, 16.0, 12);
    let direct = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, n, derive(SEED, 50), w).unwrap();
    let parts: Vec<_> = (0..p.num_classes())
        .map(|c| tail_estimate(&p, TailScope::Class(c), TailMode::Generic, &xi, n, derive(SEED, 51 + c as u64), w).unwrap())
        .collect();
    let prod = product_tail(&parts).unwrap();
    let mut ok = 0;
    let mut worst = 0.0f64;
    for k in 0..xi.len() {
        let z = (prod.f_raw[k] - direct.f_raw[k]).abs() / (prod.stderr[k].powi(2) + direct.stderr[k].powi(2)).sqrt().max(1e-300);
        worst = worst.max(z);
        if z <= 3.0 {
            ok += 1;
        }
    }
    Verdict::new(ok == xi.len(), format!("{ok}/{} grid points within 3 sigma, max z {worst:.2}", xi.len()))
}

fn power_laws() -> Verdict {
    let w = workers();
    let n = 1_000_000;
    let mut parts = Vec::new();
    let mut pass = true;
    for (classes, p, lo, hi) in [(1.0, square_lattice(), 5.0, 50.0), (2.0, two_lattices(), 2.0, 20.0)] {
        let xi = log_grid(lo, hi, 17);
        let t = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, n, derive(SEED, 60 + classes as u64), w).unwrap();
        match tail_slope(&t, lo, hi) {
            Ok(fit) => {
                pass &= (fit.slope + classes).abs() <= 0.3;
                parts.push(format!("N={classes}: slope {:.3} +- {:.3} ({} points)", fit.slope, fit.stderr, fit.points));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("N={classes}: {e}"));
            }
        }
    }
    Verdict::new(pass, parts.join("; "))
}

fn merging() -> Verdict {
    let w = workers();
    let n = 100_000;
    let p = two_lattices();
    let prev = Mark::new(0, 0);
    let exit = 0.3;
    let direct = transition_samples(&FlightSampler::new(&p).unwrap(), prev, exit, n, derive(SEED, 70), w, DEFAULT_XI_MAX).unwrap();
    let merged = merged_samples(&MergedSampler::new(&p).unwrap(), prev, exit, n, derive(SEED, 71), w, DEFAULT_XI_MAX).unwrap();
    let code = |m: Option<Mark>| m.map_or(-1.0, |m| (m.class * 16 + m.member) as f64);
    let a_xi: Vec<f64> = direct.iter().map(|e| e.xi).collect();
    let b_xi: Vec<f64> = merged.iter().map(|d| d.event.xi).collect();
    let a_w: Vec<f64> = direct.iter().map(|e| e.w).collect();
    let b_w: Vec<f64> = merged.iter().map(|d| d.event.w).collect();
    let a_m: Vec<f64> = direct.iter().map(|e| code(e.mark)).collect();
    let b_m: Vec<f64> = merged.iter().map(|d| code(d.event.mark)).collect();
    let ks = |a: &[f64], b: &[f64]| ks_two_sample(a, b, 1e-3).unwrap();
    let (kx, kw, km) = (ks(&a_xi, &b_xi), ks(&a_w, &b_w), ks(&a_m, &b_m));
    let share = |v: &[f64]| v.iter().filter(|c| **c >= 16.0).count() as f64 / v.len() as f64;
    Verdict::new(
        kx.pass && kw.pass && km.pass,
        format!(
            "KS xi {:.4}, w {:.4}, mark {:.4} (threshold {:.4}); class-2 share direct {:.4} merged {:.4}",
            kx.statistic,
            kw.statistic,
            km.statistic,
            kx.threshold,
            share(&a_m),
            share(&b_m)
        ),
    )
}

fn boltzmann_grad() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, p, k) in [("Z2", square_lattice(), 80), ("two-class", two_lattices(), 81)] {
        let mut cfg = ExperimentConfig::for_presentation(&p);
        cfg.experiment = Some(ExperimentKind::Compare);
        cfg.rho = vec![0.01];
        cfg.samples = Some(100_000);
        cfg.seed = Some(derive(SEED, k));
        cfg.workers = Some(workers());
        let out = run_experiment(&cfg).unwrap();
        let rows: Vec<_> = out
            .stats
            .expect("compare reports statistics")
            .rows
            .into_iter()
            .filter(|r| r.name.starts_with("scene vs limit"))
            .collect();
        let ok = rows.iter().filter(|r| r.pass).count();
        pass &= ok == rows.len() && rows.len() == 4;
        let stats: Vec<String> = rows.iter().map(|r| format!("{:.4}/{:.4}", r.statistic, r.threshold)).collect();
        parts.push(format!("{name} {ok}/{} [{}]", rows.len(), stats.join(" ")));
    }
    Verdict::new(pass, parts.join("; "))
}

fn second_moment() -> Verdict {
    let w = workers();
    let sizes = [1_000usize, 10_000, 100_000];
    let mut parts = Vec::new();
    let mut pass = true;
    for (classes, p) in [(1usize, square_lattice()), (2, two_lattices())] {
        let s = FlightSampler::new(&p).unwrap();
        let trajs = run_ensemble(&s, 100, 1_001, derive(SEED, 90 + classes as u64), w, DEFAULT_XI_MAX).unwrap();
        let xs = inter_collision_lengths(&trajs);
        let m2: Vec<f64> = sizes.iter().map(|&n| truncated_second_moment(&xs[..n], DEFAULT_XI_MAX)).collect();
        let ratios = [m2[1] / m2[0], m2[2] / m2[1]];
        let ok = if classes == 1 {
            ratios.iter().all(|r| *r >= 1.3)
        } else {
            ratios[1] <= 1.15 && ratios[1] >= 1.0 / 1.15
        };
        pass &= ok;
        parts.push(format!(
            "N={classes}: M2 {:.4} {:.4} {:.4}, ratios {:.3} {:.3} ({})",
            m2[0],
            m2[1],
            m2[2],
            ratios[0],
            ratios[1],
            if ok { "ok" } else { "out of bounds" }
        ));
    }
    Verdict::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("exact algebra", exact_algebra),
        ("subspace oracle", frak_l_oracle),
        ("mean value formula", siegel),
        ("mean free path", mean_free_path),
        ("product formula", product_formula),
        ("power-law tails", power_laws),
        ("merging", merging),
        ("small-scatterer limit", boltzmann_grad),
        ("second moment", second_moment),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
