use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::{scaled_pair, square_lattice, three_grid_presentation, two_lattices};
use crate::gridalg::{canonical_presentation, make_admissible};
use crate::lab::stats::{ks_one_sample, loglog_fit};
use crate::planar::gauss_reduce;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn det(a: &Matrix2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

#[test]
fn haar_matrices_are_unimodular_with_short_vectors() {
    let mut r = rng(1);
    let hermite = (4.0f64 / 3.0).powf(0.25);
    for _ in 0..20_000 {
        let a = haar_sl2(&mut r);
        assert!((det(&a) - 1.0).abs() <= 1e-12);
        let (b1, _) = gauss_reduce(a[0], a[1]);
        assert!(b1[0].hypot(b1[1]) <= hermite + 1e-12);
    }
}

#[test]
fn haar_lattices_average_pi_points_in_the_disc() {
    let (mean, se) = haar_ball_count(200_000, 3, 1);
    assert!((mean - PI).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn square_lattice_mark_mode_is_a_punctured_random_lattice() {
    let p = square_lattice();
    let s = ConfigurationSampler::new(&p, ConfigMode::Mark(Mark::new(0, 0))).unwrap();
    let mut r = rng(2);
    for _ in 0..100 {
        let c = s.sample(&mut r);
        assert_eq!(c.classes.len(), 1);
        assert!(c.classes[0].u[0].iter().all(|x| *x == 0.0));
        assert_eq!(c.grids[0].1.origin, [0.0, 0.0]);
        assert!(c.has_origin(Mark::new(0, 0)));
        assert_eq!(c.count_in_cylinder(1e-9, 0.0), 0);
    }
}

#[test]
fn generic_mode_draws_one_matrix_per_class() {
    let p = two_lattices();
    let s = ConfigurationSampler::new(&p, ConfigMode::Generic).unwrap();
    let c = s.sample(&mut rng(4));
    assert_eq!(c.classes.len(), 2);
    assert_ne!(c.classes[0].a, c.classes[1].a);
    for cc in &c.classes {
        assert!((det(&cc.a) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn mark_rows_are_integral() {
    let p = three_grid_presentation();
    for psi in p.marks() {
        let s = ConfigurationSampler::new(&p, ConfigMode::Mark(psi)).unwrap();
        let mut r = rng(5);
        for _ in 0..200 {
            let c = s.sample(&mut r);
            let row = &c.classes[psi.class].u[psi.member];
            assert!(row.iter().all(|x| x.min(1.0 - x) <= 1e-9));
        }
    }
}

#[test]
fn full_torus_marginals_are_uniform() {
    let p = two_lattices();
    let s = ConfigurationSampler::new(&p, ConfigMode::Generic).unwrap();
    let mut r = rng(6);
    let draws: Vec<Vec<Vec<f64>>> = (0..100_000).map(|_| s.torus(0).sample(&mut r)).collect();
    for col in 0..2 {
        let xs: Vec<f64> = draws.iter().map(|u| u[0][col]).collect();
        let (_, pval) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!(pval > 1e-3, "column {col}: p = {pval}");
    }
}

fn identity_configuration() -> RandomConfiguration {
    RandomConfiguration {
        mode: ConfigMode::Generic,
        classes: vec![ClassConfig {
            u: vec![vec![0.0, 0.0]],
            a: [[1.0, 0.0], [0.0, 1.0]],
            component: 0,
        }],
        grids: vec![(Mark::new(0, 0), PlanarGrid::new([1.0, 0.0], [0.0, 1.0], [0.0, 0.0]))],
    }
}

#[test]
fn square_cylinder_counts() {
    let c = identity_configuration();
    assert_eq!(c.count_in_cylinder(3.5, 0.0), 3);
    assert_eq!(c.count_in_cylinder(1.0, 0.0), 0);
    let h = c.first_in_cylinder(0.0, 100.0).unwrap();
    assert_eq!((h.x, h.y), (1.0, 0.0));
    assert_eq!(c.first_in_cylinder(0.5, 100.0).unwrap().y, 0.0);
    assert!(c.first_in_cylinder(0.0, 0.9).is_none());
}

fn brute_points(c: &RandomConfiguration) -> Vec<(Vec2, Mark)> {
    let mut out = Vec::new();
    for (mark, g) in &c.grids {
        for m1 in -70..=70 {
            for m2 in -70..=70 {
                out.push((g.point(m1 as f64, m2 as f64), *mark));
            }
        }
    }
    out
}

#[test]
fn cylinder_queries_agree_with_brute_force() {
    let p = three_grid_presentation();
    let s = ConfigurationSampler::new(&p, ConfigMode::Generic).unwrap();
    let mut r = rng(7);
    let mut checked = 0;
    while checked < 40 {
        let c = s.sample(&mut r);
        if c.classes.iter().any(|cc| cc.a.iter().flatten().any(|x| x.abs() > 3.0)) {
            continue;
        }
        checked += 1;
        let pts = brute_points(&c);
        for _ in 0..5 {
            let xi: f64 = r.random_range(0.1..12.0);
            let shift: f64 = r.random_range(-2.0..2.0);
            let inside: Vec<&(Vec2, Mark)> = pts
                .iter()
                .filter(|(q, _)| q[0] > 0.0 && q[0] < xi && (q[1] - shift).abs() < 1.0)
                .collect();
            assert_eq!(c.count_in_cylinder(xi, shift), inside.len() as u64);
            let best = inside.iter().map(|(q, _)| q[0]).fold(f64::INFINITY, f64::min);
            match c.first_in_cylinder(shift, xi) {
                Some(h) => assert!((h.x - best).abs() < 1e-9),
                None => assert!(best.is_infinite()),
            }
        }
    }
}

#[test]
fn point_density_matches_total_density() {
    let region = Region::Box {
        x0: 0.0,
        x1: 10.0,
        y0: 0.0,
        y1: 10.0,
    };
    for (p, nbar) in [(two_lattices(), 2.0), (three_grid_presentation(), 3.0)] {
        let s = ConfigurationSampler::new(&p, ConfigMode::Generic).unwrap();
        let counts = par_sample(10_000, 1, 8, tags::SIEGEL, |r| s.sample(r).count_all_in_region(&region) as f64 / 100.0);
        let (mean, se) = mean_stderr(&counts);
        assert!((mean - nbar).abs() < 3.0 * se, "{mean} ± {se} vs {nbar}");
    }
}

#[test]
fn siegel_examples() {
    let p = square_lattice();
    let psi = Mark::new(0, 0);
    let boxed = Region::Box {
        x0: 2.0,
        x1: 5.0,
        y0: 1.0,
        y1: 3.0,
    };
    let g = siegel_check(&p, psi, boxed, ConfigMode::Generic, 20_000, 9, 1).unwrap();
    assert_eq!(g.predicted, 6.0);
    assert!(g.z_score().abs() < 3.0, "{g:?}");
    let ball = Region::Ball {
        center: [0.0, 0.0],
        radius: 0.5,
    };
    let m = siegel_check(&p, psi, ball, ConfigMode::Mark(psi), 20_000, 10, 1).unwrap();
    assert_eq!(m.atom, 1.0);
    assert_eq!(m.atom_mc, 1.0);
    assert!((m.predicted - (1.0 + PI / 4.0)).abs() < 1e-12);
    assert!(m.z_score().abs() < 3.0, "{m:?}");
    let scaled = make_admissible(&canonical_presentation(&scaled_pair(&["0", "1/2"])).unwrap()).unwrap();
    let big = scaled.marks().into_iter().find(|m| scaled.density_f64(*m) < 0.5).unwrap();
    assert_eq!(scaled.density_f64(big), 0.25);
    let r = siegel_check(&scaled, big, boxed, ConfigMode::Generic, 20_000, 11, 1).unwrap();
    assert_eq!(r.predicted, 1.5);
    assert!(r.z_score().abs() < 3.0, "{r:?}");
}

#[test]
fn bad_inputs_are_errors() {
    let p = two_lattices();
    assert!(matches!(
        tail_estimate(&p, TailScope::Whole, TailMode::Generic, &[1.0, 1.0], 10, 1, 1),
        Err(HomspaceError::BadXiGrid)
    ));
    let mode = TailMode::Mark {
        psi: Mark::new(1, 0),
        shift: 0.0,
    };
    assert!(matches!(
        tail_estimate(&p, TailScope::Class(0), mode, &[1.0], 10, 1, 1),
        Err(HomspaceError::MarkOutsideClass { .. })
    ));
    let bad = Region::Ball {
        center: [0.0, 0.0],
        radius: 0.0,
    };
    assert!(siegel_check(&p, Mark::new(0, 0), bad, ConfigMode::Generic, 10, 1, 1).is_err());
}

#[test]
fn tails_are_monotone_deterministic_and_start_at_one() {
    let p = two_lattices();
    let xi = crate::lab::stats::log_grid(1e-3, 8.0, 12);
    let a = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, 4_000, 12, 1).unwrap();
    let b = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, 4_000, 12, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.f_raw[0] > 0.99);
    assert!(a.f_raw.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(a.f_raw, a.f_iso);
    let phi = phi_from_tail(&a, 2.0).unwrap();
    assert!(phi.phi.iter().all(|v| (0.0..=4.0).contains(v)));
}

#[test]
fn product_of_tails() {
    let p = square_lattice();
    let xi = crate::lab::stats::log_grid(0.5, 8.0, 6);
    let t = tail_estimate(&p, TailScope::Whole, TailMode::Generic, &xi, 2_000, 13, 1).unwrap();
    assert_eq!(product_tail(std::slice::from_ref(&t)).unwrap().f_raw, t.f_raw);
    let synthetic = TailEstimate {
        f_raw: xi.iter().map(|x| 0.5 / x).collect(),
        f_iso: xi.iter().map(|x| 0.5 / x).collect(),
        stderr: vec![0.0; xi.len()],
        ..t.clone()
    };
    let sq = product_tail(&[synthetic.clone(), synthetic]).unwrap();
    let fit = loglog_fit(&sq.xi, &sq.f_iso, &sq.stderr, 4).unwrap();
    assert!((fit.slope + 2.0).abs() < 1e-9);
    let mut shifted = t.clone();
    shifted.xi[0] = 0.4;
    assert!(matches!(product_tail(&[t, shifted]), Err(HomspaceError::GridMismatch)));
}
