//! Property tests for the grid algebra.

use std::collections::HashSet;

use gridgas::exactfield::rational::rat;
use gridgas::exactfield::{AlgebraicNumber, Field, FieldSpec, NumberField, Rational};
use gridgas::gridalg::matrix::{columns, identity, vec_mat, NfMatrix};
use gridgas::gridalg::presentation::grid_window_points;
use gridgas::gridalg::{
    canonical_presentation, commensurable, frak_l, make_admissible, Grid, Presentation,
    RationalSubspace,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

fn q2() -> Field {
    NumberField::new(FieldSpec::quadratic(2)).unwrap()
}

fn num(f: &Field, a: (i64, i64), b: (i64, i64)) -> AlgebraicNumber {
    AlgebraicNumber::from_coeffs(f, vec![rat(a.0, a.1), rat(b.0, b.1)]).unwrap()
}

fn small_rat() -> impl Strategy<Value = (i64, i64)> {
    (-2i64..=2, 1i64..=3)
}

fn element() -> impl Strategy<Value = ((i64, i64), (i64, i64))> {
    (small_rat(), prop_oneof![Just((0, 1)), small_rat()])
}

fn vectors(r: usize, k: usize) -> impl Strategy<Value = Vec<Vec<((i64, i64), (i64, i64))>>> {
    prop::collection::vec(prop::collection::vec(element(), r), 0..=k)
}

fn to_alg(f: &Field, v: &[Vec<((i64, i64), (i64, i64))>]) -> Vec<Vec<AlgebraicNumber>> {
    v.iter()
        .map(|row| row.iter().map(|&(a, b)| num(f, a, b)).collect())
        .collect()
}

/// Brute force: the integer vectors a ∈ [−4, 4]^r with a·v ∈ n⁻¹ℤ for some
/// n ≤ 24 for every v ∈ S, and a·line = 0.
fn annihilators(r: usize, s: &[Vec<f64>], line: Option<&[f64]>) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut a = vec![-4i64; r];
    loop {
        let ok_points = s.iter().all(|v| {
            let dot: f64 = a.iter().zip(v).map(|(x, y)| *x as f64 * y).sum();
            (1..=24).any(|n| {
                let t = dot * n as f64;
                (t - t.round()).abs() < 1e-9
            })
        });
        let ok_line = line.map_or(true, |c| {
            a.iter().zip(c).map(|(x, y)| *x as f64 * y).sum::<f64>().abs() < 1e-9
        });
        if ok_points && ok_line && a.iter().any(|&x| x != 0) {
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

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect()
}

fn floats(v: &[AlgebraicNumber]) -> Vec<f64> {
    v.iter().map(AlgebraicNumber::to_f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frak_l_matches_brute_force(
        r in 1usize..=3,
        raw in vectors(3, 3),
        raw_line in prop::option::of(prop::collection::vec(element(), 3)),
    ) {
        let f = q2();
        let s: Vec<Vec<AlgebraicNumber>> = to_alg(&f, &raw).into_iter().map(|v| v[..r].to_vec()).collect();
        let line: Option<Vec<AlgebraicNumber>> =
            raw_line.map(|l| to_alg(&f, &[l])[0][..r].to_vec());
        let l = frak_l(r, &s, line.as_deref()).unwrap();
        let sf: Vec<Vec<f64>> = s.iter().map(|v| floats(v)).collect();
        let lf = line.as_ref().map(|c| floats(c));
        let ann = annihilators(r, &sf, lf.as_deref());
        let perp_oracle = RationalSubspace::span(r, &int_rows(&ann));
        let perp_ours = RationalSubspace::span(
            r,
            &l.perp_basis()
                .iter()
                .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
                .collect::<Vec<_>>(),
        );
        let small = l.perp_basis().iter().flatten().all(|x| x.abs() <= BigInt::from(4));
        prop_assert!(perp_oracle.is_subspace_of(&perp_ours));
        if small {
            prop_assert_eq!(perp_oracle, perp_ours);
        }
    }

    #[test]
    fn frak_l_is_monotone(raw in vectors(3, 3), extra in vectors(3, 2)) {
        let f = q2();
        let s = to_alg(&f, &raw);
        let mut s2 = s.clone();
        s2.extend(to_alg(&f, &extra));
        let a = frak_l(3, &s, None).unwrap();
        let b = frak_l(3, &s2, None).unwrap();
        prop_assert!(a.is_subspace_of(&b));
    }
}

/// Unimodular shears and rational diagonals times one of two incommensurable bases.
fn random_grid(f: &Field, base: usize, shear: i64, diag: bool, c: usize, w: (usize, usize)) -> Grid {
    let m2: NfMatrix = vec![
        vec![num(f, (1, 1), (0, 1)), num(f, (0, 1), (1, 1))],
        vec![num(f, (1, 1), (0, 1)), num(f, (1, 1), (1, 1))],
    ];
    let b = if base == 0 { identity(f, 2) } else { m2 };
    let s: NfMatrix = vec![
        vec![num(f, (1, 1), (0, 1)), num(f, (shear, 1), (0, 1))],
        vec![num(f, (0, 1), (0, 1)), num(f, (1, 1), (0, 1))],
    ];
    let d: NfMatrix = if diag {
        vec![
            vec![num(f, (2, 1), (0, 1)), num(f, (0, 1), (0, 1))],
            vec![num(f, (0, 1), (0, 1)), num(f, (1, 2), (0, 1))],
        ]
    } else {
        identity(f, 2)
    };
    let m = gridgas::gridalg::matrix::mat_mul(&gridgas::gridalg::matrix::mat_mul(&d, &s), &b);
    let scales = [num(f, (1, 1), (0, 1)), num(f, (2, 1), (0, 1)), num(f, (0, 1), (1, 1)), num(f, (3, 2), (0, 1))];
    let shifts = [
        num(f, (0, 1), (0, 1)),
        num(f, (1, 2), (0, 1)),
        num(f, (1, 3), (0, 1)),
        num(f, (0, 1), (1, 1)),
        num(f, (0, 1), (1, 2)),
    ];
    Grid::new(scales[c].clone(), vec![shifts[w.0].clone(), shifts[w.1].clone()], m).unwrap()
}

fn grid_strategy() -> impl Strategy<Value = (usize, i64, bool, usize, (usize, usize))> {
    (0usize..2, -2i64..=2, any::<bool>(), 0usize..4, (0usize..5, 0usize..5))
}

fn union_points(grids: &[Grid], h: i64) -> HashSet<Vec<AlgebraicNumber>> {
    grids.iter().flat_map(|g| grid_window_points(g, h)).collect()
}

fn assert_lemma_identities(p: &Presentation) {
    for psi in p.marks() {
        let lpsi = p.subspace_lpsi(psi, psi.class).unwrap();
        let lj = p.subspace_lj(psi.class).unwrap();
        assert_eq!(lpsi, lj.intersect_coordinate_hyperplane(psi.member));
        assert_eq!(lj, lpsi.plus_line(&p.c_tilde(psi.class).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commensurability_is_an_equivalence(a in grid_strategy(), b in grid_strategy(), c in grid_strategy()) {
        let f = q2();
        let gs = [a, b, c].map(|x| random_grid(&f, x.0, x.1, x.2, x.3, x.4));
        let rel = |i: usize, j: usize| commensurable(&gs[i], &gs[j]).unwrap().is_some();
        for i in 0..3 {
            prop_assert!(rel(i, i));
            for j in 0..3 {
                prop_assert_eq!(rel(i, j), rel(j, i));
                prop_assert_eq!(rel(i, j), [a, b, c][i].0 == [a, b, c][j].0);
                for k in 0..3 {
                    if rel(i, j) && rel(j, k) {
                        prop_assert!(rel(i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn presentations_preserve_points_and_admissibility(
        specs in prop::collection::vec(grid_strategy(), 1..=3),
    ) {
        let f = q2();
        let grids: Vec<Grid> = specs.iter().map(|x| random_grid(&f, x.0, x.1, x.2, x.3, x.4)).collect();
        let expected = union_points(&grids, 6);
        let p = canonical_presentation(&grids).unwrap();
        prop_assert!(p.satisfies_disjointness());
        prop_assert_eq!(&p.window_points(6), &expected);
        let a = make_admissible(&p).unwrap();
        prop_assert!(a.is_admissible().unwrap().is_admissible());
        prop_assert!(a.satisfies_disjointness());
        prop_assert_eq!(&a.window_points(6), &expected);
        prop_assert_eq!(&make_admissible(&a).unwrap(), &a);
        assert_lemma_identities(&a);
    }

    #[test]
    fn u_of_q_columns_lie_in_marked_subspace(
        specs in prop::collection::vec(grid_strategy(), 1..=3),
        m in (-5i64..=5, -5i64..=5),
        pick in 0usize..16,
    ) {
        let f = q2();
        let grids: Vec<Grid> = specs.iter().map(|x| random_grid(&f, x.0, x.1, x.2, x.3, x.4)).collect();
        let p = make_admissible(&canonical_presentation(&grids).unwrap()).unwrap();
        let marks = p.marks();
        let psi = marks[pick % marks.len()];
        let g = p.grid(psi).unwrap();
        let mw: Vec<AlgebraicNumber> = g
            .w
            .iter()
            .zip([m.0, m.1])
            .map(|(w, k)| &(w + &AlgebraicNumber::from_int(&f, k)) * &g.c)
            .collect();
        let q = vec_mat(&mw, &g.m);
        prop_assert!(p.contains_point(psi, &q).unwrap());
        for j in 0..p.num_classes() {
            let u = p.u_of_q(j, &q).unwrap();
            let r = p.class_size(j);
            let l = frak_l(r, &columns(&u), None).unwrap();
            prop_assert!(l.is_subspace_of(&p.subspace_lpsi(psi, j).unwrap()));
            if j == psi.class {
                prop_assert!(u[psi.member].iter().all(AlgebraicNumber::is_integer));
            }
        }
    }
}
