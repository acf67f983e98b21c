//! Torus component sets: the finite union of subtorus cosets carrying the
//! marked and generic measures on (ℝ^{r_j}/ℤ^{r_j})^d.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use super::matrix::NfMatrix;
use super::presentation::{Mark, Presentation};
use super::subspace::RationalSubspace;
use super::GridError;
use crate::exactfield::rational::{frac, rat_to_f64};
use crate::exactfield::{AlgebraicNumber, Rational};

pub const DEFAULT_ORBIT_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum TorusMode {
    Generic,
    /// Marked measure at ψ with base point 𝒒 ∈ ℒ_ψ; `None` picks c_ψ𝒘_ψM_{j_ψ}.
    /// For classes other than j_ψ this gives the fiber measure ω_j^ψ.
    Mark {
        psi: Mark,
        q: Option<Vec<AlgebraicNumber>>,
    },
}

type RatMatrix = Vec<Vec<Rational>>;

#[derive(Clone, Debug)]
pub struct TorusComponentSet {
    pub class: usize,
    pub dim: usize,
    pub subspace: RationalSubspace,
    pub base: NfMatrix,
    /// Rational parts mod 1 of one matrix per component.
    pub reps: Vec<RatMatrix>,
    /// Row forced to zero (mark mode).
    pub zero_row: Option<usize>,
    reps_f64: Vec<Vec<Vec<f64>>>,
    basis_f64: Vec<Vec<f64>>,
}

impl TorusComponentSet {
    pub fn num_components(&self) -> usize {
        self.reps.len()
    }

    pub fn rows(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Haar sample on the union of components, entries in [0, 1).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        self.sample_component(rng).1
    }

    /// Like `sample`, also returning the index of the component drawn.
    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<Vec<f64>>) {
        let k = rng.random_range(0..self.reps_f64.len());
        let mut u = self.reps_f64[k].clone();
        for col in 0..self.dim {
            for b in &self.basis_f64 {
                let t: f64 = rng.random();
                for (row, bi) in u.iter_mut().zip(b) {
                    row[col] += t * bi;
                }
            }
        }
        for (i, row) in u.iter_mut().enumerate() {
            for x in row.iter_mut() {
                *x = if Some(i) == self.zero_row { 0.0 } else { x.rem_euclid(1.0) };
                if *x >= 1.0 {
                    *x = 0.0;
                }
            }
        }
        (k, u)
    }

    /// Probability that row i of a sample is ≡ 0 mod 1, i.e. that grid i of
    /// the class has a point at the origin.
    pub fn origin_atom(&self, i: usize) -> f64 {
        let e_perp = self.subspace.intersect_coordinate_hyperplane(i);
        if e_perp != self.subspace {
            return 0.0;
        }
        let hits = self
            .reps
            .iter()
            .filter(|u| u[i].iter().all(Zero::is_zero))
            .count();
        hits as f64 / self.reps.len() as f64
    }
}

fn generators(d: usize) -> Result<Vec<Vec<Vec<i64>>>, GridError> {
    match d {
        2 => Ok(vec![vec![vec![0, -1], vec![1, 0]], vec![vec![1, 1], vec![0, 1]]]),
        3 => Ok(vec![
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
            vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
        ]),
        _ => Err(GridError::UnsupportedDimension(d)),
    }
}

fn act(u: &RatMatrix, g: &[Vec<i64>]) -> RatMatrix {
    let d = g.len();
    u.iter()
        .map(|row| {
            (0..d)
                .map(|k| {
                    let s = (0..d).fold(Rational::zero(), |acc, l| {
                        acc + &row[l] * Rational::from_integer(BigInt::from(g[l][k]))
                    });
                    frac(&s)
                })
                .collect()
        })
        .collect()
}

fn orbit_key(l: &RationalSubspace, u: &RatMatrix) -> Vec<Rational> {
    let d = u.first().map_or(0, Vec::len);
    (0..d)
        .flat_map(|k| {
            let col: Vec<Rational> = u.iter().map(|row| row[k].clone()).collect();
            l.coset_key(&col)
        })
        .collect()
}

/// Component data for class j.
pub fn torus_data(
    p: &Presentation,
    j: usize,
    mode: &TorusMode,
    cap: usize,
) -> Result<TorusComponentSet, GridError> {
    if j >= p.num_classes() {
        return Err(GridError::IndexOutOfRange);
    }
    let gens = generators(p.dim)?;
    let (subspace, base, zero_row) = match mode {
        TorusMode::Generic => (p.subspace_lj(j)?, p.w_matrix(j)?, None),
        TorusMode::Mark { psi, q } => {
            if let super::presentation::Admissibility::Fails(bad) = p.is_admissible()? {
                return Err(GridError::NotAdmissible(bad));
            }
            let q = match q {
                Some(q) => q.clone(),
                None => p.base_point(*psi)?,
            };
            if !p.contains_point(*psi, &q)? {
                return Err(GridError::NotInGrid);
            }
            let zero_row = (psi.class == j).then_some(psi.member);
            (p.subspace_lpsi(*psi, j)?, p.u_of_q(j, &q)?, zero_row)
        }
    };
    let start: RatMatrix = base
        .iter()
        .map(|row| row.iter().map(|x| frac(&x.coeffs()[0])).collect())
        .collect();
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut reps = vec![start.clone()];
    seen.insert(orbit_key(&subspace, &start), 0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for g in &gens {
            let v = act(&u, g);
            let key = orbit_key(&subspace, &v);
            if !seen.contains_key(&key) {
                if reps.len() >= cap {
                    return Err(GridError::OrbitTooLarge { cap });
                }
                seen.insert(key, reps.len());
                reps.push(v.clone());
                queue.push_back(v);
            }
        }
    }
    let reps_f64 = reps
        .iter()
        .map(|u| u.iter().map(|row| row.iter().map(rat_to_f64).collect()).collect())
        .collect();
    let basis_f64 = subspace
        .basis()
        .iter()
        .map(|b| b.iter().map(|x| rat_to_f64(&Rational::from_integer(x.clone()))).collect())
        .collect();
    Ok(TorusComponentSet {
        class: j,
        dim: p.dim,
        subspace,
        base,
        reps,
        zero_row,
        reps_f64,
        basis_f64,
    })
}

/// Whether U is in the component set modulo L^d + integer matrices, using its
/// rational part only (irrational parts of valid points lie in L^d).
pub fn contains_rational(tcs: &TorusComponentSet, u: &RatMatrix) -> bool {
    let key = orbit_key(&tcs.subspace, u);
    tcs.reps.iter().any(|r| orbit_key(&tcs.subspace, r) == key)
}

/// Applies one of the generators; used by closure checks.
pub fn generator_images(tcs: &TorusComponentSet) -> Result<Vec<RatMatrix>, GridError> {
    let gens = generators(tcs.dim)?;
    Ok(tcs
        .reps
        .iter()
        .flat_map(|u| gens.iter().map(move |g| act(u, g)))
        .collect())
}
