//! Grids c(ℤ^d + w)M, commensurability, and merging a commensurability class
//! onto one common lattice.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::lattice::{inverse_rational, primitive_integer};
use super::matrix::{det, mat_inv, mat_mul, vec_mat_rational, NfMatrix};
use super::GridError;
use crate::exactfield::rational::{lcm_denominators, lcm_rational};
use crate::exactfield::{AlgebraicNumber, Rational};

/// The point set c(ℤ^d + w)M.
#[derive(Clone, Debug)]
pub struct Grid {
    pub c: AlgebraicNumber,
    pub w: Vec<AlgebraicNumber>,
    pub m: NfMatrix,
}

impl Grid {
    pub fn new(c: AlgebraicNumber, w: Vec<AlgebraicNumber>, m: NfMatrix) -> Result<Self, GridError> {
        let d = w.len();
        if d < 1 || m.len() != d || m.iter().any(|row| row.len() != d) {
            return Err(GridError::Dimension {
                expected: d,
                got: m.len(),
            });
        }
        for x in std::iter::once(&c).chain(&w).chain(m.iter().flatten()) {
            c.same_field(x)?;
        }
        if c.sign() <= 0 {
            return Err(GridError::NonPositiveScale);
        }
        if det(&m)? != AlgebraicNumber::one(c.field()) {
            return Err(GridError::DeterminantNotOne);
        }
        Ok(Grid { c, w, m })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Same grid with w in canonical residue form.
    pub fn normalized(&self) -> Grid {
        Grid {
            c: self.c.clone(),
            w: canonical_residue(&self.w),
            m: self.m.clone(),
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
            && self.m == other.m
            && canonical_residue(&self.w) == canonical_residue(&other.w)
    }
}

/// One member c(ℤ^d + w) of a class sharing the class matrix M.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Member {
    pub c: AlgebraicNumber,
    pub w: Vec<AlgebraicNumber>,
}

/// Rational parts reduced into [0, 1); irrational coefficients untouched.
pub fn canonical_residue(w: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
    w.iter().map(AlgebraicNumber::reduce_rational_part).collect()
}

/// Witness M₂M₁⁻¹ = λT with λ > 0 and T a primitive integer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CommensurabilityWitness {
    pub t: Vec<Vec<BigInt>>,
    pub lambda: AlgebraicNumber,
}

impl CommensurabilityWitness {
    pub fn t_rational(&self) -> Vec<Vec<Rational>> {
        self.t
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }
}

/// Witness that two grids are commensurable, or `None`.
pub fn commensurable(g1: &Grid, g2: &Grid) -> Result<Option<CommensurabilityWitness>, GridError> {
    if g1.dim() != g2.dim() {
        return Err(GridError::Dimension {
            expected: g1.dim(),
            got: g2.dim(),
        });
    }
    g1.c.same_field(&g2.c)?;
    Ok(ratio_witness(&mat_mul(&g2.m, &mat_inv(&g1.m)?)))
}

/// Decides whether R is a real multiple of a rational matrix.
pub fn ratio_witness(r: &NfMatrix) -> Option<CommensurabilityWitness> {
    let e = r.iter().flatten().find(|x| !x.is_zero())?.clone();
    let inv = e.inv().ok()?;
    let mut t0 = Vec::new();
    for row in r {
        let mut out = Vec::new();
        for x in row {
            out.push((x * &inv).to_rational()?);
        }
        t0.push(out);
    }
    let flat: Vec<Rational> = t0.iter().flatten().cloned().collect();
    let prim = primitive_integer(&flat);
    // prim = s·t0 entrywise; recover s from a nonzero entry.
    let k = flat.iter().position(|x| !x.is_zero())?;
    let s = Rational::from_integer(prim[k].clone()) / &flat[k];
    let mut lambda = e.scale(&s.recip());
    let d = r.len();
    let mut t: Vec<Vec<BigInt>> = prim.chunks(d).map(|c| c.to_vec()).collect();
    if lambda.sign() < 0 {
        lambda = -lambda;
        for x in t.iter_mut().flatten() {
            *x = -x.clone();
        }
    }
    Some(CommensurabilityWitness { t, lambda })
}

/// Classes of the commensurability relation, ordered by first occurrence.
pub fn partition_classes(grids: &[Grid]) -> Result<Vec<Vec<usize>>, GridError> {
    if grids.is_empty() {
        return Err(GridError::Empty);
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    // Commensurability is an equivalence relation, so one representative suffices.
    for (k, g) in grids.iter().enumerate() {
        let mut home = None;
        for (ci, class) in classes.iter().enumerate() {
            if commensurable(&grids[class[0]], g)?.is_some() {
                home = Some(ci);
                break;
            }
        }
        match home {
            Some(ci) => classes[ci].push(k),
            None => classes.push(vec![k]),
        }
    }
    Ok(classes)
}

/// Exact ordering of members: by c, then lexicographically by w.
pub fn member_order(a: &Member, b: &Member) -> Ordering {
    a.c.cmp_exact(&b.c).then_with(|| {
        a.w.iter()
            .zip(&b.w)
            .map(|(x, y)| x.cmp_exact(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

/// Sorts by [`member_order`] and removes duplicates up to canonical residue.
pub fn normalize_members(members: Vec<Member>) -> Vec<Member> {
    let mut seen = HashSet::new();
    let mut out: Vec<Member> = members
        .into_iter()
        .map(|m| Member {
            c: m.c,
            w: canonical_residue(&m.w),
        })
        .filter(|m| seen.insert(m.clone()))
        .collect();
    out.sort_by(member_order);
    out
}

/// Rewrites each set of pairwise-connected intersecting members (rational
/// scale ratio, common points) onto their common scale lcm, splitting coarse
/// members into translates. Members already disjoint from all others are kept.
/// Afterwards members with rational scale ratio coincide or are disjoint.
pub fn disjoint_rewrite(members: &[Member]) -> Vec<Member> {
    let members = normalize_members(members.to_vec());
    let n = members.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            if !members_disjoint(&members[a], &members[b]) {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut out = Vec::new();
    for r in 0..n {
        let items: Vec<&Member> = (0..n)
            .filter(|&i| root(&mut parent, i) == r)
            .map(|i| &members[i])
            .collect();
        if items.is_empty() {
            continue;
        }
        let base = items[0].c.clone();
        let ratios: Vec<Rational> = items
            .iter()
            .map(|m| {
                m.c.checked_div(&base)
                    .ok()
                    .and_then(|x| x.to_rational())
                    .expect("intersecting members have rational ratio")
            })
            .collect();
        let l = lcm_rational(&ratios);
        let c_common = base.scale(&l);
        for (rho, m) in ratios.iter().zip(items) {
            let k = (&l / rho).to_integer();
            out.extend(split_translates(m, &k).into_iter().map(|w| Member {
                c: c_common.clone(),
                w,
            }));
        }
    }
    normalize_members(out)
}

/// Translates (w + t)/n for t ∈ {0, …, n−1}^d.
fn split_translates(m: &Member, n: &BigInt) -> Vec<Vec<AlgebraicNumber>> {
    let d = m.w.len();
    let nr = Rational::from_integer(n.clone());
    let inv = nr.recip();
    let mut ts: Vec<Vec<BigInt>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for t in &ts {
            let mut k = BigInt::zero();
            while &k < n {
                let mut t2 = t.clone();
                t2.push(k.clone());
                next.push(t2);
                k += 1;
            }
        }
        ts = next;
    }
    let field = m.c.field().clone();
    ts.into_iter()
        .map(|t| {
            m.w.iter()
                .zip(&t)
                .map(|(wk, tk)| {
                    (wk + &AlgebraicNumber::from_rational(&field, Rational::from_integer(tk.clone())))
                        .scale(&inv)
                })
                .collect()
        })
        .collect()
}

/// Re-expresses pairwise commensurable grids on the first grid's matrix M
/// and applies [`disjoint_rewrite`].
pub fn merge_class(grids: &[Grid]) -> Result<(NfMatrix, Vec<Member>), GridError> {
    let first = grids.first().ok_or(GridError::Empty)?;
    let d = first.dim();
    let mut members = Vec::new();
    for g in grids {
        let wit = commensurable(first, g)?.ok_or(GridError::NotCommensurable)?;
        let t = wit.t_rational();
        let t_inv = inverse_rational(&t).ok_or(GridError::Singular)?;
        let n = lcm_denominators(t_inv.iter().flatten());
        let nr = Rational::from_integer(n.clone());
        let wt = vec_mat_rational(&g.w, &t);
        let c_new = (&g.c * &wit.lambda).scale(&nr);
        for coset in lattice_cosets(&wit.t, &n, d) {
            let w: Vec<AlgebraicNumber> = wt
                .iter()
                .zip(&coset)
                .map(|(x, tk)| {
                    (x + &AlgebraicNumber::from_rational(x.field(), Rational::from_integer(tk.clone())))
                        .scale(&nr.recip())
                })
                .collect();
            members.push(Member {
                c: c_new.clone(),
                w,
            });
        }
    }
    Ok((first.m.clone(), disjoint_rewrite(&members)))
}

/// Representatives of ℤ^d T / nℤ^d, reduced into [0, n)^d.
fn lattice_cosets(t: &[Vec<BigInt>], n: &BigInt, d: usize) -> Vec<Vec<BigInt>> {
    let reduce = |v: Vec<BigInt>| -> Vec<BigInt> {
        v.into_iter()
            .map(|x| {
                let r = x % n;
                if r.is_negative() {
                    r + n
                } else {
                    r
                }
            })
            .collect()
    };
    let zero = vec![BigInt::zero(); d];
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(v) = frontier.pop() {
        for row in t {
            let next = reduce(v.iter().zip(row).map(|(a, b)| a + b).collect());
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// Two same-class members with rational scale ratio are disjoint.
pub fn members_disjoint(a: &Member, b: &Member) -> bool {
    let Some(rho) = b.c.checked_div(&a.c).ok().and_then(|x| x.to_rational()) else {
        return true;
    };
    // c_a(m + w_a) = c_b(m' + w_b) ⇔ m − ρm' = ρw_b − w_a, and ℤ + ρℤ = q⁻¹ℤ for ρ = p/q.
    let q = Rational::from_integer(rho.denom().clone());
    !a.w.iter().zip(&b.w).all(|(wa, wb)| {
        let diff = &wb.scale(&rho) - wa;
        diff.scale(&q).is_integer()
    })
}
