//! Presentations 𝒫 = ⋃_ψ c_ψ(ℤ^d + w_ψ)M_{j_ψ} grouped into commensurability
//! classes, the subspaces L_j^ψ and L_j, and admissibility.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::grid::{
    canonical_residue, disjoint_rewrite, members_disjoint, merge_class, partition_classes, Grid, Member,
};
use super::matrix::{columns, identity, mat_inv, mat_mul, vec_mat, NfMatrix};
use super::subspace::{frak_l, in_subspace_mod_lattice, RationalSubspace};
use super::GridError;
use crate::exactfield::rational::{rat_to_f64, Rational};
use crate::exactfield::{
    AlgebraicNumber, Field, FieldError, FieldSpec, NumberField, RationalText,
};

/// Crude mark ψ = (j, i), zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mark {
    pub class: usize,
    pub member: usize,
}

impl Mark {
    pub fn new(class: usize, member: usize) -> Self {
        Mark { class, member }
    }
}

impl std::fmt::Display for Mark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.class + 1, self.member + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassData {
    pub m: NfMatrix,
    pub members: Vec<Member>,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub dim: usize,
    pub field: Field,
    pub classes: Vec<ClassData>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.classes == other.classes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    Fails(Mark),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

impl Presentation {
    pub fn new(dim: usize, field: Field, classes: Vec<ClassData>) -> Result<Self, GridError> {
        if classes.is_empty() || classes.iter().any(|c| c.members.is_empty()) {
            return Err(GridError::Empty);
        }
        for class in &classes {
            let g = Grid::new(
                class.members[0].c.clone(),
                class.members[0].w.clone(),
                class.m.clone(),
            )?;
            if g.dim() != dim {
                return Err(GridError::Dimension {
                    expected: dim,
                    got: g.dim(),
                });
            }
            for mem in &class.members {
                Grid::new(mem.c.clone(), mem.w.clone(), class.m.clone())?;
            }
        }
        Ok(Presentation {
            dim,
            field,
            classes,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_size(&self, j: usize) -> usize {
        self.classes[j].members.len()
    }

    pub fn marks(&self) -> Vec<Mark> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(j, c)| (0..c.members.len()).map(move |i| Mark::new(j, i)))
            .collect()
    }

    pub fn member(&self, psi: Mark) -> Result<&Member, GridError> {
        self.classes
            .get(psi.class)
            .and_then(|c| c.members.get(psi.member))
            .ok_or(GridError::IndexOutOfRange)
    }

    fn class(&self, j: usize) -> Result<&ClassData, GridError> {
        self.classes.get(j).ok_or(GridError::IndexOutOfRange)
    }

    pub fn grid(&self, psi: Mark) -> Result<Grid, GridError> {
        let m = self.member(psi)?;
        Ok(Grid {
            c: m.c.clone(),
            w: m.w.clone(),
            m: self.classes[psi.class].m.clone(),
        })
    }

    /// n̄_ψ = c_ψ^{−d}.
    pub fn density(&self, psi: Mark) -> Result<AlgebraicNumber, GridError> {
        Ok(self.member(psi)?.c.pow(self.dim as u32).inv()?)
    }

    pub fn density_f64(&self, psi: Mark) -> f64 {
        self.member(psi)
            .map(|m| m.c.to_f64().powi(-(self.dim as i32)))
            .unwrap_or(0.0)
    }

    pub fn total_density(&self) -> AlgebraicNumber {
        self.marks()
            .into_iter()
            .fold(AlgebraicNumber::zero(&self.field), |acc, psi| {
                acc + self.density(psi).expect("valid mark")
            })
    }

    pub fn total_density_f64(&self) -> f64 {
        self.marks().into_iter().map(|p| self.density_f64(p)).sum()
    }

    /// 𝗆(ψ) = n̄_ψ / n̄_𝒫.
    pub fn weight(&self, psi: Mark) -> Result<AlgebraicNumber, GridError> {
        Ok(self.density(psi)?.checked_div(&self.total_density())?)
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        let total = self.total_density_f64();
        self.marks()
            .into_iter()
            .map(|p| self.density_f64(p) / total)
            .collect()
    }

    /// c̃_j = (1/c_{j,1}, …, 1/c_{j,r_j}).
    pub fn c_tilde(&self, j: usize) -> Result<Vec<AlgebraicNumber>, GridError> {
        self.class(j)?
            .members
            .iter()
            .map(|m| m.c.inv().map_err(GridError::from))
            .collect()
    }

    /// c_j^ψ = c_ψ · c̃_j.
    pub fn c_j_psi(&self, psi: Mark, j: usize) -> Result<Vec<AlgebraicNumber>, GridError> {
        let c = &self.member(psi)?.c;
        Ok(self.c_tilde(j)?.iter().map(|x| c * x).collect())
    }

    /// W_j: rows w_{j,i}.
    pub fn w_matrix(&self, j: usize) -> Result<NfMatrix, GridError> {
        Ok(self.class(j)?.members.iter().map(|m| m.w.clone()).collect())
    }

    /// T_j^ψ = M_{j_ψ} M_j^{−1}.
    pub fn t_j_psi(&self, psi: Mark, j: usize) -> Result<NfMatrix, GridError> {
        let mj = &self.class(j)?.m;
        let mpsi = &self.class(psi.class)?.m;
        Ok(mat_mul(mpsi, &mat_inv(mj)?))
    }

    /// W_j^ψ = W_j − c_j^ψ (w_ψ T_j^ψ).
    pub fn w_j_psi(&self, psi: Mark, j: usize) -> Result<NfMatrix, GridError> {
        let w = self.w_matrix(j)?;
        let cj = self.c_j_psi(psi, j)?;
        let wt = vec_mat(&self.member(psi)?.w, &self.t_j_psi(psi, j)?);
        Ok(w.iter()
            .zip(&cj)
            .map(|(row, ci)| row.iter().zip(&wt).map(|(x, y)| x - &(ci * y)).collect())
            .collect())
    }

    /// L_j^ψ.
    pub fn subspace_lpsi(&self, psi: Mark, j: usize) -> Result<RationalSubspace, GridError> {
        let r = self.class(j)?.members.len();
        let cj = self.c_j_psi(psi, j)?;
        let mut vectors = columns(&self.w_j_psi(psi, j)?);
        if j == psi.class {
            vectors.push(cj);
            frak_l(r, &vectors, None)
        } else {
            frak_l(r, &vectors, Some(&cj))
        }
    }

    /// L_j.
    pub fn subspace_lj(&self, j: usize) -> Result<RationalSubspace, GridError> {
        let r = self.class(j)?.members.len();
        frak_l(r, &columns(&self.w_matrix(j)?), Some(&self.c_tilde(j)?))
    }

    /// Checks c_{j_ψ}^ψ ∈ L_{j_ψ}^ψ + ℤ^{r_{j_ψ}} for every mark.
    pub fn is_admissible(&self) -> Result<Admissibility, GridError> {
        for psi in self.marks() {
            let l = self.subspace_lpsi(psi, psi.class)?;
            if !in_subspace_mod_lattice(&self.c_j_psi(psi, psi.class)?, &l) {
                return Ok(Admissibility::Fails(psi));
            }
        }
        Ok(Admissibility::Admissible)
    }

    /// Within-class disjointness for members with rational scale ratio.
    pub fn satisfies_disjointness(&self) -> bool {
        self.classes.iter().all(|class| {
            let ms = &class.members;
            (0..ms.len()).all(|a| (a + 1..ms.len()).all(|b| members_disjoint(&ms[a], &ms[b])))
        })
    }

    /// U_j^{(q)}: row i is w_{j,i} − c_{j,i}^{−1} q M_j^{−1}.
    pub fn u_of_q(&self, j: usize, q: &[AlgebraicNumber]) -> Result<NfMatrix, GridError> {
        let class = self.class(j)?;
        if q.len() != self.dim {
            return Err(GridError::Dimension {
                expected: self.dim,
                got: q.len(),
            });
        }
        let qm = vec_mat(q, &mat_inv(&class.m)?);
        class
            .members
            .iter()
            .map(|m| {
                let ci = m.c.inv()?;
                Ok(m.w.iter().zip(&qm).map(|(w, x)| w - &(&ci * x)).collect())
            })
            .collect()
    }

    /// Whether q lies in the grid ℒ_ψ.
    pub fn contains_point(&self, psi: Mark, q: &[AlgebraicNumber]) -> Result<bool, GridError> {
        let m = self.member(psi)?;
        let coords = vec_mat(q, &mat_inv(&self.classes[psi.class].m)?);
        let ci = m.c.inv()?;
        Ok(coords
            .iter()
            .zip(&m.w)
            .all(|(x, w)| (&(x * &ci) - w).is_integer()))
    }

    /// A canonical point of ℒ_ψ: c_ψ w_ψ M_{j_ψ}.
    pub fn base_point(&self, psi: Mark) -> Result<Vec<AlgebraicNumber>, GridError> {
        let m = self.member(psi)?;
        let cw: Vec<AlgebraicNumber> = m.w.iter().map(|x| &m.c * x).collect();
        Ok(vec_mat(&cw, &self.classes[psi.class].m))
    }

    /// The presentation of the single class 𝒫_j.
    pub fn class_restricted(&self, j: usize) -> Result<Presentation, GridError> {
        Ok(Presentation {
            dim: self.dim,
            field: self.field.clone(),
            classes: vec![self.class(j)?.clone()],
        })
    }

    /// Exact set of points in the closed box [−h, h]^d.
    pub fn window_points(&self, h: i64) -> HashSet<Vec<AlgebraicNumber>> {
        let mut out = HashSet::new();
        for psi in self.marks() {
            out.extend(grid_window_points(&self.grid(psi).expect("valid mark"), h));
        }
        out
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            dim: self.dim,
            field: self.field.spec().clone(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    m: c.m
                        .iter()
                        .map(|row| row.iter().map(NumberJson::from_alg).collect())
                        .collect(),
                    members: c
                        .members
                        .iter()
                        .map(|m| MemberJson {
                            c: NumberJson::from_alg(&m.c),
                            w: m.w.iter().map(NumberJson::from_alg).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Exact points of one grid in [−h, h]^d.
pub fn grid_window_points(g: &Grid, h: i64) -> Vec<Vec<AlgebraicNumber>> {
    let d = g.dim();
    let field = g.c.field().clone();
    let minv = super::matrix::to_f64(&mat_inv(&g.m).expect("det 1"));
    let c = g.c.to_f64();
    let w: Vec<f64> = g.w.iter().map(AlgebraicNumber::to_f64).collect();
    // |m_k + w_k| ≤ h Σ_i |M⁻¹_{ik}| / c.
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|k| {
            let s: f64 = (0..d).map(|i| minv[i][k].abs()).sum::<f64>() * h as f64 / c;
            ((-s - w[k]).floor() as i64 - 1, (s - w[k]).ceil() as i64 + 1)
        })
        .collect();
    let hq = AlgebraicNumber::from_int(&field, h);
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let v: Vec<AlgebraicNumber> = idx
            .iter()
            .zip(&g.w)
            .map(|(&m, wk)| &(&AlgebraicNumber::from_int(&field, m) + wk) * &g.c)
            .collect();
        let p = vec_mat(&v, &g.m);
        let inside = p.iter().all(|x| {
            let f = x.to_f64();
            if f.abs() < h as f64 - 1e-9 {
                true
            } else if f.abs() > h as f64 + 1e-9 {
                false
            } else {
                x.abs().cmp_exact(&hq) != std::cmp::Ordering::Greater
            }
        });
        if inside {
            out.push(p);
        }
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// The presentation of ℤ^d over ℚ.
pub fn standard_lattice(d: usize) -> Presentation {
    let f = NumberField::rationals();
    let g = Grid::new(AlgebraicNumber::one(&f), vec![AlgebraicNumber::zero(&f); d], identity(&f, d))
        .expect("identity grid");
    canonical_presentation(&[g]).expect("single grid")
}

/// partition_classes followed by merge_class on every class.
pub fn canonical_presentation(grids: &[Grid]) -> Result<Presentation, GridError> {
    let first = grids.first().ok_or(GridError::Empty)?;
    let field = first.c.field().clone();
    let dim = first.dim();
    let mut classes = Vec::new();
    for idx in partition_classes(grids)? {
        let members: Vec<Grid> = idx.iter().map(|&k| grids[k].clone()).collect();
        let (m, members) = merge_class(&members)?;
        classes.push(ClassData { m, members });
    }
    Presentation::new(dim, field, classes)
}

/// An admissible presentation of the same point set.
pub fn make_admissible(p: &Presentation) -> Result<Presentation, GridError> {
    if p.satisfies_disjointness() && p.is_admissible()?.is_admissible() {
        return Ok(p.clone());
    }
    let rewritten = Presentation {
        dim: p.dim,
        field: p.field.clone(),
        classes: p
            .classes
            .iter()
            .map(|c| ClassData {
                m: c.m.clone(),
                members: disjoint_rewrite(&c.members),
            })
            .collect(),
    };
    if rewritten.is_admissible()?.is_admissible() {
        return Ok(rewritten);
    }
    let mut classes = Vec::new();
    for class in &rewritten.classes {
        let multipliers = scale_multipliers(&class.members)?;
        let mut members = Vec::new();
        for (mem, q) in class.members.iter().zip(multipliers) {
            members.extend(subdivide(mem, q));
        }
        classes.push(ClassData {
            m: class.m.clone(),
            members: disjoint_rewrite(&members),
        });
    }
    Ok(Presentation {
        dim: p.dim,
        field: p.field.clone(),
        classes,
    })
}

/// For each member, the integer q attached to its scale: with distinct scales
/// u₁ < … < u_s and ũ = (1/u_i), q_i generates the projection of ℤ^s ∩ 𝔏(ℝũ)
/// to the i-th coordinate.
fn scale_multipliers(members: &[Member]) -> Result<Vec<BigInt>, GridError> {
    let mut scales: Vec<AlgebraicNumber> = Vec::new();
    for m in members {
        if !scales.contains(&m.c) {
            scales.push(m.c.clone());
        }
    }
    scales.sort_by(|a, b| a.cmp_exact(b));
    let u_tilde = scales
        .iter()
        .map(|u| u.inv())
        .collect::<Result<Vec<_>, FieldError>>()?;
    let l = frak_l(scales.len(), &[], Some(&u_tilde))?;
    let qs: Vec<BigInt> = (0..scales.len())
        .map(|i| {
            l.basis()
                .iter()
                .fold(BigInt::zero(), |g, row| num_integer::Integer::gcd(&g, &row[i]))
        })
        .collect();
    Ok(members
        .iter()
        .map(|m| {
            let k = scales.iter().position(|s| *s == m.c).expect("scale present");
            if qs[k].is_zero() {
                BigInt::one()
            } else {
                qs[k].clone()
            }
        })
        .collect())
}

/// c(ℤ^d + w) = ⋃_{α ∈ {1..q}^d} qc(ℤ^d + (w + α)/q).
fn subdivide(m: &Member, q: BigInt) -> Vec<Member> {
    let d = m.w.len();
    let field = m.c.field().clone();
    let qr = Rational::from_integer(q.clone());
    let mut alphas: Vec<Vec<BigInt>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for a in &alphas {
            let mut k = BigInt::one();
            while k <= q {
                let mut a2 = a.clone();
                a2.push(k.clone());
                next.push(a2);
                k += 1;
            }
        }
        alphas = next;
    }
    alphas
        .into_iter()
        .map(|a| Member {
            c: m.c.scale(&qr),
            w: canonical_residue(
                &m.w.iter()
                    .zip(&a)
                    .map(|(w, ak)| {
                        (w + &AlgebraicNumber::from_rational(&field, Rational::from_integer(ak.clone())))
                            .scale(&qr.recip())
                    })
                    .collect::<Vec<_>>(),
            ),
        })
        .collect()
}

/// JSON form of one field element: coefficient strings, or a bare rational string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberJson {
    Coeffs(Vec<RationalText>),
    Scalar(RationalText),
}

impl NumberJson {
    pub fn from_alg(a: &AlgebraicNumber) -> Self {
        NumberJson::Coeffs(a.coeffs().iter().cloned().map(RationalText).collect())
    }

    pub fn to_alg(&self, field: &Field) -> Result<AlgebraicNumber, FieldError> {
        match self {
            NumberJson::Coeffs(v) => {
                AlgebraicNumber::from_coeffs(field, v.iter().map(|q| q.0.clone()).collect())
            }
            NumberJson::Scalar(q) => Ok(AlgebraicNumber::from_rational(field, q.0.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberJson {
    pub c: NumberJson,
    pub w: Vec<NumberJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassJson {
    #[serde(rename = "M")]
    pub m: Vec<Vec<NumberJson>>,
    pub members: Vec<MemberJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationJson {
    pub dim: usize,
    pub field: FieldSpec,
    pub classes: Vec<ClassJson>,
}

/// A single grid in JSON form; `M` defaults to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridJson {
    pub c: NumberJson,
    pub w: Vec<NumberJson>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<NumberJson>>>,
}

impl GridJson {
    pub fn to_grid(&self, field: &Field) -> Result<Grid, GridError> {
        let w = self
            .w
            .iter()
            .map(|x| x.to_alg(field))
            .collect::<Result<Vec<_>, _>>()?;
        let m = match &self.m {
            Some(rows) => rows
                .iter()
                .map(|r| r.iter().map(|x| x.to_alg(field)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
            None => identity(field, w.len()),
        };
        Grid::new(self.c.to_alg(field)?, w, m)
    }
}

impl PresentationJson {
    pub fn build(&self) -> Result<Presentation, GridError> {
        let field = NumberField::new(self.field.clone())?;
        let mut classes = Vec::new();
        for c in &self.classes {
            let m = c
                .m
                .iter()
                .map(|r| r.iter().map(|x| x.to_alg(&field)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let members = c
                .members
                .iter()
                .map(|mm| {
                    Ok(Member {
                        c: mm.c.to_alg(&field)?,
                        w: mm
                            .w
                            .iter()
                            .map(|x| x.to_alg(&field))
                            .collect::<Result<Vec<_>, FieldError>>()?,
                    })
                })
                .collect::<Result<Vec<_>, FieldError>>()?;
            classes.push(ClassData { m, members });
        }
        Presentation::new(self.dim, field, classes)
    }
}

/// Float summary used by reports.
pub fn rational_f64(q: &Rational) -> f64 {
    rat_to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rational::{int, rat};

    fn q2() -> Field {
        NumberField::new(FieldSpec::quadratic(2)).unwrap()
    }

    fn n(f: &Field, c: &[&str]) -> AlgebraicNumber {
        AlgebraicNumber::parse(f, c).unwrap()
    }

    fn grid(f: &Field, c: &[&str], w: [&[&str]; 2], m: Option<NfMatrix>) -> Grid {
        Grid::new(
            n(f, c),
            vec![n(f, w[0]), n(f, w[1])],
            m.unwrap_or_else(|| identity(f, 2)),
        )
        .unwrap()
    }

    /// M₂ = [[1, √2], [1, √2 + 1]].
    fn m2(f: &Field) -> NfMatrix {
        vec![
            vec![n(f, &["1"]), n(f, &["0", "1"])],
            vec![n(f, &["1"]), n(f, &["1", "1"])],
        ]
    }

    fn three_grids(f: &Field) -> Vec<Grid> {
        vec![
            grid(f, &["1"], [&["0"], &["0"]], None),
            grid(f, &["1"], [&["0"], &["0", "1"]], None),
            grid(f, &["1"], [&["0"], &["0"]], Some(m2(f))),
        ]
    }

    #[test]
    fn single_lattice_is_admissible() {
        let f = q2();
        let p = canonical_presentation(&[grid(&f, &["1"], [&["0"], &["0"]], None)]).unwrap();
        assert!(p.is_admissible().unwrap().is_admissible());
        assert_eq!(p.subspace_lpsi(Mark::new(0, 0), 0).unwrap().dim(), 0);
        assert_eq!(p.subspace_lj(0).unwrap().dim(), 1);
    }

    #[test]
    fn scaled_shift_needs_rewrite() {
        let f = NumberField::rationals();
        let g1 = Grid::new(AlgebraicNumber::one(&f), vec![AlgebraicNumber::zero(&f); 2], identity(&f, 2)).unwrap();
        let g2 = Grid::new(
            AlgebraicNumber::from_int(&f, 2),
            vec![AlgebraicNumber::from_rational(&f, rat(1, 2)), AlgebraicNumber::zero(&f)],
            identity(&f, 2),
        )
        .unwrap();
        let p = canonical_presentation(&[g1, g2]).unwrap();
        let a = make_admissible(&p).unwrap();
        assert!(a.is_admissible().unwrap().is_admissible());
        assert_eq!(a.num_classes(), 1);
        assert_eq!(a.class_size(0), 4);
        assert_eq!(a.window_points(6), p.window_points(6));
        assert_eq!(make_admissible(&a).unwrap(), a);
    }

    #[test]
    fn u_of_q_examples() {
        let f = q2();
        let p = canonical_presentation(&[grid(&f, &["1"], [&["0"], &["0"]], None)]).unwrap();
        let q = vec![n(&f, &["1"]), n(&f, &["0"])];
        let u = p.u_of_q(0, &q).unwrap();
        assert_eq!(u, vec![vec![n(&f, &["-1"]), n(&f, &["0"])]]);
        let zero = vec![AlgebraicNumber::zero(&f); 2];
        assert_eq!(p.u_of_q(0, &zero).unwrap(), p.w_matrix(0).unwrap());
    }

    #[test]
    fn two_class_example_line() {
        let f = q2();
        let p = canonical_presentation(&three_grids(&f)).unwrap();
        assert_eq!(p.num_classes(), 2);
        assert_eq!((p.class_size(0), p.class_size(1)), (2, 1));
        assert!(p.is_admissible().unwrap().is_admissible());
        for (m1, m2v) in [(1, 0), (2, 1), (-1, 3), (0, 0), (4, -7)] {
            let m = vec![AlgebraicNumber::from_int(&f, m1), AlgebraicNumber::from_int(&f, m2v)];
            let q = vec_mat(&m, &m2(&f));
            assert!(p.contains_point(Mark::new(1, 0), &q).unwrap());
            let u = p.u_of_q(0, &q).unwrap();
            let l = frak_l(2, &columns(&u), None).unwrap();
            let s = (m1 + m2v) as i64;
            let expected = RationalSubspace::span(2, &[vec![int(s), int(s - 1)]]);
            assert_eq!(l, expected, "m = ({m1}, {m2v})");
        }
        let q = vec_mat(&[n(&f, &["1"]), n(&f, &["0"])], &m2(&f));
        let u = p.u_of_q(0, &q).unwrap();
        assert_eq!(u[0], vec![n(&f, &["-1"]), n(&f, &["0", "-1"])]);
        assert_eq!(u[1], vec![n(&f, &["-1"]), n(&f, &["0"])]);
    }

    #[test]
    fn lemma_identities_on_example() {
        let f = q2();
        let p = canonical_presentation(&[
            grid(&f, &["1"], [&["0"], &["0"]], None),
            grid(&f, &["2"], [&["0", "1/2"], &["0"]], None),
        ])
        .unwrap();
        let p = make_admissible(&p).unwrap();
        for psi in p.marks() {
            let lpsi = p.subspace_lpsi(psi, psi.class).unwrap();
            let lj = p.subspace_lj(psi.class).unwrap();
            assert_eq!(lpsi, lj.intersect_coordinate_hyperplane(psi.member));
            assert_eq!(lj, lpsi.plus_line(&p.c_tilde(psi.class).unwrap()));
        }
        assert_eq!(p.subspace_lj(0).unwrap().dim(), 2);
    }

    #[test]
    fn json_round_trip() {
        let f = q2();
        let p = canonical_presentation(&three_grids(&f)).unwrap();
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back: PresentationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build().unwrap(), p);
    }
}
