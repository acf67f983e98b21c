//! Rational subspaces of ℝ^r and the closure operator 𝔏.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::lattice::{
    dot_int_rat, hnf_rows, integer_kernel, nullspace, primitive_integer, rref, to_rational_rows,
};
use super::GridError;
use crate::exactfield::rational::frac;
use crate::exactfield::{nf_coefficient_vectors, AlgebraicNumber, Rational};

/// A subspace L ⊂ ℝ^r spanned by rational vectors, stored canonically as the
/// row Hermite normal form of the saturated lattice L ∩ ℤ^r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalSubspace {
    r: usize,
    basis: Vec<Vec<BigInt>>,
    /// Same canonical form for L^⊥ ∩ ℤ^r.
    perp: Vec<Vec<BigInt>>,
}

impl RationalSubspace {
    /// ℚ-span of the given rational vectors.
    pub fn span(r: usize, vectors: &[Vec<Rational>]) -> Self {
        let nonzero: Vec<Vec<Rational>> = vectors
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .cloned()
            .collect();
        let echelon = rref(nonzero, r);
        let ints: Vec<Vec<BigInt>> = echelon.iter().map(|v| primitive_integer(v)).collect();
        let perp = hnf_rows(integer_kernel(&ints, r), r);
        let basis = hnf_rows(integer_kernel(&perp, r), r);
        RationalSubspace { r, basis, perp }
    }

    pub fn zero(r: usize) -> Self {
        Self::span(r, &[])
    }

    pub fn full(r: usize) -> Self {
        let e: Vec<Vec<Rational>> = (0..r)
            .map(|i| (0..r).map(|j| Rational::from_integer(((i == j) as i32).into())).collect())
            .collect();
        Self::span(r, &e)
    }

    pub fn ambient_dim(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// ℤ-basis of L ∩ ℤ^r in Hermite normal form.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// ℤ-basis of L^⊥ ∩ ℤ^r in Hermite normal form.
    pub fn perp_basis(&self) -> &[Vec<BigInt>] {
        &self.perp
    }

    pub fn basis_rational(&self) -> Vec<Vec<Rational>> {
        to_rational_rows(&self.basis)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.perp.iter().all(|a| dot_int_rat(a, v).is_zero())
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.r == other.r && self.basis_rational().iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut v = self.basis_rational();
        v.extend(other.basis_rational());
        Self::span(self.r, &v)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut a = to_rational_rows(&self.perp);
        a.extend(to_rational_rows(&other.perp));
        Self::span(self.r, &nullspace(&a, self.r))
    }

    /// L ∩ e_i^⊥.
    pub fn intersect_coordinate_hyperplane(&self, i: usize) -> Self {
        let mut e = vec![Rational::zero(); self.r];
        e[i] = Rational::from_integer(1.into());
        let mut a = to_rational_rows(&self.perp);
        a.push(e);
        Self::span(self.r, &nullspace(&a, self.r))
    }

    /// Smallest rational subspace containing L and the line ℝc.
    pub fn plus_line(&self, c: &[AlgebraicNumber]) -> Self {
        let mut v = self.basis_rational();
        v.extend(nf_coefficient_vectors(c));
        Self::span(self.r, &v)
    }

    /// Canonical key of a rational vector modulo L + ℤ^r: the image under the
    /// ℤ-basis of L^⊥ ∩ ℤ^r, reduced modulo 1.
    pub fn coset_key(&self, v0: &[Rational]) -> Vec<Rational> {
        self.perp.iter().map(|a| frac(&dot_int_rat(a, v0))).collect()
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            ambient_dim: self.r,
            dim: self.dim(),
            basis: self
                .basis
                .iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
}

/// 𝔏(S) for S = {vectors} ∪ ℝ·line: the smallest rational subspace L with
/// S ⊂ n⁻¹ℤ^r + L for some positive integer n.
pub fn frak_l(
    r: usize,
    vectors: &[Vec<AlgebraicNumber>],
    line: Option<&[AlgebraicNumber]>,
) -> Result<RationalSubspace, GridError> {
    let mut span = Vec::new();
    for v in vectors {
        if v.len() != r {
            return Err(GridError::Dimension {
                expected: r,
                got: v.len(),
            });
        }
        span.extend(nf_coefficient_vectors(v).into_iter().skip(1));
    }
    if let Some(c) = line {
        if c.len() != r {
            return Err(GridError::Dimension {
                expected: r,
                got: c.len(),
            });
        }
        span.extend(nf_coefficient_vectors(c));
    }
    Ok(RationalSubspace::span(r, &span))
}

/// Decides v ∈ L + ℤ^r.
pub fn in_subspace_mod_lattice(v: &[AlgebraicNumber], l: &RationalSubspace) -> bool {
    let parts = nf_coefficient_vectors(v);
    if !parts.iter().skip(1).all(|p| l.contains(p)) {
        return false;
    }
    l.coset_key(&parts[0]).iter().all(Zero::is_zero)
}
