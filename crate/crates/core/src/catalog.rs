//! Named configurations used by tests, benches and the CLI.

use crate::exactfield::{AlgebraicNumber, Field, FieldSpec, NumberField};
use crate::gridalg::{canonical_presentation, make_admissible, Grid, GridError, Presentation};

pub fn sqrt2_field() -> Field {
    NumberField::new(FieldSpec::quadratic(2)).expect("ℚ(√2) is a field")
}

fn num(f: &Field, c: &[&str]) -> AlgebraicNumber {
    AlgebraicNumber::parse(f, c).expect("valid literal")
}

fn identity(f: &Field) -> Vec<Vec<AlgebraicNumber>> {
    vec![vec![num(f, &["1"]), num(f, &["0"])], vec![num(f, &["0"]), num(f, &["1"])]]
}

/// M₂ = [[1, √2], [1, √2 + 1]], which is not commensurable with the identity.
pub fn m2(f: &Field) -> Vec<Vec<AlgebraicNumber>> {
    vec![vec![num(f, &["1"]), num(f, &["0", "1"])], vec![num(f, &["1"]), num(f, &["1", "1"])]]
}

/// c(ℤ² + w)M over ℚ(√2), with entries as coefficient strings.
pub fn grid(f: &Field, c: &[&str], w: [&[&str]; 2], m: Option<Vec<Vec<AlgebraicNumber>>>) -> Grid {
    Grid::new(num(f, c), vec![num(f, w[0]), num(f, w[1])], m.unwrap_or_else(|| identity(f))).expect("valid grid")
}

fn admissible(grids: &[Grid]) -> Result<Presentation, GridError> {
    make_admissible(&canonical_presentation(grids)?)
}

/// ℤ².
pub fn square_lattice() -> Presentation {
    let f = sqrt2_field();
    admissible(&[grid(&f, &["1"], [&["0"], &["0"]], None)]).expect("admissible")
}

/// ℤ² ∪ ℤ²M₂: two classes of one grid each, n̄ = 2.
pub fn two_lattices() -> Presentation {
    let f = sqrt2_field();
    admissible(&[
        grid(&f, &["1"], [&["0"], &["0"]], None),
        grid(&f, &["1"], [&["0"], &["0"]], Some(m2(&f))),
    ])
    .expect("admissible")
}

/// ℤ² ∪ (ℤ² + (0, √2)) ∪ ℤ²M₂: classes of sizes 2 and 1.
pub fn three_grids() -> Vec<Grid> {
    let f = sqrt2_field();
    vec![
        grid(&f, &["1"], [&["0"], &["0"]], None),
        grid(&f, &["1"], [&["0"], &["0", "1"]], None),
        grid(&f, &["1"], [&["0"], &["0"]], Some(m2(&f))),
    ]
}

pub fn three_grid_presentation() -> Presentation {
    admissible(&three_grids()).expect("admissible")
}

/// ℤ² ∪ 2(ℤ² + w) with w = (w₁, 0), i.e. ℤ² ∪ (2ℤ² + 2w).
pub fn scaled_pair(w1: &[&str]) -> Vec<Grid> {
    let f = sqrt2_field();
    vec![
        grid(&f, &["1"], [&["0"], &["0"]], None),
        grid(&f, &["2"], [w1, &["0"]], None),
    ]
}
