//! Reference models.

use num_traits::{One, Zero};

use crate::genexact::{from_three_form, DForm, LieAlgebroidModel};
use crate::linalg::{CoefficientRing, Rational, UniPoly};
use crate::model::CourantModel;

fn identity(r: usize) -> Vec<Vec<Rational>> {
    (0..r).map(|i| (0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// `so(3)` as a Courant algebroid over a point: `g = 1`, `C = ε`.
pub fn so3() -> CourantModel {
    CourantModel::new("so(3)", CoefficientRing::Rationals, identity(3), Vec::new(), false, [([0, 1, 2], UniPoly::one())])
        .expect("valid model")
}

/// Exact Courant algebroid of the 2-torus, `C = 0`.
pub fn exact_t2() -> CourantModel {
    from_three_form(&LieAlgebroidModel::abelian(2, false), &DForm::zero(2, 3)).expect("closed").renamed("exact T2")
}

/// Exact Courant algebroid of the 3-torus with `C = c·e¹²³`.
pub fn exact_t3(c: Rational) -> CourantModel {
    let form = DForm::from_components(3, 3, [(vec![0, 1, 2], UniPoly::constant(c))]).expect("valid form");
    from_three_form(&LieAlgebroidModel::abelian(3, false), &form).expect("closed").renamed("exact T3")
}

/// `su(2) × ℝ` with Ševera form `C = c(t)·ε`.
pub fn su2_line(c: UniPoly) -> CourantModel {
    let form = DForm::from_components(3, 3, [(vec![0, 1, 2], c)]).expect("valid form");
    from_three_form(&LieAlgebroidModel::su2(true), &form).expect("closed").renamed("su(2) x R")
}

/// Two overlapping components on a Euclidean fibre: `C_123 = C_345 = 1`.
pub fn broken_jacobi() -> CourantModel {
    CourantModel::new(
        "broken Jacobi",
        CoefficientRing::Rationals,
        identity(5),
        Vec::new(),
        false,
        [([0, 1, 2], UniPoly::one()), ([2, 3, 4], UniPoly::one())],
    )
    .expect("valid model")
}

/// Rank one, `ρ = 0`, `C = 0`: `H = 0`.
pub fn trivial_line() -> CourantModel {
    CourantModel::new("H = 0", CoefficientRing::Rationals, identity(1), Vec::new(), false, Vec::new()).expect("valid model")
}
