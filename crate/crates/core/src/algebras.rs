//! Named constructors for the standard complex Lie algebras of dimension
//! three, in the conventional bases. All live over C with exact scalars.
//!
//! The list (up to isomorphism): the abelian algebra `C3`; the Heisenberg
//! algebra `n3`; `r2+C`, the nonabelian 2-dimensional algebra plus a
//! central line; the solvable algebras `r3` and the one-parameter family
//! `r3(lambda)`; and the simple algebra `sl2`. For `sl2` both the cyclic
//! presentation and the Cartan–Weyl presentation are provided, together
//! with the basis change between them.

use crate::finite::{FiniteLieAlgebra, Vector};
use crate::linalg::Matrix;
use crate::scalar::{GaussianRational, ParamSet, ScalarExpr};

fn e(s: &str) -> ScalarExpr {
    crate::scalar::parse::parse_expr(s).expect("static expression")
}

/// Abelian algebra of the given dimension, basis `x1..xn`.
pub fn abelian(n: usize) -> FiniteLieAlgebra {
    let basis: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    FiniteLieAlgebra::new(format!("C{n}"), basis, ParamSet::empty()).expect("fresh symbols")
}

/// Heisenberg algebra: `[x1, x2] = x3`, `x3` central.
pub fn heisenberg() -> FiniteLieAlgebra {
    let mut a = abelian(3);
    a.set_name("n3");
    a.add_bracket("x1", "x2", Vector::basis("x3")).unwrap();
    a
}

/// `r2 + C`: `[x1, x2] = x2` with a central `x3`.
pub fn r2_plus_c() -> FiniteLieAlgebra {
    let mut a = abelian(3);
    a.set_name("r2+C");
    a.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
    a
}

/// `r3`: `[x1, x2] = x2`, `[x1, x3] = x2 + x3` (non-diagonalizable action).
pub fn r3() -> FiniteLieAlgebra {
    let mut a = abelian(3);
    a.set_name("r3");
    a.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
    a.add_bracket("x1", "x3", Vector::from_terms([("x2", e("1")), ("x3", e("1"))]))
        .unwrap();
    a
}

/// `r3(lambda)` at a concrete value: `[x1, x2] = x2`, `[x1, x3] = lambda x3`.
pub fn r3_lambda(lambda: &GaussianRational) -> FiniteLieAlgebra {
    let mut a = abelian(3);
    a.set_name(format!("r3(lambda={lambda})"));
    a.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
    a.add_bracket("x1", "x3", Vector::term("x3", ScalarExpr::gauss(lambda.clone())))
        .unwrap();
    a
}

/// `r3(lambda)` with `lambda` left as a symbolic parameter named `lam`.
pub fn r3_lambda_symbolic() -> FiniteLieAlgebra {
    let params = ParamSet::new(["lam"]).unwrap();
    let mut a =
        FiniteLieAlgebra::new("r3(lambda=lam)", vec!["x1", "x2", "x3"], params).unwrap();
    a.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
    a.add_bracket("x1", "x3", Vector::term("x3", e("lam"))).unwrap();
    a
}

/// `sl2` in the cyclic presentation: `[x1,x2]=x3`, `[x2,x3]=x1`,
/// `[x3,x1]=x2`.
pub fn sl2_cyclic() -> FiniteLieAlgebra {
    let mut a = abelian(3);
    a.set_name("sl2");
    a.add_bracket("x1", "x2", Vector::basis("x3")).unwrap();
    a.add_bracket("x2", "x3", Vector::basis("x1")).unwrap();
    a.add_bracket("x3", "x1", Vector::basis("x2")).unwrap();
    a
}

/// `sl2` in the Cartan–Weyl presentation: `[h,e]=e`, `[h,f]=-f`,
/// `[e,f]=2h`.
pub fn sl2_cartan() -> FiniteLieAlgebra {
    let mut a = FiniteLieAlgebra::new("sl2", vec!["h", "e", "f"], ParamSet::empty()).unwrap();
    a.add_bracket("h", "e", Vector::basis("e")).unwrap();
    a.add_bracket("h", "f", Vector::term("f", e("-1"))).unwrap();
    a.add_bracket("e", "f", Vector::term("h", e("2"))).unwrap();
    a
}

/// Basis change taking the cyclic presentation to the Cartan–Weyl one:
/// columns express `(h, e, f)` in the cyclic basis
/// (`h = i x3`, `e = i x1 - x2`, `f = i x1 + x2`).
pub fn cyclic_to_cartan_matrix() -> Matrix<ScalarExpr> {
    Matrix::from_rows(vec![
        vec![e("0"), e("i"), e("i")],
        vec![e("0"), e("-1"), e("1")],
        vec![e("i"), e("0"), e("0")],
    ])
}

/// `r3(lambda=-1)` written in an `(h, e, f)` basis: `[h,e]=e`, `[h,f]=-f`,
/// `[e,f]=0`. This is the flat direction used by the deformation examples.
pub fn r3_minus_one_hef() -> FiniteLieAlgebra {
    let mut a =
        FiniteLieAlgebra::new("r3(lambda=-1)", vec!["h", "e", "f"], ParamSet::empty()).unwrap();
    a.add_bracket("h", "e", Vector::basis("e")).unwrap();
    a.add_bracket("h", "f", Vector::term("f", e("-1"))).unwrap();
    a
}

/// All six standard dimension-3 algebras with a representative parameter
/// value for the `r3(lambda)` family.
pub fn standard_list() -> Vec<FiniteLieAlgebra> {
    vec![
        abelian(3),
        heisenberg(),
        r2_plus_c(),
        r3(),
        r3_lambda(&crate::scalar::parse::parse_gaussian("1/2").unwrap()),
        sl2_cyclic(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_constructors_satisfy_jacobi() {
        for alg in standard_list() {
            assert!(alg.check_jacobi().is_ok(), "{}", alg.name());
        }
        assert!(sl2_cartan().check_jacobi().is_ok());
        assert!(r3_minus_one_hef().check_jacobi().is_ok());
        assert!(r3_lambda_symbolic().check_jacobi().is_ok());
    }

    #[test]
    fn cyclic_and_cartan_presentations_are_conjugate() {
        let cyc = sl2_cyclic();
        let p = cyclic_to_cartan_matrix();
        let moved = cyc
            .change_basis(vec!["h".into(), "e".into(), "f".into()], &p)
            .unwrap();
        let expect = sl2_cartan();
        for (a, b) in [("h", "e"), ("h", "f"), ("e", "f")] {
            assert_eq!(
                moved.bracket_basis(a, b).unwrap(),
                expect.bracket_basis(a, b).unwrap(),
                "bracket [{a},{b}]"
            );
        }
    }

    #[test]
    fn cartan_killing_values() {
        let k = sl2_cartan().killing_form();
        // K(h,h) = 2, K(e,f) = 4 in this normalization.
        assert_eq!(k.at(0, 0), &e("2"));
        assert_eq!(k.at(1, 2), &e("4"));
        assert_eq!(k.at(1, 1), &e("0"));
    }
}
