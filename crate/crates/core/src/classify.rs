//! Classification of 3-dimensional complex Lie algebras up to isomorphism.
//!
//! Over C the isomorphism classes in dimension 3 are: the abelian algebra,
//! the Heisenberg algebra `n3`, `r2+C`, the solvable algebra `r3` (the
//! adjoint action on the derived algebra is a Jordan block), the family
//! `r3(lambda)` (diagonalizable action, eigenvalue ratio `lambda`), and
//! `sl2`. The decision tree keys on the dimension of the derived algebra:
//!
//! * 0 — abelian;
//! * 3 — `sl2`;
//! * 1 — `n3` if the derived line is central, else `r2+C`;
//! * 2 — the derived algebra is a 2-dimensional abelian ideal; pick any
//!   complement element `x` and restrict `ad x` to it, giving an invertible
//!   2x2 matrix `M` defined up to conjugation and scaling. Its invariant is
//!   `J = tr(M)^2 / det(M)`, and the eigenvalue ratio `lambda` solves
//!   `lambda^2 - (J-2) lambda + 1 = 0`, so the pair `{lambda, 1/lambda}` is
//!   canonical. Non-diagonalizable `M` (discriminant zero, `M` not scalar)
//!   is `r3`; otherwise `r3(lambda)` with `lambda` normalized to modulus at
//!   most 1 and non-negative imaginary part on the unit circle.
//!
//! Parametric algebras are classified generically: ranks are taken over the
//! rational-function field, and every non-constant polynomial whose
//! non-vanishing the answer relies on is reported in
//! [`Class3Outcome::assumed_nonzero`]. When the eigenvalue ratio itself is
//! symbolic it is reported as an expression if the restricted matrix is
//! triangular; otherwise classification is refused rather than guessed.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::finite::{FiniteError, FiniteLieAlgebra, Vector};
use crate::linalg::{promote, symbolic_rank, Matrix};
use crate::scalar::{GaussianRational, RatioExpr, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("classification requires dimension 3, got {0}")]
    WrongDimension(usize),
    #[error(
        "eigenvalue ratio is not Gaussian rational: J = tr^2/det = {j} needs sqrt({disc}) which does not exist in Q(i)"
    )]
    IrrationalEigenvalueRatio { j: String, disc: String },
    #[error(
        "cannot extract a symbolic eigenvalue ratio: the restricted adjoint matrix is not triangular (trace {trace}, determinant {det})"
    )]
    SymbolicEigenvalueProblem { trace: String, det: String },
    #[error("structure constants are inconsistent: {0}")]
    Internal(String),
    #[error(transparent)]
    Finite(#[from] FiniteError),
}

/// The eigenvalue-ratio parameter of the `r3(lambda)` family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Lambda {
    #[serde(rename = "numeric")]
    Numeric(GaussianRational),
    #[serde(rename = "symbolic")]
    Symbolic(RatioExpr),
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Numeric(v) => write!(f, "{v}"),
            Lambda::Symbolic(r) => write!(f, "{r}"),
        }
    }
}

/// Isomorphism class of a 3-dimensional complex Lie algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family")]
pub enum Class3Label {
    #[serde(rename = "C3")]
    Abelian,
    #[serde(rename = "n3")]
    Heisenberg,
    #[serde(rename = "r2+C")]
    R2PlusC,
    #[serde(rename = "r3")]
    R3,
    #[serde(rename = "r3_lambda")]
    R3Lambda { lambda: Lambda },
    #[serde(rename = "sl2")]
    Sl2,
}

impl fmt::Display for Class3Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class3Label::Abelian => write!(f, "C3"),
            Class3Label::Heisenberg => write!(f, "n3"),
            Class3Label::R2PlusC => write!(f, "r2+C"),
            Class3Label::R3 => write!(f, "r3"),
            Class3Label::R3Lambda { lambda } => write!(f, "r3(lambda={lambda})"),
            Class3Label::Sl2 => write!(f, "sl2"),
        }
    }
}

/// Classification result plus the genericity assumptions it relies on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Class3Outcome {
    pub label: Class3Label,
    /// Polynomials in the parameters assumed nonzero. Empty for numeric
    /// algebras: the answer is then unconditional.
    pub assumed_nonzero: Vec<String>,
}

fn push_assumption(assumptions: &mut Vec<String>, p: &ScalarExpr) {
    if p.constant_value().is_some() {
        return;
    }
    let s = p.to_string();
    if !assumptions.contains(&s) {
        assumptions.push(s);
    }
}

/// Clear denominators of a row of field elements, returning a proportional
/// polynomial row.
fn clear_row(row: &[RatioExpr]) -> Vec<ScalarExpr> {
    let mut common = ScalarExpr::one();
    for r in row {
        common = &common * r.denominator();
    }
    row.iter()
        .map(|r| {
            let cofactor = common
                .div_exact(r.denominator())
                .expect("denominator divides the product of denominators");
            r.numerator() * &cofactor
        })
        .collect()
}

/// Classify a 3-dimensional complex Lie algebra. The bracket is assumed to
/// satisfy Jacobi (use [`FiniteLieAlgebra::check_jacobi`] first).
pub fn classify3(alg: &FiniteLieAlgebra) -> Result<Class3Outcome, ClassifyError> {
    if alg.dim() != 3 {
        return Err(ClassifyError::WrongDimension(alg.dim()));
    }
    let n = 3usize;
    let mut assumptions = Vec::new();

    // Derived algebra: reduced spanning rows of all basis brackets.
    let mut derived_rows: Vec<Vec<ScalarExpr>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let row = alg.bracket_indices(i, j);
            if row.iter().any(|c| !c.is_zero()) {
                derived_rows.push(row);
            }
        }
    }
    derived_rows.push(vec![ScalarExpr::zero(); n]);
    let derived_matrix = Matrix::from_rows(derived_rows);
    let sr = symbolic_rank(&derived_matrix);
    for p in &sr.parameter_pivots {
        push_assumption(&mut assumptions, p);
    }
    let (rref, pivot_cols) = promote(&derived_matrix).rref();
    let derived_dim = sr.generic_rank;
    debug_assert_eq!(derived_dim, pivot_cols.len());

    let label = match derived_dim {
        0 => Class3Label::Abelian,
        3 => Class3Label::Sl2,
        1 => {
            // The derived line: first RREF row, denominators cleared.
            let row: Vec<RatioExpr> = (0..n).map(|c| rref.at(0, c).clone()).collect();
            let d_coeffs = clear_row(&row);
            let d = Vector::from_terms(
                d_coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (alg.basis()[k].clone(), c.clone())),
            );
            let mut central = true;
            for b in alg.basis() {
                let br = alg.bracket(&d, &Vector::basis(b.clone()))?;
                if !br.is_zero() {
                    central = false;
                    for (_, c) in br.iter() {
                        push_assumption(&mut assumptions, c);
                    }
                }
            }
            if central {
                Class3Label::Heisenberg
            } else {
                Class3Label::R2PlusC
            }
        }
        2 => classify_rank_two(alg, &rref, &pivot_cols, &mut assumptions)?,
        _ => unreachable!("rank of a 3-column matrix is at most 3"),
    };

    Ok(Class3Outcome {
        label,
        assumed_nonzero: assumptions,
    })
}

fn classify_rank_two(
    alg: &FiniteLieAlgebra,
    rref: &Matrix<RatioExpr>,
    pivot_cols: &[usize],
    assumptions: &mut Vec<String>,
) -> Result<Class3Label, ClassifyError> {
    let n = 3usize;
    // Basis of the derived ideal from the two RREF rows.
    let d: Vec<Vector> = (0..2)
        .map(|r| {
            let row: Vec<RatioExpr> = (0..n).map(|c| rref.at(r, c).clone()).collect();
            let coeffs = clear_row(&row);
            Vector::from_terms(
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (alg.basis()[k].clone(), c.clone())),
            )
        })
        .collect();

    // Complement element: any basis vector whose column is not a pivot.
    let free_col = (0..n)
        .find(|c| !pivot_cols.contains(c))
        .ok_or_else(|| ClassifyError::Internal("rank 2 with 3 pivot columns".into()))?;
    let x = Vector::basis(alg.basis()[free_col].clone());

    // With dim [g,g] = 2 the derived algebra of a Lie algebra is abelian.
    let dd = alg.bracket(&d[0], &d[1])?;
    if !dd.is_zero() {
        return Err(ClassifyError::Internal(format!(
            "derived algebra of dimension 2 is not abelian: [{}, {}] = {}",
            d[0], d[1], dd
        )));
    }

    // Columns of M: [x, d_k] expressed in the (d1, d2) basis.
    let basis_matrix = {
        let rows: Vec<Vec<RatioExpr>> = (0..n)
            .map(|k| {
                d.iter()
                    .map(|v| RatioExpr::from_expr(v.coeff(&alg.basis()[k])))
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows)
    };
    let mut m = Matrix::<RatioExpr>::zero(2, 2);
    for (col, dk) in d.iter().enumerate() {
        let image = alg.bracket(&x, dk)?;
        let rhs: Vec<RatioExpr> = (0..n)
            .map(|k| RatioExpr::from_expr(image.coeff(&alg.basis()[k])))
            .collect();
        let sol = basis_matrix.solve(&rhs).ok_or_else(|| {
            ClassifyError::Internal("bracket left the derived ideal".into())
        })?;
        *m.at_mut(0, col) = sol[0].clone();
        *m.at_mut(1, col) = sol[1].clone();
    }

    let trace = m.at(0, 0) + m.at(1, 1);
    let det = &(m.at(0, 0) * m.at(1, 1)) - &(m.at(0, 1) * m.at(1, 0));
    if det.is_zero() {
        return Err(ClassifyError::Internal(
            "restricted adjoint is singular but the derived algebra has dimension 2".into(),
        ));
    }
    push_assumption(assumptions, det.numerator());

    // J = tr^2 / det is invariant under both conjugation and scaling of M.
    let j = &(&trace * &trace) / &det;

    if let Some(jv) = j.constant_value() {
        // lambda^2 - (J - 2) lambda + 1 = 0, discriminant J(J - 4). The
        // discriminant of the characteristic polynomial of M is tr^2 - 4 det,
        // zero exactly when J = 4; the other root J = 0 is the trace-zero
        // case with distinct eigenvalues {a, -a} and ratio -1.
        let two = GaussianRational::from_int(2);
        let four = GaussianRational::from_int(4);
        if jv == four {
            // Double eigenvalue: scalar M means lambda = 1, otherwise a
            // genuine Jordan block.
            let scalar = m.at(0, 1).is_zero()
                && m.at(1, 0).is_zero()
                && m.at(0, 0) == m.at(1, 1);
            if scalar {
                return Ok(Class3Label::R3Lambda {
                    lambda: Lambda::Numeric(GaussianRational::one()),
                });
            }
            // Non-diagonalizable numeric J: certify non-scalarity
            // generically if entries are symbolic.
            for entry in [m.at(0, 1), m.at(1, 0)] {
                if !entry.is_zero() {
                    push_assumption(assumptions, entry.numerator());
                }
            }
            return Ok(Class3Label::R3);
        }
        if jv.is_zero() {
            return Ok(Class3Label::R3Lambda {
                lambda: Lambda::Numeric(-&GaussianRational::one()),
            });
        }
        let b = &jv - &two;
        let disc = &(&b * &b) - &four;
        let root = disc.sqrt().ok_or_else(|| ClassifyError::IrrationalEigenvalueRatio {
            j: jv.to_string(),
            disc: disc.to_string(),
        })?;
        let half = GaussianRational::from_int(2).inv().unwrap();
        let l1 = &(&b + &root) * &half;
        let l2 = &(&b - &root) * &half;
        Ok(Class3Label::R3Lambda {
            lambda: Lambda::Numeric(canonical_lambda(l1, l2)),
        })
    } else {
        // Symbolic J: only a triangular M yields the ratio in closed form.
        let (a, dd) = (m.at(0, 0), m.at(1, 1));
        if m.at(1, 0).is_zero() || m.at(0, 1).is_zero() {
            if a.is_zero() || dd.is_zero() {
                return Err(ClassifyError::Internal(
                    "triangular restricted adjoint with zero diagonal but nonzero determinant"
                        .into(),
                ));
            }
            push_assumption(assumptions, a.numerator());
            let ratio = dd / a;
            Ok(Class3Label::R3Lambda {
                lambda: Lambda::Symbolic(ratio),
            })
        } else {
            Err(ClassifyError::SymbolicEigenvalueProblem {
                trace: trace.to_string(),
                det: det.to_string(),
            })
        }
    }
}

/// Pick the canonical representative of `{lambda, 1/lambda}`: modulus at
/// most one, and non-negative imaginary part when on the unit circle.
fn canonical_lambda(l1: GaussianRational, l2: GaussianRational) -> GaussianRational {
    use std::cmp::Ordering;
    match l1.cmp_modulus_one() {
        Ordering::Less => return l1,
        Ordering::Greater => return l2,
        Ordering::Equal => {}
    }
    // Both roots have modulus 1 (their product is 1). Prefer Im >= 0.
    use num::Signed;
    if l1.im.is_negative() {
        l2
    } else {
        l1
    }
}

/// Whether two 3-dimensional algebras are isomorphic, decided via their
/// classification labels. Symbolic eigenvalue ratios compare equal when the
/// expressions are equal or reciprocal.
pub fn isomorphic3(a: &FiniteLieAlgebra, b: &FiniteLieAlgebra) -> Result<bool, ClassifyError> {
    let la = classify3(a)?.label;
    let lb = classify3(b)?.label;
    Ok(labels_match(&la, &lb))
}

/// Label equality with symbolic ratios identified up to reciprocal.
pub fn labels_match(la: &Class3Label, lb: &Class3Label) -> bool {
    match (la, lb) {
        (
            Class3Label::R3Lambda { lambda: Lambda::Symbolic(x) },
            Class3Label::R3Lambda { lambda: Lambda::Symbolic(y) },
        ) => x == y || (x * y) == RatioExpr::one(),
        _ => la == lb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;
    use crate::scalar::parse::{parse_expr, parse_gaussian};

    fn g(s: &str) -> GaussianRational {
        parse_gaussian(s).unwrap()
    }

    fn label_of(alg: &FiniteLieAlgebra) -> Class3Label {
        let out = classify3(alg).unwrap();
        assert!(
            out.assumed_nonzero.is_empty(),
            "unexpected assumptions {:?} for {}",
            out.assumed_nonzero,
            alg.name()
        );
        out.label
    }

    #[test]
    fn standard_algebras_get_their_names() {
        assert_eq!(label_of(&algebras::abelian(3)), Class3Label::Abelian);
        assert_eq!(label_of(&algebras::heisenberg()), Class3Label::Heisenberg);
        assert_eq!(label_of(&algebras::r2_plus_c()), Class3Label::R2PlusC);
        assert_eq!(label_of(&algebras::r3()), Class3Label::R3);
        assert_eq!(label_of(&algebras::sl2_cyclic()), Class3Label::Sl2);
        assert_eq!(label_of(&algebras::sl2_cartan()), Class3Label::Sl2);
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("1/2"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("1/2")) }
        );
        assert_eq!(
            label_of(&algebras::r3_minus_one_hef()),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("-1")) }
        );
    }

    #[test]
    fn lambda_is_canonicalized_to_the_unit_disk() {
        // lambda and 1/lambda give the same algebra; the label uses the
        // representative inside the closed unit disk.
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("2"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("1/2")) }
        );
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("-3/2"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("-2/3")) }
        );
        // On the unit circle the representative has Im >= 0.
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("i"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("i")) }
        );
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("-i"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("i")) }
        );
        assert_eq!(
            label_of(&algebras::r3_lambda(&g("1"))),
            Class3Label::R3Lambda { lambda: Lambda::Numeric(g("1")) }
        );
    }

    #[test]
    fn classification_is_a_basis_invariant() {
        use crate::linalg::Matrix;
        let e = |s: &str| parse_expr(s).unwrap();
        // A fixed invertible matrix with interesting entries.
        let p = Matrix::from_rows(vec![
            vec![e("1"), e("2"), e("0")],
            vec![e("i"), e("1"), e("1")],
            vec![e("0"), e("-1"), e("1/2")],
        ]);
        for alg in algebras::standard_list() {
            let before = classify3(&alg).unwrap().label;
            let moved = alg
                .change_basis(vec!["y1".into(), "y2".into(), "y3".into()], &p)
                .unwrap();
            assert!(moved.check_jacobi().is_ok());
            let after = classify3(&moved).unwrap().label;
            assert_eq!(before, after, "{}", alg.name());
        }
    }

    #[test]
    fn irrational_ratio_is_reported_not_guessed() {
        // [x1,x2] = x2 - x3, [x1,x3] = x2 gives M = [[1,1],[-1,0]]:
        // J = tr^2/det = 1, so the ratio needs sqrt(-3), outside Q(i).
        let mut a = algebras::abelian(3);
        let e = |s: &str| parse_expr(s).unwrap();
        a.add_bracket(
            "x1",
            "x2",
            crate::finite::Vector::from_terms([("x2", e("1")), ("x3", e("-1"))]),
        )
        .unwrap();
        a.add_bracket("x1", "x3", crate::finite::Vector::basis("x2")).unwrap();
        assert!(a.check_jacobi().is_ok());
        let err = classify3(&a).unwrap_err();
        assert!(
            matches!(err, ClassifyError::IrrationalEigenvalueRatio { .. }),
            "{err}"
        );
    }

    #[test]
    fn symbolic_family_reports_its_parameter() {
        let a = algebras::r3_lambda_symbolic();
        let out = classify3(&a).unwrap();
        match out.label {
            Class3Label::R3Lambda { lambda: Lambda::Symbolic(r) } => {
                assert_eq!(r, RatioExpr::from_expr(parse_expr("lam").unwrap()));
            }
            other => panic!("expected symbolic r3(lambda), got {other}"),
        }
        // The generic answer relies on lam != 0.
        assert!(
            out.assumed_nonzero.iter().any(|s| s.contains("lam")),
            "{:?}",
            out.assumed_nonzero
        );
    }

    #[test]
    fn isomorphism_identifies_reciprocal_ratios() {
        let a = algebras::r3_lambda(&g("2"));
        let b = algebras::r3_lambda(&g("1/2"));
        assert!(isomorphic3(&a, &b).unwrap());
        let c = algebras::r3_lambda(&g("-1"));
        assert!(!isomorphic3(&a, &c).unwrap());
        assert!(!isomorphic3(&algebras::heisenberg(), &algebras::r2_plus_c()).unwrap());
        assert!(isomorphic3(&algebras::sl2_cyclic(), &algebras::sl2_cartan()).unwrap());
    }

    #[test]
    fn wrong_dimension_is_refused() {
        let a = algebras::abelian(2);
        assert!(matches!(
            classify3(&a).unwrap_err(),
            ClassifyError::WrongDimension(2)
        ));
    }
}
