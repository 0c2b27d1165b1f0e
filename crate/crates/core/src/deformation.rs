//! Deformations of Lie algebras and the low-degree Chevalley–Eilenberg
//! cohomology that controls them.
//!
//! An (infinitesimal) deformation perturbs the bracket by a bilinear
//! antisymmetric map `F`; the Jacobi identity to first order says `F` must
//! be a 2-cocycle, and `F` changes the isomorphism class only modulo
//! 2-coboundaries, so the space of directions is `H^2(g, g)`. The
//! differentials, with values in the adjoint module:
//!
//! ```text
//! (d1 p)(x, y)    = [x, p(y)] - [y, p(x)] - p([x, y])
//! (d2 F)(x, y, z) = [x, F(y,z)] - [y, F(x,z)] + [z, F(x,y)]
//!                   - F([x,y], z) + F([x,z], y) - F([y,z], x)
//! ```
//!
//! One-parameter families `[.,.]_t` tie the story back to contractions:
//! [`reverse_family_from_contraction`] turns a diagonal contraction into a
//! polynomial family that recovers the original algebra at `t = 1` and the
//! contraction limit at `t = 0`, and [`verify_family`] checks a family's
//! Jacobi identity for all `t` simultaneously and classifies the special
//! and generic fibers.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{Integer, Signed};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classify::{classify3, ClassifyError};
use crate::finite::{FiniteError, FiniteLieAlgebra, Vector};
use crate::linalg::Matrix;
use crate::scalar::{GaussianRational, ParamSet, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("cohomology over parametric coefficients is not supported; entry {0} is not constant")]
    NotConstant(String),
    #[error("family parameter `{0}` is not declared in the algebra")]
    UnknownFamilyParameter(String),
    #[error("cochain on [{0}, {0}] must vanish")]
    DiagonalCochainEntry(String),
}

/// A linear map `g -> g`, stored as its value on each basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct OneCochain {
    values: Vec<Vector>,
}

impl OneCochain {
    pub fn zero(dim: usize) -> Self {
        OneCochain {
            values: vec![Vector::zero(); dim],
        }
    }

    pub fn set(
        &mut self,
        alg: &FiniteLieAlgebra,
        on: &str,
        value: Vector,
    ) -> Result<(), DeformationError> {
        let j = alg.basis_index(on)?;
        self.values[j] = value;
        Ok(())
    }

    pub fn value_on(&self, j: usize) -> &Vector {
        &self.values[j]
    }

    /// Linear extension to an arbitrary element.
    pub fn eval(&self, alg: &FiniteLieAlgebra, v: &Vector) -> Result<Vector, DeformationError> {
        let mut acc = Vector::zero();
        for (s, c) in v.iter() {
            let j = alg.basis_index(s)?;
            acc = &acc + &self.values[j].scale(c);
        }
        Ok(acc)
    }
}

/// An antisymmetric bilinear map `g x g -> g`, stored on basis pairs
/// `i < j`; the other orientation is provided by the sign flip.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoCochain {
    values: BTreeMap<(usize, usize), Vector>,
}

impl TwoCochain {
    pub fn zero() -> Self {
        TwoCochain::default()
    }

    pub fn set(
        &mut self,
        alg: &FiniteLieAlgebra,
        a: &str,
        b: &str,
        value: Vector,
    ) -> Result<(), DeformationError> {
        let ia = alg.basis_index(a)?;
        let ib = alg.basis_index(b)?;
        if ia == ib {
            if value.is_zero() {
                return Ok(());
            }
            return Err(DeformationError::DiagonalCochainEntry(a.to_string()));
        }
        if ia < ib {
            self.values.insert((ia, ib), value);
        } else {
            self.values.insert((ib, ia), -&value);
        }
        Ok(())
    }

    pub fn value_on(&self, i: usize, j: usize) -> Vector {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => Vector::zero(),
            Ordering::Less => self.values.get(&(i, j)).cloned().unwrap_or_else(Vector::zero),
            Ordering::Greater => self
                .values
                .get(&(j, i))
                .map(|v| -v)
                .unwrap_or_else(Vector::zero),
        }
    }

    /// Bilinear extension to arbitrary elements.
    pub fn eval(
        &self,
        alg: &FiniteLieAlgebra,
        v: &Vector,
        w: &Vector,
    ) -> Result<Vector, DeformationError> {
        let mut acc = Vector::zero();
        for (sv, cv) in v.iter() {
            let i = alg.basis_index(sv)?;
            for (sw, cw) in w.iter() {
                let j = alg.basis_index(sw)?;
                let weight = cv * cw;
                acc = &acc + &self.value_on(i, j).scale(&weight);
            }
        }
        Ok(acc)
    }

    /// Render with basis names for reports.
    pub fn describe(&self, alg: &FiniteLieAlgebra) -> BTreeMap<String, Vector> {
        self.values
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j), v)| {
                (
                    format!("[{},{}]", alg.basis()[*i], alg.basis()[*j]),
                    v.clone(),
                )
            })
            .collect()
    }
}

/// A serializable snapshot of a 2-cochain in a specific basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCochainRepr(pub BTreeMap<String, Vector>);

impl Serialize for TwoCochainRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// The coboundary of a 1-cochain: `(d1 p)(x,y) = [x,p(y)] - [y,p(x)] -
/// p([x,y])`.
pub fn one_coboundary(
    alg: &FiniteLieAlgebra,
    p: &OneCochain,
) -> Result<TwoCochain, DeformationError> {
    let n = alg.dim();
    let mut out = TwoCochain::zero();
    for i in 0..n {
        for j in i + 1..n {
            let x = Vector::basis(alg.basis()[i].clone());
            let y = Vector::basis(alg.basis()[j].clone());
            let t1 = alg.bracket(&x, p.value_on(j))?;
            let t2 = alg.bracket(&y, p.value_on(i))?;
            let t3 = p.eval(alg, &alg.bracket(&x, &y)?)?;
            let val = &(&t1 - &t2) - &t3;
            out.set(alg, &alg.basis()[i].clone(), &alg.basis()[j].clone(), val)?;
        }
    }
    Ok(out)
}

/// A basis triple `(x, y, z)` naming where a defect was found.
pub type BasisTriple = (String, String, String);

/// All nonzero values of `d2 F` on basis triples. Empty means `F` is a
/// 2-cocycle.
pub fn two_cocycle_defects(
    alg: &FiniteLieAlgebra,
    f: &TwoCochain,
) -> Result<Vec<(BasisTriple, Vector)>, DeformationError> {
    let n = alg.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let x = Vector::basis(alg.basis()[i].clone());
                let y = Vector::basis(alg.basis()[j].clone());
                let z = Vector::basis(alg.basis()[k].clone());
                let t1 = alg.bracket(&x, &f.eval(alg, &y, &z)?)?;
                let t2 = alg.bracket(&y, &f.eval(alg, &x, &z)?)?;
                let t3 = alg.bracket(&z, &f.eval(alg, &x, &y)?)?;
                let t4 = f.eval(alg, &alg.bracket(&x, &y)?, &z)?;
                let t5 = f.eval(alg, &alg.bracket(&x, &z)?, &y)?;
                let t6 = f.eval(alg, &alg.bracket(&y, &z)?, &x)?;
                let defect = &(&(&(&(&t1 - &t2) + &t3) - &t4) + &t5) - &t6;
                if !defect.is_zero() {
                    out.push((
                        (
                            alg.basis()[i].clone(),
                            alg.basis()[j].clone(),
                            alg.basis()[k].clone(),
                        ),
                        defect,
                    ));
                }
            }
        }
    }
    Ok(out)
}

pub fn is_two_cocycle(
    alg: &FiniteLieAlgebra,
    f: &TwoCochain,
) -> Result<bool, DeformationError> {
    Ok(two_cocycle_defects(alg, f)?.is_empty())
}

// ---- cohomology dimensions over Q(i) ---------------------------------------

fn constant_of(c: &ScalarExpr, what: &str) -> Result<GaussianRational, DeformationError> {
    c.constant_value()
        .ok_or_else(|| DeformationError::NotConstant(format!("{what} = {c}")))
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

fn vector_coords(
    alg: &FiniteLieAlgebra,
    v: &Vector,
    what: &str,
) -> Result<Vec<GaussianRational>, DeformationError> {
    let mut out = vec![GaussianRational::zero(); alg.dim()];
    for (s, c) in v.iter() {
        out[alg.basis_index(s)?] = constant_of(c, what)?;
    }
    Ok(out)
}

/// Matrix of `d1` from 1-cochains (dimension `n^2`, column `(a,b)` is the
/// map `x_b -> x_a`) to 2-cochains (dimension `n(n-1)/2 * n`).
fn d1_matrix(alg: &FiniteLieAlgebra) -> Result<Matrix<GaussianRational>, DeformationError> {
    let n = alg.dim();
    let ps = pairs(n);
    let mut cols: Vec<Vec<GaussianRational>> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut p = OneCochain::zero(n);
            p.values[b] = Vector::basis(alg.basis()[a].clone());
            let df = one_coboundary(alg, &p)?;
            let mut col = Vec::with_capacity(ps.len() * n);
            for (i, j) in &ps {
                let val = df.value_on(*i, *j);
                col.extend(vector_coords(alg, &val, "d1 entry")?);
            }
            cols.push(col);
        }
    }
    let rows = ps.len() * n;
    let mut m = Matrix::zero(rows, n * n);
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            *m.at_mut(r, c) = v.clone();
        }
    }
    Ok(m)
}

/// Matrix of `d2` from 2-cochains to 3-cochains (dimension `n(n-1)(n-2)/6
/// * n`).
fn d2_matrix(alg: &FiniteLieAlgebra) -> Result<Matrix<GaussianRational>, DeformationError> {
    let n = alg.dim();
    let ps = pairs(n);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push((i, j, k));
            }
        }
    }
    let rows = triples.len() * n;
    let mut m = Matrix::zero(rows, ps.len() * n);
    for (pc, (i, j)) in ps.iter().enumerate() {
        for t in 0..n {
            let mut f = TwoCochain::zero();
            f.set(
                alg,
                &alg.basis()[*i].clone(),
                &alg.basis()[*j].clone(),
                Vector::basis(alg.basis()[t].clone()),
            )?;
            let col_index = pc * n + t;
            for (ti, (x, y, z)) in triples.iter().enumerate() {
                // Recompute d2 F on this triple.
                let defects = single_triple_d2(alg, &f, *x, *y, *z)?;
                let coords = vector_coords(alg, &defects, "d2 entry")?;
                for (r, v) in coords.iter().enumerate() {
                    *m.at_mut(ti * n + r, col_index) = v.clone();
                }
            }
        }
    }
    Ok(m)
}

fn single_triple_d2(
    alg: &FiniteLieAlgebra,
    f: &TwoCochain,
    i: usize,
    j: usize,
    k: usize,
) -> Result<Vector, DeformationError> {
    let x = Vector::basis(alg.basis()[i].clone());
    let y = Vector::basis(alg.basis()[j].clone());
    let z = Vector::basis(alg.basis()[k].clone());
    let t1 = alg.bracket(&x, &f.eval(alg, &y, &z)?)?;
    let t2 = alg.bracket(&y, &f.eval(alg, &x, &z)?)?;
    let t3 = alg.bracket(&z, &f.eval(alg, &x, &y)?)?;
    let t4 = f.eval(alg, &alg.bracket(&x, &y)?, &z)?;
    let t5 = f.eval(alg, &alg.bracket(&x, &z)?, &y)?;
    let t6 = f.eval(alg, &alg.bracket(&y, &z)?, &x)?;
    Ok(&(&(&(&(&t1 - &t2) + &t3) - &t4) + &t5) - &t6)
}

/// Dimensions of the degree-2 adjoint cohomology, with explicit cocycle
/// representatives for a complement of the coboundaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohomologyReport {
    pub cochain_dim: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub h2_dim: usize,
    pub representatives: Vec<TwoCochainRepr>,
}

/// Compute `H^2(g, g)` over `Q(i)` for an algebra with constant structure
/// coefficients.
pub fn h2(alg: &FiniteLieAlgebra) -> Result<CohomologyReport, DeformationError> {
    let n = alg.dim();
    let ps = pairs(n);
    let d1 = d1_matrix(alg)?;
    let d2 = d2_matrix(alg)?;
    let rank_d1 = d1.rank();
    let kernel = d2.kernel_basis();
    let cocycle_dim = kernel.len();
    debug_assert_eq!(cocycle_dim, ps.len() * n - d2.rank());

    // Image of d1 as row vectors; extend by kernel vectors that increase
    // the rank to pick representatives of H^2.
    let mut span_rows: Vec<Vec<GaussianRational>> = Vec::new();
    for c in 0..n * n {
        let col: Vec<GaussianRational> = (0..ps.len() * n).map(|r| d1.at(r, c).clone()).collect();
        span_rows.push(col);
    }
    span_rows.push(vec![GaussianRational::zero(); ps.len() * n]);
    let mut current_rank = Matrix::from_rows(span_rows.clone()).rank();
    debug_assert_eq!(current_rank, rank_d1);

    let mut representatives = Vec::new();
    for z in &kernel {
        span_rows.push(z.clone());
        let r = Matrix::from_rows(span_rows.clone()).rank();
        if r > current_rank {
            current_rank = r;
            // Decode the flat vector into a cochain description.
            let mut f = TwoCochain::zero();
            for (pc, (i, j)) in ps.iter().enumerate() {
                let v = Vector::from_terms((0..n).filter_map(|t| {
                    let c = &z[pc * n + t];
                    if c.is_zero() {
                        None
                    } else {
                        Some((alg.basis()[t].clone(), ScalarExpr::gauss(c.clone())))
                    }
                }));
                f.set(alg, &alg.basis()[*i].clone(), &alg.basis()[*j].clone(), v)?;
            }
            representatives.push(TwoCochainRepr(f.describe(alg)));
        } else {
            span_rows.pop();
        }
    }

    Ok(CohomologyReport {
        cochain_dim: ps.len() * n,
        cocycle_dim,
        coboundary_dim: rank_d1,
        h2_dim: cocycle_dim - rank_d1,
        representatives,
    })
}

/// Whether a 2-cocycle is a coboundary, i.e. whether `d1 p = F` has a
/// solution.
pub fn is_coboundary(
    alg: &FiniteLieAlgebra,
    f: &TwoCochain,
) -> Result<bool, DeformationError> {
    let n = alg.dim();
    let ps = pairs(n);
    let d1 = d1_matrix(alg)?;
    let mut rhs = Vec::with_capacity(ps.len() * n);
    for (i, j) in &ps {
        let v = f.value_on(*i, *j);
        rhs.extend(vector_coords(alg, &v, "cochain entry")?);
    }
    Ok(d1.solve(&rhs).is_some())
}

// ---- one-parameter families --------------------------------------------------

/// Report for a one-parameter family of brackets `[.,.]_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    /// Jacobi identity holds identically in the parameter.
    pub jacobi_identically: bool,
    /// First Jacobi defect when it does not, for diagnostics.
    pub jacobi_defect: Option<String>,
    /// Classification of the special fiber `t = 0`.
    pub at_zero: String,
    /// Classification of the generic fiber (symbolic), or the reason one
    /// could not be computed.
    pub generic: String,
    /// Classifications at sample values of `t`.
    pub samples: BTreeMap<String, String>,
    /// The family genuinely jumps between the special and generic fiber.
    pub jump: bool,
}

/// Verify a polynomial family of Lie brackets in the parameter `t_name`:
/// Jacobi for all parameter values at once, classification of the `t = 0`
/// fiber, of the generic fiber, and at the sample points `t = 1, 2, 3`.
pub fn verify_family(
    family: &FiniteLieAlgebra,
    t_name: &str,
) -> Result<FamilyReport, DeformationError> {
    if !family.params().contains(t_name) {
        return Err(DeformationError::UnknownFamilyParameter(t_name.to_string()));
    }
    let defects = family.jacobi_defects();
    let jacobi_identically = defects.is_empty();
    let jacobi_defect = defects
        .first()
        .map(|((x, y, z), d)| format!("({x},{y},{z}) -> {d}"));

    let zero = family.specialize(t_name, &GaussianRational::zero())?;
    let at_zero = match classify3(&zero) {
        Ok(out) => out.label.to_string(),
        Err(e) => format!("unclassified: {e}"),
    };
    let generic = match classify3(family) {
        Ok(out) => out.label.to_string(),
        Err(e) => format!("unclassified: {e}"),
    };
    let mut samples = BTreeMap::new();
    for v in ["1", "2", "3"] {
        let g = crate::scalar::parse::parse_gaussian(v).unwrap();
        let fiber = family.specialize(t_name, &g)?;
        let label = match classify3(&fiber) {
            Ok(out) => out.label.to_string(),
            Err(e) => format!("unclassified: {e}"),
        };
        samples.insert(format!("{t_name}={v}"), label);
    }
    let jump = at_zero != generic;
    Ok(FamilyReport {
        jacobi_identically,
        jacobi_defect,
        at_zero,
        generic,
        samples,
        jump,
    })
}

/// Build the one-parameter family that reverses a diagonal contraction:
/// conjugating by `diag(t^{D n_i})` (with `D` clearing denominators)
/// multiplies each structure constant by `t^{D(n_i + n_j - n_k)}`, a
/// non-negative power exactly because the contraction converges. The
/// result recovers the original algebra at `t = 1` and the contraction
/// limit at `t = 0`.
pub fn reverse_family_from_contraction(
    alg: &FiniteLieAlgebra,
    exponents: &BTreeMap<String, BigRational>,
    t_name: &str,
) -> Result<FiniteLieAlgebra, DeformationError> {
    // Clear denominators.
    let mut d: num::BigInt = 1.into();
    for e in exponents.values() {
        d = d.lcm(e.denom());
    }
    let n = alg.dim();
    let mut params = ParamSet::new(alg.params().iter())
        .expect("existing params stay valid");
    params
        .declare(t_name.to_string())
        .map_err(FiniteError::Scalar)?;
    let mut family = FiniteLieAlgebra::new(
        format!("{}[{t_name}]", alg.name()),
        alg.basis().to_vec(),
        params,
    )?;
    let scaled = |s: &str| -> Result<num::BigInt, DeformationError> {
        let e = exponents
            .get(s)
            .ok_or_else(|| FiniteError::UnknownBasisSymbol(s.to_string()))?;
        let v = e * BigRational::from_integer(d.clone());
        debug_assert!(v.is_integer());
        Ok(v.to_integer())
    };
    for i in 0..n {
        for j in i + 1..n {
            let coeffs = alg.bracket_indices(i, j);
            let mut v = Vector::zero();
            for (k, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let q = &(&scaled(&alg.basis()[i])? + &scaled(&alg.basis()[j])?)
                    - &scaled(&alg.basis()[k])?;
                if q.is_negative() {
                    return Err(DeformationError::Finite(FiniteError::Scalar(
                        crate::scalar::ScalarError::NegativeExponent(format!(
                            "{t_name}^{q} from a divergent contraction"
                        )),
                    )));
                }
                let power: i64 = i64::try_from(&q).expect("small exponent");
                let factor = ScalarExpr::var(t_name).pow(power as u32);
                v.add_term(alg.basis()[k].clone(), c * &factor);
            }
            family.add_bracket(&alg.basis()[i].clone(), &alg.basis()[j].clone(), v)?;
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;
    use crate::scalar::parse::parse_expr;

    fn e(s: &str) -> ScalarExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn sl2_cocycle_check_follows_the_differential() {
        let alg = algebras::sl2_cartan();
        // F(h,e) = f is a cocycle: every one of the six terms of d2 F on
        // (h,e,f) vanishes or cancels.
        let mut f = TwoCochain::zero();
        f.set(&alg, "h", "e", Vector::basis("f")).unwrap();
        assert!(is_two_cocycle(&alg, &f).unwrap());

        // F(h,e) = h is not: d2 F(h,e,f) = [f, h] = f.
        let mut g = TwoCochain::zero();
        g.set(&alg, "h", "e", Vector::basis("h")).unwrap();
        let defects = two_cocycle_defects(&alg, &g).unwrap();
        assert_eq!(defects.len(), 1);
        assert_eq!(defects[0].1, Vector::basis("f"));
    }

    #[test]
    fn flat_direction_cocycle_is_not_a_coboundary() {
        // On the lambda = -1 algebra, F(e,f) = 2h is a genuine deformation
        // direction: a cocycle that is not a coboundary.
        let alg = algebras::r3_minus_one_hef();
        let mut f = TwoCochain::zero();
        f.set(&alg, "e", "f", Vector::term("h", e("2"))).unwrap();
        assert!(is_two_cocycle(&alg, &f).unwrap());
        assert!(!is_coboundary(&alg, &f).unwrap());
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let alg = algebras::sl2_cartan();
        let mut p = OneCochain::zero(3);
        p.set(&alg, "e", Vector::basis("h")).unwrap();
        p.set(&alg, "h", Vector::term("f", e("3"))).unwrap();
        let df = one_coboundary(&alg, &p).unwrap();
        assert!(is_two_cocycle(&alg, &df).unwrap());
        assert!(is_coboundary(&alg, &df).unwrap());
    }

    #[test]
    fn semisimple_h2_vanishes() {
        let rep = h2(&algebras::sl2_cartan()).unwrap();
        assert_eq!(rep.cochain_dim, 9);
        // ad is surjective onto the derivations and the center is zero:
        // coboundaries have dimension 9 - 3 = 6, cocycles the same.
        assert_eq!(rep.coboundary_dim, 6);
        assert_eq!(rep.cocycle_dim, 6);
        assert_eq!(rep.h2_dim, 0);
        assert!(rep.representatives.is_empty());
    }

    #[test]
    fn abelian_h2_is_everything() {
        let rep = h2(&algebras::abelian(3)).unwrap();
        assert_eq!(rep.coboundary_dim, 0);
        assert_eq!(rep.cocycle_dim, 9);
        assert_eq!(rep.h2_dim, 9);
        assert_eq!(rep.representatives.len(), 9);
    }

    #[test]
    fn flat_direction_h2_contains_the_sl2_deformation() {
        let alg = algebras::r3_minus_one_hef();
        let rep = h2(&alg).unwrap();
        assert!(rep.h2_dim >= 1, "{rep:?}");
        // Internal consistency of the dimension bookkeeping.
        assert_eq!(rep.h2_dim, rep.cocycle_dim - rep.coboundary_dim);
        // Every representative is a cocycle and none is a coboundary.
        for r in &rep.representatives {
            let mut f = TwoCochain::zero();
            for (key, v) in &r.0 {
                let inner = key.trim_start_matches('[').trim_end_matches(']');
                let (a, b) = inner.split_once(',').unwrap();
                f.set(&alg, a, b, v.clone()).unwrap();
            }
            assert!(is_two_cocycle(&alg, &f).unwrap());
            assert!(!is_coboundary(&alg, &f).unwrap());
        }
    }

    #[test]
    fn family_from_contraction_reverses_it() {
        // sl2 with exponents (0,1,1) contracts to the lambda = -1 algebra;
        // the reverse family has [e,f]_t = 2 t^2 h.
        let alg = algebras::sl2_cartan();
        let exps: BTreeMap<String, BigRational> = [("h", "0"), ("e", "1"), ("f", "1")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.parse().unwrap()))
            .collect();
        let family = reverse_family_from_contraction(&alg, &exps, "t").unwrap();
        assert_eq!(
            family.bracket_basis("e", "f").unwrap(),
            Vector::term("h", e("2*t^2"))
        );
        let report = verify_family(&family, "t").unwrap();
        assert!(report.jacobi_identically);
        assert_eq!(report.at_zero, "r3(lambda=-1)");
        assert_eq!(report.generic, "sl2");
        assert!(report.jump);
        for label in report.samples.values() {
            assert_eq!(label, "sl2");
        }
    }

    #[test]
    fn half_integer_exponents_are_cleared() {
        let alg = algebras::sl2_cartan();
        let exps: BTreeMap<String, BigRational> = [("h", "0"), ("e", "1/2"), ("f", "1/2")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.parse().unwrap()))
            .collect();
        let family = reverse_family_from_contraction(&alg, &exps, "t").unwrap();
        // D = 2 turns the exponents into (0,1,1): same family as before.
        assert_eq!(
            family.bracket_basis("e", "f").unwrap(),
            Vector::term("h", e("2*t^2"))
        );
    }

    #[test]
    fn divergent_exponents_cannot_be_reversed() {
        let alg = algebras::sl2_cartan();
        let exps: BTreeMap<String, BigRational> = [("h", "-1"), ("e", "0"), ("f", "0")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.parse().unwrap()))
            .collect();
        assert!(reverse_family_from_contraction(&alg, &exps, "t").is_err());
    }

    #[test]
    fn family_with_broken_jacobi_is_reported() {
        // [h,e] = e, [h,f] = -f, [e,f] = t e: Jacobi fails at order t.
        let params = ParamSet::new(["t"]).unwrap();
        let mut fam =
            FiniteLieAlgebra::new("broken", vec!["h", "e", "f"], params).unwrap();
        fam.add_bracket("h", "e", Vector::basis("e")).unwrap();
        fam.add_bracket("h", "f", Vector::term("f", e("-1"))).unwrap();
        fam.add_bracket("e", "f", Vector::term("e", e("t"))).unwrap();
        let report = verify_family(&fam, "t").unwrap();
        assert!(!report.jacobi_identically);
        assert!(report.jacobi_defect.is_some());
    }
}
