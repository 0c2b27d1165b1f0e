//! Finite-dimensional Lie algebras with exact symbolic structure constants.
//!
//! An algebra is an ordered basis of named symbols plus structure constants
//! `[x_i, x_j] = sum_k c_{ij}^k x_k` stored once per unordered pair (i < j);
//! antisymmetry is built into the representation rather than checked. The
//! coefficients are [`ScalarExpr`] values: exact Gaussian-rational
//! polynomials in declared parameters, Laurent in the distinguished
//! contraction variable `eps`.
//!
//! The module provides the bilinear bracket, Jacobi verification, basis
//! change, direct sums, the Killing form, and the classical invariants
//! (derived algebra, center, Killing rank, derived and lower central
//! series). Invariants over parametric algebras come in two flavours: a
//! strict one that refuses to answer when the result could depend on how
//! the parameters are specialized, and a generic one that reports the rank
//! over the rational-function field together with the polynomial pivots
//! whose vanishing could change it.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{promote, symbolic_rank, Matrix};
use crate::scalar::{normalize, ParamSet, ScalarError, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error("unknown basis symbol `{0}`")]
    UnknownBasisSymbol(String),
    #[error("duplicate basis symbol `{0}`")]
    DuplicateBasisSymbol(String),
    #[error("bracket [{0}, {1}] is already defined")]
    DuplicateBracket(String, String),
    #[error("bracket [{0}, {0}] of a basis element with itself must be zero")]
    SelfBracket(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("change-of-basis matrix is not invertible")]
    NotInvertible,
    #[error("basis change produced a coefficient outside the Laurent polynomial ring: {0}")]
    NonPolynomialChange(String),
    #[error("matrix size does not match the algebra dimension")]
    SizeMismatch,
    #[error("basis symbol `{0}` appears in both summands of a direct sum")]
    OverlappingBases(String),
    #[error(
        "invariant depends on parameter specialization; vanishing of {pivots:?} changes the answer"
    )]
    ParameterSpecializationNeeded { pivots: Vec<String> },
    #[error("Jacobi identity fails on ({x}, {y}, {z}): defect {defect}")]
    JacobiFailure {
        x: String,
        y: String,
        z: String,
        defect: String,
    },
}

/// Element of the algebra: a finite sum of basis symbols with polynomial
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vector {
    coeffs: BTreeMap<String, ScalarExpr>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(symbol: impl Into<String>) -> Self {
        Vector::term(symbol, ScalarExpr::one())
    }

    pub fn term(symbol: impl Into<String>, coeff: ScalarExpr) -> Self {
        let mut v = Vector::default();
        v.add_term(symbol.into(), coeff);
        v
    }

    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = (S, ScalarExpr)>,
        S: Into<String>,
    {
        let mut v = Vector::default();
        for (s, c) in terms {
            v.add_term(s.into(), c);
        }
        v
    }

    pub fn add_term(&mut self, symbol: String, coeff: ScalarExpr) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(symbol);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, symbol: &str) -> ScalarExpr {
        self.coeffs.get(symbol).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ScalarExpr)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, c: &ScalarExpr) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector {
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, v)| (s.clone(), v * c))
                .collect(),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }
}

impl std::ops::Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        let mut out = self.clone();
        for (s, c) in &rhs.coeffs {
            out.add_term(s.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        let mut out = self.clone();
        for (s, c) in &rhs.coeffs {
            out.add_term(s.clone(), -c);
        }
        out
    }
}

impl std::ops::Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector {
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "({c})*{s}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (s, c) in &self.coeffs {
            map.serialize_entry(s, &c.to_string())?;
        }
        map.end()
    }
}

/// A finite-dimensional Lie algebra presentation. Construct with
/// [`FiniteLieAlgebra::new`] and [`add_bracket`](FiniteLieAlgebra::add_bracket);
/// unspecified brackets are zero. Jacobi is *not* checked on construction —
/// call [`check_jacobi`](FiniteLieAlgebra::check_jacobi) (the file loader and
/// the CLI do).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLieAlgebra {
    name: String,
    basis: Vec<String>,
    params: ParamSet,
    index: BTreeMap<String, usize>,
    /// Coefficient vectors of `[x_i, x_j]` for i < j, length = dim each.
    brackets: BTreeMap<(usize, usize), Vec<ScalarExpr>>,
}

impl FiniteLieAlgebra {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        basis: Vec<S>,
        params: ParamSet,
    ) -> Result<Self, FiniteError> {
        let basis: Vec<String> = basis.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.clone(), i).is_some() {
                return Err(FiniteError::DuplicateBasisSymbol(b.clone()));
            }
        }
        Ok(FiniteLieAlgebra {
            name: name.into(),
            basis,
            params,
            index,
            brackets: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn basis_index(&self, symbol: &str) -> Result<usize, FiniteError> {
        self.index
            .get(symbol)
            .copied()
            .ok_or_else(|| FiniteError::UnknownBasisSymbol(symbol.to_string()))
    }

    /// Define `[a, b] = value`. Symbols may come in either order; the stored
    /// pair is normalized to increasing basis index with the sign adjusted.
    pub fn add_bracket(&mut self, a: &str, b: &str, value: Vector) -> Result<(), FiniteError> {
        let ia = self.basis_index(a)?;
        let ib = self.basis_index(b)?;
        if ia == ib {
            if value.is_zero() {
                return Ok(());
            }
            return Err(FiniteError::SelfBracket(a.to_string()));
        }
        let (key, val) = if ia < ib {
            ((ia, ib), value)
        } else {
            ((ib, ia), -&value)
        };
        if self.brackets.contains_key(&key) {
            return Err(FiniteError::DuplicateBracket(
                self.basis[key.0].clone(),
                self.basis[key.1].clone(),
            ));
        }
        let mut coeffs = vec![ScalarExpr::zero(); self.dim()];
        for (s, c) in val.iter() {
            let k = self.basis_index(s)?;
            coeffs[k] = normalize(c.clone(), &self.params)?;
        }
        if coeffs.iter().any(|c| !c.is_zero()) {
            self.brackets.insert(key, coeffs);
        }
        Ok(())
    }

    /// `[x_i, x_j]` as a coefficient vector over the basis.
    pub fn bracket_indices(&self, i: usize, j: usize) -> Vec<ScalarExpr> {
        use std::cmp::Ordering;
        let (key, sign) = match i.cmp(&j) {
            Ordering::Less => ((i, j), false),
            Ordering::Greater => ((j, i), true),
            Ordering::Equal => return vec![ScalarExpr::zero(); self.dim()],
        };
        match self.brackets.get(&key) {
            None => vec![ScalarExpr::zero(); self.dim()],
            Some(v) if !sign => v.clone(),
            Some(v) => v.iter().map(|c| -c).collect(),
        }
    }

    pub fn bracket_basis(&self, a: &str, b: &str) -> Result<Vector, FiniteError> {
        let i = self.basis_index(a)?;
        let j = self.basis_index(b)?;
        Ok(self.coeffs_to_vector(&self.bracket_indices(i, j)))
    }

    fn coeffs_to_vector(&self, coeffs: &[ScalarExpr]) -> Vector {
        Vector::from_terms(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (self.basis[k].clone(), c.clone())),
        )
    }

    fn vector_to_coeffs(&self, v: &Vector) -> Result<Vec<ScalarExpr>, FiniteError> {
        let mut out = vec![ScalarExpr::zero(); self.dim()];
        for (s, c) in v.iter() {
            out[self.basis_index(s)?] = c.clone();
        }
        Ok(out)
    }

    /// The bilinear bracket of two arbitrary elements.
    pub fn bracket(&self, v: &Vector, w: &Vector) -> Result<Vector, FiniteError> {
        let vc = self.vector_to_coeffs(v)?;
        let wc = self.vector_to_coeffs(w)?;
        let mut acc = Vector::zero();
        for ((i, j), coeffs) in &self.brackets {
            // [v, w] picks up (v_i w_j - v_j w_i) [x_i, x_j] for i < j.
            let weight = &(&vc[*i] * &wc[*j]) - &(&vc[*j] * &wc[*i]);
            if weight.is_zero() {
                continue;
            }
            for (k, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc.add_term(self.basis[k].clone(), c * &weight);
                }
            }
        }
        Ok(acc)
    }

    /// All nonzero Jacobi defects `[[x,y],z] + [[y,z],x] + [[z,x],y]` over
    /// basis triples. Empty means the bracket is a Lie bracket.
    pub fn jacobi_defects(&self) -> Vec<((String, String, String), Vector)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let x = Vector::basis(self.basis[i].clone());
                    let y = Vector::basis(self.basis[j].clone());
                    let z = Vector::basis(self.basis[k].clone());
                    let d1 = self.bracket(&self.bracket(&x, &y).unwrap(), &z).unwrap();
                    let d2 = self.bracket(&self.bracket(&y, &z).unwrap(), &x).unwrap();
                    let d3 = self.bracket(&self.bracket(&z, &x).unwrap(), &y).unwrap();
                    let defect = &(&d1 + &d2) + &d3;
                    if !defect.is_zero() {
                        out.push((
                            (
                                self.basis[i].clone(),
                                self.basis[j].clone(),
                                self.basis[k].clone(),
                            ),
                            defect,
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn check_jacobi(&self) -> Result<(), FiniteError> {
        match self.jacobi_defects().into_iter().next() {
            None => Ok(()),
            Some(((x, y, z), d)) => Err(FiniteError::JacobiFailure {
                x,
                y,
                z,
                defect: d.to_string(),
            }),
        }
    }

    /// Matrix of `ad v : x_j -> [v, x_j]` in the basis (entry `(k, j)` is
    /// the `x_k`-coefficient of `[v, x_j]`).
    pub fn ad(&self, v: &Vector) -> Result<Matrix<ScalarExpr>, FiniteError> {
        let n = self.dim();
        let mut m = Matrix::from_rows(vec![vec![ScalarExpr::zero(); n]; n]);
        for j in 0..n {
            let col = self.bracket(v, &Vector::basis(self.basis[j].clone()))?;
            for (s, c) in col.iter() {
                let k = self.basis_index(s)?;
                *m.at_mut(k, j) = c.clone();
            }
        }
        Ok(m)
    }

    /// Killing form matrix `K_{ij} = tr(ad x_i . ad x_j)`.
    pub fn killing_form(&self) -> Matrix<ScalarExpr> {
        let n = self.dim();
        let ads: Vec<Matrix<ScalarExpr>> = (0..n)
            .map(|i| self.ad(&Vector::basis(self.basis[i].clone())).unwrap())
            .collect();
        let mut k = Matrix::from_rows(vec![vec![ScalarExpr::zero(); n]; n]);
        for i in 0..n {
            for j in i..n {
                let mut tr = ScalarExpr::zero();
                for a in 0..n {
                    for b in 0..n {
                        tr = &tr + &(ads[i].at(a, b) * ads[j].at(b, a));
                    }
                }
                *k.at_mut(i, j) = tr.clone();
                *k.at_mut(j, i) = tr;
            }
        }
        k
    }

    /// Rewrite the algebra in the basis `y_k = sum_i P_{ik} x_i` (columns of
    /// `P` are the new basis vectors in old coordinates). The new structure
    /// constants must stay Laurent polynomials, otherwise this errors; use
    /// the contraction machinery for genuinely rational families.
    pub fn change_basis(
        &self,
        new_basis: Vec<String>,
        p: &Matrix<ScalarExpr>,
    ) -> Result<FiniteLieAlgebra, FiniteError> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n || new_basis.len() != n {
            return Err(FiniteError::SizeMismatch);
        }
        let pq = promote(p);
        let qinv = pq.inverse().ok_or(FiniteError::NotInvertible)?;
        let mut out = FiniteLieAlgebra::new(self.name.clone(), new_basis, self.params.clone())?;
        for a in 0..n {
            for b in a + 1..n {
                // [y_a, y_b] in old coordinates.
                let mut old = vec![ScalarExpr::zero(); n];
                for i in 0..n {
                    for j in 0..n {
                        let w = p.at(i, a) * p.at(j, b);
                        if w.is_zero() {
                            continue;
                        }
                        for (k, c) in self.bracket_indices(i, j).into_iter().enumerate() {
                            if !c.is_zero() {
                                old[k] = &old[k] + &(&c * &w);
                            }
                        }
                    }
                }
                // Convert to new coordinates via P^{-1}.
                let mut v = Vector::zero();
                for k in 0..n {
                    let mut acc = crate::scalar::RatioExpr::zero();
                    for (l, o) in old.iter().enumerate() {
                        acc = &acc
                            + &(qinv.at(k, l) * &crate::scalar::RatioExpr::from_expr(o.clone()));
                    }
                    if !acc.is_zero() {
                        let expr = acc
                            .as_expr()
                            .ok_or_else(|| FiniteError::NonPolynomialChange(acc.to_string()))?;
                        v.add_term(out.basis[k].clone(), expr);
                    }
                }
                out.add_bracket(&out.basis[a].clone(), &out.basis[b].clone(), v)?;
            }
        }
        Ok(out)
    }

    /// Direct sum with disjoint basis symbols.
    pub fn direct_sum(&self, other: &FiniteLieAlgebra) -> Result<FiniteLieAlgebra, FiniteError> {
        for s in &other.basis {
            if self.index.contains_key(s) {
                return Err(FiniteError::OverlappingBases(s.clone()));
            }
        }
        let basis: Vec<String> = self.basis.iter().chain(&other.basis).cloned().collect();
        let params = self.params.union(&other.params);
        let mut out = FiniteLieAlgebra::new(
            format!("{}+{}", self.name, other.name),
            basis,
            params,
        )?;
        for alg in [self, other] {
            for ((i, j), coeffs) in &alg.brackets {
                let v = alg.coeffs_to_vector(coeffs);
                out.add_bracket(&alg.basis[*i], &alg.basis[*j], v)?;
            }
        }
        Ok(out)
    }

    /// Substitute a numeric value for a parameter everywhere.
    pub fn specialize(
        &self,
        param: &str,
        value: &crate::scalar::GaussianRational,
    ) -> Result<FiniteLieAlgebra, FiniteError> {
        let params = ParamSet::new(self.params.iter().filter(|p| *p != param))
            .expect("existing params stay valid");
        let mut out = FiniteLieAlgebra {
            name: self.name.clone(),
            basis: self.basis.clone(),
            params,
            index: self.index.clone(),
            brackets: BTreeMap::new(),
        };
        for ((i, j), coeffs) in &self.brackets {
            let new: Result<Vec<ScalarExpr>, ScalarError> =
                coeffs.iter().map(|c| c.subst(param, value)).collect();
            let new = new?;
            if new.iter().any(|c| !c.is_zero()) {
                out.brackets.insert((*i, *j), new);
            }
        }
        Ok(out)
    }

    // ---- invariants ------------------------------------------------------

    /// Matrix whose rows span the derived algebra `[g, g]`.
    fn derived_span(&self) -> Matrix<ScalarExpr> {
        let n = self.dim();
        let rows: Vec<Vec<ScalarExpr>> = self
            .brackets
            .values()
            .cloned()
            .chain(std::iter::once(vec![ScalarExpr::zero(); n]))
            .collect();
        Matrix::from_rows(rows)
    }

    /// Stacked right-multiplication maps; the kernel is the center.
    fn center_matrix(&self) -> Matrix<ScalarExpr> {
        let n = self.dim();
        // Row block j: v -> coefficients of [v, x_j]; entry ((j,k), i) is the
        // x_k coefficient of [x_i, x_j].
        let mut rows = Vec::with_capacity(n * n);
        for j in 0..n {
            let mut block = vec![vec![ScalarExpr::zero(); n]; n];
            #[allow(clippy::needless_range_loop)] // i indexes columns, not rows
            for i in 0..n {
                for (k, c) in self.bracket_indices(i, j).into_iter().enumerate() {
                    block[k][i] = c;
                }
            }
            rows.extend(block);
        }
        Matrix::from_rows(rows)
    }

    /// Generic invariants over the rational-function field, plus the pivot
    /// polynomials whose vanishing could change them.
    pub fn invariants_generic(&self) -> (InvariantRecord, Vec<ScalarExpr>) {
        let mut pivots = Vec::new();
        let derived = symbolic_rank(&self.derived_span());
        pivots.extend(derived.parameter_pivots.iter().cloned());
        let center = symbolic_rank(&self.center_matrix());
        pivots.extend(center.parameter_pivots.iter().cloned());
        let killing = symbolic_rank(&self.killing_form());
        pivots.extend(killing.parameter_pivots.iter().cloned());

        let derived_dim = derived.generic_rank;
        let center_dim = self.dim() - center.generic_rank;

        let (solvable, nilpotent, series_pivots) = self.series_flags();
        pivots.extend(series_pivots);

        let record = InvariantRecord {
            dim: self.dim(),
            derived_dim,
            center_dim,
            killing_rank: killing.generic_rank,
            abelian: self.brackets.is_empty(),
            nilpotent,
            solvable,
        };
        (record, pivots)
    }

    /// Invariants that are guaranteed independent of parameter values.
    /// Errors with the offending pivots when that cannot be certified.
    pub fn invariants(&self) -> Result<InvariantRecord, FiniteError> {
        let (record, pivots) = self.invariants_generic();
        if pivots.is_empty() {
            Ok(record)
        } else {
            Err(FiniteError::ParameterSpecializationNeeded {
                pivots: pivots.iter().map(ToString::to_string).collect(),
            })
        }
    }

    /// Solvability and nilpotency via the derived and lower central series,
    /// with generic ranks; also returns any parameter pivots encountered.
    fn series_flags(&self) -> (bool, bool, Vec<ScalarExpr>) {
        let mut pivots = Vec::new();
        let mut rank_of = |rows: &[Vec<ScalarExpr>]| -> usize {
            let mut padded = rows.to_vec();
            padded.push(vec![ScalarExpr::zero(); self.dim()]);
            let sr = symbolic_rank(&Matrix::from_rows(padded));
            pivots.extend(sr.parameter_pivots);
            sr.generic_rank
        };

        // Span of [U, W] given spanning coefficient rows for U and W.
        let bracket_span = |u: &[Vec<ScalarExpr>], w: &[Vec<ScalarExpr>]| -> Vec<Vec<ScalarExpr>> {
            let mut out = Vec::new();
            for a in u {
                for b in w {
                    let va = self.coeffs_to_vector(a);
                    let vb = self.coeffs_to_vector(b);
                    let br = self.bracket(&va, &vb).unwrap();
                    if !br.is_zero() {
                        out.push(self.vector_to_coeffs(&br).unwrap());
                    }
                }
            }
            out
        };

        let full: Vec<Vec<ScalarExpr>> = (0..self.dim())
            .map(|i| {
                let mut row = vec![ScalarExpr::zero(); self.dim()];
                row[i] = ScalarExpr::one();
                row
            })
            .collect();

        // Derived series: g ⊇ [g,g] ⊇ [[g,g],[g,g]] ⊇ ...
        let mut cur = full.clone();
        let mut cur_rank = self.dim();
        let solvable = loop {
            let next = bracket_span(&cur, &cur);
            let next_rank = rank_of(&next);
            if next_rank == 0 {
                break true;
            }
            if next_rank == cur_rank {
                break false;
            }
            cur = next;
            cur_rank = next_rank;
        };

        // Lower central series: g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ...
        let mut cur = full.clone();
        let mut cur_rank = self.dim();
        let nilpotent = loop {
            let next = bracket_span(&full, &cur);
            let next_rank = rank_of(&next);
            if next_rank == 0 {
                break true;
            }
            if next_rank == cur_rank {
                break false;
            }
            cur = next;
            cur_rank = next_rank;
        };

        (solvable, nilpotent, pivots)
    }
}

impl fmt::Display for FiniteLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {} [{}]", self.name, self.basis.join(", "))?;
        for ((i, j), coeffs) in &self.brackets {
            writeln!(
                f,
                "  [{}, {}] = {}",
                self.basis[*i],
                self.basis[*j],
                self.coeffs_to_vector(coeffs)
            )?;
        }
        Ok(())
    }
}

impl Serialize for FiniteLieAlgebra {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            name: &'a str,
            basis: &'a [String],
            params: &'a ParamSet,
            brackets: BTreeMap<String, Vector>,
        }
        let brackets = self
            .brackets
            .iter()
            .map(|((i, j), coeffs)| {
                (
                    format!("[{},{}]", self.basis[*i], self.basis[*j]),
                    self.coeffs_to_vector(coeffs),
                )
            })
            .collect();
        Repr {
            name: &self.name,
            basis: &self.basis,
            params: &self.params,
            brackets,
        }
        .serialize(serializer)
    }
}

/// Classical structural invariants of a finite-dimensional Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub dim: usize,
    pub derived_dim: usize,
    pub center_dim: usize,
    pub killing_rank: usize,
    pub abelian: bool,
    pub nilpotent: bool,
    pub solvable: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse::parse_expr;

    fn e(s: &str) -> ScalarExpr {
        parse_expr(s).unwrap()
    }

    fn heisenberg() -> FiniteLieAlgebra {
        let mut a =
            FiniteLieAlgebra::new("n3", vec!["x1", "x2", "x3"], ParamSet::empty()).unwrap();
        a.add_bracket("x1", "x2", Vector::basis("x3")).unwrap();
        a
    }

    fn sl2_hef() -> FiniteLieAlgebra {
        let mut a = FiniteLieAlgebra::new("sl2", vec!["h", "e", "f"], ParamSet::empty()).unwrap();
        a.add_bracket("h", "e", Vector::term("e", e("2"))).unwrap();
        a.add_bracket("h", "f", Vector::term("f", e("-2"))).unwrap();
        a.add_bracket("e", "f", Vector::basis("h")).unwrap();
        a
    }

    #[test]
    fn antisymmetry_is_structural() {
        let a = heisenberg();
        let fwd = a.bracket_basis("x1", "x2").unwrap();
        let bwd = a.bracket_basis("x2", "x1").unwrap();
        assert_eq!(bwd, -&fwd);
        assert!(a.bracket_basis("x1", "x1").unwrap().is_zero());
    }

    #[test]
    fn bilinear_bracket_expands() {
        let a = sl2_hef();
        // [h + e, f] = [h,f] + [e,f] = -2f + h.
        let v = Vector::from_terms([("h", e("1")), ("e", e("1"))]);
        let got = a.bracket(&v, &Vector::basis("f")).unwrap();
        assert_eq!(got, Vector::from_terms([("f", e("-2")), ("h", e("1"))]));
    }

    #[test]
    fn jacobi_detects_a_broken_bracket() {
        assert!(heisenberg().check_jacobi().is_ok());
        assert!(sl2_hef().check_jacobi().is_ok());
        // Break sl2: [e,f] = e makes Jacobi fail.
        let mut bad =
            FiniteLieAlgebra::new("bad", vec!["h", "e", "f"], ParamSet::empty()).unwrap();
        bad.add_bracket("h", "e", Vector::term("e", e("2"))).unwrap();
        bad.add_bracket("h", "f", Vector::term("f", e("-2"))).unwrap();
        bad.add_bracket("e", "f", Vector::basis("e")).unwrap();
        let err = bad.check_jacobi().unwrap_err();
        assert!(matches!(err, FiniteError::JacobiFailure { .. }), "{err}");
    }

    #[test]
    fn sl2_killing_form_is_the_textbook_one() {
        // In the (h, e, f) basis: K(h,h)=8, K(e,f)=4, all other entries 0.
        let k = sl2_hef().killing_form();
        assert_eq!(k.at(0, 0), &e("8"));
        assert_eq!(k.at(1, 2), &e("4"));
        assert_eq!(k.at(2, 1), &e("4"));
        assert_eq!(k.at(0, 1), &e("0"));
        assert_eq!(k.at(1, 1), &e("0"));
    }

    #[test]
    fn invariants_of_the_standard_examples() {
        let inv = heisenberg().invariants().unwrap();
        assert_eq!(
            inv,
            InvariantRecord {
                dim: 3,
                derived_dim: 1,
                center_dim: 1,
                killing_rank: 0,
                abelian: false,
                nilpotent: true,
                solvable: true,
            }
        );
        let inv = sl2_hef().invariants().unwrap();
        assert_eq!(
            inv,
            InvariantRecord {
                dim: 3,
                derived_dim: 3,
                center_dim: 0,
                killing_rank: 3,
                abelian: false,
                nilpotent: false,
                solvable: false,
            }
        );
        let ab = FiniteLieAlgebra::new("C3", vec!["x1", "x2", "x3"], ParamSet::empty()).unwrap();
        let inv = ab.invariants().unwrap();
        assert!(inv.abelian && inv.nilpotent && inv.solvable);
        assert_eq!((inv.derived_dim, inv.center_dim), (0, 3));
    }

    #[test]
    fn parametric_invariants_report_their_pivots() {
        // [x1,x2] = lam*x2: derived dimension is 1 unless lam = 0.
        let params = ParamSet::new(["lam"]).unwrap();
        let mut a = FiniteLieAlgebra::new("scaled", vec!["x1", "x2"], params).unwrap();
        a.add_bracket("x1", "x2", Vector::term("x2", e("lam"))).unwrap();
        let err = a.invariants().unwrap_err();
        assert!(
            matches!(err, FiniteError::ParameterSpecializationNeeded { .. }),
            "{err}"
        );
        let (rec, pivots) = a.invariants_generic();
        assert_eq!(rec.derived_dim, 1);
        assert!(!pivots.is_empty());
    }

    #[test]
    fn change_basis_round_trips_and_respects_scaling() {
        let a = heisenberg();
        // Scale x3 by 1/2 in the new basis: y3 = (1/2) x3, so
        // [y1, y2] = x3 = 2 y3.
        let p = Matrix::from_rows(vec![
            vec![e("1"), e("0"), e("0")],
            vec![e("0"), e("1"), e("0")],
            vec![e("0"), e("0"), e("1/2")],
        ]);
        let b = a
            .change_basis(vec!["y1".into(), "y2".into(), "y3".into()], &p)
            .unwrap();
        assert_eq!(
            b.bracket_basis("y1", "y2").unwrap(),
            Vector::term("y3", e("2"))
        );
        // Conjugating back recovers the original constants.
        let pinv = Matrix::from_rows(vec![
            vec![e("1"), e("0"), e("0")],
            vec![e("0"), e("1"), e("0")],
            vec![e("0"), e("0"), e("2")],
        ]);
        let back = b
            .change_basis(vec!["x1".into(), "x2".into(), "x3".into()], &pinv)
            .unwrap();
        assert_eq!(back.bracket_basis("x1", "x2").unwrap(), Vector::basis("x3"));
    }

    #[test]
    fn change_basis_preserves_killing_rank_and_jacobi() {
        let a = sl2_hef();
        // A shear: h' = h + e.
        let p = Matrix::from_rows(vec![
            vec![e("1"), e("0"), e("0")],
            vec![e("1"), e("1"), e("0")],
            vec![e("0"), e("0"), e("1")],
        ]);
        let b = a
            .change_basis(vec!["a".into(), "b".into(), "c".into()], &p)
            .unwrap();
        assert!(b.check_jacobi().is_ok());
        assert_eq!(b.invariants().unwrap(), a.invariants().unwrap());
    }

    #[test]
    fn direct_sum_keeps_both_summands() {
        let mut r2 = FiniteLieAlgebra::new("r2", vec!["x1", "x2"], ParamSet::empty()).unwrap();
        r2.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
        let c1 = FiniteLieAlgebra::new("C", vec!["x3"], ParamSet::empty()).unwrap();
        let sum = r2.direct_sum(&c1).unwrap();
        assert_eq!(sum.dim(), 3);
        assert_eq!(sum.bracket_basis("x1", "x2").unwrap(), Vector::basis("x2"));
        assert!(sum.bracket_basis("x1", "x3").unwrap().is_zero());
        assert!(sum.check_jacobi().is_ok());
        // Clashing symbols are refused.
        assert!(matches!(
            r2.direct_sum(&r2).unwrap_err(),
            FiniteError::OverlappingBases(_)
        ));
    }

    #[test]
    fn specialize_substitutes_parameters() {
        let params = ParamSet::new(["lam"]).unwrap();
        let mut a = FiniteLieAlgebra::new("r3lam", vec!["x1", "x2", "x3"], params).unwrap();
        a.add_bracket("x1", "x2", Vector::basis("x2")).unwrap();
        a.add_bracket("x1", "x3", Vector::term("x3", e("lam"))).unwrap();
        let at2 = a
            .specialize("lam", &crate::scalar::parse::parse_gaussian("2").unwrap())
            .unwrap();
        assert_eq!(
            at2.bracket_basis("x1", "x3").unwrap(),
            Vector::term("x3", e("2"))
        );
        assert!(at2.params().is_empty());
        assert!(at2.invariants().is_ok());
    }
}
