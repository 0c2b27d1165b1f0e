//! Exact linear algebra over the scalars used elsewhere in the crate.
//!
//! Two layers:
//!
//! * a small [`Field`] abstraction with Gaussian elimination, rank, kernel,
//!   determinant, and inverse, instantiated at [`GaussianRational`] (numeric
//!   work) and [`RatioExpr`] (work over the rational-function field in the
//!   declared parameters);
//! * polynomial-matrix helpers that stay inside [`ScalarExpr`] and use
//!   fraction-free elimination, for callers that want to watch pivots (for
//!   example to certify that a symbolic rank is independent of parameters).
//!
//! Everything is exact; there is no floating point anywhere.

use crate::scalar::{GaussianRational, RatioExpr, ScalarExpr};

/// Minimal field interface for exact elimination.
pub trait Field: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplicative inverse; `None` only for zero.
    fn inv(&self) -> Option<Self>;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
    /// Preference weight when several pivots are available: lower is better.
    /// Used to keep symbolic elimination on constant pivots when possible.
    fn pivot_cost(&self) -> usize {
        0
    }
}

impl Field for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Option<Self> {
        GaussianRational::inv(self)
    }
}

impl Field for RatioExpr {
    fn zero() -> Self {
        RatioExpr::zero()
    }
    fn one() -> Self {
        RatioExpr::one()
    }
    fn is_zero(&self) -> bool {
        RatioExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(&RatioExpr::one() / self)
        }
    }
    fn pivot_cost(&self) -> usize {
        // Prefer pivots that are plain constants: dividing by them cannot
        // hide a parameter specialization.
        if self.constant_value().is_some() {
            0
        } else {
            1
        }
    }
}

/// Dense matrix in row-major order. Rows may be empty (0 × n or m × 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Clone> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut F {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<F: Field> Matrix<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for k in 0..n {
            *m.at_mut(k, k) = F::one();
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out: Matrix<F> = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a.mul(other.at(k, c));
                    let cur = out.at(r, c).add(&add);
                    *out.at_mut(r, c) = cur;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = F::zero();
                for (c, x) in v.iter().enumerate() {
                    acc = acc.add(&self.at(r, c).mul(x));
                }
                acc
            })
            .collect()
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Choose the cheapest nonzero pivot at or below `row`.
            let best = (row..m.rows)
                .filter(|&r| !m.at(r, col).is_zero())
                .min_by_key(|&r| m.at(r, col).pivot_cost());
            let Some(p) = best else { continue };
            m.swap_rows(row, p);
            let inv = m.at(row, col).inv().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.at(row, c).mul(&inv);
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(r, c).sub(&factor.mul(m.at(row, c)));
                        *m.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel (solutions of `M x = 0`), one vector per
    /// free column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![F::zero(); self.cols];
            v[f] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r.at(i, f).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = b`, if consistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, b.len(), "dimension mismatch");
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for (r, rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = rhs.clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // a pivot in the constants column: inconsistent
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red.at(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let mut m = self.clone();
        let mut det = F::one();
        for col in 0..m.cols {
            let best = (col..m.rows)
                .filter(|&r| !m.at(r, col).is_zero())
                .min_by_key(|&r| m.at(r, col).pivot_cost());
            let Some(p) = best else { return F::zero() };
            if p != col {
                m.swap_rows(col, p);
                det = det.neg();
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..m.rows {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&inv);
                for c in col..m.cols {
                    let v = m.at(r, c).sub(&factor.mul(m.at(col, c)));
                    *m.at_mut(r, c) = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = F::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[..n] != (0..n).collect::<Vec<_>>()[..] {
            return None;
        }
        let mut out = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *out.at_mut(r, c) = red.at(r, n + c).clone();
            }
        }
        Some(out)
    }
}

/// A matrix of polynomials, promoted to the rational-function field.
pub fn promote(m: &Matrix<ScalarExpr>) -> Matrix<RatioExpr> {
    let mut out = Matrix::zero(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            *out.at_mut(r, c) = RatioExpr::from_expr(m.at(r, c).clone());
        }
    }
    out
}

/// Outcome of a symbolic rank computation over polynomial entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicRank {
    /// Rank over the rational-function field in the parameters.
    pub generic_rank: usize,
    /// Pivots that were non-constant polynomials: the generic rank can drop
    /// exactly where one of these vanishes. Empty means the rank holds for
    /// every specialization of the parameters.
    pub parameter_pivots: Vec<ScalarExpr>,
}

impl SymbolicRank {
    pub fn is_unconditional(&self) -> bool {
        self.parameter_pivots.is_empty()
    }
}

/// Rank of a polynomial matrix over the rational-function field, reporting
/// the non-constant pivots so callers can tell whether the answer depends on
/// parameter specialization. The elimination prefers constant pivots, so a
/// non-empty `parameter_pivots` means no constant choice existed at that
/// step.
pub fn symbolic_rank(m: &Matrix<ScalarExpr>) -> SymbolicRank {
    let mut work = promote(m);
    let mut parameter_pivots = Vec::new();
    let mut rank = 0;
    let rows = work.rows();
    let cols = work.cols();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let best = (row..rows)
            .filter(|&r| !Field::is_zero(work.at(r, col)))
            .min_by_key(|&r| work.at(r, col).pivot_cost());
        let Some(p) = best else { continue };
        work.swap_rows(row, p);
        let pivot = work.at(row, col).clone();
        if pivot.constant_value().is_none() {
            // Keep the numerator: the rank can only change where it is zero
            // (denominators are products of earlier pivots, already listed).
            parameter_pivots.push(pivot.numerator().clone());
        }
        let inv = Field::inv(&pivot).expect("nonzero pivot");
        for c in col..cols {
            let v = Field::mul(work.at(row, c), &inv);
            *work.at_mut(row, c) = v;
        }
        for r in 0..rows {
            if r != row && !Field::is_zero(work.at(r, col)) {
                let factor = work.at(r, col).clone();
                for c in col..cols {
                    let v = Field::sub(work.at(r, c), &Field::mul(&factor, work.at(row, c)));
                    *work.at_mut(r, c) = v;
                }
            }
        }
        rank += 1;
        row += 1;
    }
    SymbolicRank {
        generic_rank: rank,
        parameter_pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse::parse_expr;

    fn g(s: &str) -> GaussianRational {
        crate::scalar::parse::parse_gaussian(s).unwrap()
    }

    fn gm(rows: &[&[&str]]) -> Matrix<GaussianRational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| g(s)).collect())
                .collect(),
        )
    }

    fn pm(rows: &[&[&str]]) -> Matrix<ScalarExpr> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_expr(s).unwrap()).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel_numeric() {
        let m = gm(&[&["1", "2", "3"], &["2", "4", "6"], &["0", "1", "1"]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(m.apply(v).iter().all(GaussianRational::is_zero));
        }
    }

    #[test]
    fn determinant_matches_cofactor_oracle() {
        assert_eq!(gm(&[&["1", "2"], &["3", "4"]]).det(), g("-2"));
        let m = gm(&[&["1", "2", "3"], &["1", "1", "1"], &["2", "1", "1"]]);
        // Oracle: direct cofactor expansion along the first row.
        let minor = |a: &str, b: &str, c: &str, d: &str| g(a) * g(d) - g(b) * g(c);
        let cof = g("1") * minor("1", "1", "1", "1") - g("2") * minor("1", "1", "2", "1")
            + g("3") * minor("1", "1", "2", "1");
        assert_eq!(m.det(), cof);
        assert_eq!(cof, g("-1"));
    }

    #[test]
    fn inverse_round_trips() {
        let m = gm(&[&["1", "i"], &["0", "2"]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(2));
        assert_eq!(inv.matmul(&m), Matrix::identity(2));
        let sing = gm(&[&["1", "2"], &["2", "4"]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = gm(&[&["1", "1"], &["1", "-1"]]);
        let x = m.solve(&[g("3"), g("1")]).unwrap();
        assert_eq!(x, vec![g("2"), g("1")]);
        let sing = gm(&[&["1", "1"], &["1", "1"]]);
        assert!(sing.solve(&[g("0"), g("1")]).is_none());
        assert!(sing.solve(&[g("1"), g("1")]).is_some());
    }

    #[test]
    fn symbolic_rank_prefers_constant_pivots() {
        // [[lam, 1], [0, 1]] has rank 2 generically, but the elimination can
        // pivot on the constant column first, so no parameter pivot at all
        // is needed to see rank 2: column 0 still forces the pivot lam.
        let m = pm(&[&["lam", "1"], &["0", "1"]]);
        let sr = symbolic_rank(&m);
        assert_eq!(sr.generic_rank, 2);
        assert_eq!(sr.parameter_pivots, vec![parse_expr("lam").unwrap()]);

        // With constants available at every step the elimination takes them
        // and certifies the rank unconditionally (det = -1 for all lam).
        let m2 = pm(&[&["lam", "1"], &["1", "0"]]);
        let sr2 = symbolic_rank(&m2);
        assert_eq!(sr2.generic_rank, 2);
        assert!(sr2.is_unconditional(), "pivots: {:?}", sr2.parameter_pivots);

        // [[lam,1],[1,1]] really does drop rank at lam = 1, so the report
        // must carry the responsible pivot.
        let m3 = pm(&[&["lam", "1"], &["1", "1"]]);
        let sr3 = symbolic_rank(&m3);
        assert_eq!(sr3.generic_rank, 2);
        assert_eq!(sr3.parameter_pivots.len(), 1);
        // The listed pivot vanishes exactly at the degeneration point.
        let at_one = sr3.parameter_pivots[0].subst("lam", &g("1")).unwrap();
        assert!(at_one.is_zero());
    }

    #[test]
    fn symbolic_rank_over_function_field() {
        // rank [[lam, lam^2], [1, lam]] = 1 generically (rows proportional).
        let m = pm(&[&["lam", "lam^2"], &["1", "lam"]]);
        let sr = symbolic_rank(&m);
        assert_eq!(sr.generic_rank, 1);
        assert!(sr.is_unconditional());
    }

    #[test]
    fn ratio_field_elimination() {
        let lam = RatioExpr::from_expr(parse_expr("lam").unwrap());
        let one = <RatioExpr as Field>::one();
        let m = Matrix::from_rows(vec![
            vec![lam.clone(), one.clone()],
            vec![one.clone(), lam.clone()],
        ]);
        // det = lam^2 - 1.
        let det = m.det();
        let expect = RatioExpr::from_expr(parse_expr("lam^2 - 1").unwrap());
        assert_eq!(det, expect);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(2));
    }

    #[test]
    fn kernel_of_zero_and_full_rank() {
        let z: Matrix<GaussianRational> = Matrix::zero(2, 3);
        assert_eq!(z.kernel_basis().len(), 3);
        let id: Matrix<GaussianRational> = Matrix::identity(3);
        assert!(id.kernel_basis().is_empty());
    }
}
