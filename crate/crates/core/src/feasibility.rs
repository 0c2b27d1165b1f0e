//! Exact feasibility of small systems of linear (in)equalities over Q,
//! with machine-checkable infeasibility certificates.
//!
//! Contraction-pattern solving reduces to systems of the form "these
//! integer combinations of exponents are zero, those are at least one, the
//! rest are non-negative". The solver is Fourier–Motzkin elimination with
//! full provenance: every derived inequality remembers the non-negative
//! multipliers of the original constraints that produced it, so an
//! infeasible system yields a Farkas-style certificate — an explicit
//! non-negative combination of the inputs equal to an impossible constant
//! inequality — that can be re-verified independently of the solver.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde::Serialize;

/// One linear constraint: `sum(coeffs[v] * v) + constant (>= | ==) 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConstraint {
    /// Human-readable provenance, quoted verbatim in certificates.
    pub label: String,
    #[serde(serialize_with = "ser_coeffs")]
    pub coeffs: BTreeMap<String, BigRational>,
    #[serde(serialize_with = "ser_ratio")]
    pub constant: BigRational,
    pub equality: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_coeffs<S: serde::Serializer>(
    m: &BTreeMap<String, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &v.to_string())?;
    }
    map.end()
}

impl LinearConstraint {
    pub fn geq(label: impl Into<String>, coeffs: BTreeMap<String, BigRational>, constant: BigRational) -> Self {
        LinearConstraint {
            label: label.into(),
            coeffs,
            constant,
            equality: false,
        }
    }

    pub fn eq(label: impl Into<String>, coeffs: BTreeMap<String, BigRational>, constant: BigRational) -> Self {
        LinearConstraint {
            label: label.into(),
            coeffs,
            constant,
            equality: true,
        }
    }

    /// Evaluate the left-hand side at a point (absent variables are 0).
    pub fn lhs_at(&self, point: &BTreeMap<String, BigRational>) -> BigRational {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            if let Some(x) = point.get(v) {
                acc += c * x;
            }
        }
        acc
    }

    pub fn holds_at(&self, point: &BTreeMap<String, BigRational>) -> bool {
        let lhs = self.lhs_at(point);
        if self.equality {
            lhs.is_zero()
        } else {
            !lhs.is_negative()
        }
    }

    fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| format!("{c}*{v}"))
            .collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        let op = if self.equality { "==" } else { ">=" };
        format!("{} {op} 0", parts.join(" + "))
    }
}

impl std::fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.label, self.render())
    }
}

/// One line of an infeasibility certificate: multiply the named original
/// constraint (in `>= 0` form; equalities may also appear negated, marked
/// by `negated`) by the non-negative `multiplier`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateLine {
    pub label: String,
    pub negated: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub multiplier: BigRational,
}

/// Result of a feasibility check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum Feasibility {
    #[serde(rename = "feasible")]
    Feasible {
        #[serde(serialize_with = "ser_coeffs")]
        witness: BTreeMap<String, BigRational>,
    },
    #[serde(rename = "infeasible")]
    Infeasible {
        /// Non-negative combination of the constraints below sums to
        /// `contradiction`, a constant-only inequality that is false.
        certificate: Vec<CertificateLine>,
        contradiction: String,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// A conjunction of linear constraints.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LinearSystem {
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: BTreeMap<String, BigRational>,
    constant: BigRational,
    /// Provenance: (constraint index, negated?) -> non-negative multiplier.
    source: BTreeMap<(usize, bool), BigRational>,
}

impl Row {
    fn scaled(&self, f: &BigRational) -> Row {
        Row {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * f)).collect(),
            constant: &self.constant * f,
            source: self.source.iter().map(|(k, m)| (*k, m * f)).collect(),
        }
    }

    fn plus(&self, other: &Row) -> Row {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let e = coeffs.entry(v.clone()).or_insert_with(BigRational::zero);
            *e += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        let mut source = self.source.clone();
        for (k, m) in &other.source {
            let e = source.entry(*k).or_insert_with(BigRational::zero);
            *e += m;
        }
        Row {
            coeffs,
            constant: &self.constant + &other.constant,
            source,
        }
    }
}

/// Normalize each row (leading coefficient scaled to magnitude 1, a
/// positive operation on `>= 0` rows) and, among rows describing the same
/// hyperplane direction, keep only the most binding constant. Dropped
/// rows are implied by kept ones, so feasibility, witnesses, and
/// certificates are unaffected.
fn prune(rows: Vec<Row>) -> Vec<Row> {
    let mut best: BTreeMap<Vec<(String, BigRational)>, Row> = BTreeMap::new();
    for r in rows {
        let scale = r.coeffs.values().next().map(|lead| lead.abs().recip());
        let r = match scale {
            Some(s) if s != BigRational::from(BigInt::from(1)) => r.scaled(&s),
            _ => r,
        };
        let key: Vec<(String, BigRational)> =
            r.coeffs.iter().map(|(v, c)| (v.clone(), c.clone())).collect();
        match best.get(&key) {
            Some(kept) if kept.constant <= r.constant => {}
            _ => {
                best.insert(key, r);
            }
        }
    }
    best.into_values().collect()
}

impl LinearSystem {
    pub fn new() -> Self {
        LinearSystem::default()
    }

    pub fn push(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .constraints
            .iter()
            .flat_map(|c| c.coeffs.keys().cloned())
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn holds_at(&self, point: &BTreeMap<String, BigRational>) -> bool {
        self.constraints.iter().all(|c| c.holds_at(point))
    }

    /// Decide feasibility by Fourier–Motzkin elimination. Exact, and
    /// complete for any number of variables (the systems here are small).
    /// Rows are normalized and dominated rows dropped after every step,
    /// and variables are eliminated in a cheapest-first order, which keeps
    /// the classical blowup at bay for the pattern systems that arise.
    pub fn solve(&self) -> Feasibility {
        // Expand to `>= 0` rows: an equality contributes itself and its
        // negation.
        let mut rows: Vec<Row> = Vec::new();
        for (idx, c) in self.constraints.iter().enumerate() {
            let base = Row {
                coeffs: c.coeffs.clone(),
                constant: c.constant.clone(),
                source: BTreeMap::from([((idx, false), BigRational::from(BigInt::from(1)))]),
            };
            if c.equality {
                let neg = Row {
                    coeffs: c.coeffs.iter().map(|(v, x)| (v.clone(), -x)).collect(),
                    constant: -&c.constant,
                    source: BTreeMap::from([((idx, true), BigRational::from(BigInt::from(1)))]),
                };
                rows.push(base);
                rows.push(neg);
            } else {
                rows.push(base);
            }
        }
        for r in rows.iter_mut() {
            r.coeffs.retain(|_, c| !c.is_zero());
        }

        // Snapshot the rows surviving at each elimination stage so the
        // witness can be back-substituted afterwards.
        let mut stages: Vec<(String, Vec<Row>)> = Vec::new();

        let mut current = prune(rows);
        let mut remaining = self.variables();
        while !remaining.is_empty() {
            // Eliminate the variable producing the fewest product rows.
            let cost = |v: &String| {
                let mut pos = 0usize;
                let mut neg = 0usize;
                for r in &current {
                    match r.coeffs.get(v).map(|c| c.is_positive()) {
                        None => {}
                        Some(true) => pos += 1,
                        Some(false) => neg += 1,
                    }
                }
                pos * neg
            };
            let best = remaining
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| cost(v))
                .map(|(i, _)| i)
                .expect("remaining is non-empty");
            let v = remaining.remove(best);

            stages.push((v.clone(), current.clone()));
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut zero = Vec::new();
            for r in current {
                match r.coeffs.get(&v).map(|c| c.is_positive()) {
                    None => zero.push(r),
                    Some(true) => pos.push(r),
                    Some(false) => neg.push(r),
                }
            }
            let mut next = zero;
            for p in &pos {
                for n in &neg {
                    // Scale so the v-coefficients cancel: |n_v| * p + p_v * n.
                    let pv = p.coeffs[&v].clone();
                    let nv = n.coeffs[&v].clone();
                    let combined = p.scaled(&-&nv).plus(&n.scaled(&pv));
                    debug_assert!(!combined.coeffs.contains_key(&v));
                    next.push(combined);
                }
            }
            current = prune(next);
        }

        // Variable-free rows must all be satisfied.
        for r in &current {
            if r.constant.is_negative() {
                let certificate = r
                    .source
                    .iter()
                    .filter(|(_, m)| !m.is_zero())
                    .map(|((idx, negated), m)| CertificateLine {
                        label: self.constraints[*idx].label.clone(),
                        negated: *negated,
                        multiplier: m.clone(),
                    })
                    .collect();
                return Feasibility::Infeasible {
                    certificate,
                    contradiction: format!("{} >= 0", r.constant),
                };
            }
        }

        // Back-substitute a witness in reverse elimination order.
        let mut witness: BTreeMap<String, BigRational> = BTreeMap::new();
        for (v, rows_at_stage) in stages.iter().rev() {
            let mut lower: Option<BigRational> = None; // v >= lower
            let mut upper: Option<BigRational> = None; // v <= upper
            for r in rows_at_stage {
                let Some(cv) = r.coeffs.get(v) else { continue };
                // sum_{w != v} c_w w + c_v v + k >= 0.
                let mut rest = r.constant.clone();
                for (w, c) in &r.coeffs {
                    if w != v {
                        rest += c * witness.get(w).cloned().unwrap_or_else(BigRational::zero);
                    }
                }
                let bound = -&rest / cv;
                if cv.is_positive() {
                    lower = Some(match lower {
                        None => bound,
                        Some(l) => l.max(bound),
                    });
                } else {
                    upper = Some(match upper {
                        None => bound,
                        Some(u) => u.min(bound),
                    });
                }
            }
            let zero = BigRational::zero();
            let value = match (&lower, &upper) {
                (None, None) => zero.clone(),
                (Some(l), None) => l.max(&zero).clone(),
                (None, Some(u)) => u.min(&zero).clone(),
                (Some(l), Some(u)) => {
                    debug_assert!(l <= u, "elimination left an empty interval");
                    if l <= &zero && &zero <= u {
                        zero.clone()
                    } else {
                        l.clone()
                    }
                }
            };
            witness.insert(v.clone(), value);
        }
        debug_assert!(self.holds_at(&witness), "witness must satisfy the system");
        Feasibility::Feasible { witness }
    }

    /// Re-verify an infeasibility certificate from first principles: the
    /// stated non-negative combination of the constraints must produce a
    /// variable-free inequality with a negative constant.
    pub fn verify_certificate(&self, certificate: &[CertificateLine]) -> bool {
        let mut coeffs: BTreeMap<String, BigRational> = BTreeMap::new();
        let mut constant = BigRational::zero();
        for line in certificate {
            if line.multiplier.is_negative() {
                return false;
            }
            let Some(c) = self.constraints.iter().find(|c| c.label == line.label) else {
                return false;
            };
            if line.negated && !c.equality {
                return false; // only equalities may be used with both signs
            }
            let sign = if line.negated {
                -BigRational::from(BigInt::from(1))
            } else {
                BigRational::from(BigInt::from(1))
            };
            let f = &line.multiplier * sign;
            for (v, x) in &c.coeffs {
                let e = coeffs.entry(v.clone()).or_insert_with(BigRational::zero);
                *e += x * &f;
            }
            constant += &c.constant * &f;
        }
        coeffs.retain(|_, c| !c.is_zero());
        coeffs.is_empty() && constant.is_negative()
    }
}

/// Convenience: a rational from an integer pair.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(pairs: &[(&str, i64)]) -> BTreeMap<String, BigRational> {
        pairs
            .iter()
            .map(|(v, x)| (v.to_string(), ratio(*x, 1)))
            .collect()
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut sys = LinearSystem::new();
        // x - 1 >= 0 and -x >= 0.
        sys.push(LinearConstraint::geq("x at least one", c(&[("x", 1)]), ratio(-1, 1)));
        sys.push(LinearConstraint::geq("x at most zero", c(&[("x", -1)]), ratio(0, 1)));
        match sys.solve() {
            Feasibility::Infeasible { certificate, contradiction } => {
                assert!(sys.verify_certificate(&certificate), "{certificate:?}");
                assert_eq!(contradiction, "-1 >= 0");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn equalities_chain_through_elimination() {
        let mut sys = LinearSystem::new();
        sys.push(LinearConstraint::eq("x equals y", c(&[("x", 1), ("y", -1)]), ratio(0, 1)));
        sys.push(LinearConstraint::eq("y equals z", c(&[("y", 1), ("z", -1)]), ratio(0, 1)));
        sys.push(LinearConstraint::eq("z is three", c(&[("z", 1)]), ratio(-3, 1)));
        match sys.solve() {
            Feasibility::Feasible { witness } => {
                assert_eq!(witness["x"], ratio(3, 1));
                assert_eq!(witness["y"], ratio(3, 1));
                assert_eq!(witness["z"], ratio(3, 1));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn witness_respects_two_sided_bounds() {
        let mut sys = LinearSystem::new();
        sys.push(LinearConstraint::geq("lower", c(&[("x", 1)]), ratio(-2, 1))); // x >= 2
        sys.push(LinearConstraint::geq("upper", c(&[("x", -1)]), ratio(5, 1))); // x <= 5
        sys.push(LinearConstraint::geq("tie", c(&[("y", 1), ("x", -1)]), ratio(0, 1))); // y >= x
        match sys.solve() {
            Feasibility::Feasible { witness } => {
                assert!(sys.holds_at(&witness), "{witness:?}");
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_system_is_trivially_feasible() {
        assert!(LinearSystem::new().solve().is_feasible());
    }

    #[test]
    fn certificate_uses_equality_negation_when_needed() {
        let mut sys = LinearSystem::new();
        // x == 0 together with x - 1 >= 0 is infeasible; the certificate
        // needs the negated direction of the equality.
        sys.push(LinearConstraint::eq("x is zero", c(&[("x", 1)]), ratio(0, 1)));
        sys.push(LinearConstraint::geq("x at least one", c(&[("x", 1)]), ratio(-1, 1)));
        match sys.solve() {
            Feasibility::Infeasible { certificate, .. } => {
                assert!(sys.verify_certificate(&certificate));
                assert!(certificate.iter().any(|l| l.negated));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let mut sys = LinearSystem::new();
        sys.push(LinearConstraint::geq("a", c(&[("x", 1)]), ratio(-1, 1)));
        sys.push(LinearConstraint::geq("b", c(&[("x", -1)]), ratio(0, 1)));
        let Feasibility::Infeasible { mut certificate, .. } = sys.solve() else {
            panic!("expected infeasible");
        };
        assert!(sys.verify_certificate(&certificate));
        certificate[0].multiplier = ratio(-1, 1);
        assert!(!sys.verify_certificate(&certificate));
        certificate[0].multiplier = ratio(0, 1);
        assert!(!sys.verify_certificate(&certificate));
    }

    #[test]
    fn rational_coefficients_are_exact() {
        let mut sys = LinearSystem::new();
        // (1/3) x >= 1 and x <= 2.999... as 2999/1000: infeasible by a hair.
        let mut co = BTreeMap::new();
        co.insert("x".to_string(), ratio(1, 3));
        sys.push(LinearConstraint::geq("third", co, ratio(-1, 1)));
        sys.push(LinearConstraint::geq("cap", c(&[("x", -1)]), ratio(2999, 1000)));
        match sys.solve() {
            Feasibility::Infeasible { certificate, .. } => {
                assert!(sys.verify_certificate(&certificate));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
