//! Closed-form bracket templates for integer-indexed infinite-dimensional
//! Lie algebras.
//!
//! A [`BracketTemplate`] describes brackets between whole families of
//! basis elements at once: `[V_n, V_m]` is given by a finite list of
//! rules, one per residue pair of the degrees modulo a small modulus, and
//! each rule emits terms `coeff(n, m) * T_{n+m+offset}` with coefficients
//! polynomial in the degrees. That shape covers the Witt algebra, its
//! higher-genus deformations, loop algebras, affine algebras with a
//! central extension, and the deformed affine family — and it makes
//! equality and Jacobi checks exact: per-rule polynomial identities plus
//! an evaluated window of degrees.
//!
//! Submodules: [`make`] builds the standard templates; [`contract`]
//! applies graded contractions (exponent maps), extracts `eps -> 0`
//! limits, and analyzes which keep/kill patterns are realizable.

pub mod contract;
pub mod make;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::ContractionError;
use crate::finite::FiniteError;
use crate::scalar::{GaussianRational, Monomial, ParamSet, ScalarError, ScalarExpr, EPS};

/// Formal degree variable for the left bracket argument.
pub const DEG_X: &str = "n";
/// Formal degree variable for the right bracket argument.
pub const DEG_Y: &str = "m";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradedError {
    #[error("unknown basis family `{0}`")]
    UnknownFamily(String),
    #[error("no bracket rule matches [{x}, {y}]")]
    NoRuleMatches { x: String, y: String },
    #[error("central element `{0}` only exists in degree 0")]
    CentralDegreeNonzero(String),
    #[error("malformed template: {0}")]
    MalformedTemplate(String),
    #[error("finite algebra fails the Jacobi identity: {0}")]
    UnverifiedFiniteAlgebra(String),
    #[error("exponent map is not constant on rule {0}")]
    IllTypedExponent(String),
    #[error("no exponent assigned to grade class {0}")]
    MissingClassExponent(String),
    #[error("rule {rule} diverges: eps order {order}")]
    Divergent { rule: String, order: BigRational },
    #[error("grades do not respect the bracket: {0}")]
    NotAGrading(String),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

/// One factor of a grading group: a cyclic group of finite order, or all
/// of the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradeFactor {
    Finite(u32),
    Integers,
}

/// A direct product of cyclic factors, the value group of the grading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeGroup {
    pub factors: Vec<GradeFactor>,
}

impl GradeGroup {
    pub fn trivial() -> Self {
        GradeGroup {
            factors: vec![GradeFactor::Finite(1)],
        }
    }

    pub fn cyclic(q: u32) -> Self {
        GradeGroup {
            factors: vec![GradeFactor::Finite(q)],
        }
    }

    pub fn product(moduli: &[u32]) -> Self {
        GradeGroup {
            factors: moduli.iter().map(|&q| GradeFactor::Finite(q)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.factors.len()]
    }

    /// Reduce coordinates into canonical range (finite factors to
    /// `0..q`, integer factors untouched).
    pub fn reduce(&self, raw: &[i64]) -> Vec<i64> {
        raw.iter()
            .zip(&self.factors)
            .map(|(c, f)| match f {
                GradeFactor::Finite(q) => c.rem_euclid(*q as i64),
                GradeFactor::Integers => *c,
            })
            .collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let raw: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&raw)
    }

    /// All elements, if every factor is finite.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        let mut out = vec![vec![]];
        for f in &self.factors {
            let q = match f {
                GradeFactor::Finite(q) => *q as i64,
                GradeFactor::Integers => return None,
            };
            let mut next = Vec::new();
            for prefix in &out {
                for c in 0..q {
                    let mut e = prefix.clone();
                    e.push(c);
                    next.push(e);
                }
            }
            out = next;
        }
        Some(out)
    }

    /// Human-readable name for a class, using symmetric representatives
    /// for finite factors (`2 mod 3` prints as `-1`).
    pub fn class_name(&self, class: &[i64]) -> String {
        let mut s = String::from("n");
        for (c, f) in class.iter().zip(&self.factors) {
            let v = match f {
                GradeFactor::Finite(q) => {
                    let q = *q as i64;
                    let r = c.rem_euclid(q);
                    if 2 * r > q {
                        r - q
                    } else {
                        r
                    }
                }
                GradeFactor::Integers => *c,
            };
            s.push_str(&v.to_string());
        }
        s
    }
}

/// Where the elements of one family live in the grade group: coordinate
/// `i` of the grade of the degree-`d` element is `base[i] + slope[i]*d`,
/// reduced in the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyGradeMap {
    pub base: Vec<i64>,
    pub slope: Vec<i64>,
}

impl FamilyGradeMap {
    pub fn constant(base: Vec<i64>) -> Self {
        let slope = vec![0; base.len()];
        FamilyGradeMap { base, slope }
    }

    pub fn grade_at(&self, group: &GradeGroup, degree: i64) -> Vec<i64> {
        let raw: Vec<i64> = self
            .base
            .iter()
            .zip(&self.slope)
            .map(|(b, s)| b + s * degree)
            .collect();
        group.reduce(&raw)
    }
}

/// A single basis element: a family symbol at an integer degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisFamilyElement {
    pub family: String,
    pub degree: i64,
}

impl BasisFamilyElement {
    pub fn new(family: impl Into<String>, degree: i64) -> Self {
        BasisFamilyElement {
            family: family.into(),
            degree,
        }
    }
}

impl fmt::Display for BasisFamilyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.degree)
    }
}

/// Which bracket arguments a rule applies to: an ordered family pair and
/// a residue condition on the two degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleGuard {
    pub x_family: String,
    pub y_family: String,
    /// Degrees are tested modulo this; 1 means no condition.
    pub modulus: u32,
    pub x_residue: u32,
    pub y_residue: u32,
}

impl RuleGuard {
    pub fn matches(&self, x: &BasisFamilyElement, y: &BasisFamilyElement) -> bool {
        self.x_family == x.family
            && self.y_family == y.family
            && x.degree.rem_euclid(self.modulus as i64) == self.x_residue as i64
            && y.degree.rem_euclid(self.modulus as i64) == self.y_residue as i64
    }
}

impl fmt::Display for RuleGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}({} mod {M}), {}({} mod {M})]",
            self.x_family,
            self.x_residue,
            self.y_family,
            self.y_residue,
            M = self.modulus
        )
    }
}

/// One output term of a rule: `coeff(n, m) * target_{n+m+offset}`, with
/// an optional `delta(n+m, 0)` side condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTerm {
    pub target: String,
    pub offset: i64,
    pub coeff: ScalarExpr,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub delta_zero: bool,
}

impl RuleTerm {
    pub fn new(target: impl Into<String>, offset: i64, coeff: ScalarExpr) -> Self {
        RuleTerm {
            target: target.into(),
            offset,
            coeff,
            delta_zero: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRule {
    pub guard: RuleGuard,
    pub terms: Vec<RuleTerm>,
}

/// A linear combination of family elements with exact coefficients (the
/// structural parameters may stay symbolic).
pub type Combination = BTreeMap<BasisFamilyElement, ScalarExpr>;

fn add_into(acc: &mut Combination, key: BasisFamilyElement, value: ScalarExpr) {
    let entry = acc.entry(key.clone()).or_insert_with(ScalarExpr::zero);
    *entry = &*entry + &value;
    if entry.is_zero() {
        acc.remove(&key);
    }
}

/// Render a combination for error messages and reports.
pub fn combination_to_string(c: &Combination) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .map(|(e, v)| format!("({v})*{e}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A closed-form bracket table on finitely many degree-indexed families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketTemplate {
    pub name: String,
    pub group: GradeGroup,
    pub families: BTreeMap<String, FamilyGradeMap>,
    /// A family consisting of the single central element in degree 0.
    pub central: Option<String>,
    /// Structural parameters of the coefficients; the degree variables
    /// `n`, `m` are implicit and reserved.
    pub params: ParamSet,
    pub rules: Vec<BracketRule>,
}

impl BracketTemplate {
    /// Structural well-formedness: families exist, coefficients only use
    /// declared parameters and the degree variables (no `eps`, no
    /// negative powers of the degrees), and for each ordered family pair
    /// the guards share one modulus and partition the residue pairs.
    pub fn validate(&self) -> Result<(), GradedError> {
        let bad = |msg: String| Err(GradedError::MalformedTemplate(msg));
        // `eps` needs no check here: declaring it is already impossible,
        // and eps-dependent coefficients are caught per term below.
        for reserved in [DEG_X, DEG_Y] {
            if self.params.contains(reserved) {
                return bad(format!("parameter name `{reserved}` is reserved"));
            }
        }
        if let Some(c) = &self.central {
            match self.families.get(c) {
                None => return bad(format!("central family `{c}` is not declared")),
                Some(map) => {
                    if map.base.iter().any(|b| *b != 0) || map.slope.iter().any(|s| *s != 0)
                    {
                        return bad(format!("central family `{c}` must sit in grade 0"));
                    }
                }
            }
        }
        for (fam, map) in &self.families {
            if map.base.len() != self.group.rank() || map.slope.len() != self.group.rank() {
                return bad(format!("grade map of `{fam}` has the wrong rank"));
            }
        }
        // Per ordered family pair: the shared modulus and the residue
        // pairs covered so far.
        type Coverage = BTreeMap<(String, String), (u32, BTreeSet<(u32, u32)>)>;
        let mut seen: Coverage = BTreeMap::new();
        for rule in &self.rules {
            let g = &rule.guard;
            for fam in [&g.x_family, &g.y_family] {
                if !self.families.contains_key(fam) {
                    return Err(GradedError::UnknownFamily(fam.clone()));
                }
                if Some(fam) == self.central.as_ref() {
                    return bad(format!(
                        "rule {g} brackets the central element; those brackets are implicitly zero"
                    ));
                }
            }
            if g.modulus == 0 {
                return bad(format!("rule {g} has modulus 0"));
            }
            if g.x_residue >= g.modulus || g.y_residue >= g.modulus {
                return bad(format!("rule {g} has residues outside its modulus"));
            }
            for term in &rule.terms {
                if !self.families.contains_key(&term.target) {
                    return Err(GradedError::UnknownFamily(term.target.clone()));
                }
                if Some(&term.target) == self.central.as_ref() && !term.delta_zero {
                    return bad(format!(
                        "rule {g} sends a term to the central element without a degree-zero condition"
                    ));
                }
                for (mon, _) in term.coeff.terms() {
                    for (v, e) in mon.iter() {
                        if v == EPS {
                            return bad(format!("rule {g} has an eps-dependent coefficient"));
                        }
                        if v == DEG_X || v == DEG_Y {
                            if e < 0 {
                                return bad(format!(
                                    "rule {g} has a negative power of degree variable `{v}`"
                                ));
                            }
                        } else if !self.params.contains(v) {
                            return Err(GradedError::Scalar(ScalarError::UndeclaredParameter(
                                v.to_string(),
                            )));
                        }
                    }
                }
            }
            let key = (g.x_family.clone(), g.y_family.clone());
            let entry = seen
                .entry(key)
                .or_insert_with(|| (g.modulus, BTreeSet::new()));
            if entry.0 != g.modulus {
                return bad(format!(
                    "rules for [{}, {}] mix moduli {} and {}",
                    g.x_family, g.y_family, entry.0, g.modulus
                ));
            }
            if !entry.1.insert((g.x_residue, g.y_residue)) {
                return bad(format!("duplicate guard {g}"));
            }
        }
        for ((fx, fy), (modulus, residues)) in &seen {
            if residues.len() != (*modulus as usize) * (*modulus as usize) {
                return bad(format!(
                    "rules for [{fx}, {fy}] cover {} of {} residue pairs",
                    residues.len(),
                    modulus * modulus
                ));
            }
        }
        Ok(())
    }

    pub fn grade_of(&self, e: &BasisFamilyElement) -> Result<Vec<i64>, GradedError> {
        let map = self
            .families
            .get(&e.family)
            .ok_or_else(|| GradedError::UnknownFamily(e.family.clone()))?;
        Ok(map.grade_at(&self.group, e.degree))
    }

    fn rule_for(
        &self,
        x: &BasisFamilyElement,
        y: &BasisFamilyElement,
    ) -> Result<Option<&BracketRule>, GradedError> {
        let mut any_pair = false;
        for rule in &self.rules {
            if rule.guard.x_family == x.family && rule.guard.y_family == y.family {
                any_pair = true;
                if rule.guard.matches(x, y) {
                    return Ok(Some(rule));
                }
            }
        }
        if any_pair {
            // validate() guarantees full residue coverage, so this is a
            // malformed template.
            return Err(GradedError::NoRuleMatches {
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        Ok(None)
    }

    /// Evaluate the bracket of two basis elements exactly.
    pub fn bracket(
        &self,
        x: &BasisFamilyElement,
        y: &BasisFamilyElement,
    ) -> Result<Combination, GradedError> {
        for e in [x, y] {
            if !self.families.contains_key(&e.family) {
                return Err(GradedError::UnknownFamily(e.family.clone()));
            }
            if Some(&e.family) == self.central.as_ref() {
                if e.degree != 0 {
                    return Err(GradedError::CentralDegreeNonzero(e.family.clone()));
                }
                return Ok(Combination::new());
            }
        }
        let mut out = Combination::new();
        let Some(rule) = self.rule_for(x, y)? else {
            return Ok(out);
        };
        let nx = GaussianRational::from_int(x.degree);
        let my = GaussianRational::from_int(y.degree);
        for term in &rule.terms {
            if term.delta_zero && x.degree + y.degree != 0 {
                continue;
            }
            let degree = if term.delta_zero {
                term.offset
            } else {
                x.degree + y.degree + term.offset
            };
            let coeff = term.coeff.subst(DEG_X, &nx)?.subst(DEG_Y, &my)?;
            if coeff.is_zero() {
                continue;
            }
            add_into(
                &mut out,
                BasisFamilyElement::new(term.target.clone(), degree),
                coeff,
            );
        }
        Ok(out)
    }

    /// Bilinear extension of the bracket to combinations.
    pub fn bracket_comb(
        &self,
        a: &Combination,
        b: &Combination,
    ) -> Result<Combination, GradedError> {
        let mut out = Combination::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let inner = self.bracket(ea, eb)?;
                let weight = ca * cb;
                for (e, c) in inner {
                    add_into(&mut out, e, &c * &weight);
                }
            }
        }
        Ok(out)
    }

    /// All basis elements with degree in `-n_max..=n_max` (the central
    /// element only in degree 0).
    pub fn window_elements(&self, n_max: i64) -> Vec<BasisFamilyElement> {
        let mut out = Vec::new();
        for fam in self.families.keys() {
            if Some(fam) == self.central.as_ref() {
                out.push(BasisFamilyElement::new(fam.clone(), 0));
            } else {
                for d in -n_max..=n_max {
                    out.push(BasisFamilyElement::new(fam.clone(), d));
                }
            }
        }
        out
    }

    /// Evaluate `[[x,y],z] + [[y,z],x] + [[z,x],y]` for all degree
    /// triples in the window; nonzero results are returned. Coefficients
    /// are compared as exact polynomials in the parameters, so an empty
    /// report means the identity holds identically on the window.
    pub fn jacobi_window(
        &self,
        n_max: i64,
    ) -> Result<Vec<(String, String)>, GradedError> {
        let elems = self.window_elements(n_max);
        let single = |e: &BasisFamilyElement| {
            let mut c = Combination::new();
            c.insert(e.clone(), ScalarExpr::one());
            c
        };
        let mut defects = Vec::new();
        for i in 0..elems.len() {
            for j in i..elems.len() {
                for k in j..elems.len() {
                    let (x, y, z) = (&elems[i], &elems[j], &elems[k]);
                    let mut total = Combination::new();
                    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                        let inner = self.bracket(a, b)?;
                        let outer = self.bracket_comb(&inner, &single(c))?;
                        for (e, v) in outer {
                            add_into(&mut total, e, v);
                        }
                    }
                    if !total.is_empty() {
                        defects.push((
                            format!("({x}, {y}, {z})"),
                            combination_to_string(&total),
                        ));
                    }
                }
            }
        }
        Ok(defects)
    }

    /// Verify per rule that `[y,x]` is the negation of `[x,y]` with the
    /// degrees swapped; coefficients of degree-zero-side-condition terms
    /// are compared modulo `n + m = 0`. Returns defect descriptions.
    pub fn antisymmetry_defects(&self) -> Result<Vec<String>, GradedError> {
        let mut defects = Vec::new();
        for rule in &self.rules {
            let g = &rule.guard;
            // The mirrored guard, possibly living at a different modulus
            // (then residues can't correspond; report it).
            let flipped: Vec<&BracketRule> = self
                .rules
                .iter()
                .filter(|r| {
                    r.guard.x_family == g.y_family
                        && r.guard.y_family == g.x_family
                        && r.guard.modulus == g.modulus
                        && r.guard.x_residue == g.y_residue
                        && r.guard.y_residue == g.x_residue
                })
                .collect();
            let mirror_terms: &[RuleTerm] = match flipped.as_slice() {
                [r] => &r.terms,
                [] => &[],
                _ => {
                    defects.push(format!("guard {g} has several mirrors"));
                    continue;
                }
            };
            // Match terms by (target, offset, delta flag).
            let keys: BTreeSet<(String, i64, bool)> = rule
                .terms
                .iter()
                .chain(mirror_terms.iter())
                .map(|t| (t.target.clone(), t.offset, t.delta_zero))
                .collect();
            for (target, offset, delta) in keys {
                let find = |terms: &[RuleTerm]| {
                    terms
                        .iter()
                        .find(|t| t.target == target && t.offset == offset && t.delta_zero == delta)
                        .map(|t| t.coeff.clone())
                        .unwrap_or_else(ScalarExpr::zero)
                };
                let ours = find(&rule.terms);
                let theirs = find(mirror_terms);
                // Antisymmetry: ours(n, m) + theirs(m, n) = 0, modulo
                // n + m = 0 for delta terms.
                let mut sum = &ours + &swap_degrees(&theirs);
                if delta {
                    sum = subst_var_expr(&sum, DEG_Y, &-&ScalarExpr::var(DEG_X));
                }
                if !sum.is_zero() {
                    defects.push(format!(
                        "guard {g}, target {target} offset {offset}: symmetric part {sum}"
                    ));
                }
            }
        }
        Ok(defects)
    }

    /// Verify per rule term that grade(target) = grade(x) + grade(y) for
    /// every degree pair the guard admits. Returns defect descriptions.
    pub fn grade_defects(&self) -> Vec<String> {
        let mut defects = Vec::new();
        for rule in &self.rules {
            let g = &rule.guard;
            let mx = &self.families[&g.x_family];
            let my = &self.families[&g.y_family];
            for term in &rule.terms {
                let mt = &self.families[&term.target];
                for (i, f) in self.group.factors.iter().enumerate() {
                    // Degrees: n = x_residue + modulus * s, and either
                    // m = y_residue + modulus * t (free terms, target
                    // degree n + m + offset) or m = -n (delta terms,
                    // target degree = offset).
                    let (sx, sy, st) = (mx.slope[i], my.slope[i], mt.slope[i]);
                    let (bx, by, bt) = (mx.base[i], my.base[i], mt.base[i]);
                    let modulus = g.modulus as i64;
                    let (rx, ry) = (g.x_residue as i64, g.y_residue as i64);
                    // Coefficients of the free integers s, t and the
                    // constant, as linear forms; for finite factors the
                    // check is modulo q.
                    let (cs, ct, c0) = if term.delta_zero {
                        (
                            (sx - sy) * modulus,
                            0,
                            bx + sx * rx + by - sy * rx - (bt + st * term.offset),
                        )
                    } else {
                        (
                            (sx - st) * modulus,
                            (sy - st) * modulus,
                            bx + sx * rx + by + sy * ry - (bt + st * (rx + ry + term.offset)),
                        )
                    };
                    let ok = match f {
                        GradeFactor::Finite(q) => {
                            let q = *q as i64;
                            cs.rem_euclid(q) == 0 && ct.rem_euclid(q) == 0 && c0.rem_euclid(q) == 0
                        }
                        GradeFactor::Integers => cs == 0 && ct == 0 && c0 == 0,
                    };
                    if !ok {
                        defects.push(format!(
                            "rule {g}, target {}: grade coordinate {i} is not additive",
                            term.target
                        ));
                    }
                }
            }
        }
        defects
    }

    /// Rename families (map keys are current names). Names not in the
    /// map are kept.
    pub fn rename_families(&self, renaming: &BTreeMap<String, String>) -> BracketTemplate {
        let rn = |s: &String| renaming.get(s).cloned().unwrap_or_else(|| s.clone());
        let mut out = self.clone();
        out.families = self
            .families
            .iter()
            .map(|(k, v)| (rn(k), v.clone()))
            .collect();
        out.central = self.central.as_ref().map(rn);
        for rule in &mut out.rules {
            rule.guard.x_family = rn(&rule.guard.x_family);
            rule.guard.y_family = rn(&rule.guard.y_family);
            for term in &mut rule.terms {
                term.target = rn(&term.target);
            }
        }
        out
    }
}

/// Swap the two degree variables in a coefficient polynomial.
pub(crate) fn swap_degrees(e: &ScalarExpr) -> ScalarExpr {
    ScalarExpr::from_terms(e.terms().map(|(mon, c)| {
        let swapped = Monomial::from_pairs(mon.iter().map(|(v, k)| {
            let v = match v {
                _ if v == DEG_X => DEG_Y,
                _ if v == DEG_Y => DEG_X,
                other => other,
            };
            (v.to_string(), k)
        }));
        (swapped, c.clone())
    }))
}

/// Substitute a polynomial value for a variable that only occurs with
/// non-negative exponents.
pub(crate) fn subst_var_expr(e: &ScalarExpr, name: &str, value: &ScalarExpr) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for (mon, c) in e.terms() {
        let mut rest = Monomial::one();
        let mut power = 0i64;
        for (v, k) in mon.iter() {
            if v == name {
                power = k;
            } else {
                rest = rest.mul(&Monomial::var_pow(v, k));
            }
        }
        assert!(power >= 0, "negative exponent in substitution");
        let term = ScalarExpr::term(rest, c.clone());
        out = &out + &(&term * &value.pow(power as u32));
    }
    out
}

/// Exact equality of two templates up to a family renaming: identical
/// family sets, identical rules once the guards are refined to a common
/// modulus per family pair (absent pairs count as zero; coefficients of
/// degree-zero-side-condition terms are compared modulo `n + m = 0`),
/// cross-checked by evaluating every bracket with degrees in
/// `-n_max..=n_max`. Grade maps are bookkeeping and do not enter.
pub fn template_equal(
    a: &BracketTemplate,
    b: &BracketTemplate,
    renaming: &BTreeMap<String, String>,
    n_max: i64,
) -> Result<bool, GradedError> {
    let a = a.rename_families(renaming);
    if a.families.keys().collect::<Vec<_>>() != b.families.keys().collect::<Vec<_>>() {
        return Ok(false);
    }
    if a.central != b.central {
        return Ok(false);
    }

    let structural = rules_equal(&a, b)?;

    // Independent confirmation on the window.
    let mut evaluated = true;
    'outer: for x in a.window_elements(n_max) {
        for y in a.window_elements(n_max) {
            if a.bracket(&x, &y)? != b.bracket(&x, &y)? {
                evaluated = false;
                break 'outer;
            }
        }
    }
    if structural != evaluated {
        return Err(GradedError::MalformedTemplate(format!(
            "structural equality ({structural}) and windowed evaluation ({evaluated}) disagree \
             between `{}` and `{}`",
            a.name, b.name
        )));
    }
    Ok(structural)
}

fn rules_equal(a: &BracketTemplate, b: &BracketTemplate) -> Result<bool, GradedError> {
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for t in [a, b] {
        for rule in &t.rules {
            pairs.insert((rule.guard.x_family.clone(), rule.guard.y_family.clone()));
        }
    }
    for (fx, fy) in pairs {
        let ra: Vec<&BracketRule> = a
            .rules
            .iter()
            .filter(|r| r.guard.x_family == fx && r.guard.y_family == fy)
            .collect();
        let rb: Vec<&BracketRule> = b
            .rules
            .iter()
            .filter(|r| r.guard.x_family == fx && r.guard.y_family == fy)
            .collect();
        let ma = ra.first().map(|r| r.guard.modulus).unwrap_or(1);
        let mb = rb.first().map(|r| r.guard.modulus).unwrap_or(1);
        let m = num::integer::lcm(ma, mb);
        for rx in 0..m {
            for ry in 0..m {
                let pick = |rules: &[&BracketRule], modulus: u32| -> Vec<RuleTerm> {
                    rules
                        .iter()
                        .find(|r| {
                            r.guard.x_residue == rx % modulus && r.guard.y_residue == ry % modulus
                        })
                        .map(|r| r.terms.clone())
                        .unwrap_or_default()
                };
                let ta = pick(&ra, ma);
                let tb = pick(&rb, mb);
                if !term_lists_equal(&ta, &tb) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn term_lists_equal(a: &[RuleTerm], b: &[RuleTerm]) -> bool {
    let keys: BTreeSet<(String, i64, bool)> = a
        .iter()
        .chain(b.iter())
        .map(|t| (t.target.clone(), t.offset, t.delta_zero))
        .collect();
    for (target, offset, delta) in keys {
        let find = |terms: &[RuleTerm]| {
            terms
                .iter()
                .find(|t| t.target == target && t.offset == offset && t.delta_zero == delta)
                .map(|t| t.coeff.clone())
                .unwrap_or_else(ScalarExpr::zero)
        };
        let mut diff = &find(a) - &find(b);
        if delta {
            diff = subst_var_expr(&diff, DEG_Y, &-&ScalarExpr::var(DEG_X));
        }
        if !diff.is_zero() {
            return false;
        }
    }
    true
}
