//! Graded contractions of bracket templates: rescale whole grade classes
//! (or degree-dependent slices) by powers of `eps`, extract the limit as
//! `eps -> 0`, and analyze which keep/kill patterns are realizable.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::contraction::{contract_diagonal, DiagonalWitness, EntryMode};
use crate::feasibility::{LinearConstraint, LinearSystem};
use crate::finite::FiniteLieAlgebra;
use crate::scalar::ScalarExpr;

use super::make::affinize;
use super::{
    template_equal, BracketRule, BracketTemplate, FamilyGradeMap, GradeFactor, GradeGroup,
    GradedError, RuleGuard, RuleTerm,
};

/// How `eps` powers are assigned to basis elements.
#[derive(Debug, Clone, PartialEq)]
pub enum GradedExponentMap {
    /// One exponent per grade class; requires the class of each rule
    /// argument to be determined by the rule's guard.
    Class(BTreeMap<Vec<i64>, BigRational>),
    /// Per family, affine in the degree: `E(n) = slope * n + intercept`.
    Fine(BTreeMap<String, (BigRational, BigRational)>),
    /// Constant per family — the loop lift of a finite diagonal
    /// contraction. The central element defaults to exponent 0.
    Family(BTreeMap<String, BigRational>),
}

impl GradedExponentMap {
    /// The identity assignment on a template's families.
    pub fn zero_for(t: &BracketTemplate) -> GradedExponentMap {
        GradedExponentMap::Family(
            t.families
                .keys()
                .map(|f| (f.clone(), BigRational::zero()))
                .collect(),
        )
    }
}

/// A rule term together with the `eps` order it acquired.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsTerm {
    pub target: String,
    pub offset: i64,
    pub coeff: ScalarExpr,
    pub delta_zero: bool,
    pub order: BigRational,
}

impl Serialize for EpsTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EpsTerm", 5)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("offset", &self.offset)?;
        st.serialize_field("coeff", &self.coeff)?;
        st.serialize_field("delta_zero", &self.delta_zero)?;
        st.serialize_field("order", &self.order.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsRule {
    pub guard: RuleGuard,
    pub terms: Vec<EpsTerm>,
}

/// A template whose terms carry explicit `eps` orders: the intermediate
/// stage of a graded contraction, before the limit is taken.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsTemplate {
    pub name: String,
    pub group: GradeGroup,
    pub families: BTreeMap<String, FamilyGradeMap>,
    pub central: Option<String>,
    pub rules: Vec<EpsRule>,
}

/// The `eps` order a term of `rule` acquires under `map`, as a constant
/// rational; errors when the order is not constant on the guard.
fn term_order(
    t: &BracketTemplate,
    guard: &RuleGuard,
    term: &RuleTerm,
    map: &GradedExponentMap,
) -> Result<BigRational, GradedError> {
    let ill = || GradedError::IllTypedExponent(guard.to_string());
    match map {
        GradedExponentMap::Family(exps) => {
            let look = |fam: &String| -> Result<BigRational, GradedError> {
                if let Some(v) = exps.get(fam) {
                    return Ok(v.clone());
                }
                if Some(fam) == t.central.as_ref() {
                    return Ok(BigRational::zero());
                }
                Err(GradedError::MissingClassExponent(fam.clone()))
            };
            Ok(&(&look(&guard.x_family)? + &look(&guard.y_family)?) - &look(&term.target)?)
        }
        GradedExponentMap::Fine(coeffs) => {
            let look = |fam: &String| -> Result<(BigRational, BigRational), GradedError> {
                if let Some(v) = coeffs.get(fam) {
                    return Ok(v.clone());
                }
                if Some(fam) == t.central.as_ref() {
                    return Ok((BigRational::zero(), BigRational::zero()));
                }
                Err(GradedError::MissingClassExponent(fam.clone()))
            };
            let (ax, bx) = look(&guard.x_family)?;
            let (ay, by) = look(&guard.y_family)?;
            let (at, bt) = look(&term.target)?;
            let off = BigRational::from_integer(term.offset.into());
            if term.delta_zero {
                // On the locus n + m = 0 the degree contributions cancel
                // only if the two argument slopes agree.
                if ax != ay {
                    return Err(ill());
                }
                Ok(&(&bx + &by) - &(&(&at * &off) + &bt))
            } else {
                // E(x) + E(y) - E(target) with target degree n+m+offset
                // is constant in the degrees only when all slopes agree.
                if ax != at || ay != at {
                    return Err(ill());
                }
                Ok(&(&(&bx + &by) - &bt) - &(&at * &off))
            }
        }
        GradedExponentMap::Class(exps) => {
            let (cx, cy, ct) = rule_classes(t, guard, term)?;
            let look = |class: &Vec<i64>| -> Result<BigRational, GradedError> {
                exps.get(class).cloned().ok_or_else(|| {
                    GradedError::MissingClassExponent(t.group.class_name(class))
                })
            };
            Ok(&(&look(&cx)? + &look(&cy)?) - &look(&ct)?)
        }
    }
}

/// Grade classes of a rule's two arguments and one term target.
type ClassTriple = (Vec<i64>, Vec<i64>, Vec<i64>);

/// The grade classes of the two arguments and the term target, which
/// must be determined by the guard's residues alone.
fn rule_classes(
    t: &BracketTemplate,
    guard: &RuleGuard,
    term: &RuleTerm,
) -> Result<ClassTriple, GradedError> {
    let group = &t.group;
    let modulus = guard.modulus as i64;
    let class_at = |fam: &String, residue: i64, fixed: Option<i64>| {
        let map = &t.families[fam];
        // With degree = residue + modulus * k, the grade coordinate is
        // constant iff slope * modulus vanishes in the factor.
        for (i, f) in group.factors.iter().enumerate() {
            let drift = map.slope[i] * modulus;
            let ok = match f {
                GradeFactor::Finite(q) => fixed.is_some() || drift.rem_euclid(*q as i64) == 0,
                GradeFactor::Integers => fixed.is_some() || map.slope[i] == 0,
            };
            if !ok {
                return Err(GradedError::IllTypedExponent(guard.to_string()));
            }
        }
        Ok(map.grade_at(group, fixed.unwrap_or(residue)))
    };
    let cx = class_at(&guard.x_family, guard.x_residue as i64, None)?;
    let cy = class_at(&guard.y_family, guard.y_residue as i64, None)?;
    let ct = if term.delta_zero {
        // The side condition pins the target degree to the offset.
        class_at(&term.target, 0, Some(term.offset))?
    } else {
        class_at(
            &term.target,
            (guard.x_residue as i64 + guard.y_residue as i64 + term.offset)
                .rem_euclid(modulus),
            None,
        )?
    };
    Ok((cx, cy, ct))
}

/// Rescale a template by an exponent map: every term's coefficient picks
/// up `eps^(E(x) + E(y) - E(target))`, recorded as an exact rational
/// order per term.
pub fn graded_contract_template(
    t: &BracketTemplate,
    map: &GradedExponentMap,
) -> Result<EpsTemplate, GradedError> {
    t.validate()?;
    let mut rules = Vec::new();
    for rule in &t.rules {
        let mut terms = Vec::new();
        for term in &rule.terms {
            let order = term_order(t, &rule.guard, term, map)?;
            terms.push(EpsTerm {
                target: term.target.clone(),
                offset: term.offset,
                coeff: term.coeff.clone(),
                delta_zero: term.delta_zero,
                order,
            });
        }
        rules.push(EpsRule {
            guard: rule.guard.clone(),
            terms,
        });
    }
    Ok(EpsTemplate {
        name: format!("{}~eps", t.name),
        group: t.group.clone(),
        families: t.families.clone(),
        central: t.central.clone(),
        rules,
    })
}

/// Take `eps -> 0`: terms of positive order vanish, order zero survives,
/// negative order diverges. The original parameter registry is restored
/// from `t`.
pub fn template_limit(
    eps: &EpsTemplate,
    t: &BracketTemplate,
) -> Result<BracketTemplate, GradedError> {
    let mut rules = Vec::new();
    for rule in &eps.rules {
        let mut terms = Vec::new();
        for term in &rule.terms {
            if term.order.is_negative() {
                return Err(GradedError::Divergent {
                    rule: format!("{} -> {}", rule.guard, term.target),
                    order: term.order.clone(),
                });
            }
            if term.order.is_zero() {
                terms.push(RuleTerm {
                    target: term.target.clone(),
                    offset: term.offset,
                    coeff: term.coeff.clone(),
                    delta_zero: term.delta_zero,
                });
            }
        }
        rules.push(BracketRule {
            guard: rule.guard.clone(),
            terms,
        });
    }
    // Normalize: drop family pairs whose rules all came out empty.
    let mut kept = Vec::new();
    for rule in &rules {
        let pair_nonempty = rules.iter().any(|r| {
            r.guard.x_family == rule.guard.x_family
                && r.guard.y_family == rule.guard.y_family
                && !r.terms.is_empty()
        });
        if pair_nonempty {
            kept.push(rule.clone());
        }
    }
    let out = BracketTemplate {
        name: format!("lim {}", eps.name),
        group: eps.group.clone(),
        families: eps.families.clone(),
        central: eps.central.clone(),
        params: t.params.clone(),
        rules: kept,
    };
    out.validate()?;
    Ok(out)
}

/// One rule's `eps` order as a linear form over per-class exponent
/// variables (named by [`GradeGroup::class_name`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassForm {
    pub x_family: String,
    pub y_family: String,
    pub x_residue: u32,
    pub y_residue: u32,
    /// Coefficients of the class variables in `E(x) + E(y) - E(target)`.
    #[serde(serialize_with = "ser_form")]
    pub form: BTreeMap<String, BigRational>,
}

fn ser_form<S: Serializer>(m: &BTreeMap<String, BigRational>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &v.to_string())?;
    }
    map.end()
}

impl ClassForm {
    /// Render like `n01 + n10 - n11`.
    pub fn form_string(&self) -> String {
        if self.form.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (v, c) in &self.form {
            if out.is_empty() {
                if c == &BigRational::one() {
                    out.push_str(v);
                } else if -c == BigRational::one() {
                    out.push_str(&format!("-{v}"));
                } else {
                    out.push_str(&format!("{c}*{v}"));
                }
            } else if c.is_negative() {
                if -c == BigRational::one() {
                    out.push_str(&format!(" - {v}"));
                } else {
                    out.push_str(&format!(" - {}*{v}", -c));
                }
            } else if c == &BigRational::one() {
                out.push_str(&format!(" + {v}"));
            } else {
                out.push_str(&format!(" + {c}*{v}"));
            }
        }
        out
    }
}

/// The symbolic `eps` orders of every rule with terms, one entry per
/// distinct linear form appearing in the rule.
pub fn class_exponent_forms(t: &BracketTemplate) -> Result<Vec<ClassForm>, GradedError> {
    t.validate()?;
    let mut out: Vec<ClassForm> = Vec::new();
    for rule in &t.rules {
        let mut seen: Vec<BTreeMap<String, BigRational>> = Vec::new();
        for term in &rule.terms {
            let (cx, cy, ct) = rule_classes(t, &rule.guard, term)?;
            let mut form: BTreeMap<String, BigRational> = BTreeMap::new();
            for (class, sign) in [(&cx, 1), (&cy, 1), (&ct, -1)] {
                let name = t.group.class_name(class);
                let entry = form.entry(name).or_insert_with(BigRational::zero);
                *entry = &*entry + &BigRational::from_integer(sign.into());
            }
            form.retain(|_, c| !c.is_zero());
            if !seen.contains(&form) {
                seen.push(form.clone());
                out.push(ClassForm {
                    x_family: rule.guard.x_family.clone(),
                    y_family: rule.guard.y_family.clone(),
                    x_residue: rule.guard.x_residue,
                    y_residue: rule.guard.y_residue,
                    form,
                });
            }
        }
    }
    Ok(out)
}

/// A keep/kill prescription at the level of rule guards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPatternEntry {
    pub x_family: String,
    pub y_family: String,
    pub x_residue: u32,
    pub y_residue: u32,
    pub mode: EntryMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPattern {
    pub entries: Vec<ClassPatternEntry>,
    pub default: EntryMode,
}

impl ClassPattern {
    fn mode_for(&self, x_family: &str, y_family: &str, x_residue: u32, y_residue: u32) -> EntryMode {
        self.entries
            .iter()
            .find(|e| {
                e.x_family == x_family
                    && e.y_family == y_family
                    && e.x_residue == x_residue
                    && e.y_residue == y_residue
            })
            .map(|e| e.mode)
            .unwrap_or(self.default)
    }
}

/// Translate a guard-level pattern into the linear system over the class
/// exponent variables: keep forces the order to zero, kill to `>= 1`
/// (the system is homogeneous, so any positive value rescales to 1), and
/// free only forbids divergence.
pub fn class_pattern_system(
    t: &BracketTemplate,
    pattern: &ClassPattern,
) -> Result<LinearSystem, GradedError> {
    let forms = class_exponent_forms(t)?;
    for entry in &pattern.entries {
        if !forms.iter().any(|f| {
            f.x_family == entry.x_family
                && f.y_family == entry.y_family
                && f.x_residue == entry.x_residue
                && f.y_residue == entry.y_residue
        }) {
            return Err(GradedError::MalformedTemplate(format!(
                "pattern entry [{}({}), {}({})] matches no rule with terms",
                entry.x_family, entry.x_residue, entry.y_family, entry.y_residue
            )));
        }
    }
    let mut system = LinearSystem::new();
    for f in forms {
        let mode = pattern.mode_for(&f.x_family, &f.y_family, f.x_residue, f.y_residue);
        let label = format!(
            "[{}({}), {}({})]",
            f.x_family, f.x_residue, f.y_family, f.y_residue
        );
        let coeffs = f.form.clone();
        // Constraint semantics: sum(coeffs * x) + constant >= 0.
        match mode {
            EntryMode::Keep => system.push(LinearConstraint::eq(label, coeffs, BigRational::zero())),
            EntryMode::Kill => {
                system.push(LinearConstraint::geq(label, coeffs, -BigRational::one()))
            }
            EntryMode::Free => {
                system.push(LinearConstraint::geq(label, coeffs, BigRational::zero()))
            }
        }
    }
    Ok(system)
}

/// Build a class exponent map from a feasibility witness: every class of
/// the (finite) grade group gets the witness value of its variable, or 0
/// when unconstrained.
pub fn class_map_from_witness(
    t: &BracketTemplate,
    witness: &BTreeMap<String, BigRational>,
) -> Result<GradedExponentMap, GradedError> {
    let classes = t.group.elements().ok_or_else(|| {
        GradedError::MalformedTemplate(
            "class maps need a finite grade group".into(),
        )
    })?;
    Ok(GradedExponentMap::Class(
        classes
            .into_iter()
            .map(|class| {
                let name = t.group.class_name(&class);
                let value = witness.get(&name).cloned().unwrap_or_else(BigRational::zero);
                (class, value)
            })
            .collect(),
    ))
}

/// Outcome of a parity-splitting contraction of the deformed Witt
/// template at one exponent choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub n0: String,
    pub n1: String,
    pub outcome: String,
}

/// Scan exponent assignments `(n0, n1)` on the even/odd classes of the
/// deformed Witt algebra and name each limit. Exactly four distinct
/// algebras arise over any grid containing the representative choices:
/// the template unchanged, the fully abelian one, the one where the
/// odd-odd brackets vanish, and the one where only they survive.
pub fn z2_scan_deformed_witt(
    alpha2: &ScalarExpr,
    values: &[BigRational],
) -> Result<Vec<GridCell>, GradedError> {
    let t = super::make::kn_witt(alpha2)?;

    // Reference templates for the four outcomes.
    let unchanged = t.clone();
    let strip = |keep: &dyn Fn(&RuleGuard) -> bool, name: &str| {
        let mut s = t.clone();
        s.name = name.into();
        for rule in &mut s.rules {
            if !keep(&rule.guard) {
                rule.terms.clear();
            }
        }
        s
    };
    let odd_vanish = strip(
        &|g: &RuleGuard| !(g.x_residue == 1 && g.y_residue == 1),
        "odd-brackets-vanish",
    );
    let mut only_odd = strip(
        &|g: &RuleGuard| g.x_residue == 1 && g.y_residue == 1,
        "only-odd-brackets-survive",
    );
    // The surviving odd-odd bracket keeps just its main term.
    for rule in &mut only_odd.rules {
        rule.terms.retain(|term| term.offset == 0);
    }
    let abelian = strip(&|_: &RuleGuard| false, "abelian");

    let mut out = Vec::new();
    for n0 in values {
        for n1 in values {
            let map = GradedExponentMap::Class(
                [(vec![0], n0.clone()), (vec![1], n1.clone())].into(),
            );
            let eps = graded_contract_template(&t, &map)?;
            let outcome = match template_limit(&eps, &t) {
                Err(GradedError::Divergent { .. }) => "divergent".to_string(),
                Err(e) => return Err(e),
                Ok(limit) => {
                    let empty = BTreeMap::new();
                    if template_equal(&limit, &unchanged, &empty, 4)? {
                        "unchanged".to_string()
                    } else if template_equal(&limit, &abelian, &empty, 4)? {
                        "abelian".to_string()
                    } else if template_equal(&limit, &odd_vanish, &empty, 4)? {
                        "odd-brackets-vanish".to_string()
                    } else if template_equal(&limit, &only_odd, &empty, 4)? {
                        "only-odd-brackets-survive".to_string()
                    } else {
                        "unexpected".to_string()
                    }
                }
            };
            out.push(GridCell {
                n0: n0.to_string(),
                n1: n1.to_string(),
                outcome,
            });
        }
    }
    Ok(out)
}

/// Check that affinization commutes with a diagonal contraction: the
/// affine template of the contracted algebra must equal the limit of the
/// correspondingly rescaled affine template. The witness exponents lift
/// to constant per-family exponents on the loop algebra; the central
/// element stays at exponent zero.
pub fn commute_check(
    g: &FiniteLieAlgebra,
    witness: &DiagonalWitness,
    window: i64,
) -> Result<bool, GradedError> {
    let n = g.dim();
    let p = witness.pre_change.to_matrix(n)?;
    let gp = g.change_basis(g.basis().to_vec(), &p)?;
    let exponents = witness.parsed_exponents()?;

    let finite_limit = contract_diagonal(&gp, &exponents)?;
    let left = affinize(&finite_limit.limit, true)?;

    let loop_template = affinize(&gp, true)?;
    let lift = GradedExponentMap::Family(exponents);
    let eps = graded_contract_template(&loop_template, &lift)?;
    let right = template_limit(&eps, &loop_template)?;

    template_equal(&left, &right, &BTreeMap::new(), window)
}

#[cfg(test)]
mod tests {
    use super::super::make::{kn_affinize_graded, kn_witt, sl2_z3_grades, witt};
    use super::*;
    use crate::algebras;
    use crate::contraction::PreChange;
    use crate::feasibility::Feasibility;

    fn rat(s: &str) -> BigRational {
        s.parse().unwrap()
    }

    fn alpha() -> ScalarExpr {
        ScalarExpr::var("alpha2")
    }

    fn deformed_affine_sl2() -> BracketTemplate {
        let (q, grades) = sl2_z3_grades();
        kn_affinize_graded(
            &algebras::sl2_cartan(),
            &ScalarExpr::var("e1"),
            &ScalarExpr::var("e2"),
            q,
            &grades,
        )
        .unwrap()
    }

    #[test]
    fn zero_exponents_leave_the_template_unchanged() {
        for t in [
            witt(),
            kn_witt(&alpha()).unwrap(),
            affinize(&algebras::sl2_cartan(), true).unwrap(),
        ] {
            let eps = graded_contract_template(&t, &GradedExponentMap::zero_for(&t)).unwrap();
            let limit = template_limit(&eps, &t).unwrap();
            assert!(template_equal(&limit, &t, &BTreeMap::new(), 3).unwrap());
        }
    }

    #[test]
    fn fine_degree_exponents_contract_the_deformation_away() {
        let t = kn_witt(&alpha()).unwrap();
        let map = GradedExponentMap::Fine(
            [("V".to_string(), (BigRational::one(), BigRational::zero()))].into(),
        );
        let eps = graded_contract_template(&t, &map).unwrap();
        // The deformation terms sit two degrees lower, so they acquire
        // exactly eps^2; the main terms stay at order 0.
        for rule in &eps.rules {
            for term in &rule.terms {
                let expected = if term.offset == 0 { 0 } else { 2 };
                assert_eq!(term.order, BigRational::from_integer(expected.into()));
            }
        }
        let limit = template_limit(&eps, &t).unwrap();
        let rename: BTreeMap<String, String> = [("V".to_string(), "l".to_string())].into();
        assert!(template_equal(&limit, &witt(), &rename, 5).unwrap());
    }

    #[test]
    fn class_exponents_scale_by_parity() {
        let t = kn_witt(&alpha()).unwrap();
        // Orders should be 2*n1 - n0 on odd-odd and n0 elsewhere.
        let map = GradedExponentMap::Class(
            [(vec![0], rat("3")), (vec![1], rat("5"))].into(),
        );
        let eps = graded_contract_template(&t, &map).unwrap();
        for rule in &eps.rules {
            let expected = if rule.guard.x_residue == 1 && rule.guard.y_residue == 1 {
                rat("7")
            } else {
                rat("3")
            };
            for term in &rule.terms {
                assert_eq!(term.order, expected, "{}", rule.guard);
            }
        }
    }

    #[test]
    fn negative_order_reports_divergence() {
        let t = kn_witt(&alpha()).unwrap();
        let map = GradedExponentMap::Class(
            [(vec![0], rat("1")), (vec![1], rat("0"))].into(),
        );
        let eps = graded_contract_template(&t, &map).unwrap();
        let err = template_limit(&eps, &t).unwrap_err();
        assert!(matches!(err, GradedError::Divergent { order, .. } if order == rat("-1")));
    }

    #[test]
    fn parity_scan_finds_exactly_four_limit_algebras() {
        let grid = [rat("0"), rat("1/2"), rat("1"), rat("2")];
        let cells = z2_scan_deformed_witt(&alpha(), &grid).unwrap();
        assert_eq!(cells.len(), 16);
        let outcome = |n0: &str, n1: &str| {
            cells
                .iter()
                .find(|c| c.n0 == n0 && c.n1 == n1)
                .map(|c| c.outcome.clone())
                .unwrap()
        };
        assert_eq!(outcome("0", "0"), "unchanged");
        assert_eq!(outcome("0", "1"), "odd-brackets-vanish");
        assert_eq!(outcome("0", "1/2"), "odd-brackets-vanish");
        assert_eq!(outcome("2", "1"), "only-odd-brackets-survive");
        assert_eq!(outcome("1", "1/2"), "only-odd-brackets-survive");
        assert_eq!(outcome("1", "1"), "abelian");
        assert_eq!(outcome("1/2", "0"), "divergent");
        let mut kinds: Vec<String> = cells
            .iter()
            .map(|c| c.outcome.clone())
            .filter(|o| o != "divergent")
            .collect();
        kinds.sort();
        kinds.dedup();
        assert_eq!(
            kinds,
            vec![
                "abelian",
                "odd-brackets-vanish",
                "only-odd-brackets-survive",
                "unchanged"
            ]
        );
        assert!(!cells.iter().any(|c| c.outcome == "unexpected"));
    }

    #[test]
    fn class_forms_transcribe_the_double_grading() {
        let t = deformed_affine_sl2();
        let forms = class_exponent_forms(&t).unwrap();
        let find = |x: &str, y: &str, rx: u32, ry: u32| -> String {
            forms
                .iter()
                .find(|f| {
                    f.x_family == x && f.y_family == y && f.x_residue == rx && f.y_residue == ry
                })
                .map(|f| f.form_string())
                .unwrap()
        };
        // The twelve displayed orders of the doubly graded family.
        assert_eq!(find("h", "e", 0, 0), "n00");
        assert_eq!(find("h", "e", 0, 1), "n00");
        assert_eq!(find("h", "e", 1, 0), "n01 + n10 - n11");
        assert_eq!(find("h", "e", 1, 1), "n01 - n10 + n11");
        assert_eq!(find("h", "f", 0, 0), "n00");
        assert_eq!(find("h", "f", 0, 1), "n00");
        assert_eq!(find("h", "f", 1, 0), "n-10 - n-11 + n01");
        assert_eq!(find("h", "f", 1, 1), "-n-10 + n-11 + n01");
        assert_eq!(find("e", "f", 0, 0), "n-10 - n00 + n10");
        assert_eq!(find("e", "f", 0, 1), "n-11 - n01 + n10");
        assert_eq!(find("e", "f", 1, 0), "n-10 - n01 + n11");
        assert_eq!(find("e", "f", 1, 1), "n-11 - n00 + n11");
        // Each rule contributes one form, including the mirrored guards.
        assert!(forms
            .iter()
            .all(|f| f.form.values().all(|c| !c.is_zero())));
    }

    #[test]
    fn vanishing_head_exponents_force_the_known_equalities() {
        // With n00 = n01 = 0, feasibility forces n11 = n10 and
        // n-10 = n-11: strict separation in either direction is
        // infeasible.
        let t = deformed_affine_sl2();
        let pattern = ClassPattern {
            entries: vec![],
            default: EntryMode::Free,
        };
        let with_extras = |extra: Vec<LinearConstraint>| {
            let mut s = class_pattern_system(&t, &pattern).unwrap();
            s.push(LinearConstraint::eq(
                "scenario n00",
                [("n00".to_string(), rat("1"))].into(),
                rat("0"),
            ));
            s.push(LinearConstraint::eq(
                "scenario n01",
                [("n01".to_string(), rat("1"))].into(),
                rat("0"),
            ));
            for c in extra {
                s.push(c);
            }
            s.solve()
        };
        for (a, b) in [("n10", "n11"), ("n11", "n10"), ("n-10", "n-11"), ("n-11", "n-10")] {
            let sep = LinearConstraint::geq(
                format!("{a} > {b}"),
                [(a.to_string(), rat("1")), (b.to_string(), rat("-1"))].into(),
                rat("-1"),
            );
            assert!(
                !with_extras(vec![sep]).is_feasible(),
                "{a} > {b} should be impossible"
            );
        }
        // And the scenario itself is feasible.
        assert!(with_extras(vec![]).is_feasible());
    }

    #[test]
    fn ef_sector_is_all_or_nothing_when_head_exponents_vanish() {
        let t = deformed_affine_sl2();
        let ef_guards = [(0u32, 0u32), (0, 1), (1, 0), (1, 1)];
        // Under n00 = n01 = 0: forcing one ef rule to survive and
        // another to die is infeasible, for every ordered pair.
        for keep in &ef_guards {
            for kill in &ef_guards {
                if keep == kill {
                    continue;
                }
                let pattern = ClassPattern {
                    entries: vec![
                        ClassPatternEntry {
                            x_family: "e".into(),
                            y_family: "f".into(),
                            x_residue: keep.0,
                            y_residue: keep.1,
                            mode: EntryMode::Keep,
                        },
                        ClassPatternEntry {
                            x_family: "e".into(),
                            y_family: "f".into(),
                            x_residue: kill.0,
                            y_residue: kill.1,
                            mode: EntryMode::Kill,
                        },
                    ],
                    default: EntryMode::Free,
                };
                let mut s = class_pattern_system(&t, &pattern).unwrap();
                for v in ["n00", "n01"] {
                    s.push(LinearConstraint::eq(
                        format!("scenario {v}"),
                        [(v.to_string(), rat("1"))].into(),
                        rat("0"),
                    ));
                }
                assert!(
                    !s.solve().is_feasible(),
                    "keep {keep:?} kill {kill:?} should conflict"
                );
            }
        }
    }

    fn guard_entries(x: &str, y: &str, modes: [EntryMode; 4]) -> Vec<ClassPatternEntry> {
        [(0u32, 0u32), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .zip(modes)
            .map(|((rx, ry), mode)| ClassPatternEntry {
                x_family: x.into(),
                y_family: y.into(),
                x_residue: rx,
                y_residue: ry,
                mode,
            })
            .collect()
    }

    #[test]
    fn killing_the_ef_sector_realizes_the_flat_affinization() {
        use EntryMode::{Keep, Kill};
        let t = deformed_affine_sl2();
        let mut entries: Vec<ClassPatternEntry> = Vec::new();
        entries.extend(guard_entries("h", "e", [Keep; 4]));
        entries.extend(guard_entries("h", "f", [Keep; 4]));
        entries.extend(guard_entries("e", "f", [Kill; 4]));
        let pattern = ClassPattern {
            entries,
            default: EntryMode::Free,
        };
        let system = class_pattern_system(&t, &pattern).unwrap();
        let Feasibility::Feasible { witness } = system.solve() else {
            panic!("pattern should be realizable");
        };
        let map = class_map_from_witness(&t, &witness).unwrap();
        let eps = graded_contract_template(&t, &map).unwrap();
        let limit = template_limit(&eps, &t).unwrap();

        // The limit is exactly the deformed affinization of the flat
        // lambda = -1 algebra, with the same grading.
        let (q, grades) = sl2_z3_grades();
        let flat = kn_affinize_graded(
            &algebras::r3_minus_one_hef(),
            &ScalarExpr::var("e1"),
            &ScalarExpr::var("e2"),
            q,
            &grades,
        )
        .unwrap();
        assert!(template_equal(&limit, &flat, &BTreeMap::new(), 3).unwrap());
    }

    #[test]
    fn keeping_everything_is_also_realizable() {
        use EntryMode::Keep;
        let t = deformed_affine_sl2();
        let mut entries: Vec<ClassPatternEntry> = Vec::new();
        for (x, y) in [("h", "e"), ("h", "f"), ("e", "f")] {
            entries.extend(guard_entries(x, y, [Keep; 4]));
        }
        let pattern = ClassPattern {
            entries,
            default: EntryMode::Free,
        };
        let system = class_pattern_system(&t, &pattern).unwrap();
        let Feasibility::Feasible { witness } = system.solve() else {
            panic!("keeping everything must be feasible");
        };
        let map = class_map_from_witness(&t, &witness).unwrap();
        let eps = graded_contract_template(&t, &map).unwrap();
        let limit = template_limit(&eps, &t).unwrap();
        assert!(template_equal(&limit, &t, &BTreeMap::new(), 3).unwrap());
    }

    #[test]
    fn the_displayed_mixed_pattern_is_infeasible_with_certificate() {
        use EntryMode::{Keep, Kill};
        let t = deformed_affine_sl2();
        let mut entries: Vec<ClassPatternEntry> = Vec::new();
        entries.extend(guard_entries("h", "e", [Keep, Keep, Kill, Kill]));
        entries.extend(guard_entries("h", "f", [Keep, Keep, Kill, Kill]));
        entries.extend(guard_entries("e", "f", [Keep, Kill, Kill, Keep]));
        let pattern = ClassPattern {
            entries,
            default: EntryMode::Free,
        };
        let mut system = class_pattern_system(&t, &pattern).unwrap();
        // The displayed scenario: n00 = 0 and n01 strictly positive.
        system.push(LinearConstraint::eq(
            "scenario n00",
            [("n00".to_string(), rat("1"))].into(),
            rat("0"),
        ));
        system.push(LinearConstraint::geq(
            "scenario n01",
            [("n01".to_string(), rat("1"))].into(),
            rat("-1"),
        ));
        let Feasibility::Infeasible {
            certificate,
            contradiction,
        } = system.solve()
        else {
            panic!("the mixed keep/kill prescription should be infeasible");
        };
        assert!(system.verify_certificate(&certificate), "{contradiction}");

        // Cross-check over an integer box: with the keep equalities
        // eliminated, no small integer choice satisfies the system
        // either. (The certificate is the proof; this guards against
        // transcription slips.)
        let vars = system.variables();
        let expected: Vec<String> = ["n-10", "n-11", "n00", "n01", "n10", "n11"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(vars, expected);
        let mut found = false;
        for n01 in 1..=18i64 {
            for n10 in -18..=18i64 {
                for n11 in -18..=18i64 {
                    let point: BTreeMap<String, BigRational> = [
                        ("n00".to_string(), rat("0")),
                        ("n01".to_string(), BigRational::from_integer(n01.into())),
                        ("n10".to_string(), BigRational::from_integer(n10.into())),
                        ("n11".to_string(), BigRational::from_integer(n11.into())),
                        ("n-10".to_string(), BigRational::from_integer((-n10).into())),
                        ("n-11".to_string(), BigRational::from_integer((-n11).into())),
                    ]
                    .into();
                    if system.holds_at(&point) {
                        found = true;
                    }
                }
            }
        }
        assert!(!found);
    }

    #[test]
    fn the_displayed_limit_is_constructible_but_matches_no_affinization() {
        // Build the limit the displayed powers describe: he and hf odd-x
        // rules vanish, ef survives exactly on equal parities.
        let t = deformed_affine_sl2();
        let mut fixture = t.clone();
        fixture.name = "displayed-limit".into();
        for rule in &mut fixture.rules {
            let g = &rule.guard;
            let kill = match (g.x_family.as_str(), g.y_family.as_str()) {
                ("h", _) | (_, "h") => {
                    let h_res = if g.x_family == "h" {
                        g.x_residue
                    } else {
                        g.y_residue
                    };
                    h_res == 1
                }
                ("e", "f") | ("f", "e") => g.x_residue != g.y_residue,
                _ => false,
            };
            if kill {
                rule.terms.clear();
            }
        }
        fixture.validate().unwrap();
        assert!(fixture.antisymmetry_defects().unwrap().is_empty());

        let (q, grades) = sl2_z3_grades();
        let e1 = ScalarExpr::var("e1");
        let e2 = ScalarExpr::var("e2");
        // Not the deformed affinization of the flat algebra: there the
        // whole ef sector is zero.
        let flat = kn_affinize_graded(
            &algebras::r3_minus_one_hef(),
            &e1,
            &e2,
            q,
            &grades,
        )
        .unwrap();
        assert!(!template_equal(&fixture, &flat, &BTreeMap::new(), 3).unwrap());
        // Nor of the nilpotent one: there the h-rows vanish instead. Its
        // basis maps onto (e, f, h) with the bracket [x1, x2] = x3.
        let heis = algebras::heisenberg();
        let heis_grades: BTreeMap<String, i64> =
            [("x1".into(), 1), ("x2".into(), -1), ("x3".into(), 0)].into();
        let kn_heis = kn_affinize_graded(&heis, &e1, &e2, 3, &heis_grades).unwrap();
        let rename: BTreeMap<String, String> = [
            ("x1".to_string(), "e".to_string()),
            ("x2".to_string(), "f".to_string()),
            ("x3".to_string(), "h".to_string()),
        ]
        .into();
        assert!(!template_equal(&kn_heis, &fixture, &rename, 3).unwrap());
    }

    #[test]
    fn affinization_commutes_with_the_flat_contraction_of_sl2() {
        let witness = DiagonalWitness {
            pre_change: PreChange::identity(),
            exponents: [
                ("h".to_string(), "0".to_string()),
                ("e".to_string(), "1".to_string()),
                ("f".to_string(), "1".to_string()),
            ]
            .into(),
        };
        assert!(commute_check(&algebras::sl2_cartan(), &witness, 4).unwrap());
    }

    #[test]
    fn affinization_commutes_with_the_zero_contraction() {
        let witness = DiagonalWitness {
            pre_change: PreChange::identity(),
            exponents: [
                ("h".to_string(), "0".to_string()),
                ("e".to_string(), "0".to_string()),
                ("f".to_string(), "0".to_string()),
            ]
            .into(),
        };
        assert!(commute_check(&algebras::sl2_cartan(), &witness, 3).unwrap());
    }

    #[test]
    fn affinization_commutes_with_the_sheared_contraction_of_r3() {
        let two = crate::scalar::GaussianRational::from_int(2);
        let witness = DiagonalWitness {
            pre_change: PreChange::Named("add23".into()),
            exponents: [
                ("x1".to_string(), "1".to_string()),
                ("x2".to_string(), "0".to_string()),
                ("x3".to_string(), "1".to_string()),
            ]
            .into(),
        };
        assert!(commute_check(&algebras::r3_lambda(&two), &witness, 4).unwrap());
    }
}
