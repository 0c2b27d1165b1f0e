//! Constructors for the standard bracket templates: the Witt algebra,
//! its one-parameter higher-genus deformation, loop algebras, affine
//! algebras with a central extension, and the two-parameter deformed
//! affine family.

use std::collections::BTreeMap;

use crate::finite::FiniteLieAlgebra;
use crate::scalar::{ParamSet, ScalarExpr};

use super::{
    BracketRule, BracketTemplate, FamilyGradeMap, GradeGroup, GradedError, RuleGuard, RuleTerm,
    DEG_X, DEG_Y,
};

fn guard(x: &str, y: &str, modulus: u32, rx: u32, ry: u32) -> RuleGuard {
    RuleGuard {
        x_family: x.into(),
        y_family: y.into(),
        modulus,
        x_residue: rx,
        y_residue: ry,
    }
}

fn m_minus_n() -> ScalarExpr {
    &ScalarExpr::var(DEG_Y) - &ScalarExpr::var(DEG_X)
}

/// Parameters a caller passed as expressions, collected into a registry.
fn params_of(exprs: &[&ScalarExpr], extra: &ParamSet) -> Result<ParamSet, GradedError> {
    let mut params = extra.clone();
    for e in exprs {
        for v in e.vars() {
            if !params.contains(&v) {
                params.declare(v)?;
            }
        }
    }
    Ok(params)
}

/// The Witt algebra: one family `l`, `[l_n, l_m] = (m - n) l_{n+m}`.
pub fn witt() -> BracketTemplate {
    let t = BracketTemplate {
        name: "witt".into(),
        group: GradeGroup::trivial(),
        families: [("l".to_string(), FamilyGradeMap::constant(vec![0]))].into(),
        central: None,
        params: ParamSet::empty(),
        rules: vec![BracketRule {
            guard: guard("l", "l", 1, 0, 0),
            terms: vec![RuleTerm::new("l", 0, m_minus_n())],
        }],
    };
    debug_assert!(t.validate().is_ok());
    t
}

/// The one-parameter deformation of the Witt algebra with brackets split
/// by parity:
///
/// ```text
/// [V_n, V_m] = (m-n) V_{n+m}                                n, m odd
/// [V_n, V_m] = (m-n) (V_{n+m} + a2 V_{n+m-2})               n, m even
/// [V_n, V_m] = (m-n) V_{n+m} + (m-n-1) a2 V_{n+m-2}         n odd, m even
/// ```
///
/// (the even-odd case follows by antisymmetry). The elements realize the
/// vector fields `V_2n = X (X^2 - a2)^n d/dX` and
/// `V_{2n+1} = (X^2 - a2)^{n+1} d/dX`.
pub fn kn_witt(alpha2: &ScalarExpr) -> Result<BracketTemplate, GradedError> {
    let params = params_of(&[alpha2], &ParamSet::empty())?;
    let mn = m_minus_n();
    let one = ScalarExpr::one;
    let shifted = |c: i64| &mn + &ScalarExpr::int(c);

    let term_main = RuleTerm::new("V", 0, mn.clone());
    let alpha_term = |coeff: ScalarExpr| RuleTerm::new("V", -2, &coeff * alpha2);
    let rules = vec![
        // Odd-odd: no deformation term.
        BracketRule {
            guard: guard("V", "V", 2, 1, 1),
            terms: vec![term_main.clone()],
        },
        // Even-even: (m-n) (V_{n+m} + a2 V_{n+m-2}).
        BracketRule {
            guard: guard("V", "V", 2, 0, 0),
            terms: vec![term_main.clone(), alpha_term(mn.clone())],
        },
        // Odd-even and its mirror.
        BracketRule {
            guard: guard("V", "V", 2, 1, 0),
            terms: vec![term_main.clone(), alpha_term(&mn - &one())],
        },
        BracketRule {
            guard: guard("V", "V", 2, 0, 1),
            terms: vec![term_main, alpha_term(shifted(1))],
        },
    ];

    let t = BracketTemplate {
        name: "kn-witt".into(),
        group: GradeGroup::cyclic(2),
        families: [(
            "V".to_string(),
            FamilyGradeMap {
                base: vec![0],
                slope: vec![1],
            },
        )]
        .into(),
        central: None,
        params,
        rules,
    };
    t.validate()?;
    Ok(t)
}

/// Check that `grades` defines a grading of `g` modulo `modulus`: for
/// every bracket `[x_i, x_j]` containing `x_k`, `grade(k) = grade(i) +
/// grade(j) (mod modulus)`.
fn check_finite_grading(
    g: &FiniteLieAlgebra,
    modulus: u32,
    grades: &BTreeMap<String, i64>,
) -> Result<(), GradedError> {
    let q = modulus as i64;
    let grade = |s: &str| -> Result<i64, GradedError> {
        grades
            .get(s)
            .map(|v| v.rem_euclid(q))
            .ok_or_else(|| GradedError::UnknownFamily(s.to_string()))
    };
    let n = g.dim();
    for i in 0..n {
        for j in i + 1..n {
            for (k, c) in g.bracket_indices(i, j).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (gi, gj, gk) = (
                    grade(&g.basis()[i])?,
                    grade(&g.basis()[j])?,
                    grade(&g.basis()[k])?,
                );
                if (gi + gj).rem_euclid(q) != gk {
                    return Err(GradedError::NotAGrading(format!(
                        "[{}, {}] contains {} but {} + {} != {} (mod {})",
                        g.basis()[i],
                        g.basis()[j],
                        g.basis()[k],
                        gi,
                        gj,
                        gk,
                        modulus
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The canonical grading of a three-dimensional split simple algebra in
/// the `h, e, f` basis: `h -> 0`, `e -> 1`, `f -> -1` modulo 3.
pub fn sl2_z3_grades() -> (u32, BTreeMap<String, i64>) {
    (
        3,
        [
            ("h".to_string(), 0),
            ("e".to_string(), 1),
            ("f".to_string(), -1),
        ]
        .into(),
    )
}

struct LoopSpec<'a> {
    g: &'a FiniteLieAlgebra,
    finite_modulus: u32,
    grades: BTreeMap<String, i64>,
    /// Coefficients for the degree offsets of each product term: offset
    /// 0 always with factor 1; odd-odd degree pairs additionally get
    /// these (offset, factor) terms.
    odd_odd_extra: Vec<(i64, ScalarExpr)>,
    central: bool,
    name: String,
    extra_params: Vec<ScalarExpr>,
}

/// Shared builder for the loop-type templates: one family per basis
/// symbol of `g`, degree parity as a grade coordinate, and rules that
/// tensor the finite structure constants with a product on the degree
/// indices.
fn loopify(spec: LoopSpec<'_>) -> Result<BracketTemplate, GradedError> {
    let g = spec.g;
    g.check_jacobi()
        .map_err(|e| GradedError::UnverifiedFiniteAlgebra(e.to_string()))?;
    check_finite_grading(g, spec.finite_modulus, &spec.grades)?;

    let central_name = "c".to_string();
    if spec.central && g.basis().contains(&central_name) {
        return Err(GradedError::MalformedTemplate(
            "basis symbol `c` collides with the central element".into(),
        ));
    }

    let mut families: BTreeMap<String, FamilyGradeMap> = BTreeMap::new();
    let q = spec.finite_modulus as i64;
    for s in g.basis() {
        let grade = spec
            .grades
            .get(s)
            .ok_or_else(|| GradedError::UnknownFamily(s.clone()))?;
        families.insert(
            s.clone(),
            FamilyGradeMap {
                base: vec![grade.rem_euclid(q), 0],
                slope: vec![0, 1],
            },
        );
    }
    if spec.central {
        families.insert(central_name.clone(), FamilyGradeMap::constant(vec![0, 0]));
    }

    let extra_refs: Vec<&ScalarExpr> = spec.extra_params.iter().collect();
    let params = params_of(&extra_refs, g.params())?;

    let killing = if spec.central {
        Some(g.killing_form())
    } else {
        None
    };

    let n = g.dim();
    let mut rules = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let coeffs = if i == j {
                vec![ScalarExpr::zero(); n]
            } else {
                let (a, b) = (i.min(j), i.max(j));
                let mut v = g.bracket_indices(a, b);
                if i > j {
                    for c in &mut v {
                        *c = -&*c;
                    }
                }
                v
            };
            let base_terms: Vec<RuleTerm> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| RuleTerm::new(g.basis()[k].clone(), 0, c.clone()))
                .collect();
            let central_coeff = killing.as_ref().map(|b| b.at(i, j).clone());

            for rx in 0..2 {
                for ry in 0..2 {
                    let mut terms = base_terms.clone();
                    if rx == 1 && ry == 1 {
                        for (offset, factor) in &spec.odd_odd_extra {
                            for t in &base_terms {
                                terms.push(RuleTerm::new(
                                    t.target.clone(),
                                    *offset,
                                    &t.coeff * factor,
                                ));
                            }
                        }
                    }
                    // The central term needs n + m = 0, so only guards
                    // with matching parities can carry it.
                    if let Some(b) = &central_coeff {
                        if !b.is_zero() && rx == ry {
                            terms.push(RuleTerm {
                                target: central_name.clone(),
                                offset: 0,
                                coeff: &ScalarExpr::var(DEG_X) * b,
                                delta_zero: true,
                            });
                        }
                    }
                    if !terms.is_empty() {
                        rules.push(BracketRule {
                            guard: guard(&g.basis()[i], &g.basis()[j], 2, rx, ry),
                            terms,
                        });
                    }
                }
            }
        }
    }

    // Drop pairs that ended up with partial, all-empty coverage; keep
    // pairs where at least one guard has terms, padding the rest.
    let mut full_rules = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for r in &rules {
        let key = (r.guard.x_family.clone(), r.guard.y_family.clone());
        if !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    for (fx, fy) in pairs {
        for rx in 0..2 {
            for ry in 0..2 {
                let existing = rules.iter().find(|r| {
                    r.guard.x_family == fx
                        && r.guard.y_family == fy
                        && r.guard.x_residue == rx
                        && r.guard.y_residue == ry
                });
                full_rules.push(existing.cloned().unwrap_or_else(|| BracketRule {
                    guard: guard(&fx, &fy, 2, rx, ry),
                    terms: vec![],
                }));
            }
        }
    }

    let t = BracketTemplate {
        name: spec.name,
        group: GradeGroup::product(&[spec.finite_modulus, 2]),
        families,
        central: spec.central.then_some(central_name),
        params,
        rules: full_rules,
    };
    t.validate()?;
    Ok(t)
}

/// The loop algebra (and with `central`, the affine algebra) over `g`:
///
/// ```text
/// [a⊗t^n, b⊗t^m] = [a,b]⊗t^{n+m} + n·c·B(a,b)·delta(n+m, 0)
/// ```
///
/// with `B` the Killing form of `g`; the central term is present only
/// when `central` is set.
pub fn affinize(g: &FiniteLieAlgebra, central: bool) -> Result<BracketTemplate, GradedError> {
    let grades = g.basis().iter().map(|s| (s.clone(), 0)).collect();
    affinize_graded(g, central, 1, &grades)
}

/// [`affinize`] with a finite grading of `g` recorded in the template's
/// grade group (the template itself is the same; the grading enables
/// class-level contractions).
pub fn affinize_graded(
    g: &FiniteLieAlgebra,
    central: bool,
    finite_modulus: u32,
    grades: &BTreeMap<String, i64>,
) -> Result<BracketTemplate, GradedError> {
    loopify(LoopSpec {
        g,
        finite_modulus,
        grades: grades.clone(),
        odd_odd_extra: vec![],
        central,
        name: format!("affine({})", g.name()),
        extra_params: vec![],
    })
}

/// The two-parameter deformation of the (trivially extended) affine
/// algebra over `g`:
///
/// ```text
/// [a⊗A^n, b⊗A^m] = [a,b]⊗A^{n+m}                                n or m even
/// [a⊗A^n, b⊗A^m] = [a,b]⊗(A^{n+m} + 3 e1 A^{n+m-2}
///                          + (e1-e2)(2 e1+e2) A^{n+m-4})        n and m odd
/// ```
///
/// At `e1 = e2 = 0` this is the loop algebra again.
pub fn kn_affinize(
    g: &FiniteLieAlgebra,
    e1: &ScalarExpr,
    e2: &ScalarExpr,
) -> Result<BracketTemplate, GradedError> {
    let grades = g.basis().iter().map(|s| (s.clone(), 0)).collect();
    kn_affinize_graded(g, e1, e2, 1, &grades)
}

/// [`kn_affinize`] with a finite grading recorded for class-level
/// contractions.
pub fn kn_affinize_graded(
    g: &FiniteLieAlgebra,
    e1: &ScalarExpr,
    e2: &ScalarExpr,
    finite_modulus: u32,
    grades: &BTreeMap<String, i64>,
) -> Result<BracketTemplate, GradedError> {
    let three_e1 = &ScalarExpr::int(3) * e1;
    let quartic = &(e1 - e2) * &(&(&ScalarExpr::int(2) * e1) + e2);
    loopify(LoopSpec {
        g,
        finite_modulus,
        grades: grades.clone(),
        odd_odd_extra: vec![(-2, three_e1), (-4, quartic)],
        central: false,
        name: format!("kn-affine({})", g.name()),
        extra_params: vec![e1.clone(), e2.clone()],
    })
}
