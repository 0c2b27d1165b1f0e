//! The `.lie` definition-file format for finite-dimensional algebras.
//!
//! The format is line oriented; `#` starts a comment anywhere and blank
//! lines are ignored:
//!
//! ```text
//! file    := header param* basis bracket*
//! header  := "algebra" NAME ("over" "C")?
//! param   := "params" IDENT+
//! basis   := "basis" IDENT+
//! bracket := "[" IDENT "," IDENT "]" "=" EXPR
//! ```
//!
//! `EXPR` is a linear combination of basis symbols whose coefficients are
//! exact scalar expressions in the declared parameters (integers, `i`,
//! rationals like `1/2`, products, powers, parentheses). Unlisted bracket
//! pairs default to zero, and each unordered pair may be defined at most
//! once — `[h,e] = e` together with `[e,h] = e` is a duplicate (and, by
//! antisymmetry, contradictory) definition, not two different brackets.
//!
//! Parsing verifies the Jacobi identity by default, so a loaded algebra is
//! always an actual Lie algebra unless verification was explicitly skipped.

use liekit::finite::{FiniteError, FiniteLieAlgebra, Vector};
use liekit::scalar::parse::parse_expr;
use liekit::scalar::{is_identifier, ParamSet, ScalarExpr, EPS};

/// Errors raised while reading a `.lie` file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieFileError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: bracket [{a}, {b}] is defined twice; antisymmetry makes both orders one definition")]
    DuplicateBracket { line: usize, a: String, b: String },
    #[error("Jacobi identity fails on ({x}, {y}, {z}): defect {defect}")]
    JacobiFailure {
        x: String,
        y: String,
        z: String,
        defect: String,
    },
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> LieFileError {
    LieFileError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Split a line into whitespace-separated words with their 1-based column.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut rest = line;
    let mut offset = 0;
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return out;
        }
        let end = trimmed
            .find(char::is_whitespace)
            .unwrap_or(trimmed.len());
        out.push((offset + 1, &trimmed[..end]));
        rest = &trimmed[end..];
        offset += end;
    }
}

/// Decompose a parsed scalar expression over `basis ∪ params` into an
/// algebra element: every monomial must contain exactly one basis symbol,
/// to the first power.
pub fn expr_to_vector(
    expr: &ScalarExpr,
    basis: &[String],
    params: &ParamSet,
) -> Result<Vector, String> {
    let mut v = Vector::zero();
    for (m, c) in expr.terms() {
        let mut basis_sym: Option<&str> = None;
        for (var, pow) in m.iter() {
            if var == EPS {
                return Err(format!(
                    "`{EPS}` is the contraction variable and cannot appear in a definition file"
                ));
            }
            if basis.iter().any(|b| b == var) {
                if pow != 1 {
                    return Err(format!(
                        "basis symbol `{var}` appears with power {pow}; bracket values must be linear"
                    ));
                }
                if let Some(first) = basis_sym {
                    return Err(format!(
                        "term multiplies basis symbols `{first}` and `{var}`; bracket values must be linear"
                    ));
                }
                basis_sym = Some(var);
            } else if !params.contains(var) {
                return Err(format!(
                    "unknown symbol `{var}`; declare it with `params` or list it in `basis`"
                ));
            } else if pow < 0 {
                return Err(format!("parameter `{var}` carries a negative power"));
            }
        }
        match basis_sym {
            Some(s) => v.add_term(s.to_string(), ScalarExpr::term(m.without(s), c.clone())),
            None => {
                return Err(
                    "term has no basis symbol; bracket values must be linear combinations of basis elements"
                        .to_string(),
                )
            }
        }
    }
    Ok(v)
}

/// Parse `.lie` text into a verified algebra. With `verify` off the Jacobi
/// check is skipped and the returned bracket table is taken at face value.
pub fn parse_algebra(text: &str, verify: bool) -> Result<FiniteLieAlgebra, LieFileError> {
    let mut name: Option<String> = None;
    let mut params = ParamSet::empty();
    let mut alg: Option<FiniteLieAlgebra> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let first_col = line.len() - line.trim_start().len() + 1;
        let trimmed = line.trim();

        if let Some(rest) = trimmed.strip_prefix("algebra") {
            if !rest.starts_with(char::is_whitespace) {
                return Err(syntax(line_no, first_col, "expected `algebra <name>`"));
            }
            if name.is_some() {
                return Err(syntax(line_no, first_col, "second `algebra` header"));
            }
            let mut n = rest.trim();
            if let Some(stripped) = n.strip_suffix("over C") {
                if stripped.is_empty() || stripped.ends_with(char::is_whitespace) {
                    n = stripped.trim_end();
                }
            }
            if n.is_empty() {
                return Err(syntax(line_no, first_col, "the algebra needs a name"));
            }
            name = Some(n.to_string());
            continue;
        }

        if name.is_none() {
            return Err(syntax(
                line_no,
                first_col,
                "the file must start with an `algebra <name>` header",
            ));
        }

        if let Some(rest) = trimmed.strip_prefix("params") {
            if !rest.starts_with(char::is_whitespace) && !rest.is_empty() {
                return Err(syntax(line_no, first_col, "expected `params <name>...`"));
            }
            if alg.is_some() {
                return Err(syntax(
                    line_no,
                    first_col,
                    "`params` must come before the `basis` line",
                ));
            }
            for (col, w) in words(line).into_iter().skip(1) {
                params
                    .declare(w.to_string())
                    .map_err(|e| syntax(line_no, col, e.to_string()))?;
            }
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("basis") {
            if !rest.starts_with(char::is_whitespace) || rest.trim().is_empty() {
                return Err(syntax(line_no, first_col, "expected `basis <symbol>...`"));
            }
            if alg.is_some() {
                return Err(syntax(line_no, first_col, "second `basis` line"));
            }
            let mut basis = Vec::new();
            for (col, w) in words(line).into_iter().skip(1) {
                if !is_identifier(w) {
                    return Err(syntax(line_no, col, format!("`{w}` is not a valid identifier")));
                }
                if w == "i" || w == EPS {
                    return Err(syntax(line_no, col, format!("`{w}` is reserved")));
                }
                if params.contains(w) {
                    return Err(syntax(
                        line_no,
                        col,
                        format!("`{w}` is already declared as a parameter"),
                    ));
                }
                basis.push(w.to_string());
            }
            let built =
                FiniteLieAlgebra::new(name.clone().expect("header seen"), basis, params.clone());
            alg = Some(built.map_err(|e| syntax(line_no, first_col, e.to_string()))?);
            continue;
        }

        if trimmed.starts_with('[') {
            let Some(alg) = alg.as_mut() else {
                return Err(syntax(
                    line_no,
                    first_col,
                    "brackets must come after the `basis` line",
                ));
            };
            let open = line.find('[').expect("starts with [");
            let close = line[open..]
                .find(']')
                .map(|p| open + p)
                .ok_or_else(|| syntax(line_no, open + 1, "unclosed `[`"))?;
            let inside = &line[open + 1..close];
            let comma = inside
                .find(',')
                .ok_or_else(|| syntax(line_no, open + 2, "expected `[a, b]`"))?;
            let a = inside[..comma].trim();
            let b = inside[comma + 1..].trim();
            if a.is_empty() || b.is_empty() || b.contains(',') {
                return Err(syntax(
                    line_no,
                    open + 2,
                    "expected exactly two symbols inside `[ ]`",
                ));
            }
            for (sym, off) in [(a, open + 1), (b, open + comma + 2)] {
                if alg.basis_index(sym).is_err() {
                    return Err(syntax(
                        line_no,
                        off + 1,
                        format!("`{sym}` is not a basis symbol"),
                    ));
                }
            }
            let after = &line[close + 1..];
            let eq_rel = after
                .find('=')
                .ok_or_else(|| syntax(line_no, close + 2, "expected `=` after the bracket"))?;
            if !after[..eq_rel].trim().is_empty() {
                return Err(syntax(line_no, close + 2, "unexpected text before `=`"));
            }
            let rhs_col = close + 1 + eq_rel + 1;
            let rhs = &line[rhs_col..];
            let expr = parse_expr(rhs)
                .map_err(|e| syntax(line_no, rhs_col + e.col + 1, e.msg))?;
            let value = expr_to_vector(&expr, alg.basis(), alg.params())
                .map_err(|msg| syntax(line_no, rhs_col + 1, msg))?;
            alg.add_bracket(a, b, value).map_err(|e| match e {
                FiniteError::DuplicateBracket(a, b) => LieFileError::DuplicateBracket {
                    line: line_no,
                    a,
                    b,
                },
                other => syntax(line_no, first_col, other.to_string()),
            })?;
            continue;
        }

        return Err(syntax(
            line_no,
            first_col,
            format!("unrecognized line `{trimmed}`"),
        ));
    }

    let alg = match (alg, name) {
        (Some(a), _) => a,
        (None, Some(n)) => {
            return Err(LieFileError::Syntax {
                line: text.lines().count() + 1,
                col: 1,
                msg: format!("algebra `{n}` has no `basis` line"),
            })
        }
        (None, None) => {
            return Err(LieFileError::Syntax {
                line: 1,
                col: 1,
                msg: "empty file; expected an `algebra <name>` header".to_string(),
            })
        }
    };

    if verify {
        if let Err(FiniteError::JacobiFailure { x, y, z, defect }) = alg.check_jacobi() {
            return Err(LieFileError::JacobiFailure { x, y, z, defect });
        }
    }
    Ok(alg)
}

/// Render one bracket value in the canonical file syntax.
pub fn vector_text(v: &Vector) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    v.iter()
        .map(|(s, c)| {
            if c.is_one() {
                s.clone()
            } else {
                format!("({c})*{s}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Serialize an algebra to canonical `.lie` text. Parsing the output
/// reproduces the algebra, and the output is a fixed point of
/// parse-then-serialize.
pub fn to_lie_text(alg: &FiniteLieAlgebra) -> String {
    let mut out = format!("algebra {} over C\n", alg.name());
    let params: Vec<&str> = alg.params().iter().collect();
    if !params.is_empty() {
        out.push_str(&format!("params {}\n", params.join(" ")));
    }
    out.push_str(&format!("basis {}\n", alg.basis().join(" ")));
    let n = alg.dim();
    for i in 0..n {
        for j in i + 1..n {
            let v = alg
                .bracket_basis(&alg.basis()[i], &alg.basis()[j])
                .expect("basis symbols exist");
            if !v.is_zero() {
                out.push_str(&format!(
                    "[{}, {}] = {}\n",
                    alg.basis()[i],
                    alg.basis()[j],
                    vector_text(&v)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = "\
# split simple algebra, Cartan-Weyl presentation
algebra sl2 over C
basis h e f
[h, e] = e
[h, f] = -f
[e, f] = 2*h
";

    #[test]
    fn parses_the_cartan_presentation() {
        let alg = parse_algebra(SL2, true).unwrap();
        assert_eq!(alg.name(), "sl2");
        assert_eq!(alg.basis(), ["h", "e", "f"]);
        assert_eq!(
            alg.bracket_basis("e", "f").unwrap(),
            Vector::term("h", ScalarExpr::int(2))
        );
        assert_eq!(
            alg.bracket_basis("f", "h").unwrap(),
            Vector::basis("f")
        );
    }

    #[test]
    fn a_basis_only_file_is_abelian() {
        let alg = parse_algebra("algebra a\nbasis x y z\n", true).unwrap();
        assert_eq!(alg.dim(), 3);
        assert!(alg.bracket_basis("x", "y").unwrap().is_zero());
    }

    #[test]
    fn duplicate_unordered_pairs_are_rejected() {
        let err = parse_algebra(
            "algebra a\nbasis h e\n[h, e] = e\n[e, h] = e\n",
            true,
        )
        .unwrap_err();
        assert_eq!(
            err,
            LieFileError::DuplicateBracket {
                line: 4,
                a: "h".to_string(),
                b: "e".to_string()
            }
        );
    }

    #[test]
    fn jacobi_violations_name_the_triple() {
        // [x1,x2]=x3, [x1,x3]=x2, [x2,x3]=x2 fails Jacobi on (x1,x2,x3).
        let err = parse_algebra(
            "algebra bad\nbasis x1 x2 x3\n[x1, x2] = x3\n[x1, x3] = x2\n[x2, x3] = x2\n",
            true,
        )
        .unwrap_err();
        match err {
            LieFileError::JacobiFailure { x, y, z, .. } => {
                assert_eq!((x.as_str(), y.as_str(), z.as_str()), ("x1", "x2", "x3"));
            }
            other => panic!("expected JacobiFailure, got {other}"),
        }
        // The same text loads with verification off.
        assert!(parse_algebra(
            "algebra bad\nbasis x1 x2 x3\n[x1, x2] = x3\n[x1, x3] = x2\n[x2, x3] = x2\n",
            false
        )
        .is_ok());
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_algebra("algebra a\nbasis x y\n[x, y] = 2 +\n", true).unwrap_err();
        match err {
            LieFileError::Syntax { line, col, .. } => {
                assert_eq!(line, 3);
                assert!(col > 9, "column {col} should point into the expression");
            }
            other => panic!("expected Syntax, got {other}"),
        }
        let err = parse_algebra("algebra a\nbasis x y\n[x, z] = x\n", true).unwrap_err();
        assert!(matches!(err, LieFileError::Syntax { line: 3, .. }));
    }

    #[test]
    fn undeclared_parameters_are_rejected() {
        let err =
            parse_algebra("algebra a\nbasis x y z\n[x, y] = lam*z\n", true).unwrap_err();
        assert!(err.to_string().contains("unknown symbol `lam`"));
        let ok = parse_algebra(
            "algebra a\nparams lam\nbasis x y z\n[x, y] = lam*z\n",
            true,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn nonlinear_values_are_rejected() {
        for bad in ["x*y", "x^2", "3"] {
            let text = format!("algebra a\nbasis x y z\n[x, y] = {bad}\n");
            assert!(
                matches!(parse_algebra(&text, true), Err(LieFileError::Syntax { .. })),
                "`{bad}` should not be a valid bracket value"
            );
        }
    }

    #[test]
    fn round_trip_is_canonical() {
        let alg = parse_algebra(SL2, true).unwrap();
        let text = to_lie_text(&alg);
        let again = parse_algebra(&text, true).unwrap();
        assert_eq!(alg, again);
        assert_eq!(text, to_lie_text(&again));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# leading comment\nalgebra a # trailing\n\nbasis x y # another\n[x, y] = y # bracket\n";
        let alg = parse_algebra(text, true).unwrap();
        assert_eq!(alg.name(), "a");
        assert_eq!(alg.bracket_basis("x", "y").unwrap(), Vector::basis("y"));
    }
}
