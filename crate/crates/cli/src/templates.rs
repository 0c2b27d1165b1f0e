//! The named template catalogue and text parsers for exponent
//! assignments, grids, and renamings.

use std::collections::BTreeMap;
use std::path::Path;

use num::rational::BigRational;
use num::Zero;

use liekit::algebras;
use liekit::graded::contract::GradedExponentMap;
use liekit::graded::make::{affinize, kn_affinize_graded, kn_witt, sl2_z3_grades, witt};
use liekit::graded::BracketTemplate;
use liekit::scalar::ScalarExpr;

use crate::CliError;

/// Names accepted wherever a template is expected.
pub const TEMPLATE_NAMES: &[&str] = &[
    "witt",
    "kn-witt",
    "loop-sl2",
    "affine-sl2",
    "kn-affine-sl2",
    "kn-affine-r3m1",
];

/// Build a catalogue template by name, or load and validate one from a
/// JSON file when the argument names an existing `.json` path.
pub fn named_template(name: &str) -> Result<BracketTemplate, CliError> {
    let var = ScalarExpr::var;
    let t = match name {
        "witt" => witt(),
        "kn-witt" => kn_witt(&var("alpha2"))?,
        "loop-sl2" => affinize(&algebras::sl2_cartan(), false)?,
        "affine-sl2" => affinize(&algebras::sl2_cartan(), true)?,
        "kn-affine-sl2" => {
            let (q, grades) = sl2_z3_grades();
            kn_affinize_graded(&algebras::sl2_cartan(), &var("e1"), &var("e2"), q, &grades)?
        }
        "kn-affine-r3m1" => {
            let (q, grades) = sl2_z3_grades();
            kn_affinize_graded(
                &algebras::r3_minus_one_hef(),
                &var("e1"),
                &var("e2"),
                q,
                &grades,
            )?
        }
        other if other.ends_with(".json") && Path::new(other).exists() => {
            let text = std::fs::read_to_string(other)
                .map_err(|e| CliError::domain(format!("cannot read `{other}`: {e}")))?;
            let t: BracketTemplate = serde_json::from_str(&text)
                .map_err(|e| CliError::domain(format!("`{other}` is not a template: {e}")))?;
            t.validate()?;
            t
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown template `{other}`; expected one of {} or a template JSON file",
                TEMPLATE_NAMES.join(", ")
            )))
        }
    };
    Ok(t)
}

fn rational(s: &str) -> Result<BigRational, CliError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| CliError::usage(format!("`{s}` is not an exact rational (like `-3/2`)")))
}

/// Parse `sym=value` pairs separated by `,` or `;` into rational
/// assignments, e.g. `h=0,e=1,f=1` or `V=1/2`.
pub fn parse_assignments(text: &str) -> Result<BTreeMap<String, BigRational>, CliError> {
    let mut out = BTreeMap::new();
    for piece in text.split([',', ';']).filter(|p| !p.trim().is_empty()) {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("`{piece}` is not `symbol=value`")))?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), rational(v)?).is_some() {
            return Err(CliError::usage(format!("`{key}` is assigned twice")));
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("expected at least one `symbol=value` pair"));
    }
    Ok(out)
}

/// Parse a comma- or semicolon-separated list of exact rationals.
pub fn parse_grid(text: &str) -> Result<Vec<BigRational>, CliError> {
    let vals: Result<Vec<_>, _> = text
        .split([',', ';'])
        .filter(|p| !p.trim().is_empty())
        .map(rational)
        .collect();
    let vals = vals?;
    if vals.is_empty() {
        return Err(CliError::usage("the grid must contain at least one value"));
    }
    Ok(vals)
}

/// Parse `old=new` renaming pairs separated by `,` or `;`.
pub fn parse_renaming(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for piece in text.split([',', ';']).filter(|p| !p.trim().is_empty()) {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("`{piece}` is not `old=new`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parse a fine (degree-affine) exponent specification.
///
/// Accepted forms, where the linear polynomial uses the degree variable
/// `n` with rational coefficients (`n`, `2*n`, `n/2 + 1`, `-n+3`):
///
/// * `<linear>` — applied to every non-central family;
/// * `fam=<linear>[;fam2=<linear>...]` — per family.
pub fn parse_fine_map(
    text: &str,
    t: &BracketTemplate,
) -> Result<GradedExponentMap, CliError> {
    let mut out: BTreeMap<String, (BigRational, BigRational)> = BTreeMap::new();
    if text.contains('=') {
        for piece in text.split(';').filter(|p| !p.trim().is_empty()) {
            let (fam, poly) = piece
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("`{piece}` is not `family=<linear in n>`")))?;
            out.insert(fam.trim().to_string(), linear_in_n(poly)?);
        }
    } else {
        let affine = linear_in_n(text)?;
        for fam in t.families.keys() {
            if Some(fam) != t.central.as_ref() {
                out.insert(fam.clone(), affine.clone());
            }
        }
    }
    Ok(GradedExponentMap::Fine(out))
}

/// Extract `(slope, intercept)` from a polynomial that is linear in `n`.
fn linear_in_n(text: &str) -> Result<(BigRational, BigRational), CliError> {
    let expr = liekit::scalar::parse::parse_expr(text)
        .map_err(|e| CliError::usage(format!("cannot parse `{text}`: {e}")))?;
    let mut slope = BigRational::zero();
    let mut intercept = BigRational::zero();
    for (m, c) in expr.terms() {
        if !c.is_real() {
            return Err(CliError::usage(format!(
                "`{text}` must have rational coefficients"
            )));
        }
        let rat = c.re.clone();
        match m.iter().collect::<Vec<_>>().as_slice() {
            [] => intercept += rat,
            [("n", 1)] => slope += rat,
            _ => {
                return Err(CliError::usage(format!(
                    "`{text}` must be linear in the degree variable `n`"
                )))
            }
        }
    }
    Ok((slope, intercept))
}

/// Parse a class exponent map like `0=0;1=1/2` (cyclic grading) or
/// `0,0=0;0,1=1;...` (product gradings); class coordinates are integers
/// separated by commas, entries separated by semicolons.
pub fn parse_class_map(text: &str) -> Result<GradedExponentMap, CliError> {
    let mut out: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
    for piece in text.split(';').filter(|p| !p.trim().is_empty()) {
        let (class, v) = piece
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("`{piece}` is not `class=value`")))?;
        let coords: Result<Vec<i64>, _> = class
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect();
        let coords =
            coords.map_err(|_| CliError::usage(format!("`{class}` is not a class (integers separated by commas)")))?;
        out.insert(coords, rational(v)?);
    }
    if out.is_empty() {
        return Err(CliError::usage("expected at least one `class=value` entry"));
    }
    Ok(GradedExponentMap::Class(out))
}

/// Parse a per-family constant exponent map like `h=0;e=1;f=1`.
pub fn parse_family_map(text: &str) -> Result<GradedExponentMap, CliError> {
    Ok(GradedExponentMap::Family(parse_assignments(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_catalogue_builds_and_validates() {
        for name in TEMPLATE_NAMES {
            let t = named_template(name).unwrap();
            assert!(t.validate().is_ok(), "{name} must validate");
        }
        assert!(named_template("zorp").is_err());
    }

    #[test]
    fn fine_specifications_cover_the_usual_shapes() {
        let t = named_template("kn-witt").unwrap();
        let one = || BigRational::from_integer(1.into());
        match parse_fine_map("n", &t).unwrap() {
            GradedExponentMap::Fine(m) => {
                assert_eq!(m["V"], (one(), BigRational::zero()));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        match parse_fine_map("V = n/2 + 3", &t).unwrap() {
            GradedExponentMap::Fine(m) => {
                assert_eq!(m["V"], ("1/2".parse().unwrap(), "3".parse().unwrap()));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        assert!(parse_fine_map("n^2", &t).is_err());
    }

    #[test]
    fn class_and_family_maps_parse() {
        match parse_class_map("0=0; 1=1/2").unwrap() {
            GradedExponentMap::Class(m) => {
                assert_eq!(m[&vec![0]], BigRational::zero());
                assert_eq!(m[&vec![1]], "1/2".parse().unwrap());
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        match parse_class_map("0,1 = 2").unwrap() {
            GradedExponentMap::Class(m) => assert!(m.contains_key(&vec![0, 1])),
            other => panic!("unexpected parse: {other:?}"),
        }
        assert!(parse_family_map("h=0,e=1,f=1").is_ok());
        assert!(parse_family_map("h").is_err());
    }
}
