//! Sparse multivariate polynomials over Q(i), Laurent in `eps`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gaussian::GaussianRational;
use super::monomial::{Monomial, EPS};
use super::ScalarError;

/// A sparse polynomial in named parameters with Gaussian-rational
/// coefficients. The distinguished variable [`EPS`] may appear with negative
/// exponents; all other variables are ordinary polynomial variables.
///
/// The term map never stores zero coefficients, so `==` is exact equality of
/// polynomials and the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ScalarExpr {
    terms: BTreeMap<Monomial, GaussianRational>,
}

/// Raised by [`ScalarExpr::laurent_limit`] when the expression blows up as
/// `eps -> 0`; carries the most negative `eps` order and its coefficient.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("diverges as eps -> 0: leading term eps^{order} with coefficient {coefficient}")]
pub struct Divergent {
    pub order: i64,
    pub coefficient: ScalarExpr,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::gauss(GaussianRational::one())
    }

    pub fn int(n: i64) -> Self {
        Self::gauss(GaussianRational::from_int(n))
    }

    pub fn gauss(c: GaussianRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(name: &str) -> Self {
        Self::term(Monomial::var(name), GaussianRational::one())
    }

    /// `eps^k` for any integer `k`.
    pub fn eps_pow(k: i64) -> Self {
        Self::term(Monomial::var_pow(EPS, k), GaussianRational::one())
    }

    pub fn term(m: Monomial, c: GaussianRational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut e = Self::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// `Some(c)` when the expression is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn coeff_of(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// All variable names appearing with nonzero exponent.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            out.extend(m.vars().map(str::to_string));
        }
        out
    }

    /// Leading term under the lexicographic monomial order.
    pub fn leading_lex(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| a.cmp_lex(b))
    }

    /// Highest exponent of `name` over all terms, `None` for the zero poly.
    pub fn degree_in(&self, name: &str) -> Option<i64> {
        self.terms.keys().map(|m| m.exp_of(name)).max()
    }

    pub fn min_degree_in(&self, name: &str) -> Option<i64> {
        self.terms.keys().map(|m| m.exp_of(name)).min()
    }

    // ---- eps structure ------------------------------------------------

    /// The lowest power of `eps` present, `None` for the zero polynomial.
    pub fn eps_order(&self) -> Option<i64> {
        self.min_degree_in(EPS)
    }

    /// The coefficient of `eps^k`, with `eps` removed.
    pub fn eps_coefficient(&self, k: i64) -> ScalarExpr {
        ScalarExpr::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp_of(EPS) == k)
                .map(|(m, c)| (m.without(EPS), c.clone())),
        )
    }

    /// Multiply by `eps^k`.
    pub fn shift_eps(&self, k: i64) -> ScalarExpr {
        if k == 0 {
            return self.clone();
        }
        let shift = Monomial::var_pow(EPS, k);
        ScalarExpr::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.mul(&shift), c.clone())),
        )
    }

    /// The limit as `eps -> 0`: the `eps^0` slice if no negative orders are
    /// present, otherwise [`Divergent`] with the most negative order.
    pub fn laurent_limit(&self) -> Result<ScalarExpr, Divergent> {
        match self.eps_order() {
            Some(order) if order < 0 => Err(Divergent {
                order,
                coefficient: self.eps_coefficient(order),
            }),
            _ => Ok(self.eps_coefficient(0)),
        }
    }

    // ---- substitution and calculus ------------------------------------

    /// Full evaluation; every variable present must be assigned.
    pub fn eval(
        &self,
        assignment: &BTreeMap<String, GaussianRational>,
    ) -> Result<GaussianRational, ScalarError> {
        let mut total = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (name, exp) in m.iter() {
                let v = assignment
                    .get(name)
                    .ok_or_else(|| ScalarError::MissingAssignment(name.to_string()))?;
                let p = v.powi(exp).ok_or(ScalarError::DivisionByZero)?;
                prod = &prod * &p;
            }
            total = &total + &prod;
        }
        Ok(total)
    }

    /// Substitute one variable by a constant, leaving the rest symbolic.
    pub fn subst(&self, name: &str, value: &GaussianRational) -> Result<ScalarExpr, ScalarError> {
        let mut out = ScalarExpr::zero();
        for (m, c) in &self.terms {
            let exp = m.exp_of(name);
            if exp == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let p = value.powi(exp).ok_or(ScalarError::DivisionByZero)?;
            out.add_term(m.without(name), &p * c);
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `name`.
    pub fn derivative(&self, name: &str) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (m, c) in &self.terms {
            let exp = m.exp_of(name);
            if exp == 0 {
                continue;
            }
            let factor = GaussianRational::from_int(exp);
            let lowered = m.mul(&Monomial::var_pow(name, -1));
            out.add_term(lowered, &factor * c);
        }
        out
    }

    // ---- arithmetic helpers -------------------------------------------

    pub fn mul_gauss(&self, c: &GaussianRational) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn div_gauss(&self, c: &GaussianRational) -> Result<ScalarExpr, ScalarError> {
        let inv = c.inv().ok_or(ScalarError::DivisionByZero)?;
        Ok(self.mul_gauss(&inv))
    }

    pub fn pow(&self, k: u32) -> ScalarExpr {
        let mut acc = ScalarExpr::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact polynomial division in the Laurent ring: `Some(q)` with
    /// `self == q * divisor`, or `None` when no such polynomial exists.
    pub fn div_exact(&self, divisor: &ScalarExpr) -> Option<ScalarExpr> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ScalarExpr::zero());
        }
        // Shift both operands so their eps order is exactly zero. Orders add
        // under multiplication, so an exact Laurent quotient then lives in
        // the plain polynomial ring, where the lexicographic order is a
        // well-order and forced leading-monomial division terminates.
        let sa = self.eps_order().unwrap_or(0);
        let sd = divisor.eps_order().unwrap_or(0);
        let a = self.shift_eps(-sa);
        let d = divisor.shift_eps(-sd);

        let (dl_m, dl_c) = d.leading_lex().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = a;
        let mut quot = ScalarExpr::zero();
        while !rem.is_zero() {
            let (rl_m, rl_c) = rem.leading_lex().map(|(m, c)| (m.clone(), c.clone()))?;
            let qm = rl_m.ratio(&dl_m);
            // The quotient's leading monomial is forced; a negative exponent
            // anywhere means the division cannot succeed.
            if qm.iter().any(|(_, e)| e < 0) {
                return None;
            }
            let qc = rl_c.checked_div(&dl_c)?;
            let t = ScalarExpr::term(qm, qc);
            rem = &rem - &(&t * &d);
            quot = &quot + &t;
        }
        Some(quot.shift_eps(sa - sd))
    }

    // ---- validation ----------------------------------------------------

    /// Error if any non-`eps` variable carries a negative exponent.
    pub fn check_well_formed(&self) -> Result<(), ScalarError> {
        for m in self.terms.keys() {
            m.check_exponent_signs()
                .map_err(ScalarError::NegativeExponent)?;
        }
        Ok(())
    }

    /// Rebuild the term map, defensively dropping zero coefficients.
    /// Construction maintains this invariant, so this is a no-op in practice.
    pub fn canonicalized(self) -> ScalarExpr {
        ScalarExpr::from_terms(self.terms)
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::int(n)
    }
}

impl From<GaussianRational> for ScalarExpr {
    fn from(c: GaussianRational) -> Self {
        ScalarExpr::gauss(c)
    }
}

/// Canonical text form: terms in descending lexicographic order, explicit
/// `*` between factors, so the output re-parses to an equal expression.
impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &GaussianRational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.cmp_lex(a));
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let (negative, body) = render_term(m, c);
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

/// Render one term as (sign, unsigned body).
fn render_term(m: &Monomial, c: &GaussianRational) -> (bool, String) {
    use num::{One, Signed, Zero};
    if m.is_one() {
        // Pure constants: extract the sign for real or purely imaginary
        // values; render mixed complex constants in parentheses.
        return if c.im.is_zero() {
            (c.re.is_negative(), c.re.abs().to_string())
        } else if c.re.is_zero() {
            let body = if c.im.abs().is_one() {
                "i".to_string()
            } else {
                format!("{}*i", c.im.abs())
            };
            (c.im.is_negative(), body)
        } else {
            (false, format!("({c})"))
        };
    }
    let mono = m.to_string();
    if c.is_one() {
        return (false, mono);
    }
    if (-c).is_one() {
        return (true, mono);
    }
    if c.im.is_zero() {
        (c.re.is_negative(), format!("{}*{}", c.re.abs(), mono))
    } else if c.re.is_zero() {
        let coeff = if c.im.abs().is_one() {
            "i".to_string()
        } else {
            format!("{}*i", c.im.abs())
        };
        (c.im.is_negative(), format!("{coeff}*{mono}"))
    } else {
        (false, format!("({c})*{mono}"))
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ScalarExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScalarExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse::parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse::parse_expr;
    use crate::scalar::ParamSet;

    fn e(src: &str) -> ScalarExpr {
        parse_expr(src).unwrap()
    }

    #[test]
    fn laurent_monomials_multiply() {
        // eps^2 * eps^-3 = eps^-1
        assert_eq!(&ScalarExpr::eps_pow(2) * &ScalarExpr::eps_pow(-3), ScalarExpr::eps_pow(-1));
    }

    #[test]
    fn limit_of_negative_order_diverges() {
        let err = ScalarExpr::eps_pow(-1).laurent_limit().unwrap_err();
        assert_eq!(err.order, -1);
        assert_eq!(err.coefficient, ScalarExpr::one());
    }

    #[test]
    fn limit_takes_the_constant_slice() {
        assert_eq!(e("3 + 2*eps").laurent_limit().unwrap(), ScalarExpr::int(3));
        assert_eq!(e("eps^2*t + 5*t").laurent_limit().unwrap(), e("5*t"));
        let err = e("eps^-2*a + eps^-1 + 7").laurent_limit().unwrap_err();
        assert_eq!(err.order, -2);
        assert_eq!(err.coefficient, e("a"));
    }

    #[test]
    fn product_expansion_matches_term_by_term_oracle() {
        // (e1 - e2)(2*e1 + e2) = 2*e1^2 - e1*e2 - e2^2
        let lhs = &e("e1 - e2") * &e("2*e1 + e2");
        assert_eq!(lhs, e("2*e1^2 - e1*e2 - e2^2"));

        // Independent oracle: accumulate every cross product naively.
        fn slow_mul(a: &ScalarExpr, b: &ScalarExpr) -> ScalarExpr {
            let mut pairs = Vec::new();
            for (ma, ca) in a.terms() {
                for (mb, cb) in b.terms() {
                    pairs.push((ma.mul(mb), ca * cb));
                }
            }
            ScalarExpr::from_terms(pairs)
        }
        assert_eq!(lhs, slow_mul(&e("e1 - e2"), &e("2*e1 + e2")));
    }

    #[test]
    fn degree_coefficient_substitution() {
        // (m - n) at m = 3, n = 1 is 2.
        let p = e("m - n");
        let p = p.subst("m", &GaussianRational::from_int(3)).unwrap();
        let p = p.subst("n", &GaussianRational::from_int(1)).unwrap();
        assert_eq!(p, ScalarExpr::int(2));
    }

    #[test]
    fn normalize_validates_registry() {
        let params = ParamSet::new(["lambda"]).unwrap();
        assert!(crate::scalar::normalize(e("lambda^2 + eps^-1"), &params).is_ok());
        assert_eq!(
            crate::scalar::normalize(e("mu"), &params),
            Err(ScalarError::UndeclaredParameter("mu".into()))
        );
        // Negative exponents on ordinary parameters are rejected even when
        // the expression was assembled directly rather than parsed.
        let bad = ScalarExpr::term(Monomial::var_pow("lambda", -1), GaussianRational::one());
        assert_eq!(
            crate::scalar::normalize(bad, &params),
            Err(ScalarError::NegativeExponent("lambda".into()))
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        let params = ParamSet::new(["a", "b"]).unwrap();
        let p = e("(a + b)^2 - a^2 - 2*a*b - b^2"); // the zero polynomial
        let once = crate::scalar::normalize(p, &params).unwrap();
        assert!(once.is_zero());
        let twice = crate::scalar::normalize(once.clone(), &params).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn exact_division() {
        let p = &e("a^2 - b^2") * &e("eps^-1");
        let q = p.div_exact(&e("a + b")).unwrap();
        assert_eq!(q, &e("a - b") * &e("eps^-1"));
        assert_eq!(e("a^2 + b").div_exact(&e("a + b")), None);
        assert_eq!(e("0").div_exact(&e("a")), Some(ScalarExpr::zero()));
        // Not divisible in the polynomial ring: 1 by (1 - eps).
        assert_eq!(ScalarExpr::one().div_exact(&e("1 - eps")), None);
    }

    #[test]
    fn derivative_is_formal() {
        assert_eq!(e("x^3 - 2*x*y").derivative("x"), e("3*x^2 - 2*y"));
        assert_eq!(e("x^3").derivative("y"), ScalarExpr::zero());
    }

    #[test]
    fn display_parse_round_trip() {
        for src in [
            "0",
            "-16",
            "eps^-1",
            "2*e1^2 - e1*e2 - e2^2",
            "(1+i)*x - i*y + 1/2",
            "x^2*eps^-3 + 4",
            "lambda",
            "-x + 3/4",
        ] {
            let p = e(src);
            assert_eq!(parse_expr(&p.to_string()).unwrap(), p, "round trip of {src}");
        }
    }
}
