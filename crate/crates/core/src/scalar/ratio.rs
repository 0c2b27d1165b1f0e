//! A thin rational-function closure over [`ScalarExpr`].
//!
//! Bracket tensors stay polynomial throughout the crate; ratios appear only
//! where they are mathematically unavoidable — the scale-invariant
//! classification invariant `tr^2/det`, matrix inversion during basis
//! changes, and intermediate steps of exact elimination. Equality is decided
//! by cross-multiplication, so no multivariate gcd is ever required for
//! correctness; a univariate gcd pass keeps the common one-parameter cases
//! small.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use super::expr::{Divergent, ScalarExpr};
use super::gaussian::GaussianRational;
use super::monomial::Monomial;
use super::ScalarError;

/// `num / den` with `den != 0`.
#[derive(Clone)]
pub struct RatioExpr {
    num: ScalarExpr,
    den: ScalarExpr,
}

/// Failure modes of `eps -> 0` limits on ratios.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error(transparent)]
    Divergent(#[from] Divergent),
    #[error("limit exists only as a ratio ({num}) / ({den}), not a polynomial")]
    NonPolynomial { num: ScalarExpr, den: ScalarExpr },
}

impl RatioExpr {
    pub fn new(num: ScalarExpr, den: ScalarExpr) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self { num, den }.reduced())
    }

    pub fn from_expr(num: ScalarExpr) -> Self {
        Self {
            num,
            den: ScalarExpr::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_expr(ScalarExpr::zero())
    }

    pub fn one() -> Self {
        Self::from_expr(ScalarExpr::one())
    }

    pub fn numerator(&self) -> &ScalarExpr {
        &self.num
    }

    pub fn denominator(&self) -> &ScalarExpr {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(c)` when the ratio is the constant `c` as a rational function.
    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.num.is_zero() {
            return Some(GaussianRational::zero());
        }
        let (nm, nc) = self.num.leading_lex()?;
        let (dm, dc) = self.den.leading_lex()?;
        if nm != dm {
            return None;
        }
        let c = nc.checked_div(dc)?;
        (self.num == self.den.mul_gauss(&c)).then_some(c)
    }

    /// The ratio as a polynomial, when the denominator divides exactly.
    pub fn as_expr(&self) -> Option<ScalarExpr> {
        if let Some(c) = self.den.constant_value() {
            return self.num.div_gauss(&c).ok();
        }
        self.num.div_exact(&self.den)
    }

    pub fn inv(&self) -> Result<RatioExpr, ScalarError> {
        RatioExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatioExpr) -> Result<RatioExpr, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        RatioExpr::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Exact limit as `eps -> 0`, requiring a polynomial value.
    ///
    /// Writing `num = eps^b * (...)` and `den = eps^a * (...)` with finite
    /// leading slices, the limit diverges when `b < a`, vanishes when
    /// `b > a`, and is the ratio of the `eps^0` slices otherwise. The final
    /// division must be exact; symbolic parameters surviving in a genuine
    /// denominator are reported as [`LimitError::NonPolynomial`].
    pub fn laurent_limit_poly(&self) -> Result<ScalarExpr, LimitError> {
        if self.num.is_zero() {
            return Ok(ScalarExpr::zero());
        }
        let b = self.num.eps_order().expect("nonzero numerator");
        let a = self.den.eps_order().expect("nonzero denominator");
        if b < a {
            return Err(Divergent {
                order: b - a,
                coefficient: self.num.eps_coefficient(b),
            }
            .into());
        }
        let num0 = self.num.shift_eps(-a).eps_coefficient(0);
        let den0 = self.den.eps_coefficient(a);
        debug_assert!(!den0.is_zero());
        if num0.is_zero() {
            return Ok(ScalarExpr::zero());
        }
        if let Some(c) = den0.constant_value() {
            return num0.div_gauss(&c).map_err(|_| LimitError::NonPolynomial {
                num: num0.clone(),
                den: den0.clone(),
            });
        }
        num0.div_exact(&den0).ok_or(LimitError::NonPolynomial {
            num: num0,
            den: den0,
        })
    }

    /// Cheap canonicalisation: zero gets denominator 1; a common monomial
    /// factor and, in the single-variable case, the polynomial gcd are
    /// cancelled; finally the denominator's lexicographic leading
    /// coefficient is scaled to 1.
    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.den = ScalarExpr::one();
            return self;
        }
        let g = common_monomial(&self.num, &self.den);
        if !g.is_one() {
            let shift = ScalarExpr::term(g.pow(-1), GaussianRational::one());
            self.num = &self.num * &shift;
            self.den = &self.den * &shift;
        }
        let vars: std::collections::BTreeSet<String> =
            self.num.vars().union(&self.den.vars()).cloned().collect();
        if vars.len() == 1 {
            let v = vars.iter().next().unwrap().clone();
            let g = univariate_gcd(&self.num, &self.den, &v);
            if g.degree_in(&v).unwrap_or(0) > 0 {
                self.num = self.num.div_exact(&g).expect("gcd divides numerator");
                self.den = self.den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        let lead = self
            .den
            .leading_lex()
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        self.num = self.num.div_gauss(&lead).unwrap();
        self.den = self.den.div_gauss(&lead).unwrap();
        self
    }
}

/// Componentwise minimum of exponents over both polynomials: the largest
/// monomial (possibly with negative eps exponent) dividing every term.
fn common_monomial(a: &ScalarExpr, b: &ScalarExpr) -> Monomial {
    let mut vars = a.vars();
    vars.extend(b.vars());
    Monomial::from_pairs(vars.into_iter().filter_map(|v| {
        let mut min = i64::MAX;
        for expr in [a, b] {
            for (m, _) in expr.terms() {
                min = min.min(m.exp_of(&v));
            }
        }
        (min != 0).then_some((v, min))
    }))
}

/// Monic gcd of two univariate polynomials in `v` (Euclid over Q(i)).
/// `eps` is treated like any other variable here; negative exponents cannot
/// occur because callers strip the common monomial first.
fn univariate_gcd(a: &ScalarExpr, b: &ScalarExpr, v: &str) -> ScalarExpr {
    let mut f = a.clone();
    let mut g = b.clone();
    while !g.is_zero() {
        let r = univariate_rem(&f, &g, v);
        f = g;
        g = r;
    }
    // Make monic for a canonical representative.
    match f.leading_lex().map(|(_, c)| c.clone()) {
        Some(c) if !c.is_zero() => f.div_gauss(&c).unwrap(),
        _ => f,
    }
}

/// Remainder of univariate division of `a` by `b != 0` in the variable `v`.
fn univariate_rem(a: &ScalarExpr, b: &ScalarExpr, v: &str) -> ScalarExpr {
    let db = b.degree_in(v).expect("nonzero divisor");
    let lb = leading_coeff_in(b, v, db);
    let mut rem = a.clone();
    loop {
        let da = match rem.degree_in(v) {
            None => return rem,
            Some(d) => d,
        };
        if da < db {
            return rem;
        }
        let la = leading_coeff_in(&rem, v, da);
        let q = la.checked_div(&lb).expect("nonzero leading coefficient");
        let t = ScalarExpr::term(Monomial::var_pow(v, da - db), q);
        rem = &rem - &(&t * b);
    }
}

/// Coefficient of `v^d` in a polynomial whose terms are constants times
/// powers of `v`.
fn leading_coeff_in(p: &ScalarExpr, v: &str, d: i64) -> GaussianRational {
    let mut out = GaussianRational::zero();
    for (m, c) in p.terms() {
        if m.exp_of(v) == d {
            debug_assert!(m.without(v).is_one(), "univariate polynomial expected");
            out = &out + c;
        }
    }
    out
}

impl PartialEq for RatioExpr {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatioExpr {}

impl Add for &RatioExpr {
    type Output = RatioExpr;
    fn add(self, rhs: &RatioExpr) -> RatioExpr {
        RatioExpr::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominators")
    }
}

impl Sub for &RatioExpr {
    type Output = RatioExpr;
    fn sub(self, rhs: &RatioExpr) -> RatioExpr {
        self + &(-rhs)
    }
}

impl Mul for &RatioExpr {
    type Output = RatioExpr;
    fn mul(self, rhs: &RatioExpr) -> RatioExpr {
        RatioExpr::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominators")
    }
}

/// Panics on a zero divisor; library code uses [`RatioExpr::checked_div`].
impl Div for &RatioExpr {
    type Output = RatioExpr;
    fn div(self, rhs: &RatioExpr) -> RatioExpr {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &RatioExpr {
    type Output = RatioExpr;
    fn neg(self) -> RatioExpr {
        RatioExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl From<ScalarExpr> for RatioExpr {
    fn from(e: ScalarExpr) -> Self {
        RatioExpr::from_expr(e)
    }
}

impl fmt::Display for RatioExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatioExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for RatioExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
