//! Exponent vectors over named variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// The distinguished contraction variable. It is the only variable permitted
/// to carry negative exponents, making expressions Laurent in `eps` and
/// ordinary polynomials in everything else.
pub const EPS: &str = "eps";

/// A power product of named variables, e.g. `alpha2^2*eps^-1`.
///
/// Zero exponents are never stored, so the empty map is the monomial `1`.
/// The derived `Ord` is only a deterministic storage order for maps holding
/// monomial keys; the mathematically meaningful comparison (lexicographic
/// over the sorted variable names, treating absent variables as exponent 0)
/// is [`Monomial::cmp_lex`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: BTreeMap<String, i64>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str) -> Self {
        Self::var_pow(name, 1)
    }

    pub fn var_pow(name: &str, exp: i64) -> Self {
        let mut m = Self::one();
        if exp != 0 {
            m.exps.insert(name.to_string(), exp);
        }
        m
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut m = Self::one();
        for (name, exp) in pairs {
            let name = name.into();
            let e = m.exps.remove(&name).unwrap_or(0) + exp;
            if e != 0 {
                m.exps.insert(name, e);
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exp_of(&self, name: &str) -> i64 {
        self.exps.get(name).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.exps.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.exps.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (name, &exp) in &other.exps {
            let e = exps.remove(name).unwrap_or(0) + exp;
            if e != 0 {
                exps.insert(name.clone(), e);
            }
        }
        Monomial { exps }
    }

    /// Formal quotient `self / other`: exponents subtract and may go
    /// negative on any variable. Callers decide validity.
    pub fn ratio(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (name, &exp) in &other.exps {
            let e = exps.remove(name).unwrap_or(0) - exp;
            if e != 0 {
                exps.insert(name.clone(), e);
            }
        }
        Monomial { exps }
    }

    pub fn pow(&self, k: i64) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|(n, e)| (n.clone(), e * k)).collect(),
        }
    }

    /// Remove one variable entirely.
    pub fn without(&self, name: &str) -> Monomial {
        let mut exps = self.exps.clone();
        exps.remove(name);
        Monomial { exps }
    }

    /// Only `eps` may carry a negative exponent; report the first offender.
    pub fn check_exponent_signs(&self) -> Result<(), String> {
        for (name, &exp) in &self.exps {
            if exp < 0 && name != EPS {
                return Err(name.clone());
            }
        }
        Ok(())
    }

    /// Lexicographic order over sorted variable names (absent = 0).
    ///
    /// Unlike the derived `Ord`, this comparison is compatible with
    /// multiplication and is the order used for leading terms, exact
    /// division, and canonical display.
    pub fn cmp_lex(&self, other: &Monomial) -> Ordering {
        let mut a = self.exps.iter().peekable();
        let mut b = other.exps.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some((_, &ea)), None) => {
                    // Remaining vars of `a` compare against exponent 0.
                    return match ea.cmp(&0) {
                        Ordering::Equal => unreachable!("zero exponent stored"),
                        ord => ord,
                    };
                }
                (None, Some((_, &eb))) => {
                    return match 0.cmp(&eb) {
                        Ordering::Equal => unreachable!("zero exponent stored"),
                        ord => ord,
                    };
                }
                (Some((na, &ea)), Some((nb, &eb))) => match na.cmp(nb) {
                    Ordering::Less => {
                        // `a` has the alphabetically earlier variable with
                        // nonzero exponent; `b` implicitly has exponent 0.
                        return ea.cmp(&0);
                    }
                    Ordering::Greater => {
                        return 0.cmp(&eb);
                    }
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (name, exp) in &self.exps {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
