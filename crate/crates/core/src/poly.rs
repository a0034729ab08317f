//! Laurent polynomials in T with natural-number coefficients, printed in the
//! fixed ASCII grammar `T^-2 + 32*T^-1 + 98 + 32*T + T^2`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, u64>,
}

impl LaurentPoly {
    pub fn new() -> Self {
        LaurentPoly::default()
    }

    pub fn set(&mut self, power: i64, coeff: u64) {
        if coeff == 0 {
            self.coeffs.remove(&power);
        } else {
            self.coeffs.insert(power, coeff);
        }
    }

    pub fn coeff(&self, power: i64) -> u64 {
        self.coeffs.get(&power).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }

    pub fn from_terms(terms: &[(i64, u64)]) -> Self {
        let mut p = LaurentPoly::new();
        for &(pow, c) in terms {
            p.set(pow, c);
        }
        p
    }

    /// True when coeff(i) == coeff(-i) for all i.
    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().all(|(&p, &c)| self.coeff(-p) == c)
    }

    /// The polynomial with T replaced by T^-1.
    pub fn mirrored(&self) -> LaurentPoly {
        let mut out = LaurentPoly::new();
        for (&p, &c) in &self.coeffs {
            out.set(-p, c);
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&power, &coeff) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (power, coeff) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, c) => write!(f, "{c}*T")?,
                (p, 1) => write!(f, "T^{p}")?,
                (p, c) => write!(f, "{c}*T^{p}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_grammar() {
        let p = LaurentPoly::from_terms(&[(-2, 1), (-1, 32), (0, 98), (1, 32), (2, 1)]);
        assert_eq!(p.to_string(), "T^-2 + 32*T^-1 + 98 + 32*T + T^2");
        let q = LaurentPoly::from_terms(&[(-1, 1), (0, 8), (1, 1)]);
        assert_eq!(q.to_string(), "T^-1 + 8 + T");
    }

    #[test]
    fn palindrome() {
        assert!(LaurentPoly::from_terms(&[(-1, 3), (0, 5), (1, 3)]).is_palindromic());
        assert!(!LaurentPoly::from_terms(&[(-1, 3), (1, 4)]).is_palindromic());
    }
}
