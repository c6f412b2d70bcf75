//! Integer polynomials in one variable `t`, used for Poincaré polynomials.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial with integer coefficients, stored by ascending degree.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct Poly {
    coeffs: Vec<i64>,
}

impl From<Vec<i64>> for Poly {
    fn from(coeffs: Vec<i64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<i64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    /// `c * t^deg`.
    pub fn monomial(deg: usize, c: i64) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        Poly::new(coeffs)
    }

    /// `1 + t^step + t^{2 step} + ... + t^{(n-1) step}`, i.e. `(1 - t^{n step}) / (1 - t^step)`.
    pub fn geometric(n: usize, step: usize) -> Self {
        if n == 0 {
            return Poly::zero();
        }
        let mut coeffs = vec![0; (n - 1) * step + 1];
        for a in 0..n {
            coeffs[a * step] += 1;
        }
        Poly::new(coeffs)
    }

    /// The quantum integer `[n]_t = 1 + t + ... + t^{n-1}`.
    pub fn q_integer(n: usize) -> Self {
        Poly::geometric(n, 1)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, deg: usize) -> i64 {
        self.coeffs.get(deg).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval_at_one(&self) -> i128 {
        self.coeffs.iter().map(|&c| c as i128).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    /// Coefficient sequence reads the same forwards and backwards.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    /// Coefficientwise `self <= other`.
    pub fn dominated_by(&self, other: &Poly) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i) <= other.coeff(i))
    }

    /// Exact division over the integers.
    ///
    /// Fails with [`Error::NotDivisible`] as soon as a leading coefficient
    /// does not divide or a nonzero remainder is left.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let not_divisible = || Error::NotDivisible {
            dividend: self.to_string(),
            divisor: divisor.to_string(),
        };
        let dd = divisor.degree().ok_or_else(not_divisible)?;
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let nd = self.degree().unwrap();
        if nd < dd {
            return Err(not_divisible());
        }
        let lead = divisor.leading_coeff();
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        let mut quot = vec![0i64; nd - dd + 1];
        for q in (0..=nd - dd).rev() {
            let top = rem[q + dd];
            if top == 0 {
                continue;
            }
            if top % lead as i128 != 0 {
                return Err(not_divisible());
            }
            let c = top / lead as i128;
            quot[q] = i64::try_from(c).map_err(|_| Error::Overflow("polynomial division"))?;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                rem[q + i] -= c * dc as i128;
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Err(not_divisible());
        }
        Ok(Poly::new(quot))
    }

    /// Division that additionally insists on a quotient with nonnegative coefficients.
    pub fn div_nonnegative(&self, divisor: &Poly) -> Result<Poly> {
        let q = self.div_exact(divisor)?;
        if !q.is_nonnegative() {
            return Err(Error::NegativeCoefficient(q.to_string()));
        }
        Ok(q)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Exponents with a nonzero coefficient, each repeated by its coefficient.
    ///
    /// Only meaningful for nonnegative polynomials; this is the multiset of
    /// Tate twists a Poincaré polynomial describes.
    pub fn twist_multiset(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c.max(0) as usize))
            .collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl std::iter::Product for Poly {
    fn product<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::one(), |acc, p| &acc * &p)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (sign, abs) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, abs) {
                (0, a) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, a) => write!(f, "{a}t")?,
                (e, 1) => write!(f, "t^{e}")?,
                (e, a) => write!(f, "{a}t^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
