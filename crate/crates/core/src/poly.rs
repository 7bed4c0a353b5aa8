//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exactalg::RatMatrix;

/// Coefficients in ascending degree, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<BigRational>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<BigRational>) -> PolyQ {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints<T: Into<BigInt> + Clone>(coeffs: &[T]) -> PolyQ {
        PolyQ::new(
            coeffs
                .iter()
                .cloned()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> PolyQ {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> PolyQ {
        PolyQ::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> PolyQ {
        PolyQ::new(vec![c])
    }

    /// `x^k - 1`.
    pub fn x_pow_minus_one(k: usize) -> PolyQ {
        let mut c = vec![BigRational::zero(); k + 1];
        c[0] = -BigRational::one();
        c[k] += BigRational::one();
        PolyQ::new(c)
    }

    /// The linear polynomial `1 - a t`.
    pub fn one_minus(a: BigRational) -> PolyQ {
        PolyQ::new(vec![BigRational::one(), -a])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Evaluate at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, a: &RatMatrix) -> RatMatrix {
        let n = a.rows();
        let mut acc = RatMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a);
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    pub fn add(&self, other: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, k: &BigRational) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &PolyQ) -> PolyQ {
        if self.is_zero() || other.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyQ::new(out)
    }

    pub fn pow(&self, e: u32) -> PolyQ {
        (0..e).fold(PolyQ::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &PolyQ) -> (PolyQ, PolyQ) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (PolyQ::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (PolyQ::new(quot), PolyQ::new(rem))
    }

    pub fn divides(&self, other: &PolyQ) -> bool {
        other.div_rem(self).1.is_zero()
    }

    pub fn monic(&self) -> PolyQ {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => PolyQ::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> PolyQ {
        PolyQ::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// The `k`-th cyclotomic polynomial.
    pub fn cyclotomic(k: usize) -> PolyQ {
        assert!(k >= 1);
        let mut p = PolyQ::x_pow_minus_one(k);
        for d in 1..k {
            if k.is_multiple_of(d) {
                p = p.div_rem(&PolyQ::cyclotomic(d)).0;
            }
        }
        p
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({})", self)
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{}", c),
                1 => format!("({})t", c),
                _ => format!("({})t^{}", c, i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomics() {
        assert_eq!(PolyQ::cyclotomic(1), PolyQ::from_ints(&[-1, 1]));
        assert_eq!(PolyQ::cyclotomic(4), PolyQ::from_ints(&[1, 0, 1]));
        assert_eq!(PolyQ::cyclotomic(6), PolyQ::from_ints(&[1, -1, 1]));
        assert_eq!(PolyQ::cyclotomic(12), PolyQ::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn division_and_gcd() {
        let a = PolyQ::from_ints(&[-1, 0, 1]);
        let b = PolyQ::from_ints(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, PolyQ::from_ints(&[1, 1]));
        assert!(r.is_zero());
        let g = a.gcd(&PolyQ::from_ints(&[1, 2, 1]));
        assert_eq!(g, PolyQ::from_ints(&[1, 1]));
    }
}
