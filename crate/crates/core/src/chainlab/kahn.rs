//! The module `M = Q/Z x Q` with `a.(x, y) = (x + a y mod 1, y)`, and the
//! maps `mu_m`, `xi`, `proj` around it.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::LevelElement;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KahnM {
    first: BigRational,
    second: BigRational,
}

fn mod_one(x: &BigRational) -> BigRational {
    x - x.floor()
}

impl KahnM {
    pub fn new(first: BigRational, second: BigRational) -> KahnM {
        KahnM {
            first: mod_one(&first),
            second,
        }
    }

    pub fn zero() -> KahnM {
        KahnM::new(BigRational::zero(), BigRational::zero())
    }

    /// Always in `[0, 1)`.
    pub fn first(&self) -> &BigRational {
        &self.first
    }

    pub fn second(&self) -> &BigRational {
        &self.second
    }

    pub fn add(&self, other: &KahnM) -> KahnM {
        KahnM::new(&self.first + &other.first, &self.second + &other.second)
    }

    /// Action of `a` in the Weil group.
    pub fn act(&self, a: &BigInt) -> KahnM {
        let a = BigRational::from_integer(a.clone());
        KahnM::new(&self.first + &a * &self.second, self.second.clone())
    }
}

impl fmt::Debug for KahnM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} mod 1, {})", self.first, self.second)
    }
}

/// `mu_m(x) = (sum (1/2 + i/m) x^(i) mod 1, -sum x^(i) / m)`.
pub fn mu(f: &LevelElement<BigInt>) -> KahnM {
    let m = BigInt::from(f.level());
    let half = BigRational::new(1.into(), 2.into());
    let mut first = BigRational::zero();
    let mut total = BigInt::zero();
    for (i, x) in f.entries().iter().enumerate() {
        let w = &half + BigRational::new(BigInt::from(i), m.clone());
        first += w * BigRational::from_integer(x.clone());
        total += x;
    }
    KahnM::new(first, -BigRational::new(total, m))
}

/// `xi(y) = (y mod 1, 0)`.
pub fn xi(y: &BigRational) -> KahnM {
    KahnM::new(y.clone(), BigRational::zero())
}

pub fn proj(x: &KahnM) -> BigRational {
    x.second.clone()
}
