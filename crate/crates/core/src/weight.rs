//! Exact weights with symbolic infinitesimal tie-breaking.
//!
//! A finite [`PerturbedWeight`] is the polynomial `c0 + c1*e + c2*e^2 + ...`
//! for an infinitesimal `e > 0`. Comparing two such polynomials as `e -> 0+`
//! is the lexicographic comparison of their coefficient vectors, so every
//! operation stays in exact integer arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PerturbedWeight {
    /// Coefficients `c0, c1, ...` with trailing zeros trimmed.
    Finite(Vec<i64>),
    Infinite,
}

impl PerturbedWeight {
    pub fn zero() -> Self {
        PerturbedWeight::Finite(Vec::new())
    }

    pub fn base(value: i64) -> Self {
        Self::from_coefficients(vec![value])
    }

    /// `value + e^rank`. Rank 0 would collide with the base part and is rejected.
    pub fn with_epsilon(value: i64, rank: usize) -> Self {
        assert!(rank > 0, "epsilon rank must be positive");
        let mut coefficients = vec![0; rank + 1];
        coefficients[0] = value;
        coefficients[rank] = 1;
        Self::from_coefficients(coefficients)
    }

    pub fn from_coefficients(mut coefficients: Vec<i64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        PerturbedWeight::Finite(coefficients)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PerturbedWeight::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PerturbedWeight::Finite(c) if c.is_empty())
    }

    pub fn is_positive(&self) -> bool {
        *self > PerturbedWeight::zero()
    }

    /// The `e^0` coefficient, or `None` for the infinite weight.
    pub fn base_value(&self) -> Option<i64> {
        match self {
            PerturbedWeight::Finite(c) => Some(c.first().copied().unwrap_or(0)),
            PerturbedWeight::Infinite => None,
        }
    }

    pub fn coefficient(&self, power: usize) -> i64 {
        match self {
            PerturbedWeight::Finite(c) => c.get(power).copied().unwrap_or(0),
            PerturbedWeight::Infinite => panic!("infinite weight has no coefficients"),
        }
    }

    pub fn coefficients(&self) -> Option<&[i64]> {
        match self {
            PerturbedWeight::Finite(c) => Some(c),
            PerturbedWeight::Infinite => None,
        }
    }

    /// Non-zero infinitesimal terms as `(power, coefficient)` pairs.
    pub fn epsilon_terms(&self) -> Vec<(usize, i64)> {
        match self {
            PerturbedWeight::Finite(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i, x))
                .collect(),
            PerturbedWeight::Infinite => Vec::new(),
        }
    }

    /// The same weight with every infinitesimal term dropped.
    pub fn without_epsilon(&self) -> Self {
        match self {
            PerturbedWeight::Finite(_) => Self::base(self.base_value().unwrap()),
            PerturbedWeight::Infinite => PerturbedWeight::Infinite,
        }
    }
}

impl Default for PerturbedWeight {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for PerturbedWeight {
    fn from(value: i64) -> Self {
        Self::base(value)
    }
}

impl Ord for PerturbedWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        use PerturbedWeight::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => {
                let len = a.len().max(b.len());
                for i in 0..len {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    match x.cmp(&y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

impl PartialOrd for PerturbedWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn combine(a: &[i64], b: &[i64], sign: i64) -> Vec<i64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0) + sign * b.get(i).copied().unwrap_or(0))
        .collect()
}

impl<'a> Add<&'a PerturbedWeight> for &'a PerturbedWeight {
    type Output = PerturbedWeight;

    fn add(self, rhs: &'a PerturbedWeight) -> PerturbedWeight {
        match (self, rhs) {
            (PerturbedWeight::Finite(a), PerturbedWeight::Finite(b)) => {
                PerturbedWeight::from_coefficients(combine(a, b, 1))
            }
            _ => PerturbedWeight::Infinite,
        }
    }
}

impl<'a> Sub<&'a PerturbedWeight> for &'a PerturbedWeight {
    type Output = PerturbedWeight;

    /// Panics when subtracting the infinite weight: the difference is undefined.
    fn sub(self, rhs: &'a PerturbedWeight) -> PerturbedWeight {
        match (self, rhs) {
            (PerturbedWeight::Finite(a), PerturbedWeight::Finite(b)) => {
                PerturbedWeight::from_coefficients(combine(a, b, -1))
            }
            (PerturbedWeight::Infinite, PerturbedWeight::Finite(_)) => PerturbedWeight::Infinite,
            (_, PerturbedWeight::Infinite) => panic!("cannot subtract an infinite weight"),
        }
    }
}

impl Add for PerturbedWeight {
    type Output = PerturbedWeight;
    fn add(self, rhs: PerturbedWeight) -> PerturbedWeight {
        &self + &rhs
    }
}

impl Sub for PerturbedWeight {
    type Output = PerturbedWeight;
    fn sub(self, rhs: PerturbedWeight) -> PerturbedWeight {
        &self - &rhs
    }
}

impl AddAssign<&PerturbedWeight> for PerturbedWeight {
    fn add_assign(&mut self, rhs: &PerturbedWeight) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&PerturbedWeight> for PerturbedWeight {
    fn sub_assign(&mut self, rhs: &PerturbedWeight) {
        *self = &*self - rhs;
    }
}

impl<'a> Sum<&'a PerturbedWeight> for PerturbedWeight {
    fn sum<I: Iterator<Item = &'a PerturbedWeight>>(iter: I) -> Self {
        iter.fold(PerturbedWeight::zero(), |acc, w| &acc + w)
    }
}

impl Sum for PerturbedWeight {
    fn sum<I: Iterator<Item = PerturbedWeight>>(iter: I) -> Self {
        iter.fold(PerturbedWeight::zero(), |acc, w| &acc + &w)
    }
}

impl fmt::Display for PerturbedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbedWeight::Infinite => write!(f, "inf"),
            PerturbedWeight::Finite(_) => {
                write!(f, "{}", self.base_value().unwrap())?;
                for (power, c) in self.epsilon_terms() {
                    match c {
                        1 => write!(f, " + e^{power}")?,
                        -1 => write!(f, " - e^{power}")?,
                        c if c < 0 => write!(f, " - {}e^{power}", -c)?,
                        c => write!(f, " + {c}e^{power}")?,
                    }
                }
                Ok(())
            }
        }
    }
}
