//! Pochhammer symbols, terminating (basic) hypergeometric series, three-term
//! recurrences and the catalog of exactly solvable families.
//!
//! Everything that can suffer catastrophic cancellation is written once over
//! the [`Scalar`] trait so it can run either in `f64` or in exact rationals
//! ([`Exact`]). Every finite `f64` is a dyadic rational, so the exact path
//! sees the user's parameters without any conversion error.

mod catalog;
mod recurrence;
mod series;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub use catalog::{Family, FamilyDescriptor, FAMILY_NAMES};
pub use recurrence::{recurrence_eval, recurrence_eval_at_eigenvalue, recurrence_eval_real, recurrence_exact};
pub use series::{
    basic_hypergeometric_3phi2, basic_hypergeometric_sum, basic_hypergeometric_terminating,
    hypergeometric_sum, hypergeometric_terminating,
};

/// Exact rational arithmetic.
pub type Exact = Ratio<BigInt>;

/// Field arithmetic shared by `f64` and [`Exact`].
pub trait Scalar:
    Clone + Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Debug
{
    /// Converts a finite parameter. Panics on NaN or infinity, which the
    /// model constructors reject up front.
    fn param(x: f64) -> Self {
        Self::from_f64(x).expect("parameter must be finite")
    }

    fn int(x: i64) -> Self {
        Self::from_i64(x).expect("integer fits")
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 + r_0 (1 + r_1 (1 + ... (1 + r_{m-1})))`: the sum of a series whose
    /// consecutive terms have ratios `r_j`.
    fn nested_sum(ratios: &[Self]) -> Self {
        ratios.iter().rev().fold(Self::one(), |acc, r| Self::one() + r.clone() * acc)
    }

    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        factors.into_iter().fold(Self::one(), |acc, f| acc * f)
    }
}

impl Scalar for f64 {}

impl Scalar for Exact {
    /// The shortest decimal that rounds to `x`, so `0.3` becomes `3/10`
    /// rather than the nearest dyadic rational. The two differ by less than
    /// half an ulp, and decimal parameters keep the exact arithmetic small.
    fn param(x: f64) -> Self {
        assert!(x.is_finite(), "parameter must be finite");
        let text = x.to_string();
        let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
        let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
        Exact::new(digits, num_traits::pow(BigInt::from(10), frac.len()))
    }

    /// Accumulates over a common denominator and reduces once at the end.
    fn nested_sum(ratios: &[Self]) -> Self {
        let (mut top, mut bottom) = (BigInt::from(1), BigInt::from(1));
        for r in ratios.iter().rev() {
            let scaled = r.denom() * &bottom;
            top = &scaled + r.numer() * &top;
            bottom = scaled;
        }
        Exact::new(top, bottom)
    }

    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        let (mut top, mut bottom) = (BigInt::from(1), BigInt::from(1));
        for f in factors {
            top *= f.numer();
            bottom *= f.denom();
        }
        Exact::new(top, bottom)
    }
}

/// `x^e` for any integer exponent.
pub fn ipow<S: Scalar>(x: &S, e: i64) -> S {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        S::one() / p
    } else {
        p
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn poch<S: Scalar>(a: &S, n: usize) -> S {
    S::product((0..n).map(|j| a.clone() + S::int(j as i64)))
}

/// `(a; q)_n = (1-a)(1-aq)...(1-aq^{n-1})`.
pub fn q_poch<S: Scalar>(a: &S, q: &S, n: usize) -> S {
    let mut aqj = a.clone();
    S::product((0..n).map(|_| {
        let f = S::one() - aqj.clone();
        aqj = aqj.clone() * q.clone();
        f
    }))
}

pub fn pochhammer(a: f64, n: usize) -> f64 {
    poch(&a, n)
}

pub fn q_pochhammer(a: f64, q: f64, n: usize) -> f64 {
    q_poch(&a, &q, n)
}
