//! Terminating generalized and basic hypergeometric series.

use super::Scalar;
use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-9;

/// `sum_{j=0}^{m} (num)_j / (den)_j * z^j / j!`, nested from the term ratios.
pub fn hypergeometric_sum<S: Scalar>(num: &[S], den: &[S], z: &S, m: usize) -> Result<S> {
    let mut ratios = Vec::with_capacity(m);
    for j in 0..m {
        let js = S::int(j as i64);
        let mut top = z.clone();
        for a in num {
            top = top * (a.clone() + js.clone());
        }
        if top.is_zero() {
            break;
        }
        let mut bottom = S::int(j as i64 + 1);
        for b in den {
            let d = b.clone() + js.clone();
            if d.is_zero() {
                return Err(Error::VanishingDenominator(j + 1));
            }
            bottom = bottom * d;
        }
        ratios.push(top / bottom);
    }
    Ok(S::nested_sum(&ratios))
}

/// Basic hypergeometric series truncated at index `m`:
/// `sum_j (num;q)_j / (den;q)_j * ((-1)^j q^{C(j,2)})^{1+s-r} z^j / (q;q)_j`.
pub fn basic_hypergeometric_sum<S: Scalar>(
    num: &[S],
    den: &[S],
    q: &S,
    z: &S,
    m: usize,
) -> Result<S> {
    let excess = 1 + den.len() as i64 - num.len() as i64;
    let mut ratios = Vec::with_capacity(m);
    let mut qj = S::one();
    for j in 0..m {
        let mut top = z.clone();
        for a in num {
            top = top * (S::one() - a.clone() * qj.clone());
        }
        if excess != 0 {
            let sign = if excess % 2 == 0 { S::one() } else { -S::one() };
            top = top * sign * super::ipow(&qj, excess);
        }
        if top.is_zero() {
            break;
        }
        let mut bottom = S::one() - qj.clone() * q.clone();
        for b in den {
            let d = S::one() - b.clone() * qj.clone();
            if d.is_zero() {
                return Err(Error::VanishingDenominator(j + 1));
            }
            bottom = bottom * d;
        }
        ratios.push(top / bottom);
        qj = qj * q.clone();
    }
    Ok(S::nested_sum(&ratios))
}

fn nonpositive_integer(a: f64) -> Option<usize> {
    let r = a.round();
    (r <= 0.0 && (a - r).abs() <= INT_TOL).then(|| (-r) as usize)
}

fn q_power_index(a: f64, q: f64) -> Option<usize> {
    if a < 1.0 - INT_TOL {
        return None;
    }
    let m = -(a.ln()) / q.ln();
    let r = m.round();
    let close = (m - r).abs() <= INT_TOL && (a - q.powi(-(r as i32))).abs() <= INT_TOL * a;
    (r >= 0.0 && close).then_some(r as usize)
}

/// Terminating `rFs(num; den | z)` in double precision.
///
/// The series length is set by the smallest `m` with `-m` among the numerator
/// parameters.
pub fn hypergeometric_terminating(num: &[f64], den: &[f64], z: f64) -> Result<f64> {
    let m = num
        .iter()
        .filter_map(|&a| nonpositive_integer(a))
        .min()
        .ok_or(Error::NonTerminating)?;
    let num: Vec<f64> = num
        .iter()
        .map(|&a| match nonpositive_integer(a) {
            Some(k) => -(k as f64),
            None => a,
        })
        .collect();
    hypergeometric_sum(&num, den, &z, m)
}

/// Terminating `rphis(num; den | q; z)` in double precision; one numerator
/// parameter must equal `q^{-m}` for a nonnegative integer `m`.
pub fn basic_hypergeometric_terminating(num: &[f64], den: &[f64], q: f64, z: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param("q", format!("{q} is outside (0, 1)")));
    }
    let m = num
        .iter()
        .filter_map(|&a| q_power_index(a, q))
        .min()
        .ok_or(Error::NonTerminating)?;
    basic_hypergeometric_sum(num, den, &q, &z, m)
}

pub fn basic_hypergeometric_3phi2(num: [f64; 3], den: [f64; 2], q: f64, z: f64) -> Result<f64> {
    basic_hypergeometric_terminating(&num, &den, q, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::Exact;
    use proptest::prelude::*;

    #[test]
    fn zero_numerator_gives_one() {
        assert_eq!(hypergeometric_terminating(&[0.0, 2.5], &[1.5], 3.0).unwrap(), 1.0);
    }

    #[test]
    fn two_term_expansion() {
        let (l, n, p) = (3.0, 7.0, 0.3);
        let v = hypergeometric_terminating(&[-1.0, -l], &[-n], 1.0 / p).unwrap();
        assert!((v - (1.0 - l / (n * p))).abs() < 1e-14);
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        let e = hypergeometric_terminating(&[-3.0], &[-1.0], 1.0).unwrap_err();
        assert_eq!(e, Error::VanishingDenominator(2));
    }

    #[test]
    fn non_terminating_is_rejected() {
        assert_eq!(
            hypergeometric_terminating(&[0.5], &[1.0], 0.2),
            Err(Error::NonTerminating)
        );
        assert_eq!(
            basic_hypergeometric_3phi2([0.5, 0.2, 0.3], [0.1, 0.2], 0.5, 0.5),
            Err(Error::NonTerminating)
        );
    }

    #[test]
    fn basic_series_with_unit_parameter_is_one() {
        let v = basic_hypergeometric_3phi2([1.0, 4.0, -0.3], [0.2, 8.0], 0.5, 0.5).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn basic_series_m_zero() {
        let v = basic_hypergeometric_3phi2([1.0, 1.0, 1.0], [0.4, 0.1], 0.7, 0.7).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn basic_series_matches_direct_sum() {
        // 3phi2(q^-2, a, b; c, d | q; z) written out term by term
        let (q, a, b, c, d, z) = (0.5_f64, 0.3, -0.7, 0.2, 0.9, 0.5);
        let t1 = (1.0 - q.powi(-2)) * (1.0 - a) * (1.0 - b) / ((1.0 - c) * (1.0 - d) * (1.0 - q)) * z;
        let t2 = t1 * (1.0 - q.powi(-2) * q) * (1.0 - a * q) * (1.0 - b * q)
            / ((1.0 - c * q) * (1.0 - d * q) * (1.0 - q * q))
            * z;
        let v = basic_hypergeometric_3phi2([q.powi(-2), a, b], [c, d], q, z).unwrap();
        assert!((v - (1.0 + t1 + t2)).abs() < 1e-14 * (1.0 + t1.abs() + t2.abs()));
    }

    #[test]
    fn general_excess_factor() {
        // 1phi1(q^-1; c | q; z) = 1 + (1-q^-1)/((1-c)(1-q)) * (-1) * q^0 * z
        let (q, c, z) = (0.4_f64, 0.25, 0.8);
        let v = basic_hypergeometric_terminating(&[1.0 / q], &[c], q, z).unwrap();
        let want = 1.0 - (1.0 - 1.0 / q) / ((1.0 - c) * (1.0 - q)) * z;
        assert!((v - want).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn terms_past_termination_vanish(m in 0usize..8, extra in 1usize..6, b in 0.1f64..3.0, c in 0.1f64..3.0, z in -2.0f64..2.0) {
            let num = [-(m as f64), b];
            let den = [c];
            let short = hypergeometric_sum(&num, &den, &z, m).unwrap();
            let long = hypergeometric_sum(&num, &den, &z, m + extra).unwrap();
            prop_assert_eq!(short, long);
        }

        #[test]
        fn q_terms_past_termination_vanish(m in 0usize..8, extra in 1usize..6, a in 0.1f64..0.9, c in 0.05f64..0.9) {
            let q = Exact::param(0.5);
            let qm = crate::polynomials::ipow(&q, -(m as i64));
            let num = [qm, Exact::param(a), Exact::param(-a)];
            let den = [Exact::param(c), Exact::param(0.0)];
            let short = basic_hypergeometric_sum(&num, &den, &q, &q, m).unwrap();
            let long = basic_hypergeometric_sum(&num, &den, &q, &q, m + extra).unwrap();
            prop_assert_eq!(short, long);
        }
    }
}
