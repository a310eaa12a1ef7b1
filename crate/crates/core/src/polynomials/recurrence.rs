//! Polynomials generated by the three-term recurrence of a Jacobi operator.

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use super::{Exact, Scalar};
use crate::error::{Error, Result};
use crate::hamiltonian::JacobiOperator;

/// Exact binary rational `m * 2^e`; closed under `+`, `-` and `*`.
#[derive(Debug, Clone)]
struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn from_f64(x: f64) -> Self {
        let (mantissa, exp, sign) = x.integer_decode();
        Dyadic { m: BigInt::from(mantissa) * sign, e: exp as i64 }
    }

    fn one() -> Self {
        Dyadic { m: BigInt::from(1), e: 0 }
    }

    fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    fn sub(&self, o: &Dyadic) -> Dyadic {
        if o.m.is_zero() {
            return self.clone();
        }
        if self.m.is_zero() {
            return Dyadic { m: -&o.m, e: o.e };
        }
        let e = self.e.min(o.e);
        Dyadic { m: (&self.m << (self.e - e)) - (&o.m << (o.e - e)), e }
    }

    /// Leading bits as `(f, k)` with `self ~ f * 2^k`.
    fn split(&self) -> (f64, i64) {
        let drop = (self.m.bits() as i64 - 60).max(0);
        let f = (&self.m >> drop).to_f64().expect("at most 60 bits");
        (f, self.e + drop)
    }

    /// `self / o`, rounded once (up to the truncation of both to 60 bits).
    fn ratio(&self, o: &Dyadic) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let (a, ka) = self.split();
        let (b, kb) = o.split();
        let mut r = a / b;
        let mut k = ka - kb;
        while k != 0 {
            let step = k.clamp(-1000, 1000);
            r *= 2f64.powi(step as i32);
            k -= step;
            if r == 0.0 || r.is_infinite() {
                break;
            }
        }
        r
    }
}

/// `P_0..P_N` at `e` for the operator in its real gauge (off-diagonal
/// `|b_n|`), from `P_0 = 1` and
/// `e P_n = |b_{n-1}| P_{n-1} + a_n P_n + |b_n| P_{n+1}`.
///
/// Multiply by `exp(i chi_n)` (see [`crate::hamiltonian::gauge_real`]) for the
/// polynomials of the complex operator.
pub fn recurrence_eval(j: &JacobiOperator, e: f64) -> Result<Vec<f64>> {
    recurrence_eval_real(&j.diag, &j.offdiag_mag, e)
}

///
/// The recurrence is run exactly on the binary values of the inputs, through
/// `Q_n = P_n b_0 ... b_{n-1}` with `Q_{n+1} = (e - a_n) Q_n - b_{n-1}^2 Q_{n-1}`,
/// and each `P_n` is rounded once. Plain floating-point forward recurrence
/// loses all accuracy on graded operators.
pub fn recurrence_eval_real(diag: &[f64], off: &[f64], e: f64) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    if !e.is_finite() || diag.iter().any(|a| !a.is_finite()) {
        return Err(Error::param("E", "recurrence inputs must be finite"));
    }
    let e = Dyadic::from_f64(e);
    let mut p = Vec::with_capacity(diag.len());
    p.push(1.0);
    let mut scale = Dyadic::one();
    let (mut prev, mut cur) = (Dyadic { m: BigInt::zero(), e: 0 }, Dyadic::one());
    for n in 0..off.len() {
        let b = Dyadic::from_f64(off[n]);
        let mut next = e.sub(&Dyadic::from_f64(diag[n])).mul(&cur);
        if n > 0 {
            let bp = Dyadic::from_f64(off[n - 1]);
            next = next.sub(&bp.mul(&bp).mul(&prev));
        }
        scale = scale.mul(&b);
        p.push(next.ratio(&scale));
        prev = cur;
        cur = next;
    }
    Ok(p)
}

/// `P_0..P_N` at `e` from exact diagonal entries and exact squared
/// off-diagonals, rounded once per entry. Needed wherever `P_n(e)` is too
/// sensitive to `e` and the coefficients for double-precision inputs, as for
/// the q-families.
pub fn recurrence_exact(diag: &[Exact], off_sq: &[Exact], e: &Exact) -> Result<Vec<f64>> {
    if diag.is_empty() || off_sq.len() + 1 != diag.len() {
        return Err(Error::MalformedTable {
            n: diag.len().saturating_sub(1),
            reason: format!("{} diagonal and {} off-diagonal entries", diag.len(), off_sq.len()),
        });
    }
    if let Some(n) = off_sq.iter().position(|b| !b.is_positive()) {
        return Err(Error::VanishingCoupling(n));
    }
    let mut p = vec![1.0];
    let mut norm_sq = Exact::one();
    let (mut prev, mut cur) = (Exact::zero(), Exact::one());
    for n in 0..off_sq.len() {
        let mut next = (e - &diag[n]) * &cur;
        if n > 0 {
            next -= &off_sq[n - 1] * &prev;
        }
        norm_sq *= &off_sq[n];
        let mag = (&next * &next / &norm_sq).approx().sqrt();
        p.push(if next.is_negative() { -mag } else { mag });
        prev = cur;
        cur = next;
    }
    Ok(p)
}

fn check_shape(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(Error::MalformedTable {
            n: diag.len().saturating_sub(1),
            reason: format!("{} diagonal and {} off-diagonal entries", diag.len(), off.len()),
        });
    }
    if let Some(n) = off.iter().position(|&b| b == 0.0 || !b.is_finite()) {
        return Err(Error::VanishingCoupling(n));
    }
    Ok(())
}

/// Same polynomials as [`recurrence_eval_real`], for `e` an eigenvalue.
///
/// Running the recurrence forward from `P_0` amplifies rounding by the ratio
/// of the largest to the smallest eigenvector entry, which is enormous for the
/// graded matrices of the q-families. Here the eigenvector is built outward
/// from the row where forward and backward elimination meet best (a twisted
/// factorization), then scaled so `P_0 = 1`.
pub fn recurrence_eval_at_eigenvalue(diag: &[f64], off: &[f64], e: f64) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    let n = diag.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let scale = diag.iter().chain(off).fold(e.abs(), |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale * 1e-3;
    let guard = |d: f64| if d == 0.0 { tiny } else { d };

    let mut fwd = vec![0.0; n];
    fwd[0] = guard(diag[0] - e);
    for k in 1..n {
        fwd[k] = guard(diag[k] - e - off[k - 1] * off[k - 1] / fwd[k - 1]);
    }
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = guard(diag[n - 1] - e);
    for k in (0..n - 1).rev() {
        bwd[k] = guard(diag[k] - e - off[k] * off[k] / bwd[k + 1]);
    }
    let twist = (0..n)
        .min_by(|&a, &b| {
            let ga = (fwd[a] + bwd[a] - (diag[a] - e)).abs();
            let gb = (fwd[b] + bwd[b] - (diag[b] - e)).abs();
            ga.total_cmp(&gb)
        })
        .unwrap_or(0);

    let mut v = vec![0.0; n];
    v[twist] = 1.0;
    for k in (0..twist).rev() {
        v[k] = -off[k] * v[k + 1] / fwd[k];
    }
    for k in twist + 1..n {
        v[k] = -off[k - 1] * v[k - 1] / bwd[k];
    }
    let v0 = v[0];
    Ok(v.into_iter().map(|x| x / v0).collect())
}
