//! Eigenvalues of real symmetric tridiagonal matrices.

use crate::error::{Error, Result};

/// Eigenvalues of the 2x2 matrix `[[a, b], [b, c]]`, larger magnitude first.
fn eig2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let sm = a + c;
    let adf = (a - c).abs();
    let ab = (b + b).abs();
    let (acmx, acmn) = if a.abs() > c.abs() { (a, c) } else { (c, a) };
    let rt = if adf > ab {
        adf * (1.0 + (ab / adf).powi(2)).sqrt()
    } else if adf < ab {
        ab * (1.0 + (adf / ab).powi(2)).sqrt()
    } else {
        ab * std::f64::consts::SQRT_2
    };
    if sm == 0.0 {
        return (0.5 * rt, -0.5 * rt);
    }
    let rt1 = if sm < 0.0 { 0.5 * (sm - rt) } else { 0.5 * (sm + rt) };
    let rt2 = (acmx / rt1) * acmn - (b / rt1) * b;
    (rt1, rt2)
}

/// Plane rotation `(c, s, r)` with `[c s; -s c] [f; g] = [r; 0]`.
fn rotation(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, g.signum(), g.abs())
    } else {
        let d = f.hypot(g);
        let r = d.copysign(f);
        (f.abs() / d, g / r, r)
    }
}

/// All eigenvalues, ascending: implicitly shifted QL/QR, then each value is
/// narrowed by bisection on Sturm counts.
///
/// QL/QR chases each unreduced block from whichever end has the smaller
/// diagonal entry. Its eigenvalues are accurate relative to the norm; the
/// bisection step carries that to accuracy relative to each eigenvalue where
/// the entries determine it, since a Sturm count is exact for a matrix whose
/// entries differ from the input by a few ulps each.
pub fn eigenvalues_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let mut ev = eigenvalues_ql(diag, offdiag)?;
    let (lo, hi) = gershgorin(diag, offdiag);
    let slack = 8.0 * diag.len() as f64 * f64::EPSILON * lo.abs().max(hi.abs());
    for (k, x) in ev.iter_mut().enumerate() {
        let mut a = *x - slack;
        let mut b = *x + slack;
        if sturm_count(diag, offdiag, a) > k {
            a = lo;
        }
        if sturm_count(diag, offdiag, b) <= k {
            b = hi;
        }
        *x = bisect(diag, offdiag, k, a, b);
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn eigenvalues_ql(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(vec![]);
    }
    if offdiag.len() + 1 != n {
        return Err(Error::MalformedTable {
            n: n - 1,
            reason: format!("{} off-diagonal entries for {n} diagonal entries", offdiag.len()),
        });
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(Error::param("diag", "matrix has non-finite entries"));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let eps = f64::EPSILON / 2.0;
    let eps2 = eps * eps;
    let safmin = f64::MIN_POSITIVE;
    let max_iter = 30 * n;
    let mut iters = 0;

    let n = n as isize;
    let mut l1: isize = 0;
    while l1 < n {
        if l1 > 0 {
            e[(l1 - 1) as usize] = 0.0;
        }
        let mut m = l1;
        while m < n - 1 {
            let mu = m as usize;
            let tst = e[mu].abs();
            if tst == 0.0 {
                break;
            }
            if tst <= d[mu].abs().sqrt() * d[mu + 1].abs().sqrt() * eps {
                e[mu] = 0.0;
                break;
            }
            m += 1;
        }
        let mut l = l1;
        let lsv = l;
        let mut lend = m;
        let lendsv = lend;
        l1 = m + 1;
        if lend == l {
            continue;
        }
        if d[lend as usize].abs() < d[l as usize].abs() {
            lend = lsv;
            l = lendsv;
        }

        if lend > l {
            // QL: deflate from the top of the block
            while l <= lend {
                let mut m = l;
                while m < lend {
                    let mu = m as usize;
                    if e[mu] * e[mu] <= (eps2 * d[mu].abs()) * d[mu + 1].abs() + safmin {
                        break;
                    }
                    m += 1;
                }
                if m < lend {
                    e[m as usize] = 0.0;
                }
                let lu = l as usize;
                let p = d[lu];
                if m == l {
                    l += 1;
                    continue;
                }
                if m == l + 1 {
                    let (rt1, rt2) = eig2(d[lu], e[lu], d[lu + 1]);
                    d[lu] = rt1;
                    d[lu + 1] = rt2;
                    e[lu] = 0.0;
                    l += 2;
                    continue;
                }
                if iters == max_iter {
                    return Err(Error::NoConvergence(iters));
                }
                iters += 1;
                let mu = m as usize;
                let mut g = (d[lu + 1] - p) / (2.0 * e[lu]);
                let r = g.hypot(1.0);
                g = d[mu] - p + e[lu] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                for i in (lu..mu).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    let (cn, sn, r) = rotation(g, f);
                    c = cn;
                    s = sn;
                    if i != mu - 1 {
                        e[i + 1] = r;
                    }
                    g = d[i + 1] - p;
                    let r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                d[lu] -= p;
                e[lu] = g;
            }
        } else {
            // QR: deflate from the bottom of the block
            while l >= lend {
                let mut m = l;
                while m > lend {
                    let mu = m as usize;
                    if e[mu - 1] * e[mu - 1] <= (eps2 * d[mu].abs()) * d[mu - 1].abs() + safmin {
                        break;
                    }
                    m -= 1;
                }
                if m > lend {
                    e[(m - 1) as usize] = 0.0;
                }
                let lu = l as usize;
                let p = d[lu];
                if m == l {
                    l -= 1;
                    continue;
                }
                if m == l - 1 {
                    let (rt1, rt2) = eig2(d[lu - 1], e[lu - 1], d[lu]);
                    d[lu - 1] = rt1;
                    d[lu] = rt2;
                    e[lu - 1] = 0.0;
                    l -= 2;
                    continue;
                }
                if iters == max_iter {
                    return Err(Error::NoConvergence(iters));
                }
                iters += 1;
                let mu = m as usize;
                let mut g = (d[lu - 1] - p) / (2.0 * e[lu - 1]);
                let r = g.hypot(1.0);
                g = d[mu] - p + e[lu - 1] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                for i in mu..lu {
                    let f = s * e[i];
                    let b = c * e[i];
                    let (cn, sn, r) = rotation(g, f);
                    c = cn;
                    s = sn;
                    if i != mu {
                        e[i - 1] = r;
                    }
                    g = d[i] - p;
                    let r = (d[i + 1] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i] = g + p;
                    g = c * r - b;
                }
                d[lu] -= p;
                e[lu - 1] = g;
            }
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues, ascending, by bisection on Sturm counts. Slow but simple;
/// used as an independent check of [`eigenvalues_tridiagonal`].
pub fn eigenvalues_bisection(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    if diag.is_empty() {
        return vec![];
    }
    let (lo, hi) = gershgorin(diag, offdiag);
    (0..diag.len()).map(|k| bisect(diag, offdiag, k, lo, hi)).collect()
}

/// Interval containing the whole spectrum, padded by an ulp.
fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { offdiag[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    (lo - pad, hi + pad)
}

/// The `k`-th eigenvalue, given `count(a) <= k < count(b)`.
fn bisect(diag: &[f64], offdiag: &[f64], k: usize, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..2200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sturm_count(diag, offdiag, mid) > k {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(eigenvalues_tridiagonal(&[2.5], &[]).unwrap(), vec![2.5]);
        assert_eq!(eigenvalues_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(eigenvalues_bisection(&[2.5], &[]), vec![2.5]);
    }

    #[test]
    fn laplacian_spectrum() {
        let n = 12;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = eigenvalues_tridiagonal(&d, &e).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn graded_matrix_keeps_relative_accuracy() {
        // diag 1, 10^-3, 10^-6, ... with tiny couplings; eigenvalues stay near the diagonal
        let n = 8;
        let d: Vec<f64> = (0..n).map(|i| 10f64.powi(-3 * i)).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| 1e-3 * 10f64.powi(-3 * i)).collect();
        let a = eigenvalues_tridiagonal(&d, &e).unwrap();
        let b = eigenvalues_bisection(&d, &e);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-13 * y.abs(), "{x} {y}");
        }
    }

    #[test]
    fn small_eigenvalue_of_a_large_matrix() {
        // [[1e8, 1e4], [1e4, 1 + 1e-8]] has eigenvalues near 1e8 + 1 and 1e-8
        let d = [1e8, 1.0 + 1e-8];
        let e = [1e4];
        let ev = eigenvalues_tridiagonal(&d, &e).unwrap();
        let small = (1e8 * (1.0 + 1e-8) - 1e8) / (1e8 + 1.0 + 1e-8 - 1e-8);
        assert!((ev[0] - small).abs() <= 1e-6 * small, "{}", ev[0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(eigenvalues_tridiagonal(&[1.0, 2.0], &[]).is_err());
        assert!(eigenvalues_tridiagonal(&[1.0, f64::NAN], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn matches_bisection_and_trace(
            d in prop::collection::vec(-10.0f64..10.0, 1..25),
            seed in prop::collection::vec(-3.0f64..3.0, 25),
        ) {
            let e: Vec<f64> = seed[..d.len() - 1].to_vec();
            let a = eigenvalues_tridiagonal(&d, &e).unwrap();
            let b = eigenvalues_bisection(&d, &e);
            let scale = d.iter().chain(&e).fold(1.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
            let tr: f64 = d.iter().sum();
            let s: f64 = a.iter().sum();
            prop_assert!((tr - s).abs() <= 1e-11 * scale * d.len() as f64);
            prop_assert!(a.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
