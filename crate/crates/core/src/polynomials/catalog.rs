//! The nine exactly solvable single-photon conversion families.
//!
//! For each family the catalog knows the diagonal `h(x, y)` and the squared
//! shift coefficient `b^2(x, y) = |g(x, y)|^2 (x+1) y` as functions of the two
//! occupation numbers, the closed-form spectrum, the orthogonality weight and
//! the closed-form polynomials. Coefficients and closed forms are evaluated in
//! exact rational arithmetic and rounded once.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{
    basic_hypergeometric_sum, hypergeometric_sum, ipow, poch, q_poch, recurrence_exact, Exact, Scalar,
};
use crate::error::{Error, Result};

pub const FAMILY_NAMES: [&str; 9] = [
    "krawtchouk",
    "dual_hahn",
    "chebyshev",
    "hahn",
    "dual_q_hahn",
    "affine_q_krawtchouk",
    "q_krawtchouk",
    "q_hahn",
    "dual_q_krawtchouk",
];

/// A catalog family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub enum Family {
    Krawtchouk { p: f64 },
    DualHahn { gamma: f64, delta: f64 },
    Chebyshev,
    Hahn { alpha: f64, beta: f64 },
    DualQHahn { q: f64, gamma: f64, delta: f64 },
    AffineQKrawtchouk { q: f64, p: f64 },
    QKrawtchouk { q: f64, p: f64 },
    QHahn { q: f64, alpha: f64, beta: f64 },
    DualQKrawtchouk { q: f64, c: f64 },
}

pub type FamilyDescriptor = Family;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct FamilyJson {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl TryFrom<FamilyJson> for Family {
    type Error = Error;

    fn try_from(j: FamilyJson) -> Result<Self> {
        Family::from_params(&j.name, &j.params)
    }
}

impl From<Family> for FamilyJson {
    fn from(f: Family) -> Self {
        FamilyJson {
            name: f.name().to_string(),
            params: f.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

fn open(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if x.is_finite() && x > lo && x < hi {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} is outside ({lo}, {hi})")))
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Krawtchouk { .. } => "krawtchouk",
            Family::DualHahn { .. } => "dual_hahn",
            Family::Chebyshev => "chebyshev",
            Family::Hahn { .. } => "hahn",
            Family::DualQHahn { .. } => "dual_q_hahn",
            Family::AffineQKrawtchouk { .. } => "affine_q_krawtchouk",
            Family::QKrawtchouk { .. } => "q_krawtchouk",
            Family::QHahn { .. } => "q_hahn",
            Family::DualQKrawtchouk { .. } => "dual_q_krawtchouk",
        }
    }

    pub fn param_names(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "krawtchouk" => &["p"],
            "dual_hahn" => &["gamma", "delta"],
            "chebyshev" => &[],
            "hahn" => &["alpha", "beta"],
            "dual_q_hahn" => &["q", "gamma", "delta"],
            "affine_q_krawtchouk" => &["q", "p"],
            "q_krawtchouk" => &["q", "p"],
            "q_hahn" => &["q", "alpha", "beta"],
            "dual_q_krawtchouk" => &["q", "c"],
            _ => return None,
        })
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Family::Krawtchouk { p } => vec![("p", p)],
            Family::DualHahn { gamma, delta } => vec![("gamma", gamma), ("delta", delta)],
            Family::Chebyshev => vec![],
            Family::Hahn { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            Family::DualQHahn { q, gamma, delta } => {
                vec![("q", q), ("gamma", gamma), ("delta", delta)]
            }
            Family::AffineQKrawtchouk { q, p } | Family::QKrawtchouk { q, p } => {
                vec![("q", q), ("p", p)]
            }
            Family::QHahn { q, alpha, beta } => vec![("q", q), ("alpha", alpha), ("beta", beta)],
            Family::DualQKrawtchouk { q, c } => vec![("q", q), ("c", c)],
        }
    }

    /// Builds a family from its name and a parameter map. Unknown or missing
    /// parameters are reported by name.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let names = Family::param_names(name).ok_or_else(|| {
            Error::param(
                "name",
                format!("unknown family `{name}`; expected one of {}", FAMILY_NAMES.join(", ")),
            )
        })?;
        if let Some(extra) = params.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(Error::param(extra, format!("not a parameter of `{name}`")));
        }
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::param(k, format!("required by `{name}`")))
        };
        let f = match name {
            "krawtchouk" => Family::Krawtchouk { p: get("p")? },
            "dual_hahn" => Family::DualHahn { gamma: get("gamma")?, delta: get("delta")? },
            "chebyshev" => Family::Chebyshev,
            "hahn" => Family::Hahn { alpha: get("alpha")?, beta: get("beta")? },
            "dual_q_hahn" => Family::DualQHahn {
                q: get("q")?,
                gamma: get("gamma")?,
                delta: get("delta")?,
            },
            "affine_q_krawtchouk" => Family::AffineQKrawtchouk { q: get("q")?, p: get("p")? },
            "q_krawtchouk" => Family::QKrawtchouk { q: get("q")?, p: get("p")? },
            "q_hahn" => Family::QHahn {
                q: get("q")?,
                alpha: get("alpha")?,
                beta: get("beta")?,
            },
            "dual_q_krawtchouk" => Family::DualQKrawtchouk { q: get("q")?, c: get("c")? },
            _ => unreachable!(),
        };
        f.validate()?;
        Ok(f)
    }

    /// Checks the parameter domain of the family.
    pub fn validate(&self) -> Result<()> {
        let inf = f64::INFINITY;
        match *self {
            Family::Krawtchouk { p } => open("p", p, 0.0, 1.0),
            Family::DualHahn { gamma, delta } => {
                open("gamma", gamma, -1.0, inf)?;
                open("delta", delta, -1.0, inf)
            }
            Family::Chebyshev => Ok(()),
            Family::Hahn { alpha, beta } => {
                open("alpha", alpha, -1.0, inf)?;
                open("beta", beta, -1.0, inf)
            }
            Family::DualQHahn { q, gamma, delta } => {
                open("q", q, 0.0, 1.0)?;
                open("gamma", gamma, 0.0, 1.0 / q)?;
                open("delta", delta, 0.0, 1.0 / q)?;
                if gamma * delta >= 1.0 / q {
                    return Err(Error::param(
                        "gamma",
                        format!("gamma*delta = {} must be below 1/q", gamma * delta),
                    ));
                }
                Ok(())
            }
            Family::AffineQKrawtchouk { q, p } => {
                open("q", q, 0.0, 1.0)?;
                open("p", p, 0.0, 1.0 / q)
            }
            Family::QKrawtchouk { q, p } => {
                open("q", q, 0.0, 1.0)?;
                open("p", p, 0.0, inf)
            }
            Family::QHahn { q, alpha, beta } => {
                open("q", q, 0.0, 1.0)?;
                open("alpha", alpha, 0.0, 1.0 / q)?;
                open("beta", beta, 0.0, 1.0 / q)
            }
            Family::DualQKrawtchouk { q, c } => {
                open("q", q, 0.0, 1.0)?;
                open("c", c, -inf, 0.0)
            }
        }
    }

    /// Families whose spectrum grows like `q^{-N}`.
    pub fn is_q_family(&self) -> bool {
        matches!(
            self,
            Family::DualQHahn { .. }
                | Family::AffineQKrawtchouk { .. }
                | Family::QKrawtchouk { .. }
                | Family::QHahn { .. }
                | Family::DualQKrawtchouk { .. }
        )
    }

    /// Parameter points used by the verification suites. q-families are
    /// sampled at every combination of `q in {0.3, 0.5, 0.8}` with three
    /// points of the remaining parameters; all points lie inside the domain.
    pub fn sample_grid(name: &str) -> Option<Vec<Family>> {
        const QS: [f64; 3] = [0.3, 0.5, 0.8];
        let per_q = |f: &dyn Fn(f64) -> [Family; 3]| QS.iter().flat_map(|&q| f(q)).collect::<Vec<_>>();
        Some(match name {
            "krawtchouk" => [0.2, 0.5, 0.8].map(|p| Family::Krawtchouk { p }).to_vec(),
            "dual_hahn" => [(0.0, 0.0), (1.0, 0.5), (-0.5, 2.0)]
                .map(|(gamma, delta)| Family::DualHahn { gamma, delta })
                .to_vec(),
            "chebyshev" => vec![Family::Chebyshev],
            "hahn" => [(0.0, 0.0), (0.5, 1.5), (-0.5, -0.5)]
                .map(|(alpha, beta)| Family::Hahn { alpha, beta })
                .to_vec(),
            "dual_q_hahn" => per_q(&|q| {
                [(0.5, 0.5), (1.0, 1.1), (0.2, 1.2)].map(|(gamma, delta)| Family::DualQHahn { q, gamma, delta })
            }),
            "affine_q_krawtchouk" => per_q(&|q| [0.2, 0.7, 1.2].map(|p| Family::AffineQKrawtchouk { q, p })),
            "q_krawtchouk" => per_q(&|q| [0.1, 1.0, 5.0].map(|p| Family::QKrawtchouk { q, p })),
            "q_hahn" => per_q(&|q| {
                [(0.5, 0.5), (1.2, 0.3), (0.9, 1.1)].map(|(alpha, beta)| Family::QHahn { q, alpha, beta })
            }),
            "dual_q_krawtchouk" => per_q(&|q| [-0.5, -1.0, -3.0].map(|c| Family::DualQKrawtchouk { q, c })),
            _ => return None,
        })
    }

    fn q<S: Scalar>(&self) -> S {
        match *self {
            Family::DualQHahn { q, .. }
            | Family::AffineQKrawtchouk { q, .. }
            | Family::QKrawtchouk { q, .. }
            | Family::QHahn { q, .. }
            | Family::DualQKrawtchouk { q, .. } => S::param(q),
            _ => S::one(),
        }
    }

    /// Diagonal coupling `h(x, y)` at occupations `(x, y)`, `x, y >= 0`.
    pub fn h<S: Scalar>(&self, x: i64, y: i64) -> S {
        let one = S::one();
        let xs = S::int(x);
        let ys = S::int(y);
        let q: S = self.q();
        let qp = |e: i64| ipow(&q, e);
        match *self {
            Family::Krawtchouk { p } => {
                let p = S::param(p);
                p.clone() * ys + (one - p) * xs
            }
            Family::DualHahn { gamma, delta } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                xs.clone() * (ys.clone() + d + one.clone()) + (xs + g + one) * ys
            }
            Family::Chebyshev => {
                let two = S::int(2);
                let num = (two.clone() * xs.clone() + ys.clone() + one.clone()) * xs.clone()
                    + (xs.clone() + one.clone()) * ys;
                num / (two.clone() * (two * xs + one))
            }
            Family::Hahn { alpha, beta } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                let s = a.clone() + b.clone();
                let two = S::int(2);
                let tx = two.clone() * xs.clone() + s.clone();
                let t1 = if x == 0 {
                    S::zero()
                } else {
                    xs.clone() * (tx.clone() + ys.clone() + one.clone()) * (xs.clone() + b)
                        / (tx.clone() * (tx.clone() + one.clone()))
                };
                let t2 = if x == 0 {
                    (a + one) * ys / (s + two)
                } else {
                    (xs.clone() + a + one.clone()) * (xs + s + one.clone()) * ys
                        / ((tx.clone() + one) * (tx + two))
                };
                t1 + t2
            }
            Family::DualQHahn { gamma, delta, .. } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                one.clone() + g.clone() * d.clone() * q.clone()
                    - g.clone() * q.clone() * (one.clone() - qp(x)) * (d - qp(-y - 1))
                    - (one.clone() - qp(-y)) * (one - g * qp(x + 1))
            }
            Family::AffineQKrawtchouk { p, .. } => {
                let p = S::param(p);
                one.clone()
                    - ((one.clone() - qp(-y)) * (one.clone() - p.clone() * qp(x + 1))
                        - p * qp(-y) * (one - qp(x)))
            }
            Family::QKrawtchouk { p, .. } => {
                let p = S::param(p);
                let a = (one.clone() - qp(-y)) * (one.clone() + p.clone() * qp(x))
                    / ((one.clone() + p.clone() * qp(2 * x)) * (one.clone() + p.clone() * qp(2 * x + 1)));
                let b = p.clone() * qp(x - y - 1) * (one.clone() + p.clone() * qp(2 * x + y))
                    * (one.clone() - qp(x))
                    / ((one.clone() + p.clone() * qp(2 * x - 1)) * (one.clone() + p * qp(2 * x)));
                one - a + b
            }
            Family::QHahn { alpha, beta, .. } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                let ab = a.clone() * b.clone();
                let t1 = if x == 0 {
                    S::zero()
                } else {
                    a.clone() * qp(-y) * (one.clone() - qp(x))
                        * (one.clone() - ab.clone() * qp(2 * x + y + 1))
                        * (one.clone() - b * qp(x))
                        / ((one.clone() - ab.clone() * qp(2 * x))
                            * (one.clone() - ab.clone() * qp(2 * x + 1)))
                };
                let rat = if x == 0 {
                    one.clone()
                } else {
                    (one.clone() - ab.clone() * qp(x + 1)) / (one.clone() - ab.clone() * qp(2 * x + 1))
                };
                let t2 = (one.clone() - qp(-y)) * (one.clone() - a * qp(x + 1)) * rat
                    / (one.clone() - ab * qp(2 * x + 2));
                one + t1 - t2
            }
            Family::DualQKrawtchouk { c, .. } => (one + S::param(c)) * qp(-y),
        }
    }

    /// `|g(x, y)|^2 (x+1) y`: the squared shift coefficient between
    /// `|x, y>` and `|x+1, y-1>`. Defined for `x, y >= 0`.
    pub fn shift_sq<S: Scalar>(&self, x: i64, y: i64) -> S {
        let one = S::one();
        let xs = S::int(x);
        let ys = S::int(y);
        let q: S = self.q();
        let qp = |e: i64| ipow(&q, e);
        let occ = (xs.clone() + one.clone()) * ys.clone();
        match *self {
            Family::Krawtchouk { p } => {
                let p = S::param(p);
                p.clone() * (one - p) * occ
            }
            Family::DualHahn { gamma, delta } => {
                (ys + S::param(delta)) * (xs + S::param(gamma) + one) * occ
            }
            Family::Chebyshev => {
                let two = S::int(2);
                (two.clone() * xs.clone() + ys + two.clone()) * (xs.clone() + one.clone()) * occ
                    / (S::int(4)
                        * (two.clone() * xs.clone() + one)
                        * (two * xs + S::int(3)))
            }
            Family::Hahn { alpha, beta } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                let s = a.clone() + b.clone();
                let two = S::int(2);
                let tx = two.clone() * xs.clone() + s.clone();
                let rat = if x == 0 {
                    one.clone()
                } else {
                    (xs.clone() + s.clone() + one.clone()) / (tx.clone() + one.clone())
                };
                let d = tx.clone() + two.clone();
                (tx.clone() + ys + two) * (xs.clone() + b + one.clone()) * (xs + a + one) * rat * occ
                    / (d.clone() * d * (tx + S::int(3)))
            }
            Family::DualQHahn { gamma, delta, .. } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                g.clone() * q.clone() * (one.clone() - qp(-y)) * (one.clone() - g * qp(x + 1))
                    * (one - qp(x + 1))
                    * (d - qp(-y))
            }
            Family::AffineQKrawtchouk { p, .. } => {
                let p = S::param(p);
                -(p.clone() * qp(1 - y) * (one.clone() - qp(x + 1)) * (one.clone() - qp(-y))
                    * (one - p * qp(x + 1)))
            }
            Family::QKrawtchouk { p, .. } => {
                let p = S::param(p);
                let d1 = one.clone() + p.clone() * qp(2 * x + 1);
                -(p.clone() * qp(x - y + 1) * (one.clone() + p.clone() * qp(2 * x + y + 1))
                    * (one.clone() - qp(x + 1))
                    * (one.clone() - qp(-y))
                    * (one.clone() + p.clone() * qp(x)))
                    / ((one.clone() + p.clone() * qp(2 * x)) * d1.clone() * d1 * (one + p * qp(2 * x + 2)))
            }
            Family::QHahn { alpha, beta, .. } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                let ab = a.clone() * b.clone();
                let rat = if x == 0 {
                    one.clone()
                } else {
                    (one.clone() - ab.clone() * qp(x + 1)) / (one.clone() - ab.clone() * qp(2 * x + 1))
                };
                let d = one.clone() - ab.clone() * qp(2 * x + 2);
                -(a.clone() * qp(1 - y) * (one.clone() - qp(x + 1))
                    * (one.clone() - ab.clone() * qp(2 * x + y + 2))
                    * (one.clone() - b * qp(x + 1))
                    * (one.clone() - qp(-y))
                    * (one.clone() - a * qp(x + 1))
                    * rat)
                    / (d.clone() * d * (one - ab * qp(2 * x + 3)))
            }
            Family::DualQKrawtchouk { c, .. } => {
                S::param(c) * qp(-(x + y)) * (one.clone() - qp(-y)) * (one - qp(x + 1))
            }
        }
    }

    /// `|g(x, y)|^2` for `x >= 0, y >= 1`.
    pub fn coupling_sq<S: Scalar>(&self, x: i64, y: i64) -> Result<S> {
        if x < 0 || y < 1 {
            return Err(Error::param("n1", format!("coupling needs x >= 0, y >= 1, got ({x}, {y})")));
        }
        Ok(self.shift_sq::<S>(x, y) / (S::int(x + 1) * S::int(y)))
    }

    /// Exact Jacobi data `(a_n, |b_n|^2)` of sector level `n_level`.
    pub fn jacobi_coefficients_exact(&self, n_level: usize) -> Result<(Vec<Exact>, Vec<Exact>)> {
        let big_n = n_level as i64;
        let diag = (0..=big_n).map(|x| self.h::<Exact>(x, big_n - x)).collect();
        let mut off = Vec::with_capacity(n_level);
        for x in 0..big_n {
            let b2 = self.shift_sq::<Exact>(x, big_n - x);
            if b2.is_negative() {
                return Err(Error::NegativeRadicand { context: "shift coefficient", value: b2.approx() });
            }
            off.push(b2);
        }
        Ok((diag, off))
    }

    /// Jacobi data `(a_n, |b_n|)` of sector level `n_level`, rounded once from
    /// exact values.
    pub fn jacobi_coefficients(&self, n_level: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (diag, off) = self.jacobi_coefficients_exact(n_level)?;
        Ok((diag.iter().map(Scalar::approx).collect(), off.iter().map(|b2| b2.approx().sqrt()).collect()))
    }

    /// Recurrence polynomials `P_0..P_N` at the closed-form eigenvalue `E_l`,
    /// with coefficients and eigenvalue kept exact.
    pub fn recurrence_at_spectrum(&self, l: usize, n_level: usize) -> Result<Vec<f64>> {
        check_index(l, n_level)?;
        let (diag, off_sq) = self.jacobi_coefficients_exact(n_level)?;
        recurrence_exact(&diag, &off_sq, &self.spectrum_exact::<Exact>(l, n_level))
    }

    pub fn spectrum_exact<S: Scalar>(&self, l: usize, n_level: usize) -> S {
        let (l, big_n) = (l as i64, n_level as i64);
        let ls = S::int(l);
        let q: S = self.q();
        match *self {
            Family::Krawtchouk { .. } | Family::Chebyshev | Family::Hahn { .. } => ls,
            Family::DualHahn { gamma, delta } => {
                ls.clone() * (ls + S::param(gamma) + S::param(delta) + S::one())
            }
            Family::DualQHahn { gamma, delta, .. } => {
                ipow(&q, -l) + S::param(gamma) * S::param(delta) * ipow(&q, l + 1)
            }
            Family::AffineQKrawtchouk { .. } | Family::QKrawtchouk { .. } | Family::QHahn { .. } => {
                ipow(&q, -l)
            }
            Family::DualQKrawtchouk { c, .. } => ipow(&q, -l) + S::param(c) * ipow(&q, l - big_n),
        }
    }

    /// Closed-form eigenvalue `E_l` of sector level `n_level`.
    pub fn spectrum(&self, l: usize, n_level: usize) -> Result<f64> {
        check_index(l, n_level)?;
        Ok(self.spectrum_exact::<Exact>(l, n_level).approx())
    }

    /// Orthogonality weight in its natural (unnormalized) form.
    pub fn weight_exact<S: Scalar>(&self, l: usize, n_level: usize) -> S {
        let one = S::one();
        let (li, ni) = (l as i64, n_level as i64);
        let q: S = self.q();
        let qp = |e: i64| ipow(&q, e);
        let fact = |k: usize| poch(&S::one(), k);
        match *self {
            Family::Krawtchouk { p } => {
                let p = S::param(p);
                binomial::<S>(n_level, l) * ipow(&p, li) * ipow(&(one - p), ni - li)
            }
            Family::DualHahn { gamma, delta } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                let ls = S::int(li);
                (S::int(2) * ls.clone() + g.clone() + d.clone() + one.clone())
                    * poch(&(g.clone() + one.clone()), l)
                    * poch(&S::int(ni - li + 1), l)
                    * fact(n_level)
                    / (poch(&(ls + g + d.clone() + one.clone()), n_level + 1)
                        * poch(&(d + one), l)
                        * fact(l))
            }
            Family::Chebyshev => one,
            Family::Hahn { alpha, beta } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                poch(&(a + one.clone()), l) / fact(l) * poch(&(b + one), n_level - l)
                    / fact(n_level - l)
            }
            Family::DualQHahn { gamma, delta, .. } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                let gd = g.clone() * d.clone();
                q_poch(&(g.clone() * q.clone()), &q, l)
                    * q_ratio_factor(&(gd.clone() * q.clone()), &q, l)
                    * q_poch(&qp(-ni), &q, l)
                    * qp(ni * li - li * (li - 1) / 2)
                    / (q_poch(&q, &q, l)
                        * q_poch(&(gd * qp(ni + 2)), &q, l)
                        * q_poch(&(d * q.clone()), &q, l)
                        * ipow(&(-(g * q.clone())), li))
            }
            Family::AffineQKrawtchouk { p, .. } => {
                let pq = S::param(p) * q.clone();
                q_poch(&pq, &q, l) * q_poch(&q, &q, n_level)
                    / (q_poch(&q, &q, l) * q_poch(&q, &q, n_level - l))
                    * ipow(&pq, -li)
            }
            Family::QKrawtchouk { p, .. } => {
                q_poch(&qp(-ni), &q, l) / q_poch(&q, &q, l) * ipow(&(-S::param(p)), -li)
            }
            Family::QHahn { alpha, beta, .. } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                q_poch(&(a.clone() * q.clone()), &q, l) * q_poch(&qp(-ni), &q, l)
                    / (q_poch(&q, &q, l) * q_poch(&(qp(-ni) / b.clone()), &q, l))
                    * ipow(&(a * b * q.clone()), -li)
            }
            Family::DualQKrawtchouk { c, .. } => {
                let c = S::param(c);
                q_poch(&(c.clone() * qp(-ni)), &q, l)
                    * q_ratio_factor_shifted(&c, &q, l, ni)
                    * q_poch(&qp(-ni), &q, l)
                    / (q_poch(&q, &q, l) * q_poch(&(c.clone() * q.clone()), &q, l))
                    * ipow(&c, -li)
                    * qp(li * (2 * ni - li))
            }
        }
    }

    pub fn weight(&self, l: usize, n_level: usize) -> Result<f64> {
        check_index(l, n_level)?;
        Ok(self.weight_exact::<Exact>(l, n_level).approx())
    }

    /// Weights rescaled to sum to one over the sector.
    pub fn weights_normalized(&self, n_level: usize) -> Vec<f64> {
        let raw: Vec<Exact> = (0..=n_level).map(|l| self.weight_exact::<Exact>(l, n_level)).collect();
        let total = raw.iter().fold(Exact::from_integer(0.into()), |acc, w| acc + w);
        raw.into_iter().map(|w| (w / total.clone()).approx()).collect()
    }

    pub fn weight_normalized(&self, l: usize, n_level: usize) -> Result<f64> {
        check_index(l, n_level)?;
        Ok(self.weights_normalized(n_level)[l])
    }

    /// Quantity under the square root of the orthonormal closed form at degree `n`.
    pub fn radicand<S: Scalar>(&self, n: usize, n_level: usize) -> S {
        let one = S::one();
        let (ni, bn) = (n as i64, n_level as i64);
        let q: S = self.q();
        let qp = |e: i64| ipow(&q, e);
        let fact = |k: usize| poch(&S::one(), k);
        match *self {
            Family::Krawtchouk { p } => {
                let p = S::param(p);
                poch(&S::int(bn - ni + 1), n) / fact(n) * ipow(&(p.clone() / (one - p)), ni)
            }
            Family::DualHahn { gamma, delta } => {
                poch(&(S::param(gamma) + one.clone()), n) / fact(n)
                    * poch(&(S::param(delta) + one), n_level - n)
                    / fact(n_level - n)
            }
            Family::Chebyshev => hahn_radicand(&S::zero(), &S::zero(), n, n_level),
            Family::Hahn { alpha, beta } => {
                hahn_radicand(&S::param(alpha), &S::param(beta), n, n_level)
            }
            Family::DualQHahn { gamma, delta, .. } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                q_poch(&(d.clone() * q.clone()), &q, n_level)
                    * q_poch(&(g.clone() * q.clone()), &q, n)
                    * q_poch(&qp(-bn), &q, n)
                    * ipow(&(g.clone() * q.clone()), bn)
                    / (q_poch(&(g.clone() * d.clone() * qp(2)), &q, n_level)
                        * q_poch(&q, &q, n)
                        * q_poch(&(qp(-bn) / d.clone()), &q, n)
                        * ipow(&(g * d * q.clone()), ni))
            }
            Family::AffineQKrawtchouk { p, .. } => {
                let pq = S::param(p) * q.clone();
                ipow(&pq, bn - ni) * q_poch(&pq, &q, n) * q_poch(&q, &q, n_level)
                    / (q_poch(&q, &q, n) * q_poch(&q, &q, n_level - n))
            }
            Family::QKrawtchouk { p, .. } => {
                let p = S::param(p);
                q_poch(&(-p.clone()), &q, n)
                    * q_poch(&qp(-bn), &q, n)
                    * (one.clone() + p.clone() * qp(2 * ni))
                    * ipow(&p, bn)
                    * qp(bn * (bn + 1) / 2)
                    / (q_poch(&q, &q, n)
                        * q_poch(&(-(p.clone() * qp(bn + 1))), &q, n)
                        * (one + p.clone())
                        * q_poch(&(-(p.clone() * q.clone())), &q, n_level)
                        * ipow(&(-(p * qp(-bn))), ni)
                        * qp(ni * ni))
            }
            Family::QHahn { alpha, beta, .. } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                let ab = a.clone() * b.clone();
                q_poch(&(b.clone() * q.clone()), &q, n_level) * ipow(&(a.clone() * q.clone()), bn)
                    / q_poch(&(ab.clone() * qp(2)), &q, n_level)
                    * q_poch(&(a.clone() * q.clone()), &q, n)
                    * q_ratio_factor(&(ab.clone() * q.clone()), &q, n)
                    * q_poch(&qp(-bn), &q, n)
                    * qp(bn * ni - ni * (ni - 1) / 2)
                    / (q_poch(&q, &q, n)
                        * q_poch(&(ab * qp(bn + 2)), &q, n)
                        * q_poch(&(b * q.clone()), &q, n)
                        * ipow(&(-(a * q.clone())), ni))
            }
            Family::DualQKrawtchouk { c, .. } => {
                let c = S::param(c);
                q_poch(&qp(-bn), &q, n)
                    / (q_poch(&(one / c.clone()), &q, n_level)
                        * q_poch(&q, &q, n)
                        * ipow(&(c * qp(-bn)), ni))
            }
        }
    }

    /// The terminating series factor of the closed form at `(n, l)`.
    pub fn series<S: Scalar>(&self, n: usize, l: usize, n_level: usize) -> Result<S> {
        let one = S::one();
        let (ni, li, bn) = (n as i64, l as i64, n_level as i64);
        let m = n.min(l);
        let q: S = self.q();
        let qp = |e: i64| ipow(&q, e);
        match *self {
            Family::Krawtchouk { p } => hypergeometric_sum(
                &[S::int(-ni), S::int(-li)],
                &[S::int(-bn)],
                &(one / S::param(p)),
                m,
            ),
            Family::DualHahn { gamma, delta } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                hypergeometric_sum(
                    &[S::int(-ni), S::int(-li), S::int(li) + g.clone() + d + one.clone()],
                    &[g + one.clone(), S::int(-bn)],
                    &one,
                    m,
                )
            }
            Family::Chebyshev => hypergeometric_sum(
                &[S::int(-ni), S::int(ni + 1), S::int(-li)],
                &[one.clone(), S::int(-bn)],
                &one,
                m,
            ),
            Family::Hahn { alpha, beta } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                hypergeometric_sum(
                    &[S::int(-ni), S::int(ni) + a.clone() + b + one.clone(), S::int(-li)],
                    &[a + one.clone(), S::int(-bn)],
                    &one,
                    m,
                )
            }
            Family::DualQHahn { gamma, delta, .. } => {
                let (g, d) = (S::param(gamma), S::param(delta));
                basic_hypergeometric_sum(
                    &[qp(-ni), qp(-li), g.clone() * d * qp(li + 1)],
                    &[g * q.clone(), qp(-bn)],
                    &q,
                    &q,
                    m,
                )
            }
            Family::AffineQKrawtchouk { p, .. } => basic_hypergeometric_sum(
                &[qp(-ni), S::zero(), qp(-li)],
                &[S::param(p) * q.clone(), qp(-bn)],
                &q,
                &q,
                m,
            ),
            Family::QKrawtchouk { p, .. } => basic_hypergeometric_sum(
                &[qp(-ni), qp(-li), -(S::param(p) * qp(ni))],
                &[qp(-bn), S::zero()],
                &q,
                &q,
                m,
            ),
            Family::QHahn { alpha, beta, .. } => {
                let (a, b) = (S::param(alpha), S::param(beta));
                basic_hypergeometric_sum(
                    &[qp(-ni), a.clone() * b * qp(ni + 1), qp(-li)],
                    &[a * q.clone(), qp(-bn)],
                    &q,
                    &q,
                    m,
                )
            }
            Family::DualQKrawtchouk { c, .. } => basic_hypergeometric_sum(
                &[qp(-ni), qp(-li), S::param(c) * qp(li - bn)],
                &[qp(-bn), S::zero()],
                &q,
                &q,
                m,
            ),
        }
    }

    fn checked_radicand(&self, n: usize, n_level: usize) -> Result<Exact> {
        let r = self.radicand::<Exact>(n, n_level);
        if r.is_negative() || r.is_zero() {
            return Err(Error::NegativeRadicand { context: "closed-form prefactor", value: r.approx() });
        }
        Ok(r)
    }

    /// Closed-form polynomial value scaled so that degree zero equals one.
    ///
    /// This is the orthonormal closed form divided by its degree-zero value;
    /// it is orthonormal with respect to [`Family::weights_normalized`]. It
    /// equals `(-1)^n` times the polynomial generated by the three-term
    /// recurrence with nonnegative off-diagonal.
    pub fn polynomial(&self, n: usize, l: usize, n_level: usize) -> Result<f64> {
        check_index(n, n_level)?;
        check_index(l, n_level)?;
        let ratio = self.checked_radicand(n, n_level)? / self.checked_radicand(0, n_level)?;
        let s = self.series::<Exact>(n, l, n_level)?;
        Ok(ratio.approx().sqrt() * s.approx())
    }

    /// `table[n][l]` = [`Family::polynomial`]`(n, l, n_level)` for the whole sector.
    pub fn polynomial_table(&self, n_level: usize) -> Result<Vec<Vec<f64>>> {
        let r0 = self.checked_radicand(0, n_level)?;
        (0..=n_level)
            .map(|n| {
                let scale = (self.checked_radicand(n, n_level)? / r0.clone()).approx().sqrt();
                (0..=n_level)
                    .map(|l| Ok(scale * self.series::<Exact>(n, l, n_level)?.approx()))
                    .collect()
            })
            .collect()
    }

    /// Closed-form polynomial with its natural prefactor; orthonormal with
    /// respect to the unnormalized [`Family::weight`].
    pub fn polynomial_orthonormal(&self, n: usize, l: usize, n_level: usize) -> Result<f64> {
        check_index(n, n_level)?;
        check_index(l, n_level)?;
        let r = self.checked_radicand(n, n_level)?;
        let s = self.series::<Exact>(n, l, n_level)?;
        Ok(r.approx().sqrt() * s.approx())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

fn check_index(l: usize, n_level: usize) -> Result<()> {
    if l > n_level {
        Err(Error::IndexOutOfRange { l, n: n_level })
    } else {
        Ok(())
    }
}

fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    let mut r = S::one();
    for j in 1..=k {
        r = r * S::int((n - k + j) as i64) / S::int(j as i64);
    }
    r
}

/// `(a;q)_l (1 - a q^{2l}) / (1 - a)`, with the removable `a = 1` case
/// cancelled: equals `(aq;q)_{l-1} (1 - a q^{2l})` for `l >= 1`.
fn q_ratio_factor<S: Scalar>(a: &S, q: &S, l: usize) -> S {
    if l == 0 {
        return S::one();
    }
    q_poch(&(a.clone() * q.clone()), q, l - 1) * (S::one() - a.clone() * ipow(q, 2 * l as i64))
}

/// `(1 - c q^{2l-N}) / (1 - c q^{-N})`.
fn q_ratio_factor_shifted<S: Scalar>(c: &S, q: &S, l: usize, n_level: i64) -> S {
    if l == 0 {
        return S::one();
    }
    (S::one() - c.clone() * ipow(q, 2 * l as i64 - n_level))
        / (S::one() - c.clone() * ipow(q, -n_level))
}

/// Hahn prefactor, with `(2n+s+1)/(n+s+1)` cancelled at `n = 0`.
fn hahn_radicand<S: Scalar>(a: &S, b: &S, n: usize, n_level: usize) -> S {
    let one = S::one();
    let ns = S::int(n as i64);
    let s = a.clone() + b.clone();
    let lead = if n == 0 {
        one.clone()
    } else {
        (S::int(2) * ns.clone() + s.clone() + one.clone()) / (ns.clone() + s.clone() + one.clone())
    };
    lead * poch(&(a.clone() + one.clone()), n)
        * poch(&S::int((n_level - n) as i64 + 1), n)
        * poch(&one, n_level)
        / (poch(&(ns + s + S::int(2)), n_level)
            * poch(&(b.clone() + one.clone()), n)
            * poch(&one, n))
}
