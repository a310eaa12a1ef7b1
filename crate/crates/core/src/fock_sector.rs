//! Two-mode Fock states and the finite sectors fixed by the conserved charges.
//!
//! A state `|n0, n1>` with conversion multiplicities `(k0, k1)` lives in the
//! sector `(r0, r1, N)` where `r_i = n_i mod k_i`, and sits at position
//! `n = (n0 - r0) / k0` inside it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of a conserved sector together with the multiplicities it refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectorIndex {
    pub r0: usize,
    pub r1: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub k0: usize,
    pub k1: usize,
}

impl SectorIndex {
    pub fn new(r0: usize, r1: usize, n: usize, k0: usize, k1: usize) -> Result<Self> {
        if k0 == 0 {
            return Err(Error::param("k0", "must be at least 1"));
        }
        if k1 == 0 {
            return Err(Error::param("k1", "must be at least 1"));
        }
        if r0 >= k0 {
            return Err(Error::param("r0", format!("{r0} is not below k0={k0}")));
        }
        if r1 >= k1 {
            return Err(Error::param("r1", format!("{r1} is not below k1={k1}")));
        }
        Ok(SectorIndex { r0, r1, n, k0, k1 })
    }

    /// Sector of a single-photon conversion model (`k0 = k1 = 1`).
    pub fn simple(n: usize) -> Self {
        SectorIndex { r0: 0, r1: 0, n, k0: 1, k1: 1 }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Value of the charge `K = k1 n0 + k0 n1`, shared by all states of the sector.
    pub fn charge(&self) -> usize {
        self.k1 * self.r0 + self.k0 * self.r1 + self.k0 * self.k1 * self.n
    }

    /// Every sector with the same multiplicities and level `n`.
    pub fn all_at_level(k0: usize, k1: usize, n: usize) -> Vec<SectorIndex> {
        let mut out = Vec::with_capacity(k0 * k1);
        for r0 in 0..k0 {
            for r1 in 0..k1 {
                out.push(SectorIndex { r0, r1, n, k0, k1 });
            }
        }
        out
    }
}

impl fmt::Display for SectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.r0, self.r1, self.n)
    }
}

/// Occupation numbers of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockState {
    pub n0: usize,
    pub n1: usize,
}

impl FockState {
    pub fn new(n0: usize, n1: usize) -> Self {
        FockState { n0, n1 }
    }
}

/// Eigenvalues of the conserved charges on a Fock state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Charges {
    pub k: usize,
    pub r0: usize,
    pub r1: usize,
    pub dim: usize,
}

fn check_multiplicities(k0: usize, k1: usize) -> Result<()> {
    if k0 == 0 {
        return Err(Error::param("k0", "must be at least 1"));
    }
    if k1 == 0 {
        return Err(Error::param("k1", "must be at least 1"));
    }
    Ok(())
}

/// Sector and in-sector position of a Fock state.
pub fn decompose_state(s: FockState, k0: usize, k1: usize) -> Result<(SectorIndex, usize)> {
    check_multiplicities(k0, k1)?;
    let r0 = s.n0 % k0;
    let r1 = s.n1 % k1;
    let n = (s.n0 - r0) / k0;
    let level = n + (s.n1 - r1) / k1;
    Ok((SectorIndex { r0, r1, n: level, k0, k1 }, n))
}

/// Fock state at position `n` of sector `mu`.
pub fn compose_state(mu: SectorIndex, n: usize) -> Result<FockState> {
    if n > mu.n {
        return Err(Error::OutOfSector { n, dim: mu.dim() });
    }
    Ok(FockState {
        n0: mu.r0 + mu.k0 * n,
        n1: mu.r1 + mu.k1 * (mu.n - n),
    })
}

pub fn charges(s: FockState, k0: usize, k1: usize) -> Result<Charges> {
    let (mu, _) = decompose_state(s, k0, k1)?;
    Ok(Charges {
        k: k1 * s.n0 + k0 * s.n1,
        r0: mu.r0,
        r1: mu.r1,
        dim: mu.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decompose_examples() {
        let (mu, n) = decompose_state(FockState::new(0, 0), 1, 1).unwrap();
        assert_eq!((mu.r0, mu.r1, mu.n, n), (0, 0, 0, 0));
        let (mu, n) = decompose_state(FockState::new(3, 2), 1, 1).unwrap();
        assert_eq!((mu.r0, mu.r1, mu.n, n), (0, 0, 5, 3));
        let (mu, n) = decompose_state(FockState::new(5, 7), 2, 3).unwrap();
        assert_eq!((mu.r0, mu.r1, mu.n, n), (1, 1, 4, 2));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose_state(SectorIndex::simple(0), 0).unwrap(), FockState::new(0, 0));
        let mu = SectorIndex::new(1, 1, 4, 2, 3).unwrap();
        assert_eq!(compose_state(mu, 2).unwrap(), FockState::new(5, 7));
        assert_eq!(compose_state(SectorIndex::simple(5), 5).unwrap(), FockState::new(5, 0));
        assert!(matches!(
            compose_state(SectorIndex::simple(5), 6),
            Err(Error::OutOfSector { n: 6, dim: 6 })
        ));
    }

    #[test]
    fn charge_examples() {
        let c = charges(FockState::new(0, 0), 3, 2).unwrap();
        assert_eq!((c.k, c.dim), (0, 1));
        let c = charges(FockState::new(5, 7), 2, 3).unwrap();
        assert_eq!((c.k, c.r0, c.r1, c.dim), (29, 1, 1, 5));
        let c = charges(FockState::new(4, 1), 1, 1).unwrap();
        assert_eq!((c.k, c.dim), (5, 6));
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(SectorIndex::new(2, 0, 3, 2, 1).is_err());
        assert!(SectorIndex::new(0, 0, 3, 0, 1).is_err());
        assert!(decompose_state(FockState::new(1, 1), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_from_state(n0 in 0usize..200, n1 in 0usize..200, k0 in 1usize..6, k1 in 1usize..6) {
            let s = FockState::new(n0, n1);
            let (mu, n) = decompose_state(s, k0, k1).unwrap();
            prop_assert_eq!(compose_state(mu, n).unwrap(), s);
            let c = charges(s, k0, k1).unwrap();
            prop_assert_eq!(c.k, mu.charge());
        }

        #[test]
        fn round_trip_from_sector(k0 in 1usize..6, k1 in 1usize..6, level in 0usize..40, seed in 0usize..1000) {
            let mu = SectorIndex::new(seed % k0, (seed / 7) % k1, level, k0, k1).unwrap();
            let mut seen = 0;
            for n in 0..=level {
                let s = compose_state(mu, n).unwrap();
                let (back, m) = decompose_state(s, k0, k1).unwrap();
                prop_assert_eq!(back, mu);
                prop_assert_eq!(m, n);
                prop_assert_eq!(charges(s, k0, k1).unwrap().dim, mu.dim());
                seen += 1;
            }
            prop_assert_eq!(seen, mu.dim());
        }
    }
}
