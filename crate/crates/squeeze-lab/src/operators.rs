//! Truncated generalized-squeezing Hamiltonians in Jacobi (real symmetric
//! tridiagonal) form.
//!
//! The order-n squeezing generator on the invariant subspace spanned by
//! `{|0>, |n>, |2n>, ...}` is tridiagonal with purely imaginary off-diagonal
//! elements `±i t_j`. The unitary gauge `D = diag(i^j)` maps it to a real
//! symmetric matrix with positive couplings `t_j` and leaves both the vacuum
//! basis vector and the (diagonal) photon-number observable unchanged, so all
//! spectra and vacuum dynamics can be computed on the real form.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Power of the Kerr nonlinearity `(a†)^h a^h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KerrOrder {
    Quadratic,
    Quartic,
}

impl KerrOrder {
    pub fn from_u32(h: u32) -> Result<Self> {
        match h {
            2 => Ok(KerrOrder::Quadratic),
            4 => Ok(KerrOrder::Quartic),
            other => Err(Error::KerrOrder(other)),
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            KerrOrder::Quadratic => 2,
            KerrOrder::Quartic => 4,
        }
    }
}

/// Kerr term `c (a†)^h a^h` with the conventional prefactor folded into `c`:
/// `c = K` for the quadratic term and `c = K4/4!` for the quartic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrSpec {
    pub order: KerrOrder,
    /// Bare strength as quoted (`K` or `K4`), without the 1/4! factor.
    pub strength: f64,
}

impl KerrSpec {
    pub fn new(order: u32, strength: f64) -> Result<Self> {
        let order = KerrOrder::from_u32(order)?;
        if !(strength >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "Kerr strength must be >= 0, got {strength}"
            )));
        }
        Ok(KerrSpec { order, strength })
    }

    /// Coefficient actually multiplying the photon-number product.
    pub fn coefficient(&self) -> f64 {
        match self.order {
            KerrOrder::Quadratic => self.strength,
            KerrOrder::Quartic => self.strength / 24.0,
        }
    }
}

/// Parameters of one truncated model: squeezing order `n`, subspace dimension
/// `dim` (basis `|0>, |n>, ..., |n(dim-1)>`), optional Kerr term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub n: u32,
    pub dim: usize,
    pub kerr: Option<KerrSpec>,
}

impl TruncationSpec {
    pub fn new(n: u32, dim: usize, kerr: Option<KerrSpec>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSpec("squeezing order n must be >= 1".into()));
        }
        if dim < 1 {
            return Err(Error::InvalidSpec(
                "subspace dimension must be >= 1 (rejecting dim = 0)".into(),
            ));
        }
        Ok(TruncationSpec { n, dim, kerr })
    }

    /// Physical photon number of basis index `j`.
    pub fn photons_at(&self, j: usize) -> u64 {
        self.n as u64 * j as u64
    }

    /// Largest photon number covered by the truncation, `n (dim-1)`.
    pub fn max_photons(&self) -> u64 {
        self.photons_at(self.dim - 1)
    }
}

/// How the real tridiagonal form relates to the physical Hamiltonian.
pub const GAUGE_NOTE: &str = "physical H = D T D^dagger with D = diag(i^j); \
     the gauge is unitary, diagonal in the Fock basis, and fixes the vacuum, \
     so spectra and vacuum photon-number dynamics agree between H and T";

/// Real symmetric tridiagonal (Jacobi) form of a truncated Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    /// Diagonal entries (the Kerr contribution; zero without a Kerr term).
    pub diag: Vec<f64>,
    /// Off-diagonal couplings `t_j > 0`, length `dim - 1`.
    pub offdiag: Vec<f64>,
    /// Records the gauge relating this matrix to the physical Hamiltonian.
    pub gauge_note: &'static str,
}

impl JacobiMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Symmetric Gershgorin bound on the spectrum: every eigenvalue lies in
    /// `[-b, b]` with `b = max |d_j| + 2 max t_j`.
    pub fn norm_bound(&self) -> f64 {
        let dmax = self.diag.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        let tmax = self.offdiag.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        dmax + 2.0 * tmax
    }

    /// `y = T x` for split re/im parts (or any pair of real vectors).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        if n == 1 {
            y[0] = self.diag[0] * x[0];
            return;
        }
        y[0] = self.diag[0] * x[0] + self.offdiag[0] * x[1];
        for j in 1..n - 1 {
            y[j] = self.offdiag[j - 1] * x[j - 1] + self.diag[j] * x[j] + self.offdiag[j] * x[j + 1];
        }
        y[n - 1] = self.offdiag[n - 2] * x[n - 2] + self.diag[n - 1] * x[n - 1];
    }
}

/// Squeezing coupling `t_j = sqrt(prod_{k=1..n} (nj+k))` between subspace
/// indices `j` and `j+1`, evaluated as the exponential of a summed-log to
/// stay clear of factorial overflow at large `n j`.
pub fn coupling(n: u32, j: usize) -> f64 {
    let base = n as f64 * j as f64;
    let mut log_sq = 0.0;
    for k in 1..=n {
        log_sq += (base + k as f64).ln();
    }
    (0.5 * log_sq).exp()
}

/// Diagonal Kerr energy at photon number `m`: 0 without a Kerr term,
/// `K m(m-1)` for order 2, `K4/4! m(m-1)(m-2)(m-3)` for order 4.
pub fn kerr_diagonal(m: u64, kerr: Option<KerrSpec>) -> f64 {
    let Some(kerr) = kerr else { return 0.0 };
    let m = m as f64;
    let h = kerr.order.as_u32();
    let mut prod = 1.0;
    for i in 0..h {
        prod *= m - i as f64;
    }
    // below m = h-1 the product vanishes term-by-term; clamp roundoff signs
    if prod <= 0.0 && m < h as f64 {
        return 0.0;
    }
    kerr.coefficient() * prod
}

/// Build the gauged truncated Hamiltonian for `spec`.
pub fn build_hamiltonian(spec: &TruncationSpec) -> JacobiMatrix {
    let dim = spec.dim;
    let diag: Vec<f64> = (0..dim)
        .map(|j| kerr_diagonal(spec.photons_at(j), spec.kerr))
        .collect();
    let offdiag: Vec<f64> = (0..dim.saturating_sub(1))
        .map(|j| coupling(spec.n, j))
        .collect();
    JacobiMatrix {
        diag,
        offdiag,
        gauge_note: GAUGE_NOTE,
    }
}

/// Edge-of-truncation dominance estimate: each ladder operator replaced by
/// `sqrt(nN)` gives Kerr scale `c (nN)^h` against squeezing scale
/// `(nN)^{n/2}`; values above 1 mean the Kerr diagonal dominates.
pub fn dominance_ratio(spec: &TruncationSpec) -> Result<f64> {
    let kerr = spec.kerr.ok_or(Error::MissingKerr)?;
    let nn = spec.n as f64 * spec.dim as f64;
    let h = kerr.order.as_u32() as f64;
    Ok(kerr.coefficient() * nn.powf(h - spec.n as f64 / 2.0))
}
