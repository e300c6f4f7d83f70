//! Model parameters, the lattice-parameter map and single-mode quantities.

use crate::basis::{LatticeSpec, Momentum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Phi3,
    Phi4,
}

/// Mode set entering the retained self-contraction `⟨φ²⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModeSet {
    /// Admissible parton modes only (components in `1..=N`).
    #[default]
    Restricted,
    /// Every non-zero mode of the `(2N+1)^d` momentum lattice.
    FullLattice,
}

/// Bare parameters of the Hamiltonian, in units of the momentum spacing.
///
/// The bare mass term is split as `m0² = mK² + m_int²`: partons propagate
/// with the kinetic mass `mK²` while `m_int²` acts as a two-point
/// interaction and may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    m0_sq: f64,
    g0: f64,
    mk_sq: f64,
    vertex: Vertex,
    mode_set: ModeSet,
}

impl ModelParams {
    pub fn new(m0_sq: f64, g0: f64, mk_sq: f64, vertex: Vertex) -> Result<Self> {
        if !m0_sq.is_finite() {
            return Err(Error::NonFiniteParameter("m0_sq"));
        }
        if !g0.is_finite() {
            return Err(Error::NonFiniteParameter("g0"));
        }
        if !mk_sq.is_finite() {
            return Err(Error::NonFiniteParameter("mK_sq"));
        }
        if mk_sq < 0.0 {
            return Err(Error::NegativeKineticMass(mk_sq));
        }
        Ok(Self {
            m0_sq,
            g0,
            mk_sq,
            vertex,
            mode_set: ModeSet::Restricted,
        })
    }

    /// φ⁴ parameters from `(λ, κ)`. The map yields `m0²` in lattice units
    /// (`a = 1`); it is rescaled by `1/a²` into units of `dk` here so the
    /// result does not depend on the choice of `dk`.
    pub fn from_lattice_couplings(
        lc: LatticeCouplings,
        lattice: &LatticeSpec,
        mk_sq: f64,
    ) -> Result<Self> {
        let (m0_sq_lattice, g0) = couplings_from_lattice_params(lc)?;
        let a = lattice.spacing();
        Self::new(m0_sq_lattice / (a * a), g0, mk_sq, Vertex::Phi4)
    }

    pub fn with_mode_set(mut self, mode_set: ModeSet) -> Self {
        self.mode_set = mode_set;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    pub fn m0_sq(&self) -> f64 {
        self.m0_sq
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn mk_sq(&self) -> f64 {
        self.mk_sq
    }

    pub fn m_int_sq(&self) -> f64 {
        self.m0_sq - self.mk_sq
    }

    pub fn vertex(&self) -> Vertex {
        self.vertex
    }

    pub fn mode_set(&self) -> ModeSet {
        self.mode_set
    }
}

/// Hopping-parameter form of the φ⁴ couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeCouplings {
    pub lambda: f64,
    pub kappa: f64,
}

impl LatticeCouplings {
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFiniteParameter("lambda"));
        }
        if lambda < 0.0 {
            return Err(Error::NegativeLambda(lambda));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::NonPositiveKappa(kappa));
        }
        Ok(Self { lambda, kappa })
    }
}

/// `m0² = (1 − 2λ)/κ − 8` and `g0 = 6λ/κ²`, both in lattice units.
pub fn couplings_from_lattice_params(lc: LatticeCouplings) -> Result<(f64, f64)> {
    let LatticeCouplings { lambda, kappa } = lc;
    if !(kappa > 0.0) {
        return Err(Error::NonPositiveKappa(kappa));
    }
    let m0_sq = (1.0 - 2.0 * lambda) / kappa - 8.0;
    let g0 = 6.0 * lambda / (kappa * kappa);
    Ok((m0_sq, g0))
}

/// Kinetic energy `√(mK² + |k·dk|²)`.
pub fn omega(k: &Momentum, mk_sq: f64, dk: f64) -> Result<f64> {
    if mk_sq < 0.0 {
        return Err(Error::NegativeKineticMass(mk_sq));
    }
    Ok(libm::sqrt(mk_sq + k.norm_sq() as f64 * dk * dk))
}

pub(crate) fn omega_unchecked(k: &Momentum, mk_sq: f64, dk: f64) -> f64 {
    libm::sqrt(mk_sq + k.norm_sq() as f64 * dk * dk)
}

/// Retained self-contraction `⟨φ²⟩ = Ω⁻¹ Σ_k 1/(2ω(k))` over the configured
/// mode set.
pub fn tadpole_sigma(lattice: &LatticeSpec, params: &ModelParams) -> f64 {
    let mk_sq = params.mk_sq();
    let dk = lattice.dk();
    let sum: f64 = match params.mode_set() {
        ModeSet::Restricted => lattice
            .modes()
            .iter()
            .map(|k| 0.5 / omega_unchecked(k, mk_sq, dk))
            .sum(),
        ModeSet::FullLattice => {
            let n = lattice.half_extent() as i32;
            let d = lattice.dim();
            let side = (2 * n + 1) as usize;
            let mut total = 0.0;
            for idx in 0..side.pow(d as u32) {
                let mut comps = [0i32; 3];
                let mut rest = idx;
                for c in comps.iter_mut().take(d) {
                    *c = (rest % side) as i32 - n;
                    rest /= side;
                }
                if comps.iter().all(|&c| c == 0) {
                    continue;
                }
                let k = Momentum::new(&comps[..d]).expect("dimension in 1..=3");
                total += 0.5 / omega_unchecked(&k, mk_sq, dk);
            }
            total
        }
    };
    sum / lattice.box_volume()
}
