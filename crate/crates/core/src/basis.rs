//! Momentum lattice, admissibility cut and the restricted Fock basis.
//!
//! The hadron carries `P = (N, .., N)·dk`. A parton momentum `p` is
//! admissible when it lies inside the sphere of diameter `|P|` around `P/2`,
//! i.e. `p·p <= p·P`. Combined with the lattice cutoff every admissible
//! component lies in `1..=N`, which also bounds the parton number by `N`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};

/// Momentum lattice of half-extent `N` in `d` spatial dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    dim: usize,
    half_extent: u32,
    dk: f64,
}

impl LatticeSpec {
    pub fn new(dim: usize, half_extent: i64, dk: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidDimension(dim));
        }
        if half_extent < 1 || half_extent > i64::from(u16::MAX) {
            return Err(Error::InvalidHalfExtent(half_extent));
        }
        if !(dk > 0.0) || !dk.is_finite() {
            return Err(Error::InvalidSpacing(dk));
        }
        Ok(Self {
            dim,
            half_extent: half_extent as u32,
            dk,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`; also the maximal parton number.
    pub fn half_extent(&self) -> u32 {
        self.half_extent
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    /// Total momentum in lattice units, `(N, .., N)`.
    pub fn total_momentum(&self) -> Momentum {
        let n = self.half_extent as i32;
        let mut comps = [0; 3];
        comps[..self.dim].fill(n);
        Momentum {
            dim: self.dim as u8,
            comps,
        }
    }

    /// `|P|² = d·N²·dk²` in physical units.
    pub fn p_norm_sq(&self) -> f64 {
        let n = f64::from(self.half_extent) * self.dk;
        self.dim as f64 * n * n
    }

    pub fn p_norm(&self) -> f64 {
        libm::sqrt(self.p_norm_sq())
    }

    /// Position-space spacing `a = π/(N·dk)`.
    pub fn spacing(&self) -> f64 {
        PI / (f64::from(self.half_extent) * self.dk)
    }

    /// Spatial box volume `Ω = (2π/dk)^d`.
    pub fn box_volume(&self) -> f64 {
        libm::pow(2.0 * PI / self.dk, self.dim as f64)
    }

    /// All admissible single-parton momenta (components in `1..=N`), in
    /// lexicographic order.
    pub fn modes(&self) -> Vec<Momentum> {
        let n = self.half_extent as i32;
        let count = (self.half_extent as usize).pow(self.dim as u32);
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let mut comps = [0i32; 3];
            let mut rest = idx;
            for c in (0..self.dim).rev() {
                comps[c] = (rest % n as usize) as i32 + 1;
                rest /= n as usize;
            }
            out.push(Momentum {
                dim: self.dim as u8,
                comps,
            });
        }
        out
    }

    /// Position of an admissible momentum in [`LatticeSpec::modes`].
    pub fn mode_index(&self, p: &Momentum) -> Option<usize> {
        if p.dim() != self.dim {
            return None;
        }
        let n = self.half_extent as i32;
        let mut idx = 0usize;
        for &c in p.components() {
            if c < 1 || c > n {
                return None;
            }
            idx = idx * n as usize + (c - 1) as usize;
        }
        Some(idx)
    }
}

/// Validated constructor; see [`LatticeSpec::new`].
pub fn build_lattice(dim: usize, half_extent: i64, dk: f64) -> Result<LatticeSpec> {
    LatticeSpec::new(dim, half_extent, dk)
}

/// Integer lattice momentum in units of `dk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Momentum {
    dim: u8,
    comps: [i32; 3],
}

impl Momentum {
    pub fn new(comps: &[i32]) -> Result<Self> {
        if comps.is_empty() || comps.len() > 3 {
            return Err(Error::InvalidDimension(comps.len()));
        }
        let mut c = [0; 3];
        c[..comps.len()].copy_from_slice(comps);
        Ok(Self {
            dim: comps.len() as u8,
            comps: c,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn components(&self) -> &[i32] {
        &self.comps[..self.dim as usize]
    }

    pub fn dot(&self, other: &Momentum) -> i64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }

    /// Sum of the components; the numerator of the momentum fraction.
    pub fn component_sum(&self) -> i64 {
        self.components().iter().map(|&c| i64::from(c)).sum()
    }

    pub fn checked_add(&self, other: &Momentum) -> Option<Momentum> {
        if self.dim != other.dim {
            return None;
        }
        let mut comps = [0; 3];
        for (i, c) in comps.iter_mut().enumerate() {
            *c = self.comps[i].checked_add(other.comps[i])?;
        }
        Some(Momentum {
            dim: self.dim,
            comps,
        })
    }

    pub fn checked_sub(&self, other: &Momentum) -> Option<Momentum> {
        if self.dim != other.dim {
            return None;
        }
        let mut comps = [0; 3];
        for (i, c) in comps.iter_mut().enumerate() {
            *c = self.comps[i].checked_sub(other.comps[i])?;
        }
        Some(Momentum {
            dim: self.dim,
            comps,
        })
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Breit-frame admissibility `(p − P/2)² ≤ |P/2|²`, evaluated exactly as
/// `p·p ≤ p·P`.
pub fn satisfies_breit(p: &Momentum, lattice: &LatticeSpec) -> Result<bool> {
    if p.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: p.dim(),
        });
    }
    Ok(p.norm_sq() <= p.dot(&lattice.total_momentum()))
}

/// Field parity `(−1)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_count(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// Multiset of parton momenta, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    partons: Vec<Momentum>,
}

impl FockState {
    pub fn new(mut partons: Vec<Momentum>) -> Self {
        partons.sort_unstable();
        Self { partons }
    }

    pub fn partons(&self) -> &[Momentum] {
        &self.partons
    }

    pub fn particle_count(&self) -> usize {
        self.partons.len()
    }

    /// Occupation view: distinct momenta with their counts, in order.
    pub fn occupations(&self) -> Vec<(Momentum, u32)> {
        let mut out: Vec<(Momentum, u32)> = Vec::new();
        for p in &self.partons {
            match out.last_mut() {
                Some((q, n)) if q == p => *n += 1,
                _ => out.push((*p, 1)),
            }
        }
        out
    }

    pub fn occupancy_of(&self, p: &Momentum) -> u32 {
        self.partons.iter().filter(|q| *q == p).count() as u32
    }

    /// Componentwise momentum sum, or `None` for the empty state.
    pub fn total_momentum(&self) -> Option<Momentum> {
        let (first, rest) = self.partons.split_first()?;
        rest.iter().try_fold(*first, |acc, p| acc.checked_add(p))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.partons.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// `(−1)^(particle count)`.
pub fn n_parity(s: &FockState) -> Parity {
    Parity::from_count(s.particle_count())
}

/// Ordered restricted Fock basis for one lattice.
#[derive(Debug, Clone)]
pub struct Basis {
    lattice: LatticeSpec,
    states: Vec<FockState>,
    index: BTreeMap<FockState, usize>,
}

impl Basis {
    /// Builds a basis from an explicit state list; states are canonicalized
    /// and sorted, duplicates removed.
    pub fn from_states(lattice: LatticeSpec, states: Vec<FockState>) -> Self {
        let mut states: Vec<FockState> = states
            .into_iter()
            .map(|s| FockState::new(s.partons))
            .collect();
        states.sort();
        states.dedup();
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            lattice,
            states,
            index,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&FockState> {
        self.states.get(i)
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn max_particle_count(&self) -> usize {
        self.states
            .iter()
            .map(FockState::particle_count)
            .max()
            .unwrap_or(0)
    }
}

/// Enumerates every multiset of admissible momenta summing to `(N, .., N)`.
pub fn enumerate_basis(lattice: &LatticeSpec) -> Basis {
    let modes = lattice.modes();
    let mut states = Vec::new();
    let mut current = Vec::new();
    let remaining = lattice.total_momentum();
    extend_partitions(&modes, 0, remaining, &mut current, &mut states);
    for s in &states {
        debug_assert!(s
            .partons()
            .iter()
            .all(|p| satisfies_breit(p, lattice) == Ok(true)));
    }
    Basis::from_states(*lattice, states)
}

fn extend_partitions(
    modes: &[Momentum],
    start: usize,
    remaining: Momentum,
    current: &mut Vec<Momentum>,
    out: &mut Vec<FockState>,
) {
    if remaining.components().iter().all(|&c| c == 0) {
        out.push(FockState::new(current.clone()));
        return;
    }
    for (offset, m) in modes[start..].iter().enumerate() {
        let Some(rest) = remaining.checked_sub(m) else {
            continue;
        };
        if rest.components().iter().any(|&c| c < 0) {
            continue;
        }
        current.push(*m);
        extend_partitions(modes, start + offset, rest, current, out);
        current.pop();
    }
}

/// Position of `s` in the basis; `None` when it is not a basis state.
pub fn state_index(basis: &Basis, s: &FockState) -> Option<usize> {
    basis.index_of(s)
}
