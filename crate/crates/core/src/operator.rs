//! Second-quantized Hamiltonian on the restricted basis.
//!
//! With box normalization `φ = Σ_k (2Ωω_k)^{-1/2} (a_k e^{ikx} + a†_k e^{-ikx})`
//! and `Ω = (2π/dk)^d`, the operator is
//!
//! ```text
//! H = Σ_k [ω_k + m_int²/(2ω_k) + (g0/4)⟨φ²⟩/ω_k] n_k            (φ⁴ tadpole)
//!   + g0/(16Ω) Σ_{k1+k2=k3+k4} (ω1ω2ω3ω4)^{-1/2} a†1 a†2 a3 a4
//!   + g0/(24Ω) Σ_{k1=k2+k3+k4} (ω1ω2ω3ω4)^{-1/2} (a†2 a†3 a†4 a1 + h.c.)
//! ```
//!
//! for φ⁴, and `Σ ω n + m_int² Σ n/(2ω) + g0/(2^{5/2}√Ω) Σ_{k1=k2+k3}
//! (ω1ω2ω3)^{-1/2} (a†2 a†3 a1 + h.c.)` for φ³. Terms that would need a zero
//! or negative momentum vanish on the restricted basis, and every fully
//! contracted constant is dropped so the perturbative vacuum has energy 0.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{Basis, LatticeSpec, Momentum};
use crate::error::{Error, Result};
use crate::model::{omega_unchecked, tadpole_sigma, ModelParams, Vertex};

/// Real symmetric matrix stored as its upper triangle (`i <= j`) in
/// row-major coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    params: Option<ModelParams>,
}

impl SymmetricOperator {
    /// Builds an operator from upper-triangle entries in any order.
    /// Duplicate coordinates and entries below the diagonal are rejected.
    pub fn from_upper_entries(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyOperator);
        }
        for &(i, j, v) in &entries {
            if i > j || j >= dim {
                return Err(Error::InvalidEntry {
                    row: i,
                    col: j,
                    dim,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::InvalidEntry {
                row: w[0].0,
                col: w[0].1,
                dim,
            });
        }
        Ok(Self {
            dim,
            entries,
            params: None,
        })
    }

    /// Takes the upper triangle of a row-major dense matrix; exact zeros are
    /// not stored.
    pub fn from_dense(dim: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != dim * dim {
            return Err(Error::VectorLength {
                expected: dim * dim,
                found: dense.len(),
            });
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let v = dense[i * dim + j];
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_upper_entries(dim, entries)
    }

    pub fn with_params(mut self, params: ModelParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper-triangle entries, row-major.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map(|pos| self.entries[pos].2)
            .unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            if i == j {
                d[i] = v;
            }
        }
        d
    }

    /// Row-major dense copy with both triangles filled.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for &(i, j, v) in &self.entries {
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
        a
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| f64::max(m, e.2.abs()))
    }
}

/// Basis geometry shared by every assembly on one lattice.
///
/// Construction indexes each basis state by its sorted list of mode indices;
/// the kernel is immutable afterwards and can be shared across threads.
#[derive(Debug, Clone)]
pub struct OperatorKernel<'a> {
    basis: &'a Basis,
    lattice: LatticeSpec,
    modes: Vec<Momentum>,
    state_modes: Vec<Vec<u32>>,
    lookup: BTreeMap<Vec<u32>, usize>,
}

type Occupancy = Vec<(u32, u32)>;

impl<'a> OperatorKernel<'a> {
    pub fn new(basis: &'a Basis, lattice: &LatticeSpec) -> Result<Self> {
        if basis.lattice() != lattice {
            return Err(Error::BasisMismatch);
        }
        let modes = lattice.modes();
        let mut state_modes = Vec::with_capacity(basis.len());
        for s in basis.states() {
            let mut idx = Vec::with_capacity(s.particle_count());
            for p in s.partons() {
                idx.push(lattice.mode_index(p).ok_or(Error::BasisMismatch)? as u32);
            }
            idx.sort_unstable();
            state_modes.push(idx);
        }
        let lookup = state_modes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            basis,
            lattice: *lattice,
            modes,
            state_modes,
            lookup,
        })
    }

    pub fn basis(&self) -> &Basis {
        self.basis
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.state_modes.len()
    }

    /// Coupling constants and per-mode energies for one parameter point.
    pub fn coefficients(&self, params: &ModelParams) -> Coefficients {
        let dk = self.lattice.dk();
        let omega: Vec<f64> = self
            .modes
            .iter()
            .map(|k| omega_unchecked(k, params.mk_sq(), dk))
            .collect();
        let inv_sqrt_omega = omega.iter().map(|w| 1.0 / libm::sqrt(*w)).collect();
        let volume = self.lattice.box_volume();
        let g0 = params.g0();
        let (tadpole, quartic_22, quartic_13, cubic) = match params.vertex() {
            Vertex::Phi4 => (
                0.25 * g0 * tadpole_sigma(&self.lattice, params),
                g0 / (16.0 * volume),
                g0 / (24.0 * volume),
                0.0,
            ),
            Vertex::Phi3 => (
                0.0,
                0.0,
                0.0,
                g0 / (libm::pow(2.0, 2.5) * libm::sqrt(volume)),
            ),
        };
        Coefficients {
            vertex: params.vertex(),
            omega,
            inv_sqrt_omega,
            m_int_sq: params.m_int_sq(),
            tadpole,
            quartic_22,
            quartic_13,
            cubic,
            interacting: g0 != 0.0,
        }
    }

    /// Full column `j` of the operator as `(row, value)` pairs in row order.
    pub fn column(&self, coeffs: &Coefficients, j: usize) -> Result<Vec<(usize, f64)>> {
        let occ = occupancy(&self.state_modes[j]);
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();

        let mut diag = 0.0;
        for &(m, n) in &occ {
            let w = coeffs.omega[m as usize];
            diag += f64::from(n) * (w + coeffs.m_int_sq / (2.0 * w) + coeffs.tadpole / w);
        }
        acc.insert(j, diag);

        if coeffs.interacting {
            match coeffs.vertex {
                Vertex::Phi4 => self.quartic_terms(coeffs, &occ, &mut acc)?,
                Vertex::Phi3 => self.cubic_terms(coeffs, &occ, &mut acc)?,
            }
        }
        Ok(acc.into_iter().filter(|&(_, v)| v != 0.0).collect())
    }

    pub fn assemble(&self, params: &ModelParams) -> Result<SymmetricOperator> {
        let coeffs = self.coefficients(params);
        let mut entries = Vec::new();
        for j in 0..self.dim() {
            for (i, v) in self.column(&coeffs, j)? {
                if i <= j {
                    entries.push((i, j, v));
                }
            }
        }
        Ok(SymmetricOperator::from_upper_entries(self.dim(), entries)?.with_params(*params))
    }

    fn mode_sum(&self, a: u32, b: u32) -> Option<u32> {
        let k = self.modes[a as usize].checked_add(&self.modes[b as usize])?;
        self.lattice.mode_index(&k).map(|i| i as u32)
    }

    fn mode_diff(&self, total: &Momentum, b: u32) -> Option<u32> {
        let k = total.checked_sub(&self.modes[b as usize])?;
        self.lattice.mode_index(&k).map(|i| i as u32)
    }

    fn target(&self, occ: &Occupancy) -> Result<usize> {
        let mut key = Vec::new();
        for &(m, n) in occ {
            key.extend(core::iter::repeat_n(m, n as usize));
        }
        self.lookup
            .get(&key)
            .copied()
            .ok_or(Error::StateOutsideBasis)
    }

    fn quartic_terms(
        &self,
        c: &Coefficients,
        occ: &Occupancy,
        acc: &mut BTreeMap<usize, f64>,
    ) -> Result<()> {
        let isw = &c.inv_sqrt_omega;
        let n_modes = self.modes.len() as u32;

        // a†1 a†2 a3 a4
        for &(k3, _) in occ {
            for &(k4, _) in occ {
                let mut s = occ.clone();
                let Some(amp4) = annihilate(&mut s, k4) else {
                    continue;
                };
                let Some(amp3) = annihilate(&mut s, k3) else {
                    continue;
                };
                let total = self.modes[k3 as usize]
                    .checked_add(&self.modes[k4 as usize])
                    .ok_or(Error::StateOutsideBasis)?;
                for k1 in 0..n_modes {
                    let Some(k2) = self.mode_diff(&total, k1) else {
                        continue;
                    };
                    let mut t = s.clone();
                    let amp2 = create(&mut t, k2);
                    let amp1 = create(&mut t, k1);
                    let coef = c.quartic_22
                        * isw[k1 as usize]
                        * isw[k2 as usize]
                        * isw[k3 as usize]
                        * isw[k4 as usize];
                    *acc.entry(self.target(&t)?).or_insert(0.0) += coef * amp4 * amp3 * amp2 * amp1;
                }
            }
        }

        // a†2 a†3 a†4 a1
        for &(k1, _) in occ {
            let mut s = occ.clone();
            let Some(amp1) = annihilate(&mut s, k1) else {
                continue;
            };
            let p1 = self.modes[k1 as usize];
            for k2 in 0..n_modes {
                let Some(rest) = p1.checked_sub(&self.modes[k2 as usize]) else {
                    continue;
                };
                if rest.components().iter().any(|&x| x < 2) {
                    continue;
                }
                for k3 in 0..n_modes {
                    let Some(k4) = self.mode_diff(&rest, k3) else {
                        continue;
                    };
                    let mut t = s.clone();
                    let amp = create(&mut t, k4) * create(&mut t, k3) * create(&mut t, k2);
                    let coef = c.quartic_13
                        * isw[k1 as usize]
                        * isw[k2 as usize]
                        * isw[k3 as usize]
                        * isw[k4 as usize];
                    *acc.entry(self.target(&t)?).or_insert(0.0) += coef * amp1 * amp;
                }
            }
        }

        // a†1 a2 a3 a4
        for &(k2, _) in occ {
            for &(k3, _) in occ {
                for &(k4, _) in occ {
                    let mut s = occ.clone();
                    let Some(amp4) = annihilate(&mut s, k4) else {
                        continue;
                    };
                    let Some(amp3) = annihilate(&mut s, k3) else {
                        continue;
                    };
                    let Some(amp2) = annihilate(&mut s, k2) else {
                        continue;
                    };
                    let Some(k1) = self.mode_sum(k2, k3).and_then(|k23| self.mode_sum(k23, k4))
                    else {
                        continue;
                    };
                    let amp1 = create(&mut s, k1);
                    let coef = c.quartic_13
                        * isw[k1 as usize]
                        * isw[k2 as usize]
                        * isw[k3 as usize]
                        * isw[k4 as usize];
                    *acc.entry(self.target(&s)?).or_insert(0.0) += coef * amp4 * amp3 * amp2 * amp1;
                }
            }
        }
        Ok(())
    }

    fn cubic_terms(
        &self,
        c: &Coefficients,
        occ: &Occupancy,
        acc: &mut BTreeMap<usize, f64>,
    ) -> Result<()> {
        let isw = &c.inv_sqrt_omega;
        let n_modes = self.modes.len() as u32;

        // a†2 a†3 a1
        for &(k1, _) in occ {
            let mut s = occ.clone();
            let Some(amp1) = annihilate(&mut s, k1) else {
                continue;
            };
            let p1 = self.modes[k1 as usize];
            for k2 in 0..n_modes {
                let Some(k3) = self.mode_diff(&p1, k2) else {
                    continue;
                };
                let mut t = s.clone();
                let amp = create(&mut t, k3) * create(&mut t, k2);
                let coef = c.cubic * isw[k1 as usize] * isw[k2 as usize] * isw[k3 as usize];
                *acc.entry(self.target(&t)?).or_insert(0.0) += coef * amp1 * amp;
            }
        }

        // a†1 a2 a3
        for &(k2, _) in occ {
            for &(k3, _) in occ {
                let mut s = occ.clone();
                let Some(amp3) = annihilate(&mut s, k3) else {
                    continue;
                };
                let Some(amp2) = annihilate(&mut s, k2) else {
                    continue;
                };
                let Some(k1) = self.mode_sum(k2, k3) else {
                    continue;
                };
                let amp1 = create(&mut s, k1);
                let coef = c.cubic * isw[k1 as usize] * isw[k2 as usize] * isw[k3 as usize];
                *acc.entry(self.target(&s)?).or_insert(0.0) += coef * amp3 * amp2 * amp1;
            }
        }
        Ok(())
    }
}

/// Per-parameter-point constants used by [`OperatorKernel::column`].
#[derive(Debug, Clone)]
pub struct Coefficients {
    vertex: Vertex,
    omega: Vec<f64>,
    inv_sqrt_omega: Vec<f64>,
    m_int_sq: f64,
    tadpole: f64,
    quartic_22: f64,
    quartic_13: f64,
    cubic: f64,
    interacting: bool,
}

fn occupancy(sorted_modes: &[u32]) -> Occupancy {
    let mut occ: Occupancy = Vec::new();
    for &m in sorted_modes {
        match occ.last_mut() {
            Some((q, n)) if *q == m => *n += 1,
            _ => occ.push((m, 1)),
        }
    }
    occ
}

/// Applies `a_k`; returns `√n_k` or `None` when the mode is empty.
fn annihilate(occ: &mut Occupancy, k: u32) -> Option<f64> {
    let pos = occ.binary_search_by_key(&k, |e| e.0).ok()?;
    let n = occ[pos].1;
    if n == 1 {
        occ.remove(pos);
    } else {
        occ[pos].1 -= 1;
    }
    Some(libm::sqrt(f64::from(n)))
}

/// Applies `a†_k`; returns `√(n_k + 1)`.
fn create(occ: &mut Occupancy, k: u32) -> f64 {
    match occ.binary_search_by_key(&k, |e| e.0) {
        Ok(pos) => {
            occ[pos].1 += 1;
            libm::sqrt(f64::from(occ[pos].1))
        }
        Err(pos) => {
            occ.insert(pos, (k, 1));
            1.0
        }
    }
}

/// Assembles the Hamiltonian of `params` on `basis`.
pub fn assemble(
    basis: &Basis,
    lattice: &LatticeSpec,
    params: &ModelParams,
) -> Result<SymmetricOperator> {
    OperatorKernel::new(basis, lattice)?.assemble(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_lattice, enumerate_basis, n_parity, FockState};
    use crate::model::omega;
    use core::f64::consts::PI;

    fn m(c: &[i32]) -> Momentum {
        Momentum::new(c).unwrap()
    }

    #[test]
    fn free_theory_is_diagonal_sum_of_energies() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(0.0, 0.0, 0.0, Vertex::Phi4).unwrap();
        let h = assemble(&b, &l, &p).unwrap();
        assert!(h.entries().iter().all(|e| e.0 == e.1));
        for (i, s) in b.states().iter().enumerate() {
            let want: f64 = s
                .partons()
                .iter()
                .map(|k| omega(k, 0.0, 1.0).unwrap())
                .sum();
            assert!((h.get(i, i) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn single_mode_closed_form() {
        let l = build_lattice(3, 1, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(-0.3, 2.5, 0.0, Vertex::Phi4).unwrap();
        let h = assemble(&b, &l, &p).unwrap();
        assert_eq!(h.dim(), 1);
        let w = libm::sqrt(3.0);
        let sigma = 1.0 / (8.0 * PI * PI * PI * 2.0 * w);
        let want = w + p.m_int_sq() / (2.0 * w) + 0.25 * 2.5 * sigma / w;
        assert!((h.get(0, 0) - want).abs() < 1e-14);
    }

    #[test]
    fn one_to_three_element_on_n3() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let g0 = 1.7;
        let h = assemble(
            &b,
            &l,
            &ModelParams::new(0.0, g0, 0.0, Vertex::Phi4).unwrap(),
        )
        .unwrap();
        let i = b.index_of(&FockState::new(vec![m(&[3, 3, 3])])).unwrap();
        let j = b.index_of(&FockState::new(vec![m(&[1, 1, 1]); 3])).unwrap();
        let volume = 8.0 * PI * PI * PI;
        let want = g0 * libm::sqrt(2.0) / (72.0 * volume);
        assert!((h.get(i, j) - want).abs() < 1e-15);
    }

    #[test]
    fn phi4_respects_parity_blocks() {
        let l = build_lattice(3, 4, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let h = assemble(
            &b,
            &l,
            &ModelParams::new(-0.4, 3.0, 0.0, Vertex::Phi4).unwrap(),
        )
        .unwrap();
        for &(i, j, v) in h.entries() {
            if n_parity(&b.states()[i]) != n_parity(&b.states()[j]) {
                panic!("cross-parity entry ({i}, {j}) = {v}");
            }
        }
    }

    #[test]
    fn phi3_changes_particle_number_by_one() {
        let l = build_lattice(1, 8, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(9.0, 40.0, 9.0, Vertex::Phi3).unwrap();
        let h = assemble(&b, &l, &p).unwrap();
        let free = assemble(&b, &l, &p.with_g0(0.0)).unwrap();
        for &(i, j, v) in h.entries() {
            let ni = b.states()[i].particle_count() as i64;
            let nj = b.states()[j].particle_count() as i64;
            if i == j {
                assert_eq!(v, free.get(i, i));
            } else {
                assert_eq!((ni - nj).abs(), 1, "({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_foreign_basis() {
        let l3 = build_lattice(3, 3, 1.0).unwrap();
        let l4 = build_lattice(3, 4, 1.0).unwrap();
        let b = enumerate_basis(&l3);
        let p = ModelParams::new(0.0, 1.0, 0.0, Vertex::Phi4).unwrap();
        assert_eq!(assemble(&b, &l4, &p), Err(Error::BasisMismatch));
    }

    #[test]
    fn operator_storage_helpers() {
        let dense = [2.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 4.0];
        let op = SymmetricOperator::from_dense(3, &dense).unwrap();
        assert_eq!(op.entries().len(), 5);
        assert_eq!(op.get(2, 1), -1.0);
        assert_eq!(op.to_dense(), dense.to_vec());
        let mut y = [0.0; 3];
        op.matvec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, [3.0, 3.0, 3.0]);
        assert!(SymmetricOperator::from_upper_entries(2, vec![(1, 0, 1.0)]).is_err());
        assert!(SymmetricOperator::from_upper_entries(2, vec![(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        assert!(SymmetricOperator::from_upper_entries(0, vec![]).is_err());
    }
}
