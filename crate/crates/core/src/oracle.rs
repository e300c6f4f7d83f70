//! Literal operator-expansion reference for the Hamiltonian.
//!
//! Every term is written out as an explicit `(creators, annihilators,
//! coefficient)` triple over all ordered momentum tuples and applied to each
//! basis vector with plain occupation bookkeeping. Nothing here is shared
//! with [`crate::operator`]; mode sets, energies and the self-contraction
//! are recomputed from scratch.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::{Basis, FockState, LatticeSpec, Momentum};
use crate::error::{Error, Result};
use crate::model::{ModeSet, ModelParams, Vertex};
use crate::operator::SymmetricOperator;

/// Largest basis the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 200;

struct Term {
    creators: Vec<Momentum>,
    annihilators: Vec<Momentum>,
    coef: f64,
}

fn admissible_modes(lattice: &LatticeSpec) -> Vec<Momentum> {
    let n = lattice.half_extent() as i32;
    let d = lattice.dim();
    let p = lattice.total_momentum();
    let mut out = Vec::new();
    let mut comps = vec![1i32; d];
    loop {
        let k = Momentum::new(&comps).expect("dimension in 1..=3");
        if k.dot(&k) <= k.dot(&p) {
            out.push(k);
        }
        let mut c = d;
        loop {
            if c == 0 {
                return out;
            }
            c -= 1;
            if comps[c] < n {
                comps[c] += 1;
                break;
            }
            comps[c] = 1;
        }
    }
}

fn energy(k: &Momentum, mk_sq: f64, dk: f64) -> f64 {
    let k2: f64 = k
        .components()
        .iter()
        .map(|&c| {
            let x = f64::from(c) * dk;
            x * x
        })
        .sum();
    libm::sqrt(mk_sq + k2)
}

fn contraction(lattice: &LatticeSpec, params: &ModelParams, modes: &[Momentum]) -> f64 {
    let volume = libm::pow(2.0 * PI / lattice.dk(), lattice.dim() as f64);
    let mut sum = 0.0;
    match params.mode_set() {
        ModeSet::Restricted => {
            for k in modes {
                sum += 1.0 / (2.0 * energy(k, params.mk_sq(), lattice.dk()));
            }
        }
        ModeSet::FullLattice => {
            let n = lattice.half_extent() as i32;
            let d = lattice.dim();
            let mut comps = vec![-n; d];
            loop {
                if comps.iter().any(|&c| c != 0) {
                    let k = Momentum::new(&comps).expect("dimension in 1..=3");
                    sum += 1.0 / (2.0 * energy(&k, params.mk_sq(), lattice.dk()));
                }
                let mut c = d;
                let done = loop {
                    if c == 0 {
                        break true;
                    }
                    c -= 1;
                    if comps[c] < n {
                        comps[c] += 1;
                        break false;
                    }
                    comps[c] = -n;
                };
                if done {
                    break;
                }
            }
        }
    }
    sum / volume
}

fn terms(lattice: &LatticeSpec, params: &ModelParams) -> Vec<Term> {
    let modes = admissible_modes(lattice);
    let dk = lattice.dk();
    let mk_sq = params.mk_sq();
    let g0 = params.g0();
    let volume = libm::pow(2.0 * PI / dk, lattice.dim() as f64);
    let w = |k: &Momentum| energy(k, mk_sq, dk);
    let admissible = |k: &Momentum| modes.binary_search(k).is_ok();
    let add = |a: &Momentum, b: &Momentum| a.checked_add(b).expect("small momenta");
    let sub = |a: &Momentum, b: &Momentum| a.checked_sub(b).expect("small momenta");

    let mut out = Vec::new();
    let sigma = match params.vertex() {
        Vertex::Phi4 => contraction(lattice, params, &modes),
        Vertex::Phi3 => 0.0,
    };
    for k in &modes {
        let wk = w(k);
        let coef = wk + params.m_int_sq() / (2.0 * wk) + g0 * sigma / (4.0 * wk);
        out.push(Term {
            creators: vec![*k],
            annihilators: vec![*k],
            coef,
        });
    }

    match params.vertex() {
        Vertex::Phi4 => {
            for k1 in &modes {
                for k2 in &modes {
                    for k3 in &modes {
                        let k4 = sub(&add(k1, k2), k3);
                        if !admissible(&k4) {
                            continue;
                        }
                        let coef =
                            g0 / (16.0 * volume) / libm::sqrt(w(k1) * w(k2) * w(k3) * w(&k4));
                        out.push(Term {
                            creators: vec![*k1, *k2],
                            annihilators: vec![*k3, k4],
                            coef,
                        });
                    }
                }
            }
            for k2 in &modes {
                for k3 in &modes {
                    for k4 in &modes {
                        let k1 = add(&add(k2, k3), k4);
                        if !admissible(&k1) {
                            continue;
                        }
                        let coef =
                            g0 / (24.0 * volume) / libm::sqrt(w(&k1) * w(k2) * w(k3) * w(k4));
                        out.push(Term {
                            creators: vec![*k2, *k3, *k4],
                            annihilators: vec![k1],
                            coef,
                        });
                        out.push(Term {
                            creators: vec![k1],
                            annihilators: vec![*k2, *k3, *k4],
                            coef,
                        });
                    }
                }
            }
        }
        Vertex::Phi3 => {
            let scale = g0 / (4.0 * libm::sqrt(2.0) * libm::sqrt(volume));
            for k2 in &modes {
                for k3 in &modes {
                    let k1 = add(k2, k3);
                    if !admissible(&k1) {
                        continue;
                    }
                    let coef = scale / libm::sqrt(w(&k1) * w(k2) * w(k3));
                    out.push(Term {
                        creators: vec![*k2, *k3],
                        annihilators: vec![k1],
                        coef,
                    });
                    out.push(Term {
                        creators: vec![k1],
                        annihilators: vec![*k2, *k3],
                        coef,
                    });
                }
            }
        }
    }
    out
}

/// Applies `creators · annihilators` (rightmost operator first).
fn apply(state: &BTreeMap<Momentum, u32>, term: &Term) -> Option<(FockState, f64)> {
    for k in &term.annihilators {
        let need = term.annihilators.iter().filter(|q| *q == k).count() as u32;
        if state.get(k).copied().unwrap_or(0) < need {
            return None;
        }
    }
    let mut occ = state.clone();
    let mut amp = 1.0;
    for k in term.annihilators.iter().rev() {
        let n = occ.get_mut(k)?;
        amp *= libm::sqrt(f64::from(*n));
        *n -= 1;
    }
    for k in term.creators.iter().rev() {
        let n = occ.entry(*k).or_insert(0);
        *n += 1;
        amp *= libm::sqrt(f64::from(*n));
    }
    let mut partons = Vec::new();
    for (k, n) in occ {
        partons.extend(core::iter::repeat_n(k, n as usize));
    }
    Some((FockState::new(partons), amp))
}

/// Dense row-major Hamiltonian (both triangles computed independently).
pub fn matrix_element_oracle_dense(
    basis: &Basis,
    lattice: &LatticeSpec,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let dim = basis.len();
    if dim > ORACLE_MAX_DIM {
        return Err(Error::OracleSizeGuard {
            dim,
            max: ORACLE_MAX_DIM,
        });
    }
    if basis.lattice() != lattice {
        return Err(Error::BasisMismatch);
    }
    let terms = terms(lattice, params);
    let mut h = vec![0.0; dim * dim];
    for (j, s) in basis.states().iter().enumerate() {
        let mut occ: BTreeMap<Momentum, u32> = BTreeMap::new();
        for p in s.partons() {
            *occ.entry(*p).or_insert(0) += 1;
        }
        for term in &terms {
            if let Some((target, amp)) = apply(&occ, term) {
                let i = basis.index_of(&target).ok_or(Error::StateOutsideBasis)?;
                h[i * dim + j] += term.coef * amp;
            }
        }
    }
    Ok(h)
}

/// Same contract as [`crate::operator::assemble`], computed by literal
/// expansion. Refuses bases larger than [`ORACLE_MAX_DIM`].
pub fn matrix_element_oracle(
    basis: &Basis,
    lattice: &LatticeSpec,
    params: &ModelParams,
) -> Result<SymmetricOperator> {
    let dense = matrix_element_oracle_dense(basis, lattice, params)?;
    Ok(SymmetricOperator::from_dense(basis.len(), &dense)?.with_params(*params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_lattice, enumerate_basis};

    #[test]
    fn size_guard() {
        let l = build_lattice(1, 20, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(9.0, 1.0, 9.0, Vertex::Phi3).unwrap();
        assert!(matches!(
            matrix_element_oracle(&b, &l, &p),
            Err(Error::OracleSizeGuard { .. })
        ));
    }

    #[test]
    fn free_limit_matches_closed_form() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(0.0, 0.0, 0.0, Vertex::Phi4).unwrap();
        let h = matrix_element_oracle_dense(&b, &l, &p).unwrap();
        let n = b.len();
        for (i, s) in b.states().iter().enumerate() {
            let want: f64 = s
                .partons()
                .iter()
                .map(|k| libm::sqrt(k.norm_sq() as f64))
                .sum();
            assert!((h[i * n + i] - want).abs() < 1e-14);
            for j in 0..n {
                if j != i {
                    assert_eq!(h[i * n + j], 0.0);
                }
            }
        }
    }

    #[test]
    fn oracle_is_symmetric() {
        let l = build_lattice(3, 4, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let p = ModelParams::new(-0.7, 5.0, 0.2, Vertex::Phi4).unwrap();
        let h = matrix_element_oracle_dense(&b, &l, &p).unwrap();
        let n = b.len();
        for i in 0..n {
            for j in 0..n {
                assert!((h[i * n + j] - h[j * n + i]).abs() <= 1e-15 * (1.0 + h[i * n + j].abs()));
            }
        }
    }
}
