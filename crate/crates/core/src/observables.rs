//! Invariant masses, parity labels and ground-state parton distributions.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{Basis, LatticeSpec, Parity};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-8;

/// `E² − |P|²`; negative values mark the imaginary-mass regime.
pub fn invariant_mass_sq(energy: f64, lattice: &LatticeSpec) -> f64 {
    energy * energy - lattice.p_norm_sq()
}

/// One eigenvalue together with its invariant mass and dominant quantum
/// numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct MassLevel {
    pub index: usize,
    pub energy: f64,
    pub mass_sq: f64,
    /// Parity of the block carrying the larger share of `|c|²`; `None` when
    /// no eigenvector was computed.
    pub parity: Option<Parity>,
    /// Particle number carrying the largest share of `|c|²`.
    pub dominant_particle_number: Option<usize>,
}

impl MassLevel {
    pub fn mass(&self) -> Option<f64> {
        (self.mass_sq >= 0.0).then(|| libm::sqrt(self.mass_sq))
    }

    pub fn is_imaginary(&self) -> bool {
        self.mass_sq < 0.0
    }
}

/// Levels in ascending energy with invariant masses and parity labels.
pub fn mass_spectrum(spec: &Spectrum, lattice: &LatticeSpec, basis: &Basis) -> Vec<MassLevel> {
    spec.values()
        .iter()
        .enumerate()
        .map(|(n, &energy)| {
            let (parity, dominant) = match spec.vector(n) {
                Some(v) if v.len() == basis.len() => {
                    let weights = particle_number_weights(v, basis);
                    let odd: f64 = weights.iter().skip(1).step_by(2).sum();
                    let even: f64 = weights.iter().step_by(2).sum();
                    let parity = if odd > even {
                        Parity::Odd
                    } else {
                        Parity::Even
                    };
                    let dominant = weights
                        .iter()
                        .enumerate()
                        .fold(
                            (0, -1.0),
                            |best, (k, &w)| if w > best.1 { (k, w) } else { best },
                        )
                        .0;
                    (Some(parity), Some(dominant))
                }
                _ => (None, None),
            };
            MassLevel {
                index: n,
                energy,
                mass_sq: invariant_mass_sq(energy, lattice),
                parity,
                dominant_particle_number: dominant,
            }
        })
        .collect()
}

/// `M_n / M_1` for every level, available only when `M_1` is real and
/// positive.
pub fn mass_ratios(levels: &[MassLevel]) -> Option<Vec<f64>> {
    let m1 = levels.first()?.mass().filter(|m| *m > 0.0)?;
    Some(
        levels
            .iter()
            .map(|l| l.mass().map_or(f64::NAN, |m| m / m1))
            .collect(),
    )
}

/// `|c|²` weight per particle number `0..=max`.
fn particle_number_weights(v: &[f64], basis: &Basis) -> Vec<f64> {
    let mut w = vec![0.0; basis.max_particle_count() + 1];
    for (c, s) in v.iter().zip(basis.states()) {
        w[s.particle_count()] += c * c;
    }
    w
}

fn check_vector(v: &[f64], basis: &Basis) -> Result<()> {
    if v.len() != basis.len() {
        return Err(Error::VectorLength {
            expected: basis.len(),
            found: v.len(),
        });
    }
    let norm = libm::sqrt(v.iter().map(|c| c * c).sum());
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized { norm });
    }
    Ok(())
}

/// `Σ |c|² n(state)`.
pub fn expected_particle_number(v: &[f64], basis: &Basis) -> Result<f64> {
    check_vector(v, basis)?;
    Ok(v.iter()
        .zip(basis.states())
        .map(|(c, s)| c * c * s.particle_count() as f64)
        .sum())
}

/// One momentum-fraction bin `x = numerator/denominator`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionBin {
    pub numerator: u32,
    pub denominator: u32,
    pub value: f64,
}

impl DistributionBin {
    pub fn x(&self) -> f64 {
        f64::from(self.numerator) / f64::from(self.denominator)
    }
}

/// Parton number density over the exact lattice momentum fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub bins: Vec<DistributionBin>,
    pub lattice: LatticeSpec,
    /// Set when the state came from a degenerate eigenvalue, in which case
    /// the solver's particular mixture is reported.
    pub degenerate: bool,
}

impl DistributionTable {
    /// `Σ f̄`, equal to `⟨n⟩`.
    pub fn number_sum(&self) -> f64 {
        self.bins.iter().map(|b| b.value).sum()
    }

    /// `Σ x f̄`, equal to one by momentum conservation.
    pub fn momentum_sum(&self) -> f64 {
        self.bins.iter().map(|b| b.x() * b.value).sum()
    }

    pub fn value_at(&self, numerator: u32) -> f64 {
        self.bins
            .iter()
            .find(|b| b.numerator == numerator)
            .map_or(0.0, |b| b.value)
    }

    /// Every lattice fraction `1/(dN) ..= 1`, zeros included.
    pub fn dense_values(&self) -> Vec<f64> {
        let den = self.denominator();
        let mut out = vec![0.0; den as usize];
        for b in &self.bins {
            out[b.numerator as usize - 1] = b.value;
        }
        out
    }

    pub fn denominator(&self) -> u32 {
        self.lattice.dim() as u32 * self.lattice.half_extent()
    }
}

/// `⟨v| n̂_p |v⟩` accumulated into bins `x = p·P/|P|² = Σp/(dN)`.
/// Bins with exactly zero weight are omitted.
pub fn distribution(v: &[f64], basis: &Basis, lattice: &LatticeSpec) -> Result<DistributionTable> {
    if basis.lattice() != lattice {
        return Err(Error::BasisMismatch);
    }
    check_vector(v, basis)?;
    let den = lattice.dim() as u32 * lattice.half_extent();
    let mut acc = vec![0.0; den as usize];
    for (c, s) in v.iter().zip(basis.states()) {
        let w = c * c;
        for p in s.partons() {
            acc[p.component_sum() as usize - 1] += w;
        }
    }
    let bins = acc
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, &value)| DistributionBin {
            numerator: k as u32 + 1,
            denominator: den,
            value,
        })
        .collect();
    Ok(DistributionTable {
        bins,
        lattice: *lattice,
        degenerate: false,
    })
}

/// Distribution of the lowest eigenvector, flagging a degenerate ground
/// level (gap below `1e-9·(1 + |E₀|)`).
pub fn ground_distribution(
    spec: &Spectrum,
    basis: &Basis,
    lattice: &LatticeSpec,
) -> Result<DistributionTable> {
    let v = spec.vector(0).ok_or(Error::EmptyOperator)?;
    let mut table = distribution(v, basis, lattice)?;
    if let [e0, e1, ..] = spec.values() {
        table.degenerate = (e1 - e0).abs() <= 1e-9 * (1.0 + e0.abs());
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_lattice, enumerate_basis};
    use crate::eigen::eig_sym;
    use crate::model::{ModelParams, Vertex};
    use crate::operator::assemble;

    #[test]
    fn invariant_mass_cases() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        assert_eq!(
            invariant_mass_sq(l.p_norm(), &l),
            l.p_norm() * l.p_norm() - 27.0
        );
        assert!(invariant_mass_sq(l.p_norm(), &l).abs() < 1e-13);
        let e = libm::sqrt(28.0);
        assert!((invariant_mass_sq(e, &l) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn free_massless_spectrum_is_threefold_degenerate() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let h = assemble(
            &b,
            &l,
            &ModelParams::new(0.0, 0.0, 0.0, Vertex::Phi4).unwrap(),
        )
        .unwrap();
        let s = eig_sym(&h, true).unwrap();
        let levels = mass_spectrum(&s, &l, &b);
        for lvl in &levels[..3] {
            assert!(lvl.mass_sq.abs() < 1e-12);
        }
        assert!(levels[3].mass_sq > 1.0);
        let t = ground_distribution(&s, &b, &l).unwrap();
        assert!(t.degenerate);
    }

    #[test]
    fn single_state_basis_single_level() {
        let l = build_lattice(3, 1, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let h = assemble(
            &b,
            &l,
            &ModelParams::new(0.5, 1.0, 0.0, Vertex::Phi4).unwrap(),
        )
        .unwrap();
        let levels = mass_spectrum(&eig_sym(&h, true).unwrap(), &l, &b);
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].parity, Some(Parity::Odd));
        assert_eq!(levels[0].dominant_particle_number, Some(1));
    }

    #[test]
    fn particle_number_expectations() {
        let l = build_lattice(1, 4, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let mut v = vec![0.0; b.len()];
        let two = b
            .states()
            .iter()
            .position(|s| s.particle_count() == 2)
            .unwrap();
        v[two] = 1.0;
        assert_eq!(expected_particle_number(&v, &b).unwrap(), 2.0);

        let mut v = vec![0.0; b.len()];
        let one = b
            .states()
            .iter()
            .position(|s| s.particle_count() == 1)
            .unwrap();
        let three = b
            .states()
            .iter()
            .position(|s| s.particle_count() == 3)
            .unwrap();
        v[one] = core::f64::consts::FRAC_1_SQRT_2;
        v[three] = core::f64::consts::FRAC_1_SQRT_2;
        assert!((expected_particle_number(&v, &b).unwrap() - 2.0).abs() < 1e-15);

        v[one] = 1.0;
        assert!(matches!(
            expected_particle_number(&v, &b),
            Err(Error::Unnormalized { .. })
        ));
        assert!(matches!(
            expected_particle_number(&v[1..], &b),
            Err(Error::VectorLength { .. })
        ));
    }

    #[test]
    fn free_phi3_ground_state_is_single_parton() {
        let l = build_lattice(1, 11, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let h = assemble(
            &b,
            &l,
            &ModelParams::new(9.0, 0.0, 9.0, Vertex::Phi3).unwrap(),
        )
        .unwrap();
        let s = eig_sym(&h, true).unwrap();
        assert!((s.values()[0] - libm::sqrt(130.0)).abs() < 1e-12);
        let t = ground_distribution(&s, &b, &l).unwrap();
        assert!(!t.degenerate);
        assert_eq!(t.bins.len(), 1);
        assert_eq!((t.bins[0].x(), t.bins[0].value), (1.0, 1.0));
        assert_eq!(
            expected_particle_number(s.vector(0).unwrap(), &b).unwrap(),
            1.0
        );
    }

    #[test]
    fn ratios_need_real_positive_ground_mass() {
        let lvl = |m2: f64| MassLevel {
            index: 0,
            energy: 0.0,
            mass_sq: m2,
            parity: None,
            dominant_particle_number: None,
        };
        assert!(mass_ratios(&[lvl(-1.0), lvl(4.0)]).is_none());
        assert_eq!(mass_ratios(&[lvl(1.0), lvl(4.0)]).unwrap(), vec![1.0, 2.0]);
    }
}
