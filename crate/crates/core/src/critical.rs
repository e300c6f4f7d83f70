//! κ scans, the critical line and the scaling-law fit of the φ⁴ theory.
//!
//! The critical coupling on a given lattice is the point where the lowest
//! invariant mass squared `M₁²(κ)` changes sign; it is located by bisection.
//! Close to it the mass is expected to follow `M₁ ≈ C τ^{1/2} |ln τ|^{-1/6}`
//! with `τ = 1 − κ/κ_crit`.

use alloc::vec::Vec;

use crate::basis::{Basis, LatticeSpec, Parity};
use crate::eigen::{eig_sym, eig_sym_lowest};
use crate::error::{Error, Result};
use crate::model::{couplings_from_lattice_params, LatticeCouplings, ModeSet, ModelParams};
use crate::observables::{invariant_mass_sq, mass_spectrum};
use crate::operator::OperatorKernel;

/// Fewest points accepted by [`fit_scaling`].
pub const MIN_FIT_POINTS: usize = 5;

/// φ⁴ evaluation context for one lattice: the basis geometry plus the
/// parameters held fixed along a scan.
#[derive(Debug, Clone)]
pub struct PhiFourSetup<'a> {
    kernel: OperatorKernel<'a>,
    mk_sq: f64,
    mode_set: ModeSet,
    levels: usize,
}

impl<'a> PhiFourSetup<'a> {
    pub fn new(basis: &'a Basis, lattice: &LatticeSpec, mk_sq: f64, levels: usize) -> Result<Self> {
        if mk_sq < 0.0 {
            return Err(Error::NegativeKineticMass(mk_sq));
        }
        Ok(Self {
            kernel: OperatorKernel::new(basis, lattice)?,
            mk_sq,
            mode_set: ModeSet::Restricted,
            levels: levels.max(1),
        })
    }

    pub fn with_mode_set(mut self, mode_set: ModeSet) -> Self {
        self.mode_set = mode_set;
        self
    }

    pub fn lattice(&self) -> &LatticeSpec {
        self.kernel.lattice()
    }

    pub fn basis(&self) -> &Basis {
        self.kernel.basis()
    }

    pub fn mk_sq(&self) -> f64 {
        self.mk_sq
    }

    pub fn mode_set(&self) -> ModeSet {
        self.mode_set
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn params(&self, lambda: f64, kappa: f64) -> Result<ModelParams> {
        let lc = LatticeCouplings::new(lambda, kappa)?;
        Ok(
            ModelParams::from_lattice_couplings(lc, self.lattice(), self.mk_sq)?
                .with_mode_set(self.mode_set),
        )
    }

    /// Lowest `E² − |P|²` at `(λ, κ)`, in units of `dk²`.
    pub fn m1_sq(&self, lambda: f64, kappa: f64) -> Result<f64> {
        let op = self.kernel.assemble(&self.params(lambda, kappa)?)?;
        let spec = eig_sym_lowest(&op, 1, false)?;
        Ok(invariant_mass_sq(spec.values()[0], self.lattice()))
    }

    /// Full record for one parameter point.
    pub fn evaluate(&self, lambda: f64, kappa: f64) -> Result<ScanRecord> {
        let lc = LatticeCouplings::new(lambda, kappa)?;
        let (m0_sq, g0) = couplings_from_lattice_params(lc)?;
        let op = self.kernel.assemble(&self.params(lambda, kappa)?)?;
        let spec = eig_sym(&op, true)?;
        let levels = mass_spectrum(&spec, self.lattice(), self.basis());
        let take = self.levels.min(levels.len());
        Ok(ScanRecord {
            lambda,
            kappa,
            m0_sq,
            g0,
            energies: levels[..take].iter().map(|l| l.energy).collect(),
            mass_sq: levels[..take].iter().map(|l| l.mass_sq).collect(),
            parities: levels[..take].iter().map(|l| l.parity).collect(),
        })
    }
}

/// Result of one `(λ, κ)` evaluation. `m0_sq` and `g0` are in lattice units;
/// energies and masses in units of `dk`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub lambda: f64,
    pub kappa: f64,
    pub m0_sq: f64,
    pub g0: f64,
    pub energies: Vec<f64>,
    pub mass_sq: Vec<f64>,
    pub parities: Vec<Option<Parity>>,
}

impl ScanRecord {
    /// `a·M₁` when `M₁² > 0`.
    pub fn ground_mass_lattice_units(&self, lattice: &LatticeSpec) -> Option<f64> {
        let m2 = *self.mass_sq.first()?;
        (m2 > 0.0).then(|| lattice.spacing() * libm::sqrt(m2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    /// Points whose evaluation failed, with the reason; they are skipped.
    pub failures: Vec<(f64, Error)>,
}

/// Non-empty, positive, finite and strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty"));
    }
    if grid.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
        return Err(Error::InvalidGrid(
            "kappa values must be positive and finite",
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("kappa grid must be strictly increasing"));
    }
    Ok(())
}

/// Evaluates every grid point independently, in grid order.
pub fn scan_kappa(setup: &PhiFourSetup<'_>, lambda: f64, grid: &[f64]) -> Result<ScanOutcome> {
    validate_grid(grid)?;
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    let mut records = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for &kappa in grid {
        match setup.evaluate(lambda, kappa) {
            Ok(r) => records.push(r),
            Err(e) => failures.push((kappa, e)),
        }
    }
    Ok(ScanOutcome { records, failures })
}

/// Geometric search for an initial sign change of `M₁²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketSearch {
    pub start: f64,
    pub factor: f64,
    pub max_steps: usize,
}

impl Default for BracketSearch {
    fn default() -> Self {
        Self {
            start: 0.12,
            factor: 1.05,
            max_steps: 60,
        }
    }
}

/// Bisected critical coupling on one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEstimate {
    pub lambda: f64,
    pub half_extent: u32,
    /// Upper end of the symmetric phase: `M₁²(kappa_lo) > 0`.
    pub kappa_lo: f64,
    /// `M₁²(kappa_hi) <= 0`.
    pub kappa_hi: f64,
    pub m1_sq_lo: f64,
    pub m1_sq_hi: f64,
    pub reference: Option<f64>,
}

impl CriticalEstimate {
    pub fn kappa_crit(&self) -> f64 {
        0.5 * (self.kappa_lo + self.kappa_hi)
    }

    pub fn width(&self) -> f64 {
        self.kappa_hi - self.kappa_lo
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }

    /// `κ_crit(reference) / κ_crit^(N)`.
    pub fn alpha(&self) -> Option<f64> {
        self.reference.map(|r| alpha_ratio(r, self.kappa_crit()))
    }
}

pub fn alpha_ratio(kappa_crit_ref: f64, kappa_crit_estimate: f64) -> f64 {
    kappa_crit_ref / kappa_crit_estimate
}

/// [`find_kappa_crit_with`] using the default [`BracketSearch`].
pub fn find_kappa_crit(
    setup: &PhiFourSetup<'_>,
    lambda: f64,
    tol: f64,
) -> Result<CriticalEstimate> {
    find_kappa_crit_with(setup, lambda, tol, BracketSearch::default())
}

/// Brackets the sign change of `M₁²(κ)` geometrically from `search.start`
/// (upward while `M₁² > 0`, downward otherwise) and bisects the bracket to
/// width `<= tol`.
pub fn find_kappa_crit_with(
    setup: &PhiFourSetup<'_>,
    lambda: f64,
    tol: f64,
    search: BracketSearch,
) -> Result<CriticalEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    if !(search.start > 0.0) || !(search.factor > 1.0) {
        return Err(Error::InvalidGrid(
            "bracket search needs start > 0 and factor > 1",
        ));
    }
    let f = |k: f64| setup.m1_sq(lambda, k);
    let mut scanned = Vec::new();
    let f0 = f(search.start)?;
    scanned.push((search.start, f0));

    let (mut lo, mut hi, mut f_lo, mut f_hi) = if f0 > 0.0 {
        let mut prev = (search.start, f0);
        let mut found = None;
        for _ in 0..search.max_steps {
            let k = prev.0 * search.factor;
            let fk = f(k)?;
            scanned.push((k, fk));
            if fk <= 0.0 {
                found = Some((prev.0, k, prev.1, fk));
                break;
            }
            prev = (k, fk);
        }
        found
    } else {
        let mut prev = (search.start, f0);
        let mut found = None;
        for _ in 0..search.max_steps {
            let k = prev.0 / search.factor;
            let fk = f(k)?;
            scanned.push((k, fk));
            if fk > 0.0 {
                found = Some((k, prev.0, fk, prev.1));
                break;
            }
            prev = (k, fk);
        }
        found
    }
    .ok_or(Error::NoBracket { lambda, scanned })?;

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm > 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Ok(CriticalEstimate {
        lambda,
        half_extent: setup.lattice().half_extent(),
        kappa_lo: lo,
        kappa_hi: hi,
        m1_sq_lo: f_lo,
        m1_sq_hi: f_hi,
        reference: None,
    })
}

/// Mass window `a·M₁ ∈ [mass_lo, mass_hi]` selecting fit points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub mass_lo: f64,
    pub mass_hi: f64,
}

impl FitWindow {
    /// `[2/(2N), 0.6]`.
    pub fn default_for(lattice: &LatticeSpec) -> Self {
        Self {
            mass_lo: 1.0 / f64::from(lattice.half_extent()),
            mass_hi: 0.6,
        }
    }

    pub fn contains(&self, mass: f64) -> bool {
        mass >= self.mass_lo && mass <= self.mass_hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Amplitude of `C τ^{1/2} |ln τ|^{-1/6}`.
    pub amplitude: f64,
    pub kappa_crit: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub points_used: usize,
    pub log_corrected_rms: f64,
    /// `A` of the free power law `A τ^ν`.
    pub power_amplitude: f64,
    pub exponent: f64,
    pub power_rms: f64,
}

fn log_corrected_shape(tau: f64) -> f64 {
    libm::sqrt(tau) * libm::pow(libm::log(tau).abs(), -1.0 / 6.0)
}

/// Least-squares fits of `(κ, a·M₁)` points inside `window`.
///
/// The log-corrected amplitude has the closed form `C = Σ M f / Σ f²` with
/// `f = τ^{1/2}|ln τ|^{-1/6}`; the free exponent comes from linear
/// regression of `ln M` on `ln τ`. Both residuals are RMS in `M`. Points
/// with `τ` outside `(0, 1)` or non-positive mass are dropped.
pub fn fit_scaling(
    points: &[(f64, f64)],
    kappa_crit: f64,
    window: FitWindow,
) -> Result<ScalingFit> {
    if !(kappa_crit > 0.0) {
        return Err(Error::NonPositiveKappa(kappa_crit));
    }
    let used: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|(_, m)| *m > 0.0 && window.contains(*m))
        .map(|&(k, m)| (k, 1.0 - k / kappa_crit, m))
        .filter(|&(_, tau, _)| tau > 0.0 && tau < 1.0)
        .collect();
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            found: used.len(),
        });
    }
    let n = used.len() as f64;

    let (mut sfm, mut sff) = (0.0, 0.0);
    for &(_, tau, m) in &used {
        let f = log_corrected_shape(tau);
        sfm += f * m;
        sff += f * f;
    }
    let amplitude = sfm / sff;
    let log_corrected_rms = libm::sqrt(
        used.iter()
            .map(|&(_, tau, m)| {
                let r = m - amplitude * log_corrected_shape(tau);
                r * r
            })
            .sum::<f64>()
            / n,
    );

    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(_, tau, m) in &used {
        let x = libm::log(tau);
        let y = libm::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let power_amplitude = libm::exp((sy - exponent * sx) / n);
    let power_rms = libm::sqrt(
        used.iter()
            .map(|&(_, tau, m)| {
                let r = m - power_amplitude * libm::pow(tau, exponent);
                r * r
            })
            .sum::<f64>()
            / n,
    );

    let kappa_min = used.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let kappa_max = used.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        amplitude,
        kappa_crit,
        kappa_min,
        kappa_max,
        points_used: used.len(),
        log_corrected_rms,
        power_amplitude,
        exponent,
        power_rms,
    })
}

/// `(κ, a·M₁)` for every record with real positive `M₁`.
pub fn ground_mass_points(records: &[ScanRecord], lattice: &LatticeSpec) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| Some((r.kappa, r.ground_mass_lattice_units(lattice)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_lattice, enumerate_basis};

    fn synthetic(c: f64, kappa_crit: f64, taus: &[f64]) -> Vec<(f64, f64)> {
        taus.iter()
            .map(|&t| (kappa_crit * (1.0 - t), c * log_corrected_shape(t)))
            .collect()
    }

    #[test]
    fn recovers_synthetic_amplitude() {
        let taus: Vec<f64> = (1..=20).map(|i| 0.002 * f64::from(i)).collect();
        let pts = synthetic(2.0, 0.125, &taus);
        let w = FitWindow {
            mass_lo: 0.0,
            mass_hi: 10.0,
        };
        let fit = fit_scaling(&pts, 0.125, w).unwrap();
        assert!((fit.amplitude - 2.0).abs() < 1e-10);
        assert!(fit.log_corrected_rms < 1e-12);
        assert!((fit.exponent - 0.5).abs() < 0.1);
        assert!(fit.power_rms > fit.log_corrected_rms);
        assert_eq!(fit.points_used, 20);
    }

    #[test]
    fn window_and_domain_filtering() {
        let mut pts = synthetic(1.0, 0.125, &[0.01, 0.02, 0.03, 0.04]);
        pts.push((0.13, 0.5));
        let w = FitWindow {
            mass_lo: 0.0,
            mass_hi: 10.0,
        };
        assert_eq!(
            fit_scaling(&pts, 0.125, w),
            Err(Error::InsufficientPoints {
                needed: 5,
                found: 4
            })
        );
    }

    #[test]
    fn default_window() {
        let w = FitWindow::default_for(&build_lattice(3, 4, 1.0).unwrap());
        assert_eq!((w.mass_lo, w.mass_hi), (0.25, 0.6));
    }

    #[test]
    fn free_massless_row_has_vanishing_mass() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let setup = PhiFourSetup::new(&b, &l, 0.0, 3).unwrap();
        let out = scan_kappa(&setup, 0.0, &[0.125]).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.records[0].mass_sq[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        let l = build_lattice(3, 1, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let setup = PhiFourSetup::new(&b, &l, 0.0, 1).unwrap();
        assert!(scan_kappa(&setup, 0.01, &[]).is_err());
        assert!(scan_kappa(&setup, 0.01, &[0.12, 0.12]).is_err());
        assert!(scan_kappa(&setup, 0.01, &[-0.1, 0.12]).is_err());
    }

    #[test]
    fn bisection_meets_tolerance_and_sign_invariant() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let setup = PhiFourSetup::new(&b, &l, 0.0, 1).unwrap();
        let est = find_kappa_crit(&setup, 0.01, 1e-6).unwrap();
        assert!(est.width() <= 1e-6);
        assert!(est.m1_sq_lo > 0.0 && est.m1_sq_hi <= 0.0);
        assert!(setup.m1_sq(0.01, est.kappa_lo).unwrap() > 0.0);
        assert!(setup.m1_sq(0.01, est.kappa_hi).unwrap() <= 0.0);
    }

    #[test]
    fn bracket_failure_reports_scan() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let setup = PhiFourSetup::new(&b, &l, 0.0, 1).unwrap();
        let search = BracketSearch {
            start: 0.05,
            factor: 1.01,
            max_steps: 3,
        };
        match find_kappa_crit_with(&setup, 0.01, 1e-6, search) {
            Err(Error::NoBracket { scanned, .. }) => assert_eq!(scanned.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alpha_of_equal_values_is_one() {
        assert_eq!(alpha_ratio(0.126, 0.126), 1.0);
        let e = CriticalEstimate {
            lambda: 0.0,
            half_extent: 4,
            kappa_lo: 0.1,
            kappa_hi: 0.1,
            m1_sq_lo: 1.0,
            m1_sq_hi: -1.0,
            reference: None,
        }
        .with_reference(0.1);
        assert_eq!(e.alpha(), Some(1.0));
    }
}
