//! Thread-parallel drivers. Every work item is evaluated by the same
//! single-threaded code path and results are merged in input order, so the
//! output does not depend on the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;

use breitham_core::critical::validate_grid;
use breitham_core::operator::OperatorKernel;
use breitham_core::{
    assemble, eig_sym_lowest, expected_particle_number, ground_distribution, scan_kappa, Basis,
    DistributionTable, LatticeSpec, ModelParams, PhiFourSetup, ScanOutcome, SymmetricOperator,
};

use crate::error::{CliError, Result};

pub fn thread_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::config(format!("cannot start {workers} workers: {e}")))
}

/// [`scan_kappa`] with grid points spread over `workers` threads.
pub fn scan_kappa_parallel(
    setup: &PhiFourSetup<'_>,
    lambda: f64,
    grid: &[f64],
    workers: usize,
) -> Result<ScanOutcome> {
    if workers <= 1 {
        return Ok(scan_kappa(setup, lambda, grid)?);
    }
    validate_grid(grid)?;
    if !(lambda >= 0.0) {
        return Err(breitham_core::Error::NegativeLambda(lambda).into());
    }
    let results: Vec<_> = thread_pool(workers)?.install(|| {
        grid.par_iter()
            .map(|&k| (k, setup.evaluate(lambda, k)))
            .collect()
    });
    let mut out = ScanOutcome {
        records: Vec::with_capacity(grid.len()),
        failures: Vec::new(),
    };
    for (k, r) in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push((k, e)),
        }
    }
    Ok(out)
}

/// Ground-state data at one coupling of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub g0: f64,
    pub energy: f64,
    pub mean_particle_number: f64,
    pub table: DistributionTable,
}

fn sweep_point(basis: &Basis, lattice: &LatticeSpec, params: ModelParams) -> Result<SweepPoint> {
    let op = assemble(basis, lattice, &params)?;
    let spec = eig_sym_lowest(&op, 2, true)?;
    let table = ground_distribution(&spec, basis, lattice)?;
    let v = spec.vector(0).expect("vectors requested");
    Ok(SweepPoint {
        g0: params.g0(),
        energy: spec.values()[0],
        mean_particle_number: expected_particle_number(v, basis)?,
        table,
    })
}

/// Ground-state distributions for every `g0` in `grid`, in grid order.
pub fn sweep_g0(
    basis: &Basis,
    lattice: &LatticeSpec,
    params: ModelParams,
    grid: &[f64],
    workers: usize,
) -> Result<Vec<SweepPoint>> {
    let run = |g0: f64| sweep_point(basis, lattice, params.with_g0(g0));
    if workers <= 1 {
        return grid.iter().map(|&g| run(g)).collect();
    }
    thread_pool(workers)?.install(|| grid.par_iter().map(|&g| run(g)).collect())
}

/// Assembly with columns computed in parallel; bitwise equal to
/// [`OperatorKernel::assemble`].
pub fn assemble_parallel(
    kernel: &OperatorKernel<'_>,
    params: &ModelParams,
    workers: usize,
) -> Result<SymmetricOperator> {
    let coeffs = kernel.coefficients(params);
    let columns: Vec<_> = thread_pool(workers)?.install(|| {
        (0..kernel.dim())
            .into_par_iter()
            .map(|j| kernel.column(&coeffs, j))
            .collect()
    });
    let mut entries = Vec::new();
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col? {
            if i <= j {
                entries.push((i, j, v));
            }
        }
    }
    Ok(SymmetricOperator::from_upper_entries(kernel.dim(), entries)?.with_params(*params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use breitham_core::{build_lattice, enumerate_basis, Vertex};

    #[test]
    fn parallel_assembly_is_bitwise_identical() {
        let l = build_lattice(3, 4, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let k = OperatorKernel::new(&b, &l).unwrap();
        let p = ModelParams::new(-0.7, 9.0, 0.0, Vertex::Phi4).unwrap();
        let serial = k.assemble(&p).unwrap();
        for w in [1, 2, 8] {
            assert_eq!(assemble_parallel(&k, &p, w).unwrap(), serial);
        }
    }

    #[test]
    fn scan_merges_in_grid_order() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let setup = PhiFourSetup::new(&b, &l, 0.0, 2).unwrap();
        let grid = [0.10, 0.11, 0.12, 0.13];
        let serial = scan_kappa(&setup, 0.01, &grid).unwrap();
        let par = scan_kappa_parallel(&setup, 0.01, &grid, 4).unwrap();
        assert_eq!(serial, par);
        assert!(scan_kappa_parallel(&setup, 0.01, &[0.12, 0.11], 4).is_err());
    }
}
