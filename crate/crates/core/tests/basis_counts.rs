use breitham_core::{build_lattice, enumerate_basis, satisfies_breit, FockState, Momentum};
use proptest::prelude::*;

/// Number of multisets of vectors in `[1, N]^d` summing to `(N, .., N)`,
/// by unbounded-knapsack over the generating function `Π_m 1/(1 − x^m)`.
fn count_by_generating_function(d: usize, n: usize) -> u64 {
    let side = n + 1;
    let size = side.pow(d as u32);
    let decode = |mut idx: usize| {
        let mut c = vec![0usize; d];
        for x in c.iter_mut() {
            *x = idx % side;
            idx /= side;
        }
        c
    };
    let encode = |c: &[usize]| c.iter().rev().fold(0, |acc, &x| acc * side + x);
    let mut ways = vec![0u64; size];
    ways[0] = 1;
    for m in 0..size {
        let mode = decode(m);
        if mode.contains(&0) {
            continue;
        }
        for t in 0..size {
            let target = decode(t);
            if target.iter().zip(&mode).all(|(a, b)| a >= b) {
                let from: Vec<usize> = target.iter().zip(&mode).map(|(a, b)| a - b).collect();
                ways[t] += ways[encode(&from)];
            }
        }
    }
    ways[size - 1]
}

#[test]
fn counts_match_generating_function() {
    for d in 1..=3 {
        for n in 1..=6 {
            let b = enumerate_basis(&build_lattice(d, n as i64, 1.0).unwrap());
            assert_eq!(
                b.len() as u64,
                count_by_generating_function(d, n),
                "d={d} N={n}"
            );
        }
    }
    assert_eq!(count_by_generating_function(1, 11), 56);
}

#[test]
fn every_state_is_admissible_and_conserves_momentum() {
    for d in 1..=3 {
        for n in 1..=5 {
            let l = build_lattice(d, n, 1.0).unwrap();
            let b = enumerate_basis(&l);
            let p = l.total_momentum();
            for s in b.states() {
                assert!(s.particle_count() >= 1 && s.particle_count() <= n as usize);
                assert_eq!(s.total_momentum(), Some(p));
                for k in s.partons() {
                    assert!(k.components().iter().all(|&c| c >= 1 && c <= n as i32));
                    assert!(satisfies_breit(k, &l).unwrap());
                }
            }
            let unit = Momentum::new(&vec![1; d]).unwrap();
            let full = FockState::new(vec![unit; n as usize]);
            assert!(b.index_of(&full).is_some());
            assert_eq!(b.max_particle_count(), n as usize);
        }
    }
}

#[test]
fn enumeration_is_deterministic_and_sorted() {
    let l = build_lattice(3, 4, 1.0).unwrap();
    let a = enumerate_basis(&l);
    let b = enumerate_basis(&l);
    assert_eq!(a.states(), b.states());
    assert!(a.states().windows(2).all(|w| w[0] < w[1]));
    for (i, s) in a.states().iter().enumerate() {
        assert_eq!(a.index_of(s), Some(i));
    }
}

proptest! {
    #[test]
    fn breit_criterion_matches_sphere_form(comps in proptest::collection::vec(-8i32..=8, 3), n in 1i64..=6) {
        let l = build_lattice(3, n, 1.0).unwrap();
        let p = Momentum::new(&comps).unwrap();
        let half = n as f64 / 2.0;
        let lhs: f64 = comps.iter().map(|&c| (c as f64 - half).powi(2)).sum();
        let rhs = 3.0 * half * half;
        prop_assert_eq!(satisfies_breit(&p, &l).unwrap(), lhs <= rhs + 1e-12);
    }
}
