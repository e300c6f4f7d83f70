use breitham::format::*;
use breitham_core::{
    build_lattice, eig_sym, enumerate_basis, find_kappa_crit, mass_spectrum, ModelParams, Parity,
    PhiFourSetup, ScalingFit, ScanRecord, SymmetricOperator, Vertex,
};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0)
    ]
}

fn meta() -> Meta {
    Meta {
        config: vec![("dim".into(), "3".into())],
        lattice: Some(build_lattice(3, 4, 1.0).unwrap()),
        extra: vec!["note".into()],
    }
}

proptest! {
    #[test]
    fn floats_round_trip(x in finite()) {
        prop_assert_eq!(fmt_float(x, 17).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn points_round_trip(pts in proptest::collection::vec((finite(), finite()), 0..20)) {
        let back = parse_points(&write_points(&pts, &meta(), 17)).unwrap();
        prop_assert_eq!(back, pts);
    }

    #[test]
    fn scan_round_trip(
        rows in proptest::collection::vec(
            (finite(), finite(), finite(), finite(), proptest::collection::vec(finite(), 6)),
            1..8,
        )
    ) {
        let records: Vec<ScanRecord> = rows
            .iter()
            .map(|(l, k, m, g, v)| ScanRecord {
                lambda: *l,
                kappa: *k,
                m0_sq: *m,
                g0: *g,
                energies: v[..3].to_vec(),
                mass_sq: v[3..].to_vec(),
                parities: vec![Some(Parity::Odd); 3],
            })
            .collect();
        let back = parse_scan(&write_scan(&records, 3, &[], &meta(), 17)).unwrap();
        let want: Vec<ScanRow> = records.iter().map(ScanRow::from).collect();
        prop_assert_eq!(back, want);
    }

    #[test]
    fn distribution_round_trip(rows in proptest::collection::vec((finite(), finite(), finite()), 0..30)) {
        let back = parse_distribution(&write_distribution_sweep(&rows, &meta(), 17)).unwrap();
        let want: Vec<DistributionRow> = rows
            .iter()
            .map(|&(x, g0, f_bar)| DistributionRow { x, g0: Some(g0), f_bar })
            .collect();
        prop_assert_eq!(back, want);
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
        let back = parse_distribution(&write_distribution(&pairs, &meta(), 17)).unwrap();
        prop_assert!(back.iter().zip(&pairs).all(|(r, p)| r.x == p.0 && r.f_bar == p.1 && r.g0.is_none()));
    }

    #[test]
    fn fit_round_trip(v in proptest::collection::vec(finite(), 8), n in 0usize..1000) {
        let fit = ScalingFit {
            amplitude: v[0],
            kappa_crit: v[1],
            kappa_min: v[2],
            kappa_max: v[3],
            points_used: n,
            log_corrected_rms: v[4],
            power_amplitude: v[5],
            exponent: v[6],
            power_rms: v[7],
        };
        prop_assert_eq!(parse_fit(&write_fit(&fit, &meta(), 17)).unwrap(), fit);
    }

    #[test]
    fn operator_round_trip(vals in proptest::collection::vec(finite(), 10)) {
        let mut dense = vec![0.0; 16];
        let mut it = vals.iter();
        for i in 0..4 {
            for j in i..4 {
                let x = *it.next().unwrap();
                dense[i * 4 + j] = x;
                dense[j * 4 + i] = x;
            }
        }
        let op = SymmetricOperator::from_dense(4, &dense).unwrap();
        let back = parse_operator(&write_operator(&op, &meta(), 17)).unwrap();
        prop_assert_eq!(back.dim, 4);
        prop_assert_eq!(back.entries.as_slice(), op.entries());
    }
}

#[test]
fn basis_round_trip_all_small_lattices() {
    for d in 1..=3 {
        for n in 1..=4 {
            let l = build_lattice(d, n, 1.0).unwrap();
            let b = enumerate_basis(&l);
            let back = parse_basis(&write_basis(&b, &meta())).unwrap();
            assert_eq!(back.states, b.states());
            assert_eq!((back.dim, back.half_extent as i64), (d, n));
        }
    }
}

#[test]
fn levels_and_critical_round_trip() {
    let l = build_lattice(3, 4, 1.0).unwrap();
    let b = enumerate_basis(&l);
    let p = ModelParams::new(-2.0, 10.0, 0.0, Vertex::Phi4).unwrap();
    let s = eig_sym(&breitham_core::assemble(&b, &l, &p).unwrap(), true).unwrap();
    let levels = mass_spectrum(&s, &l, &b);
    assert!(levels.iter().any(|x| x.is_imaginary()));
    let back = parse_levels(&write_levels(&levels, &meta(), 17)).unwrap();
    for (r, lvl) in back.iter().zip(&levels) {
        let want = LevelRow::from(lvl);
        assert_eq!(
            (r.n, r.energy, r.mass_sq, r.parity),
            (want.n, want.energy, want.mass_sq, want.parity)
        );
        assert!(r.mass == want.mass || (r.mass.is_nan() && want.mass.is_nan()));
    }

    let setup = PhiFourSetup::new(&b, &l, 0.0, 1).unwrap();
    let est = find_kappa_crit(&setup, 0.01, 1e-6)
        .unwrap()
        .with_reference(0.126968);
    let rows = parse_critical(&write_critical(std::slice::from_ref(&est), &meta(), 17)).unwrap();
    assert_eq!(rows, vec![CriticalRow::from(&est)]);
}
