use std::f64::consts::PI;

use proptest::prelude::*;

use latticecond::bands::BandData;
use latticecond::conductivity::{estimate_sigma0, sigma_xy, ConductivityCurve};
use latticecond::hamiltonian::{matrix_element, Basis};
use latticecond::model::{derive_geometry, ModelParams, Spin};
use latticecond::scattering::{reflection_ratio, ScatteringInput};

fn desk_params() -> impl Strategy<Value = ModelParams> {
    (
        1usize..=4,
        1usize..=4,
        1usize..=3,
        0.3f64..2.0,
        -2.0f64..2.0,
        any::<bool>(),
    )
        .prop_map(|(hq, hj, hn, lambda, efield, up)| ModelParams {
            lambda,
            efield,
            spin: if up { Spin::Up } else { Spin::Down },
            ..ModelParams::desk(2 * hq + 1, 2 * hj + 1, 2 * hn)
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn elements_are_exactly_symmetric(
        params in desk_params(),
        k in -3.0f64..3.0,
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
    ) {
        let basis = Basis::new(&params);
        let r = basis.from_row(a.index(basis.dim())).unwrap();
        let c = basis.from_row(b.index(basis.dim())).unwrap();
        prop_assert_eq!(
            matrix_element(&params, k, &r, &c).unwrap(),
            matrix_element(&params, k, &c, &r).unwrap()
        );
    }

    #[test]
    fn flattening_round_trips(params in desk_params(), a in any::<prop::sample::Index>()) {
        let basis = Basis::new(&params);
        prop_assert_eq!(basis.dim(), params.q_states * params.j_states);
        let row = a.index(basis.dim());
        let idx = basis.from_row(row).unwrap();
        prop_assert_eq!(idx.row, row);
        prop_assert_eq!(basis.index(idx.n, idx.q).unwrap(), idx);
        prop_assert_eq!(idx.j, params.n_cells as i64 * idx.n - idx.q);
    }

    #[test]
    fn geometry_round_trips_q_max(hq in 1usize..200, lambda in 0.05f64..20.0, hn in 1usize..20) {
        let q = 2 * hq + 1;
        let g = derive_geometry(q, lambda, 2 * hn).unwrap();
        let recomputed = (lambda * g.length * g.length / (2.0 * PI)).round() as i64 / 2;
        prop_assert_eq!(g.q_max, recomputed);
        prop_assert_eq!(g.q_max, hq as i64);
    }

    #[test]
    fn reflection_stays_below_one(
        strength in 0.0f64..1e4,
        theta in 0.0f64..=PI,
        kwave in 0.1f64..10.0,
        mass in 0.1f64..10.0,
    ) {
        let r = reflection_ratio(&ScatteringInput { strength, theta, kwave, mass }).unwrap();
        prop_assert!(r.norm() < 1.0);
    }

    #[test]
    fn reflection_vanishes_near_pi(strength in 0.0f64..1e6, eps in 0.0f64..1e-9) {
        let r = reflection_ratio(&ScatteringInput {
            strength,
            theta: PI - eps,
            kwave: 1.0,
            mass: 1.0,
        })
        .unwrap();
        // |V/A| ~ U (pi - theta), where pi - theta carries one ulp of rounding
        prop_assert!(r.norm() <= 1.01 * strength * (eps + 1e-15));
    }

    #[test]
    fn raising_fermi_level_never_drops_bands(
        mut means in prop::collection::vec(-100.0f64..100.0, 2..8),
        pis in prop::collection::vec(-10.0f64..10.0, 8),
        lo in -120.0f64..90.0,
        step in 0.0f64..30.0,
    ) {
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bands = synthetic_bands(&means, &pis[..means.len()]);
        let below = sigma_xy(&bands, lo);
        let above = sigma_xy(&bands, lo + step);
        if let (Ok(a), Ok(b)) = (below, above) {
            prop_assert!(b.bands_included >= a.bands_included);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1024,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]
    #[test]
    fn sigma0_recovered_under_noise(
        unit in 1.0f64..50.0,
        extra in prop::sample::subsequence(vec![2i64, 3, 4], 1..=3),
        offsets in prop::collection::vec(-0.01f64..0.01, 4),
        jitter in prop::collection::vec(-0.002f64..0.002, 64),
        len in 3usize..6,
    ) {
        let mut multiples = vec![1i64];
        multiples.extend(extra);
        let mut sigma = vec![0.0; len];
        for (i, &n) in multiples.iter().enumerate() {
            let level = n as f64 * unit * (1.0 + offsets[i]);
            for p in 0..len {
                sigma.push(level * (1.0 + jitter[(i * len + p) % jitter.len()]));
            }
        }
        let est = estimate_sigma0(&[curve(sigma)]).unwrap();
        prop_assert!((est.unit - unit).abs() < 0.02 * unit, "unit {} vs {}", est.unit, unit);
    }
}

fn synthetic_bands(means: &[f64], pis: &[f64]) -> BandData {
    BandData {
        params: ModelParams::desk(5, 5, 2),
        l_values: vec![0],
        kvalues: vec![0.0],
        energies: means.iter().map(|&m| vec![m]).collect(),
        px_mean: pis.iter().map(|&p| vec![p]).collect(),
        y_mean: means.iter().map(|_| vec![0.0]).collect(),
        band_mean_energy: means.to_vec(),
        band_momentum_sum: pis.to_vec(),
        degenerate_clusters: 0,
    }
}

fn curve(sigma: Vec<f64>) -> ConductivityCurve {
    ConductivityCurve {
        fermi_level: 0.0,
        efield_values: (0..sigma.len()).map(|i| i as f64 * 0.1).collect(),
        bands_included: vec![0; sigma.len()],
        jump_locations: Vec::new(),
        sigma_over_alpha: sigma,
        sigma0_over_alpha: None,
        integer_steps: None,
    }
}
