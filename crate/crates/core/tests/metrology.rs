use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use nlheat::fock::{Branch, FockCutoff, ModeIndex, MultiModeState};
use nlheat::metrology::{
    evolve_to_phase_shifter, input_state, mzi_qfi, phase_error_curve, qfi, qfi_closed_form, qfi_dense, qfi_with_floor,
    InputFamily, InputKind, MziSpec, Nonlinearity, EIG_FLOOR,
};
use nlheat::Complex64;
use proptest::prelude::*;

fn cut(d: usize) -> FockCutoff {
    FockCutoff::new(d).unwrap()
}

fn spec(input: InputKind, nonlinearity: Nonlinearity, chi: f64, phi: f64, eps: f64) -> MziSpec {
    MziSpec {
        input,
        nonlinearity,
        chi,
        phi,
        tail_epsilon: eps,
    }
}

/// `4 Var(n_a)` of a pure two-mode state.
fn variance_oracle(amps: &[Complex64], db: usize) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (x, a) in amps.iter().enumerate() {
        let n = (x / db) as f64;
        m1 += n * a.norm_sqr();
        m2 += n * n * a.norm_sqr();
    }
    4.0 * (m2 - m1 * m1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pure_state_qfi_is_four_times_the_variance(
        da in 1usize..=6,
        db in 1usize..=6,
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
    ) {
        let mut amps: Vec<Complex64> = raw[..da * db].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        amps.iter_mut().for_each(|z| *z /= norm);
        let oracle = variance_oracle(&amps, db);
        let state = MultiModeState::from_branches(vec![cut(da), cut(db)], vec![Branch::new(1.0, amps)]).unwrap();
        prop_assert!((qfi(&state, ModeIndex(0)).unwrap().fisher_information - oracle).abs() < 1e-8);
        prop_assert!((qfi_dense(&state, ModeIndex(0)).unwrap().fisher_information - oracle).abs() < 1e-8);
    }

    #[test]
    fn low_rank_and_dense_routes_agree_on_mixtures(
        raw in prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16), 1..5),
        weights in prop::collection::vec(0.05f64..1.0, 5),
    ) {
        let total: f64 = weights[..raw.len()].iter().sum();
        let mut branches = Vec::new();
        for (v, w) in raw.iter().zip(&weights) {
            let amps: Vec<Complex64> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            branches.push(Branch::new(w / total, amps.into_iter().map(|z| z / norm).collect()));
        }
        let state = MultiModeState::from_branches(vec![cut(4), cut(4)], branches).unwrap();
        for mode in [ModeIndex(0), ModeIndex(1)] {
            let a = qfi(&state, mode).unwrap().fisher_information;
            let b = qfi_dense(&state, mode).unwrap().fisher_information;
            prop_assert!((a - b).abs() < 1e-8 * (1.0 + b), "{} vs {}", a, b);
        }
    }
}

#[test]
fn fock_input_has_no_phase_information() {
    let s = MultiModeState::tensor(&[MultiModeState::number(3, cut(5)).unwrap(), MultiModeState::vacuum(vec![cut(4)]).unwrap()])
        .unwrap();
    assert_eq!(qfi(&s, ModeIndex(0)).unwrap().fisher_information, 0.0);
    assert!(qfi(&s, ModeIndex(0)).unwrap().min_phase_error.is_infinite());
}

#[test]
fn evolution_examples() {
    let vac = spec(InputKind::Coherent(0.0), Nonlinearity::CrossKerr, 0.0, 0.0, 1e-10);
    let out = evolve_to_phase_shifter(&vac).unwrap();
    assert!((out.branches()[0].amplitudes()[0].norm() - 1.0).abs() < 1e-14);

    let one = spec(InputKind::Number(1), Nonlinearity::CrossKerr, FRAC_PI_2, 0.3, 1e-10);
    let out = evolve_to_phase_shifter(&one).unwrap();
    let norm: f64 = out.branches()[0].amplitudes().iter().map(|z| z.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-10);

    let eps = 1e-10;
    let th = spec(InputKind::Thermal(1.0), Nonlinearity::CrossKerr, FRAC_PI_2, 0.0, eps);
    let input = input_state(&th).unwrap();
    let out = evolve_to_phase_shifter(&th).unwrap();
    assert!((out.total_mean_photon() - input.total_mean_photon()).abs() < 1e-12);
    assert!((out.total_mean_photon() - 1.0).abs() < eps * input.dims()[0].dim() as f64);
}

#[test]
fn fisher_information_does_not_depend_on_the_phase() {
    for input in [InputKind::Thermal(1.5), InputKind::Coherent(2.0), InputKind::Number(3)] {
        let base = mzi_qfi(&spec(input, Nonlinearity::CrossKerr, 1.1, 0.0, 1e-10)).unwrap().fisher_information;
        for phi in [0.4, PI / 3.0, -2.5] {
            let f = mzi_qfi(&spec(input, Nonlinearity::CrossKerr, 1.1, phi, 1e-10)).unwrap().fisher_information;
            assert!((f - base).abs() < 1e-8, "{input:?}, phi {phi}: {f} vs {base}");
        }
    }
}

#[test]
fn eigenvalue_floor_sensitivity() {
    for input in [InputKind::Thermal(2.0), InputKind::Coherent(4.0)] {
        let state = evolve_to_phase_shifter(&spec(input, Nonlinearity::CrossKerr, FRAC_PI_2, 0.0, 1e-12)).unwrap();
        let base = qfi(&state, ModeIndex(0)).unwrap().fisher_information;
        for factor in [0.5, 2.0] {
            let f = qfi_with_floor(&state, ModeIndex(0), EIG_FLOOR * factor).unwrap().fisher_information;
            assert!(((f - base) / base).abs() < 1e-3, "{input:?} x{factor}: {f} vs {base}");
        }
    }
}

#[test]
fn number_state_output_matches_dense_unitary_oracle() {
    // The probe state is pure, so F = 4 Var(n_a) of U |n, 0> with U built
    // from dense element matrices.
    for n in [1usize, 2, 4, 6] {
        let s = spec(InputKind::Number(n), Nonlinearity::CrossKerr, FRAC_PI_2, 0.0, 1e-12);
        let dims = [cut(n + 1), cut(n + 1)];
        let dim = (n + 1) * (n + 1);
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for e in s.circuit().elements() {
            u = e.unitary(&dims).unwrap() * u;
        }
        let mut e0 = DVector::<Complex64>::zeros(dim);
        e0[n * (n + 1)] = Complex64::new(1.0, 0.0);
        let out = &u * e0;
        let oracle = variance_oracle(out.as_slice(), n + 1);
        let f = mzi_qfi(&s).unwrap().fisher_information;
        assert!((f - oracle).abs() < 1e-9, "n {n}: {f} vs {oracle}");
        // measured: the pi/2 cross-Kerr interferometer gives F = n for Fock input
        assert!((f - n as f64).abs() < 1e-9, "n {n}: {f}");
    }
}

#[test]
fn thermal_fisher_information_grows_with_intensity() {
    let grid = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let curve = phase_error_curve(InputFamily::Thermal, Nonlinearity::CrossKerr, &grid, FRAC_PI_2, 1e-10).unwrap();
    assert!(curve.windows(2).all(|w| w[1].fisher_information > w[0].fisher_information));
    for p in &curve {
        assert!((p.dphi_min - p.fisher_information.powf(-0.5)).abs() < 1e-15);
        assert_eq!(p.dphi_sql, 1.0 / p.nbar.sqrt());
        assert_eq!(p.dphi_hl, 1.0 / p.nbar);
    }
    // thermal nbar = 2 against nbar^2 + nbar = 6
    assert!((curve[1].fisher_information - 6.0).abs() < 0.06);
}

#[test]
fn kerr_coupling_beats_the_linear_interferometer() {
    let grid = [2.0, 5.0];
    let lin = phase_error_curve(InputFamily::Thermal, Nonlinearity::CrossKerr, &grid, 0.0, 1e-10).unwrap();
    let nl = phase_error_curve(InputFamily::Thermal, Nonlinearity::CrossKerr, &grid, FRAC_PI_2, 1e-10).unwrap();
    for (l, n) in lin.iter().zip(&nl) {
        assert!(l.dphi_min.is_finite());
        assert!(l.dphi_min > n.dphi_min, "nbar {}: {} vs {}", l.nbar, l.dphi_min, n.dphi_min);
    }
}

#[test]
fn self_kerr_variant_is_below_the_standard_quantum_limit() {
    let grid = [2.0, 4.0, 6.0];
    let curve = phase_error_curve(InputFamily::Thermal, Nonlinearity::SelfKerr, &grid, FRAC_PI_2, 1e-10).unwrap();
    for p in &curve {
        assert!(p.dphi_min < p.dphi_sql, "nbar {}: {} vs SQL {}", p.nbar, p.dphi_min, p.dphi_sql);
    }
}

#[test]
fn closed_form_values() {
    assert_eq!(qfi_closed_form(InputFamily::Thermal, 5.0), 30.0);
    assert_eq!(qfi_closed_form(InputFamily::Number, 5.0), 25.0);
    assert_eq!(qfi_closed_form(InputFamily::Coherent, 5.0), 22.5);
}

#[test]
fn invalid_specs() {
    assert!(InputKind::with_nbar(InputFamily::Number, 2.5).is_err());
    assert!(mzi_qfi(&spec(InputKind::Thermal(-1.0), Nonlinearity::CrossKerr, 1.0, 0.0, 1e-10)).is_err());
    assert!(mzi_qfi(&spec(InputKind::Thermal(1.0), Nonlinearity::CrossKerr, f64::NAN, 0.0, 1e-10)).is_err());
    let s = MultiModeState::vacuum(vec![cut(2)]).unwrap();
    assert!(qfi(&s, ModeIndex(1)).is_err());
    assert!(qfi_with_floor(&s, ModeIndex(0), -1.0).is_err());
}
