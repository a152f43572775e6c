use std::f64::consts::PI;

use nalgebra::DMatrix;
use nlheat::fock::{
    choose_cutoff, thermal_probability, Branch, Circuit, CircuitElement, FockCutoff, ModeIndex, MultiModeState,
};
use nlheat::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cut(d: usize) -> FockCutoff {
    FockCutoff::new(d).unwrap()
}

fn normalized(raw: Vec<(f64, f64)>) -> Vec<Complex64> {
    let v: Vec<Complex64> = raw.into_iter().map(|(a, b)| c(a, b)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn element_strategy() -> impl Strategy<Value = CircuitElement> {
    let (a, b) = (ModeIndex(0), ModeIndex(1));
    prop_oneof![
        (0.0..PI / 2.0, any::<bool>()).prop_map(move |(th, flip)| {
            let (x, y) = if flip { (b, a) } else { (a, b) };
            CircuitElement::beam_splitter(th.cos(), th.sin(), x, y).unwrap()
        }),
        (-PI..PI, 0usize..2).prop_map(|(phi, m)| CircuitElement::phase_shift(phi, ModeIndex(m))),
        (-PI..PI, 1u32..3).prop_map(move |(chi, s)| CircuitElement::cross_kerr(chi, s, a, b).unwrap()),
        (-PI..PI, 1u32..4).prop_map(move |(g, k)| CircuitElement::k_photon_exchange(g, k, a, b).unwrap()),
        (-PI..PI, 0usize..2).prop_map(|(chi, m)| CircuitElement::self_kerr(chi, ModeIndex(m))),
    ]
}

fn state_strategy() -> impl Strategy<Value = MultiModeState> {
    (1usize..=8, 1usize..=8, 1usize..=3).prop_flat_map(|(da, db, nb)| {
        let len = da * db;
        (
            prop::collection::vec((0.05f64..1.0, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)), nb),
            Just((da, db)),
        )
            .prop_filter_map("zero vector", move |(raw, (da, db))| {
                let total: f64 = raw.iter().map(|(w, _)| w).sum();
                let branches: Vec<Branch> = raw
                    .into_iter()
                    .map(|(w, amps)| {
                        let sq: f64 = amps.iter().map(|(x, y)| x * x + y * y).sum();
                        (sq > 1e-6).then(|| Branch::new(w / total, normalized(amps)))
                    })
                    .collect::<Option<_>>()?;
                MultiModeState::from_branches(vec![cut(da), cut(db)], branches).ok()
            })
    })
}

fn photon_moment(state: &MultiModeState) -> f64 {
    state.total_mean_photon()
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn density(state: &MultiModeState) -> DMatrix<Complex64> {
    state.density_matrix().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_circuits_are_unitary_and_conserve_photons(
        state in state_strategy(),
        elements in prop::collection::vec(element_strategy(), 1..6),
    ) {
        let circuit = Circuit::new(elements);
        let out = state.apply_circuit(&circuit).unwrap();
        for (b_in, b_out) in state.branches().iter().zip(out.branches()) {
            let norm: f64 = b_out.amplitudes().iter().map(|x| x.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-8);
            prop_assert_eq!(b_in.weight(), b_out.weight());
        }
        prop_assert!((photon_moment(&out) - photon_moment(&state)).abs() < 1e-8);

        // element matrices: U^dagger U = I
        for e in circuit.elements() {
            let u = e.unitary(state.dims()).unwrap();
            let defect = max_abs(&(u.adjoint() * &u - DMatrix::<Complex64>::identity(u.nrows(), u.ncols())));
            prop_assert!(defect < 1e-8);
        }
    }

    #[test]
    fn inverse_circuit_restores_the_state(
        state in state_strategy(),
        elements in prop::collection::vec(element_strategy(), 1..6),
    ) {
        let circuit = Circuit::new(elements);
        let back = state.apply_circuit(&circuit).unwrap().apply_circuit(&circuit.inverse()).unwrap();
        for (x, y) in state.branches().iter().zip(back.branches()) {
            let overlap: Complex64 = x.amplitudes().iter().zip(y.amplitudes()).map(|(p, q)| p.conj() * q).sum();
            prop_assert!((overlap.norm_sqr() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn branch_evolution_matches_density_matrix_evolution(
        state in state_strategy(),
        elements in prop::collection::vec(element_strategy(), 1..4),
    ) {
        let circuit = Circuit::new(elements);
        let mut u = DMatrix::<Complex64>::identity(state.dim(), state.dim());
        for e in circuit.elements() {
            u = e.unitary(state.dims()).unwrap() * u;
        }
        let expected = &u * density(&state) * u.adjoint();
        let got = density(&state.apply_circuit(&circuit).unwrap());
        prop_assert!(max_abs(&(expected - got)) < 1e-10);
    }

    #[test]
    fn reduced_states_are_density_matrices(state in state_strategy(), mode in 0usize..2) {
        let rho = state.reduced_density(ModeIndex(mode)).unwrap();
        let trace: Complex64 = rho.diagonal().iter().sum();
        prop_assert!((trace.re - 1.0).abs() < 1e-10 && trace.im.abs() < 1e-12);
        prop_assert!(max_abs(&(&rho - rho.adjoint())) < 1e-12);
        let eig = nlheat::thermo::passive_counterpart(&rho).unwrap();
        prop_assert!(eig.iter().all(|&l| l > -1e-12));
    }
}

#[test]
fn cutoff_matches_direct_tail_summation() {
    let (nbar, eps) = (2.0, 1e-8);
    let mut mass = 0.0;
    let mut d = 0;
    while 1.0 - mass >= eps {
        mass += thermal_probability(nbar, d);
        d += 1;
    }
    assert_eq!(choose_cutoff(nbar, eps).unwrap().dim(), d);
}

#[test]
fn thermal_mean_within_tail() {
    let d = choose_cutoff(2.0, 1e-10).unwrap();
    let s = MultiModeState::thermal(2.0, d).unwrap();
    assert!((s.mean_photon(ModeIndex(0)).unwrap() - 2.0).abs() < 1e-10 * d.dim() as f64);
}

#[test]
fn cross_kerr_phase_on_one_one() {
    let chi_t = 0.37;
    let input = MultiModeState::tensor(&[
        MultiModeState::number(1, cut(3)).unwrap(),
        MultiModeState::number(1, cut(3)).unwrap(),
    ])
    .unwrap();
    let e = CircuitElement::cross_kerr(chi_t, 1, ModeIndex(0), ModeIndex(1)).unwrap();
    let out = input.apply(&e).unwrap();
    let amps = out.branches()[0].amplitudes();
    // |1,1> sits at index 1*3 + 1
    let expected = Complex64::from_polar(1.0, -chi_t);
    assert!((amps[4] - expected).norm() < 1e-14);
    assert!(amps.iter().enumerate().all(|(i, a)| i == 4 || a.norm() == 0.0));
}

#[test]
fn single_photon_exchange_against_two_level_oracle() {
    // On span{|1,0>, |0,1>} the generator is sigma_x, so exp(-i g sigma_x)
    // sends |1,0> to cos g |1,0> - i sin g |0,1>.
    for g in [0.3, PI / 2.0, 2.2] {
        let input = MultiModeState::tensor(&[
            MultiModeState::number(1, cut(2)).unwrap(),
            MultiModeState::number(0, cut(2)).unwrap(),
        ])
        .unwrap();
        let e = CircuitElement::k_photon_exchange(g, 1, ModeIndex(0), ModeIndex(1)).unwrap();
        let amps = input.apply(&e).unwrap().branches()[0].amplitudes().to_vec();
        // index = n_a * 2 + n_b
        assert!((amps[2] - c(g.cos(), 0.0)).norm() < 1e-12);
        assert!((amps[1] - c(0.0, -g.sin())).norm() < 1e-12);
    }
}

#[test]
fn balanced_splitter_hong_ou_mandel() {
    let input = MultiModeState::tensor(&[
        MultiModeState::number(1, cut(3)).unwrap(),
        MultiModeState::number(1, cut(3)).unwrap(),
    ])
    .unwrap();
    let out = input
        .apply(&CircuitElement::balanced_beam_splitter(ModeIndex(0), ModeIndex(1)))
        .unwrap();
    let amps = out.branches()[0].amplitudes();
    assert!(amps[4].norm() < 1e-12, "coincidence amplitude {}", amps[4]);
    assert!((amps[2].norm_sqr() - 0.5).abs() < 1e-12 && (amps[6].norm_sqr() - 0.5).abs() < 1e-12);
}

#[test]
fn cutoff_doubling_leaves_observables_stable() {
    let eps = 1e-10;
    let circuit = Circuit::new(vec![
        CircuitElement::balanced_beam_splitter(ModeIndex(0), ModeIndex(1)),
        CircuitElement::cross_kerr(0.9, 1, ModeIndex(0), ModeIndex(1)).unwrap(),
        CircuitElement::balanced_beam_splitter(ModeIndex(0), ModeIndex(1)),
    ]);
    let run = |d: FockCutoff| {
        let s = MultiModeState::tensor(&[
            MultiModeState::thermal(1.0, d).unwrap(),
            MultiModeState::vacuum(vec![d]).unwrap(),
        ])
        .unwrap();
        let out = s.apply_circuit(&circuit).unwrap();
        (out.photon_pmf(ModeIndex(0)).unwrap(), out.mean_photon(ModeIndex(0)).unwrap())
    };
    let d = choose_cutoff(1.0, eps).unwrap();
    let (pmf, mean) = run(d);
    let (pmf2, mean2) = run(cut(2 * d.dim()));
    let pmf_change = pmf.iter().zip(&pmf2).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(pmf_change < 10.0 * eps, "pmf change {pmf_change:e}");
    // The cutoff bounds tail probability, so first moments move by up to
    // about d times the tail mass.
    let mean_change = (mean - mean2).abs();
    assert!(mean_change < d.dim() as f64 * eps, "mean change {mean_change:e}");
}

#[test]
fn thermal_product_survives_linear_circuits_unchanged() {
    let d = choose_cutoff(1.5, 1e-10).unwrap();
    let t = MultiModeState::thermal(1.5, d).unwrap();
    let input = MultiModeState::tensor(&[t.clone(), t]).unwrap();
    let circuit = Circuit::new(vec![
        CircuitElement::beam_splitter(0.6, 0.8, ModeIndex(0), ModeIndex(1)).unwrap(),
        CircuitElement::phase_shift(1.1, ModeIndex(1)),
        CircuitElement::balanced_beam_splitter(ModeIndex(1), ModeIndex(0)),
    ]);
    let before = density(&input);
    let after = density(&input.apply_circuit(&circuit).unwrap());
    assert!(max_abs(&(before - after)) < 1e-12);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(FockCutoff::new(0).is_err());
    assert!(CircuitElement::beam_splitter(0.6, 0.7, ModeIndex(0), ModeIndex(1)).is_err());
    assert!(CircuitElement::cross_kerr(0.1, 1, ModeIndex(0), ModeIndex(0)).is_err());
    assert!(MultiModeState::thermal(-1.0, cut(4)).is_err());
    let s = MultiModeState::vacuum(vec![cut(2), cut(2)]).unwrap();
    assert!(s.apply(&CircuitElement::phase_shift(0.1, ModeIndex(2))).is_err());
    assert!(MultiModeState::from_branches(vec![cut(2)], vec![Branch::new(1.0, vec![c(1.0, 0.0), c(1.0, 0.0)])]).is_err());
}
