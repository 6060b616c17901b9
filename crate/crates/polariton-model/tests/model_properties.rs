use polariton_model::*;
use proptest::prelude::*;
use qdyn_core::{expectation, propagate, DensityMatrix, Method, Operator, C64};

fn params(omega_a: f64, omega_b: f64, omega_0: f64, g: f64) -> ModelParams {
    ModelParams {
        omega_a,
        omega_b,
        omega_0,
        g,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_matches_closed_form(
        wa in 1900.0..2100.0f64,
        wb in 1900.0..2100.0f64,
        w0 in 1900.0..2100.0f64,
        g in 1.0..40.0f64,
    ) {
        let b = polariton_basis(&params(wa, wb, w0, g)).unwrap();
        for (w, up, lp) in [(wa, Polariton::UpA, Polariton::LpA), (wb, Polariton::UpB, Polariton::LpB)] {
            let (hi, lo) = sector_eigenvalues(w, w0, g);
            prop_assert!((b.freq(up) - hi).abs() < 1e-9);
            prop_assert!((b.freq(lp) - lo).abs() < 1e-9);
            // Rabi splitting 2 sqrt(δ² + g²)
            let split = 2.0 * ((0.5 * (w - w0)).powi(2) + g * g).sqrt();
            prop_assert!((b.freq(up) - b.freq(lp) - split).abs() < 1e-9);
        }
        for p in Polariton::ALL {
            let (ph, m) = b.hopfield(p);
            prop_assert!((ph + m - 1.0).abs() < 1e-12);
            for q in Polariton::ALL {
                let dot: f64 = b.vector(p).iter().zip(b.vector(q)).map(|(x, y)| x * y).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coupling_fit_roundtrip(
        wa in 1950.0..2050.0f64,
        wb in 1950.0..2050.0f64,
        w0 in 1950.0..2050.0f64,
        g in 2.0..40.0f64,
    ) {
        let (ua, la) = sector_eigenvalues(wa, w0, g);
        let (ub, lb) = sector_eigenvalues(wb, w0, g);
        let fit = fit_coupling([ua, ub, la, lb], wa, wb, w0).unwrap();
        prop_assert!((fit.g - g).abs() < 1e-5, "fit {} want {g}", fit.g);
    }

    #[test]
    fn liouvillian_trace_preserving(
        gamma in prop::array::uniform5(0.0..2.0f64),
        gamma_phi in 0.0..0.5f64,
        n_max in 1usize..4,
    ) {
        let p = ModelParams { gamma, gamma_phi, n_max, ..Default::default() };
        let m = Model::new(p).unwrap();
        prop_assert!(m.liouvillian.trace_residual() < 1e-10);
    }
}

#[test]
fn published_table_and_coupling() {
    let b = polariton_basis(&ModelParams::default()).unwrap();
    let want = [2011.0, 1997.0, 1970.2, 1957.4];
    for (p, w) in Polariton::ALL.into_iter().zip(want) {
        assert!((b.freq(p) - w).abs() <= 0.5, "{p}: {}", b.freq(p));
    }
    let fit = fit_coupling(want, 1998.2, 1971.4, 1983.0).unwrap();
    assert!((fit.g - 18.7).abs() <= 0.3, "g {}", fit.g);
}

#[test]
fn transfer_moves_photons_from_a_to_b_only() {
    // with only the transfer channel on, a B photon never returns to A
    let mut p = ModelParams::default();
    p.g = 0.0;
    p.gamma = [0.0, 0.0, 0.0, 0.0, 0.6];
    let m = Model::new(p).unwrap();
    let na = Operator::factor(&m.space, PHOTON_A, qdyn_core::FactorOp::Number).unwrap();
    let nb = Operator::factor(&m.space, PHOTON_B, qdyn_core::FactorOp::Number).unwrap();
    let mut digits = vec![0; m.space.factors().len()];
    digits[PHOTON_B] = 1;
    let rho = DensityMatrix::basis(&m.space, m.space.index_of(&digits)).unwrap();
    let r = propagate(&m.liouvillian, &rho, 3.0, Method::Exact).unwrap();
    assert!(expectation(&na, &r).unwrap().norm() < 1e-14);
    assert!((expectation(&nb, &r).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);

    digits[PHOTON_B] = 0;
    digits[PHOTON_A] = 1;
    let rho = DensityMatrix::basis(&m.space, m.space.index_of(&digits)).unwrap();
    let r = propagate(&m.liouvillian, &rho, 2.0, Method::Exact).unwrap();
    let got = expectation(&nb, &r).unwrap().re;
    assert!((got - (1.0 - (-1.2f64).exp())).abs() < 1e-10, "{got}");
}

#[test]
fn prepared_coherence_is_a_single_excitation_branch() {
    let m = Model::new(ModelParams::default()).unwrap();
    let rho = prepare_coherence(&m.basis, Polariton::UpA, Polariton::LpA, &m.space).unwrap();
    assert!(rho.trace().norm() < 1e-12);
    let n = m.excitation_number();
    let nr = &n * &Operator::new(m.space.clone(), rho.matrix().clone()).unwrap();
    assert!((nr.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-12));
}
