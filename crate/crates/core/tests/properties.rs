use num_complex::Complex64;
use proptest::prelude::*;
use qoste_core::*;

fn coeffs() -> impl Strategy<Value = PauliCoeffs> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, c, d)| PauliCoeffs::new(a, b, c, d))
}

fn nondegenerate() -> impl Strategy<Value = PauliCoeffs> {
    coeffs().prop_filter("gap", |c| c.norm() > 1e-3)
}

fn state() -> impl Strategy<Value = StateVector> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-4)
        .prop_map(|(a, b, c, d)| StateVector::new(Complex64::new(a, b), Complex64::new(c, d)).normalized())
}

proptest! {
    #[test]
    fn compose_then_decompose_is_identity(c in coeffs()) {
        prop_assert!(compose(&c).decompose().max_abs_diff(&c) < 1e-12);
        let m = compose(&c);
        prop_assert!((m - m.adjoint()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn expi_is_unitary_and_a_one_parameter_group(c in coeffs(), t1 in -2.0..2.0f64, t2 in -2.0..2.0f64) {
        let u = expi(&c, t1);
        prop_assert!(u.unitarity_defect() < 1e-12);
        let lhs = expi(&c, t1) * expi(&c, t2);
        prop_assert!((lhs - expi(&c, t1 + t2)).frobenius_norm() < 1e-11);
        prop_assert!((expi(&c, -t1) - u.adjoint()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn bloch_vector_is_unit_and_phase_invariant(s in state(), phase in -3.2..3.2f64) {
        let b = bloch_of(&s).unwrap();
        prop_assert!((b.norm() - 1.0).abs() < 1e-12);
        let rotated = s.scale(Complex64::from_polar(1.0, phase));
        let b2 = bloch_of(&rotated).unwrap();
        prop_assert!(b.angle_to(&b2) < 1e-7);
        let back = StateVector::from_bloch(b);
        prop_assert!(fidelity(&back, &s) > 1.0 - 1e-12);
    }

    #[test]
    fn eigenframe_invariants(c in nondegenerate(), anchor in state()) {
        let f = eig2(&c, Some(&anchor)).unwrap();
        let h = compose(&c);
        for (e, v) in [(f.e_plus, f.v_plus), (f.e_minus, f.v_minus)] {
            let r = h.apply(&v).sub(&v.scale(e.into()));
            prop_assert!(r.norm_sqr().sqrt() < 1e-11);
            prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        }
        prop_assert!(f.v_plus.inner(&f.v_minus).norm() < 1e-12);
        prop_assert!(f.e_plus > f.e_minus);
        prop_assert!((f.half_gap() - c.norm()).abs() < 1e-12);
        let overlap = anchor.inner(&f.v_plus);
        prop_assert!(overlap.im.abs() < 1e-12 && overlap.re >= -1e-12);
    }

    #[test]
    fn fidelity_is_a_probability(a in state(), b in state()) {
        let f = fidelity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&b, &a)).abs() < 1e-14);
    }

    #[test]
    fn energy_cost_is_quadratic_in_amplitude(
        v in prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), 1..40),
        s in -3.0..3.0f64,
        omega_i in 0.1..20.0f64,
    ) {
        let grid = TimeGrid::new(1.7, v.len()).unwrap();
        let w = ControlWaveform::new(grid, v, omega_i).unwrap();
        let c = energy_cost(&w);
        prop_assert!(c >= 0.0);
        prop_assert!((energy_cost(&w.scaled(s)) - s * s * c).abs() <= 1e-12 * c.max(1.0) * (1.0 + s * s));
    }

    #[test]
    fn projection_lands_on_the_energy_shell(
        v in prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), 2..40),
        target in 0.0..5.0f64,
    ) {
        let grid = TimeGrid::new(1.0, v.len()).unwrap();
        let w = ControlWaveform::new(grid, v, 3.0).unwrap();
        prop_assume!(!w.is_zero());
        let p = project_energy(&w, target).unwrap();
        prop_assert!((energy_cost(&p) - target).abs() <= 1e-12 * target.max(1.0));
    }

    #[test]
    fn ensemble_is_symmetric_and_bounded(eps in 0.0..0.5f64, half in 0usize..8) {
        let n = 2 * half + 1;
        let e = make_ensemble(eps, n).unwrap();
        let k = e.etas.len();
        prop_assert!(k == n || (eps == 0.0 && k == 1));
        for j in 0..k {
            prop_assert!((e.etas[j] + e.etas[k - 1 - j]).abs() < 1e-15);
            prop_assert!(e.etas[j].abs() <= eps + 1e-15);
        }
        prop_assert!(e.etas.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tangent_gradient_is_orthogonal_to_the_waveform(
        v in prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), 2..30),
        g in prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), 30),
    ) {
        let grid = TimeGrid::new(1.0, v.len()).unwrap();
        let w = ControlWaveform::new(grid, v, 1.0).unwrap();
        prop_assume!(w.sum_sq() > 1e-6);
        let t = qoste_core::grape::tangent_gradient(&w, &g[..w.v.len()]);
        let dot: f64 = t.iter().zip(&w.v).map(|(a, b)| a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).sum();
        prop_assert!(dot.abs() < 1e-10);
    }
}

fn smooth_protocol() -> impl Strategy<Value = Protocol> {
    (
        prop::array::uniform4(-1.0..1.0f64),
        prop::array::uniform4(-1.0..1.0f64),
        0.5..3.0f64,
        0.5..2.0f64,
    )
        .prop_map(|(a, b, freq, t_f)| {
            Tabulated::sample(t_f, 401, |t| {
                let s = t / t_f;
                PauliCoeffs::new(
                    a[0],
                    1.0 + 0.5 * a[1] + b[1] * (freq * s).sin(),
                    0.8 * a[2] * (2.0 * freq * s).cos() + 0.3 * b[2],
                    a[3] * 2.0 + b[3] * (3.0 * s - 1.5) + b[0] * s * s,
                )
            })
            .map(Protocol::Tabulated)
            .unwrap()
        })
        .prop_filter("nondegenerate", |p| {
            let tf = p.t_f();
            (0..=100).all(|k| eval_h0(p, tf * k as f64 / 100.0).unwrap().norm() > 0.2)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cost_chain_holds_for_smooth_protocols(p in smooth_protocol()) {
        let grid = TimeGrid::new(p.t_f(), 4000).unwrap();
        let r = match cost_chain_check(&p, &grid) {
            Ok(r) => r,
            Err(Error::AntipodalTarget { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(r.chain_holds, "{r:?}");
        prop_assert!((r.geometry.l - r.geometry.l_tilde).abs() <= 1e-4);
        prop_assert!(((r.g_bound - r.c_qoste) / r.c_qoste.max(1e-300)).abs() <= 1e-8);
    }
}
