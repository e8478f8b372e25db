//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use num_complex::Complex64;
use qoste_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reference_lz() -> Protocol {
    lz_protocol(-10.0, 20.0, 1.0, 1.0).unwrap()
}

/// Classical RK4 on `ψ' = −iH(t)ψ`.
pub fn rk4(h: impl Fn(f64) -> PauliCoeffs, t_f: f64, n: usize, psi0: StateVector) -> StateVector {
    let dt = t_f / n as f64;
    let minus_i = Complex64::new(0.0, -1.0);
    let f = |t: f64, s: &StateVector| compose(&h(t)).apply(s).scale(minus_i);
    let axpy = |s: &StateVector, k: &StateVector, a: f64| StateVector::new(s.a + k.a * a, s.b + k.b * a);
    let mut psi = psi0;
    for j in 0..n {
        let t = j as f64 * dt;
        let k1 = f(t, &psi);
        let k2 = f(t + 0.5 * dt, &axpy(&psi, &k1, 0.5 * dt));
        let k3 = f(t + 0.5 * dt, &axpy(&psi, &k2, 0.5 * dt));
        let k4 = f(t + dt, &axpy(&psi, &k3, dt));
        psi = StateVector::new(
            psi.a + (k1.a + k2.a * 2.0 + k3.a * 2.0 + k4.a) * (dt / 6.0),
            psi.b + (k1.b + k2.b * 2.0 + k3.b * 2.0 + k4.b) * (dt / 6.0),
        );
    }
    psi
}

pub fn random_waveform(grid: TimeGrid, omega_i: f64, amp: f64, seed: u64) -> ControlWaveform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..grid.n_steps())
        .map(|_| {
            [
                amp * rng.gen_range(-1.0..1.0),
                amp * rng.gen_range(-1.0..1.0),
                amp * rng.gen_range(-1.0..1.0),
            ]
        })
        .collect();
    ControlWaveform::new(grid, v, omega_i).unwrap()
}

/// Smooth random tabulated protocol whose gap stays above 0.2.
pub fn random_smooth_protocol(rng: &mut impl Rng) -> Protocol {
    loop {
        let a: [f64; 4] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let b: [f64; 4] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let freq = rng.gen_range(0.5..3.0);
        let t_f = rng.gen_range(0.5..2.0);
        let tab = Tabulated::sample(t_f, 401, |t| {
            let s = t / t_f;
            PauliCoeffs::new(
                a[0],
                1.0 + 0.5 * a[1] + b[1] * (freq * s).sin(),
                0.8 * a[2] * (2.0 * freq * s).cos() + 0.3 * b[2],
                2.0 * a[3] + b[3] * (3.0 * s - 1.5) + b[0] * s * s,
            )
        })
        .unwrap();
        let p = Protocol::Tabulated(tab);
        if (0..=100).all(|k| eval_h0(&p, t_f * k as f64 / 100.0).unwrap().norm() > 0.2) {
            return p;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
