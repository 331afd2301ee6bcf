use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::spectral::{BoxLattice, ComplexField, ModeVector};

fn lat1(n: usize) -> BoxLattice {
    BoxLattice::new(2.0 * PI, n, 1).unwrap()
}

fn random_phi(lattice: BoxLattice, rng: &mut ChaCha8Rng, scale: f64) -> ModeVector {
    let mut phi = ModeVector::zeros(lattice);
    for (i, v) in phi.values.iter_mut().enumerate() {
        if !lattice.is_zero_mode(i) {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        }
    }
    phi
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn run(state: &PekarPair, dt: f64, t_end: f64) -> PekarPair {
    let cfg = LpStepperConfig {
        dt,
        t_end,
        scheme: Scheme::Strang,
        record_every: usize::MAX,
    };
    evolve(state, &cfg).unwrap().last().clone()
}

#[test]
fn zero_field_gives_zero_potential() {
    let lat = lat1(16);
    let pot = potential_from_phi(&ModeVector::zeros(lat), PotentialRange::Full).unwrap();
    assert!(pot.values.iter().all(|v| *v == C64::new(0.0, 0.0)));
}

#[test]
fn real_even_field_gives_even_potential() {
    let lat = BoxLattice::new(4.0, 8, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut phi = ModeVector::zeros(lat);
    for i in 0..lat.len() {
        let l = lat.momentum_labels(i);
        let j = lat.momentum_index([-l[0], -l[1], -l[2]]);
        if i <= j && !lat.is_zero_mode(i) {
            let v = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            phi.values[i] = v;
            phi.values[j] = v;
        }
    }
    let pot = potential_from_phi(&phi, PotentialRange::Full).unwrap();
    let n = lat.points_per_dim;
    for i in 0..lat.len() {
        let c = lat.unflatten(i);
        let m = lat.flatten([(n - c[0]) % n, (n - c[1]) % n, (n - c[2]) % n]);
        assert!((pot.values[i].re - pot.values[m].re).abs() < 1e-12);
        assert!(pot.values[i].im.abs() <= 1e-12);
    }
}

#[test]
fn potential_matches_direct_mode_sum() {
    let lat = BoxLattice::new(3.0, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let phi = random_phi(lat, &mut rng, 1.0);
    let pot = potential_from_phi(&phi, PotentialRange::Low(4.0)).unwrap();
    let w = lat.mode_weight();
    for x in 0..lat.len() {
        let xp = lat.position(x)[0];
        let mut s = 0.0;
        for k in 0..lat.len() {
            let kn = lat.momentum_norm(k);
            if kn == 0.0 || kn > 4.0 {
                continue;
            }
            let e = C64::from_polar(1.0, lat.momentum(k)[0] * xp);
            s += 2.0 * w / kn * (e * phi.values[k]).re;
        }
        assert!((pot.values[x].re - s).abs() < 1e-12);
    }
}

#[test]
fn potential_sup_bounded_by_weighted_norm() {
    let lat = BoxLattice::new(2.0 * PI, 8, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bound = (32.0 * PI).sqrt();
    for _ in 0..50 {
        let phi = random_phi(lat, &mut rng, 1.0);
        let pot = potential_from_phi(&phi, PotentialRange::Full).unwrap();
        let sup = pot.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        assert!(sup <= bound * phi.weighted_norm(1.0));
    }
}

#[test]
fn ranged_potential_needs_positive_cutoff() {
    let lat = lat1(8);
    assert!(potential_from_phi(&ModeVector::zeros(lat), PotentialRange::Low(0.0)).is_err());
    let mut phi = ModeVector::zeros(lat);
    phi.values[0] = C64::new(1.0, 0.0);
    assert!(potential_from_phi(&phi, PotentialRange::Full).is_err());
}

#[test]
fn decoupled_flow_is_exact() {
    let lat = lat1(16);
    let l = lat.box_length;
    let psi = ComplexField::from_fn(lat, |x| C64::from_polar(1.0, 3.0 * x[0]) / l.sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = random_phi(lat, &mut rng, 0.5);
    let state = PekarPair::new(psi.clone(), phi.clone(), 0.0).unwrap();
    let t = 0.7;
    let out = run(&state, 0.01, t);
    // k = 3 on L = 2π: phase e^{-9it}
    let expect: Vec<C64> = psi.values.iter().map(|v| v * C64::from_polar(1.0, -9.0 * t)).collect();
    assert!(max_diff(&out.psi.values, &expect) < 1e-12);
    let rot: Vec<C64> = phi.values.iter().map(|v| v * C64::from_polar(1.0, -t)).collect();
    assert!(max_diff(&out.phi.values, &rot) < 1e-12);
}

#[test]
fn free_flow_keeps_h2_norm() {
    let lat = BoxLattice::new(8.0, 16, 3).unwrap();
    let state = standard_initial(lat, 0.0, PhiInit::Zero).unwrap();
    let cfg = LpStepperConfig {
        dt: 0.01,
        t_end: 0.5,
        scheme: Scheme::Strang,
        record_every: 10,
    };
    let traj = evolve(&state, &cfg).unwrap();
    let h0 = traj.diagnostics[0].h2_norm;
    for d in &traj.diagnostics {
        assert!(((d.h2_norm - h0) / h0).abs() < 1e-10);
    }
}

#[test]
fn norm_is_preserved_and_reversal_is_exact() {
    let lat = BoxLattice::new(6.0, 16, 3).unwrap();
    let state = standard_initial(lat, 1.0, PhiInit::Zero).unwrap();
    let mut solver = LpSolver::new(lat);
    let mut s = state.clone();
    for _ in 0..20 {
        solver.step_signed(&mut s, 0.01).unwrap();
    }
    assert!((s.psi.norm() - 1.0).abs() < 1e-12);
    for _ in 0..20 {
        solver.step_signed(&mut s, -0.01).unwrap();
    }
    assert!(max_diff(&s.psi.values, &state.psi.values) < 1e-10);
    assert!(max_diff(&s.phi.values, &state.phi.values) < 1e-10);
}

#[test]
fn lattice_translation_commutes_with_flow() {
    let lat = BoxLattice::new(5.0, 10, 1).unwrap();
    let center = [1.7, 0.0, 0.0];
    let psi = gaussian_psi_with(lat, 0.6, center);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = random_phi(lat, &mut rng, 0.2);
    let state = PekarPair::new(psi, phi, 1.0).unwrap();
    // shift by s cells: ψ'(x) = ψ(x − a), φ'(k) = e^{-ika}φ(k)
    let s = 3;
    let a = s as f64 * lat.spacing();
    let n = lat.len();
    let shift = |p: &PekarPair| {
        let mut q = p.clone();
        for i in 0..n {
            q.psi.values[(i + s) % n] = p.psi.values[i];
        }
        for k in 0..n {
            q.phi.values[k] = p.phi.values[k] * C64::from_polar(1.0, -lat.momentum(k)[0] * a);
        }
        q
    };
    let a_then = run(&shift(&state), 0.01, 0.4);
    let then_a = shift(&run(&state, 0.01, 0.4));
    assert!(max_diff(&a_then.psi.values, &then_a.psi.values) < 1e-12);
    assert!(max_diff(&a_then.phi.values, &then_a.phi.values) < 1e-12);
}

#[test]
fn second_order_self_convergence() {
    let lat = BoxLattice::new(8.0, 16, 3).unwrap();
    let state = standard_initial(lat, 1.0, PhiInit::Zero).unwrap();
    let t = 0.5;
    let reference = run(&state, 0.01 / 8.0, t);
    let err = |dt: f64| {
        let s = run(&state, dt, t);
        let dpsi = max_diff(&s.psi.values, &reference.psi.values);
        let dphi = max_diff(&s.phi.values, &reference.phi.values);
        dpsi.max(dphi)
    };
    let e1 = err(0.02);
    let e2 = err(0.01);
    let ratio = e1 / e2;
    assert!(ratio > 3.5 && ratio < 4.6, "ratio {ratio}");
}

#[test]
fn energy_drift_is_small() {
    let lat = BoxLattice::new(8.0, 16, 3).unwrap();
    let state = standard_initial(lat, 0.25, PhiInit::Zero).unwrap();
    let cfg = LpStepperConfig {
        dt: 0.005,
        t_end: 1.0,
        scheme: Scheme::Strang,
        record_every: 20,
    };
    let traj = evolve(&state, &cfg).unwrap();
    assert!(traj.max_energy_drift() < 5e-6, "{}", traj.max_energy_drift());
    assert!(traj.max_norm_drift() < 1e-10);
}

#[test]
fn ground_state_guess_is_nearly_stationary() {
    let lat = BoxLattice::new(8.0, 16, 3).unwrap();
    let state = approximate_ground_state(lat, 1.0, 0.05, 200).unwrap();
    let gauss = standard_initial(lat, 1.0, PhiInit::FixedPoint).unwrap();
    let cfg = LpStepperConfig {
        dt: 0.01,
        t_end: 1.0,
        scheme: Scheme::Strang,
        record_every: 100,
    };
    let density_change = |s: &PekarPair| {
        let e = run(s, cfg.dt, cfg.t_end);
        s.psi
            .values
            .iter()
            .zip(&e.psi.values)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max)
    };
    assert!(density_change(&state) < 0.5 * density_change(&gauss));
}

#[test]
fn empty_evolution_returns_initial_state() {
    let lat = lat1(8);
    let state = standard_initial(lat, 1.0, PhiInit::Zero).unwrap();
    let cfg = LpStepperConfig {
        dt: 0.1,
        t_end: 0.0,
        scheme: Scheme::Strang,
        record_every: 1,
    };
    let traj = evolve(&state, &cfg).unwrap();
    assert_eq!(traj.snapshots.len(), 1);
    assert_eq!(traj.snapshots[0].1, state);
}

#[test]
fn invalid_configs_are_rejected() {
    let lat = lat1(8);
    let state = standard_initial(lat, 1.0, PhiInit::Zero).unwrap();
    for (dt, t_end, every) in [(0.0, 1.0, 1), (-0.1, 1.0, 1), (0.1, -1.0, 1), (0.1, 1.0, 0)] {
        let cfg = LpStepperConfig {
            dt,
            t_end,
            scheme: Scheme::Strang,
            record_every: every,
        };
        assert!(evolve(&state, &cfg).is_err());
    }
    assert!(lp_step(&state, 0.0).is_err());
}

#[test]
fn blowup_aborts_with_last_good_state() {
    let lat = lat1(8);
    let mut state = standard_initial(lat, 1.0, PhiInit::Zero).unwrap();
    state.phi.values[1] = C64::new(1e300, 0.0);
    state.phi.values[2] = C64::new(1e300, 0.0);
    let cfg = LpStepperConfig {
        dt: 0.1,
        t_end: 1.0,
        scheme: Scheme::Strang,
        record_every: 1,
    };
    let err = evolve(&state, &cfg).unwrap_err();
    assert!(matches!(err.error, crate::Error::IntegratorAbort { .. }));
}

#[test]
fn snapshot_round_trip() {
    let lat = lat1(8);
    let state = standard_initial(lat, 0.5, PhiInit::FixedPoint).unwrap();
    let mut buf = Vec::new();
    write_snapshot_json(&mut buf, 0.0, &state).unwrap();
    let back = read_snapshot_json(&buf[..]).unwrap();
    assert_eq!(back, state);
}

#[test]
fn trajectory_csv_header() {
    let d = LpDiagnostics {
        t: 0.0,
        norm: 1.0,
        energy: 2.0,
        energy_drift: 0.0,
        h2_norm: 3.0,
        l21_norm: 0.0,
    };
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &[d]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,norm,energy,energy_drift,h2_norm,l21_norm\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn envelope_fit_flags_superlinear_growth() {
    let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
    let lin: Vec<f64> = t.iter().map(|t| 2.0 + 0.5 * t).collect();
    let fit = fit_linear_envelope(&t, &lin).unwrap();
    assert!((fit.constant - 2.0).abs() < 1e-12);
    assert!(!fit.superlinear);
    let cube: Vec<f64> = t.iter().map(|t| (1.0 + t).powi(3)).collect();
    assert!(fit_linear_envelope(&t, &cube).unwrap().superlinear);
}
