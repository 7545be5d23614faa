//! Seeded bulk invariants: kinematic identities over large GL+(2) samples,
//! conversion round trips, symmetry properties, and the zoo regression
//! backbone (every catalog entry behaves as its expected verdict says).

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isoconvex::criteria::{check_h_criterion, CheckConfig};
use isoconvex::oracle::{lh_second_difference, sample_glp2, SampleSpec};
use isoconvex::planar::{
    dev2, dist_euclid_sq_so2, distortion_k, log_spd, polar_u, qc_hull_dist_sq_so2, svd2, Mat2,
};
use isoconvex::repr::{f_from_h, ftilde_from_f, h_from_matrix, z_from_h, EnergyRep};
use isoconvex::zoo::{self, Params};

fn kinematics_spec(n: usize) -> SampleSpec {
    SampleSpec {
        n_points: n,
        seed: 7,
        ..SampleSpec::default()
    }
}

#[test]
fn kinematics_identities_over_100k_samples() {
    let spec = kinematics_spec(100_000);
    for i in 0..spec.n_points {
        let f = sample_glp2(&spec, i);
        let d = f.det();
        let sv = svd2(&f).unwrap();
        assert!(sv.lambda1 >= sv.lambda2 && sv.lambda2 > 0.0);
        let product = sv.lambda1 * sv.lambda2;
        assert!(
            (product - d).abs() <= 1e-12 * d,
            "singular value product drifted at sample {i}: {product} vs {d}"
        );

        let u = polar_u(&f).unwrap();
        let uu = u * u;
        let ftf = f.transpose() * f;
        assert!(
            (uu - ftf).norm() <= 1e-10 * ftf.norm(),
            "polar factor squared mismatch at sample {i}"
        );

        let eta_matrix = dev2(&log_spd(&u).unwrap()).norm_sq();
        assert!(
            (eta_matrix - sv.eta()).abs() <= 1e-10,
            "log-strain identity broke at sample {i}: {eta_matrix} vs {}",
            sv.eta()
        );

        let k = distortion_k(&f).unwrap();
        let ki = distortion_k(&f.inverse().unwrap()).unwrap();
        assert!(
            (k - ki).abs() <= 1e-12,
            "distortion not inversion invariant at sample {i}"
        );
    }
}

#[test]
fn distance_matches_rotation_grid_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid_n = 4096;
    let angles: Vec<Mat2> = (0..grid_n)
        .map(|j| Mat2::rotation(std::f64::consts::TAU * j as f64 / grid_n as f64).unwrap())
        .collect();
    let mut mats: Vec<Mat2> = (0..400)
        .map(|_| {
            Mat2::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            )
            .unwrap()
        })
        .collect();
    mats.push(Mat2::zero());
    mats.push(Mat2::identity() * 0.3);
    for f in &mats {
        let direct = dist_euclid_sq_so2(f);
        let grid_min = angles
            .iter()
            .map(|r| (*f - *r).norm_sq())
            .fold(f64::INFINITY, f64::min);
        assert!(
            (direct - grid_min).abs() <= 1e-6,
            "closed form vs rotation grid: {direct} vs {grid_min}"
        );
    }
}

#[test]
fn hull_below_distance_with_equality_outside_the_core() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for _ in 0..20_000 {
        let f = Mat2::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
        .unwrap();
        let dist = dist_euclid_sq_so2(&f);
        let hull = qc_hull_dist_sq_so2(&f);
        let scale = dist.abs().max(1.0);
        assert!(
            hull <= dist + 1e-10 * scale,
            "hull exceeded distance at {f:?}"
        );
        if f.norm_sq_plus_2det() >= 1.0 {
            assert!(
                (hull - dist).abs() <= 1e-12 * scale,
                "hull should coincide with the distance outside the core at {f:?}"
            );
        }
    }
}

#[test]
fn conversion_chain_round_trip_over_10k_samples() {
    let spec = kinematics_spec(10_000);
    let sources = ["hencky_iso", "exp_hencky_iso", "ex_ii"];
    for name in sources {
        let entry = zoo::make(name, &Params::new()).unwrap();
        let w = entry.energy.as_matrix_fn();
        let matrix =
            EnergyRep::matrix(format!("{name}|matrix"), true, move |f: &Mat2| w(f)).unwrap();

        let h_rep = h_from_matrix(&matrix).unwrap();
        let h = h_rep.scalar_payload().unwrap().clone();
        let f_rep = EnergyRep::log_sq_f(format!("{name}|f"), f_from_h(&h));
        let ft_rep = EnergyRep::strain_ftilde(
            format!("{name}|ftilde"),
            ftilde_from_f(f_rep.scalar_payload().unwrap()),
        );
        let z_rep = EnergyRep::distortion_z(format!("{name}|z"), z_from_h(&h));

        for i in 0..spec.n_points {
            let f = sample_glp2(&spec, i);
            let base = matrix.eval_at_matrix(&f).unwrap();
            let tol = 1e-10 * base.abs().max(1.0);
            for rep in [&h_rep, &f_rep, &ft_rep, &z_rep] {
                let v = rep.eval_at_matrix(&f).unwrap();
                assert!(
                    (v - base).abs() <= tol,
                    "{name}: {:?} drifted at sample {i}: {v} vs {base}",
                    rep.kind()
                );
            }
        }
    }
}

#[test]
fn isochoric_entries_are_tension_compression_and_conformally_invariant() {
    let spec = kinematics_spec(10_000);
    let entries: Vec<_> = zoo::default_catalog()
        .into_iter()
        .filter(|e| e.energy.is_isochoric_declared())
        .collect();
    assert!(entries.len() >= 8);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for entry in &entries {
        for i in 0..spec.n_points {
            let f = sample_glp2(&spec, i);
            let base = entry.energy.eval_at_matrix(&f).unwrap();
            let tol = 1e-9 * base.abs().max(1.0);

            let inv = entry.energy.eval_at_matrix(&f.inverse().unwrap()).unwrap();
            assert!(
                (inv - base).abs() <= tol,
                "{}: tension-compression broke at sample {i}",
                entry.name
            );

            if i % 10 == 0 {
                let a = rng.random_range(0.02..50.0_f64);
                let q1 = Mat2::rotation(rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
                let q2 = Mat2::rotation(rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
                let moved = entry.energy.eval_at_matrix(&(q1 * f * q2 * a)).unwrap();
                assert!(
                    (moved - base).abs() <= tol,
                    "{}: conformal invariance broke at sample {i}",
                    entry.name
                );
            }
        }
    }
}

#[test]
fn ratio_forms_balance_t_against_its_inverse() {
    let hencky_matrix = EnergyRep::matrix("hencky|matrix", true, |f: &Mat2| {
        svd2(f).map(|sv| sv.eta()).unwrap_or(f64::NAN)
    })
    .unwrap();
    let mut hs = vec![h_from_matrix(&hencky_matrix).unwrap()];
    for name in ["ex_i", "ex_ii"] {
        hs.push(zoo::make(name, &Params::new()).unwrap().energy);
    }
    let n = 512;
    for rep in &hs {
        let h = rep.scalar_payload().unwrap();
        for j in 0..n {
            let t = (1.0001_f64.ln()
                + (1e3_f64.ln() - 1.0001_f64.ln()) * j as f64 / (n - 1) as f64)
                .exp();
            let (a, b) = (h.eval(t), h.eval(1.0 / t));
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "{}: h({t}) = {a} but h(1/t) = {b}",
                rep.name()
            );
        }
    }
}

#[test]
fn analytic_failure_witness_is_confirmed_by_the_oracle() {
    let cfg = CheckConfig::default();
    let entry = zoo::make("hencky_iso", &Params::new()).unwrap();
    let q = isoconvex::repr::scalar_quartet(&entry.energy).unwrap();
    let verdict = check_h_criterion(&q.h, &cfg).unwrap();
    assert!(verdict.failed());
    let witness = verdict.witness.unwrap();

    // The convexity defect of h at t* is exactly the second derivative of
    // the energy at diag(t*, 1) along the rank-one direction e1 (x) e1.
    let f = Mat2::diag(witness.point, 1.0).unwrap();
    let w = entry.energy.as_matrix_fn();
    let spec = SampleSpec::default();
    let second = lh_second_difference(&*w, &f, [1.0, 0.0], [1.0, 0.0], &spec).unwrap();
    assert!(
        second < -1e-4,
        "oracle does not reproduce the analytic witness: {second} at t = {}",
        witness.point
    );
}

#[test]
fn null_lagrangian_is_flat_along_rank_one_lines() {
    let spec = SampleSpec {
        n_points: 10_000,
        seed: 42,
        ..SampleSpec::default()
    };
    let w = |f: &Mat2| 1.5 * f.det();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..spec.n_points {
        let f = sample_glp2(&spec, i);
        let xi: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let eta: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if (xi[0].abs() + xi[1].abs()) < 0.1 || (eta[0].abs() + eta[1].abs()) < 0.1 {
            continue;
        }
        if let Ok(v) = lh_second_difference(&w, &f, xi, eta, &spec) {
            assert!(
                v.abs() <= 1e-8,
                "det should be rank-one affine, got {v} at sample {i}"
            );
        }
    }
}

#[test]
fn concurrent_evaluation_agrees_with_sequential() {
    let entry = zoo::make("ex_ii", &Params::new()).unwrap();
    let energy = std::sync::Arc::new(entry.energy);
    let spec = kinematics_spec(2000);

    let sequential: Vec<f64> = (0..spec.n_points)
        .map(|i| energy.eval_at_matrix(&sample_glp2(&spec, i)).unwrap())
        .collect();

    let mut handles = Vec::new();
    for chunk in 0..4usize {
        let energy = std::sync::Arc::clone(&energy);
        let spec = spec.clone();
        handles.push(std::thread::spawn(move || {
            (chunk * 500..(chunk + 1) * 500)
                .map(|i| energy.eval_at_matrix(&sample_glp2(&spec, i)).unwrap())
                .collect::<Vec<f64>>()
        }));
    }
    let parallel: Vec<f64> = handles
        .into_iter()
        .flat_map(|h| h.join().unwrap())
        .collect();
    assert_eq!(sequential, parallel);
}

#[test]
fn zoo_regression_every_default_entry_matches_its_verdict() {
    let cfg = CheckConfig::default();
    let spec = SampleSpec::default();
    for entry in zoo::default_catalog() {
        let report = zoo::expected_vs_actual(&entry, &cfg, &spec).unwrap();
        assert!(
            report.matches_expected,
            "{} diverged from its expected verdict: {report:?}",
            entry.name
        );
    }
}
