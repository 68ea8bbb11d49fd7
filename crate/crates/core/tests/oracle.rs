//! Comparisons against frozen numpy reference values (oracles/oracle.py).

use num_complex::Complex64;
use objectivity::broadcast::{build_sfe_state_for_count, factored_functionals};
use objectivity::qinfo::{counterexample_state, mutual_information};
use objectivity::qmat::{
    gen_overlap, partial_trace, partial_transpose_min_eig, trace_norm, von_neumann_entropy, ComplexMatrix,
    DensityOperator,
};
use objectivity::scatter::{decoherence_time, micro_amplitude, PhotonSource, SphereModel};
use serde_json::Value;

fn fixture() -> Value {
    serde_json::from_str(include_str!("fixtures/oracle.json")).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn matrix(v: &Value) -> ComplexMatrix {
    let rows = v.as_array().unwrap();
    let n = rows.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let c = &rows[i][j];
        Complex64::new(num(&c[0]), num(&c[1]))
    })
}

fn density(v: &Value) -> DensityOperator {
    let m = matrix(v);
    let dims = if m.rows() == 4 { vec![2, 2] } else { vec![m.rows()] };
    DensityOperator::new(m, dims).unwrap()
}

fn model(v: &Value) -> SphereModel {
    SphereModel {
        radius: num(&v["radius"]),
        permittivity: num(&v["permittivity"]),
        separation: num(&v["separation"]),
        theta: num(&v["theta"]),
        k0: num(&v["k0"]),
        box_edge: num(&v["box_edge"]),
        photon_density: num(&v["photon_density"]),
        light_speed: num(&v["light_speed"]),
        ..SphereModel::default()
    }
}

fn close(got: f64, want: f64, rel: f64, what: &str) {
    assert!(
        (got - want).abs() <= rel * want.abs().max(1e-300),
        "{what}: got {got:e}, want {want:e}"
    );
}

#[test]
fn amplitudes_and_decoherence_times() {
    for case in fixture()["models"].as_array().unwrap() {
        let m = model(&case["model"]);
        let amp = micro_amplitude(&m, m.k0_vector()).unwrap();
        close(amp.loss, num(&case["loss"]), 1e-12, "loss");
        assert!((amp.phase - num(&case["phase"])).abs() <= 1e-12 * amp.loss.max(num(&case["phase"]).abs()));
        close(decoherence_time(&m), num(&case["tau_d"]), 1e-12, "tau_d");
    }
}

#[test]
fn factored_functionals_match_dense_numpy() {
    let doc = fixture();
    let rho0 = DensityOperator::new(matrix(&doc["rho0"]), vec![2]).unwrap();
    for group in doc["sfe"].as_array().unwrap() {
        let m = model(&group["model"]);
        for c in group["cases"].as_array().unwrap() {
            let n = c["n"].as_u64().unwrap() as usize;
            let (f, mf) = (num(&c["f"]), num(&c["m"]));
            let state = build_sfe_state_for_count(&m, &PhotonSource::Monochromatic, &rho0, f, mf, n).unwrap();
            let got = factored_functionals(&state).unwrap();
            let tag = format!("n={n} f={f} m={mf}");
            assert!((got.mutual_information - num(&c["mutual_information"])).abs() < 1e-9, "I {tag}");
            assert!((got.coherent_norm - num(&c["coherent_norm"])).abs() < 1e-9, "coherent {tag}");
            assert!((got.holevo_chi - num(&c["holevo_chi"])).abs() < 1e-9, "chi {tag}");
            match (got.pairwise_overlap, c["pairwise_overlap"].as_f64()) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "overlap {tag}"),
                (a, b) => assert_eq!(a.is_some(), b.is_some(), "overlap presence {tag}"),
            }
        }
    }
}

#[test]
fn dense_primitives() {
    let q = &fixture()["qmat"];
    let (r1, r2) = (density(&q["rho1"]), density(&q["rho2"]));
    close(von_neumann_entropy(&r1).unwrap(), num(&q["entropy1"]), 1e-12, "S(rho1)");
    close(von_neumann_entropy(&r2).unwrap(), num(&q["entropy2"]), 1e-12, "S(rho2)");
    close(gen_overlap(&r1, &r2).unwrap(), num(&q["fidelity"]), 1e-10, "fidelity");
    let diff = r1.matrix() - r2.matrix();
    close(trace_norm(&diff).unwrap(), num(&q["trace_norm_diff"]), 1e-12, "trace norm");
    close(partial_transpose_min_eig(&r1, 1).unwrap(), num(&q["ppt_min_eig1"]), 1e-10, "ppt");
    for (keep, key) in [(0, "ptrace1_keep0"), (1, "ptrace1_keep1")] {
        let got = partial_trace(&r1, &[keep]).unwrap();
        let want = matrix(&q[key]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((got.matrix()[(i, j)] - want[(i, j)]).norm() < 1e-14, "{key}");
            }
        }
    }
}

#[test]
fn counterexample_values() {
    for c in fixture()["counterexample"].as_array().unwrap() {
        let rho = counterexample_state(num(&c["p"])).unwrap();
        close(mutual_information(&rho, &[0]).unwrap(), num(&c["mutual_information"]), 1e-12, "I");
        close(num(&c["h_b"]), num(&c["mutual_information"]), 1e-12, "I = H_B");
        close(partial_transpose_min_eig(&rho, 1).unwrap(), num(&c["ppt_min_eig"]), 1e-12, "ppt");
    }
}
