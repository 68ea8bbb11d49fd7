use objectivity::broadcast::{
    build_sfe_state, build_sfe_state_for_count, coherent_norm, explicit_functionals, explicit_small_state,
    factored_functionals, simulate_controlled, MAX_EXPLICIT_DIM,
};
use objectivity::phases::{pf_broadcast_check, pf_matrix, pf_stationary, phase_diagram};
use objectivity::qinfo::{counterexample_state_unchecked, mutual_information, pointer_entropy, theorem_bound};
use objectivity::qmat::random::{random_density, random_qubit, random_unitary};
use objectivity::qmat::{partial_trace, partial_transpose_min_eig, von_neumann_entropy, DensityOperator};
use objectivity::scatter::{
    decoherence_time, macro_overlap_mixed, macro_overlap_mixed_exact, macro_overlap_pure, modified_decoherence_time,
    receptivity, BoxMode, PhotonBranches, PhotonSource, SpectralMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentKind, Resolved};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Result of one experiment before anything is written.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub table: Table,
    pub summary: Value,
    /// Set when a check experiment found a violation; files are still written.
    pub violation: Option<String>,
}

impl Evaluation {
    fn plain(table: Table, summary: Value) -> Self {
        Self {
            table,
            summary,
            violation: None,
        }
    }
}

pub fn evaluate(r: &Resolved) -> Result<Evaluation, CliError> {
    match r.kind {
        ExperimentKind::Decoherence => decoherence(r),
        ExperimentKind::PhaseDiagram => phases(r),
        ExperimentKind::MixedEnv => mixed_env(r),
        ExperimentKind::Counterexample => counterexample(r),
        ExperimentKind::PfBroadcast => pf_broadcast(r),
        ExperimentKind::OracleCheck => oracle_check(r),
        ExperimentKind::BoundCheck => bound_check(r),
    }
}

fn spectral(r: &Resolved) -> Option<&SpectralMeasure> {
    match &r.source {
        PhotonSource::Spectral(m) => Some(m),
        PhotonSource::Monochromatic => None,
    }
}

/// τ_D, τ̄_D, α, N_t and the dimensionless groups of the run.
pub fn derived_constants(r: &Resolved) -> Value {
    let model = &r.model;
    let tau = decoherence_time(model);
    let mut out = json!({
        "tau_d": tau,
        "k0_dx": model.k0 * model.separation,
        "k0_a": model.k0 * model.radius,
    });
    let mut time_unit = tau;
    if let Some(meas) = spectral(r) {
        let tau_bar = modified_decoherence_time(model, meas);
        out["tau_d_bar"] = json!(tau_bar);
        out["alpha"] = receptivity(model, meas).ok().into();
        if r.kind == ExperimentKind::MixedEnv {
            time_unit = tau_bar;
        }
    }
    let grid = &r.config.t_over_tau_d;
    if !grid.is_empty() {
        let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out["t_over_tau_d"] = json!([lo, hi]);
        out["n_t"] = json!(model.photon_count(hi * time_unit));
    }
    out
}

fn collect_rows<T: Sync>(
    items: &[T],
    row: impl Fn(&T) -> Result<Vec<Vec<Cell>>, CliError> + Sync + Send,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let chunks: Vec<Vec<Vec<Cell>>> = items.par_iter().map(row).collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn fill(mut table: Table, rows: Vec<Vec<Cell>>) -> Table {
    for row in rows {
        table.push(row);
    }
    table
}

fn decoherence(r: &Resolved) -> Result<Evaluation, CliError> {
    let (f, m) = (r.config.f[0], r.config.m[0]);
    let tau = decoherence_time(&r.model);
    let rows = collect_rows(&r.config.t_over_tau_d, |&x| {
        let t = x * tau;
        let norm = |mode| -> Result<f64, CliError> {
            Ok(coherent_norm(&build_sfe_state(&r.model, &r.source, &r.rho0, f, m, t, mode)?))
        };
        let overlap = match spectral(r) {
            Some(meas) => macro_overlap_mixed(&r.model, meas, m, t, r.mode())?,
            None => macro_overlap_pure(&r.model, m, t, r.mode())?,
        };
        Ok(vec![vec![
            x.into(),
            norm(BoxMode::FiniteBox)?.into(),
            norm(BoxMode::Thermodynamic)?.into(),
            overlap.into(),
        ]])
    })?;
    let table = fill(
        Table::new(vec!["t_over_tauD", "coherent_norm_finite", "coherent_norm_thermo", "macro_overlap"]),
        rows,
    );
    Ok(Evaluation::plain(table, json!({ "f": f, "m": m })))
}

fn phases(r: &Resolved) -> Result<Evaluation, CliError> {
    let tau = decoherence_time(&r.model);
    let c = &r.config;
    let rows = collect_rows(&c.t_over_tau_d, |&x| {
        let pts = phase_diagram(&r.model, &r.source, &r.rho0, x * tau, &c.f, &c.micro_counts, r.mode())?;
        Ok(pts
            .iter()
            .map(|p| {
                vec![
                    p.f.into(),
                    p.phase.label().into(),
                    p.i_bits.into(),
                    p.t_over_tau_d.into(),
                    p.micro_photons.map_or(Cell::Empty, Cell::from),
                ]
            })
            .collect())
    })?;
    let table = fill(Table::new(vec!["f", "regime", "I_bits", "t_over_tauD", "micro_photons"]), rows);
    let h_s = pointer_entropy(r.rho0.matrix()[(0, 0)].re)?;
    Ok(Evaluation::plain(table, json!({ "pointer_entropy_bits": h_s })))
}

fn mixed_env(r: &Resolved) -> Result<Evaluation, CliError> {
    let meas = spectral(r).expect("validated");
    let tau_bar = modified_decoherence_time(&r.model, meas);
    let alpha = receptivity(&r.model, meas)?;
    let grid: Vec<(f64, f64)> = r
        .config
        .m
        .iter()
        .flat_map(|&m| r.config.t_over_tau_d.iter().map(move |&x| (m, x)))
        .collect();
    let rows = collect_rows(&grid, |&(m, x)| {
        let t = x * tau_bar;
        let closed = macro_overlap_mixed(&r.model, meas, m, t, r.mode())?;
        let exact = macro_overlap_mixed_exact(&r.model, meas, m, t)?;
        Ok(vec![vec![
            m.into(),
            x.into(),
            closed.into(),
            exact.into(),
            (-alpha * m * x).exp().into(),
        ]])
    })?;
    let table = fill(
        Table::new(vec!["m", "t_over_tauD_bar", "macro_overlap", "macro_overlap_exact", "exp_law"]),
        rows,
    );
    Ok(Evaluation::plain(table, json!({ "alpha": alpha, "modes": meas.len() })))
}

fn counterexample(r: &Resolved) -> Result<Evaluation, CliError> {
    let mut table = Table::new(vec!["p", "I", "H_B", "qd_gap", "ppt_min_eig"]);
    let mut results = Vec::new();
    for &p in &r.config.p {
        let rho = counterexample_state_unchecked(p);
        let i = mutual_information(&rho, &[0])?;
        let h_b = von_neumann_entropy(&partial_trace(&rho, &[1])?)?;
        let gap = (i - h_b).abs();
        let ppt = partial_transpose_min_eig(&rho, 1)?;
        table.push(vec![p.into(), i.into(), h_b.into(), gap.into(), ppt.into()]);
        results.push(json!({ "p": p, "I": i, "H_B": h_b, "qd_gap": gap, "ppt_min_eig": ppt }));
    }
    Ok(Evaluation::plain(table, json!({ "results": results })))
}

fn pf_broadcast(r: &Resolved) -> Result<Evaluation, CliError> {
    let c = &r.config;
    let phi = c.basis.unwrap_or_default().vectors();
    let p = pf_matrix(&phi)?;
    let stationary = pf_stationary(&p)?;
    let t = c.t_over_tau_d[0] * decoherence_time(&r.model);
    let inputs: Vec<(f64, bool)> = std::iter::once((stationary[0], true))
        .chain(c.lambda.iter().map(|&l| (l, false)))
        .collect();
    let rows = collect_rows(&inputs, |&(l, is_stationary)| {
        let rep = pf_broadcast_check(&r.model, &r.source, &phi, [l, 1.0 - l], c.f[0], c.m[0], t, r.mode())?;
        let want = p.apply(&[l, 1.0 - l])?;
        let p_dev = rep.output.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok(vec![vec![
            l.into(),
            rep.output[0].into(),
            want[0].into(),
            rep.deviation.into(),
            p_dev.into(),
            Cell::Int(is_stationary as i64),
        ]])
    })?;
    let stationary_dev = match &rows[0][3] {
        Cell::Real(x) => *x,
        _ => unreachable!(),
    };
    let p_dev = rows
        .iter()
        .map(|row| match row[4] {
            Cell::Real(x) => x,
            _ => unreachable!(),
        })
        .fold(0.0, f64::max);
    let tol = r.tolerance();
    let violation = if !(stationary_dev < tol) {
        Some(format!("stationary input deviates by {stationary_dev:e} (tolerance {tol:e})"))
    } else if !(p_dev < tol) {
        Some(format!("output differs from Pλ by {p_dev:e} (tolerance {tol:e})"))
    } else {
        None
    };
    let table = fill(
        Table::new(vec!["lambda_1", "output_1", "p_lambda_1", "deviation", "p_deviation", "stationary"]),
        rows,
    );
    Ok(Evaluation {
        table,
        summary: json!({
            "p_matrix": p.entries(),
            "stationary": stationary,
            "stationary_deviation": stationary_dev,
            "max_p_deviation": p_dev,
        }),
        violation,
    })
}

/// Every (f, m) with M = 1/m dividing `n` and f = k/M.
pub fn partitions(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for big_m in (1..=n).filter(|d| n % d == 0) {
        for k in 0..=big_m {
            out.push((k as f64 / big_m as f64, 1.0 / big_m as f64));
        }
    }
    out
}

fn oracle_check(r: &Resolved) -> Result<Evaluation, CliError> {
    let cases: Vec<(usize, f64, f64)> = (1..=r.config.n_t.expect("resolved"))
        .flat_map(|n| partitions(n).into_iter().map(move |(f, m)| (n, f, m)))
        .collect();
    let pure = r.source.is_pure();
    let rows = collect_rows(&cases, |&(n, f, m)| {
        let state = build_sfe_state_for_count(&r.model, &r.source, &r.rho0, f, m, n)?;
        let dense = explicit_small_state(&r.model, &r.source, &r.rho0, f, m, n)?;
        let group = if f > 0.0 { (m * n as f64).round() as usize } else { 0 };
        let ex = explicit_functionals(&dense, group)?;
        let overlap_dev = |fa: Option<f64>| match (fa, ex.pairwise_overlap) {
            (Some(a), Some(b)) => Some((a - b).abs()),
            (None, None) => None,
            _ => Some(f64::INFINITY),
        };
        let (di, dc, dov, dchi) = if pure {
            let fa = factored_functionals(&state)?;
            (
                Some((fa.mutual_information - ex.mutual_information).abs()),
                (fa.coherent_norm - ex.coherent_norm).abs(),
                overlap_dev(fa.pairwise_overlap),
                Some((fa.holevo_chi - ex.holevo_chi).abs()),
            )
        } else {
            let ov = ex.pairwise_overlap.map(|_| state.ln_pairwise_overlap().exp());
            (None, (coherent_norm(&state) - ex.coherent_norm).abs(), overlap_dev(ov), None)
        };
        Ok(vec![vec![n.into(), f.into(), m.into(), di.into(), dc.into(), dov.into(), dchi.into()]])
    })?;
    let max_dev = rows
        .iter()
        .flat_map(|row| row[3..].iter())
        .filter_map(|c| match c {
            Cell::Real(x) => Some(*x),
            _ => None,
        })
        .fold(0.0, f64::max);
    let tol = r.tolerance();
    let violation = (!(max_dev < tol)).then(|| format!("factored and dense paths differ by {max_dev:e} (tolerance {tol:e})"));
    let configurations = rows.len();
    let table = fill(
        Table::new(vec![
            "n_t",
            "f",
            "m",
            "dev_mutual_information",
            "dev_coherent_norm",
            "dev_overlap",
            "dev_holevo_chi",
        ]),
        rows,
    );
    Ok(Evaluation {
        table,
        summary: json!({ "max_deviation": max_dev, "configurations": configurations, "tolerance": tol }),
        violation,
    })
}

/// Largest photon count whose dense S:E state fits the oracle cap.
fn max_photons(d: usize, cap: usize) -> usize {
    let mut n = 0;
    while 2 * d.pow(n as u32 + 1) <= MAX_EXPLICIT_DIM {
        n += 1;
    }
    n.min(cap)
}

fn bound_check(r: &Resolved) -> Result<Evaluation, CliError> {
    let count = r.config.configs.expect("resolved");
    let mut rng = ChaCha8Rng::seed_from_u64(r.config.seed.expect("resolved"));
    let branches = PhotonBranches::new(&r.model, &r.source)?;
    // Draw every instance up front so the sequence does not depend on the
    // worker count.
    let mut instances = Vec::with_capacity(count);
    for i in 0..count {
        let rho_s = random_qubit(&mut rng);
        let (label, u1, u2, rho_e) = if i % 3 == 0 {
            let rho_e = DensityOperator::from_matrix(branches.rho.clone())?;
            ("sphere", branches.s1.clone(), branches.s2.clone(), rho_e)
        } else {
            let d = rng.random_range(2..=3usize);
            let rho_e = if d == 2 { random_qubit(&mut rng) } else { random_density(&mut rng, 3) };
            ("random", random_unitary(&mut rng, d), random_unitary(&mut rng, d), rho_e)
        };
        let max_n = max_photons(rho_e.dim(), 10);
        if max_n < 2 {
            return Err(CliError::Regime(format!(
                "environment dimension {} leaves no room for two photons under the dense cap",
                rho_e.dim()
            )));
        }
        let n = rng.random_range(2..=max_n);
        let k = rng.random_range(1..n);
        instances.push((i, label, rho_s, u1, u2, rho_e, n, k));
    }
    let tol = r.tolerance();
    let rows = collect_rows(&instances, |(i, label, rho_s, u1, u2, rho_e, n, k)| {
        let (n, k) = (*n, *k);
        let f = k as f64 / n as f64;
        let hs = pointer_entropy(rho_s.matrix()[(0, 0)].re)?;
        let bound = theorem_bound(rho_s, u1, u2, rho_e, n, f)?;
        let env = PhotonBranches::from_unitaries(u1.clone(), u2.clone(), rho_e.matrix().clone())?;
        let keep: Vec<bool> = (0..n).map(|j| j < k).collect();
        let sfe = simulate_controlled(rho_s, &vec![env; n], &keep)?;
        let gap = (hs - mutual_information(&sfe, &[0])?).abs();
        Ok(vec![vec![
            (*i).into(),
            (*label).into(),
            rho_e.dim().into(),
            n.into(),
            f.into(),
            gap.into(),
            bound.value.into(),
            Cell::Int(bound.in_regime as i64),
        ]])
    })?;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for row in &rows {
        if let (Cell::Real(gap), Cell::Real(bound)) = (&row[5], &row[6]) {
            if *gap > bound + tol {
                violations += 1;
            }
            if *bound > 0.0 {
                worst_ratio = worst_ratio.max(gap / bound);
            }
        }
    }
    let violation = (violations > 0).then(|| format!("{violations} configurations exceed the bound"));
    let table = fill(
        Table::new(vec!["index", "instance", "env_dim", "n", "f", "gap", "bound", "in_regime"]),
        rows,
    );
    Ok(Evaluation {
        table,
        summary: json!({ "configurations": count, "violations": violations, "max_gap_over_bound": worst_ratio }),
        violation,
    })
}
