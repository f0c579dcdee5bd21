//! One function per experiment kind. Each returns the same results as a
//! table (for CSV) and as a JSON document.

use qdd_core::collision::convergence_study_with;
use qdd_core::contrast::run_contrast;
use qdd_core::decouple::{averaged_generator, lambda_rate, verify_decoupling_set, Order};
use qdd_core::opalg::Operator;
use qdd_core::pocket::{cauchy_semigroup, dd_pocket_evolution, markov_two_time, two_time_kernel, AverageMethod};
use qdd_core::semigroup::{cp_check, generator_superop, semigroup_map, Picture, SuperOperator};
use qdd_core::serial::{MatrixJson, ModelJson, SuperOperatorJson};
use serde_json::{json, Value};

use crate::config::{Kind, Resolved};
use crate::table::{Cell, Table};
use crate::CliError;

/// Complete positivity is checked to this tolerance on every evolved map.
pub const CP_TOL: f64 = 1e-10;
/// The two dilations in `contrast` must share their semigroup to this.
pub const SEMIGROUP_AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub json: Value,
}

pub fn run(r: &Resolved) -> Result<Report, CliError> {
    match r.config.kind {
        Kind::Generator => generator(r),
        Kind::Evolve => evolve(r),
        Kind::DdAverage => dd_average(r),
        Kind::CollisionStudy => collision_study(r),
        Kind::Pocket => pocket(r),
        Kind::Kernels => kernels(r),
        Kind::Contrast => contrast(r),
    }
}

fn numerical(e: qdd_core::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn superop_json(s: &SuperOperator) -> Value {
    serde_json::to_value(SuperOperatorJson::from_superop(s)).expect("finite matrix")
}

/// One row per entry of `m`: `prefix..., row, col, re, im`.
fn matrix_rows(table: &mut Table, prefix: &[Cell], m: &Operator) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let mut row = prefix.to_vec();
            row.extend([i.into(), j.into(), z.re.into(), z.im.into()]);
            table.push(row);
        }
    }
}

fn generator(r: &Resolved) -> Result<Report, CliError> {
    let model = r.model.as_ref().expect("checked");
    let kicks = r.scheme.as_ref().expect("checked").kicks();
    let gen = generator_superop(model, Picture::Heisenberg).map_err(numerical)?;
    let avg = averaged_generator(model, kicks).map_err(numerical)?;
    let gbar = generator_superop(&avg.model, Picture::Heisenberg).map_err(numerical)?;
    let diff = gen.max_dist(&gbar);

    let mut table = Table::new(vec!["quantity", "row", "col", "re", "im"]);
    matrix_rows(&mut table, &["L".into()], gen.matrix());
    matrix_rows(&mut table, &["Lbar".into()], gbar.matrix());
    table.push(vec![
        "difference_max_norm".into(),
        Cell::Empty,
        Cell::Empty,
        diff.into(),
        0.0.into(),
    ]);
    let json = json!({
        "kind": "generator",
        "generator": superop_json(&gen),
        "averaged_generator": superop_json(&gbar),
        "averaged_model": ModelJson::from_model(&avg.model),
        "difference_max_norm": diff,
        "decoupling_set": verify_decoupling_set(kicks, qdd_core::opalg::DEFAULT_TOL),
    });
    Ok(Report { table, json })
}

fn evolve(r: &Resolved) -> Result<Report, CliError> {
    let model = r.model.as_ref().expect("checked");
    let rho = r.rho.as_ref().expect("checked");
    qdd_core::semigroup::validate_density(rho, qdd_core::opalg::DEFAULT_TOL)
        .map_err(|e| CliError::Config(format!("rho: {e}")))?;
    let mut generators = vec![("L", generator_superop(model, Picture::Schrodinger).map_err(numerical)?)];
    if let Some(s) = &r.scheme {
        let avg = averaged_generator(model, s.kicks()).map_err(numerical)?;
        generators.push((
            "Lbar",
            generator_superop(&avg.model, Picture::Schrodinger).map_err(numerical)?,
        ));
    }
    let mut table = Table::new(vec!["t", "generator", "row", "col", "re", "im"]);
    let mut states = Vec::new();
    for &t in &r.config.times {
        for (name, gen) in &generators {
            let map = semigroup_map(gen, t).map_err(numerical)?;
            let cp = cp_check(&map, CP_TOL).map_err(numerical)?;
            if !cp.is_cp {
                return Err(CliError::Numerical(format!(
                    "e^(t{name}) at t={t} is not completely positive (Choi eigenvalue {:e})",
                    cp.min_eigenvalue
                )));
            }
            let out = map.apply(rho);
            for i in 0..out.nrows() {
                for j in 0..out.ncols() {
                    let z = out[(i, j)];
                    table.push(vec![
                        t.into(),
                        (*name).into(),
                        i.into(),
                        j.into(),
                        z.re.into(),
                        z.im.into(),
                    ]);
                }
            }
            states.push(json!({"t": t, "generator": name, "rho": MatrixJson::from_operator(&out)}));
        }
    }
    Ok(Report {
        table,
        json: json!({"kind": "evolve", "states": states}),
    })
}

fn dd_average(r: &Resolved) -> Result<Report, CliError> {
    let model = r.model.as_ref().expect("checked");
    let kicks = r.scheme.as_ref().expect("checked").kicks();
    let avg = averaged_generator(model, kicks).map_err(numerical)?;
    let lambda = lambda_rate(model);

    let mut table = Table::new(vec!["operator", "index", "row", "col", "re", "im"]);
    matrix_rows(&mut table, &["H".into(), Cell::Empty], avg.model.h());
    for (k, rk) in avg.model.ls().iter().enumerate() {
        matrix_rows(&mut table, &["R".into(), k.into()], rk);
    }
    table.push(vec![
        "identity_shift".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        avg.identity_shift.into(),
        0.0.into(),
    ]);
    table.push(vec![
        "lambda".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        lambda.re.into(),
        lambda.im.into(),
    ]);
    let json = json!({
        "kind": "dd-average",
        "model": ModelJson::from_model(&avg.model),
        "identity_shift": avg.identity_shift,
        "lambda": [lambda.re, lambda.im],
        "decoupling_set": verify_decoupling_set(kicks, qdd_core::opalg::DEFAULT_TOL),
    });
    Ok(Report { table, json })
}

fn collision_study(r: &Resolved) -> Result<Report, CliError> {
    let model = r.model.as_ref().expect("checked");
    let scheme = r.scheme.as_ref().expect("checked");
    let cfg = &r.config;
    let total_time = cfg.total_time.unwrap_or(1.0);
    let kick_every = cfg.kick_every.unwrap_or(1);
    let mut orders = vec![scheme.order()];
    orders.extend(
        cfg.seeds
            .iter()
            .map(|&s| Order::Random(s))
            .filter(|o| *o != scheme.order()),
    );

    let mut rows = Vec::new();
    let mut limits = Vec::new();
    for order in orders {
        let study = convergence_study_with(model, &scheme.with_order(order), total_time, &cfg.taus, kick_every)
            .map_err(numerical)?;
        limits.push(json!({
            "seed": seed_json(order),
            "monotone": study.is_monotone(),
            "extrapolated_distance_from_identity": study.limit_distance_from_identity(),
        }));
        rows.extend(study.rows);
    }
    // Deterministic merge: descending tau, then cyclic before seeds.
    rows.sort_by(|a, b| b.tau.total_cmp(&a.tau).then(a.seed.cmp(&b.seed)));

    let mut table = Table::new(vec![
        "tau",
        "seed",
        "error_vs_Lbar",
        "error_vs_identity",
        "empirical_order",
    ]);
    let mut json_rows = Vec::new();
    for row in &rows {
        let seed = row.seed.map_or(Cell::from("cyclic"), Cell::from);
        table.push(vec![
            row.tau.into(),
            seed,
            row.error_vs_lbar.into(),
            row.error_vs_identity.into(),
            row.empirical_order.into(),
        ]);
        json_rows.push(json!({
            "tau": row.tau,
            "seed": row.seed.map_or(json!("cyclic"), |s| json!(s)),
            "error_vs_Lbar": row.error_vs_lbar,
            "error_vs_identity": row.error_vs_identity,
            "empirical_order": row.empirical_order,
        }));
    }
    let json = json!({
        "kind": "collision-study",
        "T": total_time,
        "kick_every": kick_every,
        "rows": json_rows,
        "limits": limits,
    });
    Ok(Report { table, json })
}

fn seed_json(order: Order) -> Value {
    match order {
        Order::Cyclic => json!("cyclic"),
        Order::Random(s) => json!(s),
    }
}

fn method_name(m: AverageMethod) -> &'static str {
    match m {
        AverageMethod::ClosedForm => "closed-form",
        AverageMethod::FrequencyExpansion { .. } => "frequency-expansion",
        AverageMethod::Quadrature { .. } => "quadrature",
    }
}

fn pocket(r: &Resolved) -> Result<Report, CliError> {
    let sm = r.spectral.as_ref().expect("checked");
    let scheme = r.scheme.as_ref().expect("checked");
    let d = sm.dim();
    let eye = SuperOperator::identity(d, Picture::Heisenberg);
    let mut table = Table::new(vec!["t", "pulses", "method", "no_dd_distance", "dd_distance"]);
    let mut json_rows = Vec::new();
    for &t in &r.config.times {
        let (pulses, s) = if t == 0.0 {
            (0, scheme.clone())
        } else {
            let n = r
                .config
                .steps
                .unwrap_or_else(|| ((t / scheme.tau()).round() as usize).max(1));
            (n, scheme.with_tau(t / n as f64).map_err(numerical)?)
        };
        let free = cauchy_semigroup(sm, t).map_err(numerical)?;
        let kicked = dd_pocket_evolution(sm, &s, pulses).map_err(numerical)?;
        let (free_dist, dd_dist) = (free.max_dist(&eye), kicked.map.max_dist(&eye));
        let method = method_name(kicked.method);
        table.push(vec![
            t.into(),
            pulses.into(),
            method.into(),
            free_dist.into(),
            dd_dist.into(),
        ]);
        json_rows.push(json!({
            "t": t,
            "pulses": pulses,
            "method": method,
            "no_dd_distance": free_dist,
            "dd_distance": dd_dist,
            "no_dd_map": superop_json(&free),
            "dd_map": superop_json(&kicked.map),
        }));
    }
    Ok(Report {
        table,
        json: json!({"kind": "pocket", "rows": json_rows}),
    })
}

fn kernels(r: &Resolved) -> Result<Report, CliError> {
    let sm = r.spectral.as_ref().expect("checked");
    let (y, x) = (r.y.as_ref().expect("checked"), r.x.as_ref().expect("checked"));
    let mut table = Table::new(vec![
        "t",
        "h",
        "shallow_re",
        "shallow_im",
        "markov_re",
        "markov_im",
        "abs_diff",
    ]);
    let mut json_rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in &r.config.times {
        for &h in &r.config.times {
            let a = two_time_kernel(sm, y, x, t, h).map_err(numerical)?;
            let b = markov_two_time(sm, y, x, t, h).map_err(numerical)?;
            let diff = (a - b).norm();
            worst = worst.max(diff);
            table.push(vec![
                t.into(),
                h.into(),
                a.re.into(),
                a.im.into(),
                b.re.into(),
                b.im.into(),
                diff.into(),
            ]);
            json_rows.push(json!({"t": t, "h": h, "shallow": [a.re, a.im], "markov": [b.re, b.im], "abs_diff": diff}));
        }
    }
    Ok(Report {
        table,
        json: json!({"kind": "kernels", "rows": json_rows, "max_abs_diff": worst}),
    })
}

fn verdict(decoupled: bool) -> &'static str {
    if decoupled {
        "decoupled"
    } else {
        "not-decoupled"
    }
}

fn contrast(r: &Resolved) -> Result<Report, CliError> {
    let cfg = &r.config;
    let gamma = cfg.gamma.unwrap_or(1.0);
    let total_time = cfg.total_time.unwrap_or(1.0);
    let rep = run_contrast(gamma, total_time, &cfg.taus).map_err(numerical)?;
    if rep.semigroup_gap > SEMIGROUP_AGREEMENT_TOL {
        return Err(CliError::Numerical(format!(
            "the two dilations disagree on the semigroup by {:e}",
            rep.semigroup_gap
        )));
    }
    let mut table = Table::new(vec![
        "gamma",
        "T",
        "semigroup_gap",
        "collision_distance",
        "collision_verdict",
        "pocket_pulses",
        "pocket_distance",
        "pocket_verdict",
    ]);
    table.push(vec![
        gamma.into(),
        total_time.into(),
        rep.semigroup_gap.into(),
        rep.collision_distance.into(),
        verdict(rep.collision_decoupled).into(),
        rep.pocket_pulses.into(),
        rep.pocket_distance.into(),
        verdict(rep.pocket_decoupled).into(),
    ]);
    let json = json!({
        "kind": "contrast",
        "gamma": gamma,
        "T": total_time,
        "semigroup_gap": rep.semigroup_gap,
        "collision": {
            "distance_from_identity": rep.collision_distance,
            "verdict": verdict(rep.collision_decoupled),
            "errors_vs_Lbar": rep.collision.rows.iter().map(|row| json!([row.tau, row.error_vs_lbar])).collect::<Vec<_>>(),
        },
        "pocket": {
            "pulses": rep.pocket_pulses,
            "distance_from_identity": rep.pocket_distance,
            "verdict": verdict(rep.pocket_decoupled),
        },
    });
    Ok(Report { table, json })
}
