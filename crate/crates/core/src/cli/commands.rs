use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::Value;

use super::output::{cnum, num, obj, Envelope};
use super::{AlphaArgs, BoundsArgs, CliError, DedupArg, DeltaArgs, GreenArgs, PolicyArg, ResolventArgs};
use crate::bounds_engine::{compare, sullivan_corlette};
use crate::form_resolvent::frobenius::{operator_norm, ResonancePolicy};
use crate::form_resolvent::psi::psi_extract_block_combination;
use crate::form_resolvent::{
    build_radial_operator, cover_point, decay_check, frobenius_solve, kernel_eval, psi_extract_with, FrobeniusConfig,
    FrobeniusKernel, PsiConfig, PsiReport, RadialOperator, ResolventError,
};
use crate::orbit_geometry::enumerate::{enumerate_orbit, DedupPolicy};
use crate::orbit_geometry::model::CVec;
use crate::orbit_geometry::{estimate_delta, GroupGenerators};
use crate::scalar_green::{green0_eval, green0_ode_residual};
use crate::space_constants::{alpha_p, make_space, rational_string, rational_to_f64, ConstantsError, Field};

fn value_name<T: ValueEnum>(v: T) -> Value {
    Value::String(v.to_possible_value().expect("no skipped variants").get_name().to_string())
}

fn kv(items: Vec<(&str, Value)>) -> Vec<(String, Value)> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn alpha(a: &AlphaArgs) -> Result<Envelope, CliError> {
    let space = make_space(a.field, a.n)?;
    let lo = a.p_min.unwrap_or(0);
    let hi = a.p_max.unwrap_or(space.dim);
    if lo < 0 || hi > space.dim || lo > hi {
        return Err(CliError::domain(format!("degree range [{lo}, {hi}] is not inside [0, {}]", space.dim)));
    }
    let mut env = Envelope::new("alpha", &["p", "alpha", "alpha_float", "status"]);
    env.param("field", Value::String(a.field.symbol().into()));
    env.param("n", Value::from(a.n));
    env.param("p_min", Value::from(lo));
    env.param("p_max", Value::from(hi));
    for p in lo..=hi {
        let row = match alpha_p(&space, p) {
            Ok(v) => kv(vec![
                ("p", Value::from(p)),
                ("alpha", Value::String(rational_string(&v))),
                ("alpha_float", num(rational_to_f64(&v))),
                ("status", Value::String("ok".into())),
            ]),
            Err(ConstantsError::UnknownConstant { .. }) => kv(vec![
                ("p", Value::from(p)),
                ("alpha", Value::String("unknown".into())),
                ("alpha_float", Value::Null),
                ("status", Value::String("unknown".into())),
            ]),
            Err(e) => return Err(e.into()),
        };
        env.row(row);
    }
    env.summary = Some(obj([("rho", Value::String(rational_string(&space.rho))), ("dim", Value::from(space.dim))]));
    Ok(env)
}

pub fn bounds(a: &BoundsArgs) -> Result<Envelope, CliError> {
    let space = make_space(a.field, a.n)?;
    let r = compare(&space, a.p, a.delta)?;
    let opt = |x: Option<f64>| x.map_or(Value::Null, num);
    let mut env = Envelope::new(
        "bounds",
        &[
            "p",
            "delta",
            "theorem_b",
            "theorem_b_raw",
            "clamped",
            "zero_possible",
            "zero_isolated",
            "sullivan_corlette_lambda00",
            "bochner",
            "difference",
        ],
    );
    env.param("field", Value::String(a.field.symbol().into()));
    env.param("n", Value::from(a.n));
    env.param("p", Value::from(a.p));
    env.param("delta", num(a.delta));
    env.row(kv(vec![
        ("p", Value::from(r.p)),
        ("delta", num(r.delta)),
        ("theorem_b", num(r.theorem_b_bound)),
        ("theorem_b_raw", num(r.theorem_b_raw)),
        ("clamped", Value::Bool(r.clamped)),
        ("zero_possible", Value::Bool(r.zero_possible)),
        ("zero_isolated", Value::Bool(r.zero_isolated)),
        ("sullivan_corlette_lambda00", num(r.sullivan_corlette_lambda00)),
        ("bochner", opt(r.bochner_bound)),
        ("difference", opt(r.difference)),
    ]));
    Ok(env)
}

pub fn green(a: &GreenArgs) -> Result<Envelope, CliError> {
    let space = make_space(a.field, a.n)?;
    let radii = a.r.points(a.log).map_err(CliError::usage)?;
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(CliError::domain(format!("radius {r} must be positive")));
    }
    let mut env = Envelope::new("green", &["r", "re_g0", "im_g0", "residual"]);
    env.param("field", Value::String(a.field.symbol().into()));
    env.param("n", Value::from(a.n));
    env.param("s", cnum(a.s));
    env.param("r", Value::String(a.r.describe()));
    env.param("log", Value::Bool(a.log));
    for r in radii {
        let g = green0_eval(&space, a.s, r)?;
        let res = green0_ode_residual(&space, a.s, r)?;
        env.row(kv(vec![("r", num(r)), ("re_g0", num(g.re)), ("im_g0", num(g.im)), ("residual", num(res))]));
    }
    Ok(env)
}

fn frobenius_config(a: &ResolventArgs) -> FrobeniusConfig {
    FrobeniusConfig {
        truncation: a.order,
        policy: match a.policy {
            PolicyArg::LogTerms => ResonancePolicy::LogTerms,
            PolicyArg::Reject => ResonancePolicy::Reject,
        },
        ..FrobeniusConfig::default()
    }
}

fn psi_json(r: &PsiReport) -> Value {
    let matrix: Vec<Value> =
        (0..r.psi.nrows()).map(|i| Value::Array((0..r.psi.ncols()).map(|j| cnum(r.psi[(i, j)])).collect())).collect();
    obj([
        ("matrix", Value::Array(matrix)),
        ("smallest_singular_value", num(r.smallest_singular_value)),
        ("singularity_exponent", num(r.singularity_exponent)),
        ("fit_rms", num(r.fit_rms)),
    ])
}

fn resolvent_summary(a: &ResolventArgs, op: &RadialOperator, k: &FrobeniusKernel) -> Result<Value, CliError> {
    let pt = &k.cover_point;
    let exponents: Vec<Value> =
        k.blocks.iter().map(|b| obj([("e", Value::from(b.e)), ("mu", cnum(b.mu))])).collect();
    let resonances: Vec<Value> = k
        .resonances
        .iter()
        .map(|r| {
            obj([
                ("block", Value::from(r.block)),
                ("step", Value::from(r.l)),
                ("target", Value::from(r.target)),
                ("logarithmic", Value::Bool(r.logarithmic)),
            ])
        })
        .collect();
    let fit = a.fit.points(a.log).map_err(CliError::usage)?;
    let rate = decay_check(k, &fit)?;
    let mut items = vec![
        ("rho", num(k.rho)),
        ("exponents", Value::Array(exponents)),
        ("on_physical_sheet", Value::Bool(pt.on_physical_sheet)),
        ("h", num(pt.h)),
        ("resonance_margin", num(k.resonance_margin)),
        ("resonances", Value::Array(resonances)),
        ("max_log_degree", Value::from(k.max_log_degree())),
        ("tail_threshold", num(k.tail_threshold)),
        ("truncation_warning", Value::Bool(k.truncation_warning)),
        (
            "decay_fit",
            obj([("rate", num(rate)), ("expected", num(k.rho + pt.h)), ("window", Value::String(a.fit.describe()))]),
        ),
    ];
    if a.p == 0 {
        let space = make_space(Field::Real, a.n as i64)?;
        let grid = a.t.points(a.log).map_err(CliError::usage)?;
        let ratio = |t: f64| -> Result<Complex64, CliError> {
            Ok(kernel_eval(k, t)?[(0, 0)] / green0_eval(&space, pt.s, t)?)
        };
        let r0 = ratio(grid[0])?;
        let mut dev: f64 = 0.0;
        for &t in &grid {
            dev = dev.max((ratio(t)? / r0 - 1.0).norm());
        }
        items.push(("scalar_oracle", obj([("ratio", cnum(r0)), ("max_relative_deviation", num(dev))])));
    }
    if a.psi {
        let cfg = PsiConfig::default();
        let report = psi_extract_with(op, k, a.t0, a.t_start, &cfg)?;
        let mut psi = psi_json(&report);
        if k.blocks.len() == 2 {
            let loose = PsiConfig { fit_tolerance: f64::INFINITY, ..cfg };
            let (c, combo) = psi_extract_block_combination(op, k, a.t0, a.t_start, &loose)?;
            if let Value::Object(m) = &mut psi {
                m.insert(
                    "block_combination".into(),
                    obj([
                        ("coefficient", cnum(c)),
                        ("singularity_exponent", num(combo.singularity_exponent)),
                        ("smallest_singular_value", num(combo.smallest_singular_value)),
                    ]),
                );
            }
        }
        items.push(("psi", psi));
    }
    Ok(obj(items))
}

pub fn resolvent(a: &ResolventArgs) -> Result<Envelope, CliError> {
    let space = make_space(Field::Real, a.n as i64)?;
    let op = build_radial_operator(a.n, a.p, a.order)?;
    let cfg = frobenius_config(a);
    let base_params = |env: &mut Envelope| {
        env.param("n", Value::from(a.n));
        env.param("p", Value::from(a.p));
        env.param("order", Value::from(a.order));
        env.param("policy", value_name(a.policy));
        env.param("signs", Value::Array(a.signs.0.iter().map(|&v| Value::from(v)).collect()));
    };

    if let Some(scan) = &a.scan {
        let mut env = Envelope::new("resolvent", &["s", "status", "resonance_margin", "logarithmic_resonances"]);
        base_params(&mut env);
        env.param("scan", Value::String(scan.describe()));
        for s in scan.points(false).map_err(CliError::usage)? {
            let s = Complex64::new(s, 0.0);
            let outcome = cover_point(&space, a.p as i64, s, &a.signs.0).and_then(|pt| frobenius_solve(&op, &pt, &cfg));
            let (status, margin, logs) = match outcome {
                Ok(k) => {
                    let logs = k.resonances.iter().filter(|r| r.logarithmic).count();
                    (if logs > 0 { "log_terms" } else { "ok" }, num(k.resonance_margin), Value::from(logs))
                }
                Err(ResolventError::ResonanceDetected { margin, .. }) => ("resonance", num(margin), Value::Null),
                Err(ResolventError::BranchPoint { .. }) => ("branch_point", Value::Null, Value::Null),
                Err(e) => return Err(e.into()),
            };
            env.row(kv(vec![
                ("s", num(s.re)),
                ("status", Value::String(status.into())),
                ("resonance_margin", margin),
                ("logarithmic_resonances", logs),
            ]));
        }
        return Ok(env);
    }

    let pt = cover_point(&space, a.p as i64, a.s, &a.signs.0)?;
    let k = frobenius_solve(&op, &pt, &cfg)?;
    let block_cols: Vec<String> = k.blocks.iter().map(|b| format!("block_e{}", b.e)).collect();
    let mut cols: Vec<&str> = vec!["t"];
    cols.extend(block_cols.iter().map(String::as_str));
    cols.extend(["total_norm", "residual"]);
    let mut env = Envelope::new("resolvent", &cols);
    base_params(&mut env);
    env.param("s", cnum(a.s));
    env.param("t", Value::String(a.t.describe()));
    env.param("log", Value::Bool(a.log));
    for t in a.t.points(a.log).map_err(CliError::usage)? {
        let mut row = vec![("t".to_string(), num(t))];
        for ((_, norm), col) in k.block_norms(t)?.into_iter().zip(&block_cols) {
            row.push((col.clone(), num(norm)));
        }
        row.push(("total_norm".into(), num(operator_norm(&kernel_eval(&k, t)?))));
        row.push(("residual".into(), num(k.ode_residual(&op, t)?)));
        env.row(row);
    }
    env.summary = Some(resolvent_summary(a, &op, &k)?);
    Ok(env)
}

pub fn delta(a: &DeltaArgs) -> Result<Envelope, CliError> {
    let gens = GroupGenerators::from_file(&a.group_file)?;
    let base = match &a.base_point {
        Some(p) => CVec::from_vec(p.0.clone()),
        None => gens.base(),
    };
    let policy = match a.dedup {
        DedupArg::FreeReduction => DedupPolicy::FreeReduction,
        DedupArg::MatrixHash => DedupPolicy::MatrixHash,
    };
    let sample = enumerate_orbit(&gens, &base, a.max_len, policy)?;
    let est = estimate_delta(&sample)?;
    let space = make_space(gens.model.field(), gens.model.n() as i64)?;
    let top = 2.0 * gens.model.rho();
    let lambda = |d: f64| sullivan_corlette(&space, d.clamp(0.0, top));

    let mut env = Envelope::new(
        "delta",
        &[
            "growth_fit",
            "bisection",
            "spread",
            "radius",
            "words",
            "elements",
            "lambda00_growth_fit",
            "lambda00_bisection",
        ],
    );
    env.param("group_file", Value::String(a.group_file.display().to_string()));
    env.param("max_len", Value::from(a.max_len));
    env.param("dedup", value_name(a.dedup));
    env.param("base_point", Value::Array(base.iter().map(|&z| cnum(z)).collect()));
    env.row(kv(vec![
        ("growth_fit", num(est.growth_fit)),
        ("bisection", num(est.bisection)),
        ("spread", num(est.spread)),
        ("radius", num(est.radius)),
        ("words", Value::from(sample.words_enumerated())),
        ("elements", Value::from(sample.distances.len())),
        ("lambda00_growth_fit", num(lambda(est.growth_fit)?)),
        ("lambda00_bisection", num(lambda(est.bisection)?)),
    ]));
    env.summary = Some(obj([
        ("model", serde_json::to_value(gens.model).expect("model serializes")),
        ("generators", Value::Array(gens.generators.iter().map(|g| Value::String(g.label.clone())).collect())),
        ("assumed_free", Value::Bool(gens.assumed_free)),
        ("rho", num(gens.model.rho())),
        ("words_by_length", Value::Array(sample.words_by_length.iter().map(|&c| Value::from(c)).collect())),
        ("duplicates_removed", Value::from(sample.duplicates_removed)),
        ("shells", Value::from(est.shells)),
    ]));
    Ok(env)
}
