use mfld::bch::{majorant_gamma, DEFAULT_MAJORANT_ORDER};
use mfld::poly::{m_constant, POISSON_SIGN};
use mfld::quantize::{calibrate_bracket_sign, dgr_defect, quantize, Backend, Operator};
use mfld::thermo::{
    f_limit_scan, legendre, mean_field_sup, outcome_measure, FLimit, GibbsPair, LimitOptions, VariationalOptions,
    ENTROPY_SIGN,
};
use mfld::Polynomial;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Prepared, Scenario};
use crate::error::{CliError, Result};
use crate::table::{Cell, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    FnConverge,
    DgrScan,
    BchMajorant,
    Ldp,
    Variational,
    GtGap,
    BackendCheck,
}

impl Study {
    pub fn table_name(self) -> &'static str {
        match self {
            Study::FnConverge => "fn",
            Study::DgrScan => "dgr",
            Study::BchMajorant => "majorant",
            Study::Ldp => "ldp",
            Study::Variational => "variational",
            Study::GtGap => "gt",
            Study::BackendCheck => "backend",
        }
    }

    pub fn command(self) -> &'static str {
        match self {
            Study::FnConverge => "fn-converge",
            Study::DgrScan => "dgr-scan",
            Study::BchMajorant => "bch-majorant",
            Study::Ldp => "ldp",
            Study::Variational => "variational",
            Study::GtGap => "gt-gap",
            Study::BackendCheck => "backend-check",
        }
    }
}

/// Result of a study: the table, plus a certification failure to report
/// after the table has been written.
pub struct Outcome {
    pub table: ResultTable,
    pub uncertified: Option<String>,
}

pub fn run_study(study: Study, sc: &Scenario, certify: bool) -> Result<Outcome> {
    let p = sc.prepare()?;
    let mut certificates = None;
    let mut table = match study {
        Study::FnConverge => {
            let (t, limits) = fn_converge(sc, &p)?;
            certificates = Some(limits);
            t
        }
        Study::DgrScan => dgr_scan(sc, &p)?,
        Study::BchMajorant => bch_majorant(sc)?,
        Study::Ldp => {
            let (t, limits) = ldp(sc, &p)?;
            certificates = Some(limits);
            t
        }
        Study::Variational => variational(sc, &p)?,
        Study::GtGap => gt_gap(sc, &p)?,
        Study::BackendCheck => backend_check(sc, &p)?,
    };

    let delta_est = if study == Study::BchMajorant {
        majorant_gamma(sc.majorant_order).delta_est
    } else {
        majorant_gamma(DEFAULT_MAJORANT_ORDER).delta_est
    };
    let meta = &mut table.meta;
    meta.insert("command".into(), json!(study.command()));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("scenario".into(), serde_json::to_value(sc)?);
    meta.insert("delta_est".into(), json!(delta_est));
    meta.insert("m_constant".into(), json!(m_constant(&p.basis)));
    meta.insert("entropy_sign".into(), json!(ENTROPY_SIGN));
    meta.insert("bracket_sign".into(), json!(POISSON_SIGN));
    meta.insert("bracket_sign_calibrated".into(), json!(calibrate_bracket_sign(&p.basis)));
    meta.insert(
        "backend".into(),
        Value::Array(
            sc.n_values
                .iter()
                .map(|&n| json!({ "N": n, "backend": sc.backend.resolve(sc.ell, n).name() }))
                .collect(),
        ),
    );
    meta.insert("certify".into(), json!(certify));

    let mut uncertified = None;
    let certs: Vec<Value> = certificates.as_deref().unwrap_or(&[]).iter().map(certificate_json).collect();
    meta.insert("certificates".into(), Value::Array(certs));
    if certify {
        if let Some(bad) = certificates.as_deref().unwrap_or(&[]).iter().find(|l| !l.certificate.is_certified()) {
            uncertified = Some(format!(
                "t = {} lies outside the certified window ({})",
                bad.t,
                certificate_json(bad)
            ));
        }
    }
    Ok(Outcome { table, uncertified })
}

fn certificate_json(l: &FLimit) -> Value {
    use mfld::thermo::Certificate::*;
    let (alpha, scaled) = match l.certificate {
        Abelian => (None, None),
        Majorant { alpha, scaled, .. } | Uncertified { alpha, scaled } => (Some(alpha), Some(scaled)),
    };
    json!({
        "t": l.t,
        "kind": l.certificate.label(),
        "certified": l.certificate.is_certified(),
        "alpha": alpha,
        "scaled": scaled,
        "tail_bound": l.certificate.tail_bound(),
    })
}

fn limit_options(sc: &Scenario) -> LimitOptions {
    LimitOptions {
        variational: variational_options(sc),
        ..Default::default()
    }
}

fn variational_options(sc: &Scenario) -> VariationalOptions {
    VariationalOptions {
        seed: sc.seed,
        ..Default::default()
    }
}

fn quantize_pair(sc: &Scenario, p: &Prepared, n: usize, backend: Backend) -> Result<(Operator, Operator)> {
    let budget = sc.budget();
    Ok((
        quantize(&p.h, n, &p.basis, backend, &budget)?,
        quantize(&p.a, n, &p.basis, backend, &budget)?,
    ))
}

/// One Gibbs pair per `N`, in `n_values` order.
fn gibbs_pairs(sc: &Scenario, p: &Prepared) -> Result<Vec<GibbsPair>> {
    sc.n_values
        .par_iter()
        .map(|&n| {
            let (h, a) = quantize_pair(sc, p, n, sc.backend.resolve(sc.ell, n))?;
            Ok(GibbsPair::new(&h, &a)?)
        })
        .collect()
}

fn fn_converge(sc: &Scenario, p: &Prepared) -> Result<(ResultTable, Vec<FLimit>)> {
    let mut table = ResultTable::new("fn", &["t", "N", "F_N", "F_limit", "tail_bound", "certified"]);
    let pairs = gibbs_pairs(sc, p)?;
    let limits = f_limit_scan(&p.t_values, &p.h, &p.a, sc.truncation_k, &p.basis, &limit_options(sc))?;
    for (&t, lim) in p.t_values.iter().zip(&limits) {
        for (&n, g) in sc.n_values.iter().zip(&pairs) {
            table.push(vec![
                Cell::Real(t),
                Cell::Int(n),
                Cell::Real(g.f_n(t)),
                Cell::Real(lim.value),
                Cell::Real(lim.certificate.tail_bound().unwrap_or(f64::INFINITY)),
                Cell::Flag(lim.certificate.is_certified()),
            ]);
        }
    }
    Ok((table, limits))
}

fn dgr_scan(sc: &Scenario, p: &Prepared) -> Result<ResultTable> {
    let mut table = ResultTable::new("dgr", &["f", "g", "N", "defect"]);
    let budget = sc.budget();
    let defects: Vec<f64> = sc
        .n_values
        .par_iter()
        .map(|&n| Ok(dgr_defect(&p.a, &p.h, n, &p.basis, sc.backend.resolve(sc.ell, n), &budget)?))
        .collect::<Result<_>>()?;
    for (&n, d) in sc.n_values.iter().zip(defects) {
        table.push(vec![
            Cell::Text(sc.a_symbol.clone()),
            Cell::Text(sc.h_symbol.clone()),
            Cell::Int(n),
            Cell::Real(d),
        ]);
    }
    table.meta.insert("orientation".into(), json!("f = a_symbol, g = h_symbol"));
    Ok(table)
}

fn bch_majorant(sc: &Scenario) -> Result<ResultTable> {
    if sc.majorant_order < 2 {
        return Err(CliError::Config("majorant_order must be at least 2".into()));
    }
    let mut table = ResultTable::new("majorant", &["n", "gamma_num", "gamma_den", "ratio", "delta_est"]);
    let series = majorant_gamma(sc.majorant_order);
    let extended = majorant_gamma(sc.majorant_order + 1);
    let ratios = extended.ratios();
    for n in 1..=sc.majorant_order {
        let g = series.gamma(n);
        table.push(vec![
            Cell::Int(n),
            Cell::Text(g.numer().to_string()),
            Cell::Text(g.denom().to_string()),
            Cell::Real(ratios[n - 1]),
            Cell::Real(series.delta_est),
        ]);
    }
    table.meta.insert("ratio".into(), json!("gamma(n) / gamma(n+1)"));
    Ok(table)
}

fn ldp(sc: &Scenario, p: &Prepared) -> Result<(ResultTable, Vec<FLimit>)> {
    if p.t_values.len() < 2 {
        return Err(CliError::Config("ldp needs at least two t values for the Legendre transform".into()));
    }
    let mut table = ResultTable::new("ldp", &["N", "bin_center", "mass", "empirical_rate", "legendre_rate"]);
    let limits = f_limit_scan(&p.t_values, &p.h, &p.a, sc.truncation_k, &p.basis, &limit_options(sc))?;
    let values: Vec<f64> = limits.iter().map(|l| l.value).collect();
    let rate = legendre(&p.t_values, &values)?;
    let measures = sc
        .n_values
        .par_iter()
        .map(|&n| {
            let (h, a) = quantize_pair(sc, p, n, sc.backend.resolve(sc.ell, n))?;
            Ok(outcome_measure(&h, &a, sc.bins)?)
        })
        .collect::<Result<Vec<_>>>()?;
    for (&n, mu) in sc.n_values.iter().zip(&measures) {
        for bin in &mu.bins {
            table.push(vec![
                Cell::Int(n),
                Cell::Real(bin.center()),
                Cell::Real(bin.mass()),
                Cell::Real(-bin.log_mass / n as f64),
                Cell::Real(rate.min_over(bin.lo, bin.hi)),
            ]);
        }
    }
    table.meta.insert("slope_interval".into(), json!([rate.slope_interval.0, rate.slope_interval.1]));
    table.meta.insert("convexity_warning".into(), json!(rate.convexity_warning));
    Ok((table, limits))
}

fn variational(sc: &Scenario, p: &Prepared) -> Result<ResultTable> {
    let mut table = ResultTable::new("variational", &["symbol", "value", "argmax", "gap_to_grid"]);
    let mut symbols: Vec<(String, Polynomial)> = vec![
        (sc.h_symbol.clone(), p.h.clone()),
        (sc.a_symbol.clone(), p.a.clone()),
    ];
    for &t in &p.t_values {
        let f = p.h.add(&p.a.scale(t))?;
        symbols.push((f.to_string(), f));
    }
    let opts = variational_options(sc);
    let results = symbols
        .par_iter()
        .map(|(_, f)| Ok(mean_field_sup(f, &p.basis, &opts)?))
        .collect::<Result<Vec<_>>>()?;
    for ((text, _), r) in symbols.into_iter().zip(results) {
        let argmax = r.argmax_x.x.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
        table.push(vec![Cell::Text(text), Cell::Real(r.value), Cell::Text(argmax), Cell::Real(r.gap_to_grid)]);
    }
    table.meta.insert("objective".into(), json!("sup over states of symbol + entropy_sign * S"));
    Ok(table)
}

fn gt_gap(sc: &Scenario, p: &Prepared) -> Result<ResultTable> {
    let mut table = ResultTable::new("gt", &["t", "N", "lhs", "rhs", "gap"]);
    let pairs = gibbs_pairs(sc, p)?;
    for &t in &p.t_values {
        for (&n, g) in sc.n_values.iter().zip(&pairs) {
            let gt = g.gt_gap(t)?;
            table.push(vec![Cell::Real(t), Cell::Int(n), Cell::Real(gt.lhs), Cell::Real(gt.rhs), Cell::Real(gt.gap())]);
        }
    }
    Ok(table)
}

fn backend_check(sc: &Scenario, p: &Prepared) -> Result<ResultTable> {
    if sc.ell != 2 {
        return Err(CliError::Config("backend-check compares against the block backend, which needs ell = 2".into()));
    }
    let mut table = ResultTable::new("backend", &["t", "N", "dense", "block", "abs_diff"]);
    let pairs = sc
        .n_values
        .par_iter()
        .map(|&n| {
            let (hd, ad) = quantize_pair(sc, p, n, Backend::Dense)?;
            let (hb, ab) = quantize_pair(sc, p, n, Backend::Block)?;
            Ok((GibbsPair::new(&hd, &ad)?, GibbsPair::new(&hb, &ab)?))
        })
        .collect::<Result<Vec<_>>>()?;
    for &t in &p.t_values {
        for (&n, (d, b)) in sc.n_values.iter().zip(&pairs) {
            let (fd, fb) = (d.f_n(t), b.f_n(t));
            table.push(vec![Cell::Real(t), Cell::Int(n), Cell::Real(fd), Cell::Real(fb), Cell::Real((fd - fb).abs())]);
        }
    }
    table.meta.insert("observable".into(), json!("F_N(t)"));
    Ok(table)
}
