use perc_lab::dims::{full_report, DimensionReport};
use perc_lab::engine::{generate, PercolationParams};
use perc_lab::estimators::{self, format_float, EstimateReport, CSV_HEADER};
use perc_lab::rng::derive_seed;
use perc_lab::sequence::classify;
use perc_lab::witness::{self, WitnessSpec};
use perc_lab::{ProbSequence, SeqSpec};
use serde_json::json;

use crate::config::{Command, Config, Format, Quantity, SweepParam};
use crate::error::CliError;
use crate::output::{emit, to_value, Artifact};

/// Extra columns after the fixed estimator columns.
const THEORY_COLUMNS: [&str; 2] = ["theory_finite_depth", "theory_limit"];

const DIMS_HEADER: [&str; 13] = [
    "quantity",
    "n",
    "m",
    "family",
    "params",
    "method",
    "hausdorff",
    "packing",
    "assouad",
    "box_lower",
    "box_upper",
    "expected_measure",
    "degenerate",
];

const CLASSIFY_HEADER: [&str; 11] = [
    "quantity",
    "n",
    "m",
    "family",
    "params",
    "alpha",
    "beta",
    "alpha_method",
    "beta_method",
    "survival_class",
    "interior_class",
];

fn sequence(spec: &SeqSpec) -> Result<ProbSequence, CliError> {
    spec.clone().build().map_err(|e| match e {
        perc_lab::Error::MissingField { .. } => CliError::Config(e.to_string()),
        e => e.into(),
    })
}

fn params(cfg: &Config, seq: ProbSequence, seed: u64, depth: u32) -> PercolationParams {
    PercolationParams::new(cfg.n, cfg.m, depth, seq, seed).with_budget(cfg.cell_budget)
}

fn replicates(cfg: &Config) -> usize {
    cfg.replicates.expect("filled for sampling commands")
}

fn f(x: f64) -> String {
    format_float(Some(x))
}

fn label<T: serde::Serialize>(v: T) -> String {
    match serde_json::to_value(v).expect("enum serializes") {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

fn estimate_row(r: &EstimateReport, p: &PercolationParams) -> Vec<String> {
    let mut row = r.csv_record(p);
    row.push(format_float(r.theory_finite_depth));
    row.push(format_float(r.theory_limit));
    row
}

fn dims_row(r: &DimensionReport, seq: &ProbSequence) -> Vec<String> {
    vec![
        "dims".into(),
        r.n.to_string(),
        r.m.to_string(),
        seq.kind().as_str().into(),
        serde_json::to_string(seq).expect("sequence serializes"),
        label(r.method),
        f(r.hausdorff),
        f(r.packing),
        f(r.assouad),
        f(r.box_lower),
        f(r.box_upper),
        f(r.expected_measure),
        r.degenerate.to_string(),
    ]
}

fn csv_bytes<I, R>(header: I, rows: R) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = String>,
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::io("formatting CSV", e.into());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::io("formatting CSV", e.into_error()))
}

fn estimator_header() -> Vec<String> {
    CSV_HEADER.iter().chain(THEORY_COLUMNS.iter()).map(|s| s.to_string()).collect()
}

fn estimate(cfg: &Config, quantity: Quantity, p: &PercolationParams) -> Result<EstimateReport, CliError> {
    let reps = replicates(cfg);
    Ok(match quantity {
        Quantity::Measure => estimators::estimate_measure(p, reps)?,
        Quantity::Survival => estimators::estimate_survival(p, reps)?,
        _ => unreachable!("not a scalar estimator"),
    })
}

fn boxdim_value(cfg: &Config, p: &PercolationParams) -> Result<serde_json::Value, CliError> {
    let [lo, hi] = cfg.fit_levels.expect("filled for boxdim");
    let fit = estimators::estimate_boxdim(p, replicates(cfg), (lo, hi))?;
    let theory = full_report(&p.seq, p.n, p.m, cfg.windows)?;
    let mut v = to_value(&fit);
    v["theory_box_lower"] = json!(theory.box_lower);
    v["theory_box_upper"] = json!(theory.box_upper);
    Ok(v)
}

/// Box-count fit as an estimator row; the theory is the analytic lower box dimension.
fn boxdim_row(cfg: &Config, p: &PercolationParams) -> Result<Vec<String>, CliError> {
    let [lo, hi] = cfg.fit_levels.expect("filled for boxdim");
    let fit = estimators::estimate_boxdim(p, replicates(cfg), (lo, hi))?;
    let theory = full_report(&p.seq, p.n, p.m, cfg.windows)?.box_lower;
    let z = fit.slope_std_error.filter(|&se| se > 0.0).map(|se| (fit.slope - theory) / se);
    Ok(vec![
        estimators::Quantity::BoxDimension.as_str().into(),
        p.n.to_string(),
        p.m.to_string(),
        p.depth.to_string(),
        p.seq.kind().as_str().into(),
        serde_json::to_string(&p.seq).expect("sequence serializes"),
        fit.replicates.to_string(),
        f(fit.slope),
        format_float(fit.slope_std_error),
        f(theory),
        format_float(z),
        String::new(),
        f(theory),
    ])
}

pub fn run(cfg: &Config) -> Result<(), CliError> {
    let command = cfg.command();
    let seq = || sequence(cfg.seq.as_ref().expect("checked at resolution"));
    match command {
        Command::Dims => {
            let r = full_report(&seq()?, cfg.n, cfg.m, cfg.windows)?;
            let summary = format!(
                "dims: hausdorff={} packing={} assouad={} expected_measure={} ({})",
                r.hausdorff,
                r.packing,
                r.assouad,
                r.expected_measure,
                label(r.method)
            );
            emit(cfg, Artifact::Json(to_value(&r)), &summary)
        }
        Command::Classify => {
            let r = classify(&seq()?, cfg.n, cfg.m, cfg.windows.k)?;
            let summary = format!(
                "classify: alpha={} beta={} {} {}",
                r.alpha,
                r.beta,
                label(r.survival_class),
                label(r.interior_class)
            );
            emit(cfg, Artifact::Json(to_value(&r)), &summary)
        }
        Command::Generate => {
            let r = generate(&params(cfg, seq()?, cfg.seed, cfg.depth))?;
            let counts = r.counts();
            let summary =
                format!("generate: X_{} = {}, survives={}", cfg.depth, counts[cfg.depth as usize], r.survives());
            emit(cfg, Artifact::Json(to_value(&r)), &summary)
        }
        Command::Render => {
            let r = generate(&params(cfg, seq()?, cfg.seed, cfg.depth))?;
            let raster = r.render_raster(cfg.level.expect("filled for render"))?;
            let summary = format!("render: {}x{} raster, {} occupied", raster.width, raster.height, raster.occupied());
            emit(cfg, Artifact::Pgm(raster.to_pgm()), &summary)
        }
        Command::Measure | Command::Survival => {
            let quantity = if command == Command::Measure { Quantity::Measure } else { Quantity::Survival };
            let p = params(cfg, seq()?, cfg.seed, cfg.depth);
            let r = estimate(cfg, quantity, &p)?;
            let summary = format!(
                "{}: {} ± {} (theory {}, z {})",
                command.as_str(),
                r.estimate,
                r.std_error,
                format_float(r.theory),
                format_float(r.z_score)
            );
            let artifact = match cfg.output.format.expect("filled") {
                Format::Csv => Artifact::Csv(csv_bytes(estimator_header(), [estimate_row(&r, &p)])?),
                _ => Artifact::Json(to_value(&r)),
            };
            emit(cfg, artifact, &summary)
        }
        Command::Boxdim => {
            let v = boxdim_value(cfg, &params(cfg, seq()?, cfg.seed, cfg.depth))?;
            let summary = format!("boxdim: slope {} over {} survivors", v["slope"], v["replicates"]);
            emit(cfg, Artifact::Json(v), &summary)
        }
        Command::Witness => witness_cmd(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn witness_cmd(cfg: &Config) -> Result<(), CliError> {
    let w = &cfg.witness;
    let spec = WitnessSpec {
        r: w.r.expect("checked at resolution"),
        l: w.l,
        n: cfg.n,
        m: cfg.m,
        case: w.case.into(),
        terms: w.terms,
        depth: w.depth,
    };
    let report = witness::build(&spec)?;
    let mut v = json!({ "report": to_value(&report), "ledger": report.ledger() });
    let mut summary = format!(
        "witness: {} components, combined_dim={} combined_measure={}",
        report.components.len(),
        report.combined_dim,
        report.combined_measure
    );
    if w.estimate {
        let est = witness::estimate_witness_measure(&report, w.depth, replicates(cfg), cfg.seed)?;
        summary.push_str(&format!(
            ", MC measure {} ± {} (theory {})",
            est.estimate,
            est.std_error,
            format_float(est.theory)
        ));
        v["estimate"] = to_value(&est);
    }
    emit(cfg, Artifact::Json(v), &summary)
}

fn point_spec(cfg: &Config, value: f64) -> Result<(SeqSpec, u32), CliError> {
    let mut spec = cfg.seq.clone().expect("checked at resolution");
    let mut depth = cfg.depth;
    match cfg.sweep.param {
        SweepParam::P => {
            if spec.kind == perc_lab::SeqKind::Explicit {
                return Err(CliError::Config(format!("sequence kind {} has no parameter p", spec.kind.as_str())));
            }
            spec.p = Some(value);
        }
        SweepParam::A => {
            use perc_lab::SeqKind::*;
            if !matches!(spec.kind, Table1Family1 | Table1Family2) {
                return Err(CliError::Config(format!("sequence kind {} has no parameter a", spec.kind.as_str())));
            }
            spec.a = Some(value);
        }
        SweepParam::Depth => {
            if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
                return Err(CliError::Config(format!("depth grid point {value} is not a positive integer")));
            }
            depth = value as u32;
        }
    }
    Ok((spec, depth))
}

fn sweep(cfg: &Config) -> Result<(), CliError> {
    let quantity = cfg.sweep.quantity.expect("checked at resolution");
    let points = cfg.sweep.grid.expect("checked at resolution").points();
    let mut rows = Vec::with_capacity(points.len());
    for &value in &points {
        let (spec, depth) = point_spec(cfg, value)?;
        let seq = sequence(&spec)?;
        // Seeded by the grid value, so equal points give equal rows.
        let seed = derive_seed(cfg.seed, value.to_bits());
        let row = match quantity {
            Quantity::Dims => dims_row(&full_report(&seq, cfg.n, cfg.m, cfg.windows)?, &seq),
            Quantity::Classify => {
                let r = classify(&seq, cfg.n, cfg.m, cfg.windows.k)?;
                vec![
                    "classify".into(),
                    cfg.n.to_string(),
                    cfg.m.to_string(),
                    seq.kind().as_str().into(),
                    serde_json::to_string(&seq).expect("sequence serializes"),
                    f(r.alpha),
                    f(r.beta),
                    label(r.alpha_method),
                    label(r.beta_method),
                    label(r.survival_class),
                    label(r.interior_class),
                ]
            }
            Quantity::Measure | Quantity::Survival => {
                let p = params(cfg, seq, seed, depth);
                estimate_row(&estimate(cfg, quantity, &p)?, &p)
            }
            Quantity::Boxdim => boxdim_row(cfg, &params(cfg, seq, seed, depth))?,
        };
        rows.push(row);
    }
    let header: Vec<String> = match quantity {
        Quantity::Dims => DIMS_HEADER.iter().map(|s| s.to_string()).collect(),
        Quantity::Classify => CLASSIFY_HEADER.iter().map(|s| s.to_string()).collect(),
        _ => estimator_header(),
    };
    let summary = format!("sweep: {} points of {} over {}", rows.len(), label(quantity), label(cfg.sweep.param));
    emit(cfg, Artifact::Csv(csv_bytes(header, rows)?), &summary)
}
