use num_complex::Complex64;
use pfpart::measures::{mixed_measure, pfaffian_schur_weight, plancherel_mixed, PlancherelParams, ZMeasureParams};
use pfpart::oracle::{identity_suite, SuiteParams, TruncationPolicy, WeightedEnsemble};
use pfpart::partitions::partitions_up_to;
use pfpart::pfaffian::correlation_pfaffian;
use pfpart::{CorrelationQuery, Route, ScalarKernel};
use serde_json::{json, Value};

use crate::config::{complex_json, Family, RunConfig};
use crate::error::CliError;
use crate::output::{write_json, Column, Table};

fn core_config(e: pfpart::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn core_kernel(e: pfpart::Error) -> CliError {
    CliError::Kernel(e.to_string())
}

type Weight = Box<dyn Fn(&pfpart::Partition) -> Result<Complex64, CliError>>;

pub fn measure(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.require_family()?;
    let weight: Weight = match family {
        Family::Z { z, xi } => {
            let p = ZMeasureParams::theta2(*z, *xi).map_err(core_config)?;
            Box::new(move |l| mixed_measure(&p, l).map_err(core_kernel))
        }
        Family::Plancherel { eta } => {
            let p = PlancherelParams::new(*eta).map_err(core_config)?;
            Box::new(move |l| Ok(Complex64::new(plancherel_mixed(&p, 2.0, l), 0.0)))
        }
        // unnormalized determinant weights
        Family::Generic { spec, .. } => {
            let spec = spec.clone();
            Box::new(move |l| Ok(pfaffian_schur_weight(&spec, l)))
        }
    };
    let mut table = Table::new(vec![
        Column::Plain("size"),
        Column::Plain("partition"),
        Column::Complex("measure"),
    ]);
    for level in partitions_up_to(cfg.n_cut) {
        for lambda in level {
            let value = weight(&lambda)?;
            let parts = json!(lambda.parts());
            table.push(vec![lambda.size().into(), parts.into(), value.into()]);
        }
    }
    let mut meta = cfg.metadata("measure");
    meta.insert("records".into(), json!(table.len()));
    table.write(meta, cfg.format, cfg.output.as_deref())
}

fn build_kernel(cfg: &RunConfig, family: &Family, route: Route) -> Result<ScalarKernel, CliError> {
    ScalarKernel::new(family.kernel_family(), route, cfg.kernel_settings()).map_err(core_config)
}

/// Evaluates the grid; on failure, retries entry by entry to name the
/// offending (x, y).
fn kernel_grid(kernel: &ScalarKernel, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<(Complex64, f64)>>, CliError> {
    let grid = match kernel.evaluate_grid(xs, ys) {
        Ok(grid) => grid,
        Err(e) => {
            for &x in xs {
                for &y in ys {
                    if let Err(inner) = kernel.evaluate(x, y) {
                        return Err(CliError::Kernel(format!(
                            "route {} at (x, y) = ({x}, {y}): {inner}",
                            kernel.route()
                        )));
                    }
                }
            }
            return Err(CliError::Kernel(format!("route {}: {e}", kernel.route())));
        }
    };
    for (i, row) in grid.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !(v.value.re.is_finite() && v.value.im.is_finite()) {
                return Err(CliError::Kernel(format!(
                    "route {} at (x, y) = ({}, {}): non-finite value",
                    kernel.route(),
                    xs[i],
                    ys[j]
                )));
            }
        }
    }
    Ok(grid
        .into_iter()
        .map(|row| row.into_iter().map(|v| (v.value, v.error)).collect())
        .collect())
}

pub fn kernel(cfg: &RunConfig, xs: &[i64], ys: &[i64], diff: Option<Route>) -> Result<(), CliError> {
    let family = cfg.require_family()?;
    let route = cfg.route_for(family);
    let primary = build_kernel(cfg, family, route)?;
    let other = diff.map(|r| build_kernel(cfg, family, r)).transpose()?;

    let mut columns = vec![
        Column::Plain("x"),
        Column::Plain("y"),
        Column::Complex("S"),
        Column::Plain("route"),
        Column::Plain("error"),
    ];
    if other.is_some() {
        columns.extend([
            Column::Complex("S_alt"),
            Column::Plain("alt_route"),
            Column::Plain("gap"),
        ]);
    }
    let mut table = Table::new(columns);

    let values = kernel_grid(&primary, xs, ys)?;
    let alt = other.as_ref().map(|k| kernel_grid(k, xs, ys)).transpose()?;
    let mut max_gap = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let (s, err) = values[i][j];
            let mut row = vec![x.into(), y.into(), s.into(), route.as_str().into(), err.into()];
            if let (Some(alt), Some(k)) = (&alt, &other) {
                let (s_alt, _) = alt[i][j];
                let gap = (s - s_alt).norm();
                max_gap = max_gap.max(gap);
                row.extend([s_alt.into(), k.route().as_str().into(), gap.into()]);
            }
            table.push(row);
        }
    }
    let mut meta = cfg.metadata("kernel");
    meta.insert("x".into(), json!(xs));
    meta.insert("y".into(), json!(ys));
    if let Some(k) = &other {
        meta.insert("diff_route".into(), json!(k.route().as_str()));
        meta.insert("max_gap".into(), json!(max_gap));
        eprintln!("max |S_{} - S_{}| = {max_gap:e}", route, k.route());
    }
    table.write(meta, cfg.format, cfg.output.as_deref())
}

pub fn correlate(cfg: &RunConfig, points: Vec<i64>) -> Result<(), CliError> {
    let family = cfg.require_family()?;
    let route = cfg.route_for(family);
    let query = CorrelationQuery::new(points).map_err(core_config)?;
    let kernel = build_kernel(cfg, family, route)?;
    let rho = correlation_pfaffian(&kernel, &query).map_err(core_kernel)?;

    let mut columns = vec![Column::Plain("points"), Column::Complex("rho")];
    let mut row = vec![json!(query.points()).into(), rho.into()];
    let mut failure = None;
    if cfg.oracle {
        let policy = TruncationPolicy::new(cfg.n_cut, cfg.tol).map_err(core_config)?;
        let ensemble = WeightedEnsemble::new(family.measure()?, policy)
            .map_err(|e| CliError::Discrepancy(format!("oracle unavailable: {e}")))?;
        let oracle = ensemble.rho(&query);
        let discrepancy = (rho - oracle.value).norm();
        let bound = cfg.tol.max(3.0 * oracle.tail_estimate);
        if discrepancy > bound {
            failure = Some(CliError::Discrepancy(format!(
                "|pfaffian - oracle| = {discrepancy:e} exceeds {bound:e}"
            )));
        }
        columns.extend([
            Column::Complex("oracle"),
            Column::Plain("tail"),
            Column::Plain("discrepancy"),
            Column::Plain("bound"),
        ]);
        row.extend([
            oracle.value.into(),
            oracle.tail_estimate.into(),
            discrepancy.into(),
            bound.into(),
        ]);
    }
    let mut table = Table::new(columns);
    table.push(row);
    table.write(cfg.metadata("correlate"), cfg.format, cfg.output.as_deref())?;
    failure.map_or(Ok(()), Err)
}

const VERIFY_QUERIES: [&[i64]; 6] = [&[], &[1], &[0, 1], &[-4, -2], &[-3, 0, 2], &[-6, -4, -1]];

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let families = match &cfg.family {
        Some(f) => vec![f.clone()],
        None => vec![
            Family::Z {
                z: Complex64::new(2.5, 0.0),
                xi: 0.2,
            },
            Family::Plancherel { eta: 0.8 },
        ],
    };
    let identities = identity_suite(&SuiteParams::default());
    let mut passed = identities.passed;
    let mut comparisons = Vec::new();
    for family in &families {
        let route = cfg.route_for(family);
        let kernel = build_kernel(cfg, family, route)?;
        let policy = TruncationPolicy::new(cfg.n_cut, cfg.tol).map_err(core_config)?;
        let ensemble = WeightedEnsemble::new(family.measure()?, policy);
        for points in VERIFY_QUERIES {
            let query = CorrelationQuery::new(points.to_vec()).map_err(core_config)?;
            let mut record = serde_json::Map::new();
            record.insert("family".into(), json!(family.name()));
            record.insert("route".into(), json!(route.as_str()));
            record.insert("points".into(), json!(query.points()));
            let outcome = correlation_pfaffian(&kernel, &query)
                .map_err(|e| e.to_string())
                .and_then(|rho| {
                    let ens = ensemble.as_ref().map_err(|e| e.to_string())?;
                    Ok((rho, ens.rho(&query)))
                });
            let ok = match outcome {
                Ok((rho, oracle)) => {
                    let discrepancy = (rho - oracle.value).norm();
                    let bound = cfg.tol.max(3.0 * oracle.tail_estimate);
                    record.insert("pfaffian".into(), complex_json(rho));
                    record.insert("oracle".into(), complex_json(oracle.value));
                    record.insert("tail".into(), json!(oracle.tail_estimate));
                    record.insert("discrepancy".into(), json!(discrepancy));
                    record.insert("bound".into(), json!(bound));
                    discrepancy <= bound
                }
                Err(message) => {
                    record.insert("error".into(), json!(message));
                    false
                }
            };
            record.insert("passed".into(), json!(ok));
            passed &= ok;
            comparisons.push(Value::Object(record));
        }
    }
    let report = json!({
        "metadata": cfg.metadata("verify"),
        "identities": identities,
        "records": comparisons,
        "passed": passed,
    });
    match cfg.output.as_deref() {
        Some(path) => write_json(std::io::BufWriter::new(std::fs::File::create(path)?), &report)?,
        None => write_json(std::io::stdout().lock(), &report)?,
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Discrepancy("verification failed; see the report".into()))
    }
}
