//! Run reports and their aggregation into per-subclass tables.
//!
//! A run CSV has one row per `(instance, variant, seed)` with the columns of
//! [`RunReport`] in declaration order and a mandatory header. Aggregation
//! averages runs per instance first and then instances per subclass
//! (`kind`, `size`, `variant`), matching "10 runs per instance, 10 instances
//! per subclass" reporting. Rows are sorted before summation so the result
//! does not depend on input order.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristic::{RunOutput, Variant};
use crate::metrics::{hv_percent, hypervolume_with_reference, normalized_hv, ReferenceFront};
use crate::model::{Point, Problem, ProblemKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub kind: String,
    /// Items for knapsack, tasks for assignment, variables otherwise.
    pub size: usize,
    pub variant: String,
    pub seed: u64,
    /// Number of nondominated solutions returned.
    pub y_count: usize,
    pub time_sec: f64,
    pub lb_time_sec: f64,
    pub lp_count: usize,
    pub lb_size: usize,
    pub ir_initial: usize,
    pub pr_iterations: usize,
    /// Normalized hypervolume against the reference front.
    pub hv: Option<f64>,
    pub hv_percent: Option<f64>,
    /// Hypervolume against a user-supplied reference point, unnormalized.
    pub hv_raw: Option<f64>,
    pub front_file: Option<String>,
}

pub fn problem_size(problem: &Problem) -> usize {
    match problem.kind() {
        ProblemKind::Assignment { tasks } => tasks,
        _ => problem.n(),
    }
}

/// Raw hypervolume of minimization-form points against `reference`; points
/// are clamped to the reference box first.
pub fn raw_hypervolume(points: &[Point], reference: &Point) -> Result<f64> {
    let r = [
        reference[0] as f64,
        reference[1] as f64,
        reference[2] as f64,
    ];
    let clamped: Vec<[f64; 3]> = points
        .iter()
        .map(|p| {
            [
                (p[0] as f64).min(r[0]),
                (p[1] as f64).min(r[1]),
                (p[2] as f64).min(r[2]),
            ]
        })
        .collect();
    hypervolume_with_reference(&clamped, &r)
}

/// Normalized HV and HV% of `points`. A degenerate reference front leaves
/// both blank with a warning instead of failing.
pub fn reference_hv(
    points: &[Point],
    reference: &ReferenceFront,
    instance: &str,
) -> Result<(Option<f64>, Option<f64>)> {
    let hv =
        normalized_hv(points, reference).and_then(|hv| Ok((hv, hv_percent(points, reference)?)));
    match hv {
        Ok((hv, pct)) => Ok((Some(hv), Some(pct))),
        Err(e @ (Error::DegenerateReference(_) | Error::ZeroReferenceVolume)) => {
            log::warn!("{instance}: {e}; HV left blank");
            Ok((None, None))
        }
        Err(e) => Err(e),
    }
}

impl RunReport {
    /// Builds a report row. `reference_point` is in minimization form.
    pub fn from_run(
        instance: &str,
        problem: &Problem,
        output: &RunOutput,
        reference: Option<&ReferenceFront>,
        reference_point: Option<&Point>,
    ) -> Result<Self> {
        let points: Vec<Point> = output.front.iter().map(|s| s.y).collect();
        let (hv, hv_pct) = match reference {
            Some(r) => reference_hv(&points, r, instance)?,
            None => (None, None),
        };
        let hv_raw = reference_point
            .map(|r| raw_hypervolume(&points, r))
            .transpose()?;
        let stats = &output.stats;
        Ok(RunReport {
            instance: instance.to_string(),
            kind: problem.kind().name().to_string(),
            size: problem_size(problem),
            variant: stats.variant.to_string(),
            seed: stats.seed,
            y_count: stats.front_size,
            time_sec: stats.wall_time,
            lb_time_sec: stats.lb_time,
            lp_count: stats.lp_count,
            lb_size: stats.lb_size,
            ir_initial: stats.ir_initial,
            pr_iterations: stats.pr_iterations,
            hv,
            hv_percent: hv_pct,
            hv_raw,
            front_file: None,
        })
    }
}

/// Appends rows to a run CSV, writing the header when the file is new or
/// empty.
pub fn append_reports(path: impl AsRef<Path>, reports: &[RunReport]) -> Result<()> {
    let path = path.as_ref();
    let empty = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(empty)
        .from_writer(file);
    for r in reports {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_reports(path: impl AsRef<Path>) -> Result<Vec<RunReport>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub kind: String,
    pub size: usize,
    pub variant: String,
    pub instances: usize,
    pub runs: usize,
    pub y_count: f64,
    pub time_sec: f64,
    pub lp_count: f64,
    pub hv: Option<f64>,
    pub hv_percent: Option<f64>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean over instances of per-instance means; `None` if any value is missing.
fn nested_mean(groups: &[Vec<Option<f64>>]) -> Option<f64> {
    let per_instance: Option<Vec<f64>> = groups
        .iter()
        .map(|runs| {
            runs.iter()
                .copied()
                .collect::<Option<Vec<f64>>>()
                .map(|v| mean(&v))
        })
        .collect();
    per_instance.map(|v| mean(&v))
}

fn variant_order(name: &str) -> usize {
    name.parse::<Variant>()
        .ok()
        .and_then(|v| Variant::ALL.iter().position(|&w| w == v))
        .unwrap_or(Variant::ALL.len())
}

pub fn aggregate(reports: &[RunReport]) -> Vec<AggregateRow> {
    type GroupKey = (String, usize, usize, String);
    let mut groups: BTreeMap<GroupKey, BTreeMap<String, Vec<&RunReport>>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((
                r.kind.clone(),
                r.size,
                variant_order(&r.variant),
                r.variant.clone(),
            ))
            .or_default()
            .entry(r.instance.clone())
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((kind, size, _, variant), instances)| {
            let mut runs_by_instance: Vec<Vec<&RunReport>> = instances.into_values().collect();
            for runs in runs_by_instance.iter_mut() {
                runs.sort_by(|a, b| {
                    a.seed.cmp(&b.seed).then(
                        a.time_sec
                            .partial_cmp(&b.time_sec)
                            .unwrap_or(std::cmp::Ordering::Equal),
                    )
                });
            }
            let field = |f: &dyn Fn(&RunReport) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
                runs_by_instance
                    .iter()
                    .map(|runs| runs.iter().map(|r| f(r)).collect())
                    .collect()
            };
            let required = |f: &dyn Fn(&RunReport) -> f64| {
                nested_mean(&field(&|r| Some(f(r)))).expect("always present")
            };
            AggregateRow {
                kind,
                size,
                variant,
                instances: runs_by_instance.len(),
                runs: runs_by_instance.iter().map(Vec::len).sum(),
                y_count: required(&|r| r.y_count as f64),
                time_sec: required(&|r| r.time_sec),
                lp_count: required(&|r| r.lp_count as f64),
                hv: nested_mean(&field(&|r| r.hv)),
                hv_percent: nested_mean(&field(&|r| r.hv_percent)),
            }
        })
        .collect()
}

pub fn write_aggregate_long<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// One row per subclass with `<variant>_<metric>` columns, like the result
/// tables of the experiments.
pub fn write_aggregate_wide<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut variants: Vec<&str> = rows.iter().map(|r| r.variant.as_str()).collect();
    variants.sort_by_key(|v| (variant_order(v), v.to_string()));
    variants.dedup();

    let mut header = vec!["kind".to_string(), "size".to_string()];
    for v in &variants {
        for metric in ["y", "time", "hv", "hv_percent"] {
            header.push(format!("{v}_{metric}"));
        }
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&header)?;

    let mut subclasses: BTreeMap<(String, usize), Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows {
        subclasses
            .entry((r.kind.clone(), r.size))
            .or_default()
            .push(r);
    }
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for ((kind, size), members) in subclasses {
        let mut record = vec![kind, size.to_string()];
        for v in &variants {
            match members.iter().find(|r| r.variant == *v) {
                Some(r) => {
                    record.push(r.y_count.to_string());
                    record.push(r.time_sec.to_string());
                    record.push(fmt(r.hv));
                    record.push(fmt(r.hv_percent));
                }
                None => record.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
