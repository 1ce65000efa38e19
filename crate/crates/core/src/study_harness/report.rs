use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::StudyKind;
use super::svg::{LogLogChart, Series};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "omega,Q0,h,eta,max_error,rel_error,analytic_pred";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub omega: f64,
    pub q0: f64,
    pub h: f64,
    pub eta: f64,
    pub max_error: f64,
    pub rel_error: f64,
    pub analytic_pred: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub residual: f64,
}

/// Measured errors of one study with its fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub study: StudyKind,
    pub rows: Vec<ReportRow>,
    pub fit: Option<SlopeFit>,
    /// Scalar side results, e.g. successive error ratios.
    pub extras: BTreeMap<String, f64>,
}

/// Least-squares line through `points`, in log-log coordinates when asked.
/// Returns the slope and the largest absolute residual.
pub fn fit_slope(points: &[(f64, f64)], log_log: bool) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    let increasing = points.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = points.windows(2).all(|w| w[1].0 < w[0].0);
    if !(increasing || decreasing) {
        return Err(Error::Fit("abscissas must be strictly monotone".into()));
    }
    let mapped: Vec<(f64, f64)> = if log_log {
        if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
            return Err(Error::Fit(format!(
                "non-positive value ({}, {}) under logarithm",
                p.0, p.1
            )));
        }
        points.iter().map(|(x, y)| (x.ln(), y.ln())).collect()
    } else {
        points.to_vec()
    };
    let n = mapped.len() as f64;
    let mx = mapped.iter().map(|p| p.0).sum::<f64>() / n;
    let my = mapped.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = mapped.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = mapped.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = mapped
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit { slope, residual })
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

impl ErrorReport {
    pub fn new(study: StudyKind) -> Self {
        ErrorReport {
            study,
            rows: Vec::new(),
            fit: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let pred = r.analytic_pred.map(num).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(r.omega),
                num(r.q0),
                num(r.h),
                num(r.eta),
                num(r.max_error),
                num(r.rel_error),
                pred
            );
        }
        out
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            study: StudyKind,
            points: usize,
            slope: Option<f64>,
            residual: Option<f64>,
            extras: &'a BTreeMap<String, f64>,
        }
        let s = Summary {
            study: self.study,
            points: self.rows.len(),
            slope: self.fit.map(|f| f.slope),
            residual: self.fit.map(|f| f.residual),
            extras: &self.extras,
        };
        serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
    }

    pub fn chart(&self) -> LogLogChart {
        let (title, x_label, xs): (&str, &str, Vec<f64>) = match self.study {
            StudyKind::Q0Sweep => ("Relative error vs Q0", "Q0", self.rows.iter().map(|r| r.q0).collect()),
            StudyKind::Discretize => (
                "Discretization error vs h",
                "h",
                self.rows.iter().map(|r| r.h).collect(),
            ),
            _ => (
                "Maximum error vs omega",
                "omega",
                self.rows.iter().map(|r| r.omega).collect(),
            ),
        };
        let measured: Vec<f64> = match self.study {
            StudyKind::Q0Sweep => self.rows.iter().map(|r| r.rel_error).collect(),
            _ => self.rows.iter().map(|r| r.max_error).collect(),
        };
        let mut series = vec![Series {
            label: "measured".into(),
            points: xs.iter().copied().zip(measured).collect(),
        }];
        if self.rows.iter().all(|r| r.analytic_pred.is_some()) && !self.rows.is_empty() {
            series.push(Series {
                label: "leading-order prediction".into(),
                points: xs
                    .iter()
                    .copied()
                    .zip(self.rows.iter().map(|r| r.analytic_pred.unwrap_or(0.0)))
                    .collect(),
            });
        }
        LogLogChart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: "error".into(),
            series,
        }
    }

    /// Writes `<name>.csv`, `<name>.json` and optionally `<name>.svg`.
    pub fn write(&self, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
        let name = self.study.name();
        let mut written = vec![
            write_file(dir, &format!("{name}.csv"), &self.to_csv())?,
            write_file(dir, &format!("{name}.json"), &self.summary_json())?,
        ];
        if svg {
            written.push(write_file(dir, &format!("{name}.svg"), &self.chart().render())?);
        }
        Ok(written)
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
