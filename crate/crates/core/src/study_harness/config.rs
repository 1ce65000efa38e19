use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::{Domain, Medium, MediumKind};
use crate::superposition::SourceCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    ConvergeOmega,
    Discretize,
    Q0Sweep,
    FieldDump,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::ConvergeOmega => "converge_omega",
            StudyKind::Discretize => "discretize",
            StudyKind::Q0Sweep => "q0_sweep",
            StudyKind::FieldDump => "field_dump",
        }
    }
}

/// Horizontal receiver lines for a 2D field map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

fn default_medium() -> MediumKind<f64> {
    MediumKind::Constant { c0: 1.0 }
}
fn default_source() -> SourceCurve<f64> {
    SourceCurve::Flat
}
fn default_omegas() -> Vec<f64> {
    vec![100.0, 200.0, 400.0, 800.0]
}
fn default_q0() -> Vec<f64> {
    vec![1.0]
}
fn default_h_fraction() -> f64 {
    0.5
}
fn default_h_fractions() -> Vec<f64> {
    vec![0.5, 0.25, 0.125, 0.0625]
}
fn default_refine() -> usize {
    32
}
fn default_y_star() -> f64 {
    2.0
}
fn default_window() -> (f64, f64) {
    (-2.0, 2.0)
}
fn default_receivers() -> usize {
    400
}
fn default_alpha() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_fan_spacing() -> f64 {
    0.005
}
fn default_beam_angle() -> f64 {
    45.0
}
fn default_exact_nodes() -> usize {
    16_000
}
fn default_true() -> bool {
    true
}

/// Study description read from a JSON file. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Checked against the subcommand when present.
    #[serde(default)]
    pub study: Option<StudyKind>,
    #[serde(default = "default_medium")]
    pub medium: MediumKind<f64>,
    /// Defaults to a box around the source interval and receiver line.
    #[serde(default)]
    pub domain: Option<Domain<f64>>,
    #[serde(default = "default_source")]
    pub source: SourceCurve<f64>,
    #[serde(default = "default_omegas")]
    pub omegas: Vec<f64>,
    #[serde(default = "default_q0")]
    pub q0: Vec<f64>,
    /// Beam spacing as a fraction of the initial width.
    #[serde(default = "default_h_fraction")]
    pub h_fraction: f64,
    /// Spacing sweep of the discretization study.
    #[serde(default = "default_h_fractions")]
    pub h_fractions: Vec<f64>,
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default = "default_y_star")]
    pub y_star: f64,
    #[serde(default = "default_window")]
    pub receiver_window: (f64, f64),
    #[serde(default = "default_receivers")]
    pub receivers: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub s_range: Option<(f64, f64)>,
    #[serde(default = "default_fan_spacing")]
    pub fan_spacing: f64,
    /// Replace the superposition by one isolated beam.
    #[serde(default)]
    pub single_beam: bool,
    #[serde(default = "default_beam_angle")]
    pub beam_angle_deg: f64,
    /// Quadrature nodes of the exact single-beam reference.
    #[serde(default = "default_exact_nodes")]
    pub exact_nodes: usize,
    #[serde(default)]
    pub map_y: Option<MapGrid>,
    #[serde(default = "default_true")]
    pub svg: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl StudyConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self, kind: StudyKind) -> Result<()> {
        if let Some(k) = self.study {
            if k != kind {
                return Err(Error::Config(format!(
                    "config is for study '{}' but '{}' was requested",
                    k.name(),
                    kind.name()
                )));
            }
        }
        if self.omegas.is_empty() || self.omegas.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("omegas must be positive and non-empty".into()));
        }
        if self.q0.is_empty() || self.q0.iter().any(|q| !(*q > 0.0)) {
            return Err(Error::Config("q0 must be positive and non-empty".into()));
        }
        if !(self.h_fraction > 0.0 && self.h_fraction < 1.0) {
            return Err(Error::SpacingTooLarge {
                h: self.h_fraction,
                eta0: 1.0,
            });
        }
        if let Some(&f) = self.h_fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(Error::SpacingTooLarge { h: f, eta0: 1.0 });
        }
        if !(self.receiver_window.0 < self.receiver_window.1) || self.receivers < 2 {
            return Err(Error::Config(
                "receiver window must be non-empty with at least 2 receivers".into(),
            ));
        }
        if !(self.alpha > 0.0) || !(self.dt > 0.0) || !(self.fan_spacing > 0.0) {
            return Err(Error::Config("alpha, dt and fan_spacing must be positive".into()));
        }
        if self.refine == 0 {
            return Err(Error::Config("refine must be at least 1".into()));
        }
        match kind {
            StudyKind::ConvergeOmega => {
                if self.omegas.len() < 4 {
                    return Err(Error::Config("convergence study needs at least 4 frequencies".into()));
                }
                if self.omegas.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Config("omegas must be strictly increasing".into()));
                }
            }
            StudyKind::Q0Sweep if self.q0.windows(2).any(|w| !(w[1] > w[0])) => {
                return Err(Error::Config("q0 must be strictly increasing".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Default source interval: receiver window padded by the cutoff radius
    /// or six beam widths, plus one unit for ray bending.
    pub fn source_range(&self, omega: f64, q0: f64) -> (f64, f64) {
        if let Some(r) = self.s_range {
            return r;
        }
        let eta = crate::superposition::constant_medium_width(omega, q0, self.y_star);
        let pad = self.alpha.max(6.0 * eta) + 1.0;
        let (lo, hi) = (self.receiver_window.0 - pad, self.receiver_window.1 + pad);
        match self.source {
            SourceCurve::Circle => (lo.max(-0.98), hi.min(0.98)),
            _ => (lo, hi),
        }
    }

    pub fn medium(&self, s_range: (f64, f64)) -> Result<Medium<f64>> {
        let domain = self.domain.unwrap_or_else(|| {
            let top = self.map_y.map_or(self.y_star, |m| m.to.max(self.y_star));
            let reach = top + 1.5;
            let (lo, hi) = match self.source {
                // rays from the circle fan out radially from (0, -1)
                SourceCurve::Circle => (-reach * 8.0, reach * 8.0),
                _ => (s_range.0 - 3.0, s_range.1 + 3.0),
            };
            Domain {
                x: (
                    lo.min(self.receiver_window.0 - 3.0),
                    hi.max(self.receiver_window.1 + 3.0),
                ),
                y: (-1.5, reach),
            }
        });
        Medium::new(self.medium, domain)
    }
}
