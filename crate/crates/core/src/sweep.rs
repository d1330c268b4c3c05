//! Noise-threshold search and the reference table drivers.
//!
//! A threshold search scans an evenly spaced grid over `p ∈ [0, 1]`, counts
//! how often the verdict flips, and only when there is a single
//! undetected-to-detected flip bisects that grid interval down to the
//! requested tolerance.

use std::io::Write;

use serde::Serialize;

use crate::criteria::{
    self, corollary_preset, Corollary, CriterionId, CriterionParams, CriterionResult, Cut,
    EvalOptions,
};
use crate::error::Result;
use crate::exec::{self, Execution};
use crate::qmat::DensityMatrix;
use crate::realign::PairMapKind;
use crate::states::NoiseFamily;

pub const DEFAULT_GRID_POINTS: usize = 201;
pub const DEFAULT_BISECT_TOL: f64 = 1e-7;

/// A configured detector.
#[derive(Clone, Debug, PartialEq)]
pub enum Detector {
    Ccnr {
        cut: Cut,
    },
    Zr {
        cut: Cut,
    },
    Ppt {
        cut: Cut,
    },
    Theorem21 {
        cut: Cut,
        params: CriterionParams,
    },
    Hr {
        pair: (usize, usize),
    },
    Theorem31 {
        pair: (usize, usize),
        params: CriterionParams,
    },
}

impl Detector {
    pub fn id(&self) -> CriterionId {
        match self {
            Detector::Ccnr { .. } => CriterionId::Ccnr,
            Detector::Zr { .. } => CriterionId::Zr,
            Detector::Ppt { .. } => CriterionId::Ppt,
            Detector::Theorem21 { .. } => CriterionId::Theorem21,
            Detector::Hr { .. } => CriterionId::Hr,
            Detector::Theorem31 { .. } => CriterionId::Theorem31,
        }
    }

    pub fn params(&self) -> Option<&CriterionParams> {
        match self {
            Detector::Theorem21 { params, .. } | Detector::Theorem31 { params, .. } => Some(params),
            _ => None,
        }
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        match self {
            Detector::Hr { pair } | Detector::Theorem31 { pair, .. } => Some(*pair),
            _ => None,
        }
    }

    pub fn cut(&self) -> Option<Cut> {
        match self {
            Detector::Ccnr { cut }
            | Detector::Zr { cut }
            | Detector::Ppt { cut }
            | Detector::Theorem21 { cut, .. } => Some(*cut),
            _ => None,
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<CriterionResult> {
        self.evaluate_with(rho, &EvalOptions::default())
    }

    pub fn evaluate_with(
        &self,
        rho: &DensityMatrix,
        opts: &EvalOptions,
    ) -> Result<CriterionResult> {
        match self {
            Detector::Ccnr { cut } => criteria::ccnr_with(rho, *cut, opts),
            Detector::Zr { cut } => criteria::zr_with(rho, *cut, opts),
            Detector::Ppt { cut } => criteria::ppt_with(rho, *cut, opts),
            Detector::Theorem21 { cut, params } => {
                criteria::theorem21_with(rho, *cut, params, opts)
            }
            Detector::Hr { pair } => {
                criteria::multipartite_eval_with(rho, *pair, &PairMapKind::Realign, opts)
            }
            Detector::Theorem31 { pair, params } => criteria::multipartite_eval_with(
                rho,
                *pair,
                &PairMapKind::Augmented(params.clone()),
                opts,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub grid_points: usize,
    pub bisect_tol: f64,
    pub execution: Execution,
    pub eval: EvalOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid_points: DEFAULT_GRID_POINTS,
            bisect_tol: DEFAULT_BISECT_TOL,
            execution: Execution::default(),
            eval: EvalOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSample {
    pub p: f64,
    pub margin: f64,
    pub detected: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    /// One undetected-to-detected flip; `p_star` is set.
    Threshold,
    /// Not detected anywhere on the grid.
    NoneDetected,
    /// Detected on the whole grid, including `p = 0`.
    DetectedEverywhere,
    /// The verdict flips more than once, or only from detected to undetected.
    Irregular,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub family: String,
    pub criterion: CriterionId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<CriterionParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<usize>,
    pub status: ThresholdStatus,
    pub p_star: Option<f64>,
    pub bisect_tol: f64,
    pub transitions: usize,
    pub grid: Vec<GridSample>,
}

impl ThresholdReport {
    /// One CSV record in the table column order.
    pub fn csv_record(&self) -> [String; 8] {
        [
            self.family.clone(),
            self.criterion.to_string(),
            fmt_opt(self.params.as_ref().map(|p| p.alpha())),
            self.params
                .as_ref()
                .map(|p| p.ell().to_string())
                .unwrap_or_default(),
            self.pair.map(pair_label).unwrap_or_default(),
            self.p_star_label(),
            String::new(),
            String::new(),
        ]
    }

    pub fn p_star_label(&self) -> String {
        match (self.status, self.p_star) {
            (_, Some(p)) => format!("{p:.6}"),
            (ThresholdStatus::NoneDetected, None) => "none".into(),
            (ThresholdStatus::DetectedEverywhere, None) => "all".into(),
            _ => "irregular".into(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        out.write_record(self.csv_record())?;
        out.flush()?;
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "family",
    "criterion",
    "alpha",
    "ell",
    "pair",
    "p_star",
    "published",
    "delta",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// `(1, 2)` is written `B,C`.
pub fn pair_label((a, b): (usize, usize)) -> String {
    let name = |i: usize| {
        if i < 26 {
            ((b'A' + i as u8) as char).to_string()
        } else {
            i.to_string()
        }
    };
    format!("{},{}", name(a), name(b))
}

pub fn find_threshold(
    family: &NoiseFamily,
    detector: &Detector,
    bisect_tol: f64,
) -> Result<ThresholdReport> {
    let opts = SweepOptions {
        bisect_tol,
        ..SweepOptions::default()
    };
    find_threshold_with(family, detector, &opts)
}

pub fn find_threshold_with(
    family: &NoiseFamily,
    detector: &Detector,
    opts: &SweepOptions,
) -> Result<ThresholdReport> {
    let n = opts.grid_points.max(2);
    let eval =
        |p: f64| -> Result<CriterionResult> { detector.evaluate_with(&family.at(p)?, &opts.eval) };
    let grid = exec::map_range(opts.execution, n, |i| {
        let p = i as f64 / (n - 1) as f64;
        eval(p).map(|r| GridSample {
            p,
            margin: r.margin,
            detected: r.detected,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let flips: Vec<usize> = (0..n - 1)
        .filter(|&i| grid[i].detected != grid[i + 1].detected)
        .collect();
    let (status, p_star) = match flips.as_slice() {
        [] if grid[0].detected => (ThresholdStatus::DetectedEverywhere, None),
        [] => (ThresholdStatus::NoneDetected, None),
        [i] if grid[i + 1].detected => {
            let (mut lo, mut hi) = (grid[*i].p, grid[i + 1].p);
            while hi - lo > opts.bisect_tol {
                let mid = 0.5 * (lo + hi);
                if eval(mid)?.detected {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (ThresholdStatus::Threshold, Some(0.5 * (lo + hi)))
        }
        _ => (ThresholdStatus::Irregular, None),
    };

    Ok(ThresholdReport {
        family: family.label().to_string(),
        criterion: detector.id(),
        params: detector.params().cloned(),
        pair: detector.pair(),
        cut: detector.cut().map(|c| c.0),
        status,
        p_star,
        bisect_tol: opts.bisect_tol,
        transitions: flips.len(),
        grid,
    })
}

/// The reference tables that can be regenerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    /// Tiles state with white noise: CCNR, Z-R and two scaled-identity settings.
    Example21,
    /// Shifts state: augmented pair map on (B, C) over α × ℓ.
    Table1,
    /// Perturbed GHZ: H-R and augmented pair map over ε.
    Table2,
}

impl Table {
    /// Acceptance tolerance on `|computed - published|`.
    pub fn tolerance(self) -> f64 {
        match self {
            Table::Example21 | Table::Table2 => 5e-4,
            Table::Table1 => 1e-5,
        }
    }
}

impl std::str::FromStr for Table {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "example21" => Ok(Table::Example21),
            "table1" => Ok(Table::Table1),
            "table2" => Ok(Table::Table2),
            other => Err(format!(
                "unknown table {other:?} (expected table1, table2 or example21)"
            )),
        }
    }
}

/// A published threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Published {
    /// Detected for `value <= p <= 1`.
    Threshold(f64),
    /// Published as not detecting anything.
    NoneDetected,
}

impl Published {
    fn label(self) -> String {
        match self {
            Published::Threshold(v) => format!("{v}"),
            Published::NoneDetected => "--".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub family: String,
    pub criterion: String,
    pub alpha: Option<f64>,
    pub ell: Option<usize>,
    pub pair: Option<String>,
    /// `None` for external rows and for cells without a threshold.
    pub p_star: Option<f64>,
    pub status: Option<ThresholdStatus>,
    pub published: Published,
    pub delta: Option<f64>,
    /// Published value of a criterion this crate does not implement.
    pub external: bool,
    pub within_tolerance: Option<bool>,
}

impl TableRow {
    pub fn csv_record(&self) -> [String; 8] {
        let p_star = if self.external {
            "external".to_string()
        } else {
            match (self.p_star, self.status) {
                (Some(p), _) => format!("{p:.6}"),
                (None, Some(ThresholdStatus::NoneDetected)) => "none".into(),
                (None, Some(ThresholdStatus::DetectedEverywhere)) => "all".into(),
                _ => "irregular".into(),
            }
        };
        [
            self.family.clone(),
            self.criterion.clone(),
            fmt_opt(self.alpha),
            self.ell.map(|l| l.to_string()).unwrap_or_default(),
            self.pair.clone().unwrap_or_default(),
            p_star,
            self.published.label(),
            self.delta.map(|d| format!("{d:+.2e}")).unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: Table,
    pub tolerance: f64,
    pub bisect_tol: f64,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for row in &self.rows {
            out.write_record(row.csv_record())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rows that are computed here (not echoed from elsewhere).
    pub fn computed_rows(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.iter().filter(|r| !r.external)
    }
}

/// Reference Shifts thresholds on the (α, ℓ) grid, indexed `[alpha][ell]`.
pub const TABLE1_ALPHAS: [f64; 3] = [1.0, 10.0, 100.0];
pub const TABLE1_ELLS: [usize; 4] = [1, 10, 100, 500];
pub const TABLE1_PUBLISHED: [[f64; 4]; 3] = [
    [0.845476, 0.831017, 0.828701, 0.828483],
    [0.828701, 0.828455, 0.828430, 0.828428],
    [0.828430, 0.828428, 0.828428, 0.828427],
];

pub const TABLE2_EPSILONS: [f64; 5] = [0.0, 1e-5, 1e-3, 1e-1, 1.0];
pub const TABLE2_HR: [f64; 5] = [0.3344, 0.3344, 0.3344, 0.3340, 0.3899];
pub const TABLE2_THM31: [f64; 5] = [0.3334, 0.3334, 0.3334, 0.3339, 0.3849];
/// Multipartite correlation tensor criterion (not implemented here).
pub const TABLE2_MT: [f64; 5] = [0.4118, 0.4118, 0.4118, 0.4118, 0.4256];
/// Multipartite covariance matrix criterion (not implemented here).
pub const TABLE2_MC: [Published; 5] = [
    Published::NoneDetected,
    Published::Threshold(1.0),
    Published::Threshold(0.9981),
    Published::Threshold(0.8341),
    Published::Threshold(0.4286),
];

/// Published Tiles thresholds: CCNR, Z-R and the two scaled-identity settings.
pub const EXAMPLE21_CCNR: f64 = 0.8897;
pub const EXAMPLE21_ZR: f64 = 0.8822;
/// `(ℓ, α, published p*)`.
pub const EXAMPLE21_COR21: [(usize, f64, f64); 2] = [(12, 3.4640, 0.8822), (1, 11.6590, 0.8822)];

/// Subsystems B and C.
pub const PAIR_BC: (usize, usize) = (1, 2);

struct Cell {
    family: NoiseFamily,
    detector: Detector,
    published: Published,
}

fn cells(which: Table) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    match which {
        Table::Example21 => {
            let cut = Cut(1);
            out.push(Cell {
                family: NoiseFamily::tiles(),
                detector: Detector::Ccnr { cut },
                published: Published::Threshold(EXAMPLE21_CCNR),
            });
            out.push(Cell {
                family: NoiseFamily::tiles(),
                detector: Detector::Zr { cut },
                published: Published::Threshold(EXAMPLE21_ZR),
            });
            for (ell, alpha, p) in EXAMPLE21_COR21 {
                out.push(Cell {
                    family: NoiseFamily::tiles(),
                    detector: Detector::Theorem21 {
                        cut,
                        params: corollary_preset(Corollary::ScaledIdentity, alpha, ell)?,
                    },
                    published: Published::Threshold(p),
                });
            }
        }
        Table::Table1 => {
            for (ai, &alpha) in TABLE1_ALPHAS.iter().enumerate() {
                for (li, &ell) in TABLE1_ELLS.iter().enumerate() {
                    out.push(Cell {
                        family: NoiseFamily::shifts(),
                        detector: Detector::Theorem31 {
                            pair: PAIR_BC,
                            params: corollary_preset(Corollary::ScaledIdentity, alpha, ell)?,
                        },
                        published: Published::Threshold(TABLE1_PUBLISHED[ai][li]),
                    });
                }
            }
        }
        Table::Table2 => {
            for (i, &eps) in TABLE2_EPSILONS.iter().enumerate() {
                out.push(Cell {
                    family: NoiseFamily::ghz(eps)?,
                    detector: Detector::Hr { pair: PAIR_BC },
                    published: Published::Threshold(TABLE2_HR[i]),
                });
                out.push(Cell {
                    family: NoiseFamily::ghz(eps)?,
                    detector: Detector::Theorem31 {
                        pair: PAIR_BC,
                        params: corollary_preset(Corollary::ScaledIdentity, 10.0, 10)?,
                    },
                    published: Published::Threshold(TABLE2_THM31[i]),
                });
            }
        }
    }
    Ok(out)
}

fn external_rows() -> Vec<TableRow> {
    let mut rows = Vec::new();
    for (i, &eps) in TABLE2_EPSILONS.iter().enumerate() {
        for (name, published) in [
            ("M-T", Published::Threshold(TABLE2_MT[i])),
            ("M-C", TABLE2_MC[i]),
        ] {
            rows.push(TableRow {
                family: format!("ghz(eps={eps})"),
                criterion: name.to_string(),
                alpha: None,
                ell: None,
                pair: None,
                p_star: None,
                status: None,
                published,
                delta: None,
                external: true,
                within_tolerance: None,
            });
        }
    }
    rows
}

pub fn reproduce_table(which: Table) -> Result<TableReport> {
    reproduce_table_with(which, &SweepOptions::default())
}

pub fn reproduce_table_with(which: Table, opts: &SweepOptions) -> Result<TableReport> {
    let tolerance = which.tolerance();
    let cells = cells(which)?;
    let reports = exec::map_slice(opts.execution, &cells, |c| {
        find_threshold_with(&c.family, &c.detector, opts)
    });
    let mut rows = Vec::with_capacity(cells.len());
    for (cell, report) in cells.iter().zip(reports) {
        let report = report?;
        let delta = match (report.p_star, cell.published) {
            (Some(p), Published::Threshold(v)) => Some(p - v),
            _ => None,
        };
        let within = match cell.published {
            Published::Threshold(_) => Some(delta.is_some_and(|d| d.abs() <= tolerance)),
            Published::NoneDetected => Some(report.status == ThresholdStatus::NoneDetected),
        };
        rows.push(TableRow {
            family: report.family,
            criterion: report.criterion.to_string(),
            alpha: report.params.as_ref().map(|p| p.alpha()),
            ell: report.params.as_ref().map(|p| p.ell()),
            pair: report.pair.map(pair_label),
            p_star: report.p_star,
            status: Some(report.status),
            published: cell.published,
            delta,
            external: false,
            within_tolerance: within,
        });
    }
    if which == Table::Table2 {
        rows.extend(external_rows());
    }
    Ok(TableReport {
        table: which,
        tolerance,
        bisect_tol: opts.bisect_tol,
        rows,
    })
}
