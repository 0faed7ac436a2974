//! CSV tables and the JSON run manifest.
//!
//! Every CSV starts with one `#` provenance line naming the seed, the
//! realization count and the manifest, followed by the header row. Floats are
//! written with 17 significant digits so they parse back to the same double.
//! Files are written to a temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::lattice::Lattice;
use crate::localization::{LinearFit, LocalizationReport, TailFit};
use crate::observables::{ObservableSeries, ProbabilityDistributions};
use crate::sweep::{SweepResult, WalkConfig};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SERIES_FILE: &str = "series.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const LOCALIZATION_FILE: &str = "localization.csv";
pub const ENSEMBLE_DIST_FILE: &str = "ensemble_dist.csv";
pub const ENSEMBLE_VARIANCE_FILE: &str = "ensemble_variance.csv";

pub const SERIES_HEADER: &str = "t,ES,overlap,pop_plus,pop_minus,variance";
pub const DIST_HEADER: &str = "x,P_plus,P_minus,P_total";
pub const SWEEP_HEADER: &str = "theta,es_mean,es_std,ov_mean,ov_std,flagged";
pub const LOCALIZATION_HEADER: &str = "scope,realization,exponent,exponent_r2,folded_exponent,\
final_variance,exp_slope,exp_r2,loc_length,gauss_slope,gauss_r2,tail_points";
pub const ENSEMBLE_VARIANCE_HEADER: &str = "t,variance,folded_variance";

pub fn dist_file_name(step: usize) -> String {
    format!("dist_t{step}.csv")
}

/// 17 significant digits: lossless for every finite double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Provenance echoed as the first line of every CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    pub realizations: usize,
}

impl Provenance {
    fn line(&self) -> String {
        format!(
            "# qwalk {} seed={} realizations={} manifest={MANIFEST_FILE}",
            env!("CARGO_PKG_VERSION"),
            self.seed,
            self.realizations
        )
    }
}

/// Builds a CSV document row by row.
struct Table {
    text: String,
}

impl Table {
    fn new(prov: Provenance, header: &str) -> Self {
        let mut text = prov.line();
        text.push('\n');
        text.push_str(header);
        text.push('\n');
        Self { text }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

pub fn series_csv(series: &ObservableSeries, prov: Provenance) -> String {
    let mut t = Table::new(prov, SERIES_HEADER);
    for r in &series.records {
        t.row(&[
            r.t.to_string(),
            fmt_f64(r.entropy),
            fmt_f64(r.overlap),
            fmt_f64(r.pop_plus),
            fmt_f64(r.pop_minus),
            fmt_f64(r.variance),
        ]);
    }
    t.text
}

pub fn distribution_csv(dist: &ProbabilityDistributions, prov: Provenance) -> String {
    let mut t = Table::new(prov, DIST_HEADER);
    let lat: Lattice = dist.lattice;
    for i in 0..lat.site_count() {
        let (p, m) = (dist.plus[i], dist.minus[i]);
        t.row(&[lat.coordinate(i).to_string(), fmt_f64(p), fmt_f64(m), fmt_f64(p + m)]);
    }
    t.text
}

pub fn sweep_csv(result: &SweepResult, prov: Provenance) -> String {
    let mut t = Table::new(prov, SWEEP_HEADER);
    for p in &result.points {
        t.row(&[
            fmt_f64(p.theta),
            fmt_f64(p.es_mean),
            fmt_f64(p.es_std),
            fmt_f64(p.ov_mean),
            fmt_f64(p.ov_std),
            p.flagged.to_string(),
        ]);
    }
    t.text
}

fn fit_cells(
    exponent: Option<&LinearFit>,
    folded: Option<&LinearFit>,
    final_variance: f64,
    tails: Option<&TailFit>,
) -> Vec<String> {
    let nan = || fmt_f64(f64::NAN);
    let mut cells = vec![
        exponent.map_or_else(nan, |f| fmt_f64(f.slope)),
        exponent.map_or_else(nan, |f| fmt_f64(f.r_squared)),
        folded.map_or_else(nan, |f| fmt_f64(f.slope)),
        fmt_f64(final_variance),
    ];
    match tails {
        Some(tf) => cells.extend([
            fmt_f64(tf.exponential.slope),
            fmt_f64(tf.exponential.r_squared),
            fmt_f64(tf.localization_length()),
            fmt_f64(tf.gaussian.slope),
            fmt_f64(tf.gaussian.r_squared),
            tf.exponential.points.to_string(),
        ]),
        None => cells.extend([nan(), nan(), nan(), nan(), nan(), "0".into()]),
    }
    cells
}

/// One `ensemble` row, then one `realization` row per walk.
pub fn localization_csv(report: &LocalizationReport, prov: Provenance) -> String {
    let mut t = Table::new(prov, LOCALIZATION_HEADER);
    let mut row = vec!["ensemble".to_string(), String::new()];
    row.extend(fit_cells(
        Some(&report.exponent),
        Some(&report.folded_exponent),
        *report.mean_variance.last().unwrap_or(&f64::NAN),
        Some(&report.tails),
    ));
    t.row(&row);
    for d in &report.per_realization {
        let mut row = vec!["realization".to_string(), d.realization.to_string()];
        row.extend(fit_cells(
            d.exponent.as_ref(),
            d.folded_exponent.as_ref(),
            d.final_variance,
            d.tails.as_ref(),
        ));
        t.row(&row);
    }
    t.text
}

pub fn ensemble_variance_csv(report: &LocalizationReport, prov: Provenance) -> String {
    let mut t = Table::new(prov, ENSEMBLE_VARIANCE_HEADER);
    for (i, (v, f)) in report
        .mean_variance
        .iter()
        .zip(&report.mean_folded_variance)
        .enumerate()
    {
        t.row(&[i.to_string(), fmt_f64(*v), fmt_f64(*f)]);
    }
    t.text
}

/// Lines of a CSV document that are not `#` comments.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .fold(String::new(), |mut acc, l| {
            let _ = writeln!(acc, "{l}");
            acc
        })
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What was run, with every default filled in. Angles are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunSpec {
    Walk {
        config: WalkConfig,
    },
    Sweep {
        config: WalkConfig,
        grid: Vec<f64>,
        realizations: usize,
    },
    Localization {
        config: WalkConfig,
        realizations: usize,
    },
}

impl RunSpec {
    pub fn config(&self) -> &WalkConfig {
        match self {
            RunSpec::Walk { config } | RunSpec::Sweep { config, .. } | RunSpec::Localization { config, .. } => config,
        }
    }

    pub fn realizations(&self) -> usize {
        match self {
            RunSpec::Walk { .. } => 1,
            RunSpec::Sweep { realizations, .. } | RunSpec::Localization { realizations, .. } => *realizations,
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            seed: self.config().seed.master,
            realizations: self.realizations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub run: RunSpec,
    pub master_seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// File name to SHA-256 of its full contents.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(run: RunSpec) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: run.config().seed.master,
            run,
            timestamp,
            outputs: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Collects output documents for one run and writes them with a manifest.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    /// Writes every file, then `manifest.json` listing their digests.
    pub fn write(self, run: RunSpec) -> io::Result<RunManifest> {
        fs::create_dir_all(&self.dir)?;
        let mut manifest = RunManifest::new(run);
        for (name, contents) in &self.files {
            write_atomic(&self.dir.join(name), contents.as_bytes())?;
            manifest.outputs.insert(name.clone(), sha256_hex(contents.as_bytes()));
        }
        write_atomic(&self.dir.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
        Ok(manifest)
    }
}
