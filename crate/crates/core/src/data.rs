//! Time-series ingestion, chronological partitioning, normalization and
//! look-back windowing.
//!
//! Windows never cross a partition boundary: a validation or test window takes
//! its history from inside its own partition.

use std::f64::consts::PI;
use std::ops::Range;
use std::path::Path;

use ndarray::{s, Array2, Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{ResnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Validation,
    Test,
}

/// Half-open row range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRange {
    pub start: usize,
    pub end: usize,
}

impl RowRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    fn as_range(&self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partitions {
    pub train: RowRange,
    pub validation: RowRange,
    pub test: RowRange,
}

impl Partitions {
    pub fn get(&self, p: Partition) -> RowRange {
        match p {
            Partition::Train => self.train,
            Partition::Validation => self.validation,
            Partition::Test => self.test,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.64,
            validation: 0.16,
            test: 0.20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    #[default]
    None,
    Zscore,
    Minmax,
}

/// Fitted per-column transform. `shift`/`scale` map raw `x` to `(x - shift) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mode: NormalizationMode,
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Normalization {
    fn identity(cols: usize) -> Self {
        Self {
            mode: NormalizationMode::None,
            shift: vec![0.0; cols],
            scale: vec![1.0; cols],
        }
    }
}

/// Parameters of `y(t) = A sin(2 pi f t + phi)` sampled on an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineSpec {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Samples per second.
    pub rate: f64,
}

impl Default for SineSpec {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
            t_start: 0.0,
            t_end: 100.0,
            rate: 10.0,
        }
    }
}

/// Which CSV columns feed the network and which it predicts. `None` selects
/// every column.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    #[serde(default)]
    pub inputs: Option<Vec<String>>,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

/// Look-back windows of one partition.
#[derive(Debug, Clone)]
pub struct WindowSet {
    /// `windows × look_back × input_dim`
    pub inputs: Array3<f64>,
    /// `windows × output_dim`
    pub targets: Array2<f64>,
    /// Row index (in the full series) of the first window's target.
    pub first_target_row: usize,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.targets.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn look_back(&self) -> usize {
        self.inputs.shape()[1]
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.shape()[2]
    }

    pub fn output_dim(&self) -> usize {
        self.targets.ncols()
    }

    /// Time-major gather: one `batch × input_dim` matrix per step.
    pub fn time_major(&self, rows: &[usize]) -> Vec<Array2<f64>> {
        (0..self.look_back())
            .map(|t| self.inputs.slice(s![.., t, ..]).select(Axis(0), rows))
            .collect()
    }

    pub fn targets_of(&self, rows: &[usize]) -> Array2<f64> {
        self.targets.select(Axis(0), rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub rows: usize,
    pub columns: Vec<String>,
    pub input_columns: Vec<String>,
    pub output_columns: Vec<String>,
    pub partitions: Option<Partitions>,
    pub normalization: Normalization,
}

/// A multivariate series with column roles, optional partitions and a
/// normalization fitted on the training rows.
#[derive(Debug, Clone)]
pub struct SeriesDataset {
    columns: Vec<String>,
    raw: Array2<f64>,
    values: Array2<f64>,
    input_cols: Vec<usize>,
    output_cols: Vec<usize>,
    normalization: Normalization,
    partitions: Option<Partitions>,
}

impl SeriesDataset {
    pub fn new(
        columns: Vec<String>,
        raw: Array2<f64>,
        input_cols: Vec<usize>,
        output_cols: Vec<usize>,
    ) -> Result<Self> {
        if columns.len() != raw.ncols() {
            return Err(ResnError::Shape(format!(
                "{} column names for {} columns",
                columns.len(),
                raw.ncols()
            )));
        }
        if raw.nrows() == 0 {
            return Err(ResnError::Empty("series has no rows".into()));
        }
        if input_cols.is_empty() || output_cols.is_empty() {
            return Err(ResnError::Data("need at least one input and one output column".into()));
        }
        if let Some(&c) = input_cols.iter().chain(&output_cols).find(|&&c| c >= raw.ncols()) {
            return Err(ResnError::Data(format!("column index {c} out of range")));
        }
        let cols = raw.ncols();
        Ok(Self {
            columns,
            values: raw.clone(),
            raw,
            input_cols,
            output_cols,
            normalization: Normalization::identity(cols),
            partitions: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.raw.nrows()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn input_dim(&self) -> usize {
        self.input_cols.len()
    }

    pub fn output_dim(&self) -> usize {
        self.output_cols.len()
    }

    /// Series as currently transformed (normalized if `normalize` ran).
    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn raw(&self) -> ArrayView2<'_, f64> {
        self.raw.view()
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn partitions(&self) -> Option<&Partitions> {
        self.partitions.as_ref()
    }

    fn require_partitions(&self) -> Result<&Partitions> {
        self.partitions
            .as_ref()
            .ok_or_else(|| ResnError::Data("dataset has not been split".into()))
    }

    /// Chronological split. Validation and test take `floor(n * fraction)`
    /// rows; the remainder goes to training. Every partition must hold at least
    /// `max_look_back + 1` rows so that any admissible window fits.
    pub fn split(mut self, fractions: SplitFractions, max_look_back: usize) -> Result<Self> {
        let SplitFractions { train, validation, test } = fractions;
        if [train, validation, test].iter().any(|f| !f.is_finite() || *f <= 0.0) {
            return Err(ResnError::Config(format!(
                "split fractions must all be positive, got ({train}, {validation}, {test})"
            )));
        }
        if (train + validation + test - 1.0).abs() > 1e-9 {
            return Err(ResnError::Config(format!(
                "split fractions sum to {}, expected 1",
                train + validation + test
            )));
        }
        let n = self.rows();
        let n_val = (n as f64 * validation + 1e-9).floor() as usize;
        let n_test = (n as f64 * test + 1e-9).floor() as usize;
        let n_train = n.saturating_sub(n_val + n_test);
        for (name, len) in [("train", n_train), ("validation", n_val), ("test", n_test)] {
            if len < max_look_back + 1 {
                return Err(ResnError::Data(format!(
                    "{name} partition has {len} rows, need at least {} for look-back {max_look_back}",
                    max_look_back + 1
                )));
            }
        }
        self.partitions = Some(Partitions {
            train: RowRange { start: 0, end: n_train },
            validation: RowRange { start: n_train, end: n_train + n_val },
            test: RowRange { start: n_train + n_val, end: n },
        });
        Ok(self)
    }

    /// Fits a per-column transform on the training rows and applies it to the
    /// whole series. Refitting always starts from the raw values.
    pub fn normalize(mut self, mode: NormalizationMode) -> Result<Self> {
        let train = self.require_partitions()?.train;
        let fit = self.raw.slice(s![train.as_range(), ..]);
        let cols = self.raw.ncols();
        let mut norm = Normalization::identity(cols);
        norm.mode = mode;
        for c in 0..cols {
            let col = fit.column(c);
            match mode {
                NormalizationMode::None => {}
                NormalizationMode::Zscore => {
                    let n = col.len() as f64;
                    let mean = col.sum() / n;
                    let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                    let sd = var.sqrt();
                    if !(sd > 0.0) {
                        return Err(ResnError::Data(format!(
                            "column `{}` has zero variance on the training partition",
                            self.columns[c]
                        )));
                    }
                    norm.shift[c] = mean;
                    norm.scale[c] = sd;
                }
                NormalizationMode::Minmax => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if !(hi > lo) {
                        return Err(ResnError::Data(format!(
                            "column `{}` is constant on the training partition",
                            self.columns[c]
                        )));
                    }
                    norm.shift[c] = lo;
                    norm.scale[c] = hi - lo;
                }
            }
        }
        let mut values = self.raw.clone();
        for (c, mut col) in values.axis_iter_mut(Axis(1)).enumerate() {
            let (shift, scale) = (norm.shift[c], norm.scale[c]);
            col.mapv_inplace(|x| (x - shift) / scale);
        }
        self.values = values;
        self.normalization = norm;
        Ok(self)
    }

    /// Maps a `rows × output_dim` matrix in normalized units back to raw units.
    pub fn denormalize_outputs(&self, m: &Array2<f64>) -> Array2<f64> {
        let mut out = m.clone();
        for (k, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let c = self.output_cols[k];
            let (shift, scale) = (self.normalization.shift[c], self.normalization.scale[c]);
            col.mapv_inplace(|x| x * scale + shift);
        }
        out
    }

    /// Sliding windows of `look_back` rows, each predicting the next row's
    /// output columns. Yields `partition_len - look_back` windows.
    pub fn window(&self, look_back: usize, partition: Partition) -> Result<WindowSet> {
        let range = self.require_partitions()?.get(partition);
        self.window_rows(look_back, range)
    }

    fn window_rows(&self, look_back: usize, range: RowRange) -> Result<WindowSet> {
        if look_back == 0 {
            return Err(ResnError::Data("look-back must be positive".into()));
        }
        if range.len() <= look_back {
            return Err(ResnError::Data(format!(
                "partition of {} rows is too short for look-back {look_back}",
                range.len()
            )));
        }
        let n = range.len() - look_back;
        let mut inputs = Array3::zeros((n, look_back, self.input_dim()));
        let mut targets = Array2::zeros((n, self.output_dim()));
        for k in 0..n {
            for t in 0..look_back {
                let row = range.start + k + t;
                for (f, &c) in self.input_cols.iter().enumerate() {
                    inputs[[k, t, f]] = self.values[[row, c]];
                }
            }
            let target_row = range.start + k + look_back;
            for (f, &c) in self.output_cols.iter().enumerate() {
                targets[[k, f]] = self.values[[target_row, c]];
            }
        }
        Ok(WindowSet {
            inputs,
            targets,
            first_target_row: range.start + look_back,
        })
    }

    pub fn summary(&self) -> DatasetSummary {
        DatasetSummary {
            rows: self.rows(),
            columns: self.columns.clone(),
            input_columns: self.input_cols.iter().map(|&c| self.columns[c].clone()).collect(),
            output_columns: self.output_cols.iter().map(|&c| self.columns[c].clone()).collect(),
            partitions: self.partitions,
            normalization: self.normalization.clone(),
        }
    }
}

/// Number of samples `sine_series` produces: both endpoints are included.
pub fn sine_sample_count(spec: &SineSpec) -> usize {
    ((spec.t_end - spec.t_start) * spec.rate + 1e-9).floor() as usize + 1
}

pub fn sine_series(spec: &SineSpec) -> Result<SeriesDataset> {
    if !(spec.rate > 0.0) || !(spec.t_end >= spec.t_start) {
        return Err(ResnError::Config(format!(
            "sine needs rate > 0 and t_end >= t_start, got rate {} on [{}, {}]",
            spec.rate, spec.t_start, spec.t_end
        )));
    }
    let n = sine_sample_count(spec);
    let values = Array2::from_shape_fn((n, 1), |(i, _)| {
        let t = spec.t_start + i as f64 / spec.rate;
        spec.amplitude * (2.0 * PI * spec.frequency * t + spec.phase).sin()
    });
    SeriesDataset::new(vec!["y".into()], values, vec![0], vec![0])
}

/// Reads a header-first, comma-separated numeric file. Rows in errors are
/// 1-based data rows (the header is not counted).
pub fn load_csv(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<SeriesDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, 0, "", e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, 0, "", e))?
        .iter()
        .map(str::to_string)
        .collect();

    let resolve = |names: &Option<Vec<String>>| -> Result<Vec<usize>> {
        match names {
            None => Ok((0..header.len()).collect()),
            Some(names) => names
                .iter()
                .map(|n| {
                    header.iter().position(|h| h == n).ok_or_else(|| ResnError::Parse {
                        path: path.to_path_buf(),
                        row: 0,
                        column: n.clone(),
                        message: "unknown column".into(),
                    })
                })
                .collect(),
        }
    };
    let inputs = resolve(&schema.inputs)?;
    let outputs = resolve(&schema.outputs)?;

    // Keep only referenced columns, in file order.
    let mut used: Vec<usize> = inputs.iter().chain(&outputs).copied().collect();
    used.sort_unstable();
    used.dedup();
    let remap = |cols: &[usize]| -> Vec<usize> {
        cols.iter().map(|c| used.binary_search(c).unwrap()).collect()
    };

    let mut flat = Vec::new();
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(path, row, "", e))?;
        if record.len() != header.len() {
            return Err(ResnError::Parse {
                path: path.to_path_buf(),
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for &c in &used {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| ResnError::Parse {
                path: path.to_path_buf(),
                row,
                column: header[c].clone(),
                message: format!("`{cell}` is not a number"),
            })?;
            flat.push(v);
        }
        rows += 1;
    }
    let raw = Array2::from_shape_vec((rows, used.len()), flat)
        .map_err(|e| ResnError::Shape(e.to_string()))?;
    let names = used.iter().map(|&c| header[c].clone()).collect();
    SeriesDataset::new(names, raw, remap(&inputs), remap(&outputs))
}

fn csv_error(path: &Path, row: usize, column: &str, e: csv::Error) -> ResnError {
    ResnError::Parse {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message: e.to_string(),
    }
}
