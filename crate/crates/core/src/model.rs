//! Plain-text model files.
//!
//! ```text
//! kalda-model 1
//! method kalda
//! mode single
//! classes 3
//! p 20
//! k 2
//! meta <key> <value>        (zero or more)
//! mean
//! <p comma-separated values>
//! projection
//! <p rows of k comma-separated values>
//! ```
//!
//! Floats are written with 17 significant digits so a save/load round trip
//! is exact.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::dataset::{CenteringInfo, DataMatrix, LabelMode};
use crate::error::{KaldaError, Result};

pub const MAGIC: &str = "kalda-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub method: String,
    pub mode: LabelMode,
    pub num_classes: usize,
    pub mean: DVector<f64>,
    /// `p×k`; orthonormal for every method except classical LDA.
    pub projection: DMatrix<f64>,
    pub metadata: Vec<(String, String)>,
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Model {
    pub fn p(&self) -> usize {
        self.projection.nrows()
    }

    pub fn k(&self) -> usize {
        self.projection.ncols()
    }

    pub fn centering(&self) -> CenteringInfo {
        CenteringInfo {
            mean: self.mean.clone(),
            mode: self.mode,
        }
    }

    /// Centers `x` with the training mean and projects it: `Gᵀ(x − m)`.
    pub fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.p() != self.p() {
            return Err(KaldaError::dims(format!(
                "data has {} features, model expects {}",
                x.p(),
                self.p()
            )));
        }
        self.centering().apply(x)?.project(&self.projection)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{MAGIC} {VERSION}\n"));
        out.push_str(&format!("method {}\n", self.method));
        out.push_str(&format!("mode {}\n", self.mode));
        out.push_str(&format!("classes {}\n", self.num_classes));
        out.push_str(&format!("p {}\n", self.p()));
        out.push_str(&format!("k {}\n", self.k()));
        for (key, value) in &self.metadata {
            out.push_str(&format!("meta {key} {value}\n"));
        }
        out.push_str("mean\n");
        out.push_str(&join(self.mean.iter().copied()));
        out.push_str("\nprojection\n");
        for row in self.projection.row_iter() {
            out.push_str(&join(row.iter().copied()));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| KaldaError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| KaldaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| KaldaError::Model {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };

        let (ln, header) = next("header")?;
        if header != format!("{MAGIC} {VERSION}") {
            return Err(KaldaError::Model {
                line: ln,
                msg: format!("unsupported header {header:?}"),
            });
        }
        let method = keyed(next("method")?, "method")?.to_string();
        let (ln, mode_line) = next("mode")?;
        let mode: LabelMode = keyed((ln, mode_line), "mode")?.parse().map_err(|_| KaldaError::Model {
            line: ln,
            msg: "bad mode".into(),
        })?;
        let num_classes = parse_count(next("classes")?, "classes")?;
        let p = parse_count(next("p")?, "p")?;
        let k = parse_count(next("k")?, "k")?;
        if p == 0 || k == 0 || k > p {
            return Err(KaldaError::Model {
                line: ln,
                msg: format!("invalid shape p={p}, k={k}"),
            });
        }

        let mut metadata = Vec::new();
        let (mut ln, mut line) = next("mean")?;
        while let Some(rest) = line.strip_prefix("meta ") {
            let (key, value) = rest.split_once(' ').ok_or_else(|| KaldaError::Model {
                line: ln,
                msg: "meta line needs a key and a value".into(),
            })?;
            metadata.push((key.to_string(), value.to_string()));
            (ln, line) = next("mean")?;
        }
        if line != "mean" {
            return Err(KaldaError::Model {
                line: ln,
                msg: format!("expected \"mean\", got {line:?}"),
            });
        }
        let mean = DVector::from_vec(parse_row(next("mean values")?, p)?);
        let (ln, line) = next("projection")?;
        if line != "projection" {
            return Err(KaldaError::Model {
                line: ln,
                msg: format!("expected \"projection\", got {line:?}"),
            });
        }
        let mut projection = DMatrix::zeros(p, k);
        for i in 0..p {
            let row = parse_row(next("projection row")?, k)?;
            for (j, v) in row.into_iter().enumerate() {
                projection[(i, j)] = v;
            }
        }
        Ok(Model {
            method,
            mode,
            num_classes,
            mean,
            projection,
            metadata,
        })
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(format_float).collect::<Vec<_>>().join(",")
}

fn keyed<'a>((ln, line): (usize, &'a str), key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| KaldaError::Model {
            line: ln,
            msg: format!("expected \"{key} <value>\", got {line:?}"),
        })
}

fn parse_count(item: (usize, &str), key: &str) -> Result<usize> {
    let ln = item.0;
    keyed(item, key)?.parse().map_err(|_| KaldaError::Model {
        line: ln,
        msg: format!("{key} must be a non-negative integer"),
    })
}

fn parse_row((ln, line): (usize, &str), expected: usize) -> Result<Vec<f64>> {
    let values = line
        .split(',')
        .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| KaldaError::Model {
            line: ln,
            msg: "invalid number".into(),
        })?;
    if values.len() != expected {
        return Err(KaldaError::Model {
            line: ln,
            msg: format!("expected {expected} values, got {}", values.len()),
        });
    }
    Ok(values)
}
