//! Dense binary text format: one example per line, whitespace-separated 0/1
//! feature tokens followed by the label.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{BinaryDataset, Labels};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Non-negative integer class index.
    Class,
    /// Real-valued regression target.
    Real,
}

pub fn load_dense_binary(path: impl AsRef<Path>, kind: LabelKind) -> Result<BinaryDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut width: Option<usize> = None;
    let mut features = Vec::new();
    let mut classes = Vec::new();
    let mut targets = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        if tokens.len() < 2 {
            return Err(parse_err("need at least one feature and a label".into()));
        }
        let expected = *width.get_or_insert(tokens.len());
        if tokens.len() != expected {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                line: line_no,
                expected,
                actual: tokens.len(),
            });
        }
        let (label, feats) = tokens.split_last().expect("non-empty");
        for tok in feats {
            match *tok {
                "0" => features.push(0),
                "1" => features.push(1),
                other => return Err(parse_err(format!("non-binary feature token {other:?}"))),
            }
        }
        match kind {
            LabelKind::Class => classes.push(
                label
                    .parse::<u32>()
                    .map_err(|_| parse_err(format!("invalid class label {label:?}")))?,
            ),
            LabelKind::Real => {
                let y = label
                    .parse::<f64>()
                    .ok()
                    .filter(|y| y.is_finite())
                    .ok_or_else(|| parse_err(format!("invalid target {label:?}")))?;
                targets.push(y);
            }
        }
    }

    let Some(width) = width else {
        return Err(Error::EmptyPool(path.to_path_buf()));
    };
    let labels = match kind {
        LabelKind::Class => Labels::Classes(classes),
        LabelKind::Real => Labels::Targets(targets),
    };
    BinaryDataset::new(width - 1, features, labels)
}

pub fn write_dense_binary(data: &BinaryDataset, mut out: impl Write) -> std::io::Result<()> {
    let mut line = String::new();
    for i in 0..data.len() {
        line.clear();
        for &v in data.row(i) {
            line.push(if v == 1 { '1' } else { '0' });
            line.push(' ');
        }
        match data.labels() {
            Labels::Classes(l) => line.push_str(&l[i].to_string()),
            Labels::Targets(t) => line.push_str(&t[i].to_string()),
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn save_dense_binary(data: &BinaryDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_dense_binary(data, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
