#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kalda_core::{DataMatrix, LabelAssignment};

pub fn kalda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kalda"))
        .args(args)
        .output()
        .expect("spawn kalda")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited by signal")
}

pub fn features_csv(x: &DataMatrix) -> String {
    let mut s = String::new();
    for col in x.as_matrix().column_iter() {
        let row: Vec<String> = col.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    s
}

pub fn labels_text(labels: &LabelAssignment) -> String {
    let mut s = String::new();
    for m in labels.memberships() {
        let ids: Vec<String> = m.iter().map(|c| c.to_string()).collect();
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    s
}

/// Writes `features.csv` and `labels.txt` into `dir`.
pub fn write_dataset(dir: &Path, x: &DataMatrix, labels: &LabelAssignment) -> (PathBuf, PathBuf) {
    let f = dir.join("features.csv");
    let l = dir.join("labels.txt");
    std::fs::write(&f, features_csv(x)).unwrap();
    std::fs::write(&l, labels_text(labels)).unwrap();
    (f, l)
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
