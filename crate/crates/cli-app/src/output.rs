use crate::CliError;
use nalgebra::DMatrix;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io)?;
        }
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res.map_err(io)
}

/// Shortest round-trip decimal, so reruns are byte-identical.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Tag for file names: `0.5` becomes `0p5`, `-1` becomes `m1`.
pub fn tag(x: f64) -> String {
    let s = format!("{x}");
    s.replace('-', "m").replace('.', "p")
}

/// Columnar CSV. `axes` are `# axis:` header comments, one per dimension.
pub fn columns_csv(axes: &[&str], names: &[&str], cols: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for a in axes {
        let _ = writeln!(out, "# axis: {a}");
    }
    let _ = writeln!(out, "{}", names.join(","));
    let rows = cols.iter().map(Vec::len).min().unwrap_or(0);
    for i in 0..rows {
        let line: Vec<String> = cols.iter().map(|c| num(c[i])).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Matrix CSV: first header row holds the column axis, each line starts with
/// its row-axis value.
pub fn matrix_csv(row_axis: (&str, &[f64]), col_axis: (&str, &[f64]), values: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# axis: rows = {}", row_axis.0);
    let _ = writeln!(out, "# axis: columns = {}", col_axis.0);
    let mut head = vec![String::from(row_axis.0)];
    head.extend(col_axis.1.iter().map(|&v| num(v)));
    let _ = writeln!(out, "{}", head.join(","));
    for (i, r) in row_axis.1.iter().enumerate() {
        let mut line = vec![num(*r)];
        line.extend(values.row(i).iter().map(|&v| num(v)));
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Binary 16-bit graymap scaled so the matrix maximum maps to 65535.
/// Row 0 of the matrix is the top row of the image.
pub fn pgm16(values: &DMatrix<f64>) -> Vec<u8> {
    let (h, w) = values.shape();
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
    for i in 0..h {
        for j in 0..w {
            let v = if max > 0.0 {
                (values[(i, j)].max(0.0) / max * 65535.0).round() as u16
            } else {
                0
            };
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// Collects written artifacts under one output directory.
#[derive(Debug)]
pub struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Resolved config plus timings and diagnostics of one command.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: String,
    pub version: &'static str,
    pub wall_seconds: f64,
    pub stages: Vec<StageTiming>,
    pub diagnostics: toml::Table,
    pub files: Vec<String>,
    pub config: &'a crate::RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub name: String,
    pub seconds: f64,
}

impl RunManifest<'_> {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Syntax(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_headers_and_values() {
        let s = columns_csv(&["wavenumber (cm^-1)"], &["wavenumber_cm1", "magnitude"], &[vec![1.0, 2.5], vec![0.1, 0.2]]);
        assert_eq!(s, "# axis: wavenumber (cm^-1)\nwavenumber_cm1,magnitude\n1.0,0.1\n2.5,0.2\n");
    }

    #[test]
    fn matrix_layout() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = matrix_csv(("y_um", &[0.0, 1.0]), ("w", &[10.0, 20.0, 30.0]), &m);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[2], "y_um,10.0,20.0,30.0");
        assert_eq!(lines[4], "1.0,4.0,5.0,6.0");
    }

    #[test]
    fn pgm_max_is_full_scale() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 2.0, 1.0]);
        let p = pgm16(&m);
        let head = b"P5\n2 2\n65535\n";
        assert_eq!(&p[..head.len()], head);
        let px: Vec<u16> = p[head.len()..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        assert_eq!(px, vec![0, 16384, 65535, 32768]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
    }

    #[test]
    fn tags() {
        assert_eq!(tag(0.5), "0p5");
        assert_eq!(tag(-2.0), "m2");
    }
}
