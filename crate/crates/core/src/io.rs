//! Model files: Matrix Market coordinate matrices and a small JSON format.
//!
//! The JSON format is
//!
//! ```json
//! { "n": 3, "entries": [[1, 1, 2.0], [2, 1, -0.5], ...], "h": [1.0, 0.0, 0.0] }
//! ```
//!
//! with 1-based `[row, col, value]` triplets. An entry given once is mirrored;
//! an entry given in both orientations must agree.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InformationModel;

/// Relative tolerance for accepting the two orientations of an entry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonModel {
    pub n: usize,
    #[serde(alias = "triplets")]
    pub entries: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
}

/// Loads a model, choosing the format from the extension (`.mtx` or `.json`)
/// or, failing that, from the first non-blank character.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<InformationModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let model = match ext {
        "mtx" => parse_matrix_market(&text, path)?,
        "json" => parse_json_model(&text, path)?,
        _ if text.trim_start().starts_with('{') => parse_json_model(&text, path)?,
        _ => parse_matrix_market(&text, path)?,
    };
    if let Some(index) = model.zero_diagonal() {
        return Err(Error::ZeroDiagonal { index: index + 1 });
    }
    Ok(model)
}

/// Collects triplets into a symmetric matrix.
struct Assembler {
    path: PathBuf,
    n: usize,
    mirror: bool,
    values: HashMap<(usize, usize), f64>,
}

impl Assembler {
    fn new(path: &Path, n: usize, mirror: bool) -> Self {
        Self {
            path: path.to_path_buf(),
            n,
            mirror,
            values: HashMap::new(),
        }
    }

    /// `row`, `col` are 1-based.
    fn push(&mut self, line: usize, row: usize, col: usize, value: f64) -> Result<()> {
        if row == 0 || col == 0 || row > self.n || col > self.n {
            return Err(Error::IndexOutOfRange {
                path: self.path.clone(),
                line,
                row,
                col,
                n: self.n,
            });
        }
        if !value.is_finite() {
            return Err(self.parse_error(line, format!("non-finite value {value}")));
        }
        if self.values.insert((row - 1, col - 1), value).is_some() {
            return Err(self.parse_error(line, format!("duplicate entry ({row}, {col})")));
        }
        Ok(())
    }

    fn parse_error(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn finish(self) -> Result<DMatrix<f64>> {
        let n = self.n;
        let mut j = DMatrix::zeros(n, n);
        for (&(r, c), &v) in &self.values {
            let mirror = if r == c {
                Some(v)
            } else {
                self.values.get(&(c, r)).copied()
            };
            match mirror {
                Some(u) if r >= c => {
                    if (u - v).abs() > SYMMETRY_TOLERANCE * u.abs().max(v.abs()) {
                        return Err(Error::Asymmetric {
                            row: r + 1,
                            col: c + 1,
                            upper: u,
                            lower: v,
                        });
                    }
                }
                // checked from the lower-triangle side
                Some(_) => continue,
                None if self.mirror => {}
                None => {
                    return Err(Error::Asymmetric {
                        row: r + 1,
                        col: c + 1,
                        upper: v,
                        lower: 0.0,
                    });
                }
            }
            j[(r, c)] = v;
            j[(c, r)] = v;
        }
        Ok(j)
    }
}

/// Parses a Matrix Market `coordinate` file with `real` or `integer` values
/// and `symmetric` or `general` symmetry.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<InformationModel> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(err(
            hline,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'".into(),
        ));
    }
    if fields[2] != "coordinate" {
        return Err(err(hline, format!("unsupported format '{}'", fields[2])));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(err(hline, format!("unsupported field '{}'", fields[3])));
    }
    let mirror = match fields[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(err(hline, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body
        .next()
        .ok_or_else(|| err(hline, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(sline, format!("bad size line: {e}")))?;
    if dims.len() != 3 {
        return Err(err(sline, "size line must be 'rows cols nonzeros'".into()));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols || rows == 0 {
        return Err(err(
            sline,
            format!("matrix must be square and non-empty, got {rows}x{cols}"),
        ));
    }

    let mut asm = Assembler::new(path, rows, mirror);
    let mut count = 0;
    for (lno, line) in body {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(err(
                lno,
                format!("expected 'row col value', got '{}'", line.trim()),
            ));
        }
        let row: usize = toks[0]
            .parse()
            .map_err(|e| err(lno, format!("bad row index '{}': {e}", toks[0])))?;
        let col: usize = toks[1]
            .parse()
            .map_err(|e| err(lno, format!("bad column index '{}': {e}", toks[1])))?;
        let value: f64 = toks[2]
            .parse()
            .map_err(|e| err(lno, format!("bad value '{}': {e}", toks[2])))?;
        if mirror && col > row {
            return Err(err(
                lno,
                format!("symmetric file has an upper-triangle entry ({row}, {col})"),
            ));
        }
        asm.push(lno, row, col, value)?;
        count += 1;
    }
    if count != nnz {
        return Err(err(
            sline,
            format!("size line announces {nnz} entries but {count} were found"),
        ));
    }
    InformationModel::new(asm.finish()?, None)
}

/// Parses the JSON model format.
pub fn parse_json_model(text: &str, path: &Path) -> Result<InformationModel> {
    let doc: JsonModel = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: format!("column {}: {e}", e.column()),
    })?;
    if doc.n == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "n must be positive".into(),
        });
    }
    let mut asm = Assembler::new(path, doc.n, true);
    for (k, &(row, col, value)) in doc.entries.iter().enumerate() {
        // triplets are located by their position in the list
        asm.push(k + 1, row, col, value)?;
    }
    let h = doc.h.map(DVector::from_vec);
    InformationModel::new(asm.finish()?, h)
}

/// Writes the lower triangle as a symmetric Matrix Market file. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_matrix_market(model: &InformationModel, mut out: impl Write) -> std::io::Result<()> {
    let j = model.information();
    let n = j.nrows();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|c| (c..n).map(move |r| (r, c)))
        .filter(|&(r, c)| j[(r, c)] != 0.0)
        .map(|(r, c)| (r, c, j[(r, c)]))
        .collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", entries.len())?;
    for (r, c, v) in entries {
        writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

/// Serializes a model to the JSON format (lower triangle only).
pub fn to_json_model(model: &InformationModel) -> JsonModel {
    let j = model.information();
    let n = j.nrows();
    let entries = (0..n)
        .flat_map(|r| (0..=r).map(move |c| (r, c)))
        .filter(|&(r, c)| j[(r, c)] != 0.0)
        .map(|(r, c)| (r + 1, c + 1, j[(r, c)]))
        .collect();
    JsonModel {
        n,
        entries,
        h: model.potential().map(|h| h.iter().copied().collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cycle_c5;

    fn p() -> &'static Path {
        Path::new("test.mtx")
    }

    #[test]
    fn symmetric_matrix_market() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 2.0\n2 1 -0.5\n2 2 3\n";
        let m = parse_matrix_market(text, p()).unwrap();
        assert_eq!(
            m.information(),
            &DMatrix::from_row_slice(2, 2, &[2.0, -0.5, -0.5, 3.0])
        );
    }

    #[test]
    fn general_matrix_market_must_be_symmetric() {
        let ok = "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 0.5\n2 1 0.5\n2 2 2\n";
        assert!(parse_matrix_market(ok, p()).is_ok());
        let bad = "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 0.5\n2 1 0.25\n2 2 2\n";
        assert!(matches!(
            parse_matrix_market(bad, p()),
            Err(Error::Asymmetric { .. })
        ));
        let one_sided =
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2\n1 2 0.5\n2 2 2\n";
        assert!(matches!(
            parse_matrix_market(one_sided, p()),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn matrix_market_errors_carry_lines() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n3 1 1\n";
        match parse_matrix_market(text, p()) {
            Err(Error::IndexOutOfRange { line, row, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(row, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 x 1\n";
        assert!(matches!(
            parse_matrix_market(text, p()),
            Err(Error::Parse { line: 4, .. })
        ));
        let text = "%%MatrixMarket matrix array real general\n2 2\n";
        assert!(matches!(
            parse_matrix_market(text, p()),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2\n";
        assert!(matches!(
            parse_matrix_market(text, p()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn json_model_mirrors_entries() {
        let text = r#"{"n": 2, "entries": [[1,1,2.0],[1,2,0.5],[2,2,1.0]], "h": [1, 2]}"#;
        let m = parse_json_model(text, Path::new("m.json")).unwrap();
        assert_eq!(m.information()[(1, 0)], 0.5);
        assert_eq!(m.potential().unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn json_syntax_error_reports_line() {
        let text = "{\n\"n\": 2,\n\"entries\": [[1,1,]]}";
        assert!(matches!(
            parse_json_model(text, Path::new("m.json")),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn empty_triplets_are_rejected_by_loader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.json");
        fs::write(&path, r#"{"n": 3, "entries": []}"#).unwrap();
        assert!(matches!(
            load_matrix(&path),
            Err(Error::ZeroDiagonal { index: 1 })
        ));
    }

    #[test]
    fn matrix_market_round_trip_is_exact() {
        let m = cycle_c5(0.3);
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let back = parse_matrix_market(std::str::from_utf8(&buf).unwrap(), p()).unwrap();
        assert_eq!(back, m);
    }
}
