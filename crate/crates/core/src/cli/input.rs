//! System and matrix files: `{"rows": n, "cols": n, "data": [...]}` with
//! row-major entries given as `[re, im]` pairs or bare real numbers, and
//! `{"A": matrix, "B": [matrix, ...]}` for systems.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix;
use crate::system::SdeSystem;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(rename = "A")]
    a: MatrixFile,
    #[serde(rename = "B", default)]
    b: Vec<MatrixFile>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    source: Option<String>,
}

/// Optional descriptive fields carried by a system file.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SystemMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

fn to_matrix(m: MatrixFile, field: &str) -> Result<ComplexMatrix, String> {
    if m.rows * m.cols != m.data.len() {
        return Err(format!(
            "{field}: rows × cols = {} × {} but data has {} entries",
            m.rows,
            m.cols,
            m.data.len()
        ));
    }
    let data = m
        .data
        .into_iter()
        .map(|e| match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        })
        .collect();
    ComplexMatrix::new(m.rows, m.cols, data).map_err(|e| format!("{field}: {e}"))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let m: MatrixFile = serde_json::from_str(text).map_err(|e| format!("matrix: {e}"))?;
    to_matrix(m, "matrix")
}

pub fn parse_system(text: &str) -> Result<(SdeSystem, SystemMeta), String> {
    let f: SystemFile = serde_json::from_str(text).map_err(|e| format!("system: {e}"))?;
    let a = to_matrix(f.a, "A")?;
    let b =
        f.b.into_iter()
            .enumerate()
            .map(|(i, m)| to_matrix(m, &format!("B[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
    let sys = SdeSystem::new(a, b).map_err(|e| format!("system: {e}"))?;
    Ok((
        sys,
        SystemMeta {
            name: f.name,
            source: f.source,
        },
    ))
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    parse_matrix(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_system(path: &Path) -> Result<(SdeSystem, SystemMeta), String> {
    parse_system(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Serializes a matrix in the file format, writing real entries as bare
/// numbers.
pub fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let data: Vec<serde_json::Value> = m
        .as_slice()
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                serde_json::json!(z.re)
            } else {
                serde_json::json!([z.re, z.im])
            }
        })
        .collect();
    serde_json::json!({"rows": m.rows(), "cols": m.cols(), "data": data})
}

pub fn system_json(sys: &SdeSystem) -> serde_json::Value {
    serde_json::json!({
        "A": matrix_json(sys.drift()),
        "B": sys.diffusions().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

/// Parses a comma-separated state vector; entries are reals or `re:im`.
pub fn parse_vector(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let bad = |_| format!("cannot parse '{tok}' as a number (use re or re:im)");
            match tok.split_once(':') {
                Some((re, im)) => Ok(Complex64::new(
                    re.trim().parse().map_err(bad)?,
                    im.trim().parse().map_err(bad)?,
                )),
                None => Ok(Complex64::new(tok.parse().map_err(bad)?, 0.0)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_entries() {
        let m = parse_matrix(r#"{"rows": 2, "cols": 2, "data": [1, [2, -1], 0.5, [0, 3]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(2.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn system_round_trip() {
        let text = r#"{"A": {"rows":1,"cols":1,"data":[-100]},
                       "B": [{"rows":1,"cols":1,"data":[10]}], "name": "f"}"#;
        let (sys, meta) = parse_system(text).unwrap();
        assert_eq!(sys.channels(), 1);
        assert_eq!(meta.name.as_deref(), Some("f"));
        let again = parse_system(&system_json(&sys).to_string()).unwrap().0;
        assert_eq!(again, sys);
    }

    #[test]
    fn empty_diffusion_list() {
        let (sys, _) = parse_system(r#"{"A": {"rows":1,"cols":1,"data":[0]}, "B": []}"#).unwrap();
        assert_eq!(sys.channels(), 0);
        let (sys, _) = parse_system(r#"{"A": {"rows":1,"cols":1,"data":[0]}}"#).unwrap();
        assert_eq!(sys.channels(), 0);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = parse_system(r#"{"A": {"rows":2,"cols":2,"data":[1,2,3]}, "B": []}"#).unwrap_err();
        assert!(e.starts_with("A:"), "{e}");
        let e = parse_system(r#"{"A": {"rows":1,"cols":1,"data":[1]}, "B": [{"rows":2,"cols":2,"data":[1,0,0,1]}]}"#)
            .unwrap_err();
        assert!(e.contains("system"), "{e}");
        let e = parse_system("{\"A\": {\"rows\":1,\n \"cols\":1, \"data\":[\"x\"]}}").unwrap_err();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_system(r#"{"A": {"rows":1,"cols":1,"data":[1]}, "b": []}"#).is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(
            parse_vector("1, -2:0.5").unwrap(),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.5)]
        );
        assert!(parse_vector("1,,2").is_err());
    }
}
