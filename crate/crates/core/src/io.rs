//! File formats.
//!
//! * samples CSV: `s_re,s_im,h_re,h_im`
//! * model JSON: `kind` (`"so"`/`"fo"`), `order`, optional `alpha`/`beta`,
//!   and the realization matrices as row-major nested `[re, im]` arrays
//! * singular values CSV: `index,sigma_rel`
//! * sweep CSV: `alpha,beta,J,status`
//! * Bode CSV: `freq,abs_H,re_H,im_H[,abs_err]`
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces every value bit for bit.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::paramfit::SweepResult;
use crate::sampling::{FrequencySample, SampleSet};
use crate::systems::{DampingParams, FirstOrderSystem, SecondOrderSystem, TransferFunction};

pub const SAMPLES_HEADER: [&str; 4] = ["s_re", "s_im", "h_re", "h_im"];

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("row {row}: '{field}': {e}")))
}

pub fn write_samples<W: Write>(out: W, data: &SampleSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLES_HEADER)?;
    for s in data.samples() {
        w.write_record([fmt(s.point.re), fmt(s.point.im), fmt(s.value.re), fmt(s.value.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<R: Read>(input: R) -> Result<SampleSet> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != SAMPLES_HEADER {
        return Err(Error::Parse(format!(
            "expected header {}, got {}",
            SAMPLES_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut samples = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Parse(format!("row {}: expected 4 fields", row + 1)));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|f| parse_f64(f, row + 1))
            .collect::<Result<_>>()?;
        samples.push(FrequencySample::new(
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
        ));
    }
    SampleSet::new(samples)
}

/// Either kind of realization, as stored in model files.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    So(SecondOrderSystem),
    Fo(FirstOrderSystem),
}

impl TransferFunction for Model {
    fn order(&self) -> usize {
        match self {
            Model::So(s) => s.order(),
            Model::Fo(s) => s.order(),
        }
    }

    fn transfer(&self, s: Complex64) -> Result<Complex64> {
        match self {
            Model::So(m) => m.transfer(s),
            Model::Fo(m) => m.transfer(s),
        }
    }
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    kind: String,
    order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<JsonMatrix>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    d: Option<JsonMatrix>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k: Option<JsonMatrix>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    e: Option<JsonMatrix>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<JsonMatrix>,
    #[serde(rename = "B")]
    b: JsonMatrix,
    #[serde(rename = "C")]
    c: JsonMatrix,
}

fn to_json(a: &CMatrix) -> JsonMatrix {
    a.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn column_json(v: &CVector) -> JsonMatrix {
    v.iter().map(|z| vec![[z.re, z.im]]).collect()
}

fn row_json(v: &CVector) -> JsonMatrix {
    vec![v.iter().map(|z| [z.re, z.im]).collect()]
}

fn from_json(name: &str, a: &JsonMatrix) -> Result<CMatrix> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{name}: ragged rows")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(a[i][j][0], a[i][j][1])
    }))
}

fn vector_json(name: &str, a: &JsonMatrix) -> Result<CVector> {
    let m = from_json(name, a)?;
    match m.shape() {
        (_, 1) => Ok(m.column(0).into_owned()),
        (1, n) => Ok(CVector::from_iterator(n, m.row(0).iter().copied())),
        shape => Err(Error::Parse(format!("{name}: expected a vector, got {shape:?}"))),
    }
}

fn required<'a>(name: &str, m: &'a Option<JsonMatrix>) -> Result<&'a JsonMatrix> {
    m.as_ref()
        .ok_or_else(|| Error::Parse(format!("missing matrix {name}")))
}

pub fn model_to_json(model: &Model) -> Result<String> {
    let file = match model {
        Model::So(s) => ModelFile {
            kind: "so".into(),
            order: s.order(),
            alpha: s.rayleigh().map(|p| p.alpha),
            beta: s.rayleigh().map(|p| p.beta),
            m: Some(to_json(s.m())),
            d: Some(to_json(s.d())),
            k: Some(to_json(s.k())),
            e: None,
            a: None,
            b: column_json(s.b()),
            c: row_json(s.c()),
        },
        Model::Fo(s) => ModelFile {
            kind: "fo".into(),
            order: s.order(),
            alpha: None,
            beta: None,
            m: None,
            d: None,
            k: None,
            e: Some(to_json(s.e())),
            a: Some(to_json(s.a())),
            b: column_json(s.b()),
            c: row_json(s.c()),
        },
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

pub fn model_from_json(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text)?;
    let b = vector_json("B", &file.b)?;
    let c = vector_json("C", &file.c)?;
    let model = match file.kind.as_str() {
        "so" => {
            let rayleigh = match (file.alpha, file.beta) {
                (Some(a), Some(b)) => Some(DampingParams::new(a, b)?),
                (None, None) => None,
                _ => return Err(Error::Parse("alpha and beta must appear together".into())),
            };
            Model::So(SecondOrderSystem::new(
                from_json("M", required("M", &file.m)?)?,
                from_json("D", required("D", &file.d)?)?,
                from_json("K", required("K", &file.k)?)?,
                b,
                c,
                rayleigh,
            )?)
        }
        "fo" => Model::Fo(FirstOrderSystem::new(
            from_json("E", required("E", &file.e)?)?,
            from_json("A", required("A", &file.a)?)?,
            b,
            c,
        )?),
        other => return Err(Error::Parse(format!("unknown model kind '{other}'"))),
    };
    if model.order() != file.order {
        return Err(Error::Parse(format!(
            "declared order {} but matrices have order {}",
            file.order,
            model.order()
        )));
    }
    Ok(model)
}

/// `index,sigma_rel` rows (1-based). A zero spectrum writes the single row
/// `1,0`.
pub fn write_singular_values<W: Write>(out: W, sigmas: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "sigma_rel"])?;
    match sigmas.first() {
        Some(&s1) if s1 > 0.0 => {
            for (k, s) in sigmas.iter().enumerate() {
                w.write_record([(k + 1).to_string(), fmt(s / s1)])?;
            }
        }
        Some(_) => w.write_record(["1".to_string(), fmt(0.0)])?,
        None => {}
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "J", "status"])?;
    for cell in &sweep.surface {
        w.write_record([
            fmt(cell.alpha),
            fmt(cell.beta),
            cell.j.map(fmt).unwrap_or_default(),
            cell.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One Bode row; `abs_err` is present when comparing two models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodeRow {
    pub freq: f64,
    pub h: Complex64,
    pub abs_err: Option<f64>,
}

pub fn write_bode<W: Write>(out: W, rows: &[BodeRow]) -> Result<()> {
    let with_err = rows.iter().any(|r| r.abs_err.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["freq", "abs_H", "re_H", "im_H"];
    if with_err {
        header.push("abs_err");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![fmt(r.freq), fmt(r.h.norm()), fmt(r.h.re), fmt(r.h.im)];
        if with_err {
            rec.push(r.abs_err.map(fmt).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::demo_system;

    #[test]
    fn samples_header_enforced() {
        let bad = "a,b,c,d\n1,2,3,4\n";
        assert!(matches!(read_samples(bad.as_bytes()), Err(Error::Parse(_))));
        let dup = "s_re,s_im,h_re,h_im\n0,1,2,3\n0,1,5,6\n";
        assert!(matches!(read_samples(dup.as_bytes()), Err(Error::DuplicatePoint(_))));
        let garbage = "s_re,s_im,h_re,h_im\n0,x,2,3\n";
        assert!(matches!(read_samples(garbage.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn model_json_shape() {
        let text = model_to_json(&Model::So(demo_system())).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "so");
        assert_eq!(v["order"], 2);
        assert_eq!(v["alpha"], 0.01);
        assert_eq!(v["B"][1][0][0], 3.0);
        assert_eq!(v["C"][0][1][0], 3.0);
        assert_eq!(v["K"][1][1][0], 2.0);
        assert_eq!(model_from_json(&text).unwrap(), Model::So(demo_system()));

        let wrong_order = text.replace("\"order\": 2", "\"order\": 3");
        assert!(model_from_json(&wrong_order).is_err());
        let fo = Model::Fo(demo_system().to_first_order());
        let text = model_to_json(&fo).unwrap();
        assert!(text.contains("\"kind\": \"fo\""));
        assert_eq!(model_from_json(&text).unwrap(), fo);
    }

    #[test]
    fn zero_spectrum_writes_single_row() {
        let mut buf = Vec::new();
        write_singular_values(&mut buf, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,sigma_rel\n1,0.0\n");
    }
}
