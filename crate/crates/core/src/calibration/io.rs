//! Force-curve CSV: `dp_m,force_N,sigma_N` rows with `#` comments.
//!
//! Values are written with 17 significant digits so a write/read cycle
//! reproduces every `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::{CurveMeta, ForceCurve, ForceCurveSample};
use crate::error::{Error, Result};

const HEADER: &str = "dp_m,force_N,sigma_N";

pub fn write_curve_csv(curve: &ForceCurve) -> String {
    let mut out = String::new();
    if !curve.meta.geometry.is_empty() {
        let _ = writeln!(out, "# geometry: {}", curve.meta.geometry.replace('\n', " "));
    }
    if let Some(d0) = curve.meta.true_d0 {
        let _ = writeln!(out, "# true_d0_m: {d0:.16e}");
    }
    out.push_str(HEADER);
    out.push('\n');
    for s in &curve.samples {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", s.d_p, s.force, s.sigma);
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<ForceCurve> {
    let mut meta = CurveMeta::default();
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(g) = comment.strip_prefix("geometry:") {
                meta.geometry = g.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("true_d0_m:") {
                meta.true_d0 = Some(v.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad true_d0_m value {:?}", v.trim()),
                })?);
            }
            continue;
        }
        if line == HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 3 columns, found {}", fields.len()),
            });
        }
        let mut v = [0.0; 3];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not a number: {f:?}"),
            })?;
        }
        samples.push(ForceCurveSample {
            d_p: v[0],
            force: v[1],
            sigma: v[2],
        });
    }
    ForceCurve::new(samples, meta)
}

pub fn read_curve_csv(path: impl AsRef<Path>) -> Result<ForceCurve> {
    parse_curve_csv(&crate::error::read_text(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let curve = ForceCurve::new(
            vec![
                ForceCurveSample { d_p: 0.0, force: -1.0 / 3.0 * 1e-10, sigma: 3e-12 },
                ForceCurveSample { d_p: 1.234_567_890_123_456_7e-7, force: -std::f64::consts::PI * 1e-9, sigma: 3e-12 },
            ],
            CurveMeta { geometry: "test".into(), true_d0: Some(2e-6 + 1e-22) },
        )
        .unwrap();
        let back = parse_curve_csv(&write_curve_csv(&curve)).unwrap();
        assert_eq!(back, curve);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_curve_csv("dp_m,force_N,sigma_N\n0,1,1\n1,2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_curve_csv("0,1,0\n").is_err());
        assert!(parse_curve_csv("1,1,1\n0,1,1\n").is_err());
    }
}
