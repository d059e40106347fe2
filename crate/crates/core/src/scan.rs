//! Grid scans of pairwise CHSH maxima over Schmidt-form families.
//!
//! `fig1` sweeps `λ0 = cos α, λ2 = sin α cos β, λ3 = sin α sin β` (`λ1 = λ4 = 0`)
//! over `α ∈ [0, π]`, `β ∈ [0, 2π]`. `fig2` fixes `λ0 = √2/2` and sweeps
//! `λ2 = (√2/2) cos θ, λ3 = (√2/2) sin θ` over `θ ∈ [0, 2π]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{validation, Result};
use crate::io::format_sig12;
use crate::states::{schmidt_state, SchmidtParams};
use crate::tradeoff::pairwise_chsh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
}

impl Figure {
    pub fn default_resolution(&self) -> usize {
        match self {
            Self::Fig1 => 201,
            Self::Fig2 => 721,
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self {
            Self::Fig1 => &["alpha", "beta", "q_ab", "q_ac", "q_bc"],
            Self::Fig2 => &["theta", "q_ab", "q_ac", "q_bc"],
        }
    }
}

impl FromStr for Figure {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            _ => Err(validation(format!("unknown figure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanSpec {
    pub figure: Figure,
    /// Samples per swept axis, endpoints included.
    pub resolution: usize,
}

impl ScanSpec {
    pub fn new(figure: Figure, resolution: Option<usize>) -> Result<Self> {
        let resolution = resolution.unwrap_or_else(|| figure.default_resolution());
        if resolution < 2 {
            return Err(validation(format!(
                "scan resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(Self { figure, resolution })
    }
}

/// One grid point: the swept angles followed by `(q_ab, q_ac, q_bc)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub angles: Vec<f64>,
    pub values: [f64; 3],
}

fn linspace(end: f64, count: usize, k: usize) -> f64 {
    end * k as f64 / (count - 1) as f64
}

pub fn fig1_params(alpha: f64, beta: f64) -> Result<SchmidtParams> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    SchmidtParams::normalized([ca, 0.0, sa * cb, sa * sb, 0.0], 0.0)
}

pub fn fig2_params(theta: f64) -> Result<SchmidtParams> {
    let (s, c) = theta.sin_cos();
    SchmidtParams::normalized([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2 * c, FRAC_1_SQRT_2 * s, 0.0], 0.0)
}

fn pair_values(params: &SchmidtParams) -> Result<[f64; 3]> {
    let pairs = pairwise_chsh(&schmidt_state(params))?;
    Ok([pairs[0].value(), pairs[1].value(), pairs[2].value()])
}

/// Evaluates every grid point, in lexicographic grid-index order.
pub fn scan_rows(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    let res = spec.resolution;
    match spec.figure {
        Figure::Fig1 => (0..res * res)
            .into_par_iter()
            .map(|idx| {
                let alpha = linspace(PI, res, idx / res);
                let beta = linspace(TAU, res, idx % res);
                Ok(ScanRow {
                    angles: vec![alpha, beta],
                    values: pair_values(&fig1_params(alpha, beta)?)?,
                })
            })
            .collect(),
        Figure::Fig2 => (0..res)
            .into_par_iter()
            .map(|k| {
                let theta = linspace(TAU, res, k);
                Ok(ScanRow {
                    angles: vec![theta],
                    values: pair_values(&fig2_params(theta)?)?,
                })
            })
            .collect(),
    }
}

pub fn write_csv<W: Write>(figure: Figure, rows: &[ScanRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(figure.header())?;
    for row in rows {
        let fields = row.angles.iter().chain(&row.values).map(|&x| format_sig12(x));
        writer.write_record(fields)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::TSIRELSON;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn resolution_must_be_at_least_two() {
        assert!(ScanSpec::new(Figure::Fig2, Some(1)).is_err());
        assert_eq!(ScanSpec::new(Figure::Fig1, None).unwrap().resolution, 201);
        assert_eq!(ScanSpec::new(Figure::Fig2, None).unwrap().resolution, 721);
        assert!("fig3".parse::<Figure>().is_err());
    }

    #[test]
    fn fig1_first_row_is_product_state() {
        let rows = scan_rows(&ScanSpec::new(Figure::Fig1, Some(5)).unwrap()).unwrap();
        assert_eq!(rows.len(), 25);
        assert_eq!(rows[0].angles, vec![0.0, 0.0]);
        assert_eq!(rows[1].angles[0], 0.0);
        for v in rows[0].values {
            close(v, 2.0, 1e-12);
        }
    }

    #[test]
    fn fig2_special_angles() {
        let rows = scan_rows(&ScanSpec::new(Figure::Fig2, Some(9)).unwrap()).unwrap();
        // θ = 0: Bell pair on AC.
        close(rows[0].values[0], 0.0, 1e-7);
        close(rows[0].values[1], TSIRELSON, 1e-12);
        close(rows[0].values[2], 0.0, 1e-7);
        // θ = π/2: Bell pair on AB.
        close(rows[2].angles[0], PI / 2.0, 1e-15);
        close(rows[2].values[0], TSIRELSON, 1e-12);
        close(rows[2].values[1], 0.0, 1e-7);
        close(rows[2].values[2], 0.0, 1e-7);
    }

    #[test]
    fn csv_layout() {
        let rows = scan_rows(&ScanSpec::new(Figure::Fig2, Some(3)).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_csv(Figure::Fig2, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "theta,q_ab,q_ac,q_bc");
        assert!(lines[1].starts_with("0,"), "{}", lines[1]);
        assert!(lines[1].contains("2.82842712475"), "{}", lines[1]);
    }
}
