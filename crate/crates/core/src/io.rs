//! Interchange formats: the JSON layout for complex matrices (row-major,
//! re/im pairs), eigenvalue cloud CSV/JSON with provenance, spectral-measure
//! JSON, and the request/response protocol of the density evaluator.
//!
//! CSV floats are printed with 17 significant digits, enough to round-trip
//! every double exactly.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densities::{self, LogGasParams};
use crate::ensembles::OrthoCase;
use crate::error::{Error, Result};
use crate::spectra::{EigenCloud, MatrixMeasure2, PointMeasure, Provenance};

/// 17-significant-digit decimal form of a double (exact round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON layout of a complex matrix: row-major entries as [re, im] pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Array2<Complex64>) -> Self {
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            entries: m.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Array2<Complex64>> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix with {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        Ok(Array2::from_shape_fn((self.rows, self.cols), |(i, j)| {
            let [re, im] = self.entries[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

pub fn matrix_to_json_string(m: &Array2<Complex64>) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(m)).expect("serializable")
}

pub fn matrix_from_json_str(s: &str) -> Result<Array2<Complex64>> {
    let mj: MatrixJson = serde_json::from_str(s)
        .map_err(|e| Error::InvalidParameter(format!("matrix JSON: {e}")))?;
    mj.to_matrix()
}

/// JSON layout of an eigenvalue cloud.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<(usize, usize)>,
    pub values: Vec<[f64; 2]>,
}

impl CloudJson {
    pub fn from_cloud(cloud: &EigenCloud) -> Self {
        CloudJson {
            provenance: cloud.provenance.clone(),
            stratum: cloud.stratum,
            values: cloud.values.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_cloud(&self) -> EigenCloud {
        EigenCloud {
            values: self
                .values
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
            stratum: self.stratum,
            provenance: self.provenance.clone(),
        }
    }
}

/// Single-cloud CSV: provenance header comment, then `re,im` rows.
pub fn cloud_to_csv(cloud: &EigenCloud) -> String {
    let mut out = String::new();
    if let Some(p) = &cloud.provenance {
        out.push_str(&format!(
            "# {}\n",
            serde_json::to_string(p).expect("serializable")
        ));
    }
    out.push_str("re,im\n");
    for z in &cloud.values {
        out.push_str(&format!("{},{}\n", fmt_f64(z.re), fmt_f64(z.im)));
    }
    out
}

/// Batch CSV of replicated clouds: provenance header, then `rep,re,im`.
pub fn clouds_to_csv(clouds: &[EigenCloud]) -> String {
    let mut out = String::new();
    if let Some(p) = clouds.first().and_then(|c| c.provenance.as_ref()) {
        let mut header = p.clone();
        header.rep = 0;
        out.push_str(&format!(
            "# {} reps={}\n",
            serde_json::to_string(&header).expect("serializable"),
            clouds.len()
        ));
    }
    out.push_str("rep,re,im\n");
    for (rep, cloud) in clouds.iter().enumerate() {
        for z in &cloud.values {
            out.push_str(&format!("{},{},{}\n", rep, fmt_f64(z.re), fmt_f64(z.im)));
        }
    }
    out
}

/// Parse a batch CSV back into per-rep value lists (provenance is not
/// recovered).
pub fn clouds_from_csv(s: &str) -> Result<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("rep,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::InvalidParameter(format!("bad CSV row: {line}")));
        }
        let rep: usize = fields[0]
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("bad rep index: {e}")))?;
        let re: f64 = fields[1]
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("bad re field: {e}")))?;
        let im: f64 = fields[2]
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("bad im field: {e}")))?;
        while out.len() <= rep {
            out.push(Vec::new());
        }
        out[rep].push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Batch JSON: shared provenance plus one value array per replica.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudBatchJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub clouds: Vec<Vec<[f64; 2]>>,
}

impl CloudBatchJson {
    pub fn from_clouds(clouds: &[EigenCloud]) -> Self {
        CloudBatchJson {
            provenance: clouds.first().and_then(|c| c.provenance.clone()),
            clouds: clouds
                .iter()
                .map(|c| c.values.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// JSON layout of a scalar spectral measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureJson {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl MeasureJson {
    pub fn from_measure(mu: &PointMeasure) -> Self {
        MeasureJson {
            nodes: mu.nodes.iter().map(|z| [z.re, z.im]).collect(),
            weights: mu.weights.clone(),
        }
    }

    pub fn to_measure(&self) -> Result<PointMeasure> {
        PointMeasure::new(
            self.nodes
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
            self.weights.clone(),
        )
    }
}

/// JSON layout of a 2x2 matrix measure: each weight is a row-major quadruple
/// of re/im pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixMeasureJson {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<[[f64; 2]; 4]>,
}

impl MatrixMeasureJson {
    pub fn from_measure(mm: &MatrixMeasure2) -> Self {
        MatrixMeasureJson {
            nodes: mm.nodes.iter().map(|z| [z.re, z.im]).collect(),
            weights: mm
                .weights
                .iter()
                .map(|w| {
                    [
                        [w.0[0][0].re, w.0[0][0].im],
                        [w.0[0][1].re, w.0[0][1].im],
                        [w.0[1][0].re, w.0[1][0].im],
                        [w.0[1][1].re, w.0[1][1].im],
                    ]
                })
                .collect(),
        }
    }
}

fn zs_from_pairs(zs: &[[f64; 2]]) -> Vec<Complex64> {
    zs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn default_weight_poly() -> Vec<f64> {
    vec![1.0]
}

fn default_kbt() -> f64 {
    1.0
}

/// One density-evaluation request row. `weight-poly` encodes the coupling
/// factor F (or G) as a polynomial in |prod z_j|: F(r) = sum_k c_k r^k.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "kebab-case")]
pub enum DensityRequest {
    TruncCircular {
        beta: f64,
        zs: Vec<[f64; 2]>,
    },
    TruncOrthogonal {
        beta: f64,
        a: f64,
        b: f64,
        zs: Vec<[f64; 2]>,
    },
    SpectralCircular {
        beta: f64,
        thetas: Vec<f64>,
        weights: Vec<f64>,
    },
    SpectralOrthogonal {
        case: OrthoCase,
        beta: f64,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
        thetas: Vec<f64>,
        weights: Vec<f64>,
    },
    NonidealCircular {
        beta: f64,
        zs: Vec<[f64; 2]>,
        #[serde(default = "default_weight_poly")]
        weight_poly: Vec<f64>,
    },
    NonidealOrthogonal {
        beta: f64,
        zs: Vec<[f64; 2]>,
        #[serde(default = "default_weight_poly")]
        weight_poly: Vec<f64>,
    },
    LogGas {
        gamma: f64,
        alpha: f64,
        #[serde(default = "default_kbt")]
        k_b_t: f64,
        zs: Vec<[f64; 2]>,
    },
}

/// Result row: the log density (or the energy for the log-gas formula),
/// the constants that entered, and a per-row error when the domain was
/// violated. A vanishing density reports `minus_infinity` instead of a
/// numeric value (JSON cannot carry -inf).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityResponse {
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_density: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub minus_infinity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub constants: serde_json::Value,
}

fn poly_eval(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

fn respond(formula: &str, value: Result<f64>, constants: serde_json::Value) -> DensityResponse {
    match value {
        Ok(v) if v == f64::NEG_INFINITY => DensityResponse {
            formula: formula.to_string(),
            log_density: None,
            minus_infinity: true,
            error: None,
            constants,
        },
        Ok(v) => DensityResponse {
            formula: formula.to_string(),
            log_density: Some(v),
            minus_infinity: false,
            error: None,
            constants,
        },
        Err(e) => DensityResponse {
            formula: formula.to_string(),
            log_density: None,
            minus_infinity: false,
            error: Some(e.to_string()),
            constants: serde_json::Value::Null,
        },
    }
}

/// Evaluate one density request.
pub fn evaluate_density(req: &DensityRequest) -> DensityResponse {
    match req {
        DensityRequest::TruncCircular { beta, zs } => {
            let zs = zs_from_pairs(zs);
            let value = densities::log_density_trunc_circular(&zs, *beta);
            respond("trunc-circular", value, serde_json::Value::Null)
        }
        DensityRequest::TruncOrthogonal { beta, a, b, zs } => {
            let zs = zs_from_pairs(zs);
            let n = zs.len();
            let value = crate::spectra::stratify(&EigenCloud::new(zs), None)
                .and_then(|cloud| densities::log_density_trunc_orthogonal(&cloud, *beta, *a, *b));
            let constants = densities::ln_p_trunc_orthogonal(n, *beta, *a, *b)
                .map(|lnp| serde_json::json!({ "ln_p": lnp }))
                .unwrap_or(serde_json::Value::Null);
            respond("trunc-orthogonal", value, constants)
        }
        DensityRequest::SpectralCircular {
            beta,
            thetas,
            weights,
        } => {
            let n = thetas.len();
            let value = densities::log_density_spectral_circular(thetas, weights, *beta);
            let constants = match (
                densities::ln_z_circular(n, *beta),
                densities::ln_z_prime_circular(n, *beta),
            ) {
                (Ok(z), Ok(zp)) => serde_json::json!({ "ln_z": z, "ln_z_prime": zp }),
                _ => serde_json::Value::Null,
            };
            respond("spectral-circular", value, constants)
        }
        DensityRequest::SpectralOrthogonal {
            case,
            beta,
            a,
            b,
            thetas,
            weights,
        } => {
            let data = densities::OrthoSpectralData {
                thetas: thetas.clone(),
                weights: weights.clone(),
            };
            let (av, bv) = (a.unwrap_or(-0.5), b.unwrap_or(-0.5));
            let value = densities::log_density_spectral_orthogonal(&data, *case, *beta, av, bv);
            respond("spectral-orthogonal", value, serde_json::Value::Null)
        }
        DensityRequest::NonidealCircular {
            beta,
            zs,
            weight_poly,
        } => {
            let zs = zs_from_pairs(zs);
            let value =
                densities::log_density_nonideal_circular(&zs, *beta, |r| poly_eval(weight_poly, r));
            respond("nonideal-circular", value, serde_json::Value::Null)
        }
        DensityRequest::NonidealOrthogonal {
            beta,
            zs,
            weight_poly,
        } => {
            let zs = zs_from_pairs(zs);
            let value = crate::spectra::stratify(&EigenCloud::new(zs), None).and_then(|cloud| {
                densities::log_density_nonideal_orthogonal(&cloud, *beta, |r| {
                    poly_eval(weight_poly, r)
                })
            });
            respond("nonideal-orthogonal", value, serde_json::Value::Null)
        }
        DensityRequest::LogGas {
            gamma,
            alpha,
            k_b_t,
            zs,
        } => {
            let zs = zs_from_pairs(zs);
            let value = LogGasParams::from_exponents(*gamma, *alpha, *k_b_t)
                .and_then(|params| densities::log_gas_energy(&zs, &params))
                .map(|h| {
                    if h == f64::INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        h
                    }
                });
            let constants = serde_json::json!({ "gamma": gamma, "alpha": alpha });
            respond("log-gas", value, constants)
        }
    }
}

/// A density batch: one request per row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityBatch {
    pub rows: Vec<DensityRequest>,
}

/// Evaluate a batch, one response per row (errors stay per-row).
pub fn evaluate_density_batch(batch: &DensityBatch) -> Vec<DensityResponse> {
    batch.rows.iter().map(evaluate_density).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};

    #[test]
    fn matrix_json_roundtrip() {
        let m = Array2::from_shape_fn((2, 3), |(i, j)| c(i as f64, j as f64 + 0.5));
        let s = matrix_to_json_string(&m);
        let back = matrix_from_json_str(&s).unwrap();
        assert_eq!(m, back);

        let bad = r#"{"rows": 2, "cols": 2, "entries": [[1.0, 0.0]]}"#;
        assert!(matrix_from_json_str(bad).is_err());
    }

    #[test]
    fn csv_roundtrip_and_digits() {
        let cloud = EigenCloud::new(vec![c(0.1, -0.2), c(1.0 / 3.0, 2.0 / 7.0)]);
        let csv = clouds_to_csv(&[cloud.clone(), cloud.clone()]);
        let parsed = clouds_from_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 2);
        for rep in parsed {
            assert_eq!(rep, cloud.values); // exact round-trip at 17 digits
        }
        assert!(fmt_f64(1.0 / 3.0).contains("3.333333333333333"));
    }

    #[test]
    fn density_protocol() {
        // n=1, beta=2: log(1/pi)
        let req = DensityRequest::TruncCircular {
            beta: 2.0,
            zs: vec![[0.25, -0.1]],
        };
        let resp = evaluate_density(&req);
        assert!(resp.error.is_none());
        let v = resp.log_density.unwrap();
        assert!((v - (1.0 / std::f64::consts::PI).ln()).abs() < 1e-14);

        // coincident pair: minus infinity
        let req = DensityRequest::TruncCircular {
            beta: 2.0,
            zs: vec![[0.25, 0.1], [0.25, 0.1]],
        };
        let resp = evaluate_density(&req);
        assert!(resp.minus_infinity);
        assert!(resp.log_density.is_none());

        // domain violation reported per-row in a batch
        let batch = DensityBatch {
            rows: vec![
                DensityRequest::TruncCircular {
                    beta: 2.0,
                    zs: vec![[2.0, 0.0]],
                },
                DensityRequest::TruncCircular {
                    beta: 2.0,
                    zs: vec![[0.0, 0.0]],
                },
            ],
        };
        let resps = evaluate_density_batch(&batch);
        assert!(resps[0].error.is_some());
        assert!(resps[1].error.is_none());

        // json round-trips through serde
        let s = serde_json::to_string(&batch).unwrap();
        let back: DensityBatch = serde_json::from_str(&s).unwrap();
        assert_eq!(back.rows.len(), 2);
    }

    #[test]
    fn measure_json_roundtrip() {
        let mu = PointMeasure::new(vec![cr(1.0), cr(-1.0)], vec![0.5, 0.5]).unwrap();
        let j = MeasureJson::from_measure(&mu);
        let back = j.to_measure().unwrap();
        assert!(mu.distance(&back).unwrap() < 1e-15);
    }
}
