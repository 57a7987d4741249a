//! Lab orchestration: drives a deterministic ensemble of noise realizations
//! through the linear solve and the estimators, reduces in seed order, and
//! serializes one JSON report; also raw field dumps with a JSON sidecar.

use std::io::{Read as _, Write as _};
use std::path::Path;

use mirs_core::error::{Error, Result};
use mirs_core::ratio::format_rational;
use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::field::{FieldTag, LatticeField};
use crate::solve::solve_linear;
use crate::spectral::synthesize_noise_seeded;
use crate::stats::{
    estimate_moments, fit_spectral_slope, paired_centredness, variance_scaling_check,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SlopeFitReport {
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentReport {
    pub k: usize,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CentrednessReport {
    pub k: usize,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingReport {
    pub eps: String,
    pub ratio: f64,
    pub expected: f64,
}

/// One full lab run, ready for JSON emission.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub config: SimConfig,
    pub note: String,
    pub slope_fit: SlopeFitReport,
    pub moments: Vec<MomentReport>,
    pub centredness: Vec<CentrednessReport>,
    pub variance_scaling: Vec<ScalingReport>,
}

/// Synthesizes `n_fields` realizations with seeds `seed, seed+1, ...` and
/// reduces every estimator in that fixed order, so a report depends only on
/// the config; `alpha` feeds the variance-scaling prediction.
pub fn run_lab(cfg: &SimConfig, n_fields: usize, alpha: &BigRational) -> Result<SimReport> {
    if n_fields < 4 {
        return Err(Error::validation("need at least four fields for a lab run"));
    }
    let mut noises = Vec::with_capacity(n_fields);
    let mut solutions = Vec::with_capacity(n_fields);
    for i in 0..n_fields {
        let zeta = synthesize_noise_seeded(cfg, cfg.seed + i as u64)?;
        solutions.push(solve_linear(&zeta)?);
        noises.push(zeta);
    }
    let slope = fit_spectral_slope(&noises)?;

    let mut moments = Vec::new();
    {
        // Per-field averages are independent samples; reduce across fields.
        let mut field_means: Vec<Vec<f64>> = vec![Vec::new(); 5];
        for z in &solutions {
            let est = estimate_moments(z, 4, 8)?;
            for k in 1..=4 {
                field_means[k].push(est.means[k]);
            }
        }
        for (k, samples) in field_means.iter().enumerate().skip(1) {
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let sd = (samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n - 1.0))
                .sqrt();
            moments.push(MomentReport {
                k,
                mean,
                se: sd / n.sqrt(),
            });
        }
    }

    let mut centredness = Vec::new();
    for k in 1..=5 {
        let z = paired_centredness(&solutions, k)?;
        centredness.push(CentrednessReport { k, z });
    }

    let eps_list = scaling_grid(cfg);
    let rows = variance_scaling_check(&solutions[0], alpha, &eps_list)?;
    let variance_scaling = rows
        .into_iter()
        .map(|r| ScalingReport {
            eps: format_rational(&r.eps),
            ratio: r.ratio,
            expected: r.expected,
        })
        .collect();

    Ok(SimReport {
        config: cfg.clone(),
        note: cfg.dimension_note(),
        slope_fit: SlopeFitReport {
            slope: slope.slope,
            stderr: slope.stderr,
        },
        moments,
        centredness,
        variance_scaling,
    })
}

/// The dyadic ratios 1, 1/2, ... that the lattice supports, down to 1/4.
pub fn scaling_grid(cfg: &SimConfig) -> Vec<BigRational> {
    let mut out = Vec::new();
    let mut den = 1u64;
    while den <= 4 && cfg.grid_t % (den * den) as usize == 0 && cfg.grid_x % den as usize == 0 {
        out.push(BigRational::new(1.into(), den.into()));
        den *= 2;
    }
    out
}

pub fn report_to_json(report: &SimReport) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::validation(format!("report serialization failed: {e}")))
}

/// Writes raw values as little-endian f64 next to a JSON sidecar carrying
/// the config and tag, so a dump is self-describing.
pub fn dump_field(field: &LatticeField, path: &Path) -> Result<()> {
    let mut raw = Vec::with_capacity(field.len() * 8);
    for v in field.values() {
        raw.extend_from_slice(&v.to_le_bytes());
    }
    let io = |e: std::io::Error| Error::validation(format!("field dump failed: {e}"));
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(&raw).map_err(io)?;
    let sidecar = serde_json::json!({
        "config": field.config(),
        "tag": field.tag().to_string(),
        "count": field.len(),
    });
    std::fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&sidecar).map_err(|e| Error::validation(e.to_string()))?,
    )
    .map_err(io)
}

pub fn load_field(path: &Path) -> Result<LatticeField> {
    let io = |e: std::io::Error| Error::validation(format!("field load failed: {e}"));
    let sidecar: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(sidecar_path(path)).map_err(io)?,
    )
    .map_err(|e| Error::validation(format!("bad sidecar: {e}")))?;
    let cfg: SimConfig = serde_json::from_value(sidecar["config"].clone())
        .map_err(|e| Error::validation(format!("bad sidecar config: {e}")))?;
    let tag = match sidecar["tag"].as_str() {
        Some("zeta") => FieldTag::Zeta,
        Some("Z") => FieldTag::Z,
        Some("Zeps") => FieldTag::Zeps,
        other => {
            return Err(Error::validation(format!("bad sidecar tag: {other:?}")));
        }
    };
    let mut raw = Vec::new();
    std::fs::File::open(path)
        .map_err(io)?
        .read_to_end(&mut raw)
        .map_err(io)?;
    if raw.len() % 8 != 0 {
        return Err(Error::validation("field dump is not a multiple of 8 bytes"));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    LatticeField::new(cfg, tag, values)
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    os.into()
}
