//! Estimators over lattice fields: blocked moment estimates, the
//! float-to-rational bridge into the exact Appell pipeline, split-sample
//! centredness z-scores, the subsampling variance-scaling table, spectral
//! slope fits, and the empirical Appell-versus-Hermite comparison.

use mirs_core::appell::{appell_from_moments, hermite, AppellPolynomial, MomentSequence};
use mirs_core::error::{Error, Result};
use num::{BigInt, BigRational, Signed, ToPrimitive};

use crate::config::SimConfig;
use crate::field::{FieldTag, LatticeField};
use crate::solve::solve_linear;
use crate::spectral::{
    mode_tuples, mollifier, parabolic_frequency, power_spectrum, synthesize_noise_seeded,
};

/// Raw moment averages with block standard errors; index j holds the j-th
/// moment, with the zeroth pinned to one.
#[derive(Debug, Clone)]
pub struct MomentEstimates {
    pub means: Vec<f64>,
    pub ses: Vec<f64>,
}

fn block_bounds(len: usize, blocks: usize, b: usize) -> (usize, usize) {
    (b * len / blocks, (b + 1) * len / blocks)
}

/// Spatial-temporal power averages with block-resampled standard errors;
/// blocks are consecutive time slabs.
pub fn estimate_moments(
    field: &LatticeField,
    k_max: usize,
    block_count: usize,
) -> Result<MomentEstimates> {
    if k_max > 8 {
        return Err(Error::validation(format!(
            "moment degree {k_max} exceeds the supported 8"
        )));
    }
    if block_count < 8 {
        return Err(Error::validation(format!(
            "{block_count} blocks are too few for error bars; need at least 8"
        )));
    }
    let grid_t = field.config().grid_t;
    if grid_t < block_count {
        return Err(Error::validation(format!(
            "cannot split {grid_t} time slices into {block_count} blocks"
        )));
    }
    let slab = field.len() / grid_t;
    let mut block_means = vec![vec![0.0f64; block_count]; k_max + 1];
    for b in 0..block_count {
        let (t0, t1) = block_bounds(grid_t, block_count, b);
        let chunk = &field.values()[t0 * slab..t1 * slab];
        let inv = 1.0 / chunk.len() as f64;
        for &v in chunk {
            let mut p = 1.0;
            for km in block_means.iter_mut() {
                km[b] += p * inv;
                p *= v;
            }
        }
    }
    let mut means = Vec::with_capacity(k_max + 1);
    let mut ses = Vec::with_capacity(k_max + 1);
    for (k, blocks) in block_means.iter().enumerate() {
        let mean = blocks.iter().sum::<f64>() / block_count as f64;
        let var = blocks
            .iter()
            .map(|m| (m - mean) * (m - mean))
            .sum::<f64>()
            / (block_count - 1) as f64;
        means.push(if k == 0 { 1.0 } else { mean });
        ses.push(if k == 0 {
            0.0
        } else {
            (var / block_count as f64).sqrt()
        });
    }
    Ok(MomentEstimates { means, ses })
}

/// Best rational approximation with denominator at most `max_denom`, by the
/// continued-fraction convergents of the input.
pub fn rationalize(x: f64, max_denom: u64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::validation(format!("cannot rationalize {x}")));
    }
    if max_denom == 0 {
        return Err(Error::validation("denominator bound must be positive"));
    }
    let negative = x < 0.0;
    let mut value = x.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut q) = (value.floor() as i128, 1i128);
    for _ in 0..64 {
        let frac = value - value.floor();
        if frac < 1e-15 {
            break;
        }
        value = 1.0 / frac;
        let a = value.floor() as i128;
        let p_next = a * p + p_prev;
        let q_next = a * q + q_prev;
        if q_next > max_denom as i128 || p_next.abs() > i64::MAX as i128 {
            break;
        }
        (p_prev, q_prev) = (p, q);
        (p, q) = (p_next, q_next);
    }
    let mut out = BigRational::new(BigInt::from(p), BigInt::from(q));
    if negative {
        out = -out;
    }
    Ok(out)
}

/// Rounds blocked moment estimates into an exact moment sequence; the bridge
/// into the algebraic pipeline uses denominators at most one million.
pub fn empirical_moments(est: &MomentEstimates, max_denom: u64) -> Result<MomentSequence> {
    let mut m = Vec::with_capacity(est.means.len());
    m.push(BigRational::from_integer(BigInt::from(1)));
    for mean in est.means.iter().skip(1) {
        m.push(rationalize(*mean, max_denom)?);
    }
    MomentSequence::new(m)
}

fn poly_as_f64(poly: &AppellPolynomial) -> Result<Vec<f64>> {
    poly.coefficients()
        .iter()
        .map(|c| {
            c.to_f64()
                .ok_or_else(|| Error::validation("coefficient overflows f64"))
        })
        .collect()
}

fn eval_f64(coeffs: &[f64], x: f64) -> f64 {
    let mut out = 0.0;
    for c in coeffs.iter().rev() {
        out = out * x + c;
    }
    out
}

fn fitted_coefficients(field: &LatticeField, k: usize) -> Result<Vec<f64>> {
    let est = estimate_moments(field, k, 8)?;
    let moments = empirical_moments(&est, 1_000_000)?;
    poly_as_f64(&appell_from_moments(&moments, k as u32)?)
}

fn field_average(coeffs: &[f64], field: &LatticeField) -> f64 {
    field.values().iter().map(|&v| eval_f64(coeffs, v)).sum::<f64>() / field.len() as f64
}

fn regenerate(cfg: &SimConfig, tag: FieldTag, seed: u64) -> Result<LatticeField> {
    let zeta = synthesize_noise_seeded(cfg, seed)?;
    match tag {
        FieldTag::Zeta => Ok(zeta),
        FieldTag::Z => solve_linear(&zeta),
        FieldTag::Zeps => Err(Error::validation(
            "cannot replicate a rescaled field from its config alone",
        )),
    }
}

/// Split-sample centredness: the adapted polynomial is built from moments of
/// the first field and averaged over the second, independent field; the
/// z-score is that average over its standard error. The standard error comes
/// from independent replicas of the statistic redrawn from the known
/// synthesis law, because blocks within one field cannot resolve the slow
/// large-scale modes that dominate the solution field. Fitting and testing
/// on the same sample is tautological (the average then reproduces the
/// identically-zero formal mean up to rounding), which is why two
/// independent fields are required here.
pub fn centredness_test(field_a: &LatticeField, field_b: &LatticeField, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::validation("centredness degree must be positive"));
    }
    if field_a.config().seed == field_b.config().seed && field_a.config() == field_b.config() {
        return Err(Error::validation(
            "split-sample test needs fields from independent seeds",
        ));
    }
    let coeffs = fitted_coefficients(field_a, k)?;
    let observed = field_average(&coeffs, field_b);

    let replicas = 24u64;
    let base = field_a
        .config()
        .seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        ^ field_b.config().seed.rotate_left(17);
    let mut xs = Vec::with_capacity(replicas as usize);
    for r in 0..replicas {
        let a = regenerate(field_a.config(), field_a.tag(), base.wrapping_add(2 * r + 1))?;
        let b = regenerate(field_b.config(), field_b.tag(), base.wrapping_add(2 * r + 2))?;
        let c = fitted_coefficients(&a, k)?;
        xs.push(field_average(&c, &b));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::validation("degenerate law: zero replica spread"));
    }
    Ok(observed / sd)
}

/// The tautological same-sample control: evaluating the polynomial on the
/// sample that produced its moments returns a mean that vanishes by algebra
/// (up to the float-to-rational rounding), demonstrating that split samples
/// are what make the z-score informative.
pub fn same_sample_mean(field: &LatticeField, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::validation("centredness degree must be positive"));
    }
    let coeffs = fitted_coefficients(field, k)?;
    Ok(field_average(&coeffs, field))
}

/// Ensemble variant of the split-sample test: fields are consumed in fixed
/// order as (fit, test) pairs, each pair yields one independent sample of
/// the tested average, and the z-score is the sample mean over its standard
/// error. Pairing keeps the fit error inside each sample, so the spread
/// across pairs measures the full variability of the statistic.
pub fn paired_centredness(fields: &[LatticeField], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::validation("centredness degree must be positive"));
    }
    if fields.len() < 4 {
        return Err(Error::validation("need at least four fields (two pairs)"));
    }
    let mut xs = Vec::with_capacity(fields.len() / 2);
    for pair in fields.chunks_exact(2) {
        let coeffs = fitted_coefficients(&pair[0], k)?;
        xs.push(field_average(&coeffs, &pair[1]));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    if se == 0.0 {
        return Err(Error::validation("degenerate ensemble: zero standard error"));
    }
    Ok(mean / se)
}

/// One row of the variance-scaling table.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub eps: BigRational,
    pub ratio: f64,
    pub expected: f64,
    pub se: f64,
}

fn dyadic_inverse(eps: &BigRational) -> Option<u64> {
    if eps.numer() != &BigInt::from(1) || !eps.is_positive() {
        return None;
    }
    let den = eps.denom().to_u64()?;
    den.is_power_of_two().then_some(den)
}

/// Variance of the rescaled field against the prediction `eps^(2 alpha)`:
/// the rescaled field is realized by subsampling with parabolic strides
/// (inverse eps squared in time, inverse eps in space) and scaling by
/// `eps^alpha`; stationarity makes the choice of offsets immaterial, and the
/// reported standard error comes from time blocks of the subsample.
pub fn variance_scaling_check(
    field: &LatticeField,
    alpha: &BigRational,
    eps_list: &[BigRational],
) -> Result<Vec<ScalingRow>> {
    let cfg = field.config();
    let alpha_f = alpha
        .to_f64()
        .ok_or_else(|| Error::validation("alpha overflows f64"))?;
    let full_var = field.variance();
    if full_var == 0.0 {
        return Err(Error::validation("degenerate field: zero variance"));
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let den = dyadic_inverse(eps).ok_or_else(|| {
            Error::validation(format!("eps = {eps} is not a dyadic ratio 1/2^j"))
        })?;
        let stride_t = (den * den) as usize;
        let stride_x = den as usize;
        if cfg.grid_t % stride_t != 0 || cfg.grid_x % stride_x != 0 {
            return Err(Error::validation(format!(
                "eps = {eps} is incompatible with the {}x{} lattice",
                cfg.grid_t, cfg.grid_x
            )));
        }
        let sub = subsample(field, stride_t, stride_x);
        let eps_f = 1.0 / den as f64;
        let factor = eps_f.powf(2.0 * alpha_f);
        let (sub_var, sub_var_se) = blocked_variance(&sub, 8);
        let ratio = factor * sub_var / full_var;
        let se = factor * sub_var_se / full_var;
        rows.push(ScalingRow {
            eps: eps.clone(),
            ratio,
            expected: factor,
            se,
        });
    }
    Ok(rows)
}

fn subsample(field: &LatticeField, stride_t: usize, stride_x: usize) -> Vec<f64> {
    let cfg = field.config();
    let shape = cfg.shape();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; shape.len()];
    let values = field.values();
    'outer: loop {
        let keep = tuple[0] % stride_t == 0
            && tuple[1..].iter().all(|&x| x % stride_x == 0);
        if keep {
            let mut flat = 0;
            for (axis, &len) in shape.iter().enumerate() {
                flat = flat * len + tuple[axis];
            }
            out.push(values[flat]);
        }
        for axis in (0..shape.len()).rev() {
            tuple[axis] += 1;
            if tuple[axis] < shape[axis] {
                continue 'outer;
            }
            tuple[axis] = 0;
            if axis == 0 {
                break 'outer;
            }
        }
    }
    out
}

fn blocked_variance(values: &[f64], blocks: usize) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / values.len() as f64;
    let mut block_vars = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (lo, hi) = block_bounds(values.len(), blocks, b);
        let chunk = &values[lo..hi];
        if chunk.is_empty() {
            continue;
        }
        let bv = chunk.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / chunk.len() as f64;
        block_vars.push(bv);
    }
    let b = block_vars.len() as f64;
    let bmean = block_vars.iter().sum::<f64>() / b;
    let sd = (block_vars
        .iter()
        .map(|v| (v - bmean) * (v - bmean))
        .sum::<f64>()
        / (b - 1.0))
        .sqrt();
    (var, sd / b.sqrt())
}

/// Least-squares spectral slope over log shells.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
}

/// Fits the decay exponent of the noise spectrum: per-mode power with the
/// mollifier divided out is shell-averaged in the parabolic magnitude, one
/// log-log line is fitted per field, and the spread across independent
/// fields gives the standard error.
pub fn fit_spectral_slope(fields: &[LatticeField]) -> Result<SlopeFit> {
    if fields.len() < 2 {
        return Err(Error::validation("need at least two fields for a slope fit"));
    }
    let cfg = fields[0].config().clone();
    let geometry = shell_geometry(&cfg);
    let mut slopes = Vec::with_capacity(fields.len());
    for field in fields {
        if !field.config().same_lattice(&cfg) {
            return Err(Error::validation("slope fit requires one common lattice"));
        }
        slopes.push(single_field_slope(field, &geometry));
    }
    let n = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let sd = (slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    Ok(SlopeFit {
        slope: mean,
        stderr: sd / n.sqrt(),
    })
}

struct ShellGeometry {
    /// Shell id per mode; usize::MAX marks excluded modes.
    assignment: Vec<usize>,
    /// Mean log parabolic frequency per shell.
    log_centers: Vec<f64>,
    /// Mollifier value per mode, for dividing out of the power.
    weights: Vec<f64>,
}

fn shell_geometry(cfg: &SimConfig) -> ShellGeometry {
    let shells = 12usize;
    let mut qps = Vec::with_capacity(cfg.sites());
    for tuple in mode_tuples(cfg) {
        qps.push(parabolic_frequency(cfg, &tuple));
    }
    // Exclude the zero mode and the far tail where the mollifier is tiny and
    // dividing it out would amplify noise.
    let included: Vec<bool> = qps
        .iter()
        .map(|&qp| qp > 0.0 && mollifier(cfg, qp) > 1e-2)
        .collect();
    let lo = qps
        .iter()
        .zip(&included)
        .filter(|&(_, &inc)| inc)
        .map(|(&qp, _)| qp)
        .fold(f64::INFINITY, f64::min)
        .ln();
    let hi = qps
        .iter()
        .zip(&included)
        .filter(|&(_, &inc)| inc)
        .map(|(&qp, _)| qp)
        .fold(0.0f64, f64::max)
        .ln();
    let width = (hi - lo) / shells as f64;
    let mut assignment = vec![usize::MAX; qps.len()];
    let mut log_sums = vec![0.0f64; shells];
    let mut counts = vec![0usize; shells];
    let mut weights = vec![0.0f64; qps.len()];
    for (flat, &qp) in qps.iter().enumerate() {
        if !included[flat] {
            continue;
        }
        let mut shell = ((qp.ln() - lo) / width) as usize;
        if shell >= shells {
            shell = shells - 1;
        }
        assignment[flat] = shell;
        log_sums[shell] += qp.ln();
        counts[shell] += 1;
        weights[flat] = mollifier(cfg, qp);
    }
    let log_centers = log_sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { f64::NAN })
        .collect();
    ShellGeometry {
        assignment,
        log_centers,
        weights,
    }
}

fn single_field_slope(field: &LatticeField, geometry: &ShellGeometry) -> f64 {
    let power = power_spectrum(field);
    let shells = geometry.log_centers.len();
    let mut sums = vec![0.0f64; shells];
    let mut counts = vec![0usize; shells];
    for (flat, &p) in power.iter().enumerate() {
        let shell = geometry.assignment[flat];
        if shell == usize::MAX {
            continue;
        }
        sums[shell] += p / geometry.weights[flat];
        counts[shell] += 1;
    }
    let points: Vec<(f64, f64)> = (0..shells)
        .filter(|&sh| counts[sh] >= 4)
        .map(|sh| (geometry.log_centers[sh], (sums[sh] / counts[sh] as f64).ln()))
        .collect();
    ols_slope(&points)
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let sxx = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    sxy / sxx
}

/// One coefficient comparison between the empirically adapted polynomial and
/// the Hermite prediction.
#[derive(Debug, Clone)]
pub struct CoeffRow {
    pub k: u32,
    pub j: usize,
    pub appell: f64,
    pub hermite: f64,
    pub se: f64,
}

/// Builds adapted polynomials from each field's rationalized moments and
/// compares every coefficient against the Hermite polynomial for the pooled
/// empirical variance; the spread across fields gives the standard errors.
pub fn appell_hermite_rows(fields: &[LatticeField], k_max: u32) -> Result<Vec<CoeffRow>> {
    if fields.len() < 2 {
        return Err(Error::validation("need at least two fields"));
    }
    let mut per_field: Vec<Vec<Vec<f64>>> = Vec::with_capacity(fields.len());
    let mut pooled_m2 = 0.0f64;
    for field in fields {
        let est = estimate_moments(field, k_max as usize, 8)?;
        pooled_m2 += est.means[2] / fields.len() as f64;
        let moments = empirical_moments(&est, 1_000_000)?;
        let mut polys = Vec::with_capacity(k_max as usize);
        for k in 1..=k_max {
            polys.push(poly_as_f64(&appell_from_moments(&moments, k)?)?);
        }
        per_field.push(polys);
    }
    let sigma2 = rationalize(pooled_m2, 1_000_000)?;
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let target = poly_as_f64(&hermite(k, &sigma2))?;
        for j in 0..k as usize {
            let samples: Vec<f64> = per_field
                .iter()
                .map(|polys| polys[k as usize - 1][j])
                .collect();
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let sd =
                (samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
            rows.push(CoeffRow {
                k,
                j,
                appell: mean,
                hermite: target[j],
                se: sd / n.sqrt(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldTag;
    use crate::solve::solve_linear;
    use crate::spectral::synthesize_noise_seeded;
    use mirs_core::ratio::rat;

    fn lab() -> SimConfig {
        let mut cfg = SimConfig::default_lab();
        cfg.grid_t = 64;
        cfg.grid_x = 64;
        cfg
    }

    fn z_field(seed: u64) -> LatticeField {
        let cfg = lab();
        solve_linear(&synthesize_noise_seeded(&cfg, seed).unwrap()).unwrap()
    }

    #[test]
    fn rationalize_hits_simple_fractions() {
        assert_eq!(rationalize(0.5, 1_000_000).unwrap(), rat(1, 2));
        assert_eq!(rationalize(-0.25, 1_000_000).unwrap(), rat(-1, 4));
        assert_eq!(rationalize(3.0, 10).unwrap(), rat(3, 1));
        let pi = rationalize(std::f64::consts::PI, 1_000_000).unwrap();
        let err = (pi.to_f64().unwrap() - std::f64::consts::PI).abs();
        assert!(err < 1e-9);
        assert!(pi.denom() <= &BigInt::from(1_000_000));
        // Tight denominator bound recovers the classical convergent 22/7.
        assert_eq!(rationalize(std::f64::consts::PI, 10).unwrap(), rat(22, 7));
    }

    #[test]
    fn moments_of_a_synthetic_unit_variance_field() {
        // Deterministic +/-1 pattern with exact unit variance.
        let mut cfg = lab();
        cfg.grid_t = 16;
        cfg.grid_x = 16;
        let values: Vec<f64> = (0..cfg.sites())
            .map(|i| if (i / 3) % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let field = LatticeField::new(cfg, FieldTag::Z, values).unwrap();
        let est = estimate_moments(&field, 4, 8).unwrap();
        assert_eq!(est.means[0], 1.0);
        assert!((est.means[2] - 1.0).abs() <= 3.0 * est.ses[2] + 1e-12);
        assert!((est.means[4] - 1.0).abs() <= 3.0 * est.ses[4] + 1e-12);
    }

    #[test]
    fn gaussian_field_moment_structure() {
        // Within-field moment estimates need a fast-mixing field: the noise
        // has many comparable modes, unlike the infrared-dominated solution.
        let cfg = lab();
        let zeta = synthesize_noise_seeded(&cfg, 11).unwrap();
        let est = estimate_moments(&zeta, 4, 16).unwrap();
        // Odd moment near zero, kurtosis near 3 m2^2.
        assert!(est.means[3].abs() < 3.0 * est.ses[3]);
        let m2 = est.means[2];
        assert!((est.means[4] / (m2 * m2) - 3.0).abs() < 0.5);
    }

    #[test]
    fn moment_validation_errors() {
        let z = z_field(1);
        assert!(estimate_moments(&z, 9, 8).is_err());
        assert!(estimate_moments(&z, 4, 4).is_err());
    }

    #[test]
    fn split_sample_centredness_is_small() {
        let a = z_field(21);
        let b = z_field(22);
        for k in 1..=4 {
            let z = centredness_test(&a, &b, k).unwrap();
            assert!(z.abs() < 3.0, "k={k}: z={z}");
        }
    }

    #[test]
    fn paired_centredness_over_an_ensemble() {
        let fields: Vec<LatticeField> = (0..12).map(|i| z_field(100 + i)).collect();
        for k in 1..=5 {
            let z = paired_centredness(&fields, k).unwrap();
            assert!(z.abs() < 3.0, "k={k}: z={z}");
        }
        assert!(paired_centredness(&fields[..2], 2).is_err());
    }

    #[test]
    fn same_seed_pair_is_rejected() {
        let a = z_field(33);
        let b = z_field(33);
        assert!(centredness_test(&a, &b, 2).is_err());
    }

    #[test]
    fn same_sample_mean_is_tautologically_zero() {
        let a = z_field(31);
        let sd = a.variance().sqrt();
        for k in 1..=4 {
            let mean = same_sample_mean(&a, k).unwrap();
            // Zero by algebra, up to the float-to-rational rounding.
            assert!(mean.abs() < 1e-4 * sd.powi(k as i32).max(1e-9), "k={k}: {mean}");
        }
    }

    #[test]
    fn variance_scaling_identity_and_decay() {
        let z = z_field(41);
        let alpha = rat(-11, 20);
        let eps = [rat(1, 1), rat(1, 2), rat(1, 4)];
        let rows = variance_scaling_check(&z, &alpha, &eps).unwrap();
        assert_eq!(rows[0].ratio, 1.0);
        assert_eq!(rows[0].expected, 1.0);
        for row in &rows {
            assert!((row.ratio - row.expected).abs() <= 3.0 * row.se.max(1e-12),
                "eps={}: ratio {} expected {} se {}", row.eps, row.ratio, row.expected, row.se);
        }
        // eps^(2 alpha) increases as eps decreases for negative alpha.
        assert!(rows[1].expected > rows[0].expected);
        assert!(rows[2].expected > rows[1].expected);
    }

    #[test]
    fn incompatible_eps_is_rejected() {
        let z = z_field(51);
        let alpha = rat(-11, 20);
        assert!(variance_scaling_check(&z, &alpha, &[rat(1, 3)]).is_err());
        assert!(variance_scaling_check(&z, &alpha, &[rat(1, 16)]).is_err());
        assert!(variance_scaling_check(&z, &alpha, &[rat(2, 1)]).is_err());
    }

    #[test]
    fn spectral_slope_recovers_the_decay() {
        let cfg = lab();
        let fields: Vec<LatticeField> = (0..32)
            .map(|i| synthesize_noise_seeded(&cfg, 600 + i).unwrap())
            .collect();
        let fit = fit_spectral_slope(&fields).unwrap();
        let target = -2.0 * cfg.s;
        assert!(
            (fit.slope - target).abs() < 0.15,
            "slope {} vs {}",
            fit.slope,
            target
        );
    }

    #[test]
    fn empirical_appell_matches_hermite() {
        let fields: Vec<LatticeField> = (0..16).map(|i| z_field(700 + i)).collect();
        let rows = appell_hermite_rows(&fields, 4).unwrap();
        for row in &rows {
            assert!(
                (row.appell - row.hermite).abs() <= 3.0 * row.se.max(1e-12),
                "k={} j={}: {} vs {} (se {})",
                row.k,
                row.j,
                row.appell,
                row.hermite,
                row.se
            );
        }
    }
}
