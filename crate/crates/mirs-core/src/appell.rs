//! Law-adapted monic polynomial sequences: built from a moment sequence via
//! the reciprocal generating series, specialized to the Gaussian recurrence
//! as an oracle, rescaled exactly, and composed with finitely supported
//! series by the derivative formula.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::params::StructureParams;
use crate::poly::{Poly, Symbol};
use crate::ratio::{binomial, factorial, format_rational, rat_int, rational_pow};
use crate::series::FormalSeries;

/// Exact moments `m_0 = 1, m_1, ..., m_K` of a scalar law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    m: Vec<BigRational>,
}

impl MomentSequence {
    pub fn new(m: Vec<BigRational>) -> Result<Self> {
        match m.first() {
            Some(first) if first.is_one() => Ok(MomentSequence { m }),
            Some(first) => Err(Error::validation(format!(
                "a moment sequence starts at m_0 = 1, got {}",
                format_rational(first)
            ))),
            None => Err(Error::validation("a moment sequence must not be empty")),
        }
    }

    /// Centred Gaussian moments `m_{2j} = (2j-1)!! * sigma2^j` up to `m_K`.
    pub fn gaussian(sigma2: &BigRational, max_degree: u32) -> Self {
        let mut m = vec![BigRational::one()];
        for j in 1..=max_degree as usize {
            if j % 2 == 1 {
                m.push(BigRational::zero());
            } else {
                let prev = m[j - 2].clone();
                m.push(prev * rat_int(j as i64 - 1) * sigma2);
            }
        }
        MomentSequence { m }
    }

    pub fn moments(&self) -> &[BigRational] {
        &self.m
    }

    /// Largest degree the sequence covers.
    pub fn max_degree(&self) -> u32 {
        (self.m.len() - 1) as u32
    }

    pub fn get(&self, j: u32) -> Result<&BigRational> {
        self.m.get(j as usize).ok_or_else(|| {
            Error::validation(format!(
                "moment m_{j} requested from a sequence of maximal degree {}",
                self.max_degree()
            ))
        })
    }

    /// Moments of the scaled variable `c * Z`: `m_j * c^j`.
    pub fn rescaled(&self, c: &BigRational) -> MomentSequence {
        let mut factor = BigRational::one();
        let m = self
            .m
            .iter()
            .map(|mj| {
                let out = mj * &factor;
                factor *= c;
                out
            })
            .collect();
        MomentSequence { m }
    }

    /// Validation hook for laws asserted to be symmetric under sign change:
    /// every covered odd moment must vanish.
    pub fn check_symmetric(&self) -> Result<()> {
        for (j, mj) in self.m.iter().enumerate() {
            if j % 2 == 1 && !mj.is_zero() {
                return Err(Error::validation(format!(
                    "asserted symmetric law has m_{j} = {}",
                    format_rational(mj)
                )));
            }
        }
        Ok(())
    }
}

/// Monic polynomial of one variable with exact coefficients, stored low
/// degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppellPolynomial {
    coefficients: Vec<BigRational>,
}

impl AppellPolynomial {
    fn from_coefficients(coefficients: Vec<BigRational>) -> Self {
        debug_assert!(coefficients.last().is_some_and(|c| c.is_one()));
        AppellPolynomial { coefficients }
    }

    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn coefficient(&self, j: u32) -> BigRational {
        self.coefficients
            .get(j as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, phi: &BigRational) -> BigRational {
        let mut out = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            out = out * phi + c;
        }
        out
    }

    /// Coefficient-wise derivative; for a member of an Appell sequence this
    /// equals `degree` times the previous member.
    pub fn derivative(&self) -> Vec<BigRational> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * rat_int(j as i64))
            .collect()
    }
}

impl fmt::Display for AppellPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() && self.coefficients.len() > 1 {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let magnitude = c.abs();
            match j {
                0 => write!(f, "{}", format_rational(&magnitude))?,
                _ => {
                    if !magnitude.is_one() {
                        write!(f, "{}*", format_rational(&magnitude))?;
                    }
                    if j == 1 {
                        write!(f, "phi")?;
                    } else {
                        write!(f, "phi^{j}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Coefficients `r_0..r_cap` of the reciprocal exponential generating series:
/// `sum r_i t^i / i! = (sum m_i t^i / i!)^(-1)` truncated, so `r_0 = 1`.
pub fn reciprocal_mgf(m: &MomentSequence, cap: u32) -> Result<Vec<BigRational>> {
    if cap > m.max_degree() {
        return Err(Error::validation(format!(
            "reciprocal series to degree {cap} needs moments up to m_{cap}, have m_{}",
            m.max_degree()
        )));
    }
    let a: Vec<BigRational> = (0..=cap)
        .map(|i| {
            m.m[i as usize].clone() / BigRational::from_integer(factorial(i as u64))
        })
        .collect();
    let mut b = vec![BigRational::one()];
    for j in 1..=cap as usize {
        let mut acc = BigRational::zero();
        for i in 1..=j {
            acc += &a[i] * &b[j - i];
        }
        b.push(-acc);
    }
    Ok(b
        .into_iter()
        .enumerate()
        .map(|(j, bj)| bj * BigRational::from_integer(factorial(j as u64)))
        .collect())
}

/// The degree-`k` member of the law-adapted sequence:
/// `W_k(phi) = sum_j binom(k,j) r_{k-j} phi^j`, monic because `r_0 = 1`.
pub fn appell_from_moments(m: &MomentSequence, k: u32) -> Result<AppellPolynomial> {
    let r = reciprocal_mgf(m, k)?;
    let coefficients = (0..=k)
        .map(|j| {
            BigRational::from_integer(binomial(k as u64, j as u64)) * &r[(k - j) as usize]
        })
        .collect();
    Ok(AppellPolynomial::from_coefficients(coefficients))
}

/// Probabilists' Hermite polynomial with variance parameter, by the
/// recurrence `H_{k+1} = phi*H_k - k*sigma2*H_{k-1}`; the Gaussian oracle for
/// `appell_from_moments`.
pub fn hermite(k: u32, sigma2: &BigRational) -> AppellPolynomial {
    let mut prev = vec![BigRational::one()];
    if k == 0 {
        return AppellPolynomial::from_coefficients(prev);
    }
    let mut current = vec![BigRational::zero(), BigRational::one()];
    for degree in 1..k {
        let mut next = vec![BigRational::zero(); degree as usize + 2];
        for (j, c) in current.iter().enumerate() {
            next[j + 1] += c;
        }
        let damp = rat_int(degree as i64) * sigma2;
        for (j, c) in prev.iter().enumerate() {
            next[j] -= c * &damp;
        }
        prev = current;
        current = next;
    }
    AppellPolynomial::from_coefficients(current)
}

/// Formal mean `E[W_k(Z)] = sum_j binom(k,j) r_{k-j} m_j`; identically zero
/// for every k >= 1, which is the centredness the sequence is built for.
pub fn formal_mean(m: &MomentSequence, k: u32) -> Result<BigRational> {
    let r = reciprocal_mgf(m, k)?;
    let mut acc = BigRational::zero();
    for j in 0..=k {
        acc += BigRational::from_integer(binomial(k as u64, j as u64))
            * &r[(k - j) as usize]
            * &m.m[j as usize];
    }
    Ok(acc)
}

/// One coefficient of a scale-dependent polynomial: `base * eps^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCoefficient {
    pub base: BigRational,
    pub eps_exponent: BigRational,
}

/// The scaled polynomial `eps^(alpha*k) W_k(eps^(-alpha) phi)`, kept symbolic
/// in `eps`: the `phi^j` coefficient is `a_j * eps^(alpha*(k-j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledAppell {
    coefficients: Vec<ScaledCoefficient>,
}

impl ScaledAppell {
    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn coefficients(&self) -> &[ScaledCoefficient] {
        &self.coefficients
    }

    /// Exact numeric coefficients at a rational `eps`, when every occurring
    /// power of `eps` is itself rational (coefficients with zero base never
    /// obstruct). The result stays monic: the top exponent is zero.
    pub fn evaluate(&self, eps: &BigRational) -> Result<AppellPolynomial> {
        let mut out = Vec::with_capacity(self.coefficients.len());
        for sc in &self.coefficients {
            if sc.base.is_zero() {
                out.push(BigRational::zero());
                continue;
            }
            match rational_pow(eps, &sc.eps_exponent) {
                Some(power) => out.push(&sc.base * power),
                None => {
                    return Err(Error::validation(format!(
                        "eps^({}) is not rational at eps = {}",
                        format_rational(&sc.eps_exponent),
                        format_rational(eps)
                    )));
                }
            }
        }
        Ok(AppellPolynomial::from_coefficients(out))
    }
}

/// Attach the scaling exponents `alpha*(k-j)` to the coefficients of `w`.
pub fn appell_rescale(w: &AppellPolynomial, alpha: &BigRational) -> ScaledAppell {
    let k = w.degree();
    let coefficients = w
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, a)| ScaledCoefficient {
            base: a.clone(),
            eps_exponent: alpha * rat_int(k as i64 - j as i64),
        })
        .collect();
    ScaledAppell { coefficients }
}

/// Atom standing for the degree-`j` member evaluated at the base component;
/// the degree-zero member is the constant one.
pub fn w_atom(j: u32) -> Poly {
    if j == 0 {
        Poly::one()
    } else {
        Poly::symbol(Symbol::new(format!("W{j}")))
    }
}

/// Composition of the degree-`k` member with a series around its base entry:
/// `(W_k(Pi))_beta = sum_l binom(k,l) W_{k-l}(Pi_0) * (S^l)_beta` with `S`
/// the positive-index part of `pi`; the `W_{k-l}` stay atoms. An optional
/// order cutoff truncates the result.
pub fn compose_faa_di_bruno(
    k: u32,
    pi: &FormalSeries,
    params: &StructureParams,
    cutoff: Option<&BigRational>,
) -> FormalSeries {
    let s = pi.filter(|idx| !idx.is_zero());
    let mut power = FormalSeries::constant(Poly::one());
    let mut out = FormalSeries::zero();
    for l in 0..=k {
        let weight = BigRational::from_integer(binomial(k as u64, l as u64));
        let contribution = power.scale_poly(&w_atom(k - l)).scale(&weight);
        out = out.add(&contribution);
        if l < k {
            power = power.mul(&s);
        }
    }
    match cutoff {
        Some(c) => out.truncate_order(params, c),
        None => out,
    }
}

/// Brute-force composition oracle: substitute the whole series, symbolic
/// base entry included, into the explicit polynomial and re-expand.
pub fn compose_by_substitution(w: &AppellPolynomial, pi: &FormalSeries) -> FormalSeries {
    let mut out = FormalSeries::zero();
    let mut power = FormalSeries::constant(Poly::one());
    for c in w.coefficients() {
        out = out.add(&power.scale(c));
        power = power.mul(pi);
    }
    out
}

/// Rewrite the `W{j}` atoms of a composed series as explicit polynomials in
/// the base symbol, using the sequence generated by `m`.
pub fn expand_w_atoms(
    series: &FormalSeries,
    m: &MomentSequence,
    max_degree: u32,
    base_symbol: &Symbol,
) -> Result<FormalSeries> {
    let mut map = BTreeMap::new();
    let base = Poly::symbol(base_symbol.clone());
    for j in 1..=max_degree {
        let w = appell_from_moments(m, j)?;
        let mut expanded = Poly::zero();
        let mut phi_power = Poly::one();
        for c in w.coefficients() {
            expanded = &expanded + &phi_power.scale(c);
            phi_power = &phi_power * &base;
        }
        map.insert(Symbol::new(format!("W{j}")), expanded);
    }
    let mut out = FormalSeries::zero();
    for (beta, poly) in series.entries() {
        out.add_to(beta, poly.subst(&map));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::{MonomialIndex, Multiindex};
    use crate::ratio::rat;

    fn gaussian_unit(max_degree: u32) -> MomentSequence {
        MomentSequence::gaussian(&rat(1, 1), max_degree)
    }

    #[test]
    fn gaussian_moments_match_double_factorials() {
        let m = gaussian_unit(8);
        let expected = [1, 0, 1, 0, 3, 0, 15, 0, 105];
        for (j, e) in expected.iter().enumerate() {
            assert_eq!(m.moments()[j], rat_int(*e));
        }
    }

    #[test]
    fn reciprocal_series_gaussian() {
        let r = reciprocal_mgf(&gaussian_unit(4), 4).unwrap();
        assert_eq!(
            r,
            vec![rat_int(1), rat_int(0), rat_int(-1), rat_int(0), rat_int(3)]
        );
    }

    #[test]
    fn reciprocal_series_dirac_and_handworked() {
        let dirac = MomentSequence::new(vec![rat_int(1), rat_int(0), rat_int(0)]).unwrap();
        assert_eq!(
            reciprocal_mgf(&dirac, 2).unwrap(),
            vec![rat_int(1), rat_int(0), rat_int(0)]
        );
        let m = MomentSequence::new(vec![rat_int(1), rat_int(0), rat_int(1), rat_int(2)]).unwrap();
        let r = reciprocal_mgf(&m, 3).unwrap();
        assert_eq!(r[3], rat_int(-2));
    }

    #[test]
    fn degree_three_handworked_polynomial() {
        let m = MomentSequence::new(vec![rat_int(1), rat_int(0), rat_int(1), rat_int(2)]).unwrap();
        let w3 = appell_from_moments(&m, 3).unwrap();
        assert_eq!(
            w3.coefficients(),
            &[rat_int(-2), rat_int(-3), rat_int(0), rat_int(1)]
        );
        assert_eq!(w3.to_string(), "phi^3 - 3*phi - 2");
    }

    #[test]
    fn hermite_oracle_small_cases() {
        let s2 = rat(1, 1);
        assert_eq!(hermite(0, &s2).coefficients(), &[rat_int(1)]);
        assert_eq!(hermite(1, &s2).coefficients(), &[rat_int(0), rat_int(1)]);
        assert_eq!(
            hermite(2, &s2).coefficients(),
            &[rat_int(-1), rat_int(0), rat_int(1)]
        );
        let h4 = hermite(4, &rat(2, 1));
        assert_eq!(
            h4.coefficients(),
            &[rat_int(12), rat_int(0), rat_int(-12), rat_int(0), rat_int(1)]
        );
    }

    #[test]
    fn gaussian_sequence_matches_hermite() {
        let sigma2 = rat(3, 7);
        let m = MomentSequence::gaussian(&sigma2, 8);
        for k in 0..=8 {
            assert_eq!(
                appell_from_moments(&m, k).unwrap(),
                hermite(k, &sigma2),
                "degree {k}"
            );
        }
    }

    #[test]
    fn derivative_law() {
        let m = MomentSequence::new(vec![
            rat_int(1),
            rat(1, 2),
            rat(5, 4),
            rat(-3, 2),
            rat(35, 8),
            rat(2, 3),
            rat(11, 1),
        ])
        .unwrap();
        for k in 1..=6u32 {
            let wk = appell_from_moments(&m, k).unwrap();
            let prev = appell_from_moments(&m, k - 1).unwrap();
            let expected: Vec<BigRational> = prev
                .coefficients()
                .iter()
                .map(|c| c * rat_int(k as i64))
                .collect();
            assert_eq!(wk.derivative(), expected, "degree {k}");
        }
    }

    #[test]
    fn formal_mean_vanishes() {
        let m = MomentSequence::new(vec![
            rat_int(1),
            rat(-1, 3),
            rat(7, 2),
            rat(13, 5),
            rat(101, 4),
            rat(-8, 7),
        ])
        .unwrap();
        for k in 1..=5 {
            assert!(formal_mean(&m, k).unwrap().is_zero(), "degree {k}");
        }
        assert!(formal_mean(&m, 0).unwrap().is_one());
    }

    #[test]
    fn rescale_identity_and_gaussian_example() {
        let sigma2 = rat(5, 3);
        let w2 = hermite(2, &sigma2);
        let alpha = rat(-1, 2);
        let scaled = appell_rescale(&w2, &alpha);
        assert_eq!(scaled.evaluate(&rat_int(1)).unwrap(), w2);
        // eps = 1/4: eps^(2*alpha) = 4, so W2 becomes phi^2 - 4*sigma2.
        let eval = scaled.evaluate(&rat(1, 4)).unwrap();
        assert_eq!(
            eval.coefficients(),
            &[&sigma2 * rat_int(-4), rat_int(0), rat_int(1)]
        );
    }

    #[test]
    fn rescale_consistency_with_rescaled_moments() {
        let m = MomentSequence::new(vec![
            rat_int(1),
            rat(1, 5),
            rat(3, 2),
            rat(-2, 7),
            rat(9, 4),
            rat(4, 11),
            rat(31, 6),
        ])
        .unwrap();
        let alpha = rat(-1, 2);
        let eps = rat(1, 4);
        let eps_alpha = rational_pow(&eps, &alpha).unwrap();
        assert_eq!(eps_alpha, rat_int(2));
        for k in 0..=6 {
            let direct = appell_rescale(&appell_from_moments(&m, k).unwrap(), &alpha)
                .evaluate(&eps)
                .unwrap();
            let via_moments = appell_from_moments(&m.rescaled(&eps_alpha), k).unwrap();
            assert_eq!(direct, via_moments, "degree {k}");
        }
    }

    #[test]
    fn irrational_rescale_is_reported() {
        let m = MomentSequence::new(vec![rat_int(1), rat(1, 3), rat(2, 1)]).unwrap();
        let w2 = appell_from_moments(&m, 2).unwrap();
        let scaled = appell_rescale(&w2, &rat(-1, 2));
        assert!(scaled.evaluate(&rat_int(2)).is_err());
    }

    #[test]
    fn symmetry_check() {
        assert!(gaussian_unit(6).check_symmetric().is_ok());
        let skewed =
            MomentSequence::new(vec![rat_int(1), rat_int(0), rat_int(1), rat_int(2)]).unwrap();
        assert!(skewed.check_symmetric().is_err());
    }

    #[test]
    fn composition_markers() {
        let params = StructureParams::standard();
        let beta1 = Multiindex::unit_noise(3);
        let u = Poly::symbol(Symbol::new("u"));
        let mut pi = FormalSeries::constant(Poly::symbol(Symbol::new("Pi0")));
        pi.set(beta1.clone(), u.clone());
        let composed = compose_faa_di_bruno(3, &pi, &params, None);
        // Coefficient at beta1: 3 * W2 * u.
        let at_beta1 = composed.get(&beta1);
        assert_eq!(
            at_beta1,
            &u.scale(&rat_int(3)) * &Poly::symbol(Symbol::new("W2"))
        );
        // Coefficient at 2*beta1: 3 * W1 * u^2 (l = 2 of degree 3).
        let at_double = composed.get(&beta1.add(&beta1));
        assert_eq!(
            at_double,
            &u.pow(2).scale(&rat_int(3)) * &Poly::symbol(Symbol::new("W1"))
        );
        let squared = compose_faa_di_bruno(2, &pi, &params, None);
        assert_eq!(squared.get(&beta1.add(&beta1)), u.pow(2));
    }

    #[test]
    fn composition_degree_zero_is_one() {
        let params = StructureParams::standard();
        let mut pi = FormalSeries::constant(Poly::symbol(Symbol::new("Pi0")));
        pi.set(Multiindex::unit_noise(3), Poly::symbol(Symbol::new("u")));
        let composed = compose_faa_di_bruno(0, &pi, &params, None);
        assert_eq!(composed.len(), 1);
        assert_eq!(composed.get(&Multiindex::zero()), Poly::one());
    }

    #[test]
    fn composition_matches_substitution_oracle() {
        let params = StructureParams::standard();
        let m = MomentSequence::new(vec![
            rat_int(1),
            rat(1, 2),
            rat(4, 3),
            rat(-1, 5),
            rat(17, 4),
            rat(3, 8),
        ])
        .unwrap();
        let base = Symbol::new("Pi0");
        let mut pi = FormalSeries::constant(Poly::symbol(base.clone()));
        pi.set(Multiindex::unit_noise(3), Poly::symbol(Symbol::new("u")));
        pi.set(
            Multiindex::unit_poly(MonomialIndex(vec![0, 0, 0, 0])),
            Poly::symbol(Symbol::new("v")),
        );
        pi.set(
            Multiindex::unit_noise(5).add(&Multiindex::unit_noise(3)),
            Poly::constant(rat(2, 7)),
        );
        for k in 0..=5 {
            let fast = compose_faa_di_bruno(k, &pi, &params, None);
            let expanded = expand_w_atoms(&fast, &m, k.max(1), &base).unwrap();
            let w = appell_from_moments(&m, k).unwrap();
            let brute = compose_by_substitution(&w, &pi);
            let difference = expanded.add(&brute.scale(&rat_int(-1)));
            assert!(difference.is_zero(), "degree {k}");
        }
    }
}
