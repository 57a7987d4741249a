//! Runtime property suites: each function re-verifies one family of exact
//! structural laws over a freshly computed index set and reports one row per
//! property. The randomized generators draw from a caller-supplied seed, so
//! every row, counterexample included, is byte-reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use mirs_core::appell::{
    appell_from_moments, appell_rescale, compose_by_substitution, compose_faa_di_bruno,
    expand_w_atoms, formal_mean, hermite, MomentSequence,
};
use mirs_core::enumerate::{classify_degree_two, enumerate_populated, enumerate_populated_inflated};
use mirs_core::error::{Error, Result};
use mirs_core::hierarchy::{
    check_bookkeeping, dependency_graph, dependency_graph_with_slot_cap, enumerate_counterterms,
    expand_pi_minus, expansion_vanishes_off_sectors,
};
use mirs_core::linform::LinearForm;
use mirs_core::multiindex::{
    bracket, compare_order, discounted_homogeneity, homogeneity, is_populated, order,
    MonomialIndex, Multiindex,
};
use mirs_core::params::StructureParams;
use mirs_core::poly::{Poly, Symbol};
use mirs_core::ratio::{binomial, integer_in_half_open, rat, rat_int, rational_pow};
use mirs_core::recenter::{
    check_model_axioms, gamma_dependencies, polynomial_sector_gamma, DGammaEngine, DPiSpec,
    GammaEngine, PiSpec,
};
use mirs_core::series::FormalSeries;

use mirs_sim::config::SimConfig;
use mirs_sim::field::LatticeField;
use mirs_sim::solve::solve_linear;
use mirs_sim::spectral::synthesize_noise_seeded;
use mirs_sim::stats::{
    appell_hermite_rows, fit_spectral_slope, paired_centredness, variance_scaling_check,
};

/// Monte-Carlo acceptance window for the fitted spectral decay exponent.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Cap on the centredness z-scores.
pub const Z_CAP: f64 = 3.0;
/// Standard-error multiplier for the scaling and coefficient comparisons.
pub const SE_FACTOR: f64 = 3.0;
/// Floor stopping a vanishing standard error from demanding exact equality.
pub const SE_FLOOR: f64 = 1e-12;

/// One verified property: a stable label, the verdict, and on failure a
/// deterministic counterexample description.
#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub label: String,
    pub pass: bool,
    pub detail: Option<String>,
}

impl SuiteRow {
    fn pass(label: &str) -> Self {
        SuiteRow {
            label: label.to_string(),
            pass: true,
            detail: None,
        }
    }

    fn fail(label: &str, detail: String) -> Self {
        SuiteRow {
            label: label.to_string(),
            pass: false,
            detail: Some(detail),
        }
    }

    fn from_witness(label: &str, witness: Option<String>) -> Self {
        match witness {
            None => SuiteRow::pass(label),
            Some(w) => SuiteRow::fail(label, w),
        }
    }
}

/// Index-calculus laws over the full enumerated set: additivity and
/// minimality of the three gradings, the populated floor, stability of the
/// enumeration under inflated search bounds, integer separation from the
/// discounted grading, and the exact degree-two classification.
pub fn multiindex_suite(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<SuiteRow>> {
    let set = enumerate_populated(params, max_order)?;
    let empty = Multiindex::zero();
    let hom: Vec<LinearForm> = set.iter().map(|b| homogeneity(b, params)).collect();
    let disc: Vec<LinearForm> = set
        .iter()
        .map(|b| discounted_homogeneity(b, params))
        .collect();
    let ord: Vec<LinearForm> = set.iter().map(|b| order(b, params)).collect();
    let hom0 = homogeneity(&empty, params);
    let disc0 = discounted_homogeneity(&empty, params);
    let ord0 = order(&empty, params);

    let mut rows = Vec::new();

    // One merged index per pair serves all three additivity rows; the
    // left-hand partial sums are hoisted out of the inner loop.
    let mut add_hom = None;
    let mut add_disc = None;
    let mut add_ord = None;
    for i in 0..set.len() {
        let hom_left = &hom[i] - &hom0;
        let disc_left = &disc[i] - &disc0;
        let ord_left = &ord[i] - &ord0;
        for j in i..set.len() {
            let merged = set[i].add(&set[j]);
            if add_hom.is_none() && homogeneity(&merged, params) != &hom_left + &hom[j] {
                add_hom = Some(format!("{} + {}", set[i], set[j]));
            }
            if add_disc.is_none()
                && discounted_homogeneity(&merged, params) != &disc_left + &disc[j]
            {
                add_disc = Some(format!("{} + {}", set[i], set[j]));
            }
            if add_ord.is_none() && order(&merged, params) != &ord_left + &ord[j] {
                add_ord = Some(format!("{} + {}", set[i], set[j]));
            }
        }
    }
    rows.push(SuiteRow::from_witness(
        "homogeneity is additive under index merge",
        add_hom,
    ));
    rows.push(SuiteRow::from_witness(
        "discounted homogeneity is additive under index merge",
        add_disc,
    ));
    rows.push(SuiteRow::from_witness(
        "order is additive under index merge",
        add_ord,
    ));

    let hom0_val = hom0.eval(params);
    let mut witness = None;
    for (b, form) in set.iter().zip(&hom) {
        let excess = form.eval(params) - &hom0_val;
        if excess.is_negative() || (excess.is_zero() && !b.is_zero()) {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "homogeneity is minimal exactly at the empty index",
        witness,
    ));

    let disc0_val = disc0.eval(params);
    let mut witness = None;
    for (b, form) in set.iter().zip(&disc) {
        let excess = form.eval(params) - &disc0_val;
        if excess.is_negative() || (excess.is_zero() && !b.is_zero()) {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "discounted homogeneity is minimal exactly at the empty index",
        witness,
    ));

    let half = params.half_dim();
    let floor = params.alpha() + &half;
    let mut witness = None;
    for (i, b) in set.iter().enumerate() {
        if bracket(b) < 0 {
            continue;
        }
        let o = ord[i].eval(params);
        if o < hom[i].eval(params) + &half || o < floor {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "order exceeds homogeneity by the half dimension on fertile indices",
        witness,
    ));

    let zero_unit_order = order(
        &Multiindex::unit_poly(MonomialIndex::zero(params.coords())),
        params,
    )
    .eval(params);
    let mut witness = None;
    for (i, b) in set.iter().enumerate() {
        if ord[i].eval(params) < zero_unit_order {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "no populated index sits below the zero-degree polynomial unit",
        witness,
    ));

    let inflated = enumerate_populated_inflated(params, max_order, 2)?;
    rows.push(if inflated == set {
        SuiteRow::pass("enumeration is unchanged under doubled search bounds")
    } else {
        SuiteRow::fail(
            "enumeration is unchanged under doubled search bounds",
            format!("{} vs {} indices", set.len(), inflated.len()),
        )
    });

    let mut witness = None;
    for (i, b) in set.iter().enumerate() {
        if integer_in_half_open(&disc[i].eval(params), &hom[i].eval(params)) {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "no integer separates a discounted value from its homogeneity",
        witness,
    ));

    rows.push(SuiteRow::from_witness(
        "degree-two indices are the quadratic units and the base family",
        classification_witness(params, max_order, &set)?,
    ));

    Ok(rows)
}

/// Cross-checks the degree-two classification against the enumerated set:
/// the classified list must consist exactly of the purely polynomial units
/// of degree two and the indices `f_k + kmin` zero-units, and must contain
/// every enumerated index of homogeneity two.
fn classification_witness(
    params: &StructureParams,
    max_order: &BigRational,
    set: &[Multiindex],
) -> Result<Option<String>> {
    let two = rat_int(2);
    let classified = classify_degree_two(params, max_order)?;
    for b in &classified {
        if homogeneity(b, params).eval(params) != two {
            return Ok(Some(format!("{b} classified without homogeneity two")));
        }
        let quadratic_unit = b.is_purely_polynomial() && b.poly_total() == 1 && b.poly_degree() == 2;
        let base_family = b.noise_total() == 1
            && b.noise_slots().all(|(k, _)| k % 2 == 1 && k >= params.kmin())
            && b.poly_total() == params.kmin() as u64
            && b.poly_degree() == 0;
        if !quadratic_unit && !base_family {
            return Ok(Some(format!("{b} is of neither classified shape")));
        }
        if order(b, params).eval(params) > *max_order {
            return Ok(Some(format!("{b} classified above the cutoff")));
        }
    }
    for b in set {
        if homogeneity(b, params).eval(params) == two && !classified.contains(b) {
            return Ok(Some(format!("{b} has homogeneity two but was not classified")));
        }
    }
    Ok(None)
}

/// A deterministic small random series over the given support pool.
fn random_series(pool: &[Multiindex], rng: &mut ChaCha8Rng, with_symbol: bool) -> FormalSeries {
    let mut out = FormalSeries::zero();
    for _ in 0..rng.random_range(1..=4usize) {
        let beta = pool[rng.random_range(0..pool.len())].clone();
        let mut coeff = Poly::constant(rat(
            rng.random_range(-5..=5i64),
            rng.random_range(1..=4i64),
        ));
        if with_symbol && rng.random_bool(0.3) {
            coeff = &coeff * &Poly::symbol(Symbol::new("u"));
        }
        if !coeff.is_zero() {
            out.add_to(&beta, coeff);
        }
    }
    out
}

/// Ring and derivation laws of the series algebra on randomized small series
/// drawn from the enumerated populated set.
pub fn series_suite(
    params: &StructureParams,
    max_order: &BigRational,
    seed: u64,
    trials: usize,
) -> Result<Vec<SuiteRow>> {
    let pool = enumerate_populated(params, max_order)?;
    if pool.is_empty() {
        return Err(Error::validation("empty support pool for the series suite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = params.coords();
    let slots = [
        MonomialIndex::zero(coords),
        MonomialIndex(std::iter::once(1)
            .chain(std::iter::repeat(0))
            .take(coords)
            .collect()),
        MonomialIndex(std::iter::once(0)
            .chain(std::iter::once(1))
            .chain(std::iter::repeat(0))
            .take(coords)
            .collect()),
    ];

    let mut commutes = None;
    let mut associates = None;
    let mut distributes = None;
    let mut leibniz = None;
    let mut fertile = None;
    let mut pruned = None;

    for t in 0..trials {
        let a = random_series(&pool, &mut rng, true);
        let b = random_series(&pool, &mut rng, true);
        let c = random_series(&pool, &mut rng, false);

        if commutes.is_none() && a.mul(&b) != b.mul(&a) {
            commutes = Some(format!("trial {t}"));
        }
        if associates.is_none() && a.mul(&b).mul(&c) != a.mul(&b.mul(&c)) {
            associates = Some(format!("trial {t}"));
        }
        if distributes.is_none() && a.mul(&b.add(&c)) != a.mul(&b).add(&a.mul(&c)) {
            distributes = Some(format!("trial {t}"));
        }
        for n in &slots {
            let direct = a.mul(&b).derivative(n);
            let split = a.derivative(n).mul(&b).add(&a.mul(&b.derivative(n)));
            if leibniz.is_none() && direct != split {
                leibniz = Some(format!("trial {t}, slot {n}"));
            }
            let da = a.derivative(n);
            if fertile.is_none() && da.project_bracket_nonneg() != da {
                fertile = Some(format!("trial {t}, slot {n}"));
            }
        }
        let direct = a.mul(&b).truncate_order(params, max_order);
        if pruned.is_none() && a.mul_truncated(&b, params, max_order) != direct {
            pruned = Some(format!("trial {t}"));
        }
    }

    Ok(vec![
        SuiteRow::from_witness("series product commutes", commutes),
        SuiteRow::from_witness("series product associates", associates),
        SuiteRow::from_witness("series product distributes over addition", distributes),
        SuiteRow::from_witness("slot derivatives obey the Leibniz rule", leibniz),
        SuiteRow::from_witness(
            "derivatives of populated series keep fertile support",
            fertile,
        ),
        SuiteRow::from_witness(
            "pruned products equal truncation after the product",
            pruned,
        ),
    ])
}

/// All monomial slots with parabolic degree at most `cap`.
fn monomials_up_to(coords: usize, cap: u64) -> Vec<MonomialIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; coords];
    fill_monomials(&mut current, 0, cap, &mut out);
    out.sort();
    out
}

fn fill_monomials(current: &mut Vec<u32>, pos: usize, left: u64, out: &mut Vec<MonomialIndex>) {
    if pos == current.len() {
        out.push(MonomialIndex(current.clone()));
        return;
    }
    // The leading coordinate carries parabolic weight two.
    let weight = if pos == 0 { 2 } else { 1 };
    let max_here = left / weight;
    for v in 0..=max_here {
        current[pos] = v as u32;
        fill_monomials(current, pos + 1, left - v * weight, out);
    }
    current[pos] = 0;
}

/// True when the index may carry a strict recentering entry.
fn strict_support_ok(beta: &Multiindex) -> bool {
    bracket(beta) >= 0 || (beta.is_purely_polynomial() && beta.poly_total() == 1)
}

/// A randomized population-respecting recentering spec with at most
/// `max_entries` entries, each a fresh symbol.
pub fn random_pispec(
    params: &StructureParams,
    set: &[Multiindex],
    rng: &mut ChaCha8Rng,
    max_entries: usize,
) -> Result<PiSpec> {
    let candidates: Vec<&Multiindex> = set
        .iter()
        .filter(|b| strict_support_ok(b) && homogeneity(b, params).eval(params).is_positive())
        .collect();
    if candidates.is_empty() {
        return Err(Error::validation("no admissible spec support"));
    }
    let pool = monomials_up_to(params.coords(), 2);
    let target = rng.random_range(1..=max_entries);
    let mut entries: BTreeMap<(MonomialIndex, Multiindex), Poly> = BTreeMap::new();
    let mut symbol = 0usize;
    for _ in 0..30 {
        if entries.len() == target {
            break;
        }
        let beta = candidates[rng.random_range(0..candidates.len())].clone();
        let hom_val = homogeneity(&beta, params).eval(params);
        let fits: Vec<&MonomialIndex> = pool
            .iter()
            .filter(|n| rat_int(n.parabolic_degree() as i64) < hom_val)
            .collect();
        if fits.is_empty() {
            continue;
        }
        let n = fits[rng.random_range(0..fits.len())].clone();
        entries.entry((n, beta)).or_insert_with(|| {
            symbol += 1;
            Poly::symbol(Symbol::new(format!("p{symbol}")))
        });
    }
    PiSpec::new(params, entries, true)
}

/// A randomized derivative spec: fertile support, slots below the
/// derivative slack, fresh symbols.
pub fn random_dpispec(
    params: &StructureParams,
    set: &[Multiindex],
    rng: &mut ChaCha8Rng,
    max_entries: usize,
) -> Result<DPiSpec> {
    let slack = params.alpha() + params.derivative_slack();
    let candidates: Vec<&Multiindex> = set.iter().filter(|b| bracket(b) >= 0).collect();
    let pool: Vec<MonomialIndex> = monomials_up_to(params.coords(), 2)
        .into_iter()
        .filter(|n| rat_int(n.parabolic_degree() as i64) < slack)
        .collect();
    if candidates.is_empty() || pool.is_empty() {
        return Err(Error::validation("no admissible derivative spec support"));
    }
    let target = rng.random_range(1..=max_entries);
    let mut entries: BTreeMap<(MonomialIndex, Multiindex), Poly> = BTreeMap::new();
    let mut symbol = 0usize;
    for _ in 0..30 {
        if entries.len() == target {
            break;
        }
        let beta = candidates[rng.random_range(0..candidates.len())].clone();
        let n = pool[rng.random_range(0..pool.len())].clone();
        entries.entry((n, beta)).or_insert_with(|| {
            symbol += 1;
            Poly::symbol(Symbol::new(format!("q{symbol}")))
        });
    }
    DPiSpec::new(params, entries)
}

/// Per-spec outcome of the recentering checks; the first witness per
/// property wins when folded in spec order.
#[derive(Default)]
struct SpecOutcome {
    oracle: Option<String>,
    diagonal: Option<String>,
    triangular: Option<String>,
    dependencies: Option<String>,
    product_rule: Option<String>,
    d_triangular: Option<String>,
    populated: Option<String>,
    fertile: Option<String>,
}

fn check_one_spec(
    params: &StructureParams,
    set: &[Multiindex],
    spec: &PiSpec,
    dspec: &DPiSpec,
    series_pairs: &[(FormalSeries, FormalSeries)],
    spec_id: usize,
) -> Result<SpecOutcome> {
    let mut out = SpecOutcome::default();
    let engine = GammaEngine::new(params, spec);
    let slack = params.derivative_slack();
    let t0 = std::time::Instant::now();
    let mut t_oracle = std::time::Duration::ZERO;
    let mut t_deps = std::time::Duration::ZERO;
    let mut sorted: Vec<&Multiindex> = set.iter().collect();
    sorted.sort();

    for (gi, gamma) in set.iter().enumerate() {
        let image = engine.gamma_monomial(gamma);
        let tick = std::time::Instant::now();
        // Union walk of two sorted streams: every enumerated target plus
        // every index the image actually hits, each visited exactly once.
        let mut set_it = sorted.iter().peekable();
        let mut img_it = image.entries().peekable();
        loop {
            let (beta, recursive): (&Multiindex, Option<&Poly>) =
                match (set_it.peek(), img_it.peek()) {
                    (None, None) => break,
                    (Some(&s), None) => {
                        set_it.next();
                        (s, None)
                    }
                    (None, Some(&(b, p))) => {
                        img_it.next();
                        (b, Some(p))
                    }
                    (Some(&s), Some(&(b, p))) => match Multiindex::cmp(s, b) {
                        Ordering::Less => {
                            set_it.next();
                            (s, None)
                        }
                        Ordering::Greater => {
                            img_it.next();
                            (b, Some(p))
                        }
                        Ordering::Equal => {
                            set_it.next();
                            img_it.next();
                            (b, Some(p))
                        }
                    },
                };
            let exponential = engine.gamma_entry(gamma, beta);
            let agrees = match recursive {
                Some(p) => exponential == *p,
                None => exponential.is_zero(),
            };
            if out.oracle.is_none() && !agrees {
                out.oracle = Some(format!("spec {spec_id}: entry ({gamma}, {beta})"));
            }
        }
        t_oracle += tick.elapsed();
        if out.diagonal.is_none() && image.get(gamma) != Poly::one() {
            out.diagonal = Some(format!("spec {spec_id}: diagonal at {gamma}"));
        }
        for beta in image.support() {
            if beta == gamma {
                continue;
            }
            let below = homogeneity(gamma, params).eval(params)
                < homogeneity(beta, params).eval(params)
                && discounted_homogeneity(gamma, params).eval(params)
                    < discounted_homogeneity(beta, params).eval(params)
                && compare_order(gamma, beta, params)? == Ordering::Less;
            if out.triangular.is_none() && !below {
                out.triangular = Some(format!("spec {spec_id}: entry ({gamma}, {beta})"));
            }
        }
        // Dependence confinement, on a thinned target list to keep the
        // shadow recomputation affordable.
        // Dependence confinement on a thinned sample: the shadow
        // recomputation behind each query is too heavy for all pairs.
        let tick = std::time::Instant::now();
        if gamma.poly_total() > 0 && gi % 7 == spec_id % 7 {
            for beta in set.iter().take(6) {
                let deps = gamma_dependencies(params, spec, gamma, beta)?;
                for (_, source) in deps {
                    let needed = if gamma.is_purely_polynomial() {
                        matches!(
                            compare_order(&source, beta, params)?,
                            Ordering::Less | Ordering::Equal
                        )
                    } else {
                        compare_order(&source, beta, params)? == Ordering::Less
                    };
                    if out.dependencies.is_none() && is_populated(gamma, params) && !needed {
                        out.dependencies =
                            Some(format!("spec {spec_id}: entry ({gamma}, {beta})"));
                    }
                }
            }
        }
        t_deps += tick.elapsed();
    }
    if std::env::var_os("MIRS_TIMING").is_some() {
        eprintln!(
            "spec {spec_id}: oracle {:.2}s deps {:.2}s gamma-loop {:.2}s",
            t_oracle.as_secs_f64(),
            t_deps.as_secs_f64(),
            t0.elapsed().as_secs_f64()
        );
    }

    let dengine = DGammaEngine::new(params, spec, dspec);
    for (a, b) in series_pairs {
        let lhs = dengine.dgamma_apply(&a.mul(b));
        let rhs = dengine
            .dgamma_apply(a)
            .mul(&engine.gamma_apply(b, None))
            .add(&engine.gamma_apply(a, None).mul(&dengine.dgamma_apply(b)));
        if out.product_rule.is_none() && lhs != rhs {
            out.product_rule = Some(format!("spec {spec_id}"));
        }
    }
    for gamma in set {
        let image = dengine.dgamma_monomial(gamma);
        for beta in image.support() {
            let below = homogeneity(gamma, params).eval(params)
                < homogeneity(beta, params).eval(params) + &slack
                && discounted_homogeneity(gamma, params).eval(params)
                    < discounted_homogeneity(beta, params).eval(params) + &slack
                && compare_order(gamma, beta, params)? == Ordering::Less;
            if out.d_triangular.is_none() && !below {
                out.d_triangular = Some(format!("spec {spec_id}: entry ({gamma}, {beta})"));
            }
        }
    }

    for (a, _) in series_pairs {
        let populated_input = a.project_populated(params);
        let image = engine.gamma_apply(&populated_input, None);
        if out.populated.is_none() && image.project_populated(params) != image {
            out.populated = Some(format!("spec {spec_id}"));
        }
        let fertile_input = a.project_bracket_nonneg();
        let image = engine.gamma_apply(&fertile_input, None);
        if out.fertile.is_none() && image.project_bracket_nonneg() != image {
            out.fertile = Some(format!("spec {spec_id}"));
        }
    }

    Ok(out)
}

/// Recentering laws over randomized specs: two-route agreement of every
/// entry, unit diagonal, triangularity of both maps, the product rule of the
/// derivative map, dependence confinement, sector preservation, and the
/// exact polynomial-sector model axioms.
pub fn recenter_suite(
    params: &StructureParams,
    max_order: &BigRational,
    n_specs: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<SuiteRow>> {
    let set = enumerate_populated(params, max_order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs_per_spec = n_trials.div_ceil(n_specs.max(1)).max(1);

    let mut inputs = Vec::with_capacity(n_specs);
    for _ in 0..n_specs {
        let spec = random_pispec(params, &set, &mut rng, 5)?;
        let dspec = random_dpispec(params, &set, &mut rng, 4)?;
        let pairs: Vec<(FormalSeries, FormalSeries)> = (0..pairs_per_spec)
            .map(|_| {
                (
                    random_series(&set, &mut rng, false),
                    random_series(&set, &mut rng, false),
                )
            })
            .collect();
        inputs.push((spec, dspec, pairs));
    }

    let outcomes: Vec<SpecOutcome> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, (spec, dspec, pairs))| check_one_spec(params, &set, spec, dspec, pairs, i))
        .collect::<Result<_>>()?;

    let first = |pick: fn(&SpecOutcome) -> &Option<String>| -> Option<String> {
        outcomes.iter().find_map(|o| pick(o).clone())
    };

    let mut rows = vec![
        SuiteRow::from_witness(
            "exponential and recursive recentering entries agree",
            first(|o| &o.oracle),
        ),
        SuiteRow::from_witness(
            "recentered monomials keep a unit diagonal",
            first(|o| &o.diagonal),
        ),
        SuiteRow::from_witness(
            "off-diagonal recentering entries lower every grading",
            first(|o| &o.triangular),
        ),
        SuiteRow::from_witness(
            "entry dependencies stay below the target index",
            first(|o| &o.dependencies),
        ),
        SuiteRow::from_witness(
            "the derivative map obeys the product rule",
            first(|o| &o.product_rule),
        ),
        SuiteRow::from_witness(
            "derivative entries stay within the order slack",
            first(|o| &o.d_triangular),
        ),
        SuiteRow::from_witness(
            "recentering preserves populated support",
            first(|o| &o.populated),
        ),
        SuiteRow::from_witness(
            "recentering preserves fertile support",
            first(|o| &o.fertile),
        ),
    ];

    let points = sample_points(params, &mut rng, 3);
    let spec = inputs.first().map(|(s, _, _)| s);
    for check in check_model_axioms(params, spec, &points, 4)? {
        let label = format!("model axiom: {}", check.axiom);
        rows.push(if check.passed {
            SuiteRow::pass(&label)
        } else {
            SuiteRow::fail(&label, check.counterexample.unwrap_or_default())
        });
    }

    Ok(rows)
}

/// Deterministic rational sample points for the axiom checks.
fn sample_points(params: &StructureParams, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<BigRational>> {
    (0..count)
        .map(|_| {
            (0..params.coords())
                .map(|_| rat(rng.random_range(-6..=6i64), rng.random_range(1..=4i64)))
                .collect()
        })
        .collect()
}

/// All monomials dominated by `n` and dominating `m`, componentwise.
fn between_monomials(m: &MonomialIndex, n: &MonomialIndex) -> Vec<MonomialIndex> {
    let mut out = vec![Vec::new()];
    for i in 0..n.coords() {
        let mut next = Vec::new();
        for prefix in &out {
            for v in m.0[i]..=n.0[i] {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(MonomialIndex).collect()
}

/// Distinct orderings of a slot multiset, counted by direct enumeration;
/// the independent oracle for the base forcing coefficient.
fn count_orderings(units: &[MonomialIndex]) -> BigInt {
    fn expand(remaining: &mut Vec<MonomialIndex>, seen: &mut std::collections::BTreeSet<Vec<MonomialIndex>>, prefix: &mut Vec<MonomialIndex>) {
        if remaining.is_empty() {
            seen.insert(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let item = remaining.remove(i);
            prefix.push(item.clone());
            expand(remaining, seen, prefix);
            prefix.pop();
            remaining.insert(i, item);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    expand(&mut units.to_vec(), &mut seen, &mut Vec::new());
    BigInt::from(seen.len())
}

/// Polynomial-sector recentering on random rational point triples:
/// transitivity through the middle point, identity at equal points, and the
/// base forcing coefficients against an ordering count, for decorations up
/// to `degree_cap`.
pub fn polynomial_sector_suite(
    params: &StructureParams,
    n_triples: usize,
    degree_cap: u64,
    seed: u64,
) -> Result<Vec<SuiteRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decorations = monomials_up_to(params.coords(), degree_cap);
    let mut transitive = None;
    let mut identity = None;

    for t in 0..n_triples {
        let pts = sample_points(params, &mut rng, 3);
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        for n in &decorations {
            for m in &decorations {
                if !n.dominates(m) {
                    continue;
                }
                let direct = polynomial_sector_gamma(x, z, n, m)?;
                let mut through = BigRational::zero();
                for l in between_monomials(m, n) {
                    through += polynomial_sector_gamma(x, y, n, &l)?
                        * polynomial_sector_gamma(y, z, &l, m)?;
                }
                if transitive.is_none() && direct != through {
                    transitive = Some(format!("triple {t}, decorations ({n}, {m})"));
                }
                let at_equal = polynomial_sector_gamma(x, x, n, m)?;
                let expected = if n == m {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                if identity.is_none() && at_equal != expected {
                    identity = Some(format!("triple {t}, decorations ({n}, {m})"));
                }
            }
        }
    }

    let mut coefficient = None;
    let kmin = params.kmin() as usize;
    let mut witnessed = 0usize;
    for combo in multisets(&monomials_up_to(params.coords(), degree_cap), kmin) {
        let total: u64 = combo.iter().map(|n| n.parabolic_degree()).sum();
        if total > degree_cap {
            continue;
        }
        witnessed += 1;
        let mut beta = Multiindex::unit_noise(params.kmin());
        for n in &combo {
            beta = beta.add(&Multiindex::unit_poly(n.clone()));
        }
        let formula = mirs_core::recenter::base_forcing_coefficient(params, &beta)?;
        if coefficient.is_none() && formula != count_orderings(&combo) {
            coefficient = Some(format!("decoration {beta}"));
        }
    }
    if witnessed == 0 {
        coefficient = Some("no decorations enumerated".to_string());
    }

    Ok(vec![
        SuiteRow::from_witness(
            "polynomial recentering composes through a middle point",
            transitive,
        ),
        SuiteRow::from_witness("polynomial recentering is the identity at equal points", identity),
        SuiteRow::from_witness(
            "base forcing coefficients count the distinct slot orderings",
            coefficient,
        ),
    ])
}

/// All multisets of size `k` from the pool, as sorted vectors.
fn multisets(pool: &[MonomialIndex], k: usize) -> Vec<Vec<MonomialIndex>> {
    fn build(
        pool: &[MonomialIndex],
        start: usize,
        left: usize,
        current: &mut Vec<MonomialIndex>,
        out: &mut Vec<Vec<MonomialIndex>>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for i in start..pool.len() {
            current.push(pool[i].clone());
            build(pool, i, left - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    build(pool, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Forcing-expansion laws over the enumerated set: sector vanishing, the
/// per-term exponent bookkeeping, counterterm shape, strict descent and
/// acyclicity of the dependency graphs, the base-slot restriction rebuild,
/// and the single-term degree-two specialization.
pub fn hierarchy_suite(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<SuiteRow>> {
    let set = enumerate_populated(params, max_order)?;
    let mut rows = Vec::new();

    let mut witness = None;
    for b in &set {
        if !expansion_vanishes_off_sectors(b, params)? {
            witness = Some(format!("{b}"));
            break;
        }
    }
    rows.push(SuiteRow::from_witness(
        "expansions vanish off the populated sectors",
        witness,
    ));

    let mut bookkeeping = None;
    let mut parity = None;
    let mut degree_two = None;
    for b in &set {
        let expr = expand_pi_minus(b, params)?;
        if bookkeeping.is_none() && check_bookkeeping(&expr, params).is_err() {
            bookkeeping = Some(format!("{b}"));
        }
        for term in expr.terms() {
            if let Some((k, beta0)) = term.counterterm() {
                let ok = k % 2 == 1
                    && *k < params.kmin()
                    && beta0.poly_total() == 0
                    && beta0.noise_total() >= 2;
                if parity.is_none() && !ok {
                    parity = Some(format!("{b}: symbol at slot {k}"));
                }
            }
        }
        // The degree-two family: exactly one term, the scaled atom.
        if b.noise_total() == 1 && b.poly_total() == params.kmin() as u64 && b.poly_degree() == 0 {
            let k = b.noise_slots().next().map(|(k, _)| k).unwrap_or(0);
            let expected_eps =
                LinearForm::alpha_multiple(rat_int(params.kmin() as i64 - k as i64));
            let expected_coeff =
                BigRational::from_integer(binomial(k as u64, params.kmin() as u64));
            let ok = expr.terms().len() == 1
                && expr.terms()[0].w_index() == Some(k - params.kmin())
                && expr.terms()[0].eps_exponent() == &expected_eps
                && expr.terms()[0].coefficient() == &expected_coeff
                && expr.terms()[0].counterterm().is_none();
            if degree_two.is_none() && !ok {
                degree_two = Some(format!("{b}"));
            }
        }
    }
    rows.push(SuiteRow::from_witness(
        "every expansion satisfies the exponent bookkeeping",
        bookkeeping,
    ));
    rows.push(SuiteRow::from_witness(
        "counterterm symbols are odd, low, and noise-only",
        parity,
    ));
    rows.push(SuiteRow::from_witness(
        "base-family indices expand to the single scaled atom",
        degree_two,
    ));

    let mut descends = None;
    let mut acyclic = None;
    let mut restricted = None;
    for b in &set {
        let graph = dependency_graph(b, params)?;
        for (from, to) in graph.edges() {
            let above = from.key(params).eval(params);
            let below = to.key(params).eval(params);
            if descends.is_none() && below >= above {
                descends = Some(format!("{b}: edge {} -> {}", from.label(), to.label()));
            }
        }
        if acyclic.is_none() && graph.topological(params).len() != graph.node_count() {
            acyclic = Some(format!("{b}"));
        }
        if b.noise_above(params.kmin()) == 0 {
            let capped = dependency_graph_with_slot_cap(b, params, Some(params.kmin()))?;
            if restricted.is_none() && capped != graph {
                restricted = Some(format!("{b}"));
            }
        }
    }
    rows.push(SuiteRow::from_witness(
        "dependency edges strictly descend in the order",
        descends,
    ));
    rows.push(SuiteRow::from_witness(
        "dependency graphs admit a full topological order",
        acyclic,
    ));
    rows.push(SuiteRow::from_witness(
        "base-slot indices rebuild identically under the slot cap",
        restricted,
    ));

    let mut supported = None;
    for (k, beta0) in enumerate_counterterms(params, max_order)? {
        let ok = k % 2 == 1
            && k < params.kmin()
            && beta0.poly_total() == 0
            && beta0.noise_total() >= 2
            && mirs_core::hierarchy::counterterm_support(k, &beta0, params)?;
        if supported.is_none() && !ok {
            supported = Some(format!("slot {k} at {beta0}"));
        }
    }
    rows.push(SuiteRow::from_witness(
        "enumerated counterterms all pass the support window",
        supported,
    ));

    Ok(rows)
}

/// A random rational with small numerator and denominator.
fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.random_range(-9..=9i64), rng.random_range(1..=6i64))
}

/// Adapted-polynomial laws over random rational moment sequences: the
/// derivative ladder, formal centredness, the Gaussian specialization, the
/// composition oracle, and rescale consistency.
pub fn appell_suite(seed: u64, n_sequences: usize, k_max: u32) -> Result<Vec<SuiteRow>> {
    let params = StructureParams::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ladder = None;
    let mut centred = None;
    let mut rescale = None;

    let mut sequences = Vec::with_capacity(n_sequences);
    for _ in 0..n_sequences {
        let mut m = vec![BigRational::one()];
        for _ in 0..k_max {
            m.push(small_rational(&mut rng));
        }
        sequences.push(MomentSequence::new(m)?);
    }

    for (i, m) in sequences.iter().enumerate() {
        let mut previous = appell_from_moments(m, 0)?;
        for k in 1..=k_max {
            let current = appell_from_moments(m, k)?;
            let stepped: Vec<BigRational> = previous
                .coefficients()
                .iter()
                .map(|c| c * rat_int(k as i64))
                .collect();
            if ladder.is_none() && current.derivative() != stepped {
                ladder = Some(format!("sequence {i}, degree {k}"));
            }
            if centred.is_none() && !formal_mean(m, k)?.is_zero() {
                centred = Some(format!("sequence {i}, degree {k}"));
            }
            previous = current;
        }
        // eps = 1/4 with alpha = -1/2 keeps the scale factor rational.
        let alpha = rat(-1, 2);
        let eps = rat(1, 4);
        let factor = rational_pow(&eps, &alpha)
            .ok_or_else(|| Error::validation("irrational rescale factor"))?;
        for k in 0..=k_max.min(6) {
            let direct = appell_rescale(&appell_from_moments(m, k)?, &alpha).evaluate(&eps)?;
            let via_moments = appell_from_moments(&m.rescaled(&factor), k)?;
            if rescale.is_none() && direct != via_moments {
                rescale = Some(format!("sequence {i}, degree {k}"));
            }
        }
    }

    let mut gaussian = None;
    for sigma2 in [rat_int(1), rat(1, 4), rat(5, 3), rat(7, 2)] {
        let m = MomentSequence::gaussian(&sigma2, k_max);
        for k in 0..=k_max {
            if gaussian.is_none() && appell_from_moments(&m, k)? != hermite(k, &sigma2) {
                gaussian = Some(format!("sigma2 {sigma2}, degree {k}"));
            }
        }
    }

    let mut composed = None;
    for t in 0..8 {
        let m = &sequences[t % sequences.len()];
        let base = Symbol::new("Phi0");
        let mut pi = FormalSeries::constant(Poly::symbol(base.clone()));
        let supports = [
            Multiindex::unit_noise(3),
            Multiindex::unit_poly(MonomialIndex::zero(params.coords())),
            Multiindex::unit_noise(5),
            Multiindex::unit_noise(3).add(&Multiindex::unit_noise(3)),
        ];
        for (j, s) in supports.iter().enumerate().take(1 + t % 4) {
            pi.set(s.clone(), Poly::symbol(Symbol::new(format!("u{j}"))));
        }
        for k in 0..=k_max.min(5) {
            let fast = compose_faa_di_bruno(k, &pi, &params, None);
            let expanded = expand_w_atoms(&fast, m, k.max(1), &base)?;
            let brute = compose_by_substitution(&appell_from_moments(m, k)?, &pi);
            let difference = expanded.add(&brute.scale(&rat_int(-1)));
            if composed.is_none() && !difference.is_zero() {
                composed = Some(format!("trial {t}, degree {k}"));
            }
        }
    }

    Ok(vec![
        SuiteRow::from_witness("derivatives step down the polynomial ladder", ladder),
        SuiteRow::from_witness("every degree kills the formal mean", centred),
        SuiteRow::from_witness("gaussian moments reproduce the hermite family", gaussian),
        SuiteRow::from_witness("composition agrees with brute-force substitution", composed),
        SuiteRow::from_witness("rescaled moments reproduce the scaled family", rescale),
    ])
}

/// Monte-Carlo law checks on a lattice ensemble: spectral slope of the
/// synthesized noise, split-sample centredness of the adapted polynomials on
/// the solution, dyadic variance scaling, and the empirical polynomials
/// against the Gaussian family.
pub fn mc_suite(cfg: &SimConfig, n_fields: usize, alpha: &BigRational) -> Result<Vec<SuiteRow>> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..n_fields as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let noises: Vec<LatticeField> = seeds
        .par_iter()
        .map(|&s| synthesize_noise_seeded(cfg, s))
        .collect::<Result<_>>()?;
    let solutions: Vec<LatticeField> = noises
        .par_iter()
        .map(solve_linear)
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();

    let fit = fit_spectral_slope(&noises)?;
    let target = -2.0 * cfg.s;
    rows.push(if (fit.slope - target).abs() <= SLOPE_TOLERANCE {
        SuiteRow::pass("noise spectrum decays with the configured exponent")
    } else {
        SuiteRow::fail(
            "noise spectrum decays with the configured exponent",
            format!("slope {:.4} vs target {:.4}", fit.slope, target),
        )
    });

    let mut witness = None;
    for k in 1..=5usize {
        let z = paired_centredness(&solutions, k)?;
        if witness.is_none() && z.abs() >= Z_CAP {
            witness = Some(format!("degree {k}: z = {z:.2}"));
        }
    }
    rows.push(SuiteRow::from_witness(
        "adapted polynomials are centred on held-out fields",
        witness,
    ));

    let eps_list = [rat_int(1), rat(1, 2), rat(1, 4)];
    let scaling = variance_scaling_check(&solutions[0], alpha, &eps_list)?;
    let mut witness = None;
    for row in &scaling {
        let band = SE_FACTOR * row.se.max(SE_FLOOR);
        if witness.is_none() && (row.ratio - row.expected).abs() > band {
            witness = Some(format!(
                "eps {}: ratio {:.4} vs {:.4}",
                row.eps, row.ratio, row.expected
            ));
        }
    }
    rows.push(SuiteRow::from_witness(
        "subsampled variance follows the scaling exponent",
        witness,
    ));

    let coeffs = appell_hermite_rows(&solutions, 4)?;
    let mut witness = None;
    for row in &coeffs {
        let band = SE_FACTOR * row.se.max(SE_FLOOR);
        if witness.is_none() && (row.appell - row.hermite).abs() > band {
            witness = Some(format!(
                "degree {} coefficient {}: {:.4} vs {:.4}",
                row.k, row.j, row.appell, row.hermite
            ));
        }
    }
    rows.push(SuiteRow::from_witness(
        "empirical polynomials match the gaussian family",
        witness,
    ));

    Ok(rows)
}
