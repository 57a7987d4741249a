//! Recentering maps on formal series and their derivative counterparts.
//!
//! A spec lists the series `pi^(n)` that re-expand each polynomial variable;
//! the induced ring map fixes noise variables, sends `z_n` to
//! `z_n + pi^(n)`, and extends multiplicatively. Entries are computed along
//! two genuinely different routes: the memoized multiplicative recursion and
//! the closed exponential formula; their agreement is a standing test
//! obligation. The derivative map is the associated derivation, again with a
//! recursive route and a closed product-representation route.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::linform::LinearForm;
use crate::multiindex::{
    bracket, homogeneity, is_populated, MonomialIndex, Multiindex, Unit,
};
use crate::params::StructureParams;
use crate::poly::{Poly, Symbol};
use crate::ratio::{factorial, rat_int};
use crate::series::FormalSeries;

/// Re-expansion data for the polynomial variables: slot `n` maps each target
/// index `beta` to a symbolic coefficient.
///
/// Hard invariant: a nonzero entry at `(n, beta)` needs `|n|` strictly below
/// the homogeneity of `beta`. The optional strict flag further confines the
/// support to indices with nonnegative bracket or single polynomial units,
/// which is exactly what makes the map preserve the populated sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiSpec {
    slots: BTreeMap<MonomialIndex, BTreeMap<Multiindex, Poly>>,
    strict: bool,
}

impl PiSpec {
    pub fn empty(strict: bool) -> Self {
        PiSpec {
            slots: BTreeMap::new(),
            strict,
        }
    }

    pub fn new(
        params: &StructureParams,
        entries: impl IntoIterator<Item = ((MonomialIndex, Multiindex), Poly)>,
        strict: bool,
    ) -> Result<Self> {
        let mut slots: BTreeMap<MonomialIndex, BTreeMap<Multiindex, Poly>> = BTreeMap::new();
        for ((n, beta), value) in entries {
            if value.is_zero() {
                continue;
            }
            params.check_coords(n.coords())?;
            beta.validate(params)?;
            let degree = LinearForm::constant(rat_int(n.parabolic_degree() as i64));
            let hom = homogeneity(&beta, params);
            if degree.compare(&hom, params)? != std::cmp::Ordering::Less {
                return Err(Error::validation(format!(
                    "entry ({n}, {beta}): slot degree {} must lie strictly below the \
                     index homogeneity {}",
                    n.parabolic_degree(),
                    hom.eval(params)
                )));
            }
            if strict && !strict_support_ok(&beta) {
                return Err(Error::validation(format!(
                    "strict spec entry at {beta}: support must have nonnegative bracket \
                     or be a single polynomial unit"
                )));
            }
            let prev = slots.entry(n).or_default().insert(beta, value);
            if prev.is_some() {
                return Err(Error::validation("duplicate spec entry".to_string()));
            }
        }
        Ok(PiSpec { slots, strict })
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// True when every support index is populated: the hypothesis of the
    /// dependence lemma.
    pub fn is_population_supported(&self, params: &StructureParams) -> bool {
        self.slots
            .values()
            .flat_map(|m| m.keys())
            .all(|b| is_populated(b, params))
    }

    pub fn slots(&self) -> impl Iterator<Item = &MonomialIndex> {
        self.slots.keys()
    }

    pub fn entry(&self, n: &MonomialIndex, beta: &Multiindex) -> Poly {
        self.slots
            .get(n)
            .and_then(|m| m.get(beta))
            .cloned()
            .unwrap_or_else(Poly::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MonomialIndex, &Multiindex, &Poly)> {
        self.slots
            .iter()
            .flat_map(|(n, m)| m.iter().map(move |(b, v)| (n, b, v)))
    }

    /// The series `pi^(n)`.
    pub fn series(&self, n: &MonomialIndex) -> FormalSeries {
        let mut s = FormalSeries::zero();
        if let Some(m) = self.slots.get(n) {
            for (b, v) in m {
                s.set(b.clone(), v.clone());
            }
        }
        s
    }

    /// Union of the support indices over all slots.
    pub fn support(&self) -> BTreeSet<Multiindex> {
        self.slots
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.slots.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

fn strict_support_ok(beta: &Multiindex) -> bool {
    bracket(beta) >= 0 || (beta.is_purely_polynomial() && beta.poly_total() == 1)
}

/// Re-expansion data for the derivative map. Hard invariants: slot degree
/// strictly below `alpha + D/pbar`, and nonnegative bracket on the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPiSpec {
    slots: BTreeMap<MonomialIndex, BTreeMap<Multiindex, Poly>>,
}

impl DPiSpec {
    pub fn empty() -> Self {
        DPiSpec {
            slots: BTreeMap::new(),
        }
    }

    pub fn new(
        params: &StructureParams,
        entries: impl IntoIterator<Item = ((MonomialIndex, Multiindex), Poly)>,
    ) -> Result<Self> {
        let cap = params.alpha() + params.derivative_slack();
        let mut slots: BTreeMap<MonomialIndex, BTreeMap<Multiindex, Poly>> = BTreeMap::new();
        for ((n, beta), value) in entries {
            if value.is_zero() {
                continue;
            }
            params.check_coords(n.coords())?;
            beta.validate(params)?;
            if rat_int(n.parabolic_degree() as i64) >= cap {
                return Err(Error::validation(format!(
                    "derivative entry ({n}, {beta}): slot degree {} must lie strictly \
                     below {cap}",
                    n.parabolic_degree()
                )));
            }
            if bracket(&beta) < 0 {
                return Err(Error::validation(format!(
                    "derivative entry at {beta}: support must have nonnegative bracket"
                )));
            }
            let prev = slots.entry(n).or_default().insert(beta, value);
            if prev.is_some() {
                return Err(Error::validation(
                    "duplicate derivative spec entry".to_string(),
                ));
            }
        }
        Ok(DPiSpec { slots })
    }

    pub fn entry(&self, n: &MonomialIndex, beta: &Multiindex) -> Poly {
        self.slots
            .get(n)
            .and_then(|m| m.get(beta))
            .cloned()
            .unwrap_or_else(Poly::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MonomialIndex, &Multiindex, &Poly)> {
        self.slots
            .iter()
            .flat_map(|(n, m)| m.iter().map(move |(b, v)| (n, b, v)))
    }

    pub fn series(&self, n: &MonomialIndex) -> FormalSeries {
        let mut s = FormalSeries::zero();
        if let Some(m) = self.slots.get(n) {
            for (b, v) in m {
                s.set(b.clone(), v.clone());
            }
        }
        s
    }

    pub fn slots(&self) -> impl Iterator<Item = &MonomialIndex> {
        self.slots.keys()
    }

    pub fn support(&self) -> BTreeSet<Multiindex> {
        self.slots
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.slots.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// The recentering map induced by a spec, with a memoized recursive route
/// and an independent closed-formula route per entry.
/// Per-index skeleton of the exponential formula: one row per insertion
/// multiset, holding the falling-multiplicity weight, the derivative
/// monomial the insertions leave behind, and the expanded product of the
/// inserted entry series.
type ExpSkeleton = Vec<(BigRational, Multiindex, FormalSeries)>;

pub struct GammaEngine<'a> {
    params: &'a StructureParams,
    spec: &'a PiSpec,
    slot_list: Vec<MonomialIndex>,
    memo: Mutex<BTreeMap<Multiindex, FormalSeries>>,
    exp_memo: Mutex<BTreeMap<Multiindex, Arc<ExpSkeleton>>>,
    // One-slot hot cache in front of exp_memo: entry sweeps hold the source
    // index fixed, so the repeat lookup reduces to a single equality.
    exp_last: Mutex<Option<(Multiindex, Arc<ExpSkeleton>)>>,
}

impl<'a> GammaEngine<'a> {
    pub fn new(params: &'a StructureParams, spec: &'a PiSpec) -> Self {
        GammaEngine {
            params,
            spec,
            slot_list: spec.slots().cloned().collect(),
            memo: Mutex::new(BTreeMap::new()),
            exp_memo: Mutex::new(BTreeMap::new()),
            exp_last: Mutex::new(None),
        }
    }

    pub fn params(&self) -> &StructureParams {
        self.params
    }

    pub fn spec(&self) -> &PiSpec {
        self.spec
    }

    fn unit_image(&self, unit: &Unit) -> FormalSeries {
        match unit {
            Unit::Noise(k) => FormalSeries::monomial(Multiindex::unit_noise(*k)),
            Unit::Poly(n) => {
                let mut s = self.spec.series(n);
                s.add_to(&Multiindex::unit_poly(n.clone()), Poly::one());
                s
            }
        }
    }

    /// The full image of `z^gamma` by the multiplicative recursion, memoized.
    pub fn gamma_monomial(&self, gamma: &Multiindex) -> FormalSeries {
        if let Some(hit) = self.memo.lock().unwrap().get(gamma) {
            return hit.clone();
        }
        let result = match gamma.first_unit() {
            None => FormalSeries::monomial(Multiindex::zero()),
            Some(unit) => {
                let rest = gamma
                    .sub_unit(&unit)
                    .expect("first_unit is always subtractable");
                self.unit_image(&unit).mul(&self.gamma_monomial(&rest))
            }
        };
        self.memo
            .lock()
            .unwrap()
            .insert(gamma.clone(), result.clone());
        result
    }

    /// Entry by the recursive route: the `beta` coefficient of the
    /// recentered monomial `z^gamma`.
    pub fn gamma_entry_recursive(&self, gamma: &Multiindex, beta: &Multiindex) -> Poly {
        self.gamma_monomial(gamma).get(beta)
    }

    /// Entry by the exponential formula: the identity term, plus a sum over
    /// multisets of slot insertions (cut at the polynomial multiplicity of
    /// `gamma`, beyond which the iterated derivative vanishes), each
    /// weighted by a falling multiplicity product over the multiset
    /// symmetry and paired with the expanded product of the inserted entry
    /// series. Insertions never touch noise slots, so the entry vanishes
    /// outright unless `beta` dominates `gamma` there.
    pub fn gamma_entry(&self, gamma: &Multiindex, beta: &Multiindex) -> Poly {
        if !beta.noise_dominates(gamma) {
            return Poly::zero();
        }
        let mut total = if beta == gamma { Poly::one() } else { Poly::zero() };
        for (weight, reduced, expansion) in self.exp_skeleton(gamma).iter() {
            let Some(residue) = beta.checked_sub(reduced) else {
                continue;
            };
            let v = expansion.get(&residue);
            if !v.is_zero() {
                total += v.scale(weight);
            }
        }
        total
    }

    /// The target-independent half of the exponential formula, memoized per
    /// source index.
    fn exp_skeleton(&self, gamma: &Multiindex) -> Arc<ExpSkeleton> {
        {
            let last = self.exp_last.lock().unwrap();
            if let Some((g, hit)) = last.as_ref() {
                if g == gamma {
                    return hit.clone();
                }
            }
        }
        let cached = self.exp_memo.lock().unwrap().get(gamma).cloned();
        let skeleton = match cached {
            Some(hit) => hit,
            None => {
                let mut rows = Vec::new();
                for m in 1..=gamma.poly_total() {
                    let mut tuple: Vec<usize> = Vec::with_capacity(m as usize);
                    self.exp_tuples(0, m as usize, gamma, &mut tuple, &mut rows);
                }
                let rows = Arc::new(rows);
                self.exp_memo
                    .lock()
                    .unwrap()
                    .insert(gamma.clone(), rows.clone());
                rows
            }
        };
        *self.exp_last.lock().unwrap() = Some((gamma.clone(), skeleton.clone()));
        skeleton
    }

    fn exp_tuples(
        &self,
        start: usize,
        left: usize,
        gamma: &Multiindex,
        tuple: &mut Vec<usize>,
        skeleton: &mut ExpSkeleton,
    ) {
        if left == 0 {
            // Iterated derivative of z^gamma along the multiset: a single
            // monomial weighted by falling multiplicities over the run
            // lengths; the tuple is non-decreasing so runs are contiguous.
            let mut coeff = BigRational::one();
            let mut reduced = gamma.clone();
            let mut expansion = FormalSeries::monomial(Multiindex::zero());
            let mut i = 0;
            while i < tuple.len() {
                let slot = tuple[i];
                let mut times = 0u32;
                while i < tuple.len() && tuple[i] == slot {
                    times += 1;
                    i += 1;
                }
                let n = &self.slot_list[slot];
                let avail = gamma.poly_mult(n);
                for j in 0..times {
                    coeff *= rat_int((avail - j) as i64);
                }
                coeff /= BigRational::from_integer(factorial(times as u64));
                let series = self.spec.series(n);
                for _ in 0..times {
                    reduced = reduced
                        .checked_sub(&Multiindex::unit_poly(n.clone()))
                        .expect("multiplicity checked");
                    expansion = expansion.mul(&series);
                }
            }
            skeleton.push((coeff, reduced, expansion));
            return;
        }
        for slot in start..self.slot_list.len() {
            let used = tuple.iter().filter(|&&t| t == slot).count() as u32;
            if gamma.poly_mult(&self.slot_list[slot]) <= used {
                continue;
            }
            tuple.push(slot);
            self.exp_tuples(slot, left - 1, gamma, tuple, skeleton);
            tuple.pop();
        }
    }

    /// Apply to a series: each monomial is recentered and the results are
    /// summed; optionally truncate the output at an order cutoff.
    pub fn gamma_apply(
        &self,
        a: &FormalSeries,
        cutoff: Option<&BigRational>,
    ) -> FormalSeries {
        let mut out = FormalSeries::zero();
        for (gamma, coeff) in a.entries() {
            out = out.add(&self.gamma_monomial(gamma).scale_poly(coeff));
        }
        match cutoff {
            None => out,
            Some(c) => out.filter(|b| {
                crate::multiindex::order(b, self.params).eval(self.params) <= *c
            }),
        }
    }
}

/// The derivation attached to a pair of specs: kills noise variables, sends
/// `z_n` to the derivative series of slot `n`, and satisfies the twisted
/// product rule against the recentering map.
pub struct DGammaEngine<'a> {
    gamma: GammaEngine<'a>,
    dspec: &'a DPiSpec,
    memo: Mutex<BTreeMap<Multiindex, FormalSeries>>,
}

impl<'a> DGammaEngine<'a> {
    pub fn new(params: &'a StructureParams, spec: &'a PiSpec, dspec: &'a DPiSpec) -> Self {
        DGammaEngine {
            gamma: GammaEngine::new(params, spec),
            dspec,
            memo: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn gamma(&self) -> &GammaEngine<'a> {
        &self.gamma
    }

    pub fn dspec(&self) -> &DPiSpec {
        self.dspec
    }

    /// The image of `z^gamma` by the derivation recursion
    /// (product rule over a unit peeling), memoized.
    pub fn dgamma_monomial(&self, gamma: &Multiindex) -> FormalSeries {
        if let Some(hit) = self.memo.lock().unwrap().get(gamma) {
            return hit.clone();
        }
        let result = match gamma.first_unit() {
            None => FormalSeries::zero(),
            Some(unit) => {
                let rest = gamma
                    .sub_unit(&unit)
                    .expect("first_unit is always subtractable");
                let d_unit = match &unit {
                    Unit::Noise(_) => FormalSeries::zero(),
                    Unit::Poly(n) => self.dspec.series(n),
                };
                let g_unit = self.gamma.unit_image(&unit);
                d_unit
                    .mul(&self.gamma.gamma_monomial(&rest))
                    .add(&g_unit.mul(&self.dgamma_monomial(&rest)))
            }
        };
        self.memo
            .lock()
            .unwrap()
            .insert(gamma.clone(), result.clone());
        result
    }

    pub fn dgamma_entry_recursive(&self, gamma: &Multiindex, beta: &Multiindex) -> Poly {
        self.dgamma_monomial(gamma).get(beta)
    }

    /// Entry by the closed product representation: one derivative insertion
    /// per slot, recentered remainder, summed over splittings of `beta`.
    pub fn dgamma_entry(&self, gamma: &Multiindex, beta: &Multiindex) -> Poly {
        let mut total = Poly::zero();
        for (n, b1, value) in self.dspec.entries() {
            let mult = gamma.poly_mult(n);
            if mult == 0 {
                continue;
            }
            let Some(b2) = beta.checked_sub(b1) else {
                continue;
            };
            let reduced = gamma
                .checked_sub(&Multiindex::unit_poly(n.clone()))
                .expect("multiplicity checked");
            let g = self.gamma.gamma_monomial(&reduced).get(&b2);
            if g.is_zero() {
                continue;
            }
            total += (value * &g).scale(&rat_int(mult as i64));
        }
        total
    }

    pub fn dgamma_apply(&self, a: &FormalSeries) -> FormalSeries {
        let mut out = FormalSeries::zero();
        for (gamma, coeff) in a.entries() {
            out = out.add(&self.dgamma_monomial(gamma).scale_poly(coeff));
        }
        out
    }
}

/// Spec entries a single entry depends on, computed by recentering against a
/// shadow spec whose values are fresh tracking symbols and collecting the
/// symbols that survive in the requested coefficient.
pub fn gamma_dependencies(
    params: &StructureParams,
    spec: &PiSpec,
    gamma: &Multiindex,
    beta: &Multiindex,
) -> Result<BTreeSet<(MonomialIndex, Multiindex)>> {
    let (shadow, names) = shadow_pispec(params, spec)?;
    let engine = GammaEngine::new(params, &shadow);
    let entry = engine.gamma_entry_recursive(gamma, beta);
    Ok(resolve_shadow_symbols(&entry, &names))
}

/// Derivative-spec entries a derivative entry depends on; both specs are
/// shadowed so the collection is formula-level, then only derivative symbols
/// are reported.
pub fn dgamma_dependencies(
    params: &StructureParams,
    spec: &PiSpec,
    dspec: &DPiSpec,
    gamma: &Multiindex,
    beta: &Multiindex,
) -> Result<BTreeSet<(MonomialIndex, Multiindex)>> {
    let (shadow_pi, _) = shadow_pispec(params, spec)?;
    let mut names = BTreeMap::new();
    let mut entries = Vec::new();
    for (i, (n, b, _)) in dspec.entries().enumerate() {
        let sym = Symbol::new(format!("__dtrack{i}"));
        names.insert(sym.clone(), (n.clone(), b.clone()));
        entries.push(((n.clone(), b.clone()), Poly::symbol(sym)));
    }
    let shadow_d = DPiSpec::new(params, entries)?;
    let engine = DGammaEngine::new(params, &shadow_pi, &shadow_d);
    let entry = engine.dgamma_entry_recursive(gamma, beta);
    Ok(resolve_shadow_symbols(&entry, &names))
}

fn shadow_pispec(
    params: &StructureParams,
    spec: &PiSpec,
) -> Result<(PiSpec, BTreeMap<Symbol, (MonomialIndex, Multiindex)>)> {
    let mut names = BTreeMap::new();
    let mut entries = Vec::new();
    for (i, (n, b, _)) in spec.entries().enumerate() {
        let sym = Symbol::new(format!("__track{i}"));
        names.insert(sym.clone(), (n.clone(), b.clone()));
        entries.push(((n.clone(), b.clone()), Poly::symbol(sym)));
    }
    let shadow = PiSpec::new(params, entries, spec.is_strict())?;
    Ok((shadow, names))
}

fn resolve_shadow_symbols(
    entry: &Poly,
    names: &BTreeMap<Symbol, (MonomialIndex, Multiindex)>,
) -> BTreeSet<(MonomialIndex, Multiindex)> {
    entry
        .symbols()
        .into_iter()
        .filter_map(|s| names.get(&s).cloned())
        .collect()
}

/// Closed-form recentering entry on the polynomial sector: the coefficient
/// of the unit `beta_n` in the image of the unit `gamma_m`, a componentwise
/// binomial times a power of the displacement.
pub fn polynomial_sector_gamma(
    x: &[BigRational],
    y: &[BigRational],
    n: &MonomialIndex,
    m: &MonomialIndex,
) -> Result<BigRational> {
    if x.len() != n.coords() || y.len() != n.coords() || m.coords() != n.coords() {
        return Err(Error::validation(
            "point and exponent dimensions must agree".to_string(),
        ));
    }
    if !n.dominates(m) {
        return Ok(BigRational::zero());
    }
    let mut out = BigRational::from_integer(n.binomial(m));
    for i in 0..n.coords() {
        let diff = &y[i] - &x[i];
        for _ in 0..(n.0[i] - m.0[i]) {
            out *= diff.clone();
        }
    }
    Ok(out)
}

/// The polynomial-sector spec between two base points: entries
/// `(m, unit(n))` for `m` strictly below `n` componentwise-dominated, values
/// given by the closed form. Always strict.
pub fn polynomial_pispec(
    params: &StructureParams,
    x: &[BigRational],
    y: &[BigRational],
    degree_cap: u64,
) -> Result<PiSpec> {
    params.check_coords(x.len())?;
    params.check_coords(y.len())?;
    let mut entries = Vec::new();
    for n in super_monomials(params.coords(), degree_cap) {
        for m in sub_monomials(&n) {
            if m == n {
                continue;
            }
            let value = polynomial_sector_gamma(x, y, &n, &m)?;
            if value.is_zero() {
                continue;
            }
            entries.push((
                (m, Multiindex::unit_poly(n.clone())),
                Poly::constant(value),
            ));
        }
    }
    PiSpec::new(params, entries, true)
}

fn super_monomials(coords: usize, cap: u64) -> Vec<MonomialIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; coords];
    fn rec(coords: usize, pos: usize, budget: u64, cur: &mut Vec<u32>, out: &mut Vec<MonomialIndex>) {
        if pos == coords {
            out.push(MonomialIndex(cur.clone()));
            return;
        }
        let w = if pos == 0 { 2 } else { 1 };
        for c in 0..=(budget / w) {
            cur[pos] = c as u32;
            rec(coords, pos + 1, budget - c * w, cur, out);
        }
        cur[pos] = 0;
    }
    rec(coords, 0, cap, &mut cur, &mut out);
    out.sort();
    out
}

fn sub_monomials(n: &MonomialIndex) -> Vec<MonomialIndex> {
    let mut out = vec![MonomialIndex(vec![])];
    for &c in &n.0 {
        let mut next = Vec::new();
        for stem in &out {
            for v in 0..=c {
                let mut s = stem.clone();
                s.0.push(v);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// Result row of the axiom report.
#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    fn pass(axiom: &str) -> Self {
        AxiomCheck {
            axiom: axiom.to_string(),
            passed: true,
            counterexample: None,
        }
    }

    fn fail(axiom: &str, witness: String) -> Self {
        AxiomCheck {
            axiom: axiom.to_string(),
            passed: false,
            counterexample: Some(witness),
        }
    }
}

/// Exact verification of the structural axioms: identity at equal points,
/// closed-form entries and transitivity on the polynomial sector, fixing of
/// noise variables, multiplicativity across the two entry routes, base-case
/// realization with its recentering identity, the base forcing coefficient
/// by two counts, and population preservation for strict specs.
pub fn check_model_axioms(
    params: &StructureParams,
    spec: Option<&PiSpec>,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<Vec<AxiomCheck>> {
    let mut report = Vec::new();
    for p in points {
        params.check_coords(p.len())?;
    }
    if points.len() < 3 {
        return Err(Error::validation(
            "need at least three sample points".to_string(),
        ));
    }

    report.push(check_identity_at_equal_points(params, &points[0], degree_cap)?);
    report.push(check_closed_form_entries(params, points, degree_cap)?);
    report.push(check_polynomial_transitivity(params, points, degree_cap)?);
    report.push(check_noise_fixed(params, spec, points, degree_cap)?);
    report.push(check_multiplicativity(params, spec, points, degree_cap)?);
    report.push(check_base_realization(params, points, degree_cap)?);
    report.push(check_base_forcing_coefficient(params)?);
    if let Some(s) = spec {
        if s.is_strict() {
            report.push(check_population_preservation(params, s)?);
        }
    }
    Ok(report)
}

fn check_identity_at_equal_points(
    params: &StructureParams,
    x: &[BigRational],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "identical base points give the identity map";
    let spec = polynomial_pispec(params, x, x, degree_cap)?;
    if !spec.is_empty() {
        return Ok(AxiomCheck::fail(
            axiom,
            format!("spec between equal points has {} entries", spec.len()),
        ));
    }
    let engine = GammaEngine::new(params, &spec);
    for n in super_monomials(params.coords(), degree_cap.min(3)) {
        let gamma = Multiindex::unit_poly(n);
        let image = engine.gamma_monomial(&gamma);
        if image != FormalSeries::monomial(gamma.clone()) {
            return Ok(AxiomCheck::fail(
                axiom,
                format!("image of {gamma} is not itself"),
            ));
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

fn check_closed_form_entries(
    params: &StructureParams,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "polynomial-sector entries match the closed binomial form";
    let (x, y) = (&points[0], &points[1]);
    let spec = polynomial_pispec(params, x, y, degree_cap)?;
    let engine = GammaEngine::new(params, &spec);
    for n in super_monomials(params.coords(), degree_cap) {
        for m in super_monomials(params.coords(), degree_cap) {
            let expected = polynomial_sector_gamma(x, y, &n, &m)?;
            let gamma = Multiindex::unit_poly(m.clone());
            let beta = Multiindex::unit_poly(n.clone());
            let got = engine.gamma_entry(&gamma, &beta);
            let want = if n == m {
                Poly::one()
            } else {
                Poly::constant(expected)
            };
            if got != want {
                return Ok(AxiomCheck::fail(
                    axiom,
                    format!("entry at column {m}, row {n} disagrees with the closed form"),
                ));
            }
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

fn check_polynomial_transitivity(
    params: &StructureParams,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "recentering composes transitively across base points";
    for w in points.windows(3) {
        let (x, y, z) = (&w[0], &w[1], &w[2]);
        let units = super_monomials(params.coords(), degree_cap);
        // Entrywise composition on the unit sector.
        for n in &units {
            for m in &units {
                let mut acc = BigRational::zero();
                for r in &units {
                    acc += polynomial_sector_gamma(x, y, n, r)?
                        * polynomial_sector_gamma(y, z, r, m)?;
                }
                let direct = polynomial_sector_gamma(x, z, n, m)?;
                if acc != direct {
                    return Ok(AxiomCheck::fail(
                        axiom,
                        format!("composition fails at column {m}, row {n}"),
                    ));
                }
            }
        }
        // Series-level composition on a composite monomial.
        let spec_xy = polynomial_pispec(params, x, y, degree_cap)?;
        let spec_yz = polynomial_pispec(params, y, z, degree_cap)?;
        let spec_xz = polynomial_pispec(params, x, z, degree_cap)?;
        let e_xy = GammaEngine::new(params, &spec_xy);
        let e_yz = GammaEngine::new(params, &spec_yz);
        let e_xz = GammaEngine::new(params, &spec_xz);
        let mut probe = Multiindex::unit_noise(params.kmin());
        probe = probe.add(&Multiindex::unit_poly(MonomialIndex::zero(params.coords())));
        let composed = e_xy.gamma_apply(&e_yz.gamma_monomial(&probe), None);
        let direct = e_xz.gamma_monomial(&probe);
        if composed != direct {
            return Ok(AxiomCheck::fail(
                axiom,
                format!("series composition fails on {probe}"),
            ));
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

fn check_noise_fixed(
    params: &StructureParams,
    spec: Option<&PiSpec>,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "noise variables are fixed";
    let poly_spec = polynomial_pispec(params, &points[0], &points[1], degree_cap)?;
    let mut specs: Vec<&PiSpec> = vec![&poly_spec];
    if let Some(s) = spec {
        specs.push(s);
    }
    for s in specs {
        let engine = GammaEngine::new(params, s);
        for k in [params.kmin(), params.kmin() + 2] {
            let gamma = Multiindex::unit_noise(k);
            if engine.gamma_monomial(&gamma) != FormalSeries::monomial(gamma.clone()) {
                return Ok(AxiomCheck::fail(axiom, format!("image of {gamma} moved")));
            }
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

fn check_multiplicativity(
    params: &StructureParams,
    spec: Option<&PiSpec>,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "recentering is multiplicative across both entry routes";
    let poly_spec = polynomial_pispec(params, &points[0], &points[1], degree_cap)?;
    let mut specs: Vec<&PiSpec> = vec![&poly_spec];
    if let Some(s) = spec {
        specs.push(s);
    }
    let zero_n = MonomialIndex::zero(params.coords());
    for s in specs {
        let engine = GammaEngine::new(params, s);
        let g1 = Multiindex::unit_poly(zero_n.clone());
        let mut g2 = Multiindex::unit_noise(params.kmin());
        g2 = g2.add(&Multiindex::unit_poly(zero_n.clone()));
        let product = engine.gamma_monomial(&g1).mul(&engine.gamma_monomial(&g2));
        let sum = g1.add(&g2);
        for (beta, expected) in product.entries() {
            let direct = engine.gamma_entry(&sum, beta);
            if direct != *expected {
                return Ok(AxiomCheck::fail(
                    axiom,
                    format!("closed-formula entry at {beta} disagrees with the product"),
                ));
            }
        }
        if engine.gamma_monomial(&sum) != product {
            return Ok(AxiomCheck::fail(
                axiom,
                "recursive image of a sum is not the product of images".to_string(),
            ));
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

/// Base realization at a point: the polynomial-unit column realizes the
/// shifted monomial, and recentering reassembles it around another point.
fn check_base_realization(
    params: &StructureParams,
    points: &[Vec<BigRational>],
    degree_cap: u64,
) -> Result<AxiomCheck> {
    let axiom = "polynomial base columns realize shifted monomials coherently";
    let (x, y) = (&points[0], &points[1]);
    let coords: Vec<Symbol> = (0..params.coords())
        .map(|i| Symbol::new(format!("X{i}")))
        .collect();
    for n in super_monomials(params.coords(), degree_cap) {
        let around_x = displaced_power(&coords, x, &n);
        // Contract the closed-form entries against the realizations around y.
        let mut rebuilt = Poly::zero();
        for m in sub_monomials(&n) {
            let weight = polynomial_sector_gamma(x, y, &n, &m)?;
            rebuilt += displaced_power(&coords, y, &m).scale(&weight);
        }
        if rebuilt != around_x {
            return Ok(AxiomCheck::fail(
                axiom,
                format!("rebuilding the monomial {n} around the second point fails"),
            ));
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

fn displaced_power(coords: &[Symbol], base: &[BigRational], n: &MonomialIndex) -> Poly {
    let mut out = Poly::one();
    for i in 0..n.coords() {
        let var = &Poly::symbol(coords[i].clone()) - &Poly::constant(base[i].clone());
        for _ in 0..n.0[i] {
            out = &out * &var;
        }
    }
    out
}

/// The base forcing coefficient on the special sector, computed two ways:
/// the factorial quotient, and a literal count of distinct orderings of the
/// polynomial units.
fn check_base_forcing_coefficient(params: &StructureParams) -> Result<AxiomCheck> {
    let axiom = "base forcing coefficient equals the ordering count";
    let zero = MonomialIndex::zero(params.coords());
    let mut one = vec![0u32; params.coords()];
    one[1] = 1;
    let one = MonomialIndex(one);
    let cases: Vec<Vec<MonomialIndex>> = vec![
        vec![zero.clone(); params.kmin() as usize],
        {
            let mut v = vec![zero.clone(); params.kmin() as usize - 1];
            v.push(one.clone());
            v
        },
        {
            let mut v = vec![zero.clone(); params.kmin() as usize - 2];
            v.push(one.clone());
            v.push(one.clone());
            v
        },
    ];
    for units in cases {
        let mut beta = Multiindex::unit_noise(params.kmin());
        for n in &units {
            beta = beta.add(&Multiindex::unit_poly(n.clone()));
        }
        let formula = base_forcing_coefficient(params, &beta)?;
        let counted = count_distinct_orderings(&units);
        if formula != counted {
            return Ok(AxiomCheck::fail(
                axiom,
                format!("coefficient of {beta}: formula {formula}, count {counted}"),
            ));
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

/// `kmin! / prod over slots of multiplicity!` on the special sector.
pub fn base_forcing_coefficient(
    params: &StructureParams,
    beta: &Multiindex,
) -> Result<num::BigInt> {
    if beta.noise_mult(params.kmin()) != 1
        || beta.noise_total() != 1
        || beta.poly_total() != params.kmin() as u64
    {
        return Err(Error::validation(format!(
            "{beta} is not in the special base sector"
        )));
    }
    let mut denom = num::BigInt::one();
    for (_, mult) in beta.poly_slots() {
        denom *= factorial(mult as u64);
    }
    Ok(factorial(params.kmin() as u64) / denom)
}

fn count_distinct_orderings(units: &[MonomialIndex]) -> num::BigInt {
    use itertools::Itertools;
    let mut seen: BTreeSet<Vec<MonomialIndex>> = BTreeSet::new();
    for perm in units.iter().permutations(units.len()) {
        seen.insert(perm.into_iter().cloned().collect());
    }
    num::BigInt::from(seen.len())
}

fn check_population_preservation(
    params: &StructureParams,
    spec: &PiSpec,
) -> Result<AxiomCheck> {
    let axiom = "strict specs preserve the populated and bracket sectors";
    let engine = GammaEngine::new(params, spec);
    let mut samples: Vec<Multiindex> = vec![
        Multiindex::unit_poly(MonomialIndex::zero(params.coords())),
        Multiindex::unit_noise(params.kmin()),
    ];
    // The special sector and sums of support indices exercise the edge cases.
    let mut special = Multiindex::unit_noise(params.kmin());
    for _ in 0..params.kmin() {
        special = special.add(&Multiindex::unit_poly(MonomialIndex::zero(params.coords())));
    }
    samples.push(special);
    for b in spec.support() {
        if is_populated(&b, params) {
            samples.push(b);
        }
    }
    for gamma in &samples {
        if !is_populated(gamma, params) {
            continue;
        }
        let image = engine.gamma_monomial(gamma);
        for beta in image.support() {
            if !is_populated(beta, params) {
                return Ok(AxiomCheck::fail(
                    axiom,
                    format!("populated {gamma} maps onto non-populated {beta}"),
                ));
            }
        }
        if bracket(gamma) >= 0 {
            for beta in image.support() {
                if bracket(beta) < 0 {
                    return Ok(AxiomCheck::fail(
                        axiom,
                        format!("bracket sector leaks at {gamma} onto {beta}"),
                    ));
                }
            }
        }
    }
    Ok(AxiomCheck::pass(axiom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::{compare_order, discounted_homogeneity};
    use crate::ratio::rat;
    use std::cmp::Ordering;

    fn p() -> StructureParams {
        StructureParams::standard()
    }

    fn e(v: &[u32]) -> MonomialIndex {
        MonomialIndex(v.to_vec())
    }

    fn beta0() -> Multiindex {
        Multiindex::from_parts([(3, 1)], [(e(&[0, 0, 0, 0]), 2)])
    }

    fn spec_p(params: &StructureParams) -> PiSpec {
        PiSpec::new(
            params,
            [(
                (e(&[0, 0, 0, 0]), beta0()),
                Poly::symbol(Symbol::new("p")),
            )],
            true,
        )
        .unwrap()
    }

    #[test]
    fn empty_spec_is_the_identity() {
        let params = p();
        let spec = PiSpec::empty(true);
        let engine = GammaEngine::new(&params, &spec);
        let gamma = beta0();
        assert_eq!(engine.gamma_entry(&gamma, &gamma), Poly::one());
        assert_eq!(
            engine.gamma_entry(&gamma, &Multiindex::unit_noise(3)),
            Poly::zero()
        );
        assert_eq!(
            engine.gamma_entry_recursive(&gamma, &gamma),
            Poly::one()
        );
    }

    #[test]
    fn single_entry_spec_examples() {
        let params = p();
        let spec = spec_p(&params);
        let engine = GammaEngine::new(&params, &spec);
        let p_sym = Poly::symbol(Symbol::new("p"));

        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        assert_eq!(engine.gamma_entry(&e0, &beta0()), p_sym);
        assert_eq!(engine.gamma_entry_recursive(&e0, &beta0()), p_sym);

        let two_e0 = e0.add(&e0);
        let target = beta0().add(&e0);
        let doubled = p_sym.scale(&rat_int(2));
        assert_eq!(engine.gamma_entry(&two_e0, &target), doubled);
        assert_eq!(engine.gamma_entry_recursive(&two_e0, &target), doubled);

        // Noise variables are fixed.
        let f3 = Multiindex::unit_noise(3);
        assert_eq!(engine.gamma_entry(&f3, &f3), Poly::one());
        assert_eq!(engine.gamma_entry(&f3, &beta0()), Poly::zero());

        // Multiplicativity carries the entry across a noise factor.
        let g = f3.add(&e0);
        let b = f3.add(&beta0());
        assert_eq!(engine.gamma_entry(&g, &b), p_sym);
        assert_eq!(engine.gamma_entry_recursive(&g, &b), p_sym);
    }

    #[test]
    fn routes_agree_on_squared_support() {
        let params = p();
        let spec = spec_p(&params);
        let engine = GammaEngine::new(&params, &spec);
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        let gamma = e0.add(&e0);
        // Full image support from the recursive route, re-checked by the
        // exponential formula: includes the squared-spec term at 2*beta0.
        let image = engine.gamma_monomial(&gamma);
        assert_eq!(image.len(), 3);
        for (beta, expected) in image.entries() {
            assert_eq!(engine.gamma_entry(&gamma, beta), *expected);
        }
        let p2 = Poly::symbol(Symbol::new("p")).pow(2);
        assert_eq!(image.get(&beta0().add(&beta0())), p2);
    }

    #[test]
    fn strict_flag_rejects_multi_unit_polynomial_support() {
        let params = p();
        let bad = Multiindex::from_parts([], [(e(&[0, 1, 0, 0]), 2)]);
        let entry = ((e(&[0, 0, 0, 0]), bad.clone()), Poly::symbol(Symbol::new("p")));
        let strict = PiSpec::new(&params, [entry.clone()], true);
        assert!(matches!(strict, Err(Error::Validation(_))));
        let loose = PiSpec::new(&params, [entry], false);
        assert!(loose.is_ok());
    }

    #[test]
    fn degree_dominance_is_validated() {
        let params = p();
        // Slot degree 2 against a single unit of homogeneity 1: rejected.
        let entry = (
            (e(&[1, 0, 0, 0]), Multiindex::unit_poly(e(&[0, 1, 0, 0]))),
            Poly::one(),
        );
        let r = PiSpec::new(&params, [entry], false);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn derivative_spec_invariants() {
        let params = p();
        // Slot degree must stay below alpha + D/pbar (about 1.93...): degree
        // 2 is out, degree 1 is fine.
        let good = DPiSpec::new(
            &params,
            [((e(&[0, 1, 0, 0]), beta0()), Poly::symbol(Symbol::new("q")))],
        );
        assert!(good.is_ok());
        let bad_slot = DPiSpec::new(
            &params,
            [((e(&[1, 0, 0, 0]), beta0()), Poly::symbol(Symbol::new("q")))],
        );
        assert!(matches!(bad_slot, Err(Error::Validation(_))));
        let bad_bracket = DPiSpec::new(
            &params,
            [(
                (e(&[0, 0, 0, 0]), Multiindex::unit_poly(e(&[0, 0, 0, 0]))),
                Poly::symbol(Symbol::new("q")),
            )],
        );
        assert!(matches!(bad_bracket, Err(Error::Validation(_))));
    }

    #[test]
    fn derivative_map_examples() {
        let params = p();
        let spec = spec_p(&params);
        let dspec = DPiSpec::new(
            &params,
            [(
                (e(&[0, 0, 0, 0]), beta0()),
                Poly::symbol(Symbol::new("qhat")),
            )],
        )
        .unwrap();
        let engine = DGammaEngine::new(&params, &spec, &dspec);
        let q = Poly::symbol(Symbol::new("qhat"));
        let p_sym = Poly::symbol(Symbol::new("p"));

        // Noise columns die.
        let f3 = Multiindex::unit_noise(3);
        assert!(engine.dgamma_monomial(&f3).is_zero());
        assert_eq!(engine.dgamma_entry(&f3, &beta0()), Poly::zero());

        // Single polynomial column reads the derivative spec.
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        assert_eq!(engine.dgamma_entry(&e0, &beta0()), q);
        assert_eq!(engine.dgamma_entry_recursive(&e0, &beta0()), q);

        // Squared column: twice the derivative against the kept factor, and
        // the cross term lands at the doubled index.
        let gamma = e0.add(&e0);
        let target = beta0().add(&e0);
        assert_eq!(engine.dgamma_entry(&gamma, &target), q.scale(&rat_int(2)));
        assert_eq!(
            engine.dgamma_entry_recursive(&gamma, &target),
            q.scale(&rat_int(2))
        );
        let cross = beta0().add(&beta0());
        let expected_cross = (&p_sym * &q).scale(&rat_int(2));
        assert_eq!(engine.dgamma_entry(&gamma, &cross), expected_cross);
        assert_eq!(engine.dgamma_entry_recursive(&gamma, &cross), expected_cross);
    }

    #[test]
    fn derivation_law_holds_on_samples() {
        let params = p();
        let spec = spec_p(&params);
        let dspec = DPiSpec::new(
            &params,
            [(
                (e(&[0, 0, 0, 0]), beta0()),
                Poly::symbol(Symbol::new("qhat")),
            )],
        )
        .unwrap();
        let engine = DGammaEngine::new(&params, &spec, &dspec);
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        let a = FormalSeries::monomial(e0.clone()).add(&FormalSeries::monomial(beta0()));
        let b = FormalSeries::monomial(e0.add(&Multiindex::unit_noise(3)));
        let lhs = engine.dgamma_apply(&a.mul(&b));
        let rhs = engine
            .dgamma_apply(&a)
            .mul(&engine.gamma().gamma_apply(&b, None))
            .add(&engine.gamma().gamma_apply(&a, None).mul(&engine.dgamma_apply(&b)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dependencies_track_spec_entries() {
        let params = p();
        let spec = spec_p(&params);
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));

        // Purely polynomial column: the dependence is the single spec read.
        let deps = gamma_dependencies(&params, &spec, &e0, &beta0()).unwrap();
        assert_eq!(deps.len(), 1);
        assert!(deps.contains(&(e(&[0, 0, 0, 0]), beta0())));

        // Empty spec: nothing.
        let empty = PiSpec::empty(false);
        let none = gamma_dependencies(&params, &empty, &e0, &beta0()).unwrap();
        assert!(none.is_empty());

        // Squared column at the shifted row still reads exactly one entry.
        let deps2 =
            gamma_dependencies(&params, &spec, &e0.add(&e0), &beta0().add(&e0)).unwrap();
        assert_eq!(deps2.len(), 1);
        assert!(deps2.contains(&(e(&[0, 0, 0, 0]), beta0())));
    }

    #[test]
    fn dependency_bounds_for_populated_columns() {
        let params = p();
        let spec = spec_p(&params);
        assert!(spec.is_population_supported(&params));
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        let f3 = Multiindex::unit_noise(3);

        // Populated, not purely polynomial: strict descent.
        let gamma = f3.add(&e0);
        let beta = f3.add(&beta0());
        for (_, b_prime) in gamma_dependencies(&params, &spec, &gamma, &beta).unwrap() {
            assert_eq!(
                compare_order(&b_prime, &beta, &params).unwrap(),
                Ordering::Less
            );
        }

        // Populated and purely polynomial: not above.
        for (_, b_prime) in gamma_dependencies(&params, &spec, &e0, &beta0()).unwrap() {
            assert_ne!(
                compare_order(&b_prime, &beta0(), &params).unwrap(),
                Ordering::Greater
            );
        }
    }

    #[test]
    fn triangularity_on_the_sample_spec() {
        let params = p();
        let spec = spec_p(&params);
        let engine = GammaEngine::new(&params, &spec);
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        let columns = [
            e0.clone(),
            e0.add(&e0),
            Multiindex::unit_noise(3).add(&e0),
            beta0(),
        ];
        for gamma in &columns {
            let image = engine.gamma_monomial(gamma);
            for (beta, _) in image.entries() {
                if beta == gamma {
                    continue;
                }
                let hom_g = homogeneity(gamma, &params);
                let hom_b = homogeneity(beta, &params);
                assert_eq!(hom_g.compare(&hom_b, &params).unwrap(), Ordering::Less);
                let dis_g = discounted_homogeneity(gamma, &params);
                let dis_b = discounted_homogeneity(beta, &params);
                assert_eq!(dis_g.compare(&dis_b, &params).unwrap(), Ordering::Less);
                // Strict spec: order descent as well.
                assert_eq!(compare_order(gamma, beta, &params).unwrap(), Ordering::Less);
            }
        }
    }

    #[test]
    fn polynomial_sector_closed_form() {
        let x: Vec<BigRational> = vec![rat_int(0); 4];
        let y: Vec<BigRational> =
            vec![rat(1, 2), rat(-1, 3), rat_int(2), rat(3, 4)];
        // Equal exponents give 1.
        let n = e(&[1, 2, 0, 1]);
        assert_eq!(
            polynomial_sector_gamma(&x, &y, &n, &n).unwrap(),
            rat_int(1)
        );
        // Time-only step picks out the time displacement.
        let n1 = e(&[1, 0, 0, 0]);
        let m0 = e(&[0, 0, 0, 0]);
        assert_eq!(
            polynomial_sector_gamma(&x, &y, &n1, &m0).unwrap(),
            rat(1, 2)
        );
        // Non-dominated exponent vanishes.
        let m_big = e(&[0, 3, 0, 0]);
        assert_eq!(
            polynomial_sector_gamma(&x, &y, &n, &m_big).unwrap(),
            rat_int(0)
        );
    }

    #[test]
    fn axiom_report_passes_on_rational_points() {
        let params = p();
        let points: Vec<Vec<BigRational>> = vec![
            vec![rat_int(0), rat_int(0), rat_int(0), rat_int(0)],
            vec![rat(1, 2), rat(-1, 3), rat_int(1), rat(2, 5)],
            vec![rat(-3, 7), rat(1, 4), rat(5, 6), rat_int(-1)],
        ];
        let spec = spec_p(&params);
        let report = check_model_axioms(&params, Some(&spec), &points, 3).unwrap();
        assert!(report.len() >= 8);
        for check in &report {
            assert!(
                check.passed,
                "axiom failed: {} ({:?})",
                check.axiom, check.counterexample
            );
        }
    }

    #[test]
    fn base_forcing_coefficient_example() {
        let params = p();
        let mut beta = Multiindex::unit_noise(3);
        beta = beta.add(&Multiindex::unit_poly(e(&[0, 0, 0, 0])));
        beta = beta.add(&Multiindex::unit_poly(e(&[0, 0, 0, 0])));
        beta = beta.add(&Multiindex::unit_poly(e(&[0, 1, 0, 0])));
        assert_eq!(
            base_forcing_coefficient(&params, &beta).unwrap(),
            num::BigInt::from(3)
        );
    }

    #[test]
    fn sector_preservation_via_axioms() {
        let params = p();
        let spec = spec_p(&params);
        let report = check_model_axioms(
            &params,
            Some(&spec),
            &[
                vec![rat_int(0); 4],
                vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)],
                vec![rat_int(0), rat_int(1), rat_int(0), rat_int(0)],
            ],
            2,
        )
        .unwrap();
        let preservation = report
            .iter()
            .find(|c| c.axiom.contains("preserve"))
            .expect("strict spec triggers the preservation check");
        assert!(preservation.passed);
    }
}
