//! JSON bridges for the algebra types: stable, schema-checked conversions
//! between the exact in-memory structures and the text surface of the
//! command line. All rationals travel as strings like `"-11/20"`.

use std::collections::BTreeMap;

use num::BigRational;
use serde_json::{json, Map, Value};

use crate::appell::MomentSequence;
use crate::error::{Error, Result};
use crate::hierarchy::{DepNode, DependencyGraph, PiMinusExpr};
use crate::linform::LinearForm;
use crate::multiindex::{MonomialIndex, Multiindex};
use crate::params::StructureParams;
use crate::poly::{Monomial, Poly, Symbol};
use crate::recenter::{DPiSpec, PiSpec};
use crate::series::FormalSeries;

fn expect_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::validation(format!("{what}: expected a JSON object")))
}

fn expect_array<'a>(value: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::validation(format!("{what}: expected a JSON array")))
}

fn expect_u32(value: &Value, what: &str) -> Result<u32> {
    value
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::validation(format!("{what}: expected a small nonnegative integer")))
}

/// Rationals are accepted as `"p/q"` strings or plain JSON integers.
pub fn rational_from_json(value: &Value, what: &str) -> Result<BigRational> {
    match value {
        Value::String(s) => crate::ratio::parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(crate::ratio::rat_int)
            .ok_or_else(|| Error::validation(format!("{what}: non-integral number; use a \"p/q\" string"))),
        _ => Err(Error::validation(format!(
            "{what}: expected a \"p/q\" string or an integer"
        ))),
    }
}

pub fn rational_to_json(r: &BigRational) -> Value {
    Value::String(crate::ratio::format_rational(r))
}

pub fn params_to_json(params: &StructureParams) -> Value {
    json!({
        "d": params.d(),
        "kmin": params.kmin(),
        "alpha": rational_to_json(params.alpha()),
        "kappa": rational_to_json(params.kappa()),
        "pbar": rational_to_json(params.pbar()),
    })
}

/// Load parameters; `kappa` defaults to `1/100` and `pbar` to the documented
/// smallest admissible ratio when omitted.
pub fn params_from_json(value: &Value) -> Result<StructureParams> {
    let obj = expect_object(value, "params")?;
    let d = expect_u32(
        obj.get("d")
            .ok_or_else(|| Error::validation("params: missing \"d\""))?,
        "params.d",
    )?;
    let kmin = expect_u32(
        obj.get("kmin")
            .ok_or_else(|| Error::validation("params: missing \"kmin\""))?,
        "params.kmin",
    )?;
    let alpha = rational_from_json(
        obj.get("alpha")
            .ok_or_else(|| Error::validation("params: missing \"alpha\""))?,
        "params.alpha",
    )?;
    let kappa = match obj.get("kappa") {
        Some(v) => rational_from_json(v, "params.kappa")?,
        None => crate::ratio::rat(1, 100),
    };
    let pbar = match obj.get("pbar") {
        Some(v) => Some(rational_from_json(v, "params.pbar")?),
        None => None,
    };
    StructureParams::new(d, kmin, alpha, kappa, pbar)
}

pub fn monomial_to_json(n: &MonomialIndex) -> Value {
    Value::Array(n.0.iter().map(|&c| json!(c)).collect())
}

pub fn monomial_from_json(value: &Value, what: &str) -> Result<MonomialIndex> {
    let arr = expect_array(value, what)?;
    let mut coords = Vec::with_capacity(arr.len());
    for entry in arr {
        coords.push(expect_u32(entry, what)?);
    }
    Ok(MonomialIndex(coords))
}

/// Multiindex schema: `{"k": {"3": 2}, "n": [{"idx": [1,0,0,0], "mult": 2}]}`;
/// both keys optional.
pub fn multiindex_to_json(beta: &Multiindex) -> Value {
    let mut noise = Map::new();
    for (k, mult) in beta.noise_slots() {
        noise.insert(k.to_string(), json!(mult));
    }
    let poly: Vec<Value> = beta
        .poly_slots()
        .map(|(n, mult)| json!({"idx": monomial_to_json(n), "mult": mult}))
        .collect();
    json!({"k": Value::Object(noise), "n": poly})
}

pub fn multiindex_from_json(value: &Value, params: &StructureParams) -> Result<Multiindex> {
    let obj = expect_object(value, "multiindex")?;
    let mut noise = Vec::new();
    if let Some(k_map) = obj.get("k") {
        let k_obj = expect_object(k_map, "multiindex.k")?;
        for (slot, mult) in k_obj {
            let k: u32 = slot.parse().map_err(|_| {
                Error::validation(format!("multiindex.k: slot key {slot:?} is not an integer"))
            })?;
            noise.push((k, expect_u32(mult, "multiindex.k multiplicity")?));
        }
    }
    let mut poly = Vec::new();
    if let Some(n_list) = obj.get("n") {
        for entry in expect_array(n_list, "multiindex.n")? {
            let entry_obj = expect_object(entry, "multiindex.n entry")?;
            let idx = monomial_from_json(
                entry_obj
                    .get("idx")
                    .ok_or_else(|| Error::validation("multiindex.n entry: missing \"idx\""))?,
                "multiindex.n idx",
            )?;
            let mult = expect_u32(
                entry_obj
                    .get("mult")
                    .ok_or_else(|| Error::validation("multiindex.n entry: missing \"mult\""))?,
                "multiindex.n mult",
            )?;
            poly.push((idx, mult));
        }
    }
    let beta = Multiindex::from_parts(noise, poly);
    beta.validate(params)?;
    Ok(beta)
}

/// Linear form schema: `{"const": "p/q", "alpha": "p/q", "kappa": "p/q"}`.
pub fn linform_to_json(form: &LinearForm) -> Value {
    json!({
        "const": rational_to_json(&form.c0),
        "alpha": rational_to_json(&form.c_alpha),
        "kappa": rational_to_json(&form.c_kappa),
    })
}

pub fn linform_from_json(value: &Value) -> Result<LinearForm> {
    let obj = expect_object(value, "linear form")?;
    let read = |key: &str| -> Result<BigRational> {
        match obj.get(key) {
            Some(v) => rational_from_json(v, key),
            None => Ok(crate::ratio::rat_int(0)),
        }
    };
    Ok(LinearForm::new(read("const")?, read("alpha")?, read("kappa")?))
}

/// Polynomial schema: array of
/// `{"symbols": [["name", power], ...], "rational": "p/q"}`.
pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(monomial, coeff)| {
            let symbols: Vec<Value> = monomial
                .iter()
                .map(|(sym, power)| json!([sym.0, power]))
                .collect();
            json!({"symbols": symbols, "rational": rational_to_json(coeff)})
        })
        .collect();
    Value::Array(terms)
}

pub fn poly_from_json(value: &Value) -> Result<Poly> {
    let arr = expect_array(value, "polynomial")?;
    let mut out = Poly::zero();
    for term in arr {
        let obj = expect_object(term, "polynomial term")?;
        let coeff = rational_from_json(
            obj.get("rational")
                .ok_or_else(|| Error::validation("polynomial term: missing \"rational\""))?,
            "polynomial rational",
        )?;
        let mut monomial: Monomial = BTreeMap::new();
        if let Some(symbols) = obj.get("symbols") {
            for pair in expect_array(symbols, "polynomial symbols")? {
                let pair = expect_array(pair, "polynomial symbol pair")?;
                if pair.len() != 2 {
                    return Err(Error::validation(
                        "polynomial symbol pair: expected [name, power]",
                    ));
                }
                let name = pair[0]
                    .as_str()
                    .ok_or_else(|| Error::validation("polynomial symbol name: expected a string"))?;
                let p = expect_u32(&pair[1], "polynomial symbol power")?;
                if p > 0 {
                    *monomial.entry(Symbol::new(name.to_owned())).or_insert(0) += p;
                }
            }
        }
        out.add_term(monomial, coeff);
    }
    Ok(out)
}

/// Series schema: array of `{"beta": multiindex, "coeff": polynomial}`.
pub fn series_to_json(series: &FormalSeries) -> Value {
    let entries: Vec<Value> = series
        .entries()
        .map(|(beta, poly)| json!({"beta": multiindex_to_json(beta), "coeff": poly_to_json(poly)}))
        .collect();
    Value::Array(entries)
}

pub fn series_from_json(value: &Value, params: &StructureParams) -> Result<FormalSeries> {
    let mut out = FormalSeries::zero();
    for entry in expect_array(value, "series")? {
        let entry_obj = expect_object(entry, "series entry")?;
        let beta = multiindex_from_json(
            entry_obj
                .get("beta")
                .ok_or_else(|| Error::validation("series entry: missing \"beta\""))?,
            params,
        )?;
        let poly = poly_from_json(
            entry_obj
                .get("coeff")
                .ok_or_else(|| Error::validation("series entry: missing \"coeff\""))?,
        )?;
        out.add_to(&beta, poly);
    }
    Ok(out)
}

fn spec_entries_from_json(
    value: &Value,
    params: &StructureParams,
    what: &str,
) -> Result<Vec<((MonomialIndex, Multiindex), Poly)>> {
    let mut entries = Vec::new();
    for entry in expect_array(value, what)? {
        let obj = expect_object(entry, "spec entry")?;
        let slot = monomial_from_json(
            obj.get("slot")
                .ok_or_else(|| Error::validation("spec entry: missing \"slot\""))?,
            "spec slot",
        )?;
        let beta = multiindex_from_json(
            obj.get("beta")
                .ok_or_else(|| Error::validation("spec entry: missing \"beta\""))?,
            params,
        )?;
        let value = poly_from_json(
            obj.get("coeff")
                .ok_or_else(|| Error::validation("spec entry: missing \"coeff\""))?,
        )?;
        entries.push(((slot, beta), value));
    }
    Ok(entries)
}

/// Recentering spec schema:
/// `{"strict": bool, "entries": [{"slot": [n...], "beta": multiindex, "coeff": polynomial}]}`.
pub fn pispec_from_json(value: &Value, params: &StructureParams) -> Result<PiSpec> {
    let obj = expect_object(value, "recentering spec")?;
    let strict = obj.get("strict").and_then(Value::as_bool).unwrap_or(true);
    let entries = match obj.get("entries") {
        Some(v) => spec_entries_from_json(v, params, "spec.entries")?,
        None => Vec::new(),
    };
    PiSpec::new(params, entries, strict)
}

pub fn pispec_to_json(spec: &PiSpec) -> Value {
    let entries: Vec<Value> = spec
        .entries()
        .map(|(slot, beta, value)| {
            json!({
                "slot": monomial_to_json(slot),
                "beta": multiindex_to_json(beta),
                "coeff": poly_to_json(value),
            })
        })
        .collect();
    json!({"strict": spec.is_strict(), "entries": entries})
}

/// Derivative spec schema: same entries, no strictness flag.
pub fn dpispec_from_json(value: &Value, params: &StructureParams) -> Result<DPiSpec> {
    let obj = expect_object(value, "derivative spec")?;
    let entries = match obj.get("entries") {
        Some(v) => spec_entries_from_json(v, params, "spec.entries")?,
        None => Vec::new(),
    };
    DPiSpec::new(params, entries)
}

/// Moment schema: `{"m": ["1", "0", "1", ...]}`.
pub fn moments_from_json(value: &Value) -> Result<MomentSequence> {
    let obj = expect_object(value, "moments")?;
    let list = expect_array(
        obj.get("m")
            .ok_or_else(|| Error::validation("moments: missing \"m\""))?,
        "moments.m",
    )?;
    let mut m = Vec::with_capacity(list.len());
    for (j, entry) in list.iter().enumerate() {
        m.push(rational_from_json(entry, &format!("moments.m[{j}]"))?);
    }
    MomentSequence::new(m)
}

pub fn moments_to_json(m: &MomentSequence) -> Value {
    json!({"m": m.moments().iter().map(rational_to_json).collect::<Vec<_>>()})
}

/// Expansion AST schema: `{"beta": multiindex, "terms": [{"eps": linear form,
/// "coeff": "p/q", "w": degree or null, "pi": [multiindex...], "counterterm":
/// {"k": slot, "beta": multiindex} or null, "xi": bool, "taylor": linear form
/// or null}]}`.
pub fn piminus_to_json(expr: &PiMinusExpr) -> Value {
    let terms: Vec<Value> = expr
        .terms()
        .iter()
        .map(|term| {
            json!({
                "eps": linform_to_json(term.eps_exponent()),
                "coeff": rational_to_json(term.coefficient()),
                "w": term.w_index().map_or(Value::Null, |w| json!(w)),
                "pi": term
                    .pi_factors()
                    .iter()
                    .map(multiindex_to_json)
                    .collect::<Vec<_>>(),
                "counterterm": term.counterterm().map_or(Value::Null, |(k, beta0)| {
                    json!({"k": k, "beta": multiindex_to_json(beta0)})
                }),
                "xi": term.is_xi(),
                "taylor": term.taylor().map_or(Value::Null, linform_to_json),
            })
        })
        .collect();
    json!({"beta": multiindex_to_json(expr.beta()), "terms": terms})
}

/// Dependency graph schema: labels with order keys, edge pairs by label.
pub fn depgraph_to_json(graph: &DependencyGraph, params: &StructureParams) -> Value {
    let node_row = |node: &DepNode| {
        json!({
            "label": node.label(),
            "key": linform_to_json(&node.key(params)),
            "value": rational_to_json(&node.key(params).eval(params)),
        })
    };
    json!({
        "nodes": graph.nodes().map(node_row).collect::<Vec<_>>(),
        "edges": graph
            .edges()
            .map(|(a, b)| json!([a.label(), b.label()]))
            .collect::<Vec<_>>(),
        "defining": graph
            .defining_links()
            .map(|(a, b)| json!([a.label(), b.label()]))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    #[test]
    fn params_round_trip() {
        let p = StructureParams::standard();
        let value = params_to_json(&p);
        let back = params_from_json(&value).unwrap();
        assert_eq!(back.alpha(), p.alpha());
        assert_eq!(back.pbar(), p.pbar());
    }

    #[test]
    fn params_defaults_apply() {
        let value = json!({"d": 3, "kmin": 3, "alpha": "-11/20"});
        let p = params_from_json(&value).unwrap();
        assert_eq!(p.kappa(), &rat(1, 100));
        assert_eq!(p.pbar(), &rat(201, 100));
    }

    #[test]
    fn multiindex_round_trip() {
        let p = StructureParams::standard();
        let beta = Multiindex::from_parts(
            [(3, 2), (5, 1)],
            [(MonomialIndex(vec![1, 0, 0, 0]), 2)],
        );
        let back = multiindex_from_json(&multiindex_to_json(&beta), &p).unwrap();
        assert_eq!(back, beta);
    }

    #[test]
    fn multiindex_rejects_bad_slots() {
        let p = StructureParams::standard();
        let even = json!({"k": {"4": 1}, "n": []});
        assert!(multiindex_from_json(&even, &p).is_err());
        let short = json!({"k": {}, "n": [{"idx": [1, 0], "mult": 1}]});
        assert!(multiindex_from_json(&short, &p).is_err());
    }

    #[test]
    fn linform_round_trip() {
        let form = LinearForm::new(rat(2, 1), rat(-3, 4), rat(1, 100));
        assert_eq!(linform_from_json(&linform_to_json(&form)).unwrap(), form);
        let sparse = json!({"alpha": "1/2"});
        let parsed = linform_from_json(&sparse).unwrap();
        assert_eq!(parsed, LinearForm::alpha_multiple(rat(1, 2)));
    }

    #[test]
    fn poly_and_series_round_trip() {
        let p = StructureParams::standard();
        let mut poly = Poly::symbol(Symbol::new("p"));
        poly = &poly * &poly;
        poly.add_term(BTreeMap::new(), rat(-1, 2));
        let mut series = FormalSeries::zero();
        series.set(Multiindex::unit_noise(3), poly.clone());
        let back = series_from_json(&series_to_json(&series), &p).unwrap();
        assert_eq!(back.get(&Multiindex::unit_noise(3)), poly);
    }

    #[test]
    fn poly_and_series_wire_shape() {
        let p = StructureParams::standard();
        let mut poly = Poly::symbol(Symbol::new("p"));
        poly = &poly * &poly;
        poly.add_term(BTreeMap::new(), rat(-1, 2));
        let terms = poly_to_json(&poly);
        assert_eq!(
            terms,
            json!([
                {"symbols": [], "rational": "-1/2"},
                {"symbols": [["p", 2]], "rational": "1"},
            ])
        );
        let mut series = FormalSeries::zero();
        series.set(Multiindex::unit_noise(3), poly.clone());
        let entries = series_to_json(&series);
        let arr = entries.as_array().unwrap();
        assert_eq!(arr.len(), 1);
        assert_eq!(arr[0].get("beta"), Some(&multiindex_to_json(&Multiindex::unit_noise(3))));
        assert_eq!(arr[0].get("coeff"), Some(&terms));
        assert_eq!(series_from_json(&entries, &p).unwrap().get(&Multiindex::unit_noise(3)), poly);
    }

    #[test]
    fn moments_round_trip() {
        let m = MomentSequence::new(vec![rat_int(1), rat_int(0), rat(3, 7)]).unwrap();
        let back = moments_from_json(&moments_to_json(&m)).unwrap();
        assert_eq!(back, m);
        assert!(moments_from_json(&json!({"m": ["2"]})).is_err());
    }

    #[test]
    fn piminus_serialization_shape() {
        let p = StructureParams::standard();
        let beta = Multiindex::unit_noise(3).add(&Multiindex::unit_noise(3));
        let expr = crate::hierarchy::expand_pi_minus(&beta, &p).unwrap();
        let value = piminus_to_json(&expr);
        let terms = value.get("terms").unwrap().as_array().unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].get("w").unwrap().as_u64(), Some(2));
        assert!(terms[1].get("counterterm").unwrap().is_object());
        assert_eq!(terms[1].get("coeff").unwrap().as_str(), Some("-1"));
    }
}
