//! Text codecs: JSON adjuster and payoff specifications, CSV paths, audits and evidence
//! streams, and JSON reports. Reported numbers use 12 significant digits and `inf`.

use std::io::{Read, Write};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::adjuster::{Adjuster, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::evidence::{CalibratedStream, Capital, EvidenceStream};
use crate::oracle::OracleReport;
use crate::pricing::{GeneralPayoff, PriceResult, SimplePayoff};
use crate::strategy::{CapitalRecord, PricePath};

/// 12 significant digits; plain decimals on `[1e-5, 1e15)`, scientific outside, `inf` for infinity.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let a = x.abs();
    if (1e-5..1e15).contains(&a) {
        let prec = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.prec$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
    } else {
        s.push_str(".0");
    }
    s
}

/// `x` after a trip through [`format_num`].
pub fn round_num(x: f64) -> f64 {
    parse_num(&format_num(x)).unwrap_or(x)
}

/// Accepts anything `f64::from_str` does, including `inf`.
pub fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("`{s}` is not a number")))
}

/// Serde adapter for report numbers: 12-digit JSON numbers, strings for non-finite values.
pub mod num12 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(round_num(*x))
        } else {
            s.serialize_str(&format_num(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => parse_num(&t).map_err(de::Error::custom),
        }
    }

    pub mod pairs {
        use super::*;

        #[derive(Serialize, Deserialize)]
        struct Pair(#[serde(with = "super")] f64, #[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &[(f64, f64)], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&(a, b)| Pair(a, b)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(f64, f64)>, D::Error> {
            Ok(Vec::<Pair>::deserialize(d)?.into_iter().map(|Pair(a, b)| (a, b)).collect())
        }
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        // serde_json appends " at line L column C"; state the position first instead
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        if path == "." {
            Error::Parse(format!("line {} column {}: {msg}", inner.line(), inner.column()))
        } else {
            Error::Parse(format!("line {} column {}: field `{path}`: {msg}", inner.line(), inner.column()))
        }
    })
}

fn at_field(path: &str, e: Error) -> Error {
    let p = |m: String| format!("field `{path}`: {m}");
    match e {
        Error::InvalidMeasure(m) => Error::InvalidMeasure(p(m)),
        Error::InvalidAdjuster(m) => Error::InvalidAdjuster(p(m)),
        Error::InvalidPayoff(m) => Error::InvalidPayoff(p(m)),
        Error::Domain(m) => Error::Domain(p(m)),
        other => other,
    }
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdjusterDoc {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cash: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass_infinity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<AdjusterDoc>>,
}

fn require<T: Clone>(v: &Option<T>, path: &str, name: &str, kind: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Parse(format!("field `{}`: required for `{kind}`", join(path, name))))
}

/// Rejects fields that are present but meaningless for the chosen tag.
fn reject_extra(present: &[(&str, bool)], allowed: &[&str], path: &str, kind: &str) -> Result<()> {
    match present.iter().find(|(name, set)| *set && !allowed.contains(name)) {
        Some((name, _)) => Err(Error::Parse(format!("field `{}`: not used by `{kind}`", join(path, name)))),
        None => Ok(()),
    }
}

impl AdjusterDoc {
    fn build(&self, path: &str) -> Result<Adjuster<f64>> {
        let kind = self.family.as_str();
        let present = [
            ("alpha", self.alpha.is_some()),
            ("cash", self.cash.is_some()),
            ("u", self.u.is_some()),
            ("atoms", self.atoms.is_some()),
            ("mass_infinity", self.mass_infinity.is_some()),
            ("c", self.c.is_some()),
            ("inner", self.inner.is_some()),
        ];
        let a = match kind {
            "power" => {
                reject_extra(&present, &["alpha", "cash"], path, kind)?;
                Adjuster::Power { alpha: require(&self.alpha, path, "alpha", kind)?, cash: self.cash.unwrap_or(0.0) }
            }
            "log" => {
                reject_extra(&present, &["alpha"], path, kind)?;
                Adjuster::Log { alpha: require(&self.alpha, path, "alpha", kind)? }
            }
            "threshold" => {
                reject_extra(&present, &["u"], path, kind)?;
                Adjuster::Threshold { u: require(&self.u, path, "u", kind)? }
            }
            "discrete" => {
                reject_extra(&present, &["atoms", "mass_infinity"], path, kind)?;
                let atoms = require(&self.atoms, path, "atoms", kind)?;
                Adjuster::Discrete(
                    DiscreteMeasure::from_pairs(&atoms, self.mass_infinity.unwrap_or(0.0))
                        .map_err(|e| at_field(&join(path, "atoms"), e))?,
                )
            }
            "cashmix" => {
                reject_extra(&present, &["c", "inner"], path, kind)?;
                let inner = require(&self.inner, path, "inner", kind)?;
                Adjuster::CashMix { c: require(&self.c, path, "c", kind)?, inner: Box::new(inner.build(&join(path, "inner"))?) }
            }
            other => {
                return Err(Error::Parse(format!(
                    "field `{}`: unknown family `{other}`, expected one of power, log, threshold, discrete, cashmix",
                    join(path, "family")
                )))
            }
        };
        a.validate().map_err(|e| at_field(if path.is_empty() { "." } else { path }, e))?;
        Ok(a)
    }

    fn of(a: &Adjuster<f64>) -> Self {
        let doc = |family: &str| AdjusterDoc { family: family.into(), ..Default::default() };
        match a {
            Adjuster::Power { alpha, cash } => AdjusterDoc { alpha: Some(*alpha), cash: Some(*cash), ..doc("power") },
            Adjuster::Log { alpha } => AdjusterDoc { alpha: Some(*alpha), ..doc("log") },
            Adjuster::Threshold { u } => AdjusterDoc { u: Some(*u), ..doc("threshold") },
            Adjuster::Discrete(m) => AdjusterDoc {
                atoms: Some(m.atoms().iter().map(|a| (a.location, a.mass)).collect()),
                mass_infinity: Some(m.mass_infinity()),
                ..doc("discrete")
            },
            Adjuster::CashMix { c, inner } => {
                AdjusterDoc { c: Some(*c), inner: Some(Box::new(Self::of(inner))), ..doc("cashmix") }
            }
        }
    }
}

pub fn parse_adjuster(text: &str) -> Result<Adjuster<f64>> {
    from_json::<AdjusterDoc>(text)?.build("")
}

/// Full-precision JSON, so [`parse_adjuster`] recovers the same value.
pub fn adjuster_to_json(a: &Adjuster<f64>) -> String {
    serde_json::to_string(&AdjusterDoc::of(a)).expect("adjuster serializes")
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffDoc {
    payoff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strike: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cash: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fractions: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<PayoffDoc>>,
}

/// A parsed payoff document: a function of the maximum alone, or of the maximum and the price.
#[derive(Debug, Clone)]
pub enum PayoffSpec {
    Simple(SimplePayoff),
    General(GeneralPayoff),
}

impl PayoffSpec {
    pub fn general(&self) -> GeneralPayoff {
        match self {
            PayoffSpec::Simple(g) => GeneralPayoff::SimpleLift(g.clone()),
            PayoffSpec::General(f) => f.clone(),
        }
    }
}

impl PayoffDoc {
    fn present(&self) -> [(&'static str, bool); 12] {
        [
            ("k", self.k.is_some()),
            ("u", self.u.is_some()),
            ("scale", self.scale.is_some()),
            ("cap", self.cap.is_some()),
            ("beta", self.beta.is_some()),
            ("strike", self.strike.is_some()),
            ("cash", self.cash.is_some()),
            ("grid", self.grid.is_some()),
            ("values", self.values.is_some()),
            ("x_star", self.x_star.is_some()),
            ("fractions", self.fractions.is_some()),
            ("inner", self.inner.is_some()),
        ]
    }

    fn values_as<T: for<'de> Deserialize<'de>>(&self, path: &str, kind: &str) -> Result<T> {
        let v = require(&self.values, path, "values", kind)?;
        serde_json::from_value(v).map_err(|e| Error::Parse(format!("field `{}`: {e}", join(path, "values"))))
    }

    fn simple(&self, path: &str) -> Result<SimplePayoff> {
        let kind = self.payoff.as_str();
        let present = self.present();
        let extra = |allowed: &[&str]| reject_extra(&present, allowed, path, kind);
        let g = match kind {
            "constant" => {
                extra(&["k"])?;
                SimplePayoff::Constant { k: require(&self.k, path, "k", kind)? }
            }
            "threshold_call" => {
                extra(&["u", "scale"])?;
                SimplePayoff::ThresholdCall { u: require(&self.u, path, "u", kind)?, scale: self.scale.unwrap_or(1.0) }
            }
            "capped" => {
                extra(&["cap"])?;
                SimplePayoff::Capped { cap: require(&self.cap, path, "cap", kind)? }
            }
            "power" => {
                extra(&["beta", "scale"])?;
                SimplePayoff::PowerPayoff { beta: require(&self.beta, path, "beta", kind)?, scale: self.scale.unwrap_or(1.0) }
            }
            "fixed_strike" => {
                extra(&["strike", "inner"])?;
                let inner = require(&self.inner, path, "inner", kind)?;
                SimplePayoff::FixedStrike {
                    inner: Box::new(inner.simple(&join(path, "inner"))?),
                    strike: require(&self.strike, path, "strike", kind)?,
                }
            }
            "tabulated" => {
                extra(&["grid", "values"])?;
                SimplePayoff::Tabulated { grid: require(&self.grid, path, "grid", kind)?, values: self.values_as(path, kind)? }
            }
            "simple_lift" | "floating_strike_put" | "cash_plus_lift" | "tabulated_2d" => {
                return Err(Error::Parse(format!(
                    "field `{}`: `{kind}` depends on the price; expected a payoff of the maximum alone",
                    join(path, "payoff")
                )))
            }
            other => return Err(Error::Parse(format!("field `{}`: unknown payoff `{other}`", join(path, "payoff")))),
        };
        g.validate().map_err(|e| at_field(if path.is_empty() { "." } else { path }, e))?;
        Ok(g)
    }

    fn build(&self) -> Result<PayoffSpec> {
        let kind = self.payoff.as_str();
        let present = self.present();
        let inner = || -> Result<SimplePayoff> { require(&self.inner, "", "inner", kind)?.simple("inner") };
        let f = match kind {
            "simple_lift" => {
                reject_extra(&present, &["inner"], "", kind)?;
                GeneralPayoff::SimpleLift(inner()?)
            }
            "floating_strike_put" => {
                reject_extra(&present, &["inner"], "", kind)?;
                GeneralPayoff::FloatingStrikePut(inner()?)
            }
            "cash_plus_lift" => {
                reject_extra(&present, &["cash", "inner"], "", kind)?;
                GeneralPayoff::CashPlusLift { cash: require(&self.cash, "", "cash", kind)?, inner: inner()? }
            }
            "tabulated_2d" => {
                reject_extra(&present, &["x_star", "fractions", "values"], "", kind)?;
                GeneralPayoff::Tabulated {
                    x_star: require(&self.x_star, "", "x_star", kind)?,
                    fractions: require(&self.fractions, "", "fractions", kind)?,
                    values: self.values_as("", kind)?,
                }
            }
            _ => return Ok(PayoffSpec::Simple(self.simple("")?)),
        };
        f.validate().map_err(|e| at_field(".", e))?;
        Ok(PayoffSpec::General(f))
    }

    fn of_simple(g: &SimplePayoff) -> Self {
        let doc = |kind: &str| PayoffDoc { payoff: kind.into(), ..Default::default() };
        match g {
            SimplePayoff::Constant { k } => PayoffDoc { k: Some(*k), ..doc("constant") },
            SimplePayoff::ThresholdCall { u, scale } => PayoffDoc { u: Some(*u), scale: Some(*scale), ..doc("threshold_call") },
            SimplePayoff::Capped { cap } => PayoffDoc { cap: Some(*cap), ..doc("capped") },
            SimplePayoff::PowerPayoff { beta, scale } => PayoffDoc { beta: Some(*beta), scale: Some(*scale), ..doc("power") },
            SimplePayoff::FixedStrike { inner, strike } => {
                PayoffDoc { strike: Some(*strike), inner: Some(Box::new(Self::of_simple(inner))), ..doc("fixed_strike") }
            }
            SimplePayoff::Tabulated { grid, values } => {
                PayoffDoc { grid: Some(grid.clone()), values: Some(serde_json::json!(values)), ..doc("tabulated") }
            }
        }
    }

    fn of(p: &PayoffSpec) -> Result<Self> {
        let doc = |kind: &str| PayoffDoc { payoff: kind.into(), ..Default::default() };
        let wrap = |g: &SimplePayoff| Some(Box::new(Self::of_simple(g)));
        Ok(match p {
            PayoffSpec::Simple(g) => Self::of_simple(g),
            PayoffSpec::General(GeneralPayoff::SimpleLift(g)) => PayoffDoc { inner: wrap(g), ..doc("simple_lift") },
            PayoffSpec::General(GeneralPayoff::FloatingStrikePut(g)) => {
                PayoffDoc { inner: wrap(g), ..doc("floating_strike_put") }
            }
            PayoffSpec::General(GeneralPayoff::CashPlusLift { cash, inner }) => {
                PayoffDoc { cash: Some(*cash), inner: wrap(inner), ..doc("cash_plus_lift") }
            }
            PayoffSpec::General(GeneralPayoff::Tabulated { x_star, fractions, values }) => PayoffDoc {
                x_star: Some(x_star.clone()),
                fractions: Some(fractions.clone()),
                values: Some(serde_json::json!(values)),
                ..doc("tabulated_2d")
            },
            PayoffSpec::General(GeneralPayoff::Custom(_)) => {
                return Err(Error::Contract("custom payoffs have no text representation".into()))
            }
        })
    }
}

pub fn parse_payoff(text: &str) -> Result<PayoffSpec> {
    from_json::<PayoffDoc>(text)?.build()
}

pub fn payoff_to_json(p: &PayoffSpec) -> Result<String> {
    Ok(serde_json::to_string(&PayoffDoc::of(p)?).expect("payoff serializes"))
}

/// JSON form of a [`PriceResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    #[serde(with = "num12")]
    pub value: f64,
    pub grid_n: usize,
    #[serde(with = "num12")]
    pub residual: f64,
    #[serde(with = "num12")]
    pub tol: f64,
    #[serde(with = "num12")]
    pub hedge_value: f64,
    #[serde(with = "num12::pairs")]
    pub hedge_knots: Vec<(f64, f64)>,
}

impl From<&PriceResult> for PriceReport {
    fn from(r: &PriceResult) -> Self {
        PriceReport {
            value: r.value,
            grid_n: r.diagnostics.grid_n,
            residual: r.diagnostics.residual,
            tol: r.diagnostics.tol,
            hedge_value: r.hedge_value,
            hedge_knots: r.hedge.as_ref().map(|h| h.knots()).unwrap_or_default(),
        }
    }
}

/// JSON form of an [`OracleReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub family: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(with = "num12")]
    pub expectation_lo: f64,
    #[serde(with = "num12")]
    pub expectation_hi: f64,
    #[serde(with = "num12")]
    pub target: f64,
    pub pass: bool,
}

impl From<&OracleReport> for OracleDoc {
    fn from(r: &OracleReport) -> Self {
        OracleDoc {
            family: r.family.clone(),
            n: r.n,
            m: r.m,
            expectation_lo: r.expectation_lo,
            expectation_hi: r.expectation_hi,
            target: r.target,
            pass: r.pass,
        }
    }
}

pub fn to_json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serializes")
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    from_json(text)
}

fn csv_rows<R: Read>(input: R, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let got = rdr.headers()?.clone();
    if got.iter().collect::<Vec<_>>() != header {
        return Err(Error::Parse(format!(
            "line 1: expected header `{}`, got `{}`",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        out.push((line, rec));
    }
    Ok(out)
}

fn field(rec: &csv::StringRecord, line: u64, i: usize, name: &str) -> Result<f64> {
    parse_num(&rec[i]).map_err(|_| Error::Parse(format!("line {line}, column `{name}`: `{}` is not a number", &rec[i])))
}

fn time_column(rec: &csv::StringRecord, line: u64, expected: usize) -> Result<usize> {
    let t: usize = rec[0].parse().map_err(|_| Error::Parse(format!("line {line}, column `t`: `{}` is not an integer", &rec[0])))?;
    if t != expected {
        return Err(Error::Parse(format!("line {line}, column `t`: expected {expected}, got {t}")));
    }
    Ok(t)
}

/// Reads `t,price` with `t = 0, 1, 2, …`.
pub fn read_path<R: Read>(input: R) -> Result<PricePath<f64>> {
    let mut prices = Vec::new();
    for (i, (line, rec)) in csv_rows(input, &["t", "price"])?.into_iter().enumerate() {
        time_column(&rec, line, i)?;
        prices.push(field(&rec, line, 1, "price")?);
    }
    PricePath::new(prices)
}

pub fn write_path<W: Write>(out: W, path: &PricePath<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "price"])?;
    for (t, x) in path.prices().iter().enumerate() {
        w.write_record([t.to_string(), format_num(*x)])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of an audit CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub t: usize,
    pub price: f64,
    pub running_max: f64,
    pub position: f64,
    pub capital: f64,
    pub ala_floor: f64,
    pub strong_floor: f64,
}

impl From<&CapitalRecord<f64>> for AuditRow {
    fn from(r: &CapitalRecord<f64>) -> Self {
        AuditRow {
            t: r.t,
            price: r.price,
            running_max: r.running_max,
            position: r.position,
            capital: r.capital,
            ala_floor: r.ala_floor,
            strong_floor: r.strong_floor,
        }
    }
}

const AUDIT_HEADER: [&str; 7] = ["t", "price", "running_max", "position", "capital", "ala_floor", "strong_floor"];

pub fn write_audit<W: Write>(out: W, rows: &[AuditRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AUDIT_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            format_num(r.price),
            format_num(r.running_max),
            format_num(r.position),
            format_num(r.capital),
            format_num(r.ala_floor),
            format_num(r.strong_floor),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_audit<R: Read>(input: R) -> Result<Vec<AuditRow>> {
    csv_rows(input, &AUDIT_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, (line, rec))| {
            let f = |j: usize| field(&rec, line, j, AUDIT_HEADER[j]);
            Ok(AuditRow {
                t: time_column(&rec, line, i)?,
                price: f(1)?,
                running_max: f(2)?,
                position: f(3)?,
                capital: f(4)?,
                ala_floor: f(5)?,
                strong_floor: f(6)?,
            })
        })
        .collect()
}

/// Reads `t,capital`; `inf` is allowed.
pub fn read_stream<R: Read>(input: R) -> Result<EvidenceStream<f64>> {
    let mut values = Vec::new();
    for (i, (line, rec)) in csv_rows(input, &["t", "capital"])?.into_iter().enumerate() {
        time_column(&rec, line, i)?;
        let k = field(&rec, line, 1, "capital")?;
        values.push(Capital::new(k).map_err(|e| Error::Parse(format!("line {line}, column `capital`: {e}")))?);
    }
    EvidenceStream::new(values)
}

pub fn write_stream<W: Write>(out: W, stream: &EvidenceStream<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "capital"])?;
    for (t, k) in stream.values().iter().enumerate() {
        w.write_record([t.to_string(), format_num(k.to_real())])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a calibrated-stream CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedRow {
    pub t: usize,
    pub capital: f64,
    pub running_max: f64,
    pub calibrated: f64,
    pub floor: f64,
}

const CALIBRATED_HEADER: [&str; 5] = ["t", "capital", "running_max", "calibrated", "floor"];

pub fn calibrated_rows(s: &CalibratedStream<f64>) -> Vec<CalibratedRow> {
    s.steps
        .iter()
        .map(|r| CalibratedRow {
            t: r.t,
            capital: r.capital.to_real(),
            running_max: r.running_max.to_real(),
            calibrated: r.calibrated.to_real(),
            floor: r.floor.to_real(),
        })
        .collect()
}

pub fn write_calibrated<W: Write>(out: W, rows: &[CalibratedRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CALIBRATED_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            format_num(r.capital),
            format_num(r.running_max),
            format_num(r.calibrated),
            format_num(r.floor),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_calibrated<R: Read>(input: R) -> Result<Vec<CalibratedRow>> {
    csv_rows(input, &CALIBRATED_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, (line, rec))| {
            let f = |j: usize| field(&rec, line, j, CALIBRATED_HEADER[j]);
            Ok(CalibratedRow { t: time_column(&rec, line, i)?, capital: f(1)?, running_max: f(2)?, calibrated: f(3)?, floor: f(4)? })
        })
        .collect()
}
