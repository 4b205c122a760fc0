//! Per-prime classification, resumable scans over prime ranges, and
//! per-class tallies against the predicted densities.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use log::{info, warn};
use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cm::{
    family, simple_signature_check, splitting_datum, MonodromyDatum, Signature, SimpleSignature, SplittingDatum,
};
use crate::counting::{eigen_charpoly, CharSums, CurveInstance, EigenspaceCharPoly, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::ffield::{is_prime, mult_order, units};
use crate::invariant::{compute_ap, diagnostics};
use crate::newton::{
    compare, mu_ordinary_polygon, smallest_slope_target, smallest_slope_test, Comparison, NewtonPolygon,
};
use crate::padic::{build_context, default_prec, first_coefficient_slope, piece_polygon_adaptive};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub m: u64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub a: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_points: Option<Vec<i64>>,
    pub p_min: u64,
    pub p_max: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_path: Option<PathBuf>,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl ScanConfig {
    pub fn for_family(name: &str, p_min: u64, p_max: u64) -> Self {
        Self {
            family: Some(name.to_string()),
            datum: None,
            t: None,
            branch_points: None,
            p_min,
            p_max,
            budget: DEFAULT_BUDGET,
            prec: None,
            out_csv: None,
            cache_path: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_min < 3 || self.p_max < self.p_min {
            return Err(Error::InvalidInput(format!("bad prime range [{}, {}]", self.p_min, self.p_max)));
        }
        if self.family.is_some() == self.datum.is_some() {
            return Err(Error::InvalidInput("give exactly one of family and datum".into()));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Instance> {
        self.validate()?;
        let (name, datum, defaults, warning) = match (&self.family, &self.datum) {
            (Some(f), None) => {
                let fam = family(f)?;
                (fam.name, fam.datum, fam.default_points, fam.warning)
            }
            (None, Some(d)) => {
                if let Some(n) = d.n {
                    if n != d.a.len() {
                        return Err(Error::InvalidInput(format!("N = {n} but {} exponents", d.a.len())));
                    }
                }
                let datum = MonodromyDatum::new(d.m, d.a.clone())?;
                let extra = datum.a.len() - 3;
                let defaults = [3i64, 7, 12, 19, 31, 42, 57].iter().take(extra).copied().collect();
                (format!("datum({};{})", d.m, join(&datum.a)), datum, defaults, None)
            }
            _ => unreachable!(),
        };
        let finite = finite_points(&datum, &defaults, self.t, self.branch_points.as_deref())?;
        Ok(Instance { name, datum, finite_points: finite, warning, budget: self.budget, prec: self.prec })
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Finite branch points b_1 = 0, b_2 = 1, then the configured ones.
pub fn finite_points(datum: &MonodromyDatum, defaults: &[i64], t: Option<i64>, given: Option<&[i64]>) -> Result<Vec<i64>> {
    let need = datum.a.len() - 1;
    let pts = match (t, given) {
        (Some(_), Some(_)) => return Err(Error::InvalidInput("give t or branch_points, not both".into())),
        (_, Some(b)) if b.len() == need => b.to_vec(),
        (_, Some(b)) if b.len() + 2 == need => [&[0, 1], b].concat(),
        (_, Some(b)) => return Err(Error::InvalidInput(format!("expected {} or {} branch points, got {}", need, need - 2, b.len()))),
        (Some(t), None) => {
            let mut v = vec![0, 1, t];
            v.extend(defaults.iter().skip(1).copied());
            v.truncate(need);
            v
        }
        (None, None) => [&[0, 1], defaults].concat(),
    };
    if pts.len() != need {
        return Err(Error::InvalidInput(format!("expected {need} finite branch points")));
    }
    for i in 0..pts.len() {
        if pts[..i].contains(&pts[i]) {
            return Err(Error::InvalidInput("branch points must be distinct".into()));
        }
    }
    Ok(pts)
}

/// A configured family member: datum plus rational branch points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub datum: MonodromyDatum,
    pub finite_points: Vec<i64>,
    pub warning: Option<String>,
    pub budget: u64,
    pub prec: Option<u32>,
}

impl Instance {
    pub fn params(&self) -> String {
        format!("points={};budget={}", join(&self.finite_points), self.budget)
    }

    pub fn signature(&self) -> Signature {
        self.datum.signature()
    }

    pub fn simple(&self) -> Result<SimpleSignature> {
        simple_signature_check(&self.signature())
    }

    pub fn curve(&self, p: u64) -> Result<CurveInstance> {
        CurveInstance::from_datum(&self.datum, &self.finite_points, p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub family: String,
    pub params: String,
    pub p: u64,
    pub p_mod_m: u64,
    pub f: u64,
    pub skipped: Option<String>,
    pub slopes: Option<NewtonPolygon>,
    pub mu_slopes: Option<NewtonPolygon>,
    /// whether ν was computed in full rather than by the smallest-slope test
    pub complete: bool,
    pub comparison: Option<Comparison>,
    pub is_mu_ordinary: Option<bool>,
    pub is_ordinary: Option<bool>,
    /// full comparison and smallest-slope test agree
    pub shortcut_agrees: Option<bool>,
    #[serde(with = "decimal")]
    pub ap: Option<BigInt>,
    pub vp_ap: Option<u32>,
    pub div_ok: Option<bool>,
    pub bound_ok: Option<bool>,
    pub mu_certified: Option<bool>,
    /// per coset, e_0..e_n of det(1 - φ^f T | V_T); "?" when undetermined
    pub pieces: Vec<Vec<String>>,
    pub error: Option<String>,
    pub ms_elapsed: u64,
}

/// a_p as a decimal string, so cache lines stay readable.
mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&x.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?.map(|x| x.parse().map_err(D::Error::custom)).transpose()
    }
}

impl ScanRecord {
    fn empty(inst: &Instance, p: u64) -> Self {
        let m = inst.datum.m;
        Self {
            family: inst.name.clone(),
            params: inst.params(),
            p,
            p_mod_m: p % m,
            f: if p % m == 0 { 0 } else { mult_order(p % m, m) },
            skipped: None,
            slopes: None,
            mu_slopes: None,
            complete: false,
            comparison: None,
            is_mu_ordinary: None,
            is_ordinary: None,
            shortcut_agrees: None,
            ap: None,
            vp_ap: None,
            div_ok: None,
            bound_ok: None,
            mu_certified: None,
            pieces: Vec::new(),
            error: None,
            ms_elapsed: 0,
        }
    }

    pub fn is_classified(&self) -> bool {
        self.skipped.is_none() && self.error.is_none() && self.is_mu_ordinary.is_some()
    }
}

/// Per-coset characteristic polynomials: the piece for the coset T ∋ k uses
/// the character χ^{-k}, so that its slopes are those of μ_T.
pub fn coset_pieces(sums: &mut CharSums, split: &SplittingDatum) -> Result<Vec<EigenspaceCharPoly>> {
    split.cosets.iter().map(|t| eigen_charpoly(sums, split.m - t[0], true)).collect()
}

pub fn classify_prime(inst: &Instance, p: u64) -> ScanRecord {
    let start = Instant::now();
    let mut rec = ScanRecord::empty(inst, p);
    if let Err(e) = classify_into(inst, p, &mut rec) {
        match e {
            Error::BadPrime(s) => rec.skipped = Some(format!("bad prime: {s}")),
            Error::Budget(s) => rec.skipped = Some(format!("budget: {s}")),
            other => rec.error = Some(other.to_string()),
        }
    }
    rec.ms_elapsed = start.elapsed().as_millis() as u64;
    rec
}

fn classify_into(inst: &Instance, p: u64, rec: &mut ScanRecord) -> Result<()> {
    if !is_prime(p) || p < 3 {
        return Err(Error::BadPrime(format!("{p} is not an odd prime")));
    }
    let curve = inst.curve(p)?;
    let m = inst.datum.m;
    let sig = inst.signature();
    let simple = inst.simple()?;
    let split = splitting_datum(m, p, &simple)?;
    let mu = mu_ordinary_polygon(&sig, &split);
    rec.mu_slopes = Some(mu.clone());

    let mut sums = CharSums::new(&curve, inst.budget);
    let pieces = coset_pieces(&mut sums, &split)?;
    rec.pieces = pieces
        .iter()
        .map(|cp| cp.e.iter().map(|e| e.as_ref().map_or("?".to_string(), |x| x.to_string())).collect())
        .collect();

    let ap = compute_ap(&pieces, &split)?;
    let diag = diagnostics(&ap, p, &split, sig.n());
    rec.ap = Some(ap);
    rec.vp_ap = diag.v;
    rec.div_ok = Some(diag.div_ok);
    rec.bound_ok = Some(diag.bound_ok);
    rec.mu_certified = Some(diag.mu_certified);

    let prec = inst.prec.unwrap_or_else(|| default_prec(curve.genus(), split.f));
    let ctx = build_context(p, split.f as usize, m, prec)?;
    let star = &pieces[split.p1_star];
    let target = smallest_slope_target(&split);
    let shortcut = first_coefficient_slope(&ctx, star).map(|s| s == target);

    if pieces.iter().all(EigenspaceCharPoly::is_complete) {
        let polys = pieces
            .iter()
            .map(|cp| piece_polygon_adaptive(p, m, prec, cp))
            .collect::<Result<Vec<_>>>()?;
        let nu = polys.iter().fold(NewtonPolygon::default(), |acc, x| acc.union(x));
        let cmp = compare(&nu, &mu)?;
        let exact = cmp == Comparison::Equal;
        rec.complete = true;
        rec.comparison = Some(cmp);
        rec.is_mu_ordinary = Some(exact);
        rec.is_ordinary = Some(nu.is_ordinary());
        rec.shortcut_agrees = Some(smallest_slope_test(&polys[split.p1_star], &split) == exact);
        rec.slopes = Some(nu);
        if cmp == Comparison::Below || cmp == Comparison::Incomparable {
            rec.error = Some(format!("ν is not on or above μ ({cmp:?})"));
        }
    } else {
        let exact = shortcut.ok_or_else(|| Error::Precision("trace valuation below precision".into()))?;
        rec.is_mu_ordinary = Some(exact);
        rec.is_ordinary = Some(exact && mu.is_ordinary());
        if exact {
            rec.slopes = Some(mu);
        }
    }
    Ok(())
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo as usize..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTally {
    pub class: u64,
    pub f: u64,
    pub scanned: u64,
    pub skipped: u64,
    pub errors: u64,
    pub mu_ordinary: u64,
    pub ordinary: u64,
    pub certified: u64,
    pub predicted_mu_ordinary: Option<Ratio<u64>>,
    pub predicted_ordinary: Option<Ratio<u64>>,
}

impl ClassTally {
    pub fn mu_frequency(&self) -> Option<Ratio<u64>> {
        (self.scanned > 0).then(|| Ratio::new(self.mu_ordinary, self.scanned))
    }
    pub fn ordinary_frequency(&self) -> Option<Ratio<u64>> {
        (self.scanned > 0).then(|| Ratio::new(self.ordinary, self.scanned))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub family: String,
    pub params: String,
    pub classes: Vec<ClassTally>,
    pub records: Vec<ScanRecord>,
    pub warning: Option<String>,
    pub notes: Vec<String>,
}

impl ScanSummary {
    pub fn pooled(&self) -> ClassTally {
        let mut t = ClassTally::default();
        for c in &self.classes {
            t.scanned += c.scanned;
            t.skipped += c.skipped;
            t.errors += c.errors;
            t.mu_ordinary += c.mu_ordinary;
            t.ordinary += c.ordinary;
            t.certified += c.certified;
        }
        t
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} [{}]\n", self.family, self.params);
        if let Some(w) = &self.warning {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str("class  f  scanned  skipped  mu-ord          pred  ordinary        pred  certified\n");
        let fmt = |r: Option<Ratio<u64>>| match r {
            Some(r) => format!("{}/{} ({:.3})", r.numer(), r.denom(), *r.numer() as f64 / *r.denom() as f64),
            None => "-".to_string(),
        };
        let pred = |r: Option<Ratio<u64>>| r.map_or("-".to_string(), |r| r.to_string());
        for c in self.classes.iter().chain(std::iter::once(&self.pooled())) {
            let label = if c.f == 0 && c.class == 0 && c.predicted_ordinary.is_none() { "all".to_string() } else { c.class.to_string() };
            out.push_str(&format!(
                "{:>5} {:>2} {:>8} {:>8}  {:<15} {:>4}  {:<15} {:>4}  {:>9}\n",
                label,
                c.f,
                c.scanned,
                c.skipped,
                fmt(c.mu_frequency()),
                pred(c.predicted_mu_ordinary),
                fmt(c.ordinary_frequency()),
                pred(c.predicted_ordinary),
                c.certified
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPrediction {
    pub class: u64,
    pub f: u64,
    pub mu: NewtonPolygon,
    pub mu_ordinary: Ratio<u64>,
    pub ordinary: Ratio<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predictions {
    pub classes: Vec<ClassPrediction>,
    pub overall_ordinary: Ratio<u64>,
    pub warning: Option<String>,
}

/// μ-ordinary density 1 in every class; ordinary density 1 exactly in the
/// classes whose μ is ordinary.
pub fn predicted_densities(datum: &MonodromyDatum, warning: Option<String>) -> Result<Predictions> {
    let m = datum.m;
    let sig = datum.signature();
    let simple = simple_signature_check(&sig)?;
    let mut classes = Vec::new();
    for c in units(m) {
        let split = splitting_datum(m, c, &simple)?;
        let mu = mu_ordinary_polygon(&sig, &split);
        let ordinary = Ratio::from_integer(mu.is_ordinary() as u64);
        classes.push(ClassPrediction { class: c, f: split.f, mu, mu_ordinary: Ratio::from_integer(1), ordinary });
    }
    let ord: u64 = classes.iter().map(|c| *c.ordinary.numer()).sum();
    let overall_ordinary = Ratio::new(ord, classes.len() as u64);
    Ok(Predictions { classes, overall_ordinary, warning })
}

type CacheKey = (String, String, u64);

fn load_cache(path: &Path) -> Result<HashMap<CacheKey, ScanRecord>> {
    let mut map = HashMap::new();
    if !path.exists() {
        return Ok(map);
    }
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ScanRecord>(&line) {
            Ok(r) => {
                map.insert((r.family.clone(), r.params.clone(), r.p), r);
            }
            Err(e) => warn!("ignoring cache line {}: {e}", i + 1),
        }
    }
    Ok(map)
}

pub const CSV_HEADER: [&str; 12] = [
    "p",
    "p_mod_m",
    "f",
    "skipped",
    "slopes",
    "mu_slopes",
    "is_mu_ordinary",
    "is_ordinary",
    "ap",
    "vp_ap",
    "mu_certified",
    "ms_elapsed",
];

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or(String::new(), |v| v.to_string())
}

pub fn write_csv(path: &Path, records: &[ScanRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in records {
        let skipped = match (&r.skipped, &r.error) {
            (Some(s), _) => s.clone(),
            (None, Some(e)) => format!("error: {e}"),
            _ => String::new(),
        };
        w.write_record([
            r.p.to_string(),
            r.p_mod_m.to_string(),
            r.f.to_string(),
            skipped,
            opt(&r.slopes),
            opt(&r.mu_slopes),
            opt(&r.is_mu_ordinary),
            opt(&r.is_ordinary),
            opt(&r.ap),
            opt(&r.vp_ap),
            opt(&r.mu_certified),
            r.ms_elapsed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan(config: &ScanConfig) -> Result<ScanSummary> {
    let inst = config.resolve()?;
    if let Some(w) = &inst.warning {
        warn!("{}: {w}", inst.name);
    }
    let primes = primes_in(config.p_min, config.p_max);
    let cache = match &config.cache_path {
        Some(p) => load_cache(p)?,
        None => HashMap::new(),
    };
    let params = inst.params();
    let todo: Vec<u64> =
        primes.iter().copied().filter(|&p| !cache.contains_key(&(inst.name.clone(), params.clone(), p))).collect();
    info!("{}: {} primes, {} cached", inst.name, primes.len(), primes.len() - todo.len());

    let writer = match &config.cache_path {
        Some(path) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?)),
        None => None,
    };
    let fresh: Vec<ScanRecord> = todo
        .par_iter()
        .map(|&p| {
            let rec = classify_prime(&inst, p);
            if let Some(w) = &writer {
                let line = serde_json::to_string(&rec).expect("records serialize");
                let mut f = w.lock().expect("cache writer");
                // a failed append only costs a recomputation next time
                if let Err(e) = writeln!(f, "{line}").and_then(|_| f.flush()) {
                    warn!("cache append failed: {e}");
                }
            }
            rec
        })
        .collect();

    let mut by_p: BTreeMap<u64, ScanRecord> = BTreeMap::new();
    for p in &primes {
        if let Some(r) = cache.get(&(inst.name.clone(), params.clone(), *p)) {
            by_p.insert(*p, r.clone());
        }
    }
    for r in fresh {
        by_p.insert(r.p, r);
    }
    let records: Vec<ScanRecord> = by_p.into_values().collect();
    if let Some(out) = &config.out_csv {
        write_csv(out, &records)?;
    }
    let summary = summarize(&inst, records)?;
    Ok(summary)
}

pub fn summarize(inst: &Instance, records: Vec<ScanRecord>) -> Result<ScanSummary> {
    let m = inst.datum.m;
    let preds = predicted_densities(&inst.datum, inst.warning.clone()).ok();
    let mut classes: BTreeMap<u64, ClassTally> = BTreeMap::new();
    for c in units(m) {
        let pred = preds.as_ref().and_then(|p| p.classes.iter().find(|x| x.class == c));
        let no_claims = inst.warning.is_some();
        classes.insert(
            c,
            ClassTally {
                class: c,
                f: mult_order(c, m),
                predicted_mu_ordinary: if no_claims { None } else { pred.map(|x| x.mu_ordinary) },
                predicted_ordinary: pred.map(|x| x.ordinary),
                ..Default::default()
            },
        );
    }
    for r in &records {
        let Some(t) = classes.get_mut(&r.p_mod_m) else { continue };
        if r.skipped.is_some() {
            t.skipped += 1;
            continue;
        }
        if r.error.is_some() || r.is_mu_ordinary.is_none() {
            t.errors += 1;
            continue;
        }
        t.scanned += 1;
        t.mu_ordinary += (r.is_mu_ordinary == Some(true)) as u64;
        t.ordinary += (r.is_ordinary == Some(true)) as u64;
        t.certified += (r.mu_certified == Some(true)) as u64;
    }
    let mut notes = Vec::new();
    if inst.warning.is_some() {
        notes.push("no μ-ordinary density claim is made for this family".into());
    }
    Ok(ScanSummary {
        family: inst.name.clone(),
        params: inst.params(),
        classes: classes.into_values().collect(),
        records,
        warning: inst.warning.clone(),
        notes,
    })
}
