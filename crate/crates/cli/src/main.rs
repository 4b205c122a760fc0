use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use muord::cm::{
    assumption_c_exceptional_dims, check_assumption_c, family, simple_signature_check, MonodromyDatum,
};
use muord::counting::{jacobian_order, lpolynomial_naive, lpolynomial_via_characters, DEFAULT_BUDGET};
use muord::harness::{classify_prime, predicted_densities, scan, DatumSpec, Instance, ScanConfig, ScanRecord};
use muord::weyl::{check_family, split_identity_printed, weyl_data, TorusVars};

#[derive(Parser)]
#[command(name = "muord", version, about = "Newton polygons and mu-ordinary statistics for cyclic covers of P^1")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Predicted mu-ordinary polygon and densities per residue class
    Predict {
        /// family key (M11) or datum "m:a1,a2,..."
        target: String,
        /// one line per residue class
        #[arg(long)]
        classes: bool,
    },
    /// L-polynomial of one reduction
    Lpoly {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        p: u64,
        /// count points directly instead of through character sums
        #[arg(long)]
        naive: bool,
    },
    /// Classify one good prime
    Classify {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// Scan a prime range from a JSON config
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        p_min: Option<u64>,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Trace functions on every component over a residue class
    WeylCheck {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        class: Option<u64>,
        /// drop the central twist variables
        #[arg(long)]
        no_twist: bool,
    },
    /// Signature, simplicity and the Galois-orbit rank condition
    Assumptions {
        #[command(flatten)]
        target: TargetArgs,
    },
}

#[derive(Args)]
struct TargetArgs {
    #[arg(long, conflicts_with = "datum")]
    family: Option<String>,
    /// "m:a1,a2,..."
    #[arg(long)]
    datum: Option<String>,
}

#[derive(Args)]
struct InstanceArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// last finite branch point, after 0 and 1
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    /// finite branch points, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "t")]
    points: Option<Vec<i64>>,
    /// largest field size to enumerate
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    prec: Option<u32>,
}

fn parse_datum(s: &str) -> Result<DatumSpec> {
    let (m, a) = s.split_once(':').ok_or_else(|| anyhow!("datum must look like m:a1,a2,..."))?;
    let m: u64 = m.trim().parse().context("datum modulus")?;
    let a = a.split(',').map(|x| x.trim().parse::<u64>()).collect::<std::result::Result<Vec<_>, _>>().context("datum exponents")?;
    Ok(DatumSpec { m, n: None, a })
}

impl TargetArgs {
    fn resolve(&self) -> Result<(String, MonodromyDatum, Option<String>)> {
        match (&self.family, &self.datum) {
            (Some(f), _) => {
                let fam = family(f)?;
                Ok((fam.name, fam.datum, fam.warning))
            }
            (None, Some(d)) => {
                let spec = parse_datum(d)?;
                Ok((d.clone(), MonodromyDatum::new(spec.m, spec.a)?, None))
            }
            (None, None) => bail!("give --family or --datum"),
        }
    }
}

fn target_from_str(s: &str) -> TargetArgs {
    if s.contains(':') {
        TargetArgs { family: None, datum: Some(s.to_string()) }
    } else {
        TargetArgs { family: Some(s.to_string()), datum: None }
    }
}

impl InstanceArgs {
    fn instance(&self) -> Result<Instance> {
        let cfg = ScanConfig {
            family: self.target.family.clone(),
            datum: self.target.datum.as_deref().map(parse_datum).transpose()?,
            t: self.t,
            branch_points: self.points.clone(),
            p_min: 3,
            p_max: 3,
            budget: self.budget,
            prec: self.prec,
            out_csv: None,
            cache_path: None,
        };
        Ok(cfg.resolve()?)
    }
}

fn predict(target: &str, classes: bool) -> Result<()> {
    let (name, datum, warning) = target_from_str(target).resolve()?;
    let preds = predicted_densities(&datum, warning)?;
    println!("{name}: m = {}, a = {:?}, g = {}", datum.m, datum.a, datum.genus_riemann_hurwitz());
    if let Some(w) = &preds.warning {
        println!("warning: {w}");
    }
    if classes {
        println!("class  f  mu-ordinary polygon                 ordinary  mu-density");
        for c in &preds.classes {
            println!("{:>5} {:>2}  {:<35} {:>8}  {:>10}", c.class, c.f, c.mu.to_string(), c.mu.is_ordinary(), c.mu_ordinary.to_string());
        }
    }
    println!("predicted ordinary density: {}", preds.overall_ordinary);
    Ok(())
}

fn lpoly(args: &InstanceArgs, p: u64, naive: bool) -> Result<()> {
    let inst = args.instance()?;
    let curve = inst.curve(p)?;
    let l = if naive { lpolynomial_naive(&curve, inst.budget)? } else { lpolynomial_via_characters(&curve, inst.budget)? };
    println!("{} [{}] p = {p}, g = {}", inst.name, inst.params(), curve.genus());
    println!("L(T) = {}", l.to_string_poly());
    println!("functional equation: {}", if l.satisfies_functional_equation() { "ok" } else { "FAILED" });
    match l.check_weil() {
        Ok(()) => println!("Weil bounds: ok"),
        Err(e) => println!("Weil bounds: FAILED ({e})"),
    }
    if let Some(n) = jacobian_order(&l) {
        println!("#J(F_p) = {n}");
    }
    Ok(())
}

fn show_record(r: &ScanRecord) {
    let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
    println!("{} [{}] p = {} (p mod m = {}, f = {})", r.family, r.params, r.p, r.p_mod_m, r.f);
    if let Some(s) = &r.skipped {
        println!("skipped: {s}");
        return;
    }
    if let Some(e) = &r.error {
        println!("error: {e}");
    }
    println!("nu:           {}", opt(r.slopes.as_ref().map(|x| x.to_string())));
    println!("mu:           {}", opt(r.mu_slopes.as_ref().map(|x| x.to_string())));
    println!("computed:     {}", if r.complete { "in full" } else { "smallest slope only" });
    println!("mu-ordinary:  {}", opt(r.is_mu_ordinary.map(|x| x.to_string())));
    println!("ordinary:     {}", opt(r.is_ordinary.map(|x| x.to_string())));
    println!("a_p:          {}", opt(r.ap.as_ref().map(|x| x.to_string())));
    println!("v_p(a_p):     {}", opt(r.vp_ap.map(|x| x.to_string())));
    println!("divisibility: {}", opt(r.div_ok.map(|x| x.to_string())));
    println!("size bound:   {}", opt(r.bound_ok.map(|x| x.to_string())));
    println!("certified:    {}", opt(r.mu_certified.map(|x| x.to_string())));
    for (i, piece) in r.pieces.iter().enumerate() {
        println!("piece {i}:      [{}]", piece.join(", "));
    }
    println!("elapsed:      {} ms", r.ms_elapsed);
}

fn run_scan(config: &PathBuf, p_min: Option<u64>, p_max: Option<u64>, out_csv: Option<PathBuf>, cache: Option<PathBuf>) -> Result<()> {
    let mut cfg = ScanConfig::from_json_file(config).with_context(|| format!("reading {}", config.display()))?;
    cfg.p_min = p_min.unwrap_or(cfg.p_min);
    cfg.p_max = p_max.unwrap_or(cfg.p_max);
    if out_csv.is_some() {
        cfg.out_csv = out_csv;
    }
    if cache.is_some() {
        cfg.cache_path = cache;
    }
    let summary = scan(&cfg)?;
    print!("{}", summary.render());
    let bad: Vec<&ScanRecord> = summary.records.iter().filter(|r| r.div_ok == Some(false) || r.bound_ok == Some(false)).collect();
    for r in &bad {
        println!("violation at p = {}: a_p = {}", r.p, r.ap.as_ref().map_or("-".into(), |x| x.to_string()));
    }
    Ok(())
}

fn weyl_check(target: &TargetArgs, class: Option<u64>, no_twist: bool) -> Result<bool> {
    let (name, datum, _) = target.resolve()?;
    let (m, n, d) = weyl_data(&datum)?;
    println!("{name}: m = {m}, n = {n}, d = {d}");
    let reports = check_family(&datum, class, !no_twist)?;
    let mut all = true;
    for r in &reports {
        let verdict = match (r.verdict.nonconstant, r.verdict.uniform_in_twist) {
            (true, true) => "nonconstant",
            (true, false) => "nonconstant for generic twist only",
            _ => "CONSTANT",
        };
        all &= r.verdict.nonconstant;
        println!("class {} f={} {} {}: {}  [on T': {}]  {verdict}", r.class, r.f, r.element, r.permutation, r.trace, r.trace_on_tprime);
    }
    if (n, d) == (2, 2) && reports.iter().any(|r| r.class == 1) {
        println!("printed variant for the split identity component: {}", TorusVars { d: 2, n: 2 }.render(&split_identity_printed()));
    }
    Ok(all)
}

fn assumptions(target: &TargetArgs) -> Result<()> {
    let (name, datum, warning) = target.resolve()?;
    let sig = datum.signature();
    println!("{name}: m = {}, a = {:?}, g = {}", datum.m, datum.a, datum.genus_riemann_hurwitz());
    let cf: Vec<String> = sig.units().iter().zip(&sig.values).map(|(k, v)| format!("f({k})={v}")).collect();
    println!("signature: {}", cf.join(" "));
    match simple_signature_check(&sig) {
        Ok(s) => {
            println!("simple: yes, Phi = {:?}, sigma_1 = {}", s.phi, s.sigma1);
            let ex = assumption_c_exceptional_dims(sig.m, &s.phi, s.sigma1)?;
            println!("exceptional relative dimensions: {:?}", ex.roots);
        }
        Err(e) => println!("simple: no ({e})"),
    }
    println!("Galois-orbit rank condition: {}", if check_assumption_c(&sig) { "holds" } else { "fails" });
    if let Some(w) = warning {
        println!("warning: {w}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Predict { target, classes } => predict(&target, classes)?,
        Cmd::Lpoly { inst, p, naive } => lpoly(&inst, p, naive)?,
        Cmd::Classify { inst, p, json } => {
            let rec = classify_prime(&inst.instance()?, p);
            if json {
                println!("{}", serde_json::to_string_pretty(&rec)?);
            } else {
                show_record(&rec);
            }
        }
        Cmd::Scan { config, p_min, p_max, out_csv, cache } => run_scan(&config, p_min, p_max, out_csv, cache)?,
        Cmd::WeylCheck { target, class, no_twist } => return weyl_check(&target, class, no_twist),
        Cmd::Assumptions { target } => assumptions(&target)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
