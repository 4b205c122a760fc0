//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Failures are reported but the exit status stays 0 so that `cargo test
//! --workspace` still runs the remaining test binaries. Set
//! `MUORD_ACCEPTANCE_STRICT=1` to exit with status 1 when any criterion fails.

use std::time::{Duration, Instant};

use num_rational::Ratio;

use muord::cm::{check_assumption_c_values, families, family, simple_signature_check, splitting_datum};
use muord::counting::{lpolynomial_naive, lpolynomial_via_characters, CurveInstance, DEFAULT_BUDGET};
use muord::harness::{scan, ScanConfig, ScanRecord, ScanSummary};
use muord::invariant::binomial;
use muord::newton::{basic_polygon_m5, mu_ordinary_polygon, NewtonPolygon};
use muord::weyl::{
    check_family, component_group, restrict_to_tprime, split_identity_printed, trace_factors, trace_function,
    weyl_data, ClassLayout, ComponentElement, LaurentPoly, TorusVars,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// unreduced, so the counts stay visible
fn ratio(k: u64, n: u64) -> String {
    format!("{k}/{n} = {:.3}", k as f64 / n as f64)
}

fn within(elapsed: Duration, limit: Duration, mut o: Outcome) -> Outcome {
    if elapsed > limit {
        o.pass = false;
        o.detail.push_str(&format!("; over the {:.0} s limit", limit.as_secs_f64()));
    }
    o
}

fn predictor_table() -> Outcome {
    let mut bad = Vec::new();
    let m11 = family("M11").unwrap().datum.signature();
    let s11 = simple_signature_check(&m11).unwrap();
    for (class, want) in [(1, "0^4 ⊕ 1^4"), (4, "0^2 ⊕ 1/2^4 ⊕ 1^2"), (2, "1/4^4 ⊕ 3/4^4"), (3, "1/4^4 ⊕ 3/4^4")] {
        let mu = mu_ordinary_polygon(&m11, &splitting_datum(5, class, &s11).unwrap());
        if mu != NewtonPolygon::parse(want).unwrap() {
            bad.push(format!("M11 class {class}: {mu}"));
        }
    }
    let m10 = family("M10").unwrap().datum.signature();
    let mu = mu_ordinary_polygon(&m10, &splitting_datum(3, 2, &simple_signature_check(&m10).unwrap()).unwrap());
    let slopes: Vec<String> = mu.slopes().iter().map(|(s, _)| s.to_string()).collect();
    if mu.p_rank() != 2 || slopes != ["0", "1/2", "1"] {
        bad.push(format!("M10 class 2: {mu}"));
    }
    outcome(bad.is_empty(), if bad.is_empty() { "M11 classes 1, 4, 2, 3 and M10 class 2 match".into() } else { bad.join("; ") })
}

fn oracle_equivalence() -> Outcome {
    let curves: &[(u64, &[i64], &[u64], &[u64])] = &[
        (3, &[0, 1, -1], &[1, 1, 1], &[7, 13, 31]),
        (3, &[0, 1, 3], &[1, 1, 2], &[7, 11, 29]),
        (3, &[0, 1, 3, 7], &[1, 1, 1, 1], &[13, 19]),
        (3, &[0, 1, 3, 7, 12], &[1, 1, 1, 1, 1], &[13, 17]),
        (4, &[0, 1, 3], &[1, 1, 2], &[7, 13, 29]),
        (4, &[0, 1, 3], &[1, 3, 2], &[11, 17]),
        (4, &[0, 1, 3], &[1, 1, 1], &[13, 19]),
        (4, &[0, 1, 3, 7], &[1, 1, 2, 2], &[11]),
        (5, &[0, 1], &[1, 1], &[11, 19, 31]),
        (5, &[0, 1, -1], &[1, 1, 3], &[7, 11]),
        (5, &[0, 1, 3], &[1, 3, 3], &[7, 11, 31]),
        (5, &[0, 1, 3], &[1, 1, 1], &[11, 13]),
    ];
    let mut n = 0;
    let mut bad = Vec::new();
    for &(m, pts, exps, primes) in curves {
        for &p in primes {
            let curve = CurveInstance::new(m, pts, exps, p).unwrap();
            assert!(curve.genus() <= 4);
            let naive = lpolynomial_naive(&curve, DEFAULT_BUDGET).unwrap();
            let chars = lpolynomial_via_characters(&curve, DEFAULT_BUDGET).unwrap();
            n += 1;
            if naive != chars || !chars.satisfies_functional_equation() || chars.check_weil().is_err() {
                bad.push(format!("m={m} pts={pts:?} a={exps:?} p={p}"));
            }
        }
    }
    let pass = n >= 20 && bad.is_empty();
    outcome(pass, if bad.is_empty() { format!("{n} curves agree bit-exactly") } else { format!("{n} curves, mismatches: {}", bad.join("; ")) })
}

const INERT_LIMIT: u64 = 150;

fn m11_scan() -> ScanSummary {
    let mut cfg = ScanConfig::for_family("M11", 3, 2000);
    cfg.t = Some(3);
    cfg.budget = INERT_LIMIT.pow(4);
    let mut s = scan(&cfg).unwrap();
    // the inert classes are scanned only up to the limit
    s.records.retain(|r| r.f != 4 || r.p <= INERT_LIMIT);
    s
}

fn good(records: &[ScanRecord]) -> impl Iterator<Item = &ScanRecord> {
    records.iter().filter(|r| r.skipped.is_none())
}

fn ap_law(s: &ScanSummary) -> Outcome {
    let sig = family("M11").unwrap().datum.signature();
    let simple = simple_signature_check(&sig).unwrap();
    let mut bad = Vec::new();
    for class in 1..5u64 {
        let split = splitting_datum(5, class, &simple).unwrap();
        let c = binomial(2 * split.f, split.f).pow(split.r as u32);
        let want = match class {
            1 => 16,
            4 => 36,
            _ => 70,
        };
        if c != want.into() {
            bad.push(format!("C = {c} for class {class}"));
        }
    }
    let mut n = 0;
    for r in good(&s.records) {
        n += 1;
        if r.error.is_some() || r.div_ok != Some(true) || r.bound_ok != Some(true) {
            bad.push(format!("p={} a_p={:?} err={:?}", r.p, r.ap.as_ref().map(|x| x.to_string()), r.error));
        }
    }
    outcome(bad.is_empty(), format!("{n} good primes, {} violations{}", bad.len(), if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }))
}

fn density(s: &ScanSummary) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut mu, mut tot) = (0, 0);
    for class in 1..5u64 {
        let cls: Vec<&ScanRecord> = good(&s.records).filter(|r| r.p_mod_m == class && r.is_classified()).collect();
        let k = cls.iter().filter(|r| r.is_mu_ordinary == Some(true)).count() as u64;
        mu += k;
        tot += cls.len() as u64;
        let fr = Ratio::new(k, cls.len() as u64);
        pass &= fr >= Ratio::new(9, 10);
        parts.push(format!("class {class}: {}", ratio(k, cls.len() as u64)));
        for r in cls.iter().filter(|r| r.is_mu_ordinary == Some(false)) {
            if r.slopes.as_ref() != Some(&basic_polygon_m5(class)) {
                pass = false;
                parts.push(format!("p={} has non-basic {:?}", r.p, r.slopes.as_ref().map(|x| x.to_string())));
            }
        }
    }
    let pooled = Ratio::new(mu, tot);
    pass &= pooled >= Ratio::new(19, 20);
    parts.push(format!("pooled {}", ratio(mu, tot)));
    let non: Vec<String> =
        good(&s.records).filter(|r| r.is_mu_ordinary == Some(false)).map(|r| r.p.to_string()).collect();
    parts.push(format!("non-mu-ordinary at p = {}", non.join(", ")));
    outcome(pass, parts.join("; "))
}

fn m10_scan() -> ScanSummary {
    let mut cfg = ScanConfig::for_family("M10", 3, 2000);
    cfg.budget = 4_000_000;
    scan(&cfg).unwrap()
}

fn ordinary_density(s: &ScanSummary) -> Outcome {
    let cls: Vec<&ScanRecord> = good(&s.records).filter(|r| r.is_classified()).collect();
    let ord = cls.iter().filter(|r| r.is_ordinary == Some(true)).count() as u64;
    let fr = Ratio::new(ord, cls.len() as u64);
    let wrong_class = cls.iter().filter(|r| r.is_ordinary == Some(true) && r.p_mod_m != 1).count();
    let split: Vec<_> = cls.iter().filter(|r| r.p_mod_m == 1).collect();
    let missing = split.iter().filter(|r| r.is_ordinary != Some(true)).count() as u64;
    let miss = Ratio::new(missing, split.len() as u64);
    let errors = good(&s.records).filter(|r| !r.is_classified()).count();
    let pass = fr >= Ratio::new(42, 100) && fr <= Ratio::new(58, 100) && wrong_class == 0 && miss <= Ratio::new(1, 10) && errors == 0;
    outcome(pass, format!("ordinary {}; ordinary outside p = 1 mod 3: {wrong_class}; non-ordinary among p = 1 mod 3: {}; unclassified good primes: {errors}", ratio(ord, cls.len() as u64), ratio(missing, split.len() as u64)))
}

fn certificate(scans: &[&ScanSummary]) -> Outcome {
    let (mut full, mut shortcut, mut bad) = (0, 0, Vec::new());
    for s in scans {
        for r in good(&s.records).filter(|r| r.mu_certified == Some(true)) {
            let ok = r.is_mu_ordinary == Some(true) && r.slopes.is_some() && r.slopes == r.mu_slopes;
            if r.complete {
                full += 1;
            } else {
                shortcut += 1;
            }
            if !ok {
                bad.push(format!("{} p={}", r.family, r.p));
            }
        }
    }
    outcome(bad.is_empty(), format!("{full} certified primes with full nu, {shortcut} decided by the smallest slope, {} exceptions {}", bad.len(), bad.join(", ")))
}

fn weyl() -> Outcome {
    let mut bad = Vec::new();
    for d in 1..=4usize {
        let want = (1 << d) * (1..=d).product::<usize>();
        if component_group(d).len() != want {
            bad.push(format!("|H/W| wrong for d = {d}"));
        }
    }
    let v = TorusVars { d: 2, n: 2 };
    let mono = |pairs: &[(usize, i32)]| {
        let mut e = vec![0; v.nvars()];
        for &(i, x) in pairs {
            e[v.x(i / 2, i % 2)] = x;
        }
        LaurentPoly::monomial(e, 1)
    };
    let half = ClassLayout::new(5, 2, 4).unwrap();
    let id = trace_factors(&half, &ComponentElement::identity(2), false).unwrap();
    let id_want = [mono(&[(0, 1), (1, 1)]), mono(&[(0, 1), (1, -1)]), mono(&[(0, -1), (1, 1)]), mono(&[(0, -1), (1, -1)])]
        .iter()
        .fold(LaurentPoly::constant(v.nvars(), 2), |s, x| s.add(x));
    if id[0] != id_want {
        bad.push(format!("identity factor {}", v.render(&id[0])));
    }
    let flip = trace_factors(&half, &ComponentElement { eps: vec![-1, 1], gamma: vec![0, 1] }, false).unwrap();
    if flip[0] != mono(&[(0, 1), (1, -1)]).add(&mono(&[(0, -1), (1, 1)])) {
        bad.push(format!("flipped factor {}", v.render(&flip[0])));
    }
    let inert = ClassLayout::new(5, 2, 2).unwrap();
    let e = ComponentElement { eps: vec![1, -1], gamma: vec![1, 0] };
    let tr = trace_function(&inert, &e, false).unwrap();
    if tr != mono(&[(0, 1), (1, -1), (2, 1), (3, -1)]).add(&mono(&[(0, -1), (1, 1), (2, -1), (3, 1)])) {
        bad.push(format!("inert component {}", v.render(&tr)));
    }
    let split_id = trace_function(&ClassLayout::new(5, 2, 1).unwrap(), &ComponentElement::identity(2), false).unwrap();
    let printed_note = if split_id == split_identity_printed() { "equal" } else { "differs from the printed sum form" };
    let (mut pairs, mut fams) = (0, Vec::new());
    for fam in families() {
        if weyl_data(&fam.datum).is_err() {
            continue;
        }
        let reports = check_family(&fam.datum, None, true).unwrap();
        pairs += reports.len();
        fams.push(fam.name.clone());
        for r in reports.iter().filter(|r| !r.verdict.nonconstant || !r.verdict.uniform_in_twist) {
            bad.push(format!("{} class {} {}", fam.name, r.class, r.element));
        }
    }
    let _ = restrict_to_tprime(&tr, v);
    outcome(
        bad.is_empty(),
        format!(
            "three trace formulas reproduced; {pairs} (class, component) pairs over {} nonconstant on T'; split identity product {printed_note}{}",
            fams.join(" "),
            if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join("; ")) }
        ),
    )
}

fn assumption_c() -> Outcome {
    let a = check_assumption_c_values(7, &[1, 0, 0, 2, 2, 1]);
    let b = check_assumption_c_values(7, &[1, 0, 0, 3, 3, 2]);
    outcome(!a && b, format!("(1,0,0,2,2,1) -> {a}, (1,0,0,3,3,2) -> {b}"))
}

fn report(n: usize, name: &str, o: &Outcome, t: Duration) {
    println!("criterion {n} {}: {name} ({:.2} s): {}", if o.pass { "PASS" } else { "FAIL" }, t.as_secs_f64(), o.detail);
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() {
    let mut all = true;
    let mut emit = |n: usize, name: &str, o: Outcome, t: Duration| {
        all &= o.pass;
        report(n, name, &o, t);
    };

    let (o, t) = timed(predictor_table);
    emit(1, "predictor table", within(t, Duration::from_secs(1), o), t);

    let (o, t) = timed(oracle_equivalence);
    emit(2, "character sums against brute force", within(t, Duration::from_secs(120), o), t);

    let (m11, t_scan) = timed(m11_scan);
    let (o, t) = timed(|| ap_law(&m11));
    emit(3, "divisibility and size of a_p", within(t + t_scan, Duration::from_secs(900), o), t + t_scan);

    let (o, t) = timed(|| density(&m11));
    emit(4, "mu-ordinary frequency", o, t);

    let (m10, t10) = timed(m10_scan);
    let (o, t) = timed(|| ordinary_density(&m10));
    emit(5, "ordinary frequency", o, t + t10);

    let (o, t) = timed(|| certificate(&[&m11, &m10]));
    emit(6, "certificate soundness", o, t);

    let (o, t) = timed(weyl);
    emit(7, "component trace functions", within(t, Duration::from_secs(30), o), t);

    let (o, t) = timed(assumption_c);
    emit(8, "Galois-orbit rank fixtures", o, t);

    println!("acceptance: {}", if all { "all criteria pass" } else { "some criteria FAIL" });
    if !all && std::env::var_os("MUORD_ACCEPTANCE_STRICT").is_some_and(|v| v != "0") {
        std::process::exit(1);
    }
}
