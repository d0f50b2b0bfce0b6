use std::path::Path;

use serde_json::{json, Value};
use wittbox::boxes::{check_box_hypothesis, interpolate_box, BoxHypothesis};
use wittbox::count::{reduce_to_fq, verify, CountReport, Instance};
use wittbox::instance::parse_instance;
use wittbox::suite::run_suite_upto;
use wittbox::witt::{substituted_sum_polys, witt_prod_polys, witt_sum_polys, WittVarLayout};
use wittbox::{Error, ErrorClass, Integers};

use crate::{exit_code, Config, Failure, Format};

pub const SCHEMA_VERSION: u32 = 1;

pub fn load(path: &Path) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn record(mut fields: Value, cfg: &Config) -> String {
    let obj = fields.as_object_mut().expect("records are objects");
    obj.insert("schema".into(), json!(SCHEMA_VERSION));
    obj.insert("seed".into(), json!(cfg.seed));
    serde_json::to_string(&fields).expect("records serialize")
}

fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).collect()
}

pub fn witt_polys(cfg: &Config, p: u64, r: usize, nmax: usize, mul: bool, substituted: bool) -> Result<(), Failure> {
    let (label, polys) = if mul {
        let m = witt_prod_polys(p, nmax, cfg.opts.budget)?;
        ("M", m.iter().map(|f| f.as_ref().clone()).collect::<Vec<_>>())
    } else if substituted {
        ("s", substituted_sum_polys(p, r, nmax, cfg.opts.budget)?)
    } else {
        let set = witt_sum_polys(p, r, nmax, cfg.opts.budget)?;
        ("S", set.s.iter().map(|f| f.as_ref().clone()).collect())
    };
    let arity_r = if mul { 2 } else { r };
    let names = WittVarLayout::new(arity_r, nmax).var_names();
    for (n, f) in polys.iter().enumerate() {
        let expr = f.to_expr(&Integers, &names);
        match cfg.format {
            Format::Table => println!("{label}_{n} = {expr}"),
            Format::Records => println!(
                "{}",
                record(
                    json!({"kind": label, "p": p, "r": arity_r, "n": n, "terms": f.num_terms(), "poly": expr}),
                    cfg
                )
            ),
        }
    }
    Ok(())
}

fn fmt_ordp(o: Option<u32>) -> String {
    o.map_or_else(|| "inf".to_string(), |o| o.to_string())
}

fn print_report_table(path: &Path, r: &CountReport, cfg: &Config) {
    let q = r.p.pow(r.h as u32);
    println!("instance      {}", path.display());
    println!("box           {} (n = {}, q = {q}, m = {}, s = {})", r.box_kind, r.n, r.m, r.s);
    println!("count         {}", r.count);
    println!("ord_p         {}", fmt_ordp(r.ordp));
    println!("hypothesis    {}", format!("{:?}", r.tier).to_lowercase());
    println!("bound         {} (need ord_p >= {})", r.bound, r.required_ordp);
    println!("verdict       {}", r.verdict.label());
    if let (Some(route), Some(c)) = (r.route, r.fq_count) {
        let route = format!("{route:?}").to_lowercase();
        println!("reduced       {c} solutions over F_q ({route}, {} polynomials)", r.system_degrees.len());
    } else {
        println!("reduced       skipped (over budget)");
    }
    if let Some(ak) = r.fq_ax_katz {
        println!("ax-katz (F_q) {ak}");
    }
    if let Some(split) = r.split {
        println!("split box     {split}");
    }
    if !r.vanishing.is_empty() {
        println!("vanishing     {:?}", r.vanishing);
    }
    for v in r.strong_violations.iter().take(5) {
        println!(
            "  strong: f_{} level {} term {:?} shift {}: degree {} > {}",
            v.k, v.level, v.exps, v.shift, v.degree, v.allowed
        );
    }
    if r.strong_violations.len() > 5 {
        println!("  ... {} more strong violations", r.strong_violations.len() - 5);
    }
    for v in &r.weak_violations {
        println!("  weak: g_{},{} degree {} > {}", v.level, v.coord, v.degree, v.allowed);
    }
    if let (true, Some(t)) = (cfg.timings, &r.timings) {
        println!("timings (ms)  count {:.3}, reduce {:?}, F_q count {:?}", t.count_ms, t.reduce_ms, t.fq_count_ms);
    }
}

pub fn report_record(path: &Path, r: &CountReport, cfg: &Config) -> String {
    let mut v = serde_json::to_value(r).expect("reports serialize");
    let obj = v.as_object_mut().expect("report is an object");
    if !cfg.timings {
        obj.remove("timings");
    }
    obj.insert("instance".into(), json!(path.display().to_string()));
    record(v, cfg)
}

pub fn count(cfg: &Config, files: &[std::path::PathBuf]) -> Result<(), Failure> {
    for (i, path) in files.iter().enumerate() {
        let inst = load(path)?;
        let r = verify(&inst, &cfg.opts)?;
        match cfg.format {
            Format::Table => {
                if i > 0 {
                    println!();
                }
                print_report_table(path, &r, cfg);
            }
            Format::Records => println!("{}", report_record(path, &r, cfg)),
        }
    }
    Ok(())
}

pub fn reduce(cfg: &Config, path: &Path) -> Result<(), Failure> {
    let inst = load(path)?;
    let sys = reduce_to_fq(&inst, &cfg.opts)?;
    let field = inst.field();
    let names = var_names(inst.n());
    let route = format!("{:?}", sys.route).to_lowercase();
    if cfg.format == Format::Table {
        println!("# {} polynomials over F_{} ({route})", sys.polys.len(), field.q());
    }
    for sp in &sys.polys {
        let expr = sp.poly.to_expr(field, &names);
        let degree = sp.poly.total_degree().finite();
        match cfg.format {
            Format::Table => println!("f_{} digit {}: {expr}", sp.k, sp.level),
            Format::Records => println!(
                "{}",
                record(
                    json!({"instance": path.display().to_string(), "route": route, "k": sp.k,
                           "level": sp.level, "degree": degree, "poly": expr}),
                    cfg
                )
            ),
        }
    }
    Ok(())
}

pub fn box_interp(cfg: &Config, path: &Path) -> Result<(), Failure> {
    let inst = load(path)?;
    let ring = inst.ring();
    let alg = interpolate_box(inst.boxspec())?;
    let weak = check_box_hypothesis(&alg, ring, BoxHypothesis::Weak);
    let split = check_box_hypothesis(&alg, ring, BoxHypothesis::Split);
    let names = var_names(inst.n());
    match cfg.format {
        Format::Table => {
            println!("# box {} over F_{}, m = {}", inst.boxspec().kind_name(), ring.field().q(), ring.m());
            for (i, row) in alg.g.iter().enumerate() {
                for (j, g) in row.iter().enumerate() {
                    println!("g_{},{} [deg {}] = {}", i + 1, j + 1, g.total_degree(), g.to_expr(ring.field(), &names));
                }
            }
            println!("weak degree condition: {}", if weak.holds() { "holds" } else { "fails" });
            for v in &weak.violations {
                println!("  g_{},{} degree {} > {}", v.level, v.coord, v.degree, v.allowed);
            }
            println!("split form: {}", split.not_split.is_empty());
        }
        Format::Records => {
            let g: Vec<Vec<String>> = alg
                .g
                .iter()
                .map(|row| row.iter().map(|g| g.to_expr(ring.field(), &names)).collect())
                .collect();
            println!(
                "{}",
                record(
                    json!({"instance": path.display().to_string(), "g": g, "weak": weak.holds(),
                           "weak_violations": weak.violations, "split": split.not_split.is_empty()}),
                    cfg
                )
            );
        }
    }
    Ok(())
}

pub fn prop_suite(cfg: &Config, count: u64, max_q: u64) -> Result<(), Failure> {
    let report = run_suite_upto(cfg.seed, count, max_q, &cfg.opts);
    match cfg.format {
        Format::Table => {
            println!("seed {} ({} instances, q <= {max_q})", report.seed, report.instances);
            println!("cross-checked    {}", report.cross_checked);
            println!("hypothesis       strong {}, weak {}, none {}", report.strong, report.weak, report.no_hypothesis);
            println!("bound enforced   {} (vacuous {})", report.bound_enforced, report.vacuous);
            println!("ax-katz cases    {}", report.ax_katz_cases);
            println!("digit checks     {}", report.digit_round_trips);
            println!("passed           {}", report.instances - report.failures.len() as u64);
            println!("failed           {}", report.failures.len());
            for f in &report.failures {
                println!("FAIL seed {} instance {} [{:?}]: {}", report.seed, f.index, f.class, f.error);
                println!("  {}", f.instance);
            }
        }
        Format::Records => {
            let v = serde_json::to_value(&report).expect("suite report serializes");
            println!("{}", record(v, cfg));
        }
    }
    // the most severe class decides the exit code
    let worst = report
        .failures
        .iter()
        .map(|f| f.class)
        .max_by_key(|c| match c {
            ErrorClass::Refutation => 3,
            ErrorClass::Invariant => 2,
            ErrorClass::Budget => 1,
            ErrorClass::Input => 0,
        });
    match worst {
        None => Ok(()),
        Some(c) => Err(Failure::Exit(exit_code(c))),
    }
}
