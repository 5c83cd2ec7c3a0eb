//! Acceptance run: prints one `pass`/`FAIL` line per criterion and exits
//! non-zero if any fails.

use std::time::Instant;

use polespec::arrangement::{builtin, intersection_lattice, parse_arrangement, product_decomposition, Arrangement};
use polespec::cli::verify::{default_kmax, run_verify, VerifyReport};
use polespec::graded::monomial_basis;
use polespec::koszul::{koszul_h_dim, milnor_dim, Koszul};
use polespec::resolution::product_law_dims;
use polespec::saturation::jacobian_saturation;
use polespec::specseq::{chi_f_with, first_difference};

struct Member {
    name: &'static str,
    a: Arrangement,
    report: VerifyReport,
    secs: f64,
}

fn corpus() -> Vec<Member> {
    let four: Vec<(&'static str, Arrangement)> = vec![
        ("boolean4", builtin::boolean(4)),
        ("generic(4,5)", builtin::by_name("generic5", 0).unwrap()),
        ("generic(4,6,1)", builtin::generic(4, 6, 1).unwrap()),
        ("generic(4,7,1)", builtin::generic(4, 7, 1).unwrap()),
        ("product(2:3,2:3)", builtin::product("2:3,2:3").unwrap()),
        (
            "multiplicity4",
            parse_arrangement("1 0 0 0\n0 1 0 0\n1 1 0 0\n1 -1 0 0\n0 0 1 0\n0 0 0 1\n1 0 1 1\n").unwrap(),
        ),
        ("generic(3,3)", builtin::generic(3, 3, 0).unwrap()),
        ("generic(3,5)", builtin::generic(3, 5, 0).unwrap()),
        ("nearpencil(5)", builtin::nearpencil(5).unwrap()),
    ];
    four.into_iter()
        .map(|(name, a)| {
            let t = Instant::now();
            let report = run_verify(&a, name, default_kmax(a.d()), 0).expect("pipeline runs");
            Member { name, a, report, secs: t.elapsed().as_secs_f64() }
        })
        .collect()
}

fn get<'a>(c: &'a [Member], name: &str) -> &'a Member {
    c.iter().find(|m| m.name == name).unwrap()
}

fn criterion1() -> (bool, String) {
    let t = Instant::now();
    let a = builtin::boolean(4);
    let eng = Koszul::new(&a);
    let mu = |k: i64| eng.milnor(k) as i64;
    let mut bad = Vec::new();
    if (4..=7).map(mu).collect::<Vec<_>>() != [1, 4, 10, 16] {
        bad.push("mu_4..7".to_string());
    }
    for k in 5..=16 {
        if mu(k) != 6 * (k - 4) - 2 {
            bad.push(format!("mu_{k}={}", mu(k)));
        }
    }
    // Exact rational cross-check of the engine in low degrees.
    for k in 0..=9 {
        if milnor_dim(&a, k) as i64 != mu(k) {
            bad.push(format!("exact mu_{k}"));
        }
    }
    // ν₄ counts third-column cohomology at form degree 4.
    let nu4 = koszul_h_dim(&a, 3, 4);
    if nu4 != 3 || eng.h(3, 4) != 3 {
        bad.push(format!("nu_4={nu4}"));
    }
    let lat = intersection_lattice(&a);
    if lat.tjurina_section != 6 || lat.chi_u != 0 {
        bad.push(format!("tau={} chiU={}", lat.tjurina_section, lat.chi_u));
    }
    if chi_f_with(&eng, 4) != 1 {
        bad.push("chi_f,4".into());
    }
    for k in 8..=16 {
        if first_difference(mu, k) != 6 {
            bad.push(format!("Diff(mu)_{k}"));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (bad.is_empty() && secs < 30.0, format!("{secs:.1}s {bad:?}"))
}

fn criterion2() -> (bool, String) {
    let t = Instant::now();
    let a = builtin::by_name("generic5", 0).unwrap();
    let eng = Koszul::new(&a);
    let lat = intersection_lattice(&a);
    let mut bad = Vec::new();
    if lat.chi_u != -1 || lat.tjurina_section != 10 {
        bad.push(format!("chiU={} tau={}", lat.chi_u, lat.tjurina_section));
    }
    if chi_f_with(&eng, 5) != 2 {
        bad.push(format!("chi_f,5={}", chi_f_with(&eng, 5)));
    }
    for k in 10..=22 {
        let c = chi_f_with(&eng, k);
        if c != 0 {
            bad.push(format!("chi_f,{k}={c}"));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (bad.is_empty() && secs < 300.0, format!("{secs:.1}s {bad:?}"))
}

fn four_dim(c: &[Member]) -> impl Iterator<Item = &Member> {
    c.iter().filter(|m| m.a.n() == 4)
}

fn criterion3(c: &[Member]) -> (bool, String) {
    let mut bad = Vec::new();
    let mut secs = 0.0;
    for m in four_dim(c) {
        secs += m.secs;
        let v = m.report.vanishing.as_ref().unwrap();
        if !(v.ranges.mu && v.ranges.nu && v.ranges.rho && v.degeneration) || v.window_used < 4 * m.a.d() as i64 + 2 {
            bad.push(format!("{}: {:?}", m.name, v.counterexamples));
        }
    }
    let n = four_dim(c).count();
    (bad.is_empty() && n >= 6 && secs < 2700.0, format!("{n} arrangements, {secs:.1}s {bad:?}"))
}

fn criterion4(c: &[Member]) -> (bool, String) {
    let mut bad = Vec::new();
    let mut vals = Vec::new();
    for m in four_dim(c) {
        let r = m.report.regularity.as_ref().unwrap();
        let d = m.a.d() as i64;
        vals.push(format!("{}:{}/{}", m.name, r.reg_der_log, r.reg_m));
        if r.reg_der_log > d - 4 || r.reg_m > 2 * d - 2 || !r.chain_ok || r.reg_m != r.reg_image - 1 || r.reg_m != r.reg_cycles - 2 {
            bad.push(m.name);
        }
    }
    if get(c, "boolean4").report.regularity.as_ref().unwrap().reg_der_log != 0 {
        bad.push("boolean4 equality");
    }
    (bad.is_empty(), format!("regDerLog/regM {} {bad:?}", vals.join(" ")))
}

fn criterion5(c: &[Member]) -> (bool, String) {
    let mut bad = Vec::new();
    for m in four_dim(c) {
        if !m.report.saturation.as_ref().unwrap().low_degree_vanishing {
            bad.push(m.name.to_string());
        }
    }
    let sat = jacobian_saturation(&builtin::boolean(4), 12).unwrap();
    for k in 0..=12usize {
        if sat.slices[k].dim != sat.jacobian_dims[k] {
            bad.push(format!("boolean4 J_{k}"));
        }
    }
    (bad.is_empty(), format!("{bad:?}"))
}

fn criterion6(c: &[Member]) -> (bool, String) {
    let mut bad = Vec::new();
    let lines: Vec<&Member> = c.iter().filter(|m| m.a.n() == 3).collect();
    for m in &lines {
        let g = m.report.degeneration.as_ref().unwrap();
        if !g.higher_differentials_zero || !g.nu_low_vanishing {
            bad.push(format!("{}: {:?}", m.name, g.counterexamples));
        }
    }
    (bad.is_empty() && lines.len() >= 3, format!("{} line arrangements {bad:?}", lines.len()))
}

fn criterion7(c: &[Member]) -> (bool, String) {
    let mut bad = Vec::new();
    for m in c {
        let i = &m.report.identities;
        let betti = m.report.regularity.as_ref().is_none_or(|r| r.betti_euler);
        let lifts = m.report.vanishing.as_ref().is_none_or(|v| v.lifts_agree);
        if !(i.derlog_splitting
            && i.derlog0_isomorphism
            && i.low_columns_vanish
            && i.complex_identities
            && i.euler_pages
            && i.lifts_agree
            && lifts
            && betti)
        {
            bad.push(format!("{}: {:?}", m.name, i.failures));
        }
    }
    (bad.is_empty(), format!("{} arrangements {bad:?}", c.len()))
}

fn criterion8() -> (bool, String) {
    let a = builtin::product("2:3,2:3").unwrap();
    let d = a.d() as i64;
    let eng = Koszul::new(&a);
    let predicted = product_law_dims(&a, 2 * d).unwrap().unwrap();
    let mut bad = Vec::new();
    for k in -1..=2 * d {
        if eng.derlog_dim(k) != predicted[(k + 1) as usize] {
            bad.push(format!("k={k}: {} vs {}", eng.derlog_dim(k), predicted[(k + 1) as usize]));
        }
    }
    let blocks: Vec<Vec<usize>> = product_decomposition(&a).unwrap().unwrap().into_iter().map(|f| f.members).collect();
    if blocks != vec![vec![0, 1, 2], vec![3, 4, 5]] {
        bad.push(format!("blocks {blocks:?}"));
    }
    (bad.is_empty(), format!("{bad:?}"))
}

/// Standard monomials of the monomial ideal generated by the partials of
/// `x1 x2 x3 x4`: monomials in at most two variables.
fn standard_monomials(t: i64) -> usize {
    if t < 0 {
        return 0;
    }
    monomial_basis(4, t).iter().filter(|m| m.iter().filter(|&&e| e > 0).count() <= 2).count()
}

fn criterion9() -> (bool, String) {
    let a = builtin::boolean(4);
    let mut bad = Vec::new();
    for k in 0..=16 {
        let la = milnor_dim(&a, k);
        let comb = standard_monomials(k - 4);
        if la != comb {
            bad.push(format!("k={k}: {la} vs {comb}"));
        }
    }
    (bad.is_empty(), format!("{bad:?}"))
}

fn main() {
    let t = Instant::now();
    let c = corpus();
    let results = [
        criterion1(),
        criterion2(),
        criterion3(&c),
        criterion4(&c),
        criterion5(&c),
        criterion6(&c),
        criterion7(&c),
        criterion8(),
        criterion9(),
    ];
    let mut all = true;
    for (i, (ok, detail)) in results.iter().enumerate() {
        all &= ok;
        println!("criterion {}: {} {detail}", i + 1, if *ok { "pass" } else { "FAIL" });
    }
    println!("acceptance: {} in {:.1}s", if all { "pass" } else { "FAIL" }, t.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
