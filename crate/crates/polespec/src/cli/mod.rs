//! Command-line front end. `run` returns the process exit code: 0 when
//! everything passed, 1 when a check failed or a computation broke down,
//! 2 for unusable input or flags.

pub mod render;
pub mod verify;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::arrangement::{builtin, intersection_lattice, parse_arrangement, product_decomposition, Arrangement, ArrangementError};
use crate::koszul::Koszul;
use crate::resolution::{ArrangementModules, BettiTable, ModuleKind};
use crate::saturation::{jacobian_saturation_with, saturated_quotient_hilbert_with, verify_saturation_vanishing_with};
use crate::specseq::{column_name, SpectralSequence};

pub use render::{Document, Format, Table};
pub use verify::{run_verify, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "polespec", version, about = "Pole order spectral sequences of hyperplane arrangements in 3 and 4 variables")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Write the output (the JSON report for `verify`) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest table index `k`.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub kmax: Option<i64>,
    /// Seed for random lifts, generic forms and the `generic` builtin.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "POLESPEC_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

/// `INPUT` is an arrangement file, `-` for stdin, or a builtin name such as
/// `boolean4` or `generic(4,6,1)`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intersection lattice invariants.
    Lattice { input: String },
    /// First page: Koszul cohomology dimensions.
    E1 { input: String },
    /// Pages 1..=r of the spectral sequence.
    Pages {
        input: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(1..))]
        r: u16,
    },
    /// Betti tables and regularities.
    Reg {
        input: String,
        #[arg(long, value_enum, default_value = "all")]
        which: Which,
    },
    /// Saturation of the Jacobian ideal.
    Saturate { input: String },
    /// Every check; exit 0 iff all pass.
    Verify { input: String },
    /// Print a builtin arrangement in the file format.
    Builtin { name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    All,
    M,
    Image,
    Cycles,
    Derlog,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

fn input_err(e: ArrangementError) -> CliError {
    CliError::Input(e.to_string())
}

fn compute_err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Reads a file, stdin or a builtin and checks it is usable.
pub fn load(input: &str, seed: u64, essential: bool) -> Result<Arrangement, CliError> {
    let a = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        parse_arrangement(&s).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else if Path::new(input).is_file() {
        let s = std::fs::read_to_string(input).map_err(|e| CliError::Input(format!("{input}: {e}")))?;
        parse_arrangement(&s).map_err(|e| CliError::Input(format!("{input}: {e}")))?
    } else {
        match builtin::by_name(input, seed) {
            Err(ArrangementError::UnknownBuiltin(_)) => {
                return Err(CliError::Input(format!("`{input}` is neither a readable file nor a builtin")))
            }
            r => r.map_err(input_err)?,
        }
    };
    a.check_supported().map_err(input_err)?;
    if essential {
        a.require_essential().map_err(input_err)?;
    }
    Ok(a)
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let mut warnings = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut warnings));
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok((text, code)) => {
            if let Some(path) = cli.out.as_ref().filter(|_| !matches!(cli.command, Command::Verify { .. })) {
                if let Err(e) = std::fs::write(path, &text) {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return 2;
                }
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, warnings: &mut Vec<String>) -> Result<(String, i32), CliError> {
    let seed = cli.seed;
    let doc = match &cli.command {
        Command::Builtin { name } => return builtin_text(name, seed, cli.format).map(|s| (s, 0)),
        Command::Verify { input } => return cmd_verify(cli, input, warnings),
        Command::Lattice { input } => cmd_lattice(&load(input, seed, false)?)?,
        Command::E1 { input } => {
            let a = load(input, seed, true)?;
            cmd_e1(&a, cli.kmax.unwrap_or(verify::default_kmax(a.d())))
        }
        Command::Pages { input, r } => {
            let a = load(input, seed, true)?;
            cmd_pages(&a, *r as usize, cli.kmax.unwrap_or(verify::default_kmax(a.d())), seed)?
        }
        Command::Reg { input, which } => cmd_reg(&load(input, seed, true)?, *which)?,
        Command::Saturate { input } => {
            let a = load(input, seed, true)?;
            cmd_saturate(&a, cli.kmax.unwrap_or(2 * a.d() as i64), seed)?
        }
    };
    Ok((doc.render(cli.format), 0))
}

fn builtin_text(name: &str, seed: u64, format: Format) -> Result<String, CliError> {
    let a = builtin::by_name(name, seed).map_err(input_err)?;
    Ok(match format {
        Format::Text => a.to_text(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for f in a.forms() {
                w.write_record(f.coefficients().iter().map(|c| c.to_string())).map_err(compute_err)?;
            }
            String::from_utf8(w.into_inner().map_err(compute_err)?).map_err(compute_err)?
        }
        Format::Structured => {
            let forms: Vec<Vec<String>> = a.forms().iter().map(|f| f.coefficients().iter().map(|c| c.to_string()).collect()).collect();
            let v = serde_json::json!({ "name": name, "n": a.n(), "d": a.d(), "forms": forms });
            serde_json::to_string_pretty(&v).map_err(compute_err)? + "\n"
        }
    })
}

pub fn cmd_lattice(a: &Arrangement) -> Result<Document, CliError> {
    let lat = intersection_lattice(a);
    let mut doc = Document::new("lattice");
    doc.fact("n", a.n());
    doc.fact("d", a.d());
    doc.fact("rank", a.rank());
    doc.fact("essential", a.is_essential());
    doc.fact("chiU", lat.chi_u);
    doc.fact("tjurinaSection", lat.tjurina_section);
    let mut mult = lat.rank2_multiplicities();
    mult.sort_unstable();
    doc.fact("rank2Multiplicities", mult);
    if a.is_essential() {
        let blocks = product_decomposition(a).map_err(input_err)?;
        let blocks: Vec<Vec<usize>> = blocks.map_or_else(|| vec![(0..a.d()).collect()], |f| f.into_iter().map(|b| b.members).collect());
        doc.fact("blocks", blocks);
    }
    let ranks = lat.flats_by_rank.len();
    let mut t = Table::new("flats", "rank", (0..ranks as i64).collect());
    t.row("flats", "flats", (0..ranks).map(|r| Some(lat.flat_count(r) as i64)).collect());
    doc.tables.push(t);
    let p = &lat.poincare_coefficients;
    let mut t = Table::new("poincare polynomial", "i", (0..p.len() as i64).collect());
    t.row("coefficient", "coefficient", p.iter().map(|&c| Some(c)).collect());
    doc.tables.push(t);
    Ok(doc)
}

fn row_name(n: usize, j: usize) -> String {
    match column_name(n, j) {
        "h" => format!("h{j}"),
        other => other.into(),
    }
}

fn column_label(name: &str) -> String {
    match name {
        "mu" => "μ".into(),
        "nu" => "ν".into(),
        "rho" => "ρ".into(),
        other => other.into(),
    }
}

fn superscript(r: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let s: String = r.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect();
    format!("⁽{s}⁾")
}

fn convention_facts(doc: &mut Document, a: &Arrangement, kmax: i64) {
    doc.fact("n", a.n());
    doc.fact("d", a.d());
    doc.fact("kmax", kmax);
    doc.fact("columns", verify::Convention::new(a.n()).columns);
}

pub fn cmd_e1(a: &Arrangement, kmax: i64) -> Document {
    let (n, d) = (a.n(), a.d());
    let eng = Koszul::new(a);
    let mut doc = Document::new("e1");
    convention_facts(&mut doc, a, kmax);
    let mut t = Table::new("first page", "k", (0..=kmax).collect());
    for j in (0..=n).rev() {
        let name = row_name(n, j);
        let vals = (0..=kmax).map(|k| Some(eng.h(j, k - ((n - j) * d) as i64) as i64)).collect();
        t.row(&name, &column_label(&name), vals);
    }
    doc.tables.push(t);
    doc
}

pub fn cmd_pages(a: &Arrangement, r: usize, kmax: i64, seed: u64) -> Result<Document, CliError> {
    let (n, d) = (a.n(), a.d());
    // Widen the grid so that every entry of page r with k ≤ kmax is exact.
    let wide = kmax + (r.saturating_sub(2) * d) as i64;
    let mut ss = SpectralSequence::new(a, wide, seed);
    ss.run_to(r).map_err(compute_err)?;
    let mut doc = Document::new("pages");
    convention_facts(&mut doc, a, kmax);
    let nonzero: Vec<usize> = (1..r).map(|s| ss.records(s).filter(|x| !x.is_zero()).count()).collect();
    doc.fact("nonzeroDifferentials", nonzero);
    let mut t = Table::new("pages", "k", (0..=kmax).collect());
    for s in 1..=r {
        for j in (n.saturating_sub(2)..=n).rev() {
            let name = row_name(n, j);
            let vals = (0..=kmax)
                .map(|k| {
                    let m = k - ((n - j) * d) as i64;
                    if m < j as i64 {
                        Some(0)
                    } else if ss.cohomology(j, m).is_some() && ss.is_exact(s, j, m) {
                        Some(ss.dim(s, j, m) as i64)
                    } else {
                        None
                    }
                })
                .collect();
            t.row(&format!("{name}({s})"), &format!("{}{}", column_label(&name), superscript(s)), vals);
        }
    }
    doc.tables.push(t);
    Ok(doc)
}

fn betti_rows(doc: &mut Document, name: &str, t: &BettiTable) {
    let ks: Vec<i64> = t.entries.keys().map(|&(_, k)| k).collect();
    let (lo, hi) = (ks.iter().copied().min().unwrap_or(0), ks.iter().copied().max().unwrap_or(0));
    let jmax = t.entries.keys().map(|&(j, _)| j).max().unwrap_or(0);
    let mut tab = Table::new(&format!("betti {name}"), "degree", (lo..=hi).collect());
    for j in 0..=jmax {
        let vals = (lo..=hi).map(|k| Some(t.entries.get(&(j, k)).copied().unwrap_or(0) as i64)).collect();
        tab.row(&format!("tor{j}"), &format!("Tor{j}"), vals);
    }
    doc.tables.push(tab);
}

pub fn cmd_reg(a: &Arrangement, which: Which) -> Result<Document, CliError> {
    let (n, d) = (a.n() as i64, a.d() as i64);
    let mods = ArrangementModules::new(&Koszul::new(a));
    let mut doc = Document::new("reg");
    doc.fact("n", n);
    doc.fact("d", d);
    let kinds: Vec<ModuleKind> = match which {
        Which::All => ModuleKind::ALL.to_vec(),
        Which::M => vec![ModuleKind::Milnor],
        Which::Image => vec![ModuleKind::Image],
        Which::Cycles => vec![ModuleKind::Cycles],
        Which::Derlog => vec![ModuleKind::DerLog],
    };
    let mut regs = std::collections::BTreeMap::new();
    for k in kinds {
        let t = mods.betti(k).map_err(compute_err)?;
        doc.fact(&format!("reg {}", k.name()), t.regularity);
        doc.fact(&format!("bettiEuler {}", k.name()), t.euler_ok);
        betti_rows(&mut doc, k.name(), &t);
        regs.insert(k.name(), t.regularity);
    }
    if which == Which::All {
        let r = |k: &str| regs[k].unwrap_or(i64::MIN);
        doc.fact("bound M", 2 * d - 2);
        doc.fact("bound derlog", d - n);
        doc.fact("chainOk", r("M") == r("image") - 1 && r("M") == r("cycles") - 2);
    }
    Ok(doc)
}

pub fn cmd_saturate(a: &Arrangement, kmax: i64, seed: u64) -> Result<Document, CliError> {
    let n = a.n();
    let eng = Koszul::new(a);
    let sat = jacobian_saturation_with(a, &eng, kmax, seed).map_err(compute_err)?;
    let mut doc = Document::new("saturate");
    doc.fact("n", n);
    doc.fact("d", a.d());
    doc.fact("kmax", kmax);
    doc.fact("k0", sat.k0);
    doc.fact("orderIndependent", sat.order_independent);
    doc.fact("isIdeal", sat.is_ideal);
    doc.fact("lowDegreeVanishing", verify_saturation_vanishing_with(&sat, a.d()));
    doc.fact("formsUsed", sat.forms.len());
    let mut t = Table::new("saturation", "k", (0..=kmax).collect());
    t.row("jacobian", "(∂f)", sat.jacobian_dims.iter().map(|&x| Some(x as i64)).collect());
    t.row("saturation", "J", sat.slices.iter().map(|s| Some(s.dim as i64)).collect());
    t.row(
        "quotient",
        "R/J(−n)",
        (0..=kmax).map(|k| Some(saturated_quotient_hilbert_with(&sat, n, k) as i64)).collect(),
    );
    doc.tables.push(t);
    Ok(doc)
}

fn cmd_verify(cli: &Cli, input: &str, warnings: &mut Vec<String>) -> Result<(String, i32), CliError> {
    let a = load(input, cli.seed, true)?;
    let floor = verify::kmax_floor(a.d());
    let kmax = match cli.kmax {
        Some(k) if k < floor => {
            warnings.push(format!("--kmax {k} is below {floor} = 4d-1; using {floor}"));
            floor
        }
        Some(k) => k,
        None => verify::default_kmax(a.d()),
    };
    let report = run_verify(&a, input, kmax, cli.seed).map_err(compute_err)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, report.to_json()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let code = if report.passed { 0 } else { 1 };
    let text = match cli.format {
        Format::Structured => report.to_json(),
        f => summary(&report).render(f),
    };
    Ok((text, code))
}

fn summary(r: &VerifyReport) -> Document {
    let mut doc = Document::new("verify");
    let verdict = |b: bool| if b { "pass" } else { "FAIL" };
    doc.fact("arrangement", &r.arrangement_id);
    doc.fact("n", r.n);
    doc.fact("d", r.d);
    doc.fact("kmax", r.kmax);
    doc.fact("chiU", r.lattice.chi_u);
    doc.fact("tjurinaSection", r.lattice.tjurina_section);
    if let Some(v) = &r.vanishing {
        doc.fact("vanishing ranges", verdict(v.ranges.mu && v.ranges.nu && v.ranges.rho));
        doc.fact("higher differentials", verdict(v.degeneration));
        doc.fact("nu2 last nonzero", v.nu2_last_nonzero);
    }
    if let Some(v) = &r.degeneration {
        doc.fact("degeneration at second page", verdict(v.higher_differentials_zero));
        doc.fact("nu low vanishing", verdict(v.nu_low_vanishing));
    }
    if let Some(g) = &r.regularity {
        doc.fact("reg M", g.reg_m);
        doc.fact("reg derlog", g.reg_der_log);
        doc.fact("regularity", verdict(g.passed()));
    }
    if let Some(s) = &r.saturation {
        doc.fact("saturation", verdict(s.passed()));
    }
    let i = &r.identities;
    let opt = |b: Option<bool>| b.map_or("n/a", verdict);
    doc.fact("chi endpoint", opt(i.chi_endpoint));
    doc.fact("chi vanishing", opt(i.chi_vanishing));
    doc.fact("tjurina stabilization", opt(i.tjurina_stabilization));
    doc.fact("derlog splitting", verdict(i.derlog_splitting));
    doc.fact("derlog0 isomorphism", verdict(i.derlog0_isomorphism));
    doc.fact("low columns vanish", verdict(i.low_columns_vanish));
    doc.fact("complex identities", verdict(i.complex_identities));
    doc.fact("euler pages", verdict(i.euler_pages));
    doc.fact("lifts agree", verdict(i.lifts_agree));
    doc.fact("overall", verdict(r.passed));
    doc
}
