//! The one-shot verification pipeline and its report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::arrangement::{intersection_lattice, Arrangement, LatticeInvariants};
use crate::graded::{complex_identities_hold, count};
use crate::resolution::{verify_reg_chain_with, ArrangementModules, RegChainReport, ResolutionError};
use crate::saturation::{jacobian_saturation_with, verify_saturation_vanishing_with, SaturationError};
use crate::specseq::{
    chi_f_with, r_max, table_index, verify_stabilization_with, verify_vanishing_with, Counterexample, SpecSeqError,
    SpectralSequence, StabilizationReport, VanishingReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    SpecSeq(#[from] SpecSeqError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Saturation(#[from] SaturationError),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Convention {
    pub field: String,
    pub grading: String,
    pub table_index: String,
    pub columns: BTreeMap<String, String>,
    pub differentials: String,
    pub chi: String,
    pub derivations: String,
}

impl Convention {
    pub fn new(n: usize) -> Self {
        let mut columns = BTreeMap::new();
        columns.insert("mu".into(), format!("h^{n}_k"));
        columns.insert("nu".into(), format!("h^{}_(k-d)", n - 1));
        columns.insert("rho".into(), format!("h^{}_(k-2d)", n - 2));
        Convention {
            field: format!("integers mod {}", crate::linalg::modp::P),
            grading: "deg x_i = deg dx_i = 1; Omega^j_m has coefficients of degree m-j".into(),
            table_index: "k = m + (n-j)d for column j at form degree m".into(),
            columns,
            differentials: "d_r: (j, m) -> (j+1, m-(r-1)d)".into(),
            chi: "chi_f,k = sum_j (-1)^(n-j) h^j_k at form degree k".into(),
            derivations: "deg d/dx_i = -1; Der_k has coefficients of degree k+1".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeSummary {
    pub chi_u: i64,
    pub tjurina_section: i64,
    pub flat_counts: Vec<usize>,
    pub rank2_multiplicities: Vec<usize>,
    pub poincare: Vec<i64>,
}

impl LatticeSummary {
    pub fn new(lat: &LatticeInvariants) -> Self {
        let mut m = lat.rank2_multiplicities();
        m.sort_unstable();
        LatticeSummary {
            chi_u: lat.chi_u,
            tjurina_section: lat.tjurina_section,
            flat_counts: (0..lat.flats_by_rank.len()).map(|r| lat.flat_count(r)).collect(),
            rank2_multiplicities: m,
            poincare: lat.poincare_coefficients.clone(),
        }
    }
}

/// Line arrangements: no differential beyond the first survives, and the
/// middle column starts late.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegenerationReport {
    pub pages_checked: usize,
    pub higher_differentials_zero: bool,
    pub nu_low_vanishing: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl DegenerationReport {
    pub fn passed(&self) -> bool {
        self.higher_differentials_zero && self.nu_low_vanishing
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Bounds {
    pub reg_m: i64,
    pub reg_der_log: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularitySummary {
    pub reg_m: i64,
    pub reg_image: i64,
    pub reg_cycles: i64,
    pub reg_der_log: i64,
    pub bounds: Bounds,
    pub chain_ok: bool,
    pub m_within_bound: bool,
    pub der_log_within_bound: bool,
    pub betti_euler: bool,
}

impl From<&RegChainReport> for RegularitySummary {
    fn from(r: &RegChainReport) -> Self {
        RegularitySummary {
            reg_m: r.reg_m,
            reg_image: r.reg_image,
            reg_cycles: r.reg_cycles,
            reg_der_log: r.reg_derlog,
            bounds: Bounds { reg_m: r.bound_m, reg_der_log: r.bound_derlog },
            chain_ok: r.chain_ok,
            m_within_bound: r.m_within_bound,
            der_log_within_bound: r.derlog_within_bound,
            betti_euler: r.euler_ok,
        }
    }
}

impl RegularitySummary {
    pub fn passed(&self) -> bool {
        self.chain_ok && self.m_within_bound && self.der_log_within_bound && self.betti_euler
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SaturationSummary {
    pub low_degree_vanishing: bool,
    pub k0: i64,
    pub window: i64,
    pub order_independent: bool,
    pub is_ideal: bool,
    pub agrees_at_top: bool,
    pub top_excess: usize,
    pub flatwise_top_excess: usize,
}

impl SaturationSummary {
    pub fn passed(&self) -> bool {
        self.low_degree_vanishing && self.order_independent && self.is_ideal && self.top_excess == self.flatwise_top_excess
    }
}

/// `None` marks a check that does not apply in this dimension.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Identities {
    pub chi_endpoint: Option<bool>,
    pub chi_vanishing: Option<bool>,
    pub tjurina_stabilization: Option<bool>,
    pub derlog_splitting: bool,
    pub derlog0_isomorphism: bool,
    pub low_columns_vanish: bool,
    pub complex_identities: bool,
    pub euler_pages: bool,
    pub lifts_agree: bool,
    pub failures: Vec<String>,
}

impl Identities {
    pub fn passed(&self) -> bool {
        [self.chi_endpoint, self.chi_vanishing, self.tjurina_stabilization].iter().all(|x| x.unwrap_or(true))
            && self.derlog_splitting
            && self.derlog0_isomorphism
            && self.low_columns_vanish
            && self.complex_identities
            && self.euler_pages
            && self.lifts_agree
    }
}

/// Wall-clock milliseconds per stage. Excluded from comparisons.
#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Volatile {
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub schema_version: u32,
    pub arrangement_id: String,
    pub n: usize,
    pub d: usize,
    pub kmax: i64,
    pub seed: u64,
    pub passed: bool,
    pub convention: Convention,
    pub lattice: LatticeSummary,
    pub vanishing: Option<VanishingReport>,
    pub degeneration: Option<DegenerationReport>,
    pub regularity: Option<RegularitySummary>,
    pub saturation: Option<SaturationSummary>,
    pub identities: Identities,
    pub volatile: Volatile,
}

impl VerifyReport {
    fn overall(&self) -> bool {
        self.vanishing.as_ref().is_none_or(|v| v.passed())
            && self.degeneration.as_ref().is_none_or(|v| v.passed())
            && self.regularity.as_ref().is_none_or(|v| v.passed())
            && self.saturation.as_ref().is_none_or(|v| v.passed())
            && self.identities.passed()
    }

    /// Serialized report without the volatile section.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable report");
        v.as_object_mut().unwrap().remove("volatile");
        serde_json::to_string_pretty(&v).unwrap()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }
}

/// Smallest window in which every vanishing range can be observed.
pub fn kmax_floor(d: usize) -> i64 {
    4 * d as i64 - 1
}

pub fn default_kmax(d: usize) -> i64 {
    4 * d as i64 + 2
}

struct Clock(BTreeMap<String, u64>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.insert(stage.into(), t.elapsed().as_millis() as u64);
        out
    }
}

/// Runs every check on an essential arrangement in 3 or 4 variables.
pub fn run_verify(a: &Arrangement, id: &str, kmax: i64, seed: u64) -> Result<VerifyReport, PipelineError> {
    let (n, d) = (a.n(), a.d());
    let di = d as i64;
    let mut clock = Clock(BTreeMap::new());
    let lat = clock.time("lattice", || intersection_lattice(a));
    let mut ss = clock.time("firstPage", || SpectralSequence::new(a, kmax, seed));

    let (vanishing, degeneration) = clock.time("spectralSequence", || -> Result<_, PipelineError> {
        if n == 4 {
            Ok((Some(verify_vanishing_with(&mut ss)?), None))
        } else {
            Ok((None, Some(degeneration(&mut ss)?)))
        }
    })?;

    let identities = clock.time("identities", || identities(&ss, &lat, kmax));

    let (regularity, saturation) = if n == 4 {
        let eng = &ss.eng;
        let (reg, sat) = rayon::join(
            || {
                let t = Instant::now();
                let r = verify_reg_chain_with(&ArrangementModules::new(eng));
                (r, t.elapsed().as_millis() as u64)
            },
            || {
                let t = Instant::now();
                let window = (2 * di).max(12);
                let r = jacobian_saturation_with(a, eng, window, seed).map(|s| SaturationSummary {
                    low_degree_vanishing: verify_saturation_vanishing_with(&s, d),
                    k0: s.k0,
                    window,
                    order_independent: s.order_independent,
                    is_ideal: s.is_ideal,
                    agrees_at_top: s.agrees_at_top(),
                    top_excess: s.top_excess,
                    flatwise_top_excess: s.flatwise_top_excess,
                });
                (r, t.elapsed().as_millis() as u64)
            },
        );
        clock.0.insert("regularity".into(), reg.1);
        clock.0.insert("saturation".into(), sat.1);
        (Some(RegularitySummary::from(&reg.0?)), Some(sat.0?))
    } else {
        (None, None)
    };

    let mut report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        arrangement_id: id.into(),
        n,
        d,
        kmax,
        seed,
        passed: false,
        convention: Convention::new(n),
        lattice: LatticeSummary::new(&lat),
        vanishing,
        degeneration,
        regularity,
        saturation,
        identities,
        volatile: Volatile { timings_ms: clock.0 },
    };
    report.passed = report.overall();
    Ok(report)
}

/// Runs line arrangements far enough that every later differential would
/// leave the grid, and checks that nothing past the first page moves.
fn degeneration(ss: &mut SpectralSequence) -> Result<DegenerationReport, SpecSeqError> {
    let last = r_max(ss.d) + 1;
    ss.run_to(last)?;
    let mut cx = Vec::new();
    for rec in ss.differentials.iter().filter(|r| r.r >= 2) {
        if !rec.is_zero() {
            cx.push(Counterexample { kind: format!("d{}", rec.r), r: rec.r, j: rec.j_source, k: rec.k_source, dim: rec.rank() });
        }
    }
    let higher_zero = cx.is_empty();
    let (n, d) = (ss.n, ss.d as i64);
    let mut nu_ok = true;
    for r in 1..=2 {
        for e in ss.page(r) {
            if e.j == n - 1 && e.k < d + 2 && e.dim > 0 {
                nu_ok = false;
                cx.push(Counterexample { kind: "nu".into(), r, j: e.j, k: e.k, dim: e.dim });
            }
        }
    }
    Ok(DegenerationReport { pages_checked: last, higher_differentials_zero: higher_zero, nu_low_vanishing: nu_ok, counterexamples: cx })
}

fn identities(ss: &SpectralSequence, lat: &LatticeInvariants, kmax: i64) -> Identities {
    let eng = &ss.eng;
    let (n, d) = (eng.n, eng.d as i64);
    let mut failures = Vec::new();
    let mut fail = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
        ok
    };

    let (chi_endpoint, chi_vanishing, tjurina) = if n == 4 {
        let c = chi_f_with(eng, d);
        let endpoint = fail(c == 1 - lat.chi_u, format!("chi_f at k={d} is {c}, expected {}", 1 - lat.chi_u));
        let mut vanishing = true;
        for k in 2 * d..=kmax {
            let c = chi_f_with(eng, k);
            vanishing &= fail(c == 0, format!("chi_f at k={k} is {c}"));
        }
        let st: StabilizationReport = verify_stabilization_with(eng, lat.tjurina_section, kmax);
        for (name, k, x) in &st.failures {
            fail(false, format!("first difference of {name} at k={k} is {x}"));
        }
        (Some(endpoint), Some(vanishing), Some(st.passed()))
    } else {
        (None, None, None)
    };

    let mut splitting = true;
    let mut iso = true;
    for k in -1..=kmax {
        let (full, zero) = (eng.derlog_dim(k), eng.derlog0_dim(k));
        let free = count(n, k);
        splitting &= fail(full == zero + free, format!("derivations at k={k}: {full} != {zero} + {free}"));
        let z = eng.cycle_dim(n - 1, k + n as i64);
        iso &= fail(zero == z, format!("annihilating derivations at k={k}: {zero} != {z} cycles"));
    }

    let mut low = true;
    for j in 0..=1.min(n) {
        for m in 0..=kmax {
            let h = eng.h(j, m);
            low &= fail(h == 0, format!("h^{j}_{m} = {h}"));
        }
    }

    let mut complexes = true;
    for j in 0..n.saturating_sub(1) {
        for m in j as i64..=kmax {
            let ok = complex_identities_hold(&eng.jac, j, m);
            complexes &= fail(ok == Some(true), format!("complex identities on forms of degree {m}, column {j}: {ok:?}"));
        }
    }

    // Euler characteristic of each form-degree row, first against second page.
    let mut euler = true;
    for m in 0..=ss.top_degree(2.min(n)) {
        let chi = |r: usize| -> i64 {
            (0..=n).map(|j| if (n - j) % 2 == 0 { ss.dim(r, j, m) as i64 } else { -(ss.dim(r, j, m) as i64) }).sum()
        };
        let (a, b) = (chi(1), chi(2));
        euler &= fail(a == b, format!("row m={m} (k={}): Euler characteristic {a} on page 1, {b} on page 2", table_index(n, eng.d, n, m)));
    }

    let lifts = ss.differentials.iter().all(|r| r.lifts_agree);
    fail(lifts, "an induced differential depends on the chosen lift".into());

    Identities {
        chi_endpoint,
        chi_vanishing,
        tjurina_stabilization: tjurina,
        derlog_splitting: splitting,
        derlog0_isomorphism: iso,
        low_columns_vanish: low,
        complex_identities: complexes,
        euler_pages: euler,
        lifts_agree: lifts,
        failures,
    }
}

/// Convenience for callers that only have the arrangement.
pub fn verify(a: &Arrangement, id: &str, kmax: Option<i64>, seed: u64) -> Result<VerifyReport, PipelineError> {
    let k = kmax.unwrap_or(default_kmax(a.d())).max(kmax_floor(a.d()));
    run_verify(a, id, k, seed)
}
