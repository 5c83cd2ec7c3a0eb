//! Pages of the pole order spectral sequence built from the `(d, df∧)`
//! double complex, and the numerical checks made on them.
//!
//! Entries are addressed by column `j` and form degree `m` (`Ω^j_m`). The
//! first page is `H^j(Ω, df∧)_m`; `d_r` goes from `(j, m)` to
//! `(j+1, m-(r-1)d)`. Tables quote the index `k = m + (n-j)d`, under which
//! column `n` is `μ_k`, column `n-1` is `ν_k`, column `n-2` is `ρ_k`.
//!
//! Page entries are kept as subquotients of cohomology coordinates, refined
//! from one page to the next. All of it runs mod p.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{intersection_lattice, Arrangement};
use crate::graded::{exterior_d_apply, exterior_d_matrix, exterior_d_modp, wedge_df_apply, wedge_df_modp, FormBasis};
use crate::koszul::{koszul_slice, Cohomology, Koszul};
use crate::linalg::{self, modp, LinalgError};
use modp::{Echelon, Mat};

/// `(column, form degree)`.
pub type Pos = (usize, i64);

#[derive(Debug, Error)]
pub enum SpecSeqError {
    #[error("differential d{r} at column {j}, degree {m} is not well defined")]
    NotWellDefined { r: usize, j: usize, m: i64 },
    #[error("zig-zag for d{r} at column {j}, degree {m} has no solution")]
    ZigzagObstructed { r: usize, j: usize, m: i64 },
    #[error("{0}")]
    Linalg(#[from] LinalgError),
}

/// Index under which tables report the entry at `(j, m)`.
pub fn table_index(n: usize, d: usize, j: usize, m: i64) -> i64 {
    m + ((n - j) * d) as i64
}

pub fn column_name(n: usize, j: usize) -> &'static str {
    match n - j.min(n) {
        0 => "mu",
        1 => "nu",
        2 => "rho",
        _ => "h",
    }
}

/// A subquotient `Z / B` of a coordinate space.
#[derive(Clone, Debug)]
struct Stage {
    z: Echelon,
    b: Echelon,
}

impl Stage {
    fn full(h: usize) -> Self {
        let mut z = Echelon::new(h);
        for i in 0..h {
            let mut e = vec![0; h];
            e[i] = 1;
            z.insert_reduced(e);
        }
        Stage { z, b: Echelon::new(h) }
    }

    fn dim(&self) -> usize {
        self.z.len() - self.b.len()
    }

    fn quotient(&self) -> Quotient {
        let h = self.z.dim;
        let mut reps = Vec::new();
        let mut tagged = Echelon::new(h + self.dim());
        for zr in self.z.rows() {
            let mut v = zr.clone();
            self.b.reduce(&mut v);
            let mut t = v;
            t.resize(h + self.dim(), 0);
            tagged.reduce(&mut t);
            if t[..h].iter().all(|&x| x == 0) {
                continue;
            }
            let k = reps.len();
            t[h + k] = modp::add(t[h + k], 1);
            tagged.insert_reduced(t);
            reps.push(zr.clone());
        }
        Quotient { h, b: self.b.clone(), tagged, reps }
    }
}

/// Basis of `Z / B` with coordinate extraction.
struct Quotient {
    h: usize,
    b: Echelon,
    tagged: Echelon,
    reps: Vec<Vec<u32>>,
}

impl Quotient {
    /// Coordinates of `x + B`, or `None` if `x ∉ Z`.
    fn coords(&self, x: &[u32]) -> Option<Vec<u32>> {
        let mut v = x.to_vec();
        self.b.reduce(&mut v);
        v.resize(self.h + self.reps.len(), 0);
        self.tagged.reduce(&mut v);
        if v[..self.h].iter().any(|&x| x != 0) {
            return None;
        }
        Some(v[self.h..].iter().map(|&x| modp::neg(x)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PageEntry {
    pub r: usize,
    pub j: usize,
    pub m: i64,
    pub k: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferentialRecord {
    pub r: usize,
    pub j_source: usize,
    pub m_source: i64,
    pub k_source: i64,
    pub m_target: i64,
    /// Rows index target classes, columns source classes.
    pub matrix: Vec<Vec<u32>>,
    /// `η_1..η_{r-1}` for each source class (empty for `r = 1`).
    #[serde(skip)]
    pub zigzag_witnesses: Vec<Vec<Vec<u32>>>,
    /// Recomputed with randomized lifts and compared.
    pub lifts_agree: bool,
}

impl DifferentialRecord {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    pub fn rank(&self) -> usize {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return 0;
        }
        Mat::from_rows(cols, &self.matrix).rank()
    }
}

pub struct SpectralSequence {
    pub n: usize,
    pub d: usize,
    pub kmax: i64,
    pub eng: Koszul,
    coh: BTreeMap<Pos, Cohomology>,
    pages: Vec<BTreeMap<Pos, Stage>>,
    pub differentials: Vec<DifferentialRecord>,
    seed: u64,
}

impl SpectralSequence {
    /// First page over the grid needed for exact second-page entries at
    /// `k ≤ kmax`.
    pub fn new(a: &Arrangement, kmax: i64, seed: u64) -> Self {
        Self::with_engine(Koszul::new(a), kmax, seed)
    }

    pub fn with_engine(eng: Koszul, kmax: i64, seed: u64) -> Self {
        let (n, d) = (eng.n, eng.d);
        let mut grid = Vec::new();
        for j in 0..=n {
            for m in j as i64..=Self::top(n, d, kmax, j) {
                grid.push((j, m));
            }
        }
        let coh: BTreeMap<Pos, Cohomology> = grid.par_iter().map(|&(j, m)| ((j, m), eng.cohomology(j, m))).collect();
        let first = coh.iter().map(|(&p, c)| (p, Stage::full(c.dim()))).collect();
        SpectralSequence { n, d, kmax, eng, coh, pages: vec![first], differentials: Vec::new(), seed }
    }

    /// Highest form degree computed in column `j`.
    fn top(n: usize, d: usize, kmax: i64, j: usize) -> i64 {
        (kmax + d as i64 - ((n - j) * d) as i64).min(kmax)
    }

    pub fn top_degree(&self, j: usize) -> i64 {
        Self::top(self.n, self.d, self.kmax, j)
    }

    pub fn pages_computed(&self) -> usize {
        self.pages.len()
    }

    pub fn cohomology(&self, j: usize, m: i64) -> Option<&Cohomology> {
        self.coh.get(&(j, m))
    }

    pub fn dim(&self, r: usize, j: usize, m: i64) -> usize {
        self.pages.get(r - 1).and_then(|p| p.get(&(j, m))).map_or(0, Stage::dim)
    }

    pub fn page(&self, r: usize) -> Vec<PageEntry> {
        self.pages[r - 1]
            .iter()
            .map(|(&(j, m), s)| PageEntry { r, j, m, k: table_index(self.n, self.d, j, m), dim: s.dim() })
            .collect()
    }

    /// Page `r` at `(j, m)` is exact when every incoming differential of
    /// earlier pages starts inside the grid (columns below 2 vanish).
    pub fn is_exact(&self, r: usize, j: usize, m: i64) -> bool {
        if j < 3 {
            return true;
        }
        (1..r).all(|s| m + ((s - 1) * self.d) as i64 <= self.top_degree(j - 1))
    }

    /// Dense representative in `Ω^j_m` of a cohomology-coordinate vector.
    fn lift(&self, pos: Pos, c: &[u32]) -> Vec<u32> {
        let h = &self.coh[&pos];
        let mut out = vec![0u32; h.ambient_dim()];
        for (i, &x) in c.iter().enumerate() {
            if x != 0 {
                modp::axpy(&mut out, x, &h.representative(&self.eng, i));
            }
        }
        out
    }

    fn target(&self, r: usize, (j, m): Pos) -> Option<Pos> {
        let t = (j + 1, m - ((r - 1) * self.d) as i64);
        self.coh.contains_key(&t).then_some(t)
    }

    /// Computes `d_r` between exact entries of the last page and appends
    /// page `r + 1`. Entries outside the exact region are carried along
    /// unchanged and should not be read.
    pub fn advance(&mut self) -> Result<(), SpecSeqError> {
        let r = self.pages.len();
        let page = &self.pages[r - 1];
        let sources: Vec<Pos> = page
            .keys()
            .copied()
            .filter(|&p| self.target(r, p).is_some_and(|t| self.is_exact(r, p.0, p.1) && self.is_exact(r, t.0, t.1)))
            .collect();
        let results: Vec<Result<(DifferentialRecord, Vec<Vec<u32>>, Vec<Vec<u32>>), SpecSeqError>> =
            sources.par_iter().map(|&p| self.differential(r, p)).collect();
        let mut next = page.clone();
        for res in results {
            let (rec, kernel, images) = res?;
            let src = (rec.j_source, rec.m_source);
            let tgt = (rec.j_source + 1, rec.m_target);
            let s = next.get_mut(&src).unwrap();
            let mut z = s.b.clone();
            for v in kernel {
                z.insert(v);
            }
            s.z = z;
            let t = next.get_mut(&tgt).unwrap();
            for v in images {
                t.b.insert(v);
            }
            self.differentials.push(rec);
        }
        self.pages.push(next);
        Ok(())
    }

    /// `d_r` at `pos`: the record, the kernel on page `r` (in cohomology
    /// coordinates) and the image vectors in the target's coordinates.
    #[allow(clippy::type_complexity)]
    fn differential(&self, r: usize, pos: Pos) -> Result<(DifferentialRecord, Vec<Vec<u32>>, Vec<Vec<u32>>), SpecSeqError> {
        let (j, m) = pos;
        let tgt = self.target(r, pos).unwrap();
        let page = &self.pages[r - 1];
        let sq = page[&pos].quotient();
        let tq = page[&tgt].quotient();
        let mut rec = DifferentialRecord {
            r,
            j_source: j,
            m_source: m,
            k_source: table_index(self.n, self.d, j, m),
            m_target: tgt.1,
            matrix: vec![vec![0; sq.reps.len()]; tq.reps.len()],
            zigzag_witnesses: Vec::new(),
            lifts_agree: true,
        };
        if sq.reps.is_empty() || tq.reps.is_empty() {
            return Ok((rec, sq.reps.clone(), Vec::new()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((r as u64) << 48) ^ ((j as u64) << 40) ^ (m as u64));
        let th = &self.coh[&tgt];
        let images: Vec<Vec<u32>>;
        if r == 1 {
            images = (0..sq.reps.len())
                .map(|i| {
                    let w = exterior_d_apply(self.n, j, m, &self.lift(pos, &sq.reps[i]));
                    th.coordinates(&self.eng, &w).map_err(|_| SpecSeqError::NotWellDefined { r, j, m })
                })
                .collect::<Result<_, _>>()?;
            // One random class plus a random df∧-boundary.
            let c: Vec<u32> = (0..sq.h).map(|_| rng.gen_range(0..modp::P)).collect();
            let mut w = self.lift(pos, &c);
            let below = FormBasis::new(self.n, j.wrapping_sub(1), m - self.d as i64).len();
            if j > 0 && below > 0 {
                let alpha: Vec<u32> = (0..below).map(|_| rng.gen_range(0..modp::P)).collect();
                let bd = wedge_df_apply(&self.eng.jac, j - 1, m - self.d as i64, &alpha);
                for (x, y) in w.iter_mut().zip(bd) {
                    *x = modp::add(*x, y);
                }
            }
            let got = th.coordinates(&self.eng, &exterior_d_apply(self.n, j, m, &w)).map_err(|_| SpecSeqError::NotWellDefined { r, j, m })?;
            let mut want = vec![0u32; th.dim()];
            for (i, &x) in c.iter().enumerate() {
                if x != 0 {
                    let col = th
                        .coordinates(&self.eng, &exterior_d_apply(self.n, j, m, &self.coh[&pos].representative(&self.eng, i)))
                        .map_err(|_| SpecSeqError::NotWellDefined { r, j, m })?;
                    modp::axpy(&mut want, x, &col);
                }
            }
            rec.lifts_agree = got == want;
        } else {
            let zz = Zigzag::new(self, r, pos);
            let omegas: Vec<Vec<u32>> = sq.reps.iter().map(|c| self.lift(pos, c)).collect();
            let (outs, chains) = zz.run(&omegas).ok_or(SpecSeqError::ZigzagObstructed { r, j, m })?;
            images = outs
                .iter()
                .map(|w| th.coordinates(&self.eng, w).map_err(|_| SpecSeqError::NotWellDefined { r, j, m }))
                .collect::<Result<_, _>>()?;
            rec.zigzag_witnesses = chains;
            // Shift each class by a random page-r boundary and a df∧-boundary,
            // and the chain by a random solution of the homogeneous system.
            let kernel = zz.kernel();
            let mut agree = true;
            for (i, c) in sq.reps.iter().enumerate() {
                let mut c2 = c.clone();
                for b in sq.b.rows() {
                    modp::axpy(&mut c2, rng.gen_range(0..modp::P), b);
                }
                let mut w = self.lift(pos, &c2);
                let below = FormBasis::new(self.n, j.wrapping_sub(1), m - self.d as i64).len();
                if j > 0 && below > 0 {
                    let alpha: Vec<u32> = (0..below).map(|_| rng.gen_range(0..modp::P)).collect();
                    let bd = wedge_df_apply(&self.eng.jac, j - 1, m - self.d as i64, &alpha);
                    for (x, y) in w.iter_mut().zip(bd) {
                        *x = modp::add(*x, y);
                    }
                }
                let Some(o) = zz.run_with(&[w], &kernel, &mut rng) else {
                    agree = false;
                    continue;
                };
                let a = th.coordinates(&self.eng, &o[0]).ok().and_then(|x| tq.coords(&x));
                let b = tq.coords(&images[i]);
                agree &= a.is_some() && a == b;
            }
            rec.lifts_agree = agree;
        }
        let mut cols = Vec::with_capacity(images.len());
        for v in &images {
            cols.push(tq.coords(v).ok_or(SpecSeqError::NotWellDefined { r, j, m })?);
        }
        for (c, col) in cols.iter().enumerate() {
            for (row, &x) in col.iter().enumerate() {
                rec.matrix[row][c] = x;
            }
        }
        let km = Mat::from_rows(sq.reps.len(), &rec.matrix).kernel();
        let kernel = km
            .iter()
            .map(|a| {
                let mut v = vec![0u32; sq.h];
                for (i, &x) in a.iter().enumerate() {
                    if x != 0 {
                        modp::axpy(&mut v, x, &sq.reps[i]);
                    }
                }
                v
            })
            .collect();
        let kernel = if rec.matrix.is_empty() { sq.reps.clone() } else { kernel };
        Ok((rec, kernel, images))
    }

    /// Runs the sequence up to and including page `r`.
    pub fn run_to(&mut self, r: usize) -> Result<(), SpecSeqError> {
        while self.pages.len() < r {
            self.advance()?;
        }
        Ok(())
    }

    pub fn records(&self, r: usize) -> impl Iterator<Item = &DifferentialRecord> {
        self.differentials.iter().filter(move |x| x.r == r)
    }
}

/// The linear system `df∧η_1 = dω`, `df∧η_{i+1} = dη_i` for one source.
struct Zigzag {
    n: usize,
    j: usize,
    m: i64,
    /// Degrees of `η_1..η_{r-1}`.
    degs: Vec<i64>,
    sizes: Vec<usize>,
    rows: usize,
    a: Mat,
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .scan(0, |s, &x| {
            let o = *s;
            *s += x;
            Some(o)
        })
        .collect()
}

fn push_block(t: &mut Vec<(usize, usize, u32)>, b: &Mat, r0: usize, c0: usize, negate: bool) {
    for rr in 0..b.rows {
        for (cc, &x) in b.row(rr).iter().enumerate() {
            if x != 0 {
                t.push((r0 + rr, c0 + cc, if negate { modp::neg(x) } else { x }));
            }
        }
    }
}

impl Zigzag {
    fn new(ss: &SpectralSequence, r: usize, (j, m): Pos) -> Self {
        let n = ss.n;
        let d = ss.d as i64;
        let degs: Vec<i64> = (1..r).map(|i| m - i as i64 * d).collect();
        let sizes: Vec<usize> = degs.iter().map(|&k| FormBasis::new(n, j, k).len()).collect();
        let eq_sizes: Vec<usize> = (0..r - 1).map(|i| FormBasis::new(n, j + 1, m - i as i64 * d).len()).collect();
        let (col_off, row_off) = (offsets(&sizes), offsets(&eq_sizes));
        let mut t = Vec::new();
        for i in 0..r - 1 {
            push_block(&mut t, &wedge_df_modp(&ss.eng.jac, j, degs[i]), row_off[i], col_off[i], false);
            if i >= 1 {
                push_block(&mut t, &exterior_d_modp(n, j, degs[i - 1]), row_off[i], col_off[i - 1], true);
            }
        }
        let rows = eq_sizes.iter().sum();
        let a = Mat::from_triplets(rows, sizes.iter().sum(), &t);
        Zigzag { n, j, m, degs, sizes, rows, a }
    }

    fn finish(&self, sol: &[u32]) -> (Vec<u32>, Vec<Vec<u32>>) {
        let chain: Vec<Vec<u32>> = offsets(&self.sizes).iter().zip(&self.sizes).map(|(&o, &s)| sol[o..o + s].to_vec()).collect();
        let last = self.degs.len() - 1;
        (exterior_d_apply(self.n, self.j, self.degs[last], &chain[last]), chain)
    }

    fn solve(&self, omegas: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
        let rhs: Vec<Vec<u32>> = omegas
            .iter()
            .map(|w| {
                let mut b = exterior_d_apply(self.n, self.j, self.m, w);
                b.resize(self.rows, 0);
                b
            })
            .collect();
        modp::solve_many(&self.a, &rhs)
    }

    /// `dη_{r-1}` and the chain for each `ω`.
    #[allow(clippy::type_complexity)]
    fn run(&self, omegas: &[Vec<u32>]) -> Option<(Vec<Vec<u32>>, Vec<Vec<Vec<u32>>>)> {
        Some(self.solve(omegas)?.iter().map(|s| self.finish(s)).unzip())
    }

    /// Like `run`, with each chain moved by a random homogeneous solution.
    fn run_with(&self, omegas: &[Vec<u32>], kernel: &[Vec<u32>], rng: &mut ChaCha8Rng) -> Option<Vec<Vec<u32>>> {
        let mut sols = self.solve(omegas)?;
        for s in sols.iter_mut() {
            for k in kernel {
                modp::axpy(s, rng.gen_range(0..modp::P), k);
            }
        }
        Some(sols.iter().map(|s| self.finish(s).0).collect())
    }

    fn kernel(&self) -> Vec<Vec<u32>> {
        self.a.kernel()
    }
}

/// Count of a kind of failure found while checking the vanishing statements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub kind: String,
    pub r: usize,
    pub j: usize,
    pub k: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ranges {
    pub mu: bool,
    pub nu: bool,
    pub rho: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VanishingReport {
    pub ranges: Ranges,
    pub degeneration: bool,
    pub window_used: i64,
    pub r_max: usize,
    /// Every `d_r` with `r ≥ 3` and `r > r_max` has a target outside the
    /// region where the second page can be nonzero.
    pub closure: String,
    pub lifts_agree: bool,
    /// Largest `k` with `ν⁽²⁾_k ≠ 0`, if any.
    pub nu2_last_nonzero: Option<i64>,
    pub counterexamples: Vec<Counterexample>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.ranges.mu && self.ranges.nu && self.ranges.rho && self.degeneration && self.lifts_agree && self.counterexamples.is_empty()
    }
}

/// `⌈(4d−5)/d⌉ + 1`.
pub fn r_max(d: usize) -> usize {
    (4 * d - 5).div_ceil(d) + 1
}

/// Second-page dimensions in table indexing, `(j, k) → dim`, inside the
/// window where they are exact.
pub type PageDims = BTreeMap<(usize, i64), usize>;

pub fn second_page_dims(ss: &SpectralSequence) -> PageDims {
    let mut out = PageDims::new();
    for e in ss.page(2) {
        if e.k <= ss.kmax && ss.is_exact(2, e.j, e.m) {
            out.insert((e.j, e.k), e.dim);
        }
    }
    out
}

/// Applies the vanishing ranges and the degeneration check to the given
/// data. Split out so that perturbed data can be fed in.
pub fn assess_vanishing(d: usize, kmax: i64, e2: &PageDims, higher: &[DifferentialRecord]) -> VanishingReport {
    let d_i = d as i64;
    let mut cx = Vec::new();
    let mut ranges = Ranges { mu: true, nu: true, rho: true };
    let mut nu_last = None;
    for (&(j, k), &dim) in e2 {
        if j == 3 && dim > 0 {
            nu_last = nu_last.max(Some(k));
        }
        let (bound, flag, name) = match j {
            4 => (2 * d_i - 2, &mut ranges.mu, "mu2"),
            3 => (3 * d_i - 1, &mut ranges.nu, "nu2"),
            2 => (4 * d_i - 2, &mut ranges.rho, "rho2"),
            _ => continue,
        };
        if k > bound && dim > 0 {
            *flag = false;
            cx.push(Counterexample { kind: name.into(), r: 2, j, k, dim });
        }
    }
    let rm = r_max(d);
    let mut degeneration = true;
    let mut lifts = true;
    for rec in higher {
        lifts &= rec.lifts_agree;
        if rec.r >= 3 && rec.r <= rm && !rec.is_zero() {
            degeneration = false;
            cx.push(Counterexample { kind: format!("d{}", rec.r), r: rec.r, j: rec.j_source, k: rec.k_source, dim: rec.rank() });
        }
    }
    let closure = format!(
        "second page vanishes in columns 2..4 above k = {}, {}, {}; a d_r with r > {} lowers the form degree by at least {} and lands below every nonzero entry",
        4 * d_i - 2,
        3 * d_i - 1,
        2 * d_i - 2,
        rm,
        rm as i64 * d_i
    );
    VanishingReport {
        ranges,
        degeneration,
        window_used: kmax,
        r_max: rm,
        closure,
        lifts_agree: lifts,
        nu2_last_nonzero: nu_last,
        counterexamples: cx,
    }
}

/// Runs pages 1..=r_max+1 and checks the vanishing ranges and `d_r = 0` for
/// `3 ≤ r ≤ r_max`.
pub fn verify_vanishing_with(ss: &mut SpectralSequence) -> Result<VanishingReport, SpecSeqError> {
    let rm = r_max(ss.d);
    ss.run_to(rm + 1)?;
    Ok(assess_vanishing(ss.d, ss.kmax, &second_page_dims(ss), &ss.differentials))
}

pub fn verify_vanishing(a: &Arrangement, kmax: i64) -> Result<VanishingReport, SpecSeqError> {
    let mut ss = SpectralSequence::new(a, kmax, 0);
    verify_vanishing_with(&mut ss)
}

/// `Σ_j (−1)^{n−j} h^j_k`; for `n = 4` this is `μ_k − ν_{k+d} + ρ_{k+2d}`.
pub fn chi_f_with(eng: &Koszul, k: i64) -> i64 {
    (0..=eng.n).map(|j| if (eng.n - j) % 2 == 0 { eng.h(j, k) as i64 } else { -(eng.h(j, k) as i64) }).sum()
}

pub fn chi_f(a: &Arrangement, k: i64) -> i64 {
    chi_f_with(&Koszul::new(a), k)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub tau: i64,
    pub mu_ok: bool,
    pub nu_ok: bool,
    pub rho_ok: bool,
    /// `(name, k, observed first difference)` for every failure.
    pub failures: Vec<(String, i64, i64)>,
}

impl StabilizationReport {
    pub fn passed(&self) -> bool {
        self.mu_ok && self.nu_ok && self.rho_ok
    }
}

/// `a_k − a_{k−1}`.
pub fn first_difference(a: impl Fn(i64) -> i64, k: i64) -> i64 {
    a(k) - a(k - 1)
}

/// First differences of `μ_k` for `2d ≤ k ≤ kmax`, and of `ν_{k+d}`,
/// `ρ_{k+2d}` for `2d < k ≤ kmax − 2d`, against the Tjurina number of a
/// generic section (and twice it for `ν`).
pub fn verify_stabilization_with(eng: &Koszul, tau: i64, kmax: i64) -> StabilizationReport {
    let n = eng.n;
    let d = eng.d as i64;
    let h = |j: usize| move |m: i64| eng.h(j, m) as i64;
    let mut rep = StabilizationReport { tau, mu_ok: true, nu_ok: true, rho_ok: true, failures: Vec::new() };
    for k in 2 * d..=kmax {
        let x = first_difference(h(n), k);
        if x != tau {
            rep.mu_ok = false;
            rep.failures.push(("mu".into(), k, x));
        }
    }
    for k in 2 * d + 1..=kmax - 2 * d {
        let x = first_difference(h(n - 1), k);
        if x != 2 * tau {
            rep.nu_ok = false;
            rep.failures.push(("nu".into(), k + d, x));
        }
        if n >= 3 {
            let y = first_difference(h(n - 2), k);
            if y != tau {
                rep.rho_ok = false;
                rep.failures.push(("rho".into(), k + 2 * d, y));
            }
        }
    }
    rep
}

pub fn verify_stabilization(a: &Arrangement, kmax: i64) -> StabilizationReport {
    let tau = intersection_lattice(a).tjurina_section;
    verify_stabilization_with(&Koszul::new(a), tau, kmax)
}

/// First page up to `kmax`, in table indexing.
pub fn e1_page(a: &Arrangement, kmax: i64) -> Vec<PageEntry> {
    SpectralSequence::new(a, kmax, 0).page(1).into_iter().filter(|e| e.k <= kmax).collect()
}

/// Second page up to `kmax`, in table indexing.
pub fn e2_page(a: &Arrangement, kmax: i64) -> Result<Vec<PageEntry>, SpecSeqError> {
    let mut ss = SpectralSequence::new(a, kmax, 0);
    ss.run_to(2)?;
    Ok(ss.page(2).into_iter().filter(|e| e.k <= kmax && ss.is_exact(2, e.j, e.m)).collect())
}

/// `d_1` from column `j` at form degree `m`.
pub fn d1_matrix(a: &Arrangement, j: usize, m: i64) -> Result<DifferentialRecord, SpecSeqError> {
    higher_differential(a, 1, j, m)
}

/// `d_r` from column `j` at form degree `m`.
pub fn higher_differential(a: &Arrangement, r: usize, j: usize, m: i64) -> Result<DifferentialRecord, SpecSeqError> {
    let kmax = table_index(a.n(), a.d(), j, m).max(m);
    let mut ss = SpectralSequence::new(a, kmax, 0);
    ss.run_to(r + 1)?;
    let rec = ss.records(r).find(|x| x.j_source == j && x.m_source == m).cloned();
    Ok(rec.unwrap_or(DifferentialRecord {
        r,
        j_source: j,
        m_source: m,
        k_source: table_index(a.n(), a.d(), j, m),
        m_target: m - ((r - 1) * a.d()) as i64,
        matrix: Vec::new(),
        zigzag_witnesses: Vec::new(),
        lifts_agree: true,
    }))
}

/// Exact first and second page dimensions at form degree `m`, column by
/// column, from rational linear algebra.
pub fn exact_pages_at(a: &Arrangement, m: i64) -> Result<(Vec<usize>, Vec<usize>), LinalgError> {
    let n = a.n();
    let s = koszul_slice(a, m)?;
    let e1: Vec<usize> = s.h.iter().map(|x| x.dim()).collect();
    let mut ranks = vec![0usize; n + 1];
    for j in 0..n {
        let dm = exterior_d_matrix(n, j, m);
        ranks[j] = linalg::rank(&linalg::induced_map(&s.h[j], &s.h[j + 1], &dm.matrix)?);
    }
    let e2 = (0..=n).map(|j| e1[j] - ranks[j] - if j > 0 { ranks[j - 1] } else { 0 }).collect();
    Ok((e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{builtin, parse_arrangement};

    fn g5() -> Arrangement {
        parse_arrangement("1 1 1 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap()
    }

    #[test]
    fn second_page_matches_exact() {
        for a in [builtin::boolean(4), g5()] {
            let mut ss = SpectralSequence::new(&a, 12, 3);
            ss.run_to(2).unwrap();
            for m in 0..=7 {
                let (e1, e2) = exact_pages_at(&a, m).unwrap();
                for j in 0..=4 {
                    if ss.cohomology(j, m).is_some() {
                        assert_eq!(ss.dim(1, j, m), e1[j], "E1 j={j} m={m}");
                        assert!(ss.is_exact(2, j, m));
                        assert_eq!(ss.dim(2, j, m), e2[j], "E2 j={j} m={m}");
                    }
                }
            }
            assert!(ss.differentials.iter().all(|r| r.lifts_agree));
        }
    }

    #[test]
    fn boolean_first_page() {
        let a = builtin::boolean(4);
        let ss = SpectralSequence::new(&a, 10, 0);
        assert_eq!(ss.dim(1, 3, 4), 3);
        assert_eq!(ss.dim(1, 4, 4), 1);
        let d1 = d1_matrix(&a, 3, 4).unwrap();
        assert!(d1.is_zero());
        assert_eq!(r_max(4), 4);
    }

    #[test]
    fn chi_and_stabilization() {
        let b4 = builtin::boolean(4);
        assert_eq!(chi_f(&b4, 4), 1);
        let g = g5();
        let eng = Koszul::new(&g);
        assert_eq!(chi_f_with(&eng, 5), 2);
        for k in 10..=16 {
            assert_eq!(chi_f_with(&eng, k), 0);
        }
        assert!(verify_stabilization(&b4, 16).passed());
    }

    #[test]
    fn vanishing_small() {
        let r = verify_vanishing(&builtin::boolean(4), 18).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.r_max, 4);
    }

    #[test]
    fn perturbed_data_is_caught() {
        let mut ss = SpectralSequence::new(&builtin::boolean(4), 18, 0);
        let good = verify_vanishing_with(&mut ss).unwrap();
        assert!(good.passed());
        let mut e2 = second_page_dims(&ss);
        e2.insert((4, 9), 1);
        let bad = assess_vanishing(4, 18, &e2, &ss.differentials);
        assert!(!bad.passed());
        assert_eq!(bad.counterexamples, vec![Counterexample { kind: "mu2".into(), r: 2, j: 4, k: 9, dim: 1 }]);
    }

    #[test]
    fn plane_arrangements_degenerate_at_second_page() {
        for a in [builtin::generic(3, 3, 1).unwrap(), builtin::nearpencil(5).unwrap()] {
            let kmax = 3 * a.d() as i64 + 2;
            let mut ss = SpectralSequence::new(&a, kmax, 1);
            ss.run_to(5).unwrap();
            assert!(ss.differentials.iter().filter(|r| r.r >= 2).all(|r| r.is_zero()));
            assert!(ss.differentials.iter().all(|r| r.lifts_agree));
        }
    }
}
