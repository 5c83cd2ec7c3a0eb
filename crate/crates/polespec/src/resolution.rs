//! Graded Betti numbers and Castelnuovo–Mumford regularity from
//! `Tor_j(C, N)_k`, computed as homology of the Koszul complex on the
//! variables tensored with `N`. Everything is mod p.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{product_decomposition, Arrangement, ArrangementError};
use crate::graded::{binom, count, subsets, var, wedge_sign};
use crate::groebner::{key_exps, mul_key, pack, Groebner, Key, NormalForms, Space};
use crate::koszul::Koszul;
use crate::linalg::modp;

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error("Tor is nonzero at the cutoff degree {cutoff}; enlarge the window")]
    CutoffTooSmall { cutoff: i64 },
    #[error("degree {0} is not available")]
    DegreeUnavailable(i64),
    #[error("regularity chain broken: reg M = {reg_m}, reg df∧Ω = {reg_image}, reg A(-d) = {reg_cycles}")]
    ChainViolation { reg_m: i64, reg_image: i64, reg_cycles: i64 },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// Sparse column: `(row, value)` pairs.
pub type SparseCol = Vec<(usize, u32)>;

/// A finitely generated graded module given degree by degree over F_p.
pub trait DegreewiseModule: Sync {
    fn nvars(&self) -> usize;
    fn dim(&self, k: i64) -> usize;
    /// `x_i · b` in degree `k + 1` coordinates, one column per basis vector
    /// `b` of degree `k`.
    fn mul(&self, i: usize, k: i64) -> Vec<SparseCol>;
}

/// Rank of a set of sparse vectors in F_p^dim, by incremental elimination.
pub fn sparse_rank(dim: usize, vecs: impl IntoIterator<Item = SparseCol>) -> usize {
    let mut pivots: Vec<Option<Vec<(u32, u32)>>> = vec![None; dim];
    let mut acc = vec![0u32; dim];
    let mut rank = 0;
    for v in vecs {
        let mut lo = dim;
        for (i, x) in v {
            acc[i] = modp::add(acc[i], x);
            lo = lo.min(i);
        }
        let mut lead = None;
        for c in lo..dim {
            let x = acc[c];
            if x == 0 {
                continue;
            }
            match &pivots[c] {
                Some(p) => {
                    acc[c] = 0;
                    let f = modp::neg(x);
                    for &(i, y) in p {
                        let i = i as usize;
                        acc[i] = modp::add(acc[i], modp::mul(f, y));
                    }
                }
                None => {
                    lead = Some(c);
                    break;
                }
            }
        }
        if let Some(c) = lead {
            let iv = modp::inv(acc[c]);
            acc[c] = 0;
            let mut row = Vec::new();
            for (i, x) in acc.iter_mut().enumerate().skip(c + 1) {
                if *x != 0 {
                    row.push((i as u32, modp::mul(*x, iv)));
                    *x = 0;
                }
            }
            pivots[c] = Some(row);
            rank += 1;
        }
    }
    rank
}

/// Multiplication tables of a module over a range of degrees.
struct Tables {
    lo: i64,
    dims: Vec<usize>,
    mul: Vec<Vec<Vec<SparseCol>>>,
}

impl Tables {
    fn new(m: &dyn DegreewiseModule, lo: i64, hi: i64) -> Self {
        let n = m.nvars();
        let dims = (lo..=hi + 1).map(|k| m.dim(k)).collect();
        let mul = (lo..=hi).map(|k| (0..n).map(|i| m.mul(i, k)).collect()).collect();
        Tables { lo, dims, mul }
    }

    fn dim(&self, k: i64) -> usize {
        if k < self.lo {
            0
        } else {
            self.dims[(k - self.lo) as usize]
        }
    }
}

/// Rank of the Koszul differential `Λ^j ⊗ N_{k-j} → Λ^{j-1} ⊗ N_{k-j+1}`.
fn koszul_rank(n: usize, t: &Tables, j: usize, k: i64) -> usize {
    if j == 0 || j > n {
        return 0;
    }
    let src_deg = k - j as i64;
    let sdim = t.dim(src_deg);
    let tdim = t.dim(src_deg + 1);
    if sdim == 0 || tdim == 0 {
        return 0;
    }
    let tsets = subsets(n, j - 1);
    let tpos: HashMap<u8, usize> = tsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let table = &t.mul[(src_deg - t.lo) as usize];
    let mut cols = Vec::new();
    for s in subsets(n, j) {
        for b in 0..sdim {
            let mut col = Vec::new();
            for i in (0..n).filter(|&i| s & (1 << i) != 0) {
                let rest = s & !(1 << i);
                let off = tpos[&rest] * tdim;
                let neg = wedge_sign(rest, i);
                for &(r, x) in &table[i][b] {
                    col.push((off + r, if neg { modp::neg(x) } else { x }));
                }
            }
            cols.push(col);
        }
    }
    sparse_rank(tsets.len() * tdim, cols)
}

/// `dim Tor_j(C, N)_k`.
pub fn tor_dims(m: &dyn DegreewiseModule, j: usize, k: i64, lo: i64) -> usize {
    let n = m.nvars();
    if j > n {
        return 0;
    }
    let t = Tables::new(m, lo, k);
    tor_from(n, &t, j, k)
}

fn tor_from(n: usize, t: &Tables, j: usize, k: i64) -> usize {
    let chain = binom(n as i64, j as i64) * t.dim(k - j as i64);
    chain - koszul_rank(n, t, j, k) - koszul_rank(n, t, j + 1, k)
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiTable {
    /// `(j, k) → dim Tor_j(C, N)_k`, nonzero entries only.
    #[serde(serialize_with = "entries_as_triples")]
    pub entries: BTreeMap<(usize, i64), usize>,
    pub cutoff_used: i64,
    /// `max (k − j)` over the entries; `None` for the zero module.
    pub regularity: Option<i64>,
    /// Every `Tor_j` vanishes at the cutoff degree.
    pub stable: bool,
    /// `Σ (−1)^j Tor_j` matches the Hilbert function times `(1 − t)^n`.
    pub euler_ok: bool,
}

fn entries_as_triples<S: serde::Serializer>(e: &BTreeMap<(usize, i64), usize>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(e.iter().map(|(&(j, k), &v)| (j, k, v)))
}

/// Betti table of `N` in degrees `lo..=cutoff`; `lo` must bound the module
/// from below.
pub fn betti_table(m: &dyn DegreewiseModule, lo: i64, cutoff: i64) -> Result<BettiTable, ResolutionError> {
    let n = m.nvars();
    let t = Tables::new(m, lo, cutoff);
    let mut entries = BTreeMap::new();
    let mut stable = true;
    let mut euler_ok = true;
    for k in lo..=cutoff {
        let mut alt = 0i64;
        for j in 0..=n {
            let x = tor_from(n, &t, j, k);
            alt += if j % 2 == 0 { x as i64 } else { -(x as i64) };
            if x > 0 {
                entries.insert((j, k), x);
                if k == cutoff {
                    stable = false;
                }
            }
        }
        let hs: i64 = (0..=n)
            .map(|i| {
                let c = binom(n as i64, i as i64) as i64 * t.dim(k - i as i64) as i64;
                if i % 2 == 0 { c } else { -c }
            })
            .sum();
        euler_ok &= alt == hs;
    }
    let regularity = entries.keys().map(|&(j, k)| k - j as i64).max();
    let table = BettiTable { entries, cutoff_used: cutoff, regularity, stable, euler_ok };
    if !stable {
        return Err(ResolutionError::CutoffTooSmall { cutoff });
    }
    Ok(table)
}

/// Starts at `bound + n + 2` and doubles the slack up to four times.
pub fn betti_with_retries(m: &dyn DegreewiseModule, lo: i64, bound: i64) -> Result<BettiTable, ResolutionError> {
    let mut slack = m.nvars() as i64 + 2;
    let mut last = None;
    for _ in 0..5 {
        match betti_table(m, lo, bound + slack) {
            Ok(t) => return Ok(t),
            Err(e @ ResolutionError::CutoffTooSmall { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        slack *= 2;
    }
    Err(last.unwrap())
}

/// `(R^r / M)` shifted so that degree `k` is Gröbner degree `k − shift`.
pub struct QuotientModule {
    pub gb: Groebner,
    pub shift: i64,
}

impl QuotientModule {
    fn nf(&self, k: i64) -> Option<NormalForms> {
        let g = k - self.shift;
        (g >= 0).then(|| self.gb.normal_forms(g as usize))
    }
}

impl DegreewiseModule for QuotientModule {
    fn nvars(&self) -> usize {
        self.gb.n
    }

    fn dim(&self, k: i64) -> usize {
        let g = k - self.shift;
        if g < 0 {
            0
        } else {
            self.gb.quotient_dim(g as usize)
        }
    }

    fn mul(&self, i: usize, k: i64) -> Vec<SparseCol> {
        let (Some(src), Some(tgt)) = (self.nf(k), self.nf(k + 1)) else {
            return vec![Vec::new(); self.dim(k)];
        };
        let xe = pack(&var(i));
        src.std
            .iter()
            .map(|&idx| {
                let row = tgt.row(tgt.space.index(mul_key(src.space.key(idx), xe)));
                row.iter().enumerate().filter(|(_, &x)| x != 0).map(|(r, &x)| (r, x)).collect()
            })
            .collect()
    }
}

/// A submodule of `R^r` given by a Gröbner basis; degree `k` is Gröbner
/// degree `k − shift`. Basis of each degree: one element `u·g` per leading
/// monomial, with `g` the first basis element dividing it.
pub struct SubModule {
    pub gb: Groebner,
    pub shift: i64,
}

impl SubModule {
    fn basis_keys(&self, g: i64) -> (Space, Vec<Key>, HashMap<Key, usize>) {
        let space = self.gb.space(g.max(0) as usize);
        let mut keys = Vec::new();
        if g >= 0 {
            for &idx in space.order() {
                let k = space.key(idx as usize);
                if self.gb.reducer_of(k).is_some() {
                    keys.push(k);
                }
            }
        }
        let pos = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        (space, keys, pos)
    }
}

impl DegreewiseModule for SubModule {
    fn nvars(&self) -> usize {
        self.gb.n
    }

    fn dim(&self, k: i64) -> usize {
        let g = k - self.shift;
        if g < 0 {
            0
        } else {
            self.gb.submodule_dim(g as usize)
        }
    }

    fn mul(&self, i: usize, k: i64) -> Vec<SparseCol> {
        let g = k - self.shift;
        let (_, src, _) = self.basis_keys(g);
        let (tspace, _, tpos) = self.basis_keys(g + 1);
        let xe = pack(&var(i));
        src.iter()
            .map(|&l| {
                let r = self.gb.reducer_of(l).unwrap();
                let xl = mul_key(l, xe);
                if self.gb.reducer_of(xl) == Some(r) {
                    return vec![(tpos[&xl], 1)];
                }
                // x_i·u·g in coordinates of the target basis.
                let mut v = vec![0u32; tspace.len()];
                self.gb.subtract_multiple(&tspace, &mut v, r, key_exps(xl), modp::P - 1);
                let mut col = Vec::new();
                for &idx in tspace.order() {
                    let c = v[idx as usize];
                    if c == 0 {
                        continue;
                    }
                    let key = tspace.key(idx as usize);
                    let rr = self.gb.reducer_of(key).expect("element of the submodule");
                    col.push((tpos[&key], c));
                    self.gb.subtract_multiple(&tspace, &mut v, rr, key_exps(key), c);
                }
                col
            })
            .collect()
    }
}

/// Free module with generators in the given degrees.
pub fn free_module(n: usize, degrees: &[i64]) -> Vec<QuotientModule> {
    degrees
        .iter()
        .map(|&a| QuotientModule { gb: Groebner::ideal(n, &[], None), shift: a })
        .collect()
}

/// `C = R / (x_1..x_n)`.
pub fn residue_field(n: usize) -> QuotientModule {
    let gens: Vec<Vec<_>> = (0..n).map(|i| vec![(var(i), 1u32)]).collect();
    QuotientModule { gb: Groebner::ideal(n, &gens, None), shift: 0 }
}

/// The modules attached to an arrangement, each with its lowest degree.
pub struct ArrangementModules {
    pub n: usize,
    pub d: usize,
    /// `M = (R/(∂f))(−n)`.
    pub milnor: QuotientModule,
    /// `Der(−log D)`, derivations of degree `k` having coefficients of degree `k + 1`.
    pub derlog: SubModule,
    /// `df∧Ω^{n−1} ⊂ Ω^n`, graded by form degree.
    pub image: SubModule,
    /// `A^{n−1}_f(−d)`.
    pub cycles: SubModule,
}

impl ArrangementModules {
    pub fn new(eng: &Koszul) -> Self {
        let (n, d) = (eng.n as i64, eng.d as i64);
        ArrangementModules {
            n: eng.n,
            d: eng.d,
            milnor: QuotientModule { gb: eng.image_gb(eng.n).clone(), shift: n },
            derlog: SubModule { gb: eng.derlog_gb().clone(), shift: -d },
            image: SubModule { gb: eng.image_gb(eng.n).clone(), shift: n },
            cycles: SubModule { gb: eng.cycle_gb(eng.n - 1).clone(), shift: d + n - 1 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegChainReport {
    pub reg_m: i64,
    pub reg_image: i64,
    pub reg_cycles: i64,
    pub reg_derlog: i64,
    pub bound_m: i64,
    pub bound_derlog: i64,
    pub chain_ok: bool,
    pub m_within_bound: bool,
    pub derlog_within_bound: bool,
    pub euler_ok: bool,
    pub tables: BTreeMap<String, BettiTable>,
}

impl RegChainReport {
    pub fn passed(&self) -> bool {
        self.chain_ok && self.m_within_bound && self.derlog_within_bound && self.euler_ok
    }
}

fn reg_of(t: &BettiTable) -> i64 {
    t.regularity.unwrap_or(i64::MIN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Milnor,
    Image,
    Cycles,
    DerLog,
}

impl ModuleKind {
    pub const ALL: [ModuleKind; 4] = [ModuleKind::Milnor, ModuleKind::Image, ModuleKind::Cycles, ModuleKind::DerLog];

    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Milnor => "M",
            ModuleKind::Image => "image",
            ModuleKind::Cycles => "cycles",
            ModuleKind::DerLog => "derlog",
        }
    }
}

impl ArrangementModules {
    /// Betti table of one module, with the lowest degree and the expected
    /// regularity bound used to size the window.
    pub fn betti(&self, which: ModuleKind) -> Result<BettiTable, ResolutionError> {
        let (n, d) = (self.n as i64, self.d as i64);
        match which {
            ModuleKind::Milnor => betti_with_retries(&self.milnor, n, 2 * d - 2),
            ModuleKind::Image => betti_with_retries(&self.image, n, 2 * d - 1),
            ModuleKind::Cycles => betti_with_retries(&self.cycles, n - 1 + d, 2 * d),
            ModuleKind::DerLog => betti_with_retries(&self.derlog, -1, d - n),
        }
    }
}

/// `reg Der(−log D)` and its bound `d − n`.
pub fn regularity_derlog_with(mods: &ArrangementModules) -> Result<(BettiTable, bool), ResolutionError> {
    let t = mods.betti(ModuleKind::DerLog)?;
    let ok = reg_of(&t) <= mods.d as i64 - mods.n as i64;
    Ok((t, ok))
}

pub fn regularity_derlog(a: &Arrangement) -> Result<(i64, bool), ResolutionError> {
    a.require_essential()?;
    let (t, ok) = regularity_derlog_with(&ArrangementModules::new(&Koszul::new(a)))?;
    Ok((reg_of(&t), ok))
}

/// The three regularities `reg M`, `reg df∧Ω^{n−1}`, `reg A^{n−1}_f(−d)`
/// and `reg Der(−log D)`, each from its own Betti table.
pub fn verify_reg_chain_with(mods: &ArrangementModules) -> Result<RegChainReport, ResolutionError> {
    let (n, d) = (mods.n as i64, mods.d as i64);
    let tm = mods.betti(ModuleKind::Milnor)?;
    let ti = mods.betti(ModuleKind::Image)?;
    let tc = mods.betti(ModuleKind::Cycles)?;
    let (td, der_ok) = regularity_derlog_with(mods)?;
    let (rm, ri, rc) = (reg_of(&tm), reg_of(&ti), reg_of(&tc));
    let euler_ok = tm.euler_ok && ti.euler_ok && tc.euler_ok && td.euler_ok;
    let rep = RegChainReport {
        reg_m: rm,
        reg_image: ri,
        reg_cycles: rc,
        reg_derlog: reg_of(&td),
        bound_m: 2 * d - 2,
        bound_derlog: d - n,
        chain_ok: rm == ri - 1 && rm == rc - 2,
        m_within_bound: rm <= 2 * d - 2,
        derlog_within_bound: der_ok,
        euler_ok,
        tables: [("M", tm), ("image", ti), ("cycles", tc), ("derlog", td)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    };
    Ok(rep)
}

pub fn verify_reg_chain(a: &Arrangement) -> Result<RegChainReport, ResolutionError> {
    a.require_essential()?;
    let rep = verify_reg_chain_with(&ArrangementModules::new(&Koszul::new(a)))?;
    if !rep.chain_ok {
        return Err(ResolutionError::ChainViolation { reg_m: rep.reg_m, reg_image: rep.reg_image, reg_cycles: rep.reg_cycles });
    }
    Ok(rep)
}

/// `dim Der(−log D)_k` predicted from the factors of a product
/// decomposition: each factor's derivations tensored up to the full ring.
pub fn product_law_dims(a: &Arrangement, kmax: i64) -> Result<Option<Vec<usize>>, ResolutionError> {
    let Some(factors) = product_decomposition(a)? else {
        return Ok(None);
    };
    if factors.len() < 2 {
        return Ok(None);
    }
    let n = a.n();
    let mut out = vec![0usize; (kmax + 2) as usize];
    for f in &factors {
        let r = f.arrangement.n();
        let eng = Koszul::new(&f.arrangement);
        for k in -1..=kmax {
            let mut s = 0;
            for t in -1..=k {
                s += eng.derlog_dim(t) * count(n - r, k - t);
            }
            out[(k + 1) as usize] += s;
        }
    }
    Ok(Some(out))
}

/// Betti table of `Der(−log D)` predicted from the factors' tables.
pub fn product_law_betti(a: &Arrangement) -> Result<Option<BTreeMap<(usize, i64), usize>>, ResolutionError> {
    let Some(factors) = product_decomposition(a)? else {
        return Ok(None);
    };
    let mut out = BTreeMap::new();
    for f in &factors {
        let eng = Koszul::new(&f.arrangement);
        let mods = SubModule { gb: eng.derlog_gb().clone(), shift: -(eng.d as i64) };
        let bound = eng.d as i64 - eng.n as i64;
        let t = betti_with_retries(&mods, -1, bound.max(0))?;
        for (key, v) in t.entries {
            *out.entry(key).or_insert(0) += v;
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{builtin, parse_arrangement};

    #[test]
    fn residue_field_and_free() {
        let c = residue_field(4);
        let t = betti_table(&c, 0, 7).unwrap();
        for j in 0..=4 {
            assert_eq!(t.entries.get(&(j, j as i64)), Some(&binom(4, j as i64)));
        }
        assert_eq!(t.entries.len(), 5);
        assert_eq!(t.regularity, Some(0));
        let f = &free_module(4, &[3])[0];
        let t = betti_table(f, 0, 8).unwrap();
        assert_eq!(t.entries.into_iter().collect::<Vec<_>>(), vec![((0, 3), 1)]);
        assert_eq!(t.regularity, Some(3));
        let r = &free_module(4, &[0])[0];
        assert_eq!(betti_table(r, 0, 6).unwrap().regularity, Some(0));
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let rows: Vec<Vec<u32>> = vec![vec![1, 2, 0, 4], vec![2, 4, 0, 8], vec![0, 1, 1, 0], vec![1, 3, 1, 4]];
        let cols = rows.iter().map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect());
        assert_eq!(sparse_rank(4, cols), modp::Mat::from_rows(4, &rows).rank());
    }

    #[test]
    fn boolean_modules() {
        let a = builtin::boolean(4);
        let eng = Koszul::new(&a);
        let mods = ArrangementModules::new(&eng);
        assert_eq!(tor_dims(&mods.milnor, 0, 4, 4), 1);
        assert_eq!(tor_dims(&mods.milnor, 1, 7, 4), 4);
        let rep = verify_reg_chain_with(&mods).unwrap();
        assert_eq!(rep.reg_derlog, 0);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.tables["derlog"].entries.clone().into_iter().collect::<Vec<_>>(), vec![((0, 0), 4)]);
    }

    #[test]
    fn g5_chain() {
        let a = parse_arrangement("1 1 1 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap();
        let rep = verify_reg_chain(&a).unwrap();
        assert!(rep.passed());
        assert!(rep.reg_derlog <= 1);
    }

    #[test]
    fn product_law() {
        let a = builtin::product("2:3,2:3").unwrap();
        let eng = Koszul::new(&a);
        let pred = product_law_dims(&a, 12).unwrap().unwrap();
        for k in -1..=12 {
            assert_eq!(eng.derlog_dim(k), pred[(k + 1) as usize], "k={k}");
        }
        let mods = ArrangementModules::new(&eng);
        let (t, _) = regularity_derlog_with(&mods).unwrap();
        assert_eq!(t.entries, product_law_betti(&a).unwrap().unwrap());
    }
}
