//! Gröbner bases over F_p for homogeneous submodules of graded free modules
//! `⊕ R(-s_c)`, `R = F_p[x_1..x_n]`.
//!
//! Order: total degree, then an elimination block (block 1 above block 0),
//! then reverse lex with `x_n` smallest, ties broken by position. A term is
//! packed into a `u64` key `[deg][block][!exps][255 - comp]` so that the key
//! order is the monomial order, and multiplying by a monomial is a single
//! add/sub on the key.
//!
//! Dense vectors over a fixed degree are component-major, lex within; with
//! zero shifts this is the layout of [`FormBasis`](crate::graded::FormBasis).

use std::collections::HashMap;

use crate::graded::{binom, count, mono_index, monomial_basis, Mono, MAX_VARS};
use crate::linalg::modp;

pub type Key = u64;

#[inline]
pub fn pack(m: &Mono) -> u32 {
    u32::from_le_bytes(*m)
}

#[inline]
pub fn unpack(e: u32) -> Mono {
    e.to_le_bytes()
}

#[inline]
fn exps_degree(e: u32) -> u64 {
    e.to_le_bytes().iter().map(|&b| b as u64).sum()
}

const DEG_SHIFT: u32 = 41;

/// Key of a term in a module with zero shifts and one block.
#[inline]
pub fn make_key(e: u32, comp: usize) -> Key {
    (exps_degree(e) << DEG_SHIFT) | ((!e as u64) << 8) | (255 - comp as u64)
}

#[inline]
pub fn key_exps(k: Key) -> u32 {
    !((k >> 8) as u32)
}

#[inline]
pub fn key_comp(k: Key) -> usize {
    255 - (k & 255) as usize
}

#[inline]
pub fn key_deg(k: Key) -> usize {
    (k >> DEG_SHIFT) as usize
}

/// Degree of the coefficient monomial of a key.
#[inline]
pub fn key_mono_deg(k: Key) -> usize {
    exps_degree(key_exps(k)) as usize
}

/// Component shifts and elimination blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub shifts: Vec<usize>,
    pub blocks: Vec<u8>,
}

impl Layout {
    pub fn uniform(ncomp: usize) -> Self {
        Layout { shifts: vec![0; ncomp], blocks: vec![0; ncomp] }
    }

    pub fn ncomp(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_uniform(&self) -> bool {
        self.shifts.iter().all(|&s| s == 0) && self.blocks.iter().all(|&b| b == 0)
    }

    #[inline]
    pub fn key(&self, e: u32, comp: usize) -> Key {
        ((exps_degree(e) + self.shifts[comp] as u64) << DEG_SHIFT)
            | ((self.blocks[comp] as u64) << 40)
            | ((!e as u64) << 8)
            | (255 - comp as u64)
    }

    /// Size of component `c` in total degree `deg`.
    pub fn comp_len(&self, n: usize, c: usize, deg: usize) -> usize {
        if deg < self.shifts[c] {
            0
        } else {
            count(n, (deg - self.shifts[c]) as i64)
        }
    }
}

/// Bytewise `a | b`; exponents stay below 128.
#[inline]
fn divides(a: u32, b: u32) -> bool {
    ((b | 0x8080_8080).wrapping_sub(a) & 0x8080_8080) == 0x8080_8080
}

#[inline]
fn lcm(a: u32, b: u32) -> u32 {
    let (x, y) = (a.to_le_bytes(), b.to_le_bytes());
    u32::from_le_bytes([x[0].max(y[0]), x[1].max(y[1]), x[2].max(y[2]), x[3].max(y[3])])
}

#[inline]
fn coprime(a: u32, b: u32) -> bool {
    let (x, y) = (a.to_le_bytes(), b.to_le_bytes());
    (0..4).all(|i| x[i] == 0 || y[i] == 0)
}

#[inline]
pub fn mul_key(k: Key, m: u32) -> Key {
    k + (exps_degree(m) << DEG_SHIFT) - ((m as u64) << 8)
}

/// Homogeneous element: nonzero terms, keys strictly decreasing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elem {
    pub terms: Vec<(Key, u32)>,
}

impl Elem {
    pub fn from_terms(mut terms: Vec<(Key, u32)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Key, u32)> = Vec::with_capacity(terms.len());
        for (k, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 = modp::add(last.1, c),
                _ => out.push((k, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Elem { terms: out }
    }

    pub fn from_poly(p: &[(Mono, u32)]) -> Self {
        Self::from_terms(p.iter().map(|(m, c)| (make_key(pack(m), 0), *c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Key {
        self.terms[0].0
    }

    pub fn degree(&self) -> usize {
        key_deg(self.lead())
    }

    fn monic(mut self) -> Self {
        if let Some(&(_, c)) = self.terms.first() {
            if c != 1 {
                let ic = modp::inv(c);
                for t in &mut self.terms {
                    t.1 = modp::mul(t.1, ic);
                }
            }
        }
        self
    }

    /// Terms as (monomial, component, coefficient).
    pub fn to_poly(&self) -> Vec<(Mono, usize, u32)> {
        self.terms.iter().map(|&(k, c)| (unpack(key_exps(k)), key_comp(k), c)).collect()
    }
}

/// Index layout of one total degree of the free module.
#[derive(Clone, Debug)]
pub struct Space {
    pub n: usize,
    pub deg: usize,
    offsets: Vec<usize>,
    keys: Vec<Key>,
    /// Dense indices by decreasing key.
    order: Vec<u32>,
}

impl Space {
    /// Degree `deg` of `R^ncomp` with zero shifts.
    pub fn new(n: usize, ncomp: usize, deg: usize) -> Self {
        Self::with_layout(n, &Layout::uniform(ncomp), deg)
    }

    pub fn with_layout(n: usize, layout: &Layout, deg: usize) -> Self {
        let mut keys = Vec::new();
        let mut offsets = Vec::with_capacity(layout.ncomp());
        for c in 0..layout.ncomp() {
            offsets.push(keys.len());
            if deg >= layout.shifts[c] {
                for m in monomial_basis(n, (deg - layout.shifts[c]) as i64) {
                    keys.push(layout.key(pack(&m), c));
                }
            }
        }
        let mut order: Vec<u32> = (0..keys.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| keys[b as usize].cmp(&keys[a as usize]));
        Space { n, deg, offsets, keys, order }
    }

    /// Dense indices by decreasing key.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn offset(&self, comp: usize) -> usize {
        self.offsets[comp]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    #[inline]
    pub fn index(&self, k: Key) -> usize {
        self.offsets[key_comp(k)] + mono_index(self.n, &unpack(key_exps(k)))
    }

    pub fn key(&self, idx: usize) -> Key {
        self.keys[idx]
    }

    pub fn to_dense(&self, e: &Elem) -> Vec<u32> {
        let mut v = vec![0u32; self.len()];
        for &(k, c) in &e.terms {
            let i = self.index(k);
            v[i] = modp::add(v[i], c);
        }
        v
    }

    pub fn to_elem(&self, v: &[u32]) -> Elem {
        let mut terms = Vec::new();
        for &i in &self.order {
            let c = v[i as usize];
            if c != 0 {
                terms.push((self.keys[i as usize], c));
            }
        }
        Elem { terms }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: u32,
    comp: usize,
    deg: usize,
}

/// A reduced Gröbner basis, complete through `complete_to` when truncated.
#[derive(Clone, Debug)]
pub struct Groebner {
    pub n: usize,
    pub layout: Layout,
    pub elems: Vec<Elem>,
    /// Leading exponents per component: (exps, element index).
    lts: Vec<Vec<(u32, usize)>>,
    pub complete_to: Option<usize>,
}

impl Groebner {
    pub fn ideal(n: usize, gens: &[Vec<(Mono, u32)>], max_deg: Option<usize>) -> Self {
        Self::compute(n, Layout::uniform(1), gens.iter().map(|g| Elem::from_poly(g)).collect(), max_deg)
    }

    pub fn ncomp(&self) -> usize {
        self.layout.ncomp()
    }

    /// Buchberger degree by degree with the Gebauer–Möller criteria.
    pub fn compute(n: usize, layout: Layout, gens: Vec<Elem>, max_deg: Option<usize>) -> Self {
        let ncomp = layout.ncomp();
        assert!(n <= MAX_VARS && ncomp <= 255);
        let mut gb = Groebner { n, layout, elems: Vec::new(), lts: vec![Vec::new(); ncomp], complete_to: max_deg };
        let mut gens: Vec<Elem> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        gens.sort_by_key(|g| std::cmp::Reverse(g.degree()));
        let mut pairs: Vec<Pair> = Vec::new();
        loop {
            let dp = pairs.iter().map(|p| p.deg).min();
            let dg = gens.last().map(|g| g.degree());
            let deg = match (dp, dg) {
                (None, None) => break,
                (a, b) => a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX)),
            };
            if max_deg.is_some_and(|m| deg > m) {
                break;
            }
            let space = gb.space(deg);
            let mut todo: Vec<Vec<u32>> = Vec::new();
            let (now, later): (Vec<Pair>, Vec<Pair>) = pairs.into_iter().partition(|p| p.deg == deg);
            pairs = later;
            for p in now {
                todo.push(gb.spoly(&space, &p));
            }
            while gens.last().is_some_and(|g| g.degree() == deg) {
                todo.push(space.to_dense(&gens.pop().unwrap()));
            }
            let first_new = gb.elems.len();
            for mut v in todo {
                gb.reduce_dense(&space, &mut v, None);
                let e = space.to_elem(&v);
                if !e.is_zero() {
                    gb.insert(e.monic(), &mut pairs);
                }
            }
            for i in first_new..gb.elems.len() {
                let mut v = space.to_dense(&gb.elems[i]);
                gb.reduce_dense(&space, &mut v, Some(i));
                gb.elems[i] = space.to_elem(&v);
            }
        }
        gb
    }

    fn spoly(&self, space: &Space, p: &Pair) -> Vec<u32> {
        let mut v = vec![0u32; space.len()];
        let (a, b) = (&self.elems[p.i], &self.elems[p.j]);
        let ma = p.lcm.wrapping_sub(key_exps(a.lead()));
        let mb = p.lcm.wrapping_sub(key_exps(b.lead()));
        for &(k, c) in &a.terms {
            let i = space.index(mul_key(k, ma));
            v[i] = modp::add(v[i], c);
        }
        for &(k, c) in &b.terms {
            let i = space.index(mul_key(k, mb));
            v[i] = modp::sub(v[i], c);
        }
        v
    }

    fn insert(&mut self, h: Elem, pairs: &mut Vec<Pair>) {
        let hi = self.elems.len();
        let hk = h.lead();
        let (he, hc) = (key_exps(hk), key_comp(hk));
        let ideal = self.ncomp() == 1;
        let shift = self.layout.shifts[hc];
        let pair_deg = |l: u32| exps_degree(l) as usize + shift;
        let mut c: Vec<Pair> = self.lts[hc]
            .iter()
            .map(|&(e, i)| {
                let l = lcm(e, he);
                Pair { i, j: hi, lcm: l, comp: hc, deg: pair_deg(l) }
            })
            .collect();
        let is_coprime = |p: &Pair, lts: &Vec<Vec<(u32, usize)>>| {
            ideal && coprime(lts[hc].iter().find(|t| t.1 == p.i).unwrap().0, he)
        };
        let mut d: Vec<Pair> = Vec::new();
        while let Some(p) = c.pop() {
            if is_coprime(&p, &self.lts) || !c.iter().chain(d.iter()).any(|q| divides(q.lcm, p.lcm)) {
                d.push(p);
            }
        }
        let e: Vec<Pair> = d.into_iter().filter(|p| !is_coprime(p, &self.lts)).collect();
        let lead_of = |i: usize| key_exps(self.elems[i].lead());
        pairs.retain(|p| {
            if p.comp != hc || !divides(he, p.lcm) {
                return true;
            }
            let (li, lj) = (lcm(lead_of(p.i), he), lcm(lead_of(p.j), he));
            li == p.lcm || lj == p.lcm
        });
        pairs.extend(e);
        self.lts[hc].push((he, hi));
        self.elems.push(h);
    }

    #[inline]
    fn find_reducer(&self, k: Key, skip: Option<usize>) -> Option<usize> {
        let e = key_exps(k);
        self.lts[key_comp(k)].iter().find(|&&(l, i)| Some(i) != skip && divides(l, e)).map(|&(_, i)| i)
    }

    /// Full reduction of a dense vector of degree `space.deg`.
    pub fn reduce_dense(&self, space: &Space, v: &mut [u32], skip: Option<usize>) {
        for &idx in &space.order {
            let c = v[idx as usize];
            if c == 0 {
                continue;
            }
            let k = space.keys[idx as usize];
            if let Some(r) = self.find_reducer(k, skip) {
                self.subtract_multiple(space, v, r, key_exps(k), c);
            }
        }
    }

    #[inline]
    pub fn subtract_multiple(&self, space: &Space, v: &mut [u32], r: usize, target: u32, c: u32) {
        let g = &self.elems[r];
        let m = target.wrapping_sub(key_exps(g.lead()));
        for &(k2, c2) in &g.terms {
            let j = space.index(mul_key(k2, m));
            v[j] = modp::sub(v[j], modp::mul(c, c2));
        }
    }

    pub fn reduce(&self, e: &Elem) -> Elem {
        if e.is_zero() {
            return Elem::default();
        }
        let space = self.space(e.degree());
        let mut v = space.to_dense(e);
        self.reduce_dense(&space, &mut v, None);
        space.to_elem(&v)
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.reduce(e).is_zero()
    }

    pub fn is_standard(&self, comp: usize, e: u32) -> bool {
        !self.lts[comp].iter().any(|&(l, _)| divides(l, e))
    }

    pub fn space(&self, deg: usize) -> Space {
        Space::with_layout(self.n, &self.layout, deg)
    }

    /// Dense indices of the standard monomials of total degree `deg`.
    pub fn standard_indices(&self, deg: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        for c in 0..self.ncomp() {
            if deg >= self.layout.shifts[c] {
                for (i, m) in monomial_basis(self.n, (deg - self.layout.shifts[c]) as i64).iter().enumerate() {
                    if self.is_standard(c, pack(m)) {
                        out.push(offset + i);
                    }
                }
            }
            offset += self.layout.comp_len(self.n, c, deg);
        }
        out
    }

    /// `dim (F / M)_deg`.
    pub fn quotient_dim(&self, deg: usize) -> usize {
        self.standard_indices(deg).len()
    }

    /// `dim M_deg`.
    pub fn submodule_dim(&self, deg: usize) -> usize {
        self.ambient_dim(deg) - self.quotient_dim(deg)
    }

    pub fn ambient_dim(&self, deg: usize) -> usize {
        (0..self.ncomp()).map(|c| self.layout.comp_len(self.n, c, deg)).sum()
    }

    /// The elements whose leading term lies in `block`, as a basis of the
    /// intersection with that block, re-indexed onto the components
    /// `first..first+len` with zero shifts.
    pub fn block_part(&self, first: usize, len: usize) -> Groebner {
        let block = self.layout.blocks[first];
        let elems: Vec<Elem> = self
            .elems
            .iter()
            .filter(|e| self.layout.blocks[key_comp(e.lead())] == block)
            .map(|e| {
                Elem::from_terms(
                    e.terms
                        .iter()
                        .map(|&(k, c)| {
                            let comp = key_comp(k);
                            debug_assert!(comp >= first && comp < first + len);
                            (make_key(key_exps(k), comp - first), c)
                        })
                        .collect(),
                )
            })
            .collect();
        Groebner::from_basis(self.n, Layout::uniform(len), elems)
    }

    /// Wraps elements already forming a reduced Gröbner basis.
    pub fn from_basis(n: usize, layout: Layout, mut elems: Vec<Elem>) -> Groebner {
        elems.sort_by_key(|e| e.lead());
        let mut lts = vec![Vec::new(); layout.ncomp()];
        for (i, e) in elems.iter().enumerate() {
            lts[key_comp(e.lead())].push((key_exps(e.lead()), i));
        }
        Groebner { n, layout, elems, lts, complete_to: None }
    }

    /// First basis element whose leading term divides the term `k`.
    pub fn reducer_of(&self, k: Key) -> Option<usize> {
        self.find_reducer(k, None)
    }

    pub fn max_degree(&self) -> usize {
        self.elems.iter().map(|e| e.degree()).max().unwrap_or(0)
    }

    pub fn leading_keys(&self) -> Vec<Key> {
        self.elems.iter().map(|e| e.lead()).collect()
    }

    /// Normal forms of every monomial of degree `deg` in standard coordinates.
    pub fn normal_forms(&self, deg: usize) -> NormalForms {
        let space = self.space(deg);
        let std = self.standard_indices(deg);
        let q = std.len();
        let mut pos = vec![u32::MAX; space.len()];
        for (p, &i) in std.iter().enumerate() {
            pos[i] = p as u32;
        }
        let mut table = vec![0u32; space.len() * q];
        let mut acc = vec![0u32; q];
        for &idx in space.order.iter().rev() {
            let idx = idx as usize;
            if pos[idx] != u32::MAX {
                table[idx * q + pos[idx] as usize] = 1;
                continue;
            }
            let k = space.keys[idx];
            let r = self.find_reducer(k, None).expect("nonstandard monomial has a reducer");
            let g = &self.elems[r];
            let m = key_exps(k).wrapping_sub(key_exps(g.lead()));
            acc.iter_mut().for_each(|x| *x = 0);
            for &(k2, c2) in &g.terms[1..] {
                let j = space.index(mul_key(k2, m));
                let row = &table[j * q..(j + 1) * q];
                for (a, &b) in acc.iter_mut().zip(row) {
                    if b != 0 {
                        *a = modp::sub(*a, modp::mul(c2, b));
                    }
                }
            }
            table[idx * q..(idx + 1) * q].copy_from_slice(&acc);
        }
        NormalForms { space, std, pos, table }
    }

    /// `I : ℓ^∞` for an ideal and a nonzero linear form `ℓ`.
    pub fn saturate_linear(&self, l: &[u32]) -> Groebner {
        assert_eq!(self.ncomp(), 1);
        assert!(self.complete_to.is_none(), "saturation needs a complete basis");
        let n = self.n;
        let k = (0..n).rev().find(|&i| l[i] != 0).expect("nonzero linear form");
        let last = n - 1;
        // ψ(x_k) = (x_k - Σ_{i≠k} ℓ_i x_i)/ℓ_k, then swap x_k and x_last, so ψ(ℓ) = x_last.
        let il = modp::inv(l[k]);
        let fwd: Vec<u32> = (0..n).map(|i| if i == k { il } else { modp::neg(modp::mul(l[i], il)) }).collect();
        let moved: Vec<Elem> = self.elems.iter().map(|e| swap_vars(&substitute(e, k, &fwd), k, last)).collect();
        let gb = Groebner::compute(n, Layout::uniform(1), moved, None);
        let divided: Vec<Elem> = gb
            .elems
            .iter()
            .map(|e| {
                let s = e.terms.iter().map(|&(k, _)| unpack(key_exps(k))[last]).min().unwrap_or(0);
                let m = pack(&{
                    let mut m = [0u8; MAX_VARS];
                    m[last] = s;
                    m
                });
                Elem::from_terms(e.terms.iter().map(|&(k, c)| (make_key(key_exps(k).wrapping_sub(m), 0), c)).collect())
            })
            .collect();
        let back: Vec<Elem> = divided.iter().map(|e| substitute(&swap_vars(e, k, last), k, l)).collect();
        Groebner::compute(n, Layout::uniform(1), back, None)
    }

    /// Same ideal (or module) as `other`, compared by reduced bases.
    pub fn same_as(&self, other: &Groebner) -> bool {
        let mut a = self.elems.clone();
        let mut b = other.elems.clone();
        a.sort_by_key(|e| e.lead());
        b.sort_by_key(|e| e.lead());
        a == b
    }
}

/// Substitutes `x_k ↦ Σ a_i x_i` (`a_k ≠ 0`) in a homogeneous element.
pub fn substitute(e: &Elem, k: usize, a: &[u32]) -> Elem {
    let mut cur: HashMap<Key, u32> = HashMap::new();
    // scale x_k by a_k
    for &(key, c) in &e.terms {
        let ek = unpack(key_exps(key))[k];
        let v = cur.entry(key).or_insert(0);
        *v = modp::add(*v, modp::mul(c, modp::pow(a[k], ek as u64)));
    }
    // shears x_k ↦ x_k + (a_i/a_k) x_i
    let ia = modp::inv(a[k]);
    for i in 0..a.len() {
        if i == k || a[i] == 0 {
            continue;
        }
        let b = modp::mul(a[i], ia);
        let mut next: HashMap<Key, u32> = HashMap::with_capacity(cur.len() * 2);
        for (&key, &c) in &cur {
            if c == 0 {
                continue;
            }
            let m = unpack(key_exps(key));
            let ek = m[k] as u64;
            let mut coef = c;
            for t in 0..=ek {
                let mut m2 = m;
                m2[k] -= t as u8;
                m2[i] += t as u8;
                let k2 = make_key(pack(&m2), key_comp(key));
                let w = modp::mul(coef, modp::from_i64(binom(ek as i64, t as i64) as i64));
                let v = next.entry(k2).or_insert(0);
                *v = modp::add(*v, w);
                coef = modp::mul(coef, b);
            }
        }
        cur = next;
    }
    Elem::from_terms(cur.into_iter().collect())
}

pub fn swap_vars(e: &Elem, i: usize, j: usize) -> Elem {
    if i == j {
        return e.clone();
    }
    Elem::from_terms(
        e.terms
            .iter()
            .map(|&(k, c)| {
                let mut m = unpack(key_exps(k));
                m.swap(i, j);
                (make_key(pack(&m), key_comp(k)), c)
            })
            .collect(),
    )
}

/// Normal-form table for one degree of a quotient `R^r / M`.
pub struct NormalForms {
    pub space: Space,
    /// Dense indices of standard monomials; coordinate `p` is `std[p]`.
    pub std: Vec<usize>,
    pos: Vec<u32>,
    table: Vec<u32>,
}

impl NormalForms {
    pub fn dim(&self) -> usize {
        self.std.len()
    }

    /// Normal form of the monomial at a dense index.
    pub fn row(&self, idx: usize) -> &[u32] {
        let q = self.dim();
        &self.table[idx * q..(idx + 1) * q]
    }

    pub fn std_position(&self, idx: usize) -> Option<usize> {
        (self.pos[idx] != u32::MAX).then_some(self.pos[idx] as usize)
    }

    /// Normal form of a dense vector of this degree.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.dim()];
        for (idx, &c) in v.iter().enumerate() {
            if c != 0 {
                modp::axpy(&mut out, c, self.row(idx));
            }
        }
        out
    }

    /// Adds `c · NF(monomial key)` into `out`.
    pub fn add_key(&self, out: &mut [u32], k: Key, c: u32) {
        modp::axpy(out, c, self.row(self.space.index(k)));
    }
}

/// Matrix of multiplication by `x_i` from degree `src.space.deg` to `tgt`.
pub fn multiplication_matrix(src: &NormalForms, tgt: &NormalForms, i: usize) -> modp::Mat {
    let mut m = modp::Mat::zeros(tgt.dim(), src.dim());
    let mut x = [0u8; MAX_VARS];
    x[i] = 1;
    let xe = pack(&x);
    for (col, &idx) in src.std.iter().enumerate() {
        let row = tgt.row(tgt.space.index(mul_key(src.space.key(idx), xe)));
        for (r, &v) in row.iter().enumerate() {
            if v != 0 {
                m.set(r, col, v);
            }
        }
    }
    m
}

/// Multiplies every term of `e` by the monomial `m`.
pub fn mul_mono(e: &Elem, m: &Mono) -> Elem {
    let me = pack(m);
    Elem { terms: e.terms.iter().map(|&(k, c)| (mul_key(k, me), c)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Arrangement;
    use crate::graded::{var, wedge_df_modp, Jacobian};

    fn mono(e: [u8; 4]) -> Mono {
        e
    }

    #[test]
    fn key_order_is_degrevlex() {
        let k = |m: [u8; 4]| make_key(pack(&m), 0);
        assert!(k([2, 0, 0, 0]) > k([1, 1, 0, 0]));
        assert!(k([0, 2, 0, 0]) > k([1, 0, 1, 0]));
        assert!(k([1, 0, 1, 0]) > k([0, 0, 0, 2]));
        assert!(k([0, 0, 0, 3]) > k([0, 0, 0, 2]));
        assert!(make_key(pack(&[1, 0, 0, 0]), 0) > make_key(pack(&[1, 0, 0, 0]), 1));
        let a = [1, 2, 0, 1];
        let b = [0, 1, 3, 0];
        assert_eq!(mul_key(k(a), pack(&b)), k(crate::graded::mono_mul(&a, &b)));
        assert!(divides(pack(&[1, 0, 2, 0]), pack(&[1, 1, 2, 0])));
        assert!(!divides(pack(&[1, 0, 3, 0]), pack(&[1, 1, 2, 0])));
    }

    #[test]
    fn boolean_jacobian_ideal() {
        let a = Arrangement::from_i64(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        let jac = Jacobian::new(&a);
        let gb = Groebner::ideal(4, &jac.partials_p, None);
        assert_eq!(gb.elems.len(), 4);
        // R/(x2x3x4, ...) : squarefree-free monomials plus those missing two variables
        for k in 0..12 {
            let direct = crate::graded::monomial_basis(4, k as i64)
                .iter()
                .filter(|m| m.iter().filter(|&&e| e == 0).count() >= 1 && !(m.iter().filter(|&&e| e > 0).count() >= 3))
                .count();
            assert_eq!(gb.quotient_dim(k), direct, "degree {k}");
        }
    }

    #[test]
    fn hilbert_matches_direct_rank() {
        let a = Arrangement::from_i64(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 1, 1, 1], &[1, 2, 3, 5]]).unwrap();
        let jac = Jacobian::new(&a);
        let d = jac.d as i64;
        let gb = Groebner::ideal(4, &jac.partials_p, None);
        for k in 0..9i64 {
            let m = wedge_df_modp(&jac, 3, k + 4 - d);
            let direct = count(4, k) - if k + 4 - d >= 3 { m.rank() } else { 0 };
            assert_eq!(gb.quotient_dim(k as usize), direct, "degree {k}");
        }
        // df ∧ Ω^1 inside Ω^2 ≅ R^6
        let gens: Vec<Elem> = (0..4)
            .map(|i| {
                let v = crate::graded::wedge_df_apply(&jac, 1, 1, &{
                    let mut e = vec![0u32; 4];
                    e[i] = 1;
                    e
                });
                Space::new(4, 6, (d - 1) as usize).to_elem(&v)
            })
            .collect();
        let m2 = Groebner::compute(4, Layout::uniform(6), gens, None);
        for k in 1..10i64 {
            let rank = if k - d >= 1 { wedge_df_modp(&jac, 1, k - d).rank() } else { 0 };
            assert_eq!(m2.submodule_dim((k - 2).max(0) as usize) * usize::from(k >= 2), rank, "k {k}");
        }
    }

    #[test]
    fn normal_forms_are_consistent() {
        let gens = vec![
            vec![(mono([2, 0, 0, 0]), 1), (mono([0, 1, 1, 0]), 3)],
            vec![(mono([0, 2, 0, 0]), 1), (mono([1, 0, 0, 1]), modp::P - 1)],
            vec![(mono([0, 0, 3, 0]), 1), (mono([0, 0, 0, 3]), 1)],
        ];
        let gb = Groebner::ideal(4, &gens, None);
        let nf3 = gb.normal_forms(3);
        let nf4 = gb.normal_forms(4);
        let x1 = multiplication_matrix(&nf3, &nf4, 0);
        // x1 · NF(m) = NF(x1 · m) for every monomial m of degree 3
        for (idx, m) in crate::graded::monomial_basis(4, 3).iter().enumerate() {
            let lhs = x1.mul_vec(nf3.row(idx));
            let t = crate::graded::mono_mul(m, &var(0));
            let rhs = nf4.row(mono_index(4, &t)).to_vec();
            assert_eq!(lhs, rhs);
        }
        // generators reduce to zero
        for g in &gens {
            assert!(gb.contains(&Elem::from_poly(g)));
        }
    }

    #[test]
    fn saturation_by_linear_forms() {
        // (x1 x4, x2 x4) : x4^∞ = (x1, x2)
        let gens = vec![vec![(mono([1, 0, 0, 1]), 1)], vec![(mono([0, 1, 0, 1]), 1)]];
        let gb = Groebner::ideal(4, &gens, None);
        let sat = gb.saturate_linear(&[0, 0, 0, 1]);
        let expect = Groebner::ideal(4, &[vec![(mono([1, 0, 0, 0]), 1)], vec![(mono([0, 1, 0, 0]), 1)]], None);
        assert!(sat.same_as(&expect));
        // ((x1 + x2) x3, (x1 + x2) x4^2) : (x1 + x2)^∞ = (x3, x4^2)
        let gens = vec![
            vec![(mono([1, 0, 1, 0]), 1), (mono([0, 1, 1, 0]), 1)],
            vec![(mono([1, 0, 0, 2]), 1), (mono([0, 1, 0, 2]), 1)],
        ];
        let sat = Groebner::ideal(4, &gens, None).saturate_linear(&[1, 1, 0, 0]);
        let expect = Groebner::ideal(4, &[vec![(mono([0, 0, 1, 0]), 1)], vec![(mono([0, 0, 0, 2]), 1)]], None);
        assert!(sat.same_as(&expect));
        // saturating by a form not dividing anything changes nothing
        let gens = vec![vec![(mono([2, 0, 0, 0]), 1)], vec![(mono([0, 1, 1, 0]), 1)]];
        let gb = Groebner::ideal(4, &gens, None);
        assert!(gb.saturate_linear(&[0, 0, 0, 1]).same_as(&gb));
    }

    #[test]
    fn substitution_round_trip() {
        let e = Elem::from_poly(&[(mono([1, 2, 0, 1]), 5), (mono([0, 0, 3, 1]), 7), (mono([4, 0, 0, 0]), 1)]);
        let l = [3u32, 0, 2, 0];
        let il = modp::inv(l[2]);
        let fwd: Vec<u32> = (0..4).map(|i| if i == 2 { il } else { modp::neg(modp::mul(l[i], il)) }).collect();
        let there = swap_vars(&substitute(&e, 2, &fwd), 2, 3);
        let back = substitute(&swap_vars(&there, 2, 3), 2, &l);
        assert_eq!(back, e);
    }
}
