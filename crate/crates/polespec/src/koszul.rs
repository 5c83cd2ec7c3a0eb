//! Koszul cohomology of `df∧` on forms, the Milnor algebra and logarithmic
//! derivations.
//!
//! Degrees are form degrees: `Ω^j_m` has coefficients of degree `m - j`.
//! `h^j_m = dim H^j(Ω^•, df∧)_m`, so `df∧` maps degree `m` to `m + d`.
//!
//! Two paths compute the same numbers. The free functions solve the defining
//! linear systems exactly over Q and are meant for small degrees; [`Koszul`]
//! works mod p through Gröbner bases of the image and cycle modules and
//! reaches every degree cheaply.

use std::collections::HashMap;

use crate::arrangement::Arrangement;
use crate::graded::{
    binom, count, monomial_basis, mono_index, mono_mul, wedge_df_apply, wedge_df_matrix_with, FormBasis, Jacobian,
};
use crate::groebner::{key_exps, Elem, Groebner, Key, Layout, Space};
use crate::linalg::{self, modp, LinalgError, QMatrix, Subquotient, Q};

/// Exact cohomology of `df∧` at one form degree, `j = 0..=n`.
#[derive(Clone, Debug)]
pub struct KoszulSlice {
    pub k: i64,
    pub h: Vec<Subquotient>,
}

pub fn koszul_slice(a: &Arrangement, k: i64) -> Result<KoszulSlice, LinalgError> {
    let jac = Jacobian::new(a);
    let n = a.n();
    let d = a.d() as i64;
    let mut h = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let dim = FormBasis::new(n, j, k).len();
        let cycles = if j == n {
            QMatrix::identity(dim)
        } else {
            linalg::kernel_basis(&wedge_df_matrix_with(&jac, j, k).matrix)
        };
        let boundaries = if j == 0 { QMatrix::zeros(dim, 0) } else { wedge_df_matrix_with(&jac, j - 1, k - d).matrix };
        h.push(Subquotient::new(cycles, boundaries)?);
    }
    Ok(KoszulSlice { k, h })
}

/// `μ_k = dim Ω^n_k − rank(df∧: Ω^{n-1}_{k-d} → Ω^n_k)`, exactly.
pub fn milnor_dim(a: &Arrangement, k: i64) -> usize {
    let n = a.n();
    let top = FormBasis::new(n, n, k).len();
    let jac = Jacobian::new(a);
    top - linalg::rank(&wedge_df_matrix_with(&jac, n - 1, k - a.d() as i64).matrix)
}

/// `h^j_k`, exactly.
pub fn koszul_h_dim(a: &Arrangement, j: usize, k: i64) -> usize {
    let jac = Jacobian::new(a);
    let n = a.n();
    let d = a.d() as i64;
    let dim = FormBasis::new(n, j, k).len();
    let rank_out = if j == n { 0 } else { linalg::rank(&wedge_df_matrix_with(&jac, j, k).matrix) };
    let rank_in = if j == 0 { 0 } else { linalg::rank(&wedge_df_matrix_with(&jac, j - 1, k - d).matrix) };
    dim - rank_out - rank_in
}

/// `μ_k` for `0 ≤ k ≤ kmax` through the Gröbner engine.
pub fn milnor_hilbert_series(a: &Arrangement, kmax: i64) -> Vec<usize> {
    let eng = Koszul::new(a);
    (0..=kmax).map(|k| eng.milnor(k)).collect()
}

/// Logarithmic derivations of degree `k` (coefficients in `R_{k+1}`).
#[derive(Clone, Debug)]
pub struct DerLogSlice {
    pub k: i64,
    /// Coefficient vectors `(g_1..g_n)`, each `g_i` in the monomial basis of `R_{k+1}`.
    pub derlog_basis: Vec<Vec<Q>>,
    pub derlog0_basis: Vec<Vec<Q>>,
    pub theta0_component: usize,
}

/// Solves `Σ g_i ∂_i f = c f` with unknown cofactor `c ∈ R_k`.
pub fn derlog_slice(a: &Arrangement, k: i64) -> DerLogSlice {
    let jac = Jacobian::new(a);
    let n = a.n();
    let d = a.d() as i64;
    let gdeg = k + 1;
    let gmon = monomial_basis(n, gdeg);
    let cmon = monomial_basis(n, k);
    let rows = count(n, k + d);
    let ng = n * gmon.len();
    let mut t = Vec::new();
    for i in 0..n {
        for (c, m) in gmon.iter().enumerate() {
            for (e, v) in &jac.partials[i].terms {
                t.push((mono_index(n, &mono_mul(m, e)), i * gmon.len() + c, Q::from_integer(v.clone())));
            }
        }
    }
    let syz0 = QMatrix::from_triplets(rows, ng, t.clone());
    for (c, m) in cmon.iter().enumerate() {
        for (e, v) in &jac.f.terms {
            t.push((mono_index(n, &mono_mul(m, e)), ng + c, -Q::from_integer(v.clone())));
        }
    }
    let syz = QMatrix::from_triplets(rows, ng + cmon.len(), t);
    let derlog_basis: Vec<Vec<Q>> = linalg::kernel_basis(&syz).columns().into_iter().map(|v| v[..ng].to_vec()).collect();
    let derlog0_basis = linalg::kernel_basis(&syz0).columns();
    let theta0_component = derlog_basis.len() - derlog0_basis.len();
    DerLogSlice { k, derlog_basis, derlog0_basis, theta0_component }
}

/// `dim Der⁰_k = dim (A_f^{n-1})_{k+n}`, both sides solved exactly.
pub fn check_derlog0_iso(a: &Arrangement, k: i64) -> bool {
    let n = a.n();
    let lhs = derlog_slice(a, k).derlog0_basis.len();
    let jac = Jacobian::new(a);
    let w = wedge_df_matrix_with(&jac, n - 1, k + n as i64);
    let rhs = w.source.len() - linalg::rank(&w.matrix);
    lhs == rhs
}

/// Mod-p Gröbner data for the Koszul complex of one arrangement.
pub struct Koszul {
    pub n: usize,
    pub d: usize,
    pub jac: Jacobian,
    /// `B^j = df∧Ω^{j-1} ⊂ Ω^j`, indexed by `j`.
    images: Vec<Groebner>,
    /// `Z^j = ker(df∧) ⊂ Ω^j`, indexed by `j`.
    cycles: Vec<Groebner>,
    derlog: Groebner,
    derlog0: Groebner,
}

impl Koszul {
    pub fn new(a: &Arrangement) -> Self {
        let jac = Jacobian::new(a);
        let n = a.n();
        let d = a.d();
        let images = (0..=n).map(|j| image_module(&jac, j)).collect();
        let cycles = (0..=n).map(|j| cycle_module(&jac, j)).collect();
        let derlog = syzygy_module(&jac, true);
        let derlog0 = syzygy_module(&jac, false);
        Koszul { n, d, jac, images, cycles, derlog, derlog0 }
    }

    pub fn omega_dim(&self, j: usize, m: i64) -> usize {
        FormBasis::new(self.n, j, m).len()
    }

    pub fn image_gb(&self, j: usize) -> &Groebner {
        &self.images[j]
    }

    pub fn cycle_gb(&self, j: usize) -> &Groebner {
        &self.cycles[j]
    }

    /// `dim B^j_m`.
    pub fn image_dim(&self, j: usize, m: i64) -> usize {
        if m < j as i64 {
            0
        } else {
            self.images[j].submodule_dim((m - j as i64) as usize)
        }
    }

    /// `dim Z^j_m` from the cycle basis.
    pub fn cycle_dim(&self, j: usize, m: i64) -> usize {
        if m < j as i64 {
            0
        } else {
            self.cycles[j].submodule_dim((m - j as i64) as usize)
        }
    }

    /// `rank(df∧: Ω^j_m → Ω^{j+1}_{m+d})`.
    pub fn wedge_rank(&self, j: usize, m: i64) -> usize {
        if j >= self.n {
            0
        } else {
            self.image_dim(j + 1, m + self.d as i64)
        }
    }

    /// `h^j_m = dim Ω^j_m − rank(df∧ out) − rank(df∧ in)`.
    pub fn h(&self, j: usize, m: i64) -> usize {
        self.omega_dim(j, m) - self.wedge_rank(j, m) - self.image_dim(j, m)
    }

    pub fn milnor(&self, k: i64) -> usize {
        self.h(self.n, k)
    }

    /// `dim Der(−log D)_k` (coefficients of degree `k+1`).
    pub fn derlog_dim(&self, k: i64) -> usize {
        let t = k + self.d as i64;
        if t < 0 {
            0
        } else {
            self.derlog.submodule_dim(t as usize)
        }
    }

    /// `dim Der(−log D)^0_k`.
    pub fn derlog0_dim(&self, k: i64) -> usize {
        let t = k + self.d as i64;
        if t < 0 {
            0
        } else {
            self.derlog0.submodule_dim(t as usize)
        }
    }

    /// The syzygies `(g, c)` with `Σ g_i ∂_i f = c f`; degree `k + d` holds `Der_k`.
    pub fn derlog_gb(&self) -> &Groebner {
        &self.derlog
    }

    pub fn derlog0_gb(&self) -> &Groebner {
        &self.derlog0
    }

    /// Basis of `H^j_m` by leading terms of cycles that are not leading
    /// terms of boundaries.
    pub fn cohomology(&self, j: usize, m: i64) -> Cohomology {
        let ncomp = binom(self.n as i64, j as i64);
        let deg = (m - j as i64).max(0) as usize;
        let space = Space::new(self.n, if m < j as i64 { 0 } else { ncomp }, deg);
        let mut basis = Vec::new();
        if m >= j as i64 {
            let z = &self.cycles[j];
            let b = &self.images[j];
            for &idx in space.order() {
                let k = space.key(idx as usize);
                if z.reducer_of(k).is_some() && b.reducer_of(k).is_none() {
                    basis.push(k);
                }
            }
        }
        let pos = basis.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Cohomology { j, m, space, basis, pos }
    }
}

/// Cohomology at `(j, m)` with chosen representatives. Below degree `j` the
/// ambient space has no components.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub j: usize,
    pub m: i64,
    pub space: Space,
    /// Leading keys of the chosen representatives, in decreasing order.
    pub basis: Vec<Key>,
    pos: HashMap<Key, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotACycle;

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.len()
    }

    /// Dense representative of basis class `i` in `Ω^j_m`.
    pub fn representative(&self, eng: &Koszul, i: usize) -> Vec<u32> {
        let z = &eng.cycles[self.j];
        let k = self.basis[i];
        let r = z.reducer_of(k).expect("basis key is a cycle leading term");
        let mut v = vec![0u32; self.space.len()];
        // subtracting -1 times the element adds it
        z.subtract_multiple(&self.space, &mut v, r, key_exps(k), modp::P - 1);
        v
    }

    /// Coordinates of the class of a cycle; `Err` if `v` is not a cycle.
    pub fn coordinates(&self, eng: &Koszul, v: &[u32]) -> Result<Vec<u32>, NotACycle> {
        let mut out = vec![0u32; self.dim()];
        if self.ambient_dim() == 0 {
            return Ok(out);
        }
        let z = &eng.cycles[self.j];
        let b = &eng.images[self.j];
        let mut v = v.to_vec();
        for &idx in self.space.order() {
            let c = v[idx as usize];
            if c == 0 {
                continue;
            }
            let k = self.space.key(idx as usize);
            if let Some(r) = b.reducer_of(k) {
                b.subtract_multiple(&self.space, &mut v, r, key_exps(k), c);
            } else if let Some(&p) = self.pos.get(&k) {
                out[p] = c;
                let r = z.reducer_of(k).unwrap();
                z.subtract_multiple(&self.space, &mut v, r, key_exps(k), c);
            } else {
                return Err(NotACycle);
            }
        }
        Ok(out)
    }

    /// Whether `v` lies in `B^j_m`.
    pub fn is_boundary(&self, eng: &Koszul, v: &[u32]) -> bool {
        if self.ambient_dim() == 0 {
            return true;
        }
        let mut v = v.to_vec();
        eng.images[self.j].reduce_dense(&self.space, &mut v, None);
        v.iter().all(|&x| x == 0)
    }
}

/// `df∧e_S` for every `(j-1)`-subset, as elements of `Ω^j ≅ R^{C(n,j)}`.
fn wedge_generators(jac: &Jacobian, j: usize) -> Vec<Vec<u32>> {
    let src = FormBasis::new(jac.n, j - 1, j as i64 - 1);
    (0..src.len())
        .map(|c| {
            let mut e = vec![0u32; src.len()];
            e[c] = 1;
            wedge_df_apply(jac, j - 1, j as i64 - 1, &e)
        })
        .collect()
}

fn image_module(jac: &Jacobian, j: usize) -> Groebner {
    let n = jac.n;
    let ncomp = binom(n as i64, j as i64);
    if j == 0 {
        return Groebner::compute(n, Layout::uniform(ncomp), vec![], None);
    }
    let space = Space::new(n, ncomp, jac.d - 1);
    let gens = wedge_generators(jac, j).iter().map(|v| space.to_elem(v)).collect();
    Groebner::compute(n, Layout::uniform(ncomp), gens, None)
}

/// Kernel of `df∧` on `Ω^j` from the graph `{(ω, df∧ω)}` under an order that
/// eliminates the `Ω^{j+1}` block.
fn cycle_module(jac: &Jacobian, j: usize) -> Groebner {
    let n = jac.n;
    let src = binom(n as i64, j as i64);
    if j == n {
        let unit = Elem::from_terms(vec![(Layout::uniform(1).key(0, 0), 1)]);
        return Groebner::compute(n, Layout::uniform(1), vec![unit], None);
    }
    let tgt = binom(n as i64, j as i64 + 1);
    let s = jac.d - 1;
    let layout = Layout {
        shifts: (0..src + tgt).map(|c| if c < src { s } else { 0 }).collect(),
        blocks: (0..src + tgt).map(|c| u8::from(c >= src)).collect(),
    };
    let tspace = Space::new(n, tgt, s);
    let gens: Vec<Elem> = wedge_generators(jac, j + 1)
        .iter()
        .enumerate()
        .map(|(c, v)| {
            let img = tspace.to_elem(v);
            let mut terms = vec![(layout.key(0, c), 1)];
            for (m, comp, x) in img.to_poly() {
                terms.push((layout.key(crate::groebner::pack(&m), src + comp), x));
            }
            Elem::from_terms(terms)
        })
        .collect();
    let full = Groebner::compute(n, layout, gens, None);
    full.block_part(0, src)
}

/// Syzygies of `(∂_1 f, .., ∂_n f)`, with an extra cofactor component
/// `−f` when `with_f`.
fn syzygy_module(jac: &Jacobian, with_f: bool) -> Groebner {
    let n = jac.n;
    let d = jac.d;
    let src = n + usize::from(with_f);
    let mut shifts: Vec<usize> = vec![d - 1; n];
    if with_f {
        shifts.push(d);
    }
    shifts.push(0);
    let mut blocks = vec![0u8; src];
    blocks.push(1);
    let layout = Layout { shifts, blocks };
    let mut gens = Vec::new();
    for i in 0..src {
        let mut terms = vec![(layout.key(0, i), 1)];
        let poly = if i < n { jac.partials_p[i].clone() } else { jac.f_modp().into_iter().map(|(m, c)| (m, modp::neg(c))).collect() };
        for (m, c) in poly {
            terms.push((layout.key(crate::groebner::pack(&m), src), c));
        }
        gens.push(Elem::from_terms(terms));
    }
    let full = Groebner::compute(n, layout.clone(), gens, None);
    let elems: Vec<Elem> = full
        .elems
        .iter()
        .filter(|e| layout.blocks[crate::groebner::key_comp(e.lead())] == 0)
        .cloned()
        .collect();
    let sub_layout = Layout { shifts: layout.shifts[..src].to_vec(), blocks: vec![0; src] };
    let elems = elems
        .into_iter()
        .map(|e| {
            Elem::from_terms(
                e.terms
                    .iter()
                    .map(|&(k, c)| (sub_layout.key(key_exps(k), crate::groebner::key_comp(k)), c))
                    .collect(),
            )
        })
        .collect();
    Groebner::from_basis(n, sub_layout, elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::builtin;
    use crate::arrangement::parse_arrangement;

    fn g5() -> Arrangement {
        parse_arrangement("1 1 1 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap()
    }

    #[test]
    fn boolean_milnor_numbers() {
        let a = builtin::boolean(4);
        let expect = [0, 0, 0, 0, 1, 4, 10, 16, 22, 28];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(milnor_dim(&a, k as i64), e, "k={k}");
        }
        assert_eq!(milnor_hilbert_series(&a, 9), expect.to_vec());
        assert_eq!(koszul_h_dim(&a, 3, 4), 3);
    }

    #[test]
    fn engine_matches_exact() {
        for a in [builtin::boolean(4), g5(), builtin::generic(3, 5, 1).unwrap(), builtin::nearpencil(5).unwrap()] {
            let eng = Koszul::new(&a);
            let kmax = if a.n() == 3 { 9 } else { 7 };
            for k in 0..=kmax {
                for j in 0..=a.n() {
                    assert_eq!(eng.h(j, k), koszul_h_dim(&a, j, k), "j={j} k={k} d={}", a.d());
                    let zdim = eng.omega_dim(j, k) - eng.wedge_rank(j, k);
                    assert_eq!(eng.cycle_dim(j, k), zdim, "cycle dims j={j} k={k}");
                    assert_eq!(eng.cohomology(j, k).dim(), eng.h(j, k));
                }
            }
        }
    }

    #[test]
    fn cohomology_coordinates() {
        let a = g5();
        let eng = Koszul::new(&a);
        for j in 2..=4 {
            for m in 4..10 {
                let h = eng.cohomology(j, m);
                for i in 0..h.dim() {
                    let v = h.representative(&eng, i);
                    let c = h.coordinates(&eng, &v).unwrap();
                    let mut e = vec![0u32; h.dim()];
                    e[i] = 1;
                    assert_eq!(c, e);
                    // representatives are cycles
                    if j < 4 {
                        let w = wedge_df_apply(&eng.jac, j, m, &v);
                        assert!(w.iter().all(|&x| x == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn derivations() {
        let b4 = builtin::boolean(4);
        let s = derlog_slice(&b4, 0);
        assert_eq!((s.derlog_basis.len(), s.derlog0_basis.len(), s.theta0_component), (4, 3, 1));
        assert_eq!(derlog_slice(&b4, -1).derlog_basis.len(), 0);
        assert!(check_derlog0_iso(&b4, 0));
        for a in [b4, g5()] {
            let eng = Koszul::new(&a);
            for k in -1..5 {
                let s = derlog_slice(&a, k);
                assert_eq!(eng.derlog_dim(k), s.derlog_basis.len(), "k={k}");
                assert_eq!(eng.derlog0_dim(k), s.derlog0_basis.len(), "k={k}");
                assert!(check_derlog0_iso(&a, k));
                assert_eq!(eng.derlog0_dim(k), eng.cycle_dim(a.n() - 1, k + a.n() as i64));
            }
        }
    }
}
