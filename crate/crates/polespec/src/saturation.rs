//! Saturation of the Jacobian ideal away from the rank-3 flats, degree by
//! degree.
//!
//! `J` is obtained from a Gröbner basis of `(∂f)` by saturating with one
//! generic linear form from each rank-3 flat prime and one generic form
//! overall. A form chosen outside every rank-2 flat span removes exactly the
//! primary components whose prime contains it. The degreewise colon
//! `{g : P^N g ⊆ I}` is kept as an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{intersection_lattice, Arrangement, ArrangementError, Flat};
use crate::graded::{count, monomial_basis, mono_index, mono_mul, Mono};
use crate::groebner::Groebner;
use crate::koszul::Koszul;
use crate::linalg::modp::{self, Mat};

#[derive(Debug, Error)]
pub enum SaturationError {
    #[error("colon by P^N did not stabilize for N ≤ {0}")]
    NoStabilization(usize),
    #[error("could not find a generic linear form for a flat after {0} draws")]
    NoGenericForm(usize),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// Polynomial over F_p as `(monomial, coefficient)` terms.
pub type PolyP = Vec<(Mono, u32)>;

#[derive(Clone, Debug, Serialize)]
pub struct IdealSlice {
    pub k: i64,
    pub dim: usize,
    /// Basis of the degree-`k` piece, each a coefficient vector over the
    /// monomials of degree `k` (graded lex order).
    #[serde(skip)]
    pub basis: Vec<Vec<u32>>,
    /// Exponent at which the colon stabilized (0 when not computed by colon).
    pub stabilization_witness: usize,
}

/// Products of `n` generators, with repetition.
fn power_generators(gens: &[PolyP], n: usize) -> Vec<PolyP> {
    let mut out: Vec<(usize, PolyP)> = vec![(0, vec![([0; 4], 1)])];
    for _ in 0..n {
        let mut next = Vec::new();
        for (start, p) in &out {
            for (gi, g) in gens.iter().enumerate().skip(*start) {
                next.push((gi, poly_mul(p, g)));
            }
        }
        out = next;
    }
    out.into_iter().map(|(_, p)| p).collect()
}

fn poly_mul(a: &PolyP, b: &PolyP) -> PolyP {
    let mut acc: std::collections::BTreeMap<Mono, u32> = Default::default();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let e = acc.entry(mono_mul(ma, mb)).or_insert(0);
            *e = modp::add(*e, modp::mul(*ca, *cb));
        }
    }
    acc.into_iter().filter(|&(_, c)| c != 0).collect()
}

fn poly_degree(p: &PolyP) -> i64 {
    p.first().map_or(0, |(m, _)| m.iter().map(|&x| x as i64).sum())
}

/// `{g ∈ R_k : P^N g ⊆ I}` for one `N`, as a kernel.
fn colon_once(i_gb: &Groebner, p_gens: &[PolyP], n_pow: usize, k: i64) -> Vec<Vec<u32>> {
    let n = i_gb.n;
    let src = monomial_basis(n, k);
    let pow = power_generators(p_gens, n_pow);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for p in pow.iter().filter(|p| !p.is_empty()) {
        let deg = k + poly_degree(p);
        let nf = i_gb.normal_forms(deg as usize);
        // Column c is NF(p · x^c); each standard coordinate gives one row.
        let mut block = vec![vec![0u32; src.len()]; nf.dim()];
        for (c, m) in src.iter().enumerate() {
            for (e, x) in p {
                let idx = mono_index(n, &mono_mul(m, e));
                for (r, &y) in nf.row(idx).iter().enumerate() {
                    if y != 0 {
                        block[r][c] = modp::add(block[r][c], modp::mul(*x, y));
                    }
                }
            }
        }
        rows.extend(block);
    }
    if rows.is_empty() {
        return (0..src.len())
            .map(|i| {
                let mut v = vec![0; src.len()];
                v[i] = 1;
                v
            })
            .collect();
    }
    Mat::from_rows(src.len(), &rows).kernel()
}

/// `(I : P^N)_k`, raising `N` until two consecutive exponents agree.
pub fn colon_power_slice(i_gb: &Groebner, p_gens: &[PolyP], k: i64, n_max: usize) -> Result<IdealSlice, SaturationError> {
    let mut prev = colon_once(i_gb, p_gens, 0, k);
    for n_pow in 1..=n_max {
        let cur = colon_once(i_gb, p_gens, n_pow, k);
        if cur.len() == prev.len() {
            return Ok(IdealSlice { k, dim: cur.len(), basis: cur, stabilization_witness: n_pow - 1 });
        }
        prev = cur;
    }
    Err(SaturationError::NoStabilization(n_max))
}

/// Degree-`k` piece of an ideal given by a Gröbner basis.
pub fn ideal_slice(gb: &Groebner, k: i64) -> IdealSlice {
    let n = gb.n;
    let mut basis = Vec::new();
    if k >= 0 {
        let space = gb.space(k as usize);
        for &idx in space.order() {
            let key = space.key(idx as usize);
            if let Some(r) = gb.reducer_of(key) {
                let mut v = vec![0u32; count(n, k)];
                gb.subtract_multiple(&space, &mut v, r, crate::groebner::key_exps(key), modp::P - 1);
                basis.push(v);
            }
        }
    }
    IdealSlice { k, dim: basis.len(), basis, stabilization_witness: 0 }
}

fn linear_poly(l: &[u32]) -> PolyP {
    l.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let mut m = [0u8; 4];
            m[i] = 1;
            (m, c)
        })
        .collect()
}

/// Generators of the prime of a flat, reduced mod p.
pub fn flat_prime(f: &Flat) -> Vec<PolyP> {
    f.basis_of_equations
        .iter()
        .map(|row| linear_poly(&row.iter().map(modp::from_rational).collect::<Vec<_>>()))
        .collect()
}

fn rows_modp(f: &Flat) -> Vec<Vec<u32>> {
    f.basis_of_equations.iter().map(|r| r.iter().map(modp::from_rational).collect()).collect()
}

/// A random combination of `span` that avoids every subspace in `avoid`.
fn generic_form(span: &[Vec<u32>], avoid: &[Vec<Vec<u32>>], n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u32>, SaturationError> {
    const TRIES: usize = 32;
    for _ in 0..TRIES {
        let mut l = vec![0u32; n];
        for row in span {
            modp::axpy(&mut l, rng.gen_range(1..modp::P), row);
        }
        if l.iter().all(|&x| x == 0) {
            continue;
        }
        let inside = avoid.iter().any(|s| {
            let r0 = modp::span_rank(n, s.iter().cloned());
            modp::span_rank(n, s.iter().cloned().chain(std::iter::once(l.clone()))) == r0
        });
        if !inside {
            return Ok(l);
        }
    }
    Err(SaturationError::NoGenericForm(TRIES))
}

#[derive(Clone, Debug, Serialize)]
pub struct Saturation {
    /// Slices of `J` for `0 ≤ k ≤ kmax`.
    pub slices: Vec<IdealSlice>,
    /// Dimensions of `(∂f)_k`.
    pub jacobian_dims: Vec<usize>,
    /// Smallest `k₀` with `J_k = (∂f)_k` for `k₀ ≤ k ≤ kmax`.
    pub k0: i64,
    pub order_independent: bool,
    pub is_ideal: bool,
    /// `dim J_k − dim (∂f)_k` at `k = kmax`.
    pub top_excess: usize,
    /// The same excess summed over rank-3 flats, each saturated alone by
    /// colon with its prime.
    pub flatwise_top_excess: usize,
    /// The linear forms used, one per rank-3 flat, then one overall.
    #[serde(skip)]
    pub forms: Vec<Vec<u32>>,
    #[serde(skip)]
    pub gb: Option<Groebner>,
}

impl Saturation {
    /// `J_k = (∂f)_k` at the top three degrees of the window. Fails when a
    /// rank-3 flat is an associated prime of `(∂f)`.
    pub fn agrees_at_top(&self) -> bool {
        let kmax = self.slices.len() as i64 - 1;
        self.k0 <= kmax - 2
    }
}

fn saturate_in_order(ideal: &Groebner, forms: &[Vec<u32>], order: &[usize]) -> Groebner {
    let mut g = ideal.clone();
    for &i in order {
        g = g.saturate_linear(&forms[i]);
    }
    g
}

/// `J` with a record of how it was obtained.
pub fn jacobian_saturation_with(a: &Arrangement, eng: &Koszul, kmax: i64, seed: u64) -> Result<Saturation, SaturationError> {
    a.require_essential()?;
    let n = a.n();
    let lat = intersection_lattice(a);
    let rank2: Vec<Vec<Vec<u32>>> = lat.flats_by_rank.get(2).map_or(vec![], |v| v.iter().map(rows_modp).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forms = Vec::new();
    for f in lat.flats_by_rank.get(3).into_iter().flatten() {
        forms.push(generic_form(&rows_modp(f), &rank2, n, &mut rng)?);
    }
    let all: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut avoid = rank2.clone();
    avoid.extend(lat.flats_by_rank.get(3).into_iter().flatten().map(rows_modp));
    forms.push(generic_form(&all, &avoid, n, &mut rng)?);

    let ideal = Groebner::ideal(n, &eng.jac.partials_p, None);
    let order: Vec<usize> = (0..forms.len()).collect();
    let j = saturate_in_order(&ideal, &forms, &order);
    // Reverse order, with a fresh set of forms for the flats.
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut forms2 = Vec::new();
    for f in lat.flats_by_rank.get(3).into_iter().flatten() {
        forms2.push(generic_form(&rows_modp(f), &rank2, n, &mut rng2)?);
    }
    forms2.push(generic_form(&all, &avoid, n, &mut rng2)?);
    let rev: Vec<usize> = (0..forms2.len()).rev().collect();
    let j2 = saturate_in_order(&ideal, &forms2, &rev);
    let order_independent = j.same_as(&j2);

    let slices: Vec<IdealSlice> = (0..=kmax).map(|k| ideal_slice(&j, k)).collect();
    let jacobian_dims: Vec<usize> = (0..=kmax).map(|k| if k < 0 { 0 } else { ideal.submodule_dim(k as usize) }).collect();
    let mut k0 = kmax + 1;
    while k0 > 0 && slices[(k0 - 1) as usize].dim == jacobian_dims[(k0 - 1) as usize] {
        k0 -= 1;
    }
    let is_ideal = check_ideal(&j, kmax);
    let top = kmax.max(0) as usize;
    let top_excess = slices[top].dim - jacobian_dims[top];
    let flatwise_top_excess = lat
        .flats_by_rank
        .get(3)
        .into_iter()
        .flatten()
        .map(|f| saturation_by_prime_dim(&ideal, &flat_prime(f), top as i64) - jacobian_dims[top])
        .sum();
    Ok(Saturation {
        slices,
        jacobian_dims,
        k0,
        order_independent,
        is_ideal,
        top_excess,
        flatwise_top_excess,
        forms,
        gb: Some(j),
    })
}

pub fn jacobian_saturation(a: &Arrangement, kmax: i64) -> Result<Saturation, SaturationError> {
    jacobian_saturation_with(a, &Koszul::new(a), kmax, 0)
}

/// `x_i · J_k ⊆ J_{k+1}` for `k < kmax`, by normal forms.
fn check_ideal(j: &Groebner, kmax: i64) -> bool {
    let n = j.n;
    for k in 0..kmax {
        let s = ideal_slice(j, k);
        let src = monomial_basis(n, k);
        let space = j.space((k + 1) as usize);
        for v in &s.basis {
            for i in 0..n {
                let mut w = vec![0u32; space.len()];
                for (c, m) in src.iter().enumerate() {
                    if v[c] != 0 {
                        let mut x = *m;
                        x[i] += 1;
                        w[mono_index(n, &x)] = v[c];
                    }
                }
                j.reduce_dense(&space, &mut w, None);
                if w.iter().any(|&x| x != 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// `J_k = 0` for `0 ≤ k ≤ d − 2`.
pub fn verify_saturation_vanishing_with(sat: &Saturation, d: usize) -> bool {
    sat.slices.iter().take(d.saturating_sub(1)).all(|s| s.dim == 0)
}

pub fn verify_saturation_vanishing(a: &Arrangement) -> Result<bool, SaturationError> {
    let sat = jacobian_saturation(a, a.d() as i64)?;
    Ok(verify_saturation_vanishing_with(&sat, a.d()))
}

/// `dim (R/J)_{k−n}`.
pub fn saturated_quotient_hilbert_with(sat: &Saturation, n: usize, k: i64) -> usize {
    let t = k - n as i64;
    if t < 0 {
        return 0;
    }
    count(n, t) - sat.slices[t as usize].dim
}

pub fn saturated_quotient_hilbert(a: &Arrangement, k: i64) -> Result<usize, SaturationError> {
    let sat = jacobian_saturation(a, (k - a.n() as i64).max(0))?;
    Ok(saturated_quotient_hilbert_with(&sat, a.n(), k))
}

/// `dim (I : P^∞)_k` by intersecting `I : ℓ^∞` over the generators of `P`.
pub fn saturation_by_prime_dim(i_gb: &Groebner, p_gens: &[PolyP], k: i64) -> usize {
    let n = i_gb.n;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for g in p_gens {
        let mut l = vec![0u32; n];
        for (m, c) in g {
            let i = m.iter().position(|&x| x == 1).unwrap();
            l[i] = *c;
        }
        let s = i_gb.saturate_linear(&l);
        let nf = s.normal_forms(k as usize);
        let q = nf.dim();
        for r in 0..q {
            rows.push((0..count(n, k)).map(|idx| nf.row(idx)[r]).collect());
        }
    }
    if rows.is_empty() {
        return count(n, k);
    }
    Mat::from_rows(count(n, k), &rows).kernel().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{builtin, parse_arrangement};
    use crate::graded::var;

    fn g5() -> Arrangement {
        parse_arrangement("1 1 1 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap()
    }

    #[test]
    fn principal_times_maximal() {
        let gens: Vec<PolyP> = (0..4).map(|i| vec![(mono_mul(&var(0), &var(i)), 1)]).collect();
        let i_gb = Groebner::ideal(4, &gens, None);
        let m: Vec<PolyP> = (0..4).map(|i| vec![(var(i), 1)]).collect();
        let s = colon_power_slice(&i_gb, &m, 1, 8).unwrap();
        assert_eq!(s.dim, 1);
        let mut x1 = vec![0; 4];
        x1[mono_index(4, &var(0))] = 1;
        assert!(modp::span_rank(4, s.basis.iter().cloned().chain([x1])) == 1);
        let unit = vec![vec![([0u8; 4], 1u32)]];
        assert_eq!(colon_power_slice(&i_gb, &unit, 2, 8).unwrap().dim, i_gb.submodule_dim(2));
    }

    #[test]
    fn boolean_is_saturated() {
        let a = builtin::boolean(4);
        let eng = Koszul::new(&a);
        let sat = jacobian_saturation_with(&a, &eng, 12, 0).unwrap();
        assert!(sat.order_independent && sat.is_ideal);
        assert_eq!(sat.k0, 0);
        assert_eq!((sat.slices[2].dim, sat.slices[3].dim), (0, 4));
        for k in 4..=16 {
            assert_eq!(saturated_quotient_hilbert_with(&sat, 4, k), eng.milnor(k));
        }
        let ideal = Groebner::ideal(4, &eng.jac.partials_p, None);
        let lat = intersection_lattice(&a);
        let p = flat_prime(&lat.flats_by_rank[3][0]);
        assert_eq!(colon_power_slice(&ideal, &p, 2, 12).unwrap().dim, 0);
    }

    #[test]
    fn colon_agrees_with_linear_saturation() {
        let a = g5();
        let eng = Koszul::new(&a);
        let ideal = Groebner::ideal(4, &eng.jac.partials_p, None);
        let lat = intersection_lattice(&a);
        for f in lat.flats_by_rank[3].iter().take(3) {
            let p = flat_prime(f);
            for k in 2..=5 {
                let s = colon_power_slice(&ideal, &p, k, 14).unwrap();
                assert_eq!(s.dim, saturation_by_prime_dim(&ideal, &p, k), "k={k}");
            }
        }
        let sat = jacobian_saturation_with(&a, &eng, 10, 1).unwrap();
        assert!(verify_saturation_vanishing_with(&sat, 5));
        assert!(sat.order_independent && sat.is_ideal && sat.agrees_at_top());
        for j in 0..=6 {
            assert_eq!(saturated_quotient_hilbert_with(&sat, 4, j), count(4, j - 4));
        }
    }
}
