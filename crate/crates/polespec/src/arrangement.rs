//! Central hyperplane arrangements: parsing, intersection lattice, matroid
//! decomposition, deletion, generic hyperplane sections and built-in families.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("line {line}: all coefficients are zero")]
    ZeroForm { line: usize },
    #[error("line {second}: form is proportional to the form on line {first}")]
    DuplicateForm { first: usize, second: usize },
    #[error("line {line}: cannot parse `{token}` as a rational number")]
    BadToken { line: usize, token: String },
    #[error("line {line}: expected {expected} coefficients, found {found}")]
    WrongLength { line: usize, expected: usize, found: usize },
    #[error("only 3 or 4 variables are supported, got {0}")]
    UnsupportedDimension(usize),
    #[error("arrangement has no hyperplanes")]
    Empty,
    #[error("index {index} out of range for {d} hyperplanes")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("deleting the only hyperplane leaves an empty arrangement")]
    EmptyResult,
    #[error("arrangement is not essential: normals span a space of rank {rank} < {n}")]
    NotEssential { rank: usize, n: usize },
    #[error("no generic section found after {0} attempts")]
    GenericityFailed(usize),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("bad builtin parameters: {0}")]
    BadParameters(String),
}

/// A linear form, normalized so that its first nonzero coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coefficients: Vec<Q>,
}

impl LinearForm {
    /// Normalizes `coefficients`; `None` if they are all zero.
    pub fn new(coefficients: Vec<Q>) -> Option<Self> {
        let lead = coefficients.iter().find(|c| !c.is_zero())?.clone();
        Some(LinearForm { coefficients: coefficients.into_iter().map(|c| c / &lead).collect() })
    }

    pub fn from_i64(c: &[i64]) -> Option<Self> {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.coefficients
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    /// The primitive integer multiple with positive leading coefficient.
    pub fn integer_coefficients(&self) -> Vec<BigInt> {
        let l = self.coefficients.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.coefficients.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        ints.into_iter().map(|x| x / &g).collect()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A central reduced arrangement in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    n: usize,
    forms: Vec<LinearForm>,
}

fn proportional(a: &LinearForm, b: &LinearForm) -> bool {
    a == b
}

impl Arrangement {
    /// Validates and builds an arrangement. Only the number of variables is
    /// checked against `{3, 4}` by [`Arrangement::check_supported`]; smaller
    /// ambient dimensions appear as product factors.
    pub fn new(n: usize, forms: Vec<LinearForm>) -> Result<Self, ArrangementError> {
        if forms.is_empty() {
            return Err(ArrangementError::Empty);
        }
        for (i, f) in forms.iter().enumerate() {
            if f.n() != n {
                return Err(ArrangementError::WrongLength { line: i + 1, expected: n, found: f.n() });
            }
            for (j, g) in forms[..i].iter().enumerate() {
                if proportional(f, g) {
                    return Err(ArrangementError::DuplicateForm { first: j + 1, second: i + 1 });
                }
            }
        }
        Ok(Arrangement { n, forms })
    }

    pub fn from_i64(n: usize, rows: &[&[i64]]) -> Result<Self, ArrangementError> {
        let mut forms = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ArrangementError::WrongLength { line: i + 1, expected: n, found: r.len() });
            }
            forms.push(LinearForm::from_i64(r).ok_or(ArrangementError::ZeroForm { line: i + 1 })?);
        }
        Arrangement::new(n, forms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn check_supported(&self) -> Result<(), ArrangementError> {
        if self.n == 3 || self.n == 4 {
            Ok(())
        } else {
            Err(ArrangementError::UnsupportedDimension(self.n))
        }
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<Q>> = self.forms.iter().map(|f| f.coefficients.clone()).collect();
        span_rref(&rows).len()
    }

    pub fn is_essential(&self) -> bool {
        self.rank() == self.n
    }

    pub fn require_essential(&self) -> Result<(), ArrangementError> {
        let rank = self.rank();
        if rank == self.n {
            Ok(())
        } else {
            Err(ArrangementError::NotEssential { rank, n: self.n })
        }
    }

    /// The arrangement with form `i` removed.
    pub fn delete(&self, i: usize) -> Result<Arrangement, ArrangementError> {
        if i >= self.d() {
            return Err(ArrangementError::IndexOutOfRange { index: i, d: self.d() });
        }
        if self.d() == 1 {
            return Err(ArrangementError::EmptyResult);
        }
        let mut forms = self.forms.clone();
        forms.remove(i);
        Arrangement::new(self.n, forms)
    }

    /// File representation: one form per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for f in &self.forms {
            s.push_str(&f.to_string());
            s.push('\n');
        }
        s
    }
}

/// Parses the arrangement text format: one form per line, whitespace
/// separated rationals (`p/q` or integers), `#` starts a comment.
pub fn parse_arrangement(text: &str) -> Result<Arrangement, ArrangementError> {
    let mut forms = Vec::new();
    let mut lines = Vec::new();
    let mut n = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut coeffs = Vec::new();
        for tok in body.split_whitespace() {
            let v: BigRational = parse_rational(tok)
                .ok_or_else(|| ArrangementError::BadToken { line, token: tok.to_string() })?;
            coeffs.push(v);
        }
        match n {
            None => n = Some(coeffs.len()),
            Some(expected) if expected != coeffs.len() => {
                return Err(ArrangementError::WrongLength { line, expected, found: coeffs.len() })
            }
            _ => {}
        }
        let form = LinearForm::new(coeffs).ok_or(ArrangementError::ZeroForm { line })?;
        if let Some(j) = forms.iter().position(|g| proportional(&form, g)) {
            return Err(ArrangementError::DuplicateForm { first: lines[j], second: line });
        }
        forms.push(form);
        lines.push(line);
    }
    let n = n.ok_or(ArrangementError::Empty)?;
    Arrangement::new(n, forms)
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (a, b),
        None => (tok, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Reduced row echelon basis of the span of `rows`.
pub fn span_rref(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for (b, &p) in basis.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { continue };
        let iv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &iv;
        }
        for b in basis.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for (x, y) in b.iter_mut().zip(&v) {
                    *x -= &f * y;
                }
            }
        }
        basis.push(v);
        pivots.push(p);
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    order.into_iter().map(|i| basis[i].clone()).collect()
}

fn in_span(rref: &[Vec<Q>], v: &[Q]) -> bool {
    let mut w = v.to_vec();
    for b in rref {
        let p = b.iter().position(|x| !x.is_zero()).unwrap();
        if !w[p].is_zero() {
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(b) {
                *x -= &f * y;
            }
        }
    }
    w.iter().all(|x| x.is_zero())
}

/// An element of the intersection lattice, described by its equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    pub rank: usize,
    /// Reduced row echelon basis of the span of the forms vanishing on the flat.
    pub basis_of_equations: Vec<Vec<Q>>,
    /// Indices of the forms vanishing on the flat.
    pub members: Vec<usize>,
}

impl Flat {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct LatticeInvariants {
    /// `flats_by_rank[r]` lists the flats of rank r, starting with the
    /// whole space at rank 0.
    pub flats_by_rank: Vec<Vec<Flat>>,
    /// Möbius values parallel to `flats_by_rank`.
    pub moebius: Vec<Vec<i64>>,
    pub poincare_coefficients: Vec<i64>,
    pub chi_u: i64,
    pub tjurina_section: i64,
}

impl LatticeInvariants {
    pub fn rank2_multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> =
            self.flats_by_rank.get(2).map_or(vec![], |fl| fl.iter().map(|f| f.multiplicity()).collect());
        m.sort_unstable();
        m
    }

    pub fn flat_count(&self, rank: usize) -> usize {
        self.flats_by_rank.get(rank).map_or(0, |v| v.len())
    }
}

/// Enumerates all flats, computes Möbius values, the Poincaré polynomial,
/// χ(U) and the Tjurina number of a generic plane section.
pub fn intersection_lattice(a: &Arrangement) -> LatticeInvariants {
    let n = a.n();
    let coeffs: Vec<Vec<Q>> = a.forms().iter().map(|f| f.coefficients().to_vec()).collect();
    let mut by_rank: Vec<Vec<Flat>> =
        vec![vec![Flat { rank: 0, basis_of_equations: vec![], members: vec![] }]];
    for r in 1..=n {
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next: Vec<Flat> = Vec::new();
        for flat in &by_rank[r - 1] {
            for (i, c) in coeffs.iter().enumerate() {
                if flat.members.contains(&i) {
                    continue;
                }
                let mut rows = flat.basis_of_equations.clone();
                rows.push(c.clone());
                let basis = span_rref(&rows);
                let members: Vec<usize> = (0..coeffs.len()).filter(|&k| in_span(&basis, &coeffs[k])).collect();
                if seen.contains_key(&members) {
                    continue;
                }
                seen.insert(members.clone(), next.len());
                next.push(Flat { rank: r, basis_of_equations: basis, members });
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|x, y| x.members.cmp(&y.members));
        by_rank.push(next);
    }
    // Möbius recursion from the bottom: μ(X) = -Σ_{Y<X} μ(Y).
    let mut moebius: Vec<Vec<i64>> = vec![vec![1]];
    for r in 1..by_rank.len() {
        let mut vals = Vec::with_capacity(by_rank[r].len());
        for x in &by_rank[r] {
            let mut s = 0i64;
            for (rr, flats) in by_rank[..r].iter().enumerate() {
                for (k, y) in flats.iter().enumerate() {
                    if y.members.iter().all(|m| x.members.contains(m)) {
                        s += moebius[rr][k];
                    }
                }
            }
            vals.push(-s);
        }
        moebius.push(vals);
    }
    let poincare: Vec<i64> = moebius.iter().map(|v| v.iter().map(|x| x.abs()).sum()).collect();
    let chi_u = eval_quotient_by_one_plus_t(&poincare, -1);
    let tjurina_section = by_rank
        .get(2)
        .map_or(0, |fl| fl.iter().map(|f| (f.multiplicity() as i64 - 1).pow(2)).sum());
    LatticeInvariants { flats_by_rank: by_rank, moebius, poincare_coefficients: poincare, chi_u, tjurina_section }
}

/// Evaluates `π(t)/(1+t)` at `t`. Panics if `1+t` does not divide `π`.
pub fn eval_quotient_by_one_plus_t(pi: &[i64], t: i64) -> i64 {
    // Synthetic division by (t + 1), from the top coefficient down.
    let deg = pi.len() - 1;
    let mut quot = vec![0i64; deg];
    let mut carry = 0i64;
    for k in (1..=deg).rev() {
        let c = pi[k] - carry;
        quot[k - 1] = c;
        carry = c;
    }
    assert_eq!(pi[0] - carry, 0, "Poincaré polynomial not divisible by 1+t");
    quot.iter().rev().fold(0i64, |acc, &c| acc * t + c)
}

/// Poincaré polynomial evaluated at `t`.
pub fn eval_poly(p: &[i64], t: i64) -> i64 {
    p.iter().rev().fold(0i64, |acc, &c| acc * t + c)
}

fn rank_of(rows: &[Vec<Q>]) -> usize {
    span_rref(rows).len()
}

/// Circuits of the linear matroid of normals, as sorted index lists.
pub fn circuits(a: &Arrangement) -> Vec<Vec<usize>> {
    let coeffs: Vec<Vec<Q>> = a.forms().iter().map(|f| f.coefficients().to_vec()).collect();
    let d = coeffs.len();
    let mut out = Vec::new();
    for size in 2..=(a.n() + 1).min(d) {
        for subset in combinations(d, size) {
            let rows: Vec<Vec<Q>> = subset.iter().map(|&i| coeffs[i].clone()).collect();
            if rank_of(&rows) != size - 1 {
                continue;
            }
            let minimal = (0..size).all(|skip| {
                let sub: Vec<Vec<Q>> =
                    rows.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, r)| r.clone()).collect();
                rank_of(&sub) == size - 1
            });
            if minimal {
                out.push(subset);
            }
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// One block of a product decomposition.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Indices of the forms of the original arrangement in this block.
    pub members: Vec<usize>,
    /// Basis of the span of the block's normals (rows, in original coordinates).
    pub variable_subspace: Vec<Vec<Q>>,
    /// The block's forms written in that basis.
    pub arrangement: Arrangement,
}

/// Splits the arrangement along the connected components of its matroid.
/// Returns `None` when there is a single component.
pub fn product_decomposition(a: &Arrangement) -> Result<Option<Vec<Factor>>, ArrangementError> {
    a.require_essential()?;
    let d = a.d();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for c in circuits(a) {
        for w in c.windows(2) {
            let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block: HashMap<usize, usize> = HashMap::new();
    for i in 0..d {
        let r = find(&mut parent, i);
        let b = *root_block.entry(r).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(i);
    }
    if blocks.len() == 1 {
        return Ok(None);
    }
    let mut factors = Vec::new();
    for members in blocks {
        let rows: Vec<Vec<Q>> = members.iter().map(|&i| a.forms()[i].coefficients().to_vec()).collect();
        let basis = span_rref(&rows);
        let pivots: Vec<usize> = basis.iter().map(|b| b.iter().position(|x| !x.is_zero()).unwrap()).collect();
        // In reduced echelon form the coordinates of v in the basis are its pivot entries.
        let forms = rows
            .iter()
            .map(|r| LinearForm::new(pivots.iter().map(|&p| r[p].clone()).collect()).unwrap())
            .collect();
        let arrangement = Arrangement::new(basis.len(), forms)?;
        factors.push(Factor { members, variable_subspace: basis, arrangement });
    }
    Ok(Some(factors))
}

/// Evidence that a hyperplane section is generic.
#[derive(Clone, Debug)]
pub struct SectionCertificate {
    pub hyperplane: Vec<Q>,
    pub attempts: usize,
    pub pairwise_distinct: bool,
    pub essential: bool,
    pub multiplicities_match: bool,
}

impl SectionCertificate {
    pub fn ok(&self) -> bool {
        self.pairwise_distinct && self.essential && self.multiplicities_match
    }
}

/// Restricts the forms to the hyperplane `c·x = 0` (last coefficient must be
/// nonzero) and checks the genericity conditions. The result is `Err` only
/// when the restriction collapses two forms or a form to zero.
pub fn restrict_to_hyperplane(
    a: &Arrangement,
    c: &[Q],
) -> (Option<Arrangement>, SectionCertificate) {
    let n = a.n();
    let last = c[n - 1].clone();
    assert!(!last.is_zero());
    // Basis of the hyperplane: e_i - (c_i / c_n) e_n for i < n.
    let restricted: Vec<Vec<Q>> = a
        .forms()
        .iter()
        .map(|f| {
            let l = f.coefficients();
            (0..n - 1).map(|i| &l[i] - &l[n - 1] * &c[i] / &last).collect()
        })
        .collect();
    let mut cert = SectionCertificate {
        hyperplane: c.to_vec(),
        attempts: 1,
        pairwise_distinct: false,
        essential: false,
        multiplicities_match: false,
    };
    let mut forms = Vec::new();
    for r in &restricted {
        match LinearForm::new(r.clone()) {
            Some(f) => forms.push(f),
            None => return (None, cert),
        }
    }
    let section = match Arrangement::new(n - 1, forms) {
        Ok(s) => s,
        Err(_) => return (None, cert),
    };
    cert.pairwise_distinct = true;
    cert.essential = section.is_essential();
    let lat_a = intersection_lattice(a);
    let lat_s = intersection_lattice(&section);
    cert.multiplicities_match = lat_a.rank2_multiplicities() == lat_s.rank2_multiplicities();
    (Some(section), cert)
}

pub const SECTION_RETRIES: usize = 50;

/// Generic hyperplane section of an essential arrangement in 4 variables.
pub fn generic_section(
    a: &Arrangement,
    seed: u64,
) -> Result<(Arrangement, SectionCertificate), ArrangementError> {
    a.require_essential()?;
    if a.n() != 4 {
        return Err(ArrangementError::UnsupportedDimension(a.n()));
    }
    let bound = 10 * (a.d() as i64).pow(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=SECTION_RETRIES {
        let mut c: Vec<Q> = (0..a.n()).map(|_| q(rng.gen_range(-bound..=bound))).collect();
        if c[a.n() - 1].is_zero() {
            c[a.n() - 1] = q(1);
        }
        let (section, mut cert) = restrict_to_hyperplane(a, &c);
        cert.attempts = attempt;
        if let Some(s) = section {
            if cert.ok() {
                return Ok((s, cert));
            }
        }
    }
    Err(ArrangementError::GenericityFailed(SECTION_RETRIES))
}

/// Built-in arrangement families.
pub mod builtin {
    use super::*;

    pub fn boolean(n: usize) -> Arrangement {
        let rows: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(n, &refs).unwrap()
    }

    /// `d` forms in `n` variables with any `n` of them independent. The
    /// coordinate forms come first, followed by `1 1 .. 1` when `d > n`; the
    /// remaining forms have random integer coefficients drawn from the seed.
    pub fn generic(n: usize, d: usize, seed: u64) -> Result<Arrangement, ArrangementError> {
        if d < n {
            return Err(ArrangementError::BadParameters(format!("generic needs d >= n, got d={d}, n={n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        if d > n {
            rows.push(vec![1; n]);
        }
        let bound = 3 + d as i64;
        let mut tries = 0;
        while rows.len() < d {
            tries += 1;
            if tries > 10_000 {
                return Err(ArrangementError::GenericityFailed(tries));
            }
            let cand: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
            let mut trial = rows.clone();
            trial.push(cand);
            if all_subsets_independent(&trial, n) {
                rows = trial;
            }
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(n, &refs)
    }

    fn all_subsets_independent(rows: &[Vec<i64>], n: usize) -> bool {
        let last = rows.len() - 1;
        let k = n.min(rows.len());
        combinations(last, k - 1).into_iter().all(|mut s| {
            s.push(last);
            let sub: Vec<Vec<Q>> = s.iter().map(|&i| rows[i].iter().map(|&x| q(x)).collect()).collect();
            rank_of(&sub) == k
        })
    }

    /// `d` lines in the plane: `d-1` through one point plus one general line.
    pub fn nearpencil(d: usize) -> Result<Arrangement, ArrangementError> {
        if d < 3 {
            return Err(ArrangementError::BadParameters("nearpencil needs d >= 3".into()));
        }
        let mut rows: Vec<Vec<i64>> = vec![vec![1, 0, 0], vec![0, 1, 0]];
        for i in 1..(d as i64 - 2) {
            rows.push(vec![1, i, 0]);
        }
        rows.push(vec![0, 0, 1]);
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(3, &refs)
    }

    /// The braid arrangement `x_i - x_j` modulo the diagonal, padded to four
    /// variables with one extra general form when the quotient has rank 3.
    pub fn braid_essentialized(m: usize) -> Result<Arrangement, ArrangementError> {
        if !(4..=5).contains(&m) {
            return Err(ArrangementError::BadParameters(format!(
                "braid-essentialized supports m = 4 or 5, got {m}"
            )));
        }
        // Coordinates y_k = x_k - x_m for k < m.
        let vars = m - 1;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let mut r = vec![0i64; 4];
                if i < vars {
                    r[i] += 1;
                }
                if j < vars {
                    r[j] -= 1;
                }
                rows.push(r);
            }
        }
        if vars == 3 {
            rows.push(vec![1, 2, 5, 1]);
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(4, &refs)
    }

    /// Product of blocks, each `r:k` meaning `k` generic forms in `r` fresh
    /// variables; block variables are consecutive.
    pub fn product(spec: &str) -> Result<Arrangement, ArrangementError> {
        let mut blocks = Vec::new();
        for part in spec.split(',') {
            let (r, k) = part
                .split_once(':')
                .ok_or_else(|| ArrangementError::BadParameters(format!("block `{part}` is not r:k")))?;
            let r: usize = r.trim().parse().map_err(|_| ArrangementError::BadParameters(part.into()))?;
            let k: usize = k.trim().parse().map_err(|_| ArrangementError::BadParameters(part.into()))?;
            blocks.push((r, k));
        }
        let n: usize = blocks.iter().map(|b| b.0).sum();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut offset = 0;
        for (bi, &(r, k)) in blocks.iter().enumerate() {
            let block = generic(r, k, bi as u64 + 1)?;
            for f in block.forms() {
                let mut row = vec![0i64; n];
                for (t, c) in f.integer_coefficients().iter().enumerate() {
                    row[offset + t] = i64::try_from(c).unwrap();
                }
                rows.push(row);
            }
            offset += r;
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(n, &refs)
    }

    /// Parses `name` or `name(params)` / `name:params`.
    pub fn by_name(spec: &str, seed: u64) -> Result<Arrangement, ArrangementError> {
        let spec = spec.trim();
        let (name, params) = match spec.find(['(', ':']) {
            Some(i) => (&spec[..i], spec[i + 1..].trim_end_matches(')')),
            None => (spec, ""),
        };
        let nums = |s: &str| -> Result<Vec<usize>, ArrangementError> {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().map_err(|_| ArrangementError::BadParameters(s.into())))
                .collect()
        };
        match name {
            "boolean" => {
                let p = nums(params)?;
                Ok(boolean(*p.first().unwrap_or(&4)))
            }
            "boolean4" => Ok(boolean(4)),
            "generic5" => generic(4, 5, seed),
            "generic" => {
                let p = nums(params)?;
                match p.as_slice() {
                    [n, d] => generic(*n, *d, seed),
                    [n, d, s] => generic(*n, *d, *s as u64),
                    _ => Err(ArrangementError::BadParameters("generic(n,d[,seed])".into())),
                }
            }
            "nearpencil" => {
                let p = nums(params)?;
                nearpencil(*p.first().unwrap_or(&5))
            }
            "braid-essentialized" | "braid" => {
                let p = nums(params)?;
                braid_essentialized(*p.first().unwrap_or(&4))
            }
            "product" => product(params),
            _ => Err(ArrangementError::UnknownBuiltin(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b4() -> Arrangement {
        parse_arrangement("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap()
    }

    fn g5() -> Arrangement {
        parse_arrangement("1 1 1 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1").unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = b4();
        assert_eq!((a.n(), a.d()), (4, 4));
        assert_eq!(
            parse_arrangement("1 0 0 0\n2 0 0 0"),
            Err(ArrangementError::DuplicateForm { first: 1, second: 2 })
        );
        assert_eq!(g5().d(), 5);
        assert_eq!(parse_arrangement("0 0 0"), Err(ArrangementError::ZeroForm { line: 1 }));
        assert!(matches!(parse_arrangement("1 x 0"), Err(ArrangementError::BadToken { .. })));
        let c = parse_arrangement("# comment\n2/3 1 0 # tail\n0 0 1\n").unwrap();
        assert_eq!(c.forms()[0].coefficients()[1], Q::new(3.into(), 2.into()));
    }

    #[test]
    fn essential_examples() {
        assert!(b4().is_essential());
        assert!(g5().is_essential());
        let a = Arrangement::from_i64(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[1, 1, 0, 0]]).unwrap();
        assert!(!a.is_essential());
    }

    #[test]
    fn lattice_b4() {
        let l = intersection_lattice(&b4());
        assert_eq!(l.flat_count(2), 6);
        assert!(l.flats_by_rank[2].iter().all(|f| f.multiplicity() == 2));
        assert_eq!(l.flat_count(3), 4);
        assert!(l.flats_by_rank[3].iter().all(|f| f.multiplicity() == 3));
        assert_eq!(l.tjurina_section, 6);
        assert_eq!(l.chi_u, 0);
    }

    #[test]
    fn lattice_g5() {
        let l = intersection_lattice(&g5());
        assert_eq!(l.flat_count(2), 10);
        assert_eq!(l.flat_count(3), 10);
        assert_eq!(l.poincare_coefficients, vec![1, 5, 10, 10, 4]);
        assert_eq!(l.chi_u, -1);
        assert_eq!(l.tjurina_section, 10);
    }

    #[test]
    fn single_hyperplane() {
        let a = Arrangement::from_i64(4, &[&[1, 0, 0, 0]]).unwrap();
        let l = intersection_lattice(&a);
        assert_eq!(l.flat_count(2), 0);
        assert_eq!(l.tjurina_section, 0);
    }

    #[test]
    fn deletion() {
        let d = b4().delete(3).unwrap();
        assert_eq!(d.d(), 3);
        assert!(!d.is_essential());
        assert_eq!(g5().delete(0).unwrap(), b4());
        let one = Arrangement::from_i64(4, &[&[1, 0, 0, 0]]).unwrap();
        assert_eq!(one.delete(0), Err(ArrangementError::EmptyResult));
        assert!(matches!(b4().delete(9), Err(ArrangementError::IndexOutOfRange { .. })));
    }

    #[test]
    fn decomposition() {
        let f = product_decomposition(&b4()).unwrap().unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|x| x.arrangement.n() == 1 && x.arrangement.d() == 1));
        assert!(product_decomposition(&g5()).unwrap().is_none());
        let p = Arrangement::from_i64(
            4,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 1, 1]],
        )
        .unwrap();
        let f = product_decomposition(&p).unwrap().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].members, vec![0, 1, 2]);
        assert_eq!(f[1].members, vec![3, 4, 5]);
        assert!(f.iter().all(|x| x.arrangement.n() == 2 && x.arrangement.d() == 3));
    }

    #[test]
    fn sections() {
        let (s, c) = generic_section(&b4(), 7).unwrap();
        assert!(c.ok());
        assert_eq!((s.n(), s.d()), (3, 4));
        assert_eq!(intersection_lattice(&s).flat_count(2), 6);
        let (s, _) = generic_section(&g5(), 7).unwrap();
        let l = intersection_lattice(&s);
        assert_eq!(l.flat_count(2), 10);
        assert_eq!(l.tjurina_section, 10);
        // A hyperplane containing the x1-axis (a rank-3 flat) merges three lines.
        let (s, cert) = restrict_to_hyperplane(&b4(), &[q(0), q(1), q(2), q(3)]);
        assert!(s.is_some() && !cert.ok());
    }

    #[test]
    fn builtins() {
        assert_eq!(builtin::boolean(4), b4());
        let g = builtin::generic(4, 6, 1).unwrap();
        assert_eq!(g.d(), 6);
        for s in combinations(6, 4) {
            let rows: Vec<Vec<Q>> = s.iter().map(|&i| g.forms()[i].coefficients().to_vec()).collect();
            assert_eq!(span_rref(&rows).len(), 4);
        }
        let b = builtin::braid_essentialized(4).unwrap();
        assert_eq!((b.n(), b.d()), (4, 7));
        assert!(b.is_essential());
        let np = builtin::nearpencil(5).unwrap();
        assert_eq!((np.n(), np.d()), (3, 5));
        let l = intersection_lattice(&np);
        assert_eq!(l.rank2_multiplicities(), vec![2, 2, 2, 2, 4]);
        let p = builtin::product("2:3,2:3").unwrap();
        assert_eq!(product_decomposition(&p).unwrap().unwrap().len(), 2);
        assert!(matches!(builtin::by_name("nope", 0), Err(ArrangementError::UnknownBuiltin(_))));
    }

    #[test]
    fn moebius_sums_vanish() {
        for a in [b4(), g5(), builtin::nearpencil(5).unwrap()] {
            let l = intersection_lattice(&a);
            let total: i64 = l.moebius.iter().flatten().sum();
            assert_eq!(total, 0);
            assert_eq!(eval_poly(&l.poincare_coefficients, -1), 0);
        }
    }
}
