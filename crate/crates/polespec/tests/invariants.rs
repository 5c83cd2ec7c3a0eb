use proptest::prelude::*;

use polespec::arrangement::{builtin, parse_arrangement, Arrangement};
use polespec::graded::{count, monomial_basis, Mono, MAX_VARS};
use polespec::groebner::Groebner;
use polespec::koszul::{koszul_h_dim, Koszul};
use polespec::linalg::modp::{self, Mat};
use polespec::resolution::sparse_rank;
use polespec::specseq::SpectralSequence;

fn small_arrangement() -> impl Strategy<Value = Arrangement> {
    (3usize..=4, 0usize..=2, any::<u64>()).prop_map(|(n, extra, seed)| builtin::generic(n, n + extra, seed).unwrap())
}

fn integer_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (3usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-3i64..=3, n), n..n + 3))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn text_round_trip(rows in integer_rows()) {
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = Arrangement::from_i64(rows[0].len(), &refs);
        prop_assume!(a.is_ok());
        let a = a.unwrap();
        prop_assert_eq!(parse_arrangement(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn koszul_strand_euler_characteristic(a in small_arrangement(), m in 0i64..6) {
        let eng = Koszul::new(&a);
        let (n, d) = (a.n(), a.d() as i64);
        let sign = |j: usize| if j % 2 == 0 { 1i64 } else { -1 };
        let h: i64 = (0..=n).map(|j| sign(j) * eng.h(j, m + j as i64 * d) as i64).sum();
        let omega: i64 = (0..=n).map(|j| sign(j) * eng.omega_dim(j, m + j as i64 * d) as i64).sum();
        prop_assert_eq!(h, omega);
    }

    #[test]
    fn engine_matches_rational_cohomology(a in small_arrangement(), j in 0usize..=4, m in 0i64..5) {
        prop_assume!(j <= a.n());
        let k = m + a.d() as i64 - 1;
        prop_assert_eq!(Koszul::new(&a).h(j, k), koszul_h_dim(&a, j, k));
    }

    #[test]
    fn euler_derivation_splits_off(a in small_arrangement(), k in -1i64..6) {
        let eng = Koszul::new(&a);
        prop_assert_eq!(eng.derlog_dim(k), eng.derlog0_dim(k) + count(a.n(), k));
    }

    #[test]
    fn pages_preserve_row_euler_characteristic(a in small_arrangement()) {
        let kmax = 2 * a.d() as i64;
        let mut ss = SpectralSequence::new(&a, kmax, 7);
        ss.run_to(2).unwrap();
        let n = a.n();
        for m in 0..=ss.top_degree(2) {
            let chi = |r: usize| -> i64 {
                (0..=n).map(|j| if j % 2 == 0 { ss.dim(r, j, m) as i64 } else { -(ss.dim(r, j, m) as i64) }).sum()
            };
            prop_assert_eq!(chi(1), chi(2));
        }
    }

    #[test]
    fn inverses(a in 1u32..modp::P) {
        prop_assert_eq!(modp::mul(a, modp::inv(a)), 1);
    }

    #[test]
    fn sparse_and_dense_rank_agree(rows in prop::collection::vec(prop::collection::vec(0u32..4, 7), 1..9)) {
        let dense = Mat::from_rows(7, &rows).rank();
        let sparse = sparse_rank(7, rows.iter().map(|r| {
            r.iter().enumerate().filter(|x| *x.1 != 0).map(|(i, &v)| (i, v)).collect::<Vec<_>>()
        }));
        prop_assert_eq!(dense, sparse);
    }

    #[test]
    fn monomial_quotient_counts_standard_monomials(
        gens in prop::collection::vec(prop::array::uniform4(0u8..3), 1..5),
        k in 0i64..7,
    ) {
        let polys: Vec<Vec<(Mono, u32)>> = gens.iter().map(|g| vec![(*g, 1)]).collect();
        prop_assume!(gens.iter().all(|g| g.iter().any(|&e| e > 0)));
        let gb = Groebner::ideal(MAX_VARS, &polys, None);
        let divides = |g: &Mono, m: &Mono| g.iter().zip(m).all(|(a, b)| a <= b);
        let standard = monomial_basis(MAX_VARS, k).iter().filter(|m| !gens.iter().any(|g| divides(g, m))).count();
        prop_assert_eq!(gb.quotient_dim(k as usize), standard);
    }
}
