mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use quadform::exact::linalg::{diagonalize_over_q_with_transform, rat_mul, rat_transpose, to_rational};
use quadform::exact::{det, is_positive_definite, saturate, smith_normal_form, GramMatrix};
use rand::Rng;

fn matrix_strategy(max_dim: usize, r: i64) -> impl Strategy<Value = Mat> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(move |(rows, cols)| prop::collection::vec(prop::collection::vec(-r..=r, cols), rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_form_matches_minor_gcds(m in matrix_strategy(4, 6)) {
        let x = int_matrix(&m);
        let snf = smith_normal_form(&x);
        let d = snf.diagonal();
        prop_assert_eq!(&(&snf.u * &x) * &snf.v, d);
        let divs = &snf.divisors;
        for w in divs.windows(2) {
            prop_assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        // d_1 ... d_k = gcd of the k x k minors
        let mut product = BigInt::from(1);
        for (k, dk) in divs.iter().enumerate() {
            product *= dk;
            prop_assert_eq!(product.clone(), BigInt::from(minor_gcd(&m, k + 1)));
        }
    }

    #[test]
    fn saturation_is_idempotent(m in matrix_strategy(4, 5)) {
        let x = int_matrix(&m);
        prop_assume!(m[0].len() <= m.len() && minor_gcd(&m, m[0].len()) != 0);
        let sat = saturate(&x).unwrap();
        prop_assert_eq!(saturate(&sat).unwrap(), sat.clone());
        // index of span(X) in its saturation is the gcd of maximal minors of X
        // divided by that of the saturation basis (which is 1)
        prop_assert_eq!(minor_gcd(&to_mat(&sat), sat.cols()), 1);
        let index: BigInt = smith_normal_form(&x).divisors.iter().product();
        prop_assert_eq!(index, BigInt::from(minor_gcd(&m, m[0].len()).abs()));
    }

    #[test]
    fn rational_diagonalization(seed in 0u64..100_000) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=5);
        let m = random_symmetric(&mut rng, n, -5, 5);
        prop_assume!(det_cofactor(&m) != 0);
        let (d, p) = diagonalize_over_q_with_transform(&gram(&m)).unwrap();
        let back = rat_mul(&rat_transpose(&p), &rat_mul(&to_rational(&int_matrix(&m)), &p));
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { d[i].clone() } else { Zero::zero() };
                prop_assert_eq!(&back[i][j], &expected);
            }
        }
    }
}

/// Every symmetric matrix with entries in [-3, 3] up to 3 x 3, and a large
/// random sample at 4 x 4.
#[test]
fn determinant_and_definiteness_oracles() {
    let check = |m: &Mat| {
        let g = gram(m);
        assert_eq!(det(&g), BigInt::from(det_cofactor(m)), "{m:?}");
        assert_eq!(is_positive_definite(&g), is_pd_oracle(m), "{m:?}");
    };
    for n in 1..=3usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
        let total = 7u64.pow(slots.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0; n]; n];
            let mut c = code;
            for &(i, j) in &slots {
                let v = (c % 7) as i64 - 3;
                c /= 7;
                m[i][j] = v;
                m[j][i] = v;
            }
            check(&m);
        }
    }
    let mut rng = rng(3);
    for _ in 0..20_000 {
        check(&random_symmetric(&mut rng, 4, -3, 3));
    }
}

#[test]
fn congruence_preserves_determinant_up_to_units() {
    let mut rng = rng(5);
    for _ in 0..200 {
        let s = random_pd(&mut rng, 3, -3, 3);
        let u = random_unimodular(&mut rng, 3, 3);
        let g = gram(&s).congruent(&int_matrix(&u));
        assert_eq!(det(&g), det(&gram(&s)));
        assert_eq!(g, GramMatrix::from_rows(&congruent(&s, &u)).unwrap());
    }
}
