use meshrep::linalg::{Field, Matrix};
use proptest::prelude::*;

const Q: Field = Field::Rationals;

fn f5() -> Field {
    Field::prime(5).unwrap()
}

#[test]
fn rank_examples() {
    assert_eq!(Matrix::zeros(Q, 0, 0).rank(), 0);
    assert_eq!(Matrix::identity(Q, 3).rank(), 3);
    assert_eq!(Matrix::from_rows(Q, &[&[1, 2], &[2, 4]]).rank(), 1);
    assert_eq!(Matrix::from_rows(f5(), &[&[1, 2], &[3, 1]]).rank(), 1);
}

#[test]
fn kernel_examples() {
    assert_eq!(Matrix::identity(Q, 2).kernel_basis().cols(), 0);
    assert_eq!(Matrix::zeros(Q, 2, 2).kernel_basis().rank(), 2);
    let k = Matrix::from_rows(f5(), &[&[1, 1]]).kernel_basis();
    assert_eq!(k.cols(), 1);
    let (a, b) = (k.entry_i64(0, 0).unwrap(), k.entry_i64(1, 0).unwrap());
    assert_ne!(a, 0);
    assert_eq!((a + b).rem_euclid(5), 0);
}

#[test]
fn solve_examples() {
    let b = Matrix::from_rows(Q, &[&[3], &[-1]]);
    assert_eq!(Matrix::identity(Q, 2).solve(&b).unwrap(), Some(b.clone()));
    assert_eq!(Matrix::zeros(Q, 2, 2).solve(&b).unwrap(), None);
    let x = Matrix::from_rows(Q, &[&[2]]).solve(&Matrix::from_rows(Q, &[&[1]])).unwrap().unwrap();
    assert_eq!(x, Matrix::from_ratios(1, 1, &[(1, 2)]));
    assert!(Matrix::identity(Q, 2).solve(&Matrix::zeros(Q, 3, 1)).is_err());
}

#[test]
fn parse_fields() {
    assert_eq!(Field::parse("Q").unwrap(), Q);
    assert_eq!(Field::parse("F_5").unwrap(), f5());
    assert_eq!(Field::parse("GF(7)").unwrap(), Field::prime(7).unwrap());
    assert!(Field::parse("F_6").is_err());
    assert_eq!(Field::DEFAULT.to_string(), "F_32003");
}

#[test]
fn json_round_trip() {
    let m = Matrix::from_ratios(2, 2, &[(1, 2), (-3, 1), (0, 1), (7, 5)]);
    assert_eq!(Matrix::from_json(Q, &m.to_json()).unwrap(), m);
}

/// Rank over `F_p` by elimination from the last column backwards.
fn oracle_rank(rows: usize, cols: usize, entries: &[i64], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * cols + j].rem_euclid(p)).collect()).collect();
    let inv = |x: i64| {
        let (mut b, mut e, mut r) = (x, p - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in (0..cols).rev() {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * s % p;
                for j in 0..cols {
                    a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (0usize..=6, 0usize..=6).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-3i64..=3, r * c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_matches_backward_elimination((r, c, e) in small_matrix()) {
        // minors of 6x6 matrices with entries in [-3, 3] are far below this prime
        prop_assert_eq!(Matrix::from_i64(Q, r, c, &e).rank(), oracle_rank(r, c, &e, 1_000_000_007));
        prop_assert_eq!(Matrix::from_i64(f5(), r, c, &e).rank(), oracle_rank(r, c, &e, 5));
        prop_assert_eq!(Matrix::from_i64(Field::DEFAULT, r, c, &e).rank(), oracle_rank(r, c, &e, 32003));
    }

    #[test]
    fn rank_nullity((r, c, e) in small_matrix()) {
        for field in [Q, f5()] {
            let m = Matrix::from_i64(field, r, c, &e);
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.cols(), c);
            prop_assert!(m.mul(&k).is_zero());
            prop_assert_eq!(m.transpose().rank(), m.rank());
        }
    }

    #[test]
    fn solve_substitutes((r, c, e) in small_matrix(), x in prop::collection::vec(-2i64..=2, 6)) {
        for field in [Q, f5()] {
            let m = Matrix::from_i64(field, r, c, &e);
            let x0 = Matrix::from_i64(field, c, 1, &x[..c]);
            let b = m.mul(&x0);
            let sol = m.solve(&b).unwrap().expect("consistent system");
            prop_assert_eq!(m.mul(&sol), b);
        }
    }

    #[test]
    fn kron_indexing(a in prop::collection::vec(-3i64..=3, 4), b in prop::collection::vec(-3i64..=3, 6)) {
        let (ma, mb) = (Matrix::from_i64(Q, 2, 2, &a), Matrix::from_i64(Q, 2, 3, &b));
        let k = ma.kron(&mb);
        prop_assert_eq!((k.rows(), k.cols()), (4, 6));
        for i in 0..2 { for j in 0..2 { for p in 0..2 { for q in 0..3 {
            prop_assert_eq!(k.entry_i64(i * 2 + p, j * 3 + q).unwrap(), a[i * 2 + j] * b[p * 3 + q]);
        }}}}
    }
}
