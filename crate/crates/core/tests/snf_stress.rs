use ballquot::abelian::{smith_normal_form, snf_invariants, IntMatrix, SparseIntMatrix};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};

#[test]
fn snf_random_100() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for trial in 0..100 {
        let rows = rng.gen_range(3..=20);
        let cols = rng.gen_range(3..=20);
        let mut m = IntMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.25) {
                    m[(i, j)] = BigInt::from(rng.gen_range(-9i64..=9));
                }
            }
        }
        eprintln!("trial {trial} {rows}x{cols} dense...");
        let t0 = std::time::Instant::now();
        let dec = smith_normal_form(&m);
        let dense_t = t0.elapsed();
        let t0 = std::time::Instant::now();
        let mut sp = SparseIntMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = m[(i, j)].clone();
                if !v.is_zero() {
                    sp.set(i, j, v);
                }
            }
        }
        eprintln!("trial {trial} sparse...");
        let inv = snf_invariants(&sp);
        let sparse_t = t0.elapsed();
        assert_eq!(inv, dec.diag, "trial {trial}");
        if dense_t.as_millis() > 200 || sparse_t.as_millis() > 200 {
            println!("trial {trial}: {rows}x{cols} dense {dense_t:?} sparse {sparse_t:?}");
        }
    }
}
