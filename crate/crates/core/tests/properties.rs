//! Property suites: parser round trips, free-group laws, evaluation
//! homomorphisms, Smith-form invariants, cyclotomic field laws, and the
//! intersection-model agreements.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use ballquot::abelian::{
    abelian_invariants, class2_quotient_invariants, smith_normal_form, snf_invariants, IntMatrix,
    SparseIntMatrix,
};
use ballquot::eisenstein::{projective_equal, CycMat3, CycScalar};
use ballquot::matgroups::Mat5;
use ballquot::subgroups::tietze_simplify;
use ballquot::words::{
    evaluate_word, free_reduce, parse_presentation, print_presentation, Convention, GroupElement,
    Letter, Presentation, Word,
};

fn word_strategy(ngens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..ngens, any::<bool>()), 0..max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

proptest! {
    #[test]
    fn free_reduce_idempotent_and_shorter(raw in prop::collection::vec((0usize..4, any::<bool>()), 0..60)) {
        let letters: Vec<Letter> = raw.iter().map(|&(g, i)| Letter::new(g, i)).collect();
        let w = Word::from_letters(letters.clone());
        prop_assert!(w.len() <= letters.len());
        prop_assert_eq!(free_reduce(&w).clone(), w.clone());
        // inverse is an involution and cancels
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn concatenation_associative_on_reduced_forms(
        a in word_strategy(4, 24), b in word_strategy(4, 24), c in word_strategy(4, 24),
    ) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in word_strategy(4, 24), b in word_strategy(4, 24)) {
        // evaluate into unipotent integer matrices (the shipped generators)
        let d = ballquot::data::DataDir::shipped();
        let tau = d.int_matrices("tau_h.mat").unwrap();
        let assign: Vec<Mat5> = ["h1", "h2", "h3", "h4"].iter().map(|k| tau[*k]).collect();
        let id = Mat5::identity();
        let ev = |w: &Word| evaluate_word(w, &assign, &id, Convention::LeftToRight).unwrap();
        prop_assert_eq!(ev(&a.mul(&b)), ev(&a).mul(&ev(&b)));
        prop_assert_eq!(ev(&a.inverse()), ev(&a).inv());
        // and under the reversed convention
        let evr = |w: &Word| evaluate_word(w, &assign, &id, Convention::RightToLeft).unwrap();
        prop_assert_eq!(evr(&a.mul(&b)), evr(&b).mul(&evr(&a)));
    }

    #[test]
    fn word_printer_round_trip(w in word_strategy(4, 30)) {
        let gens: Vec<String> = ["h1", "h2", "h3", "h4"].iter().map(|s| s.to_string()).collect();
        let p = Presentation { generators: gens.clone(), relators: vec![w.clone()] };
        let text = print_presentation(&p);
        let back = parse_presentation(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn snf_divisibility_chain_and_reconstruction(
        entries in prop::collection::vec((0usize..8, 0usize..8, -9i64..=9), 0..24),
    ) {
        let mut m = IntMatrix::zero(8, 8);
        for (i, j, v) in entries {
            m[(i, j)] = BigInt::from(v);
        }
        let dec = smith_normal_form(&m);
        for k in 1..dec.diag.len() {
            prop_assert!((&dec.diag[k] % &dec.diag[k - 1]).is_zero());
        }
        prop_assert_eq!(dec.u.mul(&m).mul(&dec.v), dec.d);
        let mut sp = SparseIntMatrix::zero(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                let v = m[(i, j)].clone();
                if !v.is_zero() {
                    sp.set(i, j, v);
                }
            }
        }
        prop_assert_eq!(snf_invariants(&sp), dec.diag);
    }

    #[test]
    fn abelian_invariants_stable_under_reordering(
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let d = ballquot::data::DataDir::shipped();
        let p = d.presentation("gamma1.pres").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut relators = p.relators.clone();
        relators.shuffle(&mut rng);
        let shuffled = Presentation { generators: p.generators.clone(), relators };
        prop_assert_eq!(abelian_invariants(&p), abelian_invariants(&shuffled));
        let (ab1, c1) = class2_quotient_invariants(&p);
        let (ab2, c2) = class2_quotient_invariants(&shuffled);
        prop_assert_eq!(ab1, ab2);
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn cyclotomic_field_laws(
        a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in -6i64..=6,
    ) {
        let u = CycScalar::from_ints(a, b);
        let v = CycScalar::from_ints(c, d);
        // conjugation is a field automorphism
        prop_assert_eq!(u.mul(&v).conj(), u.conj().mul(&v.conj()));
        prop_assert_eq!(u.add(&v).conj(), u.conj().add(&v.conj()));
        prop_assert_eq!(u.conj().conj(), u.clone());
        // norm is multiplicative and nonnegative
        prop_assert_eq!(u.mul(&v).norm(), u.norm() * v.norm());
        prop_assert!(u.norm() >= num_rational::BigRational::zero());
        if !u.is_zero() {
            prop_assert_eq!(u.mul(&u.inv()), CycScalar::one());
        }
    }

    #[test]
    fn projective_equality_is_an_equivalence(
        k in 0u32..6, l in 0u32..6,
    ) {
        let d = ballquot::data::DataDir::shipped();
        let x = d.cyc_matrix("dm_x.mat").unwrap();
        let y = d.cyc_matrix("dm_y.mat").unwrap();
        let zeta = CycScalar::zeta();
        let m = x.mul(&y).scalar_mul(&zeta.pow(k));
        let n = x.mul(&y).scalar_mul(&zeta.pow(l));
        // reflexive, symmetric, and scalar-stable
        prop_assert!(projective_equal(&m, &m).is_some());
        prop_assert!(projective_equal(&m, &n).is_some());
        prop_assert!(projective_equal(&n, &m).is_some());
        let other = y.mul(&x);
        if projective_equal(&m, &other).is_some() {
            prop_assert!(projective_equal(&other, &m).is_some());
        }
    }

    #[test]
    fn divisor_pairing_symmetric_and_integral(coeffs in prop::collection::vec(-3i64..=3, 8)) {
        use ballquot::geometry::{DivisorClass, Slope};
        let n = 3u64;
        let mut a = DivisorClass::zero(n);
        let mut b = DivisorClass::zero(n);
        for (i, s) in [Slope::Zero, Slope::One, Slope::Zeta, Slope::Infinity].iter().enumerate() {
            a = a.add(&DivisorClass::sigma_t(n, *s).scale_int(coeffs[i]));
            b = b.add(&DivisorClass::sigma_t(n, *s).scale_int(coeffs[4 + i]));
        }
        a.exceptional[0] = num_rational::BigRational::from(BigInt::from(coeffs[0]));
        b.exceptional[1] = num_rational::BigRational::from(BigInt::from(coeffs[4]));
        prop_assert_eq!(a.dot(&b), b.dot(&a));
        prop_assert!(a.dot(&b).is_integer());
    }
}

#[test]
fn chern_model_agreement_to_n7() {
    for n in [3u64, 5, 7] {
        let r = ballquot::geometry::chern_numbers(n).unwrap();
        assert_eq!(r.c1_sq_closed, r.c1_sq_model, "n = {n}");
    }
}

#[test]
fn incidence_double_count() {
    for n in [1u64, 2, 3, 5] {
        let r = ballquot::geometry::incidence(n);
        // (points) x (slopes) = (classes) x (class size): 4 n^4 = 4n^2 * n^2
        assert_eq!(
            4 * r.points,
            r.classes_per_slope.iter().sum::<usize>() * (n as usize).pow(2)
        );
    }
}

#[test]
fn tietze_invariance_on_shipped_instances() {
    let d = ballquot::data::DataDir::shipped();
    for name in [
        "gamma1.pres",
        "heisenberg.pres",
        "3-4-6.pres",
        "dm_buv.pres",
    ] {
        let p = d.presentation(name).unwrap();
        let s = tietze_simplify(&p, 8);
        assert_eq!(abelian_invariants(&p), abelian_invariants(&s), "{name}");
    }
}

#[test]
fn closure_group_axioms() {
    // exhaustive at n = 3: products of all pairs stay inside; inverses inside
    let d = ballquot::data::DataDir::shipped();
    let tau = d.int_matrices("tau_h.mat").unwrap();
    let gens: Vec<_> = ["h1", "h2", "h3", "h4"]
        .iter()
        .map(|k| tau[*k].reduce_mod(3))
        .collect();
    let g3 =
        ballquot::group::FiniteGroup::close(&gens, &ballquot::matgroups::ModMat5::identity(3), 244)
            .unwrap();
    for a in &g3.elements {
        assert!(g3.contains(&a.inv()));
        for b in &g3.elements {
            assert!(g3.contains(&a.mul(b)));
        }
    }
    // sampled triples at n = 5: closure under products and associativity
    use rand::{Rng, SeedableRng};
    let gens5: Vec<_> = ["h1", "h2", "h3", "h4"]
        .iter()
        .map(|k| tau[*k].reduce_mod(5))
        .collect();
    let g5 = ballquot::group::FiniteGroup::close(
        &gens5,
        &ballquot::matgroups::ModMat5::identity(5),
        3126,
    )
    .unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let a = &g5.elements[rng.gen_range(0..g5.order())];
        let b = &g5.elements[rng.gen_range(0..g5.order())];
        let c = &g5.elements[rng.gen_range(0..g5.order())];
        assert!(g5.contains(&a.mul(b)));
        assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    }
}

#[test]
fn mutated_relator_fails() {
    // flipping one letter of a relator must break the representation check
    let d = ballquot::data::DataDir::shipped();
    let p = d.presentation("gamma1.pres").unwrap();
    let tau = d.int_matrices("tau_h.mat").unwrap();
    let assign: Vec<Mat5> = ["h1", "h2", "h3", "h4"].iter().map(|k| tau[*k]).collect();
    let mut relators = p.relators.clone();
    let first = relators[0].letters().to_vec();
    let mut flipped = first.clone();
    flipped[0] = flipped[0].inv();
    relators[0] = Word::from_letters(flipped);
    let mutated = Presentation {
        generators: p.generators.clone(),
        relators,
    };
    let checks = ballquot::matgroups::verify_relations(
        &assign,
        &Mat5::identity(),
        &mutated,
        &[Convention::LeftToRight],
    );
    assert!(!checks[0].pass);
    assert!(checks[1..].iter().all(|c| c.pass));
}

#[test]
fn gw_words_regeneration_matches_shipped_file() {
    let d = ballquot::data::DataDir::shipped();
    let ctx = ballquot::dm::DmContext::load(&d).unwrap();
    let gw = ballquot::dm::rewrite_gi_words(&ctx, Default::default()).unwrap();
    let (gens, shipped) = d.words("gw_words.words").unwrap();
    assert_eq!(gens, ctx.gamma1.generators);
    let regenerated = gw.named();
    assert_eq!(shipped.len(), regenerated.len());
    for ((n1, w1), (n2, w2)) in shipped.iter().zip(regenerated.iter()) {
        assert_eq!(n1, n2);
        assert_eq!(w1, w2, "word {n1} differs from the shipped data");
    }
}

#[test]
fn hermitian_transform_fixes_h0() {
    let h0 = CycMat3::h0();
    assert_eq!(
        ballquot::eisenstein::hermitian_transform(&CycMat3::identity(), &h0),
        h0
    );
}
