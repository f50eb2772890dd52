use std::cmp::Ordering;

use fractal_sft::exactnum::{char_poly, rat, rint, FieldElement, NumberField, Poly, RatMatrix};
use fractal_sft::markov::{scc_decompose, AdjacencyMatrix};
use fractal_sft::open_map::{binary_word, hole_partition, parry_measure, parse_binary, survivor_dimension, Hole, OpenMapError};
use fractal_sft::oracle::count_sft_words;
use fractal_sft::words::Word;
use num_traits::Zero;
use proptest::prelude::*;

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 0..max)
}

fn word() -> impl Strategy<Value = Word> {
    (bits(6), prop::collection::vec(0u8..=1, 1..5)).prop_map(|(p, v)| Word::new(p, v))
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-9i64..=9, 1..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn word_display_roundtrip(w in word()) {
        prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn word_compare_matches_long_prefix(a in word(), b in word()) {
        let n = 64;
        prop_assert_eq!(a.lex_cmp(&b), a.prefix(n).cmp(&b.prefix(n)));
    }

    #[test]
    fn word_shift_and_reflect(w in word(), j in 0usize..10, k in 0usize..10) {
        prop_assert_eq!(w.shift(j).shift(k), w.shift(j + k));
        prop_assert_eq!(w.reflect().reflect(), w.clone());
        prop_assert_eq!(w.shift(j).digit(k), w.digit(j + k));
    }

    #[test]
    fn reflection_reverses_order(a in word(), b in word()) {
        prop_assert_eq!(a.reflect().lex_cmp(&b.reflect()), b.lex_cmp(&a));
    }

    #[test]
    fn binary_words_roundtrip(p in 0i64..500, q in 1i64..500) {
        prop_assume!(p < q);
        let x = rat(p, q);
        let w = binary_word(&x).unwrap();
        prop_assert!(!w.period.iter().all(|&d| d == 1));
        prop_assert_eq!(parse_binary(&w.to_string()).unwrap(), x);
    }

    #[test]
    fn poly_division(a in small_poly(6), b in small_poly(3)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn sturm_counts_distinct_roots(mut roots in prop::collection::vec(-6i64..=6, 1..5)) {
        let mut p = Poly::one();
        for r in &roots {
            p = &p * &Poly::from_ints(&[-r, 1]);
        }
        roots.sort();
        roots.dedup();
        prop_assert_eq!(p.squarefree_part().count_real_roots(), roots.len());
    }

    #[test]
    fn cayley_hamilton(entries in prop::collection::vec(-3i64..=3, 9)) {
        let m: RatMatrix = entries.chunks(3).map(|r| r.iter().map(|&x| rint(x)).collect()).collect();
        let p = char_poly(&m).unwrap();
        // p(M) by Horner
        let n = 3;
        let mut acc: RatMatrix = vec![vec![rint(0); n]; n];
        for c in p.coeffs().iter().rev() {
            let mut next = vec![vec![rint(0); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = rint(0);
                    for k in 0..n {
                        s += &acc[i][k] * &m[k][j];
                    }
                    next[i][j] = s;
                }
                next[i][i] += c;
            }
            acc = next;
        }
        prop_assert!(acc.iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn field_sign_is_exact(a in -50i64..50, b in -50i64..50) {
        // a + b√2 in Q(√2) against the integer comparison a² vs 2b²
        let f = NumberField::new(&Poly::from_ints(&[-2, 0, 1]), (&rint(1), &rint(2))).unwrap();
        let x = FieldElement::from_coeffs(&f, vec![rint(a), rint(b)]);
        let expect = match (a.signum(), b.signum()) {
            (0, 0) => 0,
            (sa, sb) if sa >= 0 && sb >= 0 => 1,
            (sa, sb) if sa <= 0 && sb <= 0 => -1,
            (sa, _) => match (a * a).cmp(&(2 * b * b)) {
                Ordering::Greater => sa as i8,
                _ => -(sa as i8),
            },
        };
        prop_assert_eq!(x.sign().unwrap(), expect);
    }

    #[test]
    fn parry_on_random_irreducible(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 5), 5)) {
        let text: Vec<String> = rows.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect();
        let refs: Vec<&str> = text.iter().map(String::as_str).collect();
        let s = AdjacencyMatrix::from_rows(&refs);
        prop_assume!(scc_decompose(&s).strongly_connected && s.edge_count() > 0);
        let c = parry_measure(&s).unwrap();
        for row in &c.transition {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        for j in 0..5 {
            let pj: f64 = (0..5).map(|i| c.stationary[i] * c.transition[i][j]).sum();
            prop_assert!((pj - c.stationary[j]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// A larger hole never has a larger survivor set.
    #[test]
    fn survivor_dimension_monotone(a in 1i64..30, w in 1i64..6, extra in 1i64..4) {
        let q = 31;
        prop_assume!(a + w + extra < q);
        let dim = |lo: i64, hi: i64| -> Option<f64> {
            let h = hole_partition(&Hole::new(rat(lo, q), rat(hi, q)).ok()?).ok()?;
            assert!(h.check_cover_exactness());
            match survivor_dimension(&h) {
                Ok(r) => Some(r.dimension),
                Err(OpenMapError::EmptySurvivor) => Some(0.0),
                Err(_) => None,
            }
        };
        if let (Some(small), Some(big)) = (dim(a, a + w), dim(a, a + w + extra)) {
            prop_assert!(big <= small + 1e-12, "dim J[{a},{}) = {small} < dim J[{a},{}) = {big}", a + w, a + w + extra);
            prop_assert!((0.0..=1.0).contains(&small));
        }
    }
}

#[test]
fn sft_word_counts_match_fibonacci() {
    let e = count_sft_words(&AdjacencyMatrix::from_rows(&["11", "10"]), 40, 2.0).unwrap();
    let (mut a, mut b) = (1u64, 2u64);
    for (n, c) in &e.counts {
        assert_eq!(c.parse::<u64>().unwrap(), b, "length {n}");
        (a, b) = (b, a + b);
    }
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((e.dimension - golden.log2()).abs() < 1e-3);
}
