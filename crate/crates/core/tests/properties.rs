use std::collections::HashSet;

use nalgebra::DMatrix;
use proptest::prelude::*;

use lra::corpus::{stem, PhraseQuery};
use lra::decomposition::{project, truncated_svd, ProjectedSpace, SvdOptions};
use lra::evaluation::{choose, macro_f, nearest_neighbors, score_sat, Answer, Confusion};
use lra::matrix::{build_matrix, entropy_weights, RowMap};
use lra::pairspace::{Alternate, Replaced};
use lra::patterns::{expand_patterns, mine_top_patterns, Direction, Phrase, PhraseTable};
use lra::sparse::CsrMatrix;
use lra::vsm::{vsm_vector, JoiningTerms};
use lra::{cosine, relational_similarity, Corpus, LraConfig, PairVersions, WordPair};

fn sparse_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = CsrMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => Just(0.0), 1 => 0.1f64..5.0], r * c)
            .prop_map(move |data| CsrMatrix::from_dense(r, c, &data))
    })
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["alpha", "beta", "gamma", "delta", "omega", "kappa"]).prop_map(String::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stemming_is_deterministic(w in "[a-z]{1,12}") {
        prop_assert_eq!(stem(&w), stem(&w));
        prop_assert!(stem(&w).len() <= w.len());
    }

    #[test]
    fn every_match_is_within_bounds(text in prop::collection::vec(word(), 1..60), min in 0usize..3, extra in 0usize..2) {
        let corpus = Corpus::from_texts([("d", text.join(" "))]).unwrap();
        let max = min + extra;
        let matches = corpus.find_phrases(&PhraseQuery { left: "alpha", right: "beta", min_inter: min, max_inter: max });
        let mut last = None;
        for m in &matches {
            prop_assert!((min..=max).contains(&m.intervening.len()));
            prop_assert_eq!(corpus.token(m.doc_id, m.start_pos), "alpha");
            prop_assert_eq!(corpus.token(m.doc_id, m.start_pos + m.intervening.len() + 1), "beta");
            let key = (m.doc_id, m.start_pos, m.intervening.len());
            prop_assert!(last < Some(key));
            last = Some(key);
        }
    }

    #[test]
    fn patterns_number_two_to_the_m(tokens in prop::collection::vec(word(), 1..=5)) {
        let patterns = expand_patterns(&tokens, 5).unwrap();
        prop_assert_eq!(patterns.len(), 1 << tokens.len());
        let distinct: HashSet<_> = patterns.iter().collect();
        prop_assert_eq!(distinct.len(), patterns.len());
        prop_assert!(patterns.iter().all(|p| p.matches(&tokens)));
    }

    #[test]
    fn matrix_is_invariant_under_row_and_direction_swap(
        lists in prop::collection::vec(prop::collection::vec((any::<bool>(), prop::collection::vec(word(), 1..=3)), 0..6), 1..5)
    ) {
        let versions: Vec<PairVersions> = (0..lists.len())
            .map(|i| PairVersions { original: WordPair::new(&format!("a{i}"), &format!("b{i}")).unwrap(), alternates: vec![] })
            .collect();
        let phrases = PhraseTable::new(
            versions.iter().map(|v| v.original.key()).collect(),
            lists.iter().map(|l| l.iter().map(|(fwd, words)| Phrase {
                direction: if *fwd { Direction::Forward } else { Direction::Reverse },
                intervening: words.clone(),
            }).collect()).collect(),
        );
        let patterns = mine_top_patterns(&phrases, 3, 50).unwrap();
        let m = build_matrix(&versions, &phrases, &patterns).unwrap();
        prop_assert_eq!(m.num_cols(), 2 * patterns.len());
        prop_assert_eq!(m.num_rows() + 2 * m.zero_rows.len(), m.rows_before_drops);
        for r in 0..m.num_rows() {
            let partner = m.rows.partner(r).unwrap();
            for c in 0..m.num_cols() {
                prop_assert_eq!(m.cells.get(r, c), m.cells.get(partner, c ^ 1));
                prop_assert!(m.cells.get(r, c) >= 0.0 && m.cells.get(r, c).fract() == 0.0);
            }
        }
    }

    #[test]
    fn entropy_weights_lie_in_unit_interval(a in sparse_matrix(8, 6)) {
        let w = entropy_weights(&a);
        prop_assert_eq!(w.len(), a.cols());
        prop_assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
        let transformed = a.map_values(|_, c, f| (f + 1.0).ln() * w[c]);
        for (r, c, v) in transformed.triplets() {
            prop_assert!(v > 0.0 && a.get(r, c) > 0.0);
        }
        for (r, c, _) in a.triplets() {
            prop_assert_eq!(transformed.get(r, c) > 0.0, w[c] > 0.0);
        }
    }

    #[test]
    fn svd_factors_are_orthonormal_and_sorted(a in sparse_matrix(20, 20), k in 1usize..8) {
        prop_assume!(a.nnz() > 0);
        let svd = truncated_svd(&a, k, &SvdOptions::default()).unwrap();
        prop_assert!(svd.k <= k.min(a.rows()).min(a.cols()));
        prop_assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.singular_values.iter().all(|&s| s > 0.0));
        let eye = DMatrix::<f64>::identity(svd.k, svd.k);
        prop_assert!((svd.u.transpose() * &svd.u - &eye).amax() < 1e-8);
        prop_assert!((svd.v.transpose() * &svd.v - &eye).amax() < 1e-8);
        for i in 0..svd.k {
            let col = svd.u.column(i);
            let lead = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            prop_assert!(lead > 0.0);
        }
    }

    #[test]
    fn full_rank_reconstruction_recovers_the_input(a in sparse_matrix(12, 12)) {
        prop_assume!(a.nnz() > 0);
        let svd = truncated_svd(&a, a.rows().min(a.cols()), &SvdOptions::default()).unwrap();
        let x = DMatrix::from_row_slice(a.rows(), a.cols(), &a.to_dense());
        prop_assert!((&x - svd.reconstruct()).norm() <= 1e-8 * x.norm());
    }

    #[test]
    fn projection_preserves_reconstruction_cosines(a in sparse_matrix(15, 15), k in 1usize..6) {
        prop_assume!(a.nnz() > 0);
        let svd = truncated_svd(&a, k, &SvdOptions::default()).unwrap();
        let rows = RowMap::from_rows((0..a.rows()).map(|r| (format!("r{r}"), "x".to_string())).collect()).unwrap();
        let space = project(&svd, rows, vec![]).unwrap();
        let recon = svd.reconstruct();
        for i in 0..a.rows() {
            for j in 0..a.rows() {
                let (ri, rj): (Vec<f64>, Vec<f64>) = (recon.row(i).iter().copied().collect(), recon.row(j).iter().copied().collect());
                if ri.iter().all(|&x| x == 0.0) || rj.iter().all(|&x| x == 0.0) {
                    continue;
                }
                prop_assert!((cosine(space.vector(i), space.vector(j)) - cosine(&ri, &rj)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(u in prop::collection::vec(-5.0f64..5.0, 1..10), seed in prop::collection::vec(-5.0f64..5.0, 10)) {
        let v = &seed[..u.len()];
        let c = cosine(&u, v);
        prop_assert_eq!(c, cosine(v, &u));
        prop_assert!((-1.0..=1.0).contains(&c));
    }

    #[test]
    fn relational_similarity_is_symmetric_and_above_original(values in prop::collection::vec(-2.0f64..2.0, 24)) {
        let names = ["a", "b", "c", "d", "e", "f"];
        let mut rows = Vec::new();
        for pair in names.chunks(2) {
            rows.push((pair[0].to_string(), pair[1].to_string()));
            rows.push((pair[1].to_string(), pair[0].to_string()));
        }
        let rows = RowMap::from_rows(rows).unwrap();
        let space = ProjectedSpace::new(4, values, rows, vec![]).unwrap();
        let alt = |a: &str, b: &str| Alternate { pair: WordPair::new(a, b).unwrap(), replaced: Replaced::A, rank: 0, frequency: 1 };
        let p = PairVersions { original: WordPair::new("a", "b").unwrap(), alternates: vec![alt("e", "f")] };
        let q = PairVersions { original: WordPair::new("c", "d").unwrap(), alternates: vec![alt("f", "e")] };
        let pq = relational_similarity(&p, &q, &space).unwrap();
        let qp = relational_similarity(&q, &p, &space).unwrap();
        prop_assert!((pq.value - qp.value).abs() <= 1e-12);
        prop_assert!(pq.value >= pq.original_cosine);
        prop_assert!((-1.0..=1.0).contains(&pq.value));
        prop_assert!(pq.n_qualifying >= 1 && pq.cosines_considered == 4);
    }

    #[test]
    fn answer_ignores_monotone_rescaling(s in prop::collection::vec(0.01f64..1.0, 5), scale in 0.1f64..10.0) {
        let rescaled: Vec<f64> = s.iter().map(|x| scale * x.powi(3) + 0.5).collect();
        prop_assert_eq!(choose(&s), choose(&rescaled));
        prop_assert!(matches!(choose(&s), Answer::Answered(_)));
    }

    #[test]
    fn sat_score_is_bounded_and_monotone(total in 1usize..400, a in 0usize..400, b in 0usize..400) {
        let correct = a % (total + 1);
        let skipped = b % (total - correct + 1);
        let s = score_sat(correct, skipped, total);
        prop_assert!((0.0..=1.0).contains(&s));
        if correct < total && skipped + correct < total {
            prop_assert!(score_sat(correct + 1, skipped, total) > s);
        }
    }

    #[test]
    fn loocv_never_chooses_self(values in prop::collection::vec(0.0f64..1.0, 2..12)) {
        let n = values.len();
        let neighbors = nearest_neighbors(n, |i, j| Ok(if i == j { 100.0 } else { values[i] * values[j] })).unwrap();
        prop_assert!(neighbors.iter().enumerate().all(|(i, &j)| i != j && j < n));
    }

    #[test]
    fn macro_f_lies_between_class_extremes(labels in prop::collection::vec((0u8..4, 0u8..4), 1..40)) {
        let actual: Vec<String> = labels.iter().map(|(a, _)| a.to_string()).collect();
        let predicted: Vec<String> = labels.iter().map(|(_, p)| p.to_string()).collect();
        let m = macro_f(&Confusion::from_labels(&actual, &predicted));
        let fs: Vec<f64> = m.per_class.iter().map(|c| c.f).collect();
        let lo = fs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m.f >= lo - 1e-15 && m.f <= hi + 1e-15);
    }

    #[test]
    fn vsm_elements_are_nonnegative_and_monotone(text in prop::collection::vec(word(), 1..40)) {
        let terms = JoiningTerms::parse("beta\ngamma delta\nomega", "t").unwrap();
        let pair = WordPair::new("alpha", "kappa").unwrap();
        let joined = text.join(" ");
        let before = vsm_vector(&pair, &Corpus::from_texts([("d", joined.clone())]).unwrap(), &terms);
        let after = vsm_vector(&pair, &Corpus::from_texts([("d", format!("{joined} alpha beta kappa"))]).unwrap(), &terms);
        prop_assert_eq!(before.len(), 2 * terms.len());
        prop_assert!(before.iter().all(|&x| x >= 0.0));
        prop_assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
    }

    #[test]
    fn corpus_bytes_roundtrip(text in prop::collection::vec(word(), 1..30)) {
        let corpus = Corpus::from_texts([("d", text.join(" "))]).unwrap();
        prop_assert_eq!(Corpus::from_bytes(&corpus.to_bytes()).unwrap(), corpus);
    }

    #[test]
    fn config_text_roundtrips(num_sim in 1usize..20, num_filter in 1usize..6, k in 1usize..500) {
        let c = LraConfig { num_sim, num_filter, k, ..LraConfig::default() };
        prop_assert_eq!(LraConfig::parse(&c.to_string(), "t").unwrap(), c);
    }
}
