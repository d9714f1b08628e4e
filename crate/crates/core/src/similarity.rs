//! Cosine and relational similarity over pair versions.

use serde::Serialize;

use crate::decomposition::ProjectedSpace;
use crate::error::{Error, Result};
use crate::pairspace::{PairVersions, WordPair};

/// `u·v / (‖u‖ ‖v‖)`, or 0 when either vector is zero. Clamped to `[-1, 1]`.
///
/// # Panics
///
/// If the lengths differ.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "cosine of vectors with different lengths");
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    (uv / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityResult {
    pub value: f64,
    /// Version combinations compared.
    pub cosines_considered: usize,
    /// Combinations whose cosine reached the original one.
    pub n_qualifying: usize,
    pub original_cosine: f64,
}

fn version_cosine(x: &WordPair, y: &WordPair, space: &ProjectedSpace) -> f64 {
    match (space.row(&x.a, &x.b), space.row(&y.a, &y.b)) {
        (Some(u), Some(v)) => cosine(u, v),
        _ => 0.0,
    }
}

/// Mean of the cosines between every version of `first` and every version
/// of `second` that are at least the cosine between the two originals.
/// Versions without a row compare as 0.
pub fn relational_similarity(first: &PairVersions, second: &PairVersions, space: &ProjectedSpace) -> Result<SimilarityResult> {
    for pv in [first, second] {
        let o = &pv.original;
        if !space.contains_pair(&o.a, &o.b) {
            return Err(Error::UnknownPair(o.to_string()));
        }
    }
    let original_cosine = version_cosine(&first.original, &second.original, space);
    let mut considered = 0;
    let mut qualifying = 0;
    let mut total = 0.0;
    for x in first.versions() {
        for y in second.versions() {
            let c = version_cosine(x, y, space);
            considered += 1;
            if c >= original_cosine {
                qualifying += 1;
                total += c;
            }
        }
    }
    Ok(SimilarityResult {
        value: (total / qualifying as f64).clamp(-1.0, 1.0),
        cosines_considered: considered,
        n_qualifying: qualifying,
        original_cosine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::RowMap;
    use crate::pairspace::{Alternate, Replaced};

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert_eq!(cosine(&[2.0, 0.0], &[1.0, 0.0]), 1.0);
        assert!((cosine(&[1.0, 0.0], &[1.0, 1.0]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }

    #[test]
    #[should_panic]
    fn cosine_rejects_mismatched_lengths() {
        cosine(&[1.0], &[1.0, 2.0]);
    }

    fn space() -> ProjectedSpace {
        let rows = [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c"), ("e", "d"), ("d", "e")];
        let rows = RowMap::from_rows(rows.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()).unwrap();
        let vectors = vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 0.2, 0.2, 1.0];
        ProjectedSpace::new(2, vectors, rows, vec![("z".into(), "y".into())]).unwrap()
    }

    fn pv(a: &str, b: &str, alts: &[(&str, &str)]) -> PairVersions {
        PairVersions {
            original: WordPair::new(a, b).unwrap(),
            alternates: alts
                .iter()
                .map(|(x, y)| Alternate {
                    pair: WordPair::new(x, y).unwrap(),
                    replaced: Replaced::A,
                    rank: 0,
                    frequency: 1,
                })
                .collect(),
        }
    }

    #[test]
    fn version_cosines_at_or_above_original_are_averaged() {
        let s = space();
        let r = relational_similarity(&pv("a", "b", &[]), &pv("c", "d", &[("e", "d")]), &s).unwrap();
        let orig = cosine(&[1.0, 0.0], &[1.0, 1.0]);
        let alt = cosine(&[1.0, 0.0], &[1.0, 0.2]);
        assert_eq!(r.original_cosine, orig);
        assert_eq!((r.cosines_considered, r.n_qualifying), (2, 2));
        assert!((r.value - (orig + alt) / 2.0).abs() < 1e-15);
        assert!(r.value >= r.original_cosine);
    }

    #[test]
    fn self_similarity_is_one_and_unknown_pairs_fail() {
        let s = space();
        let p = pv("a", "b", &[]);
        assert_eq!(relational_similarity(&p, &p, &s).unwrap().value, 1.0);
        let zero = relational_similarity(&pv("z", "y", &[]), &p, &s).unwrap();
        assert_eq!(zero.value, 0.0);
        let err = relational_similarity(&pv("q", "r", &[]), &p, &s).unwrap_err();
        assert!(matches!(err, Error::UnknownPair(_)));
    }
}
