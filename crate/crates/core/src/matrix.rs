//! The pair × pattern frequency matrix and its log-entropy weighting.
//!
//! Each distinct pair version `a:b` owns two adjacent rows, `a:b` then
//! `b:a`. Each pattern owns two adjacent columns: `word1 P word2` then
//! `word2 P word1`, where word1 and word2 are the row's first and second
//! member. Swapping a row for its partner and every column for its partner
//! maps the matrix onto itself.

use std::collections::HashMap;

use rayon::prelude::*;
use crate::error::{Error, Result};
use crate::pairspace::PairVersions;
use crate::patterns::{distinct_versions, expand_patterns, DirectedPair, Direction, Pattern, PatternTable, PhraseTable};
use crate::sparse::CsrMatrix;

/// Dense row numbering of directed pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowMap {
    pairs: Vec<DirectedPair>,
    index: HashMap<DirectedPair, usize>,
}

impl RowMap {
    /// Rows `2i` and `2i + 1` are version `i` in its own and reversed order.
    pub fn from_versions(pair_versions: &[PairVersions]) -> RowMap {
        Self::from_unordered(&distinct_versions(pair_versions))
    }

    /// Both orders of every listed version.
    pub fn from_unordered(versions: &[DirectedPair]) -> RowMap {
        let pairs = versions
            .iter()
            .flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())])
            .collect();
        Self::from_rows(pairs).expect("distinct versions give distinct rows")
    }

    /// Takes rows exactly as listed; duplicates are rejected.
    pub fn from_rows(pairs: Vec<DirectedPair>) -> Result<RowMap> {
        let mut index = HashMap::with_capacity(pairs.len());
        for (i, p) in pairs.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::Contract(format!("row {}:{} listed twice", p.0, p.1)));
            }
        }
        Ok(RowMap { pairs, index })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, row: usize) -> &DirectedPair {
        &self.pairs[row]
    }

    pub fn pairs(&self) -> &[DirectedPair] {
        &self.pairs
    }

    pub fn row(&self, a: &str, b: &str) -> Option<usize> {
        self.index.get(&(a.to_string(), b.to_string())).copied()
    }

    /// The row holding the same pair in the other order.
    pub fn partner(&self, row: usize) -> Option<usize> {
        let (a, b) = &self.pairs[row];
        self.row(b, a)
    }
}

/// Column `2j` is pattern `j` read `word1 P word2`; column `2j + 1` is
/// `word2 P word1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMap {
    patterns: Vec<Pattern>,
}

impl ColumnMap {
    pub fn new(table: &PatternTable) -> ColumnMap {
        ColumnMap {
            patterns: table.patterns.clone(),
        }
    }

    pub fn len(&self) -> usize {
        2 * self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn column(&self, pattern: usize, direction: Direction) -> usize {
        2 * pattern + usize::from(direction == Direction::Reverse)
    }

    pub fn describe(&self, col: usize) -> (&Pattern, Direction) {
        let dir = if col.is_multiple_of(2) {
            Direction::Forward
        } else {
            Direction::Reverse
        };
        (&self.patterns[col / 2], dir)
    }

    /// `word1 P word2` or `word2 P word1` with the pattern written out.
    pub fn label(&self, col: usize) -> String {
        match self.describe(col) {
            (p, Direction::Forward) => format!("word1 {p} word2"),
            (p, Direction::Reverse) => format!("word2 {p} word1"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairPatternMatrix {
    pub rows: RowMap,
    pub columns: ColumnMap,
    pub cells: CsrMatrix,
    /// Versions whose two rows were all zero and so were left out.
    pub zero_rows: Vec<DirectedPair>,
    pub rows_before_drops: usize,
}

impl PairPatternMatrix {
    pub fn num_rows(&self) -> usize {
        self.cells.rows()
    }

    pub fn num_cols(&self) -> usize {
        self.cells.cols()
    }

    pub fn get(&self, a: &str, b: &str, pattern: usize, direction: Direction) -> f64 {
        self.rows
            .row(a, b)
            .map_or(0.0, |r| self.cells.get(r, self.columns.column(pattern, direction)))
    }

    /// Same rows and columns with new cell values.
    pub fn with_cells(&self, cells: CsrMatrix) -> PairPatternMatrix {
        assert_eq!((cells.rows(), cells.cols()), (self.num_rows(), self.num_cols()));
        PairPatternMatrix {
            cells,
            ..self.clone()
        }
    }

    /// `row col value` lines with a `# row` legend naming each row's pair
    /// and a `# col` legend naming each column's pattern.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for (i, (a, b)) in self.rows.pairs().iter().enumerate() {
            out.push_str(&format!("# row {i} {a}:{b}\n"));
        }
        for j in 0..self.columns.len() {
            out.push_str(&format!("# col {j} {}\n", self.columns.label(j)));
        }
        out.push_str(&self.cells.to_coordinate_text());
        out
    }
}

/// Counts phrase occurrences per directed pair and directed pattern. Both
/// rows of a version with no counted phrase are dropped and listed in
/// `zero_rows`.
pub fn build_matrix(pair_versions: &[PairVersions], phrases: &PhraseTable, patterns: &PatternTable) -> Result<PairPatternMatrix> {
    let versions = distinct_versions(pair_versions);
    let rows_before_drops = 2 * versions.len();
    let columns = ColumnMap::new(patterns);
    let index = patterns.index();
    let max_len = patterns.patterns.iter().map(Pattern::len).max().unwrap_or(0);

    let counted: Vec<HashMap<usize, f64>> = versions
        .par_iter()
        .map(|version| {
            let mut forward_row: HashMap<usize, f64> = HashMap::new();
            for phrase in phrases.get(version).unwrap_or(&[]) {
                if phrase.intervening.is_empty() || phrase.intervening.len() > max_len {
                    continue;
                }
                for p in expand_patterns(&phrase.intervening, max_len)? {
                    if let Some(&j) = index.get(&p) {
                        *forward_row.entry(columns.column(j, phrase.direction)).or_insert(0.0) += 1.0;
                    }
                }
            }
            Ok(forward_row)
        })
        .collect::<Result<_>>()?;

    let mut kept = Vec::new();
    let mut zero_rows = Vec::new();
    let mut triplets = Vec::new();
    for (version, row) in versions.iter().zip(&counted) {
        if row.is_empty() {
            zero_rows.push(version.clone());
            continue;
        }
        let ab = 2 * kept.len();
        for (&col, &count) in row {
            triplets.push((ab, col, count));
            triplets.push((ab + 1, col ^ 1, count));
        }
        kept.push(version.clone());
    }
    let cells = CsrMatrix::from_triplets(2 * kept.len(), columns.len(), triplets)?;
    Ok(PairPatternMatrix {
        rows: RowMap::from_unordered(&kept),
        columns,
        cells,
        zero_rows,
        rows_before_drops,
    })
}

/// Column weights `1 + Σ p ln p / ln n` over each column's distribution,
/// clamped to `[0, 1]`. Empty columns, and every column when there is at
/// most one row, get weight 0 and 1 respectively.
pub fn entropy_weights(cells: &CsrMatrix) -> Vec<f64> {
    let n = cells.rows();
    let mut sums = vec![0.0; cells.cols()];
    for (_, c, v) in cells.triplets() {
        sums[c] += v;
    }
    let mut plogp = vec![0.0; cells.cols()];
    for (_, c, v) in cells.triplets() {
        let p = v / sums[c];
        if p > 0.0 {
            plogp[c] += p * p.ln();
        }
    }
    (0..cells.cols())
        .into_par_iter()
        .map(|c| {
            if sums[c] == 0.0 {
                0.0
            } else if n <= 1 {
                1.0
            } else {
                (1.0 + plogp[c] / (n as f64).ln()).clamp(0.0, 1.0)
            }
        })
        .collect()
}

/// `f → ln(f + 1) · w_j` with `w_j` from [`entropy_weights`]. Cells in
/// columns of weight zero vanish.
pub fn log_entropy_transform(matrix: &PairPatternMatrix) -> PairPatternMatrix {
    let weights = entropy_weights(&matrix.cells);
    matrix.with_cells(matrix.cells.map_values(|_, c, f| (f + 1.0).ln() * weights[c]))
}
