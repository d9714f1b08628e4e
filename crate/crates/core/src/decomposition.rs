//! Truncated SVD by Golub–Kahan–Lanczos bidiagonalization and the projected
//! row space `U_k Σ_k`.
//!
//! The Lanczos bases are fully reorthogonalized (classical Gram–Schmidt,
//! applied twice), so the recurrence stays accurate without selective
//! schemes. The small bidiagonal problem is handed to a dense SVD.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::RowMap;
use crate::patterns::DirectedPair;
use crate::sparse::CsrMatrix;

const START_SEED: u64 = 0x4c52_4153_5644;

#[derive(Debug, Clone, PartialEq)]
pub struct SvdOptions {
    /// A triplet is accepted once its residual is at most `tolerance · σ₁`.
    pub tolerance: f64,
    /// Cap on Lanczos steps; `None` lets the process run to the full
    /// dimension.
    pub max_steps: Option<usize>,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            tolerance: 1e-10,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// rows × k, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Non-increasing, all positive.
    pub singular_values: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub v: DMatrix<f64>,
    pub k: usize,
    /// Lanczos steps taken.
    pub steps: usize,
}

impl SvdResult {
    /// `U_k Σ_k V_kᵀ`
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (i, s) in self.singular_values.iter().enumerate() {
            us.column_mut(i).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

struct Basis {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl Basis {
    fn new(dim: usize) -> Basis {
        Basis { dim, vectors: Vec::new() }
    }

    /// Removes the components along the basis, twice.
    fn orthogonalize(&self, w: &mut [f64]) {
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.vectors.iter().map(|q| dot(q, w)).collect();
            for (q, c) in self.vectors.iter().zip(coeffs) {
                axpy(-c, q, w);
            }
        }
    }

    /// A unit vector orthogonal to the basis, drawn from `rng`.
    fn fresh(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let mut w: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            self.orthogonalize(&mut w);
            let n = norm(&w);
            if n > 1e-8 {
                w.iter_mut().for_each(|x| *x /= n);
                return w;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn transpose(a: &CsrMatrix) -> CsrMatrix {
    let t = a.triplets().map(|(r, c, v)| (c, r, v)).collect();
    CsrMatrix::from_triplets(a.cols(), a.rows(), t).expect("in bounds")
}

/// Keeps the nonzero rows and columns, returning them with the compacted
/// matrix.
fn compact(a: &CsrMatrix) -> (CsrMatrix, Vec<usize>, Vec<usize>) {
    let rows: Vec<usize> = (0..a.rows()).filter(|&r| a.row_nnz(r) > 0).collect();
    let mut col_used = vec![false; a.cols()];
    for (_, c, _) in a.triplets() {
        col_used[c] = true;
    }
    let cols: Vec<usize> = (0..a.cols()).filter(|&c| col_used[c]).collect();
    let mut col_pos = vec![usize::MAX; a.cols()];
    for (i, &c) in cols.iter().enumerate() {
        col_pos[c] = i;
    }
    let triplets = rows
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| a.row(r).map(move |(c, v)| (i, c, v)).collect::<Vec<_>>())
        .map(|(i, c, v)| (i, col_pos[c], v))
        .collect();
    let m = CsrMatrix::from_triplets(rows.len(), cols.len(), triplets).expect("in bounds");
    (m, rows, cols)
}

/// The `k` largest singular triplets of `a`. `k` is clamped to the
/// numerical rank, so the result may hold fewer triplets.
pub fn truncated_svd(a: &CsrMatrix, k: usize, options: &SvdOptions) -> Result<SvdResult> {
    if k < 1 {
        return Err(Error::Contract("k must be at least 1".into()));
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Contract("cannot decompose an empty matrix".into()));
    }
    let (dense_part, row_ids, col_ids) = compact(a);
    if dense_part.nnz() == 0 {
        return Ok(SvdResult {
            u: DMatrix::zeros(a.rows(), 0),
            singular_values: vec![],
            v: DMatrix::zeros(a.cols(), 0),
            k: 0,
            steps: 0,
        });
    }
    let tall = dense_part.rows() >= dense_part.cols();
    let work = if tall { dense_part } else { transpose(&dense_part) };
    let (lu, sigma, lv, steps) = lanczos(&work, k.min(work.cols()), options)?;
    let (small_u, small_v) = if tall { (lu, lv) } else { (lv, lu) };

    let kept = sigma.len();
    let mut u = DMatrix::zeros(a.rows(), kept);
    let mut v = DMatrix::zeros(a.cols(), kept);
    for i in 0..kept {
        for (local, &r) in row_ids.iter().enumerate() {
            u[(r, i)] = small_u[(local, i)];
        }
        for (local, &c) in col_ids.iter().enumerate() {
            v[(c, i)] = small_v[(local, i)];
        }
        let lead = (0..a.rows()).fold(0, |best, r| if u[(r, i)].abs() > u[(best, i)].abs() { r } else { best });
        if u[(lead, i)] < 0.0 {
            u.column_mut(i).neg_mut();
            v.column_mut(i).neg_mut();
        }
    }
    Ok(SvdResult {
        u,
        singular_values: sigma,
        v,
        k: kept,
        steps,
    })
}

/// Left vectors, singular values, right vectors and the step count.
type Triplets = (DMatrix<f64>, Vec<f64>, DMatrix<f64>, usize);

/// Lanczos on a matrix with at least as many rows as columns and no zero
/// rows or columns.
fn lanczos(a: &CsrMatrix, k: usize, options: &SvdOptions) -> Result<Triplets> {
    let (m, n) = (a.rows(), a.cols());
    let breakdown = 1e-14 * a.frobenius_norm();
    let min_steps = n.min(2 * k + 10);
    let stride = (k / 4).max(1);
    let limit = options.max_steps.unwrap_or(n).min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut left = Basis::new(m);
    let mut right = Basis::new(n);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let v1 = right.fresh(&mut rng);
    let mut p = vec![0.0; m];
    a.mul_vec(&v1, &mut p);
    right.vectors.push(v1);
    push_left(&mut left, &mut alpha, p, breakdown, &mut rng);

    let mut last_check = 0;
    let mut achieved = f64::INFINITY;
    loop {
        let j = alpha.len();
        if j == n {
            break;
        }
        let mut r = vec![0.0; n];
        a.mul_vec_transposed(&left.vectors[j - 1], &mut r);
        axpy(-alpha[j - 1], &right.vectors[j - 1], &mut r);
        right.orthogonalize(&mut r);
        let b = norm(&r);
        let restarted = b <= breakdown;

        if !restarted && j >= min_steps.min(limit) && (j - last_check >= stride || j == limit) {
            last_check = j;
            let (x, s, _) = bidiagonal_svd(&alpha, &beta);
            let top = k.min(j);
            let thresh = s[0] * (m.max(n) as f64) * f64::EPSILON;
            let full_rank = s[..top].iter().all(|&v| v > thresh);
            achieved = (0..top).map(|i| (b * x[(j - 1, i)]).abs()).fold(0.0, f64::max) / s[0];
            if full_rank && achieved <= options.tolerance {
                break;
            }
        }
        if j >= limit {
            return Err(Error::NoConvergence {
                steps: j,
                achieved,
                wanted: options.tolerance,
            });
        }

        let (b, v_next) = if restarted {
            (0.0, right.fresh(&mut rng))
        } else {
            (b, r.iter().map(|x| x / b).collect())
        };
        let mut p = vec![0.0; m];
        a.mul_vec(&v_next, &mut p);
        axpy(-b, &left.vectors[j - 1], &mut p);
        beta.push(b);
        right.vectors.push(v_next);
        push_left(&mut left, &mut alpha, p, breakdown, &mut rng);
    }

    let j = alpha.len();
    let (x, s, y) = bidiagonal_svd(&alpha, &beta[..j - 1]);
    let thresh = s[0] * (m.max(n) as f64) * f64::EPSILON;
    let kept = s.iter().take(k).take_while(|&&v| v > thresh).count();
    let u_basis = DMatrix::from_fn(m, j, |r, c| left.vectors[c][r]);
    let v_basis = DMatrix::from_fn(n, j, |r, c| right.vectors[c][r]);
    let u = u_basis * x.columns(0, kept);
    let v = v_basis * y.columns(0, kept);
    Ok((u, s[..kept].to_vec(), v, j))
}

fn push_left(left: &mut Basis, alpha: &mut Vec<f64>, mut p: Vec<f64>, breakdown: f64, rng: &mut ChaCha8Rng) {
    left.orthogonalize(&mut p);
    let a = norm(&p);
    if a <= breakdown {
        alpha.push(0.0);
        left.vectors.push(left.fresh(rng));
    } else {
        p.iter_mut().for_each(|x| *x /= a);
        alpha.push(a);
        left.vectors.push(p);
    }
}

/// SVD of the upper bidiagonal matrix with diagonal `alpha` and
/// superdiagonal `beta`, sorted by decreasing singular value.
fn bidiagonal_svd(alpha: &[f64], beta: &[f64]) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let j = alpha.len();
    let b = DMatrix::from_fn(j, j, |r, c| {
        if r == c {
            alpha[r]
        } else if c == r + 1 && r < beta.len() {
            beta[r]
        } else {
            0.0
        }
    });
    let svd = b.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]).then(x.cmp(&y)));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let x = DMatrix::from_fn(j, j, |r, c| u[(r, order[c])]);
    let y = DMatrix::from_fn(j, j, |r, c| vt[(order[c], r)]);
    (x, s, y)
}

const PROJECTION_MAGIC: &[u8; 7] = b"LRAPRJ1";
const PROJECTION_VERSION: u32 = 1;

/// Row vectors `U_k Σ_k`, one per matrix row, plus the versions whose rows
/// were all zero and never entered the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSpace {
    k: usize,
    vectors: Vec<f64>,
    row_map: RowMap,
    zero_rows: Vec<DirectedPair>,
}

impl ProjectedSpace {
    pub fn new(k: usize, vectors: Vec<f64>, row_map: RowMap, zero_rows: Vec<DirectedPair>) -> Result<Self> {
        if vectors.len() != k * row_map.len() {
            return Err(Error::Contract(format!(
                "{} values do not fill {} rows of width {k}",
                vectors.len(),
                row_map.len()
            )));
        }
        Ok(ProjectedSpace {
            k,
            vectors,
            row_map,
            zero_rows,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.row_map.len()
    }

    pub fn row_map(&self) -> &RowMap {
        &self.row_map
    }

    pub fn zero_rows(&self) -> &[DirectedPair] {
        &self.zero_rows
    }

    pub fn vector(&self, row: usize) -> &[f64] {
        &self.vectors[row * self.k..(row + 1) * self.k]
    }

    /// The projected row of `a:b`, if that row entered the matrix.
    pub fn row(&self, a: &str, b: &str) -> Option<&[f64]> {
        self.row_map.row(a, b).map(|r| self.vector(r))
    }

    /// Whether `a:b` took part in the run, as a row or as a dropped
    /// all-zero version.
    pub fn contains_pair(&self, a: &str, b: &str) -> bool {
        self.row_map.row(a, b).is_some()
            || self.zero_rows.iter().any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(PROJECTION_MAGIC);
        put_u32(&mut out, PROJECTION_VERSION as usize);
        put_u32(&mut out, self.k);
        put_u32(&mut out, self.rows());
        for (a, b) in self.row_map.pairs() {
            put_str(&mut out, a);
            put_str(&mut out, b);
        }
        for v in &self.vectors {
            out.write_f64::<LittleEndian>(*v).unwrap();
        }
        put_u32(&mut out, self.zero_rows.len());
        for (a, b) in &self.zero_rows {
            put_str(&mut out, a);
            put_str(&mut out, b);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.starts_with(PROJECTION_MAGIC) {
            return Err(damaged("missing LRAPRJ1 header"));
        }
        let mut cur = Cursor::new(&bytes[PROJECTION_MAGIC.len()..]);
        let version = get_u32(&mut cur)?;
        if version != PROJECTION_VERSION as usize {
            return Err(damaged(&format!("unsupported version {version}")));
        }
        let k = get_u32(&mut cur)?;
        let rows = get_u32(&mut cur)?;
        let mut pairs = Vec::with_capacity(rows);
        for _ in 0..rows {
            pairs.push((get_str(&mut cur)?, get_str(&mut cur)?));
        }
        let mut vectors = Vec::with_capacity(rows * k);
        for _ in 0..rows * k {
            vectors.push(cur.read_f64::<LittleEndian>().map_err(|_| damaged("truncated"))?);
        }
        let zeros = get_u32(&mut cur)?;
        let mut zero_rows = Vec::with_capacity(zeros);
        for _ in 0..zeros {
            zero_rows.push((get_str(&mut cur)?, get_str(&mut cur)?));
        }
        if (cur.position() as usize) != cur.get_ref().len() {
            return Err(damaged("trailing bytes"));
        }
        ProjectedSpace::new(k, vectors, RowMap::from_rows(pairs)?, zero_rows)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

/// Rows of `U_k Σ_k` for the matrix rows in `row_map`.
pub fn project(svd: &SvdResult, row_map: RowMap, zero_rows: Vec<DirectedPair>) -> Result<ProjectedSpace> {
    if svd.u.nrows() != row_map.len() {
        return Err(Error::Contract(format!(
            "{} decomposed rows but {} mapped rows",
            svd.u.nrows(),
            row_map.len()
        )));
    }
    let k = svd.k;
    let mut vectors = Vec::with_capacity(row_map.len() * k);
    for r in 0..svd.u.nrows() {
        for (i, s) in svd.singular_values.iter().enumerate() {
            vectors.push(svd.u[(r, i)] * s);
        }
    }
    ProjectedSpace::new(k, vectors, row_map, zero_rows)
}

fn damaged(reason: &str) -> Error {
    Error::format("projected space", reason.to_string())
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.write_u32::<LittleEndian>(v as u32).unwrap();
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len());
    out.extend_from_slice(s.as_bytes());
}

fn get_u32(cur: &mut Cursor<&[u8]>) -> Result<usize> {
    cur.read_u32::<LittleEndian>()
        .map(|v| v as usize)
        .map_err(|_| damaged("truncated"))
}

fn get_str(cur: &mut Cursor<&[u8]>) -> Result<String> {
    let len = get_u32(cur)?;
    let remaining = cur.get_ref().len() - cur.position() as usize;
    if len > remaining {
        return Err(damaged("truncated"));
    }
    let mut buf = vec![0; len];
    cur.read_exact(&mut buf).map_err(|_| damaged("truncated"))?;
    String::from_utf8(buf).map_err(|_| damaged("pair word is not UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_svd_values(a: &CsrMatrix) -> Vec<f64> {
        let m = DMatrix::from_row_slice(a.rows(), a.cols(), &a.to_dense());
        let eig = (m.transpose() * &m).symmetric_eigen();
        let mut s: Vec<f64> = eig.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    }

    fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| {
                if rng.random_bool(density) {
                    rng.random_range(0.1..3.0)
                } else {
                    0.0
                }
            })
            .collect();
        CsrMatrix::from_dense(rows, cols, &data)
    }

    #[test]
    fn identity_has_unit_values() {
        let a = CsrMatrix::from_dense(4, 4, DMatrix::<f64>::identity(4, 4).as_slice());
        let svd = truncated_svd(&a, 4, &SvdOptions::default()).unwrap();
        assert_eq!(svd.k, 4);
        for s in &svd.singular_values {
            assert!((s - 1.0).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn diagonal_top_two() {
        let a = CsrMatrix::from_dense(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let svd = truncated_svd(&a, 2, &SvdOptions::default()).unwrap();
        assert_eq!(svd.k, 2);
        assert!((svd.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((svd.singular_values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_oracle_and_is_orthonormal() {
        for (rows, cols, seed) in [(40, 60, 1), (60, 25, 2), (30, 30, 3)] {
            let a = random_sparse(rows, cols, 0.2, seed);
            let want = dense_svd_values(&a);
            let svd = truncated_svd(&a, 10, &SvdOptions::default()).unwrap();
            assert_eq!(svd.k, 10);
            for (got, want) in svd.singular_values.iter().zip(&want) {
                assert!((got - want).abs() < 1e-8, "{got} vs {want}");
            }
            let utu = svd.u.transpose() * &svd.u;
            let vtv = svd.v.transpose() * &svd.v;
            let eye = DMatrix::<f64>::identity(10, 10);
            assert!((utu - &eye).amax() < 1e-8);
            assert!((vtv - &eye).amax() < 1e-8);
        }
    }

    #[test]
    fn rank_clamps_k_and_zero_rows_stay_zero() {
        let a = CsrMatrix::from_dense(4, 3, &[1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let svd = truncated_svd(&a, 3, &SvdOptions::default()).unwrap();
        assert_eq!(svd.k, 2);
        assert!(svd.u.row(2).iter().all(|&x| x == 0.0));
        let recon = svd.reconstruct();
        let orig = DMatrix::from_row_slice(4, 3, &a.to_dense());
        assert!((recon - orig).norm() < 1e-10);
    }

    #[test]
    fn sign_convention_makes_largest_entry_positive() {
        let a = random_sparse(20, 30, 0.3, 9);
        let svd = truncated_svd(&a, 5, &SvdOptions::default()).unwrap();
        for i in 0..svd.k {
            let col = svd.u.column(i);
            let lead = col.iter().fold(0.0f64, |m, &x| if x.abs() > m.abs() { x } else { m });
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn step_cap_reports_no_convergence() {
        let a = random_sparse(50, 50, 0.3, 4);
        let opts = SvdOptions {
            tolerance: 1e-14,
            max_steps: Some(3),
        };
        assert!(matches!(truncated_svd(&a, 2, &opts), Err(Error::NoConvergence { .. })));
        assert!(truncated_svd(&a, 0, &SvdOptions::default()).is_err());
    }

    #[test]
    fn projection_scales_left_vectors() {
        let a = CsrMatrix::from_dense(2, 2, &[3.0, 0.0, 0.0, 2.0]);
        let svd = truncated_svd(&a, 2, &SvdOptions::default()).unwrap();
        let rows = RowMap::from_rows(vec![("a".into(), "b".into()), ("b".into(), "a".into())]).unwrap();
        let space = project(&svd, rows, vec![]).unwrap();
        assert!((space.vector(0)[0] - 3.0).abs() < 1e-12 && space.vector(0)[1].abs() < 1e-12);
        assert!(space.vector(1)[0].abs() < 1e-12 && (space.vector(1)[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn space_bytes_roundtrip_and_reject_damage() {
        let rows = RowMap::from_rows(vec![("a".into(), "b".into()), ("b".into(), "a".into())]).unwrap();
        let space = ProjectedSpace::new(1, vec![1.5, -2.0], rows, vec![("x".into(), "y".into())]).unwrap();
        let bytes = space.to_bytes();
        assert_eq!(ProjectedSpace::from_bytes(&bytes).unwrap(), space);
        assert!(space.contains_pair("y", "x"));
        assert!(ProjectedSpace::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(ProjectedSpace::from_bytes(b"LRAIDX1").is_err());
    }
}
