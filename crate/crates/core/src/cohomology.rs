//! Coboundary matrices and the dimension of the (d-1)-cocycle space.
//!
//! Real-coefficient rank of an integer matrix is its rank over the
//! rationals. The fast path eliminates modulo the prime `2^31 - 1`; the
//! fraction-free (Bareiss) elimination over big integers is exact and serves
//! as the reference.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::SubComplexView;
use crate::error::{Error, Result};

pub const PRIME: u64 = (1 << 31) - 1;

/// Dense `rows x cols` matrix with entries in `{-1, 0, 1}`; row `τ`, column
/// `σ` holds `(-1)^i` when `σ` is `τ` with its i-th vertex deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoboundaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl CoboundaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != rows * cols || entries.iter().any(|e| !(-1..=1).contains(e)) {
            return Err(Error::InvalidParameter("entries must be rows*cols values in {-1,0,1}".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Coboundary of a subcomplex; columns follow its sorted face list.
    pub fn from_view(view: &SubComplexView) -> Result<Self> {
        let amb = &view.ambient;
        let cols = view.face_count();
        let mut m = Self::zeros(view.simplices.len(), cols);
        let mut verts = Vec::new();
        let mut fr = vec![0u64; amb.d() + 1];
        for (row, &t) in view.simplices.iter().enumerate() {
            amb.unrank_into(t, amb.d(), &mut verts);
            amb.face_ranks_into(&verts, &mut fr);
            for (i, &f) in fr.iter().enumerate() {
                let col = match &view.lower_faces {
                    None => f as usize,
                    Some(list) => list.binary_search(&f).map_err(|_| {
                        Error::InvalidParameter(format!("face {f} of d-simplex {t} missing from face list"))
                    })?,
                };
                m.set(row, col, if i % 2 == 0 { 1 } else { -1 });
            }
        }
        Ok(m)
    }

    /// Coboundary from explicit vertex lists; `faces` must be sorted.
    pub fn from_lists(faces: &[Vec<usize>], tops: &[Vec<usize>]) -> Result<Self> {
        let mut m = Self::zeros(tops.len(), faces.len());
        let mut face = Vec::new();
        for (row, top) in tops.iter().enumerate() {
            for i in 0..top.len() {
                face.clear();
                face.extend(top.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
                let col = faces
                    .binary_search(&face)
                    .map_err(|_| Error::InvalidParameter(format!("face {face:?} of {top:?} missing")))?;
                m.set(row, col, if i % 2 == 0 { 1 } else { -1 });
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: i8) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// `rows cols` header, then one line of signs per row.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % PRIME;
        }
        base = base * base % PRIME;
        exp >>= 1;
    }
    acc
}

/// Rank over `GF(2^31 - 1)`.
pub fn rank_mod_p(m: &CoboundaryMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<u64> = m.entries.iter().map(|&e| (e as i64).rem_euclid(PRIME as i64) as u64).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(pivot * cols + j, rank * cols + j);
        }
        let inv = pow_mod(a[rank * cols + c], PRIME - 2);
        for r in rank + 1..rows {
            let factor = a[r * cols + c] * inv % PRIME;
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let sub = factor * a[rank * cols + j] % PRIME;
                a[r * cols + j] = (a[r * cols + j] + PRIME - sub) % PRIME;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact rank over the rationals by Bareiss fraction-free elimination.
pub fn rank_fraction_free(m: &CoboundaryMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigInt>> =
        (0..rows).map(|r| m.row(r).iter().map(|&e| BigInt::from(e)).collect()).collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(pivot, rank);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// `rank_mod_p`; the name records that entries are restricted to `{-1, 0, 1}`.
pub fn rank_pm1(m: &CoboundaryMatrix) -> usize {
    rank_mod_p(m)
}

/// `dim Z^{d-1}` of a subcomplex: its face count minus the coboundary rank.
pub fn cocycle_dim(view: &SubComplexView) -> Result<usize> {
    let m = CoboundaryMatrix::from_view(view)?;
    Ok(view.face_count() - rank_pm1(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Ambient;

    fn view(n: usize, d: usize, tops: &[&[usize]], faces: Option<&[&[usize]]>) -> SubComplexView {
        let amb = Ambient::new(n, d).unwrap();
        let mut simplices: Vec<u64> = tops.iter().map(|t| amb.rank_of(t)).collect();
        simplices.sort_unstable();
        let lower_faces = faces.map(|fs| {
            let mut r: Vec<u64> = fs.iter().map(|f| amb.rank_of(f)).collect();
            r.sort_unstable();
            r
        });
        SubComplexView { ambient: amb, weights: vec![1.0; simplices.len()], simplices, lower_faces }
    }

    #[test]
    fn cocycle_dim_examples() {
        assert_eq!(cocycle_dim(&view(5, 2, &[], Some(&[&[0, 1]]))).unwrap(), 1);
        let one = view(5, 2, &[&[0, 1, 2]], Some(&[&[0, 1], &[0, 2], &[1, 2]]));
        assert_eq!(cocycle_dim(&one).unwrap(), 2);
        let sphere = view(4, 2, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]], None);
        assert_eq!(cocycle_dim(&sphere).unwrap(), 3);
        let m = CoboundaryMatrix::from_view(&sphere).unwrap();
        assert_eq!(rank_fraction_free(&m), 3);
        let missing = view(5, 2, &[&[0, 1, 2]], Some(&[&[0, 1]]));
        assert!(cocycle_dim(&missing).is_err());
    }

    #[test]
    fn rows_alternate_in_sign() {
        let v = view(6, 3, &[&[0, 1, 2, 3], &[1, 2, 4, 5]], None);
        let m = CoboundaryMatrix::from_view(&v).unwrap();
        for r in 0..m.rows() {
            let nz: Vec<i8> = m.row(r).iter().copied().filter(|&e| e != 0).collect();
            assert_eq!(nz.len(), 4);
            assert_eq!(nz.iter().map(|&e| e as i32).sum::<i32>(), 0);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_pm1(&CoboundaryMatrix::zeros(4, 5)), 0);
        for size in 1..6 {
            let mut e = vec![0i8; size * size];
            for i in 0..size {
                e[i * size + i] = 1;
            }
            let id = CoboundaryMatrix::from_entries(size, size, e).unwrap();
            assert_eq!(rank_pm1(&id), size);
            assert_eq!(rank_fraction_free(&id), size);
        }
        let m = CoboundaryMatrix::from_entries(3, 3, vec![1, 1, 0, 0, 1, 1, 1, 0, -1]).unwrap();
        assert_eq!(rank_pm1(&m), 2);
        assert_eq!(rank_fraction_free(&m), 2);
        assert!(m.dump().starts_with("3 3\n1 1 0\n"));
    }

    #[test]
    fn lists_and_view_agree() {
        let faces = vec![vec![0, 1], vec![0, 2], vec![1, 2]];
        let m = CoboundaryMatrix::from_lists(&faces, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(m.row(0), &[1, -1, 1]);
    }
}
