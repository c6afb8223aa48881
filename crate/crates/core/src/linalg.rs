//! Exact linear algebra: integer row echelon for ranks, rational RREF for
//! solving and nullspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon basis over the integers, built one row at a time.
///
/// Each stored row has a pivot column; rows are kept primitive (content 1),
/// and every stored row is zero at the pivots of the rows stored before it.
/// Reduction is fraction-free: `r <- b[c] r - r[c] b`, followed by content
/// removal.
#[derive(Debug, Clone, Default)]
pub struct IntEchelon {
    ncols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntEchelon {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `row` against the basis; returns the remainder.
    pub fn reduce(&self, mut row: Vec<BigInt>) -> Vec<BigInt> {
        assert_eq!(row.len(), self.ncols, "row width mismatch");
        for (c, b) in &self.rows {
            if row[*c].is_zero() {
                continue;
            }
            let g = b[*c].gcd(&row[*c]);
            let mb = &b[*c] / &g;
            let mr = &row[*c] / &g;
            for (x, y) in row.iter_mut().zip(b) {
                if y.is_zero() {
                    if !x.is_zero() {
                        *x *= &mb;
                    }
                } else {
                    *x = &*x * &mb - &mr * y;
                }
            }
            make_primitive(&mut row);
        }
        row
    }

    /// Adds `row` to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: Vec<BigInt>) -> bool {
        let row = self.reduce(row);
        // pivot on the entry of smallest magnitude to limit growth
        let pivot = row
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .min_by(|(_, a), (_, b)| a.magnitude().cmp(b.magnitude()))
            .map(|(c, _)| c);
        match pivot {
            Some(c) => {
                self.rows.push((c, row));
                true
            }
            None => false,
        }
    }
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Rank over the rationals of an integer matrix given by rows.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut ech = IntEchelon::new(first.len());
    for r in rows {
        ech.insert(r.clone());
    }
    ech.rank()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// One solution of `A x = b` (free variables set to zero), if consistent.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = m[row][ncols].clone();
    }
    Some(x)
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
pub fn to_primitive_integers(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    make_primitive(&mut out);
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in out.iter_mut() {
            *x = -&*x;
        }
    }
    out
}
