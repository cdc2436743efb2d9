//! Dense complex linear algebra shared by the tensor-network, circuit and
//! optimizer modules.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type Mat = DMatrix<C64>;

/// Left singular vectors and squared singular values of `m`, sorted in
/// descending order with index-order tie-breaking. Columns of the returned
/// matrix are orthonormal; there are `min(rows, cols)` of them.
pub fn left_spectrum(m: &Mat) -> (Mat, Vec<f64>) {
    let (rows, cols) = m.shape();
    let (u, weights) = if rows <= cols {
        let gram = m * m.adjoint();
        let eig = SymmetricEigen::new(gram);
        let w: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
        (eig.eigenvectors, w)
    } else {
        let svd = m.clone().svd_unordered(true, false);
        let w: Vec<f64> = svd.singular_values.iter().map(|&x| x * x).collect();
        (svd.u.expect("left vectors requested"), w)
    };
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let sorted_u = Mat::from_fn(rows, order.len(), |r, c| u[(r, order[c])]);
    let sorted_w = order.iter().map(|&i| weights[i]).collect();
    (sorted_u, sorted_w)
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_error(u: &Mat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    isometry_error(u)
}

/// Largest entry of `|W†W − I|` for a matrix with orthonormal columns.
pub fn isometry_error(w: &Mat) -> f64 {
    let g = w.adjoint() * w;
    let mut err: f64 = 0.0;
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            let target = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            err = err.max((g[(r, c)] - target).norm());
        }
    }
    err
}

/// Extends the first `keep` columns of `w` (assumed orthonormal) to a square
/// unitary. Extra columns are produced by Gram–Schmidt over the standard
/// basis vectors in increasing order, so the result is deterministic.
pub fn complete_unitary(w: &Mat, keep: usize) -> Mat {
    let d = w.nrows();
    let mut cols: Vec<Vec<C64>> = (0..keep).map(|c| (0..d).map(|r| w[(r, c)]).collect()).collect();
    let mut e = 0;
    while cols.len() < d && e < d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
        e += 1;
    }
    Mat::from_fn(d, d, |r, c| cols[c][r])
}

/// Q factor of a QR decomposition with the phases of R's diagonal moved into
/// Q, so that R has a positive real diagonal. Unitary inputs are fixed points.
pub fn qr_unitary(a: &Mat) -> Mat {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..q.ncols() {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..q.nrows() {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Unitary factor of the polar decomposition `A = W P`.
pub fn polar_unitary(a: &Mat) -> Mat {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    u * v_t
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    qr_unitary(&gaussian_matrix(d, d, rng))
}

/// Matrix with i.i.d. complex standard-normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Anti-Hermitian part `(X − X†)/2`.
pub fn skew(x: &Mat) -> Mat {
    (x - x.adjoint()) * C64::new(0.5, 0.0)
}

/// Real inner product `Re tr(A†B)`.
pub fn real_inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spectrum_matches_full_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (r, c) in [(3, 7), (7, 3), (4, 4)] {
            let m = gaussian_matrix(r, c, &mut rng);
            let (u, w) = left_spectrum(&m);
            let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().map(|x| x * x).collect();
            s.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in w.iter().zip(&s) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(isometry_error(&u) < 1e-12);
            assert!(w.windows(2).all(|p| p[0] >= p[1]));
        }
    }

    #[test]
    fn completion_keeps_columns_and_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(8, &mut rng);
        let w = u.columns(0, 3).into_owned();
        let full = complete_unitary(&w, 3);
        assert!(unitarity_error(&full) < 1e-12);
        for r in 0..8 {
            for c in 0..3 {
                assert!((full[(r, c)] - w[(r, c)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn retractions_fix_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        assert!((qr_unitary(&u) - &u).norm() < 1e-12);
        assert!((polar_unitary(&u) - &u).norm() < 1e-12);
    }
}
