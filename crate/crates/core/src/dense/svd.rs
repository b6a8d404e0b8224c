//! Dense SVD by Householder bidiagonalization followed by implicitly shifted
//! QR sweeps on the bidiagonal (Golub–Reinsch).

use super::matrix::DenseMatrix;
use crate::error::{LowRankError, Result};

/// Largest `min(m, n)` accepted by [`svd_small`].
pub const SMALL_SVD_CAP: usize = 4096;

const MAX_SWEEPS: usize = 75;

/// Economy SVD `A = U diag(sigma) V^T` with `sigma` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    /// Best rank-`k` approximation `U_k diag(sigma_k) V_k^T`.
    pub fn truncated(&self, k: usize) -> DenseMatrix {
        let k = k.min(self.sigma.len());
        let mut uk = self.u.columns(0..k);
        uk.scale_columns(&self.sigma[..k]);
        uk.mul_tr(&self.v.columns(0..k))
    }
}

/// Full economy SVD of a matrix with `min(m, n) <= SMALL_SVD_CAP`.
pub fn svd_small(a: &DenseMatrix) -> Result<SvdFactors> {
    svd_small_with_cap(a, SMALL_SVD_CAP)
}

pub fn svd_small_with_cap(a: &DenseMatrix, cap: usize) -> Result<SvdFactors> {
    check(a, cap)?;
    if a.rows() >= a.cols() {
        let (u, sigma, v) = golub_reinsch(a.clone(), true)?;
        Ok(sorted(u, sigma, v))
    } else {
        let (v, sigma, u) = golub_reinsch(a.transpose(), true)?;
        Ok(sorted(u, sigma, v))
    }
}

/// Singular values only, non-increasing. Skips accumulating the orthogonal
/// factors, which makes it several times cheaper than [`svd_small`].
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    check(a, usize::MAX)?;
    let work = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let (_, mut sigma, _) = golub_reinsch(work, false)?;
    sigma.sort_by(|x, y| y.total_cmp(x));
    Ok(sigma)
}

/// Count of singular values strictly above `tol`.
pub fn numerical_rank(sigma: &[f64], tol: f64) -> usize {
    sigma.iter().filter(|&&s| s > tol).count()
}

fn check(a: &DenseMatrix, cap: usize) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(LowRankError::InvalidInput("SVD of an empty matrix".into()));
    }
    if a.rows().min(a.cols()) > cap {
        return Err(LowRankError::config(format!(
            "min dimension {} exceeds the small-SVD cap {cap}",
            a.rows().min(a.cols())
        )));
    }
    a.ensure_finite("SVD input")
}

fn sorted(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> SvdFactors {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    SvdFactors {
        u: u.select_columns(&order),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v: v.select_columns(&order),
    }
}

#[inline]
fn with_sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Golub–Reinsch on `a` (`m >= n`). Returns `(U, w, V)` with `U` overwriting
/// `a`; when `want_vectors` is false the returned matrices are meaningless.
fn golub_reinsch(mut a: DenseMatrix, want_vectors: bool) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w = vec![0.0; n];
    let mut v = if want_vectors {
        DenseMatrix::zeros(n, n)
    } else {
        DenseMatrix::zeros(0, 0)
    };
    let mut rv1 = vec![0.0; n];
    let (mut g, mut scale, mut anorm) = (0.0f64, 0.0f64, 0.0f64);
    let mut l = 0usize;

    // Householder reduction to bidiagonal form.
    for i in 0..n {
        l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        let mut s = 0.0;
        scale = 0.0;
        scale += a.col(i)[i..].iter().map(|x| x.abs()).sum::<f64>();
        if scale != 0.0 {
            for x in &mut a.col_mut(i)[i..] {
                *x /= scale;
                s += *x * *x;
            }
            let f = a[(i, i)];
            g = -with_sign(s.sqrt(), f);
            let h = f * g - s;
            a[(i, i)] = f - g;
            for j in l..n {
                let colj: f64 = {
                    let ci = &a.col(i)[i..];
                    let cj = &a.col(j)[i..];
                    ci.iter().zip(cj).map(|(x, y)| x * y).sum()
                };
                let f = colj / h;
                let (ci, cj) = two_cols(&mut a, i, j);
                for k in i..m {
                    cj[k] += f * ci[k];
                }
            }
            a.col_mut(i)[i..].iter_mut().for_each(|x| *x *= scale);
        }
        w[i] = scale * g;
        g = 0.0;
        s = 0.0;
        scale = 0.0;
        if i != n - 1 {
            for k in l..n {
                scale += a[(i, k)].abs();
            }
            if scale != 0.0 {
                for k in l..n {
                    a[(i, k)] /= scale;
                    s += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                a[(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = a[(i, k)] / h;
                }
                // rows l..m: a[j, l..n] += (a[j, l..n] . a[i, l..n]) * rv1[l..n]
                let mut dots = vec![0.0; m];
                for k in l..n {
                    let aik = a[(i, k)];
                    let ck = a.col(k);
                    for j in l..m {
                        dots[j] += ck[j] * aik;
                    }
                }
                for k in l..n {
                    let r = rv1[k];
                    let ck = a.col_mut(k);
                    for j in l..m {
                        ck[j] += dots[j] * r;
                    }
                }
                for k in l..n {
                    a[(i, k)] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    if want_vectors {
        // Accumulate right-hand transformations.
        for i in (0..n).rev() {
            if i < n - 1 {
                if g != 0.0 {
                    for j in l..n {
                        v[(j, i)] = (a[(i, j)] / a[(i, l)]) / g;
                    }
                    for j in l..n {
                        let mut s = 0.0;
                        for k in l..n {
                            s += a[(i, k)] * v[(k, j)];
                        }
                        let (vi, vj) = two_cols(&mut v, i, j);
                        for k in l..n {
                            vj[k] += s * vi[k];
                        }
                    }
                }
                for j in l..n {
                    v[(i, j)] = 0.0;
                    v[(j, i)] = 0.0;
                }
            }
            v[(i, i)] = 1.0;
            g = rv1[i];
            l = i;
        }
        // Accumulate left-hand transformations.
        for i in (0..n).rev() {
            let l = i + 1;
            let g = w[i];
            for j in l..n {
                a[(i, j)] = 0.0;
            }
            if g != 0.0 {
                let g = 1.0 / g;
                for j in l..n {
                    let s: f64 = {
                        let ci = &a.col(i)[l..];
                        let cj = &a.col(j)[l..];
                        ci.iter().zip(cj).map(|(x, y)| x * y).sum()
                    };
                    let f = (s / a[(i, i)]) * g;
                    let (ci, cj) = two_cols(&mut a, i, j);
                    for k in i..m {
                        cj[k] += f * ci[k];
                    }
                }
                a.col_mut(i)[i..].iter_mut().for_each(|x| *x *= g);
            } else {
                a.col_mut(i)[i..].iter_mut().for_each(|x| *x = 0.0);
            }
            a[(i, i)] += 1.0;
        }
    }

    // Diagonalize the bidiagonal form.
    let tiny = f64::EPSILON * anorm;
    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            let mut flag = true;
            let mut l = k;
            loop {
                if l == 0 || rv1[l].abs() <= tiny {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() <= tiny {
                    break;
                }
                l -= 1;
            }
            if flag {
                // Cancel rv1[l] when w[l-1] is negligible.
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() <= tiny {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    let hinv = 1.0 / h;
                    c = g * hinv;
                    s = -f * hinv;
                    if want_vectors {
                        rotate(&mut a, nm, i, c, s);
                    }
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    if want_vectors {
                        v.col_mut(k).iter_mut().for_each(|x| *x = -*x);
                    }
                }
                break;
            }
            if its == MAX_SWEEPS {
                return Err(LowRankError::Convergence {
                    iterations: its,
                    residual: rv1[k].abs(),
                });
            }
            its += 1;
            // Wilkinson-style shift from the trailing 2x2.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + with_sign(g, f))) - h)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut z = f.hypot(h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                if want_vectors {
                    rotate(&mut v, j, i, c, s);
                }
                z = f.hypot(h);
                w[j] = z;
                if z != 0.0 {
                    let zinv = 1.0 / z;
                    c = f * zinv;
                    s = h * zinv;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                if want_vectors {
                    rotate(&mut a, j, i, c, s);
                }
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
    Ok((a, w, v))
}

/// Plane rotation of columns `p` and `q`: `(x, y) -> (x c + y s, y c - x s)`.
#[inline]
fn rotate(mat: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let (cp, cq) = two_cols(mat, p, q);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = xv * c + yv * s;
        *y = yv * c - xv * s;
    }
}

/// Two distinct columns borrowed mutably, returned in argument order.
fn two_cols(mat: &mut DenseMatrix, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    assert_ne!(p, q);
    let m = mat.rows();
    let data = mat.as_mut_slice();
    if p < q {
        let (left, right) = data.split_at_mut(q * m);
        (&mut left[p * m..(p + 1) * m], &mut right[..m])
    } else {
        let (left, right) = data.split_at_mut(p * m);
        (&mut right[..m], &mut left[q * m..(q + 1) * m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::GaussianSampler;

    fn recon_err(a: &DenseMatrix, f: &SvdFactors) -> f64 {
        a.sub(&f.truncated(f.sigma.len())).frobenius_norm() / a.frobenius_norm()
    }

    #[test]
    fn diagonal_input() {
        let f = svd_small(&DenseMatrix::from_diag(2, 2, &[2.0, 1.0])).unwrap();
        assert_eq!(f.sigma, vec![2.0, 1.0]);
        // singular vectors are determined up to a common sign per pair
        for j in 0..2 {
            let s = f.u[(j, j)].signum();
            assert_eq!(s, f.v[(j, j)].signum());
            let mut e = DenseMatrix::zeros(2, 1);
            e[(j, 0)] = s;
            assert!(f.u.columns(j..j + 1).sub(&e).max_abs() < 1e-15);
            assert!(f.v.columns(j..j + 1).sub(&e).max_abs() < 1e-15);
        }
    }

    #[test]
    fn swap_matrix_has_unit_singular_values() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let f = svd_small(&a).unwrap();
        assert!((f.sigma[0] - 1.0).abs() < 1e-15 && (f.sigma[1] - 1.0).abs() < 1e-15);
        assert!(recon_err(&a, &f) < 1e-15);
    }

    #[test]
    fn tall_wide_and_rank_deficient() {
        let mut s = GaussianSampler::new(21);
        for &(m, n) in &[(7, 3), (3, 7), (1, 5), (5, 1), (40, 40)] {
            let a = s.sample(m, n);
            let f = svd_small(&a).unwrap();
            assert_eq!(f.u.shape(), (m, m.min(n)));
            assert_eq!(f.v.shape(), (n, m.min(n)));
            assert!(recon_err(&a, &f) < 1e-13, "{m}x{n}");
            assert!(f.u.orthogonality_defect() < 1e-13);
            assert!(f.v.orthogonality_defect() < 1e-13);
            assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
        // rank 2 in 6x5
        let a = s.sample(6, 2).mul_tr(&s.sample(5, 2));
        let f = svd_small(&a).unwrap();
        assert_eq!(numerical_rank(&f.sigma, 1e-12 * f.sigma[0]), 2);
        assert!(recon_err(&a, &f) < 1e-13);
    }

    #[test]
    fn values_only_agree_with_full() {
        let a = GaussianSampler::new(4).sample(30, 20);
        let full = svd_small(&a).unwrap();
        let vals = singular_values(&a).unwrap();
        for (x, y) in full.sigma.iter().zip(&vals) {
            assert!((x - y).abs() <= 1e-13 * full.sigma[0]);
        }
    }

    #[test]
    fn zero_matrix() {
        let f = svd_small(&DenseMatrix::zeros(3, 2)).unwrap();
        assert_eq!(f.sigma, vec![0.0, 0.0]);
    }

    #[test]
    fn cap_is_enforced() {
        let a = DenseMatrix::identity(3);
        assert!(matches!(svd_small_with_cap(&a, 2), Err(LowRankError::Config(_))));
    }
}
