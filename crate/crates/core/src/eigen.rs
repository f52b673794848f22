//! Eigenvalue kernels.
//!
//! Hermitian matrices go through a Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL; 1x1 and 2x2 inputs use closed
//! forms. General complex matrices go through Hessenberg reduction and a
//! single-shift complex QR iteration with Wilkinson shifts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::norm::NormKind;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance on Hermitian symmetry, scaled by ‖H‖∞.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// QR iteration budget per unit of dimension.
pub const QR_ITERATIONS_PER_DIM: usize = 30;

/// Eigenvalues of a general square matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Upper estimate of the backward error: total magnitude of the
    /// subdiagonal entries dropped at deflation plus a rounding floor.
    pub residual_bound: f64,
}

impl Spectrum {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    h.ensure_square()?;
    let tolerance = HERMITIAN_TOLERANCE * h.norm(NormKind::Inf);
    let deviation = h.hermitian_deviation();
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(())
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max_hermitian(h: &ComplexMatrix) -> Result<f64> {
    check_hermitian(h)?;
    Ok(lambda_max_trusted(h))
}

/// Smallest eigenvalue, computed as −λ_max(−H).
pub fn lambda_min_hermitian(h: &ComplexMatrix) -> Result<f64> {
    Ok(-lambda_max_hermitian(&-h)?)
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut ev = hermitian_eigenvalues_trusted(h)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// λ_max for input that is Hermitian by construction (Gram matrices,
/// Hermitian parts). Reads only the symmetrized entries.
pub(crate) fn lambda_max_trusted(h: &ComplexMatrix) -> f64 {
    let n = h.rows();
    match n {
        1 => h[(0, 0)].re,
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
            0.5 * (a + d) + (0.5 * (a - d)).hypot(b.norm())
        }
        _ => match hermitian_eigenvalues_trusted(h) {
            Ok(ev) => ev.into_iter().fold(f64::NEG_INFINITY, f64::max),
            // QL on a symmetric tridiagonal essentially never stalls; fall
            // back to bisection if it does.
            Err(_) => {
                let (d, e) = tridiagonalize(h);
                bisect_largest(&d, &e)
            }
        },
    }
}

fn hermitian_eigenvalues_trusted(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = h.rows();
    if n == 1 {
        return Ok(vec![h[(0, 0)].re]);
    }
    let (mut d, mut e) = tridiagonalize(h);
    tql(&mut d, &mut e)?;
    Ok(d)
}

/// Reduces a Hermitian matrix to a real symmetric tridiagonal (d, e) with
/// e[i] coupling i and i+1 and e[n-1] = 0.
fn tridiagonalize(h: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.rows();
    let mut a = h.hermitian_part().expect("square").as_slice().to_vec();
    hessenberg_in_place(&mut a, n);
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e: Vec<f64> = (0..n - 1).map(|i| a[(i + 1) * n + i].norm()).collect();
    e.push(0.0);
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QR_ITERATIONS_PER_DIM {
                return Err(Error::Convergence {
                    iterations: iter,
                    dim: n,
                    found: d[..l].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest eigenvalue of a symmetric tridiagonal by Sturm-count bisection.
fn bisect_largest(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let radius = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-radius, radius);
    // number of eigenvalues strictly below x
    let count_below = |x: f64| {
        let mut q = d[0] - x;
        let mut count = usize::from(q < 0.0);
        for i in 1..n {
            let denom = if q == 0.0 { f64::EPSILON * radius.max(1.0) } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / denom;
            count += usize::from(q < 0.0);
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Householder reduction to upper Hessenberg form, in place on a row-major
/// n×n buffer. Entries below the first subdiagonal are set to zero.
fn hessenberg_in_place(a: &mut [Complex64], n: usize) {
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = ((k + 1)..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let len = n - k - 1;
        for (t, i) in ((k + 1)..n).enumerate() {
            v[t] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: rows k+1.., columns k..
        for j in k..n {
            let s: Complex64 = (0..len).map(|t| v[t].conj() * a[(k + 1 + t) * n + j]).sum();
            let s = s * beta;
            for t in 0..len {
                a[(k + 1 + t) * n + j] -= v[t] * s;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let s: Complex64 = (0..len).map(|t| row[k + 1 + t] * v[t]).sum();
            let s = s * beta;
            for t in 0..len {
                row[k + 1 + t] -= s * v[t].conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in (k + 2)..n {
            a[i * n + k] = ZERO;
        }
    }
}

/// Eigenvalue of [[a, b], [c, d]] closest to d.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let t = (a - d) * 0.5;
    let bc = b * c;
    let mut disc = (t * t + bc).sqrt();
    if (t.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let denom = t + disc;
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// All eigenvalues of a general complex square matrix.
pub fn spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.dim()?;
    let scale: f64 = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let floor = n as f64 * f64::EPSILON * scale;
    if n == 1 {
        return Ok(Spectrum {
            eigenvalues: vec![m[(0, 0)]],
            residual_bound: floor,
        });
    }
    let mut h = m.as_slice().to_vec();
    hessenberg_in_place(&mut h, n);

    let budget = QR_ITERATIONS_PER_DIM * n;
    let mut found: Vec<Option<Complex64>> = vec![None; n];
    let mut dropped = 0.0;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            found[0] = Some(h[0]);
            break;
        }
        // locate the start of the unreduced block ending at hi
        let mut l = hi;
        while l > 0 {
            let sub = h[l * n + l - 1].norm();
            let mut s = h[l * n + l].norm() + h[(l - 1) * n + l - 1].norm();
            if s == 0.0 {
                s = scale;
            }
            if sub <= f64::EPSILON * s {
                dropped += sub;
                h[l * n + l - 1] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            found[hi] = Some(h[hi * n + hi]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::Convergence {
                iterations: total - 1,
                dim: n,
                found: found.into_iter().flatten().collect(),
            });
        }

        let shift = if since_deflation.is_multiple_of(10) {
            // exceptional shift to break cycles
            let sub = h[hi * n + hi - 1].norm() + if hi >= 2 { h[(hi - 1) * n + hi - 2].norm() } else { 0.0 };
            h[hi * n + hi] + Complex64::new(0.75 * sub, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            )
        };
        qr_step(&mut h, n, l, hi, shift);
    }

    Ok(Spectrum {
        eigenvalues: found.into_iter().map(|z| z.expect("all deflated")).collect(),
        residual_bound: dropped + floor,
    })
}

/// One explicitly shifted QR step H - σI = QR, H <- RQ + σI on the
/// diagonal block [l, hi].
fn qr_step(h: &mut [Complex64], n: usize, l: usize, hi: usize, shift: Complex64) {
    for k in l..=hi {
        h[k * n + k] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - l);
    for k in l..hi {
        let a = h[k * n + k];
        let b = h[(k + 1) * n + k];
        let r = a.norm().hypot(b.norm());
        let (c, s) = if r == 0.0 {
            (1.0, ZERO)
        } else if a.norm() == 0.0 {
            (0.0, Complex64::new(1.0, 0.0))
        } else {
            (a.norm() / r, (a / a.norm()) * b.conj() / r)
        };
        for j in k..=hi {
            let x = h[k * n + j];
            let y = h[(k + 1) * n + j];
            h[k * n + j] = x * c + s * y;
            h[(k + 1) * n + j] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = l + idx;
        let last = (k + 2).min(hi);
        for i in l..=last {
            let x = h[i * n + k];
            let y = h[i * n + k + 1];
            h[i * n + k] = x * c + y * s.conj();
            h[i * n + k + 1] = -x * s + y * c;
        }
    }
    for k in l..=hi {
        h[k * n + k] += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn lambda_max_examples() {
        let d = ComplexMatrix::from_real_rows([[-100.0, 0.0], [0.0, -200.0]]);
        assert_eq!(lambda_max_hermitian(&d).unwrap(), -100.0);
        let x = ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        assert!((lambda_max_hermitian(&x).unwrap() - 1.0).abs() < 1e-14);
        let y = ComplexMatrix::from_real_rows([[2.0, 1.0], [1.0, 2.0]]);
        assert!((lambda_max_hermitian(&y).unwrap() - 3.0).abs() < 1e-14);
        assert!((lambda_min_hermitian(&y).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_max_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows([[0.0, 2.0], [0.0, 0.0]]);
        assert!(matches!(lambda_max_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn tridiagonal_path_on_known_spectrum() {
        // tridiag(-1, 2, -1) of size 5: eigenvalues 2 - 2cos(kπ/6)
        let n = 5;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(2.0, 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = c(-1.0, 0.0);
                m[(i + 1, i)] = c(-1.0, 0.0);
            }
        }
        let ev = hermitian_eigenvalues(&m).unwrap();
        for (k, &e) in ev.iter().enumerate() {
            let expect = 2.0 - 2.0 * (((k + 1) as f64) * std::f64::consts::PI / 6.0).cos();
            assert!((e - expect).abs() < 1e-12, "{e} vs {expect}");
        }
    }

    #[test]
    fn complex_hermitian_3x3() {
        // [[2, i, 0], [-i, 2, 0], [0, 0, 5]] has eigenvalues 1, 3, 5
        let m = ComplexMatrix::from_rows([
            [c(2.0, 0.0), c(0.0, 1.0), ZERO],
            [c(0.0, -1.0), c(2.0, 0.0), ZERO],
            [ZERO, ZERO, c(5.0, 0.0)],
        ]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        for (e, x) in ev.iter().zip([1.0, 3.0, 5.0]) {
            assert!((e - x).abs() < 1e-13);
        }
        assert!((bisect_largest(&[2.0, 2.0, 5.0], &[1.0, 0.0, 0.0]) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let d = ComplexMatrix::from_diag(&[c(1.0, 2.0), c(3.0, 0.0)]);
        let s = sorted(spectrum(&d).unwrap().eigenvalues);
        assert!((s[0] - c(1.0, 2.0)).norm() < 1e-14 && (s[1] - c(3.0, 0.0)).norm() < 1e-14);

        let rot = ComplexMatrix::from_real_rows([[0.0, 1.0], [-1.0, 0.0]]);
        let s = sorted(spectrum(&rot).unwrap().eigenvalues);
        assert!((s[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((s[1] - c(0.0, 1.0)).norm() < 1e-12);

        for b in [0.0, 1.0, 10.0, 1e3] {
            let a = ComplexMatrix::from_real_rows([[-1.0, b], [0.0, -1.0]]);
            for z in spectrum(&a).unwrap().eigenvalues {
                assert!((z - c(-1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_companion_matrix() {
        // roots 1, 2, 3, 4 of (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24
        let m = ComplexMatrix::from_real_rows([
            [10.0, -35.0, 50.0, -24.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let s = sorted(spectrum(&m).unwrap().eigenvalues);
        for (z, x) in s.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((z - c(x, 0.0)).norm() < 1e-9, "{z}");
        }
    }

    #[test]
    fn spectrum_rejects_rectangular() {
        let m = ComplexMatrix::from_real(2, 3, &[0.0; 6]).unwrap();
        assert!(matches!(spectrum(&m), Err(Error::NotSquare { .. })));
    }
}
