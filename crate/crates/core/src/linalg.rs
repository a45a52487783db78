//! Dense complex linear algebra over double (`f64`) or double-double
//! (`TwoFloat`) reals.
//!
//! Double precision leans on nalgebra's LU and SVD. nalgebra's
//! decompositions need `RealField`, which `TwoFloat` does not implement, so
//! the extended path uses a partial-pivoting LU and a one-sided Jacobi SVD
//! written generically here. Both paths report singular values as `f64`.

use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, Scalar};
use num_complex::{Complex, Complex64};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub type CMat<T> = DMatrix<Complex<T>>;

/// Relative singularity threshold: σ_min ≤ 1e-10·σ_max.
pub const SINGULAR_RELATIVE: f64 = 1e-10;

/// Arithmetic used by the structured-matrix layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Self::Double),
            "extended" => Ok(Self::Extended),
            other => Err(Error::InvalidParameter(format!(
                "precision must be double or extended, got {other}"
            ))),
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Double => "double",
            Self::Extended => "extended",
        })
    }
}

/// A real scalar type the matrix code can run on.
pub trait Real: Float + FromPrimitive + ToPrimitive + Scalar + NumAssign + Send + Sync + Debug + Display {
    /// Unit roundoff of the type.
    const UNIT_ROUNDOFF: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Correctly rounded (to working precision) quotient.
    fn rdiv(self, rhs: Self) -> Self {
        self / rhs
    }

    fn cdiv(a: Complex<Self>, b: Complex<Self>) -> Complex<Self> {
        a / b
    }

    /// Solves `a x = b` for square `a`.
    fn solve(a: &CMat<Self>, b: &CMat<Self>) -> Result<CMat<Self>> {
        lu_solve(a, b)
    }

    /// Singular values in descending order.
    fn singular_values(a: &CMat<Self>) -> Result<Vec<f64>> {
        jacobi_singular_values(a)
    }
}

impl Real for f64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    fn solve(a: &CMat<f64>, b: &CMat<f64>) -> Result<CMat<f64>> {
        check_square(a)?;
        check_finite(a)?;
        let lu = a.clone().lu();
        let x = lu
            .solve(b)
            .ok_or_else(|| Error::SingularBlock("LU found an exactly zero pivot".into()))?;
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SingularBlock("solution is not finite".into()))
        }
    }

    fn singular_values(a: &CMat<f64>) -> Result<Vec<f64>> {
        check_finite(a)?;
        if a.is_empty() {
            return Ok(Vec::new());
        }
        match nalgebra::SVD::try_new(a.clone(), false, false, f64::EPSILON, 10_000) {
            Some(svd) => {
                let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
                s.sort_by(|x, y| y.total_cmp(x));
                Ok(s)
            }
            None => jacobi_singular_values(a),
        }
    }
}

// twofloat 0.8.4 converts through `FromPrimitive::from_f64` to zero and its
// double-double division skips the fma in the residual, losing the low word
// (1/3 comes back as a plain f64). Conversions go through `From<f64>` and
// quotients get one Newton correction, which restores full precision.
impl Real for TwoFloat {
    // 2^-104, the double-double working precision
    const UNIT_ROUNDOFF: f64 = 4.930380657631324e-32;

    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn rdiv(self, rhs: Self) -> Self {
        let q = self / rhs;
        q + (self - rhs * q) / rhs
    }

    fn cdiv(a: Complex<Self>, b: Complex<Self>) -> Complex<Self> {
        let d = b.norm_sqr();
        Complex::new((a.re * b.re + a.im * b.im).rdiv(d), (a.im * b.re - a.re * b.im).rdiv(d))
    }
}

fn check_square<T: Real>(a: &CMat<T>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidParameter(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub fn check_finite<T: Real>(a: &CMat<T>) -> Result<()> {
    if a.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Gaussian elimination with partial pivoting on a copy of `a`.
pub fn lu_solve<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<CMat<T>> {
    check_square(a)?;
    check_finite(a)?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::InvalidParameter(format!(
            "right-hand side has {} rows, matrix has {n}",
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut pivot = col;
        let mut best = lu[(col, col)].norm();
        for r in col + 1..n {
            let v = lu[(r, col)].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best.is_zero() {
            return Err(Error::SingularBlock(format!("zero pivot in column {col}")));
        }
        if pivot != col {
            lu.swap_rows(pivot, col);
            x.swap_rows(pivot, col);
        }
        let d = lu[(col, col)];
        for r in col + 1..n {
            let f = T::cdiv(lu[(r, col)], d);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = lu[(col, c)];
                lu[(r, c)] -= f * t;
            }
            for c in 0..x.ncols() {
                let t = x[(col, c)];
                x[(r, c)] -= f * t;
            }
        }
    }
    for c in 0..x.ncols() {
        for r in (0..n).rev() {
            let mut s = x[(r, c)];
            for k in r + 1..n {
                s -= lu[(r, k)] * x[(k, c)];
            }
            x[(r, c)] = T::cdiv(s, lu[(r, r)]);
        }
    }
    Ok(x)
}

/// One-sided Jacobi singular values. Rotations act on the columns of `a`
/// (or of `aᴴ` for wide inputs) until every column pair is orthogonal to
/// working precision; the singular values are then the column norms.
pub fn jacobi_singular_values<T: Real>(a: &CMat<T>) -> Result<Vec<f64>> {
    check_finite(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut w = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose().map(|v| Complex::new(v.re, -v.im))
    };
    let (m, n) = (w.nrows(), w.ncols());
    let eps = T::of(T::UNIT_ROUNDOFF * m as f64);
    let one = T::one();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::<T>::zero();
                for i in 0..m {
                    let ap = w[(i, p)];
                    let aq = w[(i, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += Complex::new(ap.re, -ap.im) * aq;
                }
                let g = gamma.norm();
                if g.is_zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = Complex::new(gamma.re.rdiv(g), -gamma.im.rdiv(g));
                let zeta = (beta - alpha).rdiv(T::of(2.0) * g);
                let t = zeta.signum().rdiv(zeta.abs() + (one + zeta * zeta).sqrt());
                let c = one.rdiv((one + t * t).sqrt());
                let s = c * t;
                for i in 0..m {
                    let ap = w[(i, p)];
                    let aq = w[(i, q)] * phase_conj;
                    w[(i, p)] = ap.scale(c) - aq.scale(s);
                    w[(i, q)] = ap.scale(s) + aq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = T::zero();
            for i in 0..m {
                acc += w[(i, j)].norm_sqr();
            }
            acc.sqrt().as_f64()
        })
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// σ_min, σ_max and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvdSummary {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
}

impl SvdSummary {
    pub fn from_values(s: &[f64]) -> Self {
        let sigma_max = s.first().copied().unwrap_or(0.0);
        let sigma_min = s.last().copied().unwrap_or(0.0);
        let cond = if sigma_min > 0.0 {
            sigma_max / sigma_min
        } else {
            f64::INFINITY
        };
        Self {
            sigma_min,
            sigma_max,
            cond,
        }
    }

    pub fn relative_sigma_min(&self) -> f64 {
        if self.sigma_max > 0.0 {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }

    /// σ_min ≤ 1e-10·σ_max.
    pub fn numerically_singular(&self) -> bool {
        self.sigma_min <= SINGULAR_RELATIVE * self.sigma_max
    }
}

pub fn summarize<T: Real>(a: &CMat<T>) -> Result<SvdSummary> {
    Ok(SvdSummary::from_values(&T::singular_values(a)?))
}

/// Smallest singular value from a full SVD.
pub fn min_singular_value(a: &CMat<f64>) -> Result<f64> {
    Ok(summarize(a)?.sigma_min)
}

/// σ_max/σ_min from a full SVD; infinite for singular input.
pub fn condition_number(a: &CMat<f64>) -> Result<f64> {
    Ok(summarize(a)?.cond)
}

pub fn frobenius<T: Real>(a: &CMat<T>) -> f64 {
    let mut acc = T::zero();
    for v in a.iter() {
        acc += v.norm_sqr();
    }
    acc.sqrt().as_f64()
}

pub fn complex_of<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

pub fn complex_to_f64<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.as_f64(), z.im.as_f64())
}

pub fn lift<T: Real>(a: &CMat<f64>) -> CMat<T> {
    a.map(complex_of)
}

pub fn lower<T: Real>(a: &CMat<T>) -> CMat<f64> {
    a.map(complex_to_f64)
}

/// Least-squares solution of a tall system by Householder QR. nalgebra's
/// SVD is not used here: with singular vectors requested it loses accuracy
/// on matrices with near-degenerate singular value pairs.
pub fn least_squares(a: &CMat<f64>, b: &nalgebra::DVector<Complex64>) -> Result<nalgebra::DVector<Complex64>> {
    if a.nrows() < a.ncols() || a.nrows() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "least squares needs a tall {}x{} system with {} values",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    check_finite(a)?;
    let qr = a.clone().qr();
    let rhs = qr.q().adjoint() * b;
    let x = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::SingularBlock("QR found an exactly zero pivot".into()))?;
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(x)
    } else {
        Err(Error::SingularBlock("least-squares solution is not finite".into()))
    }
}

/// Writes a matrix as CSV with each complex entry split into `re,im`.
pub fn write_csv<W: std::io::Write>(a: &CMat<f64>, mut out: W) -> std::io::Result<()> {
    for r in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols())
            .map(|c| format!("{:e},{:e}", a[(r, c)].re, a[(r, c)].im))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> CMat<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| Complex64::new(rows[r][c], 0.0))
    }

    #[test]
    fn least_squares_survives_paired_singular_values() {
        // order-3 multipole basis sampled on |z| = 2; its singular values
        // come in near-equal pairs, where nalgebra's SVD with vectors
        // reconstructs the matrix only to ~5e-3
        let nodes = [
            [0.8325573245010914, 0.2758065375935662],
            [0.5737196599750999, 0.4197892881265761],
            [-0.522138379063087, 0.7730911680675969],
            [-0.3693337439143005, -0.8170125762302947],
        ];
        let a = DMatrix::from_fn(64, 8, |j, c| {
            let t = std::f64::consts::TAU * (j as f64 + 0.5) / 64.0;
            let (ab, bb) = crate::real_basis::multipole_r2([2.0 * t.cos(), 2.0 * t.sin()], nodes[c / 2], 3).unwrap();
            Complex64::new(if c % 2 == 0 { ab } else { bb }, 0.0)
        });
        let x = nalgebra::DVector::from_fn(8, |i, _| Complex64::new(i as f64 - 3.5, 0.0));
        let got = least_squares(&a, &(&a * &x)).unwrap();
        assert!((got - x).norm() < 1e-13);
        assert!(least_squares(&a.transpose(), &nalgebra::DVector::zeros(8)).is_err());
    }

    #[test]
    fn identity_and_diagonal() {
        let i3 = CMat::<f64>::identity(3, 3);
        assert_eq!(min_singular_value(&i3).unwrap(), 1.0);
        assert_eq!(condition_number(&i3).unwrap(), 1.0);
        let d = real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!((min_singular_value(&d).unwrap() - 1.0).abs() < 1e-15);
        assert!((condition_number(&d).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_has_zero_sigma_min() {
        // eigenvalues of MᴴM for [[1,1],[1,1]] are 4 and 0
        let m = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(min_singular_value(&m).unwrap() <= 1e-14);
        assert!(jacobi_singular_values(&m).unwrap()[1] <= 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let m = real(&[&[f64::NAN]]);
        assert_eq!(min_singular_value(&m), Err(Error::NonFinite));
    }

    #[test]
    fn jacobi_agrees_with_nalgebra() {
        let m = DMatrix::from_fn(5, 4, |r, c| {
            Complex64::new(((r * 7 + c * 3) % 5) as f64 - 1.3, (r as f64 - c as f64 * 0.7).sin())
        });
        let a = f64::singular_values(&m).unwrap();
        let b = jacobi_singular_values(&m).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13 * a[0], "{x} vs {y}");
        }
        let wide = m.transpose();
        let c = jacobi_singular_values(&wide).unwrap();
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).abs() < 1e-13 * a[0]);
        }
    }

    #[test]
    fn extended_jacobi_resolves_tiny_singular_value() {
        // [[1, 1], [1, 1 + d]] has σ_min ≈ d/2 for small d
        let d = 1e-20;
        let m: CMat<TwoFloat> = DMatrix::from_fn(2, 2, |r, c| {
            let mut v = TwoFloat::from(1.0);
            if r == 1 && c == 1 {
                v += TwoFloat::from(d);
            }
            Complex::new(v, TwoFloat::from(0.0))
        });
        let s = TwoFloat::singular_values(&m).unwrap();
        assert!((s[1] - d / 2.0).abs() < 1e-3 * d / 2.0, "{s:?}");
    }

    #[test]
    fn extended_division_keeps_low_word() {
        let third = TwoFloat::of(1.0).rdiv(TwoFloat::of(3.0));
        assert_eq!(third * TwoFloat::of(3.0) - TwoFloat::of(1.0), TwoFloat::of(0.0));
        assert!(third.lo() != 0.0);
        let q = <TwoFloat as Real>::cdiv(
            Complex::new(TwoFloat::of(1.0), TwoFloat::of(0.0)),
            Complex::new(TwoFloat::of(0.0), TwoFloat::of(3.0)),
        );
        assert!((q.im * TwoFloat::of(3.0) + TwoFloat::of(1.0)).abs() < TwoFloat::of(1e-31));
        assert_eq!(TwoFloat::of(0.1).hi(), 0.1);
    }

    #[test]
    fn lu_matches_nalgebra() {
        let a = DMatrix::from_fn(4, 4, |r, c| {
            Complex64::new(1.0 / (r + c + 1) as f64, if r == c { 1.0 } else { 0.1 })
        });
        let b = DMatrix::from_fn(4, 2, |r, c| Complex64::new(r as f64, c as f64));
        let x1 = lu_solve(&a, &b).unwrap();
        let x2 = f64::solve(&a, &b).unwrap();
        assert!(frobenius(&(&x1 - &x2)) < 1e-13);
        let xt = TwoFloat::solve(&lift(&a), &lift(&b)).unwrap();
        assert!(frobenius(&(lower(&xt) - &x2)) < 1e-13);
        let singular = real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            lu_solve(&singular, &real(&[&[1.0], &[1.0]])),
            Err(Error::SingularBlock(_))
        ));
    }

    #[test]
    fn csv_interleaves_parts() {
        let m = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)]);
        let mut out = Vec::new();
        write_csv(&m, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1e0,2e0,-5e-1,0e0\n");
    }

    #[test]
    fn precision_parses() {
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert_eq!("extended".parse::<Precision>().unwrap(), Precision::Extended);
        assert!("quad".parse::<Precision>().is_err());
    }
}
