//! The structured matrices behind the uniqueness arguments: Vandermonde and
//! moment blocks, the mixed block systems, their eliminations, and the C
//! matrix whose invertibility is the open question.
//!
//! Notation: N_k nodes z_k, G the N_k×N_k Vandermonde matrix with rows
//! z_k^{i−1}, N = diag(1..N_k), X = diag(z_k) and W = G⁻¹NG. Then
//!
//!   U   = G X^{N_k} G⁻¹
//!   C   = N_k I − N + U⁻¹NU = G·[N_k I − W + X^{−N_k} W X^{N_k}]·G⁻¹
//!   C_m = mN_k I − W + X^{−mN_k} W X^{mN_k}
//!
//! No inverse is ever formed: W comes from solving G W = N G, the outer
//! G(·)G⁻¹ from a transposed solve, and the X-conjugation is an entrywise
//! scaling by (z_j/z_i)^p.

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::complex_basis::binomial_pole_coefficient;
use crate::error::{Error, Result};
use crate::linalg::{self, complex_of, lower, summarize, CMat, Precision, Real, SvdSummary};

/// Largest N_k handled in double precision before switching to extended.
pub const DEFAULT_MAX_DOUBLE_NODES: usize = 12;
/// cond(G) above which double precision is not trusted.
pub const DEFAULT_COND_THRESHOLD: f64 = 1e12;

/// Kind of a column block in a moment system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    /// Logarithmic strengths ρ_k.
    Log,
    /// Pole strengths of the given order.
    Pole(u32),
}

/// A dense system of power-series conditions. Row `i` (0-based) is the
/// coefficient of z^{−(row_offset + i)}; columns come in blocks of N_k, one
/// per entry of `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub entries: CMat<f64>,
    pub row_offset: usize,
    pub layout: Vec<BlockKind>,
    pub nodes: Vec<Complex64>,
}

impl MomentMatrix {
    pub fn n_k(&self) -> usize {
        self.nodes.len()
    }

    /// Columns of block `b`.
    pub fn block(&self, b: usize) -> CMat<f64> {
        let n = self.n_k();
        self.entries.columns(b * n, n).into_owned()
    }

    pub fn svd(&self) -> Result<SvdSummary> {
        summarize(&self.entries)
    }
}

pub(crate) fn check_nodes(nodes: &[Complex64], nonzero: bool) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::Empty);
    }
    for (i, z) in nodes.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if nonzero && z.norm() == 0.0 {
            return Err(Error::ZeroNode { index: i });
        }
        for (j, w) in nodes.iter().enumerate().skip(i + 1) {
            if z == w {
                return Err(Error::DuplicateNodes { first: i, second: j });
            }
        }
    }
    Ok(())
}

fn cpow<T: Real>(z: Complex<T>, mut p: u32) -> Complex<T> {
    let mut base = z;
    let mut acc = Complex::<T>::one();
    while p > 0 {
        if p & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        p >>= 1;
    }
    acc
}

fn lift_nodes<T: Real>(nodes: &[Complex64]) -> Vec<Complex<T>> {
    nodes.iter().map(|z| complex_of(*z)).collect()
}

/// rows × N_k matrix with entry (i, k) = z_k^{i + shift}.
fn power_matrix<T: Real>(x: &[Complex<T>], rows: usize, shift: u32) -> CMat<T> {
    let mut m = CMat::<T>::zeros(rows, x.len());
    for (k, z) in x.iter().enumerate() {
        let mut p = cpow(*z, shift);
        for i in 0..rows {
            m[(i, k)] = p;
            p = p * z;
        }
    }
    m
}

fn scale_rows<T: Real>(mut m: CMat<T>, f: impl Fn(usize) -> f64) -> CMat<T> {
    for i in 0..m.nrows() {
        let s = T::of(f(i));
        for v in m.row_mut(i).iter_mut() {
            *v = v.scale(s);
        }
    }
    m
}

fn diag<T: Real>(d: &[Complex<T>]) -> CMat<T> {
    CMat::<T>::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

/// Entry (i, k) = z_k^{i−1}, i = 1..rows.
pub fn vandermonde(nodes: &[Complex64], rows: usize) -> Result<MomentMatrix> {
    check_nodes(nodes, false)?;
    if rows < 1 {
        return Err(Error::InvalidParameter("rows must be >= 1".into()));
    }
    Ok(MomentMatrix {
        entries: power_matrix(nodes, rows, 0),
        row_offset: 1,
        layout: vec![BlockKind::Pole(1)],
        nodes: nodes.to_vec(),
    })
}

/// diag(1, …, n).
pub fn diag_n(n: usize) -> CMat<f64> {
    CMat::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new((i + 1) as f64, 0.0)
        } else {
            Complex64::zero()
        }
    })
}

/// diag(z_k).
pub fn diag_x(nodes: &[Complex64]) -> Result<CMat<f64>> {
    if let Some(index) = nodes.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroNode { index });
    }
    Ok(diag(nodes))
}

/// G′ = N⁻¹GX, entry (n, k) = z_k^n/n for n = 1..N_k.
pub fn log_moment_matrix(nodes: &[Complex64]) -> Result<MomentMatrix> {
    check_nodes(nodes, true)?;
    let n = nodes.len();
    Ok(MomentMatrix {
        entries: scale_rows(power_matrix(nodes, n, 1), |i| 1.0 / (i + 1) as f64),
        row_offset: 1,
        layout: vec![BlockKind::Log],
        nodes: nodes.to_vec(),
    })
}

/// Conditions of a pure order-m pole expansion: rows n = 0..N_k−1 are the
/// coefficients of z^{−(m+n)}, entry S_{m,n} z_k^n, i.e. diag(S_{m,n})·G.
pub fn pole_moment_block(nodes: &[Complex64], m: u32) -> Result<MomentMatrix> {
    if m < 1 {
        return Err(Error::BadOrder(m as i64));
    }
    check_nodes(nodes, false)?;
    let n = nodes.len();
    let s: Vec<f64> = (0..n)
        .map(|i| binomial_pole_coefficient(m as i64, i as i64))
        .collect::<Result<_>>()?;
    Ok(MomentMatrix {
        entries: scale_rows(power_matrix(nodes, n, 0), |i| s[i]),
        row_offset: m as usize,
        layout: vec![BlockKind::Pole(m)],
        nodes: nodes.to_vec(),
    })
}

/// Coefficients of z^{−2}, …, z^{−(rows+1)} of Σ ρ_k ψ_k + μ_k/(z − z_k) +
/// ν_k/(z − z_k)², in raw strengths, column blocks ordered log, pole1, pole2.
/// The z^{−1} condition (which carries Σ μ_k) is set aside.
///
/// Row r (1-based) holds z_k^{r+1}/(r+1) for ρ_k, z_k^r for μ_k and
/// r z_k^{r−1} for ν_k, so for {pole1, pole2} the leading 2N_k rows are
/// [GX | NG ; GX^{N_k+1} | (N + N_k I)GX^{N_k}].
pub fn mixed_block_system(nodes: &[Complex64], kinds: &[BlockKind], rows: usize) -> Result<MomentMatrix> {
    let mut layout = kinds.to_vec();
    layout.sort();
    layout.dedup();
    if layout.is_empty() {
        return Err(Error::BadSampler("no block kinds selected".into()));
    }
    if let Some(bad) = layout
        .iter()
        .find(|k| !matches!(k, BlockKind::Log | BlockKind::Pole(1) | BlockKind::Pole(2)))
    {
        return Err(Error::InvalidParameter(format!(
            "mixed systems support log, pole1 and pole2 blocks, got {bad:?}"
        )));
    }
    let needs_nonzero = layout.contains(&BlockKind::Log);
    check_nodes(nodes, needs_nonzero)?;
    let n = nodes.len();
    if rows < n * layout.len() {
        return Err(Error::InvalidParameter(format!(
            "{rows} rows cannot determine {} unknowns",
            n * layout.len()
        )));
    }
    let mut entries = CMat::<f64>::zeros(rows, n * layout.len());
    for (b, kind) in layout.iter().enumerate() {
        let block = match kind {
            BlockKind::Log => scale_rows(power_matrix(nodes, rows, 2), |i| 1.0 / (i + 2) as f64),
            BlockKind::Pole(1) => power_matrix(nodes, rows, 1),
            _ => scale_rows(power_matrix(nodes, rows, 0), |i| (i + 1) as f64),
        };
        entries.columns_mut(b * n, n).copy_from(&block);
    }
    Ok(MomentMatrix {
        entries,
        row_offset: 2,
        layout,
        nodes: nodes.to_vec(),
    })
}

/// Log plus simple-pole conditions without a second-order term, in the
/// variables (z_k²ρ_k, μ_k) with row j scaled by j:
/// [G | (N+I)GX ; GX^{N_k} | (N+(N_k+1)I)GX^{N_k+1}].
pub fn log_pole_block(nodes: &[Complex64]) -> Result<MomentMatrix> {
    check_nodes(nodes, true)?;
    let n = nodes.len();
    let rows = 2 * n;
    let left = power_matrix(nodes, rows, 0);
    let right = scale_rows(power_matrix(nodes, rows, 1), |i| (i + 2) as f64);
    let mut entries = CMat::<f64>::zeros(rows, rows);
    entries.columns_mut(0, n).copy_from(&left);
    entries.columns_mut(n, n).copy_from(&right);
    Ok(MomentMatrix {
        entries,
        row_offset: 2,
        layout: vec![BlockKind::Log, BlockKind::Pole(1)],
        nodes: nodes.to_vec(),
    })
}

/// a·G⁻¹ by solving Gᵀ yᵀ = aᵀ.
pub fn right_divide<T: Real>(a: &CMat<T>, g: &CMat<T>) -> Result<CMat<T>> {
    Ok(T::solve(&g.transpose(), &a.transpose())?.transpose())
}

/// W = G⁻¹NG.
fn w_matrix<T: Real>(g: &CMat<T>) -> Result<CMat<T>> {
    let ng = scale_rows(g.clone(), |i| (i + 1) as f64);
    T::solve(g, &ng)
}

/// X^{−p} W X^{p}: entry (i, j) = W_ij (z_j/z_i)^p, exactly W_ii on the diagonal.
fn conjugate_by_powers<T: Real>(w: &CMat<T>, x: &[Complex<T>], p: u32) -> CMat<T> {
    CMat::<T>::from_fn(w.nrows(), w.ncols(), |i, j| {
        if i == j {
            w[(i, j)]
        } else {
            w[(i, j)] * cpow(T::cdiv(x[j], x[i]), p)
        }
    })
}

/// mN_k I − W + X^{−mN_k} W X^{mN_k}.
fn bracket<T: Real>(w: &CMat<T>, x: &[Complex<T>], m: u32) -> CMat<T> {
    let n = x.len();
    let p = m * n as u32;
    let mut b = conjugate_by_powers(w, x, p) - w;
    for i in 0..n {
        b[(i, i)] += Complex::new(T::of((m as usize * n) as f64), T::zero());
    }
    b
}

fn check_pivot_block<T: Real>(block: &CMat<T>, what: &str) -> Result<()> {
    let s = summarize(block)?;
    if !(s.sigma_min > 16.0 * T::UNIT_ROUNDOFF * s.sigma_max) {
        return Err(Error::SingularBlock(format!(
            "{what} has σ_min {:e} against σ_max {:e}",
            s.sigma_min, s.sigma_max
        )));
    }
    Ok(())
}

/// Result of eliminating the first column block of a 2N_k×2N_k system.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    /// Maps the second block's unknowns to the first's.
    pub first_from_second: CMat<f64>,
    /// The reduced N_k×N_k matrix acting on the second block.
    pub reduced: CMat<f64>,
}

fn split_square<T: Real>(system: &MomentMatrix) -> Result<[CMat<T>; 4]> {
    let n = system.n_k();
    if system.entries.shape() != (2 * n, 2 * n) || system.layout.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected a square two-block system of size {}, got {:?}",
            2 * n,
            system.entries.shape()
        )));
    }
    let e: CMat<T> = linalg::lift(&system.entries);
    Ok([
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, n)).into_owned(),
        e.view((n, 0), (n, n)).into_owned(),
        e.view((n, n), (n, n)).into_owned(),
    ])
}

/// For the {pole1, pole2} system: μ = −X⁻¹G⁻¹NG ν from the top rows, and the
/// Schur complement brought to X^{−N_k}G⁻¹S = N_k I − G⁻¹NG + X^{−N_k}G⁻¹NG X^{N_k}.
pub fn eliminate_first_block(system: &MomentMatrix) -> Result<Elimination> {
    eliminate_first_block_in::<f64>(system)
}

pub fn eliminate_first_block_in<T: Real>(system: &MomentMatrix) -> Result<Elimination> {
    if system.layout != [BlockKind::Pole(1), BlockKind::Pole(2)] {
        return Err(Error::InvalidParameter("expected a {pole1, pole2} system".into()));
    }
    let [tl, tr, bl, br] = split_square::<T>(system)?;
    check_pivot_block(&tl, "G·X")?;
    let n = system.n_k();
    let first_from_second = -T::solve(&tl, &tr)?;
    let schur = br + &bl * &first_from_second;
    let x = lift_nodes::<T>(&system.nodes);
    let g = power_matrix(&x, n, 0);
    check_pivot_block(&g, "G")?;
    let mut reduced = T::solve(&g, &schur)?;
    let p = n as u32;
    for i in 0..n {
        let s = cpow(x[i], p);
        for v in reduced.row_mut(i).iter_mut() {
            *v = T::cdiv(*v, s);
        }
    }
    Ok(Elimination {
        first_from_second: lower(&first_from_second),
        reduced: lower(&reduced),
    })
}

/// For [`log_pole_block`]: (z_k²ρ_k) = −G⁻¹(N+I)GX μ from the top rows; the
/// Schur complement brought to X^{−N_k}G⁻¹S X⁻¹ is the same bracket matrix
/// as in [`eliminate_first_block`], now acting on Xμ.
pub fn eliminate_log_pole(system: &MomentMatrix) -> Result<Elimination> {
    eliminate_log_pole_in::<f64>(system)
}

pub fn eliminate_log_pole_in<T: Real>(system: &MomentMatrix) -> Result<Elimination> {
    if system.layout != [BlockKind::Log, BlockKind::Pole(1)] {
        return Err(Error::InvalidParameter("expected a log-pole system".into()));
    }
    let [tl, tr, bl, br] = split_square::<T>(system)?;
    check_pivot_block(&tl, "G")?;
    let n = system.n_k();
    let first_from_second = -T::solve(&tl, &tr)?;
    let schur = br + &bl * &first_from_second;
    let x = lift_nodes::<T>(&system.nodes);
    let mut reduced = T::solve(&tl, &schur)?;
    let p = n as u32;
    for i in 0..n {
        let s = cpow(x[i], p);
        for j in 0..n {
            reduced[(i, j)] = T::cdiv(reduced[(i, j)], s * x[j]);
        }
    }
    Ok(Elimination {
        first_from_second: lower(&first_from_second),
        reduced: lower(&reduced),
    })
}

/// The bracket N_k I − G⁻¹NG + X^{−N_k}G⁻¹NG X^{N_k} built directly.
pub fn bracket_matrix(nodes: &[Complex64]) -> Result<CMat<f64>> {
    check_nodes(nodes, true)?;
    let x = lift_nodes::<f64>(nodes);
    let g = power_matrix(&x, x.len(), 0);
    Ok(bracket(&w_matrix(&g)?, &x, 1))
}

/// How [`c_matrix_with`] chooses its arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CMatrixOptions {
    pub precision: Precision,
    /// Recompute in extended precision when double is not trusted
    /// (N_k above `max_double_nodes` or cond(G) above `cond_threshold`).
    /// Without it those cases are errors.
    pub fallback: bool,
    pub max_double_nodes: usize,
    pub cond_threshold: f64,
}

impl Default for CMatrixOptions {
    fn default() -> Self {
        Self {
            precision: Precision::Double,
            fallback: true,
            max_double_nodes: DEFAULT_MAX_DOUBLE_NODES,
            cond_threshold: DEFAULT_COND_THRESHOLD,
        }
    }
}

impl CMatrixOptions {
    pub fn strict() -> Self {
        Self {
            fallback: false,
            ..Self::default()
        }
    }

    pub fn extended() -> Self {
        Self {
            precision: Precision::Extended,
            ..Self::default()
        }
    }
}

/// G, N, X, U and C (or C_m) for one configuration, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrixBundle {
    pub nodes: Vec<Complex64>,
    /// 1 for the C matrix itself; m for C_m.
    pub m: u32,
    pub g: CMat<f64>,
    pub n: CMat<f64>,
    pub x: CMat<f64>,
    /// G X^{mN_k} G⁻¹.
    pub u: CMat<f64>,
    pub c: CMat<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    pub cond_g: f64,
    /// Arithmetic the values were computed in.
    pub precision: Precision,
    /// cond(G) above the threshold or C numerically singular.
    pub flagged: bool,
}

impl CMatrixBundle {
    pub fn n_k(&self) -> usize {
        self.nodes.len()
    }

    pub fn relative_sigma_min(&self) -> f64 {
        if self.sigma_max > 0.0 {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }

    pub fn summary(&self) -> BundleSummary {
        BundleSummary {
            nodes: self.nodes.iter().map(|z| [z.re, z.im]).collect(),
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            cond: self.cond,
            flagged: self.flagged,
        }
    }
}

/// JSON form of a bundle: `{nodes, sigma_min, sigma_max, cond, flagged}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub nodes: Vec<[f64; 2]>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    pub flagged: bool,
}

struct Parts<T: Real> {
    g: CMat<T>,
    x: Vec<Complex<T>>,
    u: CMat<T>,
    c: CMat<T>,
}

/// Builds the matrices in arithmetic `T`. With `similar` the C matrix is
/// returned in the original frame G·bracket·G⁻¹, otherwise as the bracket.
fn build<T: Real>(nodes: &[Complex64], m: u32, similar: bool) -> Result<Parts<T>> {
    let x = lift_nodes::<T>(nodes);
    let n = x.len();
    let g = power_matrix(&x, n, 0);
    let p = m * n as u32;
    let gxp = {
        let mut a = g.clone();
        for (k, z) in x.iter().enumerate() {
            let s = cpow(*z, p);
            for v in a.column_mut(k).iter_mut() {
                *v *= s;
            }
        }
        a
    };
    let u = right_divide(&gxp, &g)?;
    let w = w_matrix(&g)?;
    let br = bracket(&w, &x, m);
    let c = if similar { right_divide(&(&g * &br), &g)? } else { br };
    Ok(Parts { g, x, u, c })
}

fn bundle_in<T: Real>(
    nodes: &[Complex64],
    m: u32,
    options: &CMatrixOptions,
    precision: Precision,
) -> Result<CMatrixBundle> {
    let parts = build::<T>(nodes, m, m == 1)?;
    let cond_g = summarize(&parts.g)?.cond;
    let s = summarize(&parts.c)?;
    let flagged = !(cond_g <= options.cond_threshold) || s.numerically_singular();
    Ok(CMatrixBundle {
        nodes: nodes.to_vec(),
        m,
        g: lower(&parts.g),
        n: diag_n(nodes.len()),
        x: lower(&diag(&parts.x)),
        u: lower(&parts.u),
        c: lower(&parts.c),
        sigma_min: s.sigma_min,
        sigma_max: s.sigma_max,
        cond: s.cond,
        cond_g,
        precision,
        flagged,
    })
}

fn bundle(nodes: &[Complex64], m: u32, options: &CMatrixOptions) -> Result<CMatrixBundle> {
    if m < 1 {
        return Err(Error::BadOrder(m as i64));
    }
    check_nodes(nodes, true)?;
    let n = nodes.len();
    if options.precision == Precision::Extended {
        return bundle_in::<TwoFloat>(nodes, m, options, Precision::Extended);
    }
    if n > options.max_double_nodes {
        if options.fallback {
            return bundle_in::<TwoFloat>(nodes, m, options, Precision::Extended);
        }
        return Err(Error::TooManyNodes {
            n_k: n,
            max: options.max_double_nodes,
        });
    }
    let g = power_matrix(nodes, n, 0);
    let cond_g = summarize(&g)?.cond;
    if !(cond_g <= options.cond_threshold) {
        if options.fallback {
            return bundle_in::<TwoFloat>(nodes, m, options, Precision::Extended);
        }
        return Err(Error::IllConditioned {
            cond: cond_g,
            threshold: options.cond_threshold,
        });
    }
    bundle_in::<f64>(nodes, m, options, Precision::Double)
}

/// C = N_k I − N + U⁻¹NU with default options.
pub fn c_matrix(nodes: &[Complex64]) -> Result<CMatrixBundle> {
    bundle(nodes, 1, &CMatrixOptions::default())
}

pub fn c_matrix_with(nodes: &[Complex64], options: &CMatrixOptions) -> Result<CMatrixBundle> {
    bundle(nodes, 1, options)
}

/// C_m = mN_k I − G⁻¹NG + X^{−mN_k}G⁻¹NG X^{mN_k}. For m = 1 the bundle
/// carries C itself (the G-similar form), so use [`c_m_matrix`] with m = 1
/// only when the similarity frame does not matter.
pub fn c_m_matrix(nodes: &[Complex64], m: u32) -> Result<CMatrixBundle> {
    c_m_matrix_with(nodes, m, &CMatrixOptions::default())
}

pub fn c_m_matrix_with(nodes: &[Complex64], m: u32, options: &CMatrixOptions) -> Result<CMatrixBundle> {
    if m == 1 {
        // C_1 is the bracket itself, not its G-similar image
        check_nodes(nodes, true)?;
        let mut b = bundle(nodes, 1, options)?;
        let c1 = match b.precision {
            Precision::Double => bracket_in::<f64>(nodes, 1)?,
            Precision::Extended => bracket_in::<TwoFloat>(nodes, 1)?,
        };
        let s = match b.precision {
            Precision::Double => summarize(&c1)?,
            Precision::Extended => summarize::<TwoFloat>(&linalg::lift(&c1))?,
        };
        b.c = c1;
        b.sigma_min = s.sigma_min;
        b.sigma_max = s.sigma_max;
        b.cond = s.cond;
        b.flagged = !(b.cond_g <= options.cond_threshold) || s.numerically_singular();
        return Ok(b);
    }
    bundle(nodes, m, options)
}

fn bracket_in<T: Real>(nodes: &[Complex64], m: u32) -> Result<CMat<f64>> {
    let x = lift_nodes::<T>(nodes);
    let g = power_matrix(&x, x.len(), 0);
    Ok(lower(&bracket(&w_matrix(&g)?, &x, m)))
}

/// C computed through its definition with U: N_k I − N + U⁻¹(NU), using a
/// solve against U. An independent route to the same matrix, for checks.
pub fn c_matrix_via_u(nodes: &[Complex64]) -> Result<CMat<f64>> {
    check_nodes(nodes, true)?;
    let parts = build::<f64>(nodes, 1, true)?;
    let n = nodes.len();
    let nu = scale_rows(parts.u.clone(), |i| (i + 1) as f64);
    let b = f64::solve(&parts.u, &nu)?;
    let mut c = b;
    for i in 0..n {
        c[(i, i)] += Complex64::new((n - i - 1) as f64, 0.0);
    }
    Ok(c)
}

/// B = U⁻¹NU, whose spectrum is {1, …, N_k}.
pub fn b_matrix(nodes: &[Complex64]) -> Result<CMat<f64>> {
    check_nodes(nodes, true)?;
    let x = lift_nodes::<f64>(nodes);
    let g = power_matrix(&x, x.len(), 0);
    let inner = conjugate_by_powers(&w_matrix(&g)?, &x, x.len() as u32);
    right_divide(&(&g * &inner), &g)
}

/// Eigenvalues through nalgebra's complex Schur form.
pub fn eigenvalues(a: &CMat<f64>) -> Result<Vec<Complex64>> {
    linalg::check_finite(a)?;
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::SingularBlock("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Determinant by LU, used against the product formula.
pub fn determinant(a: &CMat<f64>) -> Complex64 {
    a.clone().lu().determinant()
}

/// Π_{j<k} (z_k − z_j).
pub fn vandermonde_product(nodes: &[Complex64]) -> Complex64 {
    let mut p = Complex64::one();
    for k in 0..nodes.len() {
        for j in 0..k {
            p *= nodes[k] - nodes[j];
        }
    }
    p
}

pub fn identity(n: usize) -> CMat<f64> {
    DMatrix::identity(n, n)
}
