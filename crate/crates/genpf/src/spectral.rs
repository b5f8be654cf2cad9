//! Classical Perron-Frobenius kernel for irreducible square systems.
//!
//! The square system in canonical order has a diagonal supporter matrix, so
//! `Z = supporters^-1 * repressors` is the nonnegative matrix whose largest
//! eigenvalue and positive eigenvector the solver needs. Power iteration on
//! the primitivity shift `Z + I` gives the float path, certified by the
//! Collatz-Wielandt bracket; an exact characteristic-polynomial path with
//! Sturm isolation backs it up for small dimensions.

use num::traits::{One, Signed, Zero};

use crate::matrix::{matvec_f64, RatMatrix};
use crate::numeric::{rat_int, rat_to_f64, Rat};
use crate::system::GainSystem;
use crate::{Error, Result};

/// Default tolerance on the Collatz-Wielandt bracket width.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Dimension cap for the exact characteristic-polynomial path.
pub const DEFAULT_EXACT_LIMIT: usize = 4;

/// Iteration budget scaling used by the solver: `100 * n * ln(1/tol)`.
pub fn default_max_iter(n: usize, tol: f64) -> usize {
    let steps = 100.0 * n.max(1) as f64 * (1.0 / tol).ln();
    steps.ceil() as usize
}

/// Positive root, positive L1-normalized eigenvector and convergence data.
#[derive(Debug, Clone, PartialEq)]
pub struct SquarePfResult {
    pub root: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `max_i |(Z v)_i - root * v_i|` at the returned iterate.
    pub residual: f64,
}

/// `Z(i, j) = repressor(i, j) / supporter(i, i)` for a canonically ordered
/// square system.
pub fn z_matrix(system: &GainSystem) -> Result<RatMatrix> {
    let n = system.entities();
    if system.affectors() != n {
        return Err(Error::NotSquare);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && system.supporter_gains().get(i, j).is_positive() {
                return Err(Error::NondiagonalSupport {
                    entity: i,
                    affector: j,
                });
            }
        }
        if system.supporter_gains().get(i, i).is_zero() {
            return Err(Error::ZeroDiagonal { entity: i });
        }
    }
    let mut z = RatMatrix::zero(n, n);
    for i in 0..n {
        let diag = system.supporter_gains().get(i, i);
        for j in 0..n {
            let v = system.repressor_gains().get(i, j);
            if !v.is_zero() {
                z.set(i, j, v / diag);
            }
        }
    }
    Ok(z)
}

fn is_irreducible_matrix_f64(z: &[Vec<f64>]) -> bool {
    let n = z.len();
    if n == 1 {
        return z[0][0] > 0.0;
    }
    let adj: Vec<Vec<usize>> = z
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    crate::graph::scc_of_adjacency(&adj).count == 1
}

/// Largest eigenvalue and positive eigenvector of a nonnegative irreducible
/// matrix, by power iteration on `Z + I`.
///
/// The shift defeats periodicity: `Z + I` is primitive whenever `Z` is
/// irreducible, its largest eigenvalue is `root + 1`, and the eigenvector
/// is unchanged. Each iterate brackets the root between the smallest and
/// largest component ratio; convergence is declared when the bracket is
/// narrower than `tol * max(1, root)`.
pub fn pf_root_vector(z: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<SquarePfResult> {
    let n = z.len();
    for row in z {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                what: "z row",
                expected: n,
                got: row.len(),
            });
        }
        if row.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::OracleFailed("negative or non-finite z entry".into()));
        }
    }
    if n == 0 {
        return Err(Error::DimensionMismatch {
            what: "z",
            expected: 1,
            got: 0,
        });
    }
    if !is_irreducible_matrix_f64(z) {
        return Err(Error::ReducibleMatrix);
    }

    let max_entry = z
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(0.0_f64, f64::max);
    let mut v = vec![1.0 / n as f64; n];
    let mut best: Option<(f64, f64, Vec<f64>, usize)> = None;
    for it in 0..max_iter {
        // One step of Z + I, i.e. u = Z v + v.
        let mut u = matvec_f64(z, &v);
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui += *vi;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (ui, vi) in u.iter().zip(&v) {
            let ratio = ui / vi;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let root = (lo + hi) / 2.0 - 1.0;
        let width = hi - lo;
        let sum: f64 = u.iter().sum();
        for ui in u.iter_mut() {
            *ui /= sum;
        }
        v = u;
        if best.as_ref().map(|b| width < b.1).unwrap_or(true) {
            best = Some((root, width, v.clone(), it + 1));
        }
        if width <= tol * root.abs().max(1.0) {
            let residual = residual_inf(z, &v, root);
            if root > (n as f64) * max_entry + tol * root.abs().max(1.0) {
                return Err(Error::OracleFailed(format!(
                    "computed root {root} exceeds the n * max-entry bound"
                )));
            }
            return Ok(SquarePfResult {
                root,
                vector: v,
                iterations: it + 1,
                residual,
            });
        }
    }
    let (root, _, vector, iterations) = best.unwrap();
    let residual = residual_inf(z, &vector, root);
    let _ = iterations;
    Err(Error::MaxIterExceeded {
        iterations: max_iter,
        best_root: root,
        residual,
    })
}

fn residual_inf(z: &[Vec<f64>], v: &[f64], root: f64) -> f64 {
    matvec_f64(z, v)
        .iter()
        .zip(v)
        .map(|(zi, vi)| (zi - root * vi).abs())
        .fold(0.0, f64::max)
}

/// Generalized Collatz-Wielandt ratio of an assignment:
/// `max_i total_repression_i / total_support_i` over entities with
/// positive total support.
pub fn collatz_wielandt_ratio(system: &GainSystem, x: &[f64]) -> Result<f64> {
    let (tot_s, tot_r) = system.totals(x)?;
    let mut best: Option<f64> = None;
    for (s, r) in tot_s.iter().zip(&tot_r) {
        if *s != 0.0 {
            let ratio = r / s;
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
    }
    best.ok_or(Error::ZeroSupport)
}

/// Exact characteristic polynomial plus an isolating interval for the
/// largest real root.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRoot {
    /// Monic characteristic polynomial of `Z`, coefficients low to high.
    pub char_poly: Vec<Rat>,
    /// The largest real root lies in `[interval.0, interval.1]`, with
    /// `interval.1 - interval.0` at most the requested precision.
    pub interval: (Rat, Rat),
}

impl ExactRoot {
    pub fn interval_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.interval.0), rat_to_f64(&self.interval.1))
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        let (lo, hi) = self.interval_f64();
        value >= lo - slack && value <= hi + slack
    }
}

/// Exact largest-real-root isolation for a rational matrix of dimension at
/// most `limit`. The characteristic polynomial is expanded exactly and the
/// root isolated by bisection with Sturm-chain counts.
pub fn char_poly_root_exact(z: &RatMatrix, limit: usize, precision: &Rat) -> Result<ExactRoot> {
    let n = z.rows();
    if n > limit {
        return Err(Error::DegreeOverLimit { n, limit });
    }
    if z.cols() != n || n == 0 {
        return Err(Error::DimensionMismatch {
            what: "z",
            expected: n.max(1),
            got: z.cols(),
        });
    }
    let char_poly = poly::char_poly(z);
    // Gershgorin: every eigenvalue satisfies |t| <= max absolute row sum,
    // a much tighter start than the generic coefficient bound.
    let mut row_sum_bound = Rat::zero();
    for i in 0..n {
        let s = z
            .row(i)
            .iter()
            .fold(Rat::zero(), |acc, v| acc + v.abs());
        if s > row_sum_bound {
            row_sum_bound = s;
        }
    }
    row_sum_bound += Rat::one();
    let interval =
        poly::isolate_largest_real_root_bounded(&char_poly, precision, Some(row_sum_bound))
            .ok_or_else(|| {
                Error::OracleFailed("characteristic polynomial has no real root".into())
            })?;
    Ok(ExactRoot {
        char_poly,
        interval,
    })
}

/// Exact polynomial arithmetic: characteristic polynomials by
/// evaluation-interpolation over Bareiss determinants, and Sturm-chain
/// root isolation.
pub mod poly {
    use super::*;

    /// Determinant by Bareiss-style fraction elimination.
    pub fn determinant(m: &RatMatrix) -> Rat {
        let n = m.rows();
        assert_eq!(n, m.cols(), "determinant needs a square matrix");
        if n == 0 {
            return Rat::one();
        }
        let mut a: Vec<Vec<Rat>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut sign = false;
        let mut prev = Rat::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = !sign;
                    }
                    None => return Rat::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if sign {
            -det
        } else {
            det
        }
    }

    /// Monic characteristic polynomial `det(t I - Z)`, coefficients low to
    /// high, via evaluation at `n + 1` integer points and Lagrange
    /// interpolation.
    pub fn char_poly(z: &RatMatrix) -> Vec<Rat> {
        let n = z.rows();
        let points: Vec<Rat> = (0..=n as i64).map(rat_int).collect();
        let values: Vec<Rat> = points
            .iter()
            .map(|t| {
                let mut m = RatMatrix::zero(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let v = if i == j {
                            t - z.get(i, j)
                        } else {
                            -z.get(i, j).clone()
                        };
                        m.set(i, j, v);
                    }
                }
                determinant(&m)
            })
            .collect();
        interpolate(&points, &values)
    }

    fn interpolate(points: &[Rat], values: &[Rat]) -> Vec<Rat> {
        let n = points.len();
        let mut acc = vec![Rat::zero(); n];
        for i in 0..n {
            // Basis polynomial prod_{j != i} (t - x_j) / (x_i - x_j).
            let mut basis = vec![Rat::zero(); n];
            basis[0] = Rat::one();
            let mut degree = 0;
            let mut denom = Rat::one();
            for j in 0..n {
                if j == i {
                    continue;
                }
                denom *= &points[i] - &points[j];
                // Multiply basis by (t - x_j).
                for k in (0..=degree).rev() {
                    let coeff = basis[k].clone();
                    basis[k + 1] += &coeff;
                    basis[k] = -&coeff * &points[j];
                }
                degree += 1;
            }
            let scale = &values[i] / denom;
            for (a, b) in acc.iter_mut().zip(&basis) {
                *a += b * &scale;
            }
        }
        acc
    }

    pub fn eval(p: &[Rat], x: &Rat) -> Rat {
        p.iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    fn degree(p: &[Rat]) -> usize {
        p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
        while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
            p.pop();
        }
        p
    }

    fn derivative(p: &[Rat]) -> Vec<Rat> {
        if p.len() <= 1 {
            return vec![Rat::zero()];
        }
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rat_int(k as i64))
            .collect()
    }

    /// Remainder of polynomial division.
    fn rem(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
        let dd = degree(den);
        let lead = den[dd].clone();
        let mut r = num.to_vec();
        while degree(&r) >= dd && !(degree(&r) == 0 && r[0].is_zero()) {
            let dr = degree(&r);
            if dr < dd {
                break;
            }
            let factor = &r[dr] / &lead;
            let shift = dr - dd;
            for k in 0..=dd {
                let delta = &den[k] * &factor;
                r[k + shift] -= delta;
            }
            r = trim(r);
            if degree(&r) == 0 && r[0].is_zero() {
                break;
            }
        }
        r
    }

    fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !(degree(&b) == 0 && b[0].is_zero()) {
            let r = rem(&a, &b);
            a = b;
            b = trim(r);
        }
        // Normalize to a monic polynomial.
        let lead = a[degree(&a)].clone();
        if !lead.is_zero() && !lead.is_one() {
            for c in &mut a {
                *c /= &lead;
            }
        }
        a
    }

    /// Exact division of `num` by `den` (must divide evenly).
    fn div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
        let dd = degree(den);
        let dn = degree(num);
        let lead = den[dd].clone();
        let mut r = num.to_vec();
        let mut q = vec![Rat::zero(); dn - dd + 1];
        for shift in (0..=dn - dd).rev() {
            let dr = dd + shift;
            let factor = &r[dr] / &lead;
            q[shift] = factor.clone();
            for k in 0..=dd {
                let delta = &den[k] * &factor;
                r[k + shift] -= delta;
            }
        }
        q
    }

    /// Squarefree part `p / gcd(p, p')`; multiplicities collapse to one.
    pub fn squarefree(p: &[Rat]) -> Vec<Rat> {
        let g = poly_gcd(p, &derivative(p));
        if degree(&g) == 0 {
            return trim(p.to_vec());
        }
        trim(div_exact(p, &g))
    }

    fn sturm_chain(p: &[Rat]) -> Vec<Vec<Rat>> {
        let mut chain = vec![trim(p.to_vec()), trim(derivative(p))];
        loop {
            let last = &chain[chain.len() - 1];
            if degree(last) == 0 {
                break;
            }
            let prev = &chain[chain.len() - 2];
            let r = rem(prev, last);
            if degree(&r) == 0 && r[0].is_zero() {
                break;
            }
            let neg: Vec<Rat> = r.iter().map(|c| -c.clone()).collect();
            chain.push(trim(neg));
        }
        chain
    }

    fn sign_variations(chain: &[Vec<Rat>], x: &Rat) -> usize {
        let signs: Vec<i8> = chain
            .iter()
            .map(|p| {
                let v = eval(p, x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the open interval `(a, b)`;
    /// `p(a)` and `p(b)` must be nonzero.
    fn count_roots(chain: &[Vec<Rat>], a: &Rat, b: &Rat) -> usize {
        sign_variations(chain, a).saturating_sub(sign_variations(chain, b))
    }

    /// Isolating interval `[lo, hi]` with `hi - lo <= precision` around the
    /// largest real root, or `None` when no real root exists. The interval
    /// degenerates to a point when the root is rational and hit exactly.
    pub fn isolate_largest_real_root(p: &[Rat], precision: &Rat) -> Option<(Rat, Rat)> {
        isolate_largest_real_root_bounded(p, precision, None)
    }

    /// Like [`isolate_largest_real_root`], starting from a caller-supplied
    /// bound on the absolute value of every root when one is known.
    pub fn isolate_largest_real_root_bounded(
        p: &[Rat],
        precision: &Rat,
        root_bound: Option<Rat>,
    ) -> Option<(Rat, Rat)> {
        let mut p = squarefree(p);
        if degree(&p) == 0 {
            return None;
        }
        let bound = root_bound.unwrap_or_else(|| {
            // Cauchy bound: all roots lie inside +-(1 + max |c_i|/lead).
            let lead = p[degree(&p)].clone();
            let mut bound = Rat::one();
            for c in &p[..degree(&p)] {
                let v = (c / &lead).abs();
                if v > bound {
                    bound = v;
                }
            }
            bound + Rat::one()
        });
        let mut hi = bound.clone();
        let mut lo = -bound;
        let mut chain = sturm_chain(&p);
        if count_roots(&chain, &lo, &hi) == 0 {
            return None;
        }
        let two = rat_int(2);
        loop {
            if count_roots(&chain, &lo, &hi) == 1 && (&hi - &lo) <= *precision {
                return Some((lo, hi));
            }
            let mid = (&lo + &hi) / &two;
            if eval(&p, &mid).is_zero() {
                // Exact root found; the squarefree part splits cleanly.
                let linear = vec![-mid.clone(), Rat::one()];
                let q = trim(div_exact(&p, &linear));
                if degree(&q) == 0 {
                    return Some((mid.clone(), mid));
                }
                let q_chain = sturm_chain(&q);
                if count_roots(&q_chain, &mid, &hi) == 0 {
                    return Some((mid.clone(), mid));
                }
                // Larger roots remain: continue on the deflated polynomial.
                p = q;
                chain = q_chain;
                lo = mid;
            } else if count_roots(&chain, &mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}
