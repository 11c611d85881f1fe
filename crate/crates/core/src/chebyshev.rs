//! Chebyshev polynomials and the shifted polynomial behind the estimator weights.
//!
//! `P_L(x) = -T_L((2x - r - l)/(r - l)) / T_L(-(r + l)/(r - l)) = sum_j a_j x^j` is the
//! degree-`L` polynomial with `P_L(0) = -1` that deviates least from zero on
//! `[l, r]`. The estimator weights are `g_L(j) = a_j j! / n^j + 1`.
//!
//! The monomial coefficients alternate in sign and nearly cancel, so they are computed
//! in exact rational arithmetic from the exact values of `l` and `r` and rounded once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{exact_factorial, exact_int, fast_two_sum, two_prod, two_sum, Scalar};

/// `T_L(x)` for any real `x`.
///
/// Uses `cos(L arccos x)` on `[-1, 1]` and `(z^L + z^-L)/2` with `z + 1/z = 2|x|`
/// outside, applying `T_L(-x) = (-1)^L T_L(x)` for `x < -1`.
pub fn cheb_eval<T: Scalar>(degree: usize, x: T) -> T {
    let one = T::one();
    if x.abs() <= one {
        return (T::from_usize(degree).unwrap() * x.acos()).cos();
    }
    let ax = x.abs();
    // larger root of z^2 - 2|x| z + 1 = 0
    let z = ax + (ax * ax - one).sqrt();
    let l = degree as i32;
    let v = (z.powi(l) + z.powi(-l)) / T::from_f64_lossy(2.0);
    if x < T::zero() && degree % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `[T_L(x), T_L'(x), ..., T_L^{(jmax)}(x)]`, computed exactly and rounded.
pub fn cheb_derivatives<T: Scalar>(degree: usize, x: T, jmax: usize) -> Result<Vec<T>> {
    if jmax > degree {
        return Err(Error::param(format!(
            "derivative order {jmax} exceeds degree {degree}"
        )));
    }
    let xq = x
        .to_exact()
        .ok_or_else(|| Error::param("Chebyshev argument must be finite"))?;
    Ok(cheb_derivatives_exact(degree, &xq, jmax)
        .iter()
        .map(T::from_exact)
        .collect())
}

/// Differentiated three-term recurrence
/// `T_{m+1}^{(j)} = 2x T_m^{(j)} + 2j T_m^{(j-1)} - T_{m-1}^{(j)}` in rationals.
pub(crate) fn cheb_derivatives_exact(degree: usize, x: &BigRational, jmax: usize) -> Vec<BigRational> {
    let zero = BigRational::zero();
    let mut prev = vec![zero.clone(); jmax + 1];
    prev[0] = BigRational::one();
    if degree == 0 {
        return prev;
    }
    let mut cur = vec![zero.clone(); jmax + 1];
    cur[0] = x.clone();
    if jmax >= 1 {
        cur[1] = BigRational::one();
    }
    let two_x = x * BigRational::from_integer(BigInt::from(2));
    for _ in 1..degree {
        let mut next = vec![zero.clone(); jmax + 1];
        for j in 0..=jmax {
            let mut v = &two_x * &cur[j] - &prev[j];
            if j > 0 {
                v += &cur[j - 1] * BigRational::from_integer(BigInt::from(2 * j));
            }
            next[j] = v;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Degree, interval, sample size and the coefficient/weight tables of the estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable<T> {
    degree: usize,
    l: T,
    r: T,
    n: u64,
    a: Vec<T>,
    #[serde(skip)]
    a_lo: Vec<T>,
    g: Vec<T>,
    excess: Vec<T>,
    sup_on_interval: T,
}

impl<T: Scalar> CoefficientTable<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn interval(&self) -> (T, T) {
        (self.l, self.r)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Monomial coefficients `a_0..a_L` of `P_L`; `a_0 = -1`.
    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// Weights `g_L(0..L)`; `g[0] = 0`.
    pub fn g(&self) -> &[T] {
        &self.g
    }

    /// `g_L(j) - 1 = a_j j! / n^j`, rounded directly from the exact value rather than
    /// recovered from `g` by subtraction.
    pub fn g_minus_one(&self) -> &[T] {
        &self.excess
    }

    /// Weight applied to symbols seen `j` times (1 beyond the degree).
    pub fn weight(&self, j: u64) -> T {
        if j as usize <= self.degree {
            self.g[j as usize]
        } else {
            T::one()
        }
    }

    /// `max_{[l, r]} |P_L| = 1 / |T_L(-(r + l)/(r - l))|`.
    pub fn sup_on_interval(&self) -> T {
        self.sup_on_interval
    }
}

struct ExactShift {
    a: Vec<BigRational>,
    sup: BigRational,
}

fn exact_shift(degree: usize, l: f64, r: f64) -> Result<ExactShift> {
    if degree == 0 {
        return Err(Error::param("degree must be at least 1"));
    }
    if !(l.is_finite() && r.is_finite() && l > 0.0) {
        return Err(Error::param(format!("interval [{l}, {r}] must be finite with l > 0")));
    }
    if r <= l {
        return Err(Error::DegenerateInterval { l, r });
    }
    let lq = BigRational::from_float(l).unwrap();
    let rq = BigRational::from_float(r).unwrap();
    let width = &rq - &lq;
    let x0 = -(&rq + &lq) / &width;
    let derivs = cheb_derivatives_exact(degree, &x0, degree);
    let t0 = derivs[0].clone();
    let scale = BigRational::from_integer(BigInt::from(2)) / &width;
    let mut a = Vec::with_capacity(degree + 1);
    let mut pow = BigRational::one();
    for (j, d) in derivs.iter().enumerate() {
        let fact = BigRational::from_integer(exact_factorial(j));
        a.push(-(&pow * d) / (&fact * &t0));
        pow *= &scale;
    }
    debug_assert_eq!(a[0], -BigRational::one());
    Ok(ExactShift {
        a,
        sup: BigRational::one() / t0.abs(),
    })
}

fn interval_f64<T: Scalar>(l: T, r: T) -> Result<(f64, f64)> {
    match (l.to_f64(), r.to_f64()) {
        (Some(l), Some(r)) => Ok((l, r)),
        _ => Err(Error::param("interval endpoints must be finite")),
    }
}

/// Monomial coefficients `a_0..a_L` of `P_L` on `[l, r]`:
/// `a_j = -(2/(r - l))^j T_L^{(j)}(x0) / (j! T_L(x0))` with `x0 = -(r + l)/(r - l)`.
pub fn shifted_coeffs<T: Scalar>(degree: usize, l: T, r: T) -> Result<Vec<T>> {
    let (lf, rf) = interval_f64(l, r)?;
    Ok(exact_shift(degree, lf, rf)?.a.iter().map(T::from_exact).collect())
}

/// Builds the full [`CoefficientTable`] for degree `L`, interval `[l, r]` and sample
/// size `n`.
pub fn g_table<T: Scalar>(degree: usize, l: T, r: T, n: u64) -> Result<CoefficientTable<T>> {
    if n == 0 {
        return Err(Error::param("sample size n must be at least 1"));
    }
    let (lf, rf) = interval_f64(l, r)?;
    let shift = exact_shift(degree, lf, rf)?;
    let (a_hi, a_lo) = split_exact(&shift.a);
    let nq = exact_int(n);
    let mut npow = BigRational::one();
    let mut excess = Vec::with_capacity(degree + 1);
    let mut g = Vec::with_capacity(degree + 1);
    for (j, aj) in shift.a.iter().enumerate() {
        let e = aj * BigRational::from_integer(exact_factorial(j)) / &npow;
        g.push(T::from_exact(&(&e + BigRational::one())));
        excess.push(T::from_exact(&e));
        npow *= &nq;
    }
    Ok(CoefficientTable {
        degree,
        l,
        r,
        n,
        a: a_hi,
        a_lo,
        g,
        excess,
        sup_on_interval: T::from_exact(&shift.sup),
    })
}

// Each exact coefficient as an unevaluated sum hi + lo of two working-precision values.
fn split_exact<T: Scalar>(exact: &[BigRational]) -> (Vec<T>, Vec<T>) {
    exact
        .iter()
        .map(|q| {
            let hi = T::from_exact(q);
            let lo = match hi.to_exact() {
                Some(h) => T::from_exact(&(q - h)),
                None => T::zero(),
            };
            (hi, lo)
        })
        .unzip()
}

/// `P_L(x)` from the monomial coefficients by Horner's scheme.
///
/// The recurrence runs in double-word arithmetic on the double-word coefficients, so
/// the cancellation between alternating terms does not leak into the result.
pub fn poly_eval<T: Scalar>(table: &CoefficientTable<T>, x: T) -> T {
    let mut hi = T::zero();
    let mut lo = T::zero();
    for (&ah, &al) in table.a.iter().zip(&table.a_lo).rev() {
        let (p, mut pe) = two_prod(hi, x);
        pe = pe + lo * x;
        let (s, se) = two_sum(p, ah);
        let (h, l) = fast_two_sum(s, se + pe + al);
        hi = h;
        lo = l;
    }
    hi + lo
}

/// `P_L(x)` through the shifted Chebyshev form, independent of the coefficients.
pub fn poly_eval_direct<T: Scalar>(table: &CoefficientTable<T>, x: T) -> T {
    let (l, r) = (table.l, table.r);
    let two = T::from_f64_lossy(2.0);
    let num = cheb_eval(table.degree, (two * x - r - l) / (r - l));
    let den = cheb_eval(table.degree, -(r + l) / (r - l));
    -num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    // Oracle: monomial coefficients of T_L from c_{m+1} = 2x c_m - c_{m-1}.
    fn chebyshev_monomials(degree: usize) -> Vec<BigRational> {
        let mut prev = vec![BigRational::one()];
        if degree == 0 {
            return prev;
        }
        let mut cur = vec![BigRational::zero(), BigRational::one()];
        for _ in 1..degree {
            let mut next = vec![BigRational::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c * q(2, 1);
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    fn poly_at(coeffs: &[BigRational], x: &BigRational) -> BigRational {
        coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn derivative(coeffs: &[BigRational]) -> Vec<BigRational> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64, 1))
            .collect()
    }

    // Oracle: expand -T_L((2x - r - l)/(r - l)) / T_L(-(r + l)/(r - l)) symbolically.
    fn expanded_shift(degree: usize, l: &BigRational, r: &BigRational) -> Vec<BigRational> {
        let t = chebyshev_monomials(degree);
        let w = r - l;
        // affine y = alpha x + beta
        let alpha = q(2, 1) / &w;
        let beta = -(r + l) / &w;
        let mut out = vec![BigRational::zero()];
        for c in t.iter().rev() {
            // out = out * (alpha x + beta) + c
            let mut next = vec![BigRational::zero(); out.len() + 1];
            for (i, o) in out.iter().enumerate() {
                next[i] += o * &beta;
                next[i + 1] += o * &alpha;
            }
            next[0] += c;
            out = next;
        }
        out.pop();
        let denom = poly_at(&t, &beta);
        out.iter().map(|c| -c / &denom).collect()
    }

    #[test]
    fn eval_examples() {
        for l in 0..10 {
            assert!((cheb_eval(l, 1.0_f64) - 1.0).abs() < 1e-15);
        }
        assert!((cheb_eval(2, 0.5_f64) + 0.5).abs() < 1e-15);
        assert!((cheb_eval(2, -2.0_f64) - 7.0).abs() < 1e-12);
        assert!((cheb_eval(3, -2.0_f64) + 26.0).abs() < 1e-12);
        assert!((cheb_eval(3, 2.0_f32) - 26.0).abs() < 1e-4);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(cheb_derivatives(2, -2.0_f64, 1).unwrap(), vec![7.0, -8.0]);
        assert_eq!(cheb_derivatives(1, 5.0_f64, 1).unwrap(), vec![5.0, 1.0]);
        assert!(cheb_derivatives(2, 0.0_f64, 3).is_err());
    }

    #[test]
    fn degree_six_derivatives_match_monomial_oracle() {
        let x = q(-3, 1);
        let mut coeffs = chebyshev_monomials(6);
        let mut want = Vec::new();
        for _ in 0..=6 {
            want.push(poly_at(&coeffs, &x).to_f64().unwrap());
            coeffs = derivative(&coeffs);
        }
        // T_6(-3) = 19601
        assert_eq!(want[0], 19601.0);
        assert_eq!(cheb_derivatives(6, -3.0_f64, 6).unwrap(), want);
    }

    #[test]
    fn linear_closed_form() {
        let (l, r) = (0.02_f64, 0.1_f64);
        let a = shifted_coeffs(1, l, r).unwrap();
        assert_eq!(a[0], -1.0);
        assert!((a[1] - 2.0 / (r + l)).abs() < 1e-13);

        let t = g_table(1, l, r, 100).unwrap();
        assert_eq!(t.g()[0], 0.0);
        assert!((t.g()[1] - 7.0 / 6.0).abs() < 1e-12);
        assert!(poly_eval(&t, (r + l) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_matches_symbolic_expansion() {
        let want = expanded_shift(2, &q(1, 10), &q(3, 10));
        assert_eq!(want, vec![q(-1, 1), q(80, 7), q(-200, 7)]);
        let got = shifted_coeffs(2, 0.1_f64, 0.3).unwrap();
        for (g, w) in got.iter().zip(&want) {
            let w = w.to_f64().unwrap();
            assert!((g - w).abs() <= 1e-12 * w.abs(), "{g} vs {w}");
        }
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(matches!(
            shifted_coeffs(3, 0.2_f64, 0.2),
            Err(Error::DegenerateInterval { .. })
        ));
        assert!(shifted_coeffs(3, 0.3_f64, 0.2).is_err());
        assert!(shifted_coeffs(0, 0.1_f64, 0.2).is_err());
        assert!(shifted_coeffs(2, 0.0_f64, 0.2).is_err());
        assert!(g_table(2, 0.1_f64, 0.2, 0).is_err());
    }

    #[test]
    fn figure_one_weights_alternate() {
        let k = 1e6_f64;
        let n = 200_000_u64;
        let table = g_table(6, 1.0 / k, 0.5 * k.ln() / n as f64, n).unwrap();
        let g = table.g();
        assert_eq!(g[0], 0.0);
        for j in 1..6 {
            assert!(g[j] * g[j + 1] < 0.0, "g = {g:?}");
        }
        assert!(g[1] > 0.0);
    }

    #[test]
    fn endpoint_values_and_equioscillation() {
        let (l, r) = (1e-4_f64, 3e-3_f64);
        for degree in 1..=12 {
            let t = g_table(degree, l, r, 5000).unwrap();
            let bound = t.sup_on_interval();
            for x in [l, r] {
                let v = poly_eval_direct(&t, x);
                assert!((v.abs() - bound).abs() <= 1e-12 * bound);
            }
            let m = 100_000;
            let vals: Vec<f64> = (0..=m)
                .map(|i| poly_eval_direct(&t, l + (r - l) * i as f64 / m as f64))
                .collect();
            let max = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            assert!((max - bound).abs() <= 1e-9 * bound);
            let mut extrema = vec![vals[0]];
            for i in 1..m {
                if (vals[i] - vals[i - 1]) * (vals[i + 1] - vals[i]) < 0.0 {
                    extrema.push(vals[i]);
                }
            }
            extrema.push(vals[m]);
            assert_eq!(extrema.len(), degree + 1, "degree {degree}");
            for w in extrema.windows(2) {
                assert!(w[0] * w[1] < 0.0);
            }
            for e in &extrema {
                assert!((e.abs() - bound).abs() <= 1e-6 * bound);
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let t = g_table(3, 0.01_f32, 0.2, 50).unwrap();
        assert_eq!(t.a()[0], -1.0);
        assert_eq!(t.g()[0], 0.0);
        let x = 0.07_f32;
        assert!((poly_eval(&t, x) - poly_eval_direct(&t, x)).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn cos_identity(theta in 0.0f64..std::f64::consts::PI, degree in 0usize..=64) {
            let v = cheb_eval(degree, theta.cos());
            prop_assert!((v - (degree as f64 * theta).cos()).abs() < 1e-12);
        }

        #[test]
        fn coefficient_invariants(
            degree in 1usize..=12,
            l in 1e-7f64..1e-2,
            ratio in 1.5f64..1e3,
            n in 1u64..10_000_000,
        ) {
            let r = l * ratio;
            let t = g_table(degree, l, r, n).unwrap();
            prop_assert_eq!(t.a()[0], -1.0);
            prop_assert_eq!(t.g()[0], 0.0);
            for j in 1..=degree {
                prop_assert!(t.a()[j] != 0.0);
                if j < degree {
                    prop_assert!(t.a()[j] * t.a()[j + 1] < 0.0);
                }
                let fact: f64 = (1..=j).map(|m| m as f64).product();
                let want = t.a()[j] * fact / (n as f64).powi(j as i32);
                prop_assert!((t.g_minus_one()[j] - want).abs() <= 1e-10 * want.abs());
            }
            prop_assert!(t.a()[1] > 0.0);
        }

        #[test]
        fn horner_agrees_with_direct_form(
            degree in 1usize..=12,
            l in 1e-6f64..1e-2,
            ratio in 1.5f64..1e3,
            u in 0.0f64..=1.0,
        ) {
            let r = l * ratio;
            let t = g_table(degree, l, r, 1000).unwrap();
            let x = l + (r - l) * u;
            let h = poly_eval(&t, x);
            let d = poly_eval_direct(&t, x);
            // scale: the sup norm on [l, r] bounds |P_L| there
            prop_assert!((h - d).abs() <= 1e-9 * t.sup_on_interval().max(d.abs()),
                "h={h} d={d}");
            prop_assert_eq!(poly_eval(&t, 0.0), -1.0);
        }
    }
}
