//! Numerical integration: adaptive Gauss-Kronrod, principal values and a
//! fixed Gauss-Legendre rule for panel moments.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar types the adaptive integrator can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    fn zero() -> Self {
        Self {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

// 15-point Kronrod abscissae (positive half, descending) and weights; the
// odd-indexed entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 8-point Gauss-Legendre rule on [-1, 1].
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn kronrod15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * w;
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).magnitude())
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 7/15 Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a == b {
        return Ok(Estimate::zero());
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 15;
    // Panels too narrow to split further are parked here.
    let mut settled_err = 0.0;

    loop {
        let tol = settings.abs_tol.max(settings.rel_tol * total.magnitude());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
            settled_err += worst.error;
            continue;
        }
        if heap.len() + 2 > settings.max_intervals {
            heap.push(worst);
            let value = heap.iter().fold(T::default(), |acc, p| acc + p.value);
            return Err(Error::Quadrature {
                estimate: value.magnitude(),
                achieved: total_err,
                evaluations,
            });
        }
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + lv + rv;
        total_err = total_err - worst.error + le + re;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
    }

    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().fold(T::default(), |acc, p| acc + p.value);
    let error = heap.iter().map(|p| p.error).sum::<f64>() + settled_err;
    Ok(Estimate { value, error, evaluations })
}

/// Integrates over `[a, b]` with the interval pre-split at every breakpoint
/// that falls strictly inside it.
pub fn integrate_with_breaks<T, F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    settings: &QuadSettings,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut nodes: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut edges = Vec::with_capacity(nodes.len() + 2);
    edges.push(a);
    edges.extend(nodes);
    edges.push(b);

    let mut acc = Estimate::zero();
    for w in edges.windows(2) {
        acc = acc.merge(integrate(&f, w[0], w[1], settings)?);
    }
    Ok(acc)
}

/// Settings for a principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSettings {
    pub quad: QuadSettings,
    /// Largest half-width of the window treated by symmetric subtraction.
    pub half_width: f64,
}

impl Default for PvSettings {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            half_width: 0.05,
        }
    }
}

/// Cauchy principal value of `∫_a^b g(x) / (x - pole) dx`.
///
/// On `[pole - h, pole + h]` the pole is cancelled by folding the window onto
/// itself, `∫_0^h (g(pole + u) - g(pole - u)) / u du`; the remainder is
/// integrated adaptively. `features` lists points where `g` varies sharply;
/// the window never straddles one.
pub fn principal_value<F>(
    g: F,
    pole: f64,
    a: f64,
    b: f64,
    features: &[f64],
    settings: &PvSettings,
) -> Result<Estimate<f64>>
where
    F: Fn(f64) -> f64,
{
    if pole <= a || pole >= b {
        return integrate_with_breaks(|x| g(x) / (x - pole), a, b, features, &settings.quad);
    }

    let scale = pole.abs().max(1.0);
    let mut half = settings.half_width.min(0.5 * (pole - a)).min(0.5 * (b - pole));
    for &feature in features.iter().filter(|&&x| x > a && x < b) {
        let distance = (feature - pole).abs();
        if distance < 1e-9 * scale {
            return Err(Error::PoleOnFeature { pole, feature, distance });
        }
        half = half.min(0.5 * distance);
    }

    let folded = integrate(
        |u: f64| (g(pole + u) - g(pole - u)) / u,
        0.0,
        half,
        &settings.quad,
    )?;
    let left = integrate_with_breaks(|x| g(x) / (x - pole), a, pole - half, features, &settings.quad)?;
    let right = integrate_with_breaks(|x| g(x) / (x - pole), pole + half, b, features, &settings.quad)?;
    Ok(folded.merge(left).merge(right))
}

/// Fixed 8-point Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn gauss_legendre8<T, F>(f: F, a: f64, b: f64) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL8_NODES
        .iter()
        .zip(GL8_WEIGHTS.iter())
        .fold(T::default(), |acc, (&x, &w)| acc + f(center + half * x) * w)
        * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadSettings::default()).unwrap();
        assert!((est.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn narrow_lorentzian_needs_breakpoint_free_adaptivity() {
        let w = 1e-4;
        let est = integrate(
            |x: f64| w / ((x - 0.3).powi(2) + w * w),
            0.0,
            1.0,
            &QuadSettings::default(),
        )
        .unwrap();
        let exact = (0.7 / w).atan() + (0.3 / w).atan();
        assert!((est.value - exact).abs() < 1e-8, "{} vs {}", est.value, exact);
    }

    #[test]
    fn complex_oscillatory_integral() {
        let est = integrate(|x: f64| Complex64::new(0.0, 5.0 * x).exp(), 0.0, PI, &QuadSettings::default())
            .unwrap();
        let exact = (Complex64::new(0.0, 5.0 * PI).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn principal_value_of_reciprocal() {
        // PV ∫_0^2 1/(x-1) dx = 0 and PV ∫_0^3 x/(x-1) dx = 3 + ln 2.
        let s = PvSettings::default();
        let a = principal_value(|_| 1.0, 1.0, 0.0, 2.0, &[], &s).unwrap();
        assert!(a.value.abs() < 1e-12);
        let b = principal_value(|x| x, 1.0, 0.0, 3.0, &[], &s).unwrap();
        assert!((b.value - (3.0 + 2f64.ln())).abs() < 1e-11);
    }

    #[test]
    fn pole_on_feature_is_reported() {
        let err = principal_value(|x| x, 1.0, 0.0, 3.0, &[1.0], &PvSettings::default()).unwrap_err();
        assert!(matches!(err, Error::PoleOnFeature { .. }));
    }

    #[test]
    fn gl8_integrates_degree_15() {
        let v: f64 = gauss_legendre8(|x: f64| x.powi(15) + x.powi(14), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }
}
