//! Laplace-inversion solutions of the Markov amplitude equations.

use num_complex::Complex64;

use super::{AmplitudePair, CharacteristicRoots, Damping, DriveParams, InitialState, DEGENERACY_TOL};
use crate::surface::MarkovKernel;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Roots of s² + (d + iΔ)s + (iΔd + Ω²/4) = 0, ordered by (Re, Im).
pub(crate) fn roots(damping: Damping, drive: &DriveParams, scale: f64) -> CharacteristicRoots {
    let d = damping.0;
    let delta = I * drive.detuning;
    let half_sum = -(d + delta) * 0.5;
    let disc = ((d - delta) * 0.5).powi(2) - 0.25 * drive.rabi * drive.rabi;
    let root = disc.sqrt();
    let (mut r1, mut r2) = (half_sum + root, half_sum - root);
    if (r2.re, r2.im) < (r1.re, r1.im) {
        std::mem::swap(&mut r1, &mut r2);
    }
    let reference = r1.norm().max(r2.norm()).max(scale);
    CharacteristicRoots {
        r1,
        r2,
        degenerate: (r1 - r2).norm() < DEGENERACY_TOL * reference,
    }
}

pub fn roots_free(gamma0: f64, drive: &DriveParams) -> CharacteristicRoots {
    roots(Damping::free(gamma0), drive, gamma0)
}

pub fn roots_dielectric(kernel: &MarkovKernel, drive: &DriveParams) -> CharacteristicRoots {
    roots(Damping::from_kernel(kernel), drive, 1.0)
}

/// (e^{z} − 1)/z, accurate near z = 0.
pub(crate) fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..24 {
            term = term * z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// (e^{r1 t} − e^{r2 t}) / (r1 − r2).
fn divided_exp(r1: Complex64, r2: Complex64, t: f64) -> Complex64 {
    let z = (r1 - r2) * t;
    if z.norm() < 0.5 {
        (r2 * t).exp() * phi1(z) * t
    } else {
        ((r1 * t).exp() - (r2 * t).exp()) / (r1 - r2)
    }
}

/// Amplitudes at time `t` for damping `d`, given the characteristic roots.
///
/// Distinct roots use the two-pole residue sums written in divided-difference
/// form; a double root switches to the confluent form
/// `e^{xt}[C(0) + t·N(x)]`.
pub fn amplitudes(
    t: f64,
    ic: &InitialState,
    damping: Damping,
    drive: &DriveParams,
    roots: &CharacteristicRoots,
) -> AmplitudePair {
    let d = damping.0;
    let half_rabi = 0.5 * drive.rabi;
    let pump_up = I * half_rabi * Complex64::from_polar(1.0, -drive.phase);
    let pump_down = I * half_rabi * Complex64::from_polar(1.0, drive.phase);
    let delta = I * drive.detuning;

    // Residue numerators are linear in the root: N(x) = a·x + b.
    let (a2, b2) = (ic.c2, delta * ic.c2 + pump_up * ic.c1);
    let (a1, b1) = (ic.c1, d * ic.c1 + pump_down * ic.c2);

    let (c2, rotated_c1) = if roots.degenerate {
        let x = (roots.r1 + roots.r2) * 0.5;
        let e = (x * t).exp();
        (
            e * (ic.c2 + (a2 * x + b2) * t),
            e * (ic.c1 + (a1 * x + b1) * t),
        )
    } else {
        let (r1, r2) = (roots.r1, roots.r2);
        let e1 = (r1 * t).exp();
        let dd = divided_exp(r1, r2, t);
        let lead = e1 + r2 * dd;
        (a2 * lead + b2 * dd, a1 * lead + b1 * dd)
    };

    AmplitudePair {
        t,
        c1: Complex64::from_polar(1.0, drive.detuning * t) * rotated_c1,
        c2,
    }
}

pub fn amplitudes_free(t: f64, ic: &InitialState, gamma0: f64, drive: &DriveParams) -> AmplitudePair {
    amplitudes(t, ic, Damping::free(gamma0), drive, &roots_free(gamma0, drive))
}

pub fn amplitudes_dielectric(
    t: f64,
    ic: &InitialState,
    kernel: &MarkovKernel,
    drive: &DriveParams,
) -> AmplitudePair {
    amplitudes(t, ic, Damping::from_kernel(kernel), drive, &roots_dielectric(kernel, drive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_vieta(r: &CharacteristicRoots, d: Complex64, drive: &DriveParams) {
        let sum = -(d + I * drive.detuning);
        let prod = I * drive.detuning * d + 0.25 * drive.rabi * drive.rabi;
        let scale = 1.0 + d.norm() + drive.detuning.abs() + drive.rabi;
        assert!((r.r1 + r.r2 - sum).norm() < 1e-12 * scale);
        assert!((r.r1 * r.r2 - prod).norm() < 1e-12 * scale * scale);
    }

    #[test]
    fn double_root_at_rabi_equal_gamma() {
        let r = roots_free(1.0, &DriveParams::resonant(1.0));
        assert!(r.degenerate);
        assert!((r.r1 - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((r.r2 - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn undriven_roots_factorise() {
        let drive = DriveParams::new(0.0, 0.7, 0.0).unwrap();
        let r = roots_free(1.0, &drive);
        assert!(!r.degenerate);
        assert!((r.r1 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((r.r2 - c(0.0, -0.7)).norm() < 1e-15);

        let k = MarkovKernel { varpi: 0.3, shift: 1.5 };
        let r = roots_dielectric(&k, &drive);
        let mut got = [r.r1, r.r2];
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((got[0] - c(-0.6, 1.5)).norm() < 1e-14);
        assert!((got[1] - c(0.0, -0.7)).norm() < 1e-14);
    }

    #[test]
    fn underdamped_roots() {
        // s² + s + 1 = 0 → s = −1/2 ± i√3/2
        let r = roots_free(1.0, &DriveParams::resonant(2.0));
        let h = 3f64.sqrt() / 2.0;
        assert!((r.r1 - c(-0.5, -h)).norm() < 1e-15);
        assert!((r.r2 - c(-0.5, h)).norm() < 1e-15);
    }

    #[test]
    fn dielectric_quadratic_solution() {
        // ϖ = 0.24, δ = 3, Ω = 1, Δ = 0: s² + (0.48 − 3i)s + 1/4 = 0.
        let k = MarkovKernel { varpi: 0.24, shift: 3.0 };
        let drive = DriveParams::resonant(1.0);
        let r = roots_dielectric(&k, &drive);
        let b = c(0.48, -3.0);
        let disc = (b * b - 1.0).sqrt();
        let mut expected = [(-b + disc) * 0.5, (-b - disc) * 0.5];
        expected.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        assert!((r.r1 - expected[0]).norm() < 1e-14);
        assert!((r.r2 - expected[1]).norm() < 1e-14);
        check_vieta(&r, Damping::from_kernel(&k).0, &drive);
        assert!(r.r1.re <= 0.0 && r.r2.re <= 0.0);
    }

    #[test]
    fn vacuum_kernel_roots_match_free_space() {
        let drive = DriveParams::new(0.8, -0.4, 0.3).unwrap();
        let a = roots_free(1.0, &drive);
        let b = roots_dielectric(&MarkovKernel { varpi: 0.5, shift: 0.0 }, &drive);
        assert_eq!(a, b);
    }

    #[test]
    fn initial_condition_is_returned_exactly() {
        let ic = InitialState::new(c(0.3, 0.4), c(-0.5, 0.1)).unwrap();
        let drive = DriveParams::new(1.3, 0.4, 0.2).unwrap();
        let p = amplitudes_free(0.0, &ic, 1.0, &drive);
        assert_eq!((p.c1, p.c2), (ic.c1, ic.c2));
        let k = MarkovKernel { varpi: 0.2, shift: -1.0 };
        let p = amplitudes_dielectric(0.0, &ic, &k, &drive);
        assert_eq!((p.c1, p.c2), (ic.c1, ic.c2));
        let p = amplitudes_free(0.0, &ic, 1.0, &DriveParams::resonant(1.0));
        assert_eq!((p.c1, p.c2), (ic.c1, ic.c2));
    }

    #[test]
    fn confluent_reference_values() {
        // C1(0) = 1, C2(0) = 0, ϑ = 0, Γ₀t = 2: C2 = i/e, C1 = 2/e.
        let ic = InitialState::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let p = amplitudes_free(2.0, &ic, 1.0, &DriveParams::resonant(1.0));
        let e = (-1f64).exp();
        assert!((p.c2 - c(0.0, e)).norm() < 1e-15);
        assert!((p.c1 - c(2.0 * e, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn undriven_decay() {
        let ic = InitialState::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let p = amplitudes_free(t, &ic, 1.0, &DriveParams::resonant(0.0));
            assert!((p.c2.norm() - (-t).exp()).abs() < 1e-15);
            assert_eq!(p.c1, c(0.0, 0.0));
        }
    }

    #[test]
    fn continuity_across_degeneracy_switch() {
        // A root splitting of 1e-9 needs a parameter offset of ~1e-18, below
        // f64 resolution, so the split pair is built directly around the
        // double root of Ω = Γ₀ (its product changes only at O(sep²)).
        let ic = InitialState::equal_superposition();
        let drive = DriveParams::resonant(1.0);
        let x = c(-0.5, 0.0);
        let split = |sep: f64| {
            let h = c(0.0, 0.5 * sep);
            CharacteristicRoots { r1: x - h, r2: x + h, degenerate: false }
        };
        let confluent = roots_free(1.0, &drive);
        assert!(confluent.degenerate);
        for sep in [2.0 * DEGENERACY_TOL, 0.5 * DEGENERACY_TOL] {
            for t in [0.5, 2.0, 7.0] {
                let a = amplitudes(t, &ic, Damping::free(1.0), &drive, &split(sep));
                let b = amplitudes(t, &ic, Damping::free(1.0), &drive, &confluent);
                assert!((a.c1 - b.c1).norm() < 1e-6 && (a.c2 - b.c2).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn vanishing_overdamped_root_does_not_produce_nan() {
        let k = MarkovKernel { varpi: 400.0, shift: 0.0 };
        let p = amplitudes_dielectric(10.0, &InitialState::equal_superposition(), &k, &DriveParams::resonant(400.0));
        assert!(p.c1.is_finite() && p.c2.is_finite());
    }

    proptest! {
        #[test]
        fn vieta_and_stability(
            rabi in 0.0f64..3.0, det in -2.0f64..2.0, varpi in 0.0f64..1.0, shift in -4.0f64..4.0
        ) {
            let drive = DriveParams::new(rabi, det, 0.0).unwrap();
            let k = MarkovKernel { varpi, shift };
            let r = roots_dielectric(&k, &drive);
            check_vieta(&r, Damping::from_kernel(&k).0, &drive);
            prop_assert!(r.r1.re <= 1e-12 && r.r2.re <= 1e-12);

            let r = roots_free(1.0, &drive);
            check_vieta(&r, Damping::free(1.0).0, &drive);
            prop_assert!(r.r1.re <= 1e-12 && r.r2.re <= 1e-12);
        }

        #[test]
        fn pump_phase_leaves_moduli_unchanged(theta in -3.0f64..3.0, rabi in 0.0f64..3.0, t in 0.0f64..10.0) {
            let ic = InitialState::new(c(0.6, 0.2), c(0.0, 0.0)).unwrap();
            let a = amplitudes_free(t, &ic, 1.0, &DriveParams::new(rabi, 0.0, 0.0).unwrap());
            let b = amplitudes_free(t, &ic, 1.0, &DriveParams::new(rabi, 0.0, theta).unwrap());
            prop_assert!((a.c1.norm() - b.c1.norm()).abs() < 1e-12);
            prop_assert!((a.c2.norm() - b.c2.norm()).abs() < 1e-12);
        }
    }
}
