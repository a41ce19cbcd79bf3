//! Values frozen from an independent high-precision evaluation (40-digit
//! matrix exponential of the amplitude equations in a rotating frame, and
//! exact rational arithmetic for the near-field formulas).

use num_complex::Complex64;

use halfspace_berry::dynamics::{
    amplitudes_dielectric, amplitudes_free, roots_dielectric, DriveParams, InitialState,
};
use halfspace_berry::permittivity::LorentzMedium;
use halfspace_berry::surface::{
    decay_rate_halfspace, im_green_vacuum, line_shift_halfspace, AtomSurfaceConfig, MarkovKernel,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn half() -> InitialState {
    InitialState::equal_superposition()
}

fn assert_close(got: Complex64, want: Complex64, tol: f64) {
    assert!((got - want).norm() < tol, "got {got}, want {want}");
}

#[test]
fn near_field_rate_and_shift() {
    let cfg = AtomSurfaceConfig::new(1.0, 0.05, LorentzMedium::new(0.5, 1e-2).unwrap());
    assert!((decay_rate_halfspace(&cfg).unwrap() - 0.480_696_558_523_442_3).abs() < 1e-12);
    assert!((line_shift_halfspace(&cfg).unwrap() - 3.004_353_490_771_514_4).abs() < 1e-11);
}

#[test]
fn band_edges_and_surface_resonance() {
    let m = LorentzMedium::new(0.5, 1e-3).unwrap();
    let (lo, hi) = m.band_edges();
    assert_eq!(lo, 1.0);
    assert!((hi - 1.118_033_988_749_894_8).abs() < 1e-15);
    assert!((m.surface_resonance() - 1.060_660_171_779_821_3).abs() < 1e-15);
    assert!((im_green_vacuum(1.0) - 0.053_051_647_697_298_45).abs() < 1e-16);
}

#[test]
fn confluent_free_space_amplitudes() {
    let ic = InitialState::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let a = amplitudes_free(2.0, &ic, 1.0, &DriveParams::resonant(1.0));
    assert_close(a.c1, c(0.735_758_882_342_884_64, 0.0), 1e-14);
    assert_close(a.c2, c(0.0, 0.367_879_441_171_442_32), 1e-14);
}

#[test]
fn detuned_free_space_amplitudes() {
    let ic = InitialState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let a = amplitudes_free(7.5, &ic, 1.0, &DriveParams::new(2.3, -1.1, 0.3).unwrap());
    assert_close(a.c1, c(0.036_466_052_688_134_342, -0.034_121_035_575_260_304), 1e-12);
    assert_close(a.c2, c(0.004_435_568_692_099_564_7, 0.028_232_973_485_286_632), 1e-12);
}

#[test]
fn dielectric_amplitudes_at_the_reference_point() {
    let k = MarkovKernel { varpi: 0.2404, shift: 3.0043 };
    let a = amplitudes_dielectric(5.0, &half(), &k, &DriveParams::resonant(2.0 * 0.2404));
    assert_close(a.c1, c(0.633_101_895_561_719_08, -0.046_080_319_405_001_174), 1e-12);
    assert_close(a.c2, c(-0.106_043_869_699_981_25, 0.051_058_396_354_899_524), 1e-12);
}

#[test]
fn detuned_dielectric_amplitudes() {
    let k = MarkovKernel { varpi: 0.24, shift: 3.0 };
    let a = amplitudes_dielectric(4.0, &half(), &k, &DriveParams::new(1.0, 0.7, -1.2).unwrap());
    assert_close(a.c1, c(0.656_032_017_675_703_46, -0.068_334_695_870_845_84), 1e-12);
    assert_close(a.c2, c(0.134_450_971_926_589_98, 0.061_710_106_100_513_086), 1e-12);
}

#[test]
fn dielectric_roots() {
    let r = roots_dielectric(&MarkovKernel { varpi: 0.24, shift: 3.0 }, &DriveParams::resonant(1.0));
    assert!(!r.degenerate);
    assert_close(r.r1, c(-0.467_941_379_077_878_17, 3.079_353_434_889_076_7), 1e-14);
    assert_close(r.r2, c(-0.012_058_620_922_121_833, -0.079_353_434_889_076_674), 1e-14);
}
