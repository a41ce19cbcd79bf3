//! Figure presets. Ranges the figures leave open (the ω₀/ω_T window, the
//! zA window) are assumptions: ω₀/ω_T ∈ [0.5, 1.5], zA ∈ [0.01, 1].

use super::config::{Axis, AxisName, ConfigError, EnvironmentKind, Rabi, Spacing, SweepSpec};

pub const PRESETS: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14",
    "fig15", "fig16", "fig17", "fig18", "fig19", "fig20", "fig21",
];

fn omega_axis(count: usize) -> Axis {
    Axis::linear(AxisName::Omega0, 0.5, 1.5, count)
}

/// Medium damping of a population/phase figure pair, counted from `first`.
fn pair_gamma(n: u32, first: u32) -> f64 {
    [1e-3, 1e-2, 1e-1][((n - first) / 2) as usize]
}

pub fn preset(name: &str) -> Result<SweepSpec, ConfigError> {
    let number: Option<u32> = name.strip_prefix("fig").and_then(|n| n.parse().ok());
    let mut spec = SweepSpec { preset: Some(name.to_string()), ..SweepSpec::default() };
    match number {
        Some(2) => {
            spec.time = 0.0;
            spec.axes = vec![omega_axis(501)];
        }
        Some(3) => {
            spec.environment = EnvironmentKind::FreeSpace;
            spec.drive.rabi = Rabi::OverVarpi(2.0);
            spec.axes = vec![Axis::linear(AxisName::Time, 0.0, 10.0, 201)];
        }
        Some(n @ 4..=15) => {
            spec.drive.rabi = Rabi::OverVarpi(1.0);
            spec.atom.include_shift = n >= 10;
            spec.medium.gamma = pair_gamma(n, if n >= 10 { 10 } else { 4 });
            spec.axes = vec![omega_axis(201), Axis::linear(AxisName::Time, 0.0, 10.0, 101)];
        }
        Some(n @ 16..=21) => {
            spec.drive.rabi = Rabi::OverVarpi(1.0);
            spec.medium.gamma = pair_gamma(n, 16);
            spec.time = 2.0;
            spec.axes = vec![
                omega_axis(201),
                Axis { name: AxisName::ZA, min: 0.01, max: 1.0, count: 101, spacing: Spacing::Log },
            ];
        }
        _ => {
            let suggestion = PRESETS
                .iter()
                .min_by_key(|p| strsim::levenshtein(name, p))
                .map(|p| p.to_string());
            return Err(ConfigError::UnknownPreset { name: name.to_string(), suggestion });
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn preset_parameters() {
        let f4 = preset("fig4").unwrap();
        assert_eq!(f4.medium.gamma, 1e-3);
        assert_eq!(f4.drive.rabi, Rabi::OverVarpi(1.0));
        assert!(!f4.atom.include_shift);
        assert_eq!(preset("fig6").unwrap().medium.gamma, 1e-2);
        assert_eq!(preset("fig9").unwrap().medium.gamma, 1e-1);
        assert!(preset("fig12").unwrap().atom.include_shift);
        assert_eq!(preset("fig21").unwrap().medium.gamma, 1e-1);
        assert!(preset("fig1").is_err());
    }
}
