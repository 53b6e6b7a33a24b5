//! Logistic mixing-angle coupling schedule.
//!
//! `θ(t) = (π/2) / (1 + exp(−v(t − 3/v)))`, `g₁ = g_max·sin θ`,
//! `g₂ = g_max·cos θ`. The cavity–phonon coupling `g₁` switches on while the
//! phonon–qubit coupling `γg₂` switches off.

use core::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

/// Default simulation window end, in units of `1/v`.
pub const DEFAULT_WINDOW_FACTOR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    rapidity: f64,
    gamma: f64,
    amplitude: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

impl PulseSchedule {
    /// Schedule with rapidity `v` (1/ns), coupling ratio `γ` and `g_max = 1`.
    pub fn new(rapidity: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            rapidity: positive("v", rapidity)?,
            gamma: positive("gamma", gamma)?,
            amplitude: 1.0,
        })
    }

    /// Override the coupling scale `g_max` (rad/ns).
    pub fn with_amplitude(self, amplitude: f64) -> Result<Self> {
        Ok(Self {
            amplitude: positive("g_max", amplitude)?,
            ..self
        })
    }

    pub fn rapidity(&self) -> f64 {
        self.rapidity
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Logistic midpoint `3/v`, where `θ = π/4`.
    pub fn midpoint(&self) -> f64 {
        3.0 / self.rapidity
    }

    /// `[0, factor/v]`.
    pub fn window(&self, factor: f64) -> (f64, f64) {
        (0.0, factor / self.rapidity)
    }

    fn exponent(&self, t: f64) -> f64 {
        self.rapidity * (t - self.midpoint())
    }

    pub fn theta(&self, t: f64) -> f64 {
        FRAC_PI_2 / (1.0 + libm::exp(-self.exponent(t)))
    }

    /// `θ̇ = (π/2)·v·e^{−x}/(1 + e^{−x})²`, evaluated as `e^{−|x|}` form so it
    /// stays finite for any `t`.
    pub fn theta_rate(&self, t: f64) -> f64 {
        let e = libm::exp(-libm::fabs(self.exponent(t)));
        FRAC_PI_2 * self.rapidity * e / ((1.0 + e) * (1.0 + e))
    }

    /// `(g₁, g₂)`.
    pub fn couplings(&self, t: f64) -> (f64, f64) {
        let theta = self.theta(t);
        (
            self.amplitude * libm::sin(theta),
            self.amplitude * libm::cos(theta),
        )
    }

    /// `(ġ₁, ġ₂)`.
    pub fn coupling_rates(&self, t: f64) -> (f64, f64) {
        let theta = self.theta(t);
        let rate = self.amplitude * self.theta_rate(t);
        (rate * libm::cos(theta), -rate * libm::sin(theta))
    }

    /// `g₀ = √(g₁² + γ²g₂²)`: magnitude of the bright-state eigenvalues.
    pub fn bright_splitting(&self, t: f64) -> f64 {
        let (g1, g2) = self.couplings(t);
        libm::sqrt(g1 * g1 + self.gamma * self.gamma * g2 * g2)
    }

    /// Counter-diabatic amplitude `G = γ(ġ₁g₂ − g₁ġ₂)/g₀²`.
    ///
    /// For this schedule `ġ₁g₂ − g₁ġ₂ = g_max²·θ̇`, so
    /// `G = γθ̇ / (sin²θ + γ²cos²θ)`, independent of `g_max`.
    pub fn cd_amplitude(&self, t: f64) -> f64 {
        let theta = self.theta(t);
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        self.gamma * self.theta_rate(t) / (s * s + self.gamma * self.gamma * c * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_4, PI};
    use proptest::prelude::*;

    #[test]
    fn theta_midpoint_and_origin() {
        for v in [0.25, 0.75, 1.5, 2.0] {
            let p = PulseSchedule::new(v, 20.0).unwrap();
            assert_abs_diff_eq!(p.theta(3.0 / v), FRAC_PI_4, epsilon = 1e-15);
            // (π/2)/(1 + e³), independent of v.
            assert_abs_diff_eq!(p.theta(0.0), 0.074_496_387_382_362_5, epsilon = 1e-15);
        }
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        assert_abs_diff_eq!(p.theta(1e6), FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(p.theta(-1e6), 0.0);
    }

    #[test]
    fn couplings_values() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        let (g1, g2) = p.couplings(p.midpoint());
        assert_abs_diff_eq!(g1, 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g2, 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        let (g1, g2) = p.couplings(0.0);
        assert_abs_diff_eq!(g1, 0.074_427_500_920_954, epsilon = 1e-14);
        assert_abs_diff_eq!(g2, 0.997_226_427_200_293, epsilon = 1e-14);
        let (g1, g2) = p.couplings(1e6);
        assert_abs_diff_eq!(g1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g2, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cd_amplitude_at_midpoint() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        let expected = 15.0 * PI / 1604.0;
        assert_abs_diff_eq!(p.cd_amplitude(p.midpoint()), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.029_379, epsilon = 1e-6);
    }

    #[test]
    fn cd_amplitude_gamma_one_is_theta_rate() {
        let p = PulseSchedule::new(1.3, 1.0).unwrap();
        for t in [-2.0, 0.0, 1.0, 2.3, 5.0, 9.0] {
            assert_abs_diff_eq!(p.cd_amplitude(t), p.theta_rate(t), epsilon = 1e-15);
        }
    }

    #[test]
    fn cd_amplitude_vanishes_far_from_midpoint() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        assert!(p.cd_amplitude(1e4).abs() < 1e-300);
        assert!(p.cd_amplitude(-1e4).abs() < 1e-300);
        assert!(p.theta_rate(-1e6).is_finite());
    }

    #[test]
    fn pulse_ordering_is_counterintuitive() {
        for v in [0.25, 0.75, 1.5, 2.0] {
            let p = PulseSchedule::new(v, 20.0).unwrap();
            let (g1, g2) = p.couplings(0.0);
            assert!(g2 > g1);
            let (g1, g2) = p.couplings(10.0 / v);
            assert!(g1 > g2);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PulseSchedule::new(0.0, 20.0).is_err());
        assert!(PulseSchedule::new(1.0, -1.0).is_err());
        assert!(PulseSchedule::new(f64::NAN, 1.0).is_err());
        assert!(PulseSchedule::new(1.0, 1.0)
            .unwrap()
            .with_amplitude(0.0)
            .is_err());
    }

    /// Finite-difference oracle: G from central differences of (g₁, g₂).
    fn cd_from_differences(p: &PulseSchedule, t: f64, h: f64) -> f64 {
        let (g1p, g2p) = p.couplings(t + h);
        let (g1m, g2m) = p.couplings(t - h);
        let (g1, g2) = p.couplings(t);
        let d1 = (g1p - g1m) / (2.0 * h);
        let d2 = (g2p - g2m) / (2.0 * h);
        p.gamma() * (d1 * g2 - g1 * d2) / (g1 * g1 + p.gamma() * p.gamma() * g2 * g2)
    }

    #[test]
    fn cd_amplitude_matches_finite_differences() {
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let strategy = (0.25f64..2.0, 1.0f64..25.0, 0.5f64..3.0, 0.0f64..1.0);
        runner
            .run(&strategy, |(v, gamma, amp, frac)| {
                let p = PulseSchedule::new(v, gamma)
                    .unwrap()
                    .with_amplitude(amp)
                    .unwrap();
                // Stay where G is not vanishingly small so the relative error is meaningful.
                let t = frac * 9.0 / v;
                let exact = p.cd_amplitude(t);
                let fd = cd_from_differences(&p, t, 1e-5);
                prop_assert!(
                    ((fd - exact) / exact).abs() < 1e-6,
                    "t={t} exact={exact} fd={fd}"
                );
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn coupling_rates_match_finite_differences() {
        let p = PulseSchedule::new(0.9, 7.0)
            .unwrap()
            .with_amplitude(1.7)
            .unwrap();
        for t in [0.0, 1.0, 3.3, 6.0] {
            let (d1, d2) = p.coupling_rates(t);
            let h = 1e-5;
            let (a1, a2) = p.couplings(t + h);
            let (b1, b2) = p.couplings(t - h);
            assert_abs_diff_eq!(d1, (a1 - b1) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(d2, (a2 - b2) / (2.0 * h), epsilon = 1e-8);
        }
    }

    proptest! {
        #[test]
        fn theta_is_strictly_increasing(v in 0.05f64..5.0, t1 in -20.0f64..40.0, dt in 1e-3f64..10.0) {
            let p = PulseSchedule::new(v, 20.0).unwrap();
            let t2 = t1 + dt;
            // Beyond |x| ≈ 36 the logistic saturates in double precision.
            prop_assume!((v * (t2 - 3.0 / v)).abs() < 30.0 && (v * (t1 - 3.0 / v)).abs() < 30.0);
            prop_assert!(p.theta(t2) > p.theta(t1));
            prop_assert!(p.theta(t1) > 0.0 && p.theta(t1) < FRAC_PI_2);
        }

        #[test]
        fn couplings_lie_on_circle(v in 0.05f64..5.0, amp in 0.1f64..10.0, t in -50.0f64..50.0) {
            let p = PulseSchedule::new(v, 3.0).unwrap().with_amplitude(amp).unwrap();
            let (g1, g2) = p.couplings(t);
            prop_assert!((g1 * g1 + g2 * g2 - amp * amp).abs() <= 1e-14 * amp * amp);
        }
    }
}
