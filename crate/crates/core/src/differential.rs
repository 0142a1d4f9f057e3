//! The differential increment `dR = S(dphi) R`, the rate identity
//! `dR/dt = S(w) R`, and central-difference verification of that identity on
//! sampled trajectories.

use crate::algebra::{hat, infinitesimal_rotation, InfinitesimalRotation};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::propagator::{sample_rate, RateProfile, Trajectory};
use crate::so3::RotationMatrix;

/// Angular velocity in rad/s, expressed in the fixed reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AngularVelocity {
    pub w: Vec3,
}

impl AngularVelocity {
    pub const ZERO: AngularVelocity = AngularVelocity { w: Vec3::ZERO };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        AngularVelocity {
            w: Vec3::new(x, y, z),
        }
    }

    /// Rotation accumulated over `dt` seconds at this rate.
    pub fn over(&self, dt: f64) -> InfinitesimalRotation {
        InfinitesimalRotation::from(self.w.scale(dt))
    }
}

impl From<Vec3> for AngularVelocity {
    fn from(w: Vec3) -> Self {
        AngularVelocity { w }
    }
}

/// Increment of `r` caused by the infinitesimal rotation `d` about the fixed
/// frame: `S(d) R`.
pub fn differential_increment(d: &InfinitesimalRotation, r: &RotationMatrix) -> Result<Mat3> {
    Ok(hat(d.dphi)?.mul_mat(r.matrix()))
}

/// The same increment written through composition, `M(d) R - R` factored as
/// `(M(d) - I) R` with `M` the first-order combined rotation. Agrees with
/// [`differential_increment`] bit for bit: `M(d) - I` reproduces `S(d)`
/// exactly.
pub fn differential_increment_by_composition(
    d: &InfinitesimalRotation,
    r: &RotationMatrix,
) -> Result<Mat3> {
    Ok((infinitesimal_rotation(d)? - Mat3::IDENTITY) * *r.matrix())
}

/// Right-hand side of the kinematic identity, `S(w) R`.
pub fn rotation_rate(w: &AngularVelocity, r: &RotationMatrix) -> Result<Mat3> {
    Ok(hat(w.w)?.mul_mat(r.matrix()))
}

/// Same as [`rotation_rate`] for a matrix that may have drifted off SO(3).
pub fn rotation_rate_raw(w: &AngularVelocity, r: &Mat3) -> Result<Mat3> {
    Ok(hat(w.w)?.mul_mat(&r.finite()?))
}

/// Central-difference residuals of one or more trajectories against the
/// kinematic identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Largest residual over every sample in `per_sample`.
    pub max_residual: f64,
    /// `(t, residual)` for every interior sample, all step sizes concatenated
    /// in the order of `step_sizes`.
    pub per_sample: Vec<(f64, f64)>,
    pub step_sizes: Vec<f64>,
    /// Largest residual at each entry of `step_sizes`.
    pub level_max: Vec<f64>,
    /// Log-log slope of `level_max` against `step_sizes`; present when at
    /// least two distinct step sizes were combined.
    pub estimated_order: Option<f64>,
}

impl ResidualReport {
    /// Merges single-step reports and estimates the convergence order from
    /// their maxima.
    pub fn combine(reports: &[ResidualReport]) -> Result<ResidualReport> {
        if reports.is_empty() {
            return Err(Error::DegenerateInput(
                "no residual reports to combine".into(),
            ));
        }
        let mut out = ResidualReport {
            max_residual: 0.0,
            per_sample: Vec::new(),
            step_sizes: Vec::new(),
            level_max: Vec::new(),
            estimated_order: None,
        };
        for r in reports {
            out.max_residual = out.max_residual.max(r.max_residual);
            out.per_sample.extend_from_slice(&r.per_sample);
            out.step_sizes.extend_from_slice(&r.step_sizes);
            out.level_max.extend_from_slice(&r.level_max);
        }
        if out.step_sizes.len() >= 2 {
            let pairs: Vec<(f64, f64)> = out
                .step_sizes
                .iter()
                .copied()
                .zip(out.level_max.iter().copied())
                .collect();
            out.estimated_order = Some(estimate_convergence_order(&pairs)?);
        }
        Ok(out)
    }
}

/// Relative tolerance on the sample-time grid.
pub const UNIFORM_SPACING_TOL: f64 = 1e-12;

/// Central-difference residual of a uniformly sampled trajectory:
/// for each interior sample `k`,
/// `|(R(t+h) - R(t-h)) / 2h - S(w(t)) R(t)|_F`, with `w(t)` read from
/// `profile`. Endpoints are skipped.
pub fn finite_difference_residual(
    trajectory: &Trajectory,
    profile: &RateProfile,
) -> Result<ResidualReport> {
    let samples = trajectory.samples();
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let h = check_uniform(samples.iter().map(|s| s.t))?;

    let mut per_sample = Vec::with_capacity(samples.len() - 2);
    let mut max_residual: f64 = 0.0;
    for win in samples.windows(3) {
        let (prev, cur, next) = (&win[0], &win[1], &win[2]);
        let w = sample_rate(profile, cur.t)?;
        let central = (next.r - prev.r).scale(1.0 / (2.0 * h));
        let residual = central.distance(&rotation_rate_raw(&w, &cur.r)?);
        max_residual = max_residual.max(residual);
        per_sample.push((cur.t, residual));
    }
    Ok(ResidualReport {
        max_residual,
        per_sample,
        step_sizes: vec![h],
        level_max: vec![max_residual],
        estimated_order: None,
    })
}

/// Checks that `times` form a uniform grid and returns its spacing.
///
/// Each time may deviate from `t0 + k h` by at most
/// [`UNIFORM_SPACING_TOL`] relative to the larger of the time magnitude and
/// the spacing.
pub fn check_uniform(times: impl IntoIterator<Item = f64>) -> Result<f64> {
    let times: Vec<f64> = times.into_iter().collect();
    let n = times.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let t0 = times[0];
    let h = (times[n - 1] - t0) / (n - 1) as f64;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonUniformSampling(format!(
            "non-positive or non-finite spacing {h}"
        )));
    }
    for (k, &t) in times.iter().enumerate() {
        let ideal = t0 + k as f64 * h;
        let scale = h.max(t.abs()).max(t0.abs());
        if !((t - ideal).abs() <= UNIFORM_SPACING_TOL * scale) {
            return Err(Error::NonUniformSampling(format!(
                "sample {k} at t = {t} deviates from the grid point {ideal} (spacing {h})"
            )));
        }
    }
    Ok(h)
}

/// Least-squares slope of `ln(residual)` against `ln(step)`.
pub fn estimate_convergence_order(residuals: &[(f64, f64)]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 (step, residual) pairs, got {}",
            residuals.len()
        )));
    }
    for (i, &(h, r)) in residuals.iter().enumerate() {
        if !(h > 0.0 && h.is_finite() && r > 0.0 && r.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "entry {i}: step {h} and residual {r} must be positive and finite"
            )));
        }
        if residuals[..i].iter().any(|&(g, _)| g == h) {
            return Err(Error::DegenerateInput(format!("duplicate step {h}")));
        }
    }
    let n = residuals.len() as f64;
    let xs: Vec<f64> = residuals.iter().map(|(h, _)| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|(_, r)| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{elementary_rotation, exp_so3, Axis, AxisAngle};
    use crate::propagator::{Interpolation, TrajectoryMeta, TrajectorySample};
    use std::f64::consts::FRAC_PI_4;

    fn rz_trajectory(h: f64, n: usize) -> Trajectory {
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 * h;
                TrajectorySample {
                    t,
                    r: *elementary_rotation(Axis::Z, t).unwrap().matrix(),
                }
            })
            .collect();
        Trajectory::new(samples, TrajectoryMeta::unknown(h)).unwrap()
    }

    fn constant_profile(w: AngularVelocity, end: f64) -> RateProfile {
        RateProfile::new(vec![(0.0, w), (end, w)], Interpolation::Linear).unwrap()
    }

    #[test]
    fn increment_examples() {
        let r = exp_so3(&AxisAngle::new(0.2, -0.4, 1.3)).unwrap();
        assert_eq!(
            differential_increment(&InfinitesimalRotation::default(), &r).unwrap(),
            Mat3::ZERO
        );
        let d = InfinitesimalRotation::new(1e-3, -2e-3, 4e-4);
        assert_eq!(
            differential_increment(&d, &RotationMatrix::IDENTITY).unwrap(),
            hat(d.dphi).unwrap().matrix()
        );

        // S((0,0,1e-3)) * Rz(pi/4), multiplied out by hand.
        let c = FRAC_PI_4.cos();
        let s = FRAC_PI_4.sin();
        let rz = elementary_rotation(Axis::Z, FRAC_PI_4).unwrap();
        let expected = Mat3::from_rows([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]]).scale(1e-3);
        let got = differential_increment(&InfinitesimalRotation::new(0.0, 0.0, 1e-3), &rz).unwrap();
        assert!(got.max_abs_diff(&expected) <= 1e-18);
        let half = 2f64.sqrt() / 2.0;
        let literal =
            Mat3::from_rows([[-half, -half, 0.0], [half, -half, 0.0], [0.0, 0.0, 0.0]]).scale(1e-3);
        assert!(got.max_abs_diff(&literal) <= 1e-18);
    }

    #[test]
    fn both_increment_forms_agree_exactly() {
        let r = exp_so3(&AxisAngle::new(-2.0, 0.1, 0.7)).unwrap();
        let d = InfinitesimalRotation::new(3.3e-3, -1.7e-5, 8.1e-4);
        assert_eq!(
            differential_increment(&d, &r).unwrap(),
            differential_increment_by_composition(&d, &r).unwrap()
        );
    }

    #[test]
    fn rate_examples() {
        let r = exp_so3(&AxisAngle::new(0.5, 0.5, -0.25)).unwrap();
        assert_eq!(
            rotation_rate(&AngularVelocity::ZERO, &r).unwrap(),
            Mat3::ZERO
        );
        let w = AngularVelocity::new(0.3, -1.2, 2.0);
        assert_eq!(
            rotation_rate(&w, &RotationMatrix::IDENTITY).unwrap(),
            hat(w.w).unwrap().matrix()
        );
        // d/dtheta of Rz(theta), differentiated symbolically.
        for theta in [0.0, 0.4, 2.5, -1.0] {
            let (s, c) = f64::sin_cos(theta);
            let expected = Mat3::from_rows([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]]);
            let rz = elementary_rotation(Axis::Z, theta).unwrap();
            let got = rotation_rate(&AngularVelocity::new(0.0, 0.0, 1.0), &rz).unwrap();
            assert!(got.max_abs_diff(&expected) <= 1e-16);
        }
    }

    #[test]
    fn scaling_by_power_of_two_step_is_exact() {
        let r = exp_so3(&AxisAngle::new(1.0, -0.3, 0.2)).unwrap();
        let w = AngularVelocity::new(0.7, 1.9, -0.45);
        for dt in [0.5, 2f64.powi(-10), 2f64.powi(-20)] {
            let inc = differential_increment(&w.over(dt), &r).unwrap();
            assert_eq!(inc.scale(1.0 / dt), rotation_rate(&w, &r).unwrap());
        }
    }

    #[test]
    fn central_difference_on_rz() {
        let h = 1e-3;
        let traj = rz_trajectory(h, 200);
        let profile = constant_profile(AngularVelocity::new(0.0, 0.0, 1.0), 1.0);
        let rep = finite_difference_residual(&traj, &profile).unwrap();
        assert!(rep.max_residual <= 1e-6);
        assert_eq!(rep.per_sample.len(), 198);
        let max = rep.per_sample.iter().map(|p| p.1).fold(0.0, f64::max);
        assert_eq!(max, rep.max_residual);
        assert!(rep.estimated_order.is_none());
    }

    #[test]
    fn halving_step_quarters_residual() {
        let profile = constant_profile(AngularVelocity::new(0.0, 0.0, 1.0), 1.0);
        let coarse = finite_difference_residual(&rz_trajectory(1e-2, 50), &profile).unwrap();
        let fine = finite_difference_residual(&rz_trajectory(5e-3, 100), &profile).unwrap();
        let ratio = coarse.max_residual / fine.max_residual;
        assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
        let both = ResidualReport::combine(&[coarse, fine]).unwrap();
        assert!((both.estimated_order.unwrap() - 2.0).abs() <= 0.1);
    }

    #[test]
    fn constant_trajectory_has_zero_residual() {
        let samples = (0..10)
            .map(|k| TrajectorySample {
                t: k as f64 * 0.1,
                r: Mat3::IDENTITY,
            })
            .collect();
        let traj = Trajectory::new(samples, TrajectoryMeta::unknown(0.1)).unwrap();
        let profile = constant_profile(AngularVelocity::ZERO, 1.0);
        let rep = finite_difference_residual(&traj, &profile).unwrap();
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn too_few_samples() {
        let traj = rz_trajectory(0.1, 2);
        let profile = constant_profile(AngularVelocity::ZERO, 1.0);
        assert_eq!(
            finite_difference_residual(&traj, &profile),
            Err(Error::TooFewSamples { needed: 3, got: 2 })
        );
    }

    #[test]
    fn uniformity_check() {
        assert!(check_uniform([0.0, 0.1, 0.2, 0.30000000000000004]).is_ok());
        assert!(matches!(
            check_uniform([0.0, 0.1, 0.2000001, 0.3]),
            Err(Error::NonUniformSampling(_))
        ));
    }

    #[test]
    fn order_estimates() {
        assert_eq!(
            estimate_convergence_order(&[(1e-2, 1e-4), (1e-3, 1e-6)]).unwrap(),
            2.0
        );
        let c = 3.7;
        let slope = estimate_convergence_order(&[(0.1, c * 0.1), (0.02, c * 0.02)]).unwrap();
        assert!((slope - 1.0).abs() <= 1e-14);
        assert!(estimate_convergence_order(&[(1e-2, 1e-4)]).is_err());
        assert!(estimate_convergence_order(&[(1e-2, 1e-4), (1e-2, 1e-5)]).is_err());
        assert!(estimate_convergence_order(&[(-1e-2, 1e-4), (1e-3, 1e-5)]).is_err());
        assert!(estimate_convergence_order(&[(1e-2, 0.0), (1e-3, 1e-5)]).is_err());
    }
}
