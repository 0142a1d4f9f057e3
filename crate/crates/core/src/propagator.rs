//! Time integration of `dR/dt = S(w) R` from a sampled angular-velocity
//! profile.
//!
//! Three steppers are provided so the cost of ignoring the group structure
//! can be measured:
//!
//! | method          | update                              | stays on SO(3) |
//! |-----------------|-------------------------------------|----------------|
//! | `Exponential`   | `R <- exp(S(w dt)) R`               | yes            |
//! | `Euler`         | `R <- (I + S(w dt)) R`              | no, drifts     |
//! | `EulerRenorm`   | Euler, then polar projection        | yes            |
//!
//! The exponential method samples the rate at the step midpoint `t + dt/2`,
//! which makes it second order for time-varying rates. Both Euler variants
//! are classical forward Euler and sample at the step start `t`; sampled at
//! the midpoint, the projected Euler attitude error would itself be second
//! order, since `I + S` differs from `exp(S)` by a symmetric `O(S^2)` factor
//! that projection removes.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{exp_so3_minus_identity, AxisAngle};
use crate::differential::{check_uniform, AngularVelocity};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::so3::{project_to_so3, validate_rotation, RotationMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    ZeroOrderHold,
    #[default]
    Linear,
}

impl Interpolation {
    pub fn name(self) -> &'static str {
        match self {
            Interpolation::ZeroOrderHold => "zoh",
            Interpolation::Linear => "linear",
        }
    }
}

impl FromStr for Interpolation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zoh" | "zero-order-hold" => Ok(Interpolation::ZeroOrderHold),
            "linear" => Ok(Interpolation::Linear),
            other => Err(format!(
                "unknown interpolation '{other}' (expected linear or zoh)"
            )),
        }
    }
}

/// Sampled angular velocity `w(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    samples: Vec<(f64, AngularVelocity)>,
    interpolation: Interpolation,
}

impl RateProfile {
    /// Requires at least one sample, finite values and strictly increasing
    /// times.
    pub fn new(samples: Vec<(f64, AngularVelocity)>, interpolation: Interpolation) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (t, w) in &samples {
            if !t.is_finite() || !w.w.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if let Some(pair) = samples.windows(2).find(|p| !(p[1].0 > p[0].0)) {
            return Err(Error::InvalidProfile(format!(
                "sample times must be strictly increasing ({} then {})",
                pair[0].0, pair[1].0
            )));
        }
        Ok(RateProfile {
            samples,
            interpolation,
        })
    }

    /// A profile holding `w` over `[start, end]`.
    pub fn constant(w: AngularVelocity, start: f64, end: f64) -> Result<Self> {
        if end > start {
            RateProfile::new(vec![(start, w), (end, w)], Interpolation::Linear)
        } else {
            RateProfile::new(vec![(start, w)], Interpolation::Linear)
        }
    }

    /// Samples `f` on `n + 1` evenly spaced points of `[start, end]`.
    pub fn from_fn(
        start: f64,
        end: f64,
        n: usize,
        interpolation: Interpolation,
        f: impl Fn(f64) -> AngularVelocity,
    ) -> Result<Self> {
        let n = n.max(1);
        let h = (end - start) / n as f64;
        let samples = (0..=n)
            .map(|k| {
                let t = if k == n { end } else { start + k as f64 * h };
                (t, f(t))
            })
            .collect();
        RateProfile::new(samples, interpolation)
    }

    pub fn samples(&self) -> &[(f64, AngularVelocity)] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Largest sampled rate magnitude.
    pub fn max_rate(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, w)| w.w.norm())
            .fold(0.0, f64::max)
    }
}

/// Rate at time `t`, which must lie within the profile's sample range.
///
/// Both policies return the stored value exactly at a sample time.
pub fn sample_rate(profile: &RateProfile, t: f64) -> Result<AngularVelocity> {
    let (start, end) = (profile.start(), profile.end());
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    let samples = &profile.samples;
    // index of the last sample with time <= t
    let i = samples.partition_point(|(ts, _)| *ts <= t) - 1;
    let (t0, w0) = samples[i];
    if t == t0 || i + 1 == samples.len() {
        return Ok(w0);
    }
    match profile.interpolation {
        Interpolation::ZeroOrderHold => Ok(w0),
        Interpolation::Linear => {
            let (t1, w1) = samples[i + 1];
            let a = (t - t0) / (t1 - t0);
            Ok(AngularVelocity::from(w0.w + (w1.w - w0.w).scale(a)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exponential,
    Euler,
    EulerRenorm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Exponential, Method::Euler, Method::EulerRenorm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exponential => "exp",
            Method::Euler => "euler",
            Method::EulerRenorm => "euler-renorm",
        }
    }

    /// Where in `[t, t + dt]` the rate is sampled, as a fraction of `dt`.
    pub fn rate_sample_offset(self) -> f64 {
        match self {
            Method::Exponential => 0.5,
            Method::Euler | Method::EulerRenorm => 0.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exp" | "exponential" => Ok(Method::Exponential),
            "euler" => Ok(Method::Euler),
            "euler-renorm" | "euler_renorm" => Ok(Method::EulerRenorm),
            other => Err(format!(
                "unknown method '{other}' (expected exp, euler or euler-renorm)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub r: Mat3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    /// `None` for trajectories of unknown origin.
    pub method: Option<Method>,
    pub dt: f64,
    pub initial: Mat3,
    /// The profile span was not a whole number of steps and the remainder was
    /// dropped.
    pub truncated_span: bool,
}

impl TrajectoryMeta {
    pub fn unknown(dt: f64) -> Self {
        TrajectoryMeta {
            method: None,
            dt,
            initial: Mat3::IDENTITY,
            truncated_span: false,
        }
    }
}

/// Attitude samples on a uniform time grid.
///
/// Matrices are stored as produced; a drifting integrator leaves drifted
/// matrices here and [`drift_report`] measures them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<TrajectorySample>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(samples: Vec<TrajectorySample>, meta: TrajectoryMeta) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if samples.iter().any(|s| !s.t.is_finite() || !s.r.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(pair) = samples.windows(2).find(|p| !(p[1].t > p[0].t)) {
            return Err(Error::NonUniformSampling(format!(
                "times must be strictly increasing ({} then {})",
                pair[0].t, pair[1].t
            )));
        }
        if samples.len() >= 2 {
            check_uniform(samples.iter().map(|s| s.t))?;
        }
        Ok(Trajectory { samples, meta })
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        &self.samples[self.samples.len() - 1]
    }

    /// Grid spacing, measured from the samples when there are at least two.
    pub fn spacing(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            self.meta.dt
        } else {
            (self.last().t - self.first().t) / (n - 1) as f64
        }
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn subsample(&self, stride: usize) -> Result<Trajectory> {
        if stride == 0 {
            return Err(Error::BadStep("stride must be at least 1".into()));
        }
        let samples: Vec<_> = self.samples.iter().step_by(stride).copied().collect();
        let meta = TrajectoryMeta {
            dt: self.meta.dt * stride as f64,
            ..self.meta
        };
        Trajectory::new(samples, meta)
    }
}

fn check_step(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::BadStep(format!(
            "dt must be positive and finite, got {dt}"
        )))
    }
}

/// Exact flow for a rate held constant over the step:
/// `exp(S(w dt)) R`, evaluated as `R + (exp(S(w dt)) - I) R`.
pub fn step_exponential(
    r: &RotationMatrix,
    w: &AngularVelocity,
    dt: f64,
) -> Result<RotationMatrix> {
    check_step(dt)?;
    let phi = AxisAngle::from(w.w.finite()?.scale(dt));
    let delta = exp_so3_minus_identity(&phi, r.tolerance())?;
    let m = *r.matrix();
    validate_rotation(m + delta * m, r.tolerance())
}

/// First-order step `(I + S(w dt)) R`. No projection: the output drifts off
/// SO(3) by `O(dt^2)` per step.
pub fn step_euler(r: &Mat3, w: &AngularVelocity, dt: f64) -> Result<Mat3> {
    check_step(dt)?;
    let r = r.finite()?;
    let out = r + crate::algebra::hat(w.w.scale(dt))?.mul_mat(&r);
    out.finite()
}

/// Euler step followed by projection onto SO(3).
pub fn step_euler_renorm(
    r: &RotationMatrix,
    w: &AngularVelocity,
    dt: f64,
) -> Result<RotationMatrix> {
    let raw = step_euler(r.matrix(), w, dt)?;
    project_to_so3(raw, r.tolerance())
}

/// Relative slack within which `span / dt` counts as a whole number of
/// steps. `(pi/2) / (pi/2000)` evaluates to `1000 - 1.1e-13`, for instance.
const STEP_COUNT_REL_TOL: f64 = 1e-12;

/// Number of whole steps of `dt` in `span`, and whether a remainder was
/// dropped.
fn step_count(span: f64, dt: f64) -> (usize, bool) {
    let q = span / dt;
    let nearest = q.round();
    if (q - nearest).abs() <= STEP_COUNT_REL_TOL * nearest.max(1.0) {
        (nearest as usize, false)
    } else {
        (q.floor() as usize, true)
    }
}

/// Integrates the kinematic identity over the profile's span on a uniform
/// grid `t0 + k dt`, stopping at the last full step. The rate for each step
/// is sampled at `t + offset * dt`, see [`Method::rate_sample_offset`].
pub fn propagate(
    r0: &RotationMatrix,
    profile: &RateProfile,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    if profile.samples.is_empty() {
        return Err(Error::EmptyProfile);
    }
    check_step(dt)?;
    let (t0, span) = (profile.start(), profile.end() - profile.start());
    if dt > span * (1.0 + STEP_COUNT_REL_TOL) {
        return Err(Error::BadStep(format!(
            "dt = {dt} exceeds the profile span {span}"
        )));
    }
    let (steps, truncated_span) = step_count(span, dt);

    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(TrajectorySample {
        t: t0,
        r: *r0.matrix(),
    });
    let mut rot = *r0;
    let mut raw = *r0.matrix();
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let ts = (t + method.rate_sample_offset() * dt).min(profile.end());
        let w = sample_rate(profile, ts)?;
        let next = match method {
            Method::Exponential => {
                rot = step_exponential(&rot, &w, dt)?;
                *rot.matrix()
            }
            Method::EulerRenorm => {
                rot = step_euler_renorm(&rot, &w, dt)?;
                *rot.matrix()
            }
            Method::Euler => {
                raw = step_euler(&raw, &w, dt)?;
                raw
            }
        };
        samples.push(TrajectorySample {
            t: t0 + (k + 1) as f64 * dt,
            r: next,
        });
    }
    Trajectory::new(
        samples,
        TrajectoryMeta {
            method: Some(method),
            dt,
            initial: *r0.matrix(),
            truncated_span,
        },
    )
}

/// Orthogonality and determinant defects along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    /// `(t, |R^T R - I|_F, |det R - 1|)` per sample.
    pub per_sample: Vec<(f64, f64, f64)>,
    pub max_ortho_err: f64,
    pub max_det_err: f64,
}

pub fn drift_report(traj: &Trajectory) -> DriftReport {
    let per_sample: Vec<_> = traj
        .samples
        .iter()
        .map(|s| (s.t, s.r.orthogonality_error(), (s.r.det() - 1.0).abs()))
        .collect();
    let max_ortho_err = per_sample.iter().map(|p| p.1).fold(0.0, f64::max);
    let max_det_err = per_sample.iter().map(|p| p.2).fold(0.0, f64::max);
    DriftReport {
        per_sample,
        max_ortho_err,
        max_det_err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{elementary_rotation, exp_so3, Axis};
    use crate::linalg::Vec3;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rz90() -> Mat3 {
        Mat3::from_rows([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    }

    fn ramp(interp: Interpolation) -> RateProfile {
        RateProfile::new(
            vec![
                (0.0, AngularVelocity::ZERO),
                (1.0, AngularVelocity::new(0.0, 0.0, 2.0)),
            ],
            interp,
        )
        .unwrap()
    }

    #[test]
    fn sample_rate_examples() {
        let single = RateProfile::new(
            vec![(0.5, AngularVelocity::new(1.0, 2.0, 3.0))],
            Interpolation::Linear,
        )
        .unwrap();
        assert_eq!(
            sample_rate(&single, 0.5).unwrap(),
            AngularVelocity::new(1.0, 2.0, 3.0)
        );
        assert_eq!(
            sample_rate(&ramp(Interpolation::Linear), 0.25).unwrap(),
            AngularVelocity::new(0.0, 0.0, 0.5)
        );
        assert_eq!(
            sample_rate(&ramp(Interpolation::ZeroOrderHold), 0.25).unwrap(),
            AngularVelocity::ZERO
        );
        for interp in [Interpolation::Linear, Interpolation::ZeroOrderHold] {
            let p = ramp(interp);
            assert_eq!(
                sample_rate(&p, 1.0).unwrap(),
                AngularVelocity::new(0.0, 0.0, 2.0)
            );
            assert_eq!(sample_rate(&p, 0.0).unwrap(), AngularVelocity::ZERO);
            assert!(matches!(
                sample_rate(&p, 1.5),
                Err(Error::OutOfRange { .. })
            ));
            assert!(matches!(
                sample_rate(&p, -0.1),
                Err(Error::OutOfRange { .. })
            ));
        }
    }

    #[test]
    fn profile_validation() {
        assert_eq!(
            RateProfile::new(vec![], Interpolation::Linear),
            Err(Error::EmptyProfile)
        );
        let w = AngularVelocity::ZERO;
        assert!(matches!(
            RateProfile::new(vec![(0.0, w), (0.0, w)], Interpolation::Linear),
            Err(Error::InvalidProfile(_))
        ));
        assert_eq!(
            RateProfile::new(vec![(f64::NAN, w)], Interpolation::Linear),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn exponential_step_examples() {
        let w = AngularVelocity::new(0.0, 0.0, 1.0);
        let r = step_exponential(&RotationMatrix::IDENTITY, &w, FRAC_PI_2).unwrap();
        assert!(r.matrix().distance(&rz90()) <= 1e-15);

        let r0 = exp_so3(&AxisAngle::new(0.3, 0.2, -0.9)).unwrap();
        assert_eq!(
            step_exponential(&r0, &AngularVelocity::ZERO, 0.37).unwrap(),
            r0
        );

        let w = AngularVelocity::new(0.4, -1.1, 0.8);
        let two = step_exponential(&step_exponential(&r0, &w, 0.05).unwrap(), &w, 0.05).unwrap();
        let one = step_exponential(&r0, &w, 0.1).unwrap();
        assert!(two.matrix().distance(one.matrix()) <= 1e-13);

        assert!(matches!(
            step_exponential(&r0, &w, 0.0),
            Err(Error::BadStep(_))
        ));
    }

    #[test]
    fn euler_step_examples() {
        let r0 = *exp_so3(&AxisAngle::new(0.3, 0.2, -0.9)).unwrap().matrix();
        assert_eq!(step_euler(&r0, &AngularVelocity::ZERO, 0.01).unwrap(), r0);
        let r = step_euler(&Mat3::IDENTITY, &AngularVelocity::new(0.0, 0.0, 1.0), 1e-3).unwrap();
        assert_eq!(
            r,
            Mat3::from_rows([[1.0, -1e-3, 0.0], [1e-3, 1.0, 0.0], [0.0, 0.0, 1.0]])
        );
        // (I + S)^T (I + S) - I = S^T S; for a unit rate, |S^T S|_F = sqrt(2) dt^2.
        let w = Vec3::new(1.0, 2.0, -2.0).scale(1.0 / 3.0);
        let r = step_euler(&Mat3::IDENTITY, &AngularVelocity::from(w), 1e-3).unwrap();
        let err = r.orthogonality_error();
        let s = crate::algebra::hat(w.scale(1e-3)).unwrap().matrix();
        let oracle = (s.transpose() * s).frobenius_norm();
        assert!((err - oracle).abs() <= 1e-15);
        assert!((err / 1e-6 - 2f64.sqrt()).abs() <= 1e-6);
    }

    #[test]
    fn renorm_step_examples() {
        let r0 = exp_so3(&AxisAngle::new(-0.6, 1.2, 0.1)).unwrap();
        let same = step_euler_renorm(&r0, &AngularVelocity::ZERO, 0.05).unwrap();
        assert!(same.matrix().distance(r0.matrix()) <= 1e-14);

        let w = AngularVelocity::new(0.0, 0.0, 1.0);
        let renorm = step_euler_renorm(&RotationMatrix::IDENTITY, &w, 1e-3).unwrap();
        let exact = step_exponential(&RotationMatrix::IDENTITY, &w, 1e-3).unwrap();
        assert!(renorm.matrix().distance(exact.matrix()) <= 1e-9);
    }

    #[test]
    fn propagate_quarter_turn() {
        let w = AngularVelocity::new(0.0, 0.0, 1.0);
        let profile = RateProfile::constant(w, 0.0, FRAC_PI_2).unwrap();
        let dt = PI / 2000.0;
        let traj = propagate(&RotationMatrix::IDENTITY, &profile, dt, Method::Exponential).unwrap();
        assert_eq!(traj.len(), 1001);
        assert!(!traj.meta().truncated_span);
        assert_eq!(traj.first().r, Mat3::IDENTITY);
        assert!(traj.last().r.distance(&rz90()) <= 1e-12);
    }

    #[test]
    fn stationary_profile_stays_put() {
        let r0 = exp_so3(&AxisAngle::new(0.1, 0.2, 0.3)).unwrap();
        let profile = RateProfile::constant(AngularVelocity::ZERO, 0.0, 1.0).unwrap();
        for method in Method::ALL {
            let traj = propagate(&r0, &profile, 0.1, method).unwrap();
            assert_eq!(traj.len(), 11);
            for s in traj.samples() {
                match method {
                    Method::EulerRenorm => assert!(s.r.distance(r0.matrix()) <= 1e-14),
                    _ => assert_eq!(s.r, *r0.matrix()),
                }
            }
        }
    }

    #[test]
    fn span_truncation() {
        let profile = RateProfile::constant(AngularVelocity::new(0.0, 0.0, 1.0), 0.0, 1.0).unwrap();
        let traj = propagate(&RotationMatrix::IDENTITY, &profile, 0.3, Method::Euler).unwrap();
        assert_eq!(traj.len(), 4);
        assert!(traj.meta().truncated_span);
        let whole = propagate(&RotationMatrix::IDENTITY, &profile, 0.1, Method::Euler).unwrap();
        assert_eq!(whole.len(), 11);
        assert!(!whole.meta().truncated_span);
    }

    #[test]
    fn propagate_rejects_bad_steps() {
        let profile = RateProfile::constant(AngularVelocity::ZERO, 0.0, 1.0).unwrap();
        let r0 = RotationMatrix::IDENTITY;
        for dt in [0.0, -1e-3, 1.5, f64::NAN] {
            assert!(matches!(
                propagate(&r0, &profile, dt, Method::Exponential),
                Err(Error::BadStep(_))
            ));
        }
        let single = RateProfile::constant(AngularVelocity::ZERO, 0.0, 0.0).unwrap();
        assert!(matches!(
            propagate(&r0, &single, 1e-3, Method::Exponential),
            Err(Error::BadStep(_))
        ));
    }

    #[test]
    fn euler_drift_over_ten_thousand_steps() {
        let profile =
            RateProfile::constant(AngularVelocity::new(0.0, 0.0, 1.0), 0.0, 10.0).unwrap();
        let traj = propagate(&RotationMatrix::IDENTITY, &profile, 1e-3, Method::Euler).unwrap();
        assert_eq!(traj.len(), 10_001);
        let drift = drift_report(&traj);
        assert!(drift.max_ortho_err >= 1e-4 && drift.max_ortho_err <= 1e-1);
    }

    #[test]
    fn drift_report_examples() {
        let rz = *elementary_rotation(Axis::Z, 0.7).unwrap().matrix();
        let traj = Trajectory::new(
            vec![
                TrajectorySample {
                    t: 0.0,
                    r: Mat3::IDENTITY,
                },
                TrajectorySample { t: 1.0, r: rz },
            ],
            TrajectoryMeta::unknown(1.0),
        )
        .unwrap();
        assert!(drift_report(&traj).max_ortho_err <= 1e-12);

        // (1+e)^2 - 1 = 2e + e^2 on a single diagonal entry.
        let e = 1e-6;
        let mut rows = Mat3::IDENTITY.rows();
        rows[0][0] += e;
        let traj = Trajectory::new(
            vec![TrajectorySample {
                t: 0.0,
                r: Mat3(rows),
            }],
            TrajectoryMeta::unknown(1.0),
        )
        .unwrap();
        let rep = drift_report(&traj);
        assert!((rep.max_ortho_err - (2.0 * e + e * e)).abs() <= 1e-15);
        assert!((rep.max_det_err - e).abs() <= 1e-15);
        assert_eq!(rep.per_sample.len(), 1);
    }

    #[test]
    fn empty_trajectory_is_rejected() {
        assert!(Trajectory::new(vec![], TrajectoryMeta::unknown(1.0)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("rk4".parse::<Method>().is_err());
        assert_eq!(
            "zoh".parse::<Interpolation>().unwrap(),
            Interpolation::ZeroOrderHold
        );
    }
}
