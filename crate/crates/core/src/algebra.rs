//! Static rotation algebra: hat/vee, elementary and frame-derived rotations,
//! fixed-frame composition, infinitesimal rotations and the exp/log bridge.

use std::ops::{Add, Neg};

use crate::error::Result;
use crate::linalg::{Mat3, Vec3};
use crate::so3::{validate_rotation, Frame, RotationMatrix, SkewMatrix, ToleranceConfig};

/// A triple of infinitesimal rotation angles (radians) about the fixed x, y
/// and z axes.
///
/// Nothing caps the magnitude; checks that rely on smallness report the
/// magnitude they assumed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InfinitesimalRotation {
    pub dphi: Vec3,
}

impl InfinitesimalRotation {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        InfinitesimalRotation {
            dphi: Vec3::new(x, y, z),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        InfinitesimalRotation {
            dphi: self.dphi.scale(s),
        }
    }
}

impl From<Vec3> for InfinitesimalRotation {
    fn from(dphi: Vec3) -> Self {
        InfinitesimalRotation { dphi }
    }
}

impl Add for InfinitesimalRotation {
    type Output = InfinitesimalRotation;
    fn add(self, rhs: Self) -> Self {
        InfinitesimalRotation {
            dphi: self.dphi + rhs.dphi,
        }
    }
}

impl Neg for InfinitesimalRotation {
    type Output = InfinitesimalRotation;
    fn neg(self) -> Self {
        InfinitesimalRotation { dphi: -self.dphi }
    }
}

/// Rotation vector: direction is the axis, magnitude the angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisAngle {
    pub phi: Vec3,
}

impl AxisAngle {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        AxisAngle {
            phi: Vec3::new(x, y, z),
        }
    }

    pub fn angle(&self) -> f64 {
        self.phi.norm()
    }
}

impl From<Vec3> for AxisAngle {
    fn from(phi: Vec3) -> Self {
        AxisAngle { phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => Vec3::new(1.0, 0.0, 0.0),
            Axis::Y => Vec3::new(0.0, 1.0, 0.0),
            Axis::Z => Vec3::new(0.0, 0.0, 1.0),
        }
    }
}

/// The skew-symmetric matrix `S(v)` with `S(v) u = v x u`.
pub fn hat(v: Vec3) -> Result<SkewMatrix> {
    Ok(SkewMatrix::from_vector(v.finite()?))
}

/// Inverse of [`hat`]; exact since the skew matrix stores its vector.
pub fn vee(s: &SkewMatrix) -> Vec3 {
    s.vector()
}

/// Right-handed rotation by `angle` radians about a fixed coordinate axis.
pub fn elementary_rotation(axis: Axis, angle: f64) -> Result<RotationMatrix> {
    if !angle.is_finite() {
        return Err(crate::Error::NonFinite);
    }
    let (s, c) = angle.sin_cos();
    let m = match axis {
        Axis::X => Mat3::from_rows([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]),
        Axis::Y => Mat3::from_rows([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]),
        Axis::Z => Mat3::from_rows([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]),
    };
    RotationMatrix::new(m)
}

/// Rotation relating `target` to `reference`: entry `(r, c)` is the dot
/// product of the c-th axis of `target` with the r-th axis of `reference`,
/// so column c is the c-th target axis expressed in reference coordinates.
pub fn rotation_from_frames(
    target: &Frame,
    reference: &Frame,
    tol: &ToleranceConfig,
) -> Result<RotationMatrix> {
    reference.check(tol)?;
    target.check(tol)?;
    let t = [target.i, target.j, target.k];
    let r = [reference.i, reference.j, reference.k];
    let mut rows = [[0.0; 3]; 3];
    for (row, ref_axis) in rows.iter_mut().zip(&r) {
        for (entry, tgt_axis) in row.iter_mut().zip(&t) {
            *entry = tgt_axis.dot(ref_axis);
        }
    }
    validate_rotation(Mat3(rows), tol)
}

/// Composes two rotations taken about the fixed reference frame, `first`
/// applied first: the result is `second * first`.
///
/// The product is re-validated under the looser of the two operands'
/// tolerances.
pub fn compose_fixed(first: &RotationMatrix, second: &RotationMatrix) -> Result<RotationMatrix> {
    let tol = first.tolerance().loosest(second.tolerance());
    validate_rotation(*second.matrix() * *first.matrix(), &tol)
}

/// The first-order combined rotation `I + S(dphi)`,
/// `[[1, -dz, dy], [dz, 1, -dx], [-dy, dx, 1]]`.
///
/// Returned as a plain matrix: it is orthogonal only up to `O(|dphi|^2)`.
pub fn infinitesimal_rotation(d: &InfinitesimalRotation) -> Result<Mat3> {
    let Vec3 { x, y, z } = d.dphi.finite()?;
    Ok(Mat3::from_rows([[1.0, -z, y], [z, 1.0, -x], [-y, x, 1.0]]))
}

/// Composition of infinitesimal rotations: componentwise addition.
pub fn compose_infinitesimal(
    d1: &InfinitesimalRotation,
    d2: &InfinitesimalRotation,
) -> Result<InfinitesimalRotation> {
    d1.dphi.finite()?;
    d2.dphi.finite()?;
    let sum = *d1 + *d2;
    sum.dphi.finite()?;
    Ok(sum)
}

/// Matrix exponential of `hat(phi)` by the Rodrigues formula, with default
/// tolerances.
pub fn exp_so3(phi: &AxisAngle) -> Result<RotationMatrix> {
    exp_so3_with(phi, &ToleranceConfig::default())
}

/// `R = I + a S + b S^2` with `a = sin t / t`, `b = (1 - cos t) / t^2`,
/// `t = |phi|`. Below `small_angle_tol` the Taylor coefficients
/// `1 - t^2/6` and `1/2 - t^2/24` are used.
pub fn exp_so3_with(phi: &AxisAngle, tol: &ToleranceConfig) -> Result<RotationMatrix> {
    let m = Mat3::IDENTITY + exp_so3_minus_identity(phi, tol)?;
    validate_rotation(m, tol)
}

/// `exp(S(phi)) - I = a S + b S^2`, without the identity.
///
/// Adding `I` rounds the diagonal; for a step applied many times that
/// rounding is the same every step and the orthogonality defect grows
/// linearly. Steppers apply `R + (exp(S) - I) R` instead.
pub fn exp_so3_minus_identity(phi: &AxisAngle, tol: &ToleranceConfig) -> Result<Mat3> {
    let s = hat(phi.phi)?.matrix();
    let theta2 = phi.phi.dot(&phi.phi);
    let theta = theta2.sqrt();
    let (a, b) = if theta < tol.small_angle_tol {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        // 1 - cos t = 2 sin^2(t/2), which avoids cancellation for small t.
        let half = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * half * half / theta2)
    };
    Ok(s.scale(a) + (s * s).scale(b))
}

/// Below this cosine the axis is recovered from the symmetric part of R.
const NEAR_PI_COS: f64 = -0.9;
/// Below this sine the rotation counts as exactly half a turn and the axis
/// sign is canonicalized.
const HALF_TURN_SIN: f64 = 1e-12;

/// Canonical rotation vector of `r`, with angle in `[0, pi]`.
///
/// At a half turn the axis sign is fixed so that its first nonzero
/// component is positive.
pub fn log_so3(r: &RotationMatrix) -> AxisAngle {
    let m = r.matrix();
    let tol = r.tolerance();
    // vee of the antisymmetric part: sin(t) * n.
    let s = Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    );
    let cos = (0.5 * (m.trace() - 1.0)).clamp(-1.0, 1.0);
    let sin = s.norm();
    let theta = sin.atan2(cos);

    if theta < tol.small_angle_tol {
        return AxisAngle::from(s.scale(1.0 + theta * theta / 6.0));
    }
    if cos > NEAR_PI_COS {
        return AxisAngle::from(s.scale(theta / sin));
    }

    // (R + R^T)/2 - cos(t) I = (1 - cos t) n n^T; take the best-conditioned
    // column.
    let sym = (*m + m.transpose()).scale(0.5) - Mat3::IDENTITY.scale(cos);
    let k = (0..3)
        .max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)]))
        .unwrap_or(0);
    let col = sym.column(k);
    let mut axis = col.scale(1.0 / col.norm());
    if sin <= HALF_TURN_SIN {
        let lead = axis
            .to_array()
            .into_iter()
            .find(|c| c.abs() > HALF_TURN_SIN)
            .unwrap_or(1.0);
        if lead < 0.0 {
            axis = -axis;
        }
    } else if axis.dot(&s) < 0.0 {
        axis = -axis;
    }
    AxisAngle::from(axis.scale(theta))
}
