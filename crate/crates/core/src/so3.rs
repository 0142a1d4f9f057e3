//! Validated SO(3) value types and projection back onto the group.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};

/// Numerical tolerances used when checking group membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Bound on `|M^T M - I|_F`.
    pub ortho_tol: f64,
    /// Bound on `|det M - 1|`.
    pub det_tol: f64,
    /// Angle (radians) below which exp/log switch to Taylor coefficients.
    pub small_angle_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            ortho_tol: 1e-9,
            det_tol: 1e-9,
            small_angle_tol: 1e-7,
        }
    }
}

impl ToleranceConfig {
    /// Checked constructor; every tolerance must lie in `(0, 1e-2)`.
    pub fn new(ortho_tol: f64, det_tol: f64, small_angle_tol: f64) -> Result<Self> {
        let cfg = ToleranceConfig {
            ortho_tol,
            det_tol,
            small_angle_tol,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        for (name, value) in [
            ("ortho_tol", self.ortho_tol),
            ("det_tol", self.det_tol),
            ("small_angle_tol", self.small_angle_tol),
        ] {
            if !(value > 0.0 && value < 1e-2) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    /// Componentwise loosest of two configurations.
    pub fn loosest(&self, other: &ToleranceConfig) -> ToleranceConfig {
        ToleranceConfig {
            ortho_tol: self.ortho_tol.max(other.ortho_tol),
            det_tol: self.det_tol.max(other.det_tol),
            small_angle_tol: self.small_angle_tol.max(other.small_angle_tol),
        }
    }
}

/// An element of SO(3).
///
/// The only ways to obtain one go through [`validate_rotation`], so every
/// value satisfies `|R^T R - I|_F <= ortho_tol` and `|det R - 1| <= det_tol`
/// for the tolerances it was built with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    m: Mat3,
    tol: ToleranceConfig,
}

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix {
        m: Mat3::IDENTITY,
        tol: ToleranceConfig {
            ortho_tol: 1e-9,
            det_tol: 1e-9,
            small_angle_tol: 1e-7,
        },
    };

    /// Validates `m` under the default tolerances.
    pub fn new(m: Mat3) -> Result<Self> {
        validate_rotation(m, &ToleranceConfig::default())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn into_matrix(self) -> Mat3 {
        self.m
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// The inverse rotation `R^T`. Re-validated: the defect of `R R^T`
    /// equals that of `R^T R` only up to rounding.
    pub fn transpose(&self) -> Result<RotationMatrix> {
        validate_rotation(self.m.transpose(), &self.tol)
    }

    /// Rotates a vector.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.m.mul_vec(v)
    }
}

/// Accepts `m` as a rotation iff it is finite, orthogonal and has unit
/// determinant under `tol`. The matrix is wrapped unchanged.
pub fn validate_rotation(m: Mat3, tol: &ToleranceConfig) -> Result<RotationMatrix> {
    m.finite()?;
    let residual = m.orthogonality_error();
    if !(residual <= tol.ortho_tol) {
        return Err(Error::NotOrthogonal {
            residual,
            tol: tol.ortho_tol,
        });
    }
    let det = m.det();
    if !((det - 1.0).abs() <= tol.det_tol) {
        return Err(Error::NotProperRotation {
            det,
            tol: tol.det_tol,
        });
    }
    Ok(RotationMatrix { m, tol: *tol })
}

const POLAR_STEP_TOL: f64 = 1e-15;
const POLAR_MAX_ITERS: usize = 100;

/// Nearest rotation to `m` in Frobenius norm.
///
/// Uses the Newton polar iteration `X <- (X + X^-T) / 2`, which converges
/// quadratically to the orthogonal polar factor of any nonsingular matrix.
/// For `det m > 0` that factor is the nearest proper rotation.
pub fn project_to_so3(m: Mat3, tol: &ToleranceConfig) -> Result<RotationMatrix> {
    m.finite()?;
    let det = m.det();
    if !(det > 0.0) {
        return Err(Error::NotProjectable { det });
    }
    let mut x = m;
    let mut last_step = f64::INFINITY;
    for _ in 0..POLAR_MAX_ITERS {
        let inv_t = x
            .inverse()
            .ok_or(Error::NotProjectable { det: x.det() })?
            .transpose();
        let next = (x + inv_t).scale(0.5);
        last_step = next.distance(&x);
        x = next;
        if last_step <= POLAR_STEP_TOL {
            return validate_rotation(x, tol);
        }
    }
    Err(Error::NoConvergence {
        iterations: POLAR_MAX_ITERS,
        last_step,
    })
}

/// A 3x3 skew-symmetric matrix, stored as the vector it is the hat-image of.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SkewMatrix {
    v: Vec3,
}

impl SkewMatrix {
    pub(crate) const fn from_vector(v: Vec3) -> Self {
        SkewMatrix { v }
    }

    pub fn vector(&self) -> Vec3 {
        self.v
    }

    /// `[[0, -z, y], [z, 0, -x], [-y, x, 0]]`.
    pub fn matrix(&self) -> Mat3 {
        let Vec3 { x, y, z } = self.v;
        Mat3::from_rows([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    }

    /// `S * m`.
    pub fn mul_mat(&self, m: &Mat3) -> Mat3 {
        self.matrix() * *m
    }

    /// `S * u`, which equals `v x u`.
    pub fn mul_vec(&self, u: &Vec3) -> Vec3 {
        self.v.cross(u)
    }
}

/// A Cartesian triad expressed in some common ambient frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub i: Vec3,
    pub j: Vec3,
    pub k: Vec3,
}

impl Frame {
    pub const STANDARD: Frame = Frame {
        i: Vec3::new(1.0, 0.0, 0.0),
        j: Vec3::new(0.0, 1.0, 0.0),
        k: Vec3::new(0.0, 0.0, 1.0),
    };

    pub fn new(i: Vec3, j: Vec3, k: Vec3) -> Self {
        Frame { i, j, k }
    }

    /// The frame whose axes are the columns of `r`.
    pub fn from_rotation(r: &RotationMatrix) -> Self {
        let m = r.matrix();
        Frame::new(m.column(0), m.column(1), m.column(2))
    }

    /// Checks unit length and mutual orthogonality (`DegenerateFrame`), then
    /// right-handedness (`NotProperRotation`).
    pub fn check(&self, tol: &ToleranceConfig) -> Result<()> {
        let axes = [("i", self.i), ("j", self.j), ("k", self.k)];
        for (name, a) in axes {
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            let err = (a.norm() - 1.0).abs();
            if err > tol.ortho_tol {
                return Err(Error::DegenerateFrame(format!(
                    "axis {name} has length {} (off by {err:e})",
                    a.norm()
                )));
            }
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let d = axes[a].1.dot(&axes[b].1);
            if d.abs() > tol.ortho_tol {
                return Err(Error::DegenerateFrame(format!(
                    "axes {} and {} are not orthogonal (dot = {d:e})",
                    axes[a].0, axes[b].0
                )));
            }
        }
        let handedness = self.i.cross(&self.j).dot(&self.k);
        if handedness < 1.0 - tol.ortho_tol {
            return Err(Error::NotProperRotation {
                det: handedness,
                tol: tol.det_tol,
            });
        }
        Ok(())
    }
}
