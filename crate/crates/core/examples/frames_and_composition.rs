//! Rotations built from frame triads and composed about fixed axes.

use std::f64::consts::FRAC_PI_2;

use so3kin::{
    compose_fixed, elementary_rotation, rotation_from_frames, Axis, Frame, ToleranceConfig, Vec3,
};

fn main() -> so3kin::Result<()> {
    let tol = ToleranceConfig::default();

    // Target frame: the reference turned a quarter turn about z.
    let target = Frame::new(
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(-1.0, 0.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    );
    let r = rotation_from_frames(&target, &Frame::STANDARD, &tol)?;
    println!("rotation taking the standard frame to the target:");
    for row in r.matrix().rows() {
        println!("  {row:?}");
    }

    let left_handed = Frame::new(
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, -1.0),
    );
    match rotation_from_frames(&left_handed, &Frame::STANDARD, &tol) {
        Ok(_) => println!("left-handed frame unexpectedly accepted"),
        Err(e) => println!("left-handed frame rejected: {e}"),
    }

    // x first, then z, both about the fixed axes.
    let rx = elementary_rotation(Axis::X, FRAC_PI_2)?;
    let rz = elementary_rotation(Axis::Z, FRAC_PI_2)?;
    let xz = compose_fixed(&rx, &rz)?;
    let zx = compose_fixed(&rz, &rx)?;
    println!("Rz * Rx:");
    for row in xz.matrix().rows() {
        println!("  {:?}", row.map(|v| v.round() + 0.0));
    }
    println!(
        "|Rz Rx - Rx Rz|_F = {:.3}",
        xz.matrix().distance(zx.matrix())
    );
    Ok(())
}
