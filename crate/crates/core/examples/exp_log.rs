//! Rotation vectors and matrices, both ways, including the angle-pi case.

use std::f64::consts::PI;

use so3kin::{exp_so3, log_so3, AxisAngle};

fn main() -> so3kin::Result<()> {
    let cases = [
        AxisAngle::new(0.0, 0.0, 0.0),
        AxisAngle::new(1e-9, 0.0, 0.0),
        AxisAngle::new(0.3, -0.2, 0.5),
        AxisAngle::new(0.0, 0.0, PI / 2.0),
        AxisAngle::new(PI, 0.0, 0.0),
    ];
    for phi in cases {
        let r = exp_so3(&phi)?;
        let back = log_so3(&r);
        println!(
            "phi = {:?}\n  angle {:.6e}, log(exp(phi)) = {:?}, error {:.2e}",
            phi.phi.to_array(),
            phi.angle(),
            back.phi.to_array(),
            (back.phi - phi.phi).norm()
        );
    }
    Ok(())
}
