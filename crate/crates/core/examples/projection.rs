//! Pulls a drifted matrix back onto SO(3) with the polar projection.

use so3kin::{hat, project_to_so3, step_euler, AngularVelocity, Mat3, ToleranceConfig, Vec3};

fn main() -> so3kin::Result<()> {
    let tol = ToleranceConfig::default();
    let w = AngularVelocity::new(1.0, 2.0, -0.5);
    let mut m = Mat3::IDENTITY;
    for _ in 0..100 {
        m = step_euler(&m, &w, 0.01)?;
    }
    println!(
        "after 100 raw Euler steps: ortho {:.3e}, det {:.6}",
        m.orthogonality_error(),
        m.det()
    );
    let r = project_to_so3(m, &tol)?;
    println!(
        "projected: ortho {:.3e}, det {:.15}",
        r.matrix().orthogonality_error(),
        r.matrix().det()
    );

    let near = Mat3::IDENTITY + hat(Vec3::new(1e-3, 0.0, 0.0))?.matrix();
    let p = project_to_so3(near, &tol)?;
    println!(
        "I + S(1e-3, 0, 0) projects to a rotation {:.3e} from I",
        p.matrix().distance(&Mat3::IDENTITY)
    );

    let reflection = Mat3::diag(1.0, 1.0, -1.0);
    if let Err(e) = project_to_so3(reflection, &tol) {
        println!("reflection: {e}");
    }
    Ok(())
}
