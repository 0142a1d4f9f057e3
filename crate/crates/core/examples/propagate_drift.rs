//! Propagates one rate profile with every method and compares drift off
//! SO(3) and distance to the exact answer.

use so3kin::*;

fn main() -> so3kin::Result<()> {
    let w = AngularVelocity::new(0.0, 0.6, 0.8);
    let profile = RateProfile::constant(w, 0.0, 10.0)?;
    let exact = *exp_so3(&AxisAngle::from(w.w.scale(10.0)))?.matrix();

    println!(
        "{:<14} {:>6} {:>12} {:>12} {:>12}",
        "method", "dt", "ortho", "det", "error"
    );
    for dt in [1e-2, 1e-3] {
        for method in Method::ALL {
            let traj = propagate(&RotationMatrix::IDENTITY, &profile, dt, method)?;
            let drift = drift_report(&traj);
            println!(
                "{:<14} {:>6} {:>12.3e} {:>12.3e} {:>12.3e}",
                method.name(),
                dt,
                drift.max_ortho_err,
                drift.max_det_err,
                traj.last().r.distance(&exact)
            );
        }
    }
    Ok(())
}
