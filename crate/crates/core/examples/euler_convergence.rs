//! Global error of the projected Euler stepper on a time-varying rate,
//! against a fine exponential reference. Halving dt halves the error.

use so3kin::*;

fn main() -> so3kin::Result<()> {
    let profile = RateProfile::from_fn(0.0, 1.0, 1000, Interpolation::Linear, |t| {
        AngularVelocity::new(t.sin(), 0.5 * t.cos(), 1.0)
    })?;
    let start = RotationMatrix::IDENTITY;
    let reference = propagate(&start, &profile, 1e-5, Method::Exponential)?
        .last()
        .r;

    let mut points = Vec::new();
    for dt in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let err = propagate(&start, &profile, dt, Method::EulerRenorm)?
            .last()
            .r
            .distance(&reference);
        if let Some(&(_, prev)) = points.last() {
            println!("dt = {dt:<8} error {err:.4e}  ratio {:.4}", prev / err);
        } else {
            println!("dt = {dt:<8} error {err:.4e}");
        }
        points.push((dt, err));
    }
    println!(
        "observed order: {:.4}",
        estimate_convergence_order(&points)?
    );
    Ok(())
}
