//! Checks dR/dt = S(w) R on a sampled exact rotation by central differences.

use so3kin::*;

fn main() -> so3kin::Result<()> {
    let w = AngularVelocity::new(0.3, -0.4, 1.2);
    let r0 = exp_so3(&AxisAngle::new(0.1, 0.2, 0.3))?;
    let profile = RateProfile::constant(w, 0.0, 1.0)?;

    let dt = 1e-3;
    let d = w.over(dt);
    let inc = differential_increment(&d, &r0)?;
    let exact = *exp_so3(&AxisAngle::from(d.dphi))?.matrix() * *r0.matrix() - *r0.matrix();
    println!(
        "increment vs exact difference: {:.3e}",
        inc.distance(&exact)
    );

    let mut levels = Vec::new();
    for h in [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0] {
        let n = (1.0 / h) as usize;
        let samples = (0..=n)
            .map(|k| {
                let t = k as f64 * h;
                let r = *exp_so3(&AxisAngle::from(w.w.scale(t)))?.matrix() * *r0.matrix();
                Ok(TrajectorySample { t, r })
            })
            .collect::<Result<Vec<_>>>()?;
        let traj = Trajectory::new(samples, TrajectoryMeta::unknown(h))?;
        let rep = finite_difference_residual(&traj, &profile)?;
        println!("h = {h:<10} max residual {:.3e}", rep.max_residual);
        levels.push(rep);
    }
    let combined = ResidualReport::combine(&levels)?;
    println!(
        "estimated order: {:.4}",
        combined.estimated_order.unwrap_or(f64::NAN)
    );
    Ok(())
}
