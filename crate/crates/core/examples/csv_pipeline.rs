//! Writes a profile, propagates it, stores the trajectory as CSV, reads it
//! back and verifies it by central differences.

use std::io::Cursor;

use so3kin::io::{
    read_profile_csv, read_trajectory_csv, write_profile_csv, write_trajectory_csv, Report,
};
use so3kin::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let profile = RateProfile::from_fn(0.0, 2.0, 8, Interpolation::Linear, |t| {
        AngularVelocity::new(0.2, -0.1 * t, 1.0)
    })?;
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &profile)?;
    println!("profile CSV:\n{}", String::from_utf8_lossy(&buf));
    let profile = read_profile_csv(Cursor::new(buf), Interpolation::Linear, false)?;

    let traj = propagate(
        &RotationMatrix::IDENTITY,
        &profile,
        0.01,
        Method::Exponential,
    )?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &traj, &[])?;
    let text = String::from_utf8(csv)?;
    println!("first trajectory lines:");
    for line in text.lines().take(5) {
        println!("  {line}");
    }

    let back = read_trajectory_csv(Cursor::new(text))?;
    assert_eq!(back.samples(), traj.samples());

    let levels = [1, 2, 4]
        .into_iter()
        .map(|stride| finite_difference_residual(&back.subsample(stride)?, &profile))
        .collect::<so3kin::Result<Vec<_>>>()?;
    let combined = ResidualReport::combine(&levels)?;
    let mut report = Report::from_trajectory(&back, &drift_report(&back));
    report.max_residual = Some(combined.max_residual);
    report.estimated_order = combined.estimated_order;
    println!("\n{}", report.to_text());
    println!("{}", report.to_json());
    Ok(())
}
