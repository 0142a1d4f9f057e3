//! Small rotations commute: all six orderings of three elementary rotations
//! by eps differ from I + S(eps, eps, eps) only at second order.

use so3kin::{
    elementary_rotation, estimate_convergence_order, infinitesimal_rotation, Axis,
    InfinitesimalRotation, Mat3,
};

fn main() -> so3kin::Result<()> {
    let orders = [
        [Axis::X, Axis::Y, Axis::Z],
        [Axis::X, Axis::Z, Axis::Y],
        [Axis::Y, Axis::X, Axis::Z],
        [Axis::Y, Axis::Z, Axis::X],
        [Axis::Z, Axis::X, Axis::Y],
        [Axis::Z, Axis::Y, Axis::X],
    ];
    let mut worst = Vec::new();
    println!("{:>8} {:>12} {:>10}", "eps", "max resid", "/eps^2");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let first_order = infinitesimal_rotation(&InfinitesimalRotation::new(eps, eps, eps))?;
        let mut max: f64 = 0.0;
        for order in &orders {
            let mut p = Mat3::IDENTITY;
            for &axis in order {
                p = p * *elementary_rotation(axis, eps)?.matrix();
            }
            max = max.max(p.distance(&first_order));
        }
        println!("{eps:>8.0e} {max:>12.3e} {:>10.4}", max / (eps * eps));
        worst.push((eps, max));
    }
    println!("observed order: {:.4}", estimate_convergence_order(&worst)?);
    Ok(())
}
