//! The hat map turns a vector into the skew matrix of its cross product.

use so3kin::{hat, vee, Vec3};

fn main() -> so3kin::Result<()> {
    let v = Vec3::new(1.0, -2.0, 3.0);
    let u = Vec3::new(0.5, 0.25, -1.0);
    let s = hat(v)?;

    println!("hat({v:?}) =");
    for row in s.matrix().rows() {
        println!("  {row:?}");
    }
    println!("S(v) u  = {:?}", s.mul_vec(&u));
    println!("v x u   = {:?}", v.cross(&u));
    println!("vee(S)  = {:?}", vee(&s));
    Ok(())
}
