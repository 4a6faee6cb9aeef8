use issac::array::{build_channel, manifold, sample_paths, steering_vector, PathSet};
use issac::random::rng_from_seed;
use issac::{Error, C64};

fn main() -> Result<(), Error> {
    // a(30 deg) on four elements walks around the unit circle in quarter turns
    let a = steering_vector(30f64.to_radians(), 4)?;
    for (m, z) in a.iter().enumerate() {
        println!("a_{m} = {:+.3} {:+.3}j", z.re, z.im);
    }

    // two paths, h = A(theta) alpha
    let paths = PathSet::new(vec![0.0, 30f64.to_radians()], vec![C64::new(1.0, 0.0); 2])?;
    let h = build_channel(&paths, 2)?;
    println!("h = {:?}", h.as_vector().as_slice());

    // steering vectors decorrelate as the array grows
    let (t1, t2) = (10f64.to_radians(), 14f64.to_radians());
    for m in [8, 32, 128] {
        let a = manifold(&[t1, t2], m)?;
        let c = a.column(0).dotc(&a.column(1)).norm() / m as f64;
        println!("M={m:4} |a1^H a2|/M = {c:.4}");
    }

    // random scenario as used by the experiments: separated angles, CN(0,1) gains
    let paths = sample_paths(4, 64, &mut rng_from_seed(1))?;
    let deg: Vec<String> = paths.angles().iter().map(|t| format!("{:.2}", t.to_degrees())).collect();
    println!("sampled angles [{}] deg, ||alpha||^2 = {:.3}", deg.join(", "), paths.gain_energy());
    println!("||h||^2 = {:.3}", build_channel(&paths, 64)?.norm_sqr());
    Ok(())
}
