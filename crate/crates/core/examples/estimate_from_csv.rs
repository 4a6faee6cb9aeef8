//! Writes element-space snapshots to CSV, reads them back and estimates the
//! path angles, as `issac estimate` does.

use issac::array::{build_channel, ArrayConfig, PathSet};
use issac::estimate::{estimate_angles, read_snapshots_csv, EstimateOptions, SnapshotDomain};
use issac::frontend::DiagonalLoading;
use issac::random::rng_from_seed;
use issac::signal::{simulate_uplink, PilotKind, UplinkFrame};
use issac::{Error, C64};

fn main() -> Result<(), Error> {
    let m = 32;
    let truth = [-25f64.to_radians(), 10f64.to_radians()];
    let h = build_channel(&PathSet::new(truth.to_vec(), vec![C64::new(1.0, 0.0), C64::new(0.3, -0.7)])?, m)?;
    let frame = UplinkFrame::from_db(1, 500, PilotKind::AllOnes, -10.0, -5.0, 1.0)?;
    let y = simulate_uplink(&h, &frame, &mut rng_from_seed(4)).yd;

    let path = std::env::temp_dir().join("issac_snapshots.csv");
    let mut text = String::new();
    for n in 0..y.ncols() {
        let row: Vec<String> = y.column(n).iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;

    let snapshots = read_snapshots_csv(&path)?;
    let opts = EstimateOptions {
        array: ArrayConfig::digital(m)?,
        l: 2,
        domain: SnapshotDomain::Element,
        grid_points: None,
        m_sub: None,
        loading: DiagonalLoading::default(),
    };
    let est = estimate_angles(&snapshots, &opts)?;
    for (t, e) in truth.iter().zip(&est.angles_hat) {
        println!("true {:7.2} deg, estimate {:7.2} deg", t.to_degrees(), e.to_degrees());
    }
    Ok(())
}
