//! Geodesic and horocycle orbits and a time change, written as CSV with
//! columns `t,a11,a12,a21,a22`.
//!
//!     cargo run --release --example flow_trajectories -- out_dir

use std::fs::File;
use std::path::PathBuf;
use std::sync::Arc;

use horolab::flows::{sample_time_changed, sample_trajectory};
use horolab::fuchsian::QuotientPoint;
use horolab::{FlowKind, FuchsianGroup, GroupElement, TimeChange};

fn main() -> horolab::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "trajectories".into()));
    std::fs::create_dir_all(&dir)?;
    let group = Arc::new(FuchsianGroup::preset_bolza());
    let x = QuotientPoint::new(GroupElement::rotation(0.3));

    for kind in [FlowKind::Geodesic, FlowKind::StableHorocycle, FlowKind::UnstableHorocycle] {
        let traj = sample_trajectory(kind, &x, 0.0, 10.0, 201)?;
        let path = dir.join(format!("{kind}.csv"));
        traj.write_csv(File::create(&path)?)?;
        println!("{} rows -> {}", traj.times.len(), path.display());
    }

    let tc = TimeChange::orbit_bump(FlowKind::StableHorocycle, group, 0.5)?;
    let traj = sample_time_changed(&tc, &x, 10.0, 201)?;
    let path = dir.join("bump.csv");
    traj.write_csv(File::create(&path)?)?;
    let betas = tc.base_times(&x, &[5.0, 10.0]);
    println!("{} rows -> {}; base times at 5 and 10: {:.4}, {:.4}", traj.times.len(), path.display(), betas[0], betas[1]);
    Ok(())
}
