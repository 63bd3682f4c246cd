//! Runs a shipped scenario and prints the ownship and obstacle tracks every
//! 10 s, followed by the metrics summary.
//!
//!     cargo run --example encounter -- crossing-port

use bcmpc::{scenarios, sim};

fn main() -> bcmpc::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "head-on".into());
    let cfg = scenarios::by_name::<f64>(&name)?;
    let log = sim::run(&cfg)?;
    println!("    t   own north  own east  course   sog | obs north  obs east");
    for r in log.rows.iter().step_by(100) {
        let s = &r.state;
        print!(
            "{:5.0}  {:9.1} {:9.1} {:7.1} {:5.2}",
            s.time,
            s.pose.north,
            s.pose.east,
            s.pose.course.to_degrees(),
            s.vel.sog
        );
        for o in &r.obstacles {
            print!(" | {:9.1} {:9.1}", o.truth.position[0], o.truth.position[1]);
        }
        println!();
    }
    print!("\n{}", sim::compute_metrics(&log, &cfg.planner.geometry).summary());
    Ok(())
}
