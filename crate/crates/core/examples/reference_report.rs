//! Every reference check evaluated with the default configuration. Same
//! table as `fieldemit paper-report`.

use fieldemit::io::report::{criterion_summary, evaluate};
use fieldemit::io::RunConfig;

fn main() -> fieldemit::Result<()> {
    let checks = evaluate(&RunConfig::default())?;
    for c in &checks {
        println!(
            "[{:>2}] {} {:<62} {:>13.5e}  {}",
            c.criterion,
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.measured,
            c.target
        );
    }
    let failed: Vec<u8> = criterion_summary(&checks)
        .into_iter()
        .filter(|(_, p)| !p)
        .map(|(k, _)| k)
        .collect();
    println!("failing criteria: {failed:?}");
    Ok(())
}
