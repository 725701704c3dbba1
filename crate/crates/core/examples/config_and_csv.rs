//! Configuration text, a seeded synthetic sweep written to CSV, read back
//! bit-exactly, and fitted.

use fieldemit::fitting::{fit_dc_fn, SweepKind};
use fieldemit::io::{ingest_sweep_csv, synthesize_dataset, write_sweep, RunConfig};

fn main() -> fieldemit::Result<()> {
    let config = RunConfig::parse(
        "# a sharper tip, more points\n\
         tip.radius = 80e-9\n\
         sweep.points = 40\n\
         dc.u_min = 800\n\
         dc.u_max = 900\n\
         seed = 5\n",
    )?;
    let data = synthesize_dataset(&config, "dc", None, 0.02, config.seed)?;

    let dir = std::env::temp_dir().join("fieldemit-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("iv.csv");
    write_sweep(std::fs::File::create(&path).expect("create csv"), &data)?;
    let back = ingest_sweep_csv(&path, SweepKind::Iv)?;
    println!("wrote and re-read {} rows, identical: {}", back.len(), back == data);

    let fit = fit_dc_fn(
        &back,
        config.tip.work_function,
        config.tip.field_factor,
        &config.fit_settings(),
    )?;
    println!("fitted r = {:.2} nm (truth 80 nm)", fit.params[0] * 1e9);

    println!("\naccepted configuration keys:");
    for (k, v) in RunConfig::documented_keys().iter().take(8) {
        println!("  {k} = {v}");
    }
    println!("  ...");
    Ok(())
}
