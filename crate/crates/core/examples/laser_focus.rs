//! From oscillator to apex: pulse energy, dispersion in the focusing optics,
//! peak intensity under both spatial conventions, and the optical field.

use fieldemit::laser::{
    enhanced_tip_field, free_space_field, gdd_for_stretch, infer_enhancement, peak_intensity, pulse_energy,
    stretched_duration, LaserSpec, SpatialConvention, DEFAULT_GDD,
};

fn main() -> fieldemit::Result<()> {
    let spec = LaserSpec::default();
    println!("pulse energy        {:.4e} J", pulse_energy(&spec));
    println!(
        "focus duration      {:.2} fs (GDD {:.4e} s²)",
        stretched_duration(48e-15, DEFAULT_GDD) * 1e15,
        spec.gdd
    );
    println!("GDD for 48 -> 65 fs {:.4e} s²", gdd_for_stretch(48e-15, 65e-15)?);

    for conv in [SpatialConvention::PeakOnAxis, SpatialConvention::SpotAverage] {
        let s = LaserSpec {
            spatial_convention: conv,
            ..spec
        };
        println!("\n{}", s.convention());
        println!(
            "  peak intensity    {:.4e} W/m² ({:.3e} W/cm²)",
            peak_intensity(&s),
            peak_intensity(&s) * 1e-4
        );
        println!("  free-space field  {:.4e} V/m", free_space_field(&s));
        println!("  β for 1.1 GV/m    {:.3}", infer_enhancement(1.1e9, &s)?);
    }

    let enhanced = LaserSpec {
        enhancement: 4.1,
        ..spec
    };
    println!("\napex field with β = 4.1: {:.4e} V/m", enhanced_tip_field(&enhanced));
    Ok(())
}
