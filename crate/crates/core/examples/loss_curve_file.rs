//! Reads loss curves in the `fold,init,lambda:value,...` text format and
//! calibrates in both modes.
//!
//! Run with `cargo run --example loss_curve_file`.

use cvcrc::curvefile::{calibrate, format_curves, format_lambda, parse_curves, CalibrationMode};
use cvcrc::LossSpec;

const VB_FILE: &str = "\
# fold 0 marks validation data
0,1,1:0
0,1,2:0
0,1,3:0
";

const CV_FILE: &str = "\
1,1,0.5:0.5,1.5:0
1,1,2:0
2,1,0.25:0
2,0.5,1:0
";

fn main() -> cvcrc::Result<()> {
    let spec = LossSpec::unit(0.5)?;
    let vb = calibrate(&parse_curves(VB_FILE)?, &spec, CalibrationMode::Vb)?;
    println!("vb: lambda={} estimate={}", format_lambda(vb.lambda), vb.risk_at_lambda);

    let records = parse_curves(CV_FILE)?;
    let cv = calibrate(&records, &spec, CalibrationMode::Cv)?;
    println!("cv: lambda={} estimate={:.4}", format_lambda(cv.lambda), cv.risk_at_lambda);
    print!("normalized file:\n{}", format_curves(&records));

    match parse_curves("0,1,2:0.5,1:0\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
