//! Sample the dual function on a 2-D grid of `σ` and print the CSV that
//! `cdt dual-scan` would emit.
//!
//! ```text
//! cargo run --example dual_scan
//! ```

use std::io;

use canonical_duality::commands::{dual_scan, ScanSpec};
use canonical_duality::document::ProblemDocument;
use canonical_duality::Tolerances;

const DOC: &str = include_str!("../data/two_wells.json");

fn main() -> canonical_duality::Result<()> {
    let p = ProblemDocument::from_json(DOC)?.to_instance()?;
    let spec = ScanSpec::parse(p.m(), "0,1", "-1.5:1.5", 7)?;
    let rows = dual_scan(&p, &spec, &Tolerances::default(), io::stdout().lock())?;
    eprintln!("{rows} rows");
    Ok(())
}
