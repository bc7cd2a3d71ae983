//! Build an instance in code, write it as a problem file, read it back and
//! run the analysis on it.
//!
//! ```text
//! cargo run --example problem_file
//! ```

use canonical_duality::commands::{analyze, seed_list, AnalyzeOptions};
use canonical_duality::document::{load_problem, ProblemDocument};
use canonical_duality::{CanonicalFunction, ProblemInstance};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemInstance::from_parts(
        vec![
            (dmatrix![-1.0, 0.3; 0.3, -0.5], dvector![0.2, 0.1], 0.0),
            (dmatrix![1.0, 0.0; 0.0, 2.0], dvector![0.0, 0.5], -1.0),
        ],
        CanonicalFunction::exp_plus_quad(0, vec![2.0])?,
    )?;
    let doc = ProblemDocument::from_instance(&p, Some(vec![dvector![-0.5], dvector![2.0]]));
    let path = std::env::temp_dir().join("cdt_problem_file_example.json");
    doc.save(&path)?;
    println!("{}", doc.to_json());

    let (q, seeds) = load_problem(&path)?;
    assert_eq!(q, p);
    let report = analyze(
        &q,
        &seed_list(q.m(), seeds, None),
        &AnalyzeOptions::default(),
    );
    println!("{}", serde_json::to_string_pretty(&report.critical_points)?);
    std::fs::remove_file(path)?;
    Ok(())
}
