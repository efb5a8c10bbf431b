//! Report file emission: one JSON envelope plus one CSV per table.

use std::path::Path;

use risklab_core::report::ExperimentReport;
use risklab_core::{Error, Result};

/// Writes `<name>.json` and `<name>-<table>.csv` files under `out`.
pub fn write_report(
    report: &ExperimentReport,
    out: &Path,
    write_csv: bool,
    write_json: bool,
) -> Result<()> {
    std::fs::create_dir_all(out)
        .map_err(|e| Error::data(format!("cannot create output directory {}: {e}", out.display())))?;
    if write_json {
        let path = out.join(format!("{}.json", report.name));
        write_file(&path, &report.to_json())?;
        println!("wrote {}", path.display());
    }
    if write_csv {
        for (name, contents) in report.csv_files() {
            let path = out.join(name);
            write_file(&path, &contents)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))
}
