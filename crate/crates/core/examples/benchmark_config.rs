//! Running a benchmark from a TOML description and printing the CSV report.

use oseen_afem::bench::{run_benchmark, BenchmarkSpec};
use oseen_afem::Result;

const CONFIG: &str = r#"
problem = "oseen-layer"
pairs = ["P1/P1", "P2/P1"]
nu = [1e-4, 1e-6]
levels = 4
min_level = 2
"#;

fn main() -> Result<()> {
    let spec: BenchmarkSpec = toml::from_str(CONFIG).map_err(|e| oseen_afem::Error::Config(e.to_string()))?;
    let report = run_benchmark(&spec)?;
    report.write_csv(std::io::stdout())?;
    Ok(())
}
