//! A small page-size sweep against the simulated object store, printed as CSV.

use coltuple::bench::{self, Backend, SweepConfig, SweepMode};
use coltuple::daos::MappingStrategy;

fn main() -> coltuple::Result<()> {
    let config = SweepConfig {
        mode: SweepMode::GrowPageConstCluster,
        backend: Backend::Daos,
        mapping: MappingStrategy::AkeyPerPage,
        entries: 320_000,
        reps: 2,
        ..Default::default()
    };
    let reports = bench::run_sweep(&config)?;
    bench::write_csv(&reports, std::io::stdout().lock())
}
