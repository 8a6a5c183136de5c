//! Independent runs executed concurrently, each into its own directory.

use rayon::prelude::*;
use serde::Serialize;

use super::{execute, Context};
use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::Manifest;

#[derive(Debug, Serialize)]
struct SweepEntry {
    index: usize,
    name: String,
    command: Command,
    directory: String,
    exit_code: i32,
    error: Option<String>,
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let opts = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("missing 'sweep'".into()))?;
    if opts.runs.iter().any(|r| r.command == Command::Sweep) {
        return Err(CliError::Config("sweeps cannot be nested".into()));
    }
    let workers = opts.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;

    let entries: Vec<SweepEntry> = pool.install(|| {
        opts.runs
            .par_iter()
            .enumerate()
            .map(|(index, run)| {
                let directory = format!("{index:03}-{}", run.config.name);
                let sub = ctx.with_out_dir(ctx.out_dir.join(&directory));
                let result = execute(run.command, &run.config, &sub);
                SweepEntry {
                    index,
                    name: run.config.name.clone(),
                    command: run.command,
                    directory,
                    exit_code: result.as_ref().map_or_else(CliError::exit_code, |_| 0),
                    error: result.err().map(|e| e.to_string()),
                }
            })
            .collect()
    });

    let worst = entries.iter().map(|e| e.exit_code).max().unwrap_or(0);
    let failed = entries.iter().filter(|e| e.exit_code != 0).count();
    manifest.outputs.extend(entries.iter().map(|e| e.directory.clone()));
    manifest.report("sweep", &entries);
    match worst {
        0 => Ok(()),
        2 => Err(CliError::Numerical(format!(
            "{failed} of {} runs failed",
            entries.len()
        ))),
        _ => Err(CliError::Config(format!("{failed} of {} runs failed", entries.len()))),
    }
}
