//! One module per subcommand. Each fills in a [`Manifest`] and writes its
//! data files into the output directory.

use std::path::PathBuf;

use curlforce_core::{Error as CoreError, IntegratorSettings, OdeSystem, Trajectory, Variant};

use crate::config::{Command, FigureKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, Effective, Format, Manifest};

pub mod figure;
pub mod map_ef;
pub mod noether;
pub mod orbit;
pub mod simulate;
pub mod special;
pub mod sweep;

/// Command-line settings that apply on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub out_dir: PathBuf,
    pub variant: Option<Variant>,
    pub format: Format,
    /// From `CURLFORCE_MAX_STEPS`.
    pub max_steps: Option<usize>,
    pub which: Option<FigureKind>,
}

impl Context {
    pub fn variant(&self, cfg: &RunConfig) -> Variant {
        self.variant.or(cfg.variant).unwrap_or_default()
    }

    fn effective(&self, cfg: &RunConfig) -> Effective {
        Effective {
            variant: self.variant(cfg).as_str().to_string(),
            format: self.format,
            max_steps_override: self.max_steps,
        }
    }

    pub fn with_out_dir(&self, out_dir: PathBuf) -> Self {
        Self {
            out_dir,
            ..self.clone()
        }
    }
}

/// Runs one command and writes its manifest.
///
/// The manifest is written on success and on numerical failure; config
/// errors leave no manifest behind.
pub fn execute(command: Command, cfg: &RunConfig, ctx: &Context) -> Result<()> {
    ensure_dir(&ctx.out_dir)?;
    let mut manifest = Manifest::new(command.as_str(), cfg.clone(), ctx.effective(cfg));
    let result = match command {
        Command::Simulate => simulate::run(cfg, ctx, &mut manifest),
        Command::Figure => figure::run(cfg, ctx, &mut manifest),
        Command::MapEf => map_ef::run(cfg, ctx, &mut manifest),
        Command::Noether => noether::run(cfg, ctx, &mut manifest),
        Command::Orbit => orbit::run(cfg, ctx, &mut manifest),
        Command::Special => special::run(cfg, ctx, &mut manifest),
        Command::Sweep => sweep::run(cfg, ctx, &mut manifest),
    };
    match &result {
        Ok(()) => {
            manifest.write(&ctx.out_dir)?;
        }
        Err(e @ CliError::Numerical(_)) => {
            manifest.status = "numerical-failure".into();
            manifest.error = Some(e.to_string());
            manifest.write(&ctx.out_dir)?;
        }
        Err(e) if command == Command::Sweep => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
            manifest.write(&ctx.out_dir)?;
        }
        Err(_) => {}
    }
    result
}

/// Integrates and keeps the partial trajectory of a numerical failure.
pub(crate) fn integrate_keep_partial(
    system: &dyn OdeSystem,
    y0: &[f64],
    settings: &IntegratorSettings,
) -> Result<(Trajectory, Option<String>)> {
    match curlforce_core::integrate(system, y0, settings) {
        Ok(t) => Ok((t, None)),
        Err(e) => match e.partial_trajectory() {
            Some(p) => Ok((p.clone(), Some(e.to_string()))),
            None => Err(e.into()),
        },
    }
}

pub(crate) fn numerical(e: CoreError) -> CliError {
    CliError::Numerical(e.to_string())
}
