pub mod amm;
pub mod bench;
pub mod calibrate;
pub mod hard;
pub mod ridge;
pub mod sparsify;

use std::path::Path;

use anyhow::Context as _;
use numsparse::calibrate::{Constants, ConstantsSource};
use numsparse::SparseMatrix;

use crate::Cli;

pub const DEFAULT_SEED: u64 = 0;

/// State shared by every subcommand.
pub struct Context {
    pub seed: u64,
    pub seed_given: bool,
    pub constants: Constants,
    pub constants_source: ConstantsSource,
}

impl Context {
    pub fn new(cli: &Cli) -> anyhow::Result<Self> {
        let (constants, constants_source) =
            Constants::resolve(cli.constants.as_deref()).context("loading calibration constants")?;
        Ok(Self { seed: cli.seed.unwrap_or(DEFAULT_SEED), seed_given: cli.seed.is_some(), constants, constants_source })
    }

    pub fn constants_note(&self) -> String {
        format!(
            "constants from {}: c_over={}, c_l1={}, c_mz={}",
            self.constants_source, self.constants.c_over, self.constants.c_l1, self.constants.c_mz
        )
    }
}

pub fn load_matrix(path: &Path) -> anyhow::Result<SparseMatrix> {
    numsparse::mtx::load_matrix_market(path).with_context(|| format!("reading {}", path.display()))
}

pub fn check_eps(eps: f64, upper: f64, inclusive: bool) -> anyhow::Result<()> {
    let ok = eps > 0.0 && if inclusive { eps <= upper } else { eps < upper };
    if !ok {
        let close = if inclusive { ']' } else { ')' };
        anyhow::bail!("--eps must be in (0, {upper}{close}, got {eps}");
    }
    Ok(())
}

pub fn elapsed_ms(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
