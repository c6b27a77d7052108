//! Hidden-constant calibration and the versioned constants file.
//!
//! The sampling bounds fix budgets only up to a constant factor. The
//! constants used at run time live in `constants.json`; `calibrate` sweeps a
//! geometric grid and records the smallest constant whose spectral-error
//! success rate reaches the target on every calibration family.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::amm::{amm_spectral, SpectralAmmConstants};
use crate::error::{Error, Result};
use crate::hard::build_hard_matrix;
use crate::matrix::{DenseMatrix, MatrixLike};
use crate::montecarlo::{run_trials, success_fraction, wilson_lower};
use crate::oracle;
use crate::power::{spectral_norm_estimate, PowerOptions};
use crate::sparsify::{l1_row_budget, sparsify_l1_rows, HybridSparsifier, SampleConfig};
use crate::stats::{matrix_ns, profile};

pub const CONSTANTS_VERSION: u32 = 1;
pub const CONSTANTS_ENV: &str = "NUMSPARSE_CONSTANTS";
pub const CONSTANTS_FILE: &str = "constants.json";

const BUILTIN: &str = include_str!("../../../constants.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub version: u32,
    /// Hybrid sparsifier budget multiplier.
    pub c_over: f64,
    /// ℓ1-row draws multiplier.
    pub c_l1: f64,
    /// Spectral AMM pair-count multiplier.
    pub c_mz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationRecord>,
}

/// How a constants file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub seed: u64,
    pub trials: usize,
    pub target: f64,
    pub confidence_z: f64,
    pub eps: Vec<f64>,
    pub grid: Vec<f64>,
    pub families: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstantsSource {
    Env(PathBuf),
    Flag(PathBuf),
    WorkingDir(PathBuf),
    Builtin,
}

impl std::fmt::Display for ConstantsSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Env(p) => write!(f, "${CONSTANTS_ENV} ({})", p.display()),
            Self::Flag(p) | Self::WorkingDir(p) => write!(f, "{}", p.display()),
            Self::Builtin => write!(f, "built-in"),
        }
    }
}

impl Constants {
    /// The constants shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled constants.json is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Constants = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.version != CONSTANTS_VERSION {
            return Err(Error::InvalidArgument(format!(
                "constants file version {} is not supported (expected {CONSTANTS_VERSION})",
                self.version
            )));
        }
        for (name, v) in [("c_over", self.c_over), ("c_l1", self.c_l1), ("c_mz", self.c_mz)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `$NUMSPARSE_CONSTANTS`, then `flag`, then `./constants.json`, then the
    /// built-in file.
    pub fn resolve(flag: Option<&Path>) -> Result<(Self, ConstantsSource)> {
        if let Some(p) = std::env::var_os(CONSTANTS_ENV).filter(|v| !v.is_empty()) {
            let p = PathBuf::from(p);
            return Ok((Self::load(&p)?, ConstantsSource::Env(p)));
        }
        if let Some(p) = flag {
            return Ok((Self::load(p)?, ConstantsSource::Flag(p.to_path_buf())));
        }
        let local = PathBuf::from(CONSTANTS_FILE);
        if local.is_file() {
            return Ok((Self::load(&local)?, ConstantsSource::WorkingDir(local)));
        }
        Ok((Self::builtin(), ConstantsSource::Builtin))
    }

    pub fn spectral_amm(&self) -> SpectralAmmConstants {
        SpectralAmmConstants { c_l1: self.c_l1, c_mz: self.c_mz }
    }
}

#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub matrix: DenseMatrix,
}

/// Random Gaussian 32×32, the hard instance `n = 32, k = 4, α = 1/2`, and `I₃₂`.
pub fn calibration_families(seed: u64) -> Vec<Family> {
    vec![
        Family { name: "random32".into(), matrix: DenseMatrix::random_gaussian(32, 32, seed) },
        Family { name: "hard32k4".into(), matrix: build_hard_matrix(32, 4, 0.5).expect("valid instance").aprime },
        Family { name: "identity32".into(), matrix: DenseMatrix::identity(32) },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hybrid,
    L1Rows,
    AmmSpectral,
}

/// `2^(k/per_octave)` for `k = lo..=hi`; even octaves are exact powers of two.
pub fn pow2_grid(lo: i32, hi: i32, per_octave: u32) -> Vec<f64> {
    (lo..=hi).map(|k| (k as f64 / per_octave as f64).exp2()).collect()
}

#[derive(Debug, Clone)]
pub struct CalibrationOptions {
    pub seed: u64,
    pub trials: usize,
    /// Required success rate. A grid point passes when the Wilson lower
    /// bound at `confidence_z` reaches it, so that an independent rerun of
    /// the same gate is expected to pass as well.
    pub target: f64,
    pub confidence_z: f64,
    pub eps: Vec<f64>,
    pub grid: Vec<f64>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed_ca11,
            trials: 200,
            target: 0.9,
            confidence_z: 2.0,
            eps: vec![0.5, 0.25],
            // 2⁻¹⁰ … 2⁴ in steps of √2
            grid: pow2_grid(-20, 8, 2),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub family: String,
    pub eps: f64,
    pub success: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub c: f64,
    /// Worst success fraction over all (family, ε) cases.
    pub min_success: f64,
    /// Wilson lower bound of `min_success`.
    pub min_lower: f64,
    pub cases: Vec<CaseResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub scheme: Scheme,
    pub points: Vec<SweepPoint>,
    /// Smallest grid constant meeting the target with confidence, if any.
    pub chosen: Option<f64>,
}

impl Sweep {
    /// The point with the highest worst-case success (largest `c` on ties).
    pub fn best(&self) -> Option<&SweepPoint> {
        self.points.iter().max_by(|a, b| a.min_success.total_cmp(&b.min_success).then(a.c.total_cmp(&b.c)))
    }
}

/// Fraction of `trials` hybrid samples with `‖Ã − A‖₂ ≤ ε‖A‖₂`.
pub fn hybrid_success<M: MatrixLike>(a: &M, eps: f64, c_over: f64, trials: usize, seed: u64) -> Result<f64> {
    let cfg = SampleConfig::new(eps, c_over, seed);
    let prof = profile(a, PowerOptions::default().tol, seed)?;
    let sp = HybridSparsifier::with_profile(a, &prof, &cfg)?;
    let dense = a.to_dense();
    let sigma = oracle::spectral_norm(&dense)?;
    let ok =
        run_trials(seed, trials, |_, s| oracle::spectral_distance(&dense, &sp.sample(s)).map(|d| d <= eps * sigma));
    Ok(success_fraction(&ok.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Same gate for ℓ1-row sampling with `ceil(c · ε⁻² ns ln(m + n))` draws per row.
pub fn l1_rows_success<M: MatrixLike>(a: &M, eps: f64, c_l1: f64, trials: usize, seed: u64) -> Result<f64> {
    let s = l1_row_budget(matrix_ns(a), a.rows(), a.cols(), eps, c_l1);
    let dense = a.to_dense();
    let sigma = oracle::spectral_norm(&dense)?;
    let ok = run_trials(seed, trials, |_, t| -> Result<bool> {
        let p = sparsify_l1_rows(&dense, s, t)?;
        Ok(oracle::spectral_distance(&dense, &p)? <= eps * sigma)
    });
    Ok(success_fraction(&ok.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Fraction of trials with `‖AB − C‖₂ ≤ ε‖A‖₂‖B‖₂`; the σ estimates passed to
/// the algorithm come from the power method.
pub fn amm_spectral_success<M: MatrixLike, N: MatrixLike>(
    a: &M,
    b: &N,
    eps: f64,
    consts: &SpectralAmmConstants,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let da = a.to_dense();
    let db = b.to_dense();
    let exact = da.matmul(&db)?;
    let bound = eps * oracle::spectral_norm(&da)? * oracle::spectral_norm(&db)?;
    let sa = spectral_norm_estimate(&da, PowerOptions::default(), seed)?.sigma;
    let sb = spectral_norm_estimate(&db, PowerOptions::default(), seed ^ 1)?.sigma;
    let ok = run_trials(seed, trials, |_, t| -> Result<bool> {
        let rep = amm_spectral(&da, &db, eps, sa, sb, consts, t)?;
        Ok(oracle::spectral_distance(&exact, &rep.product)? <= bound)
    });
    Ok(success_fraction(&ok.into_iter().collect::<Result<Vec<_>>>()?))
}

fn sweep<F>(scheme: Scheme, opts: &CalibrationOptions, families: &[String], mut eval: F) -> Result<Sweep>
where
    F: FnMut(f64, usize, f64, u64) -> Result<f64>,
{
    let mut points = Vec::new();
    let mut chosen = None;
    for (gi, &c) in opts.grid.iter().enumerate() {
        let mut cases = Vec::new();
        for (fi, family) in families.iter().enumerate() {
            for (ei, &eps) in opts.eps.iter().enumerate() {
                let seed =
                    crate::rng::Seed::new(opts.seed).derive2(scheme as u64, ((gi * 64 + fi) * 64 + ei) as u64).value();
                cases.push(CaseResult { family: family.clone(), eps, success: eval(c, fi, eps, seed)? });
            }
        }
        let min_success = cases.iter().map(|r| r.success).fold(1.0, f64::min);
        let hits = (min_success * opts.trials as f64).round() as usize;
        let min_lower = wilson_lower(hits, opts.trials, opts.confidence_z);
        points.push(SweepPoint { c, min_success, min_lower, cases });
        if min_lower >= opts.target {
            chosen = Some(c);
            break;
        }
    }
    Ok(Sweep { scheme, points, chosen })
}

fn check_options(opts: &CalibrationOptions) -> Result<()> {
    if opts.trials < 100 {
        return Err(Error::InvalidArgument(format!("calibration needs ≥ 100 trials, got {}", opts.trials)));
    }
    if opts.grid.is_empty() || opts.eps.is_empty() {
        return Err(Error::InvalidArgument("empty calibration grid or ε list".into()));
    }
    Ok(())
}

fn family_names(families: &[Family]) -> Vec<String> {
    families.iter().map(|f| f.name.clone()).collect()
}

pub fn calibrate_hybrid(opts: &CalibrationOptions) -> Result<Sweep> {
    check_options(opts)?;
    let families = calibration_families(opts.seed);
    sweep(Scheme::Hybrid, opts, &family_names(&families), |c, fi, eps, seed| {
        hybrid_success(&families[fi].matrix, eps, c, opts.trials, seed)
    })
}

pub fn calibrate_l1_rows(opts: &CalibrationOptions) -> Result<Sweep> {
    check_options(opts)?;
    let families = calibration_families(opts.seed);
    sweep(Scheme::L1Rows, opts, &family_names(&families), |c, fi, eps, seed| {
        l1_rows_success(&families[fi].matrix, eps, c, opts.trials, seed)
    })
}

/// `c_mz` on an independent Gaussian 32×32 pair with `c_l1` fixed; only the
/// ε values in `(0, 1/2]` are used.
pub fn calibrate_amm_spectral(opts: &CalibrationOptions, c_l1: f64) -> Result<Sweep> {
    check_options(opts)?;
    let eps: Vec<f64> = opts.eps.iter().copied().filter(|&e| e > 0.0 && e <= 0.5).collect();
    if eps.is_empty() {
        return Err(Error::InvalidArgument("spectral AMM calibration needs some ε ≤ 1/2".into()));
    }
    let (a, b) = amm_calibration_pair(opts.seed);
    let amm_opts = CalibrationOptions { eps, ..opts.clone() };
    sweep(Scheme::AmmSpectral, &amm_opts, &["gaussian32pair".into()], |c, _, eps, seed| {
        amm_spectral_success(&a, &b, eps, &SpectralAmmConstants { c_l1, c_mz: c }, opts.trials, seed)
    })
}

/// Independent Gaussian 32×32 factors.
pub fn amm_calibration_pair(seed: u64) -> (DenseMatrix, DenseMatrix) {
    (DenseMatrix::random_gaussian(32, 32, seed ^ 0xa), DenseMatrix::random_gaussian(32, 32, seed ^ 0xb))
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationOutcome {
    pub hybrid: Sweep,
    pub l1_rows: Sweep,
    /// Skipped when `c_l1` could not be calibrated.
    pub amm_spectral: Option<Sweep>,
    /// Present when every sweep met the target.
    pub constants: Option<Constants>,
}

/// All three constants: `c_over` and `c_l1` on [`calibration_families`],
/// then `c_mz` with the calibrated `c_l1`.
pub fn calibrate(opts: &CalibrationOptions) -> Result<CalibrationOutcome> {
    let hybrid = calibrate_hybrid(opts)?;
    let l1_rows = calibrate_l1_rows(opts)?;
    let amm = match l1_rows.chosen {
        Some(c_l1) => Some(calibrate_amm_spectral(opts, c_l1)?),
        None => None,
    };
    let mut families = family_names(&calibration_families(opts.seed));
    families.push("gaussian32pair (amm)".into());
    let constants = match (hybrid.chosen, l1_rows.chosen, amm.as_ref().and_then(|s| s.chosen)) {
        (Some(c_over), Some(c_l1), Some(c_mz)) => Some(Constants {
            version: CONSTANTS_VERSION,
            c_over,
            c_l1,
            c_mz,
            calibration: Some(CalibrationRecord {
                seed: opts.seed,
                trials: opts.trials,
                target: opts.target,
                confidence_z: opts.confidence_z,
                eps: opts.eps.clone(),
                grid: opts.grid.clone(),
                families,
            }),
        }),
        _ => None,
    };
    Ok(CalibrationOutcome { hybrid, l1_rows, amm_spectral: amm, constants })
}
