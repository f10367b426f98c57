use serde::Serialize;

use super::experiment::{simulate_experiment, CountsTable, Observations};
use super::fidelity::process_fidelity;
use super::inversion::linear_inversion;
use super::mle::{mle_cptp_fit, MleOptions, ReconstructionResult};
use crate::channel::{check_cptp, mix, CptpReport, Fixture, SuperOperator, DEFAULT_CPTP_TOL};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::serde_util;
use crate::spectral::eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotMode {
    /// Exact Born probabilities.
    Exact,
    Finite(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub shots: ShotMode,
    pub seed: u64,
    /// Weight of the completely depolarizing channel mixed into the channel under test.
    pub noise: f64,
    pub mle: MleOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            shots: ShotMode::Finite(4096),
            seed: 0,
            noise: 0.0,
            mle: MleOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineResult {
    pub reconstruction: ReconstructionResult,
    /// Process fidelity of the MLE estimate against the noiseless channel.
    pub fidelity: f64,
    /// Distortion eigenvalues of the MLE estimate.
    #[serde(serialize_with = "serde_util::complex_array")]
    pub eigenvalues: [C64; 3],
    pub cptp: CptpReport,
    /// CPTP report of the plain linear-inversion estimate, for comparison.
    pub linear_inversion_cptp: CptpReport,
    pub counts: Option<CountsTable>,
}

/// Simulate → MLE → spectrum, the synthetic counterpart of a tomography run.
pub fn full_pipeline(s: &SuperOperator, opts: &PipelineOptions) -> Result<PipelineResult> {
    let rep = check_cptp(s, DEFAULT_CPTP_TOL);
    if !rep.is_cptp() {
        return Err(Error::NotCptp {
            min_eigenvalue: rep.min_choi_eigenvalue,
            tp_residual: rep.tp_residual,
        });
    }
    if !(0.0..=1.0).contains(&opts.noise) {
        return Err(Error::InvalidArgument(format!("noise {} outside [0, 1]", opts.noise)));
    }
    let depol = Fixture::Depolarizing(0.0).superop();
    let under_test = mix(&[*s, depol], &[1.0 - opts.noise, opts.noise])?;
    let (obs, counts) = match opts.shots {
        ShotMode::Exact => (Observations::exact(&under_test)?, None),
        ShotMode::Finite(n) => {
            let t = simulate_experiment(&under_test, n, opts.seed)?;
            (Observations::from_counts(&t)?, Some(t))
        }
    };
    let linear = linear_inversion(&obs);
    let reconstruction = mle_cptp_fit(&obs, &depol, &opts.mle);
    let est = &reconstruction.superop_estimate;
    let eig = eigenvalues(&est.to_affine()?.distortion)?;
    Ok(PipelineResult {
        fidelity: process_fidelity(est, s),
        eigenvalues: eig,
        cptp: check_cptp(est, 1e-9),
        linear_inversion_cptp: check_cptp(&linear, DEFAULT_CPTP_TOL),
        reconstruction,
        counts,
    })
}
