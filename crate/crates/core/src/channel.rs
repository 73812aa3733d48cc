//! Monte Carlo del-sub channel. Each trial draws from ChaCha20 seeded with
//! the run seed on stream = trial index, so any schedule gives the same
//! transcript.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::ErrorPattern;
use crate::binary::{BinaryDelSubCode, DecodeOutcome};
use crate::error::{Error, Result};
use crate::qary::QaryDelSubCode;
use crate::space::Budget;
use crate::word::Word;

pub const GENERATOR: &str = "ChaCha20Rng (rand_chacha 0.3): seed_from_u64(seed), set_stream(trial)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelConfig {
    pub deletion_count: usize,
    pub substitution_count: usize,
    pub seed: u64,
    pub trials: u64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.deletion_count > 1 || self.substitution_count > 1 {
            return Err(Error::InfeasibleSpec(format!(
                "channel supports at most 1 deletion and 1 substitution, got {} and {}",
                self.deletion_count, self.substitution_count
            )));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "record", rename = "failure")]
pub struct TrialFailure {
    pub trial: u64,
    pub sent: Word,
    pub errors: ErrorPattern,
    pub received: Word,
    pub outcome: Option<DecodeOutcome>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "record", rename = "summary")]
pub struct TrialSummary {
    pub schema: &'static str,
    pub generator: &'static str,
    pub config: ChannelConfig,
    pub n: usize,
    pub q: usize,
    pub code_size: usize,
    pub successes: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub failures: Vec<TrialFailure>,
    pub summary: TrialSummary,
}

impl TrialReport {
    pub fn all_decoded(&self) -> bool {
        self.failures.is_empty()
    }

    /// JSON lines: one record per failure, then the summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for f in &self.failures {
            out.push_str(&serde_json::to_string(f).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("serializable"));
        out.push('\n');
        out
    }
}

/// Sample (codeword, pattern, received) for one trial.
fn draw(codewords: &[Word], config: &ChannelConfig, trial: u64) -> (Word, ErrorPattern, Word) {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let x = codewords[rng.gen_range(0..codewords.len())].clone();
    let q = x.q() as u8;
    let mut pattern = ErrorPattern::default();
    let mut len = x.len();
    if config.deletion_count == 1 {
        pattern.deleted_positions.push(rng.gen_range(1..=len));
        len -= 1;
    }
    if config.substitution_count == 1 && len > 0 {
        let e = rng.gen_range(1..=len);
        let old = if pattern.deleted_positions.first().is_some_and(|&d| e >= d) {
            x.symbols()[e]
        } else {
            x.symbols()[e - 1]
        };
        // uniform over the q−1 other symbols
        let mut sym = rng.gen_range(0..q - 1);
        if sym >= old {
            sym += 1;
        }
        pattern.substituted_positions.push((e, sym));
    }
    let received = pattern.apply(&x).expect("pattern drawn in range");
    (x, pattern, received)
}

/// Run trials against any decoder over an explicit codeword list.
pub fn run_trials_with<D>(
    codewords: &[Word],
    decode: D,
    config: &ChannelConfig,
) -> Result<TrialReport>
where
    D: Fn(&Word) -> Result<DecodeOutcome> + Sync,
{
    config.validate()?;
    let first = codewords
        .first()
        .ok_or_else(|| Error::Domain("cannot simulate an empty code".into()))?;
    let (n, q) = (first.len(), first.q());
    let failures: Vec<TrialFailure> = (0..config.trials)
        .into_par_iter()
        .filter_map(|trial| {
            let (sent, errors, received) = draw(codewords, config, trial);
            let (outcome, error) = match decode(&received) {
                Ok(o) if o.codeword.as_ref() == Some(&sent) => return None,
                Ok(o) => (Some(o), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Some(TrialFailure {
                trial,
                sent,
                errors,
                received,
                outcome,
                error,
            })
        })
        .collect();
    let failed = failures.len() as u64;
    Ok(TrialReport {
        failures,
        summary: TrialSummary {
            schema: crate::SCHEMA,
            generator: GENERATOR,
            config: *config,
            n,
            q,
            code_size: codewords.len(),
            successes: config.trials - failed,
            failures: failed,
        },
    })
}

pub fn run_trials(code: &BinaryDelSubCode, config: &ChannelConfig, budget: &Budget) -> Result<TrialReport> {
    let words = code.enumerate(budget)?;
    run_trials_with(&words, |r| code.decode(r), config)
}

/// q-ary trials; the q-ary decoder only takes length n−1, so exactly one
/// deletion is required.
pub fn run_trials_q(code: &QaryDelSubCode, config: &ChannelConfig, budget: &Budget) -> Result<TrialReport> {
    if config.deletion_count != 1 {
        return Err(Error::InfeasibleSpec(
            "q-ary simulation requires exactly one deletion".into(),
        ));
    }
    let words = code.enumerate(budget)?;
    run_trials_with(&words, |r| code.decode_q(r), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qary::build_inner_code_searched;

    fn cfg(d: usize, s: usize, seed: u64, trials: u64) -> ChannelConfig {
        ChannelConfig {
            deletion_count: d,
            substitution_count: s,
            seed,
            trials,
        }
    }

    #[test]
    fn binary_all_regimes_decode() {
        let b = Budget::default();
        let code = BinaryDelSubCode::best(10, &b).unwrap();
        for (d, s) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let report = run_trials(&code, &cfg(d, s, 7, 2000), &b).unwrap();
            assert!(report.all_decoded(), "{}", report.to_json_lines());
            assert_eq!(report.summary.successes, 2000);
        }
    }

    #[test]
    fn transcript_is_reproducible() {
        let b = Budget::default();
        let code = BinaryDelSubCode::best(9, &b).unwrap();
        let words = code.enumerate(&b).unwrap();
        let c = cfg(1, 1, 42, 50);
        let a: Vec<_> = (0..50).map(|t| draw(&words, &c, t)).collect();
        let again: Vec<_> = (0..50).rev().map(|t| draw(&words, &c, t)).rev().collect();
        assert_eq!(a, again);
        for (x, p, z) in &a {
            assert_eq!(z.len(), x.len() - 1);
            assert_eq!(p.apply(x).unwrap(), *z);
        }
        let other: Vec<_> = (0..50).map(|t| draw(&words, &cfg(1, 1, 43, 50), t)).collect();
        assert_ne!(a, other);
    }

    #[test]
    fn out_of_regime_rejected() {
        let b = Budget::default();
        let code = BinaryDelSubCode::best(8, &b).unwrap();
        assert!(run_trials(&code, &cfg(0, 2, 1, 10), &b).is_err());
        assert!(run_trials(&code, &cfg(2, 0, 1, 10), &b).is_err());
        assert!(run_trials(&code, &cfg(1, 1, 1, 0), &b).is_err());
    }

    #[test]
    fn qary_trials() {
        let b = Budget::default();
        let inner = build_inner_code_searched(6, &b).unwrap();
        let code = QaryDelSubCode::best(6, 3, inner, &b).unwrap();
        let report = run_trials_q(&code, &cfg(1, 1, 3, 500), &b).unwrap();
        assert!(report.all_decoded());
        assert!(run_trials_q(&code, &cfg(0, 1, 3, 5), &b).is_err());
    }

    #[test]
    fn failing_decoder_is_recorded() {
        let b = Budget::default();
        let code = BinaryDelSubCode::best(8, &b).unwrap();
        let words = code.enumerate(&b).unwrap();
        let report = run_trials_with(
            &words,
            |_| Err(Error::Domain("broken".into())),
            &cfg(1, 0, 0, 3),
        )
        .unwrap();
        assert_eq!(report.failures.len(), 3);
        assert_eq!(report.summary.successes, 0);
        let lines = report.to_json_lines();
        assert_eq!(lines.lines().count(), 4);
        assert!(lines.lines().next().unwrap().contains("\"record\":\"failure\""));
    }
}
