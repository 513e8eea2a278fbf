//! Preservation experiments: sample a configuration in the source domain,
//! reduce it to `Z/p`, and compare exact statistics on both sides.

pub mod distance;
pub mod incidence;
pub mod matrix;
pub mod sl2;
pub mod sumprod;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{IntPoly, MultiPoly};
use crate::domain::{ConstraintSet, Domain, DomainPresentation, Element};
use crate::error::{Error, Result};
use crate::reduce::{apply_map, find_maps, Mode, PrimeSearchConfig, ReductionMap};
use crate::specialize::{specialize, SpecializeBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Application {
    Sumprod,
    Incidence,
    Distance,
    Sl2,
    Matrix,
}

impl Application {
    pub const ALL: [Application; 5] = [
        Application::Sumprod,
        Application::Incidence,
        Application::Distance,
        Application::Sl2,
        Application::Matrix,
    ];

    pub fn default_size(self) -> usize {
        match self {
            Application::Sumprod => 8,
            Application::Incidence | Application::Distance => 6,
            Application::Sl2 | Application::Matrix => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Application::Sumprod => "sumprod",
            Application::Incidence => "incidence",
            Application::Distance => "distance",
            Application::Sl2 => "sl2",
            Application::Matrix => "matrix",
        }
    }
}

impl FromStr for Application {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Application::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown harness {s:?}")))
    }
}

impl fmt::Display for Application {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Source domain the harnesses sample from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainChoice {
    /// `Z[i]`
    #[default]
    Gaussian,
    /// `Z[r2]`, `r2^2 = 2`
    Sqrt2,
    /// `Z[r2, i]`
    Mixed,
    /// `Z[t]`, exercising specialization.
    Transcendental,
}

impl DomainChoice {
    pub fn name(self) -> &'static str {
        match self {
            DomainChoice::Gaussian => "gaussian",
            DomainChoice::Sqrt2 => "sqrt2",
            DomainChoice::Mixed => "mixed",
            DomainChoice::Transcendental => "transcendental",
        }
    }

    pub fn presentation(self) -> DomainPresentation {
        let r2 = || ("r2".to_string(), IntPoly::from_i64s(&[-2, 0, 1]), None);
        let i = || ("i".to_string(), IntPoly::from_i64s(&[1, 0, 1]), None);
        let (ts, algs) = match self {
            DomainChoice::Gaussian => (vec![], vec![i()]),
            DomainChoice::Sqrt2 => (vec![], vec![r2()]),
            DomainChoice::Mixed => (vec![], vec![r2(), i()]),
            DomainChoice::Transcendental => (vec!["t".to_string()], vec![]),
        };
        DomainPresentation::new(ts, algs).expect("built-in presentation")
    }

    pub fn domain(self) -> Domain {
        Domain::new(self.presentation()).expect("built-in presentation composes")
    }

    /// The non-integer generator used to build sample matrices.
    pub fn generator(self) -> &'static str {
        match self {
            DomainChoice::Gaussian | DomainChoice::Mixed => "i",
            DomainChoice::Sqrt2 => "r2",
            DomainChoice::Transcendental => "t",
        }
    }
}

impl FromStr for DomainChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            DomainChoice::Gaussian,
            DomainChoice::Sqrt2,
            DomainChoice::Mixed,
            DomainChoice::Transcendental,
        ]
        .into_iter()
        .find(|d| d.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown domain {s:?}")))
    }
}

/// Largest absolute coefficient used when sampling domain elements.
pub const SAMPLE_BOUND: i64 = 9;

/// Uniform element with every basis coefficient in `[-bound, bound]`.
/// Transcendental elements have degree at most 2.
pub fn sample_element(domain: &Domain, rng: &mut ChaCha8Rng, bound: i64) -> Element {
    let pres = domain.presentation();
    let vars = pres.vars().clone();
    let j = pres.num_transcendentals();
    let caps: Vec<u32> = (0..vars.len())
        .map(|k| {
            if k < j {
                2
            } else {
                pres.algebraics()[k - j].degree() as u32 - 1
            }
        })
        .collect();
    let mut terms = Vec::new();
    let mut e = vec![0u32; caps.len()];
    loop {
        if e[..j].iter().sum::<u32>() <= 2 {
            let c = rng.gen_range(-bound..=bound);
            terms.push((e.clone(), BigRational::from_integer(BigInt::from(c))));
        }
        let mut k = 0;
        while k < e.len() {
            e[k] += 1;
            if e[k] <= caps[k] {
                break;
            }
            e[k] = 0;
            k += 1;
        }
        if k == e.len() {
            break;
        }
    }
    Element::from_poly(pres, MultiPoly::from_terms(vars, terms)).expect("same variables")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarnessConfig {
    pub application: Application,
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    pub domain: DomainChoice,
    pub p_min: u64,
    pub p_max: u64,
    pub mode: Mode,
    /// Only use primes `p > size^2`.
    pub require_large_prime: bool,
    /// Matrix harness: enumerate every matrix over the support.
    pub exhaustive: bool,
    /// Matrix harness: entry support, as element text.
    pub support: Vec<String>,
    /// Matrix harness: matrices per Monte Carlo trial.
    pub samples: usize,
}

impl HarnessConfig {
    pub fn new(application: Application) -> Self {
        HarnessConfig {
            application,
            size: application.default_size(),
            trials: if application == Application::Matrix { 1 } else { 10 },
            seed: 0,
            domain: DomainChoice::default(),
            p_min: 2,
            p_max: 1_000_000,
            mode: Mode::Relaxed,
            require_large_prime: true,
            exhaustive: false,
            support: vec!["1".into(), "-1".into()],
            samples: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::invalid("size must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.p_min < 2 || self.p_min > self.p_max {
            return Err(Error::invalid(format!(
                "prime range {}:{} is empty",
                self.p_min, self.p_max
            )));
        }
        if self.application == Application::Matrix {
            if self.support.is_empty() {
                return Err(Error::invalid("matrix support is empty"));
            }
            if self.exhaustive && self.size > matrix::EXHAUSTIVE_CAP {
                return Err(Error::invalid(format!(
                    "exhaustive enumeration is capped at n = {}",
                    matrix::EXHAUSTIVE_CAP
                )));
            }
            if self.size > matrix::MONTE_CARLO_CAP {
                return Err(Error::invalid(format!(
                    "matrix size is capped at n = {}",
                    matrix::MONTE_CARLO_CAP
                )));
            }
            if self.samples == 0 {
                return Err(Error::invalid("samples must be at least 1"));
            }
        }
        Ok(())
    }

    /// Smallest prime the map search may use.
    pub fn effective_p_min(&self) -> u64 {
        if self.require_large_prime {
            let n = self.size as u64;
            self.p_min.max(n.saturating_mul(n).saturating_add(1))
        } else {
            self.p_min
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No map was found in the prime range.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapUsed {
    pub p: u64,
    pub a: u64,
}

/// Named exact counts.
pub type Stats = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub constraints: usize,
    pub source: Stats,
    pub image: Option<Stats>,
    pub map: Option<MapUsed>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub config: HarnessConfig,
    pub trials: Vec<TrialRecord>,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// Informational lines; never pass/fail criteria.
    pub bounds: Vec<String>,
}

impl HarnessReport {
    pub fn new(config: HarnessConfig, trials: Vec<TrialRecord>, bounds: Vec<String>) -> Self {
        let count = |v| trials.iter().filter(|t| t.verdict == v).count();
        HarnessReport {
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            config,
            trials,
            bounds,
        }
    }

    pub fn conclusive(&self) -> usize {
        self.passed + self.failed
    }

    /// No failed trial and at least one conclusive one.
    pub fn success(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `i`, reproducible without running earlier trials.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Outcome of the map search for one instance.
pub enum Found {
    Map(ReductionMap),
    Missing(String),
}

/// Specializes and returns the first verified map above the configured
/// prime floor.
pub fn find_map(domain: &Domain, constraints: &ConstraintSet, seed: u64, cfg: &HarnessConfig) -> Result<Found> {
    let spec = match specialize(domain, constraints, seed, SpecializeBudget::default()) {
        Ok(s) => s,
        Err(Error::Specialization { attempts, .. }) => {
            return Ok(Found::Missing(format!("specialization failed after {attempts} draws")))
        }
        Err(e) => return Err(e),
    };
    let lo = cfg.effective_p_min();
    if lo > cfg.p_max {
        return Ok(Found::Missing(format!("no primes above {} in range", lo - 1)));
    }
    let pc = PrimeSearchConfig::new(lo, cfg.p_max, cfg.mode, 1)?;
    Ok(match find_maps(domain, constraints, &spec, &pc)?.into_iter().next() {
        Some(m) => Found::Map(m),
        None => Found::Missing(format!("no verified map for primes {lo}:{}", cfg.p_max)),
    })
}

/// Image of `e` as a machine integer.
pub(crate) fn image(m: &ReductionMap, e: &Element) -> Result<u64> {
    apply_map(m, e)?
        .to_u64()
        .ok_or_else(|| Error::Internal("image does not fit in 64 bits".into()))
}

/// Assembles a record: pass iff the image statistics equal the source ones
/// and `extra_ok` holds.
pub(crate) fn finish(
    seed: u64,
    constraints: &ConstraintSet,
    source: Stats,
    found: Found,
    mut notes: Vec<String>,
    image_stats: impl FnOnce(&ReductionMap) -> Result<(Stats, bool)>,
) -> Result<TrialRecord> {
    let (image, map, verdict) = match found {
        Found::Missing(why) => {
            notes.push(why);
            (None, None, Verdict::Inconclusive)
        }
        Found::Map(m) => {
            let (img, extra_ok) = image_stats(&m)?;
            let verdict = if extra_ok && img == source {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            let used = MapUsed {
                p: m.p.to_u64().expect("scanned primes fit in u64"),
                a: m.a.to_u64().expect("reduced residue"),
            };
            (Some(img), Some(used), verdict)
        }
    };
    Ok(TrialRecord {
        index: 0,
        seed,
        constraints: constraints.len(),
        source,
        image,
        map,
        verdict,
        notes,
    })
}

pub(crate) fn stats<const N: usize>(pairs: [(&str, usize); N]) -> Stats {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v as u64)).collect()
}

/// Runs `trial` for every index in parallel, keeping index order.
pub(crate) fn run_trials(
    cfg: &HarnessConfig,
    trial: impl Fn(&Domain, u64) -> Result<TrialRecord> + Sync,
) -> Result<Vec<TrialRecord>> {
    let domain = cfg.domain.domain();
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed, i);
            let mut r = trial(&domain, seed)?;
            r.index = i;
            Ok(r)
        })
        .collect()
}

pub fn run(cfg: &HarnessConfig) -> Result<HarnessReport> {
    cfg.validate()?;
    match cfg.application {
        Application::Sumprod => sumprod::run(cfg),
        Application::Incidence => incidence::run(cfg),
        Application::Distance => distance::run(cfg),
        Application::Sl2 => sl2::run(cfg),
        Application::Matrix => matrix::run(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sub_seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(42, 3), trial_seed(42, 3));
        assert_ne!(trial_seed(42, 0), trial_seed(42, 1));
        assert_ne!(trial_seed(42, 0), trial_seed(43, 0));
    }

    #[test]
    fn samples_stay_in_bounds() {
        for choice in [
            DomainChoice::Gaussian,
            DomainChoice::Mixed,
            DomainChoice::Transcendental,
        ] {
            let d = choice.domain();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..20 {
                let e = sample_element(&d, &mut rng, 3);
                for c in e.poly().terms().values() {
                    assert!(c.numer().magnitude() <= &3u32.into());
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = HarnessConfig::new(Application::Matrix);
        assert!(c.validate().is_ok());
        c.exhaustive = true;
        c.size = 5;
        assert!(c.validate().is_err());
        let mut c = HarnessConfig::new(Application::Sumprod);
        c.trials = 0;
        assert!(c.validate().is_err());
        assert_eq!(HarnessConfig::new(Application::Sumprod).effective_p_min(), 65);
    }
}
