use super::{train, Lexicon, MorphologyError, SegmentationModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub target: usize,
    /// Accepted relative deviation from `target`.
    pub tolerance: f64,
    pub seed: u64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            target: 4096,
            tolerance: 0.05,
            seed: 0,
            alpha_min: 1e-4,
            alpha_max: 1e4,
            max_iterations: 30,
        }
    }
}

impl FitConfig {
    pub fn new(target: usize, tolerance: f64, seed: u64) -> Self {
        FitConfig { target, tolerance, seed, ..FitConfig::default() }
    }

    fn accepts(&self, count: usize) -> bool {
        let t = self.target as f64;
        let c = count as f64;
        c >= t * (1.0 - self.tolerance) && c <= t * (1.0 + self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitWarning {
    /// The search range of alpha never brackets the target; the closest
    /// model is returned.
    UnreachableTarget { target: usize, closest: usize },
    /// The target was bracketed but no probe landed inside the tolerance
    /// band within the iteration budget.
    OutsideTolerance { target: usize, closest: usize },
}

#[derive(Debug, Clone)]
pub struct AlphaFit {
    pub model: SegmentationModel,
    pub alpha: f64,
    pub warning: Option<FitWarning>,
    /// `(alpha, distinct morphemes)` for every training run, in order.
    pub probes: Vec<(f64, usize)>,
}

struct Probe {
    log_alpha: f64,
    count: usize,
    model: SegmentationModel,
}

/// Bisects `ln alpha` until the trained model has about `target` distinct
/// morphemes.
pub fn fit_alpha(lexicon: &Lexicon, config: &FitConfig) -> Result<AlphaFit, MorphologyError> {
    if lexicon.is_empty() {
        return Err(MorphologyError::EmptyLexicon);
    }
    let mut probes = Vec::new();
    let run = |log_alpha: f64, probes: &mut Vec<(f64, usize)>| -> Result<Probe, MorphologyError> {
        let alpha = log_alpha.exp();
        let model = train(lexicon, alpha, config.seed)?;
        let count = model.num_morphemes();
        log::info!("alpha {alpha:.6e}: {count} morphemes");
        probes.push((alpha, count));
        Ok(Probe { log_alpha, count, model })
    };
    let distance = |p: &Probe| p.count.abs_diff(config.target);

    let mut lo = run(config.alpha_min.ln(), &mut probes)?;
    if config.accepts(lo.count) {
        return Ok(finish(lo, None, probes));
    }
    let mut hi = run(config.alpha_max.ln(), &mut probes)?;
    if config.accepts(hi.count) {
        return Ok(finish(hi, None, probes));
    }
    let side = |p: &Probe| p.count.cmp(&config.target);
    if side(&lo) == side(&hi) {
        let closest = if distance(&hi) < distance(&lo) { hi } else { lo };
        let warning =
            FitWarning::UnreachableTarget { target: config.target, closest: closest.count };
        log::warn!("{warning:?}");
        return Ok(finish(closest, Some(warning), probes));
    }

    let mut best: Option<Probe> = None;
    for _ in 0..config.max_iterations {
        debug_assert_ne!(side(&lo), side(&hi));
        let mid = run(0.5 * (lo.log_alpha + hi.log_alpha), &mut probes)?;
        if config.accepts(mid.count) {
            return Ok(finish(mid, None, probes));
        }
        let keep = if side(&mid) == side(&lo) {
            std::mem::replace(&mut lo, mid)
        } else {
            std::mem::replace(&mut hi, mid)
        };
        assert_ne!(side(&lo), side(&hi), "bisection lost its bracket");
        if best.as_ref().is_none_or(|b| distance(&keep) < distance(b)) {
            best = Some(keep);
        }
    }
    let closest = [Some(lo), Some(hi), best]
        .into_iter()
        .flatten()
        .min_by_key(|p| distance(p))
        .expect("at least one probe");
    let warning = FitWarning::OutsideTolerance { target: config.target, closest: closest.count };
    log::warn!("{warning:?}");
    Ok(finish(closest, Some(warning), probes))
}

fn finish(p: Probe, warning: Option<FitWarning>, probes: Vec<(f64, usize)>) -> AlphaFit {
    AlphaFit { alpha: p.log_alpha.exp(), model: p.model, warning, probes }
}
