//! Ensemble selection over a pool of detector pairs.
//!
//! Every pair in the pool runs exactly once per training image into a
//! [`CandidateCache`]; subset evaluation then only fuses cached candidate
//! lists and scores them, so the search loop never touches pixels. Small
//! pools are enumerated exhaustively; larger ones are explored by simulated
//! annealing over member bitmasks, maximising the detection score.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detector::{DetectorPair, Ensemble, PairId};
use crate::error::{Error, Result};
use crate::eval::{cpm, froc};
use crate::fuse::fuse_slices;
use crate::image::GrayImage;
use crate::types::{Candidate, GroundTruthPoint};

/// Largest pool the exhaustive mode will enumerate by default.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 12;

/// One labelled training image.
#[derive(Debug, Clone)]
pub struct TrainingImage {
    pub image: GrayImage,
    pub lesions: Vec<GroundTruthPoint>,
}

/// Simulated-annealing schedule.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealingParams {
    pub initial_temperature: f64,
    /// Geometric factor applied to the temperature after each level.
    pub cooling: f64,
    pub iterations_per_level: u32,
    pub min_temperature: f64,
    /// Independent chains; the best state over all of them wins.
    pub restarts: u32,
    pub seed: u64,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        AnnealingParams {
            initial_temperature: 0.2,
            cooling: 0.93,
            iterations_per_level: 40,
            min_temperature: 1e-3,
            restarts: 3,
            seed: 0,
        }
    }
}

impl AnnealingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature.is_finite() && self.initial_temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "initial temperature {} must be positive",
                self.initial_temperature
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidParams(format!(
                "cooling factor {} must lie in (0, 1)",
                self.cooling
            )));
        }
        if self.iterations_per_level == 0 {
            return Err(Error::InvalidParams(
                "need at least one iteration per temperature level".into(),
            ));
        }
        if !(self.min_temperature.is_finite() && self.min_temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "minimum temperature {} must be positive",
                self.min_temperature
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParams("need at least one restart".into()));
        }
        Ok(())
    }
}

/// How to explore the subset space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Exhaustive,
    SimulatedAnnealing,
}

/// Pool, mode, schedule and the two radii that every subset evaluation
/// shares: candidate fusion distance and ground-truth match distance.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub pool: Vec<DetectorPair>,
    pub mode: SearchMode,
    pub annealing: AnnealingParams,
    pub merge_radius: f64,
    pub match_radius: f64,
    pub exhaustive_cap: usize,
}

impl SearchConfig {
    pub fn new(pool: Vec<DetectorPair>) -> Self {
        SearchConfig {
            pool,
            mode: SearchMode::SimulatedAnnealing,
            annealing: AnnealingParams::default(),
            merge_radius: 5.0,
            match_radius: 5.0,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool.is_empty() {
            return Err(Error::EmptyInput("search pool is empty".into()));
        }
        if self.pool.len() > 63 {
            return Err(Error::InvalidParams(format!(
                "pool of {} pairs exceeds the 63-member limit",
                self.pool.len()
            )));
        }
        let mut ids: Vec<PairId> = self.pool.iter().map(|p| p.id()).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.pool.len() {
            return Err(Error::InvalidParams(
                "search pool contains duplicate pairs".into(),
            ));
        }
        for pair in &self.pool {
            pair.validate()?;
        }
        self.annealing.validate()?;
        for (name, r) in [
            ("merge radius", self.merge_radius),
            ("match radius", self.match_radius),
        ] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParams(format!("{name} {r} must be positive")));
            }
        }
        Ok(())
    }
}

/// Raw candidates of every pool pair on every training image, extracted
/// exactly once. Pairs sharing a preprocessing method share its output.
pub struct CandidateCache {
    ids: Vec<PairId>,
    /// candidates[pair][image]
    candidates: Vec<Vec<Vec<Candidate>>>,
    lesions: Vec<Vec<GroundTruthPoint>>,
    extractions: usize,
}

impl CandidateCache {
    pub fn build(pool: &[DetectorPair], training: &[TrainingImage]) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::EmptyInput("candidate cache needs a pool".into()));
        }
        if training.is_empty() {
            return Err(Error::EmptyInput(
                "candidate cache needs at least one image".into(),
            ));
        }
        // group pairs by equal preprocessing so each method runs once per image
        let mut rep = vec![0usize; pool.len()];
        for pi in 0..pool.len() {
            rep[pi] = (0..pi)
                .find(|&pj| pool[pj].preprocessing == pool[pi].preprocessing)
                .map(|pj| rep[pj])
                .unwrap_or(pi);
        }
        let per_image: Vec<Vec<Vec<Candidate>>> = training
            .par_iter()
            .map(|t| {
                let mut prepared: HashMap<usize, GrayImage> = HashMap::new();
                for (pi, pair) in pool.iter().enumerate() {
                    if rep[pi] == pi {
                        prepared.insert(pi, pair.preprocessing.run(&t.image)?);
                    }
                }
                pool.iter()
                    .enumerate()
                    .map(|(pi, pair)| pair.extractor.run(&prepared[&rep[pi]]))
                    .collect()
            })
            .collect::<Result<_>>()?;

        // transpose to per-pair layout
        let mut candidates: Vec<Vec<Vec<Candidate>>> =
            vec![Vec::with_capacity(training.len()); pool.len()];
        for image_slots in per_image {
            for (pi, cands) in image_slots.into_iter().enumerate() {
                candidates[pi].push(cands);
            }
        }
        Ok(CandidateCache {
            ids: pool.iter().map(|p| p.id()).collect(),
            candidates,
            lesions: training.iter().map(|t| t.lesions.clone()).collect(),
            extractions: pool.len() * training.len(),
        })
    }

    pub fn pair_index(&self, id: PairId) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    pub fn candidates(&self, pair: usize, image: usize) -> &[Candidate] {
        &self.candidates[pair][image]
    }

    pub fn lesions(&self, image: usize) -> &[GroundTruthPoint] {
        &self.lesions[image]
    }

    pub fn image_count(&self) -> usize {
        self.lesions.len()
    }

    pub fn total_lesions(&self) -> usize {
        self.lesions.iter().map(|l| l.len()).sum()
    }

    /// Number of (pair, image) extractions performed; constant after build.
    pub fn extraction_count(&self) -> usize {
        self.extractions
    }
}

/// Detection score of one ensemble on cached training data: fuse the
/// members' cached candidates per image and score the fused detections.
pub fn evaluate_ensemble(
    ensemble: &Ensemble,
    cache: &CandidateCache,
    merge_radius: f64,
    match_radius: f64,
) -> Result<f64> {
    let mut indices = Vec::with_capacity(ensemble.len());
    for &id in ensemble.members() {
        let idx = cache
            .pair_index(id)
            .ok_or_else(|| Error::CacheMiss(id.to_string()))?;
        indices.push(idx);
    }
    evaluate_indices(&indices, cache, merge_radius, match_radius)
}

fn evaluate_indices(
    indices: &[usize],
    cache: &CandidateCache,
    merge_radius: f64,
    match_radius: f64,
) -> Result<f64> {
    let mut per_image: Vec<(Vec<Candidate>, &[GroundTruthPoint])> =
        Vec::with_capacity(cache.image_count());
    for ii in 0..cache.image_count() {
        let slices: Vec<&[Candidate]> =
            indices.iter().map(|&pi| cache.candidates(pi, ii)).collect();
        let fused = fuse_slices(&slices, merge_radius)?;
        per_image.push((fused, cache.lesions(ii)));
    }
    let borrowed: Vec<(&[Candidate], &[GroundTruthPoint])> = per_image
        .iter()
        .map(|(c, g)| (c.as_slice(), *g))
        .collect();
    Ok(cpm(&froc(&borrowed, match_radius)?))
}

/// Outcome of a search run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SearchResult {
    pub best_ensemble: Ensemble,
    pub best_cpm: f64,
    /// Every subset evaluation in visit order: (signature, score).
    pub evaluation_log: Vec<(String, f64)>,
}

/// Shared machinery for both search modes: memoised mask evaluation, the
/// visit log, and best-state tracking with deterministic tie-breaks
/// (higher score, then fewer members, then lexicographic signature).
struct SubsetScorer<'a> {
    pool: &'a [DetectorPair],
    cache: &'a CandidateCache,
    merge_radius: f64,
    match_radius: f64,
    memo: HashMap<u64, (f64, String)>,
    log: Vec<(String, f64)>,
    best: Option<(f64, u32, String, u64)>, // (cpm, member count, signature, mask)
}

impl<'a> SubsetScorer<'a> {
    fn new(cfg: &'a SearchConfig, cache: &'a CandidateCache) -> Self {
        SubsetScorer {
            pool: &cfg.pool,
            cache,
            merge_radius: cfg.merge_radius,
            match_radius: cfg.match_radius,
            memo: HashMap::new(),
            log: Vec::new(),
            best: None,
        }
    }

    fn signature_of(&self, mask: u64) -> String {
        let ids: Vec<PairId> = (0..self.pool.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| self.pool[i].id())
            .collect();
        Ensemble::new(ids).expect("mask is non-empty").signature()
    }

    /// Evaluate a mask, memoised; every visit is logged.
    fn visit(&mut self, mask: u64) -> Result<f64> {
        debug_assert_ne!(mask, 0);
        let (score, sig) = match self.memo.get(&mask) {
            Some((s, sig)) => (*s, sig.clone()),
            None => {
                let indices: Vec<usize> =
                    (0..self.pool.len()).filter(|&i| mask & (1 << i) != 0).collect();
                let score =
                    evaluate_indices(&indices, self.cache, self.merge_radius, self.match_radius)?;
                let sig = self.signature_of(mask);
                self.memo.insert(mask, (score, sig.clone()));
                (score, sig)
            }
        };
        self.log.push((sig.clone(), score));
        let count = mask.count_ones();
        let better = match &self.best {
            None => true,
            Some((bs, bc, bsig, _)) => {
                score > *bs || (score == *bs && (count < *bc || (count == *bc && sig < *bsig)))
            }
        };
        if better {
            self.best = Some((score, count, sig, mask));
        }
        Ok(score)
    }

    fn finish(self) -> SearchResult {
        let (best_cpm, _, _, mask) = self.best.expect("at least one subset was visited");
        let ids: Vec<PairId> = (0..self.pool.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| self.pool[i].id())
            .collect();
        SearchResult {
            best_ensemble: Ensemble::new(ids).expect("best mask is non-empty"),
            best_cpm,
            evaluation_log: self.log,
        }
    }
}

/// Score every non-empty subset of the pool and return the best.
pub fn search_exhaustive(cfg: &SearchConfig, training: &[TrainingImage]) -> Result<SearchResult> {
    cfg.validate()?;
    let cache = CandidateCache::build(&cfg.pool, training)?;
    search_exhaustive_with_cache(cfg, &cache)
}

/// Exhaustive search over a prebuilt cache (the cache must cover the pool).
pub fn search_exhaustive_with_cache(
    cfg: &SearchConfig,
    cache: &CandidateCache,
) -> Result<SearchResult> {
    cfg.validate()?;
    let n = cfg.pool.len();
    if n > cfg.exhaustive_cap {
        return Err(Error::PoolTooLarge {
            size: n,
            cap: cfg.exhaustive_cap,
        });
    }
    let mut scorer = SubsetScorer::new(cfg, cache);
    for mask in 1..(1u64 << n) {
        scorer.visit(mask)?;
    }
    Ok(scorer.finish())
}

/// Explore subsets by simulated annealing: propose single-member flips,
/// always accept improvements, accept a score drop of `delta` with
/// probability `exp(delta / T)`, and cool geometrically. The best state
/// ever visited wins, over all restart chains. Fully determined by the
/// schedule's seed.
pub fn search_annealing(cfg: &SearchConfig, training: &[TrainingImage]) -> Result<SearchResult> {
    cfg.validate()?;
    let cache = CandidateCache::build(&cfg.pool, training)?;
    search_annealing_with_cache(cfg, &cache)
}

/// Annealing search over a prebuilt cache (the cache must cover the pool).
pub fn search_annealing_with_cache(
    cfg: &SearchConfig,
    cache: &CandidateCache,
) -> Result<SearchResult> {
    cfg.validate()?;
    let n = cfg.pool.len();
    let mut scorer = SubsetScorer::new(cfg, cache);
    if n == 1 {
        scorer.visit(1)?;
        return Ok(scorer.finish());
    }
    let full = (1u64 << n) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.annealing.seed);
    let neighbor = |state: u64, rng: &mut ChaCha8Rng| loop {
        let next = state ^ (1u64 << rng.gen_range(0..n));
        if next != 0 {
            return next;
        }
    };
    for _ in 0..cfg.annealing.restarts {
        let mut state = rng.gen_range(1..=full);
        let mut state_score = scorer.visit(state)?;
        let mut t = cfg.annealing.initial_temperature;
        while t > cfg.annealing.min_temperature {
            for _ in 0..cfg.annealing.iterations_per_level {
                let next = neighbor(state, &mut rng);
                let next_score = scorer.visit(next)?;
                let delta = next_score - state_score;
                if delta >= 0.0 || rng.gen::<f64>() < (delta / t).exp() {
                    state = next;
                    state_score = next_score;
                }
            }
            t *= cfg.annealing.cooling;
        }
    }
    Ok(scorer.finish())
}

/// Run the mode selected in the config.
pub fn search(cfg: &SearchConfig, training: &[TrainingImage]) -> Result<SearchResult> {
    match cfg.mode {
        SearchMode::Exhaustive => search_exhaustive(cfg, training),
        SearchMode::SimulatedAnnealing => search_annealing(cfg, training),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{ExtractorOp, LazarParams, WalterParams};
    use crate::image::IntensityRange;
    use crate::preprocess::{
        ClaheParams, IlluminationEqParams, PreprocessingOp, VesselRemovalParams,
        WalterKleinParams,
    };

    /// A tiny cache built directly from hand-written candidate lists; the
    /// pool pairs are only used as identities.
    fn hand_cache(
        pool: &[DetectorPair],
        per_pair: Vec<Vec<Vec<Candidate>>>,
        lesions: Vec<Vec<GroundTruthPoint>>,
    ) -> CandidateCache {
        let extractions = pool.len() * lesions.len();
        CandidateCache {
            ids: pool.iter().map(|p| p.id()).collect(),
            candidates: per_pair,
            lesions,
            extractions,
        }
    }

    fn toy_pool(k: usize) -> Vec<DetectorPair> {
        let pps = [
            PreprocessingOp::None,
            PreprocessingOp::WalterKlein(WalterKleinParams::default()),
            PreprocessingOp::Clahe(ClaheParams::default()),
            PreprocessingOp::IlluminationEq(IlluminationEqParams::default()),
            PreprocessingOp::VesselRemoval(VesselRemovalParams::default()),
        ];
        let exs = [
            ExtractorOp::Walter(WalterParams::default()),
            ExtractorOp::Lazar(LazarParams::default()),
        ];
        let mut pool = Vec::new();
        'outer: for ex in &exs {
            for pp in &pps {
                if pool.len() == k {
                    break 'outer;
                }
                pool.push(DetectorPair::new(pp.clone(), ex.clone()));
            }
        }
        assert_eq!(pool.len(), k);
        pool
    }

    fn gt(x: u32, y: u32) -> GroundTruthPoint {
        GroundTruthPoint::new(x, y)
    }

    fn c(x: f64, y: f64) -> Candidate {
        Candidate::new(x, y)
    }

    #[test]
    fn perfect_member_scores_one() {
        let pool = toy_pool(1);
        let cache = hand_cache(
            &pool,
            vec![vec![vec![c(10.0, 10.0), c(30.0, 30.0)]]],
            vec![vec![gt(10, 10), gt(30, 30)]],
        );
        let e = Ensemble::new(vec![pool[0].id()]).unwrap();
        let score = evaluate_ensemble(&e, &cache, 5.0, 5.0).unwrap();
        assert_eq!(score, 1.0);
    }

    #[test]
    fn empty_fused_set_scores_zero() {
        let pool = toy_pool(1);
        let cache = hand_cache(&pool, vec![vec![vec![]]], vec![vec![gt(10, 10)]]);
        let e = Ensemble::new(vec![pool[0].id()]).unwrap();
        let score = evaluate_ensemble(&e, &cache, 5.0, 5.0).unwrap();
        assert_eq!(score, 0.0);
    }

    #[test]
    fn evaluation_matches_direct_composition() {
        let pool = toy_pool(2);
        let lists = vec![
            vec![vec![c(10.0, 10.0), c(50.0, 20.0)]],
            vec![vec![c(11.0, 10.0)]],
        ];
        let lesions = vec![vec![gt(10, 10), gt(40, 40)]];
        let cache = hand_cache(&pool, lists.clone(), lesions.clone());
        let e = Ensemble::new(pool.iter().map(|p| p.id()).collect()).unwrap();
        let got = evaluate_ensemble(&e, &cache, 5.0, 5.0).unwrap();

        let fused = fuse_slices(&[&lists[0][0], &lists[1][0]], 5.0).unwrap();
        let pairs: Vec<(&[Candidate], &[GroundTruthPoint])> =
            vec![(&fused, lesions[0].as_slice())];
        let want = cpm(&froc(&pairs, 5.0).unwrap());
        assert_eq!(got, want);
        assert!(got > 0.0);
    }

    #[test]
    fn cache_misses_are_reported() {
        let pool = toy_pool(2);
        let cache = hand_cache(
            &pool[..1],
            vec![vec![vec![]]],
            vec![vec![gt(5, 5)]],
        );
        let e = Ensemble::new(vec![pool[1].id()]).unwrap();
        assert!(matches!(
            evaluate_ensemble(&e, &cache, 5.0, 5.0),
            Err(Error::CacheMiss(_))
        ));
    }

    /// Three synthetic members: one perfect, one that only finds the first
    /// lesion, one pure noise. Exhaustive search must pick the perfect one
    /// alone (tie-break prefers fewer members).
    fn rigged_setup() -> (Vec<DetectorPair>, CandidateCache) {
        let pool = toy_pool(3);
        let lesions = vec![vec![gt(10, 10), gt(40, 40)], vec![gt(20, 20)]];
        let perfect = vec![
            vec![c(10.0, 10.0), c(40.0, 40.0)],
            vec![c(20.0, 20.0)],
        ];
        let partial = vec![vec![c(10.0, 10.0)], vec![]];
        let noise = vec![
            vec![c(100.0, 100.0), c(120.0, 100.0), c(140.0, 100.0)],
            vec![c(100.0, 120.0), c(120.0, 120.0)],
        ];
        let cache = hand_cache(&pool, vec![perfect, partial, noise], lesions);
        (pool, cache)
    }

    #[test]
    fn exhaustive_visits_every_subset_and_picks_the_best() {
        let (pool, cache) = rigged_setup();
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.mode = SearchMode::Exhaustive;
        let res = search_exhaustive_with_cache(&cfg, &cache).unwrap();
        assert_eq!(res.evaluation_log.len(), 7);
        assert_eq!(res.best_cpm, 1.0);
        assert_eq!(res.best_ensemble.members(), &[pool[0].id()]);
        let max_logged = res
            .evaluation_log
            .iter()
            .map(|(_, s)| *s)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(res.best_cpm, max_logged);
    }

    #[test]
    fn exhaustive_matches_brute_force_oracle() {
        let (pool, cache) = rigged_setup();
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.mode = SearchMode::Exhaustive;
        let res = search_exhaustive_with_cache(&cfg, &cache).unwrap();

        // independent enumeration via the public evaluator
        let mut best: Option<(f64, usize, String)> = None;
        for mask in 1u64..8 {
            let ids: Vec<PairId> = (0..3)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| pool[i].id())
                .collect();
            let e = Ensemble::new(ids).unwrap();
            let s = evaluate_ensemble(&e, &cache, cfg.merge_radius, cfg.match_radius).unwrap();
            let key = (s, e.len(), e.signature());
            let better = match &best {
                None => true,
                Some((bs, bl, bsig)) => {
                    s > *bs || (s == *bs && (e.len() < *bl || (e.len() == *bl && e.signature() < *bsig)))
                }
            };
            if better {
                best = Some(key);
            }
        }
        let (want_score, _, want_sig) = best.unwrap();
        assert_eq!(res.best_cpm, want_score);
        assert_eq!(res.best_ensemble.signature(), want_sig);
    }

    #[test]
    fn pool_above_cap_is_refused() {
        let (pool, cache) = rigged_setup();
        let mut cfg = SearchConfig::new(pool);
        cfg.exhaustive_cap = 2;
        let err = search_exhaustive_with_cache(&cfg, &cache).unwrap_err();
        assert!(matches!(err, Error::PoolTooLarge { size: 3, cap: 2 }));
    }

    #[test]
    fn annealing_pool_of_one_returns_that_pair() {
        let pool = toy_pool(1);
        let cache = hand_cache(
            &pool,
            vec![vec![vec![c(10.0, 10.0)]]],
            vec![vec![gt(10, 10)]],
        );
        let cfg = SearchConfig::new(pool.clone());
        let res = search_annealing_with_cache(&cfg, &cache).unwrap();
        assert_eq!(res.best_ensemble.members(), &[pool[0].id()]);
        assert_eq!(res.best_cpm, 1.0);
        assert_eq!(res.evaluation_log.len(), 1);
    }

    #[test]
    fn annealing_is_reproducible_and_bounded_by_exhaustive() {
        let (pool, cache) = rigged_setup();
        let mut cfg = SearchConfig::new(pool);
        cfg.annealing.seed = 7;
        let a = search_annealing_with_cache(&cfg, &cache).unwrap();
        let b = search_annealing_with_cache(&cfg, &cache).unwrap();
        assert_eq!(a, b);

        cfg.mode = SearchMode::Exhaustive;
        let ex = search_exhaustive_with_cache(&cfg, &cache).unwrap();
        assert!(a.best_cpm <= ex.best_cpm);
        // tiny space: the chain must find the optimum
        assert_eq!(a.best_cpm, ex.best_cpm);
        // best never below any singleton it visited
        let max_logged = a
            .evaluation_log
            .iter()
            .map(|(_, s)| *s)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a.best_cpm, max_logged);
    }

    #[test]
    fn different_seeds_walk_differently() {
        let (pool, cache) = rigged_setup();
        let mut cfg = SearchConfig::new(pool);
        cfg.annealing.seed = 1;
        let a = search_annealing_with_cache(&cfg, &cache).unwrap();
        cfg.annealing.seed = 2;
        let b = search_annealing_with_cache(&cfg, &cache).unwrap();
        // same optimum, but the walks differ
        assert_eq!(a.best_cpm, b.best_cpm);
        let sigs = |r: &SearchResult| -> Vec<String> {
            r.evaluation_log.iter().map(|(s, _)| s.clone()).collect()
        };
        assert_ne!(sigs(&a), sigs(&b));
    }

    #[test]
    fn config_validation_rejects_bad_schedules() {
        let pool = toy_pool(2);
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.annealing.cooling = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.annealing.iterations_per_level = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.merge_radius = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::new(pool.clone());
        cfg.pool.push(pool[0].clone());
        assert!(cfg.validate().is_err());
        assert!(SearchConfig::new(vec![]).validate().is_err());
    }

    #[test]
    fn cache_extracts_each_pair_once_per_image() {
        // real end-to-end build on small images
        let w = 48usize;
        let mut data = vec![120.0; w * w];
        for y in 0..w {
            for x in 0..w {
                let d2 = (x as f64 - 24.0).powi(2) + (y as f64 - 24.0).powi(2);
                data[y * w + x] = 120.0 - 45.0 * (-d2 / (2.0 * 1.8 * 1.8)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, w, data, IntensityRange::EIGHT_BIT).unwrap();
        let training = vec![
            TrainingImage {
                image: img.clone(),
                lesions: vec![gt(24, 24)],
            },
            TrainingImage {
                image: img,
                lesions: vec![gt(24, 24)],
            },
        ];
        let pool = toy_pool(2);
        let cache = CandidateCache::build(&pool, &training).unwrap();
        assert_eq!(cache.extraction_count(), pool.len() * training.len());
        assert_eq!(cache.image_count(), 2);
        assert_eq!(cache.total_lesions(), 2);

        let e = Ensemble::new(pool.iter().map(|p| p.id()).collect()).unwrap();
        let s1 = evaluate_ensemble(&e, &cache, 5.0, 5.0).unwrap();
        let s2 = evaluate_ensemble(&e, &cache, 5.0, 5.0).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(cache.extraction_count(), pool.len() * training.len());
    }
}
