//! End-to-end runs: the ten stages from input pairs to the projected space,
//! the run manifest and the on-disk artifacts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::LraConfig;
use crate::corpus::Corpus;
use crate::decomposition::{project, truncated_svd, ProjectedSpace, SvdOptions};
use crate::error::{Error, Result};
use crate::matrix::{build_matrix, log_entropy_transform, ColumnMap, PairPatternMatrix, RowMap};
use crate::pairspace::{filter_alternates, generate_alternates, PairVersions, WordPair};
use crate::patterns::{harvest_phrases, mine_top_patterns, PatternTable};
use crate::similarity::{relational_similarity, SimilarityResult};
use crate::thesaurus::Thesaurus;

pub const STAGES: [&str; 10] = [
    "alternates",
    "filter",
    "phrases",
    "patterns",
    "rows",
    "columns",
    "matrix",
    "entropy",
    "svd",
    "projection",
];

pub const VERSIONS_FILE: &str = "versions.json";
pub const PATTERNS_FILE: &str = "patterns.tsv";
pub const MATRIX_FILE: &str = "matrix.coo";
pub const SPACE_FILE: &str = "space.lraprj";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub step: usize,
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub input_pairs: usize,
    pub distinct_pairs: usize,
    pub alternates_kept: usize,
    pub phrases: usize,
    pub patterns: usize,
    pub rows_before_drops: usize,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub zero_versions: usize,
    pub k_requested: usize,
    pub k_eff: usize,
    pub svd_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: LraConfig,
    pub corpus_digest: String,
    pub thesaurus_digest: String,
    pub pairs_digest: String,
    /// Digest over the config and the three input digests.
    pub cache_key: String,
    pub stats: RunStats,
    pub timings: Vec<StageTiming>,
    /// Artifact name to path, filled in when the run is saved.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub versions: Vec<PairVersions>,
    pub patterns: PatternTable,
    pub counts: PairPatternMatrix,
    pub weighted: PairPatternMatrix,
    pub singular_values: Vec<f64>,
    pub space: ProjectedSpace,
    pub manifest: RunManifest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn corpus_digest(corpus: &Corpus) -> String {
    sha256_hex(&corpus.to_bytes())
}

pub fn thesaurus_digest(thesaurus: &Thesaurus) -> String {
    sha256_hex(thesaurus.to_text().as_bytes())
}

pub fn pairs_digest(pairs: &[WordPair]) -> String {
    let text: String = pairs
        .iter()
        .map(|p| format!("{} {} {}:{}\n", p.a, p.b, p.pos_a, p.pos_b))
        .collect();
    sha256_hex(text.as_bytes())
}

pub fn cache_key(config: &LraConfig, corpus: &str, thesaurus: &str, pairs: &str) -> String {
    sha256_hex(format!("{config}{corpus}\n{thesaurus}\n{pairs}\n").as_bytes())
}

struct Clock {
    timings: Vec<StageTiming>,
}

impl Clock {
    fn stage<T>(&mut self, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let step = self.timings.len();
        let stage = STAGES[step];
        let started = Instant::now();
        let out = f().map_err(|cause| Error::Stage {
            stage,
            cause: Box::new(cause),
        })?;
        let seconds = started.elapsed().as_secs_f64();
        log::info!("step {} ({stage}) took {seconds:.3}s", step + 1);
        self.timings.push(StageTiming {
            step: step + 1,
            stage: stage.to_string(),
            seconds,
        });
        Ok(out)
    }
}

/// Runs every stage in order. Repeated input pairs are merged.
pub fn run_pipeline(config: &LraConfig, corpus: &Corpus, thesaurus: &Thesaurus, pairs: &[WordPair]) -> Result<PipelineOutput> {
    config.validate()?;
    let mut clock = Clock { timings: Vec::new() };

    let mut seen = HashSet::new();
    let originals: Vec<WordPair> = pairs.iter().filter(|p| seen.insert((*p).clone())).cloned().collect();

    let candidates = clock.stage(|| {
        if originals.is_empty() {
            return Err(Error::Contract("no input pairs".into()));
        }
        Ok(originals
            .iter()
            .map(|p| generate_alternates(p, thesaurus, config.num_sim))
            .collect::<Vec<_>>())
    })?;
    let versions = clock.stage(|| {
        use rayon::prelude::*;
        Ok(originals
            .par_iter()
            .zip(candidates)
            .map(|(p, c)| filter_alternates(p, c, corpus, config.num_filter, config.max_phrase))
            .collect::<Vec<_>>())
    })?;
    let phrases = clock.stage(|| Ok(harvest_phrases(&versions, corpus, config.min_inter, config.max_inter)))?;
    let patterns = clock.stage(|| mine_top_patterns(&phrases, config.max_inter, config.num_patterns))?;
    let row_map = clock.stage(|| Ok(RowMap::from_versions(&versions)))?;
    let columns = clock.stage(|| Ok(ColumnMap::new(&patterns)))?;
    let counts = clock.stage(|| build_matrix(&versions, &phrases, &patterns))?;
    let weighted = clock.stage(|| Ok(log_entropy_transform(&counts)))?;
    let svd = clock.stage(|| {
        if weighted.cells.nnz() == 0 {
            log::warn!("every pair version is absent from the corpus; the projected space is empty");
            return Ok(None);
        }
        let options = SvdOptions {
            tolerance: config.svd_tolerance,
            max_steps: None,
        };
        truncated_svd(&weighted.cells, config.k, &options).map(Some)
    })?;
    let space = clock.stage(|| match &svd {
        Some(svd) => project(svd, weighted.rows.clone(), weighted.zero_rows.clone()),
        None => ProjectedSpace::new(0, vec![], weighted.rows.clone(), weighted.zero_rows.clone()),
    })?;

    let corpus_digest = corpus_digest(corpus);
    let thesaurus_digest = thesaurus_digest(thesaurus);
    let pairs_digest = pairs_digest(pairs);
    let stats = RunStats {
        input_pairs: pairs.len(),
        distinct_pairs: originals.len(),
        alternates_kept: versions.iter().map(|v| v.alternates.len()).sum(),
        phrases: phrases.total_phrases(),
        patterns: patterns.len(),
        rows_before_drops: row_map.len(),
        rows: weighted.num_rows(),
        cols: columns.len(),
        nnz: weighted.cells.nnz(),
        zero_versions: weighted.zero_rows.len(),
        k_requested: config.k,
        k_eff: space.k(),
        svd_steps: svd.as_ref().map_or(0, |s| s.steps),
    };
    let manifest = RunManifest {
        config: config.clone(),
        cache_key: cache_key(config, &corpus_digest, &thesaurus_digest, &pairs_digest),
        corpus_digest,
        thesaurus_digest,
        pairs_digest,
        stats,
        timings: clock.timings,
        artifacts: BTreeMap::new(),
    };
    Ok(PipelineOutput {
        versions,
        patterns,
        counts,
        weighted,
        singular_values: svd.map_or_else(Vec::new, |s| s.singular_values),
        space,
        manifest,
    })
}

impl PipelineOutput {
    /// Writes every artifact into `dir` and records the paths in the
    /// returned manifest, which is also written.
    pub fn save(&self, dir: &Path) -> Result<RunManifest> {
        std::fs::create_dir_all(dir)?;
        let mut manifest = self.manifest.clone();
        let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, bytes)?;
            manifest.artifacts.insert(name.to_string(), path.display().to_string());
            Ok(())
        };
        put(VERSIONS_FILE, &serde_json::to_vec_pretty(&self.versions)?)?;
        put(PATTERNS_FILE, self.patterns.to_tsv().as_bytes())?;
        put(MATRIX_FILE, self.weighted.to_coordinate_text().as_bytes())?;
        put(SPACE_FILE, &self.space.to_bytes())?;
        manifest
            .artifacts
            .insert(MANIFEST_FILE.to_string(), dir.join(MANIFEST_FILE).display().to_string());
        std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_vec_pretty(&manifest)?)?;
        Ok(manifest)
    }

    pub fn model(&self) -> LraModel {
        LraModel::new(self.versions.clone(), self.space.clone())
    }
}

/// Answers relational similarity queries for the pairs of one run.
#[derive(Debug, Clone)]
pub struct LraModel {
    versions: HashMap<(String, String), PairVersions>,
    space: ProjectedSpace,
}

impl LraModel {
    pub fn new(versions: Vec<PairVersions>, space: ProjectedSpace) -> LraModel {
        let versions = versions.into_iter().map(|v| (v.original.key(), v)).collect();
        LraModel { versions, space }
    }

    /// Reads the versions and projected space saved by
    /// [`PipelineOutput::save`].
    pub fn load(dir: &Path) -> Result<LraModel> {
        let path = dir.join(VERSIONS_FILE);
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Read { path, source })?;
        let versions: Vec<PairVersions> = serde_json::from_str(&text)?;
        Ok(LraModel::new(versions, ProjectedSpace::load(&dir.join(SPACE_FILE))?))
    }

    pub fn space(&self) -> &ProjectedSpace {
        &self.space
    }

    /// Versions of `pair`; a pair given only in the other order is answered
    /// by reversing every version.
    pub fn versions_of(&self, pair: &WordPair) -> Result<PairVersions> {
        if let Some(v) = self.versions.get(&pair.key()) {
            return Ok(v.clone());
        }
        self.versions
            .get(&pair.reversed().key())
            .map(PairVersions::reversed)
            .ok_or_else(|| Error::UnknownPair(pair.to_string()))
    }

    pub fn similarity(&self, first: &WordPair, second: &WordPair) -> Result<SimilarityResult> {
        relational_similarity(&self.versions_of(first)?, &self.versions_of(second)?, &self.space)
    }
}

/// Reuses the artifacts in `dir` when their manifest carries the same cache
/// key; otherwise runs the pipeline and saves it there.
pub fn run_cached(
    config: &LraConfig,
    corpus: &Corpus,
    thesaurus: &Thesaurus,
    pairs: &[WordPair],
    dir: &Path,
) -> Result<(LraModel, RunManifest)> {
    let key = cache_key(config, &corpus_digest(corpus), &thesaurus_digest(thesaurus), &pairs_digest(pairs));
    let manifest_path = dir.join(MANIFEST_FILE);
    if let Ok(text) = std::fs::read_to_string(&manifest_path) {
        if let Ok(manifest) = serde_json::from_str::<RunManifest>(&text) {
            if manifest.cache_key == key {
                if let Ok(model) = LraModel::load(dir) {
                    log::info!("reusing artifacts in {}", dir.display());
                    return Ok((model, manifest));
                }
            }
        }
    }
    let output = run_pipeline(config, corpus, thesaurus, pairs)?;
    let manifest = output.save(dir)?;
    Ok((output.model(), manifest))
}
