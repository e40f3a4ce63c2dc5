//! Runtime classification over a loaded bundle: the URL path (parse, lexical
//! features, optional providers, assemble, GBDT) and the text path
//! (preprocess, vectorize, NB).

use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::api::{truncate_echo, ProviderSummary, Verdict, VerdictResponse};
use crate::bundle::{BundleError, ModelBundle, FORMAT_VERSION};
use crate::enrichment::{
    assemble_feature_vector, query_external_features, AssembleError, FeatureProvider,
    FeatureVector, Imputation, ProviderConfig, ProviderError,
};
use crate::learners::{gbdt_predict, nb_predict, GbdtError, GbdtModel, NbError, NbModel};
use crate::text::{compute_text_stats, preprocess, vectorize};
use crate::url_model::{UrlAnalyzer, UrlError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("malformed URL: {0}")]
    MalformedUrl(#[from] UrlError),
    #[error("text is empty")]
    EmptyText,
    #[error("no {0} model loaded")]
    ModelNotLoaded(&'static str),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error(transparent)]
    Nb(#[from] NbError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// URLs scoring at or above this are phishing.
    pub url_threshold: f64,
    pub providers: ProviderConfig,
    pub analyzer: UrlAnalyzer,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            url_threshold: 0.5,
            providers: ProviderConfig::default(),
            analyzer: UrlAnalyzer::bundled(),
        }
    }
}

/// Immutable once built; reloading a bundle means building a new engine.
pub struct Engine {
    nb: Option<NbModel>,
    gbdt: Option<GbdtModel>,
    model_version: String,
    options: EngineOptions,
    providers: Vec<Arc<dyn FeatureProvider>>,
}

impl Engine {
    pub fn new(bundle: Option<ModelBundle>, options: EngineOptions) -> Result<Self, EngineError> {
        let providers = if options.providers.enabled {
            options.providers.build()?
        } else {
            Vec::new()
        };
        let (nb, gbdt, model_version) = match bundle {
            Some(b) => {
                let version = b.checksum()?[..12].to_string();
                (b.nb.map(|e| e.model), b.gbdt.map(|e| e.model), version)
            }
            None => (None, None, "none".to_string()),
        };
        Ok(Self {
            nb,
            gbdt,
            model_version,
            options,
            providers,
        })
    }

    pub fn empty() -> Self {
        Self::new(None, EngineOptions::default()).expect("no providers to build")
    }

    pub fn model_version(&self) -> &str {
        &self.model_version
    }

    pub fn format_version(&self) -> u32 {
        FORMAT_VERSION
    }

    pub fn models_loaded(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.nb.is_some() {
            v.push("nb".to_string());
        }
        if self.gbdt.is_some() {
            v.push("gbdt".to_string());
        }
        v
    }

    pub fn gbdt(&self) -> Option<&GbdtModel> {
        self.gbdt.as_ref()
    }

    pub fn nb(&self) -> Option<&NbModel> {
        self.nb.as_ref()
    }

    /// Enrichment runs only when the provider block enables it; a request
    /// may still opt out.
    fn enrich_requested(&self, enrich: Option<bool>) -> bool {
        self.options.providers.enabled && !self.providers.is_empty() && enrich.unwrap_or(true)
    }

    pub async fn url_vector(
        &self,
        url: &str,
        enrich: Option<bool>,
    ) -> Result<(FeatureVector, Option<Vec<ProviderSummary>>), EngineError> {
        let model = self.gbdt.as_ref().ok_or(EngineError::ModelNotLoaded("gbdt"))?;
        let analyzer = &self.options.analyzer;
        let parts = analyzer.parse(url)?;
        let lexical = analyzer.lexical_features(url, &parts);
        let mut maps = vec![lexical];
        let mut summaries = None;
        if self.enrich_requested(enrich) {
            let reports =
                query_external_features(&parts, &self.providers, self.options.providers.timeout())
                    .await?;
            summaries = Some(
                reports
                    .iter()
                    .map(|r| ProviderSummary {
                        provider_id: r.provider_id.clone(),
                        outcome: r.outcome,
                        latency_ms: r.latency_ms,
                    })
                    .collect(),
            );
            maps.extend(reports.into_iter().map(|r| r.features));
        }
        let refs: Vec<_> = maps.iter().collect();
        let vector = assemble_feature_vector(&model.schema, &refs, Imputation::default())?;
        Ok((vector, summaries))
    }

    pub async fn classify_url(
        &self,
        url: &str,
        enrich: Option<bool>,
    ) -> Result<VerdictResponse, EngineError> {
        let start = Instant::now();
        let model = self.gbdt.as_ref().ok_or(EngineError::ModelNotLoaded("gbdt"))?;
        let (vector, providers) = self.url_vector(url, enrich).await?;
        let score = gbdt_predict(model, &vector)?;
        let verdict = if score >= self.options.url_threshold {
            Verdict::Phishing
        } else {
            Verdict::Legitimate
        };
        Ok(VerdictResponse {
            input_echo: truncate_echo(url),
            verdict,
            score,
            model_version: self.model_version.clone(),
            latency_ms: start.elapsed().as_secs_f64() * 1e3,
            imputed_feature_count: Some(vector.imputed_count()),
            text_stats: None,
            providers,
        })
    }

    pub fn classify_text(&self, text: &str) -> Result<VerdictResponse, EngineError> {
        let start = Instant::now();
        let model = self.nb.as_ref().ok_or(EngineError::ModelNotLoaded("nb"))?;
        if text.trim().is_empty() {
            return Err(EngineError::EmptyText);
        }
        let vector = vectorize(&preprocess(text), &model.vocabulary);
        let prediction = nb_predict(model, &vector)?;
        let verdict = match prediction.label {
            crate::dataset::SpamLabel::Spam => Verdict::Spam,
            crate::dataset::SpamLabel::Ham => Verdict::Ham,
        };
        Ok(VerdictResponse {
            input_echo: truncate_echo(text),
            verdict,
            score: prediction.spam_probability(),
            model_version: self.model_version.clone(),
            latency_ms: start.elapsed().as_secs_f64() * 1e3,
            imputed_feature_count: None,
            text_stats: Some(compute_text_stats(text)),
            providers: None,
        })
    }
}
