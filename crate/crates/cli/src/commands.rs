use std::path::Path;
use std::sync::Arc;

use threatlens_client::{Client, ClientError};
use threatlens_core::api::VerdictResponse;
use threatlens_core::bundle::{GbdtEntry, NbEntry};
use threatlens_core::clock::{Clock, SystemClock};
use threatlens_core::dataset::{load_phishing_csv, load_spam_csv, DatasetError};
use threatlens_core::learners::{GbdtConfig, GbdtError};
use threatlens_core::pipeline::{
    evaluate_phishing, evaluate_spam, train_phishing, train_spam, PipelineError,
};
use threatlens_core::{
    load_model_bundle, save_model_bundle, BundleError, Engine, EngineError, EngineOptions,
    ModelBundle,
};
use threatlens_service::{ServeError, ServiceConfig};

use crate::args::{ClassifyArgs, Cli, EvaluateArgs, Hyperparameters, ServeArgs, Task, TrainArgs};
use crate::output::MetricsDoc;
use crate::EXIT_USAGE;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_TRAINING: u8 = 3;
pub const EXIT_PORT_BUSY: u8 = 4;
/// The service named by `--server` could not be reached.
pub const EXIT_UNAVAILABLE: u8 = 69;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        Self::new(EXIT_INPUT, e)
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        Self::new(EXIT_INPUT, e)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        // A bad split fraction is an argument problem, not a training failure.
        let code = match e {
            PipelineError::Split(_) => EXIT_USAGE,
            _ => EXIT_TRAINING,
        };
        Self::new(code, e)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::MalformedUrl(_) | EngineError::EmptyText => EXIT_INPUT,
            _ => EXIT_TRAINING,
        };
        Self::new(code, e)
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        let code = match e.code() {
            Some("model_not_loaded") => EXIT_TRAINING,
            Some(_) => EXIT_INPUT,
            None => EXIT_UNAVAILABLE,
        };
        Self::new(code, e)
    }
}

type CliResult = Result<(), CliError>;

fn service_config(cli: &Cli) -> Result<ServiceConfig, CliError> {
    let mut config = match &cli.config {
        Some(p) => ServiceConfig::load(p).map_err(|e| CliError::new(EXIT_INPUT, e))?,
        None => ServiceConfig::default(),
    };
    config
        .apply_env(|k| std::env::var(k).ok())
        .map_err(|e| CliError::new(EXIT_INPUT, e))?;
    Ok(config)
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::new(1, e))
}

fn gbdt_config(h: &Hyperparameters, seed: u64) -> GbdtConfig {
    let d = GbdtConfig::default();
    GbdtConfig {
        n_trees: h.n_trees.unwrap_or(d.n_trees),
        learning_rate: h.learning_rate.unwrap_or(d.learning_rate),
        max_leaves: h.max_leaves.unwrap_or(d.max_leaves),
        min_samples_leaf: h.min_samples_leaf.unwrap_or(d.min_samples_leaf),
        l2_lambda: h.l2_lambda.unwrap_or(d.l2_lambda),
        subsample: h.subsample.unwrap_or(d.subsample),
        colsample: h.colsample.unwrap_or(d.colsample),
        seed,
    }
}

/// The bundle at `path` if there is one, so retraining one task keeps the
/// other model.
fn existing_bundle(path: &Path) -> Result<Option<ModelBundle>, CliError> {
    if path.exists() {
        Ok(Some(load_model_bundle(path)?))
    } else {
        Ok(None)
    }
}

pub fn train(cli: &Cli, a: &TrainArgs) -> CliResult {
    let existing = existing_bundle(&a.output)?;
    let mut bundle = ModelBundle::new(SystemClock.now_ms());
    let (metrics, sizes) = match a.task {
        Task::Spam => {
            let data = load_spam_csv(&a.dataset)?;
            let out = train_spam(&data, a.train_fraction, cli.seed, a.hyper.alpha)?;
            bundle.nb = Some(NbEntry {
                model: out.model,
                metrics: Some(out.metrics),
            });
            (out.metrics, out.sizes)
        }
        Task::Url => {
            let data = load_phishing_csv(&a.dataset)?;
            let config = gbdt_config(&a.hyper, cli.seed);
            config
                .validate()
                .map_err(|e| CliError::new(EXIT_USAGE, e))?;
            let out = train_phishing(&data, a.train_fraction, cli.seed, &config)?;
            bundle.gbdt = Some(GbdtEntry {
                model: out.model,
                config: Some(config),
                metrics: Some(out.metrics),
            });
            (out.metrics, out.sizes)
        }
    };
    if let Some(old) = existing {
        bundle = bundle.merge_over(old);
    }
    save_model_bundle(&bundle, &a.output)?;
    MetricsDoc::new(
        a.task.name(),
        cli.seed,
        a.train_fraction,
        sizes,
        &metrics,
        &a.output,
    )
    .print(cli.json);
    Ok(())
}

pub fn evaluate(cli: &Cli, a: &EvaluateArgs) -> CliResult {
    let bundle = load_model_bundle(&a.bundle)?;
    let missing = |m: &str| CliError::new(EXIT_TRAINING, format!("bundle has no {m} model"));
    let (metrics, sizes) = match a.task {
        Task::Spam => {
            let model = &bundle.nb.as_ref().ok_or_else(|| missing("spam"))?.model;
            let data = load_spam_csv(&a.dataset)?;
            evaluate_spam(model, &data, a.train_fraction, cli.seed)?
        }
        Task::Url => {
            let model = &bundle.gbdt.as_ref().ok_or_else(|| missing("url"))?.model;
            let data = load_phishing_csv(&a.dataset)?;
            evaluate_phishing(model, &data, a.train_fraction, cli.seed).map_err(|e| match e {
                PipelineError::Gbdt(GbdtError::SchemaMismatch { .. }) => {
                    CliError::new(EXIT_TRAINING, format!("SchemaMismatch: {e}"))
                }
                other => other.into(),
            })?
        }
    };
    MetricsDoc::new(
        a.task.name(),
        cli.seed,
        a.train_fraction,
        sizes,
        &metrics,
        &a.bundle,
    )
    .print(cli.json);
    Ok(())
}

enum Input<'a> {
    Url(&'a str),
    Text(&'a str),
}

pub fn classify(cli: &Cli, a: &ClassifyArgs) -> CliResult {
    let input = match (&a.url, &a.text) {
        (Some(u), None) => Input::Url(u),
        (None, Some(t)) => Input::Text(t),
        _ => {
            return Err(CliError::new(
                EXIT_USAGE,
                "exactly one of --url or --text is required",
            ))
        }
    };
    let enrich = a.no_enrich.then_some(false);
    let config = service_config(cli)?;
    let rt = runtime()?;
    let verdict: VerdictResponse = if let Some(server) = &a.server {
        let client = Client::new(server).map_err(|e| CliError::new(EXIT_USAGE, e))?;
        rt.block_on(async {
            match input {
                Input::Url(u) => client.classify_url_with(u, enrich).await,
                Input::Text(t) => client.classify_text(t).await,
            }
        })?
    } else {
        let path = a.bundle.as_ref().or(config.bundle_path.as_ref()).ok_or_else(|| {
            CliError::new(EXIT_USAGE, "pass --bundle or --server (or set bundle_path)")
        })?;
        let bundle = load_model_bundle(path)?;
        let options = EngineOptions {
            url_threshold: config.thresholds.url,
            providers: config.providers.clone(),
            ..EngineOptions::default()
        };
        let engine = Engine::new(Some(bundle), options)?;
        match input {
            Input::Url(u) => rt.block_on(engine.classify_url(u, enrich))?,
            Input::Text(t) => engine.classify_text(t)?,
        }
    };
    println!(
        "{}",
        serde_json::to_string(&verdict).expect("verdict serializes")
    );
    Ok(())
}

async fn interrupted() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = ctrl_c => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => ctrl_c.await,
        }
    }
    #[cfg(not(unix))]
    ctrl_c.await;
    tracing::info!("shutting down");
}

pub fn serve(cli: &Cli, a: &ServeArgs) -> CliResult {
    let mut config = service_config(cli)?;
    if let Some(b) = &a.bundle {
        config.bundle_path = Some(b.clone());
    }
    if let Some(p) = a.port {
        config.set_port(p);
    }
    let serve_err = |e: ServeError| match e {
        ServeError::PortBusy(_) => CliError::new(EXIT_PORT_BUSY, e),
        ServeError::BadAddress(_) => CliError::new(EXIT_USAGE, e),
        _ => CliError::new(EXIT_INPUT, e),
    };
    let state = threatlens_service::state_from_config(&config, Arc::new(SystemClock))
        .map_err(serve_err)?;
    let rt = runtime()?;
    rt.block_on(async {
        let listener = threatlens_service::bind(&config.listen).await?;
        let addr = listener.local_addr()?;
        if cli.json {
            println!("{}", serde_json::json!({ "listening": addr.to_string() }));
        } else {
            println!("listening on http://{addr}");
        }
        threatlens_service::serve(listener, state, &config, interrupted()).await
    })
    .map_err(serve_err)
}
