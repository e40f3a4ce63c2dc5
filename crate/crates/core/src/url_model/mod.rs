//! URL parsing and lexical feature extraction.
//!
//! Everything in this module is a pure function of the raw URL string and the
//! bundled reference lists (public suffixes and URL shorteners).

mod features;
mod lexical;
mod parse;
mod suffix;

use std::path::Path;
use std::sync::{Arc, OnceLock};

pub use features::{FeatureValue, NamedFeatureMap};
pub use lexical::{extract_lexical_features, LEXICAL_FEATURES};
pub use parse::{UrlError, UrlParts};
pub use suffix::{HostList, SuffixList};

const DEFAULT_SUFFIXES: &str = include_str!("../../data/public_suffix.txt");
const DEFAULT_SHORTENERS: &str = include_str!("../../data/shorteners.txt");

/// Reference data needed to parse URLs and compute lexical features.
#[derive(Debug, Clone)]
pub struct UrlAnalyzer {
    suffixes: Arc<SuffixList>,
    shorteners: Arc<HostList>,
}

impl UrlAnalyzer {
    /// Analyzer backed by the snapshots compiled into the crate.
    pub fn bundled() -> Self {
        static BUNDLED: OnceLock<UrlAnalyzer> = OnceLock::new();
        BUNDLED
            .get_or_init(|| UrlAnalyzer {
                suffixes: Arc::new(SuffixList::parse(DEFAULT_SUFFIXES)),
                shorteners: Arc::new(HostList::parse(DEFAULT_SHORTENERS)),
            })
            .clone()
    }

    /// Analyzer reading its reference lists from disk. Either path may be
    /// omitted to keep the bundled default.
    pub fn from_files(
        suffix_path: Option<&Path>,
        shortener_path: Option<&Path>,
    ) -> std::io::Result<Self> {
        let bundled = Self::bundled();
        let suffixes = match suffix_path {
            Some(p) => Arc::new(SuffixList::parse(&std::fs::read_to_string(p)?)),
            None => bundled.suffixes,
        };
        let shorteners = match shortener_path {
            Some(p) => Arc::new(HostList::parse(&std::fs::read_to_string(p)?)),
            None => bundled.shorteners,
        };
        Ok(Self {
            suffixes,
            shorteners,
        })
    }

    pub fn suffixes(&self) -> &SuffixList {
        &self.suffixes
    }

    pub fn shorteners(&self) -> &HostList {
        &self.shorteners
    }

    pub fn parse(&self, raw: &str) -> Result<UrlParts, UrlError> {
        parse::parse_with(raw, &self.suffixes)
    }

    pub fn lexical_features(&self, raw: &str, parts: &UrlParts) -> NamedFeatureMap {
        extract_lexical_features(raw, parts, &self.shorteners)
    }
}

/// Parse with the bundled public-suffix snapshot.
pub fn parse_url(raw: &str) -> Result<UrlParts, UrlError> {
    UrlAnalyzer::bundled().parse(raw)
}
