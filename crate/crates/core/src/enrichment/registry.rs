use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Lexical,
    Content,
    External,
    Unknown,
}

/// Where each column of the 87-feature phishing schema comes from.
///
/// Lexical columns are computed from the URL string, content columns from
/// the page markup and external columns from registration records or search
/// indexes. Columns with no extractor in this crate (for example
/// `random_domain` or the redirection counts, which need live fetches) are
/// still listed so they get a group; at serve time they are imputed.
pub const FEATURE_REGISTRY: &[(&str, FeatureGroup)] = &[
    ("length_url", FeatureGroup::Lexical),
    ("length_hostname", FeatureGroup::Lexical),
    ("ip", FeatureGroup::Lexical),
    ("nb_dots", FeatureGroup::Lexical),
    ("nb_hyphens", FeatureGroup::Lexical),
    ("nb_at", FeatureGroup::Lexical),
    ("nb_qm", FeatureGroup::Lexical),
    ("nb_and", FeatureGroup::Lexical),
    ("nb_or", FeatureGroup::Lexical),
    ("nb_eq", FeatureGroup::Lexical),
    ("nb_underscore", FeatureGroup::Lexical),
    ("nb_tilde", FeatureGroup::Lexical),
    ("nb_percent", FeatureGroup::Lexical),
    ("nb_slash", FeatureGroup::Lexical),
    ("nb_star", FeatureGroup::Lexical),
    ("nb_colon", FeatureGroup::Lexical),
    ("nb_comma", FeatureGroup::Lexical),
    ("nb_semicolumn", FeatureGroup::Lexical),
    ("nb_dollar", FeatureGroup::Lexical),
    ("nb_space", FeatureGroup::Lexical),
    ("nb_www", FeatureGroup::Lexical),
    ("nb_com", FeatureGroup::Lexical),
    ("nb_dslash", FeatureGroup::Lexical),
    ("http_in_path", FeatureGroup::Lexical),
    ("https_token", FeatureGroup::Lexical),
    ("ratio_digits_url", FeatureGroup::Lexical),
    ("ratio_digits_host", FeatureGroup::Lexical),
    ("punycode", FeatureGroup::Lexical),
    ("port", FeatureGroup::Lexical),
    ("tld_in_path", FeatureGroup::Lexical),
    ("tld_in_subdomain", FeatureGroup::Lexical),
    ("abnormal_subdomain", FeatureGroup::Lexical),
    ("nb_subdomains", FeatureGroup::Lexical),
    ("prefix_suffix", FeatureGroup::Lexical),
    ("random_domain", FeatureGroup::Lexical),
    ("shortening_service", FeatureGroup::Lexical),
    ("path_extension", FeatureGroup::Lexical),
    ("nb_redirection", FeatureGroup::Content),
    ("nb_external_redirection", FeatureGroup::Content),
    ("length_words_raw", FeatureGroup::Lexical),
    ("char_repeat", FeatureGroup::Lexical),
    ("shortest_words_raw", FeatureGroup::Lexical),
    ("shortest_word_host", FeatureGroup::Lexical),
    ("shortest_word_path", FeatureGroup::Lexical),
    ("longest_words_raw", FeatureGroup::Lexical),
    ("longest_word_host", FeatureGroup::Lexical),
    ("longest_word_path", FeatureGroup::Lexical),
    ("avg_words_raw", FeatureGroup::Lexical),
    ("avg_word_host", FeatureGroup::Lexical),
    ("avg_word_path", FeatureGroup::Lexical),
    ("phish_hints", FeatureGroup::Lexical),
    ("domain_in_brand", FeatureGroup::Lexical),
    ("brand_in_subdomain", FeatureGroup::Lexical),
    ("brand_in_path", FeatureGroup::Lexical),
    ("suspecious_tld", FeatureGroup::Lexical),
    ("statistical_report", FeatureGroup::External),
    ("nb_hyperlinks", FeatureGroup::Content),
    ("ratio_intHyperlinks", FeatureGroup::Content),
    ("ratio_extHyperlinks", FeatureGroup::Content),
    ("ratio_nullHyperlinks", FeatureGroup::Content),
    ("nb_extCSS", FeatureGroup::Content),
    ("ratio_intRedirection", FeatureGroup::Content),
    ("ratio_extRedirection", FeatureGroup::Content),
    ("ratio_intErrors", FeatureGroup::Content),
    ("ratio_extErrors", FeatureGroup::Content),
    ("login_form", FeatureGroup::Content),
    ("external_favicon", FeatureGroup::Content),
    ("links_in_tags", FeatureGroup::Content),
    ("submit_email", FeatureGroup::Content),
    ("ratio_intMedia", FeatureGroup::Content),
    ("ratio_extMedia", FeatureGroup::Content),
    ("sfh", FeatureGroup::Content),
    ("iframe", FeatureGroup::Content),
    ("popup_window", FeatureGroup::Content),
    ("safe_anchor", FeatureGroup::Content),
    ("onmouseover", FeatureGroup::Content),
    ("right_clic", FeatureGroup::Content),
    ("empty_title", FeatureGroup::Content),
    ("domain_in_title", FeatureGroup::Content),
    ("domain_with_copyright", FeatureGroup::Content),
    ("whois_registered_domain", FeatureGroup::External),
    ("domain_registration_length", FeatureGroup::External),
    ("domain_age", FeatureGroup::External),
    ("web_traffic", FeatureGroup::External),
    ("dns_record", FeatureGroup::External),
    ("google_index", FeatureGroup::External),
    ("page_rank", FeatureGroup::External),
];

/// Columns that identify a row rather than describe it.
pub const IDENTIFIER_COLUMNS: &[&str] = &["url"];

pub fn group_of(name: &str) -> FeatureGroup {
    FEATURE_REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| *g)
        .unwrap_or(FeatureGroup::Unknown)
}
