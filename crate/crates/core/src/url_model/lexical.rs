//! Lexical URL features, named after the columns of the phishing dataset
//! they reproduce. Counts are taken over the raw input string without
//! percent-decoding.

use super::features::NamedFeatureMap;
use super::parse::UrlParts;
use super::suffix::HostList;

/// Every feature emitted by [`extract_lexical_features`], in emission order.
pub const LEXICAL_FEATURES: &[&str] = &[
    "length_url",
    "length_hostname",
    "ip",
    "nb_dots",
    "nb_hyphens",
    "nb_at",
    "nb_qm",
    "nb_and",
    "nb_or",
    "nb_eq",
    "nb_underscore",
    "nb_tilde",
    "nb_percent",
    "nb_slash",
    "nb_star",
    "nb_colon",
    "nb_comma",
    "nb_semicolumn",
    "nb_dollar",
    "nb_space",
    "nb_www",
    "nb_com",
    "nb_dslash",
    "http_in_path",
    "https_token",
    "ratio_digits_url",
    "ratio_digits_host",
    "punycode",
    "port",
    "tld_in_path",
    "tld_in_subdomain",
    "abnormal_subdomain",
    "nb_subdomains",
    "prefix_suffix",
    "shortening_service",
    "path_extension",
    "length_words_raw",
    "char_repeat",
    "shortest_words_raw",
    "shortest_word_host",
    "shortest_word_path",
    "longest_words_raw",
    "longest_word_host",
    "longest_word_path",
    "avg_words_raw",
    "avg_word_host",
    "avg_word_path",
    "phish_hints",
    "domain_in_brand",
    "brand_in_subdomain",
    "brand_in_path",
    "suspecious_tld",
];

const CHAR_COUNTS: &[(&str, char)] = &[
    ("nb_dots", '.'),
    ("nb_hyphens", '-'),
    ("nb_at", '@'),
    ("nb_qm", '?'),
    ("nb_and", '&'),
    ("nb_or", '|'),
    ("nb_eq", '='),
    ("nb_underscore", '_'),
    ("nb_tilde", '~'),
    ("nb_percent", '%'),
    ("nb_slash", '/'),
    ("nb_star", '*'),
    ("nb_colon", ':'),
    ("nb_comma", ','),
    ("nb_semicolumn", ';'),
    ("nb_dollar", '$'),
];

const PHISH_HINTS: &[&str] = &[
    "wp", "login", "includes", "admin", "content", "site", "images", "js", "alibaba", "css",
    "myaccount", "dropbox", "themes", "plugins", "signin", "view",
];

const BRANDS: &[&str] = &[
    "paypal", "apple", "microsoft", "google", "amazon", "facebook", "netflix", "instagram",
    "whatsapp", "linkedin", "twitter", "yahoo", "outlook", "office365", "dropbox", "adobe",
    "ebay", "alibaba", "chase", "wellsfargo", "bankofamerica", "citibank", "hsbc", "dhl",
    "fedex", "ups", "usps", "steam", "spotify", "icloud", "gmail", "hotmail", "live",
    "coinbase", "binance", "blockchain", "docusign", "americanexpress", "visa", "mastercard",
];

const SUSPICIOUS_TLDS: &[&str] = &[
    "tk", "ml", "ga", "cf", "gq", "xyz", "top", "work", "zip", "review", "country", "kim",
    "cricket", "science", "party", "link", "click", "loan", "men", "gdn", "racing", "win",
    "bid", "stream", "download", "accountant", "date", "faith", "webcam", "trade", "mom",
    "rest", "fit", "cam", "buzz",
];

const WORD_SEPARATORS: &[char] = &['-', '.', '/', '?', '=', '@', '&', '%', ':', '_'];

fn count_substr(haystack: &str, needle: &str) -> usize {
    haystack.matches(needle).count()
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn words(s: &str) -> Vec<&str> {
    s.split(WORD_SEPARATORS).filter(|w| !w.is_empty()).collect()
}

/// (shortest, longest, mean) word length, zeros for an empty list.
fn word_stats(ws: &[&str]) -> (f64, f64, f64) {
    if ws.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let lens: Vec<usize> = ws.iter().map(|w| w.chars().count()).collect();
    let min = *lens.iter().min().unwrap_or(&0) as f64;
    let max = *lens.iter().max().unwrap_or(&0) as f64;
    let mean = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
    (min, max, mean)
}

/// Windows of 2 to 5 identical consecutive characters, summed over words.
fn char_repeat(ws: &[&str]) -> usize {
    let mut total = 0;
    for w in ws {
        let chars: Vec<char> = w.chars().collect();
        for size in 2..=5 {
            if chars.len() < size {
                continue;
            }
            total += chars
                .windows(size)
                .filter(|win| win.iter().all(|&c| c == win[0]))
                .count();
        }
    }
    total
}

/// `ww1.` / `w3-` / `1w2` style first labels.
fn abnormal_subdomain(host: &str) -> bool {
    let label = host.split('.').next().unwrap_or("");
    let b = label.as_bytes();
    let lead = if b.starts_with(b"ww") {
        2
    } else if !b.is_empty() && (b[0] == b'w' || b[0].is_ascii_digit()) {
        1
    } else {
        return false;
    };
    let mut i = lead;
    if b.get(i) == Some(&b'w') {
        i += 1;
    }
    matches!(b.get(i), Some(c) if c.is_ascii_digit() || *c == b'-')
}

/// Compute every lexical feature for `raw`, whose decomposition is `parts`.
/// Total and deterministic; every value is finite.
pub fn extract_lexical_features(
    raw: &str,
    parts: &UrlParts,
    shorteners: &HostList,
) -> NamedFeatureMap {
    let mut f = NamedFeatureMap::new();
    let lower = raw.to_lowercase();
    let path_lower = parts.path.to_lowercase();
    let url_len = raw.chars().count();
    let host_len = parts.host.chars().count();

    f.set("length_url", url_len as f64);
    f.set("length_hostname", host_len as f64);
    f.set_flag("ip", parts.is_ip_host);
    for (name, c) in CHAR_COUNTS {
        f.set(*name, raw.chars().filter(|x| x == c).count() as f64);
    }
    f.set("nb_space", raw.chars().filter(|c| c.is_whitespace()).count() as f64);
    f.set("nb_www", count_substr(&lower, "www") as f64);
    f.set("nb_com", count_substr(&lower, "com") as f64);
    let after_scheme = match lower.find("://") {
        Some(i) => &lower[i + 3..],
        None => &lower[..],
    };
    f.set("nb_dslash", count_substr(after_scheme, "//") as f64);
    f.set("http_in_path", count_substr(&path_lower, "http") as f64);
    f.set_flag("https_token", parts.scheme != "https");

    let url_digits = raw.chars().filter(|c| c.is_ascii_digit()).count();
    let host_digits = parts.host.chars().filter(|c| c.is_ascii_digit()).count();
    f.set("ratio_digits_url", ratio(url_digits, url_len));
    f.set("ratio_digits_host", ratio(host_digits, host_len));
    f.set_flag(
        "punycode",
        parts.host.split('.').any(|l| l.starts_with("xn--")),
    );
    f.set_flag("port", parts.port.is_some());

    let subdomain = parts.subdomain();
    let tld = parts.tld.as_str();
    f.set_flag("tld_in_path", !tld.is_empty() && path_lower.contains(tld));
    f.set_flag("tld_in_subdomain", !tld.is_empty() && subdomain.contains(tld));
    f.set_flag("abnormal_subdomain", !parts.is_ip_host && abnormal_subdomain(&parts.host));
    f.set("nb_subdomains", parts.subdomain_labels.len() as f64);

    let domain_label = parts
        .registrable_domain
        .split('.')
        .next()
        .unwrap_or_default()
        .to_string();
    f.set_flag("prefix_suffix", !parts.is_ip_host && domain_label.contains('-'));
    f.set_flag("shortening_service", shorteners.contains(&parts.host));
    f.set_flag("path_extension", path_lower.ends_with(".txt"));

    let host_words = words(&parts.host);
    let path_words = words(&parts.path);
    let all_words: Vec<&str> = host_words.iter().chain(path_words.iter()).copied().collect();
    f.set("length_words_raw", all_words.len() as f64);
    f.set("char_repeat", char_repeat(&all_words) as f64);
    let (s_all, l_all, a_all) = word_stats(&all_words);
    let (s_host, l_host, a_host) = word_stats(&host_words);
    let (s_path, l_path, a_path) = word_stats(&path_words);
    f.set("shortest_words_raw", s_all);
    f.set("shortest_word_host", s_host);
    f.set("shortest_word_path", s_path);
    f.set("longest_words_raw", l_all);
    f.set("longest_word_host", l_host);
    f.set("longest_word_path", l_path);
    f.set("avg_words_raw", a_all);
    f.set("avg_word_host", a_host);
    f.set("avg_word_path", a_path);

    f.set(
        "phish_hints",
        PHISH_HINTS
            .iter()
            .map(|h| count_substr(&path_lower, h))
            .sum::<usize>() as f64,
    );

    let sub_words = words(&subdomain);
    let path_word_set: Vec<String> = path_words.iter().map(|w| w.to_lowercase()).collect();
    f.set_flag("domain_in_brand", BRANDS.contains(&domain_label.as_str()));
    f.set_flag(
        "brand_in_subdomain",
        sub_words
            .iter()
            .any(|w| BRANDS.contains(w) && *w != domain_label),
    );
    f.set_flag(
        "brand_in_path",
        path_word_set
            .iter()
            .any(|w| BRANDS.contains(&w.as_str()) && *w != domain_label),
    );
    let last_tld_label = tld.rsplit('.').next().unwrap_or_default();
    f.set_flag("suspecious_tld", SUSPICIOUS_TLDS.contains(&last_tld_label));
    f
}
