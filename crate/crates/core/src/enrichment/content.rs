//! Markup features from a fetched page. The scanner is tolerant: it walks
//! `<tag attr=value ...>` occurrences and never fails on malformed input.

use crate::url_model::{parse_url, NamedFeatureMap, UrlParts};

/// Every feature emitted by [`extract_content_features`].
pub const CONTENT_FEATURES: &[&str] = &[
    "nb_hyperlinks",
    "ratio_intHyperlinks",
    "ratio_extHyperlinks",
    "ratio_nullHyperlinks",
    "nb_extCSS",
    "login_form",
    "external_favicon",
    "links_in_tags",
    "submit_email",
    "ratio_intMedia",
    "ratio_extMedia",
    "sfh",
    "iframe",
    "popup_window",
    "safe_anchor",
    "onmouseover",
    "right_clic",
    "empty_title",
    "domain_in_title",
    "domain_with_copyright",
    "nb_external_resources",
];

#[derive(Debug)]
struct Tag {
    name: String,
    attrs: Vec<(String, String)>,
}

impl Tag {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

fn scan_tags(html: &str) -> Vec<Tag> {
    let bytes = html.as_bytes();
    let mut tags = Vec::new();
    let mut i = 0;
    while let Some(off) = html[i..].find('<') {
        let start = i + off + 1;
        if html[start..].starts_with("!--") {
            i = match html[start..].find("-->") {
                Some(end) => start + end + 3,
                None => html.len(),
            };
            continue;
        }
        let mut j = start;
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'/') {
            j += 1;
        }
        let name = html[start..j].trim_start_matches('/').to_ascii_lowercase();
        let mut attrs = Vec::new();
        // attributes until '>'
        loop {
            while j < bytes.len() && (bytes[j].is_ascii_whitespace() || bytes[j] == b'/') {
                j += 1;
            }
            if j >= bytes.len() || bytes[j] == b'>' || bytes[j] == b'<' {
                break;
            }
            let an_start = j;
            while j < bytes.len()
                && !bytes[j].is_ascii_whitespace()
                && !matches!(bytes[j], b'=' | b'>' | b'<')
            {
                j += 1;
            }
            let attr_name = html[an_start..j].to_ascii_lowercase();
            while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                j += 1;
            }
            let mut value = String::new();
            if j < bytes.len() && bytes[j] == b'=' {
                j += 1;
                while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'"' || bytes[j] == b'\'') {
                    let q = bytes[j];
                    let vs = j + 1;
                    let ve = html[vs..]
                        .bytes()
                        .position(|b| b == q)
                        .map(|p| vs + p)
                        .unwrap_or(html.len());
                    value = html[vs..ve].to_string();
                    j = (ve + 1).min(html.len());
                } else {
                    let vs = j;
                    while j < bytes.len() && !bytes[j].is_ascii_whitespace() && bytes[j] != b'>' {
                        j += 1;
                    }
                    value = html[vs..j].to_string();
                }
            }
            if !attr_name.is_empty() {
                attrs.push((attr_name, value.trim().to_string()));
            }
        }
        if !name.is_empty() && !html[start..].starts_with('/') {
            tags.push(Tag { name, attrs });
        }
        i = j.min(html.len()).max(start);
        if i < html.len() && bytes[i] == b'>' {
            i += 1;
        }
    }
    tags
}

#[derive(Debug, PartialEq, Eq)]
enum LinkKind {
    Null,
    Internal,
    External,
}

fn classify_link(href: &str, page: &UrlParts) -> LinkKind {
    let h = href.trim().to_ascii_lowercase();
    if h.is_empty() || h.starts_with('#') || h.starts_with("javascript:") || h == "about:blank" {
        return LinkKind::Null;
    }
    let absolute = h.starts_with("http://") || h.starts_with("https://") || h.starts_with("//");
    if !absolute {
        return LinkKind::Internal;
    }
    let target = if let Some(rest) = h.strip_prefix("//") {
        format!("http://{rest}")
    } else {
        h
    };
    match parse_url(&target) {
        Ok(p) if p.registrable_domain == page.registrable_domain => LinkKind::Internal,
        _ => LinkKind::External,
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

fn title_text(html: &str) -> Option<String> {
    let lower = html.to_ascii_lowercase();
    let open = lower.find("<title")?;
    let body_start = open + lower[open..].find('>')? + 1;
    let end = lower[body_start..]
        .find("</title")
        .map(|e| body_start + e)
        .unwrap_or(html.len());
    Some(html[body_start..end].trim().to_string())
}

/// Content features for the page at `page`. An empty document (an
/// unfetchable page) yields every feature as missing.
pub fn extract_content_features(html: &str, page: &UrlParts) -> NamedFeatureMap {
    let mut f = NamedFeatureMap::new();
    if html.trim().is_empty() {
        for name in CONTENT_FEATURES {
            f.set_missing(*name);
        }
        return f;
    }
    let tags = scan_tags(html);
    let lower = html.to_ascii_lowercase();

    let mut links = Vec::new();
    let mut anchors = Vec::new();
    let mut media = Vec::new();
    let mut tag_links = Vec::new();
    let mut ext_css = 0;
    let mut external_favicon = false;
    let mut has_password = false;
    let mut submit_email = false;
    let mut sfh = false;
    let mut iframe = false;
    let mut onmouseover = false;

    for t in &tags {
        if t.attr("onmouseover").is_some() {
            onmouseover = true;
        }
        match t.name.as_str() {
            "a" | "area" => {
                if let Some(href) = t.attr("href") {
                    let kind = classify_link(href, page);
                    anchors.push(href.to_ascii_lowercase());
                    links.push(kind);
                }
            }
            "link" => {
                if let Some(href) = t.attr("href") {
                    let kind = classify_link(href, page);
                    let rel = t.attr("rel").unwrap_or("").to_ascii_lowercase();
                    if rel.contains("stylesheet") && kind == LinkKind::External {
                        ext_css += 1;
                    }
                    if rel.contains("icon") && kind == LinkKind::External {
                        external_favicon = true;
                    }
                    tag_links.push(classify_link(href, page));
                    links.push(kind);
                }
            }
            "script" => {
                if let Some(src) = t.attr("src") {
                    tag_links.push(classify_link(src, page));
                    links.push(classify_link(src, page));
                }
            }
            "img" | "audio" | "video" | "source" | "embed" => {
                if let Some(src) = t.attr("src") {
                    let kind = classify_link(src, page);
                    media.push(classify_link(src, page));
                    if t.name == "img" {
                        links.push(kind);
                    }
                }
            }
            "iframe" | "frame" => {
                iframe = true;
                if let Some(src) = t.attr("src") {
                    links.push(classify_link(src, page));
                }
            }
            "input" => {
                if t.attr("type").is_some_and(|v| v.eq_ignore_ascii_case("password")) {
                    has_password = true;
                }
            }
            "form" => {
                let action = t.attr("action").unwrap_or("").trim().to_ascii_lowercase();
                if action.starts_with("mailto:") {
                    submit_email = true;
                }
                if action.is_empty() || action == "about:blank" || action == "#" {
                    sfh = true;
                }
            }
            _ => {}
        }
    }

    let count = |v: &[LinkKind], k: LinkKind| v.iter().filter(|x| **x == k).count();
    let n = links.len();
    f.set("nb_hyperlinks", n as f64);
    f.set("ratio_intHyperlinks", ratio(count(&links, LinkKind::Internal), n));
    f.set("ratio_extHyperlinks", ratio(count(&links, LinkKind::External), n));
    f.set("ratio_nullHyperlinks", ratio(count(&links, LinkKind::Null), n));
    f.set("nb_extCSS", ext_css as f64);
    f.set_flag("login_form", has_password);
    f.set_flag("external_favicon", external_favicon);
    f.set(
        "links_in_tags",
        100.0 * ratio(count(&tag_links, LinkKind::Internal), tag_links.len()),
    );
    f.set_flag("submit_email", submit_email);
    f.set(
        "ratio_intMedia",
        100.0 * ratio(count(&media, LinkKind::Internal), media.len()),
    );
    f.set(
        "ratio_extMedia",
        100.0 * ratio(count(&media, LinkKind::External), media.len()),
    );
    f.set_flag("sfh", sfh);
    f.set_flag("iframe", iframe);
    f.set_flag(
        "popup_window",
        lower.contains("prompt(") || lower.contains("window.open("),
    );
    let unsafe_anchors = anchors
        .iter()
        .filter(|a| a.starts_with('#') || a.starts_with("javascript") || a.starts_with("mailto"))
        .count();
    f.set("safe_anchor", 100.0 * ratio(unsafe_anchors, anchors.len()));
    f.set_flag("onmouseover", onmouseover);
    f.set_flag(
        "right_clic",
        lower.contains("event.button==2") || lower.contains("event.button == 2"),
    );

    let domain_label = page
        .registrable_domain
        .split('.')
        .next()
        .unwrap_or_default()
        .to_string();
    let title = title_text(html).unwrap_or_default();
    f.set_flag("empty_title", title.is_empty());
    // 1 when the page's domain is absent from the title.
    f.set_flag(
        "domain_in_title",
        domain_label.is_empty() || !title.to_lowercase().contains(&domain_label),
    );
    let copyright = lower.find('©').or_else(|| lower.find("&copy;"));
    let domain_with_copyright = match copyright {
        Some(pos) => {
            let window: String = lower[pos..].chars().take(60).collect();
            !window.contains(&domain_label)
        }
        None => false,
    };
    f.set_flag("domain_with_copyright", domain_with_copyright);
    f.set(
        "nb_external_resources",
        (count(&links, LinkKind::External) + count(&media, LinkKind::External)) as f64,
    );
    f
}
