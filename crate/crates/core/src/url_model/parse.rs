use std::net::Ipv6Addr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::suffix::SuffixList;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrlError {
    #[error("malformed URL: {0}")]
    Malformed(String),
}

fn malformed(reason: impl Into<String>) -> UrlError {
    UrlError::Malformed(reason.into())
}

/// Structural decomposition of a URL. Scheme and host are lowercased; every
/// other part is kept verbatim, percent-encodings included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlParts {
    pub scheme: String,
    pub host: String,
    pub port: Option<u16>,
    pub path: String,
    pub query: String,
    pub fragment: String,
    pub is_ip_host: bool,
    pub subdomain_labels: Vec<String>,
    pub registrable_domain: String,
    pub tld: String,
}

impl UrlParts {
    /// `scheme://host[:port]path[?query][#fragment]`
    pub fn reassemble(&self) -> String {
        let mut out = format!("{}://{}", self.scheme, self.host);
        if let Some(port) = self.port {
            out.push(':');
            out.push_str(&port.to_string());
        }
        out.push_str(&self.path);
        if !self.query.is_empty() {
            out.push('?');
            out.push_str(&self.query);
        }
        if !self.fragment.is_empty() {
            out.push('#');
            out.push_str(&self.fragment);
        }
        out
    }

    pub fn subdomain(&self) -> String {
        self.subdomain_labels.join(".")
    }
}

fn is_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_dotted_quad(host: &str) -> bool {
    let parts: Vec<&str> = host.split('.').collect();
    parts.len() == 4
        && parts.iter().all(|p| {
            (1..=3).contains(&p.len())
                && p.bytes().all(|b| b.is_ascii_digit())
                && p.parse::<u16>().map(|v| v <= 255).unwrap_or(false)
        })
}

fn illegal_host_char(c: char) -> bool {
    c.is_whitespace()
        || c.is_control()
        || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`' | '[' | ']' | '/')
}

fn parse_port(s: &str) -> Result<u16, UrlError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("invalid port {s:?}")));
    }
    match s.parse::<u32>() {
        Ok(p) if (1..=65535).contains(&p) => Ok(p as u16),
        _ => Err(malformed(format!("port {s} out of range"))),
    }
}

pub(super) fn parse_with(raw: &str, suffixes: &SuffixList) -> Result<UrlParts, UrlError> {
    let input = raw.trim();
    if input.is_empty() {
        return Err(malformed("empty input"));
    }

    let (scheme, rest) = match input.find("://") {
        Some(idx) if !input[..idx].contains(['/', '?', '#']) => {
            let candidate = &input[..idx];
            if !is_scheme(candidate) {
                return Err(malformed(format!("illegal scheme {candidate:?}")));
            }
            (candidate.to_ascii_lowercase(), &input[idx + 3..])
        }
        _ => ("http".to_string(), input),
    };

    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let authority = &rest[..authority_end];
    let tail = &rest[authority_end..];

    let hostport = match authority.rfind('@') {
        Some(at) => &authority[at + 1..],
        None => authority,
    };
    if hostport.is_empty() {
        return Err(malformed("no host"));
    }

    let (host, port, bracketed) = if let Some(inner) = hostport.strip_prefix('[') {
        let close = inner
            .find(']')
            .ok_or_else(|| malformed("unterminated IPv6 literal"))?;
        let literal = &inner[..close];
        if literal.parse::<Ipv6Addr>().is_err() {
            return Err(malformed(format!("invalid IPv6 literal {literal:?}")));
        }
        let after = &inner[close + 1..];
        let port = match after.strip_prefix(':') {
            Some(p) => Some(parse_port(p)?),
            None if after.is_empty() => None,
            None => return Err(malformed("garbage after IPv6 literal")),
        };
        (format!("[{}]", literal.to_lowercase()), port, true)
    } else {
        let (h, port) = match hostport.rsplit_once(':') {
            Some((h, p)) => (h, Some(parse_port(p)?)),
            None => (hostport, None),
        };
        (h.to_lowercase(), port, false)
    };

    if !bracketed {
        if host.is_empty() {
            return Err(malformed("no host"));
        }
        if let Some(c) = host.chars().find(|&c| illegal_host_char(c) || c == ':') {
            return Err(malformed(format!("illegal character {c:?} in host")));
        }
        if host.split('.').any(str::is_empty) {
            return Err(malformed("empty host label"));
        }
    }

    let (before_fragment, fragment) = match tail.split_once('#') {
        Some((a, f)) => (a, f),
        None => (tail, ""),
    };
    let (path, query) = match before_fragment.split_once('?') {
        Some((p, q)) => (p, q),
        None => (before_fragment, ""),
    };

    let is_ip_host = bracketed || is_dotted_quad(&host);
    let (subdomain_labels, registrable_domain, tld) = if is_ip_host {
        (Vec::new(), host.clone(), String::new())
    } else {
        let labels: Vec<&str> = host.split('.').collect();
        let suffix_len = suffixes.suffix_len(&labels);
        let n = labels.len();
        let tld = labels[n - suffix_len..].join(".");
        if n > suffix_len {
            let registrable = labels[n - suffix_len - 1..].join(".");
            let subs = labels[..n - suffix_len - 1]
                .iter()
                .map(|s| s.to_string())
                .collect();
            (subs, registrable, tld)
        } else {
            (Vec::new(), host.clone(), tld)
        }
    };

    Ok(UrlParts {
        scheme,
        host,
        port,
        path: path.to_string(),
        query: query.to_string(),
        fragment: fragment.to_string(),
        is_ip_host,
        subdomain_labels,
        registrable_domain,
        tld,
    })
}

#[cfg(test)]
mod tests {
    use crate::url_model::parse_url;

    #[test]
    fn simple_decomposition() {
        let p = parse_url("http://example.com/a?b=1").unwrap();
        assert_eq!(p.scheme, "http");
        assert_eq!(p.host, "example.com");
        assert_eq!(p.path, "/a");
        assert_eq!(p.query, "b=1");
        assert_eq!(p.fragment, "");
        assert_eq!(p.port, None);
        assert!(!p.is_ip_host);
        assert_eq!(p.registrable_domain, "example.com");
        assert_eq!(p.tld, "com");
    }

    #[test]
    fn multi_label_suffix_and_port() {
        let p = parse_url("https://sub.example.co.uk:8080/p").unwrap();
        assert_eq!(p.port, Some(8080));
        assert_eq!(p.subdomain_labels, vec!["sub".to_string()]);
        assert_eq!(p.tld, "co.uk");
        assert_eq!(p.registrable_domain, "example.co.uk");
        assert_eq!(p.path, "/p");
    }

    #[test]
    fn ip_hosts() {
        assert!(parse_url("http://192.168.1.1/login").unwrap().is_ip_host);
        let v6 = parse_url("http://[2001:DB8::1]:8443/x").unwrap();
        assert!(v6.is_ip_host);
        assert_eq!(v6.host, "[2001:db8::1]");
        assert_eq!(v6.port, Some(8443));
        assert!(!parse_url("http://192.168.1.300/").unwrap().is_ip_host);
        assert!(!parse_url("http://1.2.3/").unwrap().is_ip_host);
    }

    #[test]
    fn scheme_less_input_assumes_http() {
        let p = parse_url("Example.com/x").unwrap();
        assert_eq!(p.scheme, "http");
        assert_eq!(p.host, "example.com");
        assert_eq!(p.path, "/x");
    }

    #[test]
    fn embedded_url_in_query_is_not_a_scheme() {
        let p = parse_url("example.com/r?u=http://evil.tk").unwrap();
        assert_eq!(p.host, "example.com");
        assert_eq!(p.query, "u=http://evil.tk");
    }

    #[test]
    fn userinfo_is_dropped_from_host() {
        let p = parse_url("http://paypal.com@evil.ru/x").unwrap();
        assert_eq!(p.host, "evil.ru");
    }

    #[test]
    fn percent_encoding_is_preserved() {
        let p = parse_url("http://example.com/a%20b?q=%2F#f%41").unwrap();
        assert_eq!(p.path, "/a%20b");
        assert_eq!(p.query, "q=%2F");
        assert_eq!(p.fragment, "f%41");
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "   ",
            "not a url ::",
            "http://",
            "http:///path",
            "ht tp://example.com",
            "http://example.com:0/",
            "http://example.com:70000/",
            "http://example.com:/",
            "http://exa mple.com/",
            "http://a..b.com/",
            "http://[zz::1]/",
        ] {
            assert!(parse_url(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn host_equal_to_suffix() {
        let p = parse_url("http://co.uk/").unwrap();
        assert_eq!(p.registrable_domain, "co.uk");
        assert!(p.subdomain_labels.is_empty());
    }

    #[test]
    fn reassemble_round_trip() {
        for raw in [
            "http://example.com",
            "https://a.b.example.co.uk:8080/p/q?x=1&y=2#frag",
            "example.com/x?",
            "http://[::1]:80/",
        ] {
            let p = parse_url(raw).unwrap();
            assert_eq!(parse_url(&p.reassemble()).unwrap(), p, "{raw}");
        }
    }
}
