use serde::{Deserialize, Serialize};

use super::{FilterRule, FilterSet, PatternToken, ResourceKind, RuleOptions, StartAnchor};
use crate::causality::Label;

/// Lines that did not become rules, by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipCounts {
    /// `!` comments and `[Adblock …]` headers.
    pub comments: usize,
    /// Cosmetic rules (`##`, `#@#`, `#?#`, `#$#`).
    pub element_hiding: usize,
    /// Rules carrying an option outside the supported subset, or regex rules.
    pub unsupported: usize,
    /// Rules that are syntactically broken (empty pattern, conflicting domains).
    pub malformed: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.comments + self.element_hiding + self.unsupported + self.malformed
    }
}

enum LineOutcome {
    Rule(FilterRule),
    Skip(fn(&mut SkipCounts)),
}

/// Parses a filter list. Every non-blank line ends up either as a rule or in
/// one of the skip counters.
pub fn parse_filter_list(text: &str, label: Label) -> FilterSet {
    let mut set = FilterSet {
        label,
        blocking: Vec::new(),
        exceptions: Vec::new(),
        skipped: SkipCounts::default(),
    };
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line, label) {
            LineOutcome::Rule(rule) if rule.exception => set.exceptions.push(rule),
            LineOutcome::Rule(rule) => set.blocking.push(rule),
            LineOutcome::Skip(bump) => bump(&mut set.skipped),
        }
    }
    set
}

/// Parses one rule line, or `None` if it is not a supported network rule.
pub fn parse_rule(line: &str, label: Label) -> Option<FilterRule> {
    match parse_line(line.trim(), label) {
        LineOutcome::Rule(rule) => Some(rule),
        LineOutcome::Skip(_) => None,
    }
}

fn parse_line(line: &str, label: Label) -> LineOutcome {
    let comment: fn(&mut SkipCounts) = |s| s.comments += 1;
    let cosmetic: fn(&mut SkipCounts) = |s| s.element_hiding += 1;
    let unsupported: fn(&mut SkipCounts) = |s| s.unsupported += 1;
    let malformed: fn(&mut SkipCounts) = |s| s.malformed += 1;

    if line.starts_with('!') || (line.starts_with('[') && line.ends_with(']')) {
        return LineOutcome::Skip(comment);
    }
    if ["##", "#@#", "#?#", "#$#", "#%#"].iter().any(|m| line.contains(m)) {
        return LineOutcome::Skip(cosmetic);
    }

    let (exception, body) = match line.strip_prefix("@@") {
        Some(rest) => (true, rest),
        None => (false, line),
    };

    let (pattern_text, options_text) = match body.rfind('$') {
        // A `$` right after `/` belongs to a regex, which is unsupported anyway.
        Some(idx) => (&body[..idx], Some(&body[idx + 1..])),
        None => (body, None),
    };
    if pattern_text.len() > 1 && pattern_text.starts_with('/') && pattern_text.ends_with('/') {
        return LineOutcome::Skip(unsupported);
    }

    let options = match options_text.map(parse_options).transpose() {
        Ok(opts) => opts.unwrap_or_default(),
        Err(OptionError::Unsupported) => return LineOutcome::Skip(unsupported),
        Err(OptionError::Malformed) => return LineOutcome::Skip(malformed),
    };

    let mut rest = pattern_text;
    let start = if let Some(r) = rest.strip_prefix("||") {
        rest = r;
        StartAnchor::Domain
    } else if let Some(r) = rest.strip_prefix('|') {
        rest = r;
        StartAnchor::Start
    } else {
        StartAnchor::None
    };
    let end_anchor = match rest.strip_suffix('|') {
        Some(r) => {
            rest = r;
            true
        }
        None => false,
    };

    let tokens = tokenize(&rest.to_ascii_lowercase());
    if tokens.is_empty() {
        return LineOutcome::Skip(malformed);
    }
    LineOutcome::Rule(FilterRule {
        raw: line.to_string(),
        start,
        end_anchor,
        tokens,
        exception,
        options,
        label,
    })
}

pub(super) fn tokenize(pattern: &str) -> Vec<PatternToken> {
    let mut tokens = Vec::new();
    let mut literal = String::new();
    for c in pattern.chars() {
        match c {
            '*' | '^' => {
                if !literal.is_empty() {
                    tokens.push(PatternToken::Literal(std::mem::take(&mut literal)));
                }
                let tok = if c == '*' { PatternToken::Wildcard } else { PatternToken::Separator };
                if !(tok == PatternToken::Wildcard && tokens.last() == Some(&PatternToken::Wildcard)) {
                    tokens.push(tok);
                }
            }
            _ => literal.push(c),
        }
    }
    if !literal.is_empty() {
        tokens.push(PatternToken::Literal(literal));
    }
    tokens
}

enum OptionError {
    Unsupported,
    Malformed,
}

fn parse_options(text: &str) -> Result<RuleOptions, OptionError> {
    let mut opts = RuleOptions::default();
    for raw in text.split(',') {
        let opt = raw.trim().to_ascii_lowercase();
        match opt.as_str() {
            "third-party" | "3p" => opts.third_party = Some(true),
            "~third-party" | "~3p" | "first-party" | "1p" => opts.third_party = Some(false),
            "script" => {
                opts.types.insert(ResourceKind::Script);
            }
            "image" => {
                opts.types.insert(ResourceKind::Image);
            }
            "subdocument" => {
                opts.types.insert(ResourceKind::Subdocument);
            }
            "" => return Err(OptionError::Malformed),
            _ => {
                let Some(list) = opt.strip_prefix("domain=") else {
                    return Err(OptionError::Unsupported);
                };
                for entry in list.split('|') {
                    match entry.strip_prefix('~') {
                        Some("") => return Err(OptionError::Malformed),
                        Some(d) => {
                            opts.exclude_domains.insert(d.to_string());
                        }
                        None if entry.is_empty() => return Err(OptionError::Malformed),
                        None => {
                            opts.include_domains.insert(entry.to_string());
                        }
                    }
                }
            }
        }
    }
    if !opts.include_domains.is_disjoint(&opts.exclude_domains) {
        return Err(OptionError::Malformed);
    }
    Ok(opts)
}
