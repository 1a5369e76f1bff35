//! Lenticular views over a literate source.
//!
//! A literate source is one text seen two ways. In the document-centric
//! view prose is bare and code sits between fence markers; in the
//! code-centric view the code is bare and every prose line, fence markers
//! included, carries a comment prefix. Both views hold the same text, so
//! each converts losslessly into the other.
//!
//! Conversion is driven by a line-level state machine that splits the
//! source into documentation and code regions. Code-region lines are never
//! touched, even when they happen to start with the comment prefix.

use std::fmt;

use thiserror::Error;

/// Which of the two views a source is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViewKind {
    DocumentCentric,
    CodeCentric,
}

impl ViewKind {
    pub fn counterpart(self) -> ViewKind {
        match self {
            ViewKind::DocumentCentric => ViewKind::CodeCentric,
            ViewKind::CodeCentric => ViewKind::DocumentCentric,
        }
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViewKind::DocumentCentric => f.write_str("document-centric"),
            ViewKind::CodeCentric => f.write_str("code-centric"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("comment prefix must contain a non-whitespace character")]
    BlankPrefix,
    #[error("fence markers must be non-empty")]
    EmptyMarker,
    #[error("begin and end markers are identical ({0:?})")]
    IdenticalMarkers(String),
    #[error("marker {marker:?} starts with the comment prefix {prefix:?}")]
    MarkerStartsWithPrefix { marker: String, prefix: String },
    #[error("{0:?} contains a line break")]
    LineBreak(String),
}

/// Comment prefix and fence markers shared by both views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiterateConfig {
    comment_prefix: String,
    comment_prefix_bare: String,
    begin_marker: String,
    end_marker: String,
    strict: bool,
}

impl Default for LiterateConfig {
    fn default() -> Self {
        LiterateConfig {
            comment_prefix: ";; ".to_owned(),
            comment_prefix_bare: ";;".to_owned(),
            begin_marker: "\\begin{code}".to_owned(),
            end_marker: "\\end{code}".to_owned(),
            strict: true,
        }
    }
}

impl LiterateConfig {
    /// Builds a strict configuration. The bare prefix is `comment_prefix`
    /// with trailing whitespace removed.
    pub fn new(
        comment_prefix: impl Into<String>,
        begin_marker: impl Into<String>,
        end_marker: impl Into<String>,
    ) -> Result<Self, ConfigError> {
        let comment_prefix = comment_prefix.into();
        let begin_marker = begin_marker.into();
        let end_marker = end_marker.into();

        for text in [&comment_prefix, &begin_marker, &end_marker] {
            if text.contains(['\n', '\r']) {
                return Err(ConfigError::LineBreak(text.clone()));
            }
        }
        let comment_prefix_bare = comment_prefix.trim_end().to_owned();
        if comment_prefix_bare.is_empty() {
            return Err(ConfigError::BlankPrefix);
        }
        if begin_marker.is_empty() || end_marker.is_empty() {
            return Err(ConfigError::EmptyMarker);
        }
        if begin_marker == end_marker {
            return Err(ConfigError::IdenticalMarkers(begin_marker));
        }
        for marker in [&begin_marker, &end_marker] {
            if marker.starts_with(&comment_prefix) {
                return Err(ConfigError::MarkerStartsWithPrefix {
                    marker: marker.clone(),
                    prefix: comment_prefix,
                });
            }
        }
        Ok(LiterateConfig {
            comment_prefix,
            comment_prefix_bare,
            begin_marker,
            end_marker,
            strict: true,
        })
    }

    /// Strict mode (the default) rejects unprefixed documentation lines in
    /// code-centric sources. Lenient mode reports them as warnings and
    /// keeps them as documentation, which breaks round-trip identity.
    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn comment_prefix(&self) -> &str {
        &self.comment_prefix
    }

    pub fn comment_prefix_bare(&self) -> &str {
        &self.comment_prefix_bare
    }

    pub fn begin_marker(&self) -> &str {
        &self.begin_marker
    }

    pub fn end_marker(&self) -> &str {
        &self.end_marker
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }
}

/// A literate source in one view. Lines never contain line breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiterateSource {
    view_kind: ViewKind,
    lines: Vec<String>,
    trailing_newline: bool,
}

impl LiterateSource {
    pub fn new(
        view_kind: ViewKind,
        lines: Vec<String>,
        trailing_newline: bool,
    ) -> Result<Self, LenticError> {
        if let Some(i) = lines.iter().position(|l| l.contains('\n')) {
            return Err(LenticError::EmbeddedNewline { line_number: i + 1 });
        }
        let trailing_newline = trailing_newline && !lines.is_empty();
        Ok(LiterateSource {
            view_kind,
            lines,
            trailing_newline,
        })
    }

    /// Convenience constructor for tests and bindings.
    pub fn from_lines<S: AsRef<str>>(view_kind: ViewKind, lines: &[S]) -> Result<Self, LenticError> {
        Self::new(
            view_kind,
            lines.iter().map(|l| l.as_ref().to_owned()).collect(),
            true,
        )
    }

    /// Splits decoded text into lines. CRLF line endings are normalized to
    /// LF, with one `CarriageReturnNormalized` warning per affected line.
    pub fn from_text(text: &str, view_kind: ViewKind) -> (LiterateSource, Vec<Diagnostic>) {
        let mut diagnostics = Vec::new();
        if text.is_empty() {
            let src = LiterateSource {
                view_kind,
                lines: Vec::new(),
                trailing_newline: false,
            };
            return (src, diagnostics);
        }
        let trailing_newline = text.ends_with('\n');
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = Vec::new();
        for (i, raw) in body.split('\n').enumerate() {
            let line = match raw.strip_suffix('\r') {
                Some(stripped) => {
                    diagnostics.push(Diagnostic::warning(
                        i + 1,
                        DiagnosticCode::CarriageReturnNormalized,
                        "CRLF line ending normalized to LF",
                    ));
                    stripped
                }
                None => raw,
            };
            lines.push(line.to_owned());
        }
        let src = LiterateSource {
            view_kind,
            lines,
            trailing_newline,
        };
        (src, diagnostics)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.lines.join("\n");
        if self.trailing_newline {
            out.push('\n');
        }
        out
    }

    pub fn view_kind(&self) -> ViewKind {
        self.view_kind
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn trailing_newline(&self) -> bool {
        self.trailing_newline
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticCode {
    UnterminatedCodeBlock,
    NestedBeginMarker,
    OrphanEndMarker,
    UnprefixedDocLine,
    CarriageReturnNormalized,
    /// A code line that reads as a fence marker in the other view.
    AmbiguousMarker,
    /// A documentation line holding only the prefix; it converts to a
    /// blank line and does not come back.
    PrefixOnlyLine,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::UnterminatedCodeBlock => "UnterminatedCodeBlock",
            DiagnosticCode::NestedBeginMarker => "NestedBeginMarker",
            DiagnosticCode::OrphanEndMarker => "OrphanEndMarker",
            DiagnosticCode::UnprefixedDocLine => "UnprefixedDocLine",
            DiagnosticCode::CarriageReturnNormalized => "CarriageReturnNormalized",
            DiagnosticCode::AmbiguousMarker => "AmbiguousMarker",
            DiagnosticCode::PrefixOnlyLine => "PrefixOnlyLine",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based.
    pub line_number: usize,
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
}

impl Diagnostic {
    fn error(line_number: usize, code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic {
            line_number,
            severity: Severity::Error,
            code,
            message: message.into(),
        }
    }

    fn warning(line_number: usize, code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic {
            line_number,
            severity: Severity::Warning,
            code,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} {}", self.line_number, self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LenticError {
    #[error("validation failed with {} error(s)", count_errors(.0))]
    ValidationFailed(Vec<Diagnostic>),
    #[error("expected a {expected} source, found {found}")]
    WrongView { expected: ViewKind, found: ViewKind },
    #[error("line {line_number} contains a line break")]
    EmbeddedNewline { line_number: usize },
    #[error("edit range {start_line}..={end_line} is invalid for a source of {len} line(s)")]
    InvalidEdit {
        start_line: usize,
        end_line: usize,
        len: usize,
    },
    #[error("counterpart does not match the pre-edit source")]
    CounterpartMismatch,
}

fn count_errors(diagnostics: &[Diagnostic]) -> usize {
    diagnostics.iter().filter(|d| d.is_error()).count()
}

/// Role of one line as assigned by the region state machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRole {
    Prose,
    BeginMarker,
    Code,
    EndMarker,
}

impl LineRole {
    fn is_documentation(self) -> bool {
        self != LineRole::Code
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Marker {
    Begin,
    End,
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

/// Marker recognition in `view`'s own syntax. Markers must match exactly;
/// indentation or trailing whitespace makes the line ordinary text.
fn marker_in(view: ViewKind, line: &str, cfg: &LiterateConfig) -> Option<Marker> {
    let body = match view {
        ViewKind::DocumentCentric => line,
        ViewKind::CodeCentric => line.strip_prefix(cfg.comment_prefix.as_str())?,
    };
    if body == cfg.begin_marker {
        Some(Marker::Begin)
    } else if body == cfg.end_marker {
        Some(Marker::End)
    } else {
        None
    }
}

struct Scan {
    roles: Vec<LineRole>,
    diagnostics: Vec<Diagnostic>,
}

fn scan(src: &LiterateSource, cfg: &LiterateConfig) -> Scan {
    let view = src.view_kind;
    let mut roles = Vec::with_capacity(src.lines.len());
    let mut diagnostics = Vec::new();
    let mut open_at: Option<usize> = None;

    for (i, line) in src.lines.iter().enumerate() {
        let n = i + 1;
        let marker = marker_in(view, line, cfg);
        match open_at {
            None => match marker {
                Some(Marker::Begin) => {
                    open_at = Some(n);
                    roles.push(LineRole::BeginMarker);
                }
                Some(Marker::End) => {
                    diagnostics.push(Diagnostic::error(
                        n,
                        DiagnosticCode::OrphanEndMarker,
                        "end marker outside a code block",
                    ));
                    roles.push(LineRole::Prose);
                }
                None => {
                    if view == ViewKind::CodeCentric {
                        check_prefixed(n, line, cfg, &mut diagnostics);
                    }
                    roles.push(LineRole::Prose);
                }
            },
            Some(opened) => match marker {
                Some(Marker::End) => {
                    open_at = None;
                    roles.push(LineRole::EndMarker);
                }
                Some(Marker::Begin) => {
                    diagnostics.push(Diagnostic::error(
                        n,
                        DiagnosticCode::NestedBeginMarker,
                        format!("begin marker inside the code block opened at line {opened}"),
                    ));
                    roles.push(LineRole::Code);
                }
                None => {
                    if marker_in(view.counterpart(), line, cfg).is_some() {
                        diagnostics.push(Diagnostic::error(
                            n,
                            DiagnosticCode::AmbiguousMarker,
                            format!("code line reads as a fence marker in the {} view", view.counterpart()),
                        ));
                    }
                    roles.push(LineRole::Code);
                }
            },
        }
    }
    if let Some(opened) = open_at {
        diagnostics.push(Diagnostic::error(
            opened,
            DiagnosticCode::UnterminatedCodeBlock,
            "code block is never closed",
        ));
    }
    diagnostics.sort_by_key(|d| d.line_number);
    Scan { roles, diagnostics }
}

fn check_prefixed(n: usize, line: &str, cfg: &LiterateConfig, out: &mut Vec<Diagnostic>) {
    if is_blank(line) {
        return;
    }
    if line == cfg.comment_prefix_bare || line.strip_prefix(cfg.comment_prefix.as_str()).is_some_and(is_blank) {
        out.push(Diagnostic::warning(
            n,
            DiagnosticCode::PrefixOnlyLine,
            "prefix-only line becomes a blank line in the document view",
        ));
        return;
    }
    if line.starts_with(&cfg.comment_prefix) {
        return;
    }
    let message = format!("documentation line lacks the {:?} prefix", cfg.comment_prefix);
    if cfg.strict {
        out.push(Diagnostic::error(n, DiagnosticCode::UnprefixedDocLine, message));
    } else {
        out.push(Diagnostic::warning(n, DiagnosticCode::UnprefixedDocLine, message));
    }
}

/// Reports every structural problem in `src`. An empty result means the
/// source is valid and round-trips exactly.
pub fn validate(src: &LiterateSource, cfg: &LiterateConfig) -> Vec<Diagnostic> {
    scan(src, cfg).diagnostics
}

/// Region role of every line.
pub fn line_roles(src: &LiterateSource, cfg: &LiterateConfig) -> Vec<LineRole> {
    scan(src, cfg).roles
}

fn checked_roles(src: &LiterateSource, cfg: &LiterateConfig) -> Result<Vec<LineRole>, LenticError> {
    let Scan { roles, diagnostics } = scan(src, cfg);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(LenticError::ValidationFailed(diagnostics));
    }
    Ok(roles)
}

fn strip_prefix_line(line: &str, cfg: &LiterateConfig) -> String {
    if let Some(rest) = line.strip_prefix(cfg.comment_prefix.as_str()) {
        rest.to_owned()
    } else if line == cfg.comment_prefix_bare {
        String::new()
    } else {
        line.to_owned()
    }
}

fn add_prefix_line(line: &str, cfg: &LiterateConfig) -> String {
    if is_blank(line) {
        line.to_owned()
    } else {
        format!("{}{}", cfg.comment_prefix, line)
    }
}

/// Converts one line of `from` view into the counterpart view.
fn convert_line(from: ViewKind, role: LineRole, line: &str, cfg: &LiterateConfig) -> String {
    if !role.is_documentation() {
        return line.to_owned();
    }
    match from {
        ViewKind::CodeCentric => strip_prefix_line(line, cfg),
        ViewKind::DocumentCentric => add_prefix_line(line, cfg),
    }
}

fn convert(src: &LiterateSource, cfg: &LiterateConfig) -> Result<LiterateSource, LenticError> {
    let roles = checked_roles(src, cfg)?;
    let lines = src
        .lines
        .iter()
        .zip(&roles)
        .map(|(line, &role)| convert_line(src.view_kind, role, line, cfg))
        .collect();
    Ok(LiterateSource {
        view_kind: src.view_kind.counterpart(),
        lines,
        trailing_newline: src.trailing_newline,
    })
}

fn expect_view(src: &LiterateSource, expected: ViewKind) -> Result<(), LenticError> {
    if src.view_kind != expected {
        return Err(LenticError::WrongView {
            expected,
            found: src.view_kind,
        });
    }
    Ok(())
}

/// Code-centric to document-centric: strips one prefix from every
/// documentation line, leaving code untouched.
pub fn to_document(src: &LiterateSource, cfg: &LiterateConfig) -> Result<LiterateSource, LenticError> {
    expect_view(src, ViewKind::CodeCentric)?;
    convert(src, cfg)
}

/// Document-centric to code-centric: prefixes every non-blank
/// documentation line, markers included.
pub fn to_code(src: &LiterateSource, cfg: &LiterateConfig) -> Result<LiterateSource, LenticError> {
    expect_view(src, ViewKind::DocumentCentric)?;
    convert(src, cfg)
}

/// Produces the counterpart view of an edited source.
pub fn propagate(edited: &LiterateSource, cfg: &LiterateConfig) -> Result<LiterateSource, LenticError> {
    convert(edited, cfg)
}

/// Replacement of the inclusive 1-based line range `start_line..=end_line`.
///
/// Insertion is written as a replacement of one line by that line plus the
/// new content; empty ranges are not representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextEdit {
    pub start_line: usize,
    pub end_line: usize,
    pub replacement: Vec<String>,
}

impl TextEdit {
    pub fn new(start_line: usize, end_line: usize, replacement: Vec<String>) -> Self {
        TextEdit {
            start_line,
            end_line,
            replacement,
        }
    }

    fn check(&self, len: usize) -> Result<(), LenticError> {
        let ok = self.start_line >= 1 && self.start_line <= self.end_line && self.end_line <= len;
        if !ok || self.replacement.iter().any(|l| l.contains('\n')) {
            return Err(LenticError::InvalidEdit {
                start_line: self.start_line,
                end_line: self.end_line,
                len,
            });
        }
        Ok(())
    }

    /// Applies the edit, keeping the view kind and trailing-newline flag.
    pub fn apply(&self, src: &LiterateSource) -> Result<LiterateSource, LenticError> {
        self.check(src.lines.len())?;
        let mut lines = Vec::with_capacity(src.lines.len() + self.replacement.len());
        lines.extend_from_slice(&src.lines[..self.start_line - 1]);
        lines.extend(self.replacement.iter().cloned());
        lines.extend_from_slice(&src.lines[self.end_line..]);
        LiterateSource::new(src.view_kind, lines, src.trailing_newline)
    }
}

/// An edited source together with its recomputed counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub edited: LiterateSource,
    pub counterpart: LiterateSource,
}

/// Applies `edit` to `before` and updates `counterpart`, which must be the
/// full transform of `before`. Only lines inside the edit, or whose region
/// role changed because of it, are converted again; the result is equal to
/// `propagate` on the edited source.
pub fn propagate_edit(
    before: &LiterateSource,
    counterpart: &LiterateSource,
    edit: &TextEdit,
    cfg: &LiterateConfig,
) -> Result<Propagation, LenticError> {
    if counterpart.view_kind != before.view_kind.counterpart()
        || counterpart.lines.len() != before.lines.len()
    {
        return Err(LenticError::CounterpartMismatch);
    }
    let edited = edit.apply(before)?;
    let new_roles = checked_roles(&edited, cfg)?;
    let old_roles = scan(before, cfg).roles;

    let head = edit.start_line - 1;
    let inserted = edit.replacement.len();
    let tail_new = head + inserted;
    let tail_old = edit.end_line;

    let mut lines = Vec::with_capacity(edited.lines.len());
    for (i, line) in edited.lines.iter().enumerate() {
        let old_index = if i < head {
            Some(i)
        } else if i >= tail_new {
            Some(i - tail_new + tail_old)
        } else {
            None
        };
        let role = new_roles[i];
        match old_index {
            Some(j) if old_roles[j] == role => lines.push(counterpart.lines[j].clone()),
            _ => lines.push(convert_line(edited.view_kind, role, line, cfg)),
        }
    }
    let counterpart = LiterateSource {
        view_kind: counterpart.view_kind,
        lines,
        trailing_newline: edited.trailing_newline,
    };
    Ok(Propagation { edited, counterpart })
}
