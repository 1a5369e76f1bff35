//! ISCN karyotype strings.
//!
//! Supported grammar (comma separated, no whitespace):
//!
//! ```text
//! karyotype  := count "," sex ["c"] ("," event)*
//! count      := positive integer without leading zeros
//! sex        := ("X" | "Y" | "N")+          N only with `allow_n`
//! event      := ("+" | "-") chromosome ["c"]
//!             | symbol "(" chromosome (";" chromosome)* ")" "(" bands ")"
//! symbol     := "t" | "inv" | "del" | "dup"
//! chromosome := 1..22 | "X" | "Y"
//! band       := ("p" | "q") digits ["." digits]
//! ```
//!
//! Translocations list one band per chromosome, separated by `;`. The
//! single-chromosome rearrangements take one or two concatenated bands,
//! as in `del(1)(q21q31)`. Structural events are parsed and rendered but
//! carry no further meaning here.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Autosomes plus the non-sex-chromosome baseline of a diploid karyotype.
const AUTOSOME_BASELINE: i64 = 44;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChromosomeId {
    Autosome(u8),
    X,
    Y,
}

impl ChromosomeId {
    pub fn autosome(n: u8) -> Option<ChromosomeId> {
        (1..=22).contains(&n).then_some(ChromosomeId::Autosome(n))
    }

    /// All 24 human chromosomes, autosomes first.
    pub fn all() -> impl Iterator<Item = ChromosomeId> {
        (1..=22)
            .map(ChromosomeId::Autosome)
            .chain([ChromosomeId::X, ChromosomeId::Y])
    }

    pub fn is_sex_chromosome(self) -> bool {
        matches!(self, ChromosomeId::X | ChromosomeId::Y)
    }
}

impl fmt::Display for ChromosomeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChromosomeId::Autosome(n) => write!(f, "{n}"),
            ChromosomeId::X => f.write_str("X"),
            ChromosomeId::Y => f.write_str("Y"),
        }
    }
}

/// Letters of the sex field. `N` stands for an unspecified sex chromosome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SexChromosome {
    X,
    Y,
    N,
}

impl SexChromosome {
    pub fn letter(self) -> char {
        match self {
            SexChromosome::X => 'X',
            SexChromosome::Y => 'Y',
            SexChromosome::N => 'N',
        }
    }

    fn of(chromosome: ChromosomeId) -> Option<SexChromosome> {
        match chromosome {
            ChromosomeId::X => Some(SexChromosome::X),
            ChromosomeId::Y => Some(SexChromosome::Y),
            ChromosomeId::Autosome(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CopyChange {
    Gain,
    Loss,
}

impl CopyChange {
    fn symbol(self) -> char {
        match self {
            CopyChange::Gain => '+',
            CopyChange::Loss => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    NumericalGain,
    NumericalLoss,
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructuralSymbol {
    Translocation,
    Inversion,
    Deletion,
    Duplication,
}

impl StructuralSymbol {
    pub fn as_str(self) -> &'static str {
        match self {
            StructuralSymbol::Translocation => "t",
            StructuralSymbol::Inversion => "inv",
            StructuralSymbol::Deletion => "del",
            StructuralSymbol::Duplication => "dup",
        }
    }

    fn from_token(token: &str) -> Option<StructuralSymbol> {
        match token {
            "t" => Some(StructuralSymbol::Translocation),
            "inv" => Some(StructuralSymbol::Inversion),
            "del" => Some(StructuralSymbol::Deletion),
            "dup" => Some(StructuralSymbol::Duplication),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    P,
    Q,
}

/// A chromosome arm plus a dotted band designator such as `13.1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BandAddress {
    pub arm: Arm,
    pub band: String,
}

impl fmt::Display for BandAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arm = match self.arm {
            Arm::P => 'p',
            Arm::Q => 'q',
        };
        write!(f, "{arm}{}", self.band)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuralEvent {
    pub symbol: StructuralSymbol,
    pub chromosomes: Vec<ChromosomeId>,
    pub bands: Vec<BandAddress>,
}

impl fmt::Display for StructuralEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chromosomes: Vec<String> = self.chromosomes.iter().map(ToString::to_string).collect();
        let bands: Vec<String> = self.bands.iter().map(ToString::to_string).collect();
        let band_sep = match self.symbol {
            StructuralSymbol::Translocation => ";",
            _ => "",
        };
        write!(
            f,
            "{}({})({})",
            self.symbol.as_str(),
            chromosomes.join(";"),
            bands.join(band_sep)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IscnEvent {
    Numerical {
        change: CopyChange,
        chromosome: ChromosomeId,
        constitutional: bool,
    },
    Structural(StructuralEvent),
}

impl IscnEvent {
    pub fn kind(&self) -> EventKind {
        match self {
            IscnEvent::Numerical { change: CopyChange::Gain, .. } => EventKind::NumericalGain,
            IscnEvent::Numerical { change: CopyChange::Loss, .. } => EventKind::NumericalLoss,
            IscnEvent::Structural(_) => EventKind::Structural,
        }
    }

    pub fn is_constitutional(&self) -> bool {
        matches!(self, IscnEvent::Numerical { constitutional: true, .. })
    }
}

impl fmt::Display for IscnEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IscnEvent::Numerical {
                change,
                chromosome,
                constitutional,
            } => {
                write!(f, "{}{chromosome}", change.symbol())?;
                if *constitutional {
                    f.write_str("c")?;
                }
                Ok(())
            }
            IscnEvent::Structural(s) => s.fmt(f),
        }
    }
}

/// Parsed ISCN string. `Display` reproduces the accepted input exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IscnKaryotype {
    pub declared_count: u32,
    pub sex_field: Vec<SexChromosome>,
    pub sex_constitutional: bool,
    pub events: Vec<IscnEvent>,
    pub raw: String,
}

impl fmt::Display for IscnKaryotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},", self.declared_count)?;
        for s in &self.sex_field {
            write!(f, "{}", s.letter())?;
        }
        if self.sex_constitutional {
            f.write_str("c")?;
        }
        for e in &self.events {
            write!(f, ",{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IscnError {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown chromosome {token:?} at offset {position}")]
    UnknownChromosome { position: usize, token: String },
    #[error("empty field at offset {position}")]
    EmptyField { position: usize },
    #[error("chromosome count mismatch at offset 0: declared {declared}, events imply {computed}")]
    CountMismatch { declared: u32, computed: i64 },
    #[error("event {event_index} ({event}) cannot be undone against the sex field")]
    InconsistentSexEvents { event_index: usize, event: String },
}

impl IscnError {
    /// Byte offset into the parsed string, where one applies.
    pub fn position(&self) -> Option<usize> {
        match self {
            IscnError::Syntax { position, .. }
            | IscnError::UnknownChromosome { position, .. }
            | IscnError::EmptyField { position } => Some(*position),
            IscnError::CountMismatch { .. } => Some(0),
            IscnError::InconsistentSexEvents { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `N` in the sex field.
    pub allow_n: bool,
}

/// Parses with default options (no `N` in the sex field).
pub fn parse_iscn(s: &str) -> Result<IscnKaryotype, IscnError> {
    parse_iscn_with(s, ParseOptions::default())
}

pub fn parse_iscn_with(s: &str, options: ParseOptions) -> Result<IscnKaryotype, IscnError> {
    Parser {
        src: s,
        pos: 0,
        options,
    }
    .karyotype()
}

/// Parses and then checks the declared count.
pub fn parse_checked(s: &str, options: ParseOptions) -> Result<IscnKaryotype, IscnError> {
    let k = parse_iscn_with(s, options)?;
    let computed = computed_count(&k);
    if i64::from(k.declared_count) != computed {
        return Err(IscnError::CountMismatch {
            declared: k.declared_count,
            computed,
        });
    }
    Ok(k)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    options: ParseOptions,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, expected: impl Into<String>) -> Result<T, IscnError> {
        Err(IscnError::Syntax {
            position: self.pos,
            expected: expected.into(),
        })
    }

    fn expect(&mut self, byte: u8, what: &str) -> Result<(), IscnError> {
        if self.eat(byte) {
            Ok(())
        } else {
            self.syntax(what)
        }
    }

    fn at_field_end(&self) -> bool {
        matches!(self.peek(), None | Some(b','))
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn karyotype(mut self) -> Result<IscnKaryotype, IscnError> {
        let declared_count = self.count()?;
        if self.peek().is_none() {
            return self.syntax("',' followed by the sex chromosomes");
        }
        self.expect(b',', "','")?;
        let (sex_field, sex_constitutional) = self.sex_field()?;
        let mut events = Vec::new();
        while self.peek().is_some() {
            self.expect(b',', "',' or end of input")?;
            events.push(self.event()?);
            if !self.at_field_end() {
                return self.syntax("',' or end of input");
            }
        }
        Ok(IscnKaryotype {
            declared_count,
            sex_field,
            sex_constitutional,
            events,
            raw: self.src.to_owned(),
        })
    }

    fn count(&mut self) -> Result<u32, IscnError> {
        if self.at_field_end() {
            return Err(IscnError::EmptyField { position: self.pos });
        }
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return self.syntax("chromosome count");
        }
        if digits.starts_with('0') {
            self.pos = start;
            return self.syntax("positive chromosome count without leading zeros");
        }
        let count = digits.parse::<u32>().map_err(|_| IscnError::Syntax {
            position: start,
            expected: "chromosome count within range".to_owned(),
        })?;
        if !self.at_field_end() {
            return self.syntax("',' after the chromosome count");
        }
        Ok(count)
    }

    fn sex_field(&mut self) -> Result<(Vec<SexChromosome>, bool), IscnError> {
        if self.at_field_end() {
            return Err(IscnError::EmptyField { position: self.pos });
        }
        let mut letters = Vec::new();
        loop {
            match self.peek() {
                Some(b'X') => letters.push(SexChromosome::X),
                Some(b'Y') => letters.push(SexChromosome::Y),
                Some(b'N') if self.options.allow_n => letters.push(SexChromosome::N),
                Some(b'N') => return self.syntax("X or Y (N needs the allow-n extension)"),
                _ => break,
            }
            self.pos += 1;
        }
        if letters.is_empty() {
            return self.syntax("sex chromosomes (X or Y)");
        }
        let constitutional = self.eat(b'c');
        if !self.at_field_end() {
            return self.syntax("',' or end of input after the sex chromosomes");
        }
        Ok((letters, constitutional))
    }

    fn event(&mut self) -> Result<IscnEvent, IscnError> {
        if self.at_field_end() {
            return Err(IscnError::EmptyField { position: self.pos });
        }
        let change = match self.peek() {
            Some(b'+') => Some(CopyChange::Gain),
            Some(b'-') => Some(CopyChange::Loss),
            _ => None,
        };
        if let Some(change) = change {
            self.pos += 1;
            let chromosome = self.chromosome()?;
            let constitutional = self.eat(b'c');
            return Ok(IscnEvent::Numerical {
                change,
                chromosome,
                constitutional,
            });
        }
        self.structural().map(IscnEvent::Structural)
    }

    fn chromosome(&mut self) -> Result<ChromosomeId, IscnError> {
        let start = self.pos;
        match self.peek() {
            Some(b'X') => {
                self.pos += 1;
                Ok(ChromosomeId::X)
            }
            Some(b'Y') => {
                self.pos += 1;
                Ok(ChromosomeId::Y)
            }
            Some(b) if b.is_ascii_digit() => {
                let token = self.digits().to_owned();
                if token.starts_with('0') {
                    self.pos = start;
                    return self.syntax("chromosome number without leading zeros");
                }
                token
                    .parse::<u8>()
                    .ok()
                    .and_then(ChromosomeId::autosome)
                    .ok_or(IscnError::UnknownChromosome {
                        position: start,
                        token,
                    })
            }
            _ => self.syntax("chromosome (1-22, X or Y)"),
        }
    }

    fn structural(&mut self) -> Result<StructuralEvent, IscnError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_lowercase()) {
            self.pos += 1;
        }
        let Some(symbol) = StructuralSymbol::from_token(&self.src[start..self.pos]) else {
            self.pos = start;
            return self.syntax("'+', '-' or a structural symbol (t, inv, del, dup)");
        };

        self.expect(b'(', "'(' before the chromosomes")?;
        let mut chromosomes = vec![self.chromosome()?];
        while self.peek() == Some(b';') {
            if symbol != StructuralSymbol::Translocation {
                return self.syntax("')' (only translocations list several chromosomes)");
            }
            self.pos += 1;
            chromosomes.push(self.chromosome()?);
        }
        self.expect(b')', "')' after the chromosomes")?;
        if symbol == StructuralSymbol::Translocation && chromosomes.len() < 2 {
            return self.syntax("';' and a second chromosome for a translocation");
        }

        self.expect(b'(', "'(' before the bands")?;
        let mut bands = vec![self.band()?];
        if symbol == StructuralSymbol::Translocation {
            while self.eat(b';') {
                bands.push(self.band()?);
            }
            if bands.len() != chromosomes.len() {
                return self.syntax(format!("{} band(s), one per chromosome", chromosomes.len()));
            }
        } else if matches!(self.peek(), Some(b'p' | b'q')) {
            bands.push(self.band()?);
        }
        self.expect(b')', "')' after the bands")?;
        if self.peek() == Some(b'c') {
            return self.syntax("',' (the constitutional suffix applies to numerical events only)");
        }
        Ok(StructuralEvent {
            symbol,
            chromosomes,
            bands,
        })
    }

    fn band(&mut self) -> Result<BandAddress, IscnError> {
        let arm = match self.peek() {
            Some(b'p') => Arm::P,
            Some(b'q') => Arm::Q,
            _ => return self.syntax("chromosome arm 'p' or 'q'"),
        };
        self.pos += 1;
        let start = self.pos;
        if self.digits().is_empty() {
            return self.syntax("band number");
        }
        if self.eat(b'.') && self.digits().is_empty() {
            return self.syntax("sub-band digits after '.'");
        }
        Ok(BandAddress {
            arm,
            band: self.src[start..self.pos].to_owned(),
        })
    }
}

/// 44 + sex letters + net autosomal numerical events. Sex-chromosome events
/// are already reflected in the sex field and structural events never
/// change the count.
pub fn computed_count(k: &IscnKaryotype) -> i64 {
    let net: i64 = k
        .events
        .iter()
        .map(|e| match e {
            IscnEvent::Numerical {
                change,
                chromosome: ChromosomeId::Autosome(_),
                ..
            } => match change {
                CopyChange::Gain => 1,
                CopyChange::Loss => -1,
            },
            _ => 0,
        })
        .sum();
    AUTOSOME_BASELINE + k.sex_field.len() as i64 + net
}

pub fn validate_count(k: &IscnKaryotype) -> bool {
    i64::from(k.declared_count) == computed_count(k)
}

/// The sex complement a karyotype started from, before acquired changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseComplement {
    /// Sorted X, Y, N.
    pub sex_letters: Vec<SexChromosome>,
    pub constitutional: bool,
    /// True unless the complement is a plain XX or XY.
    pub needs_generic_base: bool,
}

/// Undoes acquired sex-chromosome gains and losses against the sex field.
pub fn infer_base_complement(k: &IscnKaryotype) -> Result<BaseComplement, IscnError> {
    let mut letters = k.sex_field.clone();
    for (i, event) in k.events.iter().enumerate() {
        let IscnEvent::Numerical {
            change,
            chromosome,
            constitutional: false,
        } = event
        else {
            continue;
        };
        let Some(letter) = SexChromosome::of(*chromosome) else {
            continue;
        };
        match change {
            CopyChange::Loss => letters.push(letter),
            CopyChange::Gain => match letters.iter().position(|&l| l == letter) {
                Some(at) => {
                    letters.remove(at);
                }
                None => {
                    return Err(IscnError::InconsistentSexEvents {
                        event_index: i,
                        event: event.to_string(),
                    })
                }
            },
        }
    }
    letters.sort();
    let plain = matches!(
        letters.as_slice(),
        [SexChromosome::X, SexChromosome::X] | [SexChromosome::X, SexChromosome::Y]
    );
    Ok(BaseComplement {
        needs_generic_base: k.sex_constitutional || !plain,
        sex_letters: letters,
        constitutional: k.sex_constitutional,
    })
}

impl BaseComplement {
    pub fn letters(&self) -> String {
        let mut s: String = self.sex_letters.iter().map(|l| l.letter()).collect();
        if self.constitutional {
            s.push('c');
        }
        s
    }
}

#[derive(Serialize)]
struct KaryotypeJson<'a> {
    raw: &'a str,
    declared_count: u32,
    sex_field: Vec<String>,
    sex_constitutional: bool,
    events: Vec<EventJson>,
}

#[derive(Serialize)]
struct EventJson {
    kind: &'static str,
    target: Option<String>,
    constitutional: bool,
    structural: Option<StructuralJson>,
}

#[derive(Serialize)]
struct StructuralJson {
    #[serde(rename = "type")]
    symbol: &'static str,
    chromosomes: Vec<String>,
    bands: Vec<String>,
}

fn lower(value: impl fmt::Display) -> String {
    value.to_string().to_lowercase()
}

impl IscnKaryotype {
    /// JSON form: field names mirror the struct, enums are lowercase
    /// strings, `target` and `structural` are always present (null when
    /// not applicable).
    pub fn to_json(&self) -> serde_json::Value {
        let events = self
            .events
            .iter()
            .map(|e| match e {
                IscnEvent::Numerical {
                    change,
                    chromosome,
                    constitutional,
                } => EventJson {
                    kind: match change {
                        CopyChange::Gain => "gain",
                        CopyChange::Loss => "loss",
                    },
                    target: Some(lower(chromosome)),
                    constitutional: *constitutional,
                    structural: None,
                },
                IscnEvent::Structural(s) => EventJson {
                    kind: "structural",
                    target: None,
                    constitutional: false,
                    structural: Some(StructuralJson {
                        symbol: s.symbol.as_str(),
                        chromosomes: s.chromosomes.iter().map(lower).collect(),
                        bands: s.bands.iter().map(ToString::to_string).collect(),
                    }),
                },
            })
            .collect();
        let json = KaryotypeJson {
            raw: &self.raw,
            declared_count: self.declared_count,
            sex_field: self.sex_field.iter().map(|s| s.letter().to_ascii_lowercase().to_string()).collect(),
            sex_constitutional: self.sex_constitutional,
            events,
        };
        serde_json::to_value(json).expect("karyotype JSON is always serializable")
    }
}
