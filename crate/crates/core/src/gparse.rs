//! Metadata extraction from Gaussian output files.
//!
//! The recognised subset of the log format:
//!
//! * the route section, the first line starting with `#` before the molecule
//!   specification. Continuation lines run to the next blank or dashed line
//!   and are joined the way Gaussian wraps them (one leading column dropped,
//!   no separator added);
//! * the title card, the first free-text line after the route;
//! * `Charge = X Multiplicity = Y`;
//! * `Standard orientation:` / `Input orientation:` coordinate tables;
//! * `SCF Done:  E(...) = <energy>` (the last one wins);
//! * `Deg. of freedom <n>`;
//! * one trigger substring per presence flag, see [`PresenceFlag::trigger`].
//!
//! Anything that cannot be found is listed in [`GaussianRecord::missing`]
//! rather than failing the parse.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements;
use crate::taxonomy::{job_stem, AttributeKind, Taxonomy};

pub const MISSING_CHARGE: &str = "charge";
pub const MISSING_MULTIPLICITY: &str = "multiplicity";
pub const MISSING_ENERGY: &str = "energy";
pub const MISSING_DOF: &str = "degrees_of_freedom";
pub const MISSING_ORIENTATION: &str = "input_orientation";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input is empty")]
    EmptyInput,
    #[error("no route section (line starting with '#') in the file header")]
    NoRouteSection,
    #[error("route does not start with '#': {0:?}")]
    MalformedRoute(String),
}

impl ParseError {
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::EmptyInput => "EmptyInput",
            ParseError::NoRouteSection => "NoRouteSection",
            ParseError::MalformedRoute(_) => "MalformedRoute",
        }
    }
}

/// Attributes recorded only as present/absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresenceFlag {
    DistanceMatrix,
    InputOrientation,
    MullikenCharges,
    OptimizedParameters,
    Frequencies,
    Thermochemistry,
    ThermalEnergy,
    ShieldingTensors,
    ReactionPath,
    Pcm,
    VariationalResults,
}

impl PresenceFlag {
    pub const ALL: [PresenceFlag; 11] = [
        Self::DistanceMatrix,
        Self::InputOrientation,
        Self::MullikenCharges,
        Self::OptimizedParameters,
        Self::Frequencies,
        Self::Thermochemistry,
        Self::ThermalEnergy,
        Self::ShieldingTensors,
        Self::ReactionPath,
        Self::Pcm,
        Self::VariationalResults,
    ];

    /// Case-sensitive substring that marks the attribute as present.
    ///
    /// The reaction-path and variational-results markers are best-effort
    /// guesses at how those sections are printed.
    pub fn trigger(self) -> &'static str {
        match self {
            Self::DistanceMatrix => "Distance matrix (angstroms):",
            Self::InputOrientation => "Input orientation:",
            Self::MullikenCharges => "Mulliken atomic charges:",
            Self::OptimizedParameters => "-- Stationary point found.",
            Self::Frequencies => "Frequencies --",
            Self::Thermochemistry => "- Thermochemistry -",
            Self::ThermalEnergy => "Sum of electronic and thermal Energies=",
            Self::ShieldingTensors => "Magnetic shielding tensor (ppm):",
            Self::ReactionPath => "IRC-IRC-IRC",
            Self::Pcm => "Polarizable Continuum Model (PCM)",
            Self::VariationalResults => "Variational Results",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DistanceMatrix => "distance_matrix",
            Self::InputOrientation => "input_orientation",
            Self::MullikenCharges => "mulliken_charges",
            Self::OptimizedParameters => "optimized_parameters",
            Self::Frequencies => "frequencies",
            Self::Thermochemistry => "thermochemistry",
            Self::ThermalEnergy => "thermal_energy",
            Self::ShieldingTensors => "shielding_tensors",
            Self::ReactionPath => "reaction_path",
            Self::Pcm => "pcm",
            Self::VariationalResults => "variational_results",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == name)
    }
}

/// One atom of the last orientation table, coordinates in Ångström.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSite {
    pub element: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianRecord {
    pub id: u64,
    pub title: String,
    pub file_path: String,
    pub elements: BTreeSet<String>,
    pub atom_sites: Vec<AtomSite>,
    pub methods: BTreeSet<String>,
    pub basis_sets: BTreeSet<String>,
    pub job_types: BTreeSet<String>,
    pub charge: Option<i64>,
    pub multiplicity: Option<u32>,
    /// Final SCF energy in Hartree.
    pub energy: Option<f64>,
    pub degrees_of_freedom: Option<u32>,
    pub flags: BTreeSet<PresenceFlag>,
    pub missing: BTreeSet<String>,
}

impl GaussianRecord {
    /// Token set of one attribute kind.
    pub fn tokens(&self, kind: AttributeKind) -> &BTreeSet<String> {
        match kind {
            AttributeKind::JobType => &self.job_types,
            AttributeKind::Method => &self.methods,
            AttributeKind::BasisSet => &self.basis_sets,
        }
    }
}

/// Method, basis and job tokens of a route section.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RouteTokens {
    pub methods: BTreeSet<String>,
    pub basis_sets: BTreeSet<String>,
    pub job_types: BTreeSet<String>,
}

static CHARGE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"Charge\s*=\s*([+-]?\d+)").unwrap());
static MULT_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"Multiplicity\s*=\s*([+-]?\d+)").unwrap());
static SCF_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"SCF Done:\s+E\([^)]*\)\s*=\s*([-+]?\d+(?:\.\d*)?(?:[EeDd][-+]?\d+)?)").unwrap());
static DOF_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"Deg\. of freedom\s+(\d+)").unwrap());
static OVERLAY_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+/[^\s]*;$").unwrap());

fn is_dashed(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 3 && t.bytes().all(|b| b == b'-')
}

// Lines that end the header (route + title) region.
fn is_header_end(line: &str) -> bool {
    line.contains("Charge =")
        || line.contains("Standard orientation:")
        || line.contains("Input orientation:")
        || line.contains("SCF Done:")
}

/// Splits on whitespace outside parentheses.
fn split_route_words(route: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in route.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c.is_whitespace() && depth <= 0 => {
                if !current.is_empty() {
                    words.push(std::mem::take(&mut current));
                }
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

fn split_top_level_slashes(word: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in word.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth <= 0 => {
                parts.push(&word[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&word[start..]);
    parts
}

/// Classifies the keywords of a route section.
///
/// `method/basis` words split on the slash; any further slash segment is
/// taken as another method. Other words are kept only when the taxonomy knows
/// them as a job keyword (options such as `opt=(calcfc)` kept verbatim) or as a
/// method token. No job keyword means a single point, `sp`.
pub fn parse_route(route: &str, taxonomy: &Taxonomy) -> Result<RouteTokens, ParseError> {
    let trimmed = route.trim();
    let Some(rest) = trimmed.strip_prefix('#') else {
        return Err(ParseError::MalformedRoute(route.to_string()));
    };
    let mut chars = rest.chars();
    let rest = match (chars.next(), chars.next()) {
        (Some(c), next)
            if matches!(c.to_ascii_lowercase(), 'n' | 'p' | 't') && next.is_none_or(char::is_whitespace) =>
        {
            &rest[1..]
        }
        _ => rest,
    };

    let mut tokens = RouteTokens::default();
    for word in split_route_words(&rest.to_lowercase()) {
        let segments = split_top_level_slashes(&word);
        if segments.len() > 1 {
            for (i, seg) in segments.iter().enumerate() {
                let seg = seg.trim();
                if seg.is_empty() {
                    continue;
                }
                if i == 1 {
                    tokens.basis_sets.insert(seg.to_string());
                } else {
                    tokens.methods.insert(seg.to_string());
                }
            }
        } else if taxonomy.is_known_token(AttributeKind::JobType, job_stem(&word)) {
            tokens.job_types.insert(word);
        } else if taxonomy.is_known_token(AttributeKind::Method, &word) {
            tokens.methods.insert(word);
        }
    }
    if tokens.job_types.is_empty() {
        tokens.job_types.insert("sp".to_string());
    }
    Ok(tokens)
}

/// Atom sites of the last `Standard orientation:` table, or of the last
/// `Input orientation:` table when no standard one exists.
pub fn extract_elements(text: &str) -> Vec<AtomSite> {
    let lines: Vec<&str> = text.lines().collect();
    let last_header = |marker: &str| lines.iter().rposition(|l| l.contains(marker));
    let Some(start) = last_header("Standard orientation:").or_else(|| last_header("Input orientation:")) else {
        return Vec::new();
    };

    // header, dash, two caption lines, dash, rows..., dash
    let mut dashes = 0;
    let mut sites = Vec::new();
    for line in &lines[start + 1..] {
        if is_dashed(line) {
            dashes += 1;
            if dashes == 3 {
                break;
            }
            continue;
        }
        if dashes < 2 {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            break;
        }
        let Ok(z) = cols[1].parse::<i64>() else { break };
        let coords: Option<Vec<f64>> = cols[3..].iter().map(|c| c.parse::<f64>().ok()).collect();
        let Some(coords) = coords.filter(|c| c.iter().all(|v| v.is_finite())) else {
            break;
        };
        // dummy and ghost centres carry atomic numbers <= 0
        let Some(symbol) = u32::try_from(z).ok().and_then(elements::symbol_for) else {
            continue;
        };
        sites.push(AtomSite {
            element: symbol.to_string(),
            x: coords[0],
            y: coords[1],
            z: coords[2],
        });
    }
    sites
}

struct Header {
    route: String,
    title: Option<String>,
}

fn locate_header(lines: &[&str]) -> Option<Header> {
    let end = lines.iter().position(|l| is_header_end(l)).unwrap_or(lines.len());
    let route_idx = lines[..end].iter().position(|l| l.trim_start().starts_with('#'))?;

    let mut route = lines[route_idx].trim_start().trim_end_matches('\r').to_string();
    let mut next = route_idx + 1;
    while next < end {
        let line = lines[next];
        if line.trim().is_empty() || is_dashed(line) {
            break;
        }
        let line = line.trim_end_matches('\r');
        route.push_str(line.strip_prefix(' ').unwrap_or(line));
        next += 1;
    }

    let title = lines[next..end]
        .iter()
        .map(|l| l.trim())
        .find(|l| {
            !l.is_empty()
                && !is_dashed(l)
                && !OVERLAY_RE.is_match(l)
                && !l.starts_with("Leave Link")
                && !l.starts_with("Symbolic Z-matrix")
        })
        .map(str::to_string);
    Some(Header { route, title })
}

fn base_name(path: &str) -> String {
    Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Title card text if the file has one, else the file's base name.
pub fn record_title(source_text: &str, path: &str) -> String {
    let lines: Vec<&str> = source_text.lines().collect();
    locate_header(&lines)
        .and_then(|h| h.title)
        .unwrap_or_else(|| base_name(path))
}

fn parse_number<T: std::str::FromStr>(re: &Regex, line: &str) -> Option<T> {
    re.captures(line).and_then(|c| c[1].parse().ok())
}

/// Parses raw file bytes, replacing invalid UTF-8.
pub fn parse_bytes(bytes: &[u8], path: &str, taxonomy: &Taxonomy) -> Result<GaussianRecord, ParseError> {
    parse_document(&String::from_utf8_lossy(bytes), path, taxonomy)
}

/// Extracts a [`GaussianRecord`] from the full text of a log. The returned id
/// is 0; ids are assigned at ingest.
pub fn parse_document(text: &str, path: &str, taxonomy: &Taxonomy) -> Result<GaussianRecord, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let lines: Vec<&str> = text.lines().collect();
    let header = locate_header(&lines).ok_or(ParseError::NoRouteSection)?;
    let route = parse_route(&header.route, taxonomy)?;

    let mut missing = BTreeSet::new();

    let charge = lines
        .iter()
        .find(|l| l.contains("Charge ="))
        .and_then(|l| parse_number::<i64>(&CHARGE_RE, l));
    let multiplicity = lines
        .iter()
        .find(|l| l.contains("Multiplicity ="))
        .and_then(|l| parse_number::<u32>(&MULT_RE, l))
        .filter(|m| *m >= 1);
    let energy = lines
        .iter()
        .rev()
        .find_map(|l| SCF_RE.captures(l))
        .and_then(|c| c[1].replace(['D', 'd'], "E").parse::<f64>().ok())
        .filter(|e| e.is_finite());
    let degrees_of_freedom = lines.iter().rev().find_map(|l| parse_number::<u32>(&DOF_RE, l));

    let mut flags: BTreeSet<PresenceFlag> = PresenceFlag::ALL
        .into_iter()
        .filter(|f| text.contains(f.trigger()))
        .collect();

    let atom_sites = extract_elements(text);
    if atom_sites.is_empty() {
        flags.remove(&PresenceFlag::InputOrientation);
        missing.insert(MISSING_ORIENTATION.to_string());
    }
    for (absent, name) in [
        (charge.is_none(), MISSING_CHARGE),
        (multiplicity.is_none(), MISSING_MULTIPLICITY),
        (energy.is_none(), MISSING_ENERGY),
        (degrees_of_freedom.is_none(), MISSING_DOF),
    ] {
        if absent {
            missing.insert(name.to_string());
        }
    }

    let elements = atom_sites.iter().map(|s| s.element.clone()).collect();
    let title = header.title.unwrap_or_else(|| base_name(path));

    Ok(GaussianRecord {
        id: 0,
        title,
        file_path: path.to_string(),
        elements,
        atom_sites,
        methods: route.methods,
        basis_sets: route.basis_sets,
        job_types: route.job_types,
        charge,
        multiplicity,
        energy,
        degrees_of_freedom,
        flags,
        missing,
    })
}
