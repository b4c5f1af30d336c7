//! Synthetic Gaussian logs with known ground truth, and random queries.
//!
//! Used by the test suites: the generator writes a log in the recognised
//! format, remembers what it planted, and the parser has to recover it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::elements;
use crate::gparse::{GaussianRecord, PresenceFlag};
use crate::query::{Connective, ElementMode, Query};
use crate::taxonomy::{AttributeKind, Taxonomy, ANY};

/// Elements the generator draws from. Queries use the same pool so they hit.
pub const ELEMENT_POOL: [&str; 10] = ["H", "C", "N", "O", "F", "S", "Cl", "P", "Fe", "Si"];

/// Basis sets written after the slash. Only "gen" is a taxonomy category.
pub const BASIS_POOL: [&str; 8] = [
    "6-31g(d)",
    "sto-3g",
    "gen",
    "6-311+g(2d,p)",
    "3-21g*",
    "cc-pvdz",
    "lanl2dz",
    "def2svp",
];

// Route keywords the parser must ignore.
const NOISE_KEYWORDS: [&str; 5] = ["scf=tight", "nosymm", "geom=connectivity", "pop=full", "int=ultrafine"];

const TITLE_WORDS: [&str; 12] = [
    "water",
    "benzene",
    "radical",
    "cation",
    "transition",
    "state",
    "scan",
    "dimer",
    "ligand",
    "complex",
    "conformer",
    "test",
];

/// What the generator planted in a log.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedFields {
    pub title: String,
    pub elements: BTreeSet<String>,
    pub methods: BTreeSet<String>,
    pub basis_sets: BTreeSet<String>,
    pub job_types: BTreeSet<String>,
    pub charge: i64,
    pub multiplicity: u32,
    pub energy: Option<f64>,
    pub degrees_of_freedom: Option<u32>,
    pub flags: BTreeSet<PresenceFlag>,
}

#[derive(Clone, Debug)]
pub struct SyntheticLog {
    pub text: String,
    pub planted: PlantedFields,
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items.choose(rng).copied().expect("non-empty pool")
}

fn orientation_block(out: &mut String, header: &str, sites: &[(u32, [f64; 3])]) {
    let dash = format!(" {}\n", "-".repeat(69));
    let _ = writeln!(out, "{:>40}", header);
    out.push_str(&dash);
    out.push_str(" Center     Atomic      Atomic             Coordinates (Angstroms)\n");
    out.push_str(" Number     Number       Type             X           Y           Z\n");
    out.push_str(&dash);
    for (i, (z, [x, y, zc])) in sites.iter().enumerate() {
        let _ = writeln!(
            out,
            " {:>6} {:>10} {:>11} {:>15.6} {:>11.6} {:>11.6}",
            i + 1,
            z,
            0,
            x,
            y,
            zc
        );
    }
    out.push_str(&dash);
}

/// Wraps a route the way Gaussian does: fixed width, continuation lines
/// start with one space, tokens may be cut anywhere.
fn wrap_route(route: &str, width: usize) -> String {
    let chars: Vec<char> = route.chars().collect();
    chars
        .chunks(width)
        .map(|c| format!(" {}\n", c.iter().collect::<String>()))
        .collect()
}

/// One random log in the recognised format.
pub fn generate_log<R: Rng>(rng: &mut R, taxonomy: &Taxonomy) -> SyntheticLog {
    // elements and geometry
    let n_elements = rng.gen_range(1..=4);
    let mut pool = ELEMENT_POOL.to_vec();
    pool.shuffle(rng);
    let chosen: Vec<&str> = pool[..n_elements].to_vec();
    let mut sites = Vec::new();
    for sym in &chosen {
        let z = elements::atomic_number(sym).unwrap();
        for _ in 0..rng.gen_range(1..=3) {
            sites.push((
                z,
                [
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                ],
            ));
        }
    }
    sites.shuffle(rng);

    // route
    let methods_known: Vec<&str> = taxonomy.all_tokens(AttributeKind::Method).collect();
    let jobs_known: Vec<&str> = taxonomy.all_tokens(AttributeKind::JobType).collect();
    let mut methods = BTreeSet::new();
    let mut basis_sets = BTreeSet::new();
    let mut job_types = BTreeSet::new();
    let mut words: Vec<String> = Vec::new();

    let method = pick(rng, &methods_known).to_string();
    if rng.gen_bool(0.85) {
        let basis = pick(rng, &BASIS_POOL).to_string();
        words.push(format!("{method}/{basis}"));
        basis_sets.insert(basis);
    } else {
        words.push(method.clone());
    }
    methods.insert(method);

    for _ in 0..rng.gen_range(0..=2) {
        let job = pick(rng, &jobs_known);
        let token = if job == "opt" && rng.gen_bool(0.3) {
            "opt=(calcfc,maxcycles=50)".to_string()
        } else {
            job.to_string()
        };
        job_types.insert(token.clone());
        words.push(token);
    }
    if job_types.is_empty() {
        job_types.insert("sp".to_string());
    }
    for _ in 0..rng.gen_range(0..=2) {
        words.push(pick(rng, &NOISE_KEYWORDS).to_string());
    }
    words.shuffle(rng);
    let route_words: Vec<String> = words
        .iter()
        .map(|w| if rng.gen_bool(0.3) { w.to_uppercase() } else { w.clone() })
        .collect();
    let prefix = pick(rng, &["#", "#p", "#n", "#t", "#P"]);
    let route = format!("{prefix} {}", route_words.join(" "));

    let title = (0..rng.gen_range(1..=4))
        .map(|_| pick(rng, &TITLE_WORDS))
        .collect::<Vec<_>>()
        .join(" ");
    let charge: i64 = rng.gen_range(-2..=2);
    let multiplicity: u32 = rng.gen_range(1..=4);

    let mut flags: BTreeSet<PresenceFlag> = PresenceFlag::ALL
        .into_iter()
        .filter(|f| *f != PresenceFlag::InputOrientation && rng.gen_bool(0.3))
        .collect();
    let with_input_orientation = rng.gen_bool(0.5);
    if with_input_orientation {
        flags.insert(PresenceFlag::InputOrientation);
    }

    let mut text = String::new();
    text.push_str(" Entering Gaussian System, Link 0=g09\n");
    text.push_str(" %mem=2GB\n %chk=job.chk\n");
    let dash = format!(" {}\n", "-".repeat(40));
    text.push_str(&dash);
    let width = if rng.gen_bool(0.3) { rng.gen_range(12..30) } else { 200 };
    text.push_str(&wrap_route(&route, width));
    text.push_str(&dash);
    text.push_str(" 1/18=20,19=15/1,3;\n 2/9=110/2;\n");
    text.push_str(&dash);
    let _ = writeln!(text, " {title}");
    text.push_str(&dash);
    text.push_str(" Symbolic Z-matrix:\n");
    let _ = writeln!(text, " Charge = {charge:>2} Multiplicity = {multiplicity}");

    let degrees_of_freedom = rng.gen_bool(0.7).then(|| rng.gen_range(0..40u32));
    if let Some(dof) = degrees_of_freedom {
        let _ = writeln!(text, " Deg. of freedom    {dof:>4}");
    }

    let mut energy = None;
    let steps = rng.gen_range(1..=3);
    for step in 0..steps {
        let jittered: Vec<(u32, [f64; 3])> = sites
            .iter()
            .map(|(z, c)| {
                let d = if step + 1 == steps { 0.0 } else { 0.05 };
                (*z, [c[0] + d, c[1] - d, c[2] + d])
            })
            .collect();
        if with_input_orientation {
            orientation_block(&mut text, "Input orientation:", &jittered);
        }
        orientation_block(&mut text, "Standard orientation:", &jittered);
        if rng.gen_bool(0.9) {
            let value = format!("{:.9}", rng.gen_range(-2500.0..-1.0));
            let _ = writeln!(text, " SCF Done:  E(RB3LYP) =  {value}     A.U. after   12 cycles");
            energy = Some(value.parse::<f64>().unwrap());
        }
    }
    for flag in &flags {
        if *flag == PresenceFlag::InputOrientation {
            continue;
        }
        let _ = writeln!(text, " {}", flag.trigger());
    }
    text.push_str(" Normal termination of Gaussian 09\n");

    SyntheticLog {
        text,
        planted: PlantedFields {
            title,
            elements: chosen.iter().map(|s| s.to_string()).collect(),
            methods,
            basis_sets,
            job_types,
            charge,
            multiplicity,
            energy,
            degrees_of_freedom,
            flags,
        },
    }
}

/// Parses `count` generated logs into records with ids `1..=count`.
pub fn generate_corpus<R: Rng>(rng: &mut R, taxonomy: &Taxonomy, count: usize) -> Vec<GaussianRecord> {
    (1..=count as u64)
        .map(|id| {
            let log = generate_log(rng, taxonomy);
            let mut record = crate::gparse::parse_document(&log.text, &format!("synthetic/{id:04}.log"), taxonomy)
                .expect("generated logs parse");
            record.id = id;
            record
        })
        .collect()
}

/// Writes `count` generated logs as `<dir>/synthetic_NNNN.log`.
pub fn write_corpus<R: Rng>(rng: &mut R, taxonomy: &Taxonomy, dir: &Path, count: usize) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for i in 0..count {
        let log = generate_log(rng, taxonomy);
        std::fs::write(dir.join(format!("synthetic_{i:04}.log")), log.text)?;
    }
    Ok(())
}

fn random_clause<R: Rng>(rng: &mut R, taxonomy: &Taxonomy, kind: AttributeKind) -> Option<String> {
    if !rng.gen_bool(0.45) {
        return None;
    }
    let categories: Vec<&str> = taxonomy.categories(kind).collect();
    Some(match rng.gen_range(0..10) {
        0 => ANY.to_string(),
        1 | 2 => match kind {
            AttributeKind::BasisSet => pick(rng, &BASIS_POOL).to_uppercase(),
            _ => {
                let tokens: Vec<&str> = taxonomy.all_tokens(kind).collect();
                pick(rng, &tokens).to_string()
            }
        },
        3 => "unheard-of".to_string(),
        _ if categories.is_empty() => "gen".to_string(),
        _ => {
            let c = pick(rng, &categories);
            if rng.gen_bool(0.2) {
                c.to_lowercase()
            } else {
                c.to_string()
            }
        }
    })
}

/// A random refinement value for `kind`: usually a category, sometimes a raw
/// basis token.
pub fn random_facet_value<R: Rng>(rng: &mut R, taxonomy: &Taxonomy, kind: AttributeKind) -> String {
    let categories: Vec<&str> = taxonomy.categories(kind).collect();
    if kind == AttributeKind::BasisSet || categories.is_empty() || rng.gen_bool(0.1) {
        pick(rng, &BASIS_POOL).to_string()
    } else {
        pick(rng, &categories).to_string()
    }
}

/// A random query over [`ELEMENT_POOL`] and the taxonomy's vocabulary.
pub fn random_query<R: Rng>(rng: &mut R, taxonomy: &Taxonomy) -> Query {
    let n = rng.gen_range(1..=3);
    let elements: BTreeSet<String> = ELEMENT_POOL.choose_multiple(rng, n).map(|s| s.to_string()).collect();
    let mode = if rng.gen_bool(0.4) {
        ElementMode::Exact
    } else {
        ElementMode::Contains
    };
    let connective = if rng.gen_bool(0.5) {
        Connective::And
    } else {
        Connective::Or
    };
    let mut query = Query::new(elements, mode)
        .expect("pool symbols are valid")
        .with_connective(connective);
    for kind in AttributeKind::ALL {
        let clause = random_clause(rng, taxonomy, kind);
        query = query.with_clause(kind, clause);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let kind = *AttributeKind::ALL.choose(rng).unwrap();
        let value = random_facet_value(rng, taxonomy, kind);
        query = query.refine_kind(kind, &value);
    }
    query
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_is_seed_deterministic() {
        let tax = Taxonomy::default_config();
        let a = generate_log(&mut ChaCha8Rng::seed_from_u64(9), &tax);
        let b = generate_log(&mut ChaCha8Rng::seed_from_u64(9), &tax);
        assert_eq!(a.text, b.text);
        assert_eq!(a.planted, b.planted);
    }

    #[test]
    fn wrap_keeps_all_characters() {
        let w = wrap_route("# b3lyp/6-31g(d) opt freq", 7);
        let joined: String = w.lines().map(|l| &l[1..]).collect();
        assert_eq!(joined, "# b3lyp/6-31g(d) opt freq");
    }
}
