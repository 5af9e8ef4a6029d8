//! Command-line front end. Exit codes: 0 success, 2 usage, 3 domain error, 4 failed check.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::coxeter::{Family, Parabolic, WeylGroup};
use crate::fzip::FZipConcrete;
use crate::grouplab::counterexample::counterexample_gl2;
use crate::grouplab::datum::{block_parabolic, weyl_of_perm};
use crate::grouplab::{FiniteField, Mat, ZipDatumGroupLevel};
use crate::witt::{check_reduction, orbit_census_level};
use crate::zipdatum::{build_zip, purity_check_poset, zip_from_cocharacter, StratumPoset, ZipCombinatorics};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
    Check(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Check(_) => EXIT_CHECK,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Check(m) => m,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "zipstrata", version, about = "Zip strata, F-zips and their finite-field shadows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order, number of positive roots and longest element of a Weyl group.
    Weyl {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Export the stratum poset of a zip datum.
    Strata {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check that closures are graded by length.
    PurityCheck {
        #[command(flatten)]
        datum: DatumArgs,
        /// Sweep every parabolic type (all block compositions for GL).
        #[arg(long)]
        all_types: bool,
        /// Also sweep every graph automorphism as δ.
        #[arg(long)]
        all_delta: bool,
        /// Replay a previously exported poset instead of building one.
        #[arg(long)]
        poset: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratum of a concrete F-zip given as JSON.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_ext: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive zip-orbit census of GL_n over F_{q^s}.
    Orbits {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        /// A single degree or a range such as 1..3.
        #[arg(long, default_value = "1", value_parser = parse_range)]
        ext: (u32, u32),
        /// Block sizes of the parabolic; all ones when omitted.
        #[arg(long, value_delimiter = ',')]
        blocks: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Display-group orbits on GL_n of truncated Witt vectors.
    Witt {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Size of the first block of the cocharacter.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        check_reduction: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The GL_2 unipotent-class example with a codimension-two boundary.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        q: Vec<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DatumArgs {
    /// GL, or a Weyl family A, B, C, D.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    rank: Option<usize>,
    /// Simple reflections in I, 1-based.
    #[arg(long = "I")]
    i: Option<String>,
    /// Simple reflections in J; derived from I and δ when omitted.
    #[arg(long = "J")]
    j: Option<String>,
    /// Graph automorphism as images of 1..rank.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<usize>>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

/// Comma-separated indices; the empty string is the empty list.
fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("not an index: {t:?}")))
        .collect()
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let bad = || format!("expected a degree or a range a..b, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Weyl { family, rank, format } => cmd_weyl(family, rank, format),
        Command::Strata { datum, out, format } => cmd_strata(&datum, out.as_deref(), format),
        Command::PurityCheck { datum, all_types, all_delta, poset, out } => {
            cmd_purity(&datum, all_types, all_delta, poset.as_deref(), out.as_deref())
        }
        Command::Classify { input, max_ext, format, out } => cmd_classify(&input, max_ext, format, out.as_deref()),
        Command::Orbits { n, q, ext, blocks, out } => cmd_orbits(n, q, ext, blocks, out.as_deref()),
        Command::Witt { p, d, m, n, dim, check_reduction, out } => cmd_witt(p, d, m, n, dim, check_reduction, out.as_deref()),
        Command::Counterexample { q, format, out } => cmd_counterexample(&q, format, out.as_deref()),
    }
}

/// Writes through a temporary sibling and a rename, or to stdout without a path.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, &text).map_err(|e| domain(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| domain(format!("renaming to {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report")
}

fn weyl_group(family: Family, rank: usize) -> Result<WeylGroup, CliError> {
    WeylGroup::new(family, rank).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_weyl(family: Family, rank: usize, format: Format) -> Result<(), CliError> {
    let g = weyl_group(family, rank)?;
    let word = g.reduced_word(&g.longest_element());
    let text = match format {
        Format::Json => to_json(&json!({
            "family": family.to_string(),
            "rank": rank,
            "order": g.order().to_string(),
            "positive_roots": g.positive_root_count(),
            "longest_word": word,
        })),
        Format::Text => format!(
            "{}\norder {}\npositive roots {}\nlongest element {}",
            g.name(),
            g.order(),
            g.positive_root_count(),
            word.iter().map(|s| format!("s{s}")).collect::<Vec<_>>().join(" ")
        ),
        Format::Dot => return Err(CliError::Usage("weyl supports text and json".into())),
    };
    emit(None, &text)
}

/// Every composition of `n` into positive parts, in lexicographic order.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

struct Datum {
    label: serde_json::Value,
    zip: ZipCombinatorics,
}

fn gl_datum(blocks: &[usize]) -> Result<Datum, CliError> {
    if blocks.is_empty() || blocks.contains(&0) {
        return Err(CliError::Usage("--blocks must be positive sizes".into()));
    }
    let n: usize = blocks.iter().sum();
    let g = weyl_group(Family::A, n - 1)?;
    let delta: Vec<usize> = (1..n).collect();
    let zip = zip_from_cocharacter(&g, &block_parabolic(blocks), &delta).map_err(domain)?.with_gl_center(true);
    Ok(Datum { label: json!({"group": "GL", "n": n, "blocks": blocks}), zip })
}

fn family_datum(g: &WeylGroup, i: &[usize], j: Option<&[usize]>, delta: &[usize]) -> Result<Datum, CliError> {
    let ip = Parabolic::from_slice(i);
    let zip = match j {
        Some(j) => build_zip(g, &ip, &Parabolic::from_slice(j), delta),
        None => zip_from_cocharacter(g, &ip, delta),
    }
    .map_err(domain)?;
    let label = json!({
        "group": g.family().to_string(),
        "rank": g.rank(),
        "I": i,
        "J": zip.j().to_vec(),
        "delta": delta,
    });
    Ok(Datum { label, zip })
}

/// The data named by the flags; `all_types` and `all_delta` widen the sweep.
fn data_from_args(a: &DatumArgs, all_types: bool, all_delta: bool) -> Result<Vec<Datum>, CliError> {
    let group = a.group.clone().or_else(|| a.family.map(|f| f.to_string()));
    let group = group.ok_or_else(|| CliError::Usage("--group is required".into()))?;
    if group.eq_ignore_ascii_case("GL") {
        if all_types {
            let n = a.n.ok_or_else(|| CliError::Usage("--n is required with --all-types".into()))?;
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            return compositions(n).iter().map(|b| gl_datum(b)).collect();
        }
        let blocks = a.blocks.as_ref().ok_or_else(|| CliError::Usage("--blocks is required for GL".into()))?;
        if let Some(n) = a.n {
            if blocks.iter().sum::<usize>() != n {
                return Err(CliError::Usage(format!("--blocks {blocks:?} do not sum to --n {n}")));
            }
        }
        return Ok(vec![gl_datum(blocks)?]);
    }
    let family: Family = group.parse().map_err(CliError::Usage)?;
    if a.family.is_some_and(|f| f != family) {
        return Err(CliError::Usage("--family disagrees with --group".into()));
    }
    let rank = a.rank.or(a.n).ok_or_else(|| CliError::Usage("--rank is required".into()))?;
    let g = weyl_group(family, rank)?;
    let deltas = if all_delta {
        g.graph_automorphisms()
    } else {
        vec![a.delta.clone().unwrap_or_else(|| (1..=rank).collect())]
    };
    let types: Vec<Vec<usize>> = if all_types {
        Parabolic::all_subsets(rank).iter().map(Parabolic::to_vec).collect()
    } else {
        let i = a.i.as_deref().ok_or_else(|| CliError::Usage("--I is required (use an empty value for the Borel)".into()))?;
        vec![parse_list(i).map_err(CliError::Usage)?]
    };
    let j = a.j.as_deref().map(parse_list).transpose().map_err(CliError::Usage)?;
    let mut out = Vec::new();
    for delta in &deltas {
        for i in &types {
            out.push(family_datum(&g, i, j.as_deref(), delta)?);
        }
    }
    Ok(out)
}

fn cmd_strata(a: &DatumArgs, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let datum = data_from_args(a, false, false)?.remove(0);
    let poset = datum.zip.stratum_poset();
    eprintln!("{} strata", poset.len());
    let fmt = match format {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Text => return Err(CliError::Usage("strata supports json and dot".into())),
    };
    emit(out, &poset.export(fmt).map_err(domain)?)
}

fn cmd_purity(a: &DatumArgs, all_types: bool, all_delta: bool, poset: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let mut results = Vec::new();
    if let Some(path) = poset {
        let text = fs::read_to_string(path).map_err(|e| domain(format!("reading {}: {e}", path.display())))?;
        let p = StratumPoset::from_json(&text).map_err(domain)?;
        results.push((json!({"poset": path.display().to_string()}), purity_check_poset(&p)));
    } else {
        for d in data_from_args(a, all_types, all_delta)? {
            let report = d.zip.purity_check();
            results.push((d.label, report));
        }
    }
    let failed = results.iter().filter(|(_, r)| !r.pass).count();
    let pairs: usize = results.iter().map(|(_, r)| r.checked_pairs).sum();
    let violations: usize = results.iter().map(|(_, r)| r.violations.len()).sum();
    let doc = json!({
        "pass": failed == 0,
        "data": results.len(),
        "checked_pairs": pairs,
        "violations": violations,
        "reports": results.iter().map(|(d, r)| json!({"datum": d, "report": r})).collect::<Vec<_>>(),
    });
    match out {
        Some(_) => emit(out, &to_json(&doc))?,
        None => emit(None, &format!("{} data, {pairs} boundary pairs, {violations} violations, {failed} failed", results.len()))?,
    }
    if failed > 0 {
        let first = results.iter().find(|(_, r)| !r.pass).map(|(d, r)| format!("{d}: {:?} {:?}", r.violations, r.order_defects));
        return Err(CliError::Check(format!("purity check failed: {}", first.unwrap_or_default())));
    }
    Ok(())
}

fn cmd_classify(input: &Path, max_ext: u32, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(input).map_err(|e| domain(format!("reading {}: {e}", input.display())))?;
    let z = FZipConcrete::from_json(&text).map_err(domain)?;
    let label = z.classify(max_ext).map_err(domain)?;
    let text = match format {
        Format::Text => label.describe(),
        Format::Json => to_json(&json!({"label": label.describe(), "stratum": label})),
        Format::Dot => return Err(CliError::Usage("classify supports text and json".into())),
    };
    emit(out, &text)
}

fn cmd_orbits(n: usize, q: u32, ext: (u32, u32), blocks: Option<Vec<usize>>, out: Option<&Path>) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let blocks = blocks.unwrap_or_else(|| vec![1; n]);
    if blocks.iter().sum::<usize>() != n || blocks.contains(&0) {
        return Err(CliError::Usage(format!("--blocks {blocks:?} is not a composition of {n}")));
    }
    let datum = ZipDatumGroupLevel::gl(&blocks).map_err(domain)?;
    let g = weyl_group(Family::A, n - 1)?;
    let mut docs = Vec::new();
    for s in ext.0..=ext.1 {
        let f = FiniteField::from_q(q, s).map_err(domain)?;
        eprintln!("census of GL_{n} over F_{}", f.size());
        let census = datum.census(&f).map_err(domain)?;
        let mut orbits = Vec::new();
        for (o, &stab) in census.orbits.iter().zip(&census.stabilizer_orders) {
            let rep = Mat::from_key(o[0], n, f.size());
            let cell = datum.bruhat_cell(&f, &rep).map_err(domain)?;
            orbits.push(json!({
                "size": o.len(),
                "stab_order": stab.to_string(),
                "cell": g.reduced_word(&weyl_of_perm(&g, &cell)),
                "rep": rep.to_rows(),
            }));
        }
        docs.push(json!({
            "datum": {"group": "GL", "n": n, "blocks": blocks},
            "field": {"q": q, "ext": s},
            "group_order": census.group_order.to_string(),
            "orbit_stabilizer": census.orbit_stabilizer_holds(),
            "orbits": orbits,
        }));
    }
    let doc = if docs.len() == 1 { docs.remove(0) } else { serde_json::Value::Array(docs) };
    emit(out, &to_json(&doc))
}

fn cmd_witt(p: u32, d: usize, m: u32, n: usize, dim: usize, check: bool, out: Option<&Path>) -> Result<(), CliError> {
    if dim > n {
        return Err(CliError::Usage(format!("--dim {dim} exceeds --n {n}")));
    }
    if check {
        let report = check_reduction(n, p, d, m, dim).map_err(domain)?;
        emit(out, &to_json(&report))?;
        if !report.violations.is_empty() {
            return Err(CliError::Check(format!("{} reduction violations", report.violations.len())));
        }
        return Ok(());
    }
    let census = orbit_census_level(n, p, d, m, dim).map_err(domain)?;
    let mut sizes: Vec<usize> = census.orbits.iter().map(Vec::len).collect();
    sizes.sort_unstable();
    let doc = json!({
        "params": {"n": n, "p": p, "d": d, "m": m, "d_block": dim},
        "group_order": census.group_order,
        "orbits": census.orbits.len(),
        "orbit_sizes": sizes,
    });
    emit(out, &to_json(&doc))
}

fn cmd_counterexample(qs: &[u32], format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let report = counterexample_gl2(qs).map_err(domain)?;
    let text = match format {
        Format::Json => to_json(&json!({"pass": report.pass(), "rows": report.rows, "witness": report.witness})),
        Format::Text => {
            let mut s = String::from("q  |O_1|  q^2-1  lambda=(2,1)  Id in fiber  Id in O_1\n");
            for r in &report.rows {
                s.push_str(&format!(
                    "{:<2} {:<6} {:<6} {:<13} {:<12} {}\n",
                    r.q, r.orbit_size, r.expected, r.lambda_constant, r.identity_in_fiber, r.identity_in_orbit
                ));
            }
            let w = &report.witness;
            s.push_str(&format!(
                "witness over F_{}: dim O_1 = {}, boundary dim = {}, codimension {} in ambient dimension {}",
                w.q, w.orbit_dim, w.boundary_dim, w.codimension, w.ambient_dim
            ));
            s
        }
        Format::Dot => return Err(CliError::Usage("counterexample supports text and json".into())),
    };
    emit(out, &text)?;
    if !report.pass() {
        return Err(CliError::Check("counterexample report did not match".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_compositions() {
        assert_eq!(parse_range("1..3"), Ok((1, 3)));
        assert_eq!(parse_range("1..=3"), Ok((1, 3)));
        assert_eq!(parse_range("2"), Ok((2, 2)));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("0").is_err());
        assert_eq!(parse_list(""), Ok(vec![]));
        assert_eq!(parse_list("1, 3"), Ok(vec![1, 3]));
        assert_eq!(compositions(3).len(), 4);
        assert_eq!(compositions(4).len(), 8);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["zipstrata", "weyl", "--family", "A", "--rank", "3"]), 0);
        assert_eq!(run(["zipstrata", "weyl", "--family", "D", "--rank", "1"]), EXIT_USAGE);
        assert_eq!(run(["zipstrata", "strata", "--group", "GL", "--n", "2"]), EXIT_USAGE);
        assert_eq!(run(["zipstrata", "strata", "--group", "B", "--rank", "3", "--I", "1", "--J", "3"]), EXIT_DOMAIN);
    }
}
