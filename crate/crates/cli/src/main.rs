use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bandkh::verify::{self, Suite};
use bandkh::{
    homology, kauffman_bracket, phi_expand, skein, CheckReport, Coefficients, Diagram, GradedComplex,
    GradingS, HomologyError, R1Side, R2Site, R3Site, Strand,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bandkh", version, about = "Khovanov homology of band-link diagrams on surfaces with boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the homology table as TSV rows `i j s rank torsion`.
    Homology {
        file: PathBuf,
        #[arg(long, default_value = "Z", value_parser = parse_coefficients)]
        coefficients: Coefficients,
        /// Sum over s and print an (i, j) table.
        #[arg(long)]
        aggregate: bool,
    },
    /// Print the Kauffman bracket in the skein basis.
    Bracket {
        file: PathBuf,
        /// Print the coefficients q_s instead.
        #[arg(long)]
        substitute: bool,
    },
    /// Print the A-graded Euler characteristic of each s-summand next to q_s.
    Euler { file: PathBuf },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Compare the integral homology against a TSV table.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Print only failing lines and a summary.
        #[arg(long)]
        quiet: bool,
    },
    /// Apply a Reidemeister move and write the new diagram.
    Moves {
        file: PathBuf,
        #[arg(long = "move", value_enum)]
        kind: MoveKind,
        /// `e3` or `l0:right` for r1neg, `e0,e2'` for r2, `x1.0,x2.1,x3.2` for r3.
        #[arg(long, required_unless_present = "list")]
        site: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// List the available sites instead.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MoveKind {
    R1neg,
    R2,
    R3,
}

fn parse_coefficients(s: &str) -> Result<Coefficients, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// An error that should exit with status 1 rather than 2.
#[derive(Debug)]
struct VerificationFailure(String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<VerificationFailure>().is_some() || e.downcast_ref::<HomologyError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn load(path: &Path) -> Result<Diagram> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.parse().with_context(|| format!("{}", path.display()))
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Homology { file, coefficients, aggregate } => {
            let d = load(&file)?;
            let t = homology(&GradedComplex::new(&d), coefficients)?;
            if aggregate {
                println!("i\tj\tgroup");
                let mut rows: Vec<_> = t.aggregate_handlebody().into_iter().collect();
                rows.sort_by_key(|((i, j), _)| (*j, *i));
                for ((i, j), g) in rows {
                    println!("{i}\t{j}\t{g}");
                }
            } else {
                print!("{}", t.to_tsv());
            }
            Ok(true)
        }
        Command::Bracket { file, substitute } => {
            let d = load(&file)?;
            let e = kauffman_bracket(&d);
            if substitute {
                for (s, p) in phi_expand(&e) {
                    println!("{s}\t{p}");
                }
            } else {
                print!("{e}");
            }
            Ok(true)
        }
        Command::Euler { file } => {
            let d = load(&file)?;
            let t = homology(&GradedComplex::new(&d), Coefficients::Integer)?;
            let q = phi_expand(&skein::kauffman_bracket_recursive(&d));
            let mut grades: Vec<GradingS> = q.keys().cloned().collect();
            grades.extend(t.entries().map(|((_, _, s), _)| s.clone()));
            grades.sort();
            grades.dedup();
            println!("s\tchi\tq");
            let mut ok = true;
            for s in grades {
                let chi = skein::euler_characteristic(&t, &s);
                let want = q.get(&s).cloned().unwrap_or_default();
                ok &= chi == want;
                println!("{s}\t{chi}\t{want}");
            }
            Ok(ok)
        }
        Command::Verify { file, suite, golden, quiet } => {
            let d = load(&file)?;
            let mut reports = verify::run(&d, suite).map_err(|e| VerificationFailure(e.to_string()))?;
            if let Some(path) = golden {
                let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
                let t = homology(&GradedComplex::new(&d), Coefficients::Integer)?;
                reports.push(golden_report(&t.to_tsv(), &text)?);
            }
            let (mut pass, mut fail) = (0, 0);
            for r in &reports {
                for line in r.to_string().lines() {
                    if line.starts_with("PASS") {
                        pass += 1;
                        if quiet {
                            continue;
                        }
                    } else {
                        fail += 1;
                    }
                    println!("{line}");
                }
            }
            println!("{pass} passed, {fail} failed");
            Ok(fail == 0)
        }
        Command::Moves { file, kind, site, out, list } => {
            let d = load(&file)?;
            if list {
                for s in sites(&d, kind) {
                    println!("{s}");
                }
                return Ok(true);
            }
            let site = site.expect("clap requires --site without --list");
            let (e, _) = match kind {
                MoveKind::R1neg => {
                    let (strand, side) = parse_r1(&site)?;
                    d.apply_r1_neg(strand, side)?
                }
                MoveKind::R2 => d.apply_r2(parse_r2(&site)?)?,
                MoveKind::R3 => d.apply_r3(parse_r3(&d, &site)?)?,
            };
            match out {
                Some(p) => fs::write(&p, e.to_string()).with_context(|| format!("cannot write {}", p.display()))?,
                None => print!("{e}"),
            }
            Ok(true)
        }
    }
}

/// One verdict per (j, s): the rows of the computed table against the golden rows.
fn golden_report(computed: &str, golden: &str) -> Result<CheckReport> {
    let rows = |text: &str| -> Result<Vec<(i64, GradingS, String)>> {
        let mut out = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                bail!("golden row `{line}` does not have five columns");
            }
            let j: i64 = cols[1].parse().with_context(|| format!("bad j in `{line}`"))?;
            let s: GradingS = cols[2].parse().map_err(|e| anyhow!("bad s in `{line}`: {e}"))?;
            out.push((j, s, line.to_string()));
        }
        Ok(out)
    };
    let mut rep = CheckReport::new("golden");
    let (a, b) = (rows(computed)?, rows(golden)?);
    for (j, s, _) in a.iter().chain(&b) {
        let pick = |v: &[(i64, GradingS, String)]| {
            let mut x: Vec<String> = v.iter().filter(|r| r.0 == *j && r.1 == *s).map(|r| r.2.clone()).collect();
            x.sort();
            x
        };
        rep.record(*j, s, pick(&a) == pick(&b));
    }
    Ok(rep)
}

fn parse_strand(s: &str) -> Result<Strand> {
    let bad = || anyhow!("expected a strand like `e3` or `l0`, found `{s}`");
    let (kind, k) = s.split_at_checked(1).ok_or_else(bad)?;
    let k: usize = k.parse().map_err(|_| bad())?;
    match kind {
        "e" => Ok(Strand::Edge(k)),
        "l" => Ok(Strand::Loop(k)),
        _ => Err(bad()),
    }
}

fn parse_r1(site: &str) -> Result<(Strand, R1Side)> {
    let (strand, side) = site.split_once(':').unwrap_or((site, "left"));
    let side = match side {
        "left" => R1Side::Left,
        "right" => R1Side::Right,
        _ => bail!("side must be `left` or `right`, found `{side}`"),
    };
    Ok((parse_strand(strand)?, side))
}

fn parse_r2(site: &str) -> Result<R2Site> {
    let (a, b) = site.split_once(',').ok_or_else(|| anyhow!("expected `over,under`, found `{site}`"))?;
    let strand = |x: &str| -> Result<(Strand, bool)> {
        let x = x.trim();
        match x.strip_suffix('\'') {
            Some(y) => Ok((parse_strand(y)?, true)),
            None => Ok((parse_strand(x)?, false)),
        }
    };
    let (over, over_reversed) = strand(a)?;
    let (under, under_reversed) = strand(b)?;
    Ok(R2Site { over, over_reversed, under, under_reversed })
}

fn parse_r3(d: &Diagram, site: &str) -> Result<R3Site> {
    let parts: Vec<&str> = site.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("expected three corners `name.slot`, found `{site}`");
    }
    let mut corners = [(0, 0); 3];
    for (k, p) in parts.iter().enumerate() {
        let (name, slot) = p.rsplit_once('.').ok_or_else(|| anyhow!("expected `name.slot`, found `{p}`"))?;
        let c = d.names().iter().position(|n| n == name).ok_or_else(|| anyhow!("no crossing `{name}`"))?;
        let slot: u8 = slot.parse().ok().filter(|&s| s < 4).ok_or_else(|| anyhow!("slot must be 0..3 in `{p}`"))?;
        corners[k] = (c, slot);
    }
    Ok(R3Site { corners })
}

fn strand_text(s: Strand, reversed: bool) -> String {
    let tick = if reversed { "'" } else { "" };
    match s {
        Strand::Edge(k) => format!("e{k}{tick}"),
        Strand::Loop(k) => format!("l{k}{tick}"),
    }
}

fn sites(d: &Diagram, kind: MoveKind) -> Vec<String> {
    match kind {
        MoveKind::R1neg => {
            let strands = (0..d.edges().len()).map(Strand::Edge).chain((0..d.loops().len()).map(Strand::Loop));
            strands
                .flat_map(|s| ["left", "right"].map(|side| format!("{}:{side}", strand_text(s, false))))
                .collect()
        }
        MoveKind::R2 => verify::r2_sites(d)
            .into_iter()
            .map(|s| format!("{},{}", strand_text(s.over, s.over_reversed), strand_text(s.under, s.under_reversed)))
            .collect(),
        MoveKind::R3 => verify::r3_sites(d)
            .into_iter()
            .map(|s| {
                let c: Vec<String> = s
                    .corners
                    .iter()
                    .map(|&(c, k)| format!("{}.{k}", d.names()[c]))
                    .collect();
                c.join(",")
            })
            .collect(),
    }
}
