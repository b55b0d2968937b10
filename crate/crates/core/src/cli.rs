//! The `vaszero` command line.
//!
//! Every verb reads one net file and prints its answer on stdout. Exit code
//! 0 means a definitive answer, 2 an UNKNOWN (budget ran out or the backend
//! could not conclude), 1 a usage, parse or validation error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::closed::DownBasis;
use crate::error::AnalysisError;
use crate::filtered::{filtered_cover_basis, filtered_member, translate_p_to_f};
use crate::karp_miller::{km_tree_bounded, LabeledTree};
use crate::model::parse::{parse_buchi, parse_net, parse_vector, Net};
use crate::model::{encode_vassz, Vas, Vassz, Vasz};
use crate::omega::{Natural, PositionSet};
use crate::omega_check::{mc_omega_regular, repeated_state, CheckOutcome};
use crate::oracles::{lim_member, reach_decide, reach_decide_vas, Answer, Budget, Evidence, Verdict};
use crate::vasz::{bounded_in, vassz_cover, vasz_cover_tree};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "vaszero",
    version,
    about = "Cover, reachability and repeated-reachability analyses for vector addition systems with one zero-test"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Maximum number of elementary steps.
    #[arg(long, global = true, env = "VASZERO_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Write the constructed tree to PATH (km, cover).
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_tree: Option<PathBuf>,
    /// Use arbitrary-precision counters instead of 64-bit ones.
    #[arg(long, global = true)]
    pub bignum: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Karp-Miller cover; zero-test transitions are ignored.
    Km { net: PathBuf },
    /// Cover of the reachability set.
    Cover { net: PathBuf },
    /// Basis of the limit of the filtered reachability set (vas only).
    FilteredCover {
        net: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        filter: String,
    },
    /// Membership of a vector in the limit of the reachability set (vas only).
    LimMember {
        net: PathBuf,
        #[arg(long)]
        vector: String,
    },
    /// Membership in the limit of the cover refined on some positions (vas only).
    MemberRefined {
        net: PathBuf,
        /// Comma-separated 1-based positions, possibly empty.
        #[arg(long)]
        positions: String,
        #[arg(long)]
        vector: String,
    },
    /// Reachability of a configuration.
    Reach {
        net: PathBuf,
        #[arg(long)]
        target: String,
        /// Control state of the target (vass, vass0).
        #[arg(long)]
        state: Option<String>,
    },
    /// Boundedness of one counter, or of every counter.
    Bounded {
        net: PathBuf,
        #[arg(long)]
        place: Option<usize>,
    },
    /// Whether some infinite run visits a control state infinitely often.
    Repeated {
        net: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Checks a labeled system against a Büchi automaton for the bad behaviours.
    Mc {
        net: PathBuf,
        #[arg(long)]
        buchi: PathBuf,
    },
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn answer(stdout: String, definitive: bool) -> Self {
        Outcome {
            code: if definitive { 0 } else { 2 },
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        let message = message.to_string();
        let line = message.lines().next().unwrap_or_default().trim();
        let line = line.strip_prefix("error: ").unwrap_or(line);
        Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {line}\n"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            return Outcome::error(e);
        }
    };
    let result = if cli.global.bignum {
        execute::<BigUint>(&cli)
    } else {
        execute::<u64>(&cli)
    };
    result.unwrap_or_else(Outcome::error)
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load<N: Natural>(path: &Path) -> Result<Net<N>, String> {
    parse_net(&read(path)?).map_err(|e| format!("{}:{e}", path.display()))
}

fn dump<N: Natural, E: std::fmt::Display>(
    path: &Option<PathBuf>,
    tree: Option<&LabeledTree<N, E>>,
) -> Result<(), String> {
    match (path, tree) {
        (Some(p), Some(t)) => std::fs::write(p, t.dump()).map_err(|e| format!("{}: {e}", p.display())),
        (Some(p), None) => std::fs::write(p, "").map_err(|e| format!("{}: {e}", p.display())),
        _ => Ok(()),
    }
}

fn vector<N: Natural>(text: &str, dim: usize) -> Result<crate::omega::OmegaVec<N>, String> {
    parse_vector(text, dim).map_err(|e| format!("`{text}`: {e}"))
}

fn plain_vas<N: Natural>(net: Net<N>, verb: &str) -> Result<Vas<N>, String> {
    match net {
        Net::Vas(v) => Ok(v),
        other => Err(format!("`{verb}` needs a system of kind vas, got {}", other.kind())),
    }
}

fn state_system<N: Natural>(net: Net<N>, verb: &str) -> Result<Vassz<N>, String> {
    match net {
        Net::Vassz { system, .. } => Ok(system),
        other => Err(format!(
            "`{verb}` needs a system of kind vass or vass0, got {}",
            other.kind()
        )),
    }
}

/// Renders a basis result, mapping budget exhaustion to UNKNOWN.
fn basis_outcome<N: Natural>(r: Result<DownBasis<N>, AnalysisError<N>>) -> Result<Outcome, String> {
    match r {
        Ok(b) => Ok(Outcome::answer(b.to_string(), true)),
        Err(e) if e.is_budget() => Ok(Outcome::answer(format!("UNKNOWN\n{e}\n"), false)),
        Err(e) => Err(e.to_string()),
    }
}

fn verdict_outcome(v: &Verdict) -> Outcome {
    Outcome::answer(format!("{v}\n"), v.is_definitive())
}

fn execute<N: Natural>(cli: &Cli) -> Result<Outcome, String> {
    let mut budget = Budget::new(cli.global.budget);
    let dump_path = &cli.global.dump_tree;
    match &cli.command {
        Command::Km { net } => {
            let cap = usize::try_from(cli.global.budget).unwrap_or(usize::MAX);
            match load::<N>(net)? {
                Net::Vassz { system, .. } => {
                    let (flat, layout) = encode_vassz(&system);
                    let Some(tree) = km_tree_bounded(&flat.strip_zero_test(), cap) else {
                        return Ok(Outcome::answer("UNKNOWN\n".into(), false));
                    };
                    dump(dump_path, Some(&tree))?;
                    Ok(Outcome::answer(layout.project_basis(&tree.basis()).to_string(), true))
                }
                other => {
                    let v = match other {
                        Net::Vas(v) => v,
                        Net::Vasz(vz) => vz.strip_zero_test(),
                        Net::Vassz { .. } => unreachable!(),
                    };
                    let Some(tree) = km_tree_bounded(&v, cap) else {
                        return Ok(Outcome::answer("UNKNOWN\n".into(), false));
                    };
                    dump(dump_path, Some(&tree))?;
                    Ok(Outcome::answer(tree.basis().to_string(), true))
                }
            }
        }
        Command::Cover { net } => match load::<N>(net)? {
            Net::Vas(v) => {
                let (r, tree) = vasz_cover_tree(&Vasz::without_test(v), &mut budget);
                dump(dump_path, tree.as_ref())?;
                basis_outcome(r)
            }
            Net::Vasz(vz) => {
                let (r, tree) = vasz_cover_tree(&vz, &mut budget);
                dump(dump_path, tree.as_ref())?;
                basis_outcome(r)
            }
            Net::Vassz { system, .. } => {
                let (r, tree) = vassz_cover(&system, &mut budget);
                dump(dump_path, tree.as_ref())?;
                basis_outcome(r)
            }
        },
        Command::FilteredCover { net, filter } => {
            let v = plain_vas::<N>(load(net)?, "filtered-cover")?;
            let f = vector(filter, v.dim())?;
            basis_outcome(filtered_cover_basis(&v, &f, &mut budget))
        }
        Command::LimMember { net, vector: x } => {
            let v = plain_vas::<N>(load(net)?, "lim-member")?;
            let x = vector(x, v.dim())?;
            let r = lim_member(&v, &x, &mut budget).map_err(|e| e.to_string())?;
            Ok(verdict_outcome(&r))
        }
        Command::MemberRefined {
            net,
            positions,
            vector: y,
        } => {
            let v = plain_vas::<N>(load(net)?, "member-refined")?;
            let y = vector(y, v.dim())?;
            let positions = parse_positions(positions, v.dim())?;
            let f = translate_p_to_f(&positions, &y).map_err(|e| e.to_string())?;
            let r = filtered_member(&v, &f, &y, &mut budget).map_err(|e| e.to_string())?;
            Ok(verdict_outcome(&r))
        }
        Command::Reach { net, target, state } => reach(load::<N>(net)?, target, state.as_deref(), &mut budget),
        Command::Bounded { net, place } => bounded(load::<N>(net)?, *place, &mut budget),
        Command::Repeated { net, state } => {
            let s = state_system::<N>(load(net)?, "repeated")?;
            let r = repeated_state(&s, state, &mut budget).map_err(|e| e.to_string())?;
            Ok(verdict_outcome(&r))
        }
        Command::Mc { net, buchi } => {
            let parsed = load::<N>(net)?;
            let kind = parsed.kind();
            let ls = parsed
                .labeled()
                .ok_or_else(|| format!("`mc` needs a labeled vass or vass0, got an unlabeled {kind}"))?;
            let b = parse_buchi(&read(buchi)?).map_err(|e| format!("{}:{e}", buchi.display()))?;
            let r = mc_omega_regular(&ls, &b, &mut budget).map_err(|e| e.to_string())?;
            Ok(Outcome::answer(format!("{r}\n"), r.outcome != CheckOutcome::Unknown))
        }
    }
}

fn parse_positions(text: &str, dim: usize) -> Result<PositionSet, String> {
    let positions = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad position `{p}`")))
        .collect::<Result<Vec<_>, _>>()?;
    PositionSet::new(dim, positions).map_err(|e| e.to_string())
}

fn reach<N: Natural>(net: Net<N>, target: &str, state: Option<&str>, budget: &mut Budget) -> Result<Outcome, String> {
    let v = match net {
        Net::Vas(v) => {
            if state.is_some() {
                return Err("`--state` is only meaningful for vass and vass0".into());
            }
            let t = vector(target, v.dim())?;
            reach_decide_vas(&v, &t, budget)
        }
        Net::Vasz(vz) => {
            if state.is_some() {
                return Err("`--state` is only meaningful for vass and vass0".into());
            }
            let t = vector(target, vz.dim())?;
            reach_decide(&vz, &t, budget)
        }
        Net::Vassz { system, .. } => {
            let name = state.ok_or("`reach` on a vass or vass0 needs `--state`")?;
            let q = system.state_index(name).map_err(|e| e.to_string())?;
            let t = vector(target, system.dim())?;
            let (flat, layout) = encode_vassz(&system);
            let mut v = reach_decide(&flat, &layout.encode_state(q, &t), budget);
            if let Ok(Verdict {
                evidence: Some(Evidence::Word(w)),
                ..
            }) = &mut v
            {
                let ts = system.transitions();
                *w = layout
                    .decode_word(w)
                    .into_iter()
                    .map(|t| ts[t].action.clone())
                    .collect();
            }
            v
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(verdict_outcome(&v))
}

fn bounded<N: Natural>(net: Net<N>, place: Option<usize>, budget: &mut Budget) -> Result<Outcome, String> {
    let (dim, cover) = match net {
        Net::Vas(v) => (v.dim(), vasz_cover_tree(&Vasz::without_test(v), budget).0),
        Net::Vasz(vz) => (vz.dim(), vasz_cover_tree(&vz, budget).0),
        Net::Vassz { system, .. } => (system.dim(), vassz_cover(&system, budget).0),
    };
    if let Some(i) = place {
        if i == 0 || i > dim {
            return Err(format!("place {i} is out of range 1..={dim}"));
        }
    }
    let cover = match cover {
        Ok(c) => Some(c),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e.to_string()),
    };
    let word = |i: usize| match &cover {
        None => "UNKNOWN",
        Some(c) => match bounded_in(c, i, 0).answer {
            Answer::Yes => "BOUNDED",
            _ => "UNBOUNDED",
        },
    };
    let mut out = String::new();
    match place {
        Some(i) => writeln!(out, "{}", word(i)).unwrap(),
        None => {
            for i in 1..=dim {
                writeln!(out, "place {i}: {}", word(i)).unwrap();
            }
        }
    }
    Ok(Outcome::answer(out, cover.is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions() {
        assert_eq!(parse_positions("", 2).unwrap(), PositionSet::new(2, []).unwrap());
        assert_eq!(
            parse_positions("2, 1", 2).unwrap(),
            PositionSet::new(2, [1, 2]).unwrap()
        );
        assert!(parse_positions("3", 2).is_err());
        assert!(parse_positions("x", 2).is_err());
    }

    #[test]
    fn clap_errors_become_one_line() {
        let o = run(["vaszero", "frobnicate"]);
        assert_eq!(o.code, 1);
        assert!(o.stderr.starts_with("error: "));
        assert_eq!(o.stderr.lines().count(), 1, "{o:?}");
        assert_eq!(run(["vaszero", "--help"]).code, 0);
    }
}
