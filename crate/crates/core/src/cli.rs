//! Command-line interface. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::emit::{parse_formats, EmitOptions};
use crate::model::NameSort;
use crate::resolver::{Lookup, ResolveOptions, ResolvedProject};
use crate::site::{self, ProjectConfig};
use crate::{analyze, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_A_NAME: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;

/// Environment variable capping the number of worker threads.
pub const JOBS_VAR: &str = "HYPERTWIN_JOBS";

#[derive(Debug, Parser)]
#[command(
    name = "hypertwin",
    version,
    about = "Hyperlinked twins for mini-CBS specifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the site: PLAIN, PRETTY and PDF twins plus an index.
    Build(BuildArgs),
    /// Parse, resolve and check without generating anything.
    Check {
        root: PathBuf,
        /// Warn about funcons that are never referenced.
        #[arg(long)]
        warn_unused: bool,
    },
    /// Print the declaration a name at a position refers to.
    Resolve {
        root: PathBuf,
        /// Source path relative to ROOT.
        file: String,
        /// 1-based line.
        line: usize,
        /// 1-based column, in characters.
        col: usize,
    },
    /// List every reference to a declaration, given as SORT:NAME.
    Refs {
        root: PathBuf,
        /// For example `funcon:scope` or `syntax:Exp`.
        name: String,
    },
}

#[derive(Debug, Args)]
struct BuildArgs {
    root: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    /// Comma-separated subset of plain,pretty,pdf.
    #[arg(long, default_value = "plain,pretty,pdf")]
    formats: String,
    /// Regenerate only outputs whose inputs changed since the last build.
    #[arg(long)]
    incremental: bool,
    /// List references after each declaration in PLAIN pages.
    #[arg(long)]
    emit_backrefs: bool,
    #[arg(long, value_name = "URL")]
    source_base_url: Option<String>,
    /// Base URL of the published site, for cross-file links in PDFs.
    #[arg(long, value_name = "URL")]
    site_base_url: Option<String>,
    /// Compile LaTeX documents with pdflatex when it is available.
    #[arg(long)]
    run_pdflatex: bool,
    #[arg(long)]
    warn_unused: bool,
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(args) => cmd_build(args, stdout, stderr),
        Command::Check { root, warn_unused } => cmd_check(root, warn_unused, stdout),
        Command::Resolve {
            root,
            file,
            line,
            col,
        } => cmd_resolve(root, &file, line, col, stdout),
        Command::Refs { root, name } => cmd_refs(root, &name, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn jobs() -> Result<Option<usize>, Error> {
    match std::env::var(JOBS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!(
                "{JOBS_VAR} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn cmd_build(
    args: BuildArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let formats = parse_formats(&args.formats).map_err(Error::Usage)?;
    let config = ProjectConfig {
        root: args.root,
        out: args.out,
        emit: EmitOptions {
            formats,
            source_base_url: args.source_base_url,
            site_base_url: args.site_base_url,
            emit_backrefs: args.emit_backrefs,
        },
        resolve: ResolveOptions {
            warn_unused: args.warn_unused,
        },
        incremental: args.incremental,
        run_pdflatex: args.run_pdflatex,
    };
    let report = match jobs()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| site::build(&config))?,
        None => site::build(&config)?,
    };
    for d in &report.project.diagnostics {
        let _ = writeln!(stderr, "{}", d.render(&report.project.files));
    }
    let _ = writeln!(
        stdout,
        "{} files: {} regenerated, {} up to date; {} pages written{}",
        report.project.files.len(),
        report.regenerated.len(),
        report.fresh.len(),
        report.pages_written,
        if report.removed.is_empty() {
            String::new()
        } else {
            format!(", {} stale outputs removed", report.removed.len())
        }
    );
    Ok(if report.has_errors() {
        EXIT_DIAGNOSTICS
    } else {
        EXIT_OK
    })
}

fn load_project(root: &std::path::Path, options: ResolveOptions) -> Result<ResolvedProject, Error> {
    Ok(analyze(site::load(root)?, options))
}

fn cmd_check(root: PathBuf, warn_unused: bool, stdout: &mut dyn Write) -> Result<i32, Error> {
    let project = load_project(&root, ResolveOptions { warn_unused })?;
    for d in &project.diagnostics {
        let _ = writeln!(stdout, "{}", d.render(&project.files));
    }
    Ok(if project.has_errors() {
        EXIT_DIAGNOSTICS
    } else {
        EXIT_OK
    })
}

fn cmd_resolve(
    root: PathBuf,
    file: &str,
    line: usize,
    col: usize,
    stdout: &mut dyn Write,
) -> Result<i32, Error> {
    let project = load_project(&root, ResolveOptions::default())?;
    Ok(match project.lookup_at(file, line, col)? {
        Lookup::Found(decl) => {
            let _ = writeln!(stdout, "{} {} {}", decl.location, decl.sort, decl.name);
            EXIT_OK
        }
        Lookup::NotAName => {
            let _ = writeln!(stdout, "no name at position");
            EXIT_NOT_A_NAME
        }
        Lookup::Unresolved { .. } => {
            let _ = writeln!(stdout, "unresolved reference");
            EXIT_UNRESOLVED
        }
    })
}

fn cmd_refs(
    root: PathBuf,
    name: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let (sort, name) = name
        .split_once(':')
        .and_then(|(s, n)| Some((NameSort::from_prefix(s)?, n)))
        .ok_or_else(|| {
            Error::Usage(format!(
                "expected SORT:NAME with SORT one of funcon, syntax, semantics, var; got `{name}`"
            ))
        })?;
    let project = load_project(&root, ResolveOptions::default())?;
    if project.find_decls(sort, name).is_empty() {
        let _ = writeln!(stderr, "{sort} `{name}` is not declared");
        return Ok(EXIT_UNRESOLVED);
    }
    for loc in project.references_of(sort, name) {
        let _ = writeln!(stdout, "{loc}");
    }
    Ok(EXIT_OK)
}
