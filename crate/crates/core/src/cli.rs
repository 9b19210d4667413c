//! Command-line interface. `run` returns the process exit code.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::entities::EntityId;
use crate::graph::{load_index, serialize_index, Relation, UniAstIndex};
use crate::indexer::{index_repository, IndexError, IndexOptions};
use crate::project::{DiscoverOptions, ProjectError};
use crate::query::{entity_view, neighbors};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "uniast",
    version,
    about = "Build and query a function-level code index for TypeScript repositories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index a repository and write the JSON index.
    Index {
        root: PathBuf,
        /// Index each workspace of the root manifest as its own module.
        #[arg(long)]
        monorepo: bool,
        #[arg(long, short, default_value = "uniast.json")]
        output: PathBuf,
        /// Glob of repo-relative paths to skip; repeatable.
        #[arg(long = "exclude", value_name = "GLOB")]
        excludes: Vec<String>,
        /// In monorepo mode, also index files outside every workspace.
        #[arg(long)]
        include_root_module: bool,
        /// Worker threads for parsing and resolution.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
    },
    /// Query a built index.
    Query {
        index: PathBuf,
        #[command(subcommand)]
        query: Query,
    },
}

#[derive(Debug, Subcommand)]
pub enum Query {
    /// Print one entity record.
    Entity { id: String },
    /// Print the entities reachable over the given relations.
    Neighbors {
        id: String,
        #[arg(
            long = "relation",
            value_delimiter = ',',
            value_parser = parse_relation,
            default_value = "dependency,reference,implementation,group"
        )]
        relations: Vec<Relation>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    Relation::parse(s)
        .ok_or_else(|| format!("unknown relation {s:?}; expected dependency, reference, implementation or group"))
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Index {
            root,
            monorepo,
            output,
            excludes,
            include_root_module,
            jobs,
        } => {
            let opts = IndexOptions {
                discover: DiscoverOptions {
                    monorepo,
                    excludes,
                    include_root_module,
                    ..DiscoverOptions::default()
                },
                jobs: jobs.map(usize::from),
            };
            cmd_index(&root, &output, &opts, err)
        }
        Command::Query { index, query } => {
            let index = match read_index(&index, err) {
                Ok(i) => i,
                Err(code) => return code,
            };
            match query {
                Query::Entity { id } => cmd_query_entity(&index, &id, out, err),
                Query::Neighbors { id, relations, depth } => {
                    cmd_query_neighbors(&index, &id, &relations, depth as usize, out, err)
                }
            }
        }
    }
}

fn cmd_index(root: &std::path::Path, output: &std::path::Path, opts: &IndexOptions, err: &mut dyn Write) -> i32 {
    let result = match index_repository(root, opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                IndexError::Project(ProjectError::BadExclude { .. }) => EXIT_USAGE,
                _ => EXIT_IO,
            };
        }
    };
    if let Err(e) = std::fs::write(output, serialize_index(&result.index)) {
        let _ = writeln!(err, "error: cannot write {}: {e}", output.display());
        return EXIT_IO;
    }
    for w in &result.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let _ = writeln!(err, "{}", result.summary());
    EXIT_OK
}

fn read_index(path: &std::path::Path, err: &mut dyn Write) -> Result<UniAstIndex, i32> {
    let bytes = std::fs::read(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    load_index(&bytes).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_IO
    })
}

fn parse_id(id: &str, err: &mut dyn Write) -> Result<EntityId, i32> {
    id.parse().map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_USAGE
    })
}

fn print_json(value: &impl serde::Serialize, out: &mut dyn Write) -> i32 {
    let value = serde_json::to_value(value).expect("query results are representable as JSON");
    let text = serde_json::to_string_pretty(&value).expect("serializing a JSON value cannot fail");
    match writeln!(out, "{text}") {
        Ok(()) => EXIT_OK,
        Err(_) => EXIT_IO,
    }
}

fn cmd_query_entity(index: &UniAstIndex, id: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let id = match parse_id(id, err) {
        Ok(id) => id,
        Err(code) => return code,
    };
    match entity_view(index, &id) {
        Some(view) => print_json(&view, out),
        None => {
            let _ = writeln!(err, "entity not found: {id}");
            EXIT_NOT_FOUND
        }
    }
}

fn cmd_query_neighbors(
    index: &UniAstIndex,
    id: &str,
    relations: &[Relation],
    depth: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let id = match parse_id(id, err) {
        Ok(id) => id,
        Err(code) => return code,
    };
    match neighbors(index, &id, relations, depth) {
        Some(n) => print_json(&n, out),
        None => {
            let _ = writeln!(err, "entity not found: {id}");
            EXIT_NOT_FOUND
        }
    }
}
