#![allow(dead_code)]

pub mod oracle;
pub mod synth;

use std::path::{Path, PathBuf};

use uniast::indexer::{index_repository, IndexOptions, IndexOutput};
use uniast::project::DiscoverOptions;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Fixture directories with whether they are indexed in monorepo mode.
pub const FIXTURES: &[(&str, bool)] = &[
    ("aliases", false),
    ("barrel_chain", false),
    ("defaults", false),
    ("extends_chain", false),
    ("groups", false),
    ("implements", false),
    ("listing1", false),
    ("monorepo", true),
    ("namespace", false),
    ("reexport_cycle", false),
    ("shadowing", false),
    ("star_reexports", false),
];

pub fn options(monorepo: bool, jobs: Option<usize>) -> IndexOptions {
    IndexOptions {
        discover: DiscoverOptions {
            monorepo,
            ..DiscoverOptions::default()
        },
        jobs,
    }
}

pub fn index(root: &Path, monorepo: bool) -> IndexOutput {
    index_repository(root, &options(monorepo, None)).expect("index")
}
