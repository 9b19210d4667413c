//! Module specifier resolution against the enumerated project files.

use std::collections::BTreeSet;

use crate::project::{ProjectLayout, SOURCE_EXTENSIONS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecifierTarget {
    /// Repo-relative path of a project source file.
    File(String),
    /// Bare specifier outside the project: the package name.
    External(String),
    NotFound,
}

/// Extensions a compiled-output specifier may carry in place of the source one.
const EMITTED_EXTENSIONS: &[(&str, &[&str])] = &[
    ("js", &["ts", "tsx"]),
    ("jsx", &["tsx"]),
    ("mjs", &["mts"]),
    ("cjs", &["cts"]),
];

#[derive(Debug, Clone)]
pub struct SpecifierResolver {
    files: BTreeSet<String>,
    /// (manifest name, module root dir) for every module that declares one.
    packages: Vec<(String, String)>,
}

impl SpecifierResolver {
    pub fn new(layout: &ProjectLayout) -> Self {
        let files = layout
            .modules
            .iter()
            .flat_map(|m| m.source_files.iter().cloned())
            .collect();
        let packages = layout
            .modules
            .iter()
            .filter_map(|m| Some((m.manifest.name.clone()?, m.root_dir.clone())))
            .collect();
        SpecifierResolver { files, packages }
    }

    pub fn from_parts(files: impl IntoIterator<Item = String>, packages: Vec<(String, String)>) -> Self {
        SpecifierResolver {
            files: files.into_iter().collect(),
            packages,
        }
    }

    pub fn contains(&self, file: &str) -> bool {
        self.files.contains(file)
    }

    pub fn resolve(&self, from_file: &str, specifier: &str) -> SpecifierTarget {
        if is_relative(specifier) {
            let dir = match from_file.rfind('/') {
                Some(i) => &from_file[..i],
                None => "",
            };
            return match join(dir, specifier) {
                Some(base) => self
                    .probe(&base)
                    .map_or(SpecifierTarget::NotFound, SpecifierTarget::File),
                None => SpecifierTarget::NotFound,
            };
        }
        if specifier.is_empty() || specifier.starts_with('/') {
            return SpecifierTarget::NotFound;
        }
        let package = package_name(specifier);
        let rest = specifier[package.len()..].trim_start_matches('/');
        if let Some((_, root)) = self.packages.iter().find(|(name, _)| name == package) {
            let candidates: Vec<String> = if rest.is_empty() {
                vec![prefixed(root, "index"), prefixed(root, "src/index")]
            } else {
                vec![prefixed(root, rest), prefixed(root, &format!("src/{rest}"))]
            };
            return candidates
                .iter()
                .find_map(|c| self.probe(c))
                .map_or(SpecifierTarget::NotFound, SpecifierTarget::File);
        }
        SpecifierTarget::External(package.to_string())
    }

    /// Exact path, emitted-extension remap, `base.ext`, then `base/index.ext`.
    fn probe(&self, base: &str) -> Option<String> {
        if self.files.contains(base) {
            return Some(base.to_string());
        }
        if let Some((stem, ext)) = base.rsplit_once('.') {
            if let Some((_, sources)) = EMITTED_EXTENSIONS.iter().find(|(e, _)| *e == ext) {
                for s in *sources {
                    let candidate = format!("{stem}.{s}");
                    if self.files.contains(&candidate) {
                        return Some(candidate);
                    }
                }
            }
        }
        for ext in SOURCE_EXTENSIONS {
            let candidate = format!("{base}.{ext}");
            if self.files.contains(&candidate) {
                return Some(candidate);
            }
        }
        for ext in SOURCE_EXTENSIONS {
            let candidate = prefixed(base, &format!("index.{ext}"));
            if self.files.contains(&candidate) {
                return Some(candidate);
            }
        }
        None
    }
}

/// Convenience wrapper that builds a resolver for a single lookup.
pub fn resolve_specifier(from_file: &str, specifier: &str, layout: &ProjectLayout) -> SpecifierTarget {
    SpecifierResolver::new(layout).resolve(from_file, specifier)
}

pub fn is_relative(specifier: &str) -> bool {
    specifier == "." || specifier == ".." || specifier.starts_with("./") || specifier.starts_with("../")
}

/// `@scope/name` for scoped packages, otherwise the first path segment.
pub fn package_name(specifier: &str) -> &str {
    let mut cuts = specifier.match_indices('/').map(|(i, _)| i);
    let end = if specifier.starts_with('@') {
        cuts.nth(1)
    } else {
        cuts.next()
    };
    &specifier[..end.unwrap_or(specifier.len())]
}

fn prefixed(dir: &str, rest: &str) -> String {
    if dir.is_empty() {
        rest.to_string()
    } else if rest.is_empty() {
        dir.to_string()
    } else {
        format!("{dir}/{rest}")
    }
}

/// Joins a relative specifier onto a directory; `None` when it escapes the root.
fn join(dir: &str, specifier: &str) -> Option<String> {
    let mut parts: Vec<&str> = dir.split('/').filter(|p| !p.is_empty()).collect();
    for seg in specifier.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop()?;
            }
            s => parts.push(s),
        }
    }
    Some(parts.join("/"))
}
