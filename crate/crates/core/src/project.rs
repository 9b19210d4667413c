//! Repository layout discovery: manifests, module boundaries and source
//! file enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde_json::Value;
use thiserror::Error;
use walkdir::WalkDir;

pub const MANIFEST_FILE: &str = "package.json";

/// Extensions of files that are indexed.
pub const SOURCE_EXTENSIONS: &[&str] = &["ts", "tsx", "mts", "cts"];

/// Directory names skipped unless default excludes are disabled.
pub const DEFAULT_EXCLUDED_DIRS: &[&str] = &["node_modules", "dist", "build", "out", "__snapshots__"];

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("not a directory: {0}")]
    NotADirectory(PathBuf),
    #[error("invalid exclude pattern {pattern:?}: {message}")]
    BadExclude { pattern: String, message: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("malformed manifest {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("failed to read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub name: Option<String>,
    /// Union of runtime and dev dependency names, sorted.
    pub dependencies: Vec<String>,
    pub workspaces: Option<Vec<String>>,
}

pub fn read_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&text).map_err(|message| ManifestError::Malformed {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_manifest(text: &str) -> Result<Manifest, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("manifest is not a JSON object")?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .filter(|n| !n.is_empty())
        .map(str::to_string);
    let mut deps = BTreeSet::new();
    for section in ["dependencies", "devDependencies"] {
        if let Some(map) = obj.get(section).and_then(Value::as_object) {
            deps.extend(map.keys().cloned());
        }
    }
    let workspaces = match obj.get("workspaces") {
        Some(Value::Array(items)) => Some(strings(items)),
        Some(Value::Object(o)) => o.get("packages").and_then(Value::as_array).map(|items| strings(items)),
        _ => None,
    };
    Ok(Manifest {
        name,
        dependencies: deps.into_iter().collect(),
        workspaces,
    })
}

fn strings(items: &[Value]) -> Vec<String> {
    items.iter().filter_map(Value::as_str).map(str::to_string).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutMode {
    Single,
    Monorepo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpec {
    pub name: String,
    /// Repo-relative directory with `/` separators; empty for the root.
    pub root_dir: String,
    pub manifest: Manifest,
    /// Repo-relative source paths, sorted.
    pub source_files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ProjectLayout {
    pub root: PathBuf,
    pub repo_name: String,
    pub modules: Vec<ModuleSpec>,
    pub mode: LayoutMode,
    pub warnings: Vec<String>,
}

impl ProjectLayout {
    pub fn file_count(&self) -> usize {
        self.modules.iter().map(|m| m.source_files.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct DiscoverOptions {
    pub monorepo: bool,
    /// Extra glob patterns matched against repo-relative paths.
    pub excludes: Vec<String>,
    pub default_excludes: bool,
    pub include_root_module: bool,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        DiscoverOptions {
            monorepo: false,
            excludes: Vec::new(),
            default_excludes: true,
            include_root_module: false,
        }
    }
}

pub fn is_source_file(path: &str) -> bool {
    let lower = path.to_ascii_lowercase();
    let Some((stem, ext)) = lower.rsplit_once('.') else {
        return false;
    };
    SOURCE_EXTENSIONS.contains(&ext) && !stem.ends_with(".d")
}

struct Walker {
    root: PathBuf,
    default_excludes: bool,
    excludes: GlobSet,
}

impl Walker {
    fn excluded_dir(&self, name: &str, rel: &str) -> bool {
        if self.default_excludes && (name.starts_with('.') || DEFAULT_EXCLUDED_DIRS.contains(&name)) {
            return true;
        }
        self.excludes.is_match(rel)
    }

    /// Repo-relative source files below `dir` (repo-relative), sorted.
    fn source_files(&self, dir: &str, warnings: &mut Vec<String>) -> Result<Vec<String>, ProjectError> {
        let start = self.root.join(dir);
        let mut out = Vec::new();
        let walk = WalkDir::new(&start).sort_by_file_name().into_iter().filter_entry(|e| {
            if e.depth() == 0 || !e.file_type().is_dir() {
                return true;
            }
            let name = e.file_name().to_string_lossy();
            !self.excluded_dir(&name, &self.relative(e.path()))
        });
        for entry in walk {
            let entry = entry.map_err(|e| ProjectError::Io {
                path: e.path().map_or_else(|| start.clone(), Path::to_path_buf),
                source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk error")),
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = self.relative(entry.path());
            if !is_source_file(&rel) || self.excludes.is_match(&rel) {
                continue;
            }
            if rel.contains('#') {
                warnings.push(format!("skipping {rel}: '#' is not allowed in package paths"));
                continue;
            }
            out.push(rel);
        }
        out.sort();
        Ok(out)
    }

    fn relative(&self, path: &Path) -> String {
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        rel.components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Directories (repo-relative) matching any of the workspace globs.
    fn workspace_dirs(&self, globs: &[String]) -> Result<Vec<String>, ProjectError> {
        let mut include = GlobSetBuilder::new();
        let mut exclude = GlobSetBuilder::new();
        for g in globs {
            let (negated, pattern) = match g.strip_prefix('!') {
                Some(p) => (true, p),
                None => (false, g.as_str()),
            };
            let pattern = pattern.trim_start_matches("./").trim_end_matches('/');
            let glob = Glob::new(pattern).map_err(|e| ProjectError::BadExclude {
                pattern: g.clone(),
                message: e.to_string(),
            })?;
            if negated {
                exclude.add(glob);
            } else {
                include.add(glob);
            }
        }
        let include = build_set(include)?;
        let exclude = build_set(exclude)?;
        let mut dirs = Vec::new();
        let walk = WalkDir::new(&self.root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| {
                e.depth() == 0
                    || (e.file_type().is_dir()
                        && !self.excluded_dir(&e.file_name().to_string_lossy(), &self.relative(e.path())))
            });
        for entry in walk.flatten() {
            if entry.depth() == 0 {
                continue;
            }
            let rel = self.relative(entry.path());
            if include.is_match(&rel) && !exclude.is_match(&rel) && entry.path().join(MANIFEST_FILE).is_file() {
                dirs.push(rel);
            }
        }
        dirs.sort();
        // Drop workspaces nested inside another matched workspace.
        let mut kept: Vec<String> = Vec::new();
        for d in dirs {
            if !kept.iter().any(|k| is_under(&d, k)) {
                kept.push(d);
            }
        }
        Ok(kept)
    }
}

fn build_set(builder: GlobSetBuilder) -> Result<GlobSet, ProjectError> {
    builder.build().map_err(|e| ProjectError::BadExclude {
        pattern: String::new(),
        message: e.to_string(),
    })
}

/// Whether repo-relative `path` lies inside directory `dir`.
pub fn is_under(path: &str, dir: &str) -> bool {
    dir.is_empty() || path == dir || (path.starts_with(dir) && path.as_bytes().get(dir.len()) == Some(&b'/'))
}

fn base_name(path: &Path) -> String {
    fs::canonicalize(path)
        .ok()
        .as_deref()
        .and_then(Path::file_name)
        .or_else(|| path.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "repo".to_string())
}

fn load_manifest(dir: &Path, warnings: &mut Vec<String>) -> Manifest {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() {
        return Manifest::default();
    }
    match read_manifest(&path) {
        Ok(m) => m,
        Err(e) => {
            warnings.push(e.to_string());
            Manifest::default()
        }
    }
}

fn sanitize_name(name: &str) -> String {
    let cleaned = name.replace('#', "_");
    if cleaned.is_empty() {
        "_".to_string()
    } else {
        cleaned
    }
}

pub fn discover_layout(root: &Path, opts: &DiscoverOptions) -> Result<ProjectLayout, ProjectError> {
    if !root.is_dir() {
        return Err(ProjectError::NotADirectory(root.to_path_buf()));
    }
    let mut excludes = GlobSetBuilder::new();
    for pattern in &opts.excludes {
        let glob = Glob::new(pattern).map_err(|e| ProjectError::BadExclude {
            pattern: pattern.clone(),
            message: e.to_string(),
        })?;
        excludes.add(glob);
    }
    let walker = Walker {
        root: root.to_path_buf(),
        default_excludes: opts.default_excludes,
        excludes: build_set(excludes)?,
    };
    let mut warnings = Vec::new();
    let root_manifest = load_manifest(root, &mut warnings);
    let dir_name = base_name(root);
    let repo_name = sanitize_name(root_manifest.name.as_deref().unwrap_or(&dir_name));

    let workspace_globs = root_manifest.workspaces.clone().unwrap_or_default();
    if opts.monorepo && workspace_globs.is_empty() {
        warnings
            .push("--monorepo given but the root manifest declares no workspaces; indexing as a single module".into());
    }
    let mut modules = Vec::new();
    let mode = if opts.monorepo && !workspace_globs.is_empty() {
        let dirs = walker.workspace_dirs(&workspace_globs)?;
        let mut claimed: BTreeSet<String> = BTreeSet::new();
        for dir in &dirs {
            let manifest = load_manifest(&root.join(dir), &mut warnings);
            let name = manifest
                .name
                .clone()
                .unwrap_or_else(|| dir.rsplit('/').next().unwrap_or(dir).to_string());
            let mut files = walker.source_files(dir, &mut warnings)?;
            files.retain(|f| {
                if claimed.insert(f.clone()) {
                    true
                } else {
                    warnings.push(format!("{f} matched by several workspaces; kept in the first"));
                    false
                }
            });
            modules.push(ModuleSpec {
                name: sanitize_name(&name),
                root_dir: dir.clone(),
                manifest,
                source_files: files,
            });
        }
        if opts.include_root_module {
            let files: Vec<String> = walker
                .source_files("", &mut warnings)?
                .into_iter()
                .filter(|f| !dirs.iter().any(|d| is_under(f, d)))
                .collect();
            modules.push(ModuleSpec {
                name: repo_name.clone(),
                root_dir: String::new(),
                manifest: root_manifest.clone(),
                source_files: files,
            });
        }
        LayoutMode::Monorepo
    } else {
        let files = walker.source_files("", &mut warnings)?;
        modules.push(ModuleSpec {
            name: repo_name.clone(),
            root_dir: String::new(),
            manifest: root_manifest.clone(),
            source_files: files,
        });
        LayoutMode::Single
    };
    disambiguate(&mut modules, &mut warnings);
    modules.sort_by(|a, b| a.name.cmp(&b.name));
    let mut layout = ProjectLayout {
        root: root.to_path_buf(),
        repo_name,
        modules,
        mode,
        warnings,
    };
    if layout.file_count() == 0 {
        layout.warnings.push("project contains no source files".into());
    }
    Ok(layout)
}

/// Module names must be unique; later duplicates are suffixed with their
/// directory.
fn disambiguate(modules: &mut [ModuleSpec], warnings: &mut Vec<String>) {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for m in modules.iter_mut() {
        let count = seen.entry(m.name.clone()).or_insert(0);
        *count += 1;
        if *count > 1 {
            let renamed = sanitize_name(&format!("{}~{}", m.name, m.root_dir));
            warnings.push(format!("duplicate module name {}; using {renamed}", m.name));
            m.name = renamed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, rel: &str, text: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    #[test]
    fn manifest_fields() {
        let m =
            parse_manifest(r#"{"name":"demo","dependencies":{"left-pad":"1.0"},"devDependencies":{"aa":"1"},"x":1}"#)
                .unwrap();
        assert_eq!(m.name.as_deref(), Some("demo"));
        assert_eq!(m.dependencies, ["aa", "left-pad"]);
        assert_eq!(m.workspaces, None);
        let m = parse_manifest(r#"{"name":"root","workspaces":["packages/*"]}"#).unwrap();
        assert_eq!(m.workspaces.unwrap(), ["packages/*"]);
        let m = parse_manifest(r#"{"workspaces":{"packages":["libs/*"]}}"#).unwrap();
        assert_eq!(m.workspaces.unwrap(), ["libs/*"]);
        assert!(parse_manifest("not json").is_err());
    }

    #[test]
    fn malformed_manifest_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "package.json", "not json");
        let err = read_manifest(&dir.path().join("package.json")).unwrap_err();
        assert!(matches!(err, ManifestError::Malformed { .. }));
        // Discovery continues with an anonymous module.
        write(dir.path(), "a.ts", "");
        let layout = discover_layout(dir.path(), &DiscoverOptions::default()).unwrap();
        assert_eq!(layout.modules.len(), 1);
        assert!(!layout.warnings.is_empty());
    }

    #[test]
    fn source_extensions() {
        assert!(is_source_file("a/b.ts"));
        assert!(is_source_file("a/b.tsx"));
        assert!(!is_source_file("a/b.d.ts"));
        assert!(!is_source_file("a/b.js"));
        assert!(!is_source_file("README"));
    }

    #[test]
    fn single_mode_excludes() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "package.json", r#"{"name":"demo"}"#);
        write(root, "service.ts", "");
        write(root, "index.ts", "");
        write(root, "lib/user-repo.ts", "");
        write(root, "types.d.ts", "");
        write(root, "node_modules/x/index.ts", "");
        write(root, ".git/hooks.ts", "");
        write(root, "dist/out.ts", "");
        write(root, "gen/skip.ts", "");
        let opts = DiscoverOptions {
            excludes: vec!["gen/**".into()],
            ..Default::default()
        };
        let layout = discover_layout(root, &opts).unwrap();
        assert_eq!(layout.mode, LayoutMode::Single);
        assert_eq!(layout.modules.len(), 1);
        assert_eq!(layout.modules[0].name, "demo");
        assert_eq!(
            layout.modules[0].source_files,
            ["index.ts", "lib/user-repo.ts", "service.ts"]
        );
    }

    #[test]
    fn monorepo_workspaces() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "package.json", r#"{"name":"root","workspaces":["packages/*"]}"#);
        write(root, "packages/a/package.json", r#"{"name":"pkg-a"}"#);
        write(root, "packages/a/src/x.ts", "");
        write(root, "packages/b/package.json", r#"{"name":"pkg-b"}"#);
        write(root, "packages/b/src/index.ts", "");
        write(root, "packages/c/readme.md", "");
        write(root, "tools/t.ts", "");
        let opts = DiscoverOptions {
            monorepo: true,
            ..Default::default()
        };
        let layout = discover_layout(root, &opts).unwrap();
        assert_eq!(layout.mode, LayoutMode::Monorepo);
        let names: Vec<&str> = layout.modules.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, ["pkg-a", "pkg-b"]);
        assert_eq!(layout.modules[0].source_files, ["packages/a/src/x.ts"]);

        let opts = DiscoverOptions {
            monorepo: true,
            include_root_module: true,
            ..Default::default()
        };
        let layout = discover_layout(root, &opts).unwrap();
        let root_module = layout.modules.iter().find(|m| m.name == "root").unwrap();
        assert_eq!(root_module.source_files, ["tools/t.ts"]);
    }

    #[test]
    fn monorepo_without_workspaces_falls_back() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.ts", "");
        let opts = DiscoverOptions {
            monorepo: true,
            ..Default::default()
        };
        let layout = discover_layout(dir.path(), &opts).unwrap();
        assert_eq!(layout.mode, LayoutMode::Single);
        assert_eq!(layout.warnings.len(), 1);
    }

    #[test]
    fn not_a_directory() {
        let err = discover_layout(Path::new("/definitely/not/here"), &DiscoverOptions::default()).unwrap_err();
        assert!(matches!(err, ProjectError::NotADirectory(_)));
    }

    #[test]
    fn empty_project_is_a_warning() {
        let dir = tempfile::tempdir().unwrap();
        let layout = discover_layout(dir.path(), &DiscoverOptions::default()).unwrap();
        assert_eq!(layout.file_count(), 0);
        assert_eq!(layout.warnings, ["project contains no source files"]);
    }

    #[test]
    fn nesting_check() {
        assert!(is_under("packages/a/x.ts", "packages/a"));
        assert!(!is_under("packages/ab/x.ts", "packages/a"));
        assert!(is_under("x.ts", ""));
    }
}
