//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any failed.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::oracle::{Oracle, SiteKey};
use common::synth::{generate, line_count, mutate, write_repo, SynthParams};
use common::{fixture, options, FIXTURES};
use uniast::entities::{EntityId, SiteKind};
use uniast::graph::{check_graph_invariants, load_index, serialize_index, CodeGraph, Relation};
use uniast::indexer::{analyze_repository, index_repository};
use uniast::query::neighbors;
use uniast::resolve::{Resolution, Resolver};

const LISTING1_BUDGET: Duration = Duration::from_secs(1);
const SYNTHETIC_REPOS: u64 = 200;
const PERF_FILES: [usize; 3] = [250, 500, 1000];
const PERF_MIN_LINES: usize = 150_000;
const PERF_BUDGET: Duration = Duration::from_secs(60);
const PERF_MAX_SLOPE: f64 = 2.0;
const FUZZ_FILES: usize = 1000;
const MAX_FIXTURE_FILES: usize = 20;
const QUERY_DEPTHS: [usize; 3] = [1, 2, 3];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniast"))
        .args(args)
        .output()
        .expect("spawn uniast")
}

fn index_cli(root: &Path, out: &Path, extra: &[&str]) -> Result<Vec<u8>, String> {
    let mut args = vec!["index", root.to_str().unwrap(), "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = uniast(&args);
    ensure(o.status.code() == Some(0), || {
        format!(
            "{}: exit {:?}: {}",
            root.display(),
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        )
    })?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn id(s: &str) -> EntityId {
    s.parse().unwrap()
}

fn listing1() -> Outcome {
    let started = Instant::now();
    let out = index_repository(&fixture("listing1"), &options(false, None)).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let idx = &out.index;

    let nodes: Vec<String> = idx.graph.nodes.iter().map(|n| n.to_string()).collect();
    let want_nodes = [
        "demo#service.ts#loadUser",
        "demo#user-repo.ts#UserRepo",
        "demo#user-repo.ts#UserRepo.getById",
    ];
    ensure(nodes == want_nodes, || format!("nodes {nodes:?}"))?;
    let kinds: Vec<&str> = idx
        .graph
        .nodes
        .iter()
        .map(|n| idx.entity(n).unwrap().kind.as_str())
        .collect();
    ensure(kinds == ["Function", "Type", "Function"], || format!("kinds {kinds:?}"))?;

    let edges: Vec<(String, &str, String, &str)> = idx
        .graph
        .edges
        .iter()
        .map(|e| {
            (
                e.from.symbol.clone(),
                e.relation.as_str(),
                e.to.symbol.clone(),
                e.site_kind.map_or("", SiteKind::as_str),
            )
        })
        .collect();
    let want: Vec<(String, &str, String, &str)> = [
        ("UserRepo", "Reference", "loadUser", "constructor"),
        ("UserRepo", "Reference", "loadUser", "import_ref"),
        ("UserRepo.getById", "Reference", "loadUser", "method_call"),
        ("loadUser", "Dependency", "UserRepo", "constructor"),
        ("loadUser", "Dependency", "UserRepo", "import_ref"),
        ("loadUser", "Dependency", "UserRepo.getById", "method_call"),
    ]
    .into_iter()
    .map(|(a, r, b, k)| (a.to_string(), r, b.to_string(), k))
    .collect();
    let (mut got_sorted, mut want_sorted) = (edges.clone(), want);
    got_sorted.sort();
    want_sorted.sort();
    ensure(got_sorted == want_sorted, || format!("edges {edges:?}"))?;

    let a = analyze_repository(&fixture("listing1"), &options(false, None)).map_err(|e| e.to_string())?;
    let hops = Resolver::new(&a.facts, &a.specifiers).resolve_symbol("service.ts", "Repo");
    let want_hops = Resolution::Internal {
        target: id("demo#user-repo.ts#UserRepo"),
        hops: 2,
    };
    ensure(hops == want_hops, || format!("Repo resolved to {hops:?}"))?;

    let golden = std::fs::read(fixture("../golden/listing1.json")).map_err(|e| e.to_string())?;
    ensure(serialize_index(idx) == golden, || {
        "serialized index differs from the golden file".into()
    })?;
    ensure(elapsed < LISTING1_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "3 entities, 3+3 edges, hops=2, {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

/// Dependency and Reference edges mirror each other exactly and every
/// endpoint is an indexed entity.
fn check_mirroring(graph: &CodeGraph, nodes_with_records: impl Fn(&EntityId) -> bool) -> Result<(), String> {
    let mut deps: Vec<(&EntityId, &EntityId, Option<SiteKind>)> = Vec::new();
    let mut refs = Vec::new();
    for e in &graph.edges {
        ensure(
            graph.nodes.binary_search(&e.from).is_ok() && graph.nodes.binary_search(&e.to).is_ok(),
            || format!("dangling edge {} -> {}", e.from, e.to),
        )?;
        match e.relation {
            Relation::Dependency => deps.push((&e.from, &e.to, e.site_kind)),
            Relation::Reference => refs.push((&e.to, &e.from, e.site_kind)),
            _ => {}
        }
    }
    ensure(deps.len() == refs.len(), || {
        format!("{} dependency vs {} reference", deps.len(), refs.len())
    })?;
    deps.sort();
    refs.sort();
    ensure(deps == refs, || "reference edges do not mirror dependency edges".into())?;
    for n in &graph.nodes {
        ensure(nodes_with_records(n), || format!("node {n} has no record"))?;
    }
    Ok(())
}

fn bijection() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (mut edges, mut files) = (0usize, 0usize);
    for seed in 0..SYNTHETIC_REPOS {
        let root = dir.path().join(format!("r{seed}"));
        let repo = generate(0xB1_0000 + seed, &SynthParams::default());
        files += repo.len();
        write_repo(&root, "synth", &repo);
        let out = index_repository(&root, &options(false, None)).map_err(|e| e.to_string())?;
        let idx = &out.index;
        check_mirroring(&idx.graph, |n| idx.entity(n).is_some()).map_err(|e| format!("seed {seed}: {e}"))?;
        check_graph_invariants(&idx.graph).map_err(|e| format!("seed {seed}: {e}"))?;
        edges += idx.graph.count(Relation::Dependency);
        std::fs::remove_dir_all(&root).ok();
    }
    ensure(edges > 0, || "corpus produced no dependency edges".into())?;
    Ok(format!(
        "{SYNTHETIC_REPOS} repos, {files} files, {edges} dependency edges, 0 violations"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut sites = 0usize;
    for &(name, monorepo) in FIXTURES {
        let root = fixture(name);
        let a = analyze_repository(&root, &options(monorepo, None)).map_err(|e| e.to_string())?;
        ensure(a.facts.len() <= MAX_FIXTURE_FILES, || {
            format!("{name}: {} files", a.facts.len())
        })?;
        let mut lib: BTreeMap<SiteKey, Resolution> = BTreeMap::new();
        for r in a.resolved.sites {
            let s = r.site;
            let key = (
                s.from.to_string(),
                s.kind.as_str(),
                s.raw_name,
                s.span.byte_start,
                s.span.byte_end,
            );
            lib.insert(key, r.resolution);
        }
        let oracle = Oracle::load(&root, &options(monorepo, None).discover).resolve_all();
        if lib != oracle {
            let diff = lib
                .iter()
                .find(|(k, v)| oracle.get(*k) != Some(*v))
                .map(|(k, v)| format!("{k:?}: {v:?} vs {:?}", oracle.get(k)))
                .unwrap_or_else(|| format!("{} vs {} sites", lib.len(), oracle.len()));
            return Err(format!("{name}: {diff}"));
        }
        sites += lib.len();
    }
    Ok(format!("{} fixtures, {sites} sites identical", FIXTURES.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for &(name, monorepo) in FIXTURES {
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            for run in 0..2 {
                let out = dir.path().join(format!("{name}-{jobs}-{run}.json"));
                let mut extra = vec!["--jobs", jobs];
                if monorepo {
                    extra.push("--monorepo");
                }
                outputs.push((jobs, index_cli(&fixture(name), &out, &extra)?));
            }
        }
        for (jobs, bytes) in &outputs[1..] {
            ensure(*bytes == outputs[0].1, || {
                format!("{name}: --jobs {jobs} output differs")
            })?;
        }
    }
    Ok(format!(
        "{} fixtures x (--jobs 1, --jobs 8) x 2 runs byte-identical",
        FIXTURES.len()
    ))
}

fn perf_params(files: usize) -> SynthParams {
    SynthParams {
        files: files..=files,
        entities_per_file: 6..=10,
        max_chain: 4,
        filler: 60,
    }
}

/// Least-squares slope of log(time) against log(size).
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Crates that would give the binary a network stack.
const NETWORK_CRATES: &[&str] = &[
    "hyper", "reqwest", "tokio", "mio", "socket2", "ureq", "curl", "h2", "tonic",
];

fn runtime_dependencies_are_offline() -> Result<(), String> {
    let lock = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../Cargo.lock"))
        .map_err(|e| e.to_string())?;
    for line in lock.lines() {
        if let Some(name) = line.strip_prefix("name = ") {
            let name = name.trim_matches('"');
            ensure(!NETWORK_CRATES.contains(&name), || format!("lockfile contains {name}"))?;
        }
    }
    Ok(())
}

fn performance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    let mut largest = None;
    for files in PERF_FILES {
        let repo = generate(0x9E5F, &perf_params(files));
        let root = dir.path().join(format!("n{files}"));
        write_repo(&root, "perf", &repo);
        let out = dir.path().join(format!("n{files}.json"));
        let started = Instant::now();
        index_cli(&root, &out, &[])?;
        let secs = started.elapsed().as_secs_f64();
        points.push((files as f64, secs));
        largest = Some((root, out, repo.len(), line_count(&repo), secs));
    }
    let (root, out, files, lines, secs) = largest.unwrap();
    ensure(files == 1000, || format!("generator emitted {files} files"))?;
    ensure(lines >= PERF_MIN_LINES, || format!("only {lines} lines"))?;
    ensure(secs <= PERF_BUDGET.as_secs_f64(), || {
        format!("1000 files took {secs:.1}s")
    })?;
    let slope = log_log_slope(&points);
    ensure(slope <= PERF_MAX_SLOPE, || {
        format!("log-log slope {slope:.2}, points {points:?}")
    })?;

    runtime_dependencies_are_offline()?;
    // The build directory may be unreadable from inside a user namespace.
    let exe = dir.path().join("uniast-offline");
    std::fs::copy(env!("CARGO_BIN_EXE_uniast"), &exe).map_err(|e| e.to_string())?;
    let isolated = Command::new("unshare")
        .arg("-rn")
        .arg(&exe)
        .arg("index")
        .arg(&root)
        .arg("--output")
        .arg(out.with_extension("offline.json"))
        .output();
    let network = match isolated {
        Ok(o) if o.status.code() == Some(0) => {
            let a = std::fs::read(&out).map_err(|e| e.to_string())?;
            let b = std::fs::read(out.with_extension("offline.json")).map_err(|e| e.to_string())?;
            ensure(a == b, || "output differs without networking".into())?;
            "identical output with networking disabled"
        }
        Ok(o) if String::from_utf8_lossy(&o.stderr).contains("unshare") => {
            "network namespace unavailable, lockfile check only"
        }
        Ok(o) => return Err(format!("offline run failed: {}", String::from_utf8_lossy(&o.stderr))),
        Err(_) => "unshare not installed, lockfile check only",
    };
    let times: Vec<String> = points.iter().map(|(n, s)| format!("{n}:{s:.2}s")).collect();
    Ok(format!(
        "{files} files / {lines} lines in {secs:.1}s; times {}; slope {slope:.2}; {network}",
        times.join(" ")
    ))
}

fn fuzz() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path().join("fuzz");
    write_repo(&root, "fuzz", &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(0xF022);
    let mut written = 0usize;
    let mut seed = 0u64;
    while written < FUZZ_FILES {
        for (path, text) in generate(seed, &SynthParams::default()) {
            if written == FUZZ_FILES {
                break;
            }
            let full = root.join(format!("s{seed}")).join(&path);
            std::fs::create_dir_all(full.parent().unwrap()).map_err(|e| e.to_string())?;
            std::fs::write(full, mutate(&mut rng, &text)).map_err(|e| e.to_string())?;
            written += 1;
        }
        seed += 1;
    }
    let bytes = index_cli(&root, &dir.path().join("fuzz.json"), &[])?;
    let idx = load_index(&bytes).map_err(|e| format!("schema: {e}"))?;
    let packages = idx.package_count();
    ensure(packages == FUZZ_FILES, || format!("{packages} packages indexed"))?;
    let d = &idx.diagnostics;
    ensure(d.parse_errors > 0, || "no parse errors recorded".into())?;
    check_mirroring(&idx.graph, |n| idx.entity(n).is_some())?;
    Ok(format!(
        "{FUZZ_FILES} files, {} parse errors, {} warnings, {} entities, schema valid",
        d.parse_errors,
        d.warnings,
        idx.entity_count()
    ))
}

/// Hand-computed neighborhoods on Listing 1. Its graph is
/// L -> U, L -> G (Dependency) and U -> L, G -> L (Reference) with no
/// Implementation or Group edges, where L = loadUser, U = UserRepo and
/// G = UserRepo.getById.
fn expected_neighbors(center: &str, rels: &[Relation], depth: usize) -> Vec<(&'static str, Relation, usize)> {
    let dep = rels.contains(&Relation::Dependency);
    let rf = rels.contains(&Relation::Reference);
    match center {
        "L" if dep => vec![("U", Relation::Dependency, 1), ("G", Relation::Dependency, 1)],
        "U" | "G" if rf => {
            let mut out = vec![("L", Relation::Reference, 1)];
            if dep && depth >= 2 {
                out.push((if center == "U" { "G" } else { "U" }, Relation::Dependency, 2));
            }
            out
        }
        _ => Vec::new(),
    }
}

fn query_correctness() -> Outcome {
    let bytes = serialize_index(
        &index_repository(&fixture("listing1"), &options(false, None))
            .map_err(|e| e.to_string())?
            .index,
    );
    let idx = load_index(&bytes).map_err(|e| e.to_string())?;
    let ids = [
        ("L", id("demo#service.ts#loadUser")),
        ("U", id("demo#user-repo.ts#UserRepo")),
        ("G", id("demo#user-repo.ts#UserRepo.getById")),
    ];
    let full = |short: &str| ids.iter().find(|(s, _)| *s == short).unwrap().1.clone();
    let mut checked = 0usize;
    for mask in 1u32..16 {
        let rels: Vec<Relation> = Relation::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| *r)
            .collect();
        for (short, center) in &ids {
            for depth in QUERY_DEPTHS {
                let got: Vec<(EntityId, Relation, usize)> = neighbors(&idx, center, &rels, depth)
                    .ok_or("center missing")?
                    .neighbors
                    .into_iter()
                    .map(|n| (n.id, n.relation, n.hops))
                    .collect();
                let mut want: Vec<(EntityId, Relation, usize)> = expected_neighbors(short, &rels, depth)
                    .into_iter()
                    .map(|(s, r, h)| (full(s), r, h))
                    .collect();
                want.sort_by(|a, b| (a.2, &a.0).cmp(&(b.2, &b.0)));
                ensure(got == want, || format!("{short} {rels:?} depth {depth}: {got:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} queries (15 relation subsets x 3 centers x depths 1-3)"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("listing1 golden", listing1),
        ("dependency/reference bijection", bijection),
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
        ("scaled performance", performance),
        ("error totality", fuzz),
        ("query correctness", query_correctness),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
