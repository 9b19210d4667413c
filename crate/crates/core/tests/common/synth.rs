//! Seeded generator of synthetic TypeScript repositories in the supported
//! subset, plus a mutator for malformed inputs.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SynthParams {
    pub files: RangeInclusive<usize>,
    pub entities_per_file: RangeInclusive<usize>,
    /// Longest chain of re-exporting files in front of a definition.
    pub max_chain: usize,
    /// Extra statements per function body, to scale line counts.
    pub filler: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            files: 2..=20,
            entities_per_file: 1..=10,
            max_chain: 4,
            filler: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Function,
    Class,
    Interface,
    Value,
}

#[derive(Clone, Debug)]
struct Export {
    name: String,
    kind: Kind,
    /// Method names when `kind` is a class.
    methods: Vec<String>,
}

struct FileSpec {
    path: String,
    /// 0 for definition files, otherwise the re-export chain length.
    level: usize,
    exports: Vec<Export>,
}

/// Specifier for `to` as seen from `from`, both repo-relative.
fn relative(from: &str, to: &str) -> String {
    let mut from_dir: Vec<&str> = from.split('/').collect();
    from_dir.pop();
    let to_parts: Vec<&str> = to.split('/').collect();
    let common = from_dir.iter().zip(&to_parts).take_while(|(a, b)| a == b).count();
    let mut out = String::new();
    if common == from_dir.len() {
        out.push_str("./");
    } else {
        for _ in common..from_dir.len() {
            out.push_str("../");
        }
    }
    let rest = to_parts[common..].join("/");
    out.push_str(rest.strip_suffix(".ts").unwrap_or(&rest));
    out
}

pub fn generate(seed: u64, params: &SynthParams) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(params.files.clone());
    let mut specs: Vec<FileSpec> = Vec::new();
    let mut out = Vec::new();
    for i in 0..n {
        let dir = ["src", "src/core", "src/util", "lib"][rng.gen_range(0..4)];
        let path = format!("{dir}/f{i}.ts");
        let barrel_sources: Vec<usize> = (0..i).filter(|&j| specs[j].level < params.max_chain).collect();
        let is_barrel = i >= 2 && !barrel_sources.is_empty() && rng.gen_bool(0.3);
        let (text, spec) = if is_barrel {
            barrel(&mut rng, &path, &specs, &barrel_sources)
        } else {
            definitions(&mut rng, i, &path, &specs, params)
        };
        specs.push(spec);
        out.push((path, text));
    }
    out
}

fn barrel(rng: &mut ChaCha8Rng, path: &str, specs: &[FileSpec], sources: &[usize]) -> (String, FileSpec) {
    let mut text = String::new();
    let mut exports: Vec<Export> = Vec::new();
    let mut level = 0;
    let picks = rng.gen_range(1..=sources.len().min(3));
    let chosen: Vec<usize> = sources.choose_multiple(rng, picks).copied().collect();
    for src in chosen {
        let spec = &specs[src];
        if spec.exports.is_empty() {
            continue;
        }
        let from = relative(path, &spec.path);
        level = level.max(spec.level + 1);
        if rng.gen_bool(0.35) {
            writeln!(text, "export * from \"{from}\";").unwrap();
            for e in &spec.exports {
                if !exports.iter().any(|x| x.name == e.name) {
                    exports.push(e.clone());
                }
            }
        } else {
            let count = rng.gen_range(1..=spec.exports.len());
            let mut names = Vec::new();
            for e in spec.exports.choose_multiple(rng, count) {
                let alias = if rng.gen_bool(0.4) {
                    format!("{}_via{}", e.name, rng.gen_range(0..100))
                } else {
                    e.name.clone()
                };
                if exports.iter().any(|x| x.name == alias) {
                    continue;
                }
                names.push(if alias == e.name {
                    alias.clone()
                } else {
                    format!("{} as {alias}", e.name)
                });
                exports.push(Export {
                    name: alias,
                    ..e.clone()
                });
            }
            if !names.is_empty() {
                writeln!(text, "export {{ {} }} from \"{from}\";", names.join(", ")).unwrap();
            }
        }
    }
    (
        text,
        FileSpec {
            path: path.to_string(),
            level: level.max(1),
            exports,
        },
    )
}

fn definitions(
    rng: &mut ChaCha8Rng,
    i: usize,
    path: &str,
    specs: &[FileSpec],
    params: &SynthParams,
) -> (String, FileSpec) {
    let mut text = String::new();
    // Imports: a few names from earlier files, sometimes aliased or namespaced.
    let mut imported: Vec<(String, Export)> = Vec::new();
    let mut namespaces: Vec<(String, Export)> = Vec::new();
    let candidates: Vec<usize> = (0..specs.len()).filter(|&j| !specs[j].exports.is_empty()).collect();
    let import_files = rng.gen_range(0..=candidates.len().min(4));
    for (k, &j) in candidates.choose_multiple(rng, import_files).enumerate() {
        let from = relative(path, &specs[j].path);
        if rng.gen_bool(0.15) {
            let ns = format!("ns{k}");
            writeln!(text, "import * as {ns} from \"{from}\";").unwrap();
            for e in &specs[j].exports {
                namespaces.push((format!("{ns}.{}", e.name), e.clone()));
            }
            continue;
        }
        let count = rng.gen_range(1..=specs[j].exports.len().min(4));
        let mut names = Vec::new();
        for e in specs[j].exports.choose_multiple(rng, count) {
            if imported.iter().any(|(l, _)| *l == e.name) {
                continue;
            }
            let local = if rng.gen_bool(0.2) {
                format!("{}_as{k}", e.name)
            } else {
                e.name.clone()
            };
            if imported.iter().any(|(l, _)| *l == local) {
                continue;
            }
            names.push(if local == e.name {
                local.clone()
            } else {
                format!("{} as {local}", e.name)
            });
            imported.push((local, e.clone()));
        }
        if !names.is_empty() {
            let kw = if names.len() == 1 && imported.last().unwrap().1.kind == Kind::Interface {
                "import type"
            } else {
                "import"
            };
            writeln!(text, "{kw} {{ {} }} from \"{from}\";", names.join(", ")).unwrap();
        }
    }
    if rng.gen_bool(0.2) {
        writeln!(text, "import {{ pad }} from \"left-pad\";").unwrap();
        imported.push((
            "pad".to_string(),
            Export {
                name: "pad".into(),
                kind: Kind::Function,
                methods: vec![],
            },
        ));
    }
    text.push('\n');

    let visible: Vec<(String, Export)> = imported.iter().chain(namespaces.iter()).cloned().collect();
    let mut exports: Vec<Export> = Vec::new();
    let mut locals: Vec<(String, Export)> = Vec::new();
    let count = rng.gen_range(params.entities_per_file.clone());
    let mut made = 0;
    let mut j = 0;
    while made < count {
        let exported = rng.gen_bool(0.8);
        let kw = if exported { "export " } else { "" };
        let pool: Vec<(String, Export)> = visible.iter().chain(locals.iter()).cloned().collect();
        let choice = rng.gen_range(0..10);
        let e = match choice {
            0..=3 => {
                let name = format!("fn{i}_{j}");
                writeln!(text, "{kw}function {name}(a: number, b: string) {{").unwrap();
                body(rng, &mut text, &pool, params.filler);
                text.push_str("}\n\n");
                made += 1;
                Export {
                    name,
                    kind: Kind::Function,
                    methods: vec![],
                }
            }
            4..=5 => {
                let name = format!("C{i}_{j}");
                let classes: Vec<&(String, Export)> = pool.iter().filter(|(_, e)| e.kind == Kind::Class).collect();
                let ifaces: Vec<&(String, Export)> = pool.iter().filter(|(_, e)| e.kind == Kind::Interface).collect();
                let mut header = format!("{kw}class {name}");
                let mut inherited = Vec::new();
                if let Some((base, be)) = classes.choose(rng).filter(|_| rng.gen_bool(0.5)) {
                    write!(header, " extends {base}").unwrap();
                    inherited = be.methods.clone();
                }
                if let Some((iface, _)) = ifaces.choose(rng).filter(|_| rng.gen_bool(0.5)) {
                    write!(header, " implements {iface}").unwrap();
                }
                writeln!(text, "{header} {{").unwrap();
                let mut methods = Vec::new();
                for m in 0..rng.gen_range(1..=3) {
                    let mname = format!("m{m}");
                    writeln!(text, "  {mname}(x: number) {{").unwrap();
                    body(rng, &mut text, &pool, params.filler / 2);
                    text.push_str("  }\n");
                    methods.push(mname);
                }
                text.push_str("}\n\n");
                made += 1 + methods.len();
                methods.extend(inherited);
                Export {
                    name,
                    kind: Kind::Class,
                    methods,
                }
            }
            6 => {
                let name = format!("I{i}_{j}");
                writeln!(text, "{kw}interface {name} {{\n  id: number;\n  label(): string;\n}}\n").unwrap();
                made += 1;
                Export {
                    name,
                    kind: Kind::Interface,
                    methods: vec![],
                }
            }
            7 => {
                let a = format!("v{i}_{j}a");
                let b = format!("v{i}_{j}b");
                writeln!(text, "{kw}const {a} = {}, {b} = \"{}\";\n", rng.gen_range(0..100), j).unwrap();
                made += 2;
                let first = Export {
                    name: a.clone(),
                    kind: Kind::Value,
                    methods: vec![],
                };
                if exported {
                    exports.push(first.clone());
                }
                locals.push((a, first));
                Export {
                    name: b,
                    kind: Kind::Value,
                    methods: vec![],
                }
            }
            8 => {
                let name = format!("arrow{i}_{j}");
                writeln!(text, "{kw}const {name} = (n: number): number => {{").unwrap();
                body(rng, &mut text, &pool, params.filler / 2);
                text.push_str("};\n\n");
                made += 1;
                Export {
                    name,
                    kind: Kind::Function,
                    methods: vec![],
                }
            }
            _ => {
                let classes: Vec<&(String, Export)> = pool.iter().filter(|(_, e)| e.kind == Kind::Class).collect();
                let name = format!("inst{i}_{j}");
                match classes.choose(rng) {
                    Some((c, ce)) => {
                        writeln!(text, "{kw}const {name} = new {c}();\n").unwrap();
                        made += 1;
                        Export {
                            name,
                            kind: Kind::Value,
                            methods: ce.methods.clone(),
                        }
                    }
                    None => {
                        writeln!(text, "{kw}let {name}: number = {j};\n").unwrap();
                        made += 1;
                        Export {
                            name,
                            kind: Kind::Value,
                            methods: vec![],
                        }
                    }
                }
            }
        };
        j += 1;
        locals.push((e.name.clone(), e.clone()));
        if exported {
            exports.push(e);
        }
    }
    (
        text,
        FileSpec {
            path: path.to_string(),
            level: 0,
            exports,
        },
    )
}

/// Statements using names from `pool`, plus some that cannot resolve.
fn body(rng: &mut ChaCha8Rng, text: &mut String, pool: &[(String, Export)], filler: usize) {
    let uses = rng.gen_range(0..=4);
    for k in 0..uses {
        let Some((name, e)) = pool.choose(rng) else { break };
        match e.kind {
            Kind::Function => writeln!(text, "  {name}({k});").unwrap(),
            Kind::Class => {
                let var = format!("o{k}");
                writeln!(text, "  const {var} = new {name}();").unwrap();
                if let Some(m) = e.methods.choose(rng) {
                    writeln!(text, "  {var}.{m}({k});").unwrap();
                }
                if rng.gen_bool(0.3) {
                    writeln!(text, "  const t{k}: {name} = {var};").unwrap();
                }
            }
            Kind::Interface => writeln!(text, "  let h{k}: {name} | undefined;").unwrap(),
            Kind::Value => {
                if let Some(m) = e.methods.choose(rng) {
                    writeln!(text, "  {name}.{m}({k});").unwrap();
                } else {
                    writeln!(text, "  console.log({name});").unwrap();
                }
            }
        }
    }
    match rng.gen_range(0..6) {
        0 => text.push_str("  missingHelper();\n"),
        1 => text.push_str("  this.self();\n"),
        2 => text.push_str("  const shadow = (pad: number) => pad + 1;\n"),
        _ => {}
    }
    for k in 0..filler {
        match k % 4 {
            0 => writeln!(text, "  let f{k} = {k} * 2;").unwrap(),
            1 => writeln!(text, "  if (f{} > {k}) {{ f{} = f{} + 1; }}", k - 1, k - 1, k - 1).unwrap(),
            2 => writeln!(text, "  const s{k} = `item ${{f{}}}`;", k - 2).unwrap(),
            _ => writeln!(text, "  for (let q = 0; q < {k}; q++) {{ f{} += q; }}", k - 3).unwrap(),
        }
    }
    text.push_str("  return 0;\n");
}

pub fn write_repo(dir: &Path, name: &str, files: &[(String, String)]) {
    std::fs::create_dir_all(dir).unwrap();
    std::fs::write(dir.join("package.json"), format!("{{\n  \"name\": \"{name}\"\n}}\n")).unwrap();
    for (path, text) in files {
        let full = dir.join(path);
        std::fs::create_dir_all(full.parent().unwrap()).unwrap();
        std::fs::write(full, text).unwrap();
    }
}

pub fn line_count(files: &[(String, String)]) -> usize {
    files.iter().map(|(_, t)| t.lines().count()).sum()
}

/// Breaks `text` in one of several ways: truncation, token deletion,
/// injected punctuation, unbalanced braces, raw garbage or invalid UTF-8.
pub fn mutate(rng: &mut ChaCha8Rng, text: &str) -> Vec<u8> {
    let bytes = text.as_bytes();
    let cut = |rng: &mut ChaCha8Rng| {
        let mut at = rng.gen_range(0..=bytes.len());
        while !text.is_char_boundary(at) {
            at -= 1;
        }
        at
    };
    match rng.gen_range(0..7) {
        0 => bytes[..cut(rng)].to_vec(),
        1 => {
            let (a, b) = (cut(rng), cut(rng));
            let (a, b) = (a.min(b), a.max(b));
            [&bytes[..a], &bytes[b..]].concat()
        }
        2 => {
            let mut out = text.to_string();
            for _ in 0..rng.gen_range(1..8) {
                let at = {
                    let mut at = rng.gen_range(0..=out.len());
                    while !out.is_char_boundary(at) {
                        at -= 1;
                    }
                    at
                };
                let junk = [
                    "{", "}", "(", ")", "<", ">", "=>", "`", "\"", "'", "/*", ";", "class", "export", "@",
                ];
                out.insert_str(at, junk.choose(rng).unwrap());
            }
            out.into_bytes()
        }
        3 => {
            let mut out = text.replace('}', "");
            out.push_str("\nfunction tail( {");
            out.into_bytes()
        }
        4 => (0..rng.gen_range(0..400))
            .map(|_| rng.gen_range(0x20u8..0x7f))
            .collect(),
        5 => {
            let mut out = bytes.to_vec();
            let at = rng.gen_range(0..=out.len());
            out.splice(at..at, [0xff, 0xfe, 0x80]);
            out
        }
        _ => {
            let mut out = String::from("export class Broken<T extends {\n");
            out.push_str(&text[..cut(rng)]);
            out.push_str("\n`${ unterminated");
            out.into_bytes()
        }
    }
}
