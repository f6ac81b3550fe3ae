//! Acceptance criteria for the fixture corpus. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::{
    braces_balance, copy_corpus, md_math_blocks, oracle, plain_text, read_tree, resolver_answer,
    tex_math_blocks, tree_diff, Gen,
};
use hypertwin::cli;
use hypertwin::emit::{emit_plain, EmitOptions};
use hypertwin::resolver::ResolveOptions;
use hypertwin::site::{build, check_links, sha256_hex, ProjectConfig};
use hypertwin::{analyze, source_files, DiagnosticCode, FileId, ResolvedProject, Role, Span};
use regex::Regex;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn site(config: impl FnOnce(&mut ProjectConfig), out: &Path) -> hypertwin::site::BuildReport {
    let mut c = ProjectConfig::new(common::corpus_dir(), out);
    config(&mut c);
    build(&c).expect("build succeeds")
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(
        std::iter::once("hypertwin").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = common::corpus();
    let (expected, actual) = (oracle(&p), resolver_answer(&p));
    let elapsed = start.elapsed();
    let agree = expected
        .iter()
        .filter(|(k, v)| actual.get(*k) == Some(*v))
        .count();
    ensure(
        agree == expected.len() && actual.len() == expected.len(),
        || format!("{agree}/{} references agree", expected.len()),
    )?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{agree}/{agree} references agree with the oracle in {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let check = |p: &ResolvedProject| -> Result<usize, String> {
        for id in (0..p.files.len() as u32).map(FileId) {
            let page = emit_plain(p, id, &EmitOptions::default());
            ensure(plain_text(&page.contents) == p.file(id).text(), || {
                format!("{} does not round-trip", p.file(id).path())
            })?;
        }
        Ok(p.files.len())
    };
    let mut files = check(&common::corpus())?;
    let mut fuzzed = 0;
    for seed in 0..100 {
        let p = common::project(&Gen::new(seed, false).project(5));
        ensure(
            !p.diagnostics.iter().any(|d| d.code == DiagnosticCode::E005),
            || format!("generated project {seed} does not parse"),
        )?;
        fuzzed += check(&p)?;
    }
    files += fuzzed;
    ensure(fuzzed == 500, || format!("{fuzzed} fuzzed files"))?;
    Ok(format!("{files} files round-trip, 0 mismatches"))
}

fn criterion_3() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("site");
    site(|_| {}, &out);
    let found = check_links(&out).map_err(|e| e.to_string())?;
    ensure(found.is_empty(), || {
        format!("{} broken links, first {:?}", found.len(), found[0])
    })?;
    Ok("0 link findings over all three formats".into())
}

fn criterion_4() -> Outcome {
    let p = common::corpus();
    let mut pairs = 0;
    for (r, d) in &p.resolution {
        ensure(p.back_refs[d.index()].contains(r), || {
            format!("{r:?} missing from back_refs")
        })?;
        pairs += 1;
    }
    for (d, refs) in p.back_refs.iter().enumerate() {
        for r in refs {
            ensure(p.resolution.get(r).map(|id| id.index()) == Some(d), || {
                format!("back_ref {r:?} does not resolve to its declaration")
            })?;
        }
    }
    let listed: usize = p.back_refs.iter().map(Vec::len).sum();
    ensure(listed == pairs, || {
        format!("{listed} back-refs for {pairs} resolutions")
    })?;

    let root = common::corpus_dir().to_string_lossy().into_owned();
    let alias = run_cli(&["refs", &root, "funcon:alloc-init"]);
    let canonical = run_cli(&["refs", &root, "funcon:allocate-initialised-variable"]);
    ensure(
        alias == canonical && alias.0 == 0 && !alias.1.is_empty(),
        || format!("alias refs {alias:?} differ from canonical {canonical:?}"),
    )?;
    Ok(format!(
        "{pairs} resolution pairs invert exactly; alias refs identical ({} lines)",
        alias.1.lines().count()
    ))
}

fn criterion_5() -> Outcome {
    let analyze_files = |files: &[(&str, &str)]| {
        analyze(
            source_files(files.iter().copied()).unwrap(),
            ResolveOptions::default(),
        )
    };
    let codes = |p: &ResolvedProject| p.diagnostics.iter().map(|d| d.code).collect::<Vec<_>>();

    let dup = analyze_files(&[
        ("a.cbs", "Funcon foo : values\nType values\n"),
        ("b.cbs", "Funcon foo : values\n"),
    ]);
    ensure(codes(&dup) == [DiagnosticCode::E002], || {
        format!("duplicate: {:?}", dup.diagnostics)
    })?;
    let related = dup.diagnostics[0]
        .related
        .map(|s| dup.location(s).to_string());
    ensure(related.as_deref() == Some("a.cbs:1:8"), || {
        format!("related span {related:?}")
    })?;

    let arity = analyze_files(&[(
        "a.cbs",
        "Type values\nFuncon pair(_:values, _:values) : values\nRule pair(1, 2, 3) = pair(1, 2)\n",
    )]);
    ensure(codes(&arity) == [DiagnosticCode::E003], || {
        format!("arity: {:?}", arity.diagnostics)
    })?;

    let sort = analyze_files(&[(
        "a.cbs",
        "Syntax Exp ::= \"x\"\nSyntax Stmt ::= \"s\"\nType values\n\
         Semantics eval[[ _:Exp ]] : values\nMeta-variables S <: Stmt\n\
         Rule eval[[ S ]] = eval[[ \"x\" ]]\n",
    )]);
    ensure(codes(&sort) == [DiagnosticCode::E004], || {
        format!("sort: {:?}", sort.diagnostics)
    })?;

    let undeclared = analyze_files(&[("a.cbs", "Type values\nRule values = missing\n")]);
    ensure(codes(&undeclared) == [DiagnosticCode::E001], || {
        format!("undeclared: {:?}", undeclared.diagnostics)
    })?;
    Ok("E002 (with related span), E003, E004, E001 each fire exactly once".into())
}

fn criterion_6() -> Outcome {
    const EDITED: &str = "Funcons-beta/Computations/Normal/Interacting.cbs";
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    copy_corpus(&src);
    let config = |out: &str, incremental: bool| {
        let mut c = ProjectConfig::new(&src, dir.path().join(out));
        c.incremental = incremental;
        c
    };
    build(&config("inc", true)).unwrap();
    let path = src.join(EDITED);
    let text = fs::read_to_string(&path).unwrap();
    fs::write(
        &path,
        text.replace("Funcon print", "/* Writes values. */\n\nFuncon print"),
    )
    .unwrap();

    let report = build(&config("inc", true)).unwrap();
    let regenerated: BTreeSet<&str> = report.regenerated.iter().map(String::as_str).collect();
    let expected = BTreeSet::from([
        EDITED,
        "Languages-beta/IMP/IMP-2-Statements.cbs",
        "Languages-beta/SIMPLE/SIMPLE-3-Statements.cbs",
    ]);
    ensure(regenerated == expected && report.index_written, || {
        format!(
            "regenerated {regenerated:?}, index {}",
            report.index_written
        )
    })?;
    build(&config("scratch", false)).unwrap();
    let diff = tree_diff(
        &read_tree(&dir.path().join("inc")),
        &read_tree(&dir.path().join("scratch")),
    );
    ensure(diff.is_empty(), || {
        format!("incremental tree differs: {diff:?}")
    })?;
    let again = build(&config("inc", true)).unwrap();
    ensure(again.pages_written == 0, || {
        format!("no-change rebuild wrote {}", again.pages_written)
    })?;
    Ok(format!(
        "3 sources + index regenerated ({} pages), tree identical to scratch, no-change rebuild wrote 0",
        report.pages_written
    ))
}

fn tree_hashes(root: &Path) -> BTreeMap<String, String> {
    read_tree(root)
        .into_iter()
        .map(|(k, v)| (k, sha256_hex(&v)))
        .collect()
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    site(|_| {}, &dir.path().join("a"));
    site(|_| {}, &dir.path().join("b"));
    let (a, b) = (
        tree_hashes(&dir.path().join("a")),
        tree_hashes(&dir.path().join("b")),
    );
    ensure(a == b, || "clean builds differ".into())?;
    Ok(format!(
        "{} files hash-identical across two clean builds",
        a.len()
    ))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("site");
    site(|_| {}, &out);
    let tree = read_tree(&out);
    let mut blocks = 0;
    for (path, bytes) in &tree {
        let Some(stem) = path
            .strip_prefix("pdf/")
            .and_then(|p| p.strip_suffix(".tex"))
        else {
            continue;
        };
        if path == hypertwin::emit::MACROS_PATH {
            continue;
        }
        let tex = tex_math_blocks(std::str::from_utf8(bytes).unwrap());
        let md = md_math_blocks(std::str::from_utf8(&tree[&format!("pretty/{stem}.md")]).unwrap());
        ensure(tex == md, || format!("{path} differs from its PRETTY twin"))?;
        for block in &tex {
            ensure(braces_balance(block), || {
                format!("unbalanced braces in {path}")
            })?;
        }
        blocks += tex.len();
    }
    ensure(blocks > 0, || "no math blocks".into())?;
    Ok(format!(
        "{blocks} math blocks identical in PRETTY and PDF, braces balanced"
    ))
}

/// Source position of the anchor with id `fragment` on a PLAIN page.
fn anchor_offset(html: &str, fragment: &str) -> Option<usize> {
    let at = html.find(&format!("<a id=\"{fragment}\">"))?;
    Some(plain_text(&format!("{}</pre>", &html[..at])).len())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("site");
    let report = site(|c| c.emit.emit_backrefs = true, &out);
    let p = &report.project;
    let root = common::corpus_dir().to_string_lossy().into_owned();
    let link = Regex::new(r##"<a href="([^"#]*)#([^"]+)" id="ref-(\d+)">"##).unwrap();

    let mut checked = BTreeSet::new();
    for file in &p.files {
        let page = format!("plain/{}.html", file.path().trim_end_matches(".cbs"));
        let html = fs::read_to_string(out.join(&page)).unwrap();
        for c in link.captures_iter(&html) {
            let start: usize = c[3].parse().unwrap();
            let (line, col) = file.line_col_of(start).unwrap();
            let (code, answer) = run_cli(&[
                "resolve",
                &root,
                file.path(),
                &line.to_string(),
                &col.to_string(),
            ]);
            ensure(code == 0, || {
                format!("resolve {}:{line}:{col} exited {code}", file.path())
            })?;
            let resolved = answer.split(' ').next().unwrap_or_default().to_string();

            let target_page = if c[1].is_empty() {
                page.clone()
            } else {
                let mut parts: Vec<&str> = page.split('/').collect();
                parts.pop();
                for seg in c[1].split('/') {
                    if seg == ".." {
                        parts.pop();
                    } else {
                        parts.push(seg);
                    }
                }
                parts.join("/")
            };
            let target_src = format!(
                "{}.cbs",
                target_page
                    .strip_prefix("plain/")
                    .unwrap()
                    .trim_end_matches(".html")
            );
            let target_html = fs::read_to_string(out.join(&target_page)).unwrap();
            let offset = anchor_offset(&target_html, &c[2])
                .ok_or_else(|| format!("no anchor {} in {target_page}", &c[2]))?;
            let target = p.file_by_path(&target_src).unwrap();
            let (tl, tc) = target.line_col_of(offset).unwrap();
            let linked = format!("{target_src}:{tl}:{tc}");
            ensure(linked == resolved, || {
                format!(
                    "{}:{line}:{col} links to {linked}, resolves to {resolved}",
                    file.path()
                )
            })?;
            checked.insert(Span::new(file.id(), start, start));
        }
    }
    let references = p
        .occurrences
        .iter()
        .flatten()
        .filter(|o| o.role == Role::Reference)
        .count();
    ensure(
        checked.len() == p.resolution.len() && references == p.resolution.len(),
        || {
            format!(
                "checked {} links for {} resolved references",
                checked.len(),
                p.resolution.len()
            )
        },
    )?;
    Ok(format!(
        "{} references: link target equals resolve answer",
        checked.len()
    ))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let report = site(|_| {}, &dir.path().join("site"));
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("full build took {elapsed:?}")
    })?;
    Ok(format!(
        "full build of {} pages in {elapsed:.2?}",
        report.pages_written
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("resolution oracle equivalence", criterion_1),
        ("verbatim round-trip", criterion_2),
        ("link integrity", criterion_3),
        ("inverse property and alias refs", criterion_4),
        ("seeded diagnostics", criterion_5),
        ("incremental correctness and minimality", criterion_6),
        ("deterministic builds", criterion_7),
        ("PRETTY/PDF math consistency", criterion_8),
        ("end-to-end navigation", criterion_9),
        ("performance", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
