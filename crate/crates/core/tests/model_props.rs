mod common;

use common::Gen;
use hypertwin::{sanitize_fragment, FileId, NameSort, SourceFile};
use proptest::prelude::*;

fn sort() -> impl Strategy<Value = NameSort> {
    prop::sample::select(vec![
        NameSort::Funcon,
        NameSort::Syntax,
        NameSort::Semantics,
        NameSort::MetaVar,
    ])
}

fn legal_name(sort: NameSort) -> BoxedStrategy<String> {
    match sort {
        NameSort::Funcon | NameSort::Semantics => "[a-z][a-z0-9]{0,3}(-[a-z0-9]{1,3}){0,2}".boxed(),
        NameSort::Syntax => "[A-Z][A-Za-z0-9]{0,5}".boxed(),
        NameSort::MetaVar => "[A-Z][A-Za-z0-9]{0,4}'{0,2}".boxed(),
    }
}

fn named() -> impl Strategy<Value = (NameSort, String)> {
    sort().prop_flat_map(|s| legal_name(s).prop_map(move |n| (s, n)))
}

proptest! {
    #[test]
    fn sanitize_is_injective(a in named(), b in named()) {
        if a != b {
            prop_assert_ne!(sanitize_fragment(a.0, &a.1), sanitize_fragment(b.0, &b.1));
        }
    }

    #[test]
    fn sanitized_fragments_are_url_safe((s, n) in named()) {
        let frag = sanitize_fragment(s, &n);
        prop_assert!(frag.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_'));
    }

    #[test]
    fn line_col_round_trips(seed in any::<u64>()) {
        let file = SourceFile::new(FileId(0), "t.cbs", Gen::new(seed, false).file()).unwrap();
        for (offset, _) in file.text().char_indices() {
            let (line, col) = file.line_col_of(offset).unwrap();
            prop_assert_eq!(file.offset_of(line, col), Some(offset));
        }
    }
}

#[test]
fn sanitize_distinguishes_tricky_pairs() {
    // An uppercase `U` must not collide with the escape prefix `_u`.
    let pairs = [
        (NameSort::Syntax, "U"),
        (NameSort::Syntax, "Ua"),
        (NameSort::MetaVar, "X'"),
        (NameSort::MetaVar, "X''"),
    ];
    let frags: std::collections::BTreeSet<String> = pairs
        .iter()
        .map(|(s, n)| sanitize_fragment(*s, n))
        .collect();
    assert_eq!(frags.len(), pairs.len());
}
