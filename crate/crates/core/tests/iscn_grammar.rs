mod support;

use litonto::iscn::{
    parse_iscn, parse_iscn_with, validate_count, ChromosomeId, CopyChange, IscnError, IscnEvent, ParseOptions,
};
use proptest::prelude::*;

use support::CORPUS;

/// Independent count: tally every chromosome copy in the karyotype.
fn enumerated_count(s: &str) -> i64 {
    let k = parse_iscn(s).unwrap();
    let mut copies = [2i64; 22];
    let sex = k.sex_field.len() as i64;
    for e in &k.events {
        if let IscnEvent::Numerical { change, chromosome, .. } = e {
            let delta = if *change == CopyChange::Gain { 1 } else { -1 };
            match chromosome {
                ChromosomeId::Autosome(n) => copies[usize::from(*n) - 1] += delta,
                // already counted in the sex field
                ChromosomeId::X | ChromosomeId::Y => {}
            }
        }
    }
    copies.iter().sum::<i64>() + sex
}

#[test]
fn corpus_strings_parse_and_count() {
    for s in CORPUS {
        let k = parse_iscn(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(validate_count(&k), "{s}");
        assert_eq!(k.to_string(), s);
        assert_eq!(enumerated_count(s), i64::from(k.declared_count), "{s}");
    }
}

#[test]
fn count_oracle_disagrees_with_bad_count() {
    let k = parse_iscn("44,XX,-22").unwrap();
    assert!(!validate_count(&k));
    assert_eq!(enumerated_count("44,XX,-22"), 45);
}

fn chromosome() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u8..=22).prop_map(|n| n.to_string()),
        Just("X".to_owned()),
        Just("Y".to_owned()),
    ]
}

fn band() -> impl Strategy<Value = String> {
    (prop_oneof![Just('p'), Just('q')], 1u32..40, prop::option::of(1u32..10)).prop_map(|(arm, band, sub)| match sub {
        Some(sub) => format!("{arm}{band}.{sub}"),
        None => format!("{arm}{band}"),
    })
}

fn event() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => (prop_oneof![Just('+'), Just('-')], chromosome(), any::<bool>())
            .prop_map(|(sign, c, constitutional)| format!("{sign}{c}{}", if constitutional { "c" } else { "" })),
        1 => (prop::collection::vec((chromosome(), band()), 2..4)).prop_map(|pairs| {
            let (cs, bs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            format!("t({})({})", cs.join(";"), bs.join(";"))
        }),
        1 => (prop_oneof![Just("inv"), Just("del"), Just("dup")], chromosome(), band(), prop::option::of(band()))
            .prop_map(|(sym, c, b1, b2)| format!("{sym}({c})({b1}{})", b2.unwrap_or_default())),
    ]
}

fn karyotype_string() -> impl Strategy<Value = String> {
    (1u32..100, "[XY]{1,4}", any::<bool>(), prop::collection::vec(event(), 0..5)).prop_map(
        |(count, sex, constitutional, events)| {
            let mut s = format!("{count},{sex}");
            if constitutional {
                s.push('c');
            }
            for e in events {
                s.push(',');
                s.push_str(&e);
            }
            s
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn accepted_strings_print_back_exactly(s in karyotype_string()) {
        let k = parse_iscn(&s).unwrap();
        prop_assert_eq!(k.to_string(), s.clone());
        prop_assert_eq!(k.raw, s);
    }

    #[test]
    fn event_order_is_preserved(s in karyotype_string()) {
        let k = parse_iscn(&s).unwrap();
        let printed: Vec<String> = k.events.iter().map(ToString::to_string).collect();
        let written: Vec<&str> = s.split(',').skip(2).collect();
        prop_assert_eq!(printed, written);
    }

    #[test]
    fn rejection_is_total(s in "[0-9XYNc,+()tinvdelup;q.-]{0,20}") {
        match parse_iscn(&s) {
            Ok(k) => prop_assert_eq!(k.to_string(), s),
            Err(e) => {
                let position = e.position().expect("parse errors carry a position");
                prop_assert!(position <= s.len());
            }
        }
    }

    #[test]
    fn mutated_strings_are_rejected_or_reprinted(s in karyotype_string(), at in any::<prop::sample::Index>(), c in "[ -~]") {
        let mut bytes = s.clone().into_bytes();
        let i = at.index(bytes.len());
        bytes.insert(i, c.as_bytes()[0]);
        let mutated = String::from_utf8(bytes).unwrap();
        if let Ok(k) = parse_iscn(&mutated) {
            prop_assert_eq!(k.to_string(), mutated);
        }
    }
}

#[test]
fn allow_n_round_trips() {
    let opts = ParseOptions { allow_n: true };
    for s in ["46,XN", "45,N", "46,XNc,+21"] {
        assert_eq!(parse_iscn_with(s, opts).unwrap().to_string(), s);
        assert!(matches!(parse_iscn(s), Err(IscnError::Syntax { .. })));
    }
}
