//! End-to-end checks of the command surface: captured-output runs of every
//! command plus exit-code behavior of the installed binary.

use std::io::BufReader;
use std::process::Command;

use rummy_cli::{
    cmd_assist, cmd_eval, cmd_sample_hands, cmd_tournament, AssistArgs, CliError, EvalArgs,
    Metric, SampleArgs, TournamentArgs, MATRIX_CSV_HEADER,
};
use rummy_core::cards::DeckSpec;

const MELDED_27: &str = "3C 4C 5C 6C 9D TD JD 4D 4H 4S KS KH 7S";
const STUCK_79: &str = "3D 9C 5D 6D JS QS 7C 2C 2S 2H AC AS AH";
const READY: &str = "2C 3C 4C 5H 6H 7H 9D 9S 9C QD QS QH JK";
const SCATTERED: &str = "2C 5D 8H JS 3D 6H 9S QC 4H 7S TC KD 2S";

fn eval_text(hand: &str, wcj: &str, metric: Metric, declare: bool, req: Option<&str>) -> String {
    let args = EvalArgs {
        hand: hand.into(),
        wcj: wcj.into(),
        metric,
        declare,
        req: req.map(Into::into),
    };
    let mut buf = Vec::new();
    cmd_eval(&args, &mut buf).expect("eval succeeds");
    String::from_utf8(buf).unwrap()
}

#[test]
fn eval_reports_worked_hands() {
    let text = eval_text(MELDED_27, "3S", Metric::MinScore, false, None);
    assert!(text.contains("min_score: 27"), "{text}");

    let text = eval_text(STUCK_79, "7C", Metric::MinDist, false, None);
    assert!(text.contains("min_dist: 1"), "{text}");
    assert!(text.contains("wasted: 9C"), "{text}");

    let text = eval_text(STUCK_79, "7C", Metric::MinScore, false, None);
    assert!(text.contains("min_score: 79"), "{text}");

    let text = eval_text(READY, "8D", Metric::Both, false, None);
    assert!(text.contains("min_score: 0"), "{text}");
    assert!(text.contains("declare now"), "{text}");
    assert!(text.contains("min_dist: 0"), "{text}");
}

#[test]
fn eval_declare_prints_a_partition_of_the_hand() {
    let text = eval_text(MELDED_27, "3S", Metric::MinScore, true, None);
    assert!(text.contains("declaration:"), "{text}");
    assert!(text.contains("pure_sequence: 9D TD JD"), "{text}");
    assert!(text.contains("deadwood: KS KH 7S"), "{text}");

    // Every hand card appears exactly once across melds and deadwood.
    let mut tokens: Vec<&str> = text
        .lines()
        .filter_map(|l| l.trim_start().split_once(": ").map(|(k, v)| (k.trim(), v)))
        .filter(|(k, _)| {
            ["pure_sequence", "impure_sequence", "pure_set", "impure_set", "deadwood"]
                .contains(k)
        })
        .flat_map(|(_, v)| v.split_whitespace())
        .collect();
    tokens.sort_unstable();
    let mut want: Vec<&str> = MELDED_27.split_whitespace().collect();
    want.sort_unstable();
    assert_eq!(tokens, want, "{text}");

    // Distance witnesses may place SuperJoker stand-ins, shown as `*`.
    let text = eval_text(STUCK_79, "7C", Metric::MinDist, true, None);
    assert!(text.contains("declaration:"), "{text}");
    assert!(text.contains('*'), "{text}");
}

#[test]
fn eval_fourteen_cards_reports_best_discards() {
    let hand14 = format!("{MELDED_27} 7D");
    let text = eval_text(&hand14, "3S", Metric::Both, false, None);
    assert!(text.contains("best_discard (min_score): KS -> 17"), "{text}");
    assert!(text.contains("best_discard (min_dist):"), "{text}");

    let ready14 = format!("{READY} KD");
    let text = eval_text(&ready14, "8D", Metric::MinScore, false, None);
    assert!(text.contains("declare now: discard"), "{text}");
}

#[test]
fn eval_req_override_changes_the_chain() {
    let text = eval_text(STUCK_79, "7C", Metric::MinScore, false, Some("none"));
    assert!(text.contains("min_score: 23"), "{text}");

    let text = eval_text(STUCK_79, "7C", Metric::MinScore, false, Some("any_meld"));
    assert!(text.contains("min_score: 23"), "{text}");
}

#[test]
fn eval_rejects_bad_input_as_usage_errors() {
    let cases: Vec<EvalArgs> = vec![
        EvalArgs {
            hand: "2C 3C".into(),
            wcj: "3S".into(),
            metric: Metric::Both,
            declare: false,
            req: None,
        },
        EvalArgs {
            hand: "not cards at all".into(),
            wcj: "3S".into(),
            metric: Metric::Both,
            declare: false,
            req: None,
        },
        EvalArgs {
            hand: MELDED_27.into(),
            wcj: "JK".into(),
            metric: Metric::Both,
            declare: false,
            req: None,
        },
        EvalArgs {
            hand: MELDED_27.into(),
            wcj: "3S".into(),
            metric: Metric::Both,
            declare: false,
            req: Some("pure_sequence,bogus".into()),
        },
    ];
    for args in cases {
        let mut buf = Vec::new();
        let err = cmd_eval(&args, &mut buf).expect_err("bad input");
        assert!(matches!(err, CliError::Usage(_)), "{err:?}");
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn sample_hands_emits_versioned_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    let mk = |path: &std::path::Path| SampleArgs {
        n: 400,
        seed: 9,
        out: path.to_path_buf(),
        deck: DeckSpec::default(),
    };

    let mut text = Vec::new();
    let stats = cmd_sample_hands(&mk(&path_a), &mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    assert!(text.contains("clipped min_score mode:"), "{text}");
    assert!(text.contains("min_dist histogram:"), "{text}");

    let csv = std::fs::read_to_string(&path_a).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema_version,seed,minscore_clipped,minscore_unclipped,mindist"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 400);
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5, "{row}");
        assert_eq!(cols[0], "1");
        let clipped: u32 = cols[2].parse().unwrap();
        let raw: u32 = cols[3].parse().unwrap();
        let dist: u32 = cols[4].parse().unwrap();
        assert!(clipped <= 80 && clipped == raw.min(80), "{row}");
        assert!(dist <= 9, "{row}");
    }
    assert_eq!(stats.n, 400);
    assert_eq!(stats.score_hist.iter().sum::<usize>(), 400);
    assert_eq!(stats.dist_hist.iter().sum::<usize>(), 400);

    cmd_sample_hands(&mk(&path_b), &mut Vec::new()).unwrap();
    assert_eq!(csv, std::fs::read_to_string(&path_b).unwrap());
}

#[test]
fn tournament_runs_config_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    let records_path = dir.path().join("records.jsonl");
    let matrix_path = dir.path().join("matrix.csv");
    std::fs::write(
        &config_path,
        r#"{
            "profiles": [{"profile": "random"}, {"profile": "defeat_seeking"}],
            "n_games": 4,
            "base_seed": 11
        }"#,
    )
    .unwrap();

    let args = TournamentArgs {
        config: Some(config_path.clone()),
        records: Some(records_path.clone()),
        matrix: Some(matrix_path.clone()),
        ..TournamentArgs::default()
    };
    let mut text = Vec::new();
    let report = cmd_tournament(&args, &mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    assert!(text.contains("2 profiles, 4 games per ordered pair, base seed 11"), "{text}");
    assert!(text.contains("adjusted skill p*"), "{text}");
    assert!(text.contains("first-mover advantage"), "{text}");
    assert_eq!(report.cells.len(), 4);
    assert_eq!(report.records.len(), 16);

    let records = std::fs::read_to_string(&records_path).unwrap();
    let lines: Vec<&str> = records.lines().collect();
    assert_eq!(lines.len(), 16);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["v"], 1, "{line}");
        assert!(v["winner"] == 0 || v["winner"] == 1, "{line}");
    }

    let matrix = std::fs::read_to_string(&matrix_path).unwrap();
    let mut matrix_lines = matrix.lines();
    assert_eq!(matrix_lines.next().unwrap(), MATRIX_CSV_HEADER);
    assert_eq!(matrix_lines.count(), 4);

    // A flag-level n overrides the file value.
    let args = TournamentArgs { n: Some(2), ..args };
    let report = cmd_tournament(&args, &mut Vec::new()).unwrap();
    assert_eq!(report.records.len(), 8);
}

#[test]
fn tournament_rejects_unknown_profiles_listing_valid_names() {
    let args = TournamentArgs {
        profiles: Some("random,bogus".into()),
        n: Some(1),
        ..TournamentArgs::default()
    };
    let err = cmd_tournament(&args, &mut Vec::new()).expect_err("bogus profile");
    assert!(matches!(err, CliError::Usage(_)), "{err:?}");
    let msg = err.to_string();
    assert!(msg.contains("bogus"), "{msg}");
    for name in ["random", "defeat_seeking", "minscore", "mindist", "mindist_score", "mindist_opp"]
    {
        assert!(msg.contains(name), "{msg} should list {name}");
    }
}

#[test]
fn assist_session_keeps_state_across_bad_lines() {
    let script = format!(
        "hand {MELDED_27}\nwcj 3S\ndraw ZZ\nnonsense line\ndraw 7D\ndiscard KS\nquit\n"
    );
    let mut input = BufReader::new(script.as_bytes());
    let mut out = Vec::new();
    cmd_assist(&mut input, &mut out, &AssistArgs { drop_threshold: 3, req: None }).unwrap();
    let text = String::from_utf8(out).unwrap();

    assert!(text.contains("wildcard not set"), "{text}");
    assert!(text.contains("min_score: 27"), "{text}");
    assert!(text.contains("error: bad card"), "{text}");
    assert!(text.contains("error: unknown command 'nonsense'"), "{text}");
    assert!(text.contains("best_discard (min_score): KS -> 17"), "{text}");
    assert!(text.contains("min_score: 17"), "{text}");
}

#[test]
fn assist_recommends_declares_and_drops() {
    let script = format!("wcj 8D\nhand {READY}\nquit\n");
    let mut input = BufReader::new(script.as_bytes());
    let mut out = Vec::new();
    cmd_assist(&mut input, &mut out, &AssistArgs { drop_threshold: 3, req: None }).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("declare now"), "{text}");

    let script = format!("wcj AD\nhand {SCATTERED}\nshow\n");
    let mut input = BufReader::new(script.as_bytes());
    let mut out = Vec::new();
    // EOF without `quit` ends the session cleanly.
    cmd_assist(&mut input, &mut out, &AssistArgs { drop_threshold: 3, req: None }).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("drop: recommended"), "{text}");

    let script = format!("wcj 3S\nhand {MELDED_27}\nquit\n");
    let mut input = BufReader::new(script.as_bytes());
    let mut out = Vec::new();
    cmd_assist(&mut input, &mut out, &AssistArgs { drop_threshold: 3, req: None }).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("drop: hold (min_dist 1 < threshold 3)"), "{text}");
}

#[test]
fn binary_exit_codes_are_scripting_stable() {
    let bin = env!("CARGO_BIN_EXE_rummy");

    let ok = Command::new(bin)
        .args(["eval", "--hand", MELDED_27, "--wcj", "3S", "--metric", "minscore"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("min_score: 27"));

    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));

    let usage_flag = Command::new(bin).args(["eval", "--no-such-flag"]).output().unwrap();
    assert_eq!(usage_flag.status.code(), Some(1));

    let usage_hand = Command::new(bin)
        .args(["eval", "--hand", "junk", "--wcj", "3S"])
        .output()
        .unwrap();
    assert_eq!(usage_hand.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&usage_hand.stderr).is_empty());

    let runtime = Command::new(bin)
        .args([
            "sample-hands",
            "--n",
            "2",
            "--out",
            "/nonexistent-dir-for-sure/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(runtime.status.code(), Some(2));
}
