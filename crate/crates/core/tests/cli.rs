use std::process::{Command, Output};

use serde_json::Value;

use slopeforge::bounds::{verify_lemma_behavior, verify_lomaschico, LemmaRow, SchemeRow};
use slopeforge::exact::{parse_rational, rat};
use slopeforge::numtheory::{dedekind_record, hj_expand, DedekindRecord, HJExpansion};
use slopeforge::ru_family::{chern_x, gamma_invariants, ChernOfX, GammaInvariants, RUParams};
use slopeforge::slope_search::{density_sample, seek_slope, DRule, DensityTable, SlopeCertificate};

fn slopeforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slopeforge"))
        .args(args)
        .env_remove("SLOPEFORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json_result(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = slopeforge(&full);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["command"], args[0]);
    assert!(doc["tool_version"].as_str().unwrap().starts_with("slopeforge "));
    doc["result"].clone()
}

#[test]
fn cqp_prints_the_closed_form() {
    let out = slopeforge(&["cqp", "1", "5", "--no-header"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "17/5\n");
}

#[test]
fn plain_output_has_version_header_by_default() {
    let out = slopeforge(&["hj", "7", "3"]);
    let text = stdout(&out);
    assert!(text.starts_with("# slopeforge "));
    assert!(text.ends_with("[3, 2, 2]\n"));
}

#[test]
fn ru_reports_exact_values_and_residual_flag() {
    let out = slopeforge(&["ru", "--p", "5", "--alpha", "1", "--beta", "1", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("c2 = 587731\n"));
    assert!(text.contains("c1sq_partial = 3442581/5\n"));
    assert!(text.contains("residual_omitted = true\n"));
    assert!(text.contains("gamma_dot_k = 4753\n"));
}

#[test]
fn ru_with_residual_and_formal_mode() {
    let out = slopeforge(&["ru", "--p", "5", "--alpha", "1", "--beta", "1", "--d", "2", "--residual", "-4"]);
    let text = stdout(&out);
    assert!(text.contains("residual_omitted = false\n"));
    assert!(text.contains("c1sq = 3442577/5\n"));

    let rejected = slopeforge(&["ru", "--p", "9", "--alpha", "1", "--beta", "1", "--d", "2"]);
    assert_eq!(rejected.status.code(), Some(1));
    let formal = slopeforge(&["ru", "--p", "9", "--alpha", "1", "--beta", "1", "--d", "2", "--formal"]);
    assert_eq!(formal.status.code(), Some(0));
    assert!(stdout(&formal).contains("formal = true\n"));
}

#[test]
fn bounds_to_fifty_is_clean() {
    let out = slopeforge(&["bounds", "--pmax", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("violations = 0\n"));
    assert!(text.contains("limit_violations = 0\n"));
    assert!(text.contains("schemes = 9523\n"));
}

#[test]
fn bounds_csv_columns() {
    let out = slopeforge(&["bounds", "--pmax", "5", "--format", "csv", "--no-header"]);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,a,b,c,m,S,L,C,six_S_plus_L,bound,slack,limit_slope"
    );
    assert_eq!(lines.next().unwrap(), "5,1,1,2,1,-3/5,18,54/5,72/5,84/5,12/5,41/40");
    assert_eq!(lines.count(), 12);
}

#[test]
fn approx_adds_decimal_columns() {
    let out = slopeforge(&["cqp", "1", "5", "--format", "csv", "--no-header", "--approx"]);
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(header, "q,p,s,s_approx,l,c,c_approx,q_inv");
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("1,5,1/5,2.000000000000e-1,1,17/5,3.400000000000e0,1"));
}

#[test]
fn invalid_parameters_exit_one() {
    for args in [
        vec!["cqp", "2", "4"],
        vec!["hj", "6", "4"],
        vec!["bounds", "--pmax", "3"],
        vec!["seek", "--r", "1", "--tol", "1e-3"],
        vec!["seek", "--r", "7/2", "--tol", "1e-3"],
        vec!["density", "--grid", "1/1", "--primes", ""],
        vec!["product", "--x-invariants", "1,2,3", "--y-invariants", "1,2,3,4,5"],
    ] {
        let out = slopeforge(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with("error kind="), "{err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn boundary_target_explains_the_limit() {
    let out = slopeforge(&["seek", "--r", "1", "--tol", "1e-3"]);
    let err = stderr(&out);
    assert!(err.contains("kind=boundary"));
    assert!(err.contains("beta"));
}

#[test]
fn unknown_flags_and_formats_are_rejected() {
    assert_eq!(slopeforge(&["cqp", "1", "5", "--verbose"]).status.code(), Some(1));
    assert_eq!(slopeforge(&["cqp", "1", "5", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(slopeforge(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_three() {
    let out = slopeforge(&["cqp", "1", "5", "--output", "/nonexistent-dir/x/out.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("kind=io"));
}

#[test]
fn output_file_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lemma.csv");
    let out = slopeforge(&["lemma", "--pmax", "7", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("p,q,length,excess,bound,slack\n"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["bounds", "--pmax", "23", "--format", "csv"],
        vec!["density", "--grid", "1/1,2/1,1/3", "--primes", "5,7,11", "--format", "json"],
        vec!["seek", "--r", "2", "--tol", "1e-3", "--format", "json"],
        vec!["ru", "--p", "7", "--alpha", "2", "--beta", "3", "--d", "3"],
    ] {
        let a = slopeforge(&args);
        let b = slopeforge(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let threaded = Command::new(env!("CARGO_BIN_EXE_slopeforge"))
            .args(&args)
            .env("SLOPEFORGE_THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, threaded.stdout, "{args:?}");
    }
}

#[test]
fn json_round_trips_hj_dedekind_cqp() {
    let hj: HJExpansion = serde_json::from_value(json_result(&["hj", "7", "3"])).unwrap();
    assert_eq!(hj, hj_expand(7, 3).unwrap());

    let d = json_result(&["dedekind", "4", "5"]);
    assert_eq!(parse_rational(d["s"].as_str().unwrap()).unwrap(), rat(-1, 5));
    assert_eq!(d["s"], d["s_hj"]);

    let rec: DedekindRecord = serde_json::from_value(json_result(&["cqp", "2", "5"])).unwrap();
    assert_eq!(rec, dedekind_record(2, 5).unwrap());
}

#[test]
fn json_round_trips_ru() {
    let res = json_result(&["ru", "--p", "11", "--alpha", "1", "--beta", "2", "--d", "3"]);
    let params = RUParams::new(11, 1, 2, 3).unwrap();
    let chern: ChernOfX = serde_json::from_value(res["chern"].clone()).unwrap();
    let gamma: GammaInvariants = serde_json::from_value(res["gamma"].clone()).unwrap();
    assert_eq!(chern, chern_x(&params, None));
    assert_eq!(gamma, gamma_invariants(&params));
    assert_eq!(res["chern"]["residual_omitted"], true);
}

#[test]
fn json_round_trips_bounds_and_lemma() {
    let res = json_result(&["bounds", "--pmax", "13"]);
    let rows: Vec<SchemeRow> = serde_json::from_value(res["rows"].clone()).unwrap();
    assert_eq!(rows, verify_lomaschico(13).unwrap().rows);
    assert_eq!(res["violations"].as_array().unwrap().len(), 0);

    let res = json_result(&["lemma", "--pmax", "30"]);
    let rows: Vec<LemmaRow> = serde_json::from_value(res["rows"].clone()).unwrap();
    assert_eq!(rows, verify_lemma_behavior(30).unwrap().rows);
}

#[test]
fn json_round_trips_product() {
    let res = json_result(&["product", "--x-invariants", "0,24,2,2,0", "--y-invariants", "0,24,2,2,0"]);
    assert_eq!(res["c1sq_s"], "96/1");
    assert_eq!(res["c2_s"], "168/1");
    assert_eq!(res["chi_s"], "22/1");
    assert_eq!(res["coupling"], "14/1");
    assert_eq!(res["slope"], "4/7");
}

#[test]
fn product_check_flag_warns_but_succeeds() {
    let out = slopeforge(&["product", "--x-invariants", "1,1,1,0,0", "--y-invariants", "0,24,2,2,0", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("not positive"));
}

#[test]
fn json_round_trips_seek_and_density() {
    let cert: SlopeCertificate =
        serde_json::from_value(json_result(&["seek", "--r", "83/65", "--tol", "1e-9", "--witness-p", "503"])).unwrap();
    assert_eq!(cert, seek_slope(&rat(83, 65), &rat(1, 1_000_000_000), 503, None).unwrap());
    assert_eq!((cert.alpha, cert.beta), (1, 1));

    let table: DensityTable =
        serde_json::from_value(json_result(&["density", "--grid", "1,1/2", "--primes", "5,7,9"])).unwrap();
    assert_eq!(table, density_sample(&[(1, 1), (1, 2)], &[5, 7, 9], DRule::Smallest).unwrap());
    assert_eq!(table.skipped.len(), 2);
}

#[test]
fn density_csv_rows() {
    let out = slopeforge(&["density", "--grid", "1/1", "--primes", "5", "--format", "csv", "--no-header"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha,beta,p,d,lambda,witness_slope,abs_difference");
    let row = lines.next().unwrap();
    assert!(row.starts_with("1,1,5,2,83/65,3442581/2938655,"), "{row}");
}
