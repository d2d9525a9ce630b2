mod common;

use std::process::Command;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use hylos_core::layout;
use hylos_gateway::cli::run;
use hylos_gateway::http::{router, AppState};
use tower::ServiceExt;

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
fn hylos(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("hylos").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fixture() -> String {
    common::fixture().to_string_lossy().into_owned()
}

#[test]
fn query_prints_tsv() {
    let (code, out, err) = hylos(&["--repo", &fixture(), "query", common::BG_QUERY]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "?link\n<http://www.rz.fhtw-berlin.de/MIR#link1>\n");
}

#[tokio::test]
async fn cli_render_equals_http_page() {
    let (code, cli_html, err) = hylos(&["--repo", &fixture(), "render", "hamster-text", "--context", "link-context1"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(cli_html.matches("href=\"/elos/handbook\"").count(), 1);

    let app = router(AppState::new(layout::load(&common::fixture()).unwrap(), None));
    let put = Request::put("/api/sessions/s/contexts")
        .header("content-type", "application/json")
        .body(Body::from(r#"["link-context1"]"#))
        .unwrap();
    app.clone().oneshot(put).await.unwrap();
    let resp = app
        .oneshot(Request::get("/api/elos/hamster-text/page?session=s").body(Body::empty()).unwrap())
        .await
        .unwrap();
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    let page: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(page["html"].as_str().unwrap(), cli_html);

    let (_, plain, _) = hylos(&["--repo", &fixture(), "render", "hamster-text"]);
    assert_eq!(plain.matches("href=").count(), 0);
    let (_, slide, _) = hylos(&["--repo", &fixture(), "render", "hamster-text", "--mode", "slide"]);
    assert!(slide.contains("elo-slide"), "{slide}");
}

#[test]
fn exit_codes() {
    assert_eq!(hylos(&["bogus"]).0, 2);
    assert_eq!(hylos(&["render"]).0, 2);
    assert_eq!(hylos(&["--repo", &fixture(), "render", "Not_A_Slug"]).0, 2);
    let (code, _, err) = hylos(&["--repo", &fixture(), "elo", "show", "nope"]);
    assert_eq!(code, 1);
    assert!(err.contains("nope"), "{err}");
    assert_eq!(hylos(&["--repo", &fixture(), "query", "SELECT ?x"]).0, 1);
    assert_eq!(hylos(&["--repo", "/definitely/not/here", "ls"]).0, 1);
    assert_eq!(hylos(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hylos");
    let status = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    let ok = Command::new(bin).args(["--repo", &fixture(), "ls"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let missing = Command::new(bin)
        .args(["elo", "show", "nope"])
        .env("HYLOS_REPO", fixture())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn listing_commands() {
    let repo = fixture();
    let (_, out, _) = hylos(&["--repo", &repo, "ls"]);
    assert_eq!(out.lines().count(), 3);
    let (_, out, _) = hylos(&["--repo", &repo, "ls", "--tree"]);
    assert_eq!(out, "vet-course\tSmall animal medicine\n  hamster-text\tHamster diseases\n  handbook\tHay fever handbook\n");
    let (_, out, _) = hylos(&["--repo", &repo, "link", "list", "--anchor", "hamster", "--direction", "from"]);
    assert!(out.starts_with("link1\tvet/allergy\thamster->handbook\tFor freshman"), "{out}");
    let (_, out, _) = hylos(&["--repo", &repo, "anchor", "list", "--elo", "hamster-text"]);
    assert_eq!(out, "hamster\thamster-text\t/paragraph/p@16+9\thamster having hay fever\n");
    let (_, out, _) = hylos(&["--repo", &repo, "context", "list"]);
    assert_eq!(out, "link-context1\tBackground Information\tMr. X\n");
    let (_, out, _) = hylos(&["--repo", &repo, "elo", "show", "hamster-text"]);
    assert!(out.contains("<difficulty>easy</difficulty>"));
    let (_, out, _) = hylos(&["--repo", &repo, "graph", "dump"]);
    assert!(out.lines().all(|l| l.ends_with(" .")));
}

#[test]
fn authoring_round_trip() {
    let (_tmp, dir) = common::scratch_repo();
    let repo = dir.to_string_lossy().into_owned();
    let (code, out, err) = hylos(&[
        "--repo", &repo, "anchor", "add", "--id", "bedding", "--resource", "hamster-text", "--selector",
        "/paragraph/p[2]/emphasis",
    ]);
    assert_eq!((code, out.as_str()), (0, "bedding\n"), "{err}");
    let (code, out, err) = hylos(&[
        "--repo", &repo, "link", "add", "--id", "link2", "--from", "bedding", "--to", "handbook", "--arcrole",
        "mir:BackgroundInfo", "--path-space", "vet", "--created", "2004-01-01",
    ]);
    assert_eq!((code, out.as_str()), (0, "link2\n"), "{err}");
    let (_, html, _) = hylos(&["--repo", &repo, "render", "hamster-text", "--context", "link-context1"]);
    assert_eq!(html.matches("href=\"/elos/handbook\"").count(), 2);

    // Removing the anchor without cascade is refused; with cascade the link goes too.
    assert_eq!(hylos(&["--repo", &repo, "anchor", "rm", "bedding"]).0, 1);
    assert_eq!(hylos(&["--repo", &repo, "anchor", "rm", "bedding", "--cascade"]).0, 0);
    let (_, out, _) = hylos(&["--repo", &repo, "link", "list"]);
    assert_eq!(out.lines().count(), 1);

    // A dangling link is refused and nothing is written.
    let before = std::fs::read_to_string(dir.join("linkbase.xml")).unwrap();
    let (code, _, _) = hylos(&[
        "--repo", &repo, "link", "add", "--from", "hamster", "--to", "ghost", "--arcrole", "mir:X", "--path-space", "vet",
    ]);
    assert_eq!(code, 1);
    assert_eq!(std::fs::read_to_string(dir.join("linkbase.xml")).unwrap(), before);
}

#[test]
fn ingest_and_context_add() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("new-repo");
    let repo_s = repo.to_string_lossy().into_owned();
    let (code, out, err) = hylos(&["--repo", &repo_s, "ingest", &fixture()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "ingested 3 ELOs, 1 links, 1 contexts\n");
    // Ingesting the same ids again conflicts.
    assert_eq!(hylos(&["--repo", &repo_s, "ingest", &fixture()]).0, 1);

    assert_eq!(hylos(&["--repo", &repo_s, "context", "rm", "link-context1"]).0, 0);
    let (_, html, _) = hylos(&["--repo", &repo_s, "render", "hamster-text", "--context", "link-context1"]);
    assert!(html.is_empty());
    let file = common::fixture().join("contexts/link-context1.xml");
    let (code, out, err) = hylos(&["--repo", &repo_s, "context", "add", &file.to_string_lossy()]);
    assert_eq!((code, out.as_str()), (0, "link-context1\n"), "{err}");
    let (_, html, _) = hylos(&["--repo", &repo_s, "render", "hamster-text", "--context", "link-context1"]);
    assert_eq!(html.matches("href=\"/elos/handbook\"").count(), 1);
}
