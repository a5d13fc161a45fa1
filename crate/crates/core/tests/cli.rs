mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{blobs, fixture};
use plscan::{fit, Measure};

fn plscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plscan")).args(args).output().expect("spawn plscan")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_blobs(dir: &Path) -> (std::path::PathBuf, Vec<f64>) {
    let (data, _) = blobs(9, 150, 2, 3, 0.6);
    let file = dir.join("blobs.csv");
    let mut text = String::from("x,y\n");
    for r in data.chunks(2) {
        text.push_str(&format!("{:?},{:?}\n", r[0], r[1]));
    }
    std::fs::write(&file, text).unwrap();
    (file, data)
}

#[test]
fn fit_writes_every_artefact() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_blobs(dir.path());
    let out = dir.path().join("out");
    let o = plscan(&["fit", path(&input), "-o", path(&out), "--condensed"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("3 clusters"), "{stdout}");

    let header =
        |name: &str| std::fs::read_to_string(out.join(name)).unwrap().lines().next().unwrap().to_owned();
    assert_eq!(header("labels.csv"), "point,label,probability");
    assert_eq!(header("trace.csv"), "min_size,total_persistence");
    assert_eq!(header("layers.csv"), "rank,cut,total_persistence");
    assert_eq!(header("leaf_tree.csv"), "segment,parent,d_min,d_max,s_min,s_max");
    assert_eq!(header("condensed_tree.csv"), "parent,child,distance,size");
    assert_eq!(header("layer_0.csv"), "point,label,probability");
}

#[test]
fn labels_file_matches_flat_result() {
    let dir = tempfile::tempdir().unwrap();
    let (input, data) = write_blobs(dir.path());
    let out = dir.path().join("out");
    assert!(plscan(&["fit", path(&input), "-o", path(&out)]).status.success());
    let r = fit(&data, 2, 4, Measure::Size, None).unwrap();
    let text = std::fs::read_to_string(out.join("labels.csv")).unwrap();
    for (i, line) in text.lines().skip(1).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), i);
        assert_eq!(f[1].parse::<i64>().unwrap(), r.labels[i]);
        assert!((f[2].parse::<f64>().unwrap() - r.probabilities[i]).abs() < 1e-8);
    }
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count() - 1, r.trace_total.len());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_blobs(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(plscan(&["--threads", "1", "fit", path(&input), "-o", path(&a)]).status.success());
    assert!(plscan(&["--threads", "4", "fit", path(&input), "-o", path(&b)]).status.success());
    for name in ["labels.csv", "trace.csv", "layers.csv", "leaf_tree.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn precision_can_be_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_blobs(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_plscan"))
        .env("PLSCAN_PRECISION", "3")
        .args(["export-leaf-tree", path(&input)])
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    let d_max = text.lines().nth(1).unwrap().split(',').nth(3).unwrap();
    assert!(d_max.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() <= 3, "{d_max}");
}

#[test]
fn layer_prints_labels_at_a_cut() {
    let stars = fixture("nested_stars.csv");
    let o = plscan(&["layer", "--kind", "forest", "-k", "5", "--cut", "19", path(&stars)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let labels: Vec<i64> =
        text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(labels.len(), 150);
    let distinct: std::collections::BTreeSet<_> = labels.iter().filter(|&&l| l >= 0).collect();
    assert_eq!(distinct.len(), 2);
}

#[test]
fn verify_passes_on_fixtures_and_flags_corruption() {
    let stars = fixture("nested_stars.csv");
    let o = plscan(&["verify", "--kind", "forest", "-k", "5", path(&stars)]);
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{report}");
    assert!(report.contains("PASS sweep"), "{report}");

    let dir = tempfile::tempdir().unwrap();
    let good = plscan(&["export-leaf-tree", "--kind", "forest", "-k", "5", path(&stars)]);
    let text =
        String::from_utf8(good.stdout).unwrap().replace("\n3,1,1.74,8.14,19,25\n", "\n3,1,1.74,8.14,20,25\n");
    let bad = dir.path().join("bad_leaf_tree.csv");
    std::fs::write(&bad, text).unwrap();
    let o = plscan(&["verify", "--kind", "forest", "-k", "5", path(&stars), "--leaf-tree", path(&bad)]);
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(!o.status.success());
    assert!(report.contains("FAIL sweep") && report.contains("segment 3"), "{report}");

    let (input, _) = write_blobs(dir.path());
    let o = plscan(&["verify", path(&input)]);
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{report}");
    for check in ["neighbours", "mst", "condense", "sweep"] {
        assert!(report.contains(&format!("PASS {check}")), "{report}");
    }
}

#[test]
fn malformed_input_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,4\n5,six\n").unwrap();
    let o = plscan(&["fit", path(&bad), "-o", path(dir.path())]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    std::fs::write(&bad, "0,1,0.5\n").unwrap();
    let o = plscan(&["fit", "--kind", "forest", path(&bad), "-o", path(dir.path())]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("u,v,weight"));
}

#[test]
fn too_few_points_for_k() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.csv");
    std::fs::write(&small, "0,0\n1,0\n2,0\n").unwrap();
    let o = plscan(&["fit", path(&small), "-o", path(dir.path())]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("k = 4"));
}

#[test]
fn forest_components_without_leaves_warn() {
    let dir = tempfile::tempdir().unwrap();
    let forest = dir.path().join("forest.csv");
    let mut text = String::from("u,v,weight\n");
    for v in 1..10 {
        text.push_str(&format!("0,{v},1.0\n"));
    }
    for v in 11..20 {
        text.push_str(&format!("10,{v},1.0\n"));
    }
    text.push_str("0,10,5.0\n");
    for v in 21..26 {
        text.push_str(&format!("20,{v},1.0\n"));
    }
    std::fs::write(&forest, text).unwrap();
    let o = plscan(&["fit", "--kind", "forest", path(&forest), "-o", path(&dir.path().join("out"))]);
    assert!(o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("warning: component 1 (6 points)"), "{stderr}");
}
