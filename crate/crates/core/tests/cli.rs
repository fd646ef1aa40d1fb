use std::process::Command;

fn speclab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_speclab")).args(args).output().unwrap()
}

fn text(out: &[u8]) -> String {
    String::from_utf8_lossy(out).into_owned()
}

#[test]
fn describe_counts() {
    for (label, g, p, r, dim) in [("ell4", 1, 4, 8, 8), ("g2-5", 2, 6, 12, 11)] {
        let out = speclab(&["describe", "--instance", label]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        let s = text(&out.stdout);
        for (key, want) in [("ĝ", g), ("p", p), ("r", r), ("dim", dim)] {
            let tag = format!(" {key} = ");
            let line = s.lines().find(|l| l.contains(&tag)).unwrap_or_else(|| panic!("{label}: no {key} in\n{s}"));
            let n: i64 = line.split(&tag).nth(1).unwrap().trim().parse().unwrap();
            assert_eq!(n, want, "{label}: {line}");
        }
    }
}

#[test]
fn unknown_suite_lists_valid_ones() {
    let out = speclab(&["verify", "--instance", "ell4", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    for s in ["surface", "dm-cubic", "all"] {
        assert!(err.contains(s), "{err}");
    }
}

#[test]
fn empty_eps_list_is_error() {
    let out = speclab(&["sweep", "--instance", "ell4", "--functional", "omega", "--coord", "A1", "--eps-list="]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
}

#[test]
fn surface_report_shape() {
    let dir = std::env::temp_dir().join(format!("speclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = speclab(&["verify", "--instance", "ell4", "--suite", "surface", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["instance"], "ell4");
    assert_eq!(v["suite"], "surface");
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "paper_eq", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass"] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv() {
    let out = speclab(&["sweep", "--instance", "ell4", "--functional", "omega", "--coord", "A1", "--eps-list", "4e-3,2e-3,1e-3"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let s = text(&out.stdout);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("eps,"));
    assert_eq!(lines.count(), 3);
}
