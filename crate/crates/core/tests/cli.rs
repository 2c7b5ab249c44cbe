use mtrrt::cli::cli_main;

fn run(args: &[&str]) -> i32 {
    cli_main(std::iter::once("mtrrt").chain(args.iter().copied()))
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["plan", "--planner", "bogus"]), 2);
    assert_eq!(run(&["plan", "--no-such-flag"]), 2);
    assert_eq!(run(&[]), 2);
    assert_eq!(run(&["plan", "--builtin", "atlantis"]), 2);
    assert_eq!(
        run(&[
            "plan",
            "--builtin",
            "maze",
            "--planner",
            "rrt",
            "--max-iterations",
            "10"
        ]),
        1
    );
    assert_eq!(
        run(&["plan", "--builtin", "room", "--planner", "rrt", "--seed", "3"]),
        0
    );
}

#[test]
fn plan_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    for k in ["a", "b"] {
        let code = run(&[
            "plan",
            "--builtin",
            "room",
            "--planner",
            "mtrrt",
            "--seed",
            "7",
            "--trajectory",
            &path(&format!("{k}.json")),
            "--render",
            &path(&format!("{k}.svg")),
            "--trace",
            &path(&format!("{k}.trace")),
        ]);
        assert_eq!(code, 0);
    }
    for ext in ["json", "svg", "trace"] {
        let a = std::fs::read(path(&format!("a.{ext}"))).unwrap();
        let b = std::fs::read(path(&format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
    assert_eq!(run(&["validate", &path("a.trace")]), 0);
}

#[test]
fn validate_flags_a_tampered_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    let t = trace.to_string_lossy().into_owned();
    assert_eq!(
        run(&[
            "plan",
            "--builtin",
            "room",
            "--planner",
            "rrt",
            "--seed",
            "1",
            "--trace",
            &t
        ]),
        0
    );
    let text = std::fs::read_to_string(&trace).unwrap();
    // Teleport the last node of the rooted tree into a wall.
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let i = lines.iter().rposition(|l| l.starts_with("node ")).unwrap();
    let mut parts: Vec<String> = lines[i].split(' ').map(str::to_string).collect();
    parts[2] = "3".into();
    parts[3] = "3".into();
    lines[i] = parts.join(" ");
    std::fs::write(&trace, lines.join("\n")).unwrap();
    assert_eq!(run(&["validate", &t]), 1);
    std::fs::write(&trace, "not a trace").unwrap();
    assert_eq!(run(&["validate", &t]), 2);
}

#[test]
fn bench_and_maps_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = out.to_string_lossy().into_owned();
    assert_eq!(
        run(&[
            "bench",
            "--trials",
            "2",
            "--planners",
            "rrt,mtrrt",
            "--envs",
            "room",
            "--out",
            &o
        ]),
        0
    );
    let csv = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(out.join("stats.json").exists());
    let config = out.join("config.json").to_string_lossy().into_owned();
    let out2 = dir.path().join("replay").to_string_lossy().into_owned();
    assert_eq!(run(&["bench", "--config", &config, "--out", &out2]), 0);
    assert_eq!(run(&["bench", "--config", "/nonexistent/config.json"]), 2);

    let maps = dir.path().join("maps");
    assert_eq!(run(&["maps", "--out", &maps.to_string_lossy()]), 0);
    for name in ["room", "clutter", "maze"] {
        let g = mtrrt::workspace::load_map(maps.join(format!("{name}.map"))).unwrap();
        assert_eq!(g, mtrrt::workspace::builtin_map(name).unwrap().grid);
        assert!(maps.join(format!("{name}.svg")).exists());
    }
}

#[test]
fn file_maps_need_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("m.map");
    std::fs::write(
        &map,
        "40 20\n".to_string() + &format!("{}\n", ".".repeat(40)).repeat(20),
    )
    .unwrap();
    let m = map.to_string_lossy().into_owned();
    assert_eq!(run(&["plan", "--map", &m]), 2);
    assert_eq!(
        run(&[
            "plan",
            "--map",
            &m,
            "--start",
            "2,2",
            "--goal",
            "35,15",
            "--goal-radius",
            "4"
        ]),
        0
    );
}
