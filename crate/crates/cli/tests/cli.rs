use vortexhom_cli::run;

fn vortexhom(args: &str) -> vortexhom_cli::Outcome {
    run(std::iter::once("vortexhom").chain(args.split_whitespace()))
}

#[test]
fn no_arguments_is_a_usage_error() {
    let o = vortexhom("");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("Usage:"));
}

#[test]
fn unknown_inputs_are_usage_errors() {
    for args in [
        "frobnicate",
        "kelvin --builtin nope",
        "kelvin",
        "homology --complex nowhere.cx",
        "suite --steps 0",
    ] {
        let o = vortexhom(args);
        assert_eq!(o.code, 2, "{args}: {o:?}");
        assert!(o.stderr.contains("Usage"), "{args}: {}", o.stderr);
    }
}

#[test]
fn homology_of_the_circle() {
    let o = vortexhom("homology --complex circle");
    assert_eq!(o.code, 0, "{o:?}");
    assert!(o.stdout.contains("betti: [1, 1]"));
    assert!(o.stdout.ends_with("result: PASS (1 checks)\n"));
}

#[test]
fn winding_golden_in_point_vortex_circulation() {
    let o = vortexhom("circulation --builtin point_vortex");
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(
        o.stdout.contains("circulation/winding=1: 6.28318530717958"),
        "{}",
        o.stdout
    );
}

#[test]
fn failing_check_names_the_criterion() {
    // An impossible tolerance makes the residual check fail.
    let o = vortexhom("continuity --builtin expansion --atol 1e-300 --rtol 1e-300 --quad-order 2");
    assert_eq!(o.code, 1, "{}", o.stdout);
    assert!(o.stderr.starts_with("failed: "), "{}", o.stderr);
    assert!(o.stderr.contains("mass_balance/residual"), "{}", o.stderr);
}

#[test]
fn csv_table_and_series() {
    let dir = std::env::temp_dir().join(format!("vortexhom-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("stokes.csv");
    let o = vortexhom(&format!("stokes --csv {}", table.display()));
    assert_eq!(o.code, 0, "{o:?}");
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("subject,check,value,reference,pass\n"));
    assert!(text.lines().count() > 10);
    let series = dir.join("kelvin.csv");
    let o = vortexhom(&format!(
        "kelvin --builtin rigid_rotation --steps 64 --t1 1 --csv {}",
        series.display()
    ));
    assert_eq!(o.code, 0, "{o:?}");
    let text = std::fs::read_to_string(&series).unwrap();
    assert_eq!(text.lines().count(), 66, "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn single_builtin_suite_is_deterministic() {
    let a = vortexhom("suite --builtin uniform");
    let b = vortexhom("suite --builtin uniform");
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a, b);
    assert!(a.stdout.contains("suite: "));
}
