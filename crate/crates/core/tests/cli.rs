use std::process::{Command, Output};

fn isotonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotonic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn report_lowest_state() {
    let o = isotonic(&["report", "--gamma", "3/2", "--m", "0"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("S_rho=0.6496"), "{s}");
    assert!(s.contains("BBM: satisfied"));
    assert!(s.contains("var_p=1.5000"));
}

#[test]
fn report_flags_position_squeezing() {
    let o = isotonic(&["report", "--gamma", "7/2", "--m", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("x_squeezed=true"));
}

#[test]
fn usage_errors_exit_2() {
    let o = isotonic(&["report", "--gamma", "1", "--m", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3/2"));
    assert_eq!(isotonic(&["report", "--gamma", "x"]).status.code(), Some(2));
    assert_eq!(isotonic(&["table", "--which", "3"]).status.code(), Some(2));
    assert_eq!(
        isotonic(&[
            "density",
            "--space",
            "position",
            "--gamma",
            "3/2",
            "--range=-1,2"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(isotonic(&["bogus"]).status.code(), Some(2));
}

#[test]
fn table_one_shape_and_determinism() {
    let a = isotonic(&["table", "--which", "1"]);
    let b = isotonic(&["table", "--which", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(!s.contains('\r'));
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0].starts_with("gamma,m,s_rho,s_xi,s_sum,bbm_bound,paper_s_rho,delta_s_rho"));
}

#[test]
fn table_two_product_and_deficit() {
    let s = stdout(&isotonic(&["table", "--which", "2"]));
    let mut rdr = csv::Reader::from_reader(s.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    let cell = |g: &str, m: &str| rows.iter().find(|r| &r[0] == g && &r[1] == m).unwrap();
    let product: f64 = cell("2.5", "3")[col("product")].parse().unwrap();
    assert!((product - 10.6597).abs() < 2e-3);
    for m in ["0", "1", "2", "3"] {
        let r = cell("1.5", m);
        let delta: f64 = r[col("delta_var_p")].parse().unwrap();
        assert!(delta >= 0.036);
        assert_eq!(&r[col("note")], "printed_var_p_deficit");
    }
}

#[test]
fn density_curves() {
    let s = stdout(&isotonic(&[
        "density",
        "--space",
        "position",
        "--gamma",
        "3/2",
        "--m",
        "0",
        "--range",
        "0,6",
        "--samples",
        "600",
    ]));
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines[0], "x,entropy_density");
    assert_eq!(lines[1], "0,0");
    assert_eq!(lines.len(), 601);

    let s = stdout(&isotonic(&[
        "density",
        "--space",
        "momentum",
        "--gamma",
        "7/2",
        "--m",
        "1",
        "--range=-8,8",
        "--samples",
        "800",
    ]));
    let vals: Vec<f64> = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 800);
    for i in 0..vals.len() {
        assert!((vals[i] - vals[vals.len() - 1 - i]).abs() < 1e-9);
    }

    let s = stdout(&isotonic(&[
        "density",
        "--space",
        "position",
        "--gamma",
        "7/2",
        "--m",
        "3",
        "--samples",
        "2000",
    ]));
    let peak = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((0.33..=0.37).contains(&peak), "{peak}");
}

#[test]
fn sweep_trend_and_order() {
    let s = stdout(&isotonic(&[
        "sweep",
        "--gammas",
        "13/2,9/2,11/2",
        "--m-max",
        "0",
    ]));
    let rows: Vec<Vec<String>> = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    let gammas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(gammas, ["4.5", "5.5", "6.5"]);
    for (r, (vx, vp)) in rows
        .iter()
        .zip([(0.2427, 1.0714), (0.2441, 1.0555), (0.2450, 1.0455)])
    {
        assert!((r[10].parse::<f64>().unwrap() - vx).abs() < 2e-3);
        assert!((r[11].parse::<f64>().unwrap() - vp).abs() < 2e-3);
        assert_eq!(r[6], "true");
    }
}

#[test]
fn sweep_is_order_independent() {
    let a = isotonic(&["sweep", "--gammas", "3/2,5/2", "--m-max", "2"]);
    let b = isotonic(&["sweep", "--gammas", "5/2,3/2", "--m-max", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_and_out_file() {
    let dir = std::env::temp_dir().join(format!("isotonic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = isotonic(&[
        "report",
        "--gamma",
        "5/2",
        "--m",
        "1",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["m"], 1);
    assert_eq!(v["entropy"]["bbm_satisfied"], true);
    let s = v["entropy"]["s_position"].as_f64().unwrap();
    assert!((s - 0.9456).abs() < 2e-3);
    let digits = v["entropy"]["s_position"]
        .to_string()
        .trim_start_matches("0.")
        .len();
    assert!(digits <= 10);
    std::fs::remove_dir_all(&dir).unwrap();
}
