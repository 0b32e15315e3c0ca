//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use isotonic::cli::{self, published, Format, RunConfig};
use isotonic::observables::{
    harmonic_ground_entropy, Precision, Space, StateAnalysis, BBM_BOUND, HEISENBERG_BOUND,
};
use isotonic::oracle::{fourier_oracle_with, gram_matrix, hermite_oracle, OracleConfig};
use isotonic::quadrature::{entropy_integrand, try_integrate, IntegrationSpec};
use isotonic::states::eval_psi;
use isotonic::StateLabel;

const TABLE_GAMMAS: [f64; 3] = [1.5, 2.5, 3.5];
const GRID_GAMMAS: [f64; 6] = [1.5, 2.5, 3.5, 4.5, 5.5, 6.5];

/// Running verdict for one criterion plus the lines explaining failures.
struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn label(m: u32, g: f64) -> StateLabel {
    StateLabel::new(m, g).expect("valid label")
}

fn analysis(m: u32, g: f64) -> StateAnalysis {
    StateAnalysis::new(label(m, g)).expect("state builds")
}

fn table_cells() -> Vec<StateAnalysis> {
    TABLE_GAMMAS
        .iter()
        .flat_map(|&g| (0..4).map(move |m| (m, g)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(m, g)| analysis(m, g))
        .collect()
}

fn criterion_1(v: &mut Verdict) {
    let start = Instant::now();
    let rows: Vec<_> = table_cells()
        .par_iter()
        .map(|a| cli::table1_row(a).expect("table 1 cell"))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    v.check(rows.len() == 12, || {
        format!("{} rows, expected 12", rows.len())
    });
    for r in &rows {
        let cell = format!("(gamma={}, m={})", r.gamma, r.m);
        let d_rho = r.s_rho.delta.expect("published cell");
        let d_xi = r.s_xi.delta.expect("published cell");
        v.check(d_rho.abs() <= 2e-3, || {
            format!("{cell} S_rho={:.6} delta={d_rho:+.6}", r.s_rho.value)
        });
        let xi_tol = if r.gamma == 3.5 && r.m == 3 {
            v.note(format!(
                "{cell} S_xi computed {:.6}, printed {:.4}, delta {d_xi:+.6} (tolerance 0.05)",
                r.s_xi.value,
                r.s_xi.paper_value.unwrap()
            ));
            0.05
        } else {
            3e-3
        };
        v.check(d_xi.abs() <= xi_tol, || {
            format!(
                "{cell} S_xi={:.6} delta={d_xi:+.6} exceeds {xi_tol}",
                r.s_xi.value
            )
        });
        v.check(r.s_sum.value - BBM_BOUND > 0.0, || {
            format!("{cell} BBM margin {}", r.s_sum.value - BBM_BOUND)
        });
    }
    v.note(format!("12 cells in {elapsed:.2} s"));
    v.check(elapsed < 60.0, || {
        format!("runtime {elapsed:.1} s exceeds 60 s")
    });
}

fn criterion_2(v: &mut Verdict) {
    let rows: Vec<_> = table_cells()
        .par_iter()
        .map(|a| cli::table2_row(a).expect("table 2 cell"))
        .collect();
    for r in &rows {
        let cell = format!("(gamma={}, m={})", r.gamma, r.m);
        let dx = r.var_x.delta.unwrap();
        v.check(dx.abs() <= 2e-3, || {
            format!("{cell} var_x={:.6} delta={dx:+.6}", r.var_x.value)
        });
        if r.gamma == 1.5 {
            let exact = 2.0 * r.m as f64 + 1.5;
            v.check((r.var_p.value - exact).abs() <= 1e-6, || {
                format!("{cell} var_p={:.9}, exact {exact}", r.var_p.value)
            });
            let deficit = r.var_p.delta.unwrap();
            v.check(
                r.note.contains("printed_var_p_deficit") && deficit >= 0.036,
                || {
                    format!(
                        "{cell} deficit {deficit:.4} not flagged (note {:?})",
                        r.note
                    )
                },
            );
            v.note(format!("{cell} printed var_p deficit {deficit:.4} flagged"));
        } else {
            let dp = r.var_p.delta.unwrap();
            v.check(dp.abs() <= 2e-3, || {
                format!("{cell} var_p={:.6} delta={dp:+.6}", r.var_p.value)
            });
        }
    }
    let csv = cli::table2_csv(&rows);
    v.check(
        csv.lines()
            .filter(|l| l.ends_with("printed_var_p_deficit"))
            .count()
            == 4,
        || "table 2 CSV does not flag the four gamma=3/2 rows".into(),
    );
}

fn criterion_3(v: &mut Verdict) {
    let cfg = RunConfig {
        gamma_list: vec![4.5, 5.5, 6.5],
        m_max: 0,
        output_format: Format::Csv,
        output_path: None,
        precision: Precision::default(),
    };
    let records = cli::sweep(&cfg).expect("sweep");
    v.check(records.len() == 3, || {
        format!("{} sweep rows", records.len())
    });
    for (r, &(g, var_x, var_p)) in records.iter().zip(published::GROUND_TREND.iter()) {
        v.check(r.gamma == g, || {
            format!("row order: gamma {} where {g} expected", r.gamma)
        });
        let u = &r.uncertainty;
        v.check((u.var_x - var_x).abs() <= 2e-3, || {
            format!("gamma={g} var_x={:.6} vs {var_x}", u.var_x)
        });
        v.check((u.var_p - var_p).abs() <= 2e-3, || {
            format!("gamma={g} var_p={:.6} vs {var_p}", u.var_p)
        });
    }
}

fn criterion_4(v: &mut Verdict) {
    let h = harmonic_ground_entropy();
    v.check((h - 1.07236).abs() <= 1e-5, || {
        format!("harmonic_ground_entropy() = {h}")
    });
    v.check((BBM_BOUND - 2.144729).abs() <= 1e-6, || {
        format!("BBM bound = {BBM_BOUND}")
    });
    let spec = IntegrationSpec::full_line().with_tolerances(1e-12, 1e-12);
    let s_x = try_integrate(entropy_integrand(|x| hermite_oracle(0, x).powi(2)), &spec)
        .expect("position entropy")
        .value;
    // The unit-Fourier transform of the ground state is the same Gaussian.
    let s_p = try_integrate(
        entropy_integrand(|p| (-p * p).exp() / std::f64::consts::PI.sqrt()),
        &spec,
    )
    .expect("momentum entropy")
    .value;
    let gap = s_x + s_p - BBM_BOUND;
    v.check(gap.abs() <= 1e-6, || {
        format!("Gaussian S_x + S_p - bound = {gap:e}")
    });
    v.note(format!("Gaussian saturation gap {gap:.2e}"));
}

fn criterion_5(v: &mut Verdict) {
    // Orthonormality, m, n ≤ 5.
    for &g in &GRID_GAMMAS {
        let gram = gram_matrix(g, 5).expect("gram matrix");
        let worst = gram
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, &x)| (x - f64::from(u8::from(i == j))).abs())
            })
            .fold(0.0, f64::max);
        v.check(worst <= 1e-8, || {
            format!("gamma={g}: Gram deviation {worst:e}")
        });
    }

    let states: Vec<(u32, f64)> = GRID_GAMMAS
        .iter()
        .flat_map(|&g| (0..=10).map(move |m| (m, g)))
        .collect();
    let analyses: Vec<StateAnalysis> = states.par_iter().map(|&(m, g)| analysis(m, g)).collect();

    // Evenness of |φ|².
    let worst_even = analyses
        .par_iter()
        .filter(|a| a.label().m() <= 5)
        .map(|a| {
            (1..=100)
                .map(|i| {
                    let p = 0.1 * i as f64;
                    let st = a.state();
                    (st.momentum_density(p).unwrap() - st.momentum_density(-p).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    v.check(worst_even <= 1e-9, || {
        format!("|phi|^2 evenness deviation {worst_even:e}")
    });

    // Closed form against direct quadrature.
    let cfg = OracleConfig::default();
    let worst_fourier = analyses
        .par_iter()
        .filter(|a| a.label().m() <= 3)
        .map(|a| {
            let wf = a.state().position();
            (-20..=20)
                .map(|i| {
                    let p = 0.5 * i as f64;
                    let exact = a.state().phi(p).unwrap();
                    let brute = fourier_oracle_with(wf, p, &cfg).unwrap();
                    (exact.re - brute.re).abs().max((exact.im - brute.im).abs())
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    v.check(worst_fourier <= 1e-7, || {
        format!("analytic vs oracle phi deviation {worst_fourier:e}")
    });
    v.note(format!("phi vs oracle max deviation {worst_fourier:.1e}"));

    // Reduction to odd oscillator states at γ = 3/2.
    let mut worst_hermite: f64 = 0.0;
    for m in 0..=10 {
        let s = label(m, 1.5);
        let sign = (eval_psi(&s, 1.0) / hermite_oracle(2 * m + 1, 1.0)).signum();
        for i in 1..=120 {
            let x = 0.05 * i as f64;
            let d =
                eval_psi(&s, x) - sign * std::f64::consts::SQRT_2 * hermite_oracle(2 * m + 1, x);
            worst_hermite = worst_hermite.max(d.abs());
        }
    }
    v.check(worst_hermite <= 1e-10, || {
        format!("Hermite reduction deviation {worst_hermite:e}")
    });

    // BBM, Heisenberg and the squeezing implication on the full grid.
    let reports: Vec<_> = analyses
        .par_iter()
        .map(|a| {
            (
                a.entropy_report().unwrap(),
                a.uncertainty_report(false).unwrap(),
            )
        })
        .collect();
    let mut min_margin = f64::INFINITY;
    let mut min_product = f64::INFINITY;
    for (e, u) in &reports {
        let cell = e.label.to_string();
        v.check(e.s_sum >= BBM_BOUND - 1e-9, || {
            format!("{cell} violates BBM: {}", e.s_sum)
        });
        v.check(u.product >= HEISENBERG_BOUND - 1e-6, || {
            format!("{cell} product {}", u.product)
        });
        v.check(!u.x_squeezed || e.entropy_squeezed_position, || {
            format!("{cell} x_squeezed without entropy squeezing")
        });
        min_margin = min_margin.min(e.s_sum - BBM_BOUND);
        min_product = min_product.min(u.product);
    }
    v.note(format!(
        "{} states: min BBM margin {min_margin:.4}, min product {min_product:.4}",
        reports.len()
    ));
}

fn criterion_6(v: &mut Verdict) {
    for &g in &TABLE_GAMMAS {
        for m in 0..4 {
            let a = analysis(m, g);
            let edge = a.label().turning_point() + 4.0;
            let hi = edge + 4.0;
            let n = (hi * 200.0) as usize + 1;
            let c = a.density_samples(Space::Position, 0.0, hi, n).unwrap();
            let cell = a.label().to_string();
            v.check(c.samples[0] == (0.0, 0.0), || {
                format!("{cell} first sample {:?}", c.samples[0])
            });
            let tail = c
                .samples
                .iter()
                .filter(|s| s.0 > edge)
                .map(|s| s.1.abs())
                .fold(0.0, f64::max);
            v.check(tail < 1e-6, || {
                format!("{cell} density {tail:e} beyond x={edge:.3}")
            });
            let peak = c.max_value();
            v.check((0.33..=0.37).contains(&peak), || {
                format!("{cell} position peak {peak:.5}")
            });
        }
        let a = analysis(0, g);
        let c = a.density_samples(Space::Momentum, -8.0, 8.0, 1601).unwrap();
        let cell = a.label().to_string();
        let n = c.samples.len();
        let asym = (0..n)
            .map(|i| (c.samples[i].1 - c.samples[n - 1 - i].1).abs())
            .fold(0.0, f64::max);
        v.check(asym <= 1e-9, || {
            format!("{cell} momentum curve asymmetry {asym:e}")
        });
        let at_zero = c.samples[n / 2];
        debug_assert_eq!(at_zero.0, 0.0);
        let peak = c.max_value();
        v.check(at_zero.1 >= peak, || {
            let xi0 = a.state().momentum_density(0.0).unwrap();
            format!(
                "{cell} momentum curve maximal at p={:+.2} ({peak:.6}), not p=0 ({:.6}); xi(0)={xi0:.6} > 1/e",
                c.argmax(),
                at_zero.1
            )
        });
    }
}

type Criterion = (u8, &'static str, fn(&mut Verdict));

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        (1, "entropy table reproduction", criterion_1),
        (2, "variance table reproduction", criterion_2),
        (3, "ground-state trend values", criterion_3),
        (4, "baselines", criterion_4),
        (5, "property suite", criterion_5),
        (6, "figure data sanity", criterion_6),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let mut v = Verdict::new();
        run(&mut v);
        let secs = start.elapsed().as_secs_f64();
        for n in &v.notes {
            println!("    note: {n}");
        }
        for f in &v.failures {
            println!("    fail: {f}");
        }
        let status = if v.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("criterion {id} ({name}): {status} [{secs:.1} s]");
        if !v.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 6 criteria passed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
