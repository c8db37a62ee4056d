//! End-to-end acceptance run over the default grid. Prints one PASS/FAIL line
//! per criterion; run with `--nocapture` to see them.

use koch_core::suites::{
    cell_suites, default_grid, derive_seed, enumerate_cell, global_suites, merge, Cell, SuiteConfig, SuiteOutcome,
};
use std::time::{Duration, Instant};

struct Criterion {
    number: usize,
    title: &'static str,
    suites: &'static [&'static str],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        title: "worked example Q, F_{2,1}, F_{3,1} on (2, 0, 0, ...) to 1e-12",
        suites: &["worked_example"],
    },
    Criterion {
        number: 2,
        title: "every eigenvalue at every fixed point is ~0 or of modulus > 1 + 1e-7",
        suites: &["enumeration", "theorem_a"],
    },
    Criterion {
        number: 3,
        title: "spectrum = inner ⊎ predicted outer within 1e-7, with the three anchors",
        suites: &["decomposition", "spectral_anchors", "jacobian_fd"],
    },
    Criterion {
        number: 4,
        title: "pull-back identities on omega, alpha and beta forms to 1e-9",
        suites: &["dual_action"],
    },
    Criterion {
        number: 5,
        title: "L_* inverts L^T to 1e-9 and has spectrum inside |mu| < 1 - 1e-7",
        suites: &["lstar_inverse"],
    },
    Criterion {
        number: 6,
        title: "pushforward identity to 1e-9, partial fractions to 1e-10, anchor -1/4",
        suites: &["pushforward", "partial_fraction"],
    },
    Criterion {
        number: 7,
        title: "tau G = F tau to 1e-10, conjugate Jacobian spectra to 1e-8",
        suites: &["conjugacy"],
    },
    Criterion {
        number: 8,
        title: "structural suites and the F_{2,1}/F_{3,1} non-restriction",
        suites: &[
            "pi_projection",
            "homogeneity",
            "nondegeneracy",
            "restriction",
            "order_inclusion",
            "critical_values",
            "delta_invariance",
            "largest_invariant",
            "counterexample",
        ],
    },
];

const THEOREM_A_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let grid = default_grid();

    // single-threaded enumeration and spectra for the whole grid
    let start = Instant::now();
    let cells: Vec<Cell> = grid
        .iter()
        .map(|idx| enumerate_cell(*idx, cfg.degree_cap).expect("enumeration succeeds"))
        .collect();
    for cell in &cells {
        for rec in &cell.records {
            koch_core::spectral::verify_spectrum(rec, cfg.tol_match).expect("spectrum computes");
        }
    }
    let theorem_a_time = start.elapsed();
    let fixed_points: usize = cells.iter().map(|c| c.records.len()).sum();

    let mut batches = vec![global_suites(&cfg).expect("global suites run")];
    for (n, cell) in cells.iter().enumerate() {
        batches.push(cell_suites(cell, &cfg, derive_seed(cfg.seed, n as u64)).expect("cell suites run"));
    }
    let outcomes = merge(batches);
    let find = |name: &str| -> &SuiteOutcome {
        outcomes
            .iter()
            .find(|o| o.name == name)
            .unwrap_or_else(|| panic!("suite {name} missing"))
    };

    println!("grid: {} cells, {fixed_points} fixed points", grid.len());
    let mut all_ok = true;
    for c in CRITERIA {
        let suites: Vec<&SuiteOutcome> = c.suites.iter().map(|s| find(s)).collect();
        let checks: usize = suites.iter().map(|s| s.report.checks).sum();
        let max_error = suites.iter().map(|s| s.report.max_error).fold(0.0, f64::max);
        let mut ok = suites.iter().all(|s| s.passed()) && checks > 0;
        let mut extra = String::new();
        if c.number == 2 {
            ok &= theorem_a_time < THEOREM_A_BUDGET;
            extra = format!(", {:.2}s", theorem_a_time.as_secs_f64());
        }
        all_ok &= ok;
        println!(
            "[{}] criterion {}: {} ({checks} checks, max error {max_error:.2e}{extra})",
            if ok { "PASS" } else { "FAIL" },
            c.number,
            c.title
        );
        for s in suites.iter().filter(|s| !s.passed()) {
            for f in s.report.failures.iter().take(10) {
                println!("    {}: {f}", s.name);
            }
        }
    }
    for o in &outcomes {
        for note in o.notes.iter().filter(|n| !n.contains("min |F(x)|")) {
            println!("    note ({}): {note}", o.name);
        }
    }
    assert!(all_ok, "acceptance criteria failed");
}
