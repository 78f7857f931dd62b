//! The four subcommands: decompose, solve, mvsk, bench.

use std::fs;
use std::path::Path;
use std::time::Instant;

use ndarray::Array1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use psdc::decomp::{hdpsdc, tpsdc, DcForm};
use psdc::fdpg::spectral_norm;
use psdc::mvsk::{load_returns, moments, mvsk_polynomial, synthetic_returns};
use psdc::solvers::{
    bdca_armijo, bdca_exact, dca, stationarity_residual, SolveStatus, SolveTrace,
};
use psdc::{Polyhedron, SparsePolynomial};

use crate::config::{Decomposition, Method, RhoPolicy, Settings};
use crate::CliError;

const VERSION_LINE: &str = concat!("tool=psdc ", env!("CARGO_PKG_VERSION"));
const RECONSTRUCTION_TOL: f64 = 1e-6;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

fn decompose(f: &SparsePolynomial, which: Decomposition) -> Result<DcForm, CliError> {
    let dc = match which {
        Decomposition::Tpsdc => tpsdc(f),
        Decomposition::Hdpsdc => hdpsdc(f),
    }?;
    Ok(dc)
}

fn resolve_rho(dc: &DcForm, policy: RhoPolicy) -> f64 {
    match policy {
        RhoPolicy::One => 1.0,
        RhoPolicy::Explicit(v) => v,
        RhoPolicy::SpecNorm => {
            let (a_plus, _, _) = dc.stacked_plus();
            let v = spectral_norm(a_plus.view());
            if v > 0.0 {
                v
            } else {
                1.0
            }
        }
    }
}

/// Uniform draw in [0,1]^n projected onto the feasible set.
fn sample_x0(p: &Polyhedron, seed: u64) -> Result<Array1<f64>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Array1::from_iter((0..p.n()).map(|_| rng.random_range(0.0..1.0)));
    Ok(p.project(raw.view())?)
}

fn run_method(
    method: Method,
    dc: &DcForm,
    p: &Polyhedron,
    x0: &Array1<f64>,
    settings: &Settings,
) -> Result<(Array1<f64>, SolveTrace, f64), CliError> {
    let solver = match method {
        Method::Dca => dca,
        Method::Bdca => bdca_armijo,
        Method::Bdcae => bdca_exact,
    };
    let start = Instant::now();
    let (x, trace) = solver(dc, p, x0.view(), &settings.solver)?;
    Ok((x, trace, start.elapsed().as_secs_f64()))
}

pub fn cmd_decompose(
    poly_path: &Path,
    method: Decomposition,
    out: &Path,
    seed: u64,
) -> Result<(), CliError> {
    let f = SparsePolynomial::from_text(&read(poly_path)?)?;
    if f.is_zero() {
        return Err(CliError::validation(
            "input polynomial is empty; nothing to decompose",
        ));
    }
    let n = f.n();
    let start = Instant::now();
    let dc = decompose(&f, method)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0)));
        let fx = f.eval(x.view());
        let err = (dc.eval_f(x.view()) - fx).abs() / (1.0 + fx.abs());
        worst = worst.max(err);
    }

    for block in &dc.blocks {
        let mut csv = String::from("sign,b,");
        csv.push_str(
            &(1..=n)
                .map(|i| format!("a{i}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        csv.push('\n');
        for (sign, rows, offsets) in [
            ("1", &block.a_plus, &block.b_plus),
            ("-1", &block.a_minus, &block.b_minus),
        ] {
            for (row, &b) in rows.rows().into_iter().zip(offsets.iter()) {
                let coords = row
                    .iter()
                    .map(|v| format!("{v:.17e}"))
                    .collect::<Vec<_>>()
                    .join(",");
                csv.push_str(&format!("{sign},{b:.17e},{coords}\n"));
            }
        }
        write_out(out, &format!("block_p{}.csv", block.power), &csv)?;
    }

    let powers = dc
        .blocks
        .iter()
        .map(|b| b.power.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let manifest = format!(
        "{VERSION_LINE}\ncommand=decompose\ninput={}\nmethod={}\nn={n}\ndegree={}\nblocks={}\npowers={powers}\nplus_rows={}\nminus_rows={}\nconstant={:.17e}\nreconstruction_error={worst:.3e}\nseconds={seconds:.6}\nseed={seed}\n",
        poly_path.display(),
        method.name(),
        f.degree(),
        dc.blocks.len(),
        dc.num_plus_rows(),
        dc.num_minus_rows(),
        dc.constant,
    );
    write_out(out, "manifest.txt", &manifest)?;
    println!(
        "decomposed {} blocks, reconstruction error {worst:.3e}",
        dc.blocks.len()
    );
    if worst > RECONSTRUCTION_TOL {
        return Err(CliError::numerical(format!(
            "reconstruction error {worst:.3e} exceeds {RECONSTRUCTION_TOL:.0e}"
        )));
    }
    Ok(())
}

struct RunReport {
    summary: String,
    trace: SolveTrace,
    manifest: String,
}

fn run_and_report(
    f: &SparsePolynomial,
    p: &Polyhedron,
    settings: &Settings,
    x0: Option<Array1<f64>>,
    command: &str,
    extra_manifest: &str,
) -> Result<RunReport, CliError> {
    let n = f.n();
    if p.n() != n {
        return Err(CliError::validation(format!(
            "polynomial has {n} variables but the constraint set has {}",
            p.n()
        )));
    }
    let dc = decompose(f, settings.decomposition)?;
    let rho = resolve_rho(&dc, settings.rho);
    let dc = dc.with_rho(rho);
    let x0 = match x0 {
        Some(v) => {
            if v.len() != n {
                return Err(CliError::validation(format!(
                    "x0 has {} entries, expected {n}",
                    v.len()
                )));
            }
            v
        }
        None => sample_x0(p, settings.seed)?,
    };
    let (x, trace, seconds) = run_method(settings.method, &dc, p, &x0, settings)?;
    let residual = stationarity_residual(&dc, p, x.view(), 200);
    let summary = format!(
        "{},{},{},{:.12e},{},{:.3},{:.3e}",
        settings.method.name(),
        n,
        f.degree(),
        trace.f_final,
        trace.iterations(),
        seconds,
        residual
    );
    let status = match trace.status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterations => "max-iterations",
    };
    let manifest = format!(
        "{VERSION_LINE}\ncommand={command}\n{extra_manifest}method={}\ndecomposition={}\nrho_policy={}\nrho={rho:.12e}\nseed={}\nepsilon={:e}\nmax_outer={}\ninner_tol={:e}\ninner_max_iter={}\narmijo_sigma={:e}\narmijo_beta={}\nn={n}\ndegree={}\nstatus={status}\nf_final={:.12e}\niterations={}\ninner_failures={}\nresidual={residual:.3e}\n",
        settings.method.name(),
        settings.decomposition.name(),
        settings.rho.describe(),
        settings.seed,
        settings.solver.epsilon,
        settings.solver.max_outer,
        settings.solver.inner_tol,
        settings.solver.inner_max_iter,
        settings.solver.armijo_sigma,
        settings.solver.armijo_beta,
        f.degree(),
        trace.f_final,
        trace.iterations(),
        trace.inner_failures,
    );
    Ok(RunReport {
        summary,
        trace,
        manifest,
    })
}

fn emit_report(report: &RunReport, out: Option<&Path>) -> Result<(), CliError> {
    println!("{}", report.summary);
    if let Some(dir) = out {
        write_out(dir, "trace.csv", &report.trace.to_csv())?;
        write_out(dir, "summary.txt", &format!("{}\n", report.summary))?;
        write_out(dir, "manifest.txt", &report.manifest)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_solve(
    poly_path: &Path,
    constraints_path: &Path,
    settings: &Settings,
    x0: Option<Vec<f64>>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let f = SparsePolynomial::from_text(&read(poly_path)?)?;
    let p = Polyhedron::from_text(&read(constraints_path)?)?;
    let extra = format!(
        "poly={}\nconstraints={}\n",
        poly_path.display(),
        constraints_path.display()
    );
    let report = run_and_report(
        &f,
        &p,
        settings,
        x0.map(Array1::from_vec),
        "solve",
        &extra,
    )?;
    emit_report(&report, out)
}

pub enum MvskSource {
    Returns(std::path::PathBuf),
    Synthetic { n: usize, t: usize },
}

pub fn cmd_mvsk(
    source: MvskSource,
    assets: Option<usize>,
    omega: [f64; 4],
    settings: &Settings,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (label, data) = match source {
        MvskSource::Returns(path) => {
            let (names, data) = load_returns(&read(&path)?)?;
            // the leading-column convention makes nested asset subsets
            // comparable across runs
            let data = match assets {
                Some(k) => {
                    if k < 1 || k > names.len() {
                        return Err(CliError::validation(format!(
                            "assets must be in 1..={}, got {k}",
                            names.len()
                        )));
                    }
                    data.slice_move(ndarray::s![.., ..k])
                }
                None => data,
            };
            let kept = data.ncols();
            (format!("returns={} assets={kept}", path.display()), data)
        }
        MvskSource::Synthetic { n, t } => {
            if n < 1 || t < 2 {
                return Err(CliError::validation(
                    "synthetic source needs n >= 1 assets and t >= 2 periods",
                ));
            }
            (
                format!("synthetic={n},{t}"),
                synthetic_returns(n, t, settings.seed),
            )
        }
    };
    let ms = moments(data.view())?;
    let f = mvsk_polynomial(&ms, omega)?;
    let p = Polyhedron::simplex(f.n());
    let extra = format!(
        "{label}\nomega={},{},{},{}\n",
        omega[0], omega[1], omega[2], omega[3]
    );
    let report = run_and_report(&f, &p, settings, None, "mvsk", &extra)?;
    emit_report(&report, out)
}

pub struct BenchPlan {
    pub instances: usize,
    pub n: usize,
    pub t: usize,
    pub omega: [f64; 4],
    pub settings: Settings,
}

/// One synthetic instance, all three methods on the same start; rows in
/// method order dca, bdca, bdcae.
fn bench_instance(plan: &BenchPlan, index: usize) -> Result<Vec<String>, CliError> {
    let seed = plan.settings.seed + index as u64;
    let data = synthetic_returns(plan.n, plan.t, seed);
    let ms = moments(data.view())?;
    let f = mvsk_polynomial(&ms, plan.omega)?;
    let p = Polyhedron::simplex(plan.n);
    let dc = decompose(&f, plan.settings.decomposition)?;
    let rho = resolve_rho(&dc, plan.settings.rho);
    let dc = dc.with_rho(rho);
    let x0 = sample_x0(&p, seed)?;
    let mut rows = Vec::with_capacity(3);
    for method in [Method::Dca, Method::Bdca, Method::Bdcae] {
        let (_, trace, seconds) = run_method(method, &dc, &p, &x0, &plan.settings)?;
        rows.push(format!(
            "{index},{},{},{},{},{:.12e},{:.3}",
            method.name(),
            plan.settings.decomposition.name(),
            plan.n,
            trace.iterations(),
            trace.f_final,
            seconds
        ));
    }
    Ok(rows)
}

pub fn cmd_bench(plan: &BenchPlan, out: &Path) -> Result<(), CliError> {
    if plan.instances == 0 {
        return Err(CliError::validation("bench needs at least one instance"));
    }
    // instances fan out across threads; methods stay sequential inside one
    let mut results: Vec<Result<Vec<String>, CliError>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..plan.instances)
            .map(|i| scope.spawn(move || bench_instance(plan, i)))
            .collect();
        for h in handles {
            results.push(h.join().expect("bench worker panicked"));
        }
    });

    let mut csv = String::from("instance,method,decomposition,n,iters,f_final,seconds\n");
    let mut totals: Vec<(usize, f64, f64)> = vec![(0, 0.0, 0.0); 3];
    for res in results {
        let rows = res?;
        for (m, row) in rows.iter().enumerate() {
            csv.push_str(row);
            csv.push('\n');
            let fields: Vec<&str> = row.split(',').collect();
            totals[m].0 += fields[4].parse::<usize>().unwrap();
            totals[m].1 += fields[5].parse::<f64>().unwrap();
            totals[m].2 += fields[6].parse::<f64>().unwrap();
        }
    }
    let k = plan.instances as f64;
    for (m, method) in [Method::Dca, Method::Bdca, Method::Bdcae].iter().enumerate() {
        csv.push_str(&format!(
            "average,{},{},{},{:.1},{:.12e},{:.3}\n",
            method.name(),
            plan.settings.decomposition.name(),
            plan.n,
            totals[m].0 as f64 / k,
            totals[m].1 / k,
            totals[m].2 / k
        ));
    }
    print!("{csv}");
    write_out(out, "bench.csv", &csv)?;
    let manifest = format!(
        "{VERSION_LINE}\ncommand=bench\ninstances={}\nn={}\nt={}\nomega={},{},{},{}\ndecomposition={}\nrho_policy={}\nseed={}\n",
        plan.instances,
        plan.n,
        plan.t,
        plan.omega[0],
        plan.omega[1],
        plan.omega[2],
        plan.omega[3],
        plan.settings.decomposition.name(),
        plan.settings.rho.describe(),
        plan.settings.seed,
    );
    write_out(out, "manifest.txt", &manifest)
}
