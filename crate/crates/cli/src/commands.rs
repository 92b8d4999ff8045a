use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use okvalid_core::cift::{check_certificate, validate, Certificate, Status, ValidateOptions};
use okvalid_core::embeddings::{recompute_cmbar, table_constants};
use okvalid_core::newton::{float_residual, newton_solve, parameter_walk, SolveOptions};
use okvalid_core::operator::{ModelParams, Param};
use okvalid_core::polynomial::Polynomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::files::{CertificateFile, SolutionFile};
use crate::seed::parse_seed;
use crate::{BoxArgs, Command, SolveArgs, SweepArgs, ValidateArgs, WalkArgs};
use crate::{EXIT_CERT, EXIT_SOLVER, EXIT_VALID};

pub fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Constants { dim, recompute, ncut } => cmd_constants(dim, recompute, ncut),
        Command::Solve(a) => cmd_solve(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Check { cert, solution } => cmd_check(&cert, solution.as_deref()),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Render {
            input,
            grid,
            slice,
            out,
        } => cmd_render(&input, grid, slice, out.as_deref()),
        Command::Walk(a) => cmd_walk(&a),
    }
}

fn default_n(dim: usize) -> usize {
    match dim {
        1 => 64,
        2 => 28,
        _ => 12,
    }
}

fn parse_f(spec: &str) -> Result<Polynomial<f64>> {
    let coeffs = spec
        .split(',')
        .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad coefficient '{c}'")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Polynomial::new(coeffs)?)
}

fn cmd_constants(dim: Option<usize>, recompute: bool, ncut: usize) -> Result<i32> {
    let dims: Vec<usize> = match dim {
        Some(d) => vec![d],
        None => vec![1, 2, 3],
    };
    print!("{:>2}  {:>10}  {:>10}  {:>10}", "d", "C_m", "Cbar_m", "C_b");
    if recompute {
        print!("  {:>12}", format!("Cbar_m({ncut})"));
    }
    println!();
    for d in dims {
        let c = table_constants::<f64>(d)?;
        print!("{d:>2}  {:>10.6}  {:>10.6}  {:>10.6}", c.cm.hi(), c.cm_bar.hi(), c.cb.hi());
        if recompute {
            print!("  {:>12.8}", recompute_cmbar::<f64>(d, ncut)?.hi());
        }
        println!();
    }
    Ok(EXIT_VALID)
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let f = match &a.f {
        Some(s) => parse_f(s)?,
        None => Polynomial::cubic(),
    };
    let p = ModelParams::with_nonlinearity(a.lambda, a.sigma, a.mu, f)?;
    let u0 = parse_seed(&a.seed, a.dim)?;
    let mut opts = SolveOptions::new(a.n.unwrap_or_else(|| default_n(a.dim)));
    opts.max_iter = a.max_iter;
    opts.tol_residual = a.tol;
    opts.damping = a.damping;
    let r = match newton_solve(&p, &u0, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solve failed: {e}");
            return Ok(EXIT_SOLVER);
        }
    };
    eprintln!(
        "converged in {} iterations, projected residual {:.3e}, residual {:.3e}",
        r.iterations, r.projected_residual, r.residual
    );
    let file = SolutionFile::new(&p, &r.u, r.residual);
    match &a.out {
        Some(path) => file.write(path)?,
        None => println!("{}", serde_json::to_string_pretty(&file)?),
    }
    Ok(EXIT_VALID)
}

fn options(dim: usize, n: Option<usize>, n_max: Option<usize>, bx: &BoxArgs) -> Result<ValidateOptions<f64>> {
    let mut o = ValidateOptions::new(table_constants(dim)?);
    o.n = n;
    o.n_max = n_max;
    o.du = bx.du;
    o.dp = bx.dp;
    o.adapt_box = !bx.fixed_box;
    Ok(o)
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$e}"))
}

fn print_summary(c: &Certificate<f64>) {
    println!(
        "{:>10}  {:>4}  {:>6}  {:>12}  {:>12}",
        "K", "N", "P", "delta_alpha", "delta_x"
    );
    println!(
        "{:>10}  {:>4}  {:>6}  {:>12}  {:>12}",
        c.k().map_or("-".into(), |k| format!("{k:.4}")),
        c.n().map_or("-".into(), |n| n.to_string()),
        c.which.name(),
        fmt_opt(c.delta_alpha(), 4),
        fmt_opt(c.delta_x(), 4),
    );
    println!(
        "rho {}  K_N {}  tau {}  box ({:.3e}, {:.3e})",
        fmt_opt(c.rho, 3),
        fmt_opt(c.inverse.map(|i| i.kn), 4),
        fmt_opt(c.inverse.map(|i| i.tau), 4),
        c.ell_alpha,
        c.ell_x
    );
    match &c.status {
        Status::Valid => println!("status: valid"),
        Status::PointOnly => println!("status: point_only (delta_alpha = 0)"),
        Status::Invalid { stage, reason } => {
            println!("status: invalid at stage {stage}: {reason}");
            if let Some(n) = c.suggested_n {
                println!("suggested N: {n}");
            }
        }
    }
}

fn default_cert_path(input: &Path, which: Param) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    input.with_file_name(format!("{stem}.{}.cert.json", which.name()))
}

fn cmd_validate(a: &ValidateArgs) -> Result<i32> {
    let sol = SolutionFile::read(&a.input)?;
    let (p, u) = (sol.model()?, sol.series()?);
    let opts = options(sol.dim, a.n, a.n_max, &a.bx)?;
    let cert = validate(&p, &u, a.param, &opts)?;
    let file = CertificateFile::from_certificate(&cert, &sol.meta.content_hash);
    let out = a.out.clone().unwrap_or_else(|| default_cert_path(&a.input, a.param));
    file.write(&out)?;
    print_summary(&cert);
    println!("certificate: {}", out.display());
    Ok(if cert.is_valid() { EXIT_VALID } else { EXIT_CERT })
}

fn cmd_check(cert: &Path, solution: Option<&Path>) -> Result<i32> {
    let file = CertificateFile::read(cert)?;
    let c = file.to_certificate()?;
    let mut problems = Vec::new();
    if let Some(path) = solution {
        let sol = SolutionFile::read(path)?;
        if sol.meta.content_hash != file.solution_hash {
            problems.push("solution hash does not match the certificate".to_string());
        }
        if sol.params != file.params {
            problems.push("solution parameters differ from the certificate".to_string());
        }
    }
    if !c.is_valid() {
        problems.push(format!("certificate status is {}", c.status.name()));
    }
    if let Err(v) = check_certificate(&c) {
        problems.extend(v);
    }
    if problems.is_empty() {
        println!("ok: all certificate inequalities hold");
        Ok(EXIT_VALID)
    } else {
        for p in &problems {
            println!("violated: {p}");
        }
        Ok(EXIT_CERT)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K_N")]
    pub kn: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "deltaAlpha")]
    pub delta_alpha: Option<f64>,
    #[serde(rename = "deltaX")]
    pub delta_x: Option<f64>,
    pub wall_ms: u128,
    pub status: String,
}

fn parse_nlist(s: &str) -> Result<Vec<usize>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad N '{t}'")))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() || v.iter().any(|&n| n < 2) {
        bail!("--Nlist needs truncations of at least 2");
    }
    Ok(v)
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let sol = SolutionFile::read(&a.input)?;
    let (p, u) = (sol.model()?, sol.series()?);
    let ns = parse_nlist(&a.nlist)?;
    if let Some(dir) = &a.cert_dir {
        fs::create_dir_all(dir)?;
    }
    let results: Vec<Result<(SweepRow, Certificate<f64>)>> = ns
        .par_iter()
        .map(|&n| {
            let opts = options(sol.dim, Some(n), None, &a.bx)?;
            let t = Instant::now();
            let c = validate(&p, &u, a.param, &opts)?;
            let wall_ms = t.elapsed().as_millis();
            let status = match &c.status {
                Status::Invalid { stage, .. } => format!("failed:{stage}"),
                s => s.name().to_string(),
            };
            let row = SweepRow {
                n,
                kn: c.inverse.map(|i| i.kn),
                tau: c.inverse.map(|i| i.tau),
                k: c.k(),
                delta_alpha: c.delta_alpha(),
                delta_x: c.delta_x(),
                wall_ms,
                status,
            };
            Ok((row, c))
        })
        .collect();
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in results {
        let (row, cert) = r?;
        if let Some(dir) = &a.cert_dir {
            CertificateFile::from_certificate(&cert, &sol.meta.content_hash)
                .write(&dir.join(format!("N{}.{}.cert.json", row.n, a.param.name())))?;
        }
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(EXIT_VALID)
}

fn cmd_render(input: &Path, grid: usize, slice: f64, out: Option<&Path>) -> Result<i32> {
    let sol = SolutionFile::read(input)?;
    let u = sol.series()?;
    if grid < 2 {
        bail!("--grid must be at least 2");
    }
    let x = |i: usize| i as f64 / (grid - 1) as f64;
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    match sol.dim {
        1 => {
            w.write_record(["x", "u"])?;
            for i in 0..grid {
                w.write_record([x(i).to_string(), u.evaluate(&[x(i)])?.to_string()])?;
            }
        }
        d => {
            w.write_record(["x", "y", "u"])?;
            for i in 0..grid {
                for j in 0..grid {
                    let mut pt = vec![x(i), x(j)];
                    if d == 3 {
                        pt.push(slice);
                    }
                    w.write_record([x(i).to_string(), x(j).to_string(), u.evaluate(&pt)?.to_string()])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(EXIT_VALID)
}

fn cmd_walk(a: &WalkArgs) -> Result<i32> {
    let sol = SolutionFile::read(&a.input)?;
    let (p, u) = (sol.model()?, sol.series()?);
    let n = a.n.unwrap_or_else(|| sol.extent.iter().copied().max().unwrap_or(2).max(2));
    let walk = match parameter_walk(&p, &u, a.param, a.step, a.count, &SolveOptions::new(n)) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("walk failed: {e}");
            return Ok(EXIT_SOLVER);
        }
    };
    fs::create_dir_all(&a.out_dir)?;
    println!("{:>4}  {:>14}  {:>10}  file", "step", a.param.name(), "residual");
    for (i, (pi, r)) in walk.iter().enumerate() {
        let res = float_residual(pi, &r.u)?;
        let path = a.out_dir.join(format!("step_{i:03}.json"));
        SolutionFile::new(pi, &r.u, res).write(&path)?;
        println!("{i:>4}  {:>14.8}  {res:>10.3e}  {}", pi.get(a.param), path.display());
    }
    if walk.len() < a.count + 1 {
        eprintln!("walk stopped after {} of {} steps", walk.len() - 1, a.count);
        return Ok(EXIT_SOLVER);
    }
    Ok(EXIT_VALID)
}
