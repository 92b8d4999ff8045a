//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use okvalid::files::{CertificateFile, SolutionFile};
use okvalid_core::cift::{validate, ValidateOptions};
use okvalid_core::embeddings::{recompute_cmbar, table_constants};
use okvalid_core::newton::{newton_solve, seed_series, SolveOptions};
use okvalid_core::operator::{build_galerkin, kn_bound, q_series, ModelParams, Param};
use okvalid_core::spectral::{CosineSeries, MultiIndex, NormTag};
use okvalid_core::{Interval64, IntervalSeries64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PI: f64 = std::f64::consts::PI;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn okvalid(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_okvalid"))
        .args(args)
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

// 1 ------------------------------------------------------------------------

fn embedding_constants() -> Outcome {
    let table = [0.149072, 0.248740, 0.411972];
    let mut parts = Vec::new();
    let mut pass = true;
    for d in 1..=3 {
        let c = recompute_cmbar::<f64>(d, 1000).unwrap().hi();
        pass &= (c - table[d - 1]).abs() <= 1e-3;
        parts.push(format!("d={d}: {c:.7}"));
    }
    outcome(pass, parts.join(", "))
}

// 2 ------------------------------------------------------------------------

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn random_f64(rng: &mut StdRng) -> f64 {
    let m: f64 = rng.gen_range(-1.0..1.0);
    let e: i32 = match rng.gen_range(0..10) {
        0 => rng.gen_range(-1000..-900),
        1 => rng.gen_range(900..1000),
        _ => rng.gen_range(-60..60),
    };
    let x = m * 2f64.powi(e);
    if x.is_finite() {
        x
    } else {
        m
    }
}

fn random_interval(rng: &mut StdRng) -> (Interval64, f64) {
    let a = random_f64(rng);
    let w = if rng.gen_bool(0.5) { 0.0 } else { a.abs() * rng.gen_range(0.0..1e-3) };
    let i = Interval64::new(a, a + w);
    let t: f64 = rng.gen_range(0.0..=1.0);
    let x = (i.lo() + t * (i.hi() - i.lo())).clamp(i.lo(), i.hi());
    (i, x)
}

fn encloses(i: Interval64, exact: &BigRational) -> bool {
    let lo_ok = i.lo() == f64::NEG_INFINITY || rat(i.lo()) <= *exact;
    let hi_ok = i.hi() == f64::INFINITY || *exact <= rat(i.hi());
    lo_ok && hi_ok
}

fn interval_containment() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let trials = 100_000;
    let mut violations = [0usize; 6];
    for _ in 0..trials {
        let (a, x) = random_interval(&mut rng);
        let (b, y) = random_interval(&mut rng);
        let (rx, ry) = (rat(x), rat(y));
        violations[0] += !encloses(a + b, &(&rx + &ry)) as usize;
        violations[1] += !encloses(a - b, &(&rx - &ry)) as usize;
        violations[2] += !encloses(a * b, &(&rx * &ry)) as usize;
        violations[3] += !encloses(a.sqr(), &(&rx * &rx)) as usize;
        if !ry.is_zero() {
            if let Ok(q) = a.checked_div(&b) {
                violations[4] += !encloses(q, &(&rx / &ry)) as usize;
            }
        }
        let ax = a.abs();
        let sx = x.abs();
        let r = ax.sqrt().expect("non-negative");
        let (lo, hi) = (rat(r.lo()), rat(r.hi()));
        let rs = rat(sx);
        let ok = r.lo() >= 0.0 && &lo * &lo <= rs && (r.hi() == f64::INFINITY || rs <= &hi * &hi);
        violations[5] += !ok as usize;
    }
    let total: usize = violations.iter().sum();
    outcome(
        total == 0,
        format!("{trials} trials per op (add, sub, mul, sqr, div, sqrt), violations {violations:?}"),
    )
}

// 3 ------------------------------------------------------------------------

fn random_series(rng: &mut StdRng, dim: usize) -> IntervalSeries64 {
    let ext = match dim {
        1 => rng.gen_range(2..24),
        2 => rng.gen_range(2..9),
        _ => rng.gen_range(2..6),
    };
    let decay: f64 = rng.gen_range(0.0..2.0);
    let len = ext * if dim > 1 { ext } else { 1 } * if dim > 2 { ext } else { 1 };
    let mut u = CosineSeries::<f64>::new(dim, &vec![ext; dim], vec![0.0; len]).unwrap();
    for i in 0..len {
        let k = u.index_of(i);
        let scale = (1.0 + k.norm_sq() as f64).powf(-decay);
        u.set(&k, rng.gen_range(-1.0..1.0) * scale);
    }
    u.without_mean().to_interval()
}

fn quadrature_l2_sq(u: &IntervalSeries64) -> f64 {
    let dim = u.dim();
    let m = 2 * u.extent()[0] + 2;
    let total = m.pow(dim as u32);
    let mut x = vec![0.0; dim];
    let mut acc = 0.0;
    for i in 0..total {
        let mut r = i;
        for xa in x.iter_mut() {
            *xa = ((r % m) as f64 + 0.5) / m as f64;
            r /= m;
        }
        let v = u.evaluate(&x).unwrap();
        acc += v * v;
    }
    acc / total as f64
}

fn spectral_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut bad = [0usize; 4];
    let per = 1000;
    for i in 0..per {
        let dim = 1 + i % 3;
        let u = random_series(&mut rng, dim);
        // Laplacian isometry for every admissible ℓ.
        for l in -2..=2 {
            let a = u.laplacian(1).unwrap().norm(NormTag::HbarL(l - 2)).unwrap();
            let b = u.norm(NormTag::HbarL(l)).unwrap();
            bad[0] += a.intersect(&b).is_none() as usize;
        }
        // Parseval against the exact product and a quadrature.
        let n = u.norm(NormTag::L2).unwrap();
        let mean = u.multiply(&u).unwrap().mean();
        let q = quadrature_l2_sq(&u);
        bad[1] += (n.sqr().intersect(&mean).is_none() || (n.mid().powi(2) - q).abs() > 1e-10 * (1.0 + q)) as usize;
        for l in -2..=2 {
            for m in l..=2 {
                let lhs = u.norm(NormTag::HbarL(l)).unwrap().lo();
                let rhs = u.norm(NormTag::HbarL(m)).unwrap().hi() * PI.powi(-(m - l));
                bad[2] += (lhs > rhs * (1.0 + 1e-12)) as usize;
                for nn in [2usize, 4, 8] {
                    let t = u.tail(nn).unwrap().norm(NormTag::HbarL(l)).unwrap().lo();
                    let r = u.norm(NormTag::HbarL(m)).unwrap().hi() / (PI * nn as f64).powi(m - l);
                    bad[3] += (t > r * (1.0 + 1e-12)) as usize;
                }
            }
        }
    }
    outcome(
        bad.iter().sum::<usize>() == 0,
        format!("{per} series over d=1,2,3; violations (isometry, Parseval, scale, tail) {bad:?}"),
    )
}

// 4 ------------------------------------------------------------------------

fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=m {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn phi(k: &MultiIndex, x: &[f64]) -> f64 {
    k.components()
        .iter()
        .zip(x)
        .map(|(&ka, &xa)| if ka == 0 { 1.0 } else { std::f64::consts::SQRT_2 * (ka as f64 * PI * xa).cos() })
        .product()
}

fn galerkin_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let nodes = gauss_legendre(48);
    let (mut checked, mut bad) = (0usize, 0usize);
    for (dim, nmax) in [(1usize, 8usize), (2, 4)] {
        for n in 2..=nmax {
            for _ in 0..3 {
                let ext: usize = if dim == 1 { 6 } else { 4 };
                let len = ext.pow(dim as u32);
                let c: Vec<f64> = (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let u = CosineSeries::new(dim, &vec![ext; dim], c).unwrap().without_mean();
                let p = ModelParams::new(rng.gen_range(5.0..150.0), rng.gen_range(0.0..8.0), rng.gen_range(-0.5..0.5))
                    .unwrap();
                let b = build_galerkin(&p, &u, n).unwrap();
                let pts: Vec<(Vec<f64>, f64)> = if dim == 1 {
                    nodes.iter().map(|&(x, w)| (vec![x], w)).collect()
                } else {
                    nodes
                        .iter()
                        .flat_map(|&(x, wx)| nodes.iter().map(move |&(y, wy)| (vec![x, y], wx * wy)))
                        .collect()
                };
                let qv: Vec<f64> = pts
                    .iter()
                    .map(|(x, _)| {
                        let v = u.evaluate(x).unwrap() + p.mu;
                        p.lambda * (1.0 - 3.0 * v * v)
                    })
                    .collect();
                for (i, k) in b.basis.iter().enumerate() {
                    let kk = PI * PI * k.norm_sq() as f64;
                    for (j, l) in b.basis.iter().enumerate() {
                        let kl = PI * PI * l.norm_sq() as f64;
                        let (mut ip, mut mag) = (0.0, 0.0);
                        for ((x, w), q) in pts.iter().zip(&qv) {
                            let t = w * q * phi(l, x) * phi(k, x);
                            ip += t;
                            mag += t.abs();
                        }
                        let delta = if i == j { 1.0 } else { 0.0 };
                        let expect = -(1.0 + p.lambda * p.sigma / (kk * kk)) * delta + ip / kl;
                        // Rounding of the quadrature sum itself.
                        let slack = 64.0 * f64::EPSILON * (1.0 + mag / kl);
                        let e = b.entries.get(i, j);
                        checked += 1;
                        bad += !(e.lo() - slack <= expect && expect <= e.hi() + slack) as usize;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{checked} entries (d=1 N<=8, d=2 N<=4), {bad} outside"))
}

// 5 ------------------------------------------------------------------------

fn diagonal_case() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (lambda, sigma) in [(10.0, 1.0), (150.0, 6.0)] {
        for n in [32usize, 128] {
            let p = ModelParams::new(lambda, sigma, 0.0).unwrap();
            let u = CosineSeries::<f64>::zeros_cube(1, 1).unwrap();
            let kn = kn_bound(&build_galerkin(&p, &u, n).unwrap().entries).unwrap().kn;
            let exact = 1.0
                / (1..n)
                    .map(|k| {
                        let kappa = PI * PI * (k * k) as f64;
                        (-(1.0 + lambda * sigma / (kappa * kappa)) + lambda / kappa).abs()
                    })
                    .fold(f64::INFINITY, f64::min);
            let rel = (kn - exact).abs() / exact;
            pass &= rel <= 0.01;
            parts.push(format!("({lambda},{sigma},N={n}): rel {rel:.1e}"));
        }
    }
    outcome(pass, parts.join(", "))
}

// 6 ------------------------------------------------------------------------

fn inverse_necessary() -> Outcome {
    let p = ModelParams::new(150.0, 6.0, 0.0).unwrap();
    let u0 = seed_series(1, &[(MultiIndex::new(&[1]).unwrap(), 0.2)]).unwrap();
    let u = newton_solve(&p, &u0, &SolveOptions::new(64)).unwrap().u;
    let cert = validate(&p, &u, Param::Lambda, &ValidateOptions::new(table_constants(1).unwrap())).unwrap();
    if !cert.is_valid() {
        return outcome(false, format!("validation failed: {:?}", cert.status));
    }
    let k = cert.k().unwrap();
    let q = q_series(&p, &u.to_interval()).unwrap().q;
    let ls = Interval64::point(p.lambda) * Interval64::point(p.sigma);
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..500 {
        let ext = rng.gen_range(2..200);
        let decay: f64 = rng.gen_range(0.0..3.0);
        let c: Vec<f64> = (0..ext)
            .map(|i| rng.gen_range(-1.0..1.0) * (1.0 + i as f64).powf(-decay))
            .collect();
        let v = CosineSeries::new(1, &[ext], c).unwrap().without_mean().to_interval();
        // L v = -Δ(Δv + q v) - λσ v
        let inner = v.laplacian(1).unwrap().add(&q.multiply(&v).unwrap()).unwrap();
        let lv = inner.laplacian(1).unwrap().scale(-Interval64::one()).sub(&v.scale(ls)).unwrap();
        let lhs = v.norm(NormTag::HbarL(2)).unwrap().lo();
        let rhs = lv.norm(NormTag::HbarL(-2)).unwrap().hi();
        worst = worst.max(lhs / rhs);
        bad += (lhs > k * rhs) as usize;
    }
    outcome(bad == 0, format!("K = {k:.4}, max ‖v‖/‖Lv‖ = {worst:.4} over 500 samples, {bad} violations"))
}

// 7 ------------------------------------------------------------------------

fn end_to_end_1d(dir: &Path, emitted: &mut Vec<PathBuf>) -> Outcome {
    let sol = dir.join("oned.json");
    let (code, text) = okvalid(&[
        "solve", "--dim", "1", "--N", "64", "--lambda", "150", "--sigma", "6", "--mu", "0", "--seed", "mode:1", "--out", s(&sol),
    ]);
    if code != 0 {
        return outcome(false, format!("solve exit {code}: {text}"));
    }
    let mut certs = Vec::new();
    for which in Param::ALL {
        let out = dir.join(format!("oned.{}.cert.json", which.name()));
        let (code, text) = okvalid(&["validate", "--in", s(&sol), "--param", which.name(), "--out", s(&out)]);
        let c = CertificateFile::read(&out).unwrap();
        if code != 0 || c.status != "valid" {
            return outcome(false, format!("validate {} exit {code}: {text}", which.name()));
        }
        emitted.push(out);
        certs.push(c);
    }
    let inv = certs[0].inverse.clone().unwrap();
    let r: Vec<_> = certs.iter().map(|c| c.radii.clone().unwrap()).collect();
    let (dl, ds, dm) = (r[0].delta_alpha, r[1].delta_alpha, r[2].delta_alpha);
    let dx: Vec<f64> = r.iter().map(|x| x.delta_x).collect();
    let dx_spread = dx.iter().cloned().fold(0.0, f64::max) / dx.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = inv.n <= 160
        && inv.tau < 1.0
        && (1.0..=60.0).contains(&inv.k)
        && dl > 0.0
        && dx.iter().all(|&x| x > 0.0)
        && dm * 10.0 <= ds
        && ds < dl
        && dx_spread <= 10.0;
    outcome(
        pass,
        format!(
            "N={} tau={:.3} K={:.4}; δλ={dl:.3e} δσ={ds:.3e} δμ={dm:.3e}; δx=[{:.2e}, {:.2e}, {:.2e}]",
            inv.n, inv.tau, inv.k, dx[0], dx[1], dx[2]
        ),
    )
}

// 8 ------------------------------------------------------------------------

fn end_to_end_2d(dir: &Path, emitted: &mut Vec<PathBuf>) -> Outcome {
    let sol = dir.join("twod.json");
    let (code, text) = okvalid(&[
        "solve", "--dim", "2", "--N", "28", "--lambda", "75", "--sigma", "6", "--mu", "0", "--seed", "mode:1x0+mode:0x1", "--out",
        s(&sol),
    ]);
    if code != 0 {
        return outcome(false, format!("solve exit {code}: {text}"));
    }
    let amp = SolutionFile::read(&sol).unwrap().series().unwrap().to_interval().norm(NormTag::L2).unwrap().mid();
    if amp < 0.05 {
        return outcome(false, format!("solution is near-trivial (L2 norm {amp:.2e})"));
    }
    let out = dir.join("twod.lambda.cert.json");
    let (code, _) = okvalid(&["validate", "--in", s(&sol), "--param", "lambda", "--N", "28", "--out", s(&out)]);
    let c = CertificateFile::read(&out).unwrap();
    match (code, c.status.as_str()) {
        (0, "valid") => {
            emitted.push(out.clone());
            let (chk, _) = okvalid(&["check", "--cert", s(&out), "--solution", s(&sol)]);
            let inv = c.inverse.unwrap();
            let r = c.radii.unwrap();
            outcome(
                chk == 0,
                format!(
                    "valid: ‖u‖={amp:.3} N=28 K={:.3} tau={:.3} δλ={:.3e} δx={:.3e}; check exit {chk}",
                    inv.k, inv.tau, r.delta_alpha, r.delta_x
                ),
            )
        }
        (3, _) if c.stage.is_some() => outcome(true, format!("invalid at stage {}", c.stage.unwrap())),
        _ => outcome(false, format!("validate exit {code}, status {}", c.status)),
    }
}

// 9 ------------------------------------------------------------------------

fn sweep_shape(dir: &Path, emitted: &mut Vec<PathBuf>) -> Outcome {
    let sol = dir.join("oned.json");
    let csv_path = dir.join("sweep.csv");
    let certs = dir.join("sweep");
    let (code, text) = okvalid(&[
        "sweep", "--in", s(&sol), "--param", "lambda", "--Nlist", "16,32,64,128,256,512", "--cert-dir", s(&certs), "--out",
        s(&csv_path),
    ]);
    if code != 0 {
        return outcome(false, format!("sweep exit {code}: {text}"));
    }
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<okvalid::commands::SweepRow> = rdr.deserialize().map(|r| r.unwrap()).collect();
    let ks: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.k.map(|k| (r.n, k))).collect();
    for r in rows.iter().filter(|r| r.status == "valid") {
        emitted.push(certs.join(format!("N{}.lambda.cert.json", r.n)));
    }
    if ks.len() < 3 {
        return outcome(false, format!("only {} certified rows", ks.len()));
    }
    let monotone = ks.windows(2).all(|w| w[1].1 <= w[0].1 * 1.05);
    let (na, ka) = ks[ks.len() - 2];
    let (nb, kb) = ks[ks.len() - 1];
    let last_change = (ka - kb).abs() / ka;
    let pass = monotone && nb == 2 * na && last_change < 0.02;
    let shape: Vec<String> = rows
        .iter()
        .map(|r| match r.k {
            Some(k) => format!("{}:{k:.3}", r.n),
            None => format!("{}:{}", r.n, r.status),
        })
        .collect();
    outcome(pass, format!("K by N [{}]; last doubling change {:.2}%", shape.join(" "), 100.0 * last_change))
}

// 10 -----------------------------------------------------------------------

fn recheck(emitted: &[PathBuf]) -> Outcome {
    let mut failed = Vec::new();
    for path in emitted {
        let (code, _) = okvalid(&["check", "--cert", s(path)]);
        if code != 0 {
            failed.push(path.display().to_string());
        }
    }
    // A certificate with δ_α inflated by 10% must be rejected.
    let mut tamper_rejected = false;
    if let Some(first) = emitted.first() {
        let mut c = CertificateFile::read(first).unwrap();
        if let Some(r) = c.radii.as_mut() {
            r.delta_alpha *= 1.1;
        }
        let bad = first.with_extension("tampered.json");
        c.write(&bad).unwrap();
        tamper_rejected = okvalid(&["check", "--cert", s(&bad)]).0 == 3;
    }
    outcome(
        !emitted.is_empty() && failed.is_empty() && tamper_rejected,
        format!(
            "{} of {} valid certificates re-verified; tampered copy rejected: {tamper_rejected}",
            emitted.len() - failed.len(),
            emitted.len()
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut emitted = Vec::new();
    let mut all_pass = true;
    let mut report = |id: usize, name: &str, limit_s: f64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs <= limit_s;
        all_pass &= pass;
        println!(
            "criterion {id:>2} {}: {name}: {} [{secs:.2}s, limit {limit_s}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    report(1, "embedding constants", 60.0, &mut embedding_constants);
    report(2, "interval containment", 10.0, &mut interval_containment);
    report(3, "spectral identities", 30.0, &mut spectral_identities);
    report(4, "Galerkin quadrature oracle", 60.0, &mut galerkin_oracle);
    report(5, "diagonal analytic case", 10.0, &mut diagonal_case);
    report(6, "inverse-bound necessary condition", 30.0, &mut inverse_necessary);
    report(7, "end-to-end 1-d validation", 300.0, &mut || end_to_end_1d(dir.path(), &mut emitted));
    report(8, "end-to-end 2-d smoke test", 1800.0, &mut || end_to_end_2d(dir.path(), &mut emitted));
    report(9, "sweep shape", 300.0, &mut || sweep_shape(dir.path(), &mut emitted));
    let emitted_now = emitted.clone();
    report(10, "certificate re-verification", 60.0, &mut || recheck(&emitted_now));
    if !all_pass {
        std::process::exit(1);
    }
}
