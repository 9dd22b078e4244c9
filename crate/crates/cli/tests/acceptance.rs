//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use ncpot::domain::FreeDomain;
use ncpot::matcore::random::{random_direction, random_tuple, upper_unipotent};
use ncpot::potential::{
    build_potential, line_integral, pair_constants, path_independence_test, triple_consistency,
    validate_potential, BetaEngine, ConstantStore, PotentialConfig, QuadratureConfig, SmoothPath,
};
use ncpot::{CMatrix, Complex64, DemiPoly, DemilinearMap, FreeMap, MatrixTuple, NcPoly, SeedStream};
use rand::Rng;

struct Outcome {
    pass: bool,
    summary: String,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn derivative(f: &NcPoly) -> DemilinearMap {
    DemilinearMap::from_poly(f.formal_derivative())
}

fn c1_clairaut() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedStream::new(1).labeled("clairaut").rng();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let g = 1 + i % 3;
        let f = NcPoly::random(g, 1, 4, 6, &mut rng);
        let t = derivative(&f);
        for p in 0..5 {
            let n = 1 + (i + p) % 4;
            let x = random_tuple(g, n, 1.0 / (n as f64).sqrt(), &mut rng);
            let h = random_direction(g, n, &mut rng);
            let k = random_direction(g, n, &mut rng);
            let scale = x.frobenius_norm() + h.frobenius_norm() + k.frobenius_norm();
            let curl = t.free_curl(&x, &h, &k).expect("curl evaluates");
            worst = worst.max(curl.frobenius_norm() / (1.0 + scale));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-9 && secs < 60.0,
        summary: format!(
            "Clairaut suite: max ||curl||/(1+scale) = {worst:.2e} (limit 1e-9), {secs:.1} s (limit 60 s)"
        ),
    }
}

fn c2_counterexamples() -> Outcome {
    let comm = DemiPoly::parse("x1*h1 - h1*x1", 1, 1).unwrap();
    let mixed = DemiPoly::parse("x1*h2 - h1*x2", 2, 1).unwrap();
    let r = comm.antiderivative();
    let witness_ok = r.witness.as_ref().is_some_and(|w| {
        let mut coeffs: Vec<f64> = w.coefficients.iter().map(|z| z.re).collect();
        coeffs.sort_by(f64::total_cmp);
        w.word == "x1^2" && coeffs == [-1.0, 1.0] && w.coefficients.iter().all(|z| z.im == 0.0)
    });
    let mixed_rejected = !mixed.is_exact();
    let mut rng = SeedStream::new(2).labeled("counterexamples").rng();
    let mut curl_norms = Vec::new();
    for (t, g) in [(comm.clone(), 1), (mixed.clone(), 2)] {
        let r = DemilinearMap::from_poly(t)
            .curl_free_test(&FreeDomain::full(g), &[2], 20, &mut rng, 1e-8)
            .unwrap();
        let w = r.worst_point.as_ref().map(|w| w.curl.frobenius_norm()).unwrap_or(0.0);
        curl_norms.push(if r.curl_free { 0.0 } else { w });
    }
    Outcome {
        pass: !r.exact && witness_ok && mixed_rejected && curl_norms.iter().all(|&v| v > 1e-3),
        summary: format!(
            "counterexamples: commutator witness x1^2 [+1, -1] {}, mixed rejected {}, n=2 curl witness norms {:.3} and {:.3}",
            if witness_ok { "found" } else { "missing" },
            mixed_rejected,
            curl_norms[0],
            curl_norms[1]
        ),
    }
}

fn c3_round_trip() -> Outcome {
    let mut rng = SeedStream::new(3).labeled("round-trip").rng();
    let mut mismatches = 0;
    for i in 0..100 {
        let g = 1 + i % 3;
        let h = 1 + i % 2;
        let f = NcPoly::random(g, h, 5, 8, &mut rng);
        let back = f.formal_derivative().antiderivative();
        if !back.exact || back.potential.as_ref() != Some(&f.without_constant()) {
            mismatches += 1;
        }
    }
    Outcome {
        pass: mismatches == 0,
        summary: format!("symbolic round trip: {mismatches}/100 mismatches (tolerance 0)"),
    }
}

fn mixed_instance<R: Rng>(i: usize, rng: &mut R) -> DemiPoly {
    let g = 1 + i % 3;
    match i % 4 {
        0 | 1 => NcPoly::random(g, 1, 4, 5, rng).formal_derivative(),
        2 => DemiPoly::random(g, 1, 4, 4, rng),
        _ => {
            // An exact map plus a small non-exact perturbation.
            let exact = NcPoly::random(g, 1, 3, 4, rng).formal_derivative();
            let j = rng.random_range(1..=g);
            let text = format!("x{j}*h{j} - h{j}*x{j}");
            let bump = DemiPoly::parse(&text, g, 1).unwrap().scale(c(1e-3));
            exact.checked_add(&bump).unwrap()
        }
    }
}

fn c4_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedStream::new(4).labeled("oracles").rng();
    let mut agree = 0;
    let mut exact_count = 0;
    for i in 0..100 {
        let t = mixed_instance(i, &mut rng);
        let g = t.g();
        let symbolic = t.is_exact();
        exact_count += symbolic as usize;
        let numeric = DemilinearMap::from_poly(t)
            .curl_free_test(&FreeDomain::full(g), &[2, 3], 50, &mut rng, 1e-8)
            .unwrap()
            .curl_free;
        agree += (symbolic == numeric) as usize;
    }
    Outcome {
        pass: agree == 100,
        summary: format!(
            "symbolic/numeric agreement: {agree}/100 ({exact_count} exact instances), {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    }
}

/// Brute-force circulation of `T = X₁H₁ − H₁X₁` around a closed polygon:
/// trapezoid rule on each straight edge at uniform speed.
fn trapezoid_circulation(vertices: &[CMatrix], steps: usize) -> CMatrix {
    let n = vertices[0].dim();
    let mut acc = CMatrix::zeros(n);
    for j in 0..vertices.len() {
        let a = &vertices[j];
        let b = &vertices[(j + 1) % vertices.len()];
        let d = b + &a.scale(c(-1.0));
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let w = if s == 0 || s == steps { 0.5 } else { 1.0 } / steps as f64;
            let mut p = a.clone();
            p.add_scaled(c(t), &d);
            let integrand = &(&p * &d) + &(&d * &p).scale(c(-1.0));
            acc.add_scaled(c(w), &integrand);
        }
    }
    acc
}

fn c5_path_independence() -> Outcome {
    let q = QuadratureConfig::default();
    let mut rng = SeedStream::new(5).labeled("paths").rng();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g = 1 + i % 2;
        let n = 1 + i % 3;
        let t = derivative(&NcPoly::random(g, 1, 4, 6, &mut rng));
        let a = random_tuple(g, n, 0.6, &mut rng);
        let b = random_tuple(g, n, 0.6, &mut rng);
        let ctrl = random_tuple(g, n, 0.6, &mut rng);
        let seg = SmoothPath::segment(a.clone(), b.clone()).unwrap();
        let arc = SmoothPath::bezier(a, ctrl, b).unwrap();
        let r = path_independence_test(&t, &seg, &arc, &q, 1e-8).unwrap();
        worst = worst.max(r.residual);
    }

    let base = CMatrix::from_row_major(2, vec![c(0.3), c(0.1), c(0.2), c(-0.4)]).unwrap();
    let shifts = [
        CMatrix::zeros(2),
        CMatrix::unit(2, 0, 1),
        &CMatrix::unit(2, 0, 1) + &CMatrix::unit(2, 1, 0),
        CMatrix::unit(2, 1, 0),
    ];
    let vertices: Vec<CMatrix> = shifts.iter().map(|s| &base + s).collect();
    let commutator = DemilinearMap::from_poly(DemiPoly::parse("x1*h1 - h1*x1", 1, 1).unwrap());
    let tuple = |m: &CMatrix| MatrixTuple::new(vec![m.clone()]).unwrap();
    let closed = SmoothPath::closed_polyline(vertices.iter().map(tuple).collect()).unwrap();
    let circulation = line_integral(&commutator, &closed, &q).unwrap().value;
    let oracle = trapezoid_circulation(&vertices, 2000);
    let circ = circulation.frobenius_norm();
    let oracle_gap = circulation.component(0).dist(&oracle);
    // Recorded regression value: 2(E11 − E22), norm 2√2.
    let recorded = 2.0 * std::f64::consts::SQRT_2;
    let sides = path_independence_test(
        &commutator,
        &SmoothPath::polyline(vertices[..3].iter().map(tuple).collect()).unwrap(),
        &SmoothPath::polyline(vec![tuple(&vertices[0]), tuple(&vertices[3]), tuple(&vertices[2])]).unwrap(),
        &q,
        1e-8,
    )
    .unwrap();
    Outcome {
        pass: worst <= 1e-8
            && circ > 0.05
            && oracle_gap <= 1e-8
            && (circ - recorded).abs() <= 1e-8
            && sides.residual > 0.05,
        summary: format!(
            "path independence: exact max residual {worst:.2e} (limit 1e-8); commutator circulation {circ:.6} (recorded {recorded:.6}, oracle gap {oracle_gap:.1e}, limit > 0.05), two-sides residual {:.4}",
            sides.residual
        ),
    }
}

fn random_path<R: Rng>(kind: usize, g: usize, n: usize, rng: &mut R) -> SmoothPath {
    let a = random_tuple(g, n, 0.5, rng);
    let b = random_tuple(g, n, 0.5, rng);
    let m = random_tuple(g, n, 0.5, rng);
    match kind {
        0 => SmoothPath::segment(a, b).unwrap(),
        1 => SmoothPath::bezier(a, m, b).unwrap(),
        2 => SmoothPath::polyline(vec![a, m, b]).unwrap(),
        _ => {
            let b2 = b.clone();
            SmoothPath::parametric(
                g,
                n,
                Arc::new(move |t| a.add_scaled(c((3.0 * t).sin()), &b)),
                Arc::new(move |t| b2.scale(c(3.0 * (3.0 * t).cos()))),
            )
            .unwrap()
        }
    }
}

fn c6_ftc() -> Outcome {
    let q = QuadratureConfig::default();
    let mut rng = SeedStream::new(6).labeled("ftc").rng();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g = 1 + i % 2;
        let n = 1 + i % 3;
        let alpha = NcPoly::random(g, 1, 4, 6, &mut rng);
        let path = random_path(i % 4, g, n, &mut rng);
        let integral = line_integral(&derivative(&alpha), &path, &q).unwrap();
        let exact = &alpha.eval(&path.end()).unwrap() - &alpha.eval(&path.start()).unwrap();
        worst = worst.max(integral.value.dist(&exact));
    }
    let limit = 3.0 * q.abs_tol;
    Outcome {
        pass: worst <= limit,
        summary: format!("FTC identity: max error {worst:.2e} (limit {limit:.1e})"),
    }
}

fn c7_reconstruction() -> Outcome {
    let start = Instant::now();
    let config = PotentialConfig {
        samples: 2000,
        seed: 42,
        ..PotentialConfig::default()
    };
    let mut rng = SeedStream::new(42).labeled("reconstruction").rng();
    let mut deriv: f64 = 0.0;
    let mut equiv: f64 = 0.0;
    let mut offset: f64 = 0.0;
    for g in [1, 2] {
        let f = NcPoly::random(g, 1, 3, 5, &mut rng);
        let t = derivative(&f);
        let dom = FreeDomain::ball(2.0, vec![c(0.0); g]).unwrap();
        let fhat = Arc::new(build_potential(&t, &dom, &[1, 2, 3], config).unwrap());
        let v = validate_potential(&fhat, &t, 3, &mut rng, 1e-4).unwrap();
        deriv = deriv.max(v.derivative_residual);
        equiv = equiv.max(v.direct_sum_residual).max(v.similarity_residual);
        let o = fhat.offset_against(&FreeMap::from_poly(f), 3, &mut rng).unwrap();
        offset = offset.max(o.non_scalar_residual).max(o.spread);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: deriv <= 1e-4 && equiv <= 1e-4 && offset <= 1e-4 && secs < 300.0,
        summary: format!(
            "reconstruction: derivative {deriv:.2e}, direct-sum/unitary {equiv:.2e}, offset deviation {offset:.2e} (limits 1e-4), {secs:.1} s (limit 300 s)"
        ),
    }
}

fn c8_monte_carlo_scaling() -> Outcome {
    let start = Instant::now();
    let f = NcPoly::parse("x1^2 + x1*x2", 2, 1).unwrap();
    let t = derivative(&f);
    let z = MatrixTuple::new(vec![
        CMatrix::diag(&[c(1.0), c(0.0), c(-0.5)]),
        &CMatrix::unit(3, 0, 2) + &CMatrix::unit(3, 1, 0),
    ])
    .unwrap();
    let dom = FreeDomain::full(2).with_anchor(z).unwrap();
    let mut rng = SeedStream::new(8).labeled("scaling").rng();
    let x = random_tuple(2, 3, 0.6, &mut rng);
    let s = upper_unipotent(3, 100.0, &mut rng);
    let mut ratios = Vec::new();
    for seed in 0..10u64 {
        let residual = |samples: usize, seed: u64| {
            let config = PotentialConfig {
                samples,
                seed,
                ..PotentialConfig::default()
            };
            BetaEngine::new(t.clone(), dom.clone(), config)
                .unwrap()
                .similarity_residual(&x, &s)
                .unwrap()
        };
        ratios.push(residual(8000, 1000 + seed) / residual(2000, seed));
    }
    ratios.sort_by(f64::total_cmp);
    let median = 0.5 * (ratios[4] + ratios[5]);
    Outcome {
        pass: (0.35..=0.7).contains(&median),
        summary: format!(
            "Monte-Carlo scaling: median residual ratio M=8000/M=2000 = {median:.3} (range [0.35, 0.7]), {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    }
}

fn c9_constants() -> Outcome {
    let samples = 2000;
    let tol = 1e-3 + 5.0 / (samples as f64).sqrt();
    let t = DemilinearMap::from_poly(DemiPoly::parse("h1", 1, 1).unwrap());
    let mut rng = SeedStream::new(9).labeled("constants").rng();
    let mut ok = true;
    let mut parts = Vec::new();
    for (z2, expect) in [([0.0, 4.0], 0.0), ([0.0, 0.0], 2.0)] {
        let dom = FreeDomain::full(1)
            .with_anchor(MatrixTuple::scalars(1, &[c(2.0)]))
            .unwrap()
            .with_anchor(MatrixTuple::new(vec![CMatrix::diag(&[c(z2[0]), c(z2[1])])]).unwrap())
            .unwrap();
        let config = PotentialConfig {
            samples,
            ..PotentialConfig::default()
        };
        let engine = BetaEngine::new(t.clone(), dom, config).unwrap();
        let p = pair_constants(&engine, 1, 1, &mut rng).unwrap();
        let err = (p.c_m[0] - c(expect)).norm().max((p.c_n[0] - c(expect)).norm());
        ok &= err <= tol;
        parts.push(format!("c^1_2 = {:.4} (expected {expect})", p.c_m[0].re));
        let mut store = ConstantStore::default();
        store.insert(p);
        for triple in [(1, 1, 1), (1, 1, 2)] {
            let r = triple_consistency(&engine, &mut store, triple, &mut rng).unwrap();
            ok &= r.holds;
            parts.push(format!("triple {triple:?} residual {:.1e} (tol {:.1e})", r.residual, r.tolerance));
        }
    }
    Outcome {
        pass: ok,
        summary: format!("constants algebra: {} (pair tol {tol:.3})", parts.join(", ")),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("C1", c1_clairaut),
        ("C2", c2_counterexamples),
        ("C3", c3_round_trip),
        ("C4", c4_oracle_agreement),
        ("C5", c5_path_independence),
        ("C6", c6_ftc),
        ("C7", c7_reconstruction),
        ("C8", c8_monte_carlo_scaling),
        ("C9", c9_constants),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name} {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
        failed += (!o.pass) as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
