//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use tanaka_core::commands::{self, Config, Rendered};
use tanaka_core::fieldalg::{PointQ, Polynomial};
use tanaka_core::fintype::{self, char_variety, h0, theorem2_status, validate_witness, CharVarietyConfig, Theorem2Status, Verdict};
use tanaka_core::flag::{derived_flag, flag_at};
use tanaka_core::gnla::{free_gnla, gnla_at, hall_basis, witt_dim, Gnla};
use tanaka_core::linalg;
use tanaka_core::modelio::parse_model;
use tanaka_core::models::{self, cartan_jet, deprolongation_witness, goursat_test, jet_prolonged_field, monge, product_with_jets};
use tanaka_core::prolong::{tanaka_prolongation, Prolongation};
use tanaka_core::symcheck::{self, closure, filtration_degree, graded_symbol, is_symmetry, psi, psi_ranges_hold, FiltrationDegree};
use tanaka_core::Exec;

const EXEC: Exec = Exec::Parallel;

fn e13_symbol() -> (tanaka_core::flag::DerivedFlag, PointQ, Prolongation) {
    let (jm, _) = models::e13_with_symmetries().unwrap();
    let df = derived_flag(&jm.frame(), 16).unwrap();
    let o = PointQ::origin(jm.chart());
    let g = gnla_at(&df, &o, EXEC).unwrap();
    let pro = tanaka_prolongation(&g, 10).unwrap();
    (df, o, pro)
}

fn criterion_1() {
    let (jm, sym) = models::e13_with_symmetries().unwrap();
    let (df, o, pro) = e13_symbol();
    assert_eq!(flag_at(&df, &o).unwrap().growth, vec![2, 1, 2, 1]);
    assert_eq!(pro.dims(), vec![3, 2, 0]);
    assert_eq!(pro.total_dim(), Some(11));
    assert_eq!(sym.len(), 11);
    let frame = jm.frame();
    for g in &sym {
        assert!(is_symmetry(&g.field, &frame).unwrap(), "{} is not a symmetry", g.name);
    }
    let fields: Vec<_> = sym.iter().map(|g| g.field.clone()).collect();
    let alg = closure(&fields, &frame, EXEC).unwrap();
    assert!(alg.closed, "closure offending {:?}", alg.offending);
    assert_eq!(alg.dim(), 11);
    assert!(alg.jacobi_holds());
    // per-grade counts against the computed graded dimensions
    let m = pro.gnla().dims();
    for grade in -4i64..=2 {
        let count = sym.iter().filter(|g| g.grade == grade).count();
        let dim = if grade < 0 { m.get((-grade - 1) as usize).copied().unwrap_or(0) } else { pro.dims()[grade as usize] };
        assert_eq!(count, dim, "grade {grade}");
    }
    let report = commands::cmd_analyze(&jm.model, None, &Config { probe_samples: 2, ..Config::default() }).unwrap();
    assert_eq!(report.theorem1_bound, Some(alg.dim()));
}

/// Lyndon words of length `k` over `n` letters (Duval's generation).
fn lyndon_count(n: usize, k: usize) -> usize {
    let mut w: Vec<usize> = vec![0];
    let mut count = 0;
    while !w.is_empty() {
        if w.len() == k {
            count += 1;
        }
        let m = w.len();
        while w.len() < k {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == n - 1 {
                w.pop();
            } else {
                break;
            }
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    count
}

fn criterion_2() {
    for n in 1..=4usize {
        for k in 1..=6usize {
            let hall = hall_basis(n, k).iter().filter(|(_, w)| *w == k).count();
            assert_eq!(witt_dim(n as u32, k as u32), hall as u128, "n={n} k={k}");
            assert_eq!(hall, lyndon_count(n, k), "n={n} k={k}");
        }
    }
    let total = |n, k| tanaka_prolongation(&free_gnla(n, k).unwrap(), 10).unwrap();
    for (n, k, want) in [(3, 2, 21), (4, 2, 36), (2, 3, 14)] {
        let p = total(n, k);
        assert_eq!(p.total_dim(), Some(want), "free({n},{k})");
        assert_eq!(p.dims()[0], n * n);
        assert_eq!(Some(want as u128), fintype::symmetry_bound_free(n as u32, k as u32));
    }
    for (n, k) in [(3, 3), (2, 4)] {
        let p = tanaka_prolongation(&free_gnla(n, k).unwrap(), 3).unwrap();
        assert_eq!(p.dims()[0], n * n, "g0 of free({n},{k})");
        assert_eq!(p.dims()[1], 0, "g1 of free({n},{k})");
        assert!(p.terminated());
    }
}

fn cv_of(a: &Gnla, max_degree: usize) -> (Prolongation, fintype::H0Subspace, tanaka_core::fintype::CharVarietyVerdict) {
    let pro = tanaka_prolongation(a, max_degree).unwrap();
    let h = h0(&pro);
    let v = char_variety(&h, &CharVarietyConfig::default());
    (pro, h, v)
}

fn symbol_of(m: &tanaka_core::Model) -> Gnla {
    let df = derived_flag(&m.frame(), 16).unwrap();
    gnla_at(&df, &PointQ::origin(m.chart()), EXEC).unwrap()
}

fn criterion_3() {
    let heis = parse_model("coords x y z\nfield X = d/dx\nfield Y = d/dy + x d/dz\ndistribution D = [X, Y]").unwrap();
    let cases = [
        ("e13", symbol_of(&monge(1, 3).unwrap().model), Verdict::Empty),
        ("heisenberg", symbol_of(&heis), Verdict::Nonempty),
        ("goursat (2,1,1)", symbol_of(&cartan_jet(2).unwrap().model), Verdict::Nonempty),
        ("free(3,2)", free_gnla(3, 2).unwrap(), Verdict::Empty),
        ("free(2,3)", free_gnla(2, 3).unwrap(), Verdict::Empty),
    ];
    assert_eq!(cases[2].1.dims(), &[2, 1, 1]);
    for (name, a, want) in &cases {
        let (pro, h, v) = cv_of(a, 6);
        if *name == "e13" {
            assert_eq!(h.dim(), 0);
        }
        assert_eq!(v.verdict, *want, "{name}");
        if v.verdict == Verdict::Nonempty {
            let (p, q) = (v.witness_p.as_ref().unwrap(), v.witness_q.as_ref().unwrap());
            assert!(validate_witness(&h, p, q), "{name} witness");
            assert!(!pro.terminated(), "{name}: nonempty variety with terminated prolongation");
        }
        if v.verdict == Verdict::Empty {
            assert!(pro.terminated(), "{name}: empty variety with capped prolongation");
        }
    }
}

fn criterion_4() {
    let finite: [&[usize]; 4] = [&[3, 3], &[4, 5], &[4, 6], &[2, 1, 2]];
    let inconclusive: [&[usize]; 7] = [&[2, 1, 1], &[3, 1], &[3, 2], &[4, 1], &[4, 2], &[4, 3], &[4, 4]];
    for g in finite {
        assert_eq!(theorem2_status(g), Theorem2Status::Finite, "{g:?}");
    }
    for g in inconclusive {
        assert_eq!(theorem2_status(g), Theorem2Status::Inconclusive, "{g:?}");
    }
    // longer vectors read only the leading entries
    assert_eq!(theorem2_status(&[2, 1, 2, 1]), Theorem2Status::Finite);
    assert_eq!(theorem2_status(&[3, 2, 1]), Theorem2Status::Inconclusive);
}

fn criterion_5() {
    let jm = product_with_jets(&monge(1, 3).unwrap(), 2).unwrap();
    let w = Polynomial::var(jm.chart(), jm.chart().index_of("w").unwrap());
    let frame = jm.frame();
    let mut fields = Vec::new();
    for e in 0..=3 {
        let f = jet_prolonged_field(&jm, &w.pow(e)).unwrap();
        assert!(is_symmetry(&f, &frame).unwrap(), "f = w^{e}");
        fields.push(f);
    }
    let alg = closure(&fields, &frame, EXEC).unwrap();
    assert_eq!(alg.rank, 4);
    for k in 1..=6 {
        let c = cartan_jet(k).unwrap();
        let df = derived_flag(&c.frame(), 16).unwrap();
        let o = PointQ::origin(c.chart());
        assert!(goursat_test(&df, &o).unwrap(), "C_{k}");
        let wit = deprolongation_witness(&df, &o, EXEC).unwrap().unwrap_or_else(|| panic!("C_{k} witness"));
        assert_eq!(wit.length_two, k == 1);
        let delta: Vec<Vec<_>> = c.frame().iter().map(|f| tanaka_core::fieldalg::evaluate(f, &o).unwrap()).collect();
        assert!(linalg::solve_in_span(&delta, &wit.direction).is_some());
    }
    let e = monge(1, 3).unwrap();
    let df = derived_flag(&e.frame(), 16).unwrap();
    let o = PointQ::origin(e.chart());
    assert!(!goursat_test(&df, &o).unwrap());
    assert!(deprolongation_witness(&df, &o, EXEC).unwrap().is_none());
}

fn criterion_6() {
    let (_, sym) = models::e13_with_symmetries().unwrap();
    let (df, o, pro) = e13_symbol();
    let fp = flag_at(&df, &o).unwrap();
    let frame = df.frame().to_vec();
    let delta: Vec<Vec<_>> = fp.basis_of(1).to_vec();
    for g in &sym {
        let d = filtration_degree(&g.field, &df, &o, symcheck::DEFAULT_FILTRATION_CAP, EXEC).unwrap();
        assert_eq!(d, FiltrationDegree::Exact(g.grade), "{}", g.name);
        let i = g.grade;
        if i >= 0 {
            // Ψ^{i+1} on frame tuples lies in Δ
            let len = (i + 1) as usize;
            let mut tuples: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..len {
                tuples = tuples.into_iter().flat_map(|t| (0..frame.len()).map(move |a| [t.clone(), vec![a]].concat())).collect();
            }
            for t in tuples {
                let args: Vec<_> = t.iter().map(|&a| frame[a].clone()).collect();
                let v = psi(&g.field, &args, &o).unwrap();
                assert!(linalg::solve_in_span(&delta, &v).is_some(), "{} Ψ{t:?}", g.name);
            }
        }
        // ranges on deeper flag levels
        for j in 1..=3 {
            assert!(psi_ranges_hold(&g.field, i, &df, &o, j, EXEC).unwrap(), "{} j={j}", g.name);
        }
        let s = graded_symbol(&g.field, &df, &pro, &o, EXEC).unwrap();
        if i >= 0 {
            assert!(s.certificate.is_some(), "{} certificate", g.name);
        } else {
            assert!(s.class.as_ref().is_some_and(|c| !linalg::is_zero_vec(c)), "{} class", g.name);
        }
    }
    // degrees add under brackets; the symbol map is a homomorphism
    for a in &sym {
        for b in &sym {
            let br = tanaka_core::fieldalg::lie_bracket(&a.field, &b.field).unwrap();
            match filtration_degree(&br, &df, &o, symcheck::DEFAULT_FILTRATION_CAP, EXEC).unwrap() {
                FiltrationDegree::Exact(d) => assert!(d >= a.grade + b.grade, "[{}, {}]", a.name, b.name),
                FiltrationDegree::AtLeast(_) => {}
            }
            let hom = symcheck::symbol_of_bracket_matches(&a.field, &b.field, &df, &pro, &o, EXEC).unwrap();
            assert_eq!(hom, Some(true), "symbol of [{}, {}]", a.name, b.name);
        }
    }
    assert_eq!(Some(sym.len()), pro.total_dim());
}

fn criterion_7() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/e13.tk")).unwrap();
    let model = parse_model(&text).unwrap();
    let cfg = Config { seed: 7, probe_samples: 3, ..Config::default() };
    let a = commands::cmd_analyze(&model, None, &cfg).unwrap().json();
    let b = commands::cmd_analyze(&model, None, &cfg).unwrap().json();
    assert_eq!(a, b);
    let seq = commands::cmd_analyze(&model, None, &Config { exec: Exec::Sequential, ..cfg.clone() }).unwrap().json();
    assert_eq!(a, seq);
    assert!(a.contains("\"seed\": 7"));
}

fn main() {
    let criteria: [(&str, fn()); 7] = [
        ("E13 end-to-end: growth, Tanaka dims 3,2,0, 11 symmetries, closed algebra", criterion_1),
        ("free algebras: Witt vs Hall, totals 21/36/14, g1 = 0, g0 = n^2", criterion_2),
        ("characteristic variety verdicts and cross-invariants", criterion_3),
        ("growth-vector finiteness classifier table", criterion_4),
        ("infinite families: f(w) prolongations, Goursat and de-prolongation", criterion_5),
        ("Psi-map lemmas and graded symbol certificates on E13", criterion_6),
        ("determinism of analyze JSON", criterion_7),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name} ({:.2?})", i + 1, t.elapsed());
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
