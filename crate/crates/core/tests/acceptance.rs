//! Acceptance run at default settings. Prints one line per criterion to
//! stderr (uncaptured) and fails if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use fluxlab::circle::chi_words;
use fluxlab::cochain::{
    all_pairs, all_triples, connection_curvature_basic, element_order, extension_from_cocycle, ConnectionCochain,
    CyclicGroup, ExtElem, FiniteCoefficient, FiniteGroup, GroupCochain, ZMod,
};
use fluxlab::geometry::QuadratureSpec;
use fluxlab::invariants::convergence::{default_ladder, identity_convergence};
use fluxlab::invariants::generators::{word_pool, Subgroup};
use fluxlab::invariants::identities::{
    check_all, check_identity, convergence_instances, CheckConfig, IdentityId, IdentityReport, Verdict,
};
use fluxlab::invariants::model::FluxExtensionModel;
use fluxlab::invariants::report::{Environment, Report};
use fluxlab::invariants::{calabi, flux, ilm_c, PathStrategy};
use fluxlab::maps::{make_twist, symplectic_residual, TwistSpec};
use fluxlab::MapWord64;

struct Ledger {
    lines: Vec<(u32, bool, String)>,
}

impl Ledger {
    fn record(&mut self, n: u32, ok: bool, detail: String) {
        let line = format!("criterion {n:>2}: {}  {detail}\n", if ok { "PASS" } else { "FAIL" });
        // Written directly so the harness does not capture it.
        let _ = std::io::stderr().lock().write_all(line.as_bytes());
        self.lines.push((n, ok, detail));
    }
}

fn passes(r: &IdentityReport, bound: f64, min_n: usize) -> bool {
    r.verdict == Verdict::Pass && r.n >= min_n && r.max_residual.is_some_and(|m| m <= bound)
}

fn summary(r: &IdentityReport) -> String {
    format!("{} {:?} n={} max={:.2e}", r.id, r.verdict, r.n, r.max_residual.unwrap_or(f64::NAN))
}

fn twist(s: f64) -> MapWord64 {
    make_twist(&TwistSpec { m: 1, poly_r2: vec![s], exp: 1 }).unwrap()
}

#[test]
fn acceptance_criteria() {
    let cfg = CheckConfig::default();
    let q = cfg.quadrature;
    let started = std::time::Instant::now();
    let reports = check_all(IdentityId::ALL, &cfg);
    let by_id: BTreeMap<IdentityId, IdentityReport> = reports.iter().map(|r| (r.id, r.clone())).collect();
    let get = |id: IdentityId| &by_id[&id];
    let mut l = Ledger { lines: Vec::new() };

    // 1
    let r = get(IdentityId::TauEuler);
    l.record(1, passes(r, 1e-7, 20), summary(r));

    // 2
    let (a, b) = (get(IdentityId::TauConnection), get(IdentityId::FluxConjugation));
    l.record(2, passes(a, 1e-8, 20) && passes(b, 1e-8, 20), format!("{}; {}", summary(a), summary(b)));

    // 3: analytic oracle −s/4 for β(u) = s(1 − u).
    let mut worst = 0.0f64;
    let f1 = flux(&twist(1.0), &q).unwrap().value;
    for s in [0.5, 1.0, 2.0, -1.0] {
        let f = flux(&twist(s), &q).unwrap().value;
        worst = worst.max((f + s / 4.0).abs()).max((f - s * f1).abs());
    }
    let lin = get(IdentityId::FluxLinear);
    l.record(
        3,
        worst <= 1e-10 && passes(lin, 1e-10, 4),
        format!("max |flux + s/4| or linearity {worst:.2e}; {}", summary(lin)),
    );

    // 4
    let r = get(IdentityId::IlmCocycle);
    let strat = r.notes.get("max_strategy_difference").copied().unwrap_or(f64::NAN);
    l.record(4, passes(r, 1e-7, 10) && strat <= 1e-7, format!("{}; strategy difference {strat:.2e}", summary(r)));

    // 5: C = −δτ on G from the suite; C = πχ on H recomputed here with the Euler cocycle as oracle.
    let r = get(IdentityId::IlmEqTau);
    let h = word_pool(cfg.seed ^ 0x5, Subgroup::H, 40).unwrap();
    let mut worst = 0.0f64;
    for (g, k) in h[..20].iter().zip(&h[20..]) {
        let c = ilm_c(g, k, PathStrategy::Chord, &q).unwrap().value;
        worst = worst.max((c - PI * chi_words(g, k).unwrap()).abs());
    }
    l.record(5, passes(r, 1e-7, 20) && worst <= 1e-7, format!("{}; max |C − πχ| on H {worst:.2e}", summary(r)));

    // 6
    let r = get(IdentityId::ZigzagDk);
    let fd = r.notes.get("max_fd_gradient_error").copied().unwrap_or(f64::NAN);
    l.record(
        6,
        passes(r, 1e-7, 20) && fd <= 1e-5,
        format!("{}; finite-difference gradient error {fd:.2e}", summary(r)),
    );

    // 7
    let (a, b) = (get(IdentityId::X0Indep), get(IdentityId::EtaIndep));
    l.record(7, passes(a, 1e-7, 10) && passes(b, 1e-7, 10), format!("{}; {}", summary(a), summary(b)));

    // 8: twist Calabi against the analytic oracle −πs/6.
    let mut cal_worst = 0.0f64;
    for s in [0.5, 1.0, -1.0] {
        let v = calabi(&twist(s), &cfg.area_quadrature.with_target(1e-10)).unwrap().value;
        cal_worst = cal_worst.max((v + PI * s / 6.0).abs());
    }
    let block = [
        (IdentityId::CalHom, 1e-7),
        (IdentityId::Stokes, 1e-6),
        (IdentityId::KappaRel, 1e-7),
        (IdentityId::TauPrimeRel, 1e-6),
        (IdentityId::TauPrimeCurvature, 1e-6),
        (IdentityId::MixedHomomorphism, 1e-6),
    ];
    let ok = cal_worst <= 1e-8 && block.iter().all(|(id, b)| passes(get(*id), *b, 20));
    let detail: Vec<String> = block.iter().map(|(id, _)| summary(get(*id))).collect();
    l.record(8, ok, format!("max |Cal + πs/6| {cal_worst:.2e}; {}", detail.join("; ")));

    // 9
    let r = get(IdentityId::TauBound);
    let dt = r.notes["max_abs_delta_tau"];
    let chi = r.notes["max_abs_chi"];
    l.record(
        9,
        r.verdict == Verdict::Pass && dt <= PI + 1e-6 && chi < 1.0,
        format!("max |δτ| {dt:.4}, max |χ| {chi:.4}"),
    );

    // 10: ℤ/4 from the carry cocycle on ℤ/2, curvature extraction, and the G/K model.
    let carry =
        GroupCochain::<ZMod<2>, ZMod<2>>::from_fn2(|g: &ZMod<2>, h: &ZMod<2>| Ok(ZMod((g.0 == 1 && h.0 == 1) as u64)));
    let z2 = CyclicGroup::<2>;
    let ext = extension_from_cocycle(z2, carry.clone(), &all_triples(&z2), 0.0).unwrap();
    let gen = ExtElem { g: ZMod(1), a: ZMod(0) };
    let z4 = ext.elements().len() == 4 && element_order(&ext, &gen, 8).unwrap() == Some(4);
    let curv = connection_curvature_basic(
        &ext,
        &ConnectionCochain::fiber_coordinate(),
        &all_pairs(&z2),
        &ZMod::<2>::all(),
        0.0,
    )
    .unwrap();
    let exhaustive = all_pairs(&z2).into_iter().all(|(g, h)| {
        let s = carry.eval(&[g, h]).unwrap();
        curv.eval(&[g, h]).unwrap() == ZMod::<2>::new(-(s.0 as i64))
    });
    let model = FluxExtensionModel::new(q);
    let mext = model.extension();
    let gw = word_pool(cfg.seed ^ 0xA, Subgroup::G, 8).unwrap();
    let gpairs: Vec<_> = gw[..4].iter().cloned().zip(gw[4..].iter().cloned()).collect();
    let mc =
        connection_curvature_basic(&mext, &FluxExtensionModel::tau_bar(), &gpairs, &[0.0, 0.3, -1.1], 1e-10).unwrap();
    let mut model_worst = 0.0f64;
    for (g, h) in &gpairs {
        let pchi = PI * chi_words(g, h).unwrap();
        model_worst = model_worst.max((mc.eval(&[g.clone(), h.clone()]).unwrap() + pchi).abs());
        model_worst = model_worst.max((model.realized_curvature(g, h, 0.25, -0.4).unwrap() + pchi).abs());
    }
    let thm_a = get(IdentityId::FluxExtension);
    l.record(
        10,
        z4 && exhaustive && model_worst <= 1e-8 && passes(thm_a, 1e-8, 20),
        format!("ℤ/4 {z4}, curvature = −σ exhaustively {exhaustive}, model max {model_worst:.2e}; {}", summary(thm_a)),
    );

    // 11
    let r = get(IdentityId::IlmBasic);
    let neg = r.notes["negative_control_residual"];
    l.record(11, passes(r, 1e-7, 20) && neg >= 1e-2, format!("{}; negative control {neg:.3}", summary(r)));

    // 12: complete, reproducible report with the sign findings in its ledger.
    let r = get(IdentityId::SignAudit);
    let report = Report::new(reports.clone(), Environment::from_config(&cfg));
    let again = check_identity(IdentityId::SignAudit, &cfg);
    let reproducible = serde_json::to_string(&again).unwrap() == serde_json::to_string(r).unwrap();
    let keys = ["fit_a", "fit_b", "minus_pi2_chi_holds", "cited_holds"];
    let complete = keys.iter().all(|k| r.notes.contains_key(*k)) && !report.conventions.findings.is_empty();
    l.record(
        12,
        passes(r, 1e-5, 20) && complete && reproducible,
        format!(
            "fit a/π² = {:.10}, −π²χ holds {}, cited holds {}, reproducible {reproducible}, findings {}",
            r.notes["fit_a"] / (PI * PI),
            r.notes["minus_pi2_chi_holds"],
            r.notes["cited_holds"],
            report.conventions.findings.len()
        ),
    );

    // 13: integrator hygiene and quadrature ladders.
    let mut sym_ok = true;
    let mut sym_worst = 0.0f64;
    for sg in [Subgroup::G, Subgroup::H, Subgroup::HRel] {
        for w in word_pool(cfg.seed, sg, 6).unwrap().into_iter().filter(|w| w.has_flows()) {
            let r1 = symplectic_residual(&w, 64, 7).unwrap();
            let r2 = symplectic_residual(&w.with_step_scale(2), 64, 7).unwrap();
            sym_worst = sym_worst.max(r1);
            sym_ok &= r1 <= 1e-9 && r2 < r1;
        }
    }
    let mut ladders = Vec::new();
    let mut ladder_ok = true;
    for id in [IdentityId::TauEuler, IdentityId::Stokes] {
        let words = convergence_instances(id, &cfg, 4).unwrap();
        let c = identity_convergence(id, &words, &QuadratureSpec::default(), &default_ladder(id)).unwrap();
        let e = &c.record.errors;
        ladder_ok &= e.windows(2).all(|w| w[1] < w[0]);
        ladders.push(format!("{id} {:?}", e.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>()));
    }
    l.record(
        13,
        sym_ok && ladder_ok,
        format!("symplectic max {sym_worst:.1e}, steps doubled decrease {sym_ok}; {}", ladders.join("; ")),
    );

    let secs = started.elapsed().as_secs_f64();
    let _ = writeln!(std::io::stderr().lock(), "acceptance run took {secs:.1}s");
    let failed: Vec<u32> = l.lines.iter().filter(|(_, ok, _)| !ok).map(|(n, _, _)| *n).collect();
    assert_eq!(l.lines.len(), 13);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
