use crate::config::{Generator, Suite, SuiteConfig};
use crate::report::{Comparison, FieldDump, Record, Report, Status};
use sasaki_spectra::legendrian::{self, IntrinsicModel, LegendrianImmersion};
use sasaki_spectra::moment::{self, AutomorphismField};
use sasaki_spectra::nomizu::{self, ConeField, NomizuFunction, LEMMA_RADII};
use sasaki_spectra::sasaki::{self, ConeGeometry, SasakiStructure, StandardSphere};
use sasaki_spectra::spectral::{self, MeshMethod, VerdictStatus};
use sasaki_spectra::Result;

const AXIOM_SAMPLES: usize = 100;
const CONE_SAMPLES: usize = 10;
const LEMMA_SAMPLES: usize = 4;

/// Runs `config.suite`; the config must already be validated.
pub fn run_suite(config: &SuiteConfig) -> Report {
    let mut report = Report::new(config.clone());
    let suites = match config.suite {
        Suite::All => vec![
            Suite::SasakiAxioms,
            Suite::LegendrianGeometry,
            Suite::MomentFamily,
            Suite::NomizuFamily,
            Suite::Relation,
            Suite::Spectrum,
        ],
        s => vec![s],
    };
    for s in suites {
        match s {
            Suite::SasakiAxioms => sasaki_axioms(config, &mut report),
            Suite::LegendrianGeometry => each_immersion(config, &mut report, legendrian_geometry),
            Suite::MomentFamily => each_immersion(config, &mut report, moment_family),
            Suite::NomizuFamily => each_immersion(config, &mut report, nomizu_family),
            Suite::Relation => each_immersion(config, &mut report, relation),
            Suite::Spectrum => each_immersion(config, &mut report, spectrum),
            Suite::All => unreachable!("expanded above"),
        }
    }
    report
}

/// Pushes an inconclusive record for a failed computation.
fn guard<T>(report: &mut Report, name: &str, anchor: &'static str, threshold: f64, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.records.push(Record::inconclusive(name, anchor, threshold, e.to_string()));
            None
        }
    }
}

fn immersions(config: &SuiteConfig) -> Result<Vec<LegendrianImmersion>> {
    match (&config.immersion, config.n) {
        (Some(name), _) => Ok(vec![legendrian::by_name(name)?]),
        (None, Some(n)) => legendrian::builtin_examples(n),
        (None, None) => Ok(legendrian::all_builtin()),
    }
}

fn each_immersion(config: &SuiteConfig, report: &mut Report, f: fn(&SuiteConfig, &LegendrianImmersion, &mut Report)) {
    if let Some(ls) = guard(report, "immersions", "§1.2", 0.0, immersions(config)) {
        for l in &ls {
            f(config, l, report);
        }
    }
}

fn generators(config: &SuiteConfig, n: usize) -> Vec<AutomorphismField> {
    match config.generator {
        Generator::Basis => moment::algebra_basis(n),
        Generator::Index(i) => vec![moment::algebra_basis(n).swap_remove(i)],
        Generator::Reeb => vec![moment::reeb_generator(n)],
    }
}

fn sphere_dimensions(config: &SuiteConfig) -> Vec<usize> {
    match (config.n, &config.immersion) {
        (Some(n), _) => vec![n],
        (None, Some(name)) => legendrian::by_name(name).map(|l| vec![l.n()]).unwrap_or_default(),
        (None, None) => vec![1, 2],
    }
}

fn sasaki_axioms(config: &SuiteConfig, report: &mut Report) {
    for n in sphere_dimensions(config) {
        let s = StandardSphere::new(n);
        let label = format!("S^{}", 2 * n + 1);
        let samples = sasaki::axiom_samples(&s, AXIOM_SAMPLES, config.seed);
        let tol = config.tolerance("axioms");
        if let Some(axioms) = guard(report, &label, "§1.1", tol, sasaki::verify_sasaki_axioms(&s, &samples)) {
            for (name, value) in axioms.entries() {
                report.records.push(Record::at_most(format!("{label} {name}"), "§1.1", value, tol));
            }
        }

        let tol = config.tolerance("eta-einstein");
        let name = format!("{label} eta-einstein A={}", s.einstein_constant());
        let worst = samples
            .iter()
            .map(|p| sasaki::eta_einstein_residual(&s, &p.point))
            .try_fold(0.0f64, |m, r| r.map(|v| m.max(v)));
        if let Some(v) = guard(report, &name, "§1.1", tol, worst) {
            report.records.push(Record::at_most(name, "§1.1", v, tol));
        }

        let cone = ConeGeometry::new(s.clone());
        let points = sasaki::cone_samples(&s, CONE_SAMPLES, config.seed);
        let tol = config.tolerance("cone-ricci");
        let name = format!("C({label}) ricci");
        if let Some(r) = guard(report, &name, "§1.1", tol, cone.cone_ricci_flat(&points)) {
            report
                .records
                .push(Record::at_most(format!("{name} flat"), "§1.1", r.flat_path, tol));
            report
                .records
                .push(Record::at_most(format!("{name} chart"), "§1.1", r.chart_path, tol));
        }

        let tol = config.tolerance("cone-connection");
        let name = format!("C({label}) connection");
        let tangent = sasaki::axiom_samples(&s, CONE_SAMPLES, config.seed.wrapping_add(1));
        let pairs: Vec<_> = points
            .into_iter()
            .zip(tangent)
            .map(|(p, t)| {
                let v = s.tangent_projection(&p.x, &t.v);
                (p, v)
            })
            .collect();
        if let Some(r) = guard(report, &name, "Lemma 3.4", tol, cone.connection_residuals(&pairs)) {
            let worst = r.radial_derivative.max(r.euler_identity).max(r.chart_christoffel);
            report.records.push(Record::at_most(name, "Lemma 3.4", worst, tol));
        }
    }
}

/// Totally geodesic examples: the great circle and the round geodesic spheres.
fn totally_geodesic(l: &LegendrianImmersion) -> bool {
    match l.intrinsic() {
        IntrinsicModel::Circle { length } => (length - std::f64::consts::TAU).abs() < 1e-12,
        IntrinsicModel::RoundSphere { radius, .. } => (radius - 1.0).abs() < 1e-12,
        IntrinsicModel::FlatTorus { .. } => false,
    }
}

fn legendrian_geometry(config: &SuiteConfig, l: &LegendrianImmersion, report: &mut Report) {
    let name = l.name();
    let Some(nodes) = guard(report, name, "§1.2", 0.0, l.nodes()) else {
        return;
    };
    let leg = nodes.iter().map(|nd| l.legendrian_residual(&nd.u)).fold(0.0, f64::max);
    report.records.push(Record::at_most(
        format!("{name} legendrian"),
        "§1.2",
        leg,
        config.tolerance("legendrian"),
    ));
    let shapes: Result<Vec<_>> = nodes.iter().map(|nd| l.shape_data(&nd.u)).collect();
    let tol = config.tolerance("mean-curvature");
    let Some(shapes) = guard(report, &format!("{name} mean curvature"), "Thm 2.1", tol, shapes) else {
        return;
    };
    let h = shapes.iter().map(|s| s.mean_curvature_norm()).fold(0.0, f64::max);
    report
        .records
        .push(Record::at_most(format!("{name} mean curvature"), "Thm 2.1", h, tol));
    if totally_geodesic(l) {
        let ii = shapes.iter().map(|s| s.second_fundamental_max()).fold(0.0, f64::max);
        report.records.push(Record::at_most(
            format!("{name} second fundamental form"),
            "Thm 2.3",
            ii,
            config.tolerance("second-fundamental"),
        ));
    }
}

fn eigen_record(
    report: &mut Report,
    name: String,
    anchor: &'static str,
    tol: f64,
    r: Result<spectral::EigenResidual>,
) {
    if let Some(r) = guard(report, &name, anchor, tol, r) {
        if r.degenerate {
            report
                .records
                .push(Record::degenerate(name, anchor, tol, "function vanishes on the nodes"));
        } else {
            report.records.push(Record::at_most(name, anchor, r.residual, tol));
        }
    }
}

fn moment_family(config: &SuiteConfig, l: &LegendrianImmersion, report: &mut Report) {
    let lambda = (2 * l.n() + 2) as f64;
    let nodes = l.nodes();
    for x in generators(config, l.n()) {
        let base = format!("{} f_X[{}]", l.name(), x.label());
        let tol = config.tolerance("eigen-residual");
        let Some(f) = guard(report, &base, "Thm 2.1", tol, moment::f_moment(l, &x)) else {
            continue;
        };
        let q = f.ambient();
        eigen_record(
            report,
            format!("{base} eigen-residual"),
            "Thm 2.1",
            tol,
            spectral::eigen_residual(l, &q, lambda),
        );
        let tol = config.tolerance("mean-zero");
        let mean = l.integrate(|nd| f.at_point(&nd.x));
        if let Some(m) = guard(report, &format!("{base} mean"), "Thm 2.1", tol, mean) {
            report
                .records
                .push(Record::at_most(format!("{base} mean / vol"), "Thm 2.1", m.abs() / f.volume, tol));
        }
        if let Ok(nodes) = &nodes {
            report.fields.push(FieldDump {
                immersion: l.name().to_string(),
                generator: x.label().to_string(),
                rows: nodes
                    .iter()
                    .enumerate()
                    .map(|(i, nd)| (i, nd.weight, f.at_point(&nd.x)))
                    .collect(),
            });
        }
    }
}

fn nomizu_family(config: &SuiteConfig, l: &LegendrianImmersion, report: &mut Report) {
    let lambda = (2 * l.n() + 2) as f64;
    let samples = sasaki::cone_samples(l.sphere(), LEMMA_SAMPLES, config.seed);
    for x in generators(config, l.n()) {
        let k = ConeField::from_automorphism(&x);
        let base = format!("{} f_K[{}]", l.name(), x.label());
        let tol = config.tolerance("eigen-residual");
        if let Some(f) = guard(report, &base, "Thm 3.9", tol, NomizuFunction::new(&k)) {
            eigen_record(
                report,
                format!("{base} eigen-residual"),
                "Thm 3.9",
                tol,
                spectral::eigen_residual(l, &f.ambient(), lambda),
            );
        }
        let Some(lemmas) = guard(
            report,
            &format!("{base} lemmas"),
            "Lemma 3.3",
            config.tolerance("operator"),
            nomizu::lemma_suite(&k, l, &samples, &LEMMA_RADII),
        ) else {
            continue;
        };
        let checks: [(&str, &'static str, f64, &str); 6] = [
            ("operator", "Lemma 3.3", lemmas.operator, "operator"),
            ("div(JK) constancy", "Lemma 3.3", lemmas.div_constancy, "div-constancy"),
            ("nabla M_K", "Lemma 3.3", lemmas.nabla_m, "nabla-m"),
            ("curvature vanishing", "Lemma 3.4", lemmas.curvature_vanishing, "nabla-m"),
            ("frame identity", "Lemma 3.6", lemmas.frame_identity_max(), "frame-identity"),
            ("r-independence", "Lemma 3.7", lemmas.r_independence, "r-independence"),
        ];
        for (what, anchor, value, key) in checks {
            report
                .records
                .push(Record::at_most(format!("{base} {what}"), anchor, value, config.tolerance(key)));
        }
    }
}

fn relation(config: &SuiteConfig, l: &LegendrianImmersion, report: &mut Report) {
    for x in generators(config, l.n()) {
        let base = format!("{} [{}]", l.name(), x.label());
        let tol = config.tolerance("coincidence");
        let Some(r) = guard(report, &base, "eq:etaXfX", tol, nomizu::relation_check(&x, l)) else {
            continue;
        };
        report
            .records
            .push(Record::at_most(format!("{base} f_K - f_X"), "eq:etaXfX", r.family_coincidence, tol));
        report.records.push(Record::at_most(
            format!("{base} f_K - eta(X) - div(JX)/(2n+2)"),
            "eq:etaXfX",
            r.eta_relation,
            tol,
        ));
        let tol = config.tolerance("eta-integral");
        if x.trace_j().abs() <= 1e-12 {
            report.records.push(Record::at_most(
                format!("{base} integral eta(X) / vol"),
                "eq:etaXfX",
                r.normalized_integral,
                tol,
            ));
        } else {
            // outside su(n+1) the mean is shifted by the constant divergence
            let d = (2 * l.n() + 2) as f64;
            report.records.push(Record::at_most(
                format!("{base} mean eta(X) + div(JX)/(2n+2)"),
                "eq:etaXfX",
                (r.eta_mean + r.div_jx / d).abs(),
                tol,
            ));
        }
    }
}

fn default_resolutions(l: &LegendrianImmersion) -> Option<Vec<usize>> {
    match l.intrinsic() {
        IntrinsicModel::Circle { .. } => Some(vec![512, 1024]),
        IntrinsicModel::FlatTorus { .. } => Some(vec![64, 128]),
        IntrinsicModel::RoundSphere { dim: 2, .. } => Some(vec![3, 4, 5]),
        _ => None,
    }
}

/// Mesh-size ratio between two resolutions.
fn refinement(method: MeshMethod, coarse: usize, fine: usize) -> f64 {
    match method {
        MeshMethod::PeriodicFd => fine as f64 / coarse as f64,
        MeshMethod::IcosphereFem => 2f64.powi(fine as i32 - coarse as i32),
    }
}

fn verdict_status(v: VerdictStatus) -> Status {
    match v {
        VerdictStatus::Pass => Status::Pass,
        VerdictStatus::Fail => Status::Fail,
        VerdictStatus::Inconclusive => Status::Inconclusive,
    }
}

fn spectrum(config: &SuiteConfig, l: &LegendrianImmersion, report: &mut Report) {
    let name = l.name();
    let n = l.n();
    let target = (2 * n + 2) as f64;
    let family: Vec<_> = generators(config, n)
        .iter()
        .filter_map(|x| moment::f_moment(l, x).ok())
        .map(|f| (f.field.label().to_string(), f.ambient()))
        .collect();

    let tol = config.tolerance("rayleigh");
    let mut worst: Option<f64> = None;
    for (label, f) in &family {
        if let Some(q) = guard(report, &format!("{name} rayleigh [{label}]"), "Thm 2.1", tol, spectral::rayleigh_quotient(l, f)) {
            if !q.degenerate {
                let dev = (q.quotient - target).abs() / target;
                worst = Some(worst.map_or(dev, |w: f64| w.max(dev)));
            }
        }
    }
    match worst {
        Some(w) => report
            .records
            .push(Record::at_most(format!("{name} rayleigh quotient"), "Thm 2.1", w, tol)),
        None => report.records.push(Record::degenerate(
            format!("{name} rayleigh quotient"),
            "Thm 2.1",
            tol,
            "every selected family function vanishes",
        )),
    }

    let resolutions = if config.resolution.is_empty() {
        match default_resolutions(l) {
            Some(r) => r,
            // no intrinsic discretiser; the pointwise and Rayleigh checks cover it
            None => return,
        }
    } else {
        config.resolution.clone()
    };
    let window = config.tolerance("window");
    let mut spectra = Vec::new();
    for &res in &resolutions {
        let label = format!("{name} spectrum @{res}");
        match guard(report, &label, "Thm 2.1", 0.0, spectral::mesh_spectrum_with(l, res, window)) {
            Some(s) => spectra.push(s),
            None => return,
        }
    }
    let finest = spectra.last().expect("at least one resolution").clone();
    let dim_g = (n + 1) * (n + 1);
    let v = spectral::bound_check(&finest, n, dim_g);
    let mut rec = Record::check(
        format!("{name} multiplicity at {target}"),
        "Thm 2.1",
        finest.multiplicity as f64,
        Comparison::AtLeast,
        v.bound as f64,
    )
    .with_detail(v.diagnostics.clone());
    rec.status = verdict_status(v.status);
    report.records.push(rec);

    let (cmp, expected) = if totally_geodesic(l) {
        (Comparison::Equal, v.bound as f64)
    } else {
        (Comparison::AtLeast, v.bound as f64 + 1.0)
    };
    report.records.push(Record::check(
        format!("{name} equality case"),
        "Thm 2.3",
        finest.multiplicity as f64,
        cmp,
        expected,
    ));
    report.records.push(Record::at_most(
        format!("{name} cluster mean deviation"),
        "Thm 2.1",
        (finest.cluster_mean - target).abs() / target,
        config.tolerance("cluster"),
    ));
    report.records.push(Record::check(
        format!("{name} cluster separation"),
        "Thm 2.1",
        finest.separation.gap,
        Comparison::AtLeast,
        finest.separation.required,
    ));
    if spectra.len() >= 2 {
        let coarse = &spectra[spectra.len() - 2];
        let order = spectral::convergence_order(
            (coarse.cluster_mean - target).abs(),
            (finest.cluster_mean - target).abs(),
            refinement(finest.method, coarse.resolution, finest.resolution),
        );
        let key = match finest.method {
            MeshMethod::PeriodicFd => "fd-order",
            MeshMethod::IcosphereFem => "fem-order",
        };
        report.records.push(Record::check(
            format!("{name} cluster convergence order"),
            "Thm 2.1",
            order,
            Comparison::AtLeast,
            config.tolerance(key),
        ));
    }
    if matches!(l.intrinsic(), IntrinsicModel::Circle { .. } | IntrinsicModel::RoundSphere { .. }) && totally_geodesic(l) {
        // degree-1 harmonics on the round S^n
        let count = spectral::count_in_window(&finest.eigenvalues, n as f64, window);
        report.records.push(
            Record::check(
                format!("{name} multiplicity at {n}"),
                "Thm 2.3",
                count as f64,
                Comparison::Equal,
                (n + 1) as f64,
            )
            .with_detail(format!("spherical-harmonic count n+1 = {}; n(n+1) = {}", n + 1, n * (n + 1))),
        );
    }
    if finest.method == MeshMethod::PeriodicFd {
        pipeline(config, l, &family, &resolutions, report);
    }
    report.spectra.extend(spectra);
}

fn pipeline(
    config: &SuiteConfig,
    l: &LegendrianImmersion,
    family: &[(String, sasaki_spectra::field::QuadraticForm)],
    resolutions: &[usize],
    report: &mut Report,
) {
    let name = l.name();
    let tol = config.tolerance("pipeline");
    let mut worst_error: Option<f64> = None;
    let mut worst_order: Option<f64> = None;
    for (label, f) in family {
        let mut errors = Vec::new();
        for &res in resolutions {
            let rec = format!("{name} pipeline [{label}] @{res}");
            match guard(report, &rec, "Lemma 3.2", tol, spectral::pipeline_agreement(l, f, res)) {
                Some(a) if !a.degenerate => errors.push((res, a.relative_error)),
                Some(_) => break,
                None => return,
            }
        }
        if let Some(&(_, e)) = errors.last() {
            worst_error = Some(worst_error.map_or(e, |w: f64| w.max(e)));
        }
        if errors.len() >= 2 {
            let (c, f) = (errors[errors.len() - 2], errors[errors.len() - 1]);
            let o = spectral::convergence_order(c.1, f.1, f.0 as f64 / c.0 as f64);
            worst_order = Some(worst_order.map_or(o, |w: f64| w.min(o)));
        }
    }
    if let Some(e) = worst_error {
        report
            .records
            .push(Record::at_most(format!("{name} pipeline agreement"), "Lemma 3.2", e, tol));
    }
    if let Some(o) = worst_order {
        report.records.push(Record::check(
            format!("{name} pipeline convergence order"),
            "Lemma 3.2",
            o,
            Comparison::AtLeast,
            config.tolerance("fd-order"),
        ));
    }
}
