use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use stresslab::algebra::{
    g_conjecture_verdict, hilbert_and_generation, lefschetz_middle, macaulay_check, quotient_g_vector,
    socle_and_gorenstein, unit_action, wlp_check, AlgebraError, Multiplier, PipelineOptions,
};
use stresslab::complex::{
    betti, classify, cross_polytope_boundary, cyclic_polytope_boundary, simplex_boundary, ComplexError, Field, SimplicialComplex,
};
use stresslab::maxwell::{
    ab_matrices, basis_lifting, lifting_to_stress, pl_orientation, product_formula_check, product_formula_decimal,
    q_genericity_check, round_trip, round_trip_decimal, Geometry, MaxwellError, PLOrientation,
};
use stresslab::numeric::{format_rational, rat_rank, Matrix, NumericError};
use stresslab::realization::{realize_random, Realization, RealizationData};
use stresslab::rigidity::{
    is_autonomous, pivot_compatible_set, pivotal_order, pivotal_weights, stress_space, GradedStressSpace,
};
use stresslab::skeletal::{
    cone_projection_chain_map, cone_setup, phi_chain_map, phi_commutes_with_pi, stress_homology_check,
    wlp_diagram_check,
};
use stresslab::Rational;

use crate::files::{self, load_complex, load_realization, ComplexFile, LoadedComplex};
use crate::report::{digest, Report};
use crate::{Cli, CliError, Command, FieldArg, GenKind, Options};

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let o = &cli.opts;
    match &cli.command {
        Command::Gen { kind, params, apex } => gen(o, *kind, params, apex),
        Command::Verify { complex, field } => verify(o, complex, *field),
        Command::Stress { complex, realization } => stress(o, complex, realization.as_deref()),
        Command::Gconj { complex } => gconj(o, complex),
        Command::Wlp { complex, realization } => wlp(o, complex, realization.as_deref()),
        Command::Gorenstein { complex, realization } => gorenstein(o, complex, realization.as_deref()),
        Command::Maxwell { complex, realization } => maxwell(o, complex, realization.as_deref()),
        Command::Pivot { complex, realization, k, autonomous } => {
            pivot(o, complex, realization.as_deref(), *k, autonomous)
        }
        Command::Skeletal { complex, r } => skeletal(o, complex, *r),
    }
}

fn lib<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Library(e.to_string())
}

fn frac(q: &Rational) -> String {
    format_rational(q)
}

fn fracs(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn emit(opts: &Options, text: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(p) => files::write(p, &format!("{text}\n")),
        None => print_out(text),
    }
}

/// stdout, treating a closed pipe as success.
fn print_out(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io("stdout".into(), e)),
        _ => Ok(()),
    }
}

fn finish(opts: &Options, rep: Report) -> Result<bool, CliError> {
    let text = serde_json::to_string_pretty(&rep).expect("report serializes");
    emit(opts, &text)?;
    Ok(rep.passed())
}

fn params(opts: &Options, extra: Value) -> Value {
    json!({
        "seed": opts.seed,
        "bound": opts.bound,
        "trials": opts.trials,
        "max_retries": opts.max_retries,
        "prime_bound": opts.prime_bound,
        "float_fallback": opts.float_fallback,
        "gp_samples": opts.gp_samples,
        "extra": extra,
    })
}

fn gen(opts: &Options, kind: GenKind, params: &[String], apex: &str) -> Result<bool, CliError> {
    let arity = match kind {
        GenKind::Simplex | GenKind::Crosspoly | GenKind::Cone | GenKind::Suspension | GenKind::Barycentric => 1,
        GenKind::Cyclic | GenKind::Join => 2,
    };
    if params.len() != arity {
        return Err(CliError::InvalidParameters(format!("{kind:?} takes {arity} parameter(s), got {}", params.len())));
    }
    let num = |i: usize| -> Result<usize, CliError> {
        params[i].parse().map_err(|_| CliError::InvalidParameters(format!("{} is not a nonnegative integer", params[i])))
    };
    let load = |i: usize| load_complex(Path::new(&params[i]));
    let invalid = |e: ComplexError| match e {
        ComplexError::InvalidParameters(m) => CliError::InvalidParameters(m),
        other => CliError::InvalidParameters(other.to_string()),
    };
    let (name, c) = match kind {
        GenKind::Simplex => {
            let d = num(0)?;
            (format!("simplex_boundary_{d}"), simplex_boundary(d).map_err(invalid)?)
        }
        GenKind::Crosspoly => {
            let d = num(0)?;
            (format!("cross_polytope_boundary_{d}"), cross_polytope_boundary(d).map_err(invalid)?)
        }
        GenKind::Cyclic => {
            let (d, n) = (num(0)?, num(1)?);
            (format!("cyclic_polytope_boundary_{d}_{n}"), cyclic_polytope_boundary(d, n).map_err(invalid)?)
        }
        GenKind::Cone => {
            let l = load(0)?;
            (format!("cone({})", l.name), l.complex.cone(apex).map_err(invalid)?)
        }
        GenKind::Suspension => {
            let l = load(0)?;
            (format!("suspension({})", l.name), l.complex.suspension().map_err(invalid)?)
        }
        GenKind::Barycentric => {
            let l = load(0)?;
            (format!("barycentric({})", l.name), l.complex.barycentric_subdivision().map_err(invalid)?)
        }
        GenKind::Join => {
            let (a, b) = (load(0)?, load(1)?);
            (format!("join({},{})", a.name, b.name), a.complex.join(&b.complex).map_err(invalid)?)
        }
    };
    let file = serde_json::to_string_pretty(&ComplexFile::from_complex(&name, &c)).expect("serializes");
    let fv = c.face_vector();
    let summary = serde_json::to_string(&json!({ "name": name, "f": fv.f, "h": fv.h, "g": fv.g })).expect("serializes");
    match &opts.out {
        Some(p) => {
            files::write(p, &format!("{file}\n"))?;
            print_out(&summary)?;
        }
        None => {
            print_out(&file)?;
            eprintln!("{summary}");
        }
    }
    Ok(true)
}

fn verify(opts: &Options, path: &Path, field: FieldArg) -> Result<bool, CliError> {
    let l = load_complex(path)?;
    let c = &l.complex;
    let f = match field {
        FieldArg::Q => Field::Q,
        FieldArg::Gf2 => Field::GF2,
    };
    let dg = digest("verify", &params(opts, json!({ "field": format!("{field:?}") })), &[&l.bytes]);
    let mut rep = Report::new("verify", dg, opts.seed, opts.timings);
    let cl = classify(c, f);
    rep.lap("classify");
    let fv = c.face_vector();
    rep.gate("pseudomanifold", cl.is_pseudomanifold);
    rep.gate("homology_manifold", cl.is_homology_manifold);
    rep.gate("homology_sphere", cl.is_homology_sphere);
    rep.gate("orientable", cl.is_orientable_candidate);
    let n = fv.h.len();
    let bad = (0..n).find(|&i| fv.h[i] != fv.h[n - 1 - i]);
    rep.gate_with("dehn_sommerville", bad.is_none(), bad.map(|i| json!({ "i": i, "h_i": fv.h[i], "h_mirror": fv.h[n - 1 - i] })));
    rep.set("name", &l.name);
    rep.set("field", format!("{field:?}"));
    rep.set("classification", &cl);
    rep.set("betti", betti(c, f).betti);
    rep.set("f_vector", &fv.f);
    rep.set("h_vector", &fv.h);
    rep.set("g_vector", &fv.g);
    finish(opts, rep)
}

/// Loaded complex, realization, and the digest over both inputs.
struct Setup {
    loaded: LoadedComplex,
    real: Realization,
    source: &'static str,
    digest: String,
}

fn setup(opts: &Options, command: &str, path: &Path, realization: Option<&Path>, extra: Value) -> Result<Setup, CliError> {
    let loaded = load_complex(path)?;
    let c = &loaded.complex;
    if c.dim() < 1 {
        return Err(CliError::InvalidParameters("the complex needs dimension at least 1".into()));
    }
    let (real, source, rbytes) = match realization {
        Some(p) => {
            let (r, b) = load_realization(p, c)?;
            (r, "file", Some(b))
        }
        None => (realize_random(c, opts.seed, opts.bound).map_err(lib)?, "random", None),
    };
    let mut inputs: Vec<&[u8]> = vec![&loaded.bytes];
    if let Some(b) = &rbytes {
        inputs.push(b);
    }
    let digest = digest(command, &params(opts, extra), &inputs);
    Ok(Setup { loaded, real, source, digest })
}

/// Face checks of the realization; later gates are skipped when this fails.
fn realization_gates(opts: &Options, rep: &mut Report, s: &Setup) -> bool {
    let c = &s.loaded.complex;
    rep.set("realization_source", s.source);
    rep.set("realization", RealizationData::from_realization(c, &s.real));
    let valid = s.real.validate(c);
    let ok = valid.is_ok();
    rep.gate_with("realization", ok, valid.err().map(|e| json!(e.to_string())));
    let n = s.real.num_vertices();
    match opts.gp_samples {
        Some(k) if n > 16 => {
            let gp = s.real.in_general_position_sampled(k, opts.seed);
            rep.push("general_position", gp, Some(json!({ "sampled_subsets": k })), true);
        }
        _ => {
            let bad = s.real.degenerate_subset();
            rep.gate_with("general_position", bad.is_none(), bad.map(|f| json!(c.face_labels(&f))));
        }
    }
    ok
}

fn hilbert_gate(rep: &mut Report, space: &GradedStressSpace, h: &[i64]) -> bool {
    let hil = space.hilbert();
    let bad = if hil.len() != h.len() {
        Some(json!({ "hilbert": hil, "h": h }))
    } else {
        (0..hil.len())
            .find(|&r| hil[r] as i64 != h[h.len() - 1 - r])
            .map(|r| json!({ "degree": r, "dim": hil[r], "h": h[h.len() - 1 - r] }))
    };
    let ok = bad.is_none();
    rep.gate_with("hilbert_matches_h", ok, bad);
    ok
}

fn stress(opts: &Options, path: &Path, realization: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(opts, "stress", path, realization, Value::Null)?;
    let c = &s.loaded.complex;
    let mut rep = Report::new("stress", s.digest.clone(), opts.seed, opts.timings);
    rep.set("name", &s.loaded.name);
    if !realization_gates(opts, &mut rep, &s) {
        return finish(opts, rep);
    }
    let fv = c.face_vector();
    let space = stress_space(c, &s.real);
    rep.lap("stress_space");
    hilbert_gate(&mut rep, &space, &fv.h);
    let d = c.dim() as usize;
    rep.set("hilbert", space.hilbert());
    rep.set("h_vector", &fv.h);
    rep.set("g_vector", &fv.g);
    rep.set("psi1_dim", space.dim(1));
    rep.set("n_minus_d_minus_1", c.num_vertices() as i64 - d as i64 - 1);
    let genericity = match Geometry::new(c, &s.real).and_then(|g| q_genericity_check(&g, &s.real, opts.prime_bound)) {
        Ok(g) => json!({
            "verdict": g.verdict,
            "general_position": g.general_position,
            "all_nonzero": g.all_nonzero(),
            "kernel_gf2_rank": g.kernel_gf2_rank,
            "pairs": g.entries.len(),
            "rational_pairs": g.rational_count(),
            "entries": g.entries.iter().map(|e| json!({
                "ridge": c.face_labels(&e.ridge),
                "vertex": c.label(e.vertex),
                "zeta_sq": frac(&e.zeta_sq),
                "kernel": e.kernel.as_ref().map(|k| k.primes().to_vec()),
            })).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    rep.lap("q_genericity");
    rep.set("q_genericity", genericity);
    finish(opts, rep)
}

fn gconj(opts: &Options, path: &Path) -> Result<bool, CliError> {
    let l = load_complex(path)?;
    let c = &l.complex;
    let dg = digest("gconj", &params(opts, Value::Null), &[&l.bytes]);
    let mut rep = Report::new("gconj", dg, opts.seed, opts.timings);
    rep.set("name", &l.name);
    let po = PipelineOptions {
        bound: opts.bound,
        max_retries: opts.max_retries,
        trials: opts.trials.unwrap_or(5),
        prime_bound: opts.prime_bound,
    };
    let g = match g_conjecture_verdict(c, opts.seed, &po) {
        Ok(g) => g,
        Err(AlgebraError::NotAHomologySphere) => {
            rep.gate("homology_sphere", false);
            return finish(opts, rep);
        }
        Err(e) => return Err(lib(e)),
    };
    rep.lap("pipeline");
    rep.gate("homology_sphere", g.sphere);
    let generic = g.genericity.as_ref().is_some_and(|x| x.verdict);
    rep.gate_with(
        "q_generic",
        generic,
        (!generic).then(|| {
            let x = g.genericity.as_ref();
            json!({
                "attempts": g.attempts,
                "pairs": x.map(|x| x.entries.len()),
                "kernel_gf2_rank": x.map(|x| x.kernel_gf2_rank),
                "rational_pairs": x.map(|x| x.rational_count()),
            })
        }),
    );
    rep.gate_with("hilbert_matches_h", g.hilbert_matches_h, (!g.hilbert_matches_h).then(|| json!(g.hilbert)));
    let failing = g.wlp.trials.iter().find(|t| !(t.full_rank && t.pattern_ok));
    rep.gate_with(
        "weak_lefschetz",
        g.wlp.verdict_weak,
        failing.map(|t| json!({ "omega": fracs(&t.omega), "ranks": t.ranks, "images_in_space": t.images_in_space })),
    );
    rep.gate_with("quotient_matches_g", g.quotient_matches_g, (!g.quotient_matches_g).then(|| json!(g.quotient_g)));
    rep.gate("macaulay", g.macaulay);
    rep.set("attempts", g.attempts);
    rep.set("seed_used", g.seed_used);
    rep.set("h_vector", &g.h_vector);
    rep.set("g_vector", &g.g_vector);
    rep.set("hilbert", &g.hilbert);
    rep.set("quotient_g", &g.quotient_g);
    rep.set("injective_degrees", &g.wlp.injective_degrees);
    rep.set("surjective_degrees", &g.wlp.surjective_degrees);
    rep.set("realization", RealizationData::from_realization(c, &g.realization));
    finish(opts, rep)
}

fn wlp(opts: &Options, path: &Path, realization: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(opts, "wlp", path, realization, Value::Null)?;
    let c = &s.loaded.complex;
    let mut rep = Report::new("wlp", s.digest.clone(), opts.seed, opts.timings);
    rep.set("name", &s.loaded.name);
    if !realization_gates(opts, &mut rep, &s) {
        return finish(opts, rep);
    }
    let fv = c.face_vector();
    let space = stress_space(c, &s.real);
    let m = Multiplier::new(c, &s.real);
    let w = wlp_check(&m, &space, opts.trials.unwrap_or(5), opts.seed);
    rep.lap("lefschetz");
    let failing = w.trials.iter().find(|t| !(t.full_rank && t.pattern_ok));
    rep.gate_with(
        "weak_lefschetz",
        w.verdict_weak,
        failing.map(|t| json!({ "omega": fracs(&t.omega), "ranks": t.ranks, "images_in_space": t.images_in_space })),
    );
    let quotient = w.trials.first().map(|t| quotient_g_vector(&m, &space, &space.combine(1, &t.omega)));
    let q = match quotient {
        Some(Ok(q)) => Some(q),
        Some(Err(e)) => {
            rep.set("quotient_error", e.to_string());
            None
        }
        None => None,
    };
    let q_ok = q.as_ref() == Some(&fv.g);
    rep.gate_with("quotient_matches_g", q_ok, (!q_ok).then(|| json!({ "quotient": q, "g": fv.g })));
    rep.gate("macaulay", macaulay_check(&fv.g));
    rep.set("middle", lefschetz_middle(c.dim()));
    rep.set("hilbert", &w.hilbert);
    rep.set("g_vector", &fv.g);
    rep.set("injective_degrees", &w.injective_degrees);
    rep.set("surjective_degrees", &w.surjective_degrees);
    rep.set(
        "trials",
        w.trials
            .iter()
            .map(|t| json!({ "omega": fracs(&t.omega), "ranks": t.ranks, "images_in_space": t.images_in_space }))
            .collect::<Vec<_>>(),
    );
    finish(opts, rep)
}

fn gorenstein(opts: &Options, path: &Path, realization: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(opts, "gorenstein", path, realization, Value::Null)?;
    let c = &s.loaded.complex;
    let mut rep = Report::new("gorenstein", s.digest.clone(), opts.seed, opts.timings);
    rep.set("name", &s.loaded.name);
    if !realization_gates(opts, &mut rep, &s) {
        return finish(opts, rep);
    }
    let space = stress_space(c, &s.real);
    let m = Multiplier::new(c, &s.real);
    let soc = socle_and_gorenstein(&m, &space);
    let gen = hilbert_and_generation(&m, &space);
    let unit = unit_action(&m, &space);
    rep.lap("algebra");
    rep.gate_with("socle_one_dimensional", soc.gorenstein, (!soc.gorenstein).then(|| json!(soc.dims)));
    rep.gate_with(
        "generated_in_degree_one",
        gen.generated_in_degree_one,
        (!gen.generated_in_degree_one)
            .then(|| json!({ "generated_dims": gen.generated_dims, "products_in_space": gen.products_in_space })),
    );
    rep.set("hilbert", &gen.hilbert);
    rep.set("socle_dims", &soc.dims);
    rep.set("generated_dims", &gen.generated_dims);
    rep.set("products_in_space", gen.products_in_space);
    rep.set("unit_acts_as_scalar", unit.acts_as_scalar);
    rep.set("unit_scalar", unit.scalar.as_ref().map(frac));
    finish(opts, rep)
}

fn is_factorization(e: &MaxwellError) -> bool {
    matches!(e, MaxwellError::Numeric(NumericError::FactorizationIncomplete { .. }))
}

fn maxwell(opts: &Options, path: &Path, realization: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(opts, "maxwell", path, realization, Value::Null)?;
    let c = &s.loaded.complex;
    let real = &s.real;
    let mut rep = Report::new("maxwell", s.digest.clone(), opts.seed, opts.timings);
    rep.set("name", &s.loaded.name);
    if !realization_gates(opts, &mut rep, &s) {
        return finish(opts, rep);
    }
    let geom = match Geometry::new(c, real) {
        Ok(g) => g,
        Err(e) => {
            rep.gate_with("geometry", false, Some(json!(e.to_string())));
            return finish(opts, rep);
        }
    };
    let rho = match pl_orientation(&geom, None) {
        Ok(r) => r,
        Err(e @ MaxwellError::NonOrientable(_)) => {
            rep.gate_with("pl_orientation", false, Some(json!(e.to_string())));
            return finish(opts, rep);
        }
        Err(e) => return Err(lib(e)),
    };
    rep.gate("pl_orientation", true);
    let base = geom.facets[0].clone();
    let space = stress_space(c, real);
    rep.lap("setup");
    lifting_gates(&mut rep, c, &geom, &rho, &base, &space)?;

    let mut approx = false;
    let mut bad = None;
    for (i, a) in space.basis(1).iter().enumerate() {
        let rt = match round_trip(&geom, &rho, &base, a, opts.prime_bound) {
            Ok(rt) => rt,
            Err(e) if is_factorization(&e) && opts.float_fallback => {
                approx = true;
                round_trip_decimal(&geom, &rho, &base, a).map_err(lib)?
            }
            Err(e) => return Err(lib(e)),
        };
        if bad.is_none() && !rt.identity() {
            bad = Some(json!({
                "basis_index": i,
                "lifting_back": rt.lifting_back,
                "stress_back": rt.stress_back,
                "parallel": rt.parallel,
                "normalized_match": rt.normalized_match,
            }));
        }
    }
    rep.push("round_trip", bad.is_none(), bad, approx);
    rep.lap("round_trip");

    let d = geom.d;
    let pairs = opts.trials.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut approx = false;
    let mut bad = None;
    let mut products = Vec::new();
    if space.dim(1) > 0 && space.dim(d) > 0 {
        for t in 0..pairs {
            let a = space.random_element(1, &mut rng, opts.bound as i64);
            let b = space.random_element(d, &mut rng, opts.bound as i64);
            let (product, equal) = match product_formula_check(c, real, &geom, &rho, &base, &a, &b, opts.prime_bound) {
                Ok(p) => (p.product, p.equal),
                Err(e) if is_factorization(&e) && opts.float_fallback => {
                    approx = true;
                    let (p, _, eq) = product_formula_decimal(c, real, &geom, &rho, &base, &a, &b).map_err(lib)?;
                    (p, eq)
                }
                Err(e) => return Err(lib(e)),
            };
            if bad.is_none() && !equal {
                bad = Some(json!({ "pair": t, "product": frac(&product) }));
            }
            products.push(frac(&product));
        }
    }
    rep.push("product_formula", bad.is_none(), bad, approx);
    rep.set("product_values", products);
    rep.lap("product_formula");

    let ab = match ab_matrices(&geom, real, &rho, &base, opts.prime_bound) {
        Ok(ab) => json!({
            "row_spaces_equal": ab.row_spaces_equal,
            "abt_rank": ab.abt_rank,
            "abt_invertible": ab.abt_invertible,
            "c_rank": ab.c_rank,
            "c_invertible": ab.c_invertible,
            "column_sums_vanish": ab.column_sums_vanish,
        }),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    rep.set("ab_matrices", ab);
    rep.set("base_facet", c.face_labels(&base));
    rep.set("orientation", &rho.rho);
    rep.set("psi1_dim", space.dim(1));
    finish(opts, rep)
}

/// Basis liftings μ_i map into Ψ_1 and span it.
fn lifting_gates(
    rep: &mut Report,
    c: &SimplicialComplex,
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    space: &GradedStressSpace,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut outside = None;
    for v in (0..c.num_vertices()).filter(|v| !base.contains(v)) {
        let s = lifting_to_stress(geom, rho, &basis_lifting(geom, base, v).map_err(lib)?);
        if outside.is_none() && !space.contains(&s) {
            outside = Some(json!(c.label(v)));
        }
        rows.push(s.values);
    }
    let rank = if rows.is_empty() { 0 } else { rat_rank(&Matrix::from_rows(rows, geom.ridges.len()).map_err(lib)?) };
    rep.gate_with("liftings_are_stresses", outside.is_none(), outside);
    let spans = rank == space.dim(1);
    rep.gate_with("liftings_span_psi1", spans, (!spans).then(|| json!({ "rank": rank, "psi1_dim": space.dim(1) })));
    Ok(())
}

fn pivot(
    opts: &Options,
    path: &Path,
    realization: Option<&Path>,
    k: Option<isize>,
    autonomous: &[String],
) -> Result<bool, CliError> {
    let s = setup(opts, "pivot", path, realization, json!({ "k": k, "autonomous": autonomous }))?;
    let c = &s.loaded.complex;
    let k = k.unwrap_or(c.dim());
    if k < 0 || k > c.dim() {
        return Err(CliError::InvalidParameters(format!("k = {k} is outside 0..={}", c.dim())));
    }
    let a: Vec<usize> = autonomous
        .iter()
        .map(|l| c.vertex_id(l).ok_or_else(|| CliError::InvalidParameters(format!("unknown vertex {l}"))))
        .collect::<Result<_, _>>()?;
    let mut rep = Report::new("pivot", s.digest.clone(), opts.seed, opts.timings);
    rep.set("name", &s.loaded.name);
    rep.set("k", k);
    if !realization_gates(opts, &mut rep, &s) {
        return finish(opts, rep);
    }
    let mut po = pivotal_order(c, &s.real, k, Some(opts.seed)).map_err(lib)?;
    if !a.is_empty() {
        let auto = is_autonomous(c, &a, k - 1);
        rep.gate("autonomous", auto);
        if auto {
            match pivot_compatible_set(c, &s.real, &a, k, Some(opts.seed)) {
                Ok(pc) => {
                    rep.gate("pivot_compatible", true);
                    rep.set("hhat", pc.hhat.iter().map(|h| c.face_labels(h)).collect::<Vec<_>>());
                    rep.set("swaps", pc.swaps);
                    po = pc.order;
                }
                Err(e) => rep.gate_with("pivot_compatible", false, Some(json!(e.to_string()))),
            }
        }
    }
    rep.lap("pivotal_order");
    rep.set("order", po.order.iter().map(|f| c.face_labels(f)).collect::<Vec<_>>());
    rep.set("num_pivots", po.num_pivots);
    rep.set("nullity", po.nullity());
    if po.general_position {
        let w = pivotal_weights(c, &po).map_err(lib)?;
        rep.gate("weight_min_over_facets", w.min_over_facets_holds);
        rep.gate("subweight_max_over_cofacets", w.max_over_cofacets_holds);
        rep.set(
            "weights",
            po.order.iter().map(|f| json!({ "face": c.face_labels(f), "wt": w.wt[f] })).collect::<Vec<_>>(),
        );
    }
    finish(opts, rep)
}

fn failing<T>(items: &[(usize, T)], ok: impl Fn(&T) -> bool) -> Option<Value> {
    let bad: Vec<usize> = items.iter().filter(|(_, x)| !ok(x)).map(|(r, _)| *r).collect();
    (!bad.is_empty()).then(|| json!({ "r": bad }))
}

fn skeletal(opts: &Options, path: &Path, only: Option<usize>) -> Result<bool, CliError> {
    let l = load_complex(path)?;
    let delta = &l.complex;
    if delta.dim() < 1 {
        return Err(CliError::InvalidParameters("the complex needs dimension at least 1".into()));
    }
    let d = delta.dim() as usize;
    if only.is_some_and(|r| r > d + 1) {
        return Err(CliError::InvalidParameters(format!("r is outside 0..={}", d + 1)));
    }
    let keep = |r: usize| only.map_or(true, |x| x == r);
    let dg = digest("skeletal", &params(opts, json!({ "r": only })), &[&l.bytes]);
    let mut rep = Report::new("skeletal", dg, opts.seed, opts.timings);
    rep.set("name", &l.name);
    let st = cone_setup(delta, opts.seed, opts.bound).map_err(lib)?;
    let base = &st.projection.base;
    let nu = &st.projection.realization;
    rep.set("cone_realization", RealizationData::from_realization(&st.cone, &st.nu_prime));
    rep.set("weights", fracs(&st.zeta.w));
    rep.set("zeta_w", fracs(&st.zeta.zeta_w));
    rep.lap("setup");

    let homology: Vec<(usize, _)> = (1..=d + 1)
        .filter(|&r| keep(r))
        .map(|r| stress_homology_check(base, nu, r).map(|h| (r, h)))
        .collect::<Result<_, _>>()
        .map_err(lib)?;
    rep.gate_with("squares_vanish", homology.iter().all(|(_, h)| h.squares_vanish), failing(&homology, |h| h.squares_vanish));
    rep.gate_with("stress_homology", homology.iter().all(|(_, h)| h.equal), failing(&homology, |h| h.equal));
    rep.set(
        "homology",
        homology
            .iter()
            .map(|(r, h)| json!({ "r": r, "homology_dim": h.homology_dim, "stress_dim": h.stress_dim }))
            .collect::<Vec<_>>(),
    );
    rep.lap("homology");

    let pi: Vec<(usize, _)> = (0..=d)
        .filter(|&r| keep(r))
        .map(|r| cone_projection_chain_map(&st.cone, &st.nu_prime, st.apex, &st.projection, r).map(|p| (r, p)))
        .collect::<Result<_, _>>()
        .map_err(lib)?;
    rep.gate_with("pi_chain_map", pi.iter().all(|(_, p)| p.chain_map), failing(&pi, |p| p.chain_map));
    rep.gate_with("pi_surjective", pi.iter().all(|(_, p)| p.surjective), failing(&pi, |p| p.surjective));
    rep.gate_with("pi_top_iso", pi.iter().all(|(_, p)| p.iso_top), failing(&pi, |p| p.iso_top));
    rep.lap("projection");

    let phi: Vec<(usize, (bool, bool, bool))> = (1..=d)
        .filter(|&r| keep(r))
        .map(|r| {
            let p = phi_chain_map(&st.cone, &st.nu_prime, &st.zeta, r)?;
            let commutes = phi_commutes_with_pi(&st.cone, &st.nu_prime, st.apex, &st.projection, &st.zeta, r)?;
            Ok((r, (p.is_chain_map, p.well_defined, commutes)))
        })
        .collect::<Result<_, stresslab::skeletal::SkeletalError>>()
        .map_err(lib)?;
    rep.gate_with("phi_chain_map", phi.iter().all(|(_, p)| p.0), failing(&phi, |p| p.0));
    rep.gate_with("phi_well_defined", phi.iter().all(|(_, p)| p.1), failing(&phi, |p| p.1));
    rep.gate_with("phi_commutes_with_pi", phi.iter().all(|(_, p)| p.2), failing(&phi, |p| p.2));
    rep.lap("phi");

    let diagram = wlp_diagram_check(delta, opts.seed, opts.bound, opts.max_retries).map_err(lib)?;
    let crux_bad: Vec<Value> = diagram
        .crux
        .entries
        .iter()
        .filter(|e| !e.passed())
        .map(|e| json!({ "r": e.r, "m_rank": e.m_rank, "nullity": e.nullity, "phi_rank": e.phi_rank, "stress_dim": e.stress_dim }))
        .collect();
    rep.gate_with("crux", diagram.crux.passed, (!diagram.crux.passed).then(|| json!(crux_bad)));
    rep.gate("diagram_commutes", diagram.commutes());
    rep.gate("injectivity_matches_crux", diagram.injectivity_matches_crux);
    rep.set("crux_attempts", diagram.crux.attempts);
    rep.set(
        "crux",
        diagram
            .crux
            .entries
            .iter()
            .map(|e| {
                json!({
                    "r": e.r,
                    "k": e.k,
                    "pivot_compatible": e.pivot_compatible,
                    "nullity": e.nullity,
                    "m_rank": e.m_rank,
                    "stress_dim": e.stress_dim,
                    "phi_rank": e.phi_rank,
                    "xi_matches_phi": e.xi_matches_phi,
                    "xi_vanishes_off_base": e.xi_vanishes_off_base,
                    "image_in_space": e.image_in_space,
                })
            })
            .collect::<Vec<_>>(),
    );
    rep.set(
        "diagram",
        diagram
            .degrees
            .iter()
            .map(|x| {
                json!({
                    "r": x.r,
                    "matrices_equal": x.matrices_equal,
                    "agree_everywhere": x.agree_everywhere,
                    "omega_rank": x.omega_rank,
                    "omega_injective": x.omega_injective,
                })
            })
            .collect::<Vec<_>>(),
    );
    rep.set("omega_in_space", diagram.omega_in_space);
    rep.lap("crux");
    finish(opts, rep)
}
