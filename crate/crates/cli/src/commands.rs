use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use vardecomp::decompose::{Decomposition, ModelParams, ModelRegistry, Preset};
use vardecomp::eval::{
    evaluate_components, quadratic_fit, residue_point, synth_phantom, PhantomSpec, References, SweepRow,
    SWEEP_AMPLITUDES,
};
use vardecomp::image::{gaussian_noise, read_image, write_pgm, write_pgm_display, write_raw};
use vardecomp::{Image, NoiseSpec};

use crate::args::{DecomposeArgs, EvalArgs, ModelArgs, SynthArgs};
use crate::report::{
    emit, eval_table, sweep_table, DecomposeReport, EvalReport, SweepReport, SynthReport, DISPLAY_OFFSET,
    SCHEMA_VERSION,
};
use crate::{Failure, Outcome};

const DONE: Outcome = Outcome { converged: true };

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))
}

fn read_file(path: &Path) -> Result<Image, Failure> {
    read_image(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn synth(a: &SynthArgs) -> Result<Outcome, Failure> {
    let mut spec = match &a.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str::<PhantomSpec>(&text)
                .map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?
        }
        None => PhantomSpec::standard(),
    };
    if let Some(s) = a.sigma {
        spec.noise.sigma = s;
    }
    if let Some(s) = a.seed {
        spec.noise.seed = s;
    }
    spec.validate()?;
    create_dir(&a.out)?;
    let ph = synth_phantom(&spec)?;
    let mut files = BTreeMap::new();
    for (name, img, centered) in [
        ("u0", &ph.u0, false),
        ("v0", &ph.v0, true),
        ("w0", &ph.w0, true),
        ("f0", &ph.f0, false),
    ] {
        let raw = a.out.join(format!("{name}.rawf"));
        let pgm = a.out.join(format!("{name}.pgm"));
        write_raw(img, &raw)?;
        if centered {
            write_pgm_display(img, &pgm)?;
        } else {
            write_pgm(img, &pgm)?;
        }
        files.insert(name.to_string(), path_str(&raw));
        files.insert(format!("{name}_preview"), path_str(&pgm));
    }
    let spec_path = a.out.join("phantom.json");
    emit(&spec, Some(&spec_path), false)?;
    files.insert("spec".into(), path_str(&spec_path));
    log::info!("wrote phantom {}x{} to {}", spec.width, spec.height, a.out.display());
    emit(
        &SynthReport {
            schema_version: SCHEMA_VERSION,
            command: "synth",
            files,
            spec,
        },
        None,
        true,
    )?;
    Ok(DONE)
}

/// Model name and merged parameters: preset values, then explicit flags.
fn resolve_model(m: &ModelArgs) -> Result<(String, Option<Preset>, ModelParams), Failure> {
    let flags = m.params.to_params();
    match (m.preset, &m.model) {
        (Some(p), Some(name)) if name != p.model() => Err(Failure::Validation(format!(
            "preset {} belongs to model `{}`, not `{name}`",
            p.label(),
            p.model()
        ))),
        (Some(p), _) => Ok((p.model().to_string(), Some(p), p.params().overlay(&flags))),
        (None, Some(name)) => Ok((name.clone(), None, flags)),
        (None, None) => Err(Failure::Validation("one of --model or --paper-preset is required".into())),
    }
}

fn run_model(m: &ModelArgs, f: &Image) -> Result<(Decomposition, Option<Preset>, f64), Failure> {
    let (name, preset, params) = resolve_model(m)?;
    let model = ModelRegistry::builtin().build(&name, &params)?;
    log::info!("decomposing {}x{} with {name}", f.width(), f.height());
    let t0 = Instant::now();
    let dec = model.decompose_observed(f, &mut |s| log::debug!("iteration {} delta {:.6}", s.iteration, s.delta))?;
    let runtime = t0.elapsed().as_secs_f64();
    log::info!(
        "{name}: {} iterations, final delta {:.4}, {:.2}s",
        dec.iterations,
        dec.final_delta,
        runtime
    );
    Ok((dec, preset, runtime))
}

pub fn decompose(a: &DecomposeArgs) -> Result<Outcome, Failure> {
    // parameters are checked before the input is touched
    let (name, _, params) = resolve_model(&a.model)?;
    ModelRegistry::builtin().build(&name, &params)?;
    let f = read_file(&a.input)?;
    let (dec, preset, runtime) = run_model(&a.model, &f)?;
    create_dir(&a.out)?;
    let mut files = BTreeMap::new();
    let mut parts = vec![("u", dec.u.clone(), false), ("v", dec.texture(), true)];
    if let Some(w) = dec.noise() {
        parts.push(("w", w, true));
    }
    if let Some(nu) = &dec.nu {
        parts.push(("nu1", nu.nu1.clone(), false));
    }
    for (part, img, centered) in &parts {
        let raw = a.out.join(format!("{part}.rawf"));
        write_raw(img, &raw)?;
        files.insert(part.to_string(), path_str(&raw));
        if *part == "nu1" {
            continue;
        }
        let pgm = a.out.join(format!("{part}.pgm"));
        if *centered {
            write_pgm_display(img, &pgm)?;
        } else {
            write_pgm(img, &pgm)?;
        }
        files.insert(format!("{part}_preview"), path_str(&pgm));
    }
    let report_path = a.out.join("report.json");
    files.insert("report".into(), path_str(&report_path));
    let report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        command: "decompose",
        model: dec.model.clone(),
        preset: preset.map(|p| p.label().to_string()),
        input: path_str(&a.input),
        width: f.width(),
        height: f.height(),
        params: dec.params.clone(),
        iterations: dec.iterations,
        final_delta: dec.final_delta,
        converged: dec.converged,
        residual_rms: dec.residual_rms,
        v_certificate_norm: dec.v_certificate_norm,
        projector: dec.projector,
        nu: dec.nu.clone(),
        display_offset: DISPLAY_OFFSET,
        runtime_s: runtime,
        files,
    };
    emit(&report, Some(&report_path), true)?;
    Ok(Outcome {
        converged: dec.converged,
    })
}

struct RefImages {
    u0: Image,
    v0: Image,
    w0: Image,
}

fn read_references(dir: &Path) -> Result<RefImages, Failure> {
    Ok(RefImages {
        u0: read_file(&dir.join("u0.rawf"))?,
        v0: read_file(&dir.join("v0.rawf"))?,
        w0: read_file(&dir.join("w0.rawf"))?,
    })
}

impl RefImages {
    fn refs(&self) -> References<'_> {
        References {
            u0: &self.u0,
            v0: &self.v0,
            w0: &self.w0,
        }
    }
}

pub fn eval(a: &EvalArgs) -> Result<Outcome, Failure> {
    if a.sweep {
        return sweep(a);
    }
    let has_model = a.model.model.is_some() || a.model.preset.is_some();
    if has_model && (a.components.is_some() || a.u.is_some()) {
        return Err(Failure::Validation(
            "--model/--paper-preset decompose f0 themselves; drop --components/--u".into(),
        ));
    }
    let refs = read_references(&a.reference)?;
    let report = if has_model {
        let f0 = read_file(&a.reference.join("f0.rawf"))?;
        let (dec, _, runtime) = run_model(&a.model, &f0)?;
        let (err_u, err_v, residue) =
            evaluate_components(&dec.u, &dec.texture(), dec.noise().as_ref(), refs.refs())?;
        EvalReport {
            schema_version: SCHEMA_VERSION,
            command: "eval",
            model: Some(dec.model.clone()),
            err_u,
            err_v,
            residue,
            runtime_s: Some(runtime),
            iterations: Some(dec.iterations),
            converged: Some(dec.converged),
            params: Some(dec.params.clone()),
        }
    } else {
        let (u, v, w, meta) = match (&a.components, &a.u) {
            (Some(dir), _) => {
                let w_path = dir.join("w.rawf");
                let w = w_path.exists().then(|| read_file(&w_path)).transpose()?;
                (
                    read_file(&dir.join("u.rawf"))?,
                    read_file(&dir.join("v.rawf"))?,
                    w,
                    read_decompose_report(&dir.join("report.json")),
                )
            }
            (None, Some(u)) => {
                let v: &PathBuf = a.v.as_ref().expect("clap enforces --v with --u");
                let w = a.w.as_deref().map(read_file).transpose()?;
                (read_file(u)?, read_file(v)?, w, None)
            }
            (None, None) => {
                return Err(Failure::Validation(
                    "give --components, --u/--v[/--w], --model, --paper-preset or --sweep".into(),
                ))
            }
        };
        let (err_u, err_v, residue) = evaluate_components(&u, &v, w.as_ref(), refs.refs())?;
        let meta = meta.unwrap_or_default();
        EvalReport {
            schema_version: SCHEMA_VERSION,
            command: "eval",
            model: meta.model,
            err_u,
            err_v,
            residue,
            runtime_s: meta.runtime_s,
            iterations: meta.iterations,
            converged: meta.converged,
            params: meta.params,
        }
    };
    emit(&report, a.report.as_deref(), !a.table)?;
    if a.table {
        print!("{}", eval_table(&report));
    }
    // a non-converged run only maps to exit 3 when this command ran it
    Ok(Outcome {
        converged: !has_model || report.converged.unwrap_or(true),
    })
}

#[derive(Debug, Default, serde::Deserialize)]
struct DecomposeMeta {
    model: Option<String>,
    runtime_s: Option<f64>,
    iterations: Option<usize>,
    converged: Option<bool>,
    params: Option<ModelParams>,
}

/// Model metadata from a `decompose` report next to the components, if any.
fn read_decompose_report(path: &Path) -> Option<DecomposeMeta> {
    let text = std::fs::read_to_string(path).ok()?;
    match serde_json::from_str(&text) {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("ignoring unreadable {}: {e}", path.display());
            None
        }
    }
}

fn sweep(a: &EvalArgs) -> Result<Outcome, Failure> {
    if a.jobs == 0 {
        return Err(Failure::Validation("--jobs must be >= 1".into()));
    }
    let p = &a.model.params;
    let noise = NoiseSpec::new(p.noise_sigma.unwrap_or(20.0), p.seed.unwrap_or(0))?;
    let amplitudes = a.amplitudes.clone().unwrap_or_else(|| SWEEP_AMPLITUDES.to_vec());
    if amplitudes.is_empty() {
        return Err(Failure::Validation("--amplitudes is empty".into()));
    }
    let u0 = read_file(&a.reference.join("u0.rawf"))?;
    let v0 = read_file(&a.reference.join("v0.rawf"))?;
    let d = u0.add(&v0)?;
    let b = gaussian_noise(noise, d.width(), d.height())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Failure::Validation(e.to_string()))?;
    log::info!("residue sweep over {} amplitudes on {} threads", amplitudes.len(), a.jobs);
    let rows: Vec<SweepRow> = pool.install(|| {
        amplitudes
            .par_iter()
            .map(|&amp| residue_point(&d, &b, amp))
            .collect::<vardecomp::Result<Vec<_>>>()
    })?;
    let fit = quadratic_fit(&rows).ok();
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        command: "eval-sweep",
        sigma: noise.sigma,
        seed: noise.seed,
        rows,
        fit,
    };
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Io(e.to_string()))?;
        for r in &report.rows {
            w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    emit(&report, a.report.as_deref(), !a.table)?;
    if a.table {
        print!("{}", sweep_table(&report));
    }
    Ok(DONE)
}

