use crate::checks::{sector_scans, Suite, CHECKS};
use crate::config::DetectionKey;
use crate::output::{columns_csv, matrix_csv, pgm16, tag, RunManifest, StageTiming, Writer};
use crate::{CliError, RunConfig};
use anyhow::{Context, Result};
use cavity_solver::{calibrate_speed, solve_mode_table, CalibrateOptions, ModeSolution, Region};
use nalgebra::DMatrix;
use polariton_model::{Model, Polariton, Sector};
use spectroscopy::{
    beat_spectrum, coherence_scan_detected, dominant_beat, hyperspectral_dynamics, hyperspectral_linear,
    linear_spectrum, third_order_2dir, Detection, HyperspectralImage,
};
use std::time::Instant;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    SolveModes,
    Calibrate,
    Linear,
    Spectrum2d,
    CoherenceScan,
    Beats,
    ImageLinear,
    ImageDynamics,
    ReproducePaper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveModes => "solve-modes",
            Command::Calibrate => "calibrate",
            Command::Linear => "linear",
            Command::Spectrum2d => "spectrum2d",
            Command::CoherenceScan => "coherence-scan",
            Command::Beats => "beats",
            Command::ImageLinear => "image-linear",
            Command::ImageDynamics => "image-dynamics",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

/// What a finished command produced.
#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<std::path::PathBuf>,
    /// Human-readable report for standard output.
    pub report: String,
    pub diagnostics: Table,
}

/// Per-command state: timings, diagnostics and the artifact writer.
struct Run<'a> {
    cfg: &'a RunConfig,
    cmd: Command,
    out: Writer,
    stages: Vec<StageTiming>,
    diag: Table,
    report: String,
}

impl<'a> Run<'a> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T, CliError> {
        let t = Instant::now();
        let r = f(self).map_err(|source| CliError::Stage {
            stage: name.to_string(),
            source,
        });
        self.stages.push(StageTiming {
            name: name.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        r
    }

    fn file(&self, key: &str, ext: &str) -> String {
        if key.is_empty() {
            format!("{}.{ext}", self.cmd.name())
        } else {
            format!("{}_{key}.{ext}", self.cmd.name())
        }
    }

    fn put(&mut self, key: &str, ext: &str, bytes: &[u8]) -> Result<()> {
        let name = self.file(key, ext);
        self.out.write(&name, bytes)?;
        Ok(())
    }

    fn diag(&mut self, key: &str, v: impl Into<Value>) {
        self.diag.insert(key.to_string(), v.into());
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.report.push_str(line.as_ref());
        self.report.push('\n');
    }

    fn model(&self) -> Result<Model> {
        Model::new(self.cfg.model.clone()).context("building model")
    }
}

fn pair_key(p: (Polariton, Polariton)) -> String {
    format!("{}-{}", p.0, p.1)
}

fn detection(key: DetectionKey) -> Detection {
    match key {
        DetectionKey::Full => Detection::Full,
        DetectionKey::A => Detection::Sector(Sector::A),
        DetectionKey::B => Detection::Sector(Sector::B),
    }
}

fn detection_tag(key: DetectionKey) -> &'static str {
    match key {
        DetectionKey::Full => "full",
        DetectionKey::A => "A",
        DetectionKey::B => "B",
    }
}

fn region_name(r: Option<Region>) -> &'static str {
    match r {
        Some(Region::A) => "A",
        Some(Region::B) => "B",
        None => "mixed",
    }
}

/// Field as a matrix with rows along `y`.
fn field_csv(m: &ModeSolution) -> String {
    let n = m.grid();
    let axis: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * m.spacing()).collect();
    let t = DMatrix::from_fn(n, n, |iy, ix| m.field[(ix, iy)]);
    matrix_csv(("y_um", &axis), ("x_um", &axis), &t)
}

fn image_files(run: &mut Run, key: &str, im: &HyperspectralImage) -> Result<()> {
    let csv = matrix_csv(("y_um", &im.y_axis), ("wavenumber_cm1", &im.omega_axis), &im.values);
    run.put(key, "csv", csv.as_bytes())?;
    run.put(key, "pgm", &pgm16(&im.values))?;
    Ok(())
}

/// Runs one command and writes its artifacts plus a manifest.
pub fn dispatch(cfg: &RunConfig, cmd: Command) -> Result<RunSummary, CliError> {
    let wall = Instant::now();
    let mut run = Run {
        cfg,
        cmd,
        out: Writer::new(&cfg.output_dir),
        stages: Vec::new(),
        diag: Table::new(),
        report: String::new(),
    };
    let verdict = match cmd {
        Command::SolveModes => solve_modes(&mut run),
        Command::Calibrate => calibrate(&mut run),
        Command::Linear => linear(&mut run),
        Command::Spectrum2d => spectrum2d(&mut run),
        Command::CoherenceScan => coherence(&mut run),
        Command::Beats => beats(&mut run),
        Command::ImageLinear => image_linear(&mut run),
        Command::ImageDynamics => image_dynamics(&mut run),
        Command::ReproducePaper => reproduce(&mut run),
    };
    // the manifest is written even when a stage failed, so diagnostics survive
    let cfg_text = toml::to_string(cfg).map_err(|e| CliError::Syntax(e.to_string()))?;
    run.out.write(&run.file("config", "toml"), cfg_text.as_bytes())?;
    let files = run.out.files().iter().map(|p| p.display().to_string()).collect();
    if let Err(e) = &verdict {
        run.diag.insert("error".into(), Value::String(e.to_string()));
    }
    let manifest = RunManifest {
        command: cmd.name().to_string(),
        version: env!("CARGO_PKG_VERSION"),
        wall_seconds: wall.elapsed().as_secs_f64(),
        stages: run.stages.clone(),
        diagnostics: run.diag.clone(),
        files,
        config: cfg,
    };
    run.out.write(&run.file("manifest", "toml"), manifest.to_toml()?.as_bytes())?;
    verdict?;
    Ok(RunSummary {
        files: run.out.files().to_vec(),
        report: run.report,
        diagnostics: run.diag,
    })
}

fn solve_modes(run: &mut Run) -> Result<(), CliError> {
    let g = &run.cfg.geometry;
    let count = run.cfg.modes.count;
    let modes = run.stage("modes", |_| Ok(solve_mode_table(g, count)?))?;
    run.stage("write", |r| {
        let key = format!("N{}", g.grid);
        let mut csv = String::from("# axis: mode index (ascending eigenvalue)\nindex,freq_cm1,dominant,s_wave\n");
        for m in &modes {
            csv += &format!("{},{:?},{},{}\n", m.index, m.freq, region_name(m.dominant), m.s_wave);
        }
        r.put(&key, "csv", csv.as_bytes())?;
        let bright: Vec<&ModeSolution> = modes.iter().filter(|m| m.s_wave).take(count).collect();
        for m in &bright {
            r.say(format!(
                "bright mode {:>3}  {:10.3} cm^-1  dominant {}  A fraction {:.3}",
                m.index,
                m.freq,
                region_name(m.dominant),
                m.a_fraction
            ));
            if r.cfg.modes.fields {
                r.put(&format!("{key}_field{}", m.index), "csv", field_csv(m).as_bytes())?;
            }
        }
        r.diag("bright_freq_cm1", bright.iter().map(|m| m.freq).collect::<Vec<_>>());
        r.diag("bright_index", bright.iter().map(|m| m.index as i64).collect::<Vec<_>>());
        r.diag("modes_examined", modes.len() as i64);
        Ok(())
    })
}

fn calibrate(run: &mut Run) -> Result<(), CliError> {
    let [ta, tb] = run.cfg.calibrate.targets;
    let opts = CalibrateOptions::default();
    let g = run.cfg.geometry.clone();
    let c = run.stage("calibrate", |_| Ok(calibrate_speed(&g, (ta, tb), &opts)?))?;
    run.stage("write", |r| {
        let csv = columns_csv(
            &["rows = bright mode A, bright mode B"],
            &["target_cm1", "solved_cm1", "residual_cm1"],
            &[vec![ta, tb], vec![c.solved.0, c.solved.1], vec![c.residuals.0, c.residuals.1]],
        );
        r.put(&format!("A{}_B{}", tag(ta), tag(tb)), "csv", csv.as_bytes())?;
        r.diag("c_eff_um_per_ps", c.geometry.c_eff);
        r.diag("delta_d_um", c.geometry.delta_d);
        r.diag("solved_cm1", vec![c.solved.0, c.solved.1]);
        r.diag("residual_cm1", vec![c.residuals.0, c.residuals.1]);
        r.diag("evaluations", c.evaluations as i64);
        r.diag("stage", format!("{:?}", c.stage));
        r.say(format!(
            "c_eff {:.3} um/ps  delta_d {:.4} um  solved ({:.2}, {:.2})  residuals ({:+.2}, {:+.2})",
            c.geometry.c_eff, c.geometry.delta_d, c.solved.0, c.solved.1, c.residuals.0, c.residuals.1
        ));
        Ok(())
    })?;
    if c.max_residual() > opts.tol_cm {
        return Err(CliError::Stage {
            stage: "calibrate".into(),
            source: anyhow::anyhow!(
                "best fit leaves residual {:.2} cm^-1 above the {} cm^-1 tolerance",
                c.max_residual(),
                opts.tol_cm
            ),
        });
    }
    Ok(())
}

fn linear(run: &mut Run) -> Result<(), CliError> {
    let s = run.stage("linear", |r| {
        let m = r.model()?;
        Ok((linear_spectrum(&m, &r.cfg.scan)?, m))
    })?;
    let (spec, m) = s;
    run.stage("write", |r| {
        let csv = columns_csv(
            &["wavenumber (cm^-1), lab frame"],
            &["wavenumber_cm1", "magnitude"],
            &[spec.axis.clone(), spec.magnitude()],
        );
        r.put(&format!("g{}", tag(m.params.g)), "csv", csv.as_bytes())?;
        let peaks: Vec<f64> = spec.peaks(0.05).iter().map(|p| p.position).collect();
        r.say(format!("bin {:.3} cm^-1", spec.bin()));
        for p in Polariton::ALL {
            let f = m.basis.freq(p);
            let near = peaks.iter().copied().min_by(|a, b| (a - f).abs().total_cmp(&(b - f).abs()));
            r.say(format!("{p}  model {f:9.3}  peak {}", near.map_or("none".into(), |v| format!("{v:9.3}"))));
        }
        r.diag("peaks_cm1", peaks);
        r.diag("bin_cm1", spec.bin());
        Ok(())
    })
}

fn spectrum2d(run: &mut Run) -> Result<(), CliError> {
    let t2 = run.cfg.spectrum2d.t2;
    let pathway = run.cfg.spectrum2d.pathway;
    let s = run.stage("spectrum2d", |r| Ok(third_order_2dir(&r.model()?, t2, &r.cfg.scan, pathway)?))?;
    run.stage("write", |r| {
        let pw = match pathway {
            spectroscopy::Pathway::Rephasing => "rephasing",
            spectroscopy::Pathway::NonRephasing => "nonrephasing",
            spectroscopy::Pathway::Total => "total",
        };
        let key = format!("{pw}_t2_{}", tag(t2));
        let rows = ("omega1_cm1", s.omega1_axis.as_slice());
        let cols = ("omega3_cm1", s.omega3_axis.as_slice());
        r.put(&key, "csv", matrix_csv(rows, cols, &s.magnitude()).as_bytes())?;
        r.put(&format!("{key}_re"), "csv", matrix_csv(rows, cols, &s.values.map(|z| z.re)).as_bytes())?;
        r.put(&format!("{key}_im"), "csv", matrix_csv(rows, cols, &s.values.map(|z| z.im)).as_bytes())?;
        r.diag("max_magnitude", s.max_magnitude());
        r.say(format!("{pw} spectrum at t2 = {t2} ps, max |S| {:.4e}", s.max_magnitude()));
        Ok(())
    })
}

fn coherence(run: &mut Run) -> Result<(), CliError> {
    let init = run.cfg.coherence.labels()?;
    let det = run.cfg.coherence.detection;
    let (scan, stats) = run.stage("coherence-scan", |r| {
        let m = r.model()?;
        let scan = coherence_scan_detected(&m, init, &r.cfg.scan, detection(det))?;
        let stats = sector_scans(&m, init, &r.cfg.scan, r.cfg.beats.min_beat)?;
        Ok((scan, stats))
    })?;
    run.stage("write", |r| {
        let key = format!("{}_{}", pair_key(init), detection_tag(det));
        let csv = matrix_csv(("t2_ps", &scan.t2_axis), ("omega3_cm1", &scan.omega3_axis), &scan.magnitude());
        r.put(&key, "csv", csv.as_bytes())?;
        r.say(format!("initial {}  (sector-resolved traces)", pair_key(init)));
        let mut t = Table::new();
        for s in &stats.stats {
            r.say(format!(
                "{:<5} rel {:.3}  1/e at {}  beat {} cm^-1",
                s.polariton.to_string(),
                s.rel,
                s.decay.map_or("never".into(), |d| format!("{d:.2} ps")),
                s.beat.map_or("none".into(), |b| format!("{b:.2}"))
            ));
            let mut e = Table::new();
            e.insert("relative_max".into(), s.rel.into());
            e.insert("integrated".into(), s.integrated.into());
            if let Some(d) = s.decay {
                e.insert("decay_ps".into(), d.into());
            }
            if let Some(b) = s.beat {
                e.insert("beat_cm1".into(), b.into());
            }
            t.insert(s.polariton.to_string(), Value::Table(e));
        }
        // signal read out through the cavity holding neither prepared state
        if init.0.sector() == init.1.sector() {
            let other = match init.0.sector() {
                Sector::A => Sector::B,
                Sector::B => Sector::A,
            };
            let own = stats.sector(init.0.sector()).max_magnitude();
            let cross = stats.sector(other).max_magnitude();
            let rel = if own > 0.0 { cross / own } else { 0.0 };
            r.diag("transfer_relative", rel);
            r.say(format!("signal through cavity {}: {rel:.3e} of the prepared cavity", other.letter()));
        }
        r.diag("traces", Value::Table(t));
        Ok(())
    })
}

fn beats(run: &mut Run) -> Result<(), CliError> {
    let init = run.cfg.coherence.labels()?;
    let det = run.cfg.coherence.detection;
    let (scan, omegas) = run.stage("coherence-scan", |r| {
        let m = r.model()?;
        let scan = coherence_scan_detected(&m, init, &r.cfg.scan, detection(det))?;
        let omegas = if r.cfg.beats.omega3.is_empty() {
            Polariton::ALL.iter().map(|&p| m.basis.freq(p)).collect()
        } else {
            r.cfg.beats.omega3.clone()
        };
        Ok((scan, omegas))
    })?;
    run.stage("beats", |r| {
        let spectra: Vec<_> = omegas.iter().map(|&w| beat_spectrum(&scan, w, r.cfg.scan.zero_pad)).collect();
        let axis = spectra[0].axis.clone();
        let keep: Vec<usize> = (0..axis.len()).filter(|&i| axis[i] >= 0.0).collect();
        let mut cols = vec![keep.iter().map(|&i| axis[i]).collect::<Vec<f64>>()];
        let mut names = vec!["beat_cm1".to_string()];
        let mut found = Vec::new();
        for (w, s) in omegas.iter().zip(&spectra) {
            let mag = s.magnitude();
            cols.push(keep.iter().map(|&i| mag[i]).collect());
            names.push(format!("omega3_{w:.2}"));
            let b = dominant_beat(s, r.cfg.beats.min_beat).map(|p| p.position);
            r.say(format!(
                "omega3 {w:9.2} cm^-1  dominant beat {}",
                b.map_or("none".into(), |v| format!("{v:.2} cm^-1"))
            ));
            found.push(b.unwrap_or(f64::NAN));
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let csv = columns_csv(&["beat frequency (cm^-1)", "columns = detection wavenumber omega3 (cm^-1)"], &refs, &cols);
        r.put(&format!("{}_{}", pair_key(init), detection_tag(det)), "csv", csv.as_bytes())?;
        r.diag("omega3_cm1", omegas.clone());
        r.diag("dominant_beat_cm1", found.into_iter().filter(|b| b.is_finite()).collect::<Vec<_>>());
        Ok(())
    })
}

fn image_linear(run: &mut Run) -> Result<(), CliError> {
    let suite = Suite::new(run.cfg.clone());
    let (ma, mb) = run.stage("modes", |_| suite.image_modes())?;
    let im = run.stage("image", |r| {
        Ok(hyperspectral_linear(&r.model()?, &ma, &mb, r.cfg.image.x0, &r.cfg.scan)?)
    })?;
    run.stage("write", |r| {
        image_files(r, &format!("x{}", tag(r.cfg.image.x0)), &im)?;
        r.diag("mode_freq_cm1", vec![ma.freq, mb.freq]);
        let m = r.model()?;
        for p in Polariton::ALL {
            let f = m.basis.freq(p);
            let (a, b) = (im.region_band(f, Region::A), im.region_band(f, Region::B));
            r.say(format!("{p:<5} region A {a:10.4}  region B {b:10.4}"));
            r.diag(&format!("{p}_region_AB"), vec![a, b]);
        }
        Ok(())
    })
}

fn image_dynamics(run: &mut Run) -> Result<(), CliError> {
    let init = run.cfg.coherence.labels()?;
    let suite = Suite::new(run.cfg.clone());
    let (ma, mb) = run.stage("modes", |_| suite.image_modes())?;
    let stack = run.stage("image", |r| {
        Ok(hyperspectral_dynamics(&r.model()?, &ma, &mb, r.cfg.image.x0, init, &r.cfg.scan)?)
    })?;
    run.stage("write", |r| {
        let base = format!("{}_x{}", pair_key(init), tag(r.cfg.image.x0));
        for im in stack.iter().step_by(r.cfg.image.frame_stride) {
            let t2 = im.t2.unwrap_or(0.0);
            image_files(r, &format!("{base}_t2_{}", tag((t2 * 1000.0).round() / 1000.0)), im)?;
        }
        let m = r.model()?;
        let t2: Vec<f64> = stack.iter().map(|im| im.t2.unwrap_or(0.0)).collect();
        let mut cols = vec![t2];
        let mut names = vec!["t2_ps".to_string()];
        for p in Polariton::ALL {
            let f = m.basis.freq(p);
            for (reg, l) in [(Region::A, "A"), (Region::B, "B")] {
                cols.push(stack.iter().map(|im| im.region_band(f, reg)).collect());
                names.push(format!("{p}_region_{l}"));
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let csv = columns_csv(&["waiting time t2 (ps)"], &refs, &cols);
        r.put(&format!("{base}_regions"), "csv", csv.as_bytes())?;
        r.diag("frames", stack.len() as i64);
        r.say(format!("{} frames, every {} written", stack.len(), r.cfg.image.frame_stride));
        Ok(())
    })
}

fn reproduce(run: &mut Run) -> Result<(), CliError> {
    let suite = Suite::new(run.cfg.clone());
    let mut lines = Vec::new();
    let outcomes = run.stage("checks", |_| {
        Ok(suite.run_all(|o| {
            eprintln!("{}", o.line());
        }))
    })?;
    let mut table = Table::new();
    for o in &outcomes {
        lines.push(o.line());
        let mut e = Table::new();
        e.insert("title".into(), o.title.into());
        e.insert("passed".into(), o.passed.into());
        e.insert("seconds".into(), o.seconds.into());
        e.insert("detail".into(), o.detail.clone().into());
        table.insert(format!("criterion_{}", o.id), Value::Table(e));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    lines.push(format!("{passed}/{} criteria pass", CHECKS.len()));
    // printed here so the table also reaches stdout when a check fails
    for l in &lines {
        println!("{l}");
    }
    run.diag("checks", Value::Table(table));
    let text = lines.join("\n") + "\n";
    run.stage("write", |r| r.put("table", "txt", text.as_bytes()))?;
    if passed != outcomes.len() {
        let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
        return Err(CliError::Stage {
            stage: "reproduce-paper".into(),
            source: anyhow::anyhow!("criteria {} failed", failed.join(", ")),
        });
    }
    Ok(())
}
