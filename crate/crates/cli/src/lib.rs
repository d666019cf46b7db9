//! Commands behind the `augsurf` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use augsurf::curve::{curve_sign_changes, interpolate, parse_points, sample_curve, write_csv, write_svg};
use augsurf::gregory::Mode;
use augsurf::mesh::{load_obj, parse_edge_params_json, ParamMethod, QuadMesh};
use augsurf::spline::SplineFamily;
use augsurf::surface::{
    analysis_fields, build_surface, continuity_report, export_obj, export_ply, sample_grid, section_sign_changes,
    tessellate, BuildOptions, CompositeSurface, ContinuityReport, TriangleMesh,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] augsurf::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "augsurf", version, about = "Interpolate quad meshes by smooth composite surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a surface from an OBJ quad mesh; write a tessellation and a continuity report.
    Build(BuildArgs),
    /// Interpolate a point list by a spline curve; write samples as CSV and a curvature comb as SVG.
    Curve(CurveArgs),
    /// Build with a per-edge parametrization and with ribbon-averaged (mean) intervals, and compare.
    Compare(CompareArgs),
}

/// Settings shared by the commands, from flags or a JSON config file.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// d3c1p2s4 or d5c2p2s4
    #[arg(long)]
    pub family: Option<String>,
    /// g1 or g2
    #[arg(long)]
    pub mode: Option<String>,
    /// uniform, chordal, centripetal or mean
    #[arg(long)]
    pub param: Option<String>,
    /// Exponent of the edge intervals, overriding the parametrization's own
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Samples per patch edge (build, compare) or along the curve (curve)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Degree of the cross-field direction polynomial (1 or 2)
    #[arg(long)]
    pub r_degree: Option<usize>,
    /// Samples per edge in the continuity report
    #[arg(long)]
    pub report_samples: Option<usize>,
}

impl Settings {
    /// Flags in `self` win over values in `other`.
    fn or(self, other: Settings) -> Settings {
        Settings {
            family: self.family.or(other.family),
            mode: self.mode.or(other.mode),
            param: self.param.or(other.param),
            alpha: self.alpha.or(other.alpha),
            samples: self.samples.or(other.samples),
            r_degree: self.r_degree.or(other.r_degree),
            report_samples: self.report_samples.or(other.report_samples),
        }
    }

    fn load(flags: &Settings, config: Option<&Path>) -> Result<Settings> {
        let file = match config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(augsurf::Error::from)?;
                serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?
            }
            None => Settings::default(),
        };
        Ok(flags.clone().or(file))
    }

    fn family(&self) -> Result<SplineFamily> {
        self.family.as_deref().map_or(Ok(SplineFamily::D5C2P2S4), |s| s.parse().map_err(|e| usage(format!("{e}"))))
    }

    fn param(&self) -> Result<ParamMethod> {
        self.param.as_deref().map_or(Ok(ParamMethod::Centripetal), |s| s.parse().map_err(|e| usage(format!("{e}"))))
    }

    /// Build options; the mode defaults to the highest the family supports.
    pub fn build_options(&self) -> Result<BuildOptions> {
        let family = self.family()?;
        let mode = match self.mode.as_deref() {
            Some(s) => s.parse().map_err(|e| usage(format!("{e}")))?,
            None if family.continuity() >= 2 => Mode::G2,
            None => Mode::G1,
        };
        let opts = BuildOptions {
            family,
            mode,
            param: self.param()?,
            alpha: self.alpha,
            r_degree: self.r_degree.unwrap_or(2),
            ..BuildOptions::default()
        };
        opts.validate().map_err(|e| usage(format!("{e}")))?;
        Ok(opts)
    }

    fn samples(&self, default: usize) -> Result<usize> {
        match self.samples.unwrap_or(default) {
            0 => Err(usage("--samples must be at least 1")),
            n => Ok(n),
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Input OBJ quad mesh
    pub input: PathBuf,
    #[command(flatten)]
    pub settings: Settings,
    /// JSON file with the same keys as the flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON list of `{"edge": [i, j], "d": value}` interval overrides
    #[arg(long)]
    pub edge_params: Option<PathBuf>,
    /// Output tessellation (.ply with curvature and isophote channels, or .obj)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Continuity report (JSON)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Text file with one 2D or 3D point per line
    pub points: PathBuf,
    #[command(flatten)]
    pub settings: Settings,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Interpolate an open polyline instead of a closed one
    #[arg(long)]
    pub open: bool,
    /// CSV of the samples (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG of control polygon, curve and curvature comb
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Comb tooth length per unit curvature
    #[arg(long, default_value_t = 0.1)]
    pub comb_scale: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Input OBJ quad mesh (all vertices regular)
    pub input: PathBuf,
    #[command(flatten)]
    pub settings: Settings,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prefix for the two tessellations, written as PREFIX.augmented.ply and PREFIX.mean.ply
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comparison report (JSON, stdout if omitted)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(a) => cmd_build(&a).map(|_| ()),
        Command::Curve(a) => cmd_curve(&a).map(|_| ()),
        Command::Compare(a) => cmd_compare(&a).map(|_| ()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(augsurf::Error::from)?;
    f.write_all(bytes).map_err(augsurf::Error::from)?;
    Ok(())
}

fn load_mesh(path: &Path) -> Result<QuadMesh> {
    load_obj(path)
        .map_err(|e| match e {
            augsurf::Error::Parse { line, msg } => {
                augsurf::Error::Parse { line, msg: format!("{}: {msg}", path.display()) }
            }
            e => e,
        })
        .map_err(Into::into)
}

/// Tessellation with `mean_curvature` and `isophote` channels.
pub fn shaded_tessellation(surface: &CompositeSurface, n: usize) -> Result<TriangleMesh> {
    let mut t = tessellate(surface, n);
    let f = analysis_fields(surface, &t.source);
    t.add_channel("mean_curvature", f.mean_curvature)?;
    t.add_channel("isophote", f.isophote)?;
    Ok(t)
}

fn export_mesh(t: &TriangleMesh, path: &Path) -> Result<()> {
    let obj = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj"));
    if obj {
        export_obj(t, path)?;
    } else {
        export_ply(t, path, &["mean_curvature", "isophote"])?;
    }
    Ok(())
}

pub struct BuildOutput {
    pub surface: CompositeSurface,
    pub report: ContinuityReport,
    pub mesh_path: PathBuf,
    pub report_path: PathBuf,
}

pub fn cmd_build(a: &BuildArgs) -> Result<BuildOutput> {
    let s = Settings::load(&a.settings, a.config.as_deref())?;
    let mut opts = s.build_options()?;
    let n = s.samples(8)?;
    let rn = s.report_samples.unwrap_or(16).max(1);
    let mesh_path = a.out.clone().unwrap_or_else(|| a.input.with_extension("ply"));
    let report_path = a.report.clone().unwrap_or_else(|| mesh_path.with_extension("json"));
    if mesh_path == report_path || mesh_path == a.input {
        return Err(usage("output paths must differ from each other and from the input"));
    }
    if let Some(p) = &a.edge_params {
        let text = fs::read_to_string(p).map_err(augsurf::Error::from)?;
        opts.edge_overrides = parse_edge_params_json(&text)?;
    }
    let mesh = load_mesh(&a.input)?;
    let surface = build_surface(mesh, &opts)?;
    log::info!("{} regular and {} gregory patches", surface.num_regular(), surface.num_gregory());
    let t = shaded_tessellation(&surface, n)?;
    export_mesh(&t, &mesh_path)?;
    let report = continuity_report(&surface, rn);
    write_file(&report_path, report.to_json().as_bytes())?;
    log::info!(
        "max position gap {:e}, max normal angle {:e} deg",
        report.summary.position_gap.max,
        report.summary.normal_angle.max
    );
    Ok(BuildOutput { surface, report, mesh_path, report_path })
}

pub fn cmd_curve(a: &CurveArgs) -> Result<usize> {
    let s = Settings::load(&a.settings, a.config.as_deref())?;
    let family = s.family()?;
    let param = s.param()?;
    if param == ParamMethod::Mean {
        return Err(usage("mean parametrization applies to meshes, not curves"));
    }
    let alpha = s.alpha.unwrap_or(param.default_alpha());
    if !(0.0..=1.0).contains(&alpha) {
        return Err(usage(format!("alpha {alpha} outside [0,1]")));
    }
    let n = s.samples(200)?;
    let text = fs::read_to_string(&a.points).map_err(augsurf::Error::from)?;
    let pts = parse_points(&text)?;
    if pts.len() < 4 {
        return Err(usage(format!("need at least 4 points, got {}", pts.len())));
    }
    let curve = interpolate(pts, family, alpha, !a.open)?;
    let samples = sample_curve(&curve, n)?;
    let changes = curve_sign_changes(&curve, &samples);
    match &a.out {
        Some(p) => {
            let mut buf = Vec::new();
            write_csv(&samples, &mut buf)?;
            write_file(p, &buf)?;
        }
        None => write_csv(&samples, std::io::stdout().lock())?,
    }
    if let Some(p) = &a.svg {
        let mut buf = Vec::new();
        write_svg(curve.points(), &samples, a.comb_scale, &mut buf)?;
        write_file(p, &buf)?;
    }
    log::info!("{changes} curvature sign changes");
    Ok(changes)
}

/// Summary of one surface in a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStats {
    pub param: ParamMethod,
    pub section_sign_changes: usize,
    pub min_mean_curvature: f64,
    pub max_mean_curvature: f64,
    pub max_position_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub family: SplineFamily,
    pub samples: usize,
    pub vertices: usize,
    pub max_position_delta: f64,
    pub mean_position_delta: f64,
    pub augmented: SurfaceStats,
    pub mean: SurfaceStats,
}

fn stats(surface: &CompositeSurface, t: &TriangleMesh, n: usize) -> SurfaceStats {
    let h = t.channel("mean_curvature").unwrap_or(&[]);
    let finite = h.iter().copied().filter(|x| x.is_finite());
    SurfaceStats {
        param: surface.options.param,
        section_sign_changes: section_sign_changes(surface, n),
        min_mean_curvature: finite.clone().fold(f64::INFINITY, f64::min),
        max_mean_curvature: finite.fold(f64::NEG_INFINITY, f64::max),
        max_position_gap: continuity_report(surface, n).max_position_gap(),
    }
}

/// Compare two already loaded surfaces on the same mesh.
pub fn compare_surfaces(
    aug: &CompositeSurface,
    mean: &CompositeSurface,
    n: usize,
) -> Result<(CompareReport, [TriangleMesh; 2])> {
    let ga = sample_grid(aug, n);
    let gm = sample_grid(mean, n);
    let deltas: Vec<f64> = ga.iter().flatten().zip(gm.iter().flatten()).map(|(p, q)| (p - q).norm()).collect();
    let ta = shaded_tessellation(aug, n)?;
    let tm = shaded_tessellation(mean, n)?;
    let report = CompareReport {
        family: aug.options.family,
        samples: n,
        vertices: deltas.len(),
        max_position_delta: deltas.iter().copied().fold(0.0, f64::max),
        mean_position_delta: deltas.iter().sum::<f64>() / deltas.len().max(1) as f64,
        augmented: stats(aug, &ta, n),
        mean: stats(mean, &tm, n),
    };
    Ok((report, [ta, tm]))
}

pub fn compare_meshes(mesh: QuadMesh, opts: &BuildOptions, n: usize) -> Result<(CompareReport, [TriangleMesh; 2])> {
    let aug = build_surface(mesh.clone(), opts)?;
    let mean = build_surface(mesh, &BuildOptions { param: ParamMethod::Mean, ..opts.clone() })?;
    compare_surfaces(&aug, &mean, n)
}

pub fn cmd_compare(a: &CompareArgs) -> Result<CompareReport> {
    let s = Settings::load(&a.settings, a.config.as_deref())?;
    let opts = s.build_options()?;
    if opts.param == ParamMethod::Mean {
        return Err(usage("compare needs a per-edge parametrization other than mean"));
    }
    let n = s.samples(8)?;
    let mesh = load_mesh(&a.input)?;
    let (report, [ta, tm]) = compare_meshes(mesh, &opts, n)?;
    if let Some(prefix) = &a.out {
        let with = |tag: &str| {
            let mut p = prefix.clone().into_os_string();
            p.push(format!(".{tag}.ply"));
            PathBuf::from(p)
        };
        export_mesh(&ta, &with("augmented"))?;
        export_mesh(&tm, &with("mean"))?;
    }
    let json = serde_json::to_string_pretty(&report).map_err(augsurf::Error::from)?;
    match &a.report {
        Some(p) => write_file(p, json.as_bytes())?,
        None => println!("{json}"),
    }
    Ok(report)
}
