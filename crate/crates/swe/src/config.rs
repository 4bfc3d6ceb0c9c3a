//! Simulation configuration: scheme catalog, flat key = value config files,
//! and the built-in experiment presets.
//!
//! A config file is plain text, one `key = value` pair per line, with `#`
//! starting a comment. Keys are fixed; unknown keys are rejected so typos
//! cannot silently fall back to defaults. The initial conditions follow the
//! built-in wave families
//!
//!   1D: u = A sin x,             h = h0 + A sin(x + φ0),
//!   2D: u = A sin(x + φ0) sin y, v = A sin x sin y,
//!       h = h0 + A cos(x + φ0) cos y,
//!
//! parametrized by `amplitude`, `phase`, and `depth`.

use std::path::PathBuf;

use crate::fv2d::InterpMode;
use crate::mesh1d::{MonitorKind, MonitorSpec};
use crate::mesh2d::{WeightKind, WeightSpec};
use crate::model::{Grid1D, Grid2D, State1D, State2D};
use crate::{Error, Result};

/// Identifiers of the time-stepping schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    LagrangianExplicit,
    LagrangianTrapezoidal,
    ConservativeExplicit,
    ConservativeTrapezoidal,
    ComputationalExplicit,
    ComputationalTrapezoidal,
    ComputationalConservativeExplicit,
    ComputationalConservativeTrapezoidal,
    FvExplicit,
    FvTrapezoidal,
    EulerianTrapezoidal,
}

impl SchemeId {
    pub const ALL: [SchemeId; 11] = [
        SchemeId::LagrangianExplicit,
        SchemeId::LagrangianTrapezoidal,
        SchemeId::ConservativeExplicit,
        SchemeId::ConservativeTrapezoidal,
        SchemeId::ComputationalExplicit,
        SchemeId::ComputationalTrapezoidal,
        SchemeId::ComputationalConservativeExplicit,
        SchemeId::ComputationalConservativeTrapezoidal,
        SchemeId::FvExplicit,
        SchemeId::FvTrapezoidal,
        SchemeId::EulerianTrapezoidal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::LagrangianExplicit => "lagrangian-explicit",
            SchemeId::LagrangianTrapezoidal => "lagrangian-trapezoidal",
            SchemeId::ConservativeExplicit => "conservative-explicit",
            SchemeId::ConservativeTrapezoidal => "conservative-trapezoidal",
            SchemeId::ComputationalExplicit => "computational-explicit",
            SchemeId::ComputationalTrapezoidal => "computational-trapezoidal",
            SchemeId::ComputationalConservativeExplicit => "computational-conservative-explicit",
            SchemeId::ComputationalConservativeTrapezoidal => {
                "computational-conservative-trapezoidal"
            }
            SchemeId::FvExplicit => "fv-explicit",
            SchemeId::FvTrapezoidal => "fv-trapezoidal",
            SchemeId::EulerianTrapezoidal => "eulerian-trapezoidal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }

    /// 2D schemes advance (u, v, h) on a doubly periodic lattice.
    pub fn is_two_dimensional(self) -> bool {
        matches!(
            self,
            SchemeId::FvExplicit | SchemeId::FvTrapezoidal | SchemeId::EulerianTrapezoidal
        )
    }

    /// Schemes that take mesh motion from the 1D equidistribution solve.
    pub fn uses_monitor(self) -> bool {
        matches!(
            self,
            SchemeId::ComputationalExplicit
                | SchemeId::ComputationalTrapezoidal
                | SchemeId::ComputationalConservativeExplicit
                | SchemeId::ComputationalConservativeTrapezoidal
        )
    }

    /// Schemes that take mesh motion from the 2D elliptic solve.
    pub fn uses_weight(self) -> bool {
        matches!(self, SchemeId::EulerianTrapezoidal)
    }
}

fn parse_monitor_kind(s: &str) -> Result<MonitorKind> {
    Ok(match s {
        "arc-length-u" => MonitorKind::ArcLengthU,
        "arc-length-h" => MonitorKind::ArcLengthH,
        "arc-length-uh" => MonitorKind::ArcLengthUH,
        "curvature-u" => MonitorKind::CurvatureU,
        "curvature-h" => MonitorKind::CurvatureH,
        "curvature-uh" => MonitorKind::CurvatureUH,
        "constant" => MonitorKind::Constant,
        _ => return Err(Error::Config(format!("unknown monitor '{s}'"))),
    })
}

fn parse_weight_kind(s: &str) -> Result<WeightKind> {
    Ok(match s {
        "velocity-gradient" => WeightKind::VelocityGradient,
        "height-curvature" => WeightKind::HeightCurvature,
        "constant" => WeightKind::Constant,
        _ => return Err(Error::Config(format!("unknown weight '{s}'"))),
    })
}

fn parse_interp_mode(s: &str) -> Result<InterpMode> {
    Ok(match s {
        "sibson" => InterpMode::Sibson,
        "mean" => InterpMode::Mean,
        _ => return Err(Error::Config(format!("unknown interpolation mode '{s}'"))),
    })
}

/// Full description of one simulation. 1D schemes read `n`/`length`, 2D
/// schemes read `nx`/`ny`/`lx`/`ly`; the other family's fields are ignored.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub scheme: SchemeId,
    pub n: usize,
    pub length: f64,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub tau: f64,
    pub t_final: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub depth: f64,
    pub monitor: MonitorSpec,
    pub weight: WeightSpec,
    pub interp: InterpMode,
    pub scheme_tol: f64,
    pub scheme_max_iter: usize,
    pub mesh_tol: f64,
    /// 0 selects the per-size default (50·N resp. 50·Nx·Ny).
    pub mesh_max_iter: usize,
    pub snapshot_stride: usize,
    pub diagnostics_stride: usize,
    pub mesh_stride: usize,
    pub out: Option<PathBuf>,
}

impl SimulationConfig {
    fn base(scheme: SchemeId) -> Self {
        let two_d = scheme.is_two_dimensional();
        SimulationConfig {
            scheme,
            n: 0,
            length: 0.0,
            nx: 0,
            ny: 0,
            lx: 0.0,
            ly: 0.0,
            tau: 0.0,
            t_final: 0.0,
            amplitude: 0.4,
            phase: std::f64::consts::FRAC_PI_6,
            depth: 10.0,
            monitor: MonitorSpec::new(MonitorKind::Constant, 1.0, 1.0),
            weight: WeightSpec::new(WeightKind::Constant, 0.0).unwrap(),
            interp: InterpMode::Sibson,
            scheme_tol: 1e-12,
            scheme_max_iter: 200,
            mesh_tol: if two_d { 1e-10 } else { 1e-12 },
            mesh_max_iter: 0,
            snapshot_stride: 500,
            diagnostics_stride: 1,
            mesh_stride: 10,
            out: None,
        }
    }

    /// Built-in experiment presets.
    pub fn preset(name: &str) -> Result<Self> {
        let tau = 0.001;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut c = match name {
            "fig2" => {
                let mut c = Self::base(SchemeId::ConservativeTrapezoidal);
                c.n = 51;
                c.length = two_pi;
                c.t_final = 3.0;
                c
            }
            "fig3" => {
                let mut c = Self::base(SchemeId::ComputationalConservativeTrapezoidal);
                c.n = 51;
                c.length = two_pi;
                c.t_final = 3.0;
                c.monitor = MonitorSpec::new(MonitorKind::ArcLengthU, 0.8, 1.0);
                c
            }
            "fig4" => {
                let mut c = Self::base(SchemeId::FvTrapezoidal);
                c.nx = 71;
                c.ny = 71;
                c.lx = two_pi;
                c.ly = two_pi;
                c.t_final = 2.0;
                c
            }
            "fig5" => {
                let mut c = Self::base(SchemeId::EulerianTrapezoidal);
                c.nx = 71;
                c.ny = 71;
                c.lx = two_pi;
                c.ly = two_pi;
                c.t_final = 2.0;
                c.weight = WeightSpec::new(WeightKind::HeightCurvature, 0.4)?;
                c
            }
            "fig5-smoke" => {
                let mut c = Self::preset("fig5")?;
                c.nx = 31;
                c.ny = 31;
                c.t_final = 0.5;
                c
            }
            _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
        };
        c.tau = tau;
        c.validate()?;
        Ok(c)
    }

    /// Parses the flat key = value format. Every key has a default except
    /// the scheme, step, final time, and the grid of the scheme's dimension.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let take = |key: &str| -> Option<String> {
            pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
        };
        let scheme = match take("scheme") {
            Some(s) => SchemeId::parse(&s)?,
            None => return Err(Error::Config("missing required key 'scheme'".into())),
        };
        let mut c = Self::base(scheme);

        let known = [
            "scheme",
            "n",
            "length",
            "nx",
            "ny",
            "lx",
            "ly",
            "tau",
            "t_final",
            "amplitude",
            "phase",
            "depth",
            "monitor",
            "monitor_alpha",
            "monitor_beta",
            "weight",
            "weight_alpha",
            "interp",
            "scheme_tol",
            "scheme_max_iter",
            "mesh_tol",
            "mesh_max_iter",
            "snapshot_stride",
            "diagnostics_stride",
            "mesh_stride",
            "out",
        ];
        for (k, _) in &pairs {
            if !known.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key '{k}'")));
            }
        }
        let float = |key: &str, default: f64| -> Result<f64> {
            match take(key) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("key '{key}': bad number '{v}'"))),
                None => Ok(default),
            }
        };
        let count = |key: &str, default: usize| -> Result<usize> {
            match take(key) {
                Some(v) => v
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("key '{key}': bad count '{v}'"))),
                None => Ok(default),
            }
        };
        c.n = count("n", c.n)?;
        c.length = float("length", c.length)?;
        c.nx = count("nx", c.nx)?;
        c.ny = count("ny", c.ny)?;
        c.lx = float("lx", c.lx)?;
        c.ly = float("ly", c.ly)?;
        c.tau = float("tau", c.tau)?;
        c.t_final = float("t_final", c.t_final)?;
        c.amplitude = float("amplitude", c.amplitude)?;
        c.phase = float("phase", c.phase)?;
        c.depth = float("depth", c.depth)?;
        let monitor_kind = match take("monitor") {
            Some(s) => parse_monitor_kind(&s)?,
            None => c.monitor.kind,
        };
        c.monitor = MonitorSpec::new(
            monitor_kind,
            float("monitor_alpha", c.monitor.alpha)?,
            float("monitor_beta", c.monitor.beta)?,
        );
        let weight_kind = match take("weight") {
            Some(s) => parse_weight_kind(&s)?,
            None => c.weight.kind,
        };
        c.weight = WeightSpec::new(weight_kind, float("weight_alpha", c.weight.alpha)?)?;
        if let Some(s) = take("interp") {
            c.interp = parse_interp_mode(&s)?;
        }
        c.scheme_tol = float("scheme_tol", c.scheme_tol)?;
        c.scheme_max_iter = count("scheme_max_iter", c.scheme_max_iter)?;
        c.mesh_tol = float("mesh_tol", c.mesh_tol)?;
        c.mesh_max_iter = count("mesh_max_iter", c.mesh_max_iter)?;
        c.snapshot_stride = count("snapshot_stride", c.snapshot_stride)?;
        c.diagnostics_stride = count("diagnostics_stride", c.diagnostics_stride)?;
        c.mesh_stride = count("mesh_stride", c.mesh_stride)?;
        c.out = take("out").map(PathBuf::from);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::Config(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.scheme.is_two_dimensional() {
            if self.nx < 3 || self.ny < 3 {
                return Err(Error::Config(format!(
                    "2D scheme needs nx, ny >= 3, got {}x{}",
                    self.nx, self.ny
                )));
            }
            if !(self.lx > 0.0 && self.ly > 0.0) {
                return Err(Error::Config("2D scheme needs positive lx, ly".into()));
            }
        } else {
            if self.n < 3 {
                return Err(Error::Config(format!("1D scheme needs n >= 3, got {}", self.n)));
            }
            if !(self.length > 0.0) {
                return Err(Error::Config("1D scheme needs a positive length".into()));
            }
        }
        if !(self.scheme_tol > 0.0) || !(self.mesh_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.diagnostics_stride == 0 {
            return Err(Error::Config("diagnostics_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Serializes the configuration in the flat key-value file format; the
    /// output parses back to an identical configuration.
    pub fn to_config_text(&self) -> String {
        let monitor = match self.monitor.kind {
            MonitorKind::ArcLengthU => "arc-length-u",
            MonitorKind::ArcLengthH => "arc-length-h",
            MonitorKind::ArcLengthUH => "arc-length-uh",
            MonitorKind::CurvatureU => "curvature-u",
            MonitorKind::CurvatureH => "curvature-h",
            MonitorKind::CurvatureUH => "curvature-uh",
            MonitorKind::Constant => "constant",
        };
        let weight = match self.weight.kind {
            WeightKind::VelocityGradient => "velocity-gradient",
            WeightKind::HeightCurvature => "height-curvature",
            WeightKind::Constant => "constant",
        };
        let interp = match self.interp {
            InterpMode::Sibson => "sibson",
            InterpMode::Mean => "mean",
        };
        let mut text = String::new();
        let mut kv = |k: &str, v: String| {
            text.push_str(k);
            text.push_str(" = ");
            text.push_str(&v);
            text.push('\n');
        };
        kv("scheme", self.scheme.as_str().to_string());
        kv("n", self.n.to_string());
        kv("length", format!("{:e}", self.length));
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("lx", format!("{:e}", self.lx));
        kv("ly", format!("{:e}", self.ly));
        kv("tau", format!("{:e}", self.tau));
        kv("t_final", format!("{:e}", self.t_final));
        kv("amplitude", format!("{:e}", self.amplitude));
        kv("phase", format!("{:e}", self.phase));
        kv("depth", format!("{:e}", self.depth));
        kv("monitor", monitor.to_string());
        kv("monitor_alpha", format!("{:e}", self.monitor.alpha));
        kv("monitor_beta", format!("{:e}", self.monitor.beta));
        kv("weight", weight.to_string());
        kv("weight_alpha", format!("{:e}", self.weight.alpha));
        kv("interp", interp.to_string());
        kv("scheme_tol", format!("{:e}", self.scheme_tol));
        kv("scheme_max_iter", self.scheme_max_iter.to_string());
        kv("mesh_tol", format!("{:e}", self.mesh_tol));
        kv("mesh_max_iter", self.mesh_max_iter.to_string());
        kv("snapshot_stride", self.snapshot_stride.to_string());
        kv("diagnostics_stride", self.diagnostics_stride.to_string());
        kv("mesh_stride", self.mesh_stride.to_string());
        if let Some(out) = &self.out {
            kv("out", out.display().to_string());
        }
        text
    }

    /// Number of time steps to reach t_final (rounded to the nearest whole
    /// step, so τ is honored exactly and t_final up to one-step slack).
    pub fn steps(&self) -> usize {
        (self.t_final / self.tau).round().max(1.0) as usize
    }

    pub fn mesh_iteration_cap(&self) -> usize {
        if self.mesh_max_iter > 0 {
            self.mesh_max_iter
        } else if self.scheme.is_two_dimensional() {
            50 * self.nx * self.ny
        } else {
            50 * self.n
        }
    }

    /// Uniform initial grid and wave-family initial state (1D).
    pub fn initial_1d(&self) -> Result<(Grid1D, State1D)> {
        let grid = Grid1D::uniform(self.n, self.length)?;
        let u: Vec<f64> = grid.nodes().iter().map(|x| self.amplitude * x.sin()).collect();
        let h: Vec<f64> =
            grid.nodes().iter().map(|x| self.depth + self.amplitude * (x + self.phase).sin()).collect();
        let state = State1D::new(u, h)?;
        Ok((grid, state))
    }

    /// Uniform initial lattice and wave-family initial state (2D).
    pub fn initial_2d(&self) -> Result<(Grid2D, State2D)> {
        let grid = Grid2D::uniform(self.nx, self.ny, self.lx, self.ly)?;
        let nn = self.nx * self.ny;
        let mut u = vec![0.0; nn];
        let mut v = vec![0.0; nn];
        let mut h = vec![0.0; nn];
        for i in 0..nn {
            let (x, y) = (grid.xs()[i], grid.ys()[i]);
            u[i] = self.amplitude * (x + self.phase).sin() * y.sin();
            v[i] = self.amplitude * x.sin() * y.sin();
            h[i] = self.depth + self.amplitude * (x + self.phase).cos() * y.cos();
        }
        let state = State2D::new(u, v, h)?;
        Ok((grid, state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_ids_round_trip_through_their_names() {
        for id in SchemeId::ALL {
            assert_eq!(SchemeId::parse(id.as_str()).unwrap(), id);
        }
        assert!(SchemeId::parse("upwind").is_err());
    }

    #[test]
    fn parses_flat_text_with_comments_and_defaults() {
        let text = "\
# one-dimensional test run
scheme = conservative-trapezoidal
n = 51        # nodes
length = 6.283185307179586
tau = 0.001
t_final = 3.0
";
        let c = SimulationConfig::parse(text).unwrap();
        assert_eq!(c.scheme, SchemeId::ConservativeTrapezoidal);
        assert_eq!(c.n, 51);
        assert_eq!(c.tau, 0.001);
        assert_eq!(c.amplitude, 0.4);
        assert_eq!(c.depth, 10.0);
        assert_eq!(c.scheme_max_iter, 200);
        assert_eq!(c.steps(), 3000);
    }

    #[test]
    fn rejects_unknown_keys_and_malformed_numbers() {
        let bad_key = "scheme = lagrangian-explicit\nn = 10\nlength = 1\ntau = 0.1\nt_final = 1\nstep = 5\n";
        assert!(SimulationConfig::parse(bad_key).is_err());
        let bad_num = "scheme = lagrangian-explicit\nn = 10\nlength = 1\ntau = fast\nt_final = 1\n";
        assert!(SimulationConfig::parse(bad_num).is_err());
    }

    #[test]
    fn zero_step_fails_validation() {
        let text = "scheme = lagrangian-explicit\nn = 10\nlength = 1\ntau = 0\nt_final = 1\n";
        assert!(SimulationConfig::parse(text).is_err());
        let mut c = SimulationConfig::preset("fig2").unwrap();
        c.tau = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn presets_match_their_published_setups() {
        let c = SimulationConfig::preset("fig2").unwrap();
        assert_eq!(c.scheme, SchemeId::ConservativeTrapezoidal);
        assert_eq!((c.n, c.tau, c.t_final), (51, 0.001, 3.0));
        assert_eq!(c.length, 2.0 * std::f64::consts::PI);
        assert_eq!((c.amplitude, c.depth), (0.4, 10.0));
        assert_eq!(c.phase, std::f64::consts::FRAC_PI_6);

        let c = SimulationConfig::preset("fig3").unwrap();
        assert_eq!(c.scheme, SchemeId::ComputationalConservativeTrapezoidal);
        assert_eq!(c.monitor.kind, MonitorKind::ArcLengthU);
        assert_eq!(c.monitor.alpha, 0.8);

        let c = SimulationConfig::preset("fig4").unwrap();
        assert_eq!(c.scheme, SchemeId::FvTrapezoidal);
        assert_eq!((c.nx, c.ny, c.t_final), (71, 71, 2.0));
        assert_eq!(c.interp, InterpMode::Sibson);

        let c = SimulationConfig::preset("fig5").unwrap();
        assert_eq!(c.scheme, SchemeId::EulerianTrapezoidal);
        assert_eq!(c.weight.kind, WeightKind::HeightCurvature);
        assert_eq!(c.weight.alpha, 0.4);

        let c = SimulationConfig::preset("fig5-smoke").unwrap();
        assert_eq!((c.nx, c.ny, c.t_final), (31, 31, 0.5));
        assert!(SimulationConfig::preset("fig6").is_err());
    }

    #[test]
    fn initial_wave_family_is_evaluated_exactly() {
        let c = SimulationConfig::preset("fig2").unwrap();
        let (grid, state) = c.initial_1d().unwrap();
        for (i, &x) in grid.nodes().iter().enumerate() {
            assert_eq!(state.u[i], 0.4 * x.sin());
            assert_eq!(state.h[i], 10.0 + 0.4 * (x + std::f64::consts::FRAC_PI_6).sin());
        }

        let c = SimulationConfig::preset("fig4").unwrap();
        let (grid, state) = c.initial_2d().unwrap();
        let idx = grid.idx(17, 40);
        let (x, y) = (grid.xs()[idx], grid.ys()[idx]);
        assert_eq!(state.u[idx], 0.4 * (x + std::f64::consts::FRAC_PI_6).sin() * y.sin());
        assert_eq!(state.v[idx], 0.4 * x.sin() * y.sin());
        assert_eq!(state.h[idx], 10.0 + 0.4 * (x + std::f64::consts::FRAC_PI_6).cos() * y.cos());
    }

    #[test]
    fn config_text_round_trips_every_preset() {
        for name in ["fig2", "fig3", "fig4", "fig5", "fig5-smoke"] {
            let c = SimulationConfig::preset(name).unwrap();
            let back = SimulationConfig::parse(&c.to_config_text()).unwrap();
            assert_eq!(back.scheme, c.scheme, "{name}");
            assert_eq!(back.n, c.n);
            assert_eq!(back.nx, c.nx);
            assert_eq!(back.tau, c.tau);
            assert_eq!(back.t_final, c.t_final);
            assert_eq!(back.length, c.length);
            assert_eq!(back.lx, c.lx);
            assert_eq!(back.monitor.kind, c.monitor.kind);
            assert_eq!(back.monitor.alpha, c.monitor.alpha);
            assert_eq!(back.weight.kind, c.weight.kind);
            assert_eq!(back.weight.alpha, c.weight.alpha);
            assert_eq!(back.scheme_tol, c.scheme_tol);
            assert_eq!(back.mesh_tol, c.mesh_tol);
        }
    }
}
