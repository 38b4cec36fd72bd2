//! Scenario files: sectioned TOML describing one experiment.
//!
//! ```toml
//! name = "example"
//! [eit]        # EitMedium fields
//! [absorber]   # RamanAbsorber fields (optional section)
//! [line]       # AtomicLine fields (optional, defaults to Rb D1)
//! [sweep]      # SweepSpec fields (optional)
//! [options]    # run options
//! ```
//!
//! Unknown keys are rejected and every problem is reported with its line.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};
use toml::Spanned;

use crate::error::{ValidationErrors, Violation};
use crate::model::{AtomicLine, EitMedium, RamanAbsorber};
use crate::scan::{Axis, Scale, SweepSpec};
use crate::susceptibility::LineshapeOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StokesNorm {
    /// Stokes intensity relative to the input signal intensity.
    #[default]
    Input,
    /// Stokes intensity relative to the maximum of the reported curve.
    CurveMax,
}

impl StokesNorm {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "input" => Some(StokesNorm::Input),
            "curve-max" => Some(StokesNorm::CurveMax),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Options {
    /// Centre the absorber line on its light-shifted position.
    pub light_shift: bool,
    pub exact_lineshape: bool,
    /// Input signal amplitude (real).
    pub signal_input: f64,
    /// Input idler amplitude (real).
    pub stokes_seed: f64,
    pub stokes_normalization: StokesNorm,
    /// Absorber depth used instead of the one implied by the absorber.
    pub d_abs: Option<f64>,
    /// Design target D_abs/D.
    pub target_depth_ratio: f64,
    /// Isotope fractions; their ratio times D gives the absorber's D_2L.
    pub eit_fraction: Option<f64>,
    pub absorber_fraction: Option<f64>,
    /// Stokes width to report next to the bandwidth check, MHz.
    pub reference_stokes_width: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            light_shift: true,
            exact_lineshape: false,
            signal_input: 1.0,
            stokes_seed: 1.0,
            stokes_normalization: StokesNorm::Input,
            d_abs: None,
            target_depth_ratio: 1.1,
            eit_fraction: None,
            absorber_fraction: None,
            reference_stokes_width: None,
        }
    }
}

impl Options {
    pub fn lineshape(&self) -> LineshapeOptions {
        LineshapeOptions { light_shift: self.light_shift, exact: self.exact_lineshape }
    }

    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        if !(self.signal_input.is_finite() && self.signal_input > 0.0) {
            errs.push(Violation::new("signal_input", self.signal_input, "must be positive and finite"));
        }
        if !self.stokes_seed.is_finite() {
            errs.push(Violation::new("stokes_seed", self.stokes_seed, "must be finite"));
        }
        if let Some(d) = self.d_abs {
            if !(d.is_finite() && d >= 0.0) {
                errs.push(Violation::new("d_abs", d, "must be non-negative and finite"));
            }
        }
        if !(self.target_depth_ratio.is_finite() && self.target_depth_ratio >= 0.0) {
            errs.push(Violation::new("target_depth_ratio", self.target_depth_ratio, "must be non-negative and finite"));
        }
        for (name, v) in [("eit_fraction", self.eit_fraction), ("absorber_fraction", self.absorber_fraction)] {
            if let Some(f) = v {
                if !(f > 0.0 && f <= 1.0) {
                    errs.push(Violation::new(name, f, "must lie in (0, 1]"));
                }
            }
        }
        if self.eit_fraction.is_some() != self.absorber_fraction.is_some() {
            errs.push(Violation::bare("eit_fraction", "and absorber_fraction must be given together"));
        }
        if let Some(w) = self.reference_stokes_width {
            if !(w.is_finite() && w > 0.0) {
                errs.push(Violation::new("reference_stokes_width", w, "must be positive and finite"));
            }
        }
        errs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub eit: EitMedium,
    pub absorber: Option<RamanAbsorber>,
    pub line: AtomicLine,
    pub sweep: Option<SweepSpec>,
    pub options: Options,
}

impl Scenario {
    /// Minimal scenario around a medium, with default options.
    pub fn new(name: impl Into<String>, eit: EitMedium) -> Self {
        Scenario {
            name: name.into(),
            description: None,
            eit,
            absorber: None,
            line: AtomicLine::RB_D1,
            sweep: None,
            options: Options::default(),
        }
    }

    /// Every violated constraint, with section-qualified field names.
    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        let mut add = |section: &str, found: ValidationErrors| {
            for mut v in found.0 {
                v.field = format!("{section}.{}", v.field);
                errs.push(v);
            }
        };
        add("eit", self.eit.check());
        if let Some(a) = &self.absorber {
            add("absorber", a.check());
        }
        add("line", self.line.check());
        if let Some(s) = &self.sweep {
            add("sweep", s.check());
        }
        add("options", self.options.check());
        errs
    }

    /// The absorber depth the scenario asks for: the explicit override, else
    /// the absorber's effective depth, else zero.
    pub fn absorber_depth(&self) -> f64 {
        match (self.options.d_abs, &self.absorber) {
            (Some(d), _) => d,
            (None, Some(a)) => crate::susceptibility::effective_depth(a),
            (None, None) => 0.0,
        }
    }

    pub fn from_toml_str(input: &str) -> Result<Scenario, ValidationErrors> {
        parse(input)
    }
}

/// Check every invariant; return the scenario unchanged or all violations.
pub fn validate(scenario: Scenario) -> Result<Scenario, ValidationErrors> {
    scenario.check().into_result().map(|_| scenario)
}

/// Scenario files compiled into the library.
pub const SHIPPED: &[(&str, &str)] = &[
    ("fig2_default", include_str!("../scenarios/fig2_default.toml")),
    ("fig4_dabs_0.83", include_str!("../scenarios/fig4_dabs_0.83.toml")),
    ("fig4_dabs_4.16", include_str!("../scenarios/fig4_dabs_4.16.toml")),
    ("fig4_dabs_41.6", include_str!("../scenarios/fig4_dabs_41.6.toml")),
    ("sec5_proposed_mix", include_str!("../scenarios/sec5_proposed_mix.toml")),
    ("sec5_as_performed", include_str!("../scenarios/sec5_as_performed.toml")),
];

/// Source text of a shipped scenario.
pub fn shipped_source(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed shipped scenario.
pub fn shipped(name: &str) -> Option<Scenario> {
    shipped_source(name).map(|s| parse(s).unwrap_or_else(|e| panic!("shipped scenario {name} is invalid: {e}")))
}

struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(input: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(input.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    fn line(&self, span: Range<usize>) -> usize {
        self.starts.partition_point(|&s| s <= span.start)
    }
}

/// Reads one table, remembering which keys were consumed and where they live.
struct Reader<'a, 'i> {
    section: &'static str,
    table: &'a DeTable<'i>,
    lines: &'a LineIndex,
    used: Vec<String>,
    errs: ValidationErrors,
    at: BTreeMap<String, usize>,
}

impl<'a, 'i> Reader<'a, 'i> {
    fn new(section: &'static str, table: &'a DeTable<'i>, lines: &'a LineIndex) -> Self {
        Reader { section, table, lines, used: Vec::new(), errs: ValidationErrors::default(), at: BTreeMap::new() }
    }

    fn qualified(&self, key: &str) -> String {
        if self.section.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.section)
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a Spanned<DeValue<'i>>> {
        self.used.push(key.to_string());
        let (k, v) = self.table.iter().find(|(k, _)| k.get_ref().as_ref() == key)?;
        self.at.insert(key.to_string(), self.lines.line(k.span()));
        Some(v)
    }

    fn wrong_type(&mut self, key: &str, v: &Spanned<DeValue<'i>>, want: &str) {
        let line = self.lines.line(v.span());
        self.errs.push(Violation::bare(self.qualified(key), format!("must be {want}")).at_line(Some(line)));
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.raw(key)?;
        let parsed = match v.get_ref() {
            DeValue::Float(f) => f.as_str().replace('_', "").parse::<f64>().ok(),
            DeValue::Integer(i) => i64::from_str_radix(&i.as_str().replace('_', ""), i.radix()).ok().map(|n| n as f64),
            _ => None,
        };
        if parsed.is_none() {
            self.wrong_type(key, v, "a number");
        }
        parsed
    }

    fn usize(&mut self, key: &str) -> Option<usize> {
        let v = self.raw(key)?;
        let parsed = match v.get_ref() {
            DeValue::Integer(i) => usize::from_str_radix(&i.as_str().replace('_', ""), i.radix()).ok(),
            _ => None,
        };
        if parsed.is_none() {
            self.wrong_type(key, v, "a non-negative integer");
        }
        parsed
    }

    fn bool(&mut self, key: &str) -> Option<bool> {
        let v = self.raw(key)?;
        let parsed = v.get_ref().as_bool();
        if parsed.is_none() {
            self.wrong_type(key, v, "true or false");
        }
        parsed
    }

    fn string(&mut self, key: &str) -> Option<String> {
        let v = self.raw(key)?;
        let parsed = v.get_ref().as_str().map(str::to_string);
        if parsed.is_none() {
            self.wrong_type(key, v, "a string");
        }
        parsed
    }

    fn required(&mut self, key: &str, fallback_line: usize) -> f64 {
        match self.f64(key) {
            Some(v) => v,
            None => {
                if !self.at.contains_key(key) {
                    let field = self.qualified(key);
                    self.errs.push(Violation::bare(field, "is required").at_line(Some(fallback_line)));
                }
                f64::NAN
            }
        }
    }

    /// Report keys nobody asked for, then hand back the collected errors.
    fn finish(mut self) -> (ValidationErrors, BTreeMap<String, usize>) {
        for (k, _) in self.table.iter() {
            let key = k.get_ref().as_ref();
            if !self.used.iter().any(|u| u == key) {
                let line = self.lines.line(k.span());
                let field = self.qualified(key);
                self.errs.push(Violation::bare(field, "is not a recognised key").at_line(Some(line)));
            }
        }
        (self.errs, self.at)
    }
}

fn sub_table<'a, 'i>(
    root: &'a DeTable<'i>,
    name: &str,
    lines: &LineIndex,
    errs: &mut ValidationErrors,
) -> Option<(&'a DeTable<'i>, usize)> {
    let (k, v) = root.iter().find(|(k, _)| k.get_ref().as_ref() == name)?;
    let line = lines.line(k.span());
    match v.get_ref() {
        DeValue::Table(t) => Some((t, line)),
        _ => {
            errs.push(Violation::bare(name, "must be a table").at_line(Some(line)));
            None
        }
    }
}

fn parse(input: &str) -> Result<Scenario, ValidationErrors> {
    let lines = LineIndex::new(input);
    let (doc, syntax) = DeTable::parse_recoverable(input);
    let mut errs = ValidationErrors::default();
    for e in &syntax {
        let line = e.span().map(|s| lines.line(s));
        errs.push(Violation::bare("toml", e.message().trim().to_string()).at_line(line));
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let root = doc.get_ref();
    let mut at: BTreeMap<String, usize> = BTreeMap::new();
    let mut merge =
        |section: &str, (e, lines_of): (ValidationErrors, BTreeMap<String, usize>), errs: &mut ValidationErrors| {
            errs.extend(e);
            for (k, l) in lines_of {
                at.insert(if section.is_empty() { k } else { format!("{section}.{k}") }, l);
            }
        };

    let mut top = Reader::new("", root, &lines);
    let name = top.string("name").unwrap_or_default();
    let description = top.string("description");
    for s in ["eit", "absorber", "line", "sweep", "options"] {
        top.used.push(s.to_string());
    }
    merge("", top.finish(), &mut errs);

    let eit = match sub_table(root, "eit", &lines, &mut errs) {
        Some((t, line)) => {
            let mut r = Reader::new("eit", t, &lines);
            let eit = EitMedium {
                gamma_ge: r.required("gamma_ge", line),
                gamma_gs: r.required("gamma_gs", line),
                delta_control: r.required("delta_control", line),
                omega_c: r.required("omega_c", line),
                depth: r.required("depth", line),
            };
            merge("eit", r.finish(), &mut errs);
            Some(eit)
        }
        None => {
            if !root.iter().any(|(k, _)| k.get_ref().as_ref() == "eit") {
                errs.push(Violation::bare("eit", "section is required"));
            }
            None
        }
    };

    let options = match sub_table(root, "options", &lines, &mut errs) {
        Some((t, _)) => {
            let mut r = Reader::new("options", t, &lines);
            let d = Options::default();
            let norm = match r.string("stokes_normalization") {
                Some(s) => match StokesNorm::parse(&s) {
                    Some(n) => n,
                    None => {
                        let line = r.at.get("stokes_normalization").copied();
                        r.errs.push(
                            Violation::bare(
                                "options.stokes_normalization",
                                format!("must be \"input\" or \"curve-max\" (got \"{s}\")"),
                            )
                            .at_line(line),
                        );
                        d.stokes_normalization
                    }
                },
                None => d.stokes_normalization,
            };
            let o = Options {
                light_shift: r.bool("light_shift").unwrap_or(d.light_shift),
                exact_lineshape: r.bool("exact_lineshape").unwrap_or(d.exact_lineshape),
                signal_input: r.f64("signal_input").unwrap_or(d.signal_input),
                stokes_seed: r.f64("stokes_seed").unwrap_or(d.stokes_seed),
                stokes_normalization: norm,
                d_abs: r.f64("d_abs"),
                target_depth_ratio: r.f64("target_depth_ratio").unwrap_or(d.target_depth_ratio),
                eit_fraction: r.f64("eit_fraction"),
                absorber_fraction: r.f64("absorber_fraction"),
                reference_stokes_width: r.f64("reference_stokes_width"),
            };
            merge("options", r.finish(), &mut errs);
            o
        }
        None => Options::default(),
    };

    let absorber = match sub_table(root, "absorber", &lines, &mut errs) {
        Some((t, line)) => {
            let mut r = Reader::new("absorber", t, &lines);
            let gamma_ab = r.required("gamma_ab", line);
            let explicit_d2l = r.f64("depth_2l");
            let from_mix = match (options.eit_fraction, options.absorber_fraction, &eit) {
                (Some(fe), Some(fa), Some(e)) if fe > 0.0 => Some(fa / fe * e.depth),
                _ => None,
            };
            let depth_2l = match (explicit_d2l, from_mix) {
                (Some(d), Some(m)) => {
                    if (d - m).abs() > 1e-9 * d.abs().max(m.abs()) {
                        let l = r.at.get("depth_2l").copied();
                        r.errs.push(
                            Violation::new(
                                "absorber.depth_2l",
                                d,
                                format!("conflicts with the isotope fractions, which give {m}"),
                            )
                            .at_line(l),
                        );
                    }
                    d
                }
                (Some(d), None) => d,
                (None, Some(m)) => m,
                (None, None) => {
                    r.errs.push(
                        Violation::bare("absorber.depth_2l", "is required unless isotope fractions are given")
                            .at_line(Some(line)),
                    );
                    f64::NAN
                }
            };
            let a = RamanAbsorber {
                omega_a: r.required("omega_a", line),
                delta_2: r.required("delta_2", line),
                gamma_ab,
                gamma_ac: r.f64("gamma_ac").unwrap_or(gamma_ab),
                gamma_cb: r.required("gamma_cb", line),
                depth_2l,
                center_offset: r.f64("center_offset").unwrap_or(0.0),
                delta_a: r.f64("delta_a"),
            };
            merge("absorber", r.finish(), &mut errs);
            Some(a)
        }
        None => None,
    };

    let line = match sub_table(root, "line", &lines, &mut errs) {
        Some((t, _)) => {
            let mut r = Reader::new("line", t, &lines);
            let d = AtomicLine::RB_D1;
            let l = AtomicLine {
                gamma_r: r.f64("gamma_r").unwrap_or(d.gamma_r),
                wavelength: r.f64("wavelength").unwrap_or(d.wavelength),
                density: r.f64("density").unwrap_or(d.density),
            };
            merge("line", r.finish(), &mut errs);
            l
        }
        None => AtomicLine::RB_D1,
    };

    let sweep = match sub_table(root, "sweep", &lines, &mut errs) {
        Some((t, line)) => {
            let mut r = Reader::new("sweep", t, &lines);
            let axis = match r.string("axis").as_deref() {
                Some("two-photon-detuning") => Some(Axis::TwoPhotonDetuning),
                Some("absorber-depth") => Some(Axis::AbsorberDepth),
                Some(other) => {
                    let l = r.at.get("axis").copied();
                    r.errs.push(
                        Violation::bare(
                            "sweep.axis",
                            format!("must be \"two-photon-detuning\" or \"absorber-depth\" (got \"{other}\")"),
                        )
                        .at_line(l),
                    );
                    None
                }
                None => {
                    if !r.at.contains_key("axis") {
                        r.errs.push(Violation::bare("sweep.axis", "is required").at_line(Some(line)));
                    }
                    None
                }
            };
            let scale = match r.string("scale").as_deref() {
                None | Some("linear") => Scale::Linear,
                Some("logarithmic") => Scale::Logarithmic,
                Some(other) => {
                    let l = r.at.get("scale").copied();
                    r.errs.push(
                        Violation::bare(
                            "sweep.scale",
                            format!("must be \"linear\" or \"logarithmic\" (got \"{other}\")"),
                        )
                        .at_line(l),
                    );
                    Scale::Linear
                }
            };
            let start = r.f64("start");
            let stop = r.f64("stop");
            let points = r.usize("points");
            let inner = r.usize("inner_points");
            let spec = match (axis, &eit) {
                (Some(axis), Some(e)) => {
                    let base = match axis {
                        Axis::TwoPhotonDetuning => SweepSpec::default_detuning(e),
                        Axis::AbsorberDepth => SweepSpec::default_depth(e),
                    };
                    Some(SweepSpec {
                        axis,
                        start: start.unwrap_or(base.start),
                        stop: stop.unwrap_or(base.stop),
                        points: points.unwrap_or(base.points),
                        scale: if r.at.contains_key("scale") { scale } else { base.scale },
                        inner_points: inner.unwrap_or(base.inner_points),
                    })
                }
                _ => None,
            };
            merge("sweep", r.finish(), &mut errs);
            spec
        }
        None => None,
    };

    let Some(eit) = eit else {
        return Err(errs);
    };
    let scenario = Scenario { name, description, eit, absorber, line, sweep, options };
    // Constraint violations on values that did parse, located by key.
    for v in scenario.check().0 {
        if errs.iter().any(|e| e.field == v.field) {
            continue;
        }
        let line = at.get(&v.field).copied();
        errs.push(v.at_line(line));
    }
    errs.into_result().map(|_| scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
name = \"t\"
[eit]
gamma_ge = 300.0
gamma_gs = 0.064
delta_control = 3036
omega_c = 50.0
depth = 15.0
";

    #[test]
    fn minimal_scenario_parses() {
        let s = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.name, "t");
        assert_eq!(s.eit.delta_control, 3036.0);
        assert!(s.absorber.is_none());
        assert_eq!(s.options, Options::default());
        assert_eq!(s.line, AtomicLine::RB_D1);
    }

    #[test]
    fn violations_carry_line_numbers() {
        let src = MINIMAL.replace("gamma_ge = 300.0", "gamma_ge = -1.0");
        let errs = Scenario::from_toml_str(&src).unwrap_err();
        assert_eq!(errs.len(), 1, "{errs}");
        let v = &errs.0[0];
        assert_eq!(v.line, Some(3));
        assert!(errs.to_string().contains("gamma_ge must be positive"), "{errs}");
    }

    #[test]
    fn all_problems_reported_together() {
        let src = format!("{MINIMAL}bogus = 1\n[options]\nstokes_seed = \"x\"\nlight_shift = 3\n");
        let src = src.replace("depth = 15.0", "depth = -2.0");
        let errs = Scenario::from_toml_str(&src).unwrap_err();
        let text = errs.to_string();
        assert!(text.contains("eit.bogus is not a recognised key"), "{text}");
        assert!(text.contains("options.stokes_seed must be a number"), "{text}");
        assert!(text.contains("options.light_shift must be true or false"), "{text}");
        assert!(text.contains("eit.depth must be non-negative"), "{text}");
        assert_eq!(errs.len(), 4, "{text}");
    }

    #[test]
    fn missing_required_field_named() {
        let src = MINIMAL.replace("omega_c = 50.0\n", "");
        let errs = Scenario::from_toml_str(&src).unwrap_err();
        assert_eq!(errs.len(), 1, "{errs}");
        assert!(errs.to_string().contains("eit.omega_c is required"));
    }

    #[test]
    fn syntax_error_located() {
        let errs = Scenario::from_toml_str("name = \"x\"\n[eit\ngamma_ge = 1\n").unwrap_err();
        assert_eq!(errs.0[0].line, Some(2), "{errs}");
    }

    #[test]
    fn missing_eit_section() {
        let errs = Scenario::from_toml_str("name = \"x\"\n").unwrap_err();
        assert!(errs.to_string().contains("eit section is required"));
    }

    #[test]
    fn isotope_fractions_set_two_level_depth() {
        let src = format!(
            "{MINIMAL}[absorber]\nomega_a = 100.0\ndelta_2 = 14700.0\ngamma_ab = 300.0\ngamma_cb = 0.064\n\
             [options]\neit_fraction = 0.15\nabsorber_fraction = 0.85\n"
        );
        let s = Scenario::from_toml_str(&src).unwrap();
        let a = s.absorber.unwrap();
        assert!((a.depth_2l - 85.0).abs() < 1e-12);
        assert_eq!(a.gamma_ac, 300.0);
    }

    #[test]
    fn underscores_and_radix_accepted() {
        let src = MINIMAL
            .replace("delta_control = 3036", "delta_control = 3_036")
            .replace("gamma_ge = 300.0", "gamma_ge = 3_00.0");
        let s = Scenario::from_toml_str(&src).unwrap();
        assert_eq!(s.eit.delta_control, 3036.0);
        assert_eq!(s.eit.gamma_ge, 300.0);
        let hex = MINIMAL.replace("delta_control = 3036", "delta_control = 0xBDC");
        assert_eq!(Scenario::from_toml_str(&hex).unwrap().eit.delta_control, 3036.0);
    }

    #[test]
    fn sweep_section_fills_defaults() {
        let src = format!("{MINIMAL}[sweep]\naxis = \"two-photon-detuning\"\npoints = 11\n");
        let s = Scenario::from_toml_str(&src).unwrap();
        let sw = s.sweep.unwrap();
        assert_eq!(sw.points, 11);
        assert!((sw.stop + sw.start).abs() < 1e-12 && sw.stop > 0.0);
    }

    #[test]
    fn shipped_scenarios_parse() {
        for (name, _) in SHIPPED {
            let s = shipped(name).unwrap();
            assert!(validate(s.clone()).is_ok(), "{name}");
        }
        assert!(shipped("nope").is_none());
    }
}
