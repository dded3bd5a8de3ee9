//! Configuration merging: defaults, then a `key = value` config file, then
//! command-line flags, each layer overriding the last.

use std::path::PathBuf;

use outcrop_core::segment::PairOffset;
use outcrop_core::RunConfig;

/// A partial configuration; `None` fields leave the lower layer untouched.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overrides {
    pub scene: Option<PathBuf>,
    pub grid: Option<(usize, usize)>,
    pub downsample: Option<usize>,
    pub levels: Option<usize>,
    pub w_hue: Option<f64>,
    pub w_sat: Option<f64>,
    pub w_int: Option<f64>,
    pub offset: Option<PairOffset>,
    pub blur: Option<f64>,
    pub top_k: Option<usize>,
    pub suppress: Option<usize>,
    pub fov: Option<(usize, usize)>,
    pub step: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.scene {
            cfg.scene = v.clone();
        }
        if let Some((m, n)) = self.grid {
            cfg.grid_cols = m;
            cfg.grid_rows = n;
        }
        if let Some(v) = self.downsample {
            cfg.downsample = v;
        }
        if let Some(v) = self.levels {
            cfg.levels = v;
        }
        if let Some(v) = self.w_hue {
            cfg.w_hue = v;
        }
        if let Some(v) = self.w_sat {
            cfg.w_sat = v;
        }
        if let Some(v) = self.w_int {
            cfg.w_int = v;
        }
        if let Some(v) = self.offset {
            cfg.offset = v;
        }
        if let Some(v) = self.blur {
            cfg.blur_width = v;
        }
        if let Some(v) = self.top_k {
            cfg.top_k = v;
        }
        if let Some(v) = self.suppress {
            cfg.suppression = Some(v);
        }
        if let Some(v) = self.fov {
            cfg.fov = Some(v);
        }
        if let Some(v) = self.step {
            cfg.step = Some(v);
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
    }

    /// Parses line-oriented `key = value` text. Keys mirror the long flag
    /// names; `#` starts a comment; unknown keys are rejected.
    pub fn from_file(text: &str) -> Result<Self, String> {
        let mut over = Overrides::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", line_no + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let fail = |msg: String| format!("line {}: {key}: {msg}", line_no + 1);
            match key {
                "scene" => over.scene = Some(PathBuf::from(value)),
                "grid" => over.grid = Some(parse_grid(value).map_err(fail)?),
                "downsample" => over.downsample = Some(parse_num(value).map_err(fail)?),
                "levels" => over.levels = Some(parse_num(value).map_err(fail)?),
                "w-hue" => over.w_hue = Some(parse_num(value).map_err(fail)?),
                "w-sat" => over.w_sat = Some(parse_num(value).map_err(fail)?),
                "w-int" => over.w_int = Some(parse_num(value).map_err(fail)?),
                "offset" => over.offset = Some(parse_offset(value).map_err(fail)?),
                "blur" => over.blur = Some(parse_num(value).map_err(fail)?),
                "top-k" => over.top_k = Some(parse_num(value).map_err(fail)?),
                "suppress" => over.suppress = Some(parse_num(value).map_err(fail)?),
                "fov" => over.fov = Some(parse_grid(value).map_err(fail)?),
                "step" => over.step = Some(parse_grid(value).map_err(fail)?),
                "out" => over.out = Some(PathBuf::from(value)),
                _ => return Err(format!("line {}: unknown key `{key}`", line_no + 1)),
            }
        }
        Ok(over)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| format!("cannot parse `{s}`: {e}"))
}

/// Parses `MxN` pairs (grid shapes, fov, step).
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected `MxN`, got `{s}`"))?;
    Ok((parse_num(a.trim())?, parse_num(b.trim())?))
}

/// Parses a `DX,DY` pair offset.
pub fn parse_offset(s: &str) -> Result<PairOffset, String> {
    let (dx, dy) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `DX,DY`, got `{s}`"))?;
    PairOffset::new(parse_num(dx.trim())?, parse_num(dy.trim())?).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_offset_syntax() {
        assert_eq!(parse_grid("3x4").unwrap(), (3, 4));
        assert_eq!(parse_grid("11X4").unwrap(), (11, 4));
        assert!(parse_grid("3:4").is_err());
        let off = parse_offset("5,0").unwrap();
        assert_eq!((off.dx(), off.dy()), (5, 0));
        assert!(parse_offset("0,0").is_err(), "zero offset rejected");
        assert!(parse_offset("1").is_err());
    }

    #[test]
    fn empty_overrides_keep_defaults() {
        let mut cfg = RunConfig::default();
        Overrides::default().apply(&mut cfg);
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn file_values_parse_and_apply() {
        let over = Overrides::from_file(
            "# survey setup\n\
             scene = cliff.ppm\n\
             grid = 3x4   # pan x tilt\n\
             downsample = 8\n\
             w-int = 25\n\
             offset = 0,1\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        over.apply(&mut cfg);
        assert_eq!(cfg.scene, PathBuf::from("cliff.ppm"));
        assert_eq!((cfg.grid_cols, cfg.grid_rows), (3, 4));
        assert_eq!(cfg.downsample, 8);
        assert_eq!(cfg.w_int, 25.0);
        assert_eq!((cfg.offset.dx(), cfg.offset.dy()), (0, 1));
        assert_eq!(cfg.w_hue, 15.0, "untouched fields keep defaults");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Overrides::from_file("zoom = 3\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn malformed_values_are_rejected() {
        assert!(Overrides::from_file("downsample = four\n").is_err());
        assert!(Overrides::from_file("grid 3x4\n").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file = Overrides::from_file("downsample = 8\nblur = 5\n").unwrap();
        let flags = Overrides {
            downsample: Some(2),
            ..Default::default()
        };
        let mut cfg = RunConfig::default();
        file.apply(&mut cfg);
        flags.apply(&mut cfg);
        assert_eq!(cfg.downsample, 2, "flag wins");
        assert_eq!(cfg.blur_width, 5.0, "file value survives");
    }
}
