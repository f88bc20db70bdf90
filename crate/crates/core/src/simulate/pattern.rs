use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::Window;

/// A finite point configuration observed in a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    window: Window,
    coords: Vec<f64>,
    pub process: String,
    pub seed: Option<u64>,
}

impl PointPattern {
    /// Builds a pattern from flattened coordinates, rejecting points outside
    /// the window.
    pub fn new(window: Window, coords: Vec<f64>) -> Result<Self> {
        let d = window.dim();
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        if let Some(bad) = coords.chunks_exact(d).find(|u| !window.contains(u)) {
            return Err(Error::Degenerate(format!("point {bad:?} lies outside the window")));
        }
        Ok(PointPattern {
            window,
            coords,
            process: "unknown".into(),
            seed: None,
        })
    }

    pub(crate) fn from_trusted(window: Window, coords: Vec<f64>, process: &str, seed: Option<u64>) -> Self {
        debug_assert!(coords.chunks_exact(window.dim()).all(|u| window.contains(u)));
        PointPattern {
            window,
            coords,
            process: process.to_string(),
            seed,
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim())
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    /// Text format: `# d=<d> window=<lo..hi> process=<kind> seed=<s>` then
    /// one whitespace-separated point per line.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(
            out,
            "# d={} window={} process={} seed={}",
            self.dim(),
            self.window.to_compact(),
            self.process,
            seed
        )?;
        for u in self.points() {
            let line: Vec<String> = u.iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("line 1", "missing header"))??;
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| Error::parse("line 1", "header must start with `#`"))?;
        let (mut d, mut window, mut process, mut seed) = (None, None, "unknown".to_string(), None);
        for field in body.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::parse("line 1", format!("malformed field `{field}`")))?;
            match key {
                "d" => {
                    d = Some(value.parse::<usize>().map_err(|e| Error::parse("line 1, d", e.to_string()))?)
                }
                "window" => window = Some(Window::from_compact(value)?),
                "process" => process = value.to_string(),
                "seed" => {
                    seed = match value {
                        "none" => None,
                        v => Some(v.parse::<u64>().map_err(|e| Error::parse("line 1, seed", e.to_string()))?),
                    }
                }
                other => return Err(Error::parse("line 1", format!("unknown header key `{other}`"))),
            }
        }
        let window = window.ok_or_else(|| Error::parse("line 1", "missing window"))?;
        if let Some(d) = d {
            if d != window.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: window.dim(),
                });
            }
        }
        let mut coords = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let row: Vec<f64> = trimmed
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|e| Error::parse(format!("line {}", i + 2), e.to_string())))
                .collect::<Result<_>>()?;
            if row.len() != window.dim() {
                return Err(Error::parse(
                    format!("line {}", i + 2),
                    format!("expected {} coordinates, got {}", window.dim(), row.len()),
                ));
            }
            coords.extend(row);
        }
        let mut pattern = PointPattern::new(window, coords)?;
        pattern.process = process;
        pattern.seed = seed;
        Ok(pattern)
    }
}

impl fmt::Display for PointPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} points in {} ({})", self.len(), self.window.to_compact(), self.process)
    }
}
