use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{gaussian_noise, Image, NoiseSpec};

/// Axis-aligned pixel rectangle, `rows row0..row0+height`, `cols col0..col0+width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub row0: usize,
    pub col0: usize,
    pub width: usize,
    pub height: usize,
}

impl Region {
    fn contains(&self, row: usize, col: usize) -> bool {
        (self.row0..self.row0 + self.height).contains(&row) && (self.col0..self.col0 + self.width).contains(&col)
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }
}

/// Piecewise-constant shape drawn over the background; later shapes paint
/// over earlier ones. Coordinates are `(row, col)` of pixel centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Rect { region: Region, value: f64 },
    Disc { center: [f64; 2], radius: f64, value: f64 },
    Polygon { vertices: Vec<[f64; 2]>, value: f64 },
}

impl Shape {
    fn value(&self) -> f64 {
        match self {
            Shape::Rect { value, .. } | Shape::Disc { value, .. } | Shape::Polygon { value, .. } => *value,
        }
    }

    fn contains(&self, row: usize, col: usize) -> bool {
        let (y, x) = (row as f64, col as f64);
        match self {
            Shape::Rect { region, .. } => region.contains(row, col),
            Shape::Disc { center, radius, .. } => (y - center[0]).hypot(x - center[1]) <= *radius,
            Shape::Polygon { vertices, .. } => point_in_polygon(vertices, y, x),
        }
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        let inside = |r: f64, c: f64| r >= 0.0 && c >= 0.0 && r <= (height - 1) as f64 && c <= (width - 1) as f64;
        let ok = match self {
            Shape::Rect { region, .. } => region_fits(region, width, height),
            Shape::Disc { center, radius, .. } => {
                *radius > 0.0
                    && inside(center[0] - radius, center[1] - radius)
                    && inside(center[0] + radius, center[1] + radius)
            }
            Shape::Polygon { vertices, .. } => vertices.len() >= 3 && vertices.iter().all(|v| inside(v[0], v[1])),
        };
        if ok && self.value().is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("shape", format!("{self:?} does not fit a {width}x{height} image")))
        }
    }
}

fn region_fits(r: &Region, width: usize, height: usize) -> bool {
    r.width > 0 && r.height > 0 && r.col0 + r.width <= width && r.row0 + r.height <= height
}

/// Even-odd rule.
fn point_in_polygon(v: &[[f64; 2]], y: f64, x: f64) -> bool {
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let ([yi, xi], [yj, xj]) = (v[i], v[j]);
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// `amplitude * sin(omega * (x cos(theta) + y sin(theta)) + phase)` on a
/// region, zero outside; `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinePatch {
    pub region: Region,
    pub amplitude: f64,
    /// Radians per pixel.
    pub omega: f64,
    pub theta_deg: f64,
    #[serde(default)]
    pub phase: f64,
}

impl SinePatch {
    fn eval(&self, row: usize, col: usize) -> f64 {
        let t = self.theta_deg.to_radians();
        let arg = self.omega * (col as f64 * t.cos() + row as f64 * t.sin()) + self.phase;
        self.amplitude * arg.sin()
    }
}

/// Generator parameters for a synthetic test image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub background: f64,
    pub shapes: Vec<Shape>,
    pub textures: Vec<SinePatch>,
    pub noise: NoiseSpec,
}

/// Seed of the standard phantom's noise.
pub const STANDARD_SEED: u64 = 20_090_601;

impl PhantomSpec {
    /// A flat background plus noise, no shapes or textures.
    pub fn empty(width: usize, height: usize, background: f64, noise: NoiseSpec) -> Self {
        Self {
            width,
            height,
            background,
            shapes: Vec::new(),
            textures: Vec::new(),
            noise,
        }
    }

    /// 256x256: background 128, a rectangle (64), a disc (192) and a
    /// triangle (230); sine patches of frequency 0.6 at 0 degrees and 1.1 at
    /// 45 degrees, amplitude 40; Gaussian noise of sigma 20.
    pub fn standard() -> Self {
        let region = |row0, col0, height, width| Region {
            row0,
            col0,
            width,
            height,
        };
        Self {
            width: 256,
            height: 256,
            background: 128.0,
            shapes: vec![
                Shape::Rect {
                    region: region(16, 16, 64, 96),
                    value: 64.0,
                },
                Shape::Disc {
                    center: [48.0, 184.0],
                    radius: 34.0,
                    value: 192.0,
                },
                Shape::Polygon {
                    vertices: vec![[240.0, 16.0], [240.0, 112.0], [160.0, 64.0]],
                    value: 230.0,
                },
            ],
            textures: vec![
                SinePatch {
                    region: region(96, 16, 48, 224),
                    amplitude: 40.0,
                    omega: 0.6,
                    theta_deg: 0.0,
                    phase: 0.0,
                },
                SinePatch {
                    region: region(160, 136, 80, 104),
                    amplitude: 40.0,
                    omega: 1.1,
                    theta_deg: 45.0,
                    phase: 0.0,
                },
            ],
            noise: NoiseSpec {
                sigma: 20.0,
                seed: STANDARD_SEED,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("size", "phantom must be at least 1x1"));
        }
        if !self.background.is_finite() {
            return Err(Error::invalid("background", "must be finite"));
        }
        self.noise.validate()?;
        for s in &self.shapes {
            s.check(self.width, self.height)?;
        }
        for t in &self.textures {
            if !region_fits(&t.region, self.width, self.height) {
                return Err(Error::invalid(
                    "texture",
                    format!("{:?} does not fit a {}x{} image", t.region, self.width, self.height),
                ));
            }
            if ![t.amplitude, t.omega, t.theta_deg, t.phase].iter().all(|x| x.is_finite()) {
                return Err(Error::invalid("texture", "parameters must be finite"));
            }
        }
        Ok(())
    }
}

/// Reference components and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub u0: Image,
    pub v0: Image,
    pub w0: Image,
    pub f0: Image,
    pub spec: PhantomSpec,
}

pub fn synth_phantom(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let u0 = Image::from_fn(w, h, |i, j| {
        spec.shapes
            .iter()
            .rev()
            .find(|s| s.contains(i, j))
            .map_or(spec.background, Shape::value)
    });
    let v0 = Image::from_fn(w, h, |i, j| {
        spec.textures
            .iter()
            .filter(|t| t.region.contains(i, j))
            .map(|t| t.eval(i, j))
            .sum()
    });
    let w0 = gaussian_noise(spec.noise, w, h)?;
    let f0 = u0.add(&v0)?.add(&w0)?;
    Ok(Phantom {
        u0,
        v0,
        w0,
        f0,
        spec: spec.clone(),
    })
}
