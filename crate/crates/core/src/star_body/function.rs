use crate::error::{Error, Result};
use crate::forward::Sign;
use crate::inverse::HarmonicSpectrum;
use crate::sphere::SphericalGrid;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

type Closure = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Tabulated {
        grid: Arc<SphericalGrid>,
        values: Arc<Vec<f64>>,
    },
    Harmonic(Arc<HarmonicSpectrum>),
    Closed(Closure),
}

/// A real function on the unit sphere S^{n-1} of R^n.
#[derive(Clone)]
pub struct SphericalFunction {
    ambient: usize,
    repr: Repr,
}

impl fmt::Debug for SphericalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Tabulated { grid, .. } => format!("tabulated({} nodes)", grid.len()),
            Repr::Harmonic(s) => format!("harmonic(l_max={})", s.l_max()),
            Repr::Closed(_) => "closed-form".to_string(),
        };
        write!(f, "SphericalFunction {{ n: {}, {kind} }}", self.ambient)
    }
}

impl SphericalFunction {
    /// Closed-form function of the ambient coordinates.
    pub fn from_fn(ambient: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        SphericalFunction {
            ambient,
            repr: Repr::Closed(Arc::new(f)),
        }
    }

    pub fn constant(ambient: usize, c: f64) -> Self {
        Self::from_fn(ambient, move |_| c)
    }

    /// Node values on a grid, interpolated between nodes.
    pub fn tabulated(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {i}")));
        }
        Ok(SphericalFunction {
            ambient: grid.ambient_dim(),
            repr: Repr::Tabulated {
                grid,
                values: Arc::new(values),
            },
        })
    }

    /// Band-limited function on S^2 given by its harmonic coefficients.
    pub fn harmonic(spec: HarmonicSpectrum) -> Self {
        SphericalFunction {
            ambient: 3,
            repr: Repr::Harmonic(Arc::new(spec)),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Repr::Tabulated { grid, values } => grid.interpolate(values, x),
            Repr::Harmonic(s) => s.evaluate(x),
            Repr::Closed(f) => f(x),
        }
    }

    pub fn as_tabulated(&self) -> Option<(&SphericalGrid, &[f64])> {
        match &self.repr {
            Repr::Tabulated { grid, values } => Some((grid, values)),
            _ => None,
        }
    }

    pub fn as_harmonic(&self) -> Option<&HarmonicSpectrum> {
        match &self.repr {
            Repr::Harmonic(s) => Some(s),
            _ => None,
        }
    }

    /// Node values on `grid`.
    pub fn sample(&self, grid: &SphericalGrid) -> Vec<f64> {
        if let Repr::Tabulated { grid: own, values } = &self.repr {
            if own.as_ref() == grid {
                return values.to_vec();
            }
        }
        grid.nodes().par_iter().map(|x| self.eval(x.coords())).collect()
    }

    /// Node-wise tabulation onto `grid`.
    pub fn tabulate(&self, grid: Arc<SphericalGrid>) -> Result<SphericalFunction> {
        if grid.ambient_dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: grid.ambient_dim(),
            });
        }
        let values = self.sample(&grid);
        SphericalFunction::tabulated(grid, values)
    }

    /// The reflected function x -> f(-x).
    pub fn reflected(&self) -> SphericalFunction {
        let f = self.clone();
        SphericalFunction::from_fn(self.ambient, move |x| {
            let y: Vec<f64> = x.iter().map(|c| -c).collect();
            f.eval(&y)
        })
    }

    /// Even extension of the restriction to one open hemisphere: for
    /// `Sign::Plus`, f(x) where x_n > 0 and f(-x) where x_n < 0.
    pub fn evenized(&self, sign: Sign) -> SphericalFunction {
        let f = self.clone();
        let s = sign.factor();
        SphericalFunction::from_fn(self.ambient, move |x| {
            if s * x[x.len() - 1] > 0.0 {
                f.eval(x)
            } else {
                let y: Vec<f64> = x.iter().map(|c| -c).collect();
                f.eval(&y)
            }
        })
    }

    pub fn even_part(&self) -> SphericalFunction {
        let f = self.clone();
        SphericalFunction::from_fn(self.ambient, move |x| {
            let y: Vec<f64> = x.iter().map(|c| -c).collect();
            0.5 * (f.eval(x) + f.eval(&y))
        })
    }

    pub fn odd_part(&self) -> SphericalFunction {
        let f = self.clone();
        SphericalFunction::from_fn(self.ambient, move |x| {
            let y: Vec<f64> = x.iter().map(|c| -c).collect();
            0.5 * (f.eval(x) - f.eval(&y))
        })
    }

    pub fn scaled(&self, a: f64) -> SphericalFunction {
        let f = self.clone();
        SphericalFunction::from_fn(self.ambient, move |x| a * f.eval(x))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SphericalFunction, b: f64) -> Result<SphericalFunction> {
        if other.ambient != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        let (f, g) = (self.clone(), other.clone());
        Ok(SphericalFunction::from_fn(self.ambient, move |x| {
            a * f.eval(x) + b * g.eval(x)
        }))
    }
}
