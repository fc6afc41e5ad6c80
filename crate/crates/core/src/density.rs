//! Densities that can report their value and first two derivatives.

use crate::error::Result;
use crate::specfun::{gamma_density_all, ShapeParam};

/// A density on (0, ∞) evaluated together with `f'` and `f''`.
pub trait Density: Send + Sync {
    fn derivs(&self, x: f64) -> Result<[f64; 3]>;

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.derivs(x)?[0])
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        (**self).derivs(x)
    }
}

impl<D: Density + ?Sized> Density for Box<D> {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        (**self).derivs(x)
    }
}

/// Unit-scale gamma density `g_α`.
#[derive(Debug, Clone, Copy)]
pub struct UnitGamma(pub ShapeParam);

impl Density for UnitGamma {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        gamma_density_all(self.0, x)
    }
}

/// Adapter for closures returning `[f, f', f'']`.
pub struct FnDensity<F>(pub F);

impl<F> Density for FnDensity<F>
where
    F: Fn(f64) -> Result<[f64; 3]> + Send + Sync,
{
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        (self.0)(x)
    }
}
