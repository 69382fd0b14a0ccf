//! Shared closure types for coefficient functions.

use std::sync::Arc;

/// `g(t)` or `g(x)`.
pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `g(x, t)` or `g(x, y)`.
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// `g(x, y, t)`.
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

pub fn const1(c: f64) -> Fn1 {
    Arc::new(move |_| c)
}

pub fn const2(c: f64) -> Fn2 {
    Arc::new(move |_, _| c)
}

pub fn const3(c: f64) -> Fn3 {
    Arc::new(move |_, _, _| c)
}
