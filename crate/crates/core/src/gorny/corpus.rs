//! Test functions with exact derivatives of every order.

use std::collections::BTreeMap;
use std::fmt;

/// A smooth function whose `n`-th derivative can be evaluated exactly.
pub trait TestFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn derivative(&self, order: usize, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Sine;

impl TestFunction for Sine {
    fn name(&self) -> &str {
        "sine"
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        match order % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Cosine;

impl TestFunction for Cosine {
    fn name(&self) -> &str {
        "cosine"
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        Sine.derivative(order + 1, x)
    }
}

/// `exp(rate x)`.
#[derive(Debug, Clone)]
pub struct Exponential {
    name: String,
    rate: f64,
}

impl Exponential {
    pub fn new(name: &str, rate: f64) -> Self {
        Self {
            name: name.to_string(),
            rate,
        }
    }
}

impl TestFunction for Exponential {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        self.rate.powi(order as i32) * (self.rate * x).exp()
    }
}

/// Polynomial with coefficients in increasing degree.
#[derive(Debug, Clone)]
pub struct Polynomial {
    name: String,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(name: &str, coeffs: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            coeffs,
        }
    }
}

impl TestFunction for Polynomial {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        // Horner on the differentiated coefficients a_j j!/(j-order)!
        self.coeffs
            .iter()
            .enumerate()
            .skip(order)
            .rev()
            .fold(0.0, |acc, (j, &a)| {
                let falling: f64 = (j - order + 1..=j).map(|t| t as f64).product();
                acc * x + a * falling
            })
    }
}

/// `1 / (1 + x^2)`, differentiated through
/// `(1 + x^2) f^{(n+1)} + 2(n+1) x f^{(n)} + n(n+1) f^{(n-1)} = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Runge;

impl TestFunction for Runge {
    fn name(&self) -> &str {
        "runge"
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        let q = 1.0 + x * x;
        let mut prev = 1.0 / q;
        if order == 0 {
            return prev;
        }
        let mut cur = -2.0 * x / (q * q);
        for n in 1..order {
            let nf = n as f64;
            let next = -(2.0 * (nf + 1.0) * x * cur + nf * (nf + 1.0) * prev) / q;
            prev = cur;
            cur = next;
        }
        cur
    }
}

type Constructor = fn() -> Box<dyn TestFunction>;

/// Name → test function table.
#[derive(Clone, Default)]
pub struct CorpusRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl fmt::Debug for CorpusRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.keys()).finish()
    }
}

impl CorpusRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register("sine", || Box::new(Sine));
        r.register("cosine", || Box::new(Cosine));
        r.register("exp", || Box::new(Exponential::new("exp", 1.0)));
        r.register("exp-neg3", || Box::new(Exponential::new("exp-neg3", -3.0)));
        r.register("cubic", || {
            Box::new(Polynomial::new("cubic", vec![0.0, -1.0, 0.0, 1.0]))
        });
        r.register("quintic", || {
            Box::new(Polynomial::new(
                "quintic",
                vec![-0.5, 1.0, 0.0, -3.0, 0.0, 1.0],
            ))
        });
        r.register("runge", || Box::new(Runge));
        r.register("constant", || {
            Box::new(Polynomial::new("constant", vec![1.0]))
        });
        r
    }

    pub fn register(&mut self, name: &str, constructor: Constructor) {
        self.entries.insert(name.to_string(), constructor);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<Box<dyn TestFunction>> {
        self.entries.get(name).map(|ctor| ctor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `n! sin((n+1) phi) / r^{n+1}` up to sign, with `x + i = r e^{i phi}`.
    fn runge_closed_form(order: usize, x: f64) -> f64 {
        let r = (1.0 + x * x).sqrt();
        let phi = 1f64.atan2(x);
        let fact: f64 = (1..=order).map(|t| t as f64).product();
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * fact * ((order as f64 + 1.0) * phi).sin() / r.powi(order as i32 + 1)
    }

    #[test]
    fn runge_recursion_matches_closed_form() {
        for order in 0..12 {
            for &x in &[-1.0, -0.3, 0.0, 0.4, 2.5] {
                let got = Runge.derivative(order, x);
                let want = runge_closed_form(order, x);
                let scale: f64 = (1..=order).map(|t| t as f64).product();
                assert!(
                    (got - want).abs() <= 1e-12 * scale.max(want.abs()),
                    "order {order} x {x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::new("p", vec![1.0, 2.0, 3.0]); // 1 + 2x + 3x^2
        assert_eq!(p.derivative(0, 2.0), 17.0);
        assert_eq!(p.derivative(1, 2.0), 14.0);
        assert_eq!(p.derivative(2, 2.0), 6.0);
        assert_eq!(p.derivative(3, 2.0), 0.0);
    }

    #[test]
    fn trig_phases() {
        let x = 0.7;
        assert!((Sine.derivative(5, x) - x.cos()).abs() < 1e-15);
        assert!((Cosine.derivative(2, x) + x.cos()).abs() < 1e-15);
    }

    #[test]
    fn standard_corpus_has_enough_functions() {
        let corpus = CorpusRegistry::standard();
        assert!(corpus.names().count() >= 5);
        assert!(corpus.get("runge").is_some());
        assert!(corpus.get("missing").is_none());
    }
}
