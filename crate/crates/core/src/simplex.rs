//! Nelder–Mead downhill simplex with an evaluation budget.

/// Best point found and the number of objective evaluations spent.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex along each coordinate.
    pub step: f64,
    /// Stop once the spread of values across the simplex falls below
    /// `value_tolerance` and its vertices lie within `point_tolerance` of the
    /// best one. Both are needed: equal values at a wide simplex straddling
    /// a minimum are not convergence.
    pub value_tolerance: f64,
    pub point_tolerance: f64,
    /// Maximum number of objective evaluations, the initial point included.
    pub budget: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            value_tolerance: 1e-15,
            point_tolerance: 1e-10,
            budget: 1000,
        }
    }
}

struct Counted<F> {
    f: F,
    used: usize,
    budget: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        Some(v)
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimises `f` from `start`. Standard coefficients: reflection 1,
/// expansion 2, contraction ½, shrink ½. The budget is a hard cap: with a
/// budget of 1 only `start` is evaluated.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, start: &[f64], options: SimplexOptions) -> Minimum {
    let n = start.len();
    let mut c = Counted {
        f,
        used: 0,
        budget: options.budget.max(1),
        best: (start.to_vec(), f64::INFINITY),
    };
    let done = |c: Counted<F>| Minimum {
        point: c.best.0,
        value: c.best.1,
        evaluations: c.used,
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(v0) = c.eval(start) else { return done(c) };
    simplex.push((start.to_vec(), v0));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += options.step;
        let Some(v) = c.eval(&p) else { return done(c) };
        simplex.push((p, v));
    }
    if n == 0 {
        return done(c);
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= options.value_tolerance && size <= options.point_tolerance {
            return done(c);
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (s, x) in centroid.iter_mut().zip(p) {
                *s += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = affine(&centroid, &worst.0, -1.0);
        let Some(fr) = c.eval(&reflected) else { return done(c) };
        if fr < simplex[0].1 {
            let expanded = affine(&centroid, &worst.0, -2.0);
            let Some(fe) = c.eval(&expanded) else { return done(c) };
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        // contract towards the better of the worst and its reflection
        let (toward, fbase) = if fr < worst.1 {
            (&reflected, fr)
        } else {
            (&worst.0, worst.1)
        };
        let contracted = affine(&centroid, toward, 0.5);
        let Some(fc) = c.eval(&contracted) else { return done(c) };
        if fc < fbase {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let p = affine(&best, &vertex.0, 0.5);
            let Some(v) = c.eval(&p) else { return done(c) };
            *vertex = (p, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(
            f,
            &[-1.2, 1.0],
            SimplexOptions {
                step: 0.1,
                value_tolerance: 1e-20,
                point_tolerance: 1e-12,
                budget: 5000,
            },
        );
        assert!(
            (m.point[0] - 1.0).abs() < 1e-5 && (m.point[1] - 1.0).abs() < 1e-5,
            "{m:?}"
        );
        assert!(m.evaluations <= 5000);
    }

    #[test]
    fn budget_is_a_hard_cap() {
        let mut calls = 0;
        let m = nelder_mead(
            |x: &[f64]| {
                calls += 1;
                x[0] * x[0]
            },
            &[3.0],
            SimplexOptions {
                budget: 1,
                ..Default::default()
            },
        );
        assert_eq!((m.evaluations, m.value, m.point.clone()), (1, 9.0, vec![3.0]));
        assert_eq!(calls, 1);
        for budget in [2, 7, 50] {
            let m = nelder_mead(
                |x: &[f64]| (x[0] - 1.0).abs() + x[1].abs(),
                &[0.0, 0.5],
                SimplexOptions {
                    budget,
                    ..Default::default()
                },
            );
            assert!(m.evaluations <= budget);
        }
    }

    #[test]
    fn nan_counts_as_worst() {
        let m = nelder_mead(
            |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) },
            &[0.1],
            SimplexOptions {
                budget: 200,
                ..Default::default()
            },
        );
        assert!((m.point[0] - 0.5).abs() < 1e-6);
    }
}
