//! Deterministic Nelder-Mead minimiser used to polish the grid optimum.

/// Outcome of a simplex run.
#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_iterations: usize,
    /// Absolute spread of objective values across the simplex.
    pub f_tolerance: f64,
    /// Largest distance from the best vertex to any other vertex.
    pub x_tolerance: f64,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimise `f` from `start` with an axis-aligned initial simplex of edge
/// `step`.
pub(crate) fn minimize(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    opts: SimplexOptions,
) -> SimplexOutcome {
    let dim = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    vertices.push((start.to_vec(), eval(start)));
    for j in 0..dim {
        let mut x = start.to_vec();
        x[j] += step;
        let fx = eval(&x);
        vertices.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        // stable sort keeps vertex order deterministic on ties
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = vertices[0].1;
        let f_worst = vertices[dim].1;
        let diameter = vertices[1..]
            .iter()
            .map(|(x, _)| distance(x, &vertices[0].0))
            .fold(0.0, f64::max);
        if (f_worst - f_best).abs() < opts.f_tolerance && diameter < opts.x_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| vertices[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[dim].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = toward(REFLECT);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = toward(REFLECT * EXPAND);
            let fe = eval(&xe);
            vertices[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < vertices[dim - 1].1 {
            vertices[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = toward(REFLECT * CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = toward(-CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            vertices[dim] = (xc, fc);
            continue;
        }
        let best = vertices[0].0.clone();
        for v in vertices.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&v.0)
                .map(|(b, x)| b + SHRINK * (x - b))
                .collect();
            let fx = eval(&x);
            *v = (x, fx);
        }
    }
    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, _) = vertices.swap_remove(0);
    SimplexOutcome {
        x,
        iterations,
        evaluations,
        converged,
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
