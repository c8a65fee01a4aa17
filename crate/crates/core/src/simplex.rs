//! Derivative-free simplex minimization (Nelder-Mead).
//!
//! Infinite objective values are allowed and mark infeasible points; the
//! search simply never accepts them.

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOptions {
    /// Convergence bound on both the simplex diameter (max-norm distance of
    /// every vertex to the best one) and the spread of values.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Edge length of the initial simplex per coordinate; the sign picks the
    /// direction.
    pub initial_step: [f64; 3],
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOutcome {
    pub point: [f64; 3],
    pub value: f64,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn along(from: &[f64; 3], to: &[f64; 3], t: f64) -> [f64; 3] {
    [
        from[0] + t * (to[0] - from[0]),
        from[1] + t * (to[1] - from[1]),
        from[2] + t * (to[2] - from[2]),
    ]
}

pub(crate) fn minimize<F>(f: F, start: [f64; 3], opts: &SimplexOptions) -> SimplexOutcome
where
    F: Fn(&[f64; 3]) -> f64,
{
    let mut vertices = [start; 4];
    for i in 0..3 {
        vertices[i + 1][i] += opts.initial_step[i];
    }
    let mut values = vertices.map(|v| f(&v));
    if !values[0].is_finite() {
        return SimplexOutcome {
            point: start,
            value: values[0],
            converged: false,
        };
    }

    let mut order = [0usize, 1, 2, 3];
    for _ in 0..opts.max_iterations {
        // stable sort keeps ties in vertex order
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[3];
        let second_worst = order[2];

        let diameter = order[1..]
            .iter()
            .flat_map(|&i| (0..3).map(move |k| (i, k)))
            .map(|(i, k)| (vertices[i][k] - vertices[best][k]).abs())
            .fold(0.0, f64::max);
        let spread = values[worst] - values[best];
        if diameter <= opts.tolerance && spread <= opts.tolerance {
            return SimplexOutcome {
                point: vertices[best],
                value: values[best],
                converged: true,
            };
        }

        let mut centroid = [0.0; 3];
        for &i in &order[..3] {
            for k in 0..3 {
                centroid[k] += vertices[i][k] / 3.0;
            }
        }

        let reflected = along(&centroid, &vertices[worst], -REFLECT);
        let f_reflected = f(&reflected);
        if f_reflected < values[best] {
            let expanded = along(&centroid, &vertices[worst], -EXPAND);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                vertices[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        let contracted = if f_reflected < values[worst] {
            along(&centroid, &reflected, CONTRACT)
        } else {
            along(&centroid, &vertices[worst], CONTRACT)
        };
        let f_contracted = f(&contracted);
        if f_contracted < values[worst].min(f_reflected) {
            vertices[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }

        let anchor = vertices[best];
        for &i in &order[1..] {
            vertices[i] = along(&anchor, &vertices[i], SHRINK);
            values[i] = f(&vertices[i]);
        }
    }

    let best = (0..4)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    SimplexOutcome {
        point: vertices[best],
        value: values[best],
        converged: false,
    }
}
