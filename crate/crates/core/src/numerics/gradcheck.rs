//! Central-difference gradient checking against the tape's reverse sweep.

use super::matrix::{Matrix, NumResult};
use super::tape::{NodeId, Tape};

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// `(parameter index, row, col)` of the worst coordinate, if any.
    pub worst: Option<(usize, usize, usize)>,
}

/// Compare reverse-mode gradients with central differences
/// `(f(x+h) - f(x-h)) / 2h` for every coordinate of every parameter.
///
/// `build` must construct the scalar loss from the given parameter leaves on
/// a fresh tape; it is re-invoked for every perturbed evaluation. Relative
/// error uses the denominator `max(|g|, |g_fd|, 1e-8)`.
pub fn finite_difference_check<F>(
    build: F,
    params: &[Matrix],
    h: f64,
) -> NumResult<GradCheckReport>
where
    F: Fn(&mut Tape, &[NodeId]) -> NumResult<NodeId>,
{
    assert!(h > 0.0, "step size must be positive");

    let eval = |values: &[Matrix]| -> NumResult<f64> {
        let mut tape = Tape::new();
        let ids: Vec<NodeId> = values.iter().map(|m| tape.leaf(m.clone())).collect();
        let loss = build(&mut tape, &ids)?;
        Ok(tape.value(loss).get(0, 0))
    };

    // Analytic gradients from one reverse sweep.
    let mut tape = Tape::new();
    let ids: Vec<NodeId> = params.iter().map(|m| tape.leaf(m.clone())).collect();
    let loss = build(&mut tape, &ids)?;
    let grads = tape.backward(loss)?;
    let analytic: Vec<Matrix> = ids.iter().map(|&id| grads.wrt(id)).collect();

    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
    };
    let mut work: Vec<Matrix> = params.to_vec();
    for (p, param) in params.iter().enumerate() {
        for i in 0..param.rows() {
            for j in 0..param.cols() {
                let orig = param.get(i, j);
                work[p].set(i, j, orig + h);
                let plus = eval(&work)?;
                work[p].set(i, j, orig - h);
                let minus = eval(&work)?;
                work[p].set(i, j, orig);

                let fd = (plus - minus) / (2.0 * h);
                let g = analytic[p].get(i, j);
                let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-8);
                if rel > report.max_rel_error {
                    report.max_rel_error = rel;
                    report.worst = Some((p, i, j));
                }
            }
        }
    }
    Ok(report)
}
