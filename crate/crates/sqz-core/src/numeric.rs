//! Internal numeric helpers: deterministic grids, bounded scalar
//! minimization, and a two-dimensional simplex descent.

/// Uniform grid inclusive of both endpoints. The endpoints are returned
/// bit-for-bit so sweeps match pointwise evaluations there.
pub(crate) fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    debug_assert!(steps >= 2);
    let span = max - min;
    (0..steps)
        .map(|i| {
            if i == 0 {
                min
            } else if i == steps - 1 {
                max
            } else {
                min + span * (i as f64) / ((steps - 1) as f64)
            }
        })
        .collect()
}

/// Geometric grid inclusive of both endpoints; requires `min > 0`.
pub(crate) fn logspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    debug_assert!(steps >= 2 && min > 0.0);
    let (lmin, lmax) = (min.ln(), max.ln());
    let span = lmax - lmin;
    (0..steps)
        .map(|i| {
            if i == 0 {
                min
            } else if i == steps - 1 {
                max
            } else {
                (lmin + span * (i as f64) / ((steps - 1) as f64)).exp()
            }
        })
        .collect()
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
///
/// Runs until the interval shrinks below `tol * max(1, |lo|)` or `max_iter`
/// passes. Returns the midpoint of the final interval, the number of function
/// evaluations spent, and whether the tolerance was met.
pub(crate) fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, usize, bool) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    let mut converged = false;
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol * lo.abs().max(1.0) {
            converged = true;
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    (0.5 * (lo + hi), evals, converged)
}

pub(crate) struct SimplexOutcome {
    pub x: [f64; 2],
    pub fx: f64,
    pub converged: bool,
}

/// Nelder-Mead descent in two dimensions with the standard coefficients
/// (reflect 1, expand 2, contract 0.5, shrink 0.5).
///
/// `scale` sets the initial simplex edge lengths. The objective may return
/// `f64::INFINITY` to veto a trial point (used for bound constraints); the
/// search then contracts back into the feasible region. Fully deterministic.
pub(crate) fn nelder_mead_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    start: [f64; 2],
    scale: [f64; 2],
    f_tol: f64,
    x_tol: [f64; 2],
    max_evals: usize,
) -> SimplexOutcome {
    let mut evals = 0;
    let mut eval = |x: [f64; 2], n: &mut usize| {
        *n += 1;
        f(x[0], x[1])
    };

    let mut verts = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut fv = [
        eval(verts[0], &mut evals),
        eval(verts[1], &mut evals),
        eval(verts[2], &mut evals),
    ];

    let mut converged = false;
    while evals < max_evals {
        // order: 0 best, 2 worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap_or(std::cmp::Ordering::Equal));
        verts = [verts[idx[0]], verts[idx[1]], verts[idx[2]]];
        fv = [fv[idx[0]], fv[idx[1]], fv[idx[2]]];

        let dx0 = (verts[1][0] - verts[0][0]).abs().max((verts[2][0] - verts[0][0]).abs());
        let dx1 = (verts[1][1] - verts[0][1]).abs().max((verts[2][1] - verts[0][1]).abs());
        let df = (fv[2] - fv[0]).abs();
        if dx0 <= x_tol[0] && dx1 <= x_tol[1] && (df <= f_tol || !df.is_finite()) {
            converged = df.is_finite();
            break;
        }

        let centroid = [
            0.5 * (verts[0][0] + verts[1][0]),
            0.5 * (verts[0][1] + verts[1][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - verts[2][0]),
            centroid[1] + (centroid[1] - verts[2][1]),
        ];
        let fr = eval(reflect, &mut evals);

        if fr < fv[0] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - verts[2][0]),
                centroid[1] + 2.0 * (centroid[1] - verts[2][1]),
            ];
            let fe = eval(expand, &mut evals);
            if fe < fr {
                verts[2] = expand;
                fv[2] = fe;
            } else {
                verts[2] = reflect;
                fv[2] = fr;
            }
        } else if fr < fv[1] {
            verts[2] = reflect;
            fv[2] = fr;
        } else {
            let (point, fpoint) = if fr < fv[2] {
                // outside contraction
                let c = [
                    centroid[0] + 0.5 * (reflect[0] - centroid[0]),
                    centroid[1] + 0.5 * (reflect[1] - centroid[1]),
                ];
                let fc = eval(c, &mut evals);
                if fc <= fr {
                    (Some(c), fc)
                } else {
                    (None, fc)
                }
            } else {
                // inside contraction
                let c = [
                    centroid[0] + 0.5 * (verts[2][0] - centroid[0]),
                    centroid[1] + 0.5 * (verts[2][1] - centroid[1]),
                ];
                let fc = eval(c, &mut evals);
                if fc < fv[2] {
                    (Some(c), fc)
                } else {
                    (None, fc)
                }
            };
            match point {
                Some(p) => {
                    verts[2] = p;
                    fv[2] = fpoint;
                }
                None => {
                    // shrink toward the best vertex
                    for i in 1..3 {
                        verts[i] = [
                            verts[0][0] + 0.5 * (verts[i][0] - verts[0][0]),
                            verts[0][1] + 0.5 * (verts[i][1] - verts[0][1]),
                        ];
                        fv[i] = eval(verts[i], &mut evals);
                    }
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    SimplexOutcome {
        x: verts[best],
        fx: fv[best],
        converged,
    }
}
