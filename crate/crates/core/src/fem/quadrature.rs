//! Quadrature rules on the reference interval `[0, 1]` and the reference
//! triangle `{(s, t) : s, t >= 0, s + t <= 1}`. Weights sum to the
//! reference measure (1 and 1/2).

/// `(point, weight)` pairs of the Gauss-Legendre rule with `points` nodes on
/// `[0, 1]`, exact for polynomials of degree `2 * points - 1`.
pub fn gauss_interval(points: usize) -> Vec<(f64, f64)> {
    let sym = |pairs: &[(f64, f64)]| -> Vec<(f64, f64)> {
        // pairs on [-1, 1] given for nonnegative nodes
        let mut out = Vec::new();
        for &(x, w) in pairs {
            if x == 0.0 {
                out.push((0.5, 0.5 * w));
            } else {
                out.push((0.5 - 0.5 * x, 0.5 * w));
                out.push((0.5 + 0.5 * x, 0.5 * w));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    };
    match points {
        1 => vec![(0.5, 1.0)],
        2 => sym(&[(1.0 / 3f64.sqrt(), 1.0)]),
        3 => sym(&[(0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)]),
        4 => sym(&[
            (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        ]),
        5 => sym(&[
            (0.0, 128.0 / 225.0),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ]),
        _ => panic!("no Gauss rule with {points} points"),
    }
}

/// Edge-midpoint rule, exact for quadratics.
pub fn triangle_midpoints() -> Vec<([f64; 2], f64)> {
    let w = 1.0 / 6.0;
    vec![([0.5, 0.0], w), ([0.5, 0.5], w), ([0.0, 0.5], w)]
}

/// Six-point rule exact for polynomials of degree 4.
pub fn triangle_degree4() -> Vec<([f64; 2], f64)> {
    let (a, wa) = (0.445_948_490_915_965, 0.223_381_589_678_011);
    let (b, wb) = (0.091_576_213_509_771, 0.109_951_743_655_322);
    [
        ([a, a], wa),
        ([1.0 - 2.0 * a, a], wa),
        ([a, 1.0 - 2.0 * a], wa),
        ([b, b], wb),
        ([1.0 - 2.0 * b, b], wb),
        ([b, 1.0 - 2.0 * b], wb),
    ]
    .into_iter()
    .map(|(p, w)| (p, 0.5 * w))
    .collect()
}
