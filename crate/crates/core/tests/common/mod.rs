#![allow(dead_code)]

use kerreg::linalg::SparseMatrix;
use kerreg::DiscreteProblem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A weighted graph Laplacian made of `components` connected paths with a
/// few random chords, a diagonally dominant mass matrix on the same graph,
/// and a consistent random load. The kernel is spanned by the component
/// indicators.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, components: usize) -> DiscreteProblem {
    assert!(components >= 1 && n >= 2 * components);
    let bounds: Vec<usize> = (0..=components).map(|c| c * n / components).collect();
    let mut edges = Vec::new();
    for c in 0..components {
        let (lo, hi) = (bounds[c], bounds[c + 1]);
        for i in lo..hi - 1 {
            edges.push((i, i + 1, rng.gen_range(0.5..2.0)));
        }
        for _ in 0..(hi - lo) / 3 {
            let i = rng.gen_range(lo..hi);
            let j = rng.gen_range(lo..hi);
            if i != j {
                edges.push((i, j, rng.gen_range(0.1..1.0)));
            }
        }
    }
    let mut a = Vec::new();
    let mut m = Vec::new();
    let mut coupling = vec![0.0; n];
    for &(i, j, w) in &edges {
        a.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
        let c = 0.1 * w;
        m.extend([(i, j, c), (j, i, c)]);
        coupling[i] += c;
        coupling[j] += c;
    }
    for (i, c) in coupling.iter().enumerate() {
        m.push((i, i, c + rng.gen_range(0.5..2.0)));
    }
    let kernel: Vec<Vec<f64>> = (0..components)
        .map(|c| (0..n).map(|i| if (bounds[c]..bounds[c + 1]).contains(&i) { 1.0 } else { 0.0 }).collect())
        .collect();
    let load: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = DiscreteProblem::new(
        "random",
        SparseMatrix::from_triplets(n, n, &a).unwrap(),
        SparseMatrix::from_triplets(n, n, &m).unwrap(),
        load,
        &kernel,
    )
    .unwrap();
    p.make_consistent()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn toy() -> DiscreteProblem {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DiscreteProblem::new(
        "toy2x2",
        SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]),
        SparseMatrix::identity(2),
        vec![1.0, -1.0],
        &[vec![s, s]],
    )
    .unwrap()
}
