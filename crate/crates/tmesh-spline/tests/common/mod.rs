//! Helpers shared by the integration test targets: brute-force linear
//! algebra oracles and seeded random generators for matrices and
//! ring-shaped components.
#![allow(dead_code)]

use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tmesh_spline::exact::{ExactMatrix, Rational};
use tmesh_spline::mesh::{GeneralizedTComponent, GtEdge, Orient, Rect, Segment, TMesh};

pub fn q(n: i64) -> Rational {
    Rational::from(n)
}

/// Determinant by first-row cofactor expansion — an independent oracle for
/// [`ExactMatrix::det`], exponential and only used on small matrices.
pub fn cofactor_det(m: &ExactMatrix) -> Rational {
    let n = m.rows();
    assert_eq!(n, m.cols(), "cofactor oracle needs a square matrix");
    match n {
        0 => return Rational::one(),
        1 => return m.get(0, 0).clone(),
        _ => {}
    }
    let mut acc = Rational::zero();
    for c in 0..n {
        if m.get(0, c).is_zero() {
            continue;
        }
        let rows: Vec<Vec<Rational>> = (1..n)
            .map(|r| (0..n).filter(|&cc| cc != c).map(|cc| m.get(r, cc).clone()).collect())
            .collect();
        let term = m.get(0, c) * &cofactor_det(&ExactMatrix::from_rows(rows));
        if c % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

/// Rank as the largest `k` admitting a nonzero `k x k` minor — an
/// independent oracle for [`ExactMatrix::rank`].
pub fn minor_rank(m: &ExactMatrix) -> usize {
    let max_k = m.rows().min(m.cols());
    for k in (1..=max_k).rev() {
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                let sub = ExactMatrix::from_rows(
                    rows.iter()
                        .map(|&r| cols.iter().map(|&c| m.get(r, c).clone()).collect())
                        .collect(),
                );
                if !cofactor_det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// A random matrix of small rationals; roughly a third of the entries are
/// zero so the oracle corpora include rank-deficient cases.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(1.0 / 3.0) {
                continue;
            }
            let numer: i64 = rng.gen_range(-9..=9);
            let denom: i64 = rng.gen_range(1..=3);
            m.set(r, c, Rational::new(numer, denom));
        }
    }
    m
}

/// A random rational strictly inside `(lo, hi)`, distinct from everything
/// in `taken`; panics if 64 draws all collide (the intervals used by the
/// generators below are wide enough that this cannot happen).
fn fresh_coord(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational, taken: &[Rational]) -> Rational {
    for _ in 0..64 {
        let denom: i64 = rng.gen_range(1..=4);
        let scale = Rational::from(denom);
        let low = (lo * &scale).floor_to_i64() + 1;
        let high = (hi * &scale).ceil_to_i64() - 1;
        if low > high {
            continue;
        }
        let candidate = Rational::new(rng.gen_range(low..=high), denom);
        if &candidate > lo && &candidate < hi && !taken.contains(&candidate) {
            return candidate;
        }
    }
    panic!("could not draw a fresh coordinate in ({lo}, {hi})");
}

/// A random ring of `e` edges (alternating orientations, consecutive edges
/// crossing, non-consecutive not), each carrying exactly `d + 2` vertices:
/// its two ring corners plus `d` interior mono-vertices. This is precisely
/// the shape on which the key-cycle closed form applies.
///
/// `e` must be 4 or 6.
pub fn random_cycle_component(rng: &mut ChaCha8Rng, e: usize, d: usize) -> GeneralizedTComponent {
    let lines = |rng: &mut ChaCha8Rng, count: usize| -> Vec<Rational> {
        let mut picks: Vec<i64> = Vec::new();
        while picks.len() < count {
            let v = rng.gen_range(0..=24);
            if !picks.contains(&v) {
                picks.push(v);
            }
        }
        picks.sort_unstable();
        picks.into_iter().map(Rational::from).collect()
    };
    let half = e / 2;
    let ys = lines(rng, half);
    let xs = lines(rng, half);

    // Ring corner pattern: each horizontal edge is listed with the x
    // coordinates of its two corners, each vertical edge with the y
    // coordinates of its two. Spans stay within the corners, so the
    // crossing relation is exactly the ring.
    type Corners = Vec<(usize, usize)>;
    let (h_corners, v_corners): (Corners, Corners) = match e {
        // h0 x v0, v0 x h1, h1 x v1, v1 x h0.
        4 => (vec![(0, 1), (0, 1)], vec![(0, 1), (0, 1)]),
        // h0 -> v0 -> h1 -> v1 -> h2 -> v2 -> h0.
        6 => (vec![(0, 2), (0, 1), (1, 2)], vec![(0, 1), (1, 2), (0, 2)]),
        _ => panic!("ring generator supports e = 4 or 6, got {e}"),
    };

    let mut edges = Vec::with_capacity(e);
    for (i, &(a, b)) in h_corners.iter().enumerate() {
        edges.push(ring_edge(rng, Orient::Horizontal, &ys[i], &xs[a], &xs[b], d));
    }
    for (i, &(a, b)) in v_corners.iter().enumerate() {
        edges.push(ring_edge(rng, Orient::Vertical, &xs[i], &ys[a], &ys[b], d));
    }
    GeneralizedTComponent::new(edges).expect("ring construction is consistent")
}

fn ring_edge(
    rng: &mut ChaCha8Rng,
    orient: Orient,
    line: &Rational,
    corner_a: &Rational,
    corner_b: &Rational,
    d: usize,
) -> GtEdge {
    let mut vertices = vec![corner_a.clone(), corner_b.clone()];
    for _ in 0..d {
        let coord = fresh_coord(rng, corner_a, corner_b, &vertices);
        vertices.push(coord);
    }
    vertices.sort();
    GtEdge { orient, line: line.clone(), vertices }
}

/// The `(m + 1) x (n + 1)` tensor-product mesh on `[0, m+1] x [0, n+1]`
/// with `m` vertical and `n` horizontal cross-cuts at integer coordinates.
pub fn grid(m: i64, n: i64) -> TMesh {
    let domain = Rect { x0: q(0), y0: q(0), x1: q(m + 1), y1: q(n + 1) };
    let hs = (1..=n).map(|i| Segment { line: q(i), lo: q(0), hi: q(m + 1) }).collect();
    let vs = (1..=m).map(|i| Segment { line: q(i), lo: q(0), hi: q(n + 1) }).collect();
    TMesh::from_segments(domain, hs, vs).expect("grids are valid meshes")
}
