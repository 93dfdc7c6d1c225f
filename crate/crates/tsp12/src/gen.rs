//! Named instances and seeded random generators for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{normalize_unit_cost, solve_ser, solve_ser_plus, LpSolution};
use crate::{par, Instance, Kind, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two triangles joined by three spokes through a middle vertex each; the
/// classic 9-vertex symmetric instance with gap 10/9.
pub fn fig1a() -> Instance {
    prism(2)
}

/// The 5-vertex asymmetric instance with gap 6/5.
pub fn fig1b() -> Instance {
    Instance::new(
        Kind::Asymmetric,
        5,
        [(0, 1), (1, 3), (3, 2), (2, 0), (0, 3), (3, 0), (1, 4), (4, 1), (2, 4), (4, 2)],
    )
    .expect("fixed instance is valid")
}

/// Two triangles `{0,1,2}` and `{n-3,n-2,n-1}` joined by three disjoint
/// paths with `spoke` edges each. Its SER optimum is half-integral with
/// value one half on the triangles.
pub fn prism(spoke: usize) -> Instance {
    assert!(spoke >= 1, "spokes need at least one edge");
    let inner = spoke - 1;
    let n = 6 + 3 * inner;
    let (a, b) = ([0, 1, 2], [n - 3, n - 2, n - 1]);
    let mut edges = vec![(0, 1), (0, 2), (1, 2), (b[0], b[1]), (b[0], b[2]), (b[1], b[2])];
    // Spoke i runs from a[i] through its inner vertices to b[(i + 1) % 3],
    // matching the fixed 9-vertex layout for spoke = 2.
    let targets = [b[1], b[2], b[0]];
    let mid = |i: usize, j: usize| 3 + j * 3 + i;
    let order = [0, 2, 1];
    for (i, &start) in a.iter().enumerate() {
        let mut prev = start;
        for j in 0..inner {
            let w = mid(order[i], j);
            edges.push((prev.min(w), prev.max(w)));
            prev = w;
        }
        let t = targets[i];
        edges.push((prev.min(t), prev.max(t)));
    }
    Instance::new(Kind::Symmetric, n, edges).expect("prism is valid")
}

/// Each pair (or arc) is a unit edge independently with probability `p`.
pub fn random_instance(kind: Kind, n: usize, p: f64, rng: &mut impl Rng) -> Instance {
    let mut draws = Vec::new();
    for (u, v) in crate::instance::pairs(kind, n) {
        if rng.gen_bool(p) {
            draws.push((u, v));
        }
    }
    Instance::new(kind, n, draws).expect("random pairs are valid")
}

/// Triangles whose corners are paired up by spokes of random length, plus
/// sparse random chords. Supports of this shape tend to carry half-integral
/// optima, which plain random graphs rarely do.
pub fn triangle_spokes(n_max: usize, chord_p: f64, rng: &mut impl Rng) -> Instance {
    let tris = if n_max >= 16 && rng.gen_bool(0.5) { 4 } else { 2 };
    let corners = 3 * tris;
    let spare = n_max.saturating_sub(corners);
    let mut edges = Vec::new();
    for t in 0..tris {
        let b = 3 * t;
        edges.extend([(b, b + 1), (b, b + 2), (b + 1, b + 2)]);
    }
    // Pair corners so no spoke stays inside one triangle.
    let mut order: Vec<usize> = (0..corners).collect();
    loop {
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        if order.chunks(2).all(|p| p[0] / 3 != p[1] / 3) {
            break;
        }
    }
    let mut next = corners;
    let mut left = spare;
    for p in order.chunks(2) {
        let inner = rng.gen_range(0..=left.min(2));
        left -= inner;
        let mut prev = p[0];
        for _ in 0..inner {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, p[1]));
    }
    let n = next;
    let mut set: std::collections::BTreeSet<(usize, usize)> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
    for (u, v) in crate::instance::pairs(Kind::Symmetric, n) {
        if rng.gen_bool(chord_p) {
            set.insert((u, v));
        }
    }
    Instance::new(Kind::Symmetric, n, set).expect("structured instance is valid")
}

/// An instance together with an optimal SER⁺ solution of objective `n`.
#[derive(Clone, Debug)]
pub struct Case {
    pub seed: u64,
    pub instance: Instance,
    pub solution: LpSolution,
    /// Vertices before normalization.
    pub drawn_n: usize,
}

/// How suite instances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Uniform random unit graphs. Symmetric ones almost always have an
    /// integral optimum.
    Uniform,
    /// Cases whose optimum is fractional. Symmetric cases come from
    /// [`triangle_spokes`], asymmetric ones from uniform digraphs.
    Fractional,
}

/// Draws one instance with `seed`, solves SER⁺ and normalizes to unit
/// support cost. Returns `None` when the normalized order leaves `n_range`
/// or the case does not belong to `family`.
pub fn unit_support_case(kind: Kind, family: Family, seed: u64, n_range: (usize, usize)) -> Result<Option<Case>> {
    let mut r = rng(seed);
    let (n, inst) = match (family, kind) {
        (Family::Fractional, Kind::Symmetric) => {
            let chord = r.gen_range(0.0..0.06);
            let inst = triangle_spokes(n_range.1, chord, &mut r);
            (inst.n(), inst)
        }
        _ => {
            let n = r.gen_range(n_range.0.max(3)..=n_range.1);
            let p = r.gen_range(0.2..0.5);
            (n, random_instance(kind, n, p, &mut r))
        }
    };
    let base = solve_ser(&inst)?;
    let plus = solve_ser_plus(&inst, &base)?;
    let norm = normalize_unit_cost(&inst, &plus)?;
    let n2 = norm.instance.n();
    if n2 < n_range.0 || n2 > n_range.1 {
        return Ok(None);
    }
    if family == Family::Fractional && norm.solution.values.values().all(|q| q.is_integer()) {
        return Ok(None);
    }
    Ok(Some(Case {
        seed,
        instance: norm.instance,
        solution: norm.solution,
        drawn_n: n,
    }))
}

/// `count` accepted cases from consecutive seeds starting at `seed`.
/// Candidates are drawn in parallel batches; the result depends only on
/// the seed.
pub fn unit_support_suite(
    kind: Kind,
    family: Family,
    seed: u64,
    count: usize,
    n_range: (usize, usize),
) -> Result<Vec<Case>> {
    let mut out = Vec::with_capacity(count);
    let mut next = seed;
    while out.len() < count {
        let batch: Vec<u64> = (next..next + 32).collect();
        next += 32;
        for res in par::map(&batch, |&s| unit_support_case(kind, family, s, n_range)) {
            if let Some(case) = res? {
                if out.len() < count {
                    out.push(case);
                }
            }
        }
    }
    Ok(out)
}
