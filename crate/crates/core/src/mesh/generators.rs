//! Standard triangulations used by the tests, benches and examples.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::complex::{LengthOverride, StratifiedComplex};
use crate::cone::cone_distance;
use crate::error::{invalid, Result};
use crate::graph::MetricGraph;

/// Unit interval split into `cells` equal pieces; boundary is both ends.
pub fn interval(cells: usize) -> Result<StratifiedComplex> {
    if cells == 0 {
        return Err(invalid("interval needs at least one cell"));
    }
    let coords = (0..=cells).map(|i| vec![i as f64 / cells as f64]).collect();
    let tops: Vec<_> = (0..cells).map(|i| vec![i, i + 1]).collect();
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    k.boundary = vec![vec![0], vec![cells]];
    Ok(k)
}

/// Flat torus `[0, lx) × [0, ly)` on an `nx × ny` grid, every square cut
/// along its rising diagonal. Lengths come from the periodic displacement
/// and are stored as overrides.
pub fn flat_torus(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<StratifiedComplex> {
    if nx < 3 || ny < 3 {
        return Err(invalid("a simplicial torus needs at least 3 cells per direction"));
    }
    let id = |i: usize, j: usize| (i % nx) + nx * (j % ny);
    let (hx, hy) = (lx / nx as f64, ly / ny as f64);
    let coords = (0..ny).flat_map(|j| (0..nx).map(move |i| vec![i as f64 * hx, j as f64 * hy])).collect();
    let mut tops = Vec::with_capacity(2 * nx * ny);
    let mut lengths = HashMap::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            tops.push(vec![a, b, d]);
            tops.push(vec![a, d, c]);
            lengths.insert((a.min(b), a.max(b)), hx);
            lengths.insert((a.min(c), a.max(c)), hy);
            lengths.insert((a.min(d), a.max(d)), hx.hypot(hy));
        }
    }
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    k.length_overrides = overrides(lengths);
    Ok(k)
}

fn overrides(lengths: HashMap<(usize, usize), f64>) -> Vec<LengthOverride> {
    let mut v: Vec<_> = lengths.into_iter().map(|((a, b), length)| LengthOverride { a, b, length }).collect();
    v.sort_by_key(|o| (o.a, o.b));
    v
}

/// Unit disk: a centre vertex and `rings` concentric rings, ring `r` holding
/// `6r` vertices. The boundary subcomplex is the outer ring.
pub fn disk(rings: usize) -> Result<StratifiedComplex> {
    if rings == 0 {
        return Err(invalid("disk needs at least one ring"));
    }
    let mut coords = vec![vec![0.0, 0.0]];
    let mut start = vec![0usize];
    for r in 1..=rings {
        start.push(coords.len());
        let m = 6 * r;
        let rad = r as f64 / rings as f64;
        for i in 0..m {
            let t = 2.0 * PI * i as f64 / m as f64;
            coords.push(vec![rad * t.cos(), rad * t.sin()]);
        }
    }
    let mut tops = Vec::new();
    for r in 1..=rings {
        let outer = 6 * r;
        let o = |j: usize| start[r] + j % outer;
        if r == 1 {
            for j in 0..outer {
                tops.push(vec![0, o(j), o(j + 1)]);
            }
            continue;
        }
        let inner = 6 * (r - 1);
        let n = |i: usize| start[r - 1] + i % inner;
        // Merge the two angular sequences.
        let (mut i, mut j) = (0, 0);
        while i < inner || j < outer {
            let next_inner = (i + 1) as f64 / inner as f64;
            let next_outer = (j + 1) as f64 / outer as f64;
            if j < outer && (i == inner || next_outer <= next_inner) {
                tops.push(vec![n(i), o(j), o(j + 1)]);
                j += 1;
            } else {
                tops.push(vec![n(i), n(i + 1), o(j)]);
                i += 1;
            }
        }
    }
    let m = 6 * rings;
    let boundary = (0..m).map(|j| vec![start[rings] + j, start[rings] + (j + 1) % m]).collect();
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    k.boundary = boundary;
    Ok(k)
}

/// Unit sphere: each face of the octahedron split into `m²` triangles and
/// projected radially.
pub fn sphere(m: usize) -> Result<StratifiedComplex> {
    if m == 0 {
        return Err(invalid("sphere refinement must be at least 1"));
    }
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut ids: HashMap<[i64; 3], usize> = HashMap::new();
    let mut tops = Vec::new();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let corner = [
                    [sx * axes[0][0], 0.0, 0.0],
                    [0.0, sy * axes[1][1], 0.0],
                    [0.0, 0.0, sz * axes[2][2]],
                ];
                let mut vertex = |a: usize, b: usize| {
                    // Lattice point a/m of corner x, b/m of corner y, rest z.
                    let c = m - a - b;
                    let p: Vec<f64> = (0..3)
                        .map(|k| (a as f64 * corner[0][k] + b as f64 * corner[1][k] + c as f64 * corner[2][k]) / m as f64)
                        .collect();
                    let key = [
                        (p[0] * m as f64).round() as i64,
                        (p[1] * m as f64).round() as i64,
                        (p[2] * m as f64).round() as i64,
                    ];
                    *ids.entry(key).or_insert_with(|| {
                        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                        coords.push(p.iter().map(|x| x / norm).collect());
                        coords.len() - 1
                    })
                };
                for a in 0..m {
                    for b in 0..m - a {
                        tops.push(vec![vertex(a, b), vertex(a + 1, b), vertex(a, b + 1)]);
                        if a + b + 2 <= m {
                            tops.push(vec![vertex(a + 1, b), vertex(a + 1, b + 1), vertex(a, b + 1)]);
                        }
                    }
                }
            }
        }
    }
    StratifiedComplex::from_top(coords, &tops)
}

/// Spindle: the spherical suspension of a circle of length `beta`, with
/// cone points of angle `beta` at both poles. `rings` latitude circles of
/// `segments` vertices each; edge lengths are chords of the model metric
/// `dθ² + sin²θ dφ²`, `φ ∈ [0, beta)`. The poles form `X₀`.
pub fn spindle(rings: usize, segments: usize, beta: f64) -> Result<StratifiedComplex> {
    if rings < 2 || segments < 3 {
        return Err(invalid("spindle needs at least 2 rings and 3 segments"));
    }
    if !(beta > 0.0 && beta <= 2.0 * PI) {
        return Err(invalid("spindle cone angle must lie in (0, 2π]"));
    }
    let north = 0;
    let south = 1;
    let theta = |i: usize| PI * i as f64 / rings as f64;
    let phi = |j: usize| beta * j as f64 / segments as f64;
    let embed = |t: f64, p: f64| {
        let q = p * 2.0 * PI / beta;
        vec![t.sin() * q.cos(), t.sin() * q.sin(), t.cos()]
    };
    let mut coords = vec![embed(0.0, 0.0), embed(PI, 0.0)];
    let v = |i: usize, j: usize| 2 + (i - 1) * segments + j % segments;
    for i in 1..rings {
        for j in 0..segments {
            coords.push(embed(theta(i), phi(j)));
        }
    }
    let mut tops = Vec::new();
    for j in 0..segments {
        tops.push(vec![north, v(1, j), v(1, j + 1)]);
        tops.push(vec![south, v(rings - 1, j), v(rings - 1, j + 1)]);
    }
    for i in 1..rings - 1 {
        for j in 0..segments {
            tops.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            tops.push(vec![v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    let pos = |x: usize| -> (f64, f64) {
        match x {
            0 => (0.0, 0.0),
            1 => (PI, 0.0),
            _ => {
                let i = (x - 2) / segments + 1;
                let j = (x - 2) % segments;
                (theta(i), phi(j))
            }
        }
    };
    let edges = k.simplices[1].clone();
    k.length_overrides = edges
        .iter()
        .map(|e| {
            let ((t1, p1), (t2, p2)) = (pos(e[0]), pos(e[1]));
            let mut dp = (p1 - p2).abs();
            dp = dp.min(beta - dp);
            let c = (t1.cos() * t2.cos() + t1.sin() * t2.sin() * dp.cos()).clamp(-1.0, 1.0);
            LengthOverride { a: e[0], b: e[1], length: 2.0 * (0.5 * c.acos()).sin() }
        })
        .collect();
    k.strata = vec![vec![vec![north], vec![south]]];
    Ok(k)
}

/// Cube `[0, side]^n` with `m` cells per axis, each cell split into `n!`
/// simplices along coordinate paths (Freudenthal–Kuhn). The boundary is the
/// union of the cube's facets.
pub fn cube(n: usize, m: usize, side: f64) -> Result<StratifiedComplex> {
    if n == 0 || m == 0 {
        return Err(invalid("cube needs positive dimension and resolution"));
    }
    let stride: Vec<usize> = (0..n).map(|k| (m + 1).pow(k as u32)).collect();
    let total = (m + 1).pow(n as u32);
    let point = |mut id: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let c = id % (m + 1);
                id /= m + 1;
                c
            })
            .collect()
    };
    let coords = (0..total).map(|id| point(id).iter().map(|&c| side * c as f64 / m as f64).collect()).collect();
    let perms = permutations(n);
    let mut tops = Vec::new();
    for cell in 0..m.pow(n as u32) {
        let mut base = 0;
        let mut c = cell;
        for s in &stride {
            base += (c % m) * s;
            c /= m;
        }
        for p in &perms {
            let mut cur = base;
            let mut simplex = vec![cur];
            for &axis in p {
                cur += stride[axis];
                simplex.push(cur);
            }
            simplex.sort_unstable();
            tops.push(simplex);
        }
    }
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    let on_facet = |s: &Vec<usize>| {
        (0..n).any(|axis| {
            let c0 = point(s[0])[axis];
            (c0 == 0 || c0 == m) && s.iter().all(|&v| point(v)[axis] == c0)
        })
    };
    k.boundary = k.simplices.get(n - 1).map(|l| l.iter().filter(|s| on_facet(s)).cloned().collect()).unwrap_or_default();
    Ok(k)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Cone of radius `eps` over `base`: a new apex (the last vertex) joined to
/// every simplex. Apex edges have length `eps`; lid edges follow the cone
/// metric with the base edge length as angular distance. The apex forms
/// every stratum `X_j`, the base simplices the boundary (the lid).
pub fn cone_over(base: &StratifiedComplex, eps: f64) -> Result<StratifiedComplex> {
    if !(eps > 0.0) {
        return Err(invalid("cone radius must be positive"));
    }
    let nv = base.num_vertices();
    let apex = nv;
    let mut coords: Vec<Vec<f64>> = base.coords.iter().map(|c| c.iter().copied().chain([1.0]).collect()).collect();
    let cdim = base.coords.first().map_or(0, Vec::len);
    coords.push(vec![0.0; cdim + 1]);
    let tops: Vec<Vec<usize>> = base
        .maximal_simplices()
        .into_iter()
        .map(|s| s.into_iter().chain([apex]).collect())
        .collect();
    let mut k = StratifiedComplex::from_top(coords, &tops)?;
    let mut lengths = Vec::new();
    for e in &k.simplices[1] {
        let length = if e[1] == apex { eps } else { cone_distance(eps, eps, base.edge_length(e[0], e[1]).min(PI))? };
        lengths.push(LengthOverride { a: e[0], b: e[1], length });
    }
    k.length_overrides = lengths;
    let n = k.dim();
    k.strata = (0..n)
        .map(|j| {
            let mut gens = vec![vec![apex]];
            if j >= 1 {
                if let Some(bs) = base.strata.get(j - 1) {
                    gens.extend(bs.iter().map(|s| s.iter().copied().chain([apex]).collect::<Vec<_>>()));
                }
            }
            gens
        })
        .collect();
    k.boundary = base.maximal_simplices();
    Ok(k)
}

/// Simplicial model of a metric graph: every edge split into `pieces ≥ 3`
/// segments so that loops and parallel edges become simplicial. Graph
/// vertices keep their indices; segment lengths are stored as overrides.
pub fn from_graph(g: &MetricGraph, pieces: usize) -> Result<StratifiedComplex> {
    g.validate()?;
    if pieces < 3 {
        return Err(invalid("graph edges must be split into at least 3 pieces"));
    }
    let nv = g.num_vertices();
    let mut count = nv;
    let mut tops = Vec::new();
    let mut lengths = Vec::new();
    for e in &g.edges {
        let mut chain = vec![e.tail];
        for _ in 1..pieces {
            chain.push(count);
            count += 1;
        }
        chain.push(e.head);
        for w in chain.windows(2) {
            tops.push(vec![w[0].min(w[1]), w[0].max(w[1])]);
            lengths.push(LengthOverride { a: w[0].min(w[1]), b: w[0].max(w[1]), length: e.length / pieces as f64 });
        }
    }
    let mut k = StratifiedComplex::from_top(vec![Vec::new(); count], &tops)?;
    lengths.sort_by_key(|o| (o.a, o.b));
    k.length_overrides = lengths;
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::figure_eight;

    #[test]
    fn euler_characteristics() {
        assert_eq!(interval(10).unwrap().euler_characteristic(), 1);
        assert_eq!(flat_torus(4, 5, 1.0, 1.0).unwrap().euler_characteristic(), 0);
        assert_eq!(disk(4).unwrap().euler_characteristic(), 1);
        assert_eq!(sphere(3).unwrap().euler_characteristic(), 2);
        assert_eq!(spindle(4, 5, 2.0).unwrap().euler_characteristic(), 2);
        assert_eq!(cube(3, 2, 1.0).unwrap().euler_characteristic(), 1);
        assert_eq!(from_graph(&figure_eight(1.0, 2.0), 3).unwrap().euler_characteristic(), -1);
    }

    #[test]
    fn generated_meshes_validate() {
        for k in [
            interval(5).unwrap(),
            flat_torus(3, 4, 1.0, 2.0).unwrap(),
            disk(3).unwrap(),
            sphere(2).unwrap(),
            spindle(3, 4, 3.0).unwrap(),
            cube(2, 3, 1.0).unwrap(),
            cube(3, 2, 1.0).unwrap(),
            cone_over(&sphere(1).unwrap(), 1.0).unwrap(),
            from_graph(&figure_eight(1.0, 2.0), 3).unwrap(),
        ] {
            k.validate().unwrap();
            k.orient().unwrap();
        }
    }

    #[test]
    fn disk_area_and_boundary() {
        let k = disk(8).unwrap();
        let area: f64 = k.simplices[2].iter().map(|s| k.volume(s)).sum();
        assert!((area - PI).abs() < 0.05);
        assert_eq!(k.boundary.len(), 48);
    }

    #[test]
    fn cube_boundary_facets() {
        let k = cube(2, 3, 1.0).unwrap();
        assert_eq!(k.boundary.len(), 12);
        let k = cube(3, 1, 1.0).unwrap();
        assert_eq!(k.count(3), 6);
        assert_eq!(k.boundary.len(), 12);
    }
}
