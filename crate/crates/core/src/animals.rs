//! Connected vertex sets: exhaustive enumeration (Redelmeier's method) and
//! random growth.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Cuboid, LatticeBox, Vertex};
use crate::topology::VertexSet;

/// Calls `visit` once for every connected vertex set of size `1..=max_size`
/// in a graph on `0..adj.len()`. Each set is reported exactly once, rooted
/// at its smallest vertex.
pub fn connected_subsets(adj: &[Vec<usize>], max_size: usize, mut visit: impl FnMut(&[usize])) {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut current = Vec::with_capacity(max_size);
    for root in 0..n {
        seen[root] = true;
        let mut untried = vec![root];
        grow(adj, root, max_size, &mut untried, &mut current, &mut seen, &mut visit);
        seen[root] = false;
    }
}

fn grow(
    adj: &[Vec<usize>],
    root: usize,
    max_size: usize,
    untried: &mut Vec<usize>,
    current: &mut Vec<usize>,
    seen: &mut [bool],
    visit: &mut impl FnMut(&[usize]),
) {
    while let Some(v) = untried.pop() {
        current.push(v);
        visit(current);
        if current.len() < max_size {
            let mut next = untried.clone();
            let mark_from = next.len();
            for &w in &adj[v] {
                if w > root && !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
            let added = next[mark_from..].to_vec();
            grow(adj, root, max_size, &mut next, current, seen, visit);
            for w in added {
                seen[w] = false;
            }
        }
        current.pop();
    }
}

/// Nearest-neighbour adjacency of the vertices of a cuboid, by index.
pub fn cuboid_graph(region: &Cuboid) -> Vec<Vec<usize>> {
    (0..region.len())
        .map(|i| {
            let v = region.vertex(i);
            let mut out = Vec::new();
            for axis in 0..region.dim() {
                for dir in [-1, 1] {
                    if let Some(j) = region.step(&v, i, axis, dir) {
                        out.push(j);
                    }
                }
            }
            out
        })
        .collect()
}

/// Counts of fixed lattice animals (connected sets up to translation) in
/// `Z^d` of sizes `1..=max_size`.
pub fn count_fixed_animals(d: usize, max_size: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; max_size];
    for_each_fixed_animal(d, max_size, |a| counts[a.len() - 1] += 1)?;
    Ok(counts)
}

/// Visits one representative of every fixed animal of size `1..=max_size`:
/// the translate whose lexicographically smallest vertex is the origin.
pub fn for_each_fixed_animal(d: usize, max_size: usize, mut visit: impl FnMut(&[Vertex])) -> Result<()> {
    let r = max_size.max(1) as i32;
    let origin = Vertex::origin(d)?;
    let mut lo = origin;
    let mut hi = origin;
    for i in 0..d {
        lo = lo.shifted(i, -r);
        hi = hi.shifted(i, r);
    }
    lo = lo.shifted(0, r);
    let region = Cuboid::new(&lo, &hi)?;
    let root = region.index(&origin);
    // vertices after the origin in index order, re-indexed from 0
    let keep: Vec<usize> = (root..region.len()).collect();
    let adj: Vec<Vec<usize>> = keep
        .iter()
        .map(|&i| {
            let v = region.vertex(i);
            let mut out = Vec::new();
            for axis in 0..d {
                for dir in [-1, 1] {
                    if let Some(j) = region.step(&v, i, axis, dir) {
                        if j >= root {
                            out.push(j - root);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut buf = Vec::with_capacity(max_size);
    let mut seen = vec![false; adj.len()];
    let mut current = Vec::new();
    seen[0] = true;
    let mut untried = vec![0];
    let mut visit_idx = |set: &[usize]| {
        buf.clear();
        buf.extend(set.iter().map(|&i| region.vertex(i + root)));
        visit(&buf);
    };
    grow(&adj, 0, max_size, &mut untried, &mut current, &mut seen, &mut visit_idx);
    Ok(())
}

/// A random connected set of `size` vertices containing the origin, grown
/// by repeatedly adding a uniformly chosen neighbour of a uniformly chosen
/// member.
pub fn random_animal(d: usize, size: usize, seed: u64) -> Result<VertexSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = vec![Vertex::origin(d)?];
    let mut set = VertexSet::new();
    set.insert(members[0])?;
    while members.len() < size {
        let v = members[rng.random_range(0..members.len())];
        let axis = rng.random_range(0..d);
        let w = v.shifted(axis, if rng.random_bool(0.5) { 1 } else { -1 });
        if set.insert(w)? {
            members.push(w);
        }
    }
    Ok(set)
}

/// Connected subsets of `B_n` with at most `max_size` vertices.
pub fn connected_subsets_of_box(d: usize, n: u32, max_size: usize, mut visit: impl FnMut(&[Vertex])) -> Result<()> {
    let region = LatticeBox::new(d, n)?.cuboid();
    let adj = cuboid_graph(&region);
    let mut buf = Vec::new();
    connected_subsets(&adj, max_size, |set| {
        buf.clear();
        buf.extend(set.iter().map(|&i| region.vertex(i)));
        visit(&buf);
    });
    Ok(())
}
