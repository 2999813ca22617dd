//! Line-oriented text format for facet sets.
//!
//! One facet per line: `coords;axes_bitmask;lattice`. Primal coordinates are
//! the minimal corner; dual coordinates are the minimal corner doubled (odd
//! integers). Bit `i` of the mask is axis `i`, counting from zero. Lines that
//! are empty or start with `#` are skipped.

use crate::error::{Error, Result};
use crate::geometry::{FacetKey, Lattice, Vertex};
use crate::topology::{PlaquetteSet, VertexSet};

pub fn facet_to_line(f: &FacetKey) -> String {
    let coords: Vec<i32> = match f.lattice() {
        Lattice::Primal => f.base().to_vec(),
        Lattice::Dual => f.doubled_corner(),
    };
    let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("{};{};{}", coords.join(","), f.axes(), f.lattice().as_str())
}

pub fn parse_facet_line(line: &str) -> Result<FacetKey> {
    let bad = || Error::Parse(format!("malformed facet line {line:?}"));
    let mut parts = line.trim().split(';');
    let (coords, mask, tag) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(c), Some(m), Some(t), None) => (c, m, t),
        _ => return Err(bad()),
    };
    let coords: Vec<i32> = coords
        .split(',')
        .map(|c| c.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let mask: u8 = mask.trim().parse().map_err(|_| bad())?;
    match tag.trim() {
        "primal" => FacetKey::new(Lattice::Primal, &coords, mask),
        "dual" => FacetKey::from_doubled_corner(Lattice::Dual, &coords, mask),
        _ => Err(bad()),
    }
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_plaquettes(set: &PlaquetteSet) -> String {
    let mut out = String::new();
    for p in set.iter() {
        out.push_str(&facet_to_line(p));
        out.push('\n');
    }
    out
}

pub fn read_plaquettes(text: &str) -> Result<PlaquetteSet> {
    let mut set = PlaquetteSet::new();
    for line in lines(text) {
        set.insert(parse_facet_line(line)?)?;
    }
    Ok(set)
}

/// Vertices are written as primal 0-facets.
pub fn write_vertices(set: &VertexSet) -> String {
    let mut out = String::new();
    for v in set.iter() {
        out.push_str(&facet_to_line(&FacetKey::vertex(v)));
        out.push('\n');
    }
    out
}

pub fn read_vertices(text: &str) -> Result<VertexSet> {
    let mut set = VertexSet::new();
    for line in lines(text) {
        let f = parse_facet_line(line)?;
        if f.lattice() != Lattice::Primal || f.dim() != 0 {
            return Err(Error::Parse(format!("not a vertex: {line:?}")));
        }
        set.insert(Vertex::new(f.base())?)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dual_plaquette_line() {
        let e = FacetKey::edge(&Vertex::origin(3).unwrap(), 0);
        assert_eq!(facet_to_line(&e), "0,0,0;1;primal");
        assert_eq!(facet_to_line(&e.dual()), "1,-1,-1;6;dual");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_facet_line("1,2;3").is_err());
        assert!(parse_facet_line("1,2;1;weird").is_err());
        assert!(parse_facet_line("2,1;1;dual").is_err()); // even dual coordinate
        assert!(parse_facet_line("0,0;4;primal").is_err());
    }

    proptest! {
        #[test]
        fn facet_lines_round_trip(
            coords in prop::collection::vec(-50i32..50, 2..=6),
            axes in any::<u8>(),
            dual in any::<bool>(),
        ) {
            let d = coords.len();
            let axes = axes & ((1u16 << d) - 1) as u8;
            let lattice = if dual { Lattice::Dual } else { Lattice::Primal };
            let f = FacetKey::new(lattice, &coords, axes).unwrap();
            let line = facet_to_line(&f);
            prop_assert_eq!(parse_facet_line(&line).unwrap(), f);
        }

        #[test]
        fn plaquette_sets_round_trip(cells in prop::collection::btree_set((-6i32..6, -6i32..6, -6i32..6, 0usize..3), 0..40)) {
            let mut set = PlaquetteSet::new();
            for (a, b, c, axis) in cells {
                let e = FacetKey::edge(&Vertex::new(&[a, b, c]).unwrap(), axis);
                set.insert(e.dual()).unwrap();
            }
            let text = write_plaquettes(&set);
            let back = read_plaquettes(&text).unwrap();
            prop_assert_eq!(write_plaquettes(&back), text);
            prop_assert_eq!(back, set);
        }
    }
}
