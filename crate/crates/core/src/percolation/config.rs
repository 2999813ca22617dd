//! Edge configurations on finite cuboids.
//!
//! Edges are enumerated by base vertex (lexicographic, first coordinate
//! slowest) and then by offset index. The offsets for range `S = 0` are the
//! unit vectors `u_1, ..., u_d`; for `S >= 1` they are the vectors of
//! `[-S, S]^d` whose first nonzero coordinate is positive, in lexicographic
//! order. An edge `(x, k)` joins `x` to `x + offset_k`; only edges with both
//! endpoints in the cuboid belong to the configuration.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, Cuboid, LatticeBox, Vertex, MAX_DIM};
use crate::rng::{threshold53, EdgeRng};

/// Default stream identifier of the edge generator.
pub const RNG_ID: u64 = 1;

const MAGIC: &[u8; 4] = b"PLCF";
const FORMAT_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub d: usize,
    pub p: f64,
    /// Spread-out range; 0 is the nearest-neighbour lattice.
    pub s: u32,
    /// Fattening radius.
    pub f: u32,
}

impl ModelParams {
    pub fn new(d: usize, p: f64, s: u32, f: u32) -> Result<Self> {
        check_dim(d)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(ModelParams { d, p, s, f })
    }

    pub fn nearest(d: usize, p: f64) -> Result<Self> {
        Self::new(d, p, 0, 0)
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.d, p, self.s, self.f)
    }

    /// Width of the shell in which an open path leaving a region must land.
    pub fn reach(&self) -> u32 {
        self.s.max(1)
    }
}

/// The canonical offset list for range `s` in dimension `d`.
pub fn edge_offsets(d: usize, s: u32) -> Vec<[i32; MAX_DIM]> {
    if s == 0 {
        return (0..d)
            .map(|i| {
                let mut o = [0; MAX_DIM];
                o[i] = 1;
                o
            })
            .collect();
    }
    let side = 2 * s as i64 + 1;
    let mut out = Vec::new();
    for t in 0..side.pow(d as u32) {
        let mut rem = t;
        let mut o = [0; MAX_DIM];
        for i in (0..d).rev() {
            o[i] = (rem % side) as i32 - s as i32;
            rem /= side;
        }
        if o[..d].iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.push(o);
        }
    }
    out
}

/// Offset index joining `x` to `y` with `x` as the base, if `y - x` is a
/// canonical offset.
fn offset_index(offsets: &[[i32; MAX_DIM]], d: usize, x: &Vertex, y: &Vertex) -> Option<usize> {
    let mut delta = [0; MAX_DIM];
    for i in 0..d {
        delta[i] = y.coord(i) - x.coord(i);
    }
    offsets.iter().position(|o| o[..d] == delta[..d])
}

/// Lazily evaluated edge states of the infinite lattice; agrees with every
/// sampled [`Configuration`] of the same seed, stream and parameters.
#[derive(Clone, Debug)]
pub struct EdgeField {
    params: ModelParams,
    rng: EdgeRng,
    offsets: Vec<[i32; MAX_DIM]>,
}

impl EdgeField {
    pub fn new(params: ModelParams, seed: u64) -> Self {
        Self::with_stream(params, seed, RNG_ID)
    }

    pub fn with_stream(params: ModelParams, seed: u64, rng_id: u64) -> Self {
        EdgeField {
            params,
            rng: EdgeRng::new(seed, rng_id),
            offsets: edge_offsets(params.d, params.s),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn offsets(&self) -> &[[i32; MAX_DIM]] {
        &self.offsets
    }

    #[inline]
    pub fn is_open_at(&self, base: &Vertex, offset: usize) -> bool {
        self.rng.uniform(base.coords(), offset) < self.params.p
    }

    /// State of the edge `{x, y}`; `None` if the pair is not an edge.
    pub fn is_open(&self, x: &Vertex, y: &Vertex) -> Option<bool> {
        let d = self.params.d;
        if let Some(k) = offset_index(&self.offsets, d, x, y) {
            return Some(self.is_open_at(x, k));
        }
        offset_index(&self.offsets, d, y, x).map(|k| self.is_open_at(y, k))
    }

    /// Neighbours of `x` joined to it by an open edge.
    pub fn open_neighbors(&self, x: &Vertex, out: &mut Vec<Vertex>) {
        out.clear();
        let d = self.params.d;
        let key = self.rng.vertex_key(x.coords());
        for (k, o) in self.offsets.iter().enumerate() {
            if self.rng.uniform_at(key, k) < self.params.p {
                out.push(x.offset_by(&o[..d]));
            }
            let y = x.offset_by(&o.map(|c| -c)[..d]);
            if self.is_open_at(&y, k) {
                out.push(y);
            }
        }
    }
}

/// An edge configuration on a cuboid.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    params: ModelParams,
    region: Cuboid,
    seed: u64,
    rng_id: u64,
    offsets: Vec<[i32; MAX_DIM]>,
    /// Bit per slot `vertex_index * offsets.len() + k`; slots whose far
    /// endpoint leaves the region stay zero.
    bits: Vec<u64>,
    /// Per vertex: some open edge joins it to a vertex outside the region.
    exits: Vec<bool>,
    exterior: Exterior,
}

/// How edges leaving the region are decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exterior {
    /// Drawn from the same edge generator as the interior.
    Sampled,
    /// Decided by the constructor's rule.
    Given,
}

/// Iterates the vertices of a cuboid in index order with their coordinates.
pub(crate) fn for_each_vertex(region: &Cuboid, mut f: impl FnMut(usize, &[i32; MAX_DIM])) {
    let d = region.dim();
    let mut c = [0i32; MAX_DIM];
    for i in 0..d {
        c[i] = region.lo_at(i);
    }
    for idx in 0..region.len() {
        f(idx, &c);
        for i in (0..d).rev() {
            if c[i] < region.hi_at(i) {
                c[i] += 1;
                break;
            }
            c[i] = region.lo_at(i);
        }
    }
}

impl Configuration {
    /// Samples every edge of `B_n` independently (see [`Configuration::sample_cuboid`]).
    pub fn sample(params: ModelParams, bx: LatticeBox, seed: u64) -> Result<Self> {
        if bx.d != params.d {
            return Err(Error::DimensionMismatch {
                expected: params.d,
                got: bx.d,
            });
        }
        Self::sample_cuboid(params, bx.cuboid(), seed)
    }

    pub fn sample_cuboid(params: ModelParams, region: Cuboid, seed: u64) -> Result<Self> {
        Self::sample_stream(params, region, seed, RNG_ID)
    }

    pub fn sample_stream(params: ModelParams, region: Cuboid, seed: u64, rng_id: u64) -> Result<Self> {
        if region.dim() != params.d {
            return Err(Error::DimensionMismatch {
                expected: params.d,
                got: region.dim(),
            });
        }
        let rng = EdgeRng::new(seed, rng_id);
        let p = params.p;
        let mut c = Self::empty(params, region, seed, rng_id);
        let n_off = c.offsets.len();
        let offsets = std::mem::take(&mut c.offsets);
        let d = params.d;
        let t = threshold53(p);
        let last = d - 1;
        let (lo_last, hi_last) = (region.lo_at(last), region.hi_at(last));
        let row_len = region.side(last);
        // prefix[i] is the hash of the first i coordinates of the current row
        let mut prefix = [0u64; MAX_DIM + 1];
        prefix[0] = rng.root_key();
        let mut x = [0i32; MAX_DIM];
        for i in 0..d {
            x[i] = region.lo_at(i);
        }
        for i in 0..last {
            prefix[i + 1] = EdgeRng::absorb(prefix[i], x[i]);
        }
        let mut row_ok = vec![false; n_off];
        for row in 0..region.len() / row_len {
            for (k, o) in offsets.iter().enumerate() {
                row_ok[k] = (0..last).all(|i| {
                    let y = x[i] + o[i];
                    y >= region.lo_at(i) && y <= region.hi_at(i)
                });
            }
            let mut slot = row * row_len * n_off;
            for z in lo_last..=hi_last {
                let key = EdgeRng::absorb(prefix[last], z);
                for (k, o) in offsets.iter().enumerate() {
                    let y = z + o[last];
                    if row_ok[k] && y >= lo_last && y <= hi_last && rng.bits53_at(key, k) < t {
                        c.bits[slot / 64] |= 1 << (slot % 64);
                    }
                    slot += 1;
                }
            }
            let mut i = last;
            while i > 0 {
                i -= 1;
                if x[i] < region.hi_at(i) {
                    x[i] += 1;
                    break;
                }
                x[i] = region.lo_at(i);
            }
            for j in i..last {
                prefix[j + 1] = EdgeRng::absorb(prefix[j], x[j]);
            }
        }
        c.offsets = offsets;
        c.sample_exits();
        Ok(c)
    }

    fn sample_exits(&mut self) {
        let field = EdgeField::with_stream(self.params, self.seed, self.rng_id);
        let region = self.region;
        let shell = self.params.reach() as i32;
        let d = self.params.d;
        // slabs of width `shell` along each face; vertices in several slabs are
        // visited more than once, which is harmless
        for axis in 0..d {
            for lower in [true, false] {
                let mut lo = [0i32; MAX_DIM];
                let mut hi = [0i32; MAX_DIM];
                for i in 0..d {
                    lo[i] = region.lo_at(i);
                    hi[i] = region.hi_at(i);
                }
                if lower {
                    hi[axis] = hi[axis].min(lo[axis] + shell - 1);
                } else {
                    lo[axis] = lo[axis].max(hi[axis] - shell + 1);
                }
                let slab = Cuboid::new_unchecked(d, lo, hi);
                for x in slab.iter() {
                    let idx = region.index(&x);
                    if self.exits[idx] {
                        continue;
                    }
                    self.exits[idx] = self.offsets.iter().enumerate().any(|(k, o)| {
                        let fwd = x.offset_by(&o[..d]);
                        let back = x.offset_by(&o.map(|c| -c)[..d]);
                        (!region.contains(&fwd) && field.is_open_at(&x, k))
                            || (!region.contains(&back) && field.is_open_at(&back, k))
                    });
                }
            }
        }
    }

    /// A configuration whose open edges are those `{x, y}` with `open(x, y)`,
    /// including edges leaving the region.
    pub fn from_fn(
        params: ModelParams,
        region: Cuboid,
        mut open: impl FnMut(&Vertex, &Vertex) -> bool,
    ) -> Result<Self> {
        if region.dim() != params.d {
            return Err(Error::DimensionMismatch {
                expected: params.d,
                got: region.dim(),
            });
        }
        let mut c = Self::empty(params, region, 0, 0);
        c.exterior = Exterior::Given;
        let n_off = c.offsets.len();
        let d = params.d;
        for idx in 0..region.len() {
            let x = region.vertex(idx);
            for k in 0..n_off {
                let y = x.offset_by(&c.offsets[k][..d]);
                if region.contains(&y) {
                    if open(&x, &y) {
                        let slot = idx * n_off + k;
                        c.bits[slot / 64] |= 1 << (slot % 64);
                    }
                } else if open(&x, &y) {
                    c.exits[idx] = true;
                }
                let back = x.offset_by(&c.offsets[k].map(|c| -c)[..d]);
                if !region.contains(&back) && open(&back, &x) {
                    c.exits[idx] = true;
                }
            }
        }
        Ok(c)
    }

    /// A configuration with exactly the listed edges of the region open; all
    /// edges leaving the region are closed.
    pub fn from_open_edges(params: ModelParams, region: Cuboid, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let offsets = edge_offsets(params.d, params.s);
        for (x, y) in edges {
            if !region.contains(x) || !region.contains(y) {
                return Err(Error::OutsideBox(format!("{x}-{y}")));
            }
            if offset_index(&offsets, params.d, x, y).is_none() && offset_index(&offsets, params.d, y, x).is_none() {
                return Err(Error::NotAnEdge);
            }
        }
        Self::from_fn(params, region, |x, y| {
            edges.iter().any(|(a, b)| (a == x && b == y) || (a == y && b == x))
        })
    }

    fn empty(params: ModelParams, region: Cuboid, seed: u64, rng_id: u64) -> Self {
        let offsets = edge_offsets(params.d, params.s);
        let slots = region.len() * offsets.len();
        Configuration {
            params,
            region,
            seed,
            rng_id,
            offsets,
            bits: vec![0; slots.div_ceil(64)],
            exits: vec![false; region.len()],
            exterior: Exterior::Sampled,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn region(&self) -> &Cuboid {
        &self.region
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng_id(&self) -> u64 {
        self.rng_id
    }

    pub fn offsets(&self) -> &[[i32; MAX_DIM]] {
        &self.offsets
    }

    pub fn exterior(&self) -> Exterior {
        self.exterior
    }

    /// Whether the vertex with this index has an open edge leaving the region.
    #[inline]
    /// Raw open-slot bits, slot `vertex_index * offsets.len() + k`.
    pub(crate) fn slot_words(&self) -> &[u64] {
        &self.bits
    }

    pub(crate) fn exit_flags(&self) -> &[bool] {
        &self.exits
    }

    pub fn exits(&self, idx: usize) -> bool {
        self.exits[idx]
    }

    /// The radius `n` if the region is a box `B_n`.
    pub fn box_radius(&self) -> Option<u32> {
        let n = self.region.hi_at(0);
        let bx = LatticeBox::new(self.params.d, n.max(1) as u32).ok()?;
        (n >= 1 && bx.cuboid() == self.region).then_some(n as u32)
    }

    /// Whether slot `(idx, k)` is open; false for slots leaving the region.
    #[inline]
    pub fn slot_open(&self, idx: usize, k: usize) -> bool {
        let slot = idx * self.offsets.len() + k;
        self.bits[slot / 64] >> (slot % 64) & 1 == 1
    }

    /// State of the edge `{x, y}`; `None` if it is not an edge of the region.
    pub fn is_open(&self, x: &Vertex, y: &Vertex) -> Option<bool> {
        if !self.region.contains(x) || !self.region.contains(y) {
            return None;
        }
        let d = self.params.d;
        if let Some(k) = offset_index(&self.offsets, d, x, y) {
            return Some(self.slot_open(self.region.index(x), k));
        }
        offset_index(&self.offsets, d, y, x).map(|k| self.slot_open(self.region.index(y), k))
    }

    /// Edges of the region in canonical order, with their states.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, bool)> + '_ {
        let d = self.params.d;
        (0..self.region.len()).flat_map(move |idx| {
            let x = self.region.vertex(idx);
            (0..self.offsets.len()).filter_map(move |k| {
                let y = x.offset_by(&self.offsets[k][..d]);
                self.region.contains(&y).then(|| (x, y, self.slot_open(idx, k)))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for_each_vertex(&self.region, |_, x| {
            count += self.offsets.iter().filter(|o| inside(&self.region, x, o)).count();
        });
        count
    }

    pub fn open_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Binary serialization of a configuration on a box `B_n`:
    /// `PLCF`, version, `d` (u8), exterior flag (u8: 0 sampled, 1 given),
    /// then little-endian `n` (u32), `S` (u32), `F` (u32), `p` (f64),
    /// seed (u64), stream (u64), edge count (u64), and the edge states packed
    /// least-significant bit first in canonical order. Given exteriors are
    /// followed by one packed exit bit per box vertex.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let n = self
            .box_radius()
            .ok_or_else(|| Error::Precondition("only box configurations serialize".into()))?;
        w.write_all(MAGIC)?;
        let given = self.exterior == Exterior::Given;
        w.write_all(&[FORMAT_VERSION, self.params.d as u8, given as u8])?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&self.params.s.to_le_bytes())?;
        w.write_all(&self.params.f.to_le_bytes())?;
        w.write_all(&self.params.p.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.rng_id.to_le_bytes())?;
        let states: Vec<bool> = self.edges().map(|(_, _, open)| open).collect();
        w.write_all(&(states.len() as u64).to_le_bytes())?;
        let mut packed = vec![0u8; states.len().div_ceil(8)];
        for (i, &open) in states.iter().enumerate() {
            if open {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        w.write_all(&packed)?;
        if given {
            let mut exits = vec![0u8; self.exits.len().div_ceil(8)];
            for (i, _) in self.exits.iter().enumerate().filter(|(_, &e)| e) {
                exits[i / 8] |= 1 << (i % 8);
            }
            w.write_all(&exits)?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
            let mut buf = [0u8; N];
            r.read_exact(&mut buf)?;
            Ok(buf)
        }
        if &take::<4>(&mut r)? != MAGIC {
            return Err(Error::Parse("bad magic".into()));
        }
        let [version, d, given] = take::<3>(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(take(&mut r)?);
        let s = u32::from_le_bytes(take(&mut r)?);
        let f = u32::from_le_bytes(take(&mut r)?);
        let p = f64::from_le_bytes(take(&mut r)?);
        let seed = u64::from_le_bytes(take(&mut r)?);
        let rng_id = u64::from_le_bytes(take(&mut r)?);
        let count = u64::from_le_bytes(take(&mut r)?) as usize;
        let params = ModelParams::new(d as usize, p, s, f)?;
        let bx = LatticeBox::new(d as usize, n)?;
        let mut c = Self::empty(params, bx.cuboid(), seed, rng_id);
        if c.edge_count() != count {
            return Err(Error::Parse(format!("edge count {count} does not match the box")));
        }
        let mut packed = vec![0u8; count.div_ceil(8)];
        r.read_exact(&mut packed)?;
        let n_off = c.offsets.len();
        let region = c.region;
        let offsets = c.offsets.clone();
        let mut i = 0;
        for_each_vertex(&region, |idx, x| {
            for (k, o) in offsets.iter().enumerate() {
                if inside(&region, x, o) {
                    if packed[i / 8] >> (i % 8) & 1 == 1 {
                        let slot = idx * n_off + k;
                        c.bits[slot / 64] |= 1 << (slot % 64);
                    }
                    i += 1;
                }
            }
        });
        match given {
            0 => c.sample_exits(),
            1 => {
                c.exterior = Exterior::Given;
                let mut exits = vec![0u8; c.exits.len().div_ceil(8)];
                r.read_exact(&mut exits)?;
                for (i, e) in c.exits.iter_mut().enumerate() {
                    *e = exits[i / 8] >> (i % 8) & 1 == 1;
                }
            }
            _ => return Err(Error::Parse(format!("bad exterior flag {given}"))),
        }
        Ok(c)
    }
}

#[inline]
pub(crate) fn inside(region: &Cuboid, x: &[i32; MAX_DIM], o: &[i32; MAX_DIM]) -> bool {
    (0..region.dim()).all(|i| {
        let c = x[i] + o[i];
        c >= region.lo_at(i) && c <= region.hi_at(i)
    })
}
