//! Term supports on the torus lattices and the named string operators.

use std::fmt;
use std::str::FromStr;

use crate::lattice::{Edge, Lattice, Sublattice};
use crate::weyl::{WeylError, WeylString};

type Factors = Vec<(usize, i64, i64)>;

/// Plaquette `(i, j)`: `Z^M` on its bottom and right edges, `Z^-M` on top and left.
pub fn toric_plaquette(lat: &Lattice, i: i64, j: i64, m: i64) -> Factors {
    vec![
        (lat.edge(i, j, Edge::Horizontal), 0, m),
        (lat.edge(i + 1, j, Edge::Vertical), 0, m),
        (lat.edge(i, j + 1, Edge::Horizontal), 0, -m),
        (lat.edge(i, j, Edge::Vertical), 0, -m),
    ]
}

/// Star `(i, j)`: `X^L` on the outgoing edges, `X^-L` on the incoming ones.
pub fn toric_star(lat: &Lattice, i: i64, j: i64, l: i64) -> Factors {
    vec![
        (lat.edge(i, j, Edge::Horizontal), l, 0),
        (lat.edge(i, j, Edge::Vertical), l, 0),
        (lat.edge(i - 1, j, Edge::Horizontal), -l, 0),
        (lat.edge(i, j - 1, Edge::Vertical), -l, 0),
    ]
}

// corner offsets (dx, dy, dz)
const A0: [(i64, i64, i64); 4] = [(1, 0, 0), (0, 1, 0), (1, 1, 1), (1, 1, 0)];
const A1: [(i64, i64, i64); 4] = [(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)];
const B0: [(i64, i64, i64); 4] = [(1, 0, 0), (0, 1, 0), (1, 1, 1), (0, 0, 1)];
const B1: [(i64, i64, i64); 4] = [(0, 0, 0), (1, 0, 1), (0, 1, 1), (0, 0, 1)];

/// Clock-type cube term anchored at `(x, y, z)`.
pub fn cube_a(lat: &Lattice, x: i64, y: i64, z: i64, m: i64) -> Factors {
    let s0 = A0.iter().map(|&(dx, dy, dz)| (lat.cubic_site(x + dx, y + dy, z + dz, 0), 0, m));
    let s1 = A1.iter().map(|&(dx, dy, dz)| (lat.cubic_site(x + dx, y + dy, z + dz, 1), 0, m));
    s0.chain(s1).collect()
}

/// Shift-type cube term anchored at `(x, y, z)`.
pub fn cube_b(lat: &Lattice, x: i64, y: i64, z: i64, l: i64) -> Factors {
    let s0 = B0.iter().map(|&(dx, dy, dz)| (lat.cubic_site(x + dx, y + dy, z + dz, 0), l, 0));
    let s1 = B1.iter().map(|&(dx, dy, dz)| (lat.cubic_site(x + dx, y + dy, z + dz, 1), -l, 0));
    s0.chain(s1).collect()
}

/// The six corners of plaquette `(i, j)`, going around the hexagon.
fn hexagon(lat: &Lattice, i: i64, j: i64) -> [usize; 6] {
    let s = |i, j, sub| lat.honeycomb_site(i, j, sub);
    [
        s(i, j - 1, Sublattice::A),
        s(i - 1, j, Sublattice::B),
        s(i, j, Sublattice::A),
        s(i, j, Sublattice::B),
        s(i + 1, j - 1, Sublattice::A),
        s(i, j - 1, Sublattice::B),
    ]
}

/// x, y and z bonds owned by plaquette `(i, j)`.
pub fn honeycomb_bonds(lat: &Lattice, i: i64, j: i64, m: i64, l: i64) -> [Factors; 3] {
    let v = hexagon(lat, i, j);
    [
        vec![(v[0], l, 0), (v[1], l, 0)],
        vec![(v[1], 0, -m), (v[1], -l, 0), (v[2], 0, -m), (v[2], -l, 0)],
        vec![(v[2], 0, m), (v[3], 0, m)],
    ]
}

/// Product of the outward-bond operators around plaquette `(i, j)`.
pub fn honeycomb_plaquette(lat: &Lattice, i: i64, j: i64, m: i64, l: i64) -> Factors {
    let v = hexagon(lat, i, j);
    vec![
        (v[0], 0, -m),
        (v[0], -l, 0),
        (v[1], 0, m),
        (v[2], l, 0),
        (v[3], 0, -m),
        (v[3], -l, 0),
        (v[4], 0, m),
        (v[5], l, 0),
    ]
}

/// Named non-contractible string operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StringId {
    /// Toric clock string along row `j`.
    ZRow(usize),
    /// Toric clock string along column `i`.
    ZCol(usize),
    /// Toric shift string along row `j`.
    XRow(usize),
    /// Toric shift string along column `i`.
    XCol(usize),
    /// Honeycomb horizontal string along row `j`.
    VRow(usize),
    /// Honeycomb zig-zag string through column `i`.
    VZig(usize),
}

impl fmt::Display for StringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringId::ZRow(k) => write!(f, "zrow{k}"),
            StringId::ZCol(k) => write!(f, "zcol{k}"),
            StringId::XRow(k) => write!(f, "xrow{k}"),
            StringId::XCol(k) => write!(f, "xcol{k}"),
            StringId::VRow(k) => write!(f, "vrow{k}"),
            StringId::VZig(k) => write!(f, "vzig{k}"),
        }
    }
}

impl FromStr for StringId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or(format!("string id '{s}' has no index"))?;
        let (name, idx) = s.split_at(split);
        let k: usize = idx.parse().map_err(|_| format!("bad index in '{s}'"))?;
        Ok(match name {
            "zrow" => StringId::ZRow(k),
            "zcol" => StringId::ZCol(k),
            "xrow" => StringId::XRow(k),
            "xcol" => StringId::XCol(k),
            "vrow" => StringId::VRow(k),
            "vzig" => StringId::VZig(k),
            _ => return Err(format!("unknown string family '{name}'")),
        })
    }
}

pub(crate) fn toric_string_ids(lx: usize, ly: usize) -> Vec<StringId> {
    let rows = (0..ly).flat_map(|j| [StringId::ZRow(j), StringId::XRow(j)]);
    let cols = (0..lx).flat_map(|i| [StringId::ZCol(i), StringId::XCol(i)]);
    rows.chain(cols).collect()
}

pub(crate) fn honeycomb_string_ids(lx: usize, ly: usize) -> Vec<StringId> {
    (0..ly)
        .map(StringId::VRow)
        .chain((0..lx).map(StringId::VZig))
        .collect()
}

pub(crate) fn string(lat: &Lattice, id: StringId, n: u32, m: i64, l: i64) -> Result<WeylString, WeylError> {
    let mut f: Factors = Vec::new();
    match (*lat, id) {
        (Lattice::SquareTorus { lx, .. }, StringId::ZRow(j)) => {
            f.extend((0..lx as i64).map(|i| (lat.edge(i, j as i64, Edge::Horizontal), 0, m)));
        }
        (Lattice::SquareTorus { ly, .. }, StringId::ZCol(i)) => {
            f.extend((0..ly as i64).map(|j| (lat.edge(i as i64, j, Edge::Vertical), 0, m)));
        }
        (Lattice::SquareTorus { lx, .. }, StringId::XRow(j)) => {
            f.extend((0..lx as i64).map(|i| (lat.edge(i, j as i64, Edge::Vertical), l, 0)));
        }
        (Lattice::SquareTorus { ly, .. }, StringId::XCol(i)) => {
            f.extend((0..ly as i64).map(|j| (lat.edge(i as i64, j, Edge::Horizontal), l, 0)));
        }
        (Lattice::HoneycombTorus { lx, .. }, StringId::VRow(j)) => {
            for i in 0..lx as i64 {
                f.push((lat.honeycomb_site(i, j as i64, Sublattice::A), l, 0));
                f.push((lat.honeycomb_site(i, j as i64, Sublattice::B), -l, 0));
            }
        }
        (Lattice::HoneycombTorus { ly, .. }, StringId::VZig(i)) => {
            let i = i as i64;
            for j in 0..ly as i64 {
                f.push((lat.honeycomb_site(i, j, Sublattice::A), 0, m));
                f.push((lat.honeycomb_site(i - 1, j + 1, Sublattice::B), 0, -m));
            }
        }
        _ => panic!("string {id} is not defined on {lat}"),
    }
    WeylString::from_factors(n, f)
}
