//! Lattice geometries and their site-index maps. Periodic coordinates wrap
//! with `rem_euclid`, so neighbor lookups accept any integer offset.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// Sites with no geometry attached.
    Free(usize),
    Ring(usize),
    Chain(usize),
    /// Square torus with two qudits per cell, one on each outgoing edge.
    SquareTorus { lx: usize, ly: usize },
    /// Cubic torus with two species per vertex.
    CubicTorus { l: usize },
    /// Brick-wall honeycomb torus with two sublattices per cell.
    HoneycombTorus { lx: usize, ly: usize },
}

/// Orientation of a square-torus edge, relative to its owning vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

impl Lattice {
    pub fn n_sites(&self) -> usize {
        match *self {
            Lattice::Free(n) | Lattice::Ring(n) | Lattice::Chain(n) => n,
            Lattice::SquareTorus { lx, ly } | Lattice::HoneycombTorus { lx, ly } => 2 * lx * ly,
            Lattice::CubicTorus { l } => 2 * l * l * l,
        }
    }

    /// Qudit on the edge leaving vertex `(i, j)` in direction `e`.
    pub fn edge(&self, i: i64, j: i64, e: Edge) -> usize {
        let Lattice::SquareTorus { lx, ly } = *self else {
            panic!("edge() needs a square torus, got {self}");
        };
        let i = i.rem_euclid(lx as i64) as usize;
        let j = j.rem_euclid(ly as i64) as usize;
        2 * (i + lx * j)
            + match e {
                Edge::Horizontal => 0,
                Edge::Vertical => 1,
            }
    }

    pub fn cubic_site(&self, x: i64, y: i64, z: i64, species: usize) -> usize {
        let Lattice::CubicTorus { l } = *self else {
            panic!("cubic_site() needs a cubic torus, got {self}");
        };
        let w = |c: i64| c.rem_euclid(l as i64) as usize;
        2 * (w(x) + l * (w(y) + l * w(z))) + species
    }

    pub fn honeycomb_site(&self, i: i64, j: i64, sub: Sublattice) -> usize {
        let Lattice::HoneycombTorus { lx, ly } = *self else {
            panic!("honeycomb_site() needs a honeycomb torus, got {self}");
        };
        let i = i.rem_euclid(lx as i64) as usize;
        let j = j.rem_euclid(ly as i64) as usize;
        2 * (i + lx * j)
            + match sub {
                Sublattice::A => 0,
                Sublattice::B => 1,
            }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Lattice::Free(n) => write!(f, "{n}"),
            Lattice::Ring(n) => write!(f, "{n} ring"),
            Lattice::Chain(n) => write!(f, "{n} chain"),
            Lattice::SquareTorus { lx, ly } => write!(f, "{} torus {lx} {ly}", self.n_sites()),
            Lattice::CubicTorus { l } => write!(f, "{} cubic {l}", self.n_sites()),
            Lattice::HoneycombTorus { lx, ly } => {
                write!(f, "{} honeycomb {lx} {ly}", self.n_sites())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn square_torus_edges_are_a_bijection() {
        let g = Lattice::SquareTorus { lx: 3, ly: 2 };
        let mut seen = HashSet::new();
        for i in 0..3 {
            for j in 0..2 {
                for e in [Edge::Horizontal, Edge::Vertical] {
                    assert!(seen.insert(g.edge(i, j, e)));
                }
            }
        }
        assert_eq!(seen.len(), g.n_sites());
        assert!(seen.iter().all(|&s| s < g.n_sites()));
        assert_eq!(g.edge(-1, 0, Edge::Horizontal), g.edge(2, 0, Edge::Horizontal));
    }

    #[test]
    fn cubic_sites_are_a_bijection() {
        let g = Lattice::CubicTorus { l: 3 };
        let mut seen = HashSet::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    for s in 0..2 {
                        assert!(seen.insert(g.cubic_site(x, y, z, s)));
                    }
                }
            }
        }
        assert_eq!(seen.len(), 54);
        assert_eq!(g.cubic_site(3, -1, 4, 1), g.cubic_site(0, 2, 1, 1));
    }

    #[test]
    fn honeycomb_wraps() {
        let g = Lattice::HoneycombTorus { lx: 2, ly: 3 };
        assert_eq!(g.honeycomb_site(2, 3, Sublattice::B), 1);
        assert_eq!(g.n_sites(), 12);
    }
}
