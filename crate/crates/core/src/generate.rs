//! Graph family generators with canonical vertex numberings.
//!
//! Numberings:
//! - complete n: vertices 0..n-1, edges (i,j) for i<j.
//! - complete_bipartite n1 n2: part A = 0..n1-1, part B = n1..n1+n2-1.
//! - cycle_product i j: vertex (a,b) is a*j+b; ring edges in both coordinates.
//! - petersen j k: outer cycle 0..j-1, inner vertices j..2j-1, spokes (i, j+i),
//!   inner edges (j+i, j+((i+k) mod j)).

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete { n: usize },
    CompleteBipartite { n1: usize, n2: usize },
    CycleProduct { i: usize, j: usize },
    Petersen { j: usize, k: usize },
}

pub fn generate(family: Family) -> Result<Graph> {
    match family {
        Family::Complete { n } => {
            if n < 1 {
                return Err(Error::Domain("complete graph needs n >= 1".into()));
            }
            let mut g = Graph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    g.add_edge(i, j)?;
                }
            }
            Ok(g)
        }
        Family::CompleteBipartite { n1, n2 } => {
            if n1 < 1 || n2 < 1 {
                return Err(Error::Domain("complete bipartite needs n1, n2 >= 1".into()));
            }
            let mut g = Graph::new(n1 + n2);
            for a in 0..n1 {
                for b in 0..n2 {
                    g.add_edge(a, n1 + b)?;
                }
            }
            Ok(g)
        }
        Family::CycleProduct { i, j } => {
            if i < 3 || j < 3 {
                return Err(Error::Domain("cycle product needs i, j >= 3".into()));
            }
            let idx = |a: usize, b: usize| a * j + b;
            let mut g = Graph::new(i * j);
            for a in 0..i {
                for b in 0..j {
                    g.add_edge(idx(a, b), idx(a, (b + 1) % j))?;
                    g.add_edge(idx(a, b), idx((a + 1) % i, b))?;
                }
            }
            Ok(g)
        }
        Family::Petersen { j, k } => {
            if k < 1 || j < 2 * k + 1 {
                return Err(Error::Domain(format!(
                    "generalised Petersen P({j},{k}) needs k >= 1 and j >= 2k+1"
                )));
            }
            let mut g = Graph::new(2 * j);
            for i in 0..j {
                g.add_edge(i, (i + 1) % j)?;
                g.add_edge(i, j + i)?;
                g.add_edge(j + i, j + ((i + k) % j))?;
            }
            Ok(g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete5() {
        let g = generate(Family::Complete { n: 5 }).unwrap();
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.num_edges(), 10);
    }

    #[test]
    fn bipartite33() {
        let g = generate(Family::CompleteBipartite { n1: 3, n2: 3 }).unwrap();
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.num_edges(), 9);
        // Bipartite check: no edge inside a part.
        for &(u, v) in g.edges() {
            assert!((u < 3) != (v < 3));
        }
    }

    #[test]
    fn cycle_product_3_3() {
        let g = generate(Family::CycleProduct { i: 3, j: 3 }).unwrap();
        assert_eq!(g.num_vertices(), 9);
        assert_eq!(g.num_edges(), 18);
        for v in 0..9 {
            assert_eq!(g.degree(v), 4);
        }
    }

    #[test]
    fn petersen_5_2() {
        let g = generate(Family::Petersen { j: 5, k: 2 }).unwrap();
        assert_eq!(g.num_vertices(), 10);
        assert_eq!(g.num_edges(), 15);
        for v in 0..10 {
            assert_eq!(g.degree(v), 3);
        }
    }

    #[test]
    fn petersen_invalid_params() {
        assert!(generate(Family::Petersen { j: 4, k: 2 }).is_err());
    }

    #[test]
    fn degree_sum_invariant() {
        for fam in [
            Family::Complete { n: 7 },
            Family::CompleteBipartite { n1: 3, n2: 5 },
            Family::CycleProduct { i: 3, j: 5 },
            Family::Petersen { j: 9, k: 3 },
        ] {
            let g = generate(fam).unwrap();
            let sum: usize = (0..g.num_vertices()).map(|v| g.degree(v)).sum();
            assert_eq!(sum, 2 * g.num_edges());
        }
    }
}
