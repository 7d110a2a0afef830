use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Number of edges meeting at the node. `Infinite` is the limit n → ∞ of
/// the symmetric node, which only exists for the coefficient computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Finite(usize),
    Infinite,
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(n) => Some(n),
            Degree::Infinite => None,
        }
    }
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degree::Finite(n) => write!(f, "{n}"),
            Degree::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Degree {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" => Ok(Degree::Infinite),
            other => other
                .parse::<usize>()
                .map_err(|_| {
                    invalid(format!(
                        "node degree must be an integer or 'inf', got '{s}'"
                    ))
                })
                .and_then(|n| {
                    if n >= 2 {
                        Ok(Degree::Finite(n))
                    } else {
                        Err(invalid(format!("node degree must be >= 2, got {n}")))
                    }
                }),
        }
    }
}

/// How the incoming half of each edge's distribution is fed at the node.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `β_ij = 1/(n−1)` for i ≠ j, zero on the diagonal.
    Symmetric,
    /// Explicit `β`, row i holds the weights for edge i.
    General(DMatrix<f64>),
}

/// Degree plus coupling weights of a node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTopology {
    pub degree: Degree,
    pub coupling: Coupling,
}

impl NodeTopology {
    pub fn symmetric(degree: Degree) -> Self {
        NodeTopology {
            degree,
            coupling: Coupling::Symmetric,
        }
    }

    /// General weights; requires nonnegative entries.
    pub fn general(beta: DMatrix<f64>) -> Result<Self> {
        if !beta.is_square() || beta.nrows() < 2 {
            return Err(invalid("coupling matrix must be square with n >= 2"));
        }
        if beta.iter().any(|&b| !(b >= 0.0)) {
            return Err(invalid("coupling weights must be nonnegative"));
        }
        Ok(NodeTopology {
            degree: Degree::Finite(beta.nrows()),
            coupling: Coupling::General(beta),
        })
    }

    /// Two-edge node where each edge receives what the other emits.
    pub fn pass_through() -> Self {
        NodeTopology::general(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap()
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.coupling, Coupling::Symmetric)
    }

    /// Dense β. Fails for the infinite node.
    pub fn beta(&self) -> Result<DMatrix<f64>> {
        match (&self.coupling, self.degree) {
            (Coupling::General(b), _) => Ok(b.clone()),
            (Coupling::Symmetric, Degree::Finite(n)) => {
                let w = 1.0 / (n as f64 - 1.0);
                Ok(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w }))
            }
            (Coupling::Symmetric, Degree::Infinite) => {
                Err(invalid("the infinite node has no finite coupling matrix"))
            }
        }
    }

    /// Largest deviation of a column sum from one.
    pub fn conservation_defect(&self) -> Result<f64> {
        let b = self.beta()?;
        Ok(b.column_iter()
            .map(|c| (c.sum() - 1.0).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_degree() {
        assert_eq!("3".parse::<Degree>().unwrap(), Degree::Finite(3));
        assert_eq!("INF".parse::<Degree>().unwrap(), Degree::Infinite);
        assert!("1".parse::<Degree>().is_err());
        assert!("x".parse::<Degree>().is_err());
    }

    #[test]
    fn symmetric_weights_conserve() {
        let t = NodeTopology::symmetric(Degree::Finite(4));
        let b = t.beta().unwrap();
        assert_eq!(b[(1, 1)], 0.0);
        assert!((b[(0, 2)] - 1.0 / 3.0).abs() < 1e-15);
        assert!(t.conservation_defect().unwrap() < 1e-15);
        assert!(NodeTopology::symmetric(Degree::Infinite).beta().is_err());
    }

    #[test]
    fn negative_weights_rejected() {
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, -0.5, 0.0]);
        assert!(NodeTopology::general(b).is_err());
    }
}
