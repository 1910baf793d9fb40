/// Size limits for the exhaustive algorithms.
///
/// Every core algorithm is exponential in some set size; each limit caps the
/// size of the set being enumerated, and exceeding it is a
/// [`MatroidError::Capacity`](crate::MatroidError::Capacity) error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Ground-set size for circuit enumeration and circuit-based components.
    pub circuits: usize,
    /// Ground-set size for the exhaustive axiom checker.
    pub axioms: usize,
    /// Number of free elements in subset scans: `kappa_between`,
    /// separation search and the linking partition scan.
    pub search: usize,
}

impl Budget {
    pub const DEFAULT_CIRCUITS: usize = 20;
    pub const DEFAULT_AXIOMS: usize = 12;
    pub const DEFAULT_SEARCH: usize = 20;

    /// Same limit for circuit enumeration and subset scans; the axiom limit is unchanged.
    pub fn with_limit(limit: usize) -> Self {
        Self {
            circuits: limit,
            search: limit,
            ..Self::default()
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            circuits: Self::DEFAULT_CIRCUITS,
            axioms: Self::DEFAULT_AXIOMS,
            search: Self::DEFAULT_SEARCH,
        }
    }
}
