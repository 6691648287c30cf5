//! Milnor-fiber data attached to an incidence matrix.
//!
//! For a picture deformation with incidence matrix `M` (`r × n`), the Milnor
//! fiber `W` is the blow-up of a ball at `n` points with tubular
//! neighbourhoods of the `r` strict transforms removed. Its capped version is
//! obtained by gluing one 2-handle per branch along the boundary. From `M`
//! alone we read off:
//!
//! - the Gram matrix `−M·Mᵀ` of the spheres closing up the branch
//!   transforms, which must agree with the closed form
//!   `−(l_i + 2δ_i)` / `−C_i·C_k`;
//! - the Euler number `1 + n − r`;
//! - the kernel lattice of `M` inside `ℤⁿ` with the form `−I`, a diagnostic
//!   only.
//!
//! Two matrices give markings-preserving diffeomorphic fibers only if they
//! agree up to column permutation, so distinct canonical forms count distinct
//! fillings.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::germ::DecoratedGerm;
use crate::incidence::{canonicalize, constraints_of, validate_matrix, IncidenceMatrix, Violation};
use crate::linalg;
use crate::resolution::{marking, ResolutionError};
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillingError {
    #[error("matrix violates the constraints: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    ConstraintMismatch(Vec<Violation>),
    #[error("-M*M^T is {computed:?} but the closed form is {expected:?}")]
    GramMismatch {
        computed: Vec<Vec<i64>>,
        expected: Vec<Vec<i64>>,
    },
    #[error("germs {first} and {second} are not topologically equivalent")]
    NotEquivalentGerms { first: usize, second: usize },
    #[error("{germs} germs but {sets} matrix sets")]
    SetCountMismatch { germs: usize, sets: usize },
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

fn validated(germ: &DecoratedGerm, m: &IncidenceMatrix) -> Result<(), FillingError> {
    let v = validate_matrix(m, &constraints_of(germ));
    if v.is_empty() {
        Ok(())
    } else {
        Err(FillingError::ConstraintMismatch(v))
    }
}

/// Closed form of the sphere Gram matrix: `−(l_i + 2δ_i)` on the diagonal,
/// `−C_i·C_k` off it.
pub fn closed_form_gram(germ: &DecoratedGerm) -> Vec<Vec<i64>> {
    constraints_of(germ)
        .gram_target()
        .into_iter()
        .map(|row| row.into_iter().map(|v| -v).collect())
        .collect()
}

/// `−M·Mᵀ`, checked against [`closed_form_gram`].
pub fn sphere_gram(germ: &DecoratedGerm, m: &IncidenceMatrix) -> Result<Vec<Vec<i64>>, FillingError> {
    validated(germ, m)?;
    let computed: Vec<Vec<i64>> = m
        .gram()
        .into_iter()
        .map(|row| row.into_iter().map(|v| -v).collect())
        .collect();
    let expected = closed_form_gram(germ);
    if computed != expected {
        return Err(FillingError::GramMismatch { computed, expected });
    }
    Ok(computed)
}

/// One 2-handle of the cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapHandle {
    pub branch: String,
    /// `−(l_i + 2δ_i)`
    pub framing: i64,
    /// Vertex of `E(C,l)` whose plumbing piece carries the attaching circle.
    pub piece: String,
    /// Added to the fiber framing of the plumbing piece.
    pub fiber_framing_offset: i64,
}

/// The handles glued to a Milnor fiber to close it up. Depends on the germ
/// only, which is why no matrix is taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapDescription {
    pub handles: Vec<CapHandle>,
}

impl CapDescription {
    pub fn to_text(&self) -> String {
        self.handles
            .iter()
            .map(|h| {
                format!(
                    "handle {} framing={} piece={} fiber-offset=+{}\n",
                    h.branch, h.framing, h.piece, h.fiber_framing_offset
                )
            })
            .collect()
    }
}

pub fn cap_description(germ: &DecoratedGerm) -> Result<CapDescription, FillingError> {
    let marks = marking(germ)?;
    let cs = constraints_of(germ);
    let handles = germ
        .branches()
        .iter()
        .enumerate()
        .map(|(i, b)| CapHandle {
            branch: b.name.clone(),
            framing: -((cs.lengths[i] + 2 * cs.deltas[i]) as i64),
            piece: marks.piece(i + 1).to_owned(),
            fiber_framing_offset: 1,
        })
        .collect();
    Ok(CapDescription { handles })
}

/// `χ(W) = 1 + n − r`.
pub fn euler_number(m: &IncidenceMatrix) -> i64 {
    1 + m.cols() as i64 - m.rows() as i64
}

/// `{v ∈ ℤⁿ : M·v = 0}` with the restriction of the form `−I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelLattice {
    /// Hermite-reduced basis, one row per generator.
    pub basis: Vec<Vec<i64>>,
    /// `−BᵀB` for the basis `B` (generators as columns).
    pub gram: Vec<Vec<i64>>,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_negative_definite(&self) -> bool {
        let big: Vec<Vec<Int>> = crate::scalar::lift_matrix(&self.gram);
        linalg::is_negative_definite(&big)
    }
}

pub fn kernel_lattice(m: &IncidenceMatrix) -> KernelLattice {
    let rows: Vec<Vec<Int>> = crate::scalar::lift_matrix(&m.to_i64_rows());
    let basis: Vec<Vec<i64>> = linalg::integer_kernel(&rows, m.cols())
        .into_iter()
        .map(|v| {
            v.iter()
                .map(|x| i64::try_from(x).expect("kernel entry exceeds i64"))
                .collect()
        })
        .collect();
    let gram = basis
        .iter()
        .map(|a| {
            basis
                .iter()
                .map(|b| -a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>())
                .collect()
        })
        .collect();
    KernelLattice { basis, gram }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Distinction {
    SameClass,
    /// The fibers are not diffeomorphic by any orientation-preserving
    /// diffeomorphism respecting the markings.
    DistinctFillings,
}

impl fmt::Display for Distinction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SameClass => f.write_str("same class: the matrices agree up to column permutation"),
            Self::DistinctFillings => f.write_str(
                "distinct fillings: the matrices differ up to column permutation, so the Milnor fibers \
                 are not diffeomorphic by an orientation-preserving diffeomorphism preserving the markings",
            ),
        }
    }
}

pub fn distinguish(germ: &DecoratedGerm, a: &IncidenceMatrix, b: &IncidenceMatrix) -> Result<Distinction, FillingError> {
    validated(germ, a)?;
    validated(germ, b)?;
    Ok(if canonicalize(a) == canonicalize(b) {
        Distinction::SameClass
    } else {
        Distinction::DistinctFillings
    })
}

/// Number of distinct canonical matrices over all germs, which must be
/// pairwise topologically equivalent. Each set is validated against its own
/// germ.
pub fn filling_lower_bound(germs: &[DecoratedGerm], sets: &[Vec<IncidenceMatrix>]) -> Result<usize, FillingError> {
    if germs.len() != sets.len() {
        return Err(FillingError::SetCountMismatch {
            germs: germs.len(),
            sets: sets.len(),
        });
    }
    for i in 0..germs.len() {
        for k in i + 1..germs.len() {
            if !germs[i].is_topologically_equivalent(&germs[k]) {
                return Err(FillingError::NotEquivalentGerms { first: i + 1, second: k + 1 });
            }
        }
    }
    let mut union = BTreeSet::new();
    for (germ, set) in germs.iter().zip(sets) {
        for m in set {
            validated(germ, m)?;
            union.insert(canonicalize(m));
        }
    }
    Ok(union.len())
}

/// Everything derived from one matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillingReport {
    pub matrix: IncidenceMatrix,
    pub gram: Vec<Vec<i64>>,
    pub euler_number: i64,
    pub kernel: KernelLattice,
    pub cap: CapDescription,
}

impl FillingReport {
    pub fn new(germ: &DecoratedGerm, m: &IncidenceMatrix) -> Result<Self, FillingError> {
        Ok(Self {
            matrix: canonicalize(m),
            gram: sphere_gram(germ, m)?,
            euler_number: euler_number(m),
            kernel: kernel_lattice(m),
            cap: cap_description(germ)?,
        })
    }

    pub fn to_text(&self) -> String {
        let rows = |m: &[Vec<i64>]| -> String {
            m.iter()
                .map(|r| format!("  {}\n", r.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")))
                .collect()
        };
        let mut out = String::from("incidence matrix (canonical):\n");
        for line in self.matrix.to_text().lines() {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("sphere gram:\n");
        out.push_str(&rows(&self.gram));
        out.push_str(&format!("euler number: {}\n", self.euler_number));
        out.push_str(&format!("kernel lattice rank (diagnostic): {}\n", self.kernel.rank()));
        if self.kernel.rank() > 0 {
            out.push_str("kernel lattice gram:\n");
            out.push_str(&rows(&self.kernel.gram));
        }
        out.push_str("cap:\n");
        for line in self.cap.to_text().lines() {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
