//! Exact-integer model of abstract 2-handlebodies and their homological
//! invariants.

mod form;
mod matrix;
mod snf;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use form::signature;
pub use matrix::{big_to_i64, IntMatrix};
pub use snf::{cokernel_factors, hermite_rows, kernel_basis, smith_normal_form, Smith};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Basis,
    Extra,
    AuxiliaryPlus,
    AuxiliaryMinus,
}

/// One framed 2-handle, attached along a (possibly Legendrian) knot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoHandle {
    pub id: String,
    pub role: Role,
    /// Seifert framing.
    pub framing: i64,
    pub tb: Option<i64>,
    pub rot: Option<i64>,
    /// Algebraic number of passes over each 1-handle.
    pub run_over: Vec<i64>,
    /// Genus of a surface bounded by the attaching circle inside the
    /// sub 1-handlebody.
    pub genus: Option<u32>,
}

impl TwoHandle {
    pub fn legendrian(&self) -> Option<(i64, i64)> {
        Some((self.tb?, self.rot?))
    }

    pub fn is_null_homologous_in_one_handles(&self) -> bool {
        self.run_over.iter().all(|x| *x == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handlebody {
    pub one_handles: usize,
    pub handles: Vec<TwoHandle>,
    /// Symmetric linking matrix in handle order, framings on the diagonal.
    pub linking: Vec<Vec<i64>>,
}

impl Handlebody {
    pub fn empty() -> Self {
        Handlebody {
            one_handles: 0,
            handles: Vec::new(),
            linking: Vec::new(),
        }
    }

    pub fn handle_count(&self) -> usize {
        self.handles.len()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.handles
            .iter()
            .position(|h| h.id == id)
            .ok_or_else(|| Error::UnknownHandle(id.to_string()))
    }

    pub fn handle(&self, id: &str) -> Result<&TwoHandle> {
        Ok(&self.handles[self.index_of(id)?])
    }

    pub fn euler(&self) -> i64 {
        1 - self.one_handles as i64 + self.handles.len() as i64
    }

    /// Boundary map from 2-chains to 1-chains: rows are 1-handles, columns
    /// are 2-handles.
    pub fn boundary_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.one_handles, self.handles.len());
        for (j, h) in self.handles.iter().enumerate() {
            for (i, x) in h.run_over.iter().enumerate() {
                m[(i, j)] = BigInt::from(*x);
            }
        }
        m
    }

    /// Linking matrix of the surgery diagram obtained by replacing every
    /// dotted circle with a 0-framed unknot.
    pub fn surgery_matrix(&self) -> IntMatrix {
        let s = self.one_handles;
        let c = self.handles.len();
        let mut m = IntMatrix::zeros(s + c, s + c);
        for (j, h) in self.handles.iter().enumerate() {
            for (i, x) in h.run_over.iter().enumerate() {
                m[(i, s + j)] = BigInt::from(*x);
                m[(s + j, i)] = BigInt::from(*x);
            }
            for (k, x) in self.linking[j].iter().enumerate() {
                m[(s + j, s + k)] = BigInt::from(*x);
            }
        }
        m
    }

    fn check_len(&self, a: &ClassVector) -> Result<()> {
        if a.coeffs.len() != self.handles.len() {
            return Err(Error::ClassLength {
                expected: self.handles.len(),
                got: a.coeffs.len(),
            });
        }
        Ok(())
    }

    /// Image of a 2-chain under the boundary map.
    pub fn boundary_of(&self, a: &ClassVector) -> Result<Vec<i64>> {
        self.check_len(a)?;
        let mut out = vec![0i128; self.one_handles];
        for (h, c) in self.handles.iter().zip(&a.coeffs) {
            for (i, x) in h.run_over.iter().enumerate() {
                out[i] += *x as i128 * *c as i128;
            }
        }
        out.into_iter().map(narrow).collect()
    }

    pub fn in_h2(&self, a: &ClassVector) -> Result<bool> {
        Ok(self.boundary_of(a)?.iter().all(|x| *x == 0))
    }

    /// Intersection pairing of two 2-chains through the linking matrix.
    pub fn pairing(&self, a: &ClassVector, b: &ClassVector) -> Result<i64> {
        self.check_len(a)?;
        self.check_len(b)?;
        let mut acc = 0i128;
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                acc += *x as i128 * self.linking[i][j] as i128 * *y as i128;
            }
        }
        narrow(acc)
    }

    pub fn square(&self, a: &ClassVector) -> Result<i64> {
        self.pairing(a, a)
    }
}

fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(x.to_string()))
}

/// Integer coefficient vector over the 2-handles of one handlebody.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassVector {
    pub coeffs: Vec<i64>,
}

impl ClassVector {
    pub fn zero(len: usize) -> Self {
        ClassVector { coeffs: vec![0; len] }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zero(len);
        v.coeffs[index] = 1;
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| *x == 0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Appends zero coefficients for newly created handles.
    pub fn extended(&self, extra: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(std::iter::repeat(0).take(extra));
        ClassVector { coeffs }
    }

    pub fn shifted(&self, leading: usize) -> Self {
        let mut coeffs = vec![0; leading];
        coeffs.extend_from_slice(&self.coeffs);
        ClassVector { coeffs }
    }
}

impl From<Vec<i64>> for ClassVector {
    fn from(coeffs: Vec<i64>) -> Self {
        ClassVector { coeffs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessProvenance {
    Input,
    PropGenusShift,
    BoundarySum,
    Stabilization,
}

/// A homology class together with the genus of a smoothly embedded surface
/// known to represent it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusWitness {
    #[serde(rename = "cls")]
    pub class: ClassVector,
    pub genus: u32,
    pub provenance: WitnessProvenance,
}

/// Witnesses read off the handle records: every handle with a recorded genus
/// and zero run-over spans a surface of that genus.
pub fn input_witnesses(h: &Handlebody) -> Vec<GenusWitness> {
    let c = h.handle_count();
    h.handles
        .iter()
        .enumerate()
        .filter_map(|(j, k)| {
            let g = k.genus?;
            k.is_null_homologous_in_one_handles().then(|| GenusWitness {
                class: ClassVector::unit(c, j),
                genus: g,
                provenance: WitnessProvenance::Input,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    WitnessOverOneHandle,
    LegendrianPairing,
    SliceBennequin,
    RunOverLength,
    DuplicateId,
    LinkingShape,
    LinkingAsymmetric,
    FramingMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub handle: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.message.clone()).collect();
        Err(Error::InvalidHandlebody(msgs.join("; ")))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{}", v.message)?;
        }
        Ok(())
    }
}

/// Lists every violated structural invariant of `h`.
pub fn validate(h: &Handlebody) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |kind, handle: Option<&str>, message: String| {
        out.push(Violation {
            kind,
            handle: handle.map(str::to_string),
            message,
        })
    };

    let mut seen = BTreeSet::new();
    for k in &h.handles {
        if !seen.insert(k.id.as_str()) {
            push(ViolationKind::DuplicateId, Some(&k.id), format!("duplicate handle id `{}`", k.id));
        }
    }

    for k in &h.handles {
        let id = Some(k.id.as_str());
        if k.run_over.len() != h.one_handles {
            push(
                ViolationKind::RunOverLength,
                id,
                format!(
                    "handle `{}`: run_over has length {}, expected {}",
                    k.id,
                    k.run_over.len(),
                    h.one_handles
                ),
            );
        }
        if k.genus.is_some() && !k.is_null_homologous_in_one_handles() {
            push(
                ViolationKind::WitnessOverOneHandle,
                id,
                format!("handle `{}`: witness over 1-handle", k.id),
            );
        }
        if k.tb.is_some() != k.rot.is_some() {
            push(
                ViolationKind::LegendrianPairing,
                id,
                format!("handle `{}`: tb and rot must be present together", k.id),
            );
        }
        if let (Some(tb), Some(rot), Some(g)) = (k.tb, k.rot, k.genus) {
            if tb + rot.abs() > 2 * g as i64 - 1 {
                push(
                    ViolationKind::SliceBennequin,
                    id,
                    format!(
                        "handle `{}`: tb + |rot| = {} exceeds 2g - 1 = {}",
                        k.id,
                        tb + rot.abs(),
                        2 * g as i64 - 1
                    ),
                );
            }
        }
    }

    let c = h.handles.len();
    if h.linking.len() != c || h.linking.iter().any(|r| r.len() != c) {
        push(
            ViolationKind::LinkingShape,
            None,
            format!("linking matrix is not {c}x{c}"),
        );
    } else {
        for i in 0..c {
            if h.linking[i][i] != h.handles[i].framing {
                push(
                    ViolationKind::FramingMismatch,
                    Some(&h.handles[i].id),
                    format!(
                        "handle `{}`: linking diagonal {} differs from framing {}",
                        h.handles[i].id, h.linking[i][i], h.handles[i].framing
                    ),
                );
            }
            for j in i + 1..c {
                if h.linking[i][j] != h.linking[j][i] {
                    push(
                        ViolationKind::LinkingAsymmetric,
                        None,
                        format!("linking matrix not symmetric at ({i}, {j})"),
                    );
                }
            }
        }
    }

    ValidationReport { violations: out }
}

/// The homological invariants compared by the W-modification invariance
/// statements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub h1_invariant_factors: Vec<i64>,
    pub b2: usize,
    pub intersection_matrix: Vec<Vec<i64>>,
    pub boundary_h1_invariant_factors: Vec<i64>,
    pub boundary_b1: usize,
    pub euler: i64,
    pub signature: i64,
}

fn to_i64s(v: Vec<BigInt>) -> Result<Vec<i64>> {
    v.iter().map(big_to_i64).collect()
}

/// Canonical H_2 basis: Hermite normal form of the integer kernel of the
/// boundary map, one class per row.
pub fn h2_basis(h: &Handlebody) -> Result<Vec<ClassVector>> {
    validate(h).into_result()?;
    let k = kernel_basis(&h.boundary_matrix());
    Ok(k.to_i64_rows()?.into_iter().map(ClassVector::from).collect())
}

/// True iff `classes` lie in H_2 and form a Z-basis of it.
pub fn spans_h2(h: &Handlebody, classes: &[ClassVector]) -> Result<bool> {
    for a in classes {
        if !h.in_h2(a)? {
            return Ok(false);
        }
    }
    let basis = h2_basis(h)?;
    if basis.len() != classes.len() {
        return Ok(false);
    }
    let c = h.handle_count();
    let rows: Vec<Vec<i64>> = classes.iter().map(|a| a.coeffs.clone()).collect();
    let ours = hermite_rows(&IntMatrix::from_i64_rows(&rows, c));
    let canon: Vec<Vec<i64>> = basis.into_iter().map(|a| a.coeffs).collect();
    Ok(ours == IntMatrix::from_i64_rows(&canon, c))
}

pub fn homology(h: &Handlebody) -> Result<HomologyProfile> {
    validate(h).into_result()?;
    let boundary = h.boundary_matrix();
    let h1 = to_i64s(cokernel_factors(&boundary))?;
    let basis = h2_basis(h)?;
    let intersection_matrix = basis
        .iter()
        .map(|a| basis.iter().map(|b| h.pairing(a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let boundary_h1 = to_i64s(cokernel_factors(&h.surgery_matrix()))?;
    let boundary_b1 = boundary_h1.iter().filter(|x| **x == 0).count();
    Ok(HomologyProfile {
        h1_invariant_factors: h1,
        b2: basis.len(),
        signature: signature(&intersection_matrix),
        intersection_matrix,
        boundary_h1_invariant_factors: boundary_h1,
        boundary_b1,
        euler: h.euler(),
    })
}

/// Field-by-field equality, with the intersection forms compared as
/// matrices in the canonical bases.
pub fn profiles_equal(a: &HomologyProfile, b: &HomologyProfile) -> bool {
    a == b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TietzeKind {
    AddCancellingPair,
    RemoveCancellingPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TietzeStep {
    pub kind: TietzeKind,
    pub one_handle: usize,
    pub relator: String,
}

/// Structural evidence that the fundamental group is unchanged: each step
/// adds a generator that the new relator kills geometrically once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TietzeCertificate {
    pub steps: Vec<TietzeStep>,
    pub statement: String,
}

impl Default for TietzeCertificate {
    fn default() -> Self {
        TietzeCertificate {
            steps: Vec::new(),
            statement: "π₁ preserved".to_string(),
        }
    }
}
