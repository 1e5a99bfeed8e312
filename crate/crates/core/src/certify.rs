//! Exoticity certificates: no-basis thresholds, the distinctness matrix,
//! d3 distinctness, non-Stein reports and homeomorphism metadata.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{homology, ClassVector, GenusWitness, Handlebody, HomologyProfile};
use crate::error::{Error, Result};
use crate::legendrian::{
    apply_choice, canonical_choice, c1_pairing, d3, is_stein_handlebody, max_pairing,
    realized_max_pairing, stein_obstruction, Obstruction,
};
use crate::modifications::{ModificationKind, ModificationLog};
use crate::pipeline::{evaluate_conditions, violations, Family, SteinStatus, SumMember, Threshold, Variant};

pub const NOT_DISTINGUISHED: &str = "not distinguished by this method";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedGenus {
    pub i: i64,
    /// Genus of the stored witness for v_0, if any.
    pub genus: Option<u32>,
    /// g_0 + p_{i-1}, for i >= 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_basis_threshold: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExoticityCertificate {
    pub family_ref: String,
    pub variant: Variant,
    /// Member indices labelling the rows of `distinct`.
    pub indices: Vec<i64>,
    #[serde(rename = "M")]
    pub m: Vec<i64>,
    pub thresholds: Vec<Threshold>,
    pub realized_genus: Vec<RealizedGenus>,
    pub distinct: Vec<Vec<bool>>,
    pub reasons: Vec<Vec<String>>,
    /// Distinctness also holds after reversing orientations.
    pub any_orientation: bool,
    pub homeomorphism: String,
}

const HOMEO_NOTE: &str =
    "members are pairwise homeomorphic via cork twists (metadata, not machine-verified)";

fn witness_genus(witnesses: &[GenusWitness], class: &ClassVector) -> Option<u32> {
    witnesses
        .iter()
        .filter(|w| &w.class == class)
        .map(|w| w.genus)
        .min()
}

/// Genus of v_0 in member `i`, provided every v_j (j >= 1) also has a
/// witness of genus at most g_j + q_j.
fn realized(f: &Family, i: i64) -> Option<u32> {
    let m = f.member(i)?;
    for j in 1..=f.data.k {
        let bound = f.data.g(j) + f.plan.q[j];
        let g = witness_genus(&m.witnesses, m.classes.get(j)?)?;
        if g as i64 > bound {
            return None;
        }
    }
    witness_genus(&m.witnesses, m.classes.first()?)
}

fn orientation_free(f: &Family) -> Result<bool> {
    if f.data.k == 0 {
        return Ok(true);
    }
    let profile = homology(&f.members[0].handlebody)?;
    let zero_form = profile
        .intersection_matrix
        .iter()
        .all(|r| r.iter().all(|x| *x == 0));
    Ok(zero_form || f.plan.variant != Variant::Standard)
}

/// Builds the certificate, refusing when any threshold inequality fails.
pub fn certify_family(f: &Family, family_ref: &str) -> Result<ExoticityCertificate> {
    let thresholds = evaluate_conditions(&f.data, &f.plan.q, &f.plan.p, f.plan.variant)?;
    let bad = violations(&thresholds);
    if !bad.is_empty() {
        return Err(Error::Refused(bad.join("; ")));
    }
    let n = f.plan.n();
    if f.n() != n {
        return Err(Error::Refused(format!(
            "family has {} members, plan expects {}",
            f.members.len(),
            n + 2
        )));
    }
    let indices: Vec<i64> = (-1..=n as i64).collect();
    let m: Vec<i64> = (1..=n as i64).map(|i| f.data.leading(f.plan.p_at(i))).collect();
    let g0 = f.data.g(0);
    let realized_genus: Vec<RealizedGenus> = indices
        .iter()
        .map(|&i| RealizedGenus {
            i,
            genus: realized(f, i),
            no_basis_threshold: (i >= 1).then(|| g0 + f.plan.p_at(i - 1)),
        })
        .collect();

    let size = indices.len();
    let mut distinct = vec![vec![false; size]; size];
    let mut reasons = vec![vec![String::new(); size]; size];
    for a in 0..size {
        reasons[a][a] = "same member".into();
        for b in (a + 1)..size {
            let (ia, ib) = (indices[a], indices[b]);
            let (ok, why) = if ia == -1 && ib == 0 {
                (false, NOT_DISTINGUISHED.to_string())
            } else {
                let threshold = realized_genus[b].no_basis_threshold.unwrap_or(i64::MIN);
                match realized_genus[a].genus {
                    Some(g) if g as i64 <= threshold => (
                        true,
                        format!(
                            "X_{ia} has v_0 of genus {g} <= {threshold}, X_{ib} has no such basis"
                        ),
                    ),
                    Some(g) => (
                        false,
                        format!("genus {g} of v_0 in X_{ia} exceeds threshold {threshold} of X_{ib}"),
                    ),
                    None => (false, format!("no genus witness basis stored for X_{ia}")),
                }
            };
            distinct[a][b] = ok;
            distinct[b][a] = ok;
            reasons[a][b] = why.clone();
            reasons[b][a] = why;
        }
    }

    Ok(ExoticityCertificate {
        family_ref: family_ref.to_string(),
        variant: f.plan.variant,
        indices,
        m,
        thresholds,
        realized_genus,
        distinct,
        reasons,
        any_orientation: orientation_free(f)?,
        homeomorphism: HOMEO_NOTE.into(),
    })
}

/// Independent audit of a certificate: every inequality is re-evaluated
/// from its numbers and every `true` entry must follow from them.
pub fn verify_certificate(c: &ExoticityCertificate) -> Result<()> {
    let mut bad = violations(&c.thresholds);
    for t in &c.thresholds {
        for check in &t.checks {
            if check.ok != check.holds() {
                bad.push(format!("{} has inconsistent flag (i={})", check.name, t.i));
            }
        }
    }
    if c.m.iter().any(|x| *x <= 0) || c.m.windows(2).any(|w| w[0] >= w[1]) {
        bad.push("M_i not positive and strictly increasing".into());
    }
    let size = c.indices.len();
    if c.distinct.len() != size || c.realized_genus.len() != size {
        bad.push("matrix shape does not match indices".into());
    }
    for a in 0..c.distinct.len().min(size) {
        for b in 0..c.distinct[a].len().min(size) {
            if c.distinct[a][b] != c.distinct[b][a] {
                bad.push(format!("distinct matrix asymmetric at ({a},{b})"));
            }
            if !c.distinct[a][b] || a == b {
                continue;
            }
            let (lo, hi) = if c.indices[a] < c.indices[b] { (a, b) } else { (b, a) };
            let supported = !(c.indices[lo] == -1 && c.indices[hi] == 0)
                && matches!(
                    (c.realized_genus[lo].genus, c.realized_genus[hi].no_basis_threshold),
                    (Some(g), Some(t)) if (g as i64) <= t
                );
            if !supported {
                bad.push(format!(
                    "X_{} vs X_{} marked distinct without genus evidence",
                    c.indices[a], c.indices[b]
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        bad.dedup();
        Err(Error::Refused(bad.join("; ")))
    }
}

mod rational_map {
    use std::collections::BTreeMap;

    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<i64, BigRational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let strings: BTreeMap<String, String> =
            m.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<i64, BigRational>, D::Error> {
        let strings = BTreeMap::<String, String>::deserialize(d)?;
        strings
            .into_iter()
            .map(|(k, v)| {
                Ok((
                    k.parse().map_err(D::Error::custom)?,
                    v.parse().map_err(D::Error::custom)?,
                ))
            })
            .collect()
    }
}

/// X_i admits no Stein structure compatible with xi_j: the genus of v_0 in
/// X_i does not exceed the no-basis threshold of X_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incompatibility {
    pub member: i64,
    pub contact: i64,
    pub genus: i64,
    pub threshold: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct D3Report {
    #[serde(with = "rational_map")]
    pub values: BTreeMap<i64, BigRational>,
    pub all_distinct: bool,
    /// |<c1, v_0>| from the rotation numbers, per member.
    pub pairings: BTreeMap<i64, i64>,
    pub incompatible: Vec<Incompatibility>,
}

/// d3 of the boundary contact structures xi_1..xi_n.
pub fn d3_family(f: &Family) -> Result<D3Report> {
    if f.data.k != 0 {
        return Err(Error::Precondition(format!("b2 = {} (need 1)", f.data.k + 1)));
    }
    if f.data.m0() == 0 {
        return Err(Error::Precondition("m_0 = 0: intersection form is zero".into()));
    }
    let n = f.n() as i64;
    let mut values = BTreeMap::new();
    let mut pairings = BTreeMap::new();
    for i in 1..=n {
        let m = f
            .member(i)
            .ok_or_else(|| Error::Precondition(format!("no member X_{i}")))?;
        let choice = canonical_choice(&m.handlebody);
        let pairing = c1_pairing(&m.handlebody, &choice, &m.classes[0])?;
        let finished = apply_choice(&m.handlebody, &choice)?;
        values.insert(i, d3(&finished, pairing)?.d3);
        pairings.insert(i, pairing.abs());
    }
    let list: Vec<&BigRational> = values.values().collect();
    let all_distinct = list
        .iter()
        .enumerate()
        .all(|(a, x)| list[a + 1..].iter().all(|y| x != y));
    let g0 = f.data.g(0);
    let mut incompatible = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let genus = g0 + f.plan.p_at(i);
            let threshold = g0 + f.plan.p_at(j - 1);
            incompatible.push(Incompatibility {
                member: i,
                contact: j,
                genus,
                threshold,
                holds: genus <= threshold,
            });
        }
    }
    Ok(D3Report {
        values,
        all_distinct,
        pairings,
        incompatible,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsteinEntry {
    pub label: String,
    pub stein_side: bool,
    pub is_stein_handlebody: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub status: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsteinReport {
    pub entries: Vec<NonsteinEntry>,
}

impl NonsteinReport {
    pub fn stein_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_stein_handlebody).count()
    }

    pub fn obstructed_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.obstruction.as_ref().is_some_and(|o| o.any_orientation))
            .count()
    }
}

/// Pairs each X^N with its obstruction and each X^S with its Stein check.
pub fn verify_nonstein(members: &[SumMember]) -> Result<NonsteinReport> {
    let mut entries = Vec::with_capacity(members.len());
    for m in members {
        let h = &m.marked.handlebody;
        let stein = is_stein_handlebody(h);
        let obstruction = stein_obstruction(h, &m.marked.witnesses)?;
        let status = match (&obstruction, stein) {
            (Some(o), _) if o.any_orientation => "no Stein structure for any orientation",
            (Some(_), _) => "no Stein structure for this orientation",
            (None, true) => "Stein handlebody",
            (None, false) => "no obstruction found",
        };
        entries.push(NonsteinEntry {
            label: m.label(),
            stein_side: m.stein_side,
            is_stein_handlebody: stein,
            obstruction,
            status: status.into(),
        });
    }
    Ok(NonsteinReport { entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeoPair {
    pub a: i64,
    pub b: i64,
    pub homeomorphic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeoReport {
    pub profile: Option<HomologyProfile>,
    pub profiles_equal: bool,
    pub pairs: Vec<HomeoPair>,
    pub note: String,
}

fn w_skeleton(log: &ModificationLog) -> Vec<(String, i64)> {
    let mut kinds: Vec<Option<(ModificationKind, String, i64)>> = Vec::new();
    for r in &log.records {
        if r.kind == ModificationKind::SwapSign {
            kinds.push(None);
        } else {
            kinds.push(Some((r.kind, r.target.clone(), r.p)));
        }
    }
    kinds
        .into_iter()
        .flatten()
        .filter(|(k, _, _)| k.is_w_move())
        .map(|(_, t, p)| (t, p))
        .collect()
}

/// Homeomorphism metadata: members whose logs share a base and the same
/// W-moves (up to sign) differ by cork twists.
pub fn homeo_report(members: &[(i64, &Handlebody, &ModificationLog)]) -> Result<HomeoReport> {
    let profiles = members
        .iter()
        .map(|(_, h, _)| homology(h))
        .collect::<Result<Vec<_>>>()?;
    if let Some(pos) = profiles.windows(2).position(|w| w[0] != w[1]) {
        return Err(Error::Construction(format!(
            "X_{} and X_{} have different homology profiles",
            members[pos].0,
            members[pos + 1].0
        )));
    }
    let mut pairs = Vec::new();
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let (la, lb) = (members[a].2, members[b].2);
            pairs.push(HomeoPair {
                a: members[a].0,
                b: members[b].0,
                homeomorphic: la.base == lb.base && w_skeleton(la) == w_skeleton(lb),
            });
        }
    }
    Ok(HomeoReport {
        profile: profiles.into_iter().next(),
        profiles_equal: true,
        pairs,
        note: HOMEO_NOTE.into(),
    })
}

pub fn homeo_report_family(f: &Family) -> Result<HomeoReport> {
    let list: Vec<(i64, &Handlebody, &ModificationLog)> = f
        .members
        .iter()
        .map(|m| (m.index, &m.handlebody, &m.log))
        .collect();
    homeo_report(&list)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub member: i64,
    pub witness: usize,
    pub square: i64,
    /// Largest |<c1, a>| over the Stein structures of the member.
    pub pairing: u64,
    /// Lower bound from the closed form, when the class is in the span of
    /// the recorded basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    pub genus: u32,
    pub ok: bool,
}

/// Coordinates of `a` in the basis v_j, read off the K_j entries.
fn coordinates(f: &Family, h: &Handlebody, basis: &[ClassVector], a: &ClassVector) -> Result<Option<Vec<i64>>> {
    let mut coords = Vec::with_capacity(basis.len());
    for j in 0..basis.len() {
        coords.push(a.coeffs[h.index_of(&f.data.handles[j].id)?]);
    }
    let mut sum = vec![0i64; a.len()];
    for (x, v) in coords.iter().zip(basis) {
        for (s, y) in sum.iter_mut().zip(&v.coeffs) {
            *s += x * y;
        }
    }
    Ok((sum == a.coeffs).then_some(coords))
}

/// Adjunction inequality square + |<c1, a>| <= 2g - 2 for every stored
/// witness of every member with Stein status.
pub fn adjunction_sweep(f: &Family) -> Result<Vec<SweepEntry>> {
    let mut out = Vec::new();
    for m in &f.members {
        if m.stein != SteinStatus::Stein {
            continue;
        }
        let h = &m.handlebody;
        let data = f.pairing_data(m.index)?;
        for (idx, w) in m.witnesses.iter().enumerate() {
            if w.class.is_zero() {
                continue;
            }
            let square = h.square(&w.class)?;
            let (realized, _) = realized_max_pairing(h, &w.class, &m.flippable)?;
            let bound = if m.index >= 1 {
                match coordinates(f, h, &m.classes, &w.class)? {
                    Some(a) => Some(max_pairing(h, &a, &data)?.0),
                    None => None,
                }
            } else {
                None
            };
            let pairing = realized.max(bound.unwrap_or(0));
            out.push(SweepEntry {
                member: m.index,
                witness: idx,
                square,
                pairing,
                bound,
                genus: w.genus,
                ok: crate::legendrian::adjunction_check(square, pairing, w.genus),
            });
        }
    }
    Ok(out)
}
