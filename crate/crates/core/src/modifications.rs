//! W±(p)-modifications, zig-zag records, boundary sums and replayable
//! modification logs.
//!
//! Both moves add one 1-handle and a 0-framed auxiliary 2-handle `γ` that
//! runs over it once. They differ in where the target `K` passes:
//!
//! * W⁺(p): `K` runs over the new 1-handle `p` times and `γ` has zero
//!   linking with everything. The class `K - pγ` lies in H₂.
//! * W⁻(p): `K` misses the new 1-handle algebraically and links `γ` `p`
//!   times, so the new pair cancels algebraically.
//!
//! Replacing the dotted circle by a 0-framed unknot gives the same surgery
//! link for both moves, up to exchanging that unknot with `γ`.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    input_witnesses, GenusWitness, Handlebody, Role, TietzeCertificate, TietzeKind,
    TietzeStep, TwoHandle, WitnessProvenance,
};
use crate::error::{Error, Result};
use crate::legendrian::zigzag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModificationKind {
    WPlus,
    WMinus,
    Zigzag,
    BoundarySum,
    SwapSign,
}

impl ModificationKind {
    pub fn is_w_move(self) -> bool {
        matches!(self, ModificationKind::WPlus | ModificationKind::WMinus)
    }

    pub fn toggled(self) -> Self {
        match self {
            ModificationKind::WPlus => ModificationKind::WMinus,
            ModificationKind::WMinus => ModificationKind::WPlus,
            k => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub one_handle: usize,
    pub aux_id: String,
}

/// One step of a modification log.
///
/// `p` is the W-coefficient (or, for `swap_sign`, the index of the earlier
/// record to toggle); `t`, `d` are zig-zag counts. `summand` carries the
/// other side of a boundary sum as its own log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModificationRecord {
    pub kind: ModificationKind,
    #[serde(default)]
    pub target: String,
    #[serde(default)]
    pub p: i64,
    #[serde(default)]
    pub t: i64,
    #[serde(default)]
    pub d: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summand: Option<Box<ModificationLog>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<Created>,
}

impl ModificationRecord {
    fn new(kind: ModificationKind, target: &str) -> Self {
        ModificationRecord {
            kind,
            target: target.to_string(),
            p: 0,
            t: 0,
            d: 0,
            summand: None,
            created: None,
        }
    }

    pub fn w(plus: bool, target: &str, p: i64) -> Self {
        let kind = if plus {
            ModificationKind::WPlus
        } else {
            ModificationKind::WMinus
        };
        ModificationRecord {
            p,
            ..Self::new(kind, target)
        }
    }

    pub fn zigzag(target: &str, t: i64, d: i64) -> Self {
        ModificationRecord {
            t,
            d,
            ..Self::new(ModificationKind::Zigzag, target)
        }
    }

    pub fn boundary_sum(summand: ModificationLog) -> Self {
        ModificationRecord {
            summand: Some(Box::new(summand)),
            ..Self::new(ModificationKind::BoundarySum, "")
        }
    }

    pub fn swap_sign(index: usize) -> Self {
        ModificationRecord {
            p: index as i64,
            ..Self::new(ModificationKind::SwapSign, "")
        }
    }
}

/// A handlebody with the genus witnesses and π₁ certificate that its
/// construction history justifies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marked {
    pub handlebody: Handlebody,
    pub witnesses: Vec<GenusWitness>,
    pub tietze: TietzeCertificate,
}

impl Marked {
    pub fn from_input(h: Handlebody) -> Self {
        Marked {
            witnesses: input_witnesses(&h),
            handlebody: h,
            tietze: TietzeCertificate::default(),
        }
    }
}

fn aux_id(h: &Handlebody, target: &str) -> String {
    let prefix = format!("{target}#aux");
    let n = h
        .handles
        .iter()
        .filter(|k| {
            k.id.strip_prefix(&prefix)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
        .count();
    format!("{prefix}{}", n + 1)
}

fn w_move(m: &Marked, target: &str, p: i64, plus: bool) -> Result<(Marked, ModificationRecord)> {
    if p < 1 {
        return Err(Error::NonPositiveCoefficient);
    }
    let h = &m.handlebody;
    let j = h.index_of(target)?;
    h.handles[j]
        .legendrian()
        .ok_or_else(|| Error::MissingLegendrian(target.to_string()))?;

    let s = h.one_handles;
    let c = h.handle_count();
    let gamma_id = aux_id(h, target);
    let mut out = h.clone();
    out.one_handles = s + 1;
    for k in &mut out.handles {
        k.run_over.push(0);
    }
    for row in &mut out.linking {
        row.push(0);
    }
    out.linking.push(vec![0; c + 1]);

    let mut gamma_run = vec![0; s + 1];
    gamma_run[s] = 1;
    let gamma = if plus {
        let k = &mut out.handles[j];
        k.tb = k.tb.map(|tb| tb + p);
        k.run_over[s] = p;
        k.genus = None;
        TwoHandle {
            id: gamma_id.clone(),
            role: Role::AuxiliaryPlus,
            framing: 0,
            tb: Some(2),
            rot: Some(0),
            run_over: gamma_run,
            genus: None,
        }
    } else {
        out.linking[j][c] = p;
        out.linking[c][j] = p;
        TwoHandle {
            id: gamma_id.clone(),
            role: Role::AuxiliaryMinus,
            framing: 0,
            tb: Some(1),
            rot: Some(1),
            run_over: gamma_run,
            genus: None,
        }
    };
    out.handles.push(gamma);

    let witnesses = m
        .witnesses
        .iter()
        .filter_map(|w| {
            let coeff = w.class.coeffs[j];
            let mut class = w.class.extended(1);
            if !plus || coeff == 0 {
                return Some(GenusWitness {
                    class,
                    genus: w.genus,
                    provenance: w.provenance,
                });
            }
            if coeff.abs() != 1 {
                return None;
            }
            class.coeffs[c] = -coeff * p;
            Some(GenusWitness {
                class,
                genus: w.genus + p as u32,
                provenance: WitnessProvenance::PropGenusShift,
            })
        })
        .collect();

    let mut tietze = m.tietze.clone();
    tietze.steps.push(TietzeStep {
        kind: TietzeKind::AddCancellingPair,
        one_handle: s,
        relator: gamma_id.clone(),
    });

    let mut record = ModificationRecord::w(plus, target, p);
    record.created = Some(Created {
        one_handle: s,
        aux_id: gamma_id,
    });
    Ok((
        Marked {
            handlebody: out,
            witnesses,
            tietze,
        },
        record,
    ))
}

/// W⁺(p) on `target`: tb(K) rises by p, rot(K) unchanged, and the new
/// auxiliary handle has framing 0, tb 2, rot 0.
pub fn w_plus(m: &Marked, target: &str, p: i64) -> Result<(Marked, ModificationRecord)> {
    w_move(m, target, p, true)
}

/// W⁻(p) on `target`: K's Legendrian data unchanged, and the new auxiliary
/// handle has framing 0, tb 1, rot 1.
pub fn w_minus(m: &Marked, target: &str, p: i64) -> Result<(Marked, ModificationRecord)> {
    w_move(m, target, p, false)
}

pub fn zigzag_move(m: &Marked, target: &str, t: u64, d: u64) -> Result<(Marked, ModificationRecord)> {
    let j = m.handlebody.index_of(target)?;
    let mut out = m.clone();
    out.handlebody.handles[j] = zigzag(&m.handlebody.handles[j], t, d)?;
    Ok((out, ModificationRecord::zigzag(target, t as i64, d as i64)))
}

fn namespaced(a: &Handlebody, b: &Handlebody) -> Handlebody {
    let mut prefix = String::new();
    loop {
        let clash = b.handles.iter().any(|k| {
            let id = format!("{prefix}{}", k.id);
            a.handles.iter().any(|x| x.id == id)
        });
        if !clash {
            break;
        }
        prefix.push_str("b.");
    }
    let mut out = b.clone();
    for k in &mut out.handles {
        k.id = format!("{prefix}{}", k.id);
    }
    out
}

/// Boundary sum: 1-handles and 2-handles side by side, block-diagonal
/// linking. Colliding ids of `b` get a `b.` prefix.
pub fn boundary_sum(a: &Handlebody, b: &Handlebody) -> Handlebody {
    let b = namespaced(a, b);
    let (sa, sb) = (a.one_handles, b.one_handles);
    let (ca, cb) = (a.handle_count(), b.handle_count());
    let mut handles = Vec::with_capacity(ca + cb);
    for k in &a.handles {
        let mut k = k.clone();
        k.run_over.extend(std::iter::repeat(0).take(sb));
        handles.push(k);
    }
    for k in &b.handles {
        let mut k = k.clone();
        let mut run = vec![0; sa];
        run.extend_from_slice(&k.run_over);
        k.run_over = run;
        handles.push(k);
    }
    let mut linking = vec![vec![0; ca + cb]; ca + cb];
    for i in 0..ca {
        linking[i][..ca].copy_from_slice(&a.linking[i]);
    }
    for i in 0..cb {
        linking[ca + i][ca..].copy_from_slice(&b.linking[i]);
    }
    Handlebody {
        one_handles: sa + sb,
        handles,
        linking,
    }
}

/// Boundary sum carrying the witnesses and Tietze steps of both sides.
pub fn boundary_sum_marked(a: &Marked, b: &Marked) -> Marked {
    let h = boundary_sum(&a.handlebody, &b.handlebody);
    let ca = a.handlebody.handle_count();
    let cb = b.handlebody.handle_count();
    let sa = a.handlebody.one_handles;
    let mut witnesses: Vec<GenusWitness> = a
        .witnesses
        .iter()
        .map(|w| GenusWitness {
            class: w.class.extended(cb),
            genus: w.genus,
            provenance: WitnessProvenance::BoundarySum,
        })
        .collect();
    witnesses.extend(b.witnesses.iter().map(|w| GenusWitness {
        class: w.class.shifted(ca),
        genus: w.genus,
        provenance: WitnessProvenance::BoundarySum,
    }));
    let mut tietze = a.tietze.clone();
    let prefix_len = h.handles[ca..]
        .first()
        .map(|k| k.id.len() - b.handlebody.handles[0].id.len())
        .unwrap_or(0);
    tietze.steps.extend(b.tietze.steps.iter().map(|s| TietzeStep {
        kind: s.kind,
        one_handle: s.one_handle + sa,
        relator: format!("{}{}", &h.handles[ca].id[..prefix_len], s.relator),
    }));
    Marked {
        handlebody: h,
        witnesses,
        tietze,
    }
}

/// A base handlebody and the records that turn it into the current one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModificationLog {
    pub base: Handlebody,
    pub records: Vec<ModificationRecord>,
}

impl ModificationLog {
    pub fn new(base: Handlebody) -> Self {
        ModificationLog {
            base,
            records: Vec::new(),
        }
    }

    /// Applies `record` to `m` and appends the resulting record to the log.
    pub fn push(&mut self, m: &Marked, record: ModificationRecord) -> Result<Marked> {
        let (next, applied) = apply(m, &record)?;
        self.records.push(applied);
        Ok(next)
    }
}

/// Resolves `swap_sign` records by toggling the record they point at.
fn normalized(records: &[ModificationRecord]) -> Result<Vec<Option<ModificationRecord>>> {
    let mut out: Vec<Option<ModificationRecord>> = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if r.kind == ModificationKind::SwapSign {
            let idx = usize::try_from(r.p).map_err(|_| Error::RecordIndex(i))?;
            if idx >= i {
                return Err(Error::RecordIndex(idx));
            }
            let target = out[idx].as_mut().ok_or(Error::NotWMove(idx))?;
            if !target.kind.is_w_move() {
                return Err(Error::NotWMove(idx));
            }
            target.kind = target.kind.toggled();
            target.created = None;
            out.push(None);
        } else {
            out.push(Some(r.clone()));
        }
    }
    Ok(out)
}

/// Applies one record, returning the new state and the record as applied
/// (with created ids filled in).
pub fn apply(m: &Marked, record: &ModificationRecord) -> Result<(Marked, ModificationRecord)> {
    let (next, mut applied) = match record.kind {
        ModificationKind::WPlus => w_plus(m, &record.target, record.p)?,
        ModificationKind::WMinus => w_minus(m, &record.target, record.p)?,
        ModificationKind::Zigzag => {
            let t = u64::try_from(record.t).map_err(|_| Error::ZigzagRange { t: 0, d: 0 })?;
            let d = u64::try_from(record.d).map_err(|_| Error::ZigzagRange { t, d: 0 })?;
            zigzag_move(m, &record.target, t, d)?
        }
        ModificationKind::BoundarySum => {
            let summand = record
                .summand
                .as_ref()
                .ok_or_else(|| Error::Precondition("boundary_sum record without summand".into()))?;
            let other = replay(summand)?;
            (boundary_sum_marked(m, &other), record.clone())
        }
        ModificationKind::SwapSign => {
            return Err(Error::Precondition(
                "swap_sign records only make sense inside a log".into(),
            ))
        }
    };
    if let (Some(expected), Some(got)) = (&record.created, &applied.created) {
        if expected != got {
            return Err(Error::Construction(format!(
                "replayed record created {got:?}, log says {expected:?}"
            )));
        }
    }
    applied.summand = record.summand.clone();
    Ok((next, applied))
}

/// Replays a log from its base. Deterministic: equal logs give equal
/// results.
pub fn replay(log: &ModificationLog) -> Result<Marked> {
    let mut m = Marked::from_input(log.base.clone());
    for r in normalized(&log.records)?.into_iter().flatten() {
        m = apply(&m, &r)?.0;
    }
    Ok(m)
}

/// Toggles the W-move at `index` (W⁺ ↔ W⁻, i.e. a cork twist along the
/// W₁ created by that move) and replays.
pub fn swap_sign(log: &ModificationLog, index: usize) -> Result<(Marked, ModificationLog)> {
    let record = log.records.get(index).ok_or(Error::RecordIndex(index))?;
    if !record.kind.is_w_move() {
        return Err(Error::NotWMove(index));
    }
    let mut toggled = log.clone();
    toggled.records[index].kind = record.kind.toggled();
    let m = replay(&toggled)?;
    Ok((m, toggled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{homology, profiles_equal};

    fn unknot(m: i64, tb: i64, rot: i64) -> Handlebody {
        Handlebody {
            one_handles: 0,
            handles: vec![TwoHandle {
                id: "K0".into(),
                role: Role::Basis,
                framing: m,
                tb: Some(tb),
                rot: Some(rot),
                run_over: vec![],
                genus: Some(0),
            }],
            linking: vec![vec![m]],
        }
    }

    #[test]
    fn w_plus_on_u0() {
        let m = Marked::from_input(unknot(0, -1, 0));
        let (out, rec) = w_plus(&m, "K0", 2).unwrap();
        let h = &out.handlebody;
        assert_eq!(h.one_handles, 1);
        assert_eq!((h.handles[0].tb, h.handles[0].rot), (Some(1), Some(0)));
        assert_eq!(h.handles[0].framing, 0);
        let g = &h.handles[1];
        assert_eq!((g.framing, g.tb, g.rot), (0, Some(2), Some(0)));
        assert_eq!(g.id, "K0#aux1");
        assert_eq!(out.witnesses.len(), 1);
        assert_eq!(out.witnesses[0].class.coeffs, vec![1, -2]);
        assert_eq!(out.witnesses[0].genus, 2);
        assert_eq!(rec.created.unwrap().aux_id, "K0#aux1");
        assert!(profiles_equal(&homology(&m.handlebody).unwrap(), &homology(h).unwrap()));
    }

    #[test]
    fn w_plus_p1_on_u_minus_three() {
        let m = Marked::from_input(unknot(-3, -2, 1));
        let (out, _) = w_plus(&m, "K0", 1).unwrap();
        assert_eq!(out.handlebody.handles[0].tb, Some(-1));
        assert_eq!(out.witnesses[0].genus, 1);
        assert_eq!(out.handlebody.square(&out.witnesses[0].class).unwrap(), -3);
    }

    #[test]
    fn w_minus_on_u_minus_three() {
        let m = Marked::from_input(unknot(-3, -2, 1));
        let (out, _) = w_minus(&m, "K0", 1).unwrap();
        let h = &out.handlebody;
        assert_eq!((h.handles[0].tb, h.handles[0].rot), (Some(-2), Some(1)));
        let g = &h.handles[1];
        assert_eq!((g.framing, g.tb, g.rot), (0, Some(1), Some(1)));
        assert!(crate::legendrian::is_stein_handlebody(h));
        assert_eq!(out.witnesses[0].genus, 0);
        assert_eq!(
            homology(h).unwrap(),
            homology(&m.handlebody).unwrap()
        );
    }

    #[test]
    fn w_move_errors() {
        let m = Marked::from_input(unknot(0, -1, 0));
        assert!(matches!(w_plus(&m, "nope", 1), Err(Error::UnknownHandle(_))));
        assert_eq!(w_minus(&m, "K0", 0).unwrap_err(), Error::NonPositiveCoefficient);
        let mut h = unknot(0, -1, 0);
        h.handles[0].tb = None;
        h.handles[0].rot = None;
        assert!(matches!(
            w_plus(&Marked::from_input(h), "K0", 1),
            Err(Error::MissingLegendrian(_))
        ));
    }

    #[test]
    fn swap_sign_is_an_involution_and_matches_direct_moves() {
        let base = unknot(0, -1, 0);
        let mut log = ModificationLog::new(base.clone());
        let m0 = Marked::from_input(base.clone());
        let minus = log.push(&m0, ModificationRecord::w(false, "K0", 2)).unwrap();

        let (plus, toggled) = swap_sign(&log, 0).unwrap();
        let direct = w_plus(&m0, "K0", 2).unwrap().0;
        assert_eq!(plus, direct);
        let (back, _) = swap_sign(&toggled, 0).unwrap();
        assert_eq!(back, minus);
        assert_eq!(
            homology(&plus.handlebody).unwrap(),
            homology(&minus.handlebody).unwrap()
        );
    }

    #[test]
    fn swap_sign_errors() {
        let base = unknot(0, -1, 0);
        let mut log = ModificationLog::new(base.clone());
        let m0 = Marked::from_input(base);
        log.push(&m0, ModificationRecord::zigzag("K0", 1, 0)).unwrap();
        assert_eq!(swap_sign(&log, 0).unwrap_err(), Error::NotWMove(0));
        assert_eq!(swap_sign(&log, 3).unwrap_err(), Error::RecordIndex(3));
    }

    #[test]
    fn swap_sign_record_in_log() {
        let base = unknot(-3, -2, 1);
        let mut log = ModificationLog::new(base.clone());
        let m = Marked::from_input(base.clone());
        let m = log.push(&m, ModificationRecord::w(false, "K0", 1)).unwrap();
        log.push(&m, ModificationRecord::w(false, "K0", 2)).unwrap();
        log.records.push(ModificationRecord::swap_sign(1));
        let replayed = replay(&log).unwrap();
        let (direct, _) = swap_sign(&ModificationLog { records: log.records[..2].to_vec(), ..log.clone() }, 1).unwrap();
        assert_eq!(replayed, direct);
    }

    #[test]
    fn boundary_sum_basics() {
        let a = unknot(-3, -2, 1);
        let e = Handlebody::empty();
        assert_eq!(boundary_sum(&a, &e), a);
        let b = unknot(0, -1, 0);
        let s = boundary_sum(&a, &b);
        assert_eq!(s.handles[1].id, "b.K0");
        let p = homology(&s).unwrap();
        assert_eq!(p.intersection_matrix, vec![vec![-3, 0], vec![0, 0]]);
        assert_eq!(p.euler, homology(&a).unwrap().euler + homology(&b).unwrap().euler - 1);
        assert_eq!(p.signature, -1);
    }

    #[test]
    fn tietze_steps_track_w_moves() {
        let m = Marked::from_input(unknot(0, -1, 0));
        let (m, _) = w_minus(&m, "K0", 2).unwrap();
        let (m, _) = zigzag_move(&m, "K0", 1, 0).unwrap();
        let (m, _) = w_plus(&m, "K0", 3).unwrap();
        assert_eq!(m.tietze.steps.len(), 2);
        assert!(m.tietze.steps.iter().all(|s| s.kind == TietzeKind::AddCancellingPair));
        assert_eq!(m.tietze.steps[1].one_handle, 1);
    }

    #[test]
    fn log_json_shape() {
        let base = unknot(0, -1, 0);
        let mut log = ModificationLog::new(base.clone());
        log.push(&Marked::from_input(base), ModificationRecord::w(true, "K0", 2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&log).unwrap();
        let r = &v["records"][0];
        assert_eq!(r["kind"], "w_plus");
        assert_eq!(r["target"], "K0");
        assert_eq!(r["p"], 2);
        assert_eq!(r["t"], 0);
        assert_eq!(r["d"], 0);
        assert!(v["base"]["handles"][0]["tb"].is_i64());
    }
}
