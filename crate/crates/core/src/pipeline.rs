//! The construction: basic data of a Step-1 handlebody, the q and p
//! sequences, and the families X_i (i = -1..n) built from them.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    homology, spans_h2, validate, ClassVector, GenusWitness, Handlebody, Role, TietzeCertificate,
    TwoHandle,
};
use crate::error::{Error, Result};
use crate::legendrian::{apply_choice, canonical_choice, is_stein_handlebody, PairingData};
use crate::modifications::{
    boundary_sum_marked, replay, swap_sign, Marked, ModificationLog, ModificationRecord,
};

/// (m, t, r, g) of one handle K_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleData {
    pub id: String,
    pub m: i64,
    pub t: i64,
    pub r: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
}

/// Basic data of the input. `handles[0..=k]` is the basis K_0..K_k and
/// `handles[k+1..=l]` the remaining 2-handles in handlebody order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisData {
    pub k: usize,
    pub l: usize,
    pub k0: String,
    pub handles: Vec<HandleData>,
}

impl BasisData {
    pub fn m0(&self) -> i64 {
        self.handles[0].m
    }

    pub fn t0(&self) -> i64 {
        self.handles[0].t
    }

    pub fn r0(&self) -> i64 {
        self.handles[0].r
    }

    pub fn g(&self, j: usize) -> i64 {
        self.handles[j].g.unwrap_or(0) as i64
    }

    /// M_i = 2p_i + (t_0 - 1) - m_0 + |r_0|.
    pub fn leading(&self, p_i: i64) -> i64 {
        2 * p_i + (self.t0() - 1) - self.m0() + self.r0().abs()
    }
}

/// Reads the basic data, with `k0` first and then the other ids of
/// `basis_ids` in order.
pub fn extract_data(h: &Handlebody, basis_ids: &[String], k0: &str) -> Result<BasisData> {
    validate(h).into_result()?;
    let mut order = vec![h.index_of(k0)?];
    for id in basis_ids {
        let j = h.index_of(id)?;
        if !order.contains(&j) {
            order.push(j);
        }
    }
    let k = order.len() - 1;
    let c = h.handle_count();
    let basis: Vec<ClassVector> = order.iter().map(|&j| ClassVector::unit(c, j)).collect();
    for &j in &order {
        let handle = &h.handles[j];
        if !handle.is_null_homologous_in_one_handles() {
            return Err(Error::Basis(format!(
                "basis handle `{}` runs over a 1-handle algebraically",
                handle.id
            )));
        }
        if handle.genus.is_none() {
            return Err(Error::Basis(format!(
                "basis handle `{}` has no genus witness",
                handle.id
            )));
        }
    }
    if !spans_h2(h, &basis)? {
        return Err(Error::Basis("designated handles do not span H_2".into()));
    }
    let rest: Vec<usize> = (0..c).filter(|j| !order.contains(j)).collect();
    order.extend(rest);
    let handles = order
        .iter()
        .map(|&j| {
            let handle = &h.handles[j];
            let (t, r) = handle
                .legendrian()
                .ok_or_else(|| Error::MissingLegendrian(handle.id.clone()))?;
            Ok(HandleData {
                id: handle.id.clone(),
                m: handle.framing,
                t,
                r,
                g: handle.genus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisData {
        k,
        l: c - 1,
        k0: k0.to_string(),
        handles,
    })
}

/// Basis = the handles tagged `basis`, in order; K_0 is the first of them.
pub fn extract_default(h: &Handlebody) -> Result<BasisData> {
    let ids: Vec<String> = h
        .handles
        .iter()
        .filter(|k| k.role == Role::Basis)
        .map(|k| k.id.clone())
        .collect();
    let k0 = ids
        .first()
        .ok_or_else(|| Error::Basis("no handle has role `basis`".into()))?
        .clone();
    extract_data(h, &ids, &k0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Strengthened,
    Nonstein,
}

/// One evaluated inequality `lhs < rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub lhs: i64,
    pub rhs: i64,
    pub op: String,
    pub ok: bool,
    pub name: String,
}

impl Check {
    pub fn lt(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check {
            lhs,
            rhs,
            op: "<".into(),
            ok: lhs < rhs,
            name: name.into(),
        }
    }

    /// Recomputes `ok` from the numbers.
    pub fn holds(&self) -> bool {
        self.op == "<" && self.lhs < self.rhs
    }
}

/// The checks attached to member index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub i: i64,
    pub checks: Vec<Check>,
}

pub const P_INCREASING: &str = "p_i > p_{i-1}";

fn checks_at(
    data: &BasisData,
    q: &[i64],
    variant: Variant,
    i: i64,
    p_i: i64,
    p_prev: i64,
) -> Vec<Check> {
    let m0 = data.m0();
    let big_m = data.leading(p_i);
    let threshold = 2 * (data.g(0) + p_prev) - 2;
    let strengthened = variant != Variant::Standard && data.k >= 1;
    let mut out = vec![
        Check::lt(P_INCREASING, p_prev, p_i),
        Check::lt("M_i > 0", 0, big_m),
        Check::lt("(iv) 2(g_0+p_{i-1})-2-m_0 < M_i", threshold - m0, big_m),
    ];
    if strengthened {
        out.push(Check::lt(
            "(vi) 2(g_0+p_{i-1})-2+m_0 < M_i",
            threshold + m0,
            big_m,
        ));
    }
    for j in 1..=data.k {
        let base = 2 * (data.g(j) + q[j]) - 2;
        let mj = data.handles[j].m;
        out.push(Check::lt(
            format!("(iii) 2(g_j+q_j)-2-m_j < M_i (j={j})"),
            base - mj,
            big_m,
        ));
        if strengthened {
            out.push(Check::lt(
                format!("(v) 2(g_j+q_j)-2+m_j < M_i (j={j})"),
                base + mj,
                big_m,
            ));
        }
    }
    if i == 1 {
        out.push(Check::lt(
            "(ii) p_1+(t_0-1)-m_0 >= 0",
            -1,
            p_i + (data.t0() - 1) - m0,
        ));
        if variant == Variant::Nonstein {
            out.push(Check::lt("(iii)' M_1 > 2", 2, big_m));
        }
    }
    out
}

fn q_checks(data: &BasisData, q: &[i64]) -> Vec<Check> {
    let mut out = Vec::new();
    for j in 1..=data.l {
        let hd = &data.handles[j];
        let room = q[j] + (hd.t - 1) - hd.m;
        out.push(Check::lt(format!("q_j >= 0 (j={j})"), -1, q[j]));
        out.push(Check::lt(
            format!("q_j+(t_j-1)-m_j >= 0 (j={j})"),
            -1,
            room,
        ));
        if j <= data.k {
            out.push(Check::lt(
                format!("q_j+(t_j-1)-m_j >= |r_j| (j={j})"),
                hd.r.abs() - 1,
                room,
            ));
        }
    }
    out
}

/// Evaluates every condition of `variant` on (q, p). `p` is indexed
/// -1..n, so `p[0] = p_{-1}` and `p[1] = p_0`.
pub fn evaluate_conditions(
    data: &BasisData,
    q: &[i64],
    p: &[i64],
    variant: Variant,
) -> Result<Vec<Threshold>> {
    if q.len() != data.l + 1 {
        return Err(Error::Refused(format!(
            "q has length {}, expected {}",
            q.len(),
            data.l + 1
        )));
    }
    if q[0] != 0 {
        return Err(Error::Refused("q_0 must be 0".into()));
    }
    if p.len() < 3 {
        return Err(Error::Refused("p must list p_{-1}, p_0 and at least p_1".into()));
    }
    if p[0] != 0 || p[1] != 0 {
        return Err(Error::Refused("p_{-1} and p_0 must be 0".into()));
    }
    let n = p.len() - 2;
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut checks = checks_at(data, q, variant, i as i64, p[i + 1], p[i]);
        if i == 1 {
            checks.extend(q_checks(data, q));
        }
        out.push(Threshold {
            i: i as i64,
            checks,
        });
    }
    Ok(out)
}

/// "name violated (i=..)" for every failing check.
pub fn violations(thresholds: &[Threshold]) -> Vec<String> {
    thresholds
        .iter()
        .flat_map(|t| {
            t.checks
                .iter()
                .filter(|c| !c.holds() || !c.ok)
                .map(move |c| format!("{} violated (i={})", c.name, t.i))
        })
        .collect()
}

/// q_j = max(0, m_j - t_j + 1, [j <= k](|r_j| + m_j - t_j + 1)).
pub fn solve_q(data: &BasisData) -> Vec<i64> {
    let mut q = vec![0; data.l + 1];
    for j in 1..=data.l {
        let hd = &data.handles[j];
        let mut v = (hd.m - hd.t + 1).max(0);
        if j <= data.k {
            v = v.max(hd.r.abs() + hd.m - hd.t + 1);
        }
        q[j] = v;
    }
    q
}

/// Minimal increasing p meeting every condition of `variant`; the result is
/// indexed -1..n.
pub fn solve_p(data: &BasisData, q: &[i64], n: usize, variant: Variant) -> Result<Vec<i64>> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let mut p = vec![0i64; n + 2];
    for i in 1..=n {
        let prev = p[i];
        let ok = |x: i64| {
            let mut checks = checks_at(data, q, variant, i as i64, x, prev);
            if i == 1 {
                checks.extend(q_checks(data, q));
            }
            checks.iter().all(|c| c.ok)
        };
        let lo = prev + 1;
        p[i + 1] = least_satisfying(lo, ok)?;
    }
    Ok(p)
}

/// Smallest x >= lo with `ok(x)`, for a predicate that is monotone in x.
fn least_satisfying(lo: i64, ok: impl Fn(i64) -> bool) -> Result<i64> {
    if ok(lo) {
        return Ok(lo);
    }
    let mut step: i64 = 1;
    while !ok(lo.checked_add(step).ok_or_else(|| Error::Overflow("p".into()))?) {
        step = step
            .checked_mul(2)
            .ok_or_else(|| Error::Overflow("p".into()))?;
    }
    let (mut bad, mut good) = (lo + step / 2, lo + step);
    if step == 1 {
        bad = lo;
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// q and p with the evidence that every condition holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePlan {
    pub variant: Variant,
    pub q: Vec<i64>,
    /// Indexed -1..n.
    pub p: Vec<i64>,
    #[serde(default)]
    pub evidence: Vec<Threshold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<BasisData>,
}

impl SequencePlan {
    pub fn n(&self) -> usize {
        self.p.len().saturating_sub(2)
    }

    /// p_i for i in -1..=n.
    pub fn p_at(&self, i: i64) -> i64 {
        self.p[(i + 1) as usize]
    }
}

/// The minimal plan for `data`.
pub fn solve_plan(data: &BasisData, n: usize, variant: Variant) -> Result<SequencePlan> {
    let q = solve_q(data);
    let p = solve_p(data, &q, n, variant)?;
    let evidence = evaluate_conditions(data, &q, &p, variant)?;
    Ok(SequencePlan {
        variant,
        q,
        p,
        evidence,
        data: Some(data.clone()),
    })
}

/// Re-evaluates an externally supplied plan against `data`; the returned
/// plan carries fresh evidence. Refuses when any condition fails.
pub fn check_plan(data: &BasisData, plan: &SequencePlan) -> Result<SequencePlan> {
    let evidence = evaluate_conditions(data, &plan.q, &plan.p, plan.variant)?;
    let bad = violations(&evidence);
    if !bad.is_empty() {
        return Err(Error::Refused(bad.join("; ")));
    }
    Ok(SequencePlan {
        evidence,
        data: Some(data.clone()),
        ..plan.clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteinStatus {
    /// Stein once the pending finishing zig-zags are fixed.
    Stein,
    /// Not established by the construction (input not a good Stein
    /// handlebody).
    NotEstablished,
}

/// One constructed handlebody X_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub index: i64,
    pub handlebody: Handlebody,
    pub log: ModificationLog,
    /// v_0, ..., v_k in this member.
    pub classes: Vec<ClassVector>,
    pub witnesses: Vec<GenusWitness>,
    pub tietze: TietzeCertificate,
    pub stein: SteinStatus,
    /// Basis handles whose Step-2 zig-zags may go either way.
    pub flippable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub data: BasisData,
    pub plan: SequencePlan,
    pub input_good_stein: bool,
    /// Ordered by index -1, 0, 1, ..., n.
    pub members: Vec<Member>,
}

impl Family {
    pub fn n(&self) -> usize {
        self.members.len().saturating_sub(2)
    }

    pub fn member(&self, i: i64) -> Option<&Member> {
        self.members.iter().find(|m| m.index == i)
    }

    /// Data for the c1 bound on member `i`.
    pub fn pairing_data(&self, i: i64) -> Result<PairingData> {
        let member = self
            .member(i)
            .ok_or_else(|| Error::Precondition(format!("no member X_{i}")))?;
        let k = self.data.k;
        let (p_i, q) = if i >= 0 {
            (self.plan.p_at(i), self.plan.q[..=k].to_vec())
        } else {
            (0, vec![0; k + 1])
        };
        let h = &member.handlebody;
        let mut delta_ids = vec![None];
        for j in 1..=k {
            let kj = h.index_of(&self.data.handles[j].id)?;
            let delta = if q[j] != 0 {
                let v = &member.classes[j];
                v.coeffs
                    .iter()
                    .enumerate()
                    .find(|(idx, c)| *idx != kj && **c != 0)
                    .map(|(idx, _)| h.handles[idx].id.clone())
            } else {
                None
            };
            delta_ids.push(delta);
        }
        Ok(PairingData {
            p_i,
            t0: self.data.t0(),
            m0: self.data.m0(),
            r0: self.data.r0(),
            q,
            basis: member.classes.clone(),
            k_ids: self.data.handles[..=k].iter().map(|h| h.id.clone()).collect(),
            delta_ids,
        })
    }
}

/// Smallest d in 0..=t minimizing |rot + 2d - t|.
fn closest_d(rot: i64, t: i64) -> i64 {
    let ideal = (t - rot).div_euclid(2);
    let mut best = 0;
    let mut best_abs = i64::MAX;
    for d in [ideal, ideal + 1, 0, t] {
        let d = d.clamp(0, t);
        let v = (rot + 2 * d - t).abs();
        if v < best_abs || (v == best_abs && d < best) {
            best = d;
            best_abs = v;
        }
    }
    best
}

fn push_zigzag(log: &mut ModificationLog, m: &Marked, id: &str, t: i64, d: i64) -> Result<Marked> {
    if t == 0 {
        return Ok(m.clone());
    }
    log.push(m, ModificationRecord::zigzag(id, t, d))
}

fn created_id(log: &ModificationLog) -> Result<String> {
    log.records
        .last()
        .and_then(|r| r.created.as_ref())
        .map(|c| c.aux_id.clone())
        .ok_or_else(|| Error::Construction("W-move without created handle".into()))
}

fn legendrian_of(m: &Marked, id: &str) -> Result<(i64, i64)> {
    let k = m.handlebody.handle(id)?;
    k.legendrian()
        .ok_or_else(|| Error::MissingLegendrian(id.to_string()))
}

fn unit_minus(h: &Handlebody, k: &str, aux: Option<(&str, i64)>) -> Result<ClassVector> {
    let mut v = ClassVector::unit(h.handle_count(), h.index_of(k)?);
    if let Some((aux, coeff)) = aux {
        v.coeffs[h.index_of(aux)?] = -coeff;
    }
    Ok(v)
}

pub(crate) fn stein_status(h: &Handlebody, required: bool, allowed: bool) -> Result<SteinStatus> {
    let finished = apply_choice(h, &canonical_choice(h))?;
    let stein = is_stein_handlebody(&finished);
    if required && !stein {
        return Err(Error::Construction(
            "member is not a Stein handlebody after finishing zig-zags".into(),
        ));
    }
    Ok(if stein && allowed {
        SteinStatus::Stein
    } else {
        SteinStatus::NotEstablished
    })
}

fn finish_member(
    index: i64,
    marked: Marked,
    log: ModificationLog,
    classes: Vec<ClassVector>,
    stein: SteinStatus,
    flippable: Vec<String>,
    data: &BasisData,
) -> Result<Member> {
    let h = &marked.handlebody;
    if !spans_h2(h, &classes)? {
        return Err(Error::Construction(format!(
            "classes of X_{index} do not span H_2"
        )));
    }
    for (j, v) in classes.iter().enumerate() {
        if h.square(v)? != data.handles[j].m {
            return Err(Error::Construction(format!(
                "v_{j} of X_{index} does not square to m_{j}"
            )));
        }
    }
    Ok(Member {
        index,
        handlebody: marked.handlebody,
        log,
        classes,
        witnesses: marked.witnesses,
        tietze: marked.tietze,
        stein,
        flippable,
    })
}

/// Steps 2-5: builds X_{-1}, X_0, ..., X_n.
pub fn build_family(h: &Handlebody, data: &BasisData, plan: &SequencePlan) -> Result<Family> {
    let plan = check_plan(data, plan)?;
    let n = plan.n();
    let (k, l) = (data.k, data.l);
    let q = &plan.q;
    let input_good_stein = is_stein_handlebody(h);
    let k0 = data.k0.as_str();

    // W+ moves and zig-zags on K_1..K_l
    let base = Marked::from_input(h.clone());
    let mut log = ModificationLog::new(h.clone());
    let mut cur = base.clone();
    let mut delta: Vec<Option<String>> = vec![None; l + 1];
    let mut flippable = Vec::new();
    for j in 1..=l {
        let id = data.handles[j].id.as_str();
        if q[j] > 0 {
            cur = log.push(&cur, ModificationRecord::w(true, id, q[j]))?;
            delta[j] = Some(created_id(&log)?);
        }
        let (tb, rot) = legendrian_of(&cur, id)?;
        let t = tb - (data.handles[j].m + 1);
        if t < 0 {
            return Err(Error::Unreachable {
                id: id.to_string(),
                reason: format!("tb {tb} is below the target {}", data.handles[j].m + 1),
            });
        }
        let d = closest_d(rot, t);
        cur = push_zigzag(&mut log, &cur, id, t, d)?;
        let rot_after = rot + 2 * d - t;
        if j <= k {
            match rot_after.abs() {
                0 => {}
                1 => flippable.push(id.to_string()),
                _ => {
                    return Err(Error::Unreachable {
                        id: id.to_string(),
                        reason: format!("|rot| = {} after the zig-zags", rot_after.abs()),
                    })
                }
            }
        } else if let Some(dj) = &delta[j] {
            cur = push_zigzag(&mut log, &cur, dj, 1, 0)?;
        }
    }

    // W- moves on K_0
    let mut gamma = Vec::with_capacity(n);
    let mut w_minus_at = Vec::with_capacity(n);
    for i in 1..=n {
        w_minus_at.push(log.records.len());
        cur = log.push(&cur, ModificationRecord::w(false, k0, plan.p_at(i as i64)))?;
        gamma.push(created_id(&log)?);
    }
    let x0 = cur;
    let log0 = log;

    let classes_tail = |m: &Marked| -> Result<Vec<ClassVector>> {
        (1..=k)
            .map(|j| {
                let aux = delta[j].as_deref().map(|d| (d, q[j]));
                unit_minus(&m.handlebody, &data.handles[j].id, aux)
            })
            .collect()
    };

    let mut members = Vec::with_capacity(n + 2);

    // X_{-1}
    let mut log_m1 = ModificationLog::new(h.clone());
    let mut cur = base;
    for j in 1..=l {
        if q[j] > 0 {
            cur = log_m1.push(&cur, ModificationRecord::w(false, &data.handles[j].id, q[j]))?;
        }
    }
    for i in 1..=n {
        cur = log_m1.push(&cur, ModificationRecord::w(false, k0, plan.p_at(i as i64)))?;
    }
    let classes_m1 = (0..=k)
        .map(|j| unit_minus(&cur.handlebody, &data.handles[j].id, None))
        .collect::<Result<Vec<_>>>()?;
    let stein_m1 = stein_status(&cur.handlebody, false, input_good_stein)?;
    members.push(finish_member(-1, cur, log_m1, classes_m1, stein_m1, vec![], data)?);

    let mut classes0 = vec![unit_minus(&x0.handlebody, k0, None)?];
    classes0.extend(classes_tail(&x0)?);
    let stein0 = stein_status(&x0.handlebody, false, input_good_stein)?;
    members.push(finish_member(
        0,
        x0.clone(),
        log0.clone(),
        classes0,
        stein0,
        flippable.clone(),
        data,
    )?);

    // sign swaps and K_0 zig-zags
    let (t0, m0, r0) = (data.t0(), data.m0(), data.r0());
    let sigma = if r0 < 0 { -1 } else { 1 };
    for i in 1..=n {
        let p_i = plan.p_at(i as i64);
        let (xi, mut log_i) = swap_sign(&log0, w_minus_at[i - 1])?;
        let t = p_i + (t0 - 1) - m0;
        let d = if sigma > 0 { t } else { 0 };
        let xi = push_zigzag(&mut log_i, &xi, k0, t, d)?;
        let (_, rot_k0) = legendrian_of(&xi, k0)?;
        let gamma_d = if rot_k0 < 0 { 1 } else { 0 };
        let xi = push_zigzag(&mut log_i, &xi, &gamma[i - 1], 1, gamma_d)?;

        let mut classes = vec![unit_minus(&xi.handlebody, k0, Some((&gamma[i - 1], p_i)))?];
        classes.extend(classes_tail(&xi)?);
        let expected = data.g(0) + p_i;
        let realized = xi
            .witnesses
            .iter()
            .any(|w| w.class == classes[0] && w.genus as i64 == expected);
        if !realized {
            return Err(Error::Construction(format!(
                "X_{i} carries no genus {expected} witness for v_0"
            )));
        }
        let stein = stein_status(&xi.handlebody, true, true)?;
        members.push(finish_member(
            i as i64,
            xi,
            log_i,
            classes,
            stein,
            flippable.clone(),
            data,
        )?);
    }

    let profile = homology(&members[0].handlebody)?;
    for m in &members[1..] {
        if homology(&m.handlebody)? != profile {
            return Err(Error::Construction(format!(
                "X_{} has a different homology profile",
                m.index
            )));
        }
    }

    Ok(Family {
        data: data.clone(),
        plan,
        input_good_stein,
        members,
    })
}

/// Extract, solve and build in one go.
pub fn family_for(h: &Handlebody, n: usize, variant: Variant) -> Result<Family> {
    let data = extract_default(h)?;
    let plan = solve_plan(&data, n, variant)?;
    build_family(h, &data, &plan)
}

/// U(m): a single m-framed Legendrian unknot with genus-0 witness.
pub fn example_u(m: i64) -> Handlebody {
    let (tb, rot) = if m <= -2 { (m + 1, -m - 2) } else { (-1, 0) };
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

/// A member of the Stein / non-Stein family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumMember {
    pub index: i64,
    /// `true` for X^S_i, `false` for X^N_i.
    pub stein_side: bool,
    pub marked: Marked,
    pub log: ModificationLog,
}

impl SumMember {
    pub fn label(&self) -> String {
        format!("X^{}_{}", if self.stein_side { "S" } else { "N" }, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsteinFamily {
    pub plan: SequencePlan,
    pub xs: Vec<SumMember>,
    pub xn: Vec<SumMember>,
}

fn finished_with_canonical_choice(m: &Member) -> Result<(Marked, ModificationLog)> {
    let mut log = m.log.clone();
    let mut marked = Marked {
        handlebody: m.handlebody.clone(),
        witnesses: m.witnesses.clone(),
        tietze: m.tietze.clone(),
    };
    for (id, sign) in canonical_choice(&m.handlebody).delta_signs {
        let d = if sign > 0 { 1 } else { 0 };
        marked = log.push(&marked, ModificationRecord::zigzag(&id, 1, d))?;
    }
    Ok((marked, log))
}

/// X^S_i = X_i ♮ U(0)_1 and X^N_i = X_i ♮ U(0)_0 for i = 1..n, with X_i
/// built from the non-Stein variant plan.
pub fn stein_nonstein_family(h: &Handlebody, n: usize) -> Result<NonsteinFamily> {
    let family = family_for(h, n, Variant::Nonstein)?;
    let u0 = family_for(&example_u(0), 1, Variant::Standard)?;
    let summand = |i: i64| -> Result<(Marked, ModificationLog)> {
        let m = u0
            .member(i)
            .ok_or_else(|| Error::Construction(format!("U(0) family lacks X_{i}")))?;
        let marked = replay(&m.log)?;
        Ok((marked, m.log.clone()))
    };
    let (s_marked, s_log) = summand(1)?;
    let (n_marked, n_log) = summand(0)?;

    let mut xs = Vec::with_capacity(n);
    let mut xn = Vec::with_capacity(n);
    for i in 1..=n as i64 {
        let member = family
            .member(i)
            .ok_or_else(|| Error::Construction(format!("missing X_{i}")))?;
        let (hat, hat_log) = finished_with_canonical_choice(member)?;
        for (stein_side, other, other_log) in
            [(true, &s_marked, &s_log), (false, &n_marked, &n_log)]
        {
            let mut log = hat_log.clone();
            log.records
                .push(ModificationRecord::boundary_sum(other_log.clone()));
            let marked = boundary_sum_marked(&hat, other);
            let entry = SumMember {
                index: i,
                stein_side,
                marked,
                log,
            };
            if stein_side {
                xs.push(entry);
            } else {
                xn.push(entry);
            }
        }
    }
    Ok(NonsteinFamily {
        plan: family.plan,
        xs,
        xn,
    })
}
