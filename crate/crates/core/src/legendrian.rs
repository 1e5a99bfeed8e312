//! Stein-side bookkeeping: zig-zags, Stein handlebody checks, first Chern
//! class pairings, adjunction bounds and the d3 invariant.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{homology, spans_h2, ClassVector, GenusWitness, Handlebody, Role, TwoHandle};
use crate::error::{Error, Result};

/// Adds `t` zig-zags to `k`, `d` of them in the rotation-raising direction:
/// tb drops by `t` and rot changes by `2d - t`.
pub fn zigzag(k: &TwoHandle, t: u64, d: u64) -> Result<TwoHandle> {
    if d > t {
        return Err(Error::ZigzagRange { t, d });
    }
    let (tb, rot) = k
        .legendrian()
        .ok_or_else(|| Error::MissingLegendrian(k.id.clone()))?;
    let t = t as i64;
    let d = d as i64;
    let mut out = k.clone();
    out.tb = Some(tb - t);
    out.rot = Some(rot + 2 * d - t);
    Ok(out)
}

/// Every 2-handle is Legendrian and attached with framing tb - 1.
pub fn is_stein_handlebody(h: &Handlebody) -> bool {
    h.handles
        .iter()
        .all(|k| matches!(k.tb, Some(tb) if k.rot.is_some() && k.framing == tb - 1))
}

/// Stein, and the basis-role handles avoid the 1-handles algebraically and
/// span H_2.
pub fn is_good_stein(h: &Handlebody) -> bool {
    if !is_stein_handlebody(h) {
        return false;
    }
    let c = h.handle_count();
    let basis: Vec<ClassVector> = h
        .handles
        .iter()
        .enumerate()
        .filter(|(_, k)| k.role == Role::Basis)
        .map(|(j, _)| ClassVector::unit(c, j))
        .collect();
    let avoids = h
        .handles
        .iter()
        .filter(|k| k.role == Role::Basis)
        .all(TwoHandle::is_null_homologous_in_one_handles);
    avoids && spans_h2(h, &basis).unwrap_or(false)
}

/// Choice of the finishing zig-zag on every handle still sitting at
/// tb = framing + 2, plus optional rotation flips on handles whose
/// zig-zags could have been added in the other direction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinStructureChoice {
    pub delta_signs: BTreeMap<String, i8>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub rot_flips: BTreeSet<String>,
}

/// Handles that need one more zig-zag before the handlebody is Stein.
pub fn pending_finishes(h: &Handlebody) -> Vec<String> {
    h.handles
        .iter()
        .filter(|k| k.tb == Some(k.framing + 2) && k.rot.is_some())
        .map(|k| k.id.clone())
        .collect()
}

/// The convention used when no choice is supplied: every finishing
/// zig-zag lowers the rotation number.
pub fn canonical_choice(h: &Handlebody) -> SteinStructureChoice {
    SteinStructureChoice {
        delta_signs: pending_finishes(h).into_iter().map(|id| (id, -1)).collect(),
        rot_flips: BTreeSet::new(),
    }
}

/// Applies the finishing zig-zags and flips of `choice`.
pub fn apply_choice(h: &Handlebody, choice: &SteinStructureChoice) -> Result<Handlebody> {
    let pending: BTreeSet<String> = pending_finishes(h).into_iter().collect();
    let keys: BTreeSet<String> = choice.delta_signs.keys().cloned().collect();
    if let Some(missing) = pending.difference(&keys).next() {
        return Err(Error::IncompleteChoice(format!("no sign for `{missing}`")));
    }
    if let Some(extra) = keys.difference(&pending).next() {
        return Err(Error::IncompleteChoice(format!(
            "`{extra}` does not need a finishing zig-zag"
        )));
    }
    let mut out = h.clone();
    for (id, sign) in &choice.delta_signs {
        let j = out.index_of(id)?;
        let d = match sign {
            1 => 1,
            -1 => 0,
            s => return Err(Error::IncompleteChoice(format!("sign {s} for `{id}`"))),
        };
        out.handles[j] = zigzag(&out.handles[j], 1, d)?;
    }
    for id in &choice.rot_flips {
        let j = out.index_of(id)?;
        let k = &mut out.handles[j];
        match k.rot {
            Some(r) if r.abs() == 1 => k.rot = Some(-r),
            _ => {
                return Err(Error::IncompleteChoice(format!(
                    "`{id}` cannot be flipped (|rot| != 1)"
                )))
            }
        }
    }
    Ok(out)
}

/// Value of c1 on a 2-chain: the sum of coefficient times rotation number.
pub fn c1_pairing(h: &Handlebody, choice: &SteinStructureChoice, a: &ClassVector) -> Result<i64> {
    let finished = apply_choice(h, choice)?;
    if !is_stein_handlebody(&finished) {
        return Err(Error::Precondition(
            "handlebody is not Stein after finishing zig-zags".into(),
        ));
    }
    if a.len() != finished.handle_count() {
        return Err(Error::ClassLength {
            expected: finished.handle_count(),
            got: a.len(),
        });
    }
    let mut acc = 0i128;
    for (k, c) in finished.handles.iter().zip(&a.coeffs) {
        acc += *c as i128 * k.rot.unwrap_or(0) as i128;
    }
    i64::try_from(acc).map_err(|_| Error::Overflow(acc.to_string()))
}

/// Data of one constructed member `X_i` (i >= 1) needed for the c1 lower
/// bound on classes written in the basis `v_0, ..., v_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingData {
    pub p_i: i64,
    pub t0: i64,
    pub m0: i64,
    pub r0: i64,
    /// q_j for j = 0..=k, with q_0 = 0.
    pub q: Vec<i64>,
    pub basis: Vec<ClassVector>,
    /// Handle ids of K_j, j = 0..=k.
    pub k_ids: Vec<String>,
    /// Auxiliary handle delta_j of the Step-2 W+ move, when q_j != 0.
    pub delta_ids: Vec<Option<String>>,
}

impl PairingData {
    /// |<c1, v_0>| predicted in closed form: 2p_i + (t_0 - 1) - m_0 + |r_0|.
    pub fn leading(&self) -> i64 {
        2 * self.p_i + (self.t0 - 1) - self.m0 + self.r0.abs()
    }

    pub fn q_hat(&self, j: usize) -> i64 {
        if self.q[j] != 0 {
            self.q[j] - 1
        } else {
            0
        }
    }

    pub fn combine(&self, a: &[i64]) -> Result<ClassVector> {
        if a.len() != self.basis.len() {
            return Err(Error::ClassLength {
                expected: self.basis.len(),
                got: a.len(),
            });
        }
        let len = self.basis.first().map_or(0, ClassVector::len);
        let mut coeffs = vec![0i64; len];
        for (x, v) in a.iter().zip(&self.basis) {
            for (c, y) in coeffs.iter_mut().zip(&v.coeffs) {
                *c += x * y;
            }
        }
        Ok(ClassVector { coeffs })
    }
}

/// Lower bound |a_0| M_i + sum |a_j q^_j| on |<c1(J), a>| together with a
/// Stein structure J realizing it. `a` is given in the basis `v_j`.
pub fn max_pairing(
    h: &Handlebody,
    a: &[i64],
    data: &PairingData,
) -> Result<(u64, SteinStructureChoice)> {
    let class = data.combine(a)?;
    let mut choice = canonical_choice(h);
    let lead = c1_pairing(h, &choice, &data.basis[0])?;
    let sigma = match (a[0] * lead).signum() {
        0 => 1,
        s => s,
    };

    for j in 1..a.len() {
        if a[j] == 0 {
            continue;
        }
        if let Some(delta) = &data.delta_ids[j] {
            if choice.delta_signs.contains_key(delta) {
                choice
                    .delta_signs
                    .insert(delta.clone(), (-sigma * a[j].signum()) as i8);
            }
        }
        let kj = h.handle(&data.k_ids[j])?;
        if let Some(r) = kj.rot {
            if r.abs() == 1 && (a[j] * r).signum() != sigma {
                choice.rot_flips.insert(kj.id.clone());
            }
        }
    }

    let mut bound = a[0].unsigned_abs() * data.leading().unsigned_abs();
    for (j, x) in a.iter().enumerate().skip(1) {
        bound += x.unsigned_abs() * data.q_hat(j).unsigned_abs();
    }

    let realized = c1_pairing(h, &choice, &class)?.unsigned_abs();
    if realized < bound {
        return Err(Error::Construction(format!(
            "chosen Stein structure pairs to {realized}, below the bound {bound}"
        )));
    }
    Ok((bound, choice))
}

/// Largest |<c1(J), a>| over every choice of finishing zig-zags and of the
/// allowed flips, by exhaustive enumeration.
pub fn realized_max_pairing(
    h: &Handlebody,
    a: &ClassVector,
    flippable: &[String],
) -> Result<(u64, SteinStructureChoice)> {
    let pending = pending_finishes(h);
    let free = pending.len() + flippable.len();
    if free > 20 {
        return Err(Error::Precondition(format!(
            "{free} binary choices is too many to enumerate"
        )));
    }
    let mut best: Option<(u64, SteinStructureChoice)> = None;
    for mask in 0u32..(1u32 << free) {
        let mut choice = SteinStructureChoice::default();
        for (b, id) in pending.iter().enumerate() {
            let s = if mask & (1 << b) != 0 { 1 } else { -1 };
            choice.delta_signs.insert(id.clone(), s);
        }
        for (b, id) in flippable.iter().enumerate() {
            if mask & (1 << (pending.len() + b)) != 0 {
                choice.rot_flips.insert(id.clone());
            }
        }
        let v = c1_pairing(h, &choice, a)?.unsigned_abs();
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, choice));
        }
    }
    Ok(best.expect("at least one choice"))
}

/// The adjunction inequality for Stein manifolds:
/// square + |<c1, a>| <= 2 genus - 2.
pub fn adjunction_check(square: i64, pairing_abs: u64, genus: u32) -> bool {
    square as i128 + pairing_abs as i128 <= 2 * genus as i128 - 2
}

/// A stored surface that no Stein structure can accommodate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub witness: usize,
    pub genus: u32,
    pub square: i64,
    /// Also obstructs the orientation-reversed manifold.
    pub any_orientation: bool,
}

/// Looks for a witness whose square already exceeds 2g - 2, so that the
/// adjunction inequality fails for every c1.
pub fn stein_obstruction(h: &Handlebody, witnesses: &[GenusWitness]) -> Result<Option<Obstruction>> {
    let mut found: Option<Obstruction> = None;
    for (idx, w) in witnesses.iter().enumerate() {
        if w.class.is_zero() || !h.in_h2(&w.class)? {
            continue;
        }
        let square = h.square(&w.class)?;
        let limit = 2 * w.genus as i64 - 2;
        if square <= limit {
            continue;
        }
        let ob = Obstruction {
            witness: idx,
            genus: w.genus,
            square,
            any_orientation: -square > limit,
        };
        match &found {
            Some(f) if f.any_orientation || !ob.any_orientation => {}
            _ => found = Some(ob),
        }
    }
    Ok(found)
}

/// c1^2 = <c1, v>^2 / v^2 for b_2 = 1.
pub fn c1_squared_b2one(pairing: i64, square: i64) -> Result<BigRational> {
    if square == 0 {
        return Err(Error::Precondition(
            "c1^2 is undefined by this formula when the generator has square 0".into(),
        ));
    }
    let p = BigInt::from(pairing);
    Ok(BigRational::new(&p * &p, BigInt::from(square)))
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigRational>().map_err(D::Error::custom)
    }
}

/// Boundary contact invariant of a Stein domain with torsion c1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactInvariant {
    #[serde(with = "rational_string")]
    pub d3: BigRational,
    #[serde(with = "rational_string")]
    pub c1_squared: BigRational,
    pub euler: i64,
    pub signature: i64,
}

/// d3 = (c1^2 - 2e - 3 sigma) / 4 for a Stein handlebody with b_2 = 1.
pub fn d3(h: &Handlebody, pairing: i64) -> Result<ContactInvariant> {
    let profile = homology(h)?;
    if profile.b2 != 1 {
        return Err(Error::Precondition(format!("b2 = {} (need 1)", profile.b2)));
    }
    let square = profile.intersection_matrix[0][0];
    if square == 0 {
        return Err(Error::Precondition("intersection form is zero".into()));
    }
    if !is_stein_handlebody(h) {
        return Err(Error::Precondition("handlebody is not Stein".into()));
    }
    let c1_squared = c1_squared_b2one(pairing, square)?;
    let e = BigInt::from(profile.euler);
    let sigma = BigInt::from(profile.signature);
    let num = &c1_squared - BigRational::from_integer(BigInt::from(2) * e + BigInt::from(3) * sigma);
    let d3 = num / BigRational::from_integer(BigInt::from(4));
    Ok(ContactInvariant {
        d3,
        c1_squared,
        euler: profile.euler,
        signature: profile.signature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Role, WitnessProvenance};

    fn knot(id: &str, m: i64, tb: i64, rot: i64) -> TwoHandle {
        TwoHandle {
            id: id.into(),
            role: Role::Basis,
            framing: m,
            tb: Some(tb),
            rot: Some(rot),
            run_over: vec![],
            genus: Some(0),
        }
    }

    fn single(k: TwoHandle) -> Handlebody {
        let m = k.framing;
        Handlebody {
            one_handles: 0,
            handles: vec![k],
            linking: vec![vec![m]],
        }
    }

    #[test]
    fn zigzag_examples() {
        let k = zigzag(&knot("K", 0, 2, 0), 1, 0).unwrap();
        assert_eq!((k.tb, k.rot), (Some(1), Some(-1)));
        let k0 = knot("K", 0, 2, 0);
        assert_eq!(zigzag(&k0, 0, 0).unwrap(), k0);
        let k = zigzag(&knot("K", -3, -1, 0), 4, 3).unwrap();
        assert_eq!((k.tb, k.rot), (Some(-5), Some(2)));
    }

    #[test]
    fn zigzag_errors() {
        assert_eq!(
            zigzag(&knot("K", 0, 2, 0), 1, 2),
            Err(Error::ZigzagRange { t: 1, d: 2 })
        );
        let mut k = knot("K", 0, 2, 0);
        k.tb = None;
        k.rot = None;
        assert!(matches!(zigzag(&k, 1, 0), Err(Error::MissingLegendrian(_))));
    }

    #[test]
    fn stein_checks() {
        assert!(is_stein_handlebody(&single(knot("K0", -3, -2, 1))));
        assert!(!is_stein_handlebody(&single(knot("K0", 0, -1, 0))));
        assert!(is_stein_handlebody(&Handlebody::empty()));
        assert!(is_good_stein(&single(knot("K0", -3, -2, 1))));
        assert!(!is_good_stein(&single(knot("K0", 0, -1, 0))));

        let mut over = single(knot("K0", -3, -2, 1));
        over.one_handles = 1;
        over.handles[0].run_over = vec![2];
        over.handles[0].genus = None;
        assert!(is_stein_handlebody(&over));
        assert!(!is_good_stein(&over));
    }

    #[test]
    fn pairing_is_linear() {
        let h = single(knot("K0", 4, 5, 5));
        let none = SteinStructureChoice::default();
        assert_eq!(c1_pairing(&h, &none, &ClassVector::from(vec![3])).unwrap(), 15);
        assert_eq!(c1_pairing(&h, &none, &ClassVector::from(vec![0])).unwrap(), 0);
    }

    #[test]
    fn incomplete_choice_rejected() {
        let h = single(knot("d", 0, 2, 0));
        let none = SteinStructureChoice::default();
        assert!(matches!(
            c1_pairing(&h, &none, &ClassVector::from(vec![1])),
            Err(Error::IncompleteChoice(_))
        ));
        let c = canonical_choice(&h);
        assert_eq!(c1_pairing(&h, &c, &ClassVector::from(vec![1])).unwrap(), -1);
    }

    #[test]
    fn adjunction_examples() {
        assert!(!adjunction_check(0, 0, 0));
        assert!(adjunction_check(-3, 1, 0));
        assert!(adjunction_check(-3, 3, 1));
    }

    #[test]
    fn obstruction_examples() {
        let u0 = single(knot("K0", 0, -1, 0));
        let w = GenusWitness {
            class: ClassVector::from(vec![1]),
            genus: 0,
            provenance: WitnessProvenance::Input,
        };
        let ob = stein_obstruction(&u0, &[w.clone()]).unwrap().unwrap();
        assert!(ob.any_orientation);
        assert_eq!(ob.square, 0);

        let um3 = single(knot("K0", -3, -2, 1));
        assert!(stein_obstruction(&um3, &[w.clone()]).unwrap().is_none());

        let u1 = single(knot("K0", 1, -1, 0));
        let ob = stein_obstruction(&u1, &[w]).unwrap().unwrap();
        assert!(ob.any_orientation);
        let u2 = single(knot("K0", 2, -1, 0));
        let w = GenusWitness {
            class: ClassVector::from(vec![1]),
            genus: 0,
            provenance: WitnessProvenance::Input,
        };
        assert!(!stein_obstruction(&u2, &[w]).unwrap().unwrap().any_orientation);
    }

    #[test]
    fn c1_squared_examples() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(c1_squared_b2one(3, -3).unwrap(), q(-3, 1));
        assert_eq!(c1_squared_b2one(0, 5).unwrap(), q(0, 1));
        assert_eq!(c1_squared_b2one(5, -3).unwrap(), q(-25, 3));
        assert!(c1_squared_b2one(5, 0).is_err());
    }

    #[test]
    fn contact_invariant_serializes_as_strings() {
        let ci = ContactInvariant {
            d3: BigRational::new(BigInt::from(-7), BigInt::from(3)),
            c1_squared: BigRational::new(BigInt::from(-25), BigInt::from(3)),
            euler: 2,
            signature: -1,
        };
        let s = serde_json::to_string(&ci).unwrap();
        assert_eq!(s, r#"{"d3":"-7/3","c1_squared":"-25/3","euler":2,"signature":-1}"#);
        let back: ContactInvariant = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ci);
    }
}
