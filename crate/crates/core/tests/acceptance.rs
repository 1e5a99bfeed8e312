//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use cork_forge_core::algebra::{homology, profiles_equal};
use cork_forge_core::certify::{
    adjunction_sweep, certify_family, d3_family, verify_certificate, verify_nonstein,
};
use cork_forge_core::legendrian::{
    adjunction_check, apply_choice, c1_pairing, canonical_choice, is_stein_handlebody,
    pending_finishes, realized_max_pairing, zigzag, SteinStructureChoice,
};
use cork_forge_core::modifications::{boundary_sum, w_minus, w_plus, Marked};
use cork_forge_core::pipeline::{
    example_u, extract_default, family_for, solve_p, solve_q, stein_nonstein_family, Family,
    Variant,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    for m in -6..=4 {
        let data = extract_default(&example_u(m)).map_err(err)?;
        let q = solve_q(&data);
        let p = solve_p(&data, &q, 5, Variant::Standard).map_err(err)?;
        let p1 = if m <= -2 { 1 } else { m + 2 };
        let expected: Vec<i64> = [0, 0].into_iter().chain((1..=5).map(|i| p1 + i - 1)).collect();
        ensure(p == expected, || format!("U({m}): got {p:?}, expected {expected:?}"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let f = family_for(&example_u(-3), 3, Variant::Standard).map_err(err)?;
    let report = d3_family(&f).map_err(err)?;
    // (M^2 / -3 - 2e - 3 sigma) / 4 with e = 2, sigma = -1, M_i = 2i + 1.
    let oracle: Vec<BigRational> = (1..=3i64)
        .map(|i| {
            let m = BigInt::from(2 * i + 1);
            let c1 = BigRational::new(&m * &m, BigInt::from(-3));
            (c1 - BigRational::from_integer(BigInt::from(1))) / BigRational::from_integer(BigInt::from(4))
        })
        .collect();
    let got: Vec<BigRational> = report.values.values().cloned().collect();
    ensure(got == oracle, || format!("got {got:?}"))?;
    let text: Vec<String> = got.iter().map(|x| x.to_string()).collect();
    ensure(text == ["-1", "-7/3", "-13/3"], || format!("got {text:?}"))?;
    ensure(report.all_distinct, || "all_distinct is false".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for case in 0..200 {
        let h = common::random_handlebody(&mut rng, 4, 6, 5);
        let before = homology(&h).map_err(err)?;
        let mut m = Marked::from_input(h);
        for _ in 0..rng.gen_range(1..=5) {
            let c = m.handlebody.handle_count();
            let target = m.handlebody.handles[rng.gen_range(0..c)].id.clone();
            let p = rng.gen_range(1..=5);
            m = if rng.gen_bool(0.5) {
                w_plus(&m, &target, p)
            } else {
                w_minus(&m, &target, p)
            }
            .map_err(err)?
            .0;
        }
        let after = homology(&m.handlebody).map_err(err)?;
        ensure(profiles_equal(&before, &after), || format!("case {case} changed homology"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let k = common::handle("K", cork_forge_core::algebra::Role::Basis, -3, -2, 1, vec![], None);
    for t in 0..=10u64 {
        for d in 0..=t {
            let z = zigzag(&k, t, d).map_err(err)?;
            ensure(z.tb == Some(-2 - t as i64), || format!("tb wrong at t={t} d={d}"))?;
            ensure(
                z.rot == Some(1 + 2 * d as i64 - t as i64),
                || format!("rot wrong at t={t} d={d}"),
            )?;
            for t2 in 0..=(10 - t) {
                for d2 in 0..=t2 {
                    let twice = zigzag(&z, t2, d2).map_err(err)?;
                    let once = zigzag(&k, t + t2, d + d2).map_err(err)?;
                    ensure(twice == once, || format!("composition fails at {t},{d},{t2},{d2}"))?;
                }
            }
        }
        ensure(zigzag(&k, t, t + 1).is_err(), || format!("d > t accepted at t={t}"))?;
    }
    Ok(())
}

fn every_choice(h: &cork_forge_core::algebra::Handlebody) -> Vec<SteinStructureChoice> {
    let pending = pending_finishes(h);
    (0u32..(1 << pending.len()))
        .map(|mask| SteinStructureChoice {
            delta_signs: pending
                .iter()
                .enumerate()
                .map(|(b, id)| (id.clone(), if mask >> b & 1 == 1 { 1 } else { -1 }))
                .collect(),
            rot_flips: Default::default(),
        })
        .collect()
}

fn framing_is_tb_minus_one(h: &cork_forge_core::algebra::Handlebody) -> bool {
    h.handles.iter().all(|k| k.tb == Some(k.framing + 1))
}

fn criterion_5() -> Outcome {
    for m in [-3, 0] {
        let f = family_for(&example_u(m), 4, Variant::Standard).map_err(err)?;
        for i in 1..=4 {
            let member = f.member(i).ok_or("missing member")?;
            for choice in every_choice(&member.handlebody) {
                let h = apply_choice(&member.handlebody, &choice).map_err(err)?;
                ensure(framing_is_tb_minus_one(&h), || format!("U({m}) X_{i} not Stein"))?;
            }
        }
        if m == -3 {
            let x0 = &f.member(0).ok_or("missing X_0")?.handlebody;
            let h = apply_choice(x0, &canonical_choice(x0)).map_err(err)?;
            ensure(framing_is_tb_minus_one(&h), || "U(-3) X_0 not Stein".into())?;
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let u0 = family_for(&example_u(0), 4, Variant::Standard).map_err(err)?;
    let cert = certify_family(&u0, "U(0)").map_err(err)?;
    verify_certificate(&cert).map_err(err)?;
    let mut pairs = 0;
    for a in 1..cert.indices.len() {
        for b in (a + 1)..cert.indices.len() {
            pairs += cert.distinct[a][b] as usize;
        }
    }
    ensure(pairs == 10, || format!("{pairs} distinct pairs among X_0..X_4"))?;
    let um3 = family_for(&example_u(-3), 2, Variant::Standard).map_err(err)?;
    let cert3 = certify_family(&um3, "U(-3)").map_err(err)?;
    verify_certificate(&cert3).map_err(err)?;

    let mut mutations = 0;
    let mut killed = 0;
    for t in 0..cert.thresholds.len() {
        for c in 0..cert.thresholds[t].checks.len() {
            let mut bad = cert.clone();
            let check = &mut bad.thresholds[t].checks[c];
            std::mem::swap(&mut check.lhs, &mut check.rhs);
            mutations += 1;
            killed += verify_certificate(&bad).is_err() as usize;
        }
    }
    let plan_mutations: [(&Family, Vec<i64>); 7] = [
        (&u0, vec![0, 0, 1, 3, 4, 5]),
        (&u0, vec![0, 0, 2, 2, 4, 5]),
        (&u0, vec![0, 0, 2, 3, 3, 5]),
        (&u0, vec![0, 0, 2, 3, 4, 4]),
        (&um3, vec![0, 0, 0, 2]),
        (&um3, vec![0, 0, 1, 1]),
        (&um3, vec![0, 0, 2, 2]),
    ];
    for (f, p) in plan_mutations {
        let mut g = f.clone();
        g.plan.p = p;
        mutations += 1;
        killed += certify_family(&g, "mutant").is_err() as usize;
    }
    ensure(mutations == 20, || format!("{mutations} mutations generated"))?;
    ensure(killed == mutations, || format!("killed {killed}/{mutations}"))
}

fn criterion_7() -> Outcome {
    let mut inputs = vec![example_u(-3), example_u(0)];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        inputs.push(common::random_step1(&mut rng, 0, true));
    }
    for (idx, h) in inputs.iter().enumerate() {
        let f = family_for(h, 4, Variant::Standard).map_err(err)?;
        let k0 = &h.handles[h.index_of(&f.data.k0).map_err(err)?];
        let (m0, t0, r0) = (k0.framing, k0.tb.ok_or("no tb")?, k0.rot.ok_or("no rot")?);
        for i in 1..=4 {
            let m = f.member(i).ok_or("missing member")?;
            let choice = canonical_choice(&m.handlebody);
            let rot_sum = c1_pairing(&m.handlebody, &choice, &m.classes[0]).map_err(err)?;
            let closed = 2 * f.plan.p_at(i) + (t0 - 1) - m0 + r0.abs();
            ensure(rot_sum.abs() == closed, || {
                format!("input {idx} X_{i}: |pairing| {} vs closed form {closed}", rot_sum.abs())
            })?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let f = stein_nonstein_family(&example_u(-3), 2).map_err(err)?;
    let stein = f.xs.iter().filter(|m| is_stein_handlebody(&m.marked.handlebody)).count();
    ensure(stein == 2, || format!("{stein} Stein members"))?;
    let report = verify_nonstein(&f.xn).map_err(err)?;
    ensure(report.obstructed_count() == 2, || "X^N not obstructed".into())?;
    let target = homology(&boundary_sum(&example_u(-3), &example_u(0))).map_err(err)?;
    ensure(target.intersection_matrix == vec![vec![-3, 0], vec![0, 0]], || {
        format!("form {:?}", target.intersection_matrix)
    })?;
    ensure(target.euler == 3, || format!("euler {}", target.euler))?;
    for m in f.xs.iter().chain(&f.xn) {
        let p = homology(&m.marked.handlebody).map_err(err)?;
        ensure(profiles_equal(&p, &target), || format!("{} profile differs", m.label()))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut families = Vec::new();
    for m in -6..=4 {
        families.push(family_for(&example_u(m), 3, Variant::Standard).map_err(err)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..3 {
        for _ in 0..10 {
            let stein = rng.gen_bool(0.5);
            let h = common::random_step1(&mut rng, k, stein);
            families.push(family_for(&h, 3, Variant::Strengthened).map_err(err)?);
        }
    }
    let mut checked = 0;
    for f in &families {
        for e in adjunction_sweep(f).map_err(err)? {
            ensure(e.ok, || format!("witness {} of X_{} violates adjunction", e.witness, e.member))?;
            checked += 1;
        }
    }
    let nonstein = stein_nonstein_family(&example_u(-3), 2).map_err(err)?;
    for m in &nonstein.xs {
        let h = &m.marked.handlebody;
        for w in &m.marked.witnesses {
            let (pairing, _) = realized_max_pairing(h, &w.class, &[]).map_err(err)?;
            let square = h.square(&w.class).map_err(err)?;
            ensure(adjunction_check(square, pairing, w.genus), || format!("{} witness fails", m.label()))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no witnesses checked".into())?;

    let mut corrupted = families[3].clone();
    let last = corrupted.members.last_mut().ok_or("empty family")?;
    let pos = last
        .witnesses
        .iter()
        .position(|w| w.class == last.classes[0])
        .ok_or("no v_0 witness")?;
    last.witnesses[pos].genus -= 1;
    let flagged = adjunction_sweep(&corrupted).map_err(err)?.iter().any(|e| !e.ok);
    ensure(flagged, || "corrupted witness not flagged".into())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 9] = [
        (1, "U(m) sequence reproduction", criterion_1, Duration::from_secs(1)),
        (2, "d3 family of U(-3)", criterion_2, Duration::from_secs(1)),
        (3, "homology invariance under W-moves", criterion_3, Duration::from_secs(10)),
        (4, "zig-zag table and composition", criterion_4, Duration::from_secs(1)),
        (5, "Stein validity of members", criterion_5, Duration::MAX),
        (6, "certificate acceptance and refusal", criterion_6, Duration::MAX),
        (7, "K_0 rotation pairing identity", criterion_7, Duration::MAX),
        (8, "Stein / non-Stein family", criterion_8, Duration::MAX),
        (9, "adjunction consistency sweep", criterion_9, Duration::MAX),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > limit {
            outcome = Err(format!("took {elapsed:?}, limit {limit:?}"));
        }
        match outcome {
            Ok(()) => println!("criterion {id}: PASS  {name} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL  {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
