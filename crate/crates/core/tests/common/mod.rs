#![allow(dead_code)]

use cork_forge_core::algebra::{Handlebody, Role, TwoHandle};
use rand::Rng;

pub fn handle(id: &str, role: Role, framing: i64, tb: i64, rot: i64, run_over: Vec<i64>, genus: Option<u32>) -> TwoHandle {
    TwoHandle {
        id: id.into(),
        role,
        framing,
        tb: Some(tb),
        rot: Some(rot),
        run_over,
        genus,
    }
}

/// Smallest genus admissible for (tb, rot): tb + |rot| <= 2g - 1.
pub fn min_genus(tb: i64, rot: i64) -> u32 {
    let need = tb + rot.abs() + 1;
    if need <= 0 {
        0
    } else {
        ((need + 1) / 2) as u32
    }
}

fn symmetric_linking<R: Rng>(rng: &mut R, framings: &[i64], bound: i64) -> Vec<Vec<i64>> {
    let c = framings.len();
    let mut q = vec![vec![0; c]; c];
    for i in 0..c {
        q[i][i] = framings[i];
        for j in (i + 1)..c {
            let x = rng.gen_range(-bound..=bound);
            q[i][j] = x;
            q[j][i] = x;
        }
    }
    q
}

/// Any valid handlebody with Legendrian data on every handle.
pub fn random_handlebody<R: Rng>(rng: &mut R, max_s: usize, max_c: usize, bound: i64) -> Handlebody {
    let s = rng.gen_range(0..=max_s);
    let c = rng.gen_range(1..=max_c);
    let mut handles = Vec::with_capacity(c);
    let mut framings = Vec::with_capacity(c);
    for j in 0..c {
        let run_over: Vec<i64> = if rng.gen_bool(0.4) {
            vec![0; s]
        } else {
            (0..s).map(|_| rng.gen_range(-bound..=bound)).collect()
        };
        let framing = rng.gen_range(-bound..=bound);
        let tb = rng.gen_range(-bound..=bound);
        let rot = rng.gen_range(-bound..=bound);
        let genus = run_over
            .iter()
            .all(|x| *x == 0)
            .then(|| min_genus(tb, rot) + rng.gen_range(0..2));
        framings.push(framing);
        handles.push(handle(&format!("H{j}"), Role::Extra, framing, tb, rot, run_over, genus));
    }
    let linking = symmetric_linking(rng, &framings, bound);
    Handlebody {
        one_handles: s,
        handles,
        linking,
    }
}

/// A Step-1 input: `k + 1` basis handles avoiding the 1-handles, plus extra
/// handles whose boundary vectors are independent, so b2 = k + 1. With
/// `stein` every framing is tb - 1.
pub fn random_step1<R: Rng>(rng: &mut R, k: usize, stein: bool) -> Handlebody {
    let s = rng.gen_range(0..=3usize);
    let extras = rng.gen_range(0..=s);
    let mut handles = Vec::new();
    let mut framings = Vec::new();
    for j in 0..=k {
        let tb = rng.gen_range(-6..=3);
        let mut rot = rng.gen_range(-4..=4);
        if (tb + rot) % 2 == 0 {
            rot += 1;
        }
        let framing = if stein { tb - 1 } else { rng.gen_range(-4..=4) };
        let genus = min_genus(tb, rot) + rng.gen_range(0..2);
        framings.push(framing);
        handles.push(handle(&format!("K{j}"), Role::Basis, framing, tb, rot, vec![0; s], Some(genus)));
    }
    for e in 0..extras {
        let mut run_over = vec![0; s];
        run_over[e] = if rng.gen_bool(0.5) { 1 } else { -2 };
        for x in run_over.iter_mut().skip(e + 1) {
            *x = rng.gen_range(-2..=2);
        }
        let tb = rng.gen_range(-4..=2);
        let rot = rng.gen_range(-3..=3);
        let framing = if stein { tb - 1 } else { rng.gen_range(-4..=4) };
        framings.push(framing);
        handles.push(handle(&format!("E{e}"), Role::Extra, framing, tb, rot, run_over, None));
    }
    let linking = symmetric_linking(rng, &framings, 3);
    Handlebody {
        one_handles: s,
        handles,
        linking,
    }
}
