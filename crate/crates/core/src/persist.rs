//! Family directories: `X_{i}.json`, `log_{i}.json`, `plan.json`,
//! `classes.json` and `witnesses.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::algebra::{ClassVector, GenusWitness, Handlebody};
use crate::error::{Error, Result};
use crate::legendrian::is_stein_handlebody;
use crate::modifications::{replay, ModificationKind, ModificationLog};
use crate::pipeline::{stein_status, Family, Member, SequencePlan};

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

pub fn write_family(dir: &Path, f: &Family) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut classes: BTreeMap<String, &Vec<ClassVector>> = BTreeMap::new();
    let mut witnesses: BTreeMap<String, &Vec<GenusWitness>> = BTreeMap::new();
    for m in &f.members {
        write_json(&dir.join(format!("X_{}.json", m.index)), &m.handlebody)?;
        write_json(&dir.join(format!("log_{}.json", m.index)), &m.log)?;
        classes.insert(m.index.to_string(), &m.classes);
        witnesses.insert(m.index.to_string(), &m.witnesses);
    }
    write_json(&dir.join("plan.json"), &f.plan)?;
    write_json(&dir.join("classes.json"), &classes)?;
    write_json(&dir.join("witnesses.json"), &witnesses)?;
    Ok(())
}

/// Reads a family back. Every log must replay to its stored handlebody;
/// witnesses are taken as stored.
pub fn read_family(dir: &Path) -> Result<Family> {
    let plan: SequencePlan = read_json(&dir.join("plan.json"))?;
    let data = plan
        .data
        .clone()
        .ok_or_else(|| Error::Json("plan.json lacks `data`".into()))?;
    let mut classes: BTreeMap<String, Vec<ClassVector>> = read_json(&dir.join("classes.json"))?;
    let mut witnesses: BTreeMap<String, Vec<GenusWitness>> =
        read_json(&dir.join("witnesses.json"))?;
    let n = plan.n() as i64;
    let mut members = Vec::new();
    let mut input_good_stein = false;
    for i in -1..=n {
        let h: Handlebody = read_json(&dir.join(format!("X_{i}.json")))?;
        let log: ModificationLog = read_json(&dir.join(format!("log_{i}.json")))?;
        let replayed = replay(&log)?;
        if replayed.handlebody != h {
            return Err(Error::Construction(format!(
                "log_{i}.json does not reproduce X_{i}.json"
            )));
        }
        input_good_stein = is_stein_handlebody(&log.base);
        let key = i.to_string();
        let member_classes = classes
            .remove(&key)
            .ok_or_else(|| Error::Json(format!("classes.json lacks member {i}")))?;
        let member_witnesses = witnesses
            .remove(&key)
            .ok_or_else(|| Error::Json(format!("witnesses.json lacks member {i}")))?;
        let flippable = if i >= 0 {
            data.handles[1..=data.k]
                .iter()
                .filter(|hd| {
                    let zigzagged = log
                        .records
                        .iter()
                        .any(|r| r.kind == ModificationKind::Zigzag && r.target == hd.id);
                    let rot = h.handle(&hd.id).ok().and_then(|k| k.rot);
                    zigzagged && rot.is_some_and(|r| r.abs() == 1)
                })
                .map(|hd| hd.id.clone())
                .collect()
        } else {
            Vec::new()
        };
        let stein = stein_status(&h, i >= 1, i >= 1 || input_good_stein)?;
        members.push(Member {
            index: i,
            handlebody: h,
            log,
            classes: member_classes,
            witnesses: member_witnesses,
            tietze: replayed.tietze,
            stein,
            flippable,
        });
    }
    Ok(Family {
        data,
        plan,
        input_good_stein,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{example_u, family_for, Variant};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = family_for(&example_u(-3), 2, Variant::Standard).unwrap();
        write_family(dir.path(), &f).unwrap();
        assert!(dir.path().join("X_-1.json").exists());
        let g = read_family(dir.path()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn tampered_member_detected() {
        let dir = tempfile::tempdir().unwrap();
        let f = family_for(&example_u(0), 1, Variant::Standard).unwrap();
        write_family(dir.path(), &f).unwrap();
        let mut h = f.member(1).unwrap().handlebody.clone();
        h.handles[0].tb = Some(7);
        write_json(&dir.path().join("X_1.json"), &h).unwrap();
        assert!(matches!(read_family(dir.path()), Err(Error::Construction(_))));
    }
}
