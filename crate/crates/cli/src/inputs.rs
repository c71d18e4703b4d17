//! Parsing of group names, elements and input files.

use std::path::Path;

use fglab::cocycle::{ModelFile, OrbitModel, OrbitPoint, PiecewiseElement, PiecewiseFile};
use fglab::coloring::{ColoredBall, ColoringFile};
use fglab::group::GroupSpec;
use fglab::{Error, Group, GroupElement, Result, VirtZData};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::manifest::RunManifest;

/// `z<d>`, `Z^<d>`, `f<k>`, `F_<k>`, `dinf`, `z2z` (the integers over
/// their even subgroup), or a path to a JSON group spec.
pub fn parse_group(s: &str, manifest: &mut RunManifest) -> Result<Group> {
    let lower = s.to_ascii_lowercase();
    let number = |rest: &str| rest.parse::<usize>().ok().filter(|&n| n >= 1);
    if let Some(d) = lower.strip_prefix("z^").or(lower.strip_prefix('z')).and_then(number) {
        return Ok(Group::zd(d));
    }
    if let Some(k) = lower.strip_prefix("f_").or(lower.strip_prefix('f')).and_then(number) {
        return Ok(Group::free(k));
    }
    match lower.as_str() {
        "dinf" => return Ok(Group::virtz(VirtZData::infinite_dihedral())),
        "z2z" => return Ok(Group::virtz(VirtZData::integers_over_even())),
        _ => {}
    }
    if Path::new(s).exists() {
        let spec: GroupSpec = read_json(s, "group", manifest)?;
        return Group::from_spec(&spec);
    }
    Err(Error::Parse(format!("unknown group {s:?}")))
}

/// A JSON element (`[2,0]` in `Z^2`, `[a,x]` in a virtz group) or, in a free
/// group, a word such as `aB`.
pub fn parse_element(group: &Group, s: &str) -> Result<GroupElement> {
    if matches!(group, Group::Free { .. }) {
        return group.parse_free_word(s.trim_matches('"'));
    }
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("element {s:?}: {e}")))?;
    group.element_from_json(&v)
}

/// An orbit model from a file, or a built-in virtz group with trivial
/// stabilizer.
pub fn load_model(s: &str, manifest: &mut RunManifest) -> Result<OrbitModel> {
    if Path::new(s).exists() {
        let file: ModelFile = read_json(s, "model", manifest)?;
        return OrbitModel::from_file(&file);
    }
    let group = parse_group(s, manifest)?;
    let data = group
        .virtz_data()
        .ok_or_else(|| Error::Parse(format!("{s} is not a virtually-Z group")))?
        .clone();
    OrbitModel::new(data, &[])
}

pub fn load_element(model: &OrbitModel, path: &str, manifest: &mut RunManifest) -> Result<PiecewiseElement> {
    let file: PiecewiseFile = read_json(path, "element", manifest)?;
    PiecewiseElement::from_file(model, &file)
}

pub fn load_coloring(path: &str, manifest: &mut RunManifest) -> Result<ColoredBall> {
    let file: ColoringFile = read_json(path, "coloring", manifest)?;
    ColoredBall::from_file(&file)
}

/// `k,line` with a 1-based line.
pub fn parse_point(s: &str) -> Result<OrbitPoint> {
    let bad = || Error::Parse(format!("point {s:?} is not k,line"));
    let (k, line) = s.split_once(',').ok_or_else(bad)?;
    let k: i64 = k.trim().parse().map_err(|_| bad())?;
    let line: usize = line.trim().trim_start_matches("line").parse().map_err(|_| bad())?;
    if line == 0 {
        return Err(bad());
    }
    Ok(OrbitPoint::new(k, line - 1))
}

/// `r',r` pairs separated by `;`, e.g. `3,7;9,20`.
pub fn parse_ranges(s: &str) -> Result<Vec<(u32, u32)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::Parse(format!("range {p:?} is not r',r"));
            let (a, b) = p.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Reads `path`, records its digest, and decodes either a bare payload or
/// an artifact envelope holding the payload under `key`.
pub fn read_json<T: DeserializeOwned>(path: &str, key: &str, manifest: &mut RunManifest) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    manifest.record_input(path, &bytes);
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let payload = match value {
        Value::Object(mut map) if map.contains_key("manifest") && map.contains_key(key) => map.remove(key).unwrap(),
        other => other,
    };
    serde_json::from_value(payload).map_err(|e| Error::Parse(format!("{path}: {e}")))
}
