//! Versioned file formats: quorum and state JSON, probability and
//! trajectory CSV.
//!
//! Matrices derived from a scheme (kernels, Gram, duals) are never
//! serialized; a quorum file records the scheme only and the rest is
//! rebuilt deterministically on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{EvrepError, Result};
use crate::quorum::{DirectionScheme, Quorum};
use crate::spincore::{HermitianOperator, TwoS};
use crate::tomography::ProbabilityVector;
use crate::C64;

pub const QUORUM_FORMAT_VERSION: &str = "evrep-quorum/1";
pub const STATE_FORMAT_VERSION: &str = "evrep-state/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuorumFile {
    pub version: String,
    pub two_s: u32,
    pub cone_thetas: Vec<f64>,
    pub cone_phi_offsets: Vec<f64>,
    pub directions: Vec<DirectionRecord>,
    pub condition_number: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub version: String,
    pub two_s: u32,
    /// Row-major [re, im] pairs, (2s+1)^2 of them.
    pub matrix: Vec<[f64; 2]>,
}

pub fn quorum_to_file(q: &Quorum) -> QuorumFile {
    QuorumFile {
        version: QUORUM_FORMAT_VERSION.to_string(),
        two_s: q.two_s().get(),
        cone_thetas: q.scheme().cone_thetas().to_vec(),
        cone_phi_offsets: q.scheme().cone_phi_offsets().to_vec(),
        directions: q
            .scheme()
            .directions()
            .iter()
            .map(|d| DirectionRecord {
                theta: d.theta(),
                phi: d.phi(),
            })
            .collect(),
        condition_number: q.condition_number(),
    }
}

pub fn save_quorum(q: &Quorum, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&quorum_to_file(q))
        .map_err(|e| EvrepError::Malformed(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

/// Rebuild the full quorum from a scheme file.
///
/// The stored direction list is cross-checked against the rebuilt
/// scheme; a mismatch means the file was edited inconsistently.
pub fn load_quorum(path: &Path) -> Result<Quorum> {
    let text = fs::read_to_string(path)?;
    let file: QuorumFile =
        serde_json::from_str(&text).map_err(|e| EvrepError::Malformed(e.to_string()))?;
    if file.version != QUORUM_FORMAT_VERSION {
        return Err(EvrepError::Malformed(format!(
            "unsupported quorum format version {:?}",
            file.version
        )));
    }
    let two_s = TwoS::new(file.two_s)?;
    let scheme = DirectionScheme::with_cones(two_s, file.cone_thetas, file.cone_phi_offsets)?;
    if file.directions.len() != scheme.len() {
        return Err(EvrepError::Malformed(format!(
            "expected {} directions, file lists {}",
            scheme.len(),
            file.directions.len()
        )));
    }
    for (i, (rec, dir)) in file.directions.iter().zip(scheme.directions()).enumerate() {
        if (rec.theta - dir.theta()).abs() > 1e-9 || (rec.phi - dir.phi()).abs() > 1e-9 {
            return Err(EvrepError::Malformed(format!(
                "direction {i} inconsistent with the cone parameters"
            )));
        }
    }
    Quorum::build(scheme)
}

pub fn save_state(two_s: TwoS, op: &HermitianOperator, path: &Path) -> Result<()> {
    let d = two_s.dim();
    if op.dim() != d {
        return Err(EvrepError::DimensionMismatch {
            expected: d,
            got: op.dim(),
        });
    }
    let mut matrix = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let v = op.matrix()[(i, j)];
            matrix.push([v.re, v.im]);
        }
    }
    let file = StateFile {
        version: STATE_FORMAT_VERSION.to_string(),
        two_s: two_s.get(),
        matrix,
    };
    let text =
        serde_json::to_string_pretty(&file).map_err(|e| EvrepError::Malformed(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<(TwoS, HermitianOperator)> {
    let text = fs::read_to_string(path)?;
    let file: StateFile =
        serde_json::from_str(&text).map_err(|e| EvrepError::Malformed(e.to_string()))?;
    if file.version != STATE_FORMAT_VERSION {
        return Err(EvrepError::Malformed(format!(
            "unsupported state format version {:?}",
            file.version
        )));
    }
    let two_s = TwoS::new(file.two_s)?;
    let d = two_s.dim();
    if file.matrix.len() != d * d {
        return Err(EvrepError::Malformed(format!(
            "expected {} matrix entries, got {}",
            d * d,
            file.matrix.len()
        )));
    }
    let mat = nalgebra::DMatrix::from_fn(d, d, |i, j| {
        let [re, im] = file.matrix[i * d + j];
        C64::new(re, im)
    });
    Ok((two_s, HermitianOperator::new(mat)?))
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with one row per quorum direction: `n,theta,phi,value`, plus
/// `count,shots` columns for sampled frequencies.
pub fn write_probability_csv(
    scheme: &DirectionScheme,
    p: &ProbabilityVector,
    path: &Path,
) -> Result<()> {
    if p.len() != scheme.len() {
        return Err(EvrepError::DimensionMismatch {
            expected: scheme.len(),
            got: p.len(),
        });
    }
    let mut out = String::new();
    match p.shots() {
        None => out.push_str("n,theta,phi,value\n"),
        Some(_) => out.push_str("n,theta,phi,value,count,shots\n"),
    }
    for (n, (dir, &value)) in scheme.directions().iter().zip(p.values()).enumerate() {
        match p.shots() {
            None => out.push_str(&format!(
                "{n},{},{},{}\n",
                fmt17(dir.theta()),
                fmt17(dir.phi()),
                fmt17(value)
            )),
            Some(shots) => {
                let count = (value * shots as f64).round() as u64;
                out.push_str(&format!(
                    "{n},{},{},{},{count},{shots}\n",
                    fmt17(dir.theta()),
                    fmt17(dir.phi()),
                    fmt17(value)
                ));
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_probability_csv(path: &Path) -> Result<ProbabilityVector> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| EvrepError::Malformed("empty probability file".into()))?;
    let sampled = match header.trim() {
        "n,theta,phi,value" => false,
        "n,theta,phi,value,count,shots" => true,
        other => {
            return Err(EvrepError::Malformed(format!(
                "unexpected probability header {other:?}"
            )))
        }
    };
    let mut values = Vec::new();
    let mut shots: Option<u64> = None;
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if sampled { 6 } else { 4 };
        if fields.len() != expected {
            return Err(EvrepError::Malformed(format!(
                "row {row}: expected {expected} fields, got {}",
                fields.len()
            )));
        }
        let n: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| EvrepError::Malformed(format!("row {row}: bad index")))?;
        if n != row {
            return Err(EvrepError::Malformed(format!(
                "row {row}: out-of-order index {n}"
            )));
        }
        let value: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| EvrepError::Malformed(format!("row {row}: bad value")))?;
        values.push(value);
        if sampled {
            let s: u64 = fields[5]
                .trim()
                .parse()
                .map_err(|_| EvrepError::Malformed(format!("row {row}: bad shot count")))?;
            match shots {
                None => shots = Some(s),
                Some(prev) if prev != s => {
                    return Err(EvrepError::Malformed(
                        "inconsistent shot counts across rows".into(),
                    ))
                }
                _ => {}
            }
        }
    }
    ProbabilityVector::new(values, shots)
}

/// Trajectory CSV: `t,P_0,...,P_{N_s-1}`.
pub fn write_trajectory_csv(rows: &[(f64, Vec<f64>)], path: &Path) -> Result<()> {
    let n = rows
        .first()
        .map(|(_, v)| v.len())
        .ok_or_else(|| EvrepError::InvalidArgument("empty trajectory".into()))?;
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",P_{i}"));
    }
    out.push('\n');
    for (t, values) in rows {
        out.push_str(&fmt17(*t));
        for v in values {
            out.push(',');
            out.push_str(&fmt17(*v));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_density, seeded_rng};
    use crate::tomography::{exact_probabilities, sample_counts};
    use tempfile::tempdir;

    fn quorum(two_s: u32) -> Quorum {
        Quorum::build(DirectionScheme::standard(TwoS::new(two_s).unwrap())).unwrap()
    }

    #[test]
    fn quorum_file_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("q.json");
        let q = quorum(2);
        save_quorum(&q, &path).unwrap();
        let back = load_quorum(&path).unwrap();
        assert_eq!(back.two_s().get(), 2);
        assert!((back.condition_number() - q.condition_number()).abs() < 1e-9);
        assert!((back.gram() - q.gram()).amax() < 1e-15);
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("q.json");
        let q = quorum(1);
        let mut file = quorum_to_file(&q);
        file.version = "evrep-quorum/9".into();
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert!(load_quorum(&path).is_err());
    }

    #[test]
    fn inconsistent_directions_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("q.json");
        let q = quorum(1);
        let mut file = quorum_to_file(&q);
        file.directions[2].theta += 0.5;
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert!(load_quorum(&path).is_err());
    }

    #[test]
    fn state_file_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rho.json");
        let two_s = TwoS::new(3).unwrap();
        let rho = random_density(4, &mut seeded_rng(31));
        save_state(two_s, rho.op(), &path).unwrap();
        let (ts, op) = load_state(&path).unwrap();
        assert_eq!(ts.get(), 3);
        assert!(op.sub(rho.op()).max_norm() < 1e-15);
    }

    #[test]
    fn probability_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let q = quorum(2);
        let rho = random_density(3, &mut seeded_rng(32));
        let p = exact_probabilities(&q, &rho).unwrap();
        write_probability_csv(q.scheme(), &p, &path).unwrap();
        let back = read_probability_csv(&path).unwrap();
        assert!(back.is_exact());
        for (a, b) in back.values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sampled_csv_keeps_counts_and_shots() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let q = quorum(1);
        let rho = random_density(2, &mut seeded_rng(33));
        let p = exact_probabilities(&q, &rho).unwrap();
        let f = sample_counts(&p, 1000, 9).unwrap();
        write_probability_csv(q.scheme(), &f, &path).unwrap();
        let back = read_probability_csv(&path).unwrap();
        assert_eq!(back.shots(), Some(1000));
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "nonsense\n1,2\n").unwrap();
        assert!(read_probability_csv(&path).is_err());
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let rows = vec![(0.0, vec![0.1, 0.9]), (0.5, vec![0.2, 0.8])];
        write_trajectory_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,P_0,P_1");
        assert_eq!(lines.count(), 2);
    }
}
