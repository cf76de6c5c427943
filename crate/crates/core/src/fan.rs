//! Complete regular simplicial fans in `Z^3`.
//!
//! A fan is a list of primitive rays and a list of maximal cones, each cone a
//! triple of ray indices. Fans are immutable; subdivision returns a new fan.
//!
//! For a cone with generator rows `V`, the standard affine coordinates on its
//! chart are `x_j = prod_i x_i^{r_ij}` with `R = V^-1`, and the coordinate
//! weight matrix is `S = -2 R`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = [i64; 3];
pub type Mat3 = [[i64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fan file could not be read: {0}")]
    Io(String),
    #[error("fan file is malformed: {0}")]
    Parse(String),
    #[error("cone {cone}: {detail}")]
    Structure { cone: usize, detail: String },
    #[error("cone {0} is not unimodular (det = {1})")]
    NotUnimodular(usize, i64),
    #[error("cone {0} has no opposite cone")]
    UnpairedCone(usize),
    #[error("cone index {0} is out of range")]
    NoSuchCone(usize),
    #[error("orbit index {index} is out of range ({count} orbits)")]
    NoSuchOrbit { index: usize, count: usize },
    #[error("ray {0:?} is already present")]
    RayExists(Vec3),
    #[error("fan fails validation: {0}")]
    Invalid(String),
    #[error("orientation criterion fails: {0}")]
    Orientation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    rays: Vec<Vec3>,
    cones: Vec<[usize; 3]>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Fan {
    rays: Vec<Vec3>,
    cones: Vec<[usize; 3]>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fan({} rays, {} cones)", self.rays.len(), self.cones.len())
    }
}

pub fn det(m: &Mat3) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Exact inverse of a unimodular integer matrix via the adjugate.
pub fn unimodular_inverse(m: &Mat3) -> Option<Mat3> {
    let d = det(m);
    if d.abs() != 1 {
        return None;
    }
    let mut inv = [[0i64; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            // Cofactor of m[j][i].
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *entry = sign * minor * d;
        }
    }
    Some(inv)
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn neg(v: &Vec3) -> Vec3 {
    [-v[0], -v[1], -v[2]]
}

fn is_primitive(v: &Vec3) -> bool {
    v[0].gcd(&v[1]).gcd(&v[2]) == 1
}

fn sorted3(mut c: [usize; 3]) -> [usize; 3] {
    c.sort_unstable();
    c
}

impl Fan {
    /// Builds a fan, checking only that cones reference three distinct,
    /// existing rays. Geometric axioms are checked by [`validate_fan`].
    pub fn new(rays: Vec<Vec3>, cones: Vec<[usize; 3]>) -> Result<Self, FanError> {
        for (i, c) in cones.iter().enumerate() {
            if let Some(&bad) = c.iter().find(|&&r| r >= rays.len()) {
                return Err(FanError::Structure {
                    cone: i,
                    detail: format!("ray index {bad} out of range ({} rays)", rays.len()),
                });
            }
            if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
                return Err(FanError::Structure {
                    cone: i,
                    detail: format!("repeated ray index in {c:?}"),
                });
            }
        }
        Ok(Fan { rays, cones })
    }

    pub fn from_json(text: &str) -> Result<Self, FanError> {
        let file: FanFile = serde_json::from_str(text).map_err(|e| FanError::Parse(e.to_string()))?;
        Fan::new(file.rays, file.cones)
    }

    pub fn from_path(path: &Path) -> Result<Self, FanError> {
        let text = std::fs::read_to_string(path).map_err(|e| FanError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            FanError::Parse(msg) => FanError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// JSON text with one ray or cone per line; order is preserved.
    pub fn to_json(&self) -> String {
        let rays: Vec<String> = self
            .rays
            .iter()
            .map(|r| format!("    [{}, {}, {}]", r[0], r[1], r[2]))
            .collect();
        let cones: Vec<String> = self
            .cones
            .iter()
            .map(|c| format!("    [{}, {}, {}]", c[0], c[1], c[2]))
            .collect();
        format!(
            "{{\n  \"rays\": [\n{}\n  ],\n  \"cones\": [\n{}\n  ]\n}}\n",
            rays.join(",\n"),
            cones.join(",\n")
        )
    }

    pub fn rays(&self) -> &[Vec3] {
        &self.rays
    }

    pub fn cones(&self) -> &[[usize; 3]] {
        &self.cones
    }

    /// Rows are the cone's generators in the file's order.
    pub fn generator_matrix(&self, cone: usize) -> Mat3 {
        let c = self.cones[cone];
        [self.rays[c[0]], self.rays[c[1]], self.rays[c[2]]]
    }

    fn ray_index(&self) -> HashMap<Vec3, usize> {
        self.rays.iter().enumerate().map(|(i, r)| (*r, i)).collect()
    }

    /// Index of the cone spanned by the negated generators of `cone`.
    pub fn opposite_cone(&self, cone: usize) -> Option<usize> {
        let index = self.ray_index();
        let key = {
            let mut k = [0usize; 3];
            for (slot, &r) in k.iter_mut().zip(&self.cones[cone]) {
                *slot = *index.get(&neg(&self.rays[r]))?;
            }
            sorted3(k)
        };
        self.cones.iter().position(|c| sorted3(*c) == key)
    }

    /// The octant fan of `(P^1)^3`. Octant `(a1, a2, a3)` is
    /// `{ (-1)^{a_j} n_j >= 0 }` and sits at index `4 a1 + 2 a2 + a3`.
    pub fn octants() -> Fan {
        let rays = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]];
        let cones = (0..8)
            .map(|bits: usize| {
                let a = [(bits >> 2) & 1, (bits >> 1) & 1, bits & 1];
                [a[0] * 3, 1 + a[1] * 3, 2 + a[2] * 3]
            })
            .collect();
        Fan { rays, cones }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn result(name: &'static str, failure: Option<String>) -> CheckResult {
    CheckResult {
        name,
        passed: failure.is_none(),
        detail: failure,
    }
}

pub const CHECK_PRIMITIVE: &str = "primitive_rays";
pub const CHECK_REGULAR: &str = "regular_cones";
pub const CHECK_FACES: &str = "face_pairing";
pub const CHECK_EULER: &str = "euler_count";
pub const CHECK_SYMMETRY: &str = "central_symmetry";

/// Runs every fan check and reports each outcome.
///
/// Completeness is certified combinatorially: regular cones whose 2-faces are
/// each shared by exactly two cones lying on opposite sides, with
/// `#rays - #faces + #cones = 2`, triangulate the sphere.
pub fn validate_fan(f: &Fan) -> ValidationReport {
    let mut checks = Vec::new();

    let primitive = {
        let mut seen = HashSet::new();
        f.rays.iter().enumerate().find_map(|(i, r)| {
            if *r == [0, 0, 0] {
                Some(format!("ray {i} is zero"))
            } else if !is_primitive(r) {
                Some(format!("ray {i} {r:?} is not primitive"))
            } else if !seen.insert(*r) {
                Some(format!("ray {i} {r:?} is repeated"))
            } else {
                None
            }
        })
    };
    checks.push(result(CHECK_PRIMITIVE, primitive));

    let regular = {
        let mut seen = HashSet::new();
        (0..f.cones.len()).find_map(|i| {
            let d = det(&f.generator_matrix(i));
            if d.abs() != 1 {
                Some(format!("cone {i} has det {d}"))
            } else if !seen.insert(sorted3(f.cones[i])) {
                Some(format!("cone {i} is repeated"))
            } else {
                None
            }
        })
    };
    checks.push(result(CHECK_REGULAR, regular));

    // 2-face -> list of (cone, opposite ray)
    let mut faces: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (i, c) in f.cones.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (c[(k + 1) % 3], c[(k + 2) % 3]);
            faces.entry((a.min(b), a.max(b))).or_default().push((i, c[k]));
        }
    }
    let pairing = faces.iter().find_map(|(&(a, b), users)| {
        if users.len() != 2 {
            return Some(format!("face ({a}, {b}) lies in {} cone(s), expected 2", users.len()));
        }
        let side = |r: usize| det(&[f.rays[a], f.rays[b], f.rays[r]]).signum();
        if side(users[0].1) == side(users[1].1) {
            return Some(format!(
                "cones {} and {} lie on the same side of face ({a}, {b})",
                users[0].0, users[1].0
            ));
        }
        None
    });
    checks.push(result(CHECK_FACES, pairing));

    let euler = f.rays.len() as i64 - faces.len() as i64 + f.cones.len() as i64;
    checks.push(result(
        CHECK_EULER,
        (euler != 2).then(|| format!("#rays - #faces + #cones = {euler}, expected 2")),
    ));

    let symmetry = {
        let index = f.ray_index();
        f.rays
            .iter()
            .enumerate()
            .find_map(|(i, r)| (!index.contains_key(&neg(r))).then(|| format!("ray {i} {r:?} has no opposite ray")))
            .or_else(|| {
                (0..f.cones.len()).find_map(|i| {
                    f.opposite_cone(i)
                        .is_none()
                        .then(|| format!("cone {i} has no opposite cone"))
                })
            })
    };
    checks.push(result(CHECK_SYMMETRY, symmetry));

    ValidationReport { checks }
}

/// Per-cone coordinate data. Generators are ordered by ray index, so the
/// positive octant `(e1, e2, e3)` gets `R = I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeFrame {
    pub cone: usize,
    /// Ray indices in the order used for the rows of `generators`.
    pub rays: [usize; 3],
    pub generators: Mat3,
    /// `generators^-1`
    pub inverse: Mat3,
    pub det_sign: i64,
}

impl ConeFrame {
    pub fn weight_matrix(&self) -> Mat3 {
        self.inverse.map(|row| row.map(|r| -2 * r))
    }
}

pub fn cone_frame(f: &Fan, cone: usize) -> Result<ConeFrame, FanError> {
    let rays = sorted3(*f.cones.get(cone).ok_or(FanError::NoSuchCone(cone))?);
    let generators = [f.rays[rays[0]], f.rays[rays[1]], f.rays[rays[2]]];
    let d = det(&generators);
    let inverse = unimodular_inverse(&generators).ok_or(FanError::NotUnimodular(cone, d))?;
    Ok(ConeFrame {
        cone,
        rays,
        generators,
        inverse,
        det_sign: d,
    })
}

pub fn cone_frames(f: &Fan) -> Result<Vec<ConeFrame>, FanError> {
    (0..f.cones.len()).map(|i| cone_frame(f, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrientationViolation {
    /// The fan itself is not a valid centrally symmetric complete regular fan.
    Precondition { detail: String },
    /// `sum_{i,j} r_ij` is even.
    EvenTotal { cone: usize, total: i64 },
    /// Row `row` sums of the two cones' inverse matrices differ in parity.
    RowParity { cone: usize, other: usize, row: usize },
}

impl fmt::Display for OrientationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrientationViolation::Precondition { detail } => write!(f, "precondition: {detail}"),
            OrientationViolation::EvenTotal { cone, total } => {
                write!(f, "cone {cone}: entry sum of R is {total}, which is even")
            }
            OrientationViolation::RowParity { cone, other, row } => {
                write!(f, "cones {cone} and {other}: row {row} sums of R differ in parity")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientationReport {
    pub passed: bool,
    pub violations: Vec<OrientationViolation>,
}

/// Numeric orientation criterion on the inverse generator matrices:
/// (a) every cone has odd `sum_{i,j} r_ij`;
/// (b) for every pair of cones and every row `i`, `sum_j (r_ij - r'_ij)` is even.
///
/// Both conditions are invariant under reordering a cone's generators.
pub fn orientation_check(f: &Fan) -> OrientationReport {
    let validation = validate_fan(f);
    if !validation.passed() {
        let detail = validation
            .failures()
            .iter()
            .map(|c| format!("{} ({})", c.name, c.detail.as_deref().unwrap_or("failed")))
            .collect::<Vec<_>>()
            .join("; ");
        return OrientationReport {
            passed: false,
            violations: vec![OrientationViolation::Precondition { detail }],
        };
    }
    let frames = cone_frames(f).expect("validated fan is regular");
    let mut violations = Vec::new();
    for fr in &frames {
        let total: i64 = fr.inverse.iter().flatten().sum();
        if total % 2 == 0 {
            violations.push(OrientationViolation::EvenTotal { cone: fr.cone, total });
        }
    }
    // Parity agreement is an equivalence relation, so comparing with the
    // first cone decides every pair.
    let row_parity = |fr: &ConeFrame| fr.inverse.map(|row| row.iter().sum::<i64>().rem_euclid(2));
    if let Some(first) = frames.first() {
        let base = row_parity(first);
        for fr in &frames[1..] {
            let p = row_parity(fr);
            for row in 0..3 {
                if p[row] != base[row] {
                    violations.push(OrientationViolation::RowParity {
                        cone: first.cone,
                        other: fr.cone,
                        row,
                    });
                }
            }
        }
    }
    OrientationReport {
        passed: violations.is_empty(),
        violations,
    }
}

fn require_orientation(f: &Fan) -> Result<(), FanError> {
    let report = orientation_check(f);
    if report.passed {
        Ok(())
    } else {
        Err(FanError::Orientation(report.violations[0].to_string()))
    }
}

/// `S = -2 R` per cone, in cone order.
pub fn weight_matrices(f: &Fan) -> Result<Vec<Mat3>, FanError> {
    require_orientation(f)?;
    let mats: Vec<Mat3> = cone_frames(f)?.iter().map(ConeFrame::weight_matrix).collect();
    for s in &mats {
        for (k, row) in s.iter().enumerate() {
            debug_assert_eq!(row.iter().sum::<i64>() % 2, 0);
            debug_assert_eq!(s.iter().map(|r| r[k]).sum::<i64>() % 2, 0);
        }
        debug_assert_eq!(s.iter().flatten().sum::<i64>().rem_euclid(4), 2);
    }
    Ok(mats)
}

/// One cone from each pair `{k, -k}`, listed in order of the pair's first
/// appearance. Within a pair the cone whose lexicographically sorted
/// generator matrix is smaller is chosen.
pub fn sigma_orbit_representatives(f: &Fan) -> Result<Vec<usize>, FanError> {
    Ok(sigma_orbits(f)?.into_iter().map(|(rep, _)| rep).collect())
}

/// `(representative, partner)` per orbit, same order as
/// [`sigma_orbit_representatives`].
pub fn sigma_orbits(f: &Fan) -> Result<Vec<(usize, usize)>, FanError> {
    let mut seen = vec![false; f.cones.len()];
    let mut out = Vec::new();
    for i in 0..f.cones.len() {
        if seen[i] {
            continue;
        }
        let j = f.opposite_cone(i).ok_or(FanError::UnpairedCone(i))?;
        if j == i {
            return Err(FanError::UnpairedCone(i));
        }
        seen[i] = true;
        seen[j] = true;
        let key = |c: usize| {
            let mut g = f.generator_matrix(c);
            g.sort_unstable();
            g
        };
        out.push(if key(j) < key(i) { (j, i) } else { (i, j) });
    }
    Ok(out)
}

/// Equivariant star subdivision at the pair `{cone, -cone}`: adds the rays
/// `u = v1 + v2 + v3` and `-u`, and splits each of the two cones into three.
///
/// Each split cone keeps its position (as `(v1, v2, u)`); the other two
/// pieces `(v1, u, v3)` and `(u, v2, v3)` are appended.
pub fn star_subdivide(f: &Fan, cone: usize) -> Result<Fan, FanError> {
    if cone >= f.cones.len() {
        return Err(FanError::NoSuchCone(cone));
    }
    let partner = f.opposite_cone(cone).ok_or(FanError::UnpairedCone(cone))?;
    let index = f.ray_index();
    let c = f.cones[cone];
    let u: Vec3 = (0..3)
        .map(|k| c.iter().map(|&r| f.rays[r][k]).sum())
        .collect::<Vec<i64>>()
        .try_into()
        .unwrap();
    for r in [u, neg(&u)] {
        if index.contains_key(&r) {
            return Err(FanError::RayExists(r));
        }
    }
    let mut rays = f.rays.clone();
    let mut cones = f.cones.clone();
    for (target, new_ray) in [(cone, u), (partner, neg(&u))] {
        let ui = rays.len();
        rays.push(new_ray);
        let [a, b, d] = f.cones[target];
        cones[target] = [a, b, ui];
        cones.push([a, ui, d]);
        cones.push([ui, b, d]);
    }
    Fan::new(rays, cones)
}
