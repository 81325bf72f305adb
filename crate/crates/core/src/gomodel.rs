//! Gō-type Cα model of a short helical peptide.
//!
//! The energy of a chain of beads `r_1..r_N` is
//!
//! ```text
//! E = Σ_bonds     k_b1 (d - d0)² + k_b2 (d - d0)⁴
//!   + Σ_angles    k_θ (θ - θ0)²
//!   + Σ_dihedrals A (1 + cos φ) + B (1 + cos 3φ)
//!   + Σ_native    4ε [(σ_ij / r)¹² - (σ_ij / r)⁶]            σ_ij = 2^(-1/6) d_ij
//!   + Σ_nonnative 4ε [(σ0 / r)¹² - (σ0 / r)⁶] + ε   (r < d_cut, else 0)
//! ```
//!
//! with `σ0 = 2^(-1/6) d_cut` and `d_cut` the mean native contact length. Only
//! pairs at least three apart along the chain take part in the pair terms.

use std::sync::Arc;

use crate::objective::{Bounds, Objective, ObjectiveHandle};
use crate::qsampler::RngStream;
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

/// Boltzmann constant in kcal/(mol K).
pub const BOLTZMANN_KCAL: f64 = 0.001_987_204;
pub const TEMPERATURE: f64 = 300.0;
/// Cα–Cα bond length in Å.
pub const BOND_LENGTH: f64 = 3.8;
/// Default native contact cutoff in Å.
pub const CONTACT_CUTOFF: f64 = 7.5;
/// Initial conformations are drawn from `[-BOX_HALF_WIDTH, BOX_HALF_WIDTH]` per coordinate.
pub const BOX_HALF_WIDTH: f64 = 60.0;
/// Minimum sequence separation for pair terms.
pub const MIN_SEPARATION: usize = 3;

const HELIX_RADIUS: f64 = 2.3;
const HELIX_TWIST_DEG: f64 = 100.0;
const HELIX_RISE: f64 = 1.5;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
fn bead(coords: &[f64], i: usize) -> Vec3 {
    [coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]]
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// Angle at `b` formed by `a-b-c`, in radians.
pub fn bond_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let u = sub(a, b);
    let v = sub(c, b);
    norm(cross(u, v)).atan2(dot(u, v))
}

/// Torsion of `a-b-c-d` in `(-π, π]`, zero for the cis arrangement.
pub fn dihedral(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    let b1 = sub(b, a);
    let b2 = sub(c, b);
    let b3 = sub(d, c);
    let n1 = cross(b1, b2);
    let n2 = cross(b2, b3);
    let x = dot(n1, n2);
    let y = dot(cross(n1, n2), b2) / norm(b2);
    y.atan2(x)
}

/// Force-field constants, all derived from ε = k_B T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceField {
    pub epsilon: f64,
    pub bond_length: f64,
    pub k_bond2: f64,
    pub k_bond4: f64,
    pub k_angle: f64,
    pub dihedral_a: f64,
    pub dihedral_b: f64,
}

impl ForceField {
    pub fn at_temperature(temperature: f64) -> Self {
        let eps = BOLTZMANN_KCAL * temperature;
        Self {
            epsilon: eps,
            bond_length: BOND_LENGTH,
            k_bond2: eps,
            k_bond4: 100.0 * eps,
            k_angle: 10.0 * eps,
            dihedral_a: 0.0,
            dihedral_b: 0.2 * eps,
        }
    }
}

impl Default for ForceField {
    fn default() -> Self {
        Self::at_temperature(TEMPERATURE)
    }
}

/// Ideal α-helix Cα trace with consecutive beads exactly [`BOND_LENGTH`] apart.
pub fn build_native_helix(n: usize) -> Result<Vec<Vec3>> {
    if n < 4 {
        return Err(Error::param(
            "n_residues",
            format!("need at least 4 residues, got {n}"),
        ));
    }
    let twist = HELIX_TWIST_DEG.to_radians();
    let raw: Vec<Vec3> = (0..n)
        .map(|i| {
            let a = i as f64 * twist;
            [
                HELIX_RADIUS * a.cos(),
                HELIX_RADIUS * a.sin(),
                i as f64 * HELIX_RISE,
            ]
        })
        .collect();
    let scale = BOND_LENGTH / distance(raw[0], raw[1]);
    Ok(raw
        .into_iter()
        .map(|p| [p[0] * scale, p[1] * scale, p[2] * scale])
        .collect())
}

/// Parses one bead per line, three whitespace-separated coordinates (Å).
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_native_coords(text: &str) -> Result<Vec<Vec3>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Topology(format!(
                "line {}: expected 3 coordinates, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut p = [0.0; 3];
        for (slot, f) in p.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| {
                Error::Topology(format!("line {}: `{f}` is not a number", lineno + 1))
            })?;
        }
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub i: usize,
    pub j: usize,
    /// Native distance d_ij.
    pub distance: f64,
    pub sigma: f64,
}

/// Native reference quantities of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GoTopology {
    native: Vec<Vec3>,
    native_bonds: Vec<f64>,
    native_angles: Vec<f64>,
    contacts: Vec<Contact>,
    non_native: Vec<(usize, usize)>,
    d_cut: f64,
    sigma0: f64,
    ff: ForceField,
}

/// `2^(-1/6)`: places the Lennard-Jones minimum at the reference distance.
fn lj_sigma(r_min: f64) -> f64 {
    r_min * 2f64.powf(-1.0 / 6.0)
}

impl GoTopology {
    pub fn n_residues(&self) -> usize {
        self.native.len()
    }

    pub fn dimension(&self) -> usize {
        3 * self.native.len()
    }

    pub fn native(&self) -> &[Vec3] {
        &self.native
    }

    /// Native coordinates as a flat conformation vector.
    pub fn native_flat(&self) -> Vec<f64> {
        self.native.iter().flatten().copied().collect()
    }

    pub fn native_bonds(&self) -> &[f64] {
        &self.native_bonds
    }

    pub fn native_angles(&self) -> &[f64] {
        &self.native_angles
    }

    pub fn contacts(&self) -> &[Contact] {
        &self.contacts
    }

    pub fn non_native_pairs(&self) -> &[(usize, usize)] {
        &self.non_native
    }

    pub fn d_cut(&self) -> f64 {
        self.d_cut
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn force_field(&self) -> &ForceField {
        &self.ff
    }
}

/// Derives angles and native contacts (`|i - j| >= 3`, native distance below `contact_cutoff`).
pub fn extract_topology(native: &[Vec3], contact_cutoff: f64) -> Result<GoTopology> {
    extract_topology_with(native, contact_cutoff, ForceField::default())
}

pub fn extract_topology_with(
    native: &[Vec3],
    contact_cutoff: f64,
    ff: ForceField,
) -> Result<GoTopology> {
    let n = native.len();
    if n < 4 {
        return Err(Error::Topology(format!("need at least 4 beads, got {n}")));
    }
    if !(contact_cutoff > 0.0) {
        return Err(Error::param(
            "contact_cutoff",
            format!("{contact_cutoff} must be positive"),
        ));
    }
    let native_bonds: Vec<f64> = native.windows(2).map(|w| distance(w[0], w[1])).collect();
    let native_angles: Vec<f64> = native
        .windows(3)
        .map(|w| bond_angle(w[0], w[1], w[2]))
        .collect();
    let mut contacts = Vec::new();
    let mut non_native = Vec::new();
    for i in 0..n {
        for j in i + MIN_SEPARATION..n {
            let d = distance(native[i], native[j]);
            if d < contact_cutoff {
                contacts.push(Contact {
                    i,
                    j,
                    distance: d,
                    sigma: lj_sigma(d),
                });
            } else {
                non_native.push((i, j));
            }
        }
    }
    if contacts.is_empty() {
        return Err(Error::Topology(format!(
            "no native contacts below {contact_cutoff} Å"
        )));
    }
    let d_cut = contacts.iter().map(|c| c.distance).sum::<f64>() / contacts.len() as f64;
    Ok(GoTopology {
        native: native.to_vec(),
        native_bonds,
        native_angles,
        contacts,
        non_native,
        d_cut,
        sigma0: lj_sigma(d_cut),
        ff,
    })
}

/// Energy split by term (kcal/mol).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyTerms {
    pub bond: f64,
    pub angle: f64,
    pub dihedral: f64,
    pub native: f64,
    pub non_native: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.bond + self.angle + self.dihedral + self.native + self.non_native
    }
}

#[inline]
fn lj(eps: f64, sigma: f64, r: f64) -> f64 {
    let s6 = (sigma / r).powi(6);
    4.0 * eps * (s6 * s6 - s6)
}

/// Truncated and shifted repulsion for non-native pairs.
pub fn non_native_pair(eps: f64, sigma0: f64, d_cut: f64, r: f64) -> f64 {
    if r < d_cut {
        lj(eps, sigma0, r) + eps
    } else {
        0.0
    }
}

fn check_conformation(coords: &[f64], top: &GoTopology) -> Result<()> {
    if coords.len() != top.dimension() {
        return Err(Error::DimensionMismatch {
            expected: top.dimension(),
            got: coords.len(),
        });
    }
    Ok(())
}

pub fn energy_terms(coords: &[f64], top: &GoTopology) -> Result<EnergyTerms> {
    check_conformation(coords, top)?;
    let n = top.n_residues();
    let ff = &top.ff;
    let mut e = EnergyTerms::default();

    for i in 0..n - 1 {
        let d = distance(bead(coords, i), bead(coords, i + 1));
        if d == 0.0 {
            return Err(Error::Singular { i, j: i + 1 });
        }
        let x = d - ff.bond_length;
        let x2 = x * x;
        e.bond += ff.k_bond2 * x2 + ff.k_bond4 * x2 * x2;
    }
    for i in 0..n - 2 {
        let th = bond_angle(bead(coords, i), bead(coords, i + 1), bead(coords, i + 2));
        let x = th - top.native_angles[i];
        e.angle += ff.k_angle * x * x;
    }
    for i in 0..n - 3 {
        let phi = dihedral(
            bead(coords, i),
            bead(coords, i + 1),
            bead(coords, i + 2),
            bead(coords, i + 3),
        );
        e.dihedral += ff.dihedral_a * (1.0 + phi.cos()) + ff.dihedral_b * (1.0 + (3.0 * phi).cos());
    }
    for c in &top.contacts {
        let r = distance(bead(coords, c.i), bead(coords, c.j));
        if r == 0.0 {
            return Err(Error::Singular { i: c.i, j: c.j });
        }
        e.native += lj(ff.epsilon, c.sigma, r);
    }
    for &(i, j) in &top.non_native {
        let r = distance(bead(coords, i), bead(coords, j));
        if r == 0.0 {
            return Err(Error::Singular { i, j });
        }
        e.non_native += non_native_pair(ff.epsilon, top.sigma0, top.d_cut, r);
    }
    Ok(e)
}

/// Total energy of a flat conformation vector (kcal/mol).
pub fn go_energy(coords: &[f64], top: &GoTopology) -> Result<f64> {
    energy_terms(coords, top).map(|e| e.total())
}

/// Root mean square bead displacement from `reference`, without superposition.
pub fn rmsd(coords: &[f64], reference: &[Vec3]) -> Result<f64> {
    if coords.len() != 3 * reference.len() {
        return Err(Error::DimensionMismatch {
            expected: 3 * reference.len(),
            got: coords.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference structure"));
    }
    let sum: f64 = reference
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let d = sub(bead(coords, i), r);
            dot(d, d)
        })
        .sum();
    Ok((sum / reference.len() as f64).sqrt())
}

/// `n_particles` conformations with every coordinate uniform in the initial box.
pub fn init_box_conformations(
    n_particles: usize,
    n_residues: usize,
    rng: &mut RngStream,
) -> Vec<Vec<f64>> {
    (0..n_particles)
        .map(|_| {
            (0..3 * n_residues)
                .map(|_| rng.uniform_in(-BOX_HALF_WIDTH, BOX_HALF_WIDTH))
                .collect()
        })
        .collect()
}

/// The Gō energy as an optimization objective.
///
/// Conformations with coincident beads are scored `+∞`, the limit of the
/// pair repulsion, so that a swarm pushed onto the box faces keeps running.
#[derive(Debug, Clone)]
pub struct GoObjective {
    name: String,
    topology: Arc<GoTopology>,
}

impl GoObjective {
    pub fn new(topology: Arc<GoTopology>) -> Self {
        Self {
            name: format!("go{}", topology.n_residues()),
            topology,
        }
    }

    pub fn topology(&self) -> &Arc<GoTopology> {
        &self.topology
    }

    /// Handle over the initial box, with no known optimum.
    pub fn handle(self) -> Result<ObjectiveHandle> {
        let d = self.topology.dimension();
        ObjectiveHandle::new(
            Arc::new(self),
            Bounds::cube(d, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)?,
            None,
        )
    }
}

impl Objective for GoObjective {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.topology.dimension()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        match go_energy(x, &self.topology) {
            Err(Error::Singular { .. }) => Ok(f64::INFINITY),
            other => other,
        }
    }
}

/// Topology of the 12-residue helix with the default contact cutoff.
pub fn dodecamer_topology() -> Result<GoTopology> {
    extract_topology(&build_native_helix(12)?, CONTACT_CUTOFF)
}
