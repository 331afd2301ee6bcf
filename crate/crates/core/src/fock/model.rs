use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{dot3, norm3, BoxLattice};

pub const DEFAULT_DIMENSION_CAP: usize = 500_000;

/// Truncated many-body model: `N` bosons hopping on the sites of a small
/// lattice, coupled to a finite set of phonon modes with total occupation at
/// most `Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub sites: BoxLattice,
    pub n_particles: usize,
    /// Retained momenta as integer multiples of `2π/L`. Any nonzero integer
    /// vector is allowed, including ones outside the site lattice's
    /// Brillouin zone. `None` keeps the shell `|label| = 1`.
    #[serde(default)]
    pub modes: Option<Vec<[i64; 3]>>,
    pub phonon_cutoff: usize,
    pub alpha: f64,
    /// Gross cutoff `K`.
    pub cutoff: f64,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

impl ModelSpec {
    /// 3³ sites on `L = 2π`, first momentum shell, `Λ = 2`.
    pub fn desk(n_particles: usize, alpha: f64, cutoff: f64) -> Self {
        Self {
            sites: BoxLattice::new(2.0 * PI, 3, 3).expect("valid desk lattice"),
            n_particles,
            modes: None,
            phonon_cutoff: 2,
            alpha,
            cutoff,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    /// Ring of `sites` points on `L = 2π` with the momentum shells
    /// `±1, …, ±shells`.
    pub fn chain(sites: usize, shells: i64, phonon_cutoff: usize, alpha: f64, cutoff: f64) -> Self {
        let modes = (1..=shells).flat_map(|k| [[k, 0, 0], [-k, 0, 0]]).collect();
        Self {
            sites: BoxLattice::new(2.0 * PI, sites, 1).expect("valid chain lattice"),
            n_particles: 1,
            modes: Some(modes),
            phonon_cutoff,
            alpha,
            cutoff,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn mode_labels(&self) -> Vec<[i64; 3]> {
        match &self.modes {
            Some(m) => m.clone(),
            None => first_shell(self.sites.dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sites.validate()?;
        if self.n_particles == 0 {
            return Err(invalid("n_particles", "must be >= 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if !(self.cutoff > 0.0) {
            return Err(invalid("cutoff", format!("K must be > 0, got {}", self.cutoff)));
        }
        let labels = self.mode_labels();
        for (i, l) in labels.iter().enumerate() {
            if *l == [0, 0, 0] {
                return Err(invalid("modes", "zero mode cannot be retained"));
            }
            if l[self.sites.dim..].iter().any(|&c| c != 0) {
                return Err(invalid("modes", format!("label {l:?} has components beyond dim")));
            }
            if labels[..i].contains(l) {
                return Err(invalid("modes", format!("duplicate label {l:?}")));
            }
        }
        Ok(())
    }

    pub fn dimension_estimate(&self) -> u128 {
        let s = self.sites.len() as u128;
        let m = self.mode_labels().len() as u128;
        binomial(s + self.n_particles as u128 - 1, self.n_particles as u128)
            * binomial(m + self.phonon_cutoff as u128, self.phonon_cutoff as u128)
    }
}

pub fn first_shell(dim: usize) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for axis in 0..dim {
        for sign in [1, -1] {
            let mut l = [0; 3];
            l[axis] = sign;
            out.push(l);
        }
    }
    out
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Retained phonon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub label: [i64; 3],
    pub momentum: [f64; 3],
    pub norm: f64,
}

/// Symmetric `N`-particle configurations (sorted site lists).
#[derive(Debug, Clone)]
pub struct ParticleBasis {
    pub configs: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl ParticleBasis {
    fn build(sites: usize, n: usize) -> Self {
        let mut configs = Vec::new();
        let mut cur = vec![0u16; n];
        loop {
            configs.push(cur.clone());
            // next non-decreasing sequence in lexicographic order
            let mut i = n;
            loop {
                if i == 0 {
                    let index = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
                    return Self { configs, index };
                }
                i -= 1;
                if (cur[i] as usize) + 1 < sites {
                    let v = cur[i] + 1;
                    for c in &mut cur[i..] {
                        *c = v;
                    }
                    break;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn index_of(&self, config: &[u16]) -> Option<usize> {
        self.index.get(config).copied()
    }

    /// Number of particles on `site` in configuration `c`.
    pub fn occupation(&self, c: usize, site: usize) -> usize {
        self.configs[c].iter().filter(|&&s| s as usize == site).count()
    }

    /// Distinct occupied sites with occupation numbers.
    pub fn occupied(&self, c: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &s in &self.configs[c] {
            match out.last_mut() {
                Some((site, n)) if *site == s as usize => *n += 1,
                _ => out.push((s as usize, 1)),
            }
        }
        out
    }

    /// Configuration obtained by moving one particle `from → to`, with the
    /// matrix element `√(n_from (n_to + 1))` of `b†_to b_from` (`from ≠ to`).
    pub fn hop(&self, c: usize, from: usize, to: usize) -> Option<(usize, f64)> {
        let cfg = &self.configs[c];
        let pos = cfg.iter().position(|&s| s as usize == from)?;
        let n_from = self.occupation(c, from);
        let n_to = self.occupation(c, to);
        let mut next = cfg.clone();
        next[pos] = to as u16;
        next.sort_unstable();
        let idx = self.index_of(&next).expect("hop stays inside the basis");
        Some((idx, ((n_from * (n_to + 1)) as f64).sqrt()))
    }
}

/// Phonon occupation vectors with total at most `Λ`, sorted by total then
/// reverse-lexicographically, plus ladder tables.
#[derive(Debug, Clone)]
pub struct PhononBasis {
    pub states: Vec<Vec<u8>>,
    pub cutoff: usize,
    index: HashMap<Vec<u8>, usize>,
    /// `lower[m][p] = (p', √n_m)` for `a_m`.
    lower: Vec<Vec<Option<(usize, f64)>>>,
    /// `raise[m][p] = (p', √(n_m+1))` for `a_m†`, `None` on the top shell.
    raise: Vec<Vec<Option<(usize, f64)>>>,
}

impl PhononBasis {
    fn build(modes: usize, cutoff: usize) -> Self {
        let mut states: Vec<Vec<u8>> = Vec::new();
        for total in 0..=cutoff {
            let mut acc = Vec::new();
            compositions(modes, total, &mut vec![0u8; modes], 0, &mut acc);
            states.extend(acc);
        }
        let index: HashMap<Vec<u8>, usize> = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut lower = vec![vec![None; states.len()]; modes];
        let mut raise = vec![vec![None; states.len()]; modes];
        for (p, s) in states.iter().enumerate() {
            let total: usize = s.iter().map(|&v| v as usize).sum();
            for m in 0..modes {
                if s[m] > 0 {
                    let mut t = s.clone();
                    t[m] -= 1;
                    lower[m][p] = Some((index[&t], (s[m] as f64).sqrt()));
                }
                if total < cutoff {
                    let mut t = s.clone();
                    t[m] += 1;
                    raise[m][p] = Some((index[&t], (s[m] as f64 + 1.0).sqrt()));
                }
            }
        }
        Self {
            states,
            cutoff,
            index,
            lower,
            raise,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.lower.len()
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total(&self, p: usize) -> usize {
        self.states[p].iter().map(|&v| v as usize).sum()
    }

    pub fn lower(&self, m: usize, p: usize) -> Option<(usize, f64)> {
        self.lower[m][p]
    }

    pub fn raise(&self, m: usize, p: usize) -> Option<(usize, f64)> {
        self.raise[m][p]
    }

    /// `y += Σ_m (z_m a_m† − conj(z_m) a_m) x` on one phonon block.
    pub fn apply_displacement_generator(&self, z: &[C64], x: &[C64], y: &mut [C64]) {
        for (p, &xp) in x.iter().enumerate() {
            if xp == C64::new(0.0, 0.0) {
                continue;
            }
            for (m, &zm) in z.iter().enumerate() {
                if let Some((q, s)) = self.raise[m][p] {
                    y[q] += zm * s * xp;
                }
                if let Some((q, s)) = self.lower[m][p] {
                    y[q] -= zm.conj() * s * xp;
                }
            }
        }
    }
}

fn compositions(modes: usize, remaining: usize, cur: &mut Vec<u8>, pos: usize, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == modes || modes == 0 {
        if modes > 0 {
            cur[pos] = remaining as u8;
            out.push(cur.clone());
            cur[pos] = 0;
        } else if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v as u8;
        compositions(modes, remaining - v, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Built model: spec, bases and precomputed mode data. Full basis index is
/// `config · P + phonon` with `P` the phonon basis size.
#[derive(Debug, Clone)]
pub struct FockModel {
    pub spec: ModelSpec,
    pub particles: ParticleBasis,
    pub phonons: PhononBasis,
    pub modes: Vec<Mode>,
    /// `w = (2π/L)^d`
    pub mode_weight: f64,
}

pub type ManyBodyBasis = FockModel;

impl FockModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let est = spec.dimension_estimate();
        if est > spec.dimension_cap as u128 {
            return Err(Error::DimensionCap {
                estimate: est,
                cap: spec.dimension_cap,
            });
        }
        let lat = spec.sites;
        let dk = lat.momentum_spacing();
        let modes: Vec<Mode> = spec
            .mode_labels()
            .into_iter()
            .map(|label| {
                let momentum = [label[0] as f64 * dk, label[1] as f64 * dk, label[2] as f64 * dk];
                Mode {
                    label,
                    momentum,
                    norm: norm3(momentum),
                }
            })
            .collect();
        let particles = ParticleBasis::build(lat.len(), spec.n_particles);
        let phonons = PhononBasis::build(modes.len(), spec.phonon_cutoff);
        Ok(Self {
            mode_weight: lat.mode_weight(),
            spec,
            particles,
            phonons,
            modes,
        })
    }

    pub fn dim(&self) -> usize {
        self.particles.len() * self.phonons.len()
    }

    pub fn n(&self) -> usize {
        self.spec.n_particles
    }

    pub fn sites(&self) -> usize {
        self.spec.sites.len()
    }

    pub fn index(&self, config: usize, phonon: usize) -> usize {
        config * self.phonons.len() + phonon
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.phonons.len(), idx % self.phonons.len())
    }

    pub fn site_position(&self, s: usize) -> [f64; 3] {
        self.spec.sites.position(s)
    }

    /// `e^{ik_m·x_s}`
    pub fn plane_wave(&self, m: usize, s: usize) -> C64 {
        C64::from_polar(1.0, dot3(self.modes[m].momentum, self.site_position(s)))
    }

    /// Discrete amplitudes `z_m = w^{1/2} f(k_m)` of a function given on the
    /// retained momenta; `a(f) = Σ_m conj(z_m) a_m`.
    pub fn amplitudes(&self, f: impl Fn(&Mode) -> C64) -> Vec<C64> {
        let s = self.mode_weight.sqrt();
        self.modes.iter().map(|m| f(m) * s).collect()
    }

    /// Form factor on the retained modes as discrete amplitudes.
    pub fn form_factor_amplitudes(&self, kind: crate::spectral::FormFactorKind, site: usize) -> Vec<C64> {
        let x = self.site_position(site);
        let k = Some(self.spec.cutoff);
        self.amplitudes(|m| crate::spectral::kernel(kind, k, m.momentum, x))
    }

    /// Mass of `state` on the top phonon shell (total occupation `Λ`).
    pub fn leakage(&self, state: &[C64]) -> f64 {
        let p = self.phonons.len();
        let top: Vec<bool> = (0..p)
            .map(|q| self.phonons.total(q) == self.phonons.cutoff)
            .collect();
        state
            .iter()
            .enumerate()
            .filter(|(i, _)| top[i % p])
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }
}
