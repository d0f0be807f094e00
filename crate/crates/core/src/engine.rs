//! Finite-depth sampling of fat fractal percolation sets.
//!
//! Level `k` is produced from level `k − 1` by visiting the surviving
//! parents in sorted address order and, for each, its `m^n` children in
//! child-digit order; every child consumes one uniform variate `u` and is
//! kept iff `u < p_k`. Only surviving cells are stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Stream, UniformSource};
use crate::sequence::ProbSequence;

pub const DEFAULT_CELL_BUDGET: u64 = 1 << 26;
pub const MAX_AMBIENT_DIM: u32 = 3;
/// Largest raster side accepted by [`Realization::render_raster`].
pub const MAX_RASTER_SIDE: u64 = 4096;

fn default_budget() -> u64 {
    DEFAULT_CELL_BUDGET
}

/// Everything needed to reproduce one random realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams {
    pub n: u32,
    pub m: u32,
    pub depth: u32,
    pub seq: ProbSequence,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub cell_budget: u64,
}

impl PercolationParams {
    pub fn new(n: u32, m: u32, depth: u32, seq: ProbSequence, seed: u64) -> Self {
        PercolationParams { n, m, depth, seq, seed, cell_budget: DEFAULT_CELL_BUDGET }
    }

    pub fn with_budget(mut self, cell_budget: u64) -> Self {
        self.cell_budget = cell_budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_AMBIENT_DIM).contains(&self.n) {
            return Err(Error::InvalidParams(format!("n must be in 1..=3, got {}", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("m must be >= 2, got {}", self.m)));
        }
        if self.depth < 1 {
            return Err(Error::InvalidParams("depth must be >= 1".into()));
        }
        if (self.m as u64).checked_pow(self.depth).is_none() {
            return Err(Error::InvalidParams(format!(
                "m^depth = {}^{} does not fit a 64-bit coordinate",
                self.m, self.depth
            )));
        }
        Ok(())
    }

    /// `m^n`, children per cell.
    pub fn children(&self) -> u64 {
        (self.m as u64).pow(self.n)
    }
}

/// Per-axis integer coordinates `a_i`; unused axes are 0.
pub type Coords = [u64; 3];

/// A cell of `D_{n,m,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellAddress {
    pub level: u32,
    pub coords: Coords,
}

impl CellAddress {
    /// Base-`m` digits per axis, most significant first, axis-major.
    pub fn digits(&self, n: u32, m: u32) -> Vec<Vec<u32>> {
        (0..n as usize)
            .map(|axis| {
                let mut v = self.coords[axis];
                let mut d = vec![0u32; self.level as usize];
                for slot in d.iter_mut().rev() {
                    *slot = (v % m as u64) as u32;
                    v /= m as u64;
                }
                d
            })
            .collect()
    }

    /// The closed cube `∏ [a_i m^{−k}, (a_i + 1) m^{−k}]`.
    pub fn cube(&self, n: u32, m: u32) -> Vec<(f64, f64)> {
        let side = (m as f64).powi(-(self.level as i32));
        (0..n as usize)
            .map(|axis| {
                let a = self.coords[axis] as f64;
                (a * side, (a + 1.0) * side)
            })
            .collect()
    }

    pub fn parent(&self, m: u32) -> Option<CellAddress> {
        if self.level == 0 {
            return None;
        }
        let mut coords = self.coords;
        for c in coords.iter_mut() {
            *c /= m as u64;
        }
        Some(CellAddress { level: self.level - 1, coords })
    }
}

/// Sampled `C(0) ⊇ C(1) ⊇ … ⊇ C(K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    params: PercolationParams,
    replicate: u64,
    levels: Vec<Vec<Coords>>,
}

fn child_offsets(n: u32, m: u32) -> Vec<Coords> {
    let count = (m as u64).pow(n);
    (0..count)
        .map(|idx| {
            let mut digits = [0u64; 3];
            let mut rest = idx;
            for axis in (0..n as usize).rev() {
                digits[axis] = rest % m as u64;
                rest /= m as u64;
            }
            digits
        })
        .collect()
}

/// Runs the level-by-level construction, handing each finished level to `sink`.
fn grow<S, F>(params: &PercolationParams, source: &mut S, mut sink: F) -> Result<()>
where
    S: UniformSource,
    F: FnMut(u32, &[Coords]),
{
    params.validate()?;
    let offsets = child_offsets(params.n, params.m);
    let m = params.m as u64;
    let mut frontier: Vec<Coords> = vec![[0; 3]];
    sink(0, &frontier);
    for k in 1..=params.depth {
        let p = params.seq.eval_pk(k as u64)?;
        let mut next = Vec::with_capacity((frontier.len() as f64 * offsets.len() as f64 * p) as usize + 1);
        for parent in &frontier {
            let base = [parent[0] * m, parent[1] * m, parent[2] * m];
            for off in &offsets {
                if source.next_uniform() < p {
                    next.push([base[0] + off[0], base[1] + off[1], base[2] + off[2]]);
                }
            }
            if next.len() as u64 > params.cell_budget {
                return Err(Error::BudgetExceeded {
                    level: k,
                    count: next.len() as u64,
                    budget: params.cell_budget,
                    completed_replicates: None,
                });
            }
        }
        next.sort_unstable();
        sink(k, &next);
        frontier = next;
    }
    Ok(())
}

/// Realization on stream 0 of `params.seed`.
pub fn generate(params: &PercolationParams) -> Result<Realization> {
    generate_replicate(params, 0)
}

/// Realization on stream `replicate` of `params.seed`.
pub fn generate_replicate(params: &PercolationParams, replicate: u64) -> Result<Realization> {
    let mut source = Stream::new(params.seed, replicate);
    let mut r = generate_with(params, &mut source)?;
    r.replicate = replicate;
    Ok(r)
}

/// Realization driven by an arbitrary variate source.
pub fn generate_with<S: UniformSource>(params: &PercolationParams, source: &mut S) -> Result<Realization> {
    let mut levels = Vec::with_capacity(params.depth as usize + 1);
    grow(params, source, |_, level| levels.push(level.to_vec()))?;
    Ok(Realization { params: params.clone(), replicate: 0, levels })
}

/// Counts `X_0..=X_K` of replicate `replicate`, without storing the levels.
/// Equal to `generate_replicate(params, replicate)?.counts()`.
pub fn level_counts(params: &PercolationParams, replicate: u64) -> Result<Vec<u64>> {
    let mut source = Stream::new(params.seed, replicate);
    let mut counts = Vec::with_capacity(params.depth as usize + 1);
    grow(params, &mut source, |_, level| counts.push(level.len() as u64))?;
    Ok(counts)
}

/// A binary raster, row-major, row 0 at the top (largest second coordinate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn occupied(&self) -> usize {
        self.pixels.iter().filter(|&&v| v != 0).count()
    }

    /// Binary PGM (`P5`, maxval 255): 0 vacant, 255 occupied.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().map(|&v| if v != 0 { 255u8 } else { 0 }));
        out
    }
}

impl Realization {
    pub fn params(&self) -> &PercolationParams {
        &self.params
    }

    pub fn replicate(&self) -> u64 {
        self.replicate
    }

    pub fn depth(&self) -> u32 {
        self.params.depth
    }

    /// `X_k` for `k = 0..=K`.
    pub fn counts(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.len() as u64).collect()
    }

    fn check_level(&self, k: u32) -> Result<()> {
        if k > self.params.depth {
            return Err(Error::LevelOutOfRange { k, depth: self.params.depth });
        }
        Ok(())
    }

    /// Sorted coordinates of the cells surviving at level `k`.
    pub fn level(&self, k: u32) -> Result<&[Coords]> {
        self.check_level(k)?;
        Ok(&self.levels[k as usize])
    }

    pub fn addresses(&self, k: u32) -> Result<impl Iterator<Item = CellAddress> + '_> {
        Ok(self.level(k)?.iter().map(move |&coords| CellAddress { level: k, coords }))
    }

    /// Lebesgue measure of `C(k)`: `X_k · m^{−nk}`.
    pub fn measure_at(&self, k: u32) -> Result<f64> {
        self.check_level(k)?;
        let count = self.levels[k as usize].len() as f64;
        Ok(count / (self.params.m as f64).powi((self.params.n * k) as i32))
    }

    /// `X_K > 0`. At finite depth this overestimates survival of the limit set.
    pub fn survives(&self) -> bool {
        self.levels.last().is_some_and(|l| !l.is_empty())
    }

    /// Every level-`k` cell has its parent at level `k − 1`.
    pub fn is_nested(&self) -> bool {
        let m = self.params.m as u64;
        self.levels
            .windows(2)
            .all(|pair| pair[1].iter().all(|c| pair[0].binary_search(&[c[0] / m, c[1] / m, c[2] / m]).is_ok()))
    }

    /// `m^k × m^k` occupancy grid of `C(k)`; `n = 2` only.
    pub fn render_raster(&self, k: u32) -> Result<Raster> {
        if self.params.n != 2 {
            return Err(Error::UnsupportedDimension(self.params.n));
        }
        self.check_level(k)?;
        let side = (self.params.m as u64).pow(k);
        if side > MAX_RASTER_SIDE {
            return Err(Error::RasterTooLarge { side, max: MAX_RASTER_SIDE });
        }
        let side = side as usize;
        let mut pixels = vec![0u8; side * side];
        for c in &self.levels[k as usize] {
            let row = side - 1 - c[1] as usize;
            pixels[row * side + c[0] as usize] = 1;
        }
        Ok(Raster { width: side, height: side, pixels })
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationRecord {
    n: u32,
    m: u32,
    depth: u32,
    seed: u64,
    replicate: u64,
    cell_budget: u64,
    seq: ProbSequence,
    counts: Vec<u64>,
    /// Per level, the sorted addresses as `n` per-axis coordinates.
    levels: Vec<Vec<Vec<u64>>>,
}

impl Serialize for Realization {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.params.n as usize;
        RealizationRecord {
            n: self.params.n,
            m: self.params.m,
            depth: self.params.depth,
            seed: self.params.seed,
            replicate: self.replicate,
            cell_budget: self.params.cell_budget,
            seq: self.params.seq.clone(),
            counts: self.counts(),
            levels: self.levels.iter().map(|l| l.iter().map(|c| c[..n].to_vec()).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Realization {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RealizationRecord::deserialize(deserializer)?;
        let params =
            PercolationParams { n: r.n, m: r.m, depth: r.depth, seq: r.seq, seed: r.seed, cell_budget: r.cell_budget };
        params.validate().map_err(D::Error::custom)?;
        if r.levels.len() != r.depth as usize + 1 {
            return Err(D::Error::custom("level count does not match depth"));
        }
        let mut levels = Vec::with_capacity(r.levels.len());
        for level in r.levels {
            let mut out = Vec::with_capacity(level.len());
            for addr in level {
                if addr.len() != r.n as usize {
                    return Err(D::Error::custom("address arity does not match n"));
                }
                let mut c = [0u64; 3];
                c[..addr.len()].copy_from_slice(&addr);
                out.push(c);
            }
            if !out.windows(2).all(|w| w[0] < w[1]) {
                return Err(D::Error::custom("addresses must be strictly sorted"));
            }
            levels.push(out);
        }
        let real = Realization { params, replicate: r.replicate, levels };
        if real.counts() != r.counts {
            return Err(D::Error::custom("counts do not match levels"));
        }
        if !real.is_nested() {
            return Err(D::Error::custom("levels are not nested"));
        }
        Ok(real)
    }
}
