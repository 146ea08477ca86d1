//! Two-dimensional substitution tilings with overlapping codings.
//!
//! A tiling is generated from four orthant seeds by a k-substitution; an
//! l-coding with overlap r then decodes tiles into residue values on a
//! (l - r)-spaced lattice, optionally centered inside each tile image.

use std::collections::HashSet;

use crate::grid::Grid;
use crate::Error;

/// Ceiling division as used by the substitution recursion.
pub(crate) fn ceil_div(x: i64, k: i64) -> i64 {
    (x + k - 1).div_euclid(k)
}

/// Representative of x in {1, ..., k} congruent to x mod k.
pub(crate) fn rep_mod(x: i64, k: i64) -> i64 {
    let r = x.rem_euclid(k);
    if r == 0 {
        k
    } else {
        r
    }
}

/// A uniform k-substitution over tiles 1..=len(images): each tile maps to a
/// k x k grid of tiles, stored row-major with 1-based image positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    k: i64,
    images: Vec<Vec<u32>>,
}

impl Substitution {
    pub fn new(k: i64, images: Vec<Vec<u32>>) -> Result<Substitution, Error> {
        if k < 2 {
            return Err(Error::Config(format!("substitution factor {k} < 2")));
        }
        if images.is_empty() {
            return Err(Error::Config("empty tile alphabet".into()));
        }
        let size = images.len() as u32;
        for (t, img) in images.iter().enumerate() {
            if img.len() as i64 != k * k {
                return Err(Error::Config(format!(
                    "tile {} image has {} entries, expected {}",
                    t + 1,
                    img.len(),
                    k * k
                )));
            }
            if let Some(&bad) = img.iter().find(|&&v| v == 0 || v > size) {
                return Err(Error::Config(format!(
                    "tile {} image mentions unknown tile {bad}",
                    t + 1
                )));
            }
        }
        Ok(Substitution { k, images })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    /// Image entry at 1-based position (a, b) of the tile's k x k image.
    pub fn image(&self, tile: u32, a: i64, b: i64) -> u32 {
        self.images[(tile - 1) as usize][((a - 1) * self.k + (b - 1)) as usize]
    }

    pub fn image_grid(&self, tile: u32) -> &[u32] {
        &self.images[(tile - 1) as usize]
    }
}

/// An l-coding: each tile maps to an l x l grid of residues, stored
/// row-major with 1-based image positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coding {
    l: i64,
    images: Vec<Vec<u8>>,
}

impl Coding {
    pub fn new(l: i64, images: Vec<Vec<u8>>) -> Result<Coding, Error> {
        if l < 1 {
            return Err(Error::Config(format!("coding edge {l} < 1")));
        }
        if images.is_empty() {
            return Err(Error::Config("empty tile alphabet".into()));
        }
        for (t, img) in images.iter().enumerate() {
            if img.len() as i64 != l * l {
                return Err(Error::Config(format!(
                    "tile {} coding has {} entries, expected {}",
                    t + 1,
                    img.len(),
                    l * l
                )));
            }
        }
        Ok(Coding { l, images })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    /// Coded value at 1-based position (a, b) of the tile's l x l image.
    pub fn value(&self, tile: u32, a: i64, b: i64) -> u8 {
        self.images[(tile - 1) as usize][((a - 1) * self.l + (b - 1)) as usize]
    }

    pub fn value_grid(&self, tile: u32) -> &[u8] {
        &self.images[(tile - 1) as usize]
    }

    /// True if distinct tiles have distinct images.
    pub fn is_injective(&self) -> bool {
        let mut seen: HashSet<&[u8]> = HashSet::new();
        self.images.iter().all(|img| seen.insert(img))
    }
}

/// Where inside a tile's l x l coded image the (l - r)-spaced decoded block
/// is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterMode {
    TopLeft,
    Centered,
}

/// First decoded-value violation found by the consistency check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencyViolation {
    /// tile coordinates of the left/top tile of the offending pair
    pub tile_row: i64,
    pub tile_col: i64,
    /// 0 = horizontal neighbour, 1 = vertical neighbour
    pub axis: u8,
    /// 1-based position inside the overlap where the images differ
    pub at: (i64, i64),
}

/// A substitution tiling of Z^2 together with an overlapping coding.
///
/// Orthant seeds are indexed (0,0), (0,1), (1,0), (1,1); a seed may be absent
/// if the corresponding quadrant is never expanded.
#[derive(Debug, Clone)]
pub struct TilingSystem {
    subst: Substitution,
    coding: Coding,
    seeds: [Option<u32>; 4],
    overlap: i64,
    mode: CenterMode,
}

impl TilingSystem {
    pub fn new(
        subst: Substitution,
        coding: Coding,
        seeds: [Option<u32>; 4],
        overlap: i64,
        mode: CenterMode,
    ) -> Result<TilingSystem, Error> {
        if subst.alphabet_size() != coding.alphabet_size() {
            return Err(Error::Config(format!(
                "substitution over {} tiles but coding over {}",
                subst.alphabet_size(),
                coding.alphabet_size()
            )));
        }
        let l = coding.l;
        if overlap < 0 || overlap >= l {
            return Err(Error::Config(format!(
                "overlap {overlap} outside [0, {})",
                l
            )));
        }
        if mode == CenterMode::Centered {
            let cid = l - overlap;
            if (l - 1) % 2 != 0 || cid % 2 != 0 {
                return Err(Error::Config(format!(
                    "centered decoding needs even tile edge {} and even center distance {cid}",
                    l - 1
                )));
            }
        }
        if seeds.iter().all(|s| s.is_none()) {
            return Err(Error::Config("no orthant seed given".into()));
        }
        let k = subst.k;
        for (idx, seed) in seeds.iter().enumerate() {
            if let Some(s) = *seed {
                if s == 0 || s as usize > subst.alphabet_size() {
                    return Err(Error::Config(format!("unknown seed tile {s}")));
                }
                // o-prolongability: the seed must reappear at the image
                // position fixed by the recursion for its own orthant
                let a = if idx & 2 == 0 { k } else { 1 };
                let b = if idx & 1 == 0 { k } else { 1 };
                if subst.image(s, a, b) != s {
                    return Err(Error::Config(format!(
                        "seed tile {s} is not prolongable for orthant ({}, {})",
                        (idx >> 1) & 1,
                        idx & 1
                    )));
                }
            }
        }
        Ok(TilingSystem {
            subst,
            coding,
            seeds,
            overlap,
            mode,
        })
    }

    pub fn substitution(&self) -> &Substitution {
        &self.subst
    }

    pub fn coding(&self) -> &Coding {
        &self.coding
    }

    pub fn overlap(&self) -> i64 {
        self.overlap
    }

    pub fn seeds(&self) -> [Option<u32>; 4] {
        self.seeds
    }

    /// Spacing of the decoded lattice (center distance).
    pub fn cid(&self) -> i64 {
        self.coding.l - self.overlap
    }

    /// 1-based start column/row of the decoded block inside a tile image.
    fn block_start(&self) -> i64 {
        match self.mode {
            CenterMode::TopLeft => 1,
            CenterMode::Centered => (self.coding.l + 1) / 2 - self.cid() / 2 + 1,
        }
    }

    /// Tile at coordinates in the inclusive rectangle, by the substitution
    /// recursion from the orthant seeds.
    pub fn expand(
        &self,
        row_lo: i64,
        row_hi: i64,
        col_lo: i64,
        col_hi: i64,
    ) -> Result<Grid<u32>, Error> {
        if row_lo > row_hi || col_lo > col_hi {
            return Err(Error::Config("degenerate expansion region".into()));
        }
        let k = self.subst.k;
        if row_lo >= 0 && row_hi <= 1 && col_lo >= 0 && col_hi <= 1 {
            let mut grid = Grid::new(row_lo, row_hi, col_lo, col_hi, 0u32)?;
            for i in row_lo..=row_hi {
                for j in col_lo..=col_hi {
                    let idx = ((i as usize) << 1) | j as usize;
                    let seed = self.seeds[idx].ok_or_else(|| {
                        Error::Config(format!("no seed for orthant ({i}, {j})"))
                    })?;
                    grid.set(i, j, seed);
                }
            }
            return Ok(grid);
        }
        let parent = self.expand(
            ceil_div(row_lo, k),
            ceil_div(row_hi, k),
            ceil_div(col_lo, k),
            ceil_div(col_hi, k),
        )?;
        let mut grid = Grid::new(row_lo, row_hi, col_lo, col_hi, 0u32)?;
        for i in row_lo..=row_hi {
            for j in col_lo..=col_hi {
                let p = parent.at(ceil_div(i, k), ceil_div(j, k));
                grid.set(i, j, self.subst.image(p, rep_mod(i, k), rep_mod(j, k)));
            }
        }
        Ok(grid)
    }

    /// Decoded value at a single coordinate of the coded tiling.
    pub fn decode_at(&self, tiles: &Grid<u32>, m: i64, n: i64) -> u8 {
        let c = self.cid();
        let off = self.block_start() - 1;
        let tile = tiles.at(ceil_div(m, c), ceil_div(n, c));
        self.coding
            .value(tile, rep_mod(m, c) + off, rep_mod(n, c) + off)
    }

    /// Decoded values over an inclusive rectangle of coded coordinates.
    pub fn decode(
        &self,
        row_lo: i64,
        row_hi: i64,
        col_lo: i64,
        col_hi: i64,
    ) -> Result<Grid<u8>, Error> {
        if row_lo > row_hi || col_lo > col_hi {
            return Err(Error::Config("degenerate decode region".into()));
        }
        let c = self.cid();
        let tiles = self.expand(
            ceil_div(row_lo, c),
            ceil_div(row_hi, c),
            ceil_div(col_lo, c),
            ceil_div(col_hi, c),
        )?;
        let mut grid = Grid::new(row_lo, row_hi, col_lo, col_hi, 0u8)?;
        for m in row_lo..=row_hi {
            for n in col_lo..=col_hi {
                grid.set(m, n, self.decode_at(&tiles, m, n));
            }
        }
        Ok(grid)
    }

    /// Checks overlap consistency for every adjacent tile pair in the
    /// inclusive rectangle of tile coordinates: where two coded images
    /// overlap by r rows or columns, they must agree. Returns the first
    /// violation, or None.
    pub fn check_consistency(
        &self,
        row_lo: i64,
        row_hi: i64,
        col_lo: i64,
        col_hi: i64,
    ) -> Result<Option<ConsistencyViolation>, Error> {
        let l = self.coding.l;
        let r = self.overlap;
        let c = l - r;
        let tiles = self.expand(row_lo, row_hi, col_lo, col_hi)?;
        for i in row_lo..=row_hi {
            for j in col_lo..=col_hi {
                let s = tiles.at(i, j);
                if j < col_hi {
                    let right = tiles.at(i, j + 1);
                    for a in 1..=l {
                        for b in 1..=r {
                            if self.coding.value(s, a, c + b) != self.coding.value(right, a, b) {
                                return Ok(Some(ConsistencyViolation {
                                    tile_row: i,
                                    tile_col: j,
                                    axis: 0,
                                    at: (a, b),
                                }));
                            }
                        }
                    }
                }
                if i < row_hi {
                    let below = tiles.at(i + 1, j);
                    for a in 1..=r {
                        for b in 1..=l {
                            if self.coding.value(s, c + a, b) != self.coding.value(below, a, b) {
                                return Ok(Some(ConsistencyViolation {
                                    tile_row: i,
                                    tile_col: j,
                                    axis: 1,
                                    at: (a, b),
                                }));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// True iff every 2x2 tile pattern in T over the scaled region
    /// (k*m, k*M] already occurs in T over (m, M]. This finite check
    /// certifies that the region (m, M] exhibits every 2-pattern of the
    /// whole tiling.
    pub fn two_pattern_closure(&self, m: (i64, i64), big_m: (i64, i64)) -> Result<bool, Error> {
        if !(m.0 < 0 && m.1 < 0 && big_m.0 > 0 && big_m.1 > 0) {
            return Err(Error::Config(
                "closure regions must straddle the origin".into(),
            ));
        }
        let k = self.subst.k;
        let small = self.expand(m.0 + 1, big_m.0, m.1 + 1, big_m.1)?;
        let small_pats = enumerate_patterns(&small, 2)?;
        let big = self.expand(k * m.0 + 1, k * big_m.0, k * m.1 + 1, k * big_m.1)?;
        let big_pats = enumerate_patterns(&big, 2)?;
        Ok(big_pats.is_subset(&small_pats))
    }
}

/// Number of tiles per side whose decoded image is guaranteed to contain any
/// r'-pattern of the coded tiling: 1 + max(0, ceil((r' - r - 1) / (l - r))).
pub fn cover_size(l: i64, r: i64, r_prime: i64) -> i64 {
    assert!(0 <= r && r < l && r_prime >= 1);
    let num = r_prime - r - 1;
    if num <= 0 {
        1
    } else {
        1 + ceil_div(num, l - r)
    }
}

/// All distinct s x s subgrids of a tile grid, row-major.
pub fn enumerate_patterns(grid: &Grid<u32>, s: i64) -> Result<HashSet<Vec<u32>>, Error> {
    let (rlo, rhi) = (grid.row_lo(), grid.row_hi());
    let (clo, chi) = (grid.col_lo(), grid.col_hi());
    if s < 1 || rhi - rlo + 1 < s || chi - clo + 1 < s {
        return Err(Error::Config(format!(
            "grid too small for {s}x{s} patterns"
        )));
    }
    let mut out = HashSet::new();
    for i in rlo..=rhi - s + 1 {
        for j in clo..=chi - s + 1 {
            let mut pat = Vec::with_capacity((s * s) as usize);
            for a in 0..s {
                for b in 0..s {
                    pat.push(grid.at(i + a, j + b));
                }
            }
            out.insert(pat);
        }
    }
    Ok(out)
}
