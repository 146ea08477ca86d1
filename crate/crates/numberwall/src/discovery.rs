//! Three-pass discovery of a substitution-plus-coding system generating a
//! given value grid, plus the canonical reindexing of the tile alphabet.
//!
//! Pass 1 dedupes the l x l blocks centered on the (l - r)-spaced lattice
//! into an injective coding and a tile grid. Pass 2 reads every tile's k x k
//! substitution image from the same grid at half resolution, failing on any
//! contradiction. Pass 3 harvests the 2x2 tile patterns of a reference
//! region around the origin, closes them (together with every substitution
//! image) under substitution-subpattern extraction, and checks that every
//! pattern observed anywhere in the grid lies in the closed set — which
//! certifies that the closed set is exactly the 2-pattern set of the
//! infinite tiling.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use crate::grid::Grid;
use crate::tiling::{ceil_div, CenterMode, Coding, Substitution, TilingSystem};
use crate::Error;

/// Parameters of a discovery run. `tel` is the tile edge length (the coding
/// edge is l = tel + 1) and `cid` the center distance (l - r); the grid
/// region is rows [a, b] x cols [c, d] in value coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoveryParams {
    pub k: i64,
    pub tel: i64,
    pub cid: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl DiscoveryParams {
    pub fn new(k: i64, tel: i64, cid: i64, a: i64, b: i64, c: i64, d: i64) -> Result<Self, Error> {
        if k < 2 {
            return Err(Error::Config(format!("substitution factor {k} < 2")));
        }
        if tel <= 0 || cid <= 0 || tel % 2 != 0 || cid % 2 != 0 {
            return Err(Error::Config(format!(
                "tile edge {tel} and center distance {cid} must be positive and even"
            )));
        }
        if cid > tel {
            return Err(Error::Config(format!(
                "center distance {cid} exceeds tile edge {tel}"
            )));
        }
        if a > b || c > d || a >= 0 || c >= 0 || b <= 0 || d <= 0 {
            return Err(Error::Config(format!(
                "region rows [{a}, {b}] cols [{c}, {d}] must straddle the origin"
            )));
        }
        // the row range must reach far enough above the origin for the
        // reference region of the closure check to be usable
        if 2 * a > -5 * (cid + tel) {
            return Err(Error::Config(format!(
                "row low bound {a} must be at most -(5/2)({cid}+{tel})"
            )));
        }
        Ok(DiscoveryParams {
            k,
            tel,
            cid,
            a,
            b,
            c,
            d,
        })
    }

    pub fn l(&self) -> i64 {
        self.tel + 1
    }

    pub fn r(&self) -> i64 {
        self.l() - self.cid
    }

    /// Inclusive tile-coordinate ranges whose centered blocks fit in the
    /// value region.
    pub fn tile_bounds(&self) -> (i64, i64, i64, i64) {
        let (ch, th) = (self.cid / 2, self.tel / 2);
        let i_lo = ceil_div(self.a + ch + th, self.cid);
        let i_hi = (self.b + ch - th).div_euclid(self.cid);
        let j_lo = ceil_div(self.c + ch + th, self.cid);
        let j_hi = (self.d + ch - th).div_euclid(self.cid);
        (i_lo, i_hi, j_lo, j_hi)
    }

    /// Wall coordinates of the center of tile (i, j).
    pub fn center(&self, i: i64, j: i64) -> (i64, i64) {
        (self.cid * i - self.cid / 2, self.cid * j - self.cid / 2)
    }

    /// Reference region pair (m, M] for the closure check, derived so that
    /// the scaled region k*(m, M] still lies inside the tile grid.
    pub fn closure_bounds(&self) -> ((i64, i64), (i64, i64)) {
        let r = self.r();
        let s = self.cid * self.k;
        let m = ((self.a + r).div_euclid(s), (self.c + r).div_euclid(s));
        let big = ((self.b - r).div_euclid(s), (self.d - r).div_euclid(s));
        (m, big)
    }
}

/// Output of a successful discovery run.
#[derive(Debug, Clone)]
pub struct DiscoveryResult {
    pub params: DiscoveryParams,
    pub coding: Coding,
    pub substitution: Substitution,
    /// 2x2 tile patterns of the tiling that are not substitution images,
    /// row-major (from the closed pattern set of Pass 3)
    pub extra_tetrads: Vec<[u32; 4]>,
    /// orthant seeds for (0,0), (0,1), (1,0), (1,1)
    pub seeds: [u32; 4],
    /// the discovered tile grid, indexed by tile coordinates
    pub tiles: Grid<u32>,
    /// reference region pair certified by the closure check
    pub closure_lo: (i64, i64),
    pub closure_hi: (i64, i64),
}

impl DiscoveryResult {
    pub fn alphabet_size(&self) -> usize {
        self.coding.alphabet_size()
    }

    /// Substitution images plus extra observed patterns.
    pub fn tetrad_count(&self) -> usize {
        self.alphabet_size() + self.extra_tetrads.len()
    }

    /// The result as a centered tiling system.
    pub fn system(&self) -> Result<TilingSystem, Error> {
        TilingSystem::new(
            self.substitution.clone(),
            self.coding.clone(),
            self.seeds.map(Some),
            self.params.r(),
            CenterMode::Centered,
        )
    }

    /// Writes the coding table: per tile a `tile <id>` line followed by l
    /// rows of l residue digits.
    pub fn write_codes<W: Write>(&self, mut out: W) -> Result<(), Error> {
        let l = self.coding.l();
        for id in 1..=self.alphabet_size() as u32 {
            writeln!(out, "tile {id}")?;
            let img = self.coding.value_grid(id);
            for a in 0..l as usize {
                let row: String = img[a * l as usize..(a + 1) * l as usize]
                    .iter()
                    .map(|v| char::from_digit(*v as u32, 10).unwrap())
                    .collect();
                writeln!(out, "{row}")?;
            }
        }
        Ok(())
    }

    /// Writes all 2x2 patterns as `tile <id>: a b / c d`; ids 1..|alphabet|
    /// are the substitution images, higher ids the extra observed patterns.
    pub fn write_tetrads<W: Write>(&self, mut out: W) -> Result<(), Error> {
        if self.params.k != 2 {
            return Err(Error::Config(
                "tetrad file output requires substitution factor 2".into(),
            ));
        }
        for id in 1..=self.alphabet_size() as u32 {
            let img = self.substitution.image_grid(id);
            writeln!(out, "tile {id}: {} {} / {} {}", img[0], img[1], img[2], img[3])?;
        }
        for (idx, t) in self.extra_tetrads.iter().enumerate() {
            let id = self.alphabet_size() + idx + 1;
            writeln!(out, "tile {id}: {} {} / {} {}", t[0], t[1], t[2], t[3])?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tiles": self.alphabet_size(),
            "tetrads": self.tetrad_count(),
            "seeds": self.seeds,
            "closure_region": {
                "lo": [self.closure_lo.0, self.closure_lo.1],
                "hi": [self.closure_hi.0, self.closure_hi.1],
            },
        })
    }
}

/// Runs the three discovery passes over a value grid covering the parameter
/// region. Fails if the grid is not generated by a k-substitution at these
/// parameters or if the closure check does not certify the region.
pub fn discover(values: &Grid<u8>, params: DiscoveryParams) -> Result<DiscoveryResult, Error> {
    if !(values.contains(params.a, params.c) && values.contains(params.b, params.d)) {
        return Err(Error::Config(
            "value grid does not cover the discovery region".into(),
        ));
    }
    let l = params.l();
    let (i_lo, i_hi, j_lo, j_hi) = params.tile_bounds();
    if i_lo > i_hi || j_lo > j_hi {
        return Err(Error::Config("region too small for a single tile".into()));
    }

    // Pass 1: dedupe centered l x l blocks into tiles
    let mut block_ids: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut images: Vec<Vec<u8>> = Vec::new();
    let mut tiles = Grid::new(i_lo, i_hi, j_lo, j_hi, 0u32)?;
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            let (cm, cn) = params.center(i, j);
            let mut block = Vec::with_capacity((l * l) as usize);
            for m in cm - params.tel / 2..=cm + params.tel / 2 {
                for n in cn - params.tel / 2..=cn + params.tel / 2 {
                    block.push(values.at(m, n));
                }
            }
            let next = block_ids.len() as u32 + 1;
            let id = *block_ids.entry(block.clone()).or_insert_with(|| {
                images.push(block);
                next
            });
            tiles.set(i, j, id);
        }
    }
    let coding = Coding::new(l, images)?;
    let size = coding.alphabet_size() as u32;

    // Pass 2: read each tile's k x k image at half resolution
    let k = params.k;
    let mut subst_images: Vec<Option<Vec<u32>>> = vec![None; size as usize];
    let parent_i = (ceil_div(i_lo - 1, k) + 1, i_hi.div_euclid(k));
    let parent_j = (ceil_div(j_lo - 1, k) + 1, j_hi.div_euclid(k));
    for bi in parent_i.0..=parent_i.1 {
        for bj in parent_j.0..=parent_j.1 {
            if !tiles.contains(bi, bj) {
                return Err(Error::Internal(format!(
                    "parent tile ({bi}, {bj}) outside the discovered grid"
                )));
            }
            let parent = tiles.at(bi, bj);
            let mut img = Vec::with_capacity((k * k) as usize);
            for s in 1..=k {
                for t in 1..=k {
                    img.push(tiles.at(k * (bi - 1) + s, k * (bj - 1) + t));
                }
            }
            match &subst_images[(parent - 1) as usize] {
                None => subst_images[(parent - 1) as usize] = Some(img),
                Some(prev) if *prev == img => {}
                Some(_) => {
                    return Err(Error::Discovery(format!(
                        "tile {parent} has two different images at ({bi}, {bj}): \
                         not a {k}-substitution at these parameters"
                    )));
                }
            }
        }
    }
    let mut full_images = Vec::with_capacity(size as usize);
    for (idx, img) in subst_images.into_iter().enumerate() {
        match img {
            Some(v) => full_images.push(v),
            None => {
                return Err(Error::Discovery(format!(
                    "tile {} never appears at half resolution; enlarge region",
                    idx + 1
                )));
            }
        }
    }
    let substitution = Substitution::new(k, full_images)?;

    // orthant seeds are the tiles at the four base coordinates
    let mut seeds = [0u32; 4];
    for (idx, (oi, oj)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let s = tiles.at(oi, oj);
        let a = if oi == 0 { k } else { 1 };
        let b = if oj == 0 { k } else { 1 };
        if substitution.image(s, a, b) != s {
            return Err(Error::Discovery(format!(
                "tile {s} at base coordinate ({oi}, {oj}) is not prolongable"
            )));
        }
        seeds[idx] = s;
    }

    // Pass 3: the 2x2 patterns of the reference region, together with every
    // tile's substitution image, must close under taking 2x2 subpatterns of
    // substitution images. The closed set is then exactly the set of all
    // 2-patterns of the infinite tiling: patterns near the origin are in the
    // reference region, every pattern descends from one by a substitution
    // step, and closure adds only patterns that genuinely occur. Every
    // pattern observed anywhere in the grid must therefore land inside the
    // closed set, otherwise the grid is not generated by this system.
    let (lo, hi) = params.closure_bounds();
    if !(lo.0 < 0 && lo.1 < 0 && hi.0 > 0 && hi.1 > 0) {
        return Err(Error::Config("region too small for the closure check".into()));
    }
    let image_set: BTreeSet<[u32; 4]> = (1..=size)
        .map(|id| {
            let img = substitution.image_grid(id);
            [img[0], img[1], img[2], img[3]]
        })
        .collect();
    let mut closed = collect_tetrads(&tiles, lo.0 + 1, hi.0, lo.1 + 1, hi.1)?;
    closed.extend(image_set.iter().copied());
    close_pattern_set(&mut closed, &substitution);
    let observed = collect_tetrads(&tiles, tiles.row_lo(), tiles.row_hi(), tiles.col_lo(), tiles.col_hi())?;
    if !observed.is_subset(&closed) {
        let missing = observed.difference(&closed).count();
        return Err(Error::Discovery(format!(
            "closure not reached; enlarge region ({missing} of {} observed \
             2-patterns outside the closed set of {})",
            observed.len(),
            closed.len()
        )));
    }
    let extra_tetrads: Vec<[u32; 4]> = closed.difference(&image_set).copied().collect();

    Ok(DiscoveryResult {
        params,
        coding,
        substitution,
        extra_tetrads,
        seeds,
        tiles,
        closure_lo: lo,
        closure_hi: hi,
    })
}

/// Grows a 2x2 pattern set to its fixpoint under "substitute, then take all
/// 2x2 subpatterns of the 2k x 2k image".
fn close_pattern_set(set: &mut BTreeSet<[u32; 4]>, subst: &Substitution) {
    let k = subst.k() as usize;
    let side = 2 * k;
    loop {
        let mut fresh: Vec<[u32; 4]> = Vec::new();
        for p in set.iter() {
            let mut big = vec![0u32; side * side];
            for (q, &tile) in p.iter().enumerate() {
                let img = subst.image_grid(tile);
                let (r0, c0) = (k * (q / 2), k * (q % 2));
                for a in 0..k {
                    for b in 0..k {
                        big[(r0 + a) * side + c0 + b] = img[a * k + b];
                    }
                }
            }
            for a in 0..side - 1 {
                for b in 0..side - 1 {
                    let q = [
                        big[a * side + b],
                        big[a * side + b + 1],
                        big[(a + 1) * side + b],
                        big[(a + 1) * side + b + 1],
                    ];
                    if !set.contains(&q) {
                        fresh.push(q);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return;
        }
        set.extend(fresh);
    }
}

fn collect_tetrads(
    tiles: &Grid<u32>,
    r_lo: i64,
    r_hi: i64,
    c_lo: i64,
    c_hi: i64,
) -> Result<BTreeSet<[u32; 4]>, Error> {
    if !(tiles.contains(r_lo, c_lo) && tiles.contains(r_hi, c_hi)) {
        return Err(Error::Config(
            "closure region leaves the discovered tile grid".into(),
        ));
    }
    let mut out = BTreeSet::new();
    for i in r_lo..r_hi {
        for j in c_lo..c_hi {
            out.insert([
                tiles.at(i, j),
                tiles.at(i, j + 1),
                tiles.at(i + 1, j),
                tiles.at(i + 1, j + 1),
            ]);
        }
    }
    Ok(out)
}

/// Reindexes the alphabet so that tile ids ascend by the canonical key of
/// their closest occurrence: first least |m| + |n| of the occurrence center
/// in value coordinates, then by row m, then by column n.
pub fn canonical_order(result: &DiscoveryResult) -> Result<DiscoveryResult, Error> {
    let size = result.alphabet_size();
    let tiles = &result.tiles;
    let mut best: Vec<Option<(i64, i64, i64)>> = vec![None; size];
    for i in tiles.row_lo()..=tiles.row_hi() {
        for j in tiles.col_lo()..=tiles.col_hi() {
            let (m, n) = result.params.center(i, j);
            let key = (m.abs() + n.abs(), m, n);
            let slot = &mut best[(tiles.at(i, j) - 1) as usize];
            if slot.map_or(true, |prev| key < prev) {
                *slot = Some(key);
            }
        }
    }
    let mut order: Vec<u32> = (1..=size as u32).collect();
    for (idx, b) in best.iter().enumerate() {
        if b.is_none() {
            return Err(Error::Internal(format!("tile {} has no occurrence", idx + 1)));
        }
    }
    order.sort_by_key(|&id| best[(id - 1) as usize].unwrap());
    // new_id[old] = position of old in the sorted order
    let mut new_id = vec![0u32; size];
    for (pos, &old) in order.iter().enumerate() {
        new_id[(old - 1) as usize] = pos as u32 + 1;
    }
    let remap = |id: u32| new_id[(id - 1) as usize];

    let coding_images = order
        .iter()
        .map(|&old| result.coding.value_grid(old).to_vec())
        .collect();
    let subst_images = order
        .iter()
        .map(|&old| {
            result
                .substitution
                .image_grid(old)
                .iter()
                .map(|&t| remap(t))
                .collect()
        })
        .collect();
    let mut extra: Vec<[u32; 4]> = result
        .extra_tetrads
        .iter()
        .map(|t| [remap(t[0]), remap(t[1]), remap(t[2]), remap(t[3])])
        .collect();
    extra.sort();
    let mut new_tiles = tiles.clone();
    for i in tiles.row_lo()..=tiles.row_hi() {
        for j in tiles.col_lo()..=tiles.col_hi() {
            new_tiles.set(i, j, remap(tiles.at(i, j)));
        }
    }
    Ok(DiscoveryResult {
        params: result.params,
        coding: Coding::new(result.params.l(), coding_images)?,
        substitution: Substitution::new(result.params.k, subst_images)?,
        extra_tetrads: extra,
        seeds: result.seeds.map(remap),
        tiles: new_tiles,
        closure_lo: result.closure_lo,
        closure_hi: result.closure_hi,
    })
}

/// True iff the canonical tile grid starts from the expected base values
/// T(0,0)=1, T(0,1)=2, T(1,0)=3, T(1,1)=4.
pub fn verify_initial_conditions(result: &DiscoveryResult) -> bool {
    result.tiles.at(0, 0) == 1
        && result.tiles.at(0, 1) == 2
        && result.tiles.at(1, 0) == 3
        && result.tiles.at(1, 1) == 4
}
