//! Machine-checkable certificate that a discovered tiling system generates
//! the Number Wall of the sequence in its zeroth row with bounded deficiency.
//!
//! The chain of obligations mirrors the structure of the underlying argument:
//! the coding and substitution have the special-tile structure that confines
//! zeros, the coded images agree on their overlaps, the pattern closure is
//! certified, the decoded grid satisfies the frame constraints (checked by an
//! implementation independent of the wall builder), all zero windows have the
//! expected maximal side, and the zeroth row is the input sequence.

use std::collections::HashMap;

use serde::Serialize;

use crate::discovery::{canonical_order, discover, DiscoveryParams, DiscoveryResult};
use crate::field::Modulus;
use crate::grid::Grid;
use crate::seq::{SequenceSource, SubstSystem1D};
use crate::tiling::{Coding, Substitution, TilingSystem};
use crate::wall;
use crate::windows::{census_grid, Region};
use crate::Error;

/// One verified claim: pass/fail with a human-readable detail line and the
/// offending coordinates on failure.
#[derive(Debug, Clone, Serialize)]
pub struct Obligation {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub at: Option<(i64, i64)>,
}

impl Obligation {
    fn ok(name: &str, detail: impl Into<String>) -> Obligation {
        Obligation {
            name: name.into(),
            pass: true,
            detail: detail.into(),
            at: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, at: Option<(i64, i64)>) -> Obligation {
        Obligation {
            name: name.into(),
            pass: false,
            detail: detail.into(),
            at,
        }
    }
}

/// The aggregated verification result; overall pass iff every obligation
/// passes.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Certificate {
    pub obligations: Vec<Obligation>,
}

impl Certificate {
    pub fn new() -> Certificate {
        Certificate::default()
    }

    pub fn push(&mut self, ob: Obligation) {
        self.obligations.push(ob);
    }

    pub fn pass(&self) -> bool {
        self.obligations.iter().all(|o| o.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Obligation> {
        self.obligations.iter().find(|o| o.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pass": self.pass(),
            "obligations": self.obligations,
        })
    }
}

/// The structurally special tiles of a canonical system: the tile coded
/// identically zero and the tiles that make up the zeroth row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialTileSets {
    pub zero_tile: u32,
    /// sorted canonical ids of the zeroth-row tiles
    pub row_tiles: Vec<u32>,
}

impl SpecialTileSets {
    /// The zeroth-row tiles together with the zero tile, sorted.
    pub fn extended(&self) -> Vec<u32> {
        let mut v = self.row_tiles.clone();
        v.push(self.zero_tile);
        v.sort_unstable();
        v
    }

    pub fn is_row_tile(&self, t: u32) -> bool {
        self.row_tiles.binary_search(&t).is_ok()
    }

    pub fn in_extended(&self, t: u32) -> bool {
        t == self.zero_tile || self.is_row_tile(t)
    }

    /// The sets of the canonical paper-folding system over F_3.
    pub fn paper_folding() -> SpecialTileSets {
        SpecialTileSets {
            zero_tile: 5,
            row_tiles: vec![1, 2, 6, 7, 12, 13, 20, 29],
        }
    }
}

/// Scans the coding for the special-tile structure. A tile is a candidate if
/// its coded image contains an all-zero square of side `zero_side + 1`; the
/// candidates must then consist of exactly one identically-zero tile plus
/// tiles whose top `tel/2 + cid/2 - 1` rows are zero with the next row all
/// ones (the shape forced on tiles centered on the zeroth wall row).
/// Structural failures are report entries, not errors.
pub fn verify_coding_structure(
    coding: &Coding,
    cid: i64,
    zero_side: i64,
) -> (Option<SpecialTileSets>, Obligation) {
    const NAME: &str = "coding-zero-structure";
    let l = coding.l();
    let block = zero_side + 1;
    if block < 1 || block > l {
        return (
            None,
            Obligation::fail(NAME, format!("zero scan block {block} exceeds coding edge {l}"), None),
        );
    }
    let mut candidates = Vec::new();
    for id in 1..=coding.alphabet_size() as u32 {
        'scan: for a in 1..=l - block + 1 {
            for b in 1..=l - block + 1 {
                if (0..block).all(|x| (0..block).all(|y| coding.value(id, a + x, b + y) == 0)) {
                    candidates.push(id);
                    break 'scan;
                }
            }
        }
    }
    let zero_tiles: Vec<u32> = candidates
        .iter()
        .copied()
        .filter(|&id| coding.value_grid(id).iter().all(|&v| v == 0))
        .collect();
    if zero_tiles.len() != 1 {
        return (
            None,
            Obligation::fail(
                NAME,
                format!("expected exactly one identically-zero tile, found {zero_tiles:?}"),
                None,
            ),
        );
    }
    let zero_tile = zero_tiles[0];
    let top_rows = (l - 1) / 2 + cid / 2 - 1;
    let mut row_tiles = Vec::new();
    for &id in candidates.iter().filter(|&&id| id != zero_tile) {
        let zeros_ok = (1..=top_rows).all(|a| (1..=l).all(|b| coding.value(id, a, b) == 0));
        let ones_ok = (1..=l).all(|b| coding.value(id, top_rows + 1, b) == 1);
        if !(zeros_ok && ones_ok) {
            return (
                None,
                Obligation::fail(
                    NAME,
                    format!(
                        "tile {id} holds a {block}x{block} zero square but lacks the zeroth-row \
                         shape (top {top_rows} rows zero, next row ones)"
                    ),
                    None,
                ),
            );
        }
        row_tiles.push(id);
    }
    row_tiles.sort_unstable();
    let sets = SpecialTileSets { zero_tile, row_tiles };
    let ob = Obligation::ok(
        NAME,
        format!(
            "zero tile {}; zeroth-row tiles {:?}",
            sets.zero_tile, sets.row_tiles
        ),
    );
    (Some(sets), ob)
}

/// Checks the three structural facts about the substitution that drive the
/// row confinement argument: the zero tile reproduces itself, zeroth-row
/// tiles map to a zero top and a zeroth-row bottom, and the extended special
/// set is closed under taking preimages.
pub fn verify_substitution_structure(subst: &Substitution, sets: &SpecialTileSets) -> Obligation {
    const NAME: &str = "substitution-structure";
    let k = subst.k();
    let z = sets.zero_tile;
    if subst.image_grid(z).iter().any(|&t| t != z) {
        return Obligation::fail(NAME, format!("zero tile {z} image is not all {z}"), None);
    }
    for &s in &sets.row_tiles {
        for a in 1..k {
            for b in 1..=k {
                if subst.image(s, a, b) != z {
                    return Obligation::fail(
                        NAME,
                        format!("zeroth-row tile {s} image row {a} is not all zero tile"),
                        None,
                    );
                }
            }
        }
        for b in 1..=k {
            let t = subst.image(s, k, b);
            if !sets.is_row_tile(t) {
                return Obligation::fail(
                    NAME,
                    format!("zeroth-row tile {s} has bottom entry {t} outside the row set"),
                    None,
                );
            }
        }
    }
    for s in 1..=subst.alphabet_size() as u32 {
        let touches = subst.image_grid(s).iter().any(|&t| sets.in_extended(t));
        if touches && !sets.in_extended(s) {
            return Obligation::fail(
                NAME,
                format!("tile {s} is outside the special set but its image touches it"),
                None,
            );
        }
    }
    Obligation::ok(
        NAME,
        format!(
            "checked {} tiles: zero tile fixed, row tiles confined, special set closed",
            subst.alphabet_size()
        ),
    )
}

/// Expands the tiling over an inclusive tile rectangle straddling the axis
/// and checks the row confinement: negative rows are all the zero tile, the
/// zeroth row uses only zeroth-row tiles, and positive rows avoid the
/// extended special set.
pub fn verify_row_structure(
    sys: &TilingSystem,
    sets: &SpecialTileSets,
    tile_rows: (i64, i64),
    tile_cols: (i64, i64),
) -> Result<Obligation, Error> {
    const NAME: &str = "row-structure";
    if tile_rows.0 >= 0 || tile_rows.1 <= 0 {
        return Err(Error::Config(
            "row-structure region must straddle the zeroth tile row".into(),
        ));
    }
    let tiles = sys.expand(tile_rows.0, tile_rows.1, tile_cols.0, tile_cols.1)?;
    for i in tile_rows.0..=tile_rows.1 {
        for j in tile_cols.0..=tile_cols.1 {
            let t = tiles.at(i, j);
            let bad = if i < 0 {
                t != sets.zero_tile
            } else if i == 0 {
                !sets.is_row_tile(t)
            } else {
                sets.in_extended(t)
            };
            if bad {
                return Ok(Obligation::fail(
                    NAME,
                    format!("tile {t} violates the row confinement at tile ({i}, {j})"),
                    Some((i, j)),
                ));
            }
        }
    }
    Ok(Obligation::ok(
        NAME,
        format!(
            "rows {}..{} x cols {}..{} confined",
            tile_rows.0, tile_rows.1, tile_cols.0, tile_cols.1
        ),
    ))
}

/// Verifies that a value grid is a Number Wall by direct identity checking,
/// sharing no entry computation with the wall builder: the sentinel band is
/// in place, the cross identity holds at every interior cell, zeros form
/// square windows, and every window's inner and outer frames satisfy the
/// geometric-ratio, cross-ratio and outer-frame laws (all stated without
/// divisions).
pub fn verify_frame_constraints(grid: &Grid<u8>, modulus: Modulus) -> Result<Obligation, Error> {
    const NAME: &str = "frame-constraints";
    let p = modulus;
    if grid.row_lo() > -2 {
        return Err(Error::Config(
            "frame check needs the sentinel rows m <= -1 in the grid".into(),
        ));
    }
    // sentinel band: rows below -1 vanish, row -1 is all ones
    for n in grid.col_lo()..=grid.col_hi() {
        for m in grid.row_lo()..=-2 {
            if grid.at(m, n) != 0 {
                return Ok(Obligation::fail(
                    NAME,
                    format!("sentinel row {m} is not zero at column {n}"),
                    Some((m, n)),
                ));
            }
        }
        if grid.at(-1, n) != 1 {
            return Ok(Obligation::fail(
                NAME,
                format!("row -1 is not one at column {n}"),
                Some((-1, n)),
            ));
        }
    }

    // cross identity at every interior cell: c^2 = up * down + left * right
    let mut cross_cells = 0u64;
    for m in (grid.row_lo() + 1).max(0)..grid.row_hi() {
        for n in grid.col_lo() + 1..grid.col_hi() {
            let c = grid.at(m, n) as u64;
            let up = grid.at(m - 1, n) as u64;
            let down = grid.at(m + 1, n) as u64;
            let left = grid.at(m, n - 1) as u64;
            let right = grid.at(m, n + 1) as u64;
            if p.mul_raw(c, c) != p.add_raw(p.mul_raw(up, down), p.mul_raw(left, right)) {
                return Ok(Obligation::fail(
                    NAME,
                    format!("cross identity fails at ({m}, {n})"),
                    Some((m, n)),
                ));
            }
            cross_cells += 1;
        }
    }

    // window geometry: zeros occur only as squares (the census errors on any
    // non-square zero component, which here is a verification failure)
    let region = Region::new(grid.row_lo(), grid.row_hi(), grid.col_lo(), grid.col_hi())?;
    let report = match census_grid(grid, region) {
        Ok(r) => r,
        Err(Error::Internal(msg)) => {
            return Ok(Obligation::fail(NAME, format!("zero shape violation: {msg}"), None))
        }
        Err(e) => return Err(e),
    };

    // frame laws around every complete window in the non-negative rows
    let mut windows_checked = 0u64;
    for w in report.windows.iter().filter(|w| !w.broken && w.top >= 0) {
        let g = w.side;
        let delta = g + 1;
        let (t, le) = (w.top, w.left);
        let val = |m: i64, n: i64| grid.try_get(m, n).map(|&v| v as u64);
        let a = |k: i64| val(t - 1, le - 1 + k);
        let b = |k: i64| val(t - 1 + k, le - 1);
        let c = |k: i64| val(t + g - k, le + g);
        let d = |k: i64| val(t + g, le + g - k);
        let e = |k: i64| val(t - 2, le - 1 + k);
        let f = |k: i64| val(t - 1 + k, le - 2);
        let gg = |k: i64| val(t + g - k, le + g + 1);
        let h = |k: i64| val(t + g + 1, le + g - k);
        let fail = |what: &str| {
            Ok(Obligation::fail(
                NAME,
                format!("{what} fails at the window at ({t}, {le}) of side {g}"),
                Some((t, le)),
            ))
        };

        // each inner frame edge is a geometric sequence
        for edge in [&a as &dyn Fn(i64) -> Option<u64>, &b, &c, &d] {
            for k in 1..delta {
                if let (Some(x0), Some(x1), Some(x2)) = (edge(k - 1), edge(k), edge(k + 1)) {
                    if p.mul_raw(x2, x0) != p.mul_raw(x1, x1) {
                        return fail("inner frame geometric law");
                    }
                }
            }
        }
        // opposite-edge cross ratio: A_k D_k = (-1)^((delta-1) k) B_k C_k
        for k in 0..=delta {
            if let (Some(ak), Some(bk), Some(ck), Some(dk)) = (a(k), b(k), c(k), d(k)) {
                let lhs = p.mul_raw(ak, dk);
                let rhs = p.mul_raw(p.sign((delta - 1) * k), p.mul_raw(bk, ck));
                if lhs != rhs {
                    return fail("inner frame cross ratio");
                }
            }
        }
        // outer frame law, cleared of denominators: with the edge ratios
        // Q = B1/B0, P = A1/A0, R = C1/C0, S = D1/D0 the identity
        // Q E_k/A_k + (-1)^k P F_k/B_k = R H_k/D_k + (-1)^k S G_k/C_k
        // becomes, after multiplying by A0 B0 C0 D0 A_k B_k C_k D_k:
        for k in 0..=delta {
            let needed = (
                a(0), b(0), c(0), d(0), a(1), b(1), c(1), d(1),
                a(k), b(k), c(k), d(k), e(k), f(k), gg(k), h(k),
            );
            if let (
                Some(a0), Some(b0), Some(c0), Some(d0), Some(a1), Some(b1), Some(c1), Some(d1),
                Some(ak), Some(bk), Some(ck), Some(dk), Some(ek), Some(fk), Some(gk), Some(hk),
            ) = needed
            {
                let prod = |vs: &[u64]| vs.iter().fold(1u64, |acc, &v| p.mul_raw(acc, v));
                let sgn = p.sign(k);
                let lhs = p.add_raw(
                    prod(&[b1, ek, a0, c0, d0, bk, ck, dk]),
                    p.mul_raw(sgn, prod(&[a1, fk, b0, c0, d0, ak, ck, dk])),
                );
                let rhs = p.add_raw(
                    prod(&[c1, hk, a0, b0, d0, ak, bk, ck]),
                    p.mul_raw(sgn, prod(&[d1, gk, a0, b0, c0, ak, bk, dk])),
                );
                if lhs != rhs {
                    return fail("outer frame law");
                }
            }
        }
        windows_checked += 1;
    }
    Ok(Obligation::ok(
        NAME,
        format!("{cross_cells} cross identities and {windows_checked} window frames verified"),
    ))
}

/// Census over the non-negative rows of a value grid: the maximal complete
/// zero window must have exactly the expected side, and at least one window
/// of that side must be present.
pub fn verify_bounded_deficiency(grid: &Grid<u8>, expected_side: i64) -> Result<Obligation, Error> {
    const NAME: &str = "bounded-deficiency";
    if grid.row_hi() < 0 {
        return Err(Error::Config("grid has no non-negative rows".into()));
    }
    let region = Region::new(0, grid.row_hi(), grid.col_lo(), grid.col_hi())?;
    let report = census_grid(grid, region)?;
    let max_side = report
        .windows
        .iter()
        .filter(|w| !w.broken)
        .map(|w| w.side)
        .max()
        .unwrap_or(0);
    if max_side != expected_side {
        return Ok(Obligation::fail(
            NAME,
            format!("maximal complete window side is {max_side}, expected {expected_side}"),
            None,
        ));
    }
    Ok(Obligation::ok(
        NAME,
        format!(
            "max window side {expected_side}; counts by deficiency {:?}",
            report.counts
        ),
    ))
}

/// Coded values of a tile's row that decodes to wall row 0, as laid out by
/// the centered decoding: coding row (l-1)/2 + cid/2 + 1 restricted to the
/// centered cid-wide column block.
fn zeroth_row_code(coding: &Coding, cid: i64, tile: u32) -> Vec<u8> {
    let l = coding.l();
    let row = (l - 1) / 2 + cid / 2 + 1;
    let off = (l + 1) / 2 - cid / 2;
    (1..=cid).map(|b| coding.value(tile, row, off + b)).collect()
}

/// Verifies that the decoded zeroth row is the input sequence.
///
/// Along the way the zeroth-row tiles are checked to form a self-contained
/// one-dimensional substitution system (bottom rows of their images), whose
/// quotient under equal zeroth-row codes is well-defined. If a reference
/// one-dimensional system is supplied, the tile system is matched against
/// its fourth power: positions identify tiles with reference letters, the
/// coded images must agree letterwise, and the fourth power must have the
/// same fixed point as the reference system itself. Finally the decoded row
/// is compared pointwise against the sequence on columns |n| <= half_width.
pub fn verify_zeroth_row(
    result: &DiscoveryResult,
    sets: &SpecialTileSets,
    source: &SequenceSource,
    half_width: i64,
    reference: Option<&SubstSystem1D>,
) -> Obligation {
    const NAME: &str = "zeroth-row";
    let sys = match result.system() {
        Ok(s) => s,
        Err(e) => return Obligation::fail(NAME, format!("system construction failed: {e}"), None),
    };
    let k = result.params.k;
    let cid = result.params.cid;
    let subst = &result.substitution;
    let coding = &result.coding;

    // the zeroth-row tiles with the bottom rows of their images form a
    // one-dimensional substitution system seeded by the base tiles
    let letters = &sets.row_tiles;
    let letter_of: HashMap<u32, u8> = letters
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i as u8))
        .collect();
    let mut psi = Vec::with_capacity(letters.len());
    for &s in letters {
        let mut word = Vec::with_capacity(k as usize);
        for bpos in 1..=k {
            let t = subst.image(s, k, bpos);
            match letter_of.get(&t) {
                Some(&lt) => word.push(lt),
                None => {
                    return Obligation::fail(
                        NAME,
                        format!("zeroth-row tile {s} maps outside the row set (to {t})"),
                        None,
                    )
                }
            }
        }
        psi.push(word);
    }
    let rho: Vec<u64> = letters.iter().map(|&t| t as u64).collect();
    let seed_left = result.tiles.at(0, 0);
    let seed_right = result.tiles.at(0, 1);
    let (seed_left, seed_right) = match (letter_of.get(&seed_left), letter_of.get(&seed_right)) {
        (Some(&a), Some(&b)) => (a, b),
        _ => {
            return Obligation::fail(
                NAME,
                "base tiles of the zeroth row are outside the row set",
                None,
            )
        }
    };
    let row_sys = match SubstSystem1D::new(psi, rho, seed_left, seed_right) {
        Ok(s) => s,
        Err(e) => {
            return Obligation::fail(NAME, format!("zeroth-row substitution invalid: {e}"), None)
        }
    };

    // the one-dimensional fixed point reproduces the zeroth tile row
    let tile_span = half_width / cid + 2;
    let row_tiles = match sys.expand(0, 0, -tile_span, tile_span) {
        Ok(g) => g,
        Err(e) => return Obligation::fail(NAME, format!("expansion failed: {e}"), None),
    };
    for j in -tile_span..=tile_span {
        if row_sys.value(j) != row_tiles.at(0, j) as u64 {
            return Obligation::fail(
                NAME,
                format!("one-dimensional fixed point differs from tile row at {j}"),
                Some((0, j)),
            );
        }
    }

    // quotient under equal zeroth-row codes must be compatible with the
    // substitution: tiles with equal codes map to pairwise equal-code words
    let codes: Vec<Vec<u8>> = letters
        .iter()
        .map(|&t| zeroth_row_code(coding, cid, t))
        .collect();
    let class: Vec<usize> = (0..letters.len())
        .map(|i| (0..letters.len()).position(|j| codes[j] == codes[i]).unwrap())
        .collect();
    for i in 0..letters.len() {
        for j in 0..letters.len() {
            if class[i] == class[j] {
                let wi = row_sys.image(i as u8);
                let wj = row_sys.image(j as u8);
                let same = wi
                    .iter()
                    .zip(wj)
                    .all(|(&x, &y)| class[x as usize] == class[y as usize]);
                if !same {
                    return Obligation::fail(
                        NAME,
                        format!(
                            "tiles {} and {} share a zeroth-row code but substitute differently",
                            letters[i], letters[j]
                        ),
                        None,
                    );
                }
            }
        }
    }

    // match against the reference one-dimensional system, if given
    if let Some(reference) = reference {
        let power = {
            // choose e with k^e = cid so one reference letter spans one tile
            let rk = reference.image(0).len() as i64;
            let mut e = 0u32;
            let mut span = 1i64;
            while span < cid {
                span *= rk;
                e += 1;
            }
            if span != cid {
                return Obligation::fail(
                    NAME,
                    format!("reference factor {rk} does not reach the center distance {cid}"),
                    None,
                );
            }
            reference.power(e)
        };
        // positions identify tiles with reference letters
        let mut tile_to_letter: HashMap<u32, u8> = HashMap::new();
        for j in -tile_span..=tile_span {
            let tile = row_tiles.at(0, j);
            let letter = reference.letter(j);
            match tile_to_letter.insert(tile, letter) {
                Some(prev) if prev != letter => {
                    return Obligation::fail(
                        NAME,
                        format!("tile {tile} appears at positions with different reference letters"),
                        Some((0, j)),
                    )
                }
                _ => {}
            }
        }
        // the identified letters must reproduce the coded images: the
        // zeroth-row code of each tile equals the coding of the reference
        // letters spanning it
        let p = source.modulus();
        for (&tile, &letter) in &tile_to_letter {
            let idx = letter_of[&tile] as usize;
            let word = power.image(letter);
            let want: Vec<u8> = word.iter().map(|&w| p.reduce(power.code(w) as i64) as u8).collect();
            if codes[idx] != want {
                return Obligation::fail(
                    NAME,
                    format!("tile {tile} code differs from the reference coding of letter {letter}"),
                    None,
                );
            }
        }
        // the power system has the same fixed point as the reference
        for n in -half_width..=half_width {
            if power.letter(n) != reference.letter(n) {
                return Obligation::fail(
                    NAME,
                    format!("reference power fixed point differs at position {n}"),
                    Some((0, n)),
                );
            }
        }
    }

    // the decoded zeroth row is the input sequence
    let decoded = match sys.decode(0, 0, -half_width, half_width) {
        Ok(g) => g,
        Err(e) => return Obligation::fail(NAME, format!("decode failed: {e}"), None),
    };
    for n in -half_width..=half_width {
        let want = match source.eval(n) {
            Ok(v) => v,
            Err(e) => return Obligation::fail(NAME, format!("sequence evaluation failed: {e}"), None),
        };
        if decoded.at(0, n) as u64 != want {
            return Obligation::fail(
                NAME,
                format!("decoded zeroth row differs from the sequence at column {n}"),
                Some((0, n)),
            );
        }
    }
    Obligation::ok(
        NAME,
        format!(
            "zeroth row equals the sequence on |n| <= {half_width}; {} row tiles matched",
            letters.len()
        ),
    )
}

/// Everything needed to run the full verification pipeline on a sequence.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub params: DiscoveryParams,
    /// expected maximal complete-window side in the non-negative rows
    pub expected_side: i64,
    /// decoded region for the frame and deficiency checks (rows must include
    /// the sentinel band)
    pub verify_rows: (i64, i64),
    pub verify_cols: (i64, i64),
    /// half width of the zeroth-row comparison
    pub row_half_width: i64,
    /// optional reference one-dimensional system for the zeroth row
    pub reference: Option<SubstSystem1D>,
}

impl PipelineConfig {
    /// The full-scale paper-folding run over F_3.
    pub fn paper_folding() -> PipelineConfig {
        PipelineConfig {
            params: DiscoveryParams::new(2, 12, 8, -55, 2400, -5220, 5220)
                .expect("built-in parameters are valid"),
            expected_side: 3,
            verify_rows: (-10, 120),
            verify_cols: (-200, 200),
            row_half_width: 10_000,
            reference: Some(SubstSystem1D::paper_folding()),
        }
    }

    /// The pagoda run over F_3.
    pub fn pagoda() -> PipelineConfig {
        PipelineConfig {
            params: DiscoveryParams::new(2, 12, 8, -55, 2400, -5220, 5220)
                .expect("built-in parameters are valid"),
            expected_side: 1,
            verify_rows: (-10, 120),
            verify_cols: (-200, 200),
            row_half_width: 10_000,
            reference: None,
        }
    }
}

/// Builds the wall, discovers and canonicalizes the tiling, and runs every
/// verification obligation, aggregating a certificate. Stage errors (wall
/// construction, discovery, canonicalization) are propagated; verification
/// failures appear as failed obligations.
pub fn full_pipeline(
    source: &SequenceSource,
    cfg: &PipelineConfig,
) -> Result<(Certificate, DiscoveryResult), Error> {
    let prm = cfg.params;
    let segment = wall::build(source, prm.b, prm.c, prm.d, prm.a)?;
    let values = segment.values((prm.a, prm.b), (prm.c, prm.d))?;
    let discovered = discover(&values, prm)?;
    let canon = canonical_order(&discovered)?;

    let mut cert = Certificate::new();
    cert.push(Obligation::ok(
        "closure",
        format!(
            "{} tiles, {} tetrads certified on ({:?}, {:?}]",
            canon.alphabet_size(),
            canon.tetrad_count(),
            canon.closure_lo,
            canon.closure_hi
        ),
    ));

    let (sets, coding_ob) = verify_coding_structure(&canon.coding, prm.cid, cfg.expected_side);
    cert.push(coding_ob);
    let sets = match sets {
        Some(s) => s,
        None => return Ok((cert, canon)),
    };
    cert.push(verify_substitution_structure(&canon.substitution, &sets));

    let sys = canon.system()?;
    let (lo, hi) = (canon.closure_lo, canon.closure_hi);
    let violation = sys.check_consistency(lo.0 + 1, hi.0, lo.1 + 1, hi.1)?;
    cert.push(match violation {
        None => Obligation::ok(
            "consistency",
            format!("coded overlaps agree on ({lo:?}, {hi:?}]"),
        ),
        Some(v) => Obligation::fail(
            "consistency",
            format!("overlap disagreement on axis {} at {:?}", v.axis, v.at),
            Some((v.tile_row, v.tile_col)),
        ),
    });
    cert.push(verify_row_structure(
        &sys,
        &sets,
        (lo.0 + 1, hi.0),
        (lo.1 + 1, hi.1),
    )?);

    let decoded = sys.decode(
        cfg.verify_rows.0,
        cfg.verify_rows.1,
        cfg.verify_cols.0,
        cfg.verify_cols.1,
    )?;
    cert.push(verify_frame_constraints(&decoded, source.modulus())?);
    cert.push(verify_bounded_deficiency(&decoded, cfg.expected_side)?);
    cert.push(verify_zeroth_row(
        &canon,
        &sets,
        source,
        cfg.row_half_width,
        cfg.reference.as_ref(),
    ));
    Ok((cert, canon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::SequenceSource;

    fn m3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    fn tiny_coding(mutate_ones_row: bool) -> Coding {
        // l = 5, cid = 2: zeroth-row tiles have top 2 rows zero, third row ones
        let l = 5usize;
        let zero = vec![0u8; l * l];
        let mut row_tile = vec![2u8; l * l];
        for b in 0..l {
            row_tile[b] = 0;
            row_tile[l + b] = 0;
            row_tile[2 * l + b] = if mutate_ones_row && b == 3 { 2 } else { 1 };
        }
        let generic = vec![1u8; l * l];
        Coding::new(5, vec![zero, row_tile, generic]).unwrap()
    }

    #[test]
    fn coding_structure_scan_finds_sets() {
        let (sets, ob) = verify_coding_structure(&tiny_coding(false), 2, 1);
        assert!(ob.pass, "{}", ob.detail);
        let sets = sets.unwrap();
        assert_eq!(sets.zero_tile, 1);
        assert_eq!(sets.row_tiles, vec![2]);
        assert_eq!(sets.extended(), vec![1, 2]);
    }

    #[test]
    fn coding_structure_rejects_mutated_ones_row() {
        let (sets, ob) = verify_coding_structure(&tiny_coding(true), 2, 1);
        assert!(sets.is_none());
        assert!(!ob.pass);
        assert!(ob.detail.contains("tile 2"));
    }

    #[test]
    fn substitution_structure_checks() {
        let sets = SpecialTileSets {
            zero_tile: 1,
            row_tiles: vec![2],
        };
        let good = Substitution::new(
            2,
            vec![vec![1, 1, 1, 1], vec![1, 1, 2, 2], vec![3, 3, 3, 3]],
        )
        .unwrap();
        assert!(verify_substitution_structure(&good, &sets).pass);

        let bad_zero = Substitution::new(
            2,
            vec![vec![1, 1, 1, 3], vec![1, 1, 2, 2], vec![3, 3, 3, 3]],
        )
        .unwrap();
        assert!(!verify_substitution_structure(&bad_zero, &sets).pass);

        let leaking = Substitution::new(
            2,
            vec![vec![1, 1, 1, 1], vec![1, 1, 2, 2], vec![2, 3, 3, 3]],
        )
        .unwrap();
        assert!(!verify_substitution_structure(&leaking, &sets).pass);
    }

    #[test]
    fn frame_constraints_accept_real_walls() {
        for src in [
            SequenceSource::paper_folding(m3()),
            SequenceSource::pagoda(m3()),
        ] {
            let w = wall::build(&src, 30, -35, 35, -4).unwrap();
            let grid = w.values((-4, 30), (-35, 35)).unwrap();
            let ob = verify_frame_constraints(&grid, m3()).unwrap();
            assert!(ob.pass, "{}", ob.detail);
        }
    }

    #[test]
    fn frame_constraints_reject_flipped_entry() {
        let src = SequenceSource::paper_folding(m3());
        let w = wall::build(&src, 25, -25, 25, -4).unwrap();
        let mut grid = w.values((-4, 25), (-25, 25)).unwrap();
        // flip a nonzero entry to a different nonzero residue
        let (fm, fn_) = (3..=20i64)
            .flat_map(|m| (-10..=10i64).map(move |n| (m, n)))
            .find(|&(m, n)| grid.at(m, n) != 0)
            .unwrap();
        let old = grid.at(fm, fn_);
        grid.set(fm, fn_, if old == 1 { 2 } else { 1 });
        let ob = verify_frame_constraints(&grid, m3()).unwrap();
        assert!(!ob.pass);
        assert!(ob.at.is_some());
    }

    #[test]
    fn frame_constraints_reject_zeroed_entry() {
        let src = SequenceSource::paper_folding(m3());
        let w = wall::build(&src, 25, -25, 25, -4).unwrap();
        let mut grid = w.values((-4, 25), (-25, 25)).unwrap();
        // stamping a zero over a window frame entry merges it with the window
        // into a non-square zero shape
        let (fm, fn_) = (0..=20i64)
            .flat_map(|m| (-10..=10i64).map(move |n| (m, n)))
            .find(|&(m, n)| grid.at(m, n) != 0 && grid.at(m + 1, n) == 0)
            .unwrap();
        grid.set(fm, fn_, 0);
        let ob = verify_frame_constraints(&grid, m3()).unwrap();
        assert!(!ob.pass);
    }

    #[test]
    fn bounded_deficiency_measures_window_sides() {
        let src = SequenceSource::paper_folding(m3());
        let w = wall::build(&src, 39, -41, 41, -2).unwrap();
        let grid = w.values((-2, 39), (-41, 41)).unwrap();
        assert!(verify_bounded_deficiency(&grid, 3).unwrap().pass);
        assert!(!verify_bounded_deficiency(&grid, 2).unwrap().pass);

        let src = SequenceSource::pagoda(m3());
        let w = wall::build(&src, 39, -41, 41, -2).unwrap();
        let grid = w.values((-2, 39), (-41, 41)).unwrap();
        assert!(verify_bounded_deficiency(&grid, 1).unwrap().pass);
    }

    #[test]
    fn certificate_aggregation_and_json() {
        let mut cert = Certificate::new();
        cert.push(Obligation::ok("a", "fine"));
        assert!(cert.pass());
        cert.push(Obligation::fail("b", "broken", Some((3, -4))));
        assert!(!cert.pass());
        assert!(cert.get("b").is_some());
        let json = cert.to_json();
        assert_eq!(json["pass"], false);
        assert_eq!(json["obligations"][1]["at"][1], -4);
    }
}
