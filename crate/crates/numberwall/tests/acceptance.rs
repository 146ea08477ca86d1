//! Acceptance gate: ten end-to-end criteria pinning the published reference
//! values for the paper-folding and pagoda Number Walls over F_3, the
//! discovered tiling system, the verification certificate, and the
//! continued-fraction cross-checks.
//!
//! Each test prints one `criterion N: PASS` line (visible with
//! `cargo test -- --nocapture`); a failing criterion fails its test.

use std::collections::HashSet;

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use numberwall::discovery::{verify_initial_conditions, DiscoveryResult};
use numberwall::field::Modulus;
use numberwall::laurent::{
    check_quadratic_f2, continued_fraction, deficiency_via_cf, LaurentTruncation, QuadraticId,
};
use numberwall::seq::SequenceSource;
use numberwall::tiling::cover_size;
use numberwall::verify::{
    full_pipeline, verify_coding_structure, verify_frame_constraints, Certificate, PipelineConfig,
};
use numberwall::wall::{self, oracle_entry};
use numberwall::windows::{census, Region};

fn m3() -> Modulus {
    Modulus::new(3).unwrap()
}

struct Pipeline {
    source: SequenceSource,
    cert: Certificate,
    result: DiscoveryResult,
}

static PF: Lazy<Pipeline> = Lazy::new(|| {
    let source = SequenceSource::paper_folding(m3());
    let (cert, result) = full_pipeline(&source, &PipelineConfig::paper_folding())
        .expect("paper-folding pipeline must run");
    Pipeline {
        source,
        cert,
        result,
    }
});

static PAGODA: Lazy<Pipeline> = Lazy::new(|| {
    let source = SequenceSource::pagoda(m3());
    let (cert, result) =
        full_pipeline(&source, &PipelineConfig::pagoda()).expect("pagoda pipeline must run");
    Pipeline {
        source,
        cert,
        result,
    }
});

fn random_source(p: u64, lo: i64, len: usize, rng: &mut ChaCha8Rng) -> SequenceSource {
    let m = Modulus::new(p).unwrap();
    let values: Vec<u64> = (0..len).map(|_| rng.gen_range(0..p)).collect();
    SequenceSource::from_values(m, lo, values).unwrap()
}

#[test]
fn criterion_01_builder_matches_determinant_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed_0000_0001);
    for p in [2u64, 3, 5] {
        for round in 0..50 {
            let src = random_source(p, -160, 320, &mut rng);
            let segment = wall::build(&src, 59, -60, 59, -2).unwrap();
            for m in -2..=59 {
                for n in -60..=59 {
                    let got = segment
                        .entry(m, n)
                        .unwrap_or_else(|| panic!("invalid entry ({m}, {n}) p={p} round {round}"));
                    let want = oracle_entry(&src, m, n).unwrap();
                    assert_eq!(got, want, "p={p} round {round} entry ({m}, {n})");
                }
            }
        }
    }
    println!("criterion 1 (builder vs determinant oracle, 50 sequences x F_2/F_3/F_5): PASS");
}

#[test]
fn criterion_02_paper_folding_deficiency_four() {
    let src = SequenceSource::paper_folding(m3());
    let segment = wall::build(&src, 2400, -5220, 5220, -55).unwrap();
    let region = Region::new(0, 2400, -5220, 5220).unwrap();
    let report = census(&segment, region).unwrap();
    let max_side = report
        .windows
        .iter()
        .filter(|w| !w.broken)
        .map(|w| w.side)
        .max()
        .unwrap_or(0);
    assert_eq!(max_side, 3, "max unbroken window side");
    assert_eq!(report.max_deficiency(0), 4);
    assert!(
        report
            .windows
            .iter()
            .any(|w| !w.broken && w.top == 0 && w.left == 0 && w.side == 3),
        "side-3 window at the origin"
    );
    println!("criterion 2 (paper-folding wall rows 0..2400: max window side 3, origin window): PASS");
}

#[test]
fn criterion_03_discovery_reproduces_reference_tiling() {
    let pf = &*PF;
    let res = &pf.result;
    assert_eq!(res.alphabet_size(), 2353, "tile count");
    assert_eq!(res.tetrad_count(), 6721, "tetrad count");
    assert_eq!(res.seeds, [1, 2, 3, 4], "prolongable seeds");
    assert!(verify_initial_conditions(res), "seed placement at origin");

    // the 13-coding is injective on the alphabet
    let distinct: HashSet<&[u8]> = (1..=res.alphabet_size() as u32)
        .map(|t| res.coding.value_grid(t))
        .collect();
    assert_eq!(distinct.len(), res.alphabet_size(), "coding injectivity");

    // 5-consistency, checked directly on the certified region
    let sys = res.system().unwrap();
    assert_eq!(sys.check_consistency(-3, 149, -325, 325).unwrap(), None);
    println!("criterion 3 (discovery: 2353 tiles, 6721 tetrads, seeds 1..4, injective 5-consistent coding): PASS");
}

/// Reference coding row (the zeroth wall row inside each tile image) and
/// bottom substitution row for the eight tiles appearing in the zeroth row.
const ZEROTH_ROW_TABLE: [(u32, &str, [u32; 2]); 8] = [
    (2, "1100010011000", [2, 7]),
    (13, "1100010011100", [2, 12]),
    (7, "1100011011000", [13, 1]),
    (12, "1100011011100", [13, 29]),
    (20, "1110010011000", [20, 7]),
    (6, "1110010011100", [20, 12]),
    (1, "1110011011000", [6, 1]),
    (29, "1110011011100", [6, 29]),
];

/// Published portion of the tiling, rows -1..=10 by columns -10..=11.
const TILE_GRID_EXCERPT: [[u32; 22]; 12] = [
    [5; 22],
    [
        12, 6, 29, 20, 7, 13, 29, 20, 12, 6, 1, 2, 7, 13, 1, 2, 12, 6, 1, 2, 7, 13,
    ],
    [
        41, 96, 80, 65, 52, 40, 30, 21, 14, 8, 3, 4, 9, 15, 22, 31, 41, 8, 3, 4, 9, 40,
    ],
    [
        134, 114, 97, 81, 66, 53, 42, 32, 23, 16, 10, 11, 17, 24, 33, 43, 54, 67, 10, 11, 115, 135,
    ],
    [
        156, 136, 116, 98, 82, 68, 55, 44, 34, 25, 18, 19, 26, 35, 45, 56, 69, 83, 99, 117, 137,
        157,
    ],
    [
        179, 158, 138, 118, 100, 84, 70, 57, 46, 36, 27, 28, 37, 47, 58, 71, 85, 101, 119, 139,
        159, 180,
    ],
    [
        204, 181, 160, 140, 120, 102, 86, 72, 59, 48, 38, 39, 49, 60, 73, 87, 103, 121, 141, 161,
        182, 205,
    ],
    [
        230, 206, 183, 162, 142, 122, 104, 88, 74, 61, 50, 51, 62, 75, 89, 105, 123, 143, 163, 184,
        207, 231,
    ],
    [
        256, 232, 208, 185, 164, 144, 124, 106, 90, 76, 63, 64, 77, 91, 107, 125, 145, 165, 186,
        209, 233, 257,
    ],
    [
        70, 258, 234, 210, 105, 166, 146, 126, 108, 92, 78, 79, 93, 109, 127, 147, 167, 187, 211,
        235, 259, 283,
    ],
    [
        86, 72, 260, 236, 212, 188, 168, 148, 128, 110, 94, 95, 111, 129, 149, 169, 189, 213, 237,
        261, 284, 308,
    ],
    [
        104, 88, 285, 262, 238, 214, 190, 170, 150, 130, 112, 113, 131, 151, 171, 191, 215, 239,
        263, 286, 309, 337,
    ],
];

#[test]
fn criterion_04_special_tiles_and_reference_tables() {
    let pf = &*PF;
    let res = &pf.result;

    // the structural scan recovers the special tile sets
    let (sets, ob) = verify_coding_structure(&res.coding, 8, 3);
    assert!(ob.pass, "{}", ob.detail);
    let sets = sets.unwrap();
    assert_eq!(sets.zero_tile, 5);
    assert_eq!(sets.row_tiles, vec![1, 2, 6, 7, 12, 13, 20, 29]);

    // the zero tile codes to all zeros and substitutes into itself
    assert!(res.coding.value_grid(5).iter().all(|&v| v == 0));
    assert!(res.substitution.image_grid(5).iter().all(|&t| t == 5));

    // reference coding rows and bottom substitution rows of the row tiles
    for (tile, code, bottom) in ZEROTH_ROW_TABLE {
        let row: String = (1..=13)
            .map(|b| char::from(b'0' + res.coding.value(tile, 11, b)))
            .collect();
        assert_eq!(row, code, "coding row of tile {tile}");
        let got = [res.substitution.image(tile, 2, 1), res.substitution.image(tile, 2, 2)];
        assert_eq!(got, bottom, "substitution bottom row of tile {tile}");
    }

    // published tile-grid excerpt, rows -1..=10 by columns -10..=11
    let sys = res.system().unwrap();
    let tiles = sys.expand(-1, 10, -10, 11).unwrap();
    for (i, row) in TILE_GRID_EXCERPT.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let (m, n) = (i as i64 - 1, j as i64 - 10);
            assert_eq!(tiles.at(m, n), want, "tile at ({m}, {n})");
        }
    }
    println!("criterion 4 (special tile sets, reference coding rows, tile-grid excerpt): PASS");
}

#[test]
fn criterion_05_certificate_and_independent_frame_check() {
    let pf = &*PF;
    assert!(pf.cert.pass(), "certificate: {:#}", pf.cert.to_json());
    for name in [
        "closure",
        "coding-zero-structure",
        "substitution-structure",
        "consistency",
        "row-structure",
        "frame-constraints",
        "bounded-deficiency",
        "zeroth-row",
    ] {
        let ob = pf.cert.get(name).unwrap_or_else(|| panic!("missing obligation {name}"));
        assert!(ob.pass, "{name}: {}", ob.detail);
    }

    // the frame checker knows nothing of the wall builder: run it on a
    // freshly decoded portion of the tiling
    let sys = pf.result.system().unwrap();
    let decoded = sys.decode(-4, 41, -45, 45).unwrap();
    let ob = verify_frame_constraints(&decoded, m3()).unwrap();
    assert!(ob.pass, "{}", ob.detail);

    // the decoded zeroth row is the original sequence out to |n| <= 10^4
    let c = 8;
    let tiles = sys
        .expand(-1, 1, -10_000 / c - 2, 10_000 / c + 2)
        .unwrap();
    for n in -10_000..=10_000 {
        assert_eq!(
            u64::from(sys.decode_at(&tiles, 0, n)),
            pf.source.eval(n).unwrap(),
            "zeroth row at {n}"
        );
    }
    println!("criterion 5 (full certificate PASS, independent frame check, zeroth row): PASS");
}

#[test]
fn criterion_06_pagoda_isolated_zeros() {
    let src = SequenceSource::pagoda(m3());
    let segment = wall::build(&src, 499, -1000, 999, -2).unwrap();
    let report = census(&segment, Region::new(0, 499, -1000, 999).unwrap()).unwrap();
    assert!(
        report.windows.iter().filter(|w| !w.broken).all(|w| w.side == 1),
        "pagoda windows must be isolated zeros"
    );
    assert!(report.counts.keys().all(|&d| d == 2));
    assert!(!report.counts.is_empty(), "pagoda wall does contain zeros");

    let pagoda = &*PAGODA;
    assert!(pagoda.cert.pass(), "certificate: {:#}", pagoda.cert.to_json());
    println!("criterion 6 (pagoda wall: only side-1 windows; pagoda pipeline PASS): PASS");
}

/// Deficiency bound from the continued-fraction side, restricted to partial
/// quotients whose convergent depth stays within `max_depth`.
fn cf_bound(source: &SequenceSource, shifts: i64, precision: usize, max_depth: i64) -> i64 {
    let mut best = 1i64;
    for k in 0..=shifts {
        let theta = LaurentTruncation::from_source(source, k, precision).unwrap();
        let profile = continued_fraction(&theta, precision + 1);
        let mut depth = 0i64;
        for &d in &profile.degrees[..profile.certified] {
            let d = d as i64;
            if depth + d > max_depth {
                break;
            }
            depth += d;
            if d >= 2 {
                best = best.max(d);
            }
        }
    }
    best
}

#[test]
fn criterion_07_continued_fraction_cross_oracle() {
    let pf = SequenceSource::paper_folding(m3());
    let pagoda = SequenceSource::pagoda(m3());
    assert_eq!(deficiency_via_cf(&pf, 64, 2048).unwrap(), 4);
    assert_eq!(deficiency_via_cf(&pagoda, 64, 2048).unwrap(), 2);

    // On random sequences the quotient degrees must agree with the zero
    // windows of the wall: a certified quotient of degree d at shift k is a
    // run of d-1 zeros on the wall diagonal n - m = k + 1, and conversely.
    const R: i64 = 40; // depth limit (Hankel order) for certified quotients
    const K: i64 = 16; // shift band
    const N: usize = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed_0000_0007);
    for round in 0..100 {
        let src = random_source(3, -250, 560, &mut rng);
        let from_cf = cf_bound(&src, K, N, R);

        let segment = wall::build(&src, 44, -60, 110, -2).unwrap();
        let report = census(&segment, Region::new(0, 42, -60, 110).unwrap()).unwrap();
        let mut from_wall = 1i64;
        for w in report.windows.iter().filter(|w| !w.broken) {
            // central diagonal shift of the window, and the run of diagonal
            // zeros it exposes at each shift of the band
            let central = w.left - w.top - 1;
            for k in 0..=K {
                let dk = k - central;
                let run = w.side - dk.abs();
                let run_bottom = w.top + w.side - 1 - dk.max(0);
                if run >= 1 && run_bottom + 2 <= R {
                    from_wall = from_wall.max(run + 1);
                }
            }
        }
        assert_eq!(from_cf, from_wall, "round {round}");
    }
    println!("criterion 7 (continued-fraction deficiencies 4 and 2; CF vs census on 100 random sequences): PASS");
}

#[test]
fn criterion_08_quadratic_identities_over_f2() {
    assert!(check_quadratic_f2(QuadraticId::Phi, 1024).unwrap());
    assert!(check_quadratic_f2(QuadraticId::Pi, 1024).unwrap());
    println!("criterion 8 (both quadratic series identities over F_2 to 1024 coefficients): PASS");
}

#[test]
fn criterion_09_structural_property_spotchecks() {
    // pattern cover sizes for a 13-coding with overlap 5
    assert_eq!(cover_size(13, 5, 4), 1);
    assert_eq!(cover_size(13, 5, 7), 2);

    // cross identity, frame laws and window squareness on random walls
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed_0000_0009);
    for p in [3u64, 5] {
        for _ in 0..5 {
            let src = random_source(p, -120, 260, &mut rng);
            let segment = wall::build(&src, 30, -40, 40, -4).unwrap();
            let grid = segment.values((-4, 30), (-40, 40)).unwrap();
            let modulus = Modulus::new(p).unwrap();

            // cross identity at every interior cell
            for m in 0..30 {
                for n in -39..40 {
                    let c = grid.at(m, n) as u64;
                    let up = grid.at(m - 1, n) as u64;
                    let down = grid.at(m + 1, n) as u64;
                    let left = grid.at(m, n - 1) as u64;
                    let right = grid.at(m, n + 1) as u64;
                    assert_eq!(
                        modulus.mul_raw(c, c),
                        modulus.add_raw(
                            modulus.mul_raw(up, down),
                            modulus.mul_raw(left, right)
                        ),
                        "cross identity at ({m}, {n}) p={p}"
                    );
                }
            }

            // frame laws and squareness via the independent checker
            let ob = verify_frame_constraints(&grid, modulus).unwrap();
            assert!(ob.pass, "{}", ob.detail);
        }
    }

    // pattern containment in coded tile images: every 4x4 coded pattern lies
    // in a single 13x13 tile image and every 7x7 pattern in a 2x2 block
    let pf = &*PF;
    let sys = pf.result.system().unwrap();
    let tiles = sys.expand(-2, 12, -12, 12).unwrap();
    let decoded = sys.decode(-8, 80, -80, 80).unwrap();
    let mut checked = 0;
    for &(m, n) in &[(-5i64, -33i64), (0, 0), (3, 17), (25, -61), (61, 40), (70, 70)] {
        for (size, cover) in [(4i64, 1i64), (7, 2)] {
            assert!(
                pattern_covered(&pf.result, &tiles, &decoded, m, n, size, cover),
                "{size}x{size} pattern at ({m}, {n}) not covered by {cover}x{cover} tiles"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 12);
    println!("criterion 9 (cross identity, frame laws, squareness, pattern covers): PASS");
}

/// Whether the `size` x `size` coded pattern with top-left (m, n) is covered
/// by the coding image of some `cover` x `cover` block of tiles, with
/// matching values.
fn pattern_covered(
    res: &DiscoveryResult,
    tiles: &numberwall::grid::Grid<u32>,
    decoded: &numberwall::grid::Grid<u8>,
    m: i64,
    n: i64,
    size: i64,
    cover: i64,
) -> bool {
    let c = 8i64; // coded lattice step
    let l = res.coding.l();
    let div_ceil = |a: i64, b: i64| (a + b - 1).div_euclid(b);
    let base_i = div_ceil(m, c) - 1;
    let base_j = div_ceil(n, c) - 1;
    'blocks: for bi in base_i..=base_i + 2 {
        for bj in base_j..=base_j + 2 {
            // the cover x cover tile block spans coded rows
            // c*(bi-1)+1-off .. with the 13x13 images glued on the c-lattice
            let row0 = c * (bi - 1) + 1 - 3; // top coded row of image (bi, *)
            let col0 = c * (bj - 1) + 1 - 3;
            let row1 = row0 + c * (cover - 1) + l - 1;
            let col1 = col0 + c * (cover - 1) + l - 1;
            if !(row0 <= m && m + size - 1 <= row1 && col0 <= n && n + size - 1 <= col1) {
                continue;
            }
            // verify the values: read each pattern cell through the block
            for i in 0..size {
                for j in 0..size {
                    let (mm, nn) = (m + i, n + j);
                    // locate the tile of the block whose image contains it
                    let ti = bi + ((mm - row0) / c).min(cover - 1);
                    let tj = bj + ((nn - col0) / c).min(cover - 1);
                    let a = mm - (c * (ti - 1) + 1 - 3) + 1;
                    let b = nn - (c * (tj - 1) + 1 - 3) + 1;
                    if !(1..=l).contains(&a) || !(1..=l).contains(&b) {
                        continue 'blocks;
                    }
                    if res.coding.value(tiles.at(ti, tj), a, b) != decoded.at(mm, nn) {
                        continue 'blocks;
                    }
                }
            }
            return true;
        }
    }
    false
}

#[test]
fn criterion_10_empirical_scan_other_primes() {
    for p in [7u64, 11] {
        let src = SequenceSource::paper_folding(Modulus::new(p).unwrap());
        let segment = wall::build(&src, 999, -500, 499, -2).unwrap();
        let report = census(&segment, Region::new(0, 999, -500, 499).unwrap()).unwrap();
        let measured = report.max_deficiency(0);
        println!(
            "EMPIRICAL: paper-folding over F_{p}, 1000x1000 segment, max measured deficiency = {measured}"
        );
        assert_eq!(measured, 4, "regression pin of the measured value over F_{p}");
    }
    println!("criterion 10 (EMPIRICAL deficiency-4 pin for paper-folding over F_7 and F_11): PASS");
}
