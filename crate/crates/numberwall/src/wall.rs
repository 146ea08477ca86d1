//! Number Wall construction: the brute-force Toeplitz-determinant oracle and
//! the fast frame-recurrence builder with sentinel padding.
//!
//! Wall entries are S_{m,n}: for m >= 0 the (m+1)x(m+1) Toeplitz determinant
//! of the source sequence with theta_n on the diagonal, S_{-1,n} = 1 and
//! S_{m,n} = 0 for m < -1.

use std::io::Write;

use crate::field::{det_mod, Modulus};
use crate::grid::Grid;
use crate::seq::SequenceSource;
use crate::Error;

/// The (m+1)x(m+1) Toeplitz determinant with theta_n on the diagonal,
/// computed directly by Gaussian elimination.
pub fn oracle_entry(source: &SequenceSource, m: i64, n: i64) -> Result<u64, Error> {
    if m == -1 {
        return Ok(1);
    }
    if m < -1 {
        return Ok(0);
    }
    let dim = (m + 1) as usize;
    let mut mat = Vec::with_capacity(dim * dim);
    for i in 0..dim as i64 {
        for j in 0..dim as i64 {
            mat.push(source.eval(n - i + j)?);
        }
    }
    Ok(det_mod(mat, dim, source.modulus()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    value: u8,
    valid: bool,
}

const OUTSIDE: Cell = Cell {
    value: 0,
    valid: false,
};

/// A rectangular wall segment with per-entry validity flags.
///
/// Entries near the padded column boundary that could not be derived from
/// defined sequence values alone are stored as zero and flagged invalid;
/// an invalid flag propagates to everything computed from such entries.
#[derive(Debug, Clone)]
pub struct WallSegment {
    modulus: Modulus,
    cells: Grid<Cell>,
    req_rows: (i64, i64),
    req_cols: (i64, i64),
}

impl WallSegment {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// The requested row range [m_lo, m_hi].
    pub fn rows(&self) -> (i64, i64) {
        self.req_rows
    }

    /// The requested column range [n_lo, n_hi].
    pub fn cols(&self) -> (i64, i64) {
        self.req_cols
    }

    /// Full stored column range including padding.
    pub fn padded_cols(&self) -> (i64, i64) {
        (self.cells.col_lo(), self.cells.col_hi())
    }

    /// The entry value if it is stored and untainted by boundary effects.
    pub fn entry(&self, m: i64, n: i64) -> Option<u64> {
        match self.cells.try_get(m, n) {
            Some(c) if c.valid => Some(c.value as u64),
            _ => None,
        }
    }

    pub fn is_valid(&self, m: i64, n: i64) -> bool {
        matches!(self.cells.try_get(m, n), Some(c) if c.valid)
    }

    /// True if every entry of the requested rectangle is valid.
    pub fn fully_valid(&self) -> bool {
        for m in self.req_rows.0..=self.req_rows.1 {
            for n in self.req_cols.0..=self.req_cols.1 {
                if !self.cells.at(m, n).valid {
                    return false;
                }
            }
        }
        true
    }

    /// Writes the requested rectangle as CSV with a `wall ...` header line.
    /// Fails if any entry in the rectangle is invalid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), Error> {
        let (mlo, mhi) = self.req_rows;
        let (nlo, nhi) = self.req_cols;
        writeln!(
            out,
            "wall p={} mlo={} mhi={} nlo={} nhi={}",
            self.modulus.get(),
            mlo,
            mhi,
            nlo,
            nhi
        )?;
        for m in mlo..=mhi {
            let mut line = String::with_capacity(2 * (nhi - nlo + 1) as usize);
            for n in nlo..=nhi {
                let c = self.cells.at(m, n);
                if !c.valid {
                    return Err(Error::Config(format!(
                        "entry ({m}, {n}) is boundary-contaminated; widen the padding"
                    )));
                }
                if n > nlo {
                    line.push(',');
                }
                line.push_str(&c.value.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Renders the requested rectangle as a PGM (P2) image, one pixel per
    /// entry in wall orientation. The palette maps each residue to a gray.
    pub fn render_pgm(&self, palette: &[u8]) -> Result<Vec<u8>, Error> {
        if (palette.len() as u64) < self.modulus.get() {
            return Err(Error::Config("palette does not cover all residues".into()));
        }
        let (mlo, mhi) = self.req_rows;
        let (nlo, nhi) = self.req_cols;
        let maxval = palette.iter().copied().max().unwrap_or(0).max(1);
        let mut out = Vec::new();
        writeln!(out, "P2")?;
        writeln!(out, "{} {}", nhi - nlo + 1, mhi - mlo + 1)?;
        writeln!(out, "{maxval}")?;
        for m in mlo..=mhi {
            let mut line = String::new();
            for n in nlo..=nhi {
                if n > nlo {
                    line.push(' ');
                }
                line.push_str(&palette[self.cells.at(m, n).value as usize].to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(out)
    }

    /// The mask of zero entries over the requested rectangle.
    pub fn zero_mask(&self) -> Grid<bool> {
        let (mlo, mhi) = self.req_rows;
        let (nlo, nhi) = self.req_cols;
        let mut mask = Grid::new(mlo, mhi, nlo, nhi, false).expect("requested bounds are sane");
        for m in mlo..=mhi {
            for n in nlo..=nhi {
                let c = self.cells.at(m, n);
                mask.set(m, n, c.valid && c.value == 0);
            }
        }
        mask
    }

    /// Copies the value grid over an arbitrary stored region.
    /// Fails if the region is not fully valid.
    pub fn values(&self, rows: (i64, i64), cols: (i64, i64)) -> Result<Grid<u8>, Error> {
        let mut g = Grid::new(rows.0, rows.1, cols.0, cols.1, 0u8)?;
        for m in rows.0..=rows.1 {
            for n in cols.0..=cols.1 {
                match self.entry(m, n) {
                    Some(v) => g.set(m, n, v as u8),
                    None => {
                        return Err(Error::Config(format!(
                            "entry ({m}, {n}) unavailable in wall segment"
                        )))
                    }
                }
            }
        }
        Ok(g)
    }
}

/// Builds the wall over rows [m_lo, m_hi] and columns [n_lo, n_hi] with the
/// default padding (enough for the full descent cone of every requested
/// entry plus a safety margin for frame scans).
pub fn build(
    source: &SequenceSource,
    m_hi: i64,
    n_lo: i64,
    n_hi: i64,
    m_lo: i64,
) -> Result<WallSegment, Error> {
    let pad = m_hi.max(0) + 96;
    build_with_pad(source, m_hi, n_lo, n_hi, m_lo, pad)
}

/// As `build`, with an explicit column padding width.
pub fn build_with_pad(
    source: &SequenceSource,
    m_hi: i64,
    n_lo: i64,
    n_hi: i64,
    m_lo: i64,
    pad: i64,
) -> Result<WallSegment, Error> {
    if m_lo > -2 {
        return Err(Error::Config(format!(
            "m_lo must be at most -2 to include the sentinel rows, got {m_lo}"
        )));
    }
    if m_lo > m_hi || n_lo > n_hi || pad < 0 {
        return Err(Error::Config("degenerate wall bounds".into()));
    }
    let modulus = source.modulus();
    if modulus.get() > 255 {
        return Err(Error::Config("wall storage requires p < 256".into()));
    }
    // clamp the padded span to the source domain
    let (dom_lo, dom_hi) = source.domain();
    let col_lo = dom_lo.map_or(n_lo - pad, |d| (n_lo - pad).max(d));
    let col_hi = dom_hi.map_or(n_hi + pad, |d| (n_hi + pad).min(d));
    let (col_lo, col_hi) = if col_lo > col_hi {
        // no defined columns at all; keep the requested span, all invalid
        (n_lo, n_hi)
    } else {
        (col_lo.min(n_lo), col_hi.max(n_hi))
    };
    let mut cells = Grid::new(m_lo, m_hi, col_lo, col_hi, OUTSIDE)?;

    for n in col_lo..=col_hi {
        for m in m_lo..=(-2).min(m_hi) {
            cells.set(m, n, Cell { value: 0, valid: true });
        }
        if m_hi >= -1 && m_lo <= -1 {
            cells.set(-1, n, Cell { value: 1, valid: true });
        }
        if m_hi >= 0 {
            let cell = match source.eval(n) {
                Ok(v) => Cell {
                    value: v as u8,
                    valid: true,
                },
                Err(_) => OUTSIDE,
            };
            cells.set(0, n, cell);
        }
    }

    for m in 1.max(m_lo)..=m_hi {
        for n in col_lo..=col_hi {
            let cell = compute_entry(&cells, modulus, m_lo, m, n)?;
            cells.set(m, n, cell);
        }
    }

    Ok(WallSegment {
        modulus,
        cells,
        req_rows: (m_lo, m_hi),
        req_cols: (n_lo, n_hi),
    })
}

/// Reads a cell during construction. Rows above the grid top are genuine
/// zeros (every row below -1 vanishes); columns outside the grid are
/// boundary sentinels, reported as invalid zeros.
#[inline]
fn read(cells: &Grid<Cell>, m_lo: i64, m: i64, n: i64) -> Cell {
    if m < m_lo {
        debug_assert!(m < -1);
        return Cell { value: 0, valid: true };
    }
    match cells.try_get(m, n) {
        Some(&c) => c,
        None => OUTSIDE,
    }
}

/// One step of the frame recurrence for m >= 1. Any consultation of an
/// invalid cell taints the result; a vanishing denominator in an untainted
/// context is a hard internal error.
fn compute_entry(
    cells: &Grid<Cell>,
    modulus: Modulus,
    m_lo: i64,
    m: i64,
    n: i64,
) -> Result<Cell, Error> {
    let p = modulus;
    let rd = |mm: i64, nn: i64| read(cells, m_lo, mm, nn);

    let below2 = rd(m - 2, n);
    if below2.value != 0 {
        // cross rule: S = (S_{m-1,n}^2 - S_{m-1,n+1} S_{m-1,n-1}) / S_{m-2,n}
        let a = rd(m - 1, n);
        let l = rd(m - 1, n - 1);
        let r = rd(m - 1, n + 1);
        if !(below2.valid && a.valid && l.valid && r.valid) {
            return Ok(OUTSIDE);
        }
        let num = p.sub_raw(
            p.mul_raw(a.value as u64, a.value as u64),
            p.mul_raw(r.value as u64, l.value as u64),
        );
        let value = p.mul_raw(num, p.inv_raw(below2.value as u64)?) as u8;
        return Ok(Cell { value, valid: true });
    }
    if !below2.valid {
        return Ok(OUTSIDE);
    }

    // window scans: p_len counts the zeros stacked above in this column,
    // q and k find the window's vertical edges on its top zero row
    let mut p_len = 1i64;
    loop {
        let c = rd(m - p_len - 2, n);
        if !c.valid {
            return Ok(OUTSIDE);
        }
        if c.value != 0 {
            break;
        }
        p_len += 1;
    }
    let mut q = 1i64;
    loop {
        let c = rd(m - p_len - 1, n - q);
        if !c.valid {
            return Ok(OUTSIDE);
        }
        if c.value != 0 {
            break;
        }
        q += 1;
    }
    let mut k = 1i64;
    loop {
        let c = rd(m - p_len - 1, n + k);
        if !c.valid {
            return Ok(OUTSIDE);
        }
        if c.value != 0 {
            break;
        }
        k += 1;
    }
    let delta = k + q;

    if delta > p_len + 2 {
        // still inside the window
        return Ok(Cell { value: 0, valid: true });
    }

    let value = if delta == p_len + 2 {
        // bottom inner frame: S = (-1)^((delta-1)k) B C / A
        let b = rd(m - q, n - q);
        let c = rd(m - k, n + k);
        let a = rd(m - delta, n - q + k);
        if !(b.valid && c.valid && a.valid) {
            return Ok(OUTSIDE);
        }
        let num = p.mul_raw(
            p.mul_raw(b.value as u64, c.value as u64),
            p.sign((delta - 1) * k),
        );
        p.mul_raw(num, p.inv_raw(a.value as u64)?)
    } else {
        // outer frame, one row below the window
        let ratio = |num: Cell, den: Cell| -> Result<Option<u64>, Error> {
            if !(num.valid && den.valid) {
                return Ok(None);
            }
            Ok(Some(p.mul_raw(num.value as u64, p.inv_raw(den.value as u64)?)))
        };
        // ratios along the four inner-frame edges (top, left, right, bottom)
        let big_p = ratio(rd(m - delta - 1, n + k - q), rd(m - delta - 1, n + k - q - 1))?;
        let big_q = ratio(rd(m - q - 1, n - q), rd(m - q - 2, n - q))?;
        let big_r = ratio(rd(m - delta + q - 1, n + k), rd(m - k, n + k))?;
        let big_s = ratio(rd(m - 1, n), rd(m - 1, n + 1))?;
        // outer/inner quotients E_k/A_k, F_k/B_k, G_k/C_k
        let t1 = ratio(rd(m - delta - 2, n + k - q), rd(m - delta - 1, n + k - q))?;
        let t2 = ratio(rd(m - q - 1, n - q - 1), rd(m - q - 1, n - q))?;
        let t3 = ratio(rd(m - k - 1, n + k + 1), rd(m - k - 1, n + k))?;
        let lead = rd(m - 1, n);
        let (big_p, big_q, big_r, big_s, t1, t2, t3) =
            match (big_p, big_q, big_r, big_s, t1, t2, t3) {
                (Some(a), Some(b), Some(c), Some(s), Some(d), Some(e), Some(f)) if lead.valid => {
                    (a, b, c, s, d, e, f)
                }
                _ => return Ok(OUTSIDE),
            };
        // outer-frame law solved for H_k = S_{m,n}:
        // S = (S_{m-1,n}/R) * (Q*t1 + (-1)^k (P*t2 - S*t3))
        let inner = p.add_raw(
            p.mul_raw(big_q, t1),
            p.mul_raw(
                p.sign(k),
                p.sub_raw(p.mul_raw(big_p, t2), p.mul_raw(big_s, t3)),
            ),
        );
        p.mul_raw(p.mul_raw(lead.value as u64, p.inv_raw(big_r)?), inner)
    };
    Ok(Cell {
        value: value as u8,
        valid: true,
    })
}
