//! Doubly-infinite sequence generators over F_p and one-dimensional
//! substitution-plus-coding systems.

use std::io::BufRead;

use crate::field::Modulus;
use crate::Error;

/// The Paper-Folding (Dragon) bit of `n`, as an integer 0 or 1.
///
/// For n > 0 write n = 2^v * k with k odd: the bit is 0 if k = 1 (mod 4)
/// and 1 if k = 3 (mod 4). Extended by f_0 = 0 and f_{-n} = 1 - f_n.
pub fn paper_folding_bit(n: i64) -> u64 {
    if n == 0 {
        return 0;
    }
    if n < 0 {
        return 1 - paper_folding_bit(-n);
    }
    let k = (n as u64) >> n.trailing_zeros();
    if k % 4 == 1 {
        0
    } else {
        1
    }
}

/// A one-dimensional substitution system with a coding, generated from a
/// pair of prolongable seed letters covering the two half-lines.
#[derive(Debug, Clone)]
pub struct SubstSystem1D {
    k: usize,
    /// substitution: letter -> word of length k
    psi: Vec<Vec<u8>>,
    /// coding: letter -> residue
    rho: Vec<u64>,
    /// seed for the non-positive half-line (must satisfy psi(s)(k) = s)
    seed_left: u8,
    /// seed for the positive half-line (must satisfy psi(s)(1) = s)
    seed_right: u8,
}

impl SubstSystem1D {
    pub fn new(
        psi: Vec<Vec<u8>>,
        rho: Vec<u64>,
        seed_left: u8,
        seed_right: u8,
    ) -> Result<Self, Error> {
        if psi.is_empty() {
            return Err(Error::Config("empty substitution alphabet".into()));
        }
        let k = psi[0].len();
        if k < 2 {
            return Err(Error::Config("substitution factor must be at least 2".into()));
        }
        if psi.iter().any(|w| w.len() != k) {
            return Err(Error::Config("substitution images differ in length".into()));
        }
        let letters = psi.len();
        if rho.len() != letters {
            return Err(Error::Config("coding does not cover the alphabet".into()));
        }
        if psi.iter().flatten().any(|&s| s as usize >= letters) {
            return Err(Error::Config("substitution image letter out of range".into()));
        }
        let sys = SubstSystem1D {
            k,
            psi,
            rho,
            seed_left,
            seed_right,
        };
        if (seed_right as usize) >= letters || sys.psi[seed_right as usize][0] != seed_right {
            return Err(Error::Config(
                "right seed is not prolongable (psi(s)(1) != s)".into(),
            ));
        }
        if (seed_left as usize) >= letters || sys.psi[seed_left as usize][k - 1] != seed_left {
            return Err(Error::Config(
                "left seed is not prolongable (psi(s)(k) != s)".into(),
            ));
        }
        Ok(sys)
    }

    /// The standard system generating the Paper-Folding sequence: letters
    /// {0,1,2,3}, psi: 0->02, 1->03, 2->12, 3->13, rho: 0,1,0,1, seeds (2, 0).
    pub fn paper_folding() -> SubstSystem1D {
        SubstSystem1D::new(
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            vec![0, 1, 0, 1],
            2,
            0,
        )
        .expect("built-in system is valid")
    }

    /// Iterates the substitution `times` times, producing a system with
    /// factor k^times and the same coding and seeds.
    pub fn power(&self, times: u32) -> SubstSystem1D {
        let mut psi = self.psi.clone();
        for _ in 1..times.max(1) {
            psi = psi
                .iter()
                .map(|w| {
                    w.iter()
                        .flat_map(|&s| self.psi[s as usize].iter().copied())
                        .collect()
                })
                .collect();
        }
        SubstSystem1D::new(psi, self.rho.clone(), self.seed_left, self.seed_right)
            .expect("power of a valid system is valid")
    }

    pub fn alphabet_len(&self) -> usize {
        self.psi.len()
    }

    /// The substitution image word of a letter.
    pub fn image(&self, letter: u8) -> &[u8] {
        &self.psi[letter as usize]
    }

    /// The coded residue of a letter.
    pub fn code(&self, letter: u8) -> u64 {
        self.rho[letter as usize]
    }

    /// The fixed-point letter at position n: T(n) = psi(T(ceil(n/k)))([n]_k),
    /// seeded by T(1) = seed_right and T(0) = seed_left.
    pub fn letter(&self, n: i64) -> u8 {
        if n == 1 {
            return self.seed_right;
        }
        if n == 0 {
            return self.seed_left;
        }
        let k = self.k as i64;
        let parent = self.letter((n + k - 1).div_euclid(k));
        let rem = n.rem_euclid(k);
        let pos = if rem == 0 { self.k } else { rem as usize };
        self.psi[parent as usize][pos - 1]
    }

    /// Coded value at position n.
    pub fn value(&self, n: i64) -> u64 {
        self.rho[self.letter(n) as usize]
    }

    /// The coded segment [lo, hi].
    pub fn expand(&self, lo: i64, hi: i64) -> Result<Vec<u64>, Error> {
        if lo > hi {
            return Err(Error::Config(format!("empty range [{lo}, {hi}]")));
        }
        Ok((lo..=hi).map(|n| self.value(n)).collect())
    }
}

#[derive(Debug, Clone)]
enum Kind {
    PaperFolding,
    Pagoda,
    ThueMorse,
    Stored { lo: i64, values: Vec<u64> },
    Subst(SubstSystem1D),
}

/// A sequence over F_p addressed by a signed integer index.
#[derive(Debug, Clone)]
pub struct SequenceSource {
    kind: Kind,
    modulus: Modulus,
}

impl SequenceSource {
    pub fn paper_folding(modulus: Modulus) -> SequenceSource {
        SequenceSource {
            kind: Kind::PaperFolding,
            modulus,
        }
    }

    pub fn pagoda(modulus: Modulus) -> SequenceSource {
        SequenceSource {
            kind: Kind::Pagoda,
            modulus,
        }
    }

    pub fn thue_morse(modulus: Modulus) -> SequenceSource {
        SequenceSource {
            kind: Kind::ThueMorse,
            modulus,
        }
    }

    pub fn subst(sys: SubstSystem1D, modulus: Modulus) -> SequenceSource {
        SequenceSource {
            kind: Kind::Subst(sys),
            modulus,
        }
    }

    /// A sequence defined only on `[lo, lo + values.len() - 1]`.
    pub fn from_values(modulus: Modulus, lo: i64, values: Vec<u64>) -> Result<SequenceSource, Error> {
        if values.is_empty() {
            return Err(Error::Config("stored sequence must be nonempty".into()));
        }
        if values.iter().any(|&v| v >= modulus.get()) {
            return Err(Error::Config("stored residue out of range".into()));
        }
        Ok(SequenceSource {
            kind: Kind::Stored { lo, values },
            modulus,
        })
    }

    /// Reads the sequence file format:
    /// a header `seq p=<modulus> lo=<int> hi=<int>`, then whitespace-separated
    /// residues.
    pub fn from_reader<R: BufRead>(mut reader: R) -> Result<SequenceSource, Error> {
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "seq" {
            return Err(Error::Parse(format!("bad sequence header: {header:?}")));
        }
        let mut p = None;
        let mut lo = None;
        let mut hi = None;
        for field in &fields[1..] {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            match key {
                "p" => {
                    p = Some(
                        val.parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad modulus {val:?}")))?,
                    )
                }
                "lo" | "hi" => {
                    let v = val
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad bound {val:?}")))?;
                    if key == "lo" {
                        lo = Some(v);
                    } else {
                        hi = Some(v);
                    }
                }
                _ => return Err(Error::Parse(format!("unknown header key {key:?}"))),
            }
        }
        let (p, lo, hi) = match (p, lo, hi) {
            (Some(p), Some(lo), Some(hi)) => (p, lo, hi),
            _ => return Err(Error::Parse("incomplete sequence header".into())),
        };
        let modulus = Modulus::new(p)?;
        let mut values = Vec::new();
        let mut body = String::new();
        reader.read_to_string(&mut body)?;
        for tok in body.split_whitespace() {
            let v = tok
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad residue {tok:?}")))?;
            values.push(v);
        }
        let expected = (hi - lo + 1).max(0) as usize;
        if values.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} residues for [{lo}, {hi}], found {}",
                values.len()
            )));
        }
        SequenceSource::from_values(modulus, lo, values)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// The defined index interval; `None` means unbounded on that side.
    pub fn domain(&self) -> (Option<i64>, Option<i64>) {
        match &self.kind {
            Kind::PaperFolding | Kind::Pagoda | Kind::Subst(_) => (None, None),
            Kind::ThueMorse => (Some(0), None),
            Kind::Stored { lo, values } => (Some(*lo), Some(lo + values.len() as i64 - 1)),
        }
    }

    pub fn is_defined(&self, n: i64) -> bool {
        let (lo, hi) = self.domain();
        lo.map_or(true, |lo| n >= lo) && hi.map_or(true, |hi| n <= hi)
    }

    /// The residue of the sequence at index n.
    pub fn eval(&self, n: i64) -> Result<u64, Error> {
        let (lo, hi) = self.domain();
        if !self.is_defined(n) {
            return Err(Error::IndexOutOfDomain {
                index: n,
                lo: lo.unwrap_or(i64::MIN),
                hi: hi.unwrap_or(i64::MAX),
            });
        }
        let v = match &self.kind {
            Kind::PaperFolding => self.modulus.reduce(paper_folding_bit(n) as i64),
            Kind::Pagoda => {
                let diff = paper_folding_bit(n + 1) as i64 - paper_folding_bit(n - 1) as i64;
                self.modulus.reduce(diff)
            }
            Kind::ThueMorse => self.modulus.reduce((n as u64).count_ones() as i64 % 2),
            Kind::Stored { lo, values } => values[(n - lo) as usize],
            Kind::Subst(sys) => self.modulus.reduce(sys.value(n) as i64),
        };
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    #[test]
    fn paper_folding_small_values() {
        assert_eq!(paper_folding_bit(1), 0);
        assert_eq!(paper_folding_bit(3), 1);
        assert_eq!(paper_folding_bit(6), 1);
        assert_eq!(paper_folding_bit(-3), 0);
        assert_eq!(paper_folding_bit(0), 0);
    }

    #[test]
    fn paper_folding_defining_identities() {
        for n in 1..=1 << 16 {
            assert_eq!(paper_folding_bit(2 * n), paper_folding_bit(n));
            assert_eq!(paper_folding_bit(4 * n + 1), 0);
            assert_eq!(paper_folding_bit(4 * n + 3), 1);
            assert_eq!(paper_folding_bit(-n), 1 - paper_folding_bit(n));
        }
    }

    #[test]
    fn pagoda_small_values() {
        let s = SequenceSource::pagoda(m3());
        assert_eq!(s.eval(1).unwrap(), 0);
        assert_eq!(s.eval(2).unwrap(), 1);
        assert_eq!(s.eval(0).unwrap(), 2);
        // defining identity against the generator
        for n in -500..=500 {
            let want = paper_folding_bit(n + 1) as i64 - paper_folding_bit(n - 1) as i64;
            assert_eq!(s.eval(n).unwrap(), m3().reduce(want));
        }
    }

    #[test]
    fn thue_morse_values_and_domain() {
        let s = SequenceSource::thue_morse(Modulus::new(2).unwrap());
        assert_eq!(s.eval(0).unwrap(), 0);
        assert_eq!(s.eval(3).unwrap(), 0);
        assert_eq!(s.eval(4).unwrap(), 1);
        assert!(s.eval(-1).is_err());
    }

    #[test]
    fn subst_system_matches_paper_folding() {
        let sys = SubstSystem1D::paper_folding();
        assert_eq!(sys.expand(1, 8).unwrap(), vec![0, 0, 1, 0, 0, 1, 1, 0]);
        // f_{-4}, f_{-3}, f_{-2}, f_{-1} = 1-f_4, 1-f_3, 1-f_2, 1-f_1
        assert_eq!(sys.expand(-4, -1).unwrap(), vec![1, 0, 1, 1]);
        for n in -2000..=2000 {
            assert_eq!(sys.value(n), paper_folding_bit(n), "position {n}");
        }
    }

    #[test]
    fn subst_power_preserves_fixed_point() {
        let sys = SubstSystem1D::paper_folding();
        let pow = sys.power(4);
        for n in -300..=300 {
            assert_eq!(pow.value(n), sys.value(n), "position {n}");
        }
    }

    #[test]
    fn constant_single_letter_system() {
        let sys = SubstSystem1D::new(vec![vec![0, 0]], vec![7], 0, 0).unwrap();
        assert_eq!(sys.expand(-3, 3).unwrap(), vec![7; 7]);
    }

    #[test]
    fn bad_seed_rejected() {
        // psi(0) = 10 so letter 0 is not right-prolongable
        assert!(SubstSystem1D::new(vec![vec![1, 0], vec![1, 1]], vec![0, 1], 0, 0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let text = "seq p=5 lo=-2 hi=2\n1 2 3 4 0\n";
        let s = SequenceSource::from_reader(text.as_bytes()).unwrap();
        assert_eq!(s.modulus().get(), 5);
        assert_eq!(s.domain(), (Some(-2), Some(2)));
        assert_eq!(s.eval(-2).unwrap(), 1);
        assert_eq!(s.eval(2).unwrap(), 0);
        assert!(s.eval(3).is_err());
    }

    #[test]
    fn file_header_errors() {
        assert!(SequenceSource::from_reader("seq p=4 lo=0 hi=0\n1\n".as_bytes()).is_err());
        assert!(SequenceSource::from_reader("seq p=5 lo=0 hi=2\n1 2\n".as_bytes()).is_err());
        assert!(SequenceSource::from_reader("nope\n".as_bytes()).is_err());
    }
}
