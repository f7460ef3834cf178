//! Truncated multimode Fock space.
//!
//! Basis states are occupation tuples written `|n_{M-1}, …, n_1, n_0>`; the
//! dense index of a tuple is `Σ_j n_j (n_max + 1)^j`, so mode 0 is the
//! fastest-varying digit.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    mode_count: usize,
    cutoff: usize,
    dimension: usize,
}

impl FockSpace {
    /// `cutoff` is the largest occupation kept per mode (inclusive).
    pub fn new(mode_count: usize, cutoff: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::domain("Fock space needs at least one mode"));
        }
        if cutoff == 0 {
            return Err(Error::domain("Fock cutoff must be at least 1"));
        }
        let dimension = (cutoff + 1)
            .checked_pow(mode_count as u32)
            .ok_or_else(|| Error::domain("Fock space dimension overflows"))?;
        Ok(FockSpace {
            mode_count,
            cutoff,
            dimension,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Stride of mode `j` in the dense index.
    pub fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow(mode as u32)
    }

    /// Dense index of occupations given in mode order (`occupations[j] = n_j`).
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: occupations.len(),
            });
        }
        let mut index = 0;
        for (j, &n) in occupations.iter().enumerate() {
            if n > self.cutoff {
                return Err(Error::domain(format!(
                    "occupation {n} of mode {j} exceeds the cutoff {}",
                    self.cutoff
                )));
            }
            index += n * self.stride(j);
        }
        Ok(index)
    }

    /// Occupations in mode order for a dense index.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let base = self.cutoff + 1;
        (0..self.mode_count)
            .map(|_| {
                let n = index % base;
                index /= base;
                n
            })
            .collect()
    }

    /// Occupation of one mode without materialising the whole tuple.
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % (self.cutoff + 1)
    }

    pub fn total_occupation(&self, index: usize) -> usize {
        self.occupations(index).iter().sum()
    }

    /// Label with the highest mode first: `"210"` for `|2,1,0>`. Occupations of
    /// ten or more switch the label to underscore separators (`"12_0_3"`).
    pub fn label(&self, index: usize) -> String {
        format_label(&self.occupations(index))
    }

    /// Whether some mode of the state sits at the cutoff.
    pub fn is_boundary(&self, index: usize) -> bool {
        self.occupations(index).contains(&self.cutoff)
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.mode_count,
            });
        }
        Ok(())
    }
}

/// Label for occupations given in mode order.
pub fn format_label(occupations: &[usize]) -> String {
    let wide = occupations.iter().any(|&n| n >= 10);
    let digits: Vec<String> = occupations.iter().rev().map(|n| n.to_string()).collect();
    if wide {
        digits.join("_")
    } else {
        digits.concat()
    }
}

/// Parses a highest-mode-first occupation list such as `"2,1,0"` or `"210"` into
/// mode order.
pub fn parse_occupations(text: &str) -> Result<Vec<usize>> {
    let text = text.trim().trim_start_matches('|').trim_end_matches('>');
    let parts: Vec<&str> = if text.contains(',') || text.contains('_') {
        text.split([',', '_']).map(str::trim).collect()
    } else {
        text.char_indices().map(|(i, c)| &text[i..i + c.len_utf8()]).collect()
    };
    let mut occ = parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::config(format!("bad occupation `{p}` in `{text}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if occ.is_empty() {
        return Err(Error::config("empty occupation list"));
    }
    occ.reverse();
    Ok(occ)
}

/// State vector over a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhononState {
    pub amplitudes: Vec<Complex64>,
}

impl PhononState {
    pub fn zeros(space: &FockSpace) -> Self {
        PhononState {
            amplitudes: vec![Complex64::new(0.0, 0.0); space.dimension()],
        }
    }

    /// Fock state with occupations in mode order.
    pub fn fock(space: &FockSpace, occupations: &[usize]) -> Result<Self> {
        let mut state = Self::zeros(space);
        state.amplitudes[space.index(occupations)?] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        PhononState { amplitudes }
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PhononState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mode_number(&self, space: &FockSpace, mode: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * space.occupation(i, mode) as f64)
            .sum()
    }

    pub fn total_number(&self, space: &FockSpace) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * space.total_occupation(i) as f64)
            .sum()
    }

    /// Population in basis states where some mode sits at the cutoff.
    pub fn boundary_population(&self, space: &FockSpace) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| space.is_boundary(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn distance(&self, other: &PhononState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}
