//! Dirac eigenvalue spectra as lazy magnitude-sorted streams.
//!
//! Every curve-based module has a closed-form spectrum: an interval or edge
//! of length `l` contributes `(k + 1/2)·pi/l` over integer `k`, a circle of
//! radius `r` contributes `k/r` (or `(2k+1)/(2r)` after the half-spacing
//! translation that removes the zero mode), and the gasket contributes the
//! level families `{(2k+1)/2}` and `{2^(n-1)(2k+1)}` with multiplicities
//! `3^n`. Streams enumerate distinct magnitudes in increasing order with
//! aggregated multiplicities (`+lambda` and `-lambda` counted together) and
//! support lazy merging of countably many families whose minima diverge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::zeta::GeometricLengthFamily;
use crate::{Error, Result};

/// Magnitudes closer than this (relatively) are aggregated into one line.
const MERGE_REL_TOL: f64 = 1e-12;

/// Deepest gasket level enumerated; level `n` starts at magnitude `2^(n-1)`,
/// so the stream is exact far beyond any enumerable window.
const GASKET_LEVEL_CAP: u32 = 40;

/// One spectral line: a distinct eigenvalue magnitude with total multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub magnitude: f64,
    pub multiplicity: u64,
}

impl SpectralLine {
    /// Recovers the signed eigenvalues behind an aggregated line: the
    /// multiplicity convention counts `+m` and `-m` together, so each sign
    /// carries half (a zero mode stays whole).
    pub fn signed(&self) -> Vec<(f64, u64)> {
        if self.magnitude == 0.0 {
            vec![(0.0, self.multiplicity)]
        } else {
            let neg = self.multiplicity / 2;
            vec![
                (-self.magnitude, neg),
                (self.magnitude, self.multiplicity - neg),
            ]
        }
    }
}

/// A single translated curve module: the operator with eigenvalues
/// `pi k / alpha + a` over integer `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveModule {
    pub alpha: f64,
    pub translation: f64,
}

impl CurveModule {
    pub fn new(alpha: f64, translation: f64) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::NonpositiveLength(alpha));
        }
        Ok(CurveModule { alpha, translation })
    }

    /// Untranslated interval module of length `alpha`.
    pub fn interval(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    /// Edge module of length `len`: the half-spacing translate, with
    /// eigenvalues `(k + 1/2)·pi/len`.
    pub fn edge(len: f64) -> Result<Self> {
        Self::new(len, PI / (2.0 * len))
    }

    /// Circle module of radius `r`, optionally translated by `1/(2r)`.
    pub fn circle(r: f64, translated: bool) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::NonpositiveLength(r));
        }
        let t = if translated { 1.0 / (2.0 * r) } else { 0.0 };
        Self::new(PI * r, t)
    }

    /// Signed eigenvalue with index `k`.
    pub fn eigenvalue(&self, k: i64) -> f64 {
        PI * (k as f64) / self.alpha + self.translation
    }

    fn is_half_translated(&self) -> bool {
        let half = PI / (2.0 * self.alpha);
        (self.translation - half).abs() <= 1e-12 * half
    }

    /// Magnitude stream of this module. Supported translations are `0` and
    /// the half spacing `pi/(2 alpha)`; other translates have no aggregated
    /// closed form here.
    pub fn spectrum(&self) -> Result<SpectrumStream> {
        if self.translation == 0.0 {
            Ok(SpectrumStream::with_zero_mode(PI / self.alpha))
        } else if self.is_half_translated() {
            Ok(SpectrumStream::odd_multiples(PI / (2.0 * self.alpha), 2))
        } else {
            Err(Error::InvalidInput(format!(
                "unsupported translation {} for a closed-form magnitude stream",
                self.translation
            )))
        }
    }
}

/// Dispatchable description of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSpec {
    Circle { radius: f64, translated: bool },
    Interval { alpha: f64 },
    Edge { len: f64 },
    GraphEdges(Vec<f64>),
    Gasket,
    TreeFamily(GeometricLengthFamily),
}

impl SpectrumSpec {
    pub fn stream(&self) -> Result<SpectrumStream> {
        match self {
            SpectrumSpec::Circle { radius, translated } => circle_spectrum(*radius, *translated),
            SpectrumSpec::Interval { alpha } => interval_spectrum(*alpha),
            SpectrumSpec::Edge { len } => edge_spectrum(*len),
            SpectrumSpec::GraphEdges(lens) => graph_edges_spectrum(lens),
            SpectrumSpec::Gasket => Ok(gasket_spectrum()),
            SpectrumSpec::TreeFamily(fam) => tree_spectrum(fam),
        }
    }
}

/// Lazy nondecreasing enumeration of eigenvalue magnitudes, aggregated per
/// distinct magnitude. Single-consumer; construct independent streams for
/// concurrent use.
pub struct SpectrumStream {
    source: Source,
}

enum Source {
    Family(FamilyIter),
    Merge(LazyMerge),
}

#[derive(Debug, Clone)]
struct FamilyIter {
    kind: FamilyKind,
    j: u64,
}

#[derive(Debug, Clone, Copy)]
enum FamilyKind {
    /// Magnitudes `(offset + step*j) * scale`, each of multiplicity `mult`.
    Arithmetic {
        scale: f64,
        offset: f64,
        step: f64,
        mult: u64,
    },
    /// Magnitude 0 once (multiplicity 1), then `j * scale` of multiplicity 2.
    WithZeroMode { scale: f64 },
}

impl Iterator for FamilyIter {
    type Item = SpectralLine;

    fn next(&mut self) -> Option<SpectralLine> {
        let j = self.j;
        self.j += 1;
        match self.kind {
            FamilyKind::Arithmetic {
                scale,
                offset,
                step,
                mult,
            } => Some(SpectralLine {
                magnitude: (offset + step * j as f64) * scale,
                multiplicity: mult,
            }),
            FamilyKind::WithZeroMode { scale } => Some(SpectralLine {
                magnitude: j as f64 * scale,
                multiplicity: if j == 0 { 1 } else { 2 },
            }),
        }
    }
}

struct LazyMerge {
    heap: BinaryHeap<MergeEntry>,
    pending: Box<dyn Iterator<Item = SpectrumStream> + Send>,
    peeked: Option<(SpectralLine, Box<SpectrumStream>)>,
}

struct MergeEntry {
    line: SpectralLine,
    stream: Box<SpectrumStream>,
}

impl PartialEq for MergeEntry {
    fn eq(&self, other: &Self) -> bool {
        self.line.magnitude == other.line.magnitude
    }
}
impl Eq for MergeEntry {}
impl Ord for MergeEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on magnitude
        other
            .line
            .magnitude
            .partial_cmp(&self.line.magnitude)
            .expect("magnitudes are finite")
    }
}
impl PartialOrd for MergeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn same_magnitude(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= MERGE_REL_TOL * a.abs().max(b.abs())
}

impl LazyMerge {
    fn fill_peek(&mut self) {
        while self.peeked.is_none() {
            match self.pending.next() {
                Some(mut s) => {
                    if let Some(line) = s.next() {
                        self.peeked = Some((line, Box::new(s)));
                    }
                    // streams that are already exhausted are dropped
                }
                None => return,
            }
        }
    }

    fn activate_due(&mut self) {
        loop {
            self.fill_peek();
            let due = match (&self.peeked, self.heap.peek()) {
                (Some(_), None) => true,
                (Some((line, _)), Some(top)) => {
                    line.magnitude
                        <= top.line.magnitude * (1.0 + MERGE_REL_TOL) + f64::MIN_POSITIVE
                }
                (None, _) => false,
            };
            if !due {
                return;
            }
            let (line, stream) = self.peeked.take().expect("peeked checked above");
            self.heap.push(MergeEntry { line, stream });
        }
    }

    fn advance(&mut self, mut stream: Box<SpectrumStream>) {
        if let Some(line) = stream.next() {
            self.heap.push(MergeEntry { line, stream });
        }
    }

    fn next_line(&mut self) -> Option<SpectralLine> {
        self.activate_due();
        let top = self.heap.pop()?;
        let magnitude = top.line.magnitude;
        let mut multiplicity = top.line.multiplicity;
        self.advance(top.stream);
        while let Some(next) = self.heap.peek() {
            if !same_magnitude(next.line.magnitude, magnitude) {
                break;
            }
            let entry = self.heap.pop().expect("peeked entry");
            multiplicity += entry.line.multiplicity;
            self.advance(entry.stream);
        }
        Some(SpectralLine {
            magnitude,
            multiplicity,
        })
    }
}

impl Iterator for SpectrumStream {
    type Item = SpectralLine;

    fn next(&mut self) -> Option<SpectralLine> {
        match &mut self.source {
            Source::Family(f) => f.next(),
            Source::Merge(m) => m.next_line(),
        }
    }
}

impl SpectrumStream {
    fn family(kind: FamilyKind) -> Self {
        SpectrumStream {
            source: Source::Family(FamilyIter { kind, j: 0 }),
        }
    }

    /// Magnitudes `(2j+1)*scale`, each with the given multiplicity.
    pub fn odd_multiples(scale: f64, mult: u64) -> Self {
        Self::family(FamilyKind::Arithmetic {
            scale,
            offset: 1.0,
            step: 2.0,
            mult,
        })
    }

    /// Magnitudes `0, scale, 2*scale, ...` with multiplicities `1, 2, 2, ...`.
    pub fn with_zero_mode(scale: f64) -> Self {
        Self::family(FamilyKind::WithZeroMode { scale })
    }

    /// Lazily merges countably many streams; the sequence must be ordered so
    /// that the minima of later streams do not fall below already-yielded
    /// magnitudes (families activate once the frontier reaches them).
    pub fn merge_countable<I>(streams: I) -> Self
    where
        I: Iterator<Item = SpectrumStream> + Send + 'static,
    {
        SpectrumStream {
            source: Source::Merge(LazyMerge {
                heap: BinaryHeap::new(),
                pending: Box::new(streams),
                peeked: None,
            }),
        }
    }
}

/// Multiset union of finitely many streams, re-aggregated by magnitude.
/// The inputs may come in any order: all of them enter the frontier heap
/// up front.
pub fn merge_spectra(streams: Vec<SpectrumStream>) -> SpectrumStream {
    let mut heap = BinaryHeap::new();
    for mut s in streams {
        if let Some(line) = s.next() {
            heap.push(MergeEntry {
                line,
                stream: Box::new(s),
            });
        }
    }
    SpectrumStream {
        source: Source::Merge(LazyMerge {
            heap,
            pending: Box::new(std::iter::empty()),
            peeked: None,
        }),
    }
}

/// Spectrum of the circle of radius `r`: magnitudes `k/r` with the zero mode,
/// or `(2j+1)/(2r)` each twice after translation.
pub fn circle_spectrum(r: f64, translated: bool) -> Result<SpectrumStream> {
    CurveModule::circle(r, translated)?.spectrum()
}

/// Spectrum of the untranslated interval module of length `alpha`.
pub fn interval_spectrum(alpha: f64) -> Result<SpectrumStream> {
    CurveModule::interval(alpha)?.spectrum()
}

/// Spectrum of a single edge of length `len`: magnitudes `(2j+1)pi/(2 len)`,
/// each of multiplicity 2.
pub fn edge_spectrum(len: f64) -> Result<SpectrumStream> {
    CurveModule::edge(len)?.spectrum()
}

/// Direct sum over a finite edge list.
pub fn graph_edges_spectrum(lens: &[f64]) -> Result<SpectrumStream> {
    let streams = lens
        .iter()
        .map(|&l| edge_spectrum(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_spectra(streams))
}

/// Spectrum of the gasket module: level 0 contributes `(2j+1)/2` of
/// multiplicity 2, level `n >= 1` contributes `2^(n-1)(2j+1)` of
/// multiplicity `2*3^n`.
pub fn gasket_spectrum() -> SpectrumStream {
    let levels = (0..=GASKET_LEVEL_CAP).map(|n| {
        if n == 0 {
            SpectrumStream::odd_multiples(0.5, 2)
        } else {
            SpectrumStream::odd_multiples(2f64.powi(n as i32 - 1), 2 * 3u64.pow(n))
        }
    });
    SpectrumStream::merge_countable(levels)
}

/// Spectrum of the infinite tree described by a geometric length family:
/// level `n` holds `count(n)` edges of length `length(n)`, each contributing
/// odd multiples of `pi/(2 length(n))` with multiplicity 2.
pub fn tree_spectrum(fam: &GeometricLengthFamily) -> Result<SpectrumStream> {
    let fam = fam.clone();
    fam.count_int(1)?; // integral counts required for multiplicities
    let levels = (1u32..).map_while(move |n| {
        let count = fam.count_int(n).ok()?;
        let len = fam.length(n);
        if len <= 0.0 || !len.is_finite() {
            return None;
        }
        let mult = count.checked_mul(2)?;
        Some(SpectrumStream::odd_multiples(PI / (2.0 * len), mult))
    });
    Ok(SpectrumStream::merge_countable(levels))
}

/// Eigenvalue counting function `N(lambda)`: total multiplicity of magnitudes
/// at most `lambda` (up to relative tolerance `1e-12`). Consumes the stream.
pub fn counting_function(stream: SpectrumStream, lambda: f64) -> u64 {
    let cutoff = lambda * (1.0 + MERGE_REL_TOL);
    let mut total = 0u64;
    for line in stream {
        if line.magnitude > cutoff {
            break;
        }
        total += line.multiplicity;
    }
    total
}

/// Counting function sampled at several thresholds (ascending) in one pass.
pub fn sample_counts(stream: SpectrumStream, thresholds: &[f64]) -> Vec<u64> {
    debug_assert!(thresholds.windows(2).all(|w| w[0] <= w[1]));
    let mut counts = Vec::with_capacity(thresholds.len());
    let mut total = 0u64;
    let mut idx = 0;
    for line in stream {
        while idx < thresholds.len() && line.magnitude > thresholds[idx] * (1.0 + MERGE_REL_TOL) {
            counts.push(total);
            idx += 1;
        }
        if idx == thresholds.len() {
            break;
        }
        total += line.multiplicity;
    }
    while idx < thresholds.len() {
        counts.push(total);
        idx += 1;
    }
    counts
}
