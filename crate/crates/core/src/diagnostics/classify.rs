//! Diagnostics records and the pattern classifier.

use std::fmt;

use super::measures::{default_packet_depth, localization, negativity_volume, purity, shannon_entropy, DEFAULT_LOCALIZATION_LEVEL};
use crate::error::{Error, Result};
use crate::mra::WaveletSpec;
use crate::phasespace::WignerState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Waveleton,
    EntangledLike,
    Decoherent,
    Delocalized,
    Unclassified,
}

impl Label {
    pub const ALL: [Label; 5] = [Label::Waveleton, Label::EntangledLike, Label::Decoherent, Label::Delocalized, Label::Unclassified];

    pub fn name(self) -> &'static str {
        match self {
            Label::Waveleton => "waveleton",
            Label::EntangledLike => "entangled_like",
            Label::Decoherent => "decoherent",
            Label::Delocalized => "delocalized",
            Label::Unclassified => "unclassified",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Label::ALL
            .into_iter()
            .find(|l| l.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown label '{name}'")))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifier thresholds. Entropy bounds are fractions of `ln(count)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub localization_hi: f64,
    pub localization_lo: f64,
    pub entropy_lo: f64,
    pub entropy_hi: f64,
    pub purity_hi: f64,
    pub purity_lo: f64,
    pub negativity_hi: f64,
    pub negativity_lo: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            localization_hi: 0.05,
            localization_lo: 0.005,
            entropy_lo: 0.2,
            entropy_hi: 0.22,
            purity_hi: 0.95,
            purity_lo: 0.6,
            negativity_hi: 0.05,
            negativity_lo: 0.01,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("localization", self.localization_lo, self.localization_hi),
            ("entropy", self.entropy_lo, self.entropy_hi),
            ("purity", self.purity_lo, self.purity_hi),
            ("negativity", self.negativity_lo, self.negativity_hi),
        ];
        for (name, lo, hi) in pairs {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("{name} thresholds must be finite")));
            }
            if lo >= hi {
                return Err(Error::Config(format!("{name} thresholds inconsistent: lo = {lo} >= hi = {hi}")));
            }
        }
        Ok(())
    }
}

/// One row of diagnostics. `count` is the number of coefficients the
/// entropy was taken over; it scales the entropy thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub norm: f64,
    pub purity: f64,
    pub entropy: f64,
    pub negativity: f64,
    pub localization: f64,
    pub count: usize,
    pub label: Label,
}

/// Decision rule, checked in order: waveleton, entangled_like, decoherent,
/// delocalized, otherwise unclassified.
pub fn classify(r: &DiagnosticsRecord, t: &Thresholds) -> Result<Label> {
    t.validate()?;
    let fields = [r.norm, r.purity, r.entropy, r.negativity, r.localization];
    if fields.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("diagnostics record holds non-finite values".into()));
    }
    let log_n = (r.count.max(1) as f64).ln();
    let (s_lo, s_hi) = (t.entropy_lo * log_n, t.entropy_hi * log_n);
    let label = if r.localization >= t.localization_hi && r.entropy <= s_lo && r.purity >= t.purity_hi {
        Label::Waveleton
    } else if r.negativity >= t.negativity_hi && r.entropy >= s_hi {
        Label::EntangledLike
    } else if r.purity <= t.purity_lo && r.negativity <= t.negativity_lo {
        Label::Decoherent
    } else if r.localization <= t.localization_lo {
        Label::Delocalized
    } else {
        Label::Unclassified
    };
    Ok(label)
}

/// How records are computed from states.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSettings {
    pub wavelet: WaveletSpec,
    /// Packet depth for the entropy; `None` picks [`default_packet_depth`].
    pub packet_depth: Option<usize>,
    pub localization_level: usize,
    pub thresholds: Thresholds,
}

impl Default for DiagnosticsSettings {
    fn default() -> Self {
        DiagnosticsSettings {
            wavelet: WaveletSpec::default(),
            packet_depth: None,
            localization_level: DEFAULT_LOCALIZATION_LEVEL,
            thresholds: Thresholds::default(),
        }
    }
}

/// Computes every field of a record and labels it.
pub fn diagnose(w: &WignerState, settings: &DiagnosticsSettings) -> Result<DiagnosticsRecord> {
    let depth = settings.packet_depth.unwrap_or_else(|| default_packet_depth(w));
    let mut r = DiagnosticsRecord {
        time: w.time,
        norm: w.integral(),
        purity: purity(w),
        entropy: shannon_entropy(w, &settings.wavelet, depth)?,
        negativity: negativity_volume(w),
        localization: localization(w, settings.localization_level)?,
        count: w.values.len(),
        label: Label::Unclassified,
    };
    r.label = classify(&r, &settings.thresholds)?;
    Ok(r)
}
