use super::{synthesize, GestureKind, SynthesisError, SynthesisSpec};
use crate::recognizer::{Dataset, Sample};
use crate::skeleton::{window_to_features, Vec3, DEFAULT_FRAME_RATE, DEFAULT_STRIDE, RECORDING_SECONDS};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kinds: Vec<GestureKind>,
    pub per_class: usize,
    pub noise_stddev: f64,
    pub seed: u64,
    pub stride: usize,
    pub frame_rate: f64,
}

impl DatasetSpec {
    /// All eight activities with the default stride and frame rate.
    pub fn all_activities(per_class: usize, noise_stddev: f64, seed: u64) -> Self {
        DatasetSpec {
            kinds: GestureKind::ALL[..8].to_vec(),
            per_class,
            noise_stddev,
            seed,
            stride: DEFAULT_STRIDE,
            frame_rate: DEFAULT_FRAME_RATE,
        }
    }

    pub fn with_kinds(mut self, kinds: &[GestureKind]) -> Self {
        self.kinds = kinds.to_vec();
        self
    }
}

/// SplitMix64 finalizer; spreads (seed, class, index) into independent seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn sample_seed(seed: u64, class: usize, index: usize) -> u64 {
    mix(mix(mix(seed) ^ class as u64) ^ index as u64)
}

/// Renders `per_class` labeled 3.5 s windows for each requested activity.
/// Labels are table indices (0..8), independent of the order of `kinds`.
pub fn build_dataset(spec: &DatasetSpec) -> Result<Dataset, SynthesisError> {
    if spec.per_class == 0 {
        return Err(SynthesisError::EmptyClass);
    }
    let classes = spec
        .kinds
        .iter()
        .map(|k| k.activity().ok_or(SynthesisError::NotAnActivity(*k)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut samples = Vec::with_capacity(classes.len() * spec.per_class);
    for (&kind, &class) in spec.kinds.iter().zip(&classes) {
        for j in 0..spec.per_class {
            let window = synthesize(&SynthesisSpec {
                kind,
                duration: RECORDING_SECONDS,
                noise_stddev: spec.noise_stddev,
                seed: sample_seed(spec.seed, class.index(), j),
                subject_offset: Vec3::ZERO,
                frame_rate: spec.frame_rate,
            })?;
            let features = window_to_features(&window, spec.stride)?;
            samples.push(Sample { features, label: class.index() });
        }
    }
    Ok(Dataset::new(samples, classes))
}
