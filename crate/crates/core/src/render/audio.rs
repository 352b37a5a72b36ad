//! Offline mixing of one-shot samples into a mono 16-bit WAV.

use std::collections::BTreeMap;
use std::f32::consts::TAU;
use std::io::{Cursor, Seek, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{checked_sounds, RenderError};
use crate::arena::Tone;
use crate::performance::EventLog;

pub const SAMPLE_RATE: u32 = 48_000;
/// Peak level after normalization.
const HEADROOM: f32 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBank {
    samples: BTreeMap<Tone, Vec<f32>>,
}

impl SampleBank {
    pub fn new() -> Self {
        SampleBank {
            samples: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, tone: Tone, samples: Vec<f32>) {
        self.samples.insert(tone, samples);
    }

    pub fn get(&self, tone: Tone) -> Option<&[f32]> {
        self.samples.get(&tone).map(Vec::as_slice)
    }

    /// A small built-in bank: a pitched-down thump for bass, a noisy crack
    /// for slap and inharmonic metallic partials for jingle.
    pub fn synthesized() -> Self {
        let rate = SAMPLE_RATE as f32;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let len = |secs: f32| (secs * rate) as usize;

        let bass = (0..len(0.45))
            .map(|i| {
                let t = i as f32 / rate;
                // glides from 115 Hz down to 55 Hz
                let phase = TAU * (55.0 * t + 60.0 * (1.0 - (-t * 30.0).exp()) / 30.0);
                phase.sin() * (-t * 9.0).exp()
            })
            .collect();
        let slap = (0..len(0.2))
            .map(|i| {
                let t = i as f32 / rate;
                let noise: f32 = rng.random_range(-1.0..1.0);
                (0.6 * noise + 0.4 * (TAU * 190.0 * t).sin()) * (-t * 35.0).exp()
            })
            .collect();
        let jingle = (0..len(0.4))
            .map(|i| {
                let t = i as f32 / rate;
                let noise: f32 = rng.random_range(-1.0..1.0);
                let partials: f32 = [3100.0f32, 4870.0, 6230.0, 7410.0]
                    .iter()
                    .map(|f| (TAU * f * t).sin())
                    .sum();
                (0.15 * partials + 0.3 * noise) * (-t * 12.0).exp()
            })
            .collect();
        let mut bank = SampleBank::new();
        bank.insert(Tone::Bass, bass);
        bank.insert(Tone::Slap, slap);
        bank.insert(Tone::Jingle, jingle);
        bank
    }

    /// Loads `bass.wav`, `slap.wav` and `jingle.wav` from `dir`. Files must
    /// be 48 kHz; multi-channel files are mixed down.
    pub fn from_dir(dir: &Path) -> Result<Self, RenderError> {
        let mut bank = SampleBank::new();
        for tone in Tone::ALL {
            let path = dir.join(format!("{}.wav", tone.name()));
            if !path.exists() {
                return Err(RenderError::MissingSample(tone.name()));
            }
            let bad = |reason: String| RenderError::BadSample {
                tone: tone.name(),
                reason,
            };
            let mut reader = hound::WavReader::open(&path).map_err(|e| bad(e.to_string()))?;
            let spec = reader.spec();
            if spec.sample_rate != SAMPLE_RATE {
                return Err(bad(format!(
                    "sample rate {} Hz, expected {SAMPLE_RATE}",
                    spec.sample_rate
                )));
            }
            let raw: Vec<f32> = match spec.sample_format {
                hound::SampleFormat::Float => reader
                    .samples::<f32>()
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(e.to_string()))?,
                hound::SampleFormat::Int => {
                    let full = (1i64 << (spec.bits_per_sample - 1)) as f32;
                    reader
                        .samples::<i32>()
                        .map(|s| s.map(|v| v as f32 / full))
                        .collect::<Result<_, _>>()
                        .map_err(|e| bad(e.to_string()))?
                }
            };
            let ch = usize::from(spec.channels.max(1));
            let mono = raw
                .chunks(ch)
                .map(|c| c.iter().sum::<f32>() / ch as f32)
                .collect();
            bank.insert(tone, mono);
        }
        Ok(bank)
    }
}

impl Default for SampleBank {
    fn default() -> Self {
        SampleBank::synthesized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

impl AudioBuffer {
    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn write_wav<W: Write + Seek>(&self, w: W) -> Result<(), RenderError> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let to_io = |e: hound::Error| match e {
            hound::Error::IoError(io) => RenderError::Io(io),
            other => RenderError::Io(std::io::Error::other(other.to_string())),
        };
        let mut writer = hound::WavWriter::new(w, spec).map_err(to_io)?;
        for &s in &self.samples {
            let v = (s.clamp(-1.0, 1.0) * f32::from(i16::MAX)).round() as i16;
            writer.write_sample(v).map_err(to_io)?;
        }
        writer.finalize().map_err(to_io)
    }

    pub fn to_wav_bytes(&self) -> Result<Vec<u8>, RenderError> {
        let mut cur = Cursor::new(Vec::new());
        self.write_wav(&mut cur)?;
        Ok(cur.into_inner())
    }
}

/// Mixes one sample per sound at its timestamp, scaled by intensity, then
/// normalizes the peak.
pub fn to_audio(log: &EventLog, bank: &SampleBank) -> Result<AudioBuffer, RenderError> {
    for tone in Tone::ALL {
        if bank.get(tone).is_none() {
            return Err(RenderError::MissingSample(tone.name()));
        }
    }
    let sounds = checked_sounds(log)?;
    let rate = f64::from(SAMPLE_RATE);
    let placed: Vec<(usize, &[f32], f32)> = sounds
        .iter()
        .map(|s| {
            let at = (s.time.as_secs_f64() * rate).round() as usize;
            (
                at,
                bank.get(s.tone).expect("checked above"),
                s.intensity as f32,
            )
        })
        .collect();
    let len = placed
        .iter()
        .map(|(at, smp, _)| at + smp.len())
        .max()
        .unwrap_or(0);
    let mut mix = vec![0f32; len];
    for (at, smp, gain) in placed {
        for (o, &x) in mix[at..at + smp.len()].iter_mut().zip(smp) {
            *o += x * gain;
        }
    }
    let peak = mix.iter().fold(0f32, |m, &x| m.max(x.abs()));
    if peak > 0.0 {
        let k = HEADROOM / peak;
        mix.iter_mut().for_each(|x| *x *= k);
    }
    Ok(AudioBuffer {
        sample_rate: SAMPLE_RATE,
        samples: mix,
    })
}
