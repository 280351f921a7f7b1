// Copyright 2026 The OVT Authors
// SPDX-License-Identifier: Apache-2.0

#include "ovt/audio.hpp"

#include <cmath>

namespace ovt {

namespace {

constexpr double kPi = 3.14159265358979323846;

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Triangular filterbank over FFT bin frequencies, HTK Mel spacing,
// unnormalized peaks. Returns n_bins x n_mels.
Mat mel_filterbank(int n_mels, int n_bins, int n_fft, double sample_rate) {
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  Mat fb = Mat::Zero(n_bins, n_mels);
  for (int m = 0; m < n_mels; ++m) {
    const double f0 = edges[m], f1 = edges[m + 1], f2 = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double fk = sample_rate * k / n_fft;
      if (fk > f0 && fk < f1)
        fb(k, m) = (fk - f0) / (f1 - f0);
      else if (fk >= f1 && fk < f2)
        fb(k, m) = (f2 - fk) / (f2 - f1);
    }
  }
  return fb;
}

}  // namespace

std::vector<Waveform> segment_and_pad(const Waveform& w, double clip_seconds) {
  if (w.samples.empty()) throw DataError("segment_and_pad: empty waveform");
  if (w.sample_rate <= 0)
    throw ConfigError("segment_and_pad: sample_rate must be positive");
  const auto clip_len =
      static_cast<std::size_t>(std::llround(clip_seconds * w.sample_rate));
  if (clip_len == 0) throw ConfigError("segment_and_pad: clip too short");

  std::vector<Waveform> clips;
  for (std::size_t start = 0; start < w.samples.size(); start += clip_len) {
    Waveform clip;
    clip.sample_rate = w.sample_rate;
    clip.samples.assign(clip_len, 0.0f);
    const std::size_t n = std::min(clip_len, w.samples.size() - start);
    for (std::size_t i = 0; i < n; ++i)
      clip.samples[i] = w.samples[start + i];
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::vector<double> hamming_window(int n) {
  if (n < 2) throw ConfigError("hamming_window: length must be >= 2");
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k)
    w[k] = 0.54 - 0.46 * std::cos(2.0 * kPi * k / (n - 1));
  return w;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }

double mel_to_hz(double m) {
  return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

std::vector<double> mel_center_frequencies(int n_mels, double sample_rate) {
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(n_mels);
  for (int m = 0; m < n_mels; ++m)
    centers[m] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 1) / (n_mels + 1));
  return centers;
}

LogMelSpectrogram log_mel(const Waveform& clip, int n_mels, double win_s,
                          double hop_s) {
  const int N = static_cast<int>(clip.samples.size());
  const int W = static_cast<int>(std::llround(win_s * clip.sample_rate));
  const int H = static_cast<int>(std::llround(hop_s * clip.sample_rate));
  if (W < 2 || H < 1) throw ConfigError("log_mel: window/hop too small");
  if (N < W) throw DataError("log_mel: clip shorter than analysis window");
  if (n_mels < 1) throw ConfigError("log_mel: n_mels must be >= 1");

  const int n_frames = 1 + (N - W) / H;
  const int n_fft = next_pow2(W);
  const int n_bins = n_fft / 2 + 1;
  const std::vector<double> window = hamming_window(W);

  // Windowed frames, zero-padded to the FFT size.
  Mat frames = Mat::Zero(n_frames, n_fft);
  for (int f = 0; f < n_frames; ++f)
    for (int i = 0; i < W; ++i)
      frames(f, i) = clip.samples[f * H + i] * window[i];

  // DFT as two real matrix products (cos/sin bases); desk-scale sizes make
  // this the simplest exact route.
  Mat cos_basis(n_fft, n_bins);
  Mat sin_basis(n_fft, n_bins);
  for (int t = 0; t < n_fft; ++t) {
    for (int k = 0; k < n_bins; ++k) {
      const double ang = -2.0 * kPi * t * k / n_fft;
      cos_basis(t, k) = std::cos(ang);
      sin_basis(t, k) = std::sin(ang);
    }
  }
  Mat re = frames * cos_basis;
  Mat im = frames * sin_basis;
  Mat mag = (re.array().square() + im.array().square()).sqrt().matrix();

  Mat fb = mel_filterbank(n_mels, n_bins, n_fft, clip.sample_rate);
  Mat mel = mag * fb;

  LogMelSpectrogram out;
  out.n_mels = n_mels;
  out.frame_hop_s = hop_s;
  out.frame_win_s = win_s;
  out.frames = mel.unaryExpr([](double v) {
    return std::log(std::max(v, kLogFloorEpsilon));
  });
  return out;
}

}  // namespace ovt
