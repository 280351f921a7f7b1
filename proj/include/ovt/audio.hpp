// Copyright 2026 The OVT Authors
// SPDX-License-Identifier: Apache-2.0
//
// Waveform -> log-Mel filterbank features for the audio encoder. Signals are
// cut into fixed-length clips (zero-padded at the tail), windowed with a
// Hamming window, and passed through a triangular HTK-Mel filterbank; the
// natural log is floored at kLogFloorEpsilon so silence maps to a finite
// constant.

#pragma once

#include "ovt/common.hpp"

#include <vector>

namespace ovt {

struct Waveform {
  std::vector<float> samples;  // mono
  double sample_rate = 16000.0;

  double seconds() const {
    return sample_rate > 0 ? samples.size() / sample_rate : 0.0;
  }
};

struct LogMelSpectrogram {
  Mat frames;  // n_frames x n_mels
  int n_mels = 64;
  double frame_hop_s = 0.010;
  double frame_win_s = 0.025;
};

inline constexpr double kLogFloorEpsilon = 1e-10;

// Consecutive non-overlapping clips of exactly clip_seconds * sample_rate
// samples; the final partial clip is zero-padded to full length.
std::vector<Waveform> segment_and_pad(const Waveform& w,
                                      double clip_seconds = 10.0);

// w[k] = 0.54 - 0.46 * cos(2*pi*k / (n-1)), n >= 2.
std::vector<double> hamming_window(int n);

// HTK Mel scale: mel = 2595 * log10(1 + f/700).
double hz_to_mel(double f);
double mel_to_hz(double m);

// Center frequencies (Hz) of the n_mels triangular filters spanning
// 0 Hz .. sample_rate/2.
std::vector<double> mel_center_frequencies(int n_mels, double sample_rate);

// Frames the clip (window win_s * sr, hop hop_s * sr), applies the Hamming
// window, takes the DFT magnitude spectrum, applies the Mel filterbank and
// the floored natural log. n_frames = 1 + floor((N - W) / H).
LogMelSpectrogram log_mel(const Waveform& clip, int n_mels = 64,
                          double win_s = 0.025, double hop_s = 0.010);

}  // namespace ovt
