#pragma once

#include <vector>

#include "signal/recording.hpp"

namespace eegdiff {

// Windowed-sinc bandpass: difference of two Hamming-windowed lowpass kernels,
// each normalized to unit DC gain, so the bandpass rejects DC exactly. The
// kernel is symmetric; applied centered over reflect-padded edges the filter
// is zero-phase and length-preserving.
std::vector<double> design_bandpass_fir(double sample_rate_hz, double low_hz, double high_hz, int taps);

// Frequency response magnitude of a symmetric FIR at frequency f.
double fir_response(const std::vector<double>& kernel, double freq_hz, double sample_rate_hz);

// Applies a symmetric odd-length kernel per channel, zero-phase.
Tensor filter_zero_phase(const Tensor& samples, const std::vector<double>& kernel);

EegRecording bandpass_filter(const EegRecording& rec, double low_hz, double high_hz, int taps = 101);

} // namespace eegdiff
