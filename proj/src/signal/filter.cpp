#include "signal/filter.hpp"

#include <cmath>

namespace eegdiff {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Hamming-windowed sinc lowpass, normalized to unit DC gain.
std::vector<double> lowpass_kernel(double cutoff_norm, int taps) {
    const int m = taps - 1;
    std::vector<double> h(static_cast<size_t>(taps));
    double total = 0.0;
    for (int n = 0; n < taps; ++n) {
        const double centered = n - m / 2.0;
        double s;
        if (centered == 0.0) {
            s = 2.0 * cutoff_norm;
        } else {
            s = std::sin(2.0 * kPi * cutoff_norm * centered) / (kPi * centered);
        }
        const double w = 0.54 - 0.46 * std::cos(2.0 * kPi * n / m);
        h[static_cast<size_t>(n)] = s * w;
        total += h[static_cast<size_t>(n)];
    }
    for (double& v : h) v /= total;
    return h;
}

} // namespace

std::vector<double> design_bandpass_fir(double sample_rate_hz, double low_hz, double high_hz, int taps) {
    if (taps < 3 || taps % 2 == 0) throw FormatError("filter taps must be odd and >= 3");
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < sample_rate_hz / 2.0)) {
        throw FormatError("bandpass band [" + std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                          "] violates Nyquist for fs=" + std::to_string(sample_rate_hz));
    }
    std::vector<double> hi = lowpass_kernel(high_hz / sample_rate_hz, taps);
    std::vector<double> lo = lowpass_kernel(low_hz / sample_rate_hz, taps);
    for (size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
    return hi;
}

double fir_response(const std::vector<double>& kernel, double freq_hz, double sample_rate_hz) {
    // symmetric kernel: response is real once referenced to the center tap
    const int taps = static_cast<int>(kernel.size());
    const int half = (taps - 1) / 2;
    double re = 0.0;
    const double w = 2.0 * kPi * freq_hz / sample_rate_hz;
    for (int n = 0; n < taps; ++n) re += kernel[static_cast<size_t>(n)] * std::cos(w * (n - half));
    return std::abs(re);
}

Tensor filter_zero_phase(const Tensor& samples, const std::vector<double>& kernel) {
    const int64_t c = samples.extent(0), l = samples.extent(1);
    const int64_t taps = static_cast<int64_t>(kernel.size());
    const int64_t half = (taps - 1) / 2;
    if (l < taps) {
        throw FormatError("recording length " + std::to_string(l) + " is shorter than the filter (" +
                          std::to_string(taps) + " taps)");
    }
    std::vector<double> out(static_cast<size_t>(c * l));
    const auto& x = samples.data();
    auto reflect = [l](int64_t idx) {
        if (idx < 0) idx = -idx;
        if (idx >= l) idx = 2 * (l - 1) - idx;
        return idx;
    };
    for (int64_t ch = 0; ch < c; ++ch) {
        const double* row = x.data() + ch * l;
        for (int64_t t = 0; t < l; ++t) {
            double acc = 0.0;
            for (int64_t k = 0; k < taps; ++k) {
                acc += kernel[static_cast<size_t>(k)] * row[reflect(t + k - half)];
            }
            out[static_cast<size_t>(ch * l + t)] = acc;
        }
    }
    return Tensor::op_result(samples.shape(), std::move(out), "bandpass_filter");
}

EegRecording bandpass_filter(const EegRecording& rec, double low_hz, double high_hz, int taps) {
    validate_recording(rec);
    std::vector<double> kernel = design_bandpass_fir(rec.sample_rate_hz, low_hz, high_hz, taps);
    EegRecording out = rec;
    out.samples = filter_zero_phase(rec.samples, kernel);
    return out;
}

} // namespace eegdiff
