#include "signal/preprocess.hpp"

#include <cmath>

#include "signal/filter.hpp"

namespace eegdiff {

EegRecording pad_channels(const EegRecording& rec, int64_t target_c) {
    validate_recording(rec);
    const int64_t c = rec.channels(), l = rec.length();
    if (c > target_c) {
        throw ShapeError("pad_channels: recording has " + std::to_string(c) + " channels, target is " +
                         std::to_string(target_c));
    }
    if (c == target_c) return rec;
    std::vector<double> out(static_cast<size_t>(target_c * l));
    const auto& x = rec.samples.data();
    for (int64_t j = 0; j < target_c; ++j) {
        const int64_t src = j % c;
        std::copy(x.begin() + src * l, x.begin() + (src + 1) * l, out.begin() + j * l);
    }
    EegRecording r = rec;
    r.samples = Tensor::from_data({target_c, l}, std::move(out));
    return r;
}

EegRecording truncate_length(const EegRecording& rec, int64_t target_length) {
    validate_recording(rec);
    if (rec.length() < target_length) {
        throw ShapeError("recording too short: " + std::to_string(rec.length()) + " < " +
                         std::to_string(target_length));
    }
    if (rec.length() == target_length) return rec;
    const int64_t c = rec.channels(), l = rec.length();
    std::vector<double> out(static_cast<size_t>(c * target_length));
    const auto& x = rec.samples.data();
    for (int64_t ch = 0; ch < c; ++ch) {
        std::copy(x.begin() + ch * l, x.begin() + ch * l + target_length, out.begin() + ch * target_length);
    }
    EegRecording r = rec;
    r.samples = Tensor::from_data({c, target_length}, std::move(out));
    return r;
}

EegRecording zscore_channels(const EegRecording& rec, double eps) {
    validate_recording(rec);
    const int64_t c = rec.channels(), l = rec.length();
    std::vector<double> out(static_cast<size_t>(c * l));
    const auto& x = rec.samples.data();
    for (int64_t ch = 0; ch < c; ++ch) {
        const double* row = x.data() + ch * l;
        double mu = 0.0;
        for (int64_t t = 0; t < l; ++t) mu += row[t];
        mu /= static_cast<double>(l);
        double var = 0.0;
        for (int64_t t = 0; t < l; ++t) var += (row[t] - mu) * (row[t] - mu);
        var /= static_cast<double>(l);
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int64_t t = 0; t < l; ++t) out[static_cast<size_t>(ch * l + t)] = (row[t] - mu) * inv;
    }
    EegRecording r = rec;
    r.samples = Tensor::op_result({c, l}, std::move(out), "zscore");
    return r;
}

PreprocessConfig PreprocessConfig::from(const RunConfig& cfg) {
    PreprocessConfig p;
    p.band_low_hz = cfg.f64("signal.band_low_hz");
    p.band_high_hz = cfg.f64("signal.band_high_hz");
    p.filter_taps = static_cast<int>(cfg.i64("signal.filter_taps"));
    p.target_channels = cfg.i64("signal.target_channels");
    p.target_length = cfg.i64("signal.target_length");
    return p;
}

EegRecording preprocess(const EegRecording& rec, const PreprocessConfig& cfg) {
    EegRecording r = bandpass_filter(rec, cfg.band_low_hz, cfg.band_high_hz, cfg.filter_taps);
    r = truncate_length(r, cfg.target_length);
    r = pad_channels(r, cfg.target_channels);
    return zscore_channels(r);
}

TokenSequence tokenize(const EegRecording& rec, int64_t token_size) {
    validate_recording(rec);
    if (token_size < 1 || rec.length() % token_size != 0) {
        throw ShapeError("tokenize: length " + std::to_string(rec.length()) + " not divisible by token size " +
                         std::to_string(token_size));
    }
    const int64_t c = rec.channels(), l = rec.length(), s = token_size;
    const int64_t n = l / s;
    std::vector<double> out(static_cast<size_t>(n * c * s));
    const auto& x = rec.samples.data();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t t = 0; t < s; ++t)
                out[static_cast<size_t>((i * c + ch) * s + t)] = x[static_cast<size_t>(ch * l + i * s + t)];
    TokenSequence seq;
    seq.tokens = Tensor::from_data({n, c * s}, std::move(out));
    seq.token_size = s;
    seq.channels = c;
    seq.subject_id = rec.subject_id;
    seq.label = rec.label;
    return seq;
}

EegRecording detokenize(const TokenSequence& seq, double sample_rate_hz) {
    const int64_t n = seq.count(), c = seq.channels, s = seq.token_size;
    if (seq.dim() != c * s) throw ShapeError("detokenize: token dim does not match channels * token_size");
    const int64_t l = n * s;
    std::vector<double> out(static_cast<size_t>(c * l));
    const auto& x = seq.tokens.data();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t t = 0; t < s; ++t)
                out[static_cast<size_t>(ch * l + i * s + t)] = x[static_cast<size_t>((i * c + ch) * s + t)];
    EegRecording rec;
    rec.samples = Tensor::from_data({c, l}, std::move(out));
    rec.sample_rate_hz = sample_rate_hz;
    rec.subject_id = seq.subject_id;
    rec.label = seq.label;
    return rec;
}

} // namespace eegdiff
