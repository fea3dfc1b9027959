#include "signal/recording.hpp"

namespace eegdiff {

void validate_recording(const EegRecording& rec) {
    if (!rec.samples.defined() || rec.samples.rank() != 2) {
        throw ShapeError("recording samples must be [C x L]");
    }
    if (rec.channels() < 1 || rec.length() < 1) {
        throw ShapeError("recording needs at least one channel and one sample");
    }
    if (rec.sample_rate_hz <= 0.0) {
        throw FormatError("recording sample rate must be positive");
    }
    if (rec.label < -1) {
        throw FormatError("recording label must be -1 (none) or a class index");
    }
}

} // namespace eegdiff
