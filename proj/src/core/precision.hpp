#pragma once

namespace eegdiff {

// Global storage precision. F32 is the training default: every op rounds its
// result through float so values carry 32-bit precision while accumulation
// runs in double. F64 keeps full doubles and is what gradient checks use.
enum class Precision { F32, F64 };

Precision precision();
void set_precision(Precision p);

// RAII switch used by tests.
class PrecisionGuard {
public:
    explicit PrecisionGuard(Precision p) : prev_(precision()) { set_precision(p); }
    ~PrecisionGuard() { set_precision(prev_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    Precision prev_;
};

} // namespace eegdiff
