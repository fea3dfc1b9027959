#include "core/precision.hpp"

namespace eegdiff {

namespace {
Precision g_precision = Precision::F32;
}

Precision precision() { return g_precision; }
void set_precision(Precision p) { g_precision = p; }

} // namespace eegdiff
