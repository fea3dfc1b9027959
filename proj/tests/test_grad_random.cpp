#include <doctest.h>

#include "core/precision.hpp"
#include "support/fd.hpp"
#include "support/random_programs.hpp"

using namespace eegdiff;

// Every composed program of supported ops must agree with central finite
// differences in 64-bit mode.
TEST_CASE("randomized differentiable programs pass finite-difference checks") {
    PrecisionGuard guard(Precision::F64);
    int worst_kind_count = 0;
    double worst = 0.0;
    for (uint64_t seed = 1; seed <= 120; ++seed) {
        auto prog = eegdiff::testing::make_random_program(seed);
        auto res = eegdiff::testing::fd_check(prog.fn, prog.inputs);
        INFO("program ", prog.kind, " seed ", seed, " rel err ", res.max_rel_err);
        CHECK(res.max_rel_err < 1e-4);
        if (res.max_rel_err > worst) {
            worst = res.max_rel_err;
            ++worst_kind_count;
        }
    }
    (void)worst_kind_count;
}
