#include "core/gemm.hpp"

#include <Eigen/Core>

namespace eegdiff {

namespace {
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const Mat>;
using MapM = Eigen::Map<Mat>;
} // namespace

void gemm(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n, bool trans_a,
          bool trans_b) {
    MapM C(c, m, n);
    if (!trans_a && !trans_b) {
        C.noalias() = MapC(a, m, k) * MapC(b, k, n);
    } else if (trans_a && !trans_b) {
        C.noalias() = MapC(a, k, m).transpose() * MapC(b, k, n);
    } else if (!trans_a && trans_b) {
        C.noalias() = MapC(a, m, k) * MapC(b, n, k).transpose();
    } else {
        C.noalias() = MapC(a, k, m).transpose() * MapC(b, n, k).transpose();
    }
}

} // namespace eegdiff
