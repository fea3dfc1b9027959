#include "core/tape.hpp"

namespace eegdiff {

namespace {
thread_local Tape* t_active = nullptr;
}

const Tensor* GradMap::find_by_id(uint64_t id) const {
    auto it = grads_.find(id);
    return it == grads_.end() ? nullptr : &it->second;
}

const Tensor& GradMap::at(const Tensor& t) const {
    const Tensor* g = find(t);
    if (!g) throw Error("no gradient recorded for tensor");
    return *g;
}

void GradMap::accumulate(const Tensor& t, const Tensor& g) {
    if (t.shape() != g.shape()) {
        throw ShapeError("gradient shape " + shape_str(g.shape()) + " does not match tensor shape " +
                         shape_str(t.shape()));
    }
    auto it = grads_.find(t.id());
    if (it == grads_.end()) {
        grads_.emplace(t.id(), g);
    } else {
        std::vector<double> sum(it->second.data());
        const std::vector<double>& add = g.data();
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += add[i];
        it->second = Tensor::from_data(it->second.shape(), std::move(sum));
    }
}

Tape::Tape() : prev_(t_active) {
    t_active = this;
}

Tape::~Tape() {
    t_active = prev_;
}

Tape* Tape::active() { return t_active; }

void Tape::record(const Tensor& out, BackwardFn fn) {
    nodes_.push_back(Node{out.id(), std::move(fn)});
}

GradMap Tape::backward(const Tensor& loss) {
    if (loss.numel() != 1) {
        throw ShapeError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
    }
    GradMap grads;
    grads.accumulate(loss, Tensor::full(loss.shape(), 1.0));
    NoTapeGuard guard; // backward kernels must not re-record
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        const Tensor* g = grads.find_by_id(it->out_id);
        if (g) it->fn(*g, grads);
    }
    return grads;
}

NoTapeGuard::NoTapeGuard() : saved_(t_active) {
    t_active = nullptr;
}

NoTapeGuard::~NoTapeGuard() {
    t_active = saved_;
}

} // namespace eegdiff
