#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "core/tensor.hpp"

namespace eegdiff {

// Gradients keyed by tensor identity. Only tensors on a path from the loss to
// a requires_grad leaf appear; everything else is absent.
class GradMap {
public:
    const Tensor* find(const Tensor& t) const { return find_by_id(t.id()); }
    const Tensor& at(const Tensor& t) const;
    bool contains(const Tensor& t) const { return find(t) != nullptr; }
    size_t size() const { return grads_.size(); }

    // Accumulates g into the slot for t (additive for reused tensors).
    void accumulate(const Tensor& t, const Tensor& g);

    const Tensor* find_by_id(uint64_t id) const;

private:
    std::unordered_map<uint64_t, Tensor> grads_;
};

using BackwardFn = std::function<void(const Tensor& grad_out, GradMap& sink)>;

// Ordered record of executed differentiable ops. One tape per training
// context; ops look up the thread-local active tape. Walking the record in
// reverse creation order is a reverse topological order of the graph.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* active();

    void record(const Tensor& out, BackwardFn fn);

    // Seeds d(loss)/d(loss) = 1 and replays the record backward.
    GradMap backward(const Tensor& loss);

    size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    struct Node {
        uint64_t out_id;
        BackwardFn fn;
    };
    std::vector<Node> nodes_;
    Tape* prev_ = nullptr;
};

// Suspends taping in a scope (used during backward and for frozen forwards).
class NoTapeGuard {
public:
    NoTapeGuard();
    ~NoTapeGuard();
    NoTapeGuard(const NoTapeGuard&) = delete;
    NoTapeGuard& operator=(const NoTapeGuard&) = delete;

private:
    Tape* saved_;
};

} // namespace eegdiff
