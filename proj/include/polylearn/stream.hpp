#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "polylearn/errors.hpp"
#include "polylearn/geometry.hpp"

namespace polylearn {

struct LabeledExample {
    Vec x;
    int label = 0;  // −1 or +1
};

/// A stream of labeled examples drawn from some distribution that is
/// consistent with a known target intersection.
class ExampleStream {
 public:
    virtual ~ExampleStream() = default;
    virtual LabeledExample next() = 0;
    virtual const TargetIntersection& target() const = 0;

    double radius() const { return target().ambient_radius; }
    int dim() const { return target().dim(); }
};

inline constexpr std::uint64_t kDefaultRejectBudget = 1'000'000;

/// Rejection filter over a base stream. next() draws from the base until the
/// predicate accepts; more than max_consecutive_rejects rejections in a row
/// raise StarvationError.
class FilteredStream final : public ExampleStream {
 public:
    using Predicate = std::function<bool(const LabeledExample&)>;

    FilteredStream(ExampleStream& base, Predicate accept,
                   std::uint64_t max_consecutive_rejects = kDefaultRejectBudget)
        : base_(base), accept_(std::move(accept)), budget_(max_consecutive_rejects) {}

    LabeledExample next() override {
        std::uint64_t consecutive = 0;
        for (;;) {
            LabeledExample e = base_.next();
            if (accept_(e)) {
                ++accepted_;
                return e;
            }
            ++rejected_;
            if (++consecutive > budget_)
                throw StarvationError("filtered stream starved after " +
                                      std::to_string(budget_) + " consecutive rejections");
        }
    }

    const TargetIntersection& target() const override { return base_.target(); }

    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t rejected() const { return rejected_; }

 private:
    ExampleStream& base_;
    Predicate accept_;
    std::uint64_t budget_;
    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
};

/// Stream conditioned on the example label (label ∈ {−1, +1}).
inline FilteredStream conditioned_stream(ExampleStream& src, int label,
                                         std::uint64_t max_consecutive_rejects = kDefaultRejectBudget) {
    if (label != -1 && label != +1)
        throw std::invalid_argument("conditioned_stream: label must be -1 or +1");
    return FilteredStream(
        src, [label](const LabeledExample& e) { return e.label == label; },
        max_consecutive_rejects);
}

/// Empirical label frequencies (p_plus, p_minus) over m fresh draws.
inline std::pair<double, double> estimate_bias(ExampleStream& src, long long m) {
    if (m < 1) throw std::invalid_argument("estimate_bias: m must be >= 1");
    long long plus = 0;
    for (long long i = 0; i < m; ++i)
        if (src.next().label == +1) ++plus;
    double p = double(plus) / double(m);
    return {p, 1.0 - p};
}

}  // namespace polylearn
