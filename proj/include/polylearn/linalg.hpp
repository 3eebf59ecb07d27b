#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylearn {

using Vec = std::vector<double>;

inline void check_same_dim(std::span<const double> a, std::span<const double> b, const char* where) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    check_same_dim(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_squared(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(norm_squared(a)); }

inline void scale_in_place(Vec& a, double c) {
    for (double& v : a) v *= c;
}

inline Vec scaled(std::span<const double> a, double c) {
    Vec out(a.begin(), a.end());
    scale_in_place(out, c);
    return out;
}

// y += c * x
inline void axpy(Vec& y, double c, std::span<const double> x) {
    check_same_dim(y, x, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec normalized(std::span<const double> a) {
    double nrm = norm(a);
    if (nrm == 0.0) throw std::invalid_argument("normalized: zero vector");
    return scaled(a, 1.0 / nrm);
}

}  // namespace polylearn
