#include "steer/vecmath.hpp"

#include <cmath>

#include "steer/common.hpp"

namespace steer {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) fail(errc::dimension_mismatch, "dot: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

std::vector<double> unit_vector(const std::vector<double>& v) {
    const double n = l2_norm(v);
    if (n == 0.0) fail(errc::zero_vector, "cannot normalize the zero vector");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) fail(errc::zero_vector, "cosine of a zero vector");
    double c = dot(a, b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

}  // namespace steer
