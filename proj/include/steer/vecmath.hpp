#pragma once

#include <vector>

namespace steer {

// Plain sequential accumulation; all callers (backend steering, vector
// normalization, tests) share these so unit directions agree bit for bit.
double dot(const std::vector<double>& a, const std::vector<double>& b);
double l2_norm(const std::vector<double>& v);

// v / ||v||. Throws errc::zero_vector when the norm is 0.
std::vector<double> unit_vector(const std::vector<double>& v);

// Standard cosine in [-1, 1], clamped against rounding spill.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace steer
