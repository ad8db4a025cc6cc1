#pragma once

#include <cstddef>
#include <vector>

namespace nlok {

/// Cosine moments m_k = int_0^{2pi} |2 sin(phi/2)|^{-q} cos(k phi) dphi, k = 0..kmax.
/// Valid for q < 1; q <= 0 gives a continuous (but non-smooth) weight.
std::vector<double> singular_weight_moments(double q, std::size_t kmax);

/// Product rule for the periodic weight |2 sin((phi - t_i)/2)|^{-q} on M uniform
/// nodes (M even): int w(phi - t_i) g(phi) dphi ~= sum_j R[(j - i) mod M] g(t_j),
/// exact for trigonometric polynomials g of degree < M/2 plus the Nyquist cosine.
std::vector<double> singular_periodic_weights(std::size_t m, double q);

}  // namespace nlok
