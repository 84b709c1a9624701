#pragma once

#include <vector>

namespace dglod {

struct QuadratureRule {
  std::vector<double> points;   // in [0, 1]
  std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree 2n-1.
QuadratureRule gauss_legendre(int n);

}  // namespace dglod
