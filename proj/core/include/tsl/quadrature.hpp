#pragma once

#include <vector>

namespace tsl {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// S(i, j) = int_{-1}^{nodes[i]} L_j(t) dt for the Lagrange basis on the
// rule's nodes, row-major. Multiplying by function values at the nodes
// gives the running integral at each node.
std::vector<double> running_integral_matrix(const GaussRule& rule);

}  // namespace tsl
