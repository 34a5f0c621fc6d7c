#pragma once

#include <vector>

#include "ssdu/autodiff.hpp"
#include "ssdu/types.hpp"

namespace ssdu {

// Normalized l1-l2 loss with u the reference values:
//   ||u - v||_2 / ||u||_2 + ||u - v||_1 / ||u||_1,
// l1 of a complex vector meaning the sum of complex moduli. Norms run
// jointly over all coils and loss indices.
double loss_l1l2(const std::vector<cplx>& u, const std::vector<cplx>& v);

// Graph version: v_ids are per-coil (2,ny,nz) nodes already restricted to
// the loss set; u_packed are the matching reference planes (constants).
// Returns the scalar loss node.
int loss_l1l2_graph(ad::Graph& g, const std::vector<int>& v_ids,
                    const std::vector<std::vector<double>>& u_packed);

}  // namespace ssdu
