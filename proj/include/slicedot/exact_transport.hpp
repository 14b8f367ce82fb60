#pragma once

#include <vector>

#include "slicedot/geometry.hpp"

namespace slicedot {

// Exact discrete optimal transport with Euclidean ground cost between
// two weighted atom sets (one atom per row). Total masses must agree
// within 1e-9 (the second side is rescaled to match exactly). Returns
// the minimal total cost sum_{ij} pi_ij ||a_i - b_j||.
//
// Solved by the transportation simplex; intended for small instances
// (atom counts are capped at 2000 per side).
double exact_transport_cost(const Matrix& a_points, const std::vector<double>& a_mass,
                            const Matrix& b_points, const std::vector<double>& b_mass);

}  // namespace slicedot
