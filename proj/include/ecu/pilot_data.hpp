#pragma once

// Raw Stage-1 and Stage-2 choices from the two multi-switch pilot sessions,
// 14 subjects each (subjects 1-14 and 15-28), digits kept as recorded.

#include <vector>

#include "ecu/stats.hpp"

namespace ecu {

/// session 1 or 2, stage 1 or 2.
stats::ChoiceMatrix pilot_matrix(int session, int stage);

/// All four matrices as raw-matrix rows (session, subject, stage, cells).
std::vector<stats::RawMatrixRow> pilot_rows();

}  // namespace ecu
