#include "ecu/pilot_data.hpp"

#include <stdexcept>
#include <string>

namespace ecu {

namespace {

constexpr int kSession1Stage1[14][10] = {
    {1, 1, 1, 0, 0, 0, 1, 1, 1, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {1, 1, 0, 1, 1, 1, 1, 1, 0, 1},
    {1, 0, 1, 0, 1, 1, 0, 1, 0, 1},
    {1, 1, 0, 1, 1, 1, 1, 0, 1, 1},
    {1, 0, 1, 1, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 1, 0, 1, 0, 1, 0, 0},
    {1, 1, 1, 1, 1, 0, 0, 0, 1, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 0, 1, 1, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {1, 1, 0, 0, 1, 0, 1, 0, 1, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 1},
};

constexpr int kSession1Stage2[14][10] = {
    {0, 1, 1, 1, 1, 0, 0, 0, 0, 1},
    {0, 0, 0, 0, 0, 1, 1, 1, 1, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 1, 0, 0, 1, 0, 1, 0, 0, 1},
    {0, 1, 1, 1, 1, 0, 1, 1, 0, 0},
    {1, 0, 1, 1, 1, 1, 0, 0, 0, 0},
    {0, 1, 0, 1, 0, 1, 1, 1, 1, 1},
    {0, 1, 0, 0, 0, 0, 1, 0, 0, 1},
    {0, 0, 0, 0, 0, 1, 1, 0, 0, 0},
    {1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 1, 1, 0, 0, 0},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 0, 1, 1, 0, 1, 0, 0, 1, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 0, 0},
};

constexpr int kSession2Stage1[14][10] = {
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 0},
    {0, 1, 0, 1, 1, 1, 1, 1, 0, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 0, 1, 0, 1, 0, 1, 0, 1, 1},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 1, 1, 1, 1, 0, 0, 1, 1, 0},
    {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {1, 1, 1, 0, 0, 0, 0, 1, 1, 0},
    {0, 1, 1, 1, 1, 1, 1, 1, 1, 0},
    {0, 1, 1, 1, 1, 1, 1, 1, 1, 1},
    {0, 0, 0, 1, 1, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 1, 1, 1, 1},
    {1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
};

constexpr int kSession2Stage2[14][10] = {
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 1, 1, 1, 0, 1, 0, 1, 0},
    {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 1, 0, 0, 1, 1},
    {0, 0, 1, 1, 1, 0, 1, 1, 1, 1},
    {1, 1, 0, 1, 1, 0, 1, 0, 0, 0},
    {0, 1, 1, 0, 0, 0, 1, 1, 0, 0},
    {0, 0, 0, 0, 0, 1, 1, 1, 1, 1},
    {0, 1, 0, 1, 0, 1, 0, 1, 0, 1},
    {0, 0, 0, 0, 1, 0, 0, 1, 1, 0},
    {1, 1, 0, 0, 1, 1, 1, 1, 0, 1},
    {0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 1, 1, 1, 1},
    {0, 0, 0, 0, 0, 1, 1, 1, 1, 1},
};
using Block = const int (*)[10];

Block block(int session, int stage) {
  if (session == 1 && stage == 1) return kSession1Stage1;
  if (session == 1 && stage == 2) return kSession1Stage2;
  if (session == 2 && stage == 1) return kSession2Stage1;
  if (session == 2 && stage == 2) return kSession2Stage2;
  throw std::out_of_range("pilot data has sessions 1-2 and stages 1-2");
}

int first_subject(int session) { return session == 1 ? 1 : 15; }

}  // namespace

stats::ChoiceMatrix pilot_matrix(int session, int stage) {
  Block b = block(session, stage);
  std::vector<std::string> ids;
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 14; ++i) {
    ids.push_back(std::to_string(first_subject(session) + i));
    rows.emplace_back(b[i], b[i] + 10);
  }
  return stats::ChoiceMatrix(std::move(ids), std::move(rows));
}

std::vector<stats::RawMatrixRow> pilot_rows() {
  std::vector<stats::RawMatrixRow> out;
  for (int session : {1, 2})
    for (int stage : {1, 2}) {
      Block b = block(session, stage);
      for (int i = 0; i < 14; ++i)
        out.push_back({std::to_string(session), std::to_string(first_subject(session) + i), std::to_string(stage),
                       std::vector<int>(b[i], b[i] + 10)});
    }
  return out;
}

}  // namespace ecu
