#pragma once

// Versioned JSON model descriptions ("ecu-model/1").
//
//   {"schema": "ecu-model/1",
//    "space": {"w": 0, "b": 300},
//    "d": 20,
//    "family": {"kind": "binary", "tau": 0.75,
//               "u": {"table": [[0, 0], [90, 15], ...]},
//               "v": {"power": {"exponent": 2, "scale": 1, "offset": 0}}}}
//
// "parametric" families need no further fields; "tabulated" ones carry
// {"x": [...], "pi": [...], "values": [[row for pi_0], ...]} with null for
// undefined cells.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ecu/model.hpp"

namespace ecu {

inline constexpr std::string_view kModelSchema = "ecu-model/1";

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EcuModel parse_model(std::string_view text);
EcuModel load_model(const std::filesystem::path& path);

/// Throws ModelFormatError for custom families, which have no text form.
std::string dump_model(const EcuModel& model, int indent = 2);

}  // namespace ecu
