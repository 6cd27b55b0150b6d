#pragma once

// JSON matrix literals: {"rows":n,"cols":m,"re":[...],"im":[...]},
// entries row-major. Shared by the CLI and every module that reads or
// writes matrices.

#include <json.hpp>

#include "ucd/numkernel.hpp"

namespace ucd {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace ucd
