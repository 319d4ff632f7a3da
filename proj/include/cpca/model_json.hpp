#pragma once

#include <string>

#include "cpca/engine.hpp"

namespace cpca {

// JSON document for a fitted model. Field names are part of the file
// contract: phi, clusters[{members, gamma, r, sigma2}], r_c, means, trace.
// Members are 0-based column indices into column_ids.
std::string model_to_json(const CpcaModel& model, const std::string& meta_command,
                          std::uint64_t seed);

CpcaModel model_from_json(const std::string& text);

}  // namespace cpca
