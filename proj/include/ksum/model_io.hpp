#pragma once

#include <string>

#include "ksum/ica.hpp"
#include "ksum/mdh.hpp"
#include "ksum/ppr.hpp"

namespace ksum {

// JSON model files; reals survive a save/load round trip bit-exactly.
void save_ica_model(const std::string& path, const ICAModel& model);
ICAModel load_ica_model(const std::string& path);

void save_mdh_model(const std::string& path, const MDHModel& model);
MDHModel load_mdh_model(const std::string& path);

void save_ppr_model(const std::string& path, const PPRModel& model);
PPRModel load_ppr_model(const std::string& path);

} // namespace ksum
