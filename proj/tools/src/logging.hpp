#pragma once

#include <string>

namespace curvebound::cli {

// Installs a stderr logger at the level named by CURVEBOUND_LOG
// (error, warn, info, debug; default warn). Returns false on an unknown name.
bool init_logging(const char* env_value, std::string& error);

}  // namespace curvebound::cli
