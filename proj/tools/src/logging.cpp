#include "logging.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace curvebound::cli {

bool init_logging(const char* env_value, std::string& error) {
    auto logger = spdlog::get("curvebound");
    if (!logger) logger = spdlog::stderr_color_mt("curvebound");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const std::string name = env_value ? env_value : "warn";
    spdlog::level::level_enum level;
    if (name == "error") level = spdlog::level::err;
    else if (name == "warn") level = spdlog::level::warn;
    else if (name == "info") level = spdlog::level::info;
    else if (name == "debug") level = spdlog::level::debug;
    else {
        error = "CURVEBOUND_LOG must be one of error, warn, info, debug (got '" + name + "')";
        spdlog::set_level(spdlog::level::warn);
        return false;
    }
    spdlog::set_level(level);
    return true;
}

}  // namespace curvebound::cli
