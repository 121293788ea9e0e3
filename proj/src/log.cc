#include "eqodds/log.h"

#include <memory>

#include <spdlog/sinks/stdout_sinks.h>

namespace eqodds {

spdlog::logger& Log() {
  static const std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>(
        "eqodds", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *logger;
}

}  // namespace eqodds
