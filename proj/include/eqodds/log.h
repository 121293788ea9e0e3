#ifndef EQODDS_LOG_H_
#define EQODDS_LOG_H_

#include <spdlog/spdlog.h>

namespace eqodds {

// Shared stderr logger; stdout is reserved for command reports.
spdlog::logger& Log();

}  // namespace eqodds

#endif  // EQODDS_LOG_H_
