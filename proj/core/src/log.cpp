#include "burrscan/log.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace burrscan::log {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = spdlog::stderr_color_mt("burrscan");
    instance->set_pattern("%^[%l]%$ %v");
    instance->set_level(spdlog::level::warn);
  });
  return instance;
}

}  // namespace

void configure_from_env() {
  const char* env = std::getenv("BURRSCAN_LOG");
  if (env == nullptr || *env == '\0') return;
  logger()->set_level(spdlog::level::from_str(env));
}

void debug(std::string_view message) { logger()->debug(message); }
void info(std::string_view message) { logger()->info(message); }
void warn(std::string_view message) { logger()->warn(message); }
void error(std::string_view message) { logger()->error(message); }

}  // namespace burrscan::log
