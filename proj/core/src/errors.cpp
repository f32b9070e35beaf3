#include "burrscan/errors.hpp"

namespace burrscan {

namespace {

std::string describe_unlabeled(const std::vector<std::string>& names) {
  std::string msg = "no label for " + std::to_string(names.size()) + " reported name(s):";
  constexpr std::size_t kShown = 10;
  for (std::size_t i = 0; i < names.size() && i < kShown; ++i) {
    msg += ' ';
    msg += names[i];
  }
  if (names.size() > kShown) msg += " ...";
  return msg;
}

}  // namespace

UnlabeledName::UnlabeledName(std::vector<std::string> names)
    : Error("UnlabeledName", describe_unlabeled(names)), names_(std::move(names)) {}

}  // namespace burrscan
