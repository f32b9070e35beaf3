#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace burrscan {

// Base for every error raised by the library. The kind() tag is stable and is
// what the CLI prints in front of the message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define BURRSCAN_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

// Ingest.
BURRSCAN_DEFINE_ERROR(MalformedName);
BURRSCAN_DEFINE_ERROR(BadMagic);
BURRSCAN_DEFINE_ERROR(IoError);

// Statistics.
BURRSCAN_DEFINE_ERROR(EmptyHistogram);
BURRSCAN_DEFINE_ERROR(InsufficientSupport);
BURRSCAN_DEFINE_ERROR(DegenerateFit);
BURRSCAN_DEFINE_ERROR(UnsupportedAlpha);
BURRSCAN_DEFINE_ERROR(FitUnavailable);

// Windows.
BURRSCAN_DEFINE_ERROR(EmptyInput);
BURRSCAN_DEFINE_ERROR(NonAdjacentWindows);

// Verification and evaluation.
BURRSCAN_DEFINE_ERROR(EmptyLabel);
BURRSCAN_DEFINE_ERROR(UndefinedMetric);
BURRSCAN_DEFINE_ERROR(ConfigError);

#undef BURRSCAN_DEFINE_ERROR

// A CSV row that failed validation.
struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what, std::vector<RowError> rows = {})
      : Error("SchemaError", what), rows_(std::move(rows)) {}

  const std::vector<RowError>& rows() const noexcept { return rows_; }

 private:
  std::vector<RowError> rows_;
};

class UnlabeledName : public Error {
 public:
  explicit UnlabeledName(std::vector<std::string> names);

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
};

}  // namespace burrscan
