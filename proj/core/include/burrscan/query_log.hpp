#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burrscan/errors.hpp"
#include "burrscan/query_record.hpp"

namespace burrscan {

// Query-log CSV: header `ts_us,src,qname,qtype`. Column order is free; ts_us
// and qname are required, src may be empty, qtype defaults to 1 (A).
struct QueryLogOptions {
  // Row errors beyond this many abort the read with SchemaError.
  std::size_t max_row_errors = 100;
};

struct QueryLog {
  std::vector<QueryRecord> records;
  std::vector<RowError> errors;
};

QueryLog read_query_log(std::istream& in, const QueryLogOptions& options = {});
QueryLog read_query_log(const std::filesystem::path& path, const QueryLogOptions& options = {});

void write_query_log(std::span<const QueryRecord> records, std::ostream& out);
void write_query_log(std::span<const QueryRecord> records, const std::filesystem::path& path);

namespace csv {

// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_line(std::string_view line);

// Quotes a field when it contains a separator or quote.
std::string quote(std::string_view field);

}  // namespace csv

}  // namespace burrscan
