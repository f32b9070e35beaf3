#include "burrscan/query_log.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

namespace burrscan {

namespace csv {

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

namespace {

template <typename T>
std::optional<T> parse_integer(std::string_view text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) return std::nullopt;
  return value;
}

struct Columns {
  int ts = -1;
  int src = -1;
  int qname = -1;
  int qtype = -1;
};

Columns locate_columns(const std::vector<std::string>& header) {
  Columns cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& name = header[i];
    const int idx = static_cast<int>(i);
    if (name == "ts_us") cols.ts = idx;
    else if (name == "src") cols.src = idx;
    else if (name == "qname") cols.qname = idx;
    else if (name == "qtype") cols.qtype = idx;
  }
  if (cols.ts < 0) throw SchemaError("query log header is missing column 'ts_us'");
  if (cols.qname < 0) throw SchemaError("query log header is missing column 'qname'");
  return cols;
}

}  // namespace

QueryLog read_query_log(std::istream& in, const QueryLogOptions& options) {
  QueryLog log;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("query log is empty (header row required)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const Columns cols = locate_columns(csv::split_line(line));
  const int needed = std::max({cols.ts, cols.src, cols.qname, cols.qtype}) + 1;

  std::size_t line_no = 1;
  auto fail = [&](std::string message) {
    log.errors.push_back({line_no, std::move(message)});
    if (log.errors.size() > options.max_row_errors) {
      throw SchemaError("too many malformed rows in query log (last at line " +
                            std::to_string(line_no) + ")",
                        log.errors);
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_line(line);
    if (static_cast<int>(fields.size()) < needed) {
      const char* missing = static_cast<int>(fields.size()) <= cols.ts      ? "ts_us"
                            : static_cast<int>(fields.size()) <= cols.qname ? "qname"
                            : static_cast<int>(fields.size()) <= cols.src   ? "src"
                                                                            : "qtype";
      fail(std::string("missing column '") + missing + "'");
      continue;
    }
    const auto ts = parse_integer<std::int64_t>(fields[cols.ts]);
    if (!ts || *ts < 0) {
      fail("column 'ts_us' is not a non-negative integer: '" + fields[cols.ts] + "'");
      continue;
    }
    std::uint16_t qtype = 1;
    if (cols.qtype >= 0) {
      const auto parsed = parse_integer<std::uint16_t>(fields[cols.qtype]);
      if (!parsed) {
        fail("column 'qtype' is not a 16-bit integer: '" + fields[cols.qtype] + "'");
        continue;
      }
      qtype = *parsed;
    }
    std::optional<std::string> src;
    if (cols.src >= 0 && !fields[cols.src].empty()) src = fields[cols.src];
    log.records.push_back(QueryRecord::make(*ts, fields[cols.qname], qtype, std::move(src)));
  }
  return log;
}

QueryLog read_query_log(const std::filesystem::path& path, const QueryLogOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open query log '" + path.string() + "'");
  return read_query_log(in, options);
}

void write_query_log(std::span<const QueryRecord> records, std::ostream& out) {
  out << "ts_us,src,qname,qtype\n";
  for (const auto& r : records) {
    out << r.timestamp_us << ',' << csv::quote(r.src.value_or("")) << ',' << r.qname << ','
        << r.qtype << '\n';
  }
}

void write_query_log(std::span<const QueryRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write query log '" + path.string() + "'");
  write_query_log(records, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace burrscan
