#include <charconv>
#include <json.hpp>
#include <sstream>

#include "tnm/error.hpp"
#include "tnm/persistence.hpp"

namespace tnm {

namespace {

constexpr std::string_view kCsvHeader = "time,kind,message_id,task_label,object,hop_index,detail";

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_string(std::string_view text) { return nlohmann::json(std::string(text)).dump(); }

void write_csv(const SimLog& log, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : log.records) {
    out << format_number(r.time) << ',' << to_string(r.kind) << ',' << r.message_id << ',' << csv_field(r.task_label)
        << ',' << r.object.value << ',';
    if (r.hop_index) out << *r.hop_index;
    out << ',' << csv_field(r.detail) << '\n';
  }
}

void write_jsonl(const SimLog& log, std::ostream& out) {
  for (const auto& r : log.records) {
    out << "{\"time\":" << format_number(r.time) << ",\"kind\":\"" << to_string(r.kind)
        << "\",\"message_id\":" << r.message_id << ",\"task_label\":" << json_string(r.task_label)
        << ",\"object\":" << r.object.value << ",\"hop_index\":";
    if (r.hop_index) {
      out << *r.hop_index;
    } else {
      out << "null";
    }
    out << ",\"detail\":" << json_string(r.detail) << "}\n";
  }
}

[[noreturn]] void bad_log(std::size_t line, const std::string& message) {
  throw Error(Errc::parse_error, "log line " + std::to_string(line) + ": " + message);
}

template <class T>
T parse_int(std::string_view text, std::size_t line, const char* what) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) bad_log(line, std::string("bad ") + what);
  return value;
}

double parse_double(std::string_view text, std::size_t line) {
  double value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) bad_log(line, "bad time");
  return value;
}

// RFC 4180 rows; quoted fields may span lines.
std::vector<std::vector<std::string>> csv_rows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(Errc::parse_error, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LogRecord> read_csv(std::string_view text) {
  auto rows = csv_rows(text);
  std::vector<LogRecord> out;
  if (rows.empty()) return out;
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kCsvHeader) bad_log(1, "unexpected CSV header");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() != 7) bad_log(line, "expected 7 fields, found " + std::to_string(f.size()));
    LogRecord r;
    r.time = parse_double(f[0], line);
    auto kind = parse_log_kind(f[1]);
    if (!kind) bad_log(line, "unknown kind '" + f[1] + "'");
    r.kind = *kind;
    r.message_id = parse_int<std::uint64_t>(f[2], line, "message_id");
    r.task_label = f[3];
    r.object = ObjectId{parse_int<std::uint64_t>(f[4], line, "object")};
    if (!f[5].empty()) r.hop_index = parse_int<std::uint32_t>(f[5], line, "hop_index");
    r.detail = f[6];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LogRecord> read_jsonl(std::string_view text) {
  std::vector<LogRecord> out;
  std::size_t line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(start, end - start);
    start = end + 1;
    ++line;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto j = nlohmann::json::parse(row);
      LogRecord r;
      r.time = j.at("time").get<double>();
      auto kind = parse_log_kind(j.at("kind").get<std::string>());
      if (!kind) bad_log(line, "unknown kind");
      r.kind = *kind;
      r.message_id = j.at("message_id").get<std::uint64_t>();
      r.task_label = j.at("task_label").get<std::string>();
      r.object = ObjectId{j.at("object").get<std::uint64_t>()};
      if (!j.at("hop_index").is_null()) r.hop_index = j.at("hop_index").get<std::uint32_t>();
      r.detail = j.at("detail").get<std::string>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      bad_log(line, e.what());
    }
  }
  return out;
}

}  // namespace

std::optional<LogFormat> parse_log_format(std::string_view text) {
  if (text == "csv") return LogFormat::Csv;
  if (text == "jsonl") return LogFormat::Jsonl;
  return std::nullopt;
}

void export_log(const SimLog& log, LogFormat format, std::ostream& sink) {
  if (format == LogFormat::Csv) {
    write_csv(log, sink);
  } else {
    write_jsonl(log, sink);
  }
  sink.flush();
  if (!sink) throw Error(Errc::io_error, "log sink write failed");
}

std::string export_log(const SimLog& log, LogFormat format) {
  std::ostringstream out;
  export_log(log, format, out);
  return out.str();
}

std::vector<LogRecord> parse_log(std::string_view text, LogFormat format) {
  return format == LogFormat::Csv ? read_csv(text) : read_jsonl(text);
}

LogFormat sniff_log_format(std::string_view text) {
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string_view::npos && text[i] == '{') return LogFormat::Jsonl;
  return LogFormat::Csv;
}

}  // namespace tnm
