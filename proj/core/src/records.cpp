#include "pzd/records.hpp"

#include <cstdio>

namespace pzd {

std::string RecordWriter::render_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RecordWriter::Row& RecordWriter::Row::field(const std::string& key, const std::string& value) {
  fields_.emplace_back(key, value);
  return *this;
}

RecordWriter::Row& RecordWriter::Row::field(const std::string& key, double value) {
  return field(key, render_double(value));
}

RecordWriter::Row& RecordWriter::Row::field(const std::string& key, long value) {
  return field(key, std::to_string(value));
}

RecordWriter::Row& RecordWriter::Row::field(const std::string& key, bool value) {
  return field(key, std::string(value ? "true" : "false"));
}

RecordWriter::Row::~Row() { writer_.emit(fields_); }

void RecordWriter::emit(const std::vector<std::pair<std::string, std::string>>& fields) {
  if (format_ == RecordFormat::Text) {
    bool first = true;
    for (const auto& [k, v] : fields) {
      if (!first) out_ << ' ';
      first = false;
      out_ << k << '=' << v;
    }
    out_ << '\n';
    return;
  }
  if (!header_written_) {
    bool first = true;
    for (const auto& [k, v] : fields) {
      if (!first) out_ << ',';
      first = false;
      out_ << k;
    }
    out_ << '\n';
    header_written_ = true;
  }
  bool first = true;
  for (const auto& [k, v] : fields) {
    if (!first) out_ << ',';
    first = false;
    // CSV cells containing commas or spaces are quoted.
    if (v.find(',') != std::string::npos || v.find(' ') != std::string::npos)
      out_ << '"' << v << '"';
    else
      out_ << v;
  }
  out_ << '\n';
}

}  // namespace pzd
