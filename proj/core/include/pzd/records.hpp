#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace pzd {

enum class RecordFormat { Text, Csv };

// One output record: ordered key/value pairs. Text mode prints
// "k1=v1 k2=v2", CSV mode prints a header row (once) and value rows.
// Numeric values are rendered with 17 significant digits so identical inputs
// produce byte-identical output.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, RecordFormat format) : out_(out), format_(format) {}

  class Row {
   public:
    Row& field(const std::string& key, const std::string& value);
    Row& field(const std::string& key, double value);
    Row& field(const std::string& key, long value);
    Row& field(const std::string& key, int value) { return field(key, static_cast<long>(value)); }
    Row& field(const std::string& key, std::size_t value) {
      return field(key, static_cast<long>(value));
    }
    Row& field(const std::string& key, bool value);
    ~Row();
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;
    Row(Row&&) = delete;

   private:
    friend class RecordWriter;
    explicit Row(RecordWriter& writer) : writer_(writer) {}
    RecordWriter& writer_;
    std::vector<std::pair<std::string, std::string>> fields_;
  };

  Row row() { return Row(*this); }

  static std::string render_double(double value);

 private:
  friend class Row;
  void emit(const std::vector<std::pair<std::string, std::string>>& fields);

  std::ostream& out_;
  RecordFormat format_;
  bool header_written_ = false;
};

}  // namespace pzd
