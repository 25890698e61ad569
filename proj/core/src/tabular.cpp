#include "arf/tabular.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "arf/error.hpp"

namespace arf {

namespace {

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
  by_name_.reserve(columns_.size());
  level_codes_.resize(columns_.size());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& col = columns_[i];
    if (col.name.empty()) throw Error("schema: empty column name");
    if (!by_name_.emplace(col.name, i).second)
      throw Error("schema: duplicate column name " + quote(col.name));
    if (col.kind == ColumnKind::categorical) {
      if (col.levels.empty())
        throw Error("schema: categorical column " + quote(col.name) + " has no levels");
      auto& codes = level_codes_[i];
      codes.reserve(col.levels.size());
      for (std::size_t c = 0; c < col.levels.size(); ++c) {
        if (!codes.emplace(col.levels[c], static_cast<std::int32_t>(c)).second)
          throw Error("schema: duplicate level " + quote(col.levels[c]) + " in column " +
                      quote(col.name));
      }
    } else if (!col.levels.empty()) {
      throw Error("schema: continuous column " + quote(col.name) + " carries levels");
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Schema::level_code(std::size_t col, std::string_view label) const {
  const auto& codes = level_codes_[col];
  auto it = codes.find(std::string(label));
  return it == codes.end() ? -1 : it->second;
}

Dataset::Dataset(Schema schema, std::vector<ColumnValues> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.n_columns())
    throw Error("dataset: column count does not match schema");
  n_rows_ = columns_.empty()
                ? 0
                : std::visit([](const auto& v) { return v.size(); }, columns_[0]);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& col = schema_.column(i);
    if (col.kind == ColumnKind::continuous) {
      const auto* values = std::get_if<std::vector<double>>(&columns_[i]);
      if (!values) throw Error("dataset: column " + quote(col.name) + " has wrong storage kind");
      if (values->size() != n_rows_)
        throw Error("dataset: column " + quote(col.name) + " has mismatched length");
      for (double v : *values)
        if (!std::isfinite(v))
          throw Error("dataset: non-finite value in column " + quote(col.name));
    } else {
      const auto* codes = std::get_if<std::vector<std::int32_t>>(&columns_[i]);
      if (!codes) throw Error("dataset: column " + quote(col.name) + " has wrong storage kind");
      if (codes->size() != n_rows_)
        throw Error("dataset: column " + quote(col.name) + " has mismatched length");
      const auto n_levels = static_cast<std::int32_t>(col.levels.size());
      for (std::int32_t c : *codes)
        if (c < 0 || c >= n_levels)
          throw Error("dataset: level code out of range in column " + quote(col.name));
    }
  }
}

std::span<const double> Dataset::continuous(std::size_t col) const {
  return std::get<std::vector<double>>(columns_[col]);
}

std::span<const std::int32_t> Dataset::codes(std::size_t col) const {
  return std::get<std::vector<std::int32_t>>(columns_[col]);
}

bool Dataset::operator==(const Dataset& other) const {
  return schema_ == other.schema_ && n_rows_ == other.n_rows_ && columns_ == other.columns_;
}

Dataset concat_rows(const Dataset& a, const Dataset& b) {
  if (!(a.schema() == b.schema())) throw Error("concat_rows: schemas differ");
  std::vector<ColumnValues> columns;
  columns.reserve(a.n_columns());
  for (std::size_t i = 0; i < a.n_columns(); ++i) {
    if (a.schema().column(i).kind == ColumnKind::continuous) {
      std::vector<double> merged(a.continuous(i).begin(), a.continuous(i).end());
      merged.insert(merged.end(), b.continuous(i).begin(), b.continuous(i).end());
      columns.emplace_back(std::move(merged));
    } else {
      std::vector<std::int32_t> merged(a.codes(i).begin(), a.codes(i).end());
      merged.insert(merged.end(), b.codes(i).begin(), b.codes(i).end());
      columns.emplace_back(std::move(merged));
    }
  }
  return Dataset(a.schema(), std::move(columns));
}

std::optional<double> parse_real(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  if (std::isspace(static_cast<unsigned char>(cell.front())) ||
      std::isspace(static_cast<unsigned char>(cell.back())))
    return std::nullopt;
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  if (end != begin + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

namespace {

// Character-level RFC 4180 scanner. Keeps \r\n inside quoted fields verbatim,
// treats \r\n or \n as a record separator elsewhere.
class CsvScanner {
 public:
  explicit CsvScanner(std::istream& in) {
    std::string chunk(std::istreambuf_iterator<char>(in), {});
    text_ = std::move(chunk);
  }

  // Returns false at end of input.
  bool next_record(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
          } else {
            in_quotes = false;
            ++pos_;
          }
        } else {
          field.push_back(c);
          ++pos_;
        }
        continue;
      }
      if (c == '"') {
        if (!field.empty())
          throw Error("csv: stray quote in record " + std::to_string(record_ + 1));
        in_quotes = true;
        field_was_quoted = true;
        ++pos_;
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\n' || c == '\r') {
        pos_ += (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ? 2 : 1;
        fields.push_back(std::move(field));
        ++record_;
        return true;
      }
      field.push_back(c);
      ++pos_;
    }
    if (in_quotes) throw Error("csv: unterminated quoted field");
    (void)field_was_quoted;
    fields.push_back(std::move(field));
    ++record_;
    return true;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t record_ = 0;
};

bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

void write_csv_field(std::ostream& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

CsvTable parse_csv(std::istream& in) {
  CsvScanner scanner(in);
  CsvTable table;
  if (!scanner.next_record(table.header)) throw Error("csv: empty input, header row required");
  std::vector<std::string> fields;
  while (scanner.next_record(fields)) {
    if (fields.size() != table.header.size())
      throw Error("csv: ragged row " + std::to_string(table.rows.size() + 1) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
    fields = {};
  }
  return table;
}

Schema infer_schema(const CsvTable& table, const KindOverrides& overrides) {
  if (table.rows.empty()) throw Error("csv: no data rows");
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& name : table.header) {
      if (name.empty()) throw Error("csv: empty header name");
      if (!seen.insert(name).second) throw Error("csv: duplicate header name " + quote(name));
    }
  }
  for (const auto& [name, kind] : overrides) {
    (void)kind;
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end())
      throw Error("schema override names unknown column " + quote(name));
  }

  std::vector<Column> columns;
  columns.reserve(table.header.size());
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    Column col;
    col.name = table.header[j];
    auto ov = overrides.find(col.name);
    bool continuous;
    if (ov != overrides.end()) {
      continuous = ov->second == ColumnKind::continuous;
    } else {
      continuous = true;
      for (const auto& row : table.rows) {
        const std::string& cell = row[j];
        if (cell.empty()) continue;
        if (!parse_real(cell)) {
          continuous = false;
          break;
        }
      }
    }
    if (continuous) {
      col.kind = ColumnKind::continuous;
    } else {
      col.kind = ColumnKind::categorical;
      std::unordered_set<std::string_view> seen;
      for (const auto& row : table.rows) {
        const std::string& cell = row[j];
        if (cell.empty()) continue;
        if (seen.insert(cell).second) col.levels.push_back(cell);
      }
      if (col.levels.empty())
        throw Error("column " + quote(col.name) + " has no usable categorical values");
    }
    columns.push_back(std::move(col));
  }
  return Schema(std::move(columns));
}

Dataset dataset_from_csv(const CsvTable& table, const Schema& schema) {
  if (table.header.size() != schema.n_columns())
    throw Error("csv: header does not match schema column count");
  for (std::size_t j = 0; j < schema.n_columns(); ++j)
    if (table.header[j] != schema.column(j).name)
      throw Error("csv: header column " + quote(table.header[j]) + " does not match schema column " +
                  quote(schema.column(j).name));

  std::vector<ColumnValues> columns;
  columns.reserve(schema.n_columns());
  for (std::size_t j = 0; j < schema.n_columns(); ++j) {
    const Column& col = schema.column(j);
    if (col.kind == ColumnKind::continuous) {
      std::vector<double> values;
      values.reserve(table.rows.size());
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::string& cell = table.rows[i][j];
        if (cell.empty())
          throw Error("row " + std::to_string(i + 1) + ", column " + quote(col.name) +
                      ": missing value");
        auto v = parse_real(cell);
        if (!v)
          throw Error("row " + std::to_string(i + 1) + ", column " + quote(col.name) +
                      ": cannot parse " + quote(cell) + " as a finite number");
        values.push_back(*v);
      }
      columns.emplace_back(std::move(values));
    } else {
      std::vector<std::int32_t> codes;
      codes.reserve(table.rows.size());
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::string& cell = table.rows[i][j];
        if (cell.empty())
          throw Error("row " + std::to_string(i + 1) + ", column " + quote(col.name) +
                      ": missing value");
        const std::int32_t code = schema.level_code(j, cell);
        if (code < 0)
          throw Error("row " + std::to_string(i + 1) + ", column " + quote(col.name) +
                      ": unknown level " + quote(cell));
        codes.push_back(code);
      }
      columns.emplace_back(std::move(codes));
    }
  }
  return Dataset(schema, std::move(columns));
}

Dataset read_csv(std::istream& in, const KindOverrides& overrides) {
  CsvTable table = parse_csv(in);
  Schema schema = infer_schema(table, overrides);
  return dataset_from_csv(table, schema);
}

Dataset read_csv(std::istream& in, const Schema& schema) {
  CsvTable table = parse_csv(in);
  return dataset_from_csv(table, schema);
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(const Dataset& data, std::ostream& out) {
  const Schema& schema = data.schema();
  for (std::size_t j = 0; j < schema.n_columns(); ++j) {
    if (j) out << ',';
    write_csv_field(out, schema.column(j).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < schema.n_columns(); ++j) {
      if (j) out << ',';
      const Column& col = schema.column(j);
      if (col.kind == ColumnKind::continuous) {
        write_csv_field(out, format_double(data.continuous(j)[i]));
      } else {
        write_csv_field(out, col.levels[data.codes(j)[i]]);
      }
    }
    out << '\n';
  }
  if (!out) throw Error("csv: write failure");
}

KindOverrides read_kind_overrides(std::istream& in) {
  KindOverrides overrides;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("override file line " + std::to_string(line_no) + ": expected name=kind");
    const std::string name = line.substr(0, eq);
    const std::string kind = line.substr(eq + 1);
    if (name.empty())
      throw Error("override file line " + std::to_string(line_no) + ": empty column name");
    ColumnKind k;
    if (kind == "continuous") {
      k = ColumnKind::continuous;
    } else if (kind == "categorical") {
      k = ColumnKind::categorical;
    } else {
      throw Error("override file line " + std::to_string(line_no) + ": unknown kind " +
                  quote(kind));
    }
    if (!overrides.emplace(name, k).second)
      throw Error("override file line " + std::to_string(line_no) + ": duplicate column " +
                  quote(name));
  }
  return overrides;
}

}  // namespace arf
