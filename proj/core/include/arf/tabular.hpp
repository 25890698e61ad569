#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace arf {

enum class ColumnKind : std::uint8_t { continuous, categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  // Categorical only: level code = index into this registry. Registration
  // order is first appearance in the source data and is never reordered.
  std::vector<std::string> levels;

  bool operator==(const Column&) const = default;
};

// Ordered, validated column layout. Immutable after construction.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> columns);

  std::size_t n_columns() const { return columns_.size(); }
  const Column& column(std::size_t i) const { return columns_[i]; }
  const std::vector<Column>& columns() const { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Code of `label` in column `col`, or -1 when the label is unknown.
  std::int32_t level_code(std::size_t col, std::string_view label) const;

  bool operator==(const Schema& other) const { return columns_ == other.columns_; }

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<std::unordered_map<std::string, std::int32_t>> level_codes_;
};

// Column storage: doubles for continuous columns, level codes for categorical.
using ColumnValues = std::variant<std::vector<double>, std::vector<std::int32_t>>;

// Column-major table of validated values. Continuous cells are finite,
// categorical codes are within their level registry. Immutable.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<ColumnValues> columns);

  const Schema& schema() const { return schema_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return schema_.n_columns(); }

  std::span<const double> continuous(std::size_t col) const;
  std::span<const std::int32_t> codes(std::size_t col) const;

  bool operator==(const Dataset& other) const;

 private:
  Schema schema_;
  std::size_t n_rows_ = 0;
  std::vector<ColumnValues> columns_;
};

// Row-concatenation of two datasets with identical schemas.
Dataset concat_rows(const Dataset& a, const Dataset& b);

// Raw parsed CSV: header plus string cells, no typing applied yet.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Full-cell finite-real parse; nullopt for anything else (including
// NaN/infinity spellings and leading/trailing whitespace).
std::optional<double> parse_real(const std::string& cell);

using KindOverrides = std::map<std::string, ColumnKind, std::less<>>;

// RFC 4180 parser: quoted fields, doubled-quote escapes, CRLF or LF line
// endings, mandatory header row. Throws on ragged rows and stray quotes.
CsvTable parse_csv(std::istream& in);

// A column is continuous iff every non-empty cell parses as a finite real and
// no override says otherwise. Categorical levels register in first-appearance
// order. Throws on duplicate/empty header names, zero data rows, or an
// override naming an absent column.
Schema infer_schema(const CsvTable& table, const KindOverrides& overrides = {});

// Typed conversion of parsed cells under a fixed schema. Unknown categorical
// labels and unparseable or empty cells are errors naming row and column.
Dataset dataset_from_csv(const CsvTable& table, const Schema& schema);

Dataset read_csv(std::istream& in, const KindOverrides& overrides = {});
// Reads under an existing schema (header must match it exactly); all
// categorical labels must already be registered.
Dataset read_csv(std::istream& in, const Schema& schema);

// Header + rows, categorical cells as level labels, continuous cells in
// shortest round-trip form so read_csv(write_csv(d)) under the same schema
// reproduces d exactly.
void write_csv(const Dataset& data, std::ostream& out);

// Flat override file, one `name=continuous|categorical` pair per line.
// Blank lines and lines starting with '#' are skipped.
KindOverrides read_kind_overrides(std::istream& in);

std::string format_double(double value);  // shortest round-trip text

// One CSV field, quoted and escaped only when needed.
void write_csv_field(std::ostream& out, std::string_view field);

}  // namespace arf
