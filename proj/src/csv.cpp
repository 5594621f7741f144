#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "edeen/dataset.hpp"
#include "edeen/error.hpp"

namespace edeen {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  fields.push_back(trim(cur));
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
  std::string_view v = field;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ParseError(line_no, "column '" + column + "': '" + field + "' is not a finite number");
  return out;
}

// Where each CSV field goes.
struct FieldPlan {
  std::vector<int> decl_of_field;  // index into schema.columns, -1 for the label
  int label_field = -1;
};

FieldPlan plan_from_header(const std::vector<std::string>& header, const Schema& schema,
                           std::size_t line_no) {
  std::map<std::string, int> decl_index;
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    decl_index[schema.columns[i].name] = static_cast<int>(i);
  FieldPlan plan;
  std::vector<bool> covered(schema.columns.size(), false);
  for (std::size_t f = 0; f < header.size(); ++f) {
    const std::string& name = header[f];
    if (name == schema.label_column) {
      if (plan.label_field >= 0) throw SchemaError("label column '" + name + "' appears twice");
      plan.label_field = static_cast<int>(f);
      plan.decl_of_field.push_back(-1);
      continue;
    }
    const auto it = decl_index.find(name);
    if (it == decl_index.end())
      throw SchemaError("line " + std::to_string(line_no) + ": column '" + name +
                        "' is not declared in the schema");
    if (covered[static_cast<std::size_t>(it->second)])
      throw SchemaError("column '" + name + "' appears twice in the header");
    covered[static_cast<std::size_t>(it->second)] = true;
    plan.decl_of_field.push_back(it->second);
  }
  for (std::size_t i = 0; i < covered.size(); ++i)
    if (!covered[i]) throw SchemaError("declared column '" + schema.columns[i].name + "' is missing");
  return plan;
}

FieldPlan plan_without_header(std::size_t field_count, const Schema& schema, std::size_t line_no) {
  FieldPlan plan;
  const std::size_t n = schema.columns.size();
  if (field_count != n && field_count != n + 1)
    throw ParseError(line_no, "expected " + std::to_string(n) + " or " + std::to_string(n + 1) +
                                  " fields, found " + std::to_string(field_count));
  for (std::size_t i = 0; i < n; ++i) plan.decl_of_field.push_back(static_cast<int>(i));
  if (field_count == n + 1) {
    plan.label_field = static_cast<int>(n);
    plan.decl_of_field.push_back(-1);
  }
  return plan;
}

}  // namespace

Dataset parse_csv(const std::string& text, const Schema& schema, bool require_labels) {
  // Feature offsets of each declaration in the expanded vector.
  std::vector<std::size_t> offset(schema.columns.size());
  std::vector<ColumnMeta> meta;
  std::vector<std::map<std::string, std::size_t>> vocab_index(schema.columns.size());
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    const ColumnDecl& c = schema.columns[i];
    offset[i] = meta.size();
    if (c.kind == ColumnKind::Numeric) {
      meta.push_back({c.name, ColumnOrigin::Numeric, {}, {}});
    } else {
      for (std::size_t v = 0; v < c.vocabulary.size(); ++v) {
        meta.push_back({c.name + "=" + c.vocabulary[v], ColumnOrigin::OneHot, c.name, c.vocabulary[v]});
        vocab_index[i][c.vocabulary[v]] = v;
      }
    }
  }
  const std::size_t dim = meta.size();

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<FieldPlan> plan;
  std::vector<double> values;
  std::vector<Label> labels;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line, line_no);
    if (!plan) {
      if (schema.has_header) {
        plan = plan_from_header(fields, schema, line_no);
        if (require_labels && plan->label_field < 0)
          throw SchemaError("label column '" + schema.label_column + "' not found in header");
        continue;
      }
      plan = plan_without_header(fields.size(), schema, line_no);
      if (require_labels && plan->label_field < 0)
        throw SchemaError("rows carry no label field");
    }
    if (fields.size() != plan->decl_of_field.size())
      throw ParseError(line_no, "expected " + std::to_string(plan->decl_of_field.size()) +
                                    " fields, found " + std::to_string(fields.size()));
    const std::size_t base = values.size();
    values.resize(base + dim, 0.0);
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const int d = plan->decl_of_field[f];
      if (d < 0) {
        labels.push_back(schema.label_of(fields[f]));
        continue;
      }
      const auto di = static_cast<std::size_t>(d);
      const ColumnDecl& decl = schema.columns[di];
      if (decl.kind == ColumnKind::Numeric) {
        values[base + offset[di]] = parse_number(fields[f], line_no, decl.name);
      } else {
        // Values outside the vocabulary leave the block all zero.
        const auto it = vocab_index[di].find(fields[f]);
        if (it != vocab_index[di].end()) values[base + offset[di] + it->second] = 1.0;
      }
    }
    ++rows;
  }
  if (!plan && schema.has_header) throw ParseError(line_no + 1, "missing header row");
  if (require_labels && !plan) throw SchemaError("no rows to read labels from");

  std::optional<std::vector<Label>> label_vec;
  if (plan && plan->label_field >= 0) label_vec = std::move(labels);
  return Dataset(Matrix(rows, dim, std::move(values)), std::move(meta), std::move(label_vec));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema, bool require_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, require_labels);
}

void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write data file " + path.string());
  const auto& cols = data.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
  if (data.has_labels()) out << (cols.empty() ? "" : ",") << label_column;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features()(r, c));
      out << (c ? "," : "") << buf;
    }
    if (data.has_labels()) out << (data.dim() ? "," : "") << label_text((*data.labels())[r]);
    out << '\n';
  }
  if (!out) throw IoError("failed writing data file " + path.string());
}

}  // namespace edeen
