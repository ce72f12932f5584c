#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "cwls/errors.hpp"
#include "cwls/experiment.hpp"

namespace cwls {

namespace {

const char* kHeader =
    "method,d,domain,function,N,M,trial,seed,E_tau,E_tau_tilde,C,kappa,wall_ms,kind";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// One RFC-4180 record (handles quoted fields; our writer never emits
// embedded newlines).
std::vector<std::string> split_record(const std::string& line, int line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (in_quotes)
    throw DataError("CSV line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(current));
  return fields;
}

std::optional<double> parse_optional(const std::string& s, int line_no,
                                     const std::string& column) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("CSV line " + std::to_string(line_no) + ": bad number '" + s +
                    "' in column " + column);
  }
}

long long parse_int(const std::string& s, int line_no, const std::string& column) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("CSV line " + std::to_string(line_no) + ": bad integer '" + s +
                    "' in column " + column);
  }
}

}  // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kHeader << "\n";
  for (const auto& row : rows) {
    os << quote(row.method) << ',' << row.d << ',' << quote(row.domain) << ','
       << quote(row.function) << ',' << row.N << ',' << row.M << ',' << row.trial
       << ',' << row.seed << ',' << format_optional(row.E_tau) << ','
       << format_optional(row.E_tau_tilde) << ',' << format_optional(row.C) << ','
       << format_optional(row.kappa) << ',' << format_optional(row.wall_ms) << ','
       << row.kind << "\n";
  }
}

void write_csv_file(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(rows, out);
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  int line_no = 0;
  if (!std::getline(is, line)) throw DataError("CSV line 1: empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw DataError("CSV line 1: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_record(line, line_no);
    if (fields.size() != 14)
      throw DataError("CSV line " + std::to_string(line_no) + ": expected 14 fields, got " +
                      std::to_string(fields.size()));
    ResultRow row;
    row.method = fields[0];
    row.d = static_cast<int>(parse_int(fields[1], line_no, "d"));
    row.domain = fields[2];
    row.function = fields[3];
    row.N = static_cast<int>(parse_int(fields[4], line_no, "N"));
    row.M = static_cast<int>(parse_int(fields[5], line_no, "M"));
    row.trial = static_cast<int>(parse_int(fields[6], line_no, "trial"));
    row.seed = static_cast<std::uint64_t>(parse_int(fields[7], line_no, "seed"));
    row.E_tau = parse_optional(fields[8], line_no, "E_tau");
    row.E_tau_tilde = parse_optional(fields[9], line_no, "E_tau_tilde");
    row.C = parse_optional(fields[10], line_no, "C");
    row.kappa = parse_optional(fields[11], line_no, "kappa");
    row.wall_ms = parse_optional(fields[12], line_no, "wall_ms");
    row.kind = fields[13];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_csv(in);
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        (c >= '0' && c <= '9') || c == '_' || c == '-')
      out += c;
    else
      out += '-';
  }
  return out;
}

// Escape for a single-quoted gnuplot string.
std::string gp_quote(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out;
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& style,
                                    const std::string& out_dir) {
  std::string x_column, y_column, y_label;
  if (style == "fig1") {
    x_column = "M";
    y_column = "E_tau";
    y_label = "relative error on the K-grid";
  } else if (style == "fig3") {
    x_column = "N";
    y_column = "C";
    y_label = "stability constant C";
  } else if (style == "fig6") {
    x_column = "M";
    y_column = "E_tau_tilde";
    y_label = "relative error off the grid";
  } else {
    throw ConfigError("unknown plot style '" + style + "' (fig1|fig3|fig6)");
  }

  const std::vector<ResultRow> rows = read_csv_file(csv_path);
  // Panels keyed by (domain, function); curves by method label.
  std::vector<std::pair<std::string, std::string>> panels;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> methods;
  for (const auto& row : rows) {
    if (row.kind != "mean") continue;
    const std::pair<std::string, std::string> key{row.domain, row.function};
    if (std::find(panels.begin(), panels.end(), key) == panels.end())
      panels.push_back(key);
    auto& list = methods[key];
    if (std::find(list.begin(), list.end(), row.method) == list.end())
      list.push_back(row.method);
  }
  if (panels.empty())
    throw DataError("CSV '" + csv_path + "' has no mean rows to plot");

  std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
  const std::filesystem::path csv_abs = std::filesystem::absolute(csv_path);

  std::vector<std::string> written;
  for (const auto& [domain, function] : panels) {
    const std::string stem =
        "plot_" + style + "_" + sanitize(domain) + "_" + sanitize(function);
    const std::filesystem::path path =
        std::filesystem::path(out_dir.empty() ? "." : out_dir) / (stem + ".gp");
    std::ofstream gp(path);
    if (!gp) throw ConfigError("cannot open '" + path.string() + "' for writing");
    gp << "# " << style << " panel: domain=" << domain << " function=" << function
       << "\n"
       << "# run with: gnuplot " << path.filename().string() << "\n"
       << "set datafile separator comma\n"
       << "set terminal pngcairo size 900,650\n"
       << "set output '" << stem << ".png'\n"
       << "set logscale y\n"
       << "set xlabel '" << x_column << "'\n"
       << "set ylabel '" << gp_quote(y_label) << "'\n"
       << "set key top right\n"
       << "set title '" << gp_quote(domain) << ", " << gp_quote(function) << "'\n"
       << "csv = '" << gp_quote(csv_abs.string()) << "'\n"
       << "plot \\\n";
    const auto& list = methods[{domain, function}];
    for (std::size_t m = 0; m < list.size(); ++m) {
      gp << "  csv using (column('" << x_column << "')):("
         << "strcol('kind') eq 'mean' && strcol('method') eq '" << gp_quote(list[m])
         << "' && strcol('domain') eq '" << gp_quote(domain)
         << "' && strcol('function') eq '" << gp_quote(function) << "' ? column('"
         << y_column << "') : NaN) with linespoints title '" << gp_quote(list[m])
         << "'";
      gp << (m + 1 < list.size() ? ", \\\n" : "\n");
    }
    written.push_back(path.string());
  }
  return written;
}

}  // namespace cwls
