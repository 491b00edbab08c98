#include "curveot/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "curveot/error.hpp"
#include "curveot/json_codec.hpp"

namespace curveot::io {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  const bool delimited = line.find_first_of(",;") != std::string_view::npos;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (delimited) {
      const auto j = line.find_first_of(",;", i);
      out.push_back(trim(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i)));
      if (j == std::string_view::npos) break;
      i = j + 1;
    } else {
      const auto b = line.find_first_not_of(" \t\r", i);
      if (b == std::string_view::npos) break;
      const auto e = line.find_first_of(" \t\r", b);
      out.push_back(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
      if (e == std::string_view::npos) break;
      i = e;
    }
  }
  return out;
}

// RFC 4180 style fields: quotes only where needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"' && trim(cur).empty()) {
      quoted = was_quoted = true;
      cur.clear();
    } else if (ch == ',') {
      out.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": unterminated quoted field");
  out.push_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && trim(line).front() != '#') out.emplace_back(line_no, line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

Curve2D parse_curve_csv(std::string_view text, std::string id) {
  std::vector<Point2> pts;
  bool first = true;
  for (const auto& [line_no, line] : content_lines(text)) {
    const auto fields = split_fields(line);
    double x1 = 0.0, x2 = 0.0;
    const bool numeric = fields.size() == 2 && parse_number(fields[0], x1) && parse_number(fields[1], x2);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::Parse, "curve '" + id + "' line " + std::to_string(line_no) +
                                        ": expected two numeric columns");
    }
    first = false;
    pts.push_back({x1, x2});
  }
  return validate_curve(std::move(pts), std::move(id));
}

Curve2D load_curve_csv(const fs::path& path, std::string id) {
  if (id.empty()) id = path.stem().string();
  return parse_curve_csv(read_file(path), std::move(id));
}

std::string format_curve_csv(const Curve2D& c) {
  std::string out = "x1,x2\n";
  for (const auto& p : c.points()) out += format_double(p.x1) + "," + format_double(p.x2) + "\n";
  return out;
}

DatasetManifest parse_manifest(std::string_view text) {
  json::json j;
  try {
    j = json::parse(text, "manifest");
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestParse, e.what());
  }
  return json::decode_manifest(j);
}

std::string format_manifest(const DatasetManifest& m) { return json::encode(m).dump(2) + "\n"; }

DatasetManifest load_manifest(const fs::path& path) { return parse_manifest(read_file(path)); }

std::vector<Curve2D> load_dataset(const fs::path& manifest_path) {
  const auto m = load_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  std::vector<Curve2D> curves;
  curves.reserve(m.curves.size());
  for (const auto& e : m.curves) {
    fs::path p(e.path);
    if (p.is_relative()) p = base / p;
    curves.push_back(load_curve_csv(p, e.id));
  }
  return curves;
}

std::string format_matrix_csv(const DistanceMatrix& d) {
  std::string out;
  for (const auto& l : d.labels) out += "," + csv_field(l);
  out += "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += csv_field(d.labels[i]);
    for (std::size_t j = 0; j < d.size(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d.entries(i, j));
      out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

DistanceMatrix parse_matrix_csv(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Parse, "matrix file is empty");
  auto header = parse_csv_record(lines[0].second, lines[0].first);
  if (header.size() < 2) throw Error(ErrorCode::Parse, "line " + std::to_string(lines[0].first) + ": no labels");
  DistanceMatrix d;
  d.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = d.labels.size();
  if (lines.size() != n + 1) {
    throw Error(ErrorCode::Parse, "matrix has " + std::to_string(n) + " labels but " +
                                      std::to_string(lines.size() - 1) + " rows");
  }
  d.entries = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [line_no, line] = lines[i + 1];
    const auto fields = parse_csv_record(line, line_no);
    if (fields.size() != n + 1) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    if (fields[0] != d.labels[i]) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": row label '" + fields[0] +
                                        "' does not match column label '" + d.labels[i] + "'");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!parse_number(fields[j + 1], d.entries(i, j))) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ", column " + std::to_string(j + 2) +
                                          ": '" + fields[j + 1] + "' is not a number");
      }
    }
  }
  d.validate();
  return d;
}

void save_matrix(const DistanceMatrix& d, const fs::path& path) { write_file(path, format_matrix_csv(d)); }

DistanceMatrix load_matrix(const fs::path& path) { return parse_matrix_csv(read_file(path)); }

std::string format_matrix_plain_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string format_plan_csv(const Matrix& pi) {
  std::string out = "i";
  for (std::size_t j = 0; j < pi.cols(); ++j) out += "," + std::to_string(j + 1);
  out += "\n";
  for (std::size_t i = 0; i < pi.rows(); ++i) {
    out += std::to_string(i + 1);
    for (std::size_t j = 0; j < pi.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", pi(i, j));
      out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

PipelineConfig parse_config(std::string_view text) { return json::decode_config(json::parse(text, "config")); }

std::string format_config(const PipelineConfig& cfg) { return json::encode(cfg).dump(2) + "\n"; }

PipelineConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

WeightScheme parse_scheme(std::string_view text) { return json::decode_scheme(json::parse(text, "scheme")); }

WeightScheme parse_scheme_text(std::string_view text) {
  const auto t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_scheme(t);
  WeightScheme s;
  s.kind = scheme_kind_from_string(t);
  return s;
}

SupportMode parse_support_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidScheme, "support must look like mode:value, got '" + std::string(text) + "'");
  }
  const auto mode = trim(text.substr(0, colon));
  const auto value = trim(text.substr(colon + 1));
  double f = 0.0;
  if (mode == "index_fraction" || mode == "height_fraction") {
    if (!parse_number(value, f)) throw Error(ErrorCode::InvalidScheme, "support fraction '" + std::string(value) + "' is not a number");
    if (mode == "index_fraction") return IndexFraction{f};
    return HeightFraction{f};
  }
  if (mode == "explicit") {
    const auto fields = split_fields(value);
    double k1 = 0.0, k2 = 0.0;
    if (fields.size() != 2 || !parse_number(fields[0], k1) || !parse_number(fields[1], k2) || k1 < 0 || k2 < 0 ||
        k1 != std::floor(k1) || k2 != std::floor(k2)) {
      throw Error(ErrorCode::InvalidScheme, "explicit support needs two indices, e.g. explicit:2,9");
    }
    return ExplicitWindow{static_cast<std::size_t>(k1), static_cast<std::size_t>(k2)};
  }
  throw Error(ErrorCode::InvalidScheme, "unknown support mode '" + std::string(mode) + "'");
}

PenaltyVectors parse_penalties(std::string_view text) {
  return json::decode_penalties(json::parse(text, "penalties"));
}

std::string format_dendrogram(const Dendrogram& dg) { return json::encode(dg).dump(2) + "\n"; }

Dendrogram parse_dendrogram(std::string_view text) {
  return json::decode_dendrogram(json::parse(text, "dendrogram"));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::MissingFile, "failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::MissingFile, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace curveot::io
