#include "curveot/json_codec.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "curveot/error.hpp"

namespace curveot::json {
namespace {

void require_object(const json& j, std::string_view what, ErrorCode code) {
  if (!j.is_object()) throw Error(code, std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what,
                    ErrorCode code) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(code, "unknown field '" + key + "' in " + std::string(what));
    }
  }
}

template <class T>
T get(const json& j, std::string_view key, std::string_view what, ErrorCode code) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(code, std::string(what) + " is missing '" + std::string(key) + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(code, "field '" + std::string(key) + "' in " + std::string(what) + " has the wrong type");
  }
}

template <class T>
T get_or(const json& j, std::string_view key, T fallback, std::string_view what, ErrorCode code) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key, what, code);
}

std::vector<double> number_array(const json& j, std::string_view what, ErrorCode code) {
  if (!j.is_array()) throw Error(code, std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(code, std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": invalid JSON at byte " + std::to_string(e.byte));
  }
}

json encode(const WeightScheme& s) {
  json j{{"kind", to_string(s.kind)}};
  if (s.p) j["p"] = *s.p;
  if (s.support) {
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, IndexFraction>) {
            j["support"] = {{"mode", "index_fraction"}, {"value", m.fraction}};
          } else if constexpr (std::is_same_v<M, HeightFraction>) {
            j["support"] = {{"mode", "height_fraction"}, {"value", m.fraction}};
          } else {
            j["support"] = {{"mode", "explicit"}, {"value", {m.k1, m.k2}}};
          }
        },
        *s.support);
  }
  return j;
}

WeightScheme decode_scheme(const json& j) {
  constexpr auto code = ErrorCode::InvalidScheme;
  require_object(j, "scheme", code);
  reject_unknown(j, {"kind", "p", "preset", "support"}, "scheme", code);
  WeightScheme s;
  s.kind = scheme_kind_from_string(get<std::string>(j, "kind", "scheme", code));
  if (j.contains("p") && !j["p"].is_null()) s.p = get<double>(j, "p", "scheme", code);
  if (j.contains("preset") && !j["preset"].is_null()) {
    if (s.p) throw Error(code, "give either 'p' or 'preset', not both");
    const auto preset = get<std::string>(j, "preset", "scheme", code);
    if (preset == "sharp") {
      s.p = binomial_preset_p(BinomialPreset::Sharp);
    } else if (preset == "soft") {
      s.p = binomial_preset_p(BinomialPreset::Soft);
    } else {
      throw Error(code, "unknown binomial preset '" + preset + "' (expected sharp or soft)");
    }
  }
  if (j.contains("support") && !j["support"].is_null()) {
    const auto& sj = j["support"];
    require_object(sj, "support", code);
    reject_unknown(sj, {"mode", "value"}, "support", code);
    const auto mode = get<std::string>(sj, "mode", "support", code);
    if (mode == "index_fraction") {
      s.support = IndexFraction{get<double>(sj, "value", "support", code)};
    } else if (mode == "height_fraction") {
      s.support = HeightFraction{get<double>(sj, "value", "support", code)};
    } else if (mode == "explicit") {
      const auto v = get<std::vector<long long>>(sj, "value", "support", code);
      if (v.size() != 2 || v[0] < 0 || v[1] < 0) throw Error(code, "explicit support needs [k1, k2]");
      s.support = ExplicitWindow{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
    } else {
      throw Error(code, "unknown support mode '" + mode + "'");
    }
  }
  s.validate();
  return s;
}

json encode(const PenaltyVectors& p) { return {{"nu", p.nu}, {"mu", p.mu}}; }

PenaltyVectors decode_penalties(const json& j) {
  constexpr auto code = ErrorCode::InvalidConfig;
  require_object(j, "penalties", code);
  reject_unknown(j, {"nu", "mu"}, "penalties", code);
  if (!j.contains("nu") || !j.contains("mu")) throw Error(code, "penalties need both 'nu' and 'mu'");
  PenaltyVectors p{number_array(j["nu"], "nu", code), number_array(j["mu"], "mu", code)};
  for (double v : p.nu) {
    if (!(v >= 0.0)) throw Error(ErrorCode::NegativePenalty, "penalty nu entries must be >= 0");
  }
  for (double v : p.mu) {
    if (!(v >= 0.0)) throw Error(ErrorCode::NegativePenalty, "penalty mu entries must be >= 0");
  }
  return p;
}

json encode(const PenaltySource& p) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, PenaltyVectors>) {
          return encode(v);
        } else if constexpr (std::is_same_v<V, ActiveBlock>) {
          return {{"active_block", {{"rows", v.rows}, {"cols", v.cols}}}};
        } else {
          return {{"active_fraction", v.fraction}};
        }
      },
      p);
}

PenaltySource decode_penalty_source(const json& j) {
  constexpr auto code = ErrorCode::InvalidConfig;
  require_object(j, "penalties", code);
  if (j.contains("active_block")) {
    reject_unknown(j, {"active_block"}, "penalties", code);
    const auto& b = j["active_block"];
    require_object(b, "active_block", code);
    reject_unknown(b, {"rows", "cols"}, "active_block", code);
    return ActiveBlock{get<std::size_t>(b, "rows", "active_block", code),
                       get<std::size_t>(b, "cols", "active_block", code)};
  }
  if (j.contains("active_fraction")) {
    reject_unknown(j, {"active_fraction"}, "penalties", code);
    return ActiveFraction{get<double>(j, "active_fraction", "penalties", code)};
  }
  return decode_penalties(j);
}

json encode(const PipelineConfig& cfg) {
  json j{{"version", cfg.version},
         {"scheme", encode(cfg.scheme)},
         {"external_half", cfg.external_half},
         {"align_centroids", cfg.align_centroids},
         {"invert_y", cfg.invert_y},
         {"cost_order", cfg.cost_order},
         {"variant", to_string(cfg.variant)},
         {"linkage", to_string(cfg.linkage)}};
  j["truncate"] = cfg.truncate ? json(*cfg.truncate) : json(nullptr);
  j["penalties"] = cfg.penalties ? encode(*cfg.penalties) : json(nullptr);
  return j;
}

PipelineConfig decode_config(const json& j) {
  constexpr auto code = ErrorCode::InvalidConfig;
  require_object(j, "config", code);
  reject_unknown(j,
                 {"version", "scheme", "external_half", "align_centroids", "invert_y", "truncate", "cost_order",
                  "variant", "penalties", "linkage"},
                 "config", code);
  PipelineConfig cfg;
  cfg.version = get<int>(j, "version", "config", code);
  if (j.contains("scheme")) cfg.scheme = decode_scheme(j["scheme"]);
  cfg.external_half = get_or<bool>(j, "external_half", cfg.external_half, "config", code);
  cfg.align_centroids = get_or<bool>(j, "align_centroids", cfg.align_centroids, "config", code);
  cfg.invert_y = get_or<bool>(j, "invert_y", cfg.invert_y, "config", code);
  if (j.contains("truncate") && !j["truncate"].is_null()) cfg.truncate = get<double>(j, "truncate", "config", code);
  cfg.cost_order = get_or<double>(j, "cost_order", cfg.cost_order, "config", code);
  if (j.contains("variant")) {
    try {
      cfg.variant = variant_from_string(get<std::string>(j, "variant", "config", code));
    } catch (const Error& e) {
      throw Error(code, e.what());
    }
  }
  if (j.contains("penalties") && !j["penalties"].is_null()) cfg.penalties = decode_penalty_source(j["penalties"]);
  if (j.contains("linkage")) cfg.linkage = linkage_from_string(get<std::string>(j, "linkage", "config", code));
  cfg.validate();
  return cfg;
}

json encode(const Dendrogram& dg) {
  json merges = json::array();
  for (const auto& m : dg.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
  return {{"labels", dg.labels}, {"linkage", to_string(dg.linkage)}, {"merges", merges}};
}

Dendrogram decode_dendrogram(const json& j) {
  constexpr auto code = ErrorCode::Parse;
  require_object(j, "dendrogram", code);
  reject_unknown(j, {"labels", "linkage", "merges", "newick", "leaf_order"}, "dendrogram", code);
  Dendrogram dg;
  dg.labels = get<std::vector<std::string>>(j, "labels", "dendrogram", code);
  dg.linkage = linkage_from_string(get<std::string>(j, "linkage", "dendrogram", code));
  const auto& merges = j.at("merges");
  if (!merges.is_array()) throw Error(code, "dendrogram merges must be an array");
  const std::size_t n = dg.labels.size();
  if (n > 0 && merges.size() + 1 != n) throw Error(code, "dendrogram must have exactly N-1 merges");
  std::vector<std::size_t> size(2 * std::max<std::size_t>(n, 1), 1);
  std::vector<bool> used(size.size(), false);
  for (std::size_t s = 0; s < merges.size(); ++s) {
    const auto& mj = merges[s];
    require_object(mj, "merge", code);
    Merge m{get<std::size_t>(mj, "a", "merge", code), get<std::size_t>(mj, "b", "merge", code),
            get<double>(mj, "height", "merge", code), get<std::size_t>(mj, "size", "merge", code)};
    if (m.a >= m.b || m.b >= n + s || used[m.a] || used[m.b] || size[m.a] + size[m.b] != m.size) {
      throw Error(code, "dendrogram merge " + std::to_string(s) + " is inconsistent");
    }
    used[m.a] = used[m.b] = true;
    size[n + s] = m.size;
    dg.merges.push_back(m);
  }
  return dg;
}

json encode(const DistanceMatrix& d) {
  json rows = json::array();
  for (std::size_t i = 0; i < d.entries.rows(); ++i) {
    rows.push_back(std::vector<double>(d.entries.row(i).begin(), d.entries.row(i).end()));
  }
  return {{"labels", d.labels}, {"entries", rows}};
}

DistanceMatrix decode_distance_matrix(const json& j) {
  constexpr auto code = ErrorCode::Parse;
  require_object(j, "matrix", code);
  reject_unknown(j, {"labels", "entries"}, "matrix", code);
  DistanceMatrix d;
  d.labels = get<std::vector<std::string>>(j, "labels", "matrix", code);
  const auto rows = get<std::vector<std::vector<double>>>(j, "entries", "matrix", code);
  d.entries = Matrix(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw Error(code, "matrix row " + std::to_string(i + 1) + " has wrong length");
    for (std::size_t k = 0; k < rows.size(); ++k) d.entries(i, k) = rows[i][k];
  }
  d.validate();
  return d;
}

json encode(const io::DatasetManifest& m) {
  json curves = json::array();
  for (const auto& c : m.curves) curves.push_back({{"id", c.id}, {"path", c.path}});
  return {{"name", m.name}, {"curves", curves}, {"created", m.created}};
}

io::DatasetManifest decode_manifest(const json& j) {
  constexpr auto code = ErrorCode::ManifestParse;
  require_object(j, "manifest", code);
  reject_unknown(j, {"name", "curves", "created"}, "manifest", code);
  io::DatasetManifest m;
  m.name = get<std::string>(j, "name", "manifest", code);
  m.created = get_or<std::string>(j, "created", "", "manifest", code);
  const auto it = j.find("curves");
  if (it == j.end() || !it->is_array()) throw Error(code, "manifest needs a 'curves' array");
  for (const auto& c : *it) {
    require_object(c, "manifest curve", code);
    reject_unknown(c, {"id", "path"}, "manifest curve", code);
    io::ManifestEntry e{get<std::string>(c, "id", "manifest curve", code),
                    get<std::string>(c, "path", "manifest curve", code)};
    if (e.id.empty()) throw Error(code, "manifest curve ids must be nonempty");
    for (const auto& prev : m.curves) {
      if (prev.id == e.id) throw Error(code, "duplicate curve id '" + e.id + "' in manifest");
    }
    m.curves.push_back(std::move(e));
  }
  return m;
}

json encode(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

json encode(const DualityReport& r) {
  return {{"primal_objective", r.primal_objective},
          {"dual_objective", r.dual_objective},
          {"duality_gap", r.duality_gap},
          {"max_primal_infeasibility", r.max_primal_infeasibility},
          {"max_dual_infeasibility", r.max_dual_infeasibility},
          {"max_slack_violation", r.max_slack_violation},
          {"ok", r.ok()}};
}

json encode_points(const Curve2D& c) {
  json pts = json::array();
  for (const auto& p : c.points()) pts.push_back({p.x1, p.x2});
  return pts;
}

}  // namespace curveot::json
