// curveot: distances, distance matrices, dendrograms and the HTTP service.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "curveot/error.hpp"
#include "curveot/io.hpp"
#include "curveot/json_codec.hpp"
#include "curveot/pipeline.hpp"
#include "curveot/service.hpp"

namespace {

using namespace curveot;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineFlags {
  std::string config_file;
  int experiment = 0;
  std::string scheme;
  std::string scheme_file;
  std::optional<double> p;
  std::string support;
  std::string variant;
  std::string penalties;
  bool external_half = false;
  bool align = true;
  bool invert_y = false;
  std::optional<double> truncate;
  std::optional<double> cost_order;
  std::string linkage;
  bool print_config = false;

  CLI::Option* external_half_opt = nullptr;
  CLI::Option* align_opt = nullptr;
  CLI::Option* invert_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "Pipeline config JSON file")->check(CLI::ExistingFile);
    app.add_option("--experiment", experiment, "Start from experiment preset 1..8")->check(CLI::Range(1, 8));
    app.add_option("--scheme", scheme, "Weight scheme: kind name or inline JSON");
    app.add_option("--scheme-file", scheme_file, "Weight scheme JSON file")->check(CLI::ExistingFile);
    app.add_option("--p", p, "Binomial parameter in (0,1)");
    app.add_option("--support", support, "Support window, e.g. height_fraction:0.1667 or explicit:2,9");
    app.add_option("--variant", variant, "balanced | relaxed | partial");
    app.add_option("--penalties", penalties, "Penalties JSON file (nu/mu, active_block or active_fraction)")
        ->check(CLI::ExistingFile);
    external_half_opt = app.add_flag("--external-half,!--no-external-half", external_half,
                                     "Keep the suffix from the lowest point");
    align_opt = app.add_flag("--align,!--no-align", align, "Align centroids (default on)");
    invert_opt = app.add_flag("--invert-y,!--no-invert-y", invert_y, "Mirror heights before processing");
    app.add_option("--truncate", truncate, "Cut each curve to this start height fraction");
    app.add_option("--cost-order", cost_order, "Ground cost exponent r >= 1");
    app.add_option("--linkage", linkage, "single | complete | average | ward");
    app.add_flag("--print-config", print_config, "Print the effective config JSON to stderr");
  }

  PipelineConfig build() const {
    if (!config_file.empty() && experiment != 0) throw UsageError("--config and --experiment are exclusive");
    if (!scheme.empty() && !scheme_file.empty()) throw UsageError("--scheme and --scheme-file are exclusive");
    PipelineConfig cfg;
    if (!config_file.empty()) cfg = io::load_config(config_file);
    if (experiment != 0) cfg = experiment_preset(experiment);
    if (!scheme.empty()) cfg.scheme = io::parse_scheme_text(scheme);
    if (!scheme_file.empty()) cfg.scheme = io::parse_scheme(io::read_file(scheme_file));
    if (p) cfg.scheme.p = *p;
    if (!support.empty()) cfg.scheme.support = io::parse_support_spec(support);
    if (!variant.empty()) cfg.variant = variant_from_string(variant);
    if (!penalties.empty()) {
      cfg.penalties = json::decode_penalty_source(json::parse(io::read_file(penalties), "penalties"));
    }
    if (external_half_opt->count()) cfg.external_half = external_half;
    if (align_opt->count()) cfg.align_centroids = align;
    if (invert_opt->count()) cfg.invert_y = invert_y;
    if (truncate) cfg.truncate = *truncate;
    if (cost_order) cfg.cost_order = *cost_order;
    if (!linkage.empty()) cfg.linkage = linkage_from_string(linkage);
    cfg.validate();
    if (print_config) std::cerr << io::format_config(cfg);
    return cfg;
  }
};

std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int cmd_distance(const std::string& a_path, const std::string& b_path, const PipelineFlags& flags,
                 const std::string& dump_plan, const std::string& dump_cost, const std::string& dump_reduced,
                 bool verify) {
  const auto cfg = flags.build();
  const auto a = io::load_curve_csv(a_path);
  const auto b = io::load_curve_csv(b_path);
  const auto r = run_pair(a, b, cfg);
  const auto& p = r.prepared;
  double d = r.distance;
  if (cfg.variant != Variant::Partial) d = std::max(0.0, d);
  std::cout << fixed6(d) << "\n";
  if (!dump_plan.empty()) io::write_file(dump_plan, io::format_plan_csv(r.plan.pi));
  if (!dump_cost.empty()) io::write_file(dump_cost, io::format_matrix_plain_csv(p.cost));
  if (!dump_reduced.empty()) {
    if (!p.penalties) throw UsageError("--dump-reduced needs penalties");
    io::write_file(dump_reduced, io::format_matrix_plain_csv(reduced_cost(p.cost, *p.penalties)));
  }
  if (verify) {
    const auto report = dual_feasibility_check(r.plan, r.plan.dual, p.cost, p.beta.weights, p.alpha.weights,
                                               cfg.variant, p.penalties ? &*p.penalties : nullptr);
    std::cout << json::encode(report).dump(2) << "\n";
    if (!report.ok()) {
      std::cerr << "error: duality verification failed\n";
      return kDomainError;
    }
  }
  return 0;
}

int cmd_matrix(const std::string& manifest, const PipelineFlags& flags, const std::string& out, unsigned jobs) {
  const auto cfg = flags.build();
  const auto curves = io::load_dataset(manifest);
  const auto d = pairwise_matrix(curves, cfg, jobs);
  if (out.empty()) {
    std::cout << io::format_matrix_csv(d);
  } else {
    io::save_matrix(d, out);
  }
  return 0;
}

int cmd_cluster(const std::string& matrix, const std::string& linkage, const std::string& out) {
  const auto d = io::load_matrix(matrix);
  const auto dg = hierarchical_cluster(d, linkage_from_string(linkage));
  const auto newick = to_newick(dg);
  if (!out.empty()) {
    io::write_file(out + ".json", io::format_dendrogram(dg));
    io::write_file(out + ".nwk", newick + "\n");
    io::write_file(out + ".svg", to_svg(dg));
  }
  std::cout << newick << "\n";
  return 0;
}

Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(std::string addr, const Service::Options& opt) {
  if (addr.empty()) {
    const char* env = std::getenv("CURVEOT_ADDR");
    addr = env && *env ? env : "127.0.0.1:8080";
  }
  const auto [host, port] = parse_address(addr);
  Service service(opt);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot listen on " << addr << "\n";
    return kDomainError;
  }
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on http://" << host << ":" << bound << "\n";
  service.serve();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-transport distances and hierarchical clustering for 2D curves"};
  app.require_subcommand(1);

  PipelineFlags dist_flags, matrix_flags;
  std::string a_path, b_path, dump_plan, dump_cost, dump_reduced;
  bool verify = false;
  auto* dist = app.add_subcommand("distance", "Distance between two curve CSV files");
  dist->add_option("a", a_path, "First curve CSV")->required()->check(CLI::ExistingFile);
  dist->add_option("b", b_path, "Second curve CSV")->required()->check(CLI::ExistingFile);
  dist_flags.attach(*dist);
  dist->add_option("--dump-plan", dump_plan, "Write the coupling as CSV");
  dist->add_option("--dump-cost", dump_cost, "Write the ground cost matrix as CSV");
  dist->add_option("--dump-reduced", dump_reduced, "Write the penalty-reduced cost matrix as CSV");
  dist->add_flag("--verify", verify, "Print a JSON duality report; exit 1 if it fails");

  std::string manifest, matrix_out;
  unsigned jobs = 0;
  auto* mat = app.add_subcommand("matrix", "Pairwise distance matrix for a dataset manifest");
  mat->add_option("manifest", manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
  matrix_flags.attach(*mat);
  mat->add_option("--out", matrix_out, "Output CSV (stdout if omitted)");
  mat->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string matrix_in, linkage = "average", cluster_out;
  auto* clu = app.add_subcommand("cluster", "Dendrogram from a distance matrix CSV");
  clu->add_option("matrix", matrix_in, "Distance matrix CSV")->required()->check(CLI::ExistingFile);
  clu->add_option("--linkage", linkage, "single | complete | average | ward");
  clu->add_option("--out", cluster_out, "Output prefix for .json, .nwk and .svg");

  std::string addr;
  Service::Options sopt;
  std::string static_dir;
  auto* srv = app.add_subcommand("serve", "Run the HTTP service");
  srv->add_option("--addr", addr, "host:port (default $CURVEOT_ADDR or 127.0.0.1:8080)");
  srv->add_option("--data-dir", sopt.data_dir, "Directory for datasets and results");
  srv->add_option("--static-dir", static_dir, "Serve static files (UI bundle) from here");
  srv->add_option("--workers", sopt.workers, "Concurrent matrix jobs");
  srv->add_option("--jobs", sopt.pair_jobs, "Threads per matrix job");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (dist->parsed()) return cmd_distance(a_path, b_path, dist_flags, dump_plan, dump_cost, dump_reduced, verify);
    if (mat->parsed()) return cmd_matrix(manifest, matrix_flags, matrix_out, jobs);
    if (clu->parsed()) return cmd_cluster(matrix_in, linkage, cluster_out);
    if (srv->parsed()) {
      if (!static_dir.empty()) sopt.static_dir = static_dir;
      return cmd_serve(addr, sopt);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: [" << to_string(e.code()) << "] " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}
