// Command-line front door: reads matrices and run configuration, drives
// the library experiments, and emits JSON/CSV reports.
//
// Exit codes: 0 all configured tolerance gates pass; 1 a gate fails;
// 2 invalid input (parse error, certification failure, bad arguments).
// Outputs are written even when a gate fails.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ucd/cocycle.hpp"
#include "ucd/group.hpp"
#include "ucd/hab.hpp"
#include "ucd/matrix_io.hpp"
#include "ucd/moebius.hpp"
#include "ucd/numkernel.hpp"
#include "ucd/rng.hpp"

namespace {

using nlohmann::json;
using namespace ucd;

constexpr int kExitPass = 0;
constexpr int kExitGateFailed = 1;
constexpr int kExitInvalidInput = 2;

struct CommonOpts {
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::string out;
  std::string format = "json";
  int threads = 1;
  bool dry_run = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--seed", c.seed, "RNG seed (fixed default, never entropy)")
      ->capture_default_str();
  sub->add_option("--tol", c.tol, "Tolerance gate for the exit code")
      ->capture_default_str();
  sub->add_option("--out", c.out,
                  "Output file base; stdout only when omitted");
  sub->add_option("--format", c.format, "json, csv, or both")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker cap; results are identical for any value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--dry-run", c.dry_run,
                "Print the resolved configuration and exit 0");
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return matrix_from_json(json::parse(in));
}

std::vector<Matrix> read_matrices(const std::vector<std::string>& paths) {
  std::vector<Matrix> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(read_matrix(p));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
}

// Emits the JSON body (and optional CSV blocks) per --format. JSON always
// goes to stdout; files are written only when --out is set.
void emit(const CommonOpts& c, const json& body,
          const std::vector<std::pair<std::string, std::string>>& csv = {}) {
  const std::string text = body.dump(2) + "\n";
  std::cout << text;
  if (!c.out.empty() && (c.format == "json" || c.format == "both")) {
    write_text(c.out + ".json", text);
  }
  if (c.format == "csv" || c.format == "both") {
    for (const auto& [suffix, data] : csv) {
      if (!c.out.empty()) {
        write_text(c.out + suffix + ".csv", data);
      } else {
        std::cout << data;
      }
    }
  }
}

// Every subcommand funnels through this: on --dry-run the resolved
// configuration is printed and the computation is skipped.
int run_or_dry(const CommonOpts& c, json config,
               const std::function<int()>& body) {
  config["seed"] = c.seed;
  config["tol"] = c.tol;
  config["out"] = c.out;
  config["format"] = c.format;
  config["threads"] = c.threads;
  if (c.dry_run) {
    std::cout << config.dump(2) << "\n";
    return kExitPass;
  }
  return body();
}

Signature to_sig(const std::vector<int>& sig) {
  if (sig.size() != 2 || sig[0] < 1 || sig[1] < 1) {
    throw std::runtime_error("--sig expects two positive integers c d");
  }
  return Signature{sig[0], sig[1]};
}

ProductFamily load_family(const std::vector<std::string>& paths,
                          const Signature& sig) {
  ProductFamily fam;
  for (const auto& m : read_matrices(paths)) {
    fam.factors.emplace_back(m, sig);
  }
  if (fam.factors.empty()) throw std::runtime_error("no factors given");
  return fam;
}

ProductFamily sampled_family(const Signature& sig, int count, double gamma_max,
                             std::uint64_t seed) {
  RngStream rng(seed);
  ProductFamily fam;
  for (int j = 0; j < count; ++j) {
    fam.factors.push_back(sample_pseudo_unitary(sig, gamma_max, rng));
  }
  return fam;
}

DynamicsSpec build_dynamics(const std::string& kind,
                            const std::vector<int>& indices,
                            const std::vector<double>& weights,
                            size_t table_size) {
  if (kind == "periodic") {
    std::vector<int> idx = indices;
    if (idx.empty()) {
      for (size_t k = 0; k < table_size; ++k) idx.push_back(static_cast<int>(k));
    }
    return PeriodicDynamics{idx};
  }
  if (kind == "iid") {
    std::vector<double> w = weights;
    if (w.empty()) w.assign(table_size, 1.0 / static_cast<double>(table_size));
    return IidDynamics{w};
  }
  throw std::runtime_error("unknown dynamics kind: " + kind);
}

json estimate_to_json(const LyapunovEstimate& est) {
  return json{{"d", est.d},
              {"value", est.value},
              {"std_error", est.std_error},
              {"steps", est.steps},
              {"batch_means", est.batch_means}};
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pseudo-unitary / hermitian-symplectic matrix groups, cocycles, and "
      "averaging identities for top-d Lyapunov sums"};
  app.require_subcommand(1);
  app.set_config("--config")->description(
      "Config file (INI/TOML key=value, [subcommand] sections); flags win");

  // check ------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Certify group membership");
  CommonOpts check_c;
  std::string check_file;
  std::vector<int> check_sig;
  int check_hsp_d = 0;
  check->add_option("matrix", check_file, "Matrix JSON file")->required();
  check->add_option("--sig", check_sig, "Signature c d for U(c,d)")
      ->expected(2);
  check->add_option("--hsp", check_hsp_d, "Check HSp(2d) for this d instead");
  add_common(check, check_c);

  // decompose ---------------------------------------------------------
  auto* decomp = app.add_subcommand("decompose",
                                    "Hyperbolic decomposition of a U(c,d) element");
  CommonOpts decomp_c;
  std::string decomp_file;
  std::vector<int> decomp_sig;
  decomp->add_option("matrix", decomp_file, "Matrix JSON file")->required();
  decomp->add_option("--sig", decomp_sig, "Signature c d")->expected(2)->required();
  add_common(decomp, decomp_c);

  // nfun ----------------------------------------------------------------
  auto* nfun = app.add_subcommand("nfun", "N_r(T) = sum_i<=r ln((s_i + 1/s_i)/2)");
  CommonOpts nfun_c;
  std::string nfun_file;
  int nfun_r = 1;
  nfun->add_option("matrix", nfun_file, "Matrix JSON file")->required();
  nfun->add_option("--r", nfun_r, "Number of leading singular values")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(nfun, nfun_c);

  // product-identity ----------------------------------------------------
  auto* pid = app.add_subcommand(
      "product-identity", "Theta-quadrature of both finite-product identities");
  CommonOpts pid_c;
  std::vector<std::string> pid_files;
  std::vector<int> pid_sig;
  int pid_sample = 0, pid_hsp_d = 0, pid_nstart = 64, pid_nmax = 65536;
  double pid_gamma = 1.0;
  pid->add_option("--factor", pid_files, "Factor matrix JSON files (in order)");
  pid->add_option("--sig", pid_sig, "Signature c d")->expected(2);
  pid->add_option("--hsp", pid_hsp_d, "Treat factors as HSp(2d) for this d");
  pid->add_option("--sample", pid_sample, "Sample this many factors instead");
  pid->add_option("--gamma-max", pid_gamma, "Sampler gamma bound")
      ->capture_default_str();
  pid->add_option("--n-start", pid_nstart, "Initial quadrature nodes")
      ->capture_default_str();
  pid->add_option("--n-max", pid_nmax, "Quadrature node cap")
      ->capture_default_str();
  add_common(pid, pid_c);

  // mean-value ----------------------------------------------------------
  auto* mv = app.add_subcommand("mean-value",
                                "Interior-circle mean of ln rho(Lambda^d D(z))");
  CommonOpts mv_c;
  mv_c.tol = 1e-8;
  std::vector<std::string> mv_files;
  std::vector<int> mv_sig;
  double mv_radius = 0.5;
  int mv_points = 256;
  mv->add_option("--factor", mv_files, "Factor matrix JSON files")->required();
  mv->add_option("--sig", mv_sig, "Signature c d")->expected(2)->required();
  mv->add_option("--radius", mv_radius, "Circle radius in (0,1)")
      ->capture_default_str();
  mv->add_option("--points", mv_points, "Quadrature nodes (power of two)")
      ->capture_default_str();
  add_common(mv, mv_c);

  // lyapunov --------------------------------------------------------------
  auto* lyap = app.add_subcommand("lyapunov",
                                  "Monte Carlo top-d Lyapunov sum of a cocycle");
  CommonOpts lyap_c;
  std::vector<std::string> lyap_files;
  std::vector<int> lyap_sig, lyap_indices;
  std::vector<double> lyap_weights;
  std::string lyap_dyn = "periodic";
  int lyap_hsp_d = 0, lyap_d = 0;
  long lyap_steps = 100000, lyap_burn = 1000;
  lyap->add_option("--table", lyap_files, "Generator matrix JSON files")->required();
  lyap->add_option("--sig", lyap_sig, "Signature c d")->expected(2);
  lyap->add_option("--hsp", lyap_hsp_d, "HSp(2d) generators for this d");
  lyap->add_option("--dynamics", lyap_dyn, "periodic or iid")
      ->check(CLI::IsMember({"periodic", "iid"}))
      ->capture_default_str();
  lyap->add_option("--indices", lyap_indices, "Periodic symbol sequence");
  lyap->add_option("--weights", lyap_weights, "Iid symbol probabilities");
  lyap->add_option("--d", lyap_d, "Exponent count (default: signature d)");
  lyap->add_option("--steps", lyap_steps, "Accumulation steps")
      ->capture_default_str();
  lyap->add_option("--burn-in", lyap_burn, "Burn-in steps")
      ->capture_default_str();
  add_common(lyap, lyap_c);

  // hab-sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "hab-sweep", "Average the premultiplied cocycle over a theta grid");
  CommonOpts sweep_c;
  sweep_c.tol = 1e-2;
  std::vector<std::string> sweep_files;
  std::vector<int> sweep_sig, sweep_indices;
  std::vector<double> sweep_weights;
  std::string sweep_dyn = "iid";
  int sweep_hsp_d = 0, sweep_grid = 64;
  long sweep_steps = 100000, sweep_burn = 1000;
  sweep->add_option("--table", sweep_files, "Generator matrix JSON files")->required();
  sweep->add_option("--sig", sweep_sig, "Signature c d")->expected(2);
  sweep->add_option("--hsp", sweep_hsp_d, "HSp(2d) generators for this d");
  sweep->add_option("--dynamics", sweep_dyn, "periodic or iid")
      ->check(CLI::IsMember({"periodic", "iid"}))
      ->capture_default_str();
  sweep->add_option("--indices", sweep_indices, "Periodic symbol sequence");
  sweep->add_option("--weights", sweep_weights, "Iid symbol probabilities");
  sweep->add_option("--grid", sweep_grid, "Theta grid size")
      ->capture_default_str();
  sweep->add_option("--steps", sweep_steps, "Accumulation steps per node")
      ->capture_default_str();
  sweep->add_option("--burn-in", sweep_burn, "Burn-in steps per node")
      ->capture_default_str();
  add_common(sweep, sweep_c);

  // schrodinger ---------------------------------------------------------------
  auto* schro = app.add_subcommand(
      "schrodinger", "Lyapunov sum of a strip transfer-matrix cocycle");
  CommonOpts schro_c;
  std::vector<std::string> schro_hop, schro_pot;
  std::vector<int> schro_indices;
  std::vector<double> schro_weights;
  std::string schro_dyn = "periodic";
  int schro_d = 1, schro_top = 0;
  double schro_e = 0.0;
  long schro_steps = 100000, schro_burn = 1000;
  schro->add_option("--d", schro_d, "Strip width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  schro->add_option("--energy", schro_e, "Spectral parameter E")->required();
  schro->add_option("--hopping", schro_hop, "Hopping matrix JSON files")->required();
  schro->add_option("--potential", schro_pot, "Potential matrix JSON files")->required();
  schro->add_option("--dynamics", schro_dyn, "periodic or iid")
      ->check(CLI::IsMember({"periodic", "iid"}))
      ->capture_default_str();
  schro->add_option("--indices", schro_indices, "Periodic symbol sequence");
  schro->add_option("--weights", schro_weights, "Iid symbol probabilities");
  schro->add_option("--top", schro_top, "Exponent count (default: strip width)");
  schro->add_option("--steps", schro_steps, "Accumulation steps")
      ->capture_default_str();
  schro->add_option("--burn-in", schro_burn, "Burn-in steps")
      ->capture_default_str();
  add_common(schro, schro_c);

  // sample -----------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Draw certified U(c,d) elements");
  CommonOpts sample_c;
  std::vector<int> sample_sig;
  int sample_count = 1;
  double sample_gamma = 1.0;
  sample->add_option("--sig", sample_sig, "Signature c d")->expected(2)->required();
  sample->add_option("--count", sample_count, "Number of draws")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample->add_option("--gamma-max", sample_gamma, "Gamma upper bound")
      ->capture_default_str();
  add_common(sample, sample_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (*check) {
      return run_or_dry(
          check_c,
          {{"command", "check"}, {"matrix", check_file},
           {"sig", check_sig}, {"hsp", check_hsp_d}},
          [&] {
            const Matrix m = read_matrix(check_file);
            double defect;
            if (check_hsp_d > 0) {
              defect = hsp_defect(m, check_hsp_d);
            } else {
              defect = membership_defect(m, to_sig(check_sig));
            }
            const double threshold = cert_threshold(m);
            const bool pass = defect <= threshold;
            emit(check_c, {{"defect", defect},
                           {"threshold", threshold},
                           {"pass", pass}});
            return pass ? kExitPass : kExitGateFailed;
          });
    }

    if (*decomp) {
      return run_or_dry(
          decomp_c,
          {{"command", "decompose"}, {"matrix", decomp_file}, {"sig", decomp_sig}},
          [&] {
            const Signature sig = to_sig(decomp_sig);
            PseudoUnitary t(read_matrix(decomp_file), sig);
            const auto dec = hyperbolic_decompose(t);
            emit(decomp_c, {{"u1", matrix_to_json(dec.u1)},
                            {"u2", matrix_to_json(dec.u2)},
                            {"v1", matrix_to_json(dec.v1)},
                            {"v2", matrix_to_json(dec.v2)},
                            {"gamma", vector_to_json(dec.gamma)},
                            {"n_d", n_r(t.mat(), sig.d)}});
            return kExitPass;
          });
    }

    if (*nfun) {
      return run_or_dry(
          nfun_c, {{"command", "nfun"}, {"matrix", nfun_file}, {"r", nfun_r}},
          [&] {
            const Matrix m = read_matrix(nfun_file);
            emit(nfun_c, {{"r", nfun_r}, {"value", n_r(m, nfun_r)}});
            return kExitPass;
          });
    }

    if (*pid) {
      return run_or_dry(
          pid_c,
          {{"command", "product-identity"}, {"factors", pid_files},
           {"sig", pid_sig}, {"hsp", pid_hsp_d}, {"sample", pid_sample},
           {"gamma_max", pid_gamma}, {"n_start", pid_nstart},
           {"n_max", pid_nmax}},
          [&] {
            QuadratureSettings q;
            q.n_start = pid_nstart;
            q.n_max = pid_nmax;
            q.tol = pid_c.tol;
            ProductIdentityReports reports;
            if (pid_hsp_d > 0) {
              reports = hsp_product_identity(read_matrices(pid_files),
                                             pid_hsp_d, q, pid_c.threads);
            } else {
              const Signature sig = to_sig(pid_sig);
              ProductFamily fam =
                  pid_sample > 0
                      ? sampled_family(sig, pid_sample, pid_gamma, pid_c.seed)
                      : load_family(pid_files, sig);
              reports = product_identity(fam, q, pid_c.threads);
            }
            emit(pid_c,
                 {{"nd", report_to_json(reports.nd)},
                  {"log_rho", report_to_json(reports.log_rho)}},
                 {{".nd", per_theta_csv(reports.nd)},
                  {".log_rho", per_theta_csv(reports.log_rho)}});
            return reports.nd.gap <= pid_c.tol &&
                           reports.log_rho.gap <= pid_c.tol
                       ? kExitPass
                       : kExitGateFailed;
          });
    }

    if (*mv) {
      return run_or_dry(
          mv_c,
          {{"command", "mean-value"}, {"factors", mv_files}, {"sig", mv_sig},
           {"radius", mv_radius}, {"points", mv_points}},
          [&] {
            const auto fam = load_family(mv_files, to_sig(mv_sig));
            const auto rep =
                mean_value_check(fam, mv_radius, mv_points, mv_c.threads);
            const bool pass = rep.gap <= mv_c.tol;
            emit(mv_c, {{"circle_mean", rep.circle_mean},
                        {"center_value", rep.center_value},
                        {"gap", rep.gap},
                        {"pass", pass}});
            return pass ? kExitPass : kExitGateFailed;
          });
    }

    auto make_cocycle = [&](const std::vector<std::string>& files,
                            const std::vector<int>& sig_arg, int hsp_d,
                            const std::string& dyn,
                            const std::vector<int>& indices,
                            const std::vector<double>& weights) {
      CocycleSpec spec;
      spec.table = read_matrices(files);
      if (hsp_d > 0) {
        spec.kind = GroupKind::HermitianSymplectic;
        spec.sig = Signature{hsp_d, hsp_d};
      } else {
        spec.kind = GroupKind::PseudoUnitaryGroup;
        spec.sig = to_sig(sig_arg);
      }
      spec.dynamics = build_dynamics(dyn, indices, weights, spec.table.size());
      return spec;
    };

    if (*lyap) {
      return run_or_dry(
          lyap_c,
          {{"command", "lyapunov"}, {"table", lyap_files}, {"sig", lyap_sig},
           {"hsp", lyap_hsp_d}, {"dynamics", lyap_dyn},
           {"indices", lyap_indices}, {"weights", lyap_weights},
           {"d", lyap_d}, {"steps", lyap_steps}, {"burn_in", lyap_burn}},
          [&] {
            const auto spec = make_cocycle(lyap_files, lyap_sig, lyap_hsp_d,
                                           lyap_dyn, lyap_indices, lyap_weights);
            const int d = lyap_d > 0 ? lyap_d : spec.sig.d;
            const auto est = lyapunov_topd(spec, d, lyap_steps, lyap_burn,
                                           RngStream(lyap_c.seed));
            emit(lyap_c, estimate_to_json(est));
            return kExitPass;
          });
    }

    if (*sweep) {
      return run_or_dry(
          sweep_c,
          {{"command", "hab-sweep"}, {"table", sweep_files}, {"sig", sweep_sig},
           {"hsp", sweep_hsp_d}, {"dynamics", sweep_dyn},
           {"indices", sweep_indices}, {"weights", sweep_weights},
           {"grid", sweep_grid}, {"steps", sweep_steps},
           {"burn_in", sweep_burn}},
          [&] {
            const auto spec =
                make_cocycle(sweep_files, sweep_sig, sweep_hsp_d, sweep_dyn,
                             sweep_indices, sweep_weights);
            const auto rep =
                hab_sweep(spec, sweep_grid, sweep_steps, sweep_burn,
                          RngStream(sweep_c.seed), sweep_c.threads);
            // 3-sigma gate for Monte Carlo runs; plain tolerance otherwise.
            const double gate = rep.method == "monte_carlo"
                                    ? std::max(sweep_c.tol, 3.0 * rep.std_error)
                                    : sweep_c.tol;
            const bool pass = rep.gap <= gate;
            json body = report_to_json(rep);
            body["pass"] = pass;
            body["gate"] = gate;
            emit(sweep_c, body, {{"", per_theta_csv(rep)}});
            return pass ? kExitPass : kExitGateFailed;
          });
    }

    if (*schro) {
      return run_or_dry(
          schro_c,
          {{"command", "schrodinger"}, {"d", schro_d}, {"energy", schro_e},
           {"hopping", schro_hop}, {"potential", schro_pot},
           {"dynamics", schro_dyn}, {"indices", schro_indices},
           {"weights", schro_weights}, {"top", schro_top},
           {"steps", schro_steps}, {"burn_in", schro_burn}},
          [&] {
            auto hopping = read_matrices(schro_hop);
            auto potential = read_matrices(schro_pot);
            const auto dyn = build_dynamics(schro_dyn, schro_indices,
                                            schro_weights, potential.size());
            const auto spec = schrodinger_cocycle(
                schro_d, std::move(hopping), std::move(potential), schro_e, dyn);
            const int d = schro_top > 0 ? schro_top : schro_d;
            const auto est = lyapunov_topd(spec, d, schro_steps, schro_burn,
                                           RngStream(schro_c.seed));
            json body = estimate_to_json(est);
            body["energy"] = schro_e;
            emit(schro_c, body);
            return kExitPass;
          });
    }

    if (*sample) {
      return run_or_dry(
          sample_c,
          {{"command", "sample"}, {"sig", sample_sig}, {"count", sample_count},
           {"gamma_max", sample_gamma}},
          [&] {
            const Signature sig = to_sig(sample_sig);
            RngStream rng(sample_c.seed);
            json draws = json::array();
            bool all_pass = true;
            for (int j = 0; j < sample_count; ++j) {
              const PseudoUnitary t = sample_pseudo_unitary(sig, sample_gamma, rng);
              const double defect = membership_defect(t.mat(), sig);
              all_pass = all_pass && defect <= cert_threshold(t.mat());
              draws.push_back({{"matrix", matrix_to_json(t.mat())},
                               {"defect", defect}});
            }
            emit(sample_c, {{"sig", {sig.c, sig.d}}, {"draws", draws}});
            return all_pass ? kExitPass : kExitGateFailed;
          });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
