#pragma once

// Experiment layer: theta-quadrature of the averaging identities for
// finite products, the Monte Carlo / exact sweep over the premultiplied
// cocycle family, and report assembly (JSON + CSV).

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ucd/cocycle.hpp"
#include "ucd/moebius.hpp"

namespace ucd {

struct QuadratureSettings {
  int n_start = 64;     // power of two, uniform-rule start
  int n_max = 65536;    // power of two, uniform-rule cap
  double tol = 1e-8;    // convergence target for both integrands
};

struct ThetaRow {
  double theta;
  double value;
  std::optional<double> std_error;  // only for Monte Carlo rows
};

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;  // per-step normalized where applicable
  double gap = 0.0;
  double raw_sum = 0.0;  // un-normalized sum of N_d over factors
  std::string method;    // "exact_quadrature" or "monte_carlo"
  int grid = 0;          // uniform nodes, or total evaluations for the
                         // segmented boundary quadrature
  bool converged = true;
  double std_error = 0.0;  // aggregated, Monte Carlo only
  std::vector<ThetaRow> per_theta;
};

struct ProductIdentityReports {
  IdentityReport nd;       // integrand N_d(product at theta)
  IdentityReport log_rho;  // integrand ln rho(Lambda^d product at theta)
};

// Both finite-product identities for one family; rhs = sum_j N_d(T_j).
// The smooth N_d integrand uses the doubling uniform rule from n_start;
// the boundary spectral-radius integrand has square-root kinks where
// eigenvalues collide on the unit circle, so its kinks are located by
// bisection and each smooth segment gets tanh-sinh quadrature. Failure
// to meet tol is non-fatal and reported via converged=false.
ProductIdentityReports product_identity(const ProductFamily& fam,
                                        const QuadratureSettings& q = {},
                                        int threads = 1);

// Same contract with R_theta premultiplication for HSp(2d) factors.
ProductIdentityReports hsp_product_identity(const std::vector<Matrix>& factors,
                                            int d,
                                            const QuadratureSettings& q = {},
                                            int threads = 1);

// Averages the top-d Lyapunov sum of the premultiplied cocycle over
// theta and compares with the dynamics-weighted mean of N_d. Periodic
// dynamics are evaluated exactly through the boundary quadrature of the
// period map (per-step normalization), with per-theta rows reported on
// the requested grid; otherwise lyapunov_topd runs per grid node with a
// derived rng substream.
IdentityReport hab_sweep(const CocycleSpec& spec, int theta_grid, long steps,
                         long burn_in, RngStream rng, int threads = 1,
                         int torus_quad_points = 256);

nlohmann::json report_to_json(const IdentityReport& rep);
std::string per_theta_csv(const IdentityReport& rep);

}  // namespace ucd
