#include "ucd/hab.hpp"

#include <cmath>
#include <sstream>

#include "ucd/parallel.hpp"

namespace ucd {

namespace {

struct NodeValues {
  double nd;
  double log_rho;
};

// One pass over an N-node uniform grid, both integrands at once.
// Reduction happens in index order for bit reproducibility.
std::vector<NodeValues> eval_grid(
    const std::function<Matrix(double)>& product_at, int d, int n,
    int threads) {
  std::vector<NodeValues> vals(static_cast<size_t>(n));
  parallel_index(n, threads, [&](int k) {
    const Matrix p = product_at(static_cast<double>(k) / n);
    vals[static_cast<size_t>(k)] = {
        n_r(p, d), std::log(spectral_radius_wedge(p, d))};
  });
  return vals;
}

// Number of eigenvalue moduli clearly outside the unit circle.
// Eigenvalues of a form-preserving product leave or enter the circle only
// by colliding on it, which is exactly where the square-root kinks of the
// boundary integrand sit, so this count is locally constant between kinks.
int off_circle_count(const Matrix& p) {
  int count = 0;
  for (const Complex ev : eigenvalues(p)) {
    if (std::abs(ev) > 1.0 + 1e-7) ++count;
  }
  return count;
}

struct BoundaryIntegral {
  double value = 0.0;
  bool converged = true;
  long evals = 0;
};

// Integral over one period of a smooth-between-kinks integrand with
// square-root endpoint behavior: tanh-sinh nodes on [a, b], doubling the
// node density until two successive levels agree to seg_tol.
double de_segment(const std::function<double(double)>& f, double a, double b,
                  double seg_tol, bool& converged, long& evals) {
  const double mid = (a + b) / 2.0, half = (b - a) / 2.0;
  const double t_max = 3.5;
  double prev = 0.0, val = 0.0;
  for (int level = 0;; ++level) {
    const double h = 1.0 / static_cast<double>(1 << level);
    const long m = std::lround(t_max / h);
    double s = 0.0;
    for (long k = -m; k <= m; ++k) {
      const double t = static_cast<double>(k) * h;
      const double u = M_PI_2 * std::sinh(t);
      const double c = std::cosh(u);
      const double w = M_PI_2 * std::cosh(t) / (c * c);
      s += w * f(mid + half * std::tanh(u));
    }
    evals += 2 * m + 1;
    val = s * h * half;
    if (level >= 3 && std::abs(val - prev) < seg_tol) break;
    if (level == 8) {
      converged = false;
      break;
    }
    prev = val;
  }
  return val;
}

// Segment integration with failure recovery. When tanh-sinh quadrature
// does not settle, the segment hides structure the coarse scan missed: a
// narrow window where the off-circle eigenvalue count changes, or a
// sharp-but-smooth feature from an avoided eigenvalue crossing. A fine
// interior scan finds the spot (count transition, else the largest
// second difference); the segment is cut there so the feature sits at an
// endpoint, where the node distribution clusters.
void integrate_segment_adaptive(const std::function<double(double)>& f,
                                const std::function<int(double)>& count_at,
                                double a, double b, double seg_tol, int depth,
                                BoundaryIntegral& out) {
  bool conv = true;
  const double val = de_segment(f, a, b, seg_tol, conv, out.evals);
  if (conv || depth <= 0) {
    out.value += val;
    out.converged = out.converged && conv;
    return;
  }

  const int n = 256;
  const double h = (b - a) / n;
  std::vector<int> counts(static_cast<size_t>(n - 1));
  std::vector<double> fv(static_cast<size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    const double t = a + i * h;
    counts[static_cast<size_t>(i - 1)] = count_at(t);
    fv[static_cast<size_t>(i - 1)] = f(t);
  }
  out.evals += 2 * (n - 1);

  std::vector<double> cuts;
  for (int i = 0; i + 1 < n - 1; ++i) {
    const int c0 = counts[static_cast<size_t>(i)];
    if (c0 == counts[static_cast<size_t>(i + 1)]) continue;
    double lo = a + (i + 1) * h, hi = a + (i + 2) * h;
    while (hi - lo > 4e-16 * (1.0 + std::abs(lo))) {
      const double m = (lo + hi) / 2.0;
      ++out.evals;
      (count_at(m) == c0 ? lo : hi) = m;
    }
    cuts.push_back(hi);
  }
  if (cuts.empty()) {
    int sharpest = 1;
    double worst = -1.0;
    for (int i = 1; i + 1 < n - 1; ++i) {
      const double d2 = std::abs(fv[static_cast<size_t>(i - 1)] -
                                 2.0 * fv[static_cast<size_t>(i)] +
                                 fv[static_cast<size_t>(i + 1)]);
      if (d2 > worst) {
        worst = d2;
        sharpest = i + 1;
      }
    }
    cuts.push_back(a + sharpest * h);
  }

  double lo = a;
  for (const double c : cuts) {
    integrate_segment_adaptive(f, count_at, lo, c, seg_tol, depth - 1, out);
    lo = c;
  }
  integrate_segment_adaptive(f, count_at, lo, b, seg_tol, depth - 1, out);
}

// Integral over theta in [0,1) of ln rho(Lambda^d P(theta)). Kink
// locations are found by bisecting the off-circle eigenvalue count on a
// uniform scan grid; each smooth segment then gets tanh-sinh quadrature.
// A kink-free integrand is periodic-smooth, where the doubling uniform
// rule converges spectrally.
BoundaryIntegral integrate_log_rho(
    const std::function<Matrix(double)>& product_at, int d, double tol,
    int threads, int n_max) {
  auto wrap = [](double t) { return t - std::floor(t); };
  auto f = [&](double t) {
    return std::log(spectral_radius_wedge(product_at(wrap(t)), d));
  };
  auto count_at = [&](double t) {
    return off_circle_count(product_at(wrap(t)));
  };

  BoundaryIntegral out;
  const int n_scan = 2048;
  std::vector<int> counts(static_cast<size_t>(n_scan));
  parallel_index(n_scan, threads, [&](int k) {
    counts[static_cast<size_t>(k)] = count_at(k / static_cast<double>(n_scan));
  });
  out.evals += n_scan;

  std::vector<double> breaks;
  for (int k = 0; k < n_scan; ++k) {
    const int c0 = counts[static_cast<size_t>(k)];
    if (c0 == counts[static_cast<size_t>((k + 1) % n_scan)]) continue;
    double lo = k / static_cast<double>(n_scan);
    double hi = (k + 1) / static_cast<double>(n_scan);
    while (hi - lo > 4e-16 * (1.0 + std::abs(lo))) {
      const double m = (lo + hi) / 2.0;
      ++out.evals;
      (count_at(m) == c0 ? lo : hi) = m;
    }
    breaks.push_back(hi);
  }

  if (breaks.empty()) {
    int n = 64;
    std::vector<double> vals(static_cast<size_t>(n));
    auto mean = [&] {
      double s = 0.0;
      for (double v : vals) s += v;
      return s / static_cast<double>(vals.size());
    };
    parallel_index(n, threads, [&](int k) {
      vals[static_cast<size_t>(k)] = f(k / static_cast<double>(n));
    });
    out.evals += n;
    double integral = mean();
    int hits = 0;
    while (n < n_max) {
      n *= 2;
      vals.assign(static_cast<size_t>(n), 0.0);
      parallel_index(n, threads, [&](int k) {
        vals[static_cast<size_t>(k)] = f(k / static_cast<double>(n));
      });
      out.evals += n;
      const double next = mean();
      hits = std::abs(next - integral) < tol ? hits + 1 : 0;
      integral = next;
      if (hits >= 2) break;
    }
    if (hits >= 2) {
      out.value = integral;
      return out;
    }
    // No kinks detected, yet the uniform rule stalled: hand the whole
    // period to the adaptive segment machinery.
    out.value = 0.0;
    integrate_segment_adaptive(f, count_at, 0.0, 1.0, std::max(tol, 1e-9), 4,
                               out);
    return out;
  }

  // Eigenvalues near a collision carry O(1e-9) solver noise, so segment
  // tolerances below that are unattainable.
  const double seg_tol =
      std::max(tol / static_cast<double>(breaks.size() + 1), 1e-9);
  for (size_t i = 0; i < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b =
        (i + 1 < breaks.size()) ? breaks[i + 1] : breaks.front() + 1.0;
    integrate_segment_adaptive(f, count_at, a, b, seg_tol, 4, out);
  }
  return out;
}

ProductIdentityReports run_product_identity(
    const std::function<Matrix(double)>& product_at, double rhs, int d,
    const QuadratureSettings& q, int threads) {
  if (q.n_start < 8 || (q.n_start & (q.n_start - 1)) != 0 ||
      (q.n_max & (q.n_max - 1)) != 0 || q.n_start > q.n_max) {
    throw std::invalid_argument(
        "product_identity: grid sizes must be powers of two, n_start <= n_max");
  }

  // The N_d integrand (singular values) is smooth in theta, so the
  // doubling uniform rule converges spectrally; two consecutive
  // sub-tolerance doublings guard against coincidental agreement.
  int n = q.n_start;
  std::vector<NodeValues> vals = eval_grid(product_at, d, n, threads);
  auto nd_mean = [&] {
    double s = 0.0;
    for (const auto& x : vals) s += x.nd;
    return s / static_cast<double>(vals.size());
  };
  double nd_integral = nd_mean();
  int hits_nd = 0;
  while (n < q.n_max) {
    n *= 2;
    vals = eval_grid(product_at, d, n, threads);
    const double next = nd_mean();
    hits_nd = std::abs(next - nd_integral) < q.tol ? hits_nd + 1 : 0;
    nd_integral = next;
    if (hits_nd >= 2) break;
  }

  const BoundaryIntegral rho =
      integrate_log_rho(product_at, d, q.tol, threads, q.n_max);

  auto make = [&](double lhs, bool take_nd, bool converged, int grid) {
    IdentityReport rep;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.raw_sum = rhs;
    rep.gap = std::abs(lhs - rhs);
    rep.method = "exact_quadrature";
    rep.grid = grid;
    rep.converged = converged;
    rep.per_theta.reserve(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) {
      rep.per_theta.push_back(
          {static_cast<double>(k) / n,
           take_nd ? vals[k].nd : vals[k].log_rho, std::nullopt});
    }
    return rep;
  };
  return {make(nd_integral, true, hits_nd >= 2, n),
          make(rho.value, false, rho.converged,
               static_cast<int>(rho.evals))};
}

}  // namespace

ProductIdentityReports product_identity(const ProductFamily& fam,
                                        const QuadratureSettings& q,
                                        int threads) {
  const Signature sig = fam.sig();
  double rhs = 0.0;
  for (const auto& f : fam.factors) rhs += n_r(f.mat(), sig.d);
  auto product_at = [&fam](double theta) {
    return product_eval(fam, std::polar(1.0, 2.0 * M_PI * theta));
  };
  return run_product_identity(product_at, rhs, sig.d, q, threads);
}

ProductIdentityReports hsp_product_identity(const std::vector<Matrix>& factors,
                                            int d, const QuadratureSettings& q,
                                            int threads) {
  if (factors.empty()) {
    throw std::invalid_argument("hsp_product_identity: empty family");
  }
  for (const Matrix& m : factors) {
    if (hsp_defect(m, d) > cert_threshold(m)) {
      throw NumericalError("hsp_product_identity: factor fails certification");
    }
  }
  double rhs = 0.0;
  for (const Matrix& m : factors) rhs += n_r(m, d);
  auto product_at = [&factors, d](double theta) {
    const Matrix r = r_theta(d, theta);
    Matrix acc = r * factors.front();
    for (size_t j = 1; j < factors.size(); ++j) acc = acc * r * factors[j];
    return acc;
  };
  return run_product_identity(product_at, rhs, d, q, threads);
}

IdentityReport hab_sweep(const CocycleSpec& spec, int theta_grid, long steps,
                         long burn_in, RngStream rng, int threads,
                         int torus_quad_points) {
  if (theta_grid < 8) {
    throw std::invalid_argument("hab_sweep: theta_grid must be >= 8");
  }
  const int d = spec.sig.d;
  const bool hsp = spec.kind == GroupKind::HermitianSymplectic;
  const bool periodic = std::holds_alternative<PeriodicDynamics>(spec.dynamics);

  IdentityReport rep;
  rep.method = periodic ? "exact_quadrature" : "monte_carlo";
  rep.grid = theta_grid;
  rep.per_theta.resize(static_cast<size_t>(theta_grid));

  // Per-theta rows are reported on the requested grid; for periodic
  // dynamics the integral itself uses the kink-aware boundary quadrature
  // on the premultiplied period map, matching product_identity up to the
  // per-step normalization.
  if (periodic) {
    const auto& per = std::get<PeriodicDynamics>(spec.dynamics);
    const double period = static_cast<double>(per.indices.size());
    auto product_at = [&](double theta) {
      const Matrix pre =
          hsp ? r_theta(d, theta)
              : b_z(spec.sig, std::polar(1.0, 2 * M_PI * theta));
      Matrix acc = Matrix::Identity(spec.dim(), spec.dim());
      for (int sym : per.indices) {
        acc = (pre * spec.table.at(static_cast<size_t>(sym))) * acc;
      }
      return acc;
    };
    const BoundaryIntegral rho =
        integrate_log_rho(product_at, d, 1e-8, threads, 65536);
    rep.lhs = rho.value / period;
    rep.converged = rho.converged;
  }

  parallel_index(theta_grid, threads, [&](int k) {
    const double theta = static_cast<double>(k) / theta_grid;
    const Matrix pre =
        hsp ? r_theta(d, theta) : b_z(spec.sig, std::polar(1.0, 2 * M_PI * theta));
    ThetaRow& row = rep.per_theta[static_cast<size_t>(k)];
    row.theta = theta;
    if (periodic) {
      const auto& per = std::get<PeriodicDynamics>(spec.dynamics);
      std::vector<Matrix> orbit;
      orbit.reserve(per.indices.size());
      for (int sym : per.indices) {
        orbit.push_back(pre * spec.table.at(static_cast<size_t>(sym)));
      }
      row.value = exact_periodic_lyapunov(orbit, d);
    } else {
      CocycleSpec node = spec;
      node.premultiplier = pre;
      const LyapunovEstimate est =
          lyapunov_topd(node, d, steps, burn_in,
                        rng.split(static_cast<std::uint64_t>(k)));
      row.value = est.value;
      row.std_error = est.std_error;
    }
  });

  if (!periodic) {
    double lhs = 0.0, var = 0.0;
    for (const auto& row : rep.per_theta) {
      lhs += row.value;
      if (row.std_error) var += (*row.std_error) * (*row.std_error);
    }
    rep.lhs = lhs / theta_grid;
    rep.std_error = std::sqrt(var) / theta_grid;
  }

  // mu-average of N_d over the base dynamics, per step.
  double raw = 0.0;
  if (periodic) {
    const auto& per = std::get<PeriodicDynamics>(spec.dynamics);
    for (int sym : per.indices) {
      raw += n_r(spec.table.at(static_cast<size_t>(sym)), d);
    }
    rep.raw_sum = raw;
    rep.rhs = raw / static_cast<double>(per.indices.size());
  } else if (const auto* iid = std::get_if<IidDynamics>(&spec.dynamics)) {
    for (size_t k = 0; k < iid->weights.size(); ++k) {
      raw += iid->weights[k] * n_r(spec.table[k], d);
    }
    rep.raw_sum = raw;
    rep.rhs = raw;
  } else {
    // Torus rotation: uniform x-quadrature of N_d(A(x)).
    for (int k = 0; k < torus_quad_points; ++k) {
      raw += n_r(spec.generator_fn(static_cast<double>(k) / torus_quad_points),
                 d);
    }
    rep.raw_sum = raw;
    rep.rhs = raw / torus_quad_points;
  }
  rep.gap = std::abs(rep.lhs - rep.rhs);
  return rep;
}

nlohmann::json report_to_json(const IdentityReport& rep) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& row : rep.per_theta) {
    nlohmann::json r{{"theta", row.theta}, {"value", row.value}};
    if (row.std_error) r["std_error"] = *row.std_error;
    per.push_back(std::move(r));
  }
  return nlohmann::json{{"lhs", rep.lhs},
                        {"rhs", rep.rhs},
                        {"gap", rep.gap},
                        {"raw_sum", rep.raw_sum},
                        {"method", rep.method},
                        {"grid", rep.grid},
                        {"converged", rep.converged},
                        {"std_error", rep.std_error},
                        {"per_theta", std::move(per)}};
}

std::string per_theta_csv(const IdentityReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "theta,value,std_error\n";
  for (const auto& row : rep.per_theta) {
    out << row.theta << ',' << row.value << ',';
    if (row.std_error) out << *row.std_error;
    out << '\n';
  }
  return out.str();
}

}  // namespace ucd
