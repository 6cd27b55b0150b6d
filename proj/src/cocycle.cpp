#include "ucd/cocycle.hpp"

#include <cmath>
#include <numeric>

namespace ucd {

namespace {

void certify_table(const CocycleSpec& spec) {
  for (const Matrix& m : spec.table) {
    const double defect = spec.kind == GroupKind::HermitianSymplectic
                              ? hsp_defect(m, spec.sig.d)
                              : membership_defect(m, spec.sig);
    if (defect > cert_threshold(m)) {
      throw NumericalError("CocycleSpec: generator fails certification");
    }
  }
}

// Iterates the base dynamics and yields the generator matrix per step.
class OrbitDriver {
 public:
  OrbitDriver(const CocycleSpec& spec, RngStream rng)
      : spec_(spec), rng_(rng) {
    if (const auto* tor = std::get_if<TorusRotation>(&spec.dynamics)) {
      x_ = tor->x0;
    }
    if (const auto* per = std::get_if<PeriodicDynamics>(&spec.dynamics)) {
      if (per->indices.empty()) {
        throw std::invalid_argument("PeriodicDynamics: empty index list");
      }
    }
    if (const auto* iid = std::get_if<IidDynamics>(&spec.dynamics)) {
      const double total = std::accumulate(iid->weights.begin(),
                                           iid->weights.end(), 0.0);
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("IidDynamics: weights must sum to 1");
      }
    }
  }

  Matrix next() {
    Matrix a = generate();
    if (spec_.premultiplier.size() > 0) a = spec_.premultiplier * a;
    return a;
  }

 private:
  Matrix generate() {
    if (const auto* per = std::get_if<PeriodicDynamics>(&spec_.dynamics)) {
      const int sym = per->indices[static_cast<size_t>(
          step_++ % static_cast<long>(per->indices.size()))];
      return spec_.table.at(static_cast<size_t>(sym));
    }
    if (const auto* iid = std::get_if<IidDynamics>(&spec_.dynamics)) {
      const double u = rng_.uniform();
      double acc = 0.0;
      for (size_t k = 0; k < iid->weights.size(); ++k) {
        acc += iid->weights[k];
        if (u < acc) return spec_.table[k];
      }
      return spec_.table.back();
    }
    const auto& tor = std::get<TorusRotation>(spec_.dynamics);
    const double x = x_;
    x_ = std::fmod(x_ + tor.alpha, 1.0);
    return spec_.generator_fn(x);
  }

  const CocycleSpec& spec_;
  RngStream rng_;
  long step_ = 0;
  double x_ = 0.0;
};

}  // namespace

LyapunovEstimate lyapunov_topd(const CocycleSpec& spec, int d, long steps,
                               long burn_in, RngStream rng) {
  const int n = spec.dim();
  if (d < 1 || d > n) {
    throw std::invalid_argument("lyapunov_topd: wedge order out of range");
  }
  if (steps < 10 * burn_in || steps < 1) {
    throw std::invalid_argument("lyapunov_topd: requires steps >= 10*burn_in");
  }
  if (!spec.table.empty()) certify_table(spec);

  OrbitDriver orbit(spec, rng);
  // Last d identity columns: the chart image of the domain center.
  Matrix q = Matrix::Identity(n, n).rightCols(d);

  constexpr int kBatches = 50;
  const long per_batch = std::max<long>(steps / kBatches, 1);
  std::vector<double> batch_sums;
  batch_sums.reserve(kBatches);
  double total = 0.0, batch_acc = 0.0;
  long batch_steps = 0;

  for (long step = 0; step < burn_in + steps; ++step) {
    QrResult qr;
    try {
      qr = qr_positive(orbit.next() * q);
    } catch (const NumericalError&) {
      throw NumericalError("lyapunov_topd: frame rank collapse");
    }
    q = std::move(qr.q);
    if (step < burn_in) continue;
    double inc = 0.0;
    for (int i = 0; i < d; ++i) inc += std::log(qr.r(i, i).real());
    total += inc;
    batch_acc += inc;
    if (++batch_steps == per_batch &&
        batch_sums.size() + 1 < static_cast<size_t>(kBatches)) {
      batch_sums.push_back(batch_acc / per_batch);
      batch_acc = 0.0;
      batch_steps = 0;
    }
  }
  if (batch_steps > 0) batch_sums.push_back(batch_acc / batch_steps);

  LyapunovEstimate est;
  est.d = d;
  est.steps = steps;
  est.value = total / static_cast<double>(steps);
  est.batch_means = batch_sums;
  if (batch_sums.size() > 1) {
    const double k = static_cast<double>(batch_sums.size());
    double mean = 0.0;
    for (double b : batch_sums) mean += b;
    mean /= k;
    double var = 0.0;
    for (double b : batch_sums) var += (b - mean) * (b - mean);
    var /= (k - 1.0);
    est.std_error = std::sqrt(var / k);
  }
  return est;
}

double exact_periodic_lyapunov(const std::vector<Matrix>& factors, int d) {
  if (factors.empty()) {
    throw std::invalid_argument("exact_periodic_lyapunov: empty family");
  }
  Matrix period_map = factors.front();
  for (size_t j = 1; j < factors.size(); ++j) {
    period_map = factors[j] * period_map;  // A_n = T_n ... T_1
  }
  return std::log(spectral_radius_wedge(period_map, d)) /
         static_cast<double>(factors.size());
}

double exact_periodic_lyapunov(const ProductFamily& fam, int d) {
  std::vector<Matrix> raw;
  raw.reserve(fam.factors.size());
  for (const auto& f : fam.factors) raw.push_back(f.mat());
  return exact_periodic_lyapunov(raw, d);
}

CocycleSpec schrodinger_cocycle(int d, std::vector<Matrix> hopping,
                                std::vector<Matrix> potential, double e,
                                DynamicsSpec dynamics) {
  if (hopping.size() != potential.size() || hopping.empty()) {
    throw std::invalid_argument("schrodinger_cocycle: table size mismatch");
  }
  CocycleSpec spec;
  spec.dynamics = std::move(dynamics);
  spec.sig = Signature{d, d};
  spec.kind = GroupKind::HermitianSymplectic;
  spec.table.reserve(hopping.size());
  for (size_t k = 0; k < hopping.size(); ++k) {
    spec.table.push_back(schrodinger_transfer(hopping[k], potential[k], e));
  }
  certify_table(spec);
  return spec;
}

CocycleSpec schrodinger_cocycle(int d, std::function<Matrix(double)> hopping,
                                std::function<Matrix(double)> potential,
                                double e, TorusRotation dynamics) {
  CocycleSpec spec;
  spec.dynamics = dynamics;
  spec.sig = Signature{d, d};
  spec.kind = GroupKind::HermitianSymplectic;
  spec.generator_fn = [d, e, hop = std::move(hopping),
                       pot = std::move(potential)](double x) {
    Matrix t = hop(x);
    const Matrix out = schrodinger_transfer(t, pot(x), e);
    if (hsp_defect(out, d) > cert_threshold(out)) {
      throw NumericalError("schrodinger_cocycle: transfer fails certification");
    }
    return out;
  };
  return spec;
}

}  // namespace ucd
