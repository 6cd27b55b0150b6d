#pragma once

// Base dynamics (periodic orbits, i.i.d. draws, irrational torus
// rotations), cocycle assembly including strip Schroedinger transfer
// matrices, and top-d Lyapunov sum estimation by QR frame accumulation.

#include <functional>
#include <variant>
#include <vector>

#include "ucd/group.hpp"
#include "ucd/moebius.hpp"
#include "ucd/rng.hpp"

namespace ucd {

struct PeriodicDynamics {
  std::vector<int> indices;  // visited in order, then repeated
};

struct IidDynamics {
  std::vector<double> weights;  // probability vector over symbols
};

struct TorusRotation {
  double alpha = 0.6180339887498948482;  // (sqrt 5 - 1)/2 by default
  double x0 = 0.0;
};

using DynamicsSpec = std::variant<PeriodicDynamics, IidDynamics, TorusRotation>;

enum class GroupKind { PseudoUnitaryGroup, HermitianSymplectic };

// Dynamics plus generator map. For periodic/iid dynamics the generator is
// a finite table indexed by symbol; for torus rotations it is a function
// of the orbit point. Every generated matrix is certified against the
// group stated in `kind` at construction time. An optional premultiplier
// (u_theta or r_theta) turns this into the averaged family.
struct CocycleSpec {
  DynamicsSpec dynamics;
  Signature sig;  // (c,d); HSp(2d) generators carry (d,d)
  GroupKind kind = GroupKind::PseudoUnitaryGroup;
  std::vector<Matrix> table;
  std::function<Matrix(double)> generator_fn;
  Matrix premultiplier;  // 0x0 when absent

  int dim() const { return sig.size(); }
};

struct LyapunovEstimate {
  int d = 0;
  double value = 0.0;      // estimate of L^d (per step)
  double std_error = 0.0;  // from batch means
  long steps = 0;          // accumulation steps (after burn-in)
  std::vector<double> batch_means;
};

// Frame/QR accumulator for the sum of the top d Lyapunov exponents.
// The frame starts at the last d standard basis columns (the chart image
// of the domain center) and is re-orthonormalized every step. Requires
// steps >= 10 * burn_in. Deterministic given the rng stream.
LyapunovEstimate lyapunov_topd(const CocycleSpec& spec, int d, long steps,
                               long burn_in, RngStream rng);

// Exact per-step value for a period-n orbit:
// (1/n) ln rho(Lambda^d (T_n ... T_1)). No Monte Carlo error.
double exact_periodic_lyapunov(const std::vector<Matrix>& factors, int d);
double exact_periodic_lyapunov(const ProductFamily& fam, int d);

// Certified HSp(2d) cocycle of strip Schroedinger transfer matrices with
// finite hopping/potential tables (one entry per symbol).
CocycleSpec schrodinger_cocycle(int d, std::vector<Matrix> hopping,
                                std::vector<Matrix> potential, double e,
                                DynamicsSpec dynamics);

// Torus-rotation variant with x-dependent hopping and potential.
CocycleSpec schrodinger_cocycle(int d, std::function<Matrix(double)> hopping,
                                std::function<Matrix(double)> potential,
                                double e, TorusRotation dynamics);

}  // namespace ucd
