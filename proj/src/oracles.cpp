// Copyright 2026 The coordbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coordbeam/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace coordbeam::oracle {

long double golden_section(const std::function<long double(long double)>& f, long double lo,
                           long double hi, int iterations) {
  const long double inv_phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo;
  long double b = hi;
  long double x1 = b - inv_phi * (b - a);
  long double x2 = a + inv_phi * (b - a);
  long double f1 = f(x1);
  long double f2 = f(x2);
  for (int i = 0; i < iterations && b - a > 0.0L; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return (a + b) / 2.0L;
}

TauEtaOracle tau_eta(double c, double f, double r) {
  const long double cl = c;
  const long double fl = f;
  const long double rl = r;
  const long double f4 = fl * fl * fl * fl;
  const long double r4 = rl * rl * rl * rl;
  auto eta_cost = [&](long double u) {
    const long double eta = std::exp(u);
    return f4 / (2.0L * eta) + eta / 2.0L * r4;
  };
  const long double eta = std::exp(golden_section(eta_cost, -80.0L, 80.0L));
  const long double g = f4 / (2.0L * eta) + eta / 2.0L * r4;
  const long double c4 = cl * cl * cl * cl;
  auto tau_cost = [&](long double u) {
    const long double tau = std::exp(u);
    return tau / (2.0L * c4) + g / (2.0L * tau);
  };
  const long double tau = std::exp(golden_section(tau_cost, -80.0L, 80.0L));
  return {static_cast<double>(tau), static_cast<double>(eta)};
}

// Minimizes K log(mean(beta nu)), which has the same minimizer as the
// K-th power of the mean.
RVector nu_projected_descent(const RVector& beta, int iterations) {
  const int k = static_cast<int>(beta.size());
  RVector u = RVector::Zero(k);
  const double step = 0.5;
  for (int it = 0; it < iterations; ++it) {
    RVector w = (beta.array() * u.array().exp()).matrix();
    w /= w.sum();
    RVector grad = static_cast<double>(k) * w;
    grad.array() -= grad.mean();
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15) break;
    u -= step * grad;
  }
  u.array() -= u.mean();
  return u.array().exp().matrix();
}

RVector nu_grid_k2(const RVector& beta) {
  auto cost = [&](double u) {
    const double m = (beta(0) * std::exp(u) + beta(1) * std::exp(-u)) / 2.0;
    return m * m;
  };
  double lo = -30.0;
  double hi = 30.0;
  const int points = 2001;
  double best = 0.0;
  for (int level = 0; level < 12; ++level) {
    const double h = (hi - lo) / (points - 1);
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      const double u = lo + h * i;
      const double v = cost(u);
      if (v < best_cost) {
        best_cost = v;
        best = u;
      }
    }
    lo = best - 2.0 * h;
    hi = best + 2.0 * h;
  }
  RVector nu(2);
  nu << std::exp(best), std::exp(-best);
  return nu;
}

RVector sinr_scalar_loop(const SystemConfig& config, const ChannelSet& channels,
                         const PrecoderSet& precoders) {
  const int k_users = config.num_users;
  const int n_ant = config.num_antennas();
  RVector out(k_users);
  for (int k = 0; k < k_users; ++k) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < k_users; ++i) {
      double re = 0.0;
      double im = 0.0;
      for (int n = 0; n < n_ant; ++n) {
        const Complex h = channels.h[static_cast<size_t>(k)](n);
        const Complex b = precoders.b[static_cast<size_t>(i)](n);
        // conj(h) * b
        re += h.real() * b.real() + h.imag() * b.imag();
        im += h.real() * b.imag() - h.imag() * b.real();
      }
      const double g = re * re + im * im;
      if (i == k) {
        signal = g;
      } else {
        interference += g;
      }
    }
    out(k) = signal / (interference + config.noise_var(k));
  }
  return out;
}

RVector antenna_power_outer_product(const PrecoderSet& precoders) {
  const int n_ant = precoders.num_antennas();
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n_ant, n_ant);
  for (const auto& b : precoders.b) cov += b * b.adjoint();
  return cov.diagonal().real();
}

double subproblem_objective_direct(const SubproblemSpec& spec, const PrecoderSet& precoders,
                                   const RVector& t) {
  const int k_users = spec.config.num_users;
  double total = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const CVector& h = spec.channels.h[static_cast<size_t>(k)];
    double r = spec.config.noise_var(k);
    for (int i = 0; i < k_users; ++i) {
      if (i != k) r += std::norm(h.dot(precoders.b[static_cast<size_t>(i)]));
    }
    const double c2 = std::norm(h.dot(precoders.b[static_cast<size_t>(k)]));
    const double f = t(k) * t(k);
    const double x = (t(k) - 1.0) * (t(k) - 1.0);
    const double g = std::pow(f, 4) / (2.0 * spec.eta(k)) + spec.eta(k) / 2.0 * std::pow(r, 4);
    total += spec.nu(k) * (spec.tau(k) / (2.0 * c2 * c2) + g / (2.0 * spec.tau(k)) + x);
  }
  return total;
}

namespace {

void scale_groups_to(const SystemConfig& config, PrecoderSet& b, bool only_if_over) {
  for (const auto& g : config.constraint_groups()) {
    double used = 0.0;
    for (int n : g.antennas) {
      for (const auto& bk : b.b) used += std::norm(bk(n));
    }
    double scale = 1.0;
    if (g.budget <= 0.0 || used <= 0.0) {
      scale = 0.0;
    } else if (!only_if_over || used > g.budget) {
      scale = std::sqrt(g.budget / used);
    }
    for (int n : g.antennas) {
      for (auto& bk : b.b) bk(n) *= scale;
    }
  }
}

struct PgPoint {
  PrecoderSet b;
  RVector t;
};

double real_inner(const PgPoint& a, const PgPoint& b) {
  double s = a.t.dot(b.t);
  for (size_t k = 0; k < a.b.b.size(); ++k) s += a.b.b[k].dot(b.b.b[k]).real();
  return s;
}

PgPoint axpy(const PgPoint& x, double alpha, const PgPoint& d) {
  PgPoint y = x;
  y.t += alpha * d.t;
  for (size_t k = 0; k < y.b.b.size(); ++k) y.b.b[k] += alpha * d.b.b[k];
  return y;
}

PgPoint project(const SystemConfig& config, PgPoint p) {
  p.t = p.t.cwiseMax(0.0).cwiseMin(1.0);
  scale_groups_to(config, p.b, true);
  return p;
}

// Real gradient, packed as complex vectors (d/dRe + i d/dIm).
PgPoint gradient(const SubproblemSpec& spec, const PgPoint& p) {
  const int k_users = spec.config.num_users;
  PgPoint g{PrecoderSet::zeros(k_users, spec.config.num_antennas()), RVector::Zero(k_users)};
  for (int k = 0; k < k_users; ++k) {
    const CVector& h = spec.channels.h[static_cast<size_t>(k)];
    double r = spec.config.noise_var(k);
    for (int i = 0; i < k_users; ++i) {
      if (i != k) r += std::norm(h.dot(p.b.b[static_cast<size_t>(i)]));
    }
    const double dr = spec.nu(k) * spec.eta(k) * r * r * r / spec.tau(k);
    for (int i = 0; i < k_users; ++i) {
      const Complex proj = h.dot(p.b.b[static_cast<size_t>(i)]);
      if (i == k) {
        const double s = std::norm(proj);
        const double ds = -spec.nu(k) * spec.tau(k) / (s * s * s);
        g.b.b[static_cast<size_t>(i)] += 2.0 * ds * proj * h;
      } else {
        g.b.b[static_cast<size_t>(i)] += 2.0 * dr * proj * h;
      }
    }
    const double tk = p.t(k);
    g.t(k) = spec.nu(k) * (2.0 * (tk - 1.0) + 2.0 * std::pow(tk, 7) / (spec.eta(k) * spec.tau(k)));
  }
  return g;
}

}  // namespace

PrecoderSet random_feasible_precoders(const SystemConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  PrecoderSet b = PrecoderSet::zeros(config.num_users, config.num_antennas());
  for (auto& bk : b.b) {
    for (Eigen::Index n = 0; n < bk.size(); ++n) bk(n) = Complex(normal(rng), normal(rng));
  }
  scale_groups_to(config, b, false);
  return b;
}

PgSubproblemResult subproblem_projected_gradient(const SubproblemSpec& spec, int restarts,
                                                 std::uint64_t seed, int iterations_per_start) {
  const int k_users = spec.config.num_users;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  PgSubproblemResult best;
  best.objective = std::numeric_limits<double>::infinity();
  auto value = [&](const PgPoint& p) { return subproblem_objective_direct(spec, p.b, p.t); };

  for (int rs = 0; rs < restarts; ++rs) {
    PgPoint x{random_feasible_precoders(spec.config, rng()), RVector(k_users)};
    for (int k = 0; k < k_users; ++k) x.t(k) = unit(rng);
    double fx = value(x);
    PgPoint gx = gradient(spec, x);
    double alpha = 1e-3;
    for (int it = 0; it < iterations_per_start; ++it) {
      const PgPoint trial = project(spec.config, axpy(x, -alpha, gx));
      const PgPoint d = axpy(trial, -1.0, x);
      const double slope = real_inner(gx, d);
      if (!(slope < 0.0)) break;
      double lambda = 1.0;
      PgPoint next = trial;
      double fn = value(next);
      while (!(fn <= fx + 1e-4 * lambda * slope) && lambda > 1e-20) {
        lambda *= 0.5;
        next = axpy(x, lambda, d);
        fn = value(next);
      }
      if (lambda <= 1e-20) break;
      const PgPoint gn = gradient(spec, next);
      const PgPoint s = axpy(next, -1.0, x);
      const PgPoint y = axpy(gn, -1.0, gx);
      const double sy = real_inner(s, y);
      const double ss = real_inner(s, s);
      alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e-3;
      const double decrease = fx - fn;
      x = next;
      gx = gn;
      fx = fn;
      if (decrease <= 1e-16 * std::abs(fx) && ss < 1e-28) break;
    }
    if (fx < best.objective) {
      best.objective = fx;
      best.precoders = x.b;
      best.t = x.t;
    }
  }
  return best;
}

}  // namespace coordbeam::oracle
