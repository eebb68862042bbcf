#include "walklab/rv_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

namespace {

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Sorted-merge of adjacent support points within the relative tolerance.
std::vector<LatticePoint> merge_sorted(std::vector<LatticePoint> pts, double tol) {
  std::vector<LatticePoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (!out.empty()) {
      auto& last = out.back();
      const double gap = p.w - last.w;
      if (gap <= tol * std::max(1.0, std::abs(p.w))) {
        const double mass = last.prob + p.prob;
        // Masses below the double range underflow to zero; keep the left value.
        if (mass > 0.0) {
          // Clamp so rounding cannot move the average outside [last.w, p.w].
          const double avg = (last.w * last.prob + p.w * p.prob) / mass;
          last.w = std::clamp(avg, last.w, p.w);
        }
        last.prob = mass;
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

FiniteRV::FiniteRV(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() < 2) throw ValidationError("FiniteRV needs at least 2 atoms");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double mass = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (!std::isfinite(a.value)) throw ValidationError("FiniteRV: non-finite atom value");
    if (!(a.prob > 0.0 && a.prob <= 1.0)) {
      throw ValidationError("FiniteRV: probability " + describe(a.prob) +
                            " outside (0, 1]");
    }
    if (i > 0 && a.value == atoms_[i - 1].value) {
      throw ValidationError("FiniteRV: duplicate atom value " + describe(a.value));
    }
    mass += a.prob;
    mean += a.prob * a.value;
    second += a.prob * a.value * a.value;
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    throw ValidationError("FiniteRV: probabilities sum to " + describe(mass));
  }
  if (std::abs(mean) > 1e-10) throw ValidationError("FiniteRV: mean " + describe(mean) + " != 0");
  if (std::abs(second - mean * mean - 1.0) > 1e-10) {
    throw ValidationError("FiniteRV: variance " + describe(second - mean * mean) + " != 1");
  }
}

double FiniteRV::support_bound() const {
  return std::max(std::abs(min_value()), std::abs(max_value()));
}

FiniteRV FiniteRV::symmetric_binomial() { return FiniteRV({{-1.0, 0.5}, {1.0, 0.5}}); }

FiniteRV FiniteRV::asymmetric_binomial() { return FiniteRV({{-0.5, 0.8}, {2.0, 0.2}}); }

FiniteRV FiniteRV::trinomial() {
  const double s = std::sqrt(2.0);
  return FiniteRV({{-s, 0.25}, {0.0, 0.5}, {s, 0.25}});
}

FiniteRV standardize(std::vector<Atom> atoms) {
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (!(a.prob > 0.0)) throw ValidationError("standardize: probabilities must be positive");
    mass += a.prob;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw ValidationError("standardize: mass " + describe(mass));
  double mean = 0.0;
  for (const auto& a : atoms) mean += a.prob * a.value;
  double var = 0.0;
  for (const auto& a : atoms) var += a.prob * (a.value - mean) * (a.value - mean);
  if (!(var > 0.0)) throw ValidationError("standardize: degenerate law");
  const double sd = std::sqrt(var);
  for (auto& a : atoms) a.value = (a.value - mean) / sd;
  return FiniteRV(std::move(atoms));
}

Moments moments(const FiniteRV& rv) {
  double mean = 0.0, second = 0.0, third = 0.0;
  for (const auto& a : rv.atoms()) {
    mean += a.prob * a.value;
    second += a.prob * a.value * a.value;
    third += a.prob * a.value * a.value * a.value;
  }
  return {mean, second - mean * mean, third};
}

double laplace(const FiniteRV& rv, double lambda) {
  double s = 0.0;
  for (const auto& a : rv.atoms()) s += a.prob * std::exp(lambda * a.value);
  return s;
}

double log_laplace(const FiniteRV& rv, double lambda) {
  LogSumAccumulator acc;
  for (const auto& a : rv.atoms()) acc.add(std::log(a.prob) + lambda * a.value);
  return acc.value();
}

double gaussian_laplace(double lambda) { return std::exp(0.5 * lambda * lambda); }

double log_gaussian_laplace(double lambda) { return 0.5 * lambda * lambda; }

LatticeDistribution::LatticeDistribution(int n, std::vector<LatticePoint> points)
    : n_(n), points_(std::move(points)) {
  if (n_ < 1) throw ValidationError("LatticeDistribution: n must be >= 1");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].w > points_[i - 1].w)) {
      throw ValidationError("LatticeDistribution: support not strictly increasing");
    }
  }
}

double LatticeDistribution::total_mass() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.prob;
  return s;
}

double LatticeDistribution::mean() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.prob * p.w;
  return s;
}

double LatticeDistribution::second_moment() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.prob * p.w * p.w;
  return s;
}

LatticeDistribution terminal_distribution(const FiniteRV& rv, int n, double merge_tol,
                                          std::size_t max_points) {
  if (n < 1) throw ValidationError("terminal_distribution: n must be >= 1");
  if (!(merge_tol >= 0.0)) throw ValidationError("terminal_distribution: merge_tol must be >= 0");

  // Convolve the unscaled sums so equal increments recombine exactly where the
  // arithmetic allows; scale by 1/sqrt(n) once at the end.
  std::vector<LatticePoint> cur{{0.0, 1.0}};
  std::vector<LatticePoint> next;
  for (int step = 0; step < n; ++step) {
    const std::size_t projected = cur.size() * rv.size();
    if (projected > max_points * rv.size()) {
      throw NumericError("terminal_distribution: lattice exceeds " +
                         std::to_string(max_points) +
                         " points; use a smaller n or a larger merge_tol");
    }
    next.clear();
    next.reserve(projected);
    for (const auto& p : cur) {
      for (const auto& a : rv.atoms()) next.push_back({p.w + a.value, p.prob * a.prob});
    }
    std::sort(next.begin(), next.end(),
              [](const LatticePoint& a, const LatticePoint& b) { return a.w < b.w; });
    cur = merge_sorted(std::move(next), merge_tol);
    next = {};
    if (cur.size() > max_points) {
      throw NumericError("terminal_distribution: lattice size " + std::to_string(cur.size()) +
                         " exceeds cap " + std::to_string(max_points) +
                         "; use a smaller n or a larger merge_tol");
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& p : cur) p.w *= scale;
  // Sums that differ only by rounding can collide after scaling.
  cur = merge_sorted(std::move(cur), 0.0);
  return LatticeDistribution(n, std::move(cur));
}

double lattice_expect(const LatticeDistribution& dist,
                      const std::function<double(double)>& g) {
  double s = 0.0;
  for (const auto& p : dist.points()) {
    const double v = g(p.w);
    if (!std::isfinite(v)) {
      throw NumericError("lattice_expect: integrand not finite at atom w=" + describe(p.w) +
                         " (prob " + describe(p.prob) + ")");
    }
    s += p.prob * v;
  }
  return s;
}

double lattice_log_expect(const LatticeDistribution& dist,
                          const std::function<double(double)>& log_g) {
  LogSumAccumulator acc;
  for (const auto& p : dist.points()) {
    const double lg = log_g(p.w);
    if (std::isnan(lg) || lg == std::numeric_limits<double>::infinity()) {
      throw NumericError("lattice_log_expect: log-integrand invalid at atom w=" + describe(p.w));
    }
    acc.add(std::log(p.prob) + lg);
  }
  return acc.value();
}

}  // namespace walklab
