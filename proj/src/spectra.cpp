#include "blockframe/spectra.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blockframe/error.hpp"
#include "blockframe/hermitian_eigen.hpp"
#include "blockframe/parallel.hpp"

namespace blockframe {

std::vector<double> gram_spectrum(const CMatrix& sub) {
  const CMatrix g = sub.cols() <= sub.rows() ? gram(sub) : gram(sub.adjoint());
  std::vector<double> eig = hermitian_eigenvalues(g);
  if (!eig.empty() && eig.front() < -1e-10) {
    std::ostringstream msg;
    msg << "gram_spectrum: Gram of a " << sub.rows() << "x" << sub.cols()
        << " subframe has eigenvalue " << eig.front() << " (below -1e-10)";
    throw NumericalError(msg.str());
  }
  for (double& v : eig) v = std::max(v, 0.0);
  return eig;
}

namespace {

struct Support {
  double lower;
  double upper;
};

Support manova_support(double beta, double gamma) {
  const double a = std::sqrt(beta * (1.0 - gamma));
  const double b = std::sqrt(std::max(0.0, 1.0 - beta * gamma));
  return {(a - b) * (a - b), std::min((a + b) * (a + b), 1.0 / gamma)};
}

Support mp_support(double beta) {
  const double r = std::sqrt(beta);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

void require_params(double beta, double gamma) {
  if (!(beta > 0.0)) throw ValidationError("spectral model: beta must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("spectral model: gamma must lie in (0, 1]");
}

}  // namespace

double manova_density(double lambda, double beta, double gamma) {
  require_params(beta, gamma);
  const Support s = manova_support(beta, gamma);
  if (!(lambda > s.lower && lambda < s.upper)) return 0.0;
  const double root = std::sqrt((s.upper - lambda) * (lambda - s.lower));
  const double pole = std::fma(-gamma, lambda, 1.0);
  if (!(pole > 0.0)) return 0.0;
  return root / (2.0 * std::numbers::pi * beta * lambda * pole);
}

double mp_density(double lambda, double beta) {
  if (!(beta > 0.0)) throw ValidationError("spectral model: beta must be positive");
  const Support s = mp_support(beta);
  if (!(lambda > s.lower && lambda < s.upper)) return 0.0;
  return std::sqrt((s.upper - lambda) * (lambda - s.lower)) / (2.0 * std::numbers::pi * beta * lambda);
}

std::string_view to_string(SpectralKind kind) {
  switch (kind) {
    case SpectralKind::Manova:
      return "manova";
    case SpectralKind::MarchenkoPastur:
      return "mp";
    case SpectralKind::Discrete:
      return "discrete";
  }
  return "unknown";
}

SpectralModel SpectralModel::manova(double beta, double gamma) {
  require_params(beta, gamma);
  const Support s = manova_support(beta, gamma);
  SpectralModel m;
  m.kind = SpectralKind::Manova;
  m.beta = beta;
  m.gamma = gamma;
  m.lower = s.lower;
  m.upper = s.upper;
  const double top = 1.0 + 1.0 / beta - 1.0 / (beta * gamma);
  if (top > 0.0) m.atoms.push_back({1.0 / gamma, top});
  if (beta > 1.0) m.atoms.push_back({0.0, 1.0 - 1.0 / beta});
  return m;
}

SpectralModel SpectralModel::marchenko_pastur(double beta) {
  if (!(beta > 0.0)) throw ValidationError("spectral model: beta must be positive");
  const Support s = mp_support(beta);
  SpectralModel m;
  m.kind = SpectralKind::MarchenkoPastur;
  m.beta = beta;
  m.lower = s.lower;
  m.upper = s.upper;
  if (beta > 1.0) m.atoms.push_back({0.0, 1.0 - 1.0 / beta});
  return m;
}

SpectralModel SpectralModel::discrete(std::vector<PointMass> atoms) {
  SpectralModel m;
  m.kind = SpectralKind::Discrete;
  m.continuous_scale = 0.0;
  m.atoms = std::move(atoms);
  return m;
}

SpectralModel SpectralModel::smaller_side() const {
  if (kind == SpectralKind::Discrete || beta <= 1.0) return *this;
  SpectralModel m = *this;
  m.continuous_scale *= beta;
  m.atoms.clear();
  for (const PointMass& a : atoms)
    if (a.location > 0.0) m.atoms.push_back({a.location, a.weight * beta});
  return m;
}

double SpectralModel::density(double lambda) const {
  switch (kind) {
    case SpectralKind::Manova:
      return continuous_scale * manova_density(lambda, beta, gamma);
    case SpectralKind::MarchenkoPastur:
      return continuous_scale * mp_density(lambda, beta);
    case SpectralKind::Discrete:
      return 0.0;
  }
  return 0.0;
}

double SpectralModel::expectation(const std::function<double(double)>& g) const {
  double total = 0.0;
  for (const PointMass& a : atoms) total += a.weight * g(a.location);
  if (kind == SpectralKind::Discrete || continuous_scale == 0.0 || !(upper > lower)) return total;
  // λ = lower + (upper - lower)(1 - cos θ)/2 turns the square-root endpoint
  // behaviour into smooth sin θ factors.
  const double half = 0.5 * (upper - lower);
  auto integrand = [&](double theta) {
    const double lambda = lower + half * (1.0 - std::cos(theta));
    const double f = density(lambda);
    return f == 0.0 ? 0.0 : g(lambda) * f * half * std::sin(theta);
  };
  double err = 0.0;
  total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi,
                                                                          15, 1e-13, &err);
  return total;
}

double SpectralModel::continuous_mass() const {
  SpectralModel c = *this;
  c.atoms.clear();
  return c.expectation([](double) { return 1.0; });
}

double SpectralModel::total_mass() const {
  return expectation([](double) { return 1.0; });
}

double SpectralModel::bin_probability(double left, double right, bool closed_right) const {
  double p = 0.0;
  for (const PointMass& a : atoms)
    if (a.location >= left && (a.location < right || (closed_right && a.location == right))) p += a.weight;
  if (kind == SpectralKind::Discrete || continuous_scale == 0.0) return p;
  const double lo = std::max(left, lower);
  const double hi = std::min(right, upper);
  if (!(hi > lo)) return p;
  // Same cosine substitution as expectation(), restricted to the bin.
  const double half = 0.5 * (upper - lower);
  auto theta_of = [&](double lambda) { return std::acos(std::clamp(1.0 - (lambda - lower) / half, -1.0, 1.0)); };
  auto integrand = [&](double theta) {
    const double f = density(lower + half * (1.0 - std::cos(theta)));
    return f == 0.0 ? 0.0 : f * half * std::sin(theta);
  };
  double err = 0.0;
  return p + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, theta_of(lo), theta_of(hi), 3,
                                                                             1e-10, &err);
}

double default_histogram_upper(const EmpiricalSpectrum& spectrum) {
  double top = 0.0;
  for (double v : spectrum.eigenvalues) top = std::max(top, v);
  return top + 1e-9 * std::max(1.0, top);
}

double reference_histogram_upper(const EmpiricalSpectrum& spectrum, const SpectralModel& model) {
  double top = model.continuous_scale > 0.0 ? model.upper : 0.0;
  for (const PointMass& a : model.atoms)
    if (a.weight > 0.0) top = std::max(top, a.location);
  return std::max(1.1 * top, default_histogram_upper(spectrum));
}

Histogram make_histogram(const EmpiricalSpectrum& spectrum, int bins, double upper) {
  if (bins < 1) throw ValidationError("histogram: need at least one bin");
  if (!(upper > 0.0)) throw ValidationError("histogram: upper edge must be positive");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = upper * b / bins;
  h.masses.assign(bins, 0.0);
  if (spectrum.eigenvalues.empty()) return h;
  const double each = spectrum.selection_weight / static_cast<double>(spectrum.rank);
  for (double v : spectrum.eigenvalues) {
    auto b = static_cast<long>(std::floor(v / upper * bins));
    b = std::clamp<long>(b, 0, bins - 1);
    h.masses[b] += each;
  }
  return h;
}

EmpiricalSpectrum empirical_spectrum(const Frame& frame, const EvaluationMode& mode, int bins) {
  EmpiricalSpectrum out;
  out.selections = selections_for(frame.blocks(), mode);
  const auto per_selection = parallel_map(out.selections.size(), [&](std::size_t i) {
    try {
      return gram_spectrum(subframe(frame, out.selections[i]));
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " [selection " + std::to_string(i) + ": blocks " +
                           out.selections[i].to_string() + "]");
    }
  });
  out.rank = std::min<std::size_t>(frame.m(), frame.blocks().active_columns());
  out.eigenvalues.reserve(out.rank * per_selection.size());
  for (const auto& eig : per_selection) out.eigenvalues.insert(out.eigenvalues.end(), eig.begin(), eig.end());
  out.selection_weight = out.selections.empty() ? 0.0 : 1.0 / static_cast<double>(out.selections.size());
  out.histogram = make_histogram(out, bins, default_histogram_upper(out));
  return out;
}

double kl_divergence(const Histogram& histogram, const SpectralModel& model) {
  const std::size_t bins = histogram.bins();
  std::vector<double> q(bins);
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    q[b] = std::max(1e-12, model.bin_probability(histogram.edges[b], histogram.edges[b + 1], b + 1 == bins));
    total += q[b];
  }
  double kl = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double m = histogram.masses[b];
    if (m > 0.0) kl += m * std::log(m / (q[b] / total));
  }
  return std::max(0.0, kl);
}

double kl_divergence(const EmpiricalSpectrum& empirical, const SpectralModel& model) {
  return kl_divergence(empirical.histogram, model);
}

}  // namespace blockframe
