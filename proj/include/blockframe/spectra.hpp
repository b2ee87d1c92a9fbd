#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "blockframe/erasure.hpp"
#include "blockframe/frames.hpp"

namespace blockframe {

/// Eigenvalues of the smaller-side Gram of an M×K subframe (K×K when
/// K <= M, otherwise M×M), ascending. Values in [-1e-10, 0) are clamped to
/// zero; anything more negative throws NumericalError.
std::vector<double> gram_spectrum(const CMatrix& subframe);

/// Continuous part of the MANOVA(β, γ) limit law, zero outside [λ-, λ+].
double manova_density(double lambda, double beta, double gamma);

/// Continuous part of the Marchenko-Pastur law with ratio β.
double mp_density(double lambda, double beta);

enum class SpectralKind { Manova, MarchenkoPastur, Discrete };

std::string_view to_string(SpectralKind kind);

struct PointMass {
  double location = 0.0;
  double weight = 0.0;
};

/// Reference eigenvalue law: scale · (continuous density on [lower, upper])
/// plus point masses.
struct SpectralModel {
  SpectralKind kind = SpectralKind::Discrete;
  double beta = 0.0;
  double gamma = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double continuous_scale = 1.0;
  std::vector<PointMass> atoms;

  /// Law of the K×K subframe Gram, β = K/M, γ = M/N. Besides the mass at
  /// 1/γ, a mass of (1 - 1/β)^+ sits at zero when K > M.
  static SpectralModel manova(double beta, double gamma);
  /// β = K/M, with mass (1 - 1/β)^+ at zero.
  static SpectralModel marchenko_pastur(double beta);
  /// Purely atomic law (no continuous part).
  static SpectralModel discrete(std::vector<PointMass> atoms);

  /// Law of the eigenvalues gram_spectrum returns: unchanged for β <= 1;
  /// for β > 1 the M×M side drops the zero mass and rescales the rest by β.
  SpectralModel smaller_side() const;

  double density(double lambda) const;

  /// ∫ g(λ) dF(λ) over the continuous part (adaptive Gauss-Kronrod after a
  /// cosine change of variables that removes the square-root endpoints) plus
  /// the point masses.
  double expectation(const std::function<double(double)>& g) const;
  double continuous_mass() const;
  double total_mass() const;

  /// Probability of [left, right) (closed on the right when `closed_right`):
  /// the continuous part by a 32-point composite midpoint rule over the bin's
  /// overlap with the support, plus the atoms inside the bin.
  double bin_probability(double left, double right, bool closed_right) const;
};

struct Histogram {
  std::vector<double> edges;   // bins + 1 values
  std::vector<double> masses;  // sums to 1
  std::size_t bins() const noexcept { return masses.size(); }
};

/// Pooled subframe spectra. Eigenvalue i belongs to selection i / rank and
/// carries weight selection_weight / rank.
struct EmpiricalSpectrum {
  std::vector<Selection> selections;
  std::size_t rank = 0;  // min(M, K)
  std::vector<double> eigenvalues;
  double selection_weight = 0.0;
  Histogram histogram;
};

/// Histogram of the pooled eigenvalues over [0, upper) with equal-width bins;
/// values at or above `upper` land in the last bin.
Histogram make_histogram(const EmpiricalSpectrum& spectrum, int bins, double upper);

/// Default histogram range: just above the largest pooled eigenvalue.
double default_histogram_upper(const EmpiricalSpectrum& spectrum);

/// Range for comparing against a reference law: 1.1 times the model's
/// largest support point or atom, widened to cover every eigenvalue.
double reference_histogram_upper(const EmpiricalSpectrum& spectrum, const SpectralModel& model);

/// Pools gram_spectrum over every selection `mode` yields (equal weight per
/// selection) and bins the result with `bins` bins over the default range.
EmpiricalSpectrum empirical_spectrum(const Frame& frame, const EvaluationMode& mode, int bins);

/// D(empirical ‖ model) over the histogram bins, with model bin masses
/// floored at 1e-12 and renormalized over the histogram.
double kl_divergence(const EmpiricalSpectrum& empirical, const SpectralModel& model);
double kl_divergence(const Histogram& histogram, const SpectralModel& model);

}  // namespace blockframe
