#include "blockframe/capacity_engine.hpp"

#include <cmath>
#include <numbers>

#include "blockframe/error.hpp"

namespace blockframe {

GramPlanes GramPlanes::of(const CMatrix& f) {
  const std::size_t rows = f.rows(), cols = f.cols();
  std::vector<double> re(rows * cols), im(rows * cols);
  bool real = true;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    re[i] = f.data()[i].real();
    im[i] = f.data()[i].imag();
    real = real && im[i] == 0.0;
  }
  GramPlanes g;
  g.n = cols;
  g.real = real;
  g.re.resize(cols * cols);
  g.im.resize(cols * cols);
  kernels::SplitConstView in{re, real ? std::span<const double>{} : std::span<const double>(im)};
  kernels::active_kernels().gram(in, rows, cols, {g.re, g.im});
  return g;
}

SubsetLogdet::SubsetLogdet(std::size_t set_size, double scale, const kernels::KernelTable& kernels)
    : k_(set_size), scale_(scale), kernels_(&kernels) {}

void SubsetLogdet::run(const GramPlanes& g, std::span<const int> sets, std::span<double> out) {
  using kernels::kLanes;
  const std::size_t count = k_ == 0 ? 0 : sets.size() / k_;
  if (k_ == 0) {
    for (double& v : out) v = 0.0;
    return;
  }
  const std::size_t groups = (count + kLanes - 1) / kLanes;
  const std::size_t block = k_ * k_ * kLanes;
  batch_re_.assign(groups * block, 0.0);
  if (!g.real) batch_im_.assign(groups * block, 0.0);
  work_.resize(kernels::logdet_work_size(k_, groups, g.real));
  out_.resize(groups * kLanes);

  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t grp = s / kLanes, lane = s % kLanes;
    const int* idx = sets.data() + s * k_;
    double* dst_re = batch_re_.data() + grp * block;
    double* dst_im = g.real ? nullptr : batch_im_.data() + grp * block;
    for (std::size_t i = 0; i < k_; ++i) {
      const std::size_t row = static_cast<std::size_t>(idx[i]) * g.n;
      for (std::size_t j = 0; j <= i; ++j) {
        const std::size_t at = (i * k_ + j) * kLanes + lane;
        dst_re[at] = g.re[row + idx[j]];
        if (dst_im) dst_im[at] = g.im[row + idx[j]];
      }
    }
  }
  kernels::SplitConstView batch{std::span<const double>(batch_re_),
                                g.real ? std::span<const double>{} : std::span<const double>(batch_im_)};
  kernels_->logdet_shifted(batch, k_, groups, scale_, work_, out_);
  for (std::size_t s = 0; s < count; ++s) {
    if (std::isnan(out_[s]))
      throw NumericalError("subset log-determinant: nonpositive pivot for index set " + std::to_string(s));
    out[s] = out_[s];
  }
}

double average_capacity_logdet(const Frame& frame, double snr_linear, const EvaluationMode& mode) {
  const GramPlanes g = GramPlanes::of(frame.entries());
  const std::vector<Selection> selections = selections_for(frame.blocks(), mode);
  const std::size_t k = static_cast<std::size_t>(frame.blocks().active_columns());
  std::vector<int> sets;
  sets.reserve(selections.size() * k);
  for (const Selection& s : selections) {
    const auto cols = selection_columns(frame.blocks(), s);
    sets.insert(sets.end(), cols.begin(), cols.end());
  }
  std::vector<double> logdets(selections.size());
  SubsetLogdet engine(k, snr_linear);
  engine.run(g, sets, logdets);
  double sum = 0.0;
  for (double v : logdets) sum += v;
  return sum / std::numbers::ln2 / static_cast<double>(selections.size());
}

}  // namespace blockframe
