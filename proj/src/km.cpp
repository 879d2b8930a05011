#include "knnrex/estimators.hpp"

#include "knnrex/kernels.hpp"
#include "knnrex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace knnrex {

namespace {

// Kernel of one KCS. Falls back to a ridge of 1e-9 * trace / d (absolute
// 1e-9 for a zero-spread set) when the covariance is numerically singular.
GaussianDensity<double> kcs_density(const PointSetd& x, const std::vector<Index>& members,
                                    double ridge) {
  PointSetd kcs(static_cast<Index>(members.size()), x.cols());
  for (std::size_t i = 0; i < members.size(); ++i) kcs.row(static_cast<Index>(i)) = x.row(members[i]);
  auto stats = kcs_stats(kcs);
  try {
    return GaussianDensity<double>(stats.mu, stats.sigma, ridge);
  } catch (const Error& e) {
    if (e.code() != Errc::SingularSigma) throw;
  }
  const double trace = stats.sigma.trace() / static_cast<double>(x.cols());
  const double fallback = trace > 0 ? 1e-9 * trace : 1e-9;
  return GaussianDensity<double>(stats.mu, stats.sigma, std::max(ridge, fallback));
}

void log_kernel_column(const PointSetd& x, const std::vector<Index>& members, double ridge,
                       Eigen::Ref<Vectord> column) {
  const GaussianDensity<double> g = kcs_density(x, members, ridge);
  for (Index i = 0; i < x.rows(); ++i) column(i) = g.log_density(x.row(i).transpose());
}

double log_sum_exp(const Eigen::Ref<const Vectord>& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

std::vector<Index> draw_without_replacement(Index n, Index m, std::vector<Index>& perm, Rng& rng) {
  std::vector<Index> out(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    std::uniform_int_distribution<Index> pick(j, n - 1);
    std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(pick(rng))]);
    out[static_cast<std::size_t>(j)] = perm[static_cast<std::size_t>(j)];
  }
  return out;
}

// Per-row mixture sums kept in shifted linear space, sum_l exp(logK_il - shift_i),
// so that replacing one column is O(1) per row. A row is recomputed from the
// log kernels whenever the update would lose precision.
class MixtureRows {
 public:
  explicit MixtureRows(const Matrixd& logk) : shift_(logk.rows()), sum_(logk.rows()) {
    for (Index i = 0; i < logk.rows(); ++i) rebuild(logk, i);
  }

  double total(Index L) const {
    double t = 0;
    for (Index i = 0; i < sum_.size(); ++i) t += row_loglik(i, L);
    return t;
  }

  double row_loglik(Index i, Index L) const {
    return shift_(i) + std::log(sum_(i)) - std::log(static_cast<double>(L));
  }

  // Log-likelihood of row i with column `col` replaced by `fresh`, or NaN if
  // the shifted update is unreliable.
  double proposed_row(const Matrixd& logk, Index i, Index col, double fresh, Index L) const {
    const double old_term = std::exp(logk(i, col) - shift_(i));
    const double new_shift = fresh - shift_(i);
    if (new_shift > 30.0) return std::numeric_limits<double>::quiet_NaN();
    const double updated = sum_(i) - old_term + std::exp(new_shift);
    if (!(updated > 1e-8 * sum_(i))) return std::numeric_limits<double>::quiet_NaN();
    return shift_(i) + std::log(updated) - std::log(static_cast<double>(L));
  }

  void rebuild(const Matrixd& logk, Index i) {
    const double top = logk.row(i).maxCoeff();
    shift_(i) = std::isfinite(top) ? top : 0.0;
    sum_(i) = (logk.row(i).array() - shift_(i)).exp().sum();
  }

 private:
  Vectord shift_;
  Vectord sum_;
};

}  // namespace

double km_loglik(const PointSetd& x, const std::vector<std::vector<Index>>& kcss, double ridge) {
  if (kcss.empty()) throw Error(Errc::BadParams, "km_loglik: no kernel construction sets");
  const auto L = static_cast<Index>(kcss.size());
  Matrixd logk(x.rows(), L);
  for (Index l = 0; l < L; ++l) log_kernel_column(x, kcss[static_cast<std::size_t>(l)], ridge, logk.col(l));
  double total = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    total += log_sum_exp(logk.row(i).transpose()) - std::log(static_cast<double>(L));
  }
  return total;
}

KmModel km_fit(const PointSetd& x, Index L, Index m, Rng& rng, const KmOptions& options) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n == 0) throw Error(Errc::EmptySample, "km_fit: empty sample");
  if (L < 1) throw Error(Errc::BadParams, "km_fit: L must be at least 1");
  if (m < d + 1) throw Error(Errc::BadParams, "km_fit: m must be at least d+1");
  if (m > n) throw Error(Errc::BadParams, "km_fit: m exceeds the sample size");
  if (options.stall_limit < 1) throw Error(Errc::BadParams, "km_fit: stall limit must be positive");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index(0));

  KmModel model;
  model.kcss.reserve(static_cast<std::size_t>(L));
  for (Index l = 0; l < L; ++l) model.kcss.push_back(draw_without_replacement(n, m, perm, rng));

  Matrixd logk(n, L);
  for (Index l = 0; l < L; ++l) {
    log_kernel_column(x, model.kcss[static_cast<std::size_t>(l)], options.ridge, logk.col(l));
  }
  MixtureRows rows(logk);
  double current = rows.total(L);
  model.initial_loglik = current;

  std::uniform_int_distribution<Index> pick_kcs(0, L - 1);
  Vectord fresh(n);
  Index stall = 0;
  while (stall < options.stall_limit) {
    ++model.iterations;
    const Index target = pick_kcs(rng);
    std::vector<Index> candidate;
    if (options.move == KmMove::Redraw || m == n) {
      candidate = draw_without_replacement(n, m, perm, rng);
    } else {
      candidate = model.kcss[static_cast<std::size_t>(target)];
      std::uniform_int_distribution<Index> pick_slot(0, m - 1);
      const Index slot = pick_slot(rng);
      std::uniform_int_distribution<Index> pick_point(0, n - 1);
      Index replacement = 0;
      do {
        replacement = pick_point(rng);
      } while (std::find(candidate.begin(), candidate.end(), replacement) != candidate.end());
      candidate[static_cast<std::size_t>(slot)] = replacement;
    }
    log_kernel_column(x, candidate, options.ridge, fresh);

    double proposed = 0;
    for (Index i = 0; i < n; ++i) {
      double r = rows.proposed_row(logk, i, target, fresh(i), L);
      if (std::isnan(r)) {
        Vectord row = logk.row(i).transpose();
        row(target) = fresh(i);
        r = log_sum_exp(row) - std::log(static_cast<double>(L));
      }
      proposed += r;
    }

    // A margin keeps rounding noise (e.g. redrawing the same set) from
    // counting as an improvement.
    if (proposed > current + 1e-10 * std::max(1.0, std::abs(current))) {
      logk.col(target) = fresh;
      for (Index i = 0; i < n; ++i) rows.rebuild(logk, i);
      model.kcss[static_cast<std::size_t>(target)] = std::move(candidate);
      current = rows.total(L);
      model.accepted.emplace_back(model.iterations, current);
      stall = 0;
    } else {
      ++stall;
    }
  }
  model.loglik = current;
  return model;
}

PointSetd km_synth(const KmModel& model, const PointSetd& x, Index l, Rng& rng, unsigned threads) {
  if (model.kcss.empty()) throw Error(Errc::BadParams, "km_synth: model has no KCS");
  if (l < 0) throw Error(Errc::BadParams, "km_synth: negative output size");
  PointSetd out(l, x.cols());
  if (l == 0) return out;
  const std::uint64_t base = rng();
  const Index chunks = (l + kSynthesisChunk - 1) / kSynthesisChunk;
  const auto L = static_cast<Index>(model.kcss.size());
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    Rng stream = derived_stream(base, c);
    std::uniform_int_distribution<Index> pick(0, L - 1);
    RexScratch<double> scratch;
    const Index begin = static_cast<Index>(c) * kSynthesisChunk;
    const Index end = std::min(l, begin + kSynthesisChunk);
    for (Index r = begin; r < end; ++r) {
      rex_sample_members(x, model.kcss[static_cast<std::size_t>(pick(stream))], stream, scratch,
                         out.row(r));
    }
  });
  return out;
}

}  // namespace knnrex
