#include "knnrex/estimators.hpp"

#include "knnrex/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace knnrex {

Index MarginalVariable::bin_of(double value) const {
  if (freq.empty() || !(value >= edges.front()) || !(value <= edges.back())) return -1;
  if (value == edges.back()) return bins() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<Index>(it - edges.begin()) - 1;
}

void validate_marginals(const MarginalSpec& spec, Index d) {
  auto fail = [](const std::string& what) { throw Error(Errc::InconsistentMarginals, what); };
  if (spec.total < 0) fail("negative population total");
  if (spec.variables.empty()) fail("no marginal variables");
  for (const auto& v : spec.variables) {
    if (v.column < 0 || v.column >= d) fail("variable '" + v.name + "' names no data column");
    if (v.freq.empty() || v.edges.size() != v.freq.size() + 1) {
      fail("variable '" + v.name + "' needs one more edge than bins");
    }
    for (std::size_t b = 0; b + 1 < v.edges.size(); ++b) {
      if (!(v.edges[b] < v.edges[b + 1])) fail("variable '" + v.name + "' edges must increase");
    }
    Index sum = 0;
    for (Index f : v.freq) {
      if (f < 0) fail("variable '" + v.name + "' has a negative frequency");
      sum += f;
    }
    if (sum != spec.total) {
      fail("variable '" + v.name + "' frequencies sum to " + std::to_string(sum) +
           ", expected total " + std::to_string(spec.total));
    }
  }
}

namespace {

// Population under construction: slots in insertion order, with per
// (variable, bin) member lists supporting O(1) random removal.
class Population {
 public:
  Population(const MarginalSpec& spec, Index d) : spec_(spec), d_(d) {
    members_.resize(spec.variables.size());
    for (std::size_t v = 0; v < spec.variables.size(); ++v) {
      members_[v].resize(static_cast<std::size_t>(spec.variables[v].bins()));
    }
  }

  Index alive() const { return alive_; }

  Index count(std::size_t v, Index b) const {
    return static_cast<Index>(members_[v][static_cast<std::size_t>(b)].size());
  }

  // Most vacant bin; ties go to the first (variable, bin) in order.
  std::pair<std::size_t, Index> most_vacant() const {
    std::pair<std::size_t, Index> best{0, 0};
    Index best_gap = std::numeric_limits<Index>::min();
    for (std::size_t v = 0; v < spec_.variables.size(); ++v) {
      const auto& var = spec_.variables[v];
      for (Index b = 0; b < var.bins(); ++b) {
        const Index gap = var.freq[static_cast<std::size_t>(b)] - count(v, b);
        if (gap > best_gap) {
          best_gap = gap;
          best = {v, b};
        }
      }
    }
    return best;
  }

  void add(const Vectord& y, const std::vector<Index>& bins) {
    const std::size_t slot = points_.size();
    points_.push_back(y);
    live_.push_back(true);
    position_.emplace_back(bins.size());
    bins_.push_back(bins);
    for (std::size_t v = 0; v < bins.size(); ++v) {
      auto& list = members_[v][static_cast<std::size_t>(bins[v])];
      position_[slot][v] = list.size();
      list.push_back(slot);
    }
    ++alive_;
  }

  // Removes members at random from over-full bins until none remains.
  Index repair(Rng& rng) {
    Index removed = 0;
    for (;;) {
      bool found = false;
      for (std::size_t v = 0; v < spec_.variables.size() && !found; ++v) {
        const auto& var = spec_.variables[v];
        for (Index b = 0; b < var.bins(); ++b) {
          if (count(v, b) > var.freq[static_cast<std::size_t>(b)]) {
            const auto& list = members_[v][static_cast<std::size_t>(b)];
            std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
            remove(list[pick(rng)]);
            ++removed;
            found = true;
            break;
          }
        }
      }
      if (!found) return removed;
    }
  }

  PointSetd collect() const {
    PointSetd out(alive_, d_);
    Index r = 0;
    for (std::size_t s = 0; s < points_.size(); ++s) {
      if (live_[s]) out.row(r++) = points_[s].transpose();
    }
    return out;
  }

 private:
  void remove(std::size_t slot) {
    for (std::size_t v = 0; v < bins_[slot].size(); ++v) {
      auto& list = members_[v][static_cast<std::size_t>(bins_[slot][v])];
      const std::size_t pos = position_[slot][v];
      const std::size_t moved = list.back();
      list[pos] = moved;
      position_[moved][v] = pos;
      list.pop_back();
    }
    live_[slot] = false;
    --alive_;
  }

  const MarginalSpec& spec_;
  Index d_;
  Index alive_ = 0;
  std::vector<Vectord> points_;
  std::vector<bool> live_;
  std::vector<std::vector<Index>> bins_;
  std::vector<std::vector<std::size_t>> position_;
  std::vector<std::vector<std::vector<std::size_t>>> members_;
};

}  // namespace

CorrectedResult synth_bias_corrected(const PointSetd& x, const MarginalSpec& spec, Index k,
                                     Index m, Rng& rng, const CorrectedOptions& options) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n == 0) throw Error(Errc::EmptySample, "synth_bias_corrected: empty sample");
  validate_marginals(spec, d);
  if (k < 0 || m < 1 || m > k + 1) {
    throw Error(Errc::BadParams, "synth_bias_corrected: need 1 <= m <= k+1");
  }
  if (k >= n) throw Error(Errc::KTooLarge, "synth_bias_corrected: k must be below n");

  // Sample members of every marginal bin, tested in original units.
  std::vector<std::vector<std::vector<Index>>> sample_bins(spec.variables.size());
  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    const auto& var = spec.variables[v];
    sample_bins[v].resize(static_cast<std::size_t>(var.bins()));
    for (Index i = 0; i < n; ++i) {
      const Index b = var.bin_of(x(i, var.column));
      if (b < 0) {
        throw Error(Errc::BadParams, "sample value " + std::to_string(x(i, var.column)) +
                                         " of variable '" + var.name +
                                         "' lies outside its marginal bins");
      }
      sample_bins[v][static_cast<std::size_t>(b)].push_back(i);
    }
  }

  CorrectedResult result;
  Population population(spec, d);
  const Index l = spec.total;
  if (l == 0) {
    result.points = population.collect();
    return result;
  }

  const WhitenTransform<double> transform = whiten_fit(x);
  const PointSetd xw = whiten_apply(transform, x);
  KnnIndex<double> index;
  if (k > 0) index = build_knn(xw, k);
  const Vectord lo = x.colwise().minCoeff().transpose();
  const Vectord hi = x.colwise().maxCoeff().transpose();

  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Index(0));
  std::vector<Index> members(static_cast<std::size_t>(m));
  std::vector<Index> bins(spec.variables.size());
  RexScratch<double> scratch;
  Vectord yw(d);
  PointSetd local(m, d);

  // Fills members[1..m-1] with distinct draws from a neighbor list.
  auto draw_neighbors = [&](auto&& neighbor_at) {
    for (Index j = 0; j + 1 < m; ++j) {
      std::uniform_int_distribution<Index> pick(j, k - 1);
      std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(pick(rng))]);
      members[static_cast<std::size_t>(j + 1)] = neighbor_at(perm[static_cast<std::size_t>(j)]);
    }
  };

  const Index stall_limit = 50 * l;
  Index best_alive = 0;
  Index since_progress = 0;
  auto& stats = result.stats;
  while (population.alive() < l) {
    if (since_progress >= stall_limit) {
      throw StallLimitError("no net progress in " + std::to_string(stall_limit) +
                                " iterations; reached " + std::to_string(population.alive()) +
                                " of " + std::to_string(l) + " points",
                            population.collect(), stats);
    }
    ++stats.iterations;
    ++since_progress;

    const auto [var_index, bin] = population.most_vacant();
    const auto& seeds = sample_bins[var_index][static_cast<std::size_t>(bin)];
    if (!seeds.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
      members[0] = seeds[pick(rng)];
      draw_neighbors([&](Index slot) { return index.ids(members[0], slot); });
      rex_sample_members(xw, members, rng, scratch, yw);
    } else {
      // No sample point in the most vacant bin: seed uniformly on the bin for
      // its variable and on the sample range for every other coordinate.
      ++stats.uniform_seeds;
      const auto& var = spec.variables[var_index];
      Vectord q(d);
      for (Index c = 0; c < d; ++c) {
        if (c == var.column) {
          std::uniform_real_distribution<double> u(var.edges[static_cast<std::size_t>(bin)],
                                                   var.edges[static_cast<std::size_t>(bin) + 1]);
          q(c) = u(rng);
        } else {
          std::uniform_real_distribution<double> u(lo(c), hi(c));
          q(c) = u(rng);
        }
      }
      const Vectord qw = whiten_point(transform, q);
      local.row(0) = qw.transpose();
      if (m > 1) {
        const Neighbors<double> near = query_neighbors(xw, qw, k);
        draw_neighbors([&](Index slot) { return near.ids[static_cast<std::size_t>(slot)]; });
        for (Index j = 1; j < m; ++j) local.row(j) = xw.row(members[static_cast<std::size_t>(j)]);
      }
      std::vector<Index> all(static_cast<std::size_t>(m));
      std::iota(all.begin(), all.end(), Index(0));
      rex_sample_members(local, all, rng, scratch, yw);
    }

    Vectord y = unwhiten_point(transform, yw);
    if (options.round_integers) y = y.array().round().matrix();

    bool inside = true;
    for (std::size_t v = 0; v < spec.variables.size(); ++v) {
      bins[v] = spec.variables[v].bin_of(y(spec.variables[v].column));
      if (bins[v] < 0) inside = false;
    }
    if (!inside) {
      ++stats.out_of_range;
      continue;
    }
    population.add(y, bins);
    stats.removals += population.repair(rng);
    if (population.alive() > best_alive) {
      best_alive = population.alive();
      since_progress = 0;
    }
  }
  result.points = population.collect();
  return result;
}

}  // namespace knnrex
