#include "knnrex/estimators.hpp"

#include "knnrex/kernels.hpp"
#include "knnrex/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace knnrex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_sample(const PointSetd& x, std::string_view who) {
  if (x.rows() == 0) throw Error(Errc::EmptySample, std::string(who) + ": empty sample");
}

void require_count(Index l, std::string_view who) {
  if (l < 0) throw Error(Errc::BadParams, std::string(who) + ": negative output size");
}

// Splits [0, l) into fixed chunks, each sampled with its own derived stream.
template <typename Fill>
PointSetd chunked_synthesis(Index l, Index d, Rng& rng, unsigned threads, Fill&& fill) {
  PointSetd out(l, d);
  if (l == 0) return out;
  const std::uint64_t base = rng();
  const Index chunks = (l + kSynthesisChunk - 1) / kSynthesisChunk;
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    Rng stream = derived_stream(base, c);
    const Index begin = static_cast<Index>(c) * kSynthesisChunk;
    const Index end = std::min(l, begin + kSynthesisChunk);
    fill(stream, out, begin, end);
  });
  return out;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::KnnRex: return "knn-rex";
    case Method::KnnRexCorrected: return "knn-rex-corrected";
    case Method::FixedGaussian: return "fixed";
    case Method::Bmp: return "bmp";
    case Method::KmRex: return "km";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "knn-rex" || text == "knn_rex") return Method::KnnRex;
  if (text == "knn-rex-corrected" || text == "knn_rex_corrected") return Method::KnnRexCorrected;
  if (text == "fixed" || text == "fixed_gaussian" || text == "fixed-gaussian") {
    return Method::FixedGaussian;
  }
  if (text == "bmp") return Method::Bmp;
  if (text == "km" || text == "km_rex" || text == "km-rex") return Method::KmRex;
  throw Error(Errc::BadParams, "unknown method '" + std::string(text) + "'");
}

void validate_config(const EstimatorConfig& cfg, Index n, Index d) {
  if (n == 0) throw Error(Errc::EmptySample, "empty sample");
  auto bad = [](const std::string& what) { throw Error(Errc::BadParams, what); };
  switch (cfg.method) {
    case Method::KnnRex:
    case Method::KnnRexCorrected:
      if (cfg.k < 0) bad("k must be non-negative");
      if (cfg.m < 1 || cfg.m > cfg.k + 1) bad("m must lie in [1, k+1]");
      if (cfg.k >= n) {
        throw Error(Errc::KTooLarge, "k = " + std::to_string(cfg.k) + " must be below n = " +
                                         std::to_string(n));
      }
      break;
    case Method::FixedGaussian:
      if (!(cfg.h >= 0)) bad("h must be non-negative");
      break;
    case Method::Bmp:
      if (!(cfg.h >= 0)) bad("h must be non-negative");
      if (cfg.k < 1) bad("bmp needs k >= 1");
      if (cfg.k >= n) {
        throw Error(Errc::KTooLarge, "k = " + std::to_string(cfg.k) + " must be below n = " +
                                         std::to_string(n));
      }
      break;
    case Method::KmRex:
      if (cfg.L < 1) bad("L must be at least 1");
      if (cfg.m < d + 1) bad("km needs m >= d+1 for an evaluable density");
      if (cfg.m > n) bad("km needs m <= n");
      if (cfg.stall_limit < 1) bad("stall limit must be positive");
      break;
  }
}

PointSetd synth_knn_rex(const PointSetd& x, const KnnIndex<double>& index, Index m, Index l,
                        Rng& rng, unsigned threads) {
  require_sample(x, "synth_knn_rex");
  require_count(l, "synth_knn_rex");
  const Index k = index.k;
  if (m < 1 || m > k + 1) throw Error(Errc::BadParams, "synth_knn_rex: m must lie in [1, k+1]");
  if (m > 1 && index.size() != x.rows()) {
    throw Error(Errc::DimensionMismatch, "synth_knn_rex: index was built on a different sample");
  }
  const Index n = x.rows();
  return chunked_synthesis(l, x.cols(), rng, threads,
                           [&](Rng& stream, PointSetd& out, Index begin, Index end) {
    std::uniform_int_distribution<Index> pick_seed(0, n - 1);
    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), Index(0));
    std::vector<Index> members(static_cast<std::size_t>(m));
    RexScratch<double> scratch;
    for (Index r = begin; r < end; ++r) {
      const Index seed = pick_seed(stream);
      members[0] = seed;
      // Partial Fisher-Yates over a persistent permutation of neighbor slots:
      // any permutation yields a uniform (m-1)-subset.
      for (Index j = 0; j + 1 < m; ++j) {
        std::uniform_int_distribution<Index> pick(j, k - 1);
        std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(pick(stream))]);
        members[static_cast<std::size_t>(j + 1)] = index.ids(seed, perm[static_cast<std::size_t>(j)]);
      }
      rex_sample_members(x, members, stream, scratch, out.row(r));
    }
  });
}

PointSetd synth_knn_rex(const PointSetd& x, Index k, Index m, Index l, Rng& rng,
                        unsigned threads) {
  require_sample(x, "synth_knn_rex");
  if (k < 0) throw Error(Errc::BadParams, "synth_knn_rex: k must be non-negative");
  if (m < 1 || m > k + 1) throw Error(Errc::BadParams, "synth_knn_rex: m must lie in [1, k+1]");
  if (k >= x.rows()) {
    throw Error(Errc::KTooLarge, "synth_knn_rex: k must be below the sample size");
  }
  if (k == 0) {
    KnnIndex<double> empty;
    return synth_knn_rex(x, empty, m, l, rng, threads);
  }
  return synth_knn_rex(x, build_knn(x, k, threads), m, l, rng, threads);
}

PointSetd synth_fixed_gaussian(const PointSetd& x, double h, Index l, Rng& rng,
                               unsigned threads) {
  require_sample(x, "synth_fixed_gaussian");
  require_count(l, "synth_fixed_gaussian");
  if (!(h >= 0)) throw Error(Errc::BadParams, "synth_fixed_gaussian: h must be non-negative");
  const Index n = x.rows();
  return chunked_synthesis(l, x.cols(), rng, threads,
                           [&](Rng& stream, PointSetd& out, Index begin, Index end) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (Index r = begin; r < end; ++r) {
      gaussian_sample_into(x.row(pick(stream)), h, stream, out.row(r));
    }
  });
}

Vectord bmp_bandwidths(const KnnIndex<double>& index, double h) {
  Vectord bw(index.size());
  for (Index i = 0; i < index.size(); ++i) bw(i) = h * kth_distance(index, i);
  return bw;
}

PointSetd synth_bmp(const PointSetd& x, const KnnIndex<double>& index, double h, Index l,
                    Rng& rng, unsigned threads) {
  require_sample(x, "synth_bmp");
  require_count(l, "synth_bmp");
  if (!(h >= 0)) throw Error(Errc::BadParams, "synth_bmp: h must be non-negative");
  if (index.size() != x.rows()) {
    throw Error(Errc::DimensionMismatch, "synth_bmp: index was built on a different sample");
  }
  const Vectord bw = bmp_bandwidths(index, h);
  const Index n = x.rows();
  return chunked_synthesis(l, x.cols(), rng, threads,
                           [&](Rng& stream, PointSetd& out, Index begin, Index end) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (Index r = begin; r < end; ++r) {
      const Index i = pick(stream);
      gaussian_sample_into(x.row(i), bw(i), stream, out.row(r));
    }
  });
}

PointSetd synth_bmp(const PointSetd& x, Index k, double h, Index l, Rng& rng, unsigned threads) {
  require_sample(x, "synth_bmp");
  return synth_bmp(x, build_knn(x, k, threads), h, l, rng, threads);
}

std::pair<Index, Index> suggest_params(Index d_intrinsic, std::optional<Index> n) {
  if (d_intrinsic < 1) throw Error(Errc::BadParams, "intrinsic dimension must be at least 1");
  Index k = std::clamp<Index>(30, 10, 50);
  if (n) k = std::max<Index>(0, std::min(k, *n - 1));
  return {k, d_intrinsic + 1};
}

SynthesisResult synthesize(const PointSetd& x, const EstimatorConfig& cfg, Index l) {
  if (cfg.method == Method::KnnRexCorrected) {
    throw Error(Errc::BadParams, "synthesize: use synth_bias_corrected for the corrected method");
  }
  validate_config(cfg, x.rows(), x.cols());
  require_count(l, "synthesize");
  SynthesisResult result;
  Rng rng(cfg.seed);

  auto t0 = Clock::now();
  const WhitenTransform<double> transform = whiten_fit(x);
  const PointSetd xw = whiten_apply(transform, x);
  result.timings.whiten = seconds_since(t0);

  PointSetd yw;
  switch (cfg.method) {
    case Method::KnnRex: {
      t0 = Clock::now();
      KnnIndex<double> index;
      if (cfg.k > 0) index = build_knn(xw, cfg.k, cfg.threads);
      result.timings.index = seconds_since(t0);
      t0 = Clock::now();
      yw = synth_knn_rex(xw, index, cfg.m, l, rng, cfg.threads);
      result.timings.sample = seconds_since(t0);
      break;
    }
    case Method::Bmp: {
      t0 = Clock::now();
      const KnnIndex<double> index = build_knn(xw, cfg.k, cfg.threads);
      result.timings.index = seconds_since(t0);
      t0 = Clock::now();
      yw = synth_bmp(xw, index, cfg.h, l, rng, cfg.threads);
      result.timings.sample = seconds_since(t0);
      break;
    }
    case Method::FixedGaussian:
      t0 = Clock::now();
      yw = synth_fixed_gaussian(xw, cfg.h, l, rng, cfg.threads);
      result.timings.sample = seconds_since(t0);
      break;
    case Method::KmRex: {
      t0 = Clock::now();
      const KmModel model =
          km_fit(xw, cfg.L, cfg.m, rng, KmOptions{cfg.stall_limit, cfg.km_move, cfg.ridge});
      result.timings.fit = seconds_since(t0);
      t0 = Clock::now();
      yw = km_synth(model, xw, l, rng, cfg.threads);
      result.timings.sample = seconds_since(t0);
      break;
    }
    case Method::KnnRexCorrected:
      break;
  }

  t0 = Clock::now();
  result.points = whiten_invert(transform, yw);
  if (cfg.round_integers) result.points = result.points.array().round().matrix();
  result.timings.whiten += seconds_since(t0);
  return result;
}

}  // namespace knnrex
