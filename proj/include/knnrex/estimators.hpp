#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/knn_index.hpp"
#include "knnrex/preprocess.hpp"
#include "knnrex/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace knnrex {

enum class Method { KnnRex, KnnRexCorrected, FixedGaussian, Bmp, KmRex };

std::string_view method_name(Method method);
//! Accepts the CLI spellings (knn-rex, knn-rex-corrected, fixed, bmp, km) and
//! the underscore forms.
Method parse_method(std::string_view text);

//! How km_fit proposes a new KCS: redraw all m members, or swap one member for
//! a point outside the set.
enum class KmMove { Redraw, ReplaceOne };

struct EstimatorConfig {
  Method method = Method::KnnRex;
  Index k = 30;
  Index m = 3;
  double h = 0.1;
  Index L = 10;
  std::uint64_t seed = 1;
  Index stall_limit = 10000;
  bool round_integers = false;
  double ridge = 0.0;
  KmMove km_move = KmMove::Redraw;
  unsigned threads = 1;
};

//! Checks the per-method parameter constraints against an n x d sample.
void validate_config(const EstimatorConfig& cfg, Index n, Index d);

//! Output points are produced in fixed-size chunks, each with its own stream
//! derived from one draw of the caller's rng; the result therefore depends on
//! (rng state, chunk size) and not on the thread count.
inline constexpr Index kSynthesisChunk = 4096;

// --- Case I synthesizers. Inputs and outputs are in whatever space X is given
// (the pipeline below feeds them whitened data).

//! k-NN REX kernel with bagging: for each output point, a uniform seed x1, its
//! m-1 random distinct k-NN, and one REX draw from that KCS. k = 0 requires
//! m = 1 and skips the index (pure bootstrap).
PointSetd synth_knn_rex(const PointSetd& x, Index k, Index m, Index l, Rng& rng,
                        unsigned threads = 1);
//! Same, reusing a prebuilt index (its k is used).
PointSetd synth_knn_rex(const PointSetd& x, const KnnIndex<double>& index, Index m, Index l,
                        Rng& rng, unsigned threads = 1);

PointSetd synth_fixed_gaussian(const PointSetd& x, double h, Index l, Rng& rng,
                               unsigned threads = 1);

//! Per-point BMP bandwidths h * delta_ik.
Vectord bmp_bandwidths(const KnnIndex<double>& index, double h);

PointSetd synth_bmp(const PointSetd& x, Index k, double h, Index l, Rng& rng,
                    unsigned threads = 1);
PointSetd synth_bmp(const PointSetd& x, const KnnIndex<double>& index, double h, Index l,
                    Rng& rng, unsigned threads = 1);

// --- Kimura-Matsumura optimized crossover kernel.

struct KmOptions {
  Index stall_limit = 10000;
  KmMove move = KmMove::Redraw;
  double ridge = 0.0;
};

struct KmModel {
  std::vector<std::vector<Index>> kcss;
  double loglik = 0.0;
  double initial_loglik = 0.0;
  //! Total proposals evaluated.
  Index iterations = 0;
  //! (iteration number, log-likelihood after the move) for every accepted move.
  std::vector<std::pair<Index, double>> accepted;
};

KmModel km_fit(const PointSetd& x, Index L, Index m, Rng& rng, const KmOptions& options = {});
//! Sum_i log[(1/L) sum_l K(x_i | X_l)] evaluated from scratch.
double km_loglik(const PointSetd& x, const std::vector<std::vector<Index>>& kcss,
                 double ridge = 0.0);
PointSetd km_synth(const KmModel& model, const PointSetd& x, Index l, Rng& rng,
                   unsigned threads = 1);

//! Rule of thumb: m = d' + 1, k = 30 clamped to [10, 50] and to n - 1 when
//! the sample size is known.
std::pair<Index, Index> suggest_params(Index d_intrinsic, std::optional<Index> n = std::nullopt);

// --- Bias-corrected synthesis against published marginal frequencies.

struct MarginalVariable {
  std::string name;
  Index column = 0;
  //! Bin b is [edges[b], edges[b+1]); the last bin is closed on the right.
  std::vector<double> edges;
  std::vector<Index> freq;

  Index bins() const { return static_cast<Index>(freq.size()); }
  //! Bin holding `value`, or -1 when outside [edges.front(), edges.back()].
  Index bin_of(double value) const;
};

struct MarginalSpec {
  std::vector<MarginalVariable> variables;
  Index total = 0;
};

//! Throws InconsistentMarginals unless every variable's frequencies are
//! non-negative and sum to `total`, and edges increase strictly.
void validate_marginals(const MarginalSpec& spec, Index d);

struct CorrectedOptions {
  bool round_integers = false;
};

struct CorrectedStats {
  Index iterations = 0;
  Index uniform_seeds = 0;
  Index removals = 0;
  Index out_of_range = 0;
};

struct CorrectedResult {
  PointSetd points;
  CorrectedStats stats;
};

//! Raised when the bias-corrected loop makes no net progress; carries the
//! partial population reached so far.
class StallLimitError : public Error {
 public:
  StallLimitError(const std::string& what, PointSetd partial, CorrectedStats stats)
      : Error(Errc::StallLimit, what), partial_(std::move(partial)), stats_(stats) {}
  const PointSetd& partial() const { return partial_; }
  const CorrectedStats& stats() const { return stats_; }

 private:
  PointSetd partial_;
  CorrectedStats stats_;
};

//! Bias-corrected k-NN REX. `x` is in original units; it is whitened
//! internally for neighbor search and sampling, while bin membership is tested
//! on original-unit (optionally rounded) points. Returns exactly spec.total
//! points whose per-variable bin counts equal the target frequencies.
CorrectedResult synth_bias_corrected(const PointSetd& x, const MarginalSpec& spec, Index k,
                                     Index m, Rng& rng, const CorrectedOptions& options = {});

// --- Full pipeline for the unbiased case.

struct SynthesisTimings {
  double whiten = 0.0;
  double index = 0.0;
  double fit = 0.0;
  double sample = 0.0;
};

struct SynthesisResult {
  PointSetd points;
  SynthesisTimings timings;
};

//! Whitens `x` by its own statistics, runs cfg.method (not KnnRexCorrected),
//! maps the l outputs back to original units and optionally rounds them.
//! Randomness comes only from cfg.seed.
SynthesisResult synthesize(const PointSetd& x, const EstimatorConfig& cfg, Index l);

}  // namespace knnrex
