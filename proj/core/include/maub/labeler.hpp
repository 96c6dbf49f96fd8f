#pragma once

// Frame-level pseudo-labels: mini-batch k-means, frequent feature vectors,
// frequent phones and the full observed phone inventory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "maub/matrix.hpp"
#include "maub/phoneset.hpp"

namespace maub {

struct LabelSequence {
  std::string utterance;
  std::vector<std::int32_t> labels;
  std::size_t space_size = 0;
};

// `utt_id<TAB>l0 l1 l2 ...`, one utterance per line. The label space size is
// not stored; readers get max label + 1.
void write_labels(std::ostream& out, std::span<const LabelSequence> sequences);
std::vector<LabelSequence> parse_labels(std::istream& in);
std::vector<LabelSequence> load_labels(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// K-means

struct ClusterModel {
  RepresentationMatrix centroids;     // K x d
  std::vector<double> inertia_history;  // full-data mean squared distance after each epoch

  std::size_t k() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
};

struct KMeansOptions {
  std::size_t k = 100;
  std::size_t batch_size = 10000;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::size_t init_size = 0;  // k-means++ sample size; 0 = max(3 * batch_size, 3 * k)
};

// k-means++ seeding on a random sample, then per-batch nearest-centroid
// assignment and per-centroid running-mean updates. Clusters that drew no
// point during an epoch are reseeded with the points of its last batch
// farthest from their centroids. Throws kTooFewPoints when the frames number fewer than k.
ClusterModel minibatch_kmeans(std::span<const FrameSlice> frames, const KMeansOptions& options);

// Mean squared distance of the frames to their nearest centroid.
double kmeans_inertia(const ClusterModel& model, std::span<const FrameSlice> frames);

// Nearest centroid in squared Euclidean distance, lowest index on ties.
std::int32_t nearest_centroid(const RepresentationMatrix& centroids, std::span<const float> frame);
// Throws kDimensionMismatch.
LabelSequence assign_kmeans(const ClusterModel& model, const RepresentationMatrix& frames,
                            std::string utterance = {});

// Centroids as a MAUB matrix plus `<path>.meta` holding k, dim and the
// inertia history.
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Frequent feature vectors

struct FeatureCodebook {
  std::vector<FeatureVector> entries;  // most frequent first
  std::vector<std::uint64_t> counts;
  bool saturated = false;  // fewer distinct vectors than requested

  std::size_t size() const { return entries.size(); }
};

// Sign split: values > 0 become '+', everything else '-'.
FeatureVector hard_threshold(std::span<const float> values);

// Frequency ties are broken by the + < 0 < - lexicographic order.
FeatureCodebook top_frequent_vectors(std::span<const FeatureVector> frames, std::size_t k);

// Closest entry in l1; ties prefer fewer zero-valued features, then the
// lowest index. Throws kEmptyCodebook, kDimensionMismatch.
std::int32_t assign_feature_codebook(const FeatureCodebook& codebook, const FeatureVector& v);

// One `<vector><TAB><count>` line per entry.
void write_codebook(std::ostream& out, const FeatureCodebook& codebook);
FeatureCodebook parse_codebook(std::istream& in);

// ---------------------------------------------------------------------------
// Phone labels

// The k most frequent classes over all frames (negative labels ignored),
// most frequent first, ties by class id. Throws kEmptyInput.
std::vector<ClassId> top_frequent_phones(std::span<const LabelSequence> frame_labels, std::size_t k);

// Every class seen in the labels, ascending. Throws kEmptyInput.
std::vector<ClassId> observed_phones(std::span<const LabelSequence> frame_labels);

// Dense relabeling onto an allowed class list: an allowed class maps to its
// position; any other class (and silence, as the all-zero vector) maps to
// the allowed class nearest in feature l1 with the codebook tie chain.
class PhoneRelabeler {
 public:
  PhoneRelabeler(std::vector<ClassId> allowed, const CollapsedTable& table);

  std::int32_t map(ClassId c) const;
  std::size_t space_size() const { return allowed_.size(); }
  const std::vector<ClassId>& allowed() const { return allowed_; }

  LabelSequence apply(const LabelSequence& labels) const;

 private:
  std::vector<ClassId> allowed_;
  std::vector<std::int32_t> by_class_;
  std::int32_t silence_ = 0;
};

// Throws kEmptyInput on an empty label sequence.
LabelSequence restrict_phone_set(const LabelSequence& labels, const std::vector<ClassId>& allowed,
                                 const CollapsedTable& table);

}  // namespace maub
