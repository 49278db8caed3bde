#pragma once

#include "tmr/errors.hpp"
#include "tmr/types.hpp"

#include <cstdint>
#include <string>

namespace tmr {

// Samples are columns everywhere: X is n x N. CSV files carry one sample per
// row and are transposed on load.
struct Dataset {
  Matrix x;           // n x N
  IndexList labels;   // N class indices in [0, class_count)
  Index class_count = 0;
  std::string name;
  // Original label values, one per dense class index (load_csv remaps
  // arbitrary integer labels to [0, c)).
  std::vector<long long> label_values;
};

struct SplitSpec {
  Index labeled_per_class = 1;
  std::uint64_t seed = 0;
};

struct CorruptionSpec {
  Scalar variance = 0.0;             // absolute feature units
  Scalar fraction_of_labeled = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
};

// CSV with header feature_0,...,feature_{n-1},label; one sample per row.
// Labels must be integers and are remapped to dense [0, c) in ascending
// order of value. Parse failures carry the file position.
Dataset load_csv(const std::string& path);

// Inverse of load_csv; numbers are written with shortest round-trip
// precision, so a reload is bit-identical.
void save_csv(const Dataset& dataset, const std::string& path);

// Single-file binary container: magic "TMR1", little-endian u32 n, N, c,
// row-major doubles of X, then N u32 labels.
Dataset load_tmr1(const std::string& path);
void save_tmr1(const Dataset& dataset, const std::string& path);

// Gaussian blobs: class k centered at separation * e_k (requires c <= dim),
// isotropic noise_sigma, per_class samples per class in class-major order.
Dataset synth_blobs(Index classes, Index per_class, Index dim, Scalar separation,
                    Scalar noise_sigma, std::uint64_t seed);

// Two interleaved half-circles, n/2 points each (n even), Gaussian noise.
Dataset synth_two_moons(Index n, Scalar noise, std::uint64_t seed);

// Uniform per-class sample of exactly labeled_per_class labeled indices;
// returns (labeled, unlabeled), both ascending, a disjoint cover of [0, N).
// Throws ClassTooSmall when a class has <= labeled_per_class members.
std::pair<IndexList, IndexList> split(const IndexList& labels, const SplitSpec& spec);

// c x N matrix with one-hot labeled columns and zero unlabeled columns.
Matrix one_hot_Y(const IndexList& labels, const IndexList& labeled_idx, Index classes);

// Fitness diagonal: u_labeled at labeled indices, u_unlabeled elsewhere.
Vector build_U(const IndexList& labeled_idx, Index n, Scalar u_labeled,
               Scalar u_unlabeled);

// Adds N(0, variance) i.i.d. noise to a seeded random subset of the labeled
// columns (round(fraction * |labeled|) of them); all other columns are
// returned bit-identical.
Matrix corrupt_gaussian(const Matrix& x, const IndexList& labeled_idx,
                        const CorruptionSpec& spec);

// R x X with R (d x n) i.i.d. N(0, 1/d), seeded.
Matrix random_projection(const Matrix& x, Index d, std::uint64_t seed);

// Centered data projected onto the top-d eigendirections of the scatter
// matrix, descending eigenvalue order, each direction's largest-magnitude
// entry made positive.
Matrix pca_reduce(const Matrix& x, Index d);

}  // namespace tmr
