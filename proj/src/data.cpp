#include "tmr/data.hpp"

#include "tmr/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

namespace tmr {

namespace {

std::string format_double(Scalar v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void validate_labels(const Dataset& d) {
  if (d.x.cols() == 0) {
    throw ValidationError("dataset: no samples");
  }
  if (static_cast<Index>(d.labels.size()) != d.x.cols()) {
    throw DimensionMismatch("dataset: label count mismatch");
  }
  for (Index l : d.labels) {
    if (l < 0 || l >= d.class_count) {
      throw LabelError("dataset: class index out of range");
    }
  }
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("load_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path, 1, 1, "missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw ParseError(path, 1, static_cast<long>(header.size()), "header must end with 'label'");
  }
  const std::size_t n_features = header.size() - 1;
  for (std::size_t i = 0; i < n_features; ++i) {
    if (header[i] != "feature_" + std::to_string(i)) {
      throw ParseError(path, 1, static_cast<long>(i + 1), "expected column feature_" + std::to_string(i));
    }
  }

  std::vector<std::vector<Scalar>> rows;
  std::vector<long long> raw_labels;
  long row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path, row_no, static_cast<long>(fields.size()),
                       "expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<Scalar> values(n_features);
    for (std::size_t i = 0; i < n_features; ++i) {
      const std::string& s = fields[i];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), values[i]);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(path, row_no, static_cast<long>(i + 1), "bad number '" + s + "'");
      }
    }
    const std::string& ls = fields.back();
    long long label = 0;
    const auto res = std::from_chars(ls.data(), ls.data() + ls.size(), label);
    if (res.ec != std::errc() || res.ptr != ls.data() + ls.size()) {
      throw LabelError(path + ":" + std::to_string(row_no) + ": non-integer label '" + ls + "'");
    }
    rows.push_back(std::move(values));
    raw_labels.push_back(label);
  }
  if (rows.empty()) {
    throw ParseError(path, row_no, 1, "no data rows");
  }

  // Dense remap in ascending order of original value.
  std::map<long long, Index> remap;
  for (long long v : raw_labels) remap.emplace(v, 0);
  Index next = 0;
  std::vector<long long> label_values;
  for (auto& [value, idx] : remap) {
    idx = next++;
    label_values.push_back(value);
  }

  Dataset d;
  d.x.resize(static_cast<Index>(n_features), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < n_features; ++i) {
      d.x(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
    }
  }
  d.labels.reserve(raw_labels.size());
  for (long long v : raw_labels) d.labels.push_back(remap[v]);
  d.class_count = next;
  d.label_values = std::move(label_values);
  d.name = path;
  validate_labels(d);
  return d;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("save_csv: cannot open " + path);
  }
  for (Index i = 0; i < dataset.x.rows(); ++i) {
    out << "feature_" << i << ',';
  }
  out << "label\n";
  for (Index j = 0; j < dataset.x.cols(); ++j) {
    for (Index i = 0; i < dataset.x.rows(); ++i) {
      out << format_double(dataset.x(i, j)) << ',';
    }
    const Index cls = dataset.labels[static_cast<std::size_t>(j)];
    const long long value =
        dataset.label_values.empty() ? cls : dataset.label_values[static_cast<std::size_t>(cls)];
    out << value << '\n';
  }
  if (!out) {
    throw ValidationError("save_csv: write failed for " + path);
  }
}

Dataset load_tmr1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("load_tmr1: cannot open " + path);
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TMR1", 4) != 0) {
    throw ParseError(path, 0, 0, "bad magic, expected TMR1");
  }
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) {
    throw ParseError(path, 0, 0, "truncated header");
  }
  const Index n = dims[0], cols = dims[1], classes = dims[2];
  Dataset d;
  d.x.resize(n, cols);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw ParseError(path, 0, 0, "truncated data block");
      d.x(i, j) = v;
    }
  }
  d.labels.resize(static_cast<std::size_t>(cols));
  for (Index j = 0; j < cols; ++j) {
    std::uint32_t l;
    in.read(reinterpret_cast<char*>(&l), sizeof(l));
    if (!in) throw ParseError(path, 0, 0, "truncated label block");
    d.labels[static_cast<std::size_t>(j)] = static_cast<Index>(l);
  }
  d.class_count = classes;
  d.name = path;
  validate_labels(d);
  return d;
}

void save_tmr1(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("save_tmr1: cannot open " + path);
  }
  out.write("TMR1", 4);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(dataset.x.rows()),
                                 static_cast<std::uint32_t>(dataset.x.cols()),
                                 static_cast<std::uint32_t>(dataset.class_count)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Index i = 0; i < dataset.x.rows(); ++i) {
    for (Index j = 0; j < dataset.x.cols(); ++j) {
      const double v = dataset.x(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  for (Index l : dataset.labels) {
    const std::uint32_t v = static_cast<std::uint32_t>(l);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  if (!out) {
    throw ValidationError("save_tmr1: write failed for " + path);
  }
}

Dataset synth_blobs(Index classes, Index per_class, Index dim, Scalar separation,
                    Scalar noise_sigma, std::uint64_t seed) {
  if (classes < 2) {
    throw ValidationError("synth_blobs: need at least 2 classes");
  }
  if (classes > dim) {
    throw ValidationError("synth_blobs: need dim >= classes for orthogonal centers");
  }
  if (per_class < 1) {
    throw ValidationError("synth_blobs: per_class must be >= 1");
  }
  Rng rng(seed);
  Dataset d;
  d.x.resize(dim, classes * per_class);
  d.labels.resize(static_cast<std::size_t>(classes * per_class));
  Index col = 0;
  for (Index c = 0; c < classes; ++c) {
    for (Index s = 0; s < per_class; ++s, ++col) {
      for (Index i = 0; i < dim; ++i) {
        d.x(i, col) = (i == c ? separation : 0.0) + noise_sigma * rng.normal();
      }
      d.labels[static_cast<std::size_t>(col)] = c;
    }
  }
  d.class_count = classes;
  d.name = "blobs";
  return d;
}

Dataset synth_two_moons(Index n, Scalar noise, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) {
    throw ValidationError("synth_two_moons: n must be even and >= 2");
  }
  const Index half = n / 2;
  Rng rng(seed);
  Dataset d;
  d.x.resize(2, n);
  d.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < half; ++i) {
    const Scalar t =
        half > 1 ? std::numbers::pi * static_cast<Scalar>(i) / static_cast<Scalar>(half - 1) : 0.0;
    d.x(0, i) = std::cos(t) + noise * rng.normal();
    d.x(1, i) = std::sin(t) + noise * rng.normal();
    d.labels[static_cast<std::size_t>(i)] = 0;
    d.x(0, half + i) = 1.0 - std::cos(t) + noise * rng.normal();
    d.x(1, half + i) = 0.5 - std::sin(t) + noise * rng.normal();
    d.labels[static_cast<std::size_t>(half + i)] = 1;
  }
  d.class_count = 2;
  d.name = "two_moons";
  return d;
}

std::pair<IndexList, IndexList> split(const IndexList& labels, const SplitSpec& spec) {
  if (spec.labeled_per_class < 1) {
    throw ValidationError("split: labeled_per_class must be >= 1");
  }
  Index classes = 0;
  for (Index l : labels) classes = std::max(classes, l + 1);
  std::vector<IndexList> by_class(static_cast<std::size_t>(classes));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    by_class[static_cast<std::size_t>(labels[j])].push_back(static_cast<Index>(j));
  }

  Rng rng(spec.seed);
  std::vector<bool> is_labeled(labels.size(), false);
  for (Index c = 0; c < classes; ++c) {
    IndexList& members = by_class[static_cast<std::size_t>(c)];
    if (static_cast<Index>(members.size()) <= spec.labeled_per_class) {
      throw ClassTooSmall("split: class " + std::to_string(c) + " has " +
                          std::to_string(members.size()) + " members, need more than " +
                          std::to_string(spec.labeled_per_class));
    }
    rng.shuffle(members);
    for (Index i = 0; i < spec.labeled_per_class; ++i) {
      is_labeled[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = true;
    }
  }

  IndexList labeled, unlabeled;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    (is_labeled[j] ? labeled : unlabeled).push_back(static_cast<Index>(j));
  }
  return {labeled, unlabeled};
}

Matrix one_hot_Y(const IndexList& labels, const IndexList& labeled_idx, Index classes) {
  Matrix y = Matrix::Zero(classes, static_cast<Index>(labels.size()));
  for (Index j : labeled_idx) {
    if (j < 0 || j >= y.cols()) {
      throw ValidationError("one_hot_Y: labeled index out of range");
    }
    const Index c = labels[static_cast<std::size_t>(j)];
    if (c < 0 || c >= classes) {
      throw LabelError("one_hot_Y: class index out of range");
    }
    y(c, j) = 1.0;
  }
  return y;
}

Vector build_U(const IndexList& labeled_idx, Index n, Scalar u_labeled, Scalar u_unlabeled) {
  if (u_labeled < 0.0 || u_unlabeled < 0.0) {
    throw ValidationError("build_U: weights must be >= 0");
  }
  Vector u = Vector::Constant(n, u_unlabeled);
  for (Index j : labeled_idx) {
    if (j < 0 || j >= n) {
      throw ValidationError("build_U: labeled index out of range");
    }
    u[j] = u_labeled;
  }
  return u;
}

Matrix corrupt_gaussian(const Matrix& x, const IndexList& labeled_idx,
                        const CorruptionSpec& spec) {
  if (spec.variance < 0.0 || spec.fraction_of_labeled < 0.0 ||
      spec.fraction_of_labeled > 1.0) {
    throw ValidationError("corrupt_gaussian: bad spec");
  }
  Matrix out = x;
  const Index count = static_cast<Index>(
      std::llround(spec.fraction_of_labeled * static_cast<Scalar>(labeled_idx.size())));
  if (count == 0 || spec.variance == 0.0) {
    return out;
  }
  Rng rng(spec.seed);
  IndexList pool = labeled_idx;
  rng.shuffle(pool);
  const Scalar sigma = std::sqrt(spec.variance);
  for (Index i = 0; i < count; ++i) {
    const Index j = pool[static_cast<std::size_t>(i)];
    for (Index r = 0; r < out.rows(); ++r) {
      out(r, j) += sigma * rng.normal();
    }
  }
  return out;
}

Matrix random_projection(const Matrix& x, Index d, std::uint64_t seed) {
  if (d < 1) {
    throw ValidationError("random_projection: d must be >= 1");
  }
  Rng rng(seed);
  Matrix r(d, x.rows());
  const Scalar scale = 1.0 / std::sqrt(static_cast<Scalar>(d));
  for (Index i = 0; i < r.rows(); ++i) {
    for (Index j = 0; j < r.cols(); ++j) {
      r(i, j) = scale * rng.normal();
    }
  }
  return r * x;
}

Matrix pca_reduce(const Matrix& x, Index d) {
  if (d < 1 || d > std::min(x.rows(), x.cols())) {
    throw ValidationError("pca_reduce: d must be in [1, min(n, N)]");
  }
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  Matrix scatter = centered * centered.transpose();
  scatter = 0.5 * (scatter + scatter.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("pca_reduce: eigendecomposition failed");
  }
  // Eigen returns ascending eigenvalues; take the top d in descending order
  // and fix each sign by its largest-magnitude entry.
  Matrix basis(x.rows(), d);
  for (Index k = 0; k < d; ++k) {
    Vector v = eig.eigenvectors().col(x.rows() - 1 - k);
    Index arg = 0;
    for (Index i = 1; i < v.size(); ++i) {
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0.0) v = -v;
    basis.col(k) = v;
  }
  return basis.transpose() * centered;
}

}  // namespace tmr
