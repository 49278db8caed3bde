#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "tmr/graph.hpp"
#include "tmr/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace tmr;

TEST_CASE("knn on collinear points with tie") {
  Matrix x(1, 3);
  x << 0, 1, 2;
  const NeighborList nbrs = knn(x, 1);
  CHECK(nbrs[0] == IndexList{1});
  CHECK(nbrs[1] == IndexList{0});  // tie between 0 and 2 resolves to index 0
  CHECK(nbrs[2] == IndexList{1});
}

TEST_CASE("knn picks exact duplicates") {
  Matrix x(2, 4);
  x << 0, 0, 5, 9, 0, 0, 5, 9;
  const NeighborList nbrs = knn(x, 1);
  CHECK(nbrs[0] == IndexList{1});
  CHECK(nbrs[1] == IndexList{0});
}

TEST_CASE("knn matches exhaustive sort oracle") {
  Rng rng(19);
  const Matrix x = oracle::random_matrix(rng, 3, 20);
  const NeighborList nbrs = knn(x, 7);
  for (Index j = 0; j < 20; ++j) {
    std::vector<std::pair<Scalar, Index>> all;
    for (Index i = 0; i < 20; ++i) {
      if (i == j) continue;
      Scalar d2 = 0.0;
      for (Index r = 0; r < 3; ++r) {
        d2 += (x(r, i) - x(r, j)) * (x(r, i) - x(r, j));
      }
      all.emplace_back(d2, i);
    }
    std::sort(all.begin(), all.end());
    for (int k = 0; k < 7; ++k) {
      CHECK(nbrs[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] == all[static_cast<std::size_t>(k)].second);
    }
  }
}

TEST_CASE("knn permutation equivariance") {
  Rng rng(29);
  const Matrix x = oracle::random_matrix(rng, 2, 9);
  const NeighborList base = knn(x, 3);

  // Reverse the sample order.
  Matrix xr(2, 9);
  for (Index j = 0; j < 9; ++j) xr.col(j) = x.col(8 - j);
  const NeighborList rev = knn(xr, 3);
  for (Index j = 0; j < 9; ++j) {
    for (int k = 0; k < 3; ++k) {
      CHECK(rev[static_cast<std::size_t>(8 - j)][static_cast<std::size_t>(k)] ==
            8 - base[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
    }
  }
}

TEST_CASE("knn requires enough points") {
  CHECK_THROWS_AS(knn(Matrix::Zero(2, 3), 3), TooFewPoints);
}

TEST_CASE("lle_weights midpoint splits evenly") {
  Matrix x(1, 3);
  x << -1, 0, 1;
  NeighborList nbrs{{1}, {0, 2}, {1}};
  const Matrix w = lle_weights(x, nbrs, 1e-6);
  CHECK(w(0, 1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w(2, 1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("lle_weights coincident neighbor wins as reg vanishes") {
  Matrix x(2, 3);
  x << 0, 0, 3, 0, 0, 4;
  NeighborList nbrs{{1, 2}, {0, 2}, {0, 1}};
  for (Scalar reg : {1e-4, 1e-6, 1e-8}) {
    const Matrix w = lle_weights(x, nbrs, reg);
    if (reg <= 1e-8) CHECK(w(1, 0) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("lle_weights residual matches constrained least squares oracle") {
  Rng rng(37);
  const Matrix x = oracle::random_matrix(rng, 2, 8);
  const NeighborList nbrs = knn(x, 3);
  const Matrix w = lle_weights(x, nbrs, 0.0);

  for (Index j = 0; j < 8; ++j) {
    Vector recon = Vector::Zero(2);
    for (Index i = 0; i < 8; ++i) recon += w(i, j) * x.col(i);
    const Scalar residual = (x.col(j) - recon).squaredNorm();

    // Oracle: parameterize the sum-to-one set as w = w0 + Z theta with
    // Z spanning {z : sum z = 0}, solve the 2-dof normal equations by loops.
    const IndexList& nb = nbrs[static_cast<std::size_t>(j)];
    Matrix cols(2, 3);
    for (int i = 0; i < 3; ++i) cols.col(i) = x.col(nb[static_cast<std::size_t>(i)]);
    const Vector base = (cols.col(0) + cols.col(1) + cols.col(2)) / 3.0;
    Matrix z(2, 2);
    z.col(0) = cols.col(0) - cols.col(2);
    z.col(1) = cols.col(1) - cols.col(2);
    const Vector rhs = z.transpose() * (x.col(j) - base);
    const Matrix gram = z.transpose() * z;
    const Vector theta = gram.fullPivLu().solve(rhs);
    const Scalar oracle_residual = (x.col(j) - base - z * theta).squaredNorm();
    CHECK(residual == doctest::Approx(oracle_residual).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("lle_weights constraints") {
  Rng rng(41);
  const Matrix x = oracle::random_matrix(rng, 5, 20);
  const Matrix w = lle_weights(x, knn(x, 7), 1e-3);
  for (Index j = 0; j < 20; ++j) {
    CHECK(w.col(j).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(w(j, j) == 0.0);
  }
}

TEST_CASE("symmetrize") {
  Matrix w(2, 2);
  w << 0, 1, 0, 0;
  Matrix s = symmetrize(w);
  CHECK(s(0, 1) == doctest::Approx(0.5));
  CHECK(s(1, 0) == doctest::Approx(0.5));
  CHECK(s(0, 0) == 0.0);

  Matrix sym(3, 3);
  sym << 2, 1, 0, 1, 2, 3, 0, 3, 2;
  const Matrix out = symmetrize(sym);
  CHECK(out(0, 0) == 0.0);  // diagonal zeroed
  CHECK(out(0, 1) == doctest::Approx(1.0));

  Rng rng(43);
  const Matrix r = oracle::random_matrix(rng, 6, 6);
  const Matrix sr = symmetrize(r);
  CHECK((sr - sr.transpose()).norm() == doctest::Approx(0.0));
}

TEST_CASE("laplacian examples") {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  Matrix l = laplacian(w, false);
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(0, 1) == doctest::Approx(-1.0));

  const Matrix ln = laplacian(w, true);
  CHECK((ln - l).norm() < 1e-12);  // unit degrees coincide
}

TEST_CASE("laplacian row sums vanish") {
  Rng rng(47);
  Matrix w = oracle::random_matrix(rng, 7, 7).cwiseAbs();
  w = symmetrize(w);
  const Matrix l = laplacian(w, false);
  for (Index i = 0; i < 7; ++i) {
    CHECK(std::abs(l.row(i).sum()) < 1e-12);
  }
}

TEST_CASE("laplacian positive semidefinite") {
  Rng rng(53);
  Matrix w = oracle::random_matrix(rng, 8, 8).cwiseAbs();
  w = symmetrize(w);
  const Matrix l = laplacian(w, false);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = oracle::random_matrix(rng, 8, 1);
    CHECK(v.dot(l * v) >= -1e-10);
  }
}

TEST_CASE("normalized laplacian maps zero-degree rows to identity rows") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 2.0;
  const Matrix l = laplacian(w, true);
  CHECK(l(2, 2) == doctest::Approx(1.0));
  CHECK(l(2, 0) == 0.0);
  CHECK(l(2, 1) == 0.0);
  CHECK(l(0, 1) == doctest::Approx(-1.0));
}
