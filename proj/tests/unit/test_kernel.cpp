// Copyright 2026 The mtdpp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "mtdpp/error.hpp"
#include "mtdpp/kernel.hpp"
#include "mtdpp/rng.hpp"

using namespace mtdpp;

namespace {

RowMatrix random_factors(Eigen::Index p, Eigen::Index r, Rng& rng) {
  RowMatrix v(p, r);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal(0.0, 1.0);
  return v;
}

Eigen::MatrixXd random_psd(Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal(0.0, 1.0);
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(k, k);
}

}  // namespace

TEST_CASE("zero factors leave only the squared bias") {
  RowMatrix v = RowMatrix::Zero(2, 3);
  Eigen::VectorXd d(2);
  d << 2, 3;
  FactorizedKernel kernel(v, d);
  const IndexSet items{0, 1};
  Eigen::MatrixXd m = build_submatrix(kernel, items);
  CHECK(m(0, 0) == 4.0);
  CHECK(m(1, 1) == 9.0);
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 0) == 0.0);
}

TEST_CASE("identical latent rows without bias have zero pair determinant") {
  RowMatrix v(2, 1);
  v << 1, 1;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2);
  FactorizedKernel kernel(v, d);
  const IndexSet items{0, 1};
  Eigen::MatrixXd m = build_submatrix(kernel, items);
  CHECK(m == Eigen::MatrixXd::Ones(2, 2));
  CHECK(determinant(m) == doctest::Approx(0.0));
  CHECK(submatrix_determinant(kernel, items) == 0.0);
}

TEST_CASE("task submatrix matches the triple-loop oracle") {
  Rng rng(11);
  RowMatrix v = random_factors(6, 3, rng);
  Eigen::VectorXd d(6);
  for (auto& x : d) x = rng.normal(1.0, 0.3);
  std::vector<double> r{0.7, 1.3, -0.4};
  FactorizedKernel kernel(v, d, r);
  const IndexSet items{4, 1, 5, 2};
  Eigen::MatrixXd m = build_submatrix(kernel, items);
  for (Eigen::Index s = 0; s < 4; ++s)
    for (Eigen::Index t = 0; t < 4; ++t)
      CHECK(std::abs(m(s, t) - oracle::kernel_entry(v, d, r, items[s], items[t])) <= 1e-12);
  CHECK(m.isApprox(m.transpose(), 0.0));
}

TEST_CASE("build_submatrix rejects bad index sets") {
  RowMatrix v = RowMatrix::Ones(3, 2);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(3);
  FactorizedKernel kernel(v, d);
  CHECK_THROWS_AS(build_submatrix(kernel, IndexSet{0, 3}), InputError);
  CHECK_THROWS_AS(build_submatrix(kernel, IndexSet{-1}), InputError);
  CHECK_THROWS_AS(build_submatrix(kernel, IndexSet{1, 1}), InputError);
  CHECK_THROWS_AS(build_submatrix(kernel, IndexSet{}), InputError);
  std::vector<double> short_task{1.0};
  CHECK_THROWS_AS(FactorizedKernel(v, d, short_task), InputError);
}

TEST_CASE("det_and_inverse on identity and diagonal matrices") {
  auto id = det_and_inverse(Eigen::MatrixXd::Identity(3, 3));
  CHECK(id.det == 1.0);
  CHECK(id.inverse == Eigen::MatrixXd::Identity(3, 3));
  CHECK_FALSE(id.jittered);

  Eigen::MatrixXd diag(2, 2);
  diag << 4, 0, 0, 9;
  auto res = det_and_inverse(diag);
  CHECK(res.det == doctest::Approx(36.0).epsilon(1e-15));
  CHECK(res.inverse(0, 0) == doctest::Approx(0.25));
  CHECK(res.inverse(1, 1) == doctest::Approx(1.0 / 9.0));
  CHECK(res.inverse(0, 1) == 0.0);
}

TEST_CASE("empty matrix has determinant one") {
  auto res = det_and_inverse(Eigen::MatrixXd(0, 0));
  CHECK(res.det == 1.0);
  CHECK(determinant(Eigen::MatrixXd(0, 0)) == 1.0);
}

TEST_CASE("determinant agrees with cofactor expansion") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.uniform_index(6));
    Eigen::MatrixXd m = random_psd(k, rng);
    auto res = det_and_inverse(m);
    const double expected = oracle::cofactor_det(m);
    CHECK(std::abs(res.det - expected) <= 1e-10 * std::abs(expected));
    CHECK_FALSE(res.jittered);
    CHECK(((m * res.inverse) - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("singular submatrix is jittered once") {
  RowMatrix v(3, 1);
  v << 1, 2, 3;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(3);
  FactorizedKernel kernel(v, d);
  // Rank one, 2x2: jitter makes det ~ 1e-10 * trace, above the threshold.
  auto res = det_and_inverse(build_submatrix(kernel, IndexSet{0, 1}));
  CHECK(res.jittered);
  CHECK(res.det > 0.0);
  CHECK(res.inverse.allFinite());
  // Rank one, 3x3: det ~ 1e-20 * trace, still singular.
  CHECK_THROWS_AS(det_and_inverse(build_submatrix(kernel, IndexSet{0, 1, 2})),
                  SingularKernelError);
}

TEST_CASE("large well-conditioned submatrix is not flagged singular") {
  Rng rng(11);
  RowMatrix v(60, 50);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal(0.0, 0.1);
  Eigen::VectorXd d = Eigen::VectorXd::Constant(60, 1.5);
  IndexSet items;
  for (ItemIndex i = 0; i < 20; ++i) items.push_back(3 * i);
  const auto matrix = build_submatrix(FactorizedKernel(v, d), items);
  const auto res = det_and_inverse(matrix);
  CHECK_FALSE(res.jittered);
  CHECK(res.det == doctest::Approx(matrix.determinant()).epsilon(1e-10));
}

TEST_CASE("non-finite input is rejected") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 1) = std::nan("");
  CHECK_THROWS_AS(det_and_inverse(m), InputError);
  CHECK_THROWS_AS(determinant(m), InputError);
}

TEST_CASE("kernel determinant properties") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index p = 8, r = 1 + static_cast<Eigen::Index>(rng.uniform_index(4));
    RowMatrix v = random_factors(p, r, rng);
    Eigen::VectorXd d(p);
    for (auto& x : d) x = trial % 2 ? 0.0 : rng.normal(0.0, 1.0);
    std::vector<double> task(static_cast<std::size_t>(r));
    for (auto& x : task) x = rng.normal(1.0, 0.5);
    FactorizedKernel kernel(v, d, task);

    IndexSet items{0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(std::span<ItemIndex>(items));
    items.resize(1 + static_cast<std::size_t>(rng.uniform_index(5)));

    // PSD up to round-off.
    const double det = determinant(build_submatrix(kernel, items));
    CHECK(det >= kDeterminantFloor * std::max(1.0, std::abs(det)));

    // Ordering of the index set does not matter.
    IndexSet reversed(items.rbegin(), items.rend());
    const double det_rev = determinant(build_submatrix(kernel, reversed));
    CHECK(std::abs(det - det_rev) <= 1e-10 * std::max(1.0, std::abs(det)));

    // 1x1 determinant is the weighted squared row norm plus D_i^2.
    const ItemIndex i = items.front();
    double expected = d[i] * d[i];
    for (Eigen::Index k = 0; k < r; ++k)
      expected += v(i, k) * v(i, k) * task[static_cast<std::size_t>(k)] *
                  task[static_cast<std::size_t>(k)];
    CHECK(determinant(build_submatrix(kernel, IndexSet{i})) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("duplicate latent rows repel") {
  Rng rng(3);
  RowMatrix v = random_factors(4, 3, rng);
  v.row(2) = v.row(1);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(4);
  FactorizedKernel kernel(v, d);
  const double det = determinant(build_submatrix(kernel, IndexSet{1, 2}));
  CHECK(std::abs(det) <= 1e-12 * v.row(1).squaredNorm() * v.row(1).squaredNorm());
}
