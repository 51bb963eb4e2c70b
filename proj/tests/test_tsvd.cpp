#include "support/oracles.hpp"

#include <tsvd/synthetic.hpp>
#include <tsvd/tsvd.hpp>

#include <gtest/gtest.h>

using namespace tsvd;

namespace {

void expect_valid_factors(const Tensor& m, const TSvdFactors& f) {
  EXPECT_TRUE(is_orthogonal(f.U, 1e-9));
  EXPECT_TRUE(is_orthogonal(f.V, 1e-9));
  for (std::size_t s = 0; s < f.spectral_S.slice_count(); ++s) {
    const auto slice = f.spectral_S.slice(s);
    for (Eigen::Index j = 0; j < slice.cols(); ++j) {
      for (Eigen::Index i = 0; i < slice.rows(); ++i) {
        if (i != j) {
          EXPECT_EQ(slice(i, j), Complex(0.0));
        }
      }
    }
    const Eigen::VectorXcd d = slice.diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      EXPECT_EQ(d(i).imag(), 0.0);
      EXPECT_GE(d(i).real(), 0.0);
      if (i > 0) {
        EXPECT_LE(d(i).real(), d(i - 1).real());
      }
    }
  }
  const Tensor rebuilt = t_product(t_product(f.U, f.S), transpose(f.V));
  EXPECT_LE(frobenius(rebuilt - m), 1e-9 * frobenius(m));
}

} // namespace

TEST(TSvd, RandomFactorsSatisfyContract) {
  oracle::Gen gen(101);
  const Tensor m = gen.tensor({8, 6, 4});
  const TSvdFactors f = t_svd(m);
  expect_valid_factors(m, f);
  EXPECT_LE(relative_error(reconstruct(f), m), 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    const Tensor r = gen.tensor({gen.extent(1, 9), gen.extent(1, 9), gen.extent(1, 8)});
    expect_valid_factors(r, t_svd(r));
  }
}

TEST(TSvd, OrderFour) {
  oracle::Gen gen(103);
  const Tensor m = gen.tensor({8, 8, 4, 3});
  expect_valid_factors(m, t_svd(m));
}

TEST(TSvd, IdentityInput) {
  const Tensor eye = identity(4, 5);
  const TSvdFactors f = t_svd(eye);
  EXPECT_LE(max_abs_diff(f.S, eye), 1e-12);
  EXPECT_EQ(tubal_rank(f), 4u);
}

TEST(TSvd, ZeroInputGivesIdentityFactors) {
  const Tensor zero({3, 2, 4});
  const TSvdFactors f = t_svd(zero);
  EXPECT_EQ(f.S, zero);
  EXPECT_EQ(f.U, identity(3, 4));
  EXPECT_EQ(f.V, identity(2, 4));
}

TEST(TSvd, RejectsNonFinite) {
  Tensor m({2, 2, 2});
  m[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(t_svd(m), ContractError);
}

TEST(Truncate, FullRankReturnsInput) {
  oracle::Gen gen(107);
  const Tensor m = gen.tensor({5, 7, 6});
  EXPECT_LE(relative_error(truncate(t_svd(m), 5), m), 1e-10);
  EXPECT_THROW(truncate(t_svd(m), 0), ContractError);
  EXPECT_THROW(truncate(t_svd(m), 6), ContractError);
}

TEST(Truncate, RankOneSynthetic) {
  oracle::Gen gen(109);
  const Tensor u = gen.tensor({6, 1, 5});
  const Tensor s = gen.tensor({1, 1, 5});
  const Tensor v = gen.tensor({4, 1, 5});
  const Tensor m = t_product(t_product(u, s), transpose(v));
  EXPECT_LE(relative_error(truncate(t_svd(m), 1), m), 1e-9);
}

TEST(Truncate, ErrorMonotoneAndEnergyIdentity) {
  oracle::Gen gen(113);
  const Tensor m = gen.tensor({6, 5, 7});
  const TSvdFactors f = t_svd(m);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 5; ++k) {
    const double err2 = std::pow(frobenius(m - truncate(f, k)), 2);
    EXPECT_LE(err2, previous * (1.0 + 1e-12));
    previous = err2;
    const double predicted = discarded_energy(f, k);
    EXPECT_NEAR(err2, predicted, 1e-8 * std::max(predicted, 1e-300) + 1e-20);
  }
}

TEST(Truncate, BeatsRandomProductsOfSameInnerExtent) {
  oracle::Gen gen(127);
  const Tensor m = gen.tensor({6, 6, 4});
  const TSvdFactors f = t_svd(m);
  for (std::size_t k = 1; k < 6; ++k) {
    const double best = frobenius(m - truncate(f, k));
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor c = t_product(gen.tensor({6, k, 4}), gen.tensor({k, 6, 4}));
      // Compare against the best scalar multiple of the random product too.
      double scale = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        scale += c[i] * m[i];
      }
      scale /= std::pow(frobenius(c), 2);
      EXPECT_LE(best, frobenius(m - c));
      EXPECT_LE(best, frobenius(m - scale * c));
    }
  }
}

TEST(MultiRank, Examples) {
  EXPECT_EQ(multi_rank(Tensor({3, 3, 4})).ranks, (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_EQ(multi_rank(identity(3, 4)).ranks, (std::vector<std::size_t>{3, 3, 3, 3}));

  oracle::Gen gen(131);
  const Matrix<double> a = Matrix<double>::NullaryExpr(5, 2, [&] { return gen.normal(); }) *
                           Matrix<double>::NullaryExpr(2, 4, [&] { return gen.normal(); });
  Tensor constant({5, 4, 6});
  for (std::size_t s = 0; s < 6; ++s) {
    constant.slice(s) = a;
  }
  EXPECT_EQ(multi_rank(constant).ranks, (std::vector<std::size_t>{2, 0, 0, 0, 0, 0}));
}

TEST(MultiRank, BoundedByMinExtent) {
  oracle::Gen gen(137);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor m = gen.tensor({gen.extent(1, 6), gen.extent(1, 6), gen.extent(1, 6)});
    const auto r = multi_rank(m);
    EXPECT_EQ(r.ranks.size(), m.dim(2));
    for (auto v : r.ranks) {
      EXPECT_LE(v, std::min(m.rows(), m.cols()));
    }
    EXPECT_LE(tubal_rank(m), std::min(m.rows(), m.cols()));
  }
}

TEST(TubalRank, Examples) {
  EXPECT_EQ(tubal_rank(Tensor({3, 4, 2})), 0u);
  EXPECT_EQ(tubal_rank(identity(5, 3)), 5u);
  for (std::size_t r = 1; r <= 4; ++r) {
    EXPECT_EQ(tubal_rank(low_tubal_rank({20, 20, 6}, r, 1000 + r), 1e-8), r);
  }
}

TEST(Tnn, Examples) {
  EXPECT_EQ(tnn(Tensor({3, 3, 3})), 0.0);

  oracle::Gen gen(139);
  const Matrix<double> a = Matrix<double>::NullaryExpr(4, 3, [&] { return gen.normal(); });
  Tensor constant({4, 3, 5});
  for (std::size_t s = 0; s < 5; ++s) {
    constant.slice(s) = a;
  }
  const double want = 5.0 * oracle::nuclear_norm(a);
  EXPECT_NEAR(tnn(constant), want, 1e-10 * want);
}

TEST(Tnn, MatchesBlockDiagonalNuclearNorm) {
  oracle::Gen gen(149);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor m = gen.tensor({gen.extent(1, 6), gen.extent(1, 6), gen.extent(1, 6)});
    const double want = oracle::nuclear_norm(oracle::blkdiag(oracle::direct_dft(m)));
    EXPECT_NEAR(tnn(m), want, 1e-10 * want);
  }
}

TEST(Ttn, Examples) {
  EXPECT_EQ(ttn(Tensor({3, 3, 3})), 0.0);
  EXPECT_NEAR(ttn(identity(4, 6)), 4.0, 1e-12);

  oracle::Gen gen(151);
  const Tensor m = gen.tensor({4, 5, 3});
  EXPECT_NEAR(ttn(2.5 * m), 2.5 * ttn(m), 1e-10 * ttn(m));
  EXPECT_EQ(ttn(0.0 * m), 0.0);
}
