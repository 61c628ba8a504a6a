#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "actreg/continuum.hpp"
#include "actreg/errors.hpp"
#include "actreg/leverage.hpp"
#include "support.hpp"

using namespace actreg;

TEST_SUITE("continuum") {
  TEST_CASE("tau at the right endpoint is (d+1)^2/2 and tau is even") {
    for (Index d = 0; d <= 10; ++d) {
      LeverageDensity density{d, -1.0, 1.0};
      Real expected = 0.5 * (d + 1.0) * (d + 1.0);
      CHECK(std::abs(tau(density, 1.0) - expected) <= 1e-11 * expected);
      CHECK(std::abs(tau(density, 0.4) - tau(density, -0.4)) <= 1e-12);
    }
    CHECK_THROWS_AS(tau(LeverageDensity{3, -1.0, 1.0}, 1.01), OutOfDomain);
  }

  TEST_CASE("tau agrees with discrete leverage scores on a fine grid") {
    // A 2000-row monomial design on a midpoint grid approximates the
    // interval family; its leverage at a grid point times N/2 converges
    // to tau there (leverage scores do not care which polynomial basis
    // spans the columns).
    const Index n = 2000, d = 5;
    Matrix vand(n, d + 1);
    Vector grid(n);
    for (Index i = 0; i < n; ++i) {
      Real t = -1.0 + 2.0 * (i + 0.5) / n;
      grid(i) = t;
      Real pw = 1.0;
      for (Index j = 0; j <= d; ++j) {
        vand(i, j) = pw;
        pw *= t;
      }
    }
    Vector scores = leverage_scores(vand).scores;
    LeverageDensity density{d, -1.0, 1.0};
    for (Real probe : {0.3, -0.7, 0.05}) {
      Index row = static_cast<Index>(std::llround((probe + 1.0) * n / 2.0 - 0.5));
      Real discrete = scores(row) * n / 2.0;
      Real exact = tau(density, grid(row));
      CHECK(std::abs(discrete - exact) <= 0.01 * exact);
    }
  }

  TEST_CASE("tau mass over the whole interval is d+1") {
    for (Index d = 0; d <= 10; ++d) {
      LeverageDensity density{d, -1.0, 1.0};
      CHECK(std::abs(tau_mass(density, -1.0, 1.0) - (d + 1.0)) <= 1e-8);
    }
    // Affine domains scale the mass by the interval half-width.
    LeverageDensity wide{4, 2.0, 5.0};
    CHECK(std::abs(tau_mass(wide, 2.0, 5.0) - 5.0 * 1.5) <= 1e-8);
  }

  TEST_CASE("the sampling density integrates to one") {
    LeverageDensity density{6, -1.0, 1.0};
    Real total = 0.0;
    const int panels = 20000;
    const Real h = 2.0 / panels;
    for (int s = 0; s <= panels; ++s) {
      Real t = -1.0 + s * h;
      Real w = (s == 0 || s == panels) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
      total += w * h / 3.0 * density_pdf(density, t);
    }
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }

  TEST_CASE("partitions split the mass equally with exact endpoints") {
    LeverageDensity density{4, -1.0, 1.0};
    const Index k = 7;
    Vector bounds = build_partition(density, k);
    REQUIRE(bounds.size() == k + 1);
    CHECK(bounds(0) == -1.0);
    CHECK(bounds(k) == 1.0);
    Real target = 5.0 / k;
    for (Index c = 0; c < k; ++c) {
      CHECK(bounds(c + 1) > bounds(c));
      CHECK(std::abs(tau_mass(density, bounds(c), bounds(c + 1)) - target) <= 1e-8);
    }
  }

  TEST_CASE("partitions commute with affine domain maps") {
    LeverageDensity canon{5, -1.0, 1.0};
    LeverageDensity wide{5, 2.0, 6.0};
    Vector a = build_partition(canon, 9);
    Vector b = build_partition(wide, 9);
    for (Index i = 0; i <= 9; ++i)
      CHECK(std::abs(b(i) - wide.from_canonical(a(i))) <= 1e-9);
  }

  TEST_CASE("one point per cell, strictly inside, ascending") {
    LeverageDensity density{3, -1.0, 1.0};
    Vector bounds = build_partition(density, 12);
    ContinuumSampler sampler(density, bounds);
    CHECK(sampler.cells() == 12);
    RngState rng{70, 0, 0};
    for (int t = 0; t < 50; ++t) {
      Vector pts = sampler.sample(rng);
      REQUIRE(pts.size() == 12);
      for (Index c = 0; c < 12; ++c) {
        CHECK(pts(c) > bounds(c));
        CHECK(pts(c) < bounds(c + 1));
      }
    }
    RngState r1{8, 0, 0}, r2{8, 0, 0};
    Vector via_class = sampler.sample(r1);
    Vector via_wrapper = sample_continuum(density, bounds, r2);
    CHECK((via_class - via_wrapper).lpNorm<Eigen::Infinity>() == 0.0);
  }

  TEST_CASE("degree zero reduces to stratified uniform sampling") {
    // tau is constant, so cell offsets pooled across draws must be
    // uniform; Kolmogorov-Smirnov at alpha ~ 1e-3.
    LeverageDensity density{0, -1.0, 1.0};
    const Index k = 64;
    Vector bounds = build_partition(density, k);
    ContinuumSampler sampler(density, bounds);
    RngState rng{71, 0, 0};
    std::vector<Real> offsets;
    for (int t = 0; t < 200; ++t) {
      Vector pts = sampler.sample(rng);
      for (Index c = 0; c < k; ++c)
        offsets.push_back((pts(c) - bounds(c)) / (bounds(c + 1) - bounds(c)));
    }
    std::sort(offsets.begin(), offsets.end());
    const double n = static_cast<double>(offsets.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      double ecdf_hi = (i + 1.0) / n;
      double ecdf_lo = i / n;
      ks = std::max({ks, std::abs(ecdf_hi - offsets[i]), std::abs(offsets[i] - ecdf_lo)});
    }
    CHECK(ks * std::sqrt(n) <= 1.95);
  }

  TEST_CASE("weighted point estimates recover the squared norm") {
    LeverageDensity density{2, -1.0, 1.0};
    const Index k = 500;
    Vector bounds = build_partition(density, k);
    ContinuumSampler sampler(density, bounds);
    RngState rng{72, 0, 0};
    for (int rep = 0; rep < 20; ++rep) {
      Vector coeffs = testsup::random_vector(3, rng);
      Vector pts = sampler.sample(rng);
      CHECK(embedding_error(density, pts, coeffs) <= 0.2);
    }
  }

  TEST_CASE("embedding error rejects malformed input") {
    LeverageDensity density{2, -1.0, 1.0};
    Vector pts(3);
    pts << -0.5, 0.0, 0.5;
    CHECK_THROWS_AS(embedding_error(density, pts, Vector::Zero(3)), ZeroPolynomial);
    CHECK_THROWS_AS(embedding_error(density, pts, Vector::Ones(2)), DimensionMismatch);
  }
}
