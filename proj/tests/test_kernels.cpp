#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpca/kernels.hpp"
#include "cpca/rng.hpp"

using namespace cpca;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

bool have_avx2() {
  const auto names = kern::available();
  return std::find(names.begin(), names.end(), "avx2") != names.end();
}

}  // namespace

TEST_CASE("kernel variants agree with the scalar reference") {
  if (!have_avx2()) return;  // single-variant machine: nothing to compare
  const auto& s = kern::scalar_ops();
  kern::force("avx2");
  const auto& v = kern::active();
  REQUIRE(std::string(v.name) == "avx2");

  Rng rng(314);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 64u, 1001u}) {
    auto x = random_vec(n, rng);
    auto y = random_vec(n, rng);

    CHECK(v.dot(x.data(), y.data(), n) ==
          doctest::Approx(s.dot(x.data(), y.data(), n)).epsilon(1e-12));
    CHECK(v.sumsq(x.data(), n) == doctest::Approx(s.sumsq(x.data(), n)).epsilon(1e-12));
    CHECK(v.sum(x.data(), n) == doctest::Approx(s.sum(x.data(), n)).epsilon(1e-12));

    auto y1 = y, y2 = y;
    s.axpy(0.37, x.data(), y1.data(), n);
    v.axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));

    auto a1 = x, a2 = x, b1 = y, b2 = y;
    s.rot(a1.data(), b1.data(), 0.8, 0.6, n);
    v.rot(a2.data(), b2.data(), 0.8, 0.6, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-13));
      CHECK(b1[i] == doctest::Approx(b2[i]).epsilon(1e-13));
    }

    auto s1 = x, s2 = x;
    s.scal(-1.25, s1.data(), n);
    v.scal(-1.25, s2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);

    auto d1 = x, d2 = x;
    s.sub(d1.data(), y.data(), n);
    v.sub(d2.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == d2[i]);
  }
  kern::force("scalar");
  CHECK(std::string(kern::active().name) == "scalar");
  kern::force(have_avx2() ? "avx2" : "scalar");
}

TEST_CASE("unknown kernel variant is rejected") {
  CHECK_THROWS(kern::force("sse9"));
}
