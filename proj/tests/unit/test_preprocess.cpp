#include <doctest.h>

#include <cmath>
#include <random>

#include "feta/errors.hpp"
#include "feta/preprocess.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace feta;

TEST_CASE("znormalize maps constants to zeros and fixes mean/std") {
  CHECK(znormalize(std::vector<double>{5, 5, 5, 5}) == std::vector<double>{0, 0, 0, 0});
  CHECK(znormalize(std::vector<double>{-1, 1}) == std::vector<double>{-1, 1});

  // mu = 2.5, sigma = sqrt(1.25); frozen from the long-double reference.
  const std::vector<double> raw{1, 2, 3, 4};
  const std::vector<double> got = znormalize(raw);
  const std::vector<double> ref = oracles::znormalize_reference(raw, 1e-8);
  REQUIRE(got.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  CHECK(got[0] == doctest::Approx(-1.3416).epsilon(1e-4));
  CHECK(got[1] == doctest::Approx(-0.4472).epsilon(1e-4));
  CHECK(got[2] == doctest::Approx(0.4472).epsilon(1e-4));
  CHECK(got[3] == doctest::Approx(1.3416).epsilon(1e-4));
}

TEST_CASE("znormalize rejects empty and non-finite input") {
  try {
    znormalize(std::vector<double>{});
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_sequence);
  }
  try {
    znormalize(std::vector<double>{1.0, std::nan("")});
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::non_finite_input);
  }
}

TEST_CASE("znormalize is idempotent and affine-invariant") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_real_distribution<double> scale(0.1, 20.0);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int round = 0; round < 200; ++round) {
    const std::size_t len = 2 + rng() % 64;
    std::vector<double> raw(len);
    for (auto& v : raw) v = value(rng);
    const std::vector<double> normalized = znormalize(raw);

    const std::vector<double> twice = znormalize(normalized);
    const double a = scale(rng);
    const double b = shift(rng);
    std::vector<double> affine(len);
    for (std::size_t i = 0; i < len; ++i) affine[i] = a * raw[i] + b;
    const std::vector<double> affine_normalized = znormalize(affine);

    for (std::size_t i = 0; i < len; ++i) {
      CHECK(std::abs(twice[i] - normalized[i]) < 1e-9);
      CHECK(std::abs(affine_normalized[i] - normalized[i]) < 1e-9);
    }
  }
}

TEST_CASE("subsample index mapping") {
  const std::vector<double> five{0, 1, 2, 3, 4};
  CHECK(subsample(five, 10) == five);
  CHECK(subsample(five, 5) == five);

  // idx(j) = round_half_up(j * 9 / 4) over [0..9] -> 0, 2, 5, 7, 9.
  std::vector<double> ten(10);
  for (std::size_t i = 0; i < 10; ++i) ten[i] = static_cast<double>(i);
  CHECK(subsample(ten, 5) == std::vector<double>{0, 2, 5, 7, 9});

  try {
    subsample(std::vector<double>{}, 4);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_sequence);
  }
}

TEST_CASE("subsample keeps endpoints and picks a monotone subsequence") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  for (int round = 0; round < 100; ++round) {
    const std::size_t len = 3 + rng() % 200;
    const std::size_t target = 2 + rng() % 40;
    std::vector<double> raw(len);
    for (std::size_t i = 0; i < len; ++i) raw[i] = static_cast<double>(i) + value(rng) * 0.0;
    // Use distinct ramp values so subsequence positions are identifiable.
    const std::vector<double> out = subsample(raw, target);
    REQUIRE(out.size() == std::min(len, target));
    CHECK(out.front() == raw.front());
    CHECK(out.back() == raw.back());
    for (std::size_t j = 1; j < out.size(); ++j) CHECK(out[j] > out[j - 1]);
  }
}

TEST_CASE("preprocess_channel normalizes the full series before subsampling") {
  LabeledSeries series;
  series.series_id = 3;
  std::vector<double> raw(100, 0.0);
  raw.back() = 100.0;  // statistics must reflect the spike even if it lands on the last index
  series.values = {raw};

  PreprocessConfig cfg;
  cfg.target_length = 4;
  const ChannelSequence got = preprocess_channel(series, 0, cfg);

  const std::vector<double> expected = subsample(znormalize(raw, cfg.sigma_floor), 4);
  CHECK(got.values == expected);
  CHECK(got.series_id == 3);
  CHECK(got.channel == 0);
}

TEST_CASE("preprocess_channel length contract and error paths") {
  LabeledSeries constant;
  constant.values = {std::vector<double>(640, 2.5)};
  PreprocessConfig cfg;  // default L = 128
  const ChannelSequence c = preprocess_channel(constant, 0, cfg);
  CHECK(c.values.size() == 128);
  for (double v : c.values) CHECK(v == 0.0);

  LabeledSeries raw4;
  raw4.values = {{1, 2, 3, 4}};
  cfg.target_length = 4;
  CHECK(preprocess_channel(raw4, 0, cfg).values == znormalize(std::vector<double>{1, 2, 3, 4}));

  try {
    preprocess_channel(raw4, 1, cfg);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::channel_out_of_range);
  }
}
