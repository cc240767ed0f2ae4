#include <gtest/gtest.h>

#include "season/sampler.hpp"

using namespace season;

namespace {

std::vector<double> squares_about(const std::vector<double>& x, double c) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - c) * (x[i] - c);
  return out;
}

double normal_cdf(double x, double m, double s) { return 0.5 * std::erfc(-(x - m) / (s * std::sqrt(2.0))); }

std::vector<Discriminator> constant_discs(std::size_t K, Generator g) {
  return std::vector<Discriminator>(K, Discriminator(Mlp(1, {4, 4}), g));
}

}  // namespace

TEST(Langevin, ZeroStepsReturnsInit) {
  LangevinConfig cfg;
  cfg.n_steps = 0;
  cfg.init = Batch{{1.0}, {-2.5}, {3.25}};
  EXPECT_EQ(langevin([](const Point& x) { return x; }, cfg), *cfg.init);
}

TEST(Langevin, StandardNormalMoments) {
  LangevinConfig cfg;
  cfg.step_size = 1e-3;
  cfg.n_steps = 5000;
  cfg.n_chains = 10000;
  cfg.seed = 1;
  const auto x = first_coordinates(langevin([](const Point& p) { return Point{-p[0]}; }, cfg));
  EXPECT_LE(std::abs(detail::mean(x)), 3.0 * detail::standard_error(x));
  const double var = detail::mean(squares_about(x, detail::mean(x)));
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Langevin, ZeroScoreIsBrownianMotion) {
  LangevinConfig cfg;
  cfg.step_size = 1e-3;
  cfg.n_steps = 500;
  cfg.init = Batch(20000, Point{0.0});
  cfg.seed = 2;
  const auto x = first_coordinates(langevin([](const Point&) { return Point{0.0}; }, cfg));
  const auto sq = squares_about(x, 0.0);
  EXPECT_LE(std::abs(detail::mean(sq) - 2.0 * 1e-3 * 500), 3.0 * detail::standard_error(sq));
}

TEST(Langevin, KsAgainstLogConcaveTarget) {
  // N(1, 0.5^2): score -(x - 1) / 0.25, started from the standard normal prior.
  LangevinConfig cfg;
  cfg.step_size = 1e-3;
  cfg.n_steps = 2000;
  cfg.n_chains = 100000;
  cfg.seed = 3;
  const auto x = first_coordinates(langevin([](const Point& p) { return Point{-(p[0] - 1.0) / 0.25}; }, cfg));
  EXPECT_LE(ks_statistic(x, [](double v) { return normal_cdf(v, 1.0, 0.5); }), 0.02);
}

TEST(Langevin, DeterministicPerSeed) {
  LangevinConfig cfg;
  cfg.n_steps = 100;
  cfg.n_chains = 50;
  cfg.seed = 4;
  auto score = [](const Point& p) { return Point{-p[0] * p[0] * p[0]}; };
  EXPECT_EQ(langevin(score, cfg), langevin(score, cfg));
  auto other = cfg;
  other.seed = 5;
  EXPECT_NE(langevin(score, cfg), langevin(score, other));
}

TEST(Langevin, DivergenceNamesTheChain) {
  LangevinConfig cfg;
  cfg.step_size = 0.1;
  cfg.n_steps = 1000;
  cfg.n_chains = 3;
  try {
    langevin([](const Point& p) { return Point{10.0 * p[0]}; }, cfg);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("chain 0"), std::string::npos);
  }
}

TEST(Langevin, InvalidConfigIsRejected) {
  LangevinConfig cfg;
  cfg.step_size = 0.0;
  EXPECT_THROW(langevin([](const Point& p) { return p; }, cfg), ValidationError);
  cfg.step_size = 1e-3;
  cfg.n_chains = 0;
  EXPECT_THROW(langevin([](const Point& p) { return p; }, cfg), ValidationError);
}

TEST(ReverseEM, ExactGaussianScoreReproducesStandardNormal) {
  ReverseDiffusionConfig cfg;
  cfg.K = 200;
  cfg.n_samples = 10000;
  cfg.seed = 6;
  const auto score = noised_mixture_score(GaussianMixture::standard_normal(1), cfg);
  const auto x = first_coordinates(reverse_em(score, cfg));
  EXPECT_LE(std::abs(detail::mean(x)), 3.0 * detail::standard_error(x));
  const auto sq = squares_about(x, 0.0);
  EXPECT_LE(std::abs(detail::mean(sq) - 1.0), 3.0 * detail::standard_error(sq));
}

TEST(ReverseEM, ExactMixtureScoreRecoversMixture) {
  const auto data = GaussianMixture::diagonal({{-2.0}, {2.0}}, {{0.25}, {0.25}}, {0.3, 0.7});
  ReverseDiffusionConfig cfg;
  cfg.K = 400;
  cfg.n_samples = 4000;
  cfg.seed = 7;
  const auto x = first_coordinates(reverse_em(noised_mixture_score(data, cfg), cfg));
  EXPECT_LE(ks_statistic(x, [&](double v) { return data.cdf(v); }), 0.05);
}

TEST(ReverseEM, ConstantGuidanceIsNeutral) {
  ReverseDiffusionConfig cfg;
  cfg.K = 50;
  cfg.n_samples = 200;
  cfg.seed = 8;
  const auto score = noised_mixture_score(GaussianMixture::diagonal({{-1.0}, {1.0}}, {{0.3}, {0.3}}, {0.5, 0.5}), cfg);
  const auto plain = reverse_em(score, cfg);
  for (auto g : {Generator::kl(), Generator::reverse_kl(), Generator::js_shifted()}) {
    const auto discs = constant_discs(cfg.K, g);
    EXPECT_EQ(reverse_em(score, cfg, &discs), plain) << g.name();
    const std::vector<double> zero(cfg.K, 0.0);
    EXPECT_EQ(reverse_em(score, cfg, &discs, &zero), plain) << g.name();
  }
}

TEST(ReverseEM, DeterministicPerSeed) {
  ReverseDiffusionConfig cfg;
  cfg.K = 30;
  cfg.n_samples = 100;
  cfg.seed = 9;
  const auto score = noised_mixture_score(GaussianMixture::standard_normal(1), cfg);
  EXPECT_EQ(reverse_em(score, cfg), reverse_em(score, cfg));
}

TEST(ReverseEM, LevelMisalignmentIsRejected) {
  ReverseDiffusionConfig cfg;
  cfg.K = 10;
  cfg.n_samples = 5;
  const auto score = noised_mixture_score(GaussianMixture::standard_normal(1), cfg);
  const auto short_list = constant_discs(9, Generator::kl());
  EXPECT_THROW(reverse_em(score, cfg, &short_list), ValidationError);
  const auto discs = constant_discs(10, Generator::kl());
  const std::vector<double> lambdas(3, 0.0);
  EXPECT_THROW(reverse_em(score, cfg, &discs, &lambdas), ValidationError);
}

TEST(ReverseEM, DivergenceIsReported) {
  ReverseDiffusionConfig cfg;
  cfg.K = 100;
  cfg.n_samples = 2;
  EXPECT_THROW(reverse_em([](const Point& y, std::size_t) { return Point{50.0 * y[0]}; }, cfg), NumericError);
}

TEST(W1, Examples) {
  EXPECT_EQ(w1_1d(std::vector<double>{0.3, -1.0, 2.0}, std::vector<double>{2.0, 0.3, -1.0}), 0.0);
  EXPECT_EQ(w1_1d(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}), 1.0);
  Rng rng(10);
  std::vector<double> a(100000), b(100000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = 1.0 + rng.normal();
  EXPECT_NEAR(w1_1d(a, b), 1.0, 0.02);
}

TEST(W1, SizeMismatchIsAnError) {
  EXPECT_THROW(w1_1d(std::vector<double>{0.0}, std::vector<double>{0.0, 1.0}), ValidationError);
  EXPECT_THROW(w1_1d(Batch{{0.0}}, Batch{{0.0}, {1.0}}), ValidationError);
}
