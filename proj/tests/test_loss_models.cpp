#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fraclossy/analysis.hpp"
#include "fraclossy/loss_models.hpp"

using namespace fraclossy;

namespace {

constexpr double kPi = std::numbers::pi;

SampledSignal slow_pulse(double wc = 2.0 * kPi, double sig = 1.5) {
  return SampledSignal::from_function(TimeGrid{0.0, 16.0 / 4096.0, 4096}, [=](double t) {
    const double u = t - 8.0;
    return std::exp(-u * u / (2.0 * sig * sig)) * std::sin(wc * u);
  });
}

double interior_rel(const SampledSignal& a, const SampledSignal& b) {
  return relative_l2(std::span<const double>(a.values).subspan(5), std::span<const double>(b.values).subspan(5));
}

// Re[H / (-i w)] / |w|^y over the 95% band of p
std::vector<double> reduced_symbol(const SampledSignal& p, const SampledSignal& out, double y) {
  const auto H = transfer(p, out, Window::tukey(0.25));
  const auto band = energy_band(spectrum(p), 0.95);
  const double dw = 2.0 * kPi / (static_cast<double>(p.size()) * p.dt());
  std::vector<double> r;
  for (std::size_t k = band.k_lo; k <= band.k_hi; ++k) {
    const double w = dw * static_cast<double>(k);
    r.push_back((H[k] / std::complex<double>(0.0, -w)).real() / std::pow(w, y));
  }
  return r;
}

}  // namespace

TEST(AttenuationLaw, Examples) {
  const LossMedium m{1500.0, 2.0, 1.3};
  EXPECT_NEAR(attenuation_law(10.0, m), 39.905246299377595, 1e-11);
  EXPECT_EQ(attenuation_law(0.0, m), 0.0);
  const LossMedium flat{1500.0, 0.7, 0.0};
  EXPECT_EQ(attenuation_law(3.0, flat), 0.7);
  EXPECT_EQ(attenuation_law(3e6, flat), 0.7);
}

TEST(LossMedium, Validation) {
  EXPECT_THROW((LossMedium{0.0, 1.0, 1.0}).validate(), DomainError);
  EXPECT_THROW((LossMedium{1500.0, -1.0, 1.0}).validate(), DomainError);
  EXPECT_THROW((LossMedium{1500.0, 1.0, 2.5}).validate(), DomainError);
  EXPECT_NO_THROW((LossMedium{1500.0, 0.0, 2.0}).validate());
}

TEST(DispersionK, LosslessLimit) {
  const LossMedium m{1500.0, 0.0, 1.0};
  const auto d = dispersion_k(1e6, m);
  EXPECT_DOUBLE_EQ(d.beta, 1e6 / 1500.0);
  EXPECT_EQ(d.alpha, 0.0);
}

TEST(DispersionK, SmallAttenuationLimit) {
  const double c = 1500.0, w = 2.0 * kPi * 1e6;
  for (double y : {1.0, 2.0}) {
    const LossMedium m{c, 0.01 / (c * std::pow(w, y - 1.0)), y};
    EXPECT_NEAR(dispersion_k(w, m).alpha / attenuation_law(w, m), 1.0, 0.01) << "y=" << y;
  }
}

TEST(DispersionK, DecayingBranchEverywhere) {
  for (double y : {0.0, 0.3, 1.0, 1.7, 2.0})
    for (double a0 : {0.0, 1e-6, 1e-2, 1.0})
      for (double w : {0.0, 1e-3, 1.0, 1e3, 1e7}) {
        const auto d = dispersion_k(w, LossMedium{1500.0, a0, y});
        EXPECT_GE(d.beta, 0.0);
        EXPECT_GE(d.alpha, 0.0);
      }
}

TEST(SmallnessRatio, Examples) {
  EXPECT_EQ(smallness_ratio(LossMedium{1500.0, 0.0, 1.5}, 1e6), 0.0);
  const LossMedium one{1500.0, 2e-6, 1.0};
  EXPECT_DOUBLE_EQ(smallness_ratio(one, 1e3), 2e-6 * 1500.0);
  EXPECT_DOUBLE_EQ(smallness_ratio(one, 1e7), 2e-6 * 1500.0);
  EXPECT_EQ(smallness_threshold, 0.1);
  // below y = 1 the band's lower edge dominates
  const LossMedium low{1500.0, 1e-3, 0.5};
  EXPECT_DOUBLE_EQ(smallness_ratio(low, 4e6, 1e6), 1e-3 * std::pow(1e6, -0.5) * 1500.0);
  EXPECT_THROW(smallness_ratio(low, 0.0), DomainError);
}

TEST(SzaboOperator, IntegerRows) {
  const auto p = SampledSignal::from_function(TimeGrid::spanning(0.0, 6.0, 2048), [](double t) { return std::sin(t); });
  const auto cosine = SampledSignal::from_function(p.grid, [](double t) { return std::cos(t); });
  EXPECT_LT(interior_rel(szabo_operator(p, 0.0), cosine), 1e-4);
  EXPECT_LT(interior_rel(szabo_operator(p, 2.0), cosine), 1e-4);
}

TEST(SzaboOperator, RejectsExponentOutsideRange) {
  const auto p = slow_pulse();
  EXPECT_THROW(szabo_operator(p, -0.1), DomainError);
  EXPECT_THROW(szabo_operator(p, 2.1), DomainError);
  EXPECT_THROW(modified_loss(p, 2.1), DomainError);
}

TEST(SzaboOperator, QuiescentEquivalence) {
  const auto p = slow_pulse();
  for (double y : {0.5, 1.0, 1.5}) EXPECT_LT(interior_rel(szabo_operator(p, y), modified_loss(p, y)), 1e-2) << "y=" << y;
}

TEST(ModifiedLoss, ConstantGivesZero) {
  const auto c = SampledSignal::from_function(TimeGrid::spanning(0.0, 1.0, 256), [](double) { return 9.0; });
  for (double y : {0.4, 1.0, 1.6})
    for (double v : modified_loss(c, y).values) EXPECT_EQ(v, 0.0);
}

TEST(ModifiedLoss, SpectralSymbol) {
  const auto p = slow_pulse();
  PositiveOptions opt;
  opt.time_scale = 1.0 / (2.0 * kPi);
  for (double y : {0.25, 0.5, 1.0, 1.5, 1.75})
    for (double r : reduced_symbol(p, modified_loss(p, y, opt), y)) EXPECT_NEAR(r, 1.0, 0.05) << "y=" << y;
}

TEST(ModifiedLoss, LogarithmicRowBracketed) {
  // y = 1 takes its own kernel; its symbol must sit between the neighbours
  const auto p = slow_pulse();
  PositiveOptions opt;
  opt.time_scale = 1.0 / (2.0 * kPi);
  const auto lo = reduced_symbol(p, modified_loss(p, 0.99, opt), 0.99);
  const auto at = reduced_symbol(p, modified_loss(p, 1.0, opt), 1.0);
  const auto hi = reduced_symbol(p, modified_loss(p, 1.01, opt), 1.01);
  for (std::size_t i = 0; i < at.size(); ++i) {
    EXPECT_NEAR(at[i], lo[i], 0.02);
    EXPECT_NEAR(at[i], hi[i], 0.02);
  }
  const auto sq = SampledSignal::from_function(TimeGrid::spanning(0.0, 1.0, 512), [](double t) { return t * t; });
  for (double v : modified_loss(sq, 1.0).values) EXPECT_TRUE(std::isfinite(v));
}

TEST(ModifiedLoss, NoSignChangeAcrossOne) {
  const auto p = slow_pulse();
  for (double y : {0.5, 0.75, 1.0, 1.25, 1.5})
    for (double r : reduced_symbol(p, modified_loss(p, y), y)) EXPECT_GT(r, 0.0) << "y=" << y;
}

TEST(ModifiedLoss, EdgeContinuity) {
  const auto p = slow_pulse();
  EXPECT_LT(interior_rel(modified_loss(p, 0.01), derivative(p, 1)), 0.05);
  auto d3 = derivative(p, 3);
  for (double& v : d3.values) v = -v;
  EXPECT_LT(interior_rel(modified_loss(p, 1.99), d3), 0.05);
  EXPECT_EQ(modified_loss(p, 0.0).values, derivative(p, 1).values);
  EXPECT_EQ(modified_loss(p, 2.0).values, d3.values);
}

TEST(ModelDispersion, SharesTheLossTerm) {
  // the loss (imaginary) part of k^2 is the power law's; the causal symbol
  // adds a real, dispersive part 2 r(w) tan(y pi/2) (w/c)^2; at y = 1 the
  // phase speed grows with ln(w / wc)
  const double c = 1500.0, wc = 2.0 * kPi * 1e6;
  PositiveOptions opt;
  opt.time_scale = 1.0 / wc;
  for (double y : {0.5, 1.0, 1.5}) {
    const LossMedium m{c, 0.01 / (c * std::pow(wc, y - 1.0)), y};
    for (double f : {0.6, 1.0, 1.4}) {
      const double w = f * wc;
      const auto a = model_dispersion_k(w, m, opt).k();
      const auto b = dispersion_k(w, m).k();
      const auto a2 = a * a, b2 = b * b;
      EXPECT_NEAR(a2.imag() / b2.imag(), 1.0, 1e-9) << "y=" << y << " f=" << f;
      const double r = smallness_ratio(m, w);
      const double disp = y == 1.0 ? -2.0 * r * (2.0 / kPi) * std::log(f) : 2.0 * r * std::tan(y * kPi / 2.0);
      EXPECT_NEAR((a2.real() - b2.real()) / std::pow(w / c, 2), disp, 1e-9) << "y=" << y << " f=" << f;
    }
  }
}
