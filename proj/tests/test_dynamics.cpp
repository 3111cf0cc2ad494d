#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qdiscord/dynamics.hpp"
#include "test_support.hpp"

namespace {

using namespace qdiscord;
using qdiscord::testing::random_physical;

constexpr double kFHalf = 0.18872187554086714;
constexpr double kFPoint05 = 0.0018041209571899134;
constexpr double kPStar = 0.11086029498053860;
constexpr double kPStarHalf = 0.15910358474628546;
constexpr double kThreeQubitOnset = 0.010698776766036795;

const FamilyCoefficients kFourQubit{4, {0.8, 0.4, 0.5}};

TEST(ChannelParams, FromRate) {
  const auto c = ChannelParams::from_rate(2.0, 0.5);
  EXPECT_NEAR(c.p, 1.0 - std::exp(-1.0), 1e-16);
  EXPECT_EQ(ChannelParams::from_rate(0.0, 3.0).p, 0.0);
  EXPECT_THROW(ChannelParams::from_rate(-1.0, 1.0), ArgumentError);
}

TEST(PhaseFlip, Coefficients) {
  const auto fc = FamilyCoefficients::make(3, 0.3, -0.2, 0.1);
  EXPECT_EQ(phase_flip_coefficients(fc, 0.0), fc);
  EXPECT_EQ(phase_flip_coefficients(fc, 1.0), FamilyCoefficients::make(3, 0.0, -0.0, 0.1));
  const auto r = phase_flip_coefficients(kFourQubit, 0.5);
  EXPECT_NEAR(r.c[0], 0.05, 1e-16);
  EXPECT_NEAR(r.c[1], 0.025, 1e-16);
  EXPECT_EQ(r.c[2], 0.5);
  EXPECT_THROW(phase_flip_coefficients(fc, -0.01), ArgumentError);
  EXPECT_THROW(phase_flip_coefficients(fc, 1.01), ArgumentError);
}

TEST(Kraus, Completeness) {
  for (double p : {0.0, 0.3, 1.0}) {
    for (int n : {1, 3}) {
      const auto ks = kraus_operators(n, p);
      ASSERT_EQ(ks.size(), static_cast<std::size_t>(2 * n));
      for (int q = 0; q < n; ++q) {
        const auto& g0 = ks[2 * q];
        const auto& g1 = ks[2 * q + 1];
        const ComplexMatrix sum = g0.adjoint() * g0 + g1.adjoint() * g1;
        EXPECT_LT((sum - identity(sum.rows())).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(Kraus, ZeroStrength) {
  const auto ks = kraus_operators(2, 0.0);
  EXPECT_LT((ks[0] - identity(4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(ks[1].cwiseAbs().maxCoeff(), 0.0);
}

TEST(Kraus, MatchesCoefficientScaling) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {3, 4}) {
    for (int i = 0; i < 20; ++i) {
      const auto fc = random_physical(n, rng);
      const double p = i == 0 ? 0.3 : u(rng);
      const auto out = apply_kraus_channel(build_density_matrix(fc), kraus_operators(n, p));
      const auto expect = build_density_matrix(phase_flip_coefficients(fc, p));
      EXPECT_LT((out.matrix() - expect.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Trajectory, FrozenPlateauAndDecay) {
  const auto pts = discord_trajectory(kFourQubit, {0.0, 0.05, 0.1, 0.2, 0.5});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(*pts[static_cast<std::size_t>(i)].discord_bits, kFHalf, 1e-9);
  EXPECT_LT(*pts[3].discord_bits, kFHalf);
  EXPECT_NEAR(*pts[4].discord_bits, kFPoint05, 1e-12);
  EXPECT_NEAR(pts[4].theta, 0.5, 0.0);
}

TEST(Trajectory, PlateauIsFlatBeforeTransition) {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back((kPStar - 1e-6) * i / 100.0);
  const auto pts = discord_trajectory(kFourQubit, grid);
  for (const auto& pt : pts) EXPECT_NEAR(*pt.discord_bits, entropy_defect(0.5), 1e-12);
}

TEST(Trajectory, DecaysAfterTransitionAndIsContinuous) {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(kPStar + (1.0 - kPStar) * i / 200.0);
  const auto pts = discord_trajectory(kFourQubit, grid);
  // Past p ~ 0.98 the true value sinks below the rounding floor of the
  // four-term sum (a few ulp of f(0.5)), so strictness is checked above it.
  constexpr double floor = 1e-14;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (*pts[i - 1].discord_bits > floor) {
      EXPECT_LT(*pts[i].discord_bits, *pts[i - 1].discord_bits) << "p = " << pts[i].p;
    } else {
      EXPECT_LE(*pts[i].discord_bits, floor) << "p = " << pts[i].p;
    }
  }
  EXPECT_NEAR(*pts.back().discord_bits, 0.0, 1e-15);

  // one-sided limits; the slope after p* is about 1.8 bits per unit p
  const auto edge = discord_trajectory(kFourQubit, {kPStar - 1e-12, kPStar, kPStar + 1e-12});
  EXPECT_NEAR(*edge[0].discord_bits, *edge[1].discord_bits, 1e-9);
  EXPECT_NEAR(*edge[2].discord_bits, *edge[1].discord_bits, 1e-9);
}

TEST(Trajectory, ThreeQubitExampleStrictlyDecreasing) {
  const auto pts = discord_trajectory(FamilyCoefficients::make(3, 0.3, 0.2, 0.1), uniform_p_grid(100));
  ASSERT_EQ(pts.size(), 101U);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) EXPECT_LT(*pts[i].discord_bits, *pts[i - 1].discord_bits);
}

TEST(Trajectory, OddNHasNoFrozenInterval) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 20; ++i) {
    const auto fc = random_physical(3, rng);
    if (closed_form_discord(fc).value_bits < 1e-6) continue;
    const auto pts = discord_trajectory(fc, uniform_p_grid(100));
    // Adjacent points are 0.01 apart. Near p = 1, D shrinks like (1-p)^6 and
    // a whole interval can honestly change by less than 1e-12, so the size
    // check only applies while D itself is at least 1e-10.
    for (std::size_t j = 1; j < pts.size(); ++j) {
      const double before = *pts[j - 1].discord_bits;
      const double after = *pts[j].discord_bits;
      EXPECT_LT(after, before) << format_family(fc) << " p = " << pts[j].p;
      if (before >= 1e-10) {
        EXPECT_GT(before - after, 1e-12) << format_family(fc) << " p = " << pts[j].p;
      }
    }
  }
}

TEST(Trajectory, UnphysicalStartIsFlagged) {
  const auto fc = FamilyCoefficients::make(3, 0.8, 0.4, 0.5);
  const auto pts = discord_trajectory(fc, {0.0, 0.01, kThreeQubitOnset + 1e-9, 0.5});
  EXPECT_FALSE(pts[0].physical);
  EXPECT_FALSE(pts[0].discord_bits.has_value());
  EXPECT_FALSE(pts[1].physical);
  EXPECT_TRUE(pts[2].physical);
  EXPECT_TRUE(pts[3].discord_bits.has_value());
  EXPECT_NEAR(pts[0].delta, std::sqrt(1.05), 1e-15);
}

TEST(Trajectory, CsvFormat) {
  std::ostringstream os;
  write_trajectory_csv(os, discord_trajectory(FamilyCoefficients::make(3, 0.8, 0.4, 0.5), {0.0, 1.0}));
  std::istringstream is(os.str());
  std::string header, first, second;
  std::getline(is, header);
  std::getline(is, first);
  std::getline(is, second);
  EXPECT_EQ(header, "p,c1,c2,c3,delta,theta,discord,physical");
  EXPECT_EQ(first, "0,0.80000000000000004,0.40000000000000002,0.5,1.0246950765959599,0.80000000000000004,,false");
  EXPECT_EQ(second, "1,0,0,0.5,0.5,0.5,0,true");
}

TEST(UniformGrid, Endpoints) {
  const auto g = uniform_p_grid(200);
  ASSERT_EQ(g.size(), 201U);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_THROW(uniform_p_grid(0), ArgumentError);
}

TEST(Transition, FourQubitExample) {
  const auto r = transition_point(kFourQubit);
  EXPECT_NEAR(r.analytic, kPStar, 1e-15);
  EXPECT_NEAR(r.analytic, 0.11086, 5e-6);
  EXPECT_NEAR(r.bisection, r.analytic, 1e-8);
  EXPECT_NEAR(r.plateau_bits, kFHalf, 1e-15);
}

TEST(Transition, HalfRatio) {
  const auto r = transition_point(FamilyCoefficients::make(4, 0.9, 0.405, 0.45));
  EXPECT_NEAR(r.analytic, kPStarHalf, 1e-15);
  EXPECT_NEAR(r.analytic, 0.159104, 5e-7);
  EXPECT_NEAR(r.bisection, r.analytic, 1e-8);
}

TEST(Transition, EqualMagnitudes) {
  const auto r = transition_point(FamilyCoefficients::make(4, 0.6, 0.36, 0.6));
  EXPECT_EQ(r.analytic, 0.0);
  EXPECT_EQ(r.bisection, 0.0);
}

TEST(Transition, EightQubits) {
  const auto r = transition_point(FamilyCoefficients::make(8, 0.8, 0.4, 0.5));
  EXPECT_NEAR(r.analytic, 1.0 - std::pow(0.625, 0.125), 1e-15);
  EXPECT_NEAR(r.bisection, r.analytic, 1e-8);
}

TEST(Transition, NamedPreconditions) {
  auto message = [](const FamilyCoefficients& fc) {
    try {
      transition_point(fc);
    } catch (const ArgumentError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message({3, {0.3, 0.06, 0.2}}).find("multiple of 4"), std::string::npos);
  EXPECT_NE(message({4, {0.8, 0.3, 0.5}}).find("c2 = c1*c3"), std::string::npos);
  EXPECT_NE(message({4, {0.8, 0.0, 0.0}}).find("c3 != 0"), std::string::npos);
  EXPECT_NE(message({4, {0.5, 0.4, 0.8}}).find("|c3| < |c1|"), std::string::npos);
}

TEST(Monotone, Examples) {
  EXPECT_TRUE(certify_monotone_decrease(FamilyCoefficients::make(3, 0.3, 0.2, 0.1), uniform_p_grid(200)).passed);
  EXPECT_TRUE(certify_monotone_decrease(FamilyCoefficients::make(5, 0.4, 0.3, 0.2), uniform_p_grid(200)).passed);
  const auto flat = certify_monotone_decrease(FamilyCoefficients::make(3, 0.5, 0, 0), uniform_p_grid(200));
  EXPECT_TRUE(flat.passed);
  EXPECT_LE(flat.max_slope, 0.0);
}

TEST(Monotone, FlatTrajectoryFailsStrictCertificate) {
  // D is identically 0 here, so a zero tolerance must reject it
  const auto r = certify_monotone_decrease(FamilyCoefficients::make(3, 0.5, 0, 0), uniform_p_grid(20), 0.0);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.offending_p.has_value());
  EXPECT_EQ(*r.offending_p, 0.05);
}

TEST(Monotone, Errors) {
  EXPECT_THROW(certify_monotone_decrease(kFourQubit, uniform_p_grid(10)), ArgumentError);
  EXPECT_THROW(certify_monotone_decrease(FamilyCoefficients::make(3, 0.8, 0.4, 0.5), uniform_p_grid(10)),
               ArgumentError);
}

}  // namespace
