#include <doctest.h>

#include <cmath>
#include <random>

#include "evoset/inversion.hpp"

using namespace evoset;

namespace {

BSplineSurface fit_omega_b_surface(int grid_points, double epsilon) {
    // x = omega over [0.3, 1.0], y = b over [0, 1], z = d01
    SurfaceData data;
    data.rows = grid_points;
    data.cols = grid_points;
    data.points.resize(static_cast<size_t>(grid_points) * grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const double omega = 0.3 + 0.7 * i / (grid_points - 1);
        for (int j = 0; j < grid_points; ++j) {
            const double b = static_cast<double>(j) / (grid_points - 1);
            data.at(i, j) = {omega, b, evo_d01({omega, epsilon, b}).d01};
        }
    }
    return fit_surface(data, 3, 3, ParametrizationMethod::chord_length);
}

BSplineSurface fit_epsilon_b_surface(int grid_points, double omega) {
    // the control plane of the formula: x = epsilon, y = b, z = d01
    SurfaceData data;
    data.rows = grid_points;
    data.cols = grid_points;
    data.points.resize(static_cast<size_t>(grid_points) * grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const double eps = static_cast<double>(i) / (grid_points - 1);
        for (int j = 0; j < grid_points; ++j) {
            const double b = static_cast<double>(j) / (grid_points - 1);
            data.at(i, j) = {eps, b, evo_d01({omega, eps, b}).d01};
        }
    }
    return fit_surface(data, 3, 3, ParametrizationMethod::chord_length);
}

}  // namespace

TEST_CASE("solve_b fixed point and round trip") {
    const double at_zero = evo_d01({1.0, 0.2, 0.0}).d01;
    CHECK(solve_b(1.0, 0.2, at_zero, {0.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-10));

    const double target = evo_d01({1.0, 0.0, 0.05}).d01;
    CHECK(solve_b(1.0, 0.0, target, {0.0, 1.0}) == doctest::Approx(0.05).epsilon(1e-8));
}

TEST_CASE("solve_b reports the endpoint sign pattern when no root exists") {
    // d01 decreases in b for b >= 0, so a target above d(0) is unreachable
    const double unreachable = evo_d01({1.0, 0.0, 0.0}).d01 + 0.1;
    try {
        solve_b(1.0, 0.0, unreachable, {0.0, 1.0});
        FAIL("expected NoRootError");
    } catch (const NoRootError& e) {
        CHECK(e.f_lo() < 0.0);
        CHECK(e.f_hi() < 0.0);
        const std::string msg = e.what();
        CHECK(msg.find("(-, -)") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_b(1.0, 0.0, 0.5, {1.0, 0.5}), std::domain_error);
}

TEST_CASE("solve_b round trip across the sampling box") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> omega_dist(0.3, 1.0);
    std::uniform_real_distribution<double> eps_dist(0.0, 1.0);
    std::uniform_real_distribution<double> b_dist(0.02, 0.98);
    for (int k = 0; k < 50; ++k) {
        const double omega = omega_dist(rng);
        const double eps = eps_dist(rng);
        const double planted = b_dist(rng);
        const double target = evo_d01({omega, eps, planted}).d01;
        const double solved = solve_b(omega, eps, target, {0.0, 1.0});
        CHECK(solved == doctest::Approx(planted).epsilon(1e-8));
        CHECK(std::abs(evo_d01({omega, eps, solved}).d01 - target) < 1e-10);
    }
}

TEST_CASE("solve_epsilon") {
    const double at_zero = evo_d01({1.0, 0.0, 0.3}).d01;
    const EpsilonRoot zero = solve_epsilon(1.0, 0.3, at_zero, {-0.5, 1.0});
    CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-8));

    const double target = evo_d01({1.0, 0.3, 0.02}).d01;
    const EpsilonRoot root = solve_epsilon(1.0, 0.02, target, {0.0, 1.0});
    CHECK(root.value == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(root.sign_changes == 1);  // d01 is monotone in epsilon here

    CHECK_THROWS_AS(solve_epsilon(1.0, 0.0, 0.5, {-2.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(solve_epsilon(1.0, 0.0, 10.0, {0.0, 1.0}), NoRootError);
}

TEST_CASE("correction_schedule holds the EVO along a drift") {
    // constant trajectory whose target sits at b = 0
    DriftTrajectory still;
    const double d_still = evo_d01({1.0, 0.1, 0.0}).d01;
    for (int k = 0; k < 4; ++k) still.samples.push_back({0.1 * k, 1.0, 0.1});
    const CorrectionSchedule zeros = correction_schedule(still, d_still, {0.0, 1.0});
    CHECK(zeros.failures == 0);
    for (const auto& e : zeros.entries) {
        CHECK(e.status == ScheduleStatus::solved);
        CHECK(std::abs(e.b) < 1e-8);
    }

    // omega drifting 1.0 -> 0.9: the baseline grows, a positive b compensates
    DriftTrajectory drift;
    const double d_target = evo_d01({1.0, 0.0, 0.0}).d01;
    for (int k = 0; k < 5; ++k) drift.samples.push_back({0.25 * k, 1.0 - 0.025 * k, 0.0});
    const CorrectionSchedule schedule = correction_schedule(drift, d_target, {0.0, 1.0});
    CHECK(schedule.failures == 0);
    REQUIRE(schedule.entries.size() == 5);
    CHECK(std::abs(schedule.entries.front().b) < 1e-8);
    for (size_t k = 1; k < 5; ++k) {
        const auto& e = schedule.entries[k];
        CHECK(e.status == ScheduleStatus::solved);
        CHECK(e.b > 0.0);
        CHECK(e.b > schedule.entries[k - 1].b);
        CHECK(e.residual < 1e-10);
        // forward re-verification through the formula
        const double recomputed = evo_d01({drift.samples[k].omega, 0.0, e.b}).d01;
        CHECK(std::abs(recomputed - d_target) <= e.residual + 1e-15);
    }
}

TEST_CASE("correction_schedule isolates unreachable samples") {
    DriftTrajectory traj;
    traj.samples.push_back({0.0, 0.5, 0.0});   // reachable (baseline 1.0)
    traj.samples.push_back({1.0, 2.56, 0.0});  // baseline 0.442 < target, unreachable
    traj.samples.push_back({2.0, 0.6, 0.0});   // reachable again
    const double d_target = 0.8;
    const CorrectionSchedule schedule = correction_schedule(traj, d_target, {0.0, 1.0});
    CHECK(schedule.failures == 1);
    CHECK(schedule.entries[0].status == ScheduleStatus::solved);
    CHECK(schedule.entries[1].status == ScheduleStatus::unreachable);
    CHECK(std::isnan(schedule.entries[1].b));
    CHECK(schedule.entries[2].status == ScheduleStatus::solved);
    CHECK(schedule.entries[2].residual < 1e-10);

    DriftTrajectory unsorted;
    unsorted.samples.push_back({1.0, 1.0, 0.0});
    unsorted.samples.push_back({0.5, 1.0, 0.0});
    CHECK_THROWS_AS(correction_schedule(unsorted, 0.5, {0.0, 1.0}), std::domain_error);
}

TEST_CASE("invert_via_surface cross-validates against the direct root") {
    // control plane (epsilon, b) at the reference oscillator frequency
    const double omega = 1.0;
    const BSplineSurface surface = fit_epsilon_b_surface(9, omega);

    double worst = 0.0;
    for (double eps : {0.2, 0.4, 0.6, 0.8}) {
        for (double planted : {0.2, 0.45, 0.7}) {
            const double d_target = evo_d01({omega, eps, planted}).d01;
            const SurfaceInversion inv = invert_via_surface(surface, SurfaceAxis::epsilon, omega,
                                                            eps, d_target, {0.0, 1.0});
            CHECK(inv.b_direct == doctest::Approx(planted).epsilon(1e-7));
            CHECK(inv.discrepancy < 1e-3);
            worst = std::max(worst, inv.discrepancy);
        }
    }

    // a query at a training node is limited only by interpolation exactness
    const double node_eps = 0.5;
    const double node_b = 0.5;
    const double node_target = evo_d01({omega, node_eps, node_b}).d01;
    const SurfaceInversion at_node = invert_via_surface(surface, SurfaceAxis::epsilon, omega,
                                                        node_eps, node_target, {0.0, 1.0});
    CHECK(std::abs(at_node.b - node_b) < 1e-6);

    // refining the training grid shrinks the cross-validation error
    const BSplineSurface fine = fit_epsilon_b_surface(17, omega);
    double worst_fine = 0.0;
    for (double eps : {0.2, 0.4, 0.6, 0.8}) {
        for (double planted : {0.2, 0.45, 0.7}) {
            const double d_target = evo_d01({omega, eps, planted}).d01;
            const SurfaceInversion inv = invert_via_surface(fine, SurfaceAxis::epsilon, omega,
                                                            eps, d_target, {0.0, 1.0});
            worst_fine = std::max(worst_fine, inv.discrepancy);
        }
    }
    CHECK(worst_fine * 2.0 <= worst);

    // a target above everything the surface reaches is reported unreachable
    CHECK_THROWS_AS(invert_via_surface(surface, SurfaceAxis::epsilon, omega, 0.5, 5.0, {0.0, 1.0}),
                    std::runtime_error);
}

TEST_CASE("invert_via_surface over the (omega, b) axes") {
    // the omega^(-5/2) curvature at the low-omega edge needs the finer grid
    const double epsilon = 0.2;
    const BSplineSurface surface = fit_omega_b_surface(17, epsilon);
    for (double omega : {0.5, 0.7, 0.9}) {
        for (double planted : {0.25, 0.6}) {
            const double d_target = evo_d01({omega, epsilon, planted}).d01;
            const SurfaceInversion inv = invert_via_surface(surface, SurfaceAxis::omega, omega,
                                                            epsilon, d_target, {0.0, 1.0});
            CHECK(inv.discrepancy < 1e-3);
        }
    }
}
