#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "n2c/expert.hpp"
#include "n2c/vehicle_sim.hpp"

using namespace n2c;
using namespace n2c::sim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("step holds a resting vehicle still") {
    VehicleState s;
    const VehicleState next = step(s, ActuatorCommand(0, 0, 0), VehicleParams{}, 0.05);
    CHECK(next.x == 0.0);
    CHECK(next.y == 0.0);
    CHECK(next.speed == 0.0);
    CHECK(next.yaw == 0.0);
    CHECK(next.steering == 0.0);
}

TEST_CASE("step straight-line acceleration is analytic") {
    VehicleParams p;
    p.max_accel = 2.0;
    p.drag = 1e-12;  // params must be strictly positive
    VehicleState s;
    const VehicleState next = step(s, ActuatorCommand(1, 0, 0), p, 0.1);
    CHECK(next.speed == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(next.yaw == 0.0);
}

TEST_CASE("step circular motion matches the closed form") {
    VehicleParams p;  // L = 2.57
    VehicleState s;
    s.speed = 5.0;
    s.steering = 0.1;
    const double dt = 0.05;
    const double yaw_rate = 5.0 * std::tan(0.1) / p.wheelbase;
    CHECK(yaw_rate == doctest::Approx(0.1952).epsilon(1e-3));

    // Hold speed and steering via exact-balance commands: throttle balances
    // drag so speed stays fixed, torque 0 keeps steering.
    double turned = 0.0;
    VehicleState cur = s;
    for (int i = 0; i < 1000; ++i) {
        const double throttle = p.drag * cur.speed / p.max_accel;
        const VehicleState next = step(cur, ActuatorCommand(throttle, 0, 0), p, dt);
        double dyaw = next.yaw - cur.yaw;
        dyaw = wrap_angle(dyaw);
        turned += dyaw;
        cur = next;
        REQUIRE(cur.speed == doctest::Approx(5.0).epsilon(1e-9));
    }
    CHECK(turned == doctest::Approx(yaw_rate * 1000 * dt).epsilon(1e-6));
}

TEST_CASE("step validates dt") {
    VehicleState s;
    CHECK_THROWS_AS(step(s, ActuatorCommand(0, 0, 0), VehicleParams{}, 0.0), Error);
    CHECK_THROWS_AS(step(s, ActuatorCommand(0, 0, 0), VehicleParams{}, -0.01), Error);
    CHECK_THROWS_AS(step(s, ActuatorCommand(0, 0, 0), VehicleParams{}, 0.2), Error);
}

TEST_CASE("step fuzz: no NaN, speed >= 0, steering bounded") {
    auto rng = testutil::test_rng(10);
    VehicleParams p;
    for (int trial = 0; trial < 1000000; ++trial) {
        VehicleState s;
        s.x = rng.uniform(-1e3, 1e3);
        s.y = rng.uniform(-1e3, 1e3);
        s.yaw = rng.uniform(-kPi, kPi);
        s.speed = rng.uniform(0, 40);
        s.steering = rng.uniform(-p.max_steer, p.max_steer);
        const ActuatorCommand cmd(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(-1, 1));
        const VehicleState next = step(s, cmd, p, rng.uniform(1e-4, 0.1));
        REQUIRE(std::isfinite(next.x));
        REQUIRE(std::isfinite(next.y));
        REQUIRE(std::isfinite(next.yaw));
        REQUIRE(next.speed >= 0.0);
        REQUIRE(std::abs(next.steering) <= p.max_steer + 1e-15);
        REQUIRE(next.yaw > -kPi - 1e-15);
        REQUIRE(next.yaw <= kPi + 1e-15);
    }
}

TEST_CASE("zero commands never speed the vehicle up") {
    auto rng = testutil::test_rng(11);
    VehicleParams p;
    for (int trial = 0; trial < 1000; ++trial) {
        VehicleState s;
        s.speed = rng.uniform(0, 30);
        const VehicleState next = step(s, ActuatorCommand(0, 0, 0), p, 0.05);
        REQUIRE(next.speed <= s.speed);
    }
}

TEST_CASE("straight-line trajectory stays exactly straight") {
    VehicleParams p;
    VehicleState s;
    s.speed = 10.0;
    for (int i = 0; i < 10000; ++i) {
        const double throttle = p.drag * s.speed / p.max_accel;
        s = step(s, ActuatorCommand(throttle, 0, 0), p, 0.05);
        REQUIRE(std::abs(s.y) < 1e-9);
    }
    CHECK(s.x > 0.0);
}

TEST_CASE("Euler halving consistency on a 60 s circle") {
    VehicleParams p;
    auto endpoint = [&](double dt) {
        VehicleState s;
        s.speed = 5.0;
        s.steering = 0.12;
        const auto steps = static_cast<int>(std::llround(60.0 / dt));
        for (int i = 0; i < steps; ++i) {
            const double throttle = p.drag * s.speed / p.max_accel;
            s = step(s, ActuatorCommand(throttle, 0, 0), p, dt);
        }
        return s;
    };
    const VehicleState a = endpoint(0.02);
    const VehicleState b = endpoint(0.01);
    CHECK(std::hypot(a.x - b.x, a.y - b.y) < 0.05);
}

TEST_CASE("generate_route straight") {
    RouteGenParams p;
    p.length = 100.0;
    p.spacing = 1.0;
    const Route r = generate_route(RouteKind::kStraight, p, 0);
    CHECK(r.waypoints.size() == 101);
    CHECK_FALSE(r.closed);
    for (const auto& w : r.waypoints) CHECK(w.y == 0.0);
    CHECK(r.waypoints.back().x == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("generate_route circle radius invariant") {
    RouteGenParams p;
    p.radius = 20.0;
    p.spacing = 1.0;
    const Route r = generate_route(RouteKind::kCircle, p, 0);
    CHECK(r.closed);
    for (const auto& w : r.waypoints)
        REQUIRE(std::hypot(w.x - 0.0, w.y - 20.0) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("generate_route spline determinism and spacing") {
    RouteGenParams p;
    p.spacing = 1.0;
    p.spline_segments = 8;
    const Route a = generate_route(RouteKind::kSplineRandom, p, 42);
    const Route b = generate_route(RouteKind::kSplineRandom, p, 42);
    REQUIRE(a.waypoints.size() == b.waypoints.size());
    for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
        CHECK(a.waypoints[i].x == b.waypoints[i].x);
        CHECK(a.waypoints[i].y == b.waypoints[i].y);
        CHECK(a.waypoints[i].target_speed == b.waypoints[i].target_speed);
    }
    for (std::size_t i = 1; i < a.waypoints.size(); ++i) {
        const double d = std::hypot(a.waypoints[i].x - a.waypoints[i - 1].x,
                                    a.waypoints[i].y - a.waypoints[i - 1].y);
        REQUIRE(d <= 2.0 + 1e-9);
    }
    const Route c = generate_route(RouteKind::kSplineRandom, p, 43);
    CHECK(c.waypoints.size() > 2);
    bool differs = c.waypoints.size() != a.waypoints.size();
    for (std::size_t i = 0; !differs && i < std::min(a.waypoints.size(), c.waypoints.size()); ++i)
        differs = a.waypoints[i].x != c.waypoints[i].x || a.waypoints[i].y != c.waypoints[i].y;
    CHECK(differs);
}

TEST_CASE("generate_route rejects bad geometry") {
    RouteGenParams p;
    p.spacing = 0.0;
    CHECK_THROWS_AS(generate_route(RouteKind::kCircle, p, 0), BadGeometry);
    p.spacing = 3.0;
    CHECK_THROWS_AS(generate_route(RouteKind::kCircle, p, 0), BadGeometry);
    p.spacing = 1.0;
    p.radius = -5.0;
    CHECK_THROWS_AS(generate_route(RouteKind::kCircle, p, 0), BadGeometry);
}

TEST_CASE("figure8 waypoints sit on one of the two circles") {
    RouteGenParams p;
    p.radius = 20.0;
    p.spacing = 1.0;
    const Route r = generate_route(RouteKind::kFigure8, p, 0);
    CHECK(r.closed);
    for (const auto& w : r.waypoints) {
        const double d_top = std::abs(std::hypot(w.x, w.y - 20.0) - 20.0);
        const double d_bot = std::abs(std::hypot(w.x, w.y + 20.0) - 20.0);
        REQUIRE(std::min(d_top, d_bot) < 1e-9);
    }
}

namespace {

struct ExpertRun {
    std::vector<can::DriveRecord> records;
    VehicleState final_state;
};

ExpertRun run_expert(const Route& route, const ExpertConfig& cfg, std::uint64_t seed,
                     bool noise, double duration) {
    VehicleParams params;
    ExpertDriver driver(route, params, cfg, seed, noise);
    VehicleState s;
    const auto& a = route.waypoints[0];
    const auto& b = route.waypoints[1];
    s.x = a.x;
    s.y = a.y;
    s.yaw = std::atan2(b.y - a.y, b.x - a.x);
    ExpertRun run;
    const double dt = 0.05;
    for (double t = 0.0; t < duration; t += dt) {
        const ExpertStep es = driver.step(s, t, dt);
        run.records.push_back(es.record);
        s = step(s, es.cmd, params, dt);
    }
    run.final_state = s;
    return run;
}

}  // namespace

TEST_CASE("noise-free expert settles to the drag-balancing throttle") {
    RouteGenParams rp;
    rp.length = 900.0;
    rp.spacing = 1.0;
    rp.target_speed = 5.0;
    const Route route = generate_route(RouteKind::kStraight, rp, 0);

    ExpertConfig cfg;
    cfg.noise_sigma = 0.0;
    const ExpertRun run = run_expert(route, cfg, 1, false, 60.0);

    VehicleParams params;
    const double expected = params.drag * 5.0 / params.max_accel;
    const auto& last = run.records.back();
    CHECK(std::abs(last.throttle - expected) < 1e-3);
    CHECK(std::abs(last.torque) < 1e-6);
    CHECK(last.brake == 0.0);
    CHECK(run.final_state.speed == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("expert runs are deterministic per seed") {
    RouteGenParams rp;
    rp.radius = 20.0;
    const Route route = generate_route(RouteKind::kFigure8, rp, 0);
    ExpertConfig cfg;
    const ExpertRun a = run_expert(route, cfg, 7, true, 20.0);
    const ExpertRun b = run_expert(route, cfg, 7, true, 20.0);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].throttle == b.records[i].throttle);
        REQUIRE(a.records[i].brake == b.records[i].brake);
        REQUIRE(a.records[i].torque == b.records[i].torque);
    }
    const ExpertRun c = run_expert(route, cfg, 8, true, 20.0);
    bool differs = false;
    for (std::size_t i = 0; !differs && i < a.records.size(); ++i)
        differs = a.records[i].torque != c.records[i].torque;
    CHECK(differs);
}

TEST_CASE("expert records respect the physical ranges over a 5-minute run") {
    RouteGenParams rp;
    rp.target_speed = 7.0;
    rp.speed_profile = SpeedProfile::kSeededVariation;
    rp.spline_segments = 14;
    const Route route = generate_route(RouteKind::kSplineRandom, rp, 5);
    ExpertConfig cfg;
    const ExpertRun run = run_expert(route, cfg, 3, true, 300.0);
    REQUIRE(run.records.size() == 6000);
    double prev_t = -1.0;
    for (const auto& r : run.records) {
        REQUIRE(r.throttle >= 0.0);
        REQUIRE(r.throttle <= 1.0);
        REQUIRE(r.brake >= 0.0);
        REQUIRE(r.brake <= 1.0);
        REQUIRE(std::abs(r.torque) <= 1.0);
        REQUIRE(r.speed >= 0.0);
        REQUIRE(r.t > prev_t);
        prev_t = r.t;
        REQUIRE(r.wheel_speeds.size() == 4);
        double mean = 0.0;
        for (double w : r.wheel_speeds) mean += w;
        REQUIRE(mean / 4.0 == doctest::Approx(r.speed).epsilon(1e-12));
    }
}
