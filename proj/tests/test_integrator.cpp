#include <string>

#include "support.hpp"

using namespace ellfam;
using namespace testing_support;

TEST(Integrator, RotatingExponential)
{
    auto rhs = [](double, const State &y) { return State{imag_unit * y[0]}; };
    const auto traj = integrate(rhs, {1.0}, 0.0, 1.0);
    EXPECT_CNEAR(traj.final_state[0], std::polar(1.0, 1.0), 1e-9);
    EXPECT_GT(traj.accepted, 0u);
}

TEST(Integrator, BlowUpUnderflowsNearSingularity)
{
    auto rhs = [](double, const State &y) { return State{y[0] * y[0]}; };
    try {
        integrate(rhs, {2.0}, 0.0, 1.0);
        FAIL() << "expected StepUnderflow";
    } catch (const StepUnderflow &e) {
        const std::string msg = e.what();
        const double t = std::stod(msg.substr(msg.find("t = ") + 4));
        EXPECT_NEAR(t, 0.5, 1e-3);
    }
}

TEST(Integrator, FixedStepOrderIsFive)
{
    double ratio_sum = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const cplx lambda = cplx(uniform(-1.0, 0.5), uniform(-3.0, 3.0));
        auto rhs = [&](double t, const State &y) { return State{lambda * y[0] + std::cos(t)}; };
        // y' = lambda y + cos t, y(0) = 1.
        const cplx exact_coef = 1.0 + lambda / (lambda * lambda + 1.0);
        const cplx exact = exact_coef * std::exp(lambda) +
                           (std::sin(1.0) - lambda * std::cos(1.0)) / (lambda * lambda + 1.0);
        const double e1 = std::abs(integrate_fixed_step(rhs, {1.0}, 0.0, 1.0, 16)[0] - exact);
        const double e2 = std::abs(integrate_fixed_step(rhs, {1.0}, 0.0, 1.0, 32)[0] - exact);
        ratio_sum += e1 / e2;
    }
    EXPECT_GE(ratio_sum / 5.0, 8.0);
}

TEST(Integrator, ErrorScalesWithTolerance)
{
    auto rhs = [](double, const State &y) { return State{imag_unit * y[0]}; };
    std::vector<double> errors;
    for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        IntegratorConfig cfg;
        cfg.rel_tol = tol;
        cfg.abs_tol = 1e-3 * tol;
        const auto traj = integrate(rhs, {1.0}, 0.0, 1.0, cfg);
        const double err = std::abs(traj.final_state[0] - std::polar(1.0, 1.0));
        EXPECT_LT(err, 100.0 * tol);
        errors.push_back(err);
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
        EXPECT_LT(errors[k], errors[k - 1]);
    }
}

TEST(Integrator, DenseCheckpoints)
{
    auto rhs = [](double, const State &y) { return State{imag_unit * y[0], -y[1]}; };
    const std::vector<double> cps{0.0, 0.1, 0.33, 0.5, 0.77, 1.0};
    const auto traj = integrate(rhs, {1.0, 1.0}, 0.0, 1.0, {}, cps);
    ASSERT_EQ(traj.points.size(), cps.size());
    for (std::size_t k = 0; k < cps.size(); ++k) {
        EXPECT_EQ(traj.points[k].t, cps[k]);
        EXPECT_CNEAR(traj.points[k].y[0], std::polar(1.0, cps[k]), 1e-8);
        EXPECT_CNEAR(traj.points[k].y[1], std::exp(-cps[k]), 1e-8);
    }
}

TEST(Integrator, AcceptHookCanProject)
{
    auto rhs = [](double, const State &y) { return State{imag_unit * y[0]}; };
    int calls = 0;
    auto hook = [&](double, State &y) {
        ++calls;
        y[0] /= std::abs(y[0]);
    };
    const auto traj = integrate(rhs, {1.0}, 0.0, 2.0, {}, {}, hook);
    EXPECT_EQ(static_cast<std::size_t>(calls), traj.accepted);
    EXPECT_NEAR(std::abs(traj.final_state[0]), 1.0, 1e-15);
}

TEST(Integrator, Errors)
{
    auto rhs = [](double, const State &y) { return State{imag_unit * y[0]}; };
    IntegratorConfig tight;
    tight.max_steps = 3;
    tight.initial_step = 1e-4;
    EXPECT_THROW(integrate(rhs, {1.0}, 0.0, 1.0, tight), MaxStepsExceeded);
    EXPECT_THROW(integrate(rhs, {1.0}, 1.0, 0.0), std::invalid_argument);
    auto bad = [](double t, const State &) { return State{t > 0.5 ? cplx(NAN, 0.0) : cplx(1.0)}; };
    EXPECT_THROW(integrate(bad, {0.0}, 0.0, 1.0), RhsFailure);
    auto throwing = [](double, const State &) -> State { throw std::runtime_error("boom"); };
    EXPECT_THROW(integrate(throwing, {0.0}, 0.0, 1.0), RhsFailure);
}
