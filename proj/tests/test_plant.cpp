#include <doctest.h>

#include <cmath>

#include "core/plant.hpp"

using namespace pnfbar;

TEST_CASE("signal evaluation") {
    CHECK(Signal::constant(3.5).eval(100.0) == 3.5);
    CHECK(Signal::constant(3.5).bound() == 3.5);

    // cos(5 t) at t = 0 and at the first zero
    const Signal phi = Signal::sinusoid(1.0, 5.0);
    CHECK(phi.eval(0.0) == doctest::Approx(1.0));
    CHECK(phi.eval(M_PI / 10.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(phi.bound() == doctest::Approx(1.0));

    const Signal dj = Signal::sign_of_sinusoid(0.75, 1.0);
    CHECK(dj.eval(M_PI / 2.0) == doctest::Approx(0.75));
    CHECK(dj.eval(3.0 * M_PI / 2.0) == doctest::Approx(-0.75));
    CHECK(dj.eval(0.0) == 0.0); // sign(0) = 0
    CHECK(dj.bound() == doctest::Approx(0.75));

    const Signal s = Signal::sum({Signal::constant(1.0), Signal::sinusoid(2.0, 1.0)});
    CHECK(s.eval(0.0) == doctest::Approx(3.0));
    CHECK(s.bound() == doctest::Approx(3.0)); // sup bound adds

    const Signal tab = Signal::table({0.0, 1.0, 2.0}, {0.0, 2.0, 2.0});
    CHECK(tab.eval(0.5) == doctest::Approx(1.0)); // linear interpolation
    CHECK(tab.eval(-1.0) == doctest::Approx(0.0));
    CHECK(tab.eval(5.0) == doctest::Approx(2.0)); // clamped
    CHECK(tab.bound() == doctest::Approx(2.0));

    const Signal hold = Signal::table({0.0, 1.0}, {3.0, -1.0}, 0);
    CHECK(hold.eval(0.99) == doctest::Approx(3.0));

    CHECK(scale_signal(dj, 2.0).eval(M_PI / 2.0) == doctest::Approx(1.5));
    CHECK(scale_signal(s, -1.0).eval(0.0) == doctest::Approx(-3.0));
}

TEST_CASE("sign convention") {
    CHECK(sign_of(2.0) == 1.0);
    CHECK(sign_of(-0.1) == -1.0);
    CHECK(sign_of(0.0) == 0.0);
    CHECK(sign_of(-3.0) == -sign_of(3.0));
}

TEST_CASE("plant right-hand side") {
    PlantModel model;
    model.structure = ChainStructure(3);
    model.b = Signal::constant(2.0);
    model.b_lower = 2.0;
    model.perturbation.f = Signal::constant(0.5);
    model.perturbation.delta_b = Signal::constant(0.25);
    model.perturbation.M = 0.5;
    model.perturbation.eps_b = 0.25;

    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 3.0;
    const Eigen::VectorXd dx = plant_rhs(model, 0.0, x, 4.0);
    // shift structure carries x forward; last row is b(1+delta_b)u + f
    CHECK(dx(0) == doctest::Approx(-2.0));
    CHECK(dx(1) == doctest::Approx(3.0));
    CHECK(dx(2) == doctest::Approx(2.0 * 1.25 * 4.0 + 0.5));
}

TEST_CASE("rhs is affine in u with slope b(1+delta_b)") {
    PlantModel model;
    model.structure = ChainStructure(2);
    model.b = Signal::sinusoid(3.0, 1.0, 0.0); // 3 cos t
    model.b_lower = 0.1;
    model.perturbation.delta_b = Signal::constant(-0.5);
    model.perturbation.eps_b = 0.5;

    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const double t = 0.3;
    const double f0 = plant_rhs(model, t, x, 0.0)(1);
    const double f1 = plant_rhs(model, t, x, 1.0)(1);
    const double f2 = plant_rhs(model, t, x, 2.0)(1);
    CHECK(f2 - f1 == doctest::Approx(f1 - f0).epsilon(1e-12));
    CHECK(f1 - f0 == doctest::Approx(3.0 * std::cos(t) * 0.5).epsilon(1e-12));
}

TEST_CASE("input hook is applied to the actuator channel") {
    PlantModel model;
    model.structure = ChainStructure(2);
    model.b = Signal::constant(1.0);
    model.b_lower = 1.0;
    model.input_hook = [](double, const Eigen::VectorXd&, double u) {
        return std::clamp(u, -1.0, 1.0);
    };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    CHECK(plant_rhs(model, 0.0, x, 5.0)(1) == doctest::Approx(1.0));
    CHECK(plant_rhs(model, 0.0, x, -0.4)(1) == doctest::Approx(-0.4));
}

TEST_CASE("declared perturbation bounds are checked by sampling") {
    PerturbationSpec ok;
    ok.f = Signal::sinusoid(2.0, 5.0);
    ok.delta_b = Signal::constant(0.3);
    ok.M = 2.0;
    ok.eps_b = 0.3;
    CHECK_NOTHROW(ok.validate(10.0));

    PerturbationSpec under;
    under.f = Signal::sinusoid(2.0, 5.0);
    under.M = 1.5; // declared bound too small
    CHECK_THROWS_AS(under.validate(10.0), ConfigError);

    PerturbationSpec bad_b;
    bad_b.delta_b = Signal::constant(-1.0); // 1 + delta_b reaches 0
    bad_b.eps_b = 1.0;
    CHECK_THROWS_AS(bad_b.validate(1.0), ConfigError);
}

TEST_CASE("chain structure helpers") {
    const ChainStructure c(3);
    const Eigen::MatrixXd J = c.jordan_block();
    CHECK(J(0, 1) == 1.0);
    CHECK(J(1, 2) == 1.0);
    CHECK(J.diagonal().norm() == 0.0);
    CHECK(J(2, 0) == 0.0);
    const Eigen::VectorXd e = c.last_basis_vector();
    CHECK(e(2) == 1.0);
    CHECK(e.head(2).norm() == 0.0);
}
