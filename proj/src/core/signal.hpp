#pragma once

#include <cmath>
#include <memory>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace pnfbar {

inline double sign_of(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// Scalar signal of time, closed under summation. Every variant carries a
// computable sup-norm bound so declared perturbation bounds can be checked.
class Signal {
  public:
    Signal() : Signal(constant(0.0)) {}

    static Signal constant(double value);
    // amplitude * cos(omega * t + phase)
    static Signal sinusoid(double amplitude, double omega, double phase = 0.0);
    // amplitude * sign(sin(omega * t)), sign(0) evaluated as 0
    static Signal sign_of_sinusoid(double amplitude, double omega);
    static Signal sum(std::vector<Signal> terms);
    // Piecewise table over strictly increasing times; hold_order 0 holds the
    // previous value, 1 interpolates linearly. Clamped outside the range.
    static Signal table(std::vector<double> times, std::vector<double> values, int hold_order = 1);

    double eval(double t) const;
    double bound() const;

    struct Constant {
        double value;
    };
    struct Sinusoid {
        double amplitude, omega, phase;
    };
    struct SignOfSinusoid {
        double amplitude, omega;
    };
    struct Sum {
        std::vector<Signal> terms;
    };
    struct Table {
        std::vector<double> times, values;
        int hold_order;
    };
    using Node = std::variant<Constant, Sinusoid, SignOfSinusoid, Sum, Table>;

    const Node& node() const { return *node_; }

  private:
    explicit Signal(Node n) : node_(std::make_shared<Node>(std::move(n))) {}
    std::shared_ptr<const Node> node_;
};

// Pointwise scaling by a constant, preserving the variant structure.
Signal scale_signal(const Signal& s, double c);

} // namespace pnfbar
