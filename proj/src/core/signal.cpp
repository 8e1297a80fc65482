#include "signal.hpp"

#include <algorithm>

namespace pnfbar {

Signal Signal::constant(double value) { return Signal(Node{Constant{value}}); }

Signal Signal::sinusoid(double amplitude, double omega, double phase) {
    return Signal(Node{Sinusoid{amplitude, omega, phase}});
}

Signal Signal::sign_of_sinusoid(double amplitude, double omega) {
    return Signal(Node{SignOfSinusoid{amplitude, omega}});
}

Signal Signal::sum(std::vector<Signal> terms) { return Signal(Node{Sum{std::move(terms)}}); }

Signal Signal::table(std::vector<double> times, std::vector<double> values, int hold_order) {
    if (times.empty() || times.size() != values.size())
        throw ConfigError("table signal needs matching nonempty times and values");
    if (!std::is_sorted(times.begin(), times.end()))
        throw ConfigError("table signal times must be increasing");
    if (hold_order != 0 && hold_order != 1)
        throw ConfigError("table signal hold order must be 0 or 1");
    return Signal(Node{Table{std::move(times), std::move(values), hold_order}});
}

double Signal::eval(double t) const {
    return std::visit(
        [t](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Sinusoid>) {
                return n.amplitude * std::cos(n.omega * t + n.phase);
            } else if constexpr (std::is_same_v<T, SignOfSinusoid>) {
                return n.amplitude * sign_of(std::sin(n.omega * t));
            } else if constexpr (std::is_same_v<T, Sum>) {
                double acc = 0.0;
                for (const auto& s : n.terms) acc += s.eval(t);
                return acc;
            } else {
                const auto& ts = n.times;
                if (t <= ts.front()) return n.values.front();
                if (t >= ts.back()) return n.values.back();
                const auto it = std::upper_bound(ts.begin(), ts.end(), t);
                const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
                const std::size_t lo = hi - 1;
                if (n.hold_order == 0) return n.values[lo];
                const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
                return (1.0 - w) * n.values[lo] + w * n.values[hi];
            }
        },
        *node_);
}

double Signal::bound() const {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return std::abs(n.value);
            } else if constexpr (std::is_same_v<T, Sinusoid>) {
                return std::abs(n.amplitude);
            } else if constexpr (std::is_same_v<T, SignOfSinusoid>) {
                return std::abs(n.amplitude);
            } else if constexpr (std::is_same_v<T, Sum>) {
                double acc = 0.0;
                for (const auto& s : n.terms) acc += s.bound();
                return acc;
            } else {
                double m = 0.0;
                for (double v : n.values) m = std::max(m, std::abs(v));
                return m;
            }
        },
        *node_);
}

Signal scale_signal(const Signal& s, double c) {
    return std::visit(
        [c](const auto& n) -> Signal {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Signal::Constant>) {
                return Signal::constant(c * n.value);
            } else if constexpr (std::is_same_v<T, Signal::Sinusoid>) {
                return Signal::sinusoid(c * n.amplitude, n.omega, n.phase);
            } else if constexpr (std::is_same_v<T, Signal::SignOfSinusoid>) {
                return Signal::sign_of_sinusoid(c * n.amplitude, n.omega);
            } else if constexpr (std::is_same_v<T, Signal::Sum>) {
                std::vector<Signal> terms;
                terms.reserve(n.terms.size());
                for (const auto& t : n.terms) terms.push_back(scale_signal(t, c));
                return Signal::sum(std::move(terms));
            } else {
                std::vector<double> values = n.values;
                for (double& v : values) v *= c;
                return Signal::table(n.times, std::move(values), n.hold_order);
            }
        },
        s.node());
}

} // namespace pnfbar
